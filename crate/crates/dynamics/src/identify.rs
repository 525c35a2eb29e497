//! Grey-box identification of contact parameters from force profiles.
//!
//! Given a measured normal-force lobe, a known effective mass, and the
//! commanded approach velocity, [`fit_viscoelastic`] and [`fit_maxwell`]
//! recover the spring and dashpot coefficients by minimizing the RMS force
//! error between the measurement and the simulated profile, resampled at the
//! measurement timestamps. The search runs in log-parameter space: a
//! Nelder-Mead sweep from four log-spaced starts, refined by a damped
//! Gauss-Newton polish with numerical Jacobians.
//!
//! [`estimate_cor_from_profile`] skips the model entirely and reads the
//! restitution off the integrated impulse.

use serde::{Deserialize, Serialize};

use crate::contact::{
    force_at_times, simulate_with, ContactError, ContactModel, SimSettings,
};
use crate::scalar::{lit, Real};

mod optim;
pub mod profile_io;

use optim::{gauss_newton, nelder_mead, GaussNewtonOptions, NelderMeadOptions};

/// Errors from profile handling and fitting.
#[derive(Debug, thiserror::Error)]
pub enum IdentifyError<T: Real> {
    #[error("no impact found: force never reaches the threshold")]
    NoImpactFound,
    #[error("malformed force profile: {reason}")]
    MalformedProfile { reason: String },
    #[error("identification inputs invalid: {reason}")]
    InvalidInput { reason: String },
    #[error("fit did not converge after {iterations} iterations (best RMS {best_rms})")]
    FitDiverged {
        iterations: usize,
        best_rms: f64,
        /// Best parameters seen before giving up.
        best: FitResult<T>,
    },
    #[error(transparent)]
    Contact(#[from] ContactError),
}

/// Uniformly sampled normal-force recording.
#[derive(Debug, Clone, PartialEq)]
pub struct ForceProfile<T: Real> {
    times: Vec<T>,
    force: Vec<T>,
    rate_hz: T,
    /// Commanded approach velocity (negative), when known.
    pub v_pre: Option<T>,
    /// Free-form condition label (configuration name, run id).
    pub label: Option<String>,
}

impl<T: Real> ForceProfile<T> {
    /// Builds a profile from matching time/force samples, validating uniform
    /// sampling.
    pub fn new(times: Vec<T>, force: Vec<T>) -> Result<Self, IdentifyError<T>> {
        let malformed = |reason: String| IdentifyError::MalformedProfile { reason };
        if times.len() != force.len() {
            return Err(malformed("times and forces differ in length".into()));
        }
        if times.len() < 2 {
            return Err(malformed("profile needs at least two samples".into()));
        }
        if times
            .iter()
            .chain(force.iter())
            .any(|v| !v.is_finite())
        {
            return Err(malformed("profile contains non-finite values".into()));
        }
        let dt = times[1] - times[0];
        if dt <= T::zero() {
            return Err(malformed("time samples must increase".into()));
        }
        for w in times.windows(2) {
            let step = w[1] - w[0];
            if ((step - dt) / dt).abs() > lit(1e-6) {
                return Err(malformed("sampling is not uniform".into()));
            }
        }
        Ok(Self {
            times,
            force,
            rate_hz: T::one() / dt,
            v_pre: None,
            label: None,
        })
    }

    /// Builds a profile from a simulated trace, keeping the uniform output
    /// grid (the trailing off-grid event sample, if any, is dropped) and
    /// carrying over the approach velocity.
    pub fn from_trace(
        trace: &crate::contact::ImpactTrace<T>,
    ) -> Result<Self, IdentifyError<T>> {
        let n = trace.time.len();
        if n < 3 {
            return Err(IdentifyError::MalformedProfile {
                reason: "trace too short for a profile".into(),
            });
        }
        let dt = trace.time[1] - trace.time[0];
        let last_dt = trace.time[n - 1] - trace.time[n - 2];
        let end = if ((last_dt - dt) / dt).abs() > lit(1e-9) {
            n - 1
        } else {
            n
        };
        let profile = Self::new(trace.time[..end].to_vec(), trace.f_n[..end].to_vec())?;
        Ok(profile.with_velocity(trace.v_pre))
    }

    /// Builds a profile from a sample rate and force samples starting at 0 s.
    pub fn from_rate(rate_hz: T, force: Vec<T>) -> Result<Self, IdentifyError<T>> {
        let dt = T::one() / rate_hz;
        let times = (0..force.len()).map(|i| dt * lit(i as f64)).collect();
        Self::new(times, force)
    }

    pub fn with_velocity(mut self, v_pre: T) -> Self {
        self.v_pre = Some(v_pre);
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn times(&self) -> &[T] {
        &self.times
    }

    pub fn force(&self) -> &[T] {
        &self.force
    }

    pub fn rate_hz(&self) -> T {
        self.rate_hz
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn peak_force(&self) -> T {
        self.force.iter().copied().fold(T::zero(), T::max)
    }

    /// Duration from first to last sample.
    pub fn duration(&self) -> T {
        *self.times.last().unwrap() - self.times[0]
    }

    /// Trapezoidal integral of the force, N s.
    pub fn impulse(&self) -> T {
        let mut total = T::zero();
        let half = lit::<T>(0.5);
        for i in 1..self.len() {
            total += (self.force[i - 1] + self.force[i]) * half * (self.times[i] - self.times[i - 1]);
        }
        total
    }

    /// Spring-consistency check on this profile (see
    /// [`crate::contact::spring_deficiency_check`]).
    pub fn spring_deficiency(
        &self,
        e_r_bound: T,
    ) -> Result<crate::contact::DeficiencyReport<T>, ContactError> {
        crate::contact::spring_deficiency_check(
            &self.times,
            &self.force,
            e_r_bound,
            &Default::default(),
        )
    }
}

/// Cuts the first impact lobe out of a profile: the segment from the first
/// sample at or above `threshold` to the sample before the force next drops
/// below it. Later bounce lobes and trailing vibrations are discarded, and
/// the time base restarts at zero. Idempotent: trimming a trimmed profile
/// returns it unchanged.
pub fn trim_first_impact<T: Real>(
    profile: &ForceProfile<T>,
    threshold: T,
) -> Result<ForceProfile<T>, IdentifyError<T>> {
    let start = profile
        .force
        .iter()
        .position(|f| *f >= threshold)
        .ok_or(IdentifyError::NoImpactFound)?;
    let end = profile.force[start..]
        .iter()
        .position(|f| *f < threshold)
        .map(|offset| start + offset)
        .unwrap_or(profile.len());
    if end - start < 2 {
        return Err(IdentifyError::MalformedProfile {
            reason: "first lobe has fewer than two samples".into(),
        });
    }
    let t0 = profile.times[start];
    let times = profile.times[start..end].iter().map(|t| *t - t0).collect();
    let force = profile.force[start..end].to_vec();
    let mut out = ForceProfile::new(times, force)?;
    out.v_pre = profile.v_pre;
    out.label = profile.label.clone();
    Ok(out)
}

/// Recovered contact parameters with fit diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult<T: Real> {
    /// Spring constant, N/m.
    pub k: T,
    /// Dashpot coefficient (family units).
    pub c: T,
    /// RMS force misfit at the optimum, N.
    pub rms: T,
    /// Restitution implied by the fit: closed-form `(k/c)/|v_pre|` for the
    /// viscoelastic family, simulated detachment for Maxwell.
    pub cor: T,
    /// Total optimizer iterations (simplex plus refinement).
    pub iterations: usize,
    /// Last refinement step norm in log-parameter space.
    pub final_step_norm: T,
}

/// Knobs for the grey-box fits.
#[derive(Debug, Clone, Copy)]
pub struct FitOptions<T: Real> {
    /// Integrator settings used inside the objective.
    pub sim: SimSettings<T>,
    /// Simplex iterations per start.
    pub simplex_iters: usize,
    /// Gauss-Newton refinement iterations.
    pub refine_iters: usize,
    /// Convergence threshold on the refinement step norm (log-space).
    pub step_tol: T,
    /// Optional zero-phase moving-average width (samples) applied to the
    /// measured profile before fitting; `0` disables filtering.
    pub smoothing_window: usize,
}

impl<T: Real> Default for FitOptions<T> {
    fn default() -> Self {
        Self {
            sim: SimSettings::fitting(),
            simplex_iters: 140,
            refine_iters: 40,
            step_tol: lit(1e-9),
            smoothing_window: 0,
        }
    }
}

/// Fits the nonlinear viscoelastic law to a trimmed force lobe.
pub fn fit_viscoelastic<T: Real>(
    profile: &ForceProfile<T>,
    m_star: T,
    v_pre: T,
) -> Result<FitResult<T>, IdentifyError<T>> {
    fit_with_options(profile, m_star, v_pre, Family::Viscoelastic, &FitOptions::default())
}

/// Fits the Maxwell (series spring-dashpot) law to a trimmed force lobe.
pub fn fit_maxwell<T: Real>(
    profile: &ForceProfile<T>,
    m_star: T,
    v_pre: T,
) -> Result<FitResult<T>, IdentifyError<T>> {
    fit_with_options(profile, m_star, v_pre, Family::Maxwell, &FitOptions::default())
}

/// [`fit_viscoelastic`] with explicit options.
pub fn fit_viscoelastic_with<T: Real>(
    profile: &ForceProfile<T>,
    m_star: T,
    v_pre: T,
    opts: &FitOptions<T>,
) -> Result<FitResult<T>, IdentifyError<T>> {
    fit_with_options(profile, m_star, v_pre, Family::Viscoelastic, opts)
}

/// [`fit_maxwell`] with explicit options.
pub fn fit_maxwell_with<T: Real>(
    profile: &ForceProfile<T>,
    m_star: T,
    v_pre: T,
    opts: &FitOptions<T>,
) -> Result<FitResult<T>, IdentifyError<T>> {
    fit_with_options(profile, m_star, v_pre, Family::Maxwell, opts)
}

#[derive(Clone, Copy, PartialEq)]
enum Family {
    Viscoelastic,
    Maxwell,
}

fn fit_with_options<T: Real>(
    profile: &ForceProfile<T>,
    m_star: T,
    v_pre: T,
    family: Family,
    opts: &FitOptions<T>,
) -> Result<FitResult<T>, IdentifyError<T>> {
    let invalid = |reason: &str| IdentifyError::InvalidInput {
        reason: reason.to_owned(),
    };
    if !(m_star > T::zero()) {
        return Err(invalid("effective mass must be positive"));
    }
    if !(v_pre < T::zero()) {
        return Err(invalid("approach velocity must be negative"));
    }
    if profile.len() < 20 {
        return Err(IdentifyError::MalformedProfile {
            reason: format!("main lobe has {} < 20 samples", profile.len()),
        });
    }

    let force = if opts.smoothing_window > 1 {
        moving_average(profile.force(), opts.smoothing_window)
    } else {
        profile.force().to_vec()
    };
    let times = profile.times();

    // order-of-magnitude initialization from observable lobe features: peak
    // compression ~ |v| T / 4, and a dashpot targeting a restitution of 0.5
    let peak = force.iter().copied().fold(T::zero(), T::max);
    let duration = profile.duration();
    let speed = -v_pre;
    if peak <= lit(1e-9) {
        // nothing to fit against: report divergence with the bare heuristic
        let k = lit::<T>(1.0);
        let c = k / (lit::<T>(0.5) * speed);
        let rms = {
            let mut sq = T::zero();
            for f in &force {
                sq += *f * *f;
            }
            (sq / lit(force.len() as f64)).sqrt()
        };
        return Err(IdentifyError::FitDiverged {
            iterations: 0,
            best_rms: rms.to_subset().unwrap_or(f64::NAN),
            best: FitResult {
                k,
                c,
                rms,
                cor: T::zero(),
                iterations: 0,
                final_step_norm: T::zero(),
            },
        });
    }
    let quarter = lit::<T>(0.25);
    let k0 = (peak / (speed * duration * quarter)).max(lit(1e-3));
    let c0 = match family {
        Family::Viscoelastic => k0 / (lit::<T>(0.5) * speed),
        // Maxwell dashpot with the same damping time scale sqrt(m/k)
        Family::Maxwell => (k0 * m_star).sqrt(),
    };

    let build = |log_kc: &nalgebra::SVector<T, 2>| -> Result<ContactModel<T>, ContactError> {
        let k = log_kc[0].exp();
        let c = log_kc[1].exp();
        match family {
            Family::Viscoelastic => ContactModel::viscoelastic(k, c, m_star),
            Family::Maxwell => ContactModel::maxwell(k, c, m_star),
        }
    };
    let residuals = |log_kc: &nalgebra::SVector<T, 2>| -> nalgebra::DVector<T> {
        let huge = lit::<T>(1e6);
        let model = match build(log_kc) {
            Ok(m) => m,
            Err(_) => return nalgebra::DVector::from_element(force.len(), huge),
        };
        match force_at_times(&model, v_pre, times, &opts.sim) {
            Ok(sim) => nalgebra::DVector::from_iterator(
                force.len(),
                sim.iter().zip(&force).map(|(s, m)| *s - *m),
            ),
            Err(_) => nalgebra::DVector::from_element(force.len(), huge),
        }
    };
    let cost = |log_kc: &nalgebra::SVector<T, 2>| -> T {
        let r = residuals(log_kc);
        (r.norm_squared() / lit(r.len() as f64)).sqrt()
    };

    // multi-start over a log-spaced grid around the heuristic
    let spread = lit::<T>(6.0).ln();
    let x0 = nalgebra::SVector::<T, 2>::new(k0.ln(), c0.ln());
    let starts = [
        x0,
        x0 + nalgebra::SVector::<T, 2>::new(spread, T::zero()),
        x0 + nalgebra::SVector::<T, 2>::new(T::zero(), spread),
        x0 - nalgebra::SVector::<T, 2>::new(spread, spread),
    ];

    let nm_opts = NelderMeadOptions {
        max_iters: opts.simplex_iters,
        initial_scale: lit(0.7),
        ftol: lit(1e-14),
        xtol: lit(1e-12),
    };
    let mut best = None;
    let mut total_iters = 0usize;
    for start in starts {
        let out = nelder_mead(&cost, start, &nm_opts);
        total_iters += out.iterations;
        if best
            .as_ref()
            .map(|b: &optim::NelderMeadResult<T>| out.cost < b.cost)
            .unwrap_or(true)
        {
            best = Some(out);
        }
    }
    let best = best.expect("at least one start");

    let gn = gauss_newton(
        &residuals,
        best.x,
        &GaussNewtonOptions {
            max_iters: opts.refine_iters,
            step_tol: opts.step_tol,
            jacobian_step: lit(1e-6),
        },
    );
    total_iters += gn.iterations;

    let (x_final, rms) = if gn.cost <= best.cost {
        (gn.x, gn.cost)
    } else {
        (best.x, best.cost)
    };
    let k = x_final[0].exp();
    let c = x_final[1].exp();
    let cor = match family {
        Family::Viscoelastic => (k / c) / speed,
        Family::Maxwell => {
            let model = ContactModel::maxwell(k, c, m_star).map_err(IdentifyError::Contact)?;
            simulate_with(&model, v_pre, &opts.sim)
                .map(|t| t.events.cor)
                .unwrap_or(T::zero())
        }
    };
    let result = FitResult {
        k,
        c,
        rms,
        cor,
        iterations: total_iters,
        final_step_norm: gn.step_norm,
    };

    // declare divergence when the polish neither converged nor explains the
    // data to any useful degree
    let peak_scale = peak.max(lit(1e-9));
    if !gn.converged && rms > peak_scale * lit(0.5) {
        return Err(IdentifyError::FitDiverged {
            iterations: total_iters,
            best_rms: rms.to_subset().unwrap_or(f64::NAN),
            best: result,
        });
    }
    Ok(result)
}

fn moving_average<T: Real>(data: &[T], window: usize) -> Vec<T> {
    // zero-phase: symmetric window, clamped at the ends
    let half = window / 2;
    let n = data.len();
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half + 1).min(n);
            let mut acc = T::zero();
            for v in &data[lo..hi] {
                acc += *v;
            }
            acc / lit((hi - lo) as f64)
        })
        .collect()
}

/// Model-free restitution estimate from the integrated impulse:
/// `e_r = P / (m* |v_pre|) - 1`.
///
/// The raw value is returned even when it falls outside `[0, 1]`; reporting
/// layers may flag it, but the estimate itself is not clipped.
pub fn estimate_cor_from_profile<T: Real>(
    profile: &ForceProfile<T>,
    m_star: T,
    v_pre: T,
) -> Result<T, IdentifyError<T>> {
    if !(m_star > T::zero()) || !(v_pre < T::zero()) {
        return Err(IdentifyError::InvalidInput {
            reason: "need m_star > 0 and v_pre < 0".into(),
        });
    }
    let p = profile.impulse();
    if p <= T::zero() {
        return Err(IdentifyError::MalformedProfile {
            reason: "profile integrates to a nonpositive impulse".into(),
        });
    }
    Ok(p / (m_star * -v_pre) - T::one())
}
