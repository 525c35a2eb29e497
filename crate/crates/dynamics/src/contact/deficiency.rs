//! Pure-spring consistency check on a measured force lobe.
//!
//! A pure spring keeps the contact force in phase with the compression, so
//! the force profile is symmetric about its peak and the impulse delivered
//! after the peak is at most the restitution share `e_r <= 1` of the impulse
//! before it. A measured lobe whose post-peak area exceeds the pre-peak area
//! can only come from a spring with a restitution above 1 — i.e. from no
//! physical spring at all — which is the fingerprint of rate-dependent
//! (viscoelastic) compliance pushing the force peak ahead of peak
//! compression.

use super::ContactError;
use crate::scalar::{lit, Real};

/// Options for [`spring_deficiency_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeficiencyOptions<T: Real> {
    /// Relative slack on the area comparison, absorbing sampling error on
    /// clean spring profiles.
    pub ratio_margin: T,
    /// Minimum number of samples over the lobe.
    pub min_samples: usize,
}

impl<T: Real> Default for DeficiencyOptions<T> {
    fn default() -> Self {
        Self {
            ratio_margin: lit(0.01),
            min_samples: 20,
        }
    }
}

/// Outcome of the spring-consistency check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeficiencyReport<T: Real> {
    /// True when no pure spring with restitution `<= e_r_bound` can produce
    /// the lobe.
    pub spring_inconsistent: bool,
    /// Impulse before the (refined) force peak, N s.
    pub pre_peak_impulse: T,
    /// Impulse after the peak, N s.
    pub post_peak_impulse: T,
    /// `post / pre`: the restitution a spring would need.
    pub implied_restitution: T,
    /// Refined peak time, s.
    pub peak_time: T,
    /// Refined peak force, N.
    pub peak_force: T,
    /// Amplitude of the best-fitting half-sine over the lobe, N.
    pub spring_fit_amplitude: T,
    /// RMS misfit of that half-sine, N.
    pub spring_fit_rms: T,
}

/// Checks whether a single-lobe force profile is consistent with a pure
/// spring of restitution at most `e_r_bound` (use 1.0 for "any physical
/// spring"). Returns the report; `spring_inconsistent == true` flags the
/// profile as needing rate-dependent compliance.
pub fn spring_deficiency_check<T: Real>(
    times: &[T],
    forces: &[T],
    e_r_bound: T,
    opts: &DeficiencyOptions<T>,
) -> Result<DeficiencyReport<T>, ContactError> {
    let malformed = |reason: &str| ContactError::MalformedProfile {
        reason: reason.to_owned(),
    };
    if times.len() != forces.len() {
        return Err(malformed("times and forces differ in length"));
    }
    if times.len() < opts.min_samples {
        return Err(malformed("profile too short for a lobe analysis"));
    }
    let mut i_max = 0;
    for (i, f) in forces.iter().enumerate() {
        if !f.is_finite() || !times[i].is_finite() {
            return Err(malformed("profile contains non-finite samples"));
        }
        if *f > forces[i_max] {
            i_max = i;
        }
    }
    if forces[i_max] <= T::zero() {
        return Err(malformed("profile has no positive force peak"));
    }
    if i_max == 0 || i_max == forces.len() - 1 {
        return Err(malformed("force peak sits on the profile boundary"));
    }

    // refine the peak with a parabolic vertex through the discrete maximum
    let (tm, t_prev, t_next) = (times[i_max], times[i_max - 1], times[i_max + 1]);
    let (f0, fm1, fp1) = (forces[i_max], forces[i_max - 1], forces[i_max + 1]);
    let denom = fm1 - f0 - f0 + fp1;
    let (peak_time, peak_force) = if denom < T::zero() {
        let half = lit::<T>(0.5);
        let shift = (fm1 - fp1) / denom * half;
        let dt = (t_next - t_prev) * half;
        let t_star = (tm + shift * dt).clamp(t_prev, t_next);
        let f_star = f0 - denom * shift * shift * half;
        (t_star, f_star.max(f0))
    } else {
        (tm, f0)
    };

    // split the trapezoid integral at the refined peak time
    let mut pre = T::zero();
    let mut post = T::zero();
    let half = lit::<T>(0.5);
    for i in 1..times.len() {
        let (t0, t1) = (times[i - 1], times[i]);
        let (g0, g1) = (forces[i - 1], forces[i]);
        let area = (g0 + g1) * half * (t1 - t0);
        if t1 <= peak_time {
            pre += area;
        } else if t0 >= peak_time {
            post += area;
        } else {
            // split this interval at the peak by linear interpolation
            let w = (peak_time - t0) / (t1 - t0);
            let g_peak = g0 + (g1 - g0) * w;
            pre += (g0 + g_peak) * half * (peak_time - t0);
            post += (g_peak + g1) * half * (t1 - peak_time);
        }
    }
    if pre <= T::zero() {
        return Err(malformed("no impulse accumulated before the peak"));
    }
    let implied = post / pre;
    let inconsistent = implied > e_r_bound * (T::one() + opts.ratio_margin);

    // best half-sine over the lobe duration (amplitude by linear least squares)
    let t_start = times[0];
    let duration = *times.last().unwrap() - t_start;
    let mut num = T::zero();
    let mut den = T::zero();
    for (t, f) in times.iter().zip(forces) {
        let s = (T::PI() * (*t - t_start) / duration).sin();
        num += s * *f;
        den += s * s;
    }
    let amplitude = if den > T::zero() { num / den } else { T::zero() };
    let mut sq = T::zero();
    for (t, f) in times.iter().zip(forces) {
        let s = (T::PI() * (*t - t_start) / duration).sin();
        let r = *f - amplitude * s;
        sq += r * r;
    }
    let rms = (sq / lit(times.len() as f64)).sqrt();

    Ok(DeficiencyReport {
        spring_inconsistent: inconsistent,
        pre_peak_impulse: pre,
        post_peak_impulse: post,
        implied_restitution: implied,
        peak_time,
        peak_force,
        spring_fit_amplitude: amplitude,
        spring_fit_rms: rms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contact::{simulate, ContactModel};
    use approx::assert_relative_eq;

    fn check(times: &[f64], forces: &[f64]) -> DeficiencyReport<f64> {
        spring_deficiency_check(times, forces, 1.0, &DeficiencyOptions::default()).unwrap()
    }

    #[test]
    fn simulated_spring_profile_is_consistent() {
        let model = ContactModel::spring(2e4, 2.5).unwrap();
        let trace = simulate(&model, -0.15).unwrap();
        let report = check(&trace.time, &trace.f_n);
        assert!(!report.spring_inconsistent);
        assert_relative_eq!(report.implied_restitution, 1.0, epsilon = 5e-3);
        // the half-sine fit all but reproduces the profile
        assert!(report.spring_fit_rms < 1e-3 * report.peak_force);
    }

    #[test]
    fn simulated_viscoelastic_profile_is_flagged() {
        let model = ContactModel::viscoelastic(6e4, 1.5e6, 3.2).unwrap();
        let trace = simulate(&model, -0.16).unwrap();
        assert!(trace.events.x_end < 0.0);
        let report = check(&trace.time, &trace.f_n);
        assert!(report.spring_inconsistent);
        assert!(report.implied_restitution > 1.0);
    }

    #[test]
    fn half_sine_with_appended_tail_is_flagged() {
        // symmetric half-sine, then a decaying exponential tail
        let dt = 1.0 / 25_000.0;
        let t_half = 0.008;
        let mut times = Vec::new();
        let mut forces = Vec::new();
        let mut t = 0.0;
        while t <= t_half {
            times.push(t);
            forces.push(50.0 * (std::f64::consts::PI * t / t_half).sin().max(0.0));
            t += dt;
        }
        let t_tail_start = t;
        while t <= t_half + 0.006 {
            times.push(t);
            forces.push(12.0 * (-(t - t_tail_start) / 0.002).exp());
            t += dt;
        }
        let report = check(&times, &forces);
        assert!(report.spring_inconsistent);
    }

    #[test]
    fn malformed_profiles_are_rejected() {
        // too short
        assert!(matches!(
            spring_deficiency_check(&[0.0, 1.0], &[0.0, 1.0], 1.0, &DeficiencyOptions::default()),
            Err(ContactError::MalformedProfile { .. })
        ));
        // no positive peak
        let times: Vec<f64> = (0..30).map(|i| i as f64 * 1e-4).collect();
        let zeros = vec![0.0; 30];
        assert!(matches!(
            spring_deficiency_check(&times, &zeros, 1.0, &DeficiencyOptions::default()),
            Err(ContactError::MalformedProfile { .. })
        ));
        // peak on the boundary
        let ramp: Vec<f64> = (0..30).map(|i| i as f64).collect();
        assert!(matches!(
            spring_deficiency_check(&times, &ramp, 1.0, &DeficiencyOptions::default()),
            Err(ContactError::MalformedProfile { .. })
        ));
    }
}
