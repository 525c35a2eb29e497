//! Normal-impact simulation under three contact-force laws.
//!
//! The impact is reduced to a single normal degree of freedom with effective
//! mass `m*`: `m* x_dd = f_n(x, x_d)` starting from `x = 0`, `x_d = v_pre < 0`
//! (the local axis is chosen so compression keeps `x < 0`). Three force
//! families are available:
//!
//! * **spring** — `f = -k x`; lossless, force in phase with compression;
//! * **maxwell** — series spring/dashpot with force state
//!   `f_d = -k x_d - (k/c) f`; linear, so its restitution is independent of
//!   the approach speed;
//! * **viscoelastic** — parallel spring with compression-scaled dashpot,
//!   `f = c x x_d - k x`; dissipative, force peaks ahead of peak
//!   compression, and detachment happens at `x_d = k/c` with the compression
//!   generally not restored to zero.
//!
//! [`simulate`] integrates until the end of restitution, recording the
//! compression-end event (`x_d = 0` rising) and the restitution-end event
//! (first `f = 0` falling crossing after compression ends; the trivial root
//! at `t = 0` is skipped by arming the event only after compression ends).
//! Traces are resampled onto a fixed output grid (default 25 kHz) by dense
//! interpolation, with running impulse and the kinetic / potential /
//! dissipated energy split carried as integrator state.
//!
//! Units: `k` is N/m for every family; `c` is N s/m for spring (unused) and
//! maxwell, and N s/m^2 for the viscoelastic family (its dashpot force is
//! `c x x_d`).

use serde::{Deserialize, Serialize};

use crate::scalar::{lit, Real};

mod deficiency;
pub mod io;
mod ode;
mod sim;

pub use deficiency::{spring_deficiency_check, DeficiencyOptions, DeficiencyReport};
pub use io::TraceIoError;
pub use sim::{force_at_times, simulate, simulate_with};

/// Errors from contact-model construction and simulation.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ContactError {
    #[error("invalid contact model: {reason}")]
    InvalidModel { reason: String },
    #[error("operation requires the {expected} family, got {found}")]
    WrongFamily { expected: String, found: String },
    #[error("pre-impact velocity must be negative (approaching), got {value}")]
    NonApproachingVelocity { value: f64 },
    #[error(
        "no detachment within the integration horizon of {horizon} s \
         ({half_periods} undamped half-periods)"
    )]
    NoDetachment { horizon: f64, half_periods: f64 },
    #[error(
        "approach speed {speed} m/s is below the viscoelastic detachment speed k/c = {exit} m/s; \
         the closed-form restitution would exceed 1"
    )]
    SubcriticalVelocity { speed: f64, exit: f64 },
    #[error("malformed force profile: {reason}")]
    MalformedProfile { reason: String },
}

/// Contact-force law family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelFamily {
    Spring,
    Maxwell,
    Viscoelastic,
}

impl std::fmt::Display for ModelFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ModelFamily::Spring => "spring",
            ModelFamily::Maxwell => "maxwell",
            ModelFamily::Viscoelastic => "viscoelastic",
        })
    }
}

/// A contact-force model bound to an effective mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContactModel<T: Real> {
    pub family: ModelFamily,
    /// Spring constant, N/m.
    pub k: T,
    /// Dashpot coefficient; N s/m (maxwell) or N s/m^2 (viscoelastic).
    /// Stored as zero for the pure spring, which has no dashpot.
    pub c: T,
    /// Effective mass, kg.
    pub m_star: T,
}

impl<T: Real> ContactModel<T> {
    fn validated(self) -> Result<Self, ContactError> {
        let invalid = |reason: &str| ContactError::InvalidModel {
            reason: reason.to_owned(),
        };
        if !(self.k > T::zero()) {
            return Err(invalid("spring constant k must be positive"));
        }
        if !(self.m_star > T::zero()) {
            return Err(invalid("effective mass must be positive"));
        }
        match self.family {
            ModelFamily::Spring => {
                if self.c < T::zero() {
                    return Err(invalid("dashpot coefficient must be nonnegative"));
                }
            }
            _ => {
                if !(self.c > T::zero()) {
                    return Err(invalid("dashpot coefficient c must be positive"));
                }
            }
        }
        Ok(self)
    }

    pub fn spring(k: T, m_star: T) -> Result<Self, ContactError> {
        Self {
            family: ModelFamily::Spring,
            k,
            c: T::zero(),
            m_star,
        }
        .validated()
    }

    pub fn maxwell(k: T, c: T, m_star: T) -> Result<Self, ContactError> {
        Self {
            family: ModelFamily::Maxwell,
            k,
            c,
            m_star,
        }
        .validated()
    }

    pub fn viscoelastic(k: T, c: T, m_star: T) -> Result<Self, ContactError> {
        Self {
            family: ModelFamily::Viscoelastic,
            k,
            c,
            m_star,
        }
        .validated()
    }

    pub fn with_family(
        family: ModelFamily,
        k: T,
        c: T,
        m_star: T,
    ) -> Result<Self, ContactError> {
        Self {
            family,
            k,
            c,
            m_star,
        }
        .validated()
    }

    /// Undamped half-period `pi sqrt(m*/k)`, the natural time scale of the
    /// impact and the unit of the integration horizon.
    pub fn half_period(&self) -> T {
        T::PI() * (self.m_star / self.k).sqrt()
    }
}

/// Contact force of the nonlinear viscoelastic law, `f = c x x_d - k x`.
pub fn force_viscoelastic<T: Real>(
    model: &ContactModel<T>,
    x: T,
    xdot: T,
) -> Result<T, ContactError> {
    if model.family != ModelFamily::Viscoelastic {
        return Err(ContactError::WrongFamily {
            expected: "viscoelastic".into(),
            found: model.family.to_string(),
        });
    }
    Ok(model.c * x * xdot - model.k * x)
}

/// Force rate of the Maxwell law at state `(x, x_d, f)`:
/// `f_d = -k x_d - (k/c) f`.
pub fn force_maxwell_step<T: Real>(
    model: &ContactModel<T>,
    _x: T,
    xdot: T,
    f: T,
) -> Result<T, ContactError> {
    if model.family != ModelFamily::Maxwell {
        return Err(ContactError::WrongFamily {
            expected: "maxwell".into(),
            found: model.family.to_string(),
        });
    }
    Ok(-model.k * xdot - (model.k / model.c) * f)
}

/// Coefficient of restitution predicted by the model for an approach
/// velocity `v_pre < 0`.
///
/// Spring: exactly 1. Viscoelastic: closed form `(k/c) / |v_pre|`, an error
/// when `|v_pre| < k/c` (the law would need a restitution above 1 there).
/// Maxwell: extracted from a simulation at default settings.
pub fn predicted_cor<T: Real>(model: &ContactModel<T>, v_pre: T) -> Result<T, ContactError> {
    predicted_cor_with(model, v_pre, &SimSettings::default_settings())
}

/// [`predicted_cor`] with explicit integrator settings (only the Maxwell
/// family simulates).
pub fn predicted_cor_with<T: Real>(
    model: &ContactModel<T>,
    v_pre: T,
    settings: &SimSettings<T>,
) -> Result<T, ContactError> {
    if !(v_pre < T::zero()) {
        return Err(ContactError::NonApproachingVelocity {
            value: v_pre.to_subset().unwrap_or(f64::NAN),
        });
    }
    match model.family {
        ModelFamily::Spring => Ok(T::one()),
        ModelFamily::Viscoelastic => {
            let exit = model.k / model.c;
            if -v_pre < exit {
                return Err(ContactError::SubcriticalVelocity {
                    speed: (-v_pre).to_subset().unwrap_or(f64::NAN),
                    exit: exit.to_subset().unwrap_or(f64::NAN),
                });
            }
            Ok(-(exit / v_pre))
        }
        ModelFamily::Maxwell => {
            let trace = simulate_with(model, v_pre, settings)?;
            Ok(trace.events.cor)
        }
    }
}

/// Integrator and output settings for [`simulate_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimSettings<T: Real> {
    /// Relative tolerance of the embedded step error.
    pub rtol: T,
    /// Absolute tolerance of the embedded step error.
    pub atol: T,
    /// Uniform output sampling rate, Hz.
    pub output_rate: T,
    /// Integration horizon in units of the undamped half-period.
    pub horizon_half_periods: T,
    /// Event times are bisected down to this width, seconds.
    pub event_time_tol: T,
    /// Hard cap on accepted steps.
    pub max_steps: usize,
}

impl<T: Real> SimSettings<T> {
    pub fn default_settings() -> Self {
        Self {
            rtol: lit(1e-10),
            atol: lit(1e-13),
            output_rate: lit(25_000.0),
            horizon_half_periods: lit(10.0),
            event_time_tol: lit(1e-9),
            max_steps: 200_000,
        }
    }

    /// Looser tolerances and a tight step budget for inner fitting loops,
    /// where implausible trial parameters must fail fast rather than grind.
    pub fn fitting() -> Self {
        Self {
            rtol: lit(1e-8),
            atol: lit(1e-11),
            max_steps: 10_000,
            ..Self::default_settings()
        }
    }
}

impl<T: Real> Default for SimSettings<T> {
    fn default() -> Self {
        Self::default_settings()
    }
}

/// Impact events and scalar outcomes of one simulated impact.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImpactEvents<T: Real> {
    /// Time of the `x_d = 0` crossing (end of compression), s.
    pub t_compression_end: T,
    /// Time of the first `f = 0` crossing after compression ends, s.
    pub t_restitution_end: T,
    /// Compression at detachment (nonpositive; zero only for the spring), m.
    pub x_end: T,
    /// Separation velocity at detachment, m/s.
    pub v_exit: T,
    /// Kinematic restitution `-v_exit / v_pre`.
    pub cor: T,
    /// Impulse accumulated at the end of compression, N s.
    pub p_nc: T,
    /// Impulse accumulated at detachment, N s.
    pub p_total: T,
    /// Largest contact force over the impact, N.
    pub peak_force: T,
    /// Time of the force peak, s.
    pub t_peak_force: T,
    /// Largest compression magnitude `|x|`, m.
    pub peak_compression: T,
}

/// Time-sampled record of one simulated impact.
///
/// Invariants maintained by the simulator: `x <= 0` throughout, `f_n >= 0`
/// up to the detachment event (within event tolerance), and for the
/// viscoelastic family `xdot` never decreases.
#[derive(Debug, Clone, PartialEq)]
pub struct ImpactTrace<T: Real> {
    pub time: Vec<T>,
    pub x: Vec<T>,
    pub xdot: Vec<T>,
    pub f_n: Vec<T>,
    /// Running impulse, the time integral of `f_n`.
    pub p_n: Vec<T>,
    pub e_k: Vec<T>,
    pub e_p: Vec<T>,
    pub e_d: Vec<T>,
    pub events: ImpactEvents<T>,
    pub model: ContactModel<T>,
    pub v_pre: T,
}

impl<T: Real> ImpactTrace<T> {
    pub fn len(&self) -> usize {
        self.time.len()
    }

    pub fn is_empty(&self) -> bool {
        self.time.is_empty()
    }

    /// Initial kinetic energy `0.5 m* v_pre^2`.
    pub fn initial_energy(&self) -> T {
        lit::<T>(0.5) * self.model.m_star * self.v_pre * self.v_pre
    }
}

/// Per-sample energy split recomputed from the state columns, with the
/// balance residual against the initial kinetic energy.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyTrace<T: Real> {
    pub e_k: Vec<T>,
    pub e_p: Vec<T>,
    pub e_d: Vec<T>,
    /// `E_k + E_p + E_d - E_0` per sample.
    pub residual: Vec<T>,
    pub max_abs_residual: T,
    pub initial_energy: T,
}

/// Recomputes kinetic and potential energy from the sampled state (the
/// dissipated energy is the integrator's running integral) and reports the
/// per-sample balance residual.
pub fn energy_trace<T: Real>(trace: &ImpactTrace<T>) -> EnergyTrace<T> {
    let m = &trace.model;
    let half = lit::<T>(0.5);
    let e0 = trace.initial_energy();
    let mut e_k = Vec::with_capacity(trace.len());
    let mut e_p = Vec::with_capacity(trace.len());
    let mut residual = Vec::with_capacity(trace.len());
    let mut max_abs = T::zero();
    for i in 0..trace.len() {
        let ek = half * m.m_star * trace.xdot[i] * trace.xdot[i];
        let ep = match m.family {
            // the Maxwell spring stores f^2 / (2k)
            ModelFamily::Maxwell => half * trace.f_n[i] * trace.f_n[i] / m.k,
            _ => half * m.k * trace.x[i] * trace.x[i],
        };
        let r = ek + ep + trace.e_d[i] - e0;
        max_abs = max_abs.max(r.abs());
        e_k.push(ek);
        e_p.push(ep);
        residual.push(r);
    }
    EnergyTrace {
        e_k,
        e_p,
        e_d: trace.e_d.clone(),
        residual,
        max_abs_residual: max_abs,
        initial_energy: e0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn viscoelastic_force_formula() {
        let m = ContactModel::viscoelastic(1e4, 2e5, 3.0).unwrap();
        // zero compression -> zero force regardless of rate
        assert_relative_eq!(force_viscoelastic(&m, 0.0, -0.3).unwrap(), 0.0);
        // pure spring term at zero rate
        assert_relative_eq!(force_viscoelastic(&m, -0.001, 0.0).unwrap(), 10.0);
        // detachment locus: c xdot = k
        let xdot = m.k / m.c;
        assert_relative_eq!(force_viscoelastic(&m, -0.001, xdot).unwrap(), 0.0);
    }

    #[test]
    fn maxwell_force_rate() {
        let m = ContactModel::maxwell(5e4, 800.0, 3.8).unwrap();
        // first touch: force builds against an approaching contact
        let fdot = force_maxwell_step(&m, 0.0, -0.1, 0.0).unwrap();
        assert_relative_eq!(fdot, 5e3, epsilon = 1e-9);
        assert!(fdot > 0.0);
        // stationary-force locus: f = -c xdot
        let xdot = 0.02;
        let f = -m.c * xdot;
        assert_relative_eq!(force_maxwell_step(&m, -0.001, xdot, f).unwrap(), 0.0);
    }

    #[test]
    fn family_checks_are_enforced() {
        let s = ContactModel::spring(1e4, 1.0).unwrap();
        assert!(force_viscoelastic(&s, -0.01, 0.0).is_err());
        assert!(force_maxwell_step(&s, -0.01, 0.0, 1.0).is_err());
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(ContactModel::<f64>::spring(0.0, 1.0).is_err());
        assert!(ContactModel::<f64>::spring(1e4, -1.0).is_err());
        assert!(ContactModel::<f64>::viscoelastic(1e4, 0.0, 1.0).is_err());
        assert!(ContactModel::<f64>::maxwell(1e4, -5.0, 1.0).is_err());
    }

    #[test]
    fn predicted_cor_closed_forms() {
        let s = ContactModel::spring(2e4, 2.0).unwrap();
        assert_relative_eq!(predicted_cor(&s, -0.3).unwrap(), 1.0);

        // k/c = 0.05: halved at v = -0.1, quartered at -0.2
        let v = ContactModel::viscoelastic(1e4, 2e5, 2.0).unwrap();
        assert_relative_eq!(predicted_cor(&v, -0.1).unwrap(), 0.5, epsilon = 1e-14);
        assert_relative_eq!(predicted_cor(&v, -0.2).unwrap(), 0.25, epsilon = 1e-14);
        // subcritical approach is rejected rather than clamped
        assert!(matches!(
            predicted_cor(&v, -0.04),
            Err(ContactError::SubcriticalVelocity { .. })
        ));
        // the boundary |v| = k/c gives exactly 1
        assert_relative_eq!(predicted_cor(&v, -0.05).unwrap(), 1.0, epsilon = 1e-14);
    }
}
