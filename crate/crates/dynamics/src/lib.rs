//! Impact models for fixed-base serial manipulators.
//!
//! The crate covers the pipeline from a kinematic chain description to
//! contact-impact predictions:
//!
//! * [`spatial`] — frame-tagged SE(3) transforms, twists, wrenches, and
//!   spatial inertias;
//! * [`chain`] — serial-chain kinematics, joint-space inertia, centroidal
//!   dynamics, and the exact/approximate contact-velocity decomposition;
//! * [`iim`] — the candidate 3-by-3 inverse inertia matrices at the contact
//!   point and the classical algebraic impulse;
//! * [`impulse`] — effective normal mass and impulse predictions for the
//!   reduced single-DOF normal impact;
//! * [`contact`] — spring / Maxwell / nonlinear-viscoelastic contact-force
//!   simulation with event detection and energy bookkeeping;
//! * [`identify`] — grey-box fitting of contact parameters and restitution
//!   estimation from measured force profiles;
//! * [`report`] — scenario files and the run summaries used by the CLI;
//! * [`synth`] — synthetic chains and helpers used by tests and examples.
//!
//! Everything numeric is generic over the scalar type via [`scalar::Real`];
//! the `*64` aliases below fix `f64`, which is what the CLI uses.

pub mod chain;
pub mod contact;
pub mod identify;
pub mod iim;
pub mod impulse;
pub mod report;
pub mod scalar;
pub mod spatial;
pub mod synth;

pub use scalar::Real;

// The linear-algebra types in the public API come from nalgebra; re-export
// it so downstream crates stay version-aligned.
pub use nalgebra;

/// `f64` spatial transform.
pub type SpatialTransform64 = spatial::SpatialTransform<f64>;
/// `f64` twist.
pub type Twist64 = spatial::Twist<f64>;
/// `f64` wrench.
pub type Wrench64 = spatial::Wrench<f64>;
/// `f64` spatial inertia.
pub type SpatialInertia64 = spatial::SpatialInertia<f64>;
/// `f64` chain model.
pub type ChainModel64 = chain::ChainModel<f64>;
/// `f64` chain state.
pub type ChainState64 = chain::ChainState<f64>;
/// `f64` inverse inertia matrix.
pub type InverseInertiaMatrix64 = iim::InverseInertiaMatrix<f64>;
/// `f64` contact scenario.
pub type ContactScenario64 = impulse::ContactScenario<f64>;
/// `f64` contact model.
pub type ContactModel64 = contact::ContactModel<f64>;
/// `f64` impact trace.
pub type ImpactTrace64 = contact::ImpactTrace<f64>;
/// `f64` force profile.
pub type ForceProfile64 = identify::ForceProfile<f64>;
/// `f64` fit result.
pub type FitResult64 = identify::FitResult<f64>;
