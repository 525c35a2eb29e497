//! Embedded Dormand-Prince 5(4) step with adaptive error control.
//!
//! The impact simulations are small (five states) and mildly stiff at worst,
//! so an explicit adaptive pair with per-step error control is the right
//! tool; event localization lives in the driver, which re-integrates from the
//! last accepted state instead of relying on a dense-output polynomial.

use nalgebra::SVector;

use crate::scalar::{lit, Real};

pub(crate) const STATE_DIM: usize = 5;
pub(crate) type State<T> = SVector<T, STATE_DIM>;

// Butcher tableau of the Dormand-Prince 5(4) pair.
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];

// 5th-order solution weights (row 7 of A, FSAL) and the embedded 4th-order weights.
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

pub(crate) struct StepOutcome<T: Real> {
    pub y_new: State<T>,
    /// Scaled error norm; accept the step when `<= 1`.
    pub error: T,
    /// Derivative at the step end (FSAL: reusable as the next step's `k1`).
    pub deriv_new: State<T>,
}

/// One embedded step from `(t, y)` with derivative `deriv` already evaluated
/// at `y`. `rhs` does not depend on time (the contact laws are autonomous),
/// so no time argument is threaded through.
pub(crate) fn dp45_step<T: Real>(
    rhs: &impl Fn(&State<T>) -> State<T>,
    y: &State<T>,
    deriv: &State<T>,
    h: T,
    rtol: T,
    atol: T,
) -> StepOutcome<T> {
    let mut k: [State<T>; 7] = [State::zeros(); 7];
    k[0] = *deriv;
    for stage in 0..6 {
        let mut acc = State::zeros();
        for (j, a) in A[stage].iter().enumerate().take(stage + 1) {
            if *a != 0.0 {
                acc += k[j] * lit::<T>(*a);
            }
        }
        k[stage + 1] = rhs(&(y + acc * h));
    }
    // k[6] is the derivative at the 5th-order solution (FSAL property)
    let mut y5 = *y;
    let mut y4 = *y;
    for (i, ki) in k.iter().enumerate() {
        if B5[i] != 0.0 {
            y5 += ki * (h * lit::<T>(B5[i]));
        }
        if B4[i] != 0.0 {
            y4 += ki * (h * lit::<T>(B4[i]));
        }
    }
    let mut err_sq = T::zero();
    for i in 0..STATE_DIM {
        let scale = atol + rtol * y[i].abs().max(y5[i].abs());
        let e = (y5[i] - y4[i]) / scale;
        err_sq += e * e;
    }
    let error = (err_sq / lit(STATE_DIM as f64)).sqrt();
    StepOutcome {
        y_new: y5,
        error,
        deriv_new: k[6],
    }
}

/// Step-size update from the scaled error (PI-free basic controller with
/// safety factor and growth clamps).
pub(crate) fn next_step_size<T: Real>(h: T, error: T) -> T {
    let safety = lit::<T>(0.9);
    let exp = -T::one() / lit(5.0);
    let factor = if error <= T::zero() {
        lit(5.0)
    } else {
        (safety * error.powf(exp)).clamp(lit(0.2), lit(5.0))
    };
    h * factor
}

/// Cubic Hermite interpolation of a state on a step `[t0, t1]` with endpoint
/// derivatives.
#[allow(clippy::too_many_arguments)]
pub(crate) fn hermite<T: Real>(
    t0: T,
    y0: &State<T>,
    d0: &State<T>,
    t1: T,
    y1: &State<T>,
    d1: &State<T>,
    t: T,
) -> State<T> {
    let h = t1 - t0;
    let s = (t - t0) / h;
    let s2 = s * s;
    let s3 = s2 * s;
    let two = lit::<T>(2.0);
    let three = lit::<T>(3.0);
    y0 * (two * s3 - three * s2 + T::one())
        + d0 * ((s3 - two * s2 + s) * h)
        + y1 * (-two * s3 + three * s2)
        + d1 * ((s3 - s2) * h)
}
