//! Small derivative-free and least-squares optimizers for the grey-box fits.
//!
//! Both work on a fixed-size parameter vector (the fits use two log-space
//! parameters). Nelder-Mead handles the global sweep from rough starts; the
//! damped Gauss-Newton polish squeezes out the last digits with numerical
//! Jacobians.

use nalgebra::{DVector, SMatrix, SVector};

use crate::scalar::{lit, Real};

pub(crate) struct NelderMeadOptions<T: Real> {
    pub max_iters: usize,
    pub initial_scale: T,
    pub ftol: T,
    pub xtol: T,
}

pub(crate) struct NelderMeadResult<T: Real> {
    pub x: SVector<T, 2>,
    pub cost: T,
    pub iterations: usize,
}

pub(crate) fn nelder_mead<T: Real>(
    f: &impl Fn(&SVector<T, 2>) -> T,
    x0: SVector<T, 2>,
    opts: &NelderMeadOptions<T>,
) -> NelderMeadResult<T> {
    const DIM: usize = 2;
    let mut simplex: Vec<(SVector<T, 2>, T)> = Vec::with_capacity(DIM + 1);
    simplex.push((x0, f(&x0)));
    for i in 0..DIM {
        let mut x = x0;
        x[i] += opts.initial_scale;
        simplex.push((x, f(&x)));
    }

    let mut iterations = 0;
    for _ in 0..opts.max_iters {
        iterations += 1;
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
        let (best, worst) = (simplex[0], simplex[DIM]);
        let spread = (worst.1 - best.1).abs();
        let d1: T = (simplex[1].0 - best.0).norm();
        let d2: T = (simplex[2].0 - best.0).norm();
        let size = if d1 > d2 { d1 } else { d2 };
        if spread < opts.ftol && size < opts.xtol {
            break;
        }

        let centroid = (simplex[0].0 + simplex[1].0) / lit::<T>(DIM as f64);
        let reflected = centroid + (centroid - worst.0);
        let f_r = f(&reflected);
        if f_r < best.1 {
            let expanded = centroid + (centroid - worst.0) * lit::<T>(2.0);
            let f_e = f(&expanded);
            simplex[DIM] = if f_e < f_r {
                (expanded, f_e)
            } else {
                (reflected, f_r)
            };
        } else if f_r < simplex[DIM - 1].1 {
            simplex[DIM] = (reflected, f_r);
        } else {
            let contracted = centroid + (worst.0 - centroid) * lit::<T>(0.5);
            let f_c = f(&contracted);
            if f_c < worst.1 {
                simplex[DIM] = (contracted, f_c);
            } else {
                // shrink toward the best vertex
                for i in 1..=DIM {
                    let x = best.0 + (simplex[i].0 - best.0) * lit::<T>(0.5);
                    simplex[i] = (x, f(&x));
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
    NelderMeadResult {
        x: simplex[0].0,
        cost: simplex[0].1,
        iterations,
    }
}

pub(crate) struct GaussNewtonOptions<T: Real> {
    pub max_iters: usize,
    pub step_tol: T,
    /// Forward-difference step for the numerical Jacobian.
    pub jacobian_step: T,
}

pub(crate) struct GaussNewtonResult<T: Real> {
    pub x: SVector<T, 2>,
    /// RMS of the residual vector at `x`.
    pub cost: T,
    pub iterations: usize,
    pub step_norm: T,
    pub converged: bool,
}

fn rms<T: Real>(r: &DVector<T>) -> T {
    (r.norm_squared() / lit(r.len() as f64)).sqrt()
}

/// Damped Gauss-Newton (Levenberg-style fallback) on a residual vector.
pub(crate) fn gauss_newton<T: Real>(
    residuals: &impl Fn(&SVector<T, 2>) -> DVector<T>,
    x0: SVector<T, 2>,
    opts: &GaussNewtonOptions<T>,
) -> GaussNewtonResult<T> {
    let mut x = x0;
    let mut r = residuals(&x);
    let mut cost = rms(&r);
    let mut lambda = lit::<T>(1e-8);
    let mut step_norm = T::zero();
    let mut converged = false;
    let mut iterations = 0;

    for _ in 0..opts.max_iters {
        iterations += 1;
        let n = r.len();
        // numerical Jacobian, one forward difference per parameter
        let mut jac = nalgebra::OMatrix::<T, nalgebra::Dyn, nalgebra::U2>::zeros(n);
        for p in 0..2 {
            let mut xp = x;
            xp[p] += opts.jacobian_step;
            let rp = residuals(&xp);
            for i in 0..n {
                jac[(i, p)] = (rp[i] - r[i]) / opts.jacobian_step;
            }
        }
        let jtj: SMatrix<T, 2, 2> = jac.transpose() * &jac;
        let jtr: SVector<T, 2> = jac.transpose() * &r;

        let mut improved = false;
        for _ in 0..12 {
            let mut damped = jtj;
            for d in 0..2 {
                damped[(d, d)] += lambda * (T::one() + jtj[(d, d)]);
            }
            let Some(step) = damped.lu().solve(&(-jtr)) else {
                lambda *= lit(10.0);
                continue;
            };
            let x_new = x + step;
            let r_new = residuals(&x_new);
            let cost_new = rms(&r_new);
            if cost_new < cost {
                step_norm = step.norm();
                x = x_new;
                r = r_new;
                cost = cost_new;
                lambda = (lambda * lit(0.25)).max(lit(1e-14));
                improved = true;
                break;
            }
            lambda *= lit(10.0);
        }
        if !improved {
            // no descent direction left at any damping: treat as converged
            // when the last accepted step was already small
            converged = step_norm < opts.step_tol || iterations > 1;
            break;
        }
        if step_norm < opts.step_tol {
            converged = true;
            break;
        }
    }
    GaussNewtonResult {
        x,
        cost,
        iterations,
        step_norm,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn nelder_mead_finds_a_quadratic_minimum() {
        let f = |x: &SVector<f64, 2>| (x[0] - 1.5).powi(2) + 3.0 * (x[1] + 0.5).powi(2);
        let out = nelder_mead(
            &f,
            SVector::<f64, 2>::new(4.0, 4.0),
            &NelderMeadOptions {
                max_iters: 300,
                initial_scale: 0.8,
                ftol: 1e-14,
                xtol: 1e-10,
            },
        );
        assert_relative_eq!(out.x[0], 1.5, epsilon = 1e-4);
        assert_relative_eq!(out.x[1], -0.5, epsilon = 1e-4);
    }

    #[test]
    fn gauss_newton_polishes_to_machine_precision() {
        // residuals of a separable least-squares toy: r_i = exp(a t_i) + b - y_i
        let ts: Vec<f64> = (0..40).map(|i| i as f64 * 0.05).collect();
        let (a_true, b_true) = (-1.3, 0.7);
        let ys: Vec<f64> = ts.iter().map(|t| (a_true * t).exp() + b_true).collect();
        let residuals = |x: &SVector<f64, 2>| {
            DVector::from_iterator(
                ts.len(),
                ts.iter()
                    .zip(&ys)
                    .map(|(t, y)| (x[0] * t).exp() + x[1] - y),
            )
        };
        let out = gauss_newton(
            &residuals,
            SVector::<f64, 2>::new(-0.8, 0.0),
            &GaussNewtonOptions {
                max_iters: 60,
                step_tol: 1e-12,
                jacobian_step: 1e-7,
            },
        );
        assert!(out.converged);
        assert_relative_eq!(out.x[0], a_true, epsilon = 1e-6);
        assert_relative_eq!(out.x[1], b_true, epsilon = 1e-6);
    }
}
