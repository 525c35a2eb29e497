//! Adaptive integration of the reduced normal impact with event detection.
//!
//! Internal state layout (shared by all families): `[x, xdot, f, p, e_d]`,
//! where `f` is live state for the Maxwell family and identically zero
//! otherwise, `p` is the running impulse, and `e_d` the dissipated energy.
//!
//! Events are detected by sign change over accepted steps and localized by
//! bisection; each bisection probe re-integrates a single high-order step
//! from the segment start, so event states inherit the integration accuracy
//! instead of an interpolation error.

use super::ode::{dp45_step, hermite, next_step_size, State};
use super::{ContactError, ContactModel, ImpactEvents, ImpactTrace, ModelFamily, SimSettings};
use crate::scalar::{lit, Real};

/// One accepted integration interval with endpoint states and derivatives.
#[derive(Debug, Clone, Copy)]
struct Segment<T: Real> {
    t0: T,
    y0: State<T>,
    d0: State<T>,
    t1: T,
    y1: State<T>,
    d1: State<T>,
}

impl<T: Real> Segment<T> {
    fn state_at(&self, t: T) -> State<T> {
        hermite(self.t0, &self.y0, &self.d0, self.t1, &self.y1, &self.d1, t)
    }
}

fn rhs<T: Real>(model: &ContactModel<T>, y: &State<T>) -> State<T> {
    let x = y[0];
    let v = y[1];
    let (f, fdot, ed_rate) = match model.family {
        ModelFamily::Spring => (-model.k * x, T::zero(), T::zero()),
        ModelFamily::Viscoelastic => {
            let f = model.c * x * v - model.k * x;
            (f, T::zero(), -model.c * x * v * v)
        }
        ModelFamily::Maxwell => {
            let f = y[2];
            (f, -model.k * v - (model.k / model.c) * f, f * f / model.c)
        }
    };
    State::from([v, f / model.m_star, fdot, f, ed_rate])
}

fn force<T: Real>(model: &ContactModel<T>, y: &State<T>) -> T {
    match model.family {
        ModelFamily::Spring => -model.k * y[0],
        ModelFamily::Viscoelastic => model.c * y[0] * y[1] - model.k * y[0],
        ModelFamily::Maxwell => y[2],
    }
}

struct RawSim<T: Real> {
    segments: Vec<Segment<T>>,
    t_compression_end: T,
    y_compression_end: State<T>,
    t_restitution_end: T,
    y_restitution_end: State<T>,
}

#[derive(Clone, Copy, PartialEq)]
enum Phase {
    Compression,
    Restitution,
}

/// Integrates from `(t0, y0)` to exactly `t_end` under full error control,
/// so event states carry the same accuracy as the accepted trajectory.
fn integrate_to<T: Real>(
    model: &ContactModel<T>,
    t0: T,
    y0: &State<T>,
    t_end: T,
    rtol: T,
    atol: T,
) -> State<T> {
    let f = |y: &State<T>| rhs(model, y);
    let mut t = t0;
    let mut y = *y0;
    let mut d = rhs(model, &y);
    let mut h = t_end - t0;
    let mut guard = 0usize;
    while t < t_end && guard < 10_000 {
        guard += 1;
        let step = h.min(t_end - t);
        let out = dp45_step(&f, &y, &d, step, rtol, atol);
        if out.error > T::one() && step > (t_end - t0) * lit(1e-12) {
            h = next_step_size(step, out.error);
            continue;
        }
        t += step;
        y = out.y_new;
        d = out.deriv_new;
        h = next_step_size(step, out.error);
    }
    y
}

/// Bisects an event time inside `seg`, where `g` changes sign between the
/// segment endpoints. Returns the localized time and state.
fn localize_event<T: Real>(
    model: &ContactModel<T>,
    seg: &Segment<T>,
    g: impl Fn(&ContactModel<T>, &State<T>) -> T,
    settings: &SimSettings<T>,
) -> (T, State<T>) {
    let f = |y: &State<T>| rhs(model, y);
    // single uncontrolled probe steps are plenty for sign queries
    let probe = |t: T| {
        if t <= seg.t0 {
            return seg.y0;
        }
        dp45_step(&f, &seg.y0, &seg.d0, t - seg.t0, lit(1e-12), lit(1e-14)).y_new
    };
    let left_sign = g(model, &seg.y0) > T::zero();
    let mut lo = seg.t0;
    let mut hi = seg.t1;
    while hi - lo > settings.event_time_tol {
        let mid = (lo + hi) * lit(0.5);
        if (g(model, &probe(mid)) > T::zero()) == left_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t_event = (lo + hi) * lit(0.5);
    let y_event = integrate_to(
        model,
        seg.t0,
        &seg.y0,
        t_event,
        settings.rtol,
        settings.atol,
    );
    (t_event, y_event)
}

fn run<T: Real>(
    model: &ContactModel<T>,
    v_pre: T,
    settings: &SimSettings<T>,
) -> Result<RawSim<T>, ContactError> {
    if !(v_pre < T::zero()) {
        return Err(ContactError::NonApproachingVelocity {
            value: v_pre.to_subset().unwrap_or(f64::NAN),
        });
    }
    let half_period = model.half_period();
    let horizon = settings.horizon_half_periods * half_period;
    let no_detachment = || ContactError::NoDetachment {
        horizon: horizon.to_subset().unwrap_or(f64::NAN),
        half_periods: settings
            .horizon_half_periods
            .to_subset()
            .unwrap_or(f64::NAN),
    };

    let f = |y: &State<T>| rhs(model, y);
    let mut t = T::zero();
    let mut y = State::from([T::zero(), v_pre, T::zero(), T::zero(), T::zero()]);
    let mut d = rhs(model, &y);
    let mut h = half_period * lit(1e-3);
    let mut phase = Phase::Compression;
    let mut segments = Vec::new();
    let mut compression: Option<(T, State<T>)> = None;

    for _ in 0..settings.max_steps {
        if t > horizon {
            return Err(no_detachment());
        }
        h = h.min(half_period).max(lit::<T>(1e-6) * half_period);
        let out = dp45_step(&f, &y, &d, h, settings.rtol, settings.atol);
        if out.error > T::one() {
            h = next_step_size(h, out.error);
            continue;
        }
        let seg = Segment {
            t0: t,
            y0: y,
            d0: d,
            t1: t + h,
            y1: out.y_new,
            d1: out.deriv_new,
        };

        match phase {
            Phase::Compression if seg.y1[1] >= T::zero() => {
                // end of compression: xdot rises through zero
                let (t_ce, y_ce) = localize_event(model, &seg, |_, s| s[1], settings);
                segments.push(Segment {
                    t1: t_ce,
                    y1: y_ce,
                    d1: rhs(model, &y_ce),
                    ..seg
                });
                compression = Some((t_ce, y_ce));
                phase = Phase::Restitution;
                t = t_ce;
                y = y_ce;
                d = rhs(model, &y);
                continue;
            }
            Phase::Restitution if force(model, &seg.y1) <= T::zero() => {
                // detachment: contact force falls through zero
                let (t_re, y_re) = localize_event(model, &seg, force, settings);
                segments.push(Segment {
                    t1: t_re,
                    y1: y_re,
                    d1: rhs(model, &y_re),
                    ..seg
                });
                let (t_ce, y_ce) = compression.expect("restitution phase follows compression");
                return Ok(RawSim {
                    segments,
                    t_compression_end: t_ce,
                    y_compression_end: y_ce,
                    t_restitution_end: t_re,
                    y_restitution_end: y_re,
                });
            }
            _ => {}
        }

        segments.push(seg);
        t = seg.t1;
        y = seg.y1;
        d = seg.d1;
        h = next_step_size(h, out.error);
    }
    Err(no_detachment())
}

/// Largest interpolated force over the run, refined by dense sampling around
/// the best segment followed by a parabolic vertex fit.
fn refine_peak<T: Real>(model: &ContactModel<T>, segments: &[Segment<T>]) -> (T, T) {
    let mut best_seg = 0;
    let mut best_force = T::zero();
    let mut best_t = T::zero();
    for (i, seg) in segments.iter().enumerate() {
        for (t, y) in [(seg.t0, seg.y0), (seg.t1, seg.y1)] {
            let f = force(model, &y);
            if f > best_force {
                best_force = f;
                best_t = t;
                best_seg = i;
            }
        }
    }
    let lo_seg = best_seg.saturating_sub(1);
    let hi_seg = (best_seg + 1).min(segments.len() - 1);
    let t_lo = segments[lo_seg].t0;
    let t_hi = segments[hi_seg].t1;
    let samples = 256;
    let dt = (t_hi - t_lo) / lit(samples as f64);
    let force_at = |t: T| {
        let seg = segments[lo_seg..=hi_seg]
            .iter()
            .find(|s| t <= s.t1)
            .unwrap_or(&segments[hi_seg]);
        force(model, &seg.state_at(t))
    };
    let mut best_i = 0;
    for i in 0..=samples {
        let t = t_lo + dt * lit(i as f64);
        let f = force_at(t);
        if f > best_force {
            best_force = f;
            best_t = t;
            best_i = i;
        }
    }
    // parabolic vertex through the winning triple
    if best_i > 0 && best_i < samples {
        let tm = t_lo + dt * lit(best_i as f64);
        let (fm1, f0, fp1) = (force_at(tm - dt), force_at(tm), force_at(tm + dt));
        let denom = fm1 - f0 - f0 + fp1;
        if denom < T::zero() {
            let shift = (fm1 - fp1) / (denom * lit(2.0));
            let t_star = tm + shift * dt;
            let f_star = force_at(t_star);
            if f_star > best_force {
                best_force = f_star;
                best_t = t_star;
            }
        }
    }
    (best_force, best_t)
}

/// Simulates an impact at default settings. See [`simulate_with`].
pub fn simulate<T: Real>(
    model: &ContactModel<T>,
    v_pre: T,
) -> Result<ImpactTrace<T>, ContactError> {
    simulate_with(model, v_pre, &SimSettings::default_settings())
}

/// Integrates the reduced impact `m* x_dd = f_n(x, x_d)` from `x = 0`,
/// `x_d = v_pre < 0` until the end of restitution, and resamples the
/// trajectory on the uniform output grid.
pub fn simulate_with<T: Real>(
    model: &ContactModel<T>,
    v_pre: T,
    settings: &SimSettings<T>,
) -> Result<ImpactTrace<T>, ContactError> {
    let raw = run(model, v_pre, settings)?;
    let dt = T::one() / settings.output_rate;
    let t_end = raw.t_restitution_end;

    let mut time = Vec::new();
    let mut seg_idx = 0usize;
    let push_state = |trace: &mut TraceColumns<T>, y: &State<T>| {
        let f = force(model, y);
        let half = lit::<T>(0.5);
        trace.x.push(y[0]);
        trace.xdot.push(y[1]);
        trace.f_n.push(f);
        trace.p_n.push(y[3]);
        trace.e_k.push(half * model.m_star * y[1] * y[1]);
        trace.e_p.push(match model.family {
            ModelFamily::Maxwell => half * y[2] * y[2] / model.k,
            _ => half * model.k * y[0] * y[0],
        });
        trace.e_d.push(y[4]);
    };
    let mut cols = TraceColumns::new();

    let mut k = 0usize;
    loop {
        let t = dt * lit(k as f64);
        if t > t_end {
            break;
        }
        while seg_idx + 1 < raw.segments.len() && raw.segments[seg_idx].t1 < t {
            seg_idx += 1;
        }
        let y = raw.segments[seg_idx].state_at(t);
        time.push(t);
        push_state(&mut cols, &y);
        k += 1;
    }
    // close the trace exactly at the detachment event
    if time.last().is_none_or(|last| t_end - *last > dt * lit(1e-9)) {
        time.push(t_end);
        push_state(&mut cols, &raw.y_restitution_end);
    }

    let (peak_force, t_peak_force) = refine_peak(model, &raw.segments);
    let y_ce = raw.y_compression_end;
    let y_re = raw.y_restitution_end;
    let events = ImpactEvents {
        t_compression_end: raw.t_compression_end,
        t_restitution_end: raw.t_restitution_end,
        x_end: y_re[0],
        v_exit: y_re[1],
        cor: -y_re[1] / v_pre,
        p_nc: y_ce[3],
        p_total: y_re[3],
        peak_force,
        t_peak_force,
        peak_compression: -y_ce[0],
    };
    Ok(ImpactTrace {
        time,
        x: cols.x,
        xdot: cols.xdot,
        f_n: cols.f_n,
        p_n: cols.p_n,
        e_k: cols.e_k,
        e_p: cols.e_p,
        e_d: cols.e_d,
        events,
        model: *model,
        v_pre,
    })
}

struct TraceColumns<T: Real> {
    x: Vec<T>,
    xdot: Vec<T>,
    f_n: Vec<T>,
    p_n: Vec<T>,
    e_k: Vec<T>,
    e_p: Vec<T>,
    e_d: Vec<T>,
}

impl<T: Real> TraceColumns<T> {
    fn new() -> Self {
        Self {
            x: Vec::new(),
            xdot: Vec::new(),
            f_n: Vec::new(),
            p_n: Vec::new(),
            e_k: Vec::new(),
            e_p: Vec::new(),
            e_d: Vec::new(),
        }
    }
}

/// Contact force evaluated at arbitrary sample times (zero before contact
/// and after detachment). This is the forward model the grey-box fits match
/// against measured profiles.
pub fn force_at_times<T: Real>(
    model: &ContactModel<T>,
    v_pre: T,
    times: &[T],
    settings: &SimSettings<T>,
) -> Result<Vec<T>, ContactError> {
    let raw = run(model, v_pre, settings)?;
    let t_end = raw.t_restitution_end;
    let out = times
        .iter()
        .map(|&t| {
            if t < T::zero() || t > t_end {
                return T::zero();
            }
            let idx = raw
                .segments
                .partition_point(|s| s.t1 < t)
                .min(raw.segments.len() - 1);
            force(model, &raw.segments[idx].state_at(t))
        })
        .collect();
    Ok(out)
}
