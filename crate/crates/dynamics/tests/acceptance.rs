//! Acceptance suite: one test per criterion, each printing a PASS line with
//! the measured figure (run with `--nocapture` to see them all).

use std::time::Instant;

use impact_dynamics::chain::file::load_chain;
use impact_dynamics::contact::{
    simulate, spring_deficiency_check, ContactModel, DeficiencyOptions, SimSettings,
};
use impact_dynamics::identify::{fit_viscoelastic, ForceProfile};
use impact_dynamics::iim;
use impact_dynamics::impulse::{compression_end_impulse, ContactScenario};
use impact_dynamics::report;
use impact_dynamics::synth;
use nalgebra::{DVector, Vector3};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn fixture(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

fn gauss(rng: &mut impl RngExt) -> f64 {
    let u1: f64 = rng.random_range(1e-12..1.0);
    let u2: f64 = rng.random_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// The paper-protocol commanded speeds, m/s.
const SWEEP_SPEEDS: [f64; 5] = [0.08, 0.10, 0.12, 0.15, 0.18];

#[test]
fn criterion_01_additive_iim_identity_on_random_chains() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xA11CE);
    let mut worst = 0.0f64;
    for i in 0..100 {
        let n = rng.random_range(3..=7);
        let model = synth::random_chain::<f64, _>(&mut rng, n);
        let q = DVector::from_fn(n, |_, _| rng.random_range(-1.4..1.4));
        let gm = iim::iim_gm(&model, &q).unwrap();
        let crb = iim::iim_crb(&model, &q).unwrap();
        let flex = iim::iim_flex_correction(&model, &q).unwrap();
        let residual = (gm.matrix() - (crb.matrix() + flex)).norm() / gm.matrix().norm();
        worst = worst.max(residual);
        assert!(
            residual < 1e-8,
            "chain {i} ({n} dof): identity residual {residual:e}"
        );
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "took {elapsed:?}");
    println!(
        "[criterion 01] PASS additive IIM identity: worst residual {worst:.2e} over 100 chains in {:.2} s",
        elapsed.as_secs_f64()
    );
}

#[test]
fn criterion_02_analytic_rod_effective_masses() {
    let (m, l) = (2.0, 1.0);
    let model = synth::pendulum::<f64>(m, l);
    let q = DVector::from_row_slice(&[0.0]);
    let n = Vector3::y();

    let gm = iim::iim_gm(&model, &q).unwrap();
    let m_gm = 1.0 / gm.along(&n);
    let rel_gm = (m_gm - m / 3.0).abs() / (m / 3.0);
    assert!(rel_gm < 1e-10, "gm mass {m_gm} vs {} ({rel_gm:e})", m / 3.0);

    let crb = iim::iim_crb(&model, &q).unwrap();
    let m_crb = 1.0 / crb.along(&n);
    let rel_crb = (m_crb - m / 4.0).abs() / (m / 4.0);
    assert!(rel_crb < 1e-10, "crb mass {m_crb} vs {} ({rel_crb:e})", m / 4.0);

    println!(
        "[criterion 02] PASS rod oracle: gm m/3 (rel err {rel_gm:.1e}), crb m/4 (rel err {rel_crb:.1e})"
    );
}

#[test]
fn criterion_03_spring_closed_form() {
    let (k, m_star, v) = (1.0e4f64, 2.0f64, -0.12f64);
    let model = ContactModel::spring(k, m_star).unwrap();
    let trace = simulate(&model, v).unwrap();
    let omega = (k / m_star).sqrt();

    let duration = trace.events.t_restitution_end;
    let duration_ref = std::f64::consts::PI * (m_star / k).sqrt();
    let rel_dur = (duration - duration_ref).abs() / duration_ref;
    assert!(rel_dur < 1e-6, "duration rel err {rel_dur:e}");

    let peak_ref = v.abs() * (k * m_star).sqrt();
    let rel_peak = (trace.events.peak_force - peak_ref).abs() / peak_ref;
    assert!(rel_peak < 1e-6, "peak rel err {rel_peak:e}");

    let rel_cor = (trace.events.cor - 1.0).abs();
    assert!(rel_cor < 1e-6, "cor err {rel_cor:e}");

    let _ = omega;
    println!(
        "[criterion 03] PASS spring closed form: duration {rel_dur:.1e}, peak {rel_peak:.1e}, cor {rel_cor:.1e} (rel)"
    );
}

#[test]
fn criterion_04_viscoelastic_exit_law() {
    // strongly damped parameters keep every tested speed in the regime where
    // detachment happens at the dashpot-spring balance
    let (k, c, m_star) = (3.0e4f64, 1.0e7f64, 3.8f64);
    let model = ContactModel::viscoelastic(k, c, m_star).unwrap();
    let exit_ref = k / c;

    let mut worst_gap = 0.0f64;
    let mut cors = Vec::new();
    for &speed in &[0.0755, 0.0955, 0.1154, 0.1455, 0.1755] {
        let trace = simulate(&model, -speed).unwrap();
        let gap = (trace.events.v_exit - exit_ref).abs();
        worst_gap = worst_gap.max(gap);
        assert!(gap < 1e-8, "detachment speed gap {gap:e} at {speed} m/s");

        let predicted = impact_dynamics::contact::predicted_cor(&model, -speed).unwrap();
        assert_eq!(
            predicted,
            -(k / c) / (-speed),
            "closed-form restitution must be exact"
        );
        cors.push(trace.events.cor);
    }
    for w in cors.windows(2) {
        assert!(
            w[1] < w[0],
            "simulated restitution not strictly decreasing: {cors:?}"
        );
    }
    println!(
        "[criterion 04] PASS viscoelastic exit law: worst |v_exit - k/c| {worst_gap:.1e}, restitution {:?} strictly decreasing",
        cors.iter().map(|c| (c * 1e4).round() / 1e4).collect::<Vec<_>>()
    );
}

#[test]
fn criterion_05_energy_balance_on_every_trajectory() {
    let cases: Vec<(ContactModel<f64>, f64)> = vec![
        (ContactModel::spring(1.0e4, 2.0).unwrap(), -0.12),
        (ContactModel::spring(2.0e5, 0.7).unwrap(), -0.05),
        (ContactModel::maxwell(5.0e4, 8.0e2, 3.8).unwrap(), -0.1754),
        (ContactModel::maxwell(2.0e4, 3.0e2, 1.2).unwrap(), -0.08),
        (ContactModel::viscoelastic(3.0e4, 1.0e7, 3.8).unwrap(), -0.1755),
        (ContactModel::viscoelastic(6.0e4, 1.71e6, 3.8).unwrap(), -0.1754),
        (ContactModel::viscoelastic(5.0e4, 1.2e6, 3.0).unwrap(), -0.0755),
    ];
    let mut worst = 0.0f64;
    for (model, v) in cases {
        let trace = simulate(&model, v).unwrap();
        let energy = impact_dynamics::contact::energy_trace(&trace);
        let rel = energy.max_abs_residual / energy.initial_energy;
        worst = worst.max(rel);
        assert!(
            rel < 1e-6,
            "{} at {v}: balance residual {rel:e} of initial energy",
            model.family
        );
    }
    println!("[criterion 05] PASS energy balance: worst per-sample residual {worst:.1e} of E0");
}

#[test]
fn criterion_06_maxwell_restitution_velocity_invariant() {
    let model = ContactModel::maxwell(5.0e4f64, 8.0e2, 3.8).unwrap();
    let speeds = [-0.05, -0.1, -0.2];
    let cors: Vec<f64> = speeds
        .iter()
        .map(|&v| simulate(&model, v).unwrap().events.cor)
        .collect();
    let spread = cors.iter().cloned().fold(f64::MIN, f64::max)
        - cors.iter().cloned().fold(f64::MAX, f64::min);
    assert!(
        spread < 1e-6,
        "maxwell restitution varies by {spread:e} over a 4x speed spread: {cors:?}"
    );
    println!(
        "[criterion 06] PASS maxwell constant restitution: spread {spread:.1e} over 4x speeds (cor {:.6})",
        cors[0]
    );
}

#[test]
fn criterion_07_running_impulse_matches_momentum_balance() {
    let cases: Vec<ContactModel<f64>> = vec![
        ContactModel::spring(2.0e4, 3.0).unwrap(),
        ContactModel::maxwell(5.0e4, 9.0e2, 3.0).unwrap(),
        ContactModel::viscoelastic(5.0e4, 1.2e6, 3.0).unwrap(),
    ];
    let v = -0.17f64;
    let mut worst = 0.0f64;
    for model in cases {
        let trace = simulate(&model, v).unwrap();
        let expected = model.m_star * v.abs();
        let rel = (trace.events.p_nc - expected).abs() / expected;
        worst = worst.max(rel);
        assert!(rel < 1e-6, "{}: impulse rel err {rel:e}", model.family);

        // and the impulse-predictor sees the same number through the IIM route
        let w = iim::InverseInertiaMatrix::new(
            nalgebra::Matrix3::identity() / model.m_star,
            iim::IimMethod::Crb,
            "contact",
        );
        let scenario =
            ContactScenario::new(w, Vector3::z(), Vector3::new(0.0, 0.0, v)).unwrap();
        let p_nc = compression_end_impulse(&scenario);
        let rel2 = (p_nc - expected).abs() / expected;
        assert!(rel2 < 1e-12, "closed form drifted: {rel2:e}");
    }
    println!("[criterion 07] PASS impulse consistency: worst rel err {worst:.1e} across families");
}

#[test]
fn criterion_08_identification_recovery_and_trend() {
    let start = Instant::now();
    let (k0, c0, m_star) = (6.0e4f64, 1.4e6f64, 3.8f64);
    let truth = ContactModel::viscoelastic(k0, c0, m_star).unwrap();
    let speeds = [0.0755, 0.0955, 0.1154, 0.1455];

    // noiseless: 2 % recovery per speed
    for &speed in &speeds {
        let trace = simulate(&truth, -speed).unwrap();
        let profile = ForceProfile::from_trace(&trace).unwrap();
        let fit = fit_viscoelastic(&profile, m_star, -speed).unwrap();
        let err_k = (fit.k - k0).abs() / k0;
        let err_c = (fit.c - c0).abs() / c0;
        assert!(
            err_k < 0.02 && err_c < 0.02,
            "noiseless recovery at {speed}: k err {err_k:.3}, c err {err_c:.3}"
        );
    }

    // 1 % multiplicative noise, 10 repeats per speed: averaged recovery
    // within 10 % and strictly decreasing mean restitution
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED);
    let mut mean_cors = Vec::new();
    let mut worst_mean_err = 0.0f64;
    for &speed in &speeds {
        let trace = simulate(&truth, -speed).unwrap();
        let clean = ForceProfile::from_trace(&trace).unwrap();
        let mut k_sum = 0.0;
        let mut c_sum = 0.0;
        let mut cor_sum = 0.0;
        for _ in 0..10 {
            let noisy: Vec<f64> = clean
                .force()
                .iter()
                .map(|f| f * (1.0 + 0.01 * gauss(&mut rng)))
                .collect();
            let profile = ForceProfile::new(clean.times().to_vec(), noisy).unwrap();
            let fit = fit_viscoelastic(&profile, m_star, -speed).unwrap();
            k_sum += fit.k;
            c_sum += fit.c;
            cor_sum += fit.cor;
        }
        let (k_mean, c_mean) = (k_sum / 10.0, c_sum / 10.0);
        let err_k = (k_mean - k0).abs() / k0;
        let err_c = (c_mean - c0).abs() / c0;
        worst_mean_err = worst_mean_err.max(err_k).max(err_c);
        assert!(
            err_k < 0.10 && err_c < 0.10,
            "noisy recovery at {speed}: mean k err {err_k:.3}, mean c err {err_c:.3}"
        );
        mean_cors.push(cor_sum / 10.0);
    }
    for w in mean_cors.windows(2) {
        assert!(
            w[1] < w[0],
            "mean restitution not strictly decreasing: {mean_cors:?}"
        );
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "took {elapsed:?}");
    println!(
        "[criterion 08] PASS identification: worst noisy mean error {:.2} %, trend {:?} decreasing, {:.1} s",
        worst_mean_err * 100.0,
        mean_cors.iter().map(|c| (c * 1e3).round() / 1e3).collect::<Vec<_>>(),
        elapsed.as_secs_f64()
    );
}

#[test]
fn criterion_09_algebraic_impulse_exceeds_crb_on_example_chain() {
    let start = Instant::now();
    let model = load_chain::<f64>(fixture("example_7dof.toml")).unwrap();
    let q = DVector::from_row_slice(&[0.0, 0.4, 0.0, -1.2, 0.0, 0.8, 0.0]);
    let contact = ContactModel::viscoelastic(6.0e4f64, 2.0e7, 4.3).unwrap();
    let rows = report::sweep(
        &model,
        &q,
        &contact,
        &SWEEP_SPEEDS,
        &SimSettings::default_settings(),
    )
    .unwrap();
    assert_eq!(rows.len(), 5);
    for row in &rows {
        let algebraic = row.p_algebraic.expect("7-dof chain has the em candidate");
        assert!(
            algebraic > row.p_nc_crb,
            "at {} m/s: algebraic {algebraic} does not exceed crb {}",
            row.velocity,
            row.p_nc_crb
        );
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "sweep took {elapsed:?}");
    let margin = rows
        .iter()
        .map(|r| r.p_algebraic.unwrap() / r.p_nc_crb)
        .fold(f64::MAX, f64::min);
    println!(
        "[criterion 09] PASS sweep pattern: algebraic/crb >= {margin:.2} at all five speeds in {:.2} s",
        elapsed.as_secs_f64()
    );
}

#[test]
fn criterion_10_spring_deficiency_detector() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xDEF1C);
    let opts = DeficiencyOptions::default();

    let mut spring_flags = 0usize;
    for i in 0..50 {
        let k = 10f64.powf(rng.random_range(3.7..5.7));
        let m_star = rng.random_range(0.5..8.0);
        let speed = rng.random_range(0.05..0.25);
        let model = ContactModel::spring(k, m_star).unwrap();
        let trace = simulate(&model, -speed).unwrap();
        let report = spring_deficiency_check(&trace.time, &trace.f_n, 1.0, &opts).unwrap();
        if report.spring_inconsistent {
            spring_flags += 1;
        }
        assert!(
            !report.spring_inconsistent,
            "spring case {i} (k={k:.3e}, m*={m_star:.2}, v={speed:.3}) falsely flagged \
             (implied restitution {})",
            report.implied_restitution
        );
    }

    let mut visco_misses = 0usize;
    for i in 0..50 {
        let k = 10f64.powf(rng.random_range(3.7..5.7));
        let m_star = rng.random_range(0.5..8.0);
        let speed = rng.random_range(0.05..0.25);
        let e_r = rng.random_range(0.05..0.7);
        let c = k / (e_r * speed);
        let model = ContactModel::viscoelastic(k, c, m_star).unwrap();
        let trace = simulate(&model, -speed).unwrap();
        let report = spring_deficiency_check(&trace.time, &trace.f_n, 1.0, &opts).unwrap();
        if !report.spring_inconsistent {
            visco_misses += 1;
        }
        assert!(
            report.spring_inconsistent,
            "viscoelastic case {i} (k={k:.3e}, e_r={e_r:.2}) missed \
             (implied restitution {})",
            report.implied_restitution
        );
    }
    assert_eq!(spring_flags + visco_misses, 0);
    println!("[criterion 10] PASS deficiency detector: 0 errors over 50 spring + 50 viscoelastic cases");
}
