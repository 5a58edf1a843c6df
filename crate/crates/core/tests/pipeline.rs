//! Cross-module integration checks that exercise the full
//! build -> shoot -> analyze -> converge pipeline beyond the acceptance set.

use dispshock::convergence::{default_window, front_shift, l1_distance, shock_reference, sweep};
use dispshock::heteroclinic::{shoot_with, ShootOptions};
use dispshock::models::{
    build_profile_problem, qhd_mass_flux, shock_speed, ModelFamily, ShockData, ShockFamily,
    StressLaw,
};
use dispshock::numerics::linear_fit;

fn models() -> Vec<(&'static str, ModelFamily, ShockData, f64)> {
    let law = StressLaw::sqrt();
    let elastic = shock_speed(&law, 4.0, 5.0, ShockFamily::Two).unwrap();
    let qhd = qhd_mass_flux(1.4, 1.5, 1.0, ShockFamily::Two).unwrap();
    let bous = ShockData::boussinesq(2.0).unwrap();
    vec![
        // epsilon scale keeping every c below critical for all p in 1.25..2
        ("elasticity", ModelFamily::Elasticity(law), elastic, 1e-3),
        ("qhd", ModelFamily::Qhd { gamma: 1.4 }, qhd, 1.0),
        (
            "boussinesq",
            ModelFamily::Boussinesq { speed: 2.0 },
            bous,
            1.0,
        ),
    ]
}

#[test]
fn l1_decreases_for_every_family_and_exponent() {
    let eps_base: [f64; 4] = [4e-2, 2e-2, 1e-2, 5e-3];
    for (name, model, shock, scale) in models() {
        for p in [1.25, 1.5, 1.75] {
            let eps: Vec<f64> = eps_base.iter().map(|e| e * scale).collect();
            let result = sweep(&model, &shock, &eps, p, None).unwrap();
            assert!(
                result.failures.is_empty(),
                "{name} p={p}: {} failures",
                result.failures.len()
            );
            for pair in result.records.windows(2) {
                let ratio = pair[1].l1_distance / pair[0].l1_distance;
                assert!(
                    ratio <= 1.05,
                    "{name} p={p}: L1 grew by {:.1}% on a halving step",
                    100.0 * (ratio - 1.0)
                );
            }
            // dispersion bookkeeping on every record
            for r in &result.records {
                assert!((r.delta - r.epsilon.powf(p)).abs() <= 1e-14 * r.delta);
                let c_expect = match model {
                    ModelFamily::Boussinesq { speed } => r.epsilon / (speed * r.delta).sqrt(),
                    _ => shock.s.abs() * r.epsilon / r.delta.sqrt(),
                };
                assert!((r.c - c_expect).abs() <= 1e-14 * r.c);
                assert!(r.l1_distance >= 0.0 && r.support_width >= 0.0);
            }
        }
    }
}

#[test]
fn weak_dispersion_distances_are_smaller_at_equal_epsilon() {
    // p = 2 (classical regime) converges at least as fast as p = 1.5
    let (_, model, shock, _) = models().remove(2);
    let eps: [f64; 4] = [4e-2, 2e-2, 1e-2, 5e-3];
    let moderate = sweep(&model, &shock, &eps, 1.5, None).unwrap();
    let weak = sweep(&model, &shock, &eps, 2.0, None).unwrap();
    for (a, b) in moderate.records.iter().zip(&weak.records) {
        assert_eq!(a.epsilon, b.epsilon);
        assert!(
            b.l1_distance < a.l1_distance,
            "p=2 distance {} should undercut p=1.5 distance {} at eps={}",
            b.l1_distance,
            a.l1_distance,
            a.epsilon
        );
    }
}

#[test]
fn support_width_slope_holds_over_a_decade() {
    // delta/eps = eps^0.5 spans a decade when eps spans two
    let law = StressLaw::sqrt();
    let shock = shock_speed(&law, 4.0, 5.0, ShockFamily::Two).unwrap();
    let model = ModelFamily::Elasticity(law);
    let eps: Vec<f64> = [4e-5, 1.26e-5, 4e-6, 1.26e-6, 4e-7].to_vec();
    let result = sweep(&model, &shock, &eps, 1.5, None).unwrap();
    assert!(result.failures.is_empty());
    let xs: Vec<f64> = result
        .records
        .iter()
        .map(|r| (r.delta / r.epsilon).ln())
        .collect();
    let ys: Vec<f64> = result
        .records
        .iter()
        .map(|r| r.support_width.ln())
        .collect();
    let span = (xs[0] - xs[xs.len() - 1]).abs();
    assert!(
        span >= std::f64::consts::LN_10,
        "delta/eps must span a decade"
    );
    let (slope, _, r2) = linear_fit(&xs, &ys).unwrap();
    assert!(
        (slope - 1.0).abs() <= 0.2,
        "support width slope {slope:.3} outside 1 +- 0.2 (r2 = {r2:.4})"
    );
}

#[test]
fn front_alignment_is_shift_optimal_to_one_cell() {
    let law = StressLaw::sqrt();
    let shock = shock_speed(&law, 4.0, 5.0, ShockFamily::Two).unwrap();
    let model = ModelFamily::Elasticity(law);
    let problem = build_profile_problem(&model, &shock, 4e-3, 4e-3f64.powf(1.5)).unwrap();
    let profile = shoot_with(&problem, &ShootOptions::default()).unwrap();
    let reference = shock_reference(&model, &shock);
    let shift = front_shift(&problem, &profile);
    let window = default_window(&problem);
    let base = l1_distance(&profile, &reference, window, shift);
    let mid = profile.len() / 2;
    let cell = (profile.theta[mid + 1] - profile.theta[mid]).abs();
    for sign in [-1.0, 1.0] {
        let perturbed = l1_distance(&profile, &reference, window, shift + sign * cell);
        assert!(
            perturbed >= 0.99 * base,
            "one-cell shift improved L1 by more than 1%: {perturbed} vs {base}"
        );
    }
}

#[test]
fn one_shock_profiles_mirror_their_two_shock_twins() {
    // QHD 1-shock (rho rising across the front, s < 0) maps to the same
    // physical density band as the 2-shock with swapped states.
    let one = qhd_mass_flux(1.4, 1.0, 1.5, ShockFamily::One).unwrap();
    assert!(one.s < 0.0 && one.m.unwrap() > 0.0);
    let model = ModelFamily::Qhd { gamma: 1.4 };
    let p = build_profile_problem(&model, &one, 0.02 / one.s.abs(), 1.0).unwrap();
    assert!(p.time_reversed);
    let profile = shoot_with(&p, &ShootOptions::default()).unwrap();
    let rho = profile.field("rho").unwrap();
    let jump = 0.5;
    assert!((rho[0] - 1.0).abs() <= 1e-5 * jump, "left density 1.0");
    assert!(
        (rho[rho.len() - 1] - 1.5).abs() <= 1e-5 * jump,
        "right density 1.5"
    );
    for pair in profile.theta.windows(2) {
        assert!(pair[1] > pair[0], "theta stays ordered after reversal");
    }
}
