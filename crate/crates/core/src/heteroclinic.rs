//! Construction of the traveling-wave orbit from the saddle (u_minus, 0) to
//! the spiral/node (u_plus, 0), shift normalization at the first extremum,
//! and the mapping back to physical variables for each model.

use crate::error::{Error, Result};
use crate::integrate::{integrate_with, IntegrateOptions, PhasePoint, Termination, Trajectory};
use crate::models::{ModelFamily, ProfileProblem};
use num_complex::Complex64;

/// Linearization data at the two equilibria.
#[derive(Debug, Clone, Copy)]
pub struct SaddleData {
    /// Positive (unstable) eigenvalue at (u_minus, 0).
    pub lambda_plus: f64,
    /// Negative (stable) eigenvalue at (u_minus, 0).
    pub lambda_minus: f64,
    /// Eigenvalue pair at (u_plus, 0); complex in the spiral regime.
    pub big_lambda: [Complex64; 2],
    /// True when gamma_f^2 c^2 < 4 phi'(u_plus).
    pub spiral: bool,
    /// Unstable eigendirection (1, lambda_plus) at the saddle.
    pub unstable_direction: [f64; 2],
}

/// Closed-form eigenvalues at both equilibria:
/// lambda -> roots of lambda^2 + gamma_f c lambda + phi'(u) = 0.
pub fn saddle_analysis(problem: &ProfileProblem) -> Result<SaddleData> {
    let d_minus = problem.dphi(problem.u_minus);
    let d_plus = problem.dphi(problem.u_plus);
    if !(d_minus < 0.0) {
        return Err(Error::Hypothesis(format!(
            "phi'(u_minus) = {d_minus} must be negative for a saddle"
        )));
    }
    if !(d_plus > 0.0) {
        return Err(Error::Hypothesis(format!(
            "phi'(u_plus) = {d_plus} must be positive for a spiral or node"
        )));
    }
    let gc = problem.gamma_f * problem.c;
    let disc_minus = gc * gc - 4.0 * d_minus; // > 0 always
    let lambda_plus = -0.5 * gc + 0.5 * disc_minus.sqrt();
    let lambda_minus = -0.5 * gc - 0.5 * disc_minus.sqrt();
    let disc_plus = gc * gc - 4.0 * d_plus;
    let spiral = disc_plus < 0.0;
    let big_lambda = if spiral {
        let om = 0.5 * (-disc_plus).sqrt();
        [
            Complex64::new(-0.5 * gc, om),
            Complex64::new(-0.5 * gc, -om),
        ]
    } else {
        let r = 0.5 * disc_plus.sqrt();
        [
            Complex64::new(-0.5 * gc + r, 0.0),
            Complex64::new(-0.5 * gc - r, 0.0),
        ]
    };
    Ok(SaddleData {
        lambda_plus,
        lambda_minus,
        big_lambda,
        spiral,
        unstable_direction: [1.0, lambda_plus],
    })
}

#[derive(Debug, Clone)]
pub struct ShootOptions {
    /// Start offset along the unstable direction as a fraction of u_s - u_minus.
    pub offset_scale: f64,
    pub rtol: f64,
    pub atol: Option<f64>,
    pub tau_budget: Option<f64>,
}

impl Default for ShootOptions {
    fn default() -> Self {
        ShootOptions {
            offset_scale: 1e-7,
            rtol: 1e-10,
            atol: None,
            tau_budget: None,
        }
    }
}

/// The wave profile in physical variables, together with the normalized
/// reduced trajectory it came from. Arrays are aligned and ordered by theta.
#[derive(Debug, Clone)]
pub struct WaveProfile {
    pub trajectory: Trajectory,
    pub theta: Vec<f64>,
    pub tau: Vec<f64>,
    pub u: Vec<f64>,
    pub w: Vec<f64>,
    pub e: Vec<f64>,
    /// Named physical fields: (u, v) elasticity, (rho, u, j) QHD,
    /// (eta, u) Boussinesq.
    pub fields: Vec<(&'static str, Vec<f64>)>,
    pub epsilon: f64,
    pub delta: f64,
    pub c: f64,
    pub s: f64,
}

impl WaveProfile {
    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    pub fn field(&self, name: &str) -> Option<&[f64]> {
        self.fields
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, v)| v.as_slice())
    }
}

/// Integrate the heteroclinic orbit in the reduced variables and shift tau so
/// the first extremum (the global one) sits at tau = 0.
pub fn shoot_reduced(problem: &ProfileProblem, opts: &ShootOptions) -> Result<Trajectory> {
    if !(problem.c > 0.0) {
        return Err(Error::Domain(
            "shooting needs positive friction; the c = 0 orbit is not heteroclinic".into(),
        ));
    }
    let saddle = saddle_analysis(problem)?;
    // Offset signed toward u_plus: u_s - u_minus carries the orientation.
    let h = opts.offset_scale * (problem.u_s - problem.u_minus);
    let start = PhasePoint::new(problem, 0.0, problem.u_minus + h, saddle.lambda_plus * h);
    let atol = opts.atol.unwrap_or(1e-12 * problem.u_scale().max(1.0));
    let tau_max = opts.tau_budget.unwrap_or_else(|| problem.tau_budget());
    let options = IntegrateOptions {
        rtol: opts.rtol,
        atol,
        tau_max,
        e_stop: None,
        max_events: None,
        h0: None,
    };
    let mut traj = integrate_with(problem, start, &options)?;
    if traj.termination != Termination::Converged {
        let last = traj.last();
        return Err(Error::Nonconvergence {
            tau: last.tau,
            energy: last.e,
        });
    }
    // Normalize so the first extremum (the global one) sits at tau = 0.
    // Heavily damped orbits can fall below the stop energy before their
    // first, exponentially small extremum; the farthest-advanced sample then
    // plays the role of the maximum.
    let shift = match traj.events.first() {
        Some(event) => event.tau,
        None => {
            let dir = (problem.u_plus - problem.u_minus).signum();
            traj.samples
                .iter()
                .max_by(|a, b| (dir * a.u).partial_cmp(&(dir * b.u)).unwrap())
                .map(|s| s.tau)
                .unwrap()
        }
    };
    traj.shift_tau(shift);
    Ok(traj)
}

/// Shoot and map to physical variables (requires a problem built from a
/// model, not a synthetic potential).
pub fn shoot_heteroclinic(
    problem: &ProfileProblem,
    offset_scale: f64,
    rtol: f64,
) -> Result<WaveProfile> {
    let opts = ShootOptions {
        offset_scale,
        rtol,
        ..ShootOptions::default()
    };
    shoot_with(problem, &opts)
}

pub fn shoot_with(problem: &ProfileProblem, opts: &ShootOptions) -> Result<WaveProfile> {
    let ctx = problem.physical.as_ref().ok_or_else(|| {
        Error::Domain("profile problem carries no physical context to map into".into())
    })?;
    let raw = shoot_reduced(problem, opts)?;
    to_physical(problem, &ctx.model.clone(), &raw, ctx.epsilon, ctx.delta)
}

/// Map a normalized reduced trajectory to the physical profile:
/// theta = sqrt(delta) tau (elasticity, QHD) or -sqrt(s delta) tau
/// (Boussinesq); time-reversed problems flip the sign again. The approach to
/// the saddle is extended analytically with u - u_minus ~ h e^{lambda_plus tau}.
pub fn to_physical(
    problem: &ProfileProblem,
    model: &ModelFamily,
    raw: &Trajectory,
    epsilon: f64,
    delta: f64,
) -> Result<WaveProfile> {
    let shock = problem
        .physical
        .as_ref()
        .map(|ctx| ctx.shock.clone())
        .ok_or_else(|| Error::Domain("reduced problem has no shock data attached".into()))?;
    let saddle = saddle_analysis(problem)?;

    let model_sign = match model {
        ModelFamily::Boussinesq { .. } => -1.0,
        _ => 1.0,
    };
    let reversal = if problem.time_reversed { -1.0 } else { 1.0 };
    let sign = model_sign * reversal;
    let scale = match model {
        ModelFamily::Boussinesq { speed } => (speed * delta).sqrt(),
        _ => delta.sqrt(),
    };

    // Analytic saddle tail: from the first integrated sample backwards until
    // the offset has decayed to 1e-8 of the jump. Only trajectories that
    // start inside the saddle's linear regime get the extension.
    let first = raw.samples.first().expect("non-empty trajectory");
    let jump = (problem.u_plus - problem.u_minus).abs();
    let h0 = first.u - problem.u_minus;
    let mut extension: Vec<PhasePoint> = Vec::new();
    if h0.abs() > 0.0 && h0.abs() <= 0.05 * jump {
        let target = 1e-8 * jump;
        let efolds = (h0.abs() / target).ln().max(0.0);
        let dtau = 0.25 / saddle.lambda_plus;
        let n = (efolds / (saddle.lambda_plus * dtau)).ceil() as usize;
        for k in (1..=n).rev() {
            let tau = first.tau - k as f64 * dtau;
            let du = h0 * (saddle.lambda_plus * (tau - first.tau)).exp();
            let u = problem.u_minus + du;
            let w = saddle.lambda_plus * du;
            extension.push(PhasePoint::new(problem, tau, u, w));
        }
    }

    let reduced: Vec<PhasePoint> = extension
        .iter()
        .chain(raw.samples.iter())
        .copied()
        .collect();

    let n = reduced.len();
    let mut theta = Vec::with_capacity(n);
    let mut tau = Vec::with_capacity(n);
    let mut u = Vec::with_capacity(n);
    let mut w = Vec::with_capacity(n);
    let mut e = Vec::with_capacity(n);
    let order: Box<dyn Iterator<Item = &PhasePoint>> = if sign > 0.0 {
        Box::new(reduced.iter())
    } else {
        Box::new(reduced.iter().rev())
    };
    for p in order {
        theta.push(sign * scale * p.tau);
        tau.push(p.tau);
        u.push(p.u);
        w.push(p.w);
        e.push(p.e);
    }

    let fields = physical_fields(model, &shock, &u)?;
    Ok(WaveProfile {
        trajectory: raw.clone(),
        theta,
        tau,
        u,
        w,
        e,
        fields,
        epsilon,
        delta,
        c: problem.c,
        s: shock.s,
    })
}

fn physical_fields(
    model: &ModelFamily,
    shock: &crate::models::ShockData,
    u: &[f64],
) -> Result<Vec<(&'static str, Vec<f64>)>> {
    match model {
        ModelFamily::Elasticity(_) => {
            let v: Vec<f64> = u
                .iter()
                .map(|&ui| shock.v_minus - shock.s * (ui - shock.u_minus))
                .collect();
            Ok(vec![("u", u.to_vec()), ("v", v)])
        }
        ModelFamily::Qhd { .. } => {
            let m = shock
                .m
                .ok_or_else(|| Error::Domain("QHD shock without mass flux".into()))?;
            let rho: Vec<f64> = u.iter().map(|&x| x.exp()).collect();
            let vel: Vec<f64> = rho.iter().map(|&r| shock.s + m / r).collect();
            let j: Vec<f64> = rho.iter().zip(&vel).map(|(r, v)| r * v).collect();
            Ok(vec![("rho", rho), ("u", vel), ("j", j)])
        }
        ModelFamily::Boussinesq { speed } => {
            let cap = speed * (1.0 - crate::models::potential::BOUSSINESQ_POLE_MARGIN);
            let mut eta = Vec::with_capacity(u.len());
            for &ui in u {
                if ui >= cap {
                    return Err(Error::Domain(format!(
                        "Boussinesq profile reached the pole: u = {ui} >= {cap}"
                    )));
                }
                eta.push(ui / (ui - speed));
            }
            Ok(vec![("eta", eta), ("u", u.to_vec())])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrate::{ExtremumKind, Trajectory};
    use crate::models::{
        build_profile_problem, qhd_mass_flux, shock_speed, ModelFamily, ProfileProblem, ShockData,
        ShockFamily, StressLaw,
    };

    fn fig3_problem(c: f64) -> ProfileProblem {
        let law = StressLaw::sqrt();
        let shock = shock_speed(&law, 4.0, 5.0, ShockFamily::Two).unwrap();
        let model = ModelFamily::Elasticity(law);
        build_profile_problem(&model, &shock, c / shock.s, 1.0).unwrap()
    }

    fn fig4_problem(c: f64) -> ProfileProblem {
        let shock = qhd_mass_flux(1.4, 1.5, 1.0, ShockFamily::Two).unwrap();
        let model = ModelFamily::Qhd { gamma: 1.4 };
        build_profile_problem(&model, &shock, c / shock.s, 1.0).unwrap()
    }

    #[test]
    fn saddle_eigenvalues_closed_form() {
        let p = fig3_problem(0.004);
        let s = saddle_analysis(&p).unwrap();
        // roots of lambda^2 + c lambda + phi'(u_minus) = 0
        let alpha_minus = -p.dphi(p.u_minus);
        assert!((s.lambda_plus - 0.116_050_931_8).abs() <= 1e-9);
        assert!((s.lambda_plus * s.lambda_minus + alpha_minus).abs() <= 1e-15);
        assert!((s.lambda_plus + s.lambda_minus + p.c).abs() <= 1e-15);
        assert!(s.lambda_minus < 0.0 && s.lambda_plus > 0.0);
        // monotone bound 0 < lambda_plus < sqrt(alpha_minus)
        assert!(s.lambda_plus < alpha_minus.sqrt());
        assert_eq!(s.unstable_direction, [1.0, s.lambda_plus]);
        // spiral test: c^2 = 1.6e-5 < 4 phi'(u_plus)
        assert!(s.spiral);
        assert!((s.big_lambda[0].re + 0.002).abs() <= 1e-15);
        let omega = (p.dphi(p.u_plus) - 0.002f64.powi(2)).sqrt();
        assert!((s.big_lambda[0].im.abs() - omega).abs() <= 1e-12);
    }

    #[test]
    fn pure_saddle_at_zero_friction_unit_slope() {
        // Boussinesq at the golden-ratio speed has phi'(0) = -1 exactly,
        // so the c = 0 eigenvalues are +-1.
        let s_golden = 0.5 * (1.0 + 5f64.sqrt());
        let shock = ShockData::boussinesq(s_golden).unwrap();
        let model = ModelFamily::Boussinesq { speed: s_golden };
        let p = build_profile_problem(&model, &shock, 1e-3, 1.0)
            .unwrap()
            .with_friction(0.0);
        assert!((p.dphi(0.0) + 1.0).abs() <= 1e-14);
        let s = saddle_analysis(&p).unwrap();
        assert!((s.lambda_plus - 1.0).abs() <= 1e-14);
        assert!((s.lambda_minus + 1.0).abs() <= 1e-14);
    }

    #[test]
    fn node_regime_flag() {
        let p = fig3_problem(0.3);
        let s = saddle_analysis(&p).unwrap();
        assert!(!s.spiral);
        assert!(s.big_lambda[0].im == 0.0 && s.big_lambda[0].re < 0.0);
    }

    #[test]
    fn fig3_shot_is_normalized_and_lands_on_the_spiral() {
        let p = fig3_problem(0.004);
        let traj = shoot_reduced(&p, &ShootOptions::default()).unwrap();
        // shift normalization: first event at tau = 0, global max there
        let first = &traj.events[0];
        assert_eq!(first.kind, ExtremumKind::Max);
        assert!(first.tau.abs() <= 1e-12);
        assert!(first.u > p.u_plus && first.u <= p.u_s + 1e-6);
        assert!(first.e < p.e_max);
        let u_max = traj.samples.iter().map(|s| s.u).fold(f64::MIN, f64::max);
        assert!(u_max <= first.u + 1e-9, "first maximum is the global one");
        // dense value at tau = 0
        let step = traj
            .steps
            .iter()
            .find(|st| st.tau0 <= 0.0 && st.tau_end() >= 0.0)
            .unwrap();
        assert!(step.w(0.0).abs() <= 1e-10);
        // terminal state
        assert!((traj.last().u - 5.0).abs() <= 1e-6);
        // extrema sit in the paper's brackets
        for e in &traj.events {
            match e.kind {
                ExtremumKind::Max => assert!(e.u > p.u_plus && e.u <= p.u_s + 1e-6),
                ExtremumKind::Min => assert!(e.u >= p.u_minus - 1e-9 && e.u < p.u_plus),
            }
        }
    }

    #[test]
    fn backward_tail_decays_at_the_unstable_rate() {
        let p = fig3_problem(0.004);
        let s = saddle_analysis(&p).unwrap();
        let traj = shoot_reduced(&p, &ShootOptions::default()).unwrap();
        let pts: Vec<(f64, f64)> = traj
            .samples
            .iter()
            .filter(|smp| {
                let d = smp.u - p.u_minus;
                d > 1e-7 && d < 0.05 * (p.u_s - p.u_minus)
            })
            .map(|smp| (smp.tau, (smp.u - p.u_minus).ln()))
            .collect();
        let xs: Vec<f64> = pts.iter().map(|q| q.0).collect();
        let ys: Vec<f64> = pts.iter().map(|q| q.1).collect();
        let (slope, _, _) = crate::numerics::linear_fit(&xs, &ys).unwrap();
        assert!(
            (slope - s.lambda_plus).abs() <= 0.01 * s.lambda_plus,
            "fitted rate {slope} vs lambda_plus {}",
            s.lambda_plus
        );
    }

    #[test]
    fn supercritical_profile_is_monotone_with_at_most_one_extremum() {
        let p = fig3_problem(0.3);
        let traj = shoot_reduced(&p, &ShootOptions::default()).unwrap();
        assert!(traj.events.len() <= 1);
        assert!((traj.last().u - 5.0).abs() <= 1e-6);
        // tail is monotone after the normalization point
        let tail: Vec<f64> = traj
            .samples
            .iter()
            .filter(|s| s.tau > 0.0)
            .map(|s| s.u)
            .collect();
        for pair in tail.windows(2) {
            assert!(pair[1] <= pair[0] + 1e-12);
        }
    }

    #[test]
    fn qhd_fig4_profile_descends_in_log_density() {
        let p = fig4_problem(0.02);
        let profile = shoot_with(&p, &ShootOptions::default()).unwrap();
        let traj = &profile.trajectory;
        // mirrored orientation: first extremum is the global minimum of x
        assert_eq!(traj.events[0].kind, ExtremumKind::Min);
        assert!(traj.events[0].u < p.u_plus && traj.events[0].u >= p.u_s - 1e-6);
        assert!(traj.events.len() > 20, "oscillatory tail expected");
        assert!((traj.last().u - p.u_plus).abs() <= 1e-6);
        // rho (u - s) = m identically along the profile
        let m = p.physical.as_ref().unwrap().shock.m.unwrap();
        let s = profile.s;
        let rho = profile.field("rho").unwrap();
        let vel = profile.field("u").unwrap();
        let j = profile.field("j").unwrap();
        for i in 0..profile.len() {
            assert!((rho[i] * (vel[i] - s) - m).abs() <= 1e-14 * m.abs().max(1.0));
            assert!((j[i] - rho[i] * vel[i]).abs() <= 1e-15 * j[i].abs().max(1.0));
        }
    }

    #[test]
    fn physical_profile_limits_match_end_states() {
        let p = fig3_problem(0.004);
        let profile = shoot_with(&p, &ShootOptions::default()).unwrap();
        let shock = &p.physical.as_ref().unwrap().shock;
        let jump_u = (shock.u_plus - shock.u_minus).abs();
        let jump_v = (shock.v_plus - shock.v_minus).abs();
        let u = profile.field("u").unwrap();
        let v = profile.field("v").unwrap();
        assert!((u[0] - shock.u_minus).abs() <= 1e-5 * jump_u);
        assert!((u[u.len() - 1] - shock.u_plus).abs() <= 1e-5 * jump_u);
        assert!((v[0] - shock.v_minus).abs() <= 1e-5 * jump_v);
        assert!((v[v.len() - 1] - shock.v_plus).abs() <= 1e-5 * jump_v);
        // v tied to u by the jump relation along the whole profile
        for i in 0..profile.len() {
            let expect = shock.v_minus - shock.s * (u[i] - shock.u_minus);
            assert!((v[i] - expect).abs() <= 1e-14);
        }
        // theta increases and maps tau by sqrt(delta)
        for pair in profile.theta.windows(2) {
            assert!(pair[1] > pair[0]);
        }
    }

    #[test]
    fn boussinesq_profile_carries_the_bore_height() {
        let shock = ShockData::boussinesq(2.0).unwrap();
        let model = ModelFamily::Boussinesq { speed: 2.0 };
        let p = build_profile_problem(&model, &shock, 0.5 * 2f64.sqrt(), 1.0).unwrap();
        let profile = shoot_with(&p, &ShootOptions::default()).unwrap();
        let eta = profile.field("eta").unwrap();
        // raised state on the physical left, still water on the right
        assert!((eta[0] + 3f64.sqrt()).abs() <= 1e-5 * 3f64.sqrt());
        assert!(eta[eta.len() - 1].abs() <= 1e-5 * 3f64.sqrt());
        // oscillations live behind the front (negative theta side)
        assert!(profile.theta[0] < -10.0 && *profile.theta.last().unwrap() > 0.0);
    }

    #[test]
    fn constant_trajectory_maps_to_constant_fields() {
        let p = fig3_problem(0.004);
        let samples: Vec<crate::integrate::PhasePoint> = (0..10)
            .map(|i| crate::integrate::PhasePoint::new(&p, i as f64, p.u_plus, 0.0))
            .collect();
        let traj = Trajectory {
            samples,
            events: Vec::new(),
            termination: crate::integrate::Termination::Converged,
            steps: Vec::new(),
        };
        let ctx = p.physical.as_ref().unwrap();
        let profile = to_physical(&p, &ctx.model.clone(), &traj, ctx.epsilon, ctx.delta).unwrap();
        let shock = &ctx.shock;
        for (name, values) in &profile.fields {
            let expect = match *name {
                "u" => shock.u_plus,
                "v" => shock.v_plus,
                _ => unreachable!(),
            };
            for v in values {
                assert_eq!(*v, expect);
            }
        }
    }

    #[test]
    fn shooting_is_unique_up_to_translation() {
        let p = fig3_problem(0.004);
        let a = shoot_reduced(&p, &ShootOptions::default()).unwrap();
        let b = shoot_reduced(
            &p,
            &ShootOptions {
                offset_scale: 5e-8,
                ..ShootOptions::default()
            },
        )
        .unwrap();
        // evaluate b's dense output on a's sample grid (both normalized)
        let eval = |traj: &Trajectory, tau: f64| -> Option<f64> {
            let steps = &traj.steps;
            if tau < steps[0].tau0 || tau > steps.last().unwrap().tau_end() {
                return None;
            }
            let idx = steps
                .partition_point(|s| s.tau_end() < tau)
                .min(steps.len() - 1);
            Some(steps[idx].u(tau))
        };
        let mut sup = 0.0_f64;
        for s in &a.samples {
            if let Some(u) = eval(&b, s.tau) {
                sup = sup.max((u - s.u).abs());
            }
        }
        let jump = (p.u_plus - p.u_minus).abs();
        assert!(sup <= 1e-6 * jump, "sup difference {sup:.3e}");
    }
}
