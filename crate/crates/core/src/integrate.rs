//! Adaptive integration of the planar system
//! u' = w, w' = -phi(u) - gamma_f*c*w
//! with an embedded Dormand-Prince 5(4) pair, PI step-size control, quintic
//! Hermite dense output per accepted step, and event detection at w = 0.

use crate::error::{Error, Result};
use crate::models::ProfileProblem;
use crate::numerics::GL6;

/// One phase-plane sample. The energy is derived data and always
/// recomputable from (u, w).
#[derive(Debug, Clone, Copy)]
pub struct PhasePoint {
    pub tau: f64,
    pub u: f64,
    pub w: f64,
    pub e: f64,
}

impl PhasePoint {
    pub fn new(problem: &ProfileProblem, tau: f64, u: f64, w: f64) -> Self {
        PhasePoint {
            tau,
            u,
            w,
            e: problem.energy(u, w),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtremumKind {
    Max,
    Min,
}

/// A localized zero of w along the trajectory.
#[derive(Debug, Clone, Copy)]
pub struct ExtremumEvent {
    pub kind: ExtremumKind,
    pub tau: f64,
    pub u: f64,
    pub e: f64,
    pub index: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// Energy fell below the stop threshold.
    Converged,
    /// Ran out of tau budget.
    TauBudget,
    /// Left the guard box around the invariant region.
    Blowup,
}

/// Quintic Hermite interpolant of one accepted step, one polynomial per
/// component in the normalized variable theta = (tau - tau0)/h.
#[derive(Debug, Clone, Copy)]
pub struct StepInterpolant {
    pub tau0: f64,
    pub h: f64,
    cu: [f64; 6],
    cw: [f64; 6],
}

impl StepInterpolant {
    /// Coefficients from endpoint values, first and second derivatives.
    #[allow(clippy::too_many_arguments)]
    fn new(
        tau0: f64,
        h: f64,
        y0: [f64; 2],
        d0: [f64; 2],
        dd0: [f64; 2],
        y1: [f64; 2],
        d1: [f64; 2],
        dd1: [f64; 2],
    ) -> Self {
        let coeff = |y0: f64, d0: f64, dd0: f64, y1: f64, d1: f64, dd1: f64| {
            let (p0, q0, r0) = (y0, h * d0, h * h * dd0);
            let (p1, q1, r1) = (y1, h * d1, h * h * dd1);
            [
                p0,
                q0,
                0.5 * r0,
                -10.0 * p0 - 6.0 * q0 - 1.5 * r0 + 10.0 * p1 - 4.0 * q1 + 0.5 * r1,
                15.0 * p0 + 8.0 * q0 + 1.5 * r0 - 15.0 * p1 + 7.0 * q1 - r1,
                -6.0 * p0 - 3.0 * q0 - 0.5 * r0 + 6.0 * p1 - 3.0 * q1 + 0.5 * r1,
            ]
        };
        StepInterpolant {
            tau0,
            h,
            cu: coeff(y0[0], d0[0], dd0[0], y1[0], d1[0], dd1[0]),
            cw: coeff(y0[1], d0[1], dd0[1], y1[1], d1[1], dd1[1]),
        }
    }

    fn horner(c: &[f64; 6], theta: f64) -> f64 {
        ((((c[5] * theta + c[4]) * theta + c[3]) * theta + c[2]) * theta + c[1]) * theta + c[0]
    }

    pub fn u_at(&self, theta: f64) -> f64 {
        Self::horner(&self.cu, theta)
    }

    pub fn w_at(&self, theta: f64) -> f64 {
        Self::horner(&self.cw, theta)
    }

    pub fn u(&self, tau: f64) -> f64 {
        self.u_at((tau - self.tau0) / self.h)
    }

    pub fn w(&self, tau: f64) -> f64 {
        self.w_at((tau - self.tau0) / self.h)
    }

    pub fn tau_end(&self) -> f64 {
        self.tau0 + self.h
    }
}

/// Integration output: accepted-step samples, localized extremum events, the
/// termination reason, and the per-step dense interpolants the events and
/// energy audits are built on.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub samples: Vec<PhasePoint>,
    pub events: Vec<ExtremumEvent>,
    pub termination: Termination,
    pub steps: Vec<StepInterpolant>,
}

impl Trajectory {
    pub fn last(&self) -> &PhasePoint {
        self.samples.last().expect("trajectory has samples")
    }

    /// Shift the time origin (samples, events and interpolants together).
    pub fn shift_tau(&mut self, shift: f64) {
        for s in &mut self.samples {
            s.tau -= shift;
        }
        for e in &mut self.events {
            e.tau -= shift;
        }
        for st in &mut self.steps {
            st.tau0 -= shift;
        }
    }
}

#[derive(Debug, Clone)]
pub struct IntegrateOptions {
    pub rtol: f64,
    pub atol: f64,
    pub tau_max: f64,
    /// Stop once E < e_stop (default: problem.e_stop()).
    pub e_stop: Option<f64>,
    /// Stop after this many localized events.
    pub max_events: Option<usize>,
    pub h0: Option<f64>,
}

impl IntegrateOptions {
    pub fn new(tau_max: f64, rtol: f64, atol: f64) -> Self {
        IntegrateOptions {
            rtol,
            atol,
            tau_max,
            e_stop: None,
            max_events: None,
            h0: None,
        }
    }
}

// Dormand-Prince 5(4) tableau.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
// b - b_hat (error estimator weights).
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

type State = [f64; 2];

#[inline]
fn rhs(problem: &ProfileProblem, y: State) -> State {
    [
        y[1],
        -problem.phi(y[0]) - problem.gamma_f * problem.c * y[1],
    ]
}

fn axpy(y: State, h: f64, terms: &[(f64, State)]) -> State {
    let mut out = y;
    for &(a, k) in terms {
        out[0] += h * a * k[0];
        out[1] += h * a * k[1];
    }
    out
}

/// One Dormand-Prince step from (tau, y) with FSAL slope k1.
/// Returns (y_new, k_new, error_estimate).
fn dp_step(problem: &ProfileProblem, y: State, k1: State, h: f64) -> (State, State, State) {
    let k2 = rhs(problem, axpy(y, h, &[(A21, k1)]));
    let k3 = rhs(problem, axpy(y, h, &[(A31, k1), (A32, k2)]));
    let k4 = rhs(problem, axpy(y, h, &[(A41, k1), (A42, k2), (A43, k3)]));
    let k5 = rhs(
        problem,
        axpy(y, h, &[(A51, k1), (A52, k2), (A53, k3), (A54, k4)]),
    );
    let k6 = rhs(
        problem,
        axpy(
            y,
            h,
            &[(A61, k1), (A62, k2), (A63, k3), (A64, k4), (A65, k5)],
        ),
    );
    let y_new = axpy(
        y,
        h,
        &[(A71, k1), (A73, k3), (A74, k4), (A75, k5), (A76, k6)],
    );
    let k7 = rhs(problem, y_new);
    let err = [
        h * (E1 * k1[0] + E3 * k3[0] + E4 * k4[0] + E5 * k5[0] + E6 * k6[0] + E7 * k7[0]),
        h * (E1 * k1[1] + E3 * k3[1] + E4 * k4[1] + E5 * k5[1] + E6 * k6[1] + E7 * k7[1]),
    ];
    (y_new, k7, err)
}

/// Initial step heuristic (Hairer's hinit, simplified for the planar system).
fn initial_step(problem: &ProfileProblem, y: State, f: State, rtol: f64, atol: f64) -> f64 {
    let sc = |s: f64| atol + rtol * s.abs();
    let d0 = ((y[0] / sc(y[0])).powi(2) + (y[1] / sc(y[1])).powi(2)).sqrt();
    let d1 = ((f[0] / sc(y[0])).powi(2) + (f[1] / sc(y[1])).powi(2)).sqrt();
    let h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    let y1 = [y[0] + h0 * f[0], y[1] + h0 * f[1]];
    let f1 = rhs(problem, y1);
    let mut d2 =
        (((f1[0] - f[0]) / sc(y[0])).powi(2) + ((f1[1] - f[1]) / sc(y[1])).powi(2)).sqrt() / h0;
    if !d2.is_finite() {
        // Euler probe left the domain; force a conservative first step.
        d2 = 1e6;
    }
    let d_max = d1.max(d2);
    let h1 = if d_max <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d_max).powf(0.2)
    };
    (100.0 * h0).min(h1)
}

/// Spec-signature entry point with the default stop energy and no event cap.
pub fn integrate_adaptive(
    problem: &ProfileProblem,
    start: PhasePoint,
    tau_max: f64,
    rtol: f64,
    atol: f64,
) -> Result<Trajectory> {
    integrate_with(problem, start, &IntegrateOptions::new(tau_max, rtol, atol))
}

/// Full-options integration. Blowup is reported as an error carrying the
/// exit state; the capturing variant below retains the partial trajectory.
pub fn integrate_with(
    problem: &ProfileProblem,
    start: PhasePoint,
    opts: &IntegrateOptions,
) -> Result<Trajectory> {
    let traj = integrate_capturing(problem, start, opts)?;
    if traj.termination == Termination::Blowup {
        let last = traj.last();
        return Err(Error::Blowup {
            tau: last.tau,
            u: last.u,
            w: last.w,
        });
    }
    Ok(traj)
}

/// Like `integrate_with` but a blowup terminates the trajectory instead of
/// erroring, so the partial run stays inspectable.
pub fn integrate_capturing(
    problem: &ProfileProblem,
    start: PhasePoint,
    opts: &IntegrateOptions,
) -> Result<Trajectory> {
    if !(1e-13..=1e-6).contains(&opts.rtol) {
        return Err(Error::Domain(format!(
            "rtol = {} outside the supported range [1e-13, 1e-6]",
            opts.rtol
        )));
    }
    if !(opts.atol > 0.0) {
        return Err(Error::Domain(format!(
            "atol = {} must be positive",
            opts.atol
        )));
    }
    if !(opts.tau_max > start.tau) {
        return Err(Error::Domain(format!(
            "tau_max = {} must exceed the start time {}",
            opts.tau_max, start.tau
        )));
    }
    // Start must lie inside (or within margin of) the invariant region D.
    let (lo, hi) = (
        problem.u_minus.min(problem.u_s),
        problem.u_minus.max(problem.u_s),
    );
    let span = hi - lo;
    let e0 = problem.energy(start.u, start.w);
    if e0 > problem.e_max * (1.0 + 1e-6) || start.u < lo - 1e-6 * span || start.u > hi + 1e-6 * span
    {
        return Err(Error::Domain(format!(
            "start (u={}, w={}) lies outside the invariant region (E={e0}, E_max={})",
            start.u, start.w, problem.e_max
        )));
    }

    let e_stop = opts.e_stop.unwrap_or_else(|| problem.e_stop());
    let guard = problem.blowup_guard();
    let w_tol = 1e-12 * problem.w_scale().max(f64::MIN_POSITIVE);
    let span_total = (opts.tau_max - start.tau).abs().max(1.0);

    let mut tau = start.tau;
    let mut y: State = [start.u, start.w];
    let mut k1 = rhs(problem, y);
    let mut h = opts
        .h0
        .unwrap_or_else(|| initial_step(problem, y, k1, opts.rtol, opts.atol))
        .min(opts.tau_max - tau);
    let mut facold: f64 = 1e-4;

    let mut samples = vec![PhasePoint::new(problem, tau, y[0], y[1])];
    let mut steps: Vec<StepInterpolant> = Vec::new();
    let mut events: Vec<ExtremumEvent> = Vec::new();

    const SAFE: f64 = 0.9;
    const BETA: f64 = 0.04;
    const EXPO: f64 = 0.2 - BETA * 0.75;
    const FAC_MIN: f64 = 0.2;
    const FAC_MAX: f64 = 10.0;

    let termination = loop {
        if tau >= opts.tau_max {
            break Termination::TauBudget;
        }
        if h < 1e-14 * span_total {
            return Err(Error::StepUnderflow { tau, h });
        }
        h = h.min(opts.tau_max - tau);

        let (y_new, k_new, err) = dp_step(problem, y, k1, h);
        let sc_u = opts.atol + opts.rtol * y[0].abs().max(y_new[0].abs());
        let sc_w = opts.atol + opts.rtol * y[1].abs().max(y_new[1].abs());
        let err_norm = (0.5 * ((err[0] / sc_u).powi(2) + (err[1] / sc_w).powi(2))).sqrt();

        if !err_norm.is_finite() {
            h *= 0.25;
            continue;
        }
        if err_norm > 1.0 {
            // rejected: shrink without PI memory
            let fac = (err_norm.powf(EXPO) / SAFE).min(1.0 / FAC_MIN);
            h /= fac;
            continue;
        }

        // accepted
        let dd = |yy: State, kk: State| -> [f64; 2] {
            [
                kk[1],
                -problem.dphi(yy[0]) * yy[1] - problem.gamma_f * problem.c * kk[1],
            ]
        };
        let step = StepInterpolant::new(tau, h, y, k1, dd(y, k1), y_new, k_new, dd(y_new, k_new));
        scan_step_events(problem, &step, w_tol, opts.atol, &mut events);
        steps.push(step);

        tau += h;
        y = y_new;
        k1 = k_new;
        samples.push(PhasePoint::new(problem, tau, y[0], y[1]));

        let fac11 = err_norm.max(1e-10).powf(EXPO);
        let fac = (fac11 / facold.powf(BETA) / SAFE).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
        facold = err_norm.max(1e-10);
        h /= fac;

        if y[0].abs() + y[1].abs() > guard {
            break Termination::Blowup;
        }
        let e = samples.last().unwrap().e;
        if e < e_stop {
            break Termination::Converged;
        }
        if let Some(cap) = opts.max_events {
            if events.len() >= cap {
                break Termination::TauBudget;
            }
        }
    };

    Ok(Trajectory {
        samples,
        events,
        termination,
        steps,
    })
}

/// Scan one dense step for sign changes of w and append refined events.
fn scan_step_events(
    problem: &ProfileProblem,
    step: &StepInterpolant,
    w_tol: f64,
    atol: f64,
    events: &mut Vec<ExtremumEvent>,
) {
    const NODES: usize = 8;
    let mut prev_theta = 0.0;
    let mut prev_w = step.w_at(0.0);
    for j in 1..=NODES {
        let theta = j as f64 / NODES as f64;
        let w = step.w_at(theta);
        if prev_w == 0.0 {
            // nudge: a zero node takes the sign of the next value
            prev_w = w;
            prev_theta = theta;
            continue;
        }
        if w != 0.0 && w.signum() != prev_w.signum() {
            let (mut a, mut b) = (prev_theta, theta);
            let mut wa = prev_w;
            for _ in 0..80 {
                let mid = 0.5 * (a + b);
                let wm = step.w_at(mid);
                if wm.abs() <= w_tol || (b - a) <= 1e-16 {
                    break;
                }
                if wm.signum() == wa.signum() {
                    a = mid;
                    wa = wm;
                } else {
                    b = mid;
                }
            }
            let theta_root = 0.5 * (a + b);
            let tau_root = step.tau0 + theta_root * step.h;
            let u = step.u_at(theta_root);
            // tangency at an equilibrium is degenerate, not an extremum
            if problem.phi(u).abs() >= atol {
                let kind = if prev_w > 0.0 {
                    ExtremumKind::Max
                } else {
                    ExtremumKind::Min
                };
                let duplicate = events
                    .last()
                    .is_some_and(|e| (e.tau - tau_root).abs() <= 1e-9 * (1.0 + tau_root.abs()));
                if !duplicate {
                    events.push(ExtremumEvent {
                        kind,
                        tau: tau_root,
                        u,
                        e: problem.energy(u, 0.0),
                        index: events.len(),
                    });
                }
            }
        }
        prev_theta = theta;
        prev_w = w;
    }
}

/// Re-run event localization over a list of dense steps.
pub fn locate_events(problem: &ProfileProblem, steps: &[StepInterpolant]) -> Vec<ExtremumEvent> {
    let w_tol = 1e-12 * problem.w_scale().max(f64::MIN_POSITIVE);
    let atol = 1e-12 * problem.u_scale().max(1.0);
    let mut events = Vec::new();
    for step in steps {
        scan_step_events(problem, step, w_tol, atol, &mut events);
    }
    events
}

/// Audit floor: interval energy residuals are measured relative to
/// max(|dE|, AUDIT_FLOOR_FRACTION * E_max). The floor is the total energy
/// scale, so conservative (c = 0) runs report their per-step drift relative
/// to E_max rather than to the vanishing dE.
pub const AUDIT_FLOOR_FRACTION: f64 = 1.0;

/// Check the energy dissipation identity dE = -gamma_f c w^2 dtau on every
/// step interval. Returns the worst interval residual
/// |dE + gamma_f c Int(w^2)| / max(|dE|, floor), with the integral taken by
/// Gauss quadrature on the dense output.
pub fn energy_audit(problem: &ProfileProblem, trajectory: &Trajectory) -> f64 {
    let floor = AUDIT_FLOOR_FRACTION * problem.e_max;
    let mut worst = 0.0_f64;
    for (i, step) in trajectory.steps.iter().enumerate() {
        let (s0, s1) = (&trajectory.samples[i], &trajectory.samples[i + 1]);
        let de = s1.e - s0.e;
        let mut quad = 0.0;
        for (x, wgt) in GL6 {
            let theta = 0.5 * (x + 1.0);
            let w = step.w_at(theta);
            quad += wgt * w * w;
        }
        quad *= 0.5 * step.h;
        let residual = (de + problem.gamma_f * problem.c * quad).abs() / de.abs().max(floor);
        worst = worst.max(residual);
    }
    worst
}

/// Fixed-step fifth-order integration (no adaptivity, no dense output);
/// used for step-halving convergence checks.
pub fn integrate_fixed(
    problem: &ProfileProblem,
    start: PhasePoint,
    tau_end: f64,
    n_steps: usize,
) -> Trajectory {
    let h = (tau_end - start.tau) / n_steps as f64;
    let mut tau = start.tau;
    let mut y: State = [start.u, start.w];
    let mut k1 = rhs(problem, y);
    let mut samples = vec![PhasePoint::new(problem, tau, y[0], y[1])];
    for _ in 0..n_steps {
        let (y_new, k_new, _err) = dp_step(problem, y, k1, h);
        tau += h;
        y = y_new;
        k1 = k_new;
        samples.push(PhasePoint::new(problem, tau, y[0], y[1]));
    }
    Trajectory {
        samples,
        events: Vec::new(),
        termination: Termination::TauBudget,
        steps: Vec::new(),
    }
}
