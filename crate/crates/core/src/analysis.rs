//! Oscillation structure: per-cycle energies and drops, lengths of the high-
//! and low-energy regions, Hamiltonian periods T(E), and scaling-law fits.

use crate::error::{Error, Result};
use crate::heteroclinic::WaveProfile;
use crate::integrate::{integrate_with, IntegrateOptions, PhasePoint, Trajectory};
use crate::models::ProfileProblem;
use crate::numerics::{adaptive_simpson, bisect, linear_fit};
use std::f64::consts::FRAC_PI_2;

/// One oscillation cycle, bounded by consecutive near-side extrema y_n and
/// containing the far-side extremum x_n.
#[derive(Debug, Clone, Copy)]
pub struct CycleRecord {
    pub n: usize,
    /// tau of the cycle-opening near-side extremum y_n.
    pub tau_min: f64,
    /// tau of the far-side extremum x_n inside the cycle.
    pub tau_max: f64,
    /// Energy at y_n.
    pub e_yn: f64,
    /// Energy drop over the cycle, E(y_{n+1}) - E(y_n) < 0.
    pub de: f64,
    /// Cycle length y_{n+1} - y_n.
    pub spacing: f64,
}

#[derive(Debug, Clone)]
pub struct OscillationReport {
    pub cycles: Vec<CycleRecord>,
    /// tau-length of the E in (E_m, E_max) region, from the first extremum.
    pub l_high: f64,
    /// tau-length from the E_m crossing down to the stop energy.
    pub l_low: f64,
    /// Fitted exponential decay rate of extremum amplitudes in the tail.
    pub decay_rate: f64,
    /// Mean tau spacing between consecutive tail extrema.
    pub tail_spacing: f64,
    pub c: f64,
    /// Set when fewer than 6 tail extrema backed the decay fit.
    pub low_confidence_decay: bool,
}

/// Assemble the oscillation report from a normalized profile.
pub fn oscillation_report(problem: &ProfileProblem, profile: &WaveProfile) -> OscillationReport {
    oscillation_report_reduced(problem, &profile.trajectory)
}

/// Same, straight from the reduced trajectory.
pub fn oscillation_report_reduced(
    problem: &ProfileProblem,
    traj: &Trajectory,
) -> OscillationReport {
    let events = &traj.events;

    // Events alternate far/near starting from the normalized first extremum:
    // even indices overshoot toward u_s, odd indices return toward u_minus.
    let far: Vec<_> = events.iter().step_by(2).collect();
    let near: Vec<_> = events.iter().skip(1).step_by(2).collect();

    let mut cycles = Vec::new();
    for n in 1..near.len() {
        let y_n = near[n - 1];
        let y_next = near[n];
        if let Some(x_n) = far.get(n) {
            cycles.push(CycleRecord {
                n,
                tau_min: y_n.tau,
                tau_max: x_n.tau,
                e_yn: y_n.e,
                de: y_next.e - y_n.e,
                spacing: y_next.tau - y_n.tau,
            });
        }
    }

    // Crossing of E_m, interpolated on the sampled energy decay.
    let tau_cross = energy_crossing(traj, problem.e_m);
    let tau_end = traj.samples.last().map_or(0.0, |s| s.tau);
    let (l_high, l_low) = match tau_cross {
        Some(tc) => (tc.max(0.0), (tau_end - tc).max(0.0)),
        None => (tau_end.max(0.0), 0.0),
    };

    // Tail fit on extrema with E < E_m.
    let tail: Vec<_> = events.iter().filter(|e| e.e < problem.e_m).collect();
    let tail_spacing = if tail.len() >= 2 {
        (tail.last().unwrap().tau - tail[0].tau) / (tail.len() - 1) as f64
    } else {
        0.0
    };
    let (decay_rate, low_confidence) = fit_decay_rate(problem, traj, &tail);

    OscillationReport {
        cycles,
        l_high,
        l_low,
        decay_rate,
        tail_spacing,
        c: problem.c,
        low_confidence_decay: low_confidence,
    }
}

fn energy_crossing(traj: &Trajectory, e_m: f64) -> Option<f64> {
    let samples = &traj.samples;
    let idx = samples.iter().position(|s| s.e < e_m)?;
    if idx == 0 {
        return Some(samples[0].tau);
    }
    let (a, b) = (&samples[idx - 1], &samples[idx]);
    let t = (a.e - e_m) / (a.e - b.e);
    Some(a.tau + t * (b.tau - a.tau))
}

fn fit_decay_rate(
    problem: &ProfileProblem,
    traj: &Trajectory,
    tail: &[&crate::integrate::ExtremumEvent],
) -> (f64, bool) {
    let amp = |u: f64| (u - problem.u_plus).abs();
    if tail.len() >= 2 {
        let xs: Vec<f64> = tail.iter().map(|e| e.tau).collect();
        let ys: Vec<f64> = tail.iter().map(|e| amp(e.u).max(1e-300).ln()).collect();
        if let Ok((slope, _, _)) = linear_fit(&xs, &ys) {
            return (-slope, tail.len() < 6);
        }
    }
    // Monotone (node-regime) tail: fit on samples instead of extrema.
    let floor = 1e-12 * (problem.u_plus - problem.u_minus).abs();
    let pts: Vec<(f64, f64)> = traj
        .samples
        .iter()
        .filter(|s| s.e < problem.e_m && amp(s.u) > floor)
        .map(|s| (s.tau, amp(s.u).ln()))
        .collect();
    if pts.len() >= 2 {
        let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
        let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
        if let Ok((slope, _, _)) = linear_fit(&xs, &ys) {
            return (-slope, true);
        }
    }
    (0.0, true)
}

/// Period of the closed c = 0 orbit at energy E by singularity-free
/// quadrature: T(E) = 2 Int du / sqrt(2(E - Phi)), with the square-root
/// endpoint singularities removed by u = mid + half*sin(theta).
pub fn period(problem: &ProfileProblem, energy: f64) -> Result<f64> {
    if !(energy > 0.0) || !(energy < problem.e_max) {
        return Err(Error::Domain(format!(
            "period needs 0 < E < E_max, got E={energy}, E_max={}",
            problem.e_max
        )));
    }
    let (u1, u2) = turning_points(problem, energy)?;
    let mid = 0.5 * (u1 + u2);
    let half = 0.5 * (u2 - u1);
    let phi1 = problem.phi(u1);
    let phi2 = problem.phi(u2);
    if !(phi1 < 0.0) || !(phi2 > 0.0) {
        return Err(Error::TurningPoint(format!(
            "degenerate turning points: phi(u1)={phi1}, phi(u2)={phi2}"
        )));
    }
    // E - Phi cancels to rounding noise inside a sliver at each turning
    // point; clamping to the f64 noise floor keeps the substituted integrand
    // bounded there instead of amplifying jitter.
    let noise_floor = 32.0 * f64::EPSILON * (energy.abs() + problem.e_max.abs());
    let integrand = |theta: f64| -> f64 {
        let u = mid + half * theta.sin();
        let rest = energy - problem.potential(u);
        if rest <= noise_floor {
            let cos = theta.cos();
            // endpoint limit sqrt(half/|phi|) at the exact ends, clamped value
            // inside the noise sliver
            if cos * cos * half * half <= 2.0 * noise_floor {
                return if theta > 0.0 {
                    (half / phi2).sqrt()
                } else {
                    (half / (-phi1)).sqrt()
                };
            }
            return half * cos / (2.0 * noise_floor).sqrt();
        }
        half * theta.cos() / (2.0 * rest).sqrt()
    };
    Ok(2.0 * adaptive_simpson(&integrand, -FRAC_PI_2, FRAC_PI_2, 1e-8))
}

/// Turning points u1 < u2 of the level set Phi = E around u_plus.
pub fn turning_points(problem: &ProfileProblem, energy: f64) -> Result<(f64, f64)> {
    let g = |u: f64| problem.potential(u) - energy;
    let near = bisect(
        g,
        problem.u_minus,
        problem.u_plus,
        1e-15 * problem.u_scale().max(1.0),
    )
    .map_err(|e| Error::TurningPoint(format!("near-side turning point: {e}")))?;
    let far = bisect(
        g,
        problem.u_plus,
        problem.u_s,
        1e-15 * problem.u_scale().max(1.0),
    )
    .map_err(|e| Error::TurningPoint(format!("far-side turning point: {e}")))?;
    Ok(if near < far { (near, far) } else { (far, near) })
}

/// Measure the period of the c = 0 orbit through (u_start, 0) by integrating
/// until the orbit returns: tau of the second w = 0 event. Returns
/// (period, return_position_error).
pub fn period_by_integration(
    problem: &ProfileProblem,
    energy: f64,
    rtol: f64,
) -> Result<(f64, f64)> {
    let hamiltonian = problem.with_friction(0.0);
    let (u1, _u2) = turning_points(&hamiltonian, energy)?;
    let start = PhasePoint::new(&hamiltonian, 0.0, u1, 0.0);
    let t_quad = period(problem, energy)?;
    let opts = IntegrateOptions {
        rtol,
        atol: 1e-12 * hamiltonian.u_scale().max(1.0),
        tau_max: 3.0 * t_quad + 10.0,
        e_stop: Some(0.0),
        max_events: Some(2),
        h0: None,
    };
    let traj = integrate_with(&hamiltonian, start, &opts)?;
    if traj.events.len() < 2 {
        return Err(Error::Nonconvergence {
            tau: traj.last().tau,
            energy,
        });
    }
    let t_ode = traj.events[1].tau;
    let return_error = (traj.events[1].u - u1).abs();
    Ok((t_ode, return_error))
}

/// Least-squares slope of log(L_high + L_low) against log(c).
/// Requires >= 4 reports spanning close to a decade of c (ratio >= 8).
pub fn fit_length_scaling(reports: &[OscillationReport]) -> Result<(f64, f64, f64)> {
    if reports.len() < 4 {
        return Err(Error::InsufficientData(format!(
            "length-scaling fit needs >= 4 reports, got {}",
            reports.len()
        )));
    }
    let cs: Vec<f64> = reports.iter().map(|r| r.c).collect();
    let c_min = cs.iter().cloned().fold(f64::INFINITY, f64::min);
    let c_max = cs.iter().cloned().fold(0.0_f64, f64::max);
    if !(c_min > 0.0) || c_max / c_min < 8.0 {
        return Err(Error::InsufficientData(format!(
            "c range [{c_min}, {c_max}] spans less than a decade"
        )));
    }
    let mut xs = Vec::with_capacity(reports.len());
    let mut ys = Vec::with_capacity(reports.len());
    for r in reports {
        let total = r.l_high + r.l_low;
        if !(total > 0.0) {
            return Err(Error::InsufficientData(format!(
                "non-positive oscillation length at c={}",
                r.c
            )));
        }
        xs.push(r.c.ln());
        ys.push(total.ln());
    }
    linear_fit(&xs, &ys)
}
