//! Report-only admissibility and hypothesis validation.

use super::potential::ReducedForm;
use super::problem::{phi_sign_violation, ProfileProblem};
use super::shock::ShockData;
use super::ModelFamily;

/// Verdicts for every admissibility condition and structural hypothesis.
/// Failures are verdicts, never errors.
#[derive(Debug, Clone)]
pub struct HypothesisReport {
    /// Strict Lax inequalities (H_L).
    pub lax: bool,
    /// Weak chord condition (Wendroff E-condition).
    pub wendroff: bool,
    /// Strict chord sign between the states (H_sE).
    pub h_se: bool,
    /// Opposite strict sign on the far interval (u_plus, u_s) (H_oE).
    pub h_oe: bool,
    /// u_minus, u_plus only roots; 0 < Phi < E_max strictly inside.
    pub h_phi0: bool,
    pub h_phi1: bool,
    pub h_phi2: bool,
    /// phi'(u_minus) < 0 < phi'(u_plus).
    pub h_phi3: bool,
    /// Genuine-nonlinearity sufficient condition, when the family has one.
    pub h_gn: Option<bool>,
    /// (rho^2 p')' > 0 for the QHD pressure.
    pub qhd_gn: Option<bool>,
    /// Distance from a contact discontinuity at each end state:
    /// (phi'(u_plus), -phi'(u_minus)); both positive for Lax shocks.
    pub lax_margins: (f64, f64),
}

impl HypothesisReport {
    /// True when every hypothesis required by the oscillation analysis holds.
    pub fn admissible(&self) -> bool {
        self.lax
            && self.h_se
            && self.h_oe
            && self.h_phi0
            && self.h_phi1
            && self.h_phi2
            && self.h_phi3
    }

    /// Name of the first failing condition, for diagnostics.
    pub fn first_failure(&self) -> Option<&'static str> {
        [
            (self.lax, "H_L"),
            (self.h_se, "H_sE"),
            (self.h_oe, "H_oE"),
            (self.h_phi0, "H_phi0"),
            (self.h_phi1, "H_phi1"),
            (self.h_phi2, "H_phi2"),
            (self.h_phi3, "H_phi3"),
        ]
        .into_iter()
        .find(|(ok, _)| !ok)
        .map(|(_, name)| name)
    }
}

/// Run every check on a constructed problem. Sampling uses a 1e4-point grid;
/// a condition fails only when a strict sign violation exceeds 1e-12 of the
/// sampled scale, so the double roots at the end states cannot produce
/// spurious failures.
pub fn validate_admissibility(
    model: &ModelFamily,
    shock: &ShockData,
    problem: &ProfileProblem,
) -> HypothesisReport {
    let form = &problem.form;
    let (u_minus, u_plus, u_s) = (problem.u_minus, problem.u_plus, problem.u_s);
    let increasing = u_minus < u_plus;

    let h_se = phi_sign_violation(form, u_minus, u_plus, increasing, 10_000).is_none();
    let h_oe = phi_sign_violation(form, u_plus, u_s, !increasing, 10_000).is_none();
    let d_minus = form.dphi(u_minus);
    let d_plus = form.dphi(u_plus);
    let h_phi3 = d_minus < 0.0 && d_plus > 0.0;
    let h_phi0 = h_se && h_oe && potential_bounds_ok(form, problem);

    let h_gn = match model {
        ModelFamily::Elasticity(stress) => {
            let (lo, hi) = (
                shock.u_minus.min(shock.u_plus),
                shock.u_minus.max(shock.u_plus),
            );
            let n = 1024;
            let mut sign = 0.0_f64;
            let mut single_signed = true;
            for k in 0..=n {
                let u = lo + (hi - lo) * k as f64 / n as f64;
                let s2 = stress.d2sigma(u);
                if s2 == 0.0 {
                    single_signed = false;
                    break;
                }
                if sign == 0.0 {
                    sign = s2.signum();
                } else if s2.signum() != sign {
                    single_signed = false;
                    break;
                }
            }
            // Concave stress pairs with u_minus < u_plus, convex with the
            // mirrored ordering; either way the chord conditions follow.
            let ordering_matches = if sign < 0.0 {
                shock.u_minus < shock.u_plus
            } else {
                shock.u_minus > shock.u_plus
            };
            Some(single_signed && shock.verdicts.lax && ordering_matches)
        }
        _ => None,
    };

    let qhd_gn = match model {
        ModelFamily::Qhd { gamma } => {
            // (rho^2 p')' = gamma (gamma + 1) rho^gamma, sampled on the jump.
            let (lo, hi) = (
                shock.u_minus.min(shock.u_plus),
                shock.u_minus.max(shock.u_plus),
            );
            let n = 1024;
            let ok = (0..=n).all(|k| {
                let rho: f64 = lo + (hi - lo) * k as f64 / n as f64;
                gamma * (gamma + 1.0) * rho.powf(*gamma) > 0.0
            });
            Some(ok)
        }
        _ => None,
    };

    HypothesisReport {
        lax: shock.verdicts.lax,
        wendroff: shock.verdicts.wendroff,
        h_se,
        h_oe,
        h_phi0,
        h_phi1: h_se,
        h_phi2: h_oe,
        h_phi3,
        h_gn,
        qhd_gn,
        lax_margins: (d_plus, -d_minus),
    }
}

fn potential_bounds_ok(form: &ReducedForm, problem: &ProfileProblem) -> bool {
    let (lo, hi) = if problem.u_minus < problem.u_s {
        (problem.u_minus, problem.u_s)
    } else {
        (problem.u_s, problem.u_minus)
    };
    let n = 10_000;
    let tol = 1e-9 * problem.e_max;
    let margin = 0.02 * (hi - lo);
    (1..n).all(|k| {
        let u = lo + (hi - lo) * k as f64 / n as f64;
        if (u - problem.u_minus).abs() < margin
            || (u - problem.u_plus).abs() < margin
            || (u - problem.u_s).abs() < margin
        {
            return true;
        }
        let val = form.potential_raw(u) - form.potential_raw(problem.u_plus);
        val >= -tol && val <= problem.e_max + tol
    })
}
