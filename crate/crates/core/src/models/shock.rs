//! Shock construction: Rankine-Hugoniot solves, admissibility verdicts.

use super::potential::ReducedForm;
use super::problem::{locate_far_level, phi_sign_violation};
use super::stress::StressLaw;
use crate::error::{Error, Result};

/// Characteristic family of the shock: 1-shocks move backward (s < 0),
/// 2-shocks forward (s > 0).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShockFamily {
    One,
    Two,
}

impl ShockFamily {
    pub fn index(self) -> u8 {
        match self {
            ShockFamily::One => 1,
            ShockFamily::Two => 2,
        }
    }

    pub fn from_index(i: u8) -> Result<Self> {
        match i {
            1 => Ok(ShockFamily::One),
            2 => Ok(ShockFamily::Two),
            _ => Err(Error::Domain(format!(
                "shock family must be 1 or 2, got {i}"
            ))),
        }
    }
}

/// Admissibility verdicts attached to a shock at construction time.
#[derive(Debug, Clone, Copy)]
pub struct Verdicts {
    /// Strict Lax inequalities at both end states.
    pub lax: bool,
    /// Wendroff E-condition (weak chord inequalities) on a dense grid.
    pub wendroff: bool,
    /// Strengthened conditions H_sE and H_oE (strict chord sign between the
    /// states and opposite sign out to u_s).
    pub strengthened: bool,
}

/// End states, speed and verdicts of one shock. The meaning of the primary
/// pair (u_minus, u_plus) is per family: strain for elasticity, density for
/// QHD, horizontal velocity for the Boussinesq bore. The secondary pair
/// (v_minus, v_plus) holds the conjugate field (velocity, fluid velocity,
/// surface elevation).
#[derive(Debug, Clone)]
pub struct ShockData {
    pub u_minus: f64,
    pub u_plus: f64,
    pub v_minus: f64,
    pub v_plus: f64,
    pub s: f64,
    pub family: ShockFamily,
    /// QHD mass flux rho (u - s), signed; None for the other families.
    pub m: Option<f64>,
    pub verdicts: Verdicts,
}

fn strengthened_verdict(form: &ReducedForm, u_minus: f64, u_plus: f64) -> bool {
    let offset = form.potential_raw(u_plus);
    let e_max = form.potential_raw(u_minus) - offset;
    if !(e_max > 0.0) {
        return false;
    }
    let Ok((u_s, _)) = locate_far_level(form, u_minus, u_plus, e_max) else {
        return false;
    };
    let increasing = u_minus < u_plus;
    phi_sign_violation(form, u_minus, u_plus, increasing, 10_000).is_none()
        && phi_sign_violation(form, u_plus, u_s, !increasing, 10_000).is_none()
}

/// Weak Wendroff check in phi form: between the states phi keeps the H_sE
/// sign up to equality (tolerance 1e-12 of the phi scale).
fn wendroff_verdict(form: &ReducedForm, u_minus: f64, u_plus: f64) -> bool {
    let increasing = u_minus < u_plus;
    let n = 10_000;
    let (lo, hi) = if u_minus < u_plus {
        (u_minus, u_plus)
    } else {
        (u_plus, u_minus)
    };
    let mut max_abs = f64::MIN_POSITIVE;
    let mut worst = 0.0_f64;
    for k in 1..=n {
        let u = lo + (hi - lo) * k as f64 / (n + 1) as f64;
        let p = form.phi(u);
        max_abs = max_abs.max(p.abs());
        let violation = if increasing { p } else { -p };
        worst = worst.max(violation);
    }
    worst <= 1e-12 * max_abs
}

/// Solve the elasticity Rankine-Hugoniot conditions for the shock speed
/// s^2 = (sigma(u_plus) - sigma(u_minus)) / (u_plus - u_minus), fix v_minus = 0
/// and fill v_plus from the first jump condition.
pub fn shock_speed(
    stress: &StressLaw,
    u_minus: f64,
    u_plus: f64,
    family: ShockFamily,
) -> Result<ShockData> {
    if u_minus == u_plus {
        return Err(Error::Domain("equal end states carry no jump".into()));
    }
    for u in [u_minus, u_plus] {
        if !stress.contains(u) {
            return Err(Error::Domain(format!(
                "end state u={u} outside the stress domain {:?}",
                stress.domain()
            )));
        }
    }
    stress.check_monotone(u_minus.min(u_plus), u_minus.max(u_plus))?;
    let slope = (stress.sigma(u_plus) - stress.sigma(u_minus)) / (u_plus - u_minus);
    if !(slope > 0.0) {
        return Err(Error::Domain(format!(
            "chord slope {slope} admits no real shock speed"
        )));
    }
    let s = match family {
        ShockFamily::Two => slope.sqrt(),
        ShockFamily::One => -slope.sqrt(),
    };
    let v_minus = 0.0;
    let v_plus = v_minus - s * (u_plus - u_minus);

    let s2 = s * s;
    let (d_minus, d_plus) = (stress.dsigma(u_minus), stress.dsigma(u_plus));
    let tol = 1e-12 * s2.max(d_minus).max(d_plus);
    let lax = match family {
        ShockFamily::Two => d_plus + tol < s2 && s2 + tol < d_minus,
        ShockFamily::One => d_minus + tol < s2 && s2 + tol < d_plus,
    };

    // Strengthened + Wendroff verdicts via the canonical reduced form
    // (1-shocks are checked through the state-swapped problem).
    let (cu_minus, cu_plus, cs) = match family {
        ShockFamily::Two => (u_minus, u_plus, s),
        ShockFamily::One => (u_plus, u_minus, -s),
    };
    let form = ReducedForm::elasticity(*stress, cu_minus, cs);
    let strengthened = strengthened_verdict(&form, cu_minus, cu_plus);
    let wendroff = wendroff_verdict(&form, cu_minus, cu_plus);

    Ok(ShockData {
        u_minus,
        u_plus,
        v_minus,
        v_plus,
        s,
        family,
        m: None,
        verdicts: Verdicts {
            lax,
            wendroff,
            strengthened,
        },
    })
}

/// Solve the gas-dynamics jump conditions for the mass flux
/// m^2 = -(p_plus - p_minus) / (1/rho_plus - 1/rho_minus), p = rho^gamma,
/// with the sign convention m < 0 for 2-shocks and m > 0 for 1-shocks.
/// States are expressed in the frame where the downstream fluid velocity
/// vanishes (u_plus = 0).
pub fn qhd_mass_flux(
    gamma: f64,
    rho_minus: f64,
    rho_plus: f64,
    family: ShockFamily,
) -> Result<ShockData> {
    if !(gamma >= 1.0) {
        return Err(Error::Domain(format!("gamma = {gamma} must be >= 1")));
    }
    if !(rho_minus > 0.0) || !(rho_plus > 0.0) {
        return Err(Error::Domain("densities must be positive".into()));
    }
    if rho_minus == rho_plus {
        return Err(Error::Domain("equal end states carry no jump".into()));
    }
    match family {
        ShockFamily::Two if rho_plus >= rho_minus => {
            return Err(Error::Admissibility(format!(
                "a 2-shock requires rho_plus < rho_minus, got {rho_plus} >= {rho_minus}"
            )));
        }
        ShockFamily::One if rho_plus <= rho_minus => {
            return Err(Error::Admissibility(format!(
                "a 1-shock requires rho_plus > rho_minus, got {rho_plus} <= {rho_minus}"
            )));
        }
        _ => {}
    }
    let p_minus = rho_minus.powf(gamma);
    let p_plus = rho_plus.powf(gamma);
    let m2 = -(p_plus - p_minus) / (1.0 / rho_plus - 1.0 / rho_minus);
    if !(m2 > 0.0) {
        return Err(Error::Domain(format!("m^2 = {m2} is not positive")));
    }
    let m = match family {
        ShockFamily::Two => -m2.sqrt(),
        ShockFamily::One => m2.sqrt(),
    };
    let s = -m / rho_plus; // Galilean frame with u_plus = 0
    let v_plus = 0.0;
    let v_minus = s + m / rho_minus;

    // Lax condition in terms of the acoustic impedance rho^2 p'(rho).
    let a_minus = gamma * rho_minus.powf(gamma + 1.0);
    let a_plus = gamma * rho_plus.powf(gamma + 1.0);
    let tol = 1e-12 * a_minus.max(a_plus).max(m2);
    let lax = match family {
        ShockFamily::Two => a_plus + tol < m2 && m2 + tol < a_minus,
        ShockFamily::One => a_minus + tol < m2 && m2 + tol < a_plus,
    };

    let (x_minus, x_plus, rho_anchor) = match family {
        ShockFamily::Two => (rho_minus.ln(), rho_plus.ln(), rho_minus),
        ShockFamily::One => (rho_plus.ln(), rho_minus.ln(), rho_plus),
    };
    let form = ReducedForm::qhd(gamma, m2, rho_anchor);
    let strengthened = strengthened_verdict(&form, x_minus, x_plus);
    let wendroff = wendroff_verdict(&form, x_minus, x_plus);

    Ok(ShockData {
        u_minus: rho_minus,
        u_plus: rho_plus,
        v_minus,
        v_plus,
        s,
        family,
        m: Some(m),
        verdicts: Verdicts {
            lax,
            wendroff,
            strengthened,
        },
    })
}

/// Closed-form Boussinesq end state behind a bore of speed s > 1:
/// u_plus = (3s - sqrt(s^2 + 8))/2, eta_plus = u_plus/(u_plus - s), and the
/// curvature alpha(s) = (s - sqrt(s^2+8))/2 + 4s/(s - sqrt(s^2+8))^2.
pub fn boussinesq_endstate(s: f64) -> Result<(f64, f64, f64)> {
    if !(s > 1.0) {
        return Err(Error::Domain(format!(
            "Boussinesq bore speed must exceed 1, got {s}"
        )));
    }
    let root = (s * s + 8.0).sqrt();
    let u_plus = 0.5 * (3.0 * s - root);
    let eta_plus = u_plus / (u_plus - s);
    let half = 0.5 * (s - root);
    let alpha = half + 4.0 * s / ((s - root) * (s - root));
    Ok((u_plus, eta_plus, alpha))
}

impl ShockData {
    /// Shock data implied by a Boussinesq bore speed: states (0, 0) ahead and
    /// (u_plus, eta_plus) behind.
    pub fn boussinesq(s: f64) -> Result<ShockData> {
        let (u_plus, eta_plus, alpha) = boussinesq_endstate(s)?;
        let form = ReducedForm::Boussinesq { s };
        let lax = form.dphi(0.0) < 0.0 && alpha > 0.0;
        let strengthened = strengthened_verdict(&form, 0.0, u_plus);
        let wendroff = wendroff_verdict(&form, 0.0, u_plus);
        Ok(ShockData {
            u_minus: 0.0,
            u_plus,
            v_minus: 0.0,
            v_plus: eta_plus,
            s,
            family: ShockFamily::Two,
            m: None,
            verdicts: Verdicts {
                lax,
                wendroff,
                strengthened,
            },
        })
    }

    /// Rankine-Hugoniot residual of the elasticity jump conditions, scaled.
    pub fn rh_residual(&self, stress: &StressLaw) -> f64 {
        let du = self.u_plus - self.u_minus;
        let dv = self.v_plus - self.v_minus;
        let dsig = stress.sigma(self.u_plus) - stress.sigma(self.u_minus);
        let scale = (self.s * du).abs().max(dsig.abs()).max(f64::MIN_POSITIVE);
        ((-self.s * du - dv).abs()).max((-self.s * dv - dsig).abs()) / scale
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    #[test]
    fn linear_stress_gives_contact_discontinuity() {
        let law = StressLaw::power(1.0).unwrap();
        let shock = shock_speed(&law, 0.0, 1.0, ShockFamily::Two).unwrap();
        assert_eq!(shock.s, 1.0);
        assert!(
            !shock.verdicts.lax,
            "equalities force the Lax verdict false"
        );
        assert!(
            shock.verdicts.wendroff,
            "weak chord conditions hold with equality"
        );
        assert!(shock.rh_residual(&law) <= 1e-12);
    }

    #[test]
    fn fig3_two_shock_speed() {
        let law = StressLaw::sqrt();
        let shock = shock_speed(&law, 4.0, 5.0, ShockFamily::Two).unwrap();
        let s2_exact = 5f64.sqrt() - 2.0;
        assert!((shock.s * shock.s - s2_exact).abs() <= 1e-15);
        assert!((shock.s - s2_exact.sqrt()).abs() <= 1e-15);
        assert!((shock.s - 0.485_868_3).abs() < 5e-8);
        assert!(shock.verdicts.lax && shock.verdicts.wendroff && shock.verdicts.strengthened);
        // v filled from v_minus = 0 through the first jump condition
        assert!((shock.v_plus - (-shock.s)).abs() <= 1e-15);
        assert!(shock.rh_residual(&law) <= 1e-12);
    }

    #[test]
    fn one_shock_flips_the_sign_only() {
        let law = StressLaw::sqrt();
        let shock = shock_speed(&law, 5.0, 4.0, ShockFamily::One).unwrap();
        assert!((shock.s + (5f64.sqrt() - 2.0).sqrt()).abs() <= 1e-15);
        assert!(shock.verdicts.lax);
        assert!(shock.rh_residual(&law) <= 1e-12);
    }

    #[test]
    fn degenerate_and_out_of_domain_states_rejected() {
        let law = StressLaw::sqrt();
        assert!(matches!(
            shock_speed(&law, 4.0, 4.0, ShockFamily::Two),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            shock_speed(&law, -1.0, 4.0, ShockFamily::Two),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn chord_crossing_cubic_fails_strengthened_while_rh_holds() {
        // sigma = u^3 + 2u between -1 and 1.2: phi = -(u+1)(u-1.2)(u+0.2)
        // changes sign inside the bracket.
        let law = StressLaw::cubic(2.0).unwrap();
        let shock = shock_speed(&law, -1.0, 1.2, ShockFamily::Two).unwrap();
        assert!(shock.rh_residual(&law) <= 1e-12, "RH holds by construction");
        assert!(!shock.verdicts.strengthened, "H_sE must fail");
        assert!(!shock.verdicts.wendroff);
    }

    #[test]
    fn qhd_fig4_mass_flux() {
        let shock = qhd_mass_flux(1.4, 1.5, 1.0, ShockFamily::Two).unwrap();
        let m = shock.m.unwrap();
        // Exact jump-condition value (the published 7-digit figure -1.5140443
        // rounds the same formula).
        let m2_exact = 3.0 * (1.5f64.powf(1.4) - 1.0);
        assert!((m * m - m2_exact).abs() <= 1e-15 * m2_exact);
        assert!((m - (-1.514_052_707_6)).abs() < 1e-9);
        assert!((m + 1.514_044_3).abs() < 1e-5);
        assert!(shock.verdicts.lax, "1.4 < m^2 < 3.70464");
        let a_plus = 1.4;
        let a_minus = 1.4 * 1.5f64.powf(2.4);
        assert!(a_plus < m * m && m * m < a_minus);
        assert!((a_minus - 3.704_64).abs() < 1e-4);
        // Galilean frame: u_plus = 0, m = rho (u - s) at both states
        assert!((shock.u_minus * (shock.v_minus - shock.s) - m).abs() <= 1e-14);
        assert!((shock.u_plus * (shock.v_plus - shock.s) - m).abs() <= 1e-14);
    }

    #[test]
    fn qhd_rejects_equal_states_and_wrong_ordering() {
        assert!(matches!(
            qhd_mass_flux(2.0, 1.0, 1.0, ShockFamily::Two),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            qhd_mass_flux(1.4, 1.0, 1.5, ShockFamily::Two),
            Err(Error::Admissibility(_))
        ));
        assert!(matches!(
            qhd_mass_flux(1.4, 1.5, 1.0, ShockFamily::One),
            Err(Error::Admissibility(_))
        ));
    }

    #[test]
    fn qhd_isothermal_closed_form() {
        // gamma = 1, rho_minus = e, rho_plus = 1: m^2 = e exactly.
        let e = std::f64::consts::E;
        let shock = qhd_mass_flux(1.0, e, 1.0, ShockFamily::Two).unwrap();
        let m = shock.m.unwrap();
        assert!((m * m - e).abs() <= 4.0 * f64::EPSILON * e);
        assert!((m + e.sqrt()).abs() <= 4.0 * f64::EPSILON);
    }

    #[test]
    fn boussinesq_endstate_closed_forms() {
        let (u_plus, eta_plus, alpha) = boussinesq_endstate(2.0).unwrap();
        assert!((u_plus - (3.0 - 3f64.sqrt())).abs() <= 1e-15);
        assert!((alpha - 3.0).abs() <= 1e-12, "alpha(2) = 3 exactly");
        assert!((eta_plus + 3f64.sqrt()).abs() <= 1e-12);
        assert!(u_plus < 2.0);
        // sonic limit: u_plus -> 0 as s -> 1+
        let (u_small, _, _) = boussinesq_endstate(1.0 + 1e-9).unwrap();
        assert!(u_small.abs() < 1e-8);
        assert!(matches!(boussinesq_endstate(1.0), Err(Error::Domain(_))));
        assert!(matches!(boussinesq_endstate(0.5), Err(Error::Domain(_))));
    }

    #[test]
    fn boussinesq_shock_data_verdicts() {
        let shock = ShockData::boussinesq(2.0).unwrap();
        assert!(shock.verdicts.lax && shock.verdicts.strengthened && shock.verdicts.wendroff);
        assert_eq!(shock.u_minus, 0.0);
        assert!((shock.v_plus + 3f64.sqrt()).abs() <= 1e-12);
    }
}
