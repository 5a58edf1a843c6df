//! The reduced scalar field of each model family.
//!
//! Every model collapses to the planar problem u'' + gamma_f*c*u' + phi(u) = 0.
//! `ReducedForm` is the closed-form evaluator triple (phi, phi', raw potential)
//! in the reduced variable: strain for elasticity, x = ln(rho) for quantum
//! hydrodynamics, horizontal velocity for the Boussinesq bore.

use super::stress::StressLaw;

/// Relative margin kept below the Boussinesq pole at u = s.
pub const BOUSSINESQ_POLE_MARGIN: f64 = 1e-9;

#[derive(Debug, Clone, Copy)]
pub enum ReducedForm {
    /// phi(u) = -(sigma(u) - sigma(u_minus) - s^2 (u - u_minus)).
    Elasticity {
        stress: StressLaw,
        u_minus: f64,
        sigma_minus: f64,
        s2: f64,
    },
    /// psi(x) = 2 w (sigma_w(w) - sigma_w(w_minus) - m^2 (w - w_minus)),
    /// w = e^{-x}, sigma_w(w) = -p(1/w), p(rho) = rho^gamma.
    Qhd { gamma: f64, m2: f64, w_minus: f64 },
    /// phi(u) = -s u + u/(s - u) + u^2/2, pole at u = s.
    Boussinesq { s: f64 },
    /// phi(u) = k (u - center); synthetic test potential.
    Harmonic { center: f64, stiffness: f64 },
}

impl ReducedForm {
    pub fn elasticity(stress: StressLaw, u_minus: f64, s: f64) -> Self {
        ReducedForm::Elasticity {
            stress,
            u_minus,
            sigma_minus: stress.sigma(u_minus),
            s2: s * s,
        }
    }

    pub fn qhd(gamma: f64, m2: f64, rho_minus: f64) -> Self {
        ReducedForm::Qhd {
            gamma,
            m2,
            w_minus: 1.0 / rho_minus,
        }
    }

    pub fn phi(&self, u: f64) -> f64 {
        match *self {
            ReducedForm::Elasticity {
                stress,
                u_minus,
                sigma_minus,
                s2,
            } => -(stress.sigma(u) - sigma_minus - s2 * (u - u_minus)),
            ReducedForm::Qhd { gamma, m2, w_minus } => {
                let w = (-u).exp();
                2.0 * w * (sigma_w(w, gamma) - sigma_w(w_minus, gamma) - m2 * (w - w_minus))
            }
            ReducedForm::Boussinesq { s } => -s * u + u / (s - u) + 0.5 * u * u,
            ReducedForm::Harmonic { center, stiffness } => stiffness * (u - center),
        }
    }

    pub fn dphi(&self, u: f64) -> f64 {
        match *self {
            ReducedForm::Elasticity { stress, s2, .. } => -(stress.dsigma(u) - s2),
            ReducedForm::Qhd { gamma, m2, w_minus } => {
                let w = (-u).exp();
                let f = 2.0 * (sigma_w(w, gamma) - sigma_w(w_minus, gamma) - m2 * (w - w_minus));
                let df = f + 2.0 * w * (dsigma_w(w, gamma) - m2);
                -w * df
            }
            ReducedForm::Boussinesq { s } => {
                let d = s - u;
                -s + s / (d * d) + u
            }
            ReducedForm::Harmonic { stiffness, .. } => stiffness,
        }
    }

    /// Antiderivative of phi; normalisation is applied by the caller.
    pub fn potential_raw(&self, u: f64) -> f64 {
        match *self {
            ReducedForm::Elasticity {
                stress,
                u_minus,
                sigma_minus,
                s2,
            } => {
                -(stress.sigma_antiderivative(u)
                    - sigma_minus * u
                    - s2 * (0.5 * u * u - u_minus * u))
            }
            ReducedForm::Qhd { gamma, m2, w_minus } => {
                let w = (-u).exp();
                let dw = w - w_minus;
                -2.0 * (sigma_w_antiderivative(w, gamma)
                    - sigma_w_antiderivative(w_minus, gamma)
                    - sigma_w(w_minus, gamma) * dw
                    - 0.5 * m2 * dw * dw)
            }
            ReducedForm::Boussinesq { s } => {
                u * u * u / 6.0 - 0.5 * s * u * u - u + s * (s / (s - u)).ln()
            }
            ReducedForm::Harmonic { center, stiffness } => {
                0.5 * stiffness * (u - center) * (u - center)
            }
        }
    }

    /// Pole of the evaluators in the reduced variable, when one exists.
    pub fn pole(&self) -> Option<f64> {
        match *self {
            ReducedForm::Boussinesq { s } => Some(s),
            _ => None,
        }
    }

    /// Largest admissible reduced value on the far side before a pole.
    pub fn far_cap(&self, direction: f64) -> f64 {
        match (self.pole(), direction > 0.0) {
            (Some(s), true) => s * (1.0 - BOUSSINESQ_POLE_MARGIN),
            _ => direction * f64::INFINITY,
        }
    }

    /// Domain check in the reduced variable.
    pub fn admits(&self, u: f64) -> bool {
        match *self {
            ReducedForm::Elasticity { stress, .. } => stress.contains(u),
            ReducedForm::Qhd { .. } => u.is_finite(),
            ReducedForm::Boussinesq { s } => u < s * (1.0 - BOUSSINESQ_POLE_MARGIN),
            ReducedForm::Harmonic { .. } => u.is_finite(),
        }
    }
}

/// QHD-specific evaluators for the equivalent rho-side form of psi, used to
/// cross-check the w-side form above.
pub fn qhd_phi_rho_form(gamma: f64, m2: f64, rho_minus: f64, x: f64) -> f64 {
    let rho = x.exp();
    let p = rho.powf(gamma);
    let p_minus = rho_minus.powf(gamma);
    -(2.0 / rho) * (p - p_minus + m2 * (1.0 / rho - 1.0 / rho_minus))
}

fn sigma_w(w: f64, gamma: f64) -> f64 {
    // sigma(w) = -p(1/w) with p(rho) = rho^gamma
    -w.powf(-gamma)
}

fn dsigma_w(w: f64, gamma: f64) -> f64 {
    gamma * w.powf(-gamma - 1.0)
}

fn sigma_w_antiderivative(w: f64, gamma: f64) -> f64 {
    if (gamma - 1.0).abs() < 1e-12 {
        -w.ln()
    } else {
        -w.powf(1.0 - gamma) / (1.0 - gamma)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig3_form() -> ReducedForm {
        // sigma = sqrt(u), u_minus = 4, u_plus = 5 two-shock
        let s2 = 5f64.sqrt() - 2.0;
        ReducedForm::elasticity(StressLaw::sqrt(), 4.0, s2.sqrt())
    }

    #[test]
    fn elasticity_phi_vanishes_at_end_states() {
        let f = fig3_form();
        assert!(f.phi(4.0).abs() < 1e-14);
        assert!(f.phi(5.0).abs() < 1e-14);
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let forms = [
            fig3_form(),
            ReducedForm::Boussinesq { s: 2.0 },
            ReducedForm::qhd(1.4, 2.292_330_3, 1.5),
        ];
        for f in forms {
            for k in 0..40 {
                let u = 0.1 + 0.02 * k as f64; // safe for all three forms
                let h = 1e-6;
                let fd = (f.phi(u + h) - f.phi(u - h)) / (2.0 * h);
                assert!(
                    (fd - f.dphi(u)).abs() <= 1e-6 * (1.0 + f.dphi(u).abs()),
                    "dphi mismatch at {u}: fd={fd} exact={}",
                    f.dphi(u)
                );
                let fdp = (f.potential_raw(u + h) - f.potential_raw(u - h)) / (2.0 * h);
                assert!(
                    (fdp - f.phi(u)).abs() <= 1e-6 * (1.0 + f.phi(u).abs()),
                    "potential derivative mismatch at {u}"
                );
            }
        }
    }

    #[test]
    fn qhd_two_forms_agree() {
        use rand::{Rng, SeedableRng};
        let (gamma, rho_minus, rho_plus): (f64, f64, f64) = (1.4, 1.5, 1.0);
        let m2 =
            -(rho_plus.powf(gamma) - rho_minus.powf(gamma)) / (1.0 / rho_plus - 1.0 / rho_minus);
        let f = ReducedForm::qhd(gamma, m2, rho_minus);
        // Scale-relative comparison: the forms share double roots at the end
        // states, where any pointwise-relative measure degenerates.
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let points: Vec<f64> = (0..100).map(|_| rng.gen_range(-0.5..0.5)).collect();
        let scale = points
            .iter()
            .map(|&x| f.phi(x).abs())
            .fold(f64::MIN_POSITIVE, f64::max);
        for &x in &points {
            let a = f.phi(x);
            let b = qhd_phi_rho_form(gamma, m2, rho_minus, x);
            assert!(
                (a - b).abs() <= 1e-12 * scale,
                "two psi forms disagree at x={x}: {a} vs {b} (scale {scale})"
            );
        }
    }

    #[test]
    fn boussinesq_closed_forms_at_s2() {
        let f = ReducedForm::Boussinesq { s: 2.0 };
        let u_plus = 3.0 - 3f64.sqrt();
        assert!(f.phi(0.0).abs() < 1e-14);
        assert!(f.phi(u_plus).abs() < 1e-13);
        // phi'(0) = -(s^2-1)/s, phi'(u_plus) = alpha(2) = 3
        assert!((f.dphi(0.0) + 1.5).abs() < 1e-14);
        assert!((f.dphi(u_plus) - 3.0).abs() < 1e-12);
        // paper-normalised potential value at the minimum
        assert!((f.potential_raw(u_plus) - f.potential_raw(0.0) + 0.525_792_7).abs() < 1e-6);
    }
}
