//! Model families, shock data, and the reduction to the planar
//! Hamiltonian-with-friction problem.

pub mod admissibility;
pub mod potential;
pub mod problem;
pub mod shock;
pub mod stress;

pub use admissibility::{validate_admissibility, HypothesisReport};
pub use potential::{qhd_phi_rho_form, ReducedForm};
pub use problem::{
    build_profile_problem, critical_friction, eval_potential, find_u_s, Orientation,
    PhysicalContext, ProfileProblem,
};
pub use shock::{
    boussinesq_endstate, qhd_mass_flux, shock_speed, ShockData, ShockFamily, Verdicts,
};
pub use stress::StressLaw;

use crate::error::{Error, Result};

/// The three diffusive-dispersive systems whose traveling waves reduce to the
/// same planar problem.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelFamily {
    /// Elasticity (p-system) with viscosity and strain-gradient dispersion.
    Elasticity(StressLaw),
    /// Quantum hydrodynamics with artificial viscosity, pressure rho^gamma.
    Qhd { gamma: f64 },
    /// Dissipative Peregrine-Boussinesq bore of speed > 1.
    Boussinesq { speed: f64 },
}

impl ModelFamily {
    pub fn validate(&self) -> Result<()> {
        match self {
            ModelFamily::Elasticity(_) => Ok(()),
            ModelFamily::Qhd { gamma } => {
                if *gamma >= 1.0 {
                    Ok(())
                } else {
                    Err(Error::Domain(format!("QHD gamma = {gamma} must be >= 1")))
                }
            }
            ModelFamily::Boussinesq { speed } => {
                if *speed > 1.0 {
                    Ok(())
                } else {
                    Err(Error::Domain(format!(
                        "Boussinesq speed = {speed} must exceed 1"
                    )))
                }
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ModelFamily::Elasticity(_) => "elasticity",
            ModelFamily::Qhd { .. } => "qhd",
            ModelFamily::Boussinesq { .. } => "boussinesq",
        }
    }
}
