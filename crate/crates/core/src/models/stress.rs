//! Closed-form stress laws for the elasticity family.
//!
//! Every law carries exact evaluators for sigma, sigma', sigma'' and the
//! antiderivative of sigma, so potentials derived from them stay closed form.

use crate::error::{Error, Result};

/// A monotone stress-strain law sigma(u) with sigma'(u) > 0 on its domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StressLaw {
    /// sigma(u) = sqrt(u) on u > 0 (concave, genuinely nonlinear).
    Sqrt,
    /// sigma(u) = u^q on u > 0; q = 1 is the linear law on all of R.
    Power { exponent: f64 },
    /// sigma(u) = u^3 + a*u with a > 0 (inflection at u = 0).
    Cubic { linear: f64 },
}

impl StressLaw {
    pub fn sqrt() -> Self {
        StressLaw::Sqrt
    }

    pub fn power(exponent: f64) -> Result<Self> {
        if !(exponent > 0.0) {
            return Err(Error::Domain(format!(
                "power stress law needs a positive exponent, got {exponent}"
            )));
        }
        Ok(StressLaw::Power { exponent })
    }

    pub fn cubic(linear: f64) -> Result<Self> {
        if !(linear > 0.0) {
            return Err(Error::Domain(format!(
                "cubic stress law needs a positive linear coefficient for sigma' > 0, got {linear}"
            )));
        }
        Ok(StressLaw::Cubic { linear })
    }

    /// Open domain of validity (bounds may be infinite).
    pub fn domain(&self) -> (f64, f64) {
        match self {
            StressLaw::Sqrt => (0.0, f64::INFINITY),
            StressLaw::Power { exponent } if (*exponent - 1.0).abs() < 1e-14 => {
                (f64::NEG_INFINITY, f64::INFINITY)
            }
            StressLaw::Power { .. } => (0.0, f64::INFINITY),
            StressLaw::Cubic { .. } => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    pub fn contains(&self, u: f64) -> bool {
        let (lo, hi) = self.domain();
        // Endpoints count for laws finite there (linear law at 0 in particular).
        if lo.is_finite() {
            u >= lo && u < hi && (u > lo || self.dsigma_is_finite_at(lo))
        } else {
            u > lo && u < hi
        }
    }

    fn dsigma_is_finite_at(&self, u: f64) -> bool {
        match self {
            StressLaw::Sqrt => u > 0.0,
            StressLaw::Power { exponent } => *exponent >= 1.0 || u > 0.0,
            StressLaw::Cubic { .. } => true,
        }
    }

    pub fn sigma(&self, u: f64) -> f64 {
        match self {
            StressLaw::Sqrt => u.sqrt(),
            StressLaw::Power { exponent } => u.powf(*exponent),
            StressLaw::Cubic { linear } => u * u * u + linear * u,
        }
    }

    pub fn dsigma(&self, u: f64) -> f64 {
        match self {
            StressLaw::Sqrt => 0.5 / u.sqrt(),
            StressLaw::Power { exponent } => exponent * u.powf(exponent - 1.0),
            StressLaw::Cubic { linear } => 3.0 * u * u + linear,
        }
    }

    pub fn d2sigma(&self, u: f64) -> f64 {
        match self {
            StressLaw::Sqrt => -0.25 / (u * u.sqrt()),
            StressLaw::Power { exponent } => exponent * (exponent - 1.0) * u.powf(exponent - 2.0),
            StressLaw::Cubic { .. } => 6.0 * u,
        }
    }

    /// Antiderivative of sigma (integration constant fixed arbitrarily).
    pub fn sigma_antiderivative(&self, u: f64) -> f64 {
        match self {
            StressLaw::Sqrt => 2.0 / 3.0 * u * u.sqrt(),
            StressLaw::Power { exponent } => u.powf(exponent + 1.0) / (exponent + 1.0),
            StressLaw::Cubic { linear } => 0.25 * u.powi(4) + 0.5 * linear * u * u,
        }
    }

    /// Sample sigma' > 0 over `[lo, hi]`; the laws are chosen so this holds by
    /// construction, the sampling guards parameter mistakes.
    pub fn check_monotone(&self, lo: f64, hi: f64) -> Result<()> {
        let n = 256;
        for k in 0..=n {
            let u = lo + (hi - lo) * k as f64 / n as f64;
            if !self.contains(u) {
                return Err(Error::Domain(format!(
                    "u={u} outside the stress law domain {:?}",
                    self.domain()
                )));
            }
            let d = self.dsigma(u);
            if !(d > 0.0) && d.is_finite() {
                return Err(Error::Domain(format!("sigma'({u}) = {d} is not positive")));
            }
        }
        Ok(())
    }
}
