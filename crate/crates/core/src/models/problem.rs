//! Reduction of a model + shock to the planar friction problem and its
//! landmarks: end states, saddle-level energy, far turning point u_s,
//! verified convexity interval around the minimum, and the energy split E_m.

use super::potential::ReducedForm;
use super::shock::{ShockData, ShockFamily};
use super::ModelFamily;
use crate::error::{Error, Result};

/// Fraction of E_max at which tail integration stops.
pub const E_STOP_FRACTION: f64 = 1e-12;
/// Shrink factor applied to the inflection interval around u_plus.
const CONVEXITY_SHRINK: f64 = 0.9;
/// E_m = EM_FRACTION * min potential value on the shrunk convexity bounds.
const EM_FRACTION: f64 = 0.9;

/// Which way the heteroclinic runs in the reduced variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// u_minus < u_plus (canonical arrangement).
    Increasing,
    /// u_minus > u_plus (mirrored arrangement, e.g. QHD 2-shocks in x = ln rho).
    Decreasing,
}

impl Orientation {
    pub fn sign(self) -> f64 {
        match self {
            Orientation::Increasing => 1.0,
            Orientation::Decreasing => -1.0,
        }
    }
}

/// Original model data kept alongside the reduced problem for the mapping
/// back to physical variables.
#[derive(Debug, Clone)]
pub struct PhysicalContext {
    pub model: ModelFamily,
    pub shock: ShockData,
    pub epsilon: f64,
    pub delta: f64,
}

/// The reduced scalar problem u'' + gamma_f*c*u' + phi(u) = 0 together with
/// all landmarks used by integration and analysis. Immutable once built.
#[derive(Debug, Clone)]
pub struct ProfileProblem {
    pub form: ReducedForm,
    pub u_minus: f64,
    pub u_plus: f64,
    pub u_s: f64,
    /// Friction parameter (s*eps/sqrt(delta), or eps/sqrt(s*delta) for the
    /// Boussinesq family). Zero selects the Hamiltonian flow.
    pub c: f64,
    /// Friction multiplier: 1 except for QHD where the reduced equation
    /// carries 2c.
    pub gamma_f: f64,
    pub e_max: f64,
    pub e_m: f64,
    pub convex_lo: f64,
    pub convex_hi: f64,
    pub orientation: Orientation,
    /// c >= c_star: the equilibrium is a node and the profile is monotone.
    pub supercritical: bool,
    /// u_s search hit a pole cap before reaching E_max.
    pub u_s_capped: bool,
    /// Profile must be read right-to-left in tau (1-shocks).
    pub time_reversed: bool,
    pub physical: Option<PhysicalContext>,
    potential_offset: f64,
}

impl ProfileProblem {
    pub fn phi(&self, u: f64) -> f64 {
        self.form.phi(u)
    }

    pub fn dphi(&self, u: f64) -> f64 {
        self.form.dphi(u)
    }

    /// Potential normalised so that Phi(u_plus) = 0.
    pub fn potential(&self, u: f64) -> f64 {
        self.form.potential_raw(u) - self.potential_offset
    }

    pub fn energy(&self, u: f64, w: f64) -> f64 {
        0.5 * w * w + self.potential(u)
    }

    /// Stop energy for tail integration.
    pub fn e_stop(&self) -> f64 {
        E_STOP_FRACTION * self.e_max
    }

    /// Default tau budget: covers both O(1/c) regions with margin. In the
    /// node regime the tail decays at the slow eigenvalue rate ~ phi'/(gc)
    /// rather than at gc, so that rate sets its own budget term.
    pub fn tau_budget(&self) -> f64 {
        let curvature = self.dphi(self.u_plus).max(f64::MIN_POSITIVE);
        if self.c <= 0.0 {
            return f64::INFINITY;
        }
        let gc = self.gamma_f * self.c;
        let disc = gc * gc - 4.0 * curvature;
        let tail_rate = if disc < 0.0 {
            gc
        } else {
            (gc - disc.sqrt()).max(f64::MIN_POSITIVE)
        };
        200.0 / gc + 50.0 / curvature.sqrt() + 60.0 / tail_rate
    }

    /// Guard box for blowup detection.
    pub fn blowup_guard(&self) -> f64 {
        10.0 * (self.u_s.abs() + self.u_minus.abs() + 1.0)
    }

    pub fn u_scale(&self) -> f64 {
        self.u_minus
            .abs()
            .max(self.u_plus.abs())
            .max(self.u_s.abs())
            .max((self.u_plus - self.u_minus).abs())
    }

    pub fn w_scale(&self) -> f64 {
        (2.0 * self.e_max).sqrt()
    }

    /// Same problem with a different friction parameter (used for the c = 0
    /// Hamiltonian oracles). Landmarks do not depend on c.
    pub fn with_friction(&self, c: f64) -> Self {
        let mut p = self.clone();
        p.c = c;
        p.supercritical = match critical_friction(&p) {
            Ok(c_star) => c >= c_star,
            Err(_) => false,
        };
        p
    }

    /// Synthetic quadratic-potential problem for calibration and tests:
    /// phi(u) = stiffness * (u - center).
    pub fn harmonic(center: f64, stiffness: f64, c: f64, e_max: f64) -> Self {
        assert!(stiffness > 0.0 && e_max > 0.0);
        let amplitude = (2.0 * e_max / stiffness).sqrt();
        let form = ReducedForm::Harmonic { center, stiffness };
        ProfileProblem {
            form,
            u_minus: center - amplitude,
            u_plus: center,
            u_s: center + amplitude,
            c,
            gamma_f: 1.0,
            e_max,
            e_m: 0.5 * e_max,
            convex_lo: center - amplitude,
            convex_hi: center + amplitude,
            orientation: Orientation::Increasing,
            supercritical: c >= 2.0 * stiffness.sqrt(),
            u_s_capped: false,
            time_reversed: false,
            physical: None,
            potential_offset: 0.0,
        }
    }
}

/// Friction threshold between spiral and node at u_plus:
/// c_star = 2 sqrt(phi'(u_plus)) / gamma_f.
pub fn critical_friction(problem: &ProfileProblem) -> Result<f64> {
    let curvature = problem.dphi(problem.u_plus);
    if !(curvature > 0.0) {
        return Err(Error::Hypothesis(format!(
            "phi'(u_plus) = {curvature} must be positive for a spiral/node threshold"
        )));
    }
    Ok(2.0 * curvature.sqrt() / problem.gamma_f)
}

/// Pointwise (phi, Phi) with a domain guard. The admissible range extends a
/// quarter span beyond [u_minus, u_s] but never past a pole.
pub fn eval_potential(problem: &ProfileProblem, u: f64) -> Result<(f64, f64)> {
    let lo = problem.u_minus.min(problem.u_s);
    let hi = problem.u_minus.max(problem.u_s);
    let margin = 0.25 * (hi - lo);
    let cap = problem.form.far_cap(1.0);
    if u < lo - margin || u > (hi + margin).min(cap) || !problem.form.admits(u) {
        return Err(Error::Domain(format!(
            "u={u} outside the evaluation range [{}, {}]",
            lo - margin,
            (hi + margin).min(cap)
        )));
    }
    Ok((problem.phi(u), problem.potential(u)))
}

/// Far turning point: Phi(u_s) = E_max on the far side of u_plus, located by
/// doubling bracket expansion then bisection.
pub fn find_u_s(problem: &ProfileProblem) -> Result<f64> {
    let (u_s, _) = locate_far_level(
        &problem.form,
        problem.u_minus,
        problem.u_plus,
        problem.e_max,
    )?;
    Ok(u_s)
}

/// Shared u_s search on a bare reduced form. Returns (u_s, capped).
pub(crate) fn locate_far_level(
    form: &ReducedForm,
    u_minus: f64,
    u_plus: f64,
    e_max: f64,
) -> Result<(f64, bool)> {
    if !(e_max > 0.0) {
        return Err(Error::Hypothesis(format!(
            "E_max = {e_max} must be positive to place u_s"
        )));
    }
    let offset = form.potential_raw(u_plus);
    let g = |u: f64| form.potential_raw(u) - offset - e_max;
    let dir = (u_plus - u_minus).signum();
    let span = (u_plus - u_minus).abs();
    let cap = form.far_cap(dir);
    let limit = if cap.is_finite() {
        cap
    } else {
        u_plus + dir * 1e6 * span.max(1.0)
    };
    let bracket = crate::numerics::expand_bracket(g, u_plus, dir, 0.01 * span, limit);
    let (a, b) = match bracket {
        Ok(pair) => pair,
        Err(_) if cap.is_finite() => return Ok((cap, true)),
        Err(e) => return Err(e),
    };
    // Bisection with a value criterion: |Phi(u_s) - E_max| <= 1e-12 E_max.
    let (mut lo, mut hi) = (a, b);
    let mut glo = g(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let gm = g(mid);
        if gm.abs() <= 1e-12 * e_max || (hi - lo).abs() <= f64::EPSILON * mid.abs().max(span) {
            return Ok((mid, false));
        }
        if gm.signum() == glo.signum() {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    Ok((0.5 * (lo + hi), false))
}

/// Nearest inflection of Phi on each side of u_plus, then the shrunk
/// convexity bounds and the energy split E_m.
fn convexity_bounds(
    form: &ReducedForm,
    u_minus: f64,
    u_plus: f64,
    u_s: f64,
    offset: f64,
) -> Result<(f64, f64, f64)> {
    let near = nearest_curvature_root(form, u_plus, u_minus).unwrap_or(u_minus);
    let far = nearest_curvature_root(form, u_plus, u_s).unwrap_or(u_s);
    let near_bound = u_plus + CONVEXITY_SHRINK * (near - u_plus);
    let far_bound = u_plus + CONVEXITY_SHRINK * (far - u_plus);
    let phi_at = |u: f64| form.potential_raw(u) - offset;
    let e_m = EM_FRACTION * phi_at(near_bound).min(phi_at(far_bound));
    if !(e_m > 0.0) {
        return Err(Error::Hypothesis(format!(
            "energy split E_m = {e_m} is not positive"
        )));
    }
    let (lo, hi) = if near_bound < far_bound {
        (near_bound, far_bound)
    } else {
        (far_bound, near_bound)
    };
    // Invariant: Phi'' > 0 on the stored interval.
    let n = 512;
    for k in 0..=n {
        let u = lo + (hi - lo) * k as f64 / n as f64;
        if form.dphi(u) <= 0.0 {
            return Err(Error::Hypothesis(format!(
                "convexity interval invalid: Phi''({u}) = {}",
                form.dphi(u)
            )));
        }
    }
    Ok((lo, hi, e_m))
}

/// First sign change of Phi'' scanning from u_plus toward `toward`.
fn nearest_curvature_root(form: &ReducedForm, u_plus: f64, toward: f64) -> Option<f64> {
    let n = 400;
    let mut prev_u = u_plus;
    let mut prev = form.dphi(prev_u);
    for k in 1..=n {
        let u = u_plus + (toward - u_plus) * k as f64 / n as f64;
        let d = form.dphi(u);
        if prev > 0.0 && d <= 0.0 {
            let root =
                crate::numerics::bisect(|x| form.dphi(x), prev_u, u, 1e-14 * (1.0 + u.abs()))
                    .ok()?;
            return Some(root);
        }
        prev_u = u;
        prev = d;
    }
    None
}

/// Grid sign check for the structural hypotheses. Returns the first location
/// where phi has the wrong sign beyond the rounding tolerance.
pub(crate) fn phi_sign_violation(
    form: &ReducedForm,
    a: f64,
    b: f64,
    want_negative: bool,
    n: usize,
) -> Option<(f64, f64)> {
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    let mut values = Vec::with_capacity(n);
    for k in 1..=n {
        let u = lo + (hi - lo) * k as f64 / (n + 1) as f64;
        values.push((u, form.phi(u)));
    }
    let scale = values
        .iter()
        .map(|(_, p)| p.abs())
        .fold(0.0_f64, f64::max)
        .max(f64::MIN_POSITIVE);
    let tol = 1e-12 * scale;
    values
        .into_iter()
        .find(|&(_, p)| if want_negative { p > tol } else { p < -tol })
}

fn hypothesis_gate(
    form: &ReducedForm,
    u_minus: f64,
    u_plus: f64,
    u_s: f64,
    e_max: f64,
    offset: f64,
) -> Result<()> {
    let d_minus = form.dphi(u_minus);
    let d_plus = form.dphi(u_plus);
    if !(d_minus < 0.0) || !(d_plus > 0.0) {
        return Err(Error::Hypothesis(format!(
            "H_phi3 violated: phi'(u_minus)={d_minus}, phi'(u_plus)={d_plus}"
        )));
    }
    let increasing = u_minus < u_plus;
    // Between the states phi carries the sign that makes u_minus the maximum
    // of Phi (H_sE in chord form, H_phi1 in potential form).
    if let Some((u, p)) = phi_sign_violation(form, u_minus, u_plus, increasing, 10_000) {
        return Err(Error::Hypothesis(format!(
            "H_sE violated at u={u:.6} (phi={p:.3e})"
        )));
    }
    // Beyond u_plus up to u_s the sign flips (H_oE / H_phi2).
    if let Some((u, p)) = phi_sign_violation(form, u_plus, u_s, !increasing, 10_000) {
        return Err(Error::Hypothesis(format!(
            "H_oE violated at u={u:.6} (phi={p:.3e})"
        )));
    }
    // H_phi0: the potential stays strictly inside (0, E_max) on the open span.
    let (lo, hi) = if u_minus < u_s {
        (u_minus, u_s)
    } else {
        (u_s, u_minus)
    };
    let n = 10_000;
    let tol = 1e-9 * e_max;
    for k in 1..n {
        let u = lo + (hi - lo) * k as f64 / n as f64;
        let margin = 0.02 * (hi - lo);
        if (u - u_minus).abs() < margin || (u - u_plus).abs() < margin || (u - u_s).abs() < margin {
            continue;
        }
        let val = form.potential_raw(u) - offset;
        if val < -tol || val > e_max + tol {
            return Err(Error::Hypothesis(format!(
                "H_phi0 violated at u={u:.6}: Phi={val:.6e} outside (0, {e_max:.6e})"
            )));
        }
    }
    Ok(())
}

/// Build the reduced problem for a model/shock pair at dispersion (eps, delta).
///
/// 1-shocks are reduced to the canonical forward problem by swapping the end
/// states (tau -> -tau), recorded in `time_reversed`. QHD enters in x = ln rho
/// with friction multiplier 2.
pub fn build_profile_problem(
    model: &ModelFamily,
    shock: &ShockData,
    epsilon: f64,
    delta: f64,
) -> Result<ProfileProblem> {
    if !(epsilon > 0.0) || !(delta > 0.0) {
        return Err(Error::Domain(format!(
            "epsilon={epsilon} and delta={delta} must be positive"
        )));
    }
    model.validate()?;
    let (form, u_minus, u_plus, c, gamma_f, time_reversed) = match model {
        ModelFamily::Elasticity(stress) => {
            let c = shock.s.abs() * epsilon / delta.sqrt();
            match shock.family {
                ShockFamily::Two => (
                    ReducedForm::elasticity(*stress, shock.u_minus, shock.s),
                    shock.u_minus,
                    shock.u_plus,
                    c,
                    1.0,
                    false,
                ),
                ShockFamily::One => (
                    ReducedForm::elasticity(*stress, shock.u_plus, shock.s.abs()),
                    shock.u_plus,
                    shock.u_minus,
                    c,
                    1.0,
                    true,
                ),
            }
        }
        ModelFamily::Qhd { gamma } => {
            let m = shock.m.ok_or_else(|| {
                Error::Domain("QHD problem needs the mass flux m on its shock data".into())
            })?;
            let (rho_minus, rho_plus) = (shock.u_minus, shock.u_plus);
            let c = shock.s.abs() * epsilon / delta.sqrt();
            match shock.family {
                ShockFamily::Two => (
                    ReducedForm::qhd(*gamma, m * m, rho_minus),
                    rho_minus.ln(),
                    rho_plus.ln(),
                    c,
                    2.0,
                    false,
                ),
                ShockFamily::One => (
                    ReducedForm::qhd(*gamma, m * m, rho_plus),
                    rho_plus.ln(),
                    rho_minus.ln(),
                    c,
                    2.0,
                    true,
                ),
            }
        }
        ModelFamily::Boussinesq { speed } => {
            let c = epsilon / (speed * delta).sqrt();
            (
                ReducedForm::Boussinesq { s: *speed },
                0.0,
                shock.u_plus,
                c,
                1.0,
                false,
            )
        }
    };

    let offset = form.potential_raw(u_plus);
    let e_max = form.potential_raw(u_minus) - offset;
    if !(e_max > 0.0) {
        return Err(Error::Hypothesis(format!(
            "H_phi0 violated: E_max = Phi(u_minus) = {e_max} is not positive"
        )));
    }
    let (u_s, u_s_capped) = locate_far_level(&form, u_minus, u_plus, e_max)?;
    hypothesis_gate(&form, u_minus, u_plus, u_s, e_max, offset)?;
    let (convex_lo, convex_hi, e_m) = convexity_bounds(&form, u_minus, u_plus, u_s, offset)?;

    let orientation = if u_minus < u_plus {
        Orientation::Increasing
    } else {
        Orientation::Decreasing
    };
    let mut problem = ProfileProblem {
        form,
        u_minus,
        u_plus,
        u_s,
        c,
        gamma_f,
        e_max,
        e_m,
        convex_lo,
        convex_hi,
        orientation,
        supercritical: false,
        u_s_capped,
        time_reversed,
        physical: Some(PhysicalContext {
            model: model.clone(),
            shock: shock.clone(),
            epsilon,
            delta,
        }),
        potential_offset: offset,
    };
    problem.supercritical = c >= critical_friction(&problem)?;
    Ok(problem)
}
