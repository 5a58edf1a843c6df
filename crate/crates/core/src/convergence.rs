//! Moderate-dispersion experiments: distance of physical profiles to the
//! limiting shock and the width of the oscillation support, swept over
//! epsilon with delta = epsilon^p.

use crate::error::{Error, Result};
use crate::heteroclinic::{shoot_with, ShootOptions, WaveProfile};
use crate::models::{build_profile_problem, ModelFamily, ProfileProblem, ShockData};
use rayon::prelude::*;

/// Step-function reference the profiles converge to. Field order matches
/// `WaveProfile::fields`; the front sits at theta = 0.
#[derive(Debug, Clone)]
pub struct ShockReference {
    pub fields: Vec<FieldJump>,
    pub speed: f64,
}

#[derive(Debug, Clone)]
pub struct FieldJump {
    pub name: &'static str,
    pub left: f64,
    pub right: f64,
}

impl FieldJump {
    pub fn value(&self, theta: f64) -> f64 {
        if theta < 0.0 {
            self.left
        } else {
            self.right
        }
    }

    pub fn jump(&self) -> f64 {
        (self.right - self.left).abs()
    }
}

/// Physical left/right states of the limiting shock. For the Boussinesq bore
/// the raised state sits on the left (the wave runs right into still water).
pub fn shock_reference(model: &ModelFamily, shock: &ShockData) -> ShockReference {
    let fields = match model {
        ModelFamily::Elasticity(_) => vec![
            FieldJump {
                name: "u",
                left: shock.u_minus,
                right: shock.u_plus,
            },
            FieldJump {
                name: "v",
                left: shock.v_minus,
                right: shock.v_plus,
            },
        ],
        ModelFamily::Qhd { .. } => {
            let j_left = shock.u_minus * shock.v_minus;
            let j_right = shock.u_plus * shock.v_plus;
            vec![
                FieldJump {
                    name: "rho",
                    left: shock.u_minus,
                    right: shock.u_plus,
                },
                FieldJump {
                    name: "u",
                    left: shock.v_minus,
                    right: shock.v_plus,
                },
                FieldJump {
                    name: "j",
                    left: j_left,
                    right: j_right,
                },
            ]
        }
        ModelFamily::Boussinesq { .. } => vec![
            FieldJump {
                name: "eta",
                left: shock.v_plus,
                right: shock.v_minus,
            },
            FieldJump {
                name: "u",
                left: shock.u_plus,
                right: shock.u_minus,
            },
        ],
    };
    ShockReference {
        fields,
        speed: shock.s,
    }
}

/// One convergence measurement.
#[derive(Debug, Clone)]
pub struct ConvergenceRecord {
    pub epsilon: f64,
    pub delta: f64,
    pub c: f64,
    pub l1_distance: f64,
    pub support_width: f64,
    pub window: (f64, f64),
}

/// Theta of the mid-value crossing of the front nearest the first extremum,
/// in the profile's own theta coordinates.
pub fn front_shift(problem: &ProfileProblem, profile: &WaveProfile) -> f64 {
    let mid = 0.5 * (problem.u_minus + problem.u_plus);
    // Walk the reduced trajectory up to the first extremum (tau = 0) and take
    // the last crossing of the mid value before it.
    let samples = &profile.trajectory.samples;
    let mut crossing_tau = samples[0].tau;
    for pair in samples.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        if a.tau > 0.0 {
            break;
        }
        if (a.u - mid) == 0.0 || (a.u - mid).signum() != (b.u - mid).signum() {
            let t = (mid - a.u) / (b.u - a.u);
            crossing_tau = a.tau + t * (b.tau - a.tau);
        }
    }
    // Map the reduced tau to theta with the same convention as the profile.
    theta_of_tau(profile, crossing_tau)
}

fn theta_of_tau(profile: &WaveProfile, tau: f64) -> f64 {
    // The stored arrays are aligned; recover the affine map from two samples.
    let n = profile.len();
    let (t0, th0) = (profile.tau[0], profile.theta[0]);
    let (t1, th1) = (profile.tau[n - 1], profile.theta[n - 1]);
    th0 + (tau - t0) * (th1 - th0) / (t1 - t0)
}

/// L1 distance between the (front-aligned) profile and the step reference over
/// a fixed theta window, summed across physical fields. Trapezoid rule on the
/// union grid of shifted samples, window bounds and the jump point; outside
/// its sampled range the profile is extended by its end samples.
pub fn l1_distance(
    profile: &WaveProfile,
    reference: &ShockReference,
    window: (f64, f64),
    shift: f64,
) -> f64 {
    let (lo, hi) = window;
    let mut grid: Vec<f64> = Vec::with_capacity(profile.len() + 3);
    grid.push(lo);
    for &t in &profile.theta {
        let ts = t - shift;
        if ts > lo && ts < hi {
            grid.push(ts);
        }
    }
    if 0.0 > lo && 0.0 < hi {
        grid.push(0.0);
    }
    grid.push(hi);
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    grid.dedup();

    let mut total = 0.0;
    for (k, jumpref) in reference.fields.iter().enumerate() {
        let values = &profile.fields[k].1;
        let diff = |theta: f64| -> f64 {
            (interp_clamped(&profile.theta, values, theta + shift) - jumpref.value(theta)).abs()
        };
        let mut acc = 0.0;
        for pair in grid.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            acc += 0.5 * (diff(a) + diff(b)) * (b - a);
        }
        total += acc;
    }
    total
}

fn interp_clamped(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let n = xs.len();
    if x <= xs[0] {
        return ys[0];
    }
    if x >= xs[n - 1] {
        return ys[n - 1];
    }
    let idx = xs.partition_point(|&v| v < x);
    let (x0, x1) = (xs[idx - 1], xs[idx]);
    let (y0, y1) = (ys[idx - 1], ys[idx]);
    if x1 == x0 {
        return y0;
    }
    y0 + (x - x0) * (y1 - y0) / (x1 - x0)
}

/// Theta-width of the oscillation support on the downstream side of the
/// front: the distance from the front to the last sample where the reduced
/// amplitude still exceeds 1% of the jump.
pub fn support_width(problem: &ProfileProblem, profile: &WaveProfile, shift: f64) -> f64 {
    let threshold = 0.01 * (problem.u_plus - problem.u_minus).abs();
    let mut farthest: f64 = 0.0;
    for (i, &t) in profile.tau.iter().enumerate() {
        if t > 0.0 && (profile.u[i] - problem.u_plus).abs() > threshold {
            let theta = profile.theta[i] - shift;
            farthest = farthest.max(theta.abs());
        }
    }
    // The first extremum itself sits past the front; include the front-to-
    // extremum distance even for immediately-subcritical profiles.
    let theta0 = theta_of_tau(profile, 0.0) - shift;
    farthest.max(theta0.abs())
}

/// Default comparison window: [-1/2, 1/2] scaled by the reduced jump.
pub fn default_window(problem: &ProfileProblem) -> (f64, f64) {
    let jump = (problem.u_plus - problem.u_minus).abs().max(1.0);
    (-0.5 * jump, 0.5 * jump)
}

/// Build, shoot and measure one record.
pub fn convergence_record(
    model: &ModelFamily,
    shock: &ShockData,
    epsilon: f64,
    delta: f64,
    window: (f64, f64),
    opts: &ShootOptions,
) -> Result<ConvergenceRecord> {
    let problem = build_profile_problem(model, shock, epsilon, delta)?;
    let profile = shoot_with(&problem, opts)?;
    let reference = shock_reference(model, shock);
    let shift = front_shift(&problem, &profile);
    let l1 = l1_distance(&profile, &reference, window, shift);
    let width = support_width(&problem, &profile, shift);
    Ok(ConvergenceRecord {
        epsilon,
        delta,
        c: problem.c,
        l1_distance: l1,
        support_width: width,
        window,
    })
}

/// Outcome of a sweep: successful records in descending-epsilon order plus
/// the failures that did not abort the rest.
#[derive(Debug)]
pub struct SweepResult {
    pub records: Vec<ConvergenceRecord>,
    pub failures: Vec<(f64, Error)>,
}

/// Run the delta = epsilon^p experiment over a list of epsilons.
pub fn sweep(
    model: &ModelFamily,
    shock: &ShockData,
    eps_list: &[f64],
    exponent: f64,
    window: Option<(f64, f64)>,
) -> Result<SweepResult> {
    if !(exponent > 1.0) {
        return Err(Error::Domain(format!(
            "sweep exponent p = {exponent} must exceed 1 so that delta = o(epsilon)"
        )));
    }
    if eps_list.is_empty() {
        return Err(Error::InsufficientData("empty epsilon list".into()));
    }
    let mut eps = eps_list.to_vec();
    eps.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let window = match window {
        Some(w) => w,
        None => {
            let probe = build_profile_problem(model, shock, eps[0], eps[0].powf(exponent))?;
            default_window(&probe)
        }
    };
    let opts = ShootOptions::default();
    let outcomes: Vec<(f64, Result<ConvergenceRecord>)> = eps
        .par_iter()
        .map(|&e| {
            let delta = e.powf(exponent);
            (e, convergence_record(model, shock, e, delta, window, &opts))
        })
        .collect();
    let mut records = Vec::new();
    let mut failures = Vec::new();
    for (e, r) in outcomes {
        match r {
            Ok(rec) => records.push(rec),
            Err(err) => failures.push((e, err)),
        }
    }
    Ok(SweepResult { records, failures })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{qhd_mass_flux, shock_speed, ShockFamily, StressLaw};

    #[test]
    fn reference_states_per_model() {
        let law = StressLaw::sqrt();
        let shock = shock_speed(&law, 4.0, 5.0, ShockFamily::Two).unwrap();
        let r = shock_reference(&ModelFamily::Elasticity(law), &shock);
        assert_eq!(r.fields[0].name, "u");
        assert_eq!((r.fields[0].left, r.fields[0].right), (4.0, 5.0));
        assert_eq!(r.fields[1].name, "v");
        assert!((r.fields[1].right - (-shock.s)).abs() <= 1e-15);

        let qs = qhd_mass_flux(1.4, 1.5, 1.0, ShockFamily::Two).unwrap();
        let rq = shock_reference(&ModelFamily::Qhd { gamma: 1.4 }, &qs);
        assert_eq!((rq.fields[0].left, rq.fields[0].right), (1.5, 1.0));

        let bs = ShockData::boussinesq(2.0).unwrap();
        let rb = shock_reference(&ModelFamily::Boussinesq { speed: 2.0 }, &bs);
        // raised state behind the bore (physical left), still water ahead
        assert_eq!(rb.fields[1].name, "u");
        assert!((rb.fields[1].left - (3.0 - 3f64.sqrt())).abs() <= 1e-12);
        assert_eq!(rb.fields[1].right, 0.0);
        assert!((rb.fields[0].left + 3f64.sqrt()).abs() <= 1e-12);
    }

    #[test]
    fn l1_distance_of_a_step_against_itself_vanishes() {
        // synthetic single-field profile equal to the reference step
        let theta: Vec<f64> = (-50..=50).map(|i| i as f64 / 50.0).collect();
        let u: Vec<f64> = theta
            .iter()
            .map(|&t| if t < 0.0 { 1.0 } else { 2.0 })
            .collect();
        let profile = crate::heteroclinic::WaveProfile {
            trajectory: crate::integrate::Trajectory {
                samples: Vec::new(),
                events: Vec::new(),
                termination: crate::integrate::Termination::Converged,
                steps: Vec::new(),
            },
            theta: theta.clone(),
            tau: theta.clone(),
            u: u.clone(),
            w: vec![0.0; theta.len()],
            e: vec![0.0; theta.len()],
            fields: vec![("u", u)],
            epsilon: 1.0,
            delta: 1.0,
            c: 1.0,
            s: 1.0,
        };
        let reference = ShockReference {
            fields: vec![FieldJump {
                name: "u",
                left: 1.0,
                right: 2.0,
            }],
            speed: 1.0,
        };
        let d = l1_distance(&profile, &reference, (-0.5, 0.5), 0.0);
        assert!(d <= 1e-14);
        // shifting the profile by dx against the step costs |jump| * dx
        let d_shift = l1_distance(&profile, &reference, (-0.5, 0.5), 0.1);
        assert!((d_shift - 0.1).abs() <= 2e-2, "shifted distance {d_shift}");
    }

    #[test]
    fn sweep_rejects_bad_exponent() {
        let law = StressLaw::sqrt();
        let shock = shock_speed(&law, 4.0, 5.0, ShockFamily::Two).unwrap();
        let model = ModelFamily::Elasticity(law);
        assert!(sweep(&model, &shock, &[1e-2], 1.0, None).is_err());
        assert!(sweep(&model, &shock, &[], 1.5, None).is_err());
    }
}
