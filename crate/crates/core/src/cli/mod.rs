//! Command-line front end: config parsing, experiment orchestration, and
//! deterministic CSV/JSON outputs.

pub mod config;
pub mod output;

use crate::analysis::{oscillation_report, period, period_by_integration};
use crate::convergence::sweep;
use crate::error::{Error, Result};
use crate::heteroclinic::{shoot_with, ShootOptions};
use crate::models::{build_profile_problem, critical_friction, validate_admissibility};
use clap::{Parser, Subcommand};
use config::{DispersionSpec, ExperimentConfig, ExperimentSpec};
use serde_json::json;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "dispshock",
    version,
    about = "Traveling-wave laboratory for diffusive-dispersive shock profiles"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check shock admissibility and the structural hypotheses.
    Validate(CommonArgs),
    /// Shoot the heteroclinic orbit and write profile.csv.
    Profile(CommonArgs),
    /// Tabulate Hamiltonian periods T(E) against the ODE oracle.
    Periods(CommonArgs),
    /// Report per-cycle energies and tail fits; writes cycles.csv.
    Oscillations(CommonArgs),
    /// Run the delta = epsilon^p convergence sweep; writes sweep.csv.
    Sweep(CommonArgs),
}

#[derive(clap::Args)]
struct CommonArgs {
    /// Path to the JSON experiment configuration.
    #[arg(long)]
    config: PathBuf,
}

/// Entry point used by the binary. Returns the process exit code:
/// 0 success, 1 config/validation rejection, 2 numerical failure.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // clap handles --help/--version as "errors" with success exit
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let (name, args) = match &cli.command {
        Command::Validate(a) => ("validate", a),
        Command::Profile(a) => ("profile", a),
        Command::Periods(a) => ("periods", a),
        Command::Oscillations(a) => ("oscillations", a),
        Command::Sweep(a) => ("sweep", a),
    };
    match dispatch(name, args) {
        Ok(summary) => {
            println!("{summary}");
            0
        }
        Err(e) => {
            eprintln!("dispshock {name}: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(subcommand: &str, args: &CommonArgs) -> Result<String> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", args.config.display())))?;
    let cfg = ExperimentConfig::parse(&text)?;
    if cfg.experiment.kind() != subcommand && subcommand != "validate" {
        return Err(Error::Config(format!(
            "config experiment kind {:?} does not match subcommand {:?}",
            cfg.experiment.kind(),
            subcommand
        )));
    }
    match subcommand {
        "validate" => run_validate(&cfg),
        "profile" => run_profile(&cfg),
        "periods" => run_periods(&cfg),
        "oscillations" => run_oscillations(&cfg),
        "sweep" => run_sweep(&cfg),
        _ => unreachable!("clap restricts the subcommand set"),
    }
}

/// Dispersion used when a command needs a problem but the config left the
/// experiment section without one (validate on a periods config, say):
/// half the critical friction, delta = 1.
fn resolve_or_default(
    cfg: &ExperimentConfig,
    spec: &DispersionSpec,
    shock: &crate::models::ShockData,
) -> Result<(f64, f64)> {
    if spec.epsilon.is_none() && spec.delta.is_none() && spec.c.is_none() {
        let model = cfg.model.to_model()?;
        let probe_eps = 1e-3;
        let probe = build_profile_problem(&model, shock, probe_eps, 1.0)?;
        let c_star = critical_friction(&probe)?;
        let half = DispersionSpec {
            epsilon: None,
            delta: Some(1.0),
            c: Some(0.5 * c_star),
        };
        return cfg.resolve_dispersion(&half, shock);
    }
    cfg.resolve_dispersion(spec, shock)
}

fn experiment_dispersion(cfg: &ExperimentConfig) -> DispersionSpec {
    match &cfg.experiment {
        ExperimentSpec::Validate { dispersion }
        | ExperimentSpec::Profile { dispersion }
        | ExperimentSpec::Oscillations { dispersion } => *dispersion,
        _ => DispersionSpec::default(),
    }
}

fn run_validate(cfg: &ExperimentConfig) -> Result<String> {
    let model = cfg.model.to_model()?;
    let shock = cfg.build_shock()?;
    if !shock.verdicts.lax {
        return Err(Error::Admissibility(format!(
            "Lax condition fails with equality or reversal (contact discontinuity); \
             margins: phi'(u_plus)={:.6e}, -phi'(u_minus)={:.6e}",
            lax_margin_plus(cfg, &shock)?,
            lax_margin_minus(cfg, &shock)?,
        )));
    }
    let (epsilon, delta) = resolve_or_default(cfg, &experiment_dispersion(cfg), &shock)?;
    let problem = build_profile_problem(&model, &shock, epsilon, delta)?;
    let report = validate_admissibility(&model, &shock, &problem);
    if let Some(name) = report.first_failure() {
        return Err(Error::Hypothesis(format!(
            "{name} fails for this shock (see hypothesis report)"
        )));
    }
    let c_star = critical_friction(&problem)?;
    let summary = json!({
        "command": "validate",
        "model": cfg.model.describe(),
        "lax": report.lax,
        "wendroff": report.wendroff,
        "H_sE": report.h_se,
        "H_oE": report.h_oe,
        "H_phi0": report.h_phi0,
        "H_phi3": report.h_phi3,
        "H_gn": report.h_gn,
        "qhd_gn": report.qhd_gn,
        "lax_margins": [report.lax_margins.0, report.lax_margins.1],
        "s": shock.s,
        "m": shock.m,
        "c": problem.c,
        "c_star": c_star,
        "oscillatory": problem.c < c_star,
        "u_s": problem.u_s,
        "e_max": problem.e_max,
        "ok": true,
    });
    Ok(summary.to_string())
}

fn lax_margin_plus(cfg: &ExperimentConfig, shock: &crate::models::ShockData) -> Result<f64> {
    let model = cfg.model.to_model()?;
    // phi'(u_plus) = s^2 - sigma'(u_plus) in chord terms; derive from the raw
    // law so the margin exists even when the problem cannot be built.
    Ok(match &model {
        crate::models::ModelFamily::Elasticity(stress) => {
            shock.s * shock.s - stress.dsigma(shock.u_plus)
        }
        crate::models::ModelFamily::Qhd { gamma } => {
            let m2 = shock.m.map(|m| m * m).unwrap_or_default();
            (m2 - gamma * shock.u_plus.powf(gamma + 1.0)) / (shock.u_plus * shock.u_plus)
        }
        crate::models::ModelFamily::Boussinesq { speed } => {
            crate::models::boussinesq_endstate(*speed)?.2
        }
    })
}

fn lax_margin_minus(cfg: &ExperimentConfig, shock: &crate::models::ShockData) -> Result<f64> {
    let model = cfg.model.to_model()?;
    Ok(match &model {
        crate::models::ModelFamily::Elasticity(stress) => {
            stress.dsigma(shock.u_minus) - shock.s * shock.s
        }
        crate::models::ModelFamily::Qhd { gamma } => {
            let m2 = shock.m.map(|m| m * m).unwrap_or_default();
            (gamma * shock.u_minus.powf(gamma + 1.0) - m2) / (shock.u_minus * shock.u_minus)
        }
        crate::models::ModelFamily::Boussinesq { speed } => (speed * speed - 1.0) / speed,
    })
}

fn shoot_options(cfg: &ExperimentConfig) -> ShootOptions {
    ShootOptions {
        offset_scale: cfg.numerics.offset_scale(),
        rtol: cfg.numerics.rtol(),
        atol: cfg.numerics.atol,
        tau_budget: cfg.numerics.tau_budget,
    }
}

fn run_profile(cfg: &ExperimentConfig) -> Result<String> {
    let model = cfg.model.to_model()?;
    let shock = cfg.build_shock()?;
    let (epsilon, delta) = cfg.resolve_dispersion(&experiment_dispersion(cfg), &shock)?;
    let problem = build_profile_problem(&model, &shock, epsilon, delta)?;
    let profile = shoot_with(&problem, &shoot_options(cfg))?;

    let csv = output::profile_csv(&profile, &cfg.model.describe(), cfg.numerics.rtol());
    let path = output::out_path(cfg.output.dir(), cfg.output.prefix(), "profile.csv");
    output::write_atomic(&path, csv.as_bytes())?;
    if cfg.output.gnuplot {
        let gp = output::gnuplot_script("profile", &path.file_name().unwrap().to_string_lossy());
        output::write_atomic(
            &output::out_path(cfg.output.dir(), cfg.output.prefix(), "profile.gp"),
            gp.as_bytes(),
        )?;
    }
    let terminal_err = (profile.trajectory.last().u - problem.u_plus).abs();
    let summary = json!({
        "command": "profile",
        "model": cfg.model.describe(),
        "c": problem.c,
        "epsilon": epsilon,
        "delta": delta,
        "samples": profile.len(),
        "events": profile.trajectory.events.len(),
        "terminal_u_error": terminal_err,
        "supercritical": problem.supercritical,
        "output": path.display().to_string(),
        "ok": true,
    });
    Ok(summary.to_string())
}

fn run_periods(cfg: &ExperimentConfig) -> Result<String> {
    let model = cfg.model.to_model()?;
    let shock = cfg.build_shock()?;
    // Periods are a property of the c = 0 Hamiltonian flow; the problem is
    // built at a nominal subcritical friction and run with c = 0.
    let (epsilon, delta) = resolve_or_default(cfg, &DispersionSpec::default(), &shock)?;
    let problem = build_profile_problem(&model, &shock, epsilon, delta)?;
    let (count, energies) = match &cfg.experiment {
        ExperimentSpec::Periods { count, energies } => (count.unwrap_or(10), energies.clone()),
        _ => (10, Vec::new()),
    };
    let energy_list: Vec<f64> = if energies.is_empty() {
        (1..=count)
            .map(|j| problem.e_max * j as f64 / (count + 1) as f64)
            .collect()
    } else {
        energies
    };
    let mut rows = Vec::with_capacity(energy_list.len());
    let mut max_rel_gap = 0.0_f64;
    for e in energy_list {
        let t_quad = period(&problem, e)?;
        let (t_ode, _ret) = period_by_integration(&problem, e, cfg.numerics.rtol())?;
        max_rel_gap = max_rel_gap.max((t_quad - t_ode).abs() / t_ode);
        rows.push((e, t_quad, t_ode));
    }
    let csv = output::periods_csv(&rows, &cfg.model.describe(), cfg.numerics.rtol());
    let path = output::out_path(cfg.output.dir(), cfg.output.prefix(), "periods.csv");
    output::write_atomic(&path, csv.as_bytes())?;
    if cfg.output.gnuplot {
        let gp = output::gnuplot_script("periods", &path.file_name().unwrap().to_string_lossy());
        output::write_atomic(
            &output::out_path(cfg.output.dir(), cfg.output.prefix(), "periods.gp"),
            gp.as_bytes(),
        )?;
    }
    let summary = json!({
        "command": "periods",
        "model": cfg.model.describe(),
        "rows": rows.len(),
        "max_rel_gap": max_rel_gap,
        "output": path.display().to_string(),
        "ok": true,
    });
    Ok(summary.to_string())
}

fn run_oscillations(cfg: &ExperimentConfig) -> Result<String> {
    let model = cfg.model.to_model()?;
    let shock = cfg.build_shock()?;
    let (epsilon, delta) = cfg.resolve_dispersion(&experiment_dispersion(cfg), &shock)?;
    let problem = build_profile_problem(&model, &shock, epsilon, delta)?;
    let profile = shoot_with(&problem, &shoot_options(cfg))?;
    let report = oscillation_report(&problem, &profile);

    let csv = output::cycles_csv(&report, &cfg.model.describe(), cfg.numerics.rtol());
    let path = output::out_path(cfg.output.dir(), cfg.output.prefix(), "cycles.csv");
    output::write_atomic(&path, csv.as_bytes())?;
    if cfg.output.gnuplot {
        let gp = output::gnuplot_script("cycles", &path.file_name().unwrap().to_string_lossy());
        output::write_atomic(
            &output::out_path(cfg.output.dir(), cfg.output.prefix(), "cycles.gp"),
            gp.as_bytes(),
        )?;
    }
    let summary = json!({
        "command": "oscillations",
        "model": cfg.model.describe(),
        "c": problem.c,
        "cycles": report.cycles.len(),
        "l_high": report.l_high,
        "l_low": report.l_low,
        "decay_rate": report.decay_rate,
        "tail_spacing": report.tail_spacing,
        "low_confidence_decay": report.low_confidence_decay,
        "output": path.display().to_string(),
        "ok": true,
    });
    Ok(summary.to_string())
}

fn run_sweep(cfg: &ExperimentConfig) -> Result<String> {
    let model = cfg.model.to_model()?;
    let shock = cfg.build_shock()?;
    let spec = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| Error::Config("sweep experiment needs a sweep section".into()))?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(thread_cap())
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let result =
        pool.install(|| sweep(&model, &shock, &spec.eps_list, spec.exponent, spec.window))?;

    if result.records.is_empty() {
        let (eps, err) = result
            .failures
            .into_iter()
            .next()
            .expect("empty sweep has a failure");
        eprintln!("dispshock sweep: every record failed; first at eps={eps}");
        return Err(err);
    }

    let csv = output::sweep_csv(&result.records, &cfg.model.describe(), cfg.numerics.rtol());
    let path = output::out_path(cfg.output.dir(), cfg.output.prefix(), "sweep.csv");
    output::write_atomic(&path, csv.as_bytes())?;
    if cfg.output.gnuplot {
        let gp = output::gnuplot_script("sweep", &path.file_name().unwrap().to_string_lossy());
        output::write_atomic(
            &output::out_path(cfg.output.dir(), cfg.output.prefix(), "sweep.gp"),
            gp.as_bytes(),
        )?;
    }
    let summary = json!({
        "command": "sweep",
        "model": cfg.model.describe(),
        "records": result.records.len(),
        "failures": result.failures.len(),
        "output": path.display().to_string(),
        "ok": true,
    });
    Ok(summary.to_string())
}

/// Worker cap from DISPSHOCK_THREADS (default: machine cores).
fn thread_cap() -> usize {
    std::env::var("DISPSHOCK_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
}
