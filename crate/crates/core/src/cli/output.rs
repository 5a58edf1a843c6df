//! Atomic, byte-stable CSV and script output.
//!
//! Every CSV starts with a `#` comment line recording (model, c, rtol, tool
//! version), then a header row. Floats print in Rust's shortest round-trip
//! form, UTF-8, LF line endings, '.' decimal separator.

use crate::analysis::OscillationReport;
use crate::convergence::ConvergenceRecord;
use crate::error::Result;
use crate::heteroclinic::WaveProfile;
use std::io::Write;
use std::path::{Path, PathBuf};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Write bytes atomically: temp file in the target directory, then rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    if let Some(d) = dir {
        std::fs::create_dir_all(d)?;
    }
    let mut tmp = tempfile::NamedTempFile::new_in(dir.unwrap_or_else(|| Path::new(".")))?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

pub fn comment_line(model: &str, c: &str, rtol: f64) -> String {
    format!("# model={model} c={c} rtol={rtol:e} version={TOOL_VERSION}\n")
}

fn push_row(out: &mut String, values: &[f64]) {
    let mut first = true;
    for v in values {
        if !first {
            out.push(',');
        }
        out.push_str(&format!("{v}"));
        first = false;
    }
    out.push('\n');
}

/// profile.csv: (theta, tau, u, w, E, field1, field2).
pub fn profile_csv(profile: &WaveProfile, model: &str, rtol: f64) -> String {
    let mut out = comment_line(model, &format!("{}", profile.c), rtol);
    out.push_str("theta,tau,u,w,E,field1,field2\n");
    let f1 = &profile.fields[0].1;
    let f2 = &profile.fields[1].1;
    for i in 0..profile.len() {
        push_row(
            &mut out,
            &[
                profile.theta[i],
                profile.tau[i],
                profile.u[i],
                profile.w[i],
                profile.e[i],
                f1[i],
                f2[i],
            ],
        );
    }
    out
}

/// cycles.csv: (n, tau_min, tau_max, E_yn, dE, spacing).
pub fn cycles_csv(report: &OscillationReport, model: &str, rtol: f64) -> String {
    let mut out = comment_line(model, &format!("{}", report.c), rtol);
    out.push_str("n,tau_min,tau_max,E_yn,dE,spacing\n");
    for c in &report.cycles {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            c.n, c.tau_min, c.tau_max, c.e_yn, c.de, c.spacing
        ));
    }
    out
}

/// periods.csv: (E, T_quad, T_ode).
pub fn periods_csv(rows: &[(f64, f64, f64)], model: &str, rtol: f64) -> String {
    let mut out = comment_line(model, "0", rtol);
    out.push_str("E,T_quad,T_ode\n");
    for (e, tq, to) in rows {
        push_row(&mut out, &[*e, *tq, *to]);
    }
    out
}

/// sweep.csv: (epsilon, delta, c, l1_distance, support_width).
pub fn sweep_csv(records: &[ConvergenceRecord], model: &str, rtol: f64) -> String {
    let mut out = comment_line(model, "sweep", rtol);
    out.push_str("epsilon,delta,c,l1_distance,support_width\n");
    for r in records {
        push_row(
            &mut out,
            &[r.epsilon, r.delta, r.c, r.l1_distance, r.support_width],
        );
    }
    out
}

/// A small gnuplot companion script for a CSV we just wrote.
pub fn gnuplot_script(kind: &str, csv_name: &str) -> String {
    let mut s = String::from(
        "set datafile separator ','\nset datafile commentschars '#'\nset key top right\n",
    );
    match kind {
        "profile" => {
            s.push_str(&format!(
                "set xlabel 'theta'\nset ylabel 'u'\nplot '{csv_name}' every ::1 using 1:3 with lines title 'u(theta)'\n"
            ));
        }
        "cycles" => {
            s.push_str(&format!(
                "set logscale y\nset xlabel 'n'\nset ylabel '-dE'\nplot '{csv_name}' every ::1 using 1:(-$5) with linespoints title 'energy drop'\n"
            ));
        }
        "periods" => {
            s.push_str(&format!(
                "set xlabel 'E'\nset ylabel 'T'\nplot '{csv_name}' every ::1 using 1:2 with linespoints title 'T_quad', '{csv_name}' every ::1 using 1:3 with points title 'T_ode'\n"
            ));
        }
        "sweep" => {
            s.push_str(&format!(
                "set logscale xy\nset xlabel 'epsilon'\nset ylabel 'L1 distance'\nplot '{csv_name}' every ::1 using 1:4 with linespoints title 'L1'\n"
            ));
        }
        _ => {}
    }
    s
}

pub fn out_path(dir: &str, prefix: &str, suffix: &str) -> PathBuf {
    Path::new(dir).join(format!("{prefix}.{suffix}"))
}
