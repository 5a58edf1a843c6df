//! Small numerical kernels: bracketed root finding, adaptive quadrature,
//! least-squares line fits.

use crate::error::{Error, Result};

/// Bisection on a bracketing interval. `f(a)` and `f(b)` must have opposite
/// signs (a zero endpoint is accepted as the root).
pub fn bisect<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, xtol: f64) -> Result<f64> {
    let (mut lo, mut hi) = (a, b);
    let (mut flo, fhi) = (f(lo), f(hi));
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::Bracket(format!(
            "no sign change on [{lo}, {hi}]: f(a)={flo}, f(b)={fhi}"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (hi - lo).abs() <= xtol {
            return Ok(mid);
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Expand a bracket from `start` in direction `dir` by doubling `step` until
/// `f` changes sign or `limit` is reached. Returns the bracketing pair.
pub fn expand_bracket<F: Fn(f64) -> f64>(
    f: F,
    start: f64,
    dir: f64,
    mut step: f64,
    limit: f64,
) -> Result<(f64, f64)> {
    let f0 = f(start);
    let mut prev = start;
    for _ in 0..200 {
        let mut next = start + dir * step;
        let clipped = (dir > 0.0 && next >= limit) || (dir < 0.0 && next <= limit);
        if clipped {
            next = limit;
        }
        let fnext = f(next);
        if fnext == 0.0 || fnext.signum() != f0.signum() {
            return Ok((prev, next));
        }
        if clipped {
            return Err(Error::Bracket(format!(
                "target not reached before limit {limit} (f={fnext})"
            )));
        }
        prev = next;
        step *= 2.0;
    }
    Err(Error::Bracket("bracket expansion exhausted".into()))
}

/// Adaptive Simpson quadrature of `f` on `[a, b]` to relative tolerance
/// `rel_tol`. The per-level tolerance never drops below the f64 noise floor
/// of the integral scale, and recursion depth is capped, so integrands that
/// are noise-dominated in a sliver (square-root cancellation at turning
/// points) terminate instead of resolving rounding jitter.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel_tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let scale = whole.abs().max(1e-300);
    let floor = 16.0 * f64::EPSILON * scale;
    simpson_rec(
        f,
        a,
        b,
        fa,
        fm,
        fb,
        whole,
        (rel_tol * scale).max(floor),
        floor,
        32,
    )
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    tol_floor: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    let half_tol = (0.5 * tol).max(tol_floor);
    simpson_rec(f, a, m, fa, flm, fm, left, half_tol, tol_floor, depth - 1)
        + simpson_rec(f, m, b, fm, frm, fb, right, half_tol, tol_floor, depth - 1)
}

/// 6-point Gauss-Legendre nodes and weights on [-1, 1].
#[allow(clippy::excessive_precision)]
pub const GL6: [(f64, f64); 6] = [
    (-0.932_469_514_203_152_1, 0.171_324_492_379_170_4),
    (-0.661_209_386_466_264_5, 0.360_761_573_048_138_6),
    (-0.238_619_186_083_196_9, 0.467_913_934_572_691_0),
    (0.238_619_186_083_196_9, 0.467_913_934_572_691_0),
    (0.661_209_386_466_264_5, 0.360_761_573_048_138_6),
    (0.932_469_514_203_152_1, 0.171_324_492_379_170_4),
];

/// Fixed 6-point Gauss-Legendre quadrature on `[a, b]`.
pub fn gauss6<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = 0.0;
    for (x, w) in GL6 {
        acc += w * f(mid + half * x);
    }
    acc * half
}

/// Least-squares straight line through `(x, y)` points.
/// Returns (slope, intercept, r^2).
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<(f64, f64, f64)> {
    let n = xs.len();
    if n < 2 || n != ys.len() {
        return Err(Error::InsufficientData(format!(
            "linear fit needs >= 2 paired points, got {n}"
        )));
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData("degenerate abscissae".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - (slope * x + intercept);
            r * r
        })
        .sum();
    let r2 = if ss_tot == 0.0 {
        1.0
    } else {
        1.0 - ss_res / ss_tot
    };
    Ok((slope, intercept, r2))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_finds_sqrt2() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert!((r - std::f64::consts::SQRT_2).abs() < 1e-13);
    }

    #[test]
    fn simpson_integrates_cos() {
        let v = adaptive_simpson(&|x: f64| x.cos(), 0.0, 1.0, 1e-12);
        assert!((v - 1.0_f64.sin()).abs() < 1e-11);
    }

    #[test]
    fn gauss6_exact_on_degree_nine() {
        let v = gauss6(|x| x.powi(9) + x.powi(4), 0.0, 1.0);
        assert!((v - (0.1 + 0.2)).abs() < 1e-14);
    }

    #[test]
    fn fit_recovers_planted_line() {
        let xs: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x - 7.0).collect();
        let (a, b, r2) = linear_fit(&xs, &ys).unwrap();
        assert!((a - 3.0).abs() < 1e-12 && (b + 7.0).abs() < 1e-10);
        assert!((r2 - 1.0).abs() < 1e-12);
    }
}
