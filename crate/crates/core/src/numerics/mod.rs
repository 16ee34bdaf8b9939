//! Small dense numerical kernels shared by every theory.

mod hermitian;
pub mod lp;
pub mod nnls;

pub use hermitian::{eigvalsh, trace_distance, trace_norm_half, HermitianMatrix};

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, check_finite, Error, Result};

pub type RealVector = Vec<f64>;

/// Distance used by a free section.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Metric {
    L1,
    L2,
    /// Total variation, `½·L1`.
    Tv,
    /// Half trace norm between Choi states.
    ChoiTrace,
}

impl Metric {
    pub fn vector_distance(self, a: &[f64], b: &[f64]) -> Result<f64> {
        check_dim(a.len(), b.len())?;
        let diffs = a.iter().zip(b).map(|(x, y)| x - y);
        match self {
            Metric::L1 => Ok(diffs.map(f64::abs).sum()),
            Metric::Tv => Ok(0.5 * diffs.map(f64::abs).sum::<f64>()),
            Metric::L2 => Ok(diffs.map(|d| d * d).sum::<f64>().sqrt()),
            Metric::ChoiTrace => Err(Error::Unsupported(
                "choi-trace distance needs a channel representation".into(),
            )),
        }
    }
}

/// `(∏ vⱼ)^(1/M)`, exactly zero when any factor is zero.
pub fn geometric_mean(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::Validation("geometric mean of an empty list".into()));
    }
    if let Some(bad) = values.iter().find(|v| !(**v >= 0.0) || v.is_infinite()) {
        return Err(Error::Domain(format!(
            "geometric mean needs finite non-negative values, got {bad}"
        )));
    }
    if values.contains(&0.0) {
        return Ok(0.0);
    }
    let first = values[0];
    if values.iter().all(|&v| v == first) {
        return Ok(first);
    }
    let mean_log = values.iter().map(|v| v.ln()).sum::<f64>() / values.len() as f64;
    Ok(mean_log.exp())
}

/// Minimizes `f` on `[lo, hi]`: a 64-interval scan locates the basin, then
/// golden-section search shrinks the bracket below `tol`.
pub fn minimize_1d<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> Result<(f64, f64)> {
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::Validation(format!("invalid interval [{lo}, {hi}]")));
    }
    if !(tol > 0.0) {
        return Err(Error::Validation("tolerance must be positive".into()));
    }
    const SCAN: usize = 64;
    let h = (hi - lo) / SCAN as f64;
    let grid: Vec<f64> = (0..=SCAN)
        .map(|k| if k == SCAN { hi } else { lo + k as f64 * h })
        .collect();
    let vals: Vec<f64> = grid.iter().map(|&x| f(x)).collect();
    let mut k_best = 0;
    for k in 1..=SCAN {
        if vals[k] < vals[k_best] {
            k_best = k;
        }
    }
    let mut best = (grid[k_best], vals[k_best]);
    let mut a = grid[k_best.saturating_sub(1)];
    let mut b = grid[(k_best + 1).min(SCAN)];

    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for (x, v) in [(c, fc), (d, fd)] {
        if v < best.1 {
            best = (x, v);
        }
    }
    while b - a > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
            if fc < best.1 {
                best = (c, fc);
            }
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
            if fd < best.1 {
                best = (d, fd);
            }
        }
    }
    Ok(best)
}

/// Closest point of `conv(vertices)` to `p` under `metric`.
///
/// L2 runs projected gradient on the barycentric weights followed by an
/// exact least-squares polish on the active support. L1 and TV are solved
/// exactly as linear programs.
pub fn project_onto_polytope(
    p: &[f64],
    vertices: &[RealVector],
    metric: Metric,
) -> Result<(RealVector, f64)> {
    if vertices.is_empty() {
        return Err(Error::Validation("polytope has no vertices".into()));
    }
    check_finite(p, "point")?;
    for v in vertices {
        check_dim(p.len(), v.len())?;
        check_finite(v, "vertex")?;
    }
    match metric {
        Metric::L2 => Ok(project_l2(p, vertices)),
        Metric::L1 | Metric::Tv => {
            let (closest, l1) = project_l1(p, vertices)?;
            let d = if metric == Metric::Tv { 0.5 * l1 } else { l1 };
            Ok((closest, d))
        }
        Metric::ChoiTrace => Err(Error::Unsupported(
            "choi-trace projection onto a vector polytope".into(),
        )),
    }
}

fn combine(vertices: &[RealVector], w: &[f64]) -> RealVector {
    let mut out = vec![0.0; vertices[0].len()];
    for (v, &wk) in vertices.iter().zip(w) {
        if wk != 0.0 {
            for (o, x) in out.iter_mut().zip(v) {
                *o += wk * x;
            }
        }
    }
    out
}

fn l2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn project_l1(p: &[f64], vertices: &[RealVector]) -> Result<(RealVector, f64)> {
    // Variables: w (k), e⁺ (d), e⁻ (d).  V w + e⁺ − e⁻ = p,  Σw = 1.
    let k = vertices.len();
    let d = p.len();
    let n = k + 2 * d;
    let mut a = Vec::with_capacity(d + 1);
    for i in 0..d {
        let mut row = vec![0.0; n];
        for (j, v) in vertices.iter().enumerate() {
            row[j] = v[i];
        }
        row[k + i] = 1.0;
        row[k + d + i] = -1.0;
        a.push(row);
    }
    let mut sum_row = vec![0.0; n];
    sum_row[..k].iter_mut().for_each(|x| *x = 1.0);
    a.push(sum_row);
    let mut b = p.to_vec();
    b.push(1.0);
    let mut c = vec![0.0; n];
    c[k..].iter_mut().for_each(|x| *x = 1.0);
    let sol = lp::solve_lp(&c, &a, &b)?;
    let w = &sol.x[..k];
    let total: f64 = w.iter().sum();
    let w: Vec<f64> = w.iter().map(|x| x / total).collect();
    let closest = combine(vertices, &w);
    let dist = closest.iter().zip(p).map(|(x, y)| (x - y).abs()).sum();
    Ok((closest, dist))
}

/// Euclidean projection onto the probability simplex.
pub fn project_to_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (i, ui) in u.iter().enumerate() {
        cumulative += ui;
        let t = (cumulative - 1.0) / (i + 1) as f64;
        if ui - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|x| (x - theta).max(0.0)).collect()
}

fn project_l2(p: &[f64], vertices: &[RealVector]) -> (RealVector, f64) {
    let k = vertices.len();
    if k == 1 {
        return (vertices[0].clone(), l2(p, &vertices[0]));
    }
    let objective = |w: &[f64]| {
        let x = combine(vertices, w);
        0.5 * x.iter().zip(p).map(|(a, b)| (a - b) * (a - b)).sum::<f64>()
    };
    let lipschitz: f64 = vertices
        .iter()
        .map(|v| v.iter().map(|x| x * x).sum::<f64>())
        .sum::<f64>()
        .max(1e-300);
    let mut w = vec![1.0 / k as f64; k];
    let mut f = objective(&w);
    let mut step = 1.0 / lipschitz;
    for _ in 0..100_000 {
        let x = combine(vertices, &w);
        let r: Vec<f64> = x.iter().zip(p).map(|(a, b)| a - b).collect();
        let grad: Vec<f64> = vertices
            .iter()
            .map(|v| v.iter().zip(&r).map(|(a, b)| a * b).sum())
            .collect();
        let mut accepted = None;
        let mut t = step;
        for _ in 0..60 {
            let trial: Vec<f64> = w.iter().zip(&grad).map(|(wi, g)| wi - t * g).collect();
            let trial = project_to_simplex(&trial);
            let ft = objective(&trial);
            if ft <= f {
                accepted = Some((trial, ft));
                break;
            }
            t *= 0.5;
        }
        let Some((next, fnext)) = accepted else { break };
        let improvement = f - fnext;
        w = next;
        f = fnext;
        step = (t * 2.0).min(1.0 / lipschitz * 4.0);
        if improvement < 1e-10 * 1e-10 {
            break;
        }
    }
    let mut best_w = w.clone();
    if let Some(polished) = polish_support(p, vertices, &w) {
        if objective(&polished) <= f {
            best_w = polished;
        }
    }
    let closest = combine(vertices, &best_w);
    let dist = l2(&closest, p);
    (closest, dist)
}

/// Equality-constrained least squares on the support of `w`.
fn polish_support(p: &[f64], vertices: &[RealVector], w: &[f64]) -> Option<Vec<f64>> {
    let support: Vec<usize> = (0..w.len()).filter(|&i| w[i] > 1e-9).collect();
    let s = support.len();
    if s == 0 {
        return None;
    }
    let last = support[s - 1];
    let base: Vec<f64> = vertices[last].iter().zip(p).map(|(a, b)| a - b).collect();
    let dirs: Vec<Vec<f64>> = support[..s - 1]
        .iter()
        .map(|&i| vertices[i].iter().zip(&vertices[last]).map(|(a, b)| a - b).collect())
        .collect();
    let m = dirs.len();
    let mut beta = Vec::new();
    if m > 0 {
        let mut g = vec![vec![0.0; m]; m];
        let mut h = vec![0.0; m];
        for i in 0..m {
            for j in 0..m {
                g[i][j] = dirs[i].iter().zip(&dirs[j]).map(|(a, b)| a * b).sum();
            }
            h[i] = -dirs[i].iter().zip(&base).map(|(a, b)| a * b).sum::<f64>();
        }
        let trace: f64 = (0..m).map(|i| g[i][i]).sum::<f64>().max(1e-300);
        for i in 0..m {
            g[i][i] += 1e-14 * trace;
        }
        beta = nnls::cholesky_solve(&g, &h, 0.0)?;
    }
    let mut out = vec![0.0; w.len()];
    let mut rest = 1.0;
    for (&i, &b) in support[..s - 1].iter().zip(&beta) {
        if b < -1e-12 {
            return None;
        }
        out[i] = b.max(0.0);
        rest -= out[i];
    }
    if rest < -1e-12 {
        return None;
    }
    out[last] = rest.max(0.0);
    let total: f64 = out.iter().sum();
    Some(out.iter().map(|x| x / total).collect())
}
