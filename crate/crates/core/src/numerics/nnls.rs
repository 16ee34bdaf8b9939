//! Lawson–Hanson non-negative least squares on the normal equations.

/// Result of `min ‖Σ xⱼ colⱼ − b‖` over `x ≥ 0`.
#[derive(Clone, Debug)]
pub struct NnlsSolution {
    pub coefficients: Vec<f64>,
    pub residual: f64,
}

/// Plain NNLS. `ridge > 0` adds `ridge·‖x‖²` to the objective, which selects
/// (approximately) the minimal-norm solution when columns are dependent.
pub fn nnls(cols: &[Vec<f64>], b: &[f64], ridge: f64) -> NnlsSolution {
    let n = cols.len();
    let dot = |u: &[f64], v: &[f64]| u.iter().zip(v).map(|(a, b)| a * b).sum::<f64>();
    let mut gram = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i..n {
            let g = dot(&cols[i], &cols[j]);
            gram[i][j] = g;
            gram[j][i] = g;
        }
        gram[i][i] += ridge;
    }
    let h: Vec<f64> = cols.iter().map(|c| dot(c, b)).collect();
    let col_scale = cols
        .iter()
        .map(|c| dot(c, c).sqrt())
        .fold(0.0, f64::max)
        .max(1e-300);
    let b_norm = dot(b, b).sqrt();
    let w_tol = 1e-13 * col_scale * b_norm.max(col_scale);

    let mut x = vec![0.0; n];
    let mut passive = vec![false; n];
    let gradient = |x: &[f64]| -> Vec<f64> {
        (0..n)
            .map(|i| h[i] - (0..n).map(|j| gram[i][j] * x[j]).sum::<f64>())
            .collect()
    };

    for _outer in 0..(3 * n + 10) {
        let w = gradient(&x);
        let candidate = (0..n)
            .filter(|&j| !passive[j] && w[j] > w_tol)
            .max_by(|&a, &b| w[a].total_cmp(&w[b]));
        let Some(j) = candidate else { break };
        passive[j] = true;
        let mut admitted = false;
        for _inner in 0..(3 * n + 10) {
            let idx: Vec<usize> = (0..n).filter(|&k| passive[k]).collect();
            let z_p = solve_spd(&gram, &h, &idx);
            if idx.iter().zip(&z_p).all(|(_, &z)| z > 0.0) {
                for (&k, &z) in idx.iter().zip(&z_p) {
                    x[k] = z;
                }
                admitted = true;
                break;
            }
            let mut alpha = f64::INFINITY;
            for (&k, &z) in idx.iter().zip(&z_p) {
                if z <= 0.0 {
                    let denom = x[k] - z;
                    if denom > 0.0 {
                        alpha = alpha.min(x[k] / denom);
                    } else {
                        alpha = alpha.min(0.0);
                    }
                }
            }
            let alpha = alpha.clamp(0.0, 1.0);
            for (&k, &z) in idx.iter().zip(&z_p) {
                x[k] += alpha * (z - x[k]);
                if x[k] <= 1e-15 * (1.0 + z.abs()) {
                    x[k] = 0.0;
                    passive[k] = false;
                }
            }
        }
        if !admitted && !passive[j] {
            // The freshly admitted column could not stay positive; stop to avoid cycling.
            break;
        }
    }

    let mut fit = vec![0.0; b.len()];
    for (c, &xi) in cols.iter().zip(&x) {
        if xi != 0.0 {
            for (f, v) in fit.iter_mut().zip(c) {
                *f += xi * v;
            }
        }
    }
    let residual = fit
        .iter()
        .zip(b)
        .map(|(f, bi)| (f - bi) * (f - bi))
        .sum::<f64>()
        .sqrt();
    NnlsSolution {
        coefficients: x,
        residual,
    }
}

/// Solves the sub-system `G[idx,idx] z = h[idx]` by Cholesky, adding a small
/// ridge if the block is numerically singular.
fn solve_spd(gram: &[Vec<f64>], h: &[f64], idx: &[usize]) -> Vec<f64> {
    let k = idx.len();
    let trace: f64 = idx.iter().map(|&i| gram[i][i]).sum::<f64>().max(1e-300);
    let mut shift = 0.0;
    loop {
        let a: Vec<Vec<f64>> = idx
            .iter()
            .map(|&i| {
                idx.iter()
                    .map(|&j| gram[i][j] + if i == j { shift } else { 0.0 })
                    .collect()
            })
            .collect();
        let rhs: Vec<f64> = idx.iter().map(|&i| h[i]).collect();
        if let Some(z) = cholesky_solve(&a, &rhs, 1e-13 * trace) {
            return z;
        }
        shift = if shift == 0.0 { 1e-12 * trace } else { shift * 100.0 };
        if k == 0 {
            return Vec::new();
        }
    }
}

pub(crate) fn cholesky_solve(a: &[Vec<f64>], b: &[f64], min_pivot: f64) -> Option<Vec<f64>> {
    let n = b.len();
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let s: f64 = (0..j).map(|k| l[i][k] * l[j][k]).sum();
            if i == j {
                let d = a[i][i] - s;
                if d <= min_pivot {
                    return None;
                }
                l[i][i] = d.sqrt();
            } else {
                l[i][j] = (a[i][j] - s) / l[j][j];
            }
        }
    }
    let mut y = vec![0.0; n];
    for i in 0..n {
        y[i] = (b[i] - (0..i).map(|k| l[i][k] * y[k]).sum::<f64>()) / l[i][i];
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        x[i] = (y[i] - ((i + 1)..n).map(|k| l[k][i] * x[k]).sum::<f64>()) / l[i][i];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_nonnegative_combination() {
        let cols = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]];
        let sol = nnls(&cols, &[2.0, 3.0], 0.0);
        assert!(sol.residual < 1e-12);
        assert!(sol.coefficients.iter().all(|&c| c >= 0.0));
    }

    #[test]
    fn outside_cone_has_positive_residual() {
        let cols = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let sol = nnls(&cols, &[-1.0, 0.0], 0.0);
        assert!((sol.residual - 1.0).abs() < 1e-12);
        assert_eq!(sol.coefficients, vec![0.0, 0.0]);
    }

    #[test]
    fn ridge_picks_small_norm_for_opposite_columns() {
        let cols = vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0]];
        let sol = nnls(&cols, &[0.5, 1.0], 1e-12);
        assert!(sol.residual < 1e-9);
        assert!(sol.coefficients[1] < 1e-6);
        assert!((sol.coefficients[0] - 0.5).abs() < 1e-6);
    }
}
