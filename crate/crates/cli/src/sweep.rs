use rayon::prelude::*;
use starres_core::discord::bell_diagonal_quantifier;
use starres_core::markov::markov_quantifier;
use starres_core::quantum_rep::PauliHalfMixture;
use starres_core::total_corr::{tc_quantifier, JointDistribution};
use starres_core::unistochastic::{nu_quantifier, CirculantBistochastic};

use crate::error::CliError;
use crate::output::Table;
use crate::App;

fn in_tetrahedron(t: [f64; 3]) -> bool {
    let [a, b, c] = t;
    [1.0 - a - b - c, 1.0 - a + b + c, 1.0 + a - b + c, 1.0 + a + b - c]
        .iter()
        .all(|&v| v >= -1e-12)
}

/// All `(k₀, …, k₃)` with `Σkᵢ = n`, in lexicographic order, scaled by `1/n`.
fn simplex4(n: usize) -> Vec<[f64; 4]> {
    let mut pts = Vec::new();
    for a in 0..=n {
        for b in 0..=n - a {
            for c in 0..=n - a - b {
                let d = n - a - b - c;
                pts.push([a, b, c, d].map(|k| k as f64 / n as f64));
            }
        }
    }
    pts
}

/// Quantifier grid for `app`; rows come back in index order regardless of
/// the worker count.
pub fn sweep(app: App, resolution: usize) -> Result<Table, CliError> {
    if resolution < 2 {
        return Err(CliError::Input(format!("resolution must be at least 2, got {resolution}")));
    }
    let n = resolution - 1;
    let step = |k: usize| k as f64 / n as f64;
    match app {
        App::Discord => {
            let pts: Vec<[f64; 3]> = (0..=n)
                .flat_map(|i| (0..=n).flat_map(move |j| (0..=n).map(move |k| [i, j, k])))
                .map(|idx| idx.map(|k| -1.0 + 2.0 * step(k)))
                .filter(|&t| in_tetrahedron(t))
                .collect();
            let rows = pts
                .par_iter()
                .map(|&t| Ok(vec![t[0], t[1], t[2], bell_diagonal_quantifier(t)?]))
                .collect::<Result<_, starres_core::Error>>()?;
            Ok(Table::new(&["t1", "t2", "t3", "value"], rows))
        }
        App::Totalcorr => {
            let rows = simplex4(n)
                .par_iter()
                .map(|p| {
                    let r = tc_quantifier(&JointDistribution::from_flat(2, 2, p)?)?;
                    Ok(vec![p[0], p[1], p[2], p[3], r.value, r.margin])
                })
                .collect::<Result<_, starres_core::Error>>()?;
            Ok(Table::new(&["p00", "p01", "p10", "p11", "value", "witness"], rows))
        }
        App::Unisto => {
            let rows = simplex4(n)
                .par_iter()
                .map(|p| {
                    let r = nu_quantifier(&CirculantBistochastic::new(*p)?);
                    Ok(vec![p[0], p[1], p[2], p[3], r.value, r.margin])
                })
                .collect::<Result<_, starres_core::Error>>()?;
            Ok(Table::new(&["a", "b", "c", "d", "value", "witness"], rows))
        }
        App::Markov => {
            let pts: Vec<(usize, usize)> = (0..=n).flat_map(|i| (0..=n).map(move |j| (i, j))).collect();
            let rows = pts
                .par_iter()
                .map(|&(i, j)| {
                    let a = step(i);
                    let b = (1.0 - a) * step(j);
                    let c = (1.0 - a - b).max(0.0);
                    let r = markov_quantifier(&PauliHalfMixture::new(a, b, c)?)?;
                    Ok(vec![a, b, c, r.value, r.margin])
                })
                .collect::<Result<_, starres_core::Error>>()?;
            Ok(Table::new(&["a", "b", "c", "value", "witness"], rows))
        }
    }
}
