//! Dense two-phase simplex for small standard-form programs
//! `min cᵀx  s.t.  A x = b, x ≥ 0`.

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
}

const PIVOT_TOL: f64 = 1e-11;
const COST_TOL: f64 = 1e-11;
const MAX_PIVOTS: usize = 100_000;

struct Tableau {
    rows: Vec<Vec<f64>>,
    cost: Vec<f64>,
    basis: Vec<usize>,
    width: usize,
}

impl Tableau {
    fn rhs(&self) -> usize {
        self.width - 1
    }

    fn pivot(&mut self, r: usize, col: usize) {
        let p = self.rows[r][col];
        for v in self.rows[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                let f = row[col];
                if f != 0.0 {
                    for (v, pv) in row.iter_mut().zip(&pivot_row) {
                        *v -= f * pv;
                    }
                }
            }
        }
        let f = self.cost[col];
        if f != 0.0 {
            for (v, pv) in self.cost.iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
        }
        self.basis[r] = col;
    }

    /// Bland's rule iterations over columns `< allowed`.
    fn run(&mut self, allowed: usize) -> Result<()> {
        let rhs = self.rhs();
        for _ in 0..MAX_PIVOTS {
            let Some(col) = (0..allowed).find(|&j| self.cost[j] < -COST_TOL) else {
                return Ok(());
            };
            let mut best: Option<(usize, f64)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                let a = row[col];
                if a > PIVOT_TOL {
                    let ratio = row[rhs] / a;
                    best = match best {
                        None => Some((i, ratio)),
                        Some((bi, br)) => {
                            if ratio < br - 1e-14
                                || (ratio <= br + 1e-14 && self.basis[i] < self.basis[bi])
                            {
                                Some((i, ratio))
                            } else {
                                Some((bi, br))
                            }
                        }
                    };
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, col),
                None => return Err(Error::Infeasible("linear program is unbounded".into())),
            }
        }
        Err(Error::Degenerate("simplex pivot limit reached".into()))
    }
}

pub fn solve_lp(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> Result<LpSolution> {
    let n = c.len();
    let m = a.len();
    if b.len() != m || a.iter().any(|row| row.len() != n) {
        return Err(Error::Validation("inconsistent linear program shape".into()));
    }
    let width = n + m + 1;
    let mut rows = Vec::with_capacity(m);
    for (i, row) in a.iter().enumerate() {
        let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
        let mut t = vec![0.0; width];
        for (j, v) in row.iter().enumerate() {
            t[j] = sign * v;
        }
        t[n + i] = 1.0;
        t[width - 1] = sign * b[i];
        rows.push(t);
    }
    let mut cost = vec![0.0; width];
    for row in &rows {
        for j in 0..n {
            cost[j] -= row[j];
        }
        cost[width - 1] -= row[width - 1];
    }
    let mut tab = Tableau {
        rows,
        cost,
        basis: (n..n + m).collect(),
        width,
    };
    tab.run(n + m)?;

    let scale = 1.0 + b.iter().map(|v| v.abs()).fold(0.0, f64::max);
    if -tab.cost[width - 1] > 1e-9 * scale {
        return Err(Error::Infeasible("linear program has no feasible point".into()));
    }

    // Drive artificial variables out of the basis; drop redundant rows.
    let mut r = 0;
    while r < tab.rows.len() {
        if tab.basis[r] >= n {
            let col = (0..n)
                .filter(|&j| tab.rows[r][j].abs() > 1e-9)
                .max_by(|&x, &y| tab.rows[r][x].abs().total_cmp(&tab.rows[r][y].abs()));
            match col {
                Some(j) => tab.pivot(r, j),
                None => {
                    tab.rows.remove(r);
                    tab.basis.remove(r);
                    continue;
                }
            }
        }
        r += 1;
    }

    let rhs = width - 1;
    let mut cost = vec![0.0; width];
    cost[..n].copy_from_slice(c);
    for (i, &bv) in tab.basis.iter().enumerate() {
        let cb = if bv < n { c[bv] } else { 0.0 };
        if cb != 0.0 {
            for (v, rv) in cost.iter_mut().zip(&tab.rows[i]) {
                *v -= cb * rv;
            }
        }
    }
    tab.cost = cost;
    tab.run(n)?;

    let mut x = vec![0.0; n];
    for (i, &bv) in tab.basis.iter().enumerate() {
        if bv < n {
            x[bv] = tab.rows[i][rhs].max(0.0);
        }
    }
    let objective = c.iter().zip(&x).map(|(ci, xi)| ci * xi).sum();
    Ok(LpSolution { x, objective })
}
