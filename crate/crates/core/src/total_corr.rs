//! Total correlations of bipartite output distributions.
//!
//! The free set holds noisy products `(1−ε)·p_A⊗p_B + ε·η`, with `η` the flat
//! distribution. Its polyhedral stand-in is the union of the faces
//! `F'_Ai = Conv(δ_{i0}, …, δ_{i,n_B−1}, η)` and `F'_Bj` (the transpose), with
//! one cone per outcome pair `(i, j)` spanned from `η` by the corners that
//! share a row or a column with `δ_ij`. Points are flattened row-major.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::numerics::{minimize_1d, Metric, RealVector};
use crate::srt_core::{
    cone_contains, g_monotone, ConvexSection, Domain, Geometry, PolyhedralCone, SectionOracle,
    StarTheory, WitnessReport, CONE_TOL,
};

/// Largest quantifier value over the 2×2 free set.
pub const TC_CRITICAL: f64 = 1.0 / 16.0;

const MEMBERSHIP_GRID: usize = 1000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawJoint")]
pub struct JointDistribution {
    #[serde(rename = "n_A")]
    n_a: usize,
    #[serde(rename = "n_B")]
    n_b: usize,
    p: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
struct RawJoint {
    p: Vec<Vec<f64>>,
}

impl TryFrom<RawJoint> for JointDistribution {
    type Error = Error;
    fn try_from(raw: RawJoint) -> Result<Self> {
        Self::new(raw.p)
    }
}

impl JointDistribution {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n_a = rows.len();
        let n_b = rows.first().map_or(0, Vec::len);
        if n_a < 2 || n_b < 2 {
            return Err(Error::Validation(format!("alphabets must have at least 2 letters, got {n_a}×{n_b}")));
        }
        if rows.iter().any(|r| r.len() != n_b) {
            return Err(Error::Validation("ragged probability matrix".into()));
        }
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        if flat.iter().any(|x| !x.is_finite() || *x < -1e-12) {
            return Err(Error::Domain("probabilities must be finite and non-negative".into()));
        }
        let total: f64 = flat.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::Domain(format!("probabilities sum to {total}")));
        }
        Ok(Self { n_a, n_b, p: rows })
    }

    pub fn from_flat(n_a: usize, n_b: usize, p: &[f64]) -> Result<Self> {
        if p.len() != n_a * n_b {
            return Err(Error::DimensionMismatch { expected: n_a * n_b, found: p.len() });
        }
        Self::new(p.chunks(n_b.max(1)).map(<[f64]>::to_vec).collect())
    }

    /// `(1−ε)·p_A⊗p_B + ε·η`.
    pub fn noisy_product(p_a: &[f64], p_b: &[f64], eps: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&eps) {
            return Err(Error::Domain(format!("noise level {eps} outside [0, 1]")));
        }
        let eta = 1.0 / (p_a.len() * p_b.len()) as f64;
        Self::new(
            p_a.iter()
                .map(|a| p_b.iter().map(|b| (1.0 - eps) * a * b + eps * eta).collect())
                .collect(),
        )
    }

    pub fn n_a(&self) -> usize {
        self.n_a
    }

    pub fn n_b(&self) -> usize {
        self.n_b
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.p
    }

    pub fn flat(&self) -> RealVector {
        self.p.iter().flatten().copied().collect()
    }

    pub fn transpose(&self) -> Self {
        Self {
            n_a: self.n_b,
            n_b: self.n_a,
            p: (0..self.n_b).map(|b| (0..self.n_a).map(|a| self.p[a][b]).collect()).collect(),
        }
    }

    /// Applies output relabelings `a → σ_A(a)`, `b → σ_B(b)`.
    pub fn relabel(&self, sigma_a: &[usize], sigma_b: &[usize]) -> Result<Self> {
        let is_perm = |s: &[usize], n: usize| {
            let mut seen = vec![false; n];
            s.len() == n && s.iter().all(|&k| k < n && !std::mem::replace(&mut seen[k], true))
        };
        if !is_perm(sigma_a, self.n_a) || !is_perm(sigma_b, self.n_b) {
            return Err(Error::Validation("relabelings must be permutations".into()));
        }
        let mut rows = vec![vec![0.0; self.n_b]; self.n_a];
        for a in 0..self.n_a {
            for b in 0..self.n_b {
                rows[sigma_a[a]][sigma_b[b]] = self.p[a][b];
            }
        }
        Ok(Self { p: rows, ..*self })
    }
}

/// Best rank-one approximation `σ·u·vᵀ` by power iteration; returns
/// `(u, v, residual)` with unit `u`, `v` and Frobenius residual.
fn rank_one(m: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>, f64) {
    let (rows, cols) = (m.len(), m[0].len());
    let mut v = vec![1.0 / (cols as f64).sqrt(); cols];
    let mut u = vec![0.0; rows];
    let mut sigma = 0.0;
    for _ in 0..500 {
        for (ui, row) in u.iter_mut().zip(m) {
            *ui = row.iter().zip(&v).map(|(a, b)| a * b).sum();
        }
        let nu = u.iter().map(|x| x * x).sum::<f64>().sqrt();
        if nu < 1e-300 {
            break;
        }
        u.iter_mut().for_each(|x| *x /= nu);
        let next: Vec<f64> = (0..cols).map(|c| (0..rows).map(|r| m[r][c] * u[r]).sum()).collect();
        let s = next.iter().map(|x| x * x).sum::<f64>().sqrt();
        if s < 1e-300 {
            sigma = 0.0;
            break;
        }
        let change: f64 = next.iter().zip(&v).map(|(a, b)| (a / s - b).abs()).fold(0.0, f64::max);
        v = next.into_iter().map(|x| x / s).collect();
        sigma = s;
        if change < 1e-15 {
            break;
        }
    }
    let residual = (0..rows)
        .flat_map(|r| (0..cols).map(move |c| (r, c)))
        .map(|(r, c)| (m[r][c] - sigma * u[r] * v[c]).powi(2))
        .sum::<f64>()
        .sqrt();
    (u, v, residual)
}

fn normalized_abs(x: &[f64], n: usize) -> Vec<f64> {
    let s: f64 = x.iter().map(|v| v.abs()).sum();
    if s < 1e-300 {
        vec![1.0 / n as f64; n]
    } else {
        x.iter().map(|v| v.abs() / s).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Membership {
    pub epsilon: f64,
    pub p_a: Vec<f64>,
    pub p_b: Vec<f64>,
}

/// Smallest `ε` with `p − ε·η` a non-negative rank-one matrix, to within `tol`.
///
/// `ε` is scanned on a 10⁻³ grid; each local minimum of the rank-one
/// residual is then refined by golden-section search.
pub fn tc_membership(p: &JointDistribution, tol: f64) -> Option<Membership> {
    let eta = 1.0 / (p.n_a * p.n_b) as f64;
    let shifted = |eps: f64| -> Vec<Vec<f64>> {
        p.p.iter().map(|r| r.iter().map(|x| x - eps * eta).collect()).collect()
    };
    let score = |eps: f64| -> f64 {
        let d = shifted(eps);
        let neg = d.iter().flatten().fold(0.0f64, |m, &x| m.max(-x));
        rank_one(&d).2 + neg
    };
    let grid: Vec<f64> = (0..=MEMBERSHIP_GRID).map(|k| score(k as f64 / MEMBERSHIP_GRID as f64)).collect();
    let step = 1.0 / MEMBERSHIP_GRID as f64;
    let mut best: Option<f64> = None;
    for k in 0..=MEMBERSHIP_GRID {
        let left = if k == 0 { f64::INFINITY } else { grid[k - 1] };
        let right = grid.get(k + 1).copied().unwrap_or(f64::INFINITY);
        if grid[k] > left || grid[k] > right {
            continue;
        }
        let eps = k as f64 * step;
        if grid[k] <= tol {
            best = Some(eps);
            break;
        }
        let (lo, hi) = ((eps - step).max(0.0), (eps + step).min(1.0));
        let (mut e, mut s) = minimize_1d(score, lo, hi, 1e-13).unwrap_or((eps, grid[k]));
        if grid[k] <= s {
            (e, s) = (eps, grid[k]);
        }
        if s <= tol {
            best = Some(e);
            break;
        }
    }
    let eps = best?;
    let d = shifted(eps);
    let (u, v, _) = rank_one(&d);
    Some(Membership {
        epsilon: eps,
        p_a: normalized_abs(&u, p.n_a),
        p_b: normalized_abs(&v, p.n_b),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Party {
    A,
    B,
}

/// Exact total-variation distance from `rows` to `Conv(δ_{i·}, η)`.
///
/// With `c = ε·η`, the optimal local distribution is found in closed form and
/// the remaining function of `c` is convex and piecewise linear, so its
/// minimum sits at a breakpoint.
fn row_face_distance(rows: &[Vec<f64>], i: usize) -> f64 {
    let n = (rows.len() * rows[0].len()) as f64;
    let eta = 1.0 / n;
    let f = |c: f64| -> f64 {
        let mut other = 0.0;
        let (mut pos, mut neg) = (0.0, 0.0);
        for (a, row) in rows.iter().enumerate() {
            for &x in row {
                if a == i {
                    let r = x - c;
                    if r > 0.0 {
                        pos += r;
                    } else {
                        neg -= r;
                    }
                } else {
                    other += (x - c).abs();
                }
            }
        }
        0.5 * (other + neg + (pos - (1.0 - n * c)).abs())
    };
    let h = |c: f64| -> f64 {
        rows[i].iter().map(|x| (x - c).max(0.0)).sum::<f64>() - (1.0 - n * c)
    };
    let mut breaks: Vec<f64> = rows.iter().flatten().copied().filter(|&x| x > 0.0 && x < eta).collect();
    breaks.extend([0.0, eta]);
    breaks.sort_by(f64::total_cmp);
    let mut candidates = breaks.clone();
    for w in breaks.windows(2) {
        let (h0, h1) = (h(w[0]), h(w[1]));
        if h0 * h1 < 0.0 {
            candidates.push(w[0] + (w[1] - w[0]) * h0 / (h0 - h1));
        }
    }
    candidates.into_iter().map(f).fold(f64::INFINITY, f64::min)
}

fn unflatten(theta: &[f64], n_a: usize, n_b: usize) -> Result<Vec<Vec<f64>>> {
    if theta.len() != n_a * n_b {
        return Err(Error::DimensionMismatch { expected: n_a * n_b, found: theta.len() });
    }
    crate::error::check_finite(theta, "point")?;
    Ok(theta.chunks(n_b).map(<[f64]>::to_vec).collect())
}

pub fn face_distance(p: &JointDistribution, party: Party, index: usize) -> Result<f64> {
    TcFace::new(p.n_a, p.n_b, party, index)?.distance(&p.flat())
}

#[derive(Debug)]
struct TcFace {
    n_a: usize,
    n_b: usize,
    party: Party,
    index: usize,
}

impl TcFace {
    fn new(n_a: usize, n_b: usize, party: Party, index: usize) -> Result<Self> {
        let limit = match party {
            Party::A => n_a,
            Party::B => n_b,
        };
        if n_a < 2 || n_b < 2 || index >= limit {
            return Err(Error::Validation(format!(
                "no face {party:?}{index} for a {n_a}×{n_b} alphabet"
            )));
        }
        Ok(Self { n_a, n_b, party, index })
    }
}

impl SectionOracle for TcFace {
    fn dim(&self) -> usize {
        self.n_a * self.n_b
    }

    fn distance(&self, theta: &[f64]) -> Result<f64> {
        let rows = unflatten(theta, self.n_a, self.n_b)?;
        Ok(match self.party {
            Party::A => row_face_distance(&rows, self.index),
            Party::B => {
                let t: Vec<Vec<f64>> = (0..self.n_b).map(|b| rows.iter().map(|r| r[b]).collect()).collect();
                row_face_distance(&t, self.index)
            }
        })
    }

    fn defining_points(&self) -> Vec<RealVector> {
        let n = self.n_a * self.n_b;
        let mut pts: Vec<RealVector> = match self.party {
            Party::A => (0..self.n_b).map(|b| corner(self.n_b, n, self.index, b)).collect(),
            Party::B => (0..self.n_a).map(|a| corner(self.n_b, n, a, self.index)).collect(),
        };
        pts.push(vec![1.0 / n as f64; n]);
        pts
    }

    fn polytopal(&self) -> bool {
        true
    }

    fn kind(&self) -> &'static str {
        "tc-face"
    }

    fn params(&self) -> Value {
        json!({ "n_A": self.n_a, "n_B": self.n_b, "party": self.party, "index": self.index })
    }
}

fn corner(n_b: usize, n: usize, a: usize, b: usize) -> RealVector {
    let mut v = vec![0.0; n];
    v[a * n_b + b] = 1.0;
    v
}

pub fn face_section(n_a: usize, n_b: usize, party: Party, index: usize) -> Result<ConvexSection> {
    let label = format!("F'{party:?}{index}");
    ConvexSection::new(
        label,
        Geometry::Callable(Arc::new(TcFace::new(n_a, n_b, party, index)?)),
        Metric::Tv,
    )
}

pub(crate) fn face_section_from_params(p: &Value) -> Result<ConvexSection> {
    #[derive(Deserialize)]
    struct Params {
        #[serde(rename = "n_A")]
        n_a: usize,
        #[serde(rename = "n_B")]
        n_b: usize,
        party: Party,
        index: usize,
    }
    let q: Params = serde_json::from_value(p.clone())?;
    face_section(q.n_a, q.n_b, q.party, q.index)
}

/// Domain `i·n_B + j` holds the cone at `(i, j)` with sections `[F'_Ai, F'_Bj]`.
pub fn tc_theory(n_a: usize, n_b: usize) -> Result<StarTheory> {
    if n_a < 2 || n_b < 2 {
        return Err(Error::Validation(format!("alphabets must have at least 2 letters, got {n_a}×{n_b}")));
    }
    let n = n_a * n_b;
    let eta = vec![1.0 / n as f64; n];
    let edge = |a: usize, b: usize| -> RealVector {
        corner(n_b, n, a, b).iter().zip(&eta).map(|(x, e)| x - e).collect()
    };
    let mut domains = Vec::with_capacity(n);
    for i in 0..n_a {
        for j in 0..n_b {
            let mut frame = vec![edge(i, j)];
            frame.extend((0..n_b).filter(|&k| k != j).map(|k| edge(i, k)));
            frame.extend((0..n_a).filter(|&l| l != i).map(|l| edge(l, j)));
            domains.push(Domain::new(
                PolyhedralCone::new(eta.clone(), frame)?,
                vec![face_section(n_a, n_b, Party::A, i)?, face_section(n_a, n_b, Party::B, j)?],
            )?);
        }
    }
    let ambient = (0..n_a).flat_map(|a| (0..n_b).map(move |b| corner(n_b, n, a, b))).collect();
    StarTheory::new(n, vec![eta], domains, Some(ambient))
}

fn cached_theory(n_a: usize, n_b: usize) -> Result<Arc<StarTheory>> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<StarTheory>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(t) = cache.lock().expect("theory cache poisoned").get(&(n_a, n_b)) {
        return Ok(t.clone());
    }
    let t = Arc::new(tc_theory(n_a, n_b)?);
    cache.lock().expect("theory cache poisoned").insert((n_a, n_b), t.clone());
    Ok(t)
}

/// Whether `p` lies on one of the faces of the auxiliary free set.
pub fn on_auxiliary_face(p: &JointDistribution) -> Result<bool> {
    for i in 0..p.n_a {
        if face_distance(p, Party::A, i)? <= 1e-9 {
            return Ok(true);
        }
    }
    for j in 0..p.n_b {
        if face_distance(p, Party::B, j)? <= 1e-9 {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Geometric-mean quantifier over the cone fortress. The report carries the
/// 2×2 critical constant; larger alphabets report a critical value of zero.
pub fn tc_quantifier(p: &JointDistribution) -> Result<WitnessReport> {
    let t = cached_theory(p.n_a, p.n_b)?;
    let critical = if p.n_a == 2 && p.n_b == 2 { TC_CRITICAL } else { 0.0 };
    Ok(g_monotone(&p.flat(), &t)?.with_critical(critical))
}

/// `tc_quantifier − 1/16`; positive certifies total correlations.
pub fn tc_witness(p: &JointDistribution) -> Result<f64> {
    if p.n_a != 2 || p.n_b != 2 {
        return Err(Error::Unsupported(format!(
            "critical constant only known for 2×2 alphabets, got {}×{}",
            p.n_a, p.n_b
        )));
    }
    Ok(tc_quantifier(p)?.value - TC_CRITICAL)
}

/// Factorized contraction `λ_kl = λ_A[k]·λ_B[l]` of the frame coefficients in
/// the first cone `(i, j)` containing `p`, with the anchor outcomes pinned:
/// `λ_A[i] = λ_B[j] = 1`. Without the pin the map leaves the free set.
pub fn tc_free_op(p: &JointDistribution, lam_a: &[f64], lam_b: &[f64]) -> Result<JointDistribution> {
    if lam_a.len() != p.n_a {
        return Err(Error::DimensionMismatch { expected: p.n_a, found: lam_a.len() });
    }
    if lam_b.len() != p.n_b {
        return Err(Error::DimensionMismatch { expected: p.n_b, found: lam_b.len() });
    }
    if lam_a.iter().chain(lam_b).any(|l| !(0.0..=1.0).contains(l)) {
        return Err(Error::Domain("local factors must lie in [0, 1]".into()));
    }
    let t = cached_theory(p.n_a, p.n_b)?;
    let theta = p.flat();
    for (idx, d) in t.domains.iter().enumerate() {
        if !cone_contains(&d.cone, &theta, CONE_TOL)? {
            continue;
        }
        let (i, j) = (idx / p.n_b, idx % p.n_b);
        let (alpha, _) = d.cone.decompose(&theta)?;
        let mut cells = vec![(i, j)];
        cells.extend((0..p.n_b).filter(|&k| k != j).map(|k| (i, k)));
        cells.extend((0..p.n_a).filter(|&l| l != i).map(|l| (l, j)));
        let factor = |k: usize, l: usize| {
            let la = if k == i { 1.0 } else { lam_a[k] };
            let lb = if l == j { 1.0 } else { lam_b[l] };
            la * lb
        };
        let scaled: Vec<f64> = alpha
            .iter()
            .zip(&cells)
            .map(|(a, &(k, l))| a.max(0.0) * factor(k, l))
            .collect();
        let out: Vec<f64> = d.cone.compose(&scaled)?.into_iter().map(|x| x.max(0.0)).collect();
        let total: f64 = out.iter().sum();
        return JointDistribution::from_flat(p.n_a, p.n_b, &out.iter().map(|x| x / total).collect::<Vec<_>>());
    }
    Err(Error::Domain("distribution lies outside every cone; frame coefficients unavailable".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::project_onto_polytope;
    use crate::srt_core::validate_fortress;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn jd(rows: &[[f64; 2]; 2]) -> JointDistribution {
        JointDistribution::new(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    fn perfect() -> JointDistribution {
        jd(&[[0.5, 0.0], [0.0, 0.5]])
    }

    /// `det(p − tη)` is affine in `t` for 2×2 tables.
    fn det_oracle_free(p: &JointDistribution) -> bool {
        let r = p.rows();
        let det0 = r[0][0] * r[1][1] - r[0][1] * r[1][0];
        let slope = -(r[0][0] + r[1][1] - r[0][1] - r[1][0]) / 4.0;
        let feasible = |t: f64| (0..2).all(|a| (0..2).all(|b| r[a][b] - t / 4.0 >= -1e-9));
        if slope.abs() < 1e-14 {
            return det0.abs() < 1e-12 && feasible(0.0);
        }
        let t = -det0 / slope;
        (-1e-9..=1.0 + 1e-9).contains(&t) && feasible(t.clamp(0.0, 1.0))
    }

    #[test]
    fn validation() {
        assert!(JointDistribution::new(vec![vec![1.0]]).is_err());
        assert!(JointDistribution::new(vec![vec![0.5, 0.5], vec![0.1, 0.0]]).is_err());
        assert!(JointDistribution::new(vec![vec![1.2, -0.2], vec![0.0, 0.0]]).is_err());
        let p: JointDistribution = serde_json::from_str(r#"{"p": [[0.25, 0.25], [0.25, 0.25]]}"#).unwrap();
        assert_eq!(p.n_a(), 2);
        assert!(serde_json::from_str::<JointDistribution>(r#"{"p": [[0.5, 0.25], [0.25, 0.25]]}"#).is_err());
    }

    #[test]
    fn membership_examples() {
        let prod = JointDistribution::noisy_product(&[0.3, 0.7], &[0.6, 0.4], 0.0).unwrap();
        let m = tc_membership(&prod, 1e-9).unwrap();
        assert_eq!(m.epsilon, 0.0);
        assert!((m.p_a[0] - 0.3).abs() < 1e-9 && (m.p_b[0] - 0.6).abs() < 1e-9);
        let flat = jd(&[[0.25, 0.25], [0.25, 0.25]]);
        assert_eq!(tc_membership(&flat, 1e-9).unwrap().epsilon, 0.0);
        assert!(tc_membership(&perfect(), 1e-6).is_none());
        let noisy = JointDistribution::noisy_product(&[0.9, 0.1], &[0.2, 0.8], 0.3337).unwrap();
        let m = tc_membership(&noisy, 1e-8).unwrap();
        assert!((m.epsilon - 0.3337).abs() < 1e-6, "{m:?}");
    }

    #[test]
    fn face_distance_matches_lp() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (n_a, n_b) in [(2, 2), (2, 3), (3, 3)] {
            let t = tc_theory(n_a, n_b).unwrap();
            for _ in 0..40 {
                let w: Vec<f64> = (0..n_a * n_b).map(|_| -rng.gen::<f64>().ln()).collect();
                let s: f64 = w.iter().sum();
                let p: Vec<f64> = w.iter().map(|x| x / s).collect();
                for sec in t.sections() {
                    let lp = project_onto_polytope(&p, &sec.polytope_vertices().unwrap(), Metric::Tv).unwrap().1;
                    let closed = crate::srt_core::section_distance(&p, sec).unwrap();
                    assert!((lp - closed).abs() < 1e-9, "{lp} vs {closed}");
                }
            }
        }
    }

    #[test]
    fn theory_shape() {
        let t = tc_theory(2, 2).unwrap();
        assert_eq!(t.domains.len(), 4);
        assert!(t.domains.iter().all(|d| d.sections.len() == 2));
        let labels: std::collections::BTreeSet<_> = t.sections().map(|s| s.label.clone()).collect();
        assert_eq!(labels.len(), 4);
        for s in t.sections() {
            assert!(crate::srt_core::section_distance(&[0.25; 4], s).unwrap() < 1e-15);
        }
        assert!(tc_theory(1, 2).is_err());
    }

    #[test]
    fn quantifier_examples() {
        let prod = JointDistribution::noisy_product(&[0.3, 0.7], &[0.6, 0.4], 0.0).unwrap();
        assert!(tc_quantifier(&prod).unwrap().value <= TC_CRITICAL + 1e-12);
        let extremal = JointDistribution::noisy_product(&[0.75, 0.25], &[0.75, 0.25], 0.0).unwrap();
        assert!((tc_quantifier(&extremal).unwrap().value - TC_CRITICAL).abs() < 1e-12);
        assert!(tc_witness(&extremal).unwrap().abs() < 1e-12);
        let det = JointDistribution::noisy_product(&[1.0, 0.0], &[0.0, 1.0], 0.0).unwrap();
        assert_eq!(tc_quantifier(&det).unwrap().value, 0.0);
        assert!((tc_witness(&det).unwrap() + TC_CRITICAL).abs() < 1e-15);
        let r = tc_quantifier(&perfect()).unwrap();
        assert!((r.value - 1.0 / 3.0).abs() < 1e-12);
        assert!((tc_witness(&perfect()).unwrap() - 13.0 / 48.0).abs() < 1e-12);
        let three = JointDistribution::noisy_product(&[0.2, 0.3, 0.5], &[0.5, 0.5], 0.1).unwrap();
        assert!(matches!(tc_witness(&three), Err(Error::Unsupported(_))));
    }

    #[test]
    fn larger_alphabets_leave_gaps() {
        let t = tc_theory(3, 3).unwrap();
        let free = |p: &[f64]| {
            JointDistribution::from_flat(3, 3, p).is_ok_and(|j| on_auxiliary_face(&j).unwrap())
        };
        let r = validate_fortress(&t, &free, 500, 2);
        assert!(!r.condition_passed(1));
        let p = JointDistribution::noisy_product(&[1.0 / 3.0; 3], &[1.0 / 3.0; 3], 0.0).unwrap();
        assert_eq!(tc_quantifier(&p).unwrap().value, 0.0);
    }

    #[test]
    fn fortress_passes_and_breaks() {
        let t = tc_theory(2, 2).unwrap();
        let free = |p: &[f64]| {
            JointDistribution::from_flat(2, 2, p).is_ok_and(|j| on_auxiliary_face(&j).unwrap())
        };
        let r = validate_fortress(&t, &free, 10_000, 4);
        assert!(r.passed, "{:?}", r.counterexamples);
        let r = validate_fortress(&t.without_domain(0).unwrap(), &free, 2000, 4);
        assert!(!r.condition_passed(1));
    }

    #[test]
    fn free_op_examples() {
        let p = JointDistribution::noisy_product(&[0.6, 0.4], &[0.7, 0.3], 0.2).unwrap();
        let same = tc_free_op(&p, &[1.0, 1.0], &[1.0, 1.0]).unwrap();
        assert!(same.flat().iter().zip(p.flat()).all(|(a, b)| (a - b).abs() < 1e-12));
        let cut = tc_free_op(&p, &[1.0, 0.0], &[1.0, 1.0]).unwrap();
        assert!(tc_membership(&cut, 1e-6).is_some());
        let r = cut.rows();
        assert!((r[1][0] - r[1][1]).abs() < 1e-12 && cut.flat().iter().all(|&x| x > 0.0));
        assert!(tc_free_op(&p, &[1.0], &[1.0, 1.0]).is_err());
        assert!(tc_free_op(&p, &[1.5, 1.0], &[1.0, 1.0]).is_err());
        let flat = jd(&[[0.25, 0.25], [0.25, 0.25]]);
        assert_eq!(tc_free_op(&flat, &[0.3, 0.2], &[0.1, 0.9]).unwrap().flat(), vec![0.25; 4]);
    }

    #[test]
    fn json_round_trip() {
        let t = tc_theory(2, 2).unwrap();
        let back = StarTheory::from_json(&t.to_json().unwrap()).unwrap();
        let p = perfect().flat();
        assert_eq!(g_monotone(&p, &t).unwrap(), g_monotone(&p, &back).unwrap());
    }

    fn noisy_product_2x2() -> impl Strategy<Value = JointDistribution> {
        (0.0f64..=1.0, 0.0f64..=1.0, 0.0f64..=1.0)
            .prop_map(|(x, y, e)| JointDistribution::noisy_product(&[x, 1.0 - x], &[y, 1.0 - y], e).unwrap())
    }

    fn any_2x2() -> impl Strategy<Value = JointDistribution> {
        proptest::collection::vec(0.001f64..1.0, 4).prop_map(|w| {
            let s: f64 = w.iter().sum();
            JointDistribution::from_flat(2, 2, &w.iter().map(|x| x / s).collect::<Vec<_>>()).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(400))]

        #[test]
        fn witness_is_sound(p in noisy_product_2x2()) {
            prop_assert!(tc_witness(&p).unwrap() <= 1e-9);
        }

        #[test]
        fn relabeling_invariance(p in any_2x2(), sa in 0usize..2, sb in 0usize..2) {
            let perm = |s: usize| if s == 0 { vec![0, 1] } else { vec![1, 0] };
            let q = p.relabel(&perm(sa), &perm(sb)).unwrap();
            prop_assert!((tc_quantifier(&p).unwrap().value - tc_quantifier(&q).unwrap().value).abs() < 1e-12);
            let t = p.transpose();
            prop_assert!((tc_quantifier(&p).unwrap().value - tc_quantifier(&t).unwrap().value).abs() < 1e-12);
        }

        #[test]
        fn membership_matches_determinant_oracle(p in any_2x2()) {
            let found = tc_membership(&p, 1e-7).is_some();
            if det_oracle_free(&p) {
                prop_assert!(found);
            }
        }

        #[test]
        fn membership_accepts_noisy_products(p in noisy_product_2x2()) {
            prop_assert!(tc_membership(&p, 1e-6).is_some());
        }

        #[test]
        fn free_op_preserves_free_set(p in noisy_product_2x2(), la in proptest::collection::vec(0.0f64..=1.0, 2), lb in proptest::collection::vec(0.0f64..=1.0, 2)) {
            let q = tc_free_op(&p, &la, &lb).unwrap();
            prop_assert!(det_oracle_free(&q), "{:?} -> {:?}", p, q);
            prop_assert!(tc_witness(&q).unwrap() <= 1e-9);
        }
    }
}
