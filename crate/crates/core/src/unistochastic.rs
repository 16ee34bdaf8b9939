//! Non-unistochasticity of 4×4 circulant bistochastic matrices.
//!
//! A circulant `B = aΠ⁰ + bΠ + cΠ² + dΠ³` is identified with its generating
//! row `(a, b, c, d)` in the probability simplex. The auxiliary free set is
//! the union of the triangles `F1 = {b = d}` and `F2 = {a = c}`; the kernel
//! is the segment through `W₄` along `(Π+Π³)/2 − W₄`. Distances are
//! unhalved L1 on the generating row, which makes them `|b−d|` and `|a−c|`.

use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{check_finite, Error, Result};
use crate::numerics::{nnls::cholesky_solve, Metric, RealVector};
use crate::srt_core::{
    ConvexSection, Domain, Geometry, PolyhedralCone, SectionOracle, StarTheory, WitnessReport,
};

/// `1/(2√2)`: largest quantifier value over unistochastic circulants.
pub const NU_CRITICAL: f64 = 0.353_553_390_593_273_8;

const W4: [f64; 4] = [0.25; 4];
/// `(Π+Π³)/2 − W₄`.
const KERNEL_DIR: [f64; 4] = [-0.25, 0.25, -0.25, 0.25];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCirculant")]
pub struct CirculantBistochastic {
    row: [f64; 4],
}

#[derive(Deserialize)]
struct RawCirculant {
    row: [f64; 4],
}

impl TryFrom<RawCirculant> for CirculantBistochastic {
    type Error = Error;
    fn try_from(raw: RawCirculant) -> Result<Self> {
        Self::new(raw.row)
    }
}

impl CirculantBistochastic {
    pub fn new(row: [f64; 4]) -> Result<Self> {
        check_finite(&row, "generating row")?;
        if row.iter().any(|&x| x < -1e-12) {
            return Err(Error::Domain(format!("negative entry in {row:?}")));
        }
        let s: f64 = row.iter().sum();
        if (s - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!("row sums to {s}")));
        }
        Ok(Self { row })
    }

    /// Reads a full matrix, checking circulant and bistochastic structure.
    pub fn from_matrix(m: &[Vec<f64>], tol: f64) -> Result<Self> {
        if m.len() != 4 || m.iter().any(|r| r.len() != 4) {
            return Err(Error::Validation("expected a 4×4 matrix".into()));
        }
        let row = [m[0][0], m[0][1], m[0][2], m[0][3]];
        for (r, line) in m.iter().enumerate() {
            for (s, &x) in line.iter().enumerate() {
                if (x - row[(s + 4 - r) % 4]).abs() > tol {
                    return Err(Error::Domain(format!("entry ({r},{s}) breaks the circulant pattern")));
                }
            }
        }
        let s: f64 = row.iter().sum();
        if (s - 1.0).abs() > tol || row.iter().any(|&x| x < -tol) {
            return Err(Error::Domain("matrix is not bistochastic".into()));
        }
        let clipped = row.map(|x| x.max(0.0));
        let total: f64 = clipped.iter().sum();
        if (total - 1.0).abs() <= 1e-12 {
            Self::new(clipped)
        } else {
            Self::new(clipped.map(|x| x / total))
        }
    }

    pub fn row(&self) -> [f64; 4] {
        self.row
    }

    pub fn matrix(&self) -> [[f64; 4]; 4] {
        let mut m = [[0.0; 4]; 4];
        for (r, line) in m.iter_mut().enumerate() {
            for (s, x) in line.iter_mut().enumerate() {
                *x = self.row[(s + 4 - r) % 4];
            }
        }
        m
    }

    pub fn van_der_waerden() -> Self {
        Self { row: W4 }
    }

    pub fn permutation(power: usize) -> Self {
        let mut row = [0.0; 4];
        row[power % 4] = 1.0;
        Self { row }
    }

    /// `(1 − 1/√2)·W₄ + (1/√2)·(Π⁰+Π)/2`, where the optimal separating
    /// surface touches the unistochastic set.
    pub fn tangent_point() -> Self {
        let h = 0.25 / std::f64::consts::SQRT_2;
        Self { row: [0.25 + h, 0.25 + h, 0.25 - h, 0.25 - h] }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Triangle {
    F1,
    F2,
}

impl Triangle {
    fn vertices(self) -> Vec<RealVector> {
        match self {
            Triangle::F1 => vec![vec![1.0, 0.0, 0.0, 0.0], vec![0.0, 0.0, 1.0, 0.0], vec![0.0, 0.5, 0.0, 0.5]],
            Triangle::F2 => vec![vec![0.0, 1.0, 0.0, 0.0], vec![0.0, 0.0, 0.0, 1.0], vec![0.5, 0.0, 0.5, 0.0]],
        }
    }

    fn distance_row(self, r: &[f64]) -> f64 {
        match self {
            Triangle::F1 => (r[1] - r[3]).abs(),
            Triangle::F2 => (r[0] - r[2]).abs(),
        }
    }
}

/// L1 distance from the generating row to a free triangle. The row
/// `(a′, m, b′, m)` closest to `(a, b, c, d)` takes `m = (b+d)/2`, `a′ = a`,
/// `b′ = c`, which leaves `|b−d|`.
pub fn triangle_distance(b: &CirculantBistochastic, which: Triangle) -> f64 {
    which.distance_row(&b.row)
}

#[derive(Debug)]
struct TriangleOracle(Triangle);

impl SectionOracle for TriangleOracle {
    fn dim(&self) -> usize {
        4
    }

    fn distance(&self, theta: &[f64]) -> Result<f64> {
        crate::error::check_dim(4, theta.len())?;
        Ok(self.0.distance_row(theta))
    }

    fn defining_points(&self) -> Vec<RealVector> {
        self.0.vertices()
    }

    fn polytopal(&self) -> bool {
        true
    }

    fn kind(&self) -> &'static str {
        "unisto-triangle"
    }

    fn params(&self) -> Value {
        json!({ "which": self.0 })
    }
}

pub fn triangle_section(which: Triangle) -> ConvexSection {
    ConvexSection::new(format!("{which:?}"), Geometry::Callable(Arc::new(TriangleOracle(which))), Metric::L1)
        .expect("triangle oracle is well formed")
}

pub(crate) fn triangle_section_from_params(p: &Value) -> Result<ConvexSection> {
    #[derive(Deserialize)]
    struct Params {
        which: Triangle,
    }
    Ok(triangle_section(serde_json::from_value::<Params>(p.clone())?.which))
}

fn e(k: usize) -> RealVector {
    (0..4).map(|j| if j == k { 1.0 } else { 0.0 }).collect()
}

/// Cones in the order `(i, j) = (0,1), (0,3), (2,1), (2,3)`.
const CONE_PAIRS: [(usize, usize); 4] = [(0, 1), (0, 3), (2, 1), (2, 3)];

pub fn unisto_theory() -> Result<StarTheory> {
    let toward = |k: usize| -> RealVector { e(k).iter().zip(W4).map(|(x, w)| x - w).collect() };
    let domains = CONE_PAIRS
        .iter()
        .map(|&(i, j)| {
            let frame = vec![KERNEL_DIR.to_vec(), KERNEL_DIR.map(|x| -x).to_vec(), toward(i), toward(j)];
            Domain::new(
                PolyhedralCone::new(W4.to_vec(), frame)?,
                vec![triangle_section(Triangle::F1), triangle_section(Triangle::F2)],
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let kernel = vec![vec![0.0, 0.5, 0.0, 0.5], vec![0.5, 0.0, 0.5, 0.0]];
    StarTheory::new(4, kernel, domains, Some((0..4).map(e).collect()))
}

pub fn shared_theory() -> &'static StarTheory {
    static THEORY: OnceLock<StarTheory> = OnceLock::new();
    THEORY.get_or_init(|| unisto_theory().expect("fixed geometry is valid"))
}

/// Index of the cone holding `row`; ties go to the lower index.
pub fn cone_index(row: &[f64]) -> usize {
    2 * usize::from(row[0] < row[2]) + usize::from(row[1] < row[3])
}

/// Free-set oracle on generating rows: contact with `F1` or `F2`.
pub fn on_free_triangle(p: &[f64]) -> bool {
    p.len() == 4 && (Triangle::F1.distance_row(p) <= 1e-9 || Triangle::F2.distance_row(p) <= 1e-9)
}

pub fn nu_quantifier(b: &CirculantBistochastic) -> WitnessReport {
    let ds = vec![triangle_distance(b, Triangle::F1), triangle_distance(b, Triangle::F2)];
    WitnessReport::from_distances(cone_index(&b.row), ds, NU_CRITICAL)
        .expect("distances are finite and non-negative")
}

/// Positive values certify that `B` has no unitary counterpart.
pub fn nu_witness(b: &CirculantBistochastic) -> f64 {
    nu_quantifier(b).value - NU_CRITICAL
}

/// Contracts the frame coefficients along `Πᵢ − W₄` and `Πⱼ − W₄` of the
/// cone holding `B`, keeping the kernel-line coordinate `a + c` fixed.
pub fn nu_conic_contraction(b: &CirculantBistochastic, lambda_i: f64, lambda_j: f64) -> Result<CirculantBistochastic> {
    if !(0.0..=1.0).contains(&lambda_i) || !(0.0..=1.0).contains(&lambda_j) {
        return Err(Error::Domain("contraction factors must lie in [0, 1]".into()));
    }
    let [a, bb, c, d] = b.row;
    let (s, t) = (a + c, bb + d);
    let (u, v) = (lambda_i * (a - c), lambda_j * (bb - d));
    CirculantBistochastic::new([(s + u) / 2.0, (t + v) / 2.0, (s - u) / 2.0, (t - v) / 2.0])
}

/// `λ·B + (1−λ)·W₄`.
pub fn nu_shrink(b: &CirculantBistochastic, lambda: f64) -> Result<CirculantBistochastic> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::Domain(format!("lambda {lambda} outside [0, 1]")));
    }
    CirculantBistochastic::new(b.row.map(|x| lambda * x + (1.0 - lambda) * 0.25))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleVerdict {
    Unistochastic,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub best_residual: f64,
    pub verdict: OracleVerdict,
}

const ORACLE_THRESHOLD: f64 = 1e-6;

/// Off-diagonal Gram entries `G_rs = Σ_k conj(U_kr)·U_ks`, `r < s`.
fn gram_offdiag(u: &[[Complex64; 4]; 4]) -> Vec<Complex64> {
    let mut g = Vec::with_capacity(6);
    for r in 0..4 {
        for s in r + 1..4 {
            g.push((0..4).map(|k| u[k][r].conj() * u[k][s]).sum());
        }
    }
    g
}

fn phased(sqrt_b: &[[f64; 4]; 4], phi: &[f64]) -> [[Complex64; 4]; 4] {
    let mut u = [[Complex64::new(0.0, 0.0); 4]; 4];
    for k in 0..4 {
        for l in 0..4 {
            u[k][l] = Complex64::from_polar(sqrt_b[k][l], phi[4 * k + l]);
        }
    }
    u
}

/// `‖U†U − I‖_F`; diagonal terms vanish because `B` is bistochastic.
fn residual_norm(g: &[Complex64]) -> f64 {
    (2.0 * g.iter().map(|z| z.norm_sqr()).sum::<f64>()).sqrt()
}

/// Levenberg–Marquardt on the twelve real residuals `Re/Im G_rs` over the
/// sixteen phases.
fn refine_phases(sqrt_b: &[[f64; 4]; 4], mut phi: Vec<f64>) -> f64 {
    let mut mu = 1e-3;
    let mut u = phased(sqrt_b, &phi);
    let mut g = gram_offdiag(&u);
    let mut cost = residual_norm(&g);
    for _ in 0..400 {
        if cost < 1e-13 {
            break;
        }
        let mut jac = vec![[0.0; 16]; 12];
        let pairs: Vec<(usize, usize)> = (0..4).flat_map(|r| (r + 1..4).map(move |s| (r, s))).collect();
        for (idx, &(r, s)) in pairs.iter().enumerate() {
            for k in 0..4 {
                // dG_rs/dφ_ks = i·conj(U_kr)·U_ks, dG_rs/dφ_kr = −i·conj(U_kr)·U_ks.
                let z = Complex64::i() * u[k][r].conj() * u[k][s];
                jac[2 * idx][4 * k + s] += z.re;
                jac[2 * idx + 1][4 * k + s] += z.im;
                jac[2 * idx][4 * k + r] -= z.re;
                jac[2 * idx + 1][4 * k + r] -= z.im;
            }
        }
        let res: Vec<f64> = g.iter().flat_map(|z| [z.re, z.im]).collect();
        let mut jtj = vec![vec![0.0; 16]; 16];
        let mut jtr = vec![0.0; 16];
        for (row, rv) in jac.iter().zip(&res) {
            for a in 0..16 {
                jtr[a] += row[a] * rv;
                for b in 0..16 {
                    jtj[a][b] += row[a] * row[b];
                }
            }
        }
        let mut improved = false;
        for _ in 0..20 {
            let mut damped = jtj.clone();
            for (a, line) in damped.iter_mut().enumerate() {
                line[a] += mu * (1.0 + jtj[a][a]);
            }
            let Some(step) = cholesky_solve(&damped, &jtr, 1e-300) else {
                mu *= 10.0;
                continue;
            };
            let trial: Vec<f64> = phi.iter().zip(&step).map(|(p, d)| p - d).collect();
            let tu = phased(sqrt_b, &trial);
            let tg = gram_offdiag(&tu);
            let tc = residual_norm(&tg);
            if tc < cost {
                (phi, u, g, cost) = (trial, tu, tg, tc);
                mu = (mu / 3.0).max(1e-15);
                improved = true;
                break;
            }
            mu *= 10.0;
        }
        if !improved {
            break;
        }
    }
    cost
}

/// Searches for phases making `e^{iφ}∘√B` unitary. A residual below 10⁻⁶
/// proves unistochasticity; failure is only ever inconclusive.
pub fn unistochastic_oracle(b: &CirculantBistochastic, restarts: usize, seed: u64) -> OracleResult {
    let m = b.matrix();
    let sqrt_b = m.map(|r| r.map(|x| x.max(0.0).sqrt()));
    let best = (0..restarts.max(1) as u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k);
            let phi: Vec<f64> = (0..16).map(|_| rng.gen_range(0.0..std::f64::consts::TAU)).collect();
            refine_phases(&sqrt_b, phi)
        })
        .reduce(|| f64::INFINITY, f64::min);
    OracleResult {
        best_residual: best,
        verdict: if best < ORACLE_THRESHOLD { OracleVerdict::Unistochastic } else { OracleVerdict::Inconclusive },
    }
}
