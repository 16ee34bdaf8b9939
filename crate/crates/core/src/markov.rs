//! Non-Markovianity witness for mixtures of the three half-strength Pauli
//! channels `Γⱼ^½`, in barycentric coordinates `(a, b, c)`.
//!
//! The Markovian set contains the three segments `Fⱼ` joining the
//! depolarizing point `Γ_d^½ = (⅓,⅓,⅓)` to each vertex. Cone `C_k` has apex
//! `Γ_d^½` and is spanned by the directions to the two other vertices; its
//! free sections are the two segments on its edges.

use std::sync::{Arc, OnceLock};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::{check_dim, check_finite, Error, Result};
use crate::numerics::{minimize_1d, trace_distance, HermitianMatrix, Metric, RealVector};
use crate::quantum_rep::{choi_of_mixture, choi_of_section_point, choi_unchecked, PauliHalfMixture};
use crate::srt_core::{
    cone_contains, g_monotone, hyperbolic_contraction, ConvexSection, Domain, Geometry, PolyhedralCone, SectionOracle, StarTheory, WitnessReport,
};

/// `(7 − 3√5)/8`.
pub fn critical_value() -> f64 {
    (7.0 - 3.0 * 5f64.sqrt()) / 8.0
}

const SEGMENT_TOL: f64 = 1e-10;
const THIRD: f64 = 1.0 / 3.0;

fn choi_of_point(theta: &[f64]) -> Result<HermitianMatrix> {
    check_dim(3, theta.len())?;
    check_finite(theta, "mixture")?;
    if (theta.iter().sum::<f64>() - 1.0).abs() > 1e-9 || theta.iter().any(|&v| v < -1e-9) {
        return Err(Error::Validation(format!("{theta:?} is not a barycentric point")));
    }
    Ok(choi_unchecked(theta[0], theta[1], theta[2]))
}

fn check_index(j: usize) -> Result<()> {
    if (1..=3).contains(&j) {
        Ok(())
    } else {
        Err(Error::Validation(format!("channel index {j} not in 1..=3")))
    }
}

fn segment_argmin_matrix(choi: &HermitianMatrix, j: usize) -> Result<(f64, f64)> {
    check_index(j)?;
    let f = |q: f64| {
        choi_of_section_point(j, q)
            .and_then(|s| trace_distance(choi, &s))
            .unwrap_or(f64::INFINITY)
    };
    minimize_1d(f, 0.0, 1.0, SEGMENT_TOL)
}

/// Choi-trace distance to `Fⱼ` together with the minimizing segment parameter.
pub fn segment_argmin(m: &PauliHalfMixture, j: usize) -> Result<(f64, f64)> {
    segment_argmin_matrix(&choi_of_mixture(m)?, j)
}

pub fn segment_distance(m: &PauliHalfMixture, j: usize) -> Result<f64> {
    Ok(segment_argmin(m, j)?.1)
}

#[derive(Debug)]
struct MarkovSegment {
    j: usize,
}

impl SectionOracle for MarkovSegment {
    fn dim(&self) -> usize {
        3
    }

    fn distance(&self, theta: &[f64]) -> Result<f64> {
        Ok(segment_argmin_matrix(&choi_of_point(theta)?, self.j)?.1)
    }

    fn distance_to_matrix(&self, m: &HermitianMatrix) -> Result<f64> {
        Ok(segment_argmin_matrix(m, self.j)?.1)
    }

    fn defining_points(&self) -> Vec<RealVector> {
        let mut v = vec![0.0; 3];
        v[self.j - 1] = 1.0;
        vec![vec![THIRD; 3], v]
    }

    fn polytopal(&self) -> bool {
        true
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> RealVector {
        let q: f64 = rng.gen();
        (0..3)
            .map(|i| q * if i + 1 == self.j { 1.0 } else { 0.0 } + (1.0 - q) * THIRD)
            .collect()
    }

    fn kind(&self) -> &'static str {
        "markov-segment"
    }

    fn params(&self) -> Value {
        json!({ "j": self.j })
    }
}

#[derive(Debug)]
struct MarkovKernel;

impl SectionOracle for MarkovKernel {
    fn dim(&self) -> usize {
        3
    }

    fn distance(&self, theta: &[f64]) -> Result<f64> {
        trace_distance(&choi_of_point(theta)?, &choi_of_mixture(&PauliHalfMixture::depolarizing())?)
    }

    fn distance_to_matrix(&self, m: &HermitianMatrix) -> Result<f64> {
        trace_distance(m, &choi_of_mixture(&PauliHalfMixture::depolarizing())?)
    }

    fn defining_points(&self) -> Vec<RealVector> {
        vec![vec![THIRD; 3]]
    }

    fn polytopal(&self) -> bool {
        true
    }

    fn kind(&self) -> &'static str {
        "markov-kernel"
    }

    fn params(&self) -> Value {
        json!({})
    }
}

/// Segment `Fⱼ` as a Choi-trace section.
pub fn segment_section(j: usize) -> Result<ConvexSection> {
    check_index(j)?;
    ConvexSection::new(
        format!("F{j}"),
        Geometry::Callable(Arc::new(MarkovSegment { j })),
        Metric::ChoiTrace,
    )
}

pub fn kernel_section() -> ConvexSection {
    ConvexSection::new("kernel", Geometry::Callable(Arc::new(MarkovKernel)), Metric::ChoiTrace)
        .expect("callable sections accept the choi-trace metric")
}

fn vertex_vec(j: usize) -> RealVector {
    (0..3).map(|i| if i + 1 == j { 1.0 } else { 0.0 }).collect()
}

pub fn markov_theory() -> StarTheory {
    let apex = vec![THIRD; 3];
    let dir = |j: usize| -> RealVector { vertex_vec(j).iter().map(|v| v - THIRD).collect() };
    let domains = (1..=3)
        .map(|k| {
            let others: Vec<usize> = (1..=3).filter(|&i| i != k).collect();
            let cone = PolyhedralCone::new(apex.clone(), others.iter().map(|&i| dir(i)).collect())
                .expect("nonzero frame");
            let sections = others
                .iter()
                .map(|&i| segment_section(i))
                .collect::<Result<Vec<_>>>()
                .expect("valid indices");
            Domain::new(cone, sections).expect("sections match cone dimension")
        })
        .collect();
    StarTheory::new(3, vec![apex], domains, Some((1..=3).map(vertex_vec).collect()))
        .and_then(|t| t.with_kernel_section(kernel_section()))
        .expect("well-formed theory")
}

pub fn shared_theory() -> &'static StarTheory {
    static THEORY: OnceLock<StarTheory> = OnceLock::new();
    THEORY.get_or_init(markov_theory)
}

/// Quadratic Bézier `(1−s)²Γᵢ + 2s(1−s)Γ_d + s²Γⱼ`.
pub fn boundary_point(i: usize, j: usize, s: f64) -> Result<PauliHalfMixture> {
    check_index(i)?;
    check_index(j)?;
    if i == j {
        return Err(Error::Validation("boundary endpoints must differ".into()));
    }
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::Domain(format!("curve parameter {s} outside [0, 1]")));
    }
    let (vi, vj) = (vertex_vec(i), vertex_vec(j));
    let w: Vec<f64> = (0..3)
        .map(|k| (1.0 - s).powi(2) * vi[k] + 2.0 * s * (1.0 - s) * THIRD + s * s * vj[k])
        .collect();
    PauliHalfMixture::from_weights([w[0], w[1], w[2]])
}

/// Weight `√5−2` on `Γ_k^½`, `(3−√5)/2` on the other two.
pub fn focus_channel(k: usize) -> Result<PauliHalfMixture> {
    check_index(k)?;
    let r5 = 5f64.sqrt();
    let mut w = [(3.0 - r5) / 2.0; 3];
    w[k - 1] = r5 - 2.0;
    PauliHalfMixture::from_weights(w)
}

/// Free-set oracle on barycentric weights: contact with one of the segments.
pub fn on_free_segment(p: &[f64]) -> bool {
    p.len() == 3
        && (1..=3).any(|j| {
            PauliHalfMixture::from_weights([p[0], p[1], p[2]])
                .and_then(|m| segment_distance(&m, j))
                .is_ok_and(|d| d < 1e-9)
        })
}

pub fn markov_quantifier(m: &PauliHalfMixture) -> Result<WitnessReport> {
    m.validate()?;
    Ok(g_monotone(&m.weights(), shared_theory())?.with_critical(critical_value()))
}

pub fn markov_witness(m: &PauliHalfMixture) -> Result<f64> {
    Ok(markov_quantifier(m)?.margin)
}

/// Image `(s̄, ε′)` of the boundary-mixture parameters `(s, ε)` under the
/// conic contraction scaling the two frame directions by `λᵢ`, `λⱼ`.
pub fn conic_rng_reparam(lambda_i: f64, lambda_j: f64, s: f64, eps: f64) -> Result<(f64, f64)> {
    for (name, v) in [("lambda_i", lambda_i), ("lambda_j", lambda_j), ("s", s), ("eps", eps)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::Domain(format!("{name} = {v} outside [0, 1]")));
        }
    }
    let root = lambda_j.sqrt() * s + lambda_i.sqrt() * (1.0 - s);
    if root == 0.0 {
        return Err(Error::Degenerate("contraction collapses the point onto the kernel".into()));
    }
    let s_bar = lambda_j.sqrt() * s / root;
    let eps_prime = 1.0 - (1.0 - eps) * root * root;
    Ok((s_bar, eps_prime))
}

/// `(1−ε)·B(s) + ε·Γ_d` on the Bézier curve between `Γᵢ` and `Γⱼ`.
pub fn boundary_mixture(i: usize, j: usize, s: f64, eps: f64) -> Result<PauliHalfMixture> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::Domain(format!("eps = {eps} outside [0, 1]")));
    }
    let b = boundary_point(i, j, s)?.weights();
    PauliHalfMixture::from_weights(b.map(|v| (1.0 - eps) * v + eps * THIRD))
}

/// Frame-wise conic contraction inside the cone containing `m`, with both
/// factors in `[0, 1]`.
pub fn conic_contraction(m: &PauliHalfMixture, lambda_i: f64, lambda_j: f64) -> Result<PauliHalfMixture> {
    if !(0.0..=1.0).contains(&lambda_i) || !(0.0..=1.0).contains(&lambda_j) {
        return Err(Error::Domain("conic contraction factors must lie in [0, 1]".into()));
    }
    let t = shared_theory();
    let w = m.weights();
    let k = (0..3)
        .find(|&k| cone_contains(&t.domains[k].cone, &w, 1e-12).unwrap_or(false))
        .ok_or(Error::Coverage)?;
    let out = hyperbolic_contraction(&w, &t.domains[k].cone, &[lambda_i, lambda_j])?;
    let w = [out[0], out[1], out[2]].map(|v| v.max(0.0));
    let total: f64 = w.iter().sum();
    PauliHalfMixture::from_weights(w.map(|v| v / total))
}
