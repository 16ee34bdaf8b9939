use super::cone::{PolyhedralCone, CONE_TOL};
use super::section::ConvexSection;
use super::theory::Domain;
use crate::error::{check_dim, check_finite, Error, Result};
use crate::numerics::{geometric_mean, lp::solve_lp, project_onto_polytope, Metric, RealVector};

/// Generalized robustness of `theta` with respect to a polytopal section,
/// mixing with objects from `ambient`.
///
/// Variables are the rescaled barycentric weights `W = (1+r)·w` on the
/// section vertices and `M = r·μ` on the ambient vertices:
/// `S W − A M = θ`, `ΣW − ΣM = 1`, minimize `ΣM = r`.
pub fn robustness(theta: &[f64], s: &ConvexSection, ambient: &[RealVector]) -> Result<f64> {
    let section = s
        .polytope_vertices()
        .ok_or_else(|| Error::Unsupported(format!("robustness needs a polytopal section, got {}", s.kind())))?;
    if ambient.is_empty() {
        return Err(Error::Validation("ambient polytope has no vertices".into()));
    }
    check_finite(theta, "point")?;
    let d = theta.len();
    for v in section.iter().chain(ambient) {
        check_dim(d, v.len())?;
    }
    let (ns, na) = (section.len(), ambient.len());
    let n = ns + na;
    let mut rows = Vec::with_capacity(d + 1);
    for i in 0..d {
        let mut row = vec![0.0; n];
        for (j, v) in section.iter().enumerate() {
            row[j] = v[i];
        }
        for (j, v) in ambient.iter().enumerate() {
            row[ns + j] = -v[i];
        }
        rows.push(row);
    }
    let mut sum_row = vec![1.0; n];
    sum_row[ns..].iter_mut().for_each(|x| *x = -1.0);
    rows.push(sum_row);
    let mut rhs = theta.to_vec();
    rhs.push(1.0);
    let mut cost = vec![0.0; n];
    cost[ns..].iter_mut().for_each(|x| *x = 1.0);
    let sol = solve_lp(&cost, &rows, &rhs)?;
    Ok(sol.objective.max(0.0))
}

pub fn g_robustness(theta: &[f64], d: &Domain, ambient: &[RealVector]) -> Result<f64> {
    let values = d
        .sections
        .iter()
        .map(|s| robustness(theta, s, ambient))
        .collect::<Result<Vec<_>>>()?;
    geometric_mean(&values)
}

/// Suppression factor `1/√σ` of relative errors for a domain with `σ` sections.
pub fn relative_error_factor(sigma: usize) -> Result<f64> {
    if sigma < 1 {
        return Err(Error::Validation("need at least one free section".into()));
    }
    Ok(1.0 / (sigma as f64).sqrt())
}

/// `λ·θ + (1−λ)·Δ` for a kernel point `Δ`.
pub fn shrink_to_kernel(
    theta: &[f64],
    lambda: f64,
    delta: &[f64],
    kernel: &[RealVector],
) -> Result<RealVector> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::Domain(format!("lambda {lambda} outside [0, 1]")));
    }
    check_dim(theta.len(), delta.len())?;
    if kernel.is_empty() {
        return Err(Error::Validation("kernel is empty".into()));
    }
    let (_, dist) = project_onto_polytope(delta, kernel, Metric::L2)?;
    if dist > 1e-9 {
        return Err(Error::Domain(format!(
            "delta lies {dist:.3e} away from the kernel"
        )));
    }
    Ok(theta
        .iter()
        .zip(delta)
        .map(|(t, d)| lambda * t + (1.0 - lambda) * d)
        .collect())
}

/// Frame coefficients of `theta` in `c`, erroring when `theta` is outside.
pub fn frame_coefficients(theta: &[f64], c: &PolyhedralCone) -> Result<Vec<f64>> {
    let (alpha, residual) = c.decompose(theta)?;
    if residual > CONE_TOL {
        return Err(Error::Domain(format!(
            "point lies outside the cone (residual {residual:.3e})"
        )));
    }
    Ok(alpha)
}

/// Rescales each frame coefficient by its own `λ`, with `∏_{λ>0} λ ≤ 1`.
pub fn hyperbolic_contraction(theta: &[f64], c: &PolyhedralCone, lambdas: &[f64]) -> Result<RealVector> {
    check_dim(c.frame().len(), lambdas.len())?;
    if lambdas.iter().any(|l| !(*l >= 0.0) || l.is_infinite()) {
        return Err(Error::Domain("contraction factors must be finite and non-negative".into()));
    }
    let product: f64 = lambdas.iter().filter(|&&l| l > 0.0).product();
    if product > 1.0 + 1e-12 {
        return Err(Error::Domain(format!(
            "product of positive factors is {product} > 1"
        )));
    }
    let alpha = frame_coefficients(theta, c)?;
    let scaled: Vec<f64> = alpha.iter().zip(lambdas).map(|(a, l)| a * l).collect();
    c.compose(&scaled)
}
