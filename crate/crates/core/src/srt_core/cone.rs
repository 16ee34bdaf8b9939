use serde::{Deserialize, Serialize};

use crate::error::{check_dim, check_finite, Error, Result};
use crate::numerics::nnls::{cholesky_solve, nnls};
use crate::numerics::RealVector;

pub const CONE_TOL: f64 = 1e-8;

/// `{apex + Σ αₖ frameₖ : αₖ ≥ 0}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyhedralCone {
    apex: RealVector,
    frame: Vec<RealVector>,
}

impl PolyhedralCone {
    pub fn new(apex: RealVector, frame: Vec<RealVector>) -> Result<Self> {
        if frame.is_empty() {
            return Err(Error::Validation("cone frame is empty".into()));
        }
        check_finite(&apex, "apex")?;
        for f in &frame {
            check_dim(apex.len(), f.len())?;
            check_finite(f, "frame vector")?;
            if f.iter().all(|&x| x == 0.0) {
                return Err(Error::Validation("cone frame contains a zero vector".into()));
            }
        }
        Ok(Self { apex, frame })
    }

    pub fn apex(&self) -> &[f64] {
        &self.apex
    }

    pub fn frame(&self) -> &[RealVector] {
        &self.frame
    }

    pub fn dim(&self) -> usize {
        self.apex.len()
    }

    fn gram_is_singular(&self) -> bool {
        let n = self.frame.len();
        let g: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| dot(&self.frame[i], &self.frame[j])).collect())
            .collect();
        let trace: f64 = (0..n).map(|i| g[i][i]).sum();
        cholesky_solve(&g, &vec![0.0; n], 1e-10 * trace).is_none()
    }

    /// Non-negative frame coefficients and the fit residual for `p − apex`.
    /// Linearly dependent frames get (approximately) minimal-norm coefficients.
    pub fn decompose(&self, p: &[f64]) -> Result<(Vec<f64>, f64)> {
        check_dim(self.dim(), p.len())?;
        let rhs: Vec<f64> = p.iter().zip(&self.apex).map(|(a, b)| a - b).collect();
        let ridge = if self.gram_is_singular() {
            1e-12 * self.frame.iter().map(|f| dot(f, f)).sum::<f64>()
        } else {
            0.0
        };
        let sol = nnls(&self.frame, &rhs, ridge);
        Ok((sol.coefficients, sol.residual))
    }

    /// `apex + Σ coefficientsₖ·frameₖ`.
    pub fn compose(&self, coefficients: &[f64]) -> Result<RealVector> {
        check_dim(self.frame.len(), coefficients.len())?;
        let mut out = self.apex.clone();
        for (f, &c) in self.frame.iter().zip(coefficients) {
            for (o, x) in out.iter_mut().zip(f) {
                *o += c * x;
            }
        }
        Ok(out)
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn cone_contains(c: &PolyhedralCone, p: &[f64], tol: f64) -> Result<bool> {
    let (_, residual) = c.decompose(p)?;
    Ok(residual <= tol)
}

pub fn reflect_cone(c: &PolyhedralCone) -> PolyhedralCone {
    PolyhedralCone {
        apex: c.apex.clone(),
        frame: c
            .frame
            .iter()
            .map(|f| f.iter().map(|x| -x).collect())
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quadrant() -> PolyhedralCone {
        PolyhedralCone::new(vec![0.0, 0.0], vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap()
    }

    #[test]
    fn membership_examples() {
        let c = quadrant();
        assert!(cone_contains(&c, &[1.0, 1.0], CONE_TOL).unwrap());
        assert!(!cone_contains(&c, &[-1.0, 0.0], CONE_TOL).unwrap());
        let ray = PolyhedralCone::new(vec![1.0, 0.0], vec![vec![1.0, 0.0]]).unwrap();
        assert!(cone_contains(&ray, &[2.0, 0.0], CONE_TOL).unwrap());
        assert!(!cone_contains(&ray, &[0.5, 0.0], CONE_TOL).unwrap());
        assert!(cone_contains(&c, &[1.0], CONE_TOL).is_err());
    }

    #[test]
    fn construction_rejects_bad_frames() {
        assert!(PolyhedralCone::new(vec![0.0], vec![]).is_err());
        assert!(PolyhedralCone::new(vec![0.0], vec![vec![0.0]]).is_err());
        assert!(PolyhedralCone::new(vec![0.0], vec![vec![1.0, 0.0]]).is_err());
    }

    #[test]
    fn reflection_negates_and_is_involutive() {
        let c = PolyhedralCone::new(vec![0.5], vec![vec![1.0]]).unwrap();
        let r = reflect_cone(&c);
        assert_eq!(r.frame(), &[vec![-1.0]]);
        assert_eq!(r.apex(), &[0.5]);
        assert_eq!(reflect_cone(&r), c);
    }

    #[test]
    fn degenerate_frame_decomposes_with_small_coefficients() {
        let c = PolyhedralCone::new(
            vec![0.0, 0.0],
            vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0]],
        )
        .unwrap();
        let (alpha, res) = c.decompose(&[0.3, 0.2]).unwrap();
        assert!(res < 1e-8);
        assert!((alpha[0] - 0.3).abs() < 1e-6 && alpha[1] < 1e-6);
    }
}
