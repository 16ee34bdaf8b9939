use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};

/// Dense complex Hermitian matrix stored row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HermitianMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

const HERMITIAN_TOL: f64 = 1e-12;

impl HermitianMatrix {
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Validation("matrix dimension must be positive".into()));
        }
        check_dim(dim * dim, entries.len())?;
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Validation("matrix contains a non-finite entry".into()));
        }
        let m = Self { dim, entries };
        let defect = m.hermiticity_defect();
        if defect > HERMITIAN_TOL * m.max_abs().max(1.0) {
            return Err(Error::Validation(format!(
                "matrix is not Hermitian (defect {defect:.3e})"
            )));
        }
        Ok(m)
    }

    pub fn from_real(dim: usize, entries: &[f64]) -> Result<Self> {
        Self::new(dim, entries.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        Self { dim, entries }
    }

    /// Projector onto a (not necessarily normalized) ket.
    pub fn projector(ket: &[Complex64]) -> Self {
        let dim = ket.len();
        let norm: f64 = ket.iter().map(|z| z.norm_sqr()).sum();
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                entries.push(ket[i] * ket[j].conj() / norm);
            }
        }
        Self { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.dim + j]
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i).re).sum()
    }

    pub fn frobenius_norm_sq(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim, other.dim)?;
        Ok(Self {
            dim: self.dim,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim, other.dim)?;
        Ok(Self {
            dim: self.dim,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|z| z * factor).collect(),
        }
    }

    /// Entrywise affine mix `w·self + (1−w)·other`.
    pub fn mix(&self, other: &Self, w: f64) -> Result<Self> {
        check_dim(self.dim, other.dim)?;
        Ok(Self {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a * w + b * (1.0 - w))
                .collect(),
        })
    }

    /// Kronecker product.
    pub fn kron(&self, other: &Self) -> Self {
        let (n, m) = (self.dim, other.dim);
        let dim = n * m;
        let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..n {
            for j in 0..n {
                let a = self.get(i, j);
                for k in 0..m {
                    for l in 0..m {
                        entries[(i * m + k) * dim + (j * m + l)] = a * other.get(k, l);
                    }
                }
            }
        }
        Self { dim, entries }
    }

    pub fn max_entry_diff(&self, other: &Self) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Ascending eigenvalues of a Hermitian matrix.
///
/// The complex matrix `A + iB` is embedded as the real symmetric block matrix
/// `[[A, -B], [B, A]]`, whose spectrum is that of the original with every
/// eigenvalue doubled; cyclic Jacobi sweeps diagonalize it.
pub fn eigvalsh(h: &HermitianMatrix) -> Result<Vec<f64>> {
    let defect = h.hermiticity_defect();
    if defect > HERMITIAN_TOL * h.max_abs().max(1.0) {
        return Err(Error::Validation(format!(
            "matrix is not Hermitian (defect {defect:.3e})"
        )));
    }
    let n = h.dim;
    let m = 2 * n;
    let mut s = vec![0.0; m * m];
    for i in 0..n {
        for j in 0..n {
            let z = (h.get(i, j) + h.get(j, i).conj()) * 0.5;
            s[i * m + j] = z.re;
            s[(i + n) * m + (j + n)] = z.re;
            s[i * m + (j + n)] = -z.im;
            s[(i + n) * m + j] = z.im;
        }
    }
    jacobi_symmetric(&mut s, m);
    let mut diag: Vec<f64> = (0..m).map(|i| s[i * m + i]).collect();
    diag.sort_by(f64::total_cmp);
    Ok(diag.chunks(2).map(|p| 0.5 * (p[0] + p[1])).collect())
}

fn jacobi_symmetric(a: &mut [f64], n: usize) {
    let total: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    if total == 0.0 {
        return;
    }
    let threshold = 1e-14 * total;
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j] * a[i * n + j])
            .sum::<f64>()
            .sqrt();
        if off <= threshold {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq.abs() < f64::MIN_POSITIVE {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - sn * akq;
                    a[k * n + q] = sn * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - sn * aqk;
                    a[q * n + k] = sn * apk + c * aqk;
                }
            }
        }
    }
}

/// `½‖A − B‖₁` for two unit-trace Hermitian matrices.
pub fn trace_distance(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<f64> {
    check_dim(a.dim, b.dim)?;
    for (name, m) in [("first", a), ("second", b)] {
        if (m.trace() - 1.0).abs() > 1e-9 {
            return Err(Error::Validation(format!(
                "{name} argument has trace {} (expected 1)",
                m.trace()
            )));
        }
    }
    trace_norm_half(&a.sub(b)?)
}

/// `½ Σ|λᵢ|` without trace checks.
pub fn trace_norm_half(h: &HermitianMatrix) -> Result<f64> {
    Ok(0.5 * eigvalsh(h)?.iter().map(|l| l.abs()).sum::<f64>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_spectrum() {
        assert_eq!(eigvalsh(&HermitianMatrix::identity(4)).unwrap(), vec![1.0; 4]);
    }

    #[test]
    fn pauli_x_and_two_by_two() {
        let sx = HermitianMatrix::from_real(2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let ev = eigvalsh(&sx).unwrap();
        assert!((ev[0] + 1.0).abs() < 1e-14 && (ev[1] - 1.0).abs() < 1e-14);
        let m = HermitianMatrix::from_real(2, &[2.0, 1.0, 1.0, 2.0]).unwrap();
        let ev = eigvalsh(&m).unwrap();
        assert!((ev[0] - 1.0).abs() < 1e-14 && (ev[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn pauli_y_complex_spectrum() {
        let sy = HermitianMatrix::new(2, vec![c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)]).unwrap();
        let ev = eigvalsh(&sy).unwrap();
        assert!((ev[0] + 1.0).abs() < 1e-14 && (ev[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_non_hermitian() {
        assert!(HermitianMatrix::from_real(2, &[0.0, 1.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn trace_distance_examples() {
        let zero = HermitianMatrix::from_real(2, &[1.0, 0.0, 0.0, 0.0]).unwrap();
        let one = HermitianMatrix::from_real(2, &[0.0, 0.0, 0.0, 1.0]).unwrap();
        let mixed = HermitianMatrix::identity(2).scale(0.5);
        assert_eq!(trace_distance(&zero, &zero).unwrap(), 0.0);
        assert!((trace_distance(&zero, &one).unwrap() - 1.0).abs() < 1e-14);
        assert!((trace_distance(&zero, &mixed).unwrap() - 0.5).abs() < 1e-14);
        assert!(trace_distance(&zero, &HermitianMatrix::identity(2)).is_err());
        assert!(trace_distance(&zero, &HermitianMatrix::identity(4).scale(0.25)).is_err());
    }

    fn hermitian_from(dim: usize, raw: &[f64]) -> HermitianMatrix {
        let mut e = vec![c(0.0, 0.0); dim * dim];
        let mut k = 0;
        for i in 0..dim {
            e[i * dim + i] = c(raw[k], 0.0);
            k += 1;
            for j in (i + 1)..dim {
                e[i * dim + j] = c(raw[k], raw[k + 1]);
                e[j * dim + i] = c(raw[k], -raw[k + 1]);
                k += 2;
            }
        }
        HermitianMatrix::new(dim, e).unwrap()
    }

    fn density_from(raw: &[f64]) -> HermitianMatrix {
        // G G† / tr for a random complex 4×4 G.
        let g: Vec<Complex64> = raw.chunks(2).map(|p| c(p[0], p[1])).collect();
        let mut e = vec![c(0.0, 0.0); 16];
        for i in 0..4 {
            for j in 0..4 {
                e[i * 4 + j] = (0..4).map(|k| g[i * 4 + k] * g[j * 4 + k].conj()).sum();
            }
        }
        let m = HermitianMatrix { dim: 4, entries: e };
        let tr = m.trace();
        m.scale(1.0 / tr)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn spectrum_preserves_trace_and_frobenius(raw in proptest::collection::vec(-3.0f64..3.0, 16)) {
            let h = hermitian_from(4, &raw);
            let ev = eigvalsh(&h).unwrap();
            prop_assert!(ev.windows(2).all(|w| w[0] <= w[1]));
            prop_assert!((ev.iter().sum::<f64>() - h.trace()).abs() < 1e-10);
            prop_assert!((ev.iter().map(|l| l * l).sum::<f64>() - h.frobenius_norm_sq()).abs() < 1e-9);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn trace_distance_is_a_metric(
            a in proptest::collection::vec(-1.0f64..1.0, 32),
            b in proptest::collection::vec(-1.0f64..1.0, 32),
            c3 in proptest::collection::vec(-1.0f64..1.0, 32),
        ) {
            prop_assume!(a.iter().any(|x| x.abs() > 0.1) && b.iter().any(|x| x.abs() > 0.1) && c3.iter().any(|x| x.abs() > 0.1));
            let (ra, rb, rc) = (density_from(&a), density_from(&b), density_from(&c3));
            let ab = trace_distance(&ra, &rb).unwrap();
            let ba = trace_distance(&rb, &ra).unwrap();
            let bc = trace_distance(&rb, &rc).unwrap();
            let ac = trace_distance(&ra, &rc).unwrap();
            prop_assert!((ab - ba).abs() < 1e-10);
            prop_assert!(ac <= ab + bc + 1e-10);
            prop_assert!((0.0..=1.0 + 1e-10).contains(&ab));
        }
    }
}
