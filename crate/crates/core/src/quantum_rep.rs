//! Two-qubit Fano (Bloch) states and Choi states of half-strength Pauli
//! channel mixtures.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{eigvalsh, HermitianMatrix};

/// `ρ = ¼(I⊗I + Σxᵢσᵢ⊗I + Σyᵢ I⊗σᵢ + ΣTᵢⱼσᵢ⊗σⱼ)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoQubitFano {
    pub x: [f64; 3],
    pub y: [f64; 3],
    #[serde(rename = "T")]
    pub t: [[f64; 3]; 3],
}

const OFF_DIAGONAL_TOL: f64 = 1e-12;
const PSD_TOL: f64 = 1e-10;

impl TwoQubitFano {
    pub fn new(x: [f64; 3], y: [f64; 3], t: [[f64; 3]; 3]) -> Result<Self> {
        let s = Self { x, y, t };
        if s.x.iter().chain(&s.y).chain(s.t.iter().flatten()).any(|v| !v.is_finite()) {
            return Err(Error::Validation("Fano parameters must be finite".into()));
        }
        Ok(s)
    }

    /// State with diagonal correlation matrix `diag(t)`.
    pub fn diagonal(x: [f64; 3], y: [f64; 3], t: [f64; 3]) -> Self {
        let mut m = [[0.0; 3]; 3];
        for i in 0..3 {
            m[i][i] = t[i];
        }
        Self { x, y, t: m }
    }

    pub fn bell_diagonal(t: [f64; 3]) -> Self {
        Self::diagonal([0.0; 3], [0.0; 3], t)
    }

    pub fn is_diagonal(&self) -> bool {
        (0..3).all(|i| (0..3).all(|j| i == j || self.t[i][j].abs() <= OFF_DIAGONAL_TOL))
    }

    /// Diagonal of `T`, erroring when `T` has off-diagonal entries.
    pub fn correlation_diagonal(&self) -> Result<[f64; 3]> {
        if !self.is_diagonal() {
            return Err(Error::Unsupported("correlation matrix is not diagonal".into()));
        }
        Ok([self.t[0][0], self.t[1][1], self.t[2][2]])
    }

    /// Index `i` when only `xᵢ`, `yᵢ`, `Tᵢᵢ` may be nonzero.
    fn single_triple(&self) -> Option<usize> {
        (0..3).find(|&i| {
            (0..3).all(|j| j == i || (self.x[j] == 0.0 && self.y[j] == 0.0))
                && (0..3).all(|j| (0..3).all(|k| (j == i && k == i) || self.t[j][k] == 0.0))
        })
    }
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn pauli(i: usize) -> HermitianMatrix {
    let (z, o, im) = (c(0.0), c(1.0), Complex64::new(0.0, 1.0));
    let e = match i {
        0 => vec![o, z, z, o],
        1 => vec![z, o, o, z],
        2 => vec![z, -im, im, z],
        _ => vec![o, z, z, -o],
    };
    HermitianMatrix::new(2, e).expect("Pauli matrices are Hermitian")
}

pub fn fano_to_density(s: &TwoQubitFano) -> HermitianMatrix {
    let id = pauli(0);
    let mut acc = id.kron(&id);
    for i in 0..3 {
        let si = pauli(i + 1);
        acc = acc.add(&si.kron(&id).scale(s.x[i])).expect("same dims");
        acc = acc.add(&id.kron(&si).scale(s.y[i])).expect("same dims");
        for j in 0..3 {
            if s.t[i][j] != 0.0 {
                acc = acc.add(&si.kron(&pauli(j + 1)).scale(s.t[i][j])).expect("same dims");
            }
        }
    }
    acc.scale(0.25)
}

/// Positivity of the density operator. States carrying a single Bloch
/// triple `(xᵢ, yᵢ, Tᵢᵢ)` are diagonal in the `σᵢ` eigenbasis with
/// eigenvalues `¼(1 ± xᵢ ± yᵢ ± Tᵢᵢ)`, giving four closed-form inequalities.
pub fn fano_positivity(s: &TwoQubitFano) -> bool {
    match s.single_triple() {
        Some(i) => triple_positivity(s.x[i], s.y[i], s.t[i][i]),
        None => spectral_positivity(s),
    }
}

pub fn triple_positivity(x: f64, y: f64, t: f64) -> bool {
    let tol = 4.0 * PSD_TOL;
    1.0 + x + y + t >= -tol
        && 1.0 + x - y - t >= -tol
        && 1.0 - x + y - t >= -tol
        && 1.0 - x - y + t >= -tol
}

pub fn spectral_positivity(s: &TwoQubitFano) -> bool {
    eigvalsh(&fano_to_density(s))
        .map(|ev| ev[0] >= -PSD_TOL)
        .unwrap_or(false)
}

/// Zero-discord test for diagonal `T`: the matrix `K = xxᵀ + diag(t²)` must
/// have its largest eigenvalue equal to its trace `‖x‖² + ‖t‖²`.
pub fn zero_discord_check(s: &TwoQubitFano) -> Result<bool> {
    let t = s.correlation_diagonal()?;
    let mut k = [0.0; 9];
    for i in 0..3 {
        for j in 0..3 {
            k[i * 3 + j] = s.x[i] * s.x[j] + if i == j { t[i] * t[i] } else { 0.0 };
        }
    }
    let kappa = *eigvalsh(&HermitianMatrix::from_real(3, &k)?)?
        .last()
        .expect("3×3 spectrum");
    let total: f64 = s.x.iter().map(|v| v * v).sum::<f64>() + t.iter().map(|v| v * v).sum::<f64>();
    Ok((total - kappa).abs() <= 1e-9)
}

/// Barycentric weights of `Γ₁^½, Γ₂^½, Γ₃^½`, where `Γᵢ^½ = ½·id + ½·σᵢ(·)σᵢ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliHalfMixture {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl PauliHalfMixture {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        let m = Self { a, b, c };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        let w = self.weights();
        if w.iter().any(|v| !v.is_finite() || *v < -1e-12) {
            return Err(Error::Validation(format!("mixture weights {w:?} must be non-negative")));
        }
        if (w.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
            return Err(Error::Validation(format!("mixture weights {w:?} must sum to 1")));
        }
        Ok(())
    }

    pub fn from_weights(w: [f64; 3]) -> Result<Self> {
        Self::new(w[0], w[1], w[2])
    }

    pub fn weights(&self) -> [f64; 3] {
        [self.a, self.b, self.c]
    }

    pub fn depolarizing() -> Self {
        Self { a: 1.0 / 3.0, b: 1.0 / 3.0, c: 1.0 / 3.0 }
    }

    pub fn vertex(j: usize) -> Result<Self> {
        let mut w = [0.0; 3];
        *w.get_mut(j.wrapping_sub(1))
            .ok_or_else(|| Error::Validation(format!("channel index {j} not in 1..=3")))? = 1.0;
        Self::from_weights(w)
    }
}

/// Choi state in the basis `|00⟩,|01⟩,|10⟩,|11⟩`:
/// `½Φ⁺ + ½(aΨ⁺ + bΨ⁻ + cΦ⁻)`.
pub fn choi_of_mixture(m: &PauliHalfMixture) -> Result<HermitianMatrix> {
    m.validate()?;
    Ok(choi_unchecked(m.a, m.b, m.c))
}

pub(crate) fn choi_unchecked(a: f64, b: f64, cc: f64) -> HermitianMatrix {
    let (p, q) = ((1.0 + cc) / 4.0, (1.0 - cc) / 4.0);
    let (r, s) = ((a + b) / 4.0, (a - b) / 4.0);
    #[rustfmt::skip]
    let e = [
        p,   0.0, 0.0, q,
        0.0, r,   s,   0.0,
        0.0, s,   r,   0.0,
        q,   0.0, 0.0, p,
    ];
    HermitianMatrix::from_real(4, &e).expect("Choi structure is symmetric")
}

/// Inverse of [`choi_of_mixture`]; `tol` bounds the entrywise mismatch with
/// the reconstructed structure.
pub fn mixture_from_choi(j: &HermitianMatrix, tol: f64) -> Result<PauliHalfMixture> {
    if j.dim() != 4 {
        return Err(Error::DimensionMismatch { expected: 4, found: j.dim() });
    }
    let mid = j.get(1, 1).re;
    let off = j.get(1, 2).re;
    let m = PauliHalfMixture {
        a: 2.0 * (mid + off),
        b: 2.0 * (mid - off),
        c: 4.0 * j.get(0, 0).re - 1.0,
    };
    let rebuilt = choi_unchecked(m.a, m.b, m.c);
    let diff = rebuilt.max_entry_diff(j);
    if diff > tol {
        return Err(Error::Validation(format!(
            "matrix deviates from the Pauli-mixture Choi structure by {diff:.3e}"
        )));
    }
    let w = m.weights().map(|v| if v.abs() <= tol { 0.0 } else { v });
    if w.iter().any(|v| *v < 0.0) || (w.iter().sum::<f64>() - 1.0).abs() > tol {
        return Err(Error::Validation("matrix is not a Choi state of a mixture".into()));
    }
    let total: f64 = w.iter().sum();
    PauliHalfMixture::from_weights(w.map(|v| v / total))
}

/// Choi state of `q·Γⱼ^½ + (1−q)·Γ_d^½`.
pub fn choi_of_section_point(j: usize, q: f64) -> Result<HermitianMatrix> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::Domain(format!("segment parameter {q} outside [0, 1]")));
    }
    let v = PauliHalfMixture::vertex(j)?.weights();
    let third = 1.0 / 3.0;
    let w = v.map(|x| q * x + (1.0 - q) * third);
    Ok(choi_unchecked(w[0], w[1], w[2]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::trace_distance;
    use proptest::prelude::*;

    #[test]
    fn density_examples() {
        let mixed = fano_to_density(&TwoQubitFano::diagonal([0.0; 3], [0.0; 3], [0.0; 3]));
        assert!(mixed.max_entry_diff(&HermitianMatrix::identity(4).scale(0.25)) < 1e-15);

        let zz = fano_to_density(&TwoQubitFano::diagonal([0.0, 0.0, 1.0], [0.0, 0.0, 1.0], [0.0, 0.0, 1.0]));
        let ket00 = [c(1.0), c(0.0), c(0.0), c(0.0)];
        assert!(zz.max_entry_diff(&HermitianMatrix::projector(&ket00)) < 1e-15);

        let phi_plus = fano_to_density(&TwoQubitFano::bell_diagonal([1.0, -1.0, 1.0]));
        let ev = eigvalsh(&phi_plus).unwrap();
        assert!((ev[3] - 1.0).abs() < 1e-12 && ev[..3].iter().all(|v| v.abs() < 1e-12));
        let bell = [c(1.0), c(0.0), c(0.0), c(1.0)];
        assert!(phi_plus.max_entry_diff(&HermitianMatrix::projector(&bell)) < 1e-15);
    }

    #[test]
    fn positivity_examples() {
        assert!(fano_positivity(&TwoQubitFano::bell_diagonal([0.0; 3])));
        let bad = TwoQubitFano::bell_diagonal([1.0, 1.0, 1.0]);
        assert!(!fano_positivity(&bad));
        let ev = eigvalsh(&fano_to_density(&bad)).unwrap();
        assert!((ev[0] + 0.5).abs() < 1e-12);
        let ok = TwoQubitFano::diagonal([0.3, 0.0, 0.0], [0.0; 3], [0.5, 0.0, 0.0]);
        assert!(fano_positivity(&ok) && spectral_positivity(&ok));
    }

    #[test]
    fn zero_discord_examples() {
        assert!(zero_discord_check(&TwoQubitFano::diagonal([0.3, 0.0, 0.0], [0.0; 3], [0.5, 0.0, 0.0])).unwrap());
        assert!(!zero_discord_check(&TwoQubitFano::bell_diagonal([-0.5; 3])).unwrap());
        assert!(zero_discord_check(&TwoQubitFano::bell_diagonal([0.0; 3])).unwrap());
        assert!(zero_discord_check(&TwoQubitFano::diagonal([0.3, 0.3, 0.0], [0.0; 3], [0.0; 3])).unwrap());
        let mut s = TwoQubitFano::bell_diagonal([0.1; 3]);
        s.t[0][1] = 0.2;
        assert!(matches!(zero_discord_check(&s), Err(Error::Unsupported(_))));
    }

    #[test]
    fn choi_examples() {
        let d = choi_of_mixture(&PauliHalfMixture::depolarizing()).unwrap();
        assert!((d.get(0, 0).re - (1.0 + 1.0 / 3.0) / 4.0).abs() < 1e-15);
        assert!((d.get(0, 3).re - (1.0 - 1.0 / 3.0) / 4.0).abs() < 1e-15);
        assert!((d.get(1, 1).re - (2.0 / 3.0) / 4.0).abs() < 1e-15);
        assert!(d.get(1, 2).re.abs() < 1e-15);

        let x = choi_of_mixture(&PauliHalfMixture::new(1.0, 0.0, 0.0).unwrap()).unwrap();
        let nonzero: Vec<f64> = x.entries().iter().map(|z| z.re).filter(|v| v.abs() > 1e-15).collect();
        assert!(nonzero.iter().all(|v| (v - 0.25).abs() < 1e-15));

        assert!(choi_of_mixture(&PauliHalfMixture { a: 0.5, b: 0.6, c: -0.1 }).is_err());
    }

    #[test]
    fn section_point_endpoints() {
        let base = choi_of_mixture(&PauliHalfMixture::depolarizing()).unwrap();
        for j in 1..=3 {
            assert!(choi_of_section_point(j, 0.0).unwrap().max_entry_diff(&base) < 1e-15);
            let v = choi_of_mixture(&PauliHalfMixture::vertex(j).unwrap()).unwrap();
            assert!(choi_of_section_point(j, 1.0).unwrap().max_entry_diff(&v) < 1e-15);
        }
        assert!(choi_of_section_point(1, 1.5).is_err());
        assert!(choi_of_section_point(4, 0.5).is_err());
    }

    #[test]
    fn choi_round_trip() {
        let m = PauliHalfMixture::new(0.2, 0.5, 0.3).unwrap();
        let back = mixture_from_choi(&choi_of_mixture(&m).unwrap(), 1e-9).unwrap();
        assert!((back.a - 0.2).abs() < 1e-12 && (back.b - 0.5).abs() < 1e-12);
        assert!(mixture_from_choi(&HermitianMatrix::identity(4).scale(0.25), 1e-9).is_err());
    }

    #[test]
    fn distinct_vertices_are_half_apart() {
        let a = choi_unchecked(1.0, 0.0, 0.0);
        let b = choi_unchecked(0.0, 1.0, 0.0);
        assert!((trace_distance(&a, &b).unwrap() - 0.5).abs() < 1e-12);
    }

    fn bary() -> impl Strategy<Value = PauliHalfMixture> {
        (0.0f64..1.0, 0.0f64..1.0).prop_map(|(u, v)| {
            let (u, v) = if u + v > 1.0 { (1.0 - u, 1.0 - v) } else { (u, v) };
            PauliHalfMixture { a: u, b: v, c: 1.0 - u - v }
        })
    }

    proptest! {
        #[test]
        fn choi_is_a_density_matrix(m in bary()) {
            let j = choi_of_mixture(&m).unwrap();
            let ev = eigvalsh(&j).unwrap();
            prop_assert!(ev[0] >= -1e-12);
            prop_assert!((ev.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn section_point_is_affine(j in 1usize..=3, q in 0.0f64..=1.0) {
            let lhs = choi_of_section_point(j, q).unwrap();
            let rhs = choi_of_mixture(&PauliHalfMixture::vertex(j).unwrap()).unwrap()
                .mix(&choi_of_mixture(&PauliHalfMixture::depolarizing()).unwrap(), q).unwrap();
            prop_assert!(lhs.max_entry_diff(&rhs) < 1e-12);
        }

        #[test]
        fn density_is_linear_with_unit_trace(p in proptest::collection::vec(-1.0f64..1.0, 15), q in proptest::collection::vec(-1.0f64..1.0, 15), w in 0.0f64..1.0) {
            let mk = |v: &[f64]| TwoQubitFano::new([v[0], v[1], v[2]], [v[3], v[4], v[5]],
                [[v[6], v[7], v[8]], [v[9], v[10], v[11]], [v[12], v[13], v[14]]]).unwrap();
            let (a, b) = (mk(&p), mk(&q));
            let mixed: Vec<f64> = p.iter().zip(&q).map(|(x, y)| w * x + (1.0 - w) * y).collect();
            let lhs = fano_to_density(&mk(&mixed));
            let rhs = fano_to_density(&a).mix(&fano_to_density(&b), w).unwrap();
            prop_assert!(lhs.max_entry_diff(&rhs) < 1e-14);
            prop_assert!((lhs.trace() - 1.0).abs() < 1e-15);
        }

        #[test]
        fn closed_form_positivity_agrees_with_spectrum(i in 0usize..3, x in -1.2f64..1.2, y in -1.2f64..1.2, t in -1.2f64..1.2) {
            let mut s = TwoQubitFano::diagonal([0.0; 3], [0.0; 3], [0.0; 3]);
            s.x[i] = x;
            s.y[i] = y;
            s.t[i][i] = t;
            let margin = [1.0 + x + y + t, 1.0 + x - y - t, 1.0 - x + y - t, 1.0 - x - y + t]
                .iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
            prop_assume!(margin > 1e-6);
            prop_assert_eq!(fano_positivity(&s), spectral_positivity(&s));
        }
    }
}
