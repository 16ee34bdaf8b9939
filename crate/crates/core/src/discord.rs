//! Two-qubit quantum discord (Alice side) for diagonal correlation matrices.
//!
//! Each Bloch pair `(xᵢ, tᵢ)` is rotated by π/4 into `uᵢ = (xᵢ+tᵢ)/√2`,
//! `vᵢ = (xᵢ−tᵢ)/√2`. Points live in `R⁶` ordered `[u₁,v₁,u₂,v₂,u₃,v₃]`.
//! The fortress is made of the 64 closed orthants; the free sections of an
//! orthant are the three rectangles `Ω₀,ᵢ` spanned by a single pair.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{geometric_mean, Metric, RealVector};
use crate::quantum_rep::{fano_positivity, TwoQubitFano};
use crate::srt_core::{ConvexSection, Domain, Geometry, PolyhedralCone, StarTheory, WitnessReport};

const SQRT2: f64 = std::f64::consts::SQRT_2;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UVCoordinates {
    pub u: [f64; 3],
    pub v: [f64; 3],
    pub y: [f64; 3],
}

impl UVCoordinates {
    pub fn to_vector(&self) -> RealVector {
        (0..3).flat_map(|i| [self.u[i], self.v[i]]).collect()
    }

    pub fn from_vector(p: &[f64], y: [f64; 3]) -> Result<Self> {
        if p.len() != 6 {
            return Err(Error::DimensionMismatch { expected: 6, found: p.len() });
        }
        Ok(Self {
            u: [p[0], p[2], p[4]],
            v: [p[1], p[3], p[5]],
            y,
        })
    }

    /// `‖(uᵢ, vᵢ)‖²` per pair.
    fn pair_norms(&self) -> [f64; 3] {
        [0, 1, 2].map(|i| self.u[i] * self.u[i] + self.v[i] * self.v[i])
    }
}

pub fn to_uv(s: &TwoQubitFano) -> Result<UVCoordinates> {
    let t = s.correlation_diagonal()?;
    Ok(UVCoordinates {
        u: [0, 1, 2].map(|i| (s.x[i] + t[i]) / SQRT2),
        v: [0, 1, 2].map(|i| (s.x[i] - t[i]) / SQRT2),
        y: s.y,
    })
}

pub fn from_uv(c: &UVCoordinates) -> TwoQubitFano {
    TwoQubitFano::diagonal(
        [0, 1, 2].map(|i| (c.u[i] + c.v[i]) / SQRT2),
        c.y,
        [0, 1, 2].map(|i| (c.u[i] - c.v[i]) / SQRT2),
    )
}

/// Orthant index: bit `2i` marks `uᵢ < 0`, bit `2i+1` marks `vᵢ < 0`.
/// Zero coordinates take the non-negative side, i.e. the lowest index.
pub fn quadrant_index(p: &[f64]) -> usize {
    p.iter()
        .enumerate()
        .filter(|(_, &x)| x < 0.0)
        .fold(0, |acc, (k, _)| acc | (1 << k))
}

fn unit(k: usize, sign: f64) -> RealVector {
    (0..6).map(|j| if j == k { sign } else { 0.0 }).collect()
}

fn sign_of(mask: usize, k: usize) -> f64 {
    if mask >> k & 1 == 1 {
        -1.0
    } else {
        1.0
    }
}

pub fn discord_theory(y: [f64; 3]) -> Result<StarTheory> {
    if y.iter().any(|v| !(v.abs() <= 1.0)) {
        return Err(Error::Domain(format!("Bob's Bloch vector {y:?} needs |yᵢ| ≤ 1")));
    }
    let mut domains = Vec::with_capacity(64);
    for mask in 0..64usize {
        let frame = (0..6).map(|k| unit(k, sign_of(mask, k))).collect();
        let cone = PolyhedralCone::new(vec![0.0; 6], frame)?;
        let sections = (0..3)
            .map(|i| {
                let (su, sv) = (sign_of(mask, 2 * i), sign_of(mask, 2 * i + 1));
                let a = (1.0 + y[i]) / SQRT2;
                let b = (1.0 - y[i]) / SQRT2;
                let mut center = vec![0.0; 6];
                center[2 * i] = su * a / 2.0;
                center[2 * i + 1] = sv * b / 2.0;
                ConvexSection::new(
                    format!("Omega{}", i + 1),
                    Geometry::Box {
                        center,
                        half_widths: vec![a / 2.0, b / 2.0],
                        axes: vec![unit(2 * i, 1.0), unit(2 * i + 1, 1.0)],
                    },
                    Metric::L2,
                )
            })
            .collect::<Result<Vec<_>>>()?;
        domains.push(Domain::new(cone, sections)?);
    }
    let ambient: Vec<RealVector> = (0..64usize)
        .map(|mask| (0..6).map(|k| -sign_of(mask, k) * SQRT2).collect())
        .collect();
    StarTheory::new(6, vec![vec![0.0; 6]], domains, Some(ambient))
}

/// Free-set oracle for fortress validation: contact with any section.
pub fn on_free_section(t: &StarTheory, p: &[f64]) -> bool {
    t.sections()
        .any(|s| crate::srt_core::section_distance(p, s).is_ok_and(|d| d <= 1e-9))
}

fn closed_form(c: &UVCoordinates) -> Result<WitnessReport> {
    let n = c.pair_norms();
    let per_section: Vec<f64> = (0..3)
        .map(|i| (0..3).filter(|&j| j != i).map(|j| n[j]).sum::<f64>().sqrt())
        .collect();
    WitnessReport::from_distances(quadrant_index(&c.to_vector()), per_section, 0.0)
}

pub fn discord_quantifier(s: &TwoQubitFano) -> Result<WitnessReport> {
    let c = to_uv(s)?;
    if !fano_positivity(s) {
        return Err(Error::Domain("state is not positive semidefinite".into()));
    }
    closed_form(&c)
}

fn in_bell_tetrahedron(t: [f64; 3]) -> bool {
    let [a, b, c] = t;
    [1.0 - a - b - c, 1.0 - a + b + c, 1.0 + a - b + c, 1.0 + a + b - c]
        .iter()
        .all(|&v| v >= -1e-12)
}

/// `∛∏ᵢ √(Σ_{j≠i} tⱼ²)` for Bell-diagonal states.
pub fn bell_diagonal_quantifier(t: [f64; 3]) -> Result<f64> {
    if t.iter().any(|v| !v.is_finite()) || !in_bell_tetrahedron(t) {
        return Err(Error::Domain(format!("{t:?} lies outside the Bell-diagonal tetrahedron")));
    }
    let sq = t.map(|v| v * v);
    geometric_mean(&[
        (sq[1] + sq[2]).sqrt(),
        (sq[0] + sq[2]).sqrt(),
        (sq[0] + sq[1]).sqrt(),
    ])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiscordOp {
    /// Local dephasing on Alice: scales pairs 1 and 2.
    Dephase12,
    /// Population transfer: scales pair 3.
    Stochastic3,
    /// Scales every pair.
    Depolarize,
}

pub fn discord_free_op(s: &TwoQubitFano, kind: DiscordOp, lambda: f64) -> Result<TwoQubitFano> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::Domain(format!("lambda {lambda} outside [0, 1]")));
    }
    let mut c = to_uv(s)?;
    let pairs: &[usize] = match kind {
        DiscordOp::Dephase12 => &[0, 1],
        DiscordOp::Stochastic3 => &[2],
        DiscordOp::Depolarize => &[0, 1, 2],
    };
    for &i in pairs {
        c.u[i] *= lambda;
        c.v[i] *= lambda;
    }
    Ok(from_uv(&c))
}

/// Cached theory for `y = 0`.
pub fn bell_theory() -> &'static StarTheory {
    static THEORY: OnceLock<StarTheory> = OnceLock::new();
    THEORY.get_or_init(|| discord_theory([0.0; 3]).expect("y = 0 is valid"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum_rep::zero_discord_check;
    use crate::srt_core::{g_monotone, monotone_bounds, section_distance, validate_fortress};
    use proptest::prelude::*;

    #[test]
    fn uv_examples() {
        let c = to_uv(&TwoQubitFano::bell_diagonal([0.0; 3])).unwrap();
        assert_eq!(c.to_vector(), vec![0.0; 6]);
        let c = to_uv(&TwoQubitFano::diagonal([1.0, 0.0, 0.0], [0.0; 3], [1.0, 0.0, 0.0])).unwrap();
        assert!((c.u[0] - SQRT2).abs() < 1e-15 && c.v[0] == 0.0);
        let t = [0.3, -0.2, 0.5];
        let c = to_uv(&TwoQubitFano::bell_diagonal(t)).unwrap();
        for i in 0..3 {
            assert!((c.u[i] - t[i] / SQRT2).abs() < 1e-15 && (c.v[i] + t[i] / SQRT2).abs() < 1e-15);
        }
    }

    #[test]
    fn theory_shape() {
        let t = discord_theory([0.0; 3]).unwrap();
        assert_eq!(t.domains.len(), 64);
        for s in t.sections() {
            assert!(section_distance(&[0.0; 6], s).unwrap() < 1e-15);
            if let Geometry::Box { half_widths, .. } = s.geometry() {
                assert!(half_widths.iter().all(|h| (h - 0.5 / SQRT2).abs() < 1e-15));
            }
        }
        assert!(discord_theory([1.5, 0.0, 0.0]).is_err());
    }

    #[test]
    fn quantifier_examples() {
        let single = TwoQubitFano::diagonal([0.3, 0.0, 0.0], [0.0; 3], [0.5, 0.0, 0.0]);
        assert_eq!(discord_quantifier(&single).unwrap().value, 0.0);
        let w = discord_quantifier(&TwoQubitFano::bell_diagonal([-0.5; 3])).unwrap();
        assert!((w.value - 0.5f64.sqrt()).abs() < 1e-12);
        let v = discord_quantifier(&TwoQubitFano::bell_diagonal([1.0, 1.0, -1.0])).unwrap();
        assert!((v.value - SQRT2).abs() < 1e-12);
        assert!(discord_quantifier(&TwoQubitFano::bell_diagonal([1.0, 1.0, 1.0])).is_err());
    }

    #[test]
    fn bell_diagonal_examples() {
        assert_eq!(bell_diagonal_quantifier([0.0, 0.0, 0.8]).unwrap(), 0.0);
        assert!((bell_diagonal_quantifier([-0.5; 3]).unwrap() - 0.5f64.sqrt()).abs() < 1e-12);
        assert!((bell_diagonal_quantifier([1.0, 1.0, -1.0]).unwrap() - SQRT2).abs() < 1e-12);
        assert!(bell_diagonal_quantifier([0.9, 0.9, 0.9]).is_err());
    }

    #[test]
    fn bounds_for_symmetric_werner_point() {
        let c = to_uv(&TwoQubitFano::bell_diagonal([-0.5; 3])).unwrap();
        let (lo, hi) = monotone_bounds(&c.to_vector(), bell_theory()).unwrap();
        assert!((lo - 0.5f64.sqrt()).abs() < 1e-12);
        assert!((hi - 0.75f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn free_op_examples() {
        let s = TwoQubitFano::diagonal([0.1, 0.2, 0.3], [0.0; 3], [0.2, -0.1, 0.4]);
        let d = discord_free_op(&s, DiscordOp::Depolarize, 0.0).unwrap();
        assert!(d.x.iter().all(|v| v.abs() < 1e-15) && d.t.iter().flatten().all(|v| v.abs() < 1e-15));
        let only3 = TwoQubitFano::diagonal([0.0, 0.0, 0.3], [0.0; 3], [0.0, 0.0, 0.4]);
        let same = discord_free_op(&only3, DiscordOp::Dephase12, 0.3).unwrap();
        assert!((same.x[2] - 0.3).abs() < 1e-15 && (same.t[2][2] - 0.4).abs() < 1e-15);
        for k in [DiscordOp::Dephase12, DiscordOp::Stochastic3, DiscordOp::Depolarize] {
            let id = discord_free_op(&s, k, 1.0).unwrap();
            for i in 0..3 {
                assert!((id.x[i] - s.x[i]).abs() < 1e-15 && (id.t[i][i] - s.t[i][i]).abs() < 1e-15);
            }
        }
        assert!(discord_free_op(&s, DiscordOp::Depolarize, 1.2).is_err());
    }

    #[test]
    fn fortress_passes_and_breaks() {
        let t = discord_theory([0.0; 3]).unwrap();
        let free = |p: &[f64]| on_free_section(&t, p);
        let r = validate_fortress(&t, &free, 2000, 1);
        assert!(r.passed, "{:?}", r.counterexamples);
        let broken = t.without_domain(5).unwrap();
        let r = validate_fortress(&broken, &free, 4000, 1);
        assert!(!r.condition_passed(1));
        assert!(r.counterexamples.iter().any(|c| quadrant_index(&c.point) == 5));
    }

    fn diag_state() -> impl Strategy<Value = TwoQubitFano> {
        (proptest::collection::vec(-1.0f64..1.0, 9)).prop_filter_map("positive", |v| {
            let s = TwoQubitFano::diagonal(
                [v[0] * 0.6, v[1] * 0.6, v[2] * 0.6],
                [v[3] * 0.5, v[4] * 0.5, v[5] * 0.5],
                [v[6], v[7], v[8]],
            );
            fano_positivity(&s).then_some(s)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(300))]

        #[test]
        fn closed_form_matches_engine(s in diag_state()) {
            let t = discord_theory(s.y).unwrap();
            let c = to_uv(&s).unwrap();
            let closed = discord_quantifier(&s).unwrap();
            let engine = g_monotone(&c.to_vector(), &t).unwrap();
            prop_assert!((closed.value - engine.value).abs() < 1e-8);
            prop_assert_eq!(closed.domain_index, engine.domain_index);
        }

        #[test]
        fn quadrant_symmetry(s in diag_state(), flips in 0usize..8) {
            let v = discord_quantifier(&s).unwrap().value;
            let mut c = to_uv(&s).unwrap();
            for i in 0..3 {
                if flips >> i & 1 == 1 {
                    c.u[i] = -c.u[i];
                    c.v[i] = -c.v[i];
                }
            }
            let flipped = closed_form(&c).unwrap().value;
            prop_assert!((v - flipped).abs() < 1e-15);
        }

        #[test]
        fn free_ops_are_monotone(s in diag_state(), lambda in 0.0f64..=1.0) {
            let before = discord_quantifier(&s).unwrap().value;
            for k in [DiscordOp::Dephase12, DiscordOp::Stochastic3, DiscordOp::Depolarize] {
                let after = closed_form(&to_uv(&discord_free_op(&s, k, lambda).unwrap()).unwrap()).unwrap().value;
                prop_assert!(after <= before + 1e-12);
            }
        }

        #[test]
        fn zero_set_matches_zero_discord(s in diag_state(), axis in 0usize..3, keep in proptest::collection::vec(proptest::bool::ANY, 3)) {
            // Support of x inside the support of t.
            let mut s = s;
            for i in 0..3 {
                if !keep[i] && i != axis {
                    s.t[i][i] = 0.0;
                }
                if s.t[i][i] == 0.0 {
                    s.x[i] = 0.0;
                }
            }
            prop_assume!(fano_positivity(&s));
            let zero = discord_quantifier(&s).unwrap().value < 1e-12;
            prop_assert_eq!(zero, zero_discord_check(&s).unwrap());
        }

        #[test]
        fn sandwich(s in diag_state()) {
            let t = discord_theory(s.y).unwrap();
            let p = to_uv(&s).unwrap().to_vector();
            let g = g_monotone(&p, &t).unwrap().value;
            let (lo, hi) = monotone_bounds(&p, &t).unwrap();
            prop_assert!(lo <= g + 1e-9 && g <= hi + 1e-9);
        }
    }
}
