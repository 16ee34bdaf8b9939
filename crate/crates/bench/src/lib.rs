//! Deterministic inputs shared by the benchmarks.

use starres_core::quantum_rep::{PauliHalfMixture, TwoQubitFano};
use starres_core::total_corr::JointDistribution;
use starres_core::unistochastic::CirculantBistochastic;

pub fn fano_state() -> TwoQubitFano {
    TwoQubitFano::diagonal([0.1, -0.05, 0.05], [0.05, 0.0, -0.05], [-0.3, 0.2, -0.25])
}

pub fn joint_2x2() -> JointDistribution {
    JointDistribution::new(vec![vec![0.4, 0.1], vec![0.15, 0.35]]).expect("valid distribution")
}

/// `η + 0.2(δ₀₀ − η) + 0.1(δ₀₁ − η)`, inside the cone anchored at `(0, 0)`.
pub fn joint_3x3() -> JointDistribution {
    let mut p = vec![0.7 / 9.0; 9];
    p[0] += 0.2;
    p[1] += 0.1;
    JointDistribution::from_flat(3, 3, &p).expect("valid distribution")
}

pub fn circulant() -> CirculantBistochastic {
    CirculantBistochastic::new([0.4, 0.3, 0.2, 0.1]).expect("valid row")
}

pub fn mixture() -> PauliHalfMixture {
    PauliHalfMixture::new(0.6, 0.3, 0.1).expect("valid weights")
}

pub fn robustness_values(n: usize) -> Vec<f64> {
    (0..n).map(|k| 0.1 + 0.05 * k as f64).collect()
}

#[cfg(test)]
mod tests {
    #[test]
    fn fixture_state_is_physical() {
        assert!(starres_core::quantum_rep::fano_positivity(&super::fano_state()));
    }

    #[test]
    fn fixtures_are_covered() {
        assert!(starres_core::total_corr::tc_quantifier(&super::joint_3x3()).is_ok());
        assert!(starres_core::markov::markov_quantifier(&super::mixture()).is_ok());
    }
}
