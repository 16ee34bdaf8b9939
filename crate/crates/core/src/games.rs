//! Discrimination games and the coalition algebra of robustness values.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest coalition accepted by `harsanyi_dividend`.
pub const MAX_PLAYERS: usize = 20;

const BATCH: u64 = 1 << 16;

fn check_unit(ls: &[f64]) -> Result<()> {
    match ls.iter().find(|l| !(0.0..=1.0).contains(*l)) {
        Some(l) => Err(Error::Domain(format!("distinguishability {l} outside [0, 1]"))),
        None => Ok(()),
    }
}

fn check_robustness(rs: &[f64]) -> Result<()> {
    match rs.iter().find(|r| !(**r >= 0.0) || r.is_infinite()) {
        Some(r) => Err(Error::Domain(format!("robustness {r} must be finite and non-negative"))),
        None => Ok(()),
    }
}

/// Success probability `(1+L)/2` of a single discriminating player.
pub fn alice_success(l: f64) -> Result<f64> {
    check_unit(&[l])?;
    Ok((1.0 + l) / 2.0)
}

/// Probability that an even number of `M` independent players fail:
/// `½(1 + ∏Lⱼ)`.
pub fn xor_even_probability(ls: &[f64]) -> Result<f64> {
    check_unit(ls)?;
    Ok(0.5 * (1.0 + ls.iter().product::<f64>()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameSimulation {
    pub analytic: f64,
    pub empirical: f64,
    pub stderr: f64,
    pub trials: u64,
    pub seed: u64,
}

/// Monte Carlo estimate of the even-failure-parity probability. Trials run
/// in batches of 2¹⁶, each on its own ChaCha8 stream, so the result depends
/// only on `seed`.
pub fn simulate_gi_game(ls: &[f64], trials: u64, seed: u64) -> Result<GameSimulation> {
    if trials == 0 {
        return Err(Error::Validation("need at least one trial".into()));
    }
    let analytic = xor_even_probability(ls)?;
    let success: Vec<f64> = ls.iter().map(|l| (1.0 + l) / 2.0).collect();
    let batches = trials.div_ceil(BATCH);
    let even: u64 = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b);
            let n = BATCH.min(trials - b * BATCH);
            (0..n)
                .filter(|_| {
                    let failures = success.iter().filter(|&&p| rng.gen::<f64>() >= p).count();
                    failures % 2 == 0
                })
                .count() as u64
        })
        .sum();
    let empirical = even as f64 / trials as f64;
    Ok(GameSimulation {
        analytic,
        empirical,
        stderr: (empirical * (1.0 - empirical) / trials as f64).sqrt(),
        trials,
        seed,
    })
}

/// `u(S) = ∏(1+rₖ) − 1`.
pub fn coalition_utility(rs: &[f64]) -> Result<f64> {
    Ok(advantage_ratio(rs)? - 1.0)
}

/// Optimal advantage ratio `∏(1+rₖ)` of a resource coalition.
pub fn advantage_ratio(rs: &[f64]) -> Result<f64> {
    check_robustness(rs)?;
    Ok(rs.iter().map(|r| 1.0 + r).product())
}

/// Dividend of the grand coalition from the subset recursion
/// `d(S) = u(S) − Σ_{T⊊S} d(T)`, solved by a Möbius transform over bitmasks.
pub fn harsanyi_dividend(rs: &[f64]) -> Result<f64> {
    check_robustness(rs)?;
    let n = rs.len();
    if n > MAX_PLAYERS {
        return Err(Error::Size { limit: MAX_PLAYERS, found: n });
    }
    let full = (1usize << n) - 1;
    let mut d: Vec<f64> = (0..=full)
        .map(|mask| (0..n).filter(|k| mask >> k & 1 == 1).map(|k| 1.0 + rs[k]).product::<f64>() - 1.0)
        .collect();
    for k in 0..n {
        for mask in 0..=full {
            if mask >> k & 1 == 1 {
                d[mask] -= d[mask ^ (1 << k)];
            }
        }
    }
    Ok(d[full])
}

/// `φᵢ = Σ_{T∋i} ∏_{k∈T} rₖ / |T|`, summed through the elementary symmetric
/// polynomials of the other players.
pub fn shapley_value(rs: &[f64], i: usize) -> Result<f64> {
    check_robustness(rs)?;
    if i >= rs.len() {
        return Err(Error::Validation(format!("player {i} out of range for {} players", rs.len())));
    }
    let mut e = vec![0.0; rs.len()];
    e[0] = 1.0;
    for r in rs.iter().enumerate().filter(|&(k, _)| k != i).map(|(_, &r)| r) {
        for m in (1..e.len()).rev() {
            e[m] += r * e[m - 1];
        }
    }
    Ok(rs[i] * e.iter().enumerate().map(|(m, em)| em / (m + 1) as f64).sum::<f64>())
}
