use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cone::{cone_contains, reflect_cone, PolyhedralCone, CONE_TOL};
use super::section::dirichlet_mix;
use super::theory::StarTheory;
use crate::numerics::{project_onto_polytope, Metric, RealVector};

const MAX_COUNTEREXAMPLES: usize = 10;
const INTERIOR_STEP: f64 = 1e-5;
const STRICT_TOL: f64 = 1e-10;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Counterexample {
    /// Violated condition, 1 to 4.
    pub condition: u8,
    pub point: RealVector,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FortressReport {
    pub passed: bool,
    pub samples: usize,
    pub section_samples: usize,
    /// Failure counts for conditions (i) to (iv).
    pub failures: [usize; 4],
    pub counterexamples: Vec<Counterexample>,
}

impl FortressReport {
    pub fn condition_passed(&self, condition: usize) -> bool {
        (1..=4).contains(&condition) && self.failures[condition - 1] == 0
    }
}

fn sample_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn bounding_box(t: &StarTheory) -> (Vec<f64>, Vec<f64>) {
    let pts: Vec<&RealVector> = match &t.ambient {
        Some(a) => a.iter().collect(),
        None => t.kernel.iter().collect(),
    };
    let mut lo = vec![f64::INFINITY; t.dim];
    let mut hi = vec![f64::NEG_INFINITY; t.dim];
    for p in pts {
        for i in 0..t.dim {
            lo[i] = lo[i].min(p[i]);
            hi[i] = hi[i].max(p[i]);
        }
    }
    if t.ambient.is_none() {
        lo.iter_mut().for_each(|x| *x -= 1.0);
        hi.iter_mut().for_each(|x| *x += 1.0);
    }
    (lo, hi)
}

fn ambient_sample(t: &StarTheory, bounds: &(Vec<f64>, Vec<f64>), rng: &mut ChaCha8Rng) -> RealVector {
    match &t.ambient {
        Some(a) if a.len() == t.dim + 1 || is_affinely_independent(a) => dirichlet_mix(a, rng),
        _ => bounds
            .0
            .iter()
            .zip(&bounds.1)
            .map(|(lo, hi)| if hi > lo { rng.gen_range(*lo..*hi) } else { *lo })
            .collect(),
    }
}

fn is_affinely_independent(points: &[RealVector]) -> bool {
    affine_basis(points).len() + 1 == points.len()
}

/// Orthonormal basis of the affine hull of `points` (Gram–Schmidt).
fn affine_basis(points: &[RealVector]) -> Vec<RealVector> {
    let mut basis: Vec<RealVector> = Vec::new();
    for p in &points[1..] {
        let mut v: Vec<f64> = p.iter().zip(&points[0]).map(|(a, b)| a - b).collect();
        for b in &basis {
            let c: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
        }
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-9 {
            basis.push(v.into_iter().map(|x| x / n).collect());
        }
    }
    basis
}

fn standard_basis(dim: usize) -> Vec<RealVector> {
    (0..dim)
        .map(|i| (0..dim).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect()
}

/// True when `p` is in the relative interior of the cone intersected with the
/// ambient affine hull.
fn strictly_inside(c: &PolyhedralCone, p: &[f64], basis: &[RealVector]) -> bool {
    if !cone_contains(c, p, STRICT_TOL).unwrap_or(false) {
        return false;
    }
    for b in basis {
        for s in [-1.0, 1.0] {
            let q: Vec<f64> = p.iter().zip(b).map(|(x, y)| x + s * INTERIOR_STEP * y).collect();
            if !cone_contains(c, &q, STRICT_TOL).unwrap_or(false) {
                return false;
            }
        }
    }
    true
}

/// Sampled check of the four fortress conditions:
/// (i) every sample is free or in some cone; (ii) no free point lies strictly
/// inside a cone; (iii) every kernel generator lies in every reflected cone;
/// (iv) every section touches the cone of its domain.
pub fn validate_fortress(
    t: &StarTheory,
    free_membership: &(dyn Fn(&[f64]) -> bool + Sync),
    n_samples: usize,
    seed: u64,
) -> FortressReport {
    let n_samples = n_samples.max(1);
    let bounds = bounding_box(t);
    let basis = match &t.ambient {
        Some(a) => affine_basis(a),
        None => standard_basis(t.dim),
    };

    // (i) and (ii) on ambient samples.
    let ambient_results: Vec<(Option<Counterexample>, Option<Counterexample>)> = (0..n_samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample_rng(seed, i as u64);
            let p = ambient_sample(t, &bounds, &mut rng);
            let free = free_membership(&p);
            let covered = free
                || t.domains
                    .iter()
                    .any(|d| cone_contains(&d.cone, &p, CONE_TOL).unwrap_or(false));
            let c1 = (!covered).then(|| Counterexample {
                condition: 1,
                point: p.clone(),
                detail: "sample is neither free nor inside any cone".into(),
            });
            let c2 = if free {
                t.domains
                    .iter()
                    .position(|d| strictly_inside(&d.cone, &p, &basis))
                    .map(|k| Counterexample {
                        condition: 2,
                        point: p.clone(),
                        detail: format!("free sample strictly inside cone {k}"),
                    })
            } else {
                None
            };
            (c1, c2)
        })
        .collect();

    // Section samples feed (ii) and (iv).
    let sections: Vec<(usize, usize)> = t
        .domains
        .iter()
        .enumerate()
        .flat_map(|(di, d)| (0..d.sections.len()).map(move |si| (di, si)))
        .collect();
    let per_section = (n_samples / sections.len().max(1)).clamp(8, 256);
    let section_results: Vec<(Vec<Counterexample>, Option<Counterexample>)> = sections
        .par_iter()
        .enumerate()
        .map(|(k, &(di, si))| {
            let mut rng = sample_rng(seed ^ 0x5EC7_10A5, k as u64);
            let s = &t.domains[di].sections[si];
            let mut pts = s.defining_points();
            for _ in 0..per_section {
                pts.push(s.sample(&mut rng));
            }
            let mut interior = Vec::new();
            let mut touches = false;
            for p in &pts {
                if cone_contains(&t.domains[di].cone, p, CONE_TOL).unwrap_or(false) {
                    touches = true;
                }
                if interior.len() < MAX_COUNTEREXAMPLES {
                    if let Some(c) = t.domains.iter().position(|d| strictly_inside(&d.cone, p, &basis)) {
                        interior.push(Counterexample {
                            condition: 2,
                            point: p.clone(),
                            detail: format!("point of section `{}` (domain {di}) strictly inside cone {c}", s.label),
                        });
                    }
                }
            }
            let c4 = (!touches).then(|| Counterexample {
                condition: 4,
                point: pts[0].clone(),
                detail: format!("section `{}` never meets the cone of domain {di}", s.label),
            });
            (interior, c4)
        })
        .collect();

    // (iii)
    let mut kernel_failures = Vec::new();
    for k in &t.kernel {
        for (di, d) in t.domains.iter().enumerate() {
            if !cone_contains(&reflect_cone(&d.cone), k, CONE_TOL).unwrap_or(false) {
                kernel_failures.push(Counterexample {
                    condition: 3,
                    point: k.clone(),
                    detail: format!("kernel generator outside reflected cone {di}"),
                });
            }
        }
    }

    let mut failures = [0usize; 4];
    let mut counterexamples = Vec::new();
    let mut record = |c: Counterexample, failures: &mut [usize; 4]| {
        failures[c.condition as usize - 1] += 1;
        if counterexamples.len() < MAX_COUNTEREXAMPLES * 4
            && counterexamples.iter().filter(|e: &&Counterexample| e.condition == c.condition).count()
                < MAX_COUNTEREXAMPLES
        {
            counterexamples.push(c);
        }
    };
    for (c1, c2) in ambient_results {
        if let Some(c) = c1 {
            record(c, &mut failures);
        }
        if let Some(c) = c2 {
            record(c, &mut failures);
        }
    }
    for (interior, c4) in section_results {
        for c in interior {
            record(c, &mut failures);
        }
        if let Some(c) = c4 {
            record(c, &mut failures);
        }
    }
    for c in kernel_failures {
        record(c, &mut failures);
    }
    FortressReport {
        passed: failures.iter().all(|&f| f == 0),
        samples: n_samples,
        section_samples: per_section * sections.len(),
        failures,
        counterexamples,
    }
}

fn in_polytope(p: &[f64], vertices: &[RealVector]) -> bool {
    project_onto_polytope(p, vertices, Metric::L2)
        .map(|(_, d)| d <= 1e-8)
        .unwrap_or(false)
}

fn intersection_samples(a: &[RealVector], k: &[RealVector]) -> Vec<RealVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED);
    let mut candidates: Vec<RealVector> = a.iter().chain(k).cloned().collect();
    for va in a {
        for vk in k {
            candidates.push(va.iter().zip(vk).map(|(x, y)| 0.5 * (x + y)).collect());
        }
    }
    for _ in 0..64 {
        candidates.push(dirichlet_mix(a, &mut rng));
        candidates.push(dirichlet_mix(k, &mut rng));
    }
    candidates
        .into_iter()
        .filter(|p| in_polytope(p, a) && in_polytope(p, k))
        .collect()
}

/// Keeps the polytopes whose intersection with `k` is inclusion-maximal,
/// first representative of duplicates, input order preserved.
pub fn redundancy_deletion(sets: &[Vec<RealVector>], k: &[RealVector]) -> Vec<Vec<RealVector>> {
    let samples: Vec<Vec<RealVector>> = sets.iter().map(|a| intersection_samples(a, k)).collect();
    let contained = |i: usize, j: usize| samples[i].iter().all(|p| in_polytope(p, &sets[j]));
    (0..sets.len())
        .filter(|&i| {
            !(0..sets.len()).any(|j| {
                j != i && contained(i, j) && (!contained(j, i) || j < i)
            })
        })
        .map(|i| sets[i].clone())
        .collect()
}
