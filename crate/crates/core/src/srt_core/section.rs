use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::{check_dim, check_finite, Error, Result};
use crate::numerics::{project_onto_polytope, HermitianMatrix, Metric, RealVector};

/// Closed-form or numerically evaluated convex set supplied by an application.
pub trait SectionOracle: Send + Sync {
    fn dim(&self) -> usize;
    fn distance(&self, theta: &[f64]) -> Result<f64>;
    fn distance_to_matrix(&self, _m: &HermitianMatrix) -> Result<f64> {
        Err(Error::Unsupported(format!("{} has no matrix form", self.kind())))
    }
    /// Points whose convex hull is the section (exact when `polytopal`).
    fn defining_points(&self) -> Vec<RealVector>;
    fn polytopal(&self) -> bool {
        false
    }
    /// Random point of the section.
    fn sample(&self, rng: &mut ChaCha8Rng) -> RealVector {
        dirichlet_mix(&self.defining_points(), rng)
    }
    fn kind(&self) -> &'static str;
    fn params(&self) -> Value;
}

#[derive(Clone)]
pub enum Geometry {
    Polytope {
        vertices: Vec<RealVector>,
    },
    Segment {
        a: RealVector,
        b: RealVector,
    },
    /// `center + Σ tₖ·half_widthsₖ·axesₖ`, `|tₖ| ≤ 1`, orthonormal axes.
    Box {
        center: RealVector,
        half_widths: Vec<f64>,
        axes: Vec<RealVector>,
    },
    Callable(Arc<dyn SectionOracle>),
}

impl fmt::Debug for Geometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Geometry::Polytope { vertices } => f.debug_struct("Polytope").field("vertices", vertices).finish(),
            Geometry::Segment { a, b } => f.debug_struct("Segment").field("a", a).field("b", b).finish(),
            Geometry::Box { center, half_widths, axes } => f
                .debug_struct("Box")
                .field("center", center)
                .field("half_widths", half_widths)
                .field("axes", axes)
                .finish(),
            Geometry::Callable(o) => write!(f, "Callable({})", o.kind()),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ConvexSection {
    pub label: String,
    geometry: Geometry,
    metric: Metric,
}

impl ConvexSection {
    pub fn new(label: impl Into<String>, geometry: Geometry, metric: Metric) -> Result<Self> {
        match &geometry {
            Geometry::Polytope { vertices } => {
                let first = vertices
                    .first()
                    .ok_or_else(|| Error::Validation("polytope section has no vertices".into()))?;
                for v in vertices {
                    check_dim(first.len(), v.len())?;
                    check_finite(v, "vertex")?;
                }
            }
            Geometry::Segment { a, b } => {
                check_dim(a.len(), b.len())?;
                check_finite(a, "segment end")?;
                check_finite(b, "segment end")?;
            }
            Geometry::Box { center, half_widths, axes } => {
                check_dim(half_widths.len(), axes.len())?;
                if half_widths.iter().any(|h| !(*h >= 0.0)) {
                    return Err(Error::Validation("box half-widths must be non-negative".into()));
                }
                for (i, ax) in axes.iter().enumerate() {
                    check_dim(center.len(), ax.len())?;
                    for (j, other) in axes.iter().enumerate() {
                        let d: f64 = ax.iter().zip(other).map(|(x, y)| x * y).sum();
                        let target = if i == j { 1.0 } else { 0.0 };
                        if (d - target).abs() > 1e-9 {
                            return Err(Error::Validation("box axes must be orthonormal".into()));
                        }
                    }
                }
                if metric != Metric::L2 {
                    return Err(Error::Unsupported("box sections support the L2 metric only".into()));
                }
            }
            Geometry::Callable(_) => {}
        }
        if metric == Metric::ChoiTrace && !matches!(geometry, Geometry::Callable(_)) {
            return Err(Error::Unsupported(
                "choi-trace metric requires a callable section".into(),
            ));
        }
        Ok(Self {
            label: label.into(),
            geometry,
            metric,
        })
    }

    pub fn polytope(label: impl Into<String>, vertices: Vec<RealVector>, metric: Metric) -> Result<Self> {
        Self::new(label, Geometry::Polytope { vertices }, metric)
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn dim(&self) -> usize {
        match &self.geometry {
            Geometry::Polytope { vertices } => vertices[0].len(),
            Geometry::Segment { a, .. } => a.len(),
            Geometry::Box { center, .. } => center.len(),
            Geometry::Callable(o) => o.dim(),
        }
    }

    /// Vertex list when the section is a polytope in its own coordinates.
    pub fn polytope_vertices(&self) -> Option<Vec<RealVector>> {
        match &self.geometry {
            Geometry::Polytope { vertices } => Some(vertices.clone()),
            Geometry::Segment { a, b } => Some(vec![a.clone(), b.clone()]),
            Geometry::Box { .. } => Some(self.defining_points()),
            Geometry::Callable(o) if o.polytopal() => Some(o.defining_points()),
            Geometry::Callable(_) => None,
        }
    }

    pub fn defining_points(&self) -> Vec<RealVector> {
        match &self.geometry {
            Geometry::Polytope { vertices } => vertices.clone(),
            Geometry::Segment { a, b } => vec![a.clone(), b.clone()],
            Geometry::Box { center, half_widths, axes } => {
                let k = axes.len();
                (0..(1usize << k))
                    .map(|mask| {
                        let mut p = center.clone();
                        for (i, (ax, h)) in axes.iter().zip(half_widths).enumerate() {
                            let s = if mask >> i & 1 == 1 { 1.0 } else { -1.0 };
                            for (pj, aj) in p.iter_mut().zip(ax) {
                                *pj += s * h * aj;
                            }
                        }
                        p
                    })
                    .collect()
            }
            Geometry::Callable(o) => o.defining_points(),
        }
    }

    pub fn sample(&self, rng: &mut ChaCha8Rng) -> RealVector {
        match &self.geometry {
            Geometry::Polytope { vertices } => dirichlet_mix(vertices, rng),
            Geometry::Segment { a, b } => {
                let t: f64 = rng.gen();
                a.iter().zip(b).map(|(x, y)| (1.0 - t) * x + t * y).collect()
            }
            Geometry::Box { center, half_widths, axes } => {
                let mut p = center.clone();
                for (ax, h) in axes.iter().zip(half_widths) {
                    let t: f64 = rng.gen_range(-1.0..=1.0);
                    for (pj, aj) in p.iter_mut().zip(ax) {
                        *pj += t * h * aj;
                    }
                }
                p
            }
            Geometry::Callable(o) => o.sample(rng),
        }
    }

    pub fn kind(&self) -> &'static str {
        match &self.geometry {
            Geometry::Polytope { .. } => "polytope",
            Geometry::Segment { .. } => "segment",
            Geometry::Box { .. } => "box",
            Geometry::Callable(o) => o.kind(),
        }
    }

    pub fn params(&self) -> Value {
        match &self.geometry {
            Geometry::Polytope { vertices } => json!({ "vertices": vertices }),
            Geometry::Segment { a, b } => json!({ "a": a, "b": b }),
            Geometry::Box { center, half_widths, axes } => {
                json!({ "center": center, "half_widths": half_widths, "axes": axes })
            }
            Geometry::Callable(o) => o.params(),
        }
    }
}

/// Distance from `theta` to the section under the section's metric.
pub fn section_distance(theta: &[f64], s: &ConvexSection) -> Result<f64> {
    check_dim(s.dim(), theta.len())?;
    check_finite(theta, "point")?;
    match &s.geometry {
        Geometry::Polytope { vertices } => Ok(project_onto_polytope(theta, vertices, s.metric)?.1),
        Geometry::Segment { a, b } => match s.metric {
            Metric::L2 => Ok(segment_l2(theta, a, b)),
            _ => Ok(project_onto_polytope(theta, &[a.clone(), b.clone()], s.metric)?.1),
        },
        Geometry::Box { center, half_widths, axes } => Ok(box_l2(theta, center, half_widths, axes)),
        Geometry::Callable(o) => o.distance(theta),
    }
}

/// Distance from a matrix-valued object (a Choi state) to a callable section.
pub fn section_distance_matrix(m: &HermitianMatrix, s: &ConvexSection) -> Result<f64> {
    match &s.geometry {
        Geometry::Callable(o) => o.distance_to_matrix(m),
        _ => Err(Error::Unsupported(format!(
            "{} section has no matrix form",
            s.kind()
        ))),
    }
}

fn segment_l2(p: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let ab: Vec<f64> = b.iter().zip(a).map(|(x, y)| x - y).collect();
    let len2: f64 = ab.iter().map(|x| x * x).sum();
    let t = if len2 == 0.0 {
        0.0
    } else {
        (p.iter().zip(a).zip(&ab).map(|((pi, ai), d)| (pi - ai) * d).sum::<f64>() / len2).clamp(0.0, 1.0)
    };
    p.iter()
        .zip(a)
        .zip(&ab)
        .map(|((pi, ai), d)| {
            let r = pi - ai - t * d;
            r * r
        })
        .sum::<f64>()
        .sqrt()
}

fn box_l2(p: &[f64], center: &[f64], half_widths: &[f64], axes: &[RealVector]) -> f64 {
    let mut r: Vec<f64> = p.iter().zip(center).map(|(x, c)| x - c).collect();
    let mut excess = 0.0;
    for (ax, h) in axes.iter().zip(half_widths) {
        let c: f64 = r.iter().zip(ax).map(|(x, a)| x * a).sum();
        for (ri, ai) in r.iter_mut().zip(ax) {
            *ri -= c * ai;
        }
        let over = (c.abs() - h).max(0.0);
        excess += over * over;
    }
    (excess + r.iter().map(|x| x * x).sum::<f64>()).sqrt()
}

pub(crate) fn dirichlet_mix(points: &[RealVector], rng: &mut ChaCha8Rng) -> RealVector {
    let w: Vec<f64> = (0..points.len())
        .map(|_| -(1.0 - rng.gen::<f64>()).ln())
        .collect();
    let total: f64 = w.iter().sum();
    let mut out = vec![0.0; points[0].len()];
    for (p, wi) in points.iter().zip(&w) {
        for (o, x) in out.iter_mut().zip(p) {
            *o += wi / total * x;
        }
    }
    out
}
