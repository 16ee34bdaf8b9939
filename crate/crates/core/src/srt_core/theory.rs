use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::cone::{cone_contains, PolyhedralCone, CONE_TOL};
use super::section::{section_distance, ConvexSection, Geometry};
use crate::error::{check_dim, Error, Result};
use crate::numerics::{geometric_mean, project_onto_polytope, Metric, RealVector};

/// A support cone together with the free sections it determines.
#[derive(Clone, Debug)]
pub struct Domain {
    pub cone: PolyhedralCone,
    pub sections: Vec<ConvexSection>,
}

impl Domain {
    pub fn new(cone: PolyhedralCone, sections: Vec<ConvexSection>) -> Result<Self> {
        if sections.is_empty() {
            return Err(Error::Validation("domain has no free sections".into()));
        }
        for s in &sections {
            check_dim(cone.dim(), s.dim())?;
        }
        Ok(Self { cone, sections })
    }

    pub fn distances(&self, theta: &[f64]) -> Result<Vec<f64>> {
        self.sections.iter().map(|s| section_distance(theta, s)).collect()
    }

    /// Cone membership, or contact with one of the sections.
    pub fn contains(&self, theta: &[f64]) -> Result<bool> {
        if cone_contains(&self.cone, theta, CONE_TOL)? {
            return Ok(true);
        }
        for s in &self.sections {
            if section_distance(theta, s)? <= CONE_TOL {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

#[derive(Clone, Debug)]
pub struct StarTheory {
    pub dim: usize,
    pub kernel: Vec<RealVector>,
    pub domains: Vec<Domain>,
    /// V-representation of the set of valid objects.
    pub ambient: Option<Vec<RealVector>>,
    /// Distance-to-kernel oracle used for the upper bound; when absent the
    /// kernel polytope is used with the metric of the first section.
    pub kernel_section: Option<ConvexSection>,
}

impl StarTheory {
    pub fn new(
        dim: usize,
        kernel: Vec<RealVector>,
        domains: Vec<Domain>,
        ambient: Option<Vec<RealVector>>,
    ) -> Result<Self> {
        if kernel.is_empty() {
            return Err(Error::Validation("kernel is empty".into()));
        }
        if domains.is_empty() {
            return Err(Error::Validation("theory has no domains".into()));
        }
        for k in &kernel {
            check_dim(dim, k.len())?;
        }
        for d in &domains {
            check_dim(dim, d.cone.dim())?;
        }
        if let Some(a) = &ambient {
            if a.is_empty() {
                return Err(Error::Validation("ambient polytope has no vertices".into()));
            }
            for v in a {
                check_dim(dim, v.len())?;
            }
        }
        Ok(Self {
            dim,
            kernel,
            domains,
            ambient,
            kernel_section: None,
        })
    }

    pub fn with_kernel_section(mut self, s: ConvexSection) -> Result<Self> {
        check_dim(self.dim, s.dim())?;
        self.kernel_section = Some(s);
        Ok(self)
    }

    /// Same theory with domain `index` removed.
    pub fn without_domain(&self, index: usize) -> Result<Self> {
        if index >= self.domains.len() {
            return Err(Error::Validation(format!("no domain {index}")));
        }
        let mut t = self.clone();
        t.domains.remove(index);
        if t.domains.is_empty() {
            return Err(Error::Validation("theory would have no domains".into()));
        }
        Ok(t)
    }

    pub fn sections(&self) -> impl Iterator<Item = &ConvexSection> {
        self.domains.iter().flat_map(|d| d.sections.iter())
    }
}

/// Quantifier value with the domain that realised it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub value: f64,
    pub domain_index: usize,
    pub per_section: Vec<f64>,
    pub margin: f64,
    pub critical: f64,
}

impl WitnessReport {
    pub fn from_distances(domain_index: usize, per_section: Vec<f64>, critical: f64) -> Result<Self> {
        let value = geometric_mean(&per_section)?;
        Ok(Self {
            value,
            domain_index,
            per_section,
            margin: value - critical,
            critical,
        })
    }

    pub fn with_critical(mut self, critical: f64) -> Self {
        self.critical = critical;
        self.margin = self.value - critical;
        self
    }
}

pub fn g_domain(theta: &[f64], d: &Domain) -> Result<f64> {
    geometric_mean(&d.distances(theta)?)
}

/// Largest domain quantifier over all domains containing `theta`.
pub fn g_monotone(theta: &[f64], t: &StarTheory) -> Result<WitnessReport> {
    check_dim(t.dim, theta.len())?;
    let mut best: Option<WitnessReport> = None;
    for (i, d) in t.domains.iter().enumerate() {
        let in_cone = cone_contains(&d.cone, theta, CONE_TOL)?;
        let distances = d.distances(theta)?;
        if !in_cone && !distances.iter().any(|&x| x <= CONE_TOL) {
            continue;
        }
        let report = WitnessReport::from_distances(i, distances, 0.0)?;
        if best.as_ref().is_none_or(|b| report.value > b.value) {
            best = Some(report);
        }
    }
    best.ok_or(Error::Coverage)
}

/// Maximum of `g_monotone` over `theta` and its images under a finite list
/// of free operations.
pub fn g_orbit_max(
    theta: &[f64],
    t: &StarTheory,
    ops: &[&dyn Fn(&[f64]) -> Result<RealVector>],
) -> Result<f64> {
    let mut best = g_monotone(theta, t)?.value;
    for op in ops {
        best = best.max(g_monotone(&op(theta)?, t)?.value);
    }
    Ok(best)
}

pub fn kernel_distance(theta: &[f64], t: &StarTheory) -> Result<f64> {
    if let Some(s) = &t.kernel_section {
        return section_distance(theta, s);
    }
    let metric = t
        .sections()
        .next()
        .map(|s| s.metric())
        .unwrap_or(Metric::L2);
    Ok(project_onto_polytope(theta, &t.kernel, metric)?.1)
}

/// `(min over every free section, distance to the kernel)`.
pub fn monotone_bounds(theta: &[f64], t: &StarTheory) -> Result<(f64, f64)> {
    check_dim(t.dim, theta.len())?;
    let mut lower = f64::INFINITY;
    for s in t.sections() {
        lower = lower.min(section_distance(theta, s)?);
    }
    Ok((lower, kernel_distance(theta, t)?))
}

#[derive(Serialize, Deserialize)]
struct SectionDoc {
    #[serde(default)]
    label: String,
    kind: String,
    params: Value,
    metric: Metric,
}

#[derive(Serialize, Deserialize)]
struct DomainDoc {
    apex: RealVector,
    frame: Vec<RealVector>,
    sections: Vec<SectionDoc>,
}

#[derive(Serialize, Deserialize)]
struct TheoryDoc {
    dim: usize,
    kernel: Vec<RealVector>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ambient: Option<Vec<RealVector>>,
    domains: Vec<DomainDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    kernel_section: Option<SectionDoc>,
}

fn section_doc(s: &ConvexSection) -> SectionDoc {
    SectionDoc {
        label: s.label.clone(),
        kind: s.kind().to_string(),
        params: s.params(),
        metric: s.metric(),
    }
}

fn field<T: serde::de::DeserializeOwned>(params: &Value, name: &str) -> Result<T> {
    let v = params
        .get(name)
        .ok_or_else(|| Error::Validation(format!("section params missing `{name}`")))?;
    Ok(serde_json::from_value(v.clone())?)
}

fn section_from_doc(doc: SectionDoc) -> Result<ConvexSection> {
    let p = &doc.params;
    let geometry = match doc.kind.as_str() {
        "polytope" => Geometry::Polytope { vertices: field(p, "vertices")? },
        "segment" => Geometry::Segment { a: field(p, "a")?, b: field(p, "b")? },
        "box" => Geometry::Box {
            center: field(p, "center")?,
            half_widths: field(p, "half_widths")?,
            axes: field(p, "axes")?,
        },
        "markov-segment" => return crate::markov::segment_section(field(p, "j")?),
        "markov-kernel" => return Ok(crate::markov::kernel_section()),
        "tc-face" => return crate::total_corr::face_section_from_params(p),
        "unisto-triangle" => return crate::unistochastic::triangle_section_from_params(p),
        other => return Err(Error::Validation(format!("unknown section kind `{other}`"))),
    };
    ConvexSection::new(doc.label, geometry, doc.metric)
}

impl StarTheory {
    pub fn to_json(&self) -> Result<String> {
        let doc = TheoryDoc {
            dim: self.dim,
            kernel: self.kernel.clone(),
            ambient: self.ambient.clone(),
            domains: self
                .domains
                .iter()
                .map(|d| DomainDoc {
                    apex: d.cone.apex().to_vec(),
                    frame: d.cone.frame().to_vec(),
                    sections: d.sections.iter().map(section_doc).collect(),
                })
                .collect(),
            kernel_section: self.kernel_section.as_ref().map(section_doc),
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: TheoryDoc = serde_json::from_str(text)?;
        let domains = doc
            .domains
            .into_iter()
            .map(|d| {
                let cone = PolyhedralCone::new(d.apex, d.frame)?;
                let sections = d
                    .sections
                    .into_iter()
                    .map(section_from_doc)
                    .collect::<Result<Vec<_>>>()?;
                Domain::new(cone, sections)
            })
            .collect::<Result<Vec<_>>>()?;
        let mut t = StarTheory::new(doc.dim, doc.kernel, domains, doc.ambient)?;
        if let Some(k) = doc.kernel_section {
            t = t.with_kernel_section(section_from_doc(k)?)?;
        }
        Ok(t)
    }
}
