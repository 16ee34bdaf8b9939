//! Generic star-resource-theory engine: polyhedral cones, free sections,
//! domains, the geometric-mean monotone, robustness, free operations and
//! sampled fortress validation.

mod cone;
mod fortress;
mod ops;
mod section;
mod theory;

pub use cone::{cone_contains, reflect_cone, PolyhedralCone, CONE_TOL};
pub use fortress::{redundancy_deletion, validate_fortress, Counterexample, FortressReport};
pub use ops::{
    frame_coefficients, g_robustness, hyperbolic_contraction, relative_error_factor, robustness,
    shrink_to_kernel,
};
pub use section::{section_distance, section_distance_matrix, ConvexSection, Geometry, SectionOracle};
pub use theory::{
    g_domain, g_monotone, g_orbit_max, kernel_distance, monotone_bounds, Domain, StarTheory,
    WitnessReport,
};
