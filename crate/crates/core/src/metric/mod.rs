//! Conformal distances `d_u` on grid manifolds and comparisons between
//! finite metric spaces.

mod convergence;
mod gh;
mod landmarks;
mod paths;
mod space;

pub use convergence::{uniform_convergence_report, write_convergence_csv, write_distance_csv, ConvergenceReport};
pub use gh::{gh_bruteforce, gh_upper_shared, GH_BRUTEFORCE_LIMIT};
pub use landmarks::{farthest_point_landmarks, Landmarks};
pub use paths::{confined_distance, conformal_distances, region_diameter, ConfinedDistance, DistanceRows, PathStencil};
pub use space::{FiniteMetricSpace, AXIOM_TOL, EXHAUSTIVE_TRIANGLE_LIMIT, METRIC_MAGIC};

use crate::error::Result;

impl DistanceRows {
    /// The metric restricted to the sources, labelled by vertex id.
    pub fn to_metric_space(&self) -> Result<FiniteMetricSpace> {
        FiniteMetricSpace::new(self.sources.clone(), self.source_matrix(), None)
    }
}
