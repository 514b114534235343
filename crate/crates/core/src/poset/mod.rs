//! The poset of normal lattice polytopes: quantum jumps, walks, and the
//! finite atlases with their order complexes.

mod atlas;
mod homology;
mod jumps;
mod walk;

pub use atlas::{build_atlas, Atlas, AtlasBox, AtlasOptions};
pub use homology::{homology, Homology};
pub use jumps::{
    enumerate_jumps_down, enumerate_jumps_to_height, enumerate_jumps_up, enumerate_jumps_up_with_stats,
    height_bound, is_maximal, is_minimal, points_at_distance, DownStep, Jump, JumpStats,
};
pub use walk::{walk, walk_with, Strategy, Termination, WalkStep, WalkTrace};

use crate::cone::RationalCone;
use crate::polytope::LatticePolytope;

/// Map from polytopes to cones used by isolated-element searches.
///
/// No implementation ships with this crate; the survey pipeline accepts one
/// from the caller.
pub trait EmbedMap {
    fn embed(&self, p: &LatticePolytope) -> Option<RationalCone>;
}
