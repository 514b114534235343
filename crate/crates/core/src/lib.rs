//! Exact computations on lattice polytopes: normality tests, Hilbert bases,
//! quantum jumps between normal polytopes, random generation from bit
//! streams, and pyramidal growth of rational polytopes.
//!
//! All arithmetic is exact (`num-bigint` / `num-rational`).
//!
//! ```
//! use normwalk::{LatticePolytope, normality};
//!
//! let p = LatticePolytope::from_i64s(&[&[0, 0, 0], &[1, 0, 0], &[0, 1, 0], &[1, 1, 2]]).unwrap();
//! let report = normality::check(&p);
//! assert!(!report.integrally_closed);
//! assert!(report.normal_wrt_lambda);
//! ```

pub mod bits;
pub mod cone;
pub mod continuous;
pub mod error;
pub mod generators;
pub mod io;
pub mod linalg;
pub mod normality;
pub mod point;
pub mod polytope;
pub mod poset;

mod hull;

pub use error::{Error, Result};
pub use linalg::IntMatrix;
pub use point::{LatticePoint, RationalPoint};
pub use polytope::{lambda_subgroup, AffineSublattice, Facet, Fingerprint, LatticePolytope};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/polytopes.md")]
    pub mod polytopes {}
    #[doc = include_str!("../../../book/src/normality.md")]
    pub mod normality {}
    #[doc = include_str!("../../../book/src/cones.md")]
    pub mod cones {}
    #[doc = include_str!("../../../book/src/jumps.md")]
    pub mod jumps {}
    #[doc = include_str!("../../../book/src/atlas.md")]
    pub mod atlas {}
    #[doc = include_str!("../../../book/src/generators.md")]
    pub mod generators {}
    #[doc = include_str!("../../../book/src/pyramids.md")]
    pub mod pyramids {}
    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod cli {}
}
