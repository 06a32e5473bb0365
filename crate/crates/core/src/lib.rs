//! Flag graphs of finite affine spaces: finite fields, the affine geometry
//! AG(n, q), semi-affine groups, orbital graphs on flags and the checks that
//! certify their structure.

pub mod error;
pub mod field;
pub mod flaggraph;
pub mod geometry;
pub mod gl1;
pub mod group;
pub mod matrix;
pub mod par;
pub mod verify;

pub use error::{Error, Result};
pub use field::{Fe, Field};
pub use geometry::{AffineSpace, Flag, Line, LineRelation, Point, SpaceRef};
pub use gl1::{GammaL1, GammaL1Element, StandardParameters};
pub use group::{named_group, GroupSpec, NamedGroup, SemiAffineMap};
pub use par::Exec;
