//! Polynomial zonotopes and the overapproximate-and-split halfspace
//! intersection check, with brute-force oracles to test it against.
//!
//! * [`sets`]: zonotopes, polynomial zonotopes, halfspaces.
//! * [`overapprox`]: zonotope enclosure, error bound, contraction factor.
//! * [`splitting`]: factor splitting and split trees.
//! * [`intersect`]: the halfspace intersection checker.
//! * [`oracles`]: corner, grid and branch-and-bound minimizers.
//! * [`hardness`]: bipartization reduction and the counterexample sets.
//! * [`plot`]: polygon plots of split-tree enclosures.

pub mod error;
pub mod fixtures;
pub mod hardness;
pub mod intersect;
pub mod io;
pub mod oracles;
pub mod overapprox;
pub mod plot;
pub mod random;
pub mod sets;
pub mod splitting;

pub use error::{PzError, Result};
pub use sets::{Halfspace, PolyZonotope, RawPolyZonotope, Zonotope};
