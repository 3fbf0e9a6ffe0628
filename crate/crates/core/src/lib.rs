//! Explicit charted surfaces in C^2 and C^3 (a disc that is flat at
//! infinity, tori, projective planes, connected-sum chains joined by tubes,
//! spliced surfaces and their graph lifts), the auxiliary cutoff and series
//! constructions those surfaces carry, and numerical certificates for the
//! analytic hypotheses they are meant to satisfy: immersion rank, total
//! reality of graphs, level-set structure on the torus, disc-algebra
//! obstructions on circle graphs, and constrained extrema.
//!
//! Everything is evaluated in double precision from closed-form expressions;
//! a centered finite-difference oracle cross-checks every analytic
//! derivative the crate exposes.

pub mod bump;
pub mod checks;
pub mod error;
pub mod export;
pub mod mesh;
pub mod num;
pub mod smooth;
pub mod surface;

pub use error::CoreError;
pub use num::C64;
pub use smooth::{CPoint, ChartMap, ComplexJacobian, DiffMode, Param2, RealJacobian};
