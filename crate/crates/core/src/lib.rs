//! Min/max propagation on quadrilateral tilings.
//!
//! Gray images are treated as tilings of ordered levels. A small family of local
//! rules ([`kernels`]) run to a fixed point ([`engine`]) builds gray convex hulls,
//! their constrained duals, rays and directional "dales". Pipelines over those
//! runs ([`features`]) extract lakes, dales, concavity depth and ridges and
//! summarize glyphs by them. [`oracle`] holds brute-force references used to
//! check the kernels against the shortest-path definitions they implement.

pub mod cli;
pub mod components;
pub mod engine;
pub mod error;
pub mod features;
pub mod fixtures;
pub mod grid;
pub mod kernels;
pub mod oracle;
pub mod pipelines;
pub mod selftest;
pub mod pgm;

pub use components::{label_components, ComponentMap, Connectivity};
pub use engine::{run_fixpoint, Fixpoint, RunOptions, RunStats, Schedule};
pub use error::{Error, Result};
pub use grid::{BorderPolicy, Grid, Level, Neighborhood};
pub use kernels::{lookup_kernel, KernelSchema};
