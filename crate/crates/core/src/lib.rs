//! Approximate counting of combinatorial families by random weighting.
//!
//! Sample i.i.d. weights from a symmetric measure, ask a max-weight oracle
//! for the best member, average, and turn the average into two-sided bounds
//! on the logarithm of the family size.

pub mod bounds;
pub mod cli;
pub mod error;
pub mod estimator;
pub mod exact;
pub mod families;
pub mod isoperimetry;
pub mod measures;
pub mod numeric;
pub mod rng;

pub use error::{Error, Result};
pub use families::{FamilyOracle, Graph, Rank};
pub use measures::{Measure, MeasureKind};
pub use rng::RandomStream;
