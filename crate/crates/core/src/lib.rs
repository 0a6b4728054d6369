//! Uneven hyperplane splittings of continuous probability measures.
//!
//! Given n measures on `R^n` and target ratios `alpha_1..alpha_n`, this
//! crate searches for an oriented hyperplane `H` whose positive side
//! carries exactly the prescribed mass of each measure, decides when the
//! supports can be strictly separated by hyperplanes (the sufficient
//! condition under which such a hyperplane always exists), certifies
//! roots of continuous maps on boxes via Poincare-Miranda face sign
//! conditions, partitions one planar measure by two lines into four
//! parts of prescribed mass, and traces the "central sphere" anchor
//! curves whose geometry explains when splittings fail to exist.

pub mod auxiliary;
pub mod clip2d;
pub mod error;
pub mod geom;
pub mod measure;
pub mod miranda;
pub mod numerics;
pub mod partition;
pub mod scenario;
pub mod schema;
pub mod separability;
pub mod solver;
pub mod svg;

pub(crate) mod lp;

pub use error::{Error, Result};
pub use geom::{Hyperplane, Vector};
pub use measure::{MassValue, Measure};
pub use solver::{Problem, SolveConfig, SplitOutcome, SplitResult};
