pub mod error;
pub mod framework;
pub mod kernel;
pub mod models;
pub mod random;
pub mod relations;
pub mod report;
pub mod robin;
pub mod scalar;
pub mod suites;

pub use error::{Error, Result};
pub use scalar::{Real, C};

/// Double-precision aliases.
pub type Setting64 = framework::Setting<f64>;
pub type Relation64 = relations::LinearRelation<f64>;
pub type Params64 = robin::BoundaryParams<f64>;
pub type Matrix64 = kernel::ComplexMatrix<f64>;

/// Single-precision aliases.
pub type Setting32 = framework::Setting<f32>;
pub type Relation32 = relations::LinearRelation<f32>;
pub type Params32 = robin::BoundaryParams<f32>;
pub type Matrix32 = kernel::ComplexMatrix<f32>;
