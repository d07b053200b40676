//! Direct and inverse transmission eigenvalue problems for spherically
//! symmetric media, solved with Neumann series of Bessel functions.

pub mod bessel;
pub mod charfn;
pub mod completion;
pub mod error;
pub mod expr;
pub mod index;
pub mod interp;
pub mod inverse;
pub mod jet;
pub mod liouville;
pub mod lstsq;
pub mod nsbf;
pub mod quadrature;
pub mod roots;
pub mod shooting;

pub use error::{Result, TevpError};
pub use index::{IndexKind, NamedIndex, RefractiveIndexModel};
pub use liouville::{liouville_transform, LiouvilleData};
pub use nsbf::{CoefficientTable, IndicatorReport};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
