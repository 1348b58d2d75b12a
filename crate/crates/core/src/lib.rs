pub mod applications;
pub mod bounds;
pub mod density;
pub mod divergence;
pub mod error;
pub mod numerics;
pub mod oracle;

pub use error::{Error, Result};
pub use numerics::{Estimate, McSpec, Method, QuadratureSpec};
