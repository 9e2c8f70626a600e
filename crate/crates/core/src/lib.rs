pub mod body;
pub mod error;
pub mod rng;
pub mod vector;

pub use body::{BodyKind, ConvexBody, Diameter};
pub use error::{Error, Result};
pub use rng::RngStream;
pub mod checks;
pub mod function;
pub mod smoothing;

pub use function::{DrFunction, LinearFunction, SmoothnessParams};
pub mod oracles;

pub use oracles::{LinearDomain, LinearOracle, OloKind, OloStrategy};
pub mod lift;
pub mod hypercube;
pub mod instances;
pub mod mfw;
