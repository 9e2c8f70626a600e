//! Unary lattice discretization, the lifted body `conv(K̃)`, approximate
//! Carathéodory rounding and the vee-learning oracle built on them.

mod body;
mod lattice;
mod round;
mod vee;

pub use body::LiftedBody;
pub use lattice::{is_staircase, LiftedPoint, UnaryLattice};
pub use round::{caratheodory_decompose, caratheodory_round, Decomposition, DEFAULT_CARATHEODORY_CONSTANT};
pub use vee::{VeeConfig, VeeOracle};
