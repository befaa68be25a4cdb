//! Distribution-based integration in superspace R^{m|2n}.
//!
//! Superfunctions live over a Grassmann algebra with expression-valued
//! coefficients; Heaviside and Dirac distributions of super phases expand into
//! finite sums of δ-derivatives of the body phase, which the integration layer
//! evaluates numerically.

pub mod clifford;
pub mod distrib;
pub mod error;
pub mod expr;
pub mod grassmann;
pub mod greenkernel;
pub mod integrate;
pub mod poly;
pub mod quad;
pub mod ring;
pub mod scalar;
pub mod special;
pub mod superfun;
pub mod verify;

pub use error::{Error, Result};
