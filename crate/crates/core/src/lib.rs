//! Structure-preserving integrators for linearly damped GENERIC systems.
//!
//! A particle with position `q` and momentum `p` is damped at rate `γ` by a
//! thermal bath whose entropy `S` absorbs the dissipated energy. The crate
//! provides the YBABY and mYBABY splitting methods, RK3 and the closed-form
//! average discrete gradient method for comparison, exact and fine-step
//! reference solutions, and diagnostics for convergence order, conformal
//! symplecticity, Poisson structure, degeneracy and entropy production.

// `!(x > 0.0)` is used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod diagnostics;
pub mod error;
pub mod integrators;
pub mod reference;
pub mod system;

pub use error::{Error, Result};
pub use integrators::{integrate, Method, Stepper, Trajectory};
pub use reference::{HarmonicAnalytic, NumericalReference};
pub use system::{Cosine, Harmonic, Potential, State, SystemParams};
