//! Analysis of planar piecewise-linear Filippov systems near a boundary
//! equilibrium bifurcation in which a stable focus and an unstable focus
//! collide on the switching line `x = 0`.
//!
//! The crate is organised bottom-up:
//!
//! - [`model`]: coefficients, model files and the three built-in examples;
//! - [`classify`]: equilibria, folds, sliding regions, theorem hypotheses;
//! - [`halfmaps`]: closed-form half-return maps and their composition;
//! - [`sliding`]: the sliding vector field and pseudo-equilibria;
//! - [`sim`]: an event-driven Filippov integrator used as an independent oracle;
//! - [`limit_cycles`]: fixed points of the return map and cycle certificates.
//!
//! ```
//! use filippov_beb::{classify, model};
//!
//! let sys = model::ex2();
//! let verdict = classify::theorem_verdict(&sys);
//! assert!(!verdict.hypotheses.gamma_sign_ok);
//! assert_eq!(verdict.alpha, Some(-0.18));
//! ```

// `!(a > b)` is deliberate: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classify;
pub mod error;
pub mod halfmaps;
pub mod limit_cycles;
pub mod model;
pub mod normalize;
pub mod roots;
pub mod sim;
pub mod sliding;

pub use error::{Error, MapFailure, Result};
pub use model::{FilippovSystem, HalfSystem, Side};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/models.md")]
    mod models {}
    #[doc = include_str!("../../../book/src/classification.md")]
    mod classification {}
    #[doc = include_str!("../../../book/src/return-maps.md")]
    mod return_maps {}
    #[doc = include_str!("../../../book/src/limit-cycles.md")]
    mod limit_cycles {}
    #[doc = include_str!("../../../book/src/sliding.md")]
    mod sliding {}
    #[doc = include_str!("../../../book/src/simulation.md")]
    mod simulation {}
}
