//! Unified-transform analysis of the modified Korteweg-de Vries equation
//! on a finite interval.
//!
//! The crate computes, for `q_t - q_xxx + 6 lambda q^2 q_x = 0` on
//! `[0, L] x [0, T]`:
//!
//! * the direct spectral maps from initial and boundary data to the
//!   spectral matrices `s(k)`, `S(k)`, `S1(k)` ([`spectral`]);
//! * the algebraic global relation coupling them, evaluated as a
//!   quantitative compatibility residual ([`global`]);
//! * the associated 2x2 matrix Riemann-Hilbert problem on the contour
//!   `{Im k^3 = 0, |k| >= R} ∪ {|k| = R}`: contour construction and jump
//!   assembly ([`contour`]), Cauchy-transform collocation and field
//!   reconstruction ([`rh`]);
//! * certified oracle data sets (exact traveling wave, finite-difference
//!   initial-boundary-value solver) for end-to-end verification
//!   ([`oracle`]);
//! * flat-file formats and the command pipeline behind the `mkdv-ibvp`
//!   binary ([`pipeline`]).
//!
//! See the `examples/` directory for one runnable walk-through per
//! capability.

pub mod error;
pub mod mat2;
pub mod grid;
pub mod integrate;
pub mod spectral;
pub mod global;
pub mod contour;
pub mod cauchy;
pub mod rh;
pub mod oracle;
pub mod config;
pub mod io;
pub mod pipeline;

pub use error::{Error, Result};
pub use mat2::{Mat2C, ModelParams, PhaseArgs, Sign, C64};
