//! Analytical models of interweave cognitive-radio spectrum sharing.
//!
//! A secondary (cognitive radio, CR) transmitter senses a licensed primary
//! user's (PU) channel and transmits in the slots it detects as free. This
//! crate computes everything the analysis of that system needs:
//!
//! - [`channel`] — ergodic capacities of the PU and CR links over Rayleigh
//!   fading, with and without cross-interference, in closed form and by
//!   Monte Carlo.
//! - [`ratemodel`] — achievable rate regions, sum capacity and its
//!   maximizers, and the spectral efficiency factor for ideal and
//!   error-prone (false alarm / missed detection) sensing.
//! - [`admissibility`] — the sets of detector operating points
//!   `(p_fa, p_md)` for which the CR's presence helps the system (weak
//!   admissibility) or keeps the PU's loss within a budget (strong
//!   admissibility with a loss factor).
//! - [`detectors`] — ROC models for energy detection, matched filtering,
//!   and magnitude-squared coherence, and their intersection with the
//!   admissible region.
//! - [`simulator`] — a slot-level Monte Carlo simulation of the same
//!   system, used as an independent check of every closed form.
//! - [`specfun`] — the scalar special functions everything above rests on.
//!
//! All computations are deterministic; randomized routines take an explicit
//! seed and produce identical results for identical seeds regardless of the
//! parallelism degree.

// Validation uses `!(x > 0.0)` and friends on purpose: the negation treats
// NaN as out of domain, which `x <= 0.0` would not.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod admissibility;
pub mod channel;
pub mod detectors;
pub mod error;
pub mod ratemodel;
pub mod simulator;
pub mod specfun;

pub use error::{Error, Result};
