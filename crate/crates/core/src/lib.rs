//! Simulation of the time-bin fiber-loop interferometer under loss and mode-mismatch.
//!
//! A train of `m` pulses enters a length-`τ` inner loop through a dynamically switched
//! beamsplitter; an outer loop repeats the inner pass `L` times. This crate provides
//!
//! - [`linop`]: the lossless single-pass map `V`, its composition `U = V(1)…V(L)` and random
//!   switching programs,
//! - [`loss`]: the path-dependent loss skew, the similarity metric `S` and the post-selection
//!   probability `P_S`, plus best-of-N search over switching programs,
//! - [`temporal`]: wave-packet shifts from loop-length error and source jitter, and the
//!   output-state fidelity through two independent routes,
//! - [`fock`]: a brute-force Fock-space oracle with unitary dilation of lossy maps,
//! - [`sweep`]: seeded, grid-based experiments with CSV/JSON output.
//!
//! Indices exposed by the API (`i`, `j`, `t`, pass `l`) are 1-based.

pub mod error;
pub mod fock;
pub mod linop;
pub mod loss;
pub mod oracle;
mod par;
pub mod permanent;
pub mod rng;
pub mod sweep;
pub mod temporal;
pub mod validate;

pub use error::{Error, Result};
pub use linop::{BeamsplitterSetting, SwitchingSequence, TransferMatrix};
pub use loss::{LossMatrix, LossParams};
pub use temporal::{MismatchParams, TemporalState};
