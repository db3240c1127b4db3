//! Time-frequency post-processing that squeezes every short-time Fourier
//! coefficient onto the ridge of its frequency basin.
//!
//! The squeezing step only moves mass along the frequency axis, so each
//! frame keeps its complex sum and the signal comes back exactly from the
//! frequency marginal. The reference post-processors (synchrosqueezing,
//! reassignment, synchroextraction, local-maximum synchrosqueezing) live in
//! [`baselines`] for comparison.
//!
//! The crate is `no_std` and only needs `alloc`. FFTs are supplied by the
//! caller through the [`dft::Dft`] trait; [`dft::DirectDft`] is a slow
//! portable fallback.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod baselines;
pub mod dft;
pub mod error;
pub mod metrics;
pub mod pipeline;
pub mod ridge;
pub mod signal;
pub mod squeeze;
pub mod tfr;
pub mod window;

pub use num_complex::Complex64;

pub use dft::{Dft, DirectDft};
pub use error::{Error, Result};
pub use ridge::{FrameRidges, IfEstimate, MaxScope, PiecewiseLinear, Track};
pub use signal::{Mode, ModeModel, Signal};
pub use tfr::{Axis, TfrGrid};
pub use window::WindowSpec;
