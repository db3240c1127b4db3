//! File formats, an FFT backend and the command-line driver for
//! `ridgesqueeze-core`.

pub mod app;
pub mod error;
pub mod fft;
pub mod formats;

pub use error::{Error, Result};
pub use fft::RustFft;
