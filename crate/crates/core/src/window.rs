//! Gaussian analysis window together with its derivative and time-weighted
//! companions.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_traits::Float;

use crate::error::{Error, Result};

/// Symmetric window of odd length `L = 2M + 1`, centred on index `M`.
///
/// `d_values` holds `g'(t)` in 1/s and `t_values` holds `t g(t)` in seconds,
/// both sampled on the same grid as `values`.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowSpec {
    pub values: Vec<f64>,
    pub d_values: Vec<f64>,
    pub t_values: Vec<f64>,
    pub sigma_s: f64,
    pub center_value: f64,
    pub sample_rate_hz: f64,
}

impl WindowSpec {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `M`, the number of taps on each side of the centre.
    pub fn half_len(&self) -> usize {
        self.values.len() / 2
    }
}

/// Default truncation of the Gaussian, in multiples of sigma. At six sigma
/// the truncation ripple sits below the reassignment floor.
pub const DEFAULT_HALF_WIDTH_SIGMAS: f64 = 6.0;

/// `g(t) = exp(-t^2 / (2 sigma^2))` sampled at `t = n / fs` for
/// `|t| <= half_width_sigmas * sigma`.
pub fn gaussian_window(sigma_s: f64, fs: f64, half_width_sigmas: f64) -> Result<WindowSpec> {
    if !(sigma_s > 0.0 && sigma_s.is_finite()) {
        return Err(Error::invalid("window sigma must be positive"));
    }
    if !(fs > 0.0 && fs.is_finite()) {
        return Err(Error::invalid("sample rate must be positive"));
    }
    if !(half_width_sigmas >= 3.0 && half_width_sigmas.is_finite()) {
        return Err(Error::invalid("window half width must be at least 3 sigma"));
    }
    let half = Float::floor(half_width_sigmas * sigma_s * fs) as i64;
    let var = sigma_s * sigma_s;
    let mut values = Vec::with_capacity((2 * half + 1) as usize);
    let mut d_values = Vec::with_capacity(values.capacity());
    let mut t_values = Vec::with_capacity(values.capacity());
    for n in -half..=half {
        let t = n as f64 / fs;
        let g = Float::exp(-t * t / (2.0 * var));
        values.push(g);
        d_values.push(-t / var * g);
        t_values.push(t * g);
    }
    Ok(WindowSpec {
        center_value: values[half as usize],
        values,
        d_values,
        t_values,
        sigma_s,
        sample_rate_hz: fs,
    })
}

/// Full width (Hz) of the window's magnitude response at -3 dB, for an
/// `nfft`-point DFT. The crossing is linearly interpolated between bins.
pub fn window_response_width(w: &WindowSpec, nfft: usize) -> Result<f64> {
    if nfft < w.len() {
        return Err(Error::invalid("nfft must be at least the window length"));
    }
    let m = w.half_len() as f64;
    // symmetric taps: the DFT magnitude is |sum g[d] cos(2 pi k d / nfft)|
    let magnitude = |k: usize| -> f64 {
        let acc: f64 = w
            .values
            .iter()
            .enumerate()
            .map(|(i, g)| g * Float::cos(2.0 * PI * k as f64 * (i as f64 - m) / nfft as f64))
            .sum();
        acc.abs()
    };
    let peak = magnitude(0);
    let threshold = peak * Float::powf(10.0, -3.0 / 20.0);
    let df = w.sample_rate_hz / nfft as f64;
    let mut prev = peak;
    for k in 1..=nfft / 2 {
        let cur = magnitude(k);
        if cur < threshold {
            let x = (k - 1) as f64 + (prev - threshold) / (prev - cur);
            return Ok(2.0 * x * df);
        }
        prev = cur;
    }
    Ok(w.sample_rate_hz)
}
