//! Hop-1 short-time Fourier transform, its per-frame inverse, and the grid
//! container shared by every method.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Float;

use crate::dft::Dft;
use crate::error::{Error, Result};
use crate::signal::Signal;
use crate::window::WindowSpec;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Uniform axis `start + i * step`, `i in 0..len`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    start: f64,
    step: f64,
    len: usize,
}

impl Axis {
    pub fn new(start: f64, step: f64, len: usize) -> Self {
        Axis { start, step, len }
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn value(&self, i: usize) -> f64 {
        self.start + i as f64 * self.step
    }

    /// Fractional index of `x` on this axis.
    pub fn position(&self, x: f64) -> f64 {
        (x - self.start) / self.step
    }

    /// Index of the nearest axis point, or `None` when `x` rounds outside.
    pub fn nearest(&self, x: f64) -> Option<usize> {
        let pos = Float::round(self.position(x));
        if pos.is_finite() && pos >= 0.0 && pos < self.len as f64 {
            Some(pos as usize)
        } else {
            None
        }
    }
}

/// Complex matrix over (frame, bin) with the factor `rho` that turns the
/// frequency marginal back into signal samples. A NaN `rho` marks an
/// energy-valued, non-invertible grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TfrGrid {
    data: Vec<Complex64>,
    times: Axis,
    freqs: Axis,
    rho: f64,
    method: String,
    source_fs_hz: f64,
}

impl TfrGrid {
    pub fn new(
        data: Vec<Complex64>,
        times: Axis,
        freqs: Axis,
        rho: f64,
        method: impl Into<String>,
        source_fs_hz: f64,
    ) -> Result<Self> {
        if times.is_empty() || freqs.is_empty() {
            return Err(Error::shape("grid axes must be non-empty"));
        }
        if data.len() != times.len() * freqs.len() {
            return Err(Error::shape(format!(
                "{} entries for {} frames x {} bins",
                data.len(),
                times.len(),
                freqs.len()
            )));
        }
        if !(times.step() > 0.0 && freqs.step() > 0.0) {
            return Err(Error::shape("grid axes must be strictly increasing"));
        }
        if !(source_fs_hz > 0.0 && source_fs_hz.is_finite()) {
            return Err(Error::invalid("source sample rate must be positive"));
        }
        if data.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::invalid("grid entries must be finite"));
        }
        Ok(TfrGrid {
            data,
            times,
            freqs,
            rho,
            method: method.into(),
            source_fs_hz,
        })
    }

    /// Same axes and factor, new data. Used by methods that move mass around.
    pub(crate) fn with_data(&self, data: Vec<Complex64>, method: impl Into<String>) -> Self {
        debug_assert_eq!(data.len(), self.data.len());
        TfrGrid {
            data,
            times: self.times,
            freqs: self.freqs,
            rho: self.rho,
            method: method.into(),
            source_fs_hz: self.source_fs_hz,
        }
    }

    pub fn zeros_like(&self, method: impl Into<String>) -> Self {
        self.with_data(vec![ZERO; self.data.len()], method)
    }

    pub fn n_frames(&self) -> usize {
        self.times.len()
    }

    pub fn n_bins(&self) -> usize {
        self.freqs.len()
    }

    pub fn times(&self) -> Axis {
        self.times
    }

    pub fn freqs(&self) -> Axis {
        self.freqs
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn method(&self) -> &str {
        &self.method
    }

    pub fn source_fs_hz(&self) -> f64 {
        self.source_fs_hz
    }

    /// DFT length implied by the frequency step.
    pub fn nfft(&self) -> usize {
        Float::round(self.source_fs_hz / self.freqs.step()) as usize
    }

    /// True when the bins cover the whole DFT circle `[0, fs)`.
    pub fn is_full_circle(&self) -> bool {
        self.freqs.start() == 0.0 && self.n_bins() == self.nfft()
    }

    pub fn is_invertible(&self) -> bool {
        self.rho.is_finite()
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<Complex64> {
        self.data
    }

    pub fn frame(&self, n: usize) -> &[Complex64] {
        let nb = self.n_bins();
        &self.data[n * nb..(n + 1) * nb]
    }

    pub fn frames(&self) -> core::slice::ChunksExact<'_, Complex64> {
        self.data.chunks_exact(self.n_bins())
    }

    pub fn get(&self, n: usize, k: usize) -> Complex64 {
        self.data[n * self.n_bins() + k]
    }

    pub fn frame_sum(&self, n: usize) -> Complex64 {
        self.frame(n).iter().sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn nonzero_count(&self) -> usize {
        self.data.iter().filter(|z| z.re != 0.0 || z.im != 0.0).count()
    }

    pub fn scaled(&self, c: f64) -> TfrGrid {
        let data = self.data.iter().map(|z| z * c).collect();
        self.with_data(data, self.method.clone())
    }

    /// Bins `[0, n_bins / 2)`, i.e. `[0, fs/2)` for a full-circle grid.
    pub fn positive_half(&self) -> TfrGrid {
        let half = self.n_bins() / 2;
        let data = self
            .frames()
            .flat_map(|row| row[..half].iter().copied())
            .collect();
        TfrGrid {
            data,
            times: self.times,
            freqs: Axis::new(self.freqs.start(), self.freqs.step(), half),
            rho: self.rho,
            method: self.method.clone(),
            source_fs_hz: self.source_fs_hz,
        }
    }

    fn check_invertible(&self) -> Result<()> {
        if !self.is_invertible() {
            return Err(Error::NonInvertibleGrid(self.method.clone()));
        }
        if !self.is_full_circle() {
            return Err(Error::shape("reconstruction needs the full DFT circle"));
        }
        let hop = self.times.step() * self.source_fs_hz;
        if Float::abs(hop - 1.0) > 1e-9 {
            return Err(Error::shape("reconstruction needs a hop of one sample"));
        }
        Ok(())
    }

    /// `rho * sum_k G[n, k]` over the bins selected by `keep` for each frame.
    pub(crate) fn marginal(&self, keep: impl Fn(usize, usize) -> bool) -> Result<Signal> {
        self.check_invertible()?;
        let samples = self
            .frames()
            .enumerate()
            .map(|(n, row)| {
                let sum: Complex64 = row
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| keep(n, *k))
                    .map(|(_, z)| *z)
                    .sum();
                sum * self.rho
            })
            .collect();
        Ok(Signal::new(samples, self.source_fs_hz)?.with_start(self.times.start()))
    }
}

/// `X[n, k] = sum_m s[m] taps[m - n] e^{-j 2 pi k (m - n) / nfft}` for every
/// sample `n`, with zero extension outside the signal. `taps` has odd length
/// and is centred on its middle element.
pub(crate) fn windowed_transform<D: Dft + ?Sized>(
    sig: &Signal,
    taps: &[f64],
    dft: &D,
) -> Vec<Complex64> {
    let nfft = dft.size();
    let half = (taps.len() / 2) as isize;
    let s = sig.samples();
    let len = s.len() as isize;
    let mut out = Vec::with_capacity(s.len() * nfft);
    let mut buf = vec![ZERO; nfft];
    for n in 0..len {
        buf.iter_mut().for_each(|b| *b = ZERO);
        for (i, &g) in taps.iter().enumerate() {
            let d = i as isize - half;
            let m = n + d;
            if m < 0 || m >= len {
                continue;
            }
            buf[d.rem_euclid(nfft as isize) as usize] = s[m as usize] * g;
        }
        dft.forward(&mut buf);
        out.extend_from_slice(&buf);
    }
    out
}

pub(crate) fn check_analysis<D: Dft + ?Sized>(sig: &Signal, w: &WindowSpec, dft: &D) -> Result<()> {
    let nfft = dft.size();
    if nfft == 0 || nfft < w.len() {
        return Err(Error::invalid(format!(
            "nfft {nfft} must be at least the window length {}",
            w.len()
        )));
    }
    if w.len() % 2 != 1 {
        return Err(Error::invalid("window length must be odd"));
    }
    if w.center_value == 0.0 {
        return Err(Error::invalid("window centre value must be nonzero"));
    }
    if Float::abs(w.sample_rate_hz - sig.sample_rate_hz()) > 1e-9 * sig.sample_rate_hz() {
        return Err(Error::invalid("window and signal sample rates differ"));
    }
    Ok(())
}

pub(crate) fn grid_axes(sig: &Signal, nfft: usize) -> (Axis, Axis) {
    let fs = sig.sample_rate_hz();
    (
        Axis::new(sig.t0_s(), 1.0 / fs, sig.len()),
        Axis::new(0.0, fs / nfft as f64, nfft),
    )
}

/// Hop-1 STFT over the full DFT circle. `rho = 1 / (nfft g(0))`.
pub fn stft<D: Dft + ?Sized>(sig: &Signal, w: &WindowSpec, dft: &D) -> Result<TfrGrid> {
    check_analysis(sig, w, dft)?;
    let nfft = dft.size();
    let data = windowed_transform(sig, &w.values, dft);
    let (times, freqs) = grid_axes(sig, nfft);
    TfrGrid::new(
        data,
        times,
        freqs,
        1.0 / (nfft as f64 * w.center_value),
        "stft",
        sig.sample_rate_hz(),
    )
}

/// `s[n] = rho * sum_k G[n, k]`.
pub fn istft(grid: &TfrGrid) -> Result<Signal> {
    grid.marginal(|_, _| true)
}

/// Cell-weighted energy `sum |G|^2 dt df`.
pub fn energy(grid: &TfrGrid) -> f64 {
    grid.data.iter().map(|z| z.norm_sqr()).sum::<f64>() * grid.times.step() * grid.freqs.step()
}
