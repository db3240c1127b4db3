//! Reference post-processors: synchrosqueezing (SST), two-dimensional
//! reassignment (RM), synchroextraction (SET) and local-maximum
//! synchrosqueezing (LMSST).

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use num_traits::Float;

use crate::dft::Dft;
use crate::error::{Error, Result};
use crate::signal::Signal;
use crate::tfr::{check_analysis, stft, windowed_transform, TfrGrid};
use crate::window::{window_response_width, WindowSpec};

/// Coefficients below this fraction of the grid maximum are not moved.
pub const REASSIGN_FLOOR: f64 = 1e-8;

/// STFT together with the phase-derived frequency estimate of every cell.
#[derive(Debug, Clone)]
pub struct FrequencyOperator {
    pub stft: TfrGrid,
    /// Estimated IF in Hz, row-major like the grid; NaN below the floor.
    pub freq_hz: Vec<f64>,
}

impl FrequencyOperator {
    /// Target bin of cell `i` on the DFT circle, if the estimate is defined.
    pub fn target_bin(&self, i: usize) -> Option<usize> {
        let f = self.freq_hz[i];
        if f.is_nan() {
            return None;
        }
        let nfft = self.stft.n_bins() as i64;
        let k = Float::round(f / self.stft.freqs().step()) as i64;
        Some(k.rem_euclid(nfft) as usize)
    }
}

/// Frequency operator `f_hat = f_k - Im(V_{g'} / V) / (2 pi)`, the discrete
/// counterpart of `d/dt V / (j V)` obtained with the derivative window.
pub fn frequency_operator<D: Dft + ?Sized>(
    sig: &Signal,
    w: &WindowSpec,
    dft: &D,
) -> Result<FrequencyOperator> {
    let v = stft(sig, w, dft)?;
    let v_dg = windowed_transform(sig, &w.d_values, dft);
    let floor = REASSIGN_FLOOR * v.max_abs();
    let nb = v.n_bins();
    let df = v.freqs().step();
    let freq_hz = v
        .data()
        .iter()
        .zip(&v_dg)
        .enumerate()
        .map(|(i, (z, zd))| {
            if floor == 0.0 || z.norm() < floor {
                f64::NAN
            } else {
                (i % nb) as f64 * df - (zd / z).im / (2.0 * PI)
            }
        })
        .collect();
    Ok(FrequencyOperator { stft: v, freq_hz })
}

/// Synchrosqueezing: every coefficient is added into the bin nearest its
/// frequency estimate. Frame sums are preserved.
pub fn sst<D: Dft + ?Sized>(sig: &Signal, w: &WindowSpec, dft: &D) -> Result<TfrGrid> {
    let op = frequency_operator(sig, w, dft)?;
    let nb = op.stft.n_bins();
    let mut out = vec![Complex64::new(0.0, 0.0); op.stft.data().len()];
    for (i, &z) in op.stft.data().iter().enumerate() {
        let row = i - i % nb;
        let k = op.target_bin(i).unwrap_or(i % nb);
        out[row + k] += z;
    }
    Ok(op.stft.with_data(out, "sst"))
}

/// Classic reassigned spectrogram: `|V|^2` moved to `(t_hat, f_hat)` with
/// `t_hat = t + Re(V_{tg} / V)`. The output is energy-valued and carries a
/// NaN reconstruction factor.
pub fn reassignment<D: Dft + ?Sized>(sig: &Signal, w: &WindowSpec, dft: &D) -> Result<TfrGrid> {
    let op = frequency_operator(sig, w, dft)?;
    let v_tg = windowed_transform(sig, &w.t_values, dft);
    let nb = op.stft.n_bins();
    let nf = op.stft.n_frames() as i64;
    let fs = sig.sample_rate_hz();
    let mut energy = vec![0.0f64; op.stft.data().len()];
    for (i, &z) in op.stft.data().iter().enumerate() {
        let (n, k) = (i / nb, i % nb);
        let target = match op.target_bin(i) {
            Some(k_hat) => {
                let shift = Float::round((v_tg[i] / z).re * fs) as i64;
                let n_hat = (n as i64 + shift).clamp(0, nf - 1) as usize;
                n_hat * nb + k_hat
            }
            None => n * nb + k,
        };
        energy[target] += z.norm_sqr();
    }
    let data = energy.into_iter().map(|e| Complex64::new(e, 0.0)).collect();
    TfrGrid::new(
        data,
        op.stft.times(),
        op.stft.freqs(),
        f64::NAN,
        "rm",
        op.stft.source_fs_hz(),
    )
}

/// Synchroextraction: keeps `V[n, k]` only where the frequency estimate
/// rounds to `k` itself.
pub fn set<D: Dft + ?Sized>(sig: &Signal, w: &WindowSpec, dft: &D) -> Result<TfrGrid> {
    let op = frequency_operator(sig, w, dft)?;
    let nb = op.stft.n_bins();
    let out = op
        .stft
        .data()
        .iter()
        .enumerate()
        .map(|(i, &z)| {
            if op.target_bin(i) == Some(i % nb) {
                z
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    Ok(op.stft.with_data(out, "set"))
}

/// Default LMSST neighbourhood: the window's -3 dB half width, rounded up
/// to whole bins.
pub fn default_lmsst_delta(w: &WindowSpec, nfft: usize) -> Result<usize> {
    let width = window_response_width(w, nfft)?;
    let bins = width / 2.0 / (w.sample_rate_hz / nfft as f64);
    Ok(Float::ceil(bins).max(1.0) as usize)
}

/// Moves each coefficient to the magnitude maximum of its frame within
/// `delta_bins` bins. `delta_bins = 0` is the identity.
pub fn lmsst<D: Dft + ?Sized>(
    sig: &Signal,
    w: &WindowSpec,
    dft: &D,
    delta_bins: usize,
) -> Result<TfrGrid> {
    check_analysis(sig, w, dft)?;
    let v = stft(sig, w, dft)?;
    Ok(lmsst_grid(&v, delta_bins))
}

/// LMSST applied to an existing grid.
pub fn lmsst_grid(v: &TfrGrid, delta_bins: usize) -> TfrGrid {
    if delta_bins == 0 {
        return v.with_data(v.data().to_vec(), "lmsst");
    }
    let nb = v.n_bins();
    let floor = REASSIGN_FLOOR * v.max_abs();
    let mut out = vec![Complex64::new(0.0, 0.0); v.data().len()];
    for (row_in, row_out) in v.frames().zip(out.chunks_mut(nb)) {
        let mags: Vec<f64> = row_in.iter().map(|z| z.norm()).collect();
        for (k, &z) in row_in.iter().enumerate() {
            if mags[k] < floor || floor == 0.0 {
                row_out[k] += z;
                continue;
            }
            let lo = k.saturating_sub(delta_bins);
            let hi = (k + delta_bins).min(nb - 1);
            let mut best = lo;
            for j in lo + 1..=hi {
                if mags[j] > mags[best] {
                    best = j;
                }
            }
            row_out[best] += z;
        }
    }
    v.with_data(out, "lmsst")
}

pub(crate) fn require_invertible(grid: &TfrGrid) -> Result<()> {
    if grid.is_invertible() {
        Ok(())
    } else {
        Err(Error::NonInvertibleGrid(grid.method().into()))
    }
}
