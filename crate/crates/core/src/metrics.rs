//! Concentration, fidelity and conservation measures.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::ops::Range;

use num_traits::Float;

use crate::error::{Error, Result};
use crate::ridge::IfEstimate;
use crate::signal::{ModeModel, Signal};
use crate::tfr::TfrGrid;
use crate::window::WindowSpec;

/// Metrics for one method run. Missing values mean "not applicable".
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MethodReport {
    pub method_tag: String,
    pub renyi_entropy_bits: f64,
    pub nonzero_fraction: f64,
    pub recon_rel_l2: Option<f64>,
    pub ridge_mae_bins: Option<f64>,
    pub framesum_max_dev: f64,
}

/// Rényi entropy (bits) of the energy distribution `|G|^2 / sum |G|^2`.
pub fn renyi_entropy(grid: &TfrGrid, alpha: f64) -> Result<f64> {
    if !alpha.is_finite() || alpha <= 0.0 || alpha == 1.0 {
        return Err(Error::invalid("alpha must be positive and different from 1"));
    }
    let total: f64 = grid.data().iter().map(|z| z.norm_sqr()).sum();
    if total == 0.0 {
        return Err(Error::DegenerateGrid);
    }
    let moment: f64 = grid
        .data()
        .iter()
        .map(|z| z.norm_sqr() / total)
        .filter(|&p| p > 0.0)
        .map(|p| Float::powf(p, alpha))
        .sum();
    Ok(Float::log2(moment) / (1.0 - alpha))
}

/// Frames at least one window half-length away from both signal ends.
pub fn interior_frames(n_frames: usize, w: &WindowSpec) -> Range<usize> {
    let m = w.half_len();
    if n_frames <= 2 * m {
        0..0
    } else {
        m..n_frames - m
    }
}

/// Mean absolute distance in bins between estimated ridges and the true IFs,
/// over the frames of `frames` whose ridge count equals the number of modes.
///
/// True IFs always lie in `(0, fs/2)`, so on a full-circle grid only ridges
/// below `fs/2` are considered. Estimates and truths are paired in sorted
/// order, which is the minimum-cost nearest-frequency matching on a line.
pub fn ridge_mae(ifest: &IfEstimate, model: &ModeModel, frames: Range<usize>) -> Result<f64> {
    if model.is_empty() {
        return Err(Error::NoGroundTruth("mode model has no modes".into()));
    }
    let freqs = ifest.freqs;
    let nyquist_bin = {
        let span = freqs.step() * freqs.len() as f64;
        // the frequency axis of a full circle spans the sample rate
        let fs = 1.0 / ifest.times.step();
        if freqs.start() == 0.0 && Float::abs(span - fs) <= 1e-9 * fs {
            freqs.len() / 2
        } else {
            freqs.len()
        }
    };
    let k = model.len();
    let mut total = 0.0;
    let mut count = 0usize;
    for n in frames {
        if n >= ifest.n_frames() {
            break;
        }
        let est: Vec<usize> = ifest.frames[n]
            .ridges()
            .iter()
            .copied()
            .filter(|&b| b < nyquist_bin)
            .collect();
        if est.len() != k {
            continue;
        }
        let t = ifest.times.value(n);
        let mut truth: Vec<f64> = model
            .ifs_at(t)
            .into_iter()
            .map(|f| freqs.position(f))
            .collect();
        truth.sort_by(|a, b| a.total_cmp(b));
        for (e, tr) in est.iter().zip(&truth) {
            total += Float::abs(*e as f64 - tr);
        }
        count += k;
    }
    if count == 0 {
        return Err(Error::NoGroundTruth(format!(
            "no frame carries exactly {k} ridges"
        )));
    }
    Ok(total / count as f64)
}

/// `||original - recovered|| / ||original||`.
pub fn recon_rel_l2(original: &Signal, recovered: &Signal) -> Result<f64> {
    if original.len() != recovered.len() {
        return Err(Error::shape("signals have different lengths"));
    }
    if original.sample_rate_hz() != recovered.sample_rate_hz() {
        return Err(Error::shape("signals have different sample rates"));
    }
    let den: f64 = original.samples().iter().map(|z| z.norm_sqr()).sum();
    if den == 0.0 {
        return Err(Error::ZeroSignal);
    }
    let num: f64 = original
        .samples()
        .iter()
        .zip(recovered.samples())
        .map(|(a, b)| (a - b).norm_sqr())
        .sum();
    Ok(Float::sqrt(num / den))
}

/// Largest per-frame change of the complex frame sum, relative to the
/// largest input frame sum.
pub fn framesum_max_dev(g_in: &TfrGrid, g_out: &TfrGrid) -> Result<f64> {
    if g_in.n_frames() != g_out.n_frames() {
        return Err(Error::shape("grids have different frame counts"));
    }
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for n in 0..g_in.n_frames() {
        let a = g_in.frame_sum(n);
        let b = g_out.frame_sum(n);
        worst = worst.max((b - a).norm());
        scale = scale.max(a.norm());
    }
    Ok(worst / (scale + f64::MIN_POSITIVE))
}

/// Fraction of nonzero cells.
pub fn nonzero_fraction(grid: &TfrGrid) -> f64 {
    grid.nonzero_count() as f64 / grid.data().len() as f64
}
