//! Ridge squeezing: every coefficient of a frame is added onto the ridge of
//! its basin, which keeps the frame's complex sum and therefore the signal.

use alloc::vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::ridge::{IfEstimate, Track};
use crate::signal::Signal;
use crate::tfr::TfrGrid;

/// Squeezes `grid` onto the ridges of `ifest`. Works on any grid that
/// carries its own reconstruction factor; axes and `rho` are copied.
pub fn modular_reassign(grid: &TfrGrid, ifest: &IfEstimate) -> Result<TfrGrid> {
    if ifest.n_frames() != grid.n_frames() {
        return Err(Error::shape("ridge estimate and grid have different frame counts"));
    }
    let nb = grid.n_bins();
    let mut out = vec![Complex64::new(0.0, 0.0); grid.data().len()];
    for ((row_in, row_out), ridges) in grid
        .frames()
        .zip(out.chunks_mut(nb))
        .zip(&ifest.frames)
    {
        if ridges.n_bins() != nb {
            return Err(Error::shape("ridge estimate and grid have different bin counts"));
        }
        if ridges.is_empty() {
            row_out.copy_from_slice(row_in);
            continue;
        }
        for (basin, edge) in ridges.edges().windows(2).enumerate() {
            let sum: Complex64 = row_in[edge[0]..edge[1]].iter().sum();
            row_out[ridges.ridges()[basin]] += sum;
        }
    }
    Ok(grid.with_data(out, "proposed"))
}

/// `s[n] = rho * sum_xi T[n, xi]`.
pub fn reconstruct(tgrid: &TfrGrid) -> Result<Signal> {
    tgrid.marginal(|_, _| true)
}

/// Recovers one mode by summing, per frame, only the bins within
/// `half_width_hz` of `ridge_track(t)`. For a real input signal the real mode
/// is `2 Re` of the result (see [`Signal::real_from_analytic`]).
pub fn mode_reconstruct(tgrid: &TfrGrid, ridge_track: &dyn Track, half_width_hz: f64) -> Result<Signal> {
    if half_width_hz.is_nan() || half_width_hz <= 0.0 {
        return Err(Error::invalid("band half width must be positive"));
    }
    crate::baselines::require_invertible(tgrid)?;
    let times = tgrid.times();
    let freqs = tgrid.freqs();
    let centres: alloc::vec::Vec<f64> = (0..tgrid.n_frames())
        .map(|n| {
            let t = times.value(n);
            let f = ridge_track.freq_at(t);
            freqs
                .nearest(f)
                .map(|_| f)
                .ok_or(Error::IfOutOfRange { time_s: t, freq_hz: f })
        })
        .collect::<Result<_>>()?;
    tgrid.marginal(|n, k| (freqs.value(k) - centres[n]).abs() <= half_width_hz)
}
