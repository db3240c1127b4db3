//! Ridge (instantaneous frequency) estimation: magnitude thresholding,
//! per-frame local maxima, externally supplied trajectories, and the basin
//! partition that maps every bin to one ridge.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tfr::{Axis, TfrGrid};

/// Ridges of one frame and the basins that partition its bins.
///
/// `edges` starts at 0, ends at `n_bins` and is strictly increasing; basin
/// `i` is `edges[i]..edges[i + 1]` and holds `ridges[i]`. A frame without
/// ridges has the single basin `[0, n_bins)` and is left untouched by
/// squeezing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameRidges {
    ridges: Vec<usize>,
    edges: Vec<usize>,
}

impl FrameRidges {
    pub fn empty(n_bins: usize) -> Self {
        FrameRidges {
            ridges: Vec::new(),
            edges: vec![0, n_bins],
        }
    }

    /// Builds a frame from sorted ridges and the first bin of every basin
    /// after the first.
    pub fn new(ridges: Vec<usize>, inner_edges: &[usize], n_bins: usize) -> Result<Self> {
        if ridges.is_empty() {
            return Ok(Self::empty(n_bins));
        }
        if inner_edges.len() + 1 != ridges.len() {
            return Err(Error::shape("need exactly one basin per ridge"));
        }
        let mut edges = Vec::with_capacity(ridges.len() + 1);
        edges.push(0);
        edges.extend_from_slice(inner_edges);
        edges.push(n_bins);
        let ok = edges.windows(2).all(|e| e[0] < e[1])
            && ridges
                .iter()
                .enumerate()
                .all(|(i, &r)| edges[i] <= r && r < edges[i + 1]);
        if !ok {
            return Err(Error::invalid("ridges and basin edges are inconsistent"));
        }
        Ok(FrameRidges { ridges, edges })
    }

    pub fn ridges(&self) -> &[usize] {
        &self.ridges
    }

    pub fn edges(&self) -> &[usize] {
        &self.edges
    }

    pub fn is_empty(&self) -> bool {
        self.ridges.is_empty()
    }

    pub fn n_bins(&self) -> usize {
        *self.edges.last().expect("edges are never empty")
    }

    /// Index of the basin holding bin `k`.
    pub fn basin_of(&self, k: usize) -> usize {
        self.edges[1..].partition_point(|&e| e <= k)
    }

    /// The ridge bin that bin `k` is squeezed onto; `k` itself in an empty
    /// frame.
    pub fn ridge_of(&self, k: usize) -> usize {
        if self.ridges.is_empty() {
            k
        } else {
            self.ridges[self.basin_of(k)]
        }
    }
}

/// Per-frame ridge sets over a grid's axes.
#[derive(Debug, Clone, PartialEq)]
pub struct IfEstimate {
    pub frames: Vec<FrameRidges>,
    pub gamma_used: f64,
    pub times: Axis,
    pub freqs: Axis,
}

impl IfEstimate {
    pub fn n_frames(&self) -> usize {
        self.frames.len()
    }

    /// Ridge frequencies (Hz) of frame `n`.
    pub fn ridge_freqs(&self, n: usize) -> Vec<f64> {
        self.frames[n]
            .ridges()
            .iter()
            .map(|&k| self.freqs.value(k))
            .collect()
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma_used = gamma;
        self
    }
}

/// Which maximum the threshold of [`filter_grid`] is relative to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MaxScope {
    /// Maximum over the whole time-frequency plane.
    #[default]
    Global,
    /// Maximum of each frame separately.
    PerFrame,
}

/// Zeroes every cell with `|G| <= gamma * max |G|` (global maximum).
pub fn filter_grid(grid: &TfrGrid, gamma: f64) -> Result<TfrGrid> {
    filter_grid_with(grid, gamma, MaxScope::Global)
}

pub fn filter_grid_with(grid: &TfrGrid, gamma: f64, scope: MaxScope) -> Result<TfrGrid> {
    if !(0.0..1.0).contains(&gamma) {
        return Err(Error::invalid(format!("gamma {gamma} outside [0, 1)")));
    }
    let global = grid.max_abs();
    let zero = Complex64::new(0.0, 0.0);
    let mut data = Vec::with_capacity(grid.data().len());
    for row in grid.frames() {
        let max = match scope {
            MaxScope::Global => global,
            MaxScope::PerFrame => row.iter().map(|z| z.norm()).fold(0.0, f64::max),
        };
        let threshold = gamma * max;
        data.extend(row.iter().map(|&z| if z.norm() > threshold { z } else { zero }));
    }
    let mut method = alloc::string::String::from(grid.method());
    method.push_str("+filtered");
    TfrGrid::new(
        data,
        grid.times(),
        grid.freqs(),
        grid.rho(),
        method,
        grid.source_fs_hz(),
    )
}

/// Maxima below this fraction of the grid maximum are rounding noise, not
/// ridges.
pub const RIDGE_FLOOR: f64 = 1e-8;

fn frame_maxima(mags: &[f64], floor: f64) -> FrameRidges {
    let nb = mags.len();
    let ridges: Vec<usize> = (1..nb.saturating_sub(1))
        .filter(|&k| mags[k] >= floor && mags[k] > mags[k - 1] && mags[k] > mags[k + 1])
        .collect();
    // watershed: lowest-magnitude bin strictly between neighbours, first on ties
    let inner: Vec<usize> = ridges
        .windows(2)
        .map(|pair| {
            let mut best = pair[0] + 1;
            for k in pair[0] + 2..pair[1] {
                if mags[k] < mags[best] {
                    best = k;
                }
            }
            best
        })
        .collect();
    FrameRidges::new(ridges, &inner, nb).expect("watershed edges separate strict maxima")
}

/// Strict per-frame local maxima of `|G|` with watershed basins. Edge bins
/// never qualify, plateaus produce no ridge, and maxima under
/// [`RIDGE_FLOOR`] times the grid maximum are ignored.
pub fn local_maxima(grid: &TfrGrid) -> IfEstimate {
    let floor = RIDGE_FLOOR * grid.max_abs();
    let frames = grid
        .frames()
        .map(|row| {
            let mags: Vec<f64> = row.iter().map(|z| z.norm()).collect();
            frame_maxima(&mags, floor)
        })
        .collect();
    IfEstimate {
        frames,
        gamma_used: 0.0,
        times: grid.times(),
        freqs: grid.freqs(),
    }
}

/// γ-filter followed by local maxima; returns the filtered grid as well.
pub fn estimate_ridges(grid: &TfrGrid, gamma: f64, scope: MaxScope) -> Result<(TfrGrid, IfEstimate)> {
    let filtered = filter_grid_with(grid, gamma, scope)?;
    let est = local_maxima(&filtered).with_gamma(gamma);
    Ok((filtered, est))
}

/// A frequency trajectory `t -> Hz`.
pub trait Track {
    fn freq_at(&self, t: f64) -> f64;
}

impl<F: Fn(f64) -> f64> Track for F {
    fn freq_at(&self, t: f64) -> f64 {
        self(t)
    }
}

/// Piecewise-linear trajectory through `(time, freq)` knots, held constant
/// outside the knot range.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinear {
    times: Vec<f64>,
    values: Vec<f64>,
}

impl PiecewiseLinear {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.is_empty() || times.len() != values.len() {
            return Err(Error::shape("trajectory needs equally many times and values"));
        }
        if !times.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::invalid("trajectory times must be strictly increasing"));
        }
        Ok(PiecewiseLinear { times, values })
    }
}

impl Track for PiecewiseLinear {
    fn freq_at(&self, t: f64) -> f64 {
        let last = self.times.len() - 1;
        if t <= self.times[0] {
            return self.values[0];
        }
        if t >= self.times[last] {
            return self.values[last];
        }
        let i = self.times.partition_point(|&x| x <= t) - 1;
        let a = (t - self.times[i]) / (self.times[i + 1] - self.times[i]);
        self.values[i] + a * (self.values[i + 1] - self.values[i])
    }
}

/// Ridges taken from externally supplied trajectories: the nearest bin of
/// each trajectory per frame, duplicates merged, basins split at midpoints
/// (an equidistant bin starts the upper basin).
pub fn inject_if(grid: &TfrGrid, tracks: &[&dyn Track]) -> Result<IfEstimate> {
    let times = grid.times();
    let freqs = grid.freqs();
    let nb = grid.n_bins();
    let mut frames = Vec::with_capacity(grid.n_frames());
    for n in 0..grid.n_frames() {
        let t = times.value(n);
        let mut ridges = Vec::with_capacity(tracks.len());
        for track in tracks {
            let f = track.freq_at(t);
            let k = freqs
                .nearest(f)
                .ok_or(Error::IfOutOfRange { time_s: t, freq_hz: f })?;
            ridges.push(k);
        }
        ridges.sort_unstable();
        ridges.dedup();
        let inner: Vec<usize> = ridges.windows(2).map(|p| (p[0] + p[1]).div_ceil(2)).collect();
        frames.push(FrameRidges::new(ridges, &inner, nb)?);
    }
    Ok(IfEstimate {
        frames,
        gamma_used: 0.0,
        times,
        freqs,
    })
}
