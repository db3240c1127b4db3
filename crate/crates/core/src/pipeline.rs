//! One-call runners for every method plus the matching report.

use core::fmt;
use core::ops::Range;
use core::str::FromStr;

use alloc::format;

use crate::baselines::{default_lmsst_delta, lmsst_grid, reassignment, set, sst};
use crate::dft::Dft;
use crate::error::{Error, Result};
use crate::metrics::{
    framesum_max_dev, nonzero_fraction, recon_rel_l2, renyi_entropy, ridge_mae, MethodReport,
};
use crate::ridge::{filter_grid_with, inject_if, local_maxima, IfEstimate, MaxScope, Track};
use crate::signal::{ModeModel, Signal};
use crate::squeeze::{modular_reassign, reconstruct};
use crate::tfr::{stft, TfrGrid};
use crate::window::WindowSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Stft,
    Sst,
    Rm,
    Set,
    Lmsst,
    Proposed,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Stft,
        Method::Sst,
        Method::Rm,
        Method::Set,
        Method::Lmsst,
        Method::Proposed,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Method::Stft => "stft",
            Method::Sst => "sst",
            Method::Rm => "rm",
            Method::Set => "set",
            Method::Lmsst => "lmsst",
            Method::Proposed => "proposed",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.tag() == s)
            .ok_or_else(|| Error::invalid(format!("unknown method `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    /// Threshold of the magnitude filter applied before ridge detection.
    pub gamma: f64,
    pub scope: MaxScope,
    /// LMSST neighbourhood; `None` picks the window's -3 dB half width.
    pub delta_bins: Option<usize>,
    /// Rényi order used in reports.
    pub alpha: f64,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            gamma: 0.1,
            scope: MaxScope::Global,
            delta_bins: None,
            alpha: 3.0,
        }
    }
}

/// Where the squeezing ridges come from.
#[derive(Clone, Copy, Default)]
pub enum RidgeSource<'a> {
    #[default]
    LocalMaxima,
    Injected(&'a [&'a dyn Track]),
}

#[derive(Debug, Clone)]
pub struct MethodRun {
    pub method: Method,
    pub stft: TfrGrid,
    /// Grid the post-processing step consumed: the filtered STFT for the
    /// proposed method, the STFT otherwise.
    pub input: TfrGrid,
    pub output: TfrGrid,
    /// Ridges used for squeezing (proposed method only).
    pub ridges: Option<IfEstimate>,
}

pub fn run<D: Dft + ?Sized>(
    method: Method,
    sig: &Signal,
    w: &WindowSpec,
    dft: &D,
    params: &Params,
    source: RidgeSource<'_>,
) -> Result<MethodRun> {
    let v = stft(sig, w, dft)?;
    let mut input = None;
    let (output, ridges) = match method {
        Method::Stft => (v.clone(), None),
        Method::Sst => (sst(sig, w, dft)?, None),
        Method::Rm => (reassignment(sig, w, dft)?, None),
        Method::Set => (set(sig, w, dft)?, None),
        Method::Lmsst => {
            let delta = match params.delta_bins {
                Some(d) => d,
                None => default_lmsst_delta(w, dft.size())?,
            };
            (lmsst_grid(&v, delta), None)
        }
        Method::Proposed => {
            let filtered = if params.gamma > 0.0 {
                filter_grid_with(&v, params.gamma, params.scope)?
            } else {
                v.clone()
            };
            let est = match source {
                RidgeSource::LocalMaxima => local_maxima(&filtered),
                RidgeSource::Injected(tracks) => inject_if(&filtered, tracks)?,
            }
            .with_gamma(params.gamma);
            let out = modular_reassign(&filtered, &est)?;
            input = Some(filtered);
            (out, Some(est))
        }
    };
    Ok(MethodRun {
        method,
        input: input.unwrap_or_else(|| v.clone()),
        stft: v,
        output,
        ridges,
    })
}

/// Metrics of a run. `frames` restricts the ridge error to interior frames.
pub fn report(
    run: &MethodRun,
    sig: &Signal,
    model: Option<&ModeModel>,
    frames: Range<usize>,
    params: &Params,
) -> Result<MethodReport> {
    let recon = if run.output.is_invertible() {
        match recon_rel_l2(sig, &reconstruct(&run.output)?) {
            Ok(e) => Some(e),
            Err(Error::ZeroSignal) => None,
            Err(e) => return Err(e),
        }
    } else {
        None
    };
    let ridge = match model {
        Some(model) => {
            let est = match &run.ridges {
                Some(est) => est.clone(),
                None => local_maxima(&filter_grid_with(&run.output, params.gamma, params.scope)?),
            };
            ridge_mae(&est, model, frames).ok()
        }
        None => None,
    };
    Ok(MethodReport {
        method_tag: run.method.tag().into(),
        renyi_entropy_bits: renyi_entropy(&run.output, params.alpha)?,
        nonzero_fraction: nonzero_fraction(&run.output),
        recon_rel_l2: recon,
        ridge_mae_bins: ridge,
        framesum_max_dev: framesum_max_dev(&run.input, &run.output)?,
    })
}
