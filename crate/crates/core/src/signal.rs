//! Sampled signals, ground-truth mode models, and the synthetic generators
//! used by the experiments.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use num_complex::Complex64;
use num_traits::Float;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::tfr::{Axis, TfrGrid};

/// Uniformly sampled complex time series.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    samples: Vec<Complex64>,
    sample_rate_hz: f64,
    t0_s: f64,
}

impl Signal {
    pub fn new(samples: Vec<Complex64>, sample_rate_hz: f64) -> Result<Self> {
        if !(sample_rate_hz > 0.0 && sample_rate_hz.is_finite()) {
            return Err(Error::invalid("sample rate must be positive and finite"));
        }
        if samples.is_empty() {
            return Err(Error::invalid("signal must contain at least one sample"));
        }
        if samples.iter().any(|s| !(s.re.is_finite() && s.im.is_finite())) {
            return Err(Error::invalid("signal samples must be finite"));
        }
        Ok(Signal {
            samples,
            sample_rate_hz,
            t0_s: 0.0,
        })
    }

    /// Promotes real samples to complex with zero imaginary part.
    pub fn from_real(samples: &[f64], sample_rate_hz: f64) -> Result<Self> {
        Self::new(
            samples.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
            sample_rate_hz,
        )
    }

    pub fn with_start(mut self, t0_s: f64) -> Self {
        self.t0_s = t0_s;
        self
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.sample_rate_hz
    }

    pub fn t0_s(&self) -> f64 {
        self.t0_s
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    /// Always false: a `Signal` holds at least one sample.
    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate_hz
    }

    pub fn time_of(&self, n: usize) -> f64 {
        self.t0_s + n as f64 / self.sample_rate_hz
    }

    /// True when every imaginary part is exactly zero.
    pub fn is_real(&self) -> bool {
        self.samples.iter().all(|s| s.im == 0.0)
    }

    pub fn power(&self) -> f64 {
        self.samples.iter().map(|s| s.norm_sqr()).sum::<f64>() / self.samples.len() as f64
    }

    /// `2 Re(x)`: the real mode whose positive-frequency half is `x`.
    pub fn real_from_analytic(&self) -> Signal {
        Signal {
            samples: self
                .samples
                .iter()
                .map(|s| Complex64::new(2.0 * s.re, 0.0))
                .collect(),
            sample_rate_hz: self.sample_rate_hz,
            t0_s: self.t0_s,
        }
    }
}

/// A time law such as an amplitude envelope, a phase, or an IF curve.
pub type Law = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// One AM-FM component `A(t) e^{j phi(t)}` with its instantaneous frequency
/// `phi'(t) / 2 pi` in Hz.
#[derive(Clone)]
pub struct Mode {
    pub amplitude: Law,
    pub phase: Law,
    pub inst_freq: Law,
}

impl Mode {
    pub fn new(
        amplitude: impl Fn(f64) -> f64 + Send + Sync + 'static,
        phase: impl Fn(f64) -> f64 + Send + Sync + 'static,
        inst_freq: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Mode {
            amplitude: Arc::new(amplitude),
            phase: Arc::new(phase),
            inst_freq: Arc::new(inst_freq),
        }
    }

    pub fn value_at(&self, t: f64) -> Complex64 {
        Complex64::from_polar((self.amplitude)(t), (self.phase)(t))
    }

    pub fn amplitude_at(&self, t: f64) -> f64 {
        (self.amplitude)(t)
    }

    pub fn phase_at(&self, t: f64) -> f64 {
        (self.phase)(t)
    }

    pub fn if_at(&self, t: f64) -> f64 {
        (self.inst_freq)(t)
    }
}

/// Ground truth for a multicomponent signal.
///
/// For complex generators the signal is `sum_k A_k e^{j phi_k}`. For real
/// generators it is `sum_k A_k cos(phi_k)`, i.e. the modes describe the
/// positive-frequency side.
#[derive(Clone)]
pub struct ModeModel {
    pub modes: Vec<Mode>,
    pub label: String,
}

impl fmt::Debug for ModeModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ModeModel")
            .field("label", &self.label)
            .field("modes", &self.modes.len())
            .finish()
    }
}

impl ModeModel {
    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    /// True IF of every mode at `t`, in Hz.
    pub fn ifs_at(&self, t: f64) -> Vec<f64> {
        self.modes.iter().map(|m| m.if_at(t)).collect()
    }

    /// Largest gap between each stated IF law and the central difference of
    /// its phase, over the given probe times.
    pub fn if_consistency(&self, probes: &[f64], h: f64) -> f64 {
        let mut worst = 0.0f64;
        for m in &self.modes {
            for &t in probes {
                let numeric = (m.phase_at(t + h) - m.phase_at(t - h)) / (4.0 * PI * h);
                worst = worst.max((m.if_at(t) - numeric).abs());
            }
        }
        worst
    }
}

fn sample_count(fs: f64, dur: f64) -> Result<usize> {
    if !(fs > 0.0 && fs.is_finite()) {
        return Err(Error::invalid("sample rate must be positive"));
    }
    if !(dur > 0.0 && dur.is_finite()) {
        return Err(Error::invalid("duration must be positive"));
    }
    let n = Float::round(fs * dur) as usize;
    if n == 0 {
        return Err(Error::invalid("duration shorter than one sample"));
    }
    Ok(n)
}

fn synthesize(model: &ModeModel, fs: f64, n: usize, real: bool) -> Result<Signal> {
    let samples = (0..n)
        .map(|i| {
            let t = i as f64 / fs;
            let z: Complex64 = model.modes.iter().map(|m| m.value_at(t)).sum();
            if real {
                Complex64::new(z.re, 0.0)
            } else {
                z
            }
        })
        .collect();
    Signal::new(samples, fs)
}

/// Two real FM modes sampled at 128 Hz for one second:
/// `sin(2 pi (40 t + sin(4 pi t))) + sin(2 pi (10 t + 10 (t - 0.5)^3))`.
pub fn gen_fmam() -> (Signal, ModeModel) {
    let fs = 128.0;
    // sin(x) = cos(x - pi/2)
    let m1 = Mode::new(
        |_| 1.0,
        |t| 2.0 * PI * (40.0 * t + Float::sin(4.0 * PI * t)) - PI / 2.0,
        |t| 40.0 + 4.0 * PI * Float::cos(4.0 * PI * t),
    );
    let m2 = Mode::new(
        |_| 1.0,
        |t| 2.0 * PI * (10.0 * t + 10.0 * Float::powi(t - 0.5, 3)) - PI / 2.0,
        |t| 10.0 + 30.0 * Float::powi(t - 0.5, 2),
    );
    let model = ModeModel {
        modes: vec![m1, m2],
        label: "fmam".into(),
    };
    let samples: Vec<Complex64> = (0..128)
        .map(|i| {
            let t = i as f64 / fs;
            let s1 = Float::sin(2.0 * PI * (40.0 * t + Float::sin(4.0 * PI * t)));
            let s2 = Float::sin(2.0 * PI * (10.0 * t + 10.0 * Float::powi(t - 0.5, 3)));
            Complex64::new(s1 + s2, 0.0)
        })
        .collect();
    let sig = Signal::new(samples, fs).expect("fmam generator is well-formed");
    (sig, model)
}

/// Three complex modes at 1024 Hz for one second whose IFs cross at 250 Hz
/// at t = 0.25 s and t = 0.75 s. Phases are `500 pi t` and
/// `500 pi t +/- 100 sin(2 pi t)` radians.
pub fn gen_crossover() -> (Signal, ModeModel) {
    let fs = 1024.0;
    let m1 = Mode::new(|_| 1.0, |t| 500.0 * PI * t, |_| 250.0);
    let m2 = Mode::new(
        |t| Float::exp(-0.5 * t),
        |t| 500.0 * PI * t + 100.0 * Float::sin(2.0 * PI * t),
        |t| 250.0 + 100.0 * Float::cos(2.0 * PI * t),
    );
    let m3 = Mode::new(
        |t| 0.8 * Float::exp(0.5 * t),
        |t| 500.0 * PI * t - 100.0 * Float::sin(2.0 * PI * t),
        |t| 250.0 - 100.0 * Float::cos(2.0 * PI * t),
    );
    let model = ModeModel {
        modes: vec![m1, m2, m3],
        label: "crossover".into(),
    };
    let sig = synthesize(&model, fs, 1024, false).expect("crossover generator is well-formed");
    (sig, model)
}

/// Unit-amplitude complex chirp with `IF(t) = f_start + (f_end - f_start) (t/dur)^power`.
pub fn gen_chirp_surrogate(
    f_start: f64,
    f_end: f64,
    power: f64,
    fs: f64,
    dur: f64,
) -> Result<(Signal, ModeModel)> {
    let n = sample_count(fs, dur)?;
    if !(f_start > 0.0 && f_start < f_end && f_end < fs / 2.0) {
        return Err(Error::invalid(
            "chirp requires 0 < f_start < f_end < fs/2",
        ));
    }
    if !(power >= 1.0 && power.is_finite()) {
        return Err(Error::invalid("chirp power must be >= 1"));
    }
    let span = f_end - f_start;
    let mode = Mode::new(
        |_| 1.0,
        move |t| 2.0 * PI * (f_start * t + span * dur / (power + 1.0) * Float::powf(t / dur, power + 1.0)),
        move |t| f_start + span * Float::powf(t / dur, power),
    );
    let model = ModeModel {
        modes: vec![mode],
        label: "chirp".into(),
    };
    let sig = synthesize(&model, fs, n, false)?;
    Ok((sig, model))
}

/// Complex exponential `e^{j 2 pi f0 t}`.
pub fn gen_tone(f0: f64, fs: f64, dur: f64) -> Result<(Signal, ModeModel)> {
    let n = sample_count(fs, dur)?;
    if !(f0 > 0.0 && f0 < fs / 2.0) {
        return Err(Error::invalid("tone frequency must satisfy 0 < f0 < fs/2"));
    }
    let mode = Mode::new(|_| 1.0, move |t| 2.0 * PI * f0 * t, move |_| f0);
    let model = ModeModel {
        modes: vec![mode],
        label: "tone".into(),
    };
    let samples = (0..n)
        .map(|i| Complex64::from_polar(1.0, 2.0 * PI * f0 * i as f64 / fs))
        .collect();
    Ok((Signal::new(samples, fs)?, model))
}

/// Adds white circular Gaussian noise at the requested SNR (dB). An infinite
/// SNR returns the signal unchanged. For real signals only the real part of
/// the noise is kept, scaled so the SNR still holds.
pub fn add_noise(sig: &Signal, snr_db: f64, seed: u64) -> Result<Signal> {
    if snr_db == f64::INFINITY {
        return Ok(sig.clone());
    }
    if !snr_db.is_finite() {
        return Err(Error::invalid("SNR must be finite or +infinity"));
    }
    let noise_power = sig.power() / Float::powf(10.0, snr_db / 10.0);
    let real = sig.is_real();
    let scale = if real {
        Float::sqrt(noise_power)
    } else {
        Float::sqrt(noise_power / 2.0)
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples = sig
        .samples()
        .iter()
        .map(|&s| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            let n = Complex64::new(re, im) * scale;
            if real {
                s + Complex64::new(n.re, 0.0)
            } else {
                s + n
            }
        })
        .collect();
    Ok(Signal::new(samples, sig.sample_rate_hz())?.with_start(sig.t0_s()))
}

/// Discrete ideal representation: each mode's `A e^{j phi}` placed at the
/// bin nearest its IF, summed where modes coincide.
pub fn ideal_tfr(model: &ModeModel, times: Axis, freqs: Axis) -> Result<TfrGrid> {
    let n_bins = freqs.len();
    let mut data = vec![Complex64::new(0.0, 0.0); times.len() * n_bins];
    for (n, row) in data.chunks_mut(n_bins).enumerate() {
        let t = times.value(n);
        for mode in &model.modes {
            let f = mode.if_at(t);
            let k = freqs
                .nearest(f)
                .ok_or(Error::IfOutOfRange { time_s: t, freq_hz: f })?;
            row[k] += mode.value_at(t);
        }
    }
    TfrGrid::new(data, times, freqs, 1.0, "ideal", 1.0 / times.step())
}
