//! Command-line definitions and the four subcommands.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use ridgesqueeze_core::metrics::{interior_frames, recon_rel_l2, MethodReport};
use ridgesqueeze_core::pipeline::{report, run, Method, MethodRun, Params, RidgeSource};
use ridgesqueeze_core::signal::{add_noise, gen_chirp_surrogate, gen_crossover, gen_fmam, gen_tone};
use ridgesqueeze_core::squeeze::{mode_reconstruct, reconstruct};
use ridgesqueeze_core::window::{gaussian_window, DEFAULT_HALF_WIDTH_SIGMAS};
use ridgesqueeze_core::{MaxScope, ModeModel, PiecewiseLinear, Signal, Track, WindowSpec};

use crate::error::{Error, Result};
use crate::fft::RustFft;
use crate::formats;

pub const HEATMAP_FLOOR_DB: f64 = -60.0;

#[derive(Debug, Parser)]
#[command(name = "ridgesqueeze", version, about = "Squeeze STFT coefficients onto IF ridges")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a test signal and its true IF trajectories.
    Generate(GenerateArgs),
    /// Run one method and export grid, heatmap, report (and ridges).
    Analyze(AnalyzeArgs),
    /// Run several methods on one input and rank them by entropy.
    Compare(CompareArgs),
    /// Recover a signal, or single modes, from an exported grid.
    Reconstruct(ReconstructArgs),
}

#[derive(Debug, Clone, Args)]
pub struct GenParams {
    /// Tone frequency (Hz).
    #[arg(long, default_value_t = 32.0)]
    pub f0: f64,
    /// Sample rate for `tone` (default 128) and `chirp` (default 1024).
    #[arg(long)]
    pub fs: Option<f64>,
    /// Duration (s) for `tone` and `chirp`.
    #[arg(long, default_value_t = 1.0)]
    pub dur: f64,
    #[arg(long, default_value_t = 30.0)]
    pub f_start: f64,
    #[arg(long, default_value_t = 400.0)]
    pub f_end: f64,
    /// Chirp IF exponent.
    #[arg(long, default_value_t = 3.0)]
    pub power: f64,
}

#[derive(Debug, Clone, Args)]
pub struct NoiseArgs {
    /// Add white Gaussian noise at this SNR (dB).
    #[arg(long, allow_negative_numbers = true)]
    pub snr_db: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct SourceArgs {
    /// Generator (fmam, crossover, chirp, tone) or signal file (.csv, .wav).
    #[arg(long, default_value = "fmam")]
    pub input: String,
    #[command(flatten)]
    pub gen: GenParams,
    #[command(flatten)]
    pub noise: NoiseArgs,
}

#[derive(Debug, Clone, Args)]
pub struct AnalysisArgs {
    /// Gaussian window width (s); 0.05 below 1024 Hz, 0.02 otherwise.
    #[arg(long)]
    pub sigma: Option<f64>,
    /// DFT length; the next power of two covering fs and the window.
    #[arg(long)]
    pub nfft: Option<usize>,
    /// Magnitude filter threshold relative to the maximum.
    #[arg(long, default_value_t = 0.1)]
    pub gamma: f64,
    /// LMSST neighbourhood in bins.
    #[arg(long)]
    pub delta_bins: Option<usize>,
    /// Filter against each frame's maximum instead of the global one.
    #[arg(long)]
    pub per_frame_max: bool,
    /// Trajectory CSV whose tracks replace the detected ridges.
    #[arg(long)]
    pub if_from: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// fmam, crossover, chirp or tone.
    pub name: String,
    #[command(flatten)]
    pub gen: GenParams,
    #[command(flatten)]
    pub noise: NoiseArgs,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(long, default_value = "proposed")]
    pub method: Method,
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub analysis: AnalysisArgs,
    /// Also write the reconstructed signal.
    #[arg(long)]
    pub reconstruct: bool,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Methods to run (comma separated or repeated).
    #[arg(
        long = "method",
        value_delimiter = ',',
        default_value = "stft,sst,rm,set,lmsst,proposed"
    )]
    pub methods: Vec<Method>,
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub analysis: AnalysisArgs,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ReconstructArgs {
    /// Grid CSV written by `analyze`.
    #[arg(long)]
    pub grid: PathBuf,
    /// Signal to measure the relative L2 error against.
    #[arg(long)]
    pub reference: Option<PathBuf>,
    /// Trajectory CSV; one mode file is written per column.
    #[arg(long, requires = "gamma_band")]
    pub mode_track: Option<PathBuf>,
    /// Half width (Hz) of the band kept around each track.
    #[arg(long)]
    pub gamma_band: Option<f64>,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

pub fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate(a) => cmd_generate(&a),
        Command::Analyze(a) => cmd_analyze(&a),
        Command::Compare(a) => cmd_compare(&a),
        Command::Reconstruct(a) => cmd_reconstruct(&a),
    }
}

const GENERATORS: [&str; 4] = ["fmam", "crossover", "chirp", "tone"];

fn generate(name: &str, p: &GenParams) -> Result<(Signal, ModeModel)> {
    Ok(match name {
        "fmam" => gen_fmam(),
        "crossover" => gen_crossover(),
        "chirp" => gen_chirp_surrogate(p.f_start, p.f_end, p.power, p.fs.unwrap_or(1024.0), p.dur)?,
        "tone" => gen_tone(p.f0, p.fs.unwrap_or(128.0), p.dur)?,
        other => {
            return Err(Error::Config(format!(
                "unknown generator `{other}` (expected one of {})",
                GENERATORS.join(", ")
            )))
        }
    })
}

fn with_noise(sig: Signal, noise: &NoiseArgs) -> Result<Signal> {
    match noise.snr_db {
        Some(snr) => Ok(add_noise(&sig, snr, noise.seed)?),
        None => Ok(sig),
    }
}

/// Signal to analyze plus its mode model when it came from a generator.
pub fn load_source(src: &SourceArgs) -> Result<(Signal, Option<ModeModel>)> {
    let (sig, model) = if GENERATORS.contains(&src.input.as_str()) {
        let (s, m) = generate(&src.input, &src.gen)?;
        (s, Some(m))
    } else {
        let path = Path::new(&src.input);
        if !path.exists() && path.extension().is_none() {
            return Err(Error::Config(format!(
                "`{}` is neither a generator ({}) nor an existing file",
                src.input,
                GENERATORS.join(", ")
            )));
        }
        (formats::read_signal(path)?, None)
    };
    Ok((with_noise(sig, &src.noise)?, model))
}

pub struct Analysis {
    pub window: WindowSpec,
    pub dft: RustFft,
    pub params: Params,
    pub tracks: Option<Vec<PiecewiseLinear>>,
}

impl Analysis {
    pub fn new(args: &AnalysisArgs, fs: f64) -> Result<Self> {
        let sigma = args
            .sigma
            .unwrap_or(if fs >= 1024.0 { 0.02 } else { 0.05 });
        let window = gaussian_window(sigma, fs, DEFAULT_HALF_WIDTH_SIGMAS)?;
        let nfft = args.nfft.unwrap_or_else(|| {
            (fs.round() as usize).max(window.len()).next_power_of_two()
        });
        if !(0.0..1.0).contains(&args.gamma) {
            return Err(Error::Config(format!("gamma {} must lie in [0, 1)", args.gamma)));
        }
        let tracks = match &args.if_from {
            Some(path) => Some(formats::read_trajectories_csv(path)?),
            None => None,
        };
        Ok(Analysis {
            window,
            dft: RustFft::new(nfft),
            params: Params {
                gamma: args.gamma,
                scope: if args.per_frame_max {
                    MaxScope::PerFrame
                } else {
                    MaxScope::Global
                },
                delta_bins: args.delta_bins,
                ..Params::default()
            },
            tracks,
        })
    }

    pub fn run(&self, method: Method, sig: &Signal) -> Result<MethodRun> {
        let refs: Vec<&dyn Track> = match &self.tracks {
            Some(t) => t.iter().map(|p| p as &dyn Track).collect(),
            None => Vec::new(),
        };
        let source = if self.tracks.is_some() {
            RidgeSource::Injected(&refs)
        } else {
            RidgeSource::LocalMaxima
        };
        Ok(run(method, sig, &self.window, &self.dft, &self.params, source)?)
    }

    pub fn report(&self, r: &MethodRun, sig: &Signal, model: Option<&ModeModel>) -> Result<MethodReport> {
        let frames = interior_frames(sig.len(), &self.window);
        Ok(report(r, sig, model, frames, &self.params)?)
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

pub fn cmd_generate(a: &GenerateArgs) -> Result<()> {
    let (sig, model) = generate(&a.name, &a.gen)?;
    let sig = with_noise(sig, &a.noise)?;
    create_dir(&a.out)?;
    let sig_path = a.out.join("signal.csv");
    let traj_path = a.out.join("trajectories.csv");
    formats::write_signal_csv(&sig, &sig_path)?;
    formats::write_trajectories_csv(&model, &sig, &traj_path)?;
    println!("{}", sig_path.display());
    println!("{}", traj_path.display());
    Ok(())
}

pub fn cmd_analyze(a: &AnalyzeArgs) -> Result<()> {
    let (sig, model) = load_source(&a.source)?;
    let analysis = Analysis::new(&a.analysis, sig.sample_rate_hz())?;
    let r = analysis.run(a.method, &sig)?;
    let recovered = if a.reconstruct {
        Some(reconstruct(&r.output)?)
    } else {
        None
    };
    let rep = analysis.report(&r, &sig, model.as_ref())?;

    create_dir(&a.out)?;
    let tag = a.method.tag();
    let mut written = vec![
        a.out.join(format!("grid_{tag}.csv")),
        a.out.join(format!("heatmap_{tag}.pgm")),
        a.out.join(format!("report_{tag}.json")),
    ];
    formats::write_grid_csv(&r.output, &written[0])?;
    formats::write_heatmap_pgm(&r.output, HEATMAP_FLOOR_DB, &written[1])?;
    formats::write_report_json(std::slice::from_ref(&rep), &written[2])?;
    if let Some(est) = &r.ridges {
        let p = a.out.join("ridges.csv");
        formats::write_ridges_csv(est, &p)?;
        written.push(p);
    }
    if let Some(rec) = recovered {
        let p = a.out.join(format!("recovered_{tag}.csv"));
        formats::write_signal_csv(&rec, &p)?;
        written.push(p);
        println!("recon_rel_l2={}", formats::fmt_num(recon_rel_l2(&sig, &rec)?));
    }
    for p in written {
        println!("{}", p.display());
    }
    Ok(())
}

/// Reports ordered by entropy, ties in method order.
pub fn compare_reports(
    methods: &[Method],
    sig: &Signal,
    model: Option<&ModeModel>,
    analysis: &Analysis,
) -> Result<Vec<(Method, MethodRun, MethodReport)>> {
    let mut rows = Vec::with_capacity(methods.len());
    for &m in methods {
        let r = analysis.run(m, sig)?;
        let rep = analysis.report(&r, sig, model)?;
        rows.push((m, r, rep));
    }
    rows.sort_by(|a, b| a.2.renyi_entropy_bits.total_cmp(&b.2.renyi_entropy_bits));
    Ok(rows)
}

pub fn cmd_compare(a: &CompareArgs) -> Result<()> {
    let mut methods = a.methods.clone();
    methods.sort_by_key(|m| Method::ALL.iter().position(|x| x == m));
    methods.dedup();
    if methods.len() < 2 {
        return Err(Error::Config("compare needs at least two distinct methods".into()));
    }
    let (sig, model) = load_source(&a.source)?;
    let analysis = Analysis::new(&a.analysis, sig.sample_rate_hz())?;
    let rows = compare_reports(&methods, &sig, model.as_ref(), &analysis)?;

    create_dir(&a.out)?;
    for (m, r, _) in &rows {
        let p = a.out.join(format!("heatmap_{}.pgm", m.tag()));
        formats::write_heatmap_pgm(&r.output, HEATMAP_FLOOR_DB, &p)?;
    }
    let reports: Vec<MethodReport> = rows.into_iter().map(|(_, _, rep)| rep).collect();
    let p = a.out.join("report.json");
    formats::write_report_json(&reports, &p)?;
    for rep in &reports {
        println!("{:<9} {:.4} bits", rep.method_tag, rep.renyi_entropy_bits);
    }
    println!("{}", p.display());
    Ok(())
}

pub fn cmd_reconstruct(a: &ReconstructArgs) -> Result<()> {
    let grid = formats::read_grid_csv(&a.grid)?;
    create_dir(&a.out)?;
    if let Some(track_path) = &a.mode_track {
        let band = a.gamma_band.unwrap_or_default();
        let tracks = formats::read_trajectories_csv(track_path)?;
        for (i, track) in tracks.iter().enumerate() {
            let mode = mode_reconstruct(&grid, track, band)?;
            let p = a.out.join(format!("mode_{}.csv", i + 1));
            formats::write_signal_csv(&mode, &p)?;
            println!("{}", p.display());
        }
        return Ok(());
    }
    let rec = reconstruct(&grid)?;
    let p = a.out.join("recovered.csv");
    formats::write_signal_csv(&rec, &p)?;
    if let Some(reference) = &a.reference {
        let reference = formats::read_signal(reference)?;
        println!("recon_rel_l2={}", formats::fmt_num(recon_rel_l2(&reference, &rec)?));
    }
    println!("{}", p.display());
    Ok(())
}
