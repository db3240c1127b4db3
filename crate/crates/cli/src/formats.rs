//! Text and binary file formats: signals (CSV, WAV), IF trajectories, grids,
//! ridges, heatmaps and reports. All writers emit LF-terminated UTF-8 and are
//! deterministic byte streams.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use ridgesqueeze_core::metrics::MethodReport;
use ridgesqueeze_core::{Axis, Complex64, IfEstimate, ModeModel, PiecewiseLinear, Signal, TfrGrid};

use crate::error::{Error, Result};

/// Shortest text that parses back to the same value. `-0` prints as `0`.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let a = x.abs();
    if a.is_finite() && !(1e-5..1e16).contains(&a) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

pub fn fmt_cell(z: Complex64) -> String {
    let im = fmt_num(z.im);
    if im.starts_with('-') {
        format!("{}{}j", fmt_num(z.re), im)
    } else {
        format!("{}+{}j", fmt_num(z.re), im)
    }
}

pub fn parse_cell(s: &str) -> Option<Complex64> {
    let body = s.trim().strip_suffix('j')?;
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| matches!(bytes[i], b'+' | b'-') && !matches!(bytes[i - 1], b'e' | b'E'))?;
    let re = body[..split].parse().ok()?;
    let im = body[split..].trim_start_matches('+').parse().ok()?;
    Some(Complex64::new(re, im))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn header_value<'a>(line: &'a str, key: &str) -> Option<&'a str> {
    line.strip_prefix('#')?
        .trim_start()
        .strip_prefix(key)?
        .strip_prefix('=')
        .map(str::trim)
}

// ---- signals ----

/// Reads `.wav` files as 16-bit PCM, everything else as signal CSV.
pub fn read_signal(path: &Path) -> Result<Signal> {
    let is_wav = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("wav"));
    if is_wav {
        read_wav(path)
    } else {
        parse_signal_csv(&read_text(path)?, path)
    }
}

pub fn parse_signal_csv(text: &str, path: &Path) -> Result<Signal> {
    let mut fs = None;
    let mut t0 = 0.0;
    let mut samples = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('#') {
            if let Some(v) = header_value(line, "fs") {
                fs = Some(
                    v.parse::<f64>()
                        .map_err(|_| Error::parse(path, lineno, format!("bad sample rate `{v}`")))?,
                );
            } else if let Some(v) = header_value(line, "t0") {
                t0 = v
                    .parse()
                    .map_err(|_| Error::parse(path, lineno, format!("bad start time `{v}`")))?;
            }
            continue;
        }
        if fs.is_none() {
            return Err(Error::parse(path, lineno, "sample before the `# fs=` header"));
        }
        let mut fields = line.split(',').map(str::trim);
        let num = |s: Option<&str>| -> Result<f64> {
            let s = s.ok_or_else(|| Error::parse(path, lineno, "empty row"))?;
            s.parse()
                .map_err(|_| Error::parse(path, lineno, format!("bad number `{s}`")))
        };
        let re = num(fields.next())?;
        let im = match fields.next() {
            Some(s) => num(Some(s))?,
            None => 0.0,
        };
        if fields.next().is_some() {
            return Err(Error::parse(path, lineno, "expected `re` or `re,im`"));
        }
        samples.push(Complex64::new(re, im));
    }
    let fs = fs.ok_or_else(|| Error::parse(path, 1, "missing `# fs=` header"))?;
    Ok(Signal::new(samples, fs)?.with_start(t0))
}

pub fn signal_csv(sig: &Signal) -> String {
    let mut out = format!("# fs={}\n", fmt_num(sig.sample_rate_hz()));
    if sig.t0_s() != 0.0 {
        let _ = writeln!(out, "# t0={}", fmt_num(sig.t0_s()));
    }
    let real = sig.is_real();
    for z in sig.samples() {
        if real {
            let _ = writeln!(out, "{}", fmt_num(z.re));
        } else {
            let _ = writeln!(out, "{},{}", fmt_num(z.re), fmt_num(z.im));
        }
    }
    out
}

pub fn write_signal_csv(sig: &Signal, path: &Path) -> Result<()> {
    write_file(path, signal_csv(sig).as_bytes())
}

/// 16-bit signed PCM, mono only; sample `v` maps to `v / 32768`.
pub fn read_wav(path: &Path) -> Result<Signal> {
    let unsupported = |msg: String| Error::Unsupported {
        path: path.into(),
        msg,
    };
    let map = |e: hound::Error| match e {
        hound::Error::IoError(e) => Error::io(path, e),
        other => unsupported(other.to_string()),
    };
    let mut reader = hound::WavReader::open(path).map_err(map)?;
    let spec = reader.spec();
    if spec.channels != 1 {
        return Err(unsupported(format!("{} channels, only mono is read", spec.channels)));
    }
    if spec.sample_format != hound::SampleFormat::Int || spec.bits_per_sample != 16 {
        return Err(unsupported(format!(
            "{}-bit {:?} samples, only 16-bit PCM is read",
            spec.bits_per_sample, spec.sample_format
        )));
    }
    let samples = reader
        .samples::<i16>()
        .map(|s| s.map(|v| v as f64 / 32768.0))
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(map)?;
    Ok(Signal::from_real(&samples, spec.sample_rate as f64)?)
}

// ---- trajectories ----

/// `time_s,f1_hz,...` sampled at every signal instant.
pub fn trajectories_csv(model: &ModeModel, sig: &Signal) -> String {
    let mut out = String::from("time_s");
    for i in 1..=model.len() {
        let _ = write!(out, ",f{i}_hz");
    }
    out.push('\n');
    for n in 0..sig.len() {
        let t = sig.time_of(n);
        out.push_str(&fmt_num(t));
        for f in model.ifs_at(t) {
            out.push(',');
            out.push_str(&fmt_num(f));
        }
        out.push('\n');
    }
    out
}

pub fn write_trajectories_csv(model: &ModeModel, sig: &Signal, path: &Path) -> Result<()> {
    write_file(path, trajectories_csv(model, sig).as_bytes())
}

/// One piecewise-linear track per frequency column.
pub fn read_trajectories_csv(path: &Path) -> Result<Vec<PiecewiseLinear>> {
    let text = read_text(path)?;
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'));
    let (hline, header) = lines
        .next()
        .ok_or_else(|| Error::parse(path, 1, "empty trajectory file"))?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    if cols.len() < 2 || cols[0] != "time_s" {
        return Err(Error::parse(path, hline + 1, "expected header `time_s,f1_hz,...`"));
    }
    let mut times = Vec::new();
    let mut values = vec![Vec::new(); cols.len() - 1];
    for (i, line) in lines {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != cols.len() {
            return Err(Error::parse(
                path,
                i + 1,
                format!("{} fields, header has {}", fields.len(), cols.len()),
            ));
        }
        let nums = fields
            .iter()
            .map(|s| s.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::parse(path, i + 1, e.to_string()))?;
        times.push(nums[0]);
        for (col, v) in values.iter_mut().zip(&nums[1..]) {
            col.push(*v);
        }
    }
    values
        .into_iter()
        .map(|v| {
            PiecewiseLinear::new(times.clone(), v)
                .map_err(|e| Error::parse(path, hline + 1, e.to_string()))
        })
        .collect()
}

// ---- grids ----

pub const GRID_HEADER_LINES: usize = 8;

pub fn grid_csv(grid: &TfrGrid) -> String {
    let t = grid.times();
    let f = grid.freqs();
    let mut out = String::new();
    let _ = writeln!(out, "# method={}", grid.method());
    let _ = writeln!(out, "# fs={}", fmt_num(grid.source_fs_hz()));
    let _ = writeln!(out, "# nfft={}", grid.nfft());
    let _ = writeln!(out, "# rho={}", fmt_num(grid.rho()));
    let _ = writeln!(out, "# freq0={}", fmt_num(f.start()));
    let _ = writeln!(out, "# dfreq={}", fmt_num(f.step()));
    let _ = writeln!(out, "# t0={}", fmt_num(t.start()));
    let _ = writeln!(out, "# dt={}", fmt_num(t.step()));
    for row in grid.frames() {
        for (k, z) in row.iter().enumerate() {
            if k > 0 {
                out.push(',');
            }
            out.push_str(&fmt_cell(*z));
        }
        out.push('\n');
    }
    out
}

pub fn write_grid_csv(grid: &TfrGrid, path: &Path) -> Result<()> {
    write_file(path, grid_csv(grid).as_bytes())
}

pub fn read_grid_csv(path: &Path) -> Result<TfrGrid> {
    parse_grid_csv(&read_text(path)?, path)
}

pub fn parse_grid_csv(text: &str, path: &Path) -> Result<TfrGrid> {
    const KEYS: [&str; GRID_HEADER_LINES] =
        ["method", "fs", "nfft", "rho", "freq0", "dfreq", "t0", "dt"];
    let mut lines = text.lines();
    let mut header = Vec::with_capacity(KEYS.len());
    for (i, key) in KEYS.iter().enumerate() {
        let line = lines.next().unwrap_or("");
        let v = header_value(line, key)
            .ok_or_else(|| Error::parse(path, i + 1, format!("expected `# {key}=` header")))?;
        header.push(v);
    }
    let num = |i: usize| -> Result<f64> {
        header[i]
            .parse()
            .map_err(|_| Error::parse(path, i + 1, format!("bad value `{}`", header[i])))
    };
    let fs = num(1)?;
    let nfft: usize = header[2]
        .parse()
        .map_err(|_| Error::parse(path, 3, format!("bad value `{}`", header[2])))?;
    let (rho, freq0, dfreq, t0, dt) = (num(3)?, num(4)?, num(5)?, num(6)?, num(7)?);

    let mut data = Vec::new();
    let mut n_bins = None;
    let mut n_frames = 0;
    for (i, line) in lines.enumerate() {
        let lineno = GRID_HEADER_LINES + i + 1;
        if line.is_empty() {
            continue;
        }
        let before = data.len();
        for (k, cell) in line.split(',').enumerate() {
            let z = parse_cell(cell).ok_or_else(|| {
                Error::parse(path, lineno, format!("bad cell {} `{cell}`", k + 1))
            })?;
            data.push(z);
        }
        let count = data.len() - before;
        if *n_bins.get_or_insert(count) != count {
            return Err(Error::parse(path, lineno, "rows have different lengths"));
        }
        n_frames += 1;
    }
    let n_bins = n_bins.ok_or_else(|| Error::parse(path, GRID_HEADER_LINES + 1, "no grid rows"))?;
    let grid = TfrGrid::new(
        data,
        Axis::new(t0, dt, n_frames),
        Axis::new(freq0, dfreq, n_bins),
        rho,
        header[0],
        fs,
    )
    .map_err(|e| Error::parse(path, 1, e.to_string()))?;
    if grid.nfft() != nfft {
        return Err(Error::parse(path, 3, "nfft disagrees with fs / dfreq"));
    }
    Ok(grid)
}

// ---- ridges ----

pub fn ridges_csv(est: &IfEstimate) -> String {
    let mut out = String::from("frame,time_s,bin,freq_hz,basin_lo,basin_hi\n");
    for (n, fr) in est.frames.iter().enumerate() {
        let t = est.times.value(n);
        for (b, &k) in fr.ridges().iter().enumerate() {
            let _ = writeln!(
                out,
                "{n},{},{k},{},{},{}",
                fmt_num(t),
                fmt_num(est.freqs.value(k)),
                fr.edges()[b],
                fr.edges()[b + 1] - 1
            );
        }
    }
    out
}

pub fn write_ridges_csv(est: &IfEstimate, path: &Path) -> Result<()> {
    write_file(path, ridges_csv(est).as_bytes())
}

// ---- heatmaps ----

/// Number of bins drawn: those in `[0, fs/2)`.
fn displayed_bins(grid: &TfrGrid) -> usize {
    let f = grid.freqs();
    let nyquist = grid.source_fs_hz() / 2.0;
    (0..f.len())
        .take_while(|&k| f.value(k) < nyquist - 1e-9 * nyquist)
        .count()
}

/// Binary PGM (P5), one column per frame, highest frequency on the top row.
/// Levels are dB relative to the largest displayed magnitude, clipped at
/// `db_floor` and mapped linearly onto 0..=255.
pub fn heatmap_pgm(grid: &TfrGrid, db_floor: f64) -> Result<Vec<u8>> {
    if db_floor.is_nan() || db_floor >= 0.0 {
        return Err(Error::Config("heatmap floor must be negative dB".into()));
    }
    if grid.freqs().start() < 0.0 {
        return Err(Error::Config("heatmap needs a frequency axis starting at 0".into()));
    }
    let h = displayed_bins(grid);
    let w = grid.n_frames();
    let peak = grid
        .frames()
        .flat_map(|row| row[..h].iter())
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    if peak <= 0.0 {
        return Err(ridgesqueeze_core::Error::DegenerateGrid.into());
    }
    // energy grids already hold squared magnitudes
    let scale = if grid.is_invertible() { 20.0 } else { 10.0 };
    let mut out = format!("P5\n{w} {h}\n255\n").into_bytes();
    out.reserve(w * h);
    for k in (0..h).rev() {
        for n in 0..w {
            let m = grid.get(n, k).norm();
            let db = scale * (m / peak).log10();
            let level = if db <= db_floor {
                0.0
            } else {
                (255.0 * (1.0 - db / db_floor)).round()
            };
            out.push(level.clamp(0.0, 255.0) as u8);
        }
    }
    Ok(out)
}

pub fn write_heatmap_pgm(grid: &TfrGrid, db_floor: f64, path: &Path) -> Result<()> {
    write_file(path, &heatmap_pgm(grid, db_floor)?)
}

/// Decoded P5 image: `(width, height, pixels row-major from the top)`.
pub fn parse_pgm(bytes: &[u8]) -> Option<(usize, usize, Vec<u8>)> {
    let mut fields = Vec::new();
    let mut pos = 0;
    while fields.len() < 4 {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return None;
        }
        fields.push(std::str::from_utf8(&bytes[start..pos]).ok()?);
    }
    if fields[0] != "P5" || fields[3] != "255" {
        return None;
    }
    let w: usize = fields[1].parse().ok()?;
    let h: usize = fields[2].parse().ok()?;
    let pixels = bytes.get(pos + 1..)?;
    (pixels.len() == w * h).then(|| (w, h, pixels.to_vec()))
}

// ---- reports ----

pub fn reports_json(reports: &[MethodReport]) -> String {
    let mut s = serde_json::to_string_pretty(reports).expect("reports serialize");
    s.push('\n');
    s
}

pub fn write_report_json(reports: &[MethodReport], path: &Path) -> Result<()> {
    write_file(path, reports_json(reports).as_bytes())
}

pub fn parse_reports_json(text: &str) -> serde_json::Result<Vec<MethodReport>> {
    serde_json::from_str(text)
}
