use std::path::Path;
use std::process::{Command, Output};

use ridgesqueeze::formats::{parse_pgm, parse_reports_json, read_grid_csv, read_signal};

fn bin(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ridgesqueeze"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn generate_writes_signal_and_trajectories() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(&["generate", "fmam"], dir.path());
    assert!(o.status.success());
    let text = std::fs::read_to_string(dir.path().join("signal.csv")).unwrap();
    assert!(text.starts_with("# fs=128\n"));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 128);

    let o = bin(&["generate", "crossover"], dir.path());
    assert!(o.status.success());
    let traj = std::fs::read_to_string(dir.path().join("trajectories.csv")).unwrap();
    assert_eq!(traj.lines().next().unwrap(), "time_s,f1_hz,f2_hz,f3_hz");

    let o = bin(&["generate", "tone", "--f0", "600", "--fs", "1000"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let o = bin(&["generate", "wavelet"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn analyze_proposed_on_fmam() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(&["analyze", "--method", "proposed", "--input", "fmam"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let files = ["grid_proposed.csv", "heatmap_proposed.pgm", "report_proposed.json", "ridges.csv"];
    for f in files {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), files.len());
    let reps = parse_reports_json(&std::fs::read_to_string(dir.path().join("report_proposed.json")).unwrap()).unwrap();
    assert_eq!(reps.len(), 1);
    assert!(reps[0].framesum_max_dev <= 1e-12);
    assert!(reps[0].ridge_mae_bins.unwrap() <= 1.0);
}

#[test]
fn analyze_rejects_bad_configuration() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(&["analyze", "--method", "wavelet"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
    let o = bin(&["analyze", "--gamma", "1.5"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let o = bin(&["analyze", "--input", "nowhere.csv"], dir.path());
    assert_eq!(o.status.code(), Some(3));
    let o = bin(&["analyze", "--method", "rm", "--reconstruct"], dir.path());
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).contains("non-invertible"));
}

#[test]
fn analyze_stft_tone_heatmap() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(&["analyze", "--method", "stft", "--input", "tone", "--f0", "24"], dir.path());
    assert!(o.status.success());
    let (w, h, px) = parse_pgm(&std::fs::read(dir.path().join("heatmap_stft.pgm")).unwrap()).unwrap();
    assert_eq!((w, h), (128, 64));
    let row_sum = |r: usize| px[r * w..(r + 1) * w].iter().map(|&p| p as u32).sum::<u32>();
    let brightest = (0..h).max_by_key(|&r| row_sum(r)).unwrap();
    assert_eq!(h - 1 - brightest, 24);
}

#[test]
fn compare_ranks_all_methods() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(&["compare", "--input", "fmam"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let reps = parse_reports_json(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(reps.len(), 6);
    assert!(reps.windows(2).all(|p| p[0].renyi_entropy_bits <= p[1].renyi_entropy_bits));
    let rm = reps.iter().find(|r| r.method_tag == "rm").unwrap();
    assert_eq!(rm.recon_rel_l2, None);
    for m in ["stft", "sst", "rm", "set", "lmsst", "proposed"] {
        assert!(dir.path().join(format!("heatmap_{m}.pgm")).exists());
    }

    let o = bin(&["compare", "--method", "sst"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn reconstruct_round_trip_and_modes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert!(bin(&["generate", "fmam"], d).status.success());
    let o = bin(&["analyze", "--method", "proposed", "--gamma", "0"], d);
    assert!(o.status.success());
    let grid = d.join("grid_proposed.csv");
    let reference = d.join("signal.csv");
    let o = bin(
        &["reconstruct", "--grid", grid.to_str().unwrap(), "--reference", reference.to_str().unwrap()],
        d,
    );
    assert!(o.status.success());
    let err: f64 = stdout(&o)
        .lines()
        .find_map(|l| l.strip_prefix("recon_rel_l2="))
        .unwrap()
        .parse()
        .unwrap();
    assert!(err <= 1e-10, "{err}");
    assert_eq!(read_signal(&d.join("recovered.csv")).unwrap().len(), 128);

    let traj = d.join("trajectories.csv");
    let o = bin(
        &["reconstruct", "--grid", grid.to_str().unwrap(), "--mode-track", traj.to_str().unwrap(), "--gamma-band", "3"],
        d,
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for i in 1..=2 {
        assert_eq!(read_signal(&d.join(format!("mode_{i}.csv"))).unwrap().len(), 128);
    }
}

#[test]
fn reconstruct_error_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert!(bin(&["analyze", "--method", "rm"], d).status.success());
    let rm = d.join("grid_rm.csv");
    assert!(read_grid_csv(&rm).unwrap().rho().is_nan());
    let o = bin(&["reconstruct", "--grid", rm.to_str().unwrap()], d);
    assert_eq!(o.status.code(), Some(4));

    let text = std::fs::read_to_string(&rm).unwrap();
    let broken = d.join("broken.csv");
    std::fs::write(&broken, text.replacen("# dfreq=", "dfreq=", 1)).unwrap();
    let o = bin(&["reconstruct", "--grid", broken.to_str().unwrap()], d);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("broken.csv:6"));
}

#[test]
fn injected_ridges_and_per_frame_filter() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert!(bin(&["generate", "fmam"], d).status.success());
    let traj = d.join("trajectories.csv");
    let o = bin(
        &["analyze", "--if-from", traj.to_str().unwrap(), "--gamma", "0", "--reconstruct"],
        d,
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let err: f64 = stdout(&o)
        .lines()
        .find_map(|l| l.strip_prefix("recon_rel_l2="))
        .unwrap()
        .parse()
        .unwrap();
    assert!(err <= 1e-10);
    let ridges = std::fs::read_to_string(d.join("ridges.csv")).unwrap();
    // two tracks, one ridge each per frame
    assert_eq!(ridges.lines().count(), 1 + 2 * 128);

    let o = bin(&["analyze", "--per-frame-max", "--snr-db", "5", "--seed", "9"], d);
    assert!(o.status.success());
}
