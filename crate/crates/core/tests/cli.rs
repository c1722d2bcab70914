use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use aetomo::io::read_scalar_field;

fn aetomo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aetomo")).args(args).output().unwrap()
}

fn write_conf(dir: &Path, text: &str) -> String {
    let p = dir.join("run.conf");
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn help_and_usage_exit_codes() {
    assert_eq!(aetomo(&["--help"]).status.code(), Some(0));
    assert_eq!(aetomo(&["reconstruct", "--help"]).status.code(), Some(0));
    let out = aetomo(&["phantom", "--frobnicate"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--frobnicate"));
}

#[test]
fn unknown_config_key_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let conf = write_conf(dir.path(), "n = 21\nwavelength = 3\n");
    let out = aetomo(&["phantom", "--config", &conf, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("wavelength") && err.contains(":2:"), "{err}");
    let out = aetomo(&["phantom", "--set", "margin=lots"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("lots"));
}

#[test]
fn forward_on_background_gives_zero_data() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("data");
    let out = aetomo(&[
        "forward",
        "--set",
        "n=21",
        "--set",
        "phantom=none",
        "--set",
        "margin=3",
        "--set",
        "frequencies=2,4,6",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let listing = fs::read_to_string(out_dir.join("frequencies.txt")).unwrap();
    assert_eq!(listing, "0 2\n1 4\n2 6\n");
    for i in 0..3 {
        let psi = read_scalar_field(&out_dir.join(format!("psi_{i:02}.aetf"))).unwrap();
        assert_eq!(psi.max_abs(), 0.0);
    }
    let manifest = fs::read_to_string(out_dir.join("manifest.txt")).unwrap();
    assert!(manifest.contains("command = forward"));
    assert!(manifest.contains("frequencies = 2, 4, 6"));
    assert!(!manifest.contains("output_dir"));
}

#[test]
fn reconstruct_from_written_data() {
    let dir = tempfile::tempdir().unwrap();
    let conf = write_conf(
        dir.path(),
        "n = 31\nmargin = 3\nfrequencies = 3\nmax_iterations = 5\nphantom = custom\ninclusion = disk 0.5 0.5 0.2 1.6\n",
    );
    let data = dir.path().join("data");
    let recon = dir.path().join("recon");
    assert!(aetomo(&["forward", "--config", &conf, "--out", data.to_str().unwrap()]).status.success());
    let out = aetomo(&[
        "reconstruct",
        "--config",
        &conf,
        "--data",
        data.to_str().unwrap(),
        "--out",
        recon.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let trace = aetomo::io::read_trace_csv(&recon.join("trace.csv")).unwrap();
    assert_eq!(trace.len(), 6);
    assert!(trace.iter().all(|r| r.rel_err_l2.is_some()));
    assert!(trace.windows(2).all(|w| w[1].j <= w[0].j));
    assert!(recon.join("q_final.pgm").exists());

    // a data directory without q_true still works, without error columns
    fs::remove_file(data.join("q_true.aetf")).unwrap();
    let out = aetomo(&[
        "reconstruct",
        "--config",
        &conf,
        "--data",
        data.to_str().unwrap(),
        "--out",
        recon.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let trace = aetomo::io::read_trace_csv(&recon.join("trace.csv")).unwrap();
    assert!(trace.iter().all(|r| r.rel_err_l2.is_none()));

    // grid mismatch between data and config is a usage error
    let out = aetomo(&[
        "reconstruct",
        "--config",
        &conf,
        "--set",
        "n=41",
        "--data",
        data.to_str().unwrap(),
        "--out",
        recon.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn render_with_range() {
    let dir = tempfile::tempdir().unwrap();
    let ph = dir.path().join("ph");
    assert!(aetomo(&["phantom", "--set", "n=21", "--set", "margin=3", "--set", "phantom=custom", "--set",
        "inclusion=rect 0.3 0.3 0.7 0.7 2", "--set", "phantom_blur=0", "--out", ph.to_str().unwrap()])
        .status
        .success());
    let img = dir.path().join("q.pgm");
    let input = ph.join("q_true.aetf");
    let out = aetomo(&["render", input.to_str().unwrap(), img.to_str().unwrap(), "--range", "1", "2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&img).unwrap();
    let px: Vec<u32> = text.lines().skip(3).flat_map(|l| l.split(' ').map(|t| t.parse::<u32>().unwrap())).collect();
    assert_eq!(px.len(), 441);
    assert!(px.iter().all(|&p| p == 0 || p == 255));
    assert_eq!(px[10 * 21 + 10], 255);
    let out = aetomo(&["render", input.to_str().unwrap(), img.to_str().unwrap(), "--range", "2", "1"]);
    assert_eq!(out.status.code(), Some(1));
    let out = aetomo(&["render", "/nonexistent.aetf", img.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn shipped_configs_parse() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    for name in ["multi_10_15_20.conf", "single_3.conf"] {
        let cfg = aetomo::io::RunConfig::load(&root.join(name)).unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.n, 101);
    }
}
