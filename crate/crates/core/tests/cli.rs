use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use stschmidt::biphoton::marginal_intensity;
use stschmidt::container::Container;
use stschmidt::export::{ridge, SPECTRUM_CSV, SUMMARY};
use stschmidt::presets;

const BIN: &str = env!("CARGO_BIN_EXE_stschmidt");

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn stschmidt(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn decompose_oracle(out: &Path) -> Output {
    stschmidt(&["decompose", "-c", s(&config("oracle_desk.toml")), "-o", s(out)])
}

#[test]
fn repeated_runs_are_bit_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(code(&decompose_oracle(&a)), 0);
    assert_eq!(code(&decompose_oracle(&b)), 0);
    for f in ["modes.stsm", "intensity.stsm", SPECTRUM_CSV, SUMMARY] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn artifacts_agree_and_carry_the_hash() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&decompose_oracle(dir.path())), 0);
    let summary: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join(SUMMARY)).unwrap()).unwrap();
    let hash = summary["config_sha256"].as_str().unwrap();
    assert_eq!(hash.len(), 64);
    assert_eq!(summary["invariants_pass"], true);

    let csv = std::fs::read_to_string(dir.path().join(SPECTRUM_CSV)).unwrap();
    assert_eq!(csv.lines().next().unwrap(), format!("# config_sha256={hash}"));
    let rows = csv.lines().filter(|l| !l.starts_with('#')).count() - 1;
    assert_eq!(rows as u64, summary["retained_modes"].as_u64().unwrap());

    for f in ["modes.stsm", "intensity.stsm"] {
        assert_eq!(Container::read(&dir.path().join(f)).unwrap().meta("config_sha256"), Some(hash));
    }
}

#[test]
fn overrides_change_the_hash() {
    let dir = tempfile::tempdir().unwrap();
    let run = |d: &str, extra: &[&str]| {
        let (cfg, out) = (config("separable.toml"), dir.path().join(d));
        let mut args = vec!["decompose", "-c", s(&cfg), "-o", s(&out)];
        args.extend_from_slice(extra);
        assert_eq!(code(&stschmidt(&args)), 0);
        serde_json::from_str::<serde_json::Value>(&std::fs::read_to_string(out.join(SUMMARY)).unwrap()).unwrap()
    };
    let (a, b) = (run("a", &[]), run("b", &["--set", "grid.q_max=1.5e5"]));
    assert_ne!(a["config_sha256"], b["config_sha256"]);
    assert!((a["schmidt_number"].as_f64().unwrap() - 1.0).abs() < 1e-10);
}

#[test]
fn validate_passes_and_negative_control_fails() {
    let dir = tempfile::tempdir().unwrap();
    let ok = stschmidt(&["validate", "-c", s(&config("oracle_desk.toml")), "-o", s(dir.path())]);
    assert_eq!(code(&ok), 0, "{}", String::from_utf8_lossy(&ok.stdout));
    assert!(dir.path().join("validation.json").exists());
    let bad = stschmidt(&["validate", "-c", s(&config("oracle_desk.toml")), "-o", s(dir.path()), "--corrupt-weights"]);
    assert_eq!(code(&bad), 5);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = s(dir.path());
    let oracle = config("oracle_desk.toml");
    let cases: [(&[&str], i32); 4] = [
        (&["--set", "grid.bogus=1"], 2),
        (&["--set", "grid.n_q=0"], 2),
        (&["--set", "grid.q_max=1e8"], 3),
        (&["--set", "pump.w_p=-1"], 2),
    ];
    for (extra, want) in cases {
        let mut args = vec!["decompose", "-c", s(&oracle), "-o", out];
        args.extend_from_slice(extra);
        let o = stschmidt(&args);
        assert_eq!(code(&o), want, "{extra:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
    let guard = stschmidt(&["validate", "-c", s(&oracle), "-o", out, "--set", "grid.n_q=20"]);
    assert_eq!(code(&guard), 2);
    let missing = stschmidt(&["decompose", "-c", s(&dir.path().join("nope.toml")), "-o", out]);
    assert_eq!(code(&missing), 2);
}

#[test]
fn export_targets() {
    let dir = tempfile::tempdir().unwrap();
    let run = dir.path().join("run");
    assert_eq!(code(&decompose_oracle(&run)), 0);
    let spec = dir.path().join("spec.csv");
    assert_eq!(code(&stschmidt(&["export", "-r", s(&run), "-w", "spectrum", "-o", s(&spec)])), 0);
    assert_eq!(std::fs::read(&spec).unwrap(), std::fs::read(run.join(SPECTRUM_CSV)).unwrap());

    let mode = dir.path().join("mode.stsm");
    assert_eq!(code(&stschmidt(&["export", "-r", s(&run), "-w", "mode:1,0", "-o", s(&mode)])), 0);
    let c = Container::read(&mode).unwrap();
    assert_eq!(c.get("mode:l=1,m=0").unwrap().complex_data().unwrap().len(), 144);

    assert_eq!(code(&stschmidt(&["export", "-r", s(&run), "-w", "mode:99,0", "-o", s(&mode)])), 2);
    assert_eq!(code(&stschmidt(&["export", "-r", s(&run), "-w", "sweep", "-o", s(&mode)])), 2);
    assert_ne!(code(&stschmidt(&["export", "-r", s(&run), "-w", "modes", "-o", s(&mode)])), 0);
}

#[test]
fn sweep_writes_table_with_trend() {
    let dir = tempfile::tempdir().unwrap();
    let o = stschmidt(&[
        "sweep",
        "-c",
        s(&config("sweep_waist.toml")),
        "-o",
        s(dir.path()),
        "--set",
        "sweep.values=[10e-6, 20e-6, 30e-6]",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert!(csv.contains("trend=increasing"), "{csv}");
    assert_eq!(csv.lines().filter(|l| !l.starts_with('#')).count(), 4);
}

#[test]
fn bench_small_sizes() {
    let o = stschmidt(&["bench", "--sizes", "4,6", "--min-time", "0.01"]);
    assert_eq!(code(&o), 0);
    assert_eq!(String::from_utf8_lossy(&o.stdout).lines().count(), 3);
}

/// The marginal intensity of the experimental configuration peaks further
/// from the axis as the frequency detuning grows.
#[test]
fn x_shaped_intensity() {
    let s = presets::experiment_coarse();
    let g = &s.grid;
    let inten = marginal_intensity(&s.build().unwrap());
    let mut mirrored = vec![0.0; 2 * g.n_q * g.n_omega];
    for iq in 0..g.n_q {
        for iw in 0..g.n_omega {
            let v = inten[g.index(iq, iw)];
            mirrored[(g.n_q + iq) * g.n_omega + iw] = v;
            mirrored[(g.n_q - 1 - iq) * g.n_omega + iw] = v;
        }
    }
    let r = ridge(&mirrored, 2 * g.n_q, g.n_omega);
    let half = g.n_omega / 2;
    for iw in half..g.n_omega - 1 {
        assert!(r[iw + 1] >= r[iw], "{r:?}");
        assert!(r[g.n_omega - 2 - iw] >= r[g.n_omega - 1 - iw], "{r:?}");
    }
    assert!(r[0] > r[half] + 5 && r[g.n_omega - 1] > r[half] + 5, "{r:?}");
}
