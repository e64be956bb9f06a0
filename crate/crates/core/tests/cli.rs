use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_qccilc"));
    c.env("QCCILC_THREADS", "2").env_remove("QCCILC_LOG");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .display()
        .to_string()
}

fn mapped(dir: &TempDir, fcidump: &str) -> PathBuf {
    let out = dir.path().join(format!("{fcidump}.pauli"));
    let o = run(&["map", &fixture(fcidump), "-o", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    out
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn map_writes_reference_header_and_manifest() {
    let dir = TempDir::new().unwrap();
    let h = mapped(&dir, "h2_sto3g_0.74.fcidump");
    let text = std::fs::read_to_string(&h).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("qubits 4"));
    assert_eq!(lines.next(), Some("# reference 1010"));
    assert_eq!(lines.count(), 15);

    let manifest = json(&PathBuf::from(format!("{}.manifest.json", h.display())));
    assert_eq!(manifest["command"], "map");
    assert_eq!(manifest["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn pipeline_reaches_h2_ground_state() {
    let dir = TempDir::new().unwrap();
    let h = mapped(&dir, "h2_sto3g_0.74.fcidump");
    let out = dir.path().join("run.json");
    let o = run(&[
        "pipeline",
        h.to_str().unwrap(),
        "-d",
        "1",
        "-n",
        "1",
        "-m",
        "1",
        "-o",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&out);
    let (e, exact) = (
        v["final_energy"].as_f64().unwrap(),
        v["exact_energy"].as_f64().unwrap(),
    );
    assert!((e - (-1.1372838344885023)).abs() < 1e-9, "{e}");
    assert!(e >= exact - 1e-9);
    assert!(v["fidelity"].as_f64().unwrap() > 1.0 - 1e-8);
    assert_eq!(v["reference_energies_non_increasing"], true);
}

#[test]
fn pipeline_output_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let h = mapped(&dir, "lih_sto3g_cas2e3o_1.6.fcidump");
    let outputs: Vec<String> = (0..2)
        .map(|i| {
            let out = dir.path().join(format!("run{i}.json"));
            let threads = if i == 0 { "1" } else { "4" };
            let o = run(&[
                "--threads",
                threads,
                "pipeline",
                h.to_str().unwrap(),
                "-d",
                "2",
                "-o",
                out.to_str().unwrap(),
            ]);
            assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
            std::fs::read_to_string(out).unwrap()
        })
        .collect();
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = TempDir::new().unwrap();
    let h = mapped(&dir, "h2_sto3g_0.74.fcidump");
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "[pipeline]\nd = 3\nn = 1\nm = 0\n").unwrap();
    let out = dir.path().join("run.json");
    let o = run(&[
        "--config",
        cfg.to_str().unwrap(),
        "pipeline",
        h.to_str().unwrap(),
        "-d",
        "1",
        "-o",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let steps = json(&out)["pipeline"]["steps"].as_array().unwrap().len();
    assert!(steps <= 1);

    std::fs::write(&cfg, "[pipeline]\nbogus = 1\n").unwrap();
    let o = run(&[
        "--config",
        cfg.to_str().unwrap(),
        "pipeline",
        h.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn scan_of_one_file_matches_pipeline() {
    let dir = TempDir::new().unwrap();
    let h = mapped(&dir, "lih_sto3g_cas2e3o_1.6.fcidump");
    let run_json = dir.path().join("run.json");
    let csv = dir.path().join("scan.csv");
    assert!(run(&[
        "pipeline",
        h.to_str().unwrap(),
        "-o",
        run_json.to_str().unwrap()
    ])
    .status
    .success());
    assert!(
        run(&["scan", h.to_str().unwrap(), "-o", csv.to_str().unwrap()])
            .status
            .success()
    );
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut rows = text.lines();
    assert_eq!(
        rows.next(),
        Some("point,file,e_ref,e_ilc,e_final,e_exact,terms")
    );
    let row: Vec<&str> = rows.next().unwrap().split(',').collect();
    assert!(rows.next().is_none());
    let e_final: f64 = row[4].parse().unwrap();
    let pipeline_final = json(&run_json)["final_energy"].as_f64().unwrap();
    assert!(
        (e_final - pipeline_final).abs() < 1e-10,
        "{e_final} vs {pipeline_final}"
    );
}

#[test]
fn bad_input_exits_with_code_2() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.pauli");
    std::fs::write(&bad, "qubits 2\n1.0 0.0 X0 Q1\n").unwrap();
    let o = run(&["pipeline", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());

    let o = run(&["map", dir.path().join("missing.fcidump").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn infeasible_anticom_exits_with_code_3() {
    let o = run(&["anticom", "--flips", "0001,0010,0011,0100,1000,1100"]);
    assert_eq!(
        o.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert!(run(&["anticom", "--flips", "10,01,11"]).status.success());
}

#[test]
fn spectrum_and_dress_agree() {
    let dir = TempDir::new().unwrap();
    let h = mapped(&dir, "h2_sto3g_0.74.fcidump");
    let before = run(&["spectrum", h.to_str().unwrap()]);
    assert!(before.status.success());
    let ilc = dir.path().join("ilc.json");
    let o = run(&[
        "ilc-opt",
        h.to_str().unwrap(),
        "-n",
        "1",
        "-o",
        ilc.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let dressed = dir.path().join("dressed.pauli");
    let o = run(&[
        "dress",
        h.to_str().unwrap(),
        "--ansatz",
        ilc.to_str().unwrap(),
        "-o",
        dressed.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let after = run(&["spectrum", dressed.to_str().unwrap()]);
    let parse = |o: &Output| -> Vec<f64> {
        String::from_utf8_lossy(&o.stdout)
            .lines()
            .skip(1)
            .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
            .collect()
    };
    let (a, b) = (parse(&before), parse(&after));
    assert_eq!(a.len(), 16);
    assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-7));
}
