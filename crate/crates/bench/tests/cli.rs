use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn gmselect(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gmselect"))
        .args(args)
        .current_dir(dir)
        .env_remove("GMSELECT_OUT")
        .output()
        .expect("binary runs")
}

const CONFIG: &str = r#"
seed = 3
jobs = 2

[[datasets]]
path = "tiny.dat"

[[synthetic]]
name = "gauss"
n_pos = 8
n_neg = 48
dim = 2
separation = 2.0

[[methods]]
name = "1NN"

[[methods]]
name = "RUS"

[[methods]]
name = "ERUS"
size = 3
"#;

fn tiny_keel() -> String {
    let mut s = String::from("@relation tiny\n@attribute x real\n@attribute y real\n@attribute c {p, n}\n@data\n");
    for i in 0..40 {
        let label = if i % 5 == 0 { "p" } else { "n" };
        let shift = if label == "p" { 1.0 } else { 0.0 };
        s.push_str(&format!("{}, {}, {label}\n", shift + (i * 7 % 11) as f64 / 11.0, (i * 3 % 13) as f64 / 13.0));
    }
    s
}

#[test]
fn run_then_report() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("tiny.dat"), tiny_keel()).unwrap();
    fs::write(dir.path().join("exp.toml"), CONFIG).unwrap();

    let out = gmselect(&["run", "--config", "exp.toml", "--out", "res"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("res/trials.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "dataset,rep,fold,method,gm,tpr,tnr,retained,millis,failed");
    assert_eq!(lines.len(), 1 + 2 * 10 * 3);
    assert!(lines[1].starts_with("tiny,0,0,1NN,"));
    assert!(fs::read_to_string(dir.path().join("res/report.md")).unwrap().contains("| ERUS (3) |"));

    // Same config, different thread count and seed override.
    let again = gmselect(&["run", "--config", "exp.toml", "--out", "res2", "--jobs", "1"], dir.path());
    assert!(again.status.success());
    assert_eq!(fs::read_to_string(dir.path().join("res2/trials.csv")).unwrap(), csv);
    let reseeded = gmselect(&["run", "--config", "exp.toml", "--out", "res3", "--seed", "4"], dir.path());
    assert!(reseeded.status.success());
    assert_ne!(fs::read_to_string(dir.path().join("res3/trials.csv")).unwrap(), csv);

    let rep = gmselect(&["report", "--records", "res/trials.csv", "--bonferroni-m", "1"], dir.path());
    assert!(rep.status.success());
    let md = String::from_utf8(rep.stdout).unwrap();
    assert!(md.contains("Bonferroni-adjusted for 1 comparisons"));
    assert!(md.contains("20 complete trials, 3 methods."));
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("tiny.dat"), tiny_keel()).unwrap();
    fs::write(
        dir.path().join("exp.toml"),
        CONFIG.replace("[[synthetic]]\nname = \"gauss\"\nn_pos = 8\nn_neg = 48\ndim = 2\nseparation = 2.0\n", ""),
    )
    .unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_gmselect"))
        .args(["run", "--config", "exp.toml"])
        .current_dir(dir.path())
        .env("GMSELECT_OUT", "from-env")
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("from-env/trials.csv").exists());
}

#[test]
fn parse_reports_good_and_bad_files() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("tiny.dat"), tiny_keel()).unwrap();
    fs::write(dir.path().join("broken.dat"), "@relation b\n@attribute x strange\n").unwrap();
    let ok = gmselect(&["parse", "tiny.dat"], dir.path());
    assert!(ok.status.success());
    let text = String::from_utf8(ok.stdout).unwrap();
    assert!(text.contains("40 instances (8 positive 'p', 32 negative 'n')"), "{text}");
    assert!(text.contains("IR 4.00"));
    let bad = gmselect(&["parse", "tiny.dat", "broken.dat"], dir.path());
    assert!(!bad.status.success());
    assert!(String::from_utf8_lossy(&bad.stderr).contains("line 2"));
}

#[test]
fn bad_config_fails_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("exp.toml"), "seed = 1\n[[methods]]\nname = \"SMOTE\"\n").unwrap();
    let out = gmselect(&["run", "--config", "exp.toml"], dir.path());
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown method"));
}

#[test]
fn theory_subcommands() {
    let dir = tempfile::tempdir().unwrap();
    let b = gmselect(&["theory", "boundary1d", "--steps", "4"], dir.path());
    assert!(b.status.success());
    assert!(String::from_utf8(b.stdout).unwrap().contains("5,0.5555555555555556,0.7142857142857142,0.629940788348712"));
    assert!(String::from_utf8_lossy(&b.stderr).contains("b* = 5 "));

    let e = gmselect(&["theory", "exhaustive"], dir.path());
    assert!(e.status.success());
    let curve = String::from_utf8(e.stdout).unwrap();
    assert!(curve.starts_with("k,gm\n"));
    // Header plus k = 2..=15: smaller sets cannot hold both classes.
    assert_eq!(curve.lines().count(), 15);

    let l = gmselect(&["theory", "lemma-check", "--configs", "3", "--probes", "500"], dir.path());
    assert!(l.status.success());
    assert!(String::from_utf8(l.stdout).unwrap().contains("0 inclusion violations"));

    let d = gmselect(&["theory", "demo-gaussian", "--seeds", "1", "--test-size", "900", "--trials", "0"], dir.path());
    assert!(d.status.success());
    assert!(String::from_utf8(d.stdout).unwrap().starts_with("seed,gm_cb,gm_bb,gm_re\n0,"));

    let p = gmselect(&["theory", "prop1", "--cases", "5", "--samples", "2000"], dir.path());
    assert!(p.status.success(), "{}", String::from_utf8_lossy(&p.stderr));
}
