use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const MOD3: [&str; 4] = ["--chi1", "q=3", "--chi2", "q=3"];
const MOD28: [&str; 4] = ["--chi1", "q=4", "--chi2", "q=7;g=3;v=5/6"];

fn gdsum(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gdsum"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn with(base: &[&str], extra: &[&str]) -> Vec<String> {
    base.iter().chain(extra).map(|s| s.to_string()).collect()
}

fn run(args: Vec<String>) -> Output {
    gdsum(&args.iter().map(String::as_str).collect::<Vec<_>>())
}

fn cache_file(dir: &Path) -> std::path::PathBuf {
    let files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    assert_eq!(files.len(), 1, "{files:?}");
    files[0].clone()
}

#[test]
fn precompute_writes_and_reuses_cache() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let mut args = vec!["precompute"];
    args.extend(MOD3);
    args.extend(["--cache-dir", d]);
    let first = gdsum(&args);
    assert!(first.status.success(), "{first:?}");
    let out = stdout(&first);
    assert!(out.contains("Γ0 transversal: 6 members"), "{out}");
    assert!(out.contains("SL2 transversal: 72 members"), "{out}");
    let path = cache_file(dir.path());
    let written = fs::metadata(&path).unwrap().modified().unwrap();

    let second = gdsum(&args);
    assert!(second.status.success());
    assert!(stdout(&second).contains("up to date"));
    assert_eq!(fs::metadata(&path).unwrap().modified().unwrap(), written);
}

#[test]
fn worked_example_prints_zero() {
    let o = run(with(
        &["sum"],
        &with(&MOD3, &["--matrix", "17,32;9,17"])
            .iter()
            .map(String::as_str)
            .collect::<Vec<_>>(),
    ));
    assert!(o.status.success(), "{o:?}");
    assert_eq!(stdout(&o).lines().next(), Some("0"));

    let o = run(with(
        &["sum", "--naive"],
        &with(&MOD3, &["--matrix", "17,32;9,17"])
            .iter()
            .map(String::as_str)
            .collect::<Vec<_>>(),
    ));
    assert_eq!(stdout(&o).lines().next(), Some("0"));
}

#[test]
fn trace_shows_factors() {
    let mut args = vec![
        "sum",
        "--trace",
        "--quotient",
        "floor",
        "--matrix",
        "17,32;9,17",
    ];
    args.extend(MOD3);
    let o = gdsum(&args);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("γ1 = -T^1 S T^-2"), "{out}");
    assert!(out.contains("U(bar(1, 0; 0, 1), T^1)"), "{out}");
    assert!(out.contains("-I) = U("), "{out}");
}

#[test]
fn sum_with_and_without_cache_agree() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let m = "3,2;280,187";
    let mut args = vec!["sum", "--matrix", m];
    args.extend(MOD28);
    let fresh = gdsum(&args);
    assert!(fresh.status.success(), "{fresh:?}");
    args.extend(["--cache-dir", d]);
    let building = gdsum(&args);
    let cached = gdsum(&args);
    assert_eq!(stdout(&fresh), stdout(&building));
    assert_eq!(stdout(&fresh), stdout(&cached));

    let mut naive = vec!["sum", "--naive", "--matrix", m];
    naive.extend(MOD28);
    assert_eq!(stdout(&gdsum(&naive)), stdout(&fresh));
}

#[test]
fn paper_level_35_matrix() {
    let o = gdsum(&[
        "sum",
        "--chi1",
        "q=5;g=2;v=3/4",
        "--chi2",
        "q=7;g=3;v=1/3",
        "--matrix",
        "46741638, 43234369; 43234205, 39990117",
    ]);
    assert!(o.status.success(), "{o:?}");
    assert!(String::from_utf8_lossy(&o.stderr).contains("odd"));
}

#[test]
fn errors_exit_with_one() {
    let mut args = vec!["sum", "--matrix", "2,1;3,2"];
    args.extend(MOD3);
    assert_eq!(gdsum(&args).status.code(), Some(1));

    assert_eq!(
        gdsum(&["sum", "--chi1", "q=1", "--chi2", "q=3", "--matrix", "1,0;0,1"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        gdsum(&["precompute", "--chi1", "q=6", "--chi2", "q=3"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(gdsum(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(gdsum(&["sum"]).status.code(), Some(1));
    assert_eq!(gdsum(&["--help"]).status.code(), Some(0));
    let mut big = vec![
        "precompute",
        "--chi1",
        "q=11;g=2;v=1/2",
        "--chi2",
        "q=11;g=2;v=1/2",
    ];
    let dir = tempfile::tempdir().unwrap();
    big.extend(["--cache-dir", dir.path().to_str().unwrap()]);
    assert_eq!(gdsum(&big).status.code(), Some(1));
}

#[test]
fn verify_passes_and_is_deterministic() {
    let mut args = vec!["verify", "--trials", "30", "--seed", "9", "--cmax", "2000"];
    args.extend(MOD3);
    let a = gdsum(&args);
    let b = gdsum(&args);
    assert_eq!(a.status.code(), Some(0), "{a:?}");
    assert!(stdout(&a).contains("oracle equivalence: 30/30"));
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn verify_detects_corrupted_cache() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let mut pre = vec!["precompute", "--cache-dir", d];
    pre.extend(MOD3);
    assert!(gdsum(&pre).status.success());

    let path = cache_file(dir.path());
    let mut json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    for entry in json["sums_g0"].as_array_mut().unwrap() {
        if entry["d"] != 1 {
            entry["v"][0] = "5/7".into();
        }
    }
    fs::write(&path, json.to_string()).unwrap();

    let mut args = vec!["verify", "--trials", "10", "--cache-dir", d];
    args.extend(MOD3);
    let o = gdsum(&args);
    assert_eq!(o.status.code(), Some(2), "{o:?}");
    assert!(stdout(&o).contains("mismatch: γ = "));
}

#[test]
fn bench_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bench.csv");
    let mut args = vec![
        "bench",
        "--kmin",
        "1",
        "--kmax",
        "4",
        "--samples",
        "3",
        "--naive-cutoff",
        "84",
    ];
    args.extend(MOD28);
    args.extend(["--output", out.to_str().unwrap()]);
    let o = gdsum(&args);
    assert!(o.status.success(), "{o:?}");
    let csv = fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "k,c,n_samples,fast_mean_s,naive_mean_s");
    assert_eq!(lines.len(), 5);
    assert!(lines[1].starts_with("1,28,3,"));
    assert!(!lines[3].ends_with(','), "{}", lines[3]);
    assert!(
        lines[4].starts_with("4,112,3,") && lines[4].ends_with(','),
        "{}",
        lines[4]
    );
}
