use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_screening")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write_config(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, body).unwrap();
    p
}

/// Density high-low-high against a uniform: the likelihood ratio is not monotone.
const CROSSING: &str = r#"{
  "price": 0.75, "tax_credit": 0.0, "trait_share": 0.3,
  "trait_dist": {"family": "table", "knots": [0, 1], "cdf": [0, 1]},
  "nontrait_dist": {"family": "table", "knots": [0, 0.25, 0.5, 0.75, 1], "cdf": [0, 0.4, 0.5, 0.6, 1]},
  "cost": "quadratic"
}"#;

fn field<'a>(line: &'a str, key: &str) -> &'a str {
    line.split_whitespace()
        .find_map(|kv| kv.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
        .unwrap_or_else(|| panic!("{key} missing from {line}"))
}

#[test]
fn check_assumptions_exit_codes() {
    let o = run(&["check-assumptions", path_str(&scenario("mlrp.json"))]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("MLRP"));
    assert_eq!(code(&run(&["check-assumptions", path_str(&scenario("reverse.json"))])), 0);

    let dir = TempDir::new().unwrap();
    let crossing = write_config(&dir, "crossing.json", CROSSING);
    assert_eq!(code(&run(&["check-assumptions", path_str(&crossing)])), 3);
    assert_eq!(code(&run(&["solve", path_str(&crossing)])), 3);
}

#[test]
fn input_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    let bad = write_config(&dir, "bad.json", &fs::read_to_string(scenario("mlrp.json")).unwrap().replace("0.3,", "1.5,"));
    assert_eq!(code(&run(&["solve", path_str(&bad)])), 2);
    assert_eq!(code(&run(&["solve", "/no/such/file.json"])), 2);
    let garbled = write_config(&dir, "garbled.json", "{ not json");
    assert_eq!(code(&run(&["check-assumptions", path_str(&garbled)])), 2);
    assert_eq!(code(&run(&["frobnicate"])), 2);
    assert_eq!(code(&run(&["solve"])), 2);
}

#[test]
fn solve_summary() {
    let o = run(&["solve", path_str(&scenario("mlrp.json"))]);
    assert_eq!(code(&o), 0);
    let line = stdout(&o);
    assert_eq!(field(&line, "ordering"), "MLRP");
    assert_eq!(field(&line, "pooled_cutoff"), "none");
    assert_eq!(field(&line, "transfer"), "0");
    // pooling on [θ*, 1]; none under MLRP
    assert_eq!(field(&line, "theta_star"), "1");

    let o = run(&["solve", path_str(&scenario("reverse.json"))]);
    let line = stdout(&o);
    assert_eq!(field(&line, "ordering"), "ReverseMLRP");
    // full pooling at τ = 0
    assert_eq!(field(&line, "theta_star"), "0");
}

#[test]
fn solve_then_verify_round_trips() {
    let dir = TempDir::new().unwrap();
    for cfg in ["mlrp.json", "reverse_tau02.json"] {
        for ext in ["csv", "json"] {
            let menu = dir.path().join(format!("{cfg}.{ext}"));
            let o = run(&["solve", path_str(&scenario(cfg)), "--out", path_str(&menu)]);
            assert_eq!(code(&o), 0);
            let report = dir.path().join(format!("{cfg}.{ext}.report.json"));
            let o = run(&["verify", path_str(&scenario(cfg)), "--menu", path_str(&menu), "--report", path_str(&report)]);
            assert_eq!(code(&o), 0, "{cfg} {ext}: {}", stdout(&o));
            let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
            assert_eq!(v["overall_pass"], true);
        }
    }
}

#[test]
fn explicit_format_overrides_extension() {
    let dir = TempDir::new().unwrap();
    let menu = dir.path().join("menu.txt");
    assert_eq!(code(&run(&["solve", path_str(&scenario("mlrp.json")), "--out", path_str(&menu), "--format", "json"])), 0);
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&menu).unwrap()).unwrap();
    assert!(v.is_object());
}

#[test]
fn tampered_menus() {
    let dir = TempDir::new().unwrap();
    let cfg = scenario("mlrp.json");
    let menu = dir.path().join("menu.csv");
    run(&["solve", path_str(&cfg), "--out", path_str(&menu)]);
    let text = fs::read_to_string(&menu).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    let cols: Vec<&str> = header.split(',').collect();
    let wage_cols: Vec<usize> = cols.iter().enumerate().filter(|(_, c)| c.starts_with('w')).map(|(i, _)| i).collect();
    assert_eq!(wage_cols.len(), 2, "{header}");

    let rewrite = |f: &dyn Fn(usize, f64) -> f64| -> String {
        let mut out = vec![header.to_string()];
        for l in text.lines().skip(1) {
            let row: Vec<String> = l
                .split(',')
                .enumerate()
                .map(|(i, v)| match v.parse::<f64>() {
                    Ok(x) if i > 0 => format!("{}", f(i, x)),
                    _ => v.to_string(),
                })
                .collect();
            out.push(row.join(","));
        }
        out.join("\n") + "\n"
    };

    let lowered = dir.path().join("lowered.csv");
    fs::write(&lowered, rewrite(&|i, x| if wage_cols.contains(&i) { x - 0.01 } else { x })).unwrap();
    let o = run(&["verify", path_str(&cfg), "--menu", path_str(&lowered)]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("individual_rationality: fail"), "{}", stdout(&o));

    let null = dir.path().join("null.csv");
    fs::write(&null, rewrite(&|_, _| 0.0)).unwrap();
    assert_eq!(code(&run(&["verify", path_str(&cfg), "--menu", path_str(&null)])), 0);

    let truncated = dir.path().join("truncated.csv");
    fs::write(&truncated, "theta,qT\n0,1\n").unwrap();
    assert_eq!(code(&run(&["verify", path_str(&cfg), "--menu", path_str(&truncated)])), 2);
}

#[test]
fn outputs_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let cfg = scenario("reverse_tau02.json");
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    run(&["solve", path_str(&cfg), "--out", path_str(&a)]);
    run(&["solve", path_str(&cfg), "--out", path_str(&b)]);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());

    let sweep = |p: &Path| run(&["sweep", path_str(&cfg), "--steps", "7", "--to", "0.3", "--out", path_str(p)]);
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    assert_eq!(code(&sweep(&a)), 0);
    sweep(&b);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn sweep_rows() {
    let o = run(&["sweep", path_str(&scenario("reverse.json")), "--steps", "5", "--to", "0.4"]);
    assert_eq!(code(&o), 0);
    let mut r = csv::Reader::from_reader(o.stdout.as_slice());
    let header: Vec<String> = r.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, ["tau", "theta_T_star", "theta_N_star", "theta_star", "hire_prob_T", "hire_prob_N", "objective", "status"]);
    let rows: Vec<Vec<String>> = r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect();
    assert_eq!(rows.len(), 5);
    let col = |j: usize| rows.iter().map(|row| row[j].parse::<f64>().unwrap()).collect::<Vec<_>>();
    assert_eq!(col(0), [0.0, 0.1, 0.2, 0.3, 0.4]);
    assert!(rows.iter().all(|row| row[7] == "ok"));
    let theta_star = col(3);
    assert_eq!(theta_star[0], 0.0);
    assert!(theta_star.windows(2).all(|w| w[1] > w[0]));
    for p in col(4).into_iter().chain(col(5)) {
        assert!((0.0..=1.0).contains(&p));
    }
}

#[test]
fn invalid_sweeps_exit_two() {
    let cfg = scenario("mlrp.json");
    assert_eq!(code(&run(&["sweep", path_str(&cfg), "--parameter", "price"])), 2);
    assert_eq!(code(&run(&["sweep", path_str(&cfg), "--from", "0.5", "--to", "0.1"])), 2);
    assert_eq!(code(&run(&["sweep", path_str(&cfg), "--to", "1.0"])), 2);
    assert_eq!(code(&run(&["sweep", path_str(&cfg), "--steps", "0"])), 2);
}

#[test]
fn curves_files() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("curves");
    let o = run(&["curves", path_str(&scenario("reverse.json")), "--out", path_str(&out)]);
    assert_eq!(code(&o), 0);

    let mut q = csv::Reader::from_path(out.join("quantities.csv")).unwrap();
    assert_eq!(q.headers().unwrap(), vec!["tau", "theta", "qT", "qN"]);
    let taus: std::collections::BTreeSet<String> = q.records().map(|r| r.unwrap()[0].to_string()).collect();
    assert_eq!(taus.len(), 4);

    let mut c = csv::Reader::from_path(out.join("candidates.csv")).unwrap();
    let header = c.headers().unwrap().clone();
    assert_eq!(header.len(), 13);
    let sep = header.iter().position(|h| h == "full_separation_violation").unwrap();
    let pool = header.iter().position(|h| h == "full_pooling_violation").unwrap();
    let first = c.records().next().unwrap().unwrap();
    assert_eq!(first[0].parse::<f64>().unwrap(), 0.0);
    assert!((first[sep].parse::<f64>().unwrap() - 0.0509050).abs() < 1e-6);
    assert_eq!(first[pool].parse::<f64>().unwrap(), 0.0);
}
