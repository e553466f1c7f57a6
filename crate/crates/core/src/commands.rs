//! Entry points behind the command-line tool. Each returns the exit code
//! and the text to print so they can be driven from tests.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::menu::{fmt_sig, ContractMenu, MenuView};
use crate::scenario::{Group, Scenario, ScenarioConfig};
use crate::solver::{assemble_menu, OptimalMenu};
use crate::verifier::{build_candidate_menus, verify_contract_menu};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_UNSUPPORTED: i32 = 3;

/// Tax credits written by `curves`.
pub const CURVE_TAX_CREDITS: [f64; 4] = [0.0, 0.2, 0.4, 0.6];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome {
            code: EXIT_OK,
            stdout,
            stderr: String::new(),
        }
    }

    fn failed(e: &Error) -> Self {
        Outcome {
            code: exit_code(e),
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        }
    }
}

/// 3 for regimes and assumptions the solver does not cover, 2 otherwise.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::UnsupportedOrdering | Error::RegimeMismatch { .. } | Error::Precondition(_) => EXIT_UNSUPPORTED,
        _ => EXIT_INPUT,
    }
}

fn load(config: &Path) -> Result<(ScenarioConfig, Scenario)> {
    let cfg = ScenarioConfig::load(config)?;
    let s = cfg.build()?;
    Ok((cfg, s))
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "pass"
    } else {
        "fail"
    }
}

pub fn cmd_check_assumptions(config: &Path) -> Outcome {
    let run = || -> Result<Outcome> {
        let (_, s) = load(config)?;
        let a = s.assumptions()?;
        let mut out = String::new();
        writeln!(out, "regime: {}", a.regime).ok();
        writeln!(out, "reverse_hazard_T: {}", yes_no(a.reverse_hazard_trait)).ok();
        writeln!(out, "reverse_hazard_N: {}", yes_no(a.reverse_hazard_nontrait)).ok();
        let note = if a.single_crossing_required() { "" } else { " (not required)" };
        writeln!(out, "rent_single_crossing: {}{note}", yes_no(a.rent_single_crossing)).ok();
        writeln!(out, "assumptions: {}", if a.satisfied() { "satisfied" } else { "not satisfied" }).ok();
        Ok(Outcome {
            code: if a.satisfied() { EXIT_OK } else { EXIT_UNSUPPORTED },
            stdout: out,
            stderr: String::new(),
        })
    };
    run().unwrap_or_else(|e| Outcome::failed(&e))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MenuFormat {
    #[default]
    Csv,
    Json,
}

impl MenuFormat {
    /// From an explicit choice, else the file extension, else CSV.
    pub fn resolve(explicit: Option<MenuFormat>, path: Option<&Path>) -> MenuFormat {
        explicit.unwrap_or_else(|| match path.and_then(|p| p.extension()).and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => MenuFormat::Json,
            _ => MenuFormat::Csv,
        })
    }
}

pub fn summary_line(m: &OptimalMenu) -> String {
    let pooled = m.pooled_cutoff().map_or("none".to_string(), fmt_sig);
    format!(
        "ordering={} regime={} theta_T_star={} theta_N_star={} theta_star={} pooled_cutoff={} transfer={} objective={}",
        m.ordering(),
        m.regime(),
        fmt_sig(m.hiring_cutoff(Group::Trait)),
        fmt_sig(m.hiring_cutoff(Group::NonTrait)),
        fmt_sig(m.pooling_cutoff()),
        pooled,
        fmt_sig(m.transfer()),
        fmt_sig(m.objective()),
    )
}

fn write_menu(m: &OptimalMenu, cfg: &ScenarioConfig, out: &Path, format: MenuFormat) -> Result<()> {
    let menu = m.to_contract_menu();
    match format {
        MenuFormat::Csv => {
            let file = fs::File::create(out)?;
            menu.write_csv(std::io::BufWriter::new(file))
        }
        MenuFormat::Json => {
            let doc = menu.to_document(Some(m.ordering()), Some(m.objective()), Some(cfg.clone()));
            let text = serde_json::to_string_pretty(&doc)?;
            fs::write(out, text + "\n")?;
            Ok(())
        }
    }
}

pub fn cmd_solve(config: &Path, grid: Option<usize>, out: Option<&Path>, format: Option<MenuFormat>) -> Outcome {
    let run = || -> Result<Outcome> {
        let (mut cfg, _) = load(config)?;
        if let Some(n) = grid {
            cfg.solver.grid_size = n;
        }
        let s = cfg.build()?;
        let m = assemble_menu(&s)?;
        let mut stdout = summary_line(&m) + "\n";
        if let Some(path) = out {
            write_menu(&m, &cfg, path, MenuFormat::resolve(format, Some(path)))?;
            writeln!(stdout, "wrote {}", path.display()).ok();
        }
        Ok(Outcome::ok(stdout))
    };
    run().unwrap_or_else(|e| Outcome::failed(&e))
}

pub fn cmd_verify(config: &Path, menu: &Path, report: Option<&Path>) -> Outcome {
    let run = || -> Result<Outcome> {
        let (cfg, s) = load(config)?;
        let m = ContractMenu::load(menu, s.cost())?;
        let r = verify_contract_menu(&m, &s, &cfg.verify);
        let json = r.to_json();
        let mut stdout = String::new();
        for e in &r.entries {
            writeln!(stdout, "{}: {} (worst {})", e.name, yes_no(e.pass), fmt_sig(e.worst_violation)).ok();
        }
        for e in &r.diagnostics {
            writeln!(stdout, "[info] {}: {} (worst {})", e.name, yes_no(e.pass), fmt_sig(e.worst_violation)).ok();
        }
        writeln!(stdout, "overall: {}", yes_no(r.overall_pass)).ok();
        match report {
            Some(path) => {
                fs::write(path, json + "\n")?;
                writeln!(stdout, "wrote {}", path.display()).ok();
            }
            None => stdout.push_str(&(json + "\n")),
        }
        Ok(Outcome {
            code: if r.overall_pass { EXIT_OK } else { EXIT_VERIFY_FAIL },
            stdout,
            stderr: String::new(),
        })
    };
    run().unwrap_or_else(|e| Outcome::failed(&e))
}

/// A one-parameter sweep. Only the tax credit can be swept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub parameter: String,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
}

impl SweepSpec {
    pub fn tax_credit(from: f64, to: f64, steps: usize) -> Result<Self> {
        let spec = SweepSpec {
            parameter: "tax_credit".into(),
            from,
            to,
            steps,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.parameter != "tax_credit" {
            return Err(Error::input("parameter", format!("only \"tax_credit\" can be swept, got {:?}", self.parameter)));
        }
        if !(self.from >= 0.0) {
            return Err(Error::input("from", format!("must be non-negative, got {}", self.from)));
        }
        if !(self.to < 1.0) {
            return Err(Error::input("to", format!("must be below 1, got {}", self.to)));
        }
        if !(self.from < self.to) {
            return Err(Error::input("to", format!("must exceed from ({}), got {}", self.from, self.to)));
        }
        if self.steps < 2 {
            return Err(Error::input("steps", format!("need at least 2, got {}", self.steps)));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        let n = self.steps - 1;
        (0..self.steps)
            .map(|i| if i == n { self.to } else { self.from + (self.to - self.from) * i as f64 / n as f64 })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub tau: f64,
    pub theta_t_star: f64,
    pub theta_n_star: f64,
    pub theta_star: f64,
    pub hire_prob_t: f64,
    pub hire_prob_n: f64,
    pub objective: f64,
}

/// One solved row per τ; failures come back as `Err` in their slot.
pub fn sweep(s: &Scenario, spec: &SweepSpec) -> Result<Vec<(f64, Result<SweepRow>)>> {
    spec.validate()?;
    Ok(spec
        .values()
        .into_par_iter()
        .map(|tau| {
            let row = s.with_tax_credit(tau).and_then(|st| assemble_menu(&st)).map(|m| SweepRow {
                tau,
                theta_t_star: m.hiring_cutoff(Group::Trait),
                theta_n_star: m.hiring_cutoff(Group::NonTrait),
                theta_star: m.pooling_cutoff(),
                hire_prob_t: m.hire_probability(Group::Trait),
                hire_prob_n: m.hire_probability(Group::NonTrait),
                objective: m.objective(),
            });
            (tau, row)
        })
        .collect())
}

pub fn sweep_csv(rows: &[(f64, Result<SweepRow>)]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["tau", "theta_T_star", "theta_N_star", "theta_star", "hire_prob_T", "hire_prob_N", "objective", "status"])?;
    for (tau, row) in rows {
        match row {
            Ok(r) => w.write_record([
                fmt_sig(r.tau),
                fmt_sig(r.theta_t_star),
                fmt_sig(r.theta_n_star),
                fmt_sig(r.theta_star),
                fmt_sig(r.hire_prob_t),
                fmt_sig(r.hire_prob_n),
                fmt_sig(r.objective),
                "ok".into(),
            ])?,
            Err(_) => w.write_record([fmt_sig(*tau), "".into(), "".into(), "".into(), "".into(), "".into(), "".into(), "skipped".into()])?,
        }
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}

pub fn cmd_sweep(config: &Path, spec: &SweepSpec, out: Option<&Path>) -> Outcome {
    let run = || -> Result<Outcome> {
        let (_, s) = load(config)?;
        let rows = sweep(&s, spec)?;
        let text = sweep_csv(&rows)?;
        let mut stderr = String::new();
        for (tau, r) in &rows {
            if let Err(e) = r {
                writeln!(stderr, "warning: skipped tau={}: {e}", fmt_sig(*tau)).ok();
            }
        }
        let stdout = match out {
            Some(path) => {
                fs::write(path, &text)?;
                format!("wrote {} ({} rows)\n", path.display(), rows.len())
            }
            None => text,
        };
        Ok(Outcome {
            code: EXIT_OK,
            stdout,
            stderr,
        })
    };
    run().unwrap_or_else(|e| Outcome::failed(&e))
}

/// θ, qT, qN in long form for each τ.
pub fn quantity_curves(s: &Scenario, taus: &[f64]) -> Result<String> {
    let menus: Vec<Result<OptimalMenu>> = taus
        .par_iter()
        .map(|&t| s.with_tax_credit(t).and_then(|st| assemble_menu(&st)))
        .collect();
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["tau", "theta", "qT", "qN"])?;
    for (&tau, m) in taus.iter().zip(menus) {
        let m = m?;
        for (i, &x) in m.grid().iter().enumerate() {
            w.write_record([
                fmt_sig(tau),
                fmt_sig(x),
                fmt_sig(m.node_quantities(Group::Trait)[i]),
                fmt_sig(m.node_quantities(Group::NonTrait)[i]),
            ])?;
        }
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}

/// θ, then qT, qN and U^N − U^T before any transfer for each stylized design.
pub fn candidate_curves(s: &Scenario) -> Result<String> {
    let cands = build_candidate_menus(s)?;
    let mut header = vec!["theta".to_string()];
    for c in &cands {
        for col in ["qT", "qN", "violation"] {
            header.push(format!("{}_{col}", c.kind.label()));
        }
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&header)?;
    let grid = &cands[0].menu.theta;
    for (i, &x) in grid.iter().enumerate() {
        let mut rec = vec![fmt_sig(x)];
        for c in &cands {
            rec.push(fmt_sig(c.menu.q_trait[i]));
            rec.push(fmt_sig(c.menu.q_nontrait[i]));
            rec.push(fmt_sig(c.violation_without_transfer[i]));
        }
        w.write_record(&rec)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}

pub fn cmd_curves(config: &Path, out_dir: &Path) -> Outcome {
    let run = || -> Result<Outcome> {
        let (_, s) = load(config)?;
        let quantities = quantity_curves(&s, &CURVE_TAX_CREDITS)?;
        let candidates = candidate_curves(&s)?;
        fs::create_dir_all(out_dir)?;
        let files: [(PathBuf, String); 2] =
            [(out_dir.join("quantities.csv"), quantities), (out_dir.join("candidates.csv"), candidates)];
        let mut stdout = String::new();
        for (path, text) in &files {
            fs::write(path, text)?;
            writeln!(stdout, "wrote {}", path.display()).ok();
        }
        Ok(Outcome::ok(stdout))
    };
    run().unwrap_or_else(|e| Outcome::failed(&e))
}
