//! Independent certification of menus.

mod gradient;
mod candidates;
mod constrained;
mod constraints;
mod oracle;
mod perturbation;

pub use gradient::{
    check_lambda, check_transfer_gradient, check_transfer_gradient_with_cells, pooled_xi, tax_credit_loss, xi, GradientPoint,
    TransferGradientReport, GRADIENT_CELLS, THREE_CHANNEL_TOL, TRANSFER_STEP,
};
pub use candidates::{
    build_candidate_menus, build_candidate_menus_with_split, check_no_other_pooling, default_split, Candidate,
    CandidateKind,
};
pub use constrained::{ConstrainedSolution, TransferConstrainedProblem};
pub use constraints::{
    check_across_group_ic, check_ir, check_monotonicity, check_within_group_ic, verification_grid, ContractTable,
};
pub use oracle::{mlrp_foc_oracle, one_group_profit, FocOracle};
pub use perturbation::{perturbation_test, PerturbationOutcome};

use serde::Serialize;

use crate::menu::{ContractMenu, MenuView};
use crate::scenario::{Group, Scenario, VerifyConfig};
use crate::solver::{assemble_menu, principal_objective, OptimalMenu};

/// Tolerance for the constraint oracles.
pub const CONSTRAINT_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Witness {
    pub theta: f64,
    pub theta_prime: Option<f64>,
    pub group: Option<Group>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckEntry {
    pub name: String,
    pub pass: bool,
    /// Largest amount by which the condition fails; zero when it holds.
    pub worst_violation: f64,
    pub witness: Option<Witness>,
    pub detail: Option<String>,
}

impl CheckEntry {
    pub fn new(name: &str, worst: f64, tol: f64, witness: Option<Witness>) -> Self {
        let worst = if worst.is_nan() { f64::INFINITY } else { worst.max(0.0) };
        CheckEntry {
            name: name.to_string(),
            pass: worst <= tol,
            worst_violation: worst,
            witness,
            detail: None,
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }
}

/// Constraint entries decide the verdict; diagnostics are informational.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub overall_pass: bool,
    pub entries: Vec<CheckEntry>,
    pub diagnostics: Vec<CheckEntry>,
}

impl VerificationReport {
    pub fn new(entries: Vec<CheckEntry>, diagnostics: Vec<CheckEntry>) -> Self {
        VerificationReport {
            overall_pass: entries.iter().all(|e| e.pass),
            entries,
            diagnostics,
        }
    }

    pub fn entry(&self, name: &str) -> Option<&CheckEntry> {
        self.entries.iter().chain(&self.diagnostics).find(|e| e.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// The four constraint checks on a contract table.
pub fn constraint_entries(table: &ContractTable, transfer: f64, tol: f64) -> Vec<CheckEntry> {
    vec![
        check_within_group_ic(table, tol),
        check_across_group_ic(table, tol),
        check_ir(table, transfer, tol),
        check_monotonicity(table, tol),
    ]
}

/// Full suite for a solved menu, on an independent 200-point grid.
pub fn verify_solution(menu: &OptimalMenu, config: &VerifyConfig) -> VerificationReport {
    let s = menu.scenario();
    let table = ContractTable::sample(menu, s.cost(), &verification_grid(200));
    let entries = constraint_entries(&table, menu.transfer(), CONSTRAINT_TOL);
    let sampled = menu.to_contract_menu();
    VerificationReport::new(entries, diagnostics(&sampled, s, Some(menu), config))
}

/// Full suite for a menu read from disk, checked on its own nodes.
pub fn verify_contract_menu(menu: &ContractMenu, s: &Scenario, config: &VerifyConfig) -> VerificationReport {
    let table = ContractTable::from_menu(menu, s.cost());
    let entries = constraint_entries(&table, menu.transfer, CONSTRAINT_TOL);
    let solved = assemble_menu(s).ok();
    VerificationReport::new(entries, diagnostics(menu, s, solved.as_ref(), config))
}

fn diagnostics(menu: &ContractMenu, s: &Scenario, solved: Option<&OptimalMenu>, config: &VerifyConfig) -> Vec<CheckEntry> {
    let rule = crate::quadrature::Rule::new(s.tolerances().quad_order);
    let mut out = Vec::new();
    let (needed, at) = crate::solver::required_transfer(&menu.schedule(), &menu.theta, s.cost(), &rule);
    out.push(
        CheckEntry::new(
            "transfer_covers_required",
            needed - menu.transfer,
            CONSTRAINT_TOL,
            Some(Witness {
                theta: at,
                theta_prime: None,
                group: Some(Group::Trait),
            }),
        )
        .with_detail(format!("required transfer {needed:.9e}, menu transfer {:.9e}", menu.transfer)),
    );
    let objective = principal_objective(menu, s);
    if let Some(opt) = solved {
        let best = principal_objective(&opt.to_contract_menu(), s);
        out.push(
            CheckEntry::new("objective_vs_solver", objective - best - 1e-6, 0.0, None)
                .with_detail(format!("menu objective {objective:.9e}, solver objective {best:.9e}")),
        );
    }
    if let Ok(cands) = build_candidate_menus(s) {
        let best = cands.iter().map(|c| c.objective).fold(f64::NEG_INFINITY, f64::max);
        out.push(
            CheckEntry::new("objective_vs_candidates", best - objective, 1e-6, None)
                .with_detail(format!("best stylized candidate {best:.9e}, menu {objective:.9e}")),
        );
    }
    let pert = perturbation_test(menu, s, config.perturbations, config.epsilon, config.seed, 1e-6);
    out.push(pert.entry);
    out
}
