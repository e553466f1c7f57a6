//! Stylized comparison menus: full separation, the two single-split
//! hybrids, and full pooling, each made feasible by its own transfer.

use serde::Serialize;

use super::{CheckEntry, Witness};
use crate::error::Result;
use crate::isotonic::{node_weights, project_non_increasing};
use crate::menu::{ContractMenu, RentProfile};
use crate::quadrature::Rule;
use crate::scenario::{Group, Scenario};
use crate::solver::{
    hiring_cutoff, pooled_hiring_cutoff, pooling_quantity, principal_objective, separating_quantity, solve_grid,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CandidateKind {
    /// Each group on its own separating schedule.
    FullSeparation,
    /// One pooled contract below the split, separation above.
    PoolLowSeparateHigh,
    /// Separation below the split, pooling above.
    SeparateLowPoolHigh,
    /// One pooled schedule everywhere.
    FullPooling,
}

impl CandidateKind {
    pub fn label(&self) -> &'static str {
        match self {
            CandidateKind::FullSeparation => "full_separation",
            CandidateKind::PoolLowSeparateHigh => "pool_low_separate_high",
            CandidateKind::SeparateLowPoolHigh => "separate_low_pool_high",
            CandidateKind::FullPooling => "full_pooling",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Candidate {
    pub kind: CandidateKind,
    pub split: Option<f64>,
    pub menu: ContractMenu,
    /// Transfer that makes the candidate across-group compatible.
    pub transfer: f64,
    pub objective: f64,
    /// U^N(θ) − U^T(θ) at each node before any transfer is paid.
    pub violation_without_transfer: Vec<f64>,
}

/// Half of the larger separating hiring cutoff.
pub fn default_split(s: &Scenario) -> Result<f64> {
    let t = hiring_cutoff(s, Group::Trait)?;
    let n = hiring_cutoff(s, Group::NonTrait)?;
    Ok(0.5 * t.max(n))
}

struct Pieces {
    grid: Vec<f64>,
    sep_trait: Vec<f64>,
    sep_nontrait: Vec<f64>,
    pooled: Vec<f64>,
}

fn pieces(s: &Scenario, splits: &[f64]) -> Result<Pieces> {
    let mut breaks = splits.to_vec();
    breaks.push(hiring_cutoff(s, Group::Trait)?);
    breaks.push(hiring_cutoff(s, Group::NonTrait)?);
    breaks.push(pooled_hiring_cutoff(s, 0.0));
    let grid = solve_grid(s.tolerances().grid_size, &breaks);
    let col = |f: &dyn Fn(f64) -> Result<f64>| grid.iter().map(|&x| f(x)).collect::<Result<Vec<f64>>>();
    Ok(Pieces {
        sep_trait: col(&|x| separating_quantity(s, Group::Trait, x))?,
        sep_nontrait: col(&|x| separating_quantity(s, Group::NonTrait, x))?,
        pooled: col(&|x| pooling_quantity(s, x))?,
        grid,
    })
}

fn finish(s: &Scenario, kind: CandidateKind, split: Option<f64>, grid: Vec<f64>, qt: Vec<f64>, qn: Vec<f64>) -> Candidate {
    let weights = node_weights(&grid);
    let clamp = |v: Vec<f64>| v.into_iter().map(|x| x.max(0.0)).collect::<Vec<_>>();
    let qt = clamp(project_non_increasing(&qt, &weights));
    let qn = clamp(project_non_increasing(&qn, &weights));
    let rule = Rule::new(s.tolerances().quad_order);
    let zero = ContractMenu::from_quantities(grid, qt, qn, 0.0, s.cost(), &rule);
    let rents = RentProfile::compute(&zero.schedule(), &zero.theta, s.cost(), &rule);
    let (transfer, _) = rents.required_transfer();
    let violation_without_transfer = rents.difference();
    let menu = ContractMenu::from_quantities(zero.theta, zero.q_trait, zero.q_nontrait, transfer, s.cost(), &rule);
    let objective = principal_objective(&menu, s);
    Candidate {
        kind,
        split,
        menu,
        transfer,
        objective,
        violation_without_transfer,
    }
}

fn split_schedule(p: &Pieces, split: f64, pool_low: bool) -> (Vec<f64>, Vec<f64>) {
    let pick = |sep: &[f64]| {
        p.grid
            .iter()
            .enumerate()
            .map(|(i, &x)| if (x < split) == pool_low { p.pooled[i] } else { sep[i] })
            .collect::<Vec<f64>>()
    };
    (pick(&p.sep_trait), pick(&p.sep_nontrait))
}

/// The four stylized designs, with the hybrids split at `split`.
pub fn build_candidate_menus_with_split(s: &Scenario, split: f64) -> Result<Vec<Candidate>> {
    let p = pieces(s, &[split])?;
    let mut out = Vec::with_capacity(4);
    out.push(finish(s, CandidateKind::FullSeparation, None, p.grid.clone(), p.sep_trait.clone(), p.sep_nontrait.clone()));
    let (t, n) = split_schedule(&p, split, true);
    out.push(finish(s, CandidateKind::PoolLowSeparateHigh, Some(split), p.grid.clone(), t, n));
    let (t, n) = split_schedule(&p, split, false);
    out.push(finish(s, CandidateKind::SeparateLowPoolHigh, Some(split), p.grid.clone(), t, n));
    out.push(finish(s, CandidateKind::FullPooling, None, p.grid.clone(), p.pooled.clone(), p.pooled.clone()));
    Ok(out)
}

pub fn build_candidate_menus(s: &Scenario) -> Result<Vec<Candidate>> {
    build_candidate_menus_with_split(s, default_split(s)?)
}

/// Every pool-low/separate-high design over a family of splits either
/// breaks across-group compatibility without a transfer, or once its
/// transfer is paid, earns less than full pooling.
pub fn check_no_other_pooling(s: &Scenario, splits: &[f64], tol: f64) -> Result<CheckEntry> {
    let p = pieces(s, splits)?;
    let pooled = finish(s, CandidateKind::FullPooling, None, p.grid.clone(), p.pooled.clone(), p.pooled.clone());
    let mut worst = f64::NEG_INFINITY;
    let mut witness = None;
    let mut breaking = 0;
    for &b in splits {
        let (t, n) = split_schedule(&p, b, true);
        let c = finish(s, CandidateKind::PoolLowSeparateHigh, Some(b), p.grid.clone(), t, n);
        let violates = c.violation_without_transfer.iter().any(|&v| v > tol);
        if violates {
            breaking += 1;
        }
        // margin by which the candidate beats pooling; ≤ 0 is fine
        let margin = if violates { f64::NEG_INFINITY } else { c.objective - pooled.objective };
        if margin > worst || witness.is_none() {
            worst = margin;
            witness = Some(Witness {
                theta: b,
                theta_prime: None,
                group: None,
            });
        }
    }
    Ok(CheckEntry::new("no_other_pooling", worst, 0.0, witness).with_detail(format!(
        "{breaking} of {} splits violate across-group compatibility without a transfer",
        splits.len()
    )))
}
