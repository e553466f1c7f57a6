//! Discretized incentive, participation, and monotonicity oracles.

use super::{CheckEntry, Witness};
use crate::cost::CostModel;
use crate::menu::{ContractMenu, MenuView};
use crate::scenario::Group;

/// `n` points: both endpoints plus interior points at a golden-ratio offset,
/// so none coincides with a uniform solve grid.
pub fn verification_grid(n: usize) -> Vec<f64> {
    let n = n.max(3);
    let offset = 0.381_966_011_250_105_1;
    let interior = n - 2;
    let mut g = Vec::with_capacity(n);
    g.push(0.0);
    g.extend((0..interior).map(|k| (k as f64 + offset) / interior as f64));
    g.push(1.0);
    g
}

/// Contracts offered at each grid type, with the cost model to price them.
pub struct ContractTable<'a> {
    pub theta: Vec<f64>,
    pub q_trait: Vec<f64>,
    pub q_nontrait: Vec<f64>,
    pub w_trait: Vec<f64>,
    pub w_nontrait: Vec<f64>,
    cost: &'a dyn CostModel,
}

impl<'a> ContractTable<'a> {
    pub fn sample(menu: &dyn MenuView, cost: &'a dyn CostModel, grid: &[f64]) -> Self {
        let col = |f: &dyn Fn(f64) -> f64| grid.iter().map(|&x| f(x)).collect::<Vec<_>>();
        ContractTable {
            theta: grid.to_vec(),
            q_trait: col(&|x| menu.quantity(Group::Trait, x)),
            q_nontrait: col(&|x| menu.quantity(Group::NonTrait, x)),
            w_trait: col(&|x| menu.wage(Group::Trait, x)),
            w_nontrait: col(&|x| menu.wage(Group::NonTrait, x)),
            cost,
        }
    }

    /// Uses the menu's own nodes, with no interpolation.
    pub fn from_menu(menu: &ContractMenu, cost: &'a dyn CostModel) -> Self {
        ContractTable {
            theta: menu.theta.clone(),
            q_trait: menu.q_trait.clone(),
            q_nontrait: menu.q_nontrait.clone(),
            w_trait: menu.w_trait.clone(),
            w_nontrait: menu.w_nontrait.clone(),
            cost,
        }
    }

    fn q(&self, g: Group) -> &[f64] {
        match g {
            Group::Trait => &self.q_trait,
            Group::NonTrait => &self.q_nontrait,
        }
    }

    fn w(&self, g: Group) -> &[f64] {
        match g {
            Group::Trait => &self.w_trait,
            Group::NonTrait => &self.w_nontrait,
        }
    }

    /// Utility of type θ_i taking the group `g` contract at node j.
    pub fn utility(&self, i: usize, g: Group, j: usize) -> f64 {
        self.w(g)[j] - self.cost.cost(self.q(g)[j], self.theta[i])
    }

    pub fn truthful(&self, g: Group) -> Vec<f64> {
        (0..self.theta.len()).map(|i| self.utility(i, g, i)).collect()
    }
}

fn pair_witness(table: &ContractTable, i: usize, j: usize, g: Group) -> Witness {
    Witness {
        theta: table.theta[i],
        theta_prime: Some(table.theta[j]),
        group: Some(g),
    }
}

/// No type gains by mimicking another type of its own group.
pub fn check_within_group_ic(table: &ContractTable, tol: f64) -> CheckEntry {
    let mut worst = 0.0;
    let mut witness = None;
    for g in Group::BOTH {
        let own = table.truthful(g);
        for i in 0..table.theta.len() {
            for j in 0..table.theta.len() {
                let gain = table.utility(i, g, j) - own[i];
                if gain > worst {
                    worst = gain;
                    witness = Some(pair_witness(table, i, j, g));
                }
            }
        }
    }
    CheckEntry::new("within_group_ic", worst, tol, witness)
}

/// No trait type gains by taking a non-trait contract.
pub fn check_across_group_ic(table: &ContractTable, tol: f64) -> CheckEntry {
    let own = table.truthful(Group::Trait);
    let mut worst = 0.0;
    let mut witness = None;
    for i in 0..table.theta.len() {
        for j in 0..table.theta.len() {
            let gain = table.utility(i, Group::NonTrait, j) - own[i];
            if gain > worst {
                worst = gain;
                witness = Some(pair_witness(table, i, j, Group::NonTrait));
            }
        }
    }
    CheckEntry::new("across_group_ic", worst, tol, witness)
}

/// Participation for every type, zero utility for the most costly
/// non-trait type, and U^T(1) equal to the promised transfer.
pub fn check_ir(table: &ContractTable, transfer: f64, tol: f64) -> CheckEntry {
    let mut worst = 0.0;
    let mut witness = None;
    let mut note = |v: f64, i: usize, g: Group| {
        if v > worst {
            worst = v;
            witness = Some(Witness {
                theta: table.theta[i],
                theta_prime: None,
                group: Some(g),
            });
        }
    };
    for g in Group::BOTH {
        for (i, u) in table.truthful(g).into_iter().enumerate() {
            note(-u, i, g);
        }
    }
    let last = table.theta.len() - 1;
    if table.theta[last] == 1.0 {
        note(table.utility(last, Group::NonTrait, last).abs(), last, Group::NonTrait);
        note((table.utility(last, Group::Trait, last) - transfer).abs(), last, Group::Trait);
    }
    CheckEntry::new("individual_rationality", worst, tol, witness)
}

/// Quantities non-increasing in θ for both groups.
pub fn check_monotonicity(table: &ContractTable, tol: f64) -> CheckEntry {
    let mut worst = 0.0;
    let mut witness = None;
    for g in Group::BOTH {
        let q = table.q(g);
        for i in 1..q.len() {
            let rise = q[i] - q[i - 1];
            if rise > worst {
                worst = rise;
                witness = Some(pair_witness(table, i - 1, i, g));
            }
        }
    }
    CheckEntry::new("monotonicity", worst, tol, witness)
}
