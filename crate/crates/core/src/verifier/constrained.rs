//! The principal's problem with the top trait utility U^T(1) pinned at a
//! given transfer, solved through its dual.
//!
//! Quantities are constant on n uniform cells. With Δr_i = C_θ(q^T_i) −
//! C_θ(q^N_i), across-group compatibility reads Ū + Σ_{i≥j} h·Δr_i ≥ 0 for
//! every j. Summing the multipliers from the left gives a non-decreasing
//! profile M ≥ 0, so the dual is an isotonic problem over separable convex
//! cell terms and pool-adjacent-violators solves it exactly.

use crate::error::Result;
use crate::roots::{illinois, newton_bisect};
use crate::scenario::Scenario;

const MULTIPLIER_CAP: f64 = 10.0;

#[derive(Debug, Clone)]
pub struct TransferConstrainedProblem<'a> {
    s: &'a Scenario,
    width: f64,
    mids: Vec<f64>,
    mass_trait: Vec<f64>,
    mass_nontrait: Vec<f64>,
    cdf_area_trait: Vec<f64>,
    cdf_area_nontrait: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct ConstrainedSolution {
    pub transfer: f64,
    /// Primal objective at the recovered quantities.
    pub objective: f64,
    pub dual_objective: f64,
    /// Cumulative multiplier per cell; the last entry is ∂J/∂Ū net of the
    /// direct transfer cost.
    pub multipliers: Vec<f64>,
    pub cell_mids: Vec<f64>,
    pub q_trait: Vec<f64>,
    pub q_nontrait: Vec<f64>,
    /// Left edge of the top block of constant multiplier, when the
    /// constraint binds anywhere.
    pub boundary: Option<f64>,
    /// Smallest Ū + R^T − R^N over cell edges.
    pub min_slack: f64,
    transfer_cost: f64,
}

impl ConstrainedSolution {
    /// dJ/dŪ from the multipliers.
    pub fn derivative(&self) -> f64 {
        -self.transfer_cost + self.multipliers.last().copied().unwrap_or(0.0)
    }

    pub fn duality_gap(&self) -> f64 {
        self.dual_objective - self.objective
    }
}

struct Block {
    start: usize,
    end: usize,
    value: f64,
}

impl<'a> TransferConstrainedProblem<'a> {
    pub fn new(s: &'a Scenario, cells: usize) -> Result<Self> {
        if cells < 2 {
            return Err(crate::error::Error::input("cells", "need at least two cells"));
        }
        let h = 1.0 / cells as f64;
        let edges: Vec<f64> = (0..=cells).map(|i| if i == cells { 1.0 } else { i as f64 * h }).collect();
        let t = s.distribution(crate::scenario::Group::Trait);
        let n = s.distribution(crate::scenario::Group::NonTrait);
        let per_cell = |f: &dyn Fn(f64, f64) -> f64| edges.windows(2).map(|w| f(w[0], w[1])).collect::<Vec<_>>();
        Ok(TransferConstrainedProblem {
            s,
            width: h,
            mids: edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect(),
            mass_trait: per_cell(&|a, b| t.cdf(b) - t.cdf(a)),
            mass_nontrait: per_cell(&|a, b| n.cdf(b) - n.cdf(a)),
            cdf_area_trait: per_cell(&|a, b| t.cdf_integral(a, b)),
            cdf_area_nontrait: per_cell(&|a, b| n.cdf_integral(a, b)),
        })
    }

    pub fn cells(&self) -> usize {
        self.mids.len()
    }

    fn bracket<F: Fn(f64) -> f64>(foc: &F) -> f64 {
        let mut hi = 1.0;
        while foc(hi) > 0.0 && hi < 1e12 {
            hi *= 2.0;
        }
        hi
    }

    /// Maximizer of the trait part of the cell Lagrangian at multiplier m.
    fn trait_quantity(&self, i: usize, m: f64) -> f64 {
        let s = self.s;
        let cost = s.cost();
        let x = self.mids[i];
        let (k, pi) = (1.0 - s.tax_credit(), s.trait_share());
        let (df, g, h) = (self.mass_trait[i], self.cdf_area_trait[i], self.width);
        let foc = |q: f64| pi * df * (s.price() - k * cost.c_q(q, x)) - k * pi * g * cost.c_qtheta(q, x) + m * h * cost.c_qtheta(q, x);
        let slope = |q: f64| -pi * df * k * cost.c_qq(q, x) + (m * h - k * pi * g) * cost.c_qqtheta(q, x);
        let hi = Self::bracket(&foc);
        newton_bisect(|q| (-foc(q), -slope(q)), 0.0, hi, 1e-14).max(0.0)
    }

    fn nontrait_quantity(&self, i: usize, m: f64) -> f64 {
        let s = self.s;
        let cost = s.cost();
        let x = self.mids[i];
        let pi = 1.0 - s.trait_share();
        let (df, g, h) = (self.mass_nontrait[i], self.cdf_area_nontrait[i], self.width);
        let foc = |q: f64| pi * (df * (s.price() - cost.c_q(q, x)) - g * cost.c_qtheta(q, x)) - m * h * cost.c_qtheta(q, x);
        let slope = |q: f64| -pi * df * cost.c_qq(q, x) - (pi * g + m * h) * cost.c_qqtheta(q, x);
        let hi = Self::bracket(&foc);
        newton_bisect(|q| (-foc(q), -slope(q)), 0.0, hi, 1e-14).max(0.0)
    }

    /// h·Δr_i at the cell maximizer for multiplier m.
    fn rent_gap(&self, i: usize, m: f64) -> f64 {
        let cost = self.s.cost();
        let x = self.mids[i];
        let qt = self.trait_quantity(i, m);
        let qn = self.nontrait_quantity(i, m);
        self.width * (cost.c_theta(qt, x) - cost.c_theta(qn, x))
    }

    /// Primal payoff of cell i, without the transfer.
    fn cell_payoff(&self, i: usize, qt: f64, qn: f64) -> f64 {
        let s = self.s;
        let cost = s.cost();
        let x = self.mids[i];
        let (k, pi) = (1.0 - s.tax_credit(), s.trait_share());
        let trait_part = self.mass_trait[i] * (s.price() * qt - k * cost.cost(qt, x)) - k * self.cdf_area_trait[i] * cost.c_theta(qt, x);
        let non_part = self.mass_nontrait[i] * (s.price() * qn - cost.cost(qn, x)) - self.cdf_area_nontrait[i] * cost.c_theta(qn, x);
        pi * trait_part + (1.0 - pi) * non_part
    }

    /// Smallest multiplier in [lo, hi] at which the block's dual derivative
    /// turns non-negative.
    fn block_value(&self, start: usize, end: usize, transfer: f64, lo: f64, hi: f64) -> f64 {
        let last = self.cells() - 1;
        let d = |m: f64| {
            let sum: f64 = (start..=end).map(|i| self.rent_gap(i, m)).sum();
            if end == last {
                sum + transfer
            } else {
                sum
            }
        };
        let (mut lo, mut hi) = (lo.max(0.0), hi.min(MULTIPLIER_CAP));
        if d(lo) >= 0.0 {
            if lo == 0.0 {
                return 0.0;
            }
            // stale bracket; widen to the full range
            lo = 0.0;
            if d(0.0) >= 0.0 {
                return 0.0;
            }
        }
        if d(hi) < 0.0 {
            hi = MULTIPLIER_CAP;
            if d(hi) < 0.0 {
                return MULTIPLIER_CAP;
            }
        }
        illinois(d, lo, hi, 1e-14)
    }

    pub fn solve(&self, transfer: f64) -> ConstrainedSolution {
        let n = self.cells();
        let mut blocks: Vec<Block> = Vec::with_capacity(n);
        for i in 0..n {
            let mut cur = Block {
                start: i,
                end: i,
                value: self.block_value(i, i, transfer, 0.0, MULTIPLIER_CAP),
            };
            while let Some(prev) = blocks.last() {
                if prev.value <= cur.value {
                    break;
                }
                let prev = blocks.pop().expect("non-empty");
                let (lo, hi) = (cur.value, prev.value);
                cur = Block {
                    start: prev.start,
                    end: cur.end,
                    value: self.block_value(prev.start, cur.end, transfer, lo, hi),
                };
            }
            blocks.push(cur);
        }

        let mut multipliers = vec![0.0; n];
        for b in &blocks {
            multipliers[b.start..=b.end].iter_mut().for_each(|m| *m = b.value);
        }
        let q_trait: Vec<f64> = (0..n).map(|i| self.trait_quantity(i, multipliers[i])).collect();
        let q_nontrait: Vec<f64> = (0..n).map(|i| self.nontrait_quantity(i, multipliers[i])).collect();

        let transfer_cost = (1.0 - self.s.tax_credit()) * self.s.trait_share();
        let cost = self.s.cost();
        let mut payoff = 0.0;
        let mut lagrangian = 0.0;
        let mut tail = 0.0;
        let mut min_slack = f64::INFINITY;
        for i in (0..n).rev() {
            let x = self.mids[i];
            let gap = self.width * (cost.c_theta(q_trait[i], x) - cost.c_theta(q_nontrait[i], x));
            let p = self.cell_payoff(i, q_trait[i], q_nontrait[i]);
            payoff += p;
            lagrangian += p + multipliers[i] * gap;
            tail += gap;
            min_slack = min_slack.min(transfer + tail);
        }
        let top = multipliers[n - 1];
        let boundary = (top > 0.0).then(|| self.mids[blocks.last().expect("non-empty").start] - 0.5 * self.width);
        ConstrainedSolution {
            transfer,
            objective: payoff - transfer_cost * transfer,
            dual_objective: lagrangian + top * transfer - transfer_cost * transfer,
            multipliers,
            cell_mids: self.mids.clone(),
            q_trait,
            q_nontrait,
            boundary,
            min_slack,
            transfer_cost,
        }
    }
}
