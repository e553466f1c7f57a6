//! Numeric counterparts of the multiplier argument behind Ū = 0 under
//! reverse MLRP: the accumulated multiplier Ξ, the efficiency weight Λ, the
//! tax-credit loss Δ, and the slope of the objective in the transfer.

use rayon::prelude::*;
use serde::Serialize;

use super::constrained::{ConstrainedSolution, TransferConstrainedProblem};
use super::{CheckEntry, Witness};
use crate::distributions::{classify_ordering, default_check_grid, satisfies_reverse_mlrp, mixture, OrderingRegime, TypeDistribution};
use crate::error::{Error, Result};
use crate::menu::QuantitySchedule;
use crate::scenario::{Group, Scenario};
use crate::solver::{assemble_menu, pooling_quantity, OptimalMenu};

/// Step for the finite-difference slope in Ū.
pub const TRANSFER_STEP: f64 = 1e-3;
/// Cells in the fixed-transfer problem.
pub const GRADIENT_CELLS: usize = 600;
/// Agreement required between the finite-difference slope and the
/// three-channel prediction at the pooling boundary.
pub const THREE_CHANNEL_TOL: f64 = 1e-2;

/// Where the first-order residual vanishes to this level, a 0·∞ product
/// at a singular density is read as zero.
const SINGULAR_RESIDUAL: f64 = 1e-8;

fn require_reverse(t: &TypeDistribution, n: &TypeDistribution) -> Result<()> {
    let grid = default_check_grid();
    if satisfies_reverse_mlrp(t, n, &grid)? {
        Ok(())
    } else {
        Err(Error::RegimeMismatch {
            expected: OrderingRegime::ReverseMlrp,
            found: classify_ordering(t, n, &grid)?,
        })
    }
}

/// Ξ^j(θ) along the solved path:
/// Ξ^T = π_T f^T((1−τ)C_q − P)/C_qθ + (1−τ)π_T F^T and
/// Ξ^N = (1−π_T) f^N(C_q − P)/C_qθ + (1−π_T)F^N.
pub fn xi(menu: &OptimalMenu, group: Group, theta: f64) -> f64 {
    let s = menu.scenario();
    let d = s.distribution(group);
    let k = s.wage_weight(group);
    let share = s.share(group);
    let q = menu.quantity(group, theta);
    let cost = s.cost();
    let residual = k * cost.c_q(q, theta) - s.price();
    let density = d.pdf(theta);
    let lead = if !density.is_finite() && residual.abs() <= SINGULAR_RESIDUAL {
        0.0
    } else {
        share * density * residual / cost.c_qtheta(q, theta)
    };
    lead + k * share * d.cdf(theta)
}

/// Λ ≤ tol and non-increasing up to tol on the grid.
pub fn check_lambda(
    d_trait: &TypeDistribution,
    d_non: &TypeDistribution,
    trait_share: f64,
    grid: &[f64],
    tol: f64,
) -> Result<CheckEntry> {
    require_reverse(d_trait, d_non)?;
    let m = mixture(d_trait, d_non, trait_share, 0.0)?;
    let values: Vec<f64> = grid.iter().map(|&x| m.lambda(x)).collect();
    let mut worst = f64::NEG_INFINITY;
    let mut at = grid.first().copied().unwrap_or(0.0);
    for (i, &v) in values.iter().enumerate() {
        if v > worst {
            worst = v;
            at = grid[i];
        }
        if i > 0 && v - values[i - 1] > worst {
            worst = v - values[i - 1];
            at = grid[i];
        }
    }
    let witness = Witness {
        theta: at,
        theta_prime: None,
        group: None,
    };
    let last = values.last().copied().unwrap_or(0.0);
    Ok(CheckEntry::new("lambda_non_positive_non_increasing", worst, tol, Some(witness))
        .with_detail(format!("Λ at the last grid point {last:.9e}")))
}

/// Ξ^T at a pooled point: (1−τ)(f̂/f̃)|Λ| + Δ.
pub fn pooled_xi(s: &Scenario, theta: f64) -> f64 {
    let m = s.mixture();
    let tau = s.tax_credit();
    // f̂/f̃ through the trait weight, finite even where a density is not
    (1.0 - tau) * m.price_ratio(theta) * m.lambda(theta).abs() + tax_credit_loss(s, theta)
}

/// Δ(θ) = −π_T(1−π_T)τ·P / (C_qθ·((1−τ)π_T/f^N + (1−π_T)/f^T)) at the
/// pooled quantity.
pub fn tax_credit_loss(s: &Scenario, theta: f64) -> f64 {
    let tau = s.tax_credit();
    if tau == 0.0 {
        return 0.0;
    }
    let p = s.trait_share();
    let ft = s.distribution(Group::Trait).pdf(theta);
    let fnn = s.distribution(Group::NonTrait).pdf(theta);
    let q = pooling_quantity(s, theta).unwrap_or(0.0);
    let denom = s.cost().c_qtheta(q, theta) * ((1.0 - tau) * p / fnn + (1.0 - p) / ft);
    if denom > 0.0 && denom.is_finite() {
        -p * (1.0 - p) * tau * s.price() / denom
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GradientPoint {
    pub transfer: f64,
    pub objective: f64,
    /// Finite-difference dJ/dŪ; forward at Ū = 0, centered elsewhere.
    pub finite_difference: f64,
    /// −(1−τ)π_T plus the top cumulative multiplier.
    pub multiplier_slope: f64,
    /// Start of the separating top region, when pooling remains below it.
    pub boundary: Option<f64>,
    /// −(1−τ)π_T + (1−τ)(f̂/f̃)|Λ| + Δ at the boundary.
    pub predicted: f64,
    pub duality_gap: f64,
    pub min_slack: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TransferGradientReport {
    pub theta: Vec<f64>,
    pub xi_trait: Vec<f64>,
    pub xi_nontrait: Vec<f64>,
    pub lambda: Vec<f64>,
    pub delta: Vec<f64>,
    pub xi_at_zero: f64,
    /// Ξ^T at the last hired trait type, standing in for Ξ^T(1).
    pub xi_at_top: f64,
    pub top_theta: f64,
    /// Both groups are hired below this type.
    pub hired_until: f64,
    pub bound: f64,
    pub points: Vec<GradientPoint>,
}

impl TransferGradientReport {
    /// Samples strictly inside the region where both groups are hired.
    fn hired(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.theta.len()).filter(move |&i| self.theta[i] < self.hired_until)
    }

    pub fn entries(&self) -> Vec<CheckEntry> {
        let at = |theta: f64| {
            Some(Witness {
                theta,
                theta_prime: None,
                group: Some(Group::Trait),
            })
        };
        let mut out = vec![CheckEntry::new("xi_trait_at_zero", self.xi_at_zero.abs(), 1e-8, at(0.0))];

        let (mut drop, mut drop_at) = (0.0, 0.0);
        let (mut sum, mut sum_at) = (0.0, 0.0);
        let mut prev: Option<f64> = None;
        for i in self.hired() {
            let x = self.xi_trait[i];
            if let Some(p) = prev {
                if p - x > drop {
                    drop = p - x;
                    drop_at = self.theta[i];
                }
            }
            prev = Some(x);
            let scale = 1.0 + self.xi_trait[i].abs().max(self.xi_nontrait[i].abs());
            let s = (self.xi_trait[i] + self.xi_nontrait[i]).abs() / scale;
            if s > sum {
                sum = s;
                sum_at = self.theta[i];
            }
        }
        out.push(CheckEntry::new("xi_trait_non_decreasing", drop, 1e-7, at(drop_at)));
        out.push(CheckEntry::new("xi_sum_zero", sum, 1e-6, at(sum_at)));
        // strict inequalities: a zero margin fails
        let strict = |name: &str, v: f64, witness: Option<Witness>| {
            let mut e = CheckEntry::new(name, v, 0.0, witness);
            e.pass = v < 0.0;
            e
        };
        out.push(
            strict("xi_top_below_bound", self.xi_at_top - self.bound, at(self.top_theta))
                .with_detail(format!("Ξ^T = {:.9e}, bound {:.9e}", self.xi_at_top, self.bound)),
        );
        let worst_slope = self.points.iter().map(|p| p.finite_difference).fold(f64::NEG_INFINITY, f64::max);
        out.push(strict("transfer_gradient_negative", worst_slope, None));
        let (mut delta, mut delta_at) = (0.0, 0.0);
        for (i, &d) in self.delta.iter().enumerate() {
            if d > delta {
                delta = d;
                delta_at = self.theta[i];
            }
        }
        out.push(CheckEntry::new("tax_credit_loss_non_positive", delta, 0.0, at(delta_at)));
        out.push(CheckEntry::new("three_channel_identity", self.three_channel_error(), THREE_CHANNEL_TOL, None));
        out
    }

    /// Largest |finite difference − prediction| over the Ū grid.
    pub fn three_channel_error(&self) -> f64 {
        self.points
            .iter()
            .map(|p| (p.finite_difference - p.predicted).abs())
            .fold(0.0, f64::max)
    }

    pub fn pass(&self) -> bool {
        self.entries().iter().all(|e| e.pass)
    }
}

/// Samples Ξ, Λ, and Δ along the solved menu, then re-solves the
/// fixed-transfer problem around each Ū in `transfers`.
pub fn check_transfer_gradient(s: &Scenario, transfers: &[f64]) -> Result<TransferGradientReport> {
    check_transfer_gradient_with_cells(s, transfers, GRADIENT_CELLS)
}

pub fn check_transfer_gradient_with_cells(s: &Scenario, transfers: &[f64], cells: usize) -> Result<TransferGradientReport> {
    require_reverse(s.distribution(Group::Trait), s.distribution(Group::NonTrait))?;
    let menu = assemble_menu(s)?;
    let theta: Vec<f64> = crate::distributions::uniform_grid(0.0, 1.0, 1001);
    let m = s.mixture();
    let top_theta = menu.hiring_cutoff(Group::Trait).min(1.0);
    let hired_until = top_theta.min(menu.hiring_cutoff(Group::NonTrait));
    let bound = (1.0 - s.tax_credit()) * s.trait_share();

    let problem = TransferConstrainedProblem::new(s, cells)?;
    let mut probes: Vec<f64> = Vec::new();
    for &u in transfers {
        if u < 0.0 || !u.is_finite() {
            return Err(Error::input("transfers", format!("must be finite and non-negative, got {u}")));
        }
        probes.push(u);
        probes.push(u + TRANSFER_STEP);
        if u >= TRANSFER_STEP {
            probes.push(u - TRANSFER_STEP);
        }
    }
    probes.sort_by(f64::total_cmp);
    probes.dedup();
    let solved: Vec<ConstrainedSolution> = probes.par_iter().map(|&u| problem.solve(u)).collect();
    let find = |u: f64| {
        let k = probes.partition_point(|&p| p < u);
        &solved[k]
    };
    let points = transfers
        .iter()
        .map(|&u| {
            let here = find(u);
            let up = find(u + TRANSFER_STEP);
            let finite_difference = if u >= TRANSFER_STEP {
                (up.objective - find(u - TRANSFER_STEP).objective) / (2.0 * TRANSFER_STEP)
            } else {
                (up.objective - here.objective) / TRANSFER_STEP
            };
            let predicted = -bound + here.boundary.map_or(0.0, |b| pooled_xi(s, b));
            GradientPoint {
                transfer: u,
                objective: here.objective,
                finite_difference,
                multiplier_slope: here.derivative(),
                boundary: here.boundary,
                predicted,
                duality_gap: here.duality_gap(),
                min_slack: here.min_slack,
            }
        })
        .collect();

    Ok(TransferGradientReport {
        xi_trait: theta.iter().map(|&x| xi(&menu, Group::Trait, x)).collect(),
        xi_nontrait: theta.iter().map(|&x| xi(&menu, Group::NonTrait, x)).collect(),
        lambda: theta.iter().map(|&x| m.lambda(x)).collect(),
        delta: theta.iter().map(|&x| tax_credit_loss(s, x)).collect(),
        xi_at_zero: xi(&menu, Group::Trait, 0.0),
        xi_at_top: xi(&menu, Group::Trait, top_theta),
        top_theta,
        hired_until,
        bound,
        points,
        theta,
    })
}
