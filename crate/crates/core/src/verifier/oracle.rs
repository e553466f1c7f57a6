//! Pointwise first-order conditions solved without the solver's code path.

use crate::distributions::{default_check_grid, satisfies_mlrp, OrderingRegime};
use crate::error::{Error, Result};
use crate::quadrature::Rule;
use crate::roots::illinois;
use crate::scenario::{Group, Scenario};

/// Quantities from P = k·(C_q + ρ·C_qθ) at each node.
#[derive(Debug, Clone)]
pub struct FocOracle {
    pub theta: Vec<f64>,
    pub q_trait: Vec<f64>,
    pub q_nontrait: Vec<f64>,
}

impl FocOracle {
    pub fn q(&self, group: Group) -> &[f64] {
        match group {
            Group::Trait => &self.q_trait,
            Group::NonTrait => &self.q_nontrait,
        }
    }
}

/// Solves the group's first-order condition at θ. The bracket grows by
/// doubling until the residual changes sign.
pub(crate) fn foc_quantity(s: &Scenario, group: Group, theta: f64, tol: f64) -> f64 {
    let cost = s.cost();
    let k = s.wage_weight(group);
    let rho = s.distribution(group).reverse_hazard_ratio(theta);
    let residual = |q: f64| s.price() - k * (cost.c_q(q, theta) + rho * cost.c_qtheta(q, theta));
    if residual(0.0) <= 0.0 {
        return 0.0;
    }
    let mut hi = 1.0;
    while residual(hi) > 0.0 {
        hi *= 2.0;
        if hi > 1e12 {
            return f64::NAN;
        }
    }
    // residual is decreasing in q; flip it for the increasing-root solver
    illinois(|q| -residual(q), 0.0, hi, tol).max(0.0)
}

/// Independent schedules for an MLRP scenario on `grid`.
pub fn mlrp_foc_oracle(s: &Scenario, grid: &[f64]) -> Result<FocOracle> {
    let t = s.distribution(Group::Trait);
    let n = s.distribution(Group::NonTrait);
    if !satisfies_mlrp(t, n, &default_check_grid())? {
        return Err(Error::RegimeMismatch {
            expected: OrderingRegime::Mlrp,
            found: s.ordering()?,
        });
    }
    let tol = 1e-13;
    let col = |g: Group| grid.iter().map(|&x| foc_quantity(s, g, x, tol)).collect();
    Ok(FocOracle {
        theta: grid.to_vec(),
        q_trait: col(Group::Trait),
        q_nontrait: col(Group::NonTrait),
    })
}

/// share·∫ [P·q − k·(C + ρ·C_θ)] dF for one group under a separating
/// schedule `q`, integrated over u = F(θ) with composite Gauss–Legendre.
pub fn one_group_profit<Q: Fn(f64) -> f64>(s: &Scenario, group: Group, q: Q) -> f64 {
    let d = s.distribution(group);
    let k = s.wage_weight(group);
    let cost = s.cost();
    let rule = Rule::new(8);
    let integral = rule.integrate_uniform(0.0, 1.0, 2000, |u| {
        let x = d.quantile(u);
        let qx = q(x);
        if qx <= 0.0 {
            return 0.0;
        }
        s.price() * qx - k * (cost.cost(qx, x) + d.reverse_hazard_ratio(x) * cost.c_theta(qx, x))
    });
    s.share(group) * integral
}
