//! The optimal menu: separating and pooled quantities, cutoffs, wages, and
//! the principal's objective.

use crate::cost::{virtual_marginal_cost, CostModel};
use crate::distributions::{satisfies_reverse_mlrp, default_check_grid, OrderingRegime};
use crate::error::{Error, Result};
use crate::menu::{ContractMenu, MenuRegime, MenuView, QuantitySchedule, Region, RentProfile};
use crate::quadrature::Rule;
use crate::roots;
use crate::scenario::{Group, Scenario};

/// Root of Ψ(q, θ; ρ) = price on [0, q_max], or 0 when Ψ(0) already
/// reaches the price. `Err` carries Ψ − price at both ends.
pub(crate) fn virtual_cost_root(
    cost: &dyn CostModel,
    theta: f64,
    rho: f64,
    price: f64,
    q_max: f64,
    tol: f64,
) -> std::result::Result<f64, Error> {
    let f_lo = virtual_marginal_cost(cost, 0.0, theta, rho) - price;
    if f_lo >= 0.0 {
        return Ok(0.0);
    }
    let f_hi = virtual_marginal_cost(cost, q_max, theta, rho) - price;
    if !(f_hi >= 0.0) {
        return Err(Error::SolverDomain {
            lo: 0.0,
            hi: q_max,
            f_lo,
            f_hi,
        });
    }
    let q = roots::newton_bisect(
        |q| {
            let v = virtual_marginal_cost(cost, q, theta, rho) - price;
            let d = cost.c_qq(q, theta) + rho * cost.c_qqtheta(q, theta);
            (v, d)
        },
        0.0,
        q_max,
        tol,
    );
    Ok(q.max(0.0))
}

fn check_theta(theta: f64) -> Result<()> {
    if (0.0..=1.0).contains(&theta) {
        Ok(())
    } else {
        Err(Error::input("theta", format!("must lie in [0, 1], got {theta}")))
    }
}

/// q solving Ψ^j(q, θ) = effective price, clamped at zero.
pub fn separating_quantity(s: &Scenario, group: Group, theta: f64) -> Result<f64> {
    check_theta(theta)?;
    let rho = s.distribution(group).reverse_hazard_ratio(theta);
    virtual_cost_root(s.cost(), theta, rho, s.effective_price(group), s.q_max(), s.tolerances().root_tol)
}

/// q_p solving P·f̂ = f̃·C_q + F̃·C_qθ, clamped at zero.
pub fn pooling_quantity(s: &Scenario, theta: f64) -> Result<f64> {
    check_theta(theta)?;
    let m = s.mixture();
    let price = s.price() * m.price_ratio(theta);
    virtual_cost_root(s.cost(), theta, m.pooled_rho(theta), price, s.q_max(), s.tolerances().root_tol)
}

/// Uniform scan points used to locate first crossings.
fn scan_points(s: &Scenario) -> Vec<f64> {
    crate::distributions::uniform_grid(0.0, 1.0, s.tolerances().grid_size)
}

/// Smallest θ at which Ψ(0, θ; ρ(θ)) reaches `price(θ)`; 1 when never.
fn zero_quantity_threshold<R, P>(s: &Scenario, from: f64, rho: R, price: P) -> f64
where
    R: Fn(f64) -> f64,
    P: Fn(f64) -> f64,
{
    let cost = s.cost();
    let g = |x: f64| virtual_marginal_cost(cost, 0.0, x, rho(x)) - price(x);
    let mut pts = vec![from];
    pts.extend(scan_points(s).into_iter().filter(|&x| x > from));
    roots::first_crossing(g, &pts).unwrap_or(1.0)
}

/// Smallest θ with separating quantity zero; 1 if the group is hired
/// throughout.
pub fn hiring_cutoff(s: &Scenario, group: Group) -> Result<f64> {
    let d = s.distribution(group);
    let price = s.effective_price(group);
    Ok(zero_quantity_threshold(s, 0.0, |x| d.reverse_hazard_ratio(x), |_| price))
}

/// Smallest θ ≥ `from` with pooled quantity zero.
pub(crate) fn pooled_hiring_cutoff(s: &Scenario, from: f64) -> f64 {
    let m = s.mixture();
    zero_quantity_threshold(s, from, |x| m.pooled_rho(x), |x| s.price() * m.price_ratio(x))
}

fn require_reverse(s: &Scenario) -> Result<()> {
    let t = s.distribution(Group::Trait);
    let n = s.distribution(Group::NonTrait);
    if satisfies_reverse_mlrp(t, n, &default_check_grid())? {
        Ok(())
    } else {
        Err(Error::RegimeMismatch {
            expected: OrderingRegime::ReverseMlrp,
            found: s.ordering()?,
        })
    }
}

/// Boundary θ* between the separating and pooled regions under reverse
/// MLRP: the first root of (ρ^T − ρ^N)·C_qθ(q^N, θ) = Pτ/(1−τ) along the
/// non-trait separating schedule, 0 without a credit, 1 when never reached.
pub fn pooling_cutoff(s: &Scenario) -> Result<f64> {
    require_reverse(s)?;
    let tau = s.tax_credit();
    if tau == 0.0 {
        return Ok(0.0);
    }
    let rhs = s.price() * tau / (1.0 - tau);
    let t = s.distribution(Group::Trait);
    let n = s.distribution(Group::NonTrait);
    let cost = s.cost();
    let g = |x: f64| {
        let qn = separating_quantity(s, Group::NonTrait, x).unwrap_or(0.0);
        (t.reverse_hazard_ratio(x) - n.reverse_hazard_ratio(x)) * cost.c_qtheta(qn, x) - rhs
    };
    Ok(roots::first_crossing(g, &scan_points(s)).unwrap_or(1.0))
}

/// The solved menu. Quantities and rents are evaluated exactly at any θ;
/// node values on the solve grid are cached.
#[derive(Debug, Clone)]
pub struct OptimalMenu {
    scenario: Scenario,
    ordering: OrderingRegime,
    regime: MenuRegime,
    trait_cutoff: f64,
    nontrait_cutoff: f64,
    pooling_cutoff: f64,
    pooled_cutoff: Option<f64>,
    transfer: f64,
    grid: Vec<f64>,
    q_trait: Vec<f64>,
    q_nontrait: Vec<f64>,
    rents: RentProfile,
    rule: Rule,
}

/// Solves the scenario.
pub fn assemble_menu(s: &Scenario) -> Result<OptimalMenu> {
    let report = s.assumptions()?;
    let ordering = report.regime;
    if ordering == OrderingRegime::Neither {
        return Err(Error::UnsupportedOrdering);
    }
    if !(report.reverse_hazard_trait && report.reverse_hazard_nontrait) {
        return Err(Error::Precondition(
            "both type distributions need a non-increasing reverse hazard rate".into(),
        ));
    }
    if ordering == OrderingRegime::ReverseMlrp && !report.rent_single_crossing {
        return Err(Error::Precondition(
            "under reverse MLRP the rent difference ρ^T − ρ^N must be non-decreasing".into(),
        ));
    }
    // surface bracket failures before any schedule is evaluated
    separating_quantity(s, Group::Trait, 0.0)?;
    separating_quantity(s, Group::NonTrait, 0.0)?;

    let sep_trait = hiring_cutoff(s, Group::Trait)?;
    let sep_nontrait = hiring_cutoff(s, Group::NonTrait)?;
    let (pooling_cutoff, regime) = match ordering {
        OrderingRegime::Mlrp => (1.0, MenuRegime::FullSeparation),
        _ => {
            let c = pooling_cutoff(s)?;
            let regime = if c == 0.0 {
                MenuRegime::FullPooling
            } else if c >= 1.0 {
                MenuRegime::FullSeparation
            } else {
                MenuRegime::SemiPooling
            };
            (c, regime)
        }
    };
    let pooling = regime != MenuRegime::FullSeparation;
    let pooled_cutoff = pooling.then(|| pooled_hiring_cutoff(s, pooling_cutoff));
    let cutoff_for = |sep: f64| match pooled_cutoff {
        Some(pc) if sep >= pooling_cutoff => pc,
        _ => sep,
    };
    let trait_cutoff = cutoff_for(sep_trait);
    let nontrait_cutoff = cutoff_for(sep_nontrait);

    let mut breaks = vec![trait_cutoff, nontrait_cutoff];
    if pooling {
        breaks.push(pooling_cutoff);
        breaks.extend(pooled_cutoff);
    }
    let grid = solve_grid(s.tolerances().grid_size, &breaks);

    let mut menu = OptimalMenu {
        scenario: s.clone(),
        ordering,
        regime,
        trait_cutoff,
        nontrait_cutoff,
        pooling_cutoff,
        pooled_cutoff,
        transfer: 0.0,
        q_trait: Vec::new(),
        q_nontrait: Vec::new(),
        rents: RentProfile {
            grid: Vec::new(),
            trait_rent: Vec::new(),
            nontrait_rent: Vec::new(),
        },
        rule: Rule::new(s.tolerances().quad_order),
        grid,
    };
    menu.q_trait = menu.grid.iter().map(|&x| menu.quantity(Group::Trait, x)).collect();
    menu.q_nontrait = menu.grid.iter().map(|&x| menu.quantity(Group::NonTrait, x)).collect();
    menu.rents = RentProfile::compute(&menu, &menu.grid, s.cost(), &menu.rule);
    Ok(menu)
}

/// Uniform grid with breakpoints merged in.
pub fn solve_grid(n: usize, breakpoints: &[f64]) -> Vec<f64> {
    let mut grid = crate::distributions::uniform_grid(0.0, 1.0, n);
    let spacing = 1.0 / (n.max(2) - 1) as f64;
    for &b in breakpoints {
        if b <= 0.0 || b >= 1.0 || !b.is_finite() {
            continue;
        }
        let k = grid.partition_point(|&x| x < b);
        let near = |i: usize| grid.get(i).is_some_and(|&x| (x - b).abs() < 1e-12 * spacing.max(1e-3));
        if near(k) || (k > 0 && near(k - 1)) {
            continue;
        }
        grid.insert(k, b);
    }
    grid
}

impl OptimalMenu {
    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn ordering(&self) -> OrderingRegime {
        self.ordering
    }

    pub fn regime(&self) -> MenuRegime {
        self.regime
    }

    /// Type at which the group's quantity first reaches zero.
    pub fn hiring_cutoff(&self, group: Group) -> f64 {
        match group {
            Group::Trait => self.trait_cutoff,
            Group::NonTrait => self.nontrait_cutoff,
        }
    }

    /// θ*; 1 under full separation.
    pub fn pooling_cutoff(&self) -> f64 {
        self.pooling_cutoff
    }

    /// Where the pooled quantity reaches zero, when a pooled region exists.
    pub fn pooled_cutoff(&self) -> Option<f64> {
        self.pooled_cutoff
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn node_quantities(&self, group: Group) -> &[f64] {
        match group {
            Group::Trait => &self.q_trait,
            Group::NonTrait => &self.q_nontrait,
        }
    }

    pub fn rents(&self) -> &RentProfile {
        &self.rents
    }

    /// Probability that a group member is hired.
    pub fn hire_probability(&self, group: Group) -> f64 {
        self.scenario.distribution(group).cdf(self.hiring_cutoff(group))
    }

    pub fn in_pooling_region(&self, theta: f64) -> bool {
        self.regime != MenuRegime::FullSeparation && theta >= self.pooling_cutoff
    }

    /// R^j(θ) at any θ from the cached node rents and one partial cell.
    pub fn rent(&self, group: Group, theta: f64) -> f64 {
        let g = &self.grid;
        let n = g.len();
        if theta >= 1.0 {
            return 0.0;
        }
        let k = g.partition_point(|&x| x <= theta).clamp(1, n - 1);
        let next = g[k];
        let cost = self.scenario.cost();
        self.rents.rent(group)[k] + self.rule.integrate(theta.max(0.0), next, |x| cost.c_theta(self.quantity(group, x), x))
    }

    /// Principal's expected payoff, integrating against dF through
    /// u = F(θ) and moving the rent term onto ∫ C_θ F dθ.
    pub fn objective(&self) -> f64 {
        let s = &self.scenario;
        let cost = s.cost();
        let rule = &self.rule;
        let mut total = 0.0;
        for group in Group::BOTH {
            let d = s.distribution(group);
            let k = s.wage_weight(group);
            let cutoff = self.hiring_cutoff(group);
            let surplus = |x: f64| {
                let q = self.quantity(group, x);
                s.price() * q - k * cost.cost(q, x)
            };
            let mut direct = 0.0;
            let mut rent = 0.0;
            for w in self.grid.windows(2) {
                let (a, b) = (w[0], w[1]);
                if a >= cutoff {
                    break;
                }
                direct += rule.integrate(d.cdf(a), d.cdf(b), |u| surplus(d.quantile(u)));
                rent += rule.integrate(a, b, |x| cost.c_theta(self.quantity(group, x), x) * d.cdf(x));
            }
            let promised = if group == Group::Trait { self.transfer } else { 0.0 };
            total += s.share(group) * (direct - k * rent - k * promised);
        }
        total
    }

    /// Node samples with wages and region labels.
    pub fn to_contract_menu(&self) -> ContractMenu {
        let cost = self.scenario.cost();
        let wages = |group: Group| -> Vec<f64> {
            let extra = if group == Group::Trait { self.transfer } else { 0.0 };
            self.grid
                .iter()
                .zip(self.node_quantities(group))
                .zip(self.rents.rent(group))
                .map(|((&x, &q), &r)| extra + cost.cost(q, x) + r)
                .collect()
        };
        let region = self
            .grid
            .iter()
            .zip(self.q_trait.iter().zip(&self.q_nontrait))
            .map(|(&x, (&qt, &qn))| {
                if qt <= 0.0 && qn <= 0.0 {
                    Region::NotHired
                } else if self.in_pooling_region(x) {
                    Region::Pooling
                } else {
                    Region::Separating
                }
            })
            .collect();
        ContractMenu {
            theta: self.grid.clone(),
            q_trait: self.q_trait.clone(),
            q_nontrait: self.q_nontrait.clone(),
            w_trait: wages(Group::Trait),
            w_nontrait: wages(Group::NonTrait),
            region,
            regime: Some(self.regime),
            trait_cutoff: Some(self.trait_cutoff),
            nontrait_cutoff: Some(self.nontrait_cutoff),
            pooled_cutoff: self.pooled_cutoff,
            pooling_cutoff: Some(self.pooling_cutoff),
            transfer: self.transfer,
        }
    }
}

impl QuantitySchedule for OptimalMenu {
    fn quantity(&self, group: Group, theta: f64) -> f64 {
        let s = &self.scenario;
        let theta = theta.clamp(0.0, 1.0);
        let q = if self.in_pooling_region(theta) {
            pooling_quantity(s, theta)
        } else {
            separating_quantity(s, group, theta)
        };
        // brackets are guaranteed by the growth check at construction
        q.unwrap_or(0.0)
    }
}

impl MenuView for OptimalMenu {
    fn wage(&self, group: Group, theta: f64) -> f64 {
        let extra = if group == Group::Trait { self.transfer } else { 0.0 };
        let q = self.quantity(group, theta);
        if q <= 0.0 && self.rent(group, theta) == 0.0 {
            return extra;
        }
        extra + self.scenario.cost().cost(q, theta) + self.rent(group, theta)
    }

    fn transfer(&self) -> f64 {
        self.transfer
    }
}

/// Wage schedules at grid nodes by revenue equivalence:
/// w^j = Ū·[j = T] + C(q^j, θ) + R^j(θ).
pub fn compute_wages(
    schedule: &dyn QuantitySchedule,
    grid: &[f64],
    transfer: f64,
    cost: &dyn CostModel,
    rule: &Rule,
) -> (Vec<f64>, Vec<f64>) {
    let rents = RentProfile::compute(schedule, grid, cost, rule);
    let wages = |group: Group| {
        let extra = if group == Group::Trait { transfer } else { 0.0 };
        grid.iter()
            .zip(rents.rent(group))
            .map(|(&x, &r)| extra + cost.cost(schedule.quantity(group, x), x) + r)
            .collect()
    };
    (wages(Group::Trait), wages(Group::NonTrait))
}

/// Smallest Ū making the schedules across-group incentive compatible:
/// max over the grid of R^N − R^T, floored at zero. Returns the argmax too.
pub fn required_transfer(schedule: &dyn QuantitySchedule, grid: &[f64], cost: &dyn CostModel, rule: &Rule) -> (f64, f64) {
    RentProfile::compute(schedule, grid, cost, rule).required_transfer()
}

/// Objective of a sampled menu. The payoff P·q − k·w is linear between
/// nodes, so each cell integrates exactly against dF using ∫F dθ.
pub fn principal_objective(menu: &ContractMenu, s: &Scenario) -> f64 {
    let mut total = 0.0;
    for group in Group::BOTH {
        let d = s.distribution(group);
        let k = s.wage_weight(group);
        let q = menu.q(group);
        let w = menu.w(group);
        let g: Vec<f64> = q.iter().zip(w).map(|(&q, &w)| s.price() * q - k * w).collect();
        let mut acc = 0.0;
        for i in 0..menu.len() - 1 {
            let (a, b) = (menu.theta[i], menu.theta[i + 1]);
            if g[i] == 0.0 && g[i + 1] == 0.0 {
                continue;
            }
            let (fa, fb) = (d.cdf(a), d.cdf(b));
            let slope = (g[i + 1] - g[i]) / (b - a);
            acc += g[i] * (fb - fa) + slope * ((b - a) * fb - d.cdf_integral(a, b));
        }
        total += s.share(group) * acc;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::QuadraticCost;
    use crate::distributions::TypeDistribution;
    use crate::scenario::Tolerances;
    use std::sync::Arc;

    fn scenario(t: f64, n: f64, tau: f64) -> Scenario {
        Scenario::new(
            0.75,
            tau,
            0.3,
            TypeDistribution::polynomial(t).unwrap(),
            TypeDistribution::polynomial(n).unwrap(),
            Arc::new(QuadraticCost),
            Tolerances::default(),
        )
        .unwrap()
    }

    #[test]
    fn separating_examples() {
        let s = scenario(0.7, 0.3, 0.0);
        let qn = separating_quantity(&s, Group::NonTrait, 0.1).unwrap();
        assert!((qn - (0.75 - 0.1 - 0.1 / 0.3)).abs() < 1e-10);
        let qt = separating_quantity(&s, Group::Trait, 0.1).unwrap();
        assert!((qt - (0.75 - 0.1 * (1.0 + 1.0 / 0.7))).abs() < 1e-10);
        assert!((separating_quantity(&s, Group::NonTrait, 0.0).unwrap() - 0.75).abs() < 1e-10);
        assert_eq!(separating_quantity(&s, Group::NonTrait, 0.5).unwrap(), 0.0);
        assert!(separating_quantity(&s, Group::NonTrait, 1.5).is_err());
    }

    #[test]
    fn cutoff_examples() {
        let s = scenario(0.7, 0.3, 0.0);
        assert!((hiring_cutoff(&s, Group::NonTrait).unwrap() - 0.75 * 0.3 / 1.3).abs() < 1e-12);
        assert!((hiring_cutoff(&s, Group::Trait).unwrap() - 0.75 * 0.7 / 1.7).abs() < 1e-12);
        let s4 = scenario(0.7, 0.3, 0.4);
        assert!((hiring_cutoff(&s4, Group::Trait).unwrap() - 1.25 * 0.7 / 1.7).abs() < 1e-12);
    }

    #[test]
    fn pooled_quantity_closed_form() {
        for &tau in &[0.0, 0.2] {
            let s = scenario(0.3, 0.7, tau);
            let m = s.mixture();
            let x = 0.25;
            let oracle = 0.75 * m.fhat(x) / m.ftilde(x) - x - m.cdf_tilde(x) / m.ftilde(x);
            assert!((pooling_quantity(&s, x).unwrap() - oracle).abs() < 1e-10);
        }
        assert!((pooling_quantity(&scenario(0.3, 0.7, 0.0), 0.25).unwrap() - 0.02747).abs() < 1e-5);
        assert!((pooling_quantity(&scenario(0.3, 0.7, 0.2), 0.25).unwrap() - 0.08405).abs() < 1e-5);
    }

    #[test]
    fn crossing_examples() {
        let slope = 1.0 / 0.3 - 1.0 / 0.7;
        assert!((pooling_cutoff(&scenario(0.3, 0.7, 0.2)).unwrap() - 0.1875 / slope).abs() < 1e-12);
        assert_eq!(pooling_cutoff(&scenario(0.3, 0.7, 0.0)).unwrap(), 0.0);
        assert_eq!(pooling_cutoff(&scenario(0.3, 0.7, 0.8)).unwrap(), 1.0);
        assert!(matches!(pooling_cutoff(&scenario(0.7, 0.3, 0.2)), Err(Error::RegimeMismatch { .. })));
    }

    #[test]
    fn wage_example() {
        let m = assemble_menu(&scenario(0.7, 0.3, 0.2)).unwrap();
        let cut = 0.75 * 0.3 / 1.3;
        let q = 0.75 - 0.1 / 0.3 - 0.1;
        let rent = 0.75 * (cut - 0.1) - 13.0 / 6.0 * (cut * cut - 0.01);
        let oracle = rent + 0.5 * q * q + 0.1 * q;
        assert!((m.wage(Group::NonTrait, 0.1) - oracle).abs() < 1e-12);
        assert!((oracle - 0.093377).abs() < 1e-6);
        assert_eq!(m.wage(Group::NonTrait, 0.5), 0.0);
        let c = m.hiring_cutoff(Group::NonTrait);
        assert!((c - cut).abs() < 1e-15);
        assert_eq!(m.quantity(Group::NonTrait, c), 0.0);
        assert_eq!(m.wage(Group::NonTrait, c), 0.0);
    }

    #[test]
    fn null_menu_objective_is_zero() {
        let s = scenario(0.7, 0.3, 0.2);
        let menu = ContractMenu::null(solve_grid(11, &[]));
        assert_eq!(principal_objective(&menu, &s), 0.0);
    }

    #[test]
    fn breakpoints_are_merged() {
        let g = solve_grid(11, &[0.25, 0.3, 0.0, 1.0]);
        assert_eq!(g.len(), 12);
        assert!(g.contains(&0.25));
        assert!(g.windows(2).all(|w| w[1] > w[0]));
    }
}
