//! Problem instances and their file format.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::cost::{CostModel, CostSpec};
use crate::distributions::{
    self, check_monotone_reverse_hazard, check_rent_single_crossing, classify_ordering, DistributionSpec,
    MixtureMeasures, OrderingRegime, TypeDistribution,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Group {
    #[serde(rename = "T")]
    Trait,
    #[serde(rename = "N")]
    NonTrait,
}

impl Group {
    pub const BOTH: [Group; 2] = [Group::Trait, Group::NonTrait];
}

impl std::fmt::Display for Group {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Group::Trait => "T",
            Group::NonTrait => "N",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Absolute tolerance on quantities returned by root finding.
    pub root_tol: f64,
    /// Number of uniform θ points before breakpoints are inserted.
    pub grid_size: usize,
    /// Gauss-Legendre points per grid cell.
    pub quad_order: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            root_tol: 1e-10,
            grid_size: 2001,
            quad_order: 8,
        }
    }
}

impl Tolerances {
    fn validate(&self) -> Result<()> {
        if !(self.root_tol > 0.0 && self.root_tol < 1e-2) {
            return Err(Error::input("solver.root_tol", format!("must lie in (0, 0.01), got {}", self.root_tol)));
        }
        if !(3..=1_000_000).contains(&self.grid_size) {
            return Err(Error::input("solver.grid_size", format!("must lie in [3, 1000000], got {}", self.grid_size)));
        }
        if !(2..=64).contains(&self.quad_order) {
            return Err(Error::input("solver.quad_order", format!("must lie in [2, 64], got {}", self.quad_order)));
        }
        Ok(())
    }
}

/// Settings for the randomized optimality checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    pub seed: u64,
    pub perturbations: usize,
    pub epsilon: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            seed: 0,
            perturbations: 200,
            epsilon: 0.01,
        }
    }
}

/// On-disk scenario description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub price: f64,
    pub tax_credit: f64,
    pub trait_share: f64,
    pub trait_dist: DistributionSpec,
    pub nontrait_dist: DistributionSpec,
    #[serde(flatten)]
    pub cost: CostSpec,
    #[serde(default)]
    pub solver: Tolerances,
    #[serde(default)]
    pub verify: VerifyConfig,
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn build(&self) -> Result<Scenario> {
        let trait_dist = TypeDistribution::from_spec(&self.trait_dist).map_err(|e| Error::input("trait_dist", e.to_string()))?;
        let nontrait_dist =
            TypeDistribution::from_spec(&self.nontrait_dist).map_err(|e| Error::input("nontrait_dist", e.to_string()))?;
        let cost = self.cost.build()?;
        Scenario::new(self.price, self.tax_credit, self.trait_share, trait_dist, nontrait_dist, cost, self.solver)
    }
}

/// A complete problem instance.
#[derive(Debug, Clone)]
pub struct Scenario {
    price: f64,
    tax_credit: f64,
    trait_share: f64,
    trait_dist: TypeDistribution,
    nontrait_dist: TypeDistribution,
    cost: Arc<dyn CostModel>,
    tolerances: Tolerances,
    q_max: f64,
}

impl Scenario {
    pub fn new(
        price: f64,
        tax_credit: f64,
        trait_share: f64,
        trait_dist: TypeDistribution,
        nontrait_dist: TypeDistribution,
        cost: Arc<dyn CostModel>,
        tolerances: Tolerances,
    ) -> Result<Self> {
        if !(price.is_finite() && price > 0.0) {
            return Err(Error::input("price", format!("must be positive and finite, got {price}")));
        }
        if !(0.0..1.0).contains(&tax_credit) {
            return Err(Error::input("tax_credit", format!("must lie in [0, 1), got {tax_credit}")));
        }
        if !(trait_share > 0.0 && trait_share < 1.0) {
            return Err(Error::input("trait_share", format!("must lie in (0, 1), got {trait_share}")));
        }
        let origin = cost.c_q(0.0, 0.0);
        if price <= origin {
            return Err(Error::input("price", format!("must exceed C_q(0,0) = {origin}, got {price}")));
        }
        tolerances.validate()?;
        let grid = distributions::default_check_grid();
        trait_dist.validate(&grid).map_err(|e| Error::input("trait_dist", e.to_string()))?;
        nontrait_dist.validate(&grid).map_err(|e| Error::input("nontrait_dist", e.to_string()))?;

        let top = price / (1.0 - tax_credit);
        let mut q_max = 2.0 * top;
        let mut doublings = 0;
        while cost.c_q(q_max, 0.0) < top {
            q_max *= 2.0;
            doublings += 1;
            if doublings > 60 || !q_max.is_finite() {
                return Err(Error::SolverDomain {
                    lo: 0.0,
                    hi: q_max,
                    f_lo: origin - top,
                    f_hi: cost.c_q(q_max, 0.0) - top,
                });
            }
        }
        Ok(Scenario {
            price,
            tax_credit,
            trait_share,
            trait_dist,
            nontrait_dist,
            cost,
            tolerances,
            q_max,
        })
    }

    pub fn from_config(config: &ScenarioConfig) -> Result<Self> {
        config.build()
    }

    /// Same instance with a different tax credit.
    pub fn with_tax_credit(&self, tax_credit: f64) -> Result<Self> {
        Scenario::new(
            self.price,
            tax_credit,
            self.trait_share,
            self.trait_dist.clone(),
            self.nontrait_dist.clone(),
            self.cost.clone(),
            self.tolerances,
        )
    }

    pub fn with_tolerances(&self, tolerances: Tolerances) -> Result<Self> {
        Scenario::new(
            self.price,
            self.tax_credit,
            self.trait_share,
            self.trait_dist.clone(),
            self.nontrait_dist.clone(),
            self.cost.clone(),
            tolerances,
        )
    }

    pub fn price(&self) -> f64 {
        self.price
    }

    pub fn tax_credit(&self) -> f64 {
        self.tax_credit
    }

    pub fn trait_share(&self) -> f64 {
        self.trait_share
    }

    pub fn cost(&self) -> &dyn CostModel {
        self.cost.as_ref()
    }

    pub fn cost_handle(&self) -> Arc<dyn CostModel> {
        self.cost.clone()
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tolerances
    }

    pub fn distribution(&self, group: Group) -> &TypeDistribution {
        match group {
            Group::Trait => &self.trait_dist,
            Group::NonTrait => &self.nontrait_dist,
        }
    }

    /// Population weight of a group in the objective.
    pub fn share(&self, group: Group) -> f64 {
        match group {
            Group::Trait => self.trait_share,
            Group::NonTrait => 1.0 - self.trait_share,
        }
    }

    /// Fraction of the wage the principal bears.
    pub fn wage_weight(&self, group: Group) -> f64 {
        match group {
            Group::Trait => 1.0 - self.tax_credit,
            Group::NonTrait => 1.0,
        }
    }

    /// P/(1−τ) for trait hires, P otherwise.
    pub fn effective_price(&self, group: Group) -> f64 {
        self.price / self.wage_weight(group)
    }

    /// Upper end of the quantity bracket.
    pub fn q_max(&self) -> f64 {
        self.q_max
    }

    pub fn mixture(&self) -> MixtureMeasures<'_> {
        distributions::mixture(&self.trait_dist, &self.nontrait_dist, self.trait_share, self.tax_credit)
            .expect("shares validated at construction")
    }

    pub fn ordering(&self) -> Result<OrderingRegime> {
        classify_ordering(&self.trait_dist, &self.nontrait_dist, &distributions::default_check_grid())
    }

    pub fn assumptions(&self) -> Result<AssumptionReport> {
        let grid = distributions::default_check_grid();
        let regime = classify_ordering(&self.trait_dist, &self.nontrait_dist, &grid)?;
        Ok(AssumptionReport {
            regime,
            reverse_hazard_trait: check_monotone_reverse_hazard(&self.trait_dist, &grid),
            reverse_hazard_nontrait: check_monotone_reverse_hazard(&self.nontrait_dist, &grid),
            rent_single_crossing: check_rent_single_crossing(&self.trait_dist, &self.nontrait_dist, &grid),
        })
    }

    /// Echo of the instance in file form, when the cost model is serializable.
    pub fn config(&self) -> Option<ScenarioConfig> {
        Some(ScenarioConfig {
            price: self.price,
            tax_credit: self.tax_credit,
            trait_share: self.trait_share,
            trait_dist: self.trait_dist.spec(),
            nontrait_dist: self.nontrait_dist.spec(),
            cost: self.cost.spec()?,
            solver: self.tolerances,
            verify: VerifyConfig::default(),
        })
    }
}

/// Result of the distributional checks for a scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AssumptionReport {
    pub regime: OrderingRegime,
    pub reverse_hazard_trait: bool,
    pub reverse_hazard_nontrait: bool,
    pub rent_single_crossing: bool,
}

impl AssumptionReport {
    /// Whether the single-crossing condition on rents is needed. Under MLRP
    /// full separation needs only the reverse-hazard conditions.
    pub fn single_crossing_required(&self) -> bool {
        self.regime == OrderingRegime::ReverseMlrp
    }

    pub fn satisfied(&self) -> bool {
        let hazards = self.reverse_hazard_trait && self.reverse_hazard_nontrait;
        match self.regime {
            OrderingRegime::Mlrp => hazards,
            OrderingRegime::ReverseMlrp => hazards && self.rent_single_crossing,
            OrderingRegime::Neither => false,
        }
    }
}
