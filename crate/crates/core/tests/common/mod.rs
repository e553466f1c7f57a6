#![allow(dead_code)]

use std::path::PathBuf;
use std::sync::Arc;

use screening::cost::{CostModel, PolyphraseCost, QuadraticCost};
use screening::distributions::TypeDistribution;
use screening::scenario::{Scenario, Tolerances};

pub const PRICE: f64 = 0.75;
pub const SHARE: f64 = 0.3;

pub fn poly(a: f64) -> TypeDistribution {
    TypeDistribution::polynomial(a).unwrap()
}

pub fn scenario(tau: f64, a_trait: f64, a_non: f64, cost: Arc<dyn CostModel>) -> Scenario {
    Scenario::new(PRICE, tau, SHARE, poly(a_trait), poly(a_non), cost, Tolerances::default()).unwrap()
}

pub fn mlrp(tau: f64) -> Scenario {
    scenario(tau, 0.7, 0.3, Arc::new(QuadraticCost))
}

pub fn reverse(tau: f64) -> Scenario {
    scenario(tau, 0.3, 0.7, Arc::new(QuadraticCost))
}

pub fn regression(tau: f64) -> Scenario {
    scenario(tau, 0.7, 0.3, Arc::new(PolyphraseCost::new(0.1).unwrap()))
}

pub fn scenario_file(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)
}
