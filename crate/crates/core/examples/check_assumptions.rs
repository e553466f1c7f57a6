//! Classifies the likelihood-ratio ordering for a few type-distribution
//! pairs and reports which structural conditions hold.

use std::sync::Arc;

use screening::cost::QuadraticCost;
use screening::distributions::TypeDistribution;
use screening::scenario::{Scenario, Tolerances};

fn main() -> screening::error::Result<()> {
    let poly = |a: f64| TypeDistribution::polynomial(a);
    let pairs = [
        ("F^T = θ^0.7, F^N = θ^0.3", poly(0.7)?, poly(0.3)?),
        ("F^T = θ^0.3, F^N = θ^0.7", poly(0.3)?, poly(0.7)?),
        ("identical laws", poly(0.5)?, poly(0.5)?),
        (
            "crossing tables",
            TypeDistribution::tabulated(vec![0.0, 0.5, 1.0], vec![0.0, 0.8, 1.0])?,
            TypeDistribution::tabulated(vec![0.0, 0.3, 0.6, 1.0], vec![0.0, 0.1, 0.8, 1.0])?,
        ),
    ];
    for (label, t, n) in pairs {
        let s = Scenario::new(0.75, 0.0, 0.3, t, n, Arc::new(QuadraticCost), Tolerances::default())?;
        let a = s.assumptions()?;
        println!(
            "{label:28} regime {:12} hazards T/N {}/{}  rent single crossing {}  usable {}",
            a.regime.to_string(),
            a.reverse_hazard_trait,
            a.reverse_hazard_nontrait,
            a.rent_single_crossing,
            a.satisfied()
        );
    }
    Ok(())
}
