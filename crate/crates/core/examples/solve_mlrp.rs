//! Solves the MLRP example across tax credits and compares the schedules
//! with the quadratic-cost closed form q = P/(1−τ) − θ − θ/a.

use std::sync::Arc;

use screening::cost::QuadraticCost;
use screening::distributions::TypeDistribution;
use screening::menu::QuantitySchedule;
use screening::scenario::{Group, Scenario, Tolerances};
use screening::solver::assemble_menu;

fn main() -> screening::error::Result<()> {
    let (a_trait, a_non) = (0.7, 0.3);
    let base = Scenario::new(
        0.75,
        0.0,
        0.3,
        TypeDistribution::polynomial(a_trait)?,
        TypeDistribution::polynomial(a_non)?,
        Arc::new(QuadraticCost),
        Tolerances::default(),
    )?;
    println!("  tau   theta_T*   theta_N*   hire_T   hire_N   objective   max |q − closed form|");
    for tau in [0.0, 0.2, 0.4, 0.6] {
        let s = base.with_tax_credit(tau)?;
        let m = assemble_menu(&s)?;
        let closed = |g: Group, x: f64| {
            let a = if g == Group::Trait { a_trait } else { a_non };
            (s.effective_price(g) - x - x / a).max(0.0)
        };
        let err = m
            .grid()
            .iter()
            .flat_map(|&x| Group::BOTH.map(|g| (m.quantity(g, x) - closed(g, x)).abs()))
            .fold(0.0, f64::max);
        println!(
            "  {tau:.1}  {:.6}   {:.6}   {:.4}   {:.4}   {:.6}    {err:.1e}",
            m.hiring_cutoff(Group::Trait),
            m.hiring_cutoff(Group::NonTrait),
            m.hire_probability(Group::Trait),
            m.hire_probability(Group::NonTrait),
            m.objective()
        );
    }
    Ok(())
}
