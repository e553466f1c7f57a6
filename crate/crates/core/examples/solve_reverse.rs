//! Under reverse MLRP the groups are pooled above θ*. Without a tax credit
//! they are pooled everywhere; a large enough credit separates them.

use std::sync::Arc;

use screening::cost::QuadraticCost;
use screening::distributions::TypeDistribution;
use screening::menu::{MenuView, QuantitySchedule};
use screening::scenario::{Group, Scenario, Tolerances};
use screening::solver::assemble_menu;

fn main() -> screening::error::Result<()> {
    let base = Scenario::new(
        0.75,
        0.0,
        0.3,
        TypeDistribution::polynomial(0.3)?,
        TypeDistribution::polynomial(0.7)?,
        Arc::new(QuadraticCost),
        Tolerances::default(),
    )?;
    for tau in [0.0, 0.2, 0.4, 0.8] {
        let m = assemble_menu(&base.with_tax_credit(tau)?)?;
        println!(
            "tau {tau:.1}: {:15} theta* = {:.6}  pooled until {}  objective {:.6}",
            m.regime().to_string(),
            m.pooling_cutoff(),
            m.pooled_cutoff().map_or("-".into(), |c| format!("{c:.6}")),
            m.objective()
        );
    }

    let m = assemble_menu(&base.with_tax_credit(0.2)?)?;
    println!("\n  theta     qT        qN        wT        wN");
    for x in [0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3] {
        println!(
            "  {x:.2}   {:.6}  {:.6}  {:.6}  {:.6}",
            m.quantity(Group::Trait, x),
            m.quantity(Group::NonTrait, x),
            m.wage(Group::Trait, x),
            m.wage(Group::NonTrait, x)
        );
    }
    Ok(())
}
