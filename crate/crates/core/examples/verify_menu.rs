//! Runs the constraint oracles on a solved menu, on a menu with wages cut
//! by 0.01, and on the null menu, then probes local optimality with random
//! monotone perturbations.

use std::path::Path;

use screening::menu::ContractMenu;
use screening::scenario::ScenarioConfig;
use screening::solver::assemble_menu;
use screening::verifier::{perturbation_test, verify_contract_menu, verify_solution};

fn main() -> screening::error::Result<()> {
    let cfg = ScenarioConfig::load(Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/mlrp.json")))?;
    let s = cfg.build()?;
    let m = assemble_menu(&s)?;

    let show = |label: &str, r: &screening::verifier::VerificationReport| {
        println!("{label}: overall {}", if r.overall_pass { "pass" } else { "fail" });
        for e in &r.entries {
            println!("    {:24} {:5} worst {:.3e}", e.name, e.pass, e.worst_violation);
        }
    };
    show("solved menu", &verify_solution(&m, &cfg.verify));

    let mut cut = m.to_contract_menu();
    cut.w_trait.iter_mut().chain(cut.w_nontrait.iter_mut()).for_each(|w| *w -= 0.01);
    show("wages cut by 0.01", &verify_contract_menu(&cut, &s, &cfg.verify));

    let null = ContractMenu::null(m.grid().to_vec());
    show("null menu", &verify_contract_menu(&null, &s, &cfg.verify));

    let menu = m.to_contract_menu();
    let p = perturbation_test(&menu, &s, 1000, 0.01, 7, 1e-6);
    println!("\n1000 perturbations of the solved menu: best gain {:.3e}", p.max_improvement);
    let mut shrunk = menu.clone();
    shrunk.q_trait.iter_mut().chain(shrunk.q_nontrait.iter_mut()).for_each(|q| *q *= 0.9);
    let p = perturbation_test(&shrunk, &s, 1000, 0.01, 7, 1e-6);
    println!("1000 perturbations of a 0.9x menu: best gain {:.3e}, {} improving", p.max_improvement, p.improved);
    Ok(())
}
