//! Why the top trait type gets no rent: the objective falls in the
//! promised utility Ū, and the slope splits into a transfer cost, an
//! efficiency gain, and a tax-credit loss.

use std::path::Path;

use screening::scenario::ScenarioConfig;
use screening::verifier::check_transfer_gradient;

fn main() -> screening::error::Result<()> {
    for file in ["reverse.json", "reverse_tau02.json"] {
        let path = format!("{}/scenarios/{file}", env!("CARGO_MANIFEST_DIR"));
        let s = ScenarioConfig::load(Path::new(&path))?.build()?;
        let grid: Vec<f64> = (0..=6).map(|k| k as f64 * 0.01).collect();
        let r = check_transfer_gradient(&s, &grid)?;
        println!("{file}: Ξ^T(0) = {:.1e}, Ξ^T at θ = {:.4} is {:.6} < {:.2}", r.xi_at_zero, r.top_theta, r.xi_at_top, r.bound);
        println!("   Ubar     J          dJ/dU (fd)   multiplier   predicted   boundary");
        for p in &r.points {
            println!(
                "   {:.2}   {:.6}   {:.6}    {:.6}    {:.6}   {}",
                p.transfer,
                p.objective,
                p.finite_difference,
                p.multiplier_slope,
                p.predicted,
                p.boundary.map_or("-".into(), |b| format!("{b:.4}"))
            );
        }
        for e in r.entries() {
            println!("   {:34} {}", e.name, e.pass);
        }
    }
    Ok(())
}
