//! Sweeps the tax credit and finds where the trait group's hiring
//! probability catches up with the non-trait group's.

use std::path::Path;

use screening::commands::{sweep, sweep_csv, SweepSpec};
use screening::scenario::ScenarioConfig;

fn main() -> screening::error::Result<()> {
    let s = ScenarioConfig::load(Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/mlrp.json")))?.build()?;
    let rows = sweep(&s, &SweepSpec::tax_credit(0.0, 0.6, 61)?)?;
    let ok: Vec<_> = rows.iter().filter_map(|(_, r)| r.as_ref().ok()).collect();
    for w in ok.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (ga, gb) = (a.hire_prob_t - a.hire_prob_n, b.hire_prob_t - b.hire_prob_n);
        if ga < 0.0 && gb >= 0.0 {
            let tau = a.tau + (b.tau - a.tau) * ga / (ga - gb);
            println!("hiring probabilities cross near tau = {tau:.4}");
        }
    }
    print!("{}", sweep_csv(&rows[..6])?);
    Ok(())
}
