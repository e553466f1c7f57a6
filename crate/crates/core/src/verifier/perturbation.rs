//! Random feasible perturbations around a menu.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{CheckEntry, Witness};
use crate::isotonic::{node_weights, project_non_increasing};
use crate::menu::{ContractMenu, RentProfile};
use crate::quadrature::Rule;
use crate::scenario::Scenario;
use crate::solver::principal_objective;

#[derive(Debug, Clone)]
pub struct PerturbationOutcome {
    pub entry: CheckEntry,
    pub base_objective: f64,
    /// Largest objective gain over the base; may be negative.
    pub max_improvement: f64,
    pub improved: usize,
}

#[derive(Debug, Clone, Copy)]
enum Target {
    Trait,
    NonTrait,
    Together,
    Opposed,
}

#[derive(Debug, Clone, Copy)]
struct Bump {
    center: f64,
    width: f64,
    amplitude: f64,
    target: Target,
}

impl Bump {
    fn draw(rng: &mut ChaCha8Rng, epsilon: f64) -> Self {
        let target = match rng.gen_range(0..4) {
            0 => Target::Trait,
            1 => Target::NonTrait,
            2 => Target::Together,
            _ => Target::Opposed,
        };
        Bump {
            center: rng.gen_range(0.0..1.0),
            width: rng.gen_range(0.02..0.3),
            amplitude: if epsilon > 0.0 { rng.gen_range(-epsilon..=epsilon) } else { 0.0 },
            target,
        }
    }

    fn at(&self, theta: f64) -> f64 {
        let z = (theta - self.center) / self.width;
        if z.abs() >= 1.0 {
            0.0
        } else {
            let s = 1.0 - z * z;
            self.amplitude * s * s
        }
    }

    fn signs(&self) -> (f64, f64) {
        match self.target {
            Target::Trait => (1.0, 0.0),
            Target::NonTrait => (0.0, 1.0),
            Target::Together => (1.0, 1.0),
            Target::Opposed => (1.0, -1.0),
        }
    }
}

/// Projects onto non-increasing, non-negative schedules, prices the wages by
/// revenue equivalence, and pays the smallest feasible transfer.
fn feasible_objective(s: &Scenario, grid: &[f64], weights: &[f64], qt: &[f64], qn: &[f64], rule: &Rule) -> f64 {
    let project = |q: &[f64]| {
        project_non_increasing(q, weights)
            .into_iter()
            .map(|x| x.max(0.0))
            .collect::<Vec<_>>()
    };
    let (qt, qn) = (project(qt), project(qn));
    let schedule = crate::menu::SampledSchedule {
        grid: grid.to_vec(),
        q_trait: qt,
        q_nontrait: qn,
    };
    let (transfer, _) = RentProfile::compute(&schedule, grid, s.cost(), rule).required_transfer();
    let menu = ContractMenu::from_quantities(schedule.grid, schedule.q_trait, schedule.q_nontrait, transfer, s.cost(), rule);
    principal_objective(&menu, s)
}

/// Draws `count` seeded bumps of amplitude at most `epsilon` and reports the
/// largest objective gain over the (re-priced) base menu.
pub fn perturbation_test(
    menu: &ContractMenu,
    s: &Scenario,
    count: usize,
    epsilon: f64,
    seed: u64,
    tol: f64,
) -> PerturbationOutcome {
    let grid = &menu.theta;
    let weights = node_weights(grid);
    let rule = Rule::new(s.tolerances().quad_order);
    let base = feasible_objective(s, grid, &weights, &menu.q_trait, &menu.q_nontrait, &rule);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bumps: Vec<Bump> = (0..count).map(|_| Bump::draw(&mut rng, epsilon)).collect();
    let gains: Vec<f64> = bumps
        .par_iter()
        .map(|b| {
            let (st, sn) = b.signs();
            let qt: Vec<f64> = grid.iter().zip(&menu.q_trait).map(|(&x, &q)| q + st * b.at(x)).collect();
            let qn: Vec<f64> = grid.iter().zip(&menu.q_nontrait).map(|(&x, &q)| q + sn * b.at(x)).collect();
            feasible_objective(s, grid, &weights, &qt, &qn, &rule) - base
        })
        .collect();

    let (mut best, mut at) = (f64::NEG_INFINITY, None);
    for (g, b) in gains.iter().zip(&bumps) {
        if *g > best {
            best = *g;
            at = Some(b.center);
        }
    }
    let improved = gains.iter().filter(|&&g| g > tol).count();
    let max_improvement = if gains.is_empty() { 0.0 } else { best };
    let entry = CheckEntry::new(
        "perturbation",
        max_improvement,
        tol,
        at.map(|c| Witness {
            theta: c,
            theta_prime: None,
            group: None,
        }),
    )
    .with_detail(format!(
        "{count} perturbations, epsilon {epsilon}, seed {seed}: {improved} improved by more than {tol:e}"
    ));
    PerturbationOutcome {
        entry,
        base_objective: base,
        max_improvement,
        improved,
    }
}
