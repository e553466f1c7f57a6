//! Exit gate: one line per criterion, non-zero exit if any fails.
//! Expected values come from closed forms evaluated here, independently
//! of the library.

use std::sync::Arc;
use std::time::Instant;

use screening::cost::{CostModel, PolyphraseCost, QuadraticCost};
use screening::distributions::{uniform_grid, TypeDistribution};
use screening::menu::{MenuRegime, QuantitySchedule};
use screening::quadrature::Rule;
use screening::scenario::{Group, Scenario, Tolerances};
use screening::solver::{assemble_menu, pooling_cutoff, required_transfer, OptimalMenu};
use screening::verifier::{
    build_candidate_menus, check_lambda, check_transfer_gradient, constraint_entries, perturbation_test,
    verification_grid, xi, CandidateKind, ContractTable,
};

const PRICE: f64 = 0.75;
const SHARE: f64 = 0.3;
const TAUS: [f64; 4] = [0.0, 0.2, 0.4, 0.6];

// tolerances, pinned
const TOL_CLOSED_FORM: f64 = 1e-8;
const MAX_SECONDS_PER_TAU: f64 = 1.0;
const TOL_CUTOFF: f64 = 1e-6;
const TOL_TOP: f64 = 1e-6;
const TOL_HIRE_PROB: f64 = 1e-3;
const CROSSING_WINDOW: (f64, f64) = (0.30, 0.42);
const TOL_CROSSING_VS_ORACLE: f64 = 1e-3;
const TOL_TRANSFER_MIN: f64 = 1e-5;
const TOL_POOLING_MARGIN: f64 = 1e-9;
const TOL_POOLING_CUTOFF: f64 = 1e-6;
const TOL_CONSTRAINT: f64 = 1e-7;
const TOL_ZERO_TRANSFER: f64 = 1e-8;
const TOL_LAMBDA: f64 = 1e-12;
const TOL_XI_ZERO: f64 = 1e-8;
const TOL_ORACLE: f64 = 1e-8;
const TOL_PERTURBATION: f64 = 1e-6;
const PERTURBATIONS: usize = 1000;
const EPSILON: f64 = 0.01;

fn poly(a: f64) -> TypeDistribution {
    TypeDistribution::polynomial(a).unwrap()
}

fn scenario(tau: f64, a_trait: f64, a_non: f64, cost: Arc<dyn CostModel>) -> Scenario {
    Scenario::new(PRICE, tau, SHARE, poly(a_trait), poly(a_non), cost, Tolerances::default()).unwrap()
}

fn mlrp(tau: f64) -> Scenario {
    scenario(tau, 0.7, 0.3, Arc::new(QuadraticCost))
}

fn reverse(tau: f64) -> Scenario {
    scenario(tau, 0.3, 0.7, Arc::new(QuadraticCost))
}

fn regression(tau: f64) -> Scenario {
    scenario(tau, 0.7, 0.3, Arc::new(PolyphraseCost::new(0.1).unwrap()))
}

/// Every scenario the suite solves.
fn all_scenarios() -> Vec<(String, Scenario)> {
    let mut out = Vec::new();
    for tau in TAUS {
        out.push((format!("MLRP tau={tau}"), mlrp(tau)));
        out.push((format!("regression-cost tau={tau}"), regression(tau)));
    }
    for tau in [0.0, 0.2, 0.4, 0.8] {
        out.push((format!("reverse tau={tau}"), reverse(tau)));
    }
    out
}

/// Quadratic cost, F = θ^a: the separating first-order condition is
/// linear in q, so q = P_eff − θ(1 + 1/a), clamped.
fn closed_form_q(p_eff: f64, a: f64, theta: f64) -> f64 {
    (p_eff - theta * (1.0 + 1.0 / a)).max(0.0)
}

fn closed_form_cutoff(p_eff: f64, a: f64) -> f64 {
    (p_eff * a / (1.0 + a)).min(1.0)
}

/// Bisection on the first-order residual, sharing no code with the solver.
fn bisect_q(p_eff: f64, a: f64, theta: f64) -> f64 {
    let r = |q: f64| p_eff - (q + theta) - theta / a;
    if r(0.0) <= 0.0 {
        return 0.0;
    }
    let (mut lo, mut hi) = (0.0, 4.0 * p_eff + 4.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if r(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

struct Line {
    pass: bool,
    text: String,
}

fn line(pass: bool, text: impl Into<String>) -> Line {
    Line { pass, text: text.into() }
}

fn c1_closed_form() -> Line {
    let grid = uniform_grid(0.0, 1.0, 2001);
    let mut worst_err: f64 = 0.0;
    let mut worst_secs: f64 = 0.0;
    for tau in TAUS {
        let start = Instant::now();
        let s = mlrp(tau);
        let m = assemble_menu(&s).unwrap();
        let solved: Vec<(f64, f64)> = grid
            .iter()
            .map(|&x| (m.quantity(Group::Trait, x), m.quantity(Group::NonTrait, x)))
            .collect();
        worst_secs = worst_secs.max(start.elapsed().as_secs_f64());
        for (&x, &(qt, qn)) in grid.iter().zip(&solved) {
            for (q, p_eff, a) in [(qt, PRICE / (1.0 - tau), 0.7), (qn, PRICE, 0.3)] {
                let exact = closed_form_q(p_eff, a, x);
                let bisected = bisect_q(p_eff, a, x);
                worst_err = worst_err.max((q - exact).abs()).max((q - bisected).abs());
            }
        }
    }
    line(
        worst_err <= TOL_CLOSED_FORM && worst_secs < MAX_SECONDS_PER_TAU,
        format!(
            "closed-form quantities: max |err| {worst_err:.2e} (tol {TOL_CLOSED_FORM:e}), slowest tau {worst_secs:.3}s (limit {MAX_SECONDS_PER_TAU}s)"
        ),
    )
}

fn c2_cutoffs() -> Line {
    let mut ok = true;
    let mut parts = Vec::new();
    let n_star = assemble_menu(&mlrp(0.0)).unwrap().hiring_cutoff(Group::NonTrait);
    let n_oracle = closed_form_cutoff(PRICE, 0.3);
    ok &= (n_star - n_oracle).abs() <= TOL_CUTOFF && (n_star - 0.173077).abs() <= TOL_CUTOFF;
    parts.push(format!("theta_N* {n_star:.7}"));
    for (tau, literal) in [(0.0, 0.308824), (0.2, 0.386029), (0.4, 0.514706)] {
        let t = assemble_menu(&mlrp(tau)).unwrap().hiring_cutoff(Group::Trait);
        let oracle = closed_form_cutoff(PRICE / (1.0 - tau), 0.7);
        ok &= (t - oracle).abs() <= TOL_CUTOFF && (t - literal).abs() <= TOL_CUTOFF;
        parts.push(format!("theta_T*({tau}) {t:.7}"));
    }
    let sweep: Vec<f64> = uniform_grid(0.0, 0.6, 61)
        .into_iter()
        .map(|tau| assemble_menu(&mlrp(tau)).unwrap().hiring_cutoff(Group::Trait))
        .collect();
    let increasing = sweep.windows(2).all(|w| w[1] > w[0]);
    ok &= increasing;
    parts.push(format!("strictly increasing over 61 taus: {increasing}"));
    line(ok, format!("cutoffs (tol {TOL_CUTOFF:e}): {}", parts.join(", ")))
}

fn c3_top() -> Line {
    let mut worst: f64 = 0.0;
    for (_, s) in all_scenarios() {
        let m = assemble_menu(&s).unwrap();
        let c = s.cost();
        worst = worst
            .max((c.c_q(m.quantity(Group::Trait, 0.0), 0.0) - PRICE / (1.0 - s.tax_credit())).abs())
            .max((c.c_q(m.quantity(Group::NonTrait, 0.0), 0.0) - PRICE).abs());
    }
    line(
        worst <= TOL_TOP,
        format!("no distortion at the top over {} scenarios: max |C_q − price| {worst:.2e} (tol {TOL_TOP:e})", all_scenarios().len()),
    )
}

fn c4_hiring_crossing() -> Line {
    let taus = uniform_grid(0.0, 0.6, 61);
    let rows: Vec<(f64, f64, f64)> = taus
        .iter()
        .map(|&tau| {
            let m = assemble_menu(&mlrp(tau)).unwrap();
            (tau, m.hire_probability(Group::Trait), m.hire_probability(Group::NonTrait))
        })
        .collect();
    let crossing = rows.windows(2).find_map(|w| {
        let (ga, gb) = (w[0].1 - w[0].2, w[1].1 - w[1].2);
        (ga < 0.0 && gb >= 0.0).then(|| w[0].0 + (w[1].0 - w[0].0) * ga / (ga - gb))
    });
    // F^T(θ_T*(0)/(1−τ)) = F^N(θ_N*) solved for τ
    let hire_n = closed_form_cutoff(PRICE, 0.3).powf(0.3);
    let hire_t0 = closed_form_cutoff(PRICE, 0.7).powf(0.7);
    let oracle = 1.0 - closed_form_cutoff(PRICE, 0.7) / hire_n.powf(1.0 / 0.7);
    let (_, t0, n0) = rows[0];
    let ok = crossing.is_some_and(|c| {
        (CROSSING_WINDOW.0..=CROSSING_WINDOW.1).contains(&c) && (c - oracle).abs() <= TOL_CROSSING_VS_ORACLE
    }) && (t0 - hire_t0).abs() <= TOL_HIRE_PROB
        && (t0 - 0.4393).abs() <= TOL_HIRE_PROB
        && (n0 - hire_n).abs() <= TOL_HIRE_PROB
        && (n0 - 0.5908).abs() <= TOL_HIRE_PROB
        && t0 < n0;
    line(
        ok,
        format!(
            "hiring-probability crossing at tau {} (oracle {oracle:.4}, window {:?}); hire_T(0) {t0:.4} < hire_N {n0:.4}",
            crossing.map_or("none".into(), |c| format!("{c:.4}")),
            CROSSING_WINDOW
        ),
    )
}

/// max over θ of ∫_θ^1 (q^N − q^T) dx for the τ=0 separating schedules
/// under quadratic cost; both integrands are linear, so the maximum sits
/// at θ = 0 and equals the difference of two triangle areas.
fn transfer_min_oracle() -> f64 {
    let tri = |a: f64| 0.5 * PRICE * closed_form_cutoff(PRICE, a);
    tri(0.7) - tri(0.3)
}

fn c5_reverse_pooling() -> Line {
    let s = reverse(0.0);
    let m = assemble_menu(&s).unwrap();
    let cands = build_candidate_menus(&s).unwrap();
    let get = |k: CandidateKind| cands.iter().find(|c| c.kind == k).unwrap();
    let sep = get(CandidateKind::FullSeparation);
    let pool = get(CandidateKind::FullPooling);
    let margin = pool.objective - sep.objective;
    let oracle = transfer_min_oracle();
    let ok = margin > TOL_POOLING_MARGIN
        && (sep.transfer - oracle).abs() <= TOL_TRANSFER_MIN
        && m.regime() == MenuRegime::FullPooling
        && m.pooling_cutoff() == 0.0;
    line(
        ok,
        format!(
            "reverse tau=0: pooling beats separation by {margin:.6} (> {TOL_POOLING_MARGIN:e}); separation transfer {:.7} vs oracle {oracle:.7} (tol {TOL_TRANSFER_MIN:e}); regime {} theta* {}",
            sep.transfer,
            m.regime(),
            m.pooling_cutoff()
        ),
    )
}

fn c6_pooling_cutoff() -> Line {
    // (ρ^T − ρ^N)·C_qθ = Pτ/(1−τ) with C_qθ = 1 and ρ = θ/a
    let slope = 1.0 / 0.3 - 1.0 / 0.7;
    let oracle = |tau: f64| (PRICE * tau / (1.0 - tau) / slope).min(1.0);
    let at02 = pooling_cutoff(&reverse(0.2)).unwrap();
    let taus = uniform_grid(0.0, 0.9, 91);
    let path: Vec<f64> = taus.iter().map(|&t| pooling_cutoff(&reverse(t)).unwrap()).collect();
    let monotone = path.windows(2).all(|w| w[1] >= w[0]);
    let path_err = taus.iter().zip(&path).map(|(&t, &c)| (c - oracle(t)).abs()).fold(0.0, f64::max);
    let at08 = pooling_cutoff(&reverse(0.8)).unwrap();
    let separated = assemble_menu(&reverse(0.8)).unwrap().regime() == MenuRegime::FullSeparation;
    let ok = (at02 - 0.098437).abs() <= TOL_POOLING_CUTOFF
        && (at02 - oracle(0.2)).abs() <= TOL_POOLING_CUTOFF
        && monotone
        && path_err <= TOL_POOLING_CUTOFF
        && at08 == 1.0
        && separated
        && PRICE * 0.8 / 0.2 > 1.904762;
    line(
        ok,
        format!(
            "pooling cutoff: theta*(0.2) {at02:.7} (oracle {:.7}), non-decreasing over 91 taus: {monotone} (max err {path_err:.1e}), theta*(0.8) {at08} full separation: {separated}",
            oracle(0.2)
        ),
    )
}

fn c7_constraints() -> Line {
    let grid = verification_grid(200);
    let mut worst: f64 = 0.0;
    let mut worst_transfer: f64 = 0.0;
    let mut failing = Vec::new();
    for (name, s) in all_scenarios() {
        let m = assemble_menu(&s).unwrap();
        let table = ContractTable::sample(&m, s.cost(), &grid);
        for e in constraint_entries(&table, 0.0, TOL_CONSTRAINT) {
            worst = worst.max(e.worst_violation);
            if !e.pass {
                failing.push(format!("{name}/{}", e.name));
            }
        }
        let rule = Rule::new(8);
        let (u, _) = required_transfer(&m, m.grid(), s.cost(), &rule);
        worst_transfer = worst_transfer.max(u.abs());
    }
    line(
        failing.is_empty() && worst_transfer <= TOL_ZERO_TRANSFER,
        format!(
            "constraint oracles on a 200-point grid: worst violation {worst:.2e} (tol {TOL_CONSTRAINT:e}), max required transfer {worst_transfer:.2e} (tol {TOL_ZERO_TRANSFER:e}){}",
            if failing.is_empty() { String::new() } else { format!(", failing {failing:?}") }
        ),
    )
}

fn c8_transfer_gradient() -> Line {
    let grid = uniform_grid(1e-6, 1.0, 2001);
    let lambda = check_lambda(&poly(0.3), &poly(0.7), SHARE, &grid, TOL_LAMBDA).unwrap();
    let transfers: Vec<f64> = (0..=6).map(|k| k as f64 * 0.01).collect();
    let mut ok = lambda.pass;
    let mut parts = vec![format!("Λ worst {:.1e}", lambda.worst_violation)];
    for tau in [0.0, 0.2] {
        let s = reverse(tau);
        let m: OptimalMenu = assemble_menu(&s).unwrap();
        let r = check_transfer_gradient(&s, &transfers).unwrap();
        let xi0 = xi(&m, Group::Trait, 0.0);
        let slopes: Vec<f64> = r.points.iter().map(|p| p.finite_difference).collect();
        let all_negative = slopes.iter().all(|&d| d < 0.0);
        ok &= xi0.abs() <= TOL_XI_ZERO && r.xi_at_top < r.bound && all_negative;
        parts.push(format!(
            "tau={tau}: Ξ^T(0) {xi0:.1e}, Ξ^T(top) {:.5} < {:.2}, max dJ/dŪ {:.5}",
            r.xi_at_top,
            r.bound,
            slopes.iter().copied().fold(f64::NEG_INFINITY, f64::max)
        ));
    }
    // oracle for the slope at Ū = 0, τ = 0: −π_T + |Λ| at the last hired type
    let s = reverse(0.0);
    let m = assemble_menu(&s).unwrap();
    let top = m.hiring_cutoff(Group::Trait);
    let ta = |x: f64| x.powf(0.3);
    let na = |x: f64| x.powf(0.7);
    let (ft, fnn) = (0.3 * top.powf(-0.7), 0.7 * top.powf(-0.3));
    let fhat = SHARE * ft + (1.0 - SHARE) * fnn;
    let lam = SHARE * (1.0 - SHARE) * (na(top) * ft - ta(top) * fnn) / fhat;
    let xi_top = xi(&m, Group::Trait, top);
    ok &= (xi_top - lam.abs()).abs() <= 1e-9;
    parts.push(format!("Ξ^T(top) vs |Λ(top)| oracle {:.1e}", (xi_top - lam.abs()).abs()));
    line(ok, format!("rent-gap and transfer-gradient checks: {}", parts.join("; ")))
}

fn c9_oracle() -> Line {
    let mut worst: f64 = 0.0;
    for s in [mlrp(0.0), mlrp(0.2), mlrp(0.4), mlrp(0.6), regression(0.0), regression(0.2), regression(0.6)] {
        let m = assemble_menu(&s).unwrap();
        let o = screening::verifier::mlrp_foc_oracle(&s, m.grid()).unwrap();
        for g in Group::BOTH {
            for (a, b) in o.q(g).iter().zip(m.node_quantities(g)) {
                worst = worst.max((a - b).abs());
            }
        }
    }
    line(worst <= TOL_ORACLE, format!("first-order-condition oracle vs solver: max |Δq| {worst:.2e} (tol {TOL_ORACLE:e})"))
}

fn c10_local() -> Line {
    let mut worst = f64::NEG_INFINITY;
    let scenarios = all_scenarios();
    for (i, (_, s)) in scenarios.iter().enumerate() {
        let menu = assemble_menu(s).unwrap().to_contract_menu();
        let p = perturbation_test(&menu, s, PERTURBATIONS, EPSILON, i as u64, TOL_PERTURBATION);
        worst = worst.max(p.max_improvement);
    }
    let cands = build_candidate_menus(&reverse(0.0)).unwrap();
    let obj = |k: CandidateKind| cands.iter().find(|c| c.kind == k).unwrap().objective;
    let pool = obj(CandidateKind::FullPooling);
    let best_other = cands
        .iter()
        .filter(|c| c.kind != CandidateKind::FullPooling)
        .map(|c| c.objective)
        .fold(f64::NEG_INFINITY, f64::max);
    let costly_first = obj(CandidateKind::SeparateLowPoolHigh) > obj(CandidateKind::PoolLowSeparateHigh);
    let ok = worst <= TOL_PERTURBATION && pool > best_other && costly_first;
    line(
        ok,
        format!(
            "local optimality: best gain over {PERTURBATIONS} perturbations x {} menus {worst:.2e} (tol {TOL_PERTURBATION:e}); full pooling best: {}; pooling costly types beats pooling efficient types: {costly_first}",
            scenarios.len(),
            pool > best_other
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Line); 10] = [
        ("1", c1_closed_form),
        ("2", c2_cutoffs),
        ("3", c3_top),
        ("4", c4_hiring_crossing),
        ("5", c5_reverse_pooling),
        ("6", c6_pooling_cutoff),
        ("7", c7_constraints),
        ("8", c8_transfer_gradient),
        ("9", c9_oracle),
        ("10", c10_local),
    ];
    let mut failed = 0;
    for (id, run) in criteria {
        let l = run();
        if !l.pass {
            failed += 1;
        }
        println!("criterion {id:>2}: {} {}", if l.pass { "PASS" } else { "FAIL" }, l.text);
    }
    println!("acceptance: {} of 10 passed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
