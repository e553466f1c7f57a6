//! Production-cost models and their validity checks.

use std::fmt::Debug;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Production cost C(q, θ) in wage units with the partials the solver needs.
pub trait CostModel: Debug + Send + Sync {
    fn cost(&self, q: f64, theta: f64) -> f64;
    fn c_q(&self, q: f64, theta: f64) -> f64;
    fn c_theta(&self, q: f64, theta: f64) -> f64;
    fn c_qtheta(&self, q: f64, theta: f64) -> f64;
    fn c_qq(&self, q: f64, theta: f64) -> f64;

    /// ∂C_qθ/∂q, used only as a Newton slope; defaults to a central difference.
    fn c_qqtheta(&self, q: f64, theta: f64) -> f64 {
        let h = fd_step(q);
        (self.c_qtheta(q + h, theta) - self.c_qtheta(q - h, theta)) / (2.0 * h)
    }

    /// Serializable description, when the model has one.
    fn spec(&self) -> Option<CostSpec> {
        None
    }
}

/// C = q²/2 + θq.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct QuadraticCost;

impl CostModel for QuadraticCost {
    fn cost(&self, q: f64, theta: f64) -> f64 {
        0.5 * q * q + theta * q
    }
    fn c_q(&self, q: f64, theta: f64) -> f64 {
        q + theta
    }
    fn c_theta(&self, q: f64, _theta: f64) -> f64 {
        q
    }
    fn c_qtheta(&self, _q: f64, _theta: f64) -> f64 {
        1.0
    }
    fn c_qq(&self, _q: f64, _theta: f64) -> f64 {
        1.0
    }
    fn c_qqtheta(&self, _q: f64, _theta: f64) -> f64 {
        0.0
    }
    fn spec(&self) -> Option<CostSpec> {
        Some(CostSpec::Quadratic)
    }
}

/// C = q²/2 + θq + c·θq² with c ≥ 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolyphraseCost {
    c: f64,
}

impl PolyphraseCost {
    pub fn new(c: f64) -> Result<Self> {
        if !(c.is_finite() && c >= 0.0) {
            return Err(Error::input("c", format!("polyphrase coefficient must be finite and >= 0, got {c}")));
        }
        Ok(PolyphraseCost { c })
    }

    pub fn coefficient(&self) -> f64 {
        self.c
    }
}

impl CostModel for PolyphraseCost {
    fn cost(&self, q: f64, theta: f64) -> f64 {
        0.5 * q * q + theta * q + self.c * theta * q * q
    }
    fn c_q(&self, q: f64, theta: f64) -> f64 {
        q + theta + 2.0 * self.c * theta * q
    }
    fn c_theta(&self, q: f64, _theta: f64) -> f64 {
        q + self.c * q * q
    }
    fn c_qtheta(&self, q: f64, _theta: f64) -> f64 {
        1.0 + 2.0 * self.c * q
    }
    fn c_qq(&self, _q: f64, theta: f64) -> f64 {
        1.0 + 2.0 * self.c * theta
    }
    fn c_qqtheta(&self, _q: f64, _theta: f64) -> f64 {
        2.0 * self.c
    }
    fn spec(&self) -> Option<CostSpec> {
        Some(CostSpec::Polyphrase { c: self.c })
    }
}

/// Cost section of a scenario file: `{"cost":"quadratic"}` or
/// `{"cost":"polyphrase","c":0.1}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "cost", rename_all = "lowercase")]
pub enum CostSpec {
    Quadratic,
    Polyphrase { c: f64 },
}

impl CostSpec {
    pub fn build(&self) -> Result<std::sync::Arc<dyn CostModel>> {
        Ok(match *self {
            CostSpec::Quadratic => std::sync::Arc::new(QuadraticCost),
            CostSpec::Polyphrase { c } => std::sync::Arc::new(PolyphraseCost::new(c)?),
        })
    }
}

/// Ψ(q, θ) = C_q + ρ·C_qθ.
pub fn virtual_marginal_cost(cost: &dyn CostModel, q: f64, theta: f64, rho: f64) -> f64 {
    cost.c_q(q, theta) + rho * cost.c_qtheta(q, theta)
}

/// Sample points for [`validate_cost`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lattice {
    pub q_max: f64,
    pub q_points: usize,
    pub theta_points: usize,
}

impl Lattice {
    pub fn new(q_max: f64) -> Self {
        Lattice {
            q_max,
            q_points: 41,
            theta_points: 41,
        }
    }

    fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let nq = self.q_points.max(2);
        let nt = self.theta_points.max(2);
        (0..nq).flat_map(move |i| {
            let q = self.q_max * i as f64 / (nq - 1) as f64;
            (0..nt).map(move |j| (q, j as f64 / (nt - 1) as f64))
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CostCheck {
    pub name: String,
    pub pass: bool,
    pub worst: f64,
    pub at: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CostValidationReport {
    pub checks: Vec<CostCheck>,
    /// Conditions that are noted but do not reject the model.
    pub warnings: Vec<CostCheck>,
}

impl CostValidationReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn max_derivative_mismatch(&self) -> f64 {
        self.checks
            .iter()
            .filter(|c| c.name.starts_with("fd_"))
            .map(|c| c.worst)
            .fold(0.0, f64::max)
    }
}

pub const FD_REL_TOL: f64 = 1e-5;

fn fd_step(x: f64) -> f64 {
    1e-5 * x.abs().max(1.0)
}

struct Tracker {
    name: &'static str,
    worst: f64,
    at: (f64, f64),
    failed: bool,
}

impl Tracker {
    fn new(name: &'static str) -> Self {
        Tracker {
            name,
            worst: 0.0,
            at: (0.0, 0.0),
            failed: false,
        }
    }

    fn note(&mut self, violation: f64, failed: bool, q: f64, theta: f64) {
        let violation = if violation.is_nan() { f64::INFINITY } else { violation };
        if violation > self.worst || (failed && !self.failed) {
            self.worst = self.worst.max(violation);
            self.at = (q, theta);
        }
        self.failed |= failed;
    }

    /// Requires `v > 0`, or `v >= 0` when `strict` is false.
    fn positive(&mut self, v: f64, strict: bool, q: f64, theta: f64) {
        let failed = v < 0.0 || (strict && v <= 0.0) || v.is_nan();
        self.note((-v).max(0.0), failed, q, theta);
    }

    fn at_most(&mut self, v: f64, limit: f64, q: f64, theta: f64) {
        self.note(v.max(0.0), !(v <= limit), q, theta);
    }

    fn finish(self) -> CostCheck {
        CostCheck {
            name: self.name.to_string(),
            pass: !self.failed,
            worst: self.worst,
            at: self.at,
        }
    }
}

fn rel_err(supplied: f64, fd: f64) -> f64 {
    (supplied - fd).abs() / fd.abs().max(1e-6)
}

/// Sign conditions plus finite-difference consistency of the supplied
/// partials. First partials are compared against differences of C, second
/// partials against differences of the supplied C_q.
pub fn validate_cost(cost: &dyn CostModel, lattice: &Lattice) -> CostValidationReport {
    let mut sign_cq = Tracker::new("sign_c_q");
    let mut sign_ct = Tracker::new("sign_c_theta");
    let mut sign_cqq = Tracker::new("sign_c_qq");
    let mut sign_cqt = Tracker::new("sign_c_qtheta");
    let mut fd_cq = Tracker::new("fd_c_q");
    let mut fd_ct = Tracker::new("fd_c_theta");
    let mut fd_cqq = Tracker::new("fd_c_qq");
    let mut fd_cqt = Tracker::new("fd_c_qtheta");
    let mut third = Tracker::new("third_derivative_qq_theta");

    for (q, theta) in lattice.points() {
        let hq = fd_step(q);
        let ht = fd_step(theta);
        let cq = cost.c_q(q, theta);
        let ct = cost.c_theta(q, theta);
        let cqq = cost.c_qq(q, theta);
        let cqt = cost.c_qtheta(q, theta);

        // C_q may vanish only at the origin, C_θ only at q = 0
        sign_cq.positive(cq, q > 0.0 || theta > 0.0, q, theta);
        sign_ct.positive(ct, q > 0.0, q, theta);
        sign_cqq.positive(cqq, true, q, theta);
        sign_cqt.positive(cqt, true, q, theta);

        let d_q = (cost.cost(q + hq, theta) - cost.cost(q - hq, theta)) / (2.0 * hq);
        let d_t = (cost.cost(q, theta + ht) - cost.cost(q, theta - ht)) / (2.0 * ht);
        let d_qq = (cost.c_q(q + hq, theta) - cost.c_q(q - hq, theta)) / (2.0 * hq);
        let d_qt = (cost.c_q(q, theta + ht) - cost.c_q(q, theta - ht)) / (2.0 * ht);
        fd_cq.at_most(rel_err(cq, d_q), FD_REL_TOL, q, theta);
        fd_ct.at_most(rel_err(ct, d_t), FD_REL_TOL, q, theta);
        fd_cqq.at_most(rel_err(cqq, d_qq), FD_REL_TOL, q, theta);
        fd_cqt.at_most(rel_err(cqt, d_qt), FD_REL_TOL, q, theta);

        let d_qqt = (cost.c_qq(q, theta + ht) - cost.c_qq(q, theta - ht)) / (2.0 * ht);
        third.at_most(d_qqt, 1e-8, q, theta);
    }

    let checks = [sign_cq, sign_ct, sign_cqq, sign_cqt, fd_cq, fd_ct, fd_cqq, fd_cqt]
        .into_iter()
        .map(Tracker::finish)
        .collect();
    CostValidationReport {
        checks,
        warnings: vec![third.finish()],
    }
}
