//! Cost-type laws on [0, 1], their ordering checks, and the mixture measures
//! used when the two groups share a contract.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature;

/// Absolute tolerance on adjacent differences in the monotonicity scans,
/// scaled by the magnitude of the compared values when they exceed one.
pub const MONOTONE_TOL: f64 = 1e-10;

/// Smallest type at which densities are evaluated when a pdf is singular at 0.
const SINGULAR_FLOOR: f64 = 1e-300;

/// Serialized form used in scenario files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum DistributionSpec {
    Polynomial { exponent: f64 },
    Table { knots: Vec<f64>, cdf: Vec<f64> },
}

/// F(θ) = θ^a on [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialDistribution {
    exponent: f64,
}

impl PolynomialDistribution {
    pub fn new(exponent: f64) -> Result<Self> {
        if !(exponent.is_finite() && exponent > 0.0) {
            return Err(Error::InvalidDistribution(format!(
                "polynomial exponent must be positive and finite, got {exponent}"
            )));
        }
        Ok(PolynomialDistribution { exponent })
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }
}

/// Monotone piecewise-cubic (Fritsch-Carlson) interpolation of a tabulated CDF.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedDistribution {
    knots: Vec<f64>,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl TabulatedDistribution {
    pub fn new(knots: Vec<f64>, cdf: Vec<f64>) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidDistribution(msg));
        if knots.len() != cdf.len() {
            return bad(format!(
                "knots ({}) and cdf ({}) differ in length",
                knots.len(),
                cdf.len()
            ));
        }
        if knots.len() < 2 {
            return bad("a table needs at least two knots".into());
        }
        if knots.iter().chain(&cdf).any(|v| !v.is_finite()) {
            return bad("table contains a non-finite value".into());
        }
        let n = knots.len();
        if knots[0] != 0.0 || knots[n - 1] != 1.0 {
            return bad("knots must start at 0 and end at 1".into());
        }
        if cdf[0].abs() > 1e-12 || (cdf[n - 1] - 1.0).abs() > 1e-12 {
            return bad("cdf must be 0 at the first knot and 1 at the last".into());
        }
        if let Some(i) = (1..n).find(|&i| knots[i] <= knots[i - 1]) {
            return bad(format!("knots not strictly increasing at index {i}"));
        }
        if let Some(i) = (1..n).find(|&i| cdf[i] <= cdf[i - 1]) {
            return bad(format!(
                "cdf values must strictly increase (index {i}); a flat piece has zero density"
            ));
        }
        let mut values = cdf;
        values[0] = 0.0;
        values[n - 1] = 1.0;
        let slopes = monotone_slopes(&knots, &values);
        let dist = TabulatedDistribution {
            knots,
            values,
            slopes,
        };
        for (i, &x) in dist.knots.iter().enumerate().skip(1) {
            let f = dist.pdf_at(x);
            if f <= 0.0 || !f.is_finite() {
                return bad(format!("interpolated pdf is not positive at knot {i} (θ = {x})"));
            }
        }
        Ok(dist)
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn cdf_values(&self) -> &[f64] {
        &self.values
    }

    fn segment(&self, theta: f64) -> usize {
        let n = self.knots.len();
        self.knots
            .partition_point(|&x| x <= theta)
            .saturating_sub(1)
            .min(n - 2)
    }

    fn cdf_at(&self, theta: f64) -> f64 {
        let k = self.segment(theta);
        let (x0, x1) = (self.knots[k], self.knots[k + 1]);
        let h = x1 - x0;
        let t = (theta - x0) / h;
        let (t2, t3) = (t * t, t * t * t);
        let v = self.values[k] * (2.0 * t3 - 3.0 * t2 + 1.0)
            + h * self.slopes[k] * (t3 - 2.0 * t2 + t)
            + self.values[k + 1] * (-2.0 * t3 + 3.0 * t2)
            + h * self.slopes[k + 1] * (t3 - t2);
        v.clamp(0.0, 1.0)
    }

    fn pdf_at(&self, theta: f64) -> f64 {
        let k = self.segment(theta);
        let (x0, x1) = (self.knots[k], self.knots[k + 1]);
        let h = x1 - x0;
        let t = (theta - x0) / h;
        let t2 = t * t;
        (self.values[k] * (6.0 * t2 - 6.0 * t)
            + h * self.slopes[k] * (3.0 * t2 - 4.0 * t + 1.0)
            + self.values[k + 1] * (-6.0 * t2 + 6.0 * t)
            + h * self.slopes[k + 1] * (3.0 * t2 - 2.0 * t))
            / h
    }
}

// Fritsch-Carlson slopes with the three-point endpoint formula. Endpoint
// slopes that come out non-positive fall back to half the end secant so the
// density stays positive at 0 and 1.
fn monotone_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let delta: Vec<f64> = (0..n - 1).map(|k| (y[k + 1] - y[k]) / h[k]).collect();
    let mut d = vec![0.0; n];
    if n == 2 {
        d[0] = delta[0];
        d[1] = delta[0];
        return d;
    }
    for k in 1..n - 1 {
        let (a, b) = (delta[k - 1], delta[k]);
        if a * b <= 0.0 {
            d[k] = 0.0;
        } else {
            let w1 = 2.0 * h[k] + h[k - 1];
            let w2 = h[k] + 2.0 * h[k - 1];
            d[k] = (w1 + w2) / (w1 / a + w2 / b);
        }
    }
    let end = |h0: f64, h1: f64, d0: f64, d1: f64| {
        let s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if s <= 0.0 {
            0.5 * d0
        } else if d0 * d1 <= 0.0 && s.abs() > 3.0 * d0.abs() {
            3.0 * d0
        } else {
            s
        }
    };
    d[0] = end(h[0], h[1], delta[0], delta[1]);
    d[n - 1] = end(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    d
}

/// A cost-type law on [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub enum TypeDistribution {
    Polynomial(PolynomialDistribution),
    Tabulated(TabulatedDistribution),
}

impl TypeDistribution {
    pub fn polynomial(exponent: f64) -> Result<Self> {
        PolynomialDistribution::new(exponent).map(TypeDistribution::Polynomial)
    }

    pub fn tabulated(knots: Vec<f64>, cdf: Vec<f64>) -> Result<Self> {
        TabulatedDistribution::new(knots, cdf).map(TypeDistribution::Tabulated)
    }

    pub fn from_spec(spec: &DistributionSpec) -> Result<Self> {
        match spec {
            DistributionSpec::Polynomial { exponent } => Self::polynomial(*exponent),
            DistributionSpec::Table { knots, cdf } => Self::tabulated(knots.clone(), cdf.clone()),
        }
    }

    pub fn spec(&self) -> DistributionSpec {
        match self {
            TypeDistribution::Polynomial(p) => DistributionSpec::Polynomial {
                exponent: p.exponent,
            },
            TypeDistribution::Tabulated(t) => DistributionSpec::Table {
                knots: t.knots.clone(),
                cdf: t.values.clone(),
            },
        }
    }

    pub fn cdf(&self, theta: f64) -> f64 {
        let theta = theta.clamp(0.0, 1.0);
        match self {
            TypeDistribution::Polynomial(p) => theta.powf(p.exponent),
            TypeDistribution::Tabulated(t) => t.cdf_at(theta),
        }
    }

    /// Density; may be infinite at θ = 0.
    pub fn pdf(&self, theta: f64) -> f64 {
        let theta = theta.clamp(0.0, 1.0);
        match self {
            TypeDistribution::Polynomial(p) => {
                let a = p.exponent;
                if theta == 0.0 {
                    match a.partial_cmp(&1.0) {
                        Some(std::cmp::Ordering::Less) => f64::INFINITY,
                        Some(std::cmp::Ordering::Equal) => 1.0,
                        _ => 0.0,
                    }
                } else {
                    a * theta.powf(a - 1.0)
                }
            }
            TypeDistribution::Tabulated(t) => t.pdf_at(theta),
        }
    }

    /// ρ(θ) = F(θ)/f(θ), continuously extended at 0.
    pub fn reverse_hazard_ratio(&self, theta: f64) -> f64 {
        let theta = theta.clamp(0.0, 1.0);
        match self {
            TypeDistribution::Polynomial(p) => theta / p.exponent,
            TypeDistribution::Tabulated(t) => {
                if theta == 0.0 {
                    return 0.0;
                }
                let f = t.pdf_at(theta);
                if f > 0.0 {
                    t.cdf_at(theta) / f
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    /// Density evaluated away from a singular origin.
    pub(crate) fn pdf_regular(&self, theta: f64) -> f64 {
        let f = self.pdf(theta);
        if f.is_finite() {
            f
        } else {
            self.pdf(theta.max(SINGULAR_FLOOR))
        }
    }

    /// ∫_a^b F(θ) dθ.
    pub fn cdf_integral(&self, a: f64, b: f64) -> f64 {
        let (a, b) = (a.clamp(0.0, 1.0), b.clamp(0.0, 1.0));
        if b <= a {
            return 0.0;
        }
        match self {
            TypeDistribution::Polynomial(p) => {
                let e = p.exponent + 1.0;
                (b.powf(e) - a.powf(e)) / e
            }
            TypeDistribution::Tabulated(t) => {
                let rule = quadrature::three_point();
                let mut points = vec![a];
                points.extend(t.knots.iter().copied().filter(|&x| x > a && x < b));
                points.push(b);
                rule.integrate_panels(&points, |x| t.cdf_at(x))
            }
        }
    }

    /// Smallest θ with F(θ) ≥ u.
    pub fn quantile(&self, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        match self {
            TypeDistribution::Polynomial(p) => u.powf(1.0 / p.exponent),
            TypeDistribution::Tabulated(t) => {
                let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if t.cdf_at(mid) < u {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                    if hi - lo <= f64::EPSILON * hi.max(1e-300) {
                        break;
                    }
                }
                hi
            }
        }
    }

    /// Grid scan of the invariants every law must satisfy.
    pub fn validate(&self, grid: &[f64]) -> Result<()> {
        let tol = match self {
            TypeDistribution::Polynomial(_) => 1e-8,
            TypeDistribution::Tabulated(_) => 1e-5,
        };
        if self.cdf(0.0) != 0.0 || (self.cdf(1.0) - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidDistribution("cdf must run from 0 to 1".into()));
        }
        let mut prev = 0.0;
        for &x in grid {
            let (cdf, pdf, rho) = (self.cdf(x), self.pdf(x), self.reverse_hazard_ratio(x));
            if cdf < prev {
                return Err(Error::InvalidDistribution(format!("cdf decreases at θ = {x}")));
            }
            prev = cdf;
            if x > 0.0 {
                if !(pdf > 0.0) {
                    return Err(Error::InvalidDistribution(format!(
                        "pdf not positive at θ = {x}"
                    )));
                }
                if (rho * pdf - cdf).abs() > tol {
                    return Err(Error::InvalidDistribution(format!(
                        "ρ·f disagrees with F at θ = {x}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Which way the likelihood ratio f^T/f^N moves with θ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OrderingRegime {
    #[serde(rename = "MLRP")]
    Mlrp,
    #[serde(rename = "ReverseMLRP")]
    ReverseMlrp,
    Neither,
}

impl std::fmt::Display for OrderingRegime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            OrderingRegime::Mlrp => "MLRP",
            OrderingRegime::ReverseMlrp => "ReverseMLRP",
            OrderingRegime::Neither => "Neither",
        })
    }
}

/// 1001 uniform points on [1e-6, 1].
pub fn default_check_grid() -> Vec<f64> {
    uniform_grid(1e-6, 1.0, 1001)
}

pub fn uniform_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let n = n.max(2);
    let step = (hi - lo) / (n - 1) as f64;
    (0..n)
        .map(|i| if i + 1 == n { hi } else { lo + step * i as f64 })
        .collect()
}

fn non_decreasing(values: &[f64]) -> bool {
    values.windows(2).all(|w| {
        let scale = w[0].abs().max(w[1].abs()).max(1.0);
        w[1] - w[0] >= -MONOTONE_TOL * scale
    })
}

fn non_increasing(values: &[f64]) -> bool {
    values.windows(2).all(|w| {
        let scale = w[0].abs().max(w[1].abs()).max(1.0);
        w[1] - w[0] <= MONOTONE_TOL * scale
    })
}

fn likelihood_ratios(d_trait: &TypeDistribution, d_non: &TypeDistribution, grid: &[f64]) -> Result<Vec<f64>> {
    grid.iter()
        .map(|&x| {
            let r = d_trait.pdf(x) / d_non.pdf(x);
            if r.is_finite() {
                Ok(r)
            } else {
                Err(Error::input(
                    "grid",
                    format!("likelihood ratio undefined at θ = {x}; keep the grid away from a singular origin"),
                ))
            }
        })
        .collect()
}

/// True when f^T/f^N is non-decreasing on the grid (ties included).
pub fn satisfies_mlrp(d_trait: &TypeDistribution, d_non: &TypeDistribution, grid: &[f64]) -> Result<bool> {
    Ok(non_decreasing(&likelihood_ratios(d_trait, d_non, grid)?))
}

/// True when f^T/f^N is non-increasing on the grid (ties included).
pub fn satisfies_reverse_mlrp(
    d_trait: &TypeDistribution,
    d_non: &TypeDistribution,
    grid: &[f64],
) -> Result<bool> {
    Ok(non_increasing(&likelihood_ratios(d_trait, d_non, grid)?))
}

pub fn classify_ordering(
    d_trait: &TypeDistribution,
    d_non: &TypeDistribution,
    grid: &[f64],
) -> Result<OrderingRegime> {
    let ratios = likelihood_ratios(d_trait, d_non, grid)?;
    Ok(if non_decreasing(&ratios) {
        OrderingRegime::Mlrp
    } else if non_increasing(&ratios) {
        OrderingRegime::ReverseMlrp
    } else {
        OrderingRegime::Neither
    })
}

/// f/F non-increasing, checked through ρ = F/f being non-decreasing.
pub fn check_monotone_reverse_hazard(d: &TypeDistribution, grid: &[f64]) -> bool {
    let rho: Vec<f64> = grid.iter().map(|&x| d.reverse_hazard_ratio(x)).collect();
    rho.iter().all(|r| r.is_finite()) && non_decreasing(&rho)
}

/// ρ^T − ρ^N non-decreasing.
pub fn check_rent_single_crossing(d_trait: &TypeDistribution, d_non: &TypeDistribution, grid: &[f64]) -> bool {
    let diff: Vec<f64> = grid
        .iter()
        .map(|&x| d_trait.reverse_hazard_ratio(x) - d_non.reverse_hazard_ratio(x))
        .collect();
    diff.iter().all(|r| r.is_finite()) && non_decreasing(&diff)
}

/// Share-weighted blends of the two laws. The "tilde" measures discount the
/// trait component by the tax credit.
#[derive(Debug, Clone, Copy)]
pub struct MixtureMeasures<'a> {
    trait_dist: &'a TypeDistribution,
    nontrait_dist: &'a TypeDistribution,
    trait_share: f64,
    tax_credit: f64,
}

pub fn mixture<'a>(
    d_trait: &'a TypeDistribution,
    d_non: &'a TypeDistribution,
    trait_share: f64,
    tax_credit: f64,
) -> Result<MixtureMeasures<'a>> {
    if !(trait_share > 0.0 && trait_share < 1.0) {
        return Err(Error::input("trait_share", format!("must lie in (0, 1), got {trait_share}")));
    }
    if !(0.0..1.0).contains(&tax_credit) {
        return Err(Error::input("tax_credit", format!("must lie in [0, 1), got {tax_credit}")));
    }
    Ok(MixtureMeasures {
        trait_dist: d_trait,
        nontrait_dist: d_non,
        trait_share,
        tax_credit,
    })
}

impl<'a> MixtureMeasures<'a> {
    pub fn fhat(&self, theta: f64) -> f64 {
        let p = self.trait_share;
        p * self.trait_dist.pdf(theta) + (1.0 - p) * self.nontrait_dist.pdf(theta)
    }

    pub fn ftilde(&self, theta: f64) -> f64 {
        let p = self.trait_share;
        (1.0 - self.tax_credit) * p * self.trait_dist.pdf(theta) + (1.0 - p) * self.nontrait_dist.pdf(theta)
    }

    pub fn cdf_hat(&self, theta: f64) -> f64 {
        let p = self.trait_share;
        p * self.trait_dist.cdf(theta) + (1.0 - p) * self.nontrait_dist.cdf(theta)
    }

    pub fn cdf_tilde(&self, theta: f64) -> f64 {
        let p = self.trait_share;
        (1.0 - self.tax_credit) * p * self.trait_dist.cdf(theta) + (1.0 - p) * self.nontrait_dist.cdf(theta)
    }

    /// Trait weight (1−τ)π_T f^T / f̃ in the blended density.
    pub fn trait_weight(&self, theta: f64) -> f64 {
        let p = self.trait_share;
        let mut x = theta;
        loop {
            let wt = (1.0 - self.tax_credit) * p * self.trait_dist.pdf_regular(x);
            let wn = (1.0 - p) * self.nontrait_dist.pdf_regular(x);
            let total = wt + wn;
            if total > 0.0 && total.is_finite() {
                return wt / total;
            }
            if x >= SINGULAR_FLOOR {
                // both densities vanish together; fall back to the measure weights
                let ct = (1.0 - self.tax_credit) * p * self.trait_dist.cdf(x.max(1e-8));
                let cn = (1.0 - p) * self.nontrait_dist.cdf(x.max(1e-8));
                return ct / (ct + cn);
            }
            x = SINGULAR_FLOOR;
        }
    }

    /// F̃/f̃, the blended reverse hazard ratio.
    pub fn pooled_rho(&self, theta: f64) -> f64 {
        let s = self.trait_weight(theta);
        s * self.trait_dist.reverse_hazard_ratio(theta) + (1.0 - s) * self.nontrait_dist.reverse_hazard_ratio(theta)
    }

    /// f̂/f̃ ≥ 1, the markup on the output price in the pooled equation.
    pub fn price_ratio(&self, theta: f64) -> f64 {
        1.0 + self.tax_credit / (1.0 - self.tax_credit) * self.trait_weight(theta)
    }

    /// f^T f^N / f̂, finite wherever one density is.
    pub fn harmonic_density(&self, theta: f64) -> f64 {
        let p = self.trait_share;
        let ft = self.trait_dist.pdf(theta);
        let fn_ = self.nontrait_dist.pdf(theta);
        let denom = p / fn_ + (1.0 - p) / ft;
        if denom > 0.0 && denom.is_finite() {
            1.0 / denom
        } else {
            0.0
        }
    }

    /// Λ(θ) = π_T(1−π_T)(F^N f^T − F^T f^N)/f̂.
    pub fn lambda(&self, theta: f64) -> f64 {
        let p = self.trait_share;
        let gap = self.nontrait_dist.reverse_hazard_ratio(theta) - self.trait_dist.reverse_hazard_ratio(theta);
        if gap == 0.0 {
            return 0.0;
        }
        p * (1.0 - p) * gap * self.harmonic_density(theta)
    }

    pub fn trait_share(&self) -> f64 {
        self.trait_share
    }

    pub fn tax_credit(&self) -> f64 {
        self.tax_credit
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(a: f64) -> TypeDistribution {
        TypeDistribution::polynomial(a).unwrap()
    }

    #[test]
    fn polynomial_rho_is_linear() {
        let d = poly(0.3);
        for &x in &[0.0, 0.1, 0.5, 1.0] {
            assert!((d.reverse_hazard_ratio(x) - x / 0.3).abs() < 1e-15);
        }
        assert!(d.pdf(0.0).is_infinite());
    }

    #[test]
    fn polynomial_cdf_integral() {
        let d = poly(0.7);
        let direct = quadrature::Rule::new(20).integrate_uniform(0.2, 0.9, 50, |x| x.powf(0.7));
        assert!((d.cdf_integral(0.2, 0.9) - direct).abs() < 1e-12);
    }

    #[test]
    fn ordering_examples() {
        let g = default_check_grid();
        assert_eq!(classify_ordering(&poly(0.7), &poly(0.3), &g).unwrap(), OrderingRegime::Mlrp);
        assert_eq!(classify_ordering(&poly(0.5), &poly(0.5), &g).unwrap(), OrderingRegime::Mlrp);
        assert_eq!(classify_ordering(&poly(0.3), &poly(0.7), &g).unwrap(), OrderingRegime::ReverseMlrp);
    }

    #[test]
    fn grid_touching_singular_origin_is_rejected() {
        let g = uniform_grid(0.0, 1.0, 11);
        assert!(classify_ordering(&poly(0.3), &poly(0.7), &g).is_err());
    }

    #[test]
    fn reverse_hazard_and_single_crossing() {
        let g = default_check_grid();
        assert!(check_monotone_reverse_hazard(&poly(0.3), &g));
        assert!(check_monotone_reverse_hazard(&poly(1.0), &g));
        assert!(check_rent_single_crossing(&poly(0.3), &poly(0.7), &g));
        assert!(check_rent_single_crossing(&poly(0.4), &poly(0.4), &g));
        assert!(!check_rent_single_crossing(&poly(0.7), &poly(0.3), &g));
    }

    #[test]
    fn mixture_examples() {
        let (t, n) = (poly(0.3), poly(0.7));
        let m0 = mixture(&t, &n, 0.3, 0.0).unwrap();
        let oracle = 0.09 * 0.25f64.powf(-0.7) + 0.49 * 0.25f64.powf(-0.3);
        assert!((m0.fhat(0.25) - oracle).abs() < 1e-14);
        assert!((m0.fhat(0.25) - 0.98021).abs() < 1e-5);
        assert_eq!(m0.fhat(0.25), m0.ftilde(0.25));

        let m = mixture(&t, &n, 0.3, 0.2).unwrap();
        let ftilde = 0.8 * 0.09 * 0.25f64.powf(-0.7) + 0.49 * 0.25f64.powf(-0.3);
        let cdf_tilde = 0.8 * 0.3 * 0.25f64.powf(0.3) + 0.7 * 0.25f64.powf(0.7);
        assert!((m.ftilde(0.25) - ftilde).abs() < 1e-14);
        assert!((m.ftilde(0.25) - 0.93271).abs() < 1e-5);
        assert!((m.cdf_tilde(0.25) - cdf_tilde).abs() < 1e-14);
        assert!((m.cdf_tilde(0.25) - 0.42359).abs() < 1e-5);
        assert!((m.cdf_tilde(1.0) - (0.8 * 0.3 + 0.7)).abs() < 1e-15);
        assert!((m.pooled_rho(0.25) - cdf_tilde / ftilde).abs() < 1e-14);
        assert!((m.price_ratio(0.25) - m.fhat(0.25) / ftilde).abs() < 1e-14);
    }

    #[test]
    fn mixture_rejects_bad_shares() {
        let d = poly(0.5);
        assert!(mixture(&d, &d, 1.5, 0.0).is_err());
        assert!(mixture(&d, &d, 0.3, 1.0).is_err());
        assert!(mixture(&d, &d, 0.0, 0.2).is_err());
    }

    #[test]
    fn lambda_at_one() {
        let (t, n) = (poly(0.3), poly(0.7));
        let m = mixture(&t, &n, 0.3, 0.0).unwrap();
        let direct = 0.21 * (1.0 * 0.3 - 1.0 * 0.7) / (0.3 * 0.3 + 0.7 * 0.7);
        assert!((m.lambda(1.0) - direct).abs() < 1e-15);
        assert!((m.lambda(1.0) + 0.1448).abs() < 1e-4);
        assert_eq!(m.lambda(0.0), 0.0);
    }

    #[test]
    fn table_reproduces_smooth_cdf() {
        let knots = uniform_grid(0.0, 1.0, 41);
        let cdf: Vec<f64> = knots.iter().map(|x| x.powf(1.5)).collect();
        let d = TypeDistribution::tabulated(knots, cdf).unwrap();
        d.validate(&default_check_grid()).unwrap();
        assert!((d.cdf(0.5) - 0.5f64.powf(1.5)).abs() < 1e-4);
        assert!((d.pdf(0.5) - 1.5 * 0.5f64.sqrt()).abs() < 1e-2);
        let u = d.cdf(0.37);
        assert!((d.quantile(u) - 0.37).abs() < 1e-12);
        let direct = quadrature::Rule::new(8).integrate_uniform(0.1, 0.8, 200, |x| d.cdf(x));
        assert!((d.cdf_integral(0.1, 0.8) - direct).abs() < 1e-10);
    }

    #[test]
    fn table_rejects_flat_or_unsorted_input() {
        assert!(TypeDistribution::tabulated(vec![0.0, 0.5, 1.0], vec![0.0, 0.5, 0.5]).is_err());
        assert!(TypeDistribution::tabulated(vec![0.0, 0.6, 0.5, 1.0], vec![0.0, 0.2, 0.4, 1.0]).is_err());
        assert!(TypeDistribution::tabulated(vec![0.1, 1.0], vec![0.0, 1.0]).is_err());
    }

    #[test]
    fn spec_round_trip() {
        let spec: DistributionSpec = serde_json::from_str(r#"{"family":"polynomial","exponent":0.3}"#).unwrap();
        assert_eq!(TypeDistribution::from_spec(&spec).unwrap(), poly(0.3));
        let table: DistributionSpec =
            serde_json::from_str(r#"{"family":"table","knots":[0,0.5,1],"cdf":[0,0.3,1]}"#).unwrap();
        let d = TypeDistribution::from_spec(&table).unwrap();
        assert_eq!(d.spec(), table);
    }
}
