//! Composite Gauss-Legendre integration.

use std::sync::OnceLock;

use gauss_quad::GaussLegendre;

/// A fixed-order Gauss-Legendre rule with nodes and weights on [-1, 1].
#[derive(Debug, Clone)]
pub struct Rule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Rule {
    /// Order must be at least 2.
    pub fn new(order: usize) -> Self {
        let order = order.max(2);
        let gl = GaussLegendre::new(order).expect("order >= 2 is always a valid rule");
        let (nodes, weights) = gl.into_node_weight_pairs().into_iter().unzip();
        Rule { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Integrates `f` over `[a, b]` with a single panel.
    pub fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        if b == a {
            return 0.0;
        }
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }

    /// Integrates over consecutive panels `[p[i], p[i+1]]`.
    pub fn integrate_panels<F: Fn(f64) -> f64>(&self, points: &[f64], f: F) -> f64 {
        points
            .windows(2)
            .map(|w| self.integrate(w[0], w[1], &f))
            .sum()
    }

    /// Integrates over `[a, b]` split into `panels` equal pieces.
    pub fn integrate_uniform<F: Fn(f64) -> f64>(&self, a: f64, b: f64, panels: usize, f: F) -> f64 {
        let panels = panels.max(1);
        let h = (b - a) / panels as f64;
        (0..panels)
            .map(|i| {
                let lo = a + h * i as f64;
                let hi = if i + 1 == panels { b } else { lo + h };
                self.integrate(lo, hi, &f)
            })
            .sum()
    }
}

/// Three-point rule, exact for polynomials up to degree five.
pub(crate) fn three_point() -> &'static Rule {
    static RULE: OnceLock<Rule> = OnceLock::new();
    RULE.get_or_init(|| Rule::new(3))
}
