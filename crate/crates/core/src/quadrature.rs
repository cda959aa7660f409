//! Gauss-Legendre and Gauss-Lobatto rules on the unit reference interval.
//!
//! Weights are scaled to sum to one, so quadrature of a function equals its
//! average over the interval. This is the convention used throughout the
//! scheme: cell means are plain weighted sums and the first Lobatto weight
//! enters the CFL condition directly.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadratureKind {
    GaussLegendre,
    GaussLobatto,
}

/// A one-dimensional quadrature rule on [0, 1] with unit weight sum.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub kind: QuadratureKind,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes mapped affinely to [a, b]; the unit-sum weights are unchanged.
    pub fn mapped_nodes(&self, a: f64, b: f64) -> Vec<f64> {
        self.nodes.iter().map(|&r| a + (b - a) * r).collect()
    }

    /// Average of `f` over [0, 1].
    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Legendre polynomial value and derivative at `x` in [-1, 1].
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let mut p_prev = 1.0;
    let mut p = x;
    for k in 2..=n {
        let kf = k as f64;
        let p_next = ((2.0 * kf - 1.0) * x * p - (kf - 1.0) * p_prev) / kf;
        p_prev = p;
        p = p_next;
    }
    let dp = if x.abs() < 1.0 {
        (n as f64) * (x * p - p_prev) / (x * x - 1.0)
    } else {
        // Endpoint limit: P_n'(+-1) = (+-1)^(n-1) n (n + 1) / 2
        let nf = n as f64;
        let sign = if x > 0.0 { 1.0 } else { (-1.0f64).powi(n as i32 - 1) };
        sign * nf * (nf + 1.0) / 2.0
    };
    (p, dp)
}

/// Gauss-Legendre rule with `n` interior points; exact for degree 2n - 1.
pub fn gauss_legendre_rule(n: usize) -> Result<QuadratureRule> {
    if n < 1 {
        return Err(Error::TooFewQuadraturePoints { min: 1, got: n });
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Ok(to_unit_interval(QuadratureKind::GaussLegendre, nodes, weights))
}

/// Gauss-Lobatto rule with `n >= 2` points including both endpoints; exact
/// for degree 2n - 3.
pub fn gauss_lobatto_rule(n: usize) -> Result<QuadratureRule> {
    if n < 2 {
        return Err(Error::TooFewQuadraturePoints { min: 2, got: n });
    }
    let m = n - 1;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    nodes[0] = -1.0;
    nodes[m] = 1.0;
    // Interior nodes are the roots of P'_{n-1}.
    for i in 1..m {
        let mut x = (std::f64::consts::PI * (m as f64 - i as f64) / m as f64).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(m, x);
            // Newton on f = P'_m using P''_m = (2 x P'_m - m (m + 1) P_m) / (1 - x^2).
            let ddp = (2.0 * x * dp - (m as f64) * (m as f64 + 1.0) * p) / (1.0 - x * x);
            let dx = dp / ddp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = x;
    }
    for i in 0..n {
        let (p, _) = legendre_with_derivative(m, nodes[i]);
        weights[i] = 2.0 / ((m as f64) * (m as f64 + 1.0) * p * p);
    }
    // Symmetrize to keep endpoint weights bit-identical.
    for i in 0..n / 2 {
        let w = 0.5 * (weights[i] + weights[n - 1 - i]);
        weights[i] = w;
        weights[n - 1 - i] = w;
        let half_span = 0.5 * (nodes[n - 1 - i] - nodes[i]);
        nodes[i] = -half_span;
        nodes[n - 1 - i] = half_span;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Ok(to_unit_interval(QuadratureKind::GaussLobatto, nodes, weights))
}

fn to_unit_interval(kind: QuadratureKind, nodes: Vec<f64>, weights: Vec<f64>) -> QuadratureRule {
    let nodes = nodes.iter().map(|&x| 0.5 * (x + 1.0)).collect::<Vec<_>>();
    let weights = weights.iter().map(|&w| 0.5 * w).collect::<Vec<_>>();
    let mut rule = QuadratureRule {
        kind,
        nodes,
        weights,
    };
    // Pin the endpoints exactly.
    if kind == QuadratureKind::GaussLobatto {
        rule.nodes[0] = 0.0;
        let last = rule.nodes.len() - 1;
        rule.nodes[last] = 1.0;
    }
    rule
}

/// Number of in-cell Lobatto points used by the scheme for spatial degree
/// `k_d`: the smallest endpoint-including rule whose exactness covers the
/// cell-mean identity.
pub fn scheme_lobatto_points(k_d: usize) -> usize {
    (k_d + 1).div_ceil(2) + 1
}
