//! Gauss-Hermite quadrature nodes and weights.
//!
//! Rules integrate against the weight `exp(-t^2)` on the real line:
//! `integral exp(-t^2) f(t) dt ~ sum_i w_i f(t_i)`. Nodes are the roots of
//! the physicists' Hermite polynomial `H_n`, found by Newton iteration on
//! the orthonormal three-term recurrence, which is stable for the orders
//! used here (up to a few hundred).

use std::f64::consts::PI;

/// One-dimensional Gauss-Hermite rule of the given order.
#[derive(Debug, Clone)]
pub struct GaussHermite {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussHermite {
    /// Builds the rule with `n` nodes. Panics if `n == 0`.
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "quadrature order must be positive");
        let (nodes, weights) = hermite_rule(n);
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Integrates `f` against `exp(-t^2)`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * f(t))
            .sum()
    }

    /// Averages `f` under the normalized Gaussian weight
    /// `exp(-t^2)/sqrt(pi)`.
    pub fn average<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.integrate(&mut f) / PI.sqrt()
    }
}

/// Evaluates the orthonormal Hermite polynomial `h_n(x)` and `h_{n-1}(x)`.
fn orthonormal_hermite(n: usize, x: f64) -> (f64, f64) {
    let mut prev = 0.0;
    let mut cur = PI.powf(-0.25);
    for k in 0..n {
        let kf = k as f64;
        let next = x * (2.0 / (kf + 1.0)).sqrt() * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    (cur, prev)
}

fn hermite_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    let nf = n as f64;
    let mut roots: Vec<f64> = Vec::with_capacity(m);
    for i in 0..m {
        // Standard initial guesses, marching inward from the largest root.
        // Each extrapolation uses already-converged roots so errors do not
        // compound across the sweep.
        let mut x = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
            1 => roots[0] - 1.14 * nf.powf(0.426) / roots[0],
            2 => 1.86 * roots[1] - 0.86 * roots[0],
            3 => 1.91 * roots[2] - 0.91 * roots[1],
            _ => 2.0 * roots[i - 1] - roots[i - 2],
        };
        let mut h_prev = 0.0;
        for _ in 0..200 {
            let (h, hm1) = orthonormal_hermite(n, x);
            h_prev = hm1;
            let dh = (2.0 * nf).sqrt() * hm1;
            let step = h / dh;
            x -= step;
            if step.abs() <= 1e-15 * (1.0 + x.abs()) {
                let (_, hm1) = orthonormal_hermite(n, x);
                h_prev = hm1;
                break;
            }
        }
        roots.push(x);
        let w = 1.0 / (nf * h_prev * h_prev);
        nodes[i] = x;
        weights[i] = w;
        nodes[n - 1 - i] = -x;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        // The middle root of an odd-order rule is exactly zero.
        nodes[m - 1] = 0.0;
        let (_, hm1) = orthonormal_hermite(n, 0.0);
        weights[m - 1] = 1.0 / (nf * hm1 * hm1);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| nodes[a].total_cmp(&nodes[b]));
    let nodes_sorted: Vec<f64> = order.iter().map(|&i| nodes[i]).collect();
    let weights_sorted: Vec<f64> = order.iter().map(|&i| weights[i]).collect();
    (nodes_sorted, weights_sorted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn weights_sum_to_sqrt_pi() {
        for n in [1, 2, 3, 5, 8, 16, 32, 48, 64, 96, 128] {
            let q = GaussHermite::new(n);
            let sum: f64 = q.weights().iter().sum();
            assert_abs_diff_eq!(sum, PI.sqrt(), epsilon = 1e-12 * n as f64);
        }
    }

    #[test]
    fn gaussian_moments() {
        let q = GaussHermite::new(32);
        assert_abs_diff_eq!(q.integrate(|t| t * t), PI.sqrt() / 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            q.integrate(|t| t.powi(4)),
            0.75 * PI.sqrt(),
            epsilon = 1e-11
        );
        assert_abs_diff_eq!(q.integrate(|t| t.powi(3)), 0.0, epsilon = 1e-13);
    }

    #[test]
    fn oscillatory_integrand() {
        // integral exp(-t^2) cos(t) dt = sqrt(pi) exp(-1/4)
        let q = GaussHermite::new(32);
        let expect = PI.sqrt() * (-0.25f64).exp();
        assert_abs_diff_eq!(q.integrate(|t| t.cos()), expect, epsilon = 1e-13);
    }

    #[test]
    fn polynomial_exactness() {
        // An n-point rule is exact through degree 2n - 1.
        let q = GaussHermite::new(6);
        // integral exp(-t^2) t^10 dt = (9!!/2^5) sqrt(pi) = 945/32 sqrt(pi)
        assert_abs_diff_eq!(
            q.integrate(|t| t.powi(10)),
            945.0 / 32.0 * PI.sqrt(),
            epsilon = 1e-10
        );
    }

    #[test]
    fn nodes_are_symmetric_and_sorted() {
        for n in [7, 32, 33] {
            let q = GaussHermite::new(n);
            for i in 0..n {
                assert_abs_diff_eq!(q.nodes()[i], -q.nodes()[n - 1 - i], epsilon = 1e-14);
                assert_abs_diff_eq!(q.weights()[i], q.weights()[n - 1 - i], epsilon = 1e-16);
            }
            for w in q.weights() {
                assert!(*w > 0.0);
            }
            for pair in q.nodes().windows(2) {
                assert!(pair[0] < pair[1]);
            }
        }
    }

    #[test]
    fn average_of_unity_is_one() {
        let q = GaussHermite::new(16);
        assert_abs_diff_eq!(q.average(|_| 1.0), 1.0, epsilon = 1e-13);
    }
}
