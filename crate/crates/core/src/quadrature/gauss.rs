//! Gauss–Legendre nodes and weights on [-1, 1].

use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    /// `m`-point rule, exact for polynomials of degree ≤ 2m − 1.
    ///
    /// Roots of P_m by Newton iteration from the Tricomi-style initial guess;
    /// nodes are returned in ascending order.
    pub fn new(m: usize) -> Self {
        assert!(m >= 1, "a Gauss rule needs at least one node");
        let mut nodes = vec![0.0; m];
        let mut weights = vec![0.0; m];
        let half = m.div_ceil(2);
        for i in 0..half {
            let mut x = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(m, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 {
                    break;
                }
            }
            // one more evaluation at the converged root for the weight
            let (_, d) = legendre_with_derivative(m, x);
            if d.is_finite() {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[m - 1 - i] = x;
            weights[i] = w;
            weights[m - 1 - i] = w;
        }
        if m % 2 == 1 {
            nodes[m / 2] = 0.0;
        }
        GaussRule { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// (P_m(x), P_m'(x)) by the three-term recurrence.
fn legendre_with_derivative(m: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if m == 0 {
        return (1.0, 0.0);
    }
    for j in 2..=m {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let d = m as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn small_rules_match_tabulated_values() {
        let r2 = GaussRule::new(2);
        assert_abs_diff_eq!(r2.nodes[1], 1.0 / 3f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(r2.weights[0], 1.0, epsilon = 1e-15);

        let r3 = GaussRule::new(3);
        assert_abs_diff_eq!(r3.nodes[2], (0.6f64).sqrt(), epsilon = 1e-15);
        assert_eq!(r3.nodes[1], 0.0);
        assert_abs_diff_eq!(r3.weights[1], 8.0 / 9.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r3.weights[0], 5.0 / 9.0, epsilon = 1e-15);
    }

    #[test]
    fn weights_sum_to_two_and_nodes_are_interior() {
        for m in [1, 2, 5, 16, 64, 257, 512] {
            let r = GaussRule::new(m);
            let s: f64 = r.weights.iter().sum();
            assert_abs_diff_eq!(s, 2.0, epsilon = 1e-13);
            assert!(r.nodes.iter().all(|x| x.abs() < 1.0));
            assert!(r.nodes.windows(2).all(|w| w[0] < w[1]), "m = {m} not sorted");
        }
    }

    #[test]
    fn integrates_monomials_up_to_degree_2m_minus_1() {
        for m in [2usize, 4, 9, 20] {
            let r = GaussRule::new(m);
            for d in 0..(2 * m) as i32 {
                let got: f64 = r.nodes.iter().zip(&r.weights).map(|(x, w)| w * x.powi(d)).sum();
                let want = if d % 2 == 1 { 0.0 } else { 2.0 / (d as f64 + 1.0) };
                assert_abs_diff_eq!(got, want, epsilon = 1e-13);
            }
        }
    }
}
