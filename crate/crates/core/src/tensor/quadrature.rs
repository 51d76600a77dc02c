//! Gauss–Hermite quadrature against the standard normal density.

use super::linalg::symmetric_eigen;

/// Number of nodes of the reference rule.
pub const REFERENCE_NODES: usize = 64;

/// Nodes and weights (summing to one) of the `n`-point rule for `E_{X~N(0,1)}[f(X)]`.
#[derive(Clone, Debug)]
pub struct GaussHermite {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Normalised Hermite values `p_0..p_n` at `x` with `p_k = h_k / sqrt(k!)`.
fn normalised(x: f64, n: usize) -> Vec<f64> {
    let mut p = vec![0.0; n + 1];
    p[0] = 1.0;
    if n > 0 {
        p[1] = x;
    }
    for k in 1..n {
        p[k + 1] = (x * p[k] - (k as f64).sqrt() * p[k - 1]) / ((k + 1) as f64).sqrt();
    }
    p
}

impl GaussHermite {
    /// Golub–Welsch: nodes are the eigenvalues of the Jacobi matrix with
    /// off-diagonal `sqrt(k)`, polished by Newton steps on `p_n`; weights are
    /// the Christoffel numbers `1 / Σ_{k<n} p_k(x)^2`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut jac = vec![0.0; n * n];
        for k in 1..n {
            let b = (k as f64).sqrt();
            jac[(k - 1) * n + k] = b;
            jac[k * n + k - 1] = b;
        }
        let eig = symmetric_eigen(&jac, n).expect("finite Jacobi matrix");
        let mut nodes: Vec<f64> = eig.values;
        for x in nodes.iter_mut() {
            for _ in 0..3 {
                let p = normalised(*x, n);
                let deriv = (n as f64).sqrt() * p[n - 1];
                if deriv != 0.0 {
                    *x -= p[n] / deriv;
                }
            }
        }
        nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let weights = nodes
            .iter()
            .map(|&x| 1.0 / normalised(x, n - 1).iter().map(|p| p * p).sum::<f64>())
            .collect();
        Self { nodes, weights }
    }

    pub fn reference() -> Self {
        Self::new(REFERENCE_NODES)
    }

    pub fn expect(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_one_and_moments_match() {
        let q = GaussHermite::reference();
        assert_eq!(q.nodes.len(), 64);
        assert!((q.expect(|_| 1.0) - 1.0).abs() < 1e-13);
        assert!(q.expect(|x| x).abs() < 1e-13);
        assert!((q.expect(|x| x * x) - 1.0).abs() < 1e-12);
        assert!((q.expect(|x| x.powi(4)) - 3.0).abs() < 1e-11);
        assert!((q.expect(|x| x.powi(6)) - 15.0).abs() < 1e-10);
    }

    #[test]
    fn small_rule() {
        let q = GaussHermite::new(2);
        assert!((q.nodes[0] + 1.0).abs() < 1e-14 && (q.nodes[1] - 1.0).abs() < 1e-14);
        assert!((q.weights[0] - 0.5).abs() < 1e-14);
    }
}
