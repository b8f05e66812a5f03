use gauss_quad::GaussLegendre;

use crate::error::{HallError, Result};

/// Gauss-Legendre nodes and weights mapped to `[lo, hi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub lo: f64,
    pub hi: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn gauss_legendre(n: usize, lo: f64, hi: f64) -> Result<Self> {
        if n < 2 || !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(HallError::Config(format!(
                "quadrature needs n >= 2 and a finite interval, got n={n} [{lo}, {hi}]"
            )));
        }
        let rule = GaussLegendre::new(n).map_err(|e| HallError::Config(e.to_string()))?;
        let (mid, half) = ((hi + lo) / 2.0, (hi - lo) / 2.0);
        let mut pairs: Vec<(f64, f64)> = rule
            .as_node_weight_pairs()
            .iter()
            .map(|&(x, w)| (mid + half * x, half * w))
            .collect();
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        Ok(Self {
            lo,
            hi,
            nodes: pairs.iter().map(|p| p.0).collect(),
            weights: pairs.iter().map(|p| p.1).collect(),
        })
    }

    /// `panels` equal copies of an `n`-point rule.
    pub fn composite(n: usize, panels: usize, lo: f64, hi: f64) -> Result<Self> {
        if panels == 0 {
            return Err(HallError::Config(
                "composite rule needs at least one panel".into(),
            ));
        }
        let h = (hi - lo) / panels as f64;
        let mut nodes = Vec::with_capacity(n * panels);
        let mut weights = Vec::with_capacity(n * panels);
        for p in 0..panels {
            let r = Self::gauss_legendre(n, lo + p as f64 * h, lo + (p + 1) as f64 * h)?;
            nodes.extend(r.nodes);
            weights.extend(r.weights);
        }
        Ok(Self {
            lo,
            hi,
            nodes,
            weights,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_length() {
        for n in [2, 16, 24, 32] {
            let q = QuadratureRule::gauss_legendre(n, -0.5, 0.5).unwrap();
            let s: f64 = q.weights.iter().sum();
            assert!((s - 1.0).abs() < 1e-12);
            let q = QuadratureRule::gauss_legendre(n, -2.0, 2.0).unwrap();
            assert!((q.weights.iter().sum::<f64>() - 4.0).abs() < 1e-12);
        }
    }

    #[test]
    fn polynomial_exactness() {
        let q = QuadratureRule::gauss_legendre(5, 0.0, 2.0).unwrap();
        let v = q.integrate(|x| x.powi(9));
        assert!((v - 2f64.powi(10) / 10.0).abs() < 1e-10);
        let c = QuadratureRule::composite(4, 3, 0.0, 3.0).unwrap();
        assert_eq!(c.len(), 12);
        assert!((c.integrate(|x| x.sin()) - (1.0 - 3f64.cos())).abs() < 1e-8);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(QuadratureRule::gauss_legendre(1, 0.0, 1.0).is_err());
        assert!(QuadratureRule::gauss_legendre(8, 1.0, 1.0).is_err());
    }
}
