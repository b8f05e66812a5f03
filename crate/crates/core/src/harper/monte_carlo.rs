use faer::c64;
use rayon::prelude::*;

use super::resolvent::t_b_trace;
use crate::error::{HallError, Result};
use crate::lattice::LatticeBox;
use crate::operators::{cauchy_potential, derive_seed, DisorderConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloEstimate {
    pub mean: c64,
    /// Jackknife standard error of the mean, in modulus.
    pub stderr: f64,
    pub samples: usize,
}

/// Sample mean with a leave-one-out jackknife error.
pub fn jackknife_mean(xs: &[c64]) -> Result<MonteCarloEstimate> {
    let n = xs.len();
    if n < 2 {
        return Err(HallError::Config(format!("{n} samples, need at least 2")));
    }
    let total: c64 = xs.iter().sum();
    let mean = total / n as f64;
    let nf = n as f64;
    let var: f64 = xs
        .iter()
        .map(|&x| ((total - x) / (nf - 1.0) - mean).norm_sqr())
        .sum::<f64>()
        * (nf - 1.0)
        / nf;
    Ok(MonteCarloEstimate {
        mean,
        stderr: var.sqrt(),
        samples: n,
    })
}

/// Monte Carlo estimate of `E tr T_B(z)` over Cauchy disorder of strength
/// `alpha`. Sample `k` uses the seed `derive_seed(seed, k)`.
pub fn disorder_average_trace(
    phi: f64,
    alpha: f64,
    z: c64,
    samples: usize,
    seed: u64,
    bx: LatticeBox,
) -> Result<MonteCarloEstimate> {
    let values: Vec<Result<c64>> = (0..samples as u64)
        .into_par_iter()
        .map(|k| {
            let v = cauchy_potential(
                bx,
                &DisorderConfig {
                    alpha,
                    seed: derive_seed(seed, k),
                },
            );
            t_b_trace(phi, &v, z)
        })
        .collect();
    let values = values.into_iter().collect::<Result<Vec<_>>>()?;
    jackknife_mean(&values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::make_box;

    #[test]
    fn jackknife_of_mean_is_sample_error() {
        let xs: Vec<c64> = (0..10)
            .map(|k| c64::new(k as f64, (k * k) as f64 * 0.1))
            .collect();
        let e = jackknife_mean(&xs).unwrap();
        let n = xs.len() as f64;
        let var = xs.iter().map(|x| (x - e.mean).norm_sqr()).sum::<f64>() / (n - 1.0);
        assert!((e.stderr - (var / n).sqrt()).abs() < 1e-12);
        assert!(jackknife_mean(&xs[..1]).is_err());
    }

    #[test]
    fn reproducible() {
        let b = make_box((-5, 4), (-5, 4)).unwrap();
        let z = c64::new(6.0, 0.5);
        let a = disorder_average_trace(0.7, 0.5, z, 6, 11, b).unwrap();
        let c = disorder_average_trace(0.7, 0.5, z, 6, 11, b).unwrap();
        assert_eq!(a, c);
    }
}
