use std::f64::consts::PI;

use rand::distributions::Open01;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::lattice::{DiagonalOperator, LatticeBox};

/// Cauchy on-site disorder `α V(x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisorderConfig {
    pub alpha: f64,
    pub seed: u64,
}

fn stream_of(x1: i64, x2: i64) -> u64 {
    ((x1 as i32 as u32 as u64) << 32) | (x2 as i32 as u32 as u64)
}

/// Uniform variate on (0,1) keyed by `(seed, x1, x2)`; independent of the box.
pub fn site_uniform(seed: u64, x1: i64, x2: i64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_of(x1, x2));
    rng.sample(Open01)
}

/// Seed for sample `index` of an ensemble.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(index);
    rng.set_word_pos(1 << 40);
    rng.next_u64()
}

pub fn cauchy_potential(bx: LatticeBox, cfg: &DisorderConfig) -> DiagonalOperator {
    if cfg.alpha == 0.0 {
        return DiagonalOperator::zeros(bx);
    }
    let values = bx
        .sites()
        .map(|(x1, x2)| cfg.alpha * (PI * (site_uniform(cfg.seed, x1, x2) - 0.5)).tan())
        .collect();
    DiagonalOperator::from_real(bx, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::make_box;

    #[test]
    fn zero_coupling() {
        let b = make_box((-2, 2), (-2, 2)).unwrap();
        let v = cauchy_potential(
            b,
            &DisorderConfig {
                alpha: 0.0,
                seed: 5,
            },
        );
        assert!(v.values.iter().all(|x| x.re == 0.0 && x.im == 0.0));
    }

    #[test]
    fn reproducible_and_box_independent() {
        let cfg = DisorderConfig {
            alpha: 1.5,
            seed: 42,
        };
        let small = make_box((-2, 2), (-2, 2)).unwrap();
        let big = make_box((-5, 5), (-4, 6)).unwrap();
        let a = cauchy_potential(small, &cfg);
        let b = cauchy_potential(small, &cfg);
        assert_eq!(a, b);
        let c = cauchy_potential(big, &cfg);
        for (x1, x2) in small.sites() {
            assert_eq!(a.at(x1, x2), c.at(x1, x2));
        }
        let d = cauchy_potential(
            small,
            &DisorderConfig {
                alpha: 1.5,
                seed: 43,
            },
        );
        assert_ne!(a, d);
    }

    #[test]
    fn median_near_zero() {
        let b = make_box((0, 316), (0, 316)).unwrap();
        let v = cauchy_potential(
            b,
            &DisorderConfig {
                alpha: 1.0,
                seed: 2024,
            },
        );
        let mut xs: Vec<f64> = v.values.iter().map(|x| x.re).collect();
        assert!(xs.len() >= 100_000);
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let med = xs[xs.len() / 2];
        assert!(med.abs() <= 0.02, "median {med}");
        // quartiles of the standard Cauchy law are ±1
        let q1 = xs[xs.len() / 4];
        assert!((q1 + 1.0).abs() < 0.03, "q1 {q1}");
    }

    #[test]
    fn derived_seeds_distinct() {
        let s: Vec<u64> = (0..100).map(|i| derive_seed(7, i)).collect();
        let mut t = s.clone();
        t.sort();
        t.dedup();
        assert_eq!(t.len(), 100);
        assert_eq!(derive_seed(7, 3), s[3]);
    }
}
