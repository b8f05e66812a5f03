use std::sync::OnceLock;

use crate::error::{HallError, Result};
use crate::quadrature::QuadratureRule;

/// `∫_{-1}^{1} exp(−1/(1−s²)) ds`.
const BUMP_MASS: f64 = 0.443_993_816_168_079_44;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepShape {
    /// `ρ′ ∝ −exp(−1/(1−s²))`.
    Bump,
    /// `ρ′ ∝ −(1 + κs) exp(−1/(1−s²))`, `|κ| < 1`; the odd factor leaves the mass unchanged.
    Skewed(f64),
}

/// Smooth switch from 1 below `(lo, hi)` to 0 above it.
///
/// A step is a convex combination of shapes over the same interval, which
/// keeps mixtures of admissible steps admissible.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothStep {
    pub lo: f64,
    pub hi: f64,
    pub parts: Vec<(f64, StepShape)>,
}

fn unit_rule() -> &'static QuadratureRule {
    static RULE: OnceLock<QuadratureRule> = OnceLock::new();
    RULE.get_or_init(|| QuadratureRule::composite(24, 8, -1.0, 1.0).unwrap())
}

impl SmoothStep {
    pub fn new(lo: f64, hi: f64, shape: StepShape) -> Result<Self> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(HallError::Config(format!(
                "step interval ({lo}, {hi}) is empty"
            )));
        }
        if let StepShape::Skewed(k) = shape {
            if !(k.abs() < 1.0) {
                return Err(HallError::Config(format!(
                    "skew must lie in (-1, 1), got {k}"
                )));
            }
        }
        Ok(Self {
            lo,
            hi,
            parts: vec![(1.0, shape)],
        })
    }

    pub fn bump(lo: f64, hi: f64) -> Result<Self> {
        Self::new(lo, hi, StepShape::Bump)
    }

    /// `c·self + (1−c)·other`; both must share the interval.
    pub fn mix(&self, c: f64, other: &SmoothStep) -> Result<Self> {
        if self.lo != other.lo || self.hi != other.hi || !(0.0..=1.0).contains(&c) {
            return Err(HallError::Config(
                "steps can only be mixed on a common interval".into(),
            ));
        }
        let mut parts: Vec<(f64, StepShape)> =
            self.parts.iter().map(|&(w, s)| (c * w, s)).collect();
        parts.extend(other.parts.iter().map(|&(w, s)| ((1.0 - c) * w, s)));
        Ok(Self {
            lo: self.lo,
            hi: self.hi,
            parts,
        })
    }

    fn coordinate(&self, lambda: f64) -> f64 {
        (2.0 * lambda - self.lo - self.hi) / (self.hi - self.lo)
    }

    fn unit_density(&self, s: f64) -> f64 {
        if s.abs() >= 1.0 {
            return 0.0;
        }
        let bump = (-1.0 / (1.0 - s * s)).exp() / BUMP_MASS;
        self.parts
            .iter()
            .map(|&(w, shape)| match shape {
                StepShape::Bump => w * bump,
                StepShape::Skewed(k) => w * (1.0 + k * s) * bump,
            })
            .sum()
    }

    pub fn rho_prime(&self, lambda: f64) -> f64 {
        let s = self.coordinate(lambda);
        -2.0 * self.unit_density(s) / (self.hi - self.lo)
    }

    pub fn rho(&self, lambda: f64) -> f64 {
        if lambda <= self.lo {
            return 1.0;
        }
        if lambda >= self.hi {
            return 0.0;
        }
        let top = self.coordinate(lambda);
        let half = (top + 1.0) / 2.0;
        // map the unit rule onto [-1, top]
        let mass = unit_rule().integrate(|u| self.unit_density(-1.0 + half * (u + 1.0))) * half;
        (1.0 - mass).clamp(0.0, 1.0)
    }

    pub fn support(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }
}
