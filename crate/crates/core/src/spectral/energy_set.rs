/// Finite union of disjoint open intervals of ℝ (endpoints may be infinite).
#[derive(Debug, Clone, PartialEq)]
pub struct EnergySet {
    intervals: Vec<(f64, f64)>,
}

impl EnergySet {
    pub fn from_intervals(mut iv: Vec<(f64, f64)>) -> Self {
        iv.retain(|&(a, b)| a < b);
        iv.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
        let mut out: Vec<(f64, f64)> = Vec::with_capacity(iv.len());
        for (a, b) in iv {
            match out.last_mut() {
                Some(last) if a < last.1 => last.1 = last.1.max(b),
                _ => out.push((a, b)),
            }
        }
        Self { intervals: out }
    }

    pub fn empty() -> Self {
        Self {
            intervals: Vec::new(),
        }
    }

    pub fn everything() -> Self {
        Self::interval(f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn interval(lo: f64, hi: f64) -> Self {
        Self::from_intervals(vec![(lo, hi)])
    }

    /// `(−∞, λ)`.
    pub fn below(lambda: f64) -> Self {
        Self::interval(f64::NEG_INFINITY, lambda)
    }

    /// `(λ, ∞)`.
    pub fn above(lambda: f64) -> Self {
        Self::interval(lambda, f64::INFINITY)
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn union(&self, other: &EnergySet) -> Self {
        let mut iv = self.intervals.clone();
        iv.extend_from_slice(&other.intervals);
        Self::from_intervals(iv)
    }

    /// Complement up to the (measure-zero) endpoints.
    pub fn complement(&self) -> Self {
        let mut out = Vec::new();
        let mut start = f64::NEG_INFINITY;
        for &(a, b) in &self.intervals {
            out.push((start, a));
            start = b;
        }
        out.push((start, f64::INFINITY));
        Self::from_intervals(out)
    }

    pub fn is_disjoint(&self, other: &EnergySet) -> bool {
        self.intervals
            .iter()
            .all(|&(a, b)| other.intervals.iter().all(|&(c, d)| b <= c || d <= a))
    }

    pub fn contains(&self, x: f64) -> bool {
        self.intervals.iter().any(|&(a, b)| a < x && x < b)
    }

    pub fn endpoints(&self) -> Vec<f64> {
        self.intervals
            .iter()
            .flat_map(|&(a, b)| [a, b])
            .filter(|v| v.is_finite())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization() {
        let s = EnergySet::from_intervals(vec![(3.0, 4.0), (0.0, 1.0), (0.5, 2.0), (5.0, 5.0)]);
        assert_eq!(s.intervals(), &[(0.0, 2.0), (3.0, 4.0)]);
        assert!(s.contains(1.5) && !s.contains(2.5) && !s.contains(5.0));
        assert_eq!(s.endpoints(), vec![0.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn complement_and_union() {
        let s = EnergySet::interval(-1.0, 1.0);
        let c = s.complement();
        assert_eq!(
            c.intervals(),
            &[(f64::NEG_INFINITY, -1.0), (1.0, f64::INFINITY)]
        );
        assert!(s.is_disjoint(&c));
        assert_eq!(s.union(&c).endpoints(), vec![-1.0, -1.0, 1.0, 1.0]);
        assert_eq!(EnergySet::everything().complement(), EnergySet::empty());
        assert_eq!(
            EnergySet::below(0.0)
                .union(&EnergySet::above(0.0))
                .intervals()
                .len(),
            2
        );
    }
}
