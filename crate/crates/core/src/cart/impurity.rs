use std::cmp::Ordering;

use crate::error::{Error, Result};

/// Per-class sample counts at a node.
#[derive(Debug, Clone, PartialEq, Eq, Default, Hash)]
pub struct ClassDistribution {
    counts: Vec<u64>,
}

impl ClassDistribution {
    pub fn zeros(classes: usize) -> Self {
        ClassDistribution {
            counts: vec![0; classes],
        }
    }

    pub fn from_counts(counts: Vec<u64>) -> Self {
        ClassDistribution { counts }
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn get(&self, class: usize) -> u64 {
        self.counts.get(class).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn add(&mut self, class: usize) {
        self.counts[class] += 1;
    }

    pub fn add_all(&mut self, other: &ClassDistribution) {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
    }

    /// `self - other`, or `None` if some class would go negative.
    pub fn minus(&self, other: &ClassDistribution) -> Option<ClassDistribution> {
        if other.counts.len() > self.counts.len() {
            return None;
        }
        let counts = self
            .counts
            .iter()
            .enumerate()
            .map(|(i, a)| a.checked_sub(other.get(i)))
            .collect::<Option<Vec<_>>>()?;
        Some(ClassDistribution { counts })
    }

    /// At most one class present.
    pub fn is_pure(&self) -> bool {
        self.counts.iter().filter(|c| **c > 0).count() <= 1
    }

    /// Most frequent class; ties go to the lowest class index.
    pub fn majority(&self) -> Option<usize> {
        let max = *self.counts.iter().max()?;
        if max == 0 {
            return None;
        }
        self.counts.iter().position(|c| *c == max)
    }

    pub(crate) fn sum_sq(&self) -> u128 {
        self.counts
            .iter()
            .map(|c| (*c as u128) * (*c as u128))
            .sum()
    }
}

/// Gini impurity `1 - sum_i p(i|t)^2`.
pub fn gini(d: &ClassDistribution) -> Result<f64> {
    let n = d.total() as u128;
    if n == 0 {
        return Err(Error::domain("gini impurity of an empty distribution"));
    }
    Ok(1.0 - d.sum_sq() as f64 / (n * n) as f64)
}

/// Weighted impurity decrease of a binary split:
/// `I(parent) - N_left/N * I(left) - N_right/N * I(right)`.
///
/// Evaluated through the equivalent integer form
/// `[(S_l n_r + S_r n_l) n - S_p n_l n_r] / (n_l n_r n^2)` with `S` the sum
/// of squared counts, so the sign is exact and the result is never
/// negative.
pub fn information_gain(
    parent: &ClassDistribution,
    left: &ClassDistribution,
    right: &ClassDistribution,
) -> Result<f64> {
    let classes = parent
        .counts
        .len()
        .max(left.counts.len())
        .max(right.counts.len());
    for class in 0..classes {
        if left.get(class) + right.get(class) != parent.get(class) {
            return Err(Error::domain(format!(
                "class {class}: children hold {} + {} samples, parent holds {}",
                left.get(class),
                right.get(class),
                parent.get(class)
            )));
        }
    }
    let n = parent.total() as u128;
    if n == 0 {
        return Err(Error::domain("information gain of an empty parent"));
    }
    let (nl, nr) = (left.total() as u128, right.total() as u128);
    if nl == 0 || nr == 0 {
        return Ok(0.0);
    }
    let num = (left.sum_sq() * nr + right.sum_sq() * nl) * n - parent.sum_sq() * nl * nr;
    Ok(num as f64 / (nl * nr * n * n) as f64)
}

/// `S_l / n_l + S_r / n_r` as an exact fraction. For a fixed parent the
/// gain is increasing in this quantity.
#[derive(Debug, Clone, Copy)]
pub(crate) struct SplitScore {
    num: u128,
    den: u128,
}

impl SplitScore {
    pub(crate) fn new(left: &ClassDistribution, right: &ClassDistribution) -> Self {
        let (nl, nr) = (left.total() as u128, right.total() as u128);
        SplitScore {
            num: left.sum_sq() * nr + right.sum_sq() * nl,
            den: nl * nr,
        }
    }

    pub(crate) fn cmp(&self, other: &SplitScore) -> Ordering {
        (self.num * other.den).cmp(&(other.num * self.den))
    }

    /// Whether the split strictly lowers impurity relative to `parent`.
    pub(crate) fn improves(&self, parent: &ClassDistribution) -> bool {
        self.num * parent.total() as u128 > parent.sum_sq() * self.den
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(counts: &[u64]) -> ClassDistribution {
        ClassDistribution::from_counts(counts.to_vec())
    }

    #[test]
    fn gini_examples() {
        assert_eq!(gini(&d(&[17])).unwrap(), 0.0);
        assert_eq!(gini(&d(&[0, 9, 0])).unwrap(), 0.0);
        assert_eq!(gini(&d(&[5, 5, 5])).unwrap(), 1.0 - 1.0 / 3.0);
        assert_eq!(gini(&d(&[1, 1])).unwrap(), 0.5);
        assert!(gini(&d(&[0, 0])).is_err());
        assert!(gini(&d(&[])).is_err());
    }

    #[test]
    fn gain_examples() {
        let g = |p: &[u64], l: &[u64], r: &[u64]| information_gain(&d(p), &d(l), &d(r)).unwrap();
        assert_eq!(g(&[2, 2], &[2, 0], &[0, 2]), 0.5);
        assert_eq!(g(&[2, 2], &[1, 1], &[1, 1]), 0.0);
        // 0.625 - 0.5 * 0.5
        assert_eq!(g(&[4, 2, 2], &[4, 0, 0], &[0, 2, 2]), 0.375);
    }

    #[test]
    fn gain_rejects_inconsistent_counts() {
        assert!(information_gain(&d(&[2, 2]), &d(&[2, 0]), &d(&[0, 1])).is_err());
        assert!(information_gain(&d(&[0, 0]), &d(&[0, 0]), &d(&[0, 0])).is_err());
    }

    #[test]
    fn gain_matches_direct_formula() {
        let direct = |p: &[u64], l: &[u64], r: &[u64]| {
            let gini = |c: &[u64]| {
                let n: u64 = c.iter().sum();
                1.0 - c
                    .iter()
                    .map(|x| (*x as f64 / n as f64).powi(2))
                    .sum::<f64>()
            };
            let n = p.iter().sum::<u64>() as f64;
            let nl = l.iter().sum::<u64>() as f64;
            let nr = r.iter().sum::<u64>() as f64;
            gini(p) - nl / n * gini(l) - nr / n * gini(r)
        };
        let cases: [(&[u64], &[u64], &[u64]); 3] = [
            (&[7, 3, 9], &[5, 0, 2], &[2, 3, 7]),
            (&[21, 84], &[0, 5], &[21, 79]),
            (&[11, 99], &[2, 48], &[9, 51]),
        ];
        for (p, l, r) in cases {
            let exact = information_gain(&d(p), &d(l), &d(r)).unwrap();
            assert!((exact - direct(p, l, r)).abs() < 1e-15);
        }
    }

    #[test]
    fn majority_breaks_ties_low() {
        assert_eq!(d(&[3, 5, 5]).majority(), Some(1));
        assert_eq!(d(&[0, 0]).majority(), None);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn gini_bounded_by_uniform(counts in proptest::collection::vec(0u64..50, 1..28)) {
                let dist = d(&counts);
                prop_assume!(dist.total() > 0);
                let g = gini(&dist).unwrap();
                let c = counts.len() as f64;
                prop_assert!(g >= 0.0);
                prop_assert!(g <= 1.0 - 1.0 / c);
                prop_assert_eq!(g == 0.0, dist.is_pure());
            }

            #[test]
            fn gain_nonnegative(pairs in proptest::collection::vec((0u64..40, 0u64..40), 1..10)) {
                let left = d(&pairs.iter().map(|p| p.0).collect::<Vec<_>>());
                let right = d(&pairs.iter().map(|p| p.1).collect::<Vec<_>>());
                let mut parent = left.clone();
                parent.add_all(&right);
                prop_assume!(parent.total() > 0);
                prop_assert!(information_gain(&parent, &left, &right).unwrap() >= 0.0);
            }
        }
    }
}
