use std::collections::HashMap;
use std::hash::Hash;

use num_rational::Ratio;

/// Exact probabilities as reduced `count / total` fractions.
pub type Probability = Ratio<u128>;

/// A histogram over transcripts, counting how often each view occurs.
#[derive(Clone, Debug)]
pub struct Distribution<K> {
    counts: HashMap<K, u64>,
    total: u64,
}

impl<K: Hash + Eq> Default for Distribution<K> {
    fn default() -> Self {
        Distribution {
            counts: HashMap::new(),
            total: 0,
        }
    }
}

impl<K: Hash + Eq> Distribution<K> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, view: K) {
        self.record_n(view, 1);
    }

    pub fn record_n(&mut self, view: K, n: u64) {
        *self.counts.entry(view).or_insert(0) += n;
        self.total += n;
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn support_len(&self) -> usize {
        self.counts.len()
    }

    pub fn count(&self, view: &K) -> u64 {
        self.counts.get(view).copied().unwrap_or(0)
    }

    pub fn probability(&self, view: &K) -> Probability {
        Ratio::new(u128::from(self.count(view)), u128::from(self.total.max(1)))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, u64)> {
        self.counts.iter().map(|(k, &c)| (k, c))
    }
}

/// Half the L1 distance between two histograms, computed exactly.
///
/// Histograms may have different totals; each is normalized by its own total.
pub fn statistical_distance<K: Hash + Eq>(a: &Distribution<K>, b: &Distribution<K>) -> Probability {
    let (ta, tb) = (u128::from(a.total), u128::from(b.total));
    if ta == 0 || tb == 0 {
        return Ratio::from_integer(u128::from(ta != tb));
    }
    let mut sum = 0u128;
    for (k, ca) in a.iter() {
        sum += (u128::from(ca) * tb).abs_diff(u128::from(b.count(k)) * ta);
    }
    for (k, cb) in b.iter() {
        if a.count(k) == 0 {
            sum += u128::from(cb) * ta;
        }
    }
    Ratio::new(sum, 2 * ta * tb)
}

/// Distance between two dense histograms over the same index space.
pub(crate) fn dense_distance(a: &[u32], b: &[u32]) -> Probability {
    let ta: u128 = a.iter().map(|&c| u128::from(c)).sum();
    let tb: u128 = b.iter().map(|&c| u128::from(c)).sum();
    let sum: u128 = a
        .iter()
        .zip(b)
        .map(|(&x, &y)| (u128::from(x) * tb).abs_diff(u128::from(y) * ta))
        .sum();
    Ratio::new(sum, 2 * ta.max(1) * tb.max(1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_histograms_are_at_distance_zero() {
        let mut a = Distribution::new();
        let mut b = Distribution::new();
        for v in 0..4u8 {
            a.record(v);
            b.record_n(v, 3);
        }
        assert_eq!(statistical_distance(&a, &b), Ratio::from_integer(0));
    }

    #[test]
    fn disjoint_supports_are_at_distance_one() {
        let mut a = Distribution::new();
        let mut b = Distribution::new();
        a.record(0u8);
        b.record(1u8);
        assert_eq!(statistical_distance(&a, &b), Ratio::from_integer(1));
    }

    #[test]
    fn partial_overlap() {
        // a uniform on {0,1}, b point mass on 0: distance 1/2.
        let mut a = Distribution::new();
        let mut b = Distribution::new();
        a.record(0u8);
        a.record(1u8);
        b.record(0u8);
        assert_eq!(statistical_distance(&a, &b), Ratio::new(1, 2));
        assert_eq!(dense_distance(&[1, 1], &[1, 0]), Ratio::new(1, 2));
        assert_eq!(a.probability(&1), Ratio::new(1, 2));
    }
}
