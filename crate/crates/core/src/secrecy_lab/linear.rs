//! GF(2) row reduction over packed bit vectors.

/// Bit vectors as little-endian `u64` words.
pub type BitVec = Vec<u64>;

pub(crate) fn xor_into(acc: &mut BitVec, v: &[u64]) {
    if acc.len() < v.len() {
        acc.resize(v.len(), 0);
    }
    for (a, b) in acc.iter_mut().zip(v) {
        *a ^= b;
    }
}

pub(crate) fn is_zero(v: &[u64]) -> bool {
    v.iter().all(|&w| w == 0)
}

fn lowest_bit(v: &[u64]) -> Option<usize> {
    v.iter()
        .enumerate()
        .find(|(_, &w)| w != 0)
        .map(|(k, &w)| 64 * k + w.trailing_zeros() as usize)
}

fn bit(v: &[u64], k: usize) -> bool {
    v.get(k / 64).is_some_and(|w| (w >> (k % 64)) & 1 == 1)
}

/// An echelon basis of a subspace of GF(2)^n, one pivot per row.
#[derive(Clone, Debug, Default)]
pub struct Span {
    rows: Vec<(usize, BitVec)>,
}

impl Span {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the basis; the result is zero iff `v` lies in the span.
    pub fn reduce(&self, v: &[u64]) -> BitVec {
        let mut v = v.to_vec();
        for (pivot, row) in &self.rows {
            if bit(&v, *pivot) {
                xor_into(&mut v, row);
            }
        }
        v
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        is_zero(&self.reduce(v))
    }

    /// Adds `v`; returns whether the rank grew.
    pub fn insert(&mut self, v: &[u64]) -> bool {
        let r = self.reduce(v);
        match lowest_bit(&r) {
            None => false,
            Some(p) => {
                // Keep rows reduced at the new pivot so `reduce` stays a single pass.
                for (_, row) in self.rows.iter_mut() {
                    if bit(row, p) {
                        xor_into(row, &r);
                    }
                }
                self.rows.push((p, r));
                true
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn small_span() {
        let mut s = Span::new();
        assert!(s.insert(&[0b011]));
        assert!(s.insert(&[0b110]));
        assert!(!s.insert(&[0b101]));
        assert!(s.contains(&[0b101]));
        assert!(!s.contains(&[0b001]));
        assert_eq!(s.rank(), 2);
    }

    proptest! {
        /// Membership agrees with brute force over all subset sums.
        #[test]
        fn membership_matches_subset_sums(gens in proptest::collection::vec(0u64..256, 0..6), probe in 0u64..256) {
            let mut s = Span::new();
            for g in &gens {
                s.insert(&[*g]);
            }
            let brute = (0..1u32 << gens.len()).any(|mask| {
                gens.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).fold(0, |a, (_, g)| a ^ g) == probe
            });
            prop_assert_eq!(s.contains(&[probe]), brute);
        }
    }
}
