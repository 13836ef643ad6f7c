use smallvec::SmallVec;

/// Set of world indices `0..n`. Up to 64 worlds it lives inline.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct WorldSet {
    words: SmallVec<[u64; 1]>,
}

fn words_for(n: usize) -> usize {
    n.div_ceil(64)
}

impl WorldSet {
    pub fn empty(n: usize) -> WorldSet {
        WorldSet {
            words: SmallVec::from_elem(0, words_for(n)),
        }
    }

    pub fn full(n: usize) -> WorldSet {
        let mut s = WorldSet {
            words: SmallVec::from_elem(u64::MAX, words_for(n)),
        };
        s.trim(n);
        s
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize) -> bool) -> WorldSet {
        let mut s = WorldSet::empty(n);
        for i in 0..n {
            if f(i) {
                s.insert(i);
            }
        }
        s
    }

    fn trim(&mut self, n: usize) {
        if !n.is_multiple_of(64) {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << (n % 64)) - 1;
            }
        }
    }

    pub fn contains(&self, i: usize) -> bool {
        self.words.get(i / 64).is_some_and(|w| w >> (i % 64) & 1 == 1)
    }

    pub fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn remove(&mut self, i: usize) {
        self.words[i / 64] &= !(1 << (i % 64));
    }

    pub fn intersect_with(&mut self, other: &WorldSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn union_with(&mut self, other: &WorldSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    /// Complement relative to `0..n`.
    pub fn complement(&self, n: usize) -> WorldSet {
        let mut s = WorldSet {
            words: self.words.iter().map(|w| !w).collect(),
        };
        s.trim(n);
        s
    }

    pub fn is_subset(&self, other: &WorldSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(k * 64 + b)
            })
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_operations_respect_the_universe() {
        for n in [0, 1, 3, 64, 65, 130] {
            let full = WorldSet::full(n);
            assert_eq!(full.count(), n);
            assert_eq!(WorldSet::empty(n).complement(n), full);
            let evens = WorldSet::from_fn(n, |i| i % 2 == 0);
            let odds = evens.complement(n);
            assert_eq!(odds.count(), n / 2);
            assert!(evens.iter().all(|i| i % 2 == 0));
            let mut u = evens.clone();
            u.union_with(&odds);
            assert_eq!(u, full);
            let mut i = evens.clone();
            i.intersect_with(&odds);
            assert!(i.is_empty());
            assert!(evens.is_subset(&full));
        }
    }
}
