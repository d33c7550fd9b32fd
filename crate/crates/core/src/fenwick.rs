//! Growable Fenwick tree over nonnegative integer weights, used for
//! weighted draws by prefix-sum search.

#[derive(Debug, Clone, Default)]
pub struct Fenwick {
    tree: Vec<u64>,
    weights: Vec<u64>,
}

impl Fenwick {
    pub fn with_capacity(capacity: usize) -> Self {
        let cap = capacity.max(1).next_power_of_two();
        Self {
            tree: vec![0; cap + 1],
            weights: vec![0; cap],
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weight(&self, idx: usize) -> u64 {
        self.weights.get(idx).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.prefix(self.weights.len())
    }

    fn grow(&mut self, min_len: usize) {
        let cap = min_len.next_power_of_two();
        let mut weights = std::mem::take(&mut self.weights);
        weights.resize(cap, 0);
        // linear-time rebuild
        let mut tree = vec![0u64; cap + 1];
        for (i, &w) in weights.iter().enumerate() {
            let k = i + 1;
            tree[k] += w;
            let parent = k + (k & k.wrapping_neg());
            if parent <= cap {
                tree[parent] += tree[k];
            }
        }
        self.tree = tree;
        self.weights = weights;
    }

    pub fn add(&mut self, idx: usize, delta: i64) {
        if idx >= self.weights.len() {
            self.grow(idx + 1);
        }
        let w = &mut self.weights[idx];
        *w = w.checked_add_signed(delta).expect("Fenwick weight underflow");
        let mut k = idx + 1;
        while k < self.tree.len() {
            self.tree[k] = self.tree[k].wrapping_add_signed(delta);
            k += k & k.wrapping_neg();
        }
    }

    pub fn set(&mut self, idx: usize, weight: u64) {
        let current = self.weight(idx);
        self.add(idx, weight as i64 - current as i64);
    }

    /// Sum of weights at indices `< end`.
    pub fn prefix(&self, end: usize) -> u64 {
        let mut k = end.min(self.weights.len());
        let mut acc = 0;
        while k > 0 {
            acc += self.tree[k];
            k &= k - 1;
        }
        acc
    }

    /// Finds the index whose cumulative interval contains `target`, returning
    /// `(index, offset within that index's weight)`. `target` must be below
    /// [`Fenwick::total`].
    pub fn find(&self, mut target: u64) -> (usize, u64) {
        debug_assert!(target < self.total());
        let mut pos = 0;
        let mut step = self.weights.len();
        while step > 0 {
            let next = pos + step;
            if next < self.tree.len() && self.tree[next] <= target {
                target -= self.tree[next];
                pos = next;
            }
            step >>= 1;
        }
        (pos, target)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn find_walks_cumulative_weights() {
        let mut f = Fenwick::with_capacity(4);
        f.set(0, 1);
        f.set(1, 0);
        f.set(2, 3);
        f.set(3, 2);
        assert_eq!(f.total(), 6);
        assert_eq!(f.find(0), (0, 0));
        assert_eq!(f.find(1), (2, 0));
        assert_eq!(f.find(3), (2, 2));
        assert_eq!(f.find(4), (3, 0));
        assert_eq!(f.find(5), (3, 1));
    }

    #[test]
    fn grows_on_demand() {
        let mut f = Fenwick::with_capacity(1);
        f.add(0, 2);
        f.add(9, 5);
        f.add(4, 1);
        assert_eq!(f.total(), 8);
        assert_eq!(f.find(2), (4, 0));
        assert_eq!(f.find(7), (9, 4));
    }

    proptest! {
        #[test]
        fn find_agrees_with_linear_scan(weights in proptest::collection::vec(0u64..20, 1..60), pick in 0u64..10_000) {
            let mut f = Fenwick::with_capacity(3);
            for (i, &w) in weights.iter().enumerate() {
                f.set(i, w);
            }
            let total: u64 = weights.iter().sum();
            prop_assert_eq!(f.total(), total);
            if total > 0 {
                let target = pick % total;
                let mut acc = 0;
                let mut expect = (0, 0);
                for (i, &w) in weights.iter().enumerate() {
                    if target < acc + w {
                        expect = (i, target - acc);
                        break;
                    }
                    acc += w;
                }
                prop_assert_eq!(f.find(target), expect);
            }
        }
    }
}
