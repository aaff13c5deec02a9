//! Enumeration and sampling of fixed-size index subsets, shared by the
//! condition-number analysis and the erasure simulations.

use std::collections::HashSet;

use itertools::Itertools;
use rand::seq::index;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Rng;

/// Largest number of subsets an exhaustive search may visit.
pub const EXHAUSTIVE_BUDGET: u128 = 1_000_000;

/// Default subset count for sampled searches.
pub const DEFAULT_SAMPLES: usize = 20_000;

/// Subsets are generated and evaluated in chunks of this size, so that memory
/// stays bounded while evaluation inside a chunk can run in parallel.
pub(crate) const CHUNK: usize = 2048;

/// How the subsets of a search are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubsetMode {
    Exhaustive,
    /// `count` distinct subsets drawn uniformly without replacement.
    Sampled {
        count: usize,
        seed: u64,
    },
}

/// `C(n, k)`, saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Sorted distinct zero-based indices into `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SubsetSpec {
    n: usize,
    indices: Vec<usize>,
}

impl SubsetSpec {
    /// Accepts indices in any order; rejects duplicates and out-of-range values.
    pub fn new(n: usize, mut indices: Vec<usize>) -> Result<Self> {
        indices.sort_unstable();
        if let Some(&bad) = indices.iter().find(|&&i| i >= n) {
            return Err(Error::invalid(format!("index {bad} out of range 0..{n}")));
        }
        if indices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::invalid("duplicate index in subset"));
        }
        Ok(Self { n, indices })
    }

    pub fn all(n: usize) -> Self {
        Self {
            n,
            indices: (0..n).collect(),
        }
    }

    /// Every index of `0..n` except the ones listed in `removed`.
    pub fn complement(n: usize, removed: &[usize]) -> Result<Self> {
        let removed = SubsetSpec::new(n, removed.to_vec())?;
        let keep = (0..n).filter(|i| removed.indices.binary_search(i).is_err()).collect();
        Ok(Self { n, indices: keep })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// One-based rendering, e.g. `1;4;5`.
    pub fn to_one_based_string(&self) -> String {
        self.indices.iter().map(|i| (i + 1).to_string()).join(";")
    }
}

/// Number of subsets a search over `k`-subsets of `0..n` visits in `mode`.
pub fn planned_count(n: usize, k: usize, mode: SubsetMode) -> u128 {
    let total = binomial(n, k);
    match mode {
        SubsetMode::Exhaustive => total,
        SubsetMode::Sampled { count, .. } => total.min(count as u128),
    }
}

/// Calls `f` on consecutive chunks of `k`-subsets of `0..n`.
///
/// Exhaustive mode walks subsets in lexicographic order and fails with
/// [`Error::BudgetExceeded`] above [`EXHAUSTIVE_BUDGET`]. Sampled mode draws the
/// whole list up front on one thread, so the subsets depend only on the seed;
/// asking for at least as many samples as exist degrades to exhaustive order.
pub fn for_each_chunk(
    n: usize,
    k: usize,
    mode: SubsetMode,
    mut f: impl FnMut(&[Vec<usize>]) -> Result<()>,
) -> Result<()> {
    if k > n {
        return Err(Error::invalid(format!("subset size {k} exceeds {n} items")));
    }
    let total = binomial(n, k);
    match mode {
        SubsetMode::Sampled { count, seed } if (count as u128) < total => {
            if count == 0 {
                return Err(Error::invalid("sample count must be at least 1"));
            }
            let list = sample_subsets(n, k, count, seed);
            for chunk in list.chunks(CHUNK) {
                f(chunk)?;
            }
            Ok(())
        }
        SubsetMode::Exhaustive if total > EXHAUSTIVE_BUDGET => Err(Error::BudgetExceeded {
            subsets: total,
            budget: EXHAUSTIVE_BUDGET,
        }),
        _ => {
            let mut buf = Vec::with_capacity(CHUNK);
            for combo in (0..n).combinations(k) {
                buf.push(combo);
                if buf.len() == CHUNK {
                    f(&buf)?;
                    buf.clear();
                }
            }
            if !buf.is_empty() {
                f(&buf)?;
            }
            Ok(())
        }
    }
}

/// `count` distinct sorted `k`-subsets of `0..n`, in draw order.
fn sample_subsets(n: usize, k: usize, count: usize, seed: u64) -> Vec<Vec<usize>> {
    let mut rng = Rng::new(seed);
    let by_complement = n - k < k;
    let mut seen = HashSet::with_capacity(count);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let drawn = if by_complement {
            let mut removed = index::sample(&mut rng, n, n - k).into_vec();
            removed.sort_unstable();
            (0..n).filter(|i| removed.binary_search(i).is_err()).collect::<Vec<_>>()
        } else {
            let mut v = index::sample(&mut rng, n, k).into_vec();
            v.sort_unstable();
            v
        };
        if seen.insert(drawn.clone()) {
            out.push(drawn);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial(30, 27), 4060);
        assert_eq!(binomial(150, 147), 551_300);
        assert_eq!(binomial(5, 0), 1);
        assert_eq!(binomial(3, 4), 0);
    }

    #[test]
    fn subset_spec_validation() {
        let s = SubsetSpec::new(5, vec![4, 1, 2]).unwrap();
        assert_eq!(s.indices(), &[1, 2, 4]);
        assert_eq!(s.to_one_based_string(), "2;3;5");
        assert!(SubsetSpec::new(5, vec![1, 1]).is_err());
        assert!(SubsetSpec::new(5, vec![5]).is_err());
        assert_eq!(SubsetSpec::complement(5, &[0, 3]).unwrap().indices(), &[1, 2, 4]);
    }

    fn collect(n: usize, k: usize, mode: SubsetMode) -> Vec<Vec<usize>> {
        let mut all = Vec::new();
        for_each_chunk(n, k, mode, |c| {
            all.extend_from_slice(c);
            Ok(())
        })
        .unwrap();
        all
    }

    #[test]
    fn exhaustive_order_and_count() {
        let all = collect(5, 3, SubsetMode::Exhaustive);
        assert_eq!(all.len(), 10);
        assert_eq!(all[0], vec![0, 1, 2]);
        assert_eq!(all[9], vec![2, 3, 4]);
        assert_eq!(
            collect(1000, 998, SubsetMode::Exhaustive).len() as u128,
            binomial(1000, 998)
        );
    }

    #[test]
    fn exhaustive_budget() {
        let err = for_each_chunk(60, 30, SubsetMode::Exhaustive, |_| Ok(())).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { .. }));
    }

    #[test]
    fn sampled_is_distinct_and_reproducible() {
        let mode = SubsetMode::Sampled { count: 500, seed: 3 };
        let a = collect(40, 37, mode);
        let b = collect(40, 37, mode);
        assert_eq!(a, b);
        assert_eq!(a.len(), 500);
        let uniq: HashSet<_> = a.iter().cloned().collect();
        assert_eq!(uniq.len(), 500);
        assert!(a.iter().all(|s| s.len() == 37 && s.windows(2).all(|w| w[0] < w[1])));

        let small = collect(30, 4, SubsetMode::Sampled { count: 100, seed: 1 });
        assert!(small.iter().all(|s| s.len() == 4));
    }

    #[test]
    fn oversampling_falls_back_to_exhaustive() {
        let all = collect(6, 4, SubsetMode::Sampled { count: 100, seed: 1 });
        assert_eq!(all.len(), 15);
    }
}
