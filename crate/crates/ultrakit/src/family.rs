//! Families over a carrier with ultimately periodic level sets.

use crate::carrier::IndexSet;
use crate::upset::UpSet;

/// A function out of a carrier taking finitely many distinct values, each on
/// an ultimately periodic level set. Level sets partition the carrier.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UpFamily<V> {
    index: IndexSet,
    values: Vec<V>,
    levels: Vec<UpSet>,
}

impl<V: Clone + Eq> UpFamily<V> {
    /// Builds a family from `(value, level)` pairs. Duplicate values are
    /// merged; the levels must partition the index carrier.
    pub fn new(index: IndexSet, pairs: Vec<(V, UpSet)>) -> UpFamily<V> {
        let mut values: Vec<V> = Vec::new();
        let mut levels: Vec<UpSet> = Vec::new();
        for (v, l) in pairs {
            if l.is_empty() {
                continue;
            }
            if let Some(i) = values.iter().position(|w| *w == v) {
                levels[i] = levels[i].union(&l);
            } else {
                values.push(v);
                levels.push(l);
            }
        }
        let fam = UpFamily {
            index,
            values,
            levels,
        };
        debug_assert!(fam.is_partition(), "levels must partition the carrier");
        fam
    }

    pub fn constant(index: IndexSet, value: V) -> UpFamily<V> {
        UpFamily::new(index, vec![(value, index.full_set())])
    }

    /// A family on ℕ given by a table read cyclically after a prefix.
    pub fn periodic(prefix: Vec<V>, pattern: Vec<V>) -> UpFamily<V> {
        assert!(!pattern.is_empty());
        let pl = prefix.len();
        let ql = pattern.len();
        let at = |n: u64| -> &V {
            if (n as usize) < pl {
                &prefix[n as usize]
            } else {
                &pattern[(n as usize - pl) % ql]
            }
        };
        let mut pairs: Vec<(V, UpSet)> = Vec::new();
        for v in prefix.iter().chain(pattern.iter()) {
            if pairs.iter().any(|(w, _)| w == v) {
                continue;
            }
            let level = UpSet::from_fn(pl, ql, |n| at(n) == v);
            pairs.push((v.clone(), level));
        }
        UpFamily::new(IndexSet::Nat, pairs)
    }

    /// A family on `Fin(n)` given pointwise.
    pub fn from_table(table: Vec<V>) -> UpFamily<V> {
        let n = table.len();
        let mut pairs: Vec<(V, UpSet)> = Vec::new();
        for v in &table {
            if pairs.iter().any(|(w, _)| w == v) {
                continue;
            }
            let members: Vec<u64> = table
                .iter()
                .enumerate()
                .filter(|(_, w)| *w == v)
                .map(|(i, _)| i as u64)
                .collect();
            pairs.push((v.clone(), UpSet::finite(&members)));
        }
        UpFamily::new(IndexSet::Fin(n), pairs)
    }

    pub fn index(&self) -> IndexSet {
        self.index
    }

    pub fn values(&self) -> &[V] {
        &self.values
    }

    pub fn levels(&self) -> &[UpSet] {
        &self.levels
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&V, &UpSet)> {
        self.values.iter().zip(self.levels.iter())
    }

    pub fn value_at(&self, s: u64) -> &V {
        let i = self
            .levels
            .iter()
            .position(|l| l.contains(s))
            .expect("levels partition the carrier");
        &self.values[i]
    }

    /// The level set of a value (empty if the value does not occur).
    pub fn level_of(&self, v: &V) -> UpSet {
        match self.values.iter().position(|w| w == v) {
            Some(i) => self.levels[i].clone(),
            None => UpSet::empty(),
        }
    }

    pub fn is_partition(&self) -> bool {
        let mut union = UpSet::empty();
        for (i, l) in self.levels.iter().enumerate() {
            for other in &self.levels[i + 1..] {
                if !l.intersect(other).is_empty() {
                    return false;
                }
            }
            union = union.union(l);
        }
        union == self.index.full_set()
    }

    /// Pointwise image of the family; equal images merge level sets.
    pub fn map<W: Clone + Eq>(&self, f: impl Fn(&V) -> W) -> UpFamily<W> {
        UpFamily::new(
            self.index,
            self.pairs().map(|(v, l)| (f(v), l.clone())).collect(),
        )
    }

    /// The agreement set `{s : self(s) = other(s)}`.
    pub fn agreement_set(&self, other: &UpFamily<V>) -> UpSet {
        let mut agree = UpSet::empty();
        for (v, l) in self.pairs() {
            agree = agree.union(&l.intersect(&other.level_of(v)));
        }
        agree
    }

    /// Precompose with a sampled function `g`. The callback must be
    /// `period`-periodic beyond `prefix` as a selector of values.
    pub fn precompose_sampled(
        &self,
        index: IndexSet,
        prefix: usize,
        period: usize,
        g: impl Fn(u64) -> u64,
    ) -> UpFamily<V> {
        let mut pairs: Vec<(V, UpSet)> = Vec::new();
        for (v, _) in self.pairs() {
            let level = UpSet::from_fn(prefix, period, |n| self.value_at(g(n)) == v)
                .intersect(&index.full_set());
            pairs.push((v.clone(), level));
        }
        UpFamily::new(index, pairs)
    }
}

impl<V: Clone + Eq + Ord> UpFamily<V> {
    /// Reorders the `(value, level)` pairs by value; structural equality of
    /// sorted families is extensional equality.
    pub fn sorted(&self) -> UpFamily<V> {
        let mut pairs: Vec<(V, UpSet)> =
            self.pairs().map(|(v, l)| (v.clone(), l.clone())).collect();
        pairs.sort();
        UpFamily {
            index: self.index,
            values: pairs.iter().map(|(v, _)| v.clone()).collect(),
            levels: pairs.into_iter().map(|(_, l)| l).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn periodic_family_levels() {
        let f = UpFamily::periodic(vec![9u32], vec![0, 1]);
        assert_eq!(*f.value_at(0), 9);
        assert_eq!(*f.value_at(1), 0);
        assert_eq!(*f.value_at(2), 1);
        assert_eq!(*f.value_at(3), 0);
        assert!(f.is_partition());
    }

    #[test]
    fn agreement_set_of_indicator_and_constant() {
        // Indicator of evens vs constant 1: they agree exactly on evens.
        let indicator = UpFamily::periodic(vec![], vec![1u32, 0]);
        let one = UpFamily::constant(IndexSet::Nat, 1u32);
        assert_eq!(indicator.agreement_set(&one), UpSet::residue(2, 0));
    }

    #[test]
    fn map_merges_levels() {
        let f = UpFamily::periodic(vec![], vec![0u32, 1, 2]);
        let g = f.map(|v| v % 2);
        assert_eq!(g.values().len(), 2);
        assert_eq!(g.level_of(&0), UpSet::residue(3, 0).union(&UpSet::residue(3, 2)));
    }
}
