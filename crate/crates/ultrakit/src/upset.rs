//! Ultimately periodic subsets of the naturals.
//!
//! An [`UpSet`] stores a finite prefix of membership bits followed by a
//! repeating pattern, so every Boolean operation, emptiness, finiteness and
//! cofiniteness test is decidable. Values are kept in canonical form
//! (minimal period, then minimal prefix) so that structural equality is set
//! equality.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Membership classification of an ultimately periodic set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Empty,
    NonemptyFinite,
    Cofinite,
    Full,
    Neither,
}

/// An ultimately periodic subset of ℕ in canonical form.
///
/// Membership of `n < prefix.len()` is `prefix[n]`; beyond the prefix it is
/// `period[(n - prefix.len()) % period.len()]`. The period is never empty.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UpSet {
    prefix: Vec<bool>,
    period: Vec<bool>,
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub(crate) fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

impl UpSet {
    /// Builds a set from raw bits and canonicalizes it.
    pub fn new(prefix: Vec<bool>, period: Vec<bool>) -> UpSet {
        assert!(!period.is_empty(), "period must be nonempty");
        let mut s = UpSet { prefix, period };
        s.canonicalize();
        s
    }

    /// The set with no members.
    pub fn empty() -> UpSet {
        UpSet {
            prefix: Vec::new(),
            period: vec![false],
        }
    }

    /// The set of all naturals.
    pub fn full() -> UpSet {
        UpSet {
            prefix: Vec::new(),
            period: vec![true],
        }
    }

    /// The finite set with exactly the given members.
    pub fn finite(members: &[u64]) -> UpSet {
        let bound = members.iter().map(|&m| m + 1).max().unwrap_or(0) as usize;
        let mut prefix = vec![false; bound];
        for &m in members {
            prefix[m as usize] = true;
        }
        UpSet::new(prefix, vec![false])
    }

    /// The singleton `{n}`.
    pub fn singleton(n: u64) -> UpSet {
        UpSet::finite(&[n])
    }

    /// The residue class `{n : n ≡ r (mod m)}`.
    pub fn residue(m: u64, r: u64) -> UpSet {
        assert!(m > 0 && r < m);
        let mut period = vec![false; m as usize];
        period[r as usize] = true;
        UpSet::new(Vec::new(), period)
    }

    /// The initial segment `{0, …, n-1}`.
    pub fn initial_segment(n: u64) -> UpSet {
        UpSet::new(vec![true; n as usize], vec![false])
    }

    /// The final segment `{n, n+1, …}`.
    pub fn final_segment(n: u64) -> UpSet {
        UpSet::new(vec![false; n as usize], vec![true])
    }

    /// Evaluates `f` on `0..prefix_len + period_len` and builds the set that
    /// has prefix length `prefix_len` and period `period_len`. The callback
    /// must genuinely be `period_len`-periodic beyond the prefix.
    pub fn from_fn(prefix_len: usize, period_len: usize, f: impl Fn(u64) -> bool) -> UpSet {
        assert!(period_len > 0);
        let prefix = (0..prefix_len as u64).map(&f).collect();
        let period = (prefix_len as u64..(prefix_len + period_len) as u64)
            .map(&f)
            .collect();
        UpSet::new(prefix, period)
    }

    pub fn prefix_len(&self) -> usize {
        self.prefix.len()
    }

    pub fn period_len(&self) -> usize {
        self.period.len()
    }

    pub fn contains(&self, n: u64) -> bool {
        let l = self.prefix.len() as u64;
        if n < l {
            self.prefix[n as usize]
        } else {
            self.period[((n - l) % self.period.len() as u64) as usize]
        }
    }

    fn canonicalize(&mut self) {
        // Minimal period: smallest divisor of the current length that tiles it.
        let p = self.period.len();
        for d in 1..=p {
            if p % d == 0 && (0..p).all(|i| self.period[i] == self.period[i % d]) {
                self.period.truncate(d);
                break;
            }
        }
        // Minimal prefix: a trailing prefix bit that agrees with the rotated
        // period can be absorbed into the periodic tail.
        while let Some(&last) = self.prefix.last() {
            if last == *self.period.last().unwrap() {
                self.prefix.pop();
                self.period.rotate_right(1);
            } else {
                break;
            }
        }
    }

    fn zip_with(&self, other: &UpSet, f: impl Fn(bool, bool) -> bool) -> UpSet {
        let prefix_len = self.prefix.len().max(other.prefix.len());
        let period_len = lcm(self.period.len() as u64, other.period.len() as u64) as usize;
        UpSet::from_fn(prefix_len, period_len, |n| {
            f(self.contains(n), other.contains(n))
        })
    }

    pub fn union(&self, other: &UpSet) -> UpSet {
        self.zip_with(other, |a, b| a || b)
    }

    pub fn intersect(&self, other: &UpSet) -> UpSet {
        self.zip_with(other, |a, b| a && b)
    }

    pub fn difference(&self, other: &UpSet) -> UpSet {
        self.zip_with(other, |a, b| a && !b)
    }

    /// Complement relative to ℕ.
    pub fn complement(&self) -> UpSet {
        UpSet::new(
            self.prefix.iter().map(|b| !b).collect(),
            self.period.iter().map(|b| !b).collect(),
        )
    }

    pub fn classify(&self) -> Classification {
        let tail_empty = self.period.iter().all(|&b| !b);
        let tail_full = self.period.iter().all(|&b| b);
        let head_empty = self.prefix.iter().all(|&b| !b);
        let head_full = self.prefix.iter().all(|&b| b);
        match (tail_empty, tail_full) {
            (true, _) if head_empty => Classification::Empty,
            (true, _) => Classification::NonemptyFinite,
            (_, true) if head_full => Classification::Full,
            (_, true) => Classification::Cofinite,
            _ => Classification::Neither,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.classify() == Classification::Empty
    }

    pub fn is_full(&self) -> bool {
        self.classify() == Classification::Full
    }

    pub fn is_finite(&self) -> bool {
        matches!(
            self.classify(),
            Classification::Empty | Classification::NonemptyFinite
        )
    }

    pub fn is_cofinite(&self) -> bool {
        matches!(
            self.classify(),
            Classification::Cofinite | Classification::Full
        )
    }

    /// The least member, if any.
    pub fn min_element(&self) -> Option<u64> {
        let bound = self.prefix.len() + self.period.len();
        (0..bound as u64).find(|&n| self.contains(n))
    }

    /// All members below `bound`.
    pub fn members_below(&self, bound: u64) -> Vec<u64> {
        (0..bound).filter(|&n| self.contains(n)).collect()
    }

    /// Exact member count for finite sets.
    pub fn finite_cardinality(&self) -> Option<u64> {
        if !self.is_finite() {
            return None;
        }
        Some(self.prefix.iter().filter(|&&b| b).count() as u64)
    }

    /// The image `{a·k + b : k ∈ self}` under an injective affine map.
    pub fn affine_image(&self, a: u64, b: u64) -> UpSet {
        assert!(a >= 1);
        let l = self.prefix.len() as u64;
        let p = self.period.len() as u64;
        // Beyond a*l + b the image is (a*p)-periodic.
        let prefix_len = a * l + b;
        let period_len = a * p;
        UpSet::from_fn(prefix_len as usize, period_len as usize, |n| {
            n >= b && (n - b) % a == 0 && self.contains((n - b) / a)
        })
    }

    /// The preimage `{k : a·k + b ∈ self}` under an affine map.
    pub fn affine_preimage(&self, a: u64, b: u64) -> UpSet {
        assert!(a >= 1);
        let l = self.prefix.len() as u64;
        let p = self.period.len() as u64;
        // a*k + b >= l once k >= ceil((l - b) / a); beyond that membership is
        // p-periodic in k.
        let prefix_len = if l > b { l.div_ceil(a) } else { 0 };
        UpSet::from_fn(prefix_len as usize, p as usize, |k| {
            self.contains(a * k + b)
        })
    }

    /// Every canonical set with prefix length ≤ `max_prefix` and period
    /// length ≤ `max_period`, deduplicated. Used as a deterministic probe
    /// family for extensional comparisons.
    pub fn probe_family(max_prefix: usize, max_period: usize) -> Vec<UpSet> {
        let mut out = Vec::new();
        for pl in 0..=max_prefix {
            for ql in 1..=max_period {
                for bits in 0u32..(1 << (pl + ql)) {
                    let prefix = (0..pl).map(|i| bits >> i & 1 == 1).collect();
                    let period = (pl..pl + ql).map(|i| bits >> i & 1 == 1).collect();
                    let s = UpSet::new(prefix, period);
                    if !out.contains(&s) {
                        out.push(s);
                    }
                }
            }
        }
        out
    }
}

impl fmt::Display for UpSet {
    /// `prefix:<bits>;period:<bits>`, little-endian by index.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "prefix:")?;
        for &b in &self.prefix {
            write!(f, "{}", if b { '1' } else { '0' })?;
        }
        write!(f, ";period:")?;
        for &b in &self.period {
            write!(f, "{}", if b { '1' } else { '0' })?;
        }
        Ok(())
    }
}

impl fmt::Debug for UpSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum UpSetParseError {
    #[error("expected `prefix:<bits>;period:<bits>`, got {0:?}")]
    Malformed(String),
    #[error("period must be nonempty")]
    EmptyPeriod,
    #[error("invalid bit character {0:?}")]
    BadBit(char),
}

fn parse_bits(s: &str) -> Result<Vec<bool>, UpSetParseError> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(UpSetParseError::BadBit(other)),
        })
        .collect()
}

impl FromStr for UpSet {
    type Err = UpSetParseError;

    fn from_str(s: &str) -> Result<UpSet, UpSetParseError> {
        let rest = s.trim();
        let (pre, per) = rest
            .strip_prefix("prefix:")
            .and_then(|r| r.split_once(";period:"))
            .ok_or_else(|| UpSetParseError::Malformed(s.to_string()))?;
        let period = parse_bits(per)?;
        if period.is_empty() {
            return Err(UpSetParseError::EmptyPeriod);
        }
        Ok(UpSet::new(parse_bits(pre)?, period))
    }
}

/// Draws a random canonical set with bounded prefix and period lengths.
pub fn random_upset(rng: &mut impl rand::Rng, max_prefix: usize, max_period: usize) -> UpSet {
    let pl = rng.gen_range(0..=max_prefix);
    let ql = rng.gen_range(1..=max_period);
    let prefix = (0..pl).map(|_| rng.gen()).collect();
    let period = (0..ql).map(|_| rng.gen()).collect();
    UpSet::new(prefix, period)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn evens() -> UpSet {
        UpSet::residue(2, 0)
    }

    fn odds() -> UpSet {
        UpSet::residue(2, 1)
    }

    #[test]
    fn and_of_complementary_classes_is_empty() {
        assert_eq!(evens().intersect(&odds()), UpSet::empty());
        assert_eq!(evens().intersect(&odds()).classify(), Classification::Empty);
    }

    #[test]
    fn or_of_complementary_classes_is_full() {
        assert_eq!(evens().union(&odds()), UpSet::full());
        assert_eq!(evens().union(&odds()).classify(), Classification::Full);
    }

    #[test]
    fn diff_evens_first_two() {
        // Oracle: enumerate membership for n <= 3 * period and confirm the
        // periodic tail by hand.
        let d = evens().difference(&UpSet::finite(&[0, 2]));
        let expected: Vec<u64> = (0..12).filter(|&n| n % 2 == 0 && n >= 4).collect();
        assert_eq!(d.members_below(12), expected);
        for n in 4..20 {
            assert_eq!(d.contains(n), d.contains(n + 2));
        }
        assert_eq!(d.classify(), Classification::Neither);
    }

    #[test]
    fn canonical_form_minimizes_period_and_prefix() {
        // {0,2,4,...} written with a redundant prefix and doubled period.
        let messy = UpSet::new(vec![true, false, true, false], vec![true, false, true, false]);
        assert_eq!(messy, evens());
        assert_eq!(messy.period_len(), 2);
        assert_eq!(messy.prefix_len(), 0);
    }

    #[test]
    fn classification_cases() {
        assert_eq!(UpSet::empty().classify(), Classification::Empty);
        assert_eq!(UpSet::full().classify(), Classification::Full);
        assert_eq!(UpSet::finite(&[3]).classify(), Classification::NonemptyFinite);
        assert_eq!(
            UpSet::finite(&[3]).complement().classify(),
            Classification::Cofinite
        );
        assert_eq!(evens().classify(), Classification::Neither);
    }

    #[test]
    fn parse_display_roundtrip() {
        for s in ["prefix:;period:10", "prefix:011;period:1", "prefix:;period:0"] {
            let v: UpSet = s.parse().unwrap();
            let w: UpSet = v.to_string().parse().unwrap();
            assert_eq!(v, w);
        }
        assert!("period:1".parse::<UpSet>().is_err());
        assert!("prefix:;period:".parse::<UpSet>().is_err());
        assert!("prefix:2;period:1".parse::<UpSet>().is_err());
    }

    #[test]
    fn affine_image_and_preimage_agree_with_membership() {
        let s = UpSet::residue(3, 1).union(&UpSet::finite(&[0]));
        let img = s.affine_image(2, 5);
        for n in 0..60 {
            assert_eq!(
                img.contains(n),
                n >= 5 && (n - 5) % 2 == 0 && s.contains((n - 5) / 2),
                "image mismatch at {n}"
            );
        }
        let pre = s.affine_preimage(2, 5);
        for k in 0..60 {
            assert_eq!(pre.contains(k), s.contains(2 * k + 5), "preimage mismatch at {k}");
        }
    }

    #[test]
    fn probe_family_is_canonical_and_distinct() {
        let probes = UpSet::probe_family(2, 3);
        for (i, p) in probes.iter().enumerate() {
            for q in &probes[i + 1..] {
                assert_ne!(p, q);
            }
        }
        assert!(probes.len() > 20);
    }

    proptest::proptest! {
        #[test]
        fn boolean_ops_match_pointwise_semantics(
            pa in proptest::collection::vec(proptest::bool::ANY, 0..6),
            qa in proptest::collection::vec(proptest::bool::ANY, 1..6),
            pb in proptest::collection::vec(proptest::bool::ANY, 0..6),
            qb in proptest::collection::vec(proptest::bool::ANY, 1..6),
        ) {
            let a = UpSet::new(pa, qa);
            let b = UpSet::new(pb, qb);
            let bound = 3 * (a.prefix_len() + b.prefix_len() + 1).max(1) as u64
                + 3 * lcm(a.period_len() as u64, b.period_len() as u64);
            for n in 0..bound {
                proptest::prop_assert_eq!(a.union(&b).contains(n), a.contains(n) || b.contains(n));
                proptest::prop_assert_eq!(a.intersect(&b).contains(n), a.contains(n) && b.contains(n));
                proptest::prop_assert_eq!(a.difference(&b).contains(n), a.contains(n) && !b.contains(n));
                proptest::prop_assert_eq!(a.complement().contains(n), !a.contains(n));
            }
        }

        #[test]
        fn affine_image_preimage_galois(
            p in proptest::collection::vec(proptest::bool::ANY, 0..5),
            q in proptest::collection::vec(proptest::bool::ANY, 1..5),
            a in 1u64..4,
            b in 0u64..4,
        ) {
            let s = UpSet::new(p, q);
            // Injective affine maps: preimage of the image is the identity,
            // and image of the preimage is the intersection with the range.
            proptest::prop_assert_eq!(s.affine_image(a, b).affine_preimage(a, b), s.clone());
            let range = UpSet::full().affine_image(a, b);
            proptest::prop_assert_eq!(
                s.affine_preimage(a, b).affine_image(a, b),
                s.intersect(&range)
            );
        }

        #[test]
        fn canonical_equality_is_extensional(
            pa in proptest::collection::vec(proptest::bool::ANY, 0..6),
            qa in proptest::collection::vec(proptest::bool::ANY, 1..6),
            pb in proptest::collection::vec(proptest::bool::ANY, 0..6),
            qb in proptest::collection::vec(proptest::bool::ANY, 1..6),
        ) {
            let a = UpSet::new(pa, qa);
            let b = UpSet::new(pb, qb);
            let bound = (a.prefix_len() + b.prefix_len()) as u64
                + 2 * lcm(a.period_len() as u64, b.period_len() as u64);
            let extensionally_equal = (0..bound).all(|n| a.contains(n) == b.contains(n));
            proptest::prop_assert_eq!(a == b, extensionally_equal);
        }
    }
}
