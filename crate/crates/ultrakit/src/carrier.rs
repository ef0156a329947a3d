//! Index sets and the maps along which ultrafilters push forward.

use std::fmt;

use thiserror::Error;

use crate::upset::UpSet;

/// The carrier of an ultrafilter: a finite set or ℕ with its ultimately
/// periodic query algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IndexSet {
    Fin(usize),
    Nat,
}

impl IndexSet {
    /// The full subset of the carrier, as a queryable set.
    pub fn full_set(&self) -> UpSet {
        match self {
            IndexSet::Fin(n) => UpSet::initial_segment(*n as u64),
            IndexSet::Nat => UpSet::full(),
        }
    }

    /// Whether `q` is a legal query against this carrier.
    pub fn admits(&self, q: &UpSet) -> bool {
        match self {
            IndexSet::Fin(n) => q.difference(&UpSet::initial_segment(*n as u64)).is_empty(),
            IndexSet::Nat => true,
        }
    }

    /// Complement of `q` relative to the carrier.
    pub fn complement(&self, q: &UpSet) -> UpSet {
        self.full_set().difference(q)
    }

    pub fn contains_point(&self, p: u64) -> bool {
        match self {
            IndexSet::Fin(n) => p < *n as u64,
            IndexSet::Nat => true,
        }
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IndexSet::Fin(n) => write!(f, "fin({n})"),
            IndexSet::Nat => write!(f, "nat"),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MapError {
    #[error("level sets do not partition the domain {domain}")]
    InvalidPartition { domain: IndexSet },
    #[error("affine coefficient must be at least 1")]
    ZeroCoefficient,
    #[error("map domain {found} does not match expected carrier {expected}")]
    CarrierMismatch { expected: IndexSet, found: IndexSet },
}

/// How a map is described: by the partition of the domain into level sets
/// (finite codomain) or by an affine rule (codomain ℕ).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum MapRule {
    /// `levels[j]` is the preimage of `j`; the levels partition the domain.
    Levels(Vec<UpSet>),
    /// `k ↦ a·k + b` with `a ≥ 1`.
    Affine { a: u64, b: u64 },
}

/// A map between carriers whose preimages stay inside the query algebra.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UpMap {
    pub domain: IndexSet,
    pub codomain: IndexSet,
    pub rule: MapRule,
}

impl UpMap {
    pub fn new(domain: IndexSet, codomain: IndexSet, rule: MapRule) -> Result<UpMap, MapError> {
        match (&rule, codomain) {
            (MapRule::Levels(levels), IndexSet::Fin(n)) => {
                if levels.len() != n {
                    return Err(MapError::InvalidPartition { domain });
                }
                let mut union = UpSet::empty();
                for (i, l) in levels.iter().enumerate() {
                    if !domain.admits(l) {
                        return Err(MapError::InvalidPartition { domain });
                    }
                    for other in &levels[i + 1..] {
                        if !l.intersect(other).is_empty() {
                            return Err(MapError::InvalidPartition { domain });
                        }
                    }
                    union = union.union(l);
                }
                if union != domain.full_set() {
                    return Err(MapError::InvalidPartition { domain });
                }
            }
            (MapRule::Affine { a, .. }, IndexSet::Nat) => {
                if *a == 0 {
                    return Err(MapError::ZeroCoefficient);
                }
            }
            _ => return Err(MapError::InvalidPartition { domain }),
        }
        Ok(UpMap {
            domain,
            codomain,
            rule,
        })
    }

    pub fn identity(carrier: IndexSet) -> UpMap {
        match carrier {
            IndexSet::Nat => UpMap {
                domain: carrier,
                codomain: carrier,
                rule: MapRule::Affine { a: 1, b: 0 },
            },
            IndexSet::Fin(n) => UpMap {
                domain: carrier,
                codomain: carrier,
                rule: MapRule::Levels(
                    (0..n as u64).map(UpSet::singleton).collect(),
                ),
            },
        }
    }

    /// `k ↦ a·k + b` on ℕ.
    pub fn affine(a: u64, b: u64) -> UpMap {
        UpMap::new(IndexSet::Nat, IndexSet::Nat, MapRule::Affine { a, b }).unwrap()
    }

    /// `n ↦ n mod m` into `Fin(m)`.
    pub fn modulo(domain: IndexSet, m: u64) -> UpMap {
        let levels = (0..m)
            .map(|r| UpSet::residue(m, r).intersect(&domain.full_set()))
            .collect();
        UpMap::new(domain, IndexSet::Fin(m as usize), MapRule::Levels(levels)).unwrap()
    }

    /// The constant map at `point` of `Fin(n)`.
    pub fn constant_fin(domain: IndexSet, n: usize, point: u64) -> UpMap {
        let levels = (0..n as u64)
            .map(|j| {
                if j == point {
                    domain.full_set()
                } else {
                    UpSet::empty()
                }
            })
            .collect();
        UpMap::new(domain, IndexSet::Fin(n), MapRule::Levels(levels)).unwrap()
    }

    /// A finite map `Fin(n) → Fin(m)` given pointwise.
    pub fn from_table(table: &[u64], m: usize) -> UpMap {
        let levels = (0..m as u64)
            .map(|j| {
                UpSet::finite(
                    &table
                        .iter()
                        .enumerate()
                        .filter(|(_, &v)| v == j)
                        .map(|(i, _)| i as u64)
                        .collect::<Vec<_>>(),
                )
            })
            .collect();
        UpMap::new(
            IndexSet::Fin(table.len()),
            IndexSet::Fin(m),
            MapRule::Levels(levels),
        )
        .unwrap()
    }

    pub fn apply(&self, k: u64) -> u64 {
        debug_assert!(self.domain.contains_point(k));
        match &self.rule {
            MapRule::Affine { a, b } => a * k + b,
            MapRule::Levels(levels) => levels
                .iter()
                .position(|l| l.contains(k))
                .expect("levels partition the domain") as u64,
        }
    }

    /// Pullback of a queryable subset of the codomain.
    pub fn preimage(&self, q: &UpSet) -> UpSet {
        match &self.rule {
            MapRule::Affine { a, b } => q.affine_preimage(*a, *b),
            MapRule::Levels(levels) => {
                let mut out = UpSet::empty();
                for (j, level) in levels.iter().enumerate() {
                    if q.contains(j as u64) {
                        out = out.union(level);
                    }
                }
                out
            }
        }
    }

    /// `g ∘ self`, when the composite is expressible.
    pub fn then(&self, g: &UpMap) -> Result<UpMap, MapError> {
        if g.domain != self.codomain {
            return Err(MapError::CarrierMismatch {
                expected: self.codomain,
                found: g.domain,
            });
        }
        let rule = match (&self.rule, &g.rule) {
            (MapRule::Affine { a: a1, b: b1 }, MapRule::Affine { a: a2, b: b2 }) => {
                MapRule::Affine {
                    a: a1 * a2,
                    b: a2 * b1 + b2,
                }
            }
            (_, MapRule::Levels(outer)) => {
                MapRule::Levels(outer.iter().map(|l| self.preimage(l)).collect())
            }
            (MapRule::Levels(_), MapRule::Affine { .. }) => {
                // A finite set mapping affinely into ℕ: push each level.
                return Err(MapError::CarrierMismatch {
                    expected: self.codomain,
                    found: g.domain,
                });
            }
        };
        UpMap::new(self.domain, g.codomain, rule)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modulo_partitions_and_applies() {
        let f = UpMap::modulo(IndexSet::Nat, 3);
        assert_eq!(f.apply(7), 1);
        let pre = f.preimage(&UpSet::singleton(0));
        assert_eq!(pre, UpSet::residue(3, 0));
    }

    #[test]
    fn invalid_partition_rejected() {
        let bad = UpMap::new(
            IndexSet::Nat,
            IndexSet::Fin(2),
            MapRule::Levels(vec![UpSet::residue(2, 0), UpSet::residue(3, 1)]),
        );
        assert!(bad.is_err());
    }

    #[test]
    fn compose_affine_then_modulo() {
        let f = UpMap::affine(2, 1);
        let g = UpMap::modulo(IndexSet::Nat, 4);
        let h = f.then(&g).unwrap();
        for k in 0..30 {
            assert_eq!(h.apply(k), (2 * k + 1) % 4);
        }
    }

    #[test]
    fn preimage_functorial_along_composition() {
        let f = UpMap::affine(3, 2);
        let g = UpMap::affine(2, 0);
        let h = f.then(&g).unwrap();
        let q = UpSet::residue(5, 3);
        assert_eq!(h.preimage(&q), f.preimage(&g.preimage(&q)));
    }
}
