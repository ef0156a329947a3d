//! Decidable ultrafilters over the ultimately periodic query algebra.
//!
//! Values are built from principal atoms, one computable non-principal atom
//! (largeness of `Q` is whether `{k : k! ∈ Q}` is cofinite, which is decidable
//! because `k! mod p` stabilizes at 0 for `k ≥ p`), pushforwards, and sums.
//! Smart constructors keep values in a normal form where every value with a
//! finite carrier is `Principal`.

use std::fmt;

use thiserror::Error;

use crate::carrier::{IndexSet, MapRule, UpMap};
use crate::family::UpFamily;
use crate::upset::{lcm, UpSet};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum UfError {
    #[error("query {query} lies outside the algebra of carrier {carrier}")]
    QueryOutsideAlgebra { carrier: IndexSet, query: UpSet },
    #[error("carrier mismatch: expected {expected}, found {found}")]
    CarrierMismatch { expected: IndexSet, found: IndexSet },
    #[error("no supported sum-carrier encoding: {0}")]
    UnsupportedEncoding(String),
}

/// How a sum ultrafilter's tagged-union carrier is laid out.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SumShape {
    /// Principal base: the sum is the fiber at the base point, carried by the
    /// fiber's own carrier via `t ↦ (point, t)`.
    Embedded { point: u64 },
    /// Base on ℕ, all fibers on `Fin(fiber)`: `(s, t) ↦ s·fiber + t`.
    NatStride { fiber: usize },
    /// Base on `Fin(n)`, fiber sizes may vary: `(s, t) ↦ offsets[s] + t`.
    FinOffsets { offsets: Vec<usize>, total: usize },
}

impl SumShape {
    pub fn encode(&self, s: u64, t: u64) -> u64 {
        match self {
            SumShape::Embedded { .. } => t,
            SumShape::NatStride { fiber } => s * *fiber as u64 + t,
            SumShape::FinOffsets { offsets, .. } => offsets[s as usize] as u64 + t,
        }
    }

    pub fn carrier(&self) -> IndexSet {
        match self {
            SumShape::Embedded { .. } => unreachable!("embedded sums carry the fiber's carrier"),
            SumShape::NatStride { .. } => IndexSet::Nat,
            SumShape::FinOffsets { total, .. } => IndexSet::Fin(*total),
        }
    }
}

/// Determines the supported encoding of `Σ_{s:base} fibers(s)`. Fiber-wise
/// finite carriers give a genuine tagged-union encoding; a principal base
/// with other fiber shapes degenerates to the embedded fiber.
pub fn sum_shape(
    base: &Ultrafilter,
    fibers: &UpFamily<Ultrafilter>,
) -> Result<SumShape, UfError> {
    if fibers.index() != base.carrier() {
        return Err(UfError::CarrierMismatch {
            expected: base.carrier(),
            found: fibers.index(),
        });
    }
    match base.carrier() {
        IndexSet::Nat => {
            let mut size = None;
            let mut all_fin = true;
            for (nu, _) in fibers.pairs() {
                match nu.carrier() {
                    IndexSet::Fin(m) => {
                        if *size.get_or_insert(m) != m {
                            all_fin = false;
                        }
                    }
                    IndexSet::Nat => all_fin = false,
                }
            }
            match (all_fin, size) {
                (true, Some(fiber)) => Ok(SumShape::NatStride { fiber }),
                _ => match base.principal_point() {
                    Some(point) => Ok(SumShape::Embedded { point }),
                    None => Err(UfError::UnsupportedEncoding(
                        "nat-based sums need a constant finite fiber size".into(),
                    )),
                },
            }
        }
        IndexSet::Fin(n) => {
            let mut offsets = Vec::with_capacity(n);
            let mut total = 0usize;
            for s in 0..n as u64 {
                offsets.push(total);
                match fibers.value_at(s).carrier() {
                    IndexSet::Fin(m) => total += m,
                    IndexSet::Nat => {
                        return match base.principal_point() {
                            Some(point) => Ok(SumShape::Embedded { point }),
                            None => Err(UfError::UnsupportedEncoding(
                                "finite-based sums need finite fibers".into(),
                            )),
                        }
                    }
                }
            }
            Ok(SumShape::FinOffsets { offsets, total })
        }
    }
}

/// A sum ultrafilter on a tagged-union carrier: a queryable set is large when
/// its fiber slices are fiberwise large for base-all points.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SumUf {
    pub base: Ultrafilter,
    pub fibers: UpFamily<Ultrafilter>,
    pub shape: SumShape,
}

/// A decidable ultrafilter value.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Ultrafilter {
    Principal { carrier: IndexSet, point: u64 },
    Factorial,
    Pushforward { base: Box<Ultrafilter>, map: UpMap },
    Sum(Box<SumUf>),
}

impl Ultrafilter {
    pub fn principal(carrier: IndexSet, point: u64) -> Ultrafilter {
        assert!(carrier.contains_point(point));
        Ultrafilter::Principal { carrier, point }
    }

    pub fn delta(point: u64) -> Ultrafilter {
        Ultrafilter::principal(IndexSet::Nat, point)
    }

    /// The unique ultrafilter on a one-point carrier.
    pub fn star() -> Ultrafilter {
        Ultrafilter::principal(IndexSet::Fin(1), 0)
    }

    pub fn factorial() -> Ultrafilter {
        Ultrafilter::Factorial
    }

    pub fn carrier(&self) -> IndexSet {
        match self {
            Ultrafilter::Principal { carrier, .. } => *carrier,
            Ultrafilter::Factorial => IndexSet::Nat,
            Ultrafilter::Pushforward { map, .. } => map.codomain,
            Ultrafilter::Sum(s) => s.shape.carrier(),
        }
    }

    pub fn principal_point(&self) -> Option<u64> {
        match self {
            Ultrafilter::Principal { point, .. } => Some(*point),
            _ => None,
        }
    }

    /// Structural principality; complete on smart-constructor output because
    /// every non-`Principal` normal form provably contains no large finite set.
    pub fn is_principal(&self) -> bool {
        matches!(self, Ultrafilter::Principal { .. })
    }

    /// Whether `q` is large. The lattice-homomorphism laws hold for every
    /// constructed value.
    pub fn is_large(&self, q: &UpSet) -> Result<bool, UfError> {
        let carrier = self.carrier();
        if !carrier.admits(q) {
            return Err(UfError::QueryOutsideAlgebra {
                carrier,
                query: q.clone(),
            });
        }
        Ok(self.is_large_unchecked(q))
    }

    fn is_large_unchecked(&self, q: &UpSet) -> bool {
        match self {
            Ultrafilter::Principal { point, .. } => q.contains(*point),
            Ultrafilter::Factorial => {
                // k! is a multiple of p for k ≥ p, so membership of k! in q is
                // eventually the constant value q takes on large multiples of
                // the period.
                let p = q.period_len() as u64;
                let l = q.prefix_len() as u64;
                q.contains(l.div_ceil(p) * p)
            }
            Ultrafilter::Pushforward { base, map } => base.is_large_unchecked(&map.preimage(q)),
            Ultrafilter::Sum(sum) => {
                let witness = sum_witness(sum, q);
                sum.base.is_large_unchecked(&witness)
            }
        }
    }

    /// Ultraquantification: `φ` holds for μ-all points iff `φ` is μ-large.
    pub fn forall(&self, phi: &UpSet) -> Result<bool, UfError> {
        self.is_large(phi)
    }

    /// Writes the value as an affine image of the factorial atom, when its
    /// normal form is such a pushforward chain.
    pub fn as_affine_of_factorial(&self) -> Option<(u64, u64)> {
        match self {
            Ultrafilter::Factorial => Some((1, 0)),
            Ultrafilter::Pushforward { base, map } => match map.rule {
                MapRule::Affine { a, b } => {
                    let (a0, b0) = base.as_affine_of_factorial()?;
                    Some((a * a0, a * b0 + b))
                }
                _ => None,
            },
            _ => None,
        }
    }
}

impl fmt::Debug for Ultrafilter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// The set of base points whose fiber slice of `q` is fiberwise large.
fn sum_witness(sum: &SumUf, q: &UpSet) -> UpSet {
    match &sum.shape {
        SumShape::Embedded { .. } => unreachable!("embedded sums are normalized away"),
        SumShape::NatStride { fiber } => {
            let m = *fiber;
            let fam_period = sum
                .fibers
                .levels()
                .iter()
                .fold(1u64, |acc, l| lcm(acc, l.period_len() as u64));
            let fam_prefix = sum
                .fibers
                .levels()
                .iter()
                .map(|l| l.prefix_len())
                .max()
                .unwrap_or(0);
            let period = lcm(fam_period, q.period_len() as u64) as usize;
            let prefix = fam_prefix.max((q.prefix_len()).div_ceil(m.max(1)));
            UpSet::from_fn(prefix, period, |s| {
                let slice: Vec<u64> = (0..m as u64)
                    .filter(|&t| q.contains(s * m as u64 + t))
                    .collect();
                sum.fibers
                    .value_at(s)
                    .is_large(&UpSet::finite(&slice))
                    .expect("fiber slices stay inside fiber carriers")
            })
        }
        SumShape::FinOffsets { offsets, total } => {
            let n = offsets.len();
            let members: Vec<u64> = (0..n as u64)
                .filter(|&s| {
                    let lo = offsets[s as usize] as u64;
                    let hi = if (s as usize) + 1 < n {
                        offsets[s as usize + 1] as u64
                    } else {
                        *total as u64
                    };
                    let slice: Vec<u64> = (lo..hi).filter(|&i| q.contains(i)).map(|i| i - lo).collect();
                    sum.fibers
                        .value_at(s)
                        .is_large(&UpSet::finite(&slice))
                        .expect("fiber slices stay inside fiber carriers")
                })
                .collect();
            UpSet::finite(&members)
        }
    }
}

/// Detects the point of an ultrafilter on a finite carrier by testing
/// singleton largeness; exactly one class of any finite partition is large.
fn detect_fin_point(uf: &Ultrafilter, n: usize) -> u64 {
    for j in 0..n as u64 {
        if uf.is_large_unchecked(&UpSet::singleton(j)) {
            return j;
        }
    }
    unreachable!("one singleton of a finite carrier must be large")
}

/// Pushforward of `mu` along `f`: a set is large iff its preimage is.
/// Normalizes to `Principal` whenever the point is detectable.
pub fn uf_pushforward(mu: &Ultrafilter, f: &UpMap) -> Result<Ultrafilter, UfError> {
    if f.domain != mu.carrier() {
        return Err(UfError::CarrierMismatch {
            expected: mu.carrier(),
            found: f.domain,
        });
    }
    if let Some(point) = mu.principal_point() {
        return Ok(Ultrafilter::principal(f.codomain, f.apply(point)));
    }
    if let IndexSet::Fin(n) = f.codomain {
        let raw = Ultrafilter::Pushforward {
            base: Box::new(mu.clone()),
            map: f.clone(),
        };
        return Ok(Ultrafilter::principal(f.codomain, detect_fin_point(&raw, n)));
    }
    if f.rule == (MapRule::Affine { a: 1, b: 0 }) {
        return Ok(mu.clone());
    }
    // Collapse chains of affine pushforwards.
    if let Ultrafilter::Pushforward { base, map } = mu {
        if let Ok(composite) = map.then(f) {
            return Ok(Ultrafilter::Pushforward {
                base: base.clone(),
                map: composite,
            });
        }
    }
    Ok(Ultrafilter::Pushforward {
        base: Box::new(mu.clone()),
        map: f.clone(),
    })
}

/// The sum ultrafilter `Σ_{s:mu} fibers(s)` on the tagged-union carrier.
pub fn uf_sum(
    mu: &Ultrafilter,
    fibers: &UpFamily<Ultrafilter>,
) -> Result<Ultrafilter, UfError> {
    let shape = sum_shape(mu, fibers)?;
    match shape {
        SumShape::Embedded { point } => {
            // The sum concentrates on the fiber over the base point; its
            // carrier is that fiber, embedded by t ↦ (point, t).
            Ok(fibers.value_at(point).clone())
        }
        SumShape::NatStride { fiber } => {
            if let Some(point) = mu.principal_point() {
                let t = fibers
                    .value_at(point)
                    .principal_point()
                    .expect("finite-carrier values are principal");
                return Ok(Ultrafilter::principal(
                    IndexSet::Nat,
                    shape.encode(point, t),
                ));
            }
            let star = Ultrafilter::star();
            if fiber == 1 && fibers.values().iter().all(|nu| *nu == star) {
                // Σ_{s:μ}⋆ relabels the carrier by s ↦ (s, 0).
                return Ok(mu.clone());
            }
            Ok(Ultrafilter::Sum(Box::new(SumUf {
                base: mu.clone(),
                fibers: fibers.clone(),
                shape,
            })))
        }
        SumShape::FinOffsets { total, .. } => {
            let raw = Ultrafilter::Sum(Box::new(SumUf {
                base: mu.clone(),
                fibers: fibers.clone(),
                shape,
            }));
            Ok(Ultrafilter::principal(
                IndexSet::Fin(total),
                detect_fin_point(&raw, total),
            ))
        }
    }
}

/// The sum of the tautological family `(δ_s)_{s:mu}` over a ℕ carrier. The
/// diagonal `s ↦ (s, s)` identifies the relevant fragment of the tagged union
/// with the base carrier, so the result is `mu` carried by that relabeling.
pub fn uf_sum_diagonal(mu: &Ultrafilter) -> Ultrafilter {
    mu.clone()
}

/// The limit `∫_{s:mu} fibers(s)`, i.e. the pushforward of the sum along the
/// second projection. A set is large iff it is large in fiberwise-many fibers
/// for mu-all base points.
pub fn uf_limit(
    mu: &Ultrafilter,
    fibers: &UpFamily<Ultrafilter>,
) -> Result<Ultrafilter, UfError> {
    if fibers.index() != mu.carrier() {
        return Err(UfError::CarrierMismatch {
            expected: mu.carrier(),
            found: fibers.index(),
        });
    }
    let mut carriers = fibers.values().iter().map(|nu| nu.carrier());
    let common = carriers
        .next()
        .ok_or_else(|| UfError::UnsupportedEncoding("limit needs at least one fiber".into()))?;
    for c in carriers {
        if c != common {
            return Err(UfError::CarrierMismatch {
                expected: common,
                found: c,
            });
        }
    }
    if fibers.values().len() == 1 {
        return Ok(fibers.values()[0].clone());
    }
    if let Some(point) = mu.principal_point() {
        return Ok(fibers.value_at(point).clone());
    }
    match common {
        IndexSet::Fin(k) => {
            let sum = uf_sum(mu, fibers)?;
            let proj = match mu.carrier() {
                IndexSet::Nat => UpMap::modulo(IndexSet::Nat, k as u64),
                IndexSet::Fin(_) => unreachable!("finite non-principal bases do not survive"),
            };
            uf_pushforward(&sum, &proj)
        }
        IndexSet::Nat => Err(UfError::UnsupportedEncoding(
            "limits of non-constant nat-carried families over a non-principal base".into(),
        )),
    }
}

/// Checks whether the family `f` is an ultrafilter map from `mu` to `nu`,
/// i.e. the pushforward of `mu` along `f` has the largeness oracle of `nu`.
/// Exact when either side normalizes to `Principal`; otherwise extensional on
/// the standard probe family.
pub fn uf_arrow_check(f: &UpMap, mu: &Ultrafilter, nu: &Ultrafilter) -> Result<bool, UfError> {
    let push = uf_pushforward(mu, f)?;
    if push.carrier() != nu.carrier() {
        return Err(UfError::CarrierMismatch {
            expected: nu.carrier(),
            found: push.carrier(),
        });
    }
    Ok(uf_equiv(&push, nu))
}

/// Standard probe family for extensional ultrafilter comparisons: every
/// canonical set with prefix ≤ 2 and period ≤ 4.
pub fn standard_probes() -> Vec<UpSet> {
    UpSet::probe_family(2, 4)
}

/// Extensional equality: structural on principal points, otherwise largeness
/// agreement on the standard probe family.
pub fn uf_equiv(a: &Ultrafilter, b: &Ultrafilter) -> bool {
    if a.carrier() != b.carrier() {
        return false;
    }
    match (a.principal_point(), b.principal_point()) {
        (Some(x), Some(y)) => x == y,
        (Some(_), None) | (None, Some(_)) => false,
        (None, None) => standard_probes()
            .iter()
            .filter(|q| a.carrier().admits(q))
            .all(|q| a.is_large_unchecked(q) == b.is_large_unchecked(q)),
    }
}

/// Outcome of the three-valued ultrafilter isomorphism check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UfIso {
    Isomorphic(IsoWitness),
    NotIsomorphic(String),
    Unknown,
}

/// A bijection between large sets identifying the restrictions: the k-th
/// member of the source progression `a·k + b` pairs with the k-th member of
/// the destination progression.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsoWitness {
    pub src_large: UpSet,
    pub dst_large: UpSet,
    pub src_rule: (u64, u64),
    pub dst_rule: (u64, u64),
}

impl IsoWitness {
    /// Transports a destination query back through the pairing.
    pub fn transport(&self, q: &UpSet) -> UpSet {
        let pre = q.affine_preimage(self.dst_rule.0, self.dst_rule.1);
        pre.affine_image(self.src_rule.0, self.src_rule.1)
    }

    /// Replays the witness: restriction agreement of the two oracles across
    /// the pairing on the given probes.
    pub fn verify(&self, mu: &Ultrafilter, nu: &Ultrafilter, probes: &[UpSet]) -> bool {
        if !mu.is_large_unchecked(&self.src_large) || !nu.is_large_unchecked(&self.dst_large) {
            return false;
        }
        probes
            .iter()
            .filter(|q| nu.carrier().admits(q))
            .all(|q| nu.is_large_unchecked(q) == mu.is_large_unchecked(&self.transport(q)))
    }
}

/// Decides isomorphism of ultrafilters when a structural invariant settles
/// it: principal points pair off, principality separates, and affine images
/// of the factorial atom are identified by the progression pairing.
pub fn uf_iso(mu: &Ultrafilter, nu: &Ultrafilter) -> UfIso {
    match (mu.principal_point(), nu.principal_point()) {
        (Some(x), Some(y)) => {
            return UfIso::Isomorphic(IsoWitness {
                src_large: UpSet::singleton(x),
                dst_large: UpSet::singleton(y),
                src_rule: (1, x),
                dst_rule: (1, y),
            })
        }
        (Some(_), None) | (None, Some(_)) => {
            return UfIso::NotIsomorphic("principality is an isomorphism invariant".into())
        }
        (None, None) => {}
    }
    if let (Some((a1, b1)), Some((a2, b2))) =
        (mu.as_affine_of_factorial(), nu.as_affine_of_factorial())
    {
        let witness = IsoWitness {
            src_large: UpSet::full().affine_image(a1, b1),
            dst_large: UpSet::full().affine_image(a2, b2),
            src_rule: (a1, b1),
            dst_rule: (a2, b2),
        };
        debug_assert!(witness.verify(mu, nu, &standard_probes()));
        return UfIso::Isomorphic(witness);
    }
    UfIso::Unknown
}

/// A violation of the ultrafilter axioms, with the offending queries.
#[derive(Debug, Clone)]
pub struct LawViolation {
    pub law: &'static str,
    pub queries: Vec<UpSet>,
}

/// Checks the lattice-homomorphism laws and autoduality on one query pair.
pub fn lattice_law_check(
    mu: &Ultrafilter,
    q1: &UpSet,
    q2: &UpSet,
) -> Result<Option<LawViolation>, UfError> {
    let carrier = mu.carrier();
    let violation = |law, queries: Vec<UpSet>| Some(LawViolation { law, queries });
    if mu.is_large(&UpSet::empty())? {
        return Ok(violation("empty set is large", vec![]));
    }
    if !mu.is_large(&carrier.full_set())? {
        return Ok(violation("full carrier is not large", vec![]));
    }
    let union = q1.union(q2);
    let inter = q1.intersect(q2);
    let l1 = mu.is_large(q1)?;
    let l2 = mu.is_large(q2)?;
    let lu = mu.is_large(&union)?;
    let li = mu.is_large(&inter)?;
    if l1 && !lu {
        return Ok(violation("large sets are not upward closed", vec![q1.clone(), union]));
    }
    if l1 && l2 && !li {
        return Ok(violation(
            "large sets are not intersection closed",
            vec![q1.clone(), q2.clone()],
        ));
    }
    if lu && !l1 && !l2 {
        return Ok(violation(
            "a large union with both halves small",
            vec![q1.clone(), q2.clone()],
        ));
    }
    let not_q1 = carrier.complement(q1);
    if mu.forall(&not_q1)? != !mu.forall(q1)? {
        return Ok(violation("ultraquantification fails autoduality", vec![q1.clone()]));
    }
    Ok(None)
}

impl fmt::Display for Ultrafilter {
    /// Nested expression grammar:
    /// `principal(<carrier>,<point>) | factorial | push(<uf>,<map>) |
    /// sum(<uf>,[<uf>@<level>,...])`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ultrafilter::Principal { carrier, point } => {
                write!(f, "principal({carrier},{point})")
            }
            Ultrafilter::Factorial => write!(f, "factorial"),
            Ultrafilter::Pushforward { base, map } => {
                write!(f, "push({base},{})", display_map(map))
            }
            Ultrafilter::Sum(sum) => {
                write!(f, "sum({},[", sum.base)?;
                let mut first = true;
                for (nu, level) in sum.fibers.pairs() {
                    if !first {
                        write!(f, ",")?;
                    }
                    first = false;
                    write!(f, "{nu}@{level}")?;
                }
                write!(f, "])")
            }
        }
    }
}

fn display_map(map: &UpMap) -> String {
    match &map.rule {
        MapRule::Affine { a, b } => format!("affine({a},{b})"),
        MapRule::Levels(levels) => {
            let body: Vec<String> = levels.iter().map(|l| l.to_string()).collect();
            format!("levels({};{})", map.domain, body.join("|"))
        }
    }
}

/// Parser for the [`Ultrafilter`] expression grammar.
pub mod parse {
    use super::*;

    #[derive(Debug, Error, PartialEq, Eq)]
    pub enum UfParseError {
        #[error("unexpected input at {0:?}")]
        Unexpected(String),
        #[error("bad set literal: {0}")]
        BadSet(#[from] crate::upset::UpSetParseError),
        #[error("bad map: {0}")]
        BadMap(#[from] crate::carrier::MapError),
        #[error("bad value: {0}")]
        BadValue(#[from] UfError),
    }

    struct Cursor<'a> {
        src: &'a str,
        pos: usize,
    }

    impl<'a> Cursor<'a> {
        fn rest(&self) -> &'a str {
            &self.src[self.pos..]
        }

        fn eat(&mut self, token: &str) -> Result<(), UfParseError> {
            if self.rest().starts_with(token) {
                self.pos += token.len();
                Ok(())
            } else {
                Err(UfParseError::Unexpected(self.rest().to_string()))
            }
        }

        fn eat_number(&mut self) -> Result<u64, UfParseError> {
            let digits: String = self.rest().chars().take_while(|c| c.is_ascii_digit()).collect();
            if digits.is_empty() {
                return Err(UfParseError::Unexpected(self.rest().to_string()));
            }
            self.pos += digits.len();
            Ok(digits.parse().unwrap())
        }

        fn eat_until(&mut self, stops: &[char]) -> &'a str {
            let end = self
                .rest()
                .find(|c| stops.contains(&c))
                .unwrap_or(self.rest().len());
            let out = &self.rest()[..end];
            self.pos += end;
            out
        }
    }

    fn parse_carrier(c: &mut Cursor) -> Result<IndexSet, UfParseError> {
        if c.rest().starts_with("nat") {
            c.eat("nat")?;
            Ok(IndexSet::Nat)
        } else {
            c.eat("fin(")?;
            let n = c.eat_number()?;
            c.eat(")")?;
            Ok(IndexSet::Fin(n as usize))
        }
    }

    fn parse_map(c: &mut Cursor) -> Result<UpMap, UfParseError> {
        if c.rest().starts_with("affine(") {
            c.eat("affine(")?;
            let a = c.eat_number()?;
            c.eat(",")?;
            let b = c.eat_number()?;
            c.eat(")")?;
            Ok(UpMap::affine(a, b))
        } else {
            c.eat("levels(")?;
            let domain = parse_carrier(c)?;
            c.eat(";")?;
            let mut levels = Vec::new();
            loop {
                let lit = c.eat_until(&['|', ')']);
                levels.push(lit.parse::<UpSet>()?);
                if c.rest().starts_with('|') {
                    c.eat("|")?;
                } else {
                    break;
                }
            }
            c.eat(")")?;
            let n = levels.len();
            Ok(UpMap::new(domain, IndexSet::Fin(n), MapRule::Levels(levels))?)
        }
    }

    fn parse_uf(c: &mut Cursor) -> Result<Ultrafilter, UfParseError> {
        if c.rest().starts_with("factorial") {
            c.eat("factorial")?;
            Ok(Ultrafilter::factorial())
        } else if c.rest().starts_with("principal(") {
            c.eat("principal(")?;
            let carrier = parse_carrier(c)?;
            c.eat(",")?;
            let point = c.eat_number()?;
            c.eat(")")?;
            Ok(Ultrafilter::principal(carrier, point))
        } else if c.rest().starts_with("push(") {
            c.eat("push(")?;
            let base = parse_uf(c)?;
            c.eat(",")?;
            let map = parse_map(c)?;
            c.eat(")")?;
            Ok(uf_pushforward(&base, &map)?)
        } else if c.rest().starts_with("sum(") {
            c.eat("sum(")?;
            let base = parse_uf(c)?;
            c.eat(",[")?;
            let mut pairs = Vec::new();
            loop {
                let nu = parse_uf(c)?;
                c.eat("@")?;
                let lit = c.eat_until(&[',', ']']);
                pairs.push((nu, lit.parse::<UpSet>()?));
                if c.rest().starts_with(',') {
                    c.eat(",")?;
                } else {
                    break;
                }
            }
            c.eat("])")?;
            let fibers = UpFamily::new(base.carrier(), pairs);
            Ok(uf_sum(&base, &fibers)?)
        } else {
            Err(UfParseError::Unexpected(c.rest().to_string()))
        }
    }

    /// Parses a value in the expression grammar, renormalizing as it goes.
    pub fn parse_ultrafilter(src: &str) -> Result<Ultrafilter, UfParseError> {
        let mut c = Cursor {
            src: src.trim(),
            pos: 0,
        };
        let uf = parse_uf(&mut c)?;
        if !c.rest().is_empty() {
            return Err(UfParseError::Unexpected(c.rest().to_string()));
        }
        Ok(uf)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn evens() -> UpSet {
        UpSet::residue(2, 0)
    }

    #[test]
    fn principal_largeness_is_membership() {
        let d3 = Ultrafilter::delta(3);
        assert!(!d3.is_large(&evens()).unwrap());
        assert!(d3.is_large(&UpSet::finite(&[3, 5])).unwrap());
    }

    #[test]
    fn factorial_decides_by_stabilized_residue() {
        // Oracle: k! mod 2 for k ≤ 4 is 1,1,0,0,0 and stays even from k = 2
        // on, so the witness set of the evens is cofinite.
        let fact: Vec<u64> = vec![1, 1, 2, 6, 24];
        assert!(fact[2..].iter().all(|n| n % 2 == 0));
        assert!(Ultrafilter::factorial().is_large(&evens()).unwrap());

        // Oracle: k! ≡ 0 mod 3 for k ≥ 3, so the witness of {n ≡ 1 mod 3} is
        // finite.
        assert!(fact[3..].iter().all(|n| n % 3 == 0));
        assert!(!Ultrafilter::factorial()
            .is_large(&UpSet::residue(3, 1))
            .unwrap());
    }

    #[test]
    fn factorial_contains_cofinite_and_no_finite_set() {
        let f = Ultrafilter::factorial();
        assert!(f.is_large(&UpSet::finite(&[0, 1, 5]).complement()).unwrap());
        assert!(!f.is_large(&UpSet::finite(&[0, 1, 2, 3, 4, 5, 6])).unwrap());
    }

    #[test]
    fn query_outside_algebra_rejected() {
        let star = Ultrafilter::star();
        let err = star.is_large(&UpSet::finite(&[2])).unwrap_err();
        assert!(matches!(err, UfError::QueryOutsideAlgebra { .. }));
    }

    #[test]
    fn pushforward_identity_and_shift() {
        let f = Ultrafilter::factorial();
        assert_eq!(
            uf_pushforward(&f, &UpMap::identity(IndexSet::Nat)).unwrap(),
            f
        );
        let d5 = Ultrafilter::delta(5);
        assert_eq!(
            uf_pushforward(&d5, &UpMap::affine(1, 2)).unwrap(),
            Ultrafilter::delta(7)
        );
    }

    #[test]
    fn pushforward_mod3_normalizes_to_principal() {
        // {k : k! ≡ 0 mod 3} is cofinite, so the image point is 0.
        let push = uf_pushforward(&Ultrafilter::factorial(), &UpMap::modulo(IndexSet::Nat, 3))
            .unwrap();
        assert_eq!(push, Ultrafilter::principal(IndexSet::Fin(3), 0));
    }

    #[test]
    fn pushforward_functorial_on_oracles() {
        let f = UpMap::affine(2, 1);
        let g = UpMap::affine(3, 0);
        let h = f.then(&g).unwrap();
        let along_h = uf_pushforward(&Ultrafilter::factorial(), &h).unwrap();
        let step = uf_pushforward(&Ultrafilter::factorial(), &f).unwrap();
        let stepped = uf_pushforward(&step, &g).unwrap();
        assert!(uf_equiv(&along_h, &stepped));
    }

    #[test]
    fn sum_over_principal_base_embeds_fiber() {
        let nus = UpFamily::from_table(vec![
            Ultrafilter::principal(IndexSet::Fin(3), 2),
            Ultrafilter::principal(IndexSet::Fin(3), 0),
        ]);
        let sum = uf_sum(&Ultrafilter::principal(IndexSet::Fin(2), 1), &nus).unwrap();
        // δ_1 on Fin(2) ⊗ δ_0 on Fin(3) concentrates at the encoded (1,0).
        assert_eq!(sum, Ultrafilter::principal(IndexSet::Fin(6), 3));
    }

    #[test]
    fn sum_of_stars_relabels_base() {
        let stars = UpFamily::constant(IndexSet::Nat, Ultrafilter::star());
        let sum = uf_sum(&Ultrafilter::factorial(), &stars).unwrap();
        assert_eq!(sum, Ultrafilter::factorial());
    }

    #[test]
    fn diagonal_sum_is_base_up_to_relabeling() {
        let mu = Ultrafilter::factorial();
        let sum = uf_sum_diagonal(&mu);
        match uf_iso(&sum, &Ultrafilter::factorial()) {
            UfIso::Isomorphic(w) => {
                let mut rng = crate::testutil::seeded_rng(17);
                let probes: Vec<UpSet> = (0..50)
                    .map(|_| crate::upset::random_upset(&mut rng, 4, 5))
                    .collect();
                assert!(w.verify(&sum, &Ultrafilter::factorial(), &probes));
            }
            other => panic!("expected isomorphism, got {other:?}"),
        }
    }

    #[test]
    fn limit_of_parity_family_is_delta_zero() {
        // ν_s = δ_{s mod 2} into Fin(2); the evens are factorial-large.
        let nus = UpFamily::periodic(
            vec![],
            vec![
                Ultrafilter::principal(IndexSet::Fin(2), 0),
                Ultrafilter::principal(IndexSet::Fin(2), 1),
            ],
        );
        let lim = uf_limit(&Ultrafilter::factorial(), &nus).unwrap();
        assert_eq!(lim, Ultrafilter::principal(IndexSet::Fin(2), 0));
    }

    #[test]
    fn limit_constant_and_principal_base() {
        let nu = Ultrafilter::factorial();
        let fam = UpFamily::constant(IndexSet::Nat, nu.clone());
        assert_eq!(uf_limit(&Ultrafilter::delta(9), &fam).unwrap(), nu);
        assert_eq!(uf_limit(&Ultrafilter::factorial(), &fam).unwrap(), nu);
    }

    #[test]
    fn iso_principal_pair_and_mixed() {
        assert!(matches!(
            uf_iso(&Ultrafilter::delta(3), &Ultrafilter::delta(7)),
            UfIso::Isomorphic(_)
        ));
        assert!(matches!(
            uf_iso(&Ultrafilter::delta(3), &Ultrafilter::factorial()),
            UfIso::NotIsomorphic(_)
        ));
    }

    #[test]
    fn iso_factorial_shift() {
        let shifted =
            uf_pushforward(&Ultrafilter::factorial(), &UpMap::affine(1, 1)).unwrap();
        match uf_iso(&Ultrafilter::factorial(), &shifted) {
            UfIso::Isomorphic(w) => {
                let mut rng = crate::testutil::seeded_rng(23);
                let probes: Vec<UpSet> = (0..50)
                    .map(|_| crate::upset::random_upset(&mut rng, 4, 5))
                    .collect();
                assert!(w.verify(&Ultrafilter::factorial(), &shifted, &probes));
            }
            other => panic!("expected isomorphism, got {other:?}"),
        }
    }

    #[test]
    fn arrow_check_examples() {
        let f = Ultrafilter::factorial();
        assert!(uf_arrow_check(&UpMap::identity(IndexSet::Nat), &f, &f).unwrap());
        // k! is even for k ≥ 2, so n ↦ n mod 2 carries factorial to δ_0.
        assert!(uf_arrow_check(
            &UpMap::modulo(IndexSet::Nat, 2),
            &f,
            &Ultrafilter::principal(IndexSet::Fin(2), 0)
        )
        .unwrap());
        // The constant family at 5 carries δ_1 to δ_5.
        let const5 = UpMap::from_table(&[5, 5], 6);
        assert!(uf_arrow_check(
            &const5,
            &Ultrafilter::principal(IndexSet::Fin(2), 1),
            &Ultrafilter::principal(IndexSet::Fin(6), 5)
        )
        .unwrap());
    }

    #[test]
    fn forall_examples() {
        let f = Ultrafilter::factorial();
        assert!(f.forall(&UpSet::full()).unwrap());
        assert!(!f.forall(&UpSet::residue(2, 1)).unwrap());
        let d0 = Ultrafilter::delta(0);
        assert!(d0.forall(&UpSet::singleton(0)).unwrap());
    }

    #[test]
    fn display_parse_roundtrip() {
        let pool = [
            Ultrafilter::delta(4),
            Ultrafilter::star(),
            Ultrafilter::factorial(),
            uf_pushforward(&Ultrafilter::factorial(), &UpMap::affine(3, 1)).unwrap(),
            uf_sum(
                &Ultrafilter::factorial(),
                &UpFamily::periodic(
                    vec![],
                    vec![
                        Ultrafilter::principal(IndexSet::Fin(2), 0),
                        Ultrafilter::principal(IndexSet::Fin(2), 1),
                    ],
                ),
            )
            .unwrap(),
        ];
        for uf in &pool {
            let back = parse::parse_ultrafilter(&uf.to_string()).unwrap();
            assert_eq!(&back, uf);
        }
    }

    #[test]
    fn lattice_laws_hold_on_random_queries() {
        let pool = crate::testutil::ultrafilter_pool();
        let mut rng = crate::testutil::seeded_rng(5);
        for mu in &pool {
            for _ in 0..200 {
                let q1 = crate::testutil::random_query(&mut rng, mu.carrier());
                let q2 = crate::testutil::random_query(&mut rng, mu.carrier());
                let v = lattice_law_check(mu, &q1, &q2).unwrap();
                assert!(v.is_none(), "{mu}: {v:?}");
            }
        }
    }
}

/// Exploratory probe of the order sensitivity of iterated sums: compares
/// `μ⊗ν` and `ν⊗μ` largeness through the coordinate swap on the given
/// probes. Returns the probes on which they differ; the general theory does
/// not decide whether a separating example exists in this fragment.
pub fn sum_order_comparison(
    mu: &Ultrafilter,
    nu_size: usize,
    nu_point: u64,
    probes: &[UpSet],
) -> Result<Vec<UpSet>, UfError> {
    // μ on ℕ, ν = δ_{nu_point} on Fin(nu_size): μ⊗ν lives on s·k + t and
    // ν⊗μ on the swapped encoding; with a principal ν both sums are
    // computable, and the swap (s, t) ↦ (t, s) transports queries exactly.
    let nu = Ultrafilter::principal(IndexSet::Fin(nu_size), nu_point);
    let mu_nu = uf_sum(mu, &UpFamily::constant(mu.carrier(), nu.clone()))?;
    // ν⊗μ: principal base, embedded copy of μ at the ν point.
    let nu_mu = uf_sum(&nu, &UpFamily::constant(nu.carrier(), mu.clone()))?;
    let k = nu_size as u64;
    let mut separating = Vec::new();
    for q in probes {
        // q is a query on the ν⊗μ carrier (μ's carrier, tagged at the base
        // point); its swap image on μ⊗ν asks for pairs (s, nu_point).
        let swapped = q.affine_image(k, nu_point);
        if mu_nu.is_large(&swapped)? != nu_mu.is_large(q)? {
            separating.push(q.clone());
        }
    }
    Ok(separating)
}
