//! μ-families and dependent ultraproducts of bounded finite fibers.
//!
//! The computable fragment of an ultraproduct is the set of choice functions
//! with ultimately periodic level sets. Over any ultrafilter of the decidable
//! fragment such a function takes exactly one value on a large set (its level
//! sets form a finite queryable partition), so every class has a constant
//! representative: the representatives of `∫_{s:μ}A_s` are the fiber values
//! available on a μ-large set. The enumeration bound and the saturation check
//! keep that collapse argument honest.

use thiserror::Error;

use crate::carrier::{IndexSet, UpMap};
use crate::family::UpFamily;
use crate::uf::{sum_shape, SumShape, UfError, Ultrafilter};
use crate::upset::{lcm, UpSet};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ProductError {
    #[error("carrier mismatch: expected {expected}, found {found}")]
    CarrierMismatch { expected: IndexSet, found: IndexSet },
    #[error("the empty-fiber locus is large")]
    EmptyLargeFiber,
    #[error(transparent)]
    Uf(#[from] UfError),
}

/// A family of subsets of `Fin(bound)` indexed by a carrier, stored by the
/// queryable sets `{s : j ∈ A_s}` for each fiber value `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundedFamily {
    index: IndexSet,
    bound: usize,
    fiber_sets: Vec<UpSet>,
}

impl BoundedFamily {
    pub fn new(index: IndexSet, bound: usize, fiber_sets: Vec<UpSet>) -> BoundedFamily {
        assert_eq!(fiber_sets.len(), bound);
        let full = index.full_set();
        let fiber_sets = fiber_sets.into_iter().map(|s| s.intersect(&full)).collect();
        BoundedFamily {
            index,
            bound,
            fiber_sets,
        }
    }

    /// The constant family at a fixed subset of `Fin(bound)`.
    pub fn constant(index: IndexSet, bound: usize, members: &[usize]) -> BoundedFamily {
        let fiber_sets = (0..bound)
            .map(|j| {
                if members.contains(&j) {
                    index.full_set()
                } else {
                    UpSet::empty()
                }
            })
            .collect();
        BoundedFamily::new(index, bound, fiber_sets)
    }

    pub fn index(&self) -> IndexSet {
        self.index
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn fiber_sets(&self) -> &[UpSet] {
        &self.fiber_sets
    }

    pub fn fiber_at(&self, s: u64) -> Vec<usize> {
        (0..self.bound)
            .filter(|&j| self.fiber_sets[j].contains(s))
            .collect()
    }

    /// The locus `{s : A_s = ∅}`.
    pub fn empty_fiber_locus(&self) -> UpSet {
        let mut nonempty = UpSet::empty();
        for f in &self.fiber_sets {
            nonempty = nonempty.union(f);
        }
        self.index.complement(&nonempty)
    }
}

/// A choice function with ultimately periodic level sets, valued in
/// `Fin(bound)`; an element of an ultraproduct once a membership constraint
/// holds on a large set. Stored with sorted values so structural equality is
/// extensional.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UpElement {
    bound: usize,
    values: UpFamily<usize>,
}

impl UpElement {
    pub fn new(bound: usize, values: UpFamily<usize>) -> UpElement {
        assert!(values.values().iter().all(|&v| v < bound));
        UpElement {
            bound,
            values: values.sorted(),
        }
    }

    pub fn constant(index: IndexSet, bound: usize, value: usize) -> UpElement {
        UpElement::new(bound, UpFamily::constant(index, value))
    }

    pub fn carrier(&self) -> IndexSet {
        self.values.index()
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn values(&self) -> &UpFamily<usize> {
        &self.values
    }

    pub fn value_at(&self, s: u64) -> usize {
        *self.values.value_at(s)
    }

    /// Longest level prefix and the lcm of level periods: a sound periodicity
    /// bound for sampling-based transports.
    pub fn periodicity(&self) -> (usize, u64) {
        let prefix = self
            .values
            .levels()
            .iter()
            .map(|l| l.prefix_len())
            .max()
            .unwrap_or(0);
        let period = self
            .values
            .levels()
            .iter()
            .fold(1u64, |acc, l| lcm(acc, l.period_len() as u64));
        (prefix, period)
    }

    /// The agreement set `{s : self(s) = other(s)}`.
    pub fn agreement_set(&self, other: &UpElement) -> UpSet {
        self.values.agreement_set(&other.values)
    }

    /// The availability set `{s : self(s) ∈ A_s}`.
    pub fn membership_set(&self, fam: &BoundedFamily) -> UpSet {
        let mut ok = UpSet::empty();
        for (v, l) in self.values.pairs() {
            ok = ok.union(&l.intersect(&fam.fiber_sets[*v]));
        }
        ok
    }
}

/// Equality of μ-families: agreement on a μ-large set.
pub fn ufam_eq(x: &UpElement, y: &UpElement, mu: &Ultrafilter) -> Result<bool, ProductError> {
    if x.carrier() != y.carrier() || x.carrier() != mu.carrier() {
        return Err(ProductError::CarrierMismatch {
            expected: mu.carrier(),
            found: x.carrier(),
        });
    }
    Ok(mu.is_large(&x.agreement_set(y))?)
}

/// The representable fragment of a dependent ultraproduct: one constant
/// representative per fiber value available on a large set.
#[derive(Debug, Clone)]
pub struct UltraproductSet {
    family: BoundedFamily,
    uf: Ultrafilter,
    reps: Vec<usize>,
}

impl UltraproductSet {
    pub fn family(&self) -> &BoundedFamily {
        &self.family
    }

    pub fn ultrafilter(&self) -> &Ultrafilter {
        &self.uf
    }

    /// Constant representative values, in increasing order.
    pub fn reps(&self) -> &[usize] {
        &self.reps
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn rep_element(&self, i: usize) -> UpElement {
        UpElement::constant(self.family.index(), self.family.bound(), self.reps[i])
    }

    /// The representative class of a valid element: the unique rep it agrees
    /// with on a large set. `None` when the element is not a choice function
    /// on any large set.
    pub fn class_of(&self, x: &UpElement) -> Result<Option<usize>, ProductError> {
        if !self.uf.is_large(&x.membership_set(&self.family))? {
            return Ok(None);
        }
        for (i, _) in self.reps.iter().enumerate() {
            if ufam_eq(x, &self.rep_element(i), &self.uf)? {
                return Ok(Some(i));
            }
        }
        Ok(None)
    }
}

/// Enumerates the representable fragment of `∫_{s:mu}A_s`.
pub fn uprod_enumerate(
    mu: &Ultrafilter,
    fam: &BoundedFamily,
) -> Result<UltraproductSet, ProductError> {
    if fam.index() != mu.carrier() {
        return Err(ProductError::CarrierMismatch {
            expected: mu.carrier(),
            found: fam.index(),
        });
    }
    if mu.is_large(&fam.empty_fiber_locus())? {
        return Err(ProductError::EmptyLargeFiber);
    }
    let mut reps = Vec::new();
    for j in 0..fam.bound() {
        if mu.is_large(&fam.fiber_sets[j])? {
            reps.push(j);
        }
    }
    Ok(UltraproductSet {
        family: fam.clone(),
        uf: mu.clone(),
        reps,
    })
}

/// All pure-periodic choice patterns with period ≤ `max_period` over a ℕ
/// carrier, or all tables over a finite carrier.
fn candidate_elements(index: IndexSet, bound: usize, max_period: usize) -> Vec<UpElement> {
    let mut out = Vec::new();
    match index {
        IndexSet::Fin(n) => {
            let mut table = vec![0usize; n];
            loop {
                out.push(UpElement::new(bound, UpFamily::from_table(table.clone())));
                let mut i = 0;
                loop {
                    if i == n {
                        return out;
                    }
                    table[i] += 1;
                    if table[i] < bound {
                        break;
                    }
                    table[i] = 0;
                    i += 1;
                }
            }
        }
        IndexSet::Nat => {
            for p in 1..=max_period {
                let mut pattern = vec![0usize; p];
                loop {
                    let elem = UpElement::new(bound, UpFamily::periodic(vec![], pattern.clone()));
                    if !out.contains(&elem) {
                        out.push(elem);
                    }
                    let mut i = 0;
                    loop {
                        if i == p {
                            break;
                        }
                        pattern[i] += 1;
                        if pattern[i] < bound {
                            break;
                        }
                        pattern[i] = 0;
                        i += 1;
                    }
                    if pattern.iter().all(|&v| v == 0) {
                        break;
                    }
                }
            }
            out
        }
    }
}

/// Saturation check for the enumeration bound: every representable choice
/// function with period ≤ `max_period + 1` that is valid on a large set falls
/// into exactly one representative class, and no new class appears beyond the
/// bound.
pub fn saturation_check(
    prod: &UltraproductSet,
    max_period: usize,
) -> Result<bool, ProductError> {
    let candidates = candidate_elements(
        prod.family.index(),
        prod.family.bound(),
        max_period + 1,
    );
    for x in &candidates {
        let valid = prod
            .uf
            .is_large(&x.membership_set(&prod.family))?;
        let mut matches = 0;
        for i in 0..prod.reps.len() {
            if ufam_eq(x, &prod.rep_element(i), &prod.uf)? {
                matches += 1;
            }
        }
        if valid && matches != 1 {
            return Ok(false);
        }
        if !valid && matches != 0 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A sum ultrafilter together with its carrier layout; the shared context of
/// the associator, currying, and their coherence checks.
#[derive(Debug, Clone)]
pub struct SumSystem {
    pub base: Ultrafilter,
    pub fibers: UpFamily<Ultrafilter>,
    pub shape: SumShape,
    pub total: Ultrafilter,
}

impl SumSystem {
    pub fn new(
        base: &Ultrafilter,
        fibers: &UpFamily<Ultrafilter>,
    ) -> Result<SumSystem, ProductError> {
        let shape = sum_shape(base, fibers)?;
        if matches!(shape, SumShape::Embedded { .. }) {
            return Err(ProductError::Uf(UfError::UnsupportedEncoding(
                "associator transport needs an encoded sum carrier".into(),
            )));
        }
        let total = crate::uf::uf_sum(base, fibers)?;
        Ok(SumSystem {
            base: base.clone(),
            fibers: fibers.clone(),
            shape,
            total,
        })
    }

    pub fn total_carrier(&self) -> IndexSet {
        self.shape.carrier()
    }

    /// The size of the fiber over base point `s`.
    pub fn fiber_size(&self, s: u64) -> usize {
        match self.fibers.value_at(s).carrier() {
            IndexSet::Fin(m) => m,
            IndexSet::Nat => unreachable!("encoded sums have finite fibers"),
        }
    }
}

/// An element of an iterated ultraproduct `∫_{s:μ}∫_{t:ν_s}A`, stored as a
/// family of inner value tables indexed by the base carrier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NestedElement {
    pub outer: UpFamily<Vec<usize>>,
}

impl NestedElement {
    pub fn sorted(&self) -> NestedElement {
        NestedElement {
            outer: self.outer.sorted(),
        }
    }
}

/// Restructures a flat element over the sum carrier into the iterated form,
/// by sampling the flat function with a sound periodicity bound.
pub fn associator_apply(sys: &SumSystem, x: &UpElement) -> Result<NestedElement, ProductError> {
    if x.carrier() != sys.total_carrier() {
        return Err(ProductError::CarrierMismatch {
            expected: sys.total_carrier(),
            found: x.carrier(),
        });
    }
    let outer = match &sys.shape {
        SumShape::NatStride { fiber } => {
            let m = *fiber;
            let (x_prefix, x_period) = x.periodicity();
            let prefix = x_prefix.div_ceil(m.max(1));
            let period = x_period as usize;
            let table_at = |s: u64| -> Vec<usize> {
                (0..m as u64).map(|t| x.value_at(s * m as u64 + t)).collect()
            };
            let mut pairs: Vec<(Vec<usize>, UpSet)> = Vec::new();
            for s in 0..(prefix + period) as u64 {
                let table = table_at(s);
                if pairs.iter().any(|(t, _)| *t == table) {
                    continue;
                }
                let level = UpSet::from_fn(prefix, period, |s| table_at(s) == table);
                pairs.push((table, level));
            }
            UpFamily::new(IndexSet::Nat, pairs)
        }
        SumShape::FinOffsets { offsets, total } => {
            let n = offsets.len();
            let tables: Vec<Vec<usize>> = (0..n)
                .map(|s| {
                    let lo = offsets[s] as u64;
                    let hi = if s + 1 < n {
                        offsets[s + 1] as u64
                    } else {
                        *total as u64
                    };
                    (lo..hi).map(|i| x.value_at(i)).collect()
                })
                .collect();
            UpFamily::from_table(tables)
        }
        SumShape::Embedded { .. } => unreachable!("rejected at construction"),
    };
    Ok(NestedElement {
        outer: outer.sorted(),
    })
}

/// Rebuilds the flat element from the iterated form; mutually inverse with
/// [`associator_apply`].
pub fn associator_inverse(
    sys: &SumSystem,
    bound: usize,
    nested: &NestedElement,
) -> Result<UpElement, ProductError> {
    match &sys.shape {
        SumShape::NatStride { fiber } => {
            let m = *fiber;
            let outer_prefix = nested
                .outer
                .levels()
                .iter()
                .map(|l| l.prefix_len())
                .max()
                .unwrap_or(0);
            let outer_period = nested
                .outer
                .levels()
                .iter()
                .fold(1u64, |acc, l| lcm(acc, l.period_len() as u64))
                as usize;
            let value_at = |n: u64| -> usize {
                let s = n / m as u64;
                let t = (n % m as u64) as usize;
                nested.outer.value_at(s)[t]
            };
            let mut pairs: Vec<(usize, UpSet)> = Vec::new();
            let prefix = m * outer_prefix;
            let period = m * outer_period;
            for n in 0..(prefix + period) as u64 {
                let v = value_at(n);
                if pairs.iter().any(|(w, _)| *w == v) {
                    continue;
                }
                let level = UpSet::from_fn(prefix, period, |n| value_at(n) == v);
                pairs.push((v, level));
            }
            Ok(UpElement::new(bound, UpFamily::new(IndexSet::Nat, pairs)))
        }
        SumShape::FinOffsets { offsets, total } => {
            let n = offsets.len();
            let mut table = Vec::with_capacity(*total);
            for s in 0..n as u64 {
                table.extend(nested.outer.value_at(s).iter().copied());
            }
            Ok(UpElement::new(bound, UpFamily::from_table(table)))
        }
        SumShape::Embedded { .. } => unreachable!("rejected at construction"),
    }
}

/// The currying view of the same bijection, computed by level-set algebra
/// instead of sampling: the level of an inner table `T` is
/// `∩_t {s : x(enc(s,t)) = T[t]}`.
pub fn curry_element(sys: &SumSystem, x: &UpElement) -> Result<NestedElement, ProductError> {
    if x.carrier() != sys.total_carrier() {
        return Err(ProductError::CarrierMismatch {
            expected: sys.total_carrier(),
            found: x.carrier(),
        });
    }
    match &sys.shape {
        SumShape::NatStride { fiber } => {
            let m = *fiber;
            let mut tables = vec![Vec::new()];
            for _ in 0..m {
                tables = tables
                    .into_iter()
                    .flat_map(|t: Vec<usize>| {
                        (0..x.bound()).map(move |v| {
                            let mut t2 = t.clone();
                            t2.push(v);
                            t2
                        })
                    })
                    .collect();
            }
            let mut pairs: Vec<(Vec<usize>, UpSet)> = Vec::new();
            for table in tables {
                let mut level = UpSet::full();
                for (t, &v) in table.iter().enumerate() {
                    let value_level = x.values().level_of(&v);
                    level = level.intersect(&value_level.affine_preimage(m as u64, t as u64));
                }
                if !level.is_empty() {
                    pairs.push((table, level));
                }
            }
            Ok(NestedElement {
                outer: UpFamily::new(IndexSet::Nat, pairs).sorted(),
            })
        }
        SumShape::FinOffsets { .. } => associator_apply(sys, x),
        SumShape::Embedded { .. } => unreachable!("rejected at construction"),
    }
}

/// Inverse of [`curry_element`]; rebuilds the flat function by set algebra.
pub fn uncurry_element(
    sys: &SumSystem,
    bound: usize,
    nested: &NestedElement,
) -> Result<UpElement, ProductError> {
    match &sys.shape {
        SumShape::NatStride { fiber } => {
            let m = *fiber;
            let mut pairs: Vec<(usize, UpSet)> = Vec::new();
            for (table, level) in nested.outer.pairs() {
                for (t, &v) in table.iter().enumerate() {
                    let flat = level.affine_image(m as u64, t as u64);
                    pairs.push((v, flat));
                }
            }
            Ok(UpElement::new(bound, UpFamily::new(IndexSet::Nat, pairs)))
        }
        _ => associator_inverse(sys, bound, nested),
    }
}

/// Reindexing along an ultrafilter map `f : λ → κ`: precomposition
/// `x ↦ x ∘ f` on elements.
pub fn reindex(f: &UpMap, x: &UpElement) -> Result<UpElement, ProductError> {
    if f.codomain != x.carrier() {
        return Err(ProductError::CarrierMismatch {
            expected: x.carrier(),
            found: f.codomain,
        });
    }
    let pairs: Vec<(usize, UpSet)> = x
        .values()
        .pairs()
        .map(|(v, level)| (*v, f.preimage(level)))
        .collect();
    Ok(UpElement::new(x.bound(), UpFamily::new(f.domain, pairs)))
}

/// Checks that reindexing is an arrow-indexed right action, i.e.
/// `(g ∘ f)^# = f^# ∘ g^#` pointwise on the given element.
pub fn reindex_functoriality_check(
    f: &UpMap,
    g: &UpMap,
    x: &UpElement,
) -> Result<bool, ProductError> {
    let composite = f
        .then(g)
        .map_err(|_| ProductError::CarrierMismatch {
            expected: g.domain,
            found: f.codomain,
        })?;
    let direct = reindex(&composite, x)?;
    let stepped = reindex(f, &reindex(g, x)?)?;
    Ok(direct == stepped)
}

/// The canonical comparison of `∫_s (a : A_s) × B_s(a)` with
/// `(a : ∫A) × ∫ B(a)`: ultraproducts commute with dependent products on the
/// representable fragment. `b_fam` is indexed by the pair carrier
/// `enc(s, a) = s·|A| + a` (ℕ base) or the offset layout (finite base).
pub fn dependent_product_check(
    mu: &Ultrafilter,
    a_fam: &BoundedFamily,
    b_fam: &BoundedFamily,
) -> Result<bool, ProductError> {
    let k = a_fam.bound();
    let k2 = b_fam.bound();
    let pair_set = |a: usize, b: usize| -> UpSet {
        // {s : a ∈ A_s and b ∈ B_s(a)}
        let b_avail = match mu.carrier() {
            IndexSet::Nat => b_fam.fiber_sets()[b].affine_preimage(k as u64, a as u64),
            IndexSet::Fin(n) => UpSet::finite(
                &(0..n as u64)
                    .filter(|&s| b_fam.fiber_sets()[b].contains(s * k as u64 + a as u64))
                    .collect::<Vec<_>>(),
            ),
        };
        a_fam.fiber_sets()[a].intersect(&b_avail)
    };
    // Left side: ∫ of the fiberwise dependent pairs, fibers ⊆ Fin(k·k2).
    let c_fam = BoundedFamily::new(
        mu.carrier(),
        k * k2,
        (0..k * k2).map(|i| pair_set(i / k2, i % k2)).collect(),
    );
    let lhs = uprod_enumerate(mu, &c_fam)?;
    // Right side: pairs of a class of ∫A and a class of ∫B(a).
    let a_prod = uprod_enumerate(mu, a_fam)?;
    let mut rhs: Vec<(usize, usize)> = Vec::new();
    for &a in a_prod.reps() {
        let b_slice = BoundedFamily::new(
            mu.carrier(),
            k2,
            (0..k2).map(|b| pair_set(a, b)).collect(),
        );
        // Fibers of the slice can be empty on a large set when a is only
        // available with no b above it; skip those pair classes.
        if let Ok(b_prod) = uprod_enumerate(mu, &b_slice) {
            for &b in b_prod.reps() {
                rhs.push((a, b));
            }
        }
    }
    let lhs_pairs: Vec<(usize, usize)> =
        lhs.reps().iter().map(|&i| (i / k2, i % k2)).collect();
    Ok(lhs_pairs == rhs)
}

/// Quantifier exchange on the representable fragment:
/// `∀s:μ ∀a∈A_s ψ(s,a)` agrees with `∀(a_s)∈∫A ∀s:μ ψ(s, a_s)` where the
/// choice functions range over representatives plus the sampled candidates.
pub fn quantifier_exchange_check(
    mu: &Ultrafilter,
    a_fam: &BoundedFamily,
    psi_sets: &[UpSet],
    sample_period: usize,
) -> Result<bool, ProductError> {
    assert_eq!(psi_sets.len(), a_fam.bound());
    // Left side: the set of s where every available a satisfies ψ.
    let mut all_ok = mu.carrier().full_set();
    for a in 0..a_fam.bound() {
        let fails = a_fam.fiber_sets()[a].difference(&psi_sets[a]);
        all_ok = all_ok.difference(&fails);
    }
    let lhs = mu.is_large(&all_ok)?;
    // Right side: every representable choice function satisfies ψ μ-almost
    // everywhere.
    let prod = uprod_enumerate(mu, a_fam)?;
    let mut rhs = true;
    let mut candidates: Vec<UpElement> = (0..prod.len()).map(|i| prod.rep_element(i)).collect();
    for x in candidate_elements(a_fam.index(), a_fam.bound(), sample_period) {
        if mu.is_large(&x.membership_set(a_fam))? && !candidates.contains(&x) {
            candidates.push(x);
        }
    }
    for x in &candidates {
        let mut sat = UpSet::empty();
        for (v, level) in x.values().pairs() {
            sat = sat.union(&level.intersect(&psi_sets[*v]));
        }
        // ψ is only required where the choice is a member of the fiber.
        let sat = sat.union(&mu.carrier().complement(&x.membership_set(a_fam)));
        if !mu.is_large(&sat)? {
            rhs = false;
            break;
        }
    }
    Ok(lhs == rhs)
}


impl std::fmt::Display for BoundedFamily {
    /// `bound:<k>; fiber<j>:<set>` lines.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "bound:{}", self.bound)?;
        for (j, s) in self.fiber_sets.iter().enumerate() {
            writeln!(f, "fiber{j}:{s}")?;
        }
        Ok(())
    }
}

impl BoundedFamily {
    /// Parses the `bound:`/`fiber<j>:` line format against a carrier.
    pub fn from_doc(index: IndexSet, doc: &str) -> Result<BoundedFamily, String> {
        let mut bound = None;
        let mut fibers: Vec<(usize, UpSet)> = Vec::new();
        for line in doc.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(rest) = line.strip_prefix("bound:") {
                bound = Some(rest.trim().parse::<usize>().map_err(|e| e.to_string())?);
            } else if let Some(rest) = line.strip_prefix("fiber") {
                let (j, set) = rest.split_once(':').ok_or("malformed fiber line")?;
                fibers.push((
                    j.trim().parse::<usize>().map_err(|e| e.to_string())?,
                    set.trim().parse::<UpSet>().map_err(|e| e.to_string())?,
                ));
            }
        }
        let bound = bound.ok_or("missing bound:")?;
        let mut fiber_sets = vec![UpSet::empty(); bound];
        for (j, s) in fibers {
            if j >= bound {
                return Err(format!("fiber index {j} exceeds the bound"));
            }
            fiber_sets[j] = s;
        }
        Ok(BoundedFamily::new(index, bound, fiber_sets))
    }
}

impl std::fmt::Display for UpElement {
    /// The underlying family as `value@<level>` entries.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "bound:{};", self.bound)?;
        let mut first = true;
        for (v, level) in self.values.pairs() {
            if !first {
                write!(f, ",")?;
            }
            first = false;
            write!(f, "{v}@{level}")?;
        }
        Ok(())
    }
}
