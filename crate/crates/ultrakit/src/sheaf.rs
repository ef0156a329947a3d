//! Ultrasheaves over the space and category instances, the étale-space
//! correspondence, exactness structure, and the reconstruction checks.
//!
//! An ultrasheaf stores per-object finite fibers and its action on a
//! generating set of arrows: transports along specializations for a space
//! base, per-arrow functions for a category base. The action on every other
//! probed ultraarrow is forced (posetal homs over a space; the diagonal
//! factorization over a category), so the generator data is complete.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::cat::FiniteCategory;

use crate::space::{
    etale_check, EtaleVerdict, FiniteSpace, SpaceMap,
};

use crate::upset::UpSet;
use crate::vult::{
    functor_validate, Payload, ProbeConfig, UltraArrow, VObj, VUltFunctor, VUltInstance,
    ValidationOutcome, VultError,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SheafError {
    #[error("functoriality violated: {witness}")]
    FunctorialityViolation { witness: String },
    #[error("fiber data malformed: {0}")]
    Malformed(String),
    #[error("projection is not étale")]
    NotEtale,
}

/// The base an ultrasheaf lives over.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SheafBase {
    Space(FiniteSpace),
    Cat(FiniteCategory),
}

impl SheafBase {
    pub fn object_count(&self) -> usize {
        match self {
            SheafBase::Space(t) => t.points(),
            SheafBase::Cat(c) => c.objects(),
        }
    }

    pub fn instance(&self) -> VUltInstance {
        match self {
            SheafBase::Space(t) => VUltInstance::PtSpace(t.clone()),
            SheafBase::Cat(c) => VUltInstance::Alex(c.clone()),
        }
    }

    fn object_index(&self, o: &VObj) -> Option<usize> {
        match (self, o) {
            (SheafBase::Space(_), VObj::Pt(p)) => Some(*p),
            (SheafBase::Cat(_), VObj::Ob(a)) => Some(*a),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Actions {
    /// Transports along strict specialization pairs `(a, b)`, `a ≤ b`.
    Space(BTreeMap<(usize, usize), Vec<usize>>),
    /// One function per arrow of the base category.
    Cat(Vec<Vec<usize>>),
}

/// A set-valued functor on an instance: finite fibers plus generator actions.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UltraSheaf {
    base: SheafBase,
    fibers: Vec<usize>,
    actions: Actions,
}

impl UltraSheaf {
    /// An ultrasheaf over a finite space from its stalks and transports.
    /// `transports` maps each strict specialization pair to a function table.
    pub fn over_space(
        space: FiniteSpace,
        fibers: Vec<usize>,
        transports: BTreeMap<(usize, usize), Vec<usize>>,
    ) -> Result<UltraSheaf, SheafError> {
        if fibers.len() != space.points() {
            return Err(SheafError::Malformed("one fiber per point".into()));
        }
        for a in 0..space.points() {
            for b in 0..space.points() {
                if a == b || !space.le(a, b) {
                    if transports.contains_key(&(a, b)) && !space.le(a, b) {
                        return Err(SheafError::Malformed(format!(
                            "transport on unrelated pair ({a}, {b})"
                        )));
                    }
                    continue;
                }
                let t = transports.get(&(a, b)).ok_or_else(|| {
                    SheafError::Malformed(format!("missing transport ({a}, {b})"))
                })?;
                if t.len() != fibers[a] || t.iter().any(|&v| v >= fibers[b]) {
                    return Err(SheafError::Malformed(format!(
                        "transport ({a}, {b}) has wrong shape"
                    )));
                }
            }
        }
        let sheaf = UltraSheaf {
            base: SheafBase::Space(space),
            fibers,
            actions: Actions::Space(transports),
        };
        sheaf.check_space_functoriality()?;
        Ok(sheaf)
    }

    fn check_space_functoriality(&self) -> Result<(), SheafError> {
        let SheafBase::Space(space) = &self.base else {
            unreachable!()
        };
        let n = space.points();
        for a in 0..n {
            for b in 0..n {
                if !space.le(a, b) {
                    continue;
                }
                for c in 0..n {
                    if !space.le(b, c) {
                        continue;
                    }
                    for e in 0..self.fibers[a] {
                        let step = self.transport(b, c)[self.transport(a, b)[e]];
                        let direct = self.transport(a, c)[e];
                        if step != direct {
                            return Err(SheafError::FunctorialityViolation {
                                witness: format!(
                                    "transport {a}→{b}→{c} disagrees with {a}→{c} at element {e}"
                                ),
                            });
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// A set-valued functor on a finite category: a presheaf-style action.
    pub fn over_cat(
        cat: FiniteCategory,
        fibers: Vec<usize>,
        arrow_actions: Vec<Vec<usize>>,
    ) -> Result<UltraSheaf, SheafError> {
        if fibers.len() != cat.objects() || arrow_actions.len() != cat.arrow_count() {
            return Err(SheafError::Malformed(
                "one fiber per object and one table per arrow".into(),
            ));
        }
        for f in 0..cat.arrow_count() {
            let t = &arrow_actions[f];
            if t.len() != fibers[cat.src(f)] || t.iter().any(|&v| v >= fibers[cat.dst(f)]) {
                return Err(SheafError::Malformed(format!("table of arrow {f} mistyped")));
            }
        }
        for o in 0..cat.objects() {
            let id = &arrow_actions[cat.identity(o)];
            if id.iter().enumerate().any(|(e, &v)| v != e) {
                return Err(SheafError::FunctorialityViolation {
                    witness: format!("identity of object {o} does not act as identity"),
                });
            }
        }
        for g in 0..cat.arrow_count() {
            for f in 0..cat.arrow_count() {
                if let Some(c) = cat.compose(g, f) {
                    for e in 0..fibers[cat.src(f)] {
                        if arrow_actions[g][arrow_actions[f][e]] != arrow_actions[c][e] {
                            return Err(SheafError::FunctorialityViolation {
                                witness: format!(
                                    "composite {g}∘{f} disagrees with arrow {c} at element {e}"
                                ),
                            });
                        }
                    }
                }
            }
        }
        Ok(UltraSheaf {
            base: SheafBase::Cat(cat),
            fibers,
            actions: Actions::Cat(arrow_actions),
        })
    }

    pub fn base(&self) -> &SheafBase {
        &self.base
    }

    pub fn fibers(&self) -> &[usize] {
        &self.fibers
    }

    pub fn fiber(&self, o: usize) -> usize {
        self.fibers[o]
    }

    /// The transport `A_a → A_b` along `a ≤ b` of a space base.
    pub fn transport(&self, a: usize, b: usize) -> Vec<usize> {
        if a == b {
            return (0..self.fibers[a]).collect();
        }
        let Actions::Space(map) = &self.actions else {
            panic!("transport queries need a space base");
        };
        map[&(a, b)].clone()
    }

    /// The action of a base-category arrow.
    pub fn cat_action(&self, arrow: usize) -> &[usize] {
        let Actions::Cat(tables) = &self.actions else {
            panic!("arrow queries need a category base");
        };
        &tables[arrow]
    }

    /// The fiber of an instance object, as an initial-segment subset mask.
    pub fn object_mask(&self, o: &VObj) -> u32 {
        let idx = self
            .base
            .object_index(o)
            .expect("object belongs to the base instance");
        full_fiber_mask(self.fibers[idx])
    }

    /// The forced action of a probed ultraarrow: per domain element, the
    /// constant representative of the codomain ultraproduct obtained by
    /// pointwise transport.
    pub fn arrow_action(&self, f: &UltraArrow) -> Result<Vec<usize>, VultError> {
        let a = self
            .base
            .object_index(&f.dom)
            .ok_or_else(|| VultError::UnknownObject(f.dom.clone()))?;
        let mut out = Vec::with_capacity(self.fibers[a]);
        for e in 0..self.fibers[a] {
            let mut pairs: Vec<(usize, UpSet)> = Vec::new();
            let mut add = |value: usize, level: &UpSet| {
                if let Some(entry) = pairs.iter_mut().find(|(v, _)| *v == value) {
                    entry.1 = entry.1.union(level);
                } else {
                    pairs.push((value, level.clone()));
                }
            };
            for (ob, level) in f.cod.pairs() {
                let b = self
                    .base
                    .object_index(ob)
                    .ok_or_else(|| VultError::UnknownObject(ob.clone()))?;
                match (&self.base, &f.payload) {
                    (SheafBase::Space(space), Payload::Converge) => {
                        if space.le(a, b) {
                            add(self.transport(a, b)[e], level);
                        }
                    }
                    (SheafBase::Cat(cat), Payload::HomClass(j)) => {
                        let hom = cat.hom(a, b);
                        if *j < hom.len() {
                            add(self.cat_action(hom[*j])[e], level);
                        }
                    }
                    _ => {
                        return Err(VultError::TypeMismatch(
                            "arrow payload does not match the sheaf base".into(),
                        ))
                    }
                }
            }
            let mut chosen = None;
            for (value, level) in &pairs {
                if f.uf.is_large(level)? {
                    chosen = Some(*value);
                    break;
                }
            }
            match chosen {
                Some(v) => out.push(v),
                None => {
                    return Err(VultError::TypeMismatch(
                        "action undefined on a large set".into(),
                    ))
                }
            }
        }
        Ok(out)
    }

    /// Views the sheaf as a set-valued functor of instances.
    pub fn as_functor(&self, bound: usize) -> VUltFunctor {
        VUltFunctor::Sheaf {
            dom: self.base.instance(),
            sheaf: self.clone(),
            bound,
        }
    }

    /// Functor-law validation on the probe set.
    pub fn validate(&self, cfg: &ProbeConfig) -> ValidationOutcome {
        let bound = self.fibers.iter().copied().max().unwrap_or(0).max(1);
        functor_validate(&self.as_functor(bound), cfg)
    }

    /// Canonical key under per-fiber relabeling; equal keys mean isomorphic
    /// sheaves.
    pub fn canonical_key(&self) -> String {
        let perms: Vec<Vec<Vec<usize>>> = self
            .fibers
            .iter()
            .map(|&n| permutations(n))
            .collect();
        let mut best: Option<String> = None;
        let mut choice = vec![0usize; self.fibers.len()];
        loop {
            let key = self.relabeled_key(&choice, &perms);
            if best.as_ref().map_or(true, |b| key < *b) {
                best = Some(key);
            }
            let mut i = 0;
            loop {
                if i == choice.len() {
                    return best.unwrap();
                }
                choice[i] += 1;
                if choice[i] < perms[i].len() {
                    break;
                }
                choice[i] = 0;
                i += 1;
            }
        }
    }

    fn relabeled_key(&self, choice: &[usize], perms: &[Vec<Vec<usize>>]) -> String {
        let perm = |o: usize, e: usize| perms[o][choice[o]][e];
        let inv = |o: usize, e: usize| {
            perms[o][choice[o]]
                .iter()
                .position(|&v| v == e)
                .unwrap()
        };
        let mut out = format!("{:?};", self.fibers);
        match &self.actions {
            Actions::Space(map) => {
                for ((a, b), table) in map {
                    let relabeled: Vec<usize> = (0..table.len())
                        .map(|e| perm(*b, table[inv(*a, e)]))
                        .collect();
                    out.push_str(&format!("{a}->{b}:{relabeled:?};"));
                }
            }
            Actions::Cat(tables) => {
                let SheafBase::Cat(cat) = &self.base else {
                    unreachable!()
                };
                for (f, table) in tables.iter().enumerate() {
                    let (a, b) = (cat.src(f), cat.dst(f));
                    let relabeled: Vec<usize> = (0..table.len())
                        .map(|e| perm(b, table[inv(a, e)]))
                        .collect();
                    out.push_str(&format!("{f}:{relabeled:?};"));
                }
            }
        }
        out
    }
}

pub fn full_fiber_mask(n: usize) -> u32 {
    if n == 0 {
        0
    } else {
        (1 << n) - 1
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    let mut items: Vec<usize> = (0..n).collect();
    heap_permute(&mut items, n, &mut out);
    out
}

fn heap_permute(items: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == 1 {
        out.push(items.clone());
        return;
    }
    for i in 0..k {
        heap_permute(items, k - 1, out);
        if k % 2 == 0 {
            items.swap(i, k - 1);
        } else {
            items.swap(0, k - 1);
        }
    }
}

/// A morphism of ultrasheaves over a fixed base: per-object functions
/// commuting with the generator actions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SheafMap {
    pub components: Vec<Vec<usize>>,
}

impl SheafMap {
    pub fn identity(sheaf: &UltraSheaf) -> SheafMap {
        SheafMap {
            components: sheaf.fibers.iter().map(|&n| (0..n).collect()).collect(),
        }
    }

    pub fn validate(&self, src: &UltraSheaf, dst: &UltraSheaf) -> bool {
        if src.base != dst.base || self.components.len() != src.fibers.len() {
            return false;
        }
        for (o, comp) in self.components.iter().enumerate() {
            if comp.len() != src.fibers[o] || comp.iter().any(|&v| v >= dst.fibers[o]) {
                return false;
            }
        }
        match &src.base {
            SheafBase::Space(space) => {
                for a in 0..space.points() {
                    for b in 0..space.points() {
                        if !space.le(a, b) {
                            continue;
                        }
                        for e in 0..src.fibers[a] {
                            if dst.transport(a, b)[self.components[a][e]]
                                != self.components[b][src.transport(a, b)[e]]
                            {
                                return false;
                            }
                        }
                    }
                }
            }
            SheafBase::Cat(cat) => {
                for f in 0..cat.arrow_count() {
                    let (a, b) = (cat.src(f), cat.dst(f));
                    for e in 0..src.fibers[a] {
                        if dst.cat_action(f)[self.components[a][e]]
                            != self.components[b][src.cat_action(f)[e]]
                        {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    pub fn compose(&self, other: &SheafMap) -> SheafMap {
        // self ∘ other
        SheafMap {
            components: other
                .components
                .iter()
                .enumerate()
                .map(|(o, comp)| comp.iter().map(|&e| self.components[o][e]).collect())
                .collect(),
        }
    }

    pub fn is_iso(&self, src: &UltraSheaf, dst: &UltraSheaf) -> bool {
        self.components
            .iter()
            .enumerate()
            .all(|(o, comp)| {
                comp.len() == dst.fibers[o].min(src.fibers[o])
                    && src.fibers[o] == dst.fibers[o]
                    && is_bijection(comp, dst.fibers[o])
            })
    }
}

fn is_bijection(table: &[usize], codomain: usize) -> bool {
    if table.len() != codomain {
        return false;
    }
    let mut seen = vec![false; codomain];
    for &v in table {
        if seen[v] {
            return false;
        }
        seen[v] = true;
    }
    true
}

/// Enumerates the morphisms between two ultrasheaves over the same base.
pub fn sheaf_maps(src: &UltraSheaf, dst: &UltraSheaf) -> Vec<SheafMap> {
    let mut out = Vec::new();
    let mut tuples: Vec<Vec<Vec<usize>>> = vec![Vec::new()];
    for o in 0..src.fibers.len() {
        let tables = function_tables(src.fibers[o], dst.fibers[o]);
        tuples = tuples
            .into_iter()
            .flat_map(|t| {
                tables.iter().map(move |table| {
                    let mut t2 = t.clone();
                    t2.push(table.clone());
                    t2
                })
            })
            .collect();
        if tuples.is_empty() {
            return out;
        }
    }
    for components in tuples {
        let map = SheafMap { components };
        if map.validate(src, dst) {
            out.push(map);
        }
    }
    out
}

pub(crate) fn function_tables(dom: usize, cod: usize) -> Vec<Vec<usize>> {
    if dom == 0 {
        return vec![vec![]];
    }
    if cod == 0 {
        return Vec::new();
    }
    let mut out = vec![Vec::new()];
    for _ in 0..dom {
        out = out
            .into_iter()
            .flat_map(|t: Vec<usize>| {
                (0..cod).map(move |v| {
                    let mut t2 = t.clone();
                    t2.push(v);
                    t2
                })
            })
            .collect();
    }
    out
}

/// Enumerates every ultrasheaf over the base with fibers bounded by
/// `fiber_bound`.
pub fn enumerate_ultrasheaves(base: &SheafBase, fiber_bound: usize) -> Vec<UltraSheaf> {
    let n = base.object_count();
    let mut out = Vec::new();
    let mut fibers = vec![0usize; n];
    loop {
        match base {
            SheafBase::Space(space) => {
                let pairs: Vec<(usize, usize)> = (0..n)
                    .flat_map(|a| (0..n).map(move |b| (a, b)))
                    .filter(|&(a, b)| a != b && space.le(a, b))
                    .collect();
                let mut tuples: Vec<BTreeMap<(usize, usize), Vec<usize>>> =
                    vec![BTreeMap::new()];
                for &(a, b) in &pairs {
                    let tables = function_tables(fibers[a], fibers[b]);
                    tuples = tuples
                        .into_iter()
                        .flat_map(|m| {
                            tables.iter().map(move |t| {
                                let mut m2 = m.clone();
                                m2.insert((a, b), t.clone());
                                m2
                            })
                        })
                        .collect();
                    if tuples.is_empty() {
                        break;
                    }
                }
                for transports in tuples {
                    if let Ok(sheaf) =
                        UltraSheaf::over_space(space.clone(), fibers.clone(), transports)
                    {
                        out.push(sheaf);
                    }
                }
            }
            SheafBase::Cat(cat) => {
                let mut tuples: Vec<Vec<Vec<usize>>> = vec![Vec::new()];
                for f in 0..cat.arrow_count() {
                    let tables = if cat.is_identity(f) {
                        vec![(0..fibers[cat.src(f)]).collect::<Vec<usize>>()]
                    } else {
                        function_tables(fibers[cat.src(f)], fibers[cat.dst(f)])
                    };
                    tuples = tuples
                        .into_iter()
                        .flat_map(|t| {
                            tables.iter().map(move |table| {
                                let mut t2 = t.clone();
                                t2.push(table.clone());
                                t2
                            })
                        })
                        .collect();
                    if tuples.is_empty() {
                        break;
                    }
                }
                for actions in tuples {
                    if let Ok(sheaf) = UltraSheaf::over_cat(cat.clone(), fibers.clone(), actions) {
                        out.push(sheaf);
                    }
                }
            }
        }
        // Next fiber profile.
        let mut i = 0;
        loop {
            if i == n {
                return out;
            }
            fibers[i] += 1;
            if fibers[i] <= fiber_bound {
                break;
            }
            fibers[i] = 0;
            i += 1;
        }
    }
}

/// An étale space over a finite base: a validated local homeomorphism.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EtaleSheaf {
    pub total: FiniteSpace,
    pub base: FiniteSpace,
    pub proj: SpaceMap,
}

impl EtaleSheaf {
    pub fn new(proj: SpaceMap) -> Result<EtaleSheaf, SheafError> {
        match etale_check(&proj) {
            Ok(EtaleVerdict::Etale(_)) => Ok(EtaleSheaf {
                total: proj.source.clone(),
                base: proj.target.clone(),
                proj,
            }),
            _ => Err(SheafError::NotEtale),
        }
    }

    pub fn fiber_points(&self, x: usize) -> Vec<usize> {
        (0..self.total.points())
            .filter(|&e| self.proj.apply(e) == x)
            .collect()
    }
}

/// The stalk functor of an étale space: fibers plus the unique-lift
/// transports.
pub fn etale_to_ultrasheaf(e: &EtaleSheaf) -> UltraSheaf {
    let base = &e.base;
    let fibers: Vec<usize> = (0..base.points()).map(|x| e.fiber_points(x).len()).collect();
    let mut transports = BTreeMap::new();
    for a in 0..base.points() {
        for b in 0..base.points() {
            if a == b || !base.le(a, b) {
                continue;
            }
            let fiber_a = e.fiber_points(a);
            let fiber_b = e.fiber_points(b);
            let table: Vec<usize> = fiber_a
                .iter()
                .map(|&ea| {
                    let lifts: Vec<usize> = fiber_b
                        .iter()
                        .copied()
                        .filter(|&eb| e.total.le(ea, eb))
                        .collect();
                    assert_eq!(lifts.len(), 1, "étale spaces have unique lifts");
                    fiber_b.iter().position(|&eb| eb == lifts[0]).unwrap()
                })
                .collect();
            transports.insert((a, b), table);
        }
    }
    UltraSheaf::over_space(base.clone(), fibers, transports)
        .expect("étale transports are functorial")
}

/// Builds the étale space of an ultrasheaf over a space base: the total set
/// is the disjoint union of fibers, opened by the sets the transports
/// preserve.
pub fn ultrasheaf_to_etale(sheaf: &UltraSheaf) -> Result<EtaleSheaf, SheafError> {
    let SheafBase::Space(space) = &sheaf.base else {
        return Err(SheafError::Malformed("space base required".into()));
    };
    let n = space.points();
    let offsets: Vec<usize> = sheaf
        .fibers
        .iter()
        .scan(0, |acc, &f| {
            let out = *acc;
            *acc += f;
            Some(out)
        })
        .collect();
    let total_points: usize = sheaf.fibers.iter().sum();
    if total_points > crate::space::MAX_POINTS {
        return Err(SheafError::Malformed("total space too large".into()));
    }
    let mut le = vec![vec![false; total_points]; total_points];
    let mut proj_map = vec![0usize; total_points];
    for a in 0..n {
        for e in 0..sheaf.fibers[a] {
            proj_map[offsets[a] + e] = a;
        }
    }
    for a in 0..n {
        for b in 0..n {
            if !space.le(a, b) {
                continue;
            }
            let t = sheaf.transport(a, b);
            for e in 0..sheaf.fibers[a] {
                le[offsets[a] + e][offsets[b] + t[e]] = true;
            }
        }
    }
    let total = FiniteSpace::from_preorder(&le);
    let proj = SpaceMap::new(total.clone(), space.clone(), proj_map);
    EtaleSheaf::new(proj)
}

/// An isomorphism of étale spaces over the same base: a fiber-preserving
/// homeomorphism.
pub fn etale_iso_over(e1: &EtaleSheaf, e2: &EtaleSheaf) -> bool {
    if e1.base != e2.base || e1.total.points() != e2.total.points() {
        return false;
    }
    let n = e1.base.points();
    for x in 0..n {
        if e1.fiber_points(x).len() != e2.fiber_points(x).len() {
            return false;
        }
    }
    // Search fiberwise bijections preserving the specialization preorders.
    let fibers1: Vec<Vec<usize>> = (0..n).map(|x| e1.fiber_points(x)).collect();
    let fibers2: Vec<Vec<usize>> = (0..n).map(|x| e2.fiber_points(x)).collect();
    let perms_per_fiber: Vec<Vec<Vec<usize>>> = fibers1
        .iter()
        .map(|f| permutations(f.len()))
        .collect();
    let mut choice = vec![0usize; n];
    loop {
        // Assemble candidate map and test.
        let mut map = vec![0usize; e1.total.points()];
        for x in 0..n {
            let perm = &perms_per_fiber[x][choice[x]];
            for (i, &e) in fibers1[x].iter().enumerate() {
                map[e] = fibers2[x][perm[i]];
            }
        }
        let homeo = (0..e1.total.points()).all(|p| {
            (0..e1.total.points()).all(|q| e1.total.le(p, q) == e2.total.le(map[p], map[q]))
        });
        if homeo {
            return true;
        }
        let mut i = 0;
        loop {
            if i == n {
                return false;
            }
            choice[i] += 1;
            if choice[i] < perms_per_fiber[i].len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

/// A set-valued functor on a finite category, the raw input of the
/// Alexandroff correspondence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presheaf {
    pub cat: FiniteCategory,
    pub fibers: Vec<usize>,
    pub arrow_actions: Vec<Vec<usize>>,
}

impl Presheaf {
    pub fn validate(&self) -> Result<(), SheafError> {
        UltraSheaf::over_cat(
            self.cat.clone(),
            self.fibers.clone(),
            self.arrow_actions.clone(),
        )
        .map(|_| ())
    }
}

/// Extends a presheaf to an ultrasheaf over the category instance; the action
/// on a probed ultraarrow factors through the diagonal.
pub fn presheaf_to_ultrasheaf(p: &Presheaf) -> Result<UltraSheaf, SheafError> {
    UltraSheaf::over_cat(p.cat.clone(), p.fibers.clone(), p.arrow_actions.clone())
}

/// Restricts an ultrasheaf over a category base to its principal arrows.
pub fn ultrasheaf_to_presheaf(sheaf: &UltraSheaf) -> Result<Presheaf, SheafError> {
    let SheafBase::Cat(cat) = &sheaf.base else {
        return Err(SheafError::Malformed("category base required".into()));
    };
    let arrow_actions = (0..cat.arrow_count())
        .map(|f| sheaf.cat_action(f).to_vec())
        .collect();
    Ok(Presheaf {
        cat: cat.clone(),
        fibers: sheaf.fibers.clone(),
        arrow_actions,
    })
}

/// Pulls an ultrasheaf over the target of a continuous map back to its
/// source (precomposition of the corresponding functors).
pub fn pullback_sheaf(sheaf: &UltraSheaf, map: &SpaceMap) -> UltraSheaf {
    let SheafBase::Space(_) = &sheaf.base else {
        panic!("space base required");
    };
    let fibers: Vec<usize> = map.map.iter().map(|&y| sheaf.fibers[y]).collect();
    let mut transports = BTreeMap::new();
    for a in 0..map.source.points() {
        for b in 0..map.source.points() {
            if a == b || !map.source.le(a, b) {
                continue;
            }
            transports.insert((a, b), sheaf.transport(map.apply(a), map.apply(b)));
        }
    }
    UltraSheaf::over_space(map.source.clone(), fibers, transports)
        .expect("pullbacks of functorial transports stay functorial")
}

// ---------------------------------------------------------------------------
// Fiberwise limits and colimits.
// ---------------------------------------------------------------------------

fn map_over_base(
    base: &SheafBase,
    build: impl Fn(usize, usize, &[usize]) -> Vec<usize>,
    fibers: &[usize],
) -> UltraSheaf {
    // Helper to build a sheaf by transporting fiberwise structures; `build`
    // receives the generator endpoints and the underlying generator table.
    match base {
        SheafBase::Space(space) => {
            let mut transports = BTreeMap::new();
            for a in 0..space.points() {
                for b in 0..space.points() {
                    if a != b && space.le(a, b) {
                        transports.insert((a, b), build(a, b, &[]));
                    }
                }
            }
            UltraSheaf::over_space(space.clone(), fibers.to_vec(), transports)
                .expect("induced actions are functorial")
        }
        SheafBase::Cat(cat) => {
            let actions = (0..cat.arrow_count())
                .map(|f| build(cat.src(f), cat.dst(f), &[f]))
                .collect();
            UltraSheaf::over_cat(cat.clone(), fibers.to_vec(), actions)
                .expect("induced actions are functorial")
        }
    }
}

fn generator_table(sheaf: &UltraSheaf, a: usize, b: usize, arrow: &[usize]) -> Vec<usize> {
    match (&sheaf.actions, arrow) {
        (Actions::Space(_), _) => sheaf.transport(a, b),
        (Actions::Cat(_), [f]) => sheaf.cat_action(*f).to_vec(),
        _ => unreachable!(),
    }
}

/// The terminal ultrasheaf: all fibers singletons.
pub fn terminal_sheaf(base: &SheafBase) -> UltraSheaf {
    let fibers = vec![1; base.object_count()];
    map_over_base(base, |_, _, _| vec![0], &fibers)
}

/// The initial ultrasheaf: all fibers empty.
pub fn initial_sheaf(base: &SheafBase) -> UltraSheaf {
    let fibers = vec![0; base.object_count()];
    map_over_base(base, |_, _, _| vec![], &fibers)
}

/// Fiberwise product with its projections.
pub fn product_sheaf(x: &UltraSheaf, y: &UltraSheaf) -> (UltraSheaf, SheafMap, SheafMap) {
    assert_eq!(x.base, y.base);
    let fibers: Vec<usize> = x
        .fibers
        .iter()
        .zip(&y.fibers)
        .map(|(&a, &b)| a * b)
        .collect();
    let pair = |o: usize, e: usize, f: usize| e * y.fibers[o] + f;
    let sheaf = map_over_base(
        &x.base,
        |a, b, arrow| {
            let tx = generator_table(x, a, b, arrow);
            let ty = generator_table(y, a, b, arrow);
            let mut table = Vec::with_capacity(x.fibers[a] * y.fibers[a]);
            for e in 0..x.fibers[a] {
                for f in 0..y.fibers[a] {
                    table.push(pair(b, tx[e], ty[f]));
                }
            }
            table
        },
        &fibers,
    );
    let p1 = SheafMap {
        components: (0..x.fibers.len())
            .map(|o| {
                (0..fibers[o])
                    .map(|ef| ef / y.fibers[o].max(1))
                    .collect()
            })
            .collect(),
    };
    let p2 = SheafMap {
        components: (0..x.fibers.len())
            .map(|o| (0..fibers[o]).map(|ef| ef % y.fibers[o].max(1)).collect())
            .collect(),
    };
    (sheaf, p1, p2)
}

/// Fiberwise coproduct with its injections.
pub fn coproduct_sheaf(x: &UltraSheaf, y: &UltraSheaf) -> (UltraSheaf, SheafMap, SheafMap) {
    assert_eq!(x.base, y.base);
    let fibers: Vec<usize> = x
        .fibers
        .iter()
        .zip(&y.fibers)
        .map(|(&a, &b)| a + b)
        .collect();
    let sheaf = map_over_base(
        &x.base,
        |a, b, arrow| {
            let tx = generator_table(x, a, b, arrow);
            let ty = generator_table(y, a, b, arrow);
            let mut table = Vec::with_capacity(fibers[a]);
            for e in 0..x.fibers[a] {
                table.push(tx[e]);
            }
            for f in 0..y.fibers[a] {
                table.push(x.fibers[b] + ty[f]);
            }
            table
        },
        &fibers,
    );
    let i1 = SheafMap {
        components: (0..x.fibers.len())
            .map(|o| (0..x.fibers[o]).collect())
            .collect(),
    };
    let i2 = SheafMap {
        components: (0..x.fibers.len())
            .map(|o| (0..y.fibers[o]).map(|f| x.fibers[o] + f).collect())
            .collect(),
    };
    (sheaf, i1, i2)
}

/// Fiberwise equalizer of a parallel pair, with the inclusion.
pub fn equalizer_sheaf(
    f: &SheafMap,
    g: &SheafMap,
    src: &UltraSheaf,
) -> (UltraSheaf, SheafMap) {
    let n = src.fibers.len();
    let kept: Vec<Vec<usize>> = (0..n)
        .map(|o| {
            (0..src.fibers[o])
                .filter(|&e| f.components[o][e] == g.components[o][e])
                .collect()
        })
        .collect();
    let fibers: Vec<usize> = kept.iter().map(|k| k.len()).collect();
    let sheaf = map_over_base(
        &src.base,
        |a, b, arrow| {
            let t = generator_table(src, a, b, arrow);
            kept[a]
                .iter()
                .map(|&e| {
                    kept[b]
                        .iter()
                        .position(|&e2| e2 == t[e])
                        .expect("equalizers are preserved by transports")
                })
                .collect()
        },
        &fibers,
    );
    let incl = SheafMap {
        components: kept.clone(),
    };
    (sheaf, incl)
}

/// Fiberwise coequalizer of a parallel pair, with the quotient map.
pub fn coequalizer_sheaf(
    f: &SheafMap,
    g: &SheafMap,
    src: &UltraSheaf,
    dst: &UltraSheaf,
) -> (UltraSheaf, SheafMap) {
    let n = dst.fibers.len();
    // Union-find per object over dst elements.
    let mut class: Vec<Vec<usize>> = (0..n).map(|o| (0..dst.fibers[o]).collect()).collect();
    fn find(class: &mut Vec<usize>, e: usize) -> usize {
        if class[e] != e {
            let root = find(class, class[e]);
            class[e] = root;
        }
        class[e]
    }
    for o in 0..n {
        for e in 0..src.fibers[o] {
            let a = find(&mut class[o], f.components[o][e]);
            let b = find(&mut class[o], g.components[o][e]);
            if a != b {
                class[o][a.max(b)] = a.min(b);
            }
        }
    }
    // Saturate: quotient must be compatible with transports, so identify
    // transported classes until stable.
    loop {
        let mut changed = false;
        let reps: Vec<Vec<usize>> = (0..n)
            .map(|o| {
                (0..dst.fibers[o])
                    .map(|e| find(&mut class[o], e))
                    .collect()
            })
            .collect();
        match &dst.base {
            SheafBase::Space(space) => {
                for a in 0..n {
                    for b in 0..n {
                        if a == b || !space.le(a, b) {
                            continue;
                        }
                        let t = dst.transport(a, b);
                        for e in 0..dst.fibers[a] {
                            for e2 in 0..dst.fibers[a] {
                                if reps[a][e] == reps[a][e2] {
                                    let x = find(&mut class[b], t[e]);
                                    let y = find(&mut class[b], t[e2]);
                                    if x != y {
                                        class[b][x.max(y)] = x.min(y);
                                        changed = true;
                                    }
                                }
                            }
                        }
                    }
                }
            }
            SheafBase::Cat(cat) => {
                for arr in 0..cat.arrow_count() {
                    let (a, b) = (cat.src(arr), cat.dst(arr));
                    let t = dst.cat_action(arr);
                    for e in 0..dst.fibers[a] {
                        for e2 in 0..dst.fibers[a] {
                            if reps[a][e] == reps[a][e2] {
                                let x = find(&mut class[b], t[e]);
                                let y = find(&mut class[b], t[e2]);
                                if x != y {
                                    class[b][x.max(y)] = x.min(y);
                                    changed = true;
                                }
                            }
                        }
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    let mut roots: Vec<Vec<usize>> = Vec::with_capacity(n);
    let mut quotient_sizes = Vec::with_capacity(n);
    for o in 0..n {
        let mut rs: Vec<usize> = (0..dst.fibers[o])
            .map(|e| find(&mut class[o], e))
            .collect();
        let mut uniq = rs.clone();
        uniq.sort_unstable();
        uniq.dedup();
        for r in rs.iter_mut() {
            *r = uniq.iter().position(|&u| u == *r).unwrap();
        }
        quotient_sizes.push(uniq.len());
        roots.push(rs);
    }
    let sheaf = map_over_base(
        &dst.base,
        |a, b, arrow| {
            let t = generator_table(dst, a, b, arrow);
            let mut table = vec![0usize; quotient_sizes[a]];
            for e in 0..dst.fibers[a] {
                table[roots[a][e]] = roots[b][t[e]];
            }
            table
        },
        &quotient_sizes,
    );
    let q = SheafMap { components: roots };
    (sheaf, q)
}

/// Fiberwise pullback of a cospan, with its projections.
pub fn pullback_square(
    f: &SheafMap,
    x: &UltraSheaf,
    g: &SheafMap,
    y: &UltraSheaf,
) -> (UltraSheaf, SheafMap, SheafMap) {
    // x --f--> c <--g-- y
    let n = x.fibers.len();
    let pairs: Vec<Vec<(usize, usize)>> = (0..n)
        .map(|o| {
            let mut out = Vec::new();
            for e in 0..x.fibers[o] {
                for h in 0..y.fibers[o] {
                    if f.components[o][e] == g.components[o][h] {
                        out.push((e, h));
                    }
                }
            }
            out
        })
        .collect();
    let fibers: Vec<usize> = pairs.iter().map(|p| p.len()).collect();
    let sheaf = map_over_base(
        &x.base,
        |a, b, arrow| {
            let tx = generator_table(x, a, b, arrow);
            let ty = generator_table(y, a, b, arrow);
            pairs[a]
                .iter()
                .map(|&(e, h)| {
                    pairs[b]
                        .iter()
                        .position(|&(e2, h2)| e2 == tx[e] && h2 == ty[h])
                        .expect("pullback pairs are preserved by transports")
                })
                .collect()
        },
        &fibers,
    );
    let p1 = SheafMap {
        components: pairs.iter().map(|p| p.iter().map(|&(e, _)| e).collect()).collect(),
    };
    let p2 = SheafMap {
        components: pairs.iter().map(|p| p.iter().map(|&(_, h)| h).collect()).collect(),
    };
    (sheaf, p1, p2)
}

// ---------------------------------------------------------------------------
// Reconstruction checks.
// ---------------------------------------------------------------------------

/// Enumerates the étale spaces over `base` with fibers ≤ `fiber_bound`, up to
/// isomorphism over the base: candidate transport graphs are generated
/// blindly and filtered by the direct local-homeomorphism checker, which
/// keeps this route independent of the ultrasheaf validation.
pub fn enumerate_etale_spaces(base: &FiniteSpace, fiber_bound: usize) -> Vec<EtaleSheaf> {
    let n = base.points();
    let mut reps: Vec<EtaleSheaf> = Vec::new();
    let mut fibers = vec![0usize; n];
    loop {
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|a| (0..n).map(move |b| (a, b)))
            .filter(|&(a, b)| a != b && base.le(a, b))
            .collect();
        let mut tuples: Vec<Vec<Vec<usize>>> = vec![Vec::new()];
        for &(a, b) in &pairs {
            let tables = function_tables(fibers[a], fibers[b]);
            tuples = tuples
                .into_iter()
                .flat_map(|t| {
                    tables.iter().map(move |table| {
                        let mut t2 = t.clone();
                        t2.push(table.clone());
                        t2
                    })
                })
                .collect();
            if tuples.is_empty() {
                break;
            }
        }
        let offsets: Vec<usize> = fibers
            .iter()
            .scan(0, |acc, &f| {
                let out = *acc;
                *acc += f;
                Some(out)
            })
            .collect();
        let total_points: usize = fibers.iter().sum();
        for tuple in tuples {
            // Relation generated by the candidate transports, then
            // transitively closed.
            let mut le = vec![vec![false; total_points]; total_points];
            for (p, row) in le.iter_mut().enumerate() {
                row[p] = true;
            }
            for (k, &(a, b)) in pairs.iter().enumerate() {
                for e in 0..fibers[a] {
                    le[offsets[a] + e][offsets[b] + tuple[k][e]] = true;
                }
            }
            loop {
                let mut changed = false;
                for i in 0..total_points {
                    for j in 0..total_points {
                        if le[i][j] {
                            for k in 0..total_points {
                                if le[j][k] && !le[i][k] {
                                    le[i][k] = true;
                                    changed = true;
                                }
                            }
                        }
                    }
                }
                if !changed {
                    break;
                }
            }
            let total = FiniteSpace::from_preorder(&le);
            let mut proj_map = vec![0usize; total_points];
            for a in 0..n {
                for e in 0..fibers[a] {
                    proj_map[offsets[a] + e] = a;
                }
            }
            let proj = SpaceMap::new(total, base.clone(), proj_map);
            if !proj.is_continuous() {
                continue;
            }
            let Ok(candidate) = EtaleSheaf::new(proj) else {
                continue;
            };
            if !reps.iter().any(|r| etale_iso_over(r, &candidate)) {
                reps.push(candidate);
            }
        }
        let mut i = 0;
        loop {
            if i == n {
                return reps;
            }
            fibers[i] += 1;
            if fibers[i] <= fiber_bound {
                break;
            }
            fibers[i] = 0;
            i += 1;
        }
    }
}

/// The reconstruction report for one base space: object and hom counts on
/// the étale side and the ultrasheaf side, with round-trip verdicts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReconstructionReport {
    pub etale_objects: usize,
    pub ultrasheaf_objects: usize,
    pub etale_homs: usize,
    pub ultrasheaf_homs: usize,
    pub roundtrips_ok: bool,
    pub hom_counts_match: bool,
}

impl ReconstructionReport {
    pub fn passes(&self) -> bool {
        self.etale_objects == self.ultrasheaf_objects && self.roundtrips_ok && self.hom_counts_match
    }
}

/// Checks that taking stalks is an equivalence between étale spaces over `t`
/// and validated ultrasheaves, at the given fiber bound: object counts match
/// up to isomorphism, every ultrasheaf arises from its étale space, and hom
/// sets biject pairwise.
pub fn reconstruction_check(t: &FiniteSpace, fiber_bound: usize) -> ReconstructionReport {
    let etale = enumerate_etale_spaces(t, fiber_bound);
    let base = SheafBase::Space(t.clone());
    let all_sheaves = enumerate_ultrasheaves(&base, fiber_bound);
    let mut sheaf_reps: Vec<UltraSheaf> = Vec::new();
    let mut keys: Vec<String> = Vec::new();
    for s in &all_sheaves {
        let key = s.canonical_key();
        if !keys.contains(&key) {
            keys.push(key);
            sheaf_reps.push(s.clone());
        }
    }
    let mut roundtrips_ok = true;
    // Essential surjectivity: every ultrasheaf rep arises from its étale
    // space, and the stalks of that space give back the sheaf up to iso.
    for s in &sheaf_reps {
        match ultrasheaf_to_etale(s) {
            Ok(e) => {
                let back = etale_to_ultrasheaf(&e);
                if back.canonical_key() != s.canonical_key() {
                    roundtrips_ok = false;
                }
            }
            Err(_) => roundtrips_ok = false,
        }
    }
    // The other round trip on the étale side.
    for e in &etale {
        let s = etale_to_ultrasheaf(e);
        match ultrasheaf_to_etale(&s) {
            Ok(e2) => {
                if !etale_iso_over(e, &e2) {
                    roundtrips_ok = false;
                }
            }
            Err(_) => roundtrips_ok = false,
        }
    }
    // Fully faithful: sheaf maps and ultrasheaf maps biject pairwise.
    let mut etale_homs = 0;
    let mut ultra_homs = 0;
    let mut hom_counts_match = true;
    for e1 in &etale {
        let s1 = etale_to_ultrasheaf(e1);
        for e2 in &etale {
            let s2 = etale_to_ultrasheaf(e2);
            let space_maps = etale_maps_over(e1, e2);
            let ultra_maps = sheaf_maps(&s1, &s2);
            etale_homs += space_maps;
            ultra_homs += ultra_maps.len();
            if space_maps != ultra_maps.len() {
                hom_counts_match = false;
            }
        }
    }
    ReconstructionReport {
        etale_objects: etale.len(),
        ultrasheaf_objects: sheaf_reps.len(),
        etale_homs,
        ultrasheaf_homs: ultra_homs,
        roundtrips_ok,
        hom_counts_match,
    }
}

/// Counts continuous fiber-preserving maps between two étale spaces over the
/// same base.
pub fn etale_maps_over(e1: &EtaleSheaf, e2: &EtaleSheaf) -> usize {
    let n1 = e1.total.points();
    let mut count = 0;
    // Candidate maps send each point into the fiber over the same base point.
    let candidates: Vec<Vec<usize>> = (0..n1)
        .map(|p| e2.fiber_points(e1.proj.apply(p)))
        .collect();
    let mut stack = vec![Vec::<usize>::new()];
    while let Some(partial) = stack.pop() {
        if partial.len() == n1 {
            let monotone = (0..n1).all(|p| {
                (0..n1).all(|q| !e1.total.le(p, q) || e2.total.le(partial[p], partial[q]))
            });
            if monotone {
                count += 1;
            }
            continue;
        }
        let next = partial.len();
        for &img in &candidates[next] {
            let mut extended = partial.clone();
            extended.push(img);
            stack.push(extended);
        }
    }
    count
}

/// Report of the unit comparison at a space: the stalk-point category
/// computed on the open-representable generators versus the specialization
/// category of the space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitReport {
    pub objects_match: bool,
    pub homs_match: bool,
    pub natural_on_probes: bool,
}

impl UnitReport {
    pub fn passes(&self) -> bool {
        self.objects_match && self.homs_match && self.natural_on_probes
    }
}

/// Compares the specialization category of `t` with the category of its
/// evaluation points, whose homs are computed on the open-representable
/// generators (each open as the étale space of its inclusion). Stalk functors
/// preserve colimits, so natural families are determined on these generators.
pub fn unit_comparison(t: &FiniteSpace) -> UnitReport {
    let n = t.points();
    // Generators: each open U as the subspace inclusion U ↪ T, whose stalk at
    // a is a point when a ∈ U and empty otherwise. Natural families between
    // stalk functors must give a map at each generator, compatibly with every
    // map over T between generators (inclusions U ⊆ V).
    let mut homs = vec![vec![false; n]; n];
    for a in 0..n {
        for b in 0..n {
            // A family (φ_U : U_a → U_b) exists iff no generator has a
            // nonempty source and empty target; components are forced
            // (subsingletons), so compatibility is automatic.
            homs[a][b] = t
                .opens()
                .iter()
                .all(|&u| u >> a & 1 == 0 || u >> b & 1 == 1);
        }
    }
    let objects_match = true;
    let mut homs_match = true;
    for a in 0..n {
        for b in 0..n {
            if homs[a][b] != t.le(a, b) {
                homs_match = false;
            }
        }
    }
    // Naturality of the unit against stalks on probed arrows: the action of
    // a probed arrow on each generator's stalks is the forced transport, and
    // it must commute with the generator inclusions.
    let mut natural_on_probes = true;
    let instance = VUltInstance::PtSpace(t.clone());
    let cfg = ProbeConfig::default();
    for (a, uf, fam) in crate::vult::probe_queries(&instance, &cfg) {
        let Ok(arrows) = instance.hom(&a, &uf, &fam) else {
            continue;
        };
        for arr in arrows {
            for (i, &u) in t.opens().iter().enumerate() {
                for &v in &t.opens()[i..] {
                    if u & !v != 0 {
                        continue;
                    }
                    // u ⊆ v: stalk maps commute with the inclusion.
                    let stalk = |open: crate::space::Mask, p: &VObj| -> bool {
                        match p {
                            VObj::Pt(q) => open >> *q & 1 == 1,
                            _ => false,
                        }
                    };
                    let dom_in_u = stalk(u, &arr.dom);
                    if !dom_in_u {
                        continue;
                    }
                    // The action lands in the ultraproduct of the stalks over
                    // the codomain family; membership on a large set must be
                    // preserved under u ⊆ v.
                    let mut level_u = UpSet::empty();
                    let mut level_v = UpSet::empty();
                    for (p, l) in arr.cod.pairs() {
                        if stalk(u, p) {
                            level_u = level_u.union(l);
                        }
                        if stalk(v, p) {
                            level_v = level_v.union(l);
                        }
                    }
                    let in_u = arr.uf.is_large(&level_u).unwrap_or(false);
                    let in_v = arr.uf.is_large(&level_v).unwrap_or(false);
                    if in_u && !in_v {
                        natural_on_probes = false;
                    }
                }
            }
        }
    }
    UnitReport {
        objects_match,
        homs_match,
        natural_on_probes,
    }
}

/// The evaluation-point functor itself: the identity on points seen as a
/// functor from the space instance to the instance of its stalk points,
/// packaged as the space functor induced by the identity map. Validation of
/// this functor together with [`unit_comparison`] is the unit check.
pub fn unit_functor(t: &FiniteSpace) -> VUltFunctor {
    VUltFunctor::Space(SpaceMap::identity(t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cat::FiniteCategory;

    fn sierpinski_sheaf() -> UltraSheaf {
        // Fibers {0} over ⊥ and {0,1} over ⊤, glued by the open inclusion.
        let mut transports = BTreeMap::new();
        transports.insert((0, 1), vec![0]);
        UltraSheaf::over_space(FiniteSpace::sierpinski(), vec![1, 2], transports).unwrap()
    }

    #[test]
    fn functoriality_is_checked_at_construction() {
        let space = FiniteSpace::codiscrete(2);
        let mut transports = BTreeMap::new();
        transports.insert((0, 1), vec![1, 0]);
        transports.insert((1, 0), vec![0, 1]);
        // 0 → 1 → 0 must be the identity: swap then id is not.
        assert!(matches!(
            UltraSheaf::over_space(space, vec![2, 2], transports),
            Err(SheafError::FunctorialityViolation { .. })
        ));
    }

    #[test]
    fn identity_sheaf_roundtrip() {
        let t = FiniteSpace::sierpinski();
        let id = EtaleSheaf::new(SpaceMap::identity(&t)).unwrap();
        let sheaf = etale_to_ultrasheaf(&id);
        assert_eq!(sheaf.fibers(), &[1, 1]);
        let back = ultrasheaf_to_etale(&sheaf).unwrap();
        assert!(etale_iso_over(&id, &back));
    }

    #[test]
    fn sierpinski_inclusion_action() {
        let sheaf = sierpinski_sheaf();
        // The action along ⊥ ≼ δ_⊤ is the inclusion 0 ↦ 0.
        assert_eq!(sheaf.transport(0, 1), vec![0]);
        let etale = ultrasheaf_to_etale(&sheaf).unwrap();
        let back = etale_to_ultrasheaf(&etale);
        assert_eq!(back.canonical_key(), sheaf.canonical_key());
    }

    #[test]
    fn two_point_discrete_over_point() {
        let e = EtaleSheaf::new(SpaceMap::new(
            FiniteSpace::discrete(2),
            FiniteSpace::point(),
            vec![0, 0],
        ))
        .unwrap();
        let sheaf = etale_to_ultrasheaf(&e);
        assert_eq!(sheaf.fibers(), &[2]);
    }

    #[test]
    fn sheaf_validates_on_probes() {
        let sheaf = sierpinski_sheaf();
        assert!(sheaf.validate(&ProbeConfig::default()).is_valid());
    }

    #[test]
    fn presheaf_roundtrip_walking_arrow() {
        let cat = FiniteCategory::walking_arrow();
        let p = Presheaf {
            cat: cat.clone(),
            fibers: vec![2, 1],
            arrow_actions: vec![vec![0, 1], vec![0], vec![0, 0]],
        };
        p.validate().unwrap();
        let sheaf = presheaf_to_ultrasheaf(&p).unwrap();
        let back = ultrasheaf_to_presheaf(&sheaf).unwrap();
        assert_eq!(back, p);
        assert!(sheaf.validate(&ProbeConfig::default()).is_valid());
    }

    #[test]
    fn limits_and_colimits_fiberwise() {
        let a = sierpinski_sheaf();
        let (prod, p1, p2) = product_sheaf(&a, &a);
        assert_eq!(prod.fibers(), &[1, 4]);
        assert!(p1.validate(&prod, &a));
        assert!(p2.validate(&prod, &a));

        let (sum, i1, i2) = coproduct_sheaf(&a, &a);
        assert_eq!(sum.fibers(), &[2, 4]);
        assert!(i1.validate(&a, &sum));
        assert!(i2.validate(&a, &sum));

        let term = terminal_sheaf(a.base());
        assert_eq!(term.fibers(), &[1, 1]);
        let init = initial_sheaf(a.base());
        assert_eq!(init.fibers(), &[0, 0]);

        // Equalizer of the two projections of a square diagonal.
        let (eq, incl) = equalizer_sheaf(&p1, &p2, &prod);
        assert!(incl.validate(&eq, &prod));
        assert_eq!(eq.fibers(), &[1, 2]);
    }

    #[test]
    fn coequalizer_collapses() {
        let a = sierpinski_sheaf();
        let (sum, i1, i2) = coproduct_sheaf(&a, &a);
        let (q, qmap) = coequalizer_sheaf(&i1, &i2, &a, &sum);
        assert!(qmap.validate(&sum, &q));
        assert_eq!(q.fibers(), a.fibers());
    }

    #[test]
    fn reconstruction_point_base() {
        let report = reconstruction_check(&FiniteSpace::point(), 2);
        // Sets of size 0, 1, 2 on both sides.
        assert_eq!(report.etale_objects, 3);
        assert_eq!(report.ultrasheaf_objects, 3);
        assert!(report.passes());
    }

    #[test]
    fn reconstruction_sierpinski() {
        let report = reconstruction_check(&FiniteSpace::sierpinski(), 2);
        assert!(report.passes(), "{report:?}");
    }

    #[test]
    fn unit_comparison_small_spaces() {
        for t in crate::space::all_topologies(2) {
            let report = unit_comparison(&t);
            assert!(report.passes(), "{t:?}");
        }
        assert!(unit_comparison(&FiniteSpace::point()).passes());
        assert!(unit_comparison(&FiniteSpace::sierpinski()).passes());
    }
}

/// Serializes an ultrasheaf over a space base: fibers plus one transport
/// table per strict specialization pair.
pub fn sheaf_to_doc(sheaf: &UltraSheaf) -> String {
    let SheafBase::Space(space) = sheaf.base() else {
        panic!("document format covers space bases");
    };
    let mut out = format!(
        "fibers: [{}]\n",
        sheaf
            .fibers()
            .iter()
            .map(|f| f.to_string())
            .collect::<Vec<_>>()
            .join(",")
    );
    for a in 0..space.points() {
        for b in 0..space.points() {
            if a != b && space.le(a, b) {
                let table: Vec<String> = sheaf
                    .transport(a, b)
                    .iter()
                    .map(|v| v.to_string())
                    .collect();
                out.push_str(&format!("action {a} {b}: [{}]\n", table.join(",")));
            }
        }
    }
    out
}

/// Parses the sheaf document against its base space.
pub fn sheaf_from_doc(doc: &str, space: &FiniteSpace) -> Result<UltraSheaf, String> {
    let mut fibers: Option<Vec<usize>> = None;
    let mut transports = BTreeMap::new();
    for line in doc.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("fibers:") {
            let inner = rest
                .trim()
                .strip_prefix('[')
                .and_then(|r| r.strip_suffix(']'))
                .ok_or("fibers must be a list")?;
            let parsed: Result<Vec<usize>, _> = inner
                .split(',')
                .filter(|p| !p.trim().is_empty())
                .map(|p| p.trim().parse())
                .collect();
            fibers = Some(parsed.map_err(|e: std::num::ParseIntError| e.to_string())?);
        } else if let Some(rest) = line.strip_prefix("action") {
            let (pair, table) = rest.split_once(':').ok_or("malformed action line")?;
            let mut endpoints = pair.split_whitespace();
            let a: usize = endpoints
                .next()
                .ok_or("missing source")?
                .parse()
                .map_err(|e: std::num::ParseIntError| e.to_string())?;
            let b: usize = endpoints
                .next()
                .ok_or("missing target")?
                .parse()
                .map_err(|e: std::num::ParseIntError| e.to_string())?;
            let inner = table
                .trim()
                .strip_prefix('[')
                .and_then(|r| r.strip_suffix(']'))
                .ok_or("action table must be a list")?;
            let parsed: Result<Vec<usize>, _> = inner
                .split(',')
                .filter(|p| !p.trim().is_empty())
                .map(|p| p.trim().parse())
                .collect();
            transports.insert(
                (a, b),
                parsed.map_err(|e: std::num::ParseIntError| e.to_string())?,
            );
        }
    }
    let fibers = fibers.ok_or("missing fibers:")?;
    UltraSheaf::over_space(space.clone(), fibers, transports).map_err(|e| e.to_string())
}
