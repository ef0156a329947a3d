//! Virtual ultracategory instances: objects, ultraarrows, composition,
//! points, functors, natural transformations, and strict pullbacks.
//!
//! An ultraarrow goes from one object to a family of objects indexed by an
//! ultrafilter. Hom queries return finite, explicitly enumerated sets: over a
//! non-principal ultrafilter they enumerate the representable fragment
//! (classes of choice data with ultimately periodic level sets), which is the
//! computable sub-structure the whole library works in.

use thiserror::Error;

use crate::carrier::IndexSet;
use crate::cat::{CatFunctor, FiniteCategory};
use crate::family::UpFamily;
use crate::product::{uprod_enumerate, BoundedFamily, ProductError};
use crate::sheaf::UltraSheaf;
use crate::space::{converges, FiniteSpace, PointFamily, SpaceMap};
use crate::uf::{uf_sum, SumShape, UfError, Ultrafilter};
use crate::upset::UpSet;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum VultError {
    #[error("object {0:?} does not belong to the instance")]
    UnknownObject(VObj),
    #[error("ultrafilter not supported by the decidable fragment: {0}")]
    UnsupportedUltrafilter(String),
    #[error("arrow families do not match: {0}")]
    TypeMismatch(String),
    #[error(transparent)]
    Uf(#[from] UfError),
    #[error(transparent)]
    Product(#[from] ProductError),
}

/// An object of one of the supported instances.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VObj {
    /// The unique object of the point instance.
    Unit,
    /// A subset of `Fin(bound)` in the finite-set instance.
    Set(u32),
    /// A point of a finite space.
    Pt(usize),
    /// An object of a finite category.
    Ob(usize),
    /// An object of a strict pullback: a pair with an identification of the
    /// images, stored as an arrow id of the codomain's points category.
    Triple(Box<TripleObj>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TripleObj {
    pub theta: usize,
    pub x: VObj,
    pub y: VObj,
}

/// The instance-specific witness content of an ultraarrow.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Payload {
    /// Point instance: the unique arrow.
    Unit,
    /// Finite sets: for each element of the domain subset (ascending), the
    /// constant representative value of the codomain ultraproduct.
    SetMap(Vec<usize>),
    /// Spaces: existence witness of an ultraconvergence.
    Converge,
    /// Categories: the constant representative index into the hom lists
    /// `C(a, b_s)`.
    HomClass(usize),
    /// Pullbacks: the component pair.
    Pair(Box<(UltraArrow, UltraArrow)>),
}

/// An ultraarrow `dom ⤚ (cod_s)_{s:uf}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UltraArrow {
    pub dom: VObj,
    pub uf: Ultrafilter,
    pub cod: UpFamily<VObj>,
    pub payload: Payload,
}

impl UltraArrow {
    fn sorted(mut self) -> UltraArrow {
        self.cod = self.cod.sorted();
        self
    }
}

/// A virtual ultracategory presented by one of the supported constructors.
#[derive(Debug, Clone, PartialEq)]
pub enum VUltInstance {
    /// One object, every hom a singleton.
    Point,
    /// Objects are subsets of `Fin(bound)`; homs are maps into the codomain
    /// ultraproduct.
    FinSet { bound: usize },
    /// Points of a finite space; homs witness ultraconvergence.
    PtSpace(FiniteSpace),
    /// Objects of a finite category; homs are ultraproducts of hom sets.
    Alex(FiniteCategory),
    /// Strict pullback of two functors with common codomain.
    Pullback(Box<PullbackInstance>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PullbackInstance {
    pub left: VUltFunctor,
    pub right: VUltFunctor,
    /// Points category of the common codomain, with its iso arrows.
    pub codomain_points: PointsCategory,
}

impl VUltInstance {
    pub fn objects(&self) -> Vec<VObj> {
        match self {
            VUltInstance::Point => vec![VObj::Unit],
            VUltInstance::FinSet { bound } => {
                (0u32..1 << bound).map(VObj::Set).collect()
            }
            VUltInstance::PtSpace(t) => (0..t.points()).map(VObj::Pt).collect(),
            VUltInstance::Alex(c) => (0..c.objects()).map(VObj::Ob).collect(),
            VUltInstance::Pullback(pb) => {
                let mut out = Vec::new();
                for x in pb.left.dom().objects() {
                    let fx = pb.left.apply_ob(&x);
                    for y in pb.right.dom().objects() {
                        let gy = pb.right.apply_ob(&y);
                        for (idx, arr) in pb.codomain_points.arrows.iter().enumerate() {
                            if arr.dom == fx
                                && *arr.cod.value_at(0) == gy
                                && pb.codomain_points.is_iso(idx)
                            {
                                out.push(VObj::Triple(Box::new(TripleObj {
                                    theta: idx,
                                    x: x.clone(),
                                    y: y.clone(),
                                })));
                            }
                        }
                    }
                }
                out
            }
        }
    }

    pub fn has_object(&self, o: &VObj) -> bool {
        self.objects().contains(o)
    }

    /// The identity ⋆-arrow of an object.
    pub fn identity_arrow(&self, a: &VObj) -> UltraArrow {
        let star = Ultrafilter::star();
        let cod = UpFamily::constant(IndexSet::Fin(1), a.clone());
        let payload = match (self, a) {
            (VUltInstance::Point, VObj::Unit) => Payload::Unit,
            (VUltInstance::FinSet { .. }, VObj::Set(mask)) => {
                Payload::SetMap(mask_elements(*mask))
            }
            (VUltInstance::PtSpace(_), VObj::Pt(_)) => Payload::Converge,
            (VUltInstance::Alex(c), VObj::Ob(o)) => {
                let pos = c
                    .hom(*o, *o)
                    .iter()
                    .position(|&f| f == c.identity(*o))
                    .unwrap();
                Payload::HomClass(pos)
            }
            (VUltInstance::Pullback(pb), VObj::Triple(t)) => Payload::Pair(Box::new((
                pb.left.dom().identity_arrow(&t.x),
                pb.right.dom().identity_arrow(&t.y),
            ))),
            _ => panic!("object does not belong to the instance"),
        };
        UltraArrow {
            dom: a.clone(),
            uf: star,
            cod,
            payload,
        }
        .sorted()
    }

    /// Enumerates the hom set `X(a, (cod_s)_{s:uf})`.
    pub fn hom(
        &self,
        a: &VObj,
        uf: &Ultrafilter,
        cod: &UpFamily<VObj>,
    ) -> Result<Vec<UltraArrow>, VultError> {
        if cod.index() != uf.carrier() {
            return Err(VultError::TypeMismatch(
                "codomain family must be carried by the arrow ultrafilter".into(),
            ));
        }
        let arrow = |payload| UltraArrow {
            dom: a.clone(),
            uf: uf.clone(),
            cod: cod.clone(),
            payload,
        };
        match (self, a) {
            (VUltInstance::Point, VObj::Unit) => Ok(vec![arrow(Payload::Unit).sorted()]),
            (VUltInstance::FinSet { bound }, VObj::Set(mask)) => {
                let fam = set_family(*bound, cod)?;
                // An empty codomain ultraproduct means an empty hom set from
                // nonempty domains, not an error.
                let reps = match uprod_enumerate(uf, &fam) {
                    Ok(prod) => prod.reps().to_vec(),
                    Err(ProductError::EmptyLargeFiber) => Vec::new(),
                    Err(e) => return Err(e.into()),
                };
                let elements = mask_elements(*mask);
                let mut out = Vec::new();
                let mut tables = vec![Vec::new()];
                for _ in 0..elements.len() {
                    tables = tables
                        .into_iter()
                        .flat_map(|t: Vec<usize>| {
                            reps.iter().map(move |&r| {
                                let mut t2 = t.clone();
                                t2.push(r);
                                t2
                            })
                        })
                        .collect();
                }
                for t in tables {
                    out.push(arrow(Payload::SetMap(t)).sorted());
                }
                Ok(out)
            }
            (VUltInstance::PtSpace(t), VObj::Pt(p)) => {
                let values = cod.map(|o| match o {
                    VObj::Pt(q) => *q,
                    _ => panic!("space instance expects point objects"),
                });
                let fam = PointFamily::new(uf.clone(), values);
                if converges(t, *p, &fam)? {
                    Ok(vec![arrow(Payload::Converge).sorted()])
                } else {
                    Ok(vec![])
                }
            }
            (VUltInstance::Alex(c), VObj::Ob(o)) => {
                let fam = alex_family(c, *o, cod)?;
                let reps = match uprod_enumerate(uf, &fam) {
                    Ok(prod) => prod.reps().to_vec(),
                    Err(ProductError::EmptyLargeFiber) => Vec::new(),
                    Err(e) => return Err(e.into()),
                };
                Ok(reps
                    .iter()
                    .map(|&j| arrow(Payload::HomClass(j)).sorted())
                    .collect())
            }
            (VUltInstance::Pullback(pb), VObj::Triple(t)) => {
                let xs = cod.map(|o| match o {
                    VObj::Triple(t) => t.x.clone(),
                    _ => panic!("pullback instance expects triple objects"),
                });
                let ys = cod.map(|o| match o {
                    VObj::Triple(t) => t.y.clone(),
                    _ => panic!("pullback instance expects triple objects"),
                });
                let thetas = cod.map(|o| match o {
                    VObj::Triple(t) => pb.codomain_points.arrows[t.theta].clone(),
                    _ => panic!("pullback instance expects triple objects"),
                });
                let theta = pb.codomain_points.arrows[t.theta].clone();
                let z = pb.left.cod();
                let lefts = pb.left.dom().hom(&t.x, uf, &xs)?;
                let rights = pb.right.dom().hom(&t.y, uf, &ys)?;
                let mut out = Vec::new();
                for f in &lefts {
                    let ff = pb.left.apply_arrow(f)?;
                    let rhs = z.compose(&thetas, &ff)?;
                    for g in &rights {
                        let gg = pb.right.apply_arrow(g)?;
                        let lhs = z.compose(
                            &UpFamily::constant(IndexSet::Fin(1), gg.clone()),
                            &theta,
                        )?;
                        if lhs == rhs {
                            out.push(
                                arrow(Payload::Pair(Box::new((f.clone(), g.clone())))).sorted(),
                            );
                        }
                    }
                }
                Ok(out)
            }
            _ => Err(VultError::UnknownObject(a.clone())),
        }
    }

    /// Composition `(g_s)_{s:μ} ∘ f` of type `Σ_{s:μ} ν_s`.
    pub fn compose(
        &self,
        gs: &UpFamily<UltraArrow>,
        f: &UltraArrow,
    ) -> Result<UltraArrow, VultError> {
        if gs.index() != f.uf.carrier() {
            return Err(VultError::TypeMismatch(
                "composition family must be carried by the first arrow's type".into(),
            ));
        }
        // Domains of the g's must match the codomain family on a large set.
        let doms = gs.map(|g| g.dom.clone());
        let agree = doms.agreement_set(&f.cod);
        if !f.uf.is_large(&agree)? {
            return Err(VultError::TypeMismatch(
                "family domains disagree with the codomain family".into(),
            ));
        }
        let nus = gs.map(|g| g.uf.clone());
        let shape = crate::uf::sum_shape(&f.uf, &nus)?;
        let total = uf_sum(&f.uf, &nus)?;
        let cod = flat_codomain(&shape, gs, &total)?;
        let payload = match self {
            VUltInstance::Point => Payload::Unit,
            VUltInstance::PtSpace(t) => {
                // Composite convergence is the composition axiom for the
                // space's convergence structure; it holds for every topology.
                if let VObj::Pt(p) = &f.dom {
                    let values = cod.map(|o| match o {
                        VObj::Pt(q) => *q,
                        _ => unreachable!(),
                    });
                    let fam = PointFamily::new(total.clone(), values);
                    assert!(
                        converges(t, *p, &fam)?,
                        "composite convergence must hold in a topological space"
                    );
                }
                Payload::Converge
            }
            VUltInstance::FinSet { .. } => {
                let Payload::SetMap(table) = &f.payload else {
                    return Err(VultError::TypeMismatch("expected a set map".into()));
                };
                let mut out = Vec::with_capacity(table.len());
                for &j in table {
                    out.push(compose_set_value(&f.uf, gs, j)?);
                }
                Payload::SetMap(out)
            }
            VUltInstance::Alex(c) => {
                let Payload::HomClass(_) = &f.payload else {
                    return Err(VultError::TypeMismatch("expected a hom class".into()));
                };
                Payload::HomClass(compose_hom_class(c, f, gs, &shape, &total)?)
            }
            VUltInstance::Pullback(pb) => {
                let Payload::Pair(pair) = &f.payload else {
                    return Err(VultError::TypeMismatch("expected a pair".into()));
                };
                let lefts = gs.map(|g| match &g.payload {
                    Payload::Pair(p) => p.0.clone(),
                    _ => panic!("pullback arrows carry pairs"),
                });
                let rights = gs.map(|g| match &g.payload {
                    Payload::Pair(p) => p.1.clone(),
                    _ => panic!("pullback arrows carry pairs"),
                });
                let l = pb.left.dom().compose(&lefts, &pair.0)?;
                let r = pb.right.dom().compose(&rights, &pair.1)?;
                Payload::Pair(Box::new((l, r)))
            }
        };
        Ok(UltraArrow {
            dom: f.dom.clone(),
            uf: total,
            cod,
            payload,
        }
        .sorted())
    }

    /// The category of points: same objects, hom sets are the ⋆-arrows.
    pub fn points_category(&self) -> PointsCategory {
        let objects = self.objects();
        let star = Ultrafilter::star();
        let mut arrows = Vec::new();
        let mut index: Vec<(usize, usize)> = Vec::new();
        for (i, a) in objects.iter().enumerate() {
            for (j, b) in objects.iter().enumerate() {
                let fam = UpFamily::constant(IndexSet::Fin(1), b.clone());
                for arr in self.hom(a, &star, &fam).expect("star homs are enumerable") {
                    arrows.push(arr);
                    index.push((i, j));
                }
            }
        }
        let cat_arrows: Vec<crate::cat::Arrow> = index
            .iter()
            .map(|&(i, j)| crate::cat::Arrow { src: i, dst: j })
            .collect();
        let identity: Vec<usize> = objects
            .iter()
            .map(|a| {
                let id = self.identity_arrow(a);
                arrows.iter().position(|arr| *arr == id).expect("identity arrow is a star arrow")
            })
            .collect();
        let m = arrows.len();
        let mut comp = vec![vec![None; m]; m];
        for (gi, g) in arrows.iter().enumerate() {
            for (fi, f) in arrows.iter().enumerate() {
                if index[fi].1 != index[gi].0 {
                    continue;
                }
                let composite = self
                    .compose(&UpFamily::constant(IndexSet::Fin(1), g.clone()), f)
                    .expect("star arrows compose");
                let ci = arrows
                    .iter()
                    .position(|arr| *arr == composite)
                    .expect("composite of star arrows is a star arrow");
                comp[gi][fi] = Some(ci);
            }
        }
        let cat = FiniteCategory::new(objects.len(), cat_arrows, identity, comp)
            .expect("points of an instance form a category");
        PointsCategory {
            cat,
            objects,
            arrows,
        }
    }
}

/// The points category of an instance, with dictionaries back to the
/// instance's objects and ⋆-arrows.
#[derive(Debug, Clone, PartialEq)]
pub struct PointsCategory {
    pub cat: FiniteCategory,
    pub objects: Vec<VObj>,
    pub arrows: Vec<UltraArrow>,
}

impl PointsCategory {
    pub fn is_iso(&self, arrow: usize) -> bool {
        self.cat.is_iso_arrow(arrow)
    }

    pub fn object_index(&self, o: &VObj) -> Option<usize> {
        self.objects.iter().position(|p| p == o)
    }

    pub fn arrow_index(&self, a: &UltraArrow) -> Option<usize> {
        self.arrows.iter().position(|b| b == a)
    }
}

pub fn mask_elements(mask: u32) -> Vec<usize> {
    (0..32).filter(|&i| mask >> i & 1 == 1).collect()
}

pub fn elements_mask(elements: &[usize]) -> u32 {
    elements.iter().fold(0, |m, &e| m | 1 << e)
}

/// The bounded family of a codomain family of finite sets.
fn set_family(bound: usize, cod: &UpFamily<VObj>) -> Result<BoundedFamily, VultError> {
    let fiber_sets = (0..bound)
        .map(|j| {
            let mut level = UpSet::empty();
            for (o, l) in cod.pairs() {
                let VObj::Set(mask) = o else {
                    return Err(VultError::TypeMismatch(
                        "finite-set instance expects set objects".into(),
                    ));
                };
                if mask >> j & 1 == 1 {
                    level = level.union(l);
                }
            }
            Ok(level)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(BoundedFamily::new(cod.index(), bound, fiber_sets))
}

/// The bounded family of hom-list indices for an Alexandroff codomain.
fn alex_family(
    c: &FiniteCategory,
    o: usize,
    cod: &UpFamily<VObj>,
) -> Result<BoundedFamily, VultError> {
    let bound = (0..c.objects())
        .map(|b| c.hom(o, b).len())
        .max()
        .unwrap_or(0);
    let fiber_sets = (0..bound)
        .map(|j| {
            let mut level = UpSet::empty();
            for (ob, l) in cod.pairs() {
                let VObj::Ob(b) = ob else {
                    return Err(VultError::TypeMismatch(
                        "category instance expects category objects".into(),
                    ));
                };
                if j < c.hom(o, *b).len() {
                    level = level.union(l);
                }
            }
            Ok(level)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(BoundedFamily::new(cod.index(), bound, fiber_sets))
}

/// The stride expansion `{n : n / m ∈ level}` of a base-level set.
fn stride_expand(level: &UpSet, m: usize) -> UpSet {
    let m64 = m as u64;
    UpSet::from_fn(
        level.prefix_len() * m,
        level.period_len() * m,
        |n| level.contains(n / m64),
    )
}

/// `{n : n mod m ∈ slice}` for a subset of `Fin(m)`.
fn residue_select(slice: &UpSet, m: usize) -> UpSet {
    let mut out = UpSet::empty();
    for t in slice.members_below(m as u64) {
        out = out.union(&UpSet::residue(m as u64, t));
    }
    out
}

/// Builds the flat codomain family over the encoded sum carrier.
fn flat_codomain(
    shape: &SumShape,
    gs: &UpFamily<UltraArrow>,
    total: &Ultrafilter,
) -> Result<UpFamily<VObj>, VultError> {
    match shape {
        SumShape::Embedded { point } => Ok(gs.value_at(*point).cod.clone()),
        SumShape::NatStride { fiber } => {
            let m = *fiber;
            let mut pairs: Vec<(VObj, UpSet)> = Vec::new();
            for (g, level_s) in gs.pairs() {
                let expanded = stride_expand(level_s, m);
                for (o, level_t) in g.cod.pairs() {
                    let flat = expanded.intersect(&residue_select(level_t, m));
                    pairs.push((o.clone(), flat));
                }
            }
            Ok(UpFamily::new(total.carrier(), pairs))
        }
        SumShape::FinOffsets { offsets, total: n } => {
            let mut table: Vec<VObj> = Vec::with_capacity(*n);
            for (s, &off) in offsets.iter().enumerate() {
                let g = gs.value_at(s as u64);
                let IndexSet::Fin(sz) = g.uf.carrier() else {
                    unreachable!("offset sums have finite fibers")
                };
                for t in 0..sz {
                    debug_assert_eq!(off + t, table.len());
                    table.push(g.cod.value_at(t as u64).clone());
                }
            }
            Ok(UpFamily::from_table(table))
        }
    }
}

/// Composite value of a finite-set arrow at one domain element carrying the
/// class value `j`: look `j` up through each distinct continuation and keep
/// the value taken on a large set.
fn compose_set_value(
    mu: &Ultrafilter,
    gs: &UpFamily<UltraArrow>,
    j: usize,
) -> Result<usize, VultError> {
    let mut pairs: Vec<(usize, UpSet)> = Vec::new();
    for (g, level_s) in gs.pairs() {
        let VObj::Set(mask) = &g.dom else {
            return Err(VultError::TypeMismatch("set arrows expected".into()));
        };
        if mask >> j & 1 == 0 {
            continue;
        }
        let Payload::SetMap(table) = &g.payload else {
            return Err(VultError::TypeMismatch("set arrows expected".into()));
        };
        let position = mask_elements(*mask).iter().position(|&e| e == j).unwrap();
        let value = table[position];
        if let Some(entry) = pairs.iter_mut().find(|(v, _)| *v == value) {
            entry.1 = entry.1.union(level_s);
        } else {
            pairs.push((value, level_s.clone()));
        }
    }
    for (value, level) in &pairs {
        if mu.is_large(level)? {
            return Ok(*value);
        }
    }
    Err(VultError::TypeMismatch(
        "domain element unavailable on a large set".into(),
    ))
}

/// Composite hom-class of category arrows through the composition table.
fn compose_hom_class(
    c: &FiniteCategory,
    f: &UltraArrow,
    gs: &UpFamily<UltraArrow>,
    shape: &SumShape,
    total: &Ultrafilter,
) -> Result<usize, VultError> {
    let VObj::Ob(o) = &f.dom else {
        return Err(VultError::TypeMismatch("category arrows expected".into()));
    };
    let Payload::HomClass(j) = &f.payload else {
        return Err(VultError::TypeMismatch("category arrows expected".into()));
    };
    // Index of the composite within hom(o, c_value), per (continuation level,
    // inner codomain level) piece of the flat carrier.
    let mut pairs: Vec<(usize, UpSet)> = Vec::new();
    let mut add = |value: usize, level: UpSet| {
        if let Some(entry) = pairs.iter_mut().find(|(v, _)| *v == value) {
            entry.1 = entry.1.union(&level);
        } else {
            pairs.push((value, level));
        }
    };
    for (g, level_s) in gs.pairs() {
        let VObj::Ob(b) = &g.dom else {
            return Err(VultError::TypeMismatch("category arrows expected".into()));
        };
        let hom_ob = c.hom(*o, *b);
        if *j >= hom_ob.len() {
            continue;
        }
        let first = hom_ob[*j];
        let Payload::HomClass(m_idx) = &g.payload else {
            return Err(VultError::TypeMismatch("category arrows expected".into()));
        };
        for (cv, level_t) in g.cod.pairs() {
            let VObj::Ob(cc) = cv else {
                return Err(VultError::TypeMismatch("category arrows expected".into()));
            };
            let hom_bc = c.hom(*b, *cc);
            if *m_idx >= hom_bc.len() {
                continue;
            }
            let second = hom_bc[*m_idx];
            let composite = c.compose(second, first).expect("composable by endpoints");
            let value = c
                .hom(*o, *cc)
                .iter()
                .position(|&h| h == composite)
                .expect("composite lies in the hom set");
            // Flat level of this (s, t) piece.
            let flat = match shape {
                SumShape::Embedded { point } => {
                    if level_s.contains(*point) {
                        level_t.clone()
                    } else {
                        UpSet::empty()
                    }
                }
                SumShape::NatStride { fiber } => stride_expand(level_s, *fiber)
                    .intersect(&residue_select(level_t, *fiber)),
                SumShape::FinOffsets { offsets, total: n } => {
                    let mut out = UpSet::empty();
                    for s in level_s.members_below(offsets.len() as u64) {
                        let off = offsets[s as usize] as u64;
                        let hi = if (s as usize) + 1 < offsets.len() {
                            offsets[s as usize + 1] as u64
                        } else {
                            *n as u64
                        };
                        for t in level_t.members_below(hi - off) {
                            out = out.union(&UpSet::singleton(off + t));
                        }
                    }
                    out
                }
            };
            add(value, flat);
        }
    }
    for (value, level) in &pairs {
        if total.is_large(level)? {
            return Ok(*value);
        }
    }
    Err(VultError::TypeMismatch(
        "hom class unavailable on a large set".into(),
    ))
}

/// A functor between supported instances, in one of the shapes the library
/// can evaluate.
#[derive(Debug, Clone, PartialEq)]
pub enum VUltFunctor {
    Identity(VUltInstance),
    /// Induced by a point map of finite spaces.
    Space(SpaceMap),
    /// Induced by a functor of finite categories.
    Cat {
        dom: FiniteCategory,
        cod: FiniteCategory,
        map: CatFunctor,
    },
    /// The unique functor to the point instance.
    Terminal(VUltInstance),
    /// A set-valued functor presented by an ultrasheaf over its domain.
    Sheaf {
        dom: VUltInstance,
        sheaf: UltraSheaf,
        bound: usize,
    },
}

impl VUltFunctor {
    pub fn dom(&self) -> VUltInstance {
        match self {
            VUltFunctor::Identity(x) => x.clone(),
            VUltFunctor::Space(m) => VUltInstance::PtSpace(m.source.clone()),
            VUltFunctor::Cat { dom, .. } => VUltInstance::Alex(dom.clone()),
            VUltFunctor::Terminal(x) => x.clone(),
            VUltFunctor::Sheaf { dom, .. } => dom.clone(),
        }
    }

    pub fn cod(&self) -> VUltInstance {
        match self {
            VUltFunctor::Identity(x) => x.clone(),
            VUltFunctor::Space(m) => VUltInstance::PtSpace(m.target.clone()),
            VUltFunctor::Cat { cod, .. } => VUltInstance::Alex(cod.clone()),
            VUltFunctor::Terminal(_) => VUltInstance::Point,
            VUltFunctor::Sheaf { bound, .. } => VUltInstance::FinSet { bound: *bound },
        }
    }

    pub fn apply_ob(&self, o: &VObj) -> VObj {
        match self {
            VUltFunctor::Identity(_) => o.clone(),
            VUltFunctor::Space(m) => match o {
                VObj::Pt(p) => VObj::Pt(m.apply(*p)),
                _ => panic!("space functor expects points"),
            },
            VUltFunctor::Cat { map, .. } => match o {
                VObj::Ob(a) => VObj::Ob(map.ob_map[*a]),
                _ => panic!("category functor expects objects"),
            },
            VUltFunctor::Terminal(_) => VObj::Unit,
            VUltFunctor::Sheaf { sheaf, .. } => VObj::Set(sheaf.object_mask(o)),
        }
    }

    pub fn apply_arrow(&self, f: &UltraArrow) -> Result<UltraArrow, VultError> {
        let cod = f.cod.map(|o| self.apply_ob(o));
        match self {
            VUltFunctor::Identity(_) => Ok(f.clone()),
            VUltFunctor::Space(_) => Ok(UltraArrow {
                dom: self.apply_ob(&f.dom),
                uf: f.uf.clone(),
                cod,
                payload: Payload::Converge,
            }
            .sorted()),
            VUltFunctor::Terminal(_) => Ok(UltraArrow {
                dom: VObj::Unit,
                uf: f.uf.clone(),
                cod,
                payload: Payload::Unit,
            }
            .sorted()),
            VUltFunctor::Cat { dom, cod: d, map } => {
                let VObj::Ob(o) = &f.dom else {
                    return Err(VultError::TypeMismatch("category arrows expected".into()));
                };
                let Payload::HomClass(j) = &f.payload else {
                    return Err(VultError::TypeMismatch("category arrows expected".into()));
                };
                // The image of a constant-index class has a possibly varying
                // index; take its value on a large set.
                let mut pairs: Vec<(usize, UpSet)> = Vec::new();
                for (bv, level) in f.cod.pairs() {
                    let VObj::Ob(b) = bv else {
                        return Err(VultError::TypeMismatch("category arrows expected".into()));
                    };
                    let hom_ob = dom.hom(*o, *b);
                    if *j >= hom_ob.len() {
                        continue;
                    }
                    let image = map.arrow_map[hom_ob[*j]];
                    let value = d
                        .hom(map.ob_map[*o], map.ob_map[*b])
                        .iter()
                        .position(|&h| h == image)
                        .expect("functor images land in the hom set");
                    if let Some(entry) = pairs.iter_mut().find(|(v, _)| *v == value) {
                        entry.1 = entry.1.union(level);
                    } else {
                        pairs.push((value, level.clone()));
                    }
                }
                for (value, level) in &pairs {
                    if f.uf.is_large(level)? {
                        return Ok(UltraArrow {
                            dom: self.apply_ob(&f.dom),
                            uf: f.uf.clone(),
                            cod,
                            payload: Payload::HomClass(*value),
                        }
                        .sorted());
                    }
                }
                Err(VultError::TypeMismatch(
                    "image hom class unavailable on a large set".into(),
                ))
            }
            VUltFunctor::Sheaf { sheaf, .. } => {
                let table = sheaf.arrow_action(f)?;
                Ok(UltraArrow {
                    dom: self.apply_ob(&f.dom),
                    uf: f.uf.clone(),
                    cod,
                    payload: Payload::SetMap(table),
                }
                .sorted())
            }
        }
    }
}

/// The strict 2-pullback of two functors with a common codomain.
pub fn vult_pullback(left: &VUltFunctor, right: &VUltFunctor) -> Result<VUltInstance, VultError> {
    if left.cod() != right.cod() {
        return Err(VultError::TypeMismatch(
            "pullback needs a common codomain".into(),
        ));
    }
    let codomain_points = left.cod().points_category();
    Ok(VUltInstance::Pullback(Box::new(PullbackInstance {
        left: left.clone(),
        right: right.clone(),
        codomain_points,
    })))
}

/// The named probe strategy: all principal queries plus factorial queries
/// with periodic codomain patterns.
#[derive(Debug, Clone, Copy)]
pub struct ProbeConfig {
    pub version: &'static str,
    pub period: usize,
    /// Cap on the number of factorial patterns per object (lexicographic
    /// order), keeping probe sets reproducible and bounded.
    pub max_patterns: usize,
}

impl Default for ProbeConfig {
    fn default() -> ProbeConfig {
        ProbeConfig {
            version: "probe-v1",
            period: 4,
            max_patterns: 64,
        }
    }
}

/// The probed hom queries of an instance: `(domain, ultrafilter, codomain
/// family)` triples.
pub fn probe_queries(
    instance: &VUltInstance,
    cfg: &ProbeConfig,
) -> Vec<(VObj, Ultrafilter, UpFamily<VObj>)> {
    let objects = instance.objects();
    let mut out = Vec::new();
    for a in &objects {
        for b in &objects {
            out.push((
                a.clone(),
                Ultrafilter::star(),
                UpFamily::constant(IndexSet::Fin(1), b.clone()),
            ));
        }
    }
    let factorial = Ultrafilter::factorial();
    for a in &objects {
        let mut count = 0;
        'patterns: for p in 1..=cfg.period {
            let mut pattern = vec![0usize; p];
            loop {
                let fam = UpFamily::periodic(
                    vec![],
                    pattern.iter().map(|&i| objects[i].clone()).collect(),
                );
                out.push((a.clone(), factorial.clone(), fam));
                count += 1;
                if count >= cfg.max_patterns {
                    break 'patterns;
                }
                let mut i = 0;
                loop {
                    if i == p {
                        break;
                    }
                    pattern[i] += 1;
                    if pattern[i] < objects.len() {
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
    }
    out
}

/// Outcome of a probe-set validation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValidationOutcome {
    /// Laws held on every probed query; carries the probe count and config
    /// version.
    ValidatedOnProbes { probes: usize, version: &'static str },
    Failed { witness: String },
}

impl ValidationOutcome {
    pub fn is_valid(&self) -> bool {
        matches!(self, ValidationOutcome::ValidatedOnProbes { .. })
    }
}

/// Validates functor laws on the probe set: images of arrows are arrows,
/// identities map to identities, and probed composites are preserved.
pub fn functor_validate(f: &VUltFunctor, cfg: &ProbeConfig) -> ValidationOutcome {
    let dom = f.dom();
    let cod = f.cod();
    let mut probes = 0;
    for a in dom.objects() {
        let fa = f.apply_ob(&a);
        if !cod.has_object(&fa) {
            return ValidationOutcome::Failed {
                witness: format!("image object {fa:?} missing"),
            };
        }
        let id = dom.identity_arrow(&a);
        match f.apply_arrow(&id) {
            Ok(image) => {
                if image != cod.identity_arrow(&fa) {
                    return ValidationOutcome::Failed {
                        witness: format!("identity at {a:?} not preserved"),
                    };
                }
            }
            Err(e) => {
                return ValidationOutcome::Failed {
                    witness: format!("identity at {a:?}: {e}"),
                }
            }
        }
    }
    for (a, uf, fam) in probe_queries(&dom, cfg) {
        let arrows = match dom.hom(&a, &uf, &fam) {
            Ok(arrows) => arrows,
            Err(VultError::Product(ProductError::EmptyLargeFiber)) => continue,
            Err(e) => {
                return ValidationOutcome::Failed {
                    witness: format!("hom query failed: {e}"),
                }
            }
        };
        let image_fam = fam.map(|o| f.apply_ob(o));
        for arr in &arrows {
            probes += 1;
            let image = match f.apply_arrow(arr) {
                Ok(im) => im,
                Err(e) => {
                    return ValidationOutcome::Failed {
                        witness: format!("arrow image failed: {e}"),
                    }
                }
            };
            let targets = match cod.hom(&f.apply_ob(&a), &uf, &image_fam) {
                Ok(t) => t,
                Err(e) => {
                    return ValidationOutcome::Failed {
                        witness: format!("target hom query failed: {e}"),
                    }
                }
            };
            if !targets.contains(&image) {
                return ValidationOutcome::Failed {
                    witness: format!(
                        "image of a probed arrow at {a:?} is not an arrow of the target"
                    ),
                };
            }
            // Composite preservation along star continuations.
            let conts = star_continuations(&dom, arr);
            for gs in conts {
                let lhs = match dom.compose(&gs, arr) {
                    Ok(c) => c,
                    Err(_) => continue,
                };
                let f_lhs = match f.apply_arrow(&lhs) {
                    Ok(c) => c,
                    Err(e) => {
                        return ValidationOutcome::Failed {
                            witness: format!("composite image failed: {e}"),
                        }
                    }
                };
                let f_gs_result: Result<Vec<(UltraArrow, UpSet)>, VultError> = gs
                    .pairs()
                    .map(|(g, l)| Ok((f.apply_arrow(g)?, l.clone())))
                    .collect();
                let f_gs = match f_gs_result {
                    Ok(pairs) => UpFamily::new(gs.index(), pairs),
                    Err(e) => {
                        return ValidationOutcome::Failed {
                            witness: format!("continuation image failed: {e}"),
                        }
                    }
                };
                let f_arr = f.apply_arrow(arr).unwrap();
                let rhs = match cod.compose(&f_gs, &f_arr) {
                    Ok(c) => c,
                    Err(e) => {
                        return ValidationOutcome::Failed {
                            witness: format!("target composite failed: {e}"),
                        }
                    }
                };
                if f_lhs != rhs {
                    return ValidationOutcome::Failed {
                        witness: format!("composition not preserved at {a:?}"),
                    };
                }
            }
        }
    }
    ValidationOutcome::ValidatedOnProbes {
        probes,
        version: cfg.version,
    }
}

/// One deterministic family of ⋆-continuations per arrow: the identity at
/// each codomain object.
fn star_continuations(
    instance: &VUltInstance,
    f: &UltraArrow,
) -> Vec<UpFamily<UltraArrow>> {
    let ids = f.cod.map(|b| instance.identity_arrow(b));
    vec![ids]
}

/// A natural transformation candidate: one ⋆-arrow per object of the domain.
#[derive(Debug, Clone, PartialEq)]
pub struct VUltNat {
    pub components: Vec<(VObj, UltraArrow)>,
}

impl VUltNat {
    pub fn component(&self, o: &VObj) -> Option<&UltraArrow> {
        self.components
            .iter()
            .find(|(p, _)| p == o)
            .map(|(_, a)| a)
    }
}

/// Validates naturality `G(f) ∘ α_a = (α_{b_s}) ∘ F(f)` on the probe set.
pub fn nat_validate(
    alpha: &VUltNat,
    f: &VUltFunctor,
    g: &VUltFunctor,
    cfg: &ProbeConfig,
) -> ValidationOutcome {
    if f.dom() != g.dom() || f.cod() != g.cod() {
        return ValidationOutcome::Failed {
            witness: "parallel functors required".into(),
        };
    }
    let dom = f.dom();
    let cod = f.cod();
    let mut probes = 0;
    for a in dom.objects() {
        let Some(alpha_a) = alpha.component(&a) else {
            return ValidationOutcome::Failed {
                witness: format!("missing component at {a:?}"),
            };
        };
        if alpha_a.dom != f.apply_ob(&a) || *alpha_a.cod.value_at(0) != g.apply_ob(&a) {
            return ValidationOutcome::Failed {
                witness: format!("component at {a:?} has wrong endpoints"),
            };
        }
    }
    for (a, uf, fam) in probe_queries(&dom, cfg) {
        let arrows = match dom.hom(&a, &uf, &fam) {
            Ok(arrows) => arrows,
            Err(_) => continue,
        };
        let alpha_a = alpha.component(&a).unwrap();
        for arr in &arrows {
            probes += 1;
            let gf = match g.apply_arrow(arr) {
                Ok(x) => x,
                Err(_) => continue,
            };
            let lhs = match cod.compose(
                &UpFamily::constant(IndexSet::Fin(1), gf),
                alpha_a,
            ) {
                Ok(x) => x,
                Err(_) => continue,
            };
            let ff = match f.apply_arrow(arr) {
                Ok(x) => x,
                Err(_) => continue,
            };
            let alpha_bs_result: Result<Vec<(UltraArrow, UpSet)>, VultError> = arr
                .cod
                .pairs()
                .map(|(b, l)| {
                    alpha
                        .component(b)
                        .cloned()
                        .ok_or_else(|| VultError::UnknownObject(b.clone()))
                        .map(|c| (c, l.clone()))
                })
                .collect();
            let alpha_bs = match alpha_bs_result {
                Ok(pairs) => UpFamily::new(arr.cod.index(), pairs),
                Err(_) => continue,
            };
            let rhs = match cod.compose(&alpha_bs, &ff) {
                Ok(x) => x,
                Err(_) => continue,
            };
            if lhs != rhs {
                return ValidationOutcome::Failed {
                    witness: format!("naturality fails at {a:?}"),
                };
            }
        }
    }
    ValidationOutcome::ValidatedOnProbes {
        probes,
        version: cfg.version,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cat::FiniteCategory;
    use crate::space::FiniteSpace;

    fn star_query(b: VObj) -> (Ultrafilter, UpFamily<VObj>) {
        (
            Ultrafilter::star(),
            UpFamily::constant(IndexSet::Fin(1), b),
        )
    }

    #[test]
    fn point_instance_homs_are_singletons() {
        let pt = VUltInstance::Point;
        let (uf, fam) = star_query(VObj::Unit);
        assert_eq!(pt.hom(&VObj::Unit, &uf, &fam).unwrap().len(), 1);
        let factorial_fam = UpFamily::constant(IndexSet::Nat, VObj::Unit);
        assert_eq!(
            pt.hom(&VObj::Unit, &Ultrafilter::factorial(), &factorial_fam)
                .unwrap()
                .len(),
            1
        );
    }

    #[test]
    fn finset_hom_count_collapses_to_classes() {
        // Dom {0,1} ⊆ Fin(3), codomain constantly the full Fin(3) over the
        // factorial atom: the ultraproduct has 3 constant classes, so there
        // are 3^2 arrows.
        let fs = VUltInstance::FinSet { bound: 3 };
        let fam = UpFamily::constant(IndexSet::Nat, VObj::Set(0b111));
        let arrows = fs
            .hom(&VObj::Set(0b011), &Ultrafilter::factorial(), &fam)
            .unwrap();
        assert_eq!(arrows.len(), 9);
    }

    #[test]
    fn alex_arrow_category_constant_target() {
        let alex = VUltInstance::Alex(FiniteCategory::walking_arrow());
        let fam = UpFamily::constant(IndexSet::Nat, VObj::Ob(1));
        let arrows = alex
            .hom(&VObj::Ob(0), &Ultrafilter::factorial(), &fam)
            .unwrap();
        assert_eq!(arrows.len(), 1);
    }

    #[test]
    fn ptspace_homs_are_posetal() {
        let s = VUltInstance::PtSpace(FiniteSpace::sierpinski());
        for a in s.objects() {
            for b in s.objects() {
                let (uf, fam) = star_query(b);
                assert!(s.hom(&a, &uf, &fam).unwrap().len() <= 1);
            }
        }
    }

    #[test]
    fn unit_laws_hold_syntactically() {
        let instances = vec![
            VUltInstance::Point,
            VUltInstance::FinSet { bound: 2 },
            VUltInstance::PtSpace(FiniteSpace::sierpinski()),
            VUltInstance::Alex(FiniteCategory::walking_arrow()),
        ];
        for x in instances {
            let objects = x.objects();
            for a in &objects {
                for b in &objects {
                    let (uf, fam) = star_query(b.clone());
                    for f in x.hom(a, &uf, &fam).unwrap() {
                        // (id)_⋆ ∘ f = f
                        let ids = f.cod.map(|o| x.identity_arrow(o));
                        assert_eq!(x.compose(&ids, &f).unwrap(), f);
                        // f ∘ id_a = f
                        let fam_one = UpFamily::constant(IndexSet::Fin(1), f.clone());
                        let id_a = x.identity_arrow(a);
                        assert_eq!(x.compose(&fam_one, &id_a).unwrap(), f);
                    }
                }
            }
        }
    }

    #[test]
    fn unit_laws_on_factorial_arrows() {
        let x = VUltInstance::FinSet { bound: 2 };
        let fam = UpFamily::periodic(vec![], vec![VObj::Set(0b11), VObj::Set(0b01)]);
        for f in x
            .hom(&VObj::Set(0b11), &Ultrafilter::factorial(), &fam)
            .unwrap()
        {
            let ids = f.cod.map(|o| x.identity_arrow(o));
            assert_eq!(x.compose(&ids, &f).unwrap(), f);
            let fam_one = UpFamily::constant(IndexSet::Fin(1), f.clone());
            let id = x.identity_arrow(&VObj::Set(0b11));
            assert_eq!(x.compose(&fam_one, &id).unwrap(), f);
        }
    }

    #[test]
    fn finset_associativity_on_random_triples() {
        // f: a ⤚ (b)_μ with μ factorial, then ⋆-continuations g, h; compare
        // h∘(g∘f) with (h∘g)∘f elementwise.
        let x = VUltInstance::FinSet { bound: 2 };
        let mut rng = crate::testutil::seeded_rng(41);
        let objects: Vec<u32> = vec![0b01, 0b10, 0b11];
        for _ in 0..40 {
            use rand::seq::SliceRandom;
            use rand::Rng;
            let a = VObj::Set(*objects.choose(&mut rng).unwrap());
            let pattern: Vec<VObj> = (0..rng.gen_range(1..3))
                .map(|_| VObj::Set(*objects.choose(&mut rng).unwrap()))
                .collect();
            let fam = UpFamily::periodic(vec![], pattern);
            let arrows = x.hom(&a, &Ultrafilter::factorial(), &fam).unwrap();
            let Some(f) = arrows.first() else { continue };
            let gs = f.cod.map(|b| {
                let (uf, fam_c) = star_query(b.clone());
                x.hom(b, &uf, &fam_c).unwrap().pop().unwrap()
            });
            let gf = x.compose(&gs, f).unwrap();
            let hs_flat = gf.cod.map(|c| {
                let (uf, fam_c) = star_query(c.clone());
                x.hom(c, &uf, &fam_c).unwrap().pop().unwrap()
            });
            let left = x.compose(&hs_flat, &gf).unwrap();
            // Nested route: compose the continuations fiberwise first.
            let hgs = gs.map(|g| {
                let hs = g.cod.map(|c| {
                    let (uf, fam_c) = star_query(c.clone());
                    x.hom(c, &uf, &fam_c).unwrap().pop().unwrap()
                });
                x.compose(&hs, g).unwrap()
            });
            let right = x.compose(&hgs, f).unwrap();
            assert_eq!(left, right);
        }
    }

    #[test]
    fn points_of_alex_recover_the_category() {
        for cat in [
            FiniteCategory::walking_arrow(),
            FiniteCategory::z2(),
            FiniteCategory::terminal(),
            FiniteCategory::discrete(2),
        ] {
            let points = VUltInstance::Alex(cat.clone()).points_category();
            assert!(points.cat.is_isomorphic(&cat));
        }
    }

    #[test]
    fn points_of_space_is_specialization_preorder() {
        for t in crate::space::all_topologies(2) {
            let points = VUltInstance::PtSpace(t.clone()).points_category();
            let expected = FiniteCategory::from_preorder(&t.specialization());
            assert!(points.cat.is_isomorphic(&expected));
        }
    }

    #[test]
    fn points_of_point_instance_is_terminal() {
        let points = VUltInstance::Point.points_category();
        assert!(points.cat.is_isomorphic(&FiniteCategory::terminal()));
    }

    #[test]
    fn pullback_of_identity_recovers_domain_objects() {
        let t = FiniteSpace::sierpinski();
        let id = VUltFunctor::Identity(VUltInstance::PtSpace(t.clone()));
        let pb = vult_pullback(&id, &id).unwrap();
        // Objects are triplets (θ, x, y) with θ an iso x ≅ y; for a T0 space
        // only the identities qualify, so the count matches the points.
        assert_eq!(pb.objects().len(), t.points());
    }

    #[test]
    fn kernel_pair_of_two_point_discrete_has_four_objects() {
        let two = FiniteSpace::discrete(2);
        let collapse = VUltFunctor::Space(SpaceMap::new(
            two.clone(),
            FiniteSpace::point(),
            vec![0, 0],
        ));
        let pb = vult_pullback(&collapse, &collapse).unwrap();
        assert_eq!(pb.objects().len(), 4);
    }

    #[test]
    fn pullback_over_point_is_a_product() {
        let t = FiniteSpace::discrete(2);
        let f = VUltFunctor::Terminal(VUltInstance::PtSpace(t.clone()));
        let pb = vult_pullback(&f, &f).unwrap();
        assert_eq!(pb.objects().len(), 4);
        // Hom existence in the product is componentwise convergence.
        let objects = pb.objects();
        for a in &objects {
            let (uf, fam) = star_query(a.clone());
            assert_eq!(pb.hom(a, &uf, &fam).unwrap().len(), 1);
        }
    }

    #[test]
    fn functor_validation_examples() {
        let cfg = ProbeConfig::default();
        let s = FiniteSpace::sierpinski();
        let id = VUltFunctor::Identity(VUltInstance::PtSpace(s.clone()));
        assert!(functor_validate(&id, &cfg).is_valid());

        // A continuous map induces a functor.
        let collapse = VUltFunctor::Space(SpaceMap::new(
            s.clone(),
            FiniteSpace::point(),
            vec![0, 0],
        ));
        assert!(functor_validate(&collapse, &cfg).is_valid());

        // A non-monotone point map fails with a witness query.
        let flip = VUltFunctor::Space(SpaceMap::new(s.clone(), s.clone(), vec![1, 0]));
        assert!(matches!(
            functor_validate(&flip, &cfg),
            ValidationOutcome::Failed { .. }
        ));
    }

    #[test]
    fn space_functors_biject_with_continuous_maps_at_probe_level() {
        // The point-map functors that validate are exactly the continuous
        // maps, exhaustively over spaces with ≤ 2 points.
        let cfg = ProbeConfig::default();
        for src in crate::space::all_topologies(2) {
            for tgt in crate::space::all_topologies(2) {
                for m0 in 0..2 {
                    for m1 in 0..2 {
                        let map = SpaceMap::new(src.clone(), tgt.clone(), vec![m0, m1]);
                        let continuous = map.is_continuous();
                        let functor = VUltFunctor::Space(map);
                        assert_eq!(functor_validate(&functor, &cfg).is_valid(), continuous);
                    }
                }
            }
        }
    }

    #[test]
    fn natural_transformations_are_specialization_cells() {
        let cfg = ProbeConfig::default();
        let s = FiniteSpace::sierpinski();
        let inst = VUltInstance::PtSpace(s.clone());
        let bottom = VUltFunctor::Space(SpaceMap::new(FiniteSpace::point(), s.clone(), vec![0]));
        let top = VUltFunctor::Space(SpaceMap::new(FiniteSpace::point(), s.clone(), vec![1]));
        // ⊥ ≼ δ_⊤ gives a cell bottom ⇒ top; the reverse has no component.
        let (uf, fam) = star_query(VObj::Pt(1));
        let comp = inst.hom(&VObj::Pt(0), &uf, &fam).unwrap().pop().unwrap();
        let alpha = VUltNat {
            components: vec![(VObj::Pt(0), comp)],
        };
        assert!(nat_validate(&alpha, &bottom, &top, &cfg).is_valid());
        let (uf_r, fam_r) = star_query(VObj::Pt(0));
        assert!(inst.hom(&VObj::Pt(1), &uf_r, &fam_r).unwrap().is_empty());
    }
}
