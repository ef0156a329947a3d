//! Codescent diagrams, descent cocones, groupoid kernels, equivariant
//! sheaves over finite topological groupoids, and brute-force universality
//! certification.
//!
//! Diagrams are carried by their finite-space presentation: taking points of
//! a space-level strict kernel agrees with the instance-level strict
//! pullback, so the cocone conditions can be checked object by object over
//! the kernel's points. Universality is certified per test-apex battery,
//! never claimed globally.

use thiserror::Error;

use crate::carrier::IndexSet;
use crate::cat::{Arrow, FiniteCategory};
use crate::family::UpFamily;
use crate::sheaf::{
    enumerate_ultrasheaves, pullback_sheaf, sheaf_maps, ultrasheaf_to_etale, SheafBase, SheafMap,
    UltraSheaf,
};
use crate::space::{FiniteSpace, SpaceMap};
use crate::vult::{PointsCategory, ProbeConfig, VObj, VUltFunctor, VUltInstance};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DescentError {
    #[error("structure map is not continuous: {0}")]
    NotContinuous(&'static str),
    #[error("simplicial identity violated: {0}")]
    SimplicialViolation(String),
    #[error("groupoid law violated: {0}")]
    GroupoidViolation(String),
    #[error("unsupported apex for descent enumeration")]
    UnsupportedApex,
}

/// A groupoid internal to finite spaces: object and arrow spaces with
/// validated continuous structure maps. Composition is stored in path order:
/// `compose[first][second]` is defined when `tgt(first) = src(second)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TopGroupoid {
    pub objects: FiniteSpace,
    pub arrows: FiniteSpace,
    pub src: Vec<usize>,
    pub tgt: Vec<usize>,
    pub unit: Vec<usize>,
    pub inverse: Vec<usize>,
    pub compose: Vec<Vec<Option<usize>>>,
}

impl TopGroupoid {
    pub fn validate(&self) -> Result<(), DescentError> {
        let n1 = self.arrows.points();
        let src_map = SpaceMap::new(self.arrows.clone(), self.objects.clone(), self.src.clone());
        let tgt_map = SpaceMap::new(self.arrows.clone(), self.objects.clone(), self.tgt.clone());
        let unit_map = SpaceMap::new(self.objects.clone(), self.arrows.clone(), self.unit.clone());
        let inv_map = SpaceMap::new(self.arrows.clone(), self.arrows.clone(), self.inverse.clone());
        if !src_map.is_continuous() {
            return Err(DescentError::NotContinuous("source"));
        }
        if !tgt_map.is_continuous() {
            return Err(DescentError::NotContinuous("target"));
        }
        if !unit_map.is_continuous() {
            return Err(DescentError::NotContinuous("unit"));
        }
        if !inv_map.is_continuous() {
            return Err(DescentError::NotContinuous("inverse"));
        }
        // Composition on the composable-pair subspace of the product.
        for first in 0..n1 {
            for second in 0..n1 {
                let composable = self.tgt[first] == self.src[second];
                match self.compose[first][second] {
                    Some(c) => {
                        if !composable
                            || self.src[c] != self.src[first]
                            || self.tgt[c] != self.tgt[second]
                        {
                            return Err(DescentError::GroupoidViolation(format!(
                                "composite of ({first}, {second}) mistyped"
                            )));
                        }
                    }
                    None => {
                        if composable {
                            return Err(DescentError::GroupoidViolation(format!(
                                "missing composite of ({first}, {second})"
                            )));
                        }
                    }
                }
                // Continuity of composition: monotone on composable pairs.
                if composable {
                    for f2 in 0..n1 {
                        for s2 in 0..n1 {
                            if self.tgt[f2] == self.src[s2]
                                && self.arrows.le(first, f2)
                                && self.arrows.le(second, s2)
                                && !self
                                    .arrows
                                    .le(self.compose[first][second].unwrap(), self.compose[f2][s2].unwrap())
                            {
                                return Err(DescentError::NotContinuous("composition"));
                            }
                        }
                    }
                }
            }
        }
        for x in 0..self.objects.points() {
            let u = self.unit[x];
            if self.src[u] != x || self.tgt[u] != x {
                return Err(DescentError::GroupoidViolation(format!(
                    "unit of {x} mistyped"
                )));
            }
        }
        for g in 0..n1 {
            let gi = self.inverse[g];
            if self.src[gi] != self.tgt[g] || self.tgt[gi] != self.src[g] {
                return Err(DescentError::GroupoidViolation(format!(
                    "inverse of {g} mistyped"
                )));
            }
            if self.compose[g][gi] != Some(self.unit[self.src[g]])
                || self.compose[gi][g] != Some(self.unit[self.tgt[g]])
            {
                return Err(DescentError::GroupoidViolation(format!(
                    "inverse laws fail at {g}"
                )));
            }
            if self.compose[self.unit[self.src[g]]][g] != Some(g)
                || self.compose[g][self.unit[self.tgt[g]]] != Some(g)
            {
                return Err(DescentError::GroupoidViolation(format!(
                    "unit laws fail at {g}"
                )));
            }
        }
        for a in 0..n1 {
            for b in 0..n1 {
                if self.tgt[a] != self.src[b] {
                    continue;
                }
                for c in 0..n1 {
                    if self.tgt[b] != self.src[c] {
                        continue;
                    }
                    let ab = self.compose[a][b].unwrap();
                    let bc = self.compose[b][c].unwrap();
                    if self.compose[ab][c] != self.compose[a][bc] {
                        return Err(DescentError::GroupoidViolation(format!(
                            "associativity fails at ({a}, {b}, {c})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// ℤ/2 acting on the one-point space, with the discrete arrow space.
    pub fn z2_on_point() -> TopGroupoid {
        TopGroupoid {
            objects: FiniteSpace::point(),
            arrows: FiniteSpace::discrete(2),
            src: vec![0, 0],
            tgt: vec![0, 0],
            unit: vec![0],
            inverse: vec![0, 1],
            compose: vec![
                vec![Some(0), Some(1)],
                vec![Some(1), Some(0)],
            ],
        }
    }

    /// The pair groupoid of a discrete point set: one arrow between any two
    /// points.
    pub fn pair_groupoid(n: usize) -> TopGroupoid {
        let arrow_of = |x: usize, y: usize| x * n + y;
        let m = n * n;
        let mut compose = vec![vec![None; m]; m];
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    compose[arrow_of(x, y)][arrow_of(y, z)] = Some(arrow_of(x, z));
                }
            }
        }
        TopGroupoid {
            objects: FiniteSpace::discrete(n),
            arrows: FiniteSpace::discrete(m),
            src: (0..m).map(|g| g / n).collect(),
            tgt: (0..m).map(|g| g % n).collect(),
            unit: (0..n).map(|x| arrow_of(x, x)).collect(),
            inverse: (0..m).map(|g| arrow_of(g % n, g / n)).collect(),
            compose,
        }
    }

    /// The trivial groupoid on a space: arrows are the units only.
    pub fn trivial(space: &FiniteSpace) -> TopGroupoid {
        let n = space.points();
        let compose = (0..n)
            .map(|a| (0..n).map(|b| if a == b { Some(a) } else { None }).collect())
            .collect();
        TopGroupoid {
            objects: space.clone(),
            arrows: space.clone(),
            src: (0..n).collect(),
            tgt: (0..n).collect(),
            unit: (0..n).collect(),
            inverse: (0..n).collect(),
            compose,
        }
    }
}

/// A codescent diagram carried by finite spaces: the object and arrow levels
/// with the simplicial structure maps, plus the composable pairs standing in
/// for the triple level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Codescent {
    pub x0: FiniteSpace,
    pub x1: FiniteSpace,
    pub s_map: SpaceMap,
    pub t_map: SpaceMap,
    pub unit: Vec<usize>,
    /// Composable `(first, second)` pairs of X1 points with `t(first) =
    /// s(second)`; the triple level of the diagram.
    pub pairs: Vec<(usize, usize)>,
    /// Composite X1 point per composable pair.
    pub m: Vec<usize>,
}

impl Codescent {
    pub fn x0_instance(&self) -> VUltInstance {
        VUltInstance::PtSpace(self.x0.clone())
    }

    pub fn x1_instance(&self) -> VUltInstance {
        VUltInstance::PtSpace(self.x1.clone())
    }

    pub fn s_functor(&self) -> VUltFunctor {
        VUltFunctor::Space(self.s_map.clone())
    }

    pub fn t_functor(&self) -> VUltFunctor {
        VUltFunctor::Space(self.t_map.clone())
    }

    /// Strict simplicial identities of the two-truncated shape.
    pub fn validate(&self) -> Result<(), DescentError> {
        if !self.s_map.is_continuous() {
            return Err(DescentError::NotContinuous("s"));
        }
        if !self.t_map.is_continuous() {
            return Err(DescentError::NotContinuous("t"));
        }
        let unit_map = SpaceMap::new(self.x0.clone(), self.x1.clone(), self.unit.clone());
        if !unit_map.is_continuous() {
            return Err(DescentError::NotContinuous("unit"));
        }
        for x in 0..self.x0.points() {
            let u = self.unit[x];
            if self.s_map.apply(u) != x || self.t_map.apply(u) != x {
                return Err(DescentError::SimplicialViolation(format!(
                    "unit of {x} has wrong endpoints"
                )));
            }
        }
        for (k, &(first, second)) in self.pairs.iter().enumerate() {
            if self.t_map.apply(first) != self.s_map.apply(second) {
                return Err(DescentError::SimplicialViolation(format!(
                    "pair {k} not composable"
                )));
            }
            let m = self.m[k];
            if self.s_map.apply(m) != self.s_map.apply(first)
                || self.t_map.apply(m) != self.t_map.apply(second)
            {
                return Err(DescentError::SimplicialViolation(format!(
                    "composite of pair {k} has wrong endpoints"
                )));
            }
        }
        Ok(())
    }
}

/// The strict kernel of a continuous map: X1 is the subspace of the product
/// on pairs with specialization-equivalent images, composable pairs share the
/// middle point.
pub fn kernel_codescent(pi: &SpaceMap) -> Codescent {
    let t0 = &pi.source;
    let z = &pi.target;
    let n = t0.points();
    let mut points: Vec<(usize, usize)> = Vec::new();
    for x in 0..n {
        for y in 0..n {
            if z.le(pi.apply(x), pi.apply(y)) && z.le(pi.apply(y), pi.apply(x)) {
                points.push((x, y));
            }
        }
    }
    let le: Vec<Vec<bool>> = points
        .iter()
        .map(|&(x, y)| {
            points
                .iter()
                .map(|&(x2, y2)| t0.le(x, x2) && t0.le(y, y2))
                .collect()
        })
        .collect();
    let x1 = FiniteSpace::from_preorder(&le);
    let s_map = SpaceMap::new(x1.clone(), t0.clone(), points.iter().map(|&(x, _)| x).collect());
    let t_map = SpaceMap::new(x1.clone(), t0.clone(), points.iter().map(|&(_, y)| y).collect());
    let unit = (0..n)
        .map(|x| points.iter().position(|&(a, b)| a == x && b == x).unwrap())
        .collect();
    let mut pairs = Vec::new();
    let mut m = Vec::new();
    for (i, &(x, y)) in points.iter().enumerate() {
        for (j, &(y2, w)) in points.iter().enumerate() {
            if y == y2 {
                pairs.push((i, j));
                m.push(points.iter().position(|&(a, b)| a == x && b == w).unwrap());
            }
        }
    }
    Codescent {
        x0: t0.clone(),
        x1,
        s_map,
        t_map,
        unit,
        pairs,
        m,
    }
}

/// The codescent diagram of a topological groupoid.
pub fn groupoid_codescent(g: &TopGroupoid) -> Codescent {
    let mut pairs = Vec::new();
    let mut m = Vec::new();
    for first in 0..g.arrows.points() {
        for second in 0..g.arrows.points() {
            if let Some(c) = g.compose[first][second] {
                pairs.push((first, second));
                m.push(c);
            }
        }
    }
    Codescent {
        x0: g.objects.clone(),
        x1: g.arrows.clone(),
        s_map: SpaceMap::new(g.arrows.clone(), g.objects.clone(), g.src.clone()),
        t_map: SpaceMap::new(g.arrows.clone(), g.objects.clone(), g.tgt.clone()),
        unit: g.unit.clone(),
        pairs,
        m,
    }
}

/// A descent cocone: a functor off the object level plus a gluing 2-cell,
/// stored as one apex points-category arrow per X1 point.
#[derive(Debug, Clone, PartialEq)]
pub struct DescentCocone {
    pub f: VUltFunctor,
    pub theta: Vec<usize>,
}

/// Shared context for descent computations with a fixed apex.
pub struct DescentContext {
    pub apex: VUltInstance,
    pub points: PointsCategory,
}

impl DescentContext {
    pub fn new(apex: VUltInstance) -> DescentContext {
        let points = apex.points_category();
        DescentContext { apex, points }
    }

    fn identity_index(&self, o: &VObj) -> usize {
        let obj = self
            .points
            .object_index(o)
            .expect("apex object belongs to the points category");
        self.points.cat.identity(obj)
    }

    fn hom_indices(&self, a: &VObj, b: &VObj) -> Vec<usize> {
        let ia = self.points.object_index(a).unwrap();
        let ib = self.points.object_index(b).unwrap();
        self.points.cat.hom(ia, ib)
    }
}

/// Validates a cocone: component endpoints and invertibility, the unit and
/// cocycle equations on every X1/X2 element, and 2-cell naturality along the
/// specialization arrows of X1 (principal probes decide naturality over a
/// finite posetal domain).
pub fn cocone_validate(
    diagram: &Codescent,
    ctx: &DescentContext,
    cocone: &DescentCocone,
) -> Result<(), String> {
    let n1 = diagram.x1.points();
    if cocone.theta.len() != n1 {
        return Err("one component per X1 point required".into());
    }
    for v in 0..n1 {
        let idx = cocone.theta[v];
        let fs = cocone.f.apply_ob(&VObj::Pt(diagram.s_map.apply(v)));
        let ft = cocone.f.apply_ob(&VObj::Pt(diagram.t_map.apply(v)));
        let arr = &ctx.points.cat;
        let src_ok = ctx.points.object_index(&fs) == Some(arr.src(idx));
        let dst_ok = ctx.points.object_index(&ft) == Some(arr.dst(idx));
        if !src_ok || !dst_ok {
            return Err(format!("component at X1 point {v} has wrong endpoints"));
        }
        if !ctx.points.is_iso(idx) {
            return Err(format!("component at X1 point {v} is not invertible"));
        }
    }
    for x in 0..diagram.x0.points() {
        let v = diagram.unit[x];
        if cocone.theta[v] != ctx.identity_index(&cocone.f.apply_ob(&VObj::Pt(x))) {
            return Err(format!("unit condition fails at X0 point {x}"));
        }
    }
    for (k, &(first, second)) in diagram.pairs.iter().enumerate() {
        let composite = ctx
            .points
            .cat
            .compose(cocone.theta[second], cocone.theta[first])
            .expect("cocycle composites are composable");
        if composite != cocone.theta[diagram.m[k]] {
            return Err(format!("cocycle condition fails at X2 element {k}"));
        }
    }
    // Naturality of the 2-cell along X1 specializations.
    for v in 0..n1 {
        for w in 0..n1 {
            if !diagram.x1.le(v, w) {
                continue;
            }
            let fs_arrow = functor_specialization_arrow(
                &cocone.f,
                diagram.s_map.apply(v),
                diagram.s_map.apply(w),
                ctx,
            );
            let ft_arrow = functor_specialization_arrow(
                &cocone.f,
                diagram.t_map.apply(v),
                diagram.t_map.apply(w),
                ctx,
            );
            let (Some(fs_arrow), Some(ft_arrow)) = (fs_arrow, ft_arrow) else {
                return Err(format!("images of specialization {v} ≤ {w} missing"));
            };
            let lhs = ctx.points.cat.compose(ft_arrow, cocone.theta[v]);
            let rhs = ctx.points.cat.compose(cocone.theta[w], fs_arrow);
            if lhs != rhs {
                return Err(format!("2-cell not natural along {v} ≤ {w}"));
            }
        }
    }
    Ok(())
}

/// The image under `f` of the unique convergence arrow `a ≼ δ_b` of the
/// domain space, as an apex points-category arrow index.
fn functor_specialization_arrow(
    f: &VUltFunctor,
    a: usize,
    b: usize,
    ctx: &DescentContext,
) -> Option<usize> {
    let dom = f.dom();
    let arrow = dom
        .hom(
            &VObj::Pt(a),
            &crate::uf::Ultrafilter::star(),
            &UpFamily::constant(IndexSet::Fin(1), VObj::Pt(b)),
        )
        .ok()?
        .pop()?;
    let image = f.apply_arrow(&arrow).ok()?;
    ctx.points.arrow_index(&image)
}

/// The canonical cocone of a map over its own kernel: the gluing component
/// at `(x, y)` is the unique identification of the two images.
pub fn canonical_cocone(
    pi: &SpaceMap,
    diagram: &Codescent,
    ctx: &DescentContext,
) -> DescentCocone {
    // ctx must be the context of PtSpace(pi.target).
    let f = VUltFunctor::Space(pi.clone());
    let theta = (0..diagram.x1.points())
        .map(|v| {
            let x = diagram.s_map.apply(v);
            let y = diagram.t_map.apply(v);
            let fx = VObj::Pt(pi.apply(x));
            let fy = VObj::Pt(pi.apply(y));
            *ctx.hom_indices(&fx, &fy)
                .first()
                .expect("kernel pairs have identified images")
        })
        .collect();
    DescentCocone { f, theta }
}

/// Enumerates the functors from a space instance into a battery apex.
pub fn enumerate_functors(dom: &FiniteSpace, apex: &VUltInstance) -> Vec<VUltFunctor> {
    match apex {
        VUltInstance::Point => vec![VUltFunctor::Terminal(VUltInstance::PtSpace(dom.clone()))],
        VUltInstance::FinSet { bound } => {
            enumerate_ultrasheaves(&SheafBase::Space(dom.clone()), *bound)
                .into_iter()
                .map(|sheaf| sheaf.as_functor(*bound))
                .collect()
        }
        VUltInstance::PtSpace(target) => {
            let mut out = Vec::new();
            let n = dom.points();
            let mut table = vec![0usize; n];
            loop {
                let map = SpaceMap::new(dom.clone(), target.clone(), table.clone());
                if map.is_continuous() {
                    out.push(VUltFunctor::Space(map));
                }
                let mut i = 0;
                loop {
                    if i == n {
                        return out;
                    }
                    table[i] += 1;
                    if table[i] < target.points() {
                        break;
                    }
                    table[i] = 0;
                    i += 1;
                }
            }
        }
        _ => Vec::new(),
    }
}

/// Natural transformations between two enumerated functors, as component
/// tuples of apex points-category arrow indices (one per domain point).
pub fn enumerate_nats(
    dom: &FiniteSpace,
    f: &VUltFunctor,
    g: &VUltFunctor,
    ctx: &DescentContext,
) -> Vec<Vec<usize>> {
    let n = dom.points();
    let mut tuples: Vec<Vec<usize>> = vec![Vec::new()];
    for x in 0..n {
        let candidates = ctx.hom_indices(&f.apply_ob(&VObj::Pt(x)), &g.apply_ob(&VObj::Pt(x)));
        tuples = tuples
            .into_iter()
            .flat_map(|t| {
                candidates.iter().map(move |&c| {
                    let mut t2 = t.clone();
                    t2.push(c);
                    t2
                })
            })
            .collect();
        if tuples.is_empty() {
            return tuples;
        }
    }
    // Naturality along the specializations of the domain.
    tuples.retain(|t| {
        (0..n).all(|x| {
            (0..n).all(|y| {
                if !dom.le(x, y) {
                    return true;
                }
                let Some(fxy) = functor_specialization_arrow(f, x, y, ctx) else {
                    return false;
                };
                let Some(gxy) = functor_specialization_arrow(g, x, y, ctx) else {
                    return false;
                };
                ctx.points.cat.compose(gxy, t[x]) == ctx.points.cat.compose(t[y], fxy)
            })
        })
    });
    tuples
}

/// All descent cocones over the diagram with the given apex: functors off X0
/// paired with valid gluing cells, found by depth-first assignment with unit
/// forcing and incremental cocycle pruning.
pub fn descent_cocones(diagram: &Codescent, ctx: &DescentContext) -> Vec<DescentCocone> {
    let mut out = Vec::new();
    for f in enumerate_functors(&diagram.x0, &ctx.apex) {
        let n1 = diagram.x1.points();
        let mut forced: Vec<Option<usize>> = vec![None; n1];
        for x in 0..diagram.x0.points() {
            forced[diagram.unit[x]] = Some(ctx.identity_index(&f.apply_ob(&VObj::Pt(x))));
        }
        let mut assignment = forced.clone();
        dfs_theta(diagram, ctx, &f, &mut assignment, 0, &mut out);
    }
    out
}

fn dfs_theta(
    diagram: &Codescent,
    ctx: &DescentContext,
    f: &VUltFunctor,
    assignment: &mut Vec<Option<usize>>,
    v: usize,
    out: &mut Vec<DescentCocone>,
) {
    let n1 = diagram.x1.points();
    if v == n1 {
        let theta: Vec<usize> = assignment.iter().map(|a| a.unwrap()).collect();
        let cocone = DescentCocone {
            f: f.clone(),
            theta,
        };
        if cocone_validate(diagram, ctx, &cocone).is_ok() {
            out.push(cocone);
        }
        return;
    }
    if assignment[v].is_some() {
        dfs_theta(diagram, ctx, f, assignment, v + 1, out);
        return;
    }
    let fs = f.apply_ob(&VObj::Pt(diagram.s_map.apply(v)));
    let ft = f.apply_ob(&VObj::Pt(diagram.t_map.apply(v)));
    for idx in ctx.hom_indices(&fs, &ft) {
        if !ctx.points.is_iso(idx) {
            continue;
        }
        assignment[v] = Some(idx);
        // Incremental cocycle pruning on fully assigned pairs.
        let consistent = diagram.pairs.iter().enumerate().all(|(k, &(a, b))| {
            match (assignment[a], assignment[b], assignment[diagram.m[k]]) {
                (Some(ta), Some(tb), Some(tm)) => {
                    ctx.points.cat.compose(tb, ta) == Some(tm)
                }
                _ => true,
            }
        });
        if consistent {
            dfs_theta(diagram, ctx, f, assignment, v + 1, out);
        }
        assignment[v] = None;
    }
}

/// Morphisms of descent cocones: natural transformations of the underlying
/// functors compatible with the gluing cells.
pub fn descent_morphisms(
    diagram: &Codescent,
    ctx: &DescentContext,
    from: &DescentCocone,
    to: &DescentCocone,
) -> Vec<Vec<usize>> {
    let base = enumerate_nats(&diagram.x0, &from.f, &to.f, ctx);
    base.into_iter()
        .filter(|alpha| {
            (0..diagram.x1.points()).all(|v| {
                let sx = diagram.s_map.apply(v);
                let tx = diagram.t_map.apply(v);
                let lhs = ctx.points.cat.compose(alpha[tx], from.theta[v]);
                let rhs = ctx.points.cat.compose(to.theta[v], alpha[sx]);
                lhs == rhs
            })
        })
        .collect()
}

/// Assembles the descent category at desk scale: objects are the cocones,
/// arrows their morphisms.
pub fn descent_category(
    diagram: &Codescent,
    ctx: &DescentContext,
) -> (FiniteCategory, Vec<DescentCocone>) {
    let cocones = descent_cocones(diagram, ctx);
    build_category_from_morphisms(&cocones, |a, b| descent_morphisms(diagram, ctx, a, b), |t| {
        compose_tuples(ctx, t)
    })
}

fn compose_tuples(ctx: &DescentContext, t: (&[usize], &[usize])) -> Vec<usize> {
    // Componentwise composition second ∘ first in the apex points category.
    t.0.iter()
        .zip(t.1)
        .map(|(&f, &g)| ctx.points.cat.compose(g, f).expect("components compose"))
        .collect()
}

fn build_category_from_morphisms<O>(
    objects: &[O],
    homs: impl Fn(&O, &O) -> Vec<Vec<usize>>,
    compose: impl Fn((&[usize], &[usize])) -> Vec<usize>,
) -> (FiniteCategory, Vec<O>)
where
    O: Clone,
{
    let mut arrows = Vec::new();
    let mut tuples: Vec<Vec<usize>> = Vec::new();
    for (i, a) in objects.iter().enumerate() {
        for (j, b) in objects.iter().enumerate() {
            for t in homs(a, b) {
                arrows.push(Arrow { src: i, dst: j });
                tuples.push(t);
            }
        }
    }
    let find = |src: usize, dst: usize, t: &[usize]| {
        arrows
            .iter()
            .zip(&tuples)
            .position(|(a, tu)| a.src == src && a.dst == dst && tu == t)
            .expect("composite morphism is enumerated")
    };
    let identity: Vec<usize> = (0..objects.len())
        .map(|i| {
            let id_homs = homs(&objects[i], &objects[i]);
            // The identity tuple composes as a unit with itself.
            let id_tuple = id_homs
                .iter()
                .find(|t| compose((t, t)) == **t && id_homs.iter().all(|u| {
                    compose((u, t)) == *u && compose((t, u)) == *u
                }))
                .expect("identity morphism exists")
                .clone();
            find(i, i, &id_tuple)
        })
        .collect();
    let m = arrows.len();
    let mut comp = vec![vec![None; m]; m];
    for g in 0..m {
        for f in 0..m {
            if arrows[f].dst == arrows[g].src {
                let t = compose((&tuples[f], &tuples[g]));
                comp[g][f] = Some(find(arrows[f].src, arrows[g].dst, &t));
            }
        }
    }
    let cat = FiniteCategory::new(objects.len(), arrows, identity, comp)
        .expect("descent data forms a category");
    (cat, objects.to_vec())
}

/// Report of the effective-descent criterion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CriterionReport {
    pub surjective: Result<(), String>,
    pub lifting: Result<(), String>,
}

impl CriterionReport {
    pub fn holds(&self) -> bool {
        self.surjective.is_ok() && self.lifting.is_ok()
    }
}

/// The sufficient criterion for effective descent: surjective on objects and
/// every probed ultraarrow out of an image object lifts with the same type.
pub fn effective_descent_criterion(pi: &SpaceMap, cfg: &ProbeConfig) -> CriterionReport {
    let surjective = {
        let missing: Vec<usize> = (0..pi.target.points())
            .filter(|&z| !pi.map.contains(&z))
            .collect();
        if missing.is_empty() {
            Ok(())
        } else {
            Err(format!("objects {missing:?} are not in the image"))
        }
    };
    // Lifting on probes: principal probes are decisive on finite spaces, and
    // factorial probes follow by lifting the family pointwise; both are
    // exercised.
    let dom_instance = VUltInstance::PtSpace(pi.source.clone());
    let cod_instance = VUltInstance::PtSpace(pi.target.clone());
    let mut lifting = Ok(());
    'outer: for x in 0..pi.source.points() {
        for (a, uf, fam) in crate::vult::probe_queries(&cod_instance, cfg) {
            if a != VObj::Pt(pi.apply(x)) {
                continue;
            }
            let arrows = cod_instance.hom(&a, &uf, &fam).unwrap_or_default();
            if arrows.is_empty() {
                continue;
            }
            // Candidate lifted families: choose a fiber point over each
            // distinct codomain value.
            let values: Vec<usize> = fam
                .values()
                .iter()
                .map(|o| match o {
                    VObj::Pt(p) => *p,
                    _ => unreachable!(),
                })
                .collect();
            let fibers: Vec<Vec<usize>> = values
                .iter()
                .map(|&b| {
                    (0..pi.source.points())
                        .filter(|&y| pi.apply(y) == b)
                        .collect()
                })
                .collect();
            let mut choices: Vec<Vec<usize>> = vec![Vec::new()];
            for fiber in &fibers {
                choices = choices
                    .into_iter()
                    .flat_map(|c| {
                        fiber.iter().map(move |&y| {
                            let mut c2 = c.clone();
                            c2.push(y);
                            c2
                        })
                    })
                    .collect();
            }
            let lifted = choices.into_iter().any(|choice| {
                let pairs: Vec<(VObj, crate::upset::UpSet)> = choice
                    .iter()
                    .zip(fam.levels())
                    .map(|(&y, l)| (VObj::Pt(y), l.clone()))
                    .collect();
                let lifted_fam = UpFamily::new(fam.index(), pairs);
                !dom_instance
                    .hom(&VObj::Pt(x), &uf, &lifted_fam)
                    .unwrap_or_default()
                    .is_empty()
            });
            if !lifted {
                lifting = Err(format!(
                    "no same-type lift of a probed arrow at source point {x}"
                ));
                break 'outer;
            }
        }
    }
    CriterionReport {
        surjective,
        lifting,
    }
}

/// The default battery of test apexes ("battery-v1"): the point instance,
/// finite sets at bounds 1 and 2, and the spaces with at most two points.
pub fn default_battery() -> Vec<VUltInstance> {
    let mut out = vec![
        VUltInstance::Point,
        VUltInstance::FinSet { bound: 1 },
        VUltInstance::FinSet { bound: 2 },
        VUltInstance::PtSpace(FiniteSpace::point()),
    ];
    for t in crate::space::all_topologies(2) {
        out.push(VUltInstance::PtSpace(t));
    }
    out
}

pub const BATTERY_VERSION: &str = "battery-v1";

/// Per-apex universality verdict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApexReport {
    pub apex: String,
    pub lhs_objects: usize,
    pub cocones: usize,
    pub essentially_surjective: Result<(), String>,
    pub fully_faithful: Result<(), String>,
}

impl ApexReport {
    pub fn passes(&self) -> bool {
        self.essentially_surjective.is_ok() && self.fully_faithful.is_ok()
    }
}

/// Universality report across the battery.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniversalityReport {
    pub battery: &'static str,
    pub per_apex: Vec<ApexReport>,
}

impl UniversalityReport {
    pub fn passes(&self) -> bool {
        self.per_apex.iter().all(|r| r.passes())
    }
}

/// Checks that precomposition with the canonical cocone of `pi` is an
/// equivalence `Hom(Z, Y) → Desc(X•; Y)` for every battery apex `Y`, by
/// exhaustive enumeration of both sides.
pub fn universality_check(pi: &SpaceMap, apexes: &[VUltInstance]) -> UniversalityReport {
    let diagram = kernel_codescent(pi);
    diagram.validate().expect("kernels satisfy the identities");
    let mut per_apex = Vec::new();
    for apex in apexes {
        let ctx = DescentContext::new(apex.clone());
        let z_ctx = DescentContext::new(VUltInstance::PtSpace(pi.target.clone()));
        let lhs = enumerate_functors(&pi.target, apex);
        let cocones = descent_cocones(&diagram, &ctx);
        // Precomposition of each functor with the canonical cocone.
        let canonical = canonical_cocone(pi, &diagram, &z_ctx);
        let images: Vec<DescentCocone> = lhs
            .iter()
            .map(|f| precompose_cocone(f, &canonical, &diagram, &ctx, &z_ctx))
            .collect();
        // Essential surjectivity: every cocone is isomorphic to an image.
        let mut essentially_surjective = Ok(());
        'surj: for c in &cocones {
            for im in &images {
                if cocone_isomorphic(&diagram, &ctx, c, im) {
                    continue 'surj;
                }
            }
            essentially_surjective = Err(format!(
                "a descent cocone with fibers {:?} has no preimage",
                describe_cocone(c)
            ));
            break;
        }
        // Full faithfulness: morphism sets biject along precomposition.
        let mut fully_faithful = Ok(());
        'ff: for (i, f) in lhs.iter().enumerate() {
            for (j, g) in lhs.iter().enumerate() {
                let nats = enumerate_nats(&pi.target, f, g, &ctx);
                let desc_morphisms =
                    descent_morphisms(&diagram, &ctx, &images[i], &images[j]);
                // Precomposition on morphisms: restrict components along π.
                let mut seen: Vec<Vec<usize>> = Vec::new();
                for alpha in &nats {
                    let image: Vec<usize> = (0..diagram.x0.points())
                        .map(|x| alpha[pi.apply(x)])
                        .collect();
                    if seen.contains(&image) {
                        fully_faithful = Err(format!(
                            "precomposition not faithful between functors {i} and {j}"
                        ));
                        break 'ff;
                    }
                    if !desc_morphisms.contains(&image) {
                        fully_faithful = Err(format!(
                            "image morphism missing between functors {i} and {j}"
                        ));
                        break 'ff;
                    }
                    seen.push(image);
                }
                if seen.len() != desc_morphisms.len() {
                    fully_faithful = Err(format!(
                        "precomposition not full between functors {i} and {j}: \
                         {} naturals vs {} descent morphisms",
                        seen.len(),
                        desc_morphisms.len()
                    ));
                    break 'ff;
                }
            }
        }
        per_apex.push(ApexReport {
            apex: describe_instance(apex),
            lhs_objects: lhs.len(),
            cocones: cocones.len(),
            essentially_surjective,
            fully_faithful,
        });
    }
    UniversalityReport {
        battery: BATTERY_VERSION,
        per_apex,
    }
}

fn describe_instance(inst: &VUltInstance) -> String {
    match inst {
        VUltInstance::Point => "point".into(),
        VUltInstance::FinSet { bound } => format!("finset({bound})"),
        VUltInstance::PtSpace(t) => format!("space({} points, {} opens)", t.points(), t.opens().len()),
        VUltInstance::Alex(c) => format!("alex({} objects)", c.objects()),
        VUltInstance::Pullback(_) => "pullback".into(),
    }
}

fn describe_cocone(c: &DescentCocone) -> String {
    match &c.f {
        VUltFunctor::Sheaf { sheaf, .. } => format!("{:?}", sheaf.fibers()),
        VUltFunctor::Space(m) => format!("{:?}", m.map),
        _ => "apex functor".into(),
    }
}

/// Precomposes a functor with the canonical cocone: `(F∘π, F·θ)`.
fn precompose_cocone(
    f: &VUltFunctor,
    canonical: &DescentCocone,
    diagram: &Codescent,
    ctx: &DescentContext,
    z_ctx: &DescentContext,
) -> DescentCocone {
    let VUltFunctor::Space(pi) = &canonical.f else {
        panic!("canonical cocones are carried by the projection map");
    };
    let composed = compose_space_functor(f, pi);
    let theta = canonical
        .theta
        .iter()
        .map(|&idx| {
            let arrow = &z_ctx.points.arrows[idx];
            let image = f.apply_arrow(arrow).expect("functors act on star arrows");
            ctx.points
                .arrow_index(&image)
                .expect("image of a star arrow is enumerated")
        })
        .collect();
    let _ = diagram;
    DescentCocone { f: composed, theta }
}

/// Composes a battery functor with a space map into its domain.
pub fn compose_space_functor(f: &VUltFunctor, pi: &SpaceMap) -> VUltFunctor {
    match f {
        VUltFunctor::Terminal(_) => {
            VUltFunctor::Terminal(VUltInstance::PtSpace(pi.source.clone()))
        }
        VUltFunctor::Space(m) => VUltFunctor::Space(SpaceMap::new(
            pi.source.clone(),
            m.target.clone(),
            (0..pi.source.points()).map(|x| m.apply(pi.apply(x))).collect(),
        )),
        VUltFunctor::Sheaf { sheaf, bound, .. } => {
            let pulled = pullback_sheaf(sheaf, pi);
            pulled.as_functor(*bound)
        }
        VUltFunctor::Identity(_) => VUltFunctor::Space(pi.clone()),
        VUltFunctor::Cat { .. } => panic!("category functors do not precompose with space maps"),
    }
}

/// Isomorphism of cocones: a morphism with a two-sided inverse.
pub fn cocone_isomorphic(
    diagram: &Codescent,
    ctx: &DescentContext,
    a: &DescentCocone,
    b: &DescentCocone,
) -> bool {
    let forward = descent_morphisms(diagram, ctx, a, b);
    if forward.is_empty() {
        return false;
    }
    let backward = descent_morphisms(diagram, ctx, b, a);
    for f in &forward {
        for g in &backward {
            let fg = compose_tuples(ctx, (f, g));
            let gf = compose_tuples(ctx, (g, f));
            let id_a: Vec<usize> = (0..diagram.x0.points())
                .map(|x| ctx.identity_index(&a.f.apply_ob(&VObj::Pt(x))))
                .collect();
            let id_b: Vec<usize> = (0..diagram.x0.points())
                .map(|x| ctx.identity_index(&b.f.apply_ob(&VObj::Pt(x))))
                .collect();
            if fg == id_a && gf == id_b {
                return true;
            }
        }
    }
    false
}

// ---------------------------------------------------------------------------
// Equivariant sheaves.
// ---------------------------------------------------------------------------

/// An equivariant sheaf over a topological groupoid: stalks over the object
/// space together with a continuous, unital, multiplicative action of the
/// arrow space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivariantSheaf {
    pub sheaf: UltraSheaf,
    /// Per arrow point, the action `A_{src(g)} → A_{tgt(g)}`.
    pub action: Vec<Vec<usize>>,
}

impl EquivariantSheaf {
    pub fn validate(&self, g: &TopGroupoid) -> Result<(), String> {
        let n1 = g.arrows.points();
        if self.action.len() != n1 {
            return Err("one action table per arrow point required".into());
        }
        for arrow in 0..n1 {
            let t = &self.action[arrow];
            if t.len() != self.sheaf.fiber(g.src[arrow])
                || t.iter().any(|&v| v >= self.sheaf.fiber(g.tgt[arrow]))
            {
                return Err(format!("action of arrow {arrow} mistyped"));
            }
        }
        for x in 0..g.objects.points() {
            let u = &self.action[g.unit[x]];
            if u.iter().enumerate().any(|(e, &v)| v != e) {
                return Err(format!("unit of {x} does not act as the identity"));
            }
        }
        for first in 0..n1 {
            for second in 0..n1 {
                if let Some(c) = g.compose[first][second] {
                    for e in 0..self.sheaf.fiber(g.src[first]) {
                        if self.action[second][self.action[first][e]] != self.action[c][e] {
                            return Err(format!(
                                "action not multiplicative at ({first}, {second})"
                            ));
                        }
                    }
                }
            }
        }
        // Continuity: the action map on the composable pairs of (arrow,
        // element) is monotone for the étale space of the sheaf.
        let etale = ultrasheaf_to_etale(&self.sheaf).map_err(|e| e.to_string())?;
        let offsets: Vec<usize> = self
            .sheaf
            .fibers()
            .iter()
            .scan(0, |acc, &f| {
                let out = *acc;
                *acc += f;
                Some(out)
            })
            .collect();
        let total = etale.total.points();
        let act = |arrow: usize, point: usize| -> Option<usize> {
            let x = etale.proj.apply(point);
            if x != g.src[arrow] {
                return None;
            }
            let e = point - offsets[x];
            Some(offsets[g.tgt[arrow]] + self.action[arrow][e])
        };
        for a1 in 0..n1 {
            for p1 in 0..total {
                let Some(q1) = act(a1, p1) else { continue };
                for a2 in 0..n1 {
                    for p2 in 0..total {
                        let Some(q2) = act(a2, p2) else { continue };
                        if g.arrows.le(a1, a2) && etale.total.le(p1, p2) && !etale.total.le(q1, q2)
                        {
                            return Err(format!(
                                "action not continuous at arrows ({a1}, {a2})"
                            ));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// Enumerates the equivariant sheaves over a groupoid with fibers bounded by
/// `fiber_bound`, together with their category.
pub fn equivariant_sheaves(
    g: &TopGroupoid,
    fiber_bound: usize,
) -> (FiniteCategory, Vec<EquivariantSheaf>) {
    let base = SheafBase::Space(g.objects.clone());
    let mut objects = Vec::new();
    for sheaf in enumerate_ultrasheaves(&base, fiber_bound) {
        // Enumerate actions arrow by arrow.
        let n1 = g.arrows.points();
        let mut tuples: Vec<Vec<Vec<usize>>> = vec![Vec::new()];
        for arrow in 0..n1 {
            let tables = if g.unit.contains(&arrow) && g.src[arrow] == g.tgt[arrow] {
                vec![(0..sheaf.fiber(g.src[arrow])).collect::<Vec<usize>>()]
            } else {
                crate::sheaf::function_tables(
                    sheaf.fiber(g.src[arrow]),
                    sheaf.fiber(g.tgt[arrow]),
                )
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
        for action in tuples {
            let candidate = EquivariantSheaf {
                sheaf: sheaf.clone(),
                action,
            };
            if candidate.validate(g).is_ok() {
                objects.push(candidate);
            }
        }
    }
    build_equivariant_category(g, objects)
}

/// Morphisms of equivariant sheaves: sheaf maps commuting with the actions,
/// flattened to one table tuple.
fn equivariant_maps(
    g: &TopGroupoid,
    a: &EquivariantSheaf,
    b: &EquivariantSheaf,
) -> Vec<Vec<usize>> {
    sheaf_maps(&a.sheaf, &b.sheaf)
        .into_iter()
        .filter(|m| {
            (0..g.arrows.points()).all(|arrow| {
                let (x, y) = (g.src[arrow], g.tgt[arrow]);
                (0..a.sheaf.fiber(x)).all(|e| {
                    b.action[arrow][m.components[x][e]] == m.components[y][a.action[arrow][e]]
                })
            })
        })
        .map(|m| flatten_components(&m))
        .collect()
}

fn flatten_components(m: &SheafMap) -> Vec<usize> {
    let mut out = Vec::new();
    for comp in &m.components {
        out.push(comp.len());
        out.extend(comp.iter().copied());
    }
    out
}

fn unflatten_components(flat: &[usize]) -> SheafMap {
    let mut components = Vec::new();
    let mut i = 0;
    while i < flat.len() {
        let len = flat[i];
        components.push(flat[i + 1..i + 1 + len].to_vec());
        i += 1 + len;
    }
    SheafMap { components }
}

fn build_equivariant_category(
    g: &TopGroupoid,
    objects: Vec<EquivariantSheaf>,
) -> (FiniteCategory, Vec<EquivariantSheaf>) {
    build_category_from_morphisms(
        &objects,
        |a, b| equivariant_maps(g, a, b),
        |(f, g2)| {
            let mf = unflatten_components(f);
            let mg = unflatten_components(g2);
            flatten_components(&mg.compose(&mf))
        },
    )
}

/// Counts the isomorphism classes of objects in a finite category.
pub fn iso_classes(cat: &FiniteCategory) -> Vec<usize> {
    let mut reps: Vec<usize> = Vec::new();
    'next: for o in 0..cat.objects() {
        for &r in &reps {
            let iso = cat
                .hom(o, r)
                .into_iter()
                .any(|f| cat.is_iso_arrow(f));
            if iso {
                continue 'next;
            }
        }
        reps.push(o);
    }
    reps
}

/// Equivalence of finite categories at desk scale: isomorphic skeletons.
pub fn categories_equivalent(a: &FiniteCategory, b: &FiniteCategory) -> bool {
    let ra = iso_classes(a);
    let rb = iso_classes(b);
    if ra.len() != rb.len() {
        return false;
    }
    skeleton(a, &ra).is_isomorphic(&skeleton(b, &rb))
}

/// The full subcategory on the given objects.
fn skeleton(cat: &FiniteCategory, reps: &[usize]) -> FiniteCategory {
    let keep: Vec<usize> = (0..cat.arrow_count())
        .filter(|&f| reps.contains(&cat.src(f)) && reps.contains(&cat.dst(f)))
        .collect();
    let obj_index = |o: usize| reps.iter().position(|&r| r == o).unwrap();
    let arrows: Vec<Arrow> = keep
        .iter()
        .map(|&f| Arrow {
            src: obj_index(cat.src(f)),
            dst: obj_index(cat.dst(f)),
        })
        .collect();
    let identity: Vec<usize> = reps
        .iter()
        .map(|&o| keep.iter().position(|&f| f == cat.identity(o)).unwrap())
        .collect();
    let m = keep.len();
    let mut comp = vec![vec![None; m]; m];
    for g in 0..m {
        for f in 0..m {
            if arrows[f].dst == arrows[g].src {
                let c = cat.compose(keep[g], keep[f]).unwrap();
                comp[g][f] = Some(keep.iter().position(|&h| h == c).unwrap());
            }
        }
    }
    FiniteCategory::new(reps.len(), arrows, identity, comp)
        .expect("full subcategories satisfy the laws")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn groupoid_constructors_validate() {
        TopGroupoid::z2_on_point().validate().unwrap();
        TopGroupoid::pair_groupoid(2).validate().unwrap();
        TopGroupoid::trivial(&FiniteSpace::sierpinski())
            .validate()
            .unwrap();
    }

    #[test]
    fn kernel_of_identity_is_trivial() {
        let s = FiniteSpace::sierpinski();
        let k = kernel_codescent(&SpaceMap::identity(&s));
        k.validate().unwrap();
        // For a T0 space the kernel has exactly the diagonal points.
        assert_eq!(k.x1.points(), 2);
    }

    #[test]
    fn kernel_of_two_point_collapse_is_pair_groupoid() {
        let two = FiniteSpace::discrete(2);
        let pi = SpaceMap::new(two, FiniteSpace::point(), vec![0, 0]);
        let k = kernel_codescent(&pi);
        k.validate().unwrap();
        assert_eq!(k.x1.points(), 4);
    }

    #[test]
    fn kernel_of_sierpinski_collapse() {
        let s = FiniteSpace::sierpinski();
        let pi = SpaceMap::new(s, FiniteSpace::point(), vec![0, 0]);
        let k = kernel_codescent(&pi);
        k.validate().unwrap();
        assert_eq!(k.x1.points(), 4);
    }

    #[test]
    fn canonical_cocone_validates() {
        let two = FiniteSpace::discrete(2);
        let pi = SpaceMap::new(two, FiniteSpace::point(), vec![0, 0]);
        let diagram = kernel_codescent(&pi);
        let ctx = DescentContext::new(VUltInstance::PtSpace(pi.target.clone()));
        let cocone = canonical_cocone(&pi, &diagram, &ctx);
        cocone_validate(&diagram, &ctx, &cocone).unwrap();
    }

    #[test]
    fn broken_cocone_is_rejected() {
        // Over the pair-groupoid kernel with apex FinSet(2), replace one
        // component of a valid cocone by a non-coherent choice.
        let two = FiniteSpace::discrete(2);
        let pi = SpaceMap::new(two, FiniteSpace::point(), vec![0, 0]);
        let diagram = kernel_codescent(&pi);
        let ctx = DescentContext::new(VUltInstance::FinSet { bound: 2 });
        let cocones = descent_cocones(&diagram, &ctx);
        assert!(!cocones.is_empty());
        let rich = cocones
            .iter()
            .find(|c| matches!(&c.f, VUltFunctor::Sheaf { sheaf, .. } if sheaf.fibers() == [2, 2]))
            .expect("a two-element cocone exists");
        // Mutate a non-unit component to a non-matching iso if possible.
        let mut broken = rich.clone();
        let v = (0..diagram.x1.points())
            .find(|&v| !diagram.unit.contains(&v))
            .unwrap();
        let current = broken.theta[v];
        let alternatives: Vec<usize> = (0..ctx.points.cat.arrow_count())
            .filter(|&i| {
                i != current
                    && ctx.points.cat.src(i) == ctx.points.cat.src(current)
                    && ctx.points.cat.dst(i) == ctx.points.cat.dst(current)
                    && ctx.points.is_iso(i)
            })
            .collect();
        if let Some(&alt) = alternatives.first() {
            broken.theta[v] = alt;
            assert!(cocone_validate(&diagram, &ctx, &broken).is_err());
        }
    }

    #[test]
    fn criterion_examples() {
        let cfg = ProbeConfig::default();
        let s = FiniteSpace::sierpinski();
        let id = SpaceMap::identity(&s);
        assert!(effective_descent_criterion(&id, &cfg).holds());

        let two = FiniteSpace::discrete(2);
        let collapse = SpaceMap::new(two.clone(), FiniteSpace::point(), vec![0, 0]);
        assert!(effective_descent_criterion(&collapse, &cfg).holds());

        let not_surjective = SpaceMap::new(FiniteSpace::point(), two, vec![0]);
        let report = effective_descent_criterion(&not_surjective, &cfg);
        assert!(report.surjective.is_err());
    }

    #[test]
    fn universality_of_the_identity() {
        let s = FiniteSpace::sierpinski();
        let pi = SpaceMap::identity(&s);
        let report = universality_check(&pi, &default_battery());
        assert!(report.passes(), "{report:?}");
    }

    #[test]
    fn universality_of_two_point_collapse() {
        let two = FiniteSpace::discrete(2);
        let pi = SpaceMap::new(two, FiniteSpace::point(), vec![0, 0]);
        let report = universality_check(&pi, &default_battery());
        assert!(report.passes(), "{report:?}");
    }

    #[test]
    fn z2_descent_category_has_four_objects() {
        // Independent oracle: involutive sets of size ≤ 2 up to isomorphism
        // are (∅, id), (1, id), (2, id), (2, swap).
        let mut oracle = Vec::new();
        for size in 0..=2usize {
            for table in crate::sheaf::function_tables(size, size) {
                let involutive = (0..size).all(|e| table[table[e]] == e);
                if !involutive {
                    continue;
                }
                let canonical: Vec<usize> = {
                    // Canonical form under relabeling: count fixed points.
                    let fixed = (0..size).filter(|&e| table[e] == e).count();
                    vec![size, fixed]
                };
                if !oracle.contains(&canonical) {
                    oracle.push(canonical);
                }
            }
        }
        assert_eq!(oracle.len(), 4);

        let g = TopGroupoid::z2_on_point();
        g.validate().unwrap();
        let diagram = groupoid_codescent(&g);
        diagram.validate().unwrap();
        let ctx = DescentContext::new(VUltInstance::FinSet { bound: 2 });
        let (desc_cat, _) = descent_category(&diagram, &ctx);
        assert_eq!(iso_classes(&desc_cat).len(), 4);

        let (eq_cat, eq_objects) = equivariant_sheaves(&g, 2);
        assert_eq!(iso_classes(&eq_cat).len(), 4);
        assert!(!eq_objects.is_empty());
        assert!(categories_equivalent(&desc_cat, &eq_cat));
    }

    #[test]
    fn trivial_groupoid_equivariant_sheaves_are_sheaves() {
        let s = FiniteSpace::sierpinski();
        let g = TopGroupoid::trivial(&s);
        g.validate().unwrap();
        let (cat, objects) = equivariant_sheaves(&g, 1);
        // Equivariant sheaves over the trivial groupoid are plain sheaves.
        let plain = enumerate_ultrasheaves(&SheafBase::Space(s), 1);
        assert_eq!(objects.len(), plain.len());
        assert!(cat.objects() == objects.len());
    }

    #[test]
    fn pair_groupoid_descent_collapses_to_sets() {
        let g = TopGroupoid::pair_groupoid(2);
        let diagram = groupoid_codescent(&g);
        diagram.validate().unwrap();
        let ctx = DescentContext::new(VUltInstance::FinSet { bound: 2 });
        let (desc_cat, _) = descent_category(&diagram, &ctx);
        // Descent data over the pair groupoid is a single set of size ≤ 2:
        // three isomorphism classes.
        assert_eq!(iso_classes(&desc_cat).len(), 3);
    }
}
