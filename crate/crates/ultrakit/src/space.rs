//! Finite topological spaces, ultraconvergence, and the étale checker.
//!
//! Points are `0..n` and subsets are bitmasks. A finite space is stored by
//! its validated open-set list; the specialization preorder is derived
//! (`a ≤ b` iff every open containing `a` contains `b`). On a finite carrier
//! every ultrafilter is principal, so convergence conditions quantified over
//! ultrafilters are decided completely by scanning principal ones; oracle
//! ultrafilters over ℕ still act through pushforward along point families.

use thiserror::Error;

use crate::carrier::{IndexSet, MapRule, UpMap};
use crate::family::UpFamily;
use crate::product::{uprod_enumerate, BoundedFamily, ProductError, UltraproductSet};
use crate::uf::{uf_pushforward, UfError, Ultrafilter};
use crate::upset::UpSet;

pub type Mask = u32;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SpaceError {
    #[error("space must contain the empty set and the full set")]
    MissingEmptyOrFull,
    #[error("opens not closed under union: {a:#b} ∪ {b:#b}")]
    NotClosedUnderUnion { a: Mask, b: Mask },
    #[error("opens not closed under intersection: {a:#b} ∩ {b:#b}")]
    NotClosedUnderIntersection { a: Mask, b: Mask },
    #[error("open {mask:#b} has bits beyond the {points} points")]
    OutOfRange { mask: Mask, points: usize },
    #[error("at most {max} points supported, got {points}")]
    TooManyPoints { points: usize, max: usize },
}

pub const MAX_POINTS: usize = 16;

/// A finite topological space: a point count and its open-set lattice.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiniteSpace {
    points: usize,
    opens: Vec<Mask>,
}

impl FiniteSpace {
    /// Validates closure properties and returns the space with sorted opens.
    pub fn validate(points: usize, opens: &[Mask]) -> Result<FiniteSpace, SpaceError> {
        if points > MAX_POINTS {
            return Err(SpaceError::TooManyPoints {
                points,
                max: MAX_POINTS,
            });
        }
        let full = full_mask(points);
        let mut sorted: Vec<Mask> = opens.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        for &m in &sorted {
            if m & !full != 0 {
                return Err(SpaceError::OutOfRange { mask: m, points });
            }
        }
        if !sorted.contains(&0) || !sorted.contains(&full) {
            return Err(SpaceError::MissingEmptyOrFull);
        }
        for &a in &sorted {
            for &b in &sorted {
                if !sorted.contains(&(a | b)) {
                    return Err(SpaceError::NotClosedUnderUnion { a, b });
                }
                if !sorted.contains(&(a & b)) {
                    return Err(SpaceError::NotClosedUnderIntersection { a, b });
                }
            }
        }
        Ok(FiniteSpace {
            points,
            opens: sorted,
        })
    }

    /// Builds the Alexandroff space of a preorder: opens are the up-closed
    /// sets of `le` (`le[a][b]` meaning `a ≤ b`).
    pub fn from_preorder(le: &[Vec<bool>]) -> FiniteSpace {
        let n = le.len();
        assert!(n <= MAX_POINTS);
        let mut opens = Vec::new();
        'mask: for m in 0..=full_mask(n) {
            for a in 0..n {
                if m >> a & 1 == 1 {
                    for b in 0..n {
                        if le[a][b] && m >> b & 1 == 0 {
                            continue 'mask;
                        }
                    }
                }
            }
            opens.push(m);
        }
        FiniteSpace { points: n, opens }
    }

    pub fn point() -> FiniteSpace {
        FiniteSpace::validate(1, &[0b0, 0b1]).unwrap()
    }

    pub fn discrete(n: usize) -> FiniteSpace {
        FiniteSpace {
            points: n,
            opens: (0..=full_mask(n)).collect(),
        }
    }

    pub fn codiscrete(n: usize) -> FiniteSpace {
        FiniteSpace::validate(n, &[0, full_mask(n)]).unwrap()
    }

    /// Points ⊥ = 0 and ⊤ = 1 with `{⊤}` the only proper open.
    pub fn sierpinski() -> FiniteSpace {
        FiniteSpace::validate(2, &[0b00, 0b10, 0b11]).unwrap()
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn opens(&self) -> &[Mask] {
        &self.opens
    }

    pub fn full(&self) -> Mask {
        full_mask(self.points)
    }

    pub fn is_open(&self, m: Mask) -> bool {
        self.opens.binary_search(&m).is_ok()
    }

    pub fn is_closed(&self, m: Mask) -> bool {
        self.is_open(self.full() & !m)
    }

    /// The least open containing `a` (finite spaces are closed under all
    /// intersections).
    pub fn min_open(&self, a: usize) -> Mask {
        let mut m = self.full();
        for &u in &self.opens {
            if u >> a & 1 == 1 {
                m &= u;
            }
        }
        m
    }

    /// Specialization: `a ≼ δ_b`, every open containing `a` contains `b`.
    pub fn le(&self, a: usize, b: usize) -> bool {
        self.min_open(a) >> b & 1 == 1
    }

    pub fn specialization(&self) -> Vec<Vec<bool>> {
        (0..self.points)
            .map(|a| (0..self.points).map(|b| self.le(a, b)).collect())
            .collect()
    }

    /// The largest open inside `m`, by direct lattice computation.
    pub fn interior_lattice(&self, m: Mask) -> Mask {
        let mut best = 0;
        for &u in &self.opens {
            if u & !m == 0 {
                best |= u;
            }
        }
        best
    }

    /// Interior through convergence: points all of whose principal
    /// convergents stay in `m`.
    pub fn interior(&self, m: Mask) -> Mask {
        let mut out = 0;
        for a in 0..self.points {
            if m >> a & 1 == 1 && self.min_open(a) & !m == 0 {
                out |= 1 << a;
            }
        }
        out
    }

    /// Closure through convergence: points with some convergent inside `m`.
    pub fn closure(&self, m: Mask) -> Mask {
        let mut out = 0;
        for a in 0..self.points {
            if self.min_open(a) & m != 0 {
                out |= 1 << a;
            }
        }
        out
    }
}

pub fn full_mask(n: usize) -> Mask {
    if n == 0 {
        0
    } else {
        (1u32 << n) - 1
    }
}

/// All labeled topologies on `n` points, by exhaustive closure filtering.
pub fn all_topologies(n: usize) -> Vec<FiniteSpace> {
    assert!(n <= 4, "exhaustive enumeration is desk scale only");
    let full = full_mask(n);
    let proper: Vec<Mask> = (1..full).collect();
    let mut out = Vec::new();
    for choice in 0u32..(1 << proper.len()) {
        let mut opens = vec![0, full];
        for (i, &m) in proper.iter().enumerate() {
            if choice >> i & 1 == 1 {
                opens.push(m);
            }
        }
        if let Ok(space) = FiniteSpace::validate(n, &opens) {
            if space.opens.len() == opens.len() {
                out.push(space);
            }
        }
    }
    out
}

/// A random topology: close a random generating family under unions and
/// intersections.
pub fn random_topology(rng: &mut impl rand::Rng, n: usize) -> FiniteSpace {
    let full = full_mask(n);
    let mut opens: Vec<Mask> = vec![0, full];
    for _ in 0..rng.gen_range(0..=n + 1) {
        opens.push(rng.gen_range(0..=full));
    }
    loop {
        let mut added = false;
        let snapshot = opens.clone();
        for &a in &snapshot {
            for &b in &snapshot {
                for m in [a | b, a & b] {
                    if !opens.contains(&m) {
                        opens.push(m);
                        added = true;
                    }
                }
            }
        }
        if !added {
            break;
        }
    }
    FiniteSpace::validate(n, &opens).expect("closure yields a topology")
}

/// A μ-family of points of a finite space.
#[derive(Debug, Clone)]
pub struct PointFamily {
    pub uf: Ultrafilter,
    pub values: UpFamily<usize>,
}

impl PointFamily {
    pub fn new(uf: Ultrafilter, values: UpFamily<usize>) -> PointFamily {
        assert_eq!(uf.carrier(), values.index());
        PointFamily { uf, values }
    }

    pub fn constant(uf: Ultrafilter, point: usize) -> PointFamily {
        let values = UpFamily::constant(uf.carrier(), point);
        PointFamily { uf, values }
    }

    /// The pushforward of the ultrafilter along the family, as a principal
    /// point of `Fin(n)`.
    pub fn limit_point(&self, n: usize) -> Result<usize, UfError> {
        let levels = (0..n as u64)
            .map(|j| self.values.level_of(&(j as usize)))
            .collect();
        let map = UpMap::new(self.uf.carrier(), IndexSet::Fin(n), MapRule::Levels(levels))
            .expect("point family levels partition the carrier");
        let push = uf_pushforward(&self.uf, &map)?;
        Ok(push.principal_point().expect("finite carriers are principal") as usize)
    }
}

/// Ultraconvergence `a ≼ (x_s)_{s:μ}`: every open containing `a` pulls back
/// to a μ-large set under the family.
pub fn converges(space: &FiniteSpace, a: usize, fam: &PointFamily) -> Result<bool, UfError> {
    for &u in space.opens() {
        if u >> a & 1 == 0 {
            continue;
        }
        let mut pre = UpSet::empty();
        for (v, level) in fam.values.pairs() {
            if u >> *v & 1 == 1 {
                pre = pre.union(level);
            }
        }
        if !fam.uf.is_large(&pre)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The set of limit points of the family, computed by the closure formula
/// `∩ {cl(S) : S large}` over subsets of the finite carrier.
pub fn limit_points(space: &FiniteSpace, fam: &PointFamily) -> Result<Mask, UfError> {
    let n = space.points();
    let mut out = space.full();
    for s in 0..=space.full() {
        let mut level = UpSet::empty();
        for (v, l) in fam.values.pairs() {
            if s >> *v & 1 == 1 {
                level = level.union(l);
            }
        }
        if fam.uf.is_large(&level)? {
            out &= space.closure(s);
        }
        if out == 0 {
            break;
        }
    }
    let _ = n;
    Ok(out)
}

/// A witness against the convergence-relation axioms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RelationViolation {
    NotReflexive { point: usize },
    NotTransitive { a: usize, b: usize, c: usize },
}

/// Validates a principal convergence relation as a convergence structure on a
/// finite carrier: the unit axiom is reflexivity, and the composition axiom
/// reduces to transitivity because every ultrafilter on the carrier is
/// principal and limits of principal families are pointwise.
pub fn relation_validate(rel: &[Vec<bool>]) -> Result<(), RelationViolation> {
    let n = rel.len();
    for a in 0..n {
        if !rel[a][a] {
            return Err(RelationViolation::NotReflexive { point: a });
        }
    }
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                if rel[a][b] && rel[b][c] && !rel[a][c] {
                    return Err(RelationViolation::NotTransitive { a, b, c });
                }
            }
        }
    }
    Ok(())
}

/// The topology whose opens are the sets closed under the convergence
/// relation: `A` is open iff `a ∈ A` and `a ≼ δ_b` imply `b ∈ A`.
pub fn topology_from_relation(rel: &[Vec<bool>]) -> FiniteSpace {
    FiniteSpace::from_preorder(rel)
}

/// A point map between finite spaces; continuity is checked, never assumed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpaceMap {
    pub source: FiniteSpace,
    pub target: FiniteSpace,
    pub map: Vec<usize>,
}

impl SpaceMap {
    pub fn new(source: FiniteSpace, target: FiniteSpace, map: Vec<usize>) -> SpaceMap {
        assert_eq!(map.len(), source.points());
        assert!(map.iter().all(|&y| y < target.points()));
        SpaceMap { source, target, map }
    }

    pub fn identity(space: &FiniteSpace) -> SpaceMap {
        SpaceMap::new(space.clone(), space.clone(), (0..space.points()).collect())
    }

    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }

    pub fn image_mask(&self, m: Mask) -> Mask {
        let mut out = 0;
        for x in 0..self.source.points() {
            if m >> x & 1 == 1 {
                out |= 1 << self.map[x];
            }
        }
        out
    }

    pub fn preimage_mask(&self, m: Mask) -> Mask {
        let mut out = 0;
        for x in 0..self.source.points() {
            if m >> self.map[x] & 1 == 1 {
                out |= 1 << x;
            }
        }
        out
    }

    pub fn fiber_mask(&self, y: usize) -> Mask {
        self.preimage_mask(1 << y)
    }

    fn continuous_by_opens(&self) -> bool {
        self.target
            .opens()
            .iter()
            .all(|&u| self.source.is_open(self.preimage_mask(u)))
    }

    fn continuous_by_convergence(&self) -> bool {
        // Principal ultrafilters decide continuity on finite carriers: the
        // pushforward of δ_b along the map is δ_{f(b)}.
        let n = self.source.points();
        for a in 0..n {
            for b in 0..n {
                if self.source.le(a, b) && !self.target.le(self.map[a], self.map[b]) {
                    return false;
                }
            }
        }
        true
    }

    /// Continuity; the open-preimage route and the convergence route must
    /// agree.
    pub fn is_continuous(&self) -> bool {
        let by_opens = self.continuous_by_opens();
        let by_cvg = self.continuous_by_convergence();
        assert_eq!(
            by_opens, by_cvg,
            "continuity characterizations disagree on {self:?}"
        );
        by_opens
    }

    fn open_by_images(&self) -> bool {
        self.source
            .opens()
            .iter()
            .all(|&u| self.target.is_open(self.image_mask(u)))
    }

    fn open_by_lifting(&self) -> bool {
        // Openness via lifts: every convergent to an image point lifts.
        let n = self.source.points();
        for a in 0..n {
            for y in 0..self.target.points() {
                if self.target.le(self.map[a], y) {
                    let lift_exists =
                        (0..n).any(|b| self.map[b] == y && self.source.le(a, b));
                    if !lift_exists {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Openness of a continuous map; image route and lifting route must
    /// agree.
    pub fn is_open_map(&self) -> bool {
        let by_images = self.open_by_images();
        let by_lifting = self.open_by_lifting();
        assert_eq!(
            by_images, by_lifting,
            "openness characterizations disagree on {self:?}"
        );
        by_images
    }

    /// Exploratory dual of the open-map lifting: a continuous map of finite
    /// spaces is closed iff every point below an image point lifts below its
    /// source. Returns both verdicts for comparison.
    pub fn proper_exploratory(&self) -> (bool, bool) {
        let closed = (0..=self.source.full())
            .filter(|&m| self.source.is_closed(m))
            .all(|m| self.target.is_closed(self.image_mask(m)));
        let mut lifted = true;
        'outer: for y in 0..self.source.points() {
            for a in 0..self.target.points() {
                if self.target.le(a, self.map[y]) {
                    let lift = (0..self.source.points())
                        .any(|b| self.map[b] == a && self.source.le(b, y));
                    if !lift {
                        lifted = false;
                        break 'outer;
                    }
                }
            }
        }
        (closed, lifted)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EtaleError {
    #[error("the projection is not continuous")]
    NotContinuous,
    #[error("étale characterizations disagree; replay artifact: {artifact}")]
    TheoremMismatch { artifact: String },
}

/// Per-point certificate: an open neighborhood mapped homeomorphically onto
/// an open, with its inverse section.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EtaleCertificate {
    pub point: usize,
    pub nbhd: Mask,
    pub image: Mask,
    /// `(base point, lifted point)` pairs of the inverse section.
    pub section: Vec<(usize, usize)>,
}

/// A failed lift: the principal ultrafilter at `base_point` converges to the
/// image of `point` but has `lifts` (≠ 1 of them) above `point`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EtaleCounterexample {
    pub point: usize,
    pub base_point: usize,
    pub lifts: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EtaleVerdict {
    Etale(Vec<EtaleCertificate>),
    NotEtale(EtaleCounterexample),
}

impl EtaleVerdict {
    pub fn is_etale(&self) -> bool {
        matches!(self, EtaleVerdict::Etale(_))
    }
}

/// Lift scan: for each total point `e` and each base convergent `x ≽ p(e)`,
/// the convergents above `e` in the fiber of `x`. On finite carriers the
/// principal scan is complete, and principal lifts are automatically
/// principal over the base, so the unique-lift condition alone decides.
fn theorem_route(p: &SpaceMap) -> Result<(), EtaleCounterexample> {
    let ne = p.source.points();
    for e in 0..ne {
        for x in 0..p.target.points() {
            if !p.target.le(p.map[e], x) {
                continue;
            }
            let lifts: Vec<usize> = (0..ne)
                .filter(|&b| p.map[b] == x && p.source.le(e, b))
                .collect();
            if lifts.len() != 1 {
                return Err(EtaleCounterexample {
                    point: e,
                    base_point: x,
                    lifts,
                });
            }
        }
    }
    Ok(())
}

/// Textbook route: every point has an open neighborhood mapped
/// homeomorphically onto an open of the base.
fn direct_route(p: &SpaceMap) -> Option<Vec<EtaleCertificate>> {
    let mut certs = Vec::new();
    'point: for e in 0..p.source.points() {
        for &u in p.source.opens() {
            if u >> e & 1 == 0 {
                continue;
            }
            if let Some(cert) = local_homeo_certificate(p, e, u) {
                certs.push(cert);
                continue 'point;
            }
        }
        return None;
    }
    Some(certs)
}

fn local_homeo_certificate(p: &SpaceMap, e: usize, u: Mask) -> Option<EtaleCertificate> {
    let image = p.image_mask(u);
    if !p.target.is_open(image) {
        return None;
    }
    // Injectivity on u.
    let members: Vec<usize> = (0..p.source.points()).filter(|&x| u >> x & 1 == 1).collect();
    let mut section = Vec::new();
    for &x in &members {
        if members.iter().any(|&y| y != x && p.map[y] == p.map[x]) {
            return None;
        }
        section.push((p.map[x], x));
    }
    // Inverse continuity: images of relative opens are relatively open.
    for &w in p.source.opens() {
        let rel_image = p.image_mask(w & u);
        let relatively_open = p
            .target
            .opens()
            .iter()
            .any(|&o| o & image == rel_image);
        if !relatively_open {
            return None;
        }
    }
    section.sort_unstable();
    Some(EtaleCertificate {
        point: e,
        nbhd: u,
        image,
        section,
    })
}

/// Replays a certificate: the section must invert the projection on the
/// neighborhood and be continuous from the image subspace.
pub fn replay_certificate(p: &SpaceMap, cert: &EtaleCertificate) -> bool {
    if cert.nbhd >> cert.point & 1 == 0 || !p.source.is_open(cert.nbhd) {
        return false;
    }
    if p.image_mask(cert.nbhd) != cert.image || !p.target.is_open(cert.image) {
        return false;
    }
    cert.section.iter().all(|&(x, e)| {
        p.map[e] == x && cert.nbhd >> e & 1 == 1
    })
}

/// Replays a counterexample from the lift scan.
pub fn replay_counterexample(p: &SpaceMap, cx: &EtaleCounterexample) -> bool {
    if !p.target.le(p.map[cx.point], cx.base_point) {
        return false;
    }
    let lifts: Vec<usize> = (0..p.source.points())
        .filter(|&b| p.map[b] == cx.base_point && p.source.le(cx.point, b))
        .collect();
    lifts == cx.lifts && lifts.len() != 1
}

/// The étale checker: evaluates the lift characterization and the direct
/// local-homeomorphism definition; the two verdicts must agree.
pub fn etale_check(p: &SpaceMap) -> Result<EtaleVerdict, EtaleError> {
    if !p.is_continuous() {
        return Err(EtaleError::NotContinuous);
    }
    let by_lifts = theorem_route(p);
    let by_definition = direct_route(p);
    match (by_lifts, by_definition) {
        (Ok(()), Some(certs)) => Ok(EtaleVerdict::Etale(certs)),
        (Err(cx), None) => Ok(EtaleVerdict::NotEtale(cx)),
        (lifts, direct) => Err(EtaleError::TheoremMismatch {
            artifact: format!(
                "source points {} opens {:?}; target points {} opens {:?}; map {:?}; \
                 lift route {:?}; direct route {}",
                p.source.points(),
                p.source.opens(),
                p.target.points(),
                p.target.opens(),
                p.map,
                lifts,
                direct.is_some(),
            ),
        }),
    }
}

/// Verdict of the principal-over search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PrincipalOverVerdict {
    /// A large queryable set on which the map is injective.
    Holds(UpSet),
    Fails(String),
    Inconclusive,
}

/// Whether `nu` is concentrated on a set mapped injectively into the base:
/// principal values are witnessed by their point; affine maps are globally
/// injective; level-set maps into a finite base admit only finite injective
/// sets, which are never large for a non-principal value.
pub fn principal_over(nu: &Ultrafilter, p: &UpMap) -> PrincipalOverVerdict {
    if p.domain != nu.carrier() {
        return PrincipalOverVerdict::Fails("carrier mismatch".into());
    }
    if let Some(point) = nu.principal_point() {
        return PrincipalOverVerdict::Holds(UpSet::singleton(point));
    }
    match &p.rule {
        MapRule::Affine { .. } => PrincipalOverVerdict::Holds(nu.carrier().full_set()),
        MapRule::Levels(levels) => PrincipalOverVerdict::Fails(format!(
            "injective sets have at most {} elements and finite sets are never large \
             for a non-principal value",
            levels.len()
        )),
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FiberError {
    #[error("fibers are not uniformly bounded")]
    UnboundedFibers,
    #[error(transparent)]
    Product(#[from] ProductError),
}

/// The fiber family of a finite projection, as subsets of the total point
/// set indexed by the base.
pub fn fiber_family(p: &SpaceMap) -> BoundedFamily {
    let bound = p.source.points();
    let fiber_sets = (0..bound)
        .map(|e| UpSet::singleton(p.map[e] as u64))
        .collect();
    BoundedFamily::new(IndexSet::Fin(p.target.points()), bound, fiber_sets)
}

/// The fiber family of a queryable map over ℕ; affine maps have singleton
/// fibers, level-set maps have infinite fibers and are rejected.
pub fn fiber_family_of_map(p: &UpMap) -> Result<BoundedFamily, FiberError> {
    match &p.rule {
        MapRule::Affine { a, b } => Ok(BoundedFamily::new(
            p.codomain,
            1,
            vec![UpSet::full().affine_image(*a, *b)],
        )),
        MapRule::Levels(_) => Err(FiberError::UnboundedFibers),
    }
}

/// The ultraproduct of the fibers of `p` along `mu` on the base.
pub fn fiber_ultraproduct(
    p: &SpaceMap,
    mu: &Ultrafilter,
) -> Result<UltraproductSet, FiberError> {
    let fam = fiber_family(p);
    Ok(uprod_enumerate(mu, &fam)?)
}

/// Serializes a space in the document format consumed by the CLI.
pub fn space_to_doc(space: &FiniteSpace) -> String {
    let mut out = format!("points: {}\n", space.points());
    let opens: Vec<String> = space
        .opens()
        .iter()
        .map(|&m| {
            let members: Vec<String> = (0..space.points())
                .filter(|&x| m >> x & 1 == 1)
                .map(|x| x.to_string())
                .collect();
            format!("[{}]", members.join(","))
        })
        .collect();
    out.push_str(&format!("opens: [{}]\n", opens.join(",")));
    out
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DocError {
    #[error("malformed document: {0}")]
    Malformed(String),
    #[error(transparent)]
    Space(#[from] SpaceError),
}

/// Parses the `points:`/`opens:` document format.
pub fn space_from_doc(doc: &str) -> Result<FiniteSpace, DocError> {
    let mut points = None;
    let mut opens: Option<Vec<Mask>> = None;
    for line in doc.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("points:") {
            points = Some(
                rest.trim()
                    .parse::<usize>()
                    .map_err(|e| DocError::Malformed(e.to_string()))?,
            );
        } else if let Some(rest) = line.strip_prefix("opens:") {
            let rest = rest.trim();
            let inner = rest
                .strip_prefix('[')
                .and_then(|r| r.strip_suffix(']'))
                .ok_or_else(|| DocError::Malformed(format!("opens must be a list: {rest}")))?;
            let mut masks = Vec::new();
            let mut depth = 0usize;
            let mut current = String::new();
            for c in inner.chars() {
                match c {
                    '[' => {
                        depth += 1;
                        current.clear();
                    }
                    ']' => {
                        depth = depth.saturating_sub(1);
                        let mut mask = 0u32;
                        for part in current.split(',') {
                            let part = part.trim();
                            if part.is_empty() {
                                continue;
                            }
                            let x: usize = part
                                .parse()
                                .map_err(|e: std::num::ParseIntError| {
                                    DocError::Malformed(e.to_string())
                                })?;
                            mask |= 1 << x;
                        }
                        masks.push(mask);
                    }
                    _ if depth > 0 => current.push(c),
                    _ => {}
                }
            }
            opens = Some(masks);
        }
    }
    let points = points.ok_or_else(|| DocError::Malformed("missing points:".into()))?;
    let opens = opens.ok_or_else(|| DocError::Malformed("missing opens:".into()))?;
    Ok(FiniteSpace::validate(points, &opens)?)
}

/// Parses the `map: [images]` document format.
pub fn map_from_doc(
    doc: &str,
    source: FiniteSpace,
    target: FiniteSpace,
) -> Result<SpaceMap, DocError> {
    for line in doc.lines() {
        let line = line.trim();
        if let Some(rest) = line.strip_prefix("map:") {
            let inner = rest
                .trim()
                .strip_prefix('[')
                .and_then(|r| r.strip_suffix(']'))
                .ok_or_else(|| DocError::Malformed("map must be a list".into()))?;
            let images: Result<Vec<usize>, _> = inner
                .split(',')
                .filter(|p| !p.trim().is_empty())
                .map(|p| p.trim().parse::<usize>())
                .collect();
            let images = images.map_err(|e| DocError::Malformed(e.to_string()))?;
            if images.len() != source.points() || images.iter().any(|&y| y >= target.points()) {
                return Err(DocError::Malformed("map images out of range".into()));
            }
            return Ok(SpaceMap::new(source, target, images));
        }
    }
    Err(DocError::Malformed("missing map:".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validates_sierpinski_and_rejects_gaps() {
        assert!(FiniteSpace::validate(2, &[0b00, 0b10, 0b11]).is_ok());
        assert_eq!(
            FiniteSpace::validate(2, &[0b00, 0b01, 0b10]).unwrap_err(),
            SpaceError::MissingEmptyOrFull
        );
        assert!(matches!(
            FiniteSpace::validate(3, &[0b000, 0b001, 0b010, 0b111]).unwrap_err(),
            SpaceError::NotClosedUnderUnion { .. }
        ));
    }

    #[test]
    fn exactly_29_topologies_on_three_points() {
        // Independent oracle: brute-force filtering of all families containing
        // the empty and full sets.
        assert_eq!(all_topologies(3).len(), 29);
        assert_eq!(all_topologies(2).len(), 4);
        assert_eq!(all_topologies(4).len(), 355);
    }

    #[test]
    fn discrete_convergence_is_equality_on_a_large_set() {
        let d = FiniteSpace::discrete(2);
        let fam = PointFamily::new(
            Ultrafilter::factorial(),
            UpFamily::periodic(vec![], vec![0usize, 1]),
        );
        // The family sits at 0 on the evens, which are large: converges to 0
        // only.
        assert!(converges(&d, 0, &fam).unwrap());
        assert!(!converges(&d, 1, &fam).unwrap());
    }

    #[test]
    fn sierpinski_alternating_family_converges_to_both_points() {
        let s = FiniteSpace::sierpinski();
        // ⊤ on evens, ⊥ on odds; the pushforward is δ_⊤ and every open
        // containing ⊥ is the full set.
        let fam = PointFamily::new(
            Ultrafilter::factorial(),
            UpFamily::periodic(vec![], vec![1usize, 0]),
        );
        assert!(converges(&s, 0, &fam).unwrap());
        assert!(converges(&s, 1, &fam).unwrap());
        assert_eq!(fam.limit_point(2).unwrap(), 1);
    }

    #[test]
    fn codiscrete_absorbs_everything() {
        let c = FiniteSpace::codiscrete(3);
        let fam = PointFamily::new(
            Ultrafilter::factorial(),
            UpFamily::periodic(vec![], vec![2usize, 0, 1]),
        );
        for a in 0..3 {
            assert!(converges(&c, a, &fam).unwrap());
        }
    }

    #[test]
    fn relation_roundtrip_on_all_three_point_spaces() {
        for space in all_topologies(3) {
            let rel = space.specialization();
            assert_eq!(relation_validate(&rel), Ok(()));
            let back = topology_from_relation(&rel);
            assert_eq!(back, space, "roundtrip failed for {space:?}");
        }
    }

    #[test]
    fn relation_extremes() {
        let eq3: Vec<Vec<bool>> = (0..3).map(|a| (0..3).map(|b| a == b).collect()).collect();
        assert_eq!(topology_from_relation(&eq3), FiniteSpace::discrete(3));
        let total: Vec<Vec<bool>> = vec![vec![true; 3]; 3];
        assert_eq!(topology_from_relation(&total), FiniteSpace::codiscrete(3));
        let missing_refl = vec![vec![false]];
        assert_eq!(
            relation_validate(&missing_refl),
            Err(RelationViolation::NotReflexive { point: 0 })
        );
    }

    #[test]
    fn interior_and_closure_examples() {
        let s = FiniteSpace::sierpinski();
        assert_eq!(s.interior(s.full()), s.full());
        // closure({⊤}) = {⊥,⊤} since ⊥ ≼ δ_⊤.
        assert_eq!(s.closure(0b10), 0b11);
        for space in all_topologies(3) {
            for m in 0..=space.full() {
                assert_eq!(space.interior(m), space.interior_lattice(m));
            }
        }
    }

    #[test]
    fn limit_points_match_closure_of_limit() {
        let s = FiniteSpace::sierpinski();
        let fam = PointFamily::new(
            Ultrafilter::factorial(),
            UpFamily::periodic(vec![], vec![1usize, 0]),
        );
        // Pushforward is δ_⊤, whose limit set is cl({⊤}) = everything.
        assert_eq!(limit_points(&s, &fam).unwrap(), 0b11);
        let d = FiniteSpace::discrete(2);
        let fam_d = PointFamily::new(
            Ultrafilter::factorial(),
            UpFamily::periodic(vec![], vec![0usize, 1]),
        );
        assert_eq!(limit_points(&d, &fam_d).unwrap(), 0b01);
    }

    #[test]
    fn continuity_and_openness_examples() {
        let s = FiniteSpace::sierpinski();
        let id = SpaceMap::identity(&s);
        assert!(id.is_continuous());
        assert!(id.is_open_map());

        let collapse = SpaceMap::new(s.clone(), FiniteSpace::point(), vec![0, 0]);
        assert!(collapse.is_continuous());
        assert!(collapse.is_open_map());

        let bottom = SpaceMap::new(FiniteSpace::point(), s.clone(), vec![0]);
        assert!(bottom.is_continuous());
        assert!(!bottom.is_open_map());
    }

    #[test]
    fn etale_examples() {
        // Two-point discrete over the point: a local homeomorphism per point.
        let two = SpaceMap::new(FiniteSpace::discrete(2), FiniteSpace::point(), vec![0, 0]);
        let verdict = etale_check(&two).unwrap();
        assert!(verdict.is_etale());
        if let EtaleVerdict::Etale(certs) = &verdict {
            assert!(certs.iter().all(|c| replay_certificate(&two, c)));
        }

        // Sierpiński collapse: δ at the base has two lifts above ⊥.
        let s = FiniteSpace::sierpinski();
        let collapse = SpaceMap::new(s.clone(), FiniteSpace::point(), vec![0, 0]);
        match etale_check(&collapse).unwrap() {
            EtaleVerdict::NotEtale(cx) => {
                assert_eq!(cx.point, 0);
                assert_eq!(cx.lifts, vec![0, 1]);
                assert!(replay_counterexample(&collapse, &cx));
            }
            other => panic!("expected counterexample, got {other:?}"),
        }

        // Open-subspace inclusion {⊤} ↪ Sierpiński is étale.
        let incl = SpaceMap::new(FiniteSpace::point(), s, vec![1]);
        assert!(etale_check(&incl).unwrap().is_etale());
    }

    #[test]
    fn etale_cross_check_exhaustive_small() {
        for src in all_topologies(2) {
            for tgt in all_topologies(2) {
                for m0 in 0..2 {
                    for m1 in 0..2 {
                        let f = SpaceMap::new(src.clone(), tgt.clone(), vec![m0, m1]);
                        if f.is_continuous() {
                            // TheoremMismatch must never fire.
                            etale_check(&f).unwrap();
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn principal_over_cases() {
        let d = Ultrafilter::delta(4);
        assert!(matches!(
            principal_over(&d, &UpMap::modulo(IndexSet::Nat, 2)),
            PrincipalOverVerdict::Holds(_)
        ));
        let f = Ultrafilter::factorial();
        assert!(matches!(
            principal_over(&f, &UpMap::modulo(IndexSet::Nat, 2)),
            PrincipalOverVerdict::Fails(_)
        ));
        let doubled = crate::uf::uf_pushforward(&f, &UpMap::affine(2, 0)).unwrap();
        assert!(matches!(
            principal_over(&doubled, &UpMap::identity(IndexSet::Nat)),
            PrincipalOverVerdict::Holds(_)
        ));
    }

    #[test]
    fn fiber_ultraproduct_examples() {
        let e = FiniteSpace::discrete(3);
        let t = FiniteSpace::discrete(2);
        let p = SpaceMap::new(e, t, vec![0, 0, 1]);
        // μ = δ_0 picks out the fiber over 0.
        let at0 = fiber_ultraproduct(&p, &Ultrafilter::principal(IndexSet::Fin(2), 0)).unwrap();
        assert_eq!(at0.reps(), &[0, 1]);
        let at1 = fiber_ultraproduct(&p, &Ultrafilter::principal(IndexSet::Fin(2), 1)).unwrap();
        assert_eq!(at1.reps(), &[2]);
    }

    #[test]
    fn empty_fiber_on_large_set_is_an_error() {
        let e = FiniteSpace::discrete(1);
        let t = FiniteSpace::discrete(2);
        let p = SpaceMap::new(e, t, vec![0]);
        let err = fiber_ultraproduct(&p, &Ultrafilter::principal(IndexSet::Fin(2), 1)).unwrap_err();
        assert_eq!(
            err,
            FiberError::Product(ProductError::EmptyLargeFiber)
        );
    }

    #[test]
    fn proper_exploratory_agrees_on_small_spaces() {
        for src in all_topologies(2) {
            for tgt in all_topologies(2) {
                for m0 in 0..2 {
                    for m1 in 0..2 {
                        let f = SpaceMap::new(src.clone(), tgt.clone(), vec![m0, m1]);
                        if f.is_continuous() {
                            let (closed, lifted) = f.proper_exploratory();
                            assert_eq!(closed, lifted, "{f:?}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn doc_roundtrip() {
        let s = FiniteSpace::sierpinski();
        let doc = space_to_doc(&s);
        assert_eq!(space_from_doc(&doc).unwrap(), s);
        let map_doc = "map: [0,0]\n";
        let m = map_from_doc(map_doc, s.clone(), FiniteSpace::point()).unwrap();
        assert_eq!(m.map, vec![0, 0]);
    }
}
