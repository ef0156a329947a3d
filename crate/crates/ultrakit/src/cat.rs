//! Finite categories with explicit composition tables.

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CatError {
    #[error("identity of object {object} is malformed")]
    BadIdentity { object: usize },
    #[error("composite of {g} after {f} is missing or mistyped")]
    BadComposite { g: usize, f: usize },
    #[error("unit law fails at arrow {arrow}")]
    UnitLaw { arrow: usize },
    #[error("associativity fails at ({h}, {g}, {f})")]
    Associativity { h: usize, g: usize, f: usize },
    #[error("arrow {arrow} endpoints out of range")]
    OutOfRange { arrow: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Arrow {
    pub src: usize,
    pub dst: usize,
}

/// A finite category: objects `0..n`, a global arrow list containing the
/// identities, and a composition table over composable pairs. Category laws
/// are checked at construction.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiniteCategory {
    objects: usize,
    arrows: Vec<Arrow>,
    identity: Vec<usize>,
    comp: Vec<Vec<Option<usize>>>,
}

impl FiniteCategory {
    pub fn new(
        objects: usize,
        arrows: Vec<Arrow>,
        identity: Vec<usize>,
        comp: Vec<Vec<Option<usize>>>,
    ) -> Result<FiniteCategory, CatError> {
        let cat = FiniteCategory {
            objects,
            arrows,
            identity,
            comp,
        };
        cat.check()?;
        Ok(cat)
    }

    fn check(&self) -> Result<(), CatError> {
        let m = self.arrows.len();
        for (i, a) in self.arrows.iter().enumerate() {
            if a.src >= self.objects || a.dst >= self.objects {
                return Err(CatError::OutOfRange { arrow: i });
            }
        }
        if self.identity.len() != self.objects {
            return Err(CatError::BadIdentity {
                object: self.identity.len(),
            });
        }
        for (o, &i) in self.identity.iter().enumerate() {
            if i >= m || self.arrows[i].src != o || self.arrows[i].dst != o {
                return Err(CatError::BadIdentity { object: o });
            }
        }
        if self.comp.len() != m || self.comp.iter().any(|row| row.len() != m) {
            return Err(CatError::BadComposite { g: m, f: m });
        }
        for g in 0..m {
            for f in 0..m {
                let composable = self.arrows[f].dst == self.arrows[g].src;
                match self.comp[g][f] {
                    Some(h) => {
                        if !composable
                            || h >= m
                            || self.arrows[h].src != self.arrows[f].src
                            || self.arrows[h].dst != self.arrows[g].dst
                        {
                            return Err(CatError::BadComposite { g, f });
                        }
                    }
                    None => {
                        if composable {
                            return Err(CatError::BadComposite { g, f });
                        }
                    }
                }
            }
        }
        for f in 0..m {
            let lid = self.identity[self.arrows[f].dst];
            let rid = self.identity[self.arrows[f].src];
            if self.comp[lid][f] != Some(f) || self.comp[f][rid] != Some(f) {
                return Err(CatError::UnitLaw { arrow: f });
            }
        }
        for h in 0..m {
            for g in 0..m {
                if self.arrows[g].dst != self.arrows[h].src {
                    continue;
                }
                for f in 0..m {
                    if self.arrows[f].dst != self.arrows[g].src {
                        continue;
                    }
                    let hg = self.comp[h][g].unwrap();
                    let gf = self.comp[g][f].unwrap();
                    if self.comp[h][gf] != self.comp[hg][f] {
                        return Err(CatError::Associativity { h, g, f });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn objects(&self) -> usize {
        self.objects
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn arrow_count(&self) -> usize {
        self.arrows.len()
    }

    pub fn identity(&self, o: usize) -> usize {
        self.identity[o]
    }

    pub fn is_identity(&self, f: usize) -> bool {
        self.identity[self.arrows[f].src] == f
    }

    pub fn src(&self, f: usize) -> usize {
        self.arrows[f].src
    }

    pub fn dst(&self, f: usize) -> usize {
        self.arrows[f].dst
    }

    /// `g ∘ f` when composable.
    pub fn compose(&self, g: usize, f: usize) -> Option<usize> {
        self.comp[g][f]
    }

    pub fn hom(&self, a: usize, b: usize) -> Vec<usize> {
        (0..self.arrows.len())
            .filter(|&f| self.arrows[f].src == a && self.arrows[f].dst == b)
            .collect()
    }

    pub fn is_iso_arrow(&self, f: usize) -> bool {
        let a = self.arrows[f].src;
        let b = self.arrows[f].dst;
        self.hom(b, a).iter().any(|&g| {
            self.comp[g][f] == Some(self.identity[a]) && self.comp[f][g] == Some(self.identity[b])
        })
    }

    pub fn terminal() -> FiniteCategory {
        FiniteCategory::new(
            1,
            vec![Arrow { src: 0, dst: 0 }],
            vec![0],
            vec![vec![Some(0)]],
        )
        .unwrap()
    }

    pub fn discrete(n: usize) -> FiniteCategory {
        let arrows: Vec<Arrow> = (0..n).map(|o| Arrow { src: o, dst: o }).collect();
        let comp = (0..n)
            .map(|g| (0..n).map(|f| if f == g { Some(f) } else { None }).collect())
            .collect();
        FiniteCategory::new(n, arrows, (0..n).collect(), comp).unwrap()
    }

    /// The walking arrow `0 → 1`.
    pub fn walking_arrow() -> FiniteCategory {
        FiniteCategory::new(
            2,
            vec![
                Arrow { src: 0, dst: 0 },
                Arrow { src: 1, dst: 1 },
                Arrow { src: 0, dst: 1 },
            ],
            vec![0, 1],
            vec![
                vec![Some(0), None, None],
                vec![None, Some(1), Some(2)],
                vec![Some(2), None, None],
            ],
        )
        .unwrap()
    }

    /// The posetal category of a preorder.
    pub fn from_preorder(le: &[Vec<bool>]) -> FiniteCategory {
        let n = le.len();
        let mut arrows = Vec::new();
        let mut identity = vec![0; n];
        for a in 0..n {
            for b in 0..n {
                if le[a][b] {
                    if a == b {
                        identity[a] = arrows.len();
                    }
                    arrows.push(Arrow { src: a, dst: b });
                }
            }
        }
        let m = arrows.len();
        let mut comp = vec![vec![None; m]; m];
        for g in 0..m {
            for f in 0..m {
                if arrows[f].dst == arrows[g].src {
                    let composite = arrows
                        .iter()
                        .position(|h| h.src == arrows[f].src && h.dst == arrows[g].dst)
                        .expect("preorders are transitive");
                    comp[g][f] = Some(composite);
                }
            }
        }
        FiniteCategory::new(n, arrows, identity, comp).unwrap()
    }

    /// The group ℤ/2 as a one-object category.
    pub fn z2() -> FiniteCategory {
        FiniteCategory::new(
            1,
            vec![Arrow { src: 0, dst: 0 }, Arrow { src: 0, dst: 0 }],
            vec![0],
            vec![vec![Some(0), Some(1)], vec![Some(1), Some(0)]],
        )
        .unwrap()
    }

    /// Brute-force isomorphism of finite categories.
    pub fn is_isomorphic(&self, other: &FiniteCategory) -> bool {
        if self.objects != other.objects || self.arrows.len() != other.arrows.len() {
            return false;
        }
        let mut perm: Vec<usize> = (0..self.objects).collect();
        permute(&mut perm, 0, &mut |sigma| {
            self.iso_on_objects(other, sigma)
        })
    }

    fn iso_on_objects(&self, other: &FiniteCategory, sigma: &[usize]) -> bool {
        // Match arrows hom-set by hom-set under the object bijection.
        let mut assignment: Vec<Option<usize>> = vec![None; self.arrows.len()];
        for a in 0..self.objects {
            for b in 0..self.objects {
                if self.hom(a, b).len() != other.hom(sigma[a], sigma[b]).len() {
                    return false;
                }
            }
        }
        self.extend_arrow_iso(other, sigma, &mut assignment, 0)
    }

    fn extend_arrow_iso(
        &self,
        other: &FiniteCategory,
        sigma: &[usize],
        assignment: &mut Vec<Option<usize>>,
        f: usize,
    ) -> bool {
        if f == self.arrows.len() {
            // All arrows matched; check functoriality.
            for g in 0..self.arrows.len() {
                for h in 0..self.arrows.len() {
                    if let Some(c) = self.comp[g][h] {
                        let og = assignment[g].unwrap();
                        let oh = assignment[h].unwrap();
                        if other.comp[og][oh] != Some(assignment[c].unwrap()) {
                            return false;
                        }
                    }
                }
            }
            return true;
        }
        let src = sigma[self.arrows[f].src];
        let dst = sigma[self.arrows[f].dst];
        for cand in other.hom(src, dst) {
            if assignment.contains(&Some(cand)) {
                continue;
            }
            if self.is_identity(f) != other.is_identity(cand) {
                continue;
            }
            assignment[f] = Some(cand);
            if self.extend_arrow_iso(other, sigma, assignment, f + 1) {
                return true;
            }
            assignment[f] = None;
        }
        false
    }
}

fn permute(perm: &mut Vec<usize>, k: usize, check: &mut impl FnMut(&[usize]) -> bool) -> bool {
    if k == perm.len() {
        return check(perm);
    }
    for i in k..perm.len() {
        perm.swap(k, i);
        if permute(perm, k + 1, check) {
            perm.swap(k, i);
            return true;
        }
        perm.swap(k, i);
    }
    false
}

/// A functor between finite categories, given pointwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatFunctor {
    pub ob_map: Vec<usize>,
    pub arrow_map: Vec<usize>,
}

impl CatFunctor {
    pub fn validate(&self, dom: &FiniteCategory, cod: &FiniteCategory) -> bool {
        if self.ob_map.len() != dom.objects() || self.arrow_map.len() != dom.arrow_count() {
            return false;
        }
        if self.ob_map.iter().any(|&o| o >= cod.objects())
            || self.arrow_map.iter().any(|&f| f >= cod.arrow_count())
        {
            return false;
        }
        for f in 0..dom.arrow_count() {
            let ff = self.arrow_map[f];
            if cod.src(ff) != self.ob_map[dom.src(f)] || cod.dst(ff) != self.ob_map[dom.dst(f)] {
                return false;
            }
        }
        for o in 0..dom.objects() {
            if self.arrow_map[dom.identity(o)] != cod.identity(self.ob_map[o]) {
                return false;
            }
        }
        for g in 0..dom.arrow_count() {
            for f in 0..dom.arrow_count() {
                if let Some(c) = dom.compose(g, f) {
                    if cod.compose(self.arrow_map[g], self.arrow_map[f])
                        != Some(self.arrow_map[c])
                    {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// All categories with at most `max_objects` objects and at most
/// `max_parallel` parallel arrows per hom-set, by exhaustive table filtering.
pub fn enumerate_small_categories(max_objects: usize, max_parallel: usize) -> Vec<FiniteCategory> {
    assert!(max_objects <= 2 && max_parallel <= 2, "desk scale only");
    let mut out = Vec::new();
    for objects in 1..=max_objects {
        let pairs: Vec<(usize, usize)> = (0..objects)
            .flat_map(|a| (0..objects).map(move |b| (a, b)))
            .collect();
        let mut sizes = vec![0usize; pairs.len()];
        loop {
            if pairs
                .iter()
                .zip(&sizes)
                .all(|(&(a, b), &s)| if a == b { s >= 1 } else { true })
            {
                enumerate_tables(objects, &pairs, &sizes, &mut out);
            }
            // Next size profile.
            let mut i = 0;
            loop {
                if i == sizes.len() {
                    break;
                }
                sizes[i] += 1;
                if sizes[i] <= max_parallel {
                    break;
                }
                sizes[i] = 0;
                i += 1;
            }
            if i == sizes.len() {
                break;
            }
        }
    }
    out
}

fn enumerate_tables(
    objects: usize,
    pairs: &[(usize, usize)],
    sizes: &[usize],
    out: &mut Vec<FiniteCategory>,
) {
    let mut arrows = Vec::new();
    let mut identity = vec![usize::MAX; objects];
    for (&(a, b), &s) in pairs.iter().zip(sizes) {
        for k in 0..s {
            if a == b && k == 0 {
                identity[a] = arrows.len();
            }
            arrows.push(Arrow { src: a, dst: b });
        }
    }
    let m = arrows.len();
    let is_id = |f: usize| identity[arrows[f].src] == f && arrows[f].src == arrows[f].dst;
    // Unit laws force every entry with an identity on either side.
    let mut comp = vec![vec![None; m]; m];
    let mut free = Vec::new();
    for g in 0..m {
        for f in 0..m {
            if arrows[f].dst != arrows[g].src {
                continue;
            }
            if is_id(f) {
                comp[g][f] = Some(g);
            } else if is_id(g) {
                comp[g][f] = Some(f);
            } else {
                free.push((g, f));
            }
        }
    }
    // One candidate list per free slot; a slot with no candidates kills the
    // profile outright (cannot happen: hom(a, c) always contains a composite
    // target only if nonempty, so emptiness just prunes).
    let targets: Vec<Vec<usize>> = free
        .iter()
        .map(|&(g, f)| {
            (0..m)
                .filter(|&h| arrows[h].src == arrows[f].src && arrows[h].dst == arrows[g].dst)
                .collect()
        })
        .collect();
    if targets.iter().any(|t| t.is_empty()) {
        return;
    }
    fn fill(
        slot: usize,
        free: &[(usize, usize)],
        targets: &[Vec<usize>],
        objects: usize,
        arrows: &[Arrow],
        identity: &[usize],
        comp: &mut Vec<Vec<Option<usize>>>,
        out: &mut Vec<FiniteCategory>,
    ) {
        if slot == free.len() {
            if let Ok(cat) = FiniteCategory::new(
                objects,
                arrows.to_vec(),
                identity.to_vec(),
                comp.clone(),
            ) {
                out.push(cat);
            }
            return;
        }
        let (g, f) = free[slot];
        for &h in &targets[slot] {
            comp[g][f] = Some(h);
            // Prune on associativity violations among already-filled entries.
            let mut consistent = true;
            'assoc: for x in 0..arrows.len() {
                for y in 0..arrows.len() {
                    if arrows[y].dst != arrows[x].src {
                        continue;
                    }
                    for z in 0..arrows.len() {
                        if arrows[z].dst != arrows[y].src {
                            continue;
                        }
                        let (Some(xy), Some(yz)) = (comp[x][y], comp[y][z]) else {
                            continue;
                        };
                        let (Some(left), Some(right)) = (comp[x][yz], comp[xy][z]) else {
                            continue;
                        };
                        if left != right {
                            consistent = false;
                            break 'assoc;
                        }
                    }
                }
            }
            if consistent {
                fill(slot + 1, free, targets, objects, arrows, identity, comp, out);
            }
            comp[g][f] = None;
        }
    }
    fill(
        0, &free, &targets, objects, &arrows, &identity, &mut comp, out,
    );
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn walking_arrow_and_z2_validate() {
        FiniteCategory::walking_arrow();
        FiniteCategory::z2();
        FiniteCategory::terminal();
        FiniteCategory::discrete(3);
    }

    #[test]
    fn rejects_broken_associativity() {
        // One object, two non-identity endos cannot compose arbitrarily.
        let arrows = vec![
            Arrow { src: 0, dst: 0 },
            Arrow { src: 0, dst: 0 },
            Arrow { src: 0, dst: 0 },
        ];
        // e∘e = f, f∘e = id: associativity (e e) e fails for most fillings.
        let comp = vec![
            vec![Some(0), Some(1), Some(2)],
            vec![Some(1), Some(2), Some(0)],
            vec![Some(2), Some(1), Some(1)],
        ];
        assert!(FiniteCategory::new(1, arrows, vec![0], comp).is_err());
    }

    #[test]
    fn small_enumeration_contains_known_shapes() {
        let cats = enumerate_small_categories(2, 2);
        assert!(cats.iter().any(|c| c.is_isomorphic(&FiniteCategory::terminal())));
        assert!(cats.iter().any(|c| c.is_isomorphic(&FiniteCategory::z2())));
        assert!(cats
            .iter()
            .any(|c| c.is_isomorphic(&FiniteCategory::walking_arrow())));
        assert!(cats.iter().any(|c| c.is_isomorphic(&FiniteCategory::discrete(2))));
        // Every enumerated table passed the law check at construction.
        for c in &cats {
            assert!(c.check().is_ok());
        }
    }

    #[test]
    fn iso_detects_and_separates() {
        let z2 = FiniteCategory::z2();
        // The idempotent monoid on one generator.
        let idem = FiniteCategory::new(
            1,
            vec![Arrow { src: 0, dst: 0 }, Arrow { src: 0, dst: 0 }],
            vec![0],
            vec![vec![Some(0), Some(1)], vec![Some(1), Some(1)]],
        )
        .unwrap();
        assert!(!z2.is_isomorphic(&idem));
        assert!(z2.is_isomorphic(&FiniteCategory::z2()));
    }

    #[test]
    fn functor_validation() {
        let arrow = FiniteCategory::walking_arrow();
        let term = FiniteCategory::terminal();
        let collapse = CatFunctor {
            ob_map: vec![0, 0],
            arrow_map: vec![0, 0, 0],
        };
        assert!(collapse.validate(&arrow, &term));
        let broken = CatFunctor {
            ob_map: vec![0, 0],
            arrow_map: vec![0, 0, 1],
        };
        assert!(!broken.validate(&arrow, &term));
    }
}

/// Serializes a category in the document format consumed by the CLI:
/// identities are implicit (global ids `0..objects`), listed arrows follow.
pub fn cat_to_doc(cat: &FiniteCategory) -> String {
    let mut out = format!("objects: {}\n", cat.objects());
    let listed: Vec<usize> = (0..cat.arrow_count())
        .filter(|&f| !cat.is_identity(f))
        .collect();
    let arrows: Vec<String> = listed
        .iter()
        .map(|&f| format!("[{},{}]", cat.src(f), cat.dst(f)))
        .collect();
    out.push_str(&format!("arrows: [{}]\n", arrows.join(",")));
    // Global ids in the document: identities first, listed arrows after.
    let doc_id = |f: usize| {
        if cat.is_identity(f) {
            cat.src(f)
        } else {
            cat.objects() + listed.iter().position(|&g| g == f).unwrap()
        }
    };
    let mut rows = Vec::new();
    for g in 0..cat.arrow_count() {
        for f in 0..cat.arrow_count() {
            if cat.is_identity(f) || cat.is_identity(g) {
                continue;
            }
            if let Some(c) = cat.compose(g, f) {
                rows.push(format!("[{},{},{}]", doc_id(g), doc_id(f), doc_id(c)));
            }
        }
    }
    out.push_str(&format!("compose: [{}]\n", rows.join(",")));
    out
}

/// Parses the category document format. Global arrow ids: `0..objects` are
/// the identities, listed arrows continue from `objects`.
pub fn cat_from_doc(doc: &str) -> Result<FiniteCategory, String> {
    let mut objects = None;
    let mut listed: Vec<(usize, usize)> = Vec::new();
    let mut rows: Vec<(usize, usize, usize)> = Vec::new();
    for line in doc.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("objects:") {
            objects = Some(rest.trim().parse::<usize>().map_err(|e| e.to_string())?);
        } else if let Some(rest) = line.strip_prefix("arrows:") {
            for pair in parse_nested_lists(rest)? {
                if pair.len() != 2 {
                    return Err("arrows entries are [src,dst] pairs".into());
                }
                listed.push((pair[0], pair[1]));
            }
        } else if let Some(rest) = line.strip_prefix("compose:") {
            for row in parse_nested_lists(rest)? {
                if row.len() != 3 {
                    return Err("compose rows are [g,f,composite]".into());
                }
                rows.push((row[0], row[1], row[2]));
            }
        }
    }
    let n = objects.ok_or("missing objects:")?;
    let mut arrows: Vec<Arrow> = (0..n).map(|o| Arrow { src: o, dst: o }).collect();
    arrows.extend(listed.iter().map(|&(src, dst)| Arrow { src, dst }));
    let m = arrows.len();
    let mut comp = vec![vec![None; m]; m];
    let is_id = |f: usize| f < n;
    for g in 0..m {
        for f in 0..m {
            if arrows[f].dst != arrows[g].src {
                continue;
            }
            if is_id(f) {
                comp[g][f] = Some(g);
            } else if is_id(g) {
                comp[g][f] = Some(f);
            }
        }
    }
    for (g, f, c) in rows {
        if g >= m || f >= m || c >= m {
            return Err("compose row indices out of range".into());
        }
        comp[g][f] = Some(c);
    }
    FiniteCategory::new(n, arrows, (0..n).collect(), comp).map_err(|e| e.to_string())
}

fn parse_nested_lists(segment: &str) -> Result<Vec<Vec<usize>>, String> {
    let inner = segment
        .trim()
        .strip_prefix('[')
        .and_then(|r| r.strip_suffix(']'))
        .ok_or("expected a bracketed list")?;
    let mut out = Vec::new();
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
                let row: Result<Vec<usize>, _> = current
                    .split(',')
                    .filter(|p| !p.trim().is_empty())
                    .map(|p| p.trim().parse::<usize>())
                    .collect();
                out.push(row.map_err(|e| e.to_string())?);
            }
            _ if depth > 0 => current.push(c),
            _ => {}
        }
    }
    Ok(out)
}
