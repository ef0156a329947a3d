//! Executable checkers for a decidable fragment of the ultrafilter calculus:
//! ultimately periodic largeness oracles, ultraproducts of bounded families,
//! finite-space ultraconvergence, the étale characterization, virtual
//! ultracategory instances, ultrasheaf reconstruction, and descent along
//! finite groupoids.

pub mod carrier;
pub mod cat;
pub mod descent;
pub mod family;
pub mod product;
pub mod report;
pub mod sheaf;
pub mod space;
pub mod suites;
pub mod uf;
pub mod upset;
pub mod vult;

pub use carrier::{IndexSet, MapRule, UpMap};
pub use family::UpFamily;
pub use uf::{
    uf_arrow_check, uf_equiv, uf_iso, uf_limit, uf_pushforward, uf_sum, uf_sum_diagonal,
    UfError, UfIso, Ultrafilter,
};
pub use upset::{Classification, UpSet};

#[cfg(test)]
pub(crate) mod testutil {
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use crate::carrier::{IndexSet, UpMap};
    use crate::family::UpFamily;
    use crate::uf::{uf_pushforward, uf_sum, Ultrafilter};
    use crate::upset::{random_upset, UpSet};

    pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    /// One value of each constructor shape, per the law-suite battery.
    pub fn ultrafilter_pool() -> Vec<Ultrafilter> {
        let push = uf_pushforward(&Ultrafilter::factorial(), &UpMap::affine(2, 3)).unwrap();
        let sum = uf_sum(
            &Ultrafilter::factorial(),
            &UpFamily::periodic(
                vec![],
                vec![
                    Ultrafilter::principal(IndexSet::Fin(2), 0),
                    Ultrafilter::principal(IndexSet::Fin(2), 1),
                ],
            ),
        )
        .unwrap();
        vec![
            Ultrafilter::delta(0),
            Ultrafilter::delta(7),
            Ultrafilter::factorial(),
            push,
            sum,
        ]
    }

    pub fn random_query(rng: &mut impl Rng, carrier: IndexSet) -> UpSet {
        match carrier {
            IndexSet::Nat => random_upset(rng, 5, 6),
            IndexSet::Fin(n) => {
                let members: Vec<u64> = (0..n as u64).filter(|_| rng.gen()).collect();
                UpSet::finite(&members)
            }
        }
    }

    /// A random periodic choice function into `Fin(bound)` over ℕ.
    pub fn random_element(rng: &mut impl Rng, bound: usize) -> crate::product::UpElement {
        let plen = rng.gen_range(0..3);
        let qlen = rng.gen_range(1..5);
        let prefix: Vec<usize> = (0..plen).map(|_| rng.gen_range(0..bound)).collect();
        let pattern: Vec<usize> = (0..qlen).map(|_| rng.gen_range(0..bound)).collect();
        crate::product::UpElement::new(bound, UpFamily::periodic(prefix, pattern))
    }

    /// A random choice function over a finite carrier.
    pub fn random_fin_element(
        rng: &mut impl Rng,
        n: usize,
        bound: usize,
    ) -> crate::product::UpElement {
        let table: Vec<usize> = (0..n).map(|_| rng.gen_range(0..bound)).collect();
        crate::product::UpElement::new(bound, UpFamily::from_table(table))
    }

    /// A random map `Fin(n) → Fin(m)` given pointwise.
    pub fn random_fin_map(rng: &mut impl Rng, n: usize, m: usize) -> UpMap {
        let table: Vec<u64> = (0..n).map(|_| rng.gen_range(0..m as u64)).collect();
        UpMap::from_table(&table, m)
    }
}
