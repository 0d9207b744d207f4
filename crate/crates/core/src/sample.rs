//! Seeded random generators and finite hom-set enumeration.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::category::{Category, DaggerCategory};
use crate::dual::Dual;

pub type Rng = ChaCha8Rng;

pub fn seeded(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random objects and morphisms of a dagger category.
pub trait Sampler {
    type Cat: DaggerCategory;

    fn category(&self) -> &Self::Cat;

    fn object(&self, rng: &mut Rng) -> <Self::Cat as Category>::Obj;

    /// A morphism out of `a` with a random codomain.
    fn morphism_from(
        &self,
        rng: &mut Rng,
        a: &<Self::Cat as Category>::Obj,
    ) -> <Self::Cat as Category>::Mor;

    /// A morphism into `b` with a random domain.
    fn morphism_into(
        &self,
        rng: &mut Rng,
        b: &<Self::Cat as Category>::Obj,
    ) -> <Self::Cat as Category>::Mor {
        let f = self.morphism_from(rng, b);
        self.category().dagger(&f)
    }

    fn coisometry_from(
        &self,
        rng: &mut Rng,
        a: &<Self::Cat as Category>::Obj,
    ) -> <Self::Cat as Category>::Mor;

    fn coisometry_into(
        &self,
        rng: &mut Rng,
        b: &<Self::Cat as Category>::Obj,
    ) -> <Self::Cat as Category>::Mor;

    fn isometry_from(
        &self,
        rng: &mut Rng,
        a: &<Self::Cat as Category>::Obj,
    ) -> <Self::Cat as Category>::Mor {
        let f = self.coisometry_into(rng, a);
        self.category().dagger(&f)
    }

    fn isometry_into(
        &self,
        rng: &mut Rng,
        b: &<Self::Cat as Category>::Obj,
    ) -> <Self::Cat as Category>::Mor {
        let f = self.coisometry_from(rng, b);
        self.category().dagger(&f)
    }
}

/// Samples the dual of a sampled category.
pub struct DualSampler<S: Sampler> {
    pub inner: S,
    dual: Dual<S::Cat>,
}

impl<S: Sampler> DualSampler<S>
where
    S::Cat: Clone,
{
    pub fn new(inner: S) -> Self {
        let dual = Dual { inner: inner.category().clone() };
        DualSampler { inner, dual }
    }
}

impl<S: Sampler> Sampler for DualSampler<S> {
    type Cat = Dual<S::Cat>;

    fn category(&self) -> &Dual<S::Cat> {
        &self.dual
    }

    fn object(&self, rng: &mut Rng) -> <S::Cat as Category>::Obj {
        self.inner.object(rng)
    }

    fn morphism_from(&self, rng: &mut Rng, a: &<S::Cat as Category>::Obj) -> <S::Cat as Category>::Mor {
        self.inner.morphism_into(rng, a)
    }

    fn morphism_into(&self, rng: &mut Rng, b: &<S::Cat as Category>::Obj) -> <S::Cat as Category>::Mor {
        self.inner.morphism_from(rng, b)
    }

    fn coisometry_from(&self, rng: &mut Rng, a: &<S::Cat as Category>::Obj) -> <S::Cat as Category>::Mor {
        self.inner.isometry_into(rng, a)
    }

    fn coisometry_into(&self, rng: &mut Rng, b: &<S::Cat as Category>::Obj) -> <S::Cat as Category>::Mor {
        self.inner.isometry_from(rng, b)
    }

    fn isometry_from(&self, rng: &mut Rng, a: &<S::Cat as Category>::Obj) -> <S::Cat as Category>::Mor {
        self.inner.coisometry_into(rng, a)
    }

    fn isometry_into(&self, rng: &mut Rng, b: &<S::Cat as Category>::Obj) -> <S::Cat as Category>::Mor {
        self.inner.coisometry_from(rng, b)
    }
}

/// Finite hom-sets, for checks that quantify over all morphisms of a small
/// size.
pub trait FiniteEnumeration: Category {
    /// Representative objects of size at most `max`, one per isomorphism
    /// class when the instance allows it.
    fn small_objects(&self, max: usize) -> Vec<Self::Obj>;

    fn hom(&self, a: &Self::Obj, b: &Self::Obj) -> Vec<Self::Mor>;

    fn homs_from(&self, a: &Self::Obj, max: usize) -> Vec<Self::Mor> {
        self.small_objects(max).iter().flat_map(|b| self.hom(a, b)).collect()
    }

    fn homs_into(&self, b: &Self::Obj, max: usize) -> Vec<Self::Mor> {
        self.small_objects(max).iter().flat_map(|a| self.hom(a, b)).collect()
    }
}

impl<C: FiniteEnumeration> FiniteEnumeration for Dual<C> {
    fn small_objects(&self, max: usize) -> Vec<C::Obj> {
        self.inner.small_objects(max)
    }

    fn hom(&self, a: &C::Obj, b: &C::Obj) -> Vec<C::Mor> {
        self.inner.hom(b, a)
    }

    fn homs_from(&self, a: &C::Obj, max: usize) -> Vec<C::Mor> {
        self.inner.homs_into(a, max)
    }

    fn homs_into(&self, b: &C::Obj, max: usize) -> Vec<C::Mor> {
        self.inner.homs_from(b, max)
    }
}

/// All functions from `{0..n}` to `{0..k}`, as vectors of images.
pub fn all_functions(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k == 0 {
        if n == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    let mut cur = vec![0usize; n];
    loop {
        out.push(cur.clone());
        let mut i = 0;
        loop {
            if i == n {
                return out;
            }
            cur[i] += 1;
            if cur[i] < k {
                break;
            }
            cur[i] = 0;
            i += 1;
        }
    }
}

pub fn all_surjections(n: usize, k: usize) -> Vec<Vec<usize>> {
    all_functions(n, k)
        .into_iter()
        .filter(|f| (0..k).all(|j| f.contains(&j)))
        .collect()
}

/// All subsets of `{0..n}` as bit masks.
pub fn all_subsets(n: usize) -> impl Iterator<Item = u64> {
    0..(1u64 << n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn function_counts() {
        assert_eq!(all_functions(3, 2).len(), 8);
        assert_eq!(all_functions(0, 0).len(), 1);
        assert_eq!(all_functions(2, 0).len(), 0);
        assert_eq!(all_surjections(4, 2).len(), 14);
        assert_eq!(all_surjections(4, 3).len(), 36);
        assert_eq!(all_surjections(3, 3).len(), 6);
    }
}
