//! The opposite of a dagger category.
//!
//! A morphism `f: A → B` of the wrapped category is a morphism `f: B → A` of
//! the dual, and `g ∘ f` in the dual is `f ∘ g` in the original. Codilators
//! become dilators and co-independent squares become independent squares,
//! so the partial-injection and matrix instances reach the generic relation
//! machinery through this adapter.

use crate::category::{
    Category, CoFactorization, Codilatory, Cospan, DaggerCategory, Dilatory, Factorization, Span,
    Square,
};
use crate::error::Result;
use crate::independence::{
    CoEpiRegular, CoIndependenceCategory, CoisometryCategory, EpiRegular, IndependenceCategory,
    IsometryCategory,
};

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Dual<C> {
    pub inner: C,
}

pub fn dualize<C>(cat: C) -> Dual<C> {
    Dual { inner: cat }
}

impl<C> Dual<C> {
    pub fn into_inner(self) -> C {
        self.inner
    }
}

fn flip_span<M: Clone>(s: &Span<M>) -> Cospan<M> {
    Cospan::new(s.left.clone(), s.right.clone())
}

fn flip_cospan<M: Clone>(c: &Cospan<M>) -> Span<M> {
    Span::new(c.left.clone(), c.right.clone())
}

impl<C: Category> Category for Dual<C> {
    type Obj = C::Obj;
    type Mor = C::Mor;

    fn dom(&self, f: &C::Mor) -> C::Obj {
        self.inner.cod(f)
    }

    fn cod(&self, f: &C::Mor) -> C::Obj {
        self.inner.dom(f)
    }

    fn identity(&self, x: &C::Obj) -> C::Mor {
        self.inner.identity(x)
    }

    fn compose(&self, g: &C::Mor, f: &C::Mor) -> Result<C::Mor> {
        self.inner.compose(f, g)
    }

    fn mor_eq(&self, f: &C::Mor, g: &C::Mor) -> bool {
        self.inner.mor_eq(f, g)
    }

    fn validate(&self, f: &C::Mor) -> Result<()> {
        self.inner.validate(f)
    }
}

impl<C: DaggerCategory> DaggerCategory for Dual<C> {
    fn dagger(&self, f: &C::Mor) -> C::Mor {
        self.inner.dagger(f)
    }
}

impl<C: Codilatory> Dilatory for Dual<C> {
    fn dilator(&self, r: &C::Mor) -> Result<Span<C::Mor>> {
        let c = self.inner.codilator(r)?;
        Ok(Span::new(c.right, c.left))
    }

    fn mediate(&self, dilator: &Span<C::Mor>, dilation: &Span<C::Mor>) -> Result<C::Mor> {
        self.inner.comediate(
            &Cospan::new(dilator.right.clone(), dilator.left.clone()),
            &Cospan::new(dilation.right.clone(), dilation.left.clone()),
        )
    }

    fn jointly_monic(&self, span: &Span<C::Mor>) -> bool {
        self.inner.jointly_epic(&flip_span(span))
    }
}

impl<C: Dilatory> Codilatory for Dual<C> {
    fn codilator(&self, r: &C::Mor) -> Result<Cospan<C::Mor>> {
        let s = self.inner.dilator(r)?;
        Ok(Cospan::new(s.right, s.left))
    }

    fn comediate(
        &self,
        codilator: &Cospan<C::Mor>,
        codilation: &Cospan<C::Mor>,
    ) -> Result<C::Mor> {
        self.inner.mediate(
            &Span::new(codilator.right.clone(), codilator.left.clone()),
            &Span::new(codilation.right.clone(), codilation.left.clone()),
        )
    }

    fn jointly_epic(&self, cospan: &Cospan<C::Mor>) -> bool {
        self.inner.jointly_monic(&flip_cospan(cospan))
    }
}

impl<C: CoIndependenceCategory> IndependenceCategory for Dual<C> {
    fn is_independent(&self, sq: &Square<C::Mor>) -> bool {
        self.inner
            .is_coindependent(&Span::new(sq.u.clone(), sq.v.clone()), &Cospan::new(sq.f.clone(), sq.g.clone()))
    }
}

impl<C: IndependenceCategory> CoIndependenceCategory for Dual<C> {
    fn is_coindependent(&self, span: &Span<C::Mor>, cospan: &Cospan<C::Mor>) -> bool {
        self.inner.is_independent(&Square::new(
            cospan.left.clone(),
            cospan.right.clone(),
            span.left.clone(),
            span.right.clone(),
        ))
    }
}

impl<C: CoEpiRegular> EpiRegular for Dual<C> {
    fn independent_pullback(&self, cospan: &Cospan<C::Mor>) -> Result<Span<C::Mor>> {
        let c = self.inner.coindependent_pushout(&flip_cospan(cospan))?;
        Ok(flip_cospan(&c))
    }

    fn factorize(&self, span: &Span<C::Mor>) -> Result<Factorization<C::Mor>> {
        let f = self.inner.cofactorize(&flip_span(span))?;
        Ok(Factorization { epi: f.mono, legs: flip_cospan(&f.legs) })
    }

    fn is_jointly_monic(&self, span: &Span<C::Mor>) -> bool {
        self.inner.is_jointly_epic(&flip_span(span))
    }

    fn factor_through(&self, monic: &Span<C::Mor>, span: &Span<C::Mor>) -> Option<C::Mor> {
        self.inner.cofactor_through(&flip_span(monic), &flip_span(span))
    }

    fn inverse(&self, f: &C::Mor) -> Option<C::Mor> {
        self.inner.inverse(f)
    }

    fn same_relation(&self, a: &Span<C::Mor>, b: &Span<C::Mor>) -> bool {
        self.inner.same_corelation(&flip_span(a), &flip_span(b))
    }

    fn relation_key(&self, span: &Span<C::Mor>) -> Option<String> {
        self.inner.corelation_key(&flip_span(span))
    }
}

impl<C: EpiRegular> CoEpiRegular for Dual<C> {
    fn coindependent_pushout(&self, span: &Span<C::Mor>) -> Result<Cospan<C::Mor>> {
        let s = self.inner.independent_pullback(&flip_span(span))?;
        Ok(flip_span(&s))
    }

    fn cofactorize(&self, cospan: &Cospan<C::Mor>) -> Result<CoFactorization<C::Mor>> {
        let f = self.inner.factorize(&flip_cospan(cospan))?;
        Ok(CoFactorization { mono: f.epi, legs: flip_span(&f.legs) })
    }

    fn is_jointly_epic(&self, cospan: &Cospan<C::Mor>) -> bool {
        self.inner.is_jointly_monic(&flip_cospan(cospan))
    }

    fn cofactor_through(
        &self,
        epic: &Cospan<C::Mor>,
        cospan: &Cospan<C::Mor>,
    ) -> Option<C::Mor> {
        self.inner.factor_through(&flip_cospan(epic), &flip_cospan(cospan))
    }

    fn inverse(&self, f: &C::Mor) -> Option<C::Mor> {
        self.inner.inverse(f)
    }

    fn same_corelation(&self, a: &Cospan<C::Mor>, b: &Cospan<C::Mor>) -> bool {
        self.inner.same_relation(&flip_cospan(a), &flip_cospan(b))
    }

    fn corelation_key(&self, cospan: &Cospan<C::Mor>) -> Option<String> {
        self.inner.relation_key(&flip_cospan(cospan))
    }
}

impl<C: IsometryCategory> CoisometryCategory for Dual<C> {
    type Envelope = Dual<C::Envelope>;

    fn envelope(&self) -> Dual<C::Envelope> {
        dualize(self.inner.envelope())
    }
}

impl<C: CoisometryCategory> IsometryCategory for Dual<C> {
    type Envelope = Dual<C::Envelope>;

    fn envelope(&self) -> Dual<C::Envelope> {
        dualize(self.inner.envelope())
    }
}
