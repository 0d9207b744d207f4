//! Independence structure on categories of coisometries (and, dually, of
//! isometries), together with the generic construction of that structure from
//! any dilatory dagger category.

use crate::category::{
    dilated, is_coisometry, is_isometry, Category, Cospan, DaggerCategory, Dilatory,
    Factorization, CoFactorization, Span, Square,
};
use crate::error::{CatError, Result};

pub trait IndependenceCategory: Category {
    /// The independence predicate on squares. Never true for a square that
    /// does not commute.
    fn is_independent(&self, sq: &Square<Self::Mor>) -> bool;
}

/// Independence categories with independent pullbacks, (strong epic, jointly
/// monic) factorisations of spans, and only strong epic morphisms.
pub trait EpiRegular: IndependenceCategory {
    fn independent_pullback(&self, cospan: &Cospan<Self::Mor>) -> Result<Span<Self::Mor>>;
    fn factorize(&self, span: &Span<Self::Mor>) -> Result<Factorization<Self::Mor>>;
    fn is_jointly_monic(&self, span: &Span<Self::Mor>) -> bool;
    /// The unique `d` with `monic.left ∘ d = span.left` and
    /// `monic.right ∘ d = span.right`, if it exists.
    fn factor_through(&self, monic: &Span<Self::Mor>, span: &Span<Self::Mor>) -> Option<Self::Mor>;
    fn inverse(&self, f: &Self::Mor) -> Option<Self::Mor>;
    /// Whether two jointly monic spans are isomorphic.
    fn same_relation(&self, a: &Span<Self::Mor>, b: &Span<Self::Mor>) -> bool;
    /// A normal form for the isomorphism class of a jointly monic span, when
    /// the instance has one.
    fn relation_key(&self, _span: &Span<Self::Mor>) -> Option<String> {
        None
    }
}

/// Co-independence: the square with span `(u, v)` on top-left and cospan
/// `(f, g)` on bottom-right, so that `f ∘ u = g ∘ v`.
pub trait CoIndependenceCategory: Category {
    fn is_coindependent(&self, span: &Span<Self::Mor>, cospan: &Cospan<Self::Mor>) -> bool;
}

/// The formal dual of [`EpiRegular`].
pub trait CoEpiRegular: CoIndependenceCategory {
    fn coindependent_pushout(&self, span: &Span<Self::Mor>) -> Result<Cospan<Self::Mor>>;
    fn cofactorize(&self, cospan: &Cospan<Self::Mor>) -> Result<CoFactorization<Self::Mor>>;
    fn is_jointly_epic(&self, cospan: &Cospan<Self::Mor>) -> bool;
    /// The unique `e` with `e ∘ epic.left = cospan.left` and
    /// `e ∘ epic.right = cospan.right`, if it exists.
    fn cofactor_through(
        &self,
        epic: &Cospan<Self::Mor>,
        cospan: &Cospan<Self::Mor>,
    ) -> Option<Self::Mor>;
    fn inverse(&self, f: &Self::Mor) -> Option<Self::Mor>;
    fn same_corelation(&self, a: &Cospan<Self::Mor>, b: &Cospan<Self::Mor>) -> bool;
    fn corelation_key(&self, _cospan: &Cospan<Self::Mor>) -> Option<String> {
        None
    }
}

/// An epi-regular category presented as the coisometries of a dilatory
/// dagger category.
pub trait CoisometryCategory: EpiRegular {
    type Envelope: Dilatory<Obj = Self::Obj, Mor = Self::Mor>;
    fn envelope(&self) -> Self::Envelope;
}

/// A co-epi-regular category presented as the isometries of a codilatory
/// dagger category.
pub trait IsometryCategory: CoEpiRegular {
    type Envelope: crate::category::Codilatory<Obj = Self::Obj, Mor = Self::Mor>;
    fn envelope(&self) -> Self::Envelope;
}

/// Independence of a square of coisometries in terms of the dagger:
/// `u ∘ f = v ∘ g` and `g ∘ f† = v† ∘ u`.
pub fn dagger_independent<D: DaggerCategory>(d: &D, sq: &Square<D::Mor>) -> bool {
    if !d.commutes(sq) {
        return false;
    }
    let lhs = d.compose(&sq.g, &d.dagger(&sq.f));
    let rhs = d.compose(&d.dagger(&sq.v), &sq.u);
    match (lhs, rhs) {
        (Ok(a), Ok(b)) => d.mor_eq(&a, &b),
        _ => false,
    }
}

/// Independence of a commuting square of coisometries through its diagonal
/// `h`: `h† ∘ h = f† ∘ f ∘ g† ∘ g`.
pub fn diagonal_independent<D: DaggerCategory>(d: &D, sq: &Square<D::Mor>) -> Result<bool> {
    if !d.commutes(sq) {
        return Ok(false);
    }
    let h = d.compose(&sq.u, &sq.f)?;
    let lhs = d.compose(&d.dagger(&h), &h)?;
    let ff = d.compose(&d.dagger(&sq.f), &sq.f)?;
    let gg = d.compose(&d.dagger(&sq.g), &sq.g)?;
    let rhs = d.compose(&ff, &gg)?;
    Ok(d.mor_eq(&lhs, &rhs))
}

/// Joint monicity of a span of coisometries decided through the dilator of
/// `m2 ∘ m1†`: the span is jointly monic exactly when its mediator into that
/// dilator is unitary.
pub fn jointly_monic_via_dilator<D: Dilatory>(d: &D, span: &Span<D::Mor>) -> Result<bool> {
    d.check_span(span)?;
    let r = dilated(d, span)?;
    let dil = d.dilator(&r)?;
    let m = d.mediate(&dil, span)?;
    is_isometry(d, &m)
}

/// The coisometries of a dilatory dagger category with the independence
/// structure induced by the dagger.
#[derive(Clone, Debug)]
pub struct Coisom<D> {
    pub inner: D,
}

impl<D> Coisom<D> {
    pub fn new(inner: D) -> Self {
        Coisom { inner }
    }
}

impl<D: Dilatory> Category for Coisom<D> {
    type Obj = D::Obj;
    type Mor = D::Mor;

    fn dom(&self, f: &D::Mor) -> D::Obj {
        self.inner.dom(f)
    }

    fn cod(&self, f: &D::Mor) -> D::Obj {
        self.inner.cod(f)
    }

    fn identity(&self, x: &D::Obj) -> D::Mor {
        self.inner.identity(x)
    }

    fn compose(&self, g: &D::Mor, f: &D::Mor) -> Result<D::Mor> {
        self.inner.compose(g, f)
    }

    fn mor_eq(&self, f: &D::Mor, g: &D::Mor) -> bool {
        self.inner.mor_eq(f, g)
    }

    fn validate(&self, f: &D::Mor) -> Result<()> {
        if is_coisometry(&self.inner, f)? {
            Ok(())
        } else {
            Err(CatError::invalid("morphism is not a coisometry"))
        }
    }
}

impl<D: Dilatory> IndependenceCategory for Coisom<D> {
    fn is_independent(&self, sq: &Square<D::Mor>) -> bool {
        dagger_independent(&self.inner, sq)
    }
}

impl<D: Dilatory> EpiRegular for Coisom<D> {
    fn independent_pullback(&self, cospan: &Cospan<D::Mor>) -> Result<Span<D::Mor>> {
        self.check_cospan(cospan)?;
        let d = &self.inner;
        let r = d.compose(&d.dagger(&cospan.right), &cospan.left)?;
        d.dilator(&r)
    }

    fn factorize(&self, span: &Span<D::Mor>) -> Result<Factorization<D::Mor>> {
        self.check_span(span)?;
        let d = &self.inner;
        let legs = d.dilator(&dilated(d, span)?)?;
        let epi = d.mediate(&legs, span)?;
        Ok(Factorization { epi, legs })
    }

    fn is_jointly_monic(&self, span: &Span<D::Mor>) -> bool {
        jointly_monic_via_dilator(&self.inner, span).unwrap_or(false)
    }

    fn factor_through(&self, monic: &Span<D::Mor>, span: &Span<D::Mor>) -> Option<D::Mor> {
        let d = &self.inner;
        let a = dilated(d, monic).ok()?;
        let b = dilated(d, span).ok()?;
        if !d.mor_eq(&a, &b) {
            return None;
        }
        let e = d.mediate(monic, span).ok()?;
        let left = d.compose(&monic.left, &e).ok()?;
        let right = d.compose(&monic.right, &e).ok()?;
        (d.mor_eq(&left, &span.left) && d.mor_eq(&right, &span.right)).then_some(e)
    }

    fn inverse(&self, f: &D::Mor) -> Option<D::Mor> {
        match is_isometry(&self.inner, f) {
            Ok(true) => Some(self.inner.dagger(f)),
            _ => None,
        }
    }

    fn same_relation(&self, a: &Span<D::Mor>, b: &Span<D::Mor>) -> bool {
        let d = &self.inner;
        if d.cod(&a.left) != d.cod(&b.left) || d.cod(&a.right) != d.cod(&b.right) {
            return false;
        }
        match (dilated(d, a), dilated(d, b)) {
            (Ok(x), Ok(y)) => d.mor_eq(&x, &y),
            _ => false,
        }
    }
}

impl<D: Dilatory + Clone> CoisometryCategory for Coisom<D> {
    type Envelope = D;

    fn envelope(&self) -> D {
        self.inner.clone()
    }
}
