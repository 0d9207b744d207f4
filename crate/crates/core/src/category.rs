//! Dagger categories and their dilatory structure.
//!
//! Every instance in this crate implements [`Category`] and [`DaggerCategory`].
//! Instances whose morphisms have terminal dilations implement [`Dilatory`];
//! instances that are more naturally described through initial codilations
//! (partial injections, contractive matrices) implement [`Codilatory`] and
//! become dilatory through [`crate::dual::Dual`].

use std::fmt::Debug;

use serde::{Deserialize, Serialize};

use crate::error::{CatError, Result};

/// A pair of morphisms out of a common apex.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Span<M> {
    pub left: M,
    pub right: M,
}

/// A pair of morphisms into a common apex.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cospan<M> {
    pub left: M,
    pub right: M,
}

impl<M> Span<M> {
    pub fn new(left: M, right: M) -> Self {
        Span { left, right }
    }

    pub fn swapped(self) -> Self {
        Span { left: self.right, right: self.left }
    }
}

impl<M> Cospan<M> {
    pub fn new(left: M, right: M) -> Self {
        Cospan { left, right }
    }
}

/// A square with `f` on the left, `g` on top, `u` along the bottom and `v`
/// on the right:
///
/// ```text
///   X --g--> B
///   |        |
///   f        v
///   v        v
///   A --u--> C
/// ```
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Square<M> {
    pub f: M,
    pub g: M,
    pub u: M,
    pub v: M,
}

impl<M: Clone> Square<M> {
    pub fn new(f: M, g: M, u: M, v: M) -> Self {
        Square { f, g, u, v }
    }

    /// Reflection in the diagonal: `(f, g, u, v) -> (g, f, v, u)`.
    pub fn transpose(&self) -> Self {
        Square { f: self.g.clone(), g: self.f.clone(), u: self.v.clone(), v: self.u.clone() }
    }

    pub fn span(&self) -> Span<M> {
        Span::new(self.f.clone(), self.g.clone())
    }

    pub fn cospan(&self) -> Cospan<M> {
        Cospan::new(self.u.clone(), self.v.clone())
    }
}

/// A (strong epic, jointly monic) factorisation `legs ∘ epi` of a span.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Factorization<M> {
    pub epi: M,
    pub legs: Span<M>,
}

/// A (monic, jointly epic) factorisation `mono ∘ legs` of a cospan.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoFactorization<M> {
    pub mono: M,
    pub legs: Cospan<M>,
}

pub trait Category {
    type Obj: Clone + PartialEq + Debug + Serialize;
    type Mor: Clone + Debug + Serialize;

    fn dom(&self, f: &Self::Mor) -> Self::Obj;
    fn cod(&self, f: &Self::Mor) -> Self::Obj;
    fn identity(&self, x: &Self::Obj) -> Self::Mor;
    /// `g ∘ f`; fails when `cod f ≠ dom g`.
    fn compose(&self, g: &Self::Mor, f: &Self::Mor) -> Result<Self::Mor>;
    fn mor_eq(&self, f: &Self::Mor, g: &Self::Mor) -> bool;
    /// Checks the instance invariants of a morphism.
    fn validate(&self, f: &Self::Mor) -> Result<()>;

    fn compose3(&self, h: &Self::Mor, g: &Self::Mor, f: &Self::Mor) -> Result<Self::Mor> {
        self.compose(h, &self.compose(g, f)?)
    }

    fn check_span(&self, span: &Span<Self::Mor>) -> Result<()> {
        if self.dom(&span.left) != self.dom(&span.right) {
            return Err(CatError::mismatch(format!(
                "span legs have different domains {:?} and {:?}",
                self.dom(&span.left),
                self.dom(&span.right)
            )));
        }
        Ok(())
    }

    fn check_cospan(&self, cospan: &Cospan<Self::Mor>) -> Result<()> {
        if self.cod(&cospan.left) != self.cod(&cospan.right) {
            return Err(CatError::mismatch(format!(
                "cospan legs have different codomains {:?} and {:?}",
                self.cod(&cospan.left),
                self.cod(&cospan.right)
            )));
        }
        Ok(())
    }

    /// `u ∘ f = v ∘ g`, false when the composites are not defined.
    fn commutes(&self, sq: &Square<Self::Mor>) -> bool {
        match (self.compose(&sq.u, &sq.f), self.compose(&sq.v, &sq.g)) {
            (Ok(a), Ok(b)) => self.mor_eq(&a, &b),
            _ => false,
        }
    }
}

pub trait DaggerCategory: Category {
    fn dagger(&self, f: &Self::Mor) -> Self::Mor;
}

/// Dagger categories in which every morphism has a chosen dilator.
pub trait Dilatory: DaggerCategory {
    /// A terminal dilation `(p1, p2)` of `r`, so that `p2 ∘ p1† = r`.
    fn dilator(&self, r: &Self::Mor) -> Result<Span<Self::Mor>>;

    /// The coisometry `e` with `dilator.left ∘ e = dilation.left` and
    /// `dilator.right ∘ e = dilation.right`.
    fn mediate(&self, dilator: &Span<Self::Mor>, dilation: &Span<Self::Mor>) -> Result<Self::Mor>;

    /// Joint monicity of a span of coisometries, decided by the instance.
    fn jointly_monic(&self, span: &Span<Self::Mor>) -> bool;
}

/// Dagger categories in which every morphism has a chosen codilator.
pub trait Codilatory: DaggerCategory {
    /// An initial codilation `(i1, i2)` of `r`, so that `i2† ∘ i1 = r`.
    fn codilator(&self, r: &Self::Mor) -> Result<Cospan<Self::Mor>>;

    /// The isometry `s` with `s ∘ codilator.left = codilation.left` and
    /// `s ∘ codilator.right = codilation.right`.
    fn comediate(
        &self,
        codilator: &Cospan<Self::Mor>,
        codilation: &Cospan<Self::Mor>,
    ) -> Result<Self::Mor>;

    /// Joint epicity of a cospan of isometries, decided by the instance.
    fn jointly_epic(&self, cospan: &Cospan<Self::Mor>) -> bool;
}

/// `f† ∘ f = 1`.
pub fn is_isometry<D: DaggerCategory>(cat: &D, f: &D::Mor) -> Result<bool> {
    cat.validate(f)?;
    let gram = cat.compose(&cat.dagger(f), f)?;
    Ok(cat.mor_eq(&gram, &cat.identity(&cat.dom(f))))
}

/// `f ∘ f† = 1`.
pub fn is_coisometry<D: DaggerCategory>(cat: &D, f: &D::Mor) -> Result<bool> {
    cat.validate(f)?;
    let gram = cat.compose(f, &cat.dagger(f))?;
    Ok(cat.mor_eq(&gram, &cat.identity(&cat.cod(f))))
}

pub fn is_unitary<D: DaggerCategory>(cat: &D, f: &D::Mor) -> Result<bool> {
    Ok(is_isometry(cat, f)? && is_coisometry(cat, f)?)
}

/// `span.right ∘ span.left†`, the morphism a span dilates.
pub fn dilated<D: DaggerCategory>(cat: &D, span: &Span<D::Mor>) -> Result<D::Mor> {
    cat.compose(&span.right, &cat.dagger(&span.left))
}

/// `cospan.right† ∘ cospan.left`, the morphism a cospan codilates.
pub fn codilated<D: DaggerCategory>(cat: &D, cospan: &Cospan<D::Mor>) -> Result<D::Mor> {
    cat.compose(&cat.dagger(&cospan.right), &cospan.left)
}
