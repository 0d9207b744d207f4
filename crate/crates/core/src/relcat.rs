//! Relations in an epi-regular independence category: isomorphism classes of
//! jointly monic spans, composed by independent pullback followed by
//! factorisation.
//!
//! `RelCat<C>` is itself a dagger category with chosen dilators. When `C` is
//! the category of coisometries of a dilatory dagger category `D`
//! ([`CoisometryCategory`]), [`RelCat::epsilon`] sends a relation back to `D`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::category::{Category, DaggerCategory, Dilatory, Factorization, Span};
use crate::error::{CatError, Result};
use crate::independence::{CoisometryCategory, EpiRegular};
use crate::mutation::{active, Mutation};
use crate::report::{to_json, Report};
use crate::sample::{seeded, Sampler};

/// A relation `source → target`, stored as a jointly monic representative.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Relation<O, M> {
    pub source: O,
    pub target: O,
    pub rep: Span<M>,
    /// Instance normal form of the isomorphism class, when it has one.
    pub key: Option<String>,
}

/// Every intermediate of one relation composite.
#[derive(Clone, Debug, Serialize)]
pub struct CompositionTrace<M> {
    /// Independent pullback of `(r.right, s.left)`.
    pub pullback: Span<M>,
    /// `(r.left ∘ p1, s.right ∘ p2)`.
    pub outer: Span<M>,
    /// `None` when the factorisation step was skipped.
    pub factorization: Option<Factorization<M>>,
    pub result: Span<M>,
}

#[derive(Clone, Debug, Default)]
pub struct RelCat<C> {
    pub base: C,
    pub mutation: Option<Mutation>,
}

impl<C: EpiRegular> RelCat<C> {
    pub fn new(base: C) -> Self {
        RelCat { base, mutation: None }
    }

    pub fn with_mutation(mut self, m: Option<Mutation>) -> Self {
        self.mutation = m;
        self
    }

    fn wrap(&self, rep: Span<C::Mor>) -> Relation<C::Obj, C::Mor> {
        Relation {
            source: self.base.cod(&rep.left),
            target: self.base.cod(&rep.right),
            key: self.base.relation_key(&rep),
            rep,
        }
    }

    /// The relation represented by `span`; fails unless the span is jointly
    /// monic.
    pub fn relation(&self, span: Span<C::Mor>) -> Result<Relation<C::Obj, C::Mor>> {
        self.base.check_span(&span)?;
        self.base.validate(&span.left)?;
        self.base.validate(&span.right)?;
        if !self.base.is_jointly_monic(&span) {
            return Err(CatError::invalid("representative span is not jointly monic"));
        }
        Ok(self.wrap(span))
    }

    /// The relation of an arbitrary span: the jointly monic part of its
    /// factorisation.
    pub fn image(&self, span: &Span<C::Mor>) -> Result<Relation<C::Obj, C::Mor>> {
        Ok(self.wrap(self.base.factorize(span)?.legs))
    }

    /// `[1_X, 1_X]`.
    pub fn rel_identity(&self, x: &C::Obj) -> Relation<C::Obj, C::Mor> {
        let one = self.base.identity(x);
        self.wrap(Span::new(one.clone(), one))
    }

    /// `s ∘ r` with its intermediates.
    pub fn rel_compose_traced(
        &self,
        s: &Relation<C::Obj, C::Mor>,
        r: &Relation<C::Obj, C::Mor>,
    ) -> Result<(Relation<C::Obj, C::Mor>, CompositionTrace<C::Mor>)> {
        if r.target != s.source {
            return Err(CatError::mismatch(format!(
                "cannot compose relations: target {:?} is not source {:?}",
                r.target, s.source
            )));
        }
        let b = &self.base;
        let pullback = b.independent_pullback(&crate::category::Cospan::new(r.rep.right.clone(), s.rep.left.clone()))?;
        let outer = Span::new(b.compose(&r.rep.left, &pullback.left)?, b.compose(&s.rep.right, &pullback.right)?);
        if active(self.mutation, Mutation::SkipFactorisation) {
            let rel = Relation { source: r.source.clone(), target: s.target.clone(), key: b.relation_key(&outer), rep: outer.clone() };
            return Ok((rel, CompositionTrace { pullback, outer: outer.clone(), factorization: None, result: outer }));
        }
        let fact = b
            .factorize(&outer)
            .map_err(|e| CatError::Internal(format!("factorisation of a composite failed: {e}")))?;
        let rel = self.wrap(fact.legs.clone());
        let result = fact.legs.clone();
        Ok((rel, CompositionTrace { pullback, outer, factorization: Some(fact), result }))
    }

    pub fn rel_compose(&self, s: &Relation<C::Obj, C::Mor>, r: &Relation<C::Obj, C::Mor>) -> Result<Relation<C::Obj, C::Mor>> {
        Ok(self.rel_compose_traced(s, r)?.0)
    }

    /// `[r1, r2]† = [r2, r1]`.
    pub fn rel_dagger(&self, r: &Relation<C::Obj, C::Mor>) -> Relation<C::Obj, C::Mor> {
        self.wrap(r.rep.clone().swapped())
    }

    /// Isomorphism of representatives, decided by the base.
    pub fn rel_eq(&self, r: &Relation<C::Obj, C::Mor>, s: &Relation<C::Obj, C::Mor>) -> bool {
        r.source == s.source && r.target == s.target && self.base.same_relation(&r.rep, &s.rep)
    }

    /// `[1, f]`.
    pub fn eta(&self, f: &C::Mor) -> Relation<C::Obj, C::Mor> {
        self.wrap(Span::new(self.base.identity(&self.base.dom(f)), f.clone()))
    }

    /// The dilator `([1, r1], [1, r2])` of `[r1, r2]`.
    pub fn rel_dilator(&self, r: &Relation<C::Obj, C::Mor>) -> (Relation<C::Obj, C::Mor>, Relation<C::Obj, C::Mor>) {
        (self.eta(&r.rep.left), self.eta(&r.rep.right))
    }

    /// The base morphism `f` with `r = [1, f]`, when `r` is coisometric:
    /// `f = r2 ∘ r1⁻¹`.
    pub fn as_base(&self, r: &Relation<C::Obj, C::Mor>) -> Result<C::Mor> {
        let inv = self
            .base
            .inverse(&r.rep.left)
            .ok_or_else(|| CatError::Precondition("relation is not of the form [1, f]: left leg not invertible".into()))?;
        self.base.compose(&r.rep.right, &inv)
    }
}

impl<C: CoisometryCategory> RelCat<C> {
    /// `[r1, r2] ↦ r2 ∘ r1†` in the envelope.
    pub fn epsilon(&self, r: &Relation<C::Obj, C::Mor>) -> Result<C::Mor> {
        let d = self.base.envelope();
        d.compose(&r.rep.right, &d.dagger(&r.rep.left))
    }

    /// The relation `[p1, p2]` of the envelope's dilator of `m`.
    pub fn from_envelope(&self, m: &C::Mor) -> Result<Relation<C::Obj, C::Mor>> {
        let span = self.base.envelope().dilator(m)?;
        Ok(self.wrap(span))
    }
}

/// Sampled evidence that relations over the coisometries of `D` are `D`
/// again.
#[derive(Clone, Debug, Serialize)]
pub struct EquivalenceWitness {
    pub instance: String,
    pub seed: u64,
    pub samples: usize,
    /// `ε(s ∘ r) = ε(s) ∘ ε(r)` and `ε(r†) = ε(r)†`.
    pub functoriality: Report,
    /// `ε` hits every sampled morphism and identifies relations with the
    /// same image.
    pub full_faithful: Report,
    /// `[1, f]` is coisometric for every coisometry `f`.
    pub eta: Report,
    /// `ε([1, f]) = f`.
    pub triangle: Report,
}

impl EquivalenceWitness {
    pub fn ok(&self) -> bool {
        [&self.functoriality, &self.full_faithful, &self.eta, &self.triangle].iter().all(|r| r.ok())
    }

    pub fn reports(&self) -> [&Report; 4] {
        [&self.functoriality, &self.full_faithful, &self.eta, &self.triangle]
    }
}

impl fmt::Display for EquivalenceWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "roundtrip {} (seed {}, {} samples): {}", self.instance, self.seed, self.samples, if self.ok() { "ok" } else { "FAILED" })?;
        for r in self.reports() {
            writeln!(f, "  {r}")?;
        }
        Ok(())
    }
}

/// Checks on `n` samples that `ε` is a functor inverse to `η` up to
/// isomorphism. `close` compares morphisms of the envelope; it is the
/// envelope's own equality for exact instances.
pub fn roundtrip_check<C, S>(
    rel: &RelCat<C>,
    sampler: &S,
    instance: &str,
    seed: u64,
    n: usize,
    close: impl Fn(&C::Mor, &C::Mor) -> bool,
) -> EquivalenceWitness
where
    C: CoisometryCategory,
    S: Sampler<Cat = C::Envelope>,
{
    let d = rel.base.envelope();
    let mut rng = seeded(seed);
    let mut functoriality = Report::new("ε functoriality", Some(seed));
    let mut full_faithful = Report::new("ε full and faithful", Some(seed));
    let mut eta = Report::new("η onto coisometric relations", Some(seed));
    let mut triangle = Report::new("triangle ε ∘ η = 1", Some(seed));
    for _ in 0..n {
        let a = sampler.object(&mut rng);
        let r = sampler.morphism_from(&mut rng, &a);
        let s = sampler.morphism_from(&mut rng, &d.cod(&r));
        let inputs = || vec![to_json(&r), to_json(&s)];
        let (rr, ss) = match (rel.from_envelope(&r), rel.from_envelope(&s)) {
            (Ok(x), Ok(y)) => (x, y),
            (Err(e), _) | (_, Err(e)) => {
                functoriality.fail("dilator", e.to_string(), inputs());
                continue;
            }
        };
        match rel.rel_compose_traced(&ss, &rr) {
            Ok((sr, _)) => {
                match rel.validate(&sr) {
                    Ok(()) => functoriality.pass(),
                    Err(e) => functoriality.fail("composite representative", e.to_string(), inputs()),
                }
                let lhs = rel.epsilon(&sr);
                let rhs = d.compose(&s, &r);
                match (lhs, rhs) {
                    (Ok(x), Ok(y)) => functoriality.check(close(&x, &y), "ε(s∘r) = ε(s)∘ε(r)", || "images differ".into(), inputs),
                    (Err(e), _) | (_, Err(e)) => functoriality.fail("ε(s∘r) = ε(s)∘ε(r)", e.to_string(), inputs()),
                }
            }
            Err(e) => functoriality.fail("relation composition", e.to_string(), inputs()),
        }
        match rel.epsilon(&rel.rel_dagger(&rr)) {
            Ok(x) => functoriality.check(close(&x, &d.dagger(&r)), "ε(r†) = ε(r)†", || "images differ".into(), || vec![to_json(&r)]),
            Err(e) => functoriality.fail("ε(r†) = ε(r)†", e.to_string(), vec![to_json(&r)]),
        }

        match rel.epsilon(&rr) {
            Ok(x) => full_faithful.check(close(&x, &r), "ε full", || "ε of the dilator relation is not the morphism".into(), || vec![to_json(&r)]),
            Err(e) => full_faithful.fail("ε full", e.to_string(), vec![to_json(&r)]),
        }
        let k = sampler.coisometry_into(&mut rng, &d.dom(&rr.rep.left));
        let other = d
            .compose(&rr.rep.left, &k)
            .and_then(|l| Ok(Span::new(l, d.compose(&rr.rep.right, &k)?)))
            .and_then(|span| rel.image(&span));
        match other {
            Ok(o) => full_faithful.check(rel.rel_eq(&rr, &o), "ε faithful", || "relations with equal ε are not isomorphic".into(), || {
                vec![to_json(&rr.rep), to_json(&o.rep)]
            }),
            Err(e) => full_faithful.fail("ε faithful", e.to_string(), vec![to_json(&rr.rep)]),
        }

        let f = sampler.coisometry_from(&mut rng, &a);
        let ef = rel.eta(&f);
        let back = rel.rel_compose(&ef, &rel.rel_dagger(&ef));
        match back {
            Ok(x) => eta.check(rel.rel_eq(&x, &rel.rel_identity(&d.cod(&f))), "η coisometric", || "[1,f][1,f]† ≠ 1".into(), || vec![to_json(&f)]),
            Err(e) => eta.fail("η coisometric", e.to_string(), vec![to_json(&f)]),
        }
        match rel.as_base(&ef) {
            Ok(g) => eta.check(rel.base.mor_eq(&g, &f), "η injective", || "[1,f] does not give back f".into(), || vec![to_json(&f)]),
            Err(e) => eta.fail("η injective", e.to_string(), vec![to_json(&f)]),
        }
        match rel.epsilon(&ef) {
            Ok(x) => triangle.check(close(&x, &f), "ε(η f) = f", || "triangle fails".into(), || vec![to_json(&f)]),
            Err(e) => triangle.fail("ε(η f) = f", e.to_string(), vec![to_json(&f)]),
        }
    }
    EquivalenceWitness { instance: instance.into(), seed, samples: n, functoriality, full_faithful, eta, triangle }
}

impl<C: EpiRegular> Category for RelCat<C> {
    type Obj = C::Obj;
    type Mor = Relation<C::Obj, C::Mor>;

    fn dom(&self, r: &Self::Mor) -> C::Obj {
        r.source.clone()
    }

    fn cod(&self, r: &Self::Mor) -> C::Obj {
        r.target.clone()
    }

    fn identity(&self, x: &C::Obj) -> Self::Mor {
        self.rel_identity(x)
    }

    fn compose(&self, s: &Self::Mor, r: &Self::Mor) -> Result<Self::Mor> {
        self.rel_compose(s, r)
    }

    fn mor_eq(&self, r: &Self::Mor, s: &Self::Mor) -> bool {
        self.rel_eq(r, s)
    }

    /// Legs valid in the base, feet matching, and jointly monic.
    fn validate(&self, r: &Self::Mor) -> Result<()> {
        let b = &self.base;
        b.check_span(&r.rep)?;
        b.validate(&r.rep.left)?;
        b.validate(&r.rep.right)?;
        if b.cod(&r.rep.left) != r.source || b.cod(&r.rep.right) != r.target {
            return Err(CatError::invalid("representative legs do not end at the source and target"));
        }
        if !b.is_jointly_monic(&r.rep) {
            return Err(CatError::invalid("representative span is not jointly monic"));
        }
        Ok(())
    }
}

impl<C: EpiRegular> DaggerCategory for RelCat<C> {
    fn dagger(&self, r: &Self::Mor) -> Self::Mor {
        self.rel_dagger(r)
    }
}

impl<C: EpiRegular> Dilatory for RelCat<C> {
    fn dilator(&self, r: &Self::Mor) -> Result<Span<Self::Mor>> {
        let (a, b) = self.rel_dilator(r);
        Ok(Span::new(a, b))
    }

    /// For a dilation by coisometric relations `[1, c1]`, `[1, c2]` (up to
    /// isomorphism), the mediator is `[1, e]` where `e` factors `(c1, c2)`
    /// through the dilator's representative.
    fn mediate(&self, dilator: &Span<Self::Mor>, dilation: &Span<Self::Mor>) -> Result<Self::Mor> {
        let rep = Span::new(self.as_base(&dilator.left)?, self.as_base(&dilator.right)?);
        let c = Span::new(self.as_base(&dilation.left)?, self.as_base(&dilation.right)?);
        let e = self
            .base
            .factor_through(&rep, &c)
            .ok_or_else(|| CatError::NoMediator("dilation does not factor through the dilator".into()))?;
        Ok(self.eta(&e))
    }

    fn jointly_monic(&self, span: &Span<Self::Mor>) -> bool {
        match (self.as_base(&span.left), self.as_base(&span.right)) {
            (Ok(a), Ok(b)) => self.base.is_jointly_monic(&Span::new(a, b)),
            _ => false,
        }
    }
}
