//! Finite sets with partial injections, and the total injections among them.
//!
//! The dagger reverses every pair. Isometries are the total injections;
//! codilators are built on `(A ∖ supp r) ⊔ B`, and co-independent squares of
//! injections are exactly the pullback squares.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::category::{
    Category, CoFactorization, Codilatory, Cospan, DaggerCategory, Span,
};
use crate::error::{CatError, Result};
use crate::independence::{CoEpiRegular, CoIndependenceCategory, IsometryCategory};
use crate::msurj::FinSet;
use crate::sample::{all_functions, FiniteEnumeration, Rng, Sampler};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartialInjection {
    pub dom: FinSet,
    pub cod: FinSet,
    pub pairs: BTreeSet<(String, String)>,
}

impl PartialInjection {
    pub fn new<'a, I>(dom: FinSet, cod: FinSet, pairs: I) -> Self
    where
        I: IntoIterator<Item = (&'a str, &'a str)>,
    {
        let pairs = pairs.into_iter().map(|(a, b)| (a.to_string(), b.to_string())).collect();
        PartialInjection { dom, cod, pairs }
    }

    pub fn from_map(dom: FinSet, cod: FinSet, map: &BTreeMap<String, String>) -> Self {
        let pairs = map.iter().map(|(a, b)| (a.clone(), b.clone())).collect();
        PartialInjection { dom, cod, pairs }
    }

    pub fn apply(&self, a: &str) -> Option<&str> {
        self.pairs.iter().find(|(x, _)| x == a).map(|(_, b)| b.as_str())
    }

    pub fn as_map(&self) -> BTreeMap<String, String> {
        self.pairs.iter().cloned().collect()
    }

    /// The elements where the map is defined.
    pub fn support(&self) -> BTreeSet<String> {
        self.pairs.iter().map(|(a, _)| a.clone()).collect()
    }

    pub fn range(&self) -> BTreeSet<String> {
        self.pairs.iter().map(|(_, b)| b.clone()).collect()
    }

    pub fn is_total(&self) -> bool {
        self.pairs.len() == self.dom.len()
    }

    /// The partial identity on the support.
    pub fn restriction(&self) -> PartialInjection {
        PartialInjection {
            dom: self.dom.clone(),
            cod: self.dom.clone(),
            pairs: self.pairs.iter().map(|(a, _)| (a.clone(), a.clone())).collect(),
        }
    }
}

impl fmt::Display for PartialInjection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.pairs.iter().map(|(a, b)| format!("{a}↦{b}")).collect();
        write!(f, "{} -> {}: {{{}}}", self.dom, self.cod, parts.join(", "))
    }
}

fn check_pinj(r: &PartialInjection) -> Result<()> {
    let mut seen_a = BTreeSet::new();
    let mut seen_b = BTreeSet::new();
    for (a, b) in &r.pairs {
        if !r.dom.contains(a) {
            return Err(CatError::invalid(format!("'{a}' is not in the domain")));
        }
        if !r.cod.contains(b) {
            return Err(CatError::invalid(format!("'{b}' is not in the codomain")));
        }
        if !seen_a.insert(a) {
            return Err(CatError::invalid(format!("'{a}' has two images (single-valuedness)")));
        }
        if !seen_b.insert(b) {
            return Err(CatError::invalid(format!("'{b}' has two preimages (injectivity)")));
        }
    }
    Ok(())
}

/// `(s ∘ r)(a) = s(r(a))` where both are defined.
pub fn pi_compose(s: &PartialInjection, r: &PartialInjection) -> Result<PartialInjection> {
    if r.cod != s.dom {
        return Err(CatError::mismatch(format!(
            "cannot compose: codomain {} differs from domain {}",
            r.cod, s.dom
        )));
    }
    let sm = s.as_map();
    let pairs = r
        .pairs
        .iter()
        .filter_map(|(a, b)| sm.get(b).map(|c| (a.clone(), c.clone())))
        .collect();
    Ok(PartialInjection { dom: r.dom.clone(), cod: s.cod.clone(), pairs })
}

pub fn pi_dagger(r: &PartialInjection) -> PartialInjection {
    PartialInjection {
        dom: r.cod.clone(),
        cod: r.dom.clone(),
        pairs: r.pairs.iter().map(|(a, b)| (b.clone(), a.clone())).collect(),
    }
}

pub fn pi_identity(x: &FinSet) -> PartialInjection {
    PartialInjection {
        dom: x.clone(),
        cod: x.clone(),
        pairs: x.iter().map(|a| (a.clone(), a.clone())).collect(),
    }
}

/// The codilator of `r: A → B` on `(A ∖ supp r) ⊔ B`. Elements keep their
/// own labels unless an element of `A ∖ supp r` shares a label with an
/// element of `B`, in which case every apex element is tagged `L:` or `R:`.
pub fn pi_codilator(r: &PartialInjection) -> Cospan<PartialInjection> {
    let supp = r.support();
    let rest: Vec<&String> = r.dom.iter().filter(|a| !supp.contains(*a)).collect();
    let clash = rest.iter().any(|a| r.cod.contains(a));
    let left = |a: &str| if clash { format!("L:{a}") } else { a.to_string() };
    let right = |b: &str| if clash { format!("R:{b}") } else { b.to_string() };
    let apex = FinSet::new(rest.iter().map(|a| left(a)).chain(r.cod.iter().map(|b| right(b))));
    let rm = r.as_map();
    let i1 = PartialInjection {
        dom: r.dom.clone(),
        cod: apex.clone(),
        pairs: r
            .dom
            .iter()
            .map(|a| (a.clone(), rm.get(a).map(|b| right(b)).unwrap_or_else(|| left(a))))
            .collect(),
    };
    let i2 = PartialInjection {
        dom: r.cod.clone(),
        cod: apex,
        pairs: r.cod.iter().map(|b| (b.clone(), right(b))).collect(),
    };
    Cospan::new(i1, i2)
}

/// The pushout in sets of `supp r ↪ A` and `r: supp r → B`, computed by
/// union-find on `A ⊔ B`. The apex is labelled by tagged class
/// representatives.
pub fn restriction_pushout(r: &PartialInjection) -> Cospan<PartialInjection> {
    let na = r.dom.len();
    let n = na + r.cod.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for (a, b) in &r.pairs {
        let (Some(i), Some(j)) = (r.dom.index_of(a), r.cod.index_of(b)) else {
            continue;
        };
        let (ri, rj) = (find(&mut parent, i), find(&mut parent, na + j));
        if ri != rj {
            parent[ri.max(rj)] = ri.min(rj);
        }
    }
    let label = |i: usize| {
        if i < na {
            format!("L:{}", r.dom.elements()[i])
        } else {
            format!("R:{}", r.cod.elements()[i - na])
        }
    };
    let roots: Vec<usize> = (0..n).map(|i| find(&mut parent, i)).collect();
    let apex = FinSet::new(roots.iter().map(|&i| label(i)));
    let i1 = PartialInjection {
        dom: r.dom.clone(),
        cod: apex.clone(),
        pairs: r.dom.iter().enumerate().map(|(i, a)| (a.clone(), label(roots[i]))).collect(),
    };
    let i2 = PartialInjection {
        dom: r.cod.clone(),
        cod: apex,
        pairs: r.cod.iter().enumerate().map(|(j, b)| (b.clone(), label(roots[na + j]))).collect(),
    };
    Cospan::new(i1, i2)
}

/// The function `s` on `Ran i1 ∪ Ran i2` with `s ∘ i1 = j1` and
/// `s ∘ i2 = j2`, if those equations are consistent.
fn cospan_factor(
    i: &Cospan<PartialInjection>,
    j: &Cospan<PartialInjection>,
) -> std::result::Result<BTreeMap<String, String>, String> {
    let mut s: BTreeMap<String, String> = BTreeMap::new();
    for (leg, target, side) in [(&i.left, &j.left, "left"), (&i.right, &j.right, "right")] {
        let tm = target.as_map();
        for (a, x) in &leg.pairs {
            let Some(y) = tm.get(a) else {
                return Err(format!("{side} triangle fails: '{a}' has no image in the codilation"));
            };
            if let Some(prev) = s.insert(x.clone(), y.clone()) {
                if &prev != y {
                    return Err(format!("{side} triangle fails: '{x}' must go to both '{prev}' and '{y}'"));
                }
            }
        }
    }
    Ok(s)
}

fn is_injective_map(m: &BTreeMap<String, String>) -> bool {
    let vals: BTreeSet<&String> = m.values().collect();
    vals.len() == m.len()
}

fn covers(c: &Cospan<PartialInjection>) -> bool {
    let mut hit = c.left.range();
    hit.extend(c.right.range());
    c.left.cod.iter().all(|x| hit.contains(x))
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PInj;

impl Category for PInj {
    type Obj = FinSet;
    type Mor = PartialInjection;

    fn dom(&self, f: &PartialInjection) -> FinSet {
        f.dom.clone()
    }

    fn cod(&self, f: &PartialInjection) -> FinSet {
        f.cod.clone()
    }

    fn identity(&self, x: &FinSet) -> PartialInjection {
        pi_identity(x)
    }

    fn compose(&self, g: &PartialInjection, f: &PartialInjection) -> Result<PartialInjection> {
        pi_compose(g, f)
    }

    fn mor_eq(&self, f: &PartialInjection, g: &PartialInjection) -> bool {
        f == g
    }

    fn validate(&self, f: &PartialInjection) -> Result<()> {
        check_pinj(f)
    }
}

impl DaggerCategory for PInj {
    fn dagger(&self, f: &PartialInjection) -> PartialInjection {
        pi_dagger(f)
    }
}

impl Codilatory for PInj {
    fn codilator(&self, r: &PartialInjection) -> Result<Cospan<PartialInjection>> {
        check_pinj(r)?;
        Ok(pi_codilator(r))
    }

    fn comediate(
        &self,
        codilator: &Cospan<PartialInjection>,
        codilation: &Cospan<PartialInjection>,
    ) -> Result<PartialInjection> {
        let s = cospan_factor(codilator, codilation).map_err(CatError::NoMediator)?;
        let apex = codilator.left.cod.clone();
        if s.len() != apex.len() {
            return Err(CatError::NoMediator("the codilator legs do not cover their apex".into()));
        }
        if !is_injective_map(&s) {
            return Err(CatError::NoMediator(
                "the mediating map is not injective; the inputs codilate different morphisms".into(),
            ));
        }
        Ok(PartialInjection::from_map(apex, codilation.left.cod.clone(), &s))
    }

    fn jointly_epic(&self, cospan: &Cospan<PartialInjection>) -> bool {
        cospan.left.is_total() && cospan.right.is_total() && covers(cospan)
    }
}

/// Finite sets and injective functions.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Inj;

impl Category for Inj {
    type Obj = FinSet;
    type Mor = PartialInjection;

    fn dom(&self, f: &PartialInjection) -> FinSet {
        f.dom.clone()
    }

    fn cod(&self, f: &PartialInjection) -> FinSet {
        f.cod.clone()
    }

    fn identity(&self, x: &FinSet) -> PartialInjection {
        pi_identity(x)
    }

    fn compose(&self, g: &PartialInjection, f: &PartialInjection) -> Result<PartialInjection> {
        pi_compose(g, f)
    }

    fn mor_eq(&self, f: &PartialInjection, g: &PartialInjection) -> bool {
        f == g
    }

    fn validate(&self, f: &PartialInjection) -> Result<()> {
        check_pinj(f)?;
        if !f.is_total() {
            return Err(CatError::invalid("injection is not total"));
        }
        Ok(())
    }
}

impl CoIndependenceCategory for Inj {
    /// `Ran f ∩ Ran g = Ran (f ∘ u)` for a commuting square.
    fn is_coindependent(&self, span: &Span<PartialInjection>, cospan: &Cospan<PartialInjection>) -> bool {
        let (Ok(h), Ok(k)) = (pi_compose(&cospan.left, &span.left), pi_compose(&cospan.right, &span.right)) else {
            return false;
        };
        if h != k {
            return false;
        }
        let both: BTreeSet<String> = cospan.left.range().intersection(&cospan.right.range()).cloned().collect();
        both == h.range()
    }
}

impl CoEpiRegular for Inj {
    fn coindependent_pushout(&self, span: &Span<PartialInjection>) -> Result<Cospan<PartialInjection>> {
        let r = pi_compose(&span.right, &pi_dagger(&span.left))?;
        Ok(pi_codilator(&r))
    }

    fn cofactorize(&self, cospan: &Cospan<PartialInjection>) -> Result<CoFactorization<PartialInjection>> {
        inj_cofactorize(cospan)
    }

    fn is_jointly_epic(&self, cospan: &Cospan<PartialInjection>) -> bool {
        cospan.left.cod == cospan.right.cod && covers(cospan)
    }

    fn cofactor_through(
        &self,
        epic: &Cospan<PartialInjection>,
        cospan: &Cospan<PartialInjection>,
    ) -> Option<PartialInjection> {
        let s = cospan_factor(epic, cospan).ok()?;
        (s.len() == epic.left.cod.len() && is_injective_map(&s))
            .then(|| PartialInjection::from_map(epic.left.cod.clone(), cospan.left.cod.clone(), &s))
    }

    fn inverse(&self, f: &PartialInjection) -> Option<PartialInjection> {
        (f.is_total() && f.pairs.len() == f.cod.len()).then(|| pi_dagger(f))
    }

    fn same_corelation(&self, a: &Cospan<PartialInjection>, b: &Cospan<PartialInjection>) -> bool {
        match (self.corelation_key(a), self.corelation_key(b)) {
            (Some(x), Some(y)) => x == y,
            _ => false,
        }
    }

    /// The partial injection `{(a, b) : f(a) = g(b)}` with its feet.
    fn corelation_key(&self, cospan: &Cospan<PartialInjection>) -> Option<String> {
        let r = pi_compose(&pi_dagger(&cospan.right), &cospan.left).ok()?;
        let body: Vec<String> = r.pairs.iter().map(|(a, b)| format!("({a},{b})")).collect();
        Some(format!("{}->{}:{}", r.dom, r.cod, body.join(";")))
    }
}

impl IsometryCategory for Inj {
    type Envelope = PInj;

    fn envelope(&self) -> PInj {
        PInj
    }
}

/// Corestricts a cospan of injections to `Ran f ∪ Ran g`.
pub fn inj_cofactorize(cospan: &Cospan<PartialInjection>) -> Result<CoFactorization<PartialInjection>> {
    Inj.check_cospan(cospan)?;
    let mut image = cospan.left.range();
    image.extend(cospan.right.range());
    let y = FinSet::new(image.iter().cloned());
    let mono = PartialInjection {
        dom: y.clone(),
        cod: cospan.left.cod.clone(),
        pairs: y.iter().map(|x| (x.clone(), x.clone())).collect(),
    };
    let corestrict = |f: &PartialInjection| PartialInjection { dom: f.dom.clone(), cod: y.clone(), pairs: f.pairs.clone() };
    Ok(CoFactorization { mono, legs: Cospan::new(corestrict(&cospan.left), corestrict(&cospan.right)) })
}

/// Whether two cospans with the same feet differ by a bijection of apexes.
pub fn cospans_isomorphic(a: &Cospan<PartialInjection>, b: &Cospan<PartialInjection>) -> bool {
    if a.left.dom != b.left.dom || a.right.dom != b.right.dom || a.left.cod.len() != b.left.cod.len() {
        return false;
    }
    match cospan_factor(a, b) {
        Ok(s) => s.len() == a.left.cod.len() && is_injective_map(&s),
        Err(_) => false,
    }
}

/// The object `[n] = {1, …, n}`.
pub fn fin_pinj_object(n: usize) -> FinSet {
    FinSet::ordinal(n)
}

fn all_partial_injections(a: &FinSet, b: &FinSet, total: bool) -> Vec<PartialInjection> {
    // Each element of `a` goes to an element of `b` or, for partial maps, to
    // nowhere (encoded as `b.len()`).
    let k = b.len() + usize::from(!total);
    all_functions(a.len(), k)
        .into_iter()
        .filter(|f| {
            let hit: Vec<usize> = f.iter().copied().filter(|&j| j < b.len()).collect();
            let set: BTreeSet<usize> = hit.iter().copied().collect();
            set.len() == hit.len()
        })
        .map(|f| PartialInjection {
            dom: a.clone(),
            cod: b.clone(),
            pairs: a
                .iter()
                .zip(&f)
                .filter(|(_, &j)| j < b.len())
                .map(|(x, &j)| (x.clone(), b.elements()[j].clone()))
                .collect(),
        })
        .collect()
}

impl FiniteEnumeration for PInj {
    fn small_objects(&self, max: usize) -> Vec<FinSet> {
        (0..=max).map(FinSet::range).collect()
    }

    fn hom(&self, a: &FinSet, b: &FinSet) -> Vec<PartialInjection> {
        all_partial_injections(a, b, false)
    }
}

impl FiniteEnumeration for Inj {
    fn small_objects(&self, max: usize) -> Vec<FinSet> {
        (0..=max).map(FinSet::range).collect()
    }

    fn hom(&self, a: &FinSet, b: &FinSet) -> Vec<PartialInjection> {
        all_partial_injections(a, b, true)
    }
}

#[derive(Clone, Debug)]
pub struct PInjSampler {
    pub max_size: usize,
    cat: PInj,
}

impl PInjSampler {
    pub fn new(max_size: usize) -> Self {
        PInjSampler { max_size: max_size.max(1), cat: PInj }
    }

    fn set_of_size(&self, rng: &mut Rng, n: usize) -> FinSet {
        const PREFIXES: [&str; 4] = ["a", "b", "x", "q"];
        let p = PREFIXES[rng.random_range(0..PREFIXES.len())];
        FinSet::new((0..n).map(|i| format!("{p}{i}")))
    }

    fn injection(&self, rng: &mut Rng, dom: &FinSet, cod: &FinSet, defined: usize) -> PartialInjection {
        let mut src: Vec<&String> = dom.iter().collect();
        let mut dst: Vec<&String> = cod.iter().collect();
        src.shuffle(rng);
        dst.shuffle(rng);
        let pairs = src
            .into_iter()
            .zip(dst)
            .take(defined)
            .map(|(a, b)| (a.clone(), b.clone()))
            .collect();
        PartialInjection { dom: dom.clone(), cod: cod.clone(), pairs }
    }
}

impl Sampler for PInjSampler {
    type Cat = PInj;

    fn category(&self) -> &PInj {
        &self.cat
    }

    fn object(&self, rng: &mut Rng) -> FinSet {
        let n = if rng.random_bool(0.05) { 0 } else { rng.random_range(1..=self.max_size) };
        self.set_of_size(rng, n)
    }

    fn morphism_from(&self, rng: &mut Rng, a: &FinSet) -> PartialInjection {
        let k = rng.random_range(0..=self.max_size);
        let cod = self.set_of_size(rng, k);
        let defined = rng.random_range(0..=a.len().min(k));
        self.injection(rng, a, &cod, defined)
    }

    fn coisometry_from(&self, rng: &mut Rng, a: &FinSet) -> PartialInjection {
        let f = self.isometry_into(rng, a);
        pi_dagger(&f)
    }

    fn coisometry_into(&self, rng: &mut Rng, b: &FinSet) -> PartialInjection {
        let f = self.isometry_from(rng, b);
        pi_dagger(&f)
    }

    fn isometry_from(&self, rng: &mut Rng, a: &FinSet) -> PartialInjection {
        let k = a.len() + rng.random_range(0..=2);
        let cod = self.set_of_size(rng, k);
        self.injection(rng, a, &cod, a.len())
    }

    fn isometry_into(&self, rng: &mut Rng, b: &FinSet) -> PartialInjection {
        let k = rng.random_range(0..=b.len());
        let dom = self.set_of_size(rng, k);
        self.injection(rng, &dom, b, k)
    }
}
