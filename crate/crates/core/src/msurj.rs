//! Finite sets with surjective multivalued functions, and the surjective
//! functions among them.
//!
//! A multivalued function sends every element of its domain to a nonempty
//! subset of its codomain and covers the codomain. The dagger is the converse
//! relation. The only morphism out of the empty set is the identity on it.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::category::{
    Category, DaggerCategory, Dilatory, Factorization, Cospan, Span, Square,
};
use crate::error::{CatError, Result};
use crate::independence::{CoisometryCategory, EpiRegular, IndependenceCategory};
use crate::mutation::{active, Mutation};
use crate::sample::{all_functions, all_surjections, FiniteEnumeration, Rng, Sampler};

/// A finite set of string labels, kept sorted.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct FinSet(Vec<String>);

impl TryFrom<Vec<String>> for FinSet {
    type Error = CatError;

    fn try_from(v: Vec<String>) -> Result<Self> {
        FinSet::from_distinct(v)
    }
}

impl From<FinSet> for Vec<String> {
    fn from(s: FinSet) -> Self {
        s.0
    }
}

impl FinSet {
    /// Fails on repeated labels.
    pub fn from_distinct<I, S>(items: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut v: Vec<String> = items.into_iter().map(Into::into).collect();
        let n = v.len();
        v.sort();
        v.dedup();
        if v.len() != n {
            return Err(CatError::invalid("set labels are not distinct"));
        }
        Ok(FinSet(v))
    }

    pub fn new<I, S>(items: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut v: Vec<String> = items.into_iter().map(Into::into).collect();
        v.sort();
        v.dedup();
        FinSet(v)
    }

    pub fn empty() -> Self {
        FinSet(Vec::new())
    }

    /// `{0, 1, …, n-1}` with decimal labels.
    pub fn range(n: usize) -> Self {
        FinSet::new((0..n).map(|i| i.to_string()))
    }

    /// `{1, 2, …, n}`.
    pub fn ordinal(n: usize) -> Self {
        FinSet::new((1..=n).map(|i| i.to_string()))
    }

    pub fn elements(&self) -> &[String] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, x: &str) -> bool {
        self.0.binary_search_by(|e| e.as_str().cmp(x)).is_ok()
    }

    pub fn index_of(&self, x: &str) -> Option<usize> {
        self.0.binary_search_by(|e| e.as_str().cmp(x)).ok()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, String> {
        self.0.iter()
    }
}

impl fmt::Display for FinSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.0.join(", "))
    }
}

/// Label of the pair `(a, b)` in a constructed apex.
pub fn pair_label(a: &str, b: &str) -> String {
    format!("({a}|{b})")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiMap {
    pub dom: FinSet,
    pub cod: FinSet,
    pub table: BTreeMap<String, BTreeSet<String>>,
}

impl MultiMap {
    pub fn from_pairs<'a, I>(dom: FinSet, cod: FinSet, pairs: I) -> Self
    where
        I: IntoIterator<Item = (&'a str, &'a str)>,
    {
        let mut table: BTreeMap<String, BTreeSet<String>> =
            dom.iter().map(|a| (a.clone(), BTreeSet::new())).collect();
        for (a, b) in pairs {
            table.entry(a.to_string()).or_default().insert(b.to_string());
        }
        MultiMap { dom, cod, table }
    }

    pub fn from_fn<F>(dom: FinSet, cod: FinSet, f: F) -> Self
    where
        F: Fn(&str) -> String,
    {
        let table = dom
            .iter()
            .map(|a| (a.clone(), BTreeSet::from([f(a)])))
            .collect();
        MultiMap { dom, cod, table }
    }

    pub fn image(&self, a: &str) -> Option<&BTreeSet<String>> {
        self.table.get(a)
    }

    pub fn pairs(&self) -> Vec<(String, String)> {
        self.table
            .iter()
            .flat_map(|(a, bs)| bs.iter().map(move |b| (a.clone(), b.clone())))
            .collect()
    }

    /// The underlying function when every image is a singleton.
    pub fn as_function(&self) -> Option<BTreeMap<String, String>> {
        self.table
            .iter()
            .map(|(a, bs)| {
                if bs.len() == 1 {
                    bs.iter().next().map(|b| (a.clone(), b.clone()))
                } else {
                    None
                }
            })
            .collect()
    }

    pub fn is_single_valued(&self) -> bool {
        self.table.values().all(|bs| bs.len() == 1)
    }

    fn apply(&self, a: &str) -> &str {
        self.table[a].iter().next().map(String::as_str).unwrap_or("")
    }
}

impl fmt::Display for MultiMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}:", self.dom, self.cod)?;
        for (a, bs) in &self.table {
            let v: Vec<&str> = bs.iter().map(String::as_str).collect();
            write!(f, " {a}↦{{{}}}", v.join(","))?;
        }
        Ok(())
    }
}

fn check_multimap(r: &MultiMap) -> Result<()> {
    if r.table.len() != r.dom.len() || r.dom.iter().any(|a| !r.table.contains_key(a)) {
        return Err(CatError::invalid("table rows do not match the domain"));
    }
    let mut covered = BTreeSet::new();
    for (a, bs) in &r.table {
        if bs.is_empty() {
            return Err(CatError::invalid(format!("element '{a}' has an empty image (totality)")));
        }
        for b in bs {
            if !r.cod.contains(b) {
                return Err(CatError::invalid(format!("image '{b}' of '{a}' is not in the codomain")));
            }
            covered.insert(b.as_str());
        }
    }
    if let Some(b) = r.cod.iter().find(|b| !covered.contains(b.as_str())) {
        return Err(CatError::invalid(format!("codomain element '{b}' is not covered (surjectivity)")));
    }
    Ok(())
}

fn compose_multimaps(s: &MultiMap, r: &MultiMap) -> Result<MultiMap> {
    if r.cod != s.dom {
        return Err(CatError::mismatch(format!(
            "cannot compose: codomain {} differs from domain {}",
            r.cod, s.dom
        )));
    }
    let table = r
        .table
        .iter()
        .map(|(a, bs)| {
            let mut out = BTreeSet::new();
            for b in bs {
                if let Some(cs) = s.table.get(b) {
                    out.extend(cs.iter().cloned());
                }
            }
            (a.clone(), out)
        })
        .collect();
    Ok(MultiMap { dom: r.dom.clone(), cod: s.cod.clone(), table })
}

fn converse(r: &MultiMap) -> MultiMap {
    let mut table: BTreeMap<String, BTreeSet<String>> =
        r.cod.iter().map(|b| (b.clone(), BTreeSet::new())).collect();
    for (a, bs) in &r.table {
        for b in bs {
            table.entry(b.clone()).or_default().insert(a.clone());
        }
    }
    MultiMap { dom: r.cod.clone(), cod: r.dom.clone(), table }
}

fn identity_map(x: &FinSet) -> MultiMap {
    MultiMap::from_fn(x.clone(), x.clone(), |a| a.to_string())
}

/// The dagger category of finite sets and surjective multivalued functions.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct MSurj;

impl Category for MSurj {
    type Obj = FinSet;
    type Mor = MultiMap;

    fn dom(&self, f: &MultiMap) -> FinSet {
        f.dom.clone()
    }

    fn cod(&self, f: &MultiMap) -> FinSet {
        f.cod.clone()
    }

    fn identity(&self, x: &FinSet) -> MultiMap {
        identity_map(x)
    }

    fn compose(&self, g: &MultiMap, f: &MultiMap) -> Result<MultiMap> {
        compose_multimaps(g, f)
    }

    fn mor_eq(&self, f: &MultiMap, g: &MultiMap) -> bool {
        f == g
    }

    fn validate(&self, f: &MultiMap) -> Result<()> {
        check_multimap(f)
    }
}

impl DaggerCategory for MSurj {
    fn dagger(&self, f: &MultiMap) -> MultiMap {
        converse(f)
    }
}

/// The graph `{(a, b) : b ∈ r(a)}` of `r` with its two projections.
pub fn graph_dilator(r: &MultiMap) -> Result<Span<MultiMap>> {
    projections(&r.pairs(), &r.dom, &r.cod)
}

/// The span of coordinate projections out of a set of pairs in `a × b`.
pub fn projections(pairs: &[(String, String)], a: &FinSet, b: &FinSet) -> Result<Span<MultiMap>> {
    let apex = FinSet::from_distinct(pairs.iter().map(|(x, y)| pair_label(x, y)))
        .map_err(|_| CatError::Internal("pair labels collide".into()))?;
    let leg = |cod: &FinSet, first: bool| MultiMap {
        dom: apex.clone(),
        cod: cod.clone(),
        table: pairs
            .iter()
            .map(|(x, y)| (pair_label(x, y), BTreeSet::from([if first { x.clone() } else { y.clone() }])))
            .collect(),
    };
    Ok(Span::new(leg(a, true), leg(b, false)))
}

/// The unique `z` with `left(z) = f(x)` and `right(z) = g(x)` for each `x`,
/// as a function table; `Err` names the first `x` with no or several
/// candidates.
fn pairing_factor(
    left: &MultiMap,
    right: &MultiMap,
    f: &MultiMap,
    g: &MultiMap,
) -> std::result::Result<BTreeMap<String, String>, String> {
    let (Some(l), Some(r), Some(ff), Some(gg)) =
        (left.as_function(), right.as_function(), f.as_function(), g.as_function())
    else {
        return Err("legs are not single-valued".into());
    };
    let mut index: BTreeMap<(&str, &str), Vec<&str>> = BTreeMap::new();
    for z in left.dom.iter() {
        index.entry((l[z].as_str(), r[z].as_str())).or_default().push(z.as_str());
    }
    let mut out = BTreeMap::new();
    for x in f.dom.iter() {
        let key = (ff[x].as_str(), gg[x].as_str());
        match index.get(&key).map(Vec::as_slice) {
            Some([z]) => {
                out.insert(x.clone(), z.to_string());
            }
            Some(_) => return Err(format!("several apex points over ({}, {}) for '{x}'", key.0, key.1)),
            None => return Err(format!("no apex point over ({}, {}) for '{x}'", key.0, key.1)),
        }
    }
    Ok(out)
}

fn is_surjective_table(table: &BTreeMap<String, String>, cod: &FinSet) -> bool {
    let hit: BTreeSet<&str> = table.values().map(String::as_str).collect();
    cod.iter().all(|c| hit.contains(c.as_str()))
}

fn pairing_injective(span: &Span<MultiMap>) -> bool {
    let (Some(l), Some(r)) = (span.left.as_function(), span.right.as_function()) else {
        return false;
    };
    let mut seen = BTreeSet::new();
    span.left.dom.iter().all(|z| seen.insert((l[z].clone(), r[z].clone())))
}

impl Dilatory for MSurj {
    fn dilator(&self, r: &MultiMap) -> Result<Span<MultiMap>> {
        graph_dilator(r)
    }

    fn mediate(&self, dilator: &Span<MultiMap>, dilation: &Span<MultiMap>) -> Result<MultiMap> {
        let table = pairing_factor(&dilator.left, &dilator.right, &dilation.left, &dilation.right)
            .map_err(CatError::NoMediator)?;
        let apex = dilator.left.dom.clone();
        if !is_surjective_table(&table, &apex) {
            return Err(CatError::NoMediator(
                "the factorisation through the dilator is not surjective; the inputs dilate different morphisms".into(),
            ));
        }
        let dom = dilation.left.dom.clone();
        Ok(MultiMap::from_fn(dom, apex, |x| table[x].clone()))
    }

    fn jointly_monic(&self, span: &Span<MultiMap>) -> bool {
        pairing_injective(span)
    }
}

/// The category of finite sets and surjective functions, with independent
/// squares those whose comparison map to the set-theoretic pullback is
/// surjective.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Surj;

impl Category for Surj {
    type Obj = FinSet;
    type Mor = MultiMap;

    fn dom(&self, f: &MultiMap) -> FinSet {
        f.dom.clone()
    }

    fn cod(&self, f: &MultiMap) -> FinSet {
        f.cod.clone()
    }

    fn identity(&self, x: &FinSet) -> MultiMap {
        identity_map(x)
    }

    fn compose(&self, g: &MultiMap, f: &MultiMap) -> Result<MultiMap> {
        compose_multimaps(g, f)
    }

    fn mor_eq(&self, f: &MultiMap, g: &MultiMap) -> bool {
        f == g
    }

    fn validate(&self, f: &MultiMap) -> Result<()> {
        check_multimap(f)?;
        if !f.is_single_valued() {
            return Err(CatError::invalid("morphism is not single-valued"));
        }
        Ok(())
    }
}

/// The set-theoretic pullback `{(a, b) : u(a) = v(b)}` of two functions.
pub fn set_pullback(u: &MultiMap, v: &MultiMap) -> Result<Span<MultiMap>> {
    let (Some(uf), Some(vf)) = (u.as_function(), v.as_function()) else {
        return Err(CatError::invalid("pullback legs must be single-valued"));
    };
    if u.cod != v.cod {
        return Err(CatError::mismatch("cospan legs have different codomains"));
    }
    let mut pairs = Vec::new();
    for a in u.dom.iter() {
        for b in v.dom.iter() {
            if uf[a] == vf[b] {
                pairs.push((a.clone(), b.clone()));
            }
        }
    }
    projections(&pairs, &u.dom, &v.dom)
}

/// The image of the pairing `x ↦ (f(x), g(x))`.
fn pairing_image(f: &MultiMap, g: &MultiMap) -> Option<Vec<(String, String)>> {
    let (ff, gg) = (f.as_function()?, g.as_function()?);
    let set: BTreeSet<(String, String)> =
        f.dom.iter().map(|x| (ff[x].clone(), gg[x].clone())).collect();
    Some(set.into_iter().collect())
}

impl IndependenceCategory for Surj {
    fn is_independent(&self, sq: &Square<MultiMap>) -> bool {
        if !self.commutes(sq) {
            return false;
        }
        let Ok(pb) = set_pullback(&sq.u, &sq.v) else {
            return false;
        };
        let Some(img) = pairing_image(&sq.f, &sq.g) else {
            return false;
        };
        img.len() == pb.left.dom.len()
    }
}

impl EpiRegular for Surj {
    fn independent_pullback(&self, cospan: &Cospan<MultiMap>) -> Result<Span<MultiMap>> {
        set_pullback(&cospan.left, &cospan.right)
    }

    fn factorize(&self, span: &Span<MultiMap>) -> Result<Factorization<MultiMap>> {
        self.check_span(span)?;
        let pairs = pairing_image(&span.left, &span.right)
            .ok_or_else(|| CatError::invalid("span legs must be single-valued"))?;
        let legs = projections(&pairs, &span.left.cod, &span.right.cod)?;
        let apex = legs.left.dom.clone();
        let epi = MultiMap::from_fn(span.left.dom.clone(), apex, |x| {
            pair_label(span.left.apply(x), span.right.apply(x))
        });
        Ok(Factorization { epi, legs })
    }

    fn is_jointly_monic(&self, span: &Span<MultiMap>) -> bool {
        span.left.dom == span.right.dom && pairing_injective(span)
    }

    fn factor_through(&self, monic: &Span<MultiMap>, span: &Span<MultiMap>) -> Option<MultiMap> {
        let table = pairing_factor(&monic.left, &monic.right, &span.left, &span.right).ok()?;
        let apex = monic.left.dom.clone();
        if !is_surjective_table(&table, &apex) {
            return None;
        }
        Some(MultiMap::from_fn(span.left.dom.clone(), apex, |x| table[x].clone()))
    }

    fn inverse(&self, f: &MultiMap) -> Option<MultiMap> {
        let t = converse(f);
        t.is_single_valued().then_some(t)
    }

    fn same_relation(&self, a: &Span<MultiMap>, b: &Span<MultiMap>) -> bool {
        match (self.relation_key(a), self.relation_key(b)) {
            (Some(x), Some(y)) => x == y,
            _ => false,
        }
    }

    fn relation_key(&self, span: &Span<MultiMap>) -> Option<String> {
        let pairs = pairing_image(&span.left, &span.right)?;
        let body: Vec<String> = pairs.iter().map(|(a, b)| format!("({a},{b})")).collect();
        Some(format!("{}->{}:{}", span.left.cod, span.right.cod, body.join(";")))
    }
}

impl CoisometryCategory for Surj {
    type Envelope = MSurj;

    fn envelope(&self) -> MSurj {
        MSurj
    }
}

/// Set-theoretic pushout of a span of functions, by union-find over the
/// disjoint union of the two codomains. The apex is labelled by the smallest
/// tagged member of each class.
pub fn set_pushout(f: &MultiMap, g: &MultiMap) -> Result<Cospan<MultiMap>> {
    let (Some(ff), Some(gg)) = (f.as_function(), g.as_function()) else {
        return Err(CatError::invalid("pushout legs must be single-valued"));
    };
    let na = f.cod.len();
    let n = na + g.cod.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for x in f.dom.iter() {
        let i = f.cod.index_of(&ff[x]).ok_or_else(|| CatError::invalid("image outside codomain"))?;
        let j = na + g.cod.index_of(&gg[x]).ok_or_else(|| CatError::invalid("image outside codomain"))?;
        let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
        if ri != rj {
            parent[ri.max(rj)] = ri.min(rj);
        }
    }
    let label = |i: usize| -> String {
        if i < na {
            format!("L:{}", f.cod.elements()[i])
        } else {
            format!("R:{}", g.cod.elements()[i - na])
        }
    };
    let roots: Vec<usize> = (0..n).map(|i| find(&mut parent, i)).collect();
    let apex = FinSet::new(roots.iter().map(|&r| label(r)));
    let u = MultiMap::from_fn(f.cod.clone(), apex.clone(), |a| label(roots[f.cod.index_of(a).unwrap_or(0)]));
    let v = MultiMap::from_fn(g.cod.clone(), apex, |b| label(roots[na + g.cod.index_of(b).unwrap_or(0)]));
    Ok(Cospan::new(u, v))
}

/// Whether the equivalence relations `f†f` and `g†g` commute. The answer is
/// computed from the relation composites and confirmed against independence
/// of the square formed with the pushout of `(f, g)`; disagreement is
/// reported as an internal error.
pub fn commuting_equiv_check(f: &MultiMap, g: &MultiMap) -> Result<bool> {
    MSurj.check_span(&Span::new(f.clone(), g.clone()))?;
    Surj.validate(f)?;
    Surj.validate(g)?;
    let kf = compose_multimaps(&converse(f), f)?;
    let kg = compose_multimaps(&converse(g), g)?;
    let commute = compose_multimaps(&kf, &kg)? == compose_multimaps(&kg, &kf)?;
    let po = set_pushout(f, g)?;
    let independent = Surj.is_independent(&Square::new(f.clone(), g.clone(), po.left, po.right));
    if commute != independent {
        return Err(CatError::Internal(format!(
            "kernel commutation ({commute}) disagrees with independence of the pushout square ({independent})"
        )));
    }
    Ok(commute)
}

impl FiniteEnumeration for MSurj {
    fn small_objects(&self, max: usize) -> Vec<FinSet> {
        (0..=max).map(FinSet::range).collect()
    }

    fn hom(&self, a: &FinSet, b: &FinSet) -> Vec<MultiMap> {
        let (n, k) = (a.len(), b.len());
        if k > 16 {
            return Vec::new();
        }
        let masks: Vec<u64> = (1..(1u64 << k)).collect();
        let choices = all_functions(n, masks.len());
        let full = (1u64 << k) - 1;
        choices
            .into_iter()
            .filter(|c| c.iter().fold(0u64, |acc, &i| acc | masks[i]) == full)
            .map(|c| {
                let table = a
                    .iter()
                    .zip(&c)
                    .map(|(x, &i)| {
                        let set = (0..k)
                            .filter(|j| masks[i] >> j & 1 == 1)
                            .map(|j| b.elements()[j].clone())
                            .collect();
                        (x.clone(), set)
                    })
                    .collect();
                MultiMap { dom: a.clone(), cod: b.clone(), table }
            })
            .collect()
    }
}

impl FiniteEnumeration for Surj {
    fn small_objects(&self, max: usize) -> Vec<FinSet> {
        (0..=max).map(FinSet::range).collect()
    }

    fn hom(&self, a: &FinSet, b: &FinSet) -> Vec<MultiMap> {
        all_surjections(a.len(), b.len())
            .into_iter()
            .map(|f| {
                let table = a
                    .iter()
                    .zip(&f)
                    .map(|(x, &j)| (x.clone(), BTreeSet::from([b.elements()[j].clone()])))
                    .collect();
                MultiMap { dom: a.clone(), cod: b.clone(), table }
            })
            .collect()
    }
}

/// Random sets of size at most `max_size` and random surjective multivalued
/// functions between them.
#[derive(Clone, Debug)]
pub struct MSurjSampler {
    pub max_size: usize,
    pub mutation: Option<Mutation>,
    cat: MSurj,
}

impl MSurjSampler {
    pub fn new(max_size: usize) -> Self {
        MSurjSampler { max_size: max_size.max(1), mutation: None, cat: MSurj }
    }

    pub fn with_mutation(mut self, m: Option<Mutation>) -> Self {
        self.mutation = m;
        self
    }

    fn set_of_size(&self, rng: &mut Rng, n: usize) -> FinSet {
        const PREFIXES: [&str; 4] = ["a", "b", "x", "p"];
        let p = PREFIXES[rng.random_range(0..PREFIXES.len())];
        FinSet::new((0..n).map(|i| format!("{p}{i}")))
    }

    fn random_surjection(&self, rng: &mut Rng, dom: &FinSet, cod: &FinSet) -> MultiMap {
        let mut order: Vec<&String> = dom.iter().collect();
        order.shuffle(rng);
        let k = cod.len();
        let mut table = BTreeMap::new();
        for (i, a) in order.into_iter().enumerate() {
            let j = if i < k { i } else { rng.random_range(0..k) };
            table.insert(a.clone(), BTreeSet::from([cod.elements()[j].clone()]));
        }
        MultiMap { dom: dom.clone(), cod: cod.clone(), table }
    }
}

impl Sampler for MSurjSampler {
    type Cat = MSurj;

    fn category(&self) -> &MSurj {
        &self.cat
    }

    fn object(&self, rng: &mut Rng) -> FinSet {
        let n = if rng.random_bool(0.03) { 0 } else { rng.random_range(1..=self.max_size) };
        self.set_of_size(rng, n)
    }

    fn morphism_from(&self, rng: &mut Rng, a: &FinSet) -> MultiMap {
        if a.is_empty() {
            return identity_map(a);
        }
        let k = rng.random_range(1..=self.max_size);
        let cod = self.set_of_size(rng, k);
        let mut table: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for x in a.iter() {
            let mut row = BTreeSet::new();
            row.insert(cod.elements()[rng.random_range(0..k)].clone());
            for b in cod.iter() {
                if rng.random_bool(0.3) {
                    row.insert(b.clone());
                }
            }
            table.insert(x.clone(), row);
        }
        if !active(self.mutation, Mutation::DropSurjectivityRepair) {
            let covered: BTreeSet<String> = table.values().flatten().cloned().collect();
            for b in cod.iter().filter(|b| !covered.contains(*b)) {
                let x = &a.elements()[rng.random_range(0..a.len())];
                table.get_mut(x).map(|row| row.insert(b.clone()));
            }
        }
        MultiMap { dom: a.clone(), cod, table }
    }

    fn coisometry_from(&self, rng: &mut Rng, a: &FinSet) -> MultiMap {
        if a.is_empty() {
            return identity_map(a);
        }
        let k = rng.random_range(1..=a.len());
        let cod = self.set_of_size(rng, k);
        self.random_surjection(rng, a, &cod)
    }

    fn coisometry_into(&self, rng: &mut Rng, b: &FinSet) -> MultiMap {
        if b.is_empty() {
            return identity_map(b);
        }
        let n = b.len() + rng.random_range(0..=2);
        let dom = self.set_of_size(rng, n);
        self.random_surjection(rng, &dom, b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::{is_coisometry, is_isometry};

    fn set(xs: &[&str]) -> FinSet {
        FinSet::new(xs.iter().copied())
    }

    fn mm(dom: &[&str], cod: &[&str], pairs: &[(&str, &str)]) -> MultiMap {
        MultiMap::from_pairs(set(dom), set(cod), pairs.iter().copied())
    }

    #[test]
    fn compose_by_union() {
        let r = mm(&["1", "2"], &["x", "y"], &[("1", "x"), ("2", "x"), ("2", "y")]);
        let s = mm(&["x", "y"], &["u"], &[("x", "u"), ("y", "u")]);
        let sr = MSurj.compose(&s, &r).unwrap();
        assert_eq!(sr, mm(&["1", "2"], &["u"], &[("1", "u"), ("2", "u")]));
    }

    #[test]
    fn converse_by_hand() {
        let r = mm(&["1", "2"], &["x", "y"], &[("1", "x"), ("2", "x"), ("2", "y")]);
        let d = MSurj.dagger(&r);
        assert_eq!(d.table["x"], BTreeSet::from(["1".to_string(), "2".to_string()]));
        assert_eq!(d.table["y"], BTreeSet::from(["2".to_string()]));
    }

    #[test]
    fn isometry_checks_by_hand() {
        // r†r(1) = r†{x, y} = {1}, so a one-point multivalued map is
        // isometric, while rr† relates x and y and is not the identity.
        let r = mm(&["1"], &["x", "y"], &[("1", "x"), ("1", "y")]);
        assert!(is_isometry(&MSurj, &r).unwrap());
        assert!(!is_coisometry(&MSurj, &r).unwrap());
        // Identifying two points: f†f(1) = {1, 2}.
        let f = mm(&["1", "2"], &["x"], &[("1", "x"), ("2", "x")]);
        assert!(!is_isometry(&MSurj, &f).unwrap());
    }

    #[test]
    fn single_valued_surjection_is_coisometric() {
        let f = mm(&["1", "2", "3"], &["x", "y"], &[("1", "x"), ("2", "x"), ("3", "y")]);
        assert!(is_coisometry(&MSurj, &f).unwrap());
        assert!(!is_isometry(&MSurj, &f).unwrap());
    }

    #[test]
    fn validation_names_the_invariant() {
        let bad = mm(&["1"], &["x", "y"], &[("1", "x")]);
        let err = MSurj.validate(&bad).unwrap_err();
        assert!(err.to_string().contains("surjectivity"));
        let empty_row = mm(&["1", "2"], &["x"], &[("1", "x")]);
        assert!(MSurj.validate(&empty_row).unwrap_err().to_string().contains("totality"));
    }

    #[test]
    fn empty_set_has_only_its_identity() {
        let e = FinSet::empty();
        assert_eq!(MSurj.hom(&e, &e).len(), 1);
        assert_eq!(MSurj.hom(&e, &FinSet::range(1)).len(), 0);
        assert_eq!(MSurj.hom(&FinSet::range(1), &e).len(), 0);
    }

    #[test]
    fn graph_of_a_two_valued_point() {
        let r = mm(&["1"], &["x", "y"], &[("1", "x"), ("1", "y")]);
        let g = graph_dilator(&r).unwrap();
        assert_eq!(g.left.dom, set(&["(1|x)", "(1|y)"]));
        let back = MSurj.compose(&g.right, &MSurj.dagger(&g.left)).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn product_square_is_independent_and_diagonal_is_not() {
        let a = set(&["a1", "a2"]);
        let b = set(&["b1", "b2"]);
        let pt = set(&["*"]);
        let u = MultiMap::from_fn(a.clone(), pt.clone(), |_| "*".into());
        let v = MultiMap::from_fn(b.clone(), pt.clone(), |_| "*".into());
        let pb = Surj.independent_pullback(&Cospan::new(u.clone(), v.clone())).unwrap();
        assert_eq!(pb.left.dom.len(), 4);
        assert!(Surj.is_independent(&Square::new(pb.left.clone(), pb.right.clone(), u.clone(), v.clone())));
        let diag = set(&["1", "2"]);
        let f = MultiMap::from_fn(diag.clone(), a, |x| format!("a{x}"));
        let g = MultiMap::from_fn(diag, b, |x| format!("b{x}"));
        assert!(!Surj.is_independent(&Square::new(f, g, u, v)));
    }

    #[test]
    fn factorising_a_repeated_leg_gives_the_diagonal() {
        let f = mm(&["1", "2", "3"], &["x", "y"], &[("1", "x"), ("2", "x"), ("3", "y")]);
        let fac = Surj.factorize(&Span::new(f.clone(), f.clone())).unwrap();
        assert_eq!(fac.legs.left.dom.len(), 2);
        assert_eq!(fac.legs.left.table.values().collect::<Vec<_>>(), fac.legs.right.table.values().collect::<Vec<_>>());
        assert_eq!(Surj.compose(&fac.legs.left, &fac.epi).unwrap(), f);
    }

    #[test]
    fn commuting_partitions() {
        let x = set(&["1", "2", "3"]);
        let p = MultiMap::from_fn(x.clone(), set(&["A", "B"]), |e| if e == "3" { "B".into() } else { "A".into() });
        let q = MultiMap::from_fn(x.clone(), set(&["A", "B"]), |e| if e == "1" { "A".into() } else { "B".into() });
        assert!(!commuting_equiv_check(&p, &q).unwrap());
        assert!(commuting_equiv_check(&p, &p).unwrap());
        let prod = set(&["(0|0)", "(0|1)", "(1|0)", "(1|1)"]);
        let pr1 = MultiMap::from_fn(prod.clone(), set(&["0", "1"]), |e| e[1..2].to_string());
        let pr2 = MultiMap::from_fn(prod, set(&["0", "1"]), |e| e[3..4].to_string());
        assert!(commuting_equiv_check(&pr1, &pr2).unwrap());
    }

    #[test]
    fn hom_counts() {
        // Surjective multivalued maps 2 -> 2: rows are nonempty subsets of
        // {0, 1} whose union is everything: 3*3 - 2 = 7.
        assert_eq!(MSurj.hom(&FinSet::range(2), &FinSet::range(2)).len(), 7);
        assert_eq!(Surj.hom(&FinSet::range(3), &FinSet::range(2)).len(), 6);
    }
}
