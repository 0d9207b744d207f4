//! Finite probability spaces and measure-preserving stochastic maps, in
//! exact rational arithmetic.
//!
//! A space has strictly positive weights summing to one. A map `r: A → B`
//! stores `r(b|a)` with columns indexed by `a`; every column sums to one and
//! `Σ_a r(b|a) Pr_A(a) = Pr_B(b)`. The dagger is the Bayesian inverse. The
//! deterministic maps are exactly the coisometries and carry the
//! conditional-independence structure.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::category::{
    Category, Cospan, DaggerCategory, Dilatory, Factorization, Span, Square,
};
use crate::error::{CatError, Result};
use crate::independence::{CoisometryCategory, EpiRegular, IndependenceCategory};
use crate::msurj::{pair_label, FinSet};
use crate::mutation::{active, Mutation};
use crate::sample::{all_surjections, FiniteEnumeration, Rng, Sampler};

pub type Rational = BigRational;

pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Parses `"p/q"` or an integer `"p"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let parse_int = |t: &str| {
        t.trim()
            .parse::<BigInt>()
            .map_err(|_| CatError::Parse(format!("'{s}' is not a rational of the form p/q")))
    };
    match s.split_once('/') {
        Some((p, q)) => {
            let q = parse_int(q)?;
            if q.is_zero() {
                return Err(CatError::Parse(format!("'{s}' has a zero denominator")));
            }
            Ok(Rational::new(parse_int(p)?, q))
        }
        None => Ok(Rational::from_integer(parse_int(s)?)),
    }
}

pub fn format_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// A finite set with strictly positive weights summing to one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawSpace", into = "RawSpace")]
pub struct FinProbSpace {
    points: FinSet,
    weights: Vec<Rational>,
}

#[derive(Serialize, Deserialize)]
struct RawSpace {
    points: Vec<String>,
    weights: Vec<String>,
}

impl TryFrom<RawSpace> for FinProbSpace {
    type Error = CatError;

    fn try_from(raw: RawSpace) -> Result<Self> {
        if raw.points.len() != raw.weights.len() {
            return Err(CatError::Parse("points and weights have different lengths".into()));
        }
        let weights = raw.weights.iter().map(|w| parse_rational(w)).collect::<Result<Vec<_>>>()?;
        FinProbSpace::new(raw.points.into_iter().zip(weights))
    }
}

impl From<FinProbSpace> for RawSpace {
    fn from(s: FinProbSpace) -> Self {
        RawSpace {
            points: s.points.elements().to_vec(),
            weights: s.weights.iter().map(format_rational).collect(),
        }
    }
}

impl FinProbSpace {
    /// Checks distinct labels, positivity and normalisation.
    pub fn new<I, S>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, Rational)>,
        S: Into<String>,
    {
        let space = FinProbSpace::unchecked(pairs)?;
        space.check()?;
        Ok(space)
    }

    /// Builds the space without checking positivity or normalisation.
    fn unchecked<I, S>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, Rational)>,
        S: Into<String>,
    {
        let mut v: Vec<(String, Rational)> = pairs.into_iter().map(|(p, w)| (p.into(), w)).collect();
        v.sort_by(|x, y| x.0.cmp(&y.0));
        let points = FinSet::from_distinct(v.iter().map(|(p, _)| p.clone()))?;
        Ok(FinProbSpace { points, weights: v.into_iter().map(|(_, w)| w).collect() })
    }

    pub fn check(&self) -> Result<()> {
        if let Some((p, w)) = self.iter().find(|(_, w)| !w.is_positive()) {
            return Err(CatError::invalid(format!(
                "point '{p}' has weight {} (full support)",
                format_rational(w)
            )));
        }
        let total: Rational = self.weights.iter().sum();
        if !total.is_one() {
            return Err(CatError::invalid(format!("weights sum to {} (normalisation)", format_rational(&total))));
        }
        Ok(())
    }

    pub fn uniform(points: FinSet) -> Result<Self> {
        let n = points.len() as i64;
        if n == 0 {
            return Err(CatError::invalid("a probability space cannot be empty (normalisation)"));
        }
        FinProbSpace::new(points.elements().iter().cloned().map(|p| (p, rat(1, n))))
    }

    /// The one-point space.
    pub fn point() -> Self {
        FinProbSpace { points: FinSet::new(["*"]), weights: vec![Rational::one()] }
    }

    pub fn points(&self) -> &FinSet {
        &self.points
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn weight(&self, p: &str) -> Option<&Rational> {
        self.points.index_of(p).map(|i| &self.weights[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Rational)> {
        self.points.iter().zip(&self.weights)
    }
}

impl fmt::Display for FinProbSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.iter().map(|(p, w)| format!("{p}:{}", format_rational(w))).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// A measure-preserving stochastic map; `entries[b][a] = r(b|a)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawStoch", into = "RawStoch")]
pub struct StochMap {
    pub src: FinProbSpace,
    pub dst: FinProbSpace,
    pub entries: Vec<Vec<Rational>>,
}

#[derive(Serialize, Deserialize)]
struct RawStoch {
    src: FinProbSpace,
    dst: FinProbSpace,
    entries: Vec<(String, String, String)>,
}

impl TryFrom<RawStoch> for StochMap {
    type Error = CatError;

    fn try_from(raw: RawStoch) -> Result<Self> {
        let mut entries = vec![vec![Rational::zero(); raw.src.len()]; raw.dst.len()];
        for (b, a, q) in &raw.entries {
            let i = raw.dst.points.index_of(b).ok_or_else(|| CatError::Parse(format!("entry row '{b}' is not a point of dst")))?;
            let j = raw.src.points.index_of(a).ok_or_else(|| CatError::Parse(format!("entry column '{a}' is not a point of src")))?;
            entries[i][j] = parse_rational(q)?;
        }
        Ok(StochMap { src: raw.src, dst: raw.dst, entries })
    }
}

impl From<StochMap> for RawStoch {
    fn from(m: StochMap) -> Self {
        let mut entries = Vec::new();
        for (i, b) in m.dst.points.iter().enumerate() {
            for (j, a) in m.src.points.iter().enumerate() {
                if !m.entries[i][j].is_zero() {
                    entries.push((b.clone(), a.clone(), format_rational(&m.entries[i][j])));
                }
            }
        }
        RawStoch { src: m.src, dst: m.dst, entries }
    }
}

impl StochMap {
    /// `r(b|a)`.
    pub fn prob(&self, b: &str, a: &str) -> Option<&Rational> {
        let i = self.dst.points.index_of(b)?;
        let j = self.src.points.index_of(a)?;
        Some(&self.entries[i][j])
    }

    /// For a deterministic map, the index of the image of each source point.
    pub fn as_function(&self) -> Option<Vec<usize>> {
        (0..self.src.len())
            .map(|j| {
                let mut hit = None;
                for i in 0..self.dst.len() {
                    let e = &self.entries[i][j];
                    if e.is_one() {
                        if hit.is_some() {
                            return None;
                        }
                        hit = Some(i);
                    } else if !e.is_zero() {
                        return None;
                    }
                }
                hit
            })
            .collect()
    }
}

impl fmt::Display for StochMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} -> {}", self.src, self.dst)?;
        for (i, b) in self.dst.points.iter().enumerate() {
            let row: Vec<String> = self.entries[i].iter().map(format_rational).collect();
            writeln!(f, "  {b}: [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

pub fn check_stoch(r: &StochMap) -> Result<()> {
    r.src.check()?;
    r.dst.check()?;
    if r.entries.len() != r.dst.len() || r.entries.iter().any(|row| row.len() != r.src.len()) {
        return Err(CatError::invalid("entry matrix shape does not match the spaces"));
    }
    for (i, row) in r.entries.iter().enumerate() {
        for (j, e) in row.iter().enumerate() {
            if e.is_negative() || *e > Rational::one() {
                return Err(CatError::invalid(format!(
                    "entry ({}, {}) = {} is outside [0, 1]",
                    r.dst.points.elements()[i],
                    r.src.points.elements()[j],
                    format_rational(e)
                )));
            }
        }
    }
    for (j, a) in r.src.points.iter().enumerate() {
        let s: Rational = r.entries.iter().map(|row| &row[j]).sum();
        if !s.is_one() {
            return Err(CatError::invalid(format!("column '{a}' has column sum {} (stochasticity)", format_rational(&s))));
        }
    }
    for (i, b) in r.dst.points.iter().enumerate() {
        let s: Rational = r.entries[i].iter().zip(&r.src.weights).map(|(e, w)| e * w).sum();
        if s != r.dst.weights[i] {
            return Err(CatError::invalid(format!(
                "mass {} pushed to '{b}' differs from its weight {} (measure preservation)",
                format_rational(&s),
                format_rational(&r.dst.weights[i])
            )));
        }
    }
    Ok(())
}

/// `(s ∘ r)(c|a) = Σ_b s(c|b) r(b|a)`.
pub fn fp_compose(s: &StochMap, r: &StochMap) -> Result<StochMap> {
    if r.dst != s.src {
        return Err(CatError::mismatch(format!("cannot compose: {} differs from {}", r.dst, s.src)));
    }
    let (nc, nb, na) = (s.dst.len(), s.src.len(), r.src.len());
    let mut entries = vec![vec![Rational::zero(); na]; nc];
    for (c, row) in entries.iter_mut().enumerate() {
        for (a, out) in row.iter_mut().enumerate() {
            let mut acc = Rational::zero();
            for b in 0..nb {
                if !s.entries[c][b].is_zero() && !r.entries[b][a].is_zero() {
                    acc += &s.entries[c][b] * &r.entries[b][a];
                }
            }
            *out = acc;
        }
    }
    Ok(StochMap { src: r.src.clone(), dst: s.dst.clone(), entries })
}

/// The Bayesian inverse `r†(a|b) = r(b|a) Pr_A(a) / Pr_B(b)`.
pub fn fp_bayes(r: &StochMap) -> StochMap {
    let entries = (0..r.src.len())
        .map(|a| {
            (0..r.dst.len())
                .map(|b| {
                    if r.dst.weights[b].is_zero() {
                        Rational::zero()
                    } else {
                        &r.entries[b][a] * &r.src.weights[a] / &r.dst.weights[b]
                    }
                })
                .collect()
        })
        .collect();
    StochMap { src: r.dst.clone(), dst: r.src.clone(), entries }
}

pub fn fp_identity(x: &FinProbSpace) -> StochMap {
    let n = x.len();
    let entries = (0..n)
        .map(|i| (0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect())
        .collect();
    StochMap { src: x.clone(), dst: x.clone(), entries }
}

pub fn fp_is_deterministic(f: &StochMap) -> bool {
    f.entries.iter().flatten().all(|e| e.is_zero() || e.is_one())
}

/// The pushforward of `src` along `f`, which must hit every point of `cod`.
pub fn pushforward(src: &FinProbSpace, cod: &FinSet, f: &BTreeMap<String, String>) -> Result<FinProbSpace> {
    let mut mass: BTreeMap<&str, Rational> = BTreeMap::new();
    for (p, w) in src.iter() {
        let b = f.get(p).ok_or_else(|| CatError::invalid(format!("function undefined at '{p}'")))?;
        if !cod.contains(b) {
            return Err(CatError::invalid(format!("image '{b}' is not in the codomain")));
        }
        *mass.entry(b.as_str()).or_insert_with(Rational::zero) += w;
    }
    if let Some(b) = cod.iter().find(|b| !mass.contains_key(b.as_str())) {
        return Err(CatError::invalid(format!("codomain point '{b}' is not hit, so its pushforward weight is zero (full support)")));
    }
    FinProbSpace::unchecked(mass.into_iter().map(|(b, w)| (b.to_string(), w)))
}

/// The deterministic map `δ_f` from `src` to `(cod, f_* Pr)`.
pub fn fp_delta(src: &FinProbSpace, cod: &FinSet, f: &BTreeMap<String, String>) -> Result<StochMap> {
    let dst = pushforward(src, cod, f)?;
    Ok(delta_between(src, &dst, f))
}

/// `δ_f` between given spaces, without checking measure preservation.
fn delta_between(src: &FinProbSpace, dst: &FinProbSpace, f: &BTreeMap<String, String>) -> StochMap {
    let entries = dst
        .points
        .iter()
        .map(|b| {
            src.points
                .iter()
                .map(|a| if f.get(a) == Some(b) { Rational::one() } else { Rational::zero() })
                .collect()
        })
        .collect();
    StochMap { src: src.clone(), dst: dst.clone(), entries }
}

/// The function underlying a deterministic map, by labels.
pub fn function_of(f: &StochMap) -> Option<BTreeMap<String, String>> {
    let idx = f.as_function()?;
    Some(
        f.src
            .points
            .iter()
            .zip(idx)
            .map(|(a, i)| (a.clone(), f.dst.points.elements()[i].clone()))
            .collect(),
    )
}

/// The span of δ-projections out of a weighted set of pairs.
fn weighted_projections(
    pairs: Vec<((String, String), Rational)>,
    a: &FinProbSpace,
    b: &FinProbSpace,
) -> Result<Span<StochMap>> {
    let apex = FinProbSpace::unchecked(pairs.iter().map(|((x, y), w)| (pair_label(x, y), w.clone())))?;
    let p1: BTreeMap<String, String> = pairs.iter().map(|((x, y), _)| (pair_label(x, y), x.clone())).collect();
    let p2: BTreeMap<String, String> = pairs.iter().map(|((x, y), _)| (pair_label(x, y), y.clone())).collect();
    Ok(Span::new(delta_between(&apex, a, &p1), delta_between(&apex, b, &p2)))
}

/// The dilator of `r`: the support `{(a, b) : r(b|a) ≠ 0}` weighted by
/// `r(b|a) Pr_A(a)`, with its two δ-projections.
pub fn fp_dilator(r: &StochMap) -> Result<Span<StochMap>> {
    let mut pairs = Vec::new();
    for (j, (a, wa)) in r.src.iter().enumerate() {
        for (i, b) in r.dst.points.iter().enumerate() {
            if !r.entries[i][j].is_zero() {
                pairs.push(((a.clone(), b.clone()), &r.entries[i][j] * wa));
            }
        }
    }
    weighted_projections(pairs, &r.src, &r.dst)
}

/// The conditional product of a cospan of deterministic maps: pairs
/// `(a, b)` over a common point `c`, weighted `Pr_A(a) Pr_B(b) / Pr_C(c)`.
pub fn fp_conditional_product(cs: &Cospan<StochMap>, mutation: Option<Mutation>) -> Result<Span<StochMap>> {
    let (Some(u), Some(v)) = (cs.left.as_function(), cs.right.as_function()) else {
        return Err(CatError::Precondition("conditional product needs deterministic legs".into()));
    };
    if cs.left.dst != cs.right.dst {
        return Err(CatError::mismatch("cospan legs have different codomains"));
    }
    let c = &cs.left.dst;
    let mut pairs = Vec::new();
    for (i, (a, wa)) in cs.left.src.iter().enumerate() {
        for (j, (b, wb)) in cs.right.src.iter().enumerate() {
            if u[i] == v[j] {
                let wc = &c.weights[u[i]];
                let denom = if active(mutation, Mutation::WrongConditionalDenominator) { wc * wc } else { wc.clone() };
                pairs.push(((a.clone(), b.clone()), wa * wb / denom));
            }
        }
    }
    weighted_projections(pairs, &cs.left.src, &cs.right.src)
}

/// The unique apex point over `(f(x), g(x))` for each `x`.
fn pairing_factor(monic: &Span<StochMap>, span: &Span<StochMap>) -> std::result::Result<Vec<usize>, String> {
    let (Some(l), Some(r), Some(f), Some(g)) = (
        monic.left.as_function(),
        monic.right.as_function(),
        span.left.as_function(),
        span.right.as_function(),
    ) else {
        return Err("legs are not deterministic".into());
    };
    if monic.left.dst != span.left.dst || monic.right.dst != span.right.dst {
        return Err("spans have different feet".into());
    }
    let mut index: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for z in 0..l.len() {
        index.entry((l[z], r[z])).or_default().push(z);
    }
    (0..f.len())
        .map(|x| match index.get(&(f[x], g[x])).map(Vec::as_slice) {
            Some([z]) => Ok(*z),
            Some(_) => Err(format!("several apex points over the image of '{}'", span.left.src.points.elements()[x])),
            None => Err(format!("no apex point over the image of '{}'", span.left.src.points.elements()[x])),
        })
        .collect()
}

/// δ of an index function, provided it is measure-preserving onto `dst`.
fn delta_preserving(src: &FinProbSpace, dst: &FinProbSpace, f: &[usize]) -> std::result::Result<StochMap, String> {
    let mut mass = vec![Rational::zero(); dst.len()];
    for (x, &z) in f.iter().enumerate() {
        mass[z] += &src.weights[x];
    }
    if mass != dst.weights {
        return Err("the factorising function does not preserve the measure".into());
    }
    let table: BTreeMap<String, String> = src
        .points
        .iter()
        .zip(f)
        .map(|(x, &z)| (x.clone(), dst.points.elements()[z].clone()))
        .collect();
    Ok(delta_between(src, dst, &table))
}

fn pairing_injective(span: &Span<StochMap>) -> bool {
    let (Some(l), Some(r)) = (span.left.as_function(), span.right.as_function()) else {
        return false;
    };
    let mut seen = BTreeSet::new();
    l.iter().zip(&r).all(|p| seen.insert(p))
}

/// Finite probability spaces with measure-preserving stochastic maps and
/// Bayesian inversion.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct FinProb;

impl Category for FinProb {
    type Obj = FinProbSpace;
    type Mor = StochMap;

    fn dom(&self, f: &StochMap) -> FinProbSpace {
        f.src.clone()
    }

    fn cod(&self, f: &StochMap) -> FinProbSpace {
        f.dst.clone()
    }

    fn identity(&self, x: &FinProbSpace) -> StochMap {
        fp_identity(x)
    }

    fn compose(&self, g: &StochMap, f: &StochMap) -> Result<StochMap> {
        fp_compose(g, f)
    }

    fn mor_eq(&self, f: &StochMap, g: &StochMap) -> bool {
        f == g
    }

    fn validate(&self, f: &StochMap) -> Result<()> {
        check_stoch(f)
    }
}

impl DaggerCategory for FinProb {
    fn dagger(&self, f: &StochMap) -> StochMap {
        fp_bayes(f)
    }
}

impl Dilatory for FinProb {
    fn dilator(&self, r: &StochMap) -> Result<Span<StochMap>> {
        fp_dilator(r)
    }

    fn mediate(&self, dilator: &Span<StochMap>, dilation: &Span<StochMap>) -> Result<StochMap> {
        let idx = pairing_factor(dilator, dilation).map_err(CatError::NoMediator)?;
        delta_preserving(&dilation.left.src, &dilator.left.src, &idx).map_err(CatError::NoMediator)
    }

    fn jointly_monic(&self, span: &Span<StochMap>) -> bool {
        pairing_injective(span)
    }
}

/// Joint distribution check for a commuting square of deterministic maps:
/// `P[X=a, Y=b] = P[X=a] P[Y=b] / P[Z=u(a)]` when `u(a) = v(b)`, else zero.
pub fn joint_law_independent(sq: &Square<StochMap>) -> Option<bool> {
    let (f, g, u, v) = (
        sq.f.as_function()?,
        sq.g.as_function()?,
        sq.u.as_function()?,
        sq.v.as_function()?,
    );
    let (na, nb) = (sq.f.dst.len(), sq.g.dst.len());
    let mut joint = vec![vec![Rational::zero(); nb]; na];
    for (x, w) in sq.f.src.weights.iter().enumerate() {
        joint[f[x]][g[x]] += w;
    }
    let c = &sq.u.dst;
    for a in 0..na {
        for b in 0..nb {
            let expected = if u[a] == v[b] {
                &sq.f.dst.weights[a] * &sq.g.dst.weights[b] / &c.weights[u[a]]
            } else {
                Rational::zero()
            };
            if joint[a][b] != expected {
                return Some(false);
            }
        }
    }
    Some(true)
}

/// Conditional independence of a commuting square of deterministic maps,
/// decided by `h†h = f†f g†g` and confirmed against the joint-law
/// formula. Disagreement between the two is an internal error.
pub fn fp_is_independent(sq: &Square<StochMap>) -> Result<bool> {
    if !FinProb.commutes(sq) {
        return Ok(false);
    }
    let by_diagonal = crate::independence::diagonal_independent(&FinProb, sq)?;
    let by_law = joint_law_independent(sq)
        .ok_or_else(|| CatError::Precondition("square legs must be deterministic".into()))?;
    if by_diagonal != by_law {
        return Err(CatError::Internal(format!(
            "diagonal criterion ({by_diagonal}) disagrees with the joint law ({by_law})"
        )));
    }
    Ok(by_diagonal)
}

/// Finite probability spaces with deterministic measure-preserving maps.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct FinProbDet {
    pub mutation: Option<Mutation>,
}

impl Category for FinProbDet {
    type Obj = FinProbSpace;
    type Mor = StochMap;

    fn dom(&self, f: &StochMap) -> FinProbSpace {
        f.src.clone()
    }

    fn cod(&self, f: &StochMap) -> FinProbSpace {
        f.dst.clone()
    }

    fn identity(&self, x: &FinProbSpace) -> StochMap {
        fp_identity(x)
    }

    fn compose(&self, g: &StochMap, f: &StochMap) -> Result<StochMap> {
        fp_compose(g, f)
    }

    fn mor_eq(&self, f: &StochMap, g: &StochMap) -> bool {
        f == g
    }

    fn validate(&self, f: &StochMap) -> Result<()> {
        check_stoch(f)?;
        if !fp_is_deterministic(f) {
            return Err(CatError::invalid("map is not deterministic"));
        }
        Ok(())
    }
}

impl IndependenceCategory for FinProbDet {
    fn is_independent(&self, sq: &Square<StochMap>) -> bool {
        crate::independence::diagonal_independent(&FinProb, sq).unwrap_or(false)
    }
}

impl EpiRegular for FinProbDet {
    fn independent_pullback(&self, cospan: &Cospan<StochMap>) -> Result<Span<StochMap>> {
        fp_conditional_product(cospan, self.mutation)
    }

    fn factorize(&self, span: &Span<StochMap>) -> Result<Factorization<StochMap>> {
        fp_factorize(span)
    }

    fn is_jointly_monic(&self, span: &Span<StochMap>) -> bool {
        span.left.src == span.right.src && pairing_injective(span)
    }

    fn factor_through(&self, monic: &Span<StochMap>, span: &Span<StochMap>) -> Option<StochMap> {
        let idx = pairing_factor(monic, span).ok()?;
        delta_preserving(&span.left.src, &monic.left.src, &idx).ok()
    }

    fn inverse(&self, f: &StochMap) -> Option<StochMap> {
        let idx = f.as_function()?;
        let distinct: BTreeSet<usize> = idx.iter().copied().collect();
        (distinct.len() == idx.len() && idx.len() == f.dst.len()).then(|| fp_bayes(f))
    }

    fn same_relation(&self, a: &Span<StochMap>, b: &Span<StochMap>) -> bool {
        match (self.relation_key(a), self.relation_key(b)) {
            (Some(x), Some(y)) => x == y,
            _ => false,
        }
    }

    fn relation_key(&self, span: &Span<StochMap>) -> Option<String> {
        let (l, r) = (span.left.as_function()?, span.right.as_function()?);
        let mut mass: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
        for (z, w) in span.left.src.weights.iter().enumerate() {
            *mass.entry((l[z], r[z])).or_insert_with(Rational::zero) += w;
        }
        let a = span.left.dst.points.elements();
        let b = span.right.dst.points.elements();
        let body: Vec<String> = mass
            .iter()
            .map(|((i, j), w)| format!("({},{}):{}", a[*i], b[*j], format_rational(w)))
            .collect();
        Some(format!("{}->{}:{}", span.left.dst, span.right.dst, body.join(";")))
    }
}

/// Factorises a span of deterministic maps through the image of its pairing,
/// carrying the pushforward measure.
pub fn fp_factorize(span: &Span<StochMap>) -> Result<Factorization<StochMap>> {
    let (Some(f), Some(g)) = (span.left.as_function(), span.right.as_function()) else {
        return Err(CatError::Precondition("factorisation needs deterministic legs".into()));
    };
    if span.left.src != span.right.src {
        return Err(CatError::mismatch("span legs have different domains"));
    }
    let a = span.left.dst.points.elements();
    let b = span.right.dst.points.elements();
    let mut mass: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
    for (x, w) in span.left.src.weights.iter().enumerate() {
        *mass.entry((f[x], g[x])).or_insert_with(Rational::zero) += w;
    }
    let pairs = mass.into_iter().map(|((i, j), w)| ((a[i].clone(), b[j].clone()), w)).collect();
    let legs = weighted_projections(pairs, &span.left.dst, &span.right.dst)?;
    let apex = legs.left.src.clone();
    let table: BTreeMap<String, String> = span
        .left
        .src
        .points
        .iter()
        .enumerate()
        .map(|(x, p)| (p.clone(), pair_label(&a[f[x]], &b[g[x]])))
        .collect();
    Ok(Factorization { epi: delta_between(&span.left.src, &apex, &table), legs })
}

impl CoisometryCategory for FinProbDet {
    type Envelope = FinProb;

    fn envelope(&self) -> FinProb {
        FinProb
    }
}

/// Spaces on `{0, …, n-1}` that refine `b` by splitting each point evenly.
fn even_refinements(b: &FinProbSpace, max: usize) -> Vec<StochMap> {
    let mut out = Vec::new();
    for n in b.len()..=max.max(b.len()) {
        for s in all_surjections(n, b.len()) {
            let mut fibre = vec![0i64; b.len()];
            for &j in &s {
                fibre[j] += 1;
            }
            let Ok(src) = FinProbSpace::new(
                s.iter().enumerate().map(|(i, &j)| (i.to_string(), &b.weights[j] / Rational::from_integer(fibre[j].into()))),
            ) else {
                continue;
            };
            let table = s
                .iter()
                .enumerate()
                .map(|(i, &j)| (i.to_string(), b.points.elements()[j].clone()))
                .collect();
            out.push(delta_between(&src, b, &table));
        }
    }
    out
}

impl FiniteEnumeration for FinProbDet {
    /// Uniform spaces on `{0, …, n-1}` for `1 ≤ n ≤ max`.
    fn small_objects(&self, max: usize) -> Vec<FinProbSpace> {
        (1..=max).filter_map(|n| FinProbSpace::uniform(FinSet::range(n)).ok()).collect()
    }

    fn hom(&self, a: &FinProbSpace, b: &FinProbSpace) -> Vec<StochMap> {
        all_surjections(a.len(), b.len())
            .into_iter()
            .filter_map(|s| delta_preserving(a, b, &s).ok())
            .collect()
    }

    fn homs_from(&self, a: &FinProbSpace, max: usize) -> Vec<StochMap> {
        let mut out = Vec::new();
        for k in 1..=max.min(a.len()) {
            let cod = FinSet::range(k);
            for s in all_surjections(a.len(), k) {
                let table = a
                    .points
                    .iter()
                    .zip(&s)
                    .map(|(x, &j)| (x.clone(), j.to_string()))
                    .collect();
                if let Ok(m) = fp_delta(a, &cod, &table) {
                    out.push(m);
                }
            }
        }
        out
    }

    /// Maps into `b` from even refinements of it; the full family of
    /// morphisms into `b` is infinite.
    fn homs_into(&self, b: &FinProbSpace, max: usize) -> Vec<StochMap> {
        even_refinements(b, max)
    }
}

/// Random spaces and maps with small denominators.
#[derive(Clone, Debug)]
pub struct FinProbSampler {
    pub max_size: usize,
    /// Weights and entries are drawn as ratios of integers below this bound.
    pub max_weight: u32,
    cat: FinProb,
}

impl FinProbSampler {
    pub fn new(max_size: usize) -> Self {
        FinProbSampler { max_size: max_size.max(1), max_weight: 4, cat: FinProb }
    }

    fn labels(&self, rng: &mut Rng, n: usize) -> Vec<String> {
        const PREFIXES: [&str; 4] = ["a", "b", "w", "s"];
        let p = PREFIXES[rng.random_range(0..PREFIXES.len())];
        (0..n).map(|i| format!("{p}{i}")).collect()
    }

    fn random_distribution(&self, rng: &mut Rng, n: usize, allow_zero: bool) -> Vec<Rational> {
        loop {
            let lo = if allow_zero { 0 } else { 1 };
            let raw: Vec<i64> = (0..n).map(|_| rng.random_range(lo..=self.max_weight as i64)).collect();
            let total: i64 = raw.iter().sum();
            if total > 0 {
                return raw.into_iter().map(|x| rat(x, total)).collect();
            }
        }
    }

    pub fn space_of_size(&self, rng: &mut Rng, n: usize) -> FinProbSpace {
        let w = self.random_distribution(rng, n.max(1), false);
        FinProbSpace::unchecked(self.labels(rng, n.max(1)).into_iter().zip(w)).unwrap_or_else(|_| FinProbSpace::point())
    }

    fn random_function_onto(&self, rng: &mut Rng, n: usize, k: usize) -> Vec<usize> {
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);
        let mut f = vec![0; n];
        for (i, &x) in order.iter().enumerate() {
            f[x] = if i < k { i } else { rng.random_range(0..k) };
        }
        f
    }
}

impl Sampler for FinProbSampler {
    type Cat = FinProb;

    fn category(&self) -> &FinProb {
        &self.cat
    }

    fn object(&self, rng: &mut Rng) -> FinProbSpace {
        let n = rng.random_range(1..=self.max_size);
        self.space_of_size(rng, n)
    }

    fn morphism_from(&self, rng: &mut Rng, a: &FinProbSpace) -> StochMap {
        let k = rng.random_range(1..=self.max_size);
        let mut cols: Vec<Vec<Rational>> = (0..a.len()).map(|_| self.random_distribution(rng, k, true)).collect();
        for b in 0..k {
            if cols.iter().all(|c| c[b].is_zero()) {
                let j = rng.random_range(0..a.len());
                let half = rat(1, 2);
                for e in cols[j].iter_mut() {
                    *e = &*e * &half;
                }
                cols[j][b] += half;
            }
        }
        let dst_weights: Vec<Rational> = (0..k)
            .map(|b| cols.iter().zip(a.weights()).map(|(c, w)| &c[b] * w).sum())
            .collect();
        let dst = FinProbSpace::unchecked(self.labels(rng, k).into_iter().zip(dst_weights))
            .unwrap_or_else(|_| FinProbSpace::point());
        let entries = (0..k).map(|b| cols.iter().map(|c| c[b].clone()).collect()).collect();
        StochMap { src: a.clone(), dst, entries }
    }

    fn coisometry_from(&self, rng: &mut Rng, a: &FinProbSpace) -> StochMap {
        let k = rng.random_range(1..=a.len());
        let f = self.random_function_onto(rng, a.len(), k);
        let labels = self.labels(rng, k);
        let cod = FinSet::new(labels.clone());
        let table = a.points.iter().zip(&f).map(|(x, &j)| (x.clone(), labels[j].clone())).collect();
        fp_delta(a, &cod, &table).unwrap_or_else(|_| fp_identity(a))
    }

    fn coisometry_into(&self, rng: &mut Rng, b: &FinProbSpace) -> StochMap {
        let mut pts = Vec::new();
        let mut table = BTreeMap::new();
        let prefix = self.labels(rng, 1).pop().unwrap_or_default();
        for (p, w) in b.iter() {
            let pieces = if rng.random_bool(0.4) { 2 } else { 1 };
            let split = self.random_distribution(rng, pieces, false);
            for s in split {
                let label = format!("{prefix}_{}", pts.len());
                table.insert(label.clone(), p.clone());
                pts.push((label, w * s));
            }
        }
        let src = FinProbSpace::unchecked(pts).unwrap_or_else(|_| b.clone());
        delta_between(&src, b, &table)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::{is_coisometry, is_isometry};

    fn space(ws: &[(&str, (i64, i64))]) -> FinProbSpace {
        FinProbSpace::new(ws.iter().map(|(p, (n, d))| (p.to_string(), rat(*n, *d)))).unwrap()
    }

    fn stoch(src: &FinProbSpace, dst: &FinProbSpace, e: &[&[(i64, i64)]]) -> StochMap {
        StochMap {
            src: src.clone(),
            dst: dst.clone(),
            entries: e.iter().map(|row| row.iter().map(|(n, d)| rat(*n, *d)).collect()).collect(),
        }
    }

    fn example() -> StochMap {
        let a = space(&[("a1", (1, 2)), ("a2", (1, 2))]);
        let b = space(&[("b1", (3, 4)), ("b2", (1, 4))]);
        stoch(&a, &b, &[&[(1, 1), (1, 2)], &[(0, 1), (1, 2)]])
    }

    #[test]
    fn bayesian_inverse_by_hand() {
        let r = example();
        check_stoch(&r).unwrap();
        let d = fp_bayes(&r);
        check_stoch(&d).unwrap();
        assert_eq!(d.entries, vec![vec![rat(2, 3), rat(0, 1)], vec![rat(1, 3), rat(1, 1)]]);
        assert_eq!(fp_bayes(&d), r);
    }

    #[test]
    fn dilator_of_the_example() {
        let r = example();
        let dil = fp_dilator(&r).unwrap();
        let apex = &dil.left.src;
        assert_eq!(apex.points().elements(), &["(a1|b1)", "(a2|b1)", "(a2|b2)"]);
        assert_eq!(apex.weights(), &[rat(1, 2), rat(1, 4), rat(1, 4)]);
        check_stoch(&dil.left).unwrap();
        check_stoch(&dil.right).unwrap();
        assert_eq!(fp_compose(&dil.right, &fp_bayes(&dil.left)).unwrap(), r);
    }

    #[test]
    fn uniform_column_is_not_coisometric() {
        let a = FinProbSpace::point();
        let b = space(&[("x", (1, 2)), ("y", (1, 2))]);
        let r = stoch(&a, &b, &[&[(1, 2)], &[(1, 2)]]);
        check_stoch(&r).unwrap();
        assert!(!fp_is_deterministic(&r));
        assert!(!is_coisometry(&FinProb, &r).unwrap());
        assert!(is_isometry(&FinProb, &r).unwrap());
    }

    #[test]
    fn product_over_the_point() {
        let a = space(&[("h", (1, 3)), ("t", (2, 3))]);
        let b = space(&[("0", (1, 4)), ("1", (3, 4))]);
        let pt = FinProbSpace::point();
        let bang = |s: &FinProbSpace| fp_delta(s, pt.points(), &s.points().iter().map(|p| (p.clone(), "*".to_string())).collect()).unwrap();
        let pb = fp_conditional_product(&Cospan::new(bang(&a), bang(&b)), None).unwrap();
        let w: Vec<Rational> = pb.left.src.weights().to_vec();
        assert_eq!(w, vec![rat(1, 12), rat(3, 12), rat(2, 12), rat(6, 12)]);
        assert!(fp_is_independent(&Square::new(pb.left.clone(), pb.right.clone(), bang(&a), bang(&b))).unwrap());
    }

    #[test]
    fn correlated_coins_are_dependent() {
        let omega = space(&[("hh", (1, 2)), ("tt", (1, 2))]);
        let coin = FinSet::new(["h", "t"]);
        let x = fp_delta(&omega, &coin, &[("hh", "h"), ("tt", "t")].iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()).unwrap();
        let pt = FinProbSpace::point();
        let bang = fp_delta(&x.dst, pt.points(), &coin.iter().map(|p| (p.clone(), "*".to_string())).collect()).unwrap();
        let sq = Square::new(x.clone(), x.clone(), bang.clone(), bang);
        assert!(!fp_is_independent(&sq).unwrap());
        let ident = fp_identity(&x.dst);
        assert!(fp_is_independent(&Square::new(x.clone(), x.clone(), ident.clone(), ident)).unwrap());
    }

    #[test]
    fn validation_names_column_sums() {
        let a = FinProbSpace::point();
        let b = space(&[("x", (1, 1))]);
        let r = stoch(&a, &b, &[&[(9, 10)]]);
        assert!(check_stoch(&r).unwrap_err().to_string().contains("column sum"));
    }

    #[test]
    fn json_round_trip() {
        let r = example();
        let s = serde_json::to_string(&r).unwrap();
        assert!(s.contains("\"1/2\""));
        let back: StochMap = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
    }
}
