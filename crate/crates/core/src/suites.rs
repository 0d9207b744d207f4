//! The law suites, run per instance with a seed. Each returns a [`Report`];
//! the mutation suite reruns the others with one defect switched on.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::category::{Category, DaggerCategory, Dilatory, Span, Square};
use crate::finprob::{fp_bayes, fp_compose, FinProb, FinProbDet, FinProbSampler};
use crate::independence::{dagger_independent, diagonal_independent, Coisom, EpiRegular, IndependenceCategory};
use crate::kits::{invertible_in, random_base, random_cospan, FinProbKit, Kit, MSurjKit, MatKit, Mor, PInjKit};
use crate::laws::{check_dagger_axioms, composable_pairs, paste, verify_dilator, IndependenceCase};
use crate::matcontr::{l2_functor, mat_codilator, Mat, Mat1, Matrix, ToleranceConfig};
use crate::msurj::FinSet;
use crate::mutation::Mutation;
use crate::pinj::{pi_codilator, PInj, PartialInjection};
use crate::relcat::{roundtrip_check, RelCat};
use crate::report::{to_json, Report};
use crate::sample::{seeded, FiniteEnumeration, Rng, Sampler};
use crate::category::{Codilatory, Cospan};
use crate::independence::CoEpiRegular;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Instance {
    MSurj,
    PInj,
    FinProb,
    Mat,
}

impl Instance {
    pub const ALL: [Instance; 4] = [Instance::MSurj, Instance::PInj, Instance::FinProb, Instance::Mat];

    pub fn name(self) -> &'static str {
        match self {
            Instance::MSurj => "msurj",
            Instance::PInj => "pinj",
            Instance::FinProb => "finprob",
            Instance::Mat => "mat",
        }
    }
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Instance {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Instance::ALL
            .into_iter()
            .find(|i| i.name() == s)
            .ok_or_else(|| format!("unknown category '{s}' (expected msurj, pinj, finprob or mat)"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Overrides every suite's default sample count.
    pub samples: Option<usize>,
    pub tol: ToleranceConfig,
    pub mutation: Option<Mutation>,
    /// Largest sampled set size, or matrix dimension.
    pub size: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { seed: 42, samples: None, tol: ToleranceConfig::default(), mutation: None, size: 4 }
    }
}

impl SuiteConfig {
    fn n(&self, default: usize) -> usize {
        self.samples.unwrap_or(default)
    }

    fn rng(&self, salt: u64) -> Rng {
        seeded(self.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(salt))
    }
}

/// Something to do with a kit of any instance.
pub trait KitVisitor {
    type Out;
    fn visit<K: Kit>(self, k: &K) -> Self::Out;
}

pub fn with_kit<V: KitVisitor>(inst: Instance, cfg: &SuiteConfig, v: V) -> V::Out {
    match inst {
        Instance::MSurj => v.visit(&MSurjKit::new(cfg.size, cfg.mutation)),
        Instance::PInj => v.visit(&PInjKit::new(cfg.size)),
        Instance::FinProb => v.visit(&FinProbKit::new(cfg.size, cfg.mutation)),
        Instance::Mat => v.visit(&MatKit::new(cfg.size, cfg.tol, cfg.mutation)),
    }
}

/// The suites that run on every instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Dagger,
    Independence,
    EpiRegular,
    Dilator,
    Roundtrip,
    CrossTheory,
}

impl Suite {
    pub const ALL: [Suite; 6] =
        [Suite::Dagger, Suite::Independence, Suite::EpiRegular, Suite::Dilator, Suite::Roundtrip, Suite::CrossTheory];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Dagger => "dagger",
            Suite::Independence => "independence",
            Suite::EpiRegular => "epi-regular",
            Suite::Dilator => "dilator",
            Suite::Roundtrip => "roundtrip",
            Suite::CrossTheory => "cross-theory",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Suite::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| format!("unknown suite '{s}'"))
    }
}

struct RunSuite<'a>(Suite, &'a SuiteConfig);

impl KitVisitor for RunSuite<'_> {
    type Out = Report;

    fn visit<K: Kit>(self, k: &K) -> Report {
        let cfg = self.1;
        let mut rep = match self.0 {
            Suite::Dagger => dagger_suite(k, cfg),
            Suite::Independence => independence_suite(k, cfg),
            Suite::EpiRegular => epi_regular_suite(k, cfg),
            Suite::Dilator => dilator_suite(k, cfg),
            Suite::Roundtrip => roundtrip_suite(k, cfg),
            Suite::CrossTheory => cross_theory_suite(k, cfg),
        };
        rep.suite = format!("{} {}", self.0, k.name());
        rep
    }
}

pub fn run_suite(inst: Instance, suite: Suite, cfg: &SuiteConfig) -> Report {
    with_kit(inst, cfg, RunSuite(suite, cfg))
}

fn merge(name: &str, seed: u64, parts: Vec<Report>) -> Report {
    let mut rep = Report::new(name, Some(seed));
    for p in parts {
        rep.absorb(p);
    }
    rep
}

/// Dagger laws on composable pairs of the envelope.
pub fn dagger_suite<K: Kit>(k: &K, cfg: &SuiteConfig) -> Report {
    let n = cfg.n(500);
    let mut rng = cfg.rng(1);
    let pairs = composable_pairs(k.sampler(), &mut rng, n);
    check_dagger_axioms(k.env(), pairs, n, Some(cfg.seed))
}

fn pullback_square<C: EpiRegular>(c: &C, cs: &Cospan<C::Mor>) -> crate::Result<Square<C::Mor>> {
    let pb = c.independent_pullback(cs)?;
    Ok(Square::new(pb.left, pb.right, cs.left.clone(), cs.right.clone()))
}

/// Two independent pullback squares sharing an edge: the right one over a
/// random cospan, the left one over its top edge.
fn pasting_pair<K: Kit>(k: &K, rng: &mut Rng) -> crate::Result<(Square<Mor<K>>, Square<Mor<K>>)> {
    let c = k.base();
    let right = pullback_square(c, &random_cospan(k, rng))?;
    let u = k.sampler().coisometry_into(rng, &c.cod(&right.f));
    let left = pullback_square(c, &Cospan::new(u, right.f.clone()))?;
    Ok((left, right))
}

/// Independence axioms on pullback squares, pastings, identity squares and
/// arbitrary generated squares.
pub fn independence_suite<K: Kit>(k: &K, cfg: &SuiteConfig) -> Report {
    let n = cfg.n(200);
    let mut rng = cfg.rng(2);
    let c = k.base();
    let mut rep = Report::new("independence", Some(cfg.seed));
    let mut arbitrary = k.squares(&mut rng, n / 5 + 1).into_iter();
    let mut cases = Vec::with_capacity(n);
    for i in 0..n {
        let case = match i % 5 {
            0 => pullback_square(c, &random_cospan(k, &mut rng)).map(IndependenceCase::Asserted),
            1 => pasting_pair(k, &mut rng).map(|(l, r)| IndependenceCase::Pasting(l, r)),
            2 => Ok(IndependenceCase::Morphism(random_base(k, &mut rng))),
            3 => match arbitrary.next() {
                Some(sq) => Ok(IndependenceCase::Arbitrary(sq)),
                None => Ok(IndependenceCase::Morphism(random_base(k, &mut rng))),
            },
            _ => {
                let f = random_base(k, &mut rng);
                let (x, a) = (c.dom(&f), c.cod(&f));
                Ok(IndependenceCase::Asserted(Square::new(c.identity(&x), f.clone(), f, c.identity(&a))))
            }
        };
        match case {
            Ok(case) => cases.push(case),
            Err(e) => rep.fail("construction", e.to_string(), Vec::new()),
        }
    }
    let m = cases.len();
    rep.absorb(crate::laws::check_independence_axioms(c, cases, m, Some(cfg.seed)));
    rep
}

/// `sq` is independent, and its span is, up to a unique isomorphism, the
/// chosen independent pullback of its cospan.
pub fn is_independent_pullback<C: EpiRegular>(c: &C, sq: &Square<C::Mor>) -> bool {
    if !c.is_independent(sq) || !c.commutes(sq) {
        return false;
    }
    let Ok(pb) = c.independent_pullback(&sq.cospan()) else { return false };
    match c.factor_through(&pb, &sq.span()) {
        Some(t) => invertible_in(c, &t),
        None => false,
    }
}

/// Independent pullbacks exist and are jointly monic, factorisations
/// recompose, and the epi parts lift against jointly monic spans.
pub fn epi_regular_suite<K: Kit>(k: &K, cfg: &SuiteConfig) -> Report {
    let n = cfg.n(100);
    let mut rng = cfg.rng(3);
    let c = k.base();
    let mut rep = Report::new("epi-regular", Some(cfg.seed));
    for _ in 0..n {
        let cs = random_cospan(k, &mut rng);
        match pullback_square(c, &cs) {
            Ok(sq) => {
                let valid = c.validate(&sq.f).and(c.validate(&sq.g));
                rep.check(valid.is_ok(), "pullback legs valid", || format!("{valid:?}"), || vec![to_json(&cs)]);
                rep.check(c.commutes(&sq), "pullback commutes", || "u p1 ≠ v p2".into(), || vec![to_json(&sq)]);
                rep.check(c.is_independent(&sq), "pullback independent", || "square not independent".into(), || {
                    vec![to_json(&sq)]
                });
                rep.check(c.is_jointly_monic(&sq.span()), "pullback jointly monic", || "legs not jointly monic".into(), || {
                    vec![to_json(&sq)]
                });
            }
            Err(e) => rep.fail("independent pullback", e.to_string(), vec![to_json(&cs)]),
        }
        let u = cs.left.clone();
        let (a, t) = (c.dom(&u), c.cod(&u));
        let trivial = Square::new(c.identity(&a), u.clone(), u.clone(), c.identity(&t));
        rep.check(is_independent_pullback(c, &trivial), "(1, u) independent pullback", || {
            "(1, u, u, 1) is not an independent pullback of (u, 1)".into()
        }, || vec![to_json(&u)]);

        let x = k.sampler().object(&mut rng);
        let span = Span::new(k.sampler().coisometry_from(&mut rng, &x), k.sampler().coisometry_from(&mut rng, &x));
        match c.factorize(&span) {
            Ok(f) => {
                let l = c.compose(&f.legs.left, &f.epi);
                let r = c.compose(&f.legs.right, &f.epi);
                let ok = matches!((&l, &r), (Ok(l), Ok(r)) if k.close(l, &span.left) && k.close(r, &span.right));
                rep.check(ok, "factorisation recomposes", || "m ∘ e ≠ span".into(), || vec![to_json(&span), to_json(&f)]);
                rep.check(c.is_jointly_monic(&f.legs), "image jointly monic", || "image legs not jointly monic".into(), || {
                    vec![to_json(&f)]
                });
                let valid = c.validate(&f.epi).and(c.validate(&f.legs.left)).and(c.validate(&f.legs.right));
                rep.check(valid.is_ok(), "factorisation valid", || format!("{valid:?}"), || vec![to_json(&f)]);
            }
            Err(e) => rep.fail("factorisation", e.to_string(), vec![to_json(&span)]),
        }
    }
    k.strong_epi(&mut rng, &mut rep);
    rep
}

/// The instance dilator of sampled morphisms against five constructed
/// alternatives each, `(1, f)` for coisometries, and the dilators of the
/// relation category.
pub fn dilator_suite<K: Kit>(k: &K, cfg: &SuiteConfig) -> Report {
    let n = cfg.n(100);
    let mut rng = cfg.rng(4);
    let d = k.env();
    let s = k.sampler();
    let mut rep = Report::new("dilator", Some(cfg.seed));
    for _ in 0..n {
        let a = s.object(&mut rng);
        let r = s.morphism_from(&mut rng, &a);
        let dil = match d.dilator(&r) {
            Ok(x) => x,
            Err(e) => {
                rep.fail("dilator exists", e.to_string(), vec![to_json(&r)]);
                continue;
            }
        };
        let apex = d.dom(&dil.left);
        let mut alts = Vec::new();
        let mut mediators = Vec::new();
        for _ in 0..5 {
            let e = s.coisometry_into(&mut rng, &apex);
            if let (Ok(l), Ok(rt)) = (d.compose(&dil.left, &e), d.compose(&dil.right, &e)) {
                alts.push(Span::new(l, rt));
                mediators.push(e);
            }
        }
        match verify_dilator(d, &r, &dil, &alts) {
            Ok(chk) => {
                rep.check(chk.holds(), "dilator", || chk.describe(), || vec![to_json(&r), to_json(&dil)]);
                for (alt, e) in alts.iter().zip(&mediators) {
                    let got = d.mediate(&dil, alt);
                    let ok = got.as_ref().is_ok_and(|m| k.close(m, e));
                    rep.check(ok, "mediator recovered", || format!("{got:?}"), || vec![to_json(&r), to_json(e)]);
                }
            }
            Err(e) => rep.fail("dilator", e.to_string(), vec![to_json(&r), to_json(&dil)]),
        }
        let f = s.coisometry_from(&mut rng, &a);
        let trivial = Span::new(d.identity(&a), f.clone());
        let alts = d.dilator(&f).map(|x| vec![x]).unwrap_or_default();
        match verify_dilator(d, &f, &trivial, &alts) {
            Ok(chk) => rep.check(chk.holds(), "(1, f) dilator", || chk.describe(), || vec![to_json(&f)]),
            Err(e) => rep.fail("(1, f) dilator", e.to_string(), vec![to_json(&f)]),
        }
    }
    let rel = RelCat::new(k.base().clone()).with_mutation(cfg.mutation);
    for _ in 0..(n / 2) {
        let a = s.object(&mut rng);
        let m = s.morphism_from(&mut rng, &a);
        let r = match rel.from_envelope(&m) {
            Ok(r) => r,
            Err(e) => {
                rep.fail("relation dilator", e.to_string(), vec![to_json(&m)]);
                continue;
            }
        };
        let (d1, d2) = rel.rel_dilator(&r);
        let apex = k.base().dom(&r.rep.left);
        let turn = rel.eta(&k.automorphism(&mut rng, &apex));
        let alt = rel.compose(&d1, &turn).and_then(|l| Ok(Span::new(l, rel.compose(&d2, &turn)?)));
        let alts: Vec<_> = alt.into_iter().collect();
        match verify_dilator(&rel, &r, &Span::new(d1, d2), &alts) {
            Ok(chk) => rep.check(chk.holds(), "relation dilator", || chk.describe(), || vec![to_json(&r)]),
            Err(e) => rep.fail("relation dilator", e.to_string(), vec![to_json(&r)]),
        }
    }
    rep
}

/// `ε` and `η` form an equivalence: sampled functoriality and triangle,
/// exhaustive `η` on small relations, and well-definedness of composition.
pub fn roundtrip_suite<K: Kit>(k: &K, cfg: &SuiteConfig) -> Report {
    let n = cfg.n(200);
    let mut rng = cfg.rng(5);
    let c = k.base();
    let rel = RelCat::new(c.clone()).with_mutation(cfg.mutation);
    let w = roundtrip_check(&rel, k.sampler(), k.name(), cfg.seed, n, |a, b| k.close(a, b));
    let mut parts: Vec<Report> = w.reports().into_iter().cloned().collect();

    let mut eta = Report::new("η onto coisometries", Some(cfg.seed));
    for span in k.small_relations(&mut rng) {
        let r = match rel.relation(span.clone()) {
            Ok(r) => r,
            Err(e) => {
                eta.fail("relation", e.to_string(), vec![to_json(&span)]);
                continue;
            }
        };
        let target = rel.cod(&r);
        let coiso = rel.compose(&r, &rel.dagger(&r)).map(|x| rel.rel_eq(&x, &rel.rel_identity(&target)));
        let invertible = invertible_in(c, &r.rep.left);
        match coiso {
            Ok(coiso) => eta.check(coiso == invertible, "coisometric iff of the form [1, f]", || {
                format!("r r† = 1: {coiso}, left leg invertible: {invertible}")
            }, || vec![to_json(&span)]),
            Err(e) => eta.fail("coisometric iff of the form [1, f]", e.to_string(), vec![to_json(&span)]),
        }
        if invertible {
            let ok = rel.as_base(&r).is_ok_and(|f| rel.rel_eq(&rel.eta(&f), &r));
            eta.check(ok, "η full", || "r ≠ [1, r2 r1⁻¹]".into(), || vec![to_json(&span)]);
        }
    }
    for group in k.small_homs(&mut rng) {
        for (i, f) in group.iter().enumerate() {
            for g in &group[i..] {
                let same = c.mor_eq(f, g);
                let rel_same = rel.rel_eq(&rel.eta(f), &rel.eta(g));
                eta.check(same == rel_same, "η faithful", || format!("f = g: {same}, [1,f] = [1,g]: {rel_same}"), || {
                    vec![to_json(f), to_json(g)]
                });
            }
        }
    }
    parts.push(eta);

    let mut well = Report::new("composition well defined", Some(cfg.seed));
    let coisom = Coisom::new(rel.clone());
    for sq in k.squares(&mut rng, n / 4) {
        if !c.commutes(&sq) {
            continue;
        }
        let lifted = Square::new(rel.eta(&sq.f), rel.eta(&sq.g), rel.eta(&sq.u), rel.eta(&sq.v));
        let (a, b) = (c.is_independent(&sq), coisom.is_independent(&lifted));
        well.check(a == b, "η preserves and reflects independence", || format!("base: {a}, relations: {b}"), || {
            vec![to_json(&sq)]
        });
    }
    let s = k.sampler();
    let d = k.env();
    for _ in 0..(n / 4) {
        let x = s.object(&mut rng);
        let m1 = s.morphism_from(&mut rng, &x);
        let m2 = s.morphism_from(&mut rng, &d.cod(&m1));
        let m3 = s.morphism_from(&mut rng, &d.cod(&m2));
        let rels: Result<Vec<_>, _> = [&m1, &m2, &m3].into_iter().map(|m| rel.from_envelope(m)).collect();
        let rels = match rels {
            Ok(v) => v,
            Err(e) => {
                well.fail("relation", e.to_string(), vec![to_json(&m1)]);
                continue;
            }
        };
        let (r, s2, t) = (&rels[0], &rels[1], &rels[2]);
        let inputs = || vec![to_json(&m1), to_json(&m2), to_json(&m3)];
        let lhs = rel.compose(s2, r).and_then(|sr| rel.compose(t, &sr));
        let rhs = rel.compose(t, s2).and_then(|ts| rel.compose(&ts, r));
        match (lhs, rhs) {
            (Ok(x), Ok(y)) => well.check(rel.rel_eq(&x, &y), "associativity", || "t(sr) ≠ (ts)r".into(), inputs),
            (Err(e), _) | (_, Err(e)) => well.fail("associativity", e.to_string(), inputs()),
        }
        let apex = c.dom(&r.rep.left);
        let iso = k.automorphism(&mut rng, &apex);
        let moved = c
            .compose(&r.rep.left, &iso)
            .and_then(|l| Ok(Span::new(l, c.compose(&r.rep.right, &iso)?)))
            .and_then(|sp| rel.relation(sp));
        match moved {
            Ok(r2) => {
                well.check(rel.rel_eq(&r2, r), "representative change", || "reindexed span is a different relation".into(), inputs);
                let a = rel.compose(s2, r).map(|x| rel.epsilon(&x));
                let b = rel.compose(s2, &r2).map(|x| rel.epsilon(&x));
                let ok = matches!((&a, &b), (Ok(Ok(a)), Ok(Ok(b))) if k.close(a, b));
                well.check(ok, "composite independent of representative", || format!("{a:?} vs {b:?}"), inputs);
            }
            Err(e) => well.fail("representative change", e.to_string(), inputs()),
        }
    }
    parts.push(well);
    merge("roundtrip", cfg.seed, parts)
}

/// Checks that relate the independence structure to the dagger: the
/// pushout property of independent squares against enumerated cocones, the
/// diagonal criterion, the pasting lemma, and monic ⟺ invertible.
pub fn cross_theory_suite<K: Kit>(k: &K, cfg: &SuiteConfig) -> Report {
    let n = cfg.n(100);
    let mut rng = cfg.rng(6);
    let c = k.base();
    let d = k.env();
    let mut rep = Report::new("cross-theory", Some(cfg.seed));

    let mut squares = k.squares(&mut rng, n);
    for _ in 0..(n / 4) {
        if let Ok(sq) = pullback_square(c, &random_cospan(k, &mut rng)) {
            squares.push(sq);
        }
    }
    for sq in &squares {
        let commutes = c.commutes(sq);
        let ind = c.is_independent(sq);
        match diagonal_independent(d, sq) {
            Ok(diag) if commutes => rep.check(ind == diag, "diagonal criterion", || {
                format!("instance: {ind}, h†h = f†f g†g: {diag}")
            }, || vec![to_json(sq)]),
            Ok(_) => rep.check(!ind, "I1 commutation", || "non-commuting square called independent".into(), || vec![to_json(sq)]),
            Err(e) => rep.fail("diagonal criterion", e.to_string(), vec![to_json(sq)]),
        }
        if commutes {
            let dag = dagger_independent(d, sq);
            rep.check(dag == ind, "dagger criterion", || format!("instance: {ind}, g f† = v† u: {dag}"), || vec![to_json(sq)]);
        }
        if !(ind && commutes) {
            continue;
        }
        for co in k.cocones(&mut rng, sq) {
            pushout_property(k, sq, &co, &mut rep);
        }
    }

    for _ in 0..50.min(n.max(1)) {
        match pasting_pair(k, &mut rng) {
            Ok((l, r)) => {
                let outer = paste(c, &l, &r);
                let ok = outer.as_ref().is_ok_and(|o| is_independent_pullback(c, o));
                rep.check(ok, "pasting lemma", || "pasted pullbacks are not an independent pullback".into(), || {
                    vec![to_json(&l), to_json(&r)]
                });
                let left_ok = is_independent_pullback(c, &l);
                rep.check(left_ok, "pasting lemma", || "left square is not an independent pullback".into(), || vec![to_json(&l)]);
            }
            Err(e) => rep.fail("pasting lemma", e.to_string(), Vec::new()),
        }
    }
    k.monic_iff_invertible(&mut rng, &mut rep);
    rep
}

/// For an independent square `(f, g, u, v)` and a cocone `(c1, c2)` under
/// `(f, g)` in the envelope, `c1 u† = c2 v† = d h†` (with `h = u f` and
/// `d = c1 f`) is the unique map out of the apex with `c u = c1`, `c v = c2`.
fn pushout_property<K: Kit>(k: &K, sq: &Square<Mor<K>>, co: &Cospan<Mor<K>>, rep: &mut Report) {
    let d = k.env();
    let inputs = || vec![to_json(sq), to_json(co)];
    let step = || -> crate::Result<(Mor<K>, Mor<K>, Mor<K>, Mor<K>, Mor<K>)> {
        let h = d.compose(&sq.u, &sq.f)?;
        let dd = d.compose(&co.left, &sq.f)?;
        let via_h = d.compose(&dd, &d.dagger(&h))?;
        let via_u = d.compose(&co.left, &d.dagger(&sq.u))?;
        let via_v = d.compose(&co.right, &d.dagger(&sq.v))?;
        let back_u = d.compose(&via_h, &sq.u)?;
        let back_v = d.compose(&via_h, &sq.v)?;
        Ok((via_h, via_u, via_v, back_u, back_v))
    };
    match step() {
        Ok((via_h, via_u, via_v, back_u, back_v)) => {
            let ok = k.close(&via_h, &via_u) && k.close(&via_h, &via_v);
            rep.check(ok, "pushout mediator", || "c1 u†, c2 v† and d h† differ".into(), inputs);
            let ok = k.close(&back_u, &co.left) && k.close(&back_v, &co.right);
            rep.check(ok, "pushout triangles", || "c u ≠ c1 or c v ≠ c2".into(), inputs);
        }
        Err(e) => rep.fail("pushout mediator", e.to_string(), inputs()),
    }
}

/// Relabels the apex of a cospan of partial injections by position, to
/// `[n]`.
fn ordinal_apex(cs: &Cospan<PartialInjection>) -> Cospan<PartialInjection> {
    let apex = &cs.left.cod;
    let pos = |b: &str| (apex.index_of(b).unwrap_or(0) + 1).to_string();
    let relabel = |p: &PartialInjection| PartialInjection {
        dom: p.dom.clone(),
        cod: FinSet::ordinal(apex.len()),
        pairs: p.pairs.iter().map(|(a, b)| (a.clone(), pos(b))).collect(),
    };
    Cospan::new(relabel(&cs.left), relabel(&cs.right))
}

/// Every partial injection `[m] → [n]` with `m, n ≤ max`: the matrix
/// codilator of its 0/1 matrix agrees, up to a unitary on the apex, with the
/// image of its codilator of partial injections.
pub fn l2_suite(cfg: &SuiteConfig, max: usize) -> Report {
    let mut rep = Report::new("l2 codilator", Some(cfg.seed));
    let mat = Mat { tol: cfg.tol, mutation: cfg.mutation };
    let mat1 = Mat1 { tol: cfg.tol, mutation: cfg.mutation };
    for m in 0..=max {
        for n in 0..=max {
            for r in PInj.hom(&FinSet::ordinal(m), &FinSet::ordinal(n)) {
                let inputs = || vec![to_json(&r)];
                let step = || -> crate::Result<(Cospan<Matrix>, Cospan<Matrix>)> {
                    let lr = l2_functor(&r)?;
                    let ours = mat_codilator(&lr, &cfg.tol, cfg.mutation)?.cospan;
                    let cs = ordinal_apex(&pi_codilator(&r));
                    let image = Cospan::new(l2_functor(&cs.left)?, l2_functor(&cs.right)?);
                    Ok((ours, image))
                };
                match step() {
                    Ok((ours, image)) => {
                        let same_dim = ours.left.rows() == image.left.rows();
                        rep.check(same_dim, "apex dimension", || {
                            format!("{} vs {}", ours.left.rows(), image.left.rows())
                        }, inputs);
                        if !same_dim {
                            continue;
                        }
                        let unitary = mat.comediate(&ours, &image).is_ok_and(|u| {
                            u.rows() == u.cols() && u.transpose().mul(&u).dist(&Matrix::identity(u.cols())) <= cfg.tol.eq_tol
                        });
                        rep.check(unitary, "unitary comparison", || "no unitary between the codilators".into(), inputs);
                        rep.check(mat1.same_corelation(&ours, &image), "same corelation", || "BᵀA differ".into(), inputs);
                    }
                    Err(e) => rep.fail("codilator", e.to_string(), inputs()),
                }
            }
        }
    }
    rep
}

/// Relations of deterministic maps are couplings: composing them as
/// relations agrees exactly with composing the stochastic maps, and the
/// Bayesian inverse is an involution.
pub fn couplings_suite(cfg: &SuiteConfig) -> Report {
    let n = cfg.n(200);
    let mut rng = cfg.rng(8);
    let sampler = FinProbSampler::new(cfg.size);
    let rel = RelCat::new(FinProbDet { mutation: cfg.mutation }).with_mutation(cfg.mutation);
    let mut rep = Report::new("couplings", Some(cfg.seed));
    for _ in 0..n {
        let a = sampler.object(&mut rng);
        let r = sampler.morphism_from(&mut rng, &a);
        let s = sampler.morphism_from(&mut rng, &FinProb.cod(&r));
        let inputs = || vec![to_json(&r), to_json(&s)];
        let via_rel = rel
            .from_envelope(&r)
            .and_then(|rr| Ok((rr, rel.from_envelope(&s)?)))
            .and_then(|(rr, ss)| rel.compose(&ss, &rr))
            .and_then(|x| rel.epsilon(&x));
        match (via_rel, fp_compose(&s, &r)) {
            (Ok(x), Ok(y)) => rep.check(x == y, "coupling composite", || format!("relations: {x}, matrices: {y}"), inputs),
            (Err(e), _) | (_, Err(e)) => rep.fail("coupling composite", e.to_string(), inputs()),
        }
        rep.check(fp_bayes(&fp_bayes(&r)) == r, "Bayesian inverse involution", || "r†† ≠ r".into(), || vec![to_json(&r)]);
    }
    rep
}

/// Which suites noticed one mutation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MutationOutcome {
    pub mutation: Mutation,
    /// `"suite instance"` for every suite that reported a failure.
    pub caught_by: Vec<String>,
}

impl MutationOutcome {
    pub fn caught(&self) -> bool {
        !self.caught_by.is_empty()
    }
}

/// The instances a mutation can affect.
pub fn affected(m: Mutation) -> &'static [Instance] {
    match m {
        Mutation::SkipFactorisation => &Instance::ALL,
        Mutation::IdentityDaggerMat | Mutation::UnpivotedRankEstimate => &[Instance::Mat],
        Mutation::DropSurjectivityRepair => &[Instance::MSurj],
        Mutation::WrongConditionalDenominator => &[Instance::FinProb],
    }
}

/// Reruns the dagger, independence, epi-regular, dilator and roundtrip
/// suites on the affected instances with `m` switched on.
pub fn mutation_suite(cfg: &SuiteConfig, m: Mutation) -> MutationOutcome {
    let cfg = SuiteConfig { mutation: Some(m), samples: Some(cfg.samples.unwrap_or(40)), ..*cfg };
    let mut caught_by = Vec::new();
    for &inst in affected(m) {
        for suite in &Suite::ALL[..5] {
            let rep = run_suite(inst, *suite, &cfg);
            if !rep.ok() {
                caught_by.push(rep.suite);
            }
        }
    }
    MutationOutcome { mutation: m, caught_by }
}
