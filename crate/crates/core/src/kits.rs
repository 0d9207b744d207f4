//! Each instance bundled for the law suites: its epi-regular category of
//! coisometries, the dilatory envelope, a sampler, and the parts of the
//! suites that depend on the instance (enumeration for the finite ones,
//! linear algebra for matrices).

use std::collections::{BTreeMap, HashMap};

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng as _;

use crate::category::{Category, Cospan, Span, Square};
use crate::dual::Dual;
use crate::finprob::{fp_delta, FinProb, FinProbDet, FinProbSampler};
use crate::independence::{CoisometryCategory, EpiRegular};
use crate::matcontr::{null_space, op_norm, rank, Mat, Mat1, MatSampler, Matrix, ToleranceConfig};
use crate::msurj::{FinSet, MSurj, MSurjSampler, MultiMap, Surj};
use crate::mutation::Mutation;
use crate::pinj::{Inj, PInj, PInjSampler, PartialInjection};
use crate::report::{to_json, Report};
use crate::sample::{DualSampler, FiniteEnumeration, Rng, Sampler};

pub type Obj<K> = <<K as Kit>::C as Category>::Obj;
pub type Mor<K> = <<K as Kit>::C as Category>::Mor;
pub type Env<K> = <<K as Kit>::C as CoisometryCategory>::Envelope;

pub trait Kit: Sized {
    /// Coisometries of the envelope, with their independence structure.
    type C: CoisometryCategory + Clone;
    type S: Sampler<Cat = Env<Self>>;

    fn name(&self) -> &'static str;
    fn base(&self) -> &Self::C;
    fn env(&self) -> &Env<Self>;
    fn sampler(&self) -> &Self::S;

    /// Equality of results of several chained operations.
    fn close(&self, a: &Mor<Self>, b: &Mor<Self>) -> bool {
        self.env().mor_eq(a, b)
    }

    /// A random invertible morphism `x → x` of the base.
    fn automorphism(&self, rng: &mut Rng, x: &Obj<Self>) -> Mor<Self>;

    /// Squares of base morphisms, mostly commuting, with and without
    /// independence.
    fn squares(&self, rng: &mut Rng, n: usize) -> Vec<Square<Mor<Self>>>;

    /// Cocones `(c1, c2)` in the envelope under the span of `sq`.
    fn cocones(&self, rng: &mut Rng, sq: &Square<Mor<Self>>) -> Vec<Cospan<Mor<Self>>>;

    /// Diagonal fillers against jointly monic spans.
    fn strong_epi(&self, rng: &mut Rng, rep: &mut Report);

    /// Monic base morphisms are exactly the invertible ones.
    fn monic_iff_invertible(&self, rng: &mut Rng, rep: &mut Report);

    /// Jointly monic spans with small apex.
    fn small_relations(&self, rng: &mut Rng) -> Vec<Span<Mor<Self>>>;

    /// Groups of parallel base morphisms between small objects.
    fn small_homs(&self, rng: &mut Rng) -> Vec<Vec<Mor<Self>>>;
}

/// A cospan of base morphisms into a common random object.
pub fn random_cospan<K: Kit>(k: &K, rng: &mut Rng) -> Cospan<Mor<K>> {
    let s = k.sampler();
    let c = s.object(rng);
    Cospan::new(s.coisometry_into(rng, &c), s.coisometry_into(rng, &c))
}

/// A random base morphism out of a random object.
pub fn random_base<K: Kit>(k: &K, rng: &mut Rng) -> Mor<K> {
    let s = k.sampler();
    let x = s.object(rng);
    s.coisometry_from(rng, &x)
}

fn compose_ok<C: Category>(c: &C, g: &C::Mor, f: &C::Mor) -> Option<C::Mor> {
    c.compose(g, f).ok()
}

fn commutes_in<C: Category>(c: &C, c1: &C::Mor, f: &C::Mor, c2: &C::Mor, g: &C::Mor) -> bool {
    match (compose_ok(c, c1, f), compose_ok(c, c2, g)) {
        (Some(a), Some(b)) => c.mor_eq(&a, &b),
        _ => false,
    }
}

/// Squares over random small cospans, found by enumerating spans out of
/// objects of size at most `max_x`. Keeps up to four commuting squares and
/// one non-commuting square per cospan.
pub fn fe_squares<C: EpiRegular + FiniteEnumeration>(c: &C, rng: &mut Rng, n: usize, max_x: usize) -> Vec<Square<C::Mor>> {
    let targets: Vec<C::Obj> = c.small_objects(2);
    let mut out = Vec::new();
    let mut attempts = 0;
    while out.len() < n && attempts < 50 * n.max(1) {
        attempts += 1;
        let Some(t) = targets.choose(rng) else { break };
        let into = c.homs_into(t, 3);
        let (Some(u), Some(v)) = (into.choose(rng), into.choose(rng)) else { continue };
        let (a, b) = (c.dom(u), c.dom(v));
        let mut good = Vec::new();
        let mut bad = Vec::new();
        for x in c.small_objects(max_x) {
            let fs = c.hom(&x, &a);
            let gs = c.hom(&x, &b);
            for f in &fs {
                for g in &gs {
                    let sq = Square::new(f.clone(), g.clone(), u.clone(), v.clone());
                    if c.commutes(&sq) {
                        good.push(sq);
                    } else if bad.len() < 8 {
                        bad.push(sq);
                    }
                }
            }
        }
        good.shuffle(rng);
        out.extend(good.into_iter().take(4));
        if let Some(sq) = bad.choose(rng) {
            out.push(sq.clone());
        }
    }
    out.truncate(n);
    out
}

/// All cocones under `(sq.f, sq.g)` into objects of size at most `max_w`.
/// Composites are bucketed by their JSON form, so equal morphisms must
/// serialise identically.
pub fn fe_cocones<D: Category + FiniteEnumeration>(d: &D, sq: &Square<D::Mor>, max_w: usize) -> Vec<Cospan<D::Mor>> {
    let (a, b) = (d.cod(&sq.f), d.cod(&sq.g));
    let key = |m: &D::Mor| serde_json::to_string(m).unwrap_or_default();
    let mut out = Vec::new();
    for w in d.small_objects(max_w) {
        let mut lefts: HashMap<String, Vec<(D::Mor, D::Mor)>> = HashMap::new();
        for c1 in d.hom(&a, &w) {
            if let Some(h) = compose_ok(d, &c1, &sq.f) {
                lefts.entry(key(&h)).or_default().push((h, c1));
            }
        }
        for c2 in d.hom(&b, &w) {
            let Some(k) = compose_ok(d, &c2, &sq.g) else { continue };
            for (h, c1) in lefts.get(&key(&k)).into_iter().flatten() {
                if d.mor_eq(h, &k) {
                    out.push(Cospan::new(c1.clone(), c2.clone()));
                }
            }
        }
    }
    out
}

/// Jointly monic spans into `(a, b)` with apex of size at most `max_apex`.
pub fn fe_monic_spans<C: EpiRegular + FiniteEnumeration>(c: &C, a: &C::Obj, b: &C::Obj, max_apex: usize) -> Vec<Span<C::Mor>> {
    let mut out = Vec::new();
    for z in c.small_objects(max_apex) {
        let ls = c.hom(&z, a);
        let rs = c.hom(&z, b);
        for l in &ls {
            for r in &rs {
                let span = Span::new(l.clone(), r.clone());
                if c.is_jointly_monic(&span) {
                    out.push(span);
                }
            }
        }
    }
    out
}

/// For every `e` out of an object of size at most `max_x`, every pair of
/// legs `(a1, a2)` out of `cod e` into objects of size at most `max_leg`, and
/// every jointly monic span `m` into `(cod a1, cod a2)` (all of those with
/// apex at most `max_apex`, plus the image factorisations of `(a1, a2)` and
/// `(a1 e, a2 e)`): if `(a1 e, a2 e)` factors through `m` by `d`, then
/// `(a1, a2)` factors through `m` by some `t` with `t ∘ e = d`.
pub fn fe_strong_epi<C: EpiRegular + FiniteEnumeration>(
    c: &C,
    rep: &mut Report,
    max_x: usize,
    max_leg: usize,
    max_apex: usize,
) {
    let mut cache: Vec<(C::Obj, C::Obj, Vec<Span<C::Mor>>)> = Vec::new();
    for x in c.small_objects(max_x) {
        for e in c.homs_from(&x, max_x) {
            let y = c.cod(&e);
            let legs = c.homs_from(&y, max_leg);
            for a1 in &legs {
                for a2 in &legs {
                    let a = Span::new(a1.clone(), a2.clone());
                    let (Some(s1), Some(s2)) = (compose_ok(c, a1, &e), compose_ok(c, a2, &e)) else {
                        rep.fail("composition", "a1 ∘ e undefined", vec![to_json(&e), to_json(a1)]);
                        continue;
                    };
                    let s = Span::new(s1, s2);
                    let (ca, cb) = (c.cod(a1), c.cod(a2));
                    let pos = match cache.iter().position(|(p, q, _)| *p == ca && *q == cb) {
                        Some(i) => i,
                        None => {
                            cache.push((ca.clone(), cb.clone(), fe_monic_spans(c, &ca, &cb, max_apex)));
                            cache.len() - 1
                        }
                    };
                    let mut monics = Vec::new();
                    for sp in [&s, &a] {
                        match c.factorize(sp) {
                            Ok(f) => monics.push(f.legs),
                            Err(err) => rep.fail("factorisation", err.to_string(), vec![to_json(sp)]),
                        }
                    }
                    for m in monics.iter().chain(cache[pos].2.iter()) {
                        diagonal_filler(c, rep, &e, &a, &s, m);
                    }
                }
            }
        }
    }
}

/// One instance of the strong-epi lifting property; does nothing when the
/// outer square does not exist.
pub fn diagonal_filler<C: EpiRegular>(c: &C, rep: &mut Report, e: &C::Mor, a: &Span<C::Mor>, s: &Span<C::Mor>, m: &Span<C::Mor>) {
    let Some(d) = c.factor_through(m, s) else { return };
    let inputs = || vec![to_json(e), to_json(a), to_json(m)];
    match c.factor_through(m, a) {
        Some(t) => {
            let ok = compose_ok(c, &t, e).is_some_and(|te| c.mor_eq(&te, &d));
            rep.check(ok, "strong epi", || "diagonal t does not satisfy t ∘ e = d".into(), inputs);
        }
        None => rep.fail("strong epi", "no diagonal filler", inputs()),
    }
}

/// Monic exactly when invertible, for morphisms out of objects of size at
/// most `max`. Monicity is tested against all pairs of morphisms into the
/// domain from objects one larger.
pub fn fe_monic_iff_invertible<C: EpiRegular + FiniteEnumeration>(c: &C, rep: &mut Report, max: usize) {
    for x in c.small_objects(max) {
        let probes = c.homs_into(&x, max + 1);
        for m in c.homs_from(&x, max) {
            let images: Vec<Option<C::Mor>> = probes.iter().map(|p| compose_ok(c, &m, p)).collect();
            let mut monic = true;
            'outer: for i in 0..probes.len() {
                for j in (i + 1)..probes.len() {
                    if c.dom(&probes[i]) != c.dom(&probes[j]) || c.mor_eq(&probes[i], &probes[j]) {
                        continue;
                    }
                    if let (Some(p), Some(q)) = (&images[i], &images[j]) {
                        if c.mor_eq(p, q) {
                            monic = false;
                            break 'outer;
                        }
                    }
                }
            }
            let invertible = invertible_in(c, &m);
            rep.check(
                monic == invertible,
                "monic iff invertible",
                || format!("monic: {monic}, invertible: {invertible}"),
                || vec![to_json(&m)],
            );
        }
    }
}

/// `inverse` returns a two-sided inverse.
pub fn invertible_in<C: EpiRegular>(c: &C, m: &C::Mor) -> bool {
    let Some(inv) = c.inverse(m) else { return false };
    let left = compose_ok(c, &inv, m).is_some_and(|x| c.mor_eq(&x, &c.identity(&c.dom(m))));
    let right = compose_ok(c, m, &inv).is_some_and(|x| c.mor_eq(&x, &c.identity(&c.cod(m))));
    left && right
}

pub fn fe_small_relations<C: EpiRegular + FiniteEnumeration>(c: &C, max: usize) -> Vec<Span<C::Mor>> {
    let mut out = Vec::new();
    for z in c.small_objects(max) {
        let legs = c.homs_from(&z, max);
        for l in &legs {
            for r in &legs {
                let span = Span::new(l.clone(), r.clone());
                if c.is_jointly_monic(&span) {
                    out.push(span);
                }
            }
        }
    }
    out
}

pub fn fe_small_homs<C: FiniteEnumeration>(c: &C, max: usize) -> Vec<Vec<C::Mor>> {
    let objs = c.small_objects(max);
    let mut out = Vec::new();
    for x in &objs {
        for y in &objs {
            let h = c.hom(x, y);
            if !h.is_empty() {
                out.push(h);
            }
        }
    }
    out
}

fn permutation(rng: &mut Rng, x: &FinSet) -> BTreeMap<String, String> {
    let mut img: Vec<String> = x.iter().cloned().collect();
    img.shuffle(rng);
    x.iter().cloned().zip(img).collect()
}

/// Surjections inside multivalued surjections.
pub struct MSurjKit {
    pub base: Surj,
    pub env: MSurj,
    pub sampler: MSurjSampler,
}

impl MSurjKit {
    pub fn new(max_size: usize, mutation: Option<Mutation>) -> Self {
        MSurjKit { base: Surj, env: MSurj, sampler: MSurjSampler::new(max_size).with_mutation(mutation) }
    }
}

impl Kit for MSurjKit {
    type C = Surj;
    type S = MSurjSampler;

    fn name(&self) -> &'static str {
        "msurj"
    }

    fn base(&self) -> &Surj {
        &self.base
    }

    fn env(&self) -> &MSurj {
        &self.env
    }

    fn sampler(&self) -> &MSurjSampler {
        &self.sampler
    }

    fn automorphism(&self, rng: &mut Rng, x: &FinSet) -> MultiMap {
        let p = permutation(rng, x);
        MultiMap::from_fn(x.clone(), x.clone(), |a| p[a].clone())
    }

    fn squares(&self, rng: &mut Rng, n: usize) -> Vec<Square<MultiMap>> {
        fe_squares(&self.base, rng, n, 3)
    }

    /// Enumerated when both feet have at most three elements.
    fn cocones(&self, _rng: &mut Rng, sq: &Square<MultiMap>) -> Vec<Cospan<MultiMap>> {
        if self.base.cod(&sq.f).len() > 3 || self.base.cod(&sq.g).len() > 3 {
            return Vec::new();
        }
        fe_cocones(&self.env, sq, 3)
    }

    fn strong_epi(&self, _rng: &mut Rng, rep: &mut Report) {
        fe_strong_epi(&self.base, rep, 4, 2, 3);
    }

    fn monic_iff_invertible(&self, _rng: &mut Rng, rep: &mut Report) {
        fe_monic_iff_invertible(&self.base, rep, 3);
    }

    fn small_relations(&self, _rng: &mut Rng) -> Vec<Span<MultiMap>> {
        fe_small_relations(&self.base, 3)
    }

    fn small_homs(&self, _rng: &mut Rng) -> Vec<Vec<MultiMap>> {
        fe_small_homs(&self.base, 3)
    }
}

/// Deterministic maps inside stochastic maps.
pub struct FinProbKit {
    pub base: FinProbDet,
    pub env: FinProb,
    pub sampler: FinProbSampler,
}

impl FinProbKit {
    pub fn new(max_size: usize, mutation: Option<Mutation>) -> Self {
        FinProbKit { base: FinProbDet { mutation }, env: FinProb, sampler: FinProbSampler::new(max_size) }
    }
}

impl Kit for FinProbKit {
    type C = FinProbDet;
    type S = FinProbSampler;

    fn name(&self) -> &'static str {
        "finprob"
    }

    fn base(&self) -> &FinProbDet {
        &self.base
    }

    fn env(&self) -> &FinProb {
        &self.env
    }

    fn sampler(&self) -> &FinProbSampler {
        &self.sampler
    }

    /// Permutes points of equal weight.
    fn automorphism(&self, rng: &mut Rng, x: &crate::finprob::FinProbSpace) -> crate::finprob::StochMap {
        let mut classes: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for (p, w) in x.iter() {
            classes.entry(w.to_string()).or_default().push(p.clone());
        }
        let mut table = BTreeMap::new();
        for pts in classes.values() {
            let mut img = pts.clone();
            img.shuffle(rng);
            table.extend(pts.iter().cloned().zip(img));
        }
        fp_delta(x, x.points(), &table).unwrap_or_else(|_| self.base.identity(x))
    }

    fn squares(&self, rng: &mut Rng, n: usize) -> Vec<Square<crate::finprob::StochMap>> {
        fe_squares(&self.base, rng, n, 4)
    }

    /// Deterministic cocones by enumeration, and stochastic ones of the form
    /// `(w u, w v)`.
    fn cocones(&self, rng: &mut Rng, sq: &Square<crate::finprob::StochMap>) -> Vec<Cospan<crate::finprob::StochMap>> {
        let b = &self.base;
        let (a, bb) = (b.cod(&sq.f), b.cod(&sq.g));
        let mut out = Vec::new();
        let rights = b.homs_from(&bb, 3);
        for c1 in b.homs_from(&a, 3) {
            for c2 in &rights {
                if c1.dst == c2.dst && commutes_in(&self.env, &c1, &sq.f, c2, &sq.g) {
                    out.push(Cospan::new(c1.clone(), c2.clone()));
                }
            }
        }
        for _ in 0..3 {
            let w = self.sampler.morphism_from(rng, &b.cod(&sq.u));
            if let (Ok(c1), Ok(c2)) = (self.env.compose(&w, &sq.u), self.env.compose(&w, &sq.v)) {
                out.push(Cospan::new(c1, c2));
            }
        }
        out
    }

    fn strong_epi(&self, _rng: &mut Rng, rep: &mut Report) {
        fe_strong_epi(&self.base, rep, 4, 2, 3);
    }

    fn monic_iff_invertible(&self, _rng: &mut Rng, rep: &mut Report) {
        fe_monic_iff_invertible(&self.base, rep, 3);
    }

    fn small_relations(&self, _rng: &mut Rng) -> Vec<Span<crate::finprob::StochMap>> {
        fe_small_relations(&self.base, 3)
    }

    fn small_homs(&self, _rng: &mut Rng) -> Vec<Vec<crate::finprob::StochMap>> {
        fe_small_homs(&self.base, 3)
    }
}

/// Injections, read backwards, inside partial injections read backwards.
pub struct PInjKit {
    pub base: Dual<Inj>,
    pub env: Dual<PInj>,
    pub sampler: DualSampler<PInjSampler>,
}

impl PInjKit {
    pub fn new(max_size: usize) -> Self {
        PInjKit { base: Dual { inner: Inj }, env: Dual { inner: PInj }, sampler: DualSampler::new(PInjSampler::new(max_size)) }
    }
}

impl Kit for PInjKit {
    type C = Dual<Inj>;
    type S = DualSampler<PInjSampler>;

    fn name(&self) -> &'static str {
        "pinj"
    }

    fn base(&self) -> &Dual<Inj> {
        &self.base
    }

    fn env(&self) -> &Dual<PInj> {
        &self.env
    }

    fn sampler(&self) -> &DualSampler<PInjSampler> {
        &self.sampler
    }

    fn automorphism(&self, rng: &mut Rng, x: &FinSet) -> PartialInjection {
        PartialInjection::from_map(x.clone(), x.clone(), &permutation(rng, x))
    }

    fn squares(&self, rng: &mut Rng, n: usize) -> Vec<Square<PartialInjection>> {
        fe_squares(&self.base, rng, n, 3)
    }

    /// Enumerated when both feet have at most three elements.
    fn cocones(&self, _rng: &mut Rng, sq: &Square<PartialInjection>) -> Vec<Cospan<PartialInjection>> {
        if self.base.cod(&sq.f).len() > 3 || self.base.cod(&sq.g).len() > 3 {
            return Vec::new();
        }
        fe_cocones(&self.env, sq, 3)
    }

    fn strong_epi(&self, _rng: &mut Rng, rep: &mut Report) {
        fe_strong_epi(&self.base, rep, 4, 2, 3);
    }

    fn monic_iff_invertible(&self, _rng: &mut Rng, rep: &mut Report) {
        fe_monic_iff_invertible(&self.base, rep, 3);
    }

    fn small_relations(&self, _rng: &mut Rng) -> Vec<Span<PartialInjection>> {
        fe_small_relations(&self.base, 3)
    }

    fn small_homs(&self, _rng: &mut Rng) -> Vec<Vec<PartialInjection>> {
        fe_small_homs(&self.base, 3)
    }
}

/// Isometries, read backwards, inside contractions read backwards. A base
/// morphism `x → a` is an `x × a` matrix with orthonormal columns.
pub struct MatKit {
    pub base: Dual<Mat1>,
    pub env: Dual<Mat>,
    pub sampler: DualSampler<MatSampler>,
    pub raw: MatSampler,
    pub tol: ToleranceConfig,
}

impl MatKit {
    pub fn new(max_dim: usize, tol: ToleranceConfig, mutation: Option<Mutation>) -> Self {
        let mat = Mat { tol, mutation };
        let raw = MatSampler::new(max_dim, mat);
        MatKit {
            base: Dual { inner: Mat1 { tol, mutation } },
            env: Dual { inner: mat },
            sampler: DualSampler::new(raw.clone()),
            raw,
            tol,
        }
    }

    /// Right-multiplies `m` by a random orthogonal matrix and returns it with
    /// the matching embedding of the first `k` coordinates.
    fn rotate(&self, rng: &mut Rng, m: Matrix, k: usize) -> (Matrix, Matrix) {
        let n = m.cols();
        let r = self.raw.orthonormal(rng, n, n);
        let emb = Matrix::identity(k).vstack(&Matrix::zeros(n - k, k));
        (m.mul(&r), r.transpose().mul(&emb))
    }

    /// A commuting square `(A, B, U, V)` with `AU = BV = C`; `A` and `B`
    /// meet only in `C`, and are relatively orthogonal exactly when
    /// `independent` is set.
    pub fn square(&self, rng: &mut Rng, independent: bool) -> Square<Matrix> {
        let k = rng.random_range(0..=2);
        let ea = rng.random_range(1..=2);
        let eb = rng.random_range(1..=2);
        let p = k + ea + eb + rng.random_range(0..=1);
        let q = self.raw.orthonormal(rng, p, p);
        let cols = |lo: usize, hi: usize| Matrix(q.0.columns(lo, hi - lo).into_owned());
        let c = cols(0, k);
        let a_extra = cols(k, k + ea);
        let b_extra = if independent {
            cols(k + ea, k + ea + eb)
        } else {
            cols(k, p).mul(&self.raw.orthonormal(rng, p - k, eb))
        };
        let (am, u) = self.rotate(rng, c.hstack(&a_extra), k);
        let (bm, v) = self.rotate(rng, c.hstack(&b_extra), k);
        Square::new(am, bm, u, v)
    }
}

impl Kit for MatKit {
    type C = Dual<Mat1>;
    type S = DualSampler<MatSampler>;

    fn name(&self) -> &'static str {
        "mat"
    }

    fn base(&self) -> &Dual<Mat1> {
        &self.base
    }

    fn env(&self) -> &Dual<Mat> {
        &self.env
    }

    fn sampler(&self) -> &DualSampler<MatSampler> {
        &self.sampler
    }

    fn close(&self, a: &Matrix, b: &Matrix) -> bool {
        a.dist(b) <= self.tol.composite_tol
    }

    fn automorphism(&self, rng: &mut Rng, x: &usize) -> Matrix {
        self.raw.orthonormal(rng, *x, *x)
    }

    fn squares(&self, rng: &mut Rng, n: usize) -> Vec<Square<Matrix>> {
        (0..n).map(|i| self.square(rng, i % 2 == 0)).collect()
    }

    /// Cocones in the envelope are cones `(P, Q)` with `AP = BQ`: random
    /// elements of the null space of `[A −B]`, scaled to contractions.
    fn cocones(&self, rng: &mut Rng, sq: &Square<Matrix>) -> Vec<Cospan<Matrix>> {
        let (a, b) = (&sq.f, &sq.g);
        let neg_b = Matrix(-&b.0);
        let n = null_space(&a.hstack(&neg_b), 1e-12);
        if n.cols() == 0 {
            return Vec::new();
        }
        let mut out = Vec::new();
        for w in 1..=3 {
            let g = Matrix(nalgebra::DMatrix::from_fn(n.cols(), w, |_, _| rng.sample::<f64, _>(rand_distr::StandardNormal)));
            let pq = n.mul(&g);
            let p = Matrix(pq.0.rows(0, a.cols()).into_owned());
            let q = Matrix(pq.0.rows(a.cols(), b.cols()).into_owned());
            let scale = op_norm(&p).max(op_norm(&q)).max(1e-12);
            let shrink = rng.random_range(0.5..=1.0) / scale;
            out.push(Cospan::new(Matrix(p.0 * shrink), Matrix(q.0 * shrink)));
        }
        out
    }

    /// A base morphism has full column rank, so any `d` with `t e = d` pins
    /// down `t`; the filler is then checked on sampled legs and jointly
    /// monic spans at dimensions up to the sampler's bound.
    fn strong_epi(&self, rng: &mut Rng, rep: &mut Report) {
        let c = &self.base;
        for _ in 0..100 {
            let e = random_base(self, rng);
            rep.check(
                rank(&e, self.tol.rank_tol) == e.cols(),
                "strong epi (rank)",
                || "morphism does not have full column rank".into(),
                || vec![to_json(&e)],
            );
            let y = c.cod(&e);
            let a = Span::new(self.sampler.coisometry_from(rng, &y), self.sampler.coisometry_from(rng, &y));
            let (Ok(s1), Ok(s2)) = (c.compose(&a.left, &e), c.compose(&a.right, &e)) else {
                rep.fail("composition", "a ∘ e undefined", vec![to_json(&e)]);
                continue;
            };
            let s = Span::new(s1, s2);
            for sp in [&a, &s] {
                match c.factorize(sp) {
                    Ok(f) => {
                        let before = rep.checked;
                        diagonal_filler(c, rep, &e, &a, &s, &f.legs);
                        if rep.checked == before {
                            rep.fail("strong epi", "span does not factor through its own image", vec![to_json(sp)]);
                        }
                    }
                    Err(err) => rep.fail("factorisation", err.to_string(), vec![to_json(sp)]),
                }
            }
        }
    }

    /// A base morphism `x → y` is invertible exactly when `x = y`. Otherwise
    /// it is not monic: the identity and the reflection fixing its column
    /// space are different and agree after it.
    fn monic_iff_invertible(&self, rng: &mut Rng, rep: &mut Report) {
        let c = &self.base;
        for _ in 0..100 {
            let x = rng.random_range(0..=3);
            let y = rng.random_range(0..=x);
            let e = self.raw.orthonormal(rng, x, y);
            let invertible = invertible_in(c, &e);
            let proj = e.mul(&e.transpose());
            let refl = proj.sub(&Matrix::identity(x).sub(&proj));
            let one = Matrix::identity(x);
            let witness = match (c.compose(&e, &one), c.compose(&e, &refl)) {
                (Ok(p), Ok(q)) => self.close(&p, &q) && !self.close(&one, &refl),
                _ => false,
            };
            rep.check(
                invertible == (x == y) && witness == (x != y),
                "monic iff invertible",
                || format!("{x}×{y}: invertible {invertible}, non-monic witness {witness}"),
                || vec![to_json(&e)],
            );
        }
    }

    fn small_relations(&self, rng: &mut Rng) -> Vec<Span<Matrix>> {
        let c = &self.base;
        let mut out = Vec::new();
        for _ in 0..60 {
            let z = rng.random_range(0..=3);
            let a = Span::new(self.sampler.coisometry_from(rng, &z), self.sampler.coisometry_from(rng, &z));
            if let Ok(f) = c.factorize(&a) {
                out.push(f.legs);
            }
            if c.is_jointly_monic(&a) {
                out.push(a);
            }
        }
        out
    }

    fn small_homs(&self, rng: &mut Rng) -> Vec<Vec<Matrix>> {
        (0..40)
            .map(|_| {
                let x = rng.random_range(0..=3);
                let y = rng.random_range(0..=x);
                let f = self.raw.orthonormal(rng, x, y);
                let g = self.raw.orthonormal(rng, x, y);
                let turn = self.raw.orthonormal(rng, y, y);
                let h = f.mul(&turn);
                vec![f.clone(), f, g, h]
            })
            .collect()
    }
}
