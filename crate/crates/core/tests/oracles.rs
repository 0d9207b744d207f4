//! Hand-computed values and exhaustive cross-checks on small instances.

use std::collections::BTreeMap;

use dagrel::category::{Category, Codilatory, Cospan, DaggerCategory, Dilatory, Span};
use dagrel::finprob::{
    fp_bayes, fp_compose, fp_conditional_product, fp_delta, fp_dilator, function_of, pushforward, rat, FinProb,
    FinProbDet, FinProbSpace, StochMap,
};
use dagrel::independence::{CoEpiRegular, EpiRegular};
use dagrel::matcontr::{l2_functor, mat_codilator, Mat, MatSampler, Matrix, ToleranceConfig};
use dagrel::msurj::{graph_dilator, FinSet, MSurj, MultiMap, Surj};
use dagrel::pinj::{Inj, PInj, PartialInjection};
use dagrel::relcat::RelCat;
use dagrel::sample::{seeded, FiniteEnumeration, Sampler};
use dagrel::{dualize, is_coisometry, is_isometry, is_unitary};

fn set(xs: &[&str]) -> FinSet {
    FinSet::new(xs.iter().copied())
}

fn tol() -> ToleranceConfig {
    ToleranceConfig::default()
}

fn table(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
    pairs.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
}

#[test]
fn coisometries_of_msurj_are_the_single_valued_maps() {
    let mut seen = 0;
    for a in MSurj.small_objects(3) {
        for b in MSurj.small_objects(3) {
            for f in MSurj.hom(&a, &b) {
                assert_eq!(is_coisometry(&MSurj, &f).unwrap(), f.is_single_valued(), "{f}");
                seen += 1;
            }
        }
    }
    assert!(seen > 50);
}

#[test]
fn a_two_valued_point_is_not_a_coisometry() {
    // r†r = 1 on the point, while rr† relates x and y
    let r = MultiMap::from_pairs(set(&["1"]), set(&["x", "y"]), [("1", "x"), ("1", "y")]);
    assert!(is_isometry(&MSurj, &r).unwrap());
    assert!(!is_coisometry(&MSurj, &r).unwrap());
    assert!(is_isometry(&MSurj, &MSurj.identity(&set(&["1", "2"]))).unwrap());
}

#[test]
fn isometries_of_pinj_are_the_total_injections() {
    let dual = dualize(PInj);
    for a in PInj.small_objects(3) {
        for b in PInj.small_objects(3) {
            for f in PInj.hom(&a, &b) {
                let iso = is_isometry(&PInj, &f).unwrap();
                assert_eq!(iso, f.is_total(), "{f}");
                assert_eq!(is_coisometry(&dual, &f).unwrap(), iso);
            }
        }
    }
}

#[test]
fn total_non_surjective_injection_is_not_unitary() {
    let f = PartialInjection::new(set(&["1"]), set(&["x", "y"]), [("1", "x")]);
    assert!(is_isometry(&PInj, &f).unwrap());
    assert!(!is_unitary(&PInj, &f).unwrap());
}

#[test]
fn displayed_matrices() {
    let m = Mat::new(tol());
    let h = 1.0 / 2f64.sqrt();
    assert!(is_isometry(&m, &Matrix::new(&[&[h], &[h]])).unwrap());
    assert!(is_unitary(&m, &Matrix::new(&[&[h, -h], &[h, h]])).unwrap());
    assert!(!is_coisometry(&m, &Matrix::new(&[&[0.5, 0.5]])).unwrap());
    let halves = Matrix::new(&[&[0.5, 0.5], &[0.5, 0.5], &[0.5, 0.5]]);
    assert!(!is_isometry(&m, &Matrix(halves.0 * (1.0 / 1.5))).unwrap());
    assert!(is_isometry(&m, &Matrix::zeros(3, 0)).unwrap());
}

#[test]
fn double_dual_is_the_original() {
    let m = Mat::new(tol());
    let dd = dualize(dualize(m));
    let s = MatSampler::new(4, m);
    let mut rng = seeded(5);
    for _ in 0..50 {
        let a = s.object(&mut rng);
        let f = s.morphism_from(&mut rng, &a);
        let g = s.morphism_from(&mut rng, &m.cod(&f));
        assert_eq!(dd.compose(&g, &f).unwrap(), m.compose(&g, &f).unwrap());
        assert_eq!(dd.dagger(&f), m.dagger(&f));
        assert_eq!(dd.dom(&f), m.dom(&f));
    }
}

#[test]
fn mat_codilator_is_the_dual_dilator() {
    let m = Mat::new(tol());
    let s = MatSampler::new(4, m);
    let mut rng = seeded(9);
    for _ in 0..30 {
        let a = s.object(&mut rng);
        let r = s.morphism_from(&mut rng, &a);
        let cod = m.codilator(&r).unwrap();
        let dil = dualize(m).dilator(&r).unwrap();
        assert_eq!(dil.left, cod.right);
        assert_eq!(dil.right, cod.left);
        let direct = mat_codilator(&r, &tol(), None).unwrap();
        assert_eq!(direct.cospan, cod);
    }
}

#[test]
fn l2_of_the_corner() {
    let two = FinSet::ordinal(2);
    let r = PartialInjection::new(two.clone(), two, [("1", "1")]);
    let m = l2_functor(&r).unwrap();
    assert_eq!(m, Matrix::new(&[&[1.0, 0.0], &[0.0, 0.0]]));
    let c = mat_codilator(&m, &tol(), None).unwrap();
    assert_eq!(c.d, 1);
    // E = ±[0 1]
    let sign = c.e.0[(0, 1)].signum();
    assert!(c.e.dist(&Matrix::new(&[&[0.0, sign]])) < 1e-12);
    let left = Matrix::new(&[&[0.0, sign], &[1.0, 0.0], &[0.0, 0.0]]);
    let right = Matrix::new(&[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]]);
    assert!(c.cospan.left.dist(&left) < 1e-12);
    assert!(c.cospan.right.dist(&right) < 1e-12);
}

#[test]
fn codilator_of_the_identity_is_trivial() {
    let c = mat_codilator(&Matrix::identity(3), &tol(), None).unwrap();
    assert_eq!(c.d, 0);
    assert_eq!(c.cospan.left, Matrix::identity(3));
    assert_eq!(c.cospan.right, Matrix::identity(3));
}

#[test]
fn relation_identities() {
    let rel = RelCat::new(Surj);
    let x = set(&["a", "b", "c"]);
    let one = rel.rel_identity(&x);
    assert!(rel.rel_eq(&rel.rel_dagger(&one), &one));
    assert!(rel.rel_eq(&rel.eta(&Surj.identity(&x)), &one));
    assert_eq!(rel.epsilon(&one).unwrap(), MSurj.identity(&x));
    let f = MultiMap::from_pairs(x.clone(), set(&["p", "q"]), [("a", "p"), ("b", "q"), ("c", "q")]);
    let ef = rel.eta(&f);
    assert_eq!(rel.epsilon(&ef).unwrap(), f);
    assert_eq!(rel.epsilon(&rel.rel_dagger(&ef)).unwrap(), MSurj.dagger(&f));
    let (l, r) = rel.rel_dilator(&ef);
    assert_eq!(rel.epsilon(&l).unwrap(), ef.rep.left);
    assert_eq!(rel.epsilon(&r).unwrap(), ef.rep.right);
}

#[test]
fn pullback_of_u_and_one_is_one_and_u() {
    let u = MultiMap::from_pairs(set(&["1", "2", "3"]), set(&["x", "y"]), [("1", "x"), ("2", "x"), ("3", "y")]);
    let one = Surj.identity(&set(&["x", "y"]));
    let pb = Surj.independent_pullback(&Cospan::new(u.clone(), one)).unwrap();
    let expected = Span::new(Surj.identity(&set(&["1", "2", "3"])), u);
    assert!(Surj.same_relation(&pb, &expected));
}

#[test]
fn pullback_over_a_point_is_the_product() {
    let pt = set(&["*"]);
    let a = set(&["1", "2"]);
    let b = set(&["x", "y", "z"]);
    let to_pt = |s: &FinSet| MultiMap::from_fn(s.clone(), pt.clone(), |_| "*".to_string());
    let pb = Surj.independent_pullback(&Cospan::new(to_pt(&a), to_pt(&b))).unwrap();
    assert_eq!(Surj.dom(&pb.left).len(), 6);
    assert!(Surj.is_jointly_monic(&pb));
}

#[test]
fn pullback_is_the_graph_of_v_dagger_u() {
    let u = MultiMap::from_pairs(set(&["1", "2", "3"]), set(&["p", "q"]), [("1", "p"), ("2", "q"), ("3", "q")]);
    let v = MultiMap::from_pairs(set(&["x", "y"]), set(&["p", "q"]), [("x", "p"), ("y", "q")]);
    let pb = Surj.independent_pullback(&Cospan::new(u.clone(), v.clone())).unwrap();
    let vu = MSurj.compose(&MSurj.dagger(&v), &u).unwrap();
    assert_eq!(MSurj.compose(&pb.right, &MSurj.dagger(&pb.left)).unwrap(), vu);
    assert!(Surj.same_relation(&pb, &graph_dilator(&vu).unwrap()));
}

#[test]
fn factorising_a_repeated_leg() {
    let f = MultiMap::from_pairs(set(&["1", "2", "3"]), set(&["a", "b"]), [("1", "a"), ("2", "a"), ("3", "b")]);
    let fact = Surj.factorize(&Span::new(f.clone(), f.clone())).unwrap();
    assert_eq!(fact.legs.left, fact.legs.right);
    assert_eq!(Surj.dom(&fact.legs.left).len(), 2);
    assert_eq!(Surj.compose(&fact.legs.left, &fact.epi).unwrap(), f);
}

#[test]
fn pinj_pushout_over_the_empty_set_is_the_disjoint_union() {
    let empty = FinSet::empty();
    let a = set(&["1", "2"]);
    let b = set(&["x", "y", "z"]);
    let span = Span::new(PartialInjection::new(empty.clone(), a, []), PartialInjection::new(empty, b, []));
    let po = Inj.coindependent_pushout(&span).unwrap();
    assert_eq!(po.left.cod.len(), 5);
    assert!(po.left.is_total() && po.right.is_total());
    assert!(Inj.is_jointly_epic(&po));
}

fn uniform(points: &[&str]) -> FinProbSpace {
    FinProbSpace::uniform(set(points)).unwrap()
}

#[test]
fn doubly_stochastic_product_by_hand() {
    let x = uniform(&["0", "1"]);
    let r = StochMap { src: x.clone(), dst: x.clone(), entries: vec![vec![rat(1, 3), rat(2, 3)], vec![rat(2, 3), rat(1, 3)]] };
    let s = StochMap { src: x.clone(), dst: x.clone(), entries: vec![vec![rat(1, 4), rat(3, 4)], vec![rat(3, 4), rat(1, 4)]] };
    FinProb.validate(&r).unwrap();
    FinProb.validate(&s).unwrap();
    let sr = fp_compose(&s, &r).unwrap();
    assert_eq!(sr.entries, vec![vec![rat(7, 12), rat(5, 12)], vec![rat(5, 12), rat(7, 12)]]);
}

#[test]
fn bayes_inverse_by_hand() {
    let a = uniform(&["a1", "a2"]);
    let b = FinProbSpace::new([("b1", rat(3, 4)), ("b2", rat(1, 4))]).unwrap();
    let r = StochMap { src: a.clone(), dst: b.clone(), entries: vec![vec![rat(1, 1), rat(1, 2)], vec![rat(0, 1), rat(1, 2)]] };
    FinProb.validate(&r).unwrap();
    let rd = fp_bayes(&r);
    assert_eq!(rd.entries, vec![vec![rat(2, 3), rat(0, 1)], vec![rat(1, 3), rat(1, 1)]]);
    let dil = fp_dilator(&r).unwrap();
    let mut weights: Vec<_> = FinProb.dom(&dil.left).weights().to_vec();
    weights.sort();
    assert_eq!(weights, vec![rat(1, 4), rat(1, 4), rat(1, 2)]);
}

#[test]
fn delta_is_functorial() {
    let a = FinProbSpace::new([("1", rat(1, 2)), ("2", rat(1, 3)), ("3", rat(1, 6))]).unwrap();
    let x = table(&[("1", "p"), ("2", "q"), ("3", "q")]);
    let f = table(&[("p", "u"), ("q", "u")]);
    let b = set(&["p", "q"]);
    let c = set(&["u"]);
    let dx = fp_delta(&a, &b, &x).unwrap();
    let df = fp_delta(&pushforward(&a, &b, &x).unwrap(), &c, &f).unwrap();
    let fx = table(&[("1", "u"), ("2", "u"), ("3", "u")]);
    assert_eq!(fp_compose(&df, &dx).unwrap(), fp_delta(&a, &c, &fx).unwrap());
    assert_eq!(df.dst.weights(), &[rat(1, 1)]);
}

#[test]
fn conditional_product_over_a_point_is_the_product_measure() {
    let pt = set(&["*"]);
    let a = uniform(&["a0", "a1"]);
    let b = FinProbSpace::new([("b0", rat(1, 3)), ("b1", rat(2, 3))]).unwrap();
    let to_pt = |s: &FinProbSpace| fp_delta(s, &pt, &s.points().iter().map(|p| (p.clone(), "*".to_string())).collect()).unwrap();
    let span = fp_conditional_product(&Cospan::new(to_pt(&a), to_pt(&b)), None).unwrap();
    let apex = FinProb.dom(&span.left);
    assert_eq!(apex.len(), 4);
    let (pl, pr) = (function_of(&span.left).unwrap(), function_of(&span.right).unwrap());
    for (p, w) in apex.iter() {
        assert_eq!(w, &(a.weight(&pl[p]).unwrap() * b.weight(&pr[p]).unwrap()));
    }
}

#[test]
fn conditional_product_agrees_with_the_dilator() {
    let c = uniform(&["c0", "c1"]);
    let a = FinProbSpace::new([("x0", rat(1, 4)), ("x1", rat(1, 4)), ("x2", rat(1, 2))]).unwrap();
    let b = FinProbSpace::new([("y0", rat(1, 6)), ("y1", rat(1, 3)), ("y2", rat(1, 2))]).unwrap();
    let f = fp_delta(&a, c.points(), &table(&[("x0", "c0"), ("x1", "c0"), ("x2", "c1")])).unwrap();
    let g = fp_delta(&b, c.points(), &table(&[("y0", "c0"), ("y1", "c0"), ("y2", "c1")])).unwrap();
    let span = fp_conditional_product(&Cospan::new(f.clone(), g.clone()), None).unwrap();
    let dil = fp_dilator(&fp_compose(&fp_bayes(&g), &f).unwrap()).unwrap();
    assert!(FinProbDet { mutation: None }.same_relation(&span, &dil));
    // pairs over c0: 2 × 2, over c1: 1 × 1
    assert_eq!(FinProb.dom(&span.left).len(), 5);
}
