use proptest::prelude::*;

use dagrel::category::{Category, Codilatory, DaggerCategory, Span, Square};
use dagrel::finprob::{fp_bayes, fp_compose, fp_dilator, fp_is_independent, FinProb, FinProbSampler};
use dagrel::independence::{EpiRegular, IndependenceCategory};
use dagrel::kits::{random_base, random_cospan, FinProbKit, Kit, MSurjKit, MatKit, Mor, PInjKit};
use dagrel::laws::verify_dilator;
use dagrel::matcontr::{l2_functor, mat_codilator, op_norm, Mat, MatSampler, Matrix, ToleranceConfig};
use dagrel::msurj::FinSet;
use dagrel::pinj::{pi_compose, PInj, PartialInjection};
use dagrel::relcat::RelCat;
use dagrel::sample::{seeded, Sampler};
use dagrel::suites::{run_suite, Instance, Suite, SuiteConfig};

fn tol() -> ToleranceConfig {
    ToleranceConfig::default()
}

fn kit_dagger_laws<K: Kit>(k: &K, seed: u64) -> Result<(), TestCaseError> {
    let mut rng = seeded(seed);
    let (d, s) = (k.env(), k.sampler());
    let a = s.object(&mut rng);
    let f = s.morphism_from(&mut rng, &a);
    let g = s.morphism_from(&mut rng, &d.cod(&f));
    prop_assert!(k.close(&d.dagger(&d.dagger(&f)), &f), "f†† ≠ f for {f:?}");
    let lhs = d.dagger(&d.compose(&g, &f).unwrap());
    let rhs = d.compose(&d.dagger(&f), &d.dagger(&g)).unwrap();
    prop_assert!(k.close(&lhs, &rhs), "(gf)† ≠ f†g†");
    let one = d.identity(&a);
    prop_assert!(k.close(&d.dagger(&one), &one));
    Ok(())
}

fn one_f_is_a_dilator<K: Kit>(k: &K, seed: u64) -> Result<(), TestCaseError> {
    let mut rng = seeded(seed);
    let f = random_base(k, &mut rng);
    let d = k.env();
    let cand = Span::new(d.identity(&d.dom(&f)), f.clone());
    let chk = verify_dilator(d, &f, &cand, &[]).unwrap();
    prop_assert!(chk.holds(), "{}", chk.describe());
    Ok(())
}

/// Independent pullbacks commute, satisfy `g f† = v† u`, and are jointly
/// monic.
fn independent_pullback_laws<K: Kit>(k: &K, seed: u64) -> Result<(), TestCaseError> {
    let mut rng = seeded(seed);
    let (c, d) = (k.base(), k.env());
    let cs = random_cospan(k, &mut rng);
    let pb = c.independent_pullback(&cs).unwrap();
    let sq = Square::new(pb.left.clone(), pb.right.clone(), cs.left.clone(), cs.right.clone());
    prop_assert!(c.commutes(&sq));
    prop_assert!(c.is_independent(&sq));
    prop_assert!(c.is_independent(&sq.transpose()));
    prop_assert!(c.is_jointly_monic(&pb));
    let gf = d.compose(&pb.right, &d.dagger(&pb.left)).unwrap();
    let vu = d.compose(&d.dagger(&cs.right), &cs.left).unwrap();
    prop_assert!(k.close(&gf, &vu), "g f† ≠ v† u");
    Ok(())
}

/// `(1, u)` is an independent pullback of `(u, 1)`.
fn unit_pullback<K: Kit>(k: &K, seed: u64) -> Result<(), TestCaseError> {
    let mut rng = seeded(seed);
    let c = k.base();
    let u = random_base(k, &mut rng);
    let (a, cc) = (c.dom(&u), c.cod(&u));
    let sq = Square::new(c.identity(&a), u.clone(), u.clone(), c.identity(&cc));
    prop_assert!(c.is_independent(&sq));
    let pb = c.independent_pullback(&sq.cospan()).unwrap();
    prop_assert!(c.same_relation(&pb, &sq.span()));
    Ok(())
}

fn relation_laws<K: Kit>(k: &K, seed: u64) -> Result<(), TestCaseError> {
    let mut rng = seeded(seed);
    let (s, d) = (k.sampler(), k.env());
    let rel = RelCat::new(k.base().clone());
    let a = s.object(&mut rng);
    let r = s.morphism_from(&mut rng, &a);
    let t = s.morphism_from(&mut rng, &d.cod(&r));
    let u = s.morphism_from(&mut rng, &d.cod(&t));
    let (rr, tt, uu) = (rel.from_envelope(&r).unwrap(), rel.from_envelope(&t).unwrap(), rel.from_envelope(&u).unwrap());

    let left = rel.rel_compose(&uu, &rel.rel_compose(&tt, &rr).unwrap()).unwrap();
    let right = rel.rel_compose(&rel.rel_compose(&uu, &tt).unwrap(), &rr).unwrap();
    prop_assert!(rel.rel_eq(&left, &right), "associativity");

    let one = rel.rel_identity(&a);
    prop_assert!(rel.rel_eq(&rel.rel_compose(&rr, &one).unwrap(), &rr), "right unit");
    let one_b = rel.rel_identity(&d.cod(&r));
    prop_assert!(rel.rel_eq(&rel.rel_compose(&one_b, &rr).unwrap(), &rr), "left unit");

    prop_assert!(rel.rel_eq(&rel.rel_dagger(&rel.rel_dagger(&rr)), &rr), "involution");
    let tr = rel.rel_compose(&tt, &rr).unwrap();
    let contra = rel.rel_compose(&rel.rel_dagger(&rr), &rel.rel_dagger(&tt)).unwrap();
    prop_assert!(rel.rel_eq(&rel.rel_dagger(&tr), &contra), "contravariance");

    // relabelling the apex of r does not change the composite
    let apex = k.base().dom(&rr.rep.left);
    let iso = k.automorphism(&mut rng, &apex);
    let b = k.base();
    let moved = Span::new(b.compose(&rr.rep.left, &iso).unwrap(), b.compose(&rr.rep.right, &iso).unwrap());
    let rr2 = rel.relation(moved).unwrap();
    prop_assert!(rel.rel_eq(&rr, &rr2));
    prop_assert!(rel.rel_eq(&rel.rel_compose(&tt, &rr2).unwrap(), &tr), "representative change");

    let e = rel.epsilon(&tr).unwrap();
    prop_assert!(k.close(&e, &d.compose(&t, &r).unwrap()), "ε functorial");
    Ok(())
}

/// Independence of a square of coisometries is reflected by `η`.
fn eta_transports_independence<K: Kit>(k: &K, seed: u64) -> Result<(), TestCaseError> {
    let mut rng = seeded(seed);
    let rel = RelCat::new(k.base().clone());
    let c = k.base();
    for sq in k.squares(&mut rng, 4) {
        let eta = |m: &Mor<K>| rel.eta(m);
        let lifted = Square::new(eta(&sq.f), eta(&sq.g), eta(&sq.u), eta(&sq.v));
        // in relations, independence of coisometric squares is commutation
        // plus `g f† = v† u`
        let commutes = rel.commutes(&lifted);
        let cross = rel
            .rel_compose(&lifted.g, &rel.rel_dagger(&lifted.f))
            .and_then(|x| Ok((x, rel.rel_compose(&rel.rel_dagger(&lifted.v), &lifted.u)?)))
            .map(|(x, y)| rel.rel_eq(&x, &y))
            .unwrap_or(false);
        prop_assert_eq!(c.is_independent(&sq), commutes && cross, "square {:?}", sq);
    }
    Ok(())
}

macro_rules! kit_properties {
    ($modname:ident, $kit:expr) => {
        mod $modname {
            use super::*;

            proptest! {
                #![proptest_config(ProptestConfig::with_cases(48))]

                #[test]
                fn dagger_laws(seed in any::<u64>()) {
                    kit_dagger_laws(&$kit, seed)?;
                }

                #[test]
                fn unit_span_dilates_a_coisometry(seed in any::<u64>()) {
                    one_f_is_a_dilator(&$kit, seed)?;
                }

                #[test]
                fn independent_pullbacks(seed in any::<u64>()) {
                    independent_pullback_laws(&$kit, seed)?;
                }

                #[test]
                fn unit_span_is_a_pullback(seed in any::<u64>()) {
                    unit_pullback(&$kit, seed)?;
                }

                #[test]
                fn relations_form_a_dagger_category(seed in any::<u64>()) {
                    relation_laws(&$kit, seed)?;
                }

                #[test]
                fn eta_reflects_independence(seed in any::<u64>()) {
                    eta_transports_independence(&$kit, seed)?;
                }
            }
        }
    };
}

kit_properties!(msurj, MSurjKit::new(3, None));
kit_properties!(finprob, FinProbKit::new(3, None));
kit_properties!(pinj, PInjKit::new(4));
kit_properties!(mat, MatKit::new(4, tol(), None));

/// A partial injection `[m] → [n]` from a choice of images.
fn pinj_strategy(max: usize) -> impl Strategy<Value = PartialInjection> {
    (0..=max, 0..=max).prop_flat_map(|(m, n)| {
        (Just(m), Just(n), Just(()).prop_perturb(move |_, mut rng| {
            let mut targets: Vec<usize> = (1..=n).collect();
            for i in (1..targets.len()).rev() {
                targets.swap(i, rng.random_range(0..=i));
            }
            (1..=m).map(|a| (a, targets.get(a - 1).copied().filter(|_| rng.random_bool(0.7)))).collect::<Vec<_>>()
        }))
    })
    .prop_map(|(m, n, choice)| {
        let pairs: Vec<(String, String)> =
            choice.into_iter().filter_map(|(a, b)| Some((a.to_string(), b?.to_string()))).collect();
        PartialInjection::new(FinSet::ordinal(m), FinSet::ordinal(n), pairs.iter().map(|(a, b)| (a.as_str(), b.as_str())))
    })
}

/// `s` retargeted so that it starts where `r` ends.
fn chain(r: &PartialInjection, s: &PartialInjection) -> PartialInjection {
    let map = s.as_map();
    let pairs: Vec<(String, String)> = r
        .cod
        .iter()
        .filter_map(|a| Some((a.clone(), map.get(a)?.clone())))
        .collect();
    PartialInjection::new(r.cod.clone(), s.cod.clone(), pairs.iter().map(|(a, b)| (a.as_str(), b.as_str())))
}

proptest! {
    #[test]
    fn restriction_laws(r in pinj_strategy(4)) {
        let bar = r.restriction();
        prop_assert_eq!(pi_compose(&r, &bar).unwrap(), r.clone());
        prop_assert_eq!(pi_compose(&bar, &bar).unwrap(), bar.clone());
        let rd = PInj.dagger(&r);
        prop_assert_eq!(PInj.compose(&r, &PInj.compose(&rd, &r).unwrap()).unwrap(), r.clone());
    }

    #[test]
    fn restrictions_commute(r in pinj_strategy(4), s in pinj_strategy(4)) {
        let s = PartialInjection::new(r.dom.clone(), s.cod.clone(), s.pairs.iter().filter(|(a, _)| r.dom.contains(a)).map(|(a, b)| (a.as_str(), b.as_str())));
        let (rb, sb) = (r.restriction(), s.restriction());
        prop_assert_eq!(pi_compose(&rb, &sb).unwrap(), pi_compose(&sb, &rb).unwrap());
    }

    #[test]
    fn l2_is_a_functor(r in pinj_strategy(5), s in pinj_strategy(5)) {
        let s = chain(&r, &s);
        let sr = pi_compose(&s, &r).unwrap();
        let lhs = l2_functor(&sr).unwrap();
        let rhs = l2_functor(&s).unwrap().mul(&l2_functor(&r).unwrap());
        prop_assert_eq!(lhs.dist(&rhs), 0.0);
        prop_assert_eq!(l2_functor(&PInj.dagger(&r)).unwrap(), l2_functor(&r).unwrap().transpose());
    }
}

fn contraction() -> impl Strategy<Value = Matrix> {
    (1usize..=5, 1usize..=5)
        .prop_flat_map(|(n, m)| (Just(n), Just(m), prop::collection::vec(-1.0f64..1.0, n * m), 0.0f64..=1.0))
        .prop_map(|(n, m, xs, scale)| {
            let a = Matrix::from_rows(n, m, &xs.chunks(m).map(<[f64]>::to_vec).collect::<Vec<_>>()).unwrap();
            let norm = op_norm(&a);
            if norm == 0.0 {
                a
            } else {
                let k = scale / norm;
                Matrix(a.0 * k)
            }
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn dagger_preserves_the_norm(r in contraction()) {
        prop_assert!((op_norm(&r) - op_norm(&r.transpose())).abs() < 1e-9);
    }

    /// `right† left = R` with both legs isometric.
    #[test]
    fn codilator_equations(r in contraction()) {
        let t = tol();
        let c = mat_codilator(&r, &t, None).unwrap();
        let (l, rt) = (&c.cospan.left, &c.cospan.right);
        prop_assert!(rt.transpose().mul(l).dist(&r) <= t.composite_tol);
        prop_assert!(l.transpose().mul(l).dist(&Matrix::identity(l.cols())) <= t.composite_tol);
        prop_assert!(rt.transpose().mul(rt).dist(&Matrix::identity(rt.cols())) <= t.composite_tol);
        prop_assert_eq!(l.rows(), c.d + r.rows());
        let m = Mat::new(t);
        prop_assert!(m.jointly_epic(&c.cospan));
    }

    #[test]
    fn sampled_contractions_are_valid(seed in any::<u64>()) {
        let m = Mat::new(tol());
        let s = MatSampler::new(5, m);
        let mut rng = seeded(seed);
        let a = s.object(&mut rng);
        let f = s.morphism_from(&mut rng, &a);
        prop_assert!(m.validate(&f).is_ok());
        prop_assert!(op_norm(&f) <= 1.0 + tol().norm_slack);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bayes_is_an_exact_dagger(seed in any::<u64>()) {
        let s = FinProbSampler::new(4);
        let mut rng = seeded(seed);
        let a = s.object(&mut rng);
        let r = s.morphism_from(&mut rng, &a);
        let t = s.morphism_from(&mut rng, &r.dst);
        prop_assert_eq!(fp_bayes(&fp_bayes(&r)), r.clone());
        let lhs = fp_bayes(&fp_compose(&t, &r).unwrap());
        let rhs = fp_compose(&fp_bayes(&r), &fp_bayes(&t)).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    /// The legs push the joint law forward to both marginals, and
    /// `p₂ p₁† = r` exactly.
    #[test]
    fn dilator_marginals(seed in any::<u64>()) {
        let s = FinProbSampler::new(4);
        let mut rng = seeded(seed);
        let a = s.object(&mut rng);
        let r = s.morphism_from(&mut rng, &a);
        let dil = fp_dilator(&r).unwrap();
        prop_assert_eq!(&dil.left.src, &dil.right.src);
        prop_assert_eq!(&dil.left.dst, &r.src);
        prop_assert_eq!(&dil.right.dst, &r.dst);
        prop_assert!(FinProb.validate(&dil.left).is_ok());
        prop_assert!(FinProb.validate(&dil.right).is_ok());
        prop_assert_eq!(fp_compose(&dil.right, &fp_bayes(&dil.left)).unwrap(), r);
    }

    #[test]
    fn conditional_independence_is_symmetric(seed in any::<u64>()) {
        let k = FinProbKit::new(3, None);
        let mut rng = seeded(seed);
        for sq in k.squares(&mut rng, 4) {
            let Ok(ind) = fp_is_independent(&sq) else { continue };
            let swapped = Square::new(sq.g.clone(), sq.f.clone(), sq.v.clone(), sq.u.clone());
            prop_assert_eq!(fp_is_independent(&swapped).ok(), Some(ind));
            prop_assert_eq!(fp_is_independent(&sq.transpose()).ok(), Some(ind));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn reports_are_deterministic(seed in any::<u64>(), i in 0usize..4) {
        let cfg = SuiteConfig { seed, samples: Some(10), ..SuiteConfig::default() };
        let inst = Instance::ALL[i];
        let a = serde_json::to_string(&run_suite(inst, Suite::Independence, &cfg)).unwrap();
        let b = serde_json::to_string(&run_suite(inst, Suite::Independence, &cfg)).unwrap();
        prop_assert_eq!(a, b);
    }
}
