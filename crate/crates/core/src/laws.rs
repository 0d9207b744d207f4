//! Generic law checkers: dagger laws, the independence axioms, and dilator
//! verification.

use serde::Serialize;

use crate::category::{dilated, is_coisometry, Category, DaggerCategory, Dilatory, Span, Square};
use crate::error::{CatError, Result};
use crate::independence::{jointly_monic_via_dilator, IndependenceCategory};
use crate::report::{to_json, Report};
use crate::sample::{Rng, Sampler};

/// Draws `n` composable pairs `(f, g)` with `cod f = dom g`.
pub fn composable_pairs<S: Sampler>(
    s: &S,
    rng: &mut Rng,
    n: usize,
) -> Vec<(<S::Cat as Category>::Mor, <S::Cat as Category>::Mor)> {
    let cat = s.category();
    (0..n)
        .map(|_| {
            let a = s.object(rng);
            let f = s.morphism_from(rng, &a);
            let g = s.morphism_from(rng, &cat.cod(&f));
            (f, g)
        })
        .collect()
}

/// Checks `f†† = f`, `1† = 1`, `(g ∘ f)† = f† ∘ g†` and that the dagger
/// swaps domain and codomain, on `n` composable pairs taken from `pairs`.
/// Every sampled morphism is validated first. A supply with fewer than `n`
/// pairs marks the report incomplete.
pub fn check_dagger_axioms<D, I>(cat: &D, pairs: I, n: usize, seed: Option<u64>) -> Report
where
    D: DaggerCategory,
    I: IntoIterator<Item = (D::Mor, D::Mor)>,
{
    let mut rep = Report::new("dagger laws", seed);
    let mut seen = 0;
    for (f, g) in pairs.into_iter().take(n) {
        seen += 1;
        let inputs = || vec![to_json(&f), to_json(&g)];
        let mut valid = true;
        for m in [&f, &g] {
            if let Err(e) = cat.validate(m) {
                rep.fail("validity", e.to_string(), vec![to_json(m)]);
                valid = false;
            }
        }
        if !valid {
            continue;
        }
        let fd = cat.dagger(&f);
        rep.check(
            cat.dom(&fd) == cat.cod(&f) && cat.cod(&fd) == cat.dom(&f),
            "dagger swaps domain and codomain",
            || format!("f: {:?} -> {:?}, f†: {:?} -> {:?}", cat.dom(&f), cat.cod(&f), cat.dom(&fd), cat.cod(&fd)),
            inputs,
        );
        match cat.validate(&fd) {
            Ok(()) => rep.pass(),
            Err(e) => rep.fail("dagger closure", e.to_string(), inputs()),
        }
        rep.check(cat.mor_eq(&cat.dagger(&fd), &f), "involution", || "f†† ≠ f".into(), inputs);
        let one = cat.identity(&cat.dom(&f));
        rep.check(cat.mor_eq(&cat.dagger(&one), &one), "identity", || "1† ≠ 1".into(), || vec![to_json(&one)]);
        let lhs = cat.compose(&g, &f).map(|gf| cat.dagger(&gf));
        let rhs = cat.compose(&fd, &cat.dagger(&g));
        match (lhs, rhs) {
            (Ok(a), Ok(b)) => rep.check(cat.mor_eq(&a, &b), "contravariance", || "(g∘f)† ≠ f†∘g†".into(), inputs),
            (Err(e), _) => rep.fail("composition", e.to_string(), inputs()),
            (_, Err(e)) => rep.fail("contravariance", format!("f†∘g† undefined: {e}"), inputs()),
        }
    }
    if seen < n {
        rep.incomplete = true;
    }
    rep
}

/// One unit of input for [`check_independence_axioms`].
#[derive(Clone, Debug, Serialize)]
pub enum IndependenceCase<M> {
    /// A square the instance must call independent, such as one built from
    /// an independent pullback.
    Asserted(Square<M>),
    /// Any square; only commutation of squares called independent is checked.
    Arbitrary(Square<M>),
    /// Squares `(f, a, u, g)` and `(g, b, v, h)`, both asserted independent.
    Pasting(Square<M>, Square<M>),
    /// A morphism for the squares `(f, 1, 1, f)` and `(f, f, 1, 1)`.
    Morphism(M),
}

/// Horizontal pasting of `(f, a, u, g)` and `(g, b, v, h)` into
/// `(f, b ∘ a, v ∘ u, h)`.
pub fn paste<C: Category>(cat: &C, left: &Square<C::Mor>, right: &Square<C::Mor>) -> Result<Square<C::Mor>> {
    if !cat.mor_eq(&left.v, &right.f) {
        return Err(CatError::mismatch("the squares do not share an edge"));
    }
    Ok(Square::new(
        left.f.clone(),
        cat.compose(&right.g, &left.g)?,
        cat.compose(&right.u, &left.u)?,
        right.v.clone(),
    ))
}

/// Checks the independence axioms on the supplied cases:
/// independent squares commute; `(f, 1, 1, f)` and `(f, f, 1, 1)` are
/// independent; independence is closed under horizontal pasting and under
/// transposition.
pub fn check_independence_axioms<C, I>(cat: &C, cases: I, n: usize, seed: Option<u64>) -> Report
where
    C: IndependenceCategory,
    I: IntoIterator<Item = IndependenceCase<C::Mor>>,
{
    let mut rep = Report::new("independence axioms", seed);
    let mut seen = 0;
    for case in cases.into_iter().take(n) {
        seen += 1;
        match &case {
            IndependenceCase::Asserted(sq) => {
                let inputs = || vec![to_json(sq)];
                let ind = cat.is_independent(sq);
                rep.check(ind, "asserted square independent", || "square not independent".into(), inputs);
                if ind {
                    rep.check(cat.commutes(sq), "I1 commutation", || "uf ≠ vg".into(), inputs);
                    rep.check(
                        cat.is_independent(&sq.transpose()),
                        "I4 transpose",
                        || "transpose not independent".into(),
                        inputs,
                    );
                }
            }
            IndependenceCase::Arbitrary(sq) => {
                if cat.is_independent(sq) {
                    rep.check(cat.commutes(sq), "I1 commutation", || "uf ≠ vg".into(), || vec![to_json(sq)]);
                    rep.check(
                        cat.is_independent(&sq.transpose()),
                        "I4 transpose",
                        || "transpose not independent".into(),
                        || vec![to_json(sq)],
                    );
                } else {
                    rep.pass();
                }
            }
            IndependenceCase::Pasting(l, r) => {
                let inputs = || vec![to_json(l), to_json(r)];
                if !cat.is_independent(l) || !cat.is_independent(r) {
                    rep.fail("asserted square independent", "a pasted square is not independent", inputs());
                    continue;
                }
                match paste(cat, l, r) {
                    Ok(outer) => rep.check(
                        cat.is_independent(&outer),
                        "I3 pasting",
                        || "pasted rectangle not independent".into(),
                        || vec![to_json(l), to_json(r), to_json(&outer)],
                    ),
                    Err(_) => rep.skip(),
                }
            }
            IndependenceCase::Morphism(f) => {
                let x = cat.dom(f);
                let a = cat.cod(f);
                let i2 = Square::new(f.clone(), cat.identity(&x), cat.identity(&a), f.clone());
                rep.check(cat.is_independent(&i2), "I2 identity square", || "(f, 1, 1, f) not independent".into(), || {
                    vec![to_json(f)]
                });
                let i5 = Square::new(f.clone(), f.clone(), cat.identity(&a), cat.identity(&a));
                rep.check(cat.is_independent(&i5), "I5 degenerate square", || "(f, f, 1, 1) not independent".into(), || {
                    vec![to_json(f)]
                });
            }
        }
    }
    if seen < n {
        rep.incomplete = true;
    }
    rep
}

/// Outcome of [`verify_dilator`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DilatorCheck {
    /// `cand.right ∘ cand.left† = r`.
    pub dilation: bool,
    pub jointly_monic: bool,
    /// One entry per alternative dilation: `None` when mediation succeeded,
    /// otherwise what went wrong.
    pub mediations: Vec<Option<String>>,
}

impl DilatorCheck {
    pub fn holds(&self) -> bool {
        self.dilation && self.jointly_monic && self.mediations.iter().all(Option::is_none)
    }

    pub fn describe(&self) -> String {
        let mut parts = Vec::new();
        if !self.dilation {
            parts.push("not a dilation".to_string());
        }
        if !self.jointly_monic {
            parts.push("not jointly monic".to_string());
        }
        for (i, m) in self.mediations.iter().enumerate() {
            if let Some(e) = m {
                parts.push(format!("alternative {i}: {e}"));
            }
        }
        if parts.is_empty() {
            "dilator".into()
        } else {
            parts.join("; ")
        }
    }
}

/// Checks that `cand` is a dilator of `r`: it dilates `r`, it is jointly
/// monic, and each alternative dilation mediates into it through a
/// coisometry making both triangles commute. The mediator is re-derived from
/// the dilation it induces to confirm it is the only one.
///
/// Joint monicity is decided twice, by the instance and through the dilator
/// of `cand.right ∘ cand.left†`; disagreement is an internal error.
pub fn verify_dilator<D: Dilatory>(cat: &D, r: &D::Mor, cand: &Span<D::Mor>, alts: &[Span<D::Mor>]) -> Result<DilatorCheck> {
    cat.check_span(cand)?;
    for (name, leg) in [("left", &cand.left), ("right", &cand.right)] {
        if !is_coisometry(cat, leg)? {
            return Err(CatError::Precondition(format!("{name} leg of the candidate is not a coisometry")));
        }
    }
    let dilation = match dilated(cat, cand) {
        Ok(m) => cat.mor_eq(&m, r),
        Err(_) => false,
    };
    let by_instance = cat.jointly_monic(cand);
    let by_dilator = if dilation { jointly_monic_via_dilator(cat, cand)? } else { by_instance };
    if by_instance != by_dilator {
        return Err(CatError::Internal(format!(
            "joint monicity: instance says {by_instance}, mediator into the dilator says {by_dilator}"
        )));
    }
    let mut mediations = Vec::with_capacity(alts.len());
    for alt in alts {
        mediations.push(match mediate(cat, cand, alt) {
            Ok(e) => check_unique(cat, cand, &e).err(),
            Err(err) => Some(err.to_string()),
        });
    }
    Ok(DilatorCheck { dilation, jointly_monic: by_instance, mediations })
}

fn check_unique<D: Dilatory>(cat: &D, cand: &Span<D::Mor>, e: &D::Mor) -> std::result::Result<(), String> {
    if !is_coisometry(cat, e).map_err(|x| x.to_string())? {
        return Err("mediator is not a coisometry".into());
    }
    let again = Span::new(
        cat.compose(&cand.left, e).map_err(|x| x.to_string())?,
        cat.compose(&cand.right, e).map_err(|x| x.to_string())?,
    );
    let e2 = cat.mediate(cand, &again).map_err(|x| x.to_string())?;
    if cat.mor_eq(&e2, e) {
        Ok(())
    } else {
        Err("two different mediators induce the same dilation".into())
    }
}

/// The coisometry `e` with `dilator.left ∘ e = dilation.left` and
/// `dilator.right ∘ e = dilation.right`, with both triangles checked.
pub fn mediate<D: Dilatory>(cat: &D, dilator: &Span<D::Mor>, dilation: &Span<D::Mor>) -> Result<D::Mor> {
    let e = cat.mediate(dilator, dilation)?;
    for (name, leg, target) in [("left", &dilator.left, &dilation.left), ("right", &dilator.right, &dilation.right)] {
        let ok = cat.compose(leg, &e).map(|x| cat.mor_eq(&x, target)).unwrap_or(false);
        if !ok {
            return Err(CatError::NoMediator(format!("{name} triangle does not commute")));
        }
    }
    Ok(e)
}
