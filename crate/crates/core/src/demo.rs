//! Worked examples printed by `dagrel demo`.

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::category::{Category, Cospan, DaggerCategory};
use crate::error::{CatError, Result};
use crate::finprob::{fp_bayes, fp_compose, fp_conditional_product, fp_delta, rat, FinProb, FinProbSpace, StochMap};
use crate::matcontr::{l2_functor, mat_codilator, Matrix, ToleranceConfig};
use crate::msurj::{graph_dilator, FinSet, MSurj, MultiMap, Surj};
use crate::pinj::{pi_codilator, PartialInjection};
use crate::relcat::RelCat;

pub const DEMOS: [&str; 6] = ["graph", "pinj-codilator", "l2-codilator", "cholesky", "bayes", "conditional-product"];

pub fn demo(name: &str) -> Result<String> {
    let mut out = String::new();
    match name {
        "graph" => graph(&mut out)?,
        "pinj-codilator" => pinj_codilator(&mut out),
        "l2-codilator" => l2_codilator(&mut out)?,
        "cholesky" => cholesky(&mut out)?,
        "bayes" => bayes(&mut out)?,
        "conditional-product" => conditional_product(&mut out)?,
        _ => {
            return Err(CatError::Parse(format!("unknown demo '{name}' (available: {})", DEMOS.join(", "))));
        }
    }
    Ok(out)
}

fn graph(out: &mut String) -> Result<()> {
    let a = FinSet::new(["1", "2", "3"]);
    let b = FinSet::new(["x", "y"]);
    let r = MultiMap::from_pairs(a.clone(), b.clone(), [("1", "x"), ("1", "y"), ("2", "y"), ("3", "x")]);
    let _ = writeln!(out, "multivalued surjection r: A -> B\n{r}");
    let dil = graph_dilator(&r)?;
    let _ = writeln!(out, "graph dilator: apex {{(a, b) : b in r(a)}} = {}", MSurj.dom(&dil.left));
    let _ = writeln!(out, "left leg (projection to A)\n{}", dil.left);
    let _ = writeln!(out, "right leg (projection to B)\n{}", dil.right);
    let back = MSurj.compose(&dil.right, &MSurj.dagger(&dil.left))?;
    let _ = writeln!(out, "right ∘ left† = r: {}\n", MSurj.mor_eq(&back, &r));

    let c = FinSet::new(["p", "q"]);
    let s = MultiMap::from_pairs(b, c, [("x", "p"), ("y", "p"), ("y", "q")]);
    let _ = writeln!(out, "second surjection s: B -> C\n{s}");
    let rel = RelCat::new(Surj);
    let (rr, ss) = (rel.from_envelope(&r)?, rel.from_envelope(&s)?);
    let (sr, trace) = rel.rel_compose_traced(&ss, &rr)?;
    let _ = writeln!(out, "relation composite [s] ∘ [r]");
    let _ = writeln!(out, "independent pullback apex: {}", MSurj.dom(&trace.pullback.left));
    let _ = writeln!(out, "outer span apex: {}", MSurj.dom(&trace.outer.left));
    if let Some(f) = &trace.factorization {
        let _ = writeln!(out, "factorisation: epi {} -> {}", MSurj.dom(&f.epi), MSurj.cod(&f.epi));
    }
    let _ = writeln!(out, "image apex: {}", MSurj.dom(&sr.rep.left));
    let eps = rel.epsilon(&sr)?;
    let direct = MSurj.compose(&s, &r)?;
    let _ = writeln!(out, "ε of the composite\n{eps}");
    let _ = writeln!(out, "equals s ∘ r: {}", MSurj.mor_eq(&eps, &direct));
    Ok(())
}

fn pinj_codilator(out: &mut String) {
    let a = FinSet::new(["1", "2", "3"]);
    let b = FinSet::new(["x", "y"]);
    let r = PartialInjection::new(a, b, [("1", "y"), ("3", "x")]);
    let _ = writeln!(out, "partial injection r: A -> B\n{r}");
    let cs = pi_codilator(&r);
    let _ = writeln!(out, "codilator apex (A minus supp r) ⊔ B = {}", cs.left.cod);
    let _ = writeln!(out, "left leg (total injection of A)\n{}", cs.left);
    let _ = writeln!(out, "right leg (total injection of B)\n{}", cs.right);
}

fn l2_codilator(out: &mut String) -> Result<()> {
    let two = FinSet::ordinal(2);
    let r = PartialInjection::new(two.clone(), two, [("1", "1")]);
    let _ = writeln!(out, "partial injection r = {{(1, 1)}}: [2] -> [2]\n{r}");
    let m = l2_functor(&r)?;
    let _ = writeln!(out, "its matrix R\n{m}");
    codilator_steps(out, &m)?;
    let cs = pi_codilator(&r);
    let _ = writeln!(out, "codilator of r as partial injections: apex {}", cs.left.cod);
    let _ = writeln!(out, "{}\n{}", cs.left, cs.right);
    Ok(())
}

fn cholesky(out: &mut String) -> Result<()> {
    let r = Matrix::new(&[&[0.5, 0.0], &[0.0, 1.0], &[0.0, 0.0]]);
    let _ = writeln!(out, "contraction R\n{r}");
    codilator_steps(out, &r)
}

fn codilator_steps(out: &mut String, r: &Matrix) -> Result<()> {
    let tol = ToleranceConfig::default();
    let p = Matrix::identity(r.cols()).sub(&r.transpose().mul(r));
    let _ = writeln!(out, "P = 1 − RᵀR\n{p}");
    let c = mat_codilator(r, &tol, None)?;
    let _ = writeln!(out, "rank d = {}", c.d);
    let _ = writeln!(out, "E (pivoted Cholesky factor, EᵀE = P)\n{}", c.e);
    let _ = writeln!(out, "M (EM = 1)\n{}", c.m);
    let _ = writeln!(out, "left leg [E; R]\n{}", c.cospan.left);
    let _ = writeln!(out, "right leg [0; 1]\n{}", c.cospan.right);
    let _ = writeln!(out, "residual ‖EᵀE − P‖ = {:e}", c.residual);
    Ok(())
}

fn space(pairs: &[(&str, i64, i64)]) -> Result<FinProbSpace> {
    FinProbSpace::new(pairs.iter().map(|&(p, n, d)| (p, rat(n, d))))
}

fn bayes(out: &mut String) -> Result<()> {
    let a = space(&[("a0", 1, 2), ("a1", 1, 2)])?;
    let b = space(&[("b0", 1, 4), ("b1", 3, 4)])?;
    let r = StochMap {
        src: a,
        dst: b,
        entries: vec![vec![rat(1, 2), rat(0, 1)], vec![rat(1, 2), rat(1, 1)]],
    };
    FinProb.validate(&r)?;
    let _ = writeln!(out, "stochastic map r\n{r}");
    let rd = fp_bayes(&r);
    let _ = writeln!(out, "Bayesian inverse r†(a|b) = r(b|a) Pr(a) / Pr(b)\n{rd}");
    let _ = writeln!(out, "r†† = r: {}", fp_bayes(&rd) == r);
    let rr = fp_compose(&r, &rd)?;
    let _ = writeln!(out, "r ∘ r†\n{rr}");
    Ok(())
}

fn conditional_product(out: &mut String) -> Result<()> {
    let c = space(&[("c0", 1, 2), ("c1", 1, 2)])?;
    let a = space(&[("x0", 1, 4), ("x1", 1, 4), ("x2", 1, 2)])?;
    let b = space(&[("y0", 1, 6), ("y1", 1, 3), ("y2", 1, 2)])?;
    let table = |pairs: &[(&str, &str)]| -> BTreeMap<String, String> {
        pairs.iter().map(|(x, y)| (x.to_string(), y.to_string())).collect()
    };
    let f = fp_delta(&a, c.points(), &table(&[("x0", "c0"), ("x1", "c0"), ("x2", "c1")]))?;
    let g = fp_delta(&b, c.points(), &table(&[("y0", "c0"), ("y1", "c0"), ("y2", "c1")]))?;
    let _ = writeln!(out, "C = {c}\nA = {a}\nB = {b}");
    let _ = writeln!(out, "f: A -> C\n{f}");
    let _ = writeln!(out, "g: B -> C\n{g}");
    let span = fp_conditional_product(&Cospan::new(f.clone(), g.clone()), None)?;
    let apex = FinProb.dom(&span.left);
    let _ = writeln!(out, "conditional product: pairs over the same point, Pr(a) Pr(b) / Pr(c)");
    let _ = writeln!(out, "apex {apex}");
    let _ = writeln!(out, "projection to A\n{}", span.left);
    let _ = writeln!(out, "projection to B\n{}", span.right);
    let lhs = fp_compose(&f, &span.left)?;
    let rhs = fp_compose(&g, &span.right)?;
    let _ = writeln!(out, "square commutes: {}", lhs == rhs);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_demo_runs() {
        for name in DEMOS {
            let text = demo(name).unwrap();
            assert!(!text.is_empty(), "{name}");
        }
        assert!(demo("nope").is_err());
    }

    #[test]
    fn l2_demo_shows_unit_factor() {
        let text = demo("l2-codilator").unwrap();
        assert!(text.contains("rank d = 1"));
    }
}
