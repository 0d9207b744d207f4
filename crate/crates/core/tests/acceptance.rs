//! One pass/fail line per acceptance criterion.

use std::time::{Duration, Instant};

use dagrel::mutation::Mutation;
use dagrel::suites::{couplings_suite, l2_suite, mutation_suite, run_suite, Instance, Suite, SuiteConfig};
use dagrel::Report;

struct Line {
    id: usize,
    name: &'static str,
    ok: bool,
    detail: String,
}

fn per_instance(id: usize, name: &'static str, suite: Suite, cfg: &SuiteConfig, budget: Option<Duration>) -> Line {
    let mut ok = true;
    let mut detail = Vec::new();
    for inst in Instance::ALL {
        let t = Instant::now();
        let rep = run_suite(inst, suite, cfg);
        let dt = t.elapsed();
        let in_time = budget.is_none_or(|b| dt < b);
        ok &= rep.ok() && in_time;
        detail.push(summary(inst.name(), &rep, dt));
    }
    Line { id, name, ok, detail: detail.join("; ") }
}

fn summary(label: &str, rep: &Report, dt: Duration) -> String {
    let mut s = format!("{label} {}/{} in {:.2}s", rep.passed, rep.checked, dt.as_secs_f64());
    if !rep.ok() {
        s.push_str(&format!(" FAILED {:?}", rep.laws_failed()));
        if let Some(w) = rep.witnesses.first() {
            s.push_str(&format!(" first: {} ({})", w.law, w.detail));
        }
    }
    s
}

fn single(id: usize, name: &'static str, f: impl FnOnce() -> Report, budget: Option<Duration>) -> Line {
    let t = Instant::now();
    let rep = f();
    let dt = t.elapsed();
    let ok = rep.ok() && budget.is_none_or(|b| dt < b);
    Line { id, name, ok, detail: summary(&rep.suite, &rep, dt) }
}

#[test]
fn acceptance() {
    let cfg = SuiteConfig::default();
    let t = Instant::now();
    let mut lines = vec![
        per_instance(1, "dagger laws", Suite::Dagger, &cfg, Some(Duration::from_secs(10))),
        per_instance(2, "independence axioms", Suite::Independence, &cfg, None),
        per_instance(3, "epi-regularity", Suite::EpiRegular, &cfg, None),
        per_instance(4, "dilators", Suite::Dilator, &cfg, None),
    ];
    let rt = Instant::now();
    let mut roundtrip = per_instance(5, "relations roundtrip", Suite::Roundtrip, &cfg, None);
    if rt.elapsed() >= Duration::from_secs(60) {
        roundtrip.ok = false;
        roundtrip.detail.push_str("; over the 60 s budget");
    }
    lines.push(roundtrip);
    lines.push(per_instance(6, "cross-theory checks", Suite::CrossTheory, &cfg, None));
    lines.push(single(7, "l2 codilators", || l2_suite(&cfg, 4), Some(Duration::from_secs(30))));
    lines.push(single(8, "couplings", || couplings_suite(&cfg), None));

    let mt = Instant::now();
    let outcomes: Vec<_> = Mutation::ALL.into_iter().map(|m| mutation_suite(&cfg, m)).collect();
    let detail = outcomes
        .iter()
        .map(|o| format!("{} caught by {:?}", o.mutation, o.caught_by))
        .collect::<Vec<_>>()
        .join("; ");
    lines.push(Line {
        id: 9,
        name: "mutation sensitivity",
        ok: outcomes.iter().all(|o| o.caught()),
        detail: format!("{detail} ({:.2}s)", mt.elapsed().as_secs_f64()),
    });

    for l in &lines {
        println!("criterion {} {}: {} -- {}", l.id, l.name, if l.ok { "PASS" } else { "FAIL" }, l.detail);
    }
    println!("total {:.2}s", t.elapsed().as_secs_f64());
    let failed: Vec<usize> = lines.iter().filter(|l| !l.ok).map(|l| l.id).collect();
    assert!(failed.is_empty(), "criteria failed: {failed:?}");
}
