//! The `dagrel` command line: category operations on JSON files and the law
//! suites.
//!
//! Exit status is 0 on success, 1 when a mathematical check fails and 2 on
//! unreadable or invalid input.

use std::ffi::OsString;
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::category::{Category, Codilatory, Cospan, DaggerCategory, Dilatory, Span, Square};
use crate::demo::demo;
use crate::error::CatError;
use crate::finprob::{FinProb, StochMap};
use crate::independence::{EpiRegular, IndependenceCategory};
use crate::kits::{FinProbKit, Kit, MSurjKit, MatKit, Mor, Obj, PInjKit};
use crate::laws::verify_dilator;
use crate::matcontr::{mat_codilator, Mat, Matrix, ToleranceConfig};
use crate::msurj::{MSurj, MultiMap};
use crate::mutation::Mutation;
use crate::pinj::{PInj, PartialInjection};
use crate::relcat::{roundtrip_check, RelCat, Relation};
use crate::report::{to_json, Report};
use crate::suites::{run_suite, Instance, Suite, SuiteConfig};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Math(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Math(_) => 1,
        }
    }
}

impl From<CatError> for CliError {
    fn from(e: CatError) -> Self {
        match e {
            CatError::Parse(_) | CatError::Invalid(_) | CatError::Mismatch(_) | CatError::Precondition(_) => {
                CliError::Input(e.to_string())
            }
            _ => CliError::Math(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "dagrel", version, about = "Dagger categories of relations over four finite instances")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// msurj, pinj, finprob or mat.
    #[arg(long, short = 'c')]
    pub category: Option<Instance>,
    #[arg(long, env = "DAGREL_SEED", default_value_t = 42)]
    pub seed: u64,
    #[arg(long)]
    pub samples: Option<usize>,
    /// Entrywise equality tolerance for matrices.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub rank_tol: Option<f64>,
    /// Include intermediate constructions in the output.
    #[arg(long)]
    pub trace: bool,
    /// Write the JSON result here instead of standard output.
    #[arg(long, short = 'o')]
    pub out: Option<PathBuf>,
    /// Largest sampled set size or matrix dimension.
    #[arg(long, default_value_t = 4)]
    pub dims: usize,
    /// Print human-readable text instead of JSON.
    #[arg(long)]
    pub text: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// `s ∘ r` for morphisms in R and S.
    Compose {
        r: PathBuf,
        s: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// The dagger of a morphism: converse, transpose or Bayesian inverse.
    Dagger {
        r: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// The dilator span of a morphism (msurj, finprob).
    Dilator {
        r: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// The codilator cospan of a morphism (pinj, mat).
    Codilator {
        r: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Independent pullback of a cospan {left, right} of coisometries. For
    /// pinj and mat the input is a span of injections or isometries and the
    /// result is their pushout.
    Indpull {
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Image factorisation of a span (cospan for pinj and mat).
    Factorize {
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Whether a square {f, g, u, v} is independent.
    Independent {
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Run the law suites.
    CheckAxioms {
        /// Only this suite (dagger, independence, epi-regular, dilator,
        /// roundtrip, cross-theory).
        #[arg(long)]
        suite: Option<Suite>,
        #[arg(long)]
        mutation: Option<Mutation>,
        /// Record wall time in the reports; the output is then no longer
        /// reproducible byte for byte.
        #[arg(long)]
        timing: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Sampled check that relations of coisometries give back the category.
    Roundtrip {
        #[command(flatten)]
        common: Common,
    },
    /// Compose two relations given as jointly monic spans.
    RelCompose {
        r: PathBuf,
        s: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Check the instance invariants of a morphism.
    Validate {
        path: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Print a worked example: graph, pinj-codilator, l2-codilator,
    /// cholesky, bayes, conditional-product.
    Demo { name: String },
}

/// Output of one invocation.
#[derive(Debug, Default)]
pub struct Outcome {
    pub stdout: String,
    /// 0, 1, or 2 when `validate` rejects its input.
    pub status: i32,
}

/// Parses `args` and runs the command.
pub fn main_with<I, T>(args: I) -> (i32, String, String)
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            return (code, if code == 0 { e.to_string() } else { String::new() }, if code == 0 { String::new() } else { e.to_string() });
        }
    };
    match run(&cli.command) {
        Ok(o) => (o.status, o.stdout, String::new()),
        Err(e) => (e.exit_code(), String::new(), format!("error: {e}\n")),
    }
}

fn category(common: &Common) -> Result<Instance, CliError> {
    common.category.ok_or_else(|| CliError::Input("--category is required".into()))
}

fn tolerances(common: &Common) -> Result<ToleranceConfig, CliError> {
    let mut tol = ToleranceConfig::default();
    if let Some(t) = common.tol {
        tol.eq_tol = t;
    }
    if let Some(t) = common.rank_tol {
        tol.rank_tol = t;
    }
    tol.check()?;
    Ok(tol)
}

fn suite_config(common: &Common, mutation: Option<Mutation>) -> Result<SuiteConfig, CliError> {
    if common.dims == 0 {
        return Err(CliError::Input("--dims must be at least 1".into()));
    }
    Ok(SuiteConfig { seed: common.seed, samples: common.samples, tol: tolerances(common)?, mutation, size: common.dims })
}

fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn read<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = read_text(path)?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn emit(common: &Common, value: &Value, text: impl FnOnce() -> String) -> Result<String, CliError> {
    let json = serde_json::to_string_pretty(value).map_err(|e| CliError::Math(e.to_string()))? + "\n";
    if let Some(path) = &common.out {
        std::fs::write(path, &json).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        return Ok(if common.text { text() } else { String::new() });
    }
    Ok(if common.text { text() } else { json })
}

fn with_trace(common: &Common, result: Value, trace: impl FnOnce() -> Value) -> Value {
    if common.trace {
        json!({ "result": result, "trace": trace() })
    } else {
        result
    }
}

fn checked<C: Category>(c: &C, path: &Path, f: &C::Mor) -> Result<(), CliError> {
    c.validate(f).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn run(cmd: &Command) -> Result<Outcome, CliError> {
    let done = |stdout: String| Ok(Outcome { stdout, status: 0 });
    match cmd {
        Command::Demo { name } => demo(name).map(|s| Outcome { stdout: s, status: 0 }).map_err(|e| CliError::Input(e.to_string())),
        Command::Compose { r, s, common } => {
            let tol = tolerances(common)?;
            done(match category(common)? {
                Instance::MSurj => compose_in(&MSurj, r, s, common)?,
                Instance::PInj => compose_in(&PInj, r, s, common)?,
                Instance::FinProb => compose_in(&FinProb, r, s, common)?,
                Instance::Mat => compose_in(&Mat::new(tol), r, s, common)?,
            })
        }
        Command::Dagger { r, common } => {
            let tol = tolerances(common)?;
            done(match category(common)? {
                Instance::MSurj => dagger_in(&MSurj, r, common)?,
                Instance::PInj => dagger_in(&PInj, r, common)?,
                Instance::FinProb => dagger_in(&FinProb, r, common)?,
                Instance::Mat => dagger_in(&Mat::new(tol), r, common)?,
            })
        }
        Command::Validate { path, common } => validate(path, common),
        Command::Dilator { r, common } => {
            let out = match category(common)? {
                Instance::MSurj => dilator(&MSurj, r, common)?,
                Instance::FinProb => dilator(&FinProb, r, common)?,
                other => return Err(CliError::Input(format!("dilator is defined for msurj and finprob, not {other}; use codilator"))),
            };
            done(out)
        }
        Command::Codilator { r, common } => {
            let out = match category(common)? {
                Instance::PInj => codilator(&PInj, r, common)?,
                Instance::Mat => mat_codilator_cmd(r, common)?,
                other => return Err(CliError::Input(format!("codilator is defined for pinj and mat, not {other}; use dilator"))),
            };
            done(out)
        }
        Command::Indpull { input, common } => done(on_kit(common, |k| k.indpull(input))?),
        Command::Factorize { input, common } => done(on_kit(common, |k| k.factorize(input))?),
        Command::Independent { input, common } => done(on_kit(common, |k| k.independent(input))?),
        Command::RelCompose { r, s, common } => done(on_kit(common, |k| k.rel_compose(r, s))?),
        Command::Roundtrip { common } => on_kit(common, |k| k.roundtrip()),
        Command::CheckAxioms { suite, mutation, timing, common } => check_axioms(common, *suite, *mutation, *timing),
    }
}

/// Morphisms that can be read from a file.
pub trait Load: Sized {
    fn load(path: &Path) -> Result<Self, CliError>;
}

macro_rules! load_json {
    ($($t:ty),*) => {
        $(impl Load for $t {
            fn load(path: &Path) -> Result<Self, CliError> {
                read(path)
            }
        })*
    };
}

load_json!(MultiMap, PartialInjection, StochMap);

/// JSON, or the aligned text format.
impl Load for Matrix {
    fn load(path: &Path) -> Result<Self, CliError> {
        let text = read_text(path)?;
        let parsed = if text.trim_start().starts_with('{') {
            serde_json::from_str(&text).map_err(|e| e.to_string())
        } else {
            Matrix::from_text(&text).map_err(|e| e.to_string())
        };
        parsed.map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
    }
}

fn load<C: Category>(c: &C, path: &Path) -> Result<C::Mor, CliError>
where
    C::Mor: Load,
{
    let f = C::Mor::load(path)?;
    checked(c, path, &f)?;
    Ok(f)
}

fn compose_in<D>(d: &D, r: &Path, s: &Path, common: &Common) -> Result<String, CliError>
where
    D: DaggerCategory,
    D::Mor: Load + Serialize + Display,
{
    let (rr, ss) = (load(d, r)?, load(d, s)?);
    let sr = d.compose(&ss, &rr)?;
    emit(common, &to_json(&sr), || format!("{sr}\n"))
}

fn dagger_in<D>(d: &D, r: &Path, common: &Common) -> Result<String, CliError>
where
    D: DaggerCategory,
    D::Mor: Load + Serialize + Display,
{
    let rd = d.dagger(&load(d, r)?);
    emit(common, &to_json(&rd), || format!("{rd}\n"))
}

fn dilator<D>(d: &D, r: &Path, common: &Common) -> Result<String, CliError>
where
    D: Dilatory,
    D::Mor: Load + Serialize + Display,
{
    let m = load(d, r)?;
    let dil = d.dilator(&m)?;
    let value = with_trace(common, to_json(&dil), || match verify_dilator(d, &m, &dil, &[]) {
        Ok(chk) => to_json(&chk),
        Err(e) => json!({ "error": e.to_string() }),
    });
    emit(common, &value, || format!("left\n{}\nright\n{}\n", dil.left, dil.right))
}

fn codilator<D>(d: &D, r: &Path, common: &Common) -> Result<String, CliError>
where
    D: Codilatory,
    D::Mor: Load + Serialize + Display,
{
    let m = load(d, r)?;
    let cod = d.codilator(&m)?;
    emit(common, &to_json(&cod), || format!("left\n{}\nright\n{}\n", cod.left, cod.right))
}

fn mat_codilator_cmd(r: &Path, common: &Common) -> Result<String, CliError> {
    let tol = tolerances(common)?;
    let m = Matrix::load(r)?;
    let c = mat_codilator(&m, &tol, None)?;
    let value = with_trace(common, to_json(&c.cospan), || to_json(&c));
    emit(common, &value, || {
        format!("d = {}\nE\n{}\nleft\n{}\nright\n{}\nresidual {:e}\n", c.d, c.e, c.cospan.left, c.cospan.right, c.residual)
    })
}

fn validate(path: &Path, common: &Common) -> Result<Outcome, CliError> {
    let inst = category(common)?;
    let tol = tolerances(common)?;
    let mut rep = Report::new(format!("validate {inst}"), None);
    let result = match inst {
        Instance::MSurj => MultiMap::load(path).map(|f| MSurj.validate(&f)),
        Instance::PInj => PartialInjection::load(path).map(|f| PInj.validate(&f)),
        Instance::FinProb => StochMap::load(path).map(|f| FinProb.validate(&f)),
        Instance::Mat => Matrix::load(path).map(|f| Mat::new(tol).validate(&f)),
    }?;
    match result {
        Ok(()) => rep.pass(),
        Err(e) => rep.fail(invariant_name(&e), e.to_string(), vec![json!(path.display().to_string())]),
    }
    // An invariant violation in an input file is an input error.
    let status = if rep.ok() { 0 } else { 2 };
    let stdout = emit(common, &to_json(&rep), || format!("{rep}\n"))?;
    Ok(Outcome { stdout, status })
}

/// The parenthesised invariant name at the end of an error message, or the
/// whole message.
fn invariant_name(e: &CatError) -> String {
    let msg = e.to_string();
    match (msg.rfind('('), msg.ends_with(')')) {
        (Some(i), true) => msg[i + 1..msg.len() - 1].to_string(),
        _ => msg,
    }
}

/// Operations that need the epi-regular base of an instance.
struct KitOps<'a, K> {
    k: &'a K,
    common: &'a Common,
    cfg: SuiteConfig,
    /// pinj and mat work with the opposite category: spans in, cospans out.
    dual: bool,
}

trait KitCommands {
    fn indpull(&self, input: &Path) -> Result<String, CliError>;
    fn factorize(&self, input: &Path) -> Result<String, CliError>;
    fn independent(&self, input: &Path) -> Result<String, CliError>;
    fn rel_compose(&self, r: &Path, s: &Path) -> Result<String, CliError>;
    fn roundtrip(&self) -> Result<Outcome, CliError>;
}

impl<K: Kit> KitOps<'_, K>
where
    Mor<K>: DeserializeOwned,
{
    fn load_span(&self, path: &Path) -> Result<Span<Mor<K>>, CliError> {
        let s: Span<Mor<K>> = read(path)?;
        for m in [&s.left, &s.right] {
            checked(self.k.base(), path, m)?;
        }
        self.k.base().check_span(&s)?;
        Ok(s)
    }
}

impl<K: Kit> KitCommands for KitOps<'_, K>
where
    Mor<K>: DeserializeOwned,
{
    fn indpull(&self, input: &Path) -> Result<String, CliError> {
        let c = self.k.base();
        let cs: Cospan<Mor<K>> = read(input)?;
        for m in [&cs.left, &cs.right] {
            checked(c, input, m)?;
        }
        c.check_cospan(&cs)?;
        let pb = c.independent_pullback(&cs)?;
        let value = with_trace(self.common, to_json(&pb), || {
            let sq = Square::new(pb.left.clone(), pb.right.clone(), cs.left.clone(), cs.right.clone());
            json!({ "square": to_json(&sq), "commutes": c.commutes(&sq), "independent": c.is_independent(&sq) })
        });
        emit(self.common, &value, || serde_json::to_string_pretty(&value).unwrap_or_default())
    }

    fn factorize(&self, input: &Path) -> Result<String, CliError> {
        let c = self.k.base();
        let span = self.load_span(input)?;
        let f = c.factorize(&span)?;
        let mut out = to_json(&f);
        if self.dual {
            out = json!({ "mono": out["epi"].take(), "legs": out["legs"].take() });
        }
        let value = with_trace(self.common, out, || json!({ "jointly_monic": c.is_jointly_monic(&f.legs) }));
        emit(self.common, &value, || serde_json::to_string_pretty(&value).unwrap_or_default())
    }

    fn independent(&self, input: &Path) -> Result<String, CliError> {
        let c = self.k.base();
        let sq: Square<Mor<K>> = read(input)?;
        for m in [&sq.f, &sq.g, &sq.u, &sq.v] {
            checked(c, input, m)?;
        }
        let ind = c.is_independent(&sq);
        let value = with_trace(self.common, json!(ind), || json!({ "commutes": c.commutes(&sq) }));
        emit(self.common, &value, || format!("{ind}\n"))
    }

    fn rel_compose(&self, r: &Path, s: &Path) -> Result<String, CliError> {
        let rel = RelCat::new(self.k.base().clone());
        let rr = rel.relation(self.load_span(r)?)?;
        let ss = rel.relation(self.load_span(s)?)?;
        let (sr, trace) = rel.rel_compose_traced(&ss, &rr)?;
        let value = with_trace(self.common, to_json(&sr), || to_json(&trace));
        emit(self.common, &value, || relation_text::<K>(&sr))
    }

    fn roundtrip(&self) -> Result<Outcome, CliError> {
        let rel = RelCat::new(self.k.base().clone());
        let n = self.cfg.samples.unwrap_or(200);
        let w = roundtrip_check(&rel, self.k.sampler(), self.k.name(), self.cfg.seed, n, |a, b| self.k.close(a, b));
        let status = if w.ok() { 0 } else { 1 };
        let stdout = emit(self.common, &to_json(&w), || w.to_string())?;
        Ok(Outcome { stdout, status })
    }
}

fn relation_text<K: Kit>(r: &Relation<Obj<K>, Mor<K>>) -> String {
    serde_json::to_string_pretty(r).unwrap_or_default() + "\n"
}

fn on_kit<T>(common: &Common, f: impl Fn(&dyn KitCommands) -> Result<T, CliError>) -> Result<T, CliError> {
    let cfg = suite_config(common, None)?;
    match category(common)? {
        Instance::MSurj => f(&KitOps { k: &MSurjKit::new(cfg.size, None), common, cfg, dual: false }),
        Instance::PInj => f(&KitOps { k: &PInjKit::new(cfg.size), common, cfg, dual: true }),
        Instance::FinProb => f(&KitOps { k: &FinProbKit::new(cfg.size, None), common, cfg, dual: false }),
        Instance::Mat => f(&KitOps { k: &MatKit::new(cfg.size, cfg.tol, None), common, cfg, dual: true }),
    }
}

fn check_axioms(common: &Common, suite: Option<Suite>, mutation: Option<Mutation>, timing: bool) -> Result<Outcome, CliError> {
    let inst = category(common)?;
    let cfg = suite_config(common, mutation)?;
    let suites: Vec<Suite> = suite.map_or_else(|| Suite::ALL.to_vec(), |s| vec![s]);
    let mut reports = Vec::new();
    for s in suites {
        let t = Instant::now();
        let mut rep = run_suite(inst, s, &cfg);
        if timing {
            rep.wall_time_ms = Some(t.elapsed().as_millis() as u64);
        }
        reports.push(rep);
    }
    let status = if reports.iter().all(Report::ok) { 0 } else { 1 };
    let stdout = emit(common, &to_json(&reports), || reports.iter().map(|r| format!("{r}\n")).collect())?;
    Ok(Outcome { stdout, status })
}

