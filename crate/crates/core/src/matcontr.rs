//! Real matrices of operator norm at most one, with the transpose as dagger.
//!
//! An `n × m` matrix is a morphism `m → n`. Isometries have orthonormal
//! columns. The codilator of `R: m → n` lives on `d + n` where `d` is the
//! rank of `1 − RᵀR`: its legs are `[E; R]` and `[0; 1]` for any full-row-rank
//! `E` with `EᵀE = 1 − RᵀR`. All comparisons are entrywise within a
//! tolerance.

use std::fmt;

use nalgebra::{DMatrix, DVector, SymmetricEigen, SVD};
use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::category::{
    Category, CoFactorization, Codilatory, Cospan, DaggerCategory, Span,
};
use crate::error::{CatError, Result};
use crate::independence::{CoEpiRegular, CoIndependenceCategory, IsometryCategory};
use crate::mutation::{active, Mutation};
use crate::pinj::PartialInjection;
use crate::sample::{Rng, Sampler};

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix(pub DMatrix<f64>);

#[derive(Serialize, Deserialize)]
struct RawMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<f64>>,
}

impl Serialize for Matrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RawMatrix {
            rows: self.rows(),
            cols: self.cols(),
            entries: (0..self.rows()).map(|i| self.0.row(i).iter().copied().collect()).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawMatrix::deserialize(d)?;
        Matrix::from_rows(raw.rows, raw.cols, &raw.entries).map_err(serde::de::Error::custom)
    }
}

impl Matrix {
    pub fn from_rows(rows: usize, cols: usize, entries: &[Vec<f64>]) -> Result<Self> {
        if entries.len() != rows {
            return Err(CatError::Parse(format!("expected {rows} rows, found {}", entries.len())));
        }
        if let Some((i, r)) = entries.iter().enumerate().find(|(_, r)| r.len() != cols) {
            return Err(CatError::Parse(format!("row {i} has {} entries, expected {cols}", r.len())));
        }
        Ok(Matrix(DMatrix::from_fn(rows, cols, |i, j| entries[i][j])))
    }

    /// Builds a matrix from row slices; panics on ragged input.
    pub fn new(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        Matrix(DMatrix::from_fn(r, c, |i, j| rows[i][j]))
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix(DMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        Matrix(DMatrix::identity(n, n))
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn transpose(&self) -> Matrix {
        Matrix(self.0.transpose())
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        Matrix(&self.0 * &other.0)
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        Matrix(&self.0 - &other.0)
    }

    /// `[self; other]`.
    pub fn vstack(&self, other: &Matrix) -> Matrix {
        let (r1, r2, c) = (self.rows(), other.rows(), self.cols());
        Matrix(DMatrix::from_fn(r1 + r2, c, |i, j| if i < r1 { self.0[(i, j)] } else { other.0[(i - r1, j)] }))
    }

    /// `[self other]`.
    pub fn hstack(&self, other: &Matrix) -> Matrix {
        let (c1, c2, r) = (self.cols(), other.cols(), self.rows());
        Matrix(DMatrix::from_fn(r, c1 + c2, |i, j| if j < c1 { self.0[(i, j)] } else { other.0[(i, j - c1)] }))
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Largest absolute entry of `self − other`, infinite on shape mismatch.
    pub fn dist(&self, other: &Matrix) -> f64 {
        if self.rows() != other.rows() || self.cols() != other.cols() {
            return f64::INFINITY;
        }
        self.sub(other).max_abs()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }

    /// Whitespace-aligned rows, one per line.
    pub fn to_text(&self) -> String {
        let cells: Vec<Vec<String>> = (0..self.rows())
            .map(|i| (0..self.cols()).map(|j| format!("{:.6}", self.0[(i, j)])).collect())
            .collect();
        let width = cells.iter().flatten().map(String::len).max().unwrap_or(0);
        let mut out = format!("# {}x{}\n", self.rows(), self.cols());
        for row in cells {
            let line: Vec<String> = row.iter().map(|c| format!("{c:>width$}")).collect();
            out.push_str(&line.join("  "));
            out.push('\n');
        }
        out
    }

    /// Parses the output of [`Matrix::to_text`] or plain rows of numbers.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut shape = None;
        let mut rows = Vec::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            if let Some(h) = line.strip_prefix('#') {
                if let Some((r, c)) = h.trim().split_once('x') {
                    let r = r.trim().parse::<usize>().map_err(|_| CatError::Parse(format!("bad header '{line}'")))?;
                    let c = c.trim().parse::<usize>().map_err(|_| CatError::Parse(format!("bad header '{line}'")))?;
                    shape = Some((r, c));
                }
                continue;
            }
            let row = line
                .split_whitespace()
                .map(|t| t.parse::<f64>().map_err(|_| CatError::Parse(format!("'{t}' is not a number"))))
                .collect::<Result<Vec<f64>>>()?;
            rows.push(row);
        }
        let (r, c) = shape.unwrap_or((rows.len(), rows.first().map_or(0, Vec::len)));
        if r == 0 || c == 0 {
            return Ok(Matrix::zeros(r, c));
        }
        Matrix::from_rows(r, c, &rows)
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    /// Entrywise equality of matrices.
    pub eq_tol: f64,
    /// Relative eigenvalue and singular-value cutoff for rank decisions.
    pub rank_tol: f64,
    /// Allowed excess of the operator norm over one.
    pub norm_slack: f64,
    /// Budget for results of several chained operations (mediators,
    /// factorisations through pseudo-inverses).
    pub composite_tol: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        ToleranceConfig { eq_tol: 1e-8, rank_tol: 1e-10, norm_slack: 1e-9, composite_tol: 1e-6 }
    }
}

impl ToleranceConfig {
    pub fn check(&self) -> Result<()> {
        for (name, v) in [
            ("eq_tol", self.eq_tol),
            ("rank_tol", self.rank_tol),
            ("norm_slack", self.norm_slack),
            ("composite_tol", self.composite_tol),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CatError::invalid(format!("tolerance {name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// Eigenvalues of a symmetric matrix, ascending, with eigenvectors as columns.
fn sym_eigen(p: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = p.nrows();
    if n == 0 {
        return (Vec::new(), DMatrix::zeros(0, 0));
    }
    let sym = (p + p.transpose()) * 0.5;
    let scale = sym.amax().max(1.0);
    let mut best: Option<(f64, SymmetricEigen<f64, nalgebra::Dyn>)> = None;
    for eps in SOLVER_EPS {
        let Some(e) = SymmetricEigen::try_new(sym.clone(), eps, 0) else { continue };
        let err = (e.clone().recompose() - &sym).amax();
        if best.as_ref().is_none_or(|(b, _)| err < *b) {
            best = Some((err, e));
        }
        if err <= 1e-12 * scale {
            break;
        }
    }
    let e = best.map(|(_, e)| e).unwrap_or_else(|| SymmetricEigen::new(sym));
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| e.eigenvalues[a].total_cmp(&e.eigenvalues[b]));
    let vals = idx.iter().map(|&i| e.eigenvalues[i]).collect();
    let vecs = DMatrix::from_fn(n, n, |r, c| e.eigenvectors[(r, idx[c])]);
    (vals, vecs)
}

/// Operator norm (largest singular value).
pub fn op_norm(a: &Matrix) -> f64 {
    let (r, c) = (a.rows(), a.cols());
    if r == 0 || c == 0 {
        return 0.0;
    }
    let gram = if c <= r { a.0.transpose() * &a.0 } else { &a.0 * a.0.transpose() };
    if r.max(c) <= 64 {
        let (vals, _) = sym_eigen(&gram);
        return vals.last().copied().unwrap_or(0.0).max(0.0).sqrt();
    }
    power_norm(&gram)
}

/// Largest eigenvalue of a positive semidefinite matrix by power iteration,
/// returned as its square root.
fn power_norm(gram: &DMatrix<f64>) -> f64 {
    let n = gram.nrows();
    let mut v = DVector::from_fn(n, |i, _| 1.0 + (i as f64) / (n as f64));
    v /= v.norm();
    let mut lambda = 0.0;
    for _ in 0..1000 {
        let w = gram * &v;
        let nw = w.norm();
        if nw == 0.0 {
            return 0.0;
        }
        let next = v.dot(&w);
        v = w / nw;
        if (next - lambda).abs() <= 1e-15 * next.abs().max(1.0) {
            lambda = next;
            break;
        }
        lambda = next;
    }
    lambda.max(0.0).sqrt()
}

pub fn mat_is_contractive(a: &Matrix, tol: &ToleranceConfig) -> Result<bool> {
    if !a.is_finite() {
        return Err(CatError::invalid("matrix has non-finite entries"));
    }
    Ok(op_norm(a) <= 1.0 + tol.norm_slack)
}

/// `‖AᵀA − 1‖∞ ≤ eq_tol`.
pub fn mat_is_isometry(a: &Matrix, tol: &ToleranceConfig) -> bool {
    a.transpose().mul(a).dist(&Matrix::identity(a.cols())) <= tol.eq_tol
}

/// The canonical codilator of a contraction `R`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Codilator {
    pub d: usize,
    /// `d × m` with `EᵀE = 1 − RᵀR`.
    pub e: Matrix,
    /// `m × d` with `EM = 1`.
    pub m: Matrix,
    pub r: Matrix,
    pub cospan: Cospan<Matrix>,
    /// `‖EᵀE − (1 − RᵀR)‖∞`.
    pub residual: f64,
}

/// Pivoted outer-product Cholesky of a positive semidefinite matrix, stopped
/// after `d` steps. Returns `L` (`n × d`) with `LLᵀ ≈ P`.
pub fn pivoted_cholesky(p: &DMatrix<f64>, d: usize) -> Result<DMatrix<f64>> {
    let n = p.nrows();
    let mut res = p.clone();
    let mut l = DMatrix::zeros(n, d);
    let mut used = vec![false; n];
    for k in 0..d {
        let (piv, val) = (0..n)
            .filter(|&i| !used[i])
            .map(|i| (i, res[(i, i)]))
            .fold((usize::MAX, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
        if piv == usize::MAX || val <= 0.0 {
            return Err(CatError::Numerical(format!(
                "Cholesky pivot {k} of {d} is not positive ({val:e})"
            )));
        }
        used[piv] = true;
        let s = val.sqrt();
        let col: Vec<f64> = (0..n).map(|i| if used[i] && i != piv { 0.0 } else { res[(i, piv)] / s }).collect();
        for (i, c) in col.iter().enumerate() {
            l[(i, k)] = *c;
        }
        for i in 0..n {
            for j in 0..n {
                res[(i, j)] -= col[i] * col[j];
            }
        }
    }
    Ok(l)
}

/// Cholesky without pivoting, keeping the columns whose pivot exceeds
/// `threshold`. Used only by the rank mutation.
fn unpivoted_cholesky(p: &DMatrix<f64>, threshold: f64) -> DMatrix<f64> {
    let n = p.nrows();
    let mut res = p.clone();
    let mut cols: Vec<Vec<f64>> = Vec::new();
    for k in 0..n {
        let val = res[(k, k)];
        if val <= threshold {
            continue;
        }
        let s = val.sqrt();
        let col: Vec<f64> = (0..n).map(|i| if i < k { 0.0 } else { res[(i, k)] / s }).collect();
        for i in 0..n {
            for j in 0..n {
                res[(i, j)] -= col[i] * col[j];
            }
        }
        cols.push(col);
    }
    DMatrix::from_fn(n, cols.len(), |i, j| cols[j][i])
}

/// Convergence thresholds tried in turn. nalgebra's iterations occasionally
/// stop early at the default threshold (reconstruction errors around 10⁻²
/// on well-conditioned 4×7 inputs), so every decomposition is checked by
/// recomposing it.
const SOLVER_EPS: [f64; 4] = [f64::EPSILON, 1e-20, 1e-13, 1e-11];

fn checked_svd(a: &DMatrix<f64>) -> SVD<f64, nalgebra::Dyn, nalgebra::Dyn> {
    let scale = a.amax().max(1.0);
    let mut best: Option<(f64, SVD<f64, nalgebra::Dyn, nalgebra::Dyn>)> = None;
    for eps in SOLVER_EPS {
        let Some(svd) = SVD::try_new(a.clone(), true, true, eps, 0) else { continue };
        let err = svd.clone().recompose().map(|m| (m - a).amax()).unwrap_or(f64::INFINITY);
        if best.as_ref().is_none_or(|(b, _)| err < *b) {
            best = Some((err, svd));
        }
        if err <= 1e-12 * scale {
            break;
        }
    }
    best.map(|(_, s)| s).unwrap_or_else(|| SVD::new(a.clone(), true, true))
}

/// Moore–Penrose pseudo-inverse with singular values below `rel·σ_max`
/// treated as zero.
pub fn pinv(a: &Matrix, rel: f64) -> Matrix {
    let (r, c) = (a.rows(), a.cols());
    if r == 0 || c == 0 {
        return Matrix::zeros(c, r);
    }
    let svd = checked_svd(&a.0);
    let smax = svd.singular_values.iter().fold(0.0f64, |m, &s| m.max(s));
    let eps = (rel * smax.max(1.0)).max(f64::MIN_POSITIVE);
    match svd.pseudo_inverse(eps) {
        Ok(p) => Matrix(p),
        Err(_) => Matrix::zeros(c, r),
    }
}

/// Numerical rank with singular values above `rel·max(σ_max, 1)`.
pub fn rank(a: &Matrix, rel: f64) -> usize {
    if a.rows() == 0 || a.cols() == 0 {
        return 0;
    }
    let svd = checked_svd(&a.0);
    let smax = svd.singular_values.iter().fold(0.0f64, |m, &s| m.max(s));
    svd.singular_values.iter().filter(|&&s| s > rel * smax.max(1.0)).count()
}

/// Orthonormal basis of the column space, as the columns of the result.
pub fn column_basis(a: &Matrix, rel: f64) -> Matrix {
    let (r, c) = (a.rows(), a.cols());
    if r == 0 || c == 0 {
        return Matrix::zeros(r, 0);
    }
    let svd = checked_svd(&a.0);
    let u = svd.u.expect("left singular vectors requested");
    let smax = svd.singular_values.iter().fold(0.0f64, |m, &s| m.max(s));
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > rel * smax.max(1.0))
        .collect();
    Matrix(DMatrix::from_fn(r, keep.len(), |i, j| u[(i, keep[j])]))
}

/// Orthonormal basis of `{x : Ax = 0}`, as the columns of the result.
pub fn null_space(a: &Matrix, rel: f64) -> Matrix {
    let c = a.cols();
    if a.rows() == 0 || c == 0 {
        return Matrix::identity(c);
    }
    let gram = a.0.transpose() * &a.0;
    let (vals, vecs) = sym_eigen(&gram);
    let top = vals.last().copied().unwrap_or(0.0).max(1.0);
    let keep: Vec<usize> = (0..c).filter(|&i| vals[i] <= rel * top).collect();
    Matrix(DMatrix::from_fn(c, keep.len(), |i, j| vecs[(i, keep[j])]))
}

/// The codilator of a contraction: `P = 1 − RᵀR`, `d = rank P` by eigenvalue
/// threshold, `E` from a pivoted Cholesky of `P`, `M = Eᵀ(EEᵀ)⁻¹`, legs
/// `[E; R]` and `[0; 1]`.
pub fn mat_codilator(r: &Matrix, tol: &ToleranceConfig, mutation: Option<Mutation>) -> Result<Codilator> {
    if !mat_is_contractive(r, tol)? {
        return Err(CatError::Precondition(format!(
            "matrix is not a contraction (operator norm {})",
            op_norm(r)
        )));
    }
    let (n, m) = (r.rows(), r.cols());
    let p = DMatrix::identity(m, m) - r.0.transpose() * &r.0;
    let (vals, _) = sym_eigen(&p);
    let lmax = vals.last().copied().unwrap_or(0.0);
    let lmin = vals.first().copied().unwrap_or(0.0);
    if lmin < -tol.eq_tol {
        return Err(CatError::Numerical(format!(
            "1 − RᵀR is indefinite: most negative eigenvalue {lmin:e}"
        )));
    }
    let l = if active(mutation, Mutation::UnpivotedRankEstimate) {
        unpivoted_cholesky(&p, tol.rank_tol * 1e3 * lmax.max(1.0))
    } else {
        let cutoff = tol.rank_tol * lmax.max(1.0);
        let d = vals.iter().filter(|&&v| v > cutoff).count();
        pivoted_cholesky(&p, d)?
    };
    let e = Matrix(l.transpose());
    let d = e.rows();
    let residual = e.transpose().mul(&e).dist(&Matrix(p));
    if residual > tol.eq_tol {
        return Err(CatError::Numerical(format!(
            "Cholesky factor misses 1 − RᵀR by {residual:e} (rank {d})"
        )));
    }
    let mm = pinv(&e, tol.rank_tol);
    let left = e.vstack(r);
    let right = Matrix::zeros(d, n).vstack(&Matrix::identity(n));
    Ok(Codilator { d, e, m: mm, r: r.clone(), cospan: Cospan::new(left, right), residual })
}

/// The mediator `[(A − BR)M  B]` from a codilator into a codilation `(A, B)`
/// of the same contraction.
pub fn mat_mediator(codil: &Codilator, a: &Matrix, b: &Matrix, tol: &ToleranceConfig) -> Result<Matrix> {
    let r = &codil.r;
    if a.cols() != r.cols() || b.cols() != r.rows() || a.rows() != b.rows() {
        return Err(CatError::mismatch("codilation legs do not fit the codilator"));
    }
    let t = tol.composite_tol;
    let ra = a.transpose().mul(a).dist(&Matrix::identity(a.cols()));
    if ra > t {
        return Err(CatError::Precondition(format!("AᵀA = 1 fails by {ra:e}")));
    }
    let rb = b.transpose().mul(b).dist(&Matrix::identity(b.cols()));
    if rb > t {
        return Err(CatError::Precondition(format!("BᵀB = 1 fails by {rb:e}")));
    }
    let rr = b.transpose().mul(a).dist(r);
    if rr > t {
        return Err(CatError::Precondition(format!("BᵀA = R fails by {rr:e}")));
    }
    let first = a.sub(&b.mul(r)).mul(&codil.m);
    Ok(first.hstack(b))
}

/// Relative orthogonality of `Col A` and `Col B` over `Col AU = Col BV`:
/// `AᵀB = UVᵀ`. The answer is confirmed against the complement criterion
/// `Aᵀ(1 − CCᵀ)B = 0` with `C = AU`.
pub fn mat_rel_orthogonal(a: &Matrix, b: &Matrix, u: &Matrix, v: &Matrix, tol: &ToleranceConfig) -> Result<bool> {
    if a.rows() != b.rows() || u.rows() != a.cols() || v.rows() != b.cols() || u.cols() != v.cols() {
        return Err(CatError::mismatch("dimensions of A, B, U, V do not form a square"));
    }
    let c = a.mul(u);
    if c.dist(&b.mul(v)) > tol.composite_tol {
        return Err(CatError::Precondition("AU ≠ BV".into()));
    }
    let direct = a.transpose().mul(b).dist(&u.mul(&v.transpose()));
    let proj = Matrix::identity(a.rows()).sub(&c.mul(&c.transpose()));
    let complement = a.transpose().mul(&proj).mul(b).max_abs();
    let by_direct = direct <= tol.eq_tol;
    let by_complement = complement <= tol.eq_tol;
    if by_direct != by_complement {
        return Err(CatError::Numerical(format!(
            "AᵀB − UVᵀ ({direct:e}) and Aᵀ(1 − CCᵀ)B ({complement:e}) straddle the tolerance"
        )));
    }
    Ok(by_direct)
}

/// The 0/1 matrix of a partial injection `[m] → [n]`.
pub fn l2_functor(r: &PartialInjection) -> Result<Matrix> {
    let (m, n) = (r.dom.len(), r.cod.len());
    let idx = |s: &str, k: usize| -> Option<usize> {
        let i: usize = s.parse().ok()?;
        (1..=k).contains(&i).then_some(i - 1)
    };
    if r.dom != crate::msurj::FinSet::ordinal(m) || r.cod != crate::msurj::FinSet::ordinal(n) {
        return Err(CatError::invalid("ℓ² needs a partial injection between objects [m] = {1, …, m}"));
    }
    let mut out = Matrix::zeros(n, m);
    for (a, b) in &r.pairs {
        let (Some(i), Some(j)) = (idx(a, m), idx(b, n)) else {
            return Err(CatError::invalid(format!("pair ({a}, {b}) is outside [m] × [n]")));
        };
        out.0[(j, i)] = 1.0;
    }
    Ok(out)
}

/// Contractive matrices with the transpose.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Mat {
    pub tol: ToleranceConfig,
    pub mutation: Option<Mutation>,
}

impl Mat {
    pub fn new(tol: ToleranceConfig) -> Self {
        Mat { tol, mutation: None }
    }

    pub fn with_mutation(mut self, m: Option<Mutation>) -> Self {
        self.mutation = m;
        self
    }
}

fn compose_matrices(g: &Matrix, f: &Matrix) -> Result<Matrix> {
    if f.rows() != g.cols() {
        return Err(CatError::mismatch(format!(
            "cannot compose: {}×{} after {}×{}",
            g.rows(),
            g.cols(),
            f.rows(),
            f.cols()
        )));
    }
    Ok(g.mul(f))
}

/// Solves `S [K1 K2] = [A B]` by pseudo-inverse and checks the result.
fn cospan_factor(k: &Cospan<Matrix>, j: &Cospan<Matrix>, tol: &ToleranceConfig) -> std::result::Result<Matrix, String> {
    if k.left.cols() != j.left.cols() || k.right.cols() != j.right.cols() || j.left.rows() != j.right.rows() {
        return Err("cospans have different feet".into());
    }
    let kk = k.left.hstack(&k.right);
    let jj = j.left.hstack(&j.right);
    let s = jj.mul(&pinv(&kk, tol.rank_tol));
    let t1 = s.mul(&k.left).dist(&j.left);
    if t1 > tol.composite_tol {
        return Err(format!("left triangle fails by {t1:e}"));
    }
    let t2 = s.mul(&k.right).dist(&j.right);
    if t2 > tol.composite_tol {
        return Err(format!("right triangle fails by {t2:e}"));
    }
    Ok(s)
}

impl Category for Mat {
    type Obj = usize;
    type Mor = Matrix;

    fn dom(&self, f: &Matrix) -> usize {
        f.cols()
    }

    fn cod(&self, f: &Matrix) -> usize {
        f.rows()
    }

    fn identity(&self, x: &usize) -> Matrix {
        Matrix::identity(*x)
    }

    fn compose(&self, g: &Matrix, f: &Matrix) -> Result<Matrix> {
        compose_matrices(g, f)
    }

    fn mor_eq(&self, f: &Matrix, g: &Matrix) -> bool {
        f.dist(g) <= self.tol.eq_tol
    }

    fn validate(&self, f: &Matrix) -> Result<()> {
        if !mat_is_contractive(f, &self.tol)? {
            return Err(CatError::invalid(format!("operator norm {} exceeds 1 (contraction)", op_norm(f))));
        }
        Ok(())
    }
}

impl DaggerCategory for Mat {
    fn dagger(&self, f: &Matrix) -> Matrix {
        if active(self.mutation, Mutation::IdentityDaggerMat) {
            f.clone()
        } else {
            f.transpose()
        }
    }
}

impl Codilatory for Mat {
    fn codilator(&self, r: &Matrix) -> Result<Cospan<Matrix>> {
        Ok(mat_codilator(r, &self.tol, self.mutation)?.cospan)
    }

    fn comediate(&self, codilator: &Cospan<Matrix>, codilation: &Cospan<Matrix>) -> Result<Matrix> {
        let s = cospan_factor(codilator, codilation, &self.tol).map_err(CatError::NoMediator)?;
        let iso = s.transpose().mul(&s).dist(&Matrix::identity(s.cols()));
        if iso > self.tol.composite_tol {
            return Err(CatError::NoMediator(format!(
                "mediator is not isometric (‖SᵀS − 1‖ = {iso:e}); the inputs codilate different morphisms"
            )));
        }
        Ok(s)
    }

    fn jointly_epic(&self, cospan: &Cospan<Matrix>) -> bool {
        let p = cospan.left.rows();
        cospan.right.rows() == p && rank(&cospan.left.hstack(&cospan.right), self.tol.rank_tol) == p
    }
}

/// Matrices with orthonormal columns.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Mat1 {
    pub tol: ToleranceConfig,
    pub mutation: Option<Mutation>,
}

impl Mat1 {
    pub fn new(tol: ToleranceConfig) -> Self {
        Mat1 { tol, mutation: None }
    }

    pub fn with_mutation(mut self, m: Option<Mutation>) -> Self {
        self.mutation = m;
        self
    }
}

impl Category for Mat1 {
    type Obj = usize;
    type Mor = Matrix;

    fn dom(&self, f: &Matrix) -> usize {
        f.cols()
    }

    fn cod(&self, f: &Matrix) -> usize {
        f.rows()
    }

    fn identity(&self, x: &usize) -> Matrix {
        Matrix::identity(*x)
    }

    fn compose(&self, g: &Matrix, f: &Matrix) -> Result<Matrix> {
        compose_matrices(g, f)
    }

    fn mor_eq(&self, f: &Matrix, g: &Matrix) -> bool {
        f.dist(g) <= self.tol.eq_tol
    }

    fn validate(&self, f: &Matrix) -> Result<()> {
        if !f.is_finite() {
            return Err(CatError::invalid("matrix has non-finite entries"));
        }
        if !mat_is_isometry(f, &self.tol) {
            return Err(CatError::invalid("columns are not orthonormal (isometry)"));
        }
        Ok(())
    }
}

impl CoIndependenceCategory for Mat1 {
    /// Commutation plus `Aᵀ(1 − CCᵀ)B = 0` for the diagonal `C = AU`.
    fn is_coindependent(&self, span: &Span<Matrix>, cospan: &Cospan<Matrix>) -> bool {
        let (u, v, a, b) = (&span.left, &span.right, &cospan.left, &cospan.right);
        if a.cols() != u.rows() || b.cols() != v.rows() || a.rows() != b.rows() || u.cols() != v.cols() {
            return false;
        }
        let c = a.mul(u);
        if c.dist(&b.mul(v)) > self.tol.eq_tol {
            return false;
        }
        let proj = Matrix::identity(a.rows()).sub(&c.mul(&c.transpose()));
        a.transpose().mul(&proj).mul(b).max_abs() <= self.tol.eq_tol
    }
}

impl CoEpiRegular for Mat1 {
    fn coindependent_pushout(&self, span: &Span<Matrix>) -> Result<Cospan<Matrix>> {
        self.check_span(span)?;
        let r = span.right.mul(&span.left.transpose());
        Ok(mat_codilator(&r, &self.tol, self.mutation)?.cospan)
    }

    fn cofactorize(&self, cospan: &Cospan<Matrix>) -> Result<CoFactorization<Matrix>> {
        mat_cofactorize(&cospan.left, &cospan.right, &self.tol)
    }

    fn is_jointly_epic(&self, cospan: &Cospan<Matrix>) -> bool {
        let p = cospan.left.rows();
        cospan.right.rows() == p && rank(&cospan.left.hstack(&cospan.right), self.tol.rank_tol) == p
    }

    fn cofactor_through(&self, epic: &Cospan<Matrix>, cospan: &Cospan<Matrix>) -> Option<Matrix> {
        let s = cospan_factor(epic, cospan, &self.tol).ok()?;
        (s.transpose().mul(&s).dist(&Matrix::identity(s.cols())) <= self.tol.composite_tol).then_some(s)
    }

    fn inverse(&self, f: &Matrix) -> Option<Matrix> {
        (f.rows() == f.cols() && mat_is_isometry(f, &self.tol)).then(|| f.transpose())
    }

    /// Equal `BᵀA` within `eq_tol`.
    fn same_corelation(&self, a: &Cospan<Matrix>, b: &Cospan<Matrix>) -> bool {
        let x = a.right.transpose().mul(&a.left);
        let y = b.right.transpose().mul(&b.left);
        x.dist(&y) <= self.tol.eq_tol
    }

    fn corelation_key(&self, cospan: &Cospan<Matrix>) -> Option<String> {
        let x = cospan.right.transpose().mul(&cospan.left);
        let entries: Vec<String> = x.0.iter().map(|v| format!("{:.6}", if v.abs() < 5e-7 { 0.0 } else { *v })).collect();
        Some(format!("{}x{}:[{}]", x.rows(), x.cols(), entries.join(",")))
    }
}

impl IsometryCategory for Mat1 {
    type Envelope = Mat;

    fn envelope(&self) -> Mat {
        Mat { tol: self.tol, mutation: self.mutation }
    }
}

/// Restricts a cospan of isometries to the sum of their column spaces.
pub fn mat_cofactorize(f: &Matrix, g: &Matrix, tol: &ToleranceConfig) -> Result<CoFactorization<Matrix>> {
    if f.rows() != g.rows() {
        return Err(CatError::mismatch("cospan legs have different codomains"));
    }
    let q = column_basis(&f.hstack(g), tol.rank_tol);
    let qt = q.transpose();
    Ok(CoFactorization { legs: Cospan::new(qt.mul(f), qt.mul(g)), mono: q })
}

/// Random contractions with a mix of singular values: exactly one, zero,
/// uniform in (0, 1), and within a few 10⁻⁸ of one.
#[derive(Clone, Debug)]
pub struct MatSampler {
    pub max_dim: usize,
    cat: Mat,
}

impl MatSampler {
    pub fn new(max_dim: usize, cat: Mat) -> Self {
        MatSampler { max_dim: max_dim.max(1), cat }
    }

    fn gaussian(&self, rng: &mut Rng, r: usize, c: usize) -> DMatrix<f64> {
        DMatrix::from_fn(r, c, |_, _| rng.sample::<f64, _>(StandardNormal))
    }

    /// `n × k` with orthonormal columns, `k ≤ n`.
    pub fn orthonormal(&self, rng: &mut Rng, n: usize, k: usize) -> Matrix {
        if n == 0 || k == 0 {
            return Matrix::zeros(n, k);
        }
        let g = self.gaussian(rng, n, k);
        Matrix(g.qr().q())
    }

    pub fn contraction(&self, rng: &mut Rng, n: usize, m: usize) -> Matrix {
        let k = n.min(m);
        if k == 0 {
            return Matrix::zeros(n, m);
        }
        let u = self.orthonormal(rng, n, k);
        let v = self.orthonormal(rng, m, k);
        let sigma: Vec<f64> = (0..k)
            .map(|_| match rng.random_range(0..10) {
                0..=1 => 1.0,
                2 => 0.0,
                3 => 1.0 - rng.random_range(1e-8..4e-8),
                _ => rng.random_range(0.0..1.0),
            })
            .collect();
        let s = DMatrix::from_fn(k, k, |i, j| if i == j { sigma[i] } else { 0.0 });
        Matrix(&u.0 * s * v.0.transpose())
    }
}

impl Sampler for MatSampler {
    type Cat = Mat;

    fn category(&self) -> &Mat {
        &self.cat
    }

    fn object(&self, rng: &mut Rng) -> usize {
        if rng.random_bool(0.03) {
            0
        } else {
            rng.random_range(1..=self.max_dim)
        }
    }

    fn morphism_from(&self, rng: &mut Rng, a: &usize) -> Matrix {
        let n = self.object(rng);
        self.contraction(rng, n, *a)
    }

    fn coisometry_from(&self, rng: &mut Rng, a: &usize) -> Matrix {
        self.isometry_into(rng, a).transpose()
    }

    fn coisometry_into(&self, rng: &mut Rng, b: &usize) -> Matrix {
        self.isometry_from(rng, b).transpose()
    }

    fn isometry_from(&self, rng: &mut Rng, a: &usize) -> Matrix {
        let n = a + rng.random_range(0..=2);
        self.orthonormal(rng, n, *a)
    }

    fn isometry_into(&self, rng: &mut Rng, b: &usize) -> Matrix {
        let k = rng.random_range(0..=*b);
        self.orthonormal(rng, *b, k)
    }
}
