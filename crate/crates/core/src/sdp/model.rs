//! Modelling layer: Hermitian block variables, scalar variables and affine
//! expressions over them.

use num_complex::Complex;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, HermitianOperator, TracePlan};
use crate::scalar::Real;

/// Field of the block variables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    /// Hermitian blocks.
    Complex,
    /// Real symmetric blocks.
    Real,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalarKind {
    Free,
    Nonneg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    Eq,
    Le,
    Ge,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BlockId(pub(crate) usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ScalarId(pub(crate) usize);

impl BlockId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl ScalarId {
    pub fn index(self) -> usize {
        self.0
    }
}

/// A decision variable: one entry of a block, or a real scalar.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Var {
    Entry { block: usize, row: usize, col: usize },
    Scalar(usize),
}

/// Complex affine expression `Σ coeff·var + constant`.
///
/// Used as a real functional through its real part; scalar variables are real.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct LinExpr<T: Real> {
    pub terms: Vec<(Var, Complex<T>)>,
    pub constant: Complex<T>,
}

impl<T: Real> Default for LinExpr<T> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<T: Real> LinExpr<T> {
    pub fn zero() -> Self {
        Self { terms: Vec::new(), constant: Complex::zero() }
    }

    pub fn constant(c: Complex<T>) -> Self {
        Self { terms: Vec::new(), constant: c }
    }

    pub fn real_constant(c: T) -> Self {
        Self::constant(Complex::new(c, T::zero()))
    }

    pub fn var(v: Var, coeff: Complex<T>) -> Self {
        Self { terms: vec![(v, coeff)], constant: Complex::zero() }
    }

    pub fn scalar(s: ScalarId) -> Self {
        Self::var(Var::Scalar(s.0), Complex::one())
    }

    pub fn entry(b: BlockId, row: usize, col: usize) -> Self {
        Self::var(Var::Entry { block: b.0, row, col }, Complex::one())
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, v: Var, coeff: Complex<T>) {
        self.terms.push((v, coeff));
    }

    pub fn add_scaled(&mut self, other: &Self, s: Complex<T>) {
        self.terms.extend(other.terms.iter().map(|&(v, c)| (v, c * s)));
        self.constant += other.constant * s;
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(other, Complex::one());
        out
    }

    pub fn minus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(other, -Complex::<T>::one());
        out
    }

    pub fn scaled(&self, s: Complex<T>) -> Self {
        let mut out = Self::zero();
        out.add_scaled(self, s);
        out
    }

    /// Merges repeated variables and drops exact zeros.
    pub fn simplify(&mut self) {
        self.terms.sort_by_key(|t| t.0);
        let mut merged: Vec<(Var, Complex<T>)> = Vec::with_capacity(self.terms.len());
        for &(v, c) in &self.terms {
            match merged.last_mut() {
                Some((lv, lc)) if *lv == v => *lc += c,
                _ => merged.push((v, c)),
            }
        }
        merged.retain(|(_, c)| !c.is_zero());
        self.terms = merged;
    }

    pub fn simplified(mut self) -> Self {
        self.simplify();
        self
    }
}

/// Matrix of affine expressions, used to write matrix-valued constraints.
#[derive(Clone, Debug, PartialEq)]
pub struct MatExpr<T: Real> {
    rows: usize,
    cols: usize,
    entries: Vec<LinExpr<T>>,
}

impl<T: Real> MatExpr<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, entries: vec![LinExpr::zero(); rows * cols] }
    }

    pub fn constant(m: &ComplexMatrix<T>) -> Self {
        Self {
            rows: m.rows(),
            cols: m.cols(),
            entries: m.data().iter().map(|&z| LinExpr::constant(z)).collect(),
        }
    }

    pub fn hermitian(h: &HermitianOperator<T>) -> Self {
        Self::constant(h.matrix())
    }

    /// `e·I_n` for a scalar expression `e`.
    pub fn scaled_identity(e: &LinExpr<T>, n: usize) -> Self {
        let mut out = Self::zeros(n, n);
        for i in 0..n {
            out.entries[i * n + i] = e.clone();
        }
        out
    }

    /// Diagonal matrix with the given expressions on the diagonal.
    pub fn diagonal(diag: Vec<LinExpr<T>>) -> Self {
        let n = diag.len();
        let mut out = Self::zeros(n, n);
        for (i, e) in diag.into_iter().enumerate() {
            out.entries[i * n + i] = e;
        }
        out
    }

    /// `e·C` for a constant matrix `C` and scalar expression `e`.
    pub fn scaled_constant(m: &ComplexMatrix<T>, e: &LinExpr<T>) -> Self {
        Self {
            rows: m.rows(),
            cols: m.cols(),
            entries: m.data().iter().map(|&z| e.scaled(z).simplified()).collect(),
        }
    }

    pub(crate) fn block(b: BlockId, n: usize) -> Self {
        let entries = (0..n * n).map(|k| LinExpr::entry(b, k / n, k % n)).collect();
        Self { rows: n, cols: n, entries }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> &LinExpr<T> {
        &self.entries[i * self.cols + j]
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::Dimension(format!(
                "{}x{} and {}x{} expressions",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a.plus(b)).collect();
        Ok(Self { rows: self.rows, cols: self.cols, entries })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a.minus(b)).collect();
        Ok(Self { rows: self.rows, cols: self.cols, entries })
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Self { rows: self.rows, cols: self.cols, entries: self.entries.iter().map(|e| e.scaled(s)).collect() }
    }

    pub fn scale_real(&self, s: T) -> Self {
        self.scale(Complex::new(s, T::zero()))
    }

    /// `A·E` for a constant `A`.
    pub fn left_mul(&self, a: &ComplexMatrix<T>) -> Result<Self> {
        if a.cols() != self.rows {
            return Err(Error::Dimension(format!("{}x{} times {}x{}", a.rows(), a.cols(), self.rows, self.cols)));
        }
        let mut out = Self::zeros(a.rows(), self.cols);
        for i in 0..a.rows() {
            for j in 0..self.cols {
                let e = &mut out.entries[i * self.cols + j];
                for k in 0..self.rows {
                    let c = a[(i, k)];
                    if !c.is_zero() {
                        e.add_scaled(&self.entries[k * self.cols + j], c);
                    }
                }
                e.simplify();
            }
        }
        Ok(out)
    }

    /// `E·B` for a constant `B`.
    pub fn right_mul(&self, b: &ComplexMatrix<T>) -> Result<Self> {
        if self.cols != b.rows() {
            return Err(Error::Dimension(format!("{}x{} times {}x{}", self.rows, self.cols, b.rows(), b.cols())));
        }
        let mut out = Self::zeros(self.rows, b.cols());
        for i in 0..self.rows {
            for j in 0..b.cols() {
                let e = &mut out.entries[i * b.cols() + j];
                for k in 0..self.cols {
                    let c = b[(k, j)];
                    if !c.is_zero() {
                        e.add_scaled(&self.entries[i * self.cols + k], c);
                    }
                }
                e.simplify();
            }
        }
        Ok(out)
    }

    /// `A ⊗ E` for a constant `A`.
    pub fn kron_left(&self, a: &ComplexMatrix<T>) -> Self {
        let (r, c) = (a.rows() * self.rows, a.cols() * self.cols);
        let mut out = Self::zeros(r, c);
        for i in 0..a.rows() {
            for j in 0..a.cols() {
                let s = a[(i, j)];
                if s.is_zero() {
                    continue;
                }
                for k in 0..self.rows {
                    for l in 0..self.cols {
                        out.entries[(i * self.rows + k) * c + j * self.cols + l] =
                            self.entries[k * self.cols + l].scaled(s);
                    }
                }
            }
        }
        out
    }

    /// `E ⊗ B` for a constant `B`.
    pub fn kron_right(&self, b: &ComplexMatrix<T>) -> Self {
        let (r, c) = (self.rows * b.rows(), self.cols * b.cols());
        let mut out = Self::zeros(r, c);
        for i in 0..self.rows {
            for j in 0..self.cols {
                for k in 0..b.rows() {
                    for l in 0..b.cols() {
                        let s = b[(k, l)];
                        if !s.is_zero() {
                            out.entries[(i * b.rows() + k) * c + j * b.cols() + l] =
                                self.entries[i * self.cols + j].scaled(s);
                        }
                    }
                }
            }
        }
        out
    }

    pub fn partial_trace(&self, dims: &[usize], keep: &[usize]) -> Result<Self> {
        if self.rows != self.cols {
            return Err(Error::Dimension("partial trace of a non-square expression".into()));
        }
        let plan = TracePlan::new(dims, keep, self.rows)?;
        let n = plan.kept_dim;
        let mut out = Self::zeros(n, n);
        for a in 0..n {
            for b in 0..n {
                let e = &mut out.entries[a * n + b];
                for t in 0..plan.traced_dim {
                    e.add_scaled(&self.entries[plan.full[a][t] * self.cols + plan.full[b][t]], Complex::one());
                }
                e.simplify();
            }
        }
        Ok(out)
    }

    /// Reorders tensor factors: factor `k` of the result is factor `perm[k]` of `self`.
    pub fn permute_subsystems(&self, dims: &[usize], perm: &[usize]) -> Result<Self> {
        let map = crate::linalg::permutation_map(dims, perm)?;
        if self.rows != self.cols || map.len() != self.rows {
            return Err(Error::Dimension(format!("permutation over dims {dims:?} of a {}x{} expression", self.rows, self.cols)));
        }
        let n = self.rows;
        let entries = (0..n * n).map(|k| self.entries[map[k / n] * n + map[k % n]].clone()).collect();
        Ok(Self { rows: n, cols: n, entries })
    }

    pub fn trace(&self) -> LinExpr<T> {
        let mut e = LinExpr::zero();
        for i in 0..self.rows.min(self.cols) {
            e.add_scaled(&self.entries[i * self.cols + i], Complex::one());
        }
        e.simplified()
    }

    /// `tr(C·E)` for a constant `C`.
    pub fn trace_with(&self, c: &ComplexMatrix<T>) -> Result<LinExpr<T>> {
        if c.rows() != self.cols || c.cols() != self.rows {
            return Err(Error::Dimension(format!("tr of {}x{} times {}x{}", c.rows(), c.cols(), self.rows, self.cols)));
        }
        let mut e = LinExpr::zero();
        for i in 0..self.rows {
            for j in 0..self.cols {
                let s = c[(j, i)];
                if !s.is_zero() {
                    e.add_scaled(&self.entries[i * self.cols + j], s);
                }
            }
        }
        Ok(e.simplified())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockSpec {
    pub label: String,
    pub dim: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalarSpec {
    pub label: String,
    pub kind: ScalarKind,
}

/// `Re(expr) rel target`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Constraint<T: Real> {
    pub expr: LinExpr<T>,
    pub relation: Relation,
    pub target: T,
}

/// Semidefinite program over Hermitian PSD blocks and real scalars.
///
/// Every functional is the real part of a [`LinExpr`]; the objective's
/// constant part is an offset added to the reported values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct SdpProblem<T: Real> {
    pub domain: Domain,
    pub sense: Sense,
    pub blocks: Vec<BlockSpec>,
    pub scalars: Vec<ScalarSpec>,
    pub objective: LinExpr<T>,
    pub constraints: Vec<Constraint<T>>,
}

impl<T: Real> SdpProblem<T> {
    pub fn new(domain: Domain, sense: Sense) -> Self {
        Self {
            domain,
            sense,
            blocks: Vec::new(),
            scalars: Vec::new(),
            objective: LinExpr::zero(),
            constraints: Vec::new(),
        }
    }

    /// Declares a PSD block and returns its handle.
    pub fn psd(&mut self, label: impl Into<String>, dim: usize) -> BlockId {
        self.blocks.push(BlockSpec { label: label.into(), dim });
        BlockId(self.blocks.len() - 1)
    }

    pub fn free(&mut self, label: impl Into<String>) -> ScalarId {
        self.scalars.push(ScalarSpec { label: label.into(), kind: ScalarKind::Free });
        ScalarId(self.scalars.len() - 1)
    }

    pub fn nonneg(&mut self, label: impl Into<String>) -> ScalarId {
        self.scalars.push(ScalarSpec { label: label.into(), kind: ScalarKind::Nonneg });
        ScalarId(self.scalars.len() - 1)
    }

    /// Unconstrained Hermitian (or real symmetric) `n × n` matrix built from
    /// free scalars.
    pub fn free_hermitian(&mut self, label: &str, n: usize) -> MatExpr<T> {
        let mut m = MatExpr::zeros(n, n);
        let i = Complex::new(T::zero(), T::one());
        for r in 0..n {
            let d = LinExpr::scalar(self.free(format!("{label}[{r},{r}]")));
            m.entries[r * n + r] = d;
            for c in r + 1..n {
                let re = LinExpr::scalar(self.free(format!("Re {label}[{r},{c}]")));
                let mut upper = re.clone();
                let mut lower = re;
                if self.domain == Domain::Complex {
                    let im = LinExpr::scalar(self.free(format!("Im {label}[{r},{c}]")));
                    upper.add_scaled(&im, i);
                    lower.add_scaled(&im, -i);
                }
                m.entries[r * n + c] = upper;
                m.entries[c * n + r] = lower;
            }
        }
        m
    }

    /// Matrix expression of a declared block.
    pub fn var(&self, b: BlockId) -> MatExpr<T> {
        MatExpr::block(b, self.blocks[b.0].dim)
    }

    pub fn block_dim(&self, b: BlockId) -> usize {
        self.blocks[b.0].dim
    }

    pub fn set_objective(&mut self, expr: LinExpr<T>) {
        self.objective = expr.simplified();
    }

    /// `Re(expr) rel target`; the constant part of `expr` moves to the right-hand side.
    pub fn constrain(&mut self, expr: LinExpr<T>, relation: Relation, target: T) {
        let mut expr = expr.simplified();
        let target = target - expr.constant.re;
        expr.constant = Complex::zero();
        self.constraints.push(Constraint { expr, relation, target });
    }

    /// Entrywise `lhs = rhs` for matrix expressions that are Hermitian by
    /// construction: real parts on and above the diagonal, imaginary parts
    /// strictly above it (the latter only over the complex field).
    pub fn matrix_eq(&mut self, lhs: &MatExpr<T>, rhs: &MatExpr<T>) -> Result<()> {
        let d = lhs.sub(rhs)?;
        if d.rows != d.cols {
            return Err(Error::Dimension("matrix equality needs square expressions".into()));
        }
        let n = d.rows;
        let minus_i = Complex::new(T::zero(), -T::one());
        for r in 0..n {
            for c in r..n {
                let e = d.entry(r, c);
                self.constrain(e.clone(), Relation::Eq, T::zero());
                if r != c && self.domain == Domain::Complex {
                    self.constrain(e.scaled(minus_i), Relation::Eq, T::zero());
                }
            }
        }
        Ok(())
    }

    /// `expr ⪰ 0` through a slack block equal to `expr`; returns the slack.
    pub fn matrix_psd(&mut self, label: impl Into<String>, expr: &MatExpr<T>) -> Result<BlockId> {
        if expr.rows != expr.cols {
            return Err(Error::Dimension("PSD constraint needs a square expression".into()));
        }
        let s = self.psd(label, expr.rows);
        let sv = self.var(s);
        self.matrix_eq(&sv, expr)?;
        Ok(s)
    }

    /// Checks that every variable reference is declared and in range.
    pub fn validate(&self) -> Result<()> {
        let check = |e: &LinExpr<T>| -> Result<()> {
            for &(v, c) in &e.terms {
                if !c.re.is_finite() || !c.im.is_finite() {
                    return Err(Error::NonFinite);
                }
                match v {
                    Var::Entry { block, row, col } => {
                        let b = self
                            .blocks
                            .get(block)
                            .ok_or_else(|| Error::InvalidParameter(format!("undeclared block {block}")))?;
                        if row >= b.dim || col >= b.dim {
                            return Err(Error::InvalidParameter(format!(
                                "entry ({row},{col}) outside block '{}' of dim {}",
                                b.label, b.dim
                            )));
                        }
                    }
                    Var::Scalar(s) => {
                        if s >= self.scalars.len() {
                            return Err(Error::InvalidParameter(format!("undeclared scalar {s}")));
                        }
                    }
                }
            }
            Ok(())
        };
        if self.blocks.iter().any(|b| b.dim == 0) {
            return Err(Error::InvalidParameter("zero-dimensional block".into()));
        }
        check(&self.objective)?;
        for c in &self.constraints {
            check(&c.expr)?;
            if !c.target.is_finite() {
                return Err(Error::NonFinite);
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let p: Self = serde_json::from_str(s)?;
        p.validate()?;
        Ok(p)
    }
}
