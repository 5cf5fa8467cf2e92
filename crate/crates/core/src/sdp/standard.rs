//! Compilation of a modelled problem into a real standard-form conic program
//!
//! ```text
//! minimize  Σ_k ⟨C_k, X_k⟩ + c_lᵀx_l + c_fᵀf
//! subject to Σ_k ⟨A_ik, X_k⟩ + a_ilᵀx_l + a_ifᵀf = b_i,   X_k ⪰ 0, x_l ≥ 0, f free
//! ```
//!
//! with real symmetric blocks. Hermitian blocks are restricted to real
//! symmetric ones when the problem is invariant under complex conjugation,
//! and embedded as `[[Re X, −Im X], [Im X, Re X]]` otherwise.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex;

use super::model::{Domain, LinExpr, Relation, ScalarKind, SdpProblem, Sense, Var};
use crate::linalg::{ComplexMatrix, HermitianOperator};
use crate::scalar::Real;

/// One constraint row. Block entries are elementary: `(block, p, q, v)` adds
/// `v·X[p,q]`; rows are kept symmetric so `(q, p)` carries the same weight.
#[derive(Clone, Debug, Default)]
pub(crate) struct Row {
    pub blocks: Vec<(usize, usize, usize, f64)>,
    pub lp: Vec<(usize, f64)>,
    pub free: Vec<(usize, f64)>,
}

impl Row {
    pub fn norm_sq(&self) -> f64 {
        self.blocks.iter().map(|e| e.3 * e.3).sum::<f64>()
            + self.lp.iter().map(|e| e.1 * e.1).sum::<f64>()
            + self.free.iter().map(|e| e.1 * e.1).sum::<f64>()
    }


    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty() && self.lp.is_empty() && self.free.is_empty()
    }

    fn simplify(&mut self) {
        self.blocks.sort_by_key(|b| (b.0, b.1, b.2));
        let mut out: Vec<(usize, usize, usize, f64)> = Vec::with_capacity(self.blocks.len());
        for &e in &self.blocks {
            match out.last_mut() {
                Some(l) if (l.0, l.1, l.2) == (e.0, e.1, e.2) => l.3 += e.3,
                _ => out.push(e),
            }
        }
        out.retain(|e| e.3 != 0.0);
        self.blocks = out;
        for v in [&mut self.lp, &mut self.free] {
            v.sort_by_key(|e| e.0);
            let mut out: Vec<(usize, f64)> = Vec::with_capacity(v.len());
            for &e in v.iter() {
                match out.last_mut() {
                    Some(l) if l.0 == e.0 => l.1 += e.1,
                    _ => out.push(e),
                }
            }
            out.retain(|e| e.1 != 0.0);
            *v = out;
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct StandardForm {
    pub block_dims: Vec<usize>,
    pub n_lp: usize,
    pub n_free: usize,
    pub rows: Vec<Row>,
    pub b: Vec<f64>,
    pub c_blocks: Vec<DMatrix<f64>>,
    pub c_lp: Vec<f64>,
    pub c_free: Vec<f64>,
}

#[derive(Clone, Copy, Debug)]
pub(crate) enum ScalarSlot {
    Free(usize),
    Lp(usize),
}

/// Standard form plus the bookkeeping needed to map a solution back.
#[derive(Clone, Debug)]
pub(crate) struct Compiled {
    pub form: StandardForm,
    /// Whether Hermitian blocks were embedded at twice their size.
    pub embedded: bool,
    pub scalar_slots: Vec<ScalarSlot>,
    /// `+1` for minimization, `−1` for maximization.
    pub sign: f64,
    pub offset: f64,
    /// Standard-form row of each user constraint, `None` for dropped ones.
    pub row_of: Vec<Option<usize>>,
    /// User constraints with no variables whose target is violated.
    pub trivially_violated: Vec<usize>,
}

/// Hermitian functional on one block: `Σ_{r≤c} α Re X_rc + Σ_{r<c} β Im X_rc`.
type Canonical = BTreeMap<(usize, usize, usize), (f64, f64)>;

fn canonical<T: Real>(e: &LinExpr<T>) -> (Canonical, Vec<(usize, f64)>) {
    let mut blocks = Canonical::new();
    let mut scalars = Vec::new();
    for &(v, z) in &e.terms {
        let (re, im) = (z.re.to_f64_lossy(), z.im.to_f64_lossy());
        match v {
            Var::Entry { block, row, col } => {
                if row == col {
                    blocks.entry((block, row, col)).or_insert((0.0, 0.0)).0 += re;
                } else if row < col {
                    let s = blocks.entry((block, row, col)).or_insert((0.0, 0.0));
                    s.0 += re;
                    s.1 -= im;
                } else {
                    let s = blocks.entry((block, col, row)).or_insert((0.0, 0.0));
                    s.0 += re;
                    s.1 += im;
                }
            }
            Var::Scalar(s) => scalars.push((s, re)),
        }
    }
    (blocks, scalars)
}

fn is_zero_part(c: &Canonical, imaginary: bool) -> bool {
    let scale = c.values().map(|&(a, b)| a.abs().max(b.abs())).fold(0.0, f64::max);
    let tol = 1e-14 * scale.max(1.0);
    c.values().all(|&(a, b)| (if imaginary { b } else { a }).abs() <= tol)
}

fn emit(c: &Canonical, dims: &[usize], embedded: bool, row: &mut Row) {
    for (&(k, r, col), &(alpha, beta)) in c {
        if !embedded {
            if r == col {
                row.blocks.push((k, r, r, alpha));
            } else if alpha != 0.0 {
                row.blocks.push((k, r, col, alpha / 2.0));
                row.blocks.push((k, col, r, alpha / 2.0));
            }
            continue;
        }
        let n = dims[k];
        if r == col {
            row.blocks.push((k, r, r, alpha / 2.0));
            row.blocks.push((k, n + r, n + r, alpha / 2.0));
            continue;
        }
        if alpha != 0.0 {
            let q = alpha / 4.0;
            row.blocks.extend([(k, r, col, q), (k, col, r, q), (k, n + r, n + col, q), (k, n + col, n + r, q)]);
        }
        if beta != 0.0 {
            let q = beta / 4.0;
            row.blocks.extend([(k, n + r, col, q), (k, col, n + r, q), (k, r, n + col, -q), (k, n + col, r, -q)]);
        }
    }
}

pub(crate) fn compile<T: Real>(p: &SdpProblem<T>) -> Compiled {
    let dims: Vec<usize> = p.blocks.iter().map(|b| b.dim).collect();
    let (obj_c, obj_s) = canonical(&p.objective);
    let cons: Vec<(Canonical, Vec<(usize, f64)>)> = p.constraints.iter().map(|c| canonical(&c.expr)).collect();

    // Constraints that only see imaginary parts with a zero equality target
    // hold for every real symmetric point.
    let imaginary_only_zero = |i: usize| {
        let c = &p.constraints[i];
        c.relation == Relation::Eq
            && c.target.to_f64_lossy() == 0.0
            && cons[i].1.iter().all(|s| s.1 == 0.0)
            && is_zero_part(&cons[i].0, false)
    };
    let embedded = p.domain == Domain::Complex
        && !(is_zero_part(&obj_c, true)
            && (0..cons.len()).all(|i| is_zero_part(&cons[i].0, true) || imaginary_only_zero(i)));

    let mut n_lp = 0;
    let mut n_free = 0;
    let scalar_slots: Vec<ScalarSlot> = p
        .scalars
        .iter()
        .map(|s| match s.kind {
            ScalarKind::Free => {
                n_free += 1;
                ScalarSlot::Free(n_free - 1)
            }
            ScalarKind::Nonneg => {
                n_lp += 1;
                ScalarSlot::Lp(n_lp - 1)
            }
        })
        .collect();
    let push_scalars = |row: &mut Row, s: &[(usize, f64)]| {
        for &(idx, v) in s {
            match scalar_slots[idx] {
                ScalarSlot::Free(j) => row.free.push((j, v)),
                ScalarSlot::Lp(j) => row.lp.push((j, v)),
            }
        }
    };

    let mut rows = Vec::new();
    let mut b = Vec::new();
    let mut row_of = Vec::with_capacity(cons.len());
    let mut trivially_violated = Vec::new();
    for (i, (c, s)) in cons.iter().enumerate() {
        let con = &p.constraints[i];
        let target = con.target.to_f64_lossy();
        let mut row = Row::default();
        let real_restricted = !embedded && p.domain == Domain::Complex;
        if !(real_restricted && imaginary_only_zero(i)) {
            emit(c, &dims, embedded, &mut row);
            push_scalars(&mut row, s);
        }
        row.simplify();
        if row.is_empty() {
            let ok = match con.relation {
                Relation::Eq => target.abs() <= 1e-12,
                Relation::Le => target >= -1e-12,
                Relation::Ge => target <= 1e-12,
            };
            if !ok {
                trivially_violated.push(i);
            }
            row_of.push(None);
            continue;
        }
        match con.relation {
            Relation::Eq => {}
            Relation::Le => {
                row.lp.push((n_lp, 1.0));
                n_lp += 1;
            }
            Relation::Ge => {
                row.lp.push((n_lp, -1.0));
                n_lp += 1;
            }
        }
        row_of.push(Some(rows.len()));
        rows.push(row);
        b.push(target);
    }

    let sign = match p.sense {
        Sense::Minimize => 1.0,
        Sense::Maximize => -1.0,
    };
    let std_dims: Vec<usize> = dims.iter().map(|&n| if embedded { 2 * n } else { n }).collect();
    let mut obj = Row::default();
    emit(&obj_c, &dims, embedded, &mut obj);
    push_scalars(&mut obj, &obj_s);
    let mut c_blocks: Vec<DMatrix<f64>> = std_dims.iter().map(|&n| DMatrix::zeros(n, n)).collect();
    let mut c_lp = vec![0.0; n_lp];
    let mut c_free = vec![0.0; n_free];
    for &(k, r, c, v) in &obj.blocks {
        c_blocks[k][(r, c)] += sign * v;
    }
    for &(j, v) in &obj.lp {
        c_lp[j] += sign * v;
    }
    for &(j, v) in &obj.free {
        c_free[j] += sign * v;
    }

    Compiled {
        form: StandardForm { block_dims: std_dims, n_lp, n_free, rows, b, c_blocks, c_lp, c_free },
        embedded,
        scalar_slots,
        sign,
        offset: p.objective.constant.re.to_f64_lossy(),
        row_of,
        trivially_violated,
    }
}

impl Compiled {
    /// Hermitian value of each user block from standard-form block values.
    pub fn recover_blocks<T: Real>(&self, xs: &[DMatrix<f64>]) -> Vec<HermitianOperator<T>> {
        xs.iter()
            .map(|y| {
                let m = if self.embedded {
                    let n = y.nrows() / 2;
                    ComplexMatrix::from_fn(n, n, |r, c| {
                        Complex::new(
                            T::lit(0.5 * (y[(r, c)] + y[(n + r, n + c)])),
                            T::lit(0.5 * (y[(n + r, c)] - y[(r, n + c)])),
                        )
                    })
                } else {
                    let n = y.nrows();
                    ComplexMatrix::from_fn(n, n, |r, c| Complex::new(T::lit(y[(r, c)]), T::zero()))
                };
                HermitianOperator::symmetrized(m)
            })
            .collect()
    }

    pub fn recover_scalars<T: Real>(&self, lp: &[f64], free: &[f64]) -> Vec<T> {
        self.scalar_slots
            .iter()
            .map(|s| match *s {
                ScalarSlot::Free(j) => T::lit(free[j]),
                ScalarSlot::Lp(j) => T::lit(lp[j]),
            })
            .collect()
    }
}
