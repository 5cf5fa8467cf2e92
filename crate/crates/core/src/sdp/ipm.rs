//! Homogeneous self-dual primal-dual interior-point method for the real
//! standard form, with HKM search directions and Mehrotra predictor-corrector
//! steps. Free variables enter through an augmented normal-equation system.

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};

use super::standard::{Row, StandardForm};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum IpmStatus {
    Optimal,
    PrimalInfeasible,
    DualInfeasible,
    NumericFailure,
}

#[derive(Clone, Debug)]
pub(crate) struct IpmResult {
    pub status: IpmStatus,
    pub xs: Vec<DMatrix<f64>>,
    pub xl: Vec<f64>,
    pub f: Vec<f64>,
    /// Multiplier (or Farkas ray) per standard-form row.
    pub y: Vec<f64>,
    pub pobj: f64,
    pub dobj: f64,
    pub pres: f64,
    pub dres: f64,
    pub iterations: usize,
    /// Residual of the attached infeasibility certificate (relative).
    pub certificate_residual: f64,
}

const STEP_FRACTION: f64 = 0.98;
const DEPENDENCE_TOL: f64 = 1e-9;

/// Constraint data after presolve, in the layout the iterations use.
struct Data {
    dims: Vec<usize>,
    m: usize,
    n_lp: usize,
    n_free: usize,
    /// Per block: (row, elementary entries) for every row touching the block.
    block_rows: Vec<Vec<(usize, Vec<(usize, usize, f64)>)>>,
    /// Per LP variable: (row, coefficient).
    lp_cols: Vec<Vec<(usize, f64)>>,
    af: DMatrix<f64>,
    b: Vec<f64>,
    c: Vec<DMatrix<f64>>,
    cl: Vec<f64>,
    cf: Vec<f64>,
}

impl Data {
    fn apply_a(&self, xs: &[DMatrix<f64>], xl: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.m];
        for (k, rows) in self.block_rows.iter().enumerate() {
            let x = &xs[k];
            for (i, ents) in rows {
                out[*i] += ents.iter().map(|&(p, q, v)| v * x[(p, q)]).sum::<f64>();
            }
        }
        for (j, col) in self.lp_cols.iter().enumerate() {
            for &(i, v) in col {
                out[i] += v * xl[j];
            }
        }
        out
    }

    fn apply_af(&self, f: &[f64], out: &mut [f64]) {
        for i in 0..self.m {
            for (j, fj) in f.iter().enumerate() {
                out[i] += self.af[(i, j)] * fj;
            }
        }
    }

    fn apply_at(&self, y: &[f64]) -> (Vec<DMatrix<f64>>, Vec<f64>) {
        let mut zs: Vec<DMatrix<f64>> = self.dims.iter().map(|&n| DMatrix::zeros(n, n)).collect();
        for (k, rows) in self.block_rows.iter().enumerate() {
            for (i, ents) in rows {
                let yi = y[*i];
                if yi != 0.0 {
                    for &(p, q, v) in ents {
                        zs[k][(p, q)] += yi * v;
                    }
                }
            }
        }
        let zl = self.lp_cols.iter().map(|col| col.iter().map(|&(i, v)| v * y[i]).sum()).collect();
        (zs, zl)
    }

    fn apply_aft(&self, y: &[f64]) -> Vec<f64> {
        (0..self.n_free).map(|j| (0..self.m).map(|i| self.af[(i, j)] * y[i]).sum()).collect()
    }
}

/// Row scaling and removal of linearly dependent rows.
struct Presolved {
    data: Data,
    /// Original row index and scale factor of each kept row.
    kept: Vec<(usize, f64)>,
    c_scale: f64,
}

enum PresolveOutcome {
    Ready(Presolved),
    /// Farkas ray over original rows: `Aᵀy = 0`, `bᵀy > 0`.
    Inconsistent(Vec<f64>, f64),
}

fn sparse_key(form: &StandardForm, row: &Row) -> Vec<(usize, f64)> {
    let mut offsets = Vec::with_capacity(form.block_dims.len());
    let mut acc = 0;
    for &n in &form.block_dims {
        offsets.push(acc);
        acc += n * n;
    }
    let mut v: Vec<(usize, f64)> = row.blocks.iter().map(|&(k, p, q, x)| (offsets[k] + p * form.block_dims[k] + q, x)).collect();
    v.extend(row.lp.iter().map(|&(j, x)| (acc + j, x)));
    v.extend(row.free.iter().map(|&(j, x)| (acc + form.n_lp + j, x)));
    v.sort_by_key(|e| e.0);
    v
}

fn sparse_dot(a: &[(usize, f64)], b: &[(usize, f64)]) -> f64 {
    let (mut i, mut j, mut s) = (0, 0, 0.0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                s += a[i].1 * b[j].1;
                i += 1;
                j += 1;
            }
        }
    }
    s
}

fn presolve(form: &StandardForm) -> PresolveOutcome {
    let m = form.rows.len();
    let scales: Vec<f64> = form.rows.iter().map(|r| 1.0 / r.norm_sq().sqrt()).collect();
    let keys: Vec<Vec<(usize, f64)>> = form
        .rows
        .iter()
        .zip(&scales)
        .map(|(r, &s)| sparse_key(form, r).into_iter().map(|(i, v)| (i, v * s)).collect())
        .collect();
    let b: Vec<f64> = form.b.iter().zip(&scales).map(|(b, s)| b * s).collect();

    // Pivoted Cholesky of the Gram matrix of the normalized rows.
    let mut gram = DMatrix::<f64>::zeros(m, m);
    for i in 0..m {
        for j in i..m {
            let g = sparse_dot(&keys[i], &keys[j]);
            gram[(i, j)] = g;
            gram[(j, i)] = g;
        }
    }
    let mut diag: Vec<f64> = (0..m).map(|i| gram[(i, i)]).collect();
    let mut l = DMatrix::<f64>::zeros(m, m);
    let mut pivots: Vec<usize> = Vec::new();
    let mut is_pivot = vec![false; m];
    loop {
        let next = (0..m).filter(|&i| !is_pivot[i]).max_by(|&a, &b| diag[a].total_cmp(&diag[b]));
        let Some(p) = next else { break };
        if diag[p] <= DEPENDENCE_TOL {
            break;
        }
        let r = pivots.len();
        let lpp = diag[p].sqrt();
        l[(p, r)] = lpp;
        for i in 0..m {
            if is_pivot[i] || i == p {
                continue;
            }
            let mut s = gram[(i, p)];
            for t in 0..r {
                s -= l[(i, t)] * l[(p, t)];
            }
            l[(i, r)] = s / lpp;
            diag[i] -= l[(i, r)] * l[(i, r)];
        }
        pivots.push(p);
        is_pivot[p] = true;
    }

    let r = pivots.len();
    if r < m {
        // Dependent row d = Σ c_t (pivot row t) with L_II cᵀ... solved by back substitution.
        let l_ii = DMatrix::from_fn(r, r, |a, t| l[(pivots[a], t)]);
        let b_piv = DVector::from_fn(r, |a, _| b[pivots[a]]);
        for d in (0..m).filter(|&i| !is_pivot[i]) {
            let w = DVector::from_fn(r, |t, _| l[(d, t)]);
            let c = l_ii.transpose().solve_upper_triangular(&w).unwrap_or_else(|| DVector::zeros(r));
            let predicted = c.dot(&b_piv);
            let mismatch = b[d] - predicted;
            let scale = 1.0 + b[d].abs() + c.iter().zip(b_piv.iter()).map(|(x, y)| (x * y).abs()).sum::<f64>();
            if mismatch.abs() > 1e-8 * scale {
                let mut ray = vec![0.0; m];
                ray[d] = scales[d];
                for (a, &pv) in pivots.iter().enumerate() {
                    ray[pv] = -c[a] * scales[pv];
                }
                let sign = mismatch.signum();
                ray.iter_mut().for_each(|v| *v *= sign);
                return PresolveOutcome::Inconsistent(ray, mismatch.abs());
            }
        }
    }

    let mut kept_rows: Vec<usize> = pivots.clone();
    kept_rows.sort_unstable();
    let kept: Vec<(usize, f64)> = kept_rows.iter().map(|&i| (i, scales[i])).collect();

    let c_norm = form
        .c_blocks
        .iter()
        .map(|c| c.norm_squared())
        .chain([form.c_lp.iter().map(|x| x * x).sum(), form.c_free.iter().map(|x| x * x).sum()])
        .sum::<f64>()
        .sqrt();
    let c_scale = c_norm.max(1.0);

    let nb = form.block_dims.len();
    let mut block_rows: Vec<Vec<(usize, Vec<(usize, usize, f64)>)>> = vec![Vec::new(); nb];
    let mut lp_cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); form.n_lp];
    let mut af = DMatrix::zeros(kept.len(), form.n_free);
    for (i, &(orig, s)) in kept.iter().enumerate() {
        let row = &form.rows[orig];
        let mut per_block: Vec<Vec<(usize, usize, f64)>> = vec![Vec::new(); nb];
        for &(k, p, q, v) in &row.blocks {
            per_block[k].push((p, q, v * s));
        }
        for (k, ents) in per_block.into_iter().enumerate() {
            if !ents.is_empty() {
                block_rows[k].push((i, ents));
            }
        }
        for &(j, v) in &row.lp {
            lp_cols[j].push((i, v * s));
        }
        for &(j, v) in &row.free {
            af[(i, j)] += v * s;
        }
    }
    let data = Data {
        dims: form.block_dims.clone(),
        m: kept.len(),
        n_lp: form.n_lp,
        n_free: form.n_free,
        block_rows,
        lp_cols,
        af,
        b: kept.iter().map(|&(i, s)| form.b[i] * s).collect(),
        c: form.c_blocks.iter().map(|c| c / c_scale).collect(),
        cl: form.c_lp.iter().map(|x| x / c_scale).collect(),
        cf: form.c_free.iter().map(|x| x / c_scale).collect(),
    };
    PresolveOutcome::Ready(Presolved { data, kept, c_scale })
}

#[derive(Clone)]
struct Iterate {
    xs: Vec<DMatrix<f64>>,
    xl: Vec<f64>,
    f: Vec<f64>,
    y: Vec<f64>,
    zs: Vec<DMatrix<f64>>,
    zl: Vec<f64>,
    tau: f64,
    kappa: f64,
}

struct Direction {
    xs: Vec<DMatrix<f64>>,
    xl: Vec<f64>,
    f: Vec<f64>,
    y: Vec<f64>,
    zs: Vec<DMatrix<f64>>,
    zl: Vec<f64>,
    tau: f64,
    kappa: f64,
}

fn inner(a: &[DMatrix<f64>], b: &[DMatrix<f64>]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.dot(y)).sum()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn sym(m: DMatrix<f64>) -> DMatrix<f64> {
    (&m + m.transpose()) * 0.5
}

/// Largest `α` with `x + α·dx ⪰ 0`, given the Cholesky factor of `x`.
fn psd_step(chol: &Cholesky<f64, nalgebra::Dyn>, dx: &DMatrix<f64>) -> f64 {
    let l = chol.l();
    let Some(a) = l.solve_lower_triangular(dx) else { return 0.0 };
    let Some(s) = l.solve_lower_triangular(&a.transpose()) else { return 0.0 };
    let s = sym(s);
    let lmin = SymmetricEigen::new(s).eigenvalues.min();
    if lmin < 0.0 {
        -1.0 / lmin
    } else {
        f64::INFINITY
    }
}

fn ratio_step(x: &[f64], dx: &[f64]) -> f64 {
    x.iter()
        .zip(dx)
        .filter(|(_, d)| **d < 0.0)
        .map(|(x, d)| -x / d)
        .fold(f64::INFINITY, f64::min)
}

struct Residuals {
    rp: Vec<f64>,
    rd: Vec<DMatrix<f64>>,
    rdl: Vec<f64>,
    rf: Vec<f64>,
    rg: f64,
    pobj: f64,
    dobj: f64,
}

fn residuals(d: &Data, it: &Iterate) -> Residuals {
    let mut rp = d.apply_a(&it.xs, &it.xl);
    d.apply_af(&it.f, &mut rp);
    for (r, b) in rp.iter_mut().zip(&d.b) {
        *r -= b * it.tau;
    }
    let (aty, atyl) = d.apply_at(&it.y);
    let rd: Vec<DMatrix<f64>> = aty.iter().zip(&it.zs).zip(&d.c).map(|((a, z), c)| a + z - c * it.tau).collect();
    let rdl: Vec<f64> = atyl.iter().zip(&it.zl).zip(&d.cl).map(|((a, z), c)| a + z - c * it.tau).collect();
    let rf: Vec<f64> = d.apply_aft(&it.y).iter().zip(&d.cf).map(|(a, c)| a - c * it.tau).collect();
    let pobj = inner(&d.c, &it.xs) + dot(&d.cl, &it.xl) + dot(&d.cf, &it.f);
    let dobj = dot(&d.b, &it.y);
    Residuals { rp, rd, rdl, rf, rg: pobj - dobj + it.kappa, pobj, dobj }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn mats_norm(v: &[DMatrix<f64>]) -> f64 {
    v.iter().map(|m| m.norm_squared()).sum::<f64>().sqrt()
}

/// Per-iteration factorization state shared by predictor and corrector.
struct Scaling {
    zinv: Vec<DMatrix<f64>>,
    xchol: Vec<Cholesky<f64, nalgebra::Dyn>>,
    zchol: Vec<Cholesky<f64, nalgebra::Dyn>>,
    lu: nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
    g: Vec<f64>,
    dcd: f64,
    p: Vec<f64>,
    q: Vec<f64>,
}

impl Data {
    /// HKM operator `D(W) = sym(X W Z⁻¹)`.
    fn d_op(&self, it: &Iterate, zinv: &[DMatrix<f64>], w: &[DMatrix<f64>]) -> Vec<DMatrix<f64>> {
        it.xs.iter().zip(w).zip(zinv).map(|((x, w), zi)| sym(x * w * zi)).collect()
    }

    fn d_lp(&self, it: &Iterate, w: &[f64]) -> Vec<f64> {
        it.xl.iter().zip(&it.zl).zip(w).map(|((x, z), w)| x / z * w).collect()
    }

    fn scaling(&self, it: &Iterate) -> Option<Scaling> {
        let mut zinv = Vec::with_capacity(self.dims.len());
        let mut xchol = Vec::with_capacity(self.dims.len());
        let mut zchol = Vec::with_capacity(self.dims.len());
        for (x, z) in it.xs.iter().zip(&it.zs) {
            let cz = Cholesky::new(z.clone())?;
            zinv.push(sym(cz.inverse()));
            zchol.push(cz);
            xchol.push(Cholesky::new(x.clone())?);
        }

        let m = self.m;
        let nf = self.n_free;
        let mut k = DMatrix::<f64>::zeros(m + nf, m + nf);
        for (b, rows) in self.block_rows.iter().enumerate() {
            let x = &it.xs[b];
            let w = &zinv[b];
            for (a, (i, ei)) in rows.iter().enumerate() {
                for (j, ej) in rows[a..].iter() {
                    let mut s = 0.0;
                    for &(p, q, v) in ei {
                        for &(r, t, u) in ej {
                            s += v * u * x[(q, r)] * w[(t, p)];
                        }
                    }
                    k[(*i, *j)] += s;
                    if i != j {
                        k[(*j, *i)] += s;
                    }
                }
            }
        }
        for (j, col) in self.lp_cols.iter().enumerate() {
            let h = it.xl[j] / it.zl[j];
            for &(a, va) in col {
                for &(b, vb) in col {
                    k[(a, b)] += va * vb * h;
                }
            }
        }
        for i in 0..m {
            for j in 0..nf {
                k[(i, m + j)] = self.af[(i, j)];
                k[(m + j, i)] = self.af[(i, j)];
            }
        }
        let mut lu = k.clone().lu();
        if !lu.is_invertible() {
            let reg = 1e-12 * k.amax().max(1.0);
            for i in 0..m {
                k[(i, i)] += reg;
            }
            for j in 0..nf {
                k[(m + j, m + j)] -= reg;
            }
            lu = k.lu();
            if !lu.is_invertible() {
                return None;
            }
        }

        let dc = self.d_op(it, &zinv, &self.c);
        let dcl = self.d_lp(it, &self.cl);
        let g = self.apply_a(&dc, &dcl);
        let dcd = inner(&self.c, &dc) + dot(&self.cl, &dcl);
        let mut rhs = DVector::zeros(m + nf);
        for i in 0..m {
            rhs[i] = g[i] + self.b[i];
        }
        for j in 0..nf {
            rhs[m + j] = self.cf[j];
        }
        let sol = lu.solve(&rhs)?;
        let p = sol.rows(0, m).iter().copied().collect();
        let q = sol.rows(m, nf).iter().copied().collect();
        Some(Scaling { zinv, xchol, zchol, lu, g, dcd, p, q })
    }

    /// Newton direction for residual weight `eta`, complementarity right-hand
    /// sides `rc` (blocks), `rcl` (LP) and `rtk` (τκ).
    #[allow(clippy::too_many_arguments)]
    fn direction(
        &self,
        it: &Iterate,
        res: &Residuals,
        sc: &Scaling,
        eta: f64,
        rc: Vec<DMatrix<f64>>,
        rcl: Vec<f64>,
        rtk: f64,
    ) -> Option<Direction> {
        let m = self.m;
        let nf = self.n_free;
        let drd = self.d_op(it, &sc.zinv, &res.rd);
        let drdl = self.d_lp(it, &res.rdl);
        let r: Vec<DMatrix<f64>> = rc.iter().zip(&drd).map(|(a, b)| a + b * eta).collect();
        let rl: Vec<f64> = rcl.iter().zip(&drdl).map(|(a, b)| a + b * eta).collect();
        let ar = self.apply_a(&r, &rl);
        let mut rhs = DVector::zeros(m + nf);
        for i in 0..m {
            rhs[i] = -eta * res.rp[i] - ar[i];
        }
        for j in 0..nf {
            rhs[m + j] = -eta * res.rf[j];
        }
        let sol = sc.lu.solve(&rhs)?;
        let u: Vec<f64> = sol.rows(0, m).iter().copied().collect();
        let v: Vec<f64> = sol.rows(m, nf).iter().copied().collect();

        let gmb: Vec<f64> = sc.g.iter().zip(&self.b).map(|(g, b)| g - b).collect();
        let den = dot(&gmb, &sc.p) + dot(&self.cf, &sc.q) - sc.dcd - it.kappa / it.tau;
        let num = -eta * res.rg - inner(&self.c, &r) - dot(&self.cl, &rl) - dot(&gmb, &u) - dot(&self.cf, &v) - rtk / it.tau;
        if den == 0.0 || !den.is_finite() {
            return None;
        }
        let dtau = num / den;
        let dy: Vec<f64> = u.iter().zip(&sc.p).map(|(u, p)| u + dtau * p).collect();
        let df: Vec<f64> = v.iter().zip(&sc.q).map(|(v, q)| v + dtau * q).collect();
        let (atdy, atdyl) = self.apply_at(&dy);
        let dzs: Vec<DMatrix<f64>> = res
            .rd
            .iter()
            .zip(&atdy)
            .zip(&self.c)
            .map(|((rd, a), c)| -(rd * eta) - a + c * dtau)
            .collect();
        let dzl: Vec<f64> = res
            .rdl
            .iter()
            .zip(&atdyl)
            .zip(&self.cl)
            .map(|((rd, a), c)| -eta * rd - a + c * dtau)
            .collect();
        let ddz = self.d_op(it, &sc.zinv, &dzs);
        let dxs: Vec<DMatrix<f64>> = rc.iter().zip(&ddz).map(|(a, b)| sym(a - b)).collect();
        let ddzl = self.d_lp(it, &dzl);
        let dxl: Vec<f64> = rcl.iter().zip(&ddzl).map(|(a, b)| a - b).collect();
        let dkappa = (rtk - it.kappa * dtau) / it.tau;
        Some(Direction { xs: dxs, xl: dxl, f: df, y: dy, zs: dzs, zl: dzl, tau: dtau, kappa: dkappa })
    }
}

fn max_step(it: &Iterate, d: &Direction, sc: &Scaling) -> f64 {
    let mut a = f64::INFINITY;
    for (ch, dx) in sc.xchol.iter().zip(&d.xs) {
        a = a.min(psd_step(ch, dx));
    }
    for (ch, dz) in sc.zchol.iter().zip(&d.zs) {
        a = a.min(psd_step(ch, dz));
    }
    a = a.min(ratio_step(&it.xl, &d.xl)).min(ratio_step(&it.zl, &d.zl));
    a = a.min(ratio_step(&[it.tau], &[d.tau])).min(ratio_step(&[it.kappa], &[d.kappa]));
    a
}

fn step(it: &Iterate, d: &Direction, a: f64) -> Iterate {
    Iterate {
        xs: it.xs.iter().zip(&d.xs).map(|(x, dx)| sym(x + dx * a)).collect(),
        xl: it.xl.iter().zip(&d.xl).map(|(x, dx)| x + a * dx).collect(),
        f: it.f.iter().zip(&d.f).map(|(x, dx)| x + a * dx).collect(),
        y: it.y.iter().zip(&d.y).map(|(x, dx)| x + a * dx).collect(),
        zs: it.zs.iter().zip(&d.zs).map(|(x, dx)| sym(x + dx * a)).collect(),
        zl: it.zl.iter().zip(&d.zl).map(|(x, dx)| x + a * dx).collect(),
        tau: it.tau + a * d.tau,
        kappa: it.kappa + a * d.kappa,
    }
}

fn complementarity(it: &Iterate) -> f64 {
    inner(&it.xs, &it.zs) + dot(&it.xl, &it.zl) + it.tau * it.kappa
}

#[derive(Clone)]
struct Quality {
    pres: f64,
    dres: f64,
    rel_gap: f64,
    pobj: f64,
    dobj: f64,
}

fn quality(d: &Data, it: &Iterate, res: &Residuals) -> Quality {
    let bn = norm(&d.b);
    let cn = (mats_norm(&d.c).powi(2) + norm(&d.cl).powi(2) + norm(&d.cf).powi(2)).sqrt();
    let pres = norm(&res.rp) / it.tau / (1.0 + bn);
    let dres = (mats_norm(&res.rd).powi(2) + norm(&res.rdl).powi(2) + norm(&res.rf).powi(2)).sqrt() / it.tau / (1.0 + cn);
    let pobj = res.pobj / it.tau;
    let dobj = res.dobj / it.tau;
    let rel_gap = (pobj - dobj).abs() / (1.0 + pobj.abs());
    Quality { pres, dres, rel_gap, pobj, dobj }
}

fn finish(pre: &Presolved, m_orig: usize, it: &Iterate, q: &Quality, status: IpmStatus, iterations: usize, cert: f64) -> IpmResult {
    let (xs, xl, f, scale) = if status == IpmStatus::Optimal || status == IpmStatus::NumericFailure {
        let t = it.tau;
        (
            it.xs.iter().map(|x| x / t).collect(),
            it.xl.iter().map(|x| x / t).collect(),
            it.f.iter().map(|x| x / t).collect(),
            pre.c_scale / t,
        )
    } else {
        (it.xs.clone(), it.xl.clone(), it.f.clone(), 1.0)
    };
    let mut y = vec![0.0; m_orig];
    for (i, &(orig, s)) in pre.kept.iter().enumerate() {
        y[orig] = it.y[i] * s * scale;
    }
    IpmResult {
        status,
        xs,
        xl,
        f,
        y,
        pobj: q.pobj * pre.c_scale,
        dobj: q.dobj * pre.c_scale,
        pres: q.pres,
        dres: q.dres,
        iterations,
        certificate_residual: cert,
    }
}

pub(crate) fn solve_standard(form: &StandardForm, tol: f64, max_iter: usize) -> IpmResult {
    let m_orig = form.rows.len();
    let pre = match presolve(form) {
        PresolveOutcome::Ready(p) => p,
        PresolveOutcome::Inconsistent(ray, mismatch) => {
            return IpmResult {
                status: IpmStatus::PrimalInfeasible,
                xs: form.block_dims.iter().map(|&n| DMatrix::zeros(n, n)).collect(),
                xl: vec![0.0; form.n_lp],
                f: vec![0.0; form.n_free],
                y: ray,
                pobj: f64::NAN,
                dobj: f64::NAN,
                pres: mismatch,
                dres: 0.0,
                iterations: 0,
                certificate_residual: 0.0,
            }
        }
    };
    let d = &pre.data;
    let nu = d.dims.iter().sum::<usize>() as f64 + d.n_lp as f64 + 1.0;
    let mut it = Iterate {
        xs: d.dims.iter().map(|&n| DMatrix::identity(n, n)).collect(),
        xl: vec![1.0; d.n_lp],
        f: vec![0.0; d.n_free],
        y: vec![0.0; d.m],
        zs: d.dims.iter().map(|&n| DMatrix::identity(n, n)).collect(),
        zl: vec![1.0; d.n_lp],
        tau: 1.0,
        kappa: 1.0,
    };
    let target = tol * 0.1;
    let mut best: Option<(Iterate, Quality, usize)> = None;
    let mut small_steps = 0;
    let mut iterations = 0;

    for iter in 0..=max_iter {
        iterations = iter;
        let res = residuals(d, &it);
        let q = quality(d, &it, &res);
        let ok = |t: f64| q.pres <= t && q.dres <= t && q.rel_gap <= t;
        if ok(target) {
            return finish(&pre, m_orig, &it, &q, IpmStatus::Optimal, iter, 0.0);
        }
        if ok(tol) {
            best = Some((it.clone(), q.clone(), iter));
        }

        // Farkas-type certificates on the raw (unnormalized) iterate.
        if res.dobj > 0.0 {
            let (aty, atyl) = d.apply_at(&it.y);
            let rz: Vec<DMatrix<f64>> = aty.iter().zip(&it.zs).map(|(a, z)| a + z).collect();
            let rzl: Vec<f64> = atyl.iter().zip(&it.zl).map(|(a, z)| a + z).collect();
            let rf = d.apply_aft(&it.y);
            let r = (mats_norm(&rz).powi(2) + norm(&rzl).powi(2) + norm(&rf).powi(2)).sqrt() / res.dobj;
            if r <= tol {
                return finish(&pre, m_orig, &it, &q, IpmStatus::PrimalInfeasible, iter, r);
            }
        }
        if res.pobj < 0.0 {
            let mut ax = d.apply_a(&it.xs, &it.xl);
            d.apply_af(&it.f, &mut ax);
            let r = norm(&ax) / -res.pobj;
            if r <= tol {
                return finish(&pre, m_orig, &it, &q, IpmStatus::DualInfeasible, iter, r);
            }
        }
        if iter == max_iter {
            break;
        }

        let mu = complementarity(&it) / nu;
        let Some(sc) = d.scaling(&it) else { break };

        // Predictor.
        let rc_aff: Vec<DMatrix<f64>> = it.xs.iter().map(|x| -x).collect();
        let rcl_aff: Vec<f64> = it.xl.iter().map(|x| -x).collect();
        let Some(aff) = d.direction(&it, &res, &sc, 1.0, rc_aff, rcl_aff, -it.tau * it.kappa) else { break };
        let a_aff = max_step(&it, &aff, &sc).min(1.0);
        let mu_aff = complementarity(&step(&it, &aff, a_aff)) / nu;
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);

        // Corrector.
        let rc: Vec<DMatrix<f64>> = it
            .xs
            .iter()
            .zip(&sc.zinv)
            .zip(aff.xs.iter().zip(&aff.zs))
            .map(|((x, zi), (dx, dz))| zi * (sigma * mu) - x - sym(dx * dz * zi))
            .collect();
        let rcl: Vec<f64> = (0..d.n_lp)
            .map(|j| (sigma * mu - aff.xl[j] * aff.zl[j]) / it.zl[j] - it.xl[j])
            .collect();
        let rtk = sigma * mu - it.tau * it.kappa - aff.tau * aff.kappa;
        let Some(dir) = d.direction(&it, &res, &sc, 1.0 - sigma, rc, rcl, rtk) else { break };
        let a = (STEP_FRACTION * max_step(&it, &dir, &sc)).min(1.0);
        if !(a > 1e-10) {
            break;
        }
        small_steps = if a < 1e-6 { small_steps + 1 } else { 0 };
        if small_steps >= 5 {
            break;
        }
        let next = step(&it, &dir, a);
        if !next.tau.is_finite() || next.tau <= 0.0 {
            break;
        }
        it = next;
    }

    if let Some((bit, bq, biter)) = best {
        return finish(&pre, m_orig, &bit, &bq, IpmStatus::Optimal, biter, 0.0);
    }
    let res = residuals(d, &it);
    let q = quality(d, &it, &res);
    finish(&pre, m_orig, &it, &q, IpmStatus::NumericFailure, iterations, f64::NAN)
}
