//! Feasibility of affine constraints intersected with PSD cones.
//!
//! The driver alternates the orthogonal projection onto the affine solution
//! set (normal equations, factored once) with the PSD projection of each
//! Hermitian unknown. Tangential intersections stall alternating
//! projections, so a factored Gauss-Newton polish runs periodically: it
//! parameterizes each unknown as `B B*` (PSD by construction) and drives the
//! affine residual to zero, which rescues exactly the boundary-touching
//! instances while leaving the projection semantics intact.

use num_complex::Complex64;

use super::eig::{hermitian_eig, psd_project};
use super::matrix::{CMatrix, HermMatrix};
use crate::error::{Error, Result};

/// One linear term `weight * X_unknown[row, col]` of an equation.
#[derive(Debug, Clone)]
pub struct Term {
    pub unknown: usize,
    pub row: usize,
    pub col: usize,
    pub weight: Complex64,
}

/// A complex-valued affine equation over the Hermitian unknowns. Builders
/// push one equation per conjugate pair; the real/imaginary split below makes
/// the real-linear structure explicit, and the implied conjugate twin is
/// never stored.
#[derive(Debug, Clone)]
pub struct Equation {
    pub terms: Vec<Term>,
    pub target: Complex64,
}

#[derive(Debug, Clone, Default)]
pub struct AffineConstraintSet {
    pub equations: Vec<Equation>,
}

impl AffineConstraintSet {
    pub fn new() -> Self {
        AffineConstraintSet { equations: vec![] }
    }

    pub fn push(&mut self, terms: Vec<Term>, target: Complex64) {
        self.equations.push(Equation { terms, target });
    }

    pub fn len(&self) -> usize {
        self.equations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.equations.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub eps_affine: f64,
    pub eps_psd: f64,
    pub max_iters: usize,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            eps_affine: 1e-9,
            eps_psd: 1e-9,
            max_iters: 20_000,
            seed: crate::points::DEFAULT_SEED,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeasStatus {
    Feasible,
    /// Iteration cap reached; feasibility undecided. Never interpreted as
    /// infeasibility on its own.
    MaxIters,
    /// A certified obstruction supplied by the caller (the solver itself
    /// never claims this from stalling).
    InfeasibleEvidence,
}

#[derive(Debug, Clone)]
pub struct FeasibilityResult {
    pub status: FeasStatus,
    pub solution: Vec<HermMatrix>,
    pub affine_residual: f64,
    pub min_eig: f64,
    pub iterations: usize,
    /// Set when the normal equations needed a 1e-12 ridge.
    pub regularized: bool,
}

const POLISH_INTERVAL: usize = 250;
const SQRT2: f64 = std::f64::consts::SQRT_2;

/// Isometric real parameterization of a tuple of Hermitian matrices:
/// diagonal entries directly, off-diagonal entries as sqrt(2)-scaled real
/// and imaginary parts, so Euclidean projection in parameters equals
/// Frobenius projection on matrices.
struct RealLift {
    sizes: Vec<usize>,
    offsets: Vec<usize>,
    nparams: usize,
}

impl RealLift {
    fn new(sizes: &[usize]) -> Self {
        let mut offsets = Vec::with_capacity(sizes.len());
        let mut acc = 0usize;
        for &n in sizes {
            offsets.push(acc);
            acc += n * n;
        }
        RealLift {
            sizes: sizes.to_vec(),
            offsets,
            nparams: acc,
        }
    }

    fn pair_index(n: usize, i: usize, j: usize) -> usize {
        debug_assert!(i < j && j < n);
        i * n - i * (i + 1) / 2 + (j - i - 1)
    }

    fn diag_param(&self, u: usize, i: usize) -> usize {
        self.offsets[u] + i
    }

    /// (real-part param, imaginary-part param) for entry (i, j), i < j.
    fn off_params(&self, u: usize, i: usize, j: usize) -> (usize, usize) {
        let n = self.sizes[u];
        let base = self.offsets[u] + n + 2 * Self::pair_index(n, i, j);
        (base, base + 1)
    }

    fn pack(&self, mats: &[HermMatrix], y: &mut [f64]) {
        for (u, m) in mats.iter().enumerate() {
            let n = self.sizes[u];
            for i in 0..n {
                y[self.diag_param(u, i)] = m.get(i, i).re;
                for j in (i + 1)..n {
                    let (pu, pv) = self.off_params(u, i, j);
                    y[pu] = SQRT2 * m.get(i, j).re;
                    y[pv] = SQRT2 * m.get(i, j).im;
                }
            }
        }
    }

    fn unpack(&self, y: &[f64]) -> Vec<HermMatrix> {
        self.sizes
            .iter()
            .enumerate()
            .map(|(u, &n)| {
                let mut m = HermMatrix::zeros(n);
                for i in 0..n {
                    m.set_pair(i, i, Complex64::new(y[self.diag_param(u, i)], 0.0));
                    for j in (i + 1)..n {
                        let (pu, pv) = self.off_params(u, i, j);
                        m.set_pair(i, j, Complex64::new(y[pu] / SQRT2, y[pv] / SQRT2));
                    }
                }
                m
            })
            .collect()
    }
}

#[derive(Debug, Clone)]
struct SparseRow {
    cols: Vec<(usize, f64)>,
    target: f64,
}

/// Real rows of the lifted system. Rows whose coefficients all vanish are
/// kept aside: they cannot steer the projection but their targets still
/// count toward the reported residual.
struct LiftedSystem {
    lift: RealLift,
    active: Vec<SparseRow>,
    passive_sq: f64,
}

impl LiftedSystem {
    fn build(cs: &AffineConstraintSet, sizes: &[usize]) -> Result<Self> {
        let lift = RealLift::new(sizes);
        let mut active = Vec::new();
        let mut passive_sq = 0.0;
        for eq in &cs.equations {
            let mut re_row: Vec<(usize, f64)> = Vec::new();
            let mut im_row: Vec<(usize, f64)> = Vec::new();
            for t in &eq.terms {
                if t.unknown >= sizes.len() {
                    return Err(Error::InvalidInput(format!(
                        "equation references unknown {} of {}",
                        t.unknown,
                        sizes.len()
                    )));
                }
                let n = sizes[t.unknown];
                if t.row >= n || t.col >= n {
                    return Err(Error::InvalidInput(format!(
                        "entry ({}, {}) outside {}x{} unknown",
                        t.row, t.col, n, n
                    )));
                }
                let w = t.weight;
                if t.row == t.col {
                    let p = lift.diag_param(t.unknown, t.row);
                    re_row.push((p, w.re));
                    im_row.push((p, w.im));
                } else if t.row < t.col {
                    // w * X_ij with X_ij = (u + i v)/sqrt(2)
                    let (pu, pv) = lift.off_params(t.unknown, t.row, t.col);
                    re_row.push((pu, w.re / SQRT2));
                    re_row.push((pv, -w.im / SQRT2));
                    im_row.push((pu, w.im / SQRT2));
                    im_row.push((pv, w.re / SQRT2));
                } else {
                    // w * conj(X_ji)
                    let (pu, pv) = lift.off_params(t.unknown, t.col, t.row);
                    re_row.push((pu, w.re / SQRT2));
                    re_row.push((pv, w.im / SQRT2));
                    im_row.push((pu, w.im / SQRT2));
                    im_row.push((pv, -w.re / SQRT2));
                }
            }
            for (cols, target) in [(re_row, eq.target.re), (im_row, eq.target.im)] {
                let compressed = compress(cols);
                if compressed.is_empty() {
                    passive_sq += target * target;
                } else {
                    active.push(SparseRow {
                        cols: compressed,
                        target,
                    });
                }
            }
        }
        Ok(LiftedSystem {
            lift,
            active,
            passive_sq,
        })
    }

    fn apply(&self, y: &[f64], out: &mut [f64]) {
        for (k, row) in self.active.iter().enumerate() {
            out[k] = row.cols.iter().map(|&(c, w)| w * y[c]).sum::<f64>() - row.target;
        }
    }

    fn residual(&self, y: &[f64]) -> f64 {
        let mut s = self.passive_sq;
        for row in &self.active {
            let r = row.cols.iter().map(|&(c, w)| w * y[c]).sum::<f64>() - row.target;
            s += r * r;
        }
        s.sqrt()
    }
}

fn compress(mut cols: Vec<(usize, f64)>) -> Vec<(usize, f64)> {
    cols.sort_by_key(|&(c, _)| c);
    let mut out: Vec<(usize, f64)> = Vec::with_capacity(cols.len());
    for (c, w) in cols {
        match out.last_mut() {
            Some((lc, lw)) if *lc == c => *lw += w,
            _ => out.push((c, w)),
        }
    }
    out.retain(|&(_, w)| w != 0.0);
    out
}

/// Dense symmetric positive-definite solve via Cholesky.
struct Cholesky {
    n: usize,
    l: Vec<f64>,
}

impl Cholesky {
    fn factor(mut a: Vec<f64>, n: usize) -> Option<Cholesky> {
        let scale = (0..n)
            .map(|i| a[i * n + i].abs())
            .fold(0.0f64, f64::max)
            .max(1.0);
        for k in 0..n {
            let mut d = a[k * n + k];
            for m in 0..k {
                d -= a[k * n + m] * a[k * n + m];
            }
            if d <= 1e-13 * scale {
                return None;
            }
            let d = d.sqrt();
            a[k * n + k] = d;
            for i in (k + 1)..n {
                let mut v = a[i * n + k];
                for m in 0..k {
                    v -= a[i * n + m] * a[k * n + m];
                }
                a[i * n + k] = v / d;
            }
        }
        Some(Cholesky { n, l: a })
    }

    fn solve(&self, b: &mut [f64]) {
        let n = self.n;
        for i in 0..n {
            let mut v = b[i];
            for j in 0..i {
                v -= self.l[i * n + j] * b[j];
            }
            b[i] = v / self.l[i * n + i];
        }
        for i in (0..n).rev() {
            let mut v = b[i];
            for j in (i + 1)..n {
                v -= self.l[j * n + i] * b[j];
            }
            b[i] = v / self.l[i * n + i];
        }
    }
}

/// Gram matrix of the active rows, as a dense buffer.
fn normal_matrix(sys: &LiftedSystem) -> Vec<f64> {
    let m = sys.active.len();
    let mut by_param: Vec<Vec<(usize, f64)>> = vec![Vec::new(); sys.lift.nparams];
    for (k, row) in sys.active.iter().enumerate() {
        for &(c, w) in &row.cols {
            by_param[c].push((k, w));
        }
    }
    let mut g = vec![0.0f64; m * m];
    for entries in &by_param {
        for &(r1, w1) in entries {
            for &(r2, w2) in entries {
                g[r1 * m + r2] += w1 * w2;
            }
        }
    }
    g
}

fn min_eig_of(mats: &[HermMatrix]) -> Result<(f64, Vec<super::eig::HermEig>)> {
    let mut eigs = Vec::with_capacity(mats.len());
    let mut lo = f64::INFINITY;
    for m in mats {
        let e = hermitian_eig(m)?;
        if let Some(&last) = e.values.last() {
            lo = lo.min(last);
        }
        eigs.push(e);
    }
    if lo == f64::INFINITY {
        lo = 0.0;
    }
    Ok((lo, eigs))
}

/// Alternating projections between the affine solution set and the product
/// of PSD cones. Deterministic given the config and the scaled-identity
/// initial iterate.
pub fn affine_psd_feasibility(
    cs: &AffineConstraintSet,
    sizes: &[usize],
    cfg: &SolverConfig,
) -> Result<FeasibilityResult> {
    let sys = LiftedSystem::build(cs, sizes)?;
    let lift = &sys.lift;

    if lift.nparams == 0 {
        let residual = sys.passive_sq.sqrt();
        let status = if residual <= cfg.eps_affine {
            FeasStatus::Feasible
        } else {
            FeasStatus::MaxIters
        };
        return Ok(FeasibilityResult {
            status,
            solution: sizes.iter().map(|&n| HermMatrix::zeros(n)).collect(),
            affine_residual: residual,
            min_eig: 0.0,
            iterations: 0,
            regularized: false,
        });
    }

    // Factor the normal equations once; ridge only when singular, and
    // flagged when applied.
    let m = sys.active.len();
    let mut regularized = false;
    let chol = if m > 0 {
        let g = normal_matrix(&sys);
        match Cholesky::factor(g.clone(), m) {
            Some(c) => Some(c),
            None => {
                regularized = true;
                let max_diag = (0..m).map(|i| g[i * m + i]).fold(0.0f64, f64::max).max(1.0);
                let ridge = 1e-12 * max_diag;
                let mut gr = g;
                for i in 0..m {
                    gr[i * m + i] += ridge;
                }
                Some(Cholesky::factor(gr, m).ok_or_else(|| {
                    Error::InvalidInput("normal equations singular beyond ridge repair".into())
                })?)
            }
        }
    } else {
        None
    };

    let project_affine = |y: &mut Vec<f64>| {
        if let Some(c) = &chol {
            let mut r = vec![0.0; m];
            sys.apply(y, &mut r);
            c.solve(&mut r);
            for (k, row) in sys.active.iter().enumerate() {
                let s = r[k];
                if s != 0.0 {
                    for &(col, w) in &row.cols {
                        y[col] -= w * s;
                    }
                }
            }
        }
    };

    // Trace-matched scaled-identity start.
    let total_dim: usize = sizes.iter().sum();
    let target_norm = cs
        .equations
        .iter()
        .map(|e| e.target.norm_sqr())
        .sum::<f64>()
        .sqrt();
    let init_scale = if total_dim > 0 {
        target_norm.max(1.0) / (total_dim as f64)
    } else {
        0.0
    };
    let init: Vec<HermMatrix> = sizes
        .iter()
        .map(|&n| HermMatrix::scaled_identity(n, init_scale))
        .collect();
    let mut y = vec![0.0; lift.nparams];
    lift.pack(&init, &mut y);

    let mut last_solution = init;
    let mut last_residual = f64::INFINITY;
    let mut last_min_eig = f64::NEG_INFINITY;
    let mut iterations = 0;

    for it in 1..=cfg.max_iters {
        iterations = it;
        project_affine(&mut y);
        let residual = sys.residual(&y);
        let mats = lift.unpack(&y);
        let (min_eig, eigs) = min_eig_of(&mats)?;

        last_solution = mats;
        last_residual = residual;
        last_min_eig = min_eig;

        if residual <= cfg.eps_affine && min_eig >= -cfg.eps_psd {
            return Ok(FeasibilityResult {
                status: FeasStatus::Feasible,
                solution: last_solution,
                affine_residual: residual,
                min_eig,
                iterations: it,
                regularized,
            });
        }

        if (it % POLISH_INTERVAL == 0 || it == cfg.max_iters)
            && sys.passive_sq.sqrt() <= cfg.eps_affine
        {
            if let Some(polished) = polish(&sys, &last_solution, cfg)? {
                let mut py = vec![0.0; lift.nparams];
                lift.pack(&polished, &mut py);
                let residual = sys.residual(&py);
                let (min_eig, _) = min_eig_of(&polished)?;
                if residual <= cfg.eps_affine && min_eig >= -cfg.eps_psd {
                    return Ok(FeasibilityResult {
                        status: FeasStatus::Feasible,
                        solution: polished,
                        affine_residual: residual,
                        min_eig,
                        iterations: it,
                        regularized,
                    });
                }
            }
        }

        // PSD projection, reusing the eigendecompositions just computed.
        let projected: Vec<HermMatrix> = last_solution
            .iter()
            .zip(eigs.iter())
            .map(|(mat, eig)| {
                if eig.values.iter().all(|&l| l >= 0.0) {
                    Ok(mat.clone())
                } else {
                    let n = mat.dim();
                    let mut out = CMatrix::zeros(n, n);
                    for k in 0..n {
                        let lam = eig.values[k].max(0.0);
                        if lam == 0.0 {
                            continue;
                        }
                        for i in 0..n {
                            let vik = eig.vectors.get(i, k) * lam;
                            for j in 0..n {
                                let v = out.get(i, j) + vik * eig.vectors.get(j, k).conj();
                                out.set(i, j, v);
                            }
                        }
                    }
                    HermMatrix::from_matrix(&out)
                }
            })
            .collect::<Result<_>>()?;
        lift.pack(&projected, &mut y);
    }

    Ok(FeasibilityResult {
        status: FeasStatus::MaxIters,
        solution: last_solution,
        affine_residual: last_residual,
        min_eig: last_min_eig,
        iterations,
        regularized,
    })
}

/// Levenberg-Marquardt on factors `X_u = B_u B_u*`. Returns matrices only
/// when the affine residual target is met; PSD holds by construction.
fn polish(
    sys: &LiftedSystem,
    start: &[HermMatrix],
    cfg: &SolverConfig,
) -> Result<Option<Vec<HermMatrix>>> {
    let sizes = &sys.lift.sizes;
    let m = sys.active.len();
    if m == 0 {
        return Ok(Some(start.to_vec()));
    }

    // Factor the PSD part of each start block.
    let mut factors: Vec<CMatrix> = Vec::with_capacity(start.len());
    for mat in start {
        let n = mat.dim();
        let eig = hermitian_eig(&psd_project(mat)?)?;
        let mut b = CMatrix::zeros(n, n);
        for k in 0..n {
            let s = eig.values[k].max(0.0).sqrt();
            for i in 0..n {
                b.set(i, k, eig.vectors.get(i, k) * s);
            }
        }
        factors.push(b);
    }

    // Parameter layout: per unknown, re/im of each factor entry.
    let mut offsets = Vec::with_capacity(sizes.len());
    let mut q = 0usize;
    for &n in sizes.iter() {
        offsets.push(q);
        q += 2 * n * n;
    }
    if q == 0 {
        return Ok(Some(start.to_vec()));
    }

    // Column-indexed view of the active rows for fast J assembly.
    let mut by_param: Vec<Vec<(usize, f64)>> = vec![Vec::new(); sys.lift.nparams];
    for (k, row) in sys.active.iter().enumerate() {
        for &(c, w) in &row.cols {
            by_param[c].push((k, w));
        }
    }

    let pack_products = |factors: &[CMatrix]| -> Result<Vec<HermMatrix>> {
        factors
            .iter()
            .map(|b| HermMatrix::from_matrix(&b.mul(&b.adjoint())?))
            .collect()
    };

    let residual_vec = |mats: &[HermMatrix]| -> Vec<f64> {
        let mut y = vec![0.0; sys.lift.nparams];
        sys.lift.pack(mats, &mut y);
        let mut r = vec![0.0; m];
        sys.apply(&y, &mut r);
        r
    };

    let norm_sq = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>();

    let mut mats = pack_products(&factors)?;
    let mut r = residual_vec(&mats);
    let mut cost = norm_sq(&r);
    let target = (0.25 * cfg.eps_affine).powi(2);
    let mut lambda = 1e-8;

    for _outer in 0..80 {
        if cost + sys.passive_sq <= target {
            break;
        }
        // Jacobian of the packed products w.r.t. the factor parameters.
        let mut jt_j = vec![0.0f64; q * q];
        let mut jt_r = vec![0.0f64; q];
        let mut jcols: Vec<Vec<(usize, f64)>> = Vec::with_capacity(q);
        for (u, &n) in sizes.iter().enumerate() {
            let b = &factors[u];
            for a in 0..n {
                for bcol in 0..n {
                    for part in 0..2 {
                        // dX = E B* + B E* (real part) or i(E B* - B E*) (imag),
                        // nonzero only on row a and column a.
                        let mut col_acc: Vec<f64> = vec![0.0; m];
                        let mut touched: Vec<usize> = Vec::new();
                        let add_packed = |param: usize, val: f64,
                                              col_acc: &mut Vec<f64>,
                                              touched: &mut Vec<usize>| {
                            if val == 0.0 {
                                return;
                            }
                            for &(rowk, w) in &by_param[param] {
                                if col_acc[rowk] == 0.0 {
                                    touched.push(rowk);
                                }
                                col_acc[rowk] += w * val;
                            }
                        };
                        for j in 0..n {
                            // dX[a, j] for j != a, and dX[a, a].
                            let e_bstar = b.get(j, bcol).conj(); // (E B*)[a, j]
                            let b_estar = b.get(a, bcol); // (B E*)[a, a] when j == a
                            let d: Complex64 = if part == 0 {
                                if j == a {
                                    Complex64::new(2.0 * b_estar.re, 0.0)
                                } else {
                                    e_bstar
                                }
                            } else if j == a {
                                Complex64::new(-2.0 * b_estar.im, 0.0)
                            } else {
                                Complex64::new(0.0, 1.0) * e_bstar
                            };
                            if j == a {
                                let p = sys.lift.diag_param(u, a);
                                add_packed(p, d.re, &mut col_acc, &mut touched);
                            } else {
                                let (lo, hi) = if a < j { (a, j) } else { (j, a) };
                                let (pu, pv) = sys.lift.off_params(u, lo, hi);
                                // Entry (a, j); its mirror is the conjugate.
                                let val = if a < j { d } else { d.conj() };
                                add_packed(pu, SQRT2 * val.re, &mut col_acc, &mut touched);
                                add_packed(pv, SQRT2 * val.im, &mut col_acc, &mut touched);
                            }
                        }
                        let param_idx = offsets[u] + 2 * (a * n + bcol) + part;
                        let mut sparse: Vec<(usize, f64)> = touched
                            .iter()
                            .map(|&k| (k, col_acc[k]))
                            .filter(|&(_, v)| v != 0.0)
                            .collect();
                        sparse.sort_by_key(|&(k, _)| k);
                        debug_assert!(param_idx < q);
                        jcols.push(sparse);
                    }
                }
            }
        }
        for (ci, col_i) in jcols.iter().enumerate() {
            let mut g = 0.0;
            for &(k, v) in col_i {
                g += v * r[k];
            }
            jt_r[ci] = g;
            for (cj, col_j) in jcols.iter().enumerate().skip(ci) {
                // Sparse dot of two sorted columns.
                let mut s = 0.0;
                let (mut a, mut b2) = (0usize, 0usize);
                while a < col_i.len() && b2 < col_j.len() {
                    match col_i[a].0.cmp(&col_j[b2].0) {
                        std::cmp::Ordering::Less => a += 1,
                        std::cmp::Ordering::Greater => b2 += 1,
                        std::cmp::Ordering::Equal => {
                            s += col_i[a].1 * col_j[b2].1;
                            a += 1;
                            b2 += 1;
                        }
                    }
                }
                jt_j[ci * q + cj] = s;
                jt_j[cj * q + ci] = s;
            }
        }

        let diag_scale = (0..q).map(|i| jt_j[i * q + i]).fold(0.0f64, f64::max).max(1e-12);
        let mut accepted = false;
        for _inner in 0..10 {
            let mut h = jt_j.clone();
            for i in 0..q {
                h[i * q + i] += lambda * diag_scale;
            }
            let Some(chol) = Cholesky::factor(h, q) else {
                lambda *= 10.0;
                continue;
            };
            let mut step: Vec<f64> = jt_r.iter().map(|&g| -g).collect();
            chol.solve(&mut step);

            let mut trial = factors.clone();
            for (u, &n) in sizes.iter().enumerate() {
                for a in 0..n {
                    for bcol in 0..n {
                        let base = offsets[u] + 2 * (a * n + bcol);
                        let delta = Complex64::new(step[base], step[base + 1]);
                        let v = trial[u].get(a, bcol) + delta;
                        trial[u].set(a, bcol, v);
                    }
                }
            }
            let trial_mats = pack_products(&trial)?;
            let trial_r = residual_vec(&trial_mats);
            let trial_cost = norm_sq(&trial_r);
            if trial_cost < cost {
                factors = trial;
                mats = trial_mats;
                r = trial_r;
                cost = trial_cost;
                lambda = (lambda / 3.0).max(1e-14);
                accepted = true;
                break;
            }
            lambda *= 10.0;
        }
        if !accepted {
            break;
        }
    }

    if cost + sys.passive_sq <= (cfg.eps_affine * cfg.eps_affine).min(target * 16.0) {
        Ok(Some(mats))
    } else {
        Ok(None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn re(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn term(unknown: usize, row: usize, col: usize, w: f64) -> Term {
        Term {
            unknown,
            row,
            col,
            weight: re(w),
        }
    }

    #[test]
    fn scalar_equality_is_feasible() {
        let mut cs = AffineConstraintSet::new();
        cs.push(vec![term(0, 0, 0, 1.0)], re(5.0));
        let r = affine_psd_feasibility(&cs, &[1], &SolverConfig::default()).unwrap();
        assert_eq!(r.status, FeasStatus::Feasible);
        assert!((r.solution[0].get(0, 0) - re(5.0)).norm() < 1e-9);
        assert!(r.affine_residual <= 1e-9);
        assert!(!r.regularized);
    }

    #[test]
    fn pinned_indefinite_target_stalls() {
        // All entries pinned to [[1, 1], [1, 0.75]], which is not PSD
        // (det = -0.25): the alternation can never satisfy both sets.
        let mut cs = AffineConstraintSet::new();
        cs.push(vec![term(0, 0, 0, 1.0)], re(1.0));
        cs.push(vec![term(0, 0, 1, 1.0)], re(1.0));
        cs.push(vec![term(0, 1, 1, 1.0)], re(0.75));
        let cfg = SolverConfig {
            max_iters: 300,
            ..SolverConfig::default()
        };
        let r = affine_psd_feasibility(&cs, &[2], &cfg).unwrap();
        assert_eq!(r.status, FeasStatus::MaxIters);
        // Brute-force 2x2 eigenvalue of the pinned target.
        let lam_min = (1.75 - ((1.0 - 0.75f64).powi(2) + 4.0).sqrt()) / 2.0;
        assert!((r.min_eig - lam_min).abs() < 1e-9, "min_eig {}", r.min_eig);
    }

    #[test]
    fn affine_projection_is_idempotent() {
        let mut cs = AffineConstraintSet::new();
        cs.push(
            vec![term(0, 0, 0, 1.0), term(0, 1, 1, 1.0)],
            re(3.0),
        );
        cs.push(
            vec![Term {
                unknown: 0,
                row: 0,
                col: 1,
                weight: Complex64::new(0.0, 1.0),
            }],
            re(0.25),
        );
        let sizes = [2usize];
        let sys = LiftedSystem::build(&cs, &sizes).unwrap();
        let m = sys.active.len();
        let g = normal_matrix(&sys);
        let chol = Cholesky::factor(g, m).unwrap();
        let project = |y: &mut Vec<f64>| {
            let mut r = vec![0.0; m];
            sys.apply(y, &mut r);
            chol.solve(&mut r);
            for (k, row) in sys.active.iter().enumerate() {
                for &(col, w) in &row.cols {
                    y[col] -= w * r[k];
                }
            }
        };
        let mut y = vec![0.7, -0.3, 0.2, 0.9];
        project(&mut y);
        let once = y.clone();
        project(&mut y);
        let drift: f64 = once
            .iter()
            .zip(y.iter())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        assert!(drift <= 1e-12);
        assert!(sys.residual(&y) <= 1e-12);
    }

    #[test]
    fn empty_system_is_feasible() {
        let cs = AffineConstraintSet::new();
        let r = affine_psd_feasibility(&cs, &[0, 0], &SolverConfig::default()).unwrap();
        assert_eq!(r.status, FeasStatus::Feasible);
        assert_eq!(r.min_eig, 0.0);
    }

    #[test]
    fn complex_weights_round_trip_through_lift() {
        // One unknown, pin X[0,1] = 0.3 - 0.2i via two conjugate-aware rows.
        let mut cs = AffineConstraintSet::new();
        cs.push(
            vec![Term {
                unknown: 0,
                row: 0,
                col: 1,
                weight: re(1.0),
            }],
            Complex64::new(0.3, -0.2),
        );
        cs.push(vec![term(0, 0, 0, 1.0)], re(1.0));
        cs.push(vec![term(0, 1, 1, 1.0)], re(1.0));
        let r = affine_psd_feasibility(&cs, &[2], &SolverConfig::default()).unwrap();
        assert_eq!(r.status, FeasStatus::Feasible);
        let x = r.solution[0].get(0, 1);
        assert!((x - Complex64::new(0.3, -0.2)).norm() < 1e-8);
        assert!(r.min_eig >= -1e-9);
    }
}
