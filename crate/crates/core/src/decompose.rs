//! Rational inner functions on the bidisk and their decompositions into
//! pairs of PSD Gram kernels, with certificates, sum-of-squares extraction,
//! and a uniqueness decision procedure.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kernels::{residual_on_pairs, KernelExpr, ScalarFn};
use crate::points::{bidisk_pairs, torus_point, Point2, DEFAULT_SEED};
use crate::poly::{next_index, CoeffGrid, DegreeProfile, Poly};
use crate::sdpcore::{
    affine_psd_feasibility, hermitian_eig, AffineConstraintSet, FeasStatus, HermMatrix,
    SolverConfig, Term,
};
use crate::stability::{is_stable, StabilityConfig};

/// A function `m * p~ / p` with `m` a unimodular monomial and `p` a
/// polynomial nonvanishing on the open bidisk; `p~` is the reflection of `p`
/// against `profile`. Degrees are `k_r = deg_r m + profile_r`.
#[derive(Debug, Clone)]
pub struct RationalInner {
    m: Poly,
    p: Poly,
    p_reflected: Poly,
    numer: Poly,
    profile: DegreeProfile,
    k: (usize, usize),
    /// Torus grid points skipped during the inner check because |p| was too
    /// small there (boundary singularities of the family with torus zeros).
    boundary_singular: usize,
}

const TORUS_CHECK_GRID: usize = 64;
const INNER_TOL: f64 = 1e-8;

impl RationalInner {
    /// Validates and builds the function. Checks: `m` is a monomial with
    /// unimodular coefficient, `p(0,0) != 0`, `p` has no zero on an interior
    /// validation grid, and `|m p~ / p| = 1` within 1e-8 on a 64x64 torus
    /// grid (points with |p| below threshold are skipped and counted).
    pub fn new(m: Poly, p: Poly, profile: DegreeProfile) -> Result<RationalInner> {
        if m.nvars() != 2 || p.nvars() != 2 || profile.len() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: m.nvars().max(p.nvars()).max(profile.len()),
            });
        }
        let (m_exp, m_coeff) = m.trim().as_monomial().ok_or(Error::NotMonomial)?;
        let modulus = m_coeff.norm();
        if (modulus - 1.0).abs() > 1e-12 {
            return Err(Error::NotUnimodular { modulus });
        }
        let p = p.trim();
        if p.coeff(&[0, 0]) == Complex64::new(0.0, 0.0) {
            return Err(Error::ConstantTermZero);
        }
        let p_reflected = p.reflect(&profile)?;
        let numer = m.mul(&p_reflected)?;
        let scale = p.coeff_norm1().max(1.0);

        // Interior validation grid for the nonvanishing requirement.
        let radii = [0.0, 0.3, 0.6, 0.85, 0.95];
        let phases = 32;
        let mut min_abs = f64::INFINITY;
        let mut argmin = Complex64::new(0.0, 0.0);
        for &r1 in &radii {
            for j1 in 0..phases {
                let z1 = torus_point(j1, phases) * r1;
                for &r2 in &radii {
                    for j2 in 0..phases {
                        let z2 = torus_point(j2, phases) * r2;
                        let v = p.eval(&[z1, z2]).unwrap().norm();
                        if v < min_abs {
                            min_abs = v;
                            argmin = z1;
                        }
                        if r2 == 0.0 {
                            break;
                        }
                    }
                }
                if r1 == 0.0 {
                    break;
                }
            }
        }
        if min_abs < 1e-8 * scale {
            return Err(Error::DenominatorZero {
                re: argmin.re,
                im: argmin.im,
                min_abs,
            });
        }

        // Inner check on the torus: |m p~| = |p| there, so the deviation is
        // pure round-off unless the input is malformed.
        let mut boundary_singular = 0usize;
        let mut max_dev = 0.0f64;
        for j1 in 0..TORUS_CHECK_GRID {
            let z1 = torus_point(j1, TORUS_CHECK_GRID);
            for j2 in 0..TORUS_CHECK_GRID {
                let z2 = torus_point(j2, TORUS_CHECK_GRID);
                let denom = p.eval(&[z1, z2]).unwrap().norm();
                if denom < 1e-8 * scale {
                    boundary_singular += 1;
                    continue;
                }
                let num = numer.eval(&[z1, z2]).unwrap().norm();
                max_dev = max_dev.max((num / denom - 1.0).abs());
            }
        }
        if max_dev > INNER_TOL {
            return Err(Error::NotInner { max_dev });
        }

        let k = (m_exp[0] + profile.0[0], m_exp[1] + profile.0[1]);
        Ok(RationalInner {
            m,
            p,
            p_reflected,
            numer,
            profile,
            k,
            boundary_singular,
        })
    }

    pub fn eval(&self, z: &Point2) -> Result<Complex64> {
        let den = self.p.eval(&z[..])?;
        if den.norm() == 0.0 {
            return Err(Error::InvalidInput(
                "evaluation at a zero of the denominator".into(),
            ));
        }
        Ok(self.numer.eval(&z[..])? / den)
    }

    pub fn degree(&self) -> (usize, usize) {
        self.k
    }

    pub fn monomial_part(&self) -> &Poly {
        &self.m
    }

    pub fn denominator(&self) -> &Poly {
        &self.p
    }

    pub fn reflected_denominator(&self) -> &Poly {
        &self.p_reflected
    }

    /// Numerator `m * p~`.
    pub fn numerator(&self) -> &Poly {
        &self.numer
    }

    pub fn profile(&self) -> &DegreeProfile {
        &self.profile
    }

    pub fn boundary_singular_points(&self) -> usize {
        self.boundary_singular
    }

    pub fn to_fn(&self) -> ScalarFn {
        ScalarFn::Inner(self.clone())
    }
}

/// Hermitian PSD matrix over a monomial basis, divided by a denominator:
/// `K(z, w) = e(z)^T A conj(e(w)) / (p(z) conj(p(w)))`.
#[derive(Debug, Clone)]
pub struct GramKernel {
    basis: Vec<(usize, usize)>,
    matrix: HermMatrix,
    denom: Poly,
}

impl GramKernel {
    pub fn new(basis: Vec<(usize, usize)>, matrix: HermMatrix, denom: Poly) -> Result<Self> {
        if matrix.dim() != basis.len() {
            return Err(Error::ShapeMismatch(format!(
                "basis of {} monomials with a {}x{} matrix",
                basis.len(),
                matrix.dim(),
                matrix.dim()
            )));
        }
        Ok(GramKernel {
            basis,
            matrix,
            denom,
        })
    }

    pub fn basis(&self) -> &[(usize, usize)] {
        &self.basis
    }

    pub fn matrix(&self) -> &HermMatrix {
        &self.matrix
    }

    pub fn denominator(&self) -> &Poly {
        &self.denom
    }

    fn monomials_at(&self, z: &Point2) -> Vec<Complex64> {
        self.basis
            .iter()
            .map(|&(a, b)| z[0].powu(a as u32) * z[1].powu(b as u32))
            .collect()
    }

    pub fn eval(&self, z: &Point2, w: &Point2) -> Result<Complex64> {
        if self.basis.is_empty() {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let ez = self.monomials_at(z);
        let ew = self.monomials_at(w);
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, zi) in ez.iter().enumerate() {
            for (j, wj) in ew.iter().enumerate() {
                acc += zi * self.matrix.get(i, j) * wj.conj();
            }
        }
        let pz = self.denom.eval(&z[..])?;
        let pw = self.denom.eval(&w[..])?;
        Ok(acc / (pz * pw.conj()))
    }

    /// Count of eigenvalues above `tol * max(1, lambda_max)`.
    pub fn numerical_rank(&self, tol: f64) -> Result<usize> {
        if self.matrix.dim() == 0 {
            return Ok(0);
        }
        let eig = hermitian_eig(&self.matrix)?;
        let cut = tol * eig.max().max(1.0);
        Ok(eig.values.iter().filter(|&&l| l > cut).count())
    }
}

#[derive(Debug, Clone)]
pub struct DecomposeCertificate {
    pub residual_max: f64,
    pub points_used: usize,
    pub min_eig_k1: f64,
    pub min_eig_k2: f64,
    pub rank_k1: usize,
    pub rank_k2: usize,
}

/// A decomposition pair: `1 - phi(z) conj(phi(w)) =
/// (1 - z1 conj(w1)) K2 + (1 - z2 conj(w2)) K1`, with its certificate.
#[derive(Debug, Clone)]
pub struct AglerPair {
    pub k1: GramKernel,
    pub k2: GramKernel,
    pub certificate: DecomposeCertificate,
}

impl AglerPair {
    pub fn kernel_exprs(&self) -> (KernelExpr, KernelExpr) {
        (
            KernelExpr::Gram(self.k1.clone()),
            KernelExpr::Gram(self.k2.clone()),
        )
    }
}

#[derive(Debug, Clone)]
pub struct DecomposeConfig {
    pub solver: SolverConfig,
    /// Relative eigenvalue cutoff for numerical ranks and SOS extraction.
    pub rank_tol: f64,
    /// Random (z, w) pairs used for the certificate residual.
    pub cert_pairs: usize,
    pub cert_seed: u64,
    /// Certificate acceptance threshold on the sampled residual.
    pub residual_limit: f64,
}

impl Default for DecomposeConfig {
    fn default() -> Self {
        DecomposeConfig {
            solver: SolverConfig::default(),
            rank_tol: 1e-7,
            cert_pairs: 200,
            cert_seed: DEFAULT_SEED,
            residual_limit: 1e-6,
        }
    }
}

fn basis_k1(k1: usize, k2: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for a in 0..=k1 {
        for b in 0..k2 {
            out.push((a, b));
        }
    }
    out
}

fn basis_k2(k1: usize, k2: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for a in 0..k1 {
        for b in 0..=k2 {
            out.push((a, b));
        }
    }
    out
}

/// Coefficient-matching system for the decomposition of `phi`: matching
/// `p(z) conj(p(w)) - (m p~)(z) conj((m p~)(w))` against
/// `(1 - z1 conj(w1)) e2^T A2 conj(e2) + (1 - z2 conj(w2)) e1^T A1 conj(e1)`
/// cell by cell. Unknown 0 is `A1`, unknown 1 is `A2`; one equation per
/// conjugate pair of cells.
pub fn coefficient_system(phi: &RationalInner) -> (AffineConstraintSet, Vec<usize>) {
    let (k1, k2) = phi.degree();
    let e1 = basis_k1(k1, k2);
    let e2 = basis_k2(k1, k2);
    let e1_idx = |a: usize, b: usize| a * k2 + b;
    let e2_idx = |a: usize, b: usize| a * (k2 + 1) + b;

    let cells: Vec<(usize, usize)> = {
        let mut v = Vec::new();
        for a in 0..=k1 {
            for b in 0..=k2 {
                v.push((a, b));
            }
        }
        v
    };
    let p = phi.denominator();
    let numer = phi.numerator();
    let coeff = |q: &Poly, c: (usize, usize)| q.coeff(&[c.0, c.1]);

    let mut cs = AffineConstraintSet::new();
    for (ai, &ca) in cells.iter().enumerate() {
        for &cb in cells.iter().skip(ai) {
            let target =
                coeff(p, ca) * coeff(p, cb).conj() - coeff(numer, ca) * coeff(numer, cb).conj();
            let mut terms = Vec::new();
            // (1 - z1 conj(w1)) * A2 block.
            if ca.0 < k1 && cb.0 < k1 {
                terms.push(Term {
                    unknown: 1,
                    row: e2_idx(ca.0, ca.1),
                    col: e2_idx(cb.0, cb.1),
                    weight: Complex64::new(1.0, 0.0),
                });
            }
            if ca.0 >= 1 && cb.0 >= 1 {
                terms.push(Term {
                    unknown: 1,
                    row: e2_idx(ca.0 - 1, ca.1),
                    col: e2_idx(cb.0 - 1, cb.1),
                    weight: Complex64::new(-1.0, 0.0),
                });
            }
            // (1 - z2 conj(w2)) * A1 block.
            if ca.1 < k2 && cb.1 < k2 {
                terms.push(Term {
                    unknown: 0,
                    row: e1_idx(ca.0, ca.1),
                    col: e1_idx(cb.0, cb.1),
                    weight: Complex64::new(1.0, 0.0),
                });
            }
            if ca.1 >= 1 && cb.1 >= 1 {
                terms.push(Term {
                    unknown: 0,
                    row: e1_idx(ca.0, ca.1 - 1),
                    col: e1_idx(cb.0, cb.1 - 1),
                    weight: Complex64::new(-1.0, 0.0),
                });
            }
            cs.push(terms, target);
        }
    }
    (cs, vec![e1.len(), e2.len()])
}

/// Solves the coefficient system for a PSD pair and certifies it on sampled
/// point pairs. A solver stall is surfaced as an error (existence is
/// guaranteed, so stalling is a numerical failure, not a mathematical one);
/// the stalled iterate remains reachable through the solver API.
pub fn decompose(phi: &RationalInner, cfg: &DecomposeConfig) -> Result<AglerPair> {
    let (k1, k2) = phi.degree();
    let e1 = basis_k1(k1, k2);
    let e2 = basis_k2(k1, k2);

    let (a1, a2) = if k1 == 0 && k2 == 0 {
        (HermMatrix::zeros(0), HermMatrix::zeros(0))
    } else {
        let (cs, sizes) = coefficient_system(phi);
        let res = affine_psd_feasibility(&cs, &sizes, &cfg.solver)?;
        if res.status != FeasStatus::Feasible {
            return Err(Error::SolverStalled {
                iterations: res.iterations,
                affine_residual: res.affine_residual,
                min_eig: res.min_eig,
            });
        }
        let mut it = res.solution.into_iter();
        (it.next().unwrap(), it.next().unwrap())
    };

    let g1 = GramKernel::new(e1, a1, phi.denominator().clone())?;
    let g2 = GramKernel::new(e2, a2, phi.denominator().clone())?;

    let pairs = bidisk_pairs(cfg.cert_pairs, cfg.cert_seed);
    let residual_max = residual_on_pairs(
        &phi.to_fn(),
        &KernelExpr::Gram(g1.clone()),
        &KernelExpr::Gram(g2.clone()),
        &pairs,
    )?;
    if residual_max > cfg.residual_limit {
        return Err(Error::CertificateFailed {
            residual: residual_max,
            limit: cfg.residual_limit,
        });
    }
    let min_eig = |g: &GramKernel| -> Result<f64> {
        if g.matrix().dim() == 0 {
            Ok(0.0)
        } else {
            Ok(hermitian_eig(g.matrix())?.min())
        }
    };
    let certificate = DecomposeCertificate {
        residual_max,
        points_used: pairs.len(),
        min_eig_k1: min_eig(&g1)?,
        min_eig_k2: min_eig(&g2)?,
        rank_k1: g1.numerical_rank(cfg.rank_tol)?,
        rank_k2: g2.numerical_rank(cfg.rank_tol)?,
    };
    Ok(AglerPair {
        k1: g1,
        k2: g2,
        certificate,
    })
}

/// Eigen-factors the Gram matrix into polynomials `q_i` with
/// `K = sum_i q_i(z) conj(q_i(w)) / (p(z) conj(p(w)))`; the count is the
/// numerical rank at `rank_tol`.
pub fn extract_sos(g: &GramKernel, rank_tol: f64) -> Result<Vec<Poly>> {
    let n = g.matrix().dim();
    if n == 0 {
        return Ok(vec![]);
    }
    let eig = hermitian_eig(g.matrix())?;
    let cut = rank_tol * eig.max().max(1.0);
    let mut out = Vec::new();
    for (k, &lam) in eig.values.iter().enumerate() {
        if lam <= cut {
            continue;
        }
        let s = lam.sqrt();
        let mut terms: Vec<(Vec<usize>, Complex64)> = Vec::new();
        for (j, &(a, b)) in g.basis().iter().enumerate() {
            let c = eig.vectors.get(j, k) * s;
            if c != Complex64::new(0.0, 0.0) {
                terms.push((vec![a, b], c));
            }
        }
        let term_refs: Vec<(&[usize], Complex64)> =
            terms.iter().map(|(e, c)| (e.as_slice(), *c)).collect();
        out.push(Poly::from_terms(2, &term_refs)?);
    }
    Ok(out)
}

/// The explicit family `p = 3 - z1^k1 - z2^k2 - z1^k1 z2^k2`, whose torus
/// zeros form the full roots-of-unity grid; its decomposition is unique.
pub fn make_unique_example(k1: usize, k2: usize) -> Result<RationalInner> {
    if k1 == 0 || k2 == 0 {
        return Err(Error::InvalidInput("degrees must be at least 1".into()));
    }
    let re = |x: f64| Complex64::new(x, 0.0);
    let p = Poly::from_terms(
        2,
        &[
            (&[0, 0], re(3.0)),
            (&[k1, 0], re(-1.0)),
            (&[0, k2], re(-1.0)),
            (&[k1, k2], re(-1.0)),
        ],
    )?;
    RationalInner::new(
        Poly::constant(2, re(1.0)),
        p,
        DegreeProfile::new(vec![k1, k2]),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UniquenessVerdict {
    Unique,
    NotUnique,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UniquenessMethod {
    /// Degree zero in one variable forces a single decomposition.
    OneVariableRule,
    /// Stable denominator: the function is continuous on the closed bidisk
    /// and genuinely two-variable, so the decomposition cannot be unique.
    StableDenominator,
    /// Vanishing constraints at located torus zeros; a trivial nullspace
    /// certifies uniqueness.
    TorusZeroNullspace,
}

#[derive(Debug, Clone)]
pub struct UniquenessReport {
    pub verdict: UniquenessVerdict,
    pub method: UniquenessMethod,
    /// Dimension of the candidate obstruction space after the vanishing
    /// constraints (zero exactly when the verdict is Unique via nullspace).
    pub nullity: usize,
    /// Polynomials spanning the candidate obstruction space.
    pub basis_of_l: Vec<Poly>,
    /// Torus zeros used for the constraints.
    pub torus_zeros: Vec<Point2>,
    pub diagnostics: Option<String>,
}

#[derive(Debug, Clone)]
pub struct UniquenessConfig {
    /// Phase resolution of the coarse torus scan.
    pub torus_grid: usize,
    pub refine_iters: usize,
    /// |p| acceptance threshold after refinement.
    pub zero_tol: f64,
    /// Relative eigenvalue cutoff for the nullspace dimension.
    pub nullspace_tol: f64,
    pub stability: StabilityConfig,
}

impl Default for UniquenessConfig {
    fn default() -> Self {
        UniquenessConfig {
            torus_grid: 256,
            refine_iters: 50,
            zero_tol: 1e-10,
            nullspace_tol: 1e-8,
            stability: StabilityConfig::default(),
        }
    }
}

/// Newton iteration for `p(e^{i t1}, e^{i t2}) = 0` in the two phase angles.
fn refine_torus_zero(
    p: &Poly,
    grads: &(Poly, Poly),
    start: (f64, f64),
    iters: usize,
    ) -> (Point2, f64) {
    let mut t = start;
    let point = |t: (f64, f64)| -> Point2 {
        [
            Complex64::new(t.0.cos(), t.0.sin()),
            Complex64::new(t.1.cos(), t.1.sin()),
        ]
    };
    let mut z = point(t);
    let mut best = p.eval(&z).unwrap().norm();
    let mut best_t = t;
    for _ in 0..iters {
        if best < 1e-15 {
            break;
        }
        let g = p.eval(&z).unwrap();
        let d1 = grads.0.eval(&z).unwrap() * Complex64::new(0.0, 1.0) * z[0];
        let d2 = grads.1.eval(&z).unwrap() * Complex64::new(0.0, 1.0) * z[1];
        let det = d1.re * d2.im - d2.re * d1.im;
        if det.abs() < 1e-300 {
            break;
        }
        let s1 = (-g.re * d2.im + d2.re * g.im) / det;
        let s2 = (-d1.re * g.im + g.re * d1.im) / det;
        t = (t.0 + s1, t.1 + s2);
        z = point(t);
        let v = p.eval(&z).unwrap().norm();
        if v < best {
            best = v;
            best_t = t;
        } else {
            break;
        }
    }
    (point(best_t), best)
}

/// Coarse torus scan followed by Newton refinement; zeros accepted when |p|
/// drops below `zero_tol`, deduplicated by distance.
pub fn locate_torus_zeros(p: &Poly, cfg: &UniquenessConfig) -> Vec<Point2> {
    let n = cfg.torus_grid;
    let lip = crate::stability::lipschitz_bound(p);
    let spacing = 2.0 * (std::f64::consts::PI / (n as f64)).sin();
    let promote = (lip * spacing * 1.25).max(cfg.zero_tol * 10.0);

    let mut candidates: Vec<(f64, (f64, f64))> = Vec::new();
    for j1 in 0..n {
        let t1 = 2.0 * std::f64::consts::PI * (j1 as f64) / (n as f64);
        let z1 = Complex64::new(t1.cos(), t1.sin());
        for j2 in 0..n {
            let t2 = 2.0 * std::f64::consts::PI * (j2 as f64) / (n as f64);
            let z2 = Complex64::new(t2.cos(), t2.sin());
            let v = p.eval(&[z1, z2]).unwrap().norm();
            if v <= promote {
                candidates.push((v, (t1, t2)));
            }
        }
    }
    candidates.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    candidates.truncate(256);

    let grads = (p.partial_derivative(0), p.partial_derivative(1));
    let mut zeros: Vec<Point2> = Vec::new();
    for (_, t) in candidates {
        let (z, v) = refine_torus_zero(p, &grads, t, cfg.refine_iters);
        if v >= cfg.zero_tol {
            continue;
        }
        let dup = zeros
            .iter()
            .any(|q| (q[0] - z[0]).norm() + (q[1] - z[1]).norm() < 1e-6);
        if !dup {
            zeros.push(z);
        }
    }
    zeros
}

fn monomial_basis(k1: usize, k2: usize) -> Vec<Poly> {
    let mut out = Vec::new();
    for a in 0..k1 {
        for b in 0..k2 {
            out.push(Poly::monomial(2, &[a, b], Complex64::new(1.0, 0.0)).unwrap());
        }
    }
    out
}

/// Decides uniqueness of the decomposition.
///
/// Degree zero in a variable forces uniqueness outright. A stable
/// denominator makes the function continuous on the closed bidisk, where a
/// genuinely two-variable function never has a unique decomposition.
/// Otherwise candidate obstructions are polynomials of bidegree below
/// `(k1, k2)` constrained to vanish at the located torus zeros: a trivial
/// nullspace certifies uniqueness, while a nonzero one stays Unknown (a
/// nonzero candidate is necessary but not sufficient; whether it survives
/// depends on integrability of `1/|p|^2` near the zeros, which is not
/// decided numerically).
pub fn uniqueness_test(phi: &RationalInner, cfg: &UniquenessConfig) -> Result<UniquenessReport> {
    let (k1, k2) = phi.degree();
    if k1 == 0 || k2 == 0 {
        return Ok(UniquenessReport {
            verdict: UniquenessVerdict::Unique,
            method: UniquenessMethod::OneVariableRule,
            nullity: 0,
            basis_of_l: vec![],
            torus_zeros: vec![],
            diagnostics: None,
        });
    }

    let cert = is_stable(phi.denominator(), &cfg.stability)?;
    if cert.stable {
        return Ok(UniquenessReport {
            verdict: UniquenessVerdict::NotUnique,
            method: UniquenessMethod::StableDenominator,
            nullity: k1 * k2,
            basis_of_l: monomial_basis(k1, k2),
            torus_zeros: vec![],
            diagnostics: None,
        });
    }

    let zeros = locate_torus_zeros(phi.denominator(), cfg);
    if zeros.is_empty() {
        return Ok(UniquenessReport {
            verdict: UniquenessVerdict::Unknown,
            method: UniquenessMethod::TorusZeroNullspace,
            nullity: k1 * k2,
            basis_of_l: monomial_basis(k1, k2),
            torus_zeros: vec![],
            diagnostics: Some(
                "denominator not certified stable, yet no torus zeros were located".into(),
            ),
        });
    }

    // Vanishing constraints: rows are zeros, columns are monomials of
    // bidegree < (k1, k2).
    let cols = k1 * k2;
    let col_exp = |c: usize| (c / k2, c % k2);
    let gram = HermMatrix::from_fn(cols, |c1, c2| {
        let (a1, b1) = col_exp(c1);
        let (a2, b2) = col_exp(c2);
        zeros
            .iter()
            .map(|z| {
                let m1 = z[0].powu(a1 as u32) * z[1].powu(b1 as u32);
                let m2 = z[0].powu(a2 as u32) * z[1].powu(b2 as u32);
                m1.conj() * m2
            })
            .sum()
    })?;
    let eig = hermitian_eig(&gram)?;
    let cut = cfg.nullspace_tol * eig.max().max(1.0);
    let nullity = eig.values.iter().filter(|&&l| l < cut).count();

    if nullity == 0 {
        return Ok(UniquenessReport {
            verdict: UniquenessVerdict::Unique,
            method: UniquenessMethod::TorusZeroNullspace,
            nullity: 0,
            basis_of_l: vec![],
            torus_zeros: zeros,
            diagnostics: None,
        });
    }

    let mut basis = Vec::new();
    for k in (cols - nullity)..cols {
        let mut terms: Vec<(Vec<usize>, Complex64)> = Vec::new();
        for c in 0..cols {
            let (a, b) = col_exp(c);
            let v = eig.vectors.get(c, k);
            if v.norm() > 1e-12 {
                terms.push((vec![a, b], v));
            }
        }
        let term_refs: Vec<(&[usize], Complex64)> =
            terms.iter().map(|(e, c)| (e.as_slice(), *c)).collect();
        basis.push(Poly::from_terms(2, &term_refs)?);
    }
    Ok(UniquenessReport {
        verdict: UniquenessVerdict::Unknown,
        method: UniquenessMethod::TorusZeroNullspace,
        nullity,
        basis_of_l: basis,
        torus_zeros: zeros,
        diagnostics: Some(
            "nonzero vanishing nullspace: a candidate obstruction exists but integrability \
             near the zeros is not decided numerically"
                .into(),
        ),
    })
}

#[derive(Debug, Clone)]
pub struct SupportReport {
    /// Largest forbidden-region coefficient modulus, per shift axis.
    pub max_forbidden: [f64; 2],
    pub truncation: [usize; 2],
    pub tol: f64,
    pub pass: bool,
}

/// Truncated-series support check: for continuous (stable-denominator)
/// inner functions, `p * (X_1 phi)` must have no coefficients with
/// `n1 >= k1`, and `p * (X_2 phi)` none with `n2 >= k2`.
pub fn support_check(
    phi: &RationalInner,
    truncation: [usize; 2],
    tol: f64,
    stability_cfg: &StabilityConfig,
) -> Result<SupportReport> {
    let (k1, k2) = phi.degree();
    if truncation[0] < k1 + 2 || truncation[1] < k2 + 2 {
        return Err(Error::InvalidInput(format!(
            "truncation {:?} too small for degree ({k1}, {k2}); need componentwise >= (k1+2, k2+2)",
            truncation
        )));
    }
    let cert = is_stable(phi.denominator(), stability_cfg)?;
    if !cert.stable {
        return Err(Error::NotStable);
    }

    let inv = crate::poly::series_inverse(phi.denominator(), &truncation)?;
    let phi_series = inv.mul_poly(phi.numerator())?;

    let mut max_forbidden = [0.0f64; 2];
    for axis in 0..2 {
        let shifted = phi_series.backward_shift(axis)?;
        let prod = shifted.mul_poly(phi.denominator())?;
        let k_axis = if axis == 0 { k1 } else { k2 };
        let trunc = prod.truncation().to_vec();
        let mut idx = vec![0usize; 2];
        let mut worst = 0.0f64;
        loop {
            if idx[axis] >= k_axis {
                worst = worst.max(prod.coeff(&idx).norm());
            }
            if !next_index(&mut idx, &trunc) {
                break;
            }
        }
        max_forbidden[axis] = worst;
    }
    Ok(SupportReport {
        max_forbidden,
        truncation,
        tol,
        pass: max_forbidden[0] <= tol && max_forbidden[1] <= tol,
    })
}

/// Reconstructs a grid of the function's Taylor coefficients (used by tests
/// and diagnostics).
pub fn taylor_grid(phi: &RationalInner, truncation: &[usize]) -> Result<CoeffGrid> {
    let inv = crate::poly::series_inverse(phi.denominator(), truncation)?;
    inv.mul_poly(phi.numerator())
}
