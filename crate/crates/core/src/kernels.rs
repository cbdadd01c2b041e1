//! Kernel calculus on the bidisk: evaluation of decomposition kernels,
//! sampled positivity certificates, containment tests, blending of
//! decompositions, and the commuting-contraction norm check.
//!
//! Positivity on all of the bidisk is not finitely checkable; everything
//! here certifies on sampled Gram matrices. A failed sample disproves
//! positivity, a passing one is evidence (exact certificates come from the
//! Gram matrices produced by the decomposition solver).

use num_complex::Complex64;

use crate::decompose::{GramKernel, RationalInner};
use crate::error::{Error, Result};
use crate::points::Point2;
use crate::sdpcore::{hermitian_eig, spectral_norm, CMatrix, HermMatrix};

/// A scalar holomorphic function on the bidisk: a polynomial or a rational
/// inner function.
#[derive(Debug, Clone)]
pub enum ScalarFn {
    Poly(crate::poly::Poly),
    Inner(RationalInner),
}

impl ScalarFn {
    pub fn eval(&self, z: &Point2) -> Result<Complex64> {
        match self {
            ScalarFn::Poly(p) => p.eval(&z[..]),
            ScalarFn::Inner(phi) => phi.eval(z),
        }
    }
}

impl From<RationalInner> for ScalarFn {
    fn from(phi: RationalInner) -> Self {
        ScalarFn::Inner(phi)
    }
}

impl From<crate::poly::Poly> for ScalarFn {
    fn from(p: crate::poly::Poly) -> Self {
        ScalarFn::Poly(p)
    }
}

/// Closed algebra of Hermitian kernels on the bidisk. Every constructor
/// preserves the symmetry `K(z, w) = conj(K(w, z))`: atoms are Hermitian and
/// combinations use real coefficients only.
#[derive(Debug, Clone)]
pub enum KernelExpr {
    /// Constant real kernel.
    Constant(f64),
    /// `(1 - f(z) conj(f(w))) / ((1 - z1 conj(w1)) (1 - z2 conj(w2)))`.
    SchurKernel(ScalarFn),
    /// Gram-matrix kernel over a monomial basis divided by its denominator.
    Gram(GramKernel),
    /// Rank one: `f(z) conj(f(w))`.
    RankOne(ScalarFn),
    /// `inner(z, w) / (1 - z_axis conj(w_axis))`.
    SzegoScaled { inner: Box<KernelExpr>, axis: usize },
    /// Real affine combination.
    Affine(Vec<(f64, KernelExpr)>),
}

impl KernelExpr {
    /// Szego kernel in one coordinate.
    pub fn szego(axis: usize) -> KernelExpr {
        KernelExpr::SzegoScaled {
            inner: Box::new(KernelExpr::Constant(1.0)),
            axis,
        }
    }

    pub fn kphi(f: impl Into<ScalarFn>) -> KernelExpr {
        KernelExpr::SchurKernel(f.into())
    }

    pub fn eval(&self, z: &Point2, w: &Point2) -> Result<Complex64> {
        let one = Complex64::new(1.0, 0.0);
        match self {
            KernelExpr::Constant(c) => Ok(Complex64::new(*c, 0.0)),
            KernelExpr::SchurKernel(f) => {
                let num = one - f.eval(z)? * f.eval(w)?.conj();
                let den = (one - z[0] * w[0].conj()) * (one - z[1] * w[1].conj());
                Ok(num / den)
            }
            KernelExpr::Gram(g) => g.eval(z, w),
            KernelExpr::RankOne(f) => Ok(f.eval(z)? * f.eval(w)?.conj()),
            KernelExpr::SzegoScaled { inner, axis } => {
                let den = one - z[*axis] * w[*axis].conj();
                Ok(inner.eval(z, w)? / den)
            }
            KernelExpr::Affine(parts) => {
                let mut acc = Complex64::new(0.0, 0.0);
                for (c, k) in parts {
                    acc += k.eval(z, w)? * *c;
                }
                Ok(acc)
            }
        }
    }

    /// Largest Hermitian-symmetry defect over the sampled points.
    pub fn hermitian_defect(&self, points: &[Point2]) -> Result<f64> {
        let mut worst = 0.0f64;
        for z in points {
            for w in points {
                let a = self.eval(z, w)?;
                let b = self.eval(w, z)?;
                worst = worst.max((a - b.conj()).norm());
            }
        }
        Ok(worst)
    }
}

fn check_in_bidisk(points: &[Point2]) -> Result<()> {
    for p in points {
        for (axis, c) in p.iter().enumerate() {
            if c.norm() >= 1.0 {
                return Err(Error::PointOutsideDomain {
                    axis,
                    modulus: c.norm(),
                });
            }
        }
    }
    Ok(())
}

/// Decomposition kernel of a Schur-class function:
/// `(1 - phi(z) conj(phi(w))) / ((1 - z1 conj(w1)) (1 - z2 conj(w2)))`.
pub fn kphi_eval(phi: &ScalarFn, z: &Point2, w: &Point2) -> Result<Complex64> {
    check_in_bidisk(std::slice::from_ref(z))?;
    check_in_bidisk(std::slice::from_ref(w))?;
    KernelExpr::SchurKernel(phi.clone()).eval(z, w)
}

/// Max deviation from the decomposition identity over all ordered pairs of
/// the supplied points:
/// `1 - phi(z) conj(phi(w)) - (1 - z1 conj(w1)) K2 - (1 - z2 conj(w2)) K1`.
pub fn agler_residual(
    phi: &ScalarFn,
    k1: &KernelExpr,
    k2: &KernelExpr,
    points: &[Point2],
) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::InvalidInput("need at least one point".into()));
    }
    check_in_bidisk(points)?;
    let mut worst = 0.0f64;
    for z in points {
        for w in points {
            worst = worst.max(pair_residual(phi, k1, k2, z, w)?);
        }
    }
    Ok(worst)
}

/// Same identity evaluated on explicit (z, w) pairs.
pub fn residual_on_pairs(
    phi: &ScalarFn,
    k1: &KernelExpr,
    k2: &KernelExpr,
    pairs: &[(Point2, Point2)],
) -> Result<f64> {
    let mut worst = 0.0f64;
    for (z, w) in pairs {
        check_in_bidisk(std::slice::from_ref(z))?;
        check_in_bidisk(std::slice::from_ref(w))?;
        worst = worst.max(pair_residual(phi, k1, k2, z, w)?);
    }
    Ok(worst)
}

fn pair_residual(
    phi: &ScalarFn,
    k1: &KernelExpr,
    k2: &KernelExpr,
    z: &Point2,
    w: &Point2,
) -> Result<f64> {
    let one = Complex64::new(1.0, 0.0);
    let lhs = one - phi.eval(z)? * phi.eval(w)?.conj();
    let rhs = (one - z[0] * w[0].conj()) * k2.eval(z, w)?
        + (one - z[1] * w[1].conj()) * k1.eval(z, w)?;
    Ok((lhs - rhs).norm())
}

/// Finite section of a kernel on a point set.
#[derive(Debug, Clone)]
pub struct SampledKernel {
    pub points: Vec<Point2>,
    pub gram: HermMatrix,
}

impl SampledKernel {
    /// Samples the kernel into a Gram matrix. The sampled matrix of a
    /// Hermitian kernel is Hermitian up to round-off; construction rejects
    /// anything worse than 1e-12 (relative) and symmetrizes the rest.
    pub fn build(kernel: &KernelExpr, points: &[Point2]) -> Result<SampledKernel> {
        check_in_bidisk(points)?;
        let n = points.len();
        for i in 0..n {
            for j in (i + 1)..n {
                let d = (points[i][0] - points[j][0]).norm() + (points[i][1] - points[j][1]).norm();
                if d == 0.0 {
                    return Err(Error::InvalidInput(format!(
                        "points {i} and {j} coincide"
                    )));
                }
            }
        }
        let mut raw = CMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                raw.set(i, j, kernel.eval(&points[i], &points[j])?);
            }
        }
        let scale = 1.0 + raw.frobenius_norm();
        let defect = HermMatrix::hermitian_defect(&raw);
        if defect > 1e-12 * scale {
            return Err(Error::InvalidInput(format!(
                "sampled kernel is not Hermitian (defect {defect:.3e})"
            )));
        }
        Ok(SampledKernel {
            points: points.to_vec(),
            gram: HermMatrix::from_matrix(&raw)?,
        })
    }
}

#[derive(Debug, Clone, Copy)]
pub struct PsdCheck {
    pub psd: bool,
    pub min_eig: f64,
}

/// Eigenvalue floor of the sampled Gram matrix; `psd` when it clears `-tol`.
pub fn sample_psd_check(kernel: &KernelExpr, points: &[Point2], tol: f64) -> Result<PsdCheck> {
    let sampled = SampledKernel::build(kernel, points)?;
    let eig = hermitian_eig(&sampled.gram)?;
    let min_eig = eig.min();
    Ok(PsdCheck {
        psd: min_eig >= -tol,
        min_eig,
    })
}

/// Sampled test of `K2 - (1/b^2) K1` being a positive kernel (the
/// contractive-containment criterion). `false` disproves containment on
/// these samples; `true` is supporting evidence only.
pub fn containment_test(
    k1: &KernelExpr,
    k2: &KernelExpr,
    b: f64,
    points: &[Point2],
    tol: f64,
) -> Result<bool> {
    if b <= 0.0 {
        return Err(Error::InvalidInput("containment bound must be positive".into()));
    }
    let diff = KernelExpr::Affine(vec![(1.0, k2.clone()), (-1.0 / (b * b), k1.clone())]);
    Ok(sample_psd_check(&diff, points, tol)?.psd)
}

/// Blends decompositions of `phi + f` and `phi - f` into a decomposition of
/// `phi`: averages the pairs and adds the rank-one correction split by
/// `t` between the two slots.
pub fn blend_decompositions(
    k_pair: (&KernelExpr, &KernelExpr),
    l_pair: (&KernelExpr, &KernelExpr),
    f: &ScalarFn,
    t: f64,
) -> Result<(KernelExpr, KernelExpr)> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidBlend { t });
    }
    let rank_one = KernelExpr::RankOne(f.clone());
    let k1 = KernelExpr::Affine(vec![
        (0.5, k_pair.0.clone()),
        (0.5, l_pair.0.clone()),
        (
            1.0 - t,
            KernelExpr::SzegoScaled {
                inner: Box::new(rank_one.clone()),
                axis: 1,
            },
        ),
    ]);
    let k2 = KernelExpr::Affine(vec![
        (0.5, k_pair.1.clone()),
        (0.5, l_pair.1.clone()),
        (
            t,
            KernelExpr::SzegoScaled {
                inner: Box::new(rank_one),
                axis: 0,
            },
        ),
    ]);
    Ok((k1, k2))
}

#[derive(Debug, Clone, Copy)]
pub struct AndoReport {
    pub norm: f64,
    pub ok: bool,
}

/// Spectral norm of `p(T1, T2)` for a commuting pair of contractions.
/// The commutation and contraction preconditions are enforced at `tol`;
/// the caller asserts that `p` maps the bidisk into the closed unit disk.
pub fn ando_check(
    p: &crate::poly::Poly,
    t1: &CMatrix,
    t2: &CMatrix,
    tol: f64,
) -> Result<AndoReport> {
    if !t1.is_square() || !t2.is_square() || t1.rows() != t2.rows() {
        return Err(Error::ShapeMismatch(format!(
            "{}x{} vs {}x{}",
            t1.rows(),
            t1.cols(),
            t2.rows(),
            t2.cols()
        )));
    }
    if p.nvars() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: p.nvars(),
        });
    }
    let comm = t1.commutator_norm(t2)?;
    if comm > tol {
        return Err(Error::NonCommuting { norm: comm, tol });
    }
    for t in [t1, t2] {
        let norm = spectral_norm(t)?;
        if norm > 1.0 + tol {
            return Err(Error::NotContraction { norm, tol });
        }
    }

    let n = t1.rows();
    let (d1, d2) = (p.degrees()[0], p.degrees()[1]);
    let mut pow1 = Vec::with_capacity(d1 + 1);
    pow1.push(CMatrix::identity(n));
    for _ in 0..d1 {
        pow1.push(pow1.last().unwrap().mul(t1)?);
    }
    let mut pow2 = Vec::with_capacity(d2 + 1);
    pow2.push(CMatrix::identity(n));
    for _ in 0..d2 {
        pow2.push(pow2.last().unwrap().mul(t2)?);
    }
    let mut acc = CMatrix::zeros(n, n);
    for a in 0..=d1 {
        for b in 0..=d2 {
            let c = p.coeff(&[a, b]);
            if c != Complex64::new(0.0, 0.0) {
                acc = acc.add(&pow1[a].mul(&pow2[b])?.scale(c))?;
            }
        }
    }
    let norm = spectral_norm(&acc)?;
    Ok(AndoReport {
        norm,
        ok: norm <= 1.0 + tol,
    })
}

/// Compressions of multiplication by the two coordinates to polynomials of
/// bidegree at most (d1, d2): the canonical commuting pair of contractions.
pub fn compressed_shift_pair(d1: usize, d2: usize) -> (CMatrix, CMatrix) {
    let n = (d1 + 1) * (d2 + 1);
    let idx = |a: usize, b: usize| a * (d2 + 1) + b;
    let mut t1 = CMatrix::zeros(n, n);
    let mut t2 = CMatrix::zeros(n, n);
    for a in 0..=d1 {
        for b in 0..=d2 {
            if a + 1 <= d1 {
                t1.set(idx(a + 1, b), idx(a, b), Complex64::new(1.0, 0.0));
            }
            if b + 1 <= d2 {
                t2.set(idx(a, b + 1), idx(a, b), Complex64::new(1.0, 0.0));
            }
        }
    }
    (t1, t2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::points::{bidisk_points, DEFAULT_SEED};
    use crate::poly::Poly;

    fn re(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn pt(a: f64, b: f64) -> Point2 {
        [re(a), re(b)]
    }

    fn z1() -> ScalarFn {
        ScalarFn::Poly(Poly::monomial(2, &[1, 0], re(1.0)).unwrap())
    }

    fn z1z2() -> ScalarFn {
        ScalarFn::Poly(Poly::monomial(2, &[1, 1], re(1.0)).unwrap())
    }

    #[test]
    fn kphi_examples() {
        let v = kphi_eval(&z1z2(), &pt(0.0, 0.0), &pt(0.0, 0.0)).unwrap();
        assert!((v - re(1.0)).norm() < 1e-15);

        for r in [0.1, 0.5, 0.9] {
            let v = kphi_eval(&z1(), &pt(r, 0.0), &pt(r, 0.0)).unwrap();
            assert!((v - re(1.0)).norm() < 1e-12, "r={r}");
        }

        let v = kphi_eval(&z1z2(), &pt(0.5, 0.5), &pt(0.5, 0.5)).unwrap();
        assert!((v - re(0.9375 / 0.5625)).norm() < 1e-12);
    }

    #[test]
    fn kphi_rejects_boundary() {
        assert!(kphi_eval(&z1(), &pt(1.0, 0.0), &pt(0.0, 0.0)).is_err());
    }

    #[test]
    fn residual_examples() {
        let pts = bidisk_points(6, DEFAULT_SEED);
        // 1 - z1 conj(w1) = (1 - z1 conj(w1)) * 1
        let r = agler_residual(
            &z1(),
            &KernelExpr::Constant(0.0),
            &KernelExpr::Constant(1.0),
            &pts,
        )
        .unwrap();
        assert!(r < 1e-14);

        // 1 - z1 z2 conj(w1 w2) = (1 - z1 conj(w1)) + z1 conj(w1)(1 - z2 conj(w2))
        let k1 = KernelExpr::RankOne(z1());
        let r = agler_residual(&z1z2(), &k1, &KernelExpr::Constant(1.0), &pts).unwrap();
        assert!(r < 1e-14);

        let r = agler_residual(
            &z1z2(),
            &KernelExpr::Constant(0.0),
            &KernelExpr::Constant(1.0),
            &[pt(0.5, 0.5)],
        )
        .unwrap();
        assert!((r - 0.1875).abs() < 1e-15);
    }

    #[test]
    fn psd_check_examples() {
        let pts = bidisk_points(5, DEFAULT_SEED);
        let check = sample_psd_check(&KernelExpr::szego(0), &pts, 1e-9).unwrap();
        assert!(check.psd);

        let two = [pt(0.1, 0.2), pt(-0.3, 0.4)];
        let check = sample_psd_check(&KernelExpr::Constant(-1.0), &two, 1e-9).unwrap();
        assert!(!check.psd);
        assert!((check.min_eig + 2.0).abs() < 1e-12);

        let half_sum = ScalarFn::Poly(
            Poly::from_terms(2, &[(&[1, 0], re(0.5)), (&[0, 1], re(0.5))]).unwrap(),
        );
        let pts = bidisk_points(20, DEFAULT_SEED);
        let check = sample_psd_check(&KernelExpr::kphi(half_sum), &pts, 1e-9).unwrap();
        assert!(check.psd, "min_eig = {}", check.min_eig);
    }

    #[test]
    fn containment_examples() {
        let pts = bidisk_points(20, DEFAULT_SEED);
        assert!(containment_test(
            &KernelExpr::szego(0),
            &KernelExpr::szego(0),
            1.0,
            &pts,
            1e-9
        )
        .unwrap());

        let double = KernelExpr::Affine(vec![(2.0, KernelExpr::szego(0))]);
        assert!(!containment_test(&double, &KernelExpr::szego(0), 1.0, &pts, 1e-9).unwrap());

        // Szego kernel minus the z1 rank-one: the remaining series
        // sum_{k != 1} (z1 conj(w1))^k is still a positive kernel, checked
        // against a truncated-series oracle.
        let k1 = KernelExpr::RankOne(z1());
        assert!(containment_test(&k1, &KernelExpr::szego(0), 1.0, &pts, 1e-9).unwrap());
        for z in &pts[..5] {
            for w in &pts[..5] {
                let x = z[0] * w[0].conj();
                let direct = KernelExpr::Affine(vec![
                    (1.0, KernelExpr::szego(0)),
                    (-1.0, k1.clone()),
                ])
                .eval(z, w)
                .unwrap();
                let mut series = Complex64::new(0.0, 0.0);
                let mut p = Complex64::new(1.0, 0.0);
                for k in 0..200 {
                    if k != 1 {
                        series += p;
                    }
                    p *= x;
                }
                assert!((direct - series).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn hermitian_symmetry_of_composites() {
        let pts = bidisk_points(8, DEFAULT_SEED);
        let exprs = vec![
            KernelExpr::szego(0),
            KernelExpr::kphi(z1z2()),
            KernelExpr::RankOne(z1()),
            KernelExpr::Affine(vec![
                (0.75, KernelExpr::szego(1)),
                (-0.25, KernelExpr::RankOne(z1z2())),
            ]),
        ];
        for e in exprs {
            assert!(e.hermitian_defect(&pts).unwrap() <= 1e-12);
        }
    }

    #[test]
    fn blend_examples() {
        let pts = bidisk_points(20, DEFAULT_SEED);
        // f = 0: output is the average of the inputs.
        let k = (KernelExpr::szego(0), KernelExpr::Constant(2.0));
        let l = (KernelExpr::Constant(0.0), KernelExpr::Constant(1.0));
        let zero = ScalarFn::Poly(Poly::zero(2));
        let (b1, b2) = blend_decompositions((&k.0, &k.1), (&l.0, &l.1), &zero, 0.5).unwrap();
        for z in &pts[..4] {
            for w in &pts[..4] {
                let avg1 = (k.0.eval(z, w).unwrap() + l.0.eval(z, w).unwrap()) * 0.5;
                assert!((b1.eval(z, w).unwrap() - avg1).norm() < 1e-13);
                let avg2 = (k.1.eval(z, w).unwrap() + l.1.eval(z, w).unwrap()) * 0.5;
                assert!((b2.eval(z, w).unwrap() - avg2).norm() < 1e-13);
            }
        }

        // phi = 0, f = z1: decompositions of +/- z1 blend to one of 0.
        let zero_fn = ScalarFn::Poly(Poly::zero(2));
        let k = (KernelExpr::Constant(0.0), KernelExpr::Constant(1.0));
        let l = (KernelExpr::Constant(0.0), KernelExpr::Constant(1.0));
        for t in [0.0, 1.0] {
            let (b1, b2) = blend_decompositions((&k.0, &k.1), (&l.0, &l.1), &z1(), t).unwrap();
            let r = agler_residual(&zero_fn, &b1, &b2, &pts).unwrap();
            assert!(r < 1e-12, "t={t} r={r}");
        }

        assert!(blend_decompositions((&k.0, &k.1), (&l.0, &l.1), &z1(), 1.5).is_err());
    }

    #[test]
    fn ando_examples() {
        // Nilpotent Jordan blocks: p = z1 z2 evaluates to N^2 = 0.
        let n = CMatrix::from_rows(vec![
            vec![re(0.0), re(1.0)],
            vec![re(0.0), re(0.0)],
        ])
        .unwrap();
        let p = Poly::monomial(2, &[1, 1], re(1.0)).unwrap();
        let rep = ando_check(&p, &n, &n, 1e-10).unwrap();
        assert!(rep.norm < 1e-14 && rep.ok);

        let half_sum =
            Poly::from_terms(2, &[(&[1, 0], re(0.5)), (&[0, 1], re(0.5))]).unwrap();
        let zero = CMatrix::zeros(2, 2);
        let rep = ando_check(&half_sum, &zero, &zero, 1e-10).unwrap();
        assert!(rep.norm < 1e-14 && rep.ok);

        let (t1, t2) = compressed_shift_pair(3, 3);
        let rep = ando_check(&half_sum, &t1, &t2, 1e-10).unwrap();
        assert!(rep.ok, "norm = {}", rep.norm);
    }

    #[test]
    fn ando_rejects_noncommuting() {
        let a = CMatrix::from_rows(vec![
            vec![re(0.0), re(1.0)],
            vec![re(0.0), re(0.0)],
        ])
        .unwrap();
        let b = a.adjoint();
        let p = Poly::monomial(2, &[1, 1], re(1.0)).unwrap();
        assert!(matches!(
            ando_check(&p, &a, &b, 1e-10),
            Err(Error::NonCommuting { .. })
        ));
    }
}
