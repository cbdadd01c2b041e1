//! Stability certificates for d-variate polynomials on the closed polydisk.
//!
//! A polynomial is stable when it has no zeros on the closed polydisk. The
//! certificate scans a phase/radius grid, refines near-zeros by damped
//! Gauss-Newton, and reports the sampled margin
//! `(|p|^d - |p~|^d) / prod(1 - |z_i|^2)` on the open polydisk. Verdicts are
//! grid-resolution limited; when the sampled minimum modulus clears a
//! Lipschitz bound times the grid covering radius, the verdict is upgraded
//! to rigorous.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::poly::{DegreeProfile, Poly};

#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    /// Phase samples per angular variable.
    pub phases: usize,
    /// Radius shells; 1.0 includes the boundary tori.
    pub radii: Vec<f64>,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            phases: 64,
            radii: vec![0.0, 0.5, 0.9, 0.99, 1.0],
        }
    }
}

#[derive(Debug, Clone)]
pub struct StabilityConfig {
    pub grid: GridSpec,
    pub refine_iters: usize,
    pub zero_tol: f64,
    pub margin_tol: f64,
}

impl Default for StabilityConfig {
    fn default() -> Self {
        StabilityConfig {
            grid: GridSpec::default(),
            refine_iters: 50,
            zero_tol: 1e-10,
            margin_tol: 1e-12,
        }
    }
}

#[derive(Debug, Clone)]
pub struct StabilityCertificate {
    pub stable: bool,
    /// Sampled infimum of the margin ratio; an estimate, not the optimal
    /// constant. Infinite (by convention) for nonzero constants, where the
    /// ratio degenerates.
    pub c_estimate: f64,
    /// Minimum |p| over the closed-polydisk sample.
    pub min_modulus: f64,
    /// Zero or near-zero location when unstable.
    pub witness: Option<Vec<Complex64>>,
    /// True when `min_modulus > lipschitz * covering_radius`, which rules
    /// out zeros anywhere on the closed polydisk, not just on the grid.
    pub rigorous: bool,
    pub grid: GridSpec,
}

/// Sum over terms of |coefficient| times total degree: a Lipschitz constant
/// for p on the closed polydisk in the sup metric.
pub fn lipschitz_bound(p: &Poly) -> f64 {
    let extents: Vec<usize> = p.degrees().iter().map(|d| d + 1).collect();
    let mut idx = vec![0usize; p.nvars()];
    let mut total = 0.0;
    loop {
        let c = p.coeff(&idx);
        if c != Complex64::new(0.0, 0.0) {
            total += c.norm() * (idx.iter().sum::<usize>() as f64);
        }
        if !crate::poly::next_index(&mut idx, &extents) {
            break;
        }
    }
    total
}

/// Largest distance from a point of the closed polydisk to the sample grid,
/// per coordinate (sup metric).
pub fn covering_radius(grid: &GridSpec) -> f64 {
    let mut radii = grid.radii.clone();
    radii.retain(|r| (0.0..=1.0).contains(r));
    radii.sort_by(|a, b| a.partial_cmp(b).unwrap());
    radii.dedup();
    if radii.is_empty() {
        return f64::INFINITY;
    }
    let mut radial = radii[0].max(1.0 - radii[radii.len() - 1]);
    for w in radii.windows(2) {
        radial = radial.max((w[1] - w[0]) / 2.0);
    }
    let angular = 2.0 * (std::f64::consts::PI / (2.0 * grid.phases as f64)).sin();
    radial + angular
}

fn axis_samples(grid: &GridSpec) -> Vec<Complex64> {
    let mut out = Vec::new();
    for &r in &grid.radii {
        if r == 0.0 {
            out.push(Complex64::new(0.0, 0.0));
            continue;
        }
        for j in 0..grid.phases {
            let theta = 2.0 * std::f64::consts::PI * (j as f64) / (grid.phases as f64);
            out.push(Complex64::new(r * theta.cos(), r * theta.sin()));
        }
    }
    out
}

fn for_each_grid_point(
    d: usize,
    samples: &[Complex64],
    mut f: impl FnMut(&[Complex64]),
) {
    let n = samples.len();
    let mut idx = vec![0usize; d];
    let mut point = vec![samples[0]; d];
    loop {
        for (axis, &i) in idx.iter().enumerate() {
            point[axis] = samples[i];
        }
        f(&point);
        let extents = vec![n; d];
        if !crate::poly::next_index(&mut idx, &extents) {
            break;
        }
    }
}

/// The margin ratio `(|p(z)|^d - |p~(z)|^d) / prod(1 - |z_i|^2)` at a single
/// interior point.
pub fn margin_ratio_at(p: &Poly, profile: &DegreeProfile, z: &[Complex64]) -> Result<f64> {
    let d = p.nvars();
    let refl = p.reflect(profile)?;
    let num = p.eval(z)?.norm().powi(d as i32) - refl.eval(z)?.norm().powi(d as i32);
    let den: f64 = z.iter().map(|c| 1.0 - c.norm_sqr()).product();
    if den <= 0.0 {
        return Err(Error::PointOutsideDomain {
            axis: 0,
            modulus: 1.0,
        });
    }
    Ok(num / den)
}

/// Sampled infimum of the margin ratio over the open polydisk. Radii are
/// clamped below the boundary (at most `1 - 1/phases`).
pub fn stability_margin(p: &Poly, profile: &DegreeProfile, grid: &GridSpec) -> Result<f64> {
    let d = p.nvars();
    let refl = p.reflect(profile)?;
    let cap = 1.0 - 1.0 / (grid.phases as f64);
    let mut radii: Vec<f64> = grid.radii.iter().map(|&r| r.min(cap)).collect();
    radii.sort_by(|a, b| a.partial_cmp(b).unwrap());
    radii.dedup();
    let interior = GridSpec {
        phases: grid.phases,
        radii,
    };
    let samples = axis_samples(&interior);
    let mut min_ratio = f64::INFINITY;
    for_each_grid_point(d, &samples, |z| {
        let num = p.eval(z).unwrap().norm().powi(d as i32)
            - refl.eval(z).unwrap().norm().powi(d as i32);
        let den: f64 = z.iter().map(|c| 1.0 - c.norm_sqr()).product();
        let ratio = num / den;
        if ratio < min_ratio {
            min_ratio = ratio;
        }
    });
    Ok(min_ratio)
}

/// Gaussian elimination with partial pivoting for the small refinement
/// systems.
fn solve_small(mut a: Vec<f64>, n: usize, mut b: Vec<f64>) -> Option<Vec<f64>> {
    for k in 0..n {
        let mut piv = k;
        for i in (k + 1)..n {
            if a[i * n + k].abs() > a[piv * n + k].abs() {
                piv = i;
            }
        }
        if a[piv * n + k].abs() < 1e-300 {
            return None;
        }
        if piv != k {
            for j in 0..n {
                a.swap(k * n + j, piv * n + j);
            }
            b.swap(k, piv);
        }
        for i in (k + 1)..n {
            let f = a[i * n + k] / a[k * n + k];
            for j in k..n {
                a[i * n + j] -= f * a[k * n + j];
            }
            b[i] -= f * b[k];
        }
    }
    for i in (0..n).rev() {
        let mut v = b[i];
        for j in (i + 1)..n {
            v -= a[i * n + j] * b[j];
        }
        b[i] = v / a[i * n + i];
    }
    Some(b)
}

/// Damped Gauss-Newton on |p|^2 over polar coordinates, radii clamped to
/// [0, 1]. Returns the refined point and |p| there.
fn refine_zero(
    p: &Poly,
    grads: &[Poly],
    start: &[Complex64],
    iters: usize,
) -> (Vec<Complex64>, f64) {
    let d = p.nvars();
    let mut r: Vec<f64> = start.iter().map(|c| c.norm().min(1.0)).collect();
    let mut theta: Vec<f64> = start.iter().map(|c| c.arg()).collect();
    let point = |r: &[f64], th: &[f64]| -> Vec<Complex64> {
        r.iter()
            .zip(th.iter())
            .map(|(&rr, &tt)| Complex64::new(rr * tt.cos(), rr * tt.sin()))
            .collect()
    };
    let mut z = point(&r, &theta);
    let mut best = p.eval(&z).unwrap().norm();
    for _ in 0..iters {
        if best < 1e-15 {
            break;
        }
        let g = p.eval(&z).unwrap();
        // Complex row of derivatives in the 2d real coordinates.
        let mut jrow: Vec<Complex64> = Vec::with_capacity(2 * d);
        for i in 0..d {
            let dp = grads[i].eval(&z).unwrap();
            let phase = Complex64::new(theta[i].cos(), theta[i].sin());
            jrow.push(dp * phase);
        }
        for i in 0..d {
            let dp = grads[i].eval(&z).unwrap();
            let phase = Complex64::new(theta[i].cos(), theta[i].sin());
            jrow.push(dp * Complex64::new(0.0, r[i]) * phase);
        }
        let n = 2 * d;
        let mut jtj = vec![0.0f64; n * n];
        let mut jtg = vec![0.0f64; n];
        for a in 0..n {
            jtg[a] = jrow[a].re * g.re + jrow[a].im * g.im;
            for b in 0..n {
                jtj[a * n + b] = jrow[a].re * jrow[b].re + jrow[a].im * jrow[b].im;
            }
        }
        let scale = (0..n).map(|i| jtj[i * n + i]).fold(0.0f64, f64::max).max(1e-12);
        for i in 0..n {
            jtj[i * n + i] += 1e-10 * scale;
        }
        let Some(step) = solve_small(jtj, n, jtg.iter().map(|&v| -v).collect()) else {
            break;
        };
        let mut tr = r.clone();
        let mut tt = theta.clone();
        for i in 0..d {
            tr[i] = (tr[i] + step[i]).clamp(0.0, 1.0);
            tt[i] += step[d + i];
        }
        let tz = point(&tr, &tt);
        let val = p.eval(&tz).unwrap().norm();
        if val < best {
            best = val;
            r = tr;
            theta = tt;
            z = tz;
        } else {
            break;
        }
    }
    (z, best)
}

/// Scans the closed polydisk for zeros and assembles the certificate.
pub fn is_stable(p: &Poly, cfg: &StabilityConfig) -> Result<StabilityCertificate> {
    if p.is_zero() {
        return Err(Error::InvalidInput("zero polynomial has no certificate".into()));
    }
    let p = p.trim();
    let d = p.nvars();
    let profile = DegreeProfile::new((0..d).map(|a| p.actual_degree(a)).collect());

    // Constant polynomials bypass the margin machinery entirely.
    if profile.0.iter().all(|&k| k == 0) {
        let c = p.coeff(&vec![0; d]).norm();
        return Ok(StabilityCertificate {
            stable: c > 0.0,
            c_estimate: f64::INFINITY,
            min_modulus: c,
            witness: None,
            rigorous: true,
            grid: cfg.grid.clone(),
        });
    }

    let samples = axis_samples(&cfg.grid);
    let lip = lipschitz_bound(&p);
    let delta = covering_radius(&cfg.grid);
    let promote = (lip * delta).max(cfg.zero_tol * 10.0);

    let mut min_modulus = f64::INFINITY;
    let mut candidates: Vec<(f64, Vec<Complex64>)> = Vec::new();
    for_each_grid_point(d, &samples, |z| {
        let v = p.eval(z).unwrap().norm();
        if v < min_modulus {
            min_modulus = v;
        }
        if v <= promote {
            candidates.push((v, z.to_vec()));
        }
    });

    let mut witness = None;
    if min_modulus <= promote {
        candidates.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        candidates.truncate(48);
        let grads: Vec<Poly> = (0..d).map(|a| p.partial_derivative(a)).collect();
        for (v, z) in &candidates {
            if *v < cfg.zero_tol {
                witness = Some(z.clone());
                break;
            }
            let (refined, val) = refine_zero(&p, &grads, z, cfg.refine_iters);
            if val < cfg.zero_tol {
                witness = Some(refined);
                break;
            }
        }
    }

    if let Some(w) = witness {
        return Ok(StabilityCertificate {
            stable: false,
            c_estimate: 0.0,
            min_modulus: 0.0f64.max(p.eval(&w)?.norm()),
            witness: Some(w),
            rigorous: false,
            grid: cfg.grid.clone(),
        });
    }

    let c_estimate = stability_margin(&p, &profile, &cfg.grid)?;
    let rigorous = min_modulus > lip * delta;
    Ok(StabilityCertificate {
        stable: true,
        c_estimate,
        min_modulus,
        witness: None,
        rigorous,
        grid: cfg.grid.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::points::torus_point;

    fn re(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn poly_4_minus_sum() -> Poly {
        Poly::from_terms(
            2,
            &[(&[0, 0], re(4.0)), (&[1, 0], re(-1.0)), (&[0, 1], re(-1.0))],
        )
        .unwrap()
    }

    fn poly_boundary_zero() -> Poly {
        Poly::from_terms(
            2,
            &[
                (&[0, 0], re(3.0)),
                (&[1, 0], re(-1.0)),
                (&[0, 1], re(-1.0)),
                (&[1, 1], re(-1.0)),
            ],
        )
        .unwrap()
    }

    #[test]
    fn margin_degenerates_for_constants() {
        let one = Poly::constant(2, re(1.0));
        let m = stability_margin(&one, &DegreeProfile::new(vec![0, 0]), &GridSpec::default())
            .unwrap();
        assert_eq!(m, 0.0);
    }

    #[test]
    fn margin_of_stable_polynomial_is_positive() {
        let p = poly_4_minus_sum();
        let prof = DegreeProfile::new(vec![1, 1]);
        let at_zero = margin_ratio_at(&p, &prof, &[re(0.0), re(0.0)]).unwrap();
        assert!((at_zero - 16.0).abs() < 1e-12);
        let grid = GridSpec {
            phases: 32,
            radii: vec![0.0, 0.5, 0.9, 0.99],
        };
        let m = stability_margin(&p, &prof, &grid).unwrap();
        assert!(m > 0.0, "margin = {m}");
    }

    #[test]
    fn margin_collapses_at_boundary_zero() {
        let p = poly_boundary_zero();
        let prof = DegreeProfile::new(vec![1, 1]);
        let mut last = f64::INFINITY;
        for r in [0.9, 0.99, 0.999] {
            let v = margin_ratio_at(&p, &prof, &[re(r), re(r)]).unwrap();
            // Closed form along the diagonal: 8 (1 - r) / (1 + r).
            let expected = 8.0 * (1.0 - r) / (1.0 + r);
            assert!((v - expected).abs() < 1e-9 * (1.0 + expected));
            assert!(v < last);
            last = v;
        }
        assert!(last < 0.01);
    }

    #[test]
    fn stable_certificate() {
        let cert = is_stable(&poly_4_minus_sum(), &StabilityConfig::default()).unwrap();
        assert!(cert.stable);
        assert!(cert.min_modulus >= 2.0 - 1e-6);
        assert!(cert.c_estimate > 0.0);
        assert!(cert.rigorous);
        // The upgrade is recomputable from the coefficients and grid.
        let lip = lipschitz_bound(&poly_4_minus_sum());
        assert!((lip - 2.0).abs() < 1e-14);
        assert!(cert.min_modulus > lip * covering_radius(&cert.grid));
    }

    #[test]
    fn unstable_certificate_with_witness() {
        let cert = is_stable(&poly_boundary_zero(), &StabilityConfig::default()).unwrap();
        assert!(!cert.stable);
        let w = cert.witness.unwrap();
        assert!((w[0] - re(1.0)).norm() < 1e-6);
        assert!((w[1] - re(1.0)).norm() < 1e-6);
    }

    #[test]
    fn linear_factor_zero_detected() {
        let p = Poly::from_terms(2, &[(&[0, 0], re(1.0)), (&[1, 0], re(-1.0))]).unwrap();
        let cert = is_stable(&p, &StabilityConfig::default()).unwrap();
        assert!(!cert.stable);
        let w = cert.witness.unwrap();
        assert!((w[0] - re(1.0)).norm() < 1e-8);
    }

    #[test]
    fn reflection_modulus_matches_on_torus() {
        let p = poly_boundary_zero();
        let refl = p.reflect(&DegreeProfile::new(vec![1, 1])).unwrap();
        for j in 0..40 {
            for k in 0..7 {
                let z = [torus_point(j, 40), torus_point(k * 5 + 1, 37)];
                let a = p.eval(&z).unwrap().norm();
                let b = refl.eval(&z).unwrap().norm();
                assert!((a - b).abs() <= 1e-10 * (1.0 + a));
            }
        }
    }

    #[test]
    fn three_variable_cases() {
        let cfg = StabilityConfig {
            grid: GridSpec {
                phases: 16,
                radii: vec![0.0, 0.5, 0.9, 1.0],
            },
            ..StabilityConfig::default()
        };
        let stable = Poly::from_terms(
            3,
            &[
                (&[0, 0, 0], re(8.0)),
                (&[1, 0, 0], re(-1.0)),
                (&[0, 1, 0], re(-1.0)),
                (&[0, 0, 1], re(-1.0)),
            ],
        )
        .unwrap();
        let cert = is_stable(&stable, &cfg).unwrap();
        assert!(cert.stable && cert.rigorous);
        assert!(cert.min_modulus >= 5.0 - 1e-9);

        let unstable = Poly::from_terms(
            3,
            &[
                (&[0, 0, 0], re(3.0)),
                (&[1, 0, 0], re(-1.0)),
                (&[0, 1, 0], re(-1.0)),
                (&[0, 0, 1], re(-1.0)),
            ],
        )
        .unwrap();
        let cert = is_stable(&unstable, &cfg).unwrap();
        assert!(!cert.stable);
        let w = cert.witness.unwrap();
        for c in w {
            assert!((c - re(1.0)).norm() < 1e-6);
        }
    }
}
