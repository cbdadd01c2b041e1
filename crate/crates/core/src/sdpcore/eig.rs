//! Complex Hermitian eigendecomposition by cyclic Jacobi rotations, plus the
//! PSD projection and spectral norms built on it.
//!
//! Jacobi is the most accurate dense Hermitian solver at these sizes (n is a
//! few dozen at most here) and needs no external factorization.

use num_complex::Complex64;

use super::matrix::{CMatrix, HermMatrix};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;

/// Eigendecomposition `M = V diag(values) V*` with `values` sorted
/// descending and `V` unitary (columns are eigenvectors).
#[derive(Debug, Clone)]
pub struct HermEig {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl HermEig {
    pub fn min(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn reconstruct(&self) -> CMatrix {
        let n = self.values.len();
        CMatrix::from_fn(n, n, |i, j| {
            (0..n)
                .map(|k| {
                    self.vectors.get(i, k) * self.values[k] * self.vectors.get(j, k).conj()
                })
                .sum()
        })
    }
}

fn off_diagonal_norm(a: &CMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a.get(i, j).norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Cyclic Jacobi for Hermitian matrices. Errors with the sweep count if the
/// off-diagonal mass has not collapsed after the cap.
pub fn hermitian_eig(m: &HermMatrix) -> Result<HermEig> {
    let n = m.dim();
    if n == 0 {
        return Ok(HermEig {
            values: vec![],
            vectors: CMatrix::zeros(0, 0),
        });
    }
    let mut a = m.to_matrix();
    let mut v = CMatrix::identity(n);
    let scale = 1.0 + a.frobenius_norm();
    let tol = 1e-14 * scale;

    let mut sweeps = 0;
    while off_diagonal_norm(&a) > tol {
        if sweeps >= MAX_SWEEPS {
            return Err(Error::EigenNoConvergence {
                sweeps,
                off_norm: off_diagonal_norm(&a),
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                if apq.norm() <= 1e-300 {
                    continue;
                }
                let alpha = a.get(p, p).re;
                let gamma = a.get(q, q).re;
                let phase = apq / apq.norm();
                // Real Jacobi angle on (alpha, |apq|, gamma), phase folded
                // into the off-diagonal rotation entry.
                let tau = (gamma - alpha) / (2.0 * apq.norm());
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = phase * (t * c);

                // A <- J^H A J with J = [[c, s], [-conj(s), c]] on (p, q).
                for k in 0..n {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, akp * c - akq * s.conj());
                    a.set(k, q, akp * s + akq * c);
                }
                for k in 0..n {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.set(p, k, apk * c - aqk * s);
                    a.set(q, k, apk * s.conj() + aqk * c);
                }
                // Clean round-off so the iteration stays Hermitian.
                a.set(p, q, a.get(q, p).conj());
                a.set(p, p, Complex64::new(a.get(p, p).re, 0.0));
                a.set(q, q, Complex64::new(a.get(q, q).re, 0.0));

                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, vkp * c - vkq * s.conj());
                    v.set(k, q, vkp * s + vkq * c);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a.get(i, i).re).collect();
    order.sort_by(|&i, &j| diag[j].partial_cmp(&diag[i]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| v.get(i, order[j]));
    Ok(HermEig { values, vectors })
}

/// Nearest PSD matrix in Frobenius norm: clip negative eigenvalues and
/// reassemble.
pub fn psd_project(m: &HermMatrix) -> Result<HermMatrix> {
    let n = m.dim();
    if n == 0 {
        return Ok(m.clone());
    }
    let eig = hermitian_eig(m)?;
    if eig.min() >= 0.0 {
        return Ok(m.clone());
    }
    let clipped: Vec<f64> = eig.values.iter().map(|&l| l.max(0.0)).collect();
    let mut out = CMatrix::zeros(n, n);
    for k in 0..n {
        if clipped[k] == 0.0 {
            continue;
        }
        for i in 0..n {
            let vik = eig.vectors.get(i, k) * clipped[k];
            for j in 0..n {
                let v = out.get(i, j) + vik * eig.vectors.get(j, k).conj();
                out.set(i, j, v);
            }
        }
    }
    HermMatrix::from_matrix(&out)
}

/// Largest singular value, computed as sqrt of the top eigenvalue of `M* M`.
pub fn spectral_norm(m: &CMatrix) -> Result<f64> {
    if m.rows() == 0 || m.cols() == 0 {
        return Ok(0.0);
    }
    let gram = HermMatrix::from_matrix(&m.adjoint().mul(m)?)?;
    let eig = hermitian_eig(&gram)?;
    Ok(eig.max().max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn re(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    /// Closed-form eigenvalues of a 2x2 Hermitian [[a, b], [conj(b), c]].
    pub(crate) fn eig2x2(a: f64, b: Complex64, c: f64) -> (f64, f64) {
        let mid = (a + c) / 2.0;
        let rad = (((a - c) / 2.0).powi(2) + b.norm_sqr()).sqrt();
        (mid + rad, mid - rad)
    }

    #[test]
    fn diagonal_matrix() {
        let m = HermMatrix::from_fn(2, |i, j| {
            if i == j {
                re(if i == 0 { 3.0 } else { 1.0 })
            } else {
                re(0.0)
            }
        })
        .unwrap();
        let eig = hermitian_eig(&m).unwrap();
        assert!((eig.values[0] - 3.0).abs() < 1e-14);
        assert!((eig.values[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn pauli_x() {
        let m = HermMatrix::from_fn(2, |i, j| if i != j { re(1.0) } else { re(0.0) }).unwrap();
        let eig = hermitian_eig(&m).unwrap();
        assert!((eig.values[0] - 1.0).abs() < 1e-14);
        assert!((eig.values[1] + 1.0).abs() < 1e-14);
    }

    #[test]
    fn complex_offdiagonal() {
        // [[2, i], [-i, 2]] has characteristic roots 3 and 1.
        let m = HermMatrix::from_fn(2, |i, j| match (i, j) {
            (0, 0) | (1, 1) => re(2.0),
            (0, 1) => Complex64::new(0.0, 1.0),
            _ => Complex64::new(0.0, -1.0),
        })
        .unwrap();
        let eig = hermitian_eig(&m).unwrap();
        assert!((eig.values[0] - 3.0).abs() < 1e-13);
        assert!((eig.values[1] - 1.0).abs() < 1e-13);
        let (hi, lo) = eig2x2(2.0, Complex64::new(0.0, 1.0), 2.0);
        assert!((eig.values[0] - hi).abs() < 1e-13);
        assert!((eig.values[1] - lo).abs() < 1e-13);
    }

    #[test]
    fn reconstruction_and_unitarity() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for n in [1usize, 2, 5, 9] {
            let m = HermMatrix::from_fn(n, |_, _| {
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            })
            .unwrap();
            let eig = hermitian_eig(&m).unwrap();
            let err = eig
                .reconstruct()
                .sub(&m.to_matrix())
                .unwrap()
                .frobenius_norm();
            assert!(err <= 1e-10 * (1.0 + m.frobenius_norm()), "n={n} err={err}");
            let vtv = eig.vectors.adjoint().mul(&eig.vectors).unwrap();
            let defect = vtv.sub(&CMatrix::identity(n)).unwrap().frobenius_norm();
            assert!(defect < 1e-12);
            for w in eig.values.windows(2) {
                assert!(w[0] >= w[1]);
            }
        }
    }

    #[test]
    fn psd_project_examples() {
        // diag(1, -2) -> diag(1, 0)
        let m = HermMatrix::from_fn(2, |i, j| {
            if i == j {
                re(if i == 0 { 1.0 } else { -2.0 })
            } else {
                re(0.0)
            }
        })
        .unwrap();
        let p = psd_project(&m).unwrap();
        assert!((p.get(0, 0) - re(1.0)).norm() < 1e-14);
        assert!(p.get(1, 1).norm() < 1e-14);
        assert!(p.get(0, 1).norm() < 1e-14);

        // [[0, 1], [1, 0]] -> [[0.5, 0.5], [0.5, 0.5]]
        let m = HermMatrix::from_fn(2, |i, j| if i != j { re(1.0) } else { re(0.0) }).unwrap();
        let p = psd_project(&m).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((p.get(i, j) - re(0.5)).norm() < 1e-13);
            }
        }

        // PSD input is a fixed point.
        let m = HermMatrix::from_fn(2, |i, j| if i == j { re(2.0) } else { re(0.5) }).unwrap();
        let p = psd_project(&m).unwrap();
        assert!(p.sub(&m).unwrap().frobenius_norm() <= 1e-10);
        let pp = psd_project(&p).unwrap();
        assert!(pp.sub(&p).unwrap().frobenius_norm() <= 1e-10);
    }

    #[test]
    fn spectral_norm_of_isometry_block() {
        let m = CMatrix::from_rows(vec![
            vec![re(0.0), re(1.0)],
            vec![re(0.0), re(0.0)],
        ])
        .unwrap();
        assert!((spectral_norm(&m).unwrap() - 1.0).abs() < 1e-13);
    }
}
