//! Dense complex matrices and Hermitian wrappers.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return Err(Error::ShapeMismatch("ragged rows".into()));
        }
        Ok(CMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = CMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn adjoint(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn mul(&self, other: &CMatrix) -> Result<CMatrix> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &CMatrix) -> Result<CMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::ShapeMismatch("add".into()));
        }
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(other.data.iter()) {
            *a += b;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &CMatrix) -> Result<CMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::ShapeMismatch("sub".into()));
        }
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(other.data.iter()) {
            *a -= b;
        }
        Ok(out)
    }

    pub fn scale(&self, c: Complex64) -> CMatrix {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a *= c;
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `self * other - other * self` in Frobenius norm.
    pub fn commutator_norm(&self, other: &CMatrix) -> Result<f64> {
        let ab = self.mul(other)?;
        let ba = other.mul(self)?;
        Ok(ab.sub(&ba)?.frobenius_norm())
    }

    pub fn pow(&self, k: usize) -> Result<CMatrix> {
        if !self.is_square() {
            return Err(Error::ShapeMismatch("pow of non-square matrix".into()));
        }
        let mut out = CMatrix::identity(self.rows);
        for _ in 0..k {
            out = out.mul(self)?;
        }
        Ok(out)
    }
}

/// Hermitian matrix; construction symmetrizes so the invariant
/// `a[i][j] == conj(a[j][i])` holds exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct HermMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl HermMatrix {
    pub fn zeros(n: usize) -> Self {
        HermMatrix {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        HermMatrix::scaled_identity(n, 1.0)
    }

    pub fn scaled_identity(n: usize, s: f64) -> Self {
        let mut m = HermMatrix::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = Complex64::new(s, 0.0);
        }
        m
    }

    /// Symmetrizes `(m + m*)/2`; errs only on non-square input.
    pub fn from_matrix(m: &CMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::ShapeMismatch("Hermitian part of non-square".into()));
        }
        let n = m.rows();
        let mut h = HermMatrix::zeros(n);
        for i in 0..n {
            h.data[i * n + i] = Complex64::new(m.get(i, i).re, 0.0);
            for j in (i + 1)..n {
                let v = (m.get(i, j) + m.get(j, i).conj()) * 0.5;
                h.data[i * n + j] = v;
                h.data[j * n + i] = v.conj();
            }
        }
        Ok(h)
    }

    pub fn from_fn(n: usize, f: impl FnMut(usize, usize) -> Complex64) -> Result<Self> {
        HermMatrix::from_matrix(&CMatrix::from_fn(n, n, f))
    }

    /// Largest deviation of `m` from its Hermitian part; used to validate
    /// inputs that are supposed to be Hermitian already.
    pub fn hermitian_defect(m: &CMatrix) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                let d = (m.get(i, j) - m.get(j, i).conj()).norm();
                worst = worst.max(d * 0.5);
            }
        }
        worst
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    /// Sets entry (i, j) and its conjugate mirror.
    pub fn set_pair(&mut self, i: usize, j: usize, v: Complex64) {
        if i == j {
            self.data[i * self.n + i] = Complex64::new(v.re, 0.0);
        } else {
            self.data[i * self.n + j] = v;
            self.data[j * self.n + i] = v.conj();
        }
    }

    pub fn to_matrix(&self) -> CMatrix {
        CMatrix {
            rows: self.n,
            cols: self.n,
            data: self.data.clone(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn add(&self, other: &HermMatrix) -> Result<HermMatrix> {
        if self.n != other.n {
            return Err(Error::ShapeMismatch("add".into()));
        }
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(other.data.iter()) {
            *a += b;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &HermMatrix) -> Result<HermMatrix> {
        if self.n != other.n {
            return Err(Error::ShapeMismatch("sub".into()));
        }
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(other.data.iter()) {
            *a -= b;
        }
        Ok(out)
    }

    pub fn scale(&self, s: f64) -> HermMatrix {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a *= s;
        }
        out
    }

    pub fn quadratic_form(&self, v: &[Complex64]) -> f64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..self.n {
            for j in 0..self.n {
                acc += v[i].conj() * self.get(i, j) * v[j];
            }
        }
        acc.re
    }
}

/// Random unitary via modified Gram-Schmidt on a complex Gaussian-ish matrix.
pub fn random_unitary(n: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let mut cols: Vec<Vec<Complex64>> = (0..n)
        .map(|_| {
            (0..n)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect()
        })
        .collect();
    for k in 0..n {
        for prev in 0..k {
            let proj: Complex64 = (0..n).map(|i| cols[prev][i].conj() * cols[k][i]).sum();
            for i in 0..n {
                let correction = proj * cols[prev][i];
                cols[k][i] -= correction;
            }
        }
        let norm: f64 = cols[k].iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        // Degenerate draws are measure zero; re-normalizing a tiny column
        // would lose orthogonality, so nudge with a basis vector instead.
        if norm < 1e-8 {
            cols[k][k % n] += Complex64::new(1.0, 0.0);
            return random_unitary_fixup(cols, n);
        }
        for c in cols[k].iter_mut() {
            *c /= norm;
        }
    }
    CMatrix::from_fn(n, n, |i, j| cols[j][i])
}

fn random_unitary_fixup(cols: Vec<Vec<Complex64>>, n: usize) -> CMatrix {
    let mut cols = cols;
    for k in 0..n {
        for prev in 0..k {
            let proj: Complex64 = (0..n).map(|i| cols[prev][i].conj() * cols[k][i]).sum();
            for i in 0..n {
                let correction = proj * cols[prev][i];
                cols[k][i] -= correction;
            }
        }
        let norm: f64 = cols[k].iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        for c in cols[k].iter_mut() {
            *c /= norm;
        }
    }
    CMatrix::from_fn(n, n, |i, j| cols[j][i])
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn hermitian_construction_symmetrizes() {
        let m = CMatrix::from_rows(vec![
            vec![Complex64::new(1.0, 0.5), Complex64::new(2.0, 1.0)],
            vec![Complex64::new(0.0, 0.0), Complex64::new(3.0, -0.25)],
        ])
        .unwrap();
        let h = HermMatrix::from_matrix(&m).unwrap();
        assert_eq!(h.get(0, 0), Complex64::new(1.0, 0.0));
        assert_eq!(h.get(0, 1), h.get(1, 0).conj());
    }

    #[test]
    fn random_unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [1usize, 3, 8] {
            let u = random_unitary(n, &mut rng);
            let prod = u.adjoint().mul(&u).unwrap();
            let defect = prod.sub(&CMatrix::identity(n)).unwrap().frobenius_norm();
            assert!(defect < 1e-12, "n={n} defect={defect}");
        }
    }
}
