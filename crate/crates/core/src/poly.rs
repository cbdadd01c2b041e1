//! Dense d-variate complex polynomials and truncated power series.
//!
//! Coefficients live on dense row-major grids indexed by multi-exponent,
//! with the last variable fastest. Grids stay small here (degree bounds are
//! desk scale), so density keeps convolution and coefficient matching simple.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Advances a row-major multi-index (last axis fastest). Returns `false`
/// once the index wraps past the end.
pub(crate) fn next_index(idx: &mut [usize], extents: &[usize]) -> bool {
    for axis in (0..extents.len()).rev() {
        idx[axis] += 1;
        if idx[axis] < extents[axis] {
            return true;
        }
        idx[axis] = 0;
    }
    false
}

pub(crate) fn flat_offset(idx: &[usize], extents: &[usize]) -> usize {
    let mut off = 0;
    for (i, &n) in idx.iter().zip(extents.iter()) {
        off = off * n + i;
    }
    off
}

fn grid_len(extents: &[usize]) -> usize {
    extents.iter().product()
}

/// Reference degrees used by the reflection operation. Must dominate the
/// actual degree of the polynomial it is applied to, axis by axis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeProfile(pub Vec<usize>);

impl DegreeProfile {
    pub fn new(profile: Vec<usize>) -> Self {
        DegreeProfile(profile)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Dense d-variate polynomial over complex coefficients.
///
/// `degrees[i]` is the grid extent on axis `i`; after [`Poly::trim`] it is
/// the actual degree in that variable (all zero for the zero polynomial).
#[derive(Debug, Clone)]
pub struct Poly {
    nvars: usize,
    degrees: Vec<usize>,
    coeffs: Vec<Complex64>,
}

impl Poly {
    pub fn new(nvars: usize, degrees: Vec<usize>, coeffs: Vec<Complex64>) -> Result<Self> {
        if nvars == 0 || degrees.len() != nvars {
            return Err(Error::DimensionMismatch {
                expected: nvars,
                got: degrees.len(),
            });
        }
        let extents: Vec<usize> = degrees.iter().map(|d| d + 1).collect();
        if coeffs.len() != grid_len(&extents) {
            return Err(Error::DimensionMismatch {
                expected: grid_len(&extents),
                got: coeffs.len(),
            });
        }
        Ok(Poly {
            nvars,
            degrees,
            coeffs,
        })
    }

    pub fn zero(nvars: usize) -> Self {
        Poly {
            nvars,
            degrees: vec![0; nvars],
            coeffs: vec![Complex64::new(0.0, 0.0)],
        }
    }

    pub fn constant(nvars: usize, value: Complex64) -> Self {
        Poly {
            nvars,
            degrees: vec![0; nvars],
            coeffs: vec![value],
        }
    }

    /// Single term `value * z^exponents`.
    pub fn monomial(nvars: usize, exponents: &[usize], value: Complex64) -> Result<Self> {
        if exponents.len() != nvars {
            return Err(Error::DimensionMismatch {
                expected: nvars,
                got: exponents.len(),
            });
        }
        let degrees = exponents.to_vec();
        let extents: Vec<usize> = degrees.iter().map(|d| d + 1).collect();
        let mut coeffs = vec![Complex64::new(0.0, 0.0); grid_len(&extents)];
        let off = flat_offset(exponents, &extents);
        coeffs[off] = value;
        Ok(Poly {
            nvars,
            degrees,
            coeffs,
        })
    }

    /// Builds a polynomial from sparse `(exponents, coefficient)` terms.
    pub fn from_terms(nvars: usize, terms: &[(&[usize], Complex64)]) -> Result<Self> {
        let mut degrees = vec![0usize; nvars];
        for (exps, _) in terms {
            if exps.len() != nvars {
                return Err(Error::DimensionMismatch {
                    expected: nvars,
                    got: exps.len(),
                });
            }
            for (d, &e) in degrees.iter_mut().zip(exps.iter()) {
                *d = (*d).max(e);
            }
        }
        let extents: Vec<usize> = degrees.iter().map(|d| d + 1).collect();
        let mut coeffs = vec![Complex64::new(0.0, 0.0); grid_len(&extents)];
        for (exps, c) in terms {
            coeffs[flat_offset(exps, &extents)] += c;
        }
        Poly::new(nvars, degrees, coeffs).map(|p| p.trim())
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    fn extents(&self) -> Vec<usize> {
        self.degrees.iter().map(|d| d + 1).collect()
    }

    /// Coefficient at a multi-exponent; zero outside the stored grid.
    pub fn coeff(&self, exponents: &[usize]) -> Complex64 {
        if exponents
            .iter()
            .zip(self.degrees.iter())
            .any(|(&e, &d)| e > d)
        {
            return Complex64::new(0.0, 0.0);
        }
        self.coeffs[flat_offset(exponents, &self.extents())]
    }

    /// Actual degree in `axis`: the largest exponent carrying a nonzero
    /// coefficient (zero for the zero polynomial).
    pub fn actual_degree(&self, axis: usize) -> usize {
        let extents = self.extents();
        let mut idx = vec![0usize; self.nvars];
        let mut max_deg = 0usize;
        loop {
            let off = flat_offset(&idx, &extents);
            if self.coeffs[off] != Complex64::new(0.0, 0.0) {
                max_deg = max_deg.max(idx[axis]);
            }
            if !next_index(&mut idx, &extents) {
                break;
            }
        }
        max_deg
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == Complex64::new(0.0, 0.0))
    }

    /// Shrinks grid extents so every top slice carries a nonzero coefficient.
    /// Trimming is always explicit; arithmetic calls it, reflection does not.
    pub fn trim(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero(self.nvars);
        }
        let new_degrees: Vec<usize> = (0..self.nvars).map(|a| self.actual_degree(a)).collect();
        if new_degrees == self.degrees {
            return self.clone();
        }
        let new_extents: Vec<usize> = new_degrees.iter().map(|d| d + 1).collect();
        let mut coeffs = vec![Complex64::new(0.0, 0.0); grid_len(&new_extents)];
        let mut idx = vec![0usize; self.nvars];
        loop {
            coeffs[flat_offset(&idx, &new_extents)] = self.coeff(&idx);
            if !next_index(&mut idx, &new_extents) {
                break;
            }
        }
        Poly {
            nvars: self.nvars,
            degrees: new_degrees,
            coeffs,
        }
    }

    /// Horner evaluation over axes; exact for polynomial data up to round-off.
    pub fn eval(&self, z: &[Complex64]) -> Result<Complex64> {
        if z.len() != self.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                got: z.len(),
            });
        }
        Ok(eval_rec(&self.coeffs, &self.degrees, z))
    }

    /// Coefficient reflection against `profile`: the result has coefficient
    /// `conj(p[profile - alpha])` at `alpha` and grid extents equal to the
    /// profile. Applying it twice with the same profile recovers the input.
    pub fn reflect(&self, profile: &DegreeProfile) -> Result<Poly> {
        if profile.len() != self.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                got: profile.len(),
            });
        }
        for axis in 0..self.nvars {
            let deg = self.actual_degree(axis);
            if profile.0[axis] < deg {
                return Err(Error::ProfileTooSmall {
                    axis,
                    degree: deg,
                    profile: profile.0[axis],
                });
            }
        }
        let degrees = profile.0.clone();
        let extents: Vec<usize> = degrees.iter().map(|d| d + 1).collect();
        let mut coeffs = vec![Complex64::new(0.0, 0.0); grid_len(&extents)];
        let mut idx = vec![0usize; self.nvars];
        loop {
            let src: Vec<usize> = idx
                .iter()
                .zip(profile.0.iter())
                .map(|(&i, &j)| j - i)
                .collect();
            coeffs[flat_offset(&idx, &extents)] = self.coeff(&src).conj();
            if !next_index(&mut idx, &extents) {
                break;
            }
        }
        Ok(Poly {
            nvars: self.nvars,
            degrees,
            coeffs,
        })
    }

    pub fn add(&self, other: &Poly) -> Result<Poly> {
        self.combine(other, 1.0)
    }

    pub fn sub(&self, other: &Poly) -> Result<Poly> {
        self.combine(other, -1.0)
    }

    fn combine(&self, other: &Poly, sign: f64) -> Result<Poly> {
        if self.nvars != other.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                got: other.nvars,
            });
        }
        let degrees: Vec<usize> = self
            .degrees
            .iter()
            .zip(other.degrees.iter())
            .map(|(&a, &b)| a.max(b))
            .collect();
        let extents: Vec<usize> = degrees.iter().map(|d| d + 1).collect();
        let mut coeffs = vec![Complex64::new(0.0, 0.0); grid_len(&extents)];
        let mut idx = vec![0usize; self.nvars];
        loop {
            coeffs[flat_offset(&idx, &extents)] = self.coeff(&idx) + other.coeff(&idx) * sign;
            if !next_index(&mut idx, &extents) {
                break;
            }
        }
        Ok(Poly {
            nvars: self.nvars,
            degrees,
            coeffs,
        }
        .trim())
    }

    /// Exact coefficient convolution; output extents are the sums of the
    /// operand extents, then trimmed.
    pub fn mul(&self, other: &Poly) -> Result<Poly> {
        if self.nvars != other.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                got: other.nvars,
            });
        }
        let degrees: Vec<usize> = self
            .degrees
            .iter()
            .zip(other.degrees.iter())
            .map(|(&a, &b)| a + b)
            .collect();
        let extents: Vec<usize> = degrees.iter().map(|d| d + 1).collect();
        let mut coeffs = vec![Complex64::new(0.0, 0.0); grid_len(&extents)];
        let a_ext = self.extents();
        let b_ext = other.extents();
        let mut ai = vec![0usize; self.nvars];
        loop {
            let ac = self.coeffs[flat_offset(&ai, &a_ext)];
            if ac != Complex64::new(0.0, 0.0) {
                let mut bi = vec![0usize; self.nvars];
                loop {
                    let bc = other.coeffs[flat_offset(&bi, &b_ext)];
                    if bc != Complex64::new(0.0, 0.0) {
                        let sum: Vec<usize> =
                            ai.iter().zip(bi.iter()).map(|(&x, &y)| x + y).collect();
                        coeffs[flat_offset(&sum, &extents)] += ac * bc;
                    }
                    if !next_index(&mut bi, &b_ext) {
                        break;
                    }
                }
            }
            if !next_index(&mut ai, &a_ext) {
                break;
            }
        }
        Ok(Poly {
            nvars: self.nvars,
            degrees,
            coeffs,
        }
        .trim())
    }

    pub fn scale(&self, c: Complex64) -> Poly {
        Poly {
            nvars: self.nvars,
            degrees: self.degrees.clone(),
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
        .trim()
    }

    /// Partial derivative in `axis`.
    pub fn partial_derivative(&self, axis: usize) -> Poly {
        let deg = self.actual_degree(axis);
        if deg == 0 {
            return Poly::zero(self.nvars);
        }
        let mut degrees = self.degrees.clone();
        degrees[axis] = deg - 1;
        let extents: Vec<usize> = degrees.iter().map(|d| d + 1).collect();
        let mut coeffs = vec![Complex64::new(0.0, 0.0); grid_len(&extents)];
        let mut idx = vec![0usize; self.nvars];
        loop {
            let mut src = idx.clone();
            src[axis] += 1;
            coeffs[flat_offset(&idx, &extents)] = self.coeff(&src) * (src[axis] as f64);
            if !next_index(&mut idx, &extents) {
                break;
            }
        }
        Poly {
            nvars: self.nvars,
            degrees,
            coeffs,
        }
        .trim()
    }

    /// Sum of coefficient moduli.
    pub fn coeff_norm1(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum()
    }

    /// Number of nonzero coefficients.
    pub fn nonzero_terms(&self) -> usize {
        self.coeffs
            .iter()
            .filter(|c| **c != Complex64::new(0.0, 0.0))
            .count()
    }

    /// Exponent and coefficient of the unique term, if this is a monomial.
    pub fn as_monomial(&self) -> Option<(Vec<usize>, Complex64)> {
        let extents = self.extents();
        let mut found = None;
        let mut idx = vec![0usize; self.nvars];
        loop {
            let c = self.coeffs[flat_offset(&idx, &extents)];
            if c != Complex64::new(0.0, 0.0) {
                if found.is_some() {
                    return None;
                }
                found = Some((idx.clone(), c));
            }
            if !next_index(&mut idx, &extents) {
                break;
            }
        }
        found
    }
}

impl PartialEq for Poly {
    /// Mathematical equality: coefficients agree on the union grid, so grids
    /// that differ only by zero-padded slices compare equal.
    fn eq(&self, other: &Poly) -> bool {
        if self.nvars != other.nvars {
            return false;
        }
        let extents: Vec<usize> = self
            .degrees
            .iter()
            .zip(other.degrees.iter())
            .map(|(&a, &b)| a.max(b) + 1)
            .collect();
        let mut idx = vec![0usize; self.nvars];
        loop {
            if self.coeff(&idx) != other.coeff(&idx) {
                return false;
            }
            if !next_index(&mut idx, &extents) {
                break;
            }
        }
        true
    }
}

fn eval_rec(coeffs: &[Complex64], degrees: &[usize], z: &[Complex64]) -> Complex64 {
    if degrees.is_empty() {
        return coeffs[0];
    }
    let stride: usize = degrees[1..].iter().map(|d| d + 1).product();
    let mut acc = Complex64::new(0.0, 0.0);
    for chunk in coeffs.chunks(stride).rev() {
        acc = acc * z[0] + eval_rec(chunk, &degrees[1..], &z[1..]);
    }
    acc
}

/// Truncated power-series coefficients: exponents `0 <= n_i < truncation[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffGrid {
    nvars: usize,
    truncation: Vec<usize>,
    coeffs: Vec<Complex64>,
}

impl CoeffGrid {
    pub fn new(nvars: usize, truncation: Vec<usize>, coeffs: Vec<Complex64>) -> Result<Self> {
        if nvars == 0 || truncation.len() != nvars {
            return Err(Error::DimensionMismatch {
                expected: nvars,
                got: truncation.len(),
            });
        }
        if truncation.iter().any(|&n| n == 0) {
            return Err(Error::InvalidInput(
                "truncation entries must be positive".into(),
            ));
        }
        if coeffs.len() != grid_len(&truncation) {
            return Err(Error::DimensionMismatch {
                expected: grid_len(&truncation),
                got: coeffs.len(),
            });
        }
        Ok(CoeffGrid {
            nvars,
            truncation,
            coeffs,
        })
    }

    pub fn zeros(nvars: usize, truncation: Vec<usize>) -> Result<Self> {
        let len = grid_len(&truncation);
        CoeffGrid::new(nvars, truncation, vec![Complex64::new(0.0, 0.0); len])
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn truncation(&self) -> &[usize] {
        &self.truncation
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, idx: &[usize]) -> Complex64 {
        if idx.iter().zip(self.truncation.iter()).any(|(&i, &n)| i >= n) {
            return Complex64::new(0.0, 0.0);
        }
        self.coeffs[flat_offset(idx, &self.truncation)]
    }

    pub fn set(&mut self, idx: &[usize], value: Complex64) {
        let off = flat_offset(idx, &self.truncation);
        self.coeffs[off] = value;
    }

    /// Embeds a polynomial into a grid (coefficients past the truncation are
    /// dropped).
    pub fn from_poly(p: &Poly, truncation: Vec<usize>) -> Result<Self> {
        let mut g = CoeffGrid::zeros(p.nvars(), truncation)?;
        let mut idx = vec![0usize; p.nvars()];
        let trunc = g.truncation.clone();
        loop {
            g.set(&idx, p.coeff(&idx));
            if !next_index(&mut idx, &trunc) {
                break;
            }
        }
        Ok(g)
    }

    /// Drops the exponent-0 slice on `axis` and shifts the remaining
    /// coefficients down one step; the truncation on that axis decreases by
    /// one. Signals rather than returning an empty grid when the axis has a
    /// single slice.
    pub fn backward_shift(&self, axis: usize) -> Result<CoeffGrid> {
        if axis >= self.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                got: axis,
            });
        }
        if self.truncation[axis] == 1 {
            return Err(Error::EmptyShift { axis });
        }
        let mut truncation = self.truncation.clone();
        truncation[axis] -= 1;
        let mut out = CoeffGrid::zeros(self.nvars, truncation)?;
        let trunc = out.truncation.clone();
        let mut idx = vec![0usize; self.nvars];
        loop {
            let mut src = idx.clone();
            src[axis] += 1;
            let v = self.coeff(&src);
            out.set(&idx, v);
            if !next_index(&mut idx, &trunc) {
                break;
            }
        }
        Ok(out)
    }

    /// Inverse of the backward shift up to the dropped slice: multiplies by
    /// `z_axis`, growing the truncation on `axis` by one.
    pub fn shift_up(&self, axis: usize) -> Result<CoeffGrid> {
        if axis >= self.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                got: axis,
            });
        }
        let mut truncation = self.truncation.clone();
        truncation[axis] += 1;
        let mut out = CoeffGrid::zeros(self.nvars, truncation)?;
        let trunc = out.truncation.clone();
        let mut idx = vec![0usize; self.nvars];
        loop {
            if idx[axis] >= 1 {
                let mut src = idx.clone();
                src[axis] -= 1;
                out.set(&idx, self.coeff(&src));
            }
            if !next_index(&mut idx, &trunc) {
                break;
            }
        }
        Ok(out)
    }

    /// Convolves with a polynomial, truncated to this grid's extents. Every
    /// contributing series coefficient has index at most the output index, so
    /// the result is exact wherever this grid is.
    pub fn mul_poly(&self, p: &Poly) -> Result<CoeffGrid> {
        if p.nvars() != self.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                got: p.nvars(),
            });
        }
        let mut out = CoeffGrid::zeros(self.nvars, self.truncation.clone())?;
        let trunc = out.truncation.clone();
        let p_ext: Vec<usize> = p.degrees().iter().map(|d| d + 1).collect();
        let mut gi = vec![0usize; self.nvars];
        loop {
            let mut acc = Complex64::new(0.0, 0.0);
            let mut bi = vec![0usize; self.nvars];
            loop {
                if bi.iter().zip(gi.iter()).all(|(&b, &g)| b <= g) {
                    let pc = p.coeffs()[flat_offset(&bi, &p_ext)];
                    if pc != Complex64::new(0.0, 0.0) {
                        let src: Vec<usize> =
                            gi.iter().zip(bi.iter()).map(|(&g, &b)| g - b).collect();
                        acc += pc * self.coeff(&src);
                    }
                }
                if !next_index(&mut bi, &p_ext) {
                    break;
                }
            }
            out.set(&gi, acc);
            if !next_index(&mut gi, &trunc) {
                break;
            }
        }
        Ok(out)
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// Taylor coefficients of `1/p` up to `truncation`, by the standard
/// convolution recursion `c_0 = 1/p_0`,
/// `c_a = -(1/p_0) * sum_{0 < b <= a} p_b c_{a-b}`.
pub fn series_inverse(p: &Poly, truncation: &[usize]) -> Result<CoeffGrid> {
    let p0 = p.coeff(&vec![0; p.nvars()]);
    if p0 == Complex64::new(0.0, 0.0) {
        return Err(Error::ConstantTermZero);
    }
    let mut out = CoeffGrid::zeros(p.nvars(), truncation.to_vec())?;
    let trunc = out.truncation.clone();
    let inv0 = Complex64::new(1.0, 0.0) / p0;
    let p_ext: Vec<usize> = p.degrees().iter().map(|d| d + 1).collect();
    let mut idx = vec![0usize; p.nvars()];
    loop {
        if idx.iter().all(|&i| i == 0) {
            out.set(&idx, inv0);
        } else {
            let mut acc = Complex64::new(0.0, 0.0);
            let mut bi = vec![0usize; p.nvars()];
            loop {
                let nonzero_shift = bi.iter().any(|&b| b > 0);
                if nonzero_shift && bi.iter().zip(idx.iter()).all(|(&b, &a)| b <= a) {
                    let pc = p.coeffs()[flat_offset(&bi, &p_ext)];
                    if pc != Complex64::new(0.0, 0.0) {
                        let src: Vec<usize> =
                            idx.iter().zip(bi.iter()).map(|(&a, &b)| a - b).collect();
                        acc += pc * out.coeff(&src);
                    }
                }
                if !next_index(&mut bi, &p_ext) {
                    break;
                }
            }
            out.set(&idx, -inv0 * acc);
        }
        if !next_index(&mut idx, &trunc) {
            break;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn re(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    /// 3 - z1 - z2 - z1*z2
    fn p_prop(nvars_k: (usize, usize)) -> Poly {
        let (k1, k2) = nvars_k;
        Poly::from_terms(
            2,
            &[
                (&[0, 0], re(3.0)),
                (&[k1, 0], re(-1.0)),
                (&[0, k2], re(-1.0)),
                (&[k1, k2], re(-1.0)),
            ],
        )
        .unwrap()
    }

    #[test]
    fn eval_examples() {
        let p = p_prop((1, 1));
        let at = |x: f64, y: f64| p.eval(&[re(x), re(y)]).unwrap();
        assert!((at(1.0, 1.0)).norm() < 1e-15);
        assert!((at(0.0, 0.0) - re(3.0)).norm() < 1e-15);
        let one = Poly::constant(2, re(1.0));
        assert_eq!(one.eval(&[re(0.3), re(-0.7)]).unwrap(), re(1.0));
    }

    #[test]
    fn eval_dimension_mismatch() {
        let p = p_prop((1, 1));
        assert!(p.eval(&[re(0.5)]).is_err());
    }

    #[test]
    fn reflect_examples() {
        let p = p_prop((1, 1));
        let refl = p.reflect(&DegreeProfile::new(vec![1, 1])).unwrap();
        let expected = Poly::from_terms(
            2,
            &[
                (&[1, 1], re(3.0)),
                (&[1, 0], re(-1.0)),
                (&[0, 1], re(-1.0)),
                (&[0, 0], re(-1.0)),
            ],
        )
        .unwrap();
        assert_eq!(refl, expected);

        let one = Poly::constant(2, re(1.0));
        assert_eq!(one.reflect(&DegreeProfile::new(vec![0, 0])).unwrap(), one);

        let p = Poly::from_terms(
            2,
            &[(&[0, 0], re(4.0)), (&[1, 0], re(-1.0)), (&[0, 1], re(-1.0))],
        )
        .unwrap();
        let refl = p.reflect(&DegreeProfile::new(vec![1, 1])).unwrap();
        let expected = Poly::from_terms(
            2,
            &[(&[1, 1], re(4.0)), (&[0, 1], re(-1.0)), (&[1, 0], re(-1.0))],
        )
        .unwrap();
        assert_eq!(refl, expected);
    }

    #[test]
    fn reflect_profile_too_small() {
        let p = p_prop((2, 1));
        assert!(p.reflect(&DegreeProfile::new(vec![1, 1])).is_err());
    }

    #[test]
    fn reflect_matches_conjugate_inversion_formula() {
        // p~(z) = z1^j1 z2^j2 conj(p(1/conj(z1), 1/conj(z2))) at generic points.
        let p = Poly::from_terms(
            2,
            &[
                (&[0, 0], Complex64::new(4.0, 0.5)),
                (&[1, 0], re(-1.0)),
                (&[0, 1], Complex64::new(0.0, -1.0)),
            ],
        )
        .unwrap();
        let prof = DegreeProfile::new(vec![1, 1]);
        let refl = p.reflect(&prof).unwrap();
        let pts = [
            (Complex64::new(0.3, 0.4), Complex64::new(-0.2, 0.1)),
            (Complex64::new(0.9, -0.1), Complex64::new(0.5, 0.5)),
            (Complex64::new(-0.6, 0.2), Complex64::new(0.1, -0.8)),
        ];
        for (z1, z2) in pts {
            let lhs = refl.eval(&[z1, z2]).unwrap();
            let inv1 = Complex64::new(1.0, 0.0) / z1.conj();
            let inv2 = Complex64::new(1.0, 0.0) / z2.conj();
            let rhs = z1 * z2 * p.eval(&[inv1, inv2]).unwrap().conj();
            assert!((lhs - rhs).norm() < 1e-12 * (1.0 + rhs.norm()));
        }
    }

    #[test]
    fn arithmetic_examples() {
        let z1 = Poly::monomial(2, &[1, 0], re(1.0)).unwrap();
        let z2 = Poly::monomial(2, &[0, 1], re(1.0)).unwrap();
        let z1z2 = z1.mul(&z2).unwrap();
        assert_eq!(z1z2, Poly::monomial(2, &[1, 1], re(1.0)).unwrap());

        let a = p_prop((1, 1));
        let b = Poly::from_terms(
            2,
            &[(&[0, 0], re(1.0)), (&[1, 0], re(1.0)), (&[0, 1], re(1.0))],
        )
        .unwrap();
        let sum = a.add(&b).unwrap();
        let expected =
            Poly::from_terms(2, &[(&[0, 0], re(4.0)), (&[1, 1], re(-1.0))]).unwrap();
        assert_eq!(sum, expected);
        assert_eq!(sum.degrees(), &[1, 1]);

        let c = Poly::from_terms(2, &[(&[0, 0], re(2.0)), (&[1, 0], re(-1.0))]).unwrap();
        let d = Poly::from_terms(2, &[(&[0, 0], re(2.0)), (&[1, 0], re(1.0))]).unwrap();
        let prod = c.mul(&d).unwrap();
        let expected =
            Poly::from_terms(2, &[(&[0, 0], re(4.0)), (&[2, 0], re(-1.0))]).unwrap();
        assert_eq!(prod, expected);
    }

    #[test]
    fn series_inverse_geometric() {
        let p = Poly::from_terms(2, &[(&[0, 0], re(1.0)), (&[1, 0], re(-1.0))]).unwrap();
        let g = series_inverse(&p, &[5, 1]).unwrap();
        for m in 0..5 {
            assert!((g.coeff(&[m, 0]) - re(1.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn series_inverse_binomial() {
        let p = Poly::from_terms(
            2,
            &[(&[0, 0], re(2.0)), (&[1, 0], re(-1.0)), (&[0, 1], re(-1.0))],
        )
        .unwrap();
        let g = series_inverse(&p, &[3, 3]).unwrap();
        let binom = |n: usize, k: usize| -> f64 {
            let mut v = 1.0;
            for i in 0..k {
                v = v * ((n - i) as f64) / ((i + 1) as f64);
            }
            v
        };
        for m in 0..3 {
            for n in 0..3 {
                let expected = binom(m + n, m) / 2f64.powi((m + n + 1) as i32);
                assert!(
                    (g.coeff(&[m, n]) - re(expected)).norm() < 1e-14,
                    "({m},{n})"
                );
            }
        }
        assert!((g.coeff(&[0, 0]) - re(0.5)).norm() < 1e-15);
        assert!((g.coeff(&[1, 0]) - re(0.25)).norm() < 1e-15);
        assert!((g.coeff(&[1, 1]) - re(0.25)).norm() < 1e-15);
    }

    #[test]
    fn series_inverse_three_term() {
        // Recursion by hand: c00 = 1/3, c10 = c01 = 1/9,
        // c11 = (c01 + c10 + c00)/3 = 5/27; the convolution oracle below
        // confirms p * (1/p) truncates to 1.
        let p = p_prop((1, 1));
        let g = series_inverse(&p, &[2, 2]).unwrap();
        assert!((g.coeff(&[0, 0]) - re(1.0 / 3.0)).norm() < 1e-15);
        assert!((g.coeff(&[1, 0]) - re(1.0 / 9.0)).norm() < 1e-15);
        assert!((g.coeff(&[1, 1]) - re(5.0 / 27.0)).norm() < 1e-15);

        let back = g.mul_poly(&p).unwrap();
        for m in 0..2 {
            for n in 0..2 {
                let want = if m == 0 && n == 0 { 1.0 } else { 0.0 };
                assert!((back.coeff(&[m, n]) - re(want)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn series_inverse_requires_nonzero_constant() {
        let p = Poly::monomial(2, &[1, 0], re(1.0)).unwrap();
        assert!(matches!(
            series_inverse(&p, &[2, 2]),
            Err(Error::ConstantTermZero)
        ));
    }

    #[test]
    fn backward_shift_examples() {
        // 1 + z1 + z1^2 -> 1 + z1
        let p = Poly::from_terms(
            2,
            &[(&[0, 0], re(1.0)), (&[1, 0], re(1.0)), (&[2, 0], re(1.0))],
        )
        .unwrap();
        let g = CoeffGrid::from_poly(&p, vec![3, 1]).unwrap();
        let s = g.backward_shift(0).unwrap();
        assert_eq!(s.truncation(), &[2, 1]);
        assert!((s.coeff(&[0, 0]) - re(1.0)).norm() < 1e-15);
        assert!((s.coeff(&[1, 0]) - re(1.0)).norm() < 1e-15);

        // z2 has no z1 dependence.
        let z2 = Poly::monomial(2, &[0, 1], re(1.0)).unwrap();
        let g = CoeffGrid::from_poly(&z2, vec![2, 2]).unwrap();
        let s = g.backward_shift(0).unwrap();
        assert!(s.max_abs() < 1e-15);

        // Geometric series is shift invariant.
        let p = Poly::from_terms(2, &[(&[0, 0], re(1.0)), (&[1, 0], re(-1.0))]).unwrap();
        let g5 = series_inverse(&p, &[5, 1]).unwrap();
        let g4 = series_inverse(&p, &[4, 1]).unwrap();
        assert_eq!(g5.backward_shift(0).unwrap(), g4);
    }

    #[test]
    fn backward_shift_empty_axis_is_signaled() {
        let g = CoeffGrid::zeros(2, vec![1, 3]).unwrap();
        assert!(matches!(g.backward_shift(0), Err(Error::EmptyShift { axis: 0 })));
    }

    #[test]
    fn shift_reconstruction_identity() {
        // g = slice at exponent 0 plus shift_up(backward_shift(g)).
        let p = p_prop((2, 2));
        let g = series_inverse(&p, &[4, 4]).unwrap();
        let shifted = g.backward_shift(0).unwrap().shift_up(0).unwrap();
        let mut idx = vec![0usize; 2];
        loop {
            let expected = if idx[0] == 0 {
                g.coeff(&idx)
            } else {
                shifted.coeff(&idx)
            };
            assert!((g.coeff(&idx) - expected).norm() < 1e-15);
            if !next_index(&mut idx, &[4, 4]) {
                break;
            }
        }
    }

    #[test]
    fn trim_is_tight_and_zero_poly_collapses() {
        let p = Poly::new(
            2,
            vec![2, 2],
            vec![Complex64::new(0.0, 0.0); 9],
        )
        .unwrap();
        let t = p.trim();
        assert_eq!(t.degrees(), &[0, 0]);
        assert!(t.is_zero());

        let q = Poly::from_terms(2, &[(&[1, 0], re(2.0))]).unwrap();
        assert_eq!(q.degrees(), &[1, 0]);
    }
}
