//! JSON wire formats shared by the CLI and schema files.
//!
//! Complex numbers serialize as `[re, im]` pairs; polynomial coefficient
//! grids are row-major with the last variable fastest; matrices are
//! row-major with explicit row/column counts. Field order is fixed by the
//! struct definitions, so identical values serialize to identical bytes.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::decompose::{
    AglerPair, DecomposeCertificate, GramKernel, RationalInner, SupportReport, UniquenessMethod,
    UniquenessReport, UniquenessVerdict,
};
use crate::error::{Error, Result};
use crate::pick::{PickData, PickResult, PickStatus};
use crate::points::Point2;
use crate::poly::{DegreeProfile, Poly};
use crate::sdpcore::HermMatrix;
use crate::stability::{GridSpec, StabilityCertificate};

pub type WireComplex = [f64; 2];

fn to_wire_c(c: Complex64) -> WireComplex {
    [c.re, c.im]
}

fn from_wire_c(c: WireComplex) -> Complex64 {
    Complex64::new(c[0], c[1])
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WirePoly {
    pub nvars: usize,
    pub degrees: Vec<usize>,
    pub coeffs: Vec<WireComplex>,
}

impl WirePoly {
    pub fn from_poly(p: &Poly) -> WirePoly {
        WirePoly {
            nvars: p.nvars(),
            degrees: p.degrees().to_vec(),
            coeffs: p.coeffs().iter().map(|&c| to_wire_c(c)).collect(),
        }
    }

    pub fn into_poly(self) -> Result<Poly> {
        Poly::new(
            self.nvars,
            self.degrees,
            self.coeffs.into_iter().map(from_wire_c).collect(),
        )
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WireMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<WireComplex>,
}

impl WireMatrix {
    pub fn from_herm(m: &HermMatrix) -> WireMatrix {
        let n = m.dim();
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(to_wire_c(m.get(i, j)));
            }
        }
        WireMatrix {
            rows: n,
            cols: n,
            data,
        }
    }

    pub fn from_cmatrix(m: &crate::sdpcore::CMatrix) -> WireMatrix {
        WireMatrix {
            rows: m.rows(),
            cols: m.cols(),
            data: m.data().iter().map(|&c| to_wire_c(c)).collect(),
        }
    }

    pub fn into_cmatrix(self) -> Result<crate::sdpcore::CMatrix> {
        if self.data.len() != self.rows * self.cols {
            return Err(Error::ShapeMismatch(format!(
                "matrix data length {} for {}x{}",
                self.data.len(),
                self.rows,
                self.cols
            )));
        }
        let data = self.data;
        let cols = self.cols;
        Ok(crate::sdpcore::CMatrix::from_fn(self.rows, cols, |i, j| {
            from_wire_c(data[i * cols + j])
        }))
    }

    pub fn into_herm(self) -> Result<HermMatrix> {
        let m = self.into_cmatrix()?;
        let defect = HermMatrix::hermitian_defect(&m);
        if defect > 1e-12 * (1.0 + m.frobenius_norm()) {
            return Err(Error::InvalidInput(format!(
                "matrix is not Hermitian (defect {defect:.3e})"
            )));
        }
        HermMatrix::from_matrix(&m)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WireRationalInner {
    pub m: WirePoly,
    pub p: WirePoly,
    pub profile: Vec<usize>,
    /// Degrees (k1, k2); informational on output, ignored on input.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<[usize; 2]>,
}

impl WireRationalInner {
    pub fn from_inner(phi: &RationalInner) -> WireRationalInner {
        WireRationalInner {
            m: WirePoly::from_poly(phi.monomial_part()),
            p: WirePoly::from_poly(phi.denominator()),
            profile: phi.profile().0.clone(),
            degree: Some([phi.degree().0, phi.degree().1]),
        }
    }

    pub fn into_inner(self) -> Result<RationalInner> {
        RationalInner::new(
            self.m.into_poly()?,
            self.p.into_poly()?,
            DegreeProfile::new(self.profile),
        )
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WireGram {
    pub basis: Vec<[usize; 2]>,
    pub matrix: WireMatrix,
    pub denom: WirePoly,
}

impl WireGram {
    pub fn from_gram(g: &GramKernel) -> WireGram {
        WireGram {
            basis: g.basis().iter().map(|&(a, b)| [a, b]).collect(),
            matrix: WireMatrix::from_herm(g.matrix()),
            denom: WirePoly::from_poly(g.denominator()),
        }
    }

    pub fn into_gram(self) -> Result<GramKernel> {
        GramKernel::new(
            self.basis.iter().map(|&[a, b]| (a, b)).collect(),
            self.matrix.into_herm()?,
            self.denom.into_poly()?,
        )
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WireCertificate {
    pub residual_max: f64,
    pub points_used: usize,
    pub min_eig_k1: f64,
    pub min_eig_k2: f64,
    pub rank_k1: usize,
    pub rank_k2: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WireAglerPair {
    pub k1: WireGram,
    pub k2: WireGram,
    pub certificate: WireCertificate,
}

impl WireAglerPair {
    pub fn from_pair(pair: &AglerPair) -> WireAglerPair {
        let c = &pair.certificate;
        WireAglerPair {
            k1: WireGram::from_gram(&pair.k1),
            k2: WireGram::from_gram(&pair.k2),
            certificate: WireCertificate {
                residual_max: c.residual_max,
                points_used: c.points_used,
                min_eig_k1: c.min_eig_k1,
                min_eig_k2: c.min_eig_k2,
                rank_k1: c.rank_k1,
                rank_k2: c.rank_k2,
            },
        }
    }

    pub fn into_pair(self) -> Result<AglerPair> {
        Ok(AglerPair {
            k1: self.k1.into_gram()?,
            k2: self.k2.into_gram()?,
            certificate: DecomposeCertificate {
                residual_max: self.certificate.residual_max,
                points_used: self.certificate.points_used,
                min_eig_k1: self.certificate.min_eig_k1,
                min_eig_k2: self.certificate.min_eig_k2,
                rank_k1: self.certificate.rank_k1,
                rank_k2: self.certificate.rank_k2,
            },
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WireGridSpec {
    pub phases: usize,
    pub radii: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WireStabilityCertificate {
    pub stable: bool,
    /// Null when the margin is the +infinity sentinel (nonzero constants).
    pub c_estimate: Option<f64>,
    pub c_estimate_infinite: bool,
    pub min_modulus: f64,
    pub witness: Option<Vec<WireComplex>>,
    pub rigorous: bool,
    pub grid: WireGridSpec,
}

impl WireStabilityCertificate {
    pub fn from_cert(c: &StabilityCertificate) -> WireStabilityCertificate {
        let infinite = c.c_estimate.is_infinite();
        WireStabilityCertificate {
            stable: c.stable,
            c_estimate: if infinite { None } else { Some(c.c_estimate) },
            c_estimate_infinite: infinite,
            min_modulus: c.min_modulus,
            witness: c
                .witness
                .as_ref()
                .map(|w| w.iter().map(|&z| to_wire_c(z)).collect()),
            rigorous: c.rigorous,
            grid: WireGridSpec {
                phases: c.grid.phases,
                radii: c.grid.radii.clone(),
            },
        }
    }
}

pub fn grid_from_wire(g: &WireGridSpec) -> GridSpec {
    GridSpec {
        phases: g.phases,
        radii: g.radii.clone(),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WirePickData {
    pub nodes: Vec<[WireComplex; 2]>,
    pub targets: Vec<WireComplex>,
}

impl WirePickData {
    pub fn from_data(d: &PickData) -> WirePickData {
        WirePickData {
            nodes: d
                .nodes()
                .iter()
                .map(|n| [to_wire_c(n[0]), to_wire_c(n[1])])
                .collect(),
            targets: d.targets().iter().map(|&t| to_wire_c(t)).collect(),
        }
    }

    pub fn into_data(self) -> Result<PickData> {
        let nodes: Vec<Point2> = self
            .nodes
            .into_iter()
            .map(|[a, b]| [from_wire_c(a), from_wire_c(b)])
            .collect();
        PickData::new(nodes, self.targets.into_iter().map(from_wire_c).collect())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WirePickResult {
    pub status: String,
    pub k1: Option<WireMatrix>,
    pub k2: Option<WireMatrix>,
    pub residual: Option<f64>,
    pub min_eig_k1: f64,
    pub min_eig_k2: f64,
    pub iterations: usize,
    pub obstruction: Option<String>,
}

impl WirePickResult {
    pub fn from_result(r: &PickResult) -> WirePickResult {
        WirePickResult {
            status: match r.status {
                PickStatus::Feasible => "feasible".into(),
                PickStatus::InfeasibleEvidence => "infeasible_evidence".into(),
                PickStatus::Unknown => "unknown".into(),
            },
            k1: r.k1.as_ref().map(WireMatrix::from_herm),
            k2: r.k2.as_ref().map(WireMatrix::from_herm),
            residual: if r.residual.is_finite() {
                Some(r.residual)
            } else {
                None
            },
            min_eig_k1: r.min_eig_k1,
            min_eig_k2: r.min_eig_k2,
            iterations: r.iterations,
            obstruction: r.obstruction.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WireUniquenessReport {
    pub verdict: String,
    pub method: String,
    pub nullity: usize,
    pub basis_of_l: Vec<WirePoly>,
    pub torus_zeros: Vec<[WireComplex; 2]>,
    pub diagnostics: Option<String>,
}

impl WireUniquenessReport {
    pub fn from_report(r: &UniquenessReport) -> WireUniquenessReport {
        WireUniquenessReport {
            verdict: match r.verdict {
                UniquenessVerdict::Unique => "UNIQUE".into(),
                UniquenessVerdict::NotUnique => "NOT_UNIQUE".into(),
                UniquenessVerdict::Unknown => "UNKNOWN".into(),
            },
            method: match r.method {
                UniquenessMethod::OneVariableRule => "one_variable_rule".into(),
                UniquenessMethod::StableDenominator => "stable_denominator".into(),
                UniquenessMethod::TorusZeroNullspace => "torus_zero_nullspace".into(),
            },
            nullity: r.nullity,
            basis_of_l: r.basis_of_l.iter().map(WirePoly::from_poly).collect(),
            torus_zeros: r
                .torus_zeros
                .iter()
                .map(|z| [to_wire_c(z[0]), to_wire_c(z[1])])
                .collect(),
            diagnostics: r.diagnostics.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WireSupportReport {
    pub max_forbidden: [f64; 2],
    pub truncation: [usize; 2],
    pub tol: f64,
    pub pass: bool,
}

impl WireSupportReport {
    pub fn from_report(r: &SupportReport) -> WireSupportReport {
        WireSupportReport {
            max_forbidden: r.max_forbidden,
            truncation: r.truncation,
            tol: r.tol,
            pass: r.pass,
        }
    }
}

pub fn complex_to_wire(c: Complex64) -> WireComplex {
    to_wire_c(c)
}

pub fn complex_from_wire(c: WireComplex) -> Complex64 {
    from_wire_c(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poly_round_trip() {
        let p = Poly::from_terms(
            2,
            &[
                (&[0, 0], Complex64::new(3.0, 0.0)),
                (&[1, 1], Complex64::new(-1.0, 0.5)),
            ],
        )
        .unwrap();
        let json = serde_json::to_string(&WirePoly::from_poly(&p)).unwrap();
        let back: WirePoly = serde_json::from_str(&json).unwrap();
        assert_eq!(back.into_poly().unwrap(), p);
    }

    #[test]
    fn poly_wire_order_is_last_variable_fastest() {
        // 3 - z1 - z2 - z1 z2 must serialize as [3, -1, -1, -1].
        let p = Poly::from_terms(
            2,
            &[
                (&[0, 0], Complex64::new(3.0, 0.0)),
                (&[1, 0], Complex64::new(-1.0, 0.0)),
                (&[0, 1], Complex64::new(-1.0, 0.0)),
                (&[1, 1], Complex64::new(-1.0, 0.0)),
            ],
        )
        .unwrap();
        let w = WirePoly::from_poly(&p);
        let res: Vec<f64> = w.coeffs.iter().map(|c| c[0]).collect();
        assert_eq!(res, vec![3.0, -1.0, -1.0, -1.0]);
    }

    #[test]
    fn herm_matrix_round_trip_rejects_non_hermitian() {
        let w = WireMatrix {
            rows: 2,
            cols: 2,
            data: vec![[1.0, 0.0], [1.0, 0.0], [0.0, 0.0], [1.0, 0.0]],
        };
        assert!(w.into_herm().is_err());
    }
}
