//! Bidisk interpolation feasibility: find positive kernels K1, K2 on the
//! node set with
//! `1 - mu_i conj(mu_j) = (1 - l1_i conj(l1_j)) K2 + (1 - l2_i conj(l2_j)) K1`,
//! plus the classical one-variable test.
//!
//! Feasibility of the kernel system is exactly interpolability; the
//! interpolant itself is not synthesized here.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::points::Point2;
use crate::sdpcore::{
    affine_psd_feasibility, hermitian_eig, AffineConstraintSet, FeasStatus, HermMatrix,
    SolverConfig, Term,
};

/// Interpolation data: nodes strictly inside the bidisk, targets in the
/// closed unit disk.
#[derive(Debug, Clone)]
pub struct PickData {
    nodes: Vec<Point2>,
    targets: Vec<Complex64>,
}

impl PickData {
    pub fn new(nodes: Vec<Point2>, targets: Vec<Complex64>) -> Result<PickData> {
        if nodes.is_empty() || nodes.len() != targets.len() {
            return Err(Error::DimensionMismatch {
                expected: nodes.len(),
                got: targets.len(),
            });
        }
        for node in &nodes {
            for (axis, c) in node.iter().enumerate() {
                if c.norm() >= 1.0 {
                    return Err(Error::PointOutsideDomain {
                        axis,
                        modulus: c.norm(),
                    });
                }
            }
        }
        for mu in &targets {
            if mu.norm() > 1.0 {
                return Err(Error::InvalidInput(format!(
                    "target has modulus {} > 1",
                    mu.norm()
                )));
            }
        }
        Ok(PickData { nodes, targets })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Point2] {
        &self.nodes
    }

    pub fn targets(&self) -> &[Complex64] {
        &self.targets
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PickStatus {
    Feasible,
    InfeasibleEvidence,
    Unknown,
}

#[derive(Debug, Clone)]
pub struct PickResult {
    pub status: PickStatus,
    /// Kernel matrices; populated for feasible results and carrying the
    /// stalled iterate for unknown ones.
    pub k1: Option<HermMatrix>,
    pub k2: Option<HermMatrix>,
    /// Max interpolation-equation residual of the returned matrices.
    pub residual: f64,
    pub min_eig_k1: f64,
    pub min_eig_k2: f64,
    pub iterations: usize,
    /// Description of the certified obstruction, when one exists.
    pub obstruction: Option<String>,
}

#[derive(Debug, Clone)]
pub struct PickConfig {
    pub solver: SolverConfig,
    /// Feasible results must reproduce the equations within this bound.
    pub residual_limit: f64,
    pub eig_floor: f64,
    /// Dense-system guard: the constraint system has n^2 rows.
    pub max_nodes: usize,
}

impl Default for PickConfig {
    fn default() -> Self {
        PickConfig {
            solver: SolverConfig::default(),
            residual_limit: 1e-8,
            eig_floor: 1e-9,
            max_nodes: 64,
        }
    }
}

fn equation_residual(data: &PickData, k1: &HermMatrix, k2: &HermMatrix) -> f64 {
    let n = data.len();
    let one = Complex64::new(1.0, 0.0);
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let lhs = one - data.targets[i] * data.targets[j].conj();
            let rhs = (one - data.nodes[i][0] * data.nodes[j][0].conj()) * k2.get(i, j)
                + (one - data.nodes[i][1] * data.nodes[j][1].conj()) * k1.get(i, j);
            worst = worst.max((lhs - rhs).norm());
        }
    }
    worst
}

/// Looks for a certified obstruction in the special case where one node
/// coordinate is constant. With coordinate r constant, the equations read
/// `s_r K_{other} + G ∘ K_r = M` with `s_r > 0` and
/// `G = ones - h h*`; Schur-multiplying by the rank-one `h h*` is a diagonal
/// conjugation, and the diagonal equations bound the kernel diagonals, so a
/// direction `v` with `v* M v` below the resulting error bound contradicts
/// positivity of any feasible pair.
fn constant_coordinate_obstruction(data: &PickData) -> Result<Option<(f64, String)>> {
    let n = data.len();
    let one = Complex64::new(1.0, 0.0);
    for fixed in 0..2 {
        let c0 = data.nodes[0][fixed];
        if !data.nodes.iter().all(|nd| nd[fixed] == c0) {
            continue;
        }
        let other = 1 - fixed;
        let m = HermMatrix::from_fn(n, |i, j| one - data.targets[i] * data.targets[j].conj())?;
        let eig = hermitian_eig(&m)?;
        let lam_min = eig.min();
        if lam_min >= 0.0 {
            continue;
        }
        // Unit eigenvector for the most negative direction.
        let k = n - 1;
        let v: Vec<Complex64> = (0..n).map(|i| eig.vectors.get(i, k)).collect();
        let mut bound = 0.0f64;
        for i in 0..n {
            let denom = 1.0 - data.nodes[i][other].norm_sqr();
            let diag_cap = ((1.0 - data.targets[i].norm_sqr()) / denom).max(0.0);
            bound += data.nodes[i][other].norm() * v[i].norm() * diag_cap.sqrt();
        }
        let bound = bound * bound;
        if lam_min + bound < -1e-12 {
            let axis = fixed + 1;
            return Ok(Some((
                lam_min,
                format!(
                    "all nodes share coordinate {axis}; the equations force a positive \
                     combination of PSD kernels to match a matrix with eigenvalue {lam_min:.6e} \
                     (error bound {bound:.3e})"
                ),
            )));
        }
    }
    Ok(None)
}

/// Decides feasibility of the kernel system.
pub fn pick_feasible(data: &PickData, cfg: &PickConfig) -> Result<PickResult> {
    let n = data.len();
    if n > cfg.max_nodes {
        return Err(Error::InvalidInput(format!(
            "{n} nodes exceed the configured cap of {}",
            cfg.max_nodes
        )));
    }

    // Duplicate nodes are structurally decided before any solve.
    for i in 0..n {
        for j in (i + 1)..n {
            if data.nodes[i] == data.nodes[j] {
                if data.targets[i] != data.targets[j] {
                    return Ok(PickResult {
                        status: PickStatus::InfeasibleEvidence,
                        k1: None,
                        k2: None,
                        residual: f64::INFINITY,
                        min_eig_k1: 0.0,
                        min_eig_k2: 0.0,
                        iterations: 0,
                        obstruction: Some(format!(
                            "nodes {i} and {j} coincide with different targets"
                        )),
                    });
                }
            }
        }
    }

    if let Some((lam_min, description)) = constant_coordinate_obstruction(data)? {
        return Ok(PickResult {
            status: PickStatus::InfeasibleEvidence,
            k1: None,
            k2: None,
            residual: f64::INFINITY,
            min_eig_k1: lam_min,
            min_eig_k2: lam_min,
            iterations: 0,
            obstruction: Some(description),
        });
    }

    let one = Complex64::new(1.0, 0.0);
    let mut cs = AffineConstraintSet::new();
    for i in 0..n {
        for j in i..n {
            let target = one - data.targets[i] * data.targets[j].conj();
            let terms = vec![
                Term {
                    unknown: 1,
                    row: i,
                    col: j,
                    weight: one - data.nodes[i][0] * data.nodes[j][0].conj(),
                },
                Term {
                    unknown: 0,
                    row: i,
                    col: j,
                    weight: one - data.nodes[i][1] * data.nodes[j][1].conj(),
                },
            ];
            cs.push(terms, target);
        }
    }
    let res = affine_psd_feasibility(&cs, &[n, n], &cfg.solver)?;
    let k1 = res.solution[0].clone();
    let k2 = res.solution[1].clone();
    let residual = equation_residual(data, &k1, &k2);
    let min_eig_k1 = hermitian_eig(&k1)?.min();
    let min_eig_k2 = hermitian_eig(&k2)?.min();

    let feasible = res.status == FeasStatus::Feasible
        && residual <= cfg.residual_limit
        && min_eig_k1 >= -cfg.eig_floor
        && min_eig_k2 >= -cfg.eig_floor;
    Ok(PickResult {
        status: if feasible {
            PickStatus::Feasible
        } else {
            PickStatus::Unknown
        },
        k1: Some(k1),
        k2: Some(k2),
        residual,
        min_eig_k1,
        min_eig_k2,
        iterations: res.iterations,
        obstruction: None,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct OneVarReport {
    pub feasible: bool,
    pub min_eig: f64,
}

/// Classical one-variable test: positivity of the matrix
/// `(1 - mu_i conj(mu_j)) / (1 - l_i conj(l_j))`.
pub fn pick_one_var(nodes: &[Complex64], targets: &[Complex64], tol: f64) -> Result<OneVarReport> {
    if nodes.is_empty() || nodes.len() != targets.len() {
        return Err(Error::DimensionMismatch {
            expected: nodes.len(),
            got: targets.len(),
        });
    }
    for l in nodes {
        if l.norm() >= 1.0 {
            return Err(Error::PointOutsideDomain {
                axis: 0,
                modulus: l.norm(),
            });
        }
    }
    let n = nodes.len();
    let one = Complex64::new(1.0, 0.0);
    let pick = HermMatrix::from_fn(n, |i, j| {
        (one - targets[i] * targets[j].conj()) / (one - nodes[i] * nodes[j].conj())
    })?;
    let min_eig = hermitian_eig(&pick)?.min();
    Ok(OneVarReport {
        feasible: min_eig >= -tol,
        min_eig,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn re(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn pt(a: f64, b: f64) -> Point2 {
        [re(a), re(b)]
    }

    #[test]
    fn single_node_is_feasible() {
        let data = PickData::new(vec![pt(0.0, 0.0)], vec![re(0.5)]).unwrap();
        let r = pick_feasible(&data, &PickConfig::default()).unwrap();
        assert_eq!(r.status, PickStatus::Feasible);
        // Any split works; the equation pins K1 + K2 = 0.75.
        let total = r.k1.unwrap().get(0, 0) + r.k2.unwrap().get(0, 0);
        assert!((total - re(0.75)).norm() < 1e-8);
    }

    #[test]
    fn duplicate_nodes_with_mismatched_targets() {
        let data = PickData::new(vec![pt(0.0, 0.0), pt(0.0, 0.0)], vec![re(0.0), re(0.5)])
            .unwrap();
        let r = pick_feasible(&data, &PickConfig::default()).unwrap();
        assert_eq!(r.status, PickStatus::InfeasibleEvidence);
        assert!(r.obstruction.unwrap().contains("coincide"));
    }

    #[test]
    fn perturbed_duplicate_is_certified_infeasible() {
        // Nudging the duplicate off by 1e-9 exercises the solver-path
        // obstruction: the second coordinate is constant, and the target
        // matrix [[1, 1], [1, 0.75]] has determinant -0.25.
        let data = PickData::new(
            vec![pt(0.0, 0.0), pt(1e-9, 0.0)],
            vec![re(0.0), re(0.5)],
        )
        .unwrap();
        let r = pick_feasible(&data, &PickConfig::default()).unwrap();
        assert_eq!(r.status, PickStatus::InfeasibleEvidence);
        let lam_min = (1.75 - ((1.0f64 - 0.75).powi(2) + 4.0).sqrt()) / 2.0;
        assert!((r.min_eig_k1 - lam_min).abs() < 1e-9);
    }

    #[test]
    fn coordinate_function_data_is_feasible() {
        let data = PickData::new(
            vec![pt(0.0, 0.0), pt(0.5, 0.0)],
            vec![re(0.0), re(0.5)],
        )
        .unwrap();
        let r = pick_feasible(&data, &PickConfig::default()).unwrap();
        assert_eq!(r.status, PickStatus::Feasible, "residual {}", r.residual);
        assert!(r.residual <= 1e-8);
        assert!(r.min_eig_k1 >= -1e-9 && r.min_eig_k2 >= -1e-9);
    }

    #[test]
    fn feasible_instance_not_rejected_by_obstruction_scan() {
        // Same shape as the certified-infeasible case but with consistent
        // targets: the bound must keep the scan from firing.
        let data = PickData::new(
            vec![pt(0.0, 0.0), pt(0.5, 0.0)],
            vec![re(0.0), re(0.5)],
        )
        .unwrap();
        assert!(constant_coordinate_obstruction(&data).unwrap().is_none());
    }

    #[test]
    fn one_var_examples() {
        let r = pick_one_var(&[re(0.0)], &[re(0.0)], 1e-10).unwrap();
        assert!(r.feasible);

        let r = pick_one_var(&[re(0.0), re(0.5)], &[re(0.0), re(0.5)], 1e-10).unwrap();
        assert!(r.feasible);

        // Schwarz violation: small node, large target.
        let r = pick_one_var(&[re(0.0), re(0.1)], &[re(0.0), re(0.9)], 1e-10).unwrap();
        assert!(!r.feasible);
        // 2x2 determinant oracle: [[1, 1], [1, 0.19/0.99]] is indefinite.
        let d = 0.19f64 / 0.99;
        let lam_min = ((1.0 + d) - ((1.0 - d).powi(2) + 4.0).sqrt()) / 2.0;
        assert!((r.min_eig - lam_min).abs() < 1e-12);
    }

    #[test]
    fn one_variable_restriction_consistency() {
        // Targets from the identity map on the first coordinate.
        let nodes = vec![pt(0.1, 0.0), pt(-0.4, 0.0), pt(0.3, 0.0)];
        let targets: Vec<Complex64> = nodes.iter().map(|z| z[0]).collect();
        let lambda1: Vec<Complex64> = nodes.iter().map(|z| z[0]).collect();
        let one_var = pick_one_var(&lambda1, &targets, 1e-10).unwrap();
        assert!(one_var.feasible);
        let data = PickData::new(nodes, targets).unwrap();
        let r = pick_feasible(&data, &PickConfig::default()).unwrap();
        assert_eq!(r.status, PickStatus::Feasible);
    }

    #[test]
    fn feasibility_is_monotone_under_subsetting() {
        // Product-function targets on four nodes, then all 2- and 3-subsets.
        let nodes = vec![
            pt(0.0, 0.0),
            pt(0.4, 0.2),
            pt(-0.3, 0.5),
            pt(0.2, -0.6),
        ];
        let targets: Vec<Complex64> = nodes.iter().map(|z| z[0] * z[1]).collect();
        let full = PickData::new(nodes.clone(), targets.clone()).unwrap();
        let r = pick_feasible(&full, &PickConfig::default()).unwrap();
        assert_eq!(r.status, PickStatus::Feasible);
        let n = nodes.len();
        for mask in 1u32..(1 << n) {
            if mask.count_ones() < 2 || mask.count_ones() == n as u32 {
                continue;
            }
            let sub_nodes: Vec<Point2> = (0..n)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| nodes[i])
                .collect();
            let sub_targets: Vec<Complex64> = (0..n)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| targets[i])
                .collect();
            let sub = PickData::new(sub_nodes, sub_targets).unwrap();
            let r = pick_feasible(&sub, &PickConfig::default()).unwrap();
            assert_eq!(r.status, PickStatus::Feasible, "mask {mask:b}");
        }
    }
}
