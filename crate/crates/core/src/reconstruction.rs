//! Recovering a unitary representation from an invariant kernel.
//!
//! Each fiber space is `H(K^x)`, the span of the sections `K_chi` with
//! `r(chi) = x`, written in an orthonormal basis. The arrow `gamma` maps
//! `K_chi` to `K_{gamma chi}`; the least-squares residual of that linear
//! system certifies that the map is well defined on dependent sections.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::groupoid::{group_to_groupoid, Arrow, FiniteGroupoid, GroupTable, Point};
use crate::kernel::{
    check_invariance, kernel_from_representation, GroupoidKernel, DEFAULT_PSD_TOL,
};
use crate::linalg::{max_abs, max_abs_diff, submatrix, CMatrix, CVector, HermitianEigen};
use crate::representation::{
    HilbertFamily, RepresentationValidation, UnitaryRepresentation, VectorField,
};
use crate::rkhs::DEFAULT_RANK_TOL;

/// Default tolerance of the residual and round-trip checks.
pub const DEFAULT_RECONSTRUCTION_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct ReconstructedRepresentation {
    pub representation: UnitaryRepresentation,
    /// `coordinates[chi]` holds the coordinates of `K_chi` in the basis of
    /// `H(K^{r(chi)})`.
    pub coordinates: Vec<CVector>,
    /// Generator coefficients of each fiber's orthonormal basis.
    pub fiber_bases: Vec<CMatrix>,
    pub max_residual: f64,
    pub residual_threshold: f64,
    pub validation: RepresentationValidation,
}

impl ReconstructedRepresentation {
    pub fn fiber_ranks(&self) -> &[usize] {
        self.representation.family().dims()
    }

    /// `v(x)` = coordinates of `K_{e(x)}`; feeding it back through the
    /// representation retrieves the kernel.
    pub fn retrieval_field(&self) -> VectorField {
        let g = self.representation.groupoid();
        VectorField::new(
            g.points()
                .map(|x| self.coordinates[g.unit(x).0].clone())
                .collect(),
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RoundTripReport {
    pub passed: bool,
    pub tolerance: f64,
    pub max_deviation: f64,
    pub witness: (String, String),
    pub max_residual: f64,
    pub fiber_ranks_before: Vec<usize>,
    pub fiber_ranks_after: Vec<usize>,
}

struct FiberModel {
    basis: CMatrix,
    coords: CMatrix,
}

fn fiber_model(values: &CMatrix, fiber: &[Arrow], cutoff: f64) -> FiberModel {
    let idx: Vec<usize> = fiber.iter().map(|a| a.0).collect();
    let block = submatrix(values, &idx, &idx);
    let eig = HermitianEigen::new(&block);
    let r = eig.count_above(cutoff);
    let n = idx.len();
    let basis = CMatrix::from_fn(n, r, |i, j| eig.vectors[(i, j)] / eig.values[j].sqrt());
    let coords = basis.adjoint() * &block;
    FiberModel { basis, coords }
}

/// Builds the representation `K_chi ↦ K_{gamma chi}` on the fibers `H(K^x)`.
///
/// The kernel must be positive semidefinite and invariant; residuals are
/// accepted up to `tol * max(1, sqrt(ρ))` with `ρ` the spectral radius.
pub fn reconstruct(kernel: &GroupoidKernel, tol: f64) -> Result<ReconstructedRepresentation> {
    let psd = kernel.check_positive_definite(DEFAULT_PSD_TOL)?;
    if !psd.passed {
        return Err(Error::NotPositiveDefinite {
            min_eigenvalue: psd.min_eigenvalue,
            threshold: psd.threshold,
        });
    }
    let values = kernel.values();
    let scale = max_abs(values).max(1.0);
    let inv = check_invariance(kernel, tol * scale);
    if let Some((chi, gamma)) = inv.witnesses.first() {
        return Err(Error::InvarianceViolation {
            chi: chi.clone(),
            gamma: gamma.clone(),
            deviation: inv.max_deviation.max(inv.max_cross_fiber),
        });
    }

    let g: &Arc<FiniteGroupoid> = kernel.groupoid();
    let rho = psd.max_eigenvalue.max(0.0);
    let cutoff = DEFAULT_RANK_TOL * rho;
    let fibers: Vec<FiberModel> = g
        .points()
        .map(|x| fiber_model(values, g.out_fiber(x), cutoff))
        .collect();
    let coordinates: Vec<CVector> = g
        .arrows()
        .map(|a| {
            let f = &fibers[g.range(a).0];
            f.coords.column(g.out_fiber_position(a)).into_owned()
        })
        .collect();

    let threshold = tol * rho.sqrt().max(1.0);
    let mut max_residual = 0.0f64;
    let mut matrices = Vec::with_capacity(g.arrow_count());
    for gamma in g.arrows() {
        let (x, y) = (g.source(gamma), g.range(gamma));
        let domain = g.out_fiber(x);
        let target = &fibers[y.0];
        let d = CMatrix::from_fn(target.coords.nrows(), domain.len(), |i, j| {
            let moved = g
                .product(gamma, domain[j])
                .expect("composable by construction");
            target.coords[(i, g.out_fiber_position(moved))]
        });
        let m = &d * &fibers[x.0].basis;
        let (residual, (_, col)) = max_abs_diff(&(&m * &fibers[x.0].coords), &d);
        if residual > threshold || residual.is_nan() {
            return Err(Error::NotWellDefined {
                arrow: g.arrow_label(gamma).to_string(),
                witness: g.arrow_label(domain[col]).to_string(),
                residual,
            });
        }
        max_residual = max_residual.max(residual);
        matrices.push(m);
    }

    let family = HilbertFamily::new(fibers.iter().map(|f| f.basis.ncols()).collect());
    let representation = UnitaryRepresentation::new(g.clone(), family, matrices)?;
    let validation = representation.validate(threshold);
    if !validation.passed {
        return Err(Error::InvalidRepresentation(format!(
            "reconstructed matrices fail validation: {:?}",
            validation.issues.first()
        )));
    }
    Ok(ReconstructedRepresentation {
        representation,
        coordinates,
        fiber_bases: fibers.into_iter().map(|f| f.basis).collect(),
        max_residual,
        residual_threshold: threshold,
        validation,
    })
}

fn fiber_ranks(kernel: &GroupoidKernel) -> Vec<usize> {
    let g = kernel.groupoid();
    let rho = HermitianEigen::new(kernel.values()).spectral_radius();
    let cutoff = DEFAULT_RANK_TOL * rho;
    g.points()
        .map(|x: Point| HermitianEigen::new(&kernel.fiber_block(x)).count_above(cutoff))
        .collect()
}

/// Reconstructs, rebuilds the kernel from the retrieval field and compares.
pub fn round_trip(kernel: &GroupoidKernel, tol: f64) -> Result<RoundTripReport> {
    let rec = reconstruct(kernel, tol)?;
    let rebuilt = kernel_from_representation(&rec.representation, &rec.retrieval_field())?;
    let (max_deviation, (i, j)) = max_abs_diff(rebuilt.values(), kernel.values());
    let labels = kernel.labels();
    Ok(RoundTripReport {
        passed: max_deviation <= tol,
        tolerance: tol,
        max_deviation,
        witness: (labels[i].clone(), labels[j].clone()),
        max_residual: rec.max_residual,
        fiber_ranks_before: rec.fiber_ranks().to_vec(),
        fiber_ranks_after: fiber_ranks(&rebuilt),
    })
}

/// Reconstruction for a kernel on a finite group, `K(h, g) = K(g^-1 h, e)`.
pub fn group_reconstruct(
    group: &GroupTable,
    values: CMatrix,
    tol: f64,
) -> Result<ReconstructedRepresentation> {
    let g = Arc::new(group_to_groupoid(group)?);
    let kernel = GroupoidKernel::new(g, values)?;
    reconstruct(&kernel, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::pair_groupoid;
    use crate::kernel::{character_kernel, convolution_kernel};
    use crate::linalg::C64;
    use crate::representation::scalar_representation;
    use nalgebra::DVector;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn qubit_kernel(lambda: C64, vp: C64, vm: C64) -> GroupoidKernel {
        let g = Arc::new(pair_groupoid(&["+", "-"]).unwrap());
        let scalars: Vec<C64> = g
            .arrows()
            .map(|a| match g.arrow_label(a) {
                "(-,+)" => lambda,
                "(+,-)" => lambda.conj(),
                _ => c(1.0, 0.0),
            })
            .collect();
        let rep = scalar_representation(g, &scalars).unwrap();
        let v = VectorField::new(vec![
            DVector::from_element(1, vp),
            DVector::from_element(1, vm),
        ]);
        kernel_from_representation(&rep, &v).unwrap()
    }

    #[test]
    fn qubit_reconstruction_is_scalar_and_round_trips() {
        let k = qubit_kernel(c(0.0, 1.0), c(1.0, 0.0), c(2.0, 0.0));
        let rec = reconstruct(&k, DEFAULT_RECONSTRUCTION_TOL).unwrap();
        assert_eq!(rec.fiber_ranks(), &[1, 1]);
        for m in rec.representation.matrices() {
            assert_eq!(m.shape(), (1, 1));
            assert!((m[(0, 0)].norm() - 1.0).abs() < 1e-12);
        }
        let r = round_trip(&k, DEFAULT_RECONSTRUCTION_TOL).unwrap();
        assert!(r.passed, "{r:?}");
        assert_eq!(r.fiber_ranks_before, r.fiber_ranks_after);
    }

    #[test]
    fn character_kernel_acts_by_multiplication() {
        let g = Arc::new(pair_groupoid(&["+", "-"]).unwrap());
        let i = c(0.0, 1.0);
        let k = character_kernel(g.clone(), &[c(1.0, 0.0), -i, i, c(1.0, 0.0)], 1e-12).unwrap();
        let rec = reconstruct(&k, DEFAULT_RECONSTRUCTION_TOL).unwrap();
        // In the basis conj(k) on each fiber, U(gamma) = k(gamma). Our basis
        // may differ by a phase per fiber, which cancels on isotropy arrows.
        let alpha = g.arrow("(-,+)").unwrap();
        let alpha_inv = g.arrow("(+,-)").unwrap();
        let loop_ = rec.representation.matrix(alpha_inv) * rec.representation.matrix(alpha);
        assert!((loop_[(0, 0)] - c(1.0, 0.0)).norm() < 1e-12);
        // Coordinates map as K_chi -> K_{alpha chi}.
        for chi in g.out_fiber(g.source(alpha)) {
            let moved = g.product(alpha, *chi).unwrap();
            let lhs = rec.representation.matrix(alpha) * &rec.coordinates[chi.0];
            assert!((lhs - &rec.coordinates[moved.0]).norm() < 1e-12);
        }
    }

    #[test]
    fn delta_convolution_gives_left_regular_action() {
        let z3 = GroupTable::cyclic(3).unwrap();
        let gz = Arc::new(group_to_groupoid(&z3).unwrap());
        let k =
            convolution_kernel(gz.clone(), &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)], 1.0).unwrap();
        let rec = group_reconstruct(&z3, k.values().clone(), DEFAULT_RECONSTRUCTION_TOL).unwrap();
        assert_eq!(rec.fiber_ranks(), &[3]);
        for g in gz.arrows() {
            for h in gz.arrows() {
                let gh = gz.product(g, h).unwrap();
                let lhs = rec.representation.matrix(g) * &rec.coordinates[h.0];
                assert!((lhs - &rec.coordinates[gh.0]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn group_kernels() {
        let z2 = GroupTable::cyclic(2).unwrap();
        let m =
            CMatrix::from_row_slice(2, 2, &[c(5.0, 0.0), c(4.0, 0.0), c(4.0, 0.0), c(5.0, 0.0)]);
        let rec = group_reconstruct(&z2, m.clone(), DEFAULT_RECONSTRUCTION_TOL).unwrap();
        assert_eq!(rec.fiber_ranks(), &[2]);
        let k = GroupoidKernel::new(Arc::new(group_to_groupoid(&z2).unwrap()), m).unwrap();
        assert!(round_trip(&k, DEFAULT_RECONSTRUCTION_TOL).unwrap().passed);

        let z3 = GroupTable::cyclic(3).unwrap();
        let ones = CMatrix::from_element(3, 3, c(1.0, 0.0));
        let rec = group_reconstruct(&z3, ones, DEFAULT_RECONSTRUCTION_TOL).unwrap();
        assert_eq!(rec.fiber_ranks(), &[1]);
        for m in rec.representation.matrices() {
            assert!((m[(0, 0)] - c(1.0, 0.0)).norm() < 1e-12);
        }

        let mut bad = CMatrix::from_element(3, 3, c(1.0, 0.0));
        bad[(0, 0)] = c(1.001, 0.0);
        assert!(matches!(
            group_reconstruct(&z3, bad, DEFAULT_RECONSTRUCTION_TOL),
            Err(Error::InvarianceViolation { .. })
        ));
    }

    #[test]
    fn vanishing_field_gives_zero_dimensional_fibers() {
        let g = Arc::new(pair_groupoid(&["a", "b"]).unwrap());
        let k = GroupoidKernel::new(g, CMatrix::zeros(4, 4)).unwrap();
        let rec = reconstruct(&k, DEFAULT_RECONSTRUCTION_TOL).unwrap();
        assert_eq!(rec.fiber_ranks(), &[0, 0]);
        assert!(rec.validation.passed);
        assert!(round_trip(&k, DEFAULT_RECONSTRUCTION_TOL).unwrap().passed);
    }
}
