//! Reproducing kernel Hilbert spaces over a finite index set.
//!
//! Generators are the kernel sections `K_i = K(·, i)`. A function is stored
//! by its coefficients against the generators, `f = Σ c_i K_i`, so that
//! `f(j) = (K c)_j` and `⟨f, g⟩ = d† K c` for `g = Σ d_i K_i`.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::groupoid::FiniteGroupoid;
use crate::kernel::{check_positive_definite, GroupoidKernel, DEFAULT_PSD_TOL};
use crate::linalg::{
    identity_deviation, inner, max_abs_diff, submatrix, CMatrix, CVector, HermitianEigen, C64,
};
use crate::representation::{UnitaryRepresentation, VectorField};

/// Relative eigenvalue cutoff below which directions count as zero.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct RkhsFunction {
    pub coefficients: CVector,
}

impl RkhsFunction {
    pub fn new(coefficients: CVector) -> Self {
        Self { coefficients }
    }

    pub fn zero(n: usize) -> Self {
        Self::new(CVector::zeros(n))
    }

    /// The generator `K_i`.
    pub fn generator(n: usize, i: usize) -> Self {
        let mut c = CVector::zeros(n);
        c[i] = C64::new(1.0, 0.0);
        Self::new(c)
    }
}

#[derive(Clone, Debug)]
pub struct RkhsModel {
    groupoid: Option<Arc<FiniteGroupoid>>,
    labels: Vec<String>,
    values: CMatrix,
    gram: CMatrix,
    eigen: HermitianEigen,
    cutoff: f64,
    rank: usize,
    onb: CMatrix,
    fiber_ranks: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReproducingReport {
    pub passed: bool,
    pub max_deviation: f64,
    pub witness: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParsevalReport {
    pub passed: bool,
    pub frame_size: usize,
    pub max_deviation: f64,
    pub witness: Option<(String, String)>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FiberDecompositionReport {
    pub passed: bool,
    pub rank: usize,
    pub fiber_ranks: Vec<(String, usize)>,
    pub max_cross_fiber: f64,
    pub witness: Option<(String, String)>,
}

/// Checks positive semidefiniteness, then factors the kernel.
pub fn build_rkhs(kernel: &GroupoidKernel, rank_tol: f64) -> Result<RkhsModel> {
    RkhsModel::build(
        Some(kernel.groupoid().clone()),
        kernel.labels().to_vec(),
        kernel.values().clone(),
        rank_tol,
    )
}

impl RkhsModel {
    /// Model of a bare positive semidefinite matrix, with one fiber.
    pub fn from_matrix(values: CMatrix, rank_tol: f64) -> Result<Self> {
        let labels = (0..values.nrows()).map(|i| i.to_string()).collect();
        Self::build(None, labels, values, rank_tol)
    }

    fn build(
        groupoid: Option<Arc<FiniteGroupoid>>,
        labels: Vec<String>,
        values: CMatrix,
        rank_tol: f64,
    ) -> Result<Self> {
        if rank_tol.is_nan() || rank_tol < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "rank tolerance must be nonnegative, got {rank_tol}"
            )));
        }
        let psd = check_positive_definite(&values, DEFAULT_PSD_TOL)?;
        if !psd.passed {
            return Err(Error::NotPositiveDefinite {
                min_eigenvalue: psd.min_eigenvalue,
                threshold: psd.threshold,
            });
        }
        let eigen = HermitianEigen::new(&values);
        let cutoff = rank_tol * eigen.max().max(0.0);
        let rank = eigen.count_above(cutoff);
        let onb = scaled_eigenvectors(&eigen, rank, |l| 1.0 / l.sqrt());
        let fiber_ranks = match &groupoid {
            Some(g) => g
                .points()
                .map(|x| {
                    let idx: Vec<usize> = g.out_fiber(x).iter().map(|a| a.0).collect();
                    HermitianEigen::new(&submatrix(&values, &idx, &idx)).count_above(cutoff)
                })
                .collect(),
            None => vec![rank],
        };
        Ok(Self {
            groupoid,
            labels,
            gram: values.clone(),
            values,
            eigen,
            cutoff,
            rank,
            onb,
            fiber_ranks,
        })
    }

    pub fn size(&self) -> usize {
        self.values.nrows()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn groupoid(&self) -> Option<&Arc<FiniteGroupoid>> {
        self.groupoid.as_ref()
    }

    pub fn kernel_values(&self) -> &CMatrix {
        &self.values
    }

    /// `gram[(j, i)] = ⟨K_i, K_j⟩`.
    pub fn gram(&self) -> &CMatrix {
        &self.gram
    }

    /// Mutable Gram matrix, for fault injection in diagnostics.
    pub fn gram_mut(&mut self) -> &mut CMatrix {
        &mut self.gram
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigen.values
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    /// Generator coefficients of an orthonormal basis, one column per vector.
    pub fn onb(&self) -> &CMatrix {
        &self.onb
    }

    pub fn onb_functions(&self) -> Vec<RkhsFunction> {
        self.onb
            .column_iter()
            .map(|c| RkhsFunction::new(c.into_owned()))
            .collect()
    }

    /// Largest entry of `onb† gram onb - I`.
    pub fn onb_deviation(&self) -> f64 {
        identity_deviation(&(self.onb.adjoint() * &self.gram * &self.onb))
    }

    /// Rank of each range-fiber block, in base-point order.
    pub fn fiber_ranks(&self) -> Vec<(String, usize)> {
        match &self.groupoid {
            Some(g) => g
                .point_labels()
                .iter()
                .cloned()
                .zip(self.fiber_ranks.iter().copied())
                .collect(),
            None => vec![("*".to_string(), self.rank)],
        }
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownArrow(label.to_string()))
    }

    fn conform(&self, f: &RkhsFunction) -> Result<()> {
        if f.coefficients.len() != self.size() {
            return Err(Error::ShapeMismatch {
                what: "function coefficients".into(),
                expected: (self.size(), 1),
                found: (f.coefficients.len(), 1),
            });
        }
        Ok(())
    }

    /// `f(chi) = Σ c_i K(chi, i)`.
    pub fn evaluate(&self, f: &RkhsFunction, chi: usize) -> Result<C64> {
        self.conform(f)?;
        if chi >= self.size() {
            return Err(Error::InvalidArgument(format!(
                "index {chi} out of range for {} generators",
                self.size()
            )));
        }
        Ok(self.values.row(chi).transpose().dot(&f.coefficients))
    }

    /// Values of `f` on every index.
    pub fn values_of(&self, f: &RkhsFunction) -> Result<CVector> {
        self.conform(f)?;
        Ok(&self.values * &f.coefficients)
    }

    /// `⟨f, g⟩ = d† G c`, linear in `f`.
    pub fn inner_product(&self, f: &RkhsFunction, g: &RkhsFunction) -> Result<C64> {
        self.conform(f)?;
        self.conform(g)?;
        Ok(inner(&(&self.gram * &f.coefficients), &g.coefficients))
    }

    pub fn norm(&self, f: &RkhsFunction) -> Result<f64> {
        Ok(self.inner_product(f, f)?.re.max(0.0).sqrt())
    }

    /// Compares `f(chi)` with `⟨f, K_chi⟩` on every index.
    pub fn reproducing_check(&self, f: &RkhsFunction, tol: f64) -> Result<ReproducingReport> {
        let values = self.values_of(f)?;
        let n = self.size();
        let mut max_deviation = 0.0f64;
        let mut witness = None;
        for chi in 0..n {
            let via_inner = self.inner_product(f, &RkhsFunction::generator(n, chi))?;
            let d = (values[chi] - via_inner).norm();
            if (d > tol || d.is_nan()) && witness.is_none() {
                witness = Some(self.labels[chi].clone());
            }
            max_deviation = max_deviation.max(d);
        }
        Ok(ReproducingReport {
            passed: witness.is_none(),
            max_deviation,
            witness,
        })
    }

    /// Compares `Σ_j φ_j(chi) conj(φ_j(gamma))` with `K(chi, gamma)`.
    pub fn parseval_check(&self, frame: &[RkhsFunction], tol: f64) -> Result<ParsevalReport> {
        let n = self.size();
        let mut sum = CMatrix::zeros(n, n);
        for phi in frame {
            let v = self.values_of(phi)?;
            sum += &v * v.adjoint();
        }
        let (max_deviation, (i, j)) = max_abs_diff(&sum, &self.values);
        let passed = max_deviation <= tol;
        Ok(ParsevalReport {
            passed,
            frame_size: frame.len(),
            max_deviation,
            witness: (!passed).then(|| (self.labels[i].clone(), self.labels[j].clone())),
        })
    }

    /// Minimum-norm element whose values best match `values`, with the
    /// largest pointwise mismatch (zero iff the values lie in the space).
    pub fn function_from_values(&self, values: &CVector) -> Result<(RkhsFunction, f64)> {
        if values.len() != self.size() {
            return Err(Error::ShapeMismatch {
                what: "function values".into(),
                expected: (self.size(), 1),
                found: (values.len(), 1),
            });
        }
        let pinv = scaled_eigenvectors(&self.eigen, self.rank, |l| 1.0 / l);
        let u = scaled_eigenvectors(&self.eigen, self.rank, |_| 1.0);
        let c = pinv * (u.adjoint() * values);
        let f = RkhsFunction::new(c);
        let back = self.values_of(&f)?;
        let residual = (back - values).iter().fold(0.0f64, |m, z| m.max(z.norm()));
        Ok((f, residual))
    }

    /// Cross-fiber Gram entries must vanish and ranks must add up.
    pub fn fiber_decomposition_check(&self, tol: f64) -> Result<FiberDecompositionReport> {
        let g = self.groupoid.as_ref().ok_or_else(|| {
            Error::InvalidArgument("fiber decomposition needs a groupoid-backed kernel".into())
        })?;
        let mut max_cross = 0.0f64;
        let mut witness = None;
        for chi in g.arrows() {
            for gamma in g.arrows() {
                if g.range(chi) != g.range(gamma) {
                    let d = self.gram[(chi.0, gamma.0)].norm();
                    if d > tol && witness.is_none() {
                        witness = Some((self.labels[chi.0].clone(), self.labels[gamma.0].clone()));
                    }
                    max_cross = max_cross.max(d);
                }
            }
        }
        let sum: usize = self.fiber_ranks.iter().sum();
        Ok(FiberDecompositionReport {
            passed: witness.is_none() && sum == self.rank,
            rank: self.rank,
            fiber_ranks: self.fiber_ranks(),
            max_cross_fiber: max_cross,
            witness,
        })
    }
}

/// First `rank` eigenvector columns, column `j` scaled by `scale(λ_j)`.
fn scaled_eigenvectors(eigen: &HermitianEigen, rank: usize, scale: impl Fn(f64) -> f64) -> CMatrix {
    let n = eigen.vectors.nrows();
    CMatrix::from_fn(n, rank, |i, j| {
        eigen.vectors[(i, j)] * scale(eigen.values[j])
    })
}

/// The feature map `γ ↦ F(γ) = U(γ) v(s(γ))`, placed in the concatenation of
/// the fibers `H_x` at the block of `r(γ)`.
#[derive(Clone, Debug)]
pub struct FeatureMap {
    dim: usize,
    features: Vec<CVector>,
}

/// Image `Tw` of a vector under the analysis map `(Tw)(γ) = ⟨w, F(γ)⟩`.
#[derive(Clone, Debug)]
pub struct Embedding {
    pub values: CVector,
    pub function: RkhsFunction,
    pub norm: f64,
    /// Largest mismatch between `values` and the recovered function.
    pub residual: f64,
}

impl FeatureMap {
    pub fn new(rep: &UnitaryRepresentation, v: &VectorField) -> Result<Self> {
        v.conforms_to(rep.family())?;
        let g = rep.groupoid();
        let family = rep.family();
        let dim = family.total();
        let features = g
            .arrows()
            .map(|a| {
                let mut full = CVector::zeros(dim);
                let off = family.offset(g.range(a));
                let f = rep.feature(v, a);
                full.rows_mut(off, f.len()).copy_from(&f);
                full
            })
            .collect();
        Ok(Self { dim, features })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn features(&self) -> &[CVector] {
        &self.features
    }

    /// `⟨F(γ), F(χ)⟩` at `(χ, γ)`.
    pub fn kernel_values(&self) -> CMatrix {
        let n = self.features.len();
        CMatrix::from_fn(n, n, |chi, gamma| {
            inner(&self.features[gamma], &self.features[chi])
        })
    }

    /// `T w`, with coefficients recovered through the model's pseudo-inverse.
    pub fn embed_t(&self, model: &RkhsModel, w: &CVector) -> Result<Embedding> {
        if w.len() != self.dim {
            return Err(Error::ShapeMismatch {
                what: "vector in the representation space".into(),
                expected: (self.dim, 1),
                found: (w.len(), 1),
            });
        }
        if model.size() != self.features.len() {
            return Err(Error::GroupoidMismatch);
        }
        let values = CVector::from_iterator(
            self.features.len(),
            self.features.iter().map(|f| inner(w, f)),
        );
        let (function, residual) = model.function_from_values(&values)?;
        let norm = model.norm(&function)?;
        Ok(Embedding {
            values,
            function,
            norm,
            residual,
        })
    }

    /// `S f = Σ c_i F(γ_i)`; in particular `S K_γ = F(γ)`.
    pub fn embed_s(&self, f: &RkhsFunction) -> Result<CVector> {
        if f.coefficients.len() != self.features.len() {
            return Err(Error::ShapeMismatch {
                what: "function coefficients".into(),
                expected: (self.features.len(), 1),
                found: (f.coefficients.len(), 1),
            });
        }
        Ok(self
            .features
            .iter()
            .zip(f.coefficients.iter())
            .fold(CVector::zeros(self.dim), |acc, (feat, c)| acc + feat * *c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::pair_groupoid;
    use crate::kernel::kernel_from_representation;
    use crate::representation::{scalar_representation, trivial_representation};
    use nalgebra::DVector;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn qubit(lambda: C64, vp: C64, vm: C64) -> (UnitaryRepresentation, VectorField) {
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
        (rep, v)
    }

    fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> CVector {
        CVector::from_fn(n, |_, _| {
            c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        })
    }

    #[test]
    fn qubit_model_and_phi_functions() {
        let lambda = c(0.0, 1.0);
        let (vp, vm) = (c(1.0, 0.0), c(2.0, 0.0));
        let (rep, v) = qubit(lambda, vp, vm);
        let k = kernel_from_representation(&rep, &v).unwrap();
        let m = build_rkhs(&k, DEFAULT_RANK_TOL).unwrap();
        assert_eq!(m.rank(), 2);
        assert_eq!(
            m.fiber_ranks(),
            vec![("+".to_string(), 1), ("-".to_string(), 1)]
        );

        // Order (+,+), (+,-), (-,+), (-,-) is e(+), alpha^-1, alpha, e(-).
        let z = c(0.0, 0.0);
        let phi_plus = DVector::from_vec(vec![vp.conj(), lambda * vm.conj(), z, z]);
        let phi_minus = DVector::from_vec(vec![z, z, lambda.conj() * vp.conj(), vm.conj()]);
        let (fp, rp) = m.function_from_values(&phi_plus).unwrap();
        let (fm, rm) = m.function_from_values(&phi_minus).unwrap();
        assert!(rp < 1e-12 && rm < 1e-12);
        assert!((m.evaluate(&fp, 1).unwrap() - c(0.0, 2.0)).norm() < 1e-12);
        assert!((m.inner_product(&fp, &fp).unwrap() - c(1.0, 0.0)).norm() < 1e-12);
        assert!((m.inner_product(&fm, &fm).unwrap() - c(1.0, 0.0)).norm() < 1e-12);
        assert!(m.inner_product(&fp, &fm).unwrap().norm() < 1e-12);
        assert!(m.parseval_check(&[fp.clone(), fm], 1e-12).unwrap().passed);
        assert!(!m.parseval_check(&[fp], 1e-12).unwrap().passed);
        assert!(m.fiber_decomposition_check(1e-12).unwrap().passed);
    }

    #[test]
    fn identity_kernel_model() {
        let m = RkhsModel::from_matrix(CMatrix::identity(3, 3), DEFAULT_RANK_TOL).unwrap();
        assert_eq!(m.rank(), 3);
        assert!(m.onb_deviation() < 1e-12);
        let f = RkhsFunction::generator(3, 1);
        assert_eq!(m.evaluate(&f, 1).unwrap(), c(1.0, 0.0));
        assert_eq!(m.evaluate(&RkhsFunction::zero(3), 2).unwrap(), c(0.0, 0.0));
        assert!(m.evaluate(&f, 3).is_err());
        assert!(m.evaluate(&RkhsFunction::zero(2), 0).is_err());
    }

    #[test]
    fn indefinite_matrix_is_rejected() {
        let m =
            CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        assert!(matches!(
            RkhsModel::from_matrix(m, DEFAULT_RANK_TOL),
            Err(Error::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn trivial_representation_has_one_summand_per_fiber() {
        let g = Arc::new(pair_groupoid(&["1", "2", "3"]).unwrap());
        let rep = trivial_representation(g, 1).unwrap();
        let field = |values: [C64; 3]| {
            VectorField::new(
                values
                    .iter()
                    .map(|&z| DVector::from_element(1, z))
                    .collect(),
            )
        };
        let ranks = |v: &VectorField| {
            let m = build_rkhs(
                &kernel_from_representation(&rep, v).unwrap(),
                DEFAULT_RANK_TOL,
            )
            .unwrap();
            assert!(m.fiber_decomposition_check(1e-12).unwrap().passed);
            (
                m.rank(),
                m.fiber_ranks()
                    .into_iter()
                    .map(|(_, r)| r)
                    .collect::<Vec<_>>(),
            )
        };
        assert_eq!(
            ranks(&field([c(1.0, 0.0), c(-0.5, 0.5), c(0.0, 2.0)])),
            (3, vec![1, 1, 1])
        );
        assert_eq!(ranks(&field([c(0.0, 0.0); 3])), (0, vec![0, 0, 0]));
    }

    #[test]
    fn corrupted_gram_fails_reproducing_check() {
        let (rep, v) = qubit(c(0.6, 0.8), c(1.0, 0.5), c(-0.3, 2.0));
        let mut m = build_rkhs(
            &kernel_from_representation(&rep, &v).unwrap(),
            DEFAULT_RANK_TOL,
        )
        .unwrap();
        let f = RkhsFunction::new(DVector::from_vec(vec![
            c(1.0, 0.0),
            c(0.0, 1.0),
            c(2.0, 0.0),
            c(0.0, 0.0),
        ]));
        assert!(m.reproducing_check(&f, 1e-12).unwrap().passed);
        m.gram_mut()[(2, 1)] += c(0.5, 0.0);
        let r = m.reproducing_check(&f, 1e-12).unwrap();
        assert!(!r.passed);
        assert_eq!(r.witness.as_deref(), Some("(-,+)"));
    }

    #[test]
    fn analysis_map_contracts_and_is_isometric_on_features() {
        let (rep, v) = qubit(c(0.6, 0.8), c(1.0, 0.5), c(-0.3, 2.0));
        let m = build_rkhs(
            &kernel_from_representation(&rep, &v).unwrap(),
            DEFAULT_RANK_TOL,
        )
        .unwrap();
        let fm = FeatureMap::new(&rep, &v).unwrap();
        assert!(max_abs_diff(&fm.kernel_values(), m.kernel_values()).0 < 1e-14);
        for (i, f) in fm.features().iter().enumerate() {
            let e = fm.embed_t(&m, f).unwrap();
            let k_col = m.kernel_values().column(i).into_owned();
            assert!((e.values.clone() - k_col).norm() < 1e-12);
            assert!((e.norm - f.norm()).abs() < 1e-12);
            let s = fm.embed_s(&RkhsFunction::generator(4, i)).unwrap();
            assert!((s - f).norm() < 1e-15);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let w = random_vector(&mut rng, fm.dim());
            let e = fm.embed_t(&m, &w).unwrap();
            assert!(e.norm <= w.norm() + 1e-12);
            assert!(e.residual < 1e-12);
        }
    }
}
