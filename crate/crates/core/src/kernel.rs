//! Kernels on the arrows of a finite groupoid.
//!
//! A [`GroupoidKernel`] is a dense complex matrix over the canonical arrow
//! order with `values[(chi, gamma)] = K(chi, gamma)`. Kernels built here
//! vanish across distinct range fibers.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::groupoid::{Arrow, FiniteGroupoid, Point};
use crate::linalg::{
    block_diag, hermitian_deviation, inner, max_abs, CMatrix, HermitianEigen, C64, ZERO,
};
use crate::representation::{union_layout, UnitaryRepresentation, VectorField};

/// Relative tolerance of the positive semidefiniteness test.
pub const DEFAULT_PSD_TOL: f64 = 1e-9;
/// Absolute tolerance of the invariance test.
pub const DEFAULT_INVARIANCE_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct GroupoidKernel {
    groupoid: Arc<FiniteGroupoid>,
    values: CMatrix,
}

impl PartialEq for GroupoidKernel {
    fn eq(&self, other: &Self) -> bool {
        self.groupoid == other.groupoid && self.values == other.values
    }
}

impl GroupoidKernel {
    pub fn new(groupoid: Arc<FiniteGroupoid>, values: CMatrix) -> Result<Self> {
        let n = groupoid.arrow_count();
        if values.shape() != (n, n) {
            return Err(Error::ShapeMismatch {
                what: "kernel matrix".into(),
                expected: (n, n),
                found: values.shape(),
            });
        }
        Ok(Self { groupoid, values })
    }

    pub fn groupoid(&self) -> &Arc<FiniteGroupoid> {
        &self.groupoid
    }

    pub fn values(&self) -> &CMatrix {
        &self.values
    }

    pub fn into_values(self) -> CMatrix {
        self.values
    }

    /// `K(chi, gamma)`.
    pub fn get(&self, chi: Arrow, gamma: Arrow) -> C64 {
        self.values[(chi.0, gamma.0)]
    }

    pub fn size(&self) -> usize {
        self.values.nrows()
    }

    pub fn labels(&self) -> &[String] {
        self.groupoid.arrow_labels()
    }

    /// Arrow indices of each range-fiber block, per base point.
    pub fn fiber_blocks(&self) -> Vec<Vec<usize>> {
        self.groupoid
            .points()
            .map(|x| self.groupoid.out_fiber(x).iter().map(|a| a.0).collect())
            .collect()
    }

    /// The restriction to the range fiber of `x`.
    pub fn fiber_block(&self, x: Point) -> CMatrix {
        let idx: Vec<usize> = self.groupoid.out_fiber(x).iter().map(|a| a.0).collect();
        crate::linalg::submatrix(&self.values, &idx, &idx)
    }

    pub fn check_positive_definite(&self, tol: f64) -> Result<PsdReport> {
        check_positive_definite_labeled(&self.values, self.labels(), tol)
    }

    pub fn check_invariance(&self, tol: f64) -> InvarianceReport {
        check_invariance(self, tol)
    }

    /// Entrywise map, keeping the groupoid.
    pub fn map(&self, f: impl FnMut(C64) -> C64) -> GroupoidKernel {
        GroupoidKernel {
            groupoid: self.groupoid.clone(),
            values: self.values.map(f),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PsdReport {
    pub passed: bool,
    pub size: usize,
    pub hermitian_deviation: f64,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    /// Eigenvalues below `-threshold` fail the test.
    pub threshold: f64,
}

/// Spectral positive-semidefiniteness test of a Hermitian matrix.
///
/// Passes iff the smallest eigenvalue is at least `-tol * max(ρ, 1)` where
/// `ρ` is the spectral radius. Non-Hermitian input (beyond the same scaled
/// tolerance) is rejected before any spectral work.
pub fn check_positive_definite(values: &CMatrix, tol: f64) -> Result<PsdReport> {
    let labels: Vec<String> = (0..values.nrows()).map(|i| i.to_string()).collect();
    check_positive_definite_labeled(values, &labels, tol)
}

fn check_positive_definite_labeled(
    values: &CMatrix,
    labels: &[String],
    tol: f64,
) -> Result<PsdReport> {
    if values.nrows() != values.ncols() {
        return Err(Error::ShapeMismatch {
            what: "kernel matrix".into(),
            expected: (values.nrows(), values.nrows()),
            found: values.shape(),
        });
    }
    let (dev, (i, j)) = hermitian_deviation(values);
    if dev > tol * max_abs(values).max(1.0) || dev.is_nan() {
        return Err(Error::NotHermitian {
            row: labels[i].clone(),
            col: labels[j].clone(),
            deviation: dev,
        });
    }
    let eig = HermitianEigen::new(values);
    let threshold = tol * eig.spectral_radius().max(1.0);
    Ok(PsdReport {
        passed: eig.min() >= -threshold,
        size: values.nrows(),
        hermitian_deviation: dev,
        min_eigenvalue: eig.min(),
        max_eigenvalue: eig.max(),
        threshold,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InvarianceReport {
    pub passed: bool,
    pub tolerance: f64,
    pub max_deviation: f64,
    pub max_cross_fiber: f64,
    /// `(chi, gamma)` pairs failing either condition, in scan order.
    pub witnesses: Vec<(String, String)>,
}

/// Checks `K(chi, gamma) = K(gamma^-1 chi, e(s(gamma)))` whenever
/// `r(chi) = r(gamma)` and `K(chi, gamma) = 0` otherwise. For a group this
/// is `K(h, g) = K(g^-1 h, e)`.
pub fn check_invariance(kernel: &GroupoidKernel, tol: f64) -> InvarianceReport {
    let g = &*kernel.groupoid;
    let mut max_deviation = 0.0f64;
    let mut max_cross = 0.0f64;
    let mut witnesses = Vec::new();
    for chi in g.arrows() {
        for gamma in g.arrows() {
            let value = kernel.get(chi, gamma);
            let dev = if g.range(chi) == g.range(gamma) {
                let moved = g.product(g.inverse(gamma), chi).expect("same range fiber");
                let unit = g.unit(g.source(gamma));
                let d = (value - kernel.get(moved, unit)).norm();
                max_deviation = max_deviation.max(d);
                d
            } else {
                let d = value.norm();
                max_cross = max_cross.max(d);
                d
            };
            if dev > tol || dev.is_nan() {
                witnesses.push((
                    g.arrow_label(chi).to_string(),
                    g.arrow_label(gamma).to_string(),
                ));
            }
        }
    }
    InvarianceReport {
        passed: witnesses.is_empty(),
        tolerance: tol,
        max_deviation,
        max_cross_fiber: max_cross,
        witnesses,
    }
}

/// `K(chi, gamma) = ⟨U(gamma) v(s(gamma)), U(chi) v(s(chi))⟩` on each range
/// fiber and zero across fibers.
pub fn kernel_from_representation(
    rep: &UnitaryRepresentation,
    v: &VectorField,
) -> Result<GroupoidKernel> {
    v.conforms_to(rep.family())?;
    let g = rep.groupoid();
    let features: Vec<_> = g.arrows().map(|a| rep.feature(v, a)).collect();
    let n = g.arrow_count();
    let mut values = CMatrix::zeros(n, n);
    for x in g.points() {
        let fiber = g.out_fiber(x);
        for &chi in fiber {
            for &gamma in fiber {
                values[(chi.0, gamma.0)] = inner(&features[gamma.0], &features[chi.0]);
            }
        }
    }
    GroupoidKernel::new(g.clone(), values)
}

/// Convolution kernel on a finite group with counting Haar measure scaled by
/// `weight`: `K(h, g) = (f * f~)(g^-1 h)` where `f~(t) = conj(f(t^-1))`.
pub fn convolution_kernel(
    group: Arc<FiniteGroupoid>,
    f: &[C64],
    weight: f64,
) -> Result<GroupoidKernel> {
    if !group.is_group() {
        return Err(Error::InvalidArgument(
            "convolution kernels need a single-base-point groupoid".into(),
        ));
    }
    if !(weight > 0.0 && weight.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "Haar weight must be positive, got {weight}"
        )));
    }
    let n = group.arrow_count();
    if f.len() != n {
        return Err(Error::ShapeMismatch {
            what: "function on the group".into(),
            expected: (n, 1),
            found: (f.len(), 1),
        });
    }
    let g = &*group;
    let f_tilde: Vec<C64> = g.arrows().map(|t| f[g.inverse(t).0].conj()).collect();
    // (f1 * f2)(u) = w Σ_t f1(t) f2(t^-1 u)
    let conv = |u: Arrow| -> C64 {
        g.arrows()
            .map(|t| f[t.0] * f_tilde[g.product(g.inverse(t), u).expect("group").0])
            .sum::<C64>()
            * weight
    };
    let table: Vec<C64> = g.arrows().map(conv).collect();
    let values = CMatrix::from_fn(n, n, |h, gg| {
        let u = g.product(g.inverse(Arrow(gg)), Arrow(h)).expect("group");
        table[u.0]
    });
    GroupoidKernel::new(group, values)
}

/// `K(chi, gamma) = k(gamma) conj(k(chi))` on range fibers, zero across.
///
/// `k` must have modulus one and be multiplicative on composable pairs;
/// both are checked within `tol`.
pub fn character_kernel(
    groupoid: Arc<FiniteGroupoid>,
    k: &[C64],
    tol: f64,
) -> Result<GroupoidKernel> {
    let g = &*groupoid;
    if k.len() != g.arrow_count() {
        return Err(Error::ShapeMismatch {
            what: "character values".into(),
            expected: (g.arrow_count(), 1),
            found: (k.len(), 1),
        });
    }
    let label = |a: Arrow| g.arrow_label(a).to_string();
    if let Some(a) = g.arrows().find(|a| {
        let d = (k[a.0].norm() - 1.0).abs();
        d > tol || d.is_nan()
    }) {
        return Err(Error::CharacterRejected {
            reason: format!("|k| = {} is not 1", k[a.0].norm()),
            witness: vec![label(a)],
        });
    }
    for a in g.arrows() {
        for b in g.arrows() {
            if let Some(ab) = g.product(a, b) {
                if (k[ab.0] - k[a.0] * k[b.0]).norm() > tol {
                    return Err(Error::CharacterRejected {
                        reason: "k(ab) != k(a) k(b)".into(),
                        witness: vec![label(a), label(b)],
                    });
                }
            }
        }
    }
    let n = g.arrow_count();
    let values = CMatrix::from_fn(n, n, |chi, gamma| {
        if g.range(Arrow(chi)) == g.range(Arrow(gamma)) {
            k[gamma] * k[chi].conj()
        } else {
            ZERO
        }
    });
    GroupoidKernel::new(groupoid, values)
}

fn same_groupoid(kernels: &[&GroupoidKernel]) -> Result<Arc<FiniteGroupoid>> {
    let first = kernels
        .first()
        .ok_or_else(|| Error::InvalidArgument("empty list of kernels".into()))?;
    if kernels.iter().any(|k| k.groupoid != first.groupoid) {
        return Err(Error::GroupoidMismatch);
    }
    Ok(first.groupoid.clone())
}

/// One term `weight * K^(∘power)` of [`kernel_combination`].
#[derive(Clone, Copy, Debug)]
pub struct KernelTerm<'a> {
    pub weight: f64,
    pub kernel: &'a GroupoidKernel,
    pub power: u32,
}

/// `Σ weight_j K_j^(∘power_j)` with entrywise (Schur) powers.
pub fn kernel_combination(terms: &[KernelTerm<'_>]) -> Result<GroupoidKernel> {
    let kernels: Vec<&GroupoidKernel> = terms.iter().map(|t| t.kernel).collect();
    let groupoid = same_groupoid(&kernels)?;
    let n = groupoid.arrow_count();
    let mut values = CMatrix::zeros(n, n);
    for t in terms {
        if !(t.weight > 0.0 && t.weight.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "weights must be positive, got {}",
                t.weight
            )));
        }
        if t.power == 0 {
            return Err(Error::InvalidArgument("powers must be positive".into()));
        }
        values += t.kernel.values.map(|z| z.powu(t.power) * t.weight);
    }
    GroupoidKernel::new(groupoid, values)
}

/// Entrywise product.
pub fn kernel_product(kernels: &[&GroupoidKernel]) -> Result<GroupoidKernel> {
    let groupoid = same_groupoid(kernels)?;
    let n = groupoid.arrow_count();
    let values = kernels
        .iter()
        .fold(CMatrix::from_element(n, n, C64::new(1.0, 0.0)), |acc, k| {
            acc.component_mul(&k.values)
        });
    GroupoidKernel::new(groupoid, values)
}

/// Kernel on a disjoint union that is `parts[i]` on component `i` and zero
/// across components.
pub fn block_assembly(
    union: Arc<FiniteGroupoid>,
    parts: &[&GroupoidKernel],
) -> Result<GroupoidKernel> {
    let components: Vec<&FiniteGroupoid> = parts.iter().map(|k| &*k.groupoid).collect();
    union_layout(&union, &components)?;
    let blocks: Vec<&CMatrix> = parts.iter().map(|k| &k.values).collect();
    GroupoidKernel::new(union, block_diag(&blocks))
}
