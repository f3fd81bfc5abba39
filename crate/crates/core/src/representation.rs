//! Unitary representations of finite groupoids on finite-dimensional fibers,
//! Haar weight systems, and the standard constructions.
//!
//! The direct sum of the fibers is realized as the concatenation of fiber
//! coordinates in canonical base-point order.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groupoid::{union_label, Arrow, FiniteGroupoid, Point};
use crate::linalg::{
    block_diag, identity_deviation, kron_vec, max_abs_diff, CMatrix, CVector, C64,
};

pub const DEFAULT_TOL: f64 = 1e-12;

/// Fiber dimensions, indexed by base point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HilbertFamily {
    dims: Vec<usize>,
}

impl HilbertFamily {
    pub fn new(dims: Vec<usize>) -> Self {
        Self { dims }
    }

    pub fn dim(&self, x: Point) -> usize {
        self.dims[x.0]
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Dimension of the concatenated space.
    pub fn total(&self) -> usize {
        self.dims.iter().sum()
    }

    /// Offset of fiber `x` inside the concatenated space.
    pub fn offset(&self, x: Point) -> usize {
        self.dims[..x.0].iter().sum()
    }
}

/// A vector `v(x)` in every fiber.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    values: Vec<CVector>,
}

impl VectorField {
    pub fn new(values: Vec<CVector>) -> Self {
        Self { values }
    }

    pub fn at(&self, x: Point) -> &CVector {
        &self.values[x.0]
    }

    pub fn values(&self) -> &[CVector] {
        &self.values
    }

    pub fn conforms_to(&self, family: &HilbertFamily) -> Result<()> {
        if self.values.len() != family.dims.len() {
            return Err(Error::InvalidArgument(format!(
                "vector field has {} values but there are {} base points",
                self.values.len(),
                family.dims.len()
            )));
        }
        for (x, (v, &n)) in self.values.iter().zip(&family.dims).enumerate() {
            if v.len() != n {
                return Err(Error::ShapeMismatch {
                    what: format!("vector field at base point #{x}"),
                    expected: (n, 1),
                    found: (v.len(), 1),
                });
            }
        }
        Ok(())
    }

    pub fn direct_sum(fields: &[&VectorField]) -> Result<VectorField> {
        let points = same_len(fields.iter().map(|f| f.values.len()))?;
        Ok(VectorField::new(
            (0..points)
                .map(|x| {
                    let parts: Vec<C64> = fields
                        .iter()
                        .flat_map(|f| f.values[x].iter().copied())
                        .collect();
                    CVector::from_vec(parts)
                })
                .collect(),
        ))
    }

    pub fn tensor(fields: &[&VectorField]) -> Result<VectorField> {
        let points = same_len(fields.iter().map(|f| f.values.len()))?;
        Ok(VectorField::new(
            (0..points)
                .map(|x| {
                    fields
                        .iter()
                        .fold(CVector::from_element(1, C64::new(1.0, 0.0)), |acc, f| {
                            kron_vec(&acc, &f.values[x])
                        })
                })
                .collect(),
        ))
    }
}

fn same_len(mut lens: impl Iterator<Item = usize>) -> Result<usize> {
    let first = lens
        .next()
        .ok_or_else(|| Error::InvalidArgument("empty list".into()))?;
    if lens.any(|l| l != first) {
        return Err(Error::GroupoidMismatch);
    }
    Ok(first)
}

/// Per-arrow matrices `U(g): H_{s(g)} -> H_{r(g)}`.
#[derive(Clone, Debug)]
pub struct UnitaryRepresentation {
    groupoid: Arc<FiniteGroupoid>,
    family: HilbertFamily,
    matrices: Vec<CMatrix>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RepresentationDefect {
    Unitarity,
    Homomorphism,
    Unit,
    Inverse,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RepresentationIssue {
    pub defect: RepresentationDefect,
    pub arrows: Vec<String>,
    pub deviation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RepresentationValidation {
    pub passed: bool,
    pub tolerance: f64,
    pub max_unitarity_deviation: f64,
    pub max_homomorphism_deviation: f64,
    pub max_unit_deviation: f64,
    pub max_inverse_deviation: f64,
    pub issues: Vec<RepresentationIssue>,
}

impl UnitaryRepresentation {
    /// Checks matrix shapes only; use [`validate`](Self::validate) for the
    /// unitarity and homomorphism laws.
    pub fn new(
        groupoid: Arc<FiniteGroupoid>,
        family: HilbertFamily,
        matrices: Vec<CMatrix>,
    ) -> Result<Self> {
        if family.dims.len() != groupoid.point_count() {
            return Err(Error::InvalidArgument(format!(
                "{} fiber dimensions for {} base points",
                family.dims.len(),
                groupoid.point_count()
            )));
        }
        if matrices.len() != groupoid.arrow_count() {
            return Err(Error::InvalidArgument(format!(
                "{} matrices for {} arrows",
                matrices.len(),
                groupoid.arrow_count()
            )));
        }
        for a in groupoid.arrows() {
            let expected = (
                family.dim(groupoid.range(a)),
                family.dim(groupoid.source(a)),
            );
            if matrices[a.0].shape() != expected {
                return Err(Error::ShapeMismatch {
                    what: format!("matrix of arrow `{}`", groupoid.arrow_label(a)),
                    expected,
                    found: matrices[a.0].shape(),
                });
            }
        }
        Ok(Self {
            groupoid,
            family,
            matrices,
        })
    }

    pub fn groupoid(&self) -> &Arc<FiniteGroupoid> {
        &self.groupoid
    }

    pub fn family(&self) -> &HilbertFamily {
        &self.family
    }

    pub fn matrix(&self, a: Arrow) -> &CMatrix {
        &self.matrices[a.0]
    }

    pub fn matrices(&self) -> &[CMatrix] {
        &self.matrices
    }

    /// `F(g) = U(g) v(s(g))`, an element of `H_{r(g)}`.
    pub fn feature(&self, v: &VectorField, a: Arrow) -> CVector {
        self.matrix(a) * v.at(self.groupoid.source(a))
    }

    pub fn validate(&self, tol: f64) -> RepresentationValidation {
        let g = &*self.groupoid;
        let label = |a: Arrow| g.arrow_label(a).to_string();
        let mut issues = Vec::new();
        let mut report = |defect, arrows: Vec<String>, deviation: f64, max: &mut f64| {
            *max = max.max(deviation);
            if deviation > tol || deviation.is_nan() {
                issues.push(RepresentationIssue {
                    defect,
                    arrows,
                    deviation,
                });
            }
        };
        let (mut unitarity, mut homomorphism, mut unit, mut inverse) =
            (0.0f64, 0.0f64, 0.0f64, 0.0f64);

        for a in g.arrows() {
            let m = self.matrix(a);
            let dev =
                identity_deviation(&(m.adjoint() * m)).max(identity_deviation(&(m * m.adjoint())));
            // A non-square matrix cannot be unitary.
            let dev = if m.nrows() != m.ncols() {
                dev.max(1.0)
            } else {
                dev
            };
            report(
                RepresentationDefect::Unitarity,
                vec![label(a)],
                dev,
                &mut unitarity,
            );

            let inv = self.matrix(g.inverse(a));
            let dev = if inv.shape() == (m.ncols(), m.nrows()) {
                max_abs_diff(inv, &m.adjoint()).0
            } else {
                f64::INFINITY
            };
            report(
                RepresentationDefect::Inverse,
                vec![label(a), label(g.inverse(a))],
                dev,
                &mut inverse,
            );
        }
        for x in g.points() {
            let e = g.unit(x);
            report(
                RepresentationDefect::Unit,
                vec![label(e)],
                identity_deviation(self.matrix(e)),
                &mut unit,
            );
        }
        for a in g.arrows() {
            for b in g.arrows() {
                let Some(ab) = g.product(a, b) else { continue };
                let dev = max_abs_diff(self.matrix(ab), &(self.matrix(a) * self.matrix(b))).0;
                report(
                    RepresentationDefect::Homomorphism,
                    vec![label(a), label(b)],
                    dev,
                    &mut homomorphism,
                );
            }
        }
        RepresentationValidation {
            passed: issues.is_empty(),
            tolerance: tol,
            max_unitarity_deviation: unitarity,
            max_homomorphism_deviation: homomorphism,
            max_unit_deviation: unit,
            max_inverse_deviation: inverse,
            issues,
        }
    }
}

/// Every fiber is `C^n` and every arrow acts as the identity.
pub fn trivial_representation(
    groupoid: Arc<FiniteGroupoid>,
    n: usize,
) -> Result<UnitaryRepresentation> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "trivial representation needs n > 0".into(),
        ));
    }
    let family = HilbertFamily::new(vec![n; groupoid.point_count()]);
    let matrices = vec![CMatrix::identity(n, n); groupoid.arrow_count()];
    UnitaryRepresentation::new(groupoid, family, matrices)
}

/// One-dimensional representation from per-arrow scalars.
pub fn scalar_representation(
    groupoid: Arc<FiniteGroupoid>,
    scalars: &[C64],
) -> Result<UnitaryRepresentation> {
    let family = HilbertFamily::new(vec![1; groupoid.point_count()]);
    let matrices = scalars
        .iter()
        .map(|&z| CMatrix::from_element(1, 1, z))
        .collect();
    UnitaryRepresentation::new(groupoid, family, matrices)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HaarSide {
    Left,
    Right,
}

/// Positive weights on arrows. A left system measures each range fiber,
/// a right system each source fiber.
#[derive(Clone, Debug, PartialEq)]
pub struct HaarSystem {
    pub side: HaarSide,
    pub weights: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HaarValidation {
    pub passed: bool,
    pub side: HaarSide,
    pub max_deviation: f64,
    /// `(g, chi)` pairs where translation by `g` changes the weight of `chi`.
    pub witnesses: Vec<(String, String)>,
}

/// Counting weights, invariant on both sides.
pub fn counting_haar(groupoid: &FiniteGroupoid, side: HaarSide) -> HaarSystem {
    HaarSystem {
        side,
        weights: vec![1.0; groupoid.arrow_count()],
    }
}

/// Checks the finite invariance equalities: for a left system,
/// `w(g chi) = w(chi)` for every `chi` ending at `s(g)`; for a right system,
/// `w(chi g) = w(chi)` for every `chi` starting at `r(g)`.
pub fn validate_haar(
    groupoid: &FiniteGroupoid,
    haar: &HaarSystem,
    tol: f64,
) -> Result<HaarValidation> {
    if haar.weights.len() != groupoid.arrow_count() {
        return Err(Error::InvalidHaar(format!(
            "{} weights for {} arrows",
            haar.weights.len(),
            groupoid.arrow_count()
        )));
    }
    if let Some(a) = groupoid
        .arrows()
        .find(|a| !(haar.weights[a.0] > 0.0 && haar.weights[a.0].is_finite()))
    {
        return Err(Error::InvalidHaar(format!(
            "weight of `{}` is {}, must be positive",
            groupoid.arrow_label(a),
            haar.weights[a.0]
        )));
    }
    let w = &haar.weights;
    let mut max_deviation = 0.0f64;
    let mut witnesses = Vec::new();
    for g in groupoid.arrows() {
        let pairs: Vec<(Arrow, Arrow)> = match haar.side {
            HaarSide::Left => groupoid
                .out_fiber(groupoid.source(g))
                .iter()
                .map(|&chi| (chi, groupoid.product(g, chi).expect("composable")))
                .collect(),
            HaarSide::Right => groupoid
                .in_fiber(groupoid.range(g))
                .iter()
                .map(|&chi| (chi, groupoid.product(chi, g).expect("composable")))
                .collect(),
        };
        for (chi, moved) in pairs {
            let dev = (w[moved.0] - w[chi.0]).abs();
            max_deviation = max_deviation.max(dev);
            if dev > tol {
                witnesses.push((
                    groupoid.arrow_label(g).to_string(),
                    groupoid.arrow_label(chi).to_string(),
                ));
            }
        }
    }
    Ok(HaarValidation {
        passed: witnesses.is_empty(),
        side: haar.side,
        max_deviation,
        witnesses,
    })
}

fn require_valid_haar(groupoid: &FiniteGroupoid, haar: &HaarSystem, side: HaarSide) -> Result<()> {
    if haar.side != side {
        return Err(Error::InvalidHaar(format!(
            "expected a {side:?} Haar system"
        )));
    }
    let scale = haar.weights.iter().fold(1.0f64, |m, &w| m.max(w.abs()));
    let report = validate_haar(groupoid, haar, DEFAULT_TOL * scale)?;
    if !report.passed {
        return Err(Error::InvalidHaar(format!(
            "not invariant, e.g. translating `{}` by `{}`",
            report.witnesses[0].1, report.witnesses[0].0
        )));
    }
    Ok(())
}

/// `(U(g) f)(chi) = f(g^-1 chi)` on `L^2` of the range fibers, in coordinates
/// `u_chi = sqrt(w(chi)) f(chi)` so the matrices are unitary in the standard form.
pub fn left_regular_representation(
    groupoid: Arc<FiniteGroupoid>,
    haar: &HaarSystem,
) -> Result<UnitaryRepresentation> {
    require_valid_haar(&groupoid, haar, HaarSide::Left)?;
    let g = &*groupoid;
    let family = HilbertFamily::new(g.points().map(|x| g.out_fiber(x).len()).collect());
    let w = &haar.weights;
    let matrices = g
        .arrows()
        .map(|a| {
            let (rows, cols) = (g.out_fiber(g.range(a)), g.out_fiber(g.source(a)));
            let mut m = CMatrix::zeros(rows.len(), cols.len());
            let a_inv = g.inverse(a);
            for (i, &chi) in rows.iter().enumerate() {
                let xi = g.product(a_inv, chi).expect("composable");
                let j = g.out_fiber_position(xi);
                debug_assert_eq!(cols[j], xi);
                m[(i, j)] = C64::new((w[chi.0] / w[xi.0]).sqrt(), 0.0);
            }
            m
        })
        .collect();
    UnitaryRepresentation::new(groupoid, family, matrices)
}

/// `(U(g) f)(chi) = f(chi g)` on `L^2` of the source fibers.
pub fn right_regular_representation(
    groupoid: Arc<FiniteGroupoid>,
    haar: &HaarSystem,
) -> Result<UnitaryRepresentation> {
    require_valid_haar(&groupoid, haar, HaarSide::Right)?;
    let g = &*groupoid;
    let family = HilbertFamily::new(g.points().map(|x| g.in_fiber(x).len()).collect());
    let w = &haar.weights;
    let matrices = g
        .arrows()
        .map(|a| {
            let (rows, cols) = (g.in_fiber(g.range(a)), g.in_fiber(g.source(a)));
            let mut m = CMatrix::zeros(rows.len(), cols.len());
            for (i, &chi) in rows.iter().enumerate() {
                let xi = g.product(chi, a).expect("composable");
                let j = g.in_fiber_position(xi);
                debug_assert_eq!(cols[j], xi);
                m[(i, j)] = C64::new((w[chi.0] / w[xi.0]).sqrt(), 0.0);
            }
            m
        })
        .collect();
    UnitaryRepresentation::new(groupoid, family, matrices)
}

fn same_groupoid(reps: &[&UnitaryRepresentation]) -> Result<Arc<FiniteGroupoid>> {
    let first = reps
        .first()
        .ok_or_else(|| Error::InvalidArgument("empty list of representations".into()))?;
    if reps.iter().any(|r| r.groupoid != first.groupoid) {
        return Err(Error::GroupoidMismatch);
    }
    Ok(first.groupoid.clone())
}

/// Fiberwise direct sum; matrices are block-diagonal in list order.
pub fn direct_sum(reps: &[&UnitaryRepresentation]) -> Result<UnitaryRepresentation> {
    let groupoid = same_groupoid(reps)?;
    let family = HilbertFamily::new(
        groupoid
            .points()
            .map(|x| reps.iter().map(|r| r.family.dim(x)).sum())
            .collect(),
    );
    let matrices = groupoid
        .arrows()
        .map(|a| block_diag(&reps.iter().map(|r| r.matrix(a)).collect::<Vec<_>>()))
        .collect();
    UnitaryRepresentation::new(groupoid, family, matrices)
}

/// Fiberwise tensor product; matrices are Kronecker products in list order.
pub fn tensor_product(reps: &[&UnitaryRepresentation]) -> Result<UnitaryRepresentation> {
    let groupoid = same_groupoid(reps)?;
    let family = HilbertFamily::new(
        groupoid
            .points()
            .map(|x| reps.iter().map(|r| r.family.dim(x)).product())
            .collect(),
    );
    let matrices = groupoid
        .arrows()
        .map(|a| {
            reps.iter()
                .fold(CMatrix::identity(1, 1), |acc, r| acc.kronecker(r.matrix(a)))
        })
        .collect();
    UnitaryRepresentation::new(groupoid, family, matrices)
}

/// Checks that `union` lists the components' items as `"{i}:{label}"` in
/// order and returns the arrow and point offsets of each component.
pub fn union_layout(
    union: &FiniteGroupoid,
    components: &[&FiniteGroupoid],
) -> Result<Vec<(usize, usize)>> {
    let mut offsets = Vec::with_capacity(components.len());
    let (mut pa, mut pp) = (0, 0);
    for (i, c) in components.iter().enumerate() {
        offsets.push((pa, pp));
        for a in c.arrows() {
            let expected = union_label(i, c.arrow_label(a));
            if union.arrow_labels().get(pa + a.0) != Some(&expected) {
                return Err(Error::InvalidArgument(format!(
                    "arrow `{expected}` is not where the disjoint union expects it"
                )));
            }
        }
        for x in c.points() {
            let expected = union_label(i, c.point_label(x));
            if union.point_labels().get(pp + x.0) != Some(&expected) {
                return Err(Error::InvalidArgument(format!(
                    "base point `{expected}` is not where the disjoint union expects it"
                )));
            }
        }
        pa += c.arrow_count();
        pp += c.point_count();
    }
    if pa != union.arrow_count() || pp != union.point_count() {
        return Err(Error::InvalidArgument(
            "components do not cover the disjoint union".into(),
        ));
    }
    Ok(offsets)
}

/// Representation of a disjoint union that acts as `parts[i]` on component `i`.
pub fn glue_representations(
    union: Arc<FiniteGroupoid>,
    parts: &[&UnitaryRepresentation],
) -> Result<UnitaryRepresentation> {
    let components: Vec<&FiniteGroupoid> = parts.iter().map(|r| &*r.groupoid).collect();
    union_layout(&union, &components)?;
    let dims = parts
        .iter()
        .flat_map(|r| r.family.dims.iter().copied())
        .collect();
    let matrices = parts
        .iter()
        .flat_map(|r| r.matrices.iter().cloned())
        .collect();
    UnitaryRepresentation::new(union, HilbertFamily::new(dims), matrices)
}

/// Vector field on a disjoint union, `v(x) = fields[i](x)` on component `i`.
pub fn glue_fields(fields: &[&VectorField]) -> VectorField {
    VectorField::new(
        fields
            .iter()
            .flat_map(|f| f.values.iter().cloned())
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::{disjoint_union, group_to_groupoid, pair_groupoid, GroupTable};

    fn fig1() -> Arc<FiniteGroupoid> {
        Arc::new(pair_groupoid(&["+", "-"]).unwrap())
    }

    /// Scalar representation of the two-point pair groupoid with `U(alpha) = lambda`.
    fn qubit(lambda: C64) -> UnitaryRepresentation {
        let g = fig1();
        let scalars: Vec<C64> = g
            .arrows()
            .map(|a| match g.arrow_label(a) {
                "(-,+)" => lambda,
                "(+,-)" => lambda.conj(),
                _ => C64::new(1.0, 0.0),
            })
            .collect();
        scalar_representation(g, &scalars).unwrap()
    }

    fn is_permutation(m: &CMatrix) -> bool {
        m.iter()
            .all(|z| *z == C64::new(0.0, 0.0) || *z == C64::new(1.0, 0.0))
            && m.row_iter()
                .all(|r| r.iter().filter(|z| z.re == 1.0).count() == 1)
            && m.column_iter()
                .all(|c| c.iter().filter(|z| z.re == 1.0).count() == 1)
    }

    #[test]
    fn trivial_is_valid() {
        let g = Arc::new(pair_groupoid(&["1", "2", "3"]).unwrap());
        let rep = trivial_representation(g.clone(), 2).unwrap();
        assert_eq!(rep.matrices().len(), 9);
        assert!(rep.matrices().iter().all(|m| *m == CMatrix::identity(2, 2)));
        assert!(rep.validate(DEFAULT_TOL).passed);
        let one = trivial_representation(g.clone(), 1).unwrap();
        assert!(one
            .matrices()
            .iter()
            .all(|m| m[(0, 0)] == C64::new(1.0, 0.0)));
        assert!(trivial_representation(g, 0).is_err());
    }

    #[test]
    fn qubit_unitarity() {
        let ok = qubit(C64::from_polar(1.0, 0.7));
        assert!(ok.validate(DEFAULT_TOL).passed);
        let g = fig1();
        let alpha = g.arrow("(-,+)").unwrap();
        let scalars: Vec<C64> = g
            .arrows()
            .map(|a| {
                if a == alpha {
                    C64::new(2.0, 0.0)
                } else {
                    C64::new(1.0, 0.0)
                }
            })
            .collect();
        let bad = scalar_representation(g, &scalars).unwrap();
        let report = bad.validate(DEFAULT_TOL);
        assert!(!report.passed);
        assert!(report
            .issues
            .iter()
            .any(|i| i.defect == RepresentationDefect::Unitarity
                && i.arrows == vec!["(-,+)".to_string()]));
    }

    #[test]
    fn shape_mismatch_is_structural() {
        let g = fig1();
        let family = HilbertFamily::new(vec![1, 2]);
        let err = UnitaryRepresentation::new(g, family, vec![CMatrix::identity(1, 1); 4]);
        assert!(matches!(err, Err(Error::ShapeMismatch { .. })));
    }

    #[test]
    fn counting_haar_is_invariant_and_perturbation_breaks_it() {
        let g = pair_groupoid(&["1", "2"]).unwrap();
        for side in [HaarSide::Left, HaarSide::Right] {
            let h = counting_haar(&g, side);
            assert!(validate_haar(&g, &h, DEFAULT_TOL).unwrap().passed);
            let mut bad = h.clone();
            bad.weights[1] = 2.0;
            let r = validate_haar(&g, &bad, DEFAULT_TOL).unwrap();
            assert!(!r.passed);
            assert!((r.max_deviation - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn fiberwise_constant_weights_must_agree_along_orbits() {
        // Weight 1 on the range fiber of "1", 3 on that of "2".
        let g = pair_groupoid(&["1", "2"]).unwrap();
        let weights = g
            .arrows()
            .map(|a| if g.range(a).0 == 0 { 1.0 } else { 3.0 })
            .collect();
        let h = HaarSystem {
            side: HaarSide::Left,
            weights,
        };
        let r = validate_haar(&g, &h, DEFAULT_TOL).unwrap();
        assert!(!r.passed);
        assert!(r
            .witnesses
            .iter()
            .any(|(gamma, _)| gamma == "(2,1)" || gamma == "(1,2)"));
        // A group accepts any constant weight.
        let z3 = group_to_groupoid(&GroupTable::cyclic(3).unwrap()).unwrap();
        let h = HaarSystem {
            side: HaarSide::Left,
            weights: vec![0.25; 3],
        };
        assert!(validate_haar(&z3, &h, DEFAULT_TOL).unwrap().passed);
        let h = HaarSystem {
            side: HaarSide::Left,
            weights: vec![1.0, 0.0, 1.0],
        };
        assert!(matches!(
            validate_haar(&z3, &h, DEFAULT_TOL),
            Err(Error::InvalidHaar(_))
        ));
    }

    #[test]
    fn left_regular_on_z3_is_left_translation() {
        let g = Arc::new(group_to_groupoid(&GroupTable::cyclic(3).unwrap()).unwrap());
        let rep =
            left_regular_representation(g.clone(), &counting_haar(&g, HaarSide::Left)).unwrap();
        assert!(rep.validate(DEFAULT_TOL).passed);
        // (U(k) delta_j) = delta_{k+j}: column j has its one in row (k + j) mod 3.
        for k in 0..3 {
            let m = rep.matrix(Arrow(k));
            assert!(is_permutation(m));
            for j in 0..3 {
                assert_eq!(m[((k + j) % 3, j)], C64::new(1.0, 0.0));
            }
        }
    }

    #[test]
    fn right_regular_on_z3_is_right_translation() {
        let g = Arc::new(group_to_groupoid(&GroupTable::cyclic(3).unwrap()).unwrap());
        let rep =
            right_regular_representation(g.clone(), &counting_haar(&g, HaarSide::Right)).unwrap();
        assert!(rep.validate(DEFAULT_TOL).passed);
        // (U(k) f)(i) = f(i + k): row i has its one in column (i + k) mod 3.
        for k in 0..3 {
            let m = rep.matrix(Arrow(k));
            for i in 0..3 {
                assert_eq!(m[(i, (i + k) % 3)], C64::new(1.0, 0.0));
            }
        }
        assert!(
            left_regular_representation(g.clone(), &counting_haar(&g, HaarSide::Right)).is_err()
        );
    }

    #[test]
    fn regular_representations_on_fig1() {
        let g = fig1();
        let left =
            left_regular_representation(g.clone(), &counting_haar(&g, HaarSide::Left)).unwrap();
        assert!(left.validate(DEFAULT_TOL).passed);
        let alpha = g.arrow("(-,+)").unwrap();
        // H_+ has basis {(+,+), (+,-)}; H_- has {(-,+), (-,-)}.
        // delta_(+,+) maps to delta_(-,+) and delta_(+,-) to delta_(-,-).
        let m = left.matrix(alpha);
        assert_eq!(m.shape(), (2, 2));
        assert_eq!(m[(0, 0)], C64::new(1.0, 0.0));
        assert_eq!(m[(1, 1)], C64::new(1.0, 0.0));
        assert!(is_permutation(m));

        let right =
            right_regular_representation(g.clone(), &counting_haar(&g, HaarSide::Right)).unwrap();
        assert!(right.validate(DEFAULT_TOL).passed);
        assert!(g.arrows().all(|a| is_permutation(right.matrix(a))));
    }

    #[test]
    fn weighted_left_regular_is_still_unitary() {
        // Scaled counting weights on a group are a valid left Haar system.
        let g = Arc::new(group_to_groupoid(&GroupTable::cyclic(4).unwrap()).unwrap());
        let h = HaarSystem {
            side: HaarSide::Left,
            weights: vec![2.5; 4],
        };
        let rep = left_regular_representation(g, &h).unwrap();
        assert!(rep.validate(DEFAULT_TOL).passed);
    }

    #[test]
    fn sums_and_products() {
        let g = fig1();
        let t1 = trivial_representation(g.clone(), 1).unwrap();
        let t2 = trivial_representation(g.clone(), 2).unwrap();
        let t3 = direct_sum(&[&t1, &t2]).unwrap();
        assert_eq!(t3.family().dims(), &[3, 3]);
        assert!(t3.matrices().iter().all(|m| *m == CMatrix::identity(3, 3)));

        let l1 = C64::from_polar(1.0, 0.3);
        let l2 = C64::from_polar(1.0, -1.1);
        let (q1, q2) = (qubit(l1), qubit(l2));
        let alpha = g.arrow("(-,+)").unwrap();
        let s = direct_sum(&[&q1, &q2]).unwrap();
        assert!(s.validate(DEFAULT_TOL).passed);
        let m = s.matrix(alpha);
        assert_eq!(
            (m[(0, 0)], m[(1, 1)], m[(0, 1)]),
            (l1, l2, C64::new(0.0, 0.0))
        );

        let t = tensor_product(&[&q1, &q2]).unwrap();
        assert!(t.validate(DEFAULT_TOL).passed);
        assert!((t.matrix(alpha)[(0, 0)] - l1 * l2).norm() < 1e-15);
        let same = tensor_product(&[&q1, &t1]).unwrap();
        assert_eq!(same.matrices(), q1.matrices());

        let other =
            trivial_representation(Arc::new(pair_groupoid(&["a", "b"]).unwrap()), 1).unwrap();
        assert!(matches!(
            direct_sum(&[&q1, &other]),
            Err(Error::GroupoidMismatch)
        ));
    }

    #[test]
    fn glued_representation_is_valid() {
        let z2 = Arc::new(group_to_groupoid(&GroupTable::cyclic(2).unwrap()).unwrap());
        let p2 = fig1();
        let union = Arc::new(disjoint_union(&[&z2, &p2]).unwrap());
        let r1 =
            left_regular_representation(z2.clone(), &counting_haar(&z2, HaarSide::Left)).unwrap();
        let r2 = qubit(C64::new(0.0, 1.0));
        let glued = glue_representations(union.clone(), &[&r1, &r2]).unwrap();
        assert!(glued.validate(DEFAULT_TOL).passed);
        assert_eq!(glued.family().dims(), &[2, 1, 1]);
        assert!(glue_representations(union, &[&r2, &r1]).is_err());
    }
}
