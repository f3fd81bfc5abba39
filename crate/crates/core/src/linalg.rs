//! Dense complex linear algebra shared by the other modules.
//!
//! Inner products are anti-linear in the second argument:
//! `inner(u, v) = Σ u_i conj(v_i)`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

pub use nalgebra::Complex;

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// `⟨u, v⟩ = Σ u_i conj(v_i)`.
pub fn inner(u: &CVector, v: &CVector) -> C64 {
    v.dotc(u)
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Largest entrywise modulus of `a - b`, with the position where it occurs.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> (f64, (usize, usize)) {
    debug_assert_eq!(a.shape(), b.shape());
    let mut best = (0.0, (0, 0));
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            let d = (a[(i, j)] - b[(i, j)]).norm();
            if d > best.0 {
                best = (d, (i, j));
            }
        }
    }
    best
}

/// Largest `|m(i,j) - conj(m(j,i))|` and where it occurs.
pub fn hermitian_deviation(m: &CMatrix) -> (f64, (usize, usize)) {
    let mut best = (0.0, (0, 0));
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            let d = (m[(i, j)] - m[(j, i)].conj()).norm();
            if d > best.0 {
                best = (d, (i, j));
            }
        }
    }
    best
}

pub fn identity_deviation(m: &CMatrix) -> f64 {
    let eye = CMatrix::identity(m.nrows(), m.ncols());
    max_abs_diff(m, &eye).0
}

/// Eigendecomposition of a Hermitian matrix with eigenvalues sorted in
/// descending order; eigenvector columns follow the same order.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl HermitianEigen {
    pub fn new(m: &CMatrix) -> Self {
        let n = m.nrows();
        if n == 0 {
            return Self {
                values: Vec::new(),
                vectors: CMatrix::zeros(0, 0),
            };
        }
        // Symmetrize exactly so the solver sees a Hermitian input.
        let h = (m + m.adjoint()).map(|z| z * 0.5);
        let eig = SymmetricEigen::new(h);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            eig.eigenvalues[b]
                .partial_cmp(&eig.eigenvalues[a])
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.cmp(&b))
        });
        let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let mut vectors = CMatrix::zeros(n, n);
        for (dst, &src) in order.iter().enumerate() {
            vectors.set_column(dst, &eig.eigenvectors.column(src));
        }
        Self { values, vectors }
    }

    pub fn max(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn min(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    pub fn spectral_radius(&self) -> f64 {
        self.max().abs().max(self.min().abs())
    }

    /// Number of eigenvalues strictly above `cutoff`.
    pub fn count_above(&self, cutoff: f64) -> usize {
        self.values.iter().filter(|&&v| v > cutoff).count()
    }
}

/// Kronecker product of two complex vectors.
pub fn kron_vec(a: &CVector, b: &CVector) -> CVector {
    let mut out = CVector::zeros(a.len() * b.len());
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i * b.len() + j] = x * y;
        }
    }
    out
}

/// Block-diagonal assembly.
pub fn block_diag(blocks: &[&CMatrix]) -> CMatrix {
    let rows = blocks.iter().map(|b| b.nrows()).sum();
    let cols = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = CMatrix::zeros(rows, cols);
    let (mut r, mut c) = (0, 0);
    for b in blocks {
        out.view_mut((r, c), b.shape()).copy_from(b);
        r += b.nrows();
        c += b.ncols();
    }
    out
}

pub fn submatrix(m: &CMatrix, rows: &[usize], cols: &[usize]) -> CMatrix {
    CMatrix::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])])
}
