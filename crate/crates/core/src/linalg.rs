//! Small dense linear-algebra helpers on top of `nalgebra`.
//!
//! Every eigen decomposition returned from here is ordered by ascending
//! eigenvalue, and each eigenvector is signed so that its first component of
//! non-negligible magnitude is positive. Callers rely on this for
//! reproducible witnesses.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

/// Ascending eigenvalues and matching unit eigenvectors (as columns).
#[derive(Debug, Clone)]
pub struct SymEigen {
    pub values: DVector<f64>,
    pub vectors: DMatrix<f64>,
}

impl SymEigen {
    pub fn vector(&self, k: usize) -> DVector<f64> {
        self.vectors.column(k).into_owned()
    }

    pub fn min(&self) -> f64 {
        self.values.get(0).copied().unwrap_or(0.0)
    }

    pub fn spectral_radius(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

/// Symmetric eigen decomposition of `a` (only the symmetric part is used).
pub fn sym_eigen(a: &DMatrix<f64>) -> SymEigen {
    let n = a.nrows();
    if n == 0 {
        return SymEigen {
            values: DVector::zeros(0),
            vectors: DMatrix::zeros(0, 0),
        };
    }
    let sym = symmetrize(a);
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[i]
            .partial_cmp(&eig.eigenvalues[j])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(i.cmp(&j))
    });
    let values = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut v = eig.eigenvectors.column(src).into_owned();
        canonical_sign(&mut v);
        vectors.set_column(dst, &v);
    }
    SymEigen { values, vectors }
}

/// Flip `v` so that its first component with magnitude above 1e-12 is positive.
pub fn canonical_sign(v: &mut DVector<f64>) {
    let scale = v.amax().max(f64::MIN_POSITIVE);
    if let Some(first) = v.iter().find(|x| x.abs() > 1e-12 * scale) {
        if *first < 0.0 {
            v.neg_mut();
        }
    }
}

pub fn symmetrize(a: &DMatrix<f64>) -> DMatrix<f64> {
    (a + a.transpose()) * 0.5
}

/// Largest |a_ij - a_ji|.
pub fn max_asymmetry(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows().min(a.ncols());
    let mut gap = 0.0_f64;
    for i in 0..n {
        for j in (i + 1)..n {
            gap = gap.max((a[(i, j)] - a[(j, i)]).abs());
        }
    }
    gap
}

/// Largest absolute entry, zero for an empty matrix.
pub fn max_abs(a: &DMatrix<f64>) -> f64 {
    a.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}

/// Symmetric square root `V diag(sqrt(max(λ, 0))) V'` of a PSD matrix.
/// Negative eigenvalues within rounding are clamped to zero, so singular
/// matrices are handled the same way as definite ones.
pub fn psd_sqrt(a: &DMatrix<f64>) -> DMatrix<f64> {
    let eig = sym_eigen(a);
    let n = a.nrows();
    let mut scaled = eig.vectors.clone();
    for k in 0..n {
        let root = eig.values[k].max(0.0).sqrt();
        scaled.column_mut(k).scale_mut(root);
    }
    let root = &scaled * eig.vectors.transpose();
    symmetrize(&root)
}

/// Numerical rank from singular values above `tol * max(m, n) * sigma_max`.
pub fn numerical_rank(b: &DMatrix<f64>, tol: f64) -> usize {
    if b.is_empty() {
        return 0;
    }
    let sv = b.clone().svd(false, false).singular_values;
    let smax = sv.iter().fold(0.0_f64, |m, v| m.max(*v));
    if smax == 0.0 {
        return 0;
    }
    let cut = tol * (b.nrows().max(b.ncols()) as f64) * smax;
    sv.iter().filter(|s| **s > cut).count()
}

/// `w' A w`.
pub fn quad_form(a: &DMatrix<f64>, w: &DVector<f64>) -> f64 {
    (a * w).dot(w)
}

/// Extract the principal submatrix on `idx`.
pub fn principal_submatrix(a: &DMatrix<f64>, idx: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(idx.len(), idx.len(), |i, j| a[(idx[i], idx[j])])
}
