//! Membership tests for the positive semidefinite, copositive and completely
//! positive cones, plus the positive-kernel test.
//!
//! Every `No` carries a witness that can be re-checked without trusting the
//! test itself: a direction `w` with `w'Aw < 0`, or a negative entry.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::lp;

/// Largest dimension accepted by the copositivity enumeration.
pub const MAX_COPOSITIVE_DIM: usize = 16;
/// Default PSD tolerance, relative to `1 + spectral radius`.
pub const DEFAULT_PSD_TOL: f64 = 1e-9;
/// Reconstruction bound for a factorization witness, `max |B'B - A|`.
pub const FACTOR_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Membership {
    Yes,
    No,
    Undetermined,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConeWitness {
    /// Direction with `w'Aw = value`.
    Direction { w: Vec<f64>, value: f64 },
    /// Entry `(i, j)` (zero-based) of the wrong sign.
    Entry { i: usize, j: usize, value: f64 },
    /// Rows of a nonnegative `B` with `B'B = A` up to `residual`.
    Factorization { b: Vec<Vec<f64>>, residual: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeVerdict {
    pub verdict: Membership,
    pub witness: Option<ConeWitness>,
    pub note: String,
}

impl ConeVerdict {
    fn yes(note: impl Into<String>) -> Self {
        Self {
            verdict: Membership::Yes,
            witness: None,
            note: note.into(),
        }
    }

    fn with(verdict: Membership, witness: ConeWitness, note: impl Into<String>) -> Self {
        Self {
            verdict,
            witness: Some(witness),
            note: note.into(),
        }
    }

    pub fn is_yes(&self) -> bool {
        self.verdict == Membership::Yes
    }

    pub fn is_no(&self) -> bool {
        self.verdict == Membership::No
    }
}

fn check_symmetric(a: &DMatrix<f64>) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch {
            what: "square matrix columns",
            expected: a.nrows(),
            found: a.ncols(),
        });
    }
    let gap = linalg::max_asymmetry(a);
    if gap > 1e-10 * (1.0 + linalg::max_abs(a)) {
        return Err(Error::AsymmetricInput { max_gap: gap });
    }
    Ok(())
}

fn scaled_direction(a: &DMatrix<f64>, v: &DVector<f64>) -> ConeWitness {
    let m = v.amax();
    let w = if m > 0.0 { v / m } else { v.clone() };
    let value = linalg::quad_form(a, &w);
    ConeWitness::Direction {
        w: w.iter().copied().collect(),
        value,
    }
}

/// `Yes` iff the smallest eigenvalue is at least `-tol (1 + spectral radius)`.
pub fn is_psd(a: &DMatrix<f64>, tol: f64) -> Result<ConeVerdict> {
    check_symmetric(a)?;
    let sym = linalg::symmetrize(a);
    let eig = linalg::sym_eigen(&sym);
    if a.nrows() == 0 || eig.min() >= -tol * (1.0 + eig.spectral_radius()) {
        return Ok(ConeVerdict::yes("smallest eigenvalue within tolerance of zero or above"));
    }
    Ok(ConeVerdict::with(
        Membership::No,
        scaled_direction(&sym, &eig.vector(0)),
        format!("smallest eigenvalue {:e}", eig.min()),
    ))
}

/// Kaplan's test: `A` is copositive iff no principal submatrix has a positive
/// eigenvector with a negative eigenvalue.
pub fn is_copositive(a: &DMatrix<f64>) -> Result<ConeVerdict> {
    check_symmetric(a)?;
    let n = a.nrows();
    if n > MAX_COPOSITIVE_DIM {
        return Err(Error::DimensionTooLarge {
            n,
            max: MAX_COPOSITIVE_DIM,
        });
    }
    let sym = linalg::symmetrize(a);
    let nonneg = sym.iter().all(|v| *v >= 0.0);
    if nonneg {
        return Ok(ConeVerdict::yes("entrywise nonnegative"));
    }
    if is_psd(&sym, DEFAULT_PSD_TOL)?.is_yes() {
        return Ok(ConeVerdict::yes("positive semidefinite"));
    }
    let scale = 1.0 + linalg::max_abs(&sym);
    for size in 1..=n {
        for subset in subsets_of_size(n, size) {
            let sub = linalg::principal_submatrix(&sym, &subset);
            let eig = linalg::sym_eigen(&sub);
            for k in 0..size {
                if eig.values[k] >= -1e-12 * scale {
                    break;
                }
                let mut v = eig.vector(k);
                if v.iter().all(|x| *x <= 1e-12) {
                    v.neg_mut();
                }
                if v.iter().any(|x| *x < -1e-12) {
                    continue;
                }
                let mut w = DVector::zeros(n);
                for (pos, &i) in subset.iter().enumerate() {
                    w[i] = v[pos].max(0.0);
                }
                if linalg::quad_form(&sym, &w) < 0.0 {
                    let note = format!("principal submatrix on {subset:?} has a positive eigenvector");
                    return Ok(ConeVerdict::with(Membership::No, scaled_direction(&sym, &w), note));
                }
            }
        }
    }
    Ok(ConeVerdict::yes("no principal submatrix has a positive eigenvector with negative eigenvalue"))
}

/// Index subsets of `0..n` with `size` elements, in lexicographic order.
fn subsets_of_size(n: usize, size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..size).collect();
    if size == 0 || size > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        let mut i = size;
        while i > 0 && cur[i - 1] == n - size + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        cur[i - 1] += 1;
        for j in i..size {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// Complete positivity: `A = B'B` with `B >= 0`.
pub fn is_completely_positive(a: &DMatrix<f64>) -> Result<ConeVerdict> {
    check_symmetric(a)?;
    let n = a.nrows();
    let sym = linalg::symmetrize(a);
    for j in 0..n {
        for i in 0..n {
            if sym[(i, j)] < 0.0 {
                return Ok(ConeVerdict::with(
                    Membership::No,
                    ConeWitness::Entry {
                        i,
                        j,
                        value: sym[(i, j)],
                    },
                    "negative entry",
                ));
            }
        }
    }
    let psd = is_psd(&sym, DEFAULT_PSD_TOL)?;
    if psd.is_no() {
        return Ok(ConeVerdict {
            verdict: Membership::No,
            witness: psd.witness,
            note: "not positive semidefinite".into(),
        });
    }
    if let Some(c) = nonnegative_factor(&sym) {
        let residual = linalg::max_abs(&(&c * c.transpose() - &sym));
        let b: Vec<Vec<f64>> = (0..c.ncols())
            .map(|k| c.column(k).iter().copied().collect())
            .filter(|row: &Vec<f64>| row.iter().any(|v| *v != 0.0))
            .collect();
        return Ok(ConeVerdict::with(
            Membership::Yes,
            ConeWitness::Factorization { b, residual },
            "nonnegative factorization found",
        ));
    }
    if n <= 4 {
        return Ok(ConeVerdict::yes(
            "doubly nonnegative of order at most 4, hence completely positive; factor search did not converge",
        ));
    }
    Ok(ConeVerdict {
        verdict: Membership::Undetermined,
        witness: None,
        note: "doubly nonnegative but no nonnegative factorization found".into(),
    })
}

/// Searches for `C >= 0` (n x m) with `CC' = A`, returning it when the
/// reconstruction error is within [`FACTOR_TOL`].
fn nonnegative_factor(a: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let n = a.nrows();
    let scale = linalg::max_abs(a);
    if scale == 0.0 {
        return Some(DMatrix::zeros(n, 1));
    }
    let accept = |c: &DMatrix<f64>| linalg::max_abs(&(c * c.transpose() - a)) <= FACTOR_TOL;
    if n == 1 {
        return Some(DMatrix::from_element(1, 1, a[(0, 0)].max(0.0).sqrt()));
    }
    if n == 2 {
        let (p, q, r) = (a[(0, 0)], a[(0, 1)], a[(1, 1)]);
        let c = if p > 0.0 {
            let s = p.sqrt();
            DMatrix::from_row_slice(2, 2, &[s, 0.0, q / s, (r - q * q / p).max(0.0).sqrt()])
        } else {
            DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 0.0, r.max(0.0).sqrt()])
        };
        return accept(&c).then_some(c);
    }
    // alternating projections between {C0 Q : Q orthogonal} and the
    // nonnegative orthant
    let m = n * (n + 1) / 2;
    let root = linalg::psd_sqrt(a);
    let mut c0 = DMatrix::zeros(n, m);
    c0.view_mut((0, 0), (n, n)).copy_from(&root);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_c0de);
    for restart in 0..40 {
        let mut q = if restart == 0 {
            DMatrix::identity(m, m)
        } else {
            random_orthogonal(m, &mut rng)
        };
        for _ in 0..4000 {
            let cq = &c0 * &q;
            if cq.iter().all(|v| *v >= -1e-15 * scale) {
                break;
            }
            let p = cq.map(|v| v.max(0.0));
            q = polar(&(c0.transpose() * p));
        }
        let c = (&c0 * &q).map(|v| v.max(0.0));
        if accept(&c) {
            return Some(c);
        }
    }
    None
}

fn polar(m: &DMatrix<f64>) -> DMatrix<f64> {
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("u requested");
    let vt = svd.v_t.expect("v requested");
    u * vt
}

fn random_orthogonal(m: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let g = DMatrix::from_fn(m, m, |_, _| rng.random::<f64>() - 0.5);
    g.qr().q()
}

/// A strictly positive `z` with `Az = 0`, scaled so its smallest entry is 1.
pub fn find_positive_kernel(a: &DMatrix<f64>) -> Option<DVector<f64>> {
    let n = a.nrows();
    if n == 0 || a.ncols() != n {
        return None;
    }
    let sym = linalg::symmetrize(a);
    let eig = linalg::sym_eigen(&sym);
    let tol = 1e-9 * (1.0 + eig.spectral_radius());
    let cols: Vec<usize> = (0..n).filter(|&k| eig.values[k].abs() <= tol).collect();
    if cols.is_empty() {
        return None;
    }
    let basis = DMatrix::from_fn(n, cols.len(), |i, j| eig.vectors[(i, cols[j])]);
    let normalize = |z: DVector<f64>| {
        let lo = z.min();
        (lo > 1e-12 * z.amax()).then(|| z / lo)
    };
    if cols.len() == 1 {
        let v = basis.column(0).into_owned();
        return normalize(v.clone()).or_else(|| normalize(-v));
    }
    // projection of the all-ones vector first, then a feasibility search
    let ones = DVector::from_element(n, 1.0);
    let proj = &basis * (basis.transpose() * &ones);
    if let Some(z) = normalize(proj) {
        return Some(z);
    }
    let coef = lp::find_feasible(&basis, &ones)?;
    normalize(&basis * coef)
}
