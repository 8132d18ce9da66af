//! Elliptical distributions `E_n(mu, Sigma, phi)` described through the
//! stochastic representation `X = mu + R A'U`, where `U` is uniform on the
//! unit sphere, `R >= 0` is the generating variate and `A'A = Sigma`.
//!
//! The characteristic generator `phi` is never stored directly; it is
//! determined by the radial law (`GeneratorSpec`) together with the dimension.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

/// Relative symmetry tolerance: `|a_ij - a_ji| <= SYMMETRY_TOL * (1 + max|a|)`.
pub const SYMMETRY_TOL: f64 = 1e-10;
/// Relative PSD tolerance: `lambda_min >= -PSD_TOL * (1 + spectral radius)`.
pub const PSD_TOL: f64 = 1e-9;
/// Bound on `|-2 phi'(0) - E(R^2)/n|` checked at construction.
pub const GENERATOR_CONSISTENCY_TOL: f64 = 1e-10;
/// Largest admissible atom radius; keeps `r^2` and its weighted sums finite.
pub const MAX_ATOM_RADIUS: f64 = 1e100;

/// Location vector `mu`.
#[derive(Debug, Clone, PartialEq)]
pub struct Location(DVector<f64>);

impl Location {
    pub fn new(entries: DVector<f64>) -> Result<Self> {
        if let Some(bad) = entries.iter().find(|v| !v.is_finite()) {
            return Err(Error::BadParameter(format!("location entry {bad} is not finite")));
        }
        Ok(Self(entries))
    }

    pub fn from_slice(entries: &[f64]) -> Result<Self> {
        Self::new(DVector::from_column_slice(entries))
    }

    pub fn zeros(n: usize) -> Self {
        Self(DVector::zeros(n))
    }

    pub fn as_vector(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Dispersion (scale) matrix `Sigma`: symmetric and positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DispersionMatrix(DMatrix<f64>);

impl DispersionMatrix {
    /// Validates symmetry and positive semidefiniteness. The stored matrix is
    /// the exact symmetric part of the input.
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::DimensionMismatch {
                what: "dispersion matrix columns",
                expected: entries.nrows(),
                found: entries.ncols(),
            });
        }
        if let Some(bad) = entries.iter().find(|v| !v.is_finite()) {
            return Err(Error::BadParameter(format!("dispersion entry {bad} is not finite")));
        }
        let scale = 1.0 + linalg::max_abs(&entries);
        let gap = linalg::max_asymmetry(&entries);
        if gap > SYMMETRY_TOL * scale {
            return Err(Error::AsymmetricDispersion { max_gap: gap });
        }
        let sym = linalg::symmetrize(&entries);
        let eig = linalg::sym_eigen(&sym);
        if eig.min() < -PSD_TOL * (1.0 + eig.spectral_radius()) {
            return Err(Error::NotPositiveSemidefinite {
                eigenvalue: eig.min(),
                eigenvector: eig.vector(0).iter().copied().collect(),
            });
        }
        Ok(Self(sym))
    }

    pub fn from_row_slice(n: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch {
                what: "dispersion entries",
                expected: n * n,
                found: entries.len(),
            });
        }
        Self::new(DMatrix::from_row_slice(n, n, entries))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }
}

/// The radial law of the generating variate `R`.
///
/// `StudentT` is the multivariate t law with `nu` degrees of freedom, for which
/// `R^2 / n` follows an F distribution with `(n, nu)` degrees of freedom.
/// `RadialDiscrete` atoms are `(radius, weight)` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum GeneratorSpec {
    Normal,
    StudentT { nu: f64 },
    RadialDiscrete { atoms: Vec<(f64, f64)> },
}

impl GeneratorSpec {
    pub fn student_t(nu: f64) -> Result<Self> {
        let g = GeneratorSpec::StudentT { nu };
        g.validate()?;
        Ok(g)
    }

    pub fn radial_discrete(atoms: Vec<(f64, f64)>) -> Result<Self> {
        let g = GeneratorSpec::RadialDiscrete { atoms };
        g.validate()?;
        Ok(g)
    }

    /// A single atom at `r`.
    pub fn radial_atom(r: f64) -> Result<Self> {
        Self::radial_discrete(vec![(r, 1.0)])
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            GeneratorSpec::Normal => Ok(()),
            GeneratorSpec::StudentT { nu } => {
                if !nu.is_finite() || *nu <= 2.0 {
                    return Err(Error::BadGeneratorParameter(format!(
                        "student-t degrees of freedom must exceed 2, got {nu}"
                    )));
                }
                Ok(())
            }
            GeneratorSpec::RadialDiscrete { atoms } => {
                if atoms.is_empty() {
                    return Err(Error::BadGeneratorParameter("no radial atoms".into()));
                }
                for &(r, w) in atoms {
                    if !(0.0..=MAX_ATOM_RADIUS).contains(&r) {
                        return Err(Error::BadGeneratorParameter(format!(
                            "atom radius must lie in [0, {MAX_ATOM_RADIUS:e}] so that E(R^2) is finite, got {r}"
                        )));
                    }
                    if !w.is_finite() || w <= 0.0 {
                        return Err(Error::BadGeneratorParameter(format!(
                            "atom weight must be > 0, got {w}"
                        )));
                    }
                }
                let total: f64 = atoms.iter().map(|a| a.1).sum();
                if (total - 1.0).abs() > 1e-9 {
                    return Err(Error::BadGeneratorParameter(format!(
                        "atom weights sum to {total}, expected 1"
                    )));
                }
                Ok(())
            }
        }
    }

    /// `E(R^2)` in dimension `n`.
    pub fn second_moment(&self, n: usize) -> f64 {
        let n = n as f64;
        match self {
            GeneratorSpec::Normal => n,
            GeneratorSpec::StudentT { nu } => n * nu / (nu - 2.0),
            GeneratorSpec::RadialDiscrete { atoms } => atoms.iter().map(|(r, w)| w * r * r).sum(),
        }
    }

    /// `phi'(0)` of the characteristic generator in dimension `n`, computed
    /// from the generator side: `exp(-u/2)` for the normal law, the
    /// inverse-gamma scale mixture for Student t, and the leading
    /// coefficient of the `0F1(n/2; -r^2 u / 4)` expansion for atoms.
    pub fn phi_prime_zero(&self, n: usize) -> f64 {
        match self {
            GeneratorSpec::Normal => -0.5,
            GeneratorSpec::StudentT { nu } => -0.5 * nu / (nu - 2.0),
            GeneratorSpec::RadialDiscrete { atoms } => {
                let gamma = n as f64 / 2.0;
                atoms.iter().map(|(r, w)| -w * r * r / (4.0 * gamma)).sum()
            }
        }
    }

    /// Whether the same parameters describe the law in every dimension, so
    /// projections keep the generator.
    pub fn dimension_free(&self) -> bool {
        !matches!(self, GeneratorSpec::RadialDiscrete { .. })
    }

    pub fn unbounded_support(&self) -> bool {
        !matches!(self, GeneratorSpec::RadialDiscrete { .. })
    }

    /// `-2 phi'(0)`, the factor turning `Sigma` into the covariance matrix.
    pub fn covariance_factor(&self, n: usize) -> f64 {
        -2.0 * self.phi_prime_zero(n)
    }

    /// Checks `-2 phi'(0) = E(R^2) / n` for dimension `n`.
    pub fn check_consistency(&self, n: usize) -> Result<()> {
        if n == 0 {
            return Err(Error::BadParameter("dimension must be at least 1".into()));
        }
        let lhs = -2.0 * self.phi_prime_zero(n);
        let rhs = self.second_moment(n) / n as f64;
        if (lhs - rhs).abs() > GENERATOR_CONSISTENCY_TOL * (1.0 + rhs.abs()) {
            return Err(Error::BadGeneratorParameter(format!(
                "inconsistent generator: -2 phi'(0) = {lhs}, E(R^2)/n = {rhs}"
            )));
        }
        Ok(())
    }
}

/// `X ~ E_n(mu, Sigma, phi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EllipticalDistribution {
    mu: Location,
    sigma: DispersionMatrix,
    gen: GeneratorSpec,
}

impl EllipticalDistribution {
    pub fn new(mu: Location, sigma: DispersionMatrix, gen: GeneratorSpec) -> Result<Self> {
        let d = Self { mu, sigma, gen };
        d.validate()?;
        Ok(d)
    }

    /// Convenience constructor from raw parts; runs every validation.
    pub fn from_parts(mu: &[f64], sigma: DMatrix<f64>, gen: GeneratorSpec) -> Result<Self> {
        Self::new(Location::from_slice(mu)?, DispersionMatrix::new(sigma)?, gen)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.sigma.dim();
        if n == 0 {
            return Err(Error::BadParameter("dimension must be at least 1".into()));
        }
        if self.mu.len() != n {
            return Err(Error::DimensionMismatch {
                what: "location length",
                expected: n,
                found: self.mu.len(),
            });
        }
        self.gen.validate()?;
        self.gen.check_consistency(n)
    }

    pub fn dim(&self) -> usize {
        self.sigma.dim()
    }

    pub fn mu(&self) -> &DVector<f64> {
        self.mu.as_vector()
    }

    pub fn sigma(&self) -> &DMatrix<f64> {
        self.sigma.as_matrix()
    }

    pub fn generator(&self) -> &GeneratorSpec {
        &self.gen
    }

    /// Same generator and dimension, so the pair can be compared.
    pub fn comparable_with(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                what: "compared distributions",
                expected: self.dim(),
                found: other.dim(),
            });
        }
        if self.gen != other.gen {
            return Err(Error::GeneratorMismatch);
        }
        Ok(())
    }

    /// Law of `B X + b` for a full-row-rank `m x n` matrix `B`.
    pub fn affine_transform(&self, b_mat: &DMatrix<f64>, shift: &DVector<f64>) -> Result<Self> {
        let n = self.dim();
        if b_mat.ncols() != n {
            return Err(Error::DimensionMismatch {
                what: "transform columns",
                expected: n,
                found: b_mat.ncols(),
            });
        }
        let m = b_mat.nrows();
        if shift.len() != m {
            return Err(Error::DimensionMismatch {
                what: "shift length",
                expected: m,
                found: shift.len(),
            });
        }
        let rank = linalg::numerical_rank(b_mat, 1e-12);
        if m == 0 || m > n || rank < m {
            return Err(Error::RankDeficient { rows: m, rank });
        }
        self.check_reducible(m)?;
        let mu = b_mat * self.mu() + shift;
        let sigma = b_mat * self.sigma() * b_mat.transpose();
        Self::new(
            Location::new(mu)?,
            DispersionMatrix::new(linalg::symmetrize(&sigma))?,
            self.gen.clone(),
        )
    }

    // Atoms give the law of R in this dimension only; the generating variate of
    // an m-dimensional projection is R times an independent beta factor.
    fn check_reducible(&self, m: usize) -> Result<()> {
        let n = self.dim();
        if m < n && !self.gen.dimension_free() {
            return Err(Error::GeneratorNotReducible { from: n, to: m });
        }
        Ok(())
    }

    /// Marginal law of the coordinates `idx` (zero-based, strictly increasing).
    pub fn marginal_of(&self, idx: &[usize]) -> Result<Self> {
        let n = self.dim();
        if let Some(&bad) = idx.iter().find(|&&i| i >= n) {
            return Err(Error::IndexOutOfRange { index: bad, dim: n });
        }
        if idx.is_empty() || idx.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidIndexSet);
        }
        self.check_reducible(idx.len())?;
        let mu = DVector::from_iterator(idx.len(), idx.iter().map(|&i| self.mu()[i]));
        let sigma = linalg::principal_submatrix(self.sigma(), idx);
        Self::new(Location::new(mu)?, DispersionMatrix::new(sigma)?, self.gen.clone())
    }

    /// `Cov(X) = E(R^2)/n * Sigma`.
    pub fn covariance_of(&self) -> DMatrix<f64> {
        let n = self.dim();
        self.sigma() * (self.gen.second_moment(n) / n as f64)
    }

    /// Same generator, location `mu` and dispersion `sigma` replaced.
    pub fn with_parameters(&self, mu: DVector<f64>, sigma: DMatrix<f64>) -> Result<Self> {
        Self::new(Location::new(mu)?, DispersionMatrix::new(sigma)?, self.gen.clone())
    }
}

/// Equicorrelated dispersion: `sigma2` on the diagonal, `rho * sigma2` off it.
pub fn build_equicorrelated(n: usize, sigma2: f64, rho: f64) -> Result<DispersionMatrix> {
    check_builder_args(n, sigma2, rho)?;
    if n > 1 && rho < -1.0 / (n as f64 - 1.0) {
        // Smallest eigenvalue sigma2 * (1 + (n-1) rho) on the all-ones direction.
        let v = 1.0 / (n as f64).sqrt();
        return Err(Error::NotPositiveSemidefinite {
            eigenvalue: sigma2 * (1.0 + (n as f64 - 1.0) * rho),
            eigenvector: vec![v; n],
        });
    }
    let m = DMatrix::from_fn(n, n, |i, j| if i == j { sigma2 } else { rho * sigma2 });
    DispersionMatrix::new(m)
}

/// First-order autoregressive dispersion: entry `(i, j)` is `rho^|i-j| * sigma2`.
pub fn build_ar1(n: usize, sigma2: f64, rho: f64) -> Result<DispersionMatrix> {
    check_builder_args(n, sigma2, rho)?;
    let m = DMatrix::from_fn(n, n, |i, j| sigma2 * rho.powi(i.abs_diff(j) as i32));
    DispersionMatrix::new(m)
}

fn check_builder_args(n: usize, sigma2: f64, rho: f64) -> Result<()> {
    if n == 0 {
        return Err(Error::BadParameter("dimension must be at least 1".into()));
    }
    if !(sigma2.is_finite() && sigma2 > 0.0) {
        return Err(Error::BadParameter(format!("variance must be > 0, got {sigma2}")));
    }
    if !(-1.0..=1.0).contains(&rho) {
        return Err(Error::BadParameter(format!("correlation must lie in [-1, 1], got {rho}")));
    }
    Ok(())
}
