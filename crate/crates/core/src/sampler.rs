//! Seeded sampling from elliptical laws through `X = mu + R A'U`.
//!
//! Work is cut into fixed chunks of [`CHUNK_ROWS`] rows. Chunk `k` draws from
//! its own substream of the caller's [`RandomStream`], and chunk results are
//! merged in index order, so output depends on `(seed, N)` only and not on the
//! number of worker threads.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};
use rayon::prelude::*;

use crate::elliptical::{EllipticalDistribution, GeneratorSpec};
use crate::error::Result;
use crate::linalg;

pub const CHUNK_ROWS: usize = 4096;

/// A reproducible source of random numbers: a seed plus a stream id.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RandomStream {
    pub seed: u64,
    pub stream_id: u64,
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl RandomStream {
    pub fn new(seed: u64) -> Self {
        Self { seed, stream_id: 0 }
    }

    /// The `k`-th child stream. Children of distinct parents or indices get
    /// distinct ids with overwhelming probability.
    pub fn substream(&self, k: u64) -> Self {
        Self {
            seed: self.seed,
            stream_id: splitmix(splitmix(self.stream_id) ^ k.wrapping_add(1)),
        }
    }

    /// `k` independent children.
    pub fn split(&self, k: usize) -> Vec<Self> {
        (0..k as u64).map(|i| self.substream(i)).collect()
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut r = ChaCha8Rng::seed_from_u64(self.seed);
        r.set_stream(self.stream_id);
        r
    }
}

/// Runs `f(rows, rng)` on every chunk of a job with `total` rows, in parallel,
/// and returns the results in chunk order.
pub fn map_chunks<T, F>(total: usize, stream: &RandomStream, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, &mut ChaCha8Rng) -> T + Sync,
{
    let chunks = total.div_ceil(CHUNK_ROWS);
    (0..chunks)
        .into_par_iter()
        .map(|k| {
            let rows = CHUNK_ROWS.min(total - k * CHUNK_ROWS);
            let mut rng = stream.substream(k as u64).rng();
            f(rows, &mut rng)
        })
        .collect()
}

/// Which radial law to draw.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RadialLaw {
    /// The generating variate `R` itself.
    Base,
    /// `R~ V^(1/n)`: `R~` from the `r^2`-size-biased law, `V` uniform. This is
    /// the radius of the law with generator `psi_1`.
    SizeBiasedBall,
}

/// Radii and unit directions for one block of rows.
#[derive(Debug, Clone)]
pub struct RadialDraws {
    pub radius: Vec<f64>,
    /// `rows x n`, each row a unit vector.
    pub direction: DMatrix<f64>,
}

fn chi2(k: f64, rng: &mut ChaCha8Rng) -> f64 {
    ChiSquared::new(k).expect("positive degrees of freedom").sample(rng)
}

fn pick_atom(cum: &[f64], rng: &mut ChaCha8Rng) -> usize {
    let u: f64 = rng.random::<f64>() * cum[cum.len() - 1];
    cum.iter().position(|c| u < *c).unwrap_or(cum.len() - 1)
}

fn cumulative(weights: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut acc = 0.0;
    weights
        .map(|w| {
            acc += w;
            acc
        })
        .collect()
}

/// Draws `rows` radii and directions from `rng`.
pub fn radial_draws(gen: &GeneratorSpec, n: usize, rows: usize, law: RadialLaw, rng: &mut ChaCha8Rng) -> RadialDraws {
    let nf = n as f64;
    let mut direction = DMatrix::zeros(rows, n);
    let mut radius = Vec::with_capacity(rows);
    let cum = match gen {
        GeneratorSpec::RadialDiscrete { atoms } => match law {
            RadialLaw::Base => cumulative(atoms.iter().map(|a| a.1)),
            RadialLaw::SizeBiasedBall => cumulative(atoms.iter().map(|a| a.1 * a.0 * a.0)),
        },
        _ => Vec::new(),
    };
    let degenerate = cum.last().is_some_and(|c| *c == 0.0);
    for i in 0..rows {
        let mut norm2 = 0.0;
        for j in 0..n {
            let z: f64 = StandardNormal.sample(rng);
            direction[(i, j)] = z;
            norm2 += z * z;
        }
        let norm = norm2.sqrt();
        if norm > 0.0 {
            for j in 0..n {
                direction[(i, j)] /= norm;
            }
        } else {
            direction[(i, 0)] = 1.0;
        }
        let r = match (gen, law) {
            // the norm of the same normal vector is chi_n, independent of its direction
            (GeneratorSpec::Normal, RadialLaw::Base) => norm,
            (GeneratorSpec::Normal, RadialLaw::SizeBiasedBall) => chi2(nf + 2.0, rng).sqrt(),
            (GeneratorSpec::StudentT { nu }, RadialLaw::Base) => (chi2(nf, rng) * nu / chi2(*nu, rng)).sqrt(),
            (GeneratorSpec::StudentT { nu }, RadialLaw::SizeBiasedBall) => {
                (chi2(nf + 2.0, rng) * nu / chi2(nu - 2.0, rng)).sqrt()
            }
            (GeneratorSpec::RadialDiscrete { atoms }, _) => {
                if degenerate {
                    0.0
                } else {
                    atoms[pick_atom(&cum, rng)].0
                }
            }
        };
        let r = match law {
            RadialLaw::Base => r,
            RadialLaw::SizeBiasedBall => r * rng.random::<f64>().powf(1.0 / nf),
        };
        radius.push(r);
    }
    RadialDraws { radius, direction }
}

/// `mu + R A'U` row by row, with `root` the symmetric square root of `Sigma`.
pub fn place(draws: &RadialDraws, mu: &DVector<f64>, root: &DMatrix<f64>) -> DMatrix<f64> {
    let mut x = &draws.direction * root;
    for (i, r) in draws.radius.iter().enumerate() {
        let mut row = x.row_mut(i);
        row *= *r;
        row += mu.transpose();
    }
    x
}

fn collect_rows(n: usize, total: usize, blocks: Vec<DMatrix<f64>>) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(total, n);
    let mut at = 0;
    for b in blocks {
        out.view_mut((at, 0), (b.nrows(), n)).copy_from(&b);
        at += b.nrows();
    }
    out
}

/// `N x n` matrix of points uniform on the unit sphere.
pub fn sample_unit_sphere(n: usize, count: usize, stream: &RandomStream) -> DMatrix<f64> {
    let blocks = map_chunks(count, stream, |rows, rng| {
        radial_draws(&GeneratorSpec::Normal, n, rows, RadialLaw::Base, rng).direction
    });
    collect_rows(n, count, blocks)
}

/// `N` draws of the generating variate `R` in dimension `n`.
pub fn sample_radius(gen: &GeneratorSpec, n: usize, count: usize, stream: &RandomStream) -> Vec<f64> {
    map_chunks(count, stream, |rows, rng| radial_draws(gen, n, rows, RadialLaw::Base, rng).radius)
        .into_iter()
        .flatten()
        .collect()
}

/// `N` i.i.d. rows from `dist`.
pub fn sample_elliptical(dist: &EllipticalDistribution, count: usize, stream: &RandomStream) -> DMatrix<f64> {
    sample_law(dist, count, stream, RadialLaw::Base)
}

/// `N` rows from the law with the same `(mu, Sigma)` and generator `psi_1`.
pub fn sample_psi1_elliptical(dist: &EllipticalDistribution, count: usize, stream: &RandomStream) -> DMatrix<f64> {
    sample_law(dist, count, stream, RadialLaw::SizeBiasedBall)
}

fn sample_law(dist: &EllipticalDistribution, count: usize, stream: &RandomStream, law: RadialLaw) -> DMatrix<f64> {
    let n = dist.dim();
    let root = linalg::psd_sqrt(dist.sigma());
    let blocks = map_chunks(count, stream, |rows, rng| {
        place(&radial_draws(dist.generator(), n, rows, law, rng), dist.mu(), &root)
    });
    collect_rows(n, count, blocks)
}

/// Draws for both laws from the same `(R_i, U_i)`.
pub fn sample_coupled(
    dx: &EllipticalDistribution,
    dy: &EllipticalDistribution,
    count: usize,
    stream: &RandomStream,
) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    dx.comparable_with(dy)?;
    let n = dx.dim();
    let rx = linalg::psd_sqrt(dx.sigma());
    let ry = linalg::psd_sqrt(dy.sigma());
    let blocks = map_chunks(count, stream, |rows, rng| {
        let d = radial_draws(dx.generator(), n, rows, RadialLaw::Base, rng);
        (place(&d, dx.mu(), &rx), place(&d, dy.mu(), &ry))
    });
    let (bx, by): (Vec<_>, Vec<_>) = blocks.into_iter().unzip();
    Ok((collect_rows(n, count, bx), collect_rows(n, count, by)))
}
