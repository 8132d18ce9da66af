//! Monte-Carlo cross-checks of the parameter criteria.
//!
//! Every estimate of `E f(Y) - E f(X)` is paired: both laws are driven by the
//! same `(R_i, U_i)`, so identical inputs give exactly zero with zero error.
//! A claim `E f(Y) >= E f(X)` counts as consistent unless its estimate falls
//! below `-3 SE`.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::catalog::{self, Growth, TestFunction};
use crate::elliptical::{build_ar1, build_equicorrelated, DispersionMatrix, EllipticalDistribution, GeneratorSpec};
use crate::error::{Error, Result};
use crate::linalg;
use crate::order::{check_order, OrderRelation, Verdict};
use crate::quadrature::gauss_legendre_on;
use crate::sampler::{map_chunks, place, radial_draws, RadialLaw, RandomStream};
use crate::special::hessian_factor;
use crate::stats::{MCEstimate, Moments};

/// Number of standard errors an estimate may fall short before it counts.
pub const SE_MULTIPLIER: f64 = 3.0;

#[derive(Debug, Clone, Copy, Default)]
struct PairedAcc {
    moments: Moments,
    sum_sq: f64,
    max_sq: f64,
}

impl PairedAcc {
    fn push(&mut self, d: f64) {
        self.moments.push(d);
        self.sum_sq += d * d;
        self.max_sq = self.max_sq.max(d * d);
    }

    fn merge(&mut self, o: &PairedAcc) {
        self.moments.merge(&o.moments);
        self.sum_sq += o.sum_sq;
        self.max_sq = self.max_sq.max(o.max_sq);
    }

    // A single draw dominating the squared differences means the sample
    // variance cannot be trusted.
    fn heavy_tail(&self) -> bool {
        self.moments.count >= 1000 && self.sum_sq > 0.0 && self.max_sq > 0.25 * self.sum_sq
    }
}

fn check_arity(f: &TestFunction, n: usize) -> Result<()> {
    if f.arity != n {
        return Err(Error::DimensionMismatch {
            what: "test function arity",
            expected: n,
            found: f.arity,
        });
    }
    Ok(())
}

/// Paired estimates of `E f(Y) - E f(X)` for several functions on one set of
/// coupled draws. Per-function errors are moment-guard trips.
fn paired_estimates(
    dx: &EllipticalDistribution,
    dy: &EllipticalDistribution,
    fs: &[TestFunction],
    samples: usize,
    stream: &RandomStream,
) -> Result<Vec<Result<MCEstimate>>> {
    dx.comparable_with(dy)?;
    let n = dx.dim();
    for f in fs {
        check_arity(f, n)?;
    }
    let guards: Vec<Result<()>> = fs.iter().map(|f| catalog::moment_guard(f, dx.generator())).collect();
    let rx = linalg::psd_sqrt(dx.sigma());
    let ry = linalg::psd_sqrt(dy.sigma());
    let chunks = map_chunks(samples, stream, |rows, rng| {
        let d = radial_draws(dx.generator(), n, rows, RadialLaw::Base, rng);
        let x = place(&d, dx.mu(), &rx);
        let y = place(&d, dy.mu(), &ry);
        let mut accs = vec![PairedAcc::default(); fs.len()];
        let mut px = vec![0.0; n];
        let mut py = vec![0.0; n];
        for i in 0..rows {
            for j in 0..n {
                px[j] = x[(i, j)];
                py[j] = y[(i, j)];
            }
            for (k, f) in fs.iter().enumerate() {
                if guards[k].is_ok() {
                    accs[k].push(f.eval(&py) - f.eval(&px));
                }
            }
        }
        accs
    });
    let mut total = vec![PairedAcc::default(); fs.len()];
    for c in &chunks {
        for (t, a) in total.iter_mut().zip(c) {
            t.merge(a);
        }
    }
    Ok(fs
        .iter()
        .zip(guards)
        .zip(total)
        .map(|((f, guard), acc)| {
            guard?;
            if f.growth != Growth::Bounded && acc.heavy_tail() {
                return Err(Error::MomentGuardTripped(format!(
                    "{}: one draw carries over a quarter of the squared differences",
                    f.id
                )));
            }
            Ok(acc.moments.estimate())
        })
        .collect())
}

/// Paired estimate of `E f(Y) - E f(X)` over `samples` coupled draws.
pub fn estimate_diff(
    dx: &EllipticalDistribution,
    dy: &EllipticalDistribution,
    f: &TestFunction,
    samples: usize,
    stream: &RandomStream,
) -> Result<MCEstimate> {
    paired_estimates(dx, dy, std::slice::from_ref(f), samples, stream)?
        .pop()
        .expect("one function in, one estimate out")
}

/// One line of a [`VerificationReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionEstimate {
    pub function: String,
    /// Absent when the moment guard refused the function.
    pub estimate: Option<MCEstimate>,
    /// Estimate below `-3 SE`.
    pub flagged: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub claim: String,
    /// Verdict of the parameter criterion, when it could be evaluated.
    pub verdict: Option<Verdict>,
    pub samples: u64,
    pub estimates: Vec<FunctionEstimate>,
    pub consistent: bool,
    pub violations: Vec<String>,
    /// The same battery with the arguments exchanged, run when the criterion fails.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub swapped: Option<Box<VerificationReport>>,
}

/// Flat row for CSV output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub claim: String,
    pub function: String,
    pub estimate: Option<f64>,
    pub std_error: Option<f64>,
    pub flag: bool,
}

impl VerificationReport {
    fn from_estimates(claim: String, verdict: Option<Verdict>, samples: usize, estimates: Vec<FunctionEstimate>) -> Self {
        let violations: Vec<String> = estimates.iter().filter(|e| e.flagged).map(|e| e.function.clone()).collect();
        Self {
            claim,
            verdict,
            samples: samples as u64,
            consistent: violations.is_empty(),
            violations,
            estimates,
            swapped: None,
        }
    }

    /// Rows of this report followed by those of the swapped run.
    pub fn csv_rows(&self) -> Vec<CsvRow> {
        let mut rows: Vec<CsvRow> = self
            .estimates
            .iter()
            .map(|e| CsvRow {
                claim: self.claim.clone(),
                function: e.function.clone(),
                estimate: e.estimate.map(|m| m.value),
                std_error: e.estimate.map(|m| m.std_error),
                flag: e.flagged,
            })
            .collect();
        if let Some(s) = &self.swapped {
            rows.extend(s.csv_rows());
        }
        rows
    }
}

fn battery(
    dx: &EllipticalDistribution,
    dy: &EllipticalDistribution,
    fs: &[TestFunction],
    samples: usize,
    stream: &RandomStream,
) -> Result<Vec<FunctionEstimate>> {
    Ok(fs
        .iter()
        .zip(paired_estimates(dx, dy, fs, samples, stream)?)
        .map(|(f, est)| match est {
            Ok(m) => FunctionEstimate {
                function: f.id.clone(),
                estimate: Some(m),
                flagged: !m.not_below(SE_MULTIPLIER),
                note: None,
            },
            Err(e) => FunctionEstimate {
                function: f.id.clone(),
                estimate: None,
                flagged: false,
                note: Some(e.to_string()),
            },
        })
        .collect())
}

/// Runs the catalog of `rel` on coupled draws of `(dx, dy)`.
pub fn verify_order_mc(
    dx: &EllipticalDistribution,
    dy: &EllipticalDistribution,
    rel: OrderRelation,
    samples: usize,
    stream: &RandomStream,
) -> Result<VerificationReport> {
    dx.comparable_with(dy)?;
    let fs = catalog::catalog_for(rel, dx.dim())?;
    let verdict = check_order(dx, dy, rel).ok().map(|r| r.verdict);
    let mut report = VerificationReport::from_estimates(
        rel.tag().to_string(),
        verdict,
        samples,
        battery(dx, dy, &fs, samples, stream)?,
    );
    if verdict == Some(Verdict::Fails) {
        let swapped = VerificationReport::from_estimates(
            format!("{} (swapped)", rel.tag()),
            check_order(dy, dx, rel).ok().map(|r| r.verdict),
            samples,
            battery(dy, dx, &fs, samples, stream)?,
        );
        report.swapped = Some(Box::new(swapped));
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrthantSide {
    /// `P(X > a)`.
    Upper,
    /// `P(X <= a)`.
    Lower,
}

fn in_orthant(row: impl Iterator<Item = f64>, a: &[f64], side: OrthantSide) -> bool {
    let mut row = row.zip(a);
    match side {
        OrthantSide::Upper => row.all(|(x, t)| x > *t),
        OrthantSide::Lower => row.all(|(x, t)| x <= *t),
    }
}

fn binomial(hits: u64, total: u64) -> MCEstimate {
    let p = hits as f64 / total as f64;
    MCEstimate {
        value: p,
        std_error: (p * (1.0 - p) / total as f64).sqrt(),
        samples: total,
    }
}

/// Indicator-mean estimate of an orthant probability.
pub fn orthant_probability(
    dist: &EllipticalDistribution,
    a: &[f64],
    side: OrthantSide,
    samples: usize,
    stream: &RandomStream,
) -> Result<MCEstimate> {
    let n = dist.dim();
    if a.len() != n {
        return Err(Error::DimensionMismatch {
            what: "orthant corner",
            expected: n,
            found: a.len(),
        });
    }
    let root = linalg::psd_sqrt(dist.sigma());
    let hits: u64 = map_chunks(samples, stream, |rows, rng| {
        let x = place(&radial_draws(dist.generator(), n, rows, RadialLaw::Base, rng), dist.mu(), &root);
        (0..rows).filter(|&i| in_orthant(x.row(i).iter().copied(), a, side)).count() as u64
    })
    .into_iter()
    .sum();
    Ok(binomial(hits, samples as u64))
}

/// One-parameter dispersion families used by the Slepian suites.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DispersionBuilder {
    Equicorrelated,
    Ar1,
}

impl DispersionBuilder {
    pub fn build(self, n: usize, sigma2: f64, rho: f64) -> Result<DispersionMatrix> {
        match self {
            DispersionBuilder::Equicorrelated => build_equicorrelated(n, sigma2, rho),
            DispersionBuilder::Ar1 => build_ar1(n, sigma2, rho),
        }
    }
}

impl fmt::Display for DispersionBuilder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DispersionBuilder::Equicorrelated => "equicorrelated",
            DispersionBuilder::Ar1 => "ar1",
        })
    }
}

impl FromStr for DispersionBuilder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "equicorrelated" | "equi" => Ok(DispersionBuilder::Equicorrelated),
            "ar1" => Ok(DispersionBuilder::Ar1),
            other => Err(Error::BadParameter(format!("unknown dispersion builder `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlepianPoint {
    pub rho: f64,
    pub upper: MCEstimate,
    pub lower: MCEstimate,
}

/// Paired change of both orthant probabilities between adjacent grid points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlepianStep {
    pub from: f64,
    pub to: f64,
    pub upper: MCEstimate,
    pub lower: MCEstimate,
    /// Both changes at least `-3 SE`.
    pub nondecreasing: bool,
    /// Upper-orthant change above `+3 SE`.
    pub strict_upper: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlepianReport {
    pub builder: DispersionBuilder,
    pub generator: GeneratorSpec,
    pub n: usize,
    pub a: Vec<f64>,
    pub points: Vec<SlepianPoint>,
    pub steps: Vec<SlepianStep>,
    pub monotone: bool,
}

/// Orthant probabilities along a grid of correlation values with `mu = 0`
/// and unit variances. All grid points share the same draws of `(R, U)`.
pub fn slepian_suite(
    builder: DispersionBuilder,
    gen: &GeneratorSpec,
    n: usize,
    rhos: &[f64],
    a: &[f64],
    samples: usize,
    stream: &RandomStream,
) -> Result<SlepianReport> {
    gen.validate()?;
    if a.len() != n {
        return Err(Error::DimensionMismatch {
            what: "orthant corner",
            expected: n,
            found: a.len(),
        });
    }
    let roots: Vec<DMatrix<f64>> = rhos
        .iter()
        .map(|r| builder.build(n, 1.0, *r).map(|s| linalg::psd_sqrt(s.as_matrix())))
        .collect::<Result<_>>()?;
    let k = rhos.len();
    let mu = DVector::zeros(n);
    // Per chunk: hit counts per grid point and paired step moments.
    let chunks = map_chunks(samples, stream, |rows, rng| {
        let d = radial_draws(gen, n, rows, RadialLaw::Base, rng);
        let xs: Vec<DMatrix<f64>> = roots.iter().map(|r| place(&d, &mu, r)).collect();
        let mut up = vec![0u64; k];
        let mut lo = vec![0u64; k];
        let mut step_up = vec![Moments::default(); k.saturating_sub(1)];
        let mut step_lo = vec![Moments::default(); k.saturating_sub(1)];
        let mut prev = (0.0, 0.0);
        for i in 0..rows {
            for (g, x) in xs.iter().enumerate() {
                let u = in_orthant(x.row(i).iter().copied(), a, OrthantSide::Upper) as u64 as f64;
                let l = in_orthant(x.row(i).iter().copied(), a, OrthantSide::Lower) as u64 as f64;
                up[g] += u as u64;
                lo[g] += l as u64;
                if g > 0 {
                    step_up[g - 1].push(u - prev.0);
                    step_lo[g - 1].push(l - prev.1);
                }
                prev = (u, l);
            }
        }
        (up, lo, step_up, step_lo)
    });
    let mut up = vec![0u64; k];
    let mut lo = vec![0u64; k];
    let mut step_up = vec![Moments::default(); k.saturating_sub(1)];
    let mut step_lo = vec![Moments::default(); k.saturating_sub(1)];
    for (cu, cl, su, sl) in &chunks {
        for g in 0..k {
            up[g] += cu[g];
            lo[g] += cl[g];
        }
        for g in 0..k.saturating_sub(1) {
            step_up[g].merge(&su[g]);
            step_lo[g].merge(&sl[g]);
        }
    }
    let total = samples as u64;
    let points: Vec<SlepianPoint> = (0..k)
        .map(|g| SlepianPoint {
            rho: rhos[g],
            upper: binomial(up[g], total),
            lower: binomial(lo[g], total),
        })
        .collect();
    let steps: Vec<SlepianStep> = (0..k.saturating_sub(1))
        .map(|g| {
            let upper = step_up[g].estimate();
            let lower = step_lo[g].estimate();
            SlepianStep {
                from: rhos[g],
                to: rhos[g + 1],
                upper,
                lower,
                nondecreasing: upper.not_below(SE_MULTIPLIER) && lower.not_below(SE_MULTIPLIER),
                strict_upper: upper.value > SE_MULTIPLIER * upper.std_error,
            }
        })
        .collect();
    Ok(SlepianReport {
        builder,
        generator: gen.clone(),
        n,
        a: a.to_vec(),
        monotone: steps.iter().all(|s| s.nondecreasing),
        points,
        steps,
    })
}

/// Both sides of the interpolation identity for `E f(Y) - E f(X)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub function: String,
    pub lambda_nodes: usize,
    /// Direct paired estimate.
    pub lhs: MCEstimate,
    /// Integral over the interpolating path of the gradient and Hessian terms.
    pub rhs: MCEstimate,
    pub combined_se: f64,
    pub consistent: bool,
}

/// Mean of `g(row)` over `samples` draws of `dist` under the given radial law.
fn path_mean<G>(dist: &EllipticalDistribution, law: RadialLaw, samples: usize, stream: &RandomStream, g: G) -> MCEstimate
where
    G: Fn(&[f64]) -> f64 + Sync,
{
    let n = dist.dim();
    let root = linalg::psd_sqrt(dist.sigma());
    let mut total = Moments::default();
    for m in map_chunks(samples, stream, |rows, rng| {
        let x = place(&radial_draws(dist.generator(), n, rows, law, rng), dist.mu(), &root);
        let mut m = Moments::default();
        let mut p = vec![0.0; n];
        for i in 0..rows {
            for j in 0..n {
                p[j] = x[(i, j)];
            }
            m.push(g(&p));
        }
        m
    }) {
        total.merge(&m);
    }
    total.estimate()
}

/// Compares the paired estimate of `E f(Y) - E f(X)` with
/// `int_0^1 E[delta' grad f(Z_l)] + c E[tr(D H_f(W_l))] dl`, where `Z_l` has
/// the interpolated parameters `(mu_x + l delta, Sigma_x + l D)`, `W_l` has the
/// same parameters under the generator `psi_1`, and `c = E R^2 / (2n)`.
pub fn identity_check(
    dx: &EllipticalDistribution,
    dy: &EllipticalDistribution,
    f: &TestFunction,
    lambda_nodes: usize,
    samples: usize,
    stream: &RandomStream,
) -> Result<IdentityCheck> {
    dx.comparable_with(dy)?;
    let n = dx.dim();
    check_arity(f, n)?;
    catalog::moment_guard(f, dx.generator())?;
    if lambda_nodes == 0 {
        return Err(Error::BadParameter("at least one lambda node is required".into()));
    }
    let lhs = estimate_diff(dx, dy, f, samples, &stream.substream(0))?;

    let delta = dy.mu() - dx.mu();
    let d = dy.sigma() - dx.sigma();
    let c = hessian_factor(dx.generator(), n);
    let (nodes, weights) = gauss_legendre_on(lambda_nodes, 0.0, 1.0);
    let mut value = 0.0;
    let mut var = 0.0;
    for (k, (l, w)) in nodes.iter().zip(&weights).enumerate() {
        let at = dx.with_parameters(dx.mu() + &delta * *l, dx.sigma() + &d * *l)?;
        let node_stream = stream.substream(k as u64 + 1);
        if delta.iter().any(|v| *v != 0.0) {
            let g = path_mean(&at, RadialLaw::Base, samples, &node_stream.substream(0), |x| {
                f.gradient(x).dot(&delta)
            });
            value += w * g.value;
            var += (w * g.std_error).powi(2);
        }
        if d.iter().any(|v| *v != 0.0) {
            let h = path_mean(&at, RadialLaw::SizeBiasedBall, samples, &node_stream.substream(1), |x| {
                d.component_mul(&f.hessian(x)).sum()
            });
            value += w * c * h.value;
            var += (w * c * h.std_error).powi(2);
        }
    }
    let rhs = MCEstimate {
        value,
        std_error: var.sqrt(),
        samples: (samples * lambda_nodes) as u64,
    };
    let combined_se = (lhs.std_error.powi(2) + rhs.std_error.powi(2)).sqrt();
    let gap = (lhs.value - rhs.value).abs();
    Ok(IdentityCheck {
        function: f.id.clone(),
        lambda_nodes,
        consistent: gap <= SE_MULTIPLIER * combined_se + 1e-9 * (1.0 + lhs.value.abs() + rhs.value.abs()),
        lhs,
        rhs,
        combined_se,
    })
}

/// Expected sign of `E f(Y) - E f(X)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Up,
    Down,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClaimStatus {
    Consistent,
    Violated,
    Guarded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentClaim {
    pub claim: String,
    pub function: String,
    pub direction: Direction,
    pub estimate: Option<MCEstimate>,
    pub status: ClaimStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub samples: u64,
    pub claims: Vec<MomentClaim>,
    pub consistent: bool,
}

fn sample_variance(n: usize) -> TestFunction {
    TestFunction::custom("sample_variance", n, &[], Growth::Polynomial { degree: 2 }, |x| {
        let m = x.iter().sum::<f64>() / x.len() as f64;
        x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (x.len() as f64 - 1.0)
    })
}

/// Moment inequalities implied by the supermodular order, on a pair that
/// satisfies its criterion.
pub fn moment_suite(
    dx: &EllipticalDistribution,
    dy: &EllipticalDistribution,
    samples: usize,
    stream: &RandomStream,
) -> Result<MomentReport> {
    let n = dx.dim();
    let sm = check_order(dx, dy, OrderRelation::Sm)?;
    if sm.verdict != Verdict::Holds {
        return Err(Error::PreconditionUnmet(
            "the pair must satisfy the supermodular criterion".into(),
        ));
    }
    let claims = [
        ("product moment of the first two coordinates", "cross", Direction::Up),
        ("product of increasing maps", "prod_logistic", Direction::Up),
        ("minimum", "min", Direction::Up),
        ("maximum", "max", Direction::Down),
        ("sample variance", "sample_variance", Direction::Down),
        ("convex function of the running maximum", "running_max_positive_squared", Direction::Up),
        ("squared sum of cubes", "cubic_sum_squared", Direction::Up),
    ];
    let fs: Vec<TestFunction> = claims
        .iter()
        .map(|(_, id, _)| {
            if *id == "sample_variance" {
                Ok(sample_variance(n))
            } else {
                catalog::lookup(id, n)
            }
        })
        .collect::<Result<_>>()?;
    let ests = paired_estimates(dx, dy, &fs, samples, stream)?;
    let out: Vec<MomentClaim> = claims
        .iter()
        .zip(ests)
        .map(|((claim, id, dir), est)| match est {
            Ok(m) => {
                let signed = MCEstimate {
                    value: if *dir == Direction::Up { m.value } else { -m.value },
                    ..m
                };
                MomentClaim {
                    claim: claim.to_string(),
                    function: id.to_string(),
                    direction: *dir,
                    estimate: Some(m),
                    status: if signed.not_below(SE_MULTIPLIER) {
                        ClaimStatus::Consistent
                    } else {
                        ClaimStatus::Violated
                    },
                    note: None,
                }
            }
            Err(e) => MomentClaim {
                claim: claim.to_string(),
                function: id.to_string(),
                direction: *dir,
                estimate: None,
                status: ClaimStatus::Guarded,
                note: Some(e.to_string()),
            },
        })
        .collect();
    Ok(MomentReport {
        samples: samples as u64,
        consistent: out.iter().all(|c| c.status != ClaimStatus::Violated),
        claims: out,
    })
}
