//! `0F1` and the characteristic generators `psi` and `psi_1` of a radial law.
//!
//! For a radial law `R` in dimension `n`,
//!
//! ```text
//! psi(u)   = E 0F1(n/2; -R^2 u / 4)
//! psi_1(u) = E[R^2 0F1(n/2 + 1; -R^2 u / 4)] / E R^2
//! psi'(u)  = -(E R^2 / (2n)) psi_1(u)
//! ```
//!
//! Student t generators are evaluated as normal scale mixtures rather than by
//! integrating the oscillating Bessel kernel against the radial density; the
//! radial route is kept as [`psi_by_radial_quadrature`] for cross-checking.

use statrs::function::gamma::ln_gamma;

use crate::elliptical::GeneratorSpec;
use crate::error::{Error, Result};
use crate::quadrature;

/// Result of a `0F1` evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesEval {
    pub value: f64,
    pub terms_used: usize,
    pub truncation_bound: f64,
}

const MAX_SERIES_TERMS: usize = 10_000;

/// `0F1(gamma; z) = sum_k z^k / ((gamma)_k k!)`.
///
/// Negative `z` beyond `2 max(gamma, 1)` goes through the Bessel connection
/// `0F1(gamma; -x^2/4) = Gamma(gamma) (x/2)^(1-gamma) J_(gamma-1)(x)`, with
/// `J` from Miller's backward recurrence normalized by a Neumann series.
pub fn hyp0f1(gamma: f64, z: f64) -> Result<SeriesEval> {
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(Error::NonPositiveParameter(gamma));
    }
    if z.is_nan() {
        return Err(Error::BadParameter("0F1 argument is NaN".into()));
    }
    if z == 0.0 {
        return Ok(SeriesEval {
            value: 1.0,
            terms_used: 1,
            truncation_bound: 0.0,
        });
    }
    if z > 0.0 || -z <= 2.0 * gamma.max(1.0) {
        Ok(series(gamma, z))
    } else {
        Ok(bessel_connection(gamma - 1.0, 2.0 * (-z).sqrt()))
    }
}

fn series(gamma: f64, z: f64) -> SeriesEval {
    let mut sum = 1.0;
    let mut comp = 0.0;
    let mut term = 1.0_f64;
    let mut k = 0usize;
    let mut bound = f64::INFINITY;
    while k < MAX_SERIES_TERMS {
        let kf = k as f64;
        term *= z / ((gamma + kf) * (kf + 1.0));
        k += 1;
        // Neumaier summation
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
        let ratio = z.abs() / ((gamma + k as f64) * (k as f64 + 1.0));
        if ratio < 0.5 {
            bound = term.abs() * ratio / (1.0 - ratio);
            if bound <= 1e-17 * (1.0 + (sum + comp).abs()) {
                break;
            }
        }
    }
    SeriesEval {
        value: sum + comp,
        terms_used: k + 1,
        truncation_bound: bound,
    }
}

fn bessel_connection(nu: f64, x: f64) -> SeriesEval {
    let top = (x + 10.0 * x.cbrt()).ceil() as usize + 40;
    let top = top + (top % 2);
    // j[k] is proportional to J_(nu + k)(x)
    let mut j = vec![0.0; top + 2];
    j[top] = 1.0;
    for k in (1..=top).rev() {
        let mu = nu + k as f64;
        j[k - 1] = 2.0 * mu / x * j[k] - j[k + 1];
        if j[k - 1].abs() > 1e200 {
            for v in j[k - 1..].iter_mut() {
                *v *= 1e-200;
            }
        }
    }
    // (x/2)^nu / Gamma(nu + 1) = sum_k c_k J_(nu + 2k)(x)
    let mut norm = j[0];
    let mut d = 1.0;
    let mut last = 0.0_f64;
    let mut k = 1usize;
    while 2 * k <= top {
        if k > 1 {
            d *= (nu + (k - 1) as f64) / k as f64;
        }
        last = (nu + 2.0 * k as f64) * d * j[2 * k];
        norm += last;
        k += 1;
    }
    let value = j[0] / norm;
    SeriesEval {
        value,
        terms_used: top,
        truncation_bound: (last / norm).abs() * (1.0 + value.abs()),
    }
}

fn check_u(u: f64) -> Result<()> {
    if u.is_nan() || u < 0.0 {
        return Err(Error::NegativeArgument(u));
    }
    Ok(())
}

/// `psi(u)`, with `phi(t) = psi(t't)` the characteristic function of `A'U R`
/// in dimension `n`.
pub fn psi_value(gen: &GeneratorSpec, n: usize, u: f64) -> Result<f64> {
    check_u(u)?;
    if u == 0.0 {
        return Ok(1.0);
    }
    match gen {
        GeneratorSpec::Normal => Ok((-0.5 * u).exp()),
        GeneratorSpec::StudentT { nu } => Ok(student_mixture(*nu, u, 0)),
        GeneratorSpec::RadialDiscrete { atoms } => {
            let gamma = n as f64 / 2.0;
            let mut s = 0.0;
            for &(r, w) in atoms {
                s += w * hyp0f1(gamma, -r * r * u / 4.0)?.value;
            }
            Ok(s)
        }
    }
}

/// `psi_1(u)`, the generator of the Hessian-term law.
pub fn psi1_value(gen: &GeneratorSpec, n: usize, u: f64) -> Result<f64> {
    check_u(u)?;
    if u == 0.0 {
        return Ok(1.0);
    }
    match gen {
        GeneratorSpec::Normal => Ok((-0.5 * u).exp()),
        GeneratorSpec::StudentT { nu } => Ok(student_mixture(*nu, u, 1)),
        GeneratorSpec::RadialDiscrete { atoms } => {
            let gamma = n as f64 / 2.0 + 1.0;
            let m2: f64 = atoms.iter().map(|(r, w)| w * r * r).sum();
            if m2 == 0.0 {
                return Ok(1.0);
            }
            let mut s = 0.0;
            for &(r, w) in atoms {
                if r > 0.0 {
                    s += w * r * r * hyp0f1(gamma, -r * r * u / 4.0)?.value;
                }
            }
            Ok(s / m2)
        }
    }
}

/// `E(R^2)` of the radial law in dimension `n`.
pub fn radial_second_moment(gen: &GeneratorSpec, n: usize) -> f64 {
    gen.second_moment(n)
}

/// `E R^2 / (2n)`, the factor in `psi' = -c psi_1`.
pub fn hessian_factor(gen: &GeneratorSpec, n: usize) -> f64 {
    gen.second_moment(n) / (2.0 * n as f64)
}

// The t law is the scale mixture X | S ~ N(0, S Sigma) with S = nu / W and
// W ~ chi^2_nu, so psi(u) = E exp(-u S / 2). Writing W = 2T with
// T ~ Gamma(nu/2) and y = ln T gives a doubly-exponentially decaying
// integrand on the real line, for which the trapezoid rule on a fixed lattice
// converges geometrically. `size_bias` = 1 weights by S, giving psi_1.
fn student_mixture(nu: f64, u: f64, size_bias: i32) -> f64 {
    const H: f64 = 1.0 / 16.0;
    let a = nu / 2.0 - size_bias as f64;
    let c = u * nu / 4.0;
    let log_f = |y: f64| a * y - y.exp() - c * (-y).exp();
    // peak of log_f
    let y0 = ((a + (a * a + 4.0 * c).sqrt()) / 2.0).ln();
    let k0 = (y0 / H).round() as i64;
    let peak = log_f(k0 as f64 * H);
    let mut total = 0.0;
    for dir in [1i64, -1] {
        let mut k = if dir == 1 { k0 } else { k0 - 1 };
        loop {
            let y = k as f64 * H;
            let lf = log_f(y);
            let term = (lf - peak).exp();
            total += term;
            let beyond = (dir == 1 && y > y0) || (dir == -1 && y < y0);
            if beyond && term < 1e-20 * total {
                break;
            }
            k += dir;
        }
    }
    (peak + (total * H).ln() - ln_gamma(a)).exp()
}

/// `psi(u)` by integrating `0F1(n/2; -r^2 u/4)` against the radial density.
pub fn psi_by_radial_quadrature(gen: &GeneratorSpec, n: usize, u: f64) -> Result<f64> {
    check_u(u)?;
    let gamma = n as f64 / 2.0;
    radial_expectation(gen, n, |r| hyp0f1(gamma, -r * r * u / 4.0).map(|s| s.value))
}

/// `psi_1(u)` by integrating `r^2 0F1(n/2 + 1; -r^2 u/4)` against the radial
/// density and dividing by `E R^2`.
pub fn psi1_by_radial_quadrature(gen: &GeneratorSpec, n: usize, u: f64) -> Result<f64> {
    check_u(u)?;
    let gamma = n as f64 / 2.0 + 1.0;
    let m2 = radial_expectation(gen, n, |r| Ok(r * r))?;
    if m2 == 0.0 {
        return Ok(1.0);
    }
    let s = radial_expectation(gen, n, |r| {
        hyp0f1(gamma, -r * r * u / 4.0).map(|s| r * r * s.value)
    })?;
    Ok(s / m2)
}

/// `E g(R)` by quadrature: composite Gauss-Legendre for the chi law, the map
/// `r = s / (1 - s)` for the heavy-tailed t radius, exact sums for atoms.
pub fn radial_expectation<F>(gen: &GeneratorSpec, n: usize, g: F) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let nf = n as f64;
    match gen {
        GeneratorSpec::RadialDiscrete { atoms } => {
            let mut s = 0.0;
            for &(r, w) in atoms {
                s += w * g(r)?;
            }
            Ok(s)
        }
        GeneratorSpec::Normal => {
            let upper = nf.sqrt() + 12.0;
            let panels = (upper / 0.1).ceil() as usize;
            let (x, w) = quadrature::composite(16, 0.0, upper, panels);
            let log_norm = (nf / 2.0 - 1.0) * 2f64.ln() + ln_gamma(nf / 2.0);
            let mut s = 0.0;
            for (r, wt) in x.iter().zip(&w) {
                let dens = ((nf - 1.0) * r.ln() - r * r / 2.0 - log_norm).exp();
                s += wt * dens * g(*r)?;
            }
            Ok(s)
        }
        GeneratorSpec::StudentT { nu } => {
            let (x, w) = quadrature::composite(20, 0.0, 1.0, 40);
            let half_n = nf / 2.0;
            let half_nu = nu / 2.0;
            let log_beta = ln_gamma(half_n) + ln_gamma(half_nu) - ln_gamma(half_n + half_nu);
            let mut s = 0.0;
            for (t, wt) in x.iter().zip(&w) {
                let r = t / (1.0 - t);
                let jac = 1.0 / ((1.0 - t) * (1.0 - t));
                // R^2 / n ~ F(n, nu)
                let f = r * r / nf;
                let log_f_dens = half_n * (nf / nu).ln() + (half_n - 1.0) * f.ln()
                    - (half_n + half_nu) * (1.0 + nf * f / nu).ln()
                    - log_beta;
                let dens = 2.0 * r / nf * log_f_dens.exp();
                if dens > 0.0 && dens.is_finite() {
                    s += wt * jac * dens * g(r)?;
                }
            }
            Ok(s)
        }
    }
}
