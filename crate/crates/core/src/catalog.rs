//! Test functions for the function classes that generate each order, with a
//! finite-difference checker for the class tags they claim.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cones;
use crate::elliptical::GeneratorSpec;
use crate::error::{Error, Result};
use crate::linalg;
use crate::order::OrderRelation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FunctionClass {
    Increasing,
    Convex,
    /// `g(a'x)` with `g` convex.
    LinearConvex,
    ComponentwiseConvex,
    Supermodular,
    /// Supermodular and componentwise convex.
    DirectionallyConvex,
    /// All mixed forward differences nonnegative.
    DeltaMonotone,
    HessianCompletelyPositive,
    HessianCopositive,
}

impl FunctionClass {
    pub const ALL: [FunctionClass; 9] = [
        FunctionClass::Increasing,
        FunctionClass::Convex,
        FunctionClass::LinearConvex,
        FunctionClass::ComponentwiseConvex,
        FunctionClass::Supermodular,
        FunctionClass::DirectionallyConvex,
        FunctionClass::DeltaMonotone,
        FunctionClass::HessianCompletelyPositive,
        FunctionClass::HessianCopositive,
    ];
}

/// Growth of `|f(x)|` as `|x| -> infinity`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Growth {
    Bounded,
    Polynomial { degree: u32 },
    Exponential,
}

/// Tags a function must carry to be a member of the class generating `rel`.
pub fn required_classes(rel: OrderRelation) -> &'static [FunctionClass] {
    use FunctionClass::*;
    match rel {
        OrderRelation::St => &[Increasing],
        OrderRelation::Cx => &[Convex],
        OrderRelation::Lcx => &[LinearConvex],
        OrderRelation::Icx => &[Increasing, Convex],
        OrderRelation::Sm => &[Supermodular],
        OrderRelation::Ism => &[Increasing, Supermodular],
        OrderRelation::Dcx => &[DirectionallyConvex],
        OrderRelation::Idcx => &[Increasing, DirectionallyConvex],
        OrderRelation::Uo => &[DeltaMonotone],
        OrderRelation::Ccx => &[ComponentwiseConvex],
        OrderRelation::Iccx => &[Increasing, ComponentwiseConvex],
        OrderRelation::Cp => &[HessianCompletelyPositive],
        OrderRelation::Cop => &[HessianCopositive],
    }
}

type Custom = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Kind {
    Sum,
    SumLogistic,
    ProdLogistic,
    SoftMin { h: f64 },
    LogSumExp { h: f64 },
    SoftplusSum,
    SqrtOnePlusSquaredSum,
    ExpScaledSum { c: f64 },
    SumExpHalf,
    ProdSoftplus,
    SquaredSum,
    SumOfSquares,
    DiffSquared,
    Cross { sign: f64 },
    SmoothExcess { h: f64, t: f64 },
    NegSampleVariance,
    SmoothRunningMax { h: f64 },
    SmoothSurvival { a: f64, h: f64 },
    Survival { a: f64 },
    Quadratic { a: DMatrix<f64> },
    Min,
    Max,
    CubicSumSquared,
    RunningMaxPosSquared,
    Custom(Custom),
}

/// A real function on `R^n` with the classes it belongs to.
#[derive(Clone)]
pub struct TestFunction {
    pub id: String,
    pub arity: usize,
    pub classes: BTreeSet<FunctionClass>,
    pub growth: Growth,
    pub description: String,
    kind: Kind,
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestFunction")
            .field("id", &self.id)
            .field("arity", &self.arity)
            .field("classes", &self.classes)
            .field("growth", &self.growth)
            .finish()
    }
}

/// Serializable view of a catalog entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub id: String,
    pub arity: usize,
    pub classes: Vec<FunctionClass>,
    pub growth: Growth,
    pub description: String,
}

fn logistic(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

fn softplus(t: f64) -> f64 {
    if t > 30.0 {
        t + (-t).exp()
    } else {
        t.exp().ln_1p()
    }
}

fn log_sum_exp(vals: impl Iterator<Item = f64> + Clone) -> f64 {
    let m = vals.clone().fold(f64::NEG_INFINITY, f64::max);
    m + vals.map(|v| (v - m).exp()).sum::<f64>().ln()
}

impl TestFunction {
    fn new(id: &str, n: usize, classes: &[FunctionClass], growth: Growth, description: &str, kind: Kind) -> Self {
        Self {
            id: id.to_string(),
            arity: n,
            classes: classes.iter().copied().collect(),
            growth,
            description: description.to_string(),
            kind,
        }
    }

    /// A user-supplied function; the claimed classes are taken on trust until
    /// checked with [`numeric_class_check`].
    pub fn custom<F>(id: &str, n: usize, classes: &[FunctionClass], growth: Growth, f: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Self::new(id, n, classes, growth, "custom", Kind::Custom(Arc::new(f)))
    }

    pub fn has(&self, class: FunctionClass) -> bool {
        self.classes.contains(&class)
    }

    pub fn entry(&self) -> CatalogEntry {
        CatalogEntry {
            id: self.id.clone(),
            arity: self.arity,
            classes: self.classes.iter().copied().collect(),
            growth: self.growth,
            description: self.description.clone(),
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let s = || x.iter().sum::<f64>();
        match &self.kind {
            Kind::Sum => s(),
            Kind::SumLogistic => x.iter().map(|v| logistic(*v)).sum(),
            Kind::ProdLogistic => x.iter().map(|v| logistic(*v)).product(),
            Kind::SoftMin { h } => -h * log_sum_exp(x.iter().map(|v| -v / h)),
            Kind::LogSumExp { h } => h * log_sum_exp(x.iter().map(|v| v / h)),
            Kind::SoftplusSum => softplus(s()),
            Kind::SqrtOnePlusSquaredSum => (1.0 + s() * s()).sqrt(),
            Kind::ExpScaledSum { c } => (c * s()).exp(),
            Kind::SumExpHalf => x.iter().map(|v| (0.5 * v).exp()).sum(),
            Kind::ProdSoftplus => x.iter().map(|v| softplus(*v)).product(),
            Kind::SquaredSum => s() * s(),
            Kind::SumOfSquares => x.iter().map(|v| v * v).sum(),
            Kind::DiffSquared => (x[0] - x[1]).powi(2),
            Kind::Cross { sign } => sign * x[0] * x[1],
            Kind::SmoothExcess { h, t } => {
                let g: f64 = x.iter().map(|v| logistic(*v)).sum();
                h * softplus((g - t) / h)
            }
            Kind::NegSampleVariance => {
                let n = x.len() as f64;
                let m = s() / n;
                -x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0)
            }
            Kind::SmoothRunningMax { h } => {
                let partial = x.iter().scan(0.0, |acc, v| {
                    *acc += v;
                    Some(*acc / h)
                });
                h * log_sum_exp(partial.collect::<Vec<_>>().into_iter())
            }
            Kind::SmoothSurvival { a, h } => x.iter().map(|v| logistic((v - a) / h)).product(),
            Kind::Survival { a } => {
                if x.iter().all(|v| v > a) {
                    1.0
                } else {
                    0.0
                }
            }
            Kind::Quadratic { a } => {
                let v = DVector::from_column_slice(x);
                linalg::quad_form(a, &v)
            }
            Kind::Min => x.iter().copied().fold(f64::INFINITY, f64::min),
            Kind::Max => x.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            Kind::CubicSumSquared => x.iter().map(|v| v * v * v).sum::<f64>().powi(2),
            Kind::RunningMaxPosSquared => {
                let mut acc = 0.0;
                let mut best = f64::NEG_INFINITY;
                for v in x {
                    acc += v;
                    best = best.max(acc);
                }
                best.max(0.0).powi(2)
            }
            Kind::Custom(f) => f(x),
        }
    }

    /// Gradient: closed form where available, otherwise central differences
    /// with step `1e-4 (1 + |x_i|)`.
    pub fn gradient(&self, x: &[f64]) -> DVector<f64> {
        let n = x.len();
        let ones = || DVector::from_element(n, 1.0);
        match &self.kind {
            Kind::Sum => ones(),
            Kind::SoftplusSum => ones() * logistic(x.iter().sum()),
            Kind::ExpScaledSum { c } => ones() * (c * (c * x.iter().sum::<f64>()).exp()),
            Kind::SumExpHalf => DVector::from_iterator(n, x.iter().map(|v| 0.5 * (0.5 * v).exp())),
            Kind::SquaredSum => ones() * (2.0 * x.iter().sum::<f64>()),
            Kind::SumOfSquares => DVector::from_iterator(n, x.iter().map(|v| 2.0 * v)),
            Kind::Cross { sign } => {
                let mut g = DVector::zeros(n);
                g[0] = sign * x[1];
                g[1] = sign * x[0];
                g
            }
            Kind::Quadratic { a } => (a + a.transpose()) * DVector::from_column_slice(x),
            Kind::LogSumExp { h } => softmax(x, *h),
            _ => fd_gradient(|p| self.eval(p), x),
        }
    }

    /// Hessian: closed form where available, otherwise central differences.
    pub fn hessian(&self, x: &[f64]) -> DMatrix<f64> {
        let n = x.len();
        let ones = || DMatrix::from_element(n, n, 1.0);
        match &self.kind {
            Kind::Sum => DMatrix::zeros(n, n),
            Kind::SoftplusSum => {
                let p = logistic(x.iter().sum());
                ones() * (p * (1.0 - p))
            }
            Kind::ExpScaledSum { c } => ones() * (c * c * (c * x.iter().sum::<f64>()).exp()),
            Kind::SumExpHalf => DMatrix::from_diagonal(&DVector::from_iterator(n, x.iter().map(|v| 0.25 * (0.5 * v).exp()))),
            Kind::SquaredSum => ones() * 2.0,
            Kind::SumOfSquares => DMatrix::identity(n, n) * 2.0,
            Kind::Cross { sign } => {
                let mut h = DMatrix::zeros(n, n);
                h[(0, 1)] = *sign;
                h[(1, 0)] = *sign;
                h
            }
            Kind::Quadratic { a } => a + a.transpose(),
            Kind::LogSumExp { h } => {
                let p = softmax(x, *h);
                (DMatrix::from_diagonal(&p) - &p * p.transpose()) / *h
            }
            _ => fd_hessian(|p| self.eval(p), x),
        }
    }
}

fn softmax(x: &[f64], h: f64) -> DVector<f64> {
    let m = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = x.iter().map(|v| ((v - m) / h).exp()).collect();
    let z: f64 = e.iter().sum();
    DVector::from_iterator(x.len(), e.into_iter().map(|v| v / z))
}

fn fd_step(v: f64) -> f64 {
    1e-4 * (1.0 + v.abs())
}

/// Central-difference gradient with step `1e-4 (1 + |x_i|)`.
pub fn fd_gradient(f: impl Fn(&[f64]) -> f64, x: &[f64]) -> DVector<f64> {
    let mut p = x.to_vec();
    DVector::from_iterator(
        x.len(),
        (0..x.len()).map(|i| {
            let h = fd_step(x[i]);
            p[i] = x[i] + h;
            let up = f(&p);
            p[i] = x[i] - h;
            let dn = f(&p);
            p[i] = x[i];
            (up - dn) / (2.0 * h)
        }),
    )
}

/// Central-difference Hessian with step `1e-4 (1 + |x_i|)`.
pub fn fd_hessian(f: impl Fn(&[f64]) -> f64, x: &[f64]) -> DMatrix<f64> {
    let steps: Vec<f64> = x.iter().map(|v| fd_step(*v)).collect();
    hessian_with_steps(&f, x, &steps)
}

fn hessian_with_steps(f: &impl Fn(&[f64]) -> f64, x: &[f64], steps: &[f64]) -> DMatrix<f64> {
    let n = x.len();
    let mut p = x.to_vec();
    let f0 = f(x);
    let mut h = DMatrix::zeros(n, n);
    for i in 0..n {
        let hi = steps[i];
        p[i] = x[i] + hi;
        let up = f(&p);
        p[i] = x[i] - hi;
        let dn = f(&p);
        p[i] = x[i];
        h[(i, i)] = (up - 2.0 * f0 + dn) / (hi * hi);
        for j in (i + 1)..n {
            let hj = steps[j];
            let mut corner = |si: f64, sj: f64| {
                p[i] = x[i] + si * hi;
                p[j] = x[j] + sj * hj;
                let v = f(&p);
                p[i] = x[i];
                p[j] = x[j];
                v
            };
            let v = (corner(1.0, 1.0) - corner(1.0, -1.0) - corner(-1.0, 1.0) + corner(-1.0, -1.0)) / (4.0 * hi * hj);
            h[(i, j)] = v;
            h[(j, i)] = v;
        }
    }
    h
}

/// Every function defined for dimension `n`.
pub fn all_functions(n: usize) -> Vec<TestFunction> {
    use FunctionClass::*;
    use Growth::*;
    let poly = |d| Polynomial { degree: d };
    let mut v = vec![
        TestFunction::new(
            "sum",
            n,
            &FunctionClass::ALL,
            poly(1),
            "x_1 + ... + x_n",
            Kind::Sum,
        ),
        TestFunction::new(
            "sum_logistic",
            n,
            &[Increasing, Supermodular, DeltaMonotone],
            Bounded,
            "sum of logistic(x_i)",
            Kind::SumLogistic,
        ),
        TestFunction::new(
            "prod_logistic",
            n,
            &[Increasing, Supermodular, DeltaMonotone],
            Bounded,
            "product of logistic(x_i)",
            Kind::ProdLogistic,
        ),
        TestFunction::new(
            "softmin",
            n,
            &[Increasing, Supermodular],
            poly(1),
            "smoothed minimum -h log sum exp(-x_i/h), h = 0.5",
            Kind::SoftMin { h: 0.5 },
        ),
        TestFunction::new(
            "logsumexp",
            n,
            &[Increasing, Convex, ComponentwiseConvex, HessianCopositive],
            poly(1),
            "smoothed maximum log sum exp(x_i)",
            Kind::LogSumExp { h: 1.0 },
        ),
        TestFunction::new(
            "softplus_sum",
            n,
            &[
                Increasing,
                Convex,
                LinearConvex,
                ComponentwiseConvex,
                Supermodular,
                DirectionallyConvex,
                HessianCompletelyPositive,
                HessianCopositive,
            ],
            poly(1),
            "log(1 + exp(x_1 + ... + x_n))",
            Kind::SoftplusSum,
        ),
        TestFunction::new(
            "sqrt_one_plus_sum_squared",
            n,
            &[
                Convex,
                LinearConvex,
                ComponentwiseConvex,
                Supermodular,
                DirectionallyConvex,
                HessianCompletelyPositive,
                HessianCopositive,
            ],
            poly(1),
            "sqrt(1 + (x_1 + ... + x_n)^2)",
            Kind::SqrtOnePlusSquaredSum,
        ),
        TestFunction::new(
            "exp_scaled_sum",
            n,
            &FunctionClass::ALL,
            Exponential,
            "exp(0.3 (x_1 + ... + x_n))",
            Kind::ExpScaledSum { c: 0.3 },
        ),
        TestFunction::new(
            "sum_exp_half",
            n,
            &[
                Increasing,
                Convex,
                ComponentwiseConvex,
                Supermodular,
                DirectionallyConvex,
                DeltaMonotone,
                HessianCompletelyPositive,
                HessianCopositive,
            ],
            Exponential,
            "sum of exp(x_i / 2)",
            Kind::SumExpHalf,
        ),
        TestFunction::new(
            "prod_softplus",
            n,
            &[
                Increasing,
                ComponentwiseConvex,
                Supermodular,
                DirectionallyConvex,
                DeltaMonotone,
                HessianCopositive,
            ],
            poly(n as u32),
            "product of log(1 + exp(x_i))",
            Kind::ProdSoftplus,
        ),
        TestFunction::new(
            "sum_squared",
            n,
            &[
                Convex,
                LinearConvex,
                ComponentwiseConvex,
                Supermodular,
                DirectionallyConvex,
                HessianCompletelyPositive,
                HessianCopositive,
            ],
            poly(2),
            "(x_1 + ... + x_n)^2",
            Kind::SquaredSum,
        ),
        TestFunction::new(
            "sum_of_squares",
            n,
            &[
                Convex,
                ComponentwiseConvex,
                Supermodular,
                DirectionallyConvex,
                HessianCompletelyPositive,
                HessianCopositive,
            ],
            poly(2),
            "x_1^2 + ... + x_n^2",
            Kind::SumOfSquares,
        ),
        TestFunction::new(
            "smooth_running_max",
            n,
            &[
                Increasing,
                Convex,
                ComponentwiseConvex,
                Supermodular,
                DirectionallyConvex,
                HessianCopositive,
            ],
            poly(1),
            "smoothed maximum of the partial sums, h = 0.5",
            Kind::SmoothRunningMax { h: 0.5 },
        ),
        TestFunction::new(
            "smooth_survival",
            n,
            &[Increasing, Supermodular, DeltaMonotone],
            Bounded,
            "product of logistic(x_i / 0.1), a smoothed indicator of x > 0",
            Kind::SmoothSurvival { a: 0.0, h: 0.1 },
        ),
        TestFunction::new(
            "survival",
            n,
            &[Increasing, Supermodular, DeltaMonotone],
            Bounded,
            "indicator of x_i > 0 for every i",
            Kind::Survival { a: 0.0 },
        ),
        TestFunction::new(
            "quad_tridiagonal",
            n,
            &[
                Convex,
                ComponentwiseConvex,
                Supermodular,
                DirectionallyConvex,
                HessianCompletelyPositive,
                HessianCopositive,
            ],
            poly(2),
            "x'Tx with T tridiagonal, 2 on the diagonal and 1 beside it",
            Kind::Quadratic {
                a: DMatrix::from_fn(n, n, |i, j| match i.abs_diff(j) {
                    0 => 2.0,
                    1 => 1.0,
                    _ => 0.0,
                }),
            },
        ),
        TestFunction::new(
            "min",
            n,
            &[Increasing, Supermodular, DeltaMonotone],
            poly(1),
            "min(x_1, ..., x_n)",
            Kind::Min,
        ),
        TestFunction::new(
            "max",
            n,
            &[Increasing, Convex, ComponentwiseConvex, HessianCopositive],
            poly(1),
            "max(x_1, ..., x_n)",
            Kind::Max,
        ),
        TestFunction::new(
            "cubic_sum_squared",
            n,
            &[Supermodular],
            poly(6),
            "(x_1^3 + ... + x_n^3)^2",
            Kind::CubicSumSquared,
        ),
        TestFunction::new(
            "running_max_positive_squared",
            n,
            &[
                Increasing,
                Convex,
                ComponentwiseConvex,
                Supermodular,
                DirectionallyConvex,
                HessianCopositive,
            ],
            poly(2),
            "square of the positive part of the running maximum of partial sums",
            Kind::RunningMaxPosSquared,
        ),
        TestFunction::new(
            "smooth_excess",
            n,
            &[Increasing, Supermodular],
            Bounded,
            "0.1 softplus((sum of logistic(x_i) - n/2) / 0.1)",
            Kind::SmoothExcess {
                h: 0.1,
                t: n as f64 / 2.0,
            },
        ),
    ];
    if n >= 2 {
        v.extend([
            TestFunction::new(
                "diff_squared",
                n,
                &[Convex, LinearConvex, ComponentwiseConvex, HessianCopositive],
                poly(2),
                "(x_1 - x_2)^2",
                Kind::DiffSquared,
            ),
            TestFunction::new(
                "cross",
                n,
                &[Supermodular, ComponentwiseConvex, DirectionallyConvex, HessianCopositive],
                poly(2),
                "x_1 x_2",
                Kind::Cross { sign: 1.0 },
            ),
            TestFunction::new(
                "neg_cross",
                n,
                &[ComponentwiseConvex],
                poly(2),
                "-x_1 x_2",
                Kind::Cross { sign: -1.0 },
            ),
            TestFunction::new(
                "neg_sample_variance",
                n,
                &[Supermodular],
                poly(2),
                "minus the sample variance of (x_1, ..., x_n)",
                Kind::NegSampleVariance,
            ),
        ]);
    }
    v
}

/// Looks a function up by id.
pub fn lookup(id: &str, n: usize) -> Result<TestFunction> {
    all_functions(n)
        .into_iter()
        .find(|f| f.id == id)
        .ok_or_else(|| Error::UnknownFunction(id.to_string()))
}

/// Members of the class generating `rel` in dimension `n`.
pub fn catalog_for(rel: OrderRelation, n: usize) -> Result<Vec<TestFunction>> {
    let univariate_ok = matches!(
        rel,
        OrderRelation::St | OrderRelation::Cx | OrderRelation::Lcx | OrderRelation::Icx
    );
    if n == 0 || (n < 2 && !univariate_ok) {
        return Err(Error::UnsupportedArity {
            relation: rel.tag().to_string(),
            n,
        });
    }
    let need = required_classes(rel);
    Ok(all_functions(n)
        .into_iter()
        .filter(|f| need.iter().all(|c| f.has(*c)))
        .collect())
}

/// Refuses generators under which `f` lacks a finite variance.
pub fn moment_guard(f: &TestFunction, gen: &GeneratorSpec) -> Result<()> {
    if let GeneratorSpec::StudentT { nu } = gen {
        match f.growth {
            Growth::Exponential => {
                return Err(Error::MomentGuardTripped(format!(
                    "{} grows exponentially; its moments are infinite under a t generator",
                    f.id
                )))
            }
            Growth::Polynomial { degree } if 2.0 * degree as f64 >= *nu => {
                return Err(Error::MomentGuardTripped(format!(
                    "{} has degree {degree}; its variance is infinite under t with nu = {nu}",
                    f.id
                )))
            }
            _ => {}
        }
    }
    Ok(())
}

/// Outcome of [`numeric_class_check`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum ClassCheck {
    Pass,
    Counterexample { point: Vec<f64>, detail: String },
}

impl ClassCheck {
    pub fn passed(&self) -> bool {
        matches!(self, ClassCheck::Pass)
    }
}

/// Checks the sign pattern defining `class` at `points` uniform points of
/// `[-3, 3]^n`, using differences with step `h` and tolerance
/// `tol (1 + |f(x)|)`.
pub fn numeric_class_check(f: &TestFunction, class: FunctionClass, points: usize, h: f64, tol: f64) -> ClassCheck {
    let n = f.arity;
    let mut rng = ChaCha8Rng::seed_from_u64(0x0c1a_55e5);
    for _ in 0..points {
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
        if let Some(detail) = check_at(f, class, &x, h, tol) {
            return ClassCheck::Counterexample { point: x, detail };
        }
    }
    ClassCheck::Pass
}

fn check_at(f: &TestFunction, class: FunctionClass, x: &[f64], h: f64, tol: f64) -> Option<String> {
    let n = x.len();
    let fx = f.eval(x);
    let slack = tol * (1.0 + fx.abs());
    let eval = |p: &[f64]| f.eval(p);
    let hessian = || hessian_with_steps(&eval, x, &vec![h; n]);
    match class {
        FunctionClass::Increasing => {
            let mut p = x.to_vec();
            for i in 0..n {
                p[i] = x[i] + h;
                let up = f.eval(&p);
                p[i] = x[i] - h;
                let dn = f.eval(&p);
                p[i] = x[i];
                let d = (up - dn) / (2.0 * h);
                if d < -slack {
                    return Some(format!("partial derivative {i} is {d}"));
                }
            }
            None
        }
        FunctionClass::Convex | FunctionClass::LinearConvex => {
            let eig = linalg::sym_eigen(&hessian());
            if eig.min() < -slack {
                return Some(format!("Hessian eigenvalue {}", eig.min()));
            }
            if class == FunctionClass::LinearConvex && n >= 2 && eig.values[n - 2] > slack {
                return Some(format!("Hessian has rank above one (eigenvalue {})", eig.values[n - 2]));
            }
            None
        }
        FunctionClass::ComponentwiseConvex | FunctionClass::Supermodular | FunctionClass::DirectionallyConvex => {
            let hm = hessian();
            let want_diag = class != FunctionClass::Supermodular;
            let want_off = class != FunctionClass::ComponentwiseConvex;
            for i in 0..n {
                for j in 0..n {
                    let v = hm[(i, j)];
                    let check = if i == j { want_diag } else { want_off };
                    if check && v < -slack {
                        return Some(format!("Hessian entry ({i},{j}) is {v}"));
                    }
                }
            }
            None
        }
        FunctionClass::DeltaMonotone => delta_monotone_at(f, x, h, tol),
        FunctionClass::HessianCompletelyPositive | FunctionClass::HessianCopositive => {
            let mut hm = hessian() + DMatrix::identity(n, n) * slack;
            hm = linalg::symmetrize(&hm).map(|v| if v < 0.0 && v >= -slack { 0.0 } else { v });
            let verdict = if class == FunctionClass::HessianCopositive {
                cones::is_copositive(&hm)
            } else {
                cones::is_completely_positive(&hm)
            };
            match verdict {
                Ok(v) if v.is_yes() => None,
                Ok(v) => Some(format!("Hessian cone test: {:?} ({})", v.verdict, v.note)),
                Err(e) => Some(e.to_string()),
            }
        }
    }
}

// Mixed forward differences over index subsets of size 1..=3 at several step
// sizes; each must be nonnegative up to rounding.
fn delta_monotone_at(f: &TestFunction, x: &[f64], h: f64, tol: f64) -> Option<String> {
    let n = x.len();
    let fx = f.eval(x);
    for eps in [h, 0.25, 1.0] {
        for size in 1..=n.min(3) {
            for subset in index_subsets(n, size) {
                let mut diff = 0.0;
                let mut mag = 0.0_f64;
                for mask in 0..(1u32 << size) {
                    let mut p = x.to_vec();
                    for (b, &i) in subset.iter().enumerate() {
                        if mask & (1 << b) != 0 {
                            p[i] += eps;
                        }
                    }
                    let sign = if (size as u32 - mask.count_ones()).is_multiple_of(2) { 1.0 } else { -1.0 };
                    let v = f.eval(&p);
                    mag = mag.max(v.abs());
                    diff += sign * v;
                }
                let floor = (1u64 << size) as f64 * 8.0 * f64::EPSILON * (1.0 + mag)
                    + tol * eps.powi(size as i32) * (1.0 + fx.abs());
                if diff < -floor {
                    return Some(format!("mixed difference over {subset:?} with step {eps} is {diff}"));
                }
            }
        }
    }
    None
}

fn index_subsets(n: usize, size: usize) -> Vec<Vec<usize>> {
    (0u32..(1 << n))
        .filter(|m| m.count_ones() as usize == size)
        .map(|m| (0..n).filter(|i| m & (1 << i) != 0).collect())
        .collect()
}
