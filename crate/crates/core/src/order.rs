//! Parameter criteria for the thirteen integral stochastic orders between two
//! elliptical laws sharing a characteristic generator.
//!
//! With `delta = mu_y - mu_x` and `D = Sigma_y - Sigma_x` the criteria are
//!
//! | relation | criterion                                              |
//! |----------|--------------------------------------------------------|
//! | st       | `delta >= 0`, `D = 0`                                  |
//! | cx, lcx  | `delta = 0`, `D` PSD                                   |
//! | icx      | `delta >= 0`, `D` PSD (sufficient); `D` copositive (necessary) |
//! | sm       | `delta = 0`, `diag D = 0`, `D_ij >= 0`                 |
//! | ism, uo  | `delta >= 0`, `diag D = 0`, `D_ij >= 0` (sufficient)   |
//! | dcx      | `delta = 0`, `D >= 0` entrywise                        |
//! | idcx     | `delta >= 0`, `D >= 0` entrywise                       |
//! | ccx      | `delta = 0`, `diag D >= 0`, `D_ij = 0`                 |
//! | iccx     | `delta >= 0`, `diag D >= 0`, `D_ij = 0`                |
//! | cp       | `delta = 0`, `D` copositive                            |
//! | cop      | `delta = 0`, `D` completely positive                   |
//!
//! Indices in witnesses are one-based.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::cones::{self, ConeVerdict, Membership};
use crate::elliptical::EllipticalDistribution;
use crate::error::{Error, Result};
use crate::linalg;

/// Default relative equality tolerance for parameters.
pub const DEFAULT_EQ_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrderRelation {
    St,
    Cx,
    Lcx,
    Icx,
    Sm,
    Ism,
    Dcx,
    Idcx,
    Uo,
    Ccx,
    Iccx,
    Cp,
    Cop,
}

impl OrderRelation {
    pub const ALL: [OrderRelation; 13] = [
        OrderRelation::St,
        OrderRelation::Cx,
        OrderRelation::Lcx,
        OrderRelation::Icx,
        OrderRelation::Sm,
        OrderRelation::Ism,
        OrderRelation::Dcx,
        OrderRelation::Idcx,
        OrderRelation::Uo,
        OrderRelation::Ccx,
        OrderRelation::Iccx,
        OrderRelation::Cp,
        OrderRelation::Cop,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            OrderRelation::St => "st",
            OrderRelation::Cx => "cx",
            OrderRelation::Lcx => "lcx",
            OrderRelation::Icx => "icx",
            OrderRelation::Sm => "sm",
            OrderRelation::Ism => "ism",
            OrderRelation::Dcx => "dcx",
            OrderRelation::Idcx => "idcx",
            OrderRelation::Uo => "uo",
            OrderRelation::Ccx => "ccx",
            OrderRelation::Iccx => "iccx",
            OrderRelation::Cp => "cp",
            OrderRelation::Cop => "cop",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            OrderRelation::St => "usual stochastic order",
            OrderRelation::Cx => "convex order",
            OrderRelation::Lcx => "linear convex order",
            OrderRelation::Icx => "increasing convex order",
            OrderRelation::Sm => "supermodular order",
            OrderRelation::Ism => "increasing supermodular order",
            OrderRelation::Dcx => "directionally convex order",
            OrderRelation::Idcx => "increasing directionally convex order",
            OrderRelation::Uo => "upper orthant order",
            OrderRelation::Ccx => "componentwise convex order",
            OrderRelation::Iccx => "increasing componentwise convex order",
            OrderRelation::Cp => "completely positive Hessian order",
            OrderRelation::Cop => "copositive Hessian order",
        }
    }

    /// The parameter criterion used for this relation.
    pub fn criterion(self) -> &'static str {
        match self {
            OrderRelation::St => "mu_x <= mu_y and Sigma_y = Sigma_x",
            OrderRelation::Cx | OrderRelation::Lcx => "mu_x = mu_y and Sigma_y - Sigma_x positive semidefinite",
            OrderRelation::Icx => {
                "sufficient: mu_x <= mu_y and Sigma_y - Sigma_x positive semidefinite; \
                 necessary: mu_x <= mu_y and Sigma_y - Sigma_x copositive; \
                 equivalent to the sufficient condition when Sigma_y - Sigma_x has a positive kernel vector"
            }
            OrderRelation::Sm => "mu_x = mu_y, sigma_ii^x = sigma_ii^y and sigma_ij^x <= sigma_ij^y for i < j",
            OrderRelation::Ism | OrderRelation::Uo => {
                "sufficient: mu_x <= mu_y, sigma_ii^x = sigma_ii^y and sigma_ij^x <= sigma_ij^y for i < j; \
                 necessary: mu_x <= mu_y, sigma_ii^x = sigma_ii^y and E(X_i X_j) <= E(Y_i Y_j); \
                 equivalent to the sufficient condition for zero means"
            }
            OrderRelation::Dcx => "mu_x = mu_y and sigma_ij^x <= sigma_ij^y for all i, j",
            OrderRelation::Idcx => "mu_x <= mu_y and sigma_ij^x <= sigma_ij^y for all i, j",
            OrderRelation::Ccx => "mu_x = mu_y, sigma_ii^x <= sigma_ii^y and sigma_ij^x = sigma_ij^y for i < j",
            OrderRelation::Iccx => "mu_x <= mu_y, sigma_ii^x <= sigma_ii^y and sigma_ij^x = sigma_ij^y for i < j",
            OrderRelation::Cp => "mu_x = mu_y and Sigma_y - Sigma_x copositive",
            OrderRelation::Cop => "mu_x = mu_y and Sigma_y - Sigma_x completely positive",
        }
    }

    /// Rows whose criterion is necessary and sufficient for every mean vector.
    pub fn is_equivalence(self) -> bool {
        !matches!(self, OrderRelation::Icx | OrderRelation::Ism | OrderRelation::Uo)
    }

    /// Rows whose necessity argument needs a generator with support `R^n`.
    pub fn needs_unbounded_support(self) -> bool {
        matches!(self, OrderRelation::St | OrderRelation::Ism | OrderRelation::Uo)
    }
}

impl fmt::Display for OrderRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for OrderRelation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        OrderRelation::ALL
            .into_iter()
            .find(|r| r.tag() == t)
            .ok_or_else(|| Error::UnknownRelation(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Fails,
    Undetermined,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Holds => "holds",
            Verdict::Fails => "fails",
            Verdict::Undetermined => "undetermined",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OrderWitness {
    /// `mu_y - mu_x` at `index` has the wrong sign or is nonzero.
    MeanEntry { index: usize, delta: f64 },
    /// `(Sigma_y - Sigma_x)_ij` violates the required sign or equality.
    DispersionEntry { i: usize, j: usize, delta: f64 },
    /// `E(X_i X_j) > E(Y_i Y_j)`.
    ProductMoment { i: usize, j: usize, ex: f64, ey: f64 },
    /// A cone test on `Sigma_y - Sigma_x`.
    Cone { test: String, verdict: ConeVerdict },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckedCondition {
    pub condition: String,
    pub satisfied: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderReport {
    pub relation: OrderRelation,
    pub verdict: Verdict,
    /// The criterion invoked.
    pub basis: String,
    pub conditions: Vec<CheckedCondition>,
    pub witness: Option<OrderWitness>,
    pub note: Option<String>,
}

/// Tolerances for the decision table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderOptions {
    /// Relative equality tolerance, scaled by `1 + max magnitude`.
    pub eq_tol: f64,
}

impl Default for OrderOptions {
    fn default() -> Self {
        Self { eq_tol: DEFAULT_EQ_TOL }
    }
}

/// Differences between the two parameter sets, with near-zero entries
/// snapped to exact zeros.
struct Gap {
    delta: DVector<f64>,
    d: DMatrix<f64>,
    tol_mu: f64,
}

impl Gap {
    fn new(mx: &DVector<f64>, my: &DVector<f64>, sx: &DMatrix<f64>, sy: &DMatrix<f64>, eq_tol: f64) -> Self {
        let mu_scale = 1.0 + mx.amax().max(my.amax());
        let sigma_scale = 1.0 + linalg::max_abs(sx).max(linalg::max_abs(sy));
        let tol_mu = eq_tol * mu_scale;
        let tol_sigma = eq_tol * sigma_scale;
        let delta = (my - mx).map(|v| if v.abs() <= tol_mu { 0.0 } else { v });
        let d = linalg::symmetrize(&(sy - sx)).map(|v| if v.abs() <= tol_sigma { 0.0 } else { v });
        Self { delta, d, tol_mu }
    }

    fn n(&self) -> usize {
        self.delta.len()
    }

    fn mean_equal(&self) -> Option<OrderWitness> {
        (0..self.n()).find(|&i| self.delta[i] != 0.0).map(|i| OrderWitness::MeanEntry {
            index: i + 1,
            delta: self.delta[i],
        })
    }

    fn mean_increasing(&self) -> Option<OrderWitness> {
        (0..self.n()).find(|&i| self.delta[i] < 0.0).map(|i| OrderWitness::MeanEntry {
            index: i + 1,
            delta: self.delta[i],
        })
    }

    fn first_entry(&self, pick: impl Fn(usize, usize, f64) -> bool) -> Option<OrderWitness> {
        let n = self.n();
        for i in 0..n {
            for j in i..n {
                let v = self.d[(i, j)];
                if pick(i, j, v) {
                    return Some(OrderWitness::DispersionEntry {
                        i: i + 1,
                        j: j + 1,
                        delta: v,
                    });
                }
            }
        }
        None
    }

    fn all_zero(&self) -> Option<OrderWitness> {
        self.first_entry(|_, _, v| v != 0.0)
    }

    fn diag_zero(&self) -> Option<OrderWitness> {
        self.first_entry(|i, j, v| i == j && v != 0.0)
    }

    fn diag_nonneg(&self) -> Option<OrderWitness> {
        self.first_entry(|i, j, v| i == j && v < 0.0)
    }

    fn offdiag_nonneg(&self) -> Option<OrderWitness> {
        self.first_entry(|i, j, v| i != j && v < 0.0)
    }

    fn offdiag_zero(&self) -> Option<OrderWitness> {
        self.first_entry(|i, j, v| i != j && v != 0.0)
    }

    fn entrywise_nonneg(&self) -> Option<OrderWitness> {
        self.first_entry(|_, _, v| v < 0.0)
    }
}

/// Builds the report while conditions are evaluated in order.
struct Trail {
    relation: OrderRelation,
    conditions: Vec<CheckedCondition>,
    first_failure: Option<OrderWitness>,
}

impl Trail {
    fn new(relation: OrderRelation) -> Self {
        Self {
            relation,
            conditions: Vec::new(),
            first_failure: None,
        }
    }

    /// Records a condition; `violation` is `None` when it is satisfied.
    fn record(&mut self, condition: &str, violation: Option<OrderWitness>) -> bool {
        let ok = violation.is_none();
        self.conditions.push(CheckedCondition {
            condition: condition.to_string(),
            satisfied: ok,
        });
        if self.first_failure.is_none() {
            self.first_failure = violation;
        }
        ok
    }

    fn finish(self, verdict: Verdict, witness: Option<OrderWitness>, note: Option<String>) -> OrderReport {
        OrderReport {
            relation: self.relation,
            verdict,
            basis: self.relation.criterion().to_string(),
            conditions: self.conditions,
            witness,
            note,
        }
    }

    fn conclude(self) -> OrderReport {
        match self.first_failure.clone() {
            None => self.finish(Verdict::Holds, None, None),
            Some(w) => self.finish(Verdict::Fails, Some(w), None),
        }
    }
}

fn cone_witness(test: &str, verdict: ConeVerdict) -> OrderWitness {
    OrderWitness::Cone {
        test: test.to_string(),
        verdict,
    }
}

/// Decides `X <= Y` in the relation `rel` from the parameters.
pub fn check_order(dx: &EllipticalDistribution, dy: &EllipticalDistribution, rel: OrderRelation) -> Result<OrderReport> {
    check_order_with(dx, dy, rel, &OrderOptions::default())
}

pub fn check_order_with(
    dx: &EllipticalDistribution,
    dy: &EllipticalDistribution,
    rel: OrderRelation,
    opts: &OrderOptions,
) -> Result<OrderReport> {
    dx.comparable_with(dy)?;
    let gap = Gap::new(dx.mu(), dy.mu(), dx.sigma(), dy.sigma(), opts.eq_tol);
    let mut t = Trail::new(rel);
    let unbounded = dx.generator().unbounded_support();
    let psd = |d: &DMatrix<f64>| cones::is_psd(d, cones::DEFAULT_PSD_TOL);

    match rel {
        OrderRelation::St => {
            let inc = t.record("mu_x <= mu_y", gap.mean_increasing());
            let eq = t.record("Sigma_y = Sigma_x", gap.all_zero());
            if inc && eq {
                return Ok(t.conclude());
            }
            if !unbounded && inc {
                return Ok(t.finish(Verdict::Undetermined, None, Some(bounded_note())));
            }
            Ok(t.conclude())
        }
        OrderRelation::Cx | OrderRelation::Lcx => {
            t.record("mu_x = mu_y", gap.mean_equal());
            let v = psd(&gap.d)?;
            let w = v.is_no().then(|| cone_witness("positive semidefinite", v));
            t.record("Sigma_y - Sigma_x positive semidefinite", w);
            Ok(t.conclude())
        }
        OrderRelation::Icx => check_icx(t, &gap),
        OrderRelation::Sm => {
            t.record("mu_x = mu_y", gap.mean_equal());
            t.record("sigma_ii^x = sigma_ii^y", gap.diag_zero());
            t.record("sigma_ij^x <= sigma_ij^y for i < j", gap.offdiag_nonneg());
            Ok(t.conclude())
        }
        OrderRelation::Ism | OrderRelation::Uo => check_ism_like(t, &gap, dx, dy, opts),
        OrderRelation::Dcx => {
            t.record("mu_x = mu_y", gap.mean_equal());
            t.record("sigma_ij^x <= sigma_ij^y for all i, j", gap.entrywise_nonneg());
            Ok(t.conclude())
        }
        OrderRelation::Idcx => {
            t.record("mu_x <= mu_y", gap.mean_increasing());
            t.record("sigma_ij^x <= sigma_ij^y for all i, j", gap.entrywise_nonneg());
            Ok(t.conclude())
        }
        OrderRelation::Ccx => {
            t.record("mu_x = mu_y", gap.mean_equal());
            t.record("sigma_ii^x <= sigma_ii^y", gap.diag_nonneg());
            t.record("sigma_ij^x = sigma_ij^y for i < j", gap.offdiag_zero());
            Ok(t.conclude())
        }
        OrderRelation::Iccx => {
            t.record("mu_x <= mu_y", gap.mean_increasing());
            t.record("sigma_ii^x <= sigma_ii^y", gap.diag_nonneg());
            t.record("sigma_ij^x = sigma_ij^y for i < j", gap.offdiag_zero());
            Ok(t.conclude())
        }
        OrderRelation::Cp => {
            let eq = t.record("mu_x = mu_y", gap.mean_equal());
            match cones::is_copositive(&gap.d) {
                Ok(v) => {
                    let w = v.is_no().then(|| cone_witness("copositive", v));
                    t.record("Sigma_y - Sigma_x copositive", w);
                    Ok(t.conclude())
                }
                Err(Error::DimensionTooLarge { n, max }) if eq => Ok(t.finish(
                    Verdict::Undetermined,
                    None,
                    Some(format!("copositivity enumeration is limited to n <= {max}, got n = {n}")),
                )),
                Err(Error::DimensionTooLarge { .. }) => Ok(t.conclude()),
                Err(e) => Err(e),
            }
        }
        OrderRelation::Cop => {
            let eq = t.record("mu_x = mu_y", gap.mean_equal());
            let v = cones::is_completely_positive(&gap.d)?;
            match v.verdict {
                Membership::Yes => {
                    t.record("Sigma_y - Sigma_x completely positive", None);
                    Ok(t.conclude())
                }
                Membership::No => {
                    t.record("Sigma_y - Sigma_x completely positive", Some(cone_witness("completely positive", v)));
                    Ok(t.conclude())
                }
                Membership::Undetermined => {
                    if !eq {
                        return Ok(t.conclude());
                    }
                    let note = v.note.clone();
                    Ok(t.finish(
                        Verdict::Undetermined,
                        Some(cone_witness("completely positive", v)),
                        Some(note),
                    ))
                }
            }
        }
    }
}

fn bounded_note() -> String {
    "the generator has bounded support; the necessity argument for this criterion \
     needs support R^n, so only the sufficient condition is decisive"
        .to_string()
}

fn check_icx(mut t: Trail, gap: &Gap) -> Result<OrderReport> {
    let inc = t.record("mu_x <= mu_y", gap.mean_increasing());
    let psd = cones::is_psd(&gap.d, cones::DEFAULT_PSD_TOL)?;
    if psd.is_yes() {
        t.record("Sigma_y - Sigma_x positive semidefinite", None);
        return Ok(t.conclude());
    }
    t.record("Sigma_y - Sigma_x positive semidefinite", Some(cone_witness("positive semidefinite", psd.clone())));
    if !inc {
        return Ok(t.finish(Verdict::Fails, gap.mean_increasing(), None));
    }
    let cop = match cones::is_copositive(&gap.d) {
        Ok(v) => v,
        Err(Error::DimensionTooLarge { n, max }) => {
            return Ok(t.finish(
                Verdict::Undetermined,
                None,
                Some(format!("copositivity enumeration is limited to n <= {max}, got n = {n}")),
            ))
        }
        Err(e) => return Err(e),
    };
    if cop.is_no() {
        t.record("Sigma_y - Sigma_x copositive", Some(cone_witness("copositive", cop.clone())));
        return Ok(t.finish(Verdict::Fails, Some(cone_witness("copositive", cop)), None));
    }
    t.record("Sigma_y - Sigma_x copositive", None);
    match cones::find_positive_kernel(&gap.d) {
        Some(z) => {
            t.record("Sigma_y - Sigma_x has a positive kernel vector", None);
            let note = format!(
                "positive kernel vector {:?} makes positive semidefiniteness necessary",
                z.iter().collect::<Vec<_>>()
            );
            Ok(t.finish(Verdict::Fails, Some(cone_witness("positive semidefinite", psd)), Some(note)))
        }
        None => {
            t.conditions.push(CheckedCondition {
                condition: "Sigma_y - Sigma_x has a positive kernel vector".into(),
                satisfied: false,
            });
            Ok(t.finish(
                Verdict::Undetermined,
                None,
                Some(
                    "Sigma_y - Sigma_x is copositive but not positive semidefinite, and has no \
                     positive kernel vector: the sufficient and necessary conditions differ here"
                        .into(),
                ),
            ))
        }
    }
}

fn check_ism_like(
    mut t: Trail,
    gap: &Gap,
    dx: &EllipticalDistribution,
    dy: &EllipticalDistribution,
    opts: &OrderOptions,
) -> Result<OrderReport> {
    let unbounded = dx.generator().unbounded_support();
    let inc = t.record("mu_x <= mu_y", gap.mean_increasing());
    let diag = t.record("sigma_ii^x = sigma_ii^y", gap.diag_zero());
    let off = t.record("sigma_ij^x <= sigma_ij^y for i < j", gap.offdiag_nonneg());
    if inc && diag && off {
        return Ok(t.conclude());
    }
    if !inc {
        return Ok(t.finish(Verdict::Fails, gap.mean_increasing(), None));
    }
    if !unbounded {
        return Ok(t.finish(Verdict::Undetermined, None, Some(bounded_note())));
    }
    if !diag {
        return Ok(t.finish(Verdict::Fails, gap.diag_zero(), None));
    }
    let zero_means = dx.mu().iter().chain(dy.mu().iter()).all(|v| v.abs() <= gap.tol_mu);
    if zero_means {
        // necessary and sufficient for centred laws
        return Ok(t.conclude());
    }
    // necessary condition on product moments
    let n = gap.n();
    let c = dx.generator().covariance_factor(n);
    let (mx, my, sx, sy) = (dx.mu(), dy.mu(), dx.sigma(), dy.sigma());
    for i in 0..n {
        for j in (i + 1)..n {
            let ex = mx[i] * mx[j] + c * sx[(i, j)];
            let ey = my[i] * my[j] + c * sy[(i, j)];
            let scale = 1.0 + ex.abs().max(ey.abs());
            if ex - ey > opts.eq_tol * scale {
                t.record(
                    "E(X_i X_j) <= E(Y_i Y_j) for i < j",
                    Some(OrderWitness::ProductMoment {
                        i: i + 1,
                        j: j + 1,
                        ex,
                        ey,
                    }),
                );
                let w = OrderWitness::ProductMoment {
                    i: i + 1,
                    j: j + 1,
                    ex,
                    ey,
                };
                return Ok(t.finish(Verdict::Fails, Some(w), None));
            }
        }
    }
    t.record("E(X_i X_j) <= E(Y_i Y_j) for i < j", None);
    Ok(t.finish(
        Verdict::Undetermined,
        None,
        Some(
            "the necessary product-moment condition holds but some sigma_ij decreases; \
             with nonzero means the sufficient and necessary conditions differ here"
                .into(),
        ),
    ))
}

/// Univariate comparison in `st`, `cx` or `icx` from `(mu, sigma)`.
pub fn check_univariate(dx: &EllipticalDistribution, dy: &EllipticalDistribution, rel: OrderRelation) -> Result<OrderReport> {
    dx.comparable_with(dy)?;
    if dx.dim() != 1 {
        return Err(Error::DimensionMismatch {
            what: "univariate comparison",
            expected: 1,
            found: dx.dim(),
        });
    }
    let (mx, my) = (dx.mu()[0], dy.mu()[0]);
    let (sx, sy) = (dx.sigma()[(0, 0)].sqrt(), dy.sigma()[(0, 0)].sqrt());
    let tol_mu = DEFAULT_EQ_TOL * (1.0 + mx.abs().max(my.abs()));
    let tol_s = DEFAULT_EQ_TOL * (1.0 + sx.max(sy));
    let mean_le = (my - mx >= -tol_mu).then_some(()).ok_or(OrderWitness::MeanEntry { index: 1, delta: my - mx });
    let mean_eq = ((my - mx).abs() <= tol_mu).then_some(()).ok_or(OrderWitness::MeanEntry { index: 1, delta: my - mx });
    let scale_le = (sy - sx >= -tol_s).then_some(()).ok_or(OrderWitness::DispersionEntry {
        i: 1,
        j: 1,
        delta: dy.sigma()[(0, 0)] - dx.sigma()[(0, 0)],
    });
    let scale_eq = ((sy - sx).abs() <= tol_s).then_some(()).ok_or(OrderWitness::DispersionEntry {
        i: 1,
        j: 1,
        delta: dy.sigma()[(0, 0)] - dx.sigma()[(0, 0)],
    });
    let mut t = Trail::new(rel);
    let basis = match rel {
        OrderRelation::St => {
            let a = t.record("mu_x <= mu_y", mean_le.err());
            let b = t.record("sigma_x = sigma_y", scale_eq.err());
            if a && !b && !dx.generator().unbounded_support() {
                let mut r = t.finish(Verdict::Undetermined, None, Some(bounded_note()));
                r.basis = "mu_x <= mu_y and sigma_x = sigma_y".into();
                return Ok(r);
            }
            "mu_x <= mu_y and sigma_x = sigma_y"
        }
        OrderRelation::Cx => {
            t.record("mu_x = mu_y", mean_eq.err());
            t.record("sigma_x <= sigma_y", scale_le.err());
            "mu_x = mu_y and sigma_x <= sigma_y"
        }
        OrderRelation::Icx => {
            t.record("mu_x <= mu_y", mean_le.err());
            t.record("sigma_x <= sigma_y", scale_le.err());
            "mu_x <= mu_y and sigma_x <= sigma_y"
        }
        other => {
            return Err(Error::BadParameter(format!(
                "univariate comparison supports st, cx and icx, not {other}"
            )))
        }
    };
    let mut r = t.conclude();
    r.basis = basis.to_string();
    Ok(r)
}

/// Human-readable account of a report.
pub fn explain(report: &OrderReport) -> String {
    let rel = report.relation;
    let mut out = format!(
        "{} ({}): {}\ncriterion: {}\n",
        rel.name(),
        rel.tag(),
        report.verdict,
        report.basis
    );
    for c in &report.conditions {
        let mark = if c.satisfied { "yes" } else { "no" };
        out.push_str(&format!("  {}: {}\n", c.condition, mark));
    }
    if let Some(w) = &report.witness {
        out.push_str("witness: ");
        out.push_str(&describe_witness(w));
        out.push('\n');
    }
    if let Some(n) = &report.note {
        out.push_str("note: ");
        out.push_str(n);
        out.push('\n');
    }
    out
}

fn describe_witness(w: &OrderWitness) -> String {
    match w {
        OrderWitness::MeanEntry { index, delta } => {
            format!("mu differs at index {index} (mu_y - mu_x = {delta})")
        }
        OrderWitness::DispersionEntry { i, j, delta } => {
            format!("entry ({i},{j}) of Sigma_y - Sigma_x is {delta}")
        }
        OrderWitness::ProductMoment { i, j, ex, ey } => {
            format!("entry ({i},{j}): E(X_i X_j) = {ex} exceeds E(Y_i Y_j) = {ey}")
        }
        OrderWitness::Cone { test, verdict } => {
            let detail = match &verdict.witness {
                Some(cones::ConeWitness::Direction { w, value }) => format!("direction {w:?} gives {value}"),
                Some(cones::ConeWitness::Entry { i, j, value }) => {
                    format!("entry ({},{}) is {value}", i + 1, j + 1)
                }
                Some(cones::ConeWitness::Factorization { residual, .. }) => {
                    format!("factorization with residual {residual:e}")
                }
                None => verdict.note.clone(),
            };
            format!("{test} test on Sigma_y - Sigma_x: {detail}")
        }
    }
}
