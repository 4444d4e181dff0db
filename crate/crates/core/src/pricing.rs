//! Retention transform, the four premium principles and their calibration.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numeric::approx_eq_rel;
use crate::stats::{self, sorted_copy, StatsError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PricingError {
    #[error("empty sample")]
    Empty,
    #[error("{family} premium needs at least 2 samples")]
    TooFewSamples { family: PrincipleFamily },
    #[error("CTE level {0} outside (0, 1)")]
    BetaOutOfRange(f64),
    #[error("loading {0} is not finite")]
    NonFiniteTheta(f64),
    #[error("invalid policy: deductible {deductible}, coverage {coverage}")]
    InvalidPolicy { deductible: f64, coverage: f64 },
    #[error(transparent)]
    Stats(#[from] StatsError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CalibrationError {
    #[error("{family} cannot be calibrated: {reason}")]
    NotCalibratable { family: PrincipleFamily, reason: String },
    #[error("target {target} is outside the attainable CTE range [{min}, {max}]")]
    NotAchievable { target: f64, min: f64, max: f64 },
    #[error(
        "target {target} is not identifiable: empirical CTE is flat at {flat_level} for beta up to {beta}, then jumps to {next_level}"
    )]
    NotIdentifiable {
        target: f64,
        flat_level: f64,
        next_level: f64,
        beta: f64,
    },
    #[error(transparent)]
    Pricing(#[from] PricingError),
}

/// Deductible `d >= 0` and coverage limit `C > 0` (possibly infinite).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolicyRepr", into = "PolicyRepr")]
pub struct Policy {
    deductible: f64,
    coverage: f64,
}

#[derive(Serialize, Deserialize)]
struct PolicyRepr {
    deductible: f64,
    /// `null` for unlimited coverage.
    coverage: Option<f64>,
}

impl TryFrom<PolicyRepr> for Policy {
    type Error = PricingError;
    fn try_from(r: PolicyRepr) -> Result<Self, Self::Error> {
        Policy::new(r.deductible, r.coverage.unwrap_or(f64::INFINITY))
    }
}

impl From<Policy> for PolicyRepr {
    fn from(p: Policy) -> Self {
        PolicyRepr {
            deductible: p.deductible,
            coverage: p.coverage.is_finite().then_some(p.coverage),
        }
    }
}

impl Policy {
    pub fn new(deductible: f64, coverage: f64) -> Result<Self, PricingError> {
        if !(deductible.is_finite() && deductible >= 0.0) || coverage.is_nan() || coverage <= 0.0 {
            return Err(PricingError::InvalidPolicy { deductible, coverage });
        }
        Ok(Self { deductible, coverage })
    }

    /// No deductible, unlimited coverage.
    pub fn full() -> Self {
        Self {
            deductible: 0.0,
            coverage: f64::INFINITY,
        }
    }

    pub fn deductible(&self) -> f64 {
        self.deductible
    }

    pub fn coverage(&self) -> f64 {
        self.coverage
    }

    pub fn with_deductible(&self, deductible: f64) -> Result<Self, PricingError> {
        Self::new(deductible, self.coverage)
    }

    /// Insurer's share of a loss: `min((loss - d)+, C)`.
    #[inline]
    pub fn apply(&self, loss: f64) -> f64 {
        apply_retention(loss, self)
    }
}

#[inline]
pub fn apply_retention(loss: f64, policy: &Policy) -> f64 {
    (loss - policy.deductible).max(0.0).min(policy.coverage)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrincipleFamily {
    Expectation,
    StdDev,
    Gmd,
    Cte,
}

impl PrincipleFamily {
    pub const ALL: [PrincipleFamily; 4] = [
        PrincipleFamily::Expectation,
        PrincipleFamily::StdDev,
        PrincipleFamily::Gmd,
        PrincipleFamily::Cte,
    ];
}

impl std::fmt::Display for PrincipleFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PrincipleFamily::Expectation => "expectation",
            PrincipleFamily::StdDev => "standard deviation",
            PrincipleFamily::Gmd => "Gini mean difference",
            PrincipleFamily::Cte => "conditional tail expectation",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum PrincipleParam {
    /// `(1 + theta) E[X]`
    Expectation { theta: f64 },
    /// `E[X] + theta SD[X]`
    StdDev { theta: f64 },
    /// `E[X] + theta GMD[X]`
    Gmd { theta: f64 },
    /// `E[X | X >= VaR_beta]`
    Cte { beta: f64 },
}

impl PrincipleParam {
    pub fn family(&self) -> PrincipleFamily {
        match self {
            PrincipleParam::Expectation { .. } => PrincipleFamily::Expectation,
            PrincipleParam::StdDev { .. } => PrincipleFamily::StdDev,
            PrincipleParam::Gmd { .. } => PrincipleFamily::Gmd,
            PrincipleParam::Cte { .. } => PrincipleFamily::Cte,
        }
    }

    /// The loading or level as a bare number.
    pub fn value(&self) -> f64 {
        match *self {
            PrincipleParam::Expectation { theta }
            | PrincipleParam::StdDev { theta }
            | PrincipleParam::Gmd { theta } => theta,
            PrincipleParam::Cte { beta } => beta,
        }
    }
}

/// Gini mean difference: mean absolute difference over unordered pairs.
///
/// Uses the order-statistic identity `sum_{i<j} |x_i - x_j| =
/// sum_k (2k - n + 1) x_(k)` (0-based `k`), so the cost is a sort.
pub fn gmd(samples: &[f64]) -> Result<f64, PricingError> {
    if samples.len() < 2 {
        return Err(PricingError::TooFewSamples {
            family: PrincipleFamily::Gmd,
        });
    }
    let sorted = sorted_copy(samples)?;
    let n = sorted.len();
    let weighted: f64 = sorted
        .iter()
        .enumerate()
        .map(|(k, x)| (2.0 * k as f64 - n as f64 + 1.0) * x)
        .sum();
    Ok(2.0 * weighted / (n as f64 * (n as f64 - 1.0)))
}

fn check_beta(beta: f64) -> Result<(), PricingError> {
    if beta > 0.0 && beta < 1.0 {
        Ok(())
    } else {
        Err(PricingError::BetaOutOfRange(beta))
    }
}

/// 1-based rank of the empirical VaR: the smallest `k` with `k/n >= beta`.
fn var_rank(n: usize, beta: f64) -> usize {
    let nf = n as f64;
    let mut k = ((beta * nf).ceil() as usize).clamp(1, n);
    while k > 1 && (k - 1) as f64 / nf >= beta {
        k -= 1;
    }
    while k < n && (k as f64) / nf < beta {
        k += 1;
    }
    k
}

/// Empirical value-at-risk: the order statistic `x_(k)` with the smallest
/// `k` such that `k/n >= beta`. No interpolation.
pub fn var_beta(samples: &[f64], beta: f64) -> Result<f64, PricingError> {
    check_beta(beta)?;
    if samples.is_empty() {
        return Err(PricingError::Empty);
    }
    let sorted = sorted_copy(samples)?;
    Ok(sorted[var_rank(sorted.len(), beta) - 1])
}

/// Mean of the sorted suffix that starts at the first value `>= VaR_beta`,
/// so ties with the VaR are included.
fn cte_sorted(sorted: &[f64], beta: f64) -> f64 {
    let var = sorted[var_rank(sorted.len(), beta) - 1];
    let start = sorted.partition_point(|&x| x < var);
    let tail = &sorted[start..];
    tail.iter().sum::<f64>() / tail.len() as f64
}

pub fn cte(samples: &[f64], beta: f64) -> Result<f64, PricingError> {
    check_beta(beta)?;
    if samples.is_empty() {
        return Err(PricingError::Empty);
    }
    Ok(cte_sorted(&sorted_copy(samples)?, beta))
}

/// Sample-estimator premium under one principle.
pub fn premium(samples: &[f64], param: PrincipleParam) -> Result<f64, PricingError> {
    if samples.is_empty() {
        return Err(PricingError::Empty);
    }
    if let PrincipleParam::Expectation { theta } | PrincipleParam::StdDev { theta } | PrincipleParam::Gmd { theta } =
        param
    {
        if !theta.is_finite() {
            return Err(PricingError::NonFiniteTheta(theta));
        }
    }
    let mean = stats::mean(samples)?;
    match param {
        PrincipleParam::Expectation { theta } => Ok((1.0 + theta) * mean),
        PrincipleParam::StdDev { theta } => {
            if samples.len() < 2 {
                return Err(PricingError::TooFewSamples {
                    family: PrincipleFamily::StdDev,
                });
            }
            Ok(mean + theta * stats::sample_sd(samples)?)
        }
        PrincipleParam::Gmd { theta } => Ok(mean + theta * gmd(samples)?),
        PrincipleParam::Cte { beta } => cte(samples, beta),
    }
}

/// Relative tolerance for calibration round trips.
pub const CALIBRATION_TOLERANCE: f64 = 1e-6;

/// Finds the principle parameter whose premium on `samples` equals `target`.
///
/// Loading families invert in closed form. The CTE level is found by
/// bisection over `beta in (1/n, 1 - 1/n)`; because the empirical CTE is a
/// step function, a target that falls between two steps is reported as
/// [`CalibrationError::NotIdentifiable`].
pub fn calibrate(family: PrincipleFamily, samples: &[f64], target: f64) -> Result<PrincipleParam, CalibrationError> {
    if samples.is_empty() {
        return Err(PricingError::Empty.into());
    }
    if !(target.is_finite() && target >= 0.0) {
        return Err(CalibrationError::NotCalibratable {
            family,
            reason: format!("target {target} must be finite and non-negative"),
        });
    }
    let mean = stats::mean(samples).map_err(PricingError::from)?;
    let loading = |scale: f64, what: &str| {
        if scale > 0.0 && scale.is_finite() {
            Ok((target - mean) / scale)
        } else {
            Err(CalibrationError::NotCalibratable {
                family,
                reason: format!("{what} is {scale}"),
            })
        }
    };
    match family {
        PrincipleFamily::Expectation => Ok(PrincipleParam::Expectation {
            theta: loading(mean, "sample mean")?,
        }),
        PrincipleFamily::StdDev => {
            if samples.len() < 2 {
                return Err(PricingError::TooFewSamples { family }.into());
            }
            let sd = stats::sample_sd(samples).map_err(PricingError::from)?;
            Ok(PrincipleParam::StdDev {
                theta: loading(sd, "sample standard deviation")?,
            })
        }
        PrincipleFamily::Gmd => Ok(PrincipleParam::Gmd {
            theta: loading(gmd(samples)?, "Gini mean difference")?,
        }),
        PrincipleFamily::Cte => calibrate_cte(samples, target),
    }
}

fn calibrate_cte(samples: &[f64], target: f64) -> Result<PrincipleParam, CalibrationError> {
    let family = PrincipleFamily::Cte;
    let sorted = sorted_copy(samples).map_err(PricingError::from)?;
    let n = sorted.len();
    if n < 2 {
        return Err(PricingError::TooFewSamples { family }.into());
    }
    if sorted[0] == sorted[n - 1] {
        return Err(CalibrationError::NotCalibratable {
            family,
            reason: "samples are constant".into(),
        });
    }
    let tol = CALIBRATION_TOLERANCE * target.abs().max(1.0);
    let f = |beta: f64| cte_sorted(&sorted, beta);
    let (mut lo, mut hi) = (1.0 / n as f64, 1.0 - 1.0 / n as f64);
    if hi < lo {
        std::mem::swap(&mut lo, &mut hi);
    }
    let (f_lo, f_hi) = (f(lo), f(hi));
    if target < f_lo - tol || target > f_hi + tol {
        return Err(CalibrationError::NotAchievable {
            target,
            min: f_lo,
            max: f_hi,
        });
    }
    if (f_lo - target).abs() <= tol {
        return Ok(PrincipleParam::Cte { beta: lo });
    }
    // Invariant: f(lo) < target - tol, f(hi) >= target - tol.
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < target - tol {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let achieved = f(hi);
    if (achieved - target).abs() <= tol {
        Ok(PrincipleParam::Cte { beta: hi })
    } else {
        Err(CalibrationError::NotIdentifiable {
            target,
            flat_level: f(lo),
            next_level: achieved,
            beta: lo,
        })
    }
}

/// Per-line premiums under a set of principles, plus their column totals.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PremiumTable {
    pub principles: Vec<PrincipleParam>,
    /// `(line index, premium per principle)`
    pub rows: Vec<(u32, Vec<f64>)>,
    pub totals: Vec<f64>,
}

impl PremiumTable {
    /// Prices each line's retained samples and sums per principle.
    pub fn build(lines: &[(u32, Vec<f64>)], principles: &[PrincipleParam]) -> Result<Self, PricingError> {
        let mut rows = Vec::with_capacity(lines.len());
        let mut totals = vec![0.0; principles.len()];
        for (index, samples) in lines {
            let row = principles
                .iter()
                .map(|&p| premium(samples, p))
                .collect::<Result<Vec<_>, _>>()?;
            for (t, v) in totals.iter_mut().zip(&row) {
                *t += v;
            }
            rows.push((*index, row));
        }
        Ok(Self {
            principles: principles.to_vec(),
            rows,
            totals,
        })
    }
}

/// `true` when `premium(samples, param)` reproduces `target` within the
/// calibration tolerance.
pub fn round_trips(samples: &[f64], param: PrincipleParam, target: f64) -> bool {
    premium(samples, param).is_ok_and(|p| approx_eq_rel(p, target, CALIBRATION_TOLERANCE))
}
