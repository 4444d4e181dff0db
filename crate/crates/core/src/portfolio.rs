//! Portfolio of independent policyholders: claims, profit and loss ratio.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::loss_models::RiskModel;
use crate::pricing::Policy;
use crate::rng::{Domain, StreamFactory};
use crate::stats::{self, StatsError, SummaryStats};
use crate::Error;

/// Where the deductible and limit apply when turning a home's line losses
/// into a claim.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RetentionBasis {
    /// `min((sum_m L_m - d)+, C)` once per home-year.
    #[default]
    PerHome,
    /// `sum_m min((L_m - d)+, C)`.
    PerLine,
}

impl RetentionBasis {
    #[inline]
    fn claim(self, policy: &Policy, losses: &[f64], total: f64) -> f64 {
        match self {
            RetentionBasis::PerHome => policy.apply(total),
            RetentionBasis::PerLine => losses.iter().map(|&x| policy.apply(x)).sum(),
        }
    }
}

/// Profit levels of the portfolio report (Q1 .. Q75).
pub const PROFIT_LEVELS: [f64; 6] = [0.01, 0.05, 0.10, 0.15, 0.50, 0.75];
/// Loss-ratio levels of the portfolio report (Q25 .. Q99.5).
pub const LR_LEVELS: [f64; 6] = [0.25, 0.50, 0.75, 0.90, 0.95, 0.995];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PortfolioSpec {
    pub n_homes: usize,
    pub policy: Policy,
    /// Premium per home, summed over lines.
    pub premium_per_home: f64,
    pub replications: usize,
    #[serde(default)]
    pub basis: RetentionBasis,
}

impl PortfolioSpec {
    pub fn new(n_homes: usize, policy: Policy, premium_per_home: f64, replications: usize) -> Self {
        Self {
            n_homes,
            policy,
            premium_per_home,
            replications,
            basis: RetentionBasis::default(),
        }
    }

    pub fn with_basis(mut self, basis: RetentionBasis) -> Self {
        self.basis = basis;
        self
    }

    fn check(&self) -> Result<(), Error> {
        check_counts(self.n_homes, self.replications)?;
        check_premium(self.premium_per_home)
    }
}

fn check_counts(n_homes: usize, replications: usize) -> Result<(), Error> {
    if n_homes == 0 || replications == 0 {
        return Err(Error::InvalidArgument(format!(
            "homes ({n_homes}) and replications ({replications}) must be positive"
        )));
    }
    Ok(())
}

fn check_premium(premium: f64) -> Result<(), Error> {
    if !(premium.is_finite() && premium > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "premium per home must be positive and finite, got {premium}"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PortfolioResult {
    pub n_homes: usize,
    pub premium_per_home: f64,
    /// `n_homes * premium_per_home`.
    pub total_premium: f64,
    pub claim: Vec<f64>,
    pub profit: Vec<f64>,
    pub lr: Vec<f64>,
}

impl PortfolioResult {
    /// Derives profit and loss ratio from per-replication claims.
    pub fn from_claims(claim: Vec<f64>, n_homes: usize, premium_per_home: f64) -> Result<Self, Error> {
        check_premium(premium_per_home)?;
        let total_premium = n_homes as f64 * premium_per_home;
        let profit = claim.iter().map(|c| total_premium - c).collect();
        let lr = claim.iter().map(|c| c / total_premium).collect();
        Ok(Self {
            n_homes,
            premium_per_home,
            total_premium,
            claim,
            profit,
            lr,
        })
    }

    pub fn replications(&self) -> usize {
        self.claim.len()
    }
}

/// Claims per replication for several policies on the same draws.
///
/// Home `h` of replication `k` uses substream `(k, h)`, so every policy sees
/// the same losses (common random numbers) and the output does not depend
/// on the thread count. Returns one claim vector per policy.
pub fn simulate_claims(
    model: &RiskModel,
    policies: &[Policy],
    n_homes: usize,
    replications: usize,
    basis: RetentionBasis,
    master_seed: u64,
) -> Result<Vec<Vec<f64>>, Error> {
    check_counts(n_homes, replications)?;
    let slots = u32::try_from(n_homes)
        .map_err(|_| Error::InvalidArgument(format!("too many homes: {n_homes}")))?;
    let factory = StreamFactory::new(master_seed, Domain::Portfolio);
    let (n, m) = (model.node_count(), model.line_count());
    let per_rep: Vec<Vec<f64>> = (0..replications)
        .into_par_iter()
        .map_init(
            || (vec![false; n], vec![0.0; m]),
            |(states, losses), k| {
                let mut claims = vec![0.0; policies.len()];
                for h in 0..slots {
                    let mut rng = factory.stream(k as u64, h);
                    model.draw_home(&mut rng, states, losses);
                    let total: f64 = losses.iter().sum();
                    for (c, policy) in claims.iter_mut().zip(policies) {
                        *c += basis.claim(policy, losses, total);
                    }
                }
                claims
            },
        )
        .collect();
    Ok((0..policies.len())
        .map(|p| per_rep.iter().map(|row| row[p]).collect())
        .collect())
}

pub fn simulate_portfolio(model: &RiskModel, spec: &PortfolioSpec, master_seed: u64) -> Result<PortfolioResult, Error> {
    spec.check()?;
    let claim = simulate_claims(
        model,
        std::slice::from_ref(&spec.policy),
        spec.n_homes,
        spec.replications,
        spec.basis,
        master_seed,
    )?
    .pop()
    .expect("one policy");
    PortfolioResult::from_claims(claim, spec.n_homes, spec.premium_per_home)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PortfolioSummary {
    pub claim: SummaryStats,
    pub profit: SummaryStats,
    pub lr: SummaryStats,
}

/// Profit summary whose SD is taken from the claims: profit is a location
/// shift of the claim, so its SD is the same for every premium.
pub fn profit_summary(result: &PortfolioResult, levels: &[f64]) -> Result<SummaryStats, StatsError> {
    let mut s = stats::summarize(&result.profit, levels)?;
    s.sd = stats::sample_sd(&result.claim)?;
    Ok(s)
}

pub fn portfolio_summary(result: &PortfolioResult, levels: &[f64]) -> Result<PortfolioSummary, StatsError> {
    Ok(PortfolioSummary {
        claim: stats::summarize(&result.claim, levels)?,
        profit: profit_summary(result, levels)?,
        lr: stats::summarize(&result.lr, levels)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attack_graph::case_study_graph;
    use crate::loss_models::case_study_lines;

    fn model() -> RiskModel {
        RiskModel::new(&case_study_graph(), case_study_lines()).unwrap()
    }

    #[test]
    fn identities_hold_exactly() {
        let spec = PortfolioSpec::new(50, Policy::new(1000.0, 50_000.0).unwrap(), 418.0, 200);
        let res = simulate_portfolio(&model(), &spec, 5).unwrap();
        let total = 50.0 * 418.0;
        for k in 0..res.replications() {
            assert_eq!(res.profit[k], total - res.claim[k]);
            assert_eq!(res.lr[k], res.claim[k] / total);
        }
    }

    #[test]
    fn constant_claims_have_zero_profit_sd() {
        let res = PortfolioResult::from_claims(vec![100.0; 10], 5, 30.0).unwrap();
        let s = portfolio_summary(&res, &LR_LEVELS).unwrap();
        assert_eq!(s.profit.sd, 0.0);
        assert_eq!(s.profit.mean, 50.0);
    }

    #[test]
    fn zero_premium_is_an_error() {
        assert!(PortfolioResult::from_claims(vec![1.0], 5, 0.0).is_err());
        let spec = PortfolioSpec::new(5, Policy::full(), 0.0, 3);
        assert!(simulate_portfolio(&model(), &spec, 1).is_err());
        let spec = PortfolioSpec::new(0, Policy::full(), 1.0, 3);
        assert!(simulate_portfolio(&model(), &spec, 1).is_err());
    }

    #[test]
    fn bases_agree_without_retention() {
        let m = model();
        let full = [Policy::full()];
        let a = simulate_claims(&m, &full, 20, 30, RetentionBasis::PerHome, 4).unwrap();
        let b = simulate_claims(&m, &full, 20, 30, RetentionBasis::PerLine, 4).unwrap();
        for (x, y) in a[0].iter().zip(&b[0]) {
            assert!((x - y).abs() <= 1e-9 * x.max(1.0));
        }
    }

    #[test]
    fn larger_deductible_never_claims_more() {
        let m = model();
        let policies: Vec<Policy> = [100.0, 250.0, 1000.0]
            .iter()
            .map(|&d| Policy::new(d, 50_000.0).unwrap())
            .collect();
        for basis in [RetentionBasis::PerHome, RetentionBasis::PerLine] {
            let claims = simulate_claims(&m, &policies, 40, 100, basis, 8).unwrap();
            for w in claims.windows(2) {
                assert!(w[0].iter().zip(&w[1]).all(|(a, b)| a >= b));
            }
        }
    }
}
