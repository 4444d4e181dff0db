//! Deductible search and premium solving under loss-ratio constraints.
//!
//! The claim distribution does not depend on the premium, so every search
//! first simulates claims for all grid deductibles on common random numbers
//! and then evaluates premiums and strategies against those fixed samples.

use serde::{Deserialize, Serialize};

use crate::loss_models::RiskModel;
use crate::numeric::approx_eq_rel;
use crate::portfolio::{simulate_claims, PortfolioResult, RetentionBasis};
use crate::pricing::Policy;
use crate::stats;
use crate::Error;

/// The deductibles probed by default.
pub const DEFAULT_GRID: [f64; 6] = [100.0, 150.0, 200.0, 250.0, 500.0, 1000.0];

/// Permissible loss-ratio statistic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LrStrategy {
    /// Mean LR at most `target`.
    Mean { target: f64 },
    /// Type-7 empirical quantile of LR at `level` at most `target`.
    Quantile { level: f64, target: f64 },
}

impl LrStrategy {
    pub fn mean(target: f64) -> Result<Self, Error> {
        Self::Mean { target }.checked()
    }

    pub fn quantile(level: f64, target: f64) -> Result<Self, Error> {
        Self::Quantile { level, target }.checked()
    }

    fn checked(self) -> Result<Self, Error> {
        let target = self.target();
        if !(target.is_finite() && target >= 0.0) {
            return Err(Error::InvalidArgument(format!("LR target {target} must be finite and >= 0")));
        }
        if let LrStrategy::Quantile { level, .. } = self {
            if !(level > 0.0 && level < 1.0) {
                return Err(Error::InvalidArgument(format!("quantile level {level} outside (0, 1)")));
            }
        }
        Ok(self)
    }

    pub fn target(&self) -> f64 {
        match *self {
            LrStrategy::Mean { target } | LrStrategy::Quantile { target, .. } => target,
        }
    }

    /// The constrained statistic of a sample (LRs or claims).
    pub fn statistic(&self, samples: &[f64]) -> Result<f64, Error> {
        Ok(match *self {
            LrStrategy::Mean { .. } => stats::mean(samples)?,
            LrStrategy::Quantile { level, .. } => stats::quantile(samples, level)?,
        })
    }
}

/// Portfolio size and retention basis shared by all searches.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchSpec {
    pub n_homes: usize,
    pub replications: usize,
    #[serde(default)]
    pub basis: RetentionBasis,
}

impl SearchSpec {
    pub fn new(n_homes: usize, replications: usize) -> Self {
        Self {
            n_homes,
            replications,
            basis: RetentionBasis::default(),
        }
    }
}

/// Claims for each grid deductible on common random numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct ClaimGrid {
    pub deductibles: Vec<f64>,
    pub coverage: f64,
    pub n_homes: usize,
    /// One vector of per-replication claims per deductible.
    pub claims: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridPoint {
    pub deductible: f64,
    pub statistic: f64,
    pub mean_profit: f64,
    pub feasible: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeductibleSearch {
    pub premium_per_home: f64,
    pub strategy: LrStrategy,
    pub evaluations: Vec<GridPoint>,
    /// Smallest feasible grid deductible.
    pub selected: Option<f64>,
}

impl DeductibleSearch {
    pub fn selected_point(&self) -> Option<&GridPoint> {
        self.selected
            .and_then(|d| self.evaluations.iter().find(|g| g.deductible == d))
    }
}

fn check_grid(grid: &[f64]) -> Result<(), Error> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("deductible grid is empty".into()));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("deductible grid must be strictly ascending".into()));
    }
    Ok(())
}

impl ClaimGrid {
    pub fn simulate(
        model: &RiskModel,
        grid: &[f64],
        coverage: f64,
        spec: &SearchSpec,
        master_seed: u64,
    ) -> Result<Self, Error> {
        check_grid(grid)?;
        let policies = grid
            .iter()
            .map(|&d| Policy::new(d, coverage))
            .collect::<Result<Vec<_>, _>>()?;
        let claims = simulate_claims(model, &policies, spec.n_homes, spec.replications, spec.basis, master_seed)?;
        Ok(Self {
            deductibles: grid.to_vec(),
            coverage,
            n_homes: spec.n_homes,
            claims,
        })
    }

    pub fn portfolio(&self, pos: usize, premium_per_home: f64) -> Result<PortfolioResult, Error> {
        PortfolioResult::from_claims(self.claims[pos].clone(), self.n_homes, premium_per_home)
    }

    /// Evaluates every grid point and selects the smallest feasible one.
    pub fn search(&self, premium_per_home: f64, strategy: LrStrategy) -> Result<DeductibleSearch, Error> {
        let strategy = strategy.checked()?;
        let evaluations = (0..self.deductibles.len())
            .map(|pos| {
                let pf = self.portfolio(pos, premium_per_home)?;
                let statistic = strategy.statistic(&pf.lr)?;
                Ok(GridPoint {
                    deductible: self.deductibles[pos],
                    statistic,
                    mean_profit: stats::mean(&pf.profit)?,
                    feasible: statistic <= strategy.target(),
                })
            })
            .collect::<Result<Vec<_>, Error>>()?;
        let selected = evaluations.iter().find(|g| g.feasible).map(|g| g.deductible);
        Ok(DeductibleSearch {
            premium_per_home,
            strategy,
            evaluations,
            selected,
        })
    }
}

/// Smallest grid deductible whose LR statistic meets the strategy.
pub fn search_deductible(
    model: &RiskModel,
    premium_per_home: f64,
    coverage: f64,
    grid: &[f64],
    strategy: LrStrategy,
    spec: &SearchSpec,
    master_seed: u64,
) -> Result<DeductibleSearch, Error> {
    ClaimGrid::simulate(model, grid, coverage, spec, master_seed)?.search(premium_per_home, strategy)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PremiumSolution {
    pub premium_per_home: f64,
    /// Mean or quantile of the portfolio claim.
    pub claim_statistic: f64,
    /// The LR statistic re-evaluated at the solved premium.
    pub achieved: f64,
    pub mean_profit: f64,
}

/// Premium per home that puts the LR statistic exactly on target:
/// `P = stat(claim) / (N * target)`.
pub fn solve_premium_from_claims(claims: &[f64], n_homes: usize, strategy: LrStrategy) -> Result<PremiumSolution, Error> {
    let strategy = strategy.checked()?;
    let target = strategy.target();
    if target <= 0.0 {
        return Err(Error::InvalidArgument("LR target must be positive to solve for a premium".into()));
    }
    let claim_statistic = strategy.statistic(claims)?;
    if claim_statistic <= 0.0 {
        return Err(Error::Degenerate(
            "claim statistic is zero, so any premium meets the target".into(),
        ));
    }
    let premium_per_home = claim_statistic / (n_homes as f64 * target);
    let pf = PortfolioResult::from_claims(claims.to_vec(), n_homes, premium_per_home)?;
    let achieved = strategy.statistic(&pf.lr)?;
    debug_assert!(approx_eq_rel(achieved, target, 1e-9));
    Ok(PremiumSolution {
        premium_per_home,
        claim_statistic,
        achieved,
        mean_profit: stats::mean(&pf.profit)?,
    })
}

pub fn solve_premium(
    model: &RiskModel,
    policy: &Policy,
    strategy: LrStrategy,
    spec: &SearchSpec,
    master_seed: u64,
) -> Result<PremiumSolution, Error> {
    let claims = simulate_claims(
        model,
        std::slice::from_ref(policy),
        spec.n_homes,
        spec.replications,
        spec.basis,
        master_seed,
    )?
    .pop()
    .expect("one policy");
    solve_premium_from_claims(&claims, spec.n_homes, strategy)
}

/// One row of the proposal table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Proposal {
    pub principle: String,
    pub premium_per_home: f64,
    pub coverage: f64,
    pub deductible_mean: Option<f64>,
    pub mean_profit_mean: Option<f64>,
    pub deductible_quantile: Option<f64>,
    pub mean_profit_quantile: Option<f64>,
}

/// For each `(label, premium)` pair, the smallest deductible and its mean
/// profit under the mean strategy and the quantile strategy.
pub fn report_proposals(
    grid: &ClaimGrid,
    principles: &[(String, f64)],
    mean_strategy: LrStrategy,
    quantile_strategy: LrStrategy,
) -> Result<Vec<Proposal>, Error> {
    principles
        .iter()
        .map(|(label, premium)| {
            let first = grid.search(*premium, mean_strategy)?;
            let second = grid.search(*premium, quantile_strategy)?;
            Ok(Proposal {
                principle: label.clone(),
                premium_per_home: *premium,
                coverage: grid.coverage,
                deductible_mean: first.selected,
                mean_profit_mean: first.selected_point().map(|g| g.mean_profit),
                deductible_quantile: second.selected,
                mean_profit_quantile: second.selected_point().map(|g| g.mean_profit),
            })
        })
        .collect()
}
