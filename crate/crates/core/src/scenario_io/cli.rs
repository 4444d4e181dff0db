//! `homecyber` command line.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use super::manifest::RunManifest;
use super::tables::{self, export_csv, num, Block, CsvTable};
use super::{load_scenario, Scenario};
use crate::attack_graph::DEFAULT_ENUMERATION_CAP;
use crate::loss_models::RiskModel;
use crate::portfolio::{simulate_claims, PortfolioResult, RetentionBasis};
use crate::pricing::{calibrate, CalibrationError, Policy, PremiumTable, PrincipleFamily, PrincipleParam};
use crate::simulation::{run_simulation, summarize_result, SimulationResult};
use crate::stats::DEFAULT_LEVELS;
use crate::strategy_search::{
    report_proposals, search_deductible, solve_premium, ClaimGrid, LrStrategy, SearchSpec, DEFAULT_GRID,
};
use crate::Error;

#[derive(Debug, Parser)]
#[command(name = "homecyber", version, about = "Smart-home cyber insurance pricing engine")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a scenario file and list every problem found.
    Validate(ScenarioArgs),
    /// Exact joint state distribution and per-node marginals.
    Enumerate(EnumerateArgs),
    /// Simulate single-home losses and write the loss summary table.
    Simulate(SimulateArgs),
    /// Premium table under the four principles.
    Price(PriceArgs),
    /// Calibrate every principle to a target premium on one line.
    Calibrate(CalibrateArgs),
    /// Portfolio profit and loss-ratio report for one or more premiums.
    Portfolio(PortfolioArgs),
    /// Smallest grid deductible meeting a loss-ratio strategy.
    SearchDeductible(SearchArgs),
    /// Premium that puts the loss-ratio statistic on target.
    SolvePremium(SolveArgs),
    /// Proposed deductibles under both loss-ratio strategies.
    Propose(ProposeArgs),
}

#[derive(Debug, Args)]
struct ScenarioArgs {
    /// Scenario JSON file.
    #[arg(long)]
    scenario: PathBuf,
}

#[derive(Debug, Args)]
struct SeedArgs {
    /// Master seed; required for every simulation.
    #[arg(long)]
    seed: u64,
    /// Worker threads (results do not depend on it).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Debug, Args)]
struct PolicyArgs {
    /// Deductible; defaults to the scenario policy.
    #[arg(long)]
    deductible: Option<f64>,
    /// Coverage limit; defaults to the scenario policy.
    #[arg(long)]
    coverage: Option<f64>,
}

impl PolicyArgs {
    fn resolve(&self, scenario: &Scenario) -> Result<Policy, Error> {
        Ok(Policy::new(
            self.deductible.unwrap_or(scenario.policy.deductible()),
            self.coverage.unwrap_or(scenario.policy.coverage()),
        )?)
    }
}

#[derive(Debug, Args)]
struct PortfolioSize {
    #[arg(long, default_value_t = 500)]
    homes: usize,
    #[arg(long, default_value_t = 10_000)]
    replications: usize,
    /// Where the deductible and limit apply.
    #[arg(long, value_enum, default_value_t = Basis::PerHome)]
    basis: Basis,
}

impl PortfolioSize {
    fn spec(&self) -> SearchSpec {
        SearchSpec {
            n_homes: self.homes,
            replications: self.replications,
            basis: self.basis.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Basis {
    PerHome,
    PerLine,
}

impl From<Basis> for RetentionBasis {
    fn from(b: Basis) -> Self {
        match b {
            Basis::PerHome => RetentionBasis::PerHome,
            Basis::PerLine => RetentionBasis::PerLine,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum StrategyKind {
    Mean,
    Quantile,
}

#[derive(Debug, Args)]
struct StrategyArgs {
    #[arg(long, value_enum, default_value_t = StrategyKind::Mean)]
    strategy: StrategyKind,
    /// Permissible loss ratio.
    #[arg(long, default_value_t = 0.40)]
    lr_target: f64,
    /// Quantile level for the quantile strategy.
    #[arg(long, default_value_t = 0.995)]
    level: f64,
}

impl StrategyArgs {
    fn strategy(&self) -> Result<LrStrategy, Error> {
        match self.strategy {
            StrategyKind::Mean => LrStrategy::mean(self.lr_target),
            StrategyKind::Quantile => LrStrategy::quantile(self.level, self.lr_target),
        }
    }
}

#[derive(Debug, Args)]
struct EnumerateArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// Largest node count enumerated exactly.
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
    cap: usize,
    /// Seed for Monte Carlo marginals when the graph exceeds the cap.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 1_000_000)]
    samples: usize,
    /// Output directory; prints the joint table to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    #[arg(long, default_value_t = 10_000)]
    runs: usize,
    #[command(flatten)]
    seed: SeedArgs,
    #[arg(long)]
    out: PathBuf,
    /// Also write every simulated row.
    #[arg(long)]
    samples: bool,
}

#[derive(Debug, Args)]
struct PriceArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    #[arg(long, default_value_t = 10_000)]
    runs: usize,
    #[command(flatten)]
    seed: SeedArgs,
    #[command(flatten)]
    policy: PolicyArgs,
    /// Price raw line losses instead of retained ones.
    #[arg(long)]
    no_retention: bool,
    #[arg(long, default_value_t = 0.5)]
    theta_expectation: f64,
    #[arg(long, default_value_t = 0.03)]
    theta_sd: f64,
    #[arg(long, default_value_t = 0.25)]
    theta_gmd: f64,
    #[arg(long, default_value_t = 0.34)]
    cte_beta: f64,
    /// Calibrate the principles on this line instead of using the given parameters.
    #[arg(long, requires = "target")]
    calibrate_line: Option<u32>,
    /// Target premium for `--calibrate-line`.
    #[arg(long)]
    target: Option<f64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct CalibrateArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    #[arg(long, default_value_t = 10_000)]
    runs: usize,
    #[command(flatten)]
    seed: SeedArgs,
    #[command(flatten)]
    policy: PolicyArgs,
    #[arg(long)]
    no_retention: bool,
    /// Line index to calibrate on.
    #[arg(long)]
    line: u32,
    #[arg(long)]
    target: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PortfolioArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// Premium per home; comma-separated for several principles.
    #[arg(long, value_delimiter = ',', required = true)]
    premium: Vec<f64>,
    /// Row labels, one per premium (default rho1, rho2, ...).
    #[arg(long, value_delimiter = ',')]
    labels: Vec<String>,
    #[command(flatten)]
    policy: PolicyArgs,
    #[command(flatten)]
    size: PortfolioSize,
    #[command(flatten)]
    seed: SeedArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct SearchArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    #[arg(long)]
    premium: f64,
    #[arg(long)]
    coverage: Option<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_GRID)]
    grid: Vec<f64>,
    #[command(flatten)]
    strategy: StrategyArgs,
    #[command(flatten)]
    size: PortfolioSize,
    #[command(flatten)]
    seed: SeedArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    #[command(flatten)]
    policy: PolicyArgs,
    #[command(flatten)]
    strategy: StrategyArgs,
    #[command(flatten)]
    size: PortfolioSize,
    #[command(flatten)]
    seed: SeedArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ProposeArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    #[arg(long, value_delimiter = ',', required = true)]
    premium: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    labels: Vec<String>,
    #[arg(long)]
    coverage: Option<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_GRID)]
    grid: Vec<f64>,
    #[arg(long, default_value_t = 0.40)]
    lr_target: f64,
    #[arg(long, default_value_t = 0.995)]
    level: f64,
    #[command(flatten)]
    size: PortfolioSize,
    #[command(flatten)]
    seed: SeedArgs,
    #[arg(long)]
    out: PathBuf,
}

/// Parses `argv` (including the program name), runs the command and returns
/// the process exit status: 0 on success, 1 on a runtime failure or invalid
/// scenario, 2 on a usage error.
pub fn cli_dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, Error> {
    match threads {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::InvalidArgument(e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

fn prepare_out(dir: &Path) -> Result<(), Error> {
    fs::create_dir_all(dir).map_err(|e| Error::InvalidArgument(format!("{}: {e}", dir.display())))
}

fn write_csv(table: &CsvTable, dir: &Path, name: &str) -> Result<(), Error> {
    let path = dir.join(name);
    export_csv(table, &path).map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))
}

fn write_manifest(manifest: &RunManifest, dir: &Path) -> Result<(), Error> {
    manifest
        .write(dir)
        .map_err(|e| Error::InvalidArgument(format!("{}: {e}", dir.display())))
}

fn load(args: &ScenarioArgs) -> Result<(Scenario, RiskModel), Error> {
    let scenario = load_scenario(&args.scenario)?;
    let model = scenario.model()?;
    Ok((scenario, model))
}

fn labels_for(premiums: &[f64], labels: &[String]) -> Result<Vec<(String, f64)>, Error> {
    if !labels.is_empty() && labels.len() != premiums.len() {
        return Err(Error::InvalidArgument(format!(
            "{} labels for {} premiums",
            labels.len(),
            premiums.len()
        )));
    }
    Ok(premiums
        .iter()
        .enumerate()
        .map(|(i, &p)| (labels.get(i).cloned().unwrap_or_else(|| format!("rho{}", i + 1)), p))
        .collect())
}

fn line_samples(sim: &SimulationResult, policy: Option<&Policy>) -> Vec<(u32, Vec<f64>)> {
    match policy {
        Some(p) => sim.retained_lines(p),
        None => sim.retained_lines(&Policy::full()),
    }
}

fn run(command: Command) -> Result<i32, Error> {
    match command {
        Command::Validate(args) => {
            let text = fs::read_to_string(&args.scenario)
                .map_err(|e| Error::InvalidArgument(format!("{}: {e}", args.scenario.display())))?;
            match Scenario::parse(&text) {
                Ok(s) => {
                    println!("valid: {} nodes, {} edges, {} lines", s.graph.nodes.len(), s.graph.edges.len(), s.lines.len());
                    println!("digest: {}", s.digest());
                    Ok(0)
                }
                Err(e) => {
                    println!("invalid: {e}");
                    Ok(1)
                }
            }
        }
        Command::Enumerate(args) => enumerate(args),
        Command::Simulate(args) => {
            let (scenario, model) = load(&args.scenario)?;
            let sim = with_threads(args.seed.threads, || run_simulation(&model, args.runs, args.seed.seed))??;
            let summary = summarize_result(&sim, &DEFAULT_LEVELS)?;
            prepare_out(&args.out)?;
            write_csv(&tables::loss_summary_table(&summary), &args.out, "loss_summary.csv")?;
            if args.samples {
                let mut header = vec!["Run".to_string()];
                header.extend(sim.line_indices.iter().map(|i| format!("L{i}")));
                header.push("TL".to_string());
                let mut block = Block { header, rows: vec![] };
                for r in 0..sim.runs {
                    let mut row = vec![r.to_string()];
                    row.extend(sim.row(r).iter().map(|&x| num(x)));
                    row.push(num(sim.total_losses[r]));
                    block.rows.push(row);
                }
                write_csv(&CsvTable::single(block), &args.out, "samples.csv")?;
            }
            let mut manifest = RunManifest::new("simulate", scenario.digest(), args.seed.seed);
            manifest.runs = Some(args.runs);
            write_manifest(&manifest, &args.out)?;
            for (label, s) in &summary.rows {
                println!("{label}: mean {:.2}, sd {:.2}", s.mean, s.sd);
            }
            Ok(0)
        }
        Command::Price(args) => price(args),
        Command::Calibrate(args) => {
            let (scenario, model) = load(&args.scenario)?;
            let policy = (!args.no_retention).then(|| args.policy.resolve(&scenario)).transpose()?;
            let sim = with_threads(args.seed.threads, || run_simulation(&model, args.runs, args.seed.seed))??;
            let pos = model.line_position(args.line)?;
            let samples = &line_samples(&sim, policy.as_ref())[pos].1;
            let mut block = Block::new(&["Family", "Parameter", "Value", "Status"]);
            for family in PrincipleFamily::ALL {
                let row = calibration_row(family, calibrate(family, samples, args.target));
                println!("{}", row.join(","));
                block.rows.push(row);
            }
            if let Some(out) = &args.out {
                prepare_out(out)?;
                write_csv(&CsvTable::single(block), out, "calibration.csv")?;
                let mut manifest = RunManifest::new("calibrate", scenario.digest(), args.seed.seed)
                    .param("line", args.line)
                    .param("target", args.target)
                    .param("retention", policy_label(policy.as_ref()));
                manifest.runs = Some(args.runs);
                write_manifest(&manifest, out)?;
            }
            Ok(0)
        }
        Command::Portfolio(args) => {
            let (scenario, model) = load(&args.scenario)?;
            let policy = args.policy.resolve(&scenario)?;
            let rows = labels_for(&args.premium, &args.labels)?;
            let claims = with_threads(args.seed.threads, || {
                simulate_claims(
                    &model,
                    &[policy],
                    args.size.homes,
                    args.size.replications,
                    args.size.basis.into(),
                    args.seed.seed,
                )
            })??
            .pop()
            .expect("one policy");
            let results = rows
                .iter()
                .map(|(label, p)| Ok((label.clone(), PortfolioResult::from_claims(claims.clone(), args.size.homes, *p)?)))
                .collect::<Result<Vec<_>, Error>>()?;
            prepare_out(&args.out)?;
            write_csv(&tables::portfolio_table(&results)?, &args.out, "portfolio.csv")?;
            let mut manifest = RunManifest::new("portfolio", scenario.digest(), args.seed.seed)
                .param("premiums", join(&args.premium))
                .param("policy", policy_label(Some(&policy)))
                .param("basis", format!("{:?}", RetentionBasis::from(args.size.basis)));
            manifest.homes = Some(args.size.homes);
            manifest.replications = Some(args.size.replications);
            write_manifest(&manifest, &args.out)?;
            for (label, r) in &results {
                let mean_profit = crate::stats::mean(&r.profit)?;
                let mean_lr = crate::stats::mean(&r.lr)?;
                println!("{label}: mean profit {mean_profit:.2}, mean LR {mean_lr:.4}");
            }
            Ok(0)
        }
        Command::SearchDeductible(args) => {
            let (scenario, model) = load(&args.scenario)?;
            let coverage = args.coverage.unwrap_or(scenario.policy.coverage());
            let strategy = args.strategy.strategy()?;
            let spec = args.size.spec();
            let search = with_threads(args.seed.threads, || {
                search_deductible(&model, args.premium, coverage, &args.grid, strategy, &spec, args.seed.seed)
            })??;
            match search.selected {
                Some(d) => println!("deductible: {}", num(d)),
                None => println!("deductible: infeasible"),
            }
            if let Some(out) = &args.out {
                prepare_out(out)?;
                write_csv(&tables::search_table(&search), out, "search.csv")?;
                let mut manifest = RunManifest::new("search-deductible", scenario.digest(), args.seed.seed)
                    .param("premium", args.premium)
                    .param("coverage", coverage)
                    .param("grid", join(&args.grid))
                    .param("strategy", format!("{strategy:?}"));
                manifest.homes = Some(spec.n_homes);
                manifest.replications = Some(spec.replications);
                write_manifest(&manifest, out)?;
            }
            Ok(0)
        }
        Command::SolvePremium(args) => {
            let (scenario, model) = load(&args.scenario)?;
            let policy = args.policy.resolve(&scenario)?;
            let strategy = args.strategy.strategy()?;
            let spec = args.size.spec();
            let sol = with_threads(args.seed.threads, || {
                solve_premium(&model, &policy, strategy, &spec, args.seed.seed)
            })??;
            println!("premium: {}", num(sol.premium_per_home));
            println!("achieved LR statistic: {}", num(sol.achieved));
            println!("mean profit: {}", num(sol.mean_profit));
            if let Some(out) = &args.out {
                prepare_out(out)?;
                let mut block = Block::new(&["Premium", "ClaimStatistic", "AchievedLR", "MeanProfit"]);
                block.rows.push(vec![
                    num(sol.premium_per_home),
                    num(sol.claim_statistic),
                    num(sol.achieved),
                    num(sol.mean_profit),
                ]);
                write_csv(&CsvTable::single(block), out, "premium.csv")?;
                let mut manifest = RunManifest::new("solve-premium", scenario.digest(), args.seed.seed)
                    .param("policy", policy_label(Some(&policy)))
                    .param("strategy", format!("{strategy:?}"));
                manifest.homes = Some(spec.n_homes);
                manifest.replications = Some(spec.replications);
                write_manifest(&manifest, out)?;
            }
            Ok(0)
        }
        Command::Propose(args) => {
            let (scenario, model) = load(&args.scenario)?;
            let coverage = args.coverage.unwrap_or(scenario.policy.coverage());
            let rows = labels_for(&args.premium, &args.labels)?;
            let spec = args.size.spec();
            let mean = LrStrategy::mean(args.lr_target)?;
            let quantile = LrStrategy::quantile(args.level, args.lr_target)?;
            let proposals = with_threads(args.seed.threads, || -> Result<_, Error> {
                let grid = ClaimGrid::simulate(&model, &args.grid, coverage, &spec, args.seed.seed)?;
                report_proposals(&grid, &rows, mean, quantile)
            })??;
            prepare_out(&args.out)?;
            let table = tables::proposal_table(&proposals);
            write_csv(&table, &args.out, "proposals.csv")?;
            let mut manifest = RunManifest::new("propose", scenario.digest(), args.seed.seed)
                .param("premiums", join(&args.premium))
                .param("coverage", coverage)
                .param("grid", join(&args.grid))
                .param("lr_target", args.lr_target)
                .param("level", args.level);
            manifest.homes = Some(spec.n_homes);
            manifest.replications = Some(spec.replications);
            write_manifest(&manifest, &args.out)?;
            print!("{}", String::from_utf8_lossy(&table.to_bytes()));
            Ok(0)
        }
    }
}

fn join(xs: &[f64]) -> String {
    xs.iter().map(|&x| num(x)).collect::<Vec<_>>().join(",")
}

fn policy_label(policy: Option<&Policy>) -> String {
    match policy {
        Some(p) => format!("d={} C={}", num(p.deductible()), num(p.coverage())),
        None => "none".to_string(),
    }
}

fn param_name(family: PrincipleFamily) -> &'static str {
    match family {
        PrincipleFamily::Cte => "beta",
        _ => "theta",
    }
}

fn calibration_row(family: PrincipleFamily, result: Result<PrincipleParam, CalibrationError>) -> Vec<String> {
    let name = format!("{family:?}").to_lowercase();
    match result {
        Ok(p) => vec![name, param_name(family).into(), num(p.value()), "ok".into()],
        Err(CalibrationError::NotIdentifiable { .. }) => {
            vec![name, param_name(family).into(), String::new(), "not-identifiable".into()]
        }
        Err(CalibrationError::NotAchievable { .. }) => {
            vec![name, param_name(family).into(), String::new(), "not-achievable".into()]
        }
        Err(_) => vec![name, param_name(family).into(), String::new(), "not-calibratable".into()],
    }
}

fn enumerate(args: EnumerateArgs) -> Result<i32, Error> {
    let (_, model) = load(&args.scenario)?;
    let network = model.network();
    match network.enumerate_joint(args.cap) {
        Ok(joint) => {
            let joint_csv = tables::joint_table(&joint);
            let marg = tables::marginals_table(network, &joint.marginals(), None);
            match &args.out {
                Some(out) => {
                    prepare_out(out)?;
                    write_csv(&joint_csv, out, "joint.csv")?;
                    write_csv(&marg, out, "marginals.csv")?;
                    print!("{}", String::from_utf8_lossy(&marg.to_bytes()));
                }
                None => print!("{}", String::from_utf8_lossy(&joint_csv.to_bytes())),
            }
            Ok(0)
        }
        Err(e) => {
            let Some(seed) = args.seed else {
                return Err(Error::InvalidArgument(format!(
                    "{e}; pass --seed to estimate marginals by Monte Carlo"
                )));
            };
            let est = network.marginal_estimate(args.cap, args.samples, seed);
            let marg = tables::marginals_table(network, &est.probs, est.std_errors.as_deref());
            if let Some(out) = &args.out {
                prepare_out(out)?;
                write_csv(&marg, out, "marginals.csv")?;
            }
            print!("{}", String::from_utf8_lossy(&marg.to_bytes()));
            Ok(0)
        }
    }
}

fn price(args: PriceArgs) -> Result<i32, Error> {
    let (scenario, model) = load(&args.scenario)?;
    let policy = (!args.no_retention).then(|| args.policy.resolve(&scenario)).transpose()?;
    let sim = with_threads(args.seed.threads, || run_simulation(&model, args.runs, args.seed.seed))??;
    let lines = line_samples(&sim, policy.as_ref());
    let mut params = [
        PrincipleParam::Expectation {
            theta: args.theta_expectation,
        },
        PrincipleParam::StdDev { theta: args.theta_sd },
        PrincipleParam::Gmd { theta: args.theta_gmd },
        PrincipleParam::Cte { beta: args.cte_beta },
    ];
    let mut calibration = Block::new(&["Family", "Parameter", "Value", "Status"]);
    if let (Some(line), Some(target)) = (args.calibrate_line, args.target) {
        let samples = &lines[model.line_position(line)?].1;
        for (slot, family) in params.iter_mut().zip(PrincipleFamily::ALL) {
            let result = calibrate(family, samples, target);
            if let Ok(p) = result {
                *slot = p;
            } else {
                eprintln!(
                    "warning: {family} calibration failed ({}); keeping {}",
                    result.as_ref().unwrap_err(),
                    num(slot.value())
                );
            }
            calibration.rows.push(calibration_row(family, result));
        }
    }
    let table = PremiumTable::build(&lines, &params)?;
    prepare_out(&args.out)?;
    write_csv(&tables::premium_table(&table), &args.out, "premiums.csv")?;
    if !calibration.rows.is_empty() {
        write_csv(&CsvTable::single(calibration), &args.out, "calibration.csv")?;
    }
    let mut manifest = RunManifest::new("price", scenario.digest(), args.seed.seed)
        .param("retention", policy_label(policy.as_ref()))
        .param(
            "parameters",
            params.iter().map(|p| num(p.value())).collect::<Vec<_>>().join(","),
        );
    manifest.runs = Some(args.runs);
    write_manifest(&manifest, &args.out)?;
    print!("{}", String::from_utf8_lossy(&tables::premium_table(&table).to_bytes()));
    Ok(0)
}
