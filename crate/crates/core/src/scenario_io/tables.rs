//! Fixed-layout CSV tables.
//!
//! Numbers are written with Rust's shortest round-trip `Display`, rows end
//! in `\n`, and column order is fixed per table kind, so identical inputs
//! give identical bytes.

use std::fs;
use std::io;
use std::path::Path;

use crate::attack_graph::{ExploitNetwork, JointDistribution};
use crate::portfolio::{profit_summary, PortfolioResult, LR_LEVELS, PROFIT_LEVELS};
use crate::pricing::PremiumTable;
use crate::simulation::LossSummary;
use crate::stats::{self, StatsError, SummaryStats};
use crate::strategy_search::{DeductibleSearch, Proposal};

/// Column labels of the loss summary after the row label.
pub const LOSS_SUMMARY_COLUMNS: [&str; 12] = [
    "Min", "Q25", "Median", "Q75", "Q90", "Q95", "Q99", "Q99.5", "Q99.9", "Max", "Mean", "SD",
];
pub const PROFIT_COLUMNS: [&str; 10] = ["Min", "Q1", "Q5", "Q10", "Q15", "Q50", "Q75", "Max", "Mean", "SD"];
pub const LR_COLUMNS: [&str; 10] = ["Min", "Q25", "Q50", "Q75", "Q90", "Q95", "Q99.5", "Max", "Mean", "SD"];
pub const PROPOSAL_COLUMNS: [&str; 7] = [
    "Principle",
    "Premium",
    "Coverage",
    "Deductible1",
    "MeanProfit1",
    "Deductible2",
    "MeanProfit2",
];

/// One or more header-plus-rows blocks written back to back.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CsvTable {
    pub blocks: Vec<Block>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Block {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Block {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        Self {
            header: header.iter().map(|s| s.as_ref().to_string()).collect(),
            rows: Vec::new(),
        }
    }
}

impl CsvTable {
    pub fn single(block: Block) -> Self {
        Self { blocks: vec![block] }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = csv::WriterBuilder::new()
            .flexible(true)
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        for block in &self.blocks {
            w.write_record(&block.header).expect("in-memory write");
            for row in &block.rows {
                w.write_record(row).expect("in-memory write");
            }
        }
        w.into_inner().expect("in-memory flush")
    }
}

pub fn export_csv(table: &CsvTable, path: impl AsRef<Path>) -> io::Result<()> {
    fs::write(path, table.to_bytes())
}

pub fn num(x: f64) -> String {
    format!("{x}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_else(|| "infeasible".to_string())
}

fn stats_cells(s: &SummaryStats) -> Vec<String> {
    let mut cells = vec![num(s.min)];
    cells.extend(s.quantiles.iter().map(|&(_, q)| num(q)));
    cells.extend([num(s.max), num(s.mean), num(s.sd)]);
    cells
}

/// Per-line loss statistics, one row per line and a final `TL` row.
pub fn loss_summary_table(summary: &LossSummary) -> CsvTable {
    let mut header = vec!["Line".to_string()];
    header.extend(LOSS_SUMMARY_COLUMNS.iter().map(|s| s.to_string()));
    let mut block = Block { header, rows: vec![] };
    for (label, s) in &summary.rows {
        let mut row = vec![label.clone()];
        row.extend(stats_cells(s));
        block.rows.push(row);
    }
    CsvTable::single(block)
}

/// Premiums per line (rows) and principle (columns) plus a `Total` row.
pub fn premium_table(table: &PremiumTable) -> CsvTable {
    let mut header = vec!["Line".to_string()];
    header.extend((1..=table.principles.len()).map(|j| format!("rho{j}")));
    let mut block = Block { header, rows: vec![] };
    for (idx, row) in &table.rows {
        let mut cells = vec![format!("L{idx}")];
        cells.extend(row.iter().map(|&v| num(v)));
        block.rows.push(cells);
    }
    let mut total = vec!["Total".to_string()];
    total.extend(table.totals.iter().map(|&v| num(v)));
    block.rows.push(total);
    CsvTable::single(block)
}

/// Profit block followed by the loss-ratio block, one row per principle.
pub fn portfolio_table(results: &[(String, PortfolioResult)]) -> Result<CsvTable, StatsError> {
    let mut profit = Block::new(&["Principle", "Metric"]);
    profit.header.extend(PROFIT_COLUMNS.iter().map(|s| s.to_string()));
    let mut lr = Block::new(&["Principle", "Metric"]);
    lr.header.extend(LR_COLUMNS.iter().map(|s| s.to_string()));
    for (label, res) in results {
        let mut row = vec![label.clone(), "Profit".to_string()];
        row.extend(stats_cells(&profit_summary(res, &PROFIT_LEVELS)?));
        profit.rows.push(row);
        let mut row = vec![label.clone(), "LR".to_string()];
        row.extend(stats_cells(&stats::summarize(&res.lr, &LR_LEVELS)?));
        lr.rows.push(row);
    }
    Ok(CsvTable { blocks: vec![profit, lr] })
}

pub fn proposal_table(rows: &[Proposal]) -> CsvTable {
    let mut block = Block::new(&PROPOSAL_COLUMNS);
    for p in rows {
        block.rows.push(vec![
            p.principle.clone(),
            num(p.premium_per_home),
            num(p.coverage),
            opt(p.deductible_mean),
            opt(p.mean_profit_mean),
            opt(p.deductible_quantile),
            opt(p.mean_profit_quantile),
        ]);
    }
    CsvTable::single(block)
}

pub fn search_table(search: &DeductibleSearch) -> CsvTable {
    let mut block = Block::new(&["Deductible", "Statistic", "MeanProfit", "Feasible"]);
    for g in &search.evaluations {
        block.rows.push(vec![
            num(g.deductible),
            num(g.statistic),
            num(g.mean_profit),
            g.feasible.to_string(),
        ]);
    }
    CsvTable::single(block)
}

/// All `2^n` states, `S1..Sn` then `Prob`, in mask order.
pub fn joint_table(joint: &JointDistribution) -> CsvTable {
    let n = joint.node_count();
    let mut header: Vec<String> = (1..=n).map(|i| format!("S{i}")).collect();
    header.push("Prob".to_string());
    let mut block = Block { header, rows: vec![] };
    for (state, p) in joint.iter() {
        let mut row: Vec<String> = state.states.iter().map(|&b| u8::from(b).to_string()).collect();
        row.push(num(p));
        block.rows.push(row);
    }
    CsvTable::single(block)
}

pub fn marginals_table(network: &ExploitNetwork, probs: &[f64], std_errors: Option<&[f64]>) -> CsvTable {
    let mut header = vec!["Node", "Label", "Marginal"];
    if std_errors.is_some() {
        header.push("StdError");
    }
    let mut block = Block::new(&header);
    for (i, p) in probs.iter().enumerate() {
        let id = i as u32 + 1;
        let mut row = vec![id.to_string(), network.label(id).unwrap_or("").to_string(), num(*p)];
        if let Some(se) = std_errors {
            row.push(num(se[i]));
        }
        block.rows.push(row);
    }
    CsvTable::single(block)
}
