//! CSV and JSON outputs. Numbers are written with 12 significant digits.

use std::fs::File;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::debt::{Financing, FinancingComparison, GenerationalLedger};
use crate::epidemic::Trajectory;
use crate::error::Result;
use crate::loss::{FrontierPoint, LossBreakdown};
use crate::optimizer::{LambdaSweep, RankedPath};

pub const SIGNIFICANT_DIGITS: usize = 12;

/// Shortest decimal form of `x` rounded to 12 significant digits, fixed
/// notation for moderate exponents and scientific otherwise.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..15).contains(&exp) {
        let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp).max(0) as usize;
        // re-round from the already-rounded mantissa value so both forms agree
        let rounded: f64 = sci.parse().expect("valid float");
        trim_zeros(format!("{rounded:.decimals$}"))
    } else {
        format!("{}e{}", trim_zeros(mantissa.to_string()), exp)
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn writer(path: &Path) -> Result<csv::Writer<File>> {
    Ok(csv::Writer::from_path(path)?)
}

pub const TRAJECTORY_HEADER: [&str; 8] = [
    "t",
    "S",
    "I",
    "R",
    "new_infections",
    "cumulative_deaths",
    "intensity",
    "daily_income",
];

/// `daily_income[d]` is the income of day `d`; each sample takes the income
/// of the day it falls in.
pub fn write_trajectory_csv(path: &Path, traj: &Trajectory, daily_income: &[f64]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(TRAJECTORY_HEADER)?;
    for k in 0..traj.len() {
        let day = (traj.times[k].floor() as usize).min(daily_income.len().saturating_sub(1));
        let income = daily_income.get(day).copied().unwrap_or(f64::NAN);
        w.write_record([
            fmt_num(traj.times[k]),
            fmt_num(traj.susceptible[k]),
            fmt_num(traj.infected[k]),
            fmt_num(traj.recovered[k]),
            fmt_num(traj.new_infections[k]),
            fmt_num(traj.cumulative_deaths[k]),
            traj.intensity_at[k].to_string(),
            fmt_num(income),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// One row per path: `path, msl, tsl, sg1..sgN, el, cpl`.
pub fn write_summary_csv(path: &Path, rows: &[LossBreakdown]) -> Result<()> {
    let mut w = writer(path)?;
    let n = rows.first().map_or(0, |r| r.sg_per_phase.len());
    let mut header = vec!["path".to_string(), "msl".into(), "tsl".into()];
    header.extend((1..=n).map(|p| format!("sg{p}")));
    header.extend(["el".to_string(), "cpl".into()]);
    w.write_record(&header)?;
    for r in rows {
        let mut rec = vec![r.path.to_string(), fmt_num(r.msl), fmt_num(r.tsl)];
        rec.extend(r.sg_per_phase.iter().map(|&g| fmt_num(g)));
        rec.extend([fmt_num(r.el), fmt_num(r.cpl)]);
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_ranking_csv(path: &Path, ranking: &[RankedPath]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["rank", "path", "el", "tsl", "cpl"])?;
    for (k, r) in ranking.iter().enumerate() {
        w.write_record([
            (k + 1).to_string(),
            r.path.to_string(),
            fmt_num(r.el),
            fmt_num(r.tsl),
            fmt_num(r.cpl),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_sweep_csv(path: &Path, sweep: &LambdaSweep) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["lambda", "path", "el", "tsl", "cpl"])?;
    for e in &sweep.entries {
        w.write_record([
            fmt_num(e.lambda),
            e.path.to_string(),
            fmt_num(e.el),
            fmt_num(e.tsl),
            fmt_num(e.cpl),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_frontier_csv(path: &Path, points: &[FrontierPoint]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["intensity", "health_capital", "income", "label"])?;
    for p in points {
        w.write_record([
            fmt_num(p.intensity),
            fmt_num(p.health_capital),
            fmt_num(p.income),
            p.label.unwrap_or("").to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub const LEDGER_HEADER: [&str; 15] = [
    "financing",
    "period",
    "output",
    "gov_spending",
    "taxes",
    "debt_issued",
    "debt_outstanding",
    "debt_service",
    "transfers_to_domestic_bondholders",
    "payments_abroad",
    "foreign_inflow",
    "investment",
    "aggregate_consumption",
    "bondholder_consumption",
    "non_holder_consumption",
];

pub fn write_ledger_csv(path: &Path, ledgers: &[&GenerationalLedger]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(LEDGER_HEADER)?;
    for ledger in ledgers {
        for r in &ledger.records {
            let nums = [
                r.output,
                r.gov_spending,
                r.taxes,
                r.debt_issued,
                r.debt_outstanding,
                r.debt_service,
                r.transfers_to_domestic_bondholders,
                r.payments_abroad,
                r.foreign_inflow,
                r.investment,
                r.aggregate_consumption,
                r.bondholder_consumption,
                r.non_holder_consumption,
            ];
            let mut rec = vec![ledger.financing.as_str().to_string(), r.period.to_string()];
            rec.extend(nums.iter().map(|&v| fmt_num(v)));
            w.write_record(&rec)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Side-by-side aggregate consumption per period, with the bondholder /
/// non-holder split for each financing mode.
pub fn write_comparison_csv(path: &Path, cmp: &FinancingComparison) -> Result<()> {
    let mut w = writer(path)?;
    let mut header = vec!["period".to_string()];
    for f in Financing::ALL {
        let name = f.as_str();
        header.push(format!("consumption_{name}"));
        header.push(format!("bondholders_{name}"));
        header.push(format!("non_holders_{name}"));
    }
    w.write_record(&header)?;
    for k in 0..cmp.tax.records.len() {
        let mut rec = vec![cmp.tax.records[k].period.to_string()];
        for f in Financing::ALL {
            let r = &cmp.get(f).records[k];
            rec.push(fmt_num(r.aggregate_consumption));
            rec.push(fmt_num(r.bondholder_consumption));
            rec.push(fmt_num(r.non_holder_consumption));
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a CSV written by this module into its header and string rows.
pub fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let mut r = csv::Reader::from_path(path)?;
    let header = r.headers()?.iter().map(str::to_string).collect();
    let rows = r
        .records()
        .map(|rec| rec.map(|rec| rec.iter().map(str::to_string).collect()))
        .collect::<std::result::Result<_, _>>()?;
    Ok((header, rows))
}

/// Provenance record written next to every set of outputs.
#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub tool: String,
    pub tool_version: String,
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scenario_name: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scenario_hash: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config_hash: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub best_path: Option<String>,
    pub seed: Option<u64>,
    pub outputs: Vec<String>,
}

impl Manifest {
    pub fn new(command: &str) -> Self {
        Manifest {
            tool: "epiloss".into(),
            tool_version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            scenario_name: None,
            scenario_hash: None,
            config_hash: None,
            path: None,
            method: None,
            best_path: None,
            seed: None,
            outputs: Vec::new(),
        }
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).expect("report serializes");
    std::fs::write(path, text + "\n")?;
    Ok(())
}

/// Output directory helper that remembers the file names it hands out.
#[derive(Debug)]
pub struct OutputDir {
    root: PathBuf,
    written: Vec<String>,
}

impl OutputDir {
    pub fn create(root: impl Into<PathBuf>) -> Result<Self> {
        let root = root.into();
        std::fs::create_dir_all(&root)?;
        Ok(OutputDir {
            root,
            written: Vec::new(),
        })
    }

    pub fn file(&mut self, name: &str) -> PathBuf {
        self.written.push(name.to_string());
        self.root.join(name)
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    /// Writes `manifest.json` listing every file handed out so far.
    pub fn finish(mut self, mut manifest: Manifest) -> Result<PathBuf> {
        manifest.outputs = std::mem::take(&mut self.written);
        let path = self.root.join("manifest.json");
        write_json(&path, &manifest)?;
        Ok(path)
    }
}
