//! Command-line surface. `run_cli` is the whole program minus process exit,
//! so tests can drive it in-process.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use epiloss::debt::{compare_financing, run_ledger, wartime_no_capital_demo, Financing, LedgerConfig};
use epiloss::epidemic::peak_stats;
use epiloss::loss::{combined_loss, daily_incomes, frontier};
use epiloss::optimizer::{deviation_check, lambda_sweep, optimize, Method};
use epiloss::report::{self, Manifest, OutputDir};
use epiloss::{Error, InterventionPath, Scenario};
use serde_json::json;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "epiloss",
    version,
    about = "Epidemic intervention paths, their losses, and debt ledgers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Directory for every output file and the run manifest.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Recorded in the manifest; the pipeline itself is deterministic.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate one intervention path and price it.
    Simulate {
        #[arg(long)]
        scenario: PathBuf,
        /// One intensity per phase, e.g. 0,2,1,0.
        #[arg(long)]
        path: String,
        #[command(flatten)]
        common: Common,
    },
    /// Find the path with the lowest combined loss.
    Optimize {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, default_value = "enum", value_parser = ["enum", "dp"])]
        method: String,
        #[command(flatten)]
        common: Common,
    },
    /// Optimal path across values of a death.
    Sweep {
        #[arg(long)]
        scenario: PathBuf,
        /// Comma-separated ascending grid, e.g. 0,1,10,100.
        #[arg(long)]
        lambdas: String,
        #[command(flatten)]
        common: Common,
    },
    /// Income against health capital as intensity varies continuously.
    Frontier {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, default_value_t = 2.0)]
        gamma_exp: f64,
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Generational ledger for a financing config.
    Debt {
        #[arg(long)]
        config: PathBuf,
        /// Run tax, internal and external financing side by side.
        #[arg(long)]
        compare: bool,
        /// Also report the no-capital wartime economy for the config's spending.
        #[arg(long)]
        wartime: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Load and check a scenario, writing the resolved form with defaults.
    Validate {
        #[arg(long)]
        scenario: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

/// Parses `argv` (program name first), runs the command and returns the
/// process exit code. Messages go to stdout, errors to stderr.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match dispatch(cli.command) {
        Ok(message) => {
            print!("{message}");
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    if e.is_input_error() || matches!(e, Error::Infeasible(_)) {
        EXIT_INPUT
    } else {
        EXIT_RUNTIME
    }
}

fn dispatch(command: Command) -> epiloss::Result<String> {
    match command {
        Command::Simulate { scenario, path, common } => simulate(&scenario, &path, &common),
        Command::Optimize {
            scenario,
            method,
            common,
        } => run_optimize(&scenario, &method, &common),
        Command::Sweep {
            scenario,
            lambdas,
            common,
        } => sweep(&scenario, &lambdas, &common),
        Command::Frontier {
            scenario,
            gamma_exp,
            samples,
            common,
        } => run_frontier(&scenario, gamma_exp, samples, &common),
        Command::Debt {
            config,
            compare,
            wartime,
            common,
        } => debt(&config, compare, wartime, &common),
        Command::Validate { scenario, common } => validate(&scenario, &common),
    }
}

/// Missing or unreadable input files are the caller's mistake, not a failed
/// run, so they surface as input errors naming the file.
fn readable(file: &Path, field: &str) -> epiloss::Result<()> {
    std::fs::metadata(file).map(|_| ()).map_err(|e| Error::Validation {
        field: field.into(),
        reason: format!("cannot read {}: {e}", file.display()),
    })
}

fn load_scenario(file: &Path) -> epiloss::Result<Scenario> {
    readable(file, "--scenario")?;
    epiloss::load_scenario(file)
}

fn manifest_for(command: &str, scenario: &Scenario, common: &Common) -> Manifest {
    let mut m = Manifest::new(command);
    m.scenario_name = Some(scenario.name.clone());
    m.scenario_hash = Some(scenario.hash());
    m.seed = common.seed;
    m
}

fn simulate(file: &Path, path: &str, common: &Common) -> epiloss::Result<String> {
    let scenario = load_scenario(file)?;
    let model = scenario.model()?;
    let path: InterventionPath = path.parse()?;
    model.check_path(&path)?;

    let traj = model.engine().simulate(&path)?;
    let income = daily_incomes(&model, &path)?;
    let breakdown = combined_loss(&model, &path)?;
    let peaks = peak_stats(&traj);

    let mut out = OutputDir::create(&common.out)?;
    report::write_trajectory_csv(&out.file("trajectory.csv"), &traj, &income)?;
    report::write_summary_csv(&out.file("summary.csv"), std::slice::from_ref(&breakdown))?;
    let summary = json!({
        "scenario": scenario.name,
        "boundaries": model.schedule().boundaries,
        "loss": breakdown,
        "peaks": peaks,
    });
    report::write_json(&out.file("summary.json"), &summary)?;
    let mut manifest = manifest_for("simulate", &scenario, common);
    manifest.path = Some(path.to_string());
    let root = out.root().display().to_string();
    out.finish(manifest)?;

    let mut msg = String::new();
    let _ = writeln!(
        msg,
        "path {path}: deaths {:.2}, EL {:.2}, CPL {:.2}",
        breakdown.tsl, breakdown.el, breakdown.cpl
    );
    let _ = writeln!(
        msg,
        "economic loss is {:.3}% of peacetime income",
        100.0 * breakdown.el_share_of_peacetime_income
    );
    let _ = writeln!(msg, "wrote {root}");
    Ok(msg)
}

fn run_optimize(file: &Path, method: &str, common: &Common) -> epiloss::Result<String> {
    let scenario = load_scenario(file)?;
    let model = scenario.model()?;
    let method: Method = method.parse()?;
    let result = optimize(&model, method)?;
    let deviations = deviation_check(&model, &result.best_path)?;

    let mut out = OutputDir::create(&common.out)?;
    report::write_ranking_csv(&out.file("ranking.csv"), &result.ranking)?;
    report::write_summary_csv(&out.file("summary.csv"), std::slice::from_ref(&result.best_loss))?;
    let doc = json!({
        "method": result.method,
        "boundaries": model.schedule().boundaries,
        "best_path": result.best_path,
        "best_loss": result.best_loss,
        "deviations": deviations,
    });
    report::write_json(&out.file("optimum.json"), &doc)?;
    let mut manifest = manifest_for("optimize", &scenario, common);
    manifest.method = Some(method_name(method).into());
    manifest.best_path = Some(result.best_path.to_string());
    let root = out.root().display().to_string();
    out.finish(manifest)?;

    Ok(format!(
        "best path {} (CPL {:.2}) over {} paths; wrote {root}\n",
        result.best_path,
        result.best_loss.cpl,
        result.ranking.len()
    ))
}

fn method_name(m: Method) -> &'static str {
    match m {
        Method::Enumeration => "enum",
        Method::Dp => "dp",
    }
}

fn parse_grid(text: &str) -> epiloss::Result<Vec<f64>> {
    text.split(',')
        .map(|tok| {
            tok.trim().parse::<f64>().map_err(|e| Error::Validation {
                field: "lambdas".into(),
                reason: format!("cannot parse {tok:?}: {e}"),
            })
        })
        .collect()
}

fn sweep(file: &Path, lambdas: &str, common: &Common) -> epiloss::Result<String> {
    let scenario = load_scenario(file)?;
    let model = scenario.model()?;
    let grid = parse_grid(lambdas)?;
    let sweep = lambda_sweep(&model, &grid)?;

    let mut out = OutputDir::create(&common.out)?;
    report::write_sweep_csv(&out.file("sweep.csv"), &sweep)?;
    let mut manifest = manifest_for("sweep", &scenario, common);
    manifest.method = Some("enum".into());
    let root = out.root().display().to_string();
    out.finish(manifest)?;

    let mut msg = String::new();
    for e in &sweep.entries {
        let _ = writeln!(
            msg,
            "lambda {:>12}: {}  deaths {:.2}  EL {:.2}",
            e.lambda, e.path, e.tsl, e.el
        );
    }
    let _ = writeln!(msg, "wrote {root}");
    Ok(msg)
}

fn run_frontier(file: &Path, gamma_exp: f64, samples: usize, common: &Common) -> epiloss::Result<String> {
    let scenario = load_scenario(file)?;
    let points = frontier(&scenario.econ, &scenario.effects, gamma_exp, samples)?;

    let mut out = OutputDir::create(&common.out)?;
    report::write_frontier_csv(&out.file("frontier.csv"), &points)?;
    let root = out.root().display().to_string();
    out.finish(manifest_for("frontier", &scenario, common))?;
    Ok(format!("{} frontier points; wrote {root}\n", points.len()))
}

fn debt(file: &Path, compare: bool, wartime: bool, common: &Common) -> epiloss::Result<String> {
    readable(file, "--config")?;
    let config = LedgerConfig::load(file)?;
    let mut out = OutputDir::create(&common.out)?;
    let mut msg = String::new();

    if compare {
        let cmp = compare_financing(&config)?;
        report::write_comparison_csv(&out.file("comparison.csv"), &cmp)?;
        let ledgers: Vec<_> = Financing::ALL.iter().map(|&f| cmp.get(f)).collect();
        report::write_ledger_csv(&out.file("ledger.csv"), &ledgers)?;
        let _ = writeln!(msg, "aggregate consumption by period");
        let _ = writeln!(
            msg,
            "{:>6} {:>14} {:>14} {:>14}",
            "period", "tax", "internal_debt", "external_debt"
        );
        for k in 0..cmp.tax.records.len() {
            let _ = writeln!(
                msg,
                "{:>6} {:>14.4} {:>14.4} {:>14.4}",
                k + 1,
                cmp.tax.records[k].aggregate_consumption,
                cmp.internal_debt.records[k].aggregate_consumption,
                cmp.external_debt.records[k].aggregate_consumption,
            );
        }
    } else {
        let ledger = run_ledger(&config)?;
        report::write_ledger_csv(&out.file("ledger.csv"), &[&ledger])?;
        let _ = writeln!(msg, "{} financing", config.financing.as_str());
        let _ = writeln!(
            msg,
            "{:>6} {:>12} {:>12} {:>12} {:>12}",
            "period", "output", "taxes", "abroad", "consumption"
        );
        for r in &ledger.records {
            let _ = writeln!(
                msg,
                "{:>6} {:>12.4} {:>12.4} {:>12.4} {:>12.4}",
                r.period, r.output, r.taxes, r.payments_abroad, r.aggregate_consumption
            );
        }
    }

    if wartime {
        let outcomes = Financing::ALL
            .iter()
            .map(|&f| wartime_no_capital_demo(config.gov_spending, config.cohort_income, f))
            .collect::<epiloss::Result<Vec<_>>>()?;
        report::write_json(&out.file("wartime.json"), &outcomes)?;
        for o in &outcomes {
            let _ = writeln!(
                msg,
                "no-capital economy, {}: period-1 consumption falls by {:.4}",
                o.financing.as_str(),
                o.period1_consumption_drop
            );
        }
    }

    let mut manifest = Manifest::new("debt");
    manifest.config_hash = Some(config.hash());
    manifest.method = Some(if compare {
        "compare".into()
    } else {
        config.financing.as_str().into()
    });
    manifest.seed = common.seed;
    let root = out.root().display().to_string();
    out.finish(manifest)?;
    let _ = writeln!(msg, "wrote {root}");
    Ok(msg)
}

fn validate(file: &Path, common: &Common) -> epiloss::Result<String> {
    let scenario = load_scenario(file)?;
    let model = scenario.model()?;
    let mut out = OutputDir::create(&common.out)?;
    std::fs::write(out.file("scenario.resolved.json"), scenario.to_json() + "\n")?;
    let root = out.root().display().to_string();
    out.finish(manifest_for("validate", &scenario, common))?;
    Ok(format!(
        "{}: ok, {} phases, boundaries {:?}, hash {}; wrote {root}\n",
        scenario.name,
        model.n_phases(),
        model.schedule().boundaries,
        scenario.hash()
    ))
}
