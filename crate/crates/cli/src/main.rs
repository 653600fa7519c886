use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use brs_core::experiments::{
    demand_curve_table, optimal_report, profit_sweep, supply_risk, supply_risk_table, SupplyRiskOptions,
};
use brs_core::io::{load_scenario, write_table, Scenario, Table, TableFormat};
use brs_core::market::simulate_day;
use brs_core::provider::{ScenarioGenerator, UnitKind};

#[derive(Parser)]
#[command(name = "brs", version, about = "Bilateral reserve service experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Output {
    /// Write the table here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "csv")]
    format: TableFormat,
}

#[derive(Args)]
struct ScenarioArgs {
    #[arg(long)]
    scenario: PathBuf,
    /// VG producer id; defaults to the first one in the scenario.
    #[arg(long)]
    vg: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Marginal value of BRS against quantity at one hour.
    DemandCurve {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long)]
        hour: u32,
        /// Penalty factors, repeatable or comma separated.
        #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.3, 0.5])]
        alpha: Vec<f64>,
        #[arg(long, default_value_t = 51)]
        points: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Optimal BRS position and imbalance-cost breakdown at one hour.
    Optimal {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long)]
        hour: u32,
        /// $/MW; defaults to the scenario's BRS price model.
        #[arg(long)]
        down_price: Option<f64>,
        #[arg(long)]
        up_price: Option<f64>,
        #[command(flatten)]
        output: Output,
    },
    /// Expected day profit over BRS price ratios and forecast variance scales.
    ProfitSweep {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long, value_delimiter = ',', default_values_t = default_ratios())]
        price_ratios: Vec<f64>,
        /// Defaults to the scenario's variance_scales.
        #[arg(long, value_delimiter = ',')]
        variance_scales: Vec<f64>,
        #[command(flatten)]
        output: Output,
    },
    /// Full BRS lifecycle and settlement for every hour of the scenario.
    SimulateDay {
        #[arg(long)]
        scenario: PathBuf,
        /// Directory for contracts, ledger, schedules and totals tables.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[arg(long, default_value = "csv")]
        format: TableFormat,
    },
    /// Cash-flow risk that executed BRS adds to a dispatchable unit.
    SupplyRisk {
        #[arg(long)]
        unit_kind: Option<UnitKind>,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Correlation between the real-time price and the executed quantity.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        correlation: f64,
        /// Use the four equiprobable outcomes instead of Monte Carlo.
        #[arg(long)]
        enumerate: bool,
        #[command(flatten)]
        output: Output,
    },
}

fn default_ratios() -> Vec<f64> {
    (0..=10).map(|i| f64::from(i) * 0.05).collect()
}

enum Failure {
    Usage(String),
    Domain(brs_core::Error),
}

impl From<brs_core::Error> for Failure {
    fn from(e: brs_core::Error) -> Self {
        Failure::Domain(e)
    }
}

fn load_with_hour(path: &Path, hour: u32) -> Result<Scenario, Failure> {
    let scenario = load_scenario(path)?;
    if scenario.hour_index(hour).is_none() {
        return Err(Failure::Usage(format!(
            "--hour {hour} is outside the scenario hours {}..={}",
            scenario.hours[0],
            scenario.hours[scenario.hours.len() - 1]
        )));
    }
    Ok(scenario)
}

fn emit(table: &Table, output: &Output) -> Result<(), Failure> {
    match &output.out {
        Some(path) => {
            write_table(table, path, output.format)?;
            eprintln!("wrote {}", path.display());
        }
        None => match output.format {
            TableFormat::Csv => print!("{}", table.to_csv_string()),
            TableFormat::Json => println!("{}", table.to_json_string()),
        },
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::DemandCurve {
            scenario,
            hour,
            alpha,
            points,
            output,
        } => {
            let s = load_with_hour(&scenario.scenario, hour)?;
            emit(&demand_curve_table(&s, scenario.vg.as_deref(), hour, &alpha, points)?, &output)
        }
        Command::Optimal {
            scenario,
            hour,
            down_price,
            up_price,
            output,
        } => {
            let s = load_with_hour(&scenario.scenario, hour)?;
            let report = optimal_report(&s, scenario.vg.as_deref(), hour, down_price, up_price)?;
            emit(&report.to_table(), &output)
        }
        Command::ProfitSweep {
            scenario,
            price_ratios,
            variance_scales,
            output,
        } => {
            let s = load_scenario(&scenario.scenario)?;
            let scales = if variance_scales.is_empty() {
                s.config.variance_scales.clone()
            } else {
                variance_scales
            };
            emit(&profit_sweep(&s, scenario.vg.as_deref(), &price_ratios, &scales)?, &output)
        }
        Command::SimulateDay {
            scenario,
            out_dir,
            format,
        } => {
            let s = load_scenario(&scenario)?;
            let day = simulate_day(&s)?;
            match out_dir {
                Some(dir) => {
                    std::fs::create_dir_all(&dir).map_err(|source| brs_core::Error::Io {
                        path: dir.clone(),
                        source,
                    })?;
                    let ext = match format {
                        TableFormat::Csv => "csv",
                        TableFormat::Json => "json",
                    };
                    for (name, table) in [
                        ("contracts", day.contracts_table()),
                        ("ledger", day.ledger_table()),
                        ("schedules", day.schedules_table()),
                        ("totals", day.totals_table()),
                    ] {
                        let path = dir.join(format!("{name}.{ext}"));
                        write_table(&table, &path, format)?;
                        eprintln!("wrote {}", path.display());
                    }
                    Ok(())
                }
                None => emit(&day.totals_table(), &Output { out: None, format }),
            }
        }
        Command::SupplyRisk {
            unit_kind,
            samples,
            seed,
            correlation,
            enumerate,
            output,
        } => {
            if samples < 2 && !enumerate {
                return Err(Failure::Usage(format!("--samples must be at least 2, got {samples}")));
            }
            let opts = SupplyRiskOptions {
                generator: ScenarioGenerator {
                    correlation,
                    ..ScenarioGenerator::default()
                },
                samples,
                seed,
                enumerate,
                ..SupplyRiskOptions::default()
            };
            let cmp = supply_risk(&opts)?;
            emit(&supply_risk_table(&cmp, unit_kind), &output)?;
            eprintln!("marginal_below_base: {}", cmp.marginal_below_base);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Domain(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
