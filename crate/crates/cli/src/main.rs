//! `hpp`: day-ahead dispatch studies for a wind + electrolyzer + hydrogen
//! storage plant.
//!
//! Exit codes: 0 success, 2 infeasible, 3 input error, 4 solver limit reached
//! (files are still written from the best schedule found), 1 anything else.

use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use log::{info, warn};

use hpp_core::bounds::{price_histogram, write_histogram_csv};
use hpp_core::models::decode_values;
use hpp_core::scenario::{parse_series_csv, write_series_csv, PRICE_HEADER, WIND_HEADER};
use hpp_core::study::{write_json, BoundsReport, ScheduleSummary};
use hpp_core::synth::{synthetic_series, SynthParams};
use hpp_core::{
    build, evaluate, run_compare, run_single, run_sweep, segment_set, CoreError, ModelKind, PlantScenario, PriceRange,
    RunSpec, ScenarioConfig, SweepAxis,
};
use hpp_milp::{read_solution, write_lp, MilpError, MilpStatus};

const BUNDLED_CONFIG: &str = include_str!("../../../data/default_config.json");
const BUNDLED_PRICES: &str = include_str!("../../../data/prices.csv");
const BUNDLED_WIND: &str = include_str!("../../../data/wind.csv");

/// Desk-scale horizon used when `--horizon-hours` is omitted.
const DEFAULT_HORIZON_HOURS: usize = 168;

const EXIT_INFEASIBLE: u8 = 2;
const EXIT_INPUT: u8 = 3;
const EXIT_LIMIT: u8 = 4;

#[derive(Parser)]
#[command(name = "hpp", version, about = "Day-ahead dispatch of a wind + electrolyzer + hydrogen storage plant")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one model variant and write report.json, bounds.json,
    /// schedule.csv and expost.csv.
    Run {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        variant: VariantArgs,
        #[command(flatten)]
        solve: SolveArgs,
    },
    /// Solve several variants on the same scenario and tabulate them against
    /// the most profitable one.
    Compare {
        #[command(flatten)]
        input: InputArgs,
        /// Comma-separated variants.
        #[arg(long, value_delimiter = ',', default_value = "OO-1,OO-12,OS-1,OS-12,OOS-1,OOS-12")]
        variants: Vec<String>,
        #[command(flatten)]
        solve: SolveArgs,
    },
    /// OOS-1 against OOS-12 along one sensitivity axis.
    Sweep {
        #[command(flatten)]
        input: InputArgs,
        /// wind_ratio, demand or hydrogen_price.
        #[arg(long)]
        axis: SweepAxis,
        /// Axis values; defaults to 1,2,8 / 1,2 / 2.1,5.0.
        #[arg(long, value_delimiter = ',')]
        values: Vec<f64>,
        #[command(flatten)]
        solve: SolveArgs,
    },
    /// Write seeded synthetic prices.csv, wind.csv and a reference config.
    Synth {
        #[arg(long, default_value_t = DEFAULT_HORIZON_HOURS)]
        hours: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Mean day-ahead price, EUR/MWh.
        #[arg(long)]
        mean_price: Option<f64>,
        /// Logistic offset of the wind process; lower is calmer.
        #[arg(long, allow_hyphen_values = true)]
        wind_bias: Option<f64>,
        /// First timestamp (RFC 3339).
        #[arg(long, default_value = "2019-01-01T00:00:00Z")]
        start: String,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Write the MILP of one variant in LP format for an external solver.
    ExportLp {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        variant: VariantArgs,
        #[command(flatten)]
        solve: SolveArgs,
    },
    /// Check a solution file (`name = value` lines) against a variant's
    /// MILP, then decode and evaluate it ex post.
    VerifySolution {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        variant: VariantArgs,
        #[command(flatten)]
        solve: SolveArgs,
        #[arg(long)]
        solution: PathBuf,
    },
    /// Price range in which the segment count matters, with an hourly price
    /// histogram.
    Bounds {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        solve: SolveArgs,
        /// Histogram bin width, EUR/MWh.
        #[arg(long, default_value_t = 5.0)]
        bin_width: f64,
    },
}

/// Scenario files; all three default to the bundled week.
#[derive(Args)]
struct InputArgs {
    /// Plant config JSON; the bundled reference plant when omitted
    #[arg(long)]
    config: Option<PathBuf>,
    /// Hourly prices CSV (timestamp,price_eur_mwh); give together with --wind
    #[arg(long)]
    prices: Option<PathBuf>,
    /// Hourly wind CSV (timestamp,capacity_factor); give together with --prices
    #[arg(long)]
    wind: Option<PathBuf>,
}

#[derive(Args)]
struct VariantArgs {
    #[arg(long, default_value = "oos")]
    model: ModelKind,
    #[arg(long, default_value_t = 12)]
    segments: usize,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long, default_value_t = 1e-4)]
    gap: f64,
    #[arg(long, default_value_t = 0)]
    horizon_start: usize,
    /// Defaults to 168 hours, or what is left of the series if shorter.
    #[arg(long)]
    horizon_hours: Option<usize>,
    #[arg(long, default_value_t = 1_000_000)]
    node_limit: usize,
    /// Seconds; unlimited when omitted.
    #[arg(long)]
    time_limit: Option<f64>,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Single-threaded, reproducible node order (overrides --threads).
    #[arg(long)]
    deterministic: bool,
    /// Do not start three-state runs from the on/standby optimum.
    #[arg(long)]
    no_seed: bool,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

impl SolveArgs {
    fn spec(&self, model: ModelKind, segments: usize, scn: &PlantScenario) -> RunSpec {
        let left = scn.hours().saturating_sub(self.horizon_start);
        RunSpec {
            model,
            segments,
            horizon_start: self.horizon_start,
            horizon_hours: Some(self.horizon_hours.unwrap_or(DEFAULT_HORIZON_HOURS.min(left.max(1)))),
            gap: self.gap,
            node_limit: self.node_limit,
            threads: if self.deterministic { 1 } else { self.threads },
            time_limit_s: self.time_limit,
            seed: !self.no_seed,
        }
    }
}

fn load_inputs(input: &InputArgs) -> Result<PlantScenario> {
    let read = |path: &Option<PathBuf>, bundled: &'static str| -> Result<(String, String)> {
        match path {
            Some(p) => {
                let text = fs::read_to_string(p).map_err(|e| CoreError::Io { path: p.clone(), source: e })?;
                Ok((text, p.display().to_string()))
            }
            None => Ok((bundled.to_string(), "<bundled>".to_string())),
        }
    };
    if input.prices.is_some() != input.wind.is_some() {
        return Err(CoreError::InvalidArgument("--prices and --wind must be given together".into()).into());
    }
    let (cfg_text, cfg_name) = read(&input.config, BUNDLED_CONFIG)?;
    let (p_text, p_name) = read(&input.prices, BUNDLED_PRICES)?;
    let (w_text, w_name) = read(&input.wind, BUNDLED_WIND)?;
    let config = ScenarioConfig::from_json(&cfg_text, &cfg_name)?;
    let prices = parse_series_csv(&p_text, &p_name, PRICE_HEADER, "EUR/MWh")?;
    let wind = parse_series_csv(&w_text, &w_name, WIND_HEADER, "capacity factor")?;
    if let Some(k) = wind.values.iter().position(|cf| !(0.0..=1.0).contains(cf)) {
        return Err(CoreError::Parse {
            file: w_name,
            line: k + 2,
            message: format!("capacity factor {} outside [0, 1]", wind.values[k]),
        }
        .into());
    }
    Ok(PlantScenario::from_parts(&config, &prices, &wind)?)
}

fn status_code(status: MilpStatus) -> u8 {
    match status {
        MilpStatus::OptimalWithinGap => 0,
        MilpStatus::Infeasible | MilpStatus::Unbounded => EXIT_INFEASIBLE,
        MilpStatus::NodeLimit | MilpStatus::TimeLimit => EXIT_LIMIT,
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

fn print_summary(label: &str, status: MilpStatus, summary: Option<&ScheduleSummary>) {
    match summary {
        Some(s) => println!(
            "{label}: {status:?}, estimated profit {:.2} EUR, realized {:.2} EUR (surplus {:.2}), hydrogen {:.1} kg",
            s.estimated_profit_eur, s.realized_profit_eur, s.realized_surplus_profit_eur, s.realized_hydrogen_kg
        ),
        None => println!("{label}: {status:?}, no schedule"),
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Run { input, variant, solve } => {
            let scn = load_inputs(&input)?;
            let spec = solve.spec(variant.model, variant.segments, &scn);
            let out = run_single(&spec, &scn)?;
            out.write(&solve.out)?;
            print_summary(&spec.label(), out.stats.status, out.summary().as_ref());
            if out.stats.status == MilpStatus::Infeasible {
                warn!("{}: no schedule meets the demand and storage constraints", spec.label());
            }
            Ok(status_code(out.stats.status))
        }
        Command::Compare { input, variants, solve } => {
            let scn = load_inputs(&input)?;
            let specs = variants
                .iter()
                .map(|v| {
                    let base = RunSpec::from_label(v)?;
                    Ok(solve.spec(base.model, base.segments, &scn))
                })
                .collect::<Result<Vec<_>>>()?;
            let (report, outcomes) = run_compare(&specs, &scn)?;
            create_dir(&solve.out)?;
            for out in &outcomes {
                out.write(&solve.out.join(out.spec.label()))?;
            }
            report.write_csv(&solve.out.join("compare.csv"))?;
            write_json(&solve.out.join("compare.json"), &report)?;
            for row in &report.rows {
                match (&row.error, row.estimated_profit_eur) {
                    (Some(e), _) => println!("{}: failed: {e}", row.label),
                    (None, Some(p)) => println!(
                        "{}: estimated {:.2} EUR ({:+.3}% vs benchmark), realized {:.2} EUR",
                        row.label,
                        p,
                        row.estimated_vs_benchmark_pct.unwrap_or(0.0),
                        row.realized_profit_eur.unwrap_or(f64::NAN)
                    ),
                    (None, None) => println!("{}: no schedule", row.label),
                }
            }
            if let Some(b) = &report.benchmark {
                println!("benchmark: {b}");
            }
            Ok(outcomes
                .iter()
                .map(|o| status_code(o.stats.status))
                .chain((outcomes.len() < specs.len()).then_some(1))
                .max()
                .unwrap_or(0))
        }
        Command::Sweep {
            input,
            axis,
            values,
            solve,
        } => {
            let scn = load_inputs(&input)?;
            let values = if values.is_empty() {
                match axis {
                    SweepAxis::WindRatio => vec![1.0, 2.0, 8.0],
                    SweepAxis::Demand => vec![1.0, 2.0],
                    SweepAxis::HydrogenPrice => vec![2.1, 5.0],
                }
            } else {
                values
            };
            let base = solve.spec(ModelKind::Oos, 1, &scn);
            let report = run_sweep(axis, &values, &scn, &base)?;
            create_dir(&solve.out)?;
            report.write_csv(&solve.out.join("sweep.csv"))?;
            write_json(&solve.out.join("sweep.json"), &report)?;
            let mut code = 0;
            for p in &report.points {
                if !p.errors.is_empty() {
                    println!("{axis} = {}: {}", p.value, p.errors.join("; "));
                    code = EXIT_INFEASIBLE;
                    continue;
                }
                println!(
                    "{axis} = {}: wind-limited hours {}, realized hydrogen gap {:.3}%, realized profit gap {:.3}%",
                    p.value,
                    p.wind_limited_hours,
                    p.realized_hydrogen_gap_pct.unwrap_or(f64::NAN),
                    p.realized_profit_gap_pct.unwrap_or(f64::NAN)
                );
                for &s in &p.statuses {
                    code = code.max(status_code(s));
                }
            }
            Ok(code)
        }
        Command::Synth {
            hours,
            seed,
            mean_price,
            wind_bias,
            start,
            out,
        } => {
            if hours == 0 {
                return Err(CoreError::InvalidArgument("--hours must be at least 1".into()).into());
            }
            let start = chrono::DateTime::parse_from_rfc3339(&start)
                .map_err(|e| CoreError::InvalidArgument(format!("bad --start `{start}`: {e}")))?
                .with_timezone(&chrono::Utc);
            let defaults = SynthParams::default();
            let params = SynthParams {
                mean_price: mean_price.unwrap_or(defaults.mean_price),
                wind_bias: wind_bias.unwrap_or(defaults.wind_bias),
                ..defaults
            };
            let (prices, wind) = synthetic_series(hours, seed, start, &params);
            create_dir(&out)?;
            write_series_csv(&out.join("prices.csv"), PRICE_HEADER, &prices)?;
            write_series_csv(&out.join("wind.csv"), WIND_HEADER, &wind)?;
            write_json(&out.join("config.json"), &ScenarioConfig::reference())?;
            println!("wrote {hours} hours to {}", out.display());
            Ok(0)
        }
        Command::ExportLp { input, variant, solve } => {
            let scn = load_inputs(&input)?;
            let spec = solve.spec(variant.model, variant.segments, &scn);
            spec.validate()?;
            let scn = spec.window(&scn)?;
            let seg = segment_set(&scn.physics, scn.p_min, spec.segments)?;
            let model = build(spec.model, &scn, &seg)?;
            create_dir(&solve.out)?;
            let path = solve.out.join(format!("{}.lp", spec.label()));
            fs::write(&path, write_lp(&model.instance)).with_context(|| format!("writing {}", path.display()))?;
            println!("wrote {}", path.display());
            Ok(0)
        }
        Command::VerifySolution {
            input,
            variant,
            solve,
            solution,
        } => {
            let scn = load_inputs(&input)?;
            let spec = solve.spec(variant.model, variant.segments, &scn);
            spec.validate()?;
            let scn = spec.window(&scn)?;
            let seg = segment_set(&scn.physics, scn.p_min, spec.segments)?;
            let model = build(spec.model, &scn, &seg)?;
            let file = fs::File::open(&solution).map_err(|e| CoreError::Io {
                path: solution.clone(),
                source: e,
            })?;
            let values = read_solution(&model.instance, BufReader::new(file))?;
            let schedule = decode_values(&model, &scn, &values)?;
            let ex = evaluate(&schedule, &scn.physics, &scn)?;
            let summary = ScheduleSummary::new(&schedule, &ex);
            create_dir(&solve.out)?;
            write_json(&solve.out.join("verification.json"), &summary)?;
            ex.write_csv(&solve.out.join("expost.csv"))?;
            print_summary(&spec.label(), MilpStatus::OptimalWithinGap, Some(&summary));
            println!("solution satisfies every constraint");
            Ok(0)
        }
        Command::Bounds { input, solve, bin_width } => {
            let scn = load_inputs(&input)?;
            let spec = solve.spec(ModelKind::Oos, 1, &scn);
            let scn = spec.window(&scn)?;
            let range = PriceRange::compute(&scn.physics, &scn)?;
            let report = BoundsReport::new(range, &scn);
            let bins = price_histogram(&range, &scn.prices, bin_width)?;
            create_dir(&solve.out)?;
            write_json(&solve.out.join("bounds.json"), &report)?;
            write_histogram_csv(&solve.out.join("price_histogram.csv"), &bins)?;
            println!(
                "price range [{:.2}, {:.2}] EUR/MWh; hours below {}, inside {}, above {}",
                range.lower, range.upper, report.hours.below, report.hours.inside, report.hours.above
            );
            Ok(0)
        }
    }
}

/// Input problems map to 3; anything the solver or model could not handle
/// maps to 1.
fn error_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<CoreError>() {
            return match e {
                CoreError::Numeric(_) => 1,
                CoreError::Milp(m) => milp_error_code(m),
                _ => EXIT_INPUT,
            };
        }
        if let Some(m) = cause.downcast_ref::<MilpError>() {
            return milp_error_code(m);
        }
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return EXIT_INPUT;
        }
    }
    1
}

fn milp_error_code(e: &MilpError) -> u8 {
    match e {
        MilpError::Numeric(_) => 1,
        _ => EXIT_INPUT,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => {
            info!("exit {code}");
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(error_code(&e))
        }
    }
}

