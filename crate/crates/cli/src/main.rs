use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ratespread::covariance::WeightScheme;
use ratespread::curve_factors::factor_series;
use ratespread::data_io::{
    aligned_series_report, correlation_report, cumulative_report, duration_report, factor_series_report,
    load_portfolio, load_sector_stats, load_spreads, load_synth_config, load_yields, reference_table,
    reference_table_reports, render_reports, scenario_report, stats_from_tables, Calibration, Format, Report, Vintage,
};
use ratespread::duration::{DurationReport, FactorStats};
use ratespread::scenario::{scenario_pnl, ScenarioShock};
use ratespread::sector_model::generate_market;
use ratespread::workflow::{estimate_sectors, market_changes, sector_estimate_report};
use ratespread::{Error, Result};

/// Minimum column width for aligned output.
const WIDTH_VAR: &str = "RATESPREAD_WIDTH";

#[derive(Parser, Debug)]
#[command(
    name = "ratespread",
    version,
    about = "Treasury factor and credit spread co-movement analytics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decompose key-rate changes into shift and twist factors.
    Decompose(DecomposeArgs),
    /// Estimate sector spread correlations with the Treasury factors.
    Estimate(EstimateArgs),
    /// Effective duration of a single credit bond.
    Effdur(EffdurArgs),
    /// Portfolio P&L under a Treasury factor shock.
    Scenario(ScenarioArgs),
    /// Generate a synthetic market of factor and sector spread changes.
    Simulate(SimulateArgs),
    /// Print the bundled sector correlation and multiplier tables.
    Tables(TablesArgs),
}

#[derive(Args, Debug)]
struct Output {
    #[arg(long, value_enum, default_value_t = OutputFormat::Delimited)]
    format: OutputFormat,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum OutputFormat {
    Delimited,
    Aligned,
}

impl From<OutputFormat> for Format {
    fn from(f: OutputFormat) -> Self {
        match f {
            OutputFormat::Delimited => Format::Delimited,
            OutputFormat::Aligned => Format::Aligned,
        }
    }
}

#[derive(Args, Debug)]
struct DecomposeArgs {
    /// Yield file: date,y2,y5,y10,y20,y30 in percent.
    #[arg(long)]
    yields: PathBuf,
    /// Emit running sums starting from zero instead of period changes.
    #[arg(long)]
    cumulative: bool,
    #[command(flatten)]
    output: Output,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Scheme {
    Equal,
    Ewma,
}

#[derive(Args, Debug)]
struct EstimateArgs {
    /// Yield file; requires --spreads.
    #[arg(long, requires = "spreads", conflicts_with = "config")]
    yields: Option<PathBuf>,
    /// Sector OAS file: date,industry,rating,oas_bp.
    #[arg(long, requires = "yields")]
    spreads: Option<PathBuf>,
    /// Synthetic market config used instead of market files.
    #[arg(long, required_unless_present = "yields")]
    config: Option<PathBuf>,
    /// Overrides the seed of --config.
    #[arg(long, requires = "config")]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = Scheme::Equal)]
    scheme: Scheme,
    /// Half-life in periods for --scheme ewma.
    #[arg(long, default_value_t = 12.0)]
    half_life_periods: f64,
    /// Also print the full correlation matrix.
    #[arg(long)]
    matrix: bool,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct EffdurArgs {
    /// Modified duration, years.
    #[arg(long, allow_negative_numbers = true)]
    dmod: f64,
    /// Spread duration, years.
    #[arg(long, allow_negative_numbers = true)]
    dspread: f64,
    /// Correlation of spread changes with the shift factor.
    #[arg(long, allow_negative_numbers = true)]
    rho: f64,
    /// Spread volatility, bp per period.
    #[arg(long, allow_negative_numbers = true)]
    sigma_spread: f64,
    /// Shift factor volatility, bp per period.
    #[arg(long, allow_negative_numbers = true)]
    sigma_shift: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct ScenarioArgs {
    /// Portfolio file: id,industry,rating,d_mod,d_spread,weight,price,maturity.
    #[arg(long)]
    portfolio: PathBuf,
    /// Sector statistics file: industry,rating,sigma_spread,rho_shift,rho_twist.
    #[arg(long, conflicts_with_all = ["vintage", "calibration", "sigma_spread"])]
    stats: Option<PathBuf>,
    /// Take correlations from a bundled table instead of --stats.
    #[arg(long, requires_all = ["calibration", "sigma_spread"], required_unless_present = "stats")]
    vintage: Option<Vintage>,
    #[arg(long, requires = "vintage")]
    calibration: Option<Calibration>,
    /// Spread volatility applied to every sector with --vintage, bp per period.
    #[arg(long, requires = "vintage", allow_negative_numbers = true)]
    sigma_spread: Option<f64>,
    /// Shift factor volatility, bp per period.
    #[arg(long, allow_negative_numbers = true)]
    sigma_shift: f64,
    /// Twist factor volatility, bp per period; needed for a twist shock.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    sigma_twist: f64,
    /// Shift shock, bp.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    shift: f64,
    /// Twist shock, in units of the (-2,-1,0,1,2) bp basis.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    twist: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides the seed of the config file.
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct TablesArgs {
    #[arg(long)]
    vintage: Vintage,
    #[arg(long)]
    calibration: Calibration,
    #[command(flatten)]
    output: Output,
}

struct Rendered {
    reports: Vec<Report>,
    format: Format,
    notes: Vec<String>,
}

impl Rendered {
    fn new(reports: Vec<Report>, output: &Output) -> Self {
        Self {
            reports,
            format: output.format.into(),
            notes: Vec::new(),
        }
    }
}

fn decompose(a: &DecomposeArgs) -> Result<Rendered> {
    let obs = load_yields(&a.yields)?;
    let series = factor_series(&obs)?;
    let report = if a.cumulative {
        cumulative_report(&series.cumulative(obs[0].date))
    } else {
        factor_series_report(&series)
    };
    Ok(Rendered::new(vec![report], &a.output))
}

fn estimate(a: &EstimateArgs) -> Result<Rendered> {
    let scheme = match a.scheme {
        Scheme::Equal => WeightScheme::long_term(),
        Scheme::Ewma => WeightScheme::ExponentialHalfLife(a.half_life_periods),
    };
    scheme.validate()?;
    let mut notes = Vec::new();
    let changes = match (&a.config, &a.yields, &a.spreads) {
        (Some(config), _, _) => {
            let mut cfg = load_synth_config(config)?;
            if let Some(seed) = a.seed {
                cfg.seed = seed;
            }
            generate_market(&cfg)?
        }
        (None, Some(yields), Some(spreads)) => {
            let m = market_changes(&load_yields(yields)?, &load_spreads(spreads)?)?;
            if m.dropped > 0 {
                notes.push(format!("{} dates dropped because not every series had them", m.dropped));
            }
            m.series
        }
        _ => unreachable!("clap enforces an input source"),
    };
    let required = scheme.recommended_observations();
    if matches!(scheme, WeightScheme::ExponentialHalfLife(_)) && changes.n_periods() < required {
        return Err(Error::InsufficientData {
            required,
            actual: changes.n_periods(),
        });
    }
    let est = estimate_sectors(&changes, scheme)?;
    let mut reports = vec![sector_estimate_report(&est)?];
    if a.matrix {
        reports.push(correlation_report("Correlation matrix of period changes", &est.corr));
    }
    let mut r = Rendered::new(reports, &a.output);
    r.notes = notes;
    Ok(r)
}

fn effdur(a: &EffdurArgs) -> Result<Rendered> {
    let d = DurationReport::compute(a.dmod, a.dspread, a.rho, a.sigma_spread, a.sigma_shift)?;
    Ok(Rendered::new(vec![duration_report(&d)], &a.output))
}

fn scenario(a: &ScenarioArgs) -> Result<Rendered> {
    let positions = load_portfolio(&a.portfolio)?;
    let stats = match (&a.stats, a.vintage, a.calibration, a.sigma_spread) {
        (Some(path), ..) => load_sector_stats(path)?,
        (None, Some(v), Some(c), Some(sigma)) => stats_from_tables(reference_table(v, c), |_| sigma)?,
        _ => unreachable!("clap enforces a statistics source"),
    };
    let factors = FactorStats::new(a.sigma_shift, a.sigma_twist)?;
    let shock = ScenarioShock::new(a.shift, a.twist)?;
    let result = scenario_pnl(&positions, &shock, &stats, &factors)?;
    let mut r = Rendered::new(vec![scenario_report(&result)], &a.output);
    if result.twist_approximated {
        r.notes
            .push("twist yield change uses the loading of the nearest key-rate tenor".into());
    }
    Ok(r)
}

fn simulate(a: &SimulateArgs) -> Result<Rendered> {
    let mut cfg = load_synth_config(&a.config)?;
    if let Some(seed) = a.seed {
        cfg.seed = seed;
    }
    let market = generate_market(&cfg)?;
    let title = format!("Synthetic factor and sector spread changes, bp (seed {})", cfg.seed);
    Ok(Rendered::new(vec![aligned_series_report(&title, &market)], &a.output))
}

fn tables(a: &TablesArgs) -> Result<Rendered> {
    Ok(Rendered::new(
        reference_table_reports(reference_table(a.vintage, a.calibration)),
        &a.output,
    ))
}

fn min_width() -> std::result::Result<usize, String> {
    match std::env::var(WIDTH_VAR) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| format!("{WIDTH_VAR} must be a non-negative integer, got '{v}'")),
        Err(_) => Ok(0),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let width = match min_width() {
        Ok(w) => w,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let result = match &cli.command {
        Command::Decompose(a) => decompose(a),
        Command::Estimate(a) => estimate(a),
        Command::Effdur(a) => effdur(a),
        Command::Scenario(a) => scenario(a),
        Command::Simulate(a) => simulate(a),
        Command::Tables(a) => tables(a),
    };
    match result {
        Ok(r) => {
            for n in &r.notes {
                eprintln!("note: {n}");
            }
            let text = render_reports(&r.reports, r.format, width);
            let mut out = std::io::stdout().lock();
            if out.write_all(text.as_bytes()).and_then(|_| out.flush()).is_err() {
                return ExitCode::from(1);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
