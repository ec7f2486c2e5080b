//! Command-line front end for the growth-collapse moment engine.
//!
//! Three subcommands cover the library surface:
//!
//! * `moments` — closed-form moments/cumulants of the continuous-time
//!   process, symbolically or tabulated on a time grid.
//! * `embedded` — exact moments/cumulants of the chains sampled at jump
//!   times, tabulated over a range of jump indices.
//! * `compare` — runs the analytic engine and the Monte Carlo simulator on
//!   the same grid and gates on agreement within a standard-error budget.
//!
//! Output is CSV (17 significant digits, `.` decimal separator, `\n`
//! newlines), JSON, or an exact symbolic rendering. Every run is a pure
//! function of its flags: fixed seed means byte-identical output, regardless
//! of `GC_MOMENTS_THREADS`.
//!
//! Exit codes: 0 success (and comparison pass), 1 comparison gate failure,
//! 2 configuration or usage error.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use gc_moments::combinatorics::MomentSequence;
use gc_moments::continuous::{cumulants_x, moment_report, GrowthSpec};
use gc_moments::embedded::{cumulants_embedded, moment_table, Chain, EmbeddedSpec};
use gc_moments::exppoly::ExpPoly;
use gc_moments::mc::{compare, simulate_embedded, simulate_gc, CompareRow, Grid, SimConfig};
use gc_moments::rational::{parse_rational, to_f64, Rational};

#[derive(Parser)]
#[command(
    name = "gc-moments",
    version,
    about = "Exact moments of growth-collapse processes, with a Monte Carlo cross-check"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form moments and cumulants of the continuous-time process
    Moments(MomentsArgs),
    /// Exact moments of the chains embedded at jump times
    Embedded(EmbeddedArgs),
    /// Analytic engine vs Monte Carlo agreement gate
    Compare(CompareArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Symbolic,
}

#[derive(Args)]
struct MomentsArgs {
    /// Poisson jump rate: exact rational ("2", "7/3") or decimal ("2.5")
    #[arg(long, value_name = "RAT|FLOAT")]
    lambda: String,
    /// Moment order n
    #[arg(long = "n", alias = "n-max", default_value_t = 4, value_name = "INT")]
    n: usize,
    /// First grid time
    #[arg(long, default_value_t = 0.0)]
    t_start: f64,
    /// Last grid time (inclusive)
    #[arg(long, default_value_t = 5.0)]
    t_stop: f64,
    /// Grid spacing
    #[arg(long, default_value_t = 0.5)]
    t_step: f64,
    /// Cutoff law: "uniform" or comma-separated moments "m1,m2,..."
    #[arg(long, default_value = "uniform")]
    cutoff: String,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output file (stdout if omitted)
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EmbeddedArgs {
    /// Poisson jump rate: exact rational ("2", "7/3") or decimal ("2.5")
    #[arg(long, value_name = "RAT|FLOAT")]
    lambda: String,
    /// Highest moment order (1..=4)
    #[arg(long = "n", alias = "n-max", default_value_t = 4, value_name = "INT")]
    n: usize,
    /// First jump index
    #[arg(long, default_value_t = 1)]
    m_start: usize,
    /// Last jump index (inclusive)
    #[arg(long, default_value_t = 10)]
    m_stop: usize,
    /// Cutoff law: "uniform" or comma-separated moments "m1,m2,..."
    #[arg(long, default_value = "uniform")]
    cutoff: String,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output file (stdout if omitted)
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    /// Poisson jump rate: exact rational ("2", "7/3") or decimal ("2.5")
    #[arg(long, value_name = "RAT|FLOAT")]
    lambda: String,
    /// Highest cumulant order compared
    #[arg(long = "n", alias = "n-max", default_value_t = 4, value_name = "INT")]
    n: usize,
    /// First grid time (continuous-process comparison)
    #[arg(long)]
    t_start: Option<f64>,
    /// Last grid time (inclusive)
    #[arg(long)]
    t_stop: Option<f64>,
    /// Grid spacing
    #[arg(long)]
    t_step: Option<f64>,
    /// First jump index (embedded-chain comparison)
    #[arg(long)]
    m_start: Option<usize>,
    /// Last jump index (inclusive)
    #[arg(long)]
    m_stop: Option<usize>,
    /// Monte Carlo sample count
    #[arg(long, default_value_t = 1_000_000)]
    samples: usize,
    /// RNG seed; fixed seed means byte-identical output
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Gate width in standard errors
    #[arg(long, default_value_t = 4.0)]
    sigma: f64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output file (stdout if omitted)
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

struct CliError(String);

impl From<gc_moments::Error> for CliError {
    fn from(e: gc_moments::Error) -> Self {
        CliError(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError(format!("serialization failed: {e}"))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(CliError(msg)) = configure_threads() {
        eprintln!("gc-moments: {msg}");
        return ExitCode::from(2);
    }
    let result = match cli.command {
        Command::Moments(args) => cmd_moments(args),
        Command::Embedded(args) => cmd_embedded(args),
        Command::Compare(args) => cmd_compare(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(CliError(msg)) => {
            eprintln!("gc-moments: {msg}");
            ExitCode::from(2)
        }
    }
}

/// Honors GC_MOMENTS_THREADS as a cap on rayon worker threads.
fn configure_threads() -> Result<(), CliError> {
    match std::env::var("GC_MOMENTS_THREADS") {
        Err(_) => Ok(()),
        Ok(v) => {
            let n: usize = v
                .parse()
                .map_err(|_| CliError(format!("GC_MOMENTS_THREADS must be a positive integer, got {v:?}")))?;
            if n == 0 {
                return Err(CliError("GC_MOMENTS_THREADS must be at least 1".into()));
            }
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| CliError(format!("thread pool setup failed: {e}")))
        }
    }
}

fn parse_positive_lambda(s: &str) -> Result<Rational, CliError> {
    let lambda = parse_rational(s)?;
    if to_f64(&lambda) <= 0.0 {
        return Err(CliError(format!("lambda must be positive, got {s}")));
    }
    Ok(lambda)
}

/// Builds the cutoff moment sequence; explicit lists are `m_1,m_2,…` with
/// `m_0 = 1` implicit, and must reach at least `max_order`.
fn parse_cutoff(s: &str, max_order: usize) -> Result<MomentSequence, CliError> {
    if s.trim() == "uniform" {
        return Ok(MomentSequence::uniform(max_order));
    }
    let mut values = vec![Rational::from_integer(1.into())];
    for part in s.split(',') {
        values.push(parse_rational(part)?);
    }
    if values.len() <= max_order {
        return Err(CliError(format!(
            "cutoff list holds {} moments but order {max_order} is requested",
            values.len() - 1
        )));
    }
    Ok(MomentSequence::from_moments(values)?)
}

fn time_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>, CliError> {
    if !(start.is_finite() && stop.is_finite() && step.is_finite()) {
        return Err(CliError("time grid bounds must be finite".into()));
    }
    if start < 0.0 {
        return Err(CliError("t-start must be nonnegative".into()));
    }
    if step <= 0.0 {
        return Err(CliError("t-step must be positive".into()));
    }
    if stop < start {
        return Err(CliError("t-stop must not precede t-start".into()));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    if count > 1_000_000 {
        return Err(CliError(format!("time grid would hold {count} points")));
    }
    Ok((0..count).map(|i| start + i as f64 * step).collect())
}

fn emit(out: &Option<PathBuf>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| CliError(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

/// 17 significant digits: round-trip safe doubles.
fn fmt_f(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f).unwrap_or_default()
}

fn json_row(fields: Vec<(String, serde_json::Value)>) -> serde_json::Value {
    serde_json::Value::Object(fields.into_iter().collect())
}

fn skew_kurt_at(kappas: &[ExpPoly], n: usize, t: f64) -> (Option<f64>, Option<f64>) {
    if n < 3 {
        return (None, None);
    }
    let var = kappas[1].eval(t);
    if var <= 0.0 {
        return (None, None);
    }
    let skew = Some(kappas[2].eval(t) / var.powf(1.5));
    let kurt = (n >= 4).then(|| kappas[3].eval(t) / (var * var));
    (skew, kurt)
}

fn cmd_moments(args: MomentsArgs) -> Result<u8, CliError> {
    let lambda = parse_positive_lambda(&args.lambda)?;
    let n = args.n;

    // Order 0: both moments are constant 1, no cumulant columns.
    if n == 0 {
        let content = match args.format {
            Format::Symbolic => "moment_Y_0 = 1\nmoment_X_0 = 1\n".to_string(),
            Format::Csv => {
                let grid = time_grid(args.t_start, args.t_stop, args.t_step)?;
                let mut s = String::from("t,moment_Y_0,moment_X_0,skewness,kurtosis\n");
                for t in grid {
                    let _ = writeln!(s, "{},{},{},,", fmt_f(t), fmt_f(1.0), fmt_f(1.0));
                }
                s
            }
            Format::Json => {
                let grid = time_grid(args.t_start, args.t_stop, args.t_step)?;
                let rows: Vec<_> = grid
                    .iter()
                    .map(|&t| {
                        json_row(vec![
                            ("t".into(), t.into()),
                            ("moment_Y_0".into(), 1.0.into()),
                            ("moment_X_0".into(), 1.0.into()),
                            ("skewness".into(), serde_json::Value::Null),
                            ("kurtosis".into(), serde_json::Value::Null),
                        ])
                    })
                    .collect();
                format!("{}\n", serde_json::to_string_pretty(&rows)?)
            }
        };
        emit(&args.out, &content)?;
        return Ok(0);
    }

    let cutoff = parse_cutoff(&args.cutoff, n)?;
    let spec = GrowthSpec::new(lambda, cutoff)?;
    let report = moment_report(&spec, n)?;

    let content = match args.format {
        Format::Symbolic => {
            let mut s = String::new();
            let _ = writeln!(s, "moment_Y_{n} = {}", report.moment_y);
            let _ = writeln!(s, "moment_X_{n} = {}", report.moment_x);
            for (j, kappa) in report.cumulants.iter().enumerate() {
                let _ = writeln!(s, "kappa_{} = {}", j + 1, kappa);
            }
            s
        }
        Format::Csv => {
            let grid = time_grid(args.t_start, args.t_stop, args.t_step)?;
            let mut s = format!("t,moment_Y_{n},moment_X_{n}");
            for j in 1..=n {
                let _ = write!(s, ",kappa_{j}");
            }
            s.push_str(",skewness,kurtosis\n");
            for &t in &grid {
                let _ = write!(
                    s,
                    "{},{},{}",
                    fmt_f(t),
                    fmt_f(report.moment_y.eval(t)),
                    fmt_f(report.moment_x.eval(t))
                );
                for kappa in &report.cumulants {
                    let _ = write!(s, ",{}", fmt_f(kappa.eval(t)));
                }
                let (skew, kurt) = skew_kurt_at(&report.cumulants, n, t);
                let _ = writeln!(s, ",{},{}", fmt_opt(skew), fmt_opt(kurt));
            }
            s
        }
        Format::Json => {
            let grid = time_grid(args.t_start, args.t_stop, args.t_step)?;
            let rows: Vec<_> = grid
                .iter()
                .map(|&t| {
                    let mut fields = vec![
                        ("t".to_string(), serde_json::Value::from(t)),
                        (format!("moment_Y_{n}"), report.moment_y.eval(t).into()),
                        (format!("moment_X_{n}"), report.moment_x.eval(t).into()),
                    ];
                    for (j, kappa) in report.cumulants.iter().enumerate() {
                        fields.push((format!("kappa_{}", j + 1), kappa.eval(t).into()));
                    }
                    let (skew, kurt) = skew_kurt_at(&report.cumulants, n, t);
                    fields.push(("skewness".into(), skew.into()));
                    fields.push(("kurtosis".into(), kurt.into()));
                    json_row(fields)
                })
                .collect();
            format!("{}\n", serde_json::to_string_pretty(&rows)?)
        }
    };
    emit(&args.out, &content)?;
    Ok(0)
}

fn cmd_embedded(args: EmbeddedArgs) -> Result<u8, CliError> {
    let lambda = parse_positive_lambda(&args.lambda)?;
    let n = args.n;
    if n == 0 {
        return Err(CliError("embedded tables need n >= 1".into()));
    }
    let cutoff = parse_cutoff(&args.cutoff, n)?;
    let rows = moment_table(&lambda, &cutoff, args.m_start..=args.m_stop, n)?;

    let content = match args.format {
        Format::Symbolic => {
            let mut s = String::new();
            for row in &rows {
                for (j, v) in row.moments_y.iter().enumerate() {
                    let _ = writeln!(s, "m={} moment_Y_{} = {}", row.m, j + 1, v);
                }
                for (j, v) in row.moments_x.iter().enumerate() {
                    let _ = writeln!(s, "m={} moment_X_{} = {}", row.m, j + 1, v);
                }
                for (j, v) in row.cumulants_y.iter().enumerate() {
                    let _ = writeln!(s, "m={} kappa_Y_{} = {}", row.m, j + 1, v);
                }
                for (j, v) in row.cumulants_x.iter().enumerate() {
                    let _ = writeln!(s, "m={} kappa_X_{} = {}", row.m, j + 1, v);
                }
            }
            s
        }
        Format::Csv => {
            let mut s = String::from("m");
            for j in 1..=n {
                let _ = write!(s, ",moment_Y_{j}");
            }
            for j in 1..=n {
                let _ = write!(s, ",moment_X_{j}");
            }
            for j in 1..=n {
                let _ = write!(s, ",kappa_Y_{j}");
            }
            for j in 1..=n {
                let _ = write!(s, ",kappa_X_{j}");
            }
            s.push_str(",skewness_Y,kurtosis_Y,skewness_X,kurtosis_X\n");
            for row in &rows {
                let _ = write!(s, "{}", row.m);
                for v in row.moments_y.iter().chain(&row.moments_x) {
                    let _ = write!(s, ",{}", fmt_f(to_f64(v)));
                }
                for v in row.cumulants_y.iter().chain(&row.cumulants_x) {
                    let _ = write!(s, ",{}", fmt_f(to_f64(v)));
                }
                let _ = writeln!(
                    s,
                    ",{},{},{},{}",
                    fmt_opt(row.skewness_y),
                    fmt_opt(row.kurtosis_y),
                    fmt_opt(row.skewness_x),
                    fmt_opt(row.kurtosis_x)
                );
            }
            s
        }
        Format::Json => {
            let json_rows: Vec<_> = rows
                .iter()
                .map(|row| {
                    let mut fields = vec![("m".to_string(), serde_json::Value::from(row.m))];
                    for (j, v) in row.moments_y.iter().enumerate() {
                        fields.push((format!("moment_Y_{}", j + 1), to_f64(v).into()));
                    }
                    for (j, v) in row.moments_x.iter().enumerate() {
                        fields.push((format!("moment_X_{}", j + 1), to_f64(v).into()));
                    }
                    for (j, v) in row.cumulants_y.iter().enumerate() {
                        fields.push((format!("kappa_Y_{}", j + 1), to_f64(v).into()));
                    }
                    for (j, v) in row.cumulants_x.iter().enumerate() {
                        fields.push((format!("kappa_X_{}", j + 1), to_f64(v).into()));
                    }
                    fields.push(("skewness_Y".into(), row.skewness_y.into()));
                    fields.push(("kurtosis_Y".into(), row.kurtosis_y.into()));
                    fields.push(("skewness_X".into(), row.skewness_x.into()));
                    fields.push(("kurtosis_X".into(), row.kurtosis_x.into()));
                    json_row(fields)
                })
                .collect();
            format!("{}\n", serde_json::to_string_pretty(&json_rows)?)
        }
    };
    emit(&args.out, &content)?;
    Ok(0)
}

fn compare_csv(rows: &[(String, CompareRow)]) -> String {
    let mut s = String::from("grid,analytic,estimate,stderr,z\n");
    for (label, row) in rows {
        let _ = writeln!(
            s,
            "{label},{},{},{},{}",
            fmt_f(row.analytic),
            fmt_f(row.estimate),
            fmt_f(row.stderr),
            fmt_f(row.z)
        );
    }
    s
}

fn compare_json(rows: &[(String, CompareRow)], pass: bool, sigma: f64) -> Result<String, CliError> {
    let json_rows: Vec<_> = rows
        .iter()
        .map(|(label, row)| {
            json_row(vec![
                ("grid".into(), label.clone().into()),
                ("analytic".into(), row.analytic.into()),
                ("estimate".into(), row.estimate.into()),
                ("stderr".into(), row.stderr.into()),
                ("z".into(), row.z.into()),
                ("pass".into(), row.pass.into()),
            ])
        })
        .collect();
    let doc = json_row(vec![
        ("sigma".into(), sigma.into()),
        ("pass".into(), pass.into()),
        ("rows".into(), serde_json::Value::Array(json_rows)),
    ]);
    Ok(format!("{}\n", serde_json::to_string_pretty(&doc)?))
}

fn cmd_compare(args: CompareArgs) -> Result<u8, CliError> {
    let lambda = parse_positive_lambda(&args.lambda)?;
    let lambda_f = to_f64(&lambda);
    let n = args.n;
    if n == 0 {
        return Err(CliError("compare needs n >= 1".into()));
    }
    if args.format == Format::Symbolic {
        return Err(CliError("compare emits numeric tables; use csv or json".into()));
    }
    let t_flags = args.t_start.is_some() || args.t_stop.is_some() || args.t_step.is_some();
    let m_flags = args.m_start.is_some() || args.m_stop.is_some();
    if t_flags && m_flags {
        return Err(CliError(
            "choose a time grid or an index grid, not both".into(),
        ));
    }

    let (labeled, pass, sigma) = if m_flags {
        // Embedded chains: both Y(m) and X(m) cumulants on an index grid.
        let m_start = args.m_start.unwrap_or(1);
        let m_stop = args.m_stop.unwrap_or(10);
        if m_start == 0 || m_stop < m_start {
            return Err(CliError("index grid must be nonempty and start at 1".into()));
        }
        let indices: Vec<usize> = (m_start..=m_stop).collect();
        let mut table_y = Vec::new();
        let mut table_x = Vec::new();
        for &m in &indices {
            let spec = EmbeddedSpec::uniform(lambda.clone(), m, n)?;
            let cy = cumulants_embedded(&spec, Chain::Y, n)?;
            let cx = cumulants_embedded(&spec, Chain::X, n)?;
            table_y.push(gc_moments::mc::GridValues {
                grid: m as f64,
                values: cy.cumulants.iter().map(to_f64).collect(),
            });
            table_x.push(gc_moments::mc::GridValues {
                grid: m as f64,
                values: cx.cumulants.iter().map(to_f64).collect(),
            });
        }
        let mut config = SimConfig::new(lambda_f, Grid::Indices(indices), args.samples, args.seed);
        config.n_max = n;
        let est = simulate_embedded(&config)?;
        for w in est.y.warnings.iter().chain(&est.x.warnings) {
            eprintln!("gc-moments: warning: {w}");
        }
        let report_y = compare(&table_y, &est.y, args.sigma)?;
        let report_x = compare(&table_x, &est.x, args.sigma)?;
        let mut labeled = Vec::new();
        for row in report_y.rows {
            let label = format!("Y(m={})/{}", row.grid as usize, row.statistic);
            labeled.push((label, row));
        }
        for row in report_x.rows {
            let label = format!("X(m={})/{}", row.grid as usize, row.statistic);
            labeled.push((label, row));
        }
        (labeled, report_y.pass && report_x.pass, args.sigma)
    } else {
        // Continuous process: X_t cumulants on a time grid.
        let grid = time_grid(
            args.t_start.unwrap_or(0.5),
            args.t_stop.unwrap_or(5.0),
            args.t_step.unwrap_or(0.5),
        )?;
        let spec = GrowthSpec::uniform(lambda.clone(), n)?;
        let kappas = cumulants_x(&spec, n)?;
        let analytic: Vec<_> = grid
            .iter()
            .map(|&t| gc_moments::mc::GridValues {
                grid: t,
                values: kappas.iter().map(|k| k.eval(t)).collect(),
            })
            .collect();
        let mut config = SimConfig::new(lambda_f, Grid::Times(grid), args.samples, args.seed);
        config.n_max = n;
        let est = simulate_gc(&config)?;
        for w in &est.warnings {
            eprintln!("gc-moments: warning: {w}");
        }
        let report = compare(&analytic, &est, args.sigma)?;
        let labeled = report
            .rows
            .into_iter()
            .map(|row| (format!("t={}/{}", row.grid, row.statistic), row))
            .collect();
        (labeled, report.pass, args.sigma)
    };

    let content = match args.format {
        Format::Csv => compare_csv(&labeled),
        Format::Json => compare_json(&labeled, pass, sigma)?,
        Format::Symbolic => unreachable!("rejected above"),
    };
    emit(&args.out, &content)?;
    Ok(if pass { 0 } else { 1 })
}
