//! `fdnoma`: sweep rates, outage and fairness over transmit power, and check
//! the closed forms against simulation.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use fdnoma_core::analytic::{rate_from_cdf, AnalyticModel, Tolerance};
use fdnoma_core::config::parse_grid;
use fdnoma_core::montecarlo::{self, fmt_real, run_analytic_sweep, run_sweep, simulate, SweepRow};
use fdnoma_core::{ChannelRealization, ConfigError, ConfigFile, Metric, MetricEstimate, RngSeed, Scheme};

const EXIT_USAGE: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_VALIDATION: u8 = 3;

#[derive(Parser)]
#[command(name = "fdnoma", version, about = "Antenna selection for full-duplex cooperative NOMA")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep metrics over a transmit-power grid and write CSV.
    Sweep(SweepArgs),
    /// Compare closed forms with Monte Carlo; exit 0 only if every check passes.
    Validate(ValidateArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Mc,
    Analytic,
    Both,
}

/// Sweep settings shared by both subcommands; flags override the config file.
#[derive(clap::Args)]
struct SweepOverrides {
    /// Comma-separated scheme names.
    #[arg(long, value_delimiter = ',', value_parser = parse_scheme)]
    schemes: Option<Vec<Scheme>>,
    /// Joint BS/relay transmit power grid in dB: `start:stop:step` or a comma list.
    #[arg(long, value_parser = parse_power)]
    power: Option<Grid>,
    /// Pin the relay SNR (dB) instead of sweeping it with the BS.
    #[arg(long)]
    rho_r_db: Option<f64>,
    /// Monte Carlo trials per grid point; `1e6` and `1_000_000` also work.
    #[arg(long, value_parser = parse_trials)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(clap::Args)]
struct SweepArgs {
    /// `key = value` configuration file; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Mode::Mc)]
    mode: Mode,
    /// Comma-separated: rates, outage, jain.
    #[arg(long, value_delimiter = ',', value_parser = parse_metric)]
    metrics: Option<Vec<Metric>>,
    #[command(flatten)]
    sweep: SweepOverrides,
    /// CSV destination; stdout when omitted.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// In `both` mode, where to write the Monte Carlo vs analytic comparison
    /// (stderr when omitted).
    #[arg(long)]
    report: Option<PathBuf>,
    /// Write the first N channel realizations of the first grid point here.
    #[arg(long, requires = "dump_count")]
    dump: Option<PathBuf>,
    #[arg(long, requires = "dump")]
    dump_count: Option<u64>,
}

#[derive(clap::Args)]
struct ValidateArgs {
    config: PathBuf,
    #[command(flatten)]
    sweep: SweepOverrides,
    /// Largest accepted |z| between simulation and closed form.
    #[arg(long, default_value_t = 3.0)]
    z_limit: f64,
}

fn parse_scheme(s: &str) -> Result<Scheme, String> {
    s.parse().map_err(|e: fdnoma_core::selection::UnknownScheme| e.to_string())
}

fn parse_metric(s: &str) -> Result<Metric, String> {
    s.parse().map_err(|e: ConfigError| e.to_string())
}

fn parse_trials(s: &str) -> Result<u64, String> {
    s.replace('_', "")
        .parse::<f64>()
        .ok()
        .filter(|t| *t >= 1.0 && t.fract() == 0.0 && *t <= u64::MAX as f64)
        .map(|t| t as u64)
        .ok_or_else(|| format!("`{s}` is not a positive integer"))
}

/// A parsed power grid; one CLI value expands to many points.
#[derive(Clone)]
struct Grid(Vec<f64>);

fn parse_power(s: &str) -> Result<Grid, String> {
    parse_grid(s).map(Grid).map_err(|e| e.to_string())
}

enum Failure {
    Config(String),
    Validation,
    Io(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Sweep(a) => sweep(a),
        Command::Validate(a) => validate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Validation) => ExitCode::from(EXIT_VALIDATION),
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn load(path: Option<&PathBuf>, o: &SweepOverrides) -> Result<ConfigFile, ConfigError> {
    let mut cfg = match path {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    if let Some(s) = &o.schemes {
        cfg.sweep.schemes = s.clone();
    }
    if let Some(p) = &o.power {
        cfg.sweep.power_db = p.0.clone();
    }
    if o.rho_r_db.is_some() {
        cfg.sweep.rho_r_db = o.rho_r_db;
    }
    if let Some(t) = o.trials {
        cfg.sweep.trials = t;
    }
    if let Some(s) = o.seed {
        cfg.sweep.seed = s;
    }
    cfg.params = cfg.params.validate()?;
    cfg.sweep = cfg.sweep.validate()?;
    Ok(cfg)
}

fn open(path: Option<&PathBuf>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn sweep(a: SweepArgs) -> Result<(), Failure> {
    let mut cfg = load(a.config.as_ref(), &a.sweep)?;
    if let Some(m) = &a.metrics {
        cfg.sweep.metrics = m.clone();
    }
    let ConfigFile { params, sweep } = &cfg;

    if let (Some(path), Some(count)) = (&a.dump, a.dump_count) {
        let p = sweep.params_at(params, sweep.power_db[0]);
        let mut out = open(Some(path))?;
        let mut real = ChannelRealization::zeros(&p);
        writeln!(out, "{}", real.csv_header())?;
        for t in 0..count {
            real.redraw(&p, RngSeed::new(sweep.seed, t));
            writeln!(out, "{}", real.csv_row(t))?;
        }
        out.flush()?;
    }

    let mc = if a.mode != Mode::Analytic { run_sweep(params, sweep)? } else { Vec::new() };
    let analytic = if a.mode != Mode::Mc {
        let (rows, skipped) = run_analytic_sweep(params, sweep)?;
        for s in skipped {
            eprintln!("note: analytic {s}");
        }
        rows
    } else {
        Vec::new()
    };

    let rows: Vec<SweepRow> = mc.iter().chain(&analytic).cloned().collect();
    let mut out = open(a.output.as_ref())?;
    montecarlo::write_csv(&mut out, &rows, &sweep.metrics)?;
    out.flush()?;

    if a.mode == Mode::Both {
        let mut rep: Box<dyn Write> = match &a.report {
            Some(p) => Box::new(BufWriter::new(File::create(p)?)),
            None => Box::new(io::stderr().lock()),
        };
        write_comparison(&mut rep, &mc, &analytic, &sweep.metrics)?;
        rep.flush()?;
    }
    Ok(())
}

fn metric_pairs(r: &SweepRow) -> [(Metric, &'static str, MetricEstimate); 6] {
    let m = &r.metrics;
    [
        (Metric::Rates, "rate_u1", m.rate_u1),
        (Metric::Rates, "rate_u2", m.rate_u2),
        (Metric::Rates, "rate_sum", m.rate_sum),
        (Metric::Outage, "outage_u1", m.outage_u1),
        (Metric::Outage, "outage_u2", m.outage_u2),
        (Metric::Jain, "jain", m.jain_index),
    ]
}

/// One line per (power, scheme, metric) present in both tables.
fn write_comparison(
    out: &mut dyn Write,
    mc: &[SweepRow],
    analytic: &[SweepRow],
    metrics: &[Metric],
) -> io::Result<()> {
    writeln!(out, "power_db,scheme,metric,monte_carlo,monte_carlo_se,analytic,rel_diff")?;
    for a in analytic {
        let Some(m) = mc.iter().find(|m| m.scheme == a.scheme && m.power_db == a.power_db) else {
            continue;
        };
        for ((kind, name, x), (_, _, y)) in metric_pairs(m).into_iter().zip(metric_pairs(a)) {
            if !metrics.contains(&kind) {
                continue;
            }
            let rel = if x.value == y.value { 0.0 } else { (x.value - y.value).abs() / y.value.abs() };
            writeln!(
                out,
                "{},{},{name},{},{},{},{}",
                fmt_real(a.power_db),
                a.scheme,
                fmt_real(x.value),
                fmt_real(x.std_error),
                fmt_real(y.value),
                fmt_real(rel)
            )?;
        }
    }
    Ok(())
}

struct Check {
    name: String,
    detail: String,
    pass: bool,
}

fn validate(a: ValidateArgs) -> Result<(), Failure> {
    let cfg = load(Some(&a.config), &a.sweep)?;
    let ConfigFile { params, sweep } = &cfg;
    let mut checks = Vec::new();
    let schemes = [Scheme::MaxU1Analytic, Scheme::MaxU2Decoupled];
    for &db in &sweep.power_db {
        let p = sweep.params_at(params, db).validate()?;
        let model = AnalyticModel::new(&p).map_err(|e| Failure::Config(e.to_string()))?;
        let tol = Tolerance::tight();

        let closed = [model.rate_u1_max_u1(), model.rate_u1_max_u2()];
        let quad = [
            rate_from_cdf(|x| model.cdf_gamma1_max_u1(x), None, tol),
            rate_from_cdf(|x| model.cdf_gamma1_max_u2(x), None, tol),
        ];
        for ((s, c), q) in schemes.iter().zip(closed).zip(quad) {
            let (pass, detail) = match (c, q) {
                (Ok(c), Ok(q)) => {
                    let rel = (c - q.value).abs() / q.value.abs().max(f64::MIN_POSITIVE);
                    (rel <= 1e-8, format!("rel diff {rel:.2e} (limit 1e-8)"))
                }
                (c, q) => (false, format!("closed form {c:?}, quadrature {q:?}")),
            };
            checks.push(Check { name: format!("{db} dB {s} rate_u1 closed form vs quadrature"), detail, pass });
        }

        let sim = simulate(&p, &schemes, sweep.trials, sweep.seed);
        for (s, m) in schemes.iter().zip(&sim) {
            let exact = montecarlo::analytic_metrics(&p, *s).map_err(|e| Failure::Config(e.to_string()))?;
            for (name, mc, an, binomial) in [
                ("rate_u1", m.rate_u1, exact.rate_u1.value, false),
                ("rate_u2", m.rate_u2, exact.rate_u2.value, false),
                ("outage_u1", m.outage_u1, exact.outage_u1.value, true),
                ("outage_u2", m.outage_u2, exact.outage_u2.value, true),
            ] {
                // outage uses the closed-form p for its binomial error so
                // zero observed events still give a finite z
                let se = if binomial { (an * (1.0 - an) / mc.trials as f64).sqrt() } else { mc.std_error };
                let z = if mc.value == an { 0.0 } else if se == 0.0 { f64::INFINITY } else { (mc.value - an).abs() / se };
                checks.push(Check {
                    name: format!("{db} dB {s} {name}"),
                    detail: format!("mc {:.6e} analytic {an:.6e} z {z:.2}", mc.value),
                    pass: z <= a.z_limit,
                });
            }
        }
    }

    let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
    for c in &checks {
        println!("{} {:width$}  {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    let failed = checks.iter().filter(|c| !c.pass).count();
    println!("{} checks, {failed} failed ({} trials, seed {})", checks.len(), sweep.trials, sweep.seed);
    if failed == 0 { Ok(()) } else { Err(Failure::Validation) }
}
