use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use rigtv::diagnostics::{OracleMode, Statistic};
use rigtv::experiments::{
    cmd_exact_tv, cmd_lemma_oracle, cmd_mc, cmd_regimes, parse_float_grid, parse_int_grid, ExperimentConfig, Format,
    McMode, PGrid, Report, Versus,
};
use rigtv::{exec, models, Error, Graph};

/// Exact and Monte-Carlo comparisons of random intersection graphs with
/// binomial random graphs.
#[derive(Parser, Debug)]
#[command(name = "rigtv", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Vertex counts: list "4,5" or range "3:6:+1"
    #[arg(long, global = true, default_value = "4")]
    n: String,
    /// Feature counts: list or range such as "1e2:1e6:x10"
    #[arg(long, global = true, default_value = "100")]
    m: String,
    /// Feature probabilities: list, range, or an expression like "m^-0.5"
    #[arg(long, global = true, default_value = "0.1")]
    p: String,
    /// Target p2 values; solves p per (n, m) and overrides --p
    #[arg(long, global = true)]
    p2: Option<String>,
    #[arg(long, global = true, default_value_t = 1000)]
    trials: u64,
    /// Master seed (required by `mc`)
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file (default stdout)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, default_value = "csv", value_parser = ["csv", "json"])]
    format: String,
    /// Worker threads, 0 for all cores
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Largest n for exact distributions (7, or 8 with about 6 GB peak memory)
    #[arg(long, global = true, default_value_t = 7, value_parser = clap::value_parser!(u8).range(2..=8))]
    exact_cap: u8,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact total variation distances on every graph of a small vertex set
    ExactTv,
    /// Monte-Carlo experiments
    Mc {
        #[arg(value_parser = ["couple", "stats", "class-prob", "tv-lower"])]
        mode: String,
        /// Statistic for tv-lower: edges, triangles, k4, diamonds
        #[arg(long, default_value = "triangles")]
        statistic: String,
        /// Second model for tv-lower: phat or clique-cover
        #[arg(long, default_value = "phat")]
        versus: String,
        /// CSV of per-trial coupling records (couple mode)
        #[arg(long)]
        trial_log: Option<PathBuf>,
    },
    /// Regime tags and boundaries over the (m, p) grid
    Regimes,
    /// Brute-force counts of edge-disjoint triangle or K4 families
    LemmaOracle {
        /// Largest family size
        #[arg(long, default_value_t = 3)]
        t: usize,
        #[arg(long, default_value = "triangles")]
        mode: String,
        /// Single graph "n=<n>;mask=<hex>"; default is every graph on --n
        #[arg(long)]
        graph: Option<String>,
    },
}

enum Failure {
    Usage(String),
    Invariant(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Numerical(_) => Failure::Invariant(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

fn config(cli: &Cli) -> Result<ExperimentConfig, Error> {
    let mut cfg = ExperimentConfig {
        n: parse_int_grid(&cli.n)?,
        m: parse_int_grid(&cli.m)?,
        p: PGrid::parse(&cli.p)?,
        p2: cli.p2.as_deref().map(parse_float_grid).transpose()?,
        trials: cli.trials,
        seed: cli.seed,
        exact_cap: usize::from(cli.exact_cap),
        ..Default::default()
    };
    match &cli.command {
        Command::Mc {
            statistic,
            versus,
            trial_log,
            ..
        } => {
            cfg.statistic = statistic.parse::<Statistic>()?;
            cfg.versus = versus.parse::<Versus>()?;
            cfg.keep_trial_log = trial_log.is_some();
        }
        Command::LemmaOracle { t, mode, graph } => {
            cfg.t = *t;
            cfg.mode = mode.parse::<OracleMode>()?;
            cfg.graph = graph.as_deref().map(str::parse::<Graph>).transpose()?;
        }
        Command::ExactTv | Command::Regimes => {}
    }
    Ok(cfg)
}

fn warn_far_from_asymptotic(cfg: &ExperimentConfig) {
    for &n in &cfg.n {
        for &m in &cfg.m {
            let (nf, mf) = (n as f64, m as f64);
            if mf.ln() - 4.0 * nf.ln() <= 3.0 {
                let eps = models::epsilon(nf, mf)
                    .map(|e| format!("{e:.4}"))
                    .unwrap_or_else(|_| "undefined".into());
                eprintln!("note: n={n} m={m} has m <= e^3 n^4 (epsilon {eps})");
            }
        }
    }
}

fn open(path: &Option<PathBuf>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let cfg = config(cli)?;
    let format: Format = cli.format.parse()?;
    if matches!(cli.command, Command::Mc { .. } | Command::Regimes) {
        warn_far_from_asymptotic(&cfg);
    }
    let report: Report = exec::with_threads(cli.threads, || match &cli.command {
        Command::ExactTv => cmd_exact_tv(&cfg),
        Command::Mc { mode, .. } => mode.parse::<McMode>().and_then(|m| cmd_mc(&cfg, m)),
        Command::Regimes => cmd_regimes(&cfg),
        Command::LemmaOracle { .. } => cmd_lemma_oracle(&cfg),
    })?;
    let io_fail = |e: io::Error| Failure::Usage(format!("cannot write output: {e}"));
    let mut out = open(&cli.out).map_err(io_fail)?;
    report.table.write(format, &mut out)?;
    out.flush().map_err(io_fail)?;
    if let Command::Mc {
        trial_log: Some(path), ..
    } = &cli.command
    {
        let file = File::create(path).map_err(io_fail)?;
        report.write_trial_log(BufWriter::new(file))?;
    }
    if !report.violations.is_empty() {
        return Err(Failure::Invariant(report.violations.join("\n")));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invariant(msg)) => {
            eprintln!("invariant violated:\n{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
