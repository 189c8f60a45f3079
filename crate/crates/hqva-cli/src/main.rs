mod config;
mod expr;
mod run;
mod tabulate;

use clap::{Parser, Subcommand, ValueEnum};
use config::{DatumSpec, RunConfig};
use hqva::series::{HSeriesJson, Q, Trunc};
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

const EXIT_FAIL: u8 = 1;
const EXIT_CONFIG: u8 = 2;

#[derive(Parser)]
#[command(name = "hqva", version, about = "Exact identity checks for quantum affine vertex algebras")]
struct Cli {
    /// Worker threads (overrides HQVA_THREADS).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run verification suites from a JSON or TOML config and write a JSON report.
    Verify {
        #[arg(long)]
        config: PathBuf,
        /// Restrict to these suites (repeatable).
        #[arg(long = "suite")]
        suites: Vec<String>,
        /// Report path (overrides `output` in the config; stdout when neither is set).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Record per-suite wall time in the report.
        #[arg(long)]
        timings: bool,
    },
    /// Emit exact coefficient tables.
    Tabulate(TabArgs),
    /// Evaluate a series expression, e.g. `f0`, `d(f)/f`, `shift(z^-1, 2)`.
    PrintSeries {
        expr: String,
        #[arg(long, default_value_t = 4)]
        hbar: usize,
        #[arg(long, default_value_t = 8)]
        zcap: i64,
        #[arg(long, value_enum, default_value_t = SeriesFormat::Text)]
        format: SeriesFormat,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Tau,
    Serre,
    Integrability,
    Brackets,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TableFormat {
    Text,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum SeriesFormat {
    Text,
    Json,
}

#[derive(clap::Args)]
struct TabArgs {
    kind: Kind,
    /// Named datum: A1, A2, A1xA1, sym12, sym13.
    #[arg(long, default_value = "A1")]
    datum: String,
    /// Cartan matrix rows, e.g. "2,-1;-1,2" (overrides --datum).
    #[arg(long)]
    matrix: Option<String>,
    #[arg(long)]
    r: Option<i64>,
    #[arg(long, default_value = "1")]
    level: String,
    /// Second level: tabulate the cross-level element instead.
    #[arg(long)]
    level2: Option<String>,
    #[arg(long, default_value_t = 4)]
    hbar: usize,
    #[arg(long, default_value_t = 6)]
    zcap: i64,
    #[arg(long)]
    i: Option<usize>,
    #[arg(long)]
    j: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = 6)]
    kcap: usize,
    #[arg(long, default_value_t = 3)]
    mode_cutoff: usize,
    #[arg(long, value_enum, default_value_t = TableFormat::Text)]
    format: TableFormat,
    /// Write `<kind>.csv` and `<kind>.txt` into this directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn threads(flag: Option<usize>) -> Option<usize> {
    flag.or_else(|| std::env::var("HQVA_THREADS").ok()?.parse().ok())
}

fn config_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_CONFIG)
}

fn level(s: &str) -> Result<Q, String> {
    Q::from_str(s.trim()).map_err(|_| format!("level `{s}` is not a rational"))
}

fn verify(config: PathBuf, suites: Vec<String>, out: Option<PathBuf>, timings: bool, nthreads: Option<usize>) -> ExitCode {
    let cfg = match RunConfig::load(&config) {
        Ok(c) => c,
        Err(e) => return config_error(e),
    };
    let plan = match cfg.plan(&suites) {
        Ok(p) => p,
        Err(e) => return config_error(e),
    };
    let report = hqva::par::with_threads(nthreads, || run::run_suite(&cfg, &plan, timings));
    let json = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    match out.or(cfg.output.clone()) {
        Some(p) => {
            if let Err(e) = std::fs::write(&p, json) {
                eprintln!("error: cannot write {}: {e}", p.display());
                return ExitCode::from(EXIT_FAIL);
            }
        }
        None => print!("{json}"),
    }
    eprint!("{}", run::text_summary(&report));
    if report.all_pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAIL)
    }
}

fn tabulate(a: TabArgs, nthreads: Option<usize>) -> ExitCode {
    let spec = match &a.matrix {
        Some(m) => {
            let rows: Result<Vec<Vec<i64>>, _> = m.split(';').map(|r| r.split(',').map(|x| x.trim().parse::<i64>()).collect()).collect();
            match rows {
                Ok(rows) => DatumSpec { name: None, a: Some(rows), r: a.r },
                Err(_) => return config_error(format!("cannot parse matrix `{m}`")),
            }
        }
        None => DatumSpec { name: Some(a.datum.clone()), a: None, r: a.r },
    };
    let d = match spec.build() {
        Ok(d) => d,
        Err(e) => return config_error(e),
    };
    if a.hbar < 1 || a.zcap < 1 {
        return config_error("hbar and zcap must be positive");
    }
    let built = hqva::par::with_threads(nthreads, || -> Result<tabulate::Table, String> {
        let l = level(&a.level)?;
        match a.kind {
            Kind::Tau => {
                let lp = a.level2.as_deref().map(level).transpose()?;
                tabulate::tau_table(&d, &l, lp.as_ref(), Trunc::new(a.hbar, a.zcap))
            }
            Kind::Serre => {
                let pair = match (a.i, a.j) {
                    (Some(i), Some(j)) => Some((i, j)),
                    (None, None) => None,
                    _ => return Err("give both --i and --j, or neither".into()),
                };
                tabulate::serre_table(&d, pair, a.k, a.kcap, a.hbar)
            }
            Kind::Integrability => tabulate::integrability_table(&d, a.i, a.k, a.kcap, a.hbar),
            Kind::Brackets => tabulate::brackets_table(&d, &l, a.mode_cutoff, a.hbar),
        }
    });
    let table = match built {
        Ok(t) => t,
        Err(e) => return config_error(e),
    };
    match &a.out {
        Some(dir) => {
            let name = a.kind.to_possible_value().expect("not skipped").get_name().to_string();
            let res = std::fs::create_dir_all(dir)
                .and_then(|_| std::fs::write(dir.join(format!("{name}.csv")), table.to_csv()))
                .and_then(|_| std::fs::write(dir.join(format!("{name}.txt")), table.to_text()));
            if let Err(e) = res {
                eprintln!("error: cannot write tables to {}: {e}", dir.display());
                return ExitCode::from(EXIT_FAIL);
            }
        }
        None => match a.format {
            TableFormat::Text => print!("{}", table.to_text()),
            TableFormat::Csv => print!("{}", table.to_csv()),
        },
    }
    ExitCode::SUCCESS
}

fn print_series(src: &str, hbar: usize, zcap: i64, format: SeriesFormat) -> ExitCode {
    match expr::eval(src, Trunc::new(hbar, zcap)) {
        Ok(s) => {
            match format {
                SeriesFormat::Text => print!("{}", expr::render(&s)),
                SeriesFormat::Json => println!("{}", serde_json::to_string(&HSeriesJson::from(&s)).expect("series serializes")),
            }
            ExitCode::SUCCESS
        }
        Err(e) => config_error(e),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let n = threads(cli.threads);
    match cli.cmd {
        Cmd::Verify { config, suites, out, timings } => verify(config, suites, out, timings, n),
        Cmd::Tabulate(a) => tabulate(a, n),
        Cmd::PrintSeries { expr, hbar, zcap, format } => print_series(&expr, hbar, zcap, format),
    }
}
