use std::collections::BTreeMap;
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use icb::fme::{self, LinearSystem, Pruning, SumRate};
use icb::sweep::{self, BoundsOptions, SweepConfig};
use icb::verify::{self, Suite, VerifyScale};
use icb::{ChannelParams, Error, OptimizerConfig};

const CONFIG_KEYS: &[&str] = &[
    "p", "c", "p-min", "p-max", "p-steps", "c-min", "c-max", "c-steps", "p0-steps", "seed", "tol", "out", "suite",
];

#[derive(Parser)]
#[command(name = "icb", version, about = "Sum-capacity bounds for the two-user Gaussian interference channel")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Default)]
struct Common {
    /// `key = value` file; command-line flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Gap (bits) below which the bounds count as matched.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long = "P0-steps")]
    p0_steps: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Lower and upper bound at one (P, c).
    Bounds {
        #[arg(long = "P", allow_negative_numbers = true)]
        p: Option<f64>,
        #[arg(long = "c", allow_negative_numbers = true)]
        c: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Bounds over a (P, c) grid, written as CSV.
    Sweep {
        #[arg(long = "P-min")]
        p_min: Option<f64>,
        #[arg(long = "P-max")]
        p_max: Option<f64>,
        #[arg(long = "P-steps")]
        p_steps: Option<usize>,
        #[arg(long = "c-min")]
        c_min: Option<f64>,
        #[arg(long = "c-max")]
        c_max: Option<f64>,
        #[arg(long = "c-steps")]
        c_steps: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Randomized property checks: identities, regions, optimizer, fme or all.
    Verify {
        #[arg(long)]
        suite: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Fourier–Motzkin projection of a linear system read from a file or stdin.
    Fme {
        file: Option<PathBuf>,
        /// Comma-separated variables to eliminate, in order.
        #[arg(long, value_delimiter = ',')]
        eliminate: Vec<String>,
        /// Comma-separated variables whose sum is maximised.
        #[arg(long, value_delimiter = ',')]
        maximize: Vec<String>,
    },
}

enum Failure {
    Verify,
    Usage(String),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(io) => Failure::Io(io.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

struct Settings {
    file: BTreeMap<String, String>,
}

impl Settings {
    fn load(path: Option<&PathBuf>) -> Result<Self, Failure> {
        let Some(path) = path else { return Ok(Self { file: BTreeMap::new() }) };
        let text = std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
        let file = sweep::parse_config(&text)?;
        if let Some(bad) = file.keys().find(|k| !CONFIG_KEYS.contains(&k.as_str())) {
            return Err(Failure::Usage(format!("unknown config key `{bad}`")));
        }
        Ok(Self { file })
    }

    fn get<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, Failure> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.file.get(key) {
            Some(v) => v.parse().map(Some).map_err(|_| Failure::Usage(format!("bad value `{v}` for `{key}`"))),
            None => Ok(None),
        }
    }

    fn or<T: FromStr>(&self, flag: Option<T>, key: &str, default: T) -> Result<T, Failure> {
        Ok(self.get(flag, key)?.unwrap_or(default))
    }
}

fn bounds_options(s: &Settings, common: &Common) -> Result<BoundsOptions, Failure> {
    let d = BoundsOptions::default();
    Ok(BoundsOptions {
        p0_steps: s.or(common.p0_steps, "p0-steps", d.p0_steps)?,
        match_tol: s.or(common.tol, "tol", d.match_tol)?,
        optimizer: OptimizerConfig { seed: s.or(common.seed, "seed", 0)?, ..d.optimizer },
    })
}

fn io_err(path: &std::path::Path, e: std::io::Error) -> Failure {
    Failure::Io(format!("{}: {e}", path.display()))
}

fn run(cmd: Cmd) -> Result<(), Failure> {
    let threads = sweep::threads_from_env()?;
    match cmd {
        Cmd::Bounds { p, c, common } => {
            let s = Settings::load(common.config.as_ref())?;
            let p = s.get(p, "p")?.ok_or_else(|| Failure::Usage("--P is required".into()))?;
            let c = s.get(c, "c")?.ok_or_else(|| Failure::Usage("--c is required".into()))?;
            let ch = ChannelParams::new(p, c)?;
            let opts = bounds_options(&s, &common)?;
            let report = sweep::with_threads(threads, || sweep::bounds_report(&ch, &opts))??;
            print!("{}", sweep::format_report(&report));
            if let Some(out) = s.get(common.out, "out")? {
                let csv = format!("{}\n{}\n", sweep::CSV_HEADER, sweep::csv_row(&report));
                std::fs::write(&out, csv).map_err(|e| io_err(&out, e))?;
            }
        }
        Cmd::Sweep { p_min, p_max, p_steps, c_min, c_max, c_steps, common } => {
            let s = Settings::load(common.config.as_ref())?;
            let d = SweepConfig::default();
            let cfg = SweepConfig {
                p_min: s.or(p_min, "p-min", d.p_min)?,
                p_max: s.or(p_max, "p-max", d.p_max)?,
                p_steps: s.or(p_steps, "p-steps", d.p_steps)?,
                c_min: s.or(c_min, "c-min", d.c_min)?,
                c_max: s.or(c_max, "c-max", d.c_max)?,
                c_steps: s.or(c_steps, "c-steps", d.c_steps)?,
                bounds: bounds_options(&s, &common)?,
                out: None,
            };
            let csv = sweep::sweep_csv(&cfg, threads)?;
            match s.get(common.out, "out")? {
                Some(out) => std::fs::write(&out, csv).map_err(|e| io_err(&out, e))?,
                None => print!("{csv}"),
            }
        }
        Cmd::Verify { suite, common } => {
            let s = Settings::load(common.config.as_ref())?;
            let suite: Suite = s.or(suite, "suite", "all".to_string())?.parse()?;
            let seed = s.or(common.seed, "seed", 0)?;
            let results = sweep::with_threads(threads, || verify::run_suite(suite, seed, &VerifyScale::default()))?;
            let mut all = true;
            for r in &results {
                println!("{r}");
                all &= r.passed();
            }
            if !all {
                return Err(Failure::Verify);
            }
        }
        Cmd::Fme { file, eliminate, maximize } => {
            let text = match &file {
                Some(path) => std::fs::read_to_string(path).map_err(|e| io_err(path, e))?,
                None => {
                    let mut buf = String::new();
                    std::io::stdin().read_to_string(&mut buf).map_err(|e| Failure::Io(e.to_string()))?;
                    buf
                }
            };
            let sys = LinearSystem::from_str(&text)?;
            if !eliminate.is_empty() {
                let vars: Vec<&str> = eliminate.iter().map(String::as_str).collect();
                let p = fme::eliminate_sequence(&sys, &vars, Pruning::default())?;
                print!("{}", p.system);
                eprintln!("eliminated {}; {} redundant rows removed", p.eliminated.join(", "), p.redundant_removed);
            }
            if !maximize.is_empty() {
                let vars: Vec<&str> = maximize.iter().map(String::as_str).collect();
                match fme::max_sum_rate(&sys, &vars)? {
                    SumRate::Bounded(v) => println!("max {} = {} ({})", vars.join(" + "), v, fme::to_f64(&v)),
                    SumRate::Unbounded => println!("max {} = unbounded", vars.join(" + ")),
                    SumRate::Infeasible => println!("infeasible"),
                }
            }
            if eliminate.is_empty() && maximize.is_empty() {
                print!("{sys}");
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verify) => ExitCode::from(1),
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Io(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
    }
}
