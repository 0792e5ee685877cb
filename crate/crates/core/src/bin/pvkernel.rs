use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use pvkernel::experiments::{self, ExperimentConfig, GridSpec, Report};
use pvkernel::opq::Precision;
use pvkernel::Error;

/// If set, relative `--out` paths are resolved against this directory.
const OUT_DIR_ENV: &str = "PVKERNEL_OUT_DIR";

#[derive(Parser, Debug)]
#[command(version, about = "Perturbed Laguerre kernels, edge limits and the Painleve V auxiliary function")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    #[arg(long, default_value_t = 1.5, allow_negative_numbers = true)]
    alpha: f64,
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    lambda: f64,
    /// Output CSV path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the pass threshold.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, value_enum, default_value_t = PrecisionArg::Double)]
    precision: PrecisionArg,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum PrecisionArg {
    Double,
    Extended,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq)]
enum HardEdgeMode {
    SmallS,
    LargeS,
    FixedS,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Bulk density against the limiting density.
    Density {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "128")]
        n: String,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        /// Points in (0, 1).
        #[arg(long, default_value = "0.25,0.5,0.75")]
        x_grid: String,
    },
    /// Hard-edge scaling against the Bessel kernels.
    HardEdge {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        mode: HardEdgeMode,
        /// Degree, or a doubling list such as 16,32,64 for fixed-s.
        #[arg(long)]
        n: Option<String>,
        #[arg(long)]
        s: Option<f64>,
        #[arg(long, default_value = "1:8:8", allow_hyphen_values = true)]
        u_grid: String,
        #[arg(long, default_value = "1:8:8", allow_hyphen_values = true)]
        v_grid: String,
        /// (u, v) pairs for fixed-s, as u,v;u,v.
        #[arg(long, default_value = "1,1;1,2;2,4")]
        pairs: String,
        /// s for the finite-n interpolation check in large-s mode.
        #[arg(long, default_value_t = 40.0)]
        interp_s: f64,
    },
    /// Soft-edge scaling against the Airy kernel.
    SoftEdge {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 64)]
        n: usize,
        /// One or more t values, comma separated.
        #[arg(long, default_value = "0.5")]
        t: String,
        #[arg(long, default_value = "-3:-1:3", allow_hyphen_values = true)]
        u_grid: String,
        #[arg(long, default_value = "-3:-1:3", allow_hyphen_values = true)]
        v_grid: String,
    },
    /// Integrate r(s) and dump the trajectory.
    Painleve {
        #[command(flatten)]
        common: Common,
        /// Right end of the s interval.
        #[arg(long, default_value_t = 400.0)]
        s: f64,
        #[arg(long, default_value_t = 1e-3)]
        s0: f64,
        #[arg(long, default_value_t = 4)]
        order: usize,
    },
    /// Algebraic identities on seeded random jets.
    Identities {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        count: usize,
    },
}

fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>, Error> {
    text.split(',')
        .map(|p| p.trim().parse::<T>().map_err(|_| Error::Config(format!("cannot parse {what} '{text}'"))))
        .collect()
}

fn parse_pairs(text: &str) -> Result<Vec<(f64, f64)>, Error> {
    text.split(';')
        .map(|p| match parse_list::<f64>(p, "pair")?.as_slice() {
            [u, v] => Ok((*u, *v)),
            _ => Err(Error::Config(format!("pair '{p}' needs two values"))),
        })
        .collect()
}

fn base(common: &Common) -> ExperimentConfig {
    ExperimentConfig {
        alpha: common.alpha,
        lambda: common.lambda,
        tol: common.tol,
        precision: match common.precision {
            PrecisionArg::Double => Precision::Double,
            PrecisionArg::Extended => Precision::Extended,
        },
        ..ExperimentConfig::default()
    }
}

fn run(command: &Command) -> Result<(Report, Option<PathBuf>), Error> {
    match command {
        Command::Density { common, n, t, x_grid } => {
            let cfg = ExperimentConfig {
                n: parse_list(n, "n")?,
                t: vec![*t],
                ..base(common)
            };
            let xs = x_grid.parse::<GridSpec>()?.0;
            Ok((experiments::density(&cfg, &xs)?, common.out.clone()))
        }
        Command::HardEdge {
            common,
            mode,
            n,
            s,
            u_grid,
            v_grid,
            pairs,
            interp_s,
        } => {
            let default_n = if *mode == HardEdgeMode::FixedS { "16,32,64" } else { "64" };
            let cfg = ExperimentConfig {
                n: parse_list(n.as_deref().unwrap_or(default_n), "n")?,
                s: *s,
                u_grid: u_grid.parse::<GridSpec>()?.0,
                v_grid: v_grid.parse::<GridSpec>()?.0,
                pairs: parse_pairs(pairs)?,
                ..base(common)
            };
            let report = match mode {
                HardEdgeMode::SmallS => experiments::hard_edge_small_s(&cfg)?,
                HardEdgeMode::FixedS => experiments::hard_edge_fixed_s(&cfg)?,
                HardEdgeMode::LargeS => {
                    let mut phi = experiments::hard_edge_large_s(&cfg)?;
                    let interp = experiments::interpolation_check(&cfg, *interp_s, &[1.0, 2.0, 4.0])?;
                    phi.passed &= interp.passed;
                    phi.notes.push(format!(
                        "finite-n diagonal between the two Bessel limits at s = {interp_s}: {}",
                        if interp.passed { "yes" } else { "no" }
                    ));
                    phi.csv = merge_interpolation(&phi.csv, &interp.csv);
                    phi
                }
            };
            Ok((report, common.out.clone()))
        }
        Command::SoftEdge {
            common,
            n,
            t,
            u_grid,
            v_grid,
        } => {
            let cfg = ExperimentConfig {
                n: vec![*n],
                t: parse_list(t, "t")?,
                u_grid: u_grid.parse::<GridSpec>()?.0,
                v_grid: v_grid.parse::<GridSpec>()?.0,
                ..base(common)
            };
            Ok((experiments::soft_edge(&cfg)?, common.out.clone()))
        }
        Command::Painleve { common, s, s0, order } => {
            let cfg = ExperimentConfig {
                s_max: *s,
                s0: *s0,
                order: *order,
                ..base(common)
            };
            Ok((experiments::painleve(&cfg)?, common.out.clone()))
        }
        Command::Identities { common, seed, count } => {
            let cfg = ExperimentConfig {
                seed: *seed,
                count: *count,
                ..base(common)
            };
            Ok((experiments::identities(&cfg)?, common.out.clone()))
        }
    }
}

/// Appends the interpolation rows to the metadata header of the φ-route table.
fn merge_interpolation(phi_csv: &str, interp_csv: &str) -> String {
    let mut out = String::new();
    let mut lines = phi_csv.lines().peekable();
    while let Some(line) = lines.next_if(|l| l.starts_with('#')) {
        out.push_str(line);
        out.push('\n');
    }
    for line in interp_csv.lines().filter(|l| !l.starts_with('#')) {
        out.push_str("# interpolation ");
        out.push_str(line);
        out.push('\n');
    }
    for line in lines {
        out.push_str(line);
        out.push('\n');
    }
    out
}

fn write_csv(csv: &str, out: Option<PathBuf>) -> std::io::Result<()> {
    match out {
        None => std::io::stdout().write_all(csv.as_bytes()),
        Some(path) => {
            let path = match std::env::var_os(OUT_DIR_ENV) {
                Some(dir) if path.is_relative() => PathBuf::from(dir).join(path),
                _ => path,
            };
            std::fs::write(path, csv)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok((report, out)) => {
            if let Err(e) = write_csv(&report.csv, out) {
                eprintln!("error: cannot write output: {e}");
                return ExitCode::from(2);
            }
            eprintln!("{}", report.summary());
            if report.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_singularity() {
                ExitCode::from(3)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
