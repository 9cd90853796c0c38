//! The `adq` command line.
//!
//! Exit codes: 0 success, 1 a verification check failed, 2 bad usage or
//! configuration, 3 a limiting procedure did not converge.

pub mod commands;
pub mod config;
pub mod suites;

use crate::error::AdqError;
use clap::{Args, Parser, Subcommand};
use commands::{Expr, Observable, PortraitGrid};
pub use config::{OutputFormat, RunConfig};
use std::ffi::OsString;
use std::path::PathBuf;
pub use suites::{run_suite, Suite};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CONVERGENCE: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "adq",
    version,
    about = "SU(1,1) covariant integral quantization of the unit disk"
)]
pub struct Cli {
    /// JSON configuration; flags override its fields
    #[arg(long, global = true, env = "ADQ_CONFIG")]
    pub config: Option<PathBuf>,

    #[command(flatten)]
    pub common: CommonArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Default)]
pub struct CommonArgs {
    /// representation label, > 1/2
    #[arg(long, global = true)]
    pub eta: Option<f64>,
    /// truncation dimension N
    #[arg(long, global = true)]
    pub dim: Option<usize>,
    /// perelomov | power:<s> | basis:<m> | half | custom:<file.csv>
    #[arg(long, global = true)]
    pub weight: Option<String>,
    /// reconstruction weight for portraits; defaults to --weight
    #[arg(long, global = true)]
    pub weight2: Option<String>,
    #[arg(long, global = true)]
    pub radial_order: Option<usize>,
    #[arg(long, global = true)]
    pub angular_points: Option<usize>,
    /// output file (a directory for `tables`); stdout when absent
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
    /// seed for the random group elements and fields in the checks
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct ExprArgs {
    /// real part of a custom field, in x, y, r, u = r^2, phi
    #[arg(long)]
    pub expr: Option<String>,
    /// imaginary part of a custom field
    #[arg(long)]
    pub expr_im: Option<String>,
    /// boundary growth order of the custom field: |f| ~ (1-u)^order
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub order: f64,
}

impl ExprArgs {
    fn to_expr(&self) -> Expr {
        Expr {
            re: self.expr.clone(),
            im: self.expr_im.clone(),
            order: self.order,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a verification suite and print a report
    Verify {
        #[arg(value_enum)]
        suite: Suite,
    },
    /// Quantize an observable and print the truncated operator
    Quantize {
        #[arg(value_enum)]
        observable: Observable,
        #[command(flatten)]
        expr: ExprArgs,
    },
    /// Evaluate the portrait of an observable on a polar grid
    Portrait {
        #[arg(value_enum)]
        observable: Observable,
        #[command(flatten)]
        expr: ExprArgs,
        /// number of radii
        #[arg(long, default_value_t = 8)]
        radii: usize,
        /// largest radius
        #[arg(long, default_value_t = 0.9)]
        rmax: f64,
        /// angles per radius
        #[arg(long, default_value_t = 16)]
        angles: usize,
    },
    /// Write the diagonal, gamma, positivity and kappa tables
    Tables {
        #[arg(long, value_delimiter = ',', default_values_t = [1.5, 2.0, 3.0])]
        etas: Vec<f64>,
    },
}

impl CommonArgs {
    pub fn apply(&self, cfg: &mut RunConfig) {
        if let Some(v) = self.eta {
            cfg.eta = v;
        }
        if let Some(v) = self.dim {
            cfg.dim = v;
        }
        if let Some(v) = &self.weight {
            cfg.weight = v.clone();
        }
        if let Some(v) = &self.weight2 {
            cfg.weight2 = Some(v.clone());
        }
        if let Some(v) = self.radial_order {
            cfg.radial_order = v;
        }
        if let Some(v) = self.angular_points {
            cfg.angular_points = v;
        }
        if let Some(v) = &self.out {
            cfg.out = Some(v.clone());
        }
        if let Some(v) = self.format {
            cfg.format = Some(v);
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
    }
}

pub fn exit_code(e: &AdqError) -> i32 {
    if e.is_convergence() {
        EXIT_CONVERGENCE
    } else {
        EXIT_USAGE
    }
}

fn fail(e: AdqError) -> i32 {
    eprintln!("adq: {e}");
    exit_code(&e)
}

pub fn resolve_config(cli: &Cli) -> Result<RunConfig, AdqError> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    cli.common.apply(&mut cfg);
    cfg.validate()?;
    Ok(cfg)
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let cfg = match resolve_config(&cli) {
        Ok(c) => c,
        Err(e) => return fail(e),
    };
    match &cli.command {
        Command::Verify { suite } => {
            let report = run_suite(*suite, &cfg);
            if let Err(e) = commands::write_report(&report, &cfg) {
                return fail(e);
            }
            let count = |s| report.checks.iter().filter(|c| c.status == s).count();
            use crate::report::Status;
            eprintln!(
                "{}: {} passed, {} failed, {} errors, {} skipped",
                report.suite,
                count(Status::Pass),
                count(Status::Fail),
                count(Status::Error),
                count(Status::Skipped)
            );
            if count(Status::Fail) > 0 {
                EXIT_CHECK_FAILED
            } else if report.any_errored() {
                EXIT_CONVERGENCE
            } else {
                EXIT_OK
            }
        }
        Command::Quantize { observable, expr } => {
            match commands::quantize_cmd(&cfg, *observable, &expr.to_expr()) {
                Ok(()) => EXIT_OK,
                Err(e) => fail(e),
            }
        }
        Command::Portrait {
            observable,
            expr,
            radii,
            rmax,
            angles,
        } => {
            let pg = PortraitGrid {
                radii: *radii,
                rmax: *rmax,
                angles: *angles,
            };
            match commands::portrait_cmd(&cfg, *observable, &expr.to_expr(), pg) {
                Ok(()) => EXIT_OK,
                Err(e) => fail(e),
            }
        }
        Command::Tables { etas } => match commands::tables_cmd(&cfg, etas) {
            Ok(paths) => {
                for p in paths {
                    eprintln!("wrote {}", p.display());
                }
                EXIT_OK
            }
            Err(e) => fail(e),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_config() {
        let cli =
            Cli::try_parse_from(["adq", "verify", "repn", "--eta", "3", "--dim", "30"]).unwrap();
        let cfg = resolve_config(&cli).unwrap();
        assert_eq!((cfg.eta, cfg.dim), (3.0, 30));
        assert!(matches!(
            cli.command,
            Command::Verify { suite: Suite::Repn }
        ));
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run(["adq", "verify", "nonsense"]), EXIT_USAGE);
        assert_eq!(run(["adq", "quantize", "k0", "--eta", "0.3"]), EXIT_USAGE);
        assert_eq!(run(["adq", "quantize", "custom"]), EXIT_USAGE);
    }
}
