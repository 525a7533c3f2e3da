use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use lcp_bench::{
    format_summary, parse_solvers, run_ave, run_obstacle, run_ode, run_random_lcp, to_csv, AveMode,
    BenchRow, ObstacleShape, Solver, AVE_SOLVERS, LCP_SOLVERS,
};
use smoothlcp::{SolverOptions, DEFAULT_RHO};

#[derive(Parser)]
#[command(
    name = "lcp-bench",
    version,
    about = "Benchmarks for the smoothing-Newton LCP solvers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Base seed; instance i uses seed + i.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Stopping tolerance.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Weight ρ of the soft-max system.
    #[arg(long, default_value_t = DEFAULT_RHO)]
    rho: f64,
    /// Output file (CSV) or prefix for plot data; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn options(&self) -> Result<SolverOptions> {
        let o = SolverOptions {
            tol: self.tol,
            rho: self.rho,
            ..Default::default()
        };
        o.validate()?;
        Ok(o)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Unique,
    General,
}

#[derive(Clone, Copy, ValueEnum)]
enum ShapeArg {
    ThreeBump,
    Zero,
}

#[derive(Subcommand)]
enum Command {
    /// Random P-matrix LCPs.
    RandomLcp {
        /// Problem sizes, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "32")]
        n: Vec<usize>,
        #[arg(long, default_value_t = 20)]
        instances: usize,
        /// Any of tlcp, soft, tlcp2, ipm.
        #[arg(long, default_value = "tlcp,soft")]
        solvers: String,
        #[command(flatten)]
        common: Common,
    },
    /// Finite-difference obstacle problem; writes `<out>.csv` and `<out>_<solver>.dat` (x u g).
    Obstacle {
        /// Interior grid points.
        #[arg(long, default_value_t = 50)]
        n: usize,
        #[arg(long, value_enum, default_value = "three-bump")]
        obstacle: ShapeArg,
        #[arg(long, default_value = "tlcp,soft")]
        solvers: String,
        #[command(flatten)]
        common: Common,
    },
    /// Second-order ODE with |x|; writes `<out>.csv` and `<out>_<solver>.dat` (t x_lcp x_rk4).
    Ode {
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long, default_value = "tlcp,soft")]
        solvers: String,
        #[command(flatten)]
        common: Common,
    },
    /// Absolute value equations through their LCP form.
    Ave {
        #[arg(long, value_enum, default_value = "unique")]
        mode: ModeArg,
        #[arg(long, default_value_t = 32)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        instances: usize,
        /// Any of gn, tlcp, soft.
        #[arg(long, default_value = "gn,tlcp,soft")]
        solvers: String,
        #[command(flatten)]
        common: Common,
    },
}

fn solvers(list: &str, allowed: &[Solver]) -> Result<Vec<Solver>> {
    parse_solvers(list, allowed).map_err(anyhow::Error::msg)
}

fn write_out(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// CSV to `out` (taken literally or as `<out>.csv`) or stdout.
fn emit_csv(out: Option<&Path>, as_prefix: bool, rows: &[BenchRow]) -> Result<()> {
    let csv = to_csv(rows);
    match out {
        Some(p) if as_prefix => write_out(&with_suffix(p, ".csv"), &csv),
        Some(p) => write_out(p, &csv),
        None => {
            print!("{csv}");
            Ok(())
        }
    }
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::RandomLcp {
            n,
            instances,
            solvers: list,
            common,
        } => {
            let solvers = solvers(&list, LCP_SOLVERS)?;
            let rows = run_random_lcp(&n, instances, &solvers, common.seed, &common.options()?)?;
            emit_csv(common.out.as_deref(), false, &rows)?;
            eprint!("{}", format_summary(&rows));
        }
        Command::Obstacle {
            n,
            obstacle,
            solvers: list,
            common,
        } => {
            let solvers = solvers(&list, LCP_SOLVERS)?;
            let shape = match obstacle {
                ShapeArg::ThreeBump => ObstacleShape::ThreeBump,
                ShapeArg::Zero => ObstacleShape::Zero,
            };
            let (rows, profiles) = run_obstacle(n, shape, &solvers, &common.options()?)?;
            emit_csv(common.out.as_deref(), true, &rows)?;
            for (row, p) in rows.iter().zip(&profiles) {
                if let Some(prefix) = &common.out {
                    write_out(
                        &with_suffix(prefix, &format!("_{}.dat", p.solver.name())),
                        &p.to_dat(),
                    )?;
                }
                eprintln!(
                    "{}: {} contacts {} min(u-g) {:e}",
                    row.solver, row.status, p.contacts, p.min_gap
                );
            }
        }
        Command::Ode {
            n,
            solvers: list,
            common,
        } => {
            let solvers = solvers(&list, LCP_SOLVERS)?;
            let (rows, trajectories) = run_ode(n, &solvers, &common.options()?)?;
            emit_csv(common.out.as_deref(), true, &rows)?;
            for (row, t) in rows.iter().zip(&trajectories) {
                if let Some(prefix) = &common.out {
                    write_out(
                        &with_suffix(prefix, &format!("_{}.dat", t.solver.name())),
                        &t.to_dat(),
                    )?;
                }
                eprintln!(
                    "{}: {} sup gap to RK4 {:e}",
                    row.solver, row.status, t.sup_gap
                );
            }
        }
        Command::Ave {
            mode,
            n,
            instances,
            solvers: list,
            common,
        } => {
            let solvers = solvers(&list, AVE_SOLVERS)?;
            let mode = match mode {
                ModeArg::Unique => AveMode::Unique,
                ModeArg::General => AveMode::General,
            };
            let (rows, summaries) = run_ave(
                mode,
                n,
                instances,
                &solvers,
                common.seed,
                &common.options()?,
            )?;
            emit_csv(common.out.as_deref(), false, &rows)?;
            for s in summaries {
                eprintln!("{s}");
            }
        }
    }
    Ok(())
}
