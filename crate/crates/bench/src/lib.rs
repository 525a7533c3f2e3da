//! Experiment drivers behind the `lcp-bench` binary.
//!
//! Every driver returns [`BenchRow`]s in a deterministic order (instance seed,
//! then the order in which solvers were requested) even though instances are
//! solved in parallel.

use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;
use smoothlcp::baselines::{solve_gn_ave, solve_ipm, IPM_LABEL};
use smoothlcp::problems::{
    build_obstacle, build_obstacle_with, build_ode_lcp, gen_ave_general, gen_ave_unique,
    gen_pmatrix_lcp, rk4_reference, solve_ave_via_lcp, sup_gap, PlantedAve, Rng, AVE_FAILURE_TOL,
};
use smoothlcp::{solve, LcpError, LcpProblem, MethodKind, SolveReport, SolverOptions};

pub const CSV_HEADER: &str =
    "family,n,solver,comp_err,feas_err,r_final,iterations,time_s,status,seed";

/// One (instance, solver) result.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub family: String,
    pub n: usize,
    pub solver: String,
    pub comp_err: f64,
    pub feas_err: f64,
    pub r_final: f64,
    pub iterations: usize,
    pub time_s: f64,
    pub status: String,
    pub seed: u64,
}

impl BenchRow {
    fn from_report(family: &str, n: usize, solver: Solver, rep: &SolveReport, seed: u64) -> Self {
        Self {
            family: family.to_string(),
            n,
            solver: solver.label().to_string(),
            comp_err: rep.comp_err,
            feas_err: rep.feas_err,
            r_final: rep.r_final,
            iterations: rep.iterations,
            time_s: rep.wall_time.as_secs_f64(),
            status: rep.status.to_string(),
            seed,
        }
    }

    pub fn converged(&self) -> bool {
        self.status == "Converged"
    }

    pub fn to_csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{:.6},{},{}",
            self.family,
            self.n,
            self.solver,
            self.comp_err,
            self.feas_err,
            self.r_final,
            self.iterations,
            self.time_s,
            self.status,
            self.seed
        )
    }
}

pub fn to_csv(rows: &[BenchRow]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in rows {
        s.push_str(&r.to_csv_line());
        s.push('\n');
    }
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Solver {
    Tlcp,
    Soft,
    Tlcp2,
    Ipm,
    Gn,
}

impl Solver {
    pub fn name(self) -> &'static str {
        match self {
            Solver::Tlcp => "tlcp",
            Solver::Soft => "soft",
            Solver::Tlcp2 => "tlcp2",
            Solver::Ipm => "ipm",
            Solver::Gn => "gn",
        }
    }

    /// Value written to the `solver` column.
    pub fn label(self) -> &'static str {
        match self {
            Solver::Ipm => IPM_LABEL,
            s => s.name(),
        }
    }

    fn method(self) -> Option<MethodKind> {
        match self {
            Solver::Tlcp => Some(MethodKind::Tlcp),
            Solver::Soft => Some(MethodKind::SoftLcp),
            Solver::Tlcp2 => Some(MethodKind::Tlcp2),
            Solver::Ipm | Solver::Gn => None,
        }
    }
}

impl FromStr for Solver {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "tlcp" => Ok(Solver::Tlcp),
            "soft" => Ok(Solver::Soft),
            "tlcp2" => Ok(Solver::Tlcp2),
            "ipm" => Ok(Solver::Ipm),
            "gn" => Ok(Solver::Gn),
            other => Err(format!("unknown solver `{other}`")),
        }
    }
}

pub const LCP_SOLVERS: &[Solver] = &[Solver::Tlcp, Solver::Soft, Solver::Tlcp2, Solver::Ipm];
pub const AVE_SOLVERS: &[Solver] = &[Solver::Gn, Solver::Tlcp, Solver::Soft];

/// Parses a comma list and checks it against `allowed`.
pub fn parse_solvers(list: &str, allowed: &[Solver]) -> Result<Vec<Solver>, String> {
    let mut out = Vec::new();
    for item in list.split(',').filter(|s| !s.trim().is_empty()) {
        let s: Solver = item.parse()?;
        if !allowed.contains(&s) {
            let names: Vec<_> = allowed.iter().map(|s| s.name()).collect();
            return Err(format!(
                "solver `{}` not available here (choose from {})",
                s.name(),
                names.join(",")
            ));
        }
        if !out.contains(&s) {
            out.push(s);
        }
    }
    if out.is_empty() {
        return Err("no solver requested".into());
    }
    Ok(out)
}

/// Runs an LCP solver; [`Solver::Gn`] has no LCP form and is rejected.
pub fn run_lcp(
    p: &LcpProblem,
    solver: Solver,
    opts: &SolverOptions,
) -> smoothlcp::Result<SolveReport> {
    match solver.method() {
        Some(m) => solve(p, m, opts, None, None).map(|r| r.0),
        None if solver == Solver::Ipm => solve_ipm(p, opts).map(|r| r.0),
        None => Err(LcpError::InvalidOptions(format!(
            "{} is not an LCP solver",
            solver.name()
        ))),
    }
}

/// Random P-matrix batch: instance `i` is drawn from seed `seed + i`.
pub fn run_random_lcp(
    sizes: &[usize],
    instances: usize,
    solvers: &[Solver],
    seed: u64,
    opts: &SolverOptions,
) -> smoothlcp::Result<Vec<BenchRow>> {
    let mut rows = Vec::new();
    for &n in sizes {
        if n == 0 {
            return Err(LcpError::InvalidOptions(
                "problem size must be positive".into(),
            ));
        }
        let batch: smoothlcp::Result<Vec<Vec<BenchRow>>> = (0..instances as u64)
            .into_par_iter()
            .map(|i| {
                let s = seed + i;
                let planted = gen_pmatrix_lcp(n, &mut Rng::new(s));
                solvers
                    .iter()
                    .map(|&sv| {
                        run_lcp(&planted.problem, sv, opts)
                            .map(|rep| BenchRow::from_report("random-lcp", n, sv, &rep, s))
                    })
                    .collect()
            })
            .collect();
        rows.extend(batch?.into_iter().flatten());
    }
    Ok(rows)
}

/// Per (family, n, solver) statistics in first-appearance order.
#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub family: String,
    pub n: usize,
    pub solver: String,
    pub runs: usize,
    pub converged: usize,
    pub mean_iterations: f64,
    pub median_iterations: f64,
    pub total_time_s: f64,
}

pub fn summarize(rows: &[BenchRow]) -> Vec<Summary> {
    let mut keys: Vec<(String, usize, String)> = Vec::new();
    for r in rows {
        let k = (r.family.clone(), r.n, r.solver.clone());
        if !keys.contains(&k) {
            keys.push(k);
        }
    }
    keys.into_iter()
        .map(|(family, n, solver)| {
            let group: Vec<&BenchRow> = rows
                .iter()
                .filter(|r| r.family == family && r.n == n && r.solver == solver)
                .collect();
            let mut its: Vec<usize> = group.iter().map(|r| r.iterations).collect();
            its.sort_unstable();
            let median = match its.len() {
                0 => f64::NAN,
                l if l % 2 == 1 => its[l / 2] as f64,
                l => (its[l / 2 - 1] + its[l / 2]) as f64 / 2.0,
            };
            Summary {
                runs: group.len(),
                converged: group.iter().filter(|r| r.converged()).count(),
                mean_iterations: its.iter().sum::<usize>() as f64 / its.len().max(1) as f64,
                median_iterations: median,
                total_time_s: group.iter().map(|r| r.time_s).sum(),
                family,
                n,
                solver,
            }
        })
        .collect()
}

pub fn format_summary(rows: &[BenchRow]) -> String {
    let mut s = String::new();
    for g in summarize(rows) {
        let _ = writeln!(
            s,
            "{} n={} {}: {}/{} converged, iterations mean {:.2} median {:.1}, time {:.3}s",
            g.family,
            g.n,
            g.solver,
            g.converged,
            g.runs,
            g.mean_iterations,
            g.median_iterations,
            g.total_time_s
        );
    }
    s
}

/// Obstacle profile to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObstacleShape {
    ThreeBump,
    Zero,
}

/// Membrane profile computed by one solver.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    pub solver: Solver,
    pub grid: Vec<f64>,
    pub u: Vec<f64>,
    pub g: Vec<f64>,
    pub contacts: usize,
    pub min_gap: f64,
}

impl Profile {
    /// Columns `x u g`.
    pub fn to_dat(&self) -> String {
        let mut s = String::from("# x u g\n");
        for i in 0..self.grid.len() {
            let _ = writeln!(s, "{} {} {}", self.grid[i], self.u[i], self.g[i]);
        }
        s
    }
}

pub fn run_obstacle(
    n: usize,
    shape: ObstacleShape,
    solvers: &[Solver],
    opts: &SolverOptions,
) -> smoothlcp::Result<(Vec<BenchRow>, Vec<Profile>)> {
    let ob = match shape {
        ObstacleShape::ThreeBump => build_obstacle(n)?,
        ObstacleShape::Zero => build_obstacle_with(n, |_| 0.0, 1.0)?,
    };
    let mut rows = Vec::new();
    let mut profiles = Vec::new();
    for &sv in solvers {
        let rep = run_lcp(&ob.problem, sv, opts)?;
        rows.push(BenchRow::from_report("obstacle", n, sv, &rep, 0));
        let sol = ob.solution(&rep.x)?;
        profiles.push(Profile {
            solver: sv,
            contacts: sol.contact_count(),
            min_gap: sol.min_gap(),
            grid: sol.grid,
            u: sol.u,
            g: sol.g,
        });
    }
    Ok((rows, profiles))
}

/// Trajectory computed by one solver next to the RK4 reference.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub solver: Solver,
    /// Starts with the initial value at `t = 0`.
    pub t: Vec<f64>,
    pub x_lcp: Vec<f64>,
    pub x_rk4: Vec<f64>,
    pub sup_gap: f64,
}

impl Trajectory {
    /// Columns `t x_lcp x_rk4`.
    pub fn to_dat(&self) -> String {
        let mut s = String::from("# t x_lcp x_rk4\n");
        for i in 0..self.t.len() {
            let _ = writeln!(s, "{} {} {}", self.t[i], self.x_lcp[i], self.x_rk4[i]);
        }
        s
    }
}

/// RK4 step used for the reference trajectory.
pub const RK4_STEP: f64 = 1e-3;

pub fn run_ode(
    n: usize,
    solvers: &[Solver],
    opts: &SolverOptions,
) -> smoothlcp::Result<(Vec<BenchRow>, Vec<Trajectory>)> {
    let ode = build_ode_lcp(n)?;
    let mut t = vec![0.0];
    t.extend(ode.spec.times());
    let reference = rk4_reference(&t, RK4_STEP)?;
    let mut rows = Vec::new();
    let mut trajectories = Vec::new();
    for &sv in solvers {
        let rep = run_lcp(&ode.problem, sv, opts)?;
        rows.push(BenchRow::from_report("ode", n, sv, &rep, 0));
        let mut x = vec![-1.0];
        x.extend(ode.reconstruct(&rep.x, &rep.z)?);
        trajectories.push(Trajectory {
            solver: sv,
            sup_gap: sup_gap(&x, &reference),
            t: t.clone(),
            x_lcp: x,
            x_rk4: reference.clone(),
        });
    }
    Ok((rows, trajectories))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AveMode {
    Unique,
    General,
}

/// Batch totals of an AVE run.
#[derive(Debug, Clone, PartialEq)]
pub struct AveSummary {
    pub solver: Solver,
    /// Sum of per-run residual components above the failure tolerance.
    pub nnz_tot: usize,
    /// Largest per-run count.
    pub nnz_x: usize,
    pub iterations: usize,
    pub time_s: f64,
    pub failures: usize,
}

impl std::fmt::Display for AveSummary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}: nnztot {} nnzx {} nb-iter {} time {:.3}s nb-failure {}",
            self.solver.name(),
            self.nnz_tot,
            self.nnz_x,
            self.iterations,
            self.time_s,
            self.failures
        )
    }
}

struct AveRun {
    row: BenchRow,
    nnz: usize,
    failed: bool,
}

fn run_ave_instance(
    planted: &PlantedAve,
    n: usize,
    sv: Solver,
    seed: u64,
    opts: &SolverOptions,
) -> smoothlcp::Result<AveRun> {
    let p = &planted.problem;
    match sv {
        Solver::Gn => {
            let clock = std::time::Instant::now();
            let rep = solve_gn_ave(p, None, opts)?;
            let time_s = clock.elapsed().as_secs_f64();
            let nnz = p.nnz(&rep.x)?;
            Ok(AveRun {
                failed: !(rep.residual_inf <= AVE_FAILURE_TOL),
                nnz,
                row: BenchRow {
                    family: "ave".into(),
                    n,
                    solver: sv.label().into(),
                    comp_err: f64::NAN,
                    feas_err: rep.residual_inf,
                    r_final: f64::NAN,
                    iterations: rep.iterations,
                    time_s,
                    status: rep.status.to_string(),
                    seed,
                },
            })
        }
        _ => {
            let method = sv.method().ok_or_else(|| {
                LcpError::InvalidOptions(format!("{} cannot solve AVEs", sv.name()))
            })?;
            let rep = solve_ave_via_lcp(p, method, opts)?;
            Ok(AveRun {
                failed: rep.failed(),
                nnz: rep.nnz,
                row: BenchRow::from_report("ave", n, sv, &rep.lcp, seed),
            })
        }
    }
}

/// AVE batch: instance `i` is drawn from seed `seed + i`.
///
/// Rows of the GN baseline carry `‖Ax − |x| − b‖∞` as `feas_err` and `NaN`
/// for the LCP-only columns.
pub fn run_ave(
    mode: AveMode,
    n: usize,
    instances: usize,
    solvers: &[Solver],
    seed: u64,
    opts: &SolverOptions,
) -> smoothlcp::Result<(Vec<BenchRow>, Vec<AveSummary>)> {
    let runs: smoothlcp::Result<Vec<Vec<AveRun>>> = (0..instances as u64)
        .into_par_iter()
        .map(|i| {
            let s = seed + i;
            let mut rng = Rng::new(s);
            let planted = match mode {
                AveMode::Unique => gen_ave_unique(n, &mut rng)?,
                AveMode::General => gen_ave_general(n, &mut rng)?,
            };
            solvers
                .iter()
                .map(|&sv| run_ave_instance(&planted, n, sv, s, opts))
                .collect()
        })
        .collect();
    let runs: Vec<AveRun> = runs?.into_iter().flatten().collect();
    let summaries = solvers
        .iter()
        .map(|&sv| {
            let mine: Vec<&AveRun> = runs.iter().filter(|r| r.row.solver == sv.label()).collect();
            AveSummary {
                solver: sv,
                nnz_tot: mine.iter().map(|r| r.nnz).sum(),
                nnz_x: mine.iter().map(|r| r.nnz).max().unwrap_or(0),
                iterations: mine.iter().map(|r| r.row.iterations).sum(),
                time_s: mine.iter().map(|r| r.row.time_s).sum(),
                failures: mine.iter().filter(|r| r.failed).count(),
            }
        })
        .collect();
    Ok((runs.into_iter().map(|r| r.row).collect(), summaries))
}
