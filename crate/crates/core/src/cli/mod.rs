//! Command-line front end for the `cutstokes` binary.

mod output;

pub use output::{format_sig6, write_csv, write_sweep_csv, write_vtk, VtkFiles, CSV_HEADER};

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::assembly::{BForm, BoundaryPenalty, CurvatureMode, Discretization};
use crate::error::Error;
use crate::geometry::{check_assumptions, LevelSet};
use crate::solver::ConditionMethod;
use crate::verification::{
    convergence_study_with, pressure_shift, run_case_with, sweep_interface_offset, CaseId, ManufacturedCase,
    RunOptions,
};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    /// `--help` or `--version`; the text goes to stdout.
    #[error("{0}")]
    Info(String),
    #[error("{0} assumption violation(s)")]
    Violations(usize),
    #[error(transparent)]
    Core(#[from] Error),
}

impl CliError {
    /// 0 ok, 1 usage or I/O, 2 assumption violation, 3 solver failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Info(_) => 0,
            CliError::Usage(_) => 1,
            CliError::Violations(_) => 2,
            CliError::Core(e) => match e {
                Error::InvalidInput(_) | Error::Io(_) => 1,
                Error::AssumptionViolation { .. } => 2,
                Error::Singular { .. } | Error::Solver(_) => 3,
            },
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Core(Error::Io(e))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Solve one case on one mesh.
    Run,
    /// Convergence study over several meshes.
    Converge,
    /// Condition numbers while the interface approaches a mesh line.
    Sweep,
    /// Check the geometric assumptions without solving.
    Validate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BFormArg {
    Grad,
    Div,
}

#[derive(Debug, Parser)]
#[command(name = "cutstokes", version, about = "Two-phase Stokes flow with unfitted Nitsche finite elements")]
struct Args {
    command: Command,
    /// 1, 2, 3a or 3b.
    #[arg(long)]
    example: String,
    /// Velocity mesh columns (even).
    #[arg(long)]
    nx: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    levels: Vec<usize>,
    /// One value, or a list for `sweep`.
    #[arg(long = "eps-u", value_delimiter = ',', allow_negative_numbers = true)]
    eps_u: Vec<f64>,
    #[arg(long = "eps-p", allow_negative_numbers = true)]
    eps_p: Option<f64>,
    #[arg(long = "b-form")]
    b_form: Option<BFormArg>,
    /// `exact` or `const:VALUE`.
    #[arg(long)]
    kappa: Option<String>,
    /// Penalty override, e.g. `A=0.3`; keys A B D E F G and LAMBDA (fixed boundary penalty times h_x).
    #[arg(long = "penalty")]
    penalty: Vec<String>,
    #[arg(long, value_delimiter = ',')]
    deltas: Vec<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Random perturbation of the interface position (validate).
    #[arg(long)]
    seed: Option<u64>,
    /// Parallel levels for `converge`.
    #[arg(long)]
    jobs: Option<usize>,
    /// Also estimate the inf-sup constant (dense, small meshes only).
    #[arg(long)]
    infsup: bool,
    /// Skip the condition number.
    #[arg(long = "no-cond")]
    no_cond: bool,
    /// Force the dense or iterative condition estimator.
    #[arg(long = "cond-method")]
    cond_method: Option<CondMethodArg>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CondMethodArg {
    Auto,
    Dense,
    Iterative,
}

/// A parsed and checked command line.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub command: Command,
    pub case: CaseId,
    pub nx: Option<usize>,
    pub levels: Vec<usize>,
    pub eps_u: Vec<f64>,
    pub eps_p: Option<f64>,
    pub b_form: Option<BForm>,
    pub kappa: Option<CurvatureMode>,
    pub penalty: Vec<(String, f64)>,
    pub deltas: Vec<f64>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub jobs: usize,
    pub infsup: bool,
    pub condition: bool,
    pub method: ConditionMethod,
}

const PENALTY_KEYS: [&str; 7] = ["A", "B", "D", "E", "F", "G", "LAMBDA"];

fn parse_kappa(s: &str) -> Result<CurvatureMode, CliError> {
    if s == "exact" {
        return Ok(CurvatureMode::Exact);
    }
    let v = s
        .strip_prefix("const:")
        .and_then(|v| v.parse::<f64>().ok())
        .filter(|v| v.is_finite())
        .ok_or_else(|| CliError::Usage(format!("--kappa expects 'exact' or 'const:VALUE', got '{s}'")))?;
    Ok(CurvatureMode::Constant(v))
}

fn parse_penalty(s: &str) -> Result<(String, f64), CliError> {
    let bad = || CliError::Usage(format!("--penalty expects KEY=VALUE with KEY one of {PENALTY_KEYS:?}, got '{s}'"));
    let (k, v) = s.split_once('=').ok_or_else(bad)?;
    let k = k.trim().to_ascii_uppercase();
    if !PENALTY_KEYS.contains(&k.as_str()) {
        return Err(bad());
    }
    let v: f64 = v.trim().parse().map_err(|_| bad())?;
    Ok((k, v))
}

/// Parse `argv` (program name first).
pub fn parse_args<I, T>(argv: I) -> Result<RunSpec, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = Args::try_parse_from(argv).map_err(|e| match e.kind() {
        clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => CliError::Info(e.to_string()),
        _ => CliError::Usage(e.to_string()),
    })?;
    let case: CaseId = args.example.parse().map_err(|e: Error| CliError::Usage(e.to_string()))?;
    let conflict = |flag: &str| -> Result<(), CliError> {
        Err(CliError::Usage(format!(
            "{flag} cannot be used with '{}'",
            format!("{:?}", args.command).to_lowercase()
        )))
    };
    match args.command {
        Command::Run => {
            if !args.levels.is_empty() {
                conflict("--levels")?;
            }
            if !args.deltas.is_empty() {
                conflict("--deltas")?;
            }
            if args.eps_u.len() > 1 {
                return Err(CliError::Usage("run takes a single --eps-u value".into()));
            }
            if args.jobs.is_some() {
                conflict("--jobs")?;
            }
        }
        Command::Converge => {
            if args.nx.is_some() {
                conflict("--nx")?;
            }
            if !args.deltas.is_empty() {
                conflict("--deltas")?;
            }
            if args.eps_u.len() > 1 {
                return Err(CliError::Usage("converge takes a single --eps-u value".into()));
            }
            if !args.levels.is_empty() && args.levels.len() < 3 {
                return Err(CliError::Usage("--levels needs at least 3 values".into()));
            }
        }
        Command::Sweep => {
            if !args.levels.is_empty() {
                conflict("--levels")?;
            }
            if args.infsup {
                conflict("--infsup")?;
            }
            if args.no_cond {
                conflict("--no-cond")?;
            }
            if args.jobs.is_some() {
                conflict("--jobs")?;
            }
        }
        Command::Validate => {
            for (set, flag) in [
                (!args.levels.is_empty(), "--levels"),
                (!args.deltas.is_empty(), "--deltas"),
                (!args.eps_u.is_empty(), "--eps-u"),
                (args.eps_p.is_some(), "--eps-p"),
                (args.infsup, "--infsup"),
                (args.jobs.is_some(), "--jobs"),
            ] {
                if set {
                    conflict(flag)?;
                }
            }
        }
    }
    if args.seed.is_some() && args.command != Command::Validate {
        conflict("--seed")?;
    }
    if args.jobs == Some(0) {
        return Err(CliError::Usage("--jobs must be at least 1".into()));
    }
    let penalty = args.penalty.iter().map(|s| parse_penalty(s)).collect::<Result<Vec<_>, _>>()?;
    let kappa = args.kappa.as_deref().map(parse_kappa).transpose()?;
    let spec = RunSpec {
        command: args.command,
        case,
        nx: args.nx,
        levels: args.levels,
        eps_u: args.eps_u,
        eps_p: args.eps_p,
        b_form: args.b_form.map(|b| match b {
            BFormArg::Grad => BForm::Gradient,
            BFormArg::Div => BForm::Divergence,
        }),
        kappa,
        penalty,
        deltas: args.deltas,
        out: args.out,
        seed: args.seed,
        jobs: args.jobs.unwrap_or(1),
        infsup: args.infsup,
        condition: !args.no_cond,
        method: match args.cond_method.unwrap_or(CondMethodArg::Auto) {
            CondMethodArg::Auto => ConditionMethod::Auto,
            CondMethodArg::Dense => ConditionMethod::Dense,
            CondMethodArg::Iterative => ConditionMethod::Iterative,
        },
    };
    // type-check the overrides now rather than after a long run
    spec.build_case()?;
    Ok(spec)
}

/// Default single-run mesh per case.
pub fn default_nx(case: CaseId) -> usize {
    match case {
        CaseId::Example1Continuous => 40,
        CaseId::Example2StaticDrop => 40,
        CaseId::Example3CouetteVisc => 40,
        CaseId::Example3CouettePjump => 68,
    }
}

/// Default convergence levels per case.
pub fn default_levels(case: CaseId) -> Vec<usize> {
    match case {
        CaseId::Example1Continuous => vec![10, 20, 40, 80],
        CaseId::Example2StaticDrop => vec![16, 32, 64],
        CaseId::Example3CouetteVisc => vec![10, 20, 40, 80],
        CaseId::Example3CouettePjump => vec![16, 34, 68, 136, 272],
    }
}

pub const DEFAULT_DELTAS: [f64; 6] = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6];
pub const DEFAULT_SWEEP_EPS_U: [f64; 3] = [0.0, 1e-3, 1e-1];
pub const DEFAULT_SWEEP_NX: usize = 34;

impl RunSpec {
    /// The preset with every override applied and checked.
    pub fn build_case(&self) -> Result<ManufacturedCase, CliError> {
        let mut case = ManufacturedCase::preset(self.case);
        let cfg = &mut case.cfg;
        if let Some(&e) = self.eps_u.first() {
            if self.command != Command::Sweep {
                cfg.eps_u = e;
            }
        }
        if let Some(e) = self.eps_p {
            cfg.eps_p = e;
        }
        if let Some(b) = self.b_form {
            cfg.b_form = b;
        }
        if let Some(k) = self.kappa {
            cfg.curvature = k;
        }
        for (k, v) in &self.penalty {
            let pc = &mut cfg.penalty;
            match k.as_str() {
                "A" => pc.a = *v,
                "B" => pc.b = *v,
                "D" => pc.d = *v,
                "E" => pc.e = *v,
                "F" => pc.f = *v,
                "G" => pc.g = *v,
                "LAMBDA" => pc.boundary = BoundaryPenalty::Fixed(*v),
                _ => unreachable!("keys are checked when parsed"),
            }
        }
        if self.command == Command::Sweep && self.eps_u.iter().any(|e| !(*e >= 0.0)) {
            return Err(CliError::Usage("--eps-u values must be non-negative".into()));
        }
        cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(case)
    }

    fn nx(&self) -> usize {
        self.nx.unwrap_or(match self.command {
            Command::Sweep => DEFAULT_SWEEP_NX,
            _ => default_nx(self.case),
        })
    }

    fn run_options(&self) -> RunOptions {
        RunOptions {
            condition: self.condition,
            bordered: false,
            infsup: self.infsup,
            method: self.method,
        }
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(format_sig6).unwrap_or_else(|| "-".into())
}

/// Execute a parsed command, writing the human-readable summary to `out`.
pub fn execute(spec: &RunSpec, out: &mut dyn Write) -> Result<(), CliError> {
    let case = spec.build_case()?;
    match spec.command {
        Command::Run => {
            let nx = spec.nx();
            let run = run_case_with(&case, nx, spec.run_options())?;
            let r = &run.report;
            writeln!(out, "case        {}", case.id)?;
            writeln!(out, "nx          {nx}")?;
            writeln!(out, "h_x         {}", format_sig6(r.h_x))?;
            writeln!(out, "dofs        {}", run.system.blocks.size())?;
            writeln!(out, "residual    {}", format_sig6(run.solution.residual_norm))?;
            writeln!(out, "err_p_L2    {}", format_sig6(r.err_p_l2))?;
            writeln!(out, "err_u_L2    {}", format_sig6(r.err_u_l2))?;
            writeln!(out, "err_u_H1    {}", format_sig6(r.err_u_h1))?;
            writeln!(out, "err_u_inf   {}", format_sig6(r.err_u_inf))?;
            writeln!(out, "err_p_inf   {}", format_sig6(r.err_p_inf))?;
            writeln!(out, "cond        {}", opt(r.cond))?;
            writeln!(out, "infsup      {}", opt(r.infsup))?;
            if let Some(dir) = &spec.out {
                std::fs::create_dir_all(dir)?;
                let stem = format!("{}_nx{nx}", case.id.name());
                let csv = dir.join(format!("{stem}.csv"));
                write_csv(std::slice::from_ref(r), &csv)?;
                let shift = pressure_shift(&run.disc, &run.solution.p, &case.exact, case.cfg.mu)?;
                let files = write_vtk(&run.solution, shift, dir, &stem)?;
                writeln!(out, "wrote       {}", csv.display())?;
                for f in files.all() {
                    writeln!(out, "wrote       {}", f.display())?;
                }
            }
        }
        Command::Converge => {
            let levels = if spec.levels.is_empty() {
                default_levels(spec.case)
            } else {
                spec.levels.clone()
            };
            let table = convergence_study_with(&case, &levels, spec.run_options(), spec.jobs)?;
            writeln!(out, "case {}", case.id)?;
            writeln!(out, "{:>12} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12}", "h_x", "err_p_L2", "err_u_L2", "err_u_H1", "err_u_inf", "err_p_inf", "cond")?;
            for r in &table.rows {
                writeln!(
                    out,
                    "{:>12} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12}",
                    format_sig6(r.h_x),
                    format_sig6(r.err_p_l2),
                    format_sig6(r.err_u_l2),
                    format_sig6(r.err_u_h1),
                    format_sig6(r.err_u_inf),
                    format_sig6(r.err_p_inf),
                    opt(r.cond)
                )?;
            }
            let rt = &table.rates;
            let rate = |v: Option<f64>| v.map(|x| format!("{x:.3}")).unwrap_or_else(|| "-".into());
            writeln!(
                out,
                "{:>12} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12}",
                "rate",
                rate(rt.err_p_l2),
                rate(rt.err_u_l2),
                rate(rt.err_u_h1),
                rate(rt.err_u_inf),
                rate(rt.err_p_inf),
                rate(rt.cond)
            )?;
            if let Some(dir) = &spec.out {
                std::fs::create_dir_all(dir)?;
                let csv = dir.join(format!("{}_convergence.csv", case.id.name()));
                write_csv(&table.rows, &csv)?;
                writeln!(out, "wrote {}", csv.display())?;
            }
        }
        Command::Sweep => {
            let deltas = if spec.deltas.is_empty() {
                DEFAULT_DELTAS.to_vec()
            } else {
                spec.deltas.clone()
            };
            let eps_u = if spec.eps_u.is_empty() {
                DEFAULT_SWEEP_EPS_U.to_vec()
            } else {
                spec.eps_u.clone()
            };
            let eps_p = spec.eps_p.unwrap_or(1.0);
            let rows = sweep_interface_offset(&case, spec.nx(), &deltas, &eps_u, eps_p, spec.method)?;
            writeln!(out, "{:>10} {:>12} {:>8} {:>8} {:>12}", "delta", "position", "eps_u", "eps_p", "cond")?;
            for r in &rows {
                writeln!(
                    out,
                    "{:>10} {:>12} {:>8} {:>8} {:>12}",
                    format_sig6(r.delta),
                    format_sig6(r.position),
                    format_sig6(r.eps_u),
                    format_sig6(r.eps_p),
                    format_sig6(r.cond)
                )?;
            }
            if let Some(dir) = &spec.out {
                std::fs::create_dir_all(dir)?;
                let csv = dir.join(format!("{}_sweep.csv", case.id.name()));
                write_sweep_csv(&rows, &csv)?;
                writeln!(out, "wrote {}", csv.display())?;
            }
        }
        Command::Validate => {
            let nx = spec.nx();
            let (nx_p, ny_p) = case.pressure_counts(nx)?;
            let mut levelset = case.levelset;
            if let Some(seed) = spec.seed {
                levelset = perturb(levelset, case.h_x(nx), seed);
                writeln!(out, "interface   {levelset:?}")?;
            }
            let pmesh = crate::mesh::build_structured_mesh(case.domain, nx_p, ny_p)?;
            let (vmesh, _) = crate::mesh::uniform_refine(&pmesh)?;
            let mut count = 0;
            for (name, mesh) in [("pressure", &pmesh), ("velocity", &vmesh)] {
                let report = check_assumptions(mesh, &levelset);
                for v in &report.violations {
                    writeln!(out, "violation   {name} mesh, element {}: {}", v.element, v.what)?;
                }
                for w in &report.warnings {
                    writeln!(out, "warning     {name} mesh: {w}")?;
                }
                count += report.violations.len();
            }
            if count > 0 {
                return Err(CliError::Violations(count));
            }
            // the full set-up must then succeed as well
            Discretization::new(case.domain, nx_p, ny_p, levelset)?;
            writeln!(out, "ok          {} at nx = {nx}", case.id)?;
        }
    }
    Ok(())
}

/// Move the interface by a random fraction of a mesh width.
fn perturb(ls: LevelSet, h: f64, seed: u64) -> LevelSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut d = || rng.random_range(-h..h);
    match ls {
        LevelSet::Circle { center, radius } => LevelSet::Circle {
            center: [center[0] + d(), center[1] + d()],
            radius,
        },
        LevelSet::VerticalLine { x } => LevelSet::VerticalLine { x: x + d() },
        LevelSet::HorizontalLine { y } => LevelSet::HorizontalLine { y: y + d() },
    }
}

/// Parse, execute and map the outcome to an exit code.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let result = parse_args(argv).and_then(|spec| execute(&spec, &mut stdout.lock()));
    match result {
        Ok(()) => 0,
        Err(CliError::Info(text)) => {
            print!("{text}");
            0
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("{}", msg.trim_end());
            1
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
