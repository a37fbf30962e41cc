use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use probclone_core::{
    build_machine, gram, max_efficiency, max_efficiency_bisect, run_exact, run_sampled, sample_outcomes,
    verify_machine, CloneOutcome, FeasibilityReport, MonteCarloReport, StateSet, StateVector, BISECTION_TOL,
};

use crate::error::CliError;
use crate::files::{load_machine, load_states, save_machine};

/// Exit status for a clean run.
pub const EXIT_OK: u8 = 0;
/// Exit status for a dependent or otherwise non-clonable verdict.
pub const EXIT_VERDICT: u8 = 2;

/// Margin kept below `η*` when `--eta max` is requested.
const MAX_ETA_MARGIN: f64 = 1e-9;
const UNIT_TOL: f64 = 1e-10;

#[derive(Debug, Parser)]
#[command(name = "probclone", version, about = "Decide, build and simulate probabilistic cloning machines")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Report whether a state set is linearly independent.
    Check {
        states: PathBuf,
    },
    /// Maximal success probability of an m-copy machine.
    Efficiency {
        states: PathBuf,
        #[arg(long, default_value_t = 2)]
        copies: u32,
    },
    /// Synthesize the machine and write it to a file.
    Build {
        states: PathBuf,
        #[arg(long, default_value = "max")]
        eta: EtaArg,
        #[arg(long, default_value_t = 2)]
        copies: u32,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Run a saved machine on one input.
    Simulate(SimulateArgs),
    /// Tabulate the maximal efficiency of the real pair family over an overlap grid.
    Sweep {
        #[arg(long)]
        overlap: OverlapRange,
        #[arg(long, default_value_t = 2)]
        copies: u32,
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("source").required(true).args(["input", "state_file"])))]
pub struct SimulateArgs {
    pub machine: PathBuf,
    /// Index of a designated state.
    #[arg(long)]
    pub input: Option<usize>,
    /// File holding exactly one input state.
    #[arg(long)]
    pub state_file: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub shots: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// `--eta VALUE` or `--eta max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EtaArg {
    Max,
    Value(f64),
}

impl FromStr for EtaArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("max") {
            return Ok(EtaArg::Max);
        }
        let v: f64 = s.parse().map_err(|_| format!("expected a number or \"max\", found {s:?}"))?;
        if !(0.0..=1.0).contains(&v) {
            return Err(format!("eta must lie in [0, 1], found {v}"));
        }
        Ok(EtaArg::Value(v))
    }
}

/// `FROM:TO:STEP` with `0 ≤ FROM ≤ TO < 1` and `STEP > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlapRange {
    pub from: f64,
    pub to: f64,
    pub step: f64,
}

impl FromStr for OverlapRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let [from, to, step] = parts.as_slice() else {
            return Err(format!("expected FROM:TO:STEP, found {s:?}"));
        };
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("not a number: {t:?}"));
        let range = OverlapRange { from: num(from)?, to: num(to)?, step: num(step)? };
        if !(0.0 <= range.from && range.from <= range.to && range.to < 1.0) {
            return Err(format!("need 0 <= FROM <= TO < 1, found {s}"));
        }
        if !(range.step > 0.0 && range.step.is_finite()) {
            return Err(format!("STEP must be positive, found {}", range.step));
        }
        Ok(range)
    }
}

impl OverlapRange {
    /// `FROM, FROM + STEP, …` up to `TO`, computed as `FROM + k·STEP` so the
    /// grid carries no accumulated rounding.
    pub fn points(&self) -> Vec<f64> {
        let count = ((self.to - self.from) / self.step + 1e-9).floor() as usize + 1;
        (0..count).map(|k| (self.from + k as f64 * self.step).min(self.to)).collect()
    }
}

/// Runs one command, writing its report to `out`. Returns the exit status for
/// completed runs; failures carry their own via [`CliError::exit_code`].
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<u8, CliError> {
    match &cli.command {
        Command::Check { states } => check(states, out),
        Command::Efficiency { states, copies } => efficiency(states, *copies, out),
        Command::Build { states, eta, copies, output } => build(states, *eta, *copies, output, out),
        Command::Simulate(args) => simulate(args, out),
        Command::Sweep { overlap, copies, output } => sweep(overlap, *copies, output, out),
    }
}

fn require_copies(copies: u32) -> Result<(), CliError> {
    if copies < 2 {
        return Err(CliError::Usage(format!("--copies must be at least 2, found {copies}")));
    }
    Ok(())
}

pub fn check(path: &Path, out: &mut dyn Write) -> Result<u8, CliError> {
    let set = load_states(path)?;
    let ind = set.independence();
    writeln!(out, "states: {}", set.len())?;
    writeln!(out, "dimension: {}", set.dim())?;
    writeln!(out, "min Gram eigenvalue: {:.6e}", ind.min_eigenvalue)?;
    if ind.independent {
        writeln!(out, "verdict: independent, clonable")?;
        Ok(EXIT_OK)
    } else {
        writeln!(out, "verdict: dependent, not clonable")?;
        Ok(EXIT_VERDICT)
    }
}

fn both_solvers(set: &StateSet, copies: u32) -> Result<(FeasibilityReport, FeasibilityReport), CliError> {
    let eigen = max_efficiency(set, copies)?;
    let bisect = max_efficiency_bisect(&gram(set, 1), &gram(set, copies), BISECTION_TOL)?;
    Ok((eigen, bisect))
}

pub fn efficiency(path: &Path, copies: u32, out: &mut dyn Write) -> Result<u8, CliError> {
    require_copies(copies)?;
    let set = load_states(path)?;
    let (eigen, bisect) = both_solvers(&set, copies)?;
    writeln!(out, "copies: {copies}")?;
    writeln!(out, "eta* (eigen):     {:.7}", eigen.eta_star)?;
    writeln!(out, "eta* (bisection): {:.7}", bisect.eta_star)?;
    writeln!(out, "delta: {:.3e}", (eigen.eta_star - bisect.eta_star).abs())?;
    if !eigen.independent {
        writeln!(out, "diagnosis: dependent set, eta* = 0, not clonable")?;
        return Ok(EXIT_VERDICT);
    }
    if eigen.eta_star >= 1.0 - UNIT_TOL {
        writeln!(out, "diagnosis: orthonormal set, cloned with certainty")?;
    } else {
        writeln!(out, "diagnosis: non-orthogonal set, eta* < 1")?;
    }
    Ok(EXIT_OK)
}

pub fn build(path: &Path, eta: EtaArg, copies: u32, output: &Path, out: &mut dyn Write) -> Result<u8, CliError> {
    require_copies(copies)?;
    let set = load_states(path)?;
    let ind = set.independence();
    if !ind.independent {
        return Err(CliError::Dependent { min_eigenvalue: ind.min_eigenvalue });
    }
    let eta = match eta {
        EtaArg::Value(v) => v,
        EtaArg::Max => max_efficiency(&set, copies)?.eta_star * (1.0 - MAX_ETA_MARGIN),
    };
    let machine = build_machine(&set, eta, copies).map_err(|e| match e {
        probclone_core::Error::Infeasible { eta, min_eigenvalue } => CliError::Infeasible { eta, min_eigenvalue },
        other => CliError::Core(other),
    })?;
    let report = verify_machine(&machine, &set)?;
    save_machine(output, &machine)?;
    writeln!(out, "eta: {:.7}", machine.eta())?;
    writeln!(out, "copies: {copies}")?;
    writeln!(out, "composite dimension: {}", machine.composite_dim())?;
    writeln!(out, "unitarity residual: {:.3e}", report.unitarity_residual)?;
    writeln!(out, "transition residual (max over states): {:.3e}", report.max_transition_residual())?;
    writeln!(out, "factor residual: {:.3e}", report.factor_residual)?;
    writeln!(out, "verification: {}", if report.passed { "passed" } else { "FAILED" })?;
    writeln!(out, "wrote {}", output.display())?;
    Ok(EXIT_OK)
}

fn single_state(path: &Path) -> Result<StateVector, CliError> {
    let set = load_states(path)?;
    if set.len() != 1 {
        return Err(CliError::Invalid {
            path: path.to_owned(),
            message: format!("states: expected exactly 1 input state, found {}", set.len()),
        });
    }
    Ok(set.states()[0].clone())
}

fn write_table(outcomes: &[CloneOutcome], out: &mut dyn Write) -> Result<(), CliError> {
    writeln!(out, "{:<6} {:<12} {:<8} fidelity", "probe", "probability", "success")?;
    for o in outcomes {
        let fidelity = o.fidelity.map_or_else(|| "n/a".to_owned(), |f| format!("{f:.7}"));
        let success = if o.success { "yes" } else { "no" };
        writeln!(out, "{:<6} {:<12.7} {:<8} {fidelity}", o.probe_index, o.probability, success)?;
    }
    Ok(())
}

fn write_monte_carlo(r: &MonteCarloReport, out: &mut dyn Write) -> Result<(), CliError> {
    let bound = r.five_sigma();
    let within = (r.empirical_rate - r.expected_rate).abs() <= bound;
    writeln!(out, "shots: {}", r.shots)?;
    writeln!(out, "seed: {}", r.seed)?;
    writeln!(out, "successes: {}", r.successes)?;
    let counts: Vec<String> = r.counts.iter().map(u64::to_string).collect();
    writeln!(out, "counts per probe: {}", counts.join(" "))?;
    writeln!(out, "empirical rate: {:.7}", r.empirical_rate)?;
    writeln!(out, "expected rate: {:.7}", r.expected_rate)?;
    writeln!(out, "5-sigma bound: {bound:.7} ({})", if within { "within" } else { "OUTSIDE" })?;
    Ok(())
}

pub fn simulate(args: &SimulateArgs, out: &mut dyn Write) -> Result<u8, CliError> {
    let machine = load_machine(&args.machine)?;
    let (input, index) = match (&args.state_file, args.input) {
        (Some(file), _) => (single_state(file)?, None),
        (None, Some(i)) => {
            let state = machine.states().get(i).ok_or_else(|| {
                CliError::Usage(format!("--input {i} is out of range for {} designated states", machine.n_states()))
            })?;
            (state.clone(), Some(i))
        }
        (None, None) => return Err(CliError::Usage("one of --input or --state-file is required".into())),
    };
    let outcomes = run_exact(&machine, &input)?;
    writeln!(out, "eta: {:.7}", machine.eta())?;
    match index {
        Some(i) => writeln!(out, "input: designated state {i}")?,
        None => writeln!(out, "input: external state")?,
    }
    write_table(&outcomes, out)?;
    if args.shots > 0 {
        let report = match index {
            Some(i) => run_sampled(&machine, i, args.shots, args.seed)?,
            None => sample_outcomes(&outcomes, args.shots, args.seed),
        };
        write_monte_carlo(&report, out)?;
    }
    Ok(EXIT_OK)
}

/// The real pair `{|0⟩, s|0⟩ + √(1−s²)|1⟩}`.
pub fn overlap_pair(s: f64) -> StateSet {
    let second = StateVector::from_real(&[s, (1.0 - s * s).sqrt()]).expect("unit vector");
    StateSet::new(vec![StateVector::basis(2, 0), second]).expect("two states of dimension 2")
}

/// One row of the sweep table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub s: f64,
    pub eta_eigen: f64,
    pub eta_bisect: f64,
}

pub fn sweep_rows(range: &OverlapRange, copies: u32) -> Result<Vec<SweepRow>, CliError> {
    require_copies(copies)?;
    range
        .points()
        .into_iter()
        .map(|s| {
            let (eigen, bisect) = both_solvers(&overlap_pair(s), copies)?;
            Ok(SweepRow { s, eta_eigen: eigen.eta_star, eta_bisect: bisect.eta_star })
        })
        .collect()
}

pub fn sweep(range: &OverlapRange, copies: u32, output: &Path, out: &mut dyn Write) -> Result<u8, CliError> {
    let rows = sweep_rows(range, copies)?;
    let mut csv = String::from("s,eta_eigen,eta_bisect,delta\n");
    for r in &rows {
        csv.push_str(&format!("{},{},{},{}\n", r.s, r.eta_eigen, r.eta_bisect, (r.eta_eigen - r.eta_bisect).abs()));
    }
    fs::write(output, csv).map_err(|source| CliError::Io { path: output.to_owned(), source })?;
    let max_delta = rows.iter().map(|r| (r.eta_eigen - r.eta_bisect).abs()).fold(0.0, f64::max);
    writeln!(out, "copies: {copies}")?;
    writeln!(out, "rows: {}", rows.len())?;
    writeln!(out, "max delta: {max_delta:.3e}")?;
    writeln!(out, "wrote {}", output.display())?;
    Ok(EXIT_OK)
}
