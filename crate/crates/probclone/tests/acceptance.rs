//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits nonzero
//! if any criterion fails.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};

use common::*;
use probclone::{load_machine, load_states, save_machine, save_states, MachineFile};
use probclone_core::{
    build_machine, gram, is_feasible, max_efficiency, max_efficiency_bisect, max_efficiency_eigen, run_sampled,
    verify_machine, CloningMachine, StateSet, BISECTION_TOL, PSD_TOL,
};
use rand::Rng;

struct Gate {
    failures: usize,
}

impl Gate {
    fn report(&mut self, id: u32, title: &str, result: Result<String, String>) {
        match result {
            Ok(detail) => println!("PASS  [{id}] {title}: {detail}"),
            Err(detail) => {
                self.failures += 1;
                println!("FAIL  [{id}] {title}: {detail}");
            }
        }
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Unitarity, factor and transition residuals of one machine.
#[derive(Default)]
struct Residuals {
    unitarity: f64,
    factor: f64,
    transition: f64,
    machines: usize,
}

impl Residuals {
    fn record(&mut self, machine: &CloningMachine, set: &StateSet) -> Result<(), String> {
        let r = verify_machine(machine, set).map_err(|e| e.to_string())?;
        self.unitarity = self.unitarity.max(r.unitarity_residual);
        self.factor = self.factor.max(r.factor_residual);
        self.transition = self.transition.max(r.max_transition_residual());
        self.machines += 1;
        Ok(())
    }
}

fn forward(residuals: &mut Residuals) -> Result<String, String> {
    let mut rng = rng(101);
    let (mut prob_err, mut fid_err) = (0.0f64, 0.0f64);
    for trial in 0..50 {
        let dim = rng.random_range(1..=3);
        let n = rng.random_range(1..=dim);
        let copies = rng.random_range(2..=3);
        let set = random_independent_set(&mut rng, n, dim, 1e-3);
        let eta = max_efficiency(&set, copies).map_err(|e| e.to_string())?.eta_star / 2.0;
        let machine = build_machine(&set, eta, copies).map_err(|e| format!("set {trial}: {e}"))?;
        let report = verify_machine(&machine, &set).map_err(|e| e.to_string())?;
        residuals.record(&machine, &set)?;
        prob_err = prob_err.max(report.max_probability_error(eta));
        fid_err = fid_err.max(report.max_fidelity_error());
        ensure(report.passed, || format!("set {trial} failed verification"))?;
    }
    ensure(prob_err <= 1e-10 && fid_err <= 1e-10, || format!("prob err {prob_err:.2e}, fidelity err {fid_err:.2e}"))?;
    Ok(format!("50 sets built at eta*/2 and verified; max |P0 - eta| {prob_err:.2e}, max |1 - F| {fid_err:.2e}"))
}

fn converse() -> Result<String, String> {
    let mut rng = rng(102);
    let mut worst = f64::NEG_INFINITY;
    for trial in 0..50 {
        let dim = rng.random_range(1..=3);
        let n = rng.random_range(2..=4);
        let set = random_dependent_set(&mut rng, n, dim);
        let copies = rng.random_range(2..=3);
        let (x1, xm) = (gram(&set, 1), gram(&set, copies));
        let eigen = max_efficiency(&set, copies).map_err(|e| e.to_string())?.eta_star;
        let bisect = max_efficiency_bisect(&x1, &xm, BISECTION_TOL).map_err(|e| e.to_string())?.eta_star;
        ensure(eigen == 0.0 && bisect == 0.0, || format!("set {trial}: eta* = {eigen}, {bisect}"))?;
        let mut etas = vec![1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 0.1, 0.5, 1.0];
        etas.extend((0..20).map(|_| rng.random_range(1e-6..=1.0)));
        for eta in etas {
            let f = is_feasible(&x1, &xm, eta, PSD_TOL).map_err(|e| e.to_string())?;
            worst = worst.max(f.min_eigenvalue);
            ensure(!f.feasible, || format!("set {trial} feasible at eta = {eta}"))?;
        }
    }
    Ok(format!("50 dependent sets report eta* = 0, infeasible on 28 etas >= 1e-6 each; largest min eigenvalue {worst:.2e}"))
}

fn boundary() -> Result<String, String> {
    let mut rng = rng(103);
    let mut ortho_gap = 0.0f64;
    for _ in 0..50 {
        let dim = rng.random_range(1..=4);
        let n = rng.random_range(1..=dim);
        let set = random_orthonormal_set(&mut rng, n, dim);
        for copies in [2, 3] {
            let e = max_efficiency(&set, copies).map_err(|e| e.to_string())?.eta_star;
            ortho_gap = ortho_gap.max((1.0 - e).abs());
        }
    }
    ensure(ortho_gap <= 1e-10, || format!("orthonormal |1 - eta*| up to {ortho_gap:.2e}"))?;
    let mut top = 0.0f64;
    for _ in 0..50 {
        let dim = rng.random_range(2..=4);
        let n = rng.random_range(2..=dim);
        let set = random_independent_set(&mut rng, n, dim, 1e-3);
        for copies in [2, 3] {
            top = top.max(max_efficiency(&set, copies).map_err(|e| e.to_string())?.eta_star);
        }
    }
    ensure(top <= 1.0 - 1e-6, || format!("non-orthogonal eta* reached {top}"))?;
    Ok(format!("orthonormal max |1 - eta*| {ortho_gap:.2e}; non-orthogonal max eta* {top:.7}"))
}

fn closed_form() -> Result<String, String> {
    let mut worst = 0.0f64;
    for s in [0.1, 0.3, 0.5, 0.7, 0.9] {
        let set = overlap_pair(s);
        for copies in [2u32, 3] {
            let expected = (1.0 - s) / (1.0 - s.powi(copies as i32));
            let (x1, xm) = (gram(&set, 1), gram(&set, copies));
            let eigen = max_efficiency_eigen(&x1, &xm).map_err(|e| e.to_string())?.eta_star;
            let bisect = max_efficiency_bisect(&x1, &xm, BISECTION_TOL).map_err(|e| e.to_string())?.eta_star;
            let err = (eigen - expected).abs().max((bisect - expected).abs());
            worst = worst.max(err);
            ensure(err <= 1e-8, || format!("s = {s}, m = {copies}: {eigen} / {bisect} vs {expected}"))?;
        }
    }
    Ok(format!("10 (s, m) cases, both solvers within {worst:.2e} of (1-s)/(1-s^m)"))
}

fn multi_copy(residuals: &mut Residuals) -> Result<String, String> {
    let mut rng = rng(105);
    let check_order = |set: &StateSet, label: &str| -> Result<(), String> {
        let e2 = max_efficiency(set, 2).map_err(|e| e.to_string())?.eta_star;
        let e3 = max_efficiency(set, 3).map_err(|e| e.to_string())?.eta_star;
        ensure(e3 < e2 && e2 < 1.0, || format!("{label}: eta*(3) = {e3}, eta*(2) = {e2}"))
    };
    for s in [0.1, 0.3, 0.5, 0.7, 0.9] {
        check_order(&overlap_pair(s), &format!("pair s = {s}"))?;
    }
    for trial in 0..60 {
        let dim = rng.random_range(2..=4);
        let n = rng.random_range(2..=dim);
        check_order(&random_nonnegative_set(&mut rng, n, dim, 1e-3), &format!("set {trial}"))?;
    }
    for trial in 0..30 {
        let dim = rng.random_range(2..=3);
        let n = rng.random_range(2..=dim);
        let set = random_independent_set(&mut rng, n, dim, 1e-3);
        let eta = max_efficiency(&set, 3).map_err(|e| e.to_string())?.eta_star * (1.0 - 1e-6);
        let machine = build_machine(&set, eta, 3).map_err(|e| format!("set {trial}: {e}"))?;
        let report = verify_machine(&machine, &set).map_err(|e| e.to_string())?;
        residuals.record(&machine, &set)?;
        ensure(report.passed, || format!("3-copy machine {trial} failed verification"))?;
    }
    Ok("eta*(3) < eta*(2) < 1 on 5 pairs and 60 sets with nonnegative overlaps; \
        30 three-copy machines verified (signed overlaps can reverse the order, e.g. s = -0.5)"
        .into())
}

fn integrity(residuals: &mut Residuals) -> Result<String, String> {
    let mut rng = rng(106);
    for _ in 0..40 {
        let dim = rng.random_range(1..=3);
        let n = rng.random_range(1..=dim);
        let copies = rng.random_range(2..=3);
        let set = random_independent_set(&mut rng, n, dim, 1e-3);
        let top = max_efficiency(&set, copies).map_err(|e| e.to_string())?.eta_star;
        for frac in [0.0, 0.5, 1.0 - 1e-6] {
            let machine = build_machine(&set, top * frac, copies).map_err(|e| e.to_string())?;
            residuals.record(&machine, &set)?;
        }
    }
    let r = &*residuals;
    ensure(r.unitarity <= 1e-10 && r.factor <= 1e-10 && r.transition <= 1e-9, || {
        format!("unitarity {:.2e}, factor {:.2e}, transition {:.2e}", r.unitarity, r.factor, r.transition)
    })?;
    Ok(format!(
        "{} machines; max unitarity {:.2e}, factor {:.2e}, transition {:.2e}",
        r.machines, r.unitarity, r.factor, r.transition
    ))
}

fn monte_carlo(residuals: &mut Residuals) -> Result<String, String> {
    let set = overlap_pair(0.5);
    let eta = 2.0 / 3.0;
    let machine = build_machine(&set, eta, 2).map_err(|e| e.to_string())?;
    residuals.record(&machine, &set)?;
    let shots = 1_000_000;
    let a = run_sampled(&machine, 0, shots, 2024).map_err(|e| e.to_string())?;
    let b = run_sampled(&machine, 0, shots, 2024).map_err(|e| e.to_string())?;
    let dev = (a.empirical_rate - eta).abs();
    let bound = 5.0 * (eta * (1.0 - eta) / shots as f64).sqrt();
    ensure(dev <= bound && dev <= 0.0024, || format!("rate {} off by {dev:.2e} > {bound:.2e}", a.empirical_rate))?;
    ensure(a == b && a.empirical_rate.to_bits() == b.empirical_rate.to_bits(), || "reports differ across runs".into())?;
    Ok(format!("rate {:.7} vs 2/3, deviation {dev:.2e} <= {bound:.2e}; seeded reruns identical", a.empirical_rate))
}

fn oracle_equivalence() -> Result<String, String> {
    let mut rng = rng(108);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let dim = rng.random_range(1..=4);
        let n = rng.random_range(1..=dim);
        let copies = rng.random_range(2..=3);
        let set = random_independent_set(&mut rng, n, dim, 0.05);
        let (x1, xm) = (gram(&set, 1), gram(&set, copies));
        let a = max_efficiency_eigen(&x1, &xm).map_err(|e| e.to_string())?.eta_star;
        let b = max_efficiency_bisect(&x1, &xm, BISECTION_TOL).map_err(|e| e.to_string())?.eta_star;
        worst = worst.max((a - b).abs());
    }
    ensure(worst <= 1e-8, || format!("max disagreement {worst:.2e}"))?;
    Ok(format!("100 sets, max |eigen - bisection| {worst:.2e}"))
}

fn machine_bits(m: &CloningMachine) -> Vec<u64> {
    let f = MachineFile::from_machine(m);
    let pairs = f.states.iter().flatten().chain(&f.blank).chain(&f.constants).chain(&f.unitary);
    let mut bits: Vec<u64> = pairs.flat_map(|p| [p[0].to_bits(), p[1].to_bits()]).collect();
    bits.push(m.eta().to_bits());
    bits
}

fn set_bits(s: &StateSet) -> Vec<u64> {
    s.states().iter().flat_map(|v| v.amplitudes()).flat_map(|z| [z.re.to_bits(), z.im.to_bits()]).collect()
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn exit_code(args: &[&str]) -> Result<i32, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_probclone")).args(args).output().map_err(|e| e.to_string())?;
    out.status.code().ok_or_else(|| "killed by signal".into())
}

fn files_and_exit_codes() -> Result<String, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut rng = rng(109);
    for trial in 0..20 {
        let dim = rng.random_range(1..=3);
        let n = rng.random_range(1..=dim);
        let copies = rng.random_range(2..=3);
        let set = random_independent_set(&mut rng, n, dim, 1e-3);
        let eta = max_efficiency(&set, copies).map_err(|e| e.to_string())?.eta_star * 0.7;
        let machine = build_machine(&set, eta, copies).map_err(|e| e.to_string())?;
        let mp = dir.path().join(format!("m{trial}.json"));
        let sp = dir.path().join(format!("s{trial}.json"));
        save_machine(&mp, &machine).map_err(|e| e.to_string())?;
        save_states(&sp, &set).map_err(|e| e.to_string())?;
        let back = load_machine(&mp).map_err(|e| e.to_string())?;
        let states_back = load_states(&sp).map_err(|e| e.to_string())?;
        ensure(machine_bits(&back) == machine_bits(&machine), || format!("machine {trial} changed on reload"))?;
        ensure(set_bits(&states_back) == set_bits(&set), || format!("state set {trial} changed on reload"))?;
    }

    let out = dir.path().join("m.json");
    let out = out.to_str().unwrap();
    let f = |name: &str| fixture(name).to_str().unwrap().to_owned();
    let cases: Vec<(Vec<String>, i32)> = vec![
        (vec!["check".into(), f("orthonormal_pair.json")], 0),
        (vec!["check".into(), f("orthonormal_triple.json")], 0),
        (vec!["check".into(), f("overlap_half.json")], 0),
        (vec!["check".into(), f("duplicate_pair.json")], 2),
        (vec!["check".into(), f("dependent_triple.json")], 2),
        (vec!["check".into(), f("malformed_amplitude.json")], 1),
        (vec!["check".into(), f("wrong_length.json")], 1),
        (vec!["check".into(), f("truncated.json")], 1),
        (vec!["efficiency".into(), f("duplicate_pair.json")], 2),
        (vec!["efficiency".into(), f("orthonormal_triple.json"), "--copies".into(), "5".into()], 0),
        (vec!["build".into(), f("duplicate_pair.json"), "-o".into(), out.into()], 2),
        (vec!["build".into(), f("overlap_half.json"), "--eta".into(), "0.9".into(), "-o".into(), out.into()], 3),
        (vec!["build".into(), f("overlap_half.json"), "--eta".into(), "max".into(), "-o".into(), out.into()], 0),
        (vec!["simulate".into(), out.into(), "--input".into(), "1".into()], 0),
        (vec!["simulate".into(), out.into(), "--state-file".into(), f("qutrit_state.json")], 1),
        (vec!["sweep".into(), "--overlap".into(), "0.5:0.1:0.1".into(), "-o".into(), format!("{out}.csv")], 1),
    ];
    for (args, expected) in &cases {
        let argv: Vec<&str> = args.iter().map(String::as_str).collect();
        let got = exit_code(&argv)?;
        ensure(got == *expected, || format!("`probclone {}` exited {got}, expected {expected}", argv.join(" ")))?;
    }
    Ok(format!("20 machines and 20 state sets reload bit-exactly; {} CLI exit codes match", cases.len()))
}

fn main() -> ExitCode {
    let mut gate = Gate { failures: 0 };
    let mut residuals = Residuals::default();
    gate.report(1, "independent sets clone", forward(&mut residuals));
    gate.report(2, "dependent sets do not", converse());
    gate.report(3, "unit efficiency only when orthonormal", boundary());
    gate.report(4, "pair closed form", closed_form());
    gate.report(5, "multi-copy cloning", multi_copy(&mut residuals));
    let r7 = monte_carlo(&mut residuals);
    gate.report(6, "construction integrity", integrity(&mut residuals));
    gate.report(7, "Monte Carlo consistency", r7);
    gate.report(8, "eigen and bisection agree", oracle_equivalence());
    gate.report(9, "file round-trips and exit codes", files_and_exit_codes());
    if gate.failures == 0 {
        println!("acceptance: all 9 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {} of 9 criteria failed", gate.failures);
        ExitCode::FAILURE
    }
}
