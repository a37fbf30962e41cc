//! Exact simulation of a cloning run: apply `U`, measure the probe, keep the
//! copy registers when the probe reads `P_0`.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
// Provides float math when std is absent from the build graph.
#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::states::{gram, StateSet, StateVector};
use crate::synthesis::CloningMachine;

/// Outcomes below this probability carry no post-measurement state.
const NEGLIGIBLE: f64 = 1e-14;
const VERIFY_TOL: f64 = 1e-10;
const TRANSITION_TOL: f64 = 1e-9;

/// Result of projecting the probe onto `|P_j⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct CloneOutcome {
    pub probe_index: usize,
    pub probability: f64,
    pub success: bool,
    /// Renormalized state of the copy registers, `None` for negligible outcomes.
    pub post_state: Option<StateVector>,
    /// `|⟨Ψ_i^⊗m|post⟩|²` on the success outcome when the input is the
    /// designated member `Ψ_i`; `None` otherwise.
    pub fidelity: Option<f64>,
}

/// Probe statistics for every outcome `0..=n`.
pub fn run_exact(machine: &CloningMachine, input: &StateVector) -> Result<Vec<CloneOutcome>> {
    let initial = machine.input_vector(input)?;
    let final_state = machine.unitary().mul_vec(&initial);
    let probe_dim = machine.probe_dim();
    let copy_dim = machine.copy_space_dim();
    let member = machine.states().position(input);
    let ideal = member.map(|i| machine.states().states()[i].tensor_power(machine.copies() as usize));

    let outcomes = (0..probe_dim)
        .map(|j| {
            let branch: Vec<Complex64> = (0..copy_dim).map(|a| final_state[a * probe_dim + j]).collect();
            let probability = branch.iter().map(|z| z.norm_sqr()).sum::<f64>();
            let post_state = if probability < NEGLIGIBLE {
                None
            } else {
                let scale = probability.sqrt();
                let amps: Vec<Complex64> = branch.iter().map(|z| z / scale).collect();
                Some(StateVector::from_normalized(amps).expect("renormalized branch has unit norm"))
            };
            let success = j == 0;
            let fidelity = match (&ideal, &post_state) {
                (Some(target), Some(post)) if success => Some(target.fidelity(post)),
                _ => None,
            };
            CloneOutcome { probe_index: j, probability, success, post_state, fidelity }
        })
        .collect();
    Ok(outcomes)
}

/// `|⟨input^⊗m|post⟩|²` for the success outcome of any input, member or not.
pub fn clone_fidelity(outcomes: &[CloneOutcome], input: &StateVector, copies: u32) -> Option<f64> {
    let success = outcomes.iter().find(|o| o.success)?;
    let post = success.post_state.as_ref()?;
    Some(input.tensor_power(copies as usize).fidelity(post))
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloReport {
    pub shots: u64,
    pub successes: u64,
    /// Shots that landed on each probe outcome.
    pub counts: Vec<u64>,
    pub empirical_rate: f64,
    /// Exact success probability the samples are drawn against.
    pub expected_rate: f64,
    pub seed: u64,
}

impl MonteCarloReport {
    /// `5·sqrt(p(1−p)/shots)`.
    pub fn five_sigma(&self) -> f64 {
        let p = self.expected_rate;
        5.0 * (p * (1.0 - p) / self.shots as f64).sqrt()
    }
}

/// Draws `shots` probe readings from the exact outcome distribution.
///
/// The generator is ChaCha8 seeded through `SeedableRng::seed_from_u64`, one
/// uniform `f64` per shot, inverted against the cumulative distribution in
/// probe-index order. Single-threaded, so a seed fixes the report bit for bit.
pub fn sample_outcomes(outcomes: &[CloneOutcome], shots: u64, seed: u64) -> MonteCarloReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let total: f64 = outcomes.iter().map(|o| o.probability).sum();
    let mut counts = vec![0u64; outcomes.len()];
    for _ in 0..shots {
        let u: f64 = rng.random::<f64>() * total;
        let mut acc = 0.0;
        let mut hit = outcomes.len() - 1;
        for (k, o) in outcomes.iter().enumerate() {
            acc += o.probability;
            if u < acc {
                hit = k;
                break;
            }
        }
        counts[hit] += 1;
    }
    let successes = outcomes
        .iter()
        .zip(&counts)
        .filter(|(o, _)| o.success)
        .map(|(_, c)| *c)
        .sum();
    let expected_rate = outcomes.iter().filter(|o| o.success).map(|o| o.probability).sum();
    MonteCarloReport {
        shots,
        successes,
        counts,
        empirical_rate: if shots == 0 { 0.0 } else { successes as f64 / shots as f64 },
        expected_rate,
        seed,
    }
}

/// Monte Carlo run on designated member `input_index`. `expected_rate` is the
/// machine's `η`.
pub fn run_sampled(machine: &CloningMachine, input_index: usize, shots: u64, seed: u64) -> Result<MonteCarloReport> {
    let state = machine
        .states()
        .get(input_index)
        .ok_or(Error::IndexOutOfRange { index: input_index, len: machine.n_states() })?;
    if shots == 0 {
        return Err(Error::Malformed("shots must be positive"));
    }
    let outcomes = run_exact(machine, state)?;
    let mut report = sample_outcomes(&outcomes, shots, seed);
    report.expected_rate = machine.eta();
    Ok(report)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MemberCheck {
    pub success_probability: f64,
    pub fidelity: f64,
    /// `‖U|in_i⟩ − |out_i⟩‖`.
    pub transition_residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub passed: bool,
    pub unitarity_residual: f64,
    pub factor_residual: f64,
    pub members: Vec<MemberCheck>,
}

impl VerificationReport {
    pub fn max_probability_error(&self, eta: f64) -> f64 {
        self.members.iter().map(|m| (m.success_probability - eta).abs()).fold(0.0, f64::max)
    }

    pub fn max_fidelity_error(&self) -> f64 {
        self.members.iter().map(|m| (1.0 - m.fidelity).abs()).fold(0.0, f64::max)
    }

    pub fn max_transition_residual(&self) -> f64 {
        self.members.iter().map(|m| m.transition_residual).fold(0.0, f64::max)
    }
}

/// End-to-end check of a machine against the states it was built for.
///
/// Passes when every member succeeds with probability `η` and fidelity 1
/// (both within `1e-10`), the transition residual is at most `1e-9`, `U` is
/// unitary within `1e-10` and `‖C C† − (X^(1) − η X^(m))‖_F ≤ 1e-10`.
pub fn verify_machine(machine: &CloningMachine, set: &StateSet) -> Result<VerificationReport> {
    if set.dim() != machine.system_dim() {
        return Err(Error::DimensionMismatch { expected: machine.system_dim(), found: set.dim() });
    }
    if set.len() != machine.n_states() {
        return Err(Error::DimensionMismatch { expected: machine.n_states(), found: set.len() });
    }
    let unitarity_residual = machine.unitary().unitarity_residual();
    let factor_residual = machine
        .constants()
        .factor_residual(&gram(set, 1), &gram(set, machine.copies()))?;
    let probe_dim = machine.probe_dim();
    let members: Vec<MemberCheck> = set
        .states()
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let outcomes = run_exact(machine, s)?;
            let success = &outcomes[0];
            let ideal = s.tensor_power(machine.copies() as usize);
            let fidelity = success.post_state.as_ref().map_or(0.0, |p| ideal.fidelity(p));
            let image = machine.unitary().mul_vec(&machine.input_vector(s)?);
            let target = machine.target_output(i)?;
            debug_assert_eq!(image.len(), machine.copy_space_dim() * probe_dim);
            Ok(MemberCheck {
                success_probability: success.probability,
                fidelity,
                transition_residual: crate::linalg::distance(&image, &target),
            })
        })
        .collect::<Result<_>>()?;
    let eta = machine.eta();
    let passed = unitarity_residual <= VERIFY_TOL
        && factor_residual <= VERIFY_TOL
        && members.iter().all(|m| {
            (m.success_probability - eta).abs() <= VERIFY_TOL
                && (m.fidelity - 1.0).abs() <= VERIFY_TOL
                && m.transition_residual <= TRANSITION_TOL
        });
    Ok(VerificationReport { passed, unitarity_residual, factor_residual, members })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthesis::{build_machine, MachineParts};

    fn pair(s: f64) -> StateSet {
        StateSet::new(vec![
            StateVector::basis(2, 0),
            StateVector::from_real(&[s, (1.0 - s * s).sqrt()]).unwrap(),
        ])
        .unwrap()
    }

    fn orthonormal_pair() -> StateSet {
        StateSet::new(vec![StateVector::basis(2, 0), StateVector::basis(2, 1)]).unwrap()
    }

    #[test]
    fn orthonormal_machine_clones_with_certainty() {
        let m = build_machine(&orthonormal_pair(), 1.0, 2).unwrap();
        let out = run_exact(&m, &StateVector::basis(2, 0)).unwrap();
        assert_eq!(out.len(), 3);
        assert!((out[0].probability - 1.0).abs() < 1e-15);
        assert!(out[0].success);
        assert_eq!(out[0].post_state.as_ref().unwrap(), &StateVector::basis(4, 0));
        assert!((out[0].fidelity.unwrap() - 1.0).abs() < 1e-15);
        assert!(out[1].post_state.is_none() && out[2].post_state.is_none());
    }

    #[test]
    fn overlapping_pair_success_rate_is_eta() {
        let set = pair(0.5);
        let eta = 2.0 / 3.0;
        let m = build_machine(&set, eta, 2).unwrap();
        for (i, s) in set.states().iter().enumerate() {
            let out = run_exact(&m, s).unwrap();
            assert!((out[0].probability - eta).abs() < 1e-10);
            assert!((out[0].fidelity.unwrap() - 1.0).abs() < 1e-10);
            let total: f64 = out.iter().map(|o| o.probability).sum();
            assert!((total - 1.0).abs() < 1e-12);
            // √η = ⟨Ψ_iΨ_i P_0|U|in_i⟩ directly.
            let image = m.unitary().mul_vec(&m.input_vector(s).unwrap());
            let clone = s.tensor_power(2);
            let amp: Complex64 = clone
                .amplitudes()
                .iter()
                .enumerate()
                .map(|(a, z)| z.conj() * image[a * 3])
                .sum();
            assert!((amp - Complex64::new(eta.sqrt(), 0.0)).norm() < 1e-10, "member {i}");
        }
    }

    #[test]
    fn non_member_input_has_no_fidelity_field() {
        let m = build_machine(&pair(0.5), 0.5, 2).unwrap();
        let input = StateVector::from_real(&[1.0, 1.0]).unwrap();
        let out = run_exact(&m, &input).unwrap();
        assert!(out.iter().all(|o| o.fidelity.is_none()));
        let total: f64 = out.iter().map(|o| o.probability).sum();
        assert!((total - 1.0).abs() < 1e-12);
        let f = clone_fidelity(&out, &input, 2).unwrap();
        assert!(f < 1.0 - 1e-6);
    }

    #[test]
    fn wrong_input_dimension() {
        let m = build_machine(&pair(0.5), 0.5, 2).unwrap();
        assert!(matches!(run_exact(&m, &StateVector::basis(3, 0)), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn certain_success_samples_every_shot() {
        let m = build_machine(&orthonormal_pair(), 1.0, 2).unwrap();
        let r = run_sampled(&m, 1, 1000, 7).unwrap();
        assert_eq!(r.successes, 1000);
        assert_eq!(r.empirical_rate, 1.0);
    }

    #[test]
    fn sampling_is_reproducible() {
        let m = build_machine(&pair(0.5), 0.6, 2).unwrap();
        let a = run_sampled(&m, 0, 5000, 42).unwrap();
        let b = run_sampled(&m, 0, 5000, 42).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.counts.iter().sum::<u64>(), 5000);
        let c = run_sampled(&m, 0, 5000, 43).unwrap();
        assert_ne!(a.counts, c.counts);
    }

    #[test]
    fn sampling_rejects_bad_index() {
        let m = build_machine(&pair(0.5), 0.6, 2).unwrap();
        assert_eq!(run_sampled(&m, 2, 10, 0), Err(Error::IndexOutOfRange { index: 2, len: 2 }));
    }

    #[test]
    fn verify_passes_on_built_machine() {
        let set = pair(0.4);
        let m = build_machine(&set, 0.5, 2).unwrap();
        let r = verify_machine(&m, &set).unwrap();
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn verify_detects_corrupted_unitary() {
        let set = pair(0.4);
        let m = build_machine(&set, 0.5, 2).unwrap();
        let mut parts: MachineParts = m.into_parts();
        parts.unitary[(3, 5)] += Complex64::new(1e-3, 0.0);
        let bad = CloningMachine::from_parts(parts).unwrap();
        let r = verify_machine(&bad, &set).unwrap();
        assert!(!r.passed);
        assert!(r.unitarity_residual > 5e-4 && r.unitarity_residual < 5e-3, "{}", r.unitarity_residual);
    }
}
