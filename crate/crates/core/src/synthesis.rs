//! Explicit construction of the cloning unitary.
//!
//! For each designated state the machine must send
//!
//! ```text
//! |in_i⟩  = |Ψ_i⟩ ⊗ |Σ⟩ ⊗ |P_0⟩
//! |out_i⟩ = √η |Ψ_i⟩^⊗m ⊗ |P_0⟩ + Σ_j conj(c_ij) |Φ⟩ ⊗ |P_j⟩
//! ```
//!
//! The two families have identical Gram matrices exactly when
//! `C C† = X^(1) − η X^(m)`. Gram-Schmidt on the inputs yields an orthonormal
//! family plus the triangular coefficients; replaying those coefficients on
//! the outputs yields a second orthonormal family; completing both to bases
//! and pairing them gives the unitary.
//!
//! Composite index convention: copy registers first (copy 1 slowest), probe
//! last and fastest, i.e. `((a_1·N + a_2)·N + … + a_m)·(n+1) + p`.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
// Provides float math when std is absent from the build graph.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::feasibility::{constants_matrix, is_feasible, ConstantsMatrix};
use crate::linalg::{self, inner, kron, orthonormality_defect, CMatrix};
use crate::states::{gram, StateSet, StateVector};
use crate::{INDEPENDENCE_TOL, PSD_TOL};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

const GRAM_MATCH_TOL: f64 = 1e-9;
const ORTHONORMAL_TOL: f64 = 1e-10;
/// Candidates whose residual against the accumulated span is at most this
/// are skipped during basis extension.
const EXTENSION_SKIP: f64 = 1e-10;

/// Orthonormal family plus the upper-triangular coefficients that rebuild
/// the originals: `v_j = Σ_{k≤j} coeffs[(k, j)] · ortho_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthonormalizationResult {
    pub ortho: Vec<Vec<Complex64>>,
    /// `γ_j` on the diagonal, `⟨φ'_k|φ_j⟩` above it.
    pub coeffs: CMatrix,
}

/// Classical Gram-Schmidt: projections are taken against the original
/// vector, not the partially reduced one.
pub fn gram_schmidt(vectors: &[Vec<Complex64>], tol: f64) -> Result<OrthonormalizationResult> {
    let n = vectors.len();
    let dim = vectors.first().map_or(0, Vec::len);
    if let Some(bad) = vectors.iter().find(|v| v.len() != dim) {
        return Err(Error::DimensionMismatch { expected: dim, found: bad.len() });
    }
    let mut ortho: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    let mut coeffs = CMatrix::zeros(n, n);
    for (j, v) in vectors.iter().enumerate() {
        let mut residual = v.clone();
        for (k, q) in ortho.iter().enumerate() {
            let proj = inner(q, v);
            coeffs[(k, j)] = proj;
            for (r, x) in residual.iter_mut().zip(q) {
                *r -= proj * x;
            }
        }
        let gamma = linalg::norm(&residual);
        if gamma.is_nan() || gamma <= tol {
            return Err(Error::NearDependent { step: j + 1, residual: gamma });
        }
        coeffs[(j, j)] = Complex64::new(gamma, 0.0);
        for r in &mut residual {
            *r /= gamma;
        }
        ortho.push(residual);
    }
    Ok(OrthonormalizationResult { ortho, coeffs })
}

/// Replays stored Gram-Schmidt coefficients on `targets`.
///
/// The targets must reproduce the inner products of the vectors the
/// coefficients came from (`coeffs† · coeffs`); the outputs are then
/// orthonormal, which is checked rather than assumed.
pub fn apply_coeffs(targets: &[Vec<Complex64>], coeffs: &CMatrix) -> Result<Vec<Vec<Complex64>>> {
    let n = targets.len();
    if coeffs.rows() != n || coeffs.cols() != n {
        return Err(Error::DimensionMismatch { expected: coeffs.rows(), found: n });
    }
    let original_gram = &coeffs.adjoint() * coeffs;
    let mut mismatch = 0.0f64;
    for i in 0..n {
        for j in i..n {
            mismatch = mismatch.max((inner(&targets[i], &targets[j]) - original_gram[(i, j)]).norm());
        }
    }
    if mismatch > GRAM_MATCH_TOL {
        return Err(Error::GramMismatch { residual: mismatch });
    }

    let mut out: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    for (j, t) in targets.iter().enumerate() {
        let mut v = t.clone();
        for (k, q) in out.iter().enumerate() {
            let c = coeffs[(k, j)];
            for (x, y) in v.iter_mut().zip(q) {
                *x -= c * y;
            }
        }
        let gamma = coeffs[(j, j)].re;
        for x in &mut v {
            *x /= gamma;
        }
        out.push(v);
    }
    let defect = orthonormality_defect(&out);
    if defect > GRAM_MATCH_TOL {
        return Err(Error::GramMismatch { residual: defect });
    }
    Ok(out)
}

/// Extends an orthonormal family to a basis of the whole space by
/// orthogonalizing standard basis vectors in index order.
fn extend_to_basis(family: &[Vec<Complex64>], dim: usize) -> Vec<Vec<Complex64>> {
    let mut basis: Vec<Vec<Complex64>> = family.to_vec();
    for index in 0..dim {
        if basis.len() == dim {
            break;
        }
        let mut w = linalg::basis_vector(dim, index);
        // Two passes restore orthogonality lost to cancellation.
        for _ in 0..2 {
            for b in &basis {
                let proj = inner(b, &w);
                for (x, y) in w.iter_mut().zip(b) {
                    *x -= proj * y;
                }
            }
        }
        let r = linalg::norm(&w);
        if r <= EXTENSION_SKIP {
            continue;
        }
        for x in &mut w {
            *x /= r;
        }
        basis.push(w);
    }
    basis
}

/// A unitary sending `domain[i]` to `range[i]`, completed on the orthogonal
/// complements by pairing deterministic basis extensions.
pub fn complete_unitary(domain: &[Vec<Complex64>], range: &[Vec<Complex64>]) -> Result<CMatrix> {
    if domain.len() != range.len() {
        return Err(Error::DimensionMismatch { expected: domain.len(), found: range.len() });
    }
    let dim = domain.first().or(range.first()).map_or(0, Vec::len);
    for v in domain.iter().chain(range) {
        if v.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: v.len() });
        }
    }
    if domain.len() > dim {
        return Err(Error::Malformed("more vectors than dimensions"));
    }
    let defect = orthonormality_defect(domain).max(orthonormality_defect(range));
    if defect > ORTHONORMAL_TOL {
        return Err(Error::NotOrthonormal { residual: defect });
    }
    let from = extend_to_basis(domain, dim);
    let to = extend_to_basis(range, dim);
    debug_assert_eq!(from.len(), dim);
    debug_assert_eq!(to.len(), dim);

    let mut u = CMatrix::zeros(dim, dim);
    for (f, t) in from.iter().zip(&to) {
        for r in 0..dim {
            let tr = t[r];
            if tr == ZERO {
                continue;
            }
            for c in 0..dim {
                u[(r, c)] += tr * f[c].conj();
            }
        }
    }
    Ok(u)
}

/// Everything a [`CloningMachine`] is made of, for persistence.
#[derive(Debug, Clone, PartialEq)]
pub struct MachineParts {
    pub states: StateSet,
    pub copies: u32,
    pub eta: f64,
    pub blank: StateVector,
    pub constants: ConstantsMatrix,
    pub unitary: CMatrix,
    pub fill_state_index: usize,
}

/// A synthesized probabilistic cloning machine.
#[derive(Debug, Clone, PartialEq)]
pub struct CloningMachine {
    parts: MachineParts,
}

impl CloningMachine {
    /// Reassembles a machine, checking only that the shapes agree.
    /// Use [`crate::verify_machine`] to check the physics.
    pub fn from_parts(parts: MachineParts) -> Result<Self> {
        let n_dim = parts.states.dim();
        let n = parts.states.len();
        if parts.copies < 2 {
            return Err(Error::InvalidCopies(parts.copies as usize));
        }
        if !(0.0..=1.0).contains(&parts.eta) {
            return Err(Error::InvalidEfficiency(parts.eta));
        }
        let copy_dim = n_dim
            .checked_pow(parts.copies)
            .ok_or(Error::Malformed("composite dimension overflows"))?;
        let blank_dim = copy_dim / n_dim;
        if parts.blank.dim() != blank_dim {
            return Err(Error::DimensionMismatch { expected: blank_dim, found: parts.blank.dim() });
        }
        if parts.constants.order() != n {
            return Err(Error::DimensionMismatch { expected: n, found: parts.constants.order() });
        }
        let d = copy_dim * (n + 1);
        if parts.unitary.rows() != d || parts.unitary.cols() != d {
            return Err(Error::DimensionMismatch { expected: d, found: parts.unitary.rows() });
        }
        if parts.fill_state_index >= copy_dim {
            return Err(Error::Malformed("fill state index out of range"));
        }
        Ok(CloningMachine { parts })
    }

    pub fn into_parts(self) -> MachineParts {
        self.parts
    }

    pub fn parts(&self) -> &MachineParts {
        &self.parts
    }

    pub fn system_dim(&self) -> usize {
        self.parts.states.dim()
    }

    pub fn copies(&self) -> u32 {
        self.parts.copies
    }

    pub fn n_states(&self) -> usize {
        self.parts.states.len()
    }

    pub fn probe_dim(&self) -> usize {
        self.n_states() + 1
    }

    pub fn eta(&self) -> f64 {
        self.parts.eta
    }

    pub fn blank(&self) -> &StateVector {
        &self.parts.blank
    }

    pub fn constants(&self) -> &ConstantsMatrix {
        &self.parts.constants
    }

    pub fn unitary(&self) -> &CMatrix {
        &self.parts.unitary
    }

    pub fn fill_state_index(&self) -> usize {
        self.parts.fill_state_index
    }

    pub fn states(&self) -> &StateSet {
        &self.parts.states
    }

    /// Dimension `N^m` of the copy registers.
    pub fn copy_space_dim(&self) -> usize {
        self.system_dim().pow(self.copies())
    }

    /// `D = N^m · (n + 1)`.
    pub fn composite_dim(&self) -> usize {
        self.copy_space_dim() * self.probe_dim()
    }

    /// `|input⟩ ⊗ |Σ⟩ ⊗ |P_0⟩`.
    pub fn input_vector(&self, input: &StateVector) -> Result<Vec<Complex64>> {
        if input.dim() != self.system_dim() {
            return Err(Error::DimensionMismatch { expected: self.system_dim(), found: input.dim() });
        }
        Ok(input_vector(input, &self.parts.blank, self.probe_dim()))
    }

    /// The target `|out_i⟩` for member `index`.
    pub fn target_output(&self, index: usize) -> Result<Vec<Complex64>> {
        let state = self
            .parts
            .states
            .get(index)
            .ok_or(Error::IndexOutOfRange { index, len: self.n_states() })?;
        Ok(output_vector(
            state,
            index,
            self.copies(),
            self.parts.eta,
            &self.parts.constants,
            self.parts.fill_state_index,
        ))
    }

    /// `‖U|in_i⟩ − |out_i⟩‖` for every member.
    pub fn transition_residuals(&self) -> Vec<f64> {
        self.parts
            .states
            .states()
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let image = self.parts.unitary.mul_vec(&input_vector(s, &self.parts.blank, self.probe_dim()));
                let target = self.target_output(i).expect("member index in range");
                linalg::distance(&image, &target)
            })
            .collect()
    }
}

fn input_vector(state: &StateVector, blank: &StateVector, probe_dim: usize) -> Vec<Complex64> {
    let ab = kron(state.amplitudes(), blank.amplitudes());
    kron(&ab, &linalg::basis_vector(probe_dim, 0))
}

fn output_vector(
    state: &StateVector,
    index: usize,
    copies: u32,
    eta: f64,
    constants: &ConstantsMatrix,
    fill: usize,
) -> Vec<Complex64> {
    let n = constants.order();
    let probe_dim = n + 1;
    let clone = state.tensor_power(copies as usize);
    let mut out = vec![ZERO; clone.dim() * probe_dim];
    let amp = eta.sqrt();
    for (a, z) in clone.amplitudes().iter().enumerate() {
        out[a * probe_dim] = z * amp;
    }
    // Conjugated so that ⟨out_i|out_k⟩ picks up (C C†)_ik rather than its transpose.
    let c = constants.matrix();
    for j in 0..n {
        out[fill * probe_dim + j + 1] += c[(index, j)].conj();
    }
    out
}

/// [`build_machine_with_blank`] with `|Σ⟩ = |0⟩^⊗(m−1)`.
pub fn build_machine(set: &StateSet, eta: f64, copies: u32) -> Result<CloningMachine> {
    if copies < 2 {
        return Err(Error::InvalidCopies(copies as usize));
    }
    let blank_dim = set.dim().pow(copies - 1);
    build_machine_with_blank(set, eta, copies, StateVector::basis(blank_dim, 0))
}

/// Synthesizes the unitary for `set` at efficiency `eta` producing `copies`
/// clones, starting the copy registers in `blank`.
pub fn build_machine_with_blank(
    set: &StateSet,
    eta: f64,
    copies: u32,
    blank: StateVector,
) -> Result<CloningMachine> {
    if copies < 2 {
        return Err(Error::InvalidCopies(copies as usize));
    }
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::InvalidEfficiency(eta));
    }
    let blank_dim = set.dim().pow(copies - 1);
    if blank.dim() != blank_dim {
        return Err(Error::DimensionMismatch { expected: blank_dim, found: blank.dim() });
    }
    let independence = set.independence();
    if !independence.independent {
        return Err(Error::DependentSet { min_eigenvalue: independence.min_eigenvalue });
    }
    let x1 = gram(set, 1);
    let xm = gram(set, copies);
    let check = is_feasible(&x1, &xm, eta, PSD_TOL)?;
    if !check.feasible {
        return Err(Error::Infeasible { eta, min_eigenvalue: check.min_eigenvalue });
    }
    let constants = constants_matrix(&x1, &xm, eta)?;

    let fill_state_index = 0;
    let n = set.len();
    let inputs: Vec<_> = set.states().iter().map(|s| input_vector(s, &blank, n + 1)).collect();
    let outputs: Vec<_> = set
        .states()
        .iter()
        .enumerate()
        .map(|(i, s)| output_vector(s, i, copies, eta, &constants, fill_state_index))
        .collect();

    let mut mismatch = 0.0f64;
    for i in 0..n {
        for k in i..n {
            let lhs = inner(&inputs[i], &inputs[k]);
            let rhs = inner(&outputs[i], &outputs[k]);
            mismatch = mismatch.max((lhs - rhs).norm());
        }
    }
    if mismatch > GRAM_MATCH_TOL {
        return Err(Error::GramMismatch { residual: mismatch });
    }

    let gs = gram_schmidt(&inputs, INDEPENDENCE_TOL)?;
    let transported = apply_coeffs(&outputs, &gs.coeffs)?;
    let unitary = complete_unitary(&gs.ortho, &transported)?;

    CloningMachine::from_parts(MachineParts {
        states: set.clone(),
        copies,
        eta,
        blank,
        constants,
        unitary,
        fill_state_index,
    })
}
