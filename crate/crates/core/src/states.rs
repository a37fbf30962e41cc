//! Pure states, state sets and their Gram matrices.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, hermitian_eigen, CMatrix};
use crate::INDEPENDENCE_TOL;

const ZERO_NORM: f64 = 1e-14;
const NORM_TOL: f64 = 1e-12;

/// A normalized amplitude vector.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
}

/// Scales `amplitudes` to unit norm.
pub fn make_state(amplitudes: impl Into<Vec<Complex64>>) -> Result<StateVector> {
    let mut amplitudes = amplitudes.into();
    let n = linalg::norm(&amplitudes);
    if amplitudes.is_empty() || !n.is_finite() || n < ZERO_NORM {
        return Err(Error::ZeroVector);
    }
    for a in &mut amplitudes {
        *a /= n;
    }
    Ok(StateVector { amplitudes })
}

impl StateVector {
    /// Accepts amplitudes that are already normalized, without rescaling them.
    ///
    /// Used when reloading persisted states so the stored bits survive.
    pub fn from_normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::ZeroVector);
        }
        let n = linalg::norm(&amplitudes);
        if n.is_nan() || (n - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm: n });
        }
        Ok(StateVector { amplitudes })
    }

    /// The computational basis state `|index⟩`.
    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(index < dim, "basis index out of range");
        StateVector { amplitudes: linalg::basis_vector(dim, index) }
    }

    /// Real amplitudes convenience constructor; normalizes like [`make_state`].
    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        make_state(amplitudes.iter().map(|&x| Complex64::new(x, 0.0)).collect::<Vec<_>>())
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    #[inline]
    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        linalg::inner(&self.amplitudes, &other.amplitudes)
    }

    /// `|self⟩^⊗k` as a state on the `dim^k` space.
    pub fn tensor_power(&self, k: usize) -> StateVector {
        StateVector { amplitudes: linalg::tensor_power(&self.amplitudes, k) }
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.inner(other).norm_sqr()
    }
}

/// An ordered, non-empty list of states sharing one dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSet {
    dim: usize,
    states: Vec<StateVector>,
}

impl StateSet {
    pub fn new(states: Vec<StateVector>) -> Result<Self> {
        let dim = states.first().ok_or(Error::EmptySet)?.dim();
        if let Some(bad) = states.iter().find(|s| s.dim() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: bad.dim() });
        }
        Ok(StateSet { dim, states })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.states.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[StateVector] {
        &self.states
    }

    pub fn get(&self, index: usize) -> Option<&StateVector> {
        self.states.get(index)
    }

    /// Index of the member equal to `state` up to a global phase, if any.
    pub fn position(&self, state: &StateVector) -> Option<usize> {
        if state.dim() != self.dim {
            return None;
        }
        self.states.iter().position(|s| s.fidelity(state) >= 1.0 - NORM_TOL)
    }
}

/// `X^(k)` with entries `⟨Ψ_i|Ψ_j⟩^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    power: u32,
    entries: CMatrix,
}

impl GramMatrix {
    /// Wraps an explicit Hermitian matrix. The upper triangle is mirrored so
    /// the result is exactly Hermitian.
    pub fn from_matrix(power: u32, entries: &CMatrix) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::Malformed("Gram matrix must be square"));
        }
        Ok(GramMatrix { power, entries: entries.mirror_upper() })
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.entries.rows()
    }

    #[inline]
    pub fn power(&self) -> u32 {
        self.power
    }

    #[inline]
    pub fn matrix(&self) -> &CMatrix {
        &self.entries
    }

    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_eigen(&self.entries).min()
    }
}

/// Gram matrix of the `power`-fold tensor powers of the set.
pub fn gram(set: &StateSet, power: u32) -> GramMatrix {
    assert!(power >= 1, "Gram power must be at least 1");
    let n = set.len();
    let mut m = CMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = Complex64::new(1.0, 0.0);
        for j in i + 1..n {
            let z = set.states[i].inner(&set.states[j]).powu(power);
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    GramMatrix { power, entries: m }
}

/// Independence verdict plus the minimum eigenvalue of `X^(1)` as witness.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Independence {
    pub independent: bool,
    pub min_eigenvalue: f64,
}

/// The set is independent iff `X^(1)` is positive-definite beyond `tol`.
pub fn is_linearly_independent(set: &StateSet, tol: f64) -> Independence {
    let min_eigenvalue = gram(set, 1).min_eigenvalue();
    Independence { independent: min_eigenvalue > tol, min_eigenvalue }
}

impl StateSet {
    /// [`is_linearly_independent`] at the default tolerance.
    pub fn independence(&self) -> Independence {
        is_linearly_independent(self, INDEPENDENCE_TOL)
    }
}
