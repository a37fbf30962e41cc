//! The cloning feasibility condition `X^(1) = η X^(m) + C C†`.
//!
//! A factor `C` exists exactly when `X^(1) − η X^(m)` is positive
//! semidefinite. The supremum of admissible `η` is computed two ways: from the
//! largest eigenvalue of the whitened matrix `X^(1)^(−1/2) X^(m) X^(1)^(−1/2)`,
//! and by bisection on the PSD test alone. The two routes share nothing but
//! the Hermitian eigensolver.


// Provides float math when std is absent from the build graph.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, CMatrix};
use crate::states::{gram, GramMatrix, StateSet};
use crate::{INDEPENDENCE_TOL, PSD_TOL};

/// Outcome of a single PSD test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Feasibility {
    pub feasible: bool,
    /// Minimum eigenvalue of `X^(1) − η X^(m)`.
    pub min_eigenvalue: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Eigen,
    Bisection,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeasibilityReport {
    pub eta_star: f64,
    pub copies: u32,
    /// Minimum eigenvalue of `X^(1) − η* X^(m)`.
    pub min_eigenvalue_at_eta: f64,
    pub method: Method,
    pub independent: bool,
}

impl FeasibilityReport {
    fn dependent(copies: u32, method: Method, x1: &GramMatrix, xm: &GramMatrix) -> Self {
        FeasibilityReport {
            eta_star: 0.0,
            copies,
            min_eigenvalue_at_eta: difference(x1, xm, 0.0).map_or(f64::NAN, |m| hermitian_eigen(&m).min()),
            method,
            independent: false,
        }
    }
}

fn check_orders(x1: &GramMatrix, xm: &GramMatrix) -> Result<()> {
    if x1.order() != xm.order() {
        return Err(Error::DimensionMismatch { expected: x1.order(), found: xm.order() });
    }
    Ok(())
}

fn check_eta(eta: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::InvalidEfficiency(eta));
    }
    Ok(())
}

/// `X^(1) − η X^(m)`, exactly Hermitian.
fn difference(x1: &GramMatrix, xm: &GramMatrix, eta: f64) -> Result<CMatrix> {
    check_orders(x1, xm)?;
    let n = x1.order();
    let (a, b) = (x1.matrix(), xm.matrix());
    Ok(CMatrix::from_fn(n, n, |i, j| {
        if i <= j {
            a[(i, j)] - b[(i, j)] * eta
        } else {
            (a[(j, i)] - b[(j, i)] * eta).conj()
        }
    }))
}

/// PSD test for `X^(1) − η X^(m)` with eigenvalue slack `tol`.
pub fn is_feasible(x1: &GramMatrix, xm: &GramMatrix, eta: f64, tol: f64) -> Result<Feasibility> {
    check_eta(eta)?;
    let min_eigenvalue = hermitian_eigen(&difference(x1, xm, eta)?).min();
    Ok(Feasibility { feasible: min_eigenvalue >= -tol, min_eigenvalue })
}

/// Exact supremum of feasible `η` via the whitened generalized eigenproblem.
///
/// `η* = min(1, 1/λ_max(W))`, `W = X^(1)^(−1/2) X^(m) X^(1)^(−1/2)`. Fails with
/// [`Error::DependentSet`] when `X^(1)` is not positive-definite.
pub fn max_efficiency_eigen(x1: &GramMatrix, xm: &GramMatrix) -> Result<FeasibilityReport> {
    check_orders(x1, xm)?;
    let eig = hermitian_eigen(x1.matrix());
    if eig.min() <= INDEPENDENCE_TOL {
        return Err(Error::DependentSet { min_eigenvalue: eig.min() });
    }
    let inv_sqrt = eig.map(|l| 1.0 / l.sqrt());
    let whitened = &(&inv_sqrt * xm.matrix()) * &inv_sqrt;
    let whitened = GramMatrix::from_matrix(xm.power(), &whitened)?;
    let lambda_max = hermitian_eigen(whitened.matrix()).max();
    let eta_star = if lambda_max <= 1.0 { 1.0 } else { 1.0 / lambda_max };
    Ok(FeasibilityReport {
        eta_star,
        copies: xm.power(),
        min_eigenvalue_at_eta: hermitian_eigen(&difference(x1, xm, eta_star)?).min(),
        method: Method::Eigen,
        independent: true,
    })
}

/// Largest feasible `η` found by bisection on [`is_feasible`].
///
/// Dependent sets report `η* = 0` without error.
pub fn max_efficiency_bisect(x1: &GramMatrix, xm: &GramMatrix, tol: f64) -> Result<FeasibilityReport> {
    check_orders(x1, xm)?;
    let copies = xm.power();
    if x1.min_eigenvalue() <= INDEPENDENCE_TOL {
        return Ok(FeasibilityReport::dependent(copies, Method::Bisection, x1, xm));
    }
    let report = |eta: f64, min_eigenvalue_at_eta: f64| FeasibilityReport {
        eta_star: eta,
        copies,
        min_eigenvalue_at_eta,
        method: Method::Bisection,
        independent: true,
    };
    let top = is_feasible(x1, xm, 1.0, PSD_TOL)?;
    if top.feasible {
        return Ok(report(1.0, top.min_eigenvalue));
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut at_lo = is_feasible(x1, xm, 0.0, PSD_TOL)?.min_eigenvalue;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let f = is_feasible(x1, xm, mid, PSD_TOL)?;
        if f.feasible {
            lo = mid;
            at_lo = f.min_eigenvalue;
        } else {
            hi = mid;
        }
    }
    Ok(report(lo, at_lo))
}

/// Maximal efficiency of an `copies`-fold machine for `set`, never failing on
/// dependent sets (they report `η* = 0`).
pub fn max_efficiency(set: &StateSet, copies: u32) -> Result<FeasibilityReport> {
    if copies < 2 {
        return Err(Error::InvalidCopies(copies as usize));
    }
    let x1 = gram(set, 1);
    let xm = gram(set, copies);
    match max_efficiency_eigen(&x1, &xm) {
        Err(Error::DependentSet { .. }) => Ok(FeasibilityReport::dependent(copies, Method::Eigen, &x1, &xm)),
        other => other,
    }
}

/// The superposition constants `C` with `C C† = X^(1) − η X^(m)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantsMatrix {
    entries: CMatrix,
    eta: f64,
}

impl ConstantsMatrix {
    /// Reassembles a persisted constants matrix.
    pub fn from_parts(entries: CMatrix, eta: f64) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::Malformed("constants matrix must be square"));
        }
        check_eta(eta)?;
        Ok(ConstantsMatrix { entries, eta })
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.entries.rows()
    }

    #[inline]
    pub fn matrix(&self) -> &CMatrix {
        &self.entries
    }

    #[inline]
    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// `‖C C† − (X^(1) − η X^(m))‖_F`.
    pub fn factor_residual(&self, x1: &GramMatrix, xm: &GramMatrix) -> Result<f64> {
        let target = difference(x1, xm, self.eta)?;
        if target.rows() != self.order() {
            return Err(Error::DimensionMismatch { expected: self.order(), found: target.rows() });
        }
        let cc = &self.entries * &self.entries.adjoint();
        Ok((&cc - &target).frobenius_norm())
    }
}

/// Hermitian PSD square root of `X^(1) − η X^(m)`.
///
/// Eigenvalues in `[−1e-10, 0)` are clamped to zero; anything more negative is
/// [`Error::Infeasible`].
pub fn constants_matrix(x1: &GramMatrix, xm: &GramMatrix, eta: f64) -> Result<ConstantsMatrix> {
    check_eta(eta)?;
    let eig = hermitian_eigen(&difference(x1, xm, eta)?);
    if eig.min() < -PSD_TOL {
        return Err(Error::Infeasible { eta, min_eigenvalue: eig.min() });
    }
    let entries = eig.map(|l| l.max(0.0).sqrt()).mirror_upper();
    Ok(ConstantsMatrix { entries, eta })
}
