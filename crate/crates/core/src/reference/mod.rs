//! Reference criteria used to cross-check the covariance criterion: the full
//! PPT test, the quadrature (Duan-Simon) instance of the criterion, and a
//! simulated-annealing search for decomposable witnesses.

mod witness;

pub use witness::{
    witness_operator, witness_optimize, AnnealParams, WitnessResult, WITNESS_BASIS_LEN,
};

use crate::criterion::{detect, CriterionReport, PreparedSet};
use crate::error::{Error, Result};
use crate::matrix::{self, Subsystem};
use crate::observables::{
    collective_spin_set, hp_quadrature_set, quadratures_from_spins, rotate_so3,
};
use crate::states::{DensityMatrix, PureState};

/// Minimum eigenvalue of `ρ^{T_B}`; negative means entangled.
pub fn ppt_min_eigenvalue(rho: &DensityMatrix) -> Result<f64> {
    let eig =
        matrix::hermitian_eigenvalues(&rho.partial_transpose(Subsystem::B), matrix::HERMITIAN_TOL)?;
    Ok(eig[0])
}

/// Schmidt coefficients of a bipartite pure state, descending.
pub fn schmidt_coefficients(psi: &PureState) -> Result<Vec<f64>> {
    let (da, db) = (psi.dim_a(), psi.dim_b());
    let amps = nalgebra::DMatrix::from_fn(da, db, |a, b| psi.amplitude(a, b));
    let mut s: Vec<f64> = amps.singular_values().iter().copied().collect();
    if s.iter().any(|x| !x.is_finite()) {
        return Err(Error::Numerical("non-finite singular value".into()));
    }
    s.sort_by(|a, b| b.total_cmp(a));
    Ok(s)
}

/// `ppt_min_eigenvalue` of `(1−μ)/D·I + μ|ψ⟩⟨ψ|` without forming the state.
/// The partial transpose of `|ψ⟩⟨ψ|` has spectrum `{λ_i²} ∪ {±λ_iλ_j}_{i<j}`
/// padded with zeros.
pub fn werner_ppt_min_eigenvalue(psi: &PureState, mu: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&mu) {
        return Err(Error::invalid("mu", format!("{mu} is outside [0, 1]")));
    }
    let s = schmidt_coefficients(psi)?;
    let d = psi.dim_a() * psi.dim_b();
    // Sorted descending, so the extremes are the last square and −λ₀λ₁.
    let n = s.len();
    let mut min_pt = match n * n < d {
        true => 0.0,
        false => s[n - 1] * s[n - 1],
    };
    if n > 1 {
        min_pt = min_pt.min(-s[0] * s[1]);
    }
    Ok((1.0 - mu) / d as f64 + mu * min_pt)
}

fn check_ensemble_dims(rho: &DensityMatrix, m: usize) -> Result<()> {
    if rho.dim_a() != m + 1 || rho.dim_b() != m + 1 {
        return Err(Error::DimensionMismatch {
            expected: (m + 1) * (m + 1),
            found: rho.dim(),
        });
    }
    Ok(())
}

/// Criterion on the Holstein-Primakoff quadratures `(x_A, p_A, x_B, p_B)`.
pub fn duan_simon_report(rho: &DensityMatrix, m: usize, tol: f64) -> Result<CriterionReport> {
    check_ensemble_dims(rho, m)?;
    let set = PreparedSet::new(&hp_quadrature_set(m)?)?;
    detect(&set.criterion_matrix(rho)?, tol)
}

/// Quadratures taken from spin axes rotated by `r` before the
/// Holstein-Primakoff identification.
pub fn duan_simon_report_rotated(
    rho: &DensityMatrix,
    m: usize,
    r: &[[f64; 3]; 3],
    tol: f64,
) -> Result<CriterionReport> {
    check_ensemble_dims(rho, m)?;
    let spins = rotate_so3(&collective_spin_set(m)?, r)?;
    let set = PreparedSet::new(&quadratures_from_spins(&spins, m)?)?;
    detect(&set.criterion_matrix(rho)?, tol)
}
