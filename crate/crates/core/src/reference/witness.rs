//! Simulated-annealing search for a decomposable witness
//! `W = Σ_ij c_ij a_i ⊗ b_j` with `a, b ∈ {I, S^x, S^y, S^z}`,
//! `W = P + Q^{T_A}`, `P, Q ⪰ 0` and `Tr W = 1`.
//!
//! Feasibility of each candidate is certified by alternating projections
//! between `{P ⪰ 0}` and `{P : (W − P)^{T_A} ⪰ 0}`. Both projections are exact
//! eigenvalue clips because the partial transpose is a Frobenius isometry.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{self, kron, ComplexMatrix, Subsystem};
use crate::observables::collective_spin_matrices;
use crate::states::DensityMatrix;

/// Number of coefficients `c_ij`, `i, j ∈ 0..4`.
pub const WITNESS_BASIS_LEN: usize = 16;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnealParams {
    /// Initial temperature.
    pub t0: f64,
    /// Geometric cooling factor applied after each sweep.
    pub decay: f64,
    pub sweeps: usize,
    /// Coefficient bound is `box_factor / Tr(I)`.
    pub box_factor: f64,
    /// Alternating projections stop once the iterates are this close.
    pub feasibility_tol: f64,
    pub max_projection_iters: usize,
    /// Largest Hilbert-space dimension the search accepts.
    pub max_dim: usize,
}

impl Default for AnnealParams {
    fn default() -> Self {
        Self {
            t0: 1.0,
            decay: 0.98,
            sweeps: 300,
            box_factor: 10.0,
            feasibility_tol: 1e-8,
            max_projection_iters: 500,
            max_dim: 36,
        }
    }
}

impl AnnealParams {
    pub fn validate(&self) -> Result<()> {
        let positive = |x: f64| x > 0.0 && x.is_finite();
        if !positive(self.t0) {
            return Err(Error::invalid("t0", "initial temperature must be positive"));
        }
        if !(self.decay > 0.0 && self.decay <= 1.0) {
            return Err(Error::invalid("decay", "cooling factor must lie in (0, 1]"));
        }
        if self.sweeps == 0 {
            return Err(Error::invalid("sweeps", "at least one sweep is required"));
        }
        if !positive(self.box_factor) {
            return Err(Error::invalid("box", "coefficient box must be positive"));
        }
        if !positive(self.feasibility_tol) || self.max_projection_iters == 0 {
            return Err(Error::invalid(
                "feasibility",
                "tolerance and iteration cap must be positive",
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessResult {
    /// Best `⟨W⟩` found; negative certifies entanglement.
    pub min_expectation: f64,
    /// `c_ij`, rows indexed by the A operator.
    pub coefficients: Vec<Vec<f64>>,
    pub feasibility_residual: f64,
    pub seed: u64,
    /// Proposals made.
    pub iterations: usize,
}

struct Basis {
    dim_a: usize,
    dim_b: usize,
    ops: Vec<ComplexMatrix>,
}

impl Basis {
    fn new(m: usize) -> Result<Self> {
        let n = m + 1;
        let [sx, sy, sz] = collective_spin_matrices(m)?;
        let local = [ComplexMatrix::identity(n), sx, sy, sz];
        let mut ops = Vec::with_capacity(WITNESS_BASIS_LEN);
        for a in &local {
            for b in &local {
                ops.push(kron(a, b));
            }
        }
        Ok(Self {
            dim_a: n,
            dim_b: n,
            ops,
        })
    }

    fn pt_a(&self, m: &ComplexMatrix) -> ComplexMatrix {
        matrix::partial_transpose(m, self.dim_a, self.dim_b, Subsystem::A)
            .expect("witness operators share the ensemble dimensions")
    }
}

const STALL_WINDOW: usize = 20;
const STALL_RATIO: f64 = 0.95;

/// Outcome of the decomposability check for one candidate.
enum Feasibility {
    Feasible { p: ComplexMatrix, residual: f64 },
    Unresolved,
}

fn check_decomposable(
    w: &ComplexMatrix,
    start: &ComplexMatrix,
    basis: &Basis,
    params: &AnnealParams,
) -> Result<Feasibility> {
    let mut p = start.clone();
    let mut checkpoint = f64::INFINITY;
    for it in 0..params.max_projection_iters {
        let p1 = matrix::psd_project(&p)?;
        let q = matrix::psd_project(&basis.pt_a(&(w - &p1)))?;
        let p2 = w - &basis.pt_a(&q);
        let residual = (&p1 - &p2).frobenius_norm();
        if residual <= params.feasibility_tol {
            return Ok(Feasibility::Feasible { p: p1, residual });
        }
        // Infeasible candidates plateau at their distance from the cone.
        if it % STALL_WINDOW == STALL_WINDOW - 1 {
            if residual > STALL_RATIO * checkpoint {
                break;
            }
            checkpoint = residual;
        }
        p = p2;
    }
    Ok(Feasibility::Unresolved)
}

/// Minimizes `⟨W⟩_ρ` over decomposable witnesses in the span of local spin
/// operators. Deterministic for a fixed seed.
pub fn witness_optimize(
    rho: &DensityMatrix,
    m: usize,
    params: &AnnealParams,
    seed: u64,
) -> Result<WitnessResult> {
    params.validate()?;
    let d = (m + 1) * (m + 1);
    if d > params.max_dim {
        return Err(Error::invalid(
            "M",
            format!(
                "witness search at dimension {d} exceeds the cap of {}; each proposal needs \
                 repeated {d}x{d} eigendecompositions",
                params.max_dim
            ),
        ));
    }
    if rho.dim_a() != m + 1 || rho.dim_b() != m + 1 {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: rho.dim(),
        });
    }
    let basis = Basis::new(m)?;
    let correlators: Vec<f64> = basis.ops.iter().map(|o| rho.expectation(o).re).collect();
    let bound = params.box_factor / d as f64;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coeffs = [0.0; WITNESS_BASIS_LEN];
    coeffs[0] = 1.0 / d as f64;
    let mut w = basis.ops[0].scale_real(coeffs[0]);
    let mut p = w.clone();
    let mut value = coeffs[0] * correlators[0];
    let mut residual = 0.0;
    let mut best = (value, coeffs, residual);

    let mut temperature = params.t0;
    let mut iterations = 0;
    for _ in 0..params.sweeps {
        let step = Normal::new(0.0, bound * temperature / params.t0)
            .map_err(|e| Error::Numerical(e.to_string()))?;
        for _ in 1..WITNESS_BASIS_LEN {
            iterations += 1;
            let idx = rng.random_range(1..WITNESS_BASIS_LEN);
            let proposed = (coeffs[idx] + step.sample(&mut rng)).clamp(-bound, bound);
            let delta = proposed - coeffs[idx];
            let candidate_value = value + delta * correlators[idx];
            let uniform: f64 = rng.random();
            let accept = candidate_value <= value
                || uniform < (-(candidate_value - value) / temperature).exp();
            if !accept || delta == 0.0 {
                continue;
            }
            let candidate = &w + &basis.ops[idx].scale_real(delta);
            if let Feasibility::Feasible {
                p: new_p,
                residual: r,
            } = check_decomposable(&candidate, &p, &basis, params)?
            {
                coeffs[idx] = proposed;
                w = candidate;
                p = new_p;
                value = candidate_value;
                residual = r;
                if value < best.0 {
                    best = (value, coeffs, residual);
                }
            }
        }
        temperature *= params.decay;
    }

    let (min_expectation, coeffs, feasibility_residual) = best;
    Ok(WitnessResult {
        min_expectation,
        coefficients: coeffs.chunks(4).map(<[f64]>::to_vec).collect(),
        feasibility_residual,
        seed,
        iterations,
    })
}

/// Rebuilds `W` from a result's coefficients.
pub fn witness_operator(m: usize, coefficients: &[Vec<f64>]) -> Result<ComplexMatrix> {
    let basis = Basis::new(m)?;
    let d = (m + 1) * (m + 1);
    let mut w = ComplexMatrix::zeros(d);
    for (op, &c) in basis.ops.iter().zip(coefficients.iter().flatten()) {
        if c != 0.0 {
            w = &w + &op.scale_real(c);
        }
    }
    Ok(w)
}
