//! Randomized property battery for the uncertainty relations: positivity of
//! the uncertainty matrix, the pure-state Gram identity, symmetry of `V` and
//! `Ω`, the invariant/residual correspondence and mixed-state concavity.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::criterion::PreparedSet;
use crate::error::{Error, Result};
use crate::matrix::{self, ComplexMatrix, C64};
use crate::observables::{Observable, ObservableSet, Support};
use crate::states::{DensityMatrix, PureState};
use crate::sweep::derive_seed;
use crate::uncertainty::uncertainty_report;

pub const PSD_TOL: f64 = 1e-9;
pub const GRAM_TOL: f64 = 1e-10;
pub const SYMMETRY_TOL: f64 = 1e-10;
pub const INVARIANT_TOL: f64 = 1e-9;

/// Largest local dimension drawn for a trial state.
const MAX_LOCAL_DIM: usize = 3;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteConfig {
    pub trials: usize,
    /// Operator counts are drawn from `1..=max_n`.
    pub max_n: usize,
    pub seed: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            trials: 1000,
            max_n: 8,
            seed: 0,
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::invalid("trials", "at least one trial is required"));
        }
        if self.max_n == 0 {
            return Err(Error::invalid("max_n", "must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PropertyOutcome {
    pub name: &'static str,
    pub checked: usize,
    pub failures: usize,
    /// Largest violation seen: a distance for equalities, the most negative
    /// eigenvalue (negated) for positivity checks.
    pub worst: f64,
    pub tolerance: f64,
}

impl PropertyOutcome {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Self {
            name,
            checked: 0,
            failures: 0,
            worst: 0.0,
            tolerance,
        }
    }

    fn record(&mut self, violation: f64) {
        self.checked += 1;
        if violation.is_nan() || violation > self.tolerance {
            self.failures += 1;
        }
        if violation > self.worst || violation.is_nan() {
            self.worst = violation;
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub config: SuiteConfig,
    pub outcomes: Vec<PropertyOutcome>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(PropertyOutcome::passed)
    }
}

fn complex_gaussian(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
}

pub fn random_pure_state(dim_a: usize, dim_b: usize, rng: &mut ChaCha8Rng) -> Result<PureState> {
    let amps = (0..dim_a * dim_b).map(|_| complex_gaussian(rng)).collect();
    PureState::normalized(dim_a, dim_b, amps)
}

pub fn random_hermitian(dim: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(dim, |_, _| complex_gaussian(rng));
    g.hermitian_part()
}

/// `⟨f_j|f_k⟩` with `|f_i⟩ = (ξ_i − ⟨ξ_i⟩)|ψ⟩`.
pub fn gram_matrix(psi: &PureState, ops: &[&ComplexMatrix]) -> ComplexMatrix {
    let amps = psi.amplitudes();
    let f: Vec<Vec<C64>> = ops
        .iter()
        .map(|x| {
            let mean = x.expectation_pure(amps).re;
            x.apply(amps)
                .iter()
                .zip(amps)
                .map(|(a, p)| a - p * mean)
                .collect()
        })
        .collect();
    ComplexMatrix::from_fn(ops.len(), |j, k| {
        f[j].iter().zip(&f[k]).map(|(a, b)| a.conj() * b).sum()
    })
}

struct Trial {
    components: Vec<PureState>,
    weights: Vec<f64>,
    rho: DensityMatrix,
    set: ObservableSet,
}

fn draw_trial(cfg: &SuiteConfig, index: usize) -> Result<Trial> {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, index as u64));
    let dim_a = rng.random_range(1..=MAX_LOCAL_DIM);
    let dim_b = rng.random_range(1..=MAX_LOCAL_DIM);
    let d = dim_a * dim_b;
    let rank = rng.random_range(1..=d.max(2));
    let components = (0..rank)
        .map(|_| random_pure_state(dim_a, dim_b, &mut rng))
        .collect::<Result<Vec<_>>>()?;
    let raw: Vec<f64> = (0..rank).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
    let rho = DensityMatrix::mixture(&weights, &components)?;

    // A random subset of a larger pool of random observables.
    let n = rng.random_range(1..=cfg.max_n);
    let pool = cfg.max_n + 2;
    let mut picked = sample(&mut rng, pool, n).into_vec();
    picked.sort_unstable();
    let ops: Vec<ComplexMatrix> = (0..pool).map(|_| random_hermitian(d, &mut rng)).collect();
    let observables = picked
        .iter()
        .map(|&i| {
            Observable::new(
                format!("X{i}"),
                ops[i].clone(),
                Support::Joint,
                None,
                dim_a,
                dim_b,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let set = ObservableSet::new(dim_a, dim_b, observables)?;
    Ok(Trial {
        components,
        weights,
        rho,
        set,
    })
}

fn min_eigenvalue(m: &ComplexMatrix) -> Result<f64> {
    Ok(matrix::hermitian_eigenvalues(m, matrix::HERMITIAN_TOL)?[0])
}

pub fn run_uncertainty_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    cfg.validate()?;
    let mut psd = PropertyOutcome::new("uncertainty_matrix_psd", PSD_TOL);
    let mut gram = PropertyOutcome::new("pure_state_gram_identity", GRAM_TOL);
    let mut v_sym = PropertyOutcome::new("covariance_symmetric", SYMMETRY_TOL);
    let mut omega_anti = PropertyOutcome::new("commutation_antisymmetric", SYMMETRY_TOL);
    let mut residuals = PropertyOutcome::new("residuals_nonnegative", INVARIANT_TOL);
    let mut orders = PropertyOutcome::new("invariants_match_residuals", INVARIANT_TOL);
    let mut concave = PropertyOutcome::new("mixture_concavity", PSD_TOL);

    for index in 0..cfg.trials {
        let trial = draw_trial(cfg, index)?;
        let prepared = PreparedSet::new(&trial.set)?;
        let ops: Vec<&ComplexMatrix> = trial.set.iter().map(|o| o.matrix()).collect();
        let n = ops.len();

        let u = prepared.uncertainty_matrix(&trial.rho)?;
        psd.record(-min_eigenvalue(&u)?);

        let psi = &trial.components[0];
        let u_pure = prepared.uncertainty_matrix(&psi.density())?;
        gram.record(u_pure.max_abs_diff(&gram_matrix(psi, &ops)));

        // Entries evaluated independently for (j, k) and (k, j).
        let rho = &trial.rho;
        let means: Vec<f64> = ops.iter().map(|x| rho.expectation(x).re).collect();
        let mut worst_v: f64 = 0.0;
        let mut worst_omega: f64 = 0.0;
        for j in 0..n {
            for k in 0..n {
                let v = |a: usize, b: usize| {
                    0.5 * rho.expectation(&ops[a].anticommutator(ops[b])).re - means[a] * means[b]
                };
                let w = |a: usize, b: usize| {
                    (C64::new(0.0, -1.0) * rho.expectation(&ops[a].commutator(ops[b]))).re
                };
                worst_v = worst_v.max((v(j, k) - v(k, j)).abs());
                worst_omega = worst_omega.max((w(j, k) + w(k, j)).abs());
            }
        }
        v_sym.record(worst_v);
        omega_anti.record(worst_omega);

        let report = uncertainty_report(rho, &trial.set)?;
        residuals.record(-report.min_value());
        let mut mismatch: f64 = 0.0;
        for order in 1..=n.min(3) {
            let scale = 1.0 + report.order_sum(order).abs();
            mismatch = mismatch
                .max((report.invariant_sums[order - 1] - report.order_sum(order)).abs() / scale);
        }
        orders.record(mismatch);

        let mut gap = u.clone();
        for (p, psi) in trial.weights.iter().zip(&trial.components) {
            gap = &gap - &prepared.uncertainty_matrix(&psi.density())?.scale_real(*p);
        }
        concave.record(-min_eigenvalue(&gap)?);
    }

    Ok(SuiteReport {
        config: cfg.clone(),
        outcomes: vec![psd, gram, v_sym, omega_anti, residuals, orders, concave],
    })
}
