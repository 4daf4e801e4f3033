//! Bipartite pure and mixed states, including the two-ensemble spin states
//! used throughout the sweeps.
//!
//! Each spin ensemble of `M` qubits lives in its symmetric (Dicke) subspace of
//! dimension `M + 1`. Dicke index `k` has `S^z` eigenvalue `M − 2k`; the joint
//! flat index is `j·(M+1) + k` with `j` the A index.

use crate::error::{Error, Result};
use crate::matrix::{self, ComplexMatrix, Subsystem, C64, ZERO};

const NORM_TOL: f64 = 1e-12;
const DENSITY_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    dim_a: usize,
    dim_b: usize,
    amplitudes: Vec<C64>,
}

impl PureState {
    pub fn new(dim_a: usize, dim_b: usize, amplitudes: Vec<C64>) -> Result<Self> {
        if dim_a == 0 || dim_b == 0 || amplitudes.len() != dim_a * dim_b {
            return Err(Error::DimensionMismatch {
                expected: dim_a * dim_b,
                found: amplitudes.len(),
            });
        }
        let norm = l2_norm(&amplitudes);
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!(
                "state norm is {norm}, expected 1"
            )));
        }
        Ok(Self {
            dim_a,
            dim_b,
            amplitudes,
        })
    }

    /// Normalizes `amplitudes` before validating.
    pub fn normalized(dim_a: usize, dim_b: usize, mut amplitudes: Vec<C64>) -> Result<Self> {
        let norm = l2_norm(&amplitudes);
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState("cannot normalize a zero vector".into()));
        }
        for a in &mut amplitudes {
            *a /= norm;
        }
        Self::new(dim_a, dim_b, amplitudes)
    }

    /// `|a⟩ ⊗ |b⟩`
    pub fn product(a: &[C64], b: &[C64]) -> Result<Self> {
        let amps = a
            .iter()
            .flat_map(|&x| b.iter().map(move |&y| x * y))
            .collect();
        Self::new(a.len(), b.len(), amps)
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, a: usize, b: usize) -> C64 {
        self.amplitudes[a * self.dim_b + b]
    }

    pub fn norm(&self) -> f64 {
        l2_norm(&self.amplitudes)
    }

    /// `|⟨self|other⟩|²`
    pub fn fidelity(&self, other: &PureState) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(x, y)| x.conj() * y)
            .sum::<C64>()
            .norm_sqr()
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix {
            dim_a: self.dim_a,
            dim_b: self.dim_b,
            matrix: ComplexMatrix::outer(&self.amplitudes),
        }
    }
}

fn l2_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Hermitian, unit-trace, positive semidefinite matrix on `A ⊗ B`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    dim_a: usize,
    dim_b: usize,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity (one eigensolve).
    pub fn new(matrix: ComplexMatrix, dim_a: usize, dim_b: usize) -> Result<Self> {
        let rho = Self::from_trusted(matrix, dim_a, dim_b)?;
        rho.validate()?;
        Ok(rho)
    }

    /// Dimension checks only; for constructions that are valid by design.
    fn from_trusted(matrix: ComplexMatrix, dim_a: usize, dim_b: usize) -> Result<Self> {
        if dim_a == 0 || dim_b == 0 || matrix.dim() != dim_a * dim_b {
            return Err(Error::DimensionMismatch {
                expected: dim_a * dim_b,
                found: matrix.dim(),
            });
        }
        Ok(Self {
            dim_a,
            dim_b,
            matrix,
        })
    }

    pub fn maximally_mixed(dim_a: usize, dim_b: usize) -> Self {
        let d = dim_a * dim_b;
        Self {
            dim_a,
            dim_b,
            matrix: ComplexMatrix::identity(d).scale_real(1.0 / d as f64),
        }
    }

    /// Convex combination `Σ p_l |ψ_l⟩⟨ψ_l|`. Weights must be nonnegative and
    /// sum to one.
    pub fn mixture(weights: &[f64], states: &[PureState]) -> Result<Self> {
        let first = states
            .first()
            .ok_or_else(|| Error::invalid("states", "mixture needs at least one state"))?;
        if weights.len() != states.len() {
            return Err(Error::DimensionMismatch {
                expected: states.len(),
                found: weights.len(),
            });
        }
        let total: f64 = weights.iter().sum();
        if weights.iter().any(|&w| w < 0.0) || (total - 1.0).abs() > DENSITY_TOL {
            return Err(Error::invalid(
                "weights",
                "must be nonnegative and sum to 1",
            ));
        }
        let (da, db) = (first.dim_a, first.dim_b);
        let mut acc = ComplexMatrix::zeros(da * db);
        for (w, s) in weights.iter().zip(states) {
            if (s.dim_a, s.dim_b) != (da, db) {
                return Err(Error::DimensionMismatch {
                    expected: da * db,
                    found: s.dim_a * s.dim_b,
                });
            }
            acc = &acc + &ComplexMatrix::outer(&s.amplitudes).scale_real(*w);
        }
        Self::from_trusted(acc, da, db)
    }

    pub fn validate(&self) -> Result<()> {
        let m = &self.matrix;
        m.check_finite()?;
        let defect = m.hermiticity_defect() * m.frobenius_norm();
        if defect > DENSITY_TOL {
            return Err(Error::InvalidState(format!(
                "density matrix not Hermitian (defect {defect:.3e})"
            )));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > DENSITY_TOL || tr.im.abs() > DENSITY_TOL {
            return Err(Error::InvalidState(format!("trace is {tr}, expected 1")));
        }
        let min = matrix::hermitian_eigenvalues(m, matrix::HERMITIAN_TOL)?[0];
        if min < -DENSITY_TOL {
            return Err(Error::InvalidState(format!(
                "density matrix has negative eigenvalue {min:.3e}"
            )));
        }
        Ok(())
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// `Tr(ρ X)`
    pub fn expectation(&self, op: &ComplexMatrix) -> C64 {
        self.matrix.trace_product(op)
    }

    pub fn partial_transpose(&self, subsystem: Subsystem) -> ComplexMatrix {
        matrix::partial_transpose(&self.matrix, self.dim_a, self.dim_b, subsystem)
            .expect("density matrix dimensions are consistent")
    }
}

/// `(|00⟩ + |11⟩)/√2`
pub fn bell_state() -> PureState {
    let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    PureState {
        dim_a: 2,
        dim_b: 2,
        amplitudes: vec![s, ZERO, ZERO, s],
    }
}

/// Werner-type mixture `(1−μ)/D · I + μ|ψ⟩⟨ψ|`.
pub fn werner_mix(psi: &PureState, mu: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&mu) {
        return Err(Error::invalid("mu", format!("{mu} is outside [0, 1]")));
    }
    let d = psi.amplitudes.len();
    let background = C64::new((1.0 - mu) / d as f64, 0.0);
    let amps = &psi.amplitudes;
    let m = ComplexMatrix::from_fn(d, |r, c| {
        let pure = amps[r] * amps[c].conj() * mu;
        if r == c {
            pure + background
        } else {
            pure
        }
    });
    DensityMatrix::from_trusted(m, psi.dim_a, psi.dim_b)
}

/// Binomial coefficient as a float; exact below 31, log-space above.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    if n <= 30 {
        let mut acc: u64 = 1;
        for i in 0..k as u64 {
            acc = acc * (n as u64 - i) / (i + 1);
        }
        acc as f64
    } else {
        ln_binomial(n, k).exp()
    }
}

fn ln_binomial(n: usize, k: usize) -> f64 {
    (1..=k)
        .map(|i| ((n - k + i) as f64).ln() - (i as f64).ln())
        .sum()
}

/// Dicke-basis amplitudes of the ensemble polarized along `+x`:
/// `c_k = sqrt(C(M,k)) / 2^{M/2}`.
pub fn spin_coherent_x(m: usize) -> Result<Vec<C64>> {
    if m == 0 {
        return Err(Error::invalid("M", "ensemble size must be at least 1"));
    }
    let half_ln2 = 0.5 * m as f64 * std::f64::consts::LN_2;
    Ok((0..=m)
        .map(|k| {
            let c = if m <= 30 {
                binomial(m, k).sqrt() / (half_ln2.exp())
            } else {
                (0.5 * ln_binomial(m, k) - half_ln2).exp()
            };
            C64::new(c, 0.0)
        })
        .collect())
}

/// Applies `exp(i S^z_A S^z_B t)` to a joint Dicke-basis state with equal
/// ensemble sizes.
pub fn szsz_evolve(state: &PureState, t: f64) -> Result<PureState> {
    if state.dim_a != state.dim_b || state.dim_a < 2 {
        return Err(Error::invalid(
            "state",
            "S^z S^z evolution needs two ensembles of equal size",
        ));
    }
    let n = state.dim_a;
    let m = (n - 1) as f64;
    let amplitudes = state
        .amplitudes
        .iter()
        .enumerate()
        .map(|(idx, &amp)| {
            let (j, k) = ((idx / n) as f64, (idx % n) as f64);
            amp * C64::from_polar(1.0, (m - 2.0 * j) * (m - 2.0 * k) * t)
        })
        .collect();
    Ok(PureState {
        dim_a: n,
        dim_b: n,
        amplitudes,
    })
}

/// `exp(i S^z_A S^z_B t)|S^x_A = M⟩|S^x_B = M⟩`
pub fn spin_ensemble_state(m: usize, t: f64) -> Result<PureState> {
    let c = spin_coherent_x(m)?;
    szsz_evolve(&PureState::product(&c, &c)?, t)
}

/// Werner mixture of the evolved two-ensemble state.
pub fn spin_ensemble_werner(m: usize, mu: f64, t: f64) -> Result<DensityMatrix> {
    werner_mix(&spin_ensemble_state(m, t)?, mu)
}
