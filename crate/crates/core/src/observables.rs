//! Observable sets on a bipartite Hilbert space.
//!
//! Collective spins use the Pauli-sum convention `S = Σ σ`, so `[S^x, S^y] =
//! 2i S^z` and `S^z` has eigenvalues `M − 2k` on Dicke state `k`. `S^x` and
//! `S^z` are real in the Dicke basis and `S^y` is purely imaginary, which
//! makes the partial-transpose parities exact.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{self, kron, ComplexMatrix, Subsystem, C64, I, ONE, ZERO};

const OBSERVABLE_TOL: f64 = 1e-10;

/// Where an observable acts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Support {
    A,
    B,
    Joint,
}

/// Sign picked up under partial transpose on B: `X^{T_B} = ±X`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }

    pub fn from_sign(sign: i64) -> Option<Self> {
        match sign {
            1 => Some(Parity::Even),
            -1 => Some(Parity::Odd),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Observable {
    label: String,
    matrix: ComplexMatrix,
    support: Support,
    pt_parity: Option<Parity>,
}

impl Observable {
    /// Validates Hermiticity and, when given, the declared parity against the
    /// actual partial transpose on B.
    pub fn new(
        label: impl Into<String>,
        matrix: ComplexMatrix,
        support: Support,
        pt_parity: Option<Parity>,
        dim_a: usize,
        dim_b: usize,
    ) -> Result<Self> {
        let label = label.into();
        matrix.check_finite()?;
        let defect = matrix.hermiticity_defect() * matrix.frobenius_norm();
        if defect > OBSERVABLE_TOL {
            return Err(Error::UnsupportedOperator {
                label,
                reason: format!("not Hermitian (defect {defect:.3e})"),
            });
        }
        if let Some(p) = pt_parity {
            let pt = matrix::partial_transpose(&matrix, dim_a, dim_b, Subsystem::B)?;
            let diff = pt.max_abs_diff(&matrix.scale_real(p.sign()));
            if diff > OBSERVABLE_TOL {
                return Err(Error::UnsupportedOperator {
                    label,
                    reason: format!("declared parity {p:?} is off by {diff:.3e}"),
                });
            }
        } else if matrix.dim() != dim_a * dim_b {
            return Err(Error::DimensionMismatch {
                expected: dim_a * dim_b,
                found: matrix.dim(),
            });
        }
        Ok(Self {
            label,
            matrix,
            support,
            pt_parity,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn support(&self) -> Support {
        self.support
    }

    pub fn pt_parity(&self) -> Option<Parity> {
        self.pt_parity
    }
}

/// Ordered list of observables sharing one bipartition.
#[derive(Clone, Debug)]
pub struct ObservableSet {
    dim_a: usize,
    dim_b: usize,
    observables: Vec<Observable>,
}

impl ObservableSet {
    pub fn new(dim_a: usize, dim_b: usize, observables: Vec<Observable>) -> Result<Self> {
        let mut seen = HashSet::new();
        for o in &observables {
            if o.matrix.dim() != dim_a * dim_b {
                return Err(Error::DimensionMismatch {
                    expected: dim_a * dim_b,
                    found: o.matrix.dim(),
                });
            }
            if !seen.insert(o.label.as_str()) {
                return Err(Error::invalid(
                    "labels",
                    format!("duplicate label `{}`", o.label),
                ));
            }
        }
        Ok(Self {
            dim_a,
            dim_b,
            observables,
        })
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn len(&self) -> usize {
        self.observables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observables.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Observable> {
        self.observables.iter()
    }

    pub fn get(&self, i: usize) -> &Observable {
        &self.observables[i]
    }

    pub fn labels(&self) -> Vec<&str> {
        self.observables.iter().map(|o| o.label.as_str()).collect()
    }

    /// Members at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let obs = indices
            .iter()
            .map(|&i| {
                self.observables
                    .get(i)
                    .cloned()
                    .ok_or_else(|| Error::invalid("indices", format!("{i} out of range")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.dim_a, self.dim_b, obs)
    }
}

impl<'a> IntoIterator for &'a ObservableSet {
    type Item = &'a Observable;
    type IntoIter = std::slice::Iter<'a, Observable>;

    fn into_iter(self) -> Self::IntoIter {
        self.observables.iter()
    }
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_fn(2, |r, c| if r != c { ONE } else { ZERO })
}

pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::from_fn(2, |r, c| match (r, c) {
        (0, 1) => -I,
        (1, 0) => I,
        _ => ZERO,
    })
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_diagonal(&[1.0, -1.0])
}

/// `(σ^x_A σ^x_B, σ^y_A σ^y_B, σ^z_A σ^z_B)` on two qubits.
pub fn pauli_product_set() -> ObservableSet {
    let members = [
        ("XX", pauli_x(), Parity::Even),
        ("YY", pauli_y(), Parity::Odd),
        ("ZZ", pauli_z(), Parity::Even),
    ]
    .into_iter()
    .map(|(label, p, parity)| {
        Observable::new(label, kron(&p, &p), Support::Joint, Some(parity), 2, 2)
            .expect("Pauli products are Hermitian with definite parity")
    })
    .collect();
    ObservableSet::new(2, 2, members).expect("valid Pauli product set")
}

/// Single-ensemble `(S^x, S^y, S^z)` on the `M + 1` Dicke states.
pub fn collective_spin_matrices(m: usize) -> Result<[ComplexMatrix; 3]> {
    if m == 0 {
        return Err(Error::invalid("M", "ensemble size must be at least 1"));
    }
    let n = m + 1;
    let mut sx = ComplexMatrix::zeros(n);
    let mut sy = ComplexMatrix::zeros(n);
    // S^x ± iS^y = 2J^±, and ⟨k−1|J^+|k⟩ = sqrt(k(M−k+1)).
    for k in 1..n {
        let amp = ((k * (m - k + 1)) as f64).sqrt();
        sx.set(k - 1, k, C64::new(amp, 0.0));
        sx.set(k, k - 1, C64::new(amp, 0.0));
        sy.set(k - 1, k, C64::new(0.0, -amp));
        sy.set(k, k - 1, C64::new(0.0, amp));
    }
    let diag: Vec<f64> = (0..n).map(|k| m as f64 - 2.0 * k as f64).collect();
    Ok([sx, sy, ComplexMatrix::from_diagonal(&diag)])
}

/// `(S^x_A, S^y_A, S^z_A, S^x_B, S^y_B, S^z_B)` on the `(M+1)²` joint space.
pub fn collective_spin_set(m: usize) -> Result<ObservableSet> {
    let ops = collective_spin_matrices(m)?;
    let n = m + 1;
    let id = ComplexMatrix::identity(n);
    let mut members = Vec::with_capacity(6);
    for (side, support) in [("A", Support::A), ("B", Support::B)] {
        for (axis, op) in ["x", "y", "z"].iter().zip(&ops) {
            let (matrix, parity) = match support {
                Support::A => (kron(op, &id), Parity::Even),
                _ if *axis == "y" => (kron(&id, op), Parity::Odd),
                _ => (kron(&id, op), Parity::Even),
            };
            members.push(Observable::new(
                format!("S{axis}_{side}"),
                matrix,
                support,
                Some(parity),
                n,
                n,
            )?);
        }
    }
    ObservableSet::new(n, n, members)
}

/// Holstein-Primakoff quadratures `(x_A, p_A, x_B, p_B)` with
/// `x ≈ S^y/√(2M)` and `p ≈ S^z/√(2M)`.
pub fn hp_quadrature_set(m: usize) -> Result<ObservableSet> {
    quadratures_from_spins(&collective_spin_set(m)?, m)
}

/// Quadratures built from the second and third member of each spin triple of
/// a six-member `(x,y,z)_A (x,y,z)_B` set, e.g. a rotated one.
pub fn quadratures_from_spins(spins: &ObservableSet, m: usize) -> Result<ObservableSet> {
    check_spin_layout(spins)?;
    let scale = 1.0 / (2.0 * m as f64).sqrt();
    let mut members = Vec::with_capacity(4);
    for (offset, side) in [(0, "A"), (3, "B")] {
        for (idx, q) in [(offset + 1, "x"), (offset + 2, "p")] {
            let src = spins.get(idx);
            members.push(Observable {
                label: format!("{q}_{side}"),
                matrix: src.matrix.scale_real(scale),
                support: src.support,
                pt_parity: src.pt_parity,
            });
        }
    }
    ObservableSet::new(spins.dim_a, spins.dim_b, members)
}

fn check_spin_layout(set: &ObservableSet) -> Result<()> {
    let supports: Vec<Support> = set.iter().map(|o| o.support).collect();
    let expected = [
        Support::A,
        Support::A,
        Support::A,
        Support::B,
        Support::B,
        Support::B,
    ];
    if supports != expected {
        return Err(Error::invalid(
            "set",
            "expected six members laid out as (x,y,z) on A then (x,y,z) on B",
        ));
    }
    Ok(())
}

/// Rotation about `z` by `angle`; `rotation_z(π/4)` gives
/// `S^x' = (S^x+S^y)/√2`, `S^y' = (S^y−S^x)/√2`, `S^z' = S^z`.
pub fn rotation_z(angle: f64) -> [[f64; 3]; 3] {
    let (s, c) = angle.sin_cos();
    [[c, s, 0.0], [-s, c, 0.0], [0.0, 0.0, 1.0]]
}

/// Applies `R` to the A triple and the B triple independently:
/// `ξ'_i = Σ_j R_ij ξ_j`. Parities are dropped.
pub fn rotate_so3(set: &ObservableSet, r: &[[f64; 3]; 3]) -> Result<ObservableSet> {
    check_spin_layout(set)?;
    for i in 0..3 {
        for j in 0..3 {
            let dot: f64 = (0..3).map(|k| r[k][i] * r[k][j]).sum();
            let target = if i == j { 1.0 } else { 0.0 };
            if !dot.is_finite() || (dot - target).abs() > 1e-10 {
                return Err(Error::invalid("R", "matrix is not orthogonal (RᵀR ≠ I)"));
            }
        }
    }
    let mut members = Vec::with_capacity(6);
    for offset in [0, 3] {
        for (i, row) in r.iter().enumerate() {
            let mut acc = ComplexMatrix::zeros(set.dim_a * set.dim_b);
            for (j, &w) in row.iter().enumerate() {
                if w != 0.0 {
                    acc = &acc + &set.get(offset + j).matrix.scale_real(w);
                }
            }
            let src = set.get(offset + i);
            members.push(Observable {
                label: format!("{}'", src.label),
                matrix: acc,
                support: src.support,
                pt_parity: None,
            });
        }
    }
    ObservableSet::new(set.dim_a, set.dim_b, members)
}
