//! Schrödinger-type uncertainty residuals for one, two and three operators,
//! and their identification with the principal-minor invariants of the
//! uncertainty matrix `V + (i/2)Ω`.

use std::collections::BTreeMap;

use crate::criterion::PreparedSet;
use crate::error::{Error, Result};
use crate::matrix::{self, ComplexMatrix, C64};
use crate::observables::ObservableSet;
use crate::states::{DensityMatrix, PureState};

pub const UNCERTAINTY_TOL: f64 = 1e-9;

fn check_op(rho_dim: usize, op: &ComplexMatrix) -> Result<()> {
    if op.dim() != rho_dim {
        return Err(Error::DimensionMismatch {
            expected: rho_dim,
            found: op.dim(),
        });
    }
    Ok(())
}

/// `I₁₂ = σ²₁σ²₂ − |½⟨{ξ₁,ξ₂}⟩ − ⟨ξ₁⟩⟨ξ₂⟩|² − |⟨[ξ₁,ξ₂]⟩/2i|²`
pub fn schrodinger_i2(
    rho: &DensityMatrix,
    xi1: &ComplexMatrix,
    xi2: &ComplexMatrix,
) -> Result<f64> {
    check_op(rho.dim(), xi1)?;
    check_op(rho.dim(), xi2)?;
    let mean = |x: &ComplexMatrix| rho.expectation(x).re;
    let (m1, m2) = (mean(xi1), mean(xi2));
    let var1 = mean(&xi1.matmul(xi1)) - m1 * m1;
    let var2 = mean(&xi2.matmul(xi2)) - m2 * m2;
    let cov = 0.5 * rho.expectation(&xi1.anticommutator(xi2)).re - m1 * m2;
    let comm = rho.expectation(&xi1.commutator(xi2)) / C64::new(0.0, 2.0);
    Ok(var1 * var2 - cov * cov - comm.norm_sqr())
}

/// Three-operator residual `I₁₂₃` as the determinant of the 3×3 uncertainty
/// matrix; valid for mixed states.
pub fn schrodinger_i3(
    rho: &DensityMatrix,
    xi1: &ComplexMatrix,
    xi2: &ComplexMatrix,
    xi3: &ComplexMatrix,
) -> Result<f64> {
    for x in [xi1, xi2, xi3] {
        check_op(rho.dim(), x)?;
    }
    let ops = [xi1, xi2, xi3];
    let means: Vec<C64> = ops.iter().map(|x| rho.expectation(x)).collect();
    let u = ComplexMatrix::from_fn(3, |j, k| {
        rho.expectation(&ops[j].matmul(ops[k])) - means[j].re * means[k].re
    })
    .hermitian_part();
    matrix::hermitian_determinant(&u)
}

/// `I₁₂₃` for a pure state, expanded in the overlaps `g_jk = ⟨f_j|f_k⟩` of
/// `|f_i⟩ = (ξ_i − ⟨ξ_i⟩)|ψ⟩`.
pub fn schrodinger_i3_pure(
    psi: &PureState,
    xi1: &ComplexMatrix,
    xi2: &ComplexMatrix,
    xi3: &ComplexMatrix,
) -> Result<f64> {
    let amps = psi.amplitudes();
    for x in [xi1, xi2, xi3] {
        check_op(amps.len(), x)?;
    }
    let f: Vec<Vec<C64>> = [xi1, xi2, xi3]
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
    let g = |j: usize, k: usize| -> C64 { f[j].iter().zip(&f[k]).map(|(a, b)| a.conj() * b).sum() };
    let (g11, g22, g33) = (g(0, 0).re, g(1, 1).re, g(2, 2).re);
    let cyclic = g(0, 1) * g(1, 2) * g(2, 0) + g(1, 0) * g(2, 1) * g(0, 2);
    Ok(g11 * g22 * g33
        - g11 * g(1, 2).norm_sqr()
        - g22 * g(2, 0).norm_sqr()
        - g33 * g(0, 1).norm_sqr()
        + cyclic.re)
}

/// Sum of all `k × k` principal minors of a Hermitian matrix.
pub fn invariant_decomposition(m: &ComplexMatrix, k: usize) -> Result<f64> {
    let n = m.dim();
    if k == 0 || k > n {
        return Err(Error::invalid("k", format!("{k} is outside 1..={n}")));
    }
    let defect = m.hermiticity_defect();
    if defect > matrix::HERMITIAN_TOL {
        return Err(Error::NotHermitian {
            defect,
            tol: matrix::HERMITIAN_TOL,
        });
    }
    combinations(n, k)
        .into_iter()
        .map(|idx| matrix::hermitian_determinant(&m.principal_submatrix(&idx)))
        .sum()
}

/// All sorted `k`-subsets of `0..n`, in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        rec(0, n, k, &mut Vec::with_capacity(k), &mut out);
    }
    out
}

/// Every one-, two- and three-operator residual of a set together with the
/// order-`k` invariants of its uncertainty matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct UncertaintyReport {
    pub n: usize,
    /// Keyed by the sorted operator indices.
    pub i_values: BTreeMap<Vec<usize>, f64>,
    /// Entry `k − 1` holds the order-`k` invariant.
    pub invariant_sums: Vec<f64>,
}

impl UncertaintyReport {
    pub fn min_value(&self) -> f64 {
        self.i_values
            .values()
            .chain(&self.invariant_sums)
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// `Σ I` over all subsets of the given size.
    pub fn order_sum(&self, order: usize) -> f64 {
        self.i_values
            .iter()
            .filter(|(k, _)| k.len() == order)
            .map(|(_, v)| v)
            .sum()
    }

    pub fn validate(&self) -> Result<()> {
        if let Some((idx, v)) = self.i_values.iter().find(|(_, &v)| v < -UNCERTAINTY_TOL) {
            return Err(Error::invariant(
                "uncertainty_residual_nonnegative",
                format!("I{idx:?} = {v:.3e}"),
            ));
        }
        if let Some((k, v)) = self
            .invariant_sums
            .iter()
            .enumerate()
            .find(|(_, &v)| v < -UNCERTAINTY_TOL)
        {
            return Err(Error::invariant(
                "invariant_nonnegative",
                format!("order {} invariant = {v:.3e}", k + 1),
            ));
        }
        Ok(())
    }
}

pub fn uncertainty_report(rho: &DensityMatrix, set: &ObservableSet) -> Result<UncertaintyReport> {
    let n = set.len();
    let u = PreparedSet::new(set)?.uncertainty_matrix(rho)?;
    let ops: Vec<&ComplexMatrix> = set.iter().map(|o| o.matrix()).collect();
    let mut i_values = BTreeMap::new();
    for j in 0..n {
        i_values.insert(vec![j], u.get(j, j).re);
    }
    for pair in combinations(n, 2) {
        let v = schrodinger_i2(rho, ops[pair[0]], ops[pair[1]])?;
        i_values.insert(pair, v);
    }
    for triple in combinations(n, 3) {
        let v = schrodinger_i3(rho, ops[triple[0]], ops[triple[1]], ops[triple[2]])?;
        i_values.insert(triple, v);
    }
    let invariant_sums = (1..=n)
        .map(|k| invariant_decomposition(&u, k))
        .collect::<Result<Vec<_>>>()?;
    Ok(UncertaintyReport {
        n,
        i_values,
        invariant_sums,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criterion::uncertainty_matrix;
    use crate::matrix::{ONE, ZERO};
    use crate::observables::{pauli_x, pauli_y, pauli_z, Observable, Support};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn qubit_up() -> PureState {
        PureState::new(2, 1, vec![ONE, ZERO]).unwrap()
    }

    fn pauli_triple() -> ObservableSet {
        let obs = [("x", pauli_x()), ("y", pauli_y()), ("z", pauli_z())]
            .into_iter()
            .map(|(l, m)| Observable::new(l, m, Support::A, None, 2, 1).unwrap())
            .collect();
        ObservableSet::new(2, 1, obs).unwrap()
    }

    fn random_pure(rng: &mut impl Rng, d: usize) -> PureState {
        let amps = (0..d)
            .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        PureState::normalized(d, 1, amps).unwrap()
    }

    /// e_k of the eigenvalues by the product-expansion recurrence.
    fn elementary_symmetric(eig: &[f64], k: usize) -> f64 {
        let mut e = vec![0.0; k + 1];
        e[0] = 1.0;
        for &x in eig {
            for j in (1..=k).rev() {
                e[j] += x * e[j - 1];
            }
        }
        e[k]
    }

    #[test]
    fn i2_on_spin_up() {
        let rho = qubit_up().density();
        assert!(schrodinger_i2(&rho, &pauli_x(), &pauli_y()).unwrap().abs() < 1e-15);
        assert!(schrodinger_i2(&rho, &pauli_x(), &pauli_x()).unwrap().abs() < 1e-15);
        let mixed = DensityMatrix::maximally_mixed(2, 1);
        assert!((schrodinger_i2(&mixed, &pauli_x(), &pauli_y()).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn i3_on_pauli_triple() {
        let psi = qubit_up();
        let i3 = schrodinger_i3_pure(&psi, &pauli_x(), &pauli_y(), &pauli_z()).unwrap();
        assert!(i3.abs() < 1e-15);
        let mixed = DensityMatrix::maximally_mixed(2, 1);
        let i3 = schrodinger_i3(&mixed, &pauli_x(), &pauli_y(), &pauli_z()).unwrap();
        assert!((i3 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn identical_operators_saturate() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..20 {
            let rho = random_pure(&mut rng, 3).density();
            let x = crate::matrix::tests::random_hermitian(&mut rng, 3);
            assert!(schrodinger_i2(&rho, &x, &x).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn gram_expansion_equals_determinant() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for _ in 0..100 {
            let d = rng.random_range(2..6);
            let psi = random_pure(&mut rng, d);
            let ops: Vec<_> = (0..3)
                .map(|_| crate::matrix::tests::random_hermitian(&mut rng, d))
                .collect();
            let gram = schrodinger_i3_pure(&psi, &ops[0], &ops[1], &ops[2]).unwrap();
            let det = schrodinger_i3(&psi.density(), &ops[0], &ops[1], &ops[2]).unwrap();
            assert!((gram - det).abs() < 1e-9, "{gram} vs {det}");
            assert!(gram > -1e-9);
        }
    }

    #[test]
    fn invariants_are_elementary_symmetric_polynomials() {
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        for _ in 0..50 {
            let n = rng.random_range(1..7);
            let m = crate::matrix::tests::random_hermitian(&mut rng, n);
            let eig = matrix::hermitian_eigenvalues(&m, 1e-9).unwrap();
            for k in 1..=n {
                let a = invariant_decomposition(&m, k).unwrap();
                let b = elementary_symmetric(&eig, k);
                assert!((a - b).abs() < 1e-9 * b.abs().max(1.0), "k={k}: {a} vs {b}");
            }
            assert!((invariant_decomposition(&m, 1).unwrap() - m.trace().re).abs() < 1e-12);
        }
        assert!(invariant_decomposition(&ComplexMatrix::identity(3), 0).is_err());
        assert!(invariant_decomposition(&ComplexMatrix::identity(3), 4).is_err());
    }

    #[test]
    fn order_two_invariant_matches_pairwise_residuals() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        let set = pauli_triple();
        for _ in 0..50 {
            let rho = random_pure(&mut rng, 2).density();
            let report = uncertainty_report(&rho, &set).unwrap();
            report.validate().unwrap();
            for k in 1..=3 {
                assert!((report.invariant_sums[k - 1] - report.order_sum(k)).abs() < 1e-9);
            }
            let u = uncertainty_matrix(&rho, &set).unwrap();
            let det = matrix::hermitian_determinant(&u).unwrap();
            assert!((report.i_values[&vec![0, 1, 2]] - det).abs() < 1e-9);
        }
    }

    #[test]
    fn combinations_count() {
        assert_eq!(combinations(5, 2).len(), 10);
        assert_eq!(combinations(3, 3), vec![vec![0, 1, 2]]);
        assert!(combinations(2, 3).is_empty());
    }
}
