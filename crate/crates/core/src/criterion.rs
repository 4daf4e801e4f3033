//! Covariance and commutation matrices, the uncertainty matrix
//! `V + (i/2)Ω`, and its partially transposed counterpart whose negative
//! eigenvalues certify entanglement.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{self, ComplexMatrix, Subsystem, C64};
use crate::observables::{ObservableSet, Parity, Support};
use crate::states::DensityMatrix;

/// Default absolute floor on the minimum eigenvalue for an ENTANGLED verdict.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Dense real `n × n` matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct RealMatrix {
    n: usize,
    data: Vec<f64>,
}

impl RealMatrix {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for r in 0..n {
            for c in 0..n {
                data.push(f(r, c));
            }
        }
        Self { n, data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.n + c]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data
            .chunks(self.n.max(1))
            .map(<[f64]>::to_vec)
            .collect()
    }

    /// `max |m_jk − sign·m_kj|`
    fn max_defect(&self, sign: f64) -> f64 {
        let mut worst = 0.0f64;
        for r in 0..self.n {
            for c in 0..self.n {
                worst = worst.max((self.get(r, c) - sign * self.get(c, r)).abs());
            }
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |a, x| a.max(x.abs()))
    }
}

/// `V_jk = ½⟨{ξ_j, ξ_k}⟩ − ⟨ξ_j⟩⟨ξ_k⟩`, real symmetric.
#[derive(Clone, Debug, PartialEq)]
pub struct CovarianceMatrix(pub RealMatrix);

/// `Ω_jk = −i⟨[ξ_j, ξ_k]⟩`, real antisymmetric.
#[derive(Clone, Debug, PartialEq)]
pub struct CommutationMatrix(pub RealMatrix);

impl CovarianceMatrix {
    pub fn asymmetry(&self) -> f64 {
        self.0.max_defect(1.0)
    }
}

impl CommutationMatrix {
    pub fn symmetric_part_norm(&self) -> f64 {
        self.0.max_defect(-1.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Entangled,
    Undetected,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Entangled => "ENTANGLED",
            Verdict::Undetected => "UNDETECTED",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub eigenvalues: Vec<f64>,
    pub min_eigenvalue: f64,
    pub determinant: f64,
    pub verdict: Verdict,
    pub tolerance: f64,
}

impl CriterionReport {
    pub fn negative_count(&self) -> usize {
        self.eigenvalues
            .iter()
            .filter(|&&e| e < -self.tolerance)
            .count()
    }

    pub fn is_entangled(&self) -> bool {
        self.verdict == Verdict::Entangled
    }
}

/// Spectrum, determinant and verdict of a Hermitian criterion matrix.
/// ENTANGLED iff the minimum eigenvalue is below `-tol`.
pub fn detect(m: &ComplexMatrix, tol: f64) -> Result<CriterionReport> {
    if !(tol >= 0.0 && tol.is_finite()) {
        return Err(Error::invalid(
            "tol",
            format!("{tol} must be finite and nonnegative"),
        ));
    }
    let eigenvalues = matrix::hermitian_eigenvalues(m, matrix::HERMITIAN_TOL)?;
    let min_eigenvalue = eigenvalues.first().copied().unwrap_or(0.0);
    let determinant = eigenvalues.iter().product();
    let verdict = if min_eigenvalue < -tol {
        Verdict::Entangled
    } else {
        Verdict::Undetected
    };
    Ok(CriterionReport {
        eigenvalues,
        min_eigenvalue,
        determinant,
        verdict,
        tolerance: tol,
    })
}

fn check_dims(rho: &DensityMatrix, set: &ObservableSet) -> Result<()> {
    if (rho.dim_a(), rho.dim_b()) != (set.dim_a(), set.dim_b()) {
        return Err(Error::DimensionMismatch {
            expected: set.dim_a() * set.dim_b(),
            found: rho.dim(),
        });
    }
    Ok(())
}

/// Operator products for one observable set, prepared once. Each later
/// evaluation costs O(N²) expectation values over the nonzero entries of the
/// prepared products.
#[derive(Clone, Debug)]
pub struct PreparedSet {
    dim_a: usize,
    dim_b: usize,
    n: usize,
    ops: Vec<ComplexMatrix>,
    /// `ξ_j ξ_k`, row-major over `(j, k)`.
    products: Vec<ComplexMatrix>,
    sparse_ops: Vec<Triplets>,
    sparse_products: Vec<Triplets>,
    pt_ops: Vec<Triplets>,
    pt_products: Vec<Triplets>,
}

/// Nonzero entries `(row, col, value)` of an operator.
#[derive(Clone, Debug)]
struct Triplets(Vec<(usize, usize, C64)>);

impl Triplets {
    fn new(m: &ComplexMatrix) -> Self {
        let n = m.dim();
        let mut out = Vec::new();
        for (idx, &z) in m.as_slice().iter().enumerate() {
            if z != C64::new(0.0, 0.0) {
                out.push((idx / n, idx % n, z));
            }
        }
        Triplets(out)
    }

    /// `Tr(ρ X)`
    fn expectation(&self, rho: &ComplexMatrix) -> C64 {
        self.0.iter().map(|&(r, c, x)| rho.get(c, r) * x).sum()
    }
}

impl PreparedSet {
    pub fn new(set: &ObservableSet) -> Result<Self> {
        let (da, db) = (set.dim_a(), set.dim_b());
        let ops: Vec<ComplexMatrix> = set.iter().map(|o| o.matrix().clone()).collect();
        let pt = |m: &ComplexMatrix| matrix::partial_transpose(m, da, db, Subsystem::B);
        let mut products = Vec::with_capacity(ops.len() * ops.len());
        for a in &ops {
            for b in &ops {
                products.push(a.matmul(b));
            }
        }
        let sparse_pt = |m: &ComplexMatrix| pt(m).map(|x| Triplets::new(&x));
        let pt_ops = ops.iter().map(sparse_pt).collect::<Result<Vec<_>>>()?;
        let pt_products = products.iter().map(sparse_pt).collect::<Result<Vec<_>>>()?;
        Ok(Self {
            dim_a: da,
            dim_b: db,
            n: ops.len(),
            sparse_ops: ops.iter().map(Triplets::new).collect(),
            sparse_products: products.iter().map(Triplets::new).collect(),
            ops,
            products,
            pt_ops,
            pt_products,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    fn check(&self, rho: &DensityMatrix) -> Result<()> {
        if (rho.dim_a(), rho.dim_b()) != (self.dim_a, self.dim_b) {
            return Err(Error::DimensionMismatch {
                expected: self.dim_a * self.dim_b,
                found: rho.dim(),
            });
        }
        Ok(())
    }

    /// `⟨X_j X_k⟩ − ⟨X_j⟩⟨X_k⟩` for the given operator family, Hermitian part.
    fn centered_second_moments(
        &self,
        rho: &DensityMatrix,
        ops: &[Triplets],
        products: &[Triplets],
    ) -> ComplexMatrix {
        let rho = rho.matrix();
        let means: Vec<f64> = ops.iter().map(|o| o.expectation(rho).re).collect();
        let n = self.n;
        ComplexMatrix::from_fn(n, |j, k| {
            products[j * n + k].expectation(rho) - C64::new(means[j] * means[k], 0.0)
        })
        .hermitian_part()
    }

    pub fn means(&self, rho: &DensityMatrix) -> Result<Vec<f64>> {
        self.check(rho)?;
        Ok(self
            .sparse_ops
            .iter()
            .map(|o| o.expectation(rho.matrix()).re)
            .collect())
    }

    pub fn covariance_matrix(&self, rho: &DensityMatrix) -> Result<CovarianceMatrix> {
        self.check(rho)?;
        let means = self.means(rho)?;
        let n = self.n;
        let second = |j: usize, k: usize| self.sparse_products[j * n + k].expectation(rho.matrix());
        let raw = RealMatrix::from_fn(n, |j, k| {
            0.5 * (second(j, k) + second(k, j)).re - means[j] * means[k]
        });
        Ok(CovarianceMatrix(RealMatrix::from_fn(n, |j, k| {
            0.5 * (raw.get(j, k) + raw.get(k, j))
        })))
    }

    pub fn commutation_matrix(&self, rho: &DensityMatrix) -> Result<CommutationMatrix> {
        self.check(rho)?;
        let n = self.n;
        let second = |j: usize, k: usize| self.sparse_products[j * n + k].expectation(rho.matrix());
        // −i⟨[ξ_j, ξ_k]⟩ = −i(⟨ξ_jξ_k⟩ − ⟨ξ_kξ_j⟩) = 2 Im⟨ξ_jξ_k⟩ for Hermitian ξ.
        let raw = RealMatrix::from_fn(n, |j, k| {
            (C64::new(0.0, -1.0) * (second(j, k) - second(k, j))).re
        });
        Ok(CommutationMatrix(RealMatrix::from_fn(n, |j, k| {
            0.5 * (raw.get(j, k) - raw.get(k, j))
        })))
    }

    /// `V + (i/2)Ω`
    pub fn uncertainty_matrix(&self, rho: &DensityMatrix) -> Result<ComplexMatrix> {
        let v = self.covariance_matrix(rho)?;
        let omega = self.commutation_matrix(rho)?;
        Ok(combine(&v.0, &omega.0))
    }

    /// `⟨(ξ_j ξ_k)^{T_B}⟩ − ⟨ξ_j^{T_B}⟩⟨ξ_k^{T_B}⟩`, with the partial
    /// transpose applied to the operator products directly.
    pub fn criterion_matrix(&self, rho: &DensityMatrix) -> Result<ComplexMatrix> {
        self.check(rho)?;
        Ok(self.centered_second_moments(rho, &self.pt_ops, &self.pt_products))
    }

    /// The same matrix evaluated as `PT(V) + (i/2)PT(Ω)` with averages taken
    /// against `ρ^{T_B}`.
    pub fn criterion_matrix_transposed_state(&self, rho: &DensityMatrix) -> Result<ComplexMatrix> {
        self.check(rho)?;
        let rho_pt = rho.partial_transpose(Subsystem::B);
        let avg = |x: &ComplexMatrix| rho_pt.trace_product(x);
        let n = self.n;
        let means: Vec<C64> = self.ops.iter().map(avg).collect();
        let pt_v = RealMatrix::from_fn(n, |j, k| {
            let anti = avg(&self.products[j * n + k]) + avg(&self.products[k * n + j]);
            (anti * 0.5 - means[j] * means[k]).re
        });
        let pt_omega = RealMatrix::from_fn(n, |j, k| {
            let comm = avg(&self.products[j * n + k]) - avg(&self.products[k * n + j]);
            (C64::new(0.0, -1.0) * comm).re
        });
        Ok(combine(&pt_v, &pt_omega))
    }
}

fn combine(v: &RealMatrix, omega: &RealMatrix) -> ComplexMatrix {
    ComplexMatrix::from_fn(v.n, |j, k| C64::new(v.get(j, k), 0.5 * omega.get(j, k)))
}

pub fn covariance_matrix(rho: &DensityMatrix, set: &ObservableSet) -> Result<CovarianceMatrix> {
    check_dims(rho, set)?;
    PreparedSet::new(set)?.covariance_matrix(rho)
}

pub fn commutation_matrix(rho: &DensityMatrix, set: &ObservableSet) -> Result<CommutationMatrix> {
    check_dims(rho, set)?;
    PreparedSet::new(set)?.commutation_matrix(rho)
}

pub fn uncertainty_matrix(rho: &DensityMatrix, set: &ObservableSet) -> Result<ComplexMatrix> {
    check_dims(rho, set)?;
    PreparedSet::new(set)?.uncertainty_matrix(rho)
}

pub fn criterion_matrix(rho: &DensityMatrix, set: &ObservableSet) -> Result<ComplexMatrix> {
    check_dims(rho, set)?;
    PreparedSet::new(set)?.criterion_matrix(rho)
}

pub fn criterion_matrix_transposed_state(
    rho: &DensityMatrix,
    set: &ObservableSet,
) -> Result<ComplexMatrix> {
    check_dims(rho, set)?;
    PreparedSet::new(set)?.criterion_matrix_transposed_state(rho)
}

/// Externally measured first and second moments of locally supported,
/// parity-definite observables.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorrelationData {
    pub labels: Vec<String>,
    pub partition: Vec<Subsystem>,
    pub pt_parity: Vec<i64>,
    pub means: Vec<f64>,
    /// Row-major `N × N`.
    #[serde(rename = "V")]
    pub v: Vec<f64>,
    /// Row-major `N × N`.
    #[serde(rename = "Omega")]
    pub omega: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum MatrixField {
    Flat(Vec<f64>),
    Nested(Vec<Vec<f64>>),
}

impl MatrixField {
    fn flatten(self, name: &'static str, n: usize) -> Result<Vec<f64>> {
        let flat = match self {
            MatrixField::Flat(v) => v,
            MatrixField::Nested(rows) => {
                if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                    return Err(Error::invariant(
                        "matrix_shape",
                        format!("{name} must have {n} rows of {n} entries"),
                    ));
                }
                rows.into_iter().flatten().collect()
            }
        };
        if flat.len() != n * n {
            return Err(Error::invariant(
                "matrix_shape",
                format!("{name} has {} entries, expected {}", flat.len(), n * n),
            ));
        }
        Ok(flat)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCorrelationData {
    labels: Vec<String>,
    partition: Vec<Subsystem>,
    pt_parity: Vec<i64>,
    means: Vec<f64>,
    #[serde(rename = "V")]
    v: MatrixField,
    #[serde(rename = "Omega")]
    omega: MatrixField,
}

const DATA_TOL: f64 = 1e-10;

impl CorrelationData {
    /// Simulates a measurement of `set` on `rho`. Every observable must be
    /// supported on A or B alone and carry a definite parity.
    pub fn from_state(rho: &DensityMatrix, set: &ObservableSet) -> Result<Self> {
        check_dims(rho, set)?;
        Self::from_prepared(rho, set, &PreparedSet::new(set)?)
    }

    pub fn from_prepared(
        rho: &DensityMatrix,
        set: &ObservableSet,
        prepared: &PreparedSet,
    ) -> Result<Self> {
        let mut partition = Vec::with_capacity(set.len());
        let mut pt_parity = Vec::with_capacity(set.len());
        for o in set {
            let side = match o.support() {
                Support::A => Subsystem::A,
                Support::B => Subsystem::B,
                Support::Joint => {
                    return Err(Error::UnsupportedOperator {
                        label: o.label().to_string(),
                        reason: "jointly supported operators cannot be used with measured data"
                            .into(),
                    })
                }
            };
            let parity = o.pt_parity().ok_or_else(|| Error::UnsupportedOperator {
                label: o.label().to_string(),
                reason: "no definite partial-transpose parity".into(),
            })?;
            partition.push(side);
            pt_parity.push(parity.sign() as i64);
        }
        let v = prepared.covariance_matrix(rho)?;
        let omega = prepared.commutation_matrix(rho)?;
        let mut data = Self {
            labels: set.labels().into_iter().map(String::from).collect(),
            partition,
            pt_parity,
            means: prepared.means(rho)?,
            v: v.0.as_slice().to_vec(),
            omega: omega.0.as_slice().to_vec(),
        };
        // Local operators on different sides commute exactly; drop rounding.
        let n = data.labels.len();
        for j in 0..n {
            for k in 0..n {
                if data.partition[j] != data.partition[k] {
                    data.omega[j * n + k] = 0.0;
                }
            }
        }
        Ok(data)
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn v(&self, j: usize, k: usize) -> f64 {
        self.v[j * self.n() + k]
    }

    pub fn omega(&self, j: usize, k: usize) -> f64 {
        self.omega[j * self.n() + k]
    }

    pub fn parity(&self, j: usize) -> Parity {
        Parity::from_sign(self.pt_parity[j]).expect("validated parity")
    }

    /// Checks shapes, parities, finiteness and the symmetry invariants.
    pub fn validate(&self) -> Result<()> {
        let n = self.labels.len();
        if n == 0 {
            return Err(Error::invariant(
                "non_empty",
                "at least one observable is required",
            ));
        }
        for (name, len) in [
            ("partition", self.partition.len()),
            ("pt_parity", self.pt_parity.len()),
            ("means", self.means.len()),
        ] {
            if len != n {
                return Err(Error::invariant(
                    "field_lengths",
                    format!("{name} has {len} entries but there are {n} labels"),
                ));
            }
        }
        for (name, len) in [("V", self.v.len()), ("Omega", self.omega.len())] {
            if len != n * n {
                return Err(Error::invariant(
                    "matrix_shape",
                    format!("{name} has {len} entries, expected {}", n * n),
                ));
            }
        }
        let mut seen = std::collections::HashSet::new();
        for l in &self.labels {
            if !seen.insert(l) {
                return Err(Error::invariant(
                    "unique_labels",
                    format!("duplicate label `{l}`"),
                ));
            }
        }
        if let Some((j, s)) = self
            .pt_parity
            .iter()
            .enumerate()
            .find(|(_, &s)| s != 1 && s != -1)
        {
            return Err(Error::invariant(
                "pt_parity_sign",
                format!("pt_parity[{j}] = {s}, expected +1 or -1"),
            ));
        }
        let all = self.means.iter().chain(&self.v).chain(&self.omega);
        if all.clone().any(|x| !x.is_finite()) {
            return Err(Error::invariant(
                "finite",
                "non-finite number in means, V or Omega",
            ));
        }
        let scale = self
            .v
            .iter()
            .chain(&self.omega)
            .fold(1.0f64, |a, x| a.max(x.abs()));
        let tol = DATA_TOL * scale;
        for j in 0..n {
            for k in 0..n {
                let asym = (self.v(j, k) - self.v(k, j)).abs();
                if asym > tol {
                    return Err(Error::invariant(
                        "V_symmetric",
                        format!("V[{j}][{k}] - V[{k}][{j}] = {asym:.3e}"),
                    ));
                }
                let sym = (self.omega(j, k) + self.omega(k, j)).abs();
                if sym > tol {
                    return Err(Error::invariant(
                        "Omega_antisymmetric",
                        format!("Omega[{j}][{k}] + Omega[{k}][{j}] = {sym:.3e}"),
                    ));
                }
                if self.partition[j] != self.partition[k] && self.omega(j, k).abs() > tol {
                    return Err(Error::invariant(
                        "Omega_cross_partition_zero",
                        format!(
                            "Omega[{j}][{k}] = {} but `{}` and `{}` act on different subsystems",
                            self.omega(j, k),
                            self.labels[j],
                            self.labels[k]
                        ),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Parses and validates the JSON document form.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawCorrelationData = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        let n = raw.labels.len();
        let data = Self {
            v: raw.v.flatten("V", n)?,
            omega: raw.omega.flatten("Omega", n)?,
            labels: raw.labels,
            partition: raw.partition,
            pt_parity: raw.pt_parity,
            means: raw.means,
        };
        data.validate()?;
        Ok(data)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("correlation data serializes")
    }
}

/// Criterion matrix reconstructed from measured moments alone.
///
/// With parities `s_j` the entry `(j, k)` is `V + (i/2)Ω` for two A
/// operators, `s_k V` or `s_j V` across the cut, and `s_j s_k (V − (i/2)Ω)`
/// for two B operators (the product order flips under the transpose).
pub fn criterion_matrix_from_data(data: &CorrelationData) -> Result<ComplexMatrix> {
    data.validate()?;
    let n = data.n();
    Ok(ComplexMatrix::from_fn(n, |j, k| {
        let (v, w) = (data.v(j, k), 0.5 * data.omega(j, k));
        let (sj, sk) = (data.parity(j).sign(), data.parity(k).sign());
        match (data.partition[j], data.partition[k]) {
            (Subsystem::A, Subsystem::A) => C64::new(v, w),
            (Subsystem::A, Subsystem::B) => C64::new(sk * v, 0.0),
            (Subsystem::B, Subsystem::A) => C64::new(sj * v, 0.0),
            (Subsystem::B, Subsystem::B) => C64::new(sj * sk * v, -sj * sk * w),
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{ComplexMatrix, ONE};
    use crate::observables::{
        collective_spin_set, hp_quadrature_set, pauli_product_set, Observable,
    };
    use crate::states::{bell_state, spin_ensemble_werner, werner_mix, PureState};

    fn assert_close(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) {
        let d = a.max_abs_diff(b);
        assert!(d <= tol, "matrices differ by {d:e}");
    }

    #[test]
    fn pauli_moments_on_maximally_mixed_state() {
        let rho = DensityMatrix::maximally_mixed(2, 2);
        let set = pauli_product_set();
        let v = covariance_matrix(&rho, &set).unwrap();
        assert_eq!(
            v.0,
            RealMatrix::from_fn(3, |j, k| if j == k { 1.0 } else { 0.0 })
        );
        let omega = commutation_matrix(&rho, &set).unwrap();
        assert_eq!(omega.0.max_abs(), 0.0);
        assert_close(
            &uncertainty_matrix(&rho, &set).unwrap(),
            &ComplexMatrix::identity(3),
            1e-15,
        );
    }

    #[test]
    fn bell_state_has_zero_pauli_covariance() {
        let rho = bell_state().density();
        let v = covariance_matrix(&rho, &pauli_product_set()).unwrap();
        assert!(v.0.max_abs() < 1e-15);
    }

    #[test]
    fn identity_observable_has_zero_variance() {
        let rho = werner_mix(&bell_state(), 0.3).unwrap();
        let id =
            Observable::new("I", ComplexMatrix::identity(4), Support::Joint, None, 2, 2).unwrap();
        let set = ObservableSet::new(2, 2, vec![id]).unwrap();
        assert!(covariance_matrix(&rho, &set).unwrap().0.get(0, 0).abs() < 1e-15);
    }

    #[test]
    fn spin_commutation_entries_at_t0() {
        let m = 4;
        let rho = spin_ensemble_werner(m, 1.0, 0.0).unwrap();
        let omega = commutation_matrix(&rho, &collective_spin_set(m).unwrap())
            .unwrap()
            .0;
        // (Sx,Sy) → 2⟨Sz⟩ = 0, (Sy,Sz) → 2⟨Sx⟩ = 2M
        assert!(omega.get(0, 1).abs() < 1e-12);
        assert!((omega.get(1, 2) - 2.0 * m as f64).abs() < 1e-10);
        assert!((omega.get(4, 5) - 2.0 * m as f64).abs() < 1e-10);
        for a in 0..3 {
            for b in 3..6 {
                assert!(omega.get(a, b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn werner_bell_criterion_threshold() {
        let set = pauli_product_set();
        let at = |mu: f64| {
            let rho = werner_mix(&bell_state(), mu).unwrap();
            detect(&criterion_matrix(&rho, &set).unwrap(), DEFAULT_TOL).unwrap()
        };
        assert!(at(1.0 / 3.0).min_eigenvalue.abs() < 1e-9);
        let full = at(1.0);
        assert_eq!(full.negative_count(), 1);
        assert!(at(0.5).is_entangled());
        assert!(!at(0.2).is_entangled());
    }

    #[test]
    fn werner_bell_full_spectrum_via_transposed_state() {
        // ρ^{T_B} path at μ = 1: PT(V) + (i/2)PT(Ω) has one negative eigenvalue.
        let rho = bell_state().density();
        let m = criterion_matrix_transposed_state(&rho, &pauli_product_set()).unwrap();
        let report = detect(&m, DEFAULT_TOL).unwrap();
        assert_eq!(report.negative_count(), 1);
    }

    #[test]
    fn product_spin_state_is_psd() {
        let m = 5;
        let rho = spin_ensemble_werner(m, 1.0, 0.0).unwrap();
        let report = detect(
            &criterion_matrix(&rho, &collective_spin_set(m).unwrap()).unwrap(),
            DEFAULT_TOL,
        )
        .unwrap();
        assert!(report.min_eigenvalue >= -1e-9);
        assert!(!report.is_entangled());
    }

    #[test]
    fn two_criterion_paths_agree() {
        for (m, mu, t) in [(1, 1.0, 0.3), (2, 0.7, 0.2), (3, 0.4, 1.1), (4, 1.0, 0.05)] {
            let rho = spin_ensemble_werner(m, mu, t).unwrap();
            for set in [
                collective_spin_set(m).unwrap(),
                hp_quadrature_set(m).unwrap(),
            ] {
                let a = criterion_matrix(&rho, &set).unwrap();
                let b = criterion_matrix_transposed_state(&rho, &set).unwrap();
                assert_close(&a, &b, 1e-10);
            }
        }
    }

    #[test]
    fn b_side_transpose_reverses_products() {
        // (X_B Y_B)^{T_B} = Y_B^{T_B} X_B^{T_B}
        let set = collective_spin_set(3).unwrap();
        let pt = |m: &ComplexMatrix| matrix::partial_transpose(m, 4, 4, Subsystem::B).unwrap();
        for j in 3..6 {
            for k in 3..6 {
                let (x, y) = (set.get(j).matrix(), set.get(k).matrix());
                assert_close(&pt(&x.matmul(y)), &pt(y).matmul(&pt(x)), 1e-12);
            }
        }
    }

    #[test]
    fn data_path_matches_matrix_path() {
        for (m, mu, t) in [(2, 1.0, 0.3), (3, 0.5, 0.1), (20, 1.0, 0.0), (6, 0.9, 0.7)] {
            let rho = spin_ensemble_werner(m, mu, t).unwrap();
            let set = collective_spin_set(m).unwrap();
            let data = CorrelationData::from_state(&rho, &set).unwrap();
            let from_data = criterion_matrix_from_data(&data).unwrap();
            assert_close(&from_data, &criterion_matrix(&rho, &set).unwrap(), 1e-10);
            if t == 0.0 {
                assert!(!detect(&from_data, DEFAULT_TOL).unwrap().is_entangled());
            }
        }
    }

    #[test]
    fn data_formula_reduces_to_v() {
        let data = CorrelationData {
            labels: vec!["a".into(), "b".into()],
            partition: vec![Subsystem::A, Subsystem::B],
            pt_parity: vec![1, 1],
            means: vec![0.0, 0.0],
            v: vec![2.0, 0.0, 0.0, 3.0],
            omega: vec![0.0; 4],
        };
        let m = criterion_matrix_from_data(&data).unwrap();
        assert_eq!(m, ComplexMatrix::from_diagonal(&[2.0, 3.0]));
    }

    #[test]
    fn data_path_rejects_joint_and_parityless_operators() {
        let rho = bell_state().density();
        assert!(matches!(
            CorrelationData::from_state(&rho, &pauli_product_set()),
            Err(Error::UnsupportedOperator { .. })
        ));
        let op = Observable::new(
            "z",
            crate::matrix::kron(&crate::observables::pauli_z(), &ComplexMatrix::identity(2)),
            Support::A,
            None,
            2,
            2,
        )
        .unwrap();
        let set = ObservableSet::new(2, 2, vec![op]).unwrap();
        assert!(CorrelationData::from_state(&rho, &set).is_err());
    }

    #[test]
    fn json_round_trip_and_diagnostics() {
        let rho = spin_ensemble_werner(2, 1.0, 0.3).unwrap();
        let data = CorrelationData::from_state(&rho, &collective_spin_set(2).unwrap()).unwrap();
        let back = CorrelationData::from_json(&data.to_json()).unwrap();
        assert_eq!(back, data);

        let nested = r#"{"labels":["a","b"],"partition":["A","B"],"pt_parity":[1,-1],
            "means":[0,0],"V":[[1,0],[0,1]],"Omega":[[0,0.5],[-0.5,0]]}"#;
        match CorrelationData::from_json(nested) {
            Err(Error::InvariantViolation { name, .. }) => {
                assert_eq!(name, "Omega_cross_partition_zero")
            }
            other => panic!("{other:?}"),
        }
        let asym = r#"{"labels":["a","b"],"partition":["A","A"],"pt_parity":[1,1],
            "means":[0,0],"V":[1,0.2,0,1],"Omega":[0,0,0,0]}"#;
        assert!(matches!(
            CorrelationData::from_json(asym),
            Err(Error::InvariantViolation {
                name: "V_symmetric",
                ..
            })
        ));
        let broken = "{\n  \"labels\": [\"a\"],\n  \"means\": [oops]\n}";
        match CorrelationData::from_json(broken) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        let bad_parity = r#"{"labels":["a"],"partition":["A"],"pt_parity":[2],
            "means":[0],"V":[1],"Omega":[0]}"#;
        assert!(matches!(
            CorrelationData::from_json(bad_parity),
            Err(Error::InvariantViolation {
                name: "pt_parity_sign",
                ..
            })
        ));
    }

    #[test]
    fn single_observable_is_never_detected() {
        let rho = bell_state().density();
        let op = Observable::new(
            "XX",
            pauli_product_set().get(0).matrix().clone(),
            Support::Joint,
            None,
            2,
            2,
        )
        .unwrap();
        let set = ObservableSet::new(2, 2, vec![op]).unwrap();
        let report = detect(&criterion_matrix(&rho, &set).unwrap(), DEFAULT_TOL).unwrap();
        assert_eq!(report.verdict, Verdict::Undetected);
        assert!(report.min_eigenvalue >= -1e-12);
    }

    #[test]
    fn detect_on_identity_and_bad_input() {
        let r = detect(&ComplexMatrix::identity(6), DEFAULT_TOL).unwrap();
        assert_eq!(r.verdict, Verdict::Undetected);
        assert_eq!(r.determinant, 1.0);
        let skew = ComplexMatrix::from_row_major(vec![ONE, ONE, -ONE, ONE]).unwrap();
        assert!(matches!(
            detect(&skew, DEFAULT_TOL),
            Err(Error::NotHermitian { .. })
        ));
        assert!(detect(&ComplexMatrix::identity(2), f64::NAN).is_err());
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let rho = DensityMatrix::maximally_mixed(3, 3);
        assert!(matches!(
            covariance_matrix(&rho, &pauli_product_set()),
            Err(Error::DimensionMismatch { .. })
        ));
        let _ = PureState::product(&[ONE], &[ONE]).unwrap();
    }
}
