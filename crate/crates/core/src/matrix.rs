//! Dense complex matrix primitives.
//!
//! Storage is row-major. Matrix products skip zero entries of the left
//! operand, which keeps the Kronecker-structured spin operators cheap without
//! giving up the dense representation.

use std::ops::{Add, Index, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Default relative Hermiticity tolerance, measured in Frobenius norm.
pub const HERMITIAN_TOL: f64 = 1e-9;

/// Square dense complex matrix with finite entries.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

/// One side of a bipartition `A ⊗ B`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Subsystem {
    A,
    B,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = ONE;
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                data.push(f(r, c));
            }
        }
        Self { dim, data }
    }

    /// Builds a matrix from row-major data, rejecting non-square lengths and
    /// non-finite entries.
    pub fn from_row_major(data: Vec<C64>) -> Result<Self> {
        let dim = (data.len() as f64).sqrt().round() as usize;
        if dim * dim != data.len() || dim == 0 {
            return Err(Error::NotSquare {
                dim,
                len: data.len(),
            });
        }
        let m = Self { dim, data };
        m.check_finite()?;
        Ok(m)
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: row.len(),
                });
            }
            data.extend(row.iter().map(|&x| C64::new(x, 0.0)));
        }
        Self::from_row_major(data)
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * diag.len() + i] = C64::new(d, 0.0);
        }
        m
    }

    /// `|psi⟩⟨psi|`
    pub fn outer(psi: &[C64]) -> Self {
        Self::from_fn(psi.len(), |r, c| psi[r] * psi[c].conj())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.data[row * self.dim + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: C64) {
        self.data[row * self.dim + col] = value;
    }

    pub fn check_finite(&self) -> Result<()> {
        match self
            .data
            .iter()
            .position(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            Some(p) => Err(Error::NonFinite {
                row: p / self.dim,
                col: p % self.dim,
            }),
            None => Ok(()),
        }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |r, c| self.get(c, r).conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |r, c| self.get(c, r))
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * factor).collect(),
        }
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(C64::new(factor, 0.0))
    }

    /// Matrix product. Zero entries of `self` are skipped.
    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "matmul dimension mismatch");
        let n = self.dim;
        let mut out = vec![ZERO; n * n];
        for r in 0..n {
            let out_row = &mut out[r * n..(r + 1) * n];
            for l in 0..n {
                let a = self.data[r * n + l];
                if a == ZERO {
                    continue;
                }
                let b_row = &other.data[l * n..(l + 1) * n];
                for (o, &b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        Self { dim: n, data: out }
    }

    /// `Tr(self · other)` in O(dim²).
    pub fn trace_product(&self, other: &Self) -> C64 {
        assert_eq!(self.dim, other.dim, "trace_product dimension mismatch");
        let n = self.dim;
        let mut acc = ZERO;
        for r in 0..n {
            for c in 0..n {
                acc += self.data[r * n + c] * other.data[c * n + r];
            }
        }
        acc
    }

    /// `⟨psi| self |psi⟩`
    pub fn expectation_pure(&self, psi: &[C64]) -> C64 {
        assert_eq!(self.dim, psi.len(), "state length mismatch");
        let n = self.dim;
        let mut acc = ZERO;
        for r in 0..n {
            let row = &self.data[r * n..(r + 1) * n];
            let mut s = ZERO;
            for (&m, &p) in row.iter().zip(psi) {
                if m != ZERO {
                    s += m * p;
                }
            }
            acc += psi[r].conj() * s;
        }
        acc
    }

    pub fn apply(&self, psi: &[C64]) -> Vec<C64> {
        assert_eq!(self.dim, psi.len(), "state length mismatch");
        let n = self.dim;
        (0..n)
            .map(|r| {
                self.data[r * n..(r + 1) * n]
                    .iter()
                    .zip(psi)
                    .map(|(&m, &p)| m * p)
                    .sum()
            })
            .collect()
    }

    pub fn commutator(&self, other: &Self) -> Self {
        &self.matmul(other) - &other.matmul(self)
    }

    pub fn anticommutator(&self, other: &Self) -> Self {
        &self.matmul(other) + &other.matmul(self)
    }

    /// `‖m − m†‖_F / ‖m‖_F`, zero for the zero matrix.
    pub fn hermiticity_defect(&self) -> f64 {
        let norm = self.frobenius_norm();
        if norm == 0.0 {
            return 0.0;
        }
        let n = self.dim;
        let mut acc = 0.0;
        for r in 0..n {
            for c in 0..n {
                acc += (self.data[r * n + c] - self.data[c * n + r].conj()).norm_sqr();
            }
        }
        acc.sqrt() / norm
    }

    /// `(m + m†) / 2`
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.dim, |r, c| {
            (self.get(r, c) + self.get(c, r).conj()) * 0.5
        })
    }

    /// Principal submatrix on the given (sorted) index set.
    pub fn principal_submatrix(&self, indices: &[usize]) -> Self {
        Self::from_fn(indices.len(), |r, c| self.get(indices[r], indices[c]))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub(crate) fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.dim, self.dim, &self.data)
    }

    pub(crate) fn from_nalgebra(m: &DMatrix<C64>) -> Self {
        Self::from_fn(m.nrows(), |r, c| m[(r, c)])
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.dim + c]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "add dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "sub dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

/// Kronecker product `a ⊗ b`: `a` indexes blocks, `b` indexes within blocks.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (da, db) = (a.dim, b.dim);
    let n = da * db;
    let mut out = ComplexMatrix::zeros(n);
    for ar in 0..da {
        for ac in 0..da {
            let x = a.get(ar, ac);
            if x == ZERO {
                continue;
            }
            for br in 0..db {
                for bc in 0..db {
                    out.data[(ar * db + br) * n + ac * db + bc] = x * b.get(br, bc);
                }
            }
        }
    }
    out
}

fn check_bipartition(m: &ComplexMatrix, dim_a: usize, dim_b: usize) -> Result<()> {
    if dim_a == 0 || dim_b == 0 || m.dim != dim_a * dim_b {
        return Err(Error::DimensionMismatch {
            expected: dim_a * dim_b,
            found: m.dim,
        });
    }
    Ok(())
}

/// Transposes the indices of one subsystem of a matrix on `A ⊗ B`.
///
/// For subsystem `B`, entry `((a,b),(a',b'))` moves to `((a,b'),(a',b))`.
pub fn partial_transpose(
    m: &ComplexMatrix,
    dim_a: usize,
    dim_b: usize,
    subsystem: Subsystem,
) -> Result<ComplexMatrix> {
    check_bipartition(m, dim_a, dim_b)?;
    let n = m.dim;
    let mut out = ComplexMatrix::zeros(n);
    for a in 0..dim_a {
        for b in 0..dim_b {
            for a2 in 0..dim_a {
                for b2 in 0..dim_b {
                    let src = (a * dim_b + b) * n + a2 * dim_b + b2;
                    let dst = match subsystem {
                        Subsystem::B => (a * dim_b + b2) * n + a2 * dim_b + b,
                        Subsystem::A => (a2 * dim_b + b) * n + a * dim_b + b2,
                    };
                    out.data[dst] = m.data[src];
                }
            }
        }
    }
    Ok(out)
}

/// Traces out `traced` and returns the reduced matrix on the other side.
pub fn partial_trace(
    m: &ComplexMatrix,
    dim_a: usize,
    dim_b: usize,
    traced: Subsystem,
) -> Result<ComplexMatrix> {
    check_bipartition(m, dim_a, dim_b)?;
    Ok(match traced {
        Subsystem::B => ComplexMatrix::from_fn(dim_a, |a, a2| {
            (0..dim_b)
                .map(|b| m.get(a * dim_b + b, a2 * dim_b + b))
                .sum()
        }),
        Subsystem::A => ComplexMatrix::from_fn(dim_b, |b, b2| {
            (0..dim_a)
                .map(|a| m.get(a * dim_b + b, a * dim_b + b2))
                .sum()
        }),
    })
}

fn checked_hermitian(m: &ComplexMatrix, tol: f64) -> Result<DMatrix<C64>> {
    m.check_finite()?;
    let defect = m.hermiticity_defect();
    if defect > tol {
        return Err(Error::NotHermitian { defect, tol });
    }
    Ok(m.hermitian_part().to_nalgebra())
}

/// Real spectrum of a Hermitian matrix, sorted ascending.
pub fn hermitian_eigenvalues(m: &ComplexMatrix, tol: f64) -> Result<Vec<f64>> {
    let h = checked_hermitian(m, tol)?;
    let mut eig: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    eig.sort_by(f64::total_cmp);
    Ok(eig)
}

/// Eigenvalues (ascending) with the matching eigenvectors as columns.
pub fn hermitian_eigen(m: &ComplexMatrix, tol: f64) -> Result<(Vec<f64>, ComplexMatrix)> {
    let h = checked_hermitian(m, tol)?;
    let dec = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..m.dim).collect();
    order.sort_by(|&i, &j| dec.eigenvalues[i].total_cmp(&dec.eigenvalues[j]));
    let values = order.iter().map(|&i| dec.eigenvalues[i]).collect();
    let vectors = ComplexMatrix::from_fn(m.dim, |r, c| dec.eigenvectors[(r, order[c])]);
    Ok((values, vectors))
}

/// Nearest positive semidefinite matrix in Frobenius norm.
pub fn psd_project(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let h = checked_hermitian(m, HERMITIAN_TOL)?;
    let dec = h.symmetric_eigen();
    let clipped = dec.eigenvalues.map(|x| C64::new(x.max(0.0), 0.0));
    let v = &dec.eigenvectors;
    let out = v * DMatrix::from_diagonal(&clipped) * v.adjoint();
    Ok(ComplexMatrix::from_nalgebra(&out).hermitian_part())
}

/// Determinant of a Hermitian matrix as the product of its eigenvalues.
pub fn hermitian_determinant(m: &ComplexMatrix) -> Result<f64> {
    Ok(hermitian_eigenvalues(m, HERMITIAN_TOL)?.iter().product())
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn sigma_x() -> ComplexMatrix {
        ComplexMatrix::from_row_major(vec![ZERO, ONE, ONE, ZERO]).unwrap()
    }

    pub(crate) fn sigma_y() -> ComplexMatrix {
        ComplexMatrix::from_row_major(vec![ZERO, -I, I, ZERO]).unwrap()
    }

    pub(crate) fn sigma_z() -> ComplexMatrix {
        ComplexMatrix::from_diagonal(&[1.0, -1.0])
    }

    fn phi_plus() -> ComplexMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        ComplexMatrix::outer(&[C64::new(s, 0.0), ZERO, ZERO, C64::new(s, 0.0)])
    }

    pub(crate) fn random_matrix(rng: &mut impl Rng, dim: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(dim, |_, _| {
            C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        })
    }

    pub(crate) fn random_hermitian(rng: &mut impl Rng, dim: usize) -> ComplexMatrix {
        random_matrix(rng, dim).hermitian_part()
    }

    /// Gaussian elimination with partial pivoting; independent of the
    /// eigensolver.
    #[allow(clippy::needless_range_loop)]
    pub(crate) fn lu_determinant(m: &ComplexMatrix) -> C64 {
        let n = m.dim();
        let mut a: Vec<Vec<C64>> = (0..n)
            .map(|r| (0..n).map(|c| m.get(r, c)).collect())
            .collect();
        let mut det = ONE;
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm()))
                .unwrap();
            if a[pivot][col].norm() == 0.0 {
                return ZERO;
            }
            if pivot != col {
                a.swap(pivot, col);
                det = -det;
            }
            det *= a[col][col];
            for r in col + 1..n {
                let f = a[r][col] / a[col][col];
                for c in col..n {
                    let v = a[col][c];
                    a[r][c] -= f * v;
                }
            }
        }
        det
    }

    #[test]
    fn kron_identity_and_diagonal() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(kron(&i2, &i2), ComplexMatrix::identity(4));
        assert_eq!(
            kron(&sigma_z(), &sigma_z()),
            ComplexMatrix::from_diagonal(&[1.0, -1.0, -1.0, 1.0])
        );
    }

    #[test]
    fn kron_block_convention() {
        // σx ⊗ σy: block (0,1) of σx is 1, so rows 0..2 / cols 2..4 hold σy.
        let m = kron(&sigma_x(), &sigma_y());
        assert_eq!(m.get(0, 3), -I);
        assert_eq!(m.get(1, 2), I);
        assert_eq!(m.get(0, 0), ZERO);
    }

    #[test]
    fn partial_transpose_of_maximally_mixed_is_unchanged() {
        let m = ComplexMatrix::identity(4).scale_real(0.25);
        assert_eq!(partial_transpose(&m, 2, 2, Subsystem::B).unwrap(), m);
    }

    #[test]
    fn partial_transpose_rejects_bad_dims() {
        let m = ComplexMatrix::identity(4);
        assert!(matches!(
            partial_transpose(&m, 2, 3, Subsystem::B),
            Err(Error::DimensionMismatch {
                expected: 6,
                found: 4
            })
        ));
    }

    #[test]
    fn partial_transpose_of_product_transposes_one_factor() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_matrix(&mut rng, 2);
        let b = random_matrix(&mut rng, 3);
        let ab = kron(&a, &b);
        let pt_b = partial_transpose(&ab, 2, 3, Subsystem::B).unwrap();
        assert!(pt_b.max_abs_diff(&kron(&a, &b.transpose())) < 1e-15);
        let pt_a = partial_transpose(&ab, 2, 3, Subsystem::A).unwrap();
        assert!(pt_a.max_abs_diff(&kron(&a.transpose(), &b)) < 1e-15);
    }

    #[test]
    fn bell_partial_transpose_spectrum() {
        let pt = partial_transpose(&phi_plus(), 2, 2, Subsystem::B).unwrap();
        // Oracle: swapped indices give SWAP/2; the singlet is its −1/2 eigenvector.
        let mut swap_half = ComplexMatrix::zeros(4);
        for (r, c) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
            swap_half.set(r, c, C64::new(0.5, 0.0));
        }
        assert!(pt.max_abs_diff(&swap_half) < 1e-15);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let singlet = [ZERO, C64::new(s, 0.0), C64::new(-s, 0.0), ZERO];
        let image = pt.apply(&singlet);
        for (x, y) in image.iter().zip(&singlet) {
            assert!((x - y * -0.5).norm() < 1e-15);
        }

        let eig = hermitian_eigenvalues(&pt, HERMITIAN_TOL).unwrap();
        let expected = [-0.5, 0.5, 0.5, 0.5];
        for (e, x) in eig.iter().zip(expected) {
            assert!((e - x).abs() < 1e-12, "{eig:?}");
        }
        assert!((hermitian_determinant(&pt).unwrap() + 1.0 / 16.0).abs() < 1e-12);

        let projected = psd_project(&pt).unwrap();
        let eig = hermitian_eigenvalues(&projected, HERMITIAN_TOL).unwrap();
        for (e, x) in eig.iter().zip([0.0, 0.5, 0.5, 0.5]) {
            assert!((e - x).abs() < 1e-12, "{eig:?}");
        }
    }

    #[test]
    fn simple_spectra() {
        let eig = hermitian_eigenvalues(&ComplexMatrix::identity(3), HERMITIAN_TOL).unwrap();
        assert_eq!(eig, vec![1.0, 1.0, 1.0]);
        let eig = hermitian_eigenvalues(&sigma_x(), HERMITIAN_TOL).unwrap();
        assert!((eig[0] + 1.0).abs() < 1e-14 && (eig[1] - 1.0).abs() < 1e-14);
        assert_eq!(
            hermitian_determinant(&ComplexMatrix::identity(3)).unwrap(),
            1.0
        );
        let d = hermitian_determinant(&ComplexMatrix::from_diagonal(&[2.0, 3.0])).unwrap();
        assert!((d - 6.0).abs() < 1e-14);
    }

    #[test]
    fn psd_project_clips() {
        let p = psd_project(&ComplexMatrix::from_diagonal(&[1.0, -2.0])).unwrap();
        assert!(p.max_abs_diff(&ComplexMatrix::from_diagonal(&[1.0, 0.0])) < 1e-14);
        let id = ComplexMatrix::identity(3);
        assert!(psd_project(&id).unwrap().max_abs_diff(&id) < 1e-14);
    }

    #[test]
    fn non_hermitian_rejected_with_defect() {
        let m = ComplexMatrix::from_row_major(vec![ONE, ONE, ZERO, ONE]).unwrap();
        match hermitian_eigenvalues(&m, HERMITIAN_TOL) {
            Err(Error::NotHermitian { defect, .. }) => assert!(defect > 0.1),
            other => panic!("expected NotHermitian, got {other:?}"),
        }
        assert!(psd_project(&m).is_err());
    }

    #[test]
    fn from_row_major_validates() {
        assert!(matches!(
            ComplexMatrix::from_row_major(vec![ONE; 3]),
            Err(Error::NotSquare { .. })
        ));
        assert!(matches!(
            ComplexMatrix::from_row_major(vec![ONE, C64::new(f64::NAN, 0.0), ONE, ONE]),
            Err(Error::NonFinite { row: 0, col: 1 })
        ));
    }

    #[test]
    fn partial_trace_of_product() {
        let a = ComplexMatrix::from_diagonal(&[0.25, 0.75]);
        let b = ComplexMatrix::identity(3).scale_real(1.0 / 3.0);
        let ab = kron(&a, &b);
        assert!(
            partial_trace(&ab, 2, 3, Subsystem::B)
                .unwrap()
                .max_abs_diff(&a)
                < 1e-15
        );
        assert!(
            partial_trace(&ab, 2, 3, Subsystem::A)
                .unwrap()
                .max_abs_diff(&b)
                < 1e-15
        );
    }

    #[test]
    fn partial_transpose_involution_and_isometry() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let da = rng.random_range(1..=6);
            let db = rng.random_range(1..=6);
            let m = random_matrix(&mut rng, da * db);
            let side = if rng.random_bool(0.5) {
                Subsystem::A
            } else {
                Subsystem::B
            };
            let pt = partial_transpose(&m, da, db, side).unwrap();
            assert!((pt.frobenius_norm() - m.frobenius_norm()).abs() < 1e-12);
            let back = partial_transpose(&pt, da, db, side).unwrap();
            assert_eq!(back, m);
        }
    }

    #[test]
    fn spectrum_sums_to_trace_and_determinant_matches_lu() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let n = rng.random_range(1..=12);
            let m = random_hermitian(&mut rng, n);
            let eig = hermitian_eigenvalues(&m, HERMITIAN_TOL).unwrap();
            assert_eq!(eig.len(), n);
            assert!(eig.windows(2).all(|w| w[0] <= w[1]));
            let tr = m.trace().re;
            let sum: f64 = eig.iter().sum();
            assert!((sum - tr).abs() <= 1e-10 * tr.abs().max(1.0));
            let det = hermitian_determinant(&m).unwrap();
            let lu = lu_determinant(&m);
            assert!(lu.im.abs() <= 1e-9 * lu.norm().max(1e-300) + 1e-12);
            assert!(
                (det - lu.re).abs() <= 1e-9 * lu.re.abs().max(1e-12),
                "{det} vs {lu}"
            );
        }
    }

    #[test]
    fn psd_project_is_psd_and_fixes_psd_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let n = rng.random_range(1..=8);
            let m = random_hermitian(&mut rng, n);
            let p = psd_project(&m).unwrap();
            let min = hermitian_eigenvalues(&p, HERMITIAN_TOL).unwrap()[0];
            assert!(min >= -1e-12);
            let again = psd_project(&p).unwrap();
            assert!(again.max_abs_diff(&p) < 1e-12);
        }
    }
}
