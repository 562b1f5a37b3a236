//! Dense complex matrices and the shared tolerance policy.
//!
//! Every operator in the toolkit (Weyl operators, irrep matrices, Choi
//! matrices, superoperators, projectors) is a small dense [`CMatrix`].
//! Sizes of interest stay below 49×49, so storage is a plain row-major
//! `Vec<Complex64>`.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Comparison slacks used throughout the crate.
///
/// `eps_herm <= eps_eq <= eps_psd`, all strictly positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub eps_eq: f64,
    pub eps_psd: f64,
    pub eps_herm: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            eps_eq: 1e-10,
            eps_psd: 1e-9,
            eps_herm: 1e-12,
        }
    }
}

impl Tolerance {
    pub fn new(eps_eq: f64, eps_psd: f64, eps_herm: f64) -> Result<Self> {
        let tol = Tolerance {
            eps_eq,
            eps_psd,
            eps_herm,
        };
        tol.validate()?;
        Ok(tol)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = self.eps_eq > 0.0 && self.eps_psd > 0.0 && self.eps_herm > 0.0;
        if !positive || self.eps_herm > self.eps_eq || self.eps_eq > self.eps_psd {
            return Err(Error::InvalidTolerance {
                eps_eq: self.eps_eq,
                eps_psd: self.eps_psd,
                eps_herm: self.eps_herm,
            });
        }
        Ok(())
    }
}

/// Row-major dense complex matrix.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        CMatrix { rows, cols, data }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch {
                expected: (rows, cols),
                found: (data.len(), 1),
            });
        }
        Ok(CMatrix { rows, cols, data })
    }

    pub fn diag(values: &[Complex64]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n);
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    /// `|u><v|`
    pub fn outer(u: &[Complex64], v: &[Complex64]) -> Self {
        Self::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
    }

    /// Rank-1 projector onto the (not necessarily normalized) vector `v`.
    pub fn projector(v: &[Complex64]) -> Self {
        let norm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        Self::outer(v, v).scale(Complex64::new(1.0 / norm2, 0.0))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Shape-checked product.
    pub fn matmul(&self, other: &CMatrix) -> Result<CMatrix> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch {
                expected: (self.cols, other.cols),
                found: other.shape(),
            });
        }
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.data[k * other.cols + j];
                }
            }
        }
        Ok(out)
    }

    /// `A X A†`
    pub fn conjugate_by(&self, a: &CMatrix) -> Result<CMatrix> {
        a.matmul(self)?.matmul(&a.adjoint())
    }

    pub fn mat_vec(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.cols {
            return Err(Error::ShapeMismatch {
                expected: (self.cols, 1),
                found: (v.len(), 1),
            });
        }
        Ok((0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)] * v[j]).sum())
            .collect())
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - other`; infinite on shape mismatch.
    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        if self.shape() != other.shape() {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &CMatrix, eps: f64) -> bool {
        self.max_abs_diff(other) <= eps
    }

    pub fn hermiticity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        self.max_abs_diff(&self.adjoint())
    }

    pub fn is_hermitian(&self, eps: f64) -> bool {
        self.hermiticity_defect() <= eps
    }

    fn to_nalgebra(&self) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    fn from_nalgebra(m: &DMatrix<Complex64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

impl<'a> Add<&'a CMatrix> for &'a CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.shape(), rhs.shape(), "shape mismatch in add");
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl<'a> Sub<&'a CMatrix> for &'a CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.shape(), rhs.shape(), "shape mismatch in sub");
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl<'a> Mul<&'a CMatrix> for &'a CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.matmul(rhs).expect("shape mismatch in mul")
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:>9.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    rows: usize,
    cols: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl Serialize for CMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixJson {
            rows: self.rows,
            cols: self.cols,
            re: self.data.iter().map(|z| z.re).collect(),
            im: self.data.iter().map(|z| z.im).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = MatrixJson::deserialize(d)?;
        let n = raw.rows * raw.cols;
        if raw.rows == 0 || raw.cols == 0 || raw.re.len() != n || raw.im.len() != n {
            return Err(D::Error::custom(format!(
                "matrix {}x{} needs {} re/im entries, got {}/{}",
                raw.rows,
                raw.cols,
                n,
                raw.re.len(),
                raw.im.len()
            )));
        }
        let data = raw
            .re
            .iter()
            .zip(&raw.im)
            .map(|(&re, &im)| Complex64::new(re, im))
            .collect();
        Ok(CMatrix {
            rows: raw.rows,
            cols: raw.cols,
            data,
        })
    }
}

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Column `i` is the eigenvector for `eigenvalues[i]`.
    pub eigenvectors: CMatrix,
}

const EIGEN_MAX_ITER: usize = 10_000;

/// Eigenvalues (ascending) and orthonormal eigenvectors of a Hermitian matrix.
///
/// Within a degenerate cluster only the spanned subspace is meaningful.
/// The computation is deterministic for identical input bits.
pub fn hermitian_eigen(a: &CMatrix, tol: &Tolerance) -> Result<HermitianEigen> {
    if !a.is_square() {
        return Err(Error::ShapeMismatch {
            expected: (a.rows, a.rows),
            found: a.shape(),
        });
    }
    let defect = a.hermiticity_defect();
    if defect > tol.eps_herm {
        return Err(Error::NotHermitian { defect });
    }
    // symmetrize so the solver sees an exactly Hermitian input
    let sym = (a + &a.adjoint()).scale_re(0.5);
    let eig = nalgebra::SymmetricEigen::try_new(sym.to_nalgebra(), f64::EPSILON, EIGEN_MAX_ITER)
        .ok_or(Error::NoConvergence)?;

    let mut order: Vec<usize> = (0..a.rows).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let vecs = CMatrix::from_nalgebra(&eig.eigenvectors);
    let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let eigenvectors = CMatrix::from_fn(a.rows, a.rows, |r, c| vecs[(r, order[c])]);
    Ok(HermitianEigen {
        eigenvalues,
        eigenvectors,
    })
}

/// Eigenvalues only, ascending.
pub fn hermitian_eigenvalues(a: &CMatrix, tol: &Tolerance) -> Result<Vec<f64>> {
    hermitian_eigen(a, tol).map(|e| e.eigenvalues)
}

/// `(A⊗B)[(i,k),(j,l)] = A[i,j]·B[k,l]`
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (br, bc) = b.shape();
    CMatrix::from_fn(a.rows * br, a.cols * bc, |r, c| {
        a[(r / br, c / bc)] * b[(r % br, c % bc)]
    })
}

/// Hilbert-Schmidt inner product `Tr(A†B)`.
pub fn hs_inner(a: &CMatrix, b: &CMatrix) -> Result<Complex64> {
    if a.shape() != b.shape() {
        return Err(Error::ShapeMismatch {
            expected: a.shape(),
            found: b.shape(),
        });
    }
    Ok(a.data.iter().zip(&b.data).map(|(x, y)| x.conj() * y).sum())
}

/// `e^{2πi/d}`
pub fn root_of_unity(d: usize) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / d as f64)
}

/// `ω^e` with the exponent reduced mod `d`, so equal residues give bit-identical values.
pub fn omega_pow(d: usize, e: i64) -> Complex64 {
    let r = e.rem_euclid(d as i64);
    Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * r as f64 / d as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> CMatrix {
        let m = CMatrix::from_fn(n, n, |_, _| {
            c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        (&m + &m.adjoint()).scale_re(0.5)
    }

    #[test]
    fn eigen_of_identity() {
        let e = hermitian_eigen(&CMatrix::identity(2), &Tolerance::default()).unwrap();
        assert_eq!(e.eigenvalues, vec![1.0, 1.0]);
    }

    #[test]
    fn eigen_of_diagonal_sorted() {
        let a = CMatrix::diag(&[ONE, -ONE]);
        let e = hermitian_eigen(&a, &Tolerance::default()).unwrap();
        assert_eq!(e.eigenvalues, vec![-1.0, 1.0]);
        assert!((e.eigenvectors[(1, 0)].norm() - 1.0).abs() < 1e-12);
        assert!((e.eigenvectors[(0, 1)].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eigen_reconstructs_random_hermitian() {
        let tol = Tolerance::default();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let a = random_hermitian(6, &mut rng);
            let e = hermitian_eigen(&a, &tol).unwrap();
            let v = &e.eigenvectors;
            let lam = CMatrix::diag(&e.eigenvalues.iter().map(|&x| c(x, 0.0)).collect::<Vec<_>>());
            let rebuilt = &(v * &lam) * &v.adjoint();
            assert!(rebuilt.approx_eq(&a, tol.eps_eq));
            assert!((&v.adjoint() * v).approx_eq(&CMatrix::identity(6), tol.eps_eq));
            assert!(e.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
            for i in 0..6 {
                let col = v.column(i);
                let av = a.mat_vec(&col).unwrap();
                for r in 0..6 {
                    assert!((av[r] - col[r] * e.eigenvalues[i]).norm() < tol.eps_eq);
                }
            }
        }
    }

    #[test]
    fn eigen_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_hermitian(7, &mut rng);
        let tol = Tolerance::default();
        let e1 = hermitian_eigen(&a, &tol).unwrap();
        let e2 = hermitian_eigen(&a, &tol).unwrap();
        assert_eq!(e1.eigenvalues, e2.eigenvalues);
        assert_eq!(e1.eigenvectors, e2.eigenvectors);
    }

    #[test]
    fn eigen_rejects_non_hermitian() {
        let a = CMatrix::from_fn(2, 2, |i, j| if i == 0 && j == 1 { ONE } else { ZERO });
        assert!(matches!(
            hermitian_eigen(&a, &Tolerance::default()),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn kron_identity_and_diagonal() {
        assert_eq!(
            kron(&CMatrix::identity(2), &CMatrix::identity(2)),
            CMatrix::identity(4)
        );
        let w = root_of_unity(2);
        let a = CMatrix::diag(&[ONE, w]);
        let b = CMatrix::diag(&[ONE, w.conj()]);
        let expect = CMatrix::diag(&[ONE, -ONE, -ONE, ONE]);
        assert!(kron(&a, &b).approx_eq(&expect, 1e-15));
    }

    #[test]
    fn kron_fourier_rows_orthogonal() {
        let f = CMatrix::from_fn(3, 3, |k, l| omega_pow(3, (k * l) as i64));
        let big = kron(&f, &f.conj());
        let gram = &big * &big.adjoint();
        assert!(gram.approx_eq(&CMatrix::identity(9).scale_re(9.0), 1e-12));
    }

    #[test]
    fn kron_is_associative() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut rnd = |r, c_| {
            CMatrix::from_fn(r, c_, |_, _| {
                c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
            })
        };
        let (a, b, cm) = (rnd(2, 3), rnd(3, 2), rnd(2, 2));
        let lhs = kron(&kron(&a, &b), &cm);
        let rhs = kron(&a, &kron(&b, &cm));
        assert!(lhs.approx_eq(&rhs, 1e-12));
    }

    #[test]
    fn hs_inner_basics() {
        assert_eq!(
            hs_inner(&CMatrix::identity(3), &CMatrix::identity(3)).unwrap(),
            c(3.0, 0.0)
        );
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = CMatrix::from_fn(3, 3, |_, _| c(rng.random(), rng.random()));
        let b = CMatrix::from_fn(3, 3, |_, _| c(rng.random(), rng.random()));
        let ab = hs_inner(&a, &b).unwrap();
        let ba = hs_inner(&b, &a).unwrap();
        assert!((ab - ba.conj()).norm() < 1e-14);
        assert!(matches!(
            hs_inner(&a, &CMatrix::identity(2)),
            Err(Error::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn json_round_trip() {
        let m = CMatrix::from_fn(2, 3, |i, j| c(i as f64, j as f64 - 0.5));
        let s = serde_json::to_string(&m).unwrap();
        assert!(s.starts_with("{\"rows\":2,\"cols\":3,\"re\":"));
        let back: CMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        assert!(
            serde_json::from_str::<CMatrix>(r#"{"rows":2,"cols":2,"re":[1],"im":[0]}"#).is_err()
        );
    }

    #[test]
    fn tolerance_ordering_enforced() {
        assert!(Tolerance::default().validate().is_ok());
        assert!(Tolerance::new(1e-8, 1e-9, 1e-12).is_err());
        assert!(Tolerance::new(1e-10, 1e-9, 0.0).is_err());
    }
}
