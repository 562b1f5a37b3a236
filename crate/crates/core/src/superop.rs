//! Linear maps on M_d as d²×d² matrices acting on row-major `vec(X)`.
//!
//! `vec(A X B) = (A ⊗ Bᵀ) vec(X)`, so a term `c·A X A†` contributes
//! `c·(A ⊗ conj(A))`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::matrix_units;
use crate::linalg::{kron, CMatrix};

/// Anything that maps d×d matrices linearly to d×d matrices.
pub trait LinearMap {
    fn dim(&self) -> usize;
    fn apply(&self, x: &CMatrix) -> Result<CMatrix>;
}

pub(crate) fn check_input(d: usize, x: &CMatrix) -> Result<()> {
    if x.shape() != (d, d) {
        return Err(Error::ShapeMismatch {
            expected: (d, d),
            found: x.shape(),
        });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename = "superop")]
pub struct Superop {
    pub d: usize,
    pub matrix: CMatrix,
}

impl Superop {
    pub fn zero(d: usize) -> Self {
        Superop {
            d,
            matrix: CMatrix::zeros(d * d, d * d),
        }
    }

    pub fn identity(d: usize) -> Self {
        Superop {
            d,
            matrix: CMatrix::identity(d * d),
        }
    }

    /// Tabulates any [`LinearMap`] on the matrix units.
    pub fn from_map(map: &dyn LinearMap) -> Result<Self> {
        let d = map.dim();
        let n = d * d;
        let mut matrix = CMatrix::zeros(n, n);
        for (col, e) in matrix_units(d).iter().enumerate() {
            let y = map.apply(e)?;
            for i in 0..d {
                for j in 0..d {
                    matrix[(i * d + j, col)] = y[(i, j)];
                }
            }
        }
        Ok(Superop { d, matrix })
    }

    /// `X ↦ weight · A X A†`
    pub fn conjugation(a: &CMatrix, weight: f64) -> Self {
        Superop {
            d: a.rows(),
            matrix: kron(a, &a.conj()).scale_re(weight),
        }
    }

    /// `X ↦ weight · A X B†`
    pub fn sandwich(a: &CMatrix, b: &CMatrix, weight: f64) -> Self {
        Superop {
            d: a.rows(),
            matrix: kron(a, &b.conj()).scale_re(weight),
        }
    }

    pub fn add(&self, other: &Superop) -> Result<Superop> {
        if self.d != other.d {
            return Err(Error::DimensionMismatch(self.d, other.d));
        }
        Ok(Superop {
            d: self.d,
            matrix: &self.matrix + &other.matrix,
        })
    }

    pub fn add_assign(&mut self, other: &Superop) {
        self.matrix = &self.matrix + &other.matrix;
    }

    pub fn scale(&self, s: f64) -> Superop {
        Superop {
            d: self.d,
            matrix: self.matrix.scale_re(s),
        }
    }

    /// `self ∘ other`
    pub fn compose(&self, other: &Superop) -> Result<Superop> {
        if self.d != other.d {
            return Err(Error::DimensionMismatch(self.d, other.d));
        }
        Ok(Superop {
            d: self.d,
            matrix: self.matrix.matmul(&other.matrix)?,
        })
    }

    /// `J = Σ_ij e_ij ⊗ Φ[e_ij]`
    pub fn choi(&self) -> CMatrix {
        let d = self.d;
        let mut j = CMatrix::zeros(d * d, d * d);
        for a in 0..d {
            for b in 0..d {
                let col = a * d + b;
                for i in 0..d {
                    for k in 0..d {
                        j[(a * d + i, b * d + k)] = self.matrix[(i * d + k, col)];
                    }
                }
            }
        }
        j
    }

    /// `(1 ⊗ Φ)[ρ]` for ρ on C^d ⊗ C^d.
    pub fn apply_second_factor(&self, rho: &CMatrix) -> Result<CMatrix> {
        let d = self.d;
        if rho.shape() != (d * d, d * d) {
            return Err(Error::ShapeMismatch {
                expected: (d * d, d * d),
                found: rho.shape(),
            });
        }
        let mut out = CMatrix::zeros(d * d, d * d);
        for a in 0..d {
            for b in 0..d {
                let block = CMatrix::from_fn(d, d, |i, k| rho[(a * d + i, b * d + k)]);
                let y = self.apply(&block)?;
                for i in 0..d {
                    for k in 0..d {
                        out[(a * d + i, b * d + k)] = y[(i, k)];
                    }
                }
            }
        }
        Ok(out)
    }

    /// Residual of `Tr Φ[X] = Tr X` over the matrix units.
    pub fn trace_preservation_defect(&self) -> f64 {
        let d = self.d;
        let mut worst: f64 = 0.0;
        for a in 0..d {
            for b in 0..d {
                let col = a * d + b;
                let tr: num_complex::Complex64 =
                    (0..d).map(|i| self.matrix[(i * d + i, col)]).sum();
                let expect = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((tr - expect).norm());
            }
        }
        worst
    }
}

impl LinearMap for Superop {
    fn dim(&self) -> usize {
        self.d
    }

    fn apply(&self, x: &CMatrix) -> Result<CMatrix> {
        check_input(self.d, x)?;
        let v = self.matrix.mat_vec(x.as_slice())?;
        CMatrix::from_vec(self.d, self.d, v)
    }
}

/// Wraps a closure as a [`LinearMap`].
pub struct FnMap<F> {
    pub d: usize,
    pub f: F,
}

impl<F> LinearMap for FnMap<F>
where
    F: Fn(&CMatrix) -> CMatrix,
{
    fn dim(&self) -> usize {
        self.d
    }

    fn apply(&self, x: &CMatrix) -> Result<CMatrix> {
        check_input(self.d, x)?;
        Ok((self.f)(x))
    }
}

/// Largest entrywise difference between two maps over the matrix units.
pub fn map_distance(a: &dyn LinearMap, b: &dyn LinearMap) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(a.dim(), b.dim()));
    }
    let mut worst: f64 = 0.0;
    for e in matrix_units(a.dim()) {
        worst = worst.max(a.apply(&e)?.max_abs_diff(&b.apply(&e)?));
    }
    Ok(worst)
}
