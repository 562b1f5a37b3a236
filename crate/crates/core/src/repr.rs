//! Irreducible representations of G and its character table.
//!
//! For prime d there are d² one-dimensional irreps `φ_{mn}` and d−1
//! d-dimensional ones, `U_α` and their contragredients `Ū_α` for
//! `α = 1..=(d−1)/2` (only `U_1` when d = 2). For composite d only `U_1`
//! is built and the table is flagged partial.
//!
//! `U_α` sends `(m,k,l)` to `ω^{mα²} W_{αk,αl}`. This is the assignment that
//! respects the product law `(m,k,l)·(n,r,s) = (m+n+ks, k+r, l+s)`.
//!
//! A d-dimensional irrep is fixed up to equivalence by its central character
//! `ω^{mc}`. `U_α` carries `c = α²` and `Ū_α` carries `c = −α²`. When
//! d ≡ 1 (mod 4), −1 is a square mod d and the `Ū_α` repeat the `U_α`; the
//! table then uses the twisted irreps `V_c: (m,k,l) ↦ ω^{mc} W_{ck,l}` for
//! the non-residues `c` instead.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{
    check_dim, class_count, elements, enumerate_classes, is_prime, weyl, ConjugacyClass,
    GroupElement,
};
use crate::linalg::{omega_pow, CMatrix, Tolerance, ONE, ZERO};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IrrepLabel {
    /// `(a,k,l) ↦ ω^{mk − nl}`
    OneDim(usize, usize),
    /// `U_α`
    DDim(usize),
    /// `Ū_α`
    DDimBar(usize),
    /// `V_c: (m,k,l) ↦ ω^{mc} W_{ck,l}`
    Twisted(usize),
}

impl IrrepLabel {
    pub fn dimension(&self, d: usize) -> usize {
        match self {
            IrrepLabel::OneDim(..) => 1,
            _ => d,
        }
    }

    fn validate(&self, d: usize) -> Result<()> {
        check_dim(d)?;
        match *self {
            IrrepLabel::OneDim(m, n) if m < d && n < d => Ok(()),
            IrrepLabel::DDim(1) => Ok(()),
            IrrepLabel::DDim(a) | IrrepLabel::DDimBar(a) | IrrepLabel::Twisted(a)
                if a >= 1 && a < d =>
            {
                if is_prime(d) {
                    Ok(())
                } else {
                    Err(Error::NonPrimeDimension(d))
                }
            }
            _ => Err(Error::UnsupportedIrrep(self.to_string())),
        }
    }
}

impl fmt::Display for IrrepLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IrrepLabel::OneDim(m, n) => write!(f, "phi_{m}_{n}"),
            IrrepLabel::DDim(a) => write!(f, "U_{a}"),
            IrrepLabel::DDimBar(a) => write!(f, "Ubar_{a}"),
            IrrepLabel::Twisted(c) => write!(f, "V_{c}"),
        }
    }
}

/// Table rows in order: `φ_{00}, φ_{01}, …, φ_{d−1,d−1}`, then
/// `U_1 … U_{(d−1)/2}, Ū_{(d−1)/2} … Ū_1`, with the `Ū` block replaced by
/// `V_c` over ascending non-residues `c` when d ≡ 1 (mod 4).
pub fn irrep_labels(d: usize) -> Vec<IrrepLabel> {
    let mut out = Vec::new();
    for m in 0..d {
        for n in 0..d {
            out.push(IrrepLabel::OneDim(m, n));
        }
    }
    if d == 2 || !is_prime(d) {
        out.push(IrrepLabel::DDim(1));
    } else {
        let half = (d - 1) / 2;
        out.extend((1..=half).map(IrrepLabel::DDim));
        if d % 4 == 3 {
            out.extend((1..=half).rev().map(IrrepLabel::DDimBar));
        } else {
            out.extend(
                (1..d)
                    .filter(|&c| !is_quadratic_residue(c, d))
                    .map(IrrepLabel::Twisted),
            );
        }
    }
    out
}

fn is_quadratic_residue(c: usize, d: usize) -> bool {
    (1..d).any(|x| (x * x) % d == c % d)
}

/// Representation matrix of `g` under `label`.
pub fn irrep_matrix(label: IrrepLabel, g: &GroupElement) -> Result<CMatrix> {
    let d = g.d;
    label.validate(d)?;
    let (m, k, l) = (g.m as i64, g.k as i64, g.l as i64);
    Ok(match label {
        IrrepLabel::OneDim(a, b) => {
            let (a, b) = (a as i64, b as i64);
            CMatrix::diag(&[omega_pow(d, a * k - b * l)])
        }
        IrrepLabel::DDim(a) => {
            let a = a as i64;
            weyl(d, a * k, a * l).scale(omega_pow(d, m * a * a))
        }
        IrrepLabel::DDimBar(a) => {
            let a = a as i64;
            weyl(d, a * k, a * l).conj().scale(omega_pow(d, -m * a * a))
        }
        IrrepLabel::Twisted(c) => {
            let c = c as i64;
            weyl(d, c * k, l).scale(omega_pow(d, m * c))
        }
    })
}

pub fn character(label: IrrepLabel, g: &GroupElement) -> Result<Complex64> {
    irrep_matrix(label, g).map(|u| u.trace())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CharacterTable {
    pub d: usize,
    pub classes: Vec<ConjugacyClass>,
    pub labels: Vec<IrrepLabel>,
    pub rows: Vec<Vec<Complex64>>,
    /// Set for composite d, where only `U_1` among the d-dimensional irreps is present.
    pub partial: bool,
}

pub fn character_table(d: usize) -> Result<CharacterTable> {
    check_dim(d)?;
    let classes = enumerate_classes(d);
    let labels = irrep_labels(d);
    let rows = labels
        .iter()
        .map(|&label| {
            classes
                .iter()
                .map(|c| character(label, &c.representative()))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CharacterTable {
        d,
        classes,
        labels,
        rows,
        partial: !is_prime(d),
    })
}

/// Largest deviation from the orthogonality relations, rows and (for complete tables) columns.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct OrthogonalityReport {
    pub row_residual: f64,
    pub column_residual: Option<f64>,
}

impl CharacterTable {
    pub fn group_order(&self) -> usize {
        self.d * self.d * self.d
    }

    pub fn row(&self, label: IrrepLabel) -> Option<&[Complex64]> {
        self.labels
            .iter()
            .position(|&l| l == label)
            .map(|i| self.rows[i].as_slice())
    }

    /// `Σ_C |C| χ^α(C) conj(χ^β(C))`
    pub fn row_inner(&self, a: usize, b: usize) -> Complex64 {
        self.classes
            .iter()
            .enumerate()
            .map(|(j, c)| self.rows[a][j] * self.rows[b][j].conj() * c.size() as f64)
            .sum()
    }

    pub fn orthogonality(&self) -> OrthogonalityReport {
        let order = self.group_order() as f64;
        let n = self.rows.len();
        let mut row_residual: f64 = 0.0;
        for a in 0..n {
            for b in 0..n {
                let expect = if a == b { order } else { 0.0 };
                row_residual = row_residual.max((self.row_inner(a, b) - expect).norm());
            }
        }
        let column_residual = (!self.partial).then(|| {
            let cols = self.classes.len();
            let mut worst: f64 = 0.0;
            for i in 0..cols {
                for j in 0..cols {
                    let s: Complex64 = self.rows.iter().map(|r| r[i] * r[j].conj()).sum();
                    let expect = if i == j {
                        order / self.classes[i].size() as f64
                    } else {
                        0.0
                    };
                    worst = worst.max((s - expect).norm());
                }
            }
            worst
        });
        OrthogonalityReport {
            row_residual,
            column_residual,
        }
    }

    /// Rows = irreps, columns = canonical classes, entries `a+bi` to 12 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("irrep");
        for c in &self.classes {
            out.push(',');
            out.push_str(&c.name());
        }
        out.push('\n');
        for (label, row) in self.labels.iter().zip(&self.rows) {
            out.push_str(&label.to_string());
            for z in row {
                out.push(',');
                out.push_str(&format_complex(*z));
            }
            out.push('\n');
        }
        out
    }
}

fn round_sig(x: f64) -> f64 {
    let r: f64 = format!("{x:.11e}").parse().unwrap_or(x);
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// `a+bi` with both parts rounded to 12 significant digits.
pub fn format_complex(z: Complex64) -> String {
    // suppress rounding residue relative to the modulus
    let scale = z.norm().max(1.0);
    let clean = |x: f64| if x.abs() < 1e-13 * scale { 0.0 } else { x };
    let (re, im) = (round_sig(clean(z.re)), round_sig(clean(z.im)));
    if im < 0.0 {
        format!("{re}-{}i", -im)
    } else {
        format!("{re}+{im}i")
    }
}

/// `m_α = (1/|G|) Σ_g χ^α(g⁻¹) |χ^U(g)|²`, rounded to an integer.
pub fn multiplicity(alpha: IrrepLabel, u: IrrepLabel, d: usize, tol: &Tolerance) -> Result<usize> {
    check_dim(d)?;
    let order = (d * d * d) as f64;
    let mut acc = ZERO;
    for c in enumerate_classes(d) {
        let g = c.representative();
        let chi_a = character(alpha, &g.inverse())?;
        let chi_u = character(u, &g)?;
        acc += chi_a * chi_u.norm_sqr() * c.size() as f64;
    }
    let value = acc / order;
    let rounded = value.re.round();
    if (value - Complex64::new(rounded, 0.0)).norm() > tol.eps_eq || rounded < 0.0 {
        return Err(Error::NonIntegerMultiplicity { value: value.re });
    }
    Ok(rounded as usize)
}

/// `S = Σ_m |m⟩⟨−m|`, with `S W_kl S† = W_{−k,−l}`.
pub fn equivalence_transform(d: usize) -> Result<CMatrix> {
    check_dim(d)?;
    let mut s = CMatrix::zeros(d, d);
    for m in 0..d {
        s[(m, (d - m) % d)] = ONE;
    }
    Ok(s)
}

/// Max residual of `ρ(gh) = ρ(g)ρ(h)` over the given pairs.
pub fn homomorphism_residual(
    label: IrrepLabel,
    pairs: &[(GroupElement, GroupElement)],
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (g, h) in pairs {
        let lhs = irrep_matrix(label, &g.multiply(h)?)?;
        let rhs = &irrep_matrix(label, g)? * &irrep_matrix(label, h)?;
        worst = worst.max(lhs.max_abs_diff(&rhs));
    }
    Ok(worst)
}

/// `Σ n_k d_k²` over the irreps in `labels`.
pub fn dimension_sum(labels: &[IrrepLabel], d: usize) -> usize {
    labels.iter().map(|l| l.dimension(d).pow(2)).sum()
}

/// Brute-force `Σ_g |χ(g)|²` over all group elements.
pub fn character_norm_brute(label: IrrepLabel, d: usize) -> Result<f64> {
    elements(d)
        .iter()
        .map(|g| character(label, g).map(|c| c.norm_sqr()))
        .sum()
}

pub fn expected_irrep_count(d: usize) -> usize {
    class_count(d)
}
