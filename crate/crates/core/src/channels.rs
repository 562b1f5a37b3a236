//! Covariant maps `Φ = Σ_g μ(g) Ad_{U(g)}` and Weyl maps.
//!
//! A covariant map is fixed by a class function `μ`. Collapsing it onto
//! `U_1` gives the Weyl map `Φ[X] = Σ μ_kl W_kl X W_kl†`, which is diagonal
//! on the Weyl basis: `Φ[W_mn] = ℓ_mn W_mn` with
//!
//! ```text
//! ℓ_mn = Σ_kl ω^{kn − ml} μ_kl,      μ_kl = (1/d²) Σ_mn ω^{ml − kn} ℓ_mn.
//! ```
//!
//! The phase follows from `W_kl W_mn W_kl† = ω^{kn − ml} W_mn`.

use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::group::{
    check_dim, class_count, enumerate_classes, flat, weyl, ClassKind, GroupElement,
};
use crate::linalg::{hermitian_eigen, hs_inner, omega_pow, CMatrix, Tolerance, ZERO};
use crate::repr::{irrep_matrix, IrrepLabel};
use crate::superop::{check_input, LinearMap, Superop};

/// `μ` on the conjugacy classes, in canonical class order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassFunction {
    pub d: usize,
    pub values: Vec<Complex64>,
}

impl ClassFunction {
    pub fn new(d: usize, values: Vec<Complex64>) -> Result<Self> {
        check_dim(d)?;
        if values.len() != class_count(d) {
            return Err(Error::ShapeMismatch {
                expected: (class_count(d), 1),
                found: (values.len(), 1),
            });
        }
        Ok(ClassFunction { d, values })
    }

    pub fn zero(d: usize) -> Self {
        ClassFunction {
            d,
            values: vec![ZERO; class_count(d)],
        }
    }

    /// `μ(g)` for a single element.
    pub fn at(&self, g: &GroupElement) -> Complex64 {
        self.values[g.class_of().index()]
    }

    pub fn central(&self, l: usize) -> Complex64 {
        self.values[crate::group::ConjugacyClass {
            d: self.d,
            kind: ClassKind::Central(l),
        }
        .index()]
    }

    pub fn generic(&self, k: usize, l: usize) -> Complex64 {
        self.values[crate::group::ConjugacyClass {
            d: self.d,
            kind: ClassKind::Generic(k, l),
        }
        .index()]
    }

    /// `Σ_g μ(g)`
    pub fn total(&self) -> Complex64 {
        enumerate_classes(self.d)
            .iter()
            .zip(&self.values)
            .map(|(c, v)| v * c.size() as f64)
            .sum()
    }

    /// Sufficient channel condition: every `μ(g)` real and nonnegative, `Σ_g μ(g) = 1`.
    pub fn satisfies_sufficient_condition(&self, tol: &Tolerance) -> bool {
        self.values
            .iter()
            .all(|v| v.re >= -tol.eps_psd && v.im.abs() <= tol.eps_eq)
            && (self.total() - 1.0).norm() <= tol.eps_eq
    }
}

/// Class function from one-dimensional character weights `ν` (d×d, flat)
/// and d-dimensional weights `τ` (length d−1).
pub fn from_characters(d: usize, nu: &[Complex64], tau: &[Complex64]) -> Result<ClassFunction> {
    check_dim(d)?;
    if nu.len() != d * d {
        return Err(Error::ShapeMismatch {
            expected: (d, d),
            found: (nu.len(), 1),
        });
    }
    if tau.len() != d - 1 {
        return Err(Error::ShapeMismatch {
            expected: (d - 1, 1),
            found: (tau.len(), 1),
        });
    }
    let order = (d * d * d) as f64;
    let nu_sum: Complex64 = nu.iter().sum();
    let values = enumerate_classes(d)
        .iter()
        .map(|c| match c.kind {
            ClassKind::Generic(k, l) => {
                let mut acc = ZERO;
                for m in 0..d {
                    for n in 0..d {
                        acc += nu[flat(d, m, n)] * omega_pow(d, (m * k) as i64 - (n * l) as i64);
                    }
                }
                acc / order
            }
            ClassKind::Central(l) => {
                let tau_part: Complex64 = tau
                    .iter()
                    .enumerate()
                    .map(|(i, t)| t * omega_pow(d, ((i + 1) * l) as i64))
                    .sum();
                (nu_sum + tau_part * d as f64) / order
            }
        })
        .collect();
    Ok(ClassFunction { d, values })
}

/// Kraus weights `μ_kl` of a Weyl map, flat in `(k, l)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeylMapCoeffs {
    pub d: usize,
    pub mu: Vec<Complex64>,
}

/// Eigenvalues `ℓ_kl` of a Weyl map on the Weyl basis, flat in `(k, l)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeylMapSpectrum {
    pub d: usize,
    pub ell: Vec<Complex64>,
}

fn check_square_array(d: usize, len: usize) -> Result<()> {
    check_dim(d)?;
    if len != d * d {
        return Err(Error::ShapeMismatch {
            expected: (d, d),
            found: (len, 1),
        });
    }
    Ok(())
}

impl WeylMapCoeffs {
    pub fn new(d: usize, mu: Vec<Complex64>) -> Result<Self> {
        check_square_array(d, mu.len())?;
        Ok(WeylMapCoeffs { d, mu })
    }

    pub fn from_real(d: usize, mu: &[f64]) -> Result<Self> {
        Self::new(d, mu.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn identity(d: usize) -> Self {
        let mut mu = vec![ZERO; d * d];
        mu[0] = Complex64::new(1.0, 0.0);
        WeylMapCoeffs { d, mu }
    }

    /// `μ_kl = 1/d²`: the completely depolarizing channel.
    pub fn depolarizing(d: usize) -> Self {
        WeylMapCoeffs {
            d,
            mu: vec![Complex64::new(1.0 / (d * d) as f64, 0.0); d * d],
        }
    }

    pub fn get(&self, k: usize, l: usize) -> Complex64 {
        self.mu[flat(self.d, k, l)]
    }

    pub fn sum(&self) -> Complex64 {
        self.mu.iter().sum()
    }

    pub fn to_superop(&self) -> Superop {
        let d = self.d;
        let mut s = Superop::zero(d);
        for k in 0..d {
            for l in 0..d {
                let w = weyl(d, k as i64, l as i64);
                let term = Superop {
                    d,
                    matrix: crate::linalg::kron(&w, &w.conj()).scale(self.get(k, l)),
                };
                s.add_assign(&term);
            }
        }
        s
    }
}

impl WeylMapSpectrum {
    pub fn new(d: usize, ell: Vec<Complex64>) -> Result<Self> {
        check_square_array(d, ell.len())?;
        Ok(WeylMapSpectrum { d, ell })
    }

    pub fn from_real(d: usize, ell: &[f64]) -> Result<Self> {
        Self::new(d, ell.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn get(&self, k: usize, l: usize) -> Complex64 {
        self.ell[flat(self.d, k, l)]
    }

    /// Index-wrapping accessor.
    pub fn at(&self, k: i64, l: i64) -> Complex64 {
        let d = self.d as i64;
        self.ell[flat(self.d, k.rem_euclid(d) as usize, l.rem_euclid(d) as usize)]
    }
}

impl LinearMap for WeylMapCoeffs {
    fn dim(&self) -> usize {
        self.d
    }

    fn apply(&self, x: &CMatrix) -> Result<CMatrix> {
        apply(self, x)
    }
}

/// `μ_kl = d·μ(C_kl)`, `μ_00 = Σ_l μ(C_0^l)`.
pub fn collapse_to_weyl(mu: &ClassFunction) -> WeylMapCoeffs {
    let d = mu.d;
    let mut out = vec![ZERO; d * d];
    for k in 0..d {
        for l in 0..d {
            out[flat(d, k, l)] = if (k, l) == (0, 0) {
                (0..d).map(|m| mu.central(m)).sum()
            } else {
                mu.generic(k, l) * d as f64
            };
        }
    }
    WeylMapCoeffs { d, mu: out }
}

/// `Φ[X] = Σ μ_kl W_kl X W_kl†`
pub fn apply(coeffs: &WeylMapCoeffs, x: &CMatrix) -> Result<CMatrix> {
    let d = coeffs.d;
    check_input(d, x)?;
    let mut out = CMatrix::zeros(d, d);
    for k in 0..d {
        for l in 0..d {
            let c = coeffs.get(k, l);
            if c == ZERO {
                continue;
            }
            let w = weyl(d, k as i64, l as i64);
            out = &out + &x.conjugate_by(&w)?.scale(c);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChoiMatrix {
    pub d: usize,
    pub j: CMatrix,
}

/// `J(Φ) = Σ_ij e_ij ⊗ Φ[e_ij]`
pub fn choi(coeffs: &WeylMapCoeffs) -> ChoiMatrix {
    ChoiMatrix {
        d: coeffs.d,
        j: coeffs.to_superop().choi(),
    }
}

/// `|v_kl⟩ = Σ_i |i⟩ ⊗ W_kl|i⟩`
pub fn choi_eigenvector(d: usize, k: usize, l: usize) -> Vec<Complex64> {
    let w = weyl(d, k as i64, l as i64);
    let mut v = vec![ZERO; d * d];
    for i in 0..d {
        for r in 0..d {
            v[i * d + r] = w[(r, i)];
        }
    }
    v
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChannelVerdict {
    pub cp: bool,
    pub tp: bool,
    pub min_choi_eigenvalue: f64,
    pub coefficient_sum: Complex64,
    /// First `(k, l)` whose coefficient breaks the sign test.
    pub violating_index: Option<(usize, usize)>,
    pub tolerance: Tolerance,
}

impl ChannelVerdict {
    pub fn is_channel(&self) -> bool {
        self.cp && self.tp
    }
}

/// CP via both the coefficient sign test and the Choi spectrum; they must agree.
pub fn is_channel(coeffs: &WeylMapCoeffs, tol: &Tolerance) -> Result<ChannelVerdict> {
    let d = coeffs.d;
    let violating_index = (0..d * d)
        .find(|&i| {
            let m = coeffs.mu[i];
            m.re < -tol.eps_psd / d as f64 || m.im.abs() > tol.eps_eq
        })
        .map(|i| (i / d, i % d));
    let cp_mu = violating_index.is_none();

    let j = choi(coeffs).j;
    let (cp_choi, min_choi_eigenvalue) = if j.hermiticity_defect() > tol.eps_eq {
        (false, f64::NAN)
    } else {
        let relaxed = Tolerance {
            eps_herm: tol.eps_eq,
            ..*tol
        };
        let ev = hermitian_eigen(&j, &relaxed)?.eigenvalues;
        (ev[0] >= -tol.eps_psd, ev[0])
    };
    if cp_mu != cp_choi {
        return Err(Error::RouteDisagreement(format!(
            "coefficient test says cp={cp_mu}, Choi spectrum says cp={cp_choi} (min eigenvalue {min_choi_eigenvalue:e})"
        )));
    }
    let coefficient_sum = coeffs.sum();
    Ok(ChannelVerdict {
        cp: cp_mu,
        tp: (coefficient_sum - 1.0).norm() <= tol.eps_eq,
        min_choi_eigenvalue,
        coefficient_sum,
        violating_index,
        tolerance: *tol,
    })
}

/// Hilbert-Schmidt adjoint: `Φ*[Y] = Σ conj(μ_kl) W_kl† Y W_kl`, i.e.
/// `μ*_kl = conj(μ_{−k,−l})`. Equals `Φ` when `μ` is real and symmetric
/// under `(k,l) ↦ (−k,−l)`.
pub fn dual(coeffs: &WeylMapCoeffs) -> WeylMapCoeffs {
    let d = coeffs.d;
    let mut mu = vec![ZERO; d * d];
    for k in 0..d {
        for l in 0..d {
            mu[flat(d, k, l)] = coeffs.get((d - k) % d, (d - l) % d).conj();
        }
    }
    WeylMapCoeffs { d, mu }
}

/// `Φ ∘ Ψ`, computed as the entrywise product of spectra.
pub fn compose(phi: &WeylMapCoeffs, psi: &WeylMapCoeffs) -> Result<WeylMapCoeffs> {
    if phi.d != psi.d {
        return Err(Error::DimensionMismatch(phi.d, psi.d));
    }
    let (a, b) = (spectrum_from_prob(phi), spectrum_from_prob(psi));
    let ell = a.ell.iter().zip(&b.ell).map(|(x, y)| x * y).collect();
    Ok(prob_from_spectrum(&WeylMapSpectrum { d: phi.d, ell }))
}

/// `Π_kl[X] = (1/d) W_kl Tr(W_kl† X)`
pub fn projector_apply(k: usize, l: usize, x: &CMatrix) -> Result<CMatrix> {
    let d = x.rows();
    check_input(d, x)?;
    if k >= d || l >= d {
        return Err(Error::IndexOutOfRange { d, k, l });
    }
    let w = weyl(d, k as i64, l as i64);
    let t = hs_inner(&w, x)?;
    Ok(w.scale(t / d as f64))
}

/// Group-averaged form `Π_kl[X] = (1/d²) Σ_mn ω^{nk − ml} W_mn X W_mn†`.
pub fn projector_group_average(k: usize, l: usize, x: &CMatrix) -> Result<CMatrix> {
    let d = x.rows();
    check_input(d, x)?;
    if k >= d || l >= d {
        return Err(Error::IndexOutOfRange { d, k, l });
    }
    let mut out = CMatrix::zeros(d, d);
    for m in 0..d {
        for n in 0..d {
            let phase = omega_pow(d, (n * k) as i64 - (m * l) as i64);
            let w = weyl(d, m as i64, n as i64);
            out = &out + &x.conjugate_by(&w)?.scale(phase);
        }
    }
    Ok(out.scale_re(1.0 / (d * d) as f64))
}

/// `ℓ_mn = Σ_kl ω^{kn − ml} μ_kl`
pub fn spectrum_from_prob(coeffs: &WeylMapCoeffs) -> WeylMapSpectrum {
    let d = coeffs.d;
    let mut ell = vec![ZERO; d * d];
    for m in 0..d {
        for n in 0..d {
            let mut acc = ZERO;
            for k in 0..d {
                for l in 0..d {
                    acc += coeffs.get(k, l) * omega_pow(d, (k * n) as i64 - (m * l) as i64);
                }
            }
            ell[flat(d, m, n)] = acc;
        }
    }
    WeylMapSpectrum { d, ell }
}

/// `μ_kl = (1/d²) Σ_mn ω^{ml − kn} ℓ_mn`
pub fn prob_from_spectrum(spec: &WeylMapSpectrum) -> WeylMapCoeffs {
    let d = spec.d;
    let norm = 1.0 / (d * d) as f64;
    let mut mu = vec![ZERO; d * d];
    for k in 0..d {
        for l in 0..d {
            let mut acc = ZERO;
            for m in 0..d {
                for n in 0..d {
                    acc += spec.get(m, n) * omega_pow(d, (m * l) as i64 - (k * n) as i64);
                }
            }
            mu[flat(d, k, l)] = acc * norm;
        }
    }
    WeylMapCoeffs { d, mu }
}

/// Max of `‖Φ[U X U†] − U Φ[X] U†‖_max` over the generators `(0,1,0)`, `(0,0,1)`
/// and the matrix units `X`.
///
/// Covariance under `g` and `h` implies covariance under `gh`, so the two
/// generators cover the whole group.
pub fn verify_covariance(map: &dyn LinearMap, label: IrrepLabel) -> Result<f64> {
    let d = map.dim();
    if label.dimension(d) != d {
        return Err(Error::UnsupportedIrrep(label.to_string()));
    }
    let gens = [
        GroupElement::new(d, 0, 1, 0)?,
        GroupElement::new(d, 0, 0, 1)?,
    ];
    let mut worst: f64 = 0.0;
    for g in &gens {
        let u = irrep_matrix(label, g)?;
        for x in crate::group::matrix_units(d) {
            let lhs = map.apply(&x.conjugate_by(&u)?)?;
            let rhs = map.apply(&x)?.conjugate_by(&u)?;
            worst = worst.max(lhs.max_abs_diff(&rhs));
        }
    }
    Ok(worst)
}

#[derive(Serialize, Deserialize)]
struct WeylArrayJson {
    d: usize,
    kind: String,
    re: Vec<f64>,
    im: Vec<f64>,
}

/// On-disk form of a Weyl map: either its Kraus weights or its spectrum.
#[derive(Debug, Clone, PartialEq)]
pub enum WeylMapFile {
    Prob(WeylMapCoeffs),
    Spectrum(WeylMapSpectrum),
}

impl WeylMapFile {
    pub fn d(&self) -> usize {
        match self {
            WeylMapFile::Prob(c) => c.d,
            WeylMapFile::Spectrum(s) => s.d,
        }
    }

    pub fn coeffs(&self) -> WeylMapCoeffs {
        match self {
            WeylMapFile::Prob(c) => c.clone(),
            WeylMapFile::Spectrum(s) => prob_from_spectrum(s),
        }
    }

    pub fn spectrum(&self) -> WeylMapSpectrum {
        match self {
            WeylMapFile::Prob(c) => spectrum_from_prob(c),
            WeylMapFile::Spectrum(s) => s.clone(),
        }
    }
}

impl Serialize for WeylMapFile {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let (d, kind, vals) = match self {
            WeylMapFile::Prob(c) => (c.d, "prob", &c.mu),
            WeylMapFile::Spectrum(sp) => (sp.d, "spectrum", &sp.ell),
        };
        WeylArrayJson {
            d,
            kind: kind.to_string(),
            re: vals.iter().map(|z| z.re).collect(),
            im: vals.iter().map(|z| z.im).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for WeylMapFile {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let raw = WeylArrayJson::deserialize(de)?;
        if raw.d < 2 || raw.re.len() != raw.d * raw.d || raw.im.len() != raw.d * raw.d {
            return Err(D::Error::custom(format!(
                "d = {} needs {} re/im entries",
                raw.d,
                raw.d * raw.d
            )));
        }
        let vals: Vec<Complex64> = raw
            .re
            .iter()
            .zip(&raw.im)
            .map(|(&a, &b)| Complex64::new(a, b))
            .collect();
        match raw.kind.as_str() {
            "prob" => Ok(WeylMapFile::Prob(WeylMapCoeffs { d: raw.d, mu: vals })),
            "spectrum" => Ok(WeylMapFile::Spectrum(WeylMapSpectrum {
                d: raw.d,
                ell: vals,
            })),
            other => Err(D::Error::custom(format!("unknown kind {other:?}"))),
        }
    }
}

impl Serialize for WeylMapCoeffs {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        WeylMapFile::Prob(self.clone()).serialize(s)
    }
}

impl Serialize for WeylMapSpectrum {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        WeylMapFile::Spectrum(self.clone()).serialize(s)
    }
}
