//! Positive, trace-preserving maps covariant under the Weyl operators.
//!
//! Maps are tabulated as [`Superop`]s. Basis and frame indices are 0-based:
//! the Weyl frame element `F_α = W_kl/√d` has `α = k·d + l`, and MUB number 0
//! is the computational basis while MUB `k+1` is the eigenbasis of `W_{k,1}`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{check_dim, require_prime, weyl};
use crate::linalg::{hermitian_eigen, omega_pow, CMatrix, Tolerance, ONE, ZERO};
use crate::superop::{LinearMap, Superop};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MubSet {
    pub d: usize,
    /// `bases[α][k]` is the unit vector `ψ_k^{(α)}`.
    pub bases: Vec<Vec<Vec<Complex64>>>,
}

impl MubSet {
    pub fn len(&self) -> usize {
        self.bases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bases.is_empty()
    }

    pub fn projector(&self, alpha: usize, k: usize) -> CMatrix {
        CMatrix::outer(&self.bases[alpha][k], &self.bases[alpha][k])
    }

    fn check_index(&self, alpha: usize) -> Result<()> {
        if alpha >= self.bases.len() {
            return Err(Error::BasisOutOfRange {
                index: alpha,
                max: self.bases.len() - 1,
            });
        }
        Ok(())
    }

    /// `U_α = Σ_l ω^l P_l^{(α)}`
    pub fn unitary(&self, alpha: usize) -> Result<CMatrix> {
        self.check_index(alpha)?;
        let d = self.d;
        let mut u = CMatrix::zeros(d, d);
        for l in 0..d {
            u = &u + &self.projector(alpha, l).scale(omega_pow(d, l as i64));
        }
        Ok(u)
    }

    /// Largest deviation of `|⟨ψ_k^{(α)}|ψ_l^{(β)}⟩|²` from `δ_kl` (same basis)
    /// or `1/d` (different bases).
    pub fn unbiasedness_defect(&self) -> f64 {
        let d = self.d;
        let mut worst: f64 = 0.0;
        for (a, ba) in self.bases.iter().enumerate() {
            for (b, bb) in self.bases.iter().enumerate() {
                for (k, u) in ba.iter().enumerate() {
                    for (l, v) in bb.iter().enumerate() {
                        let overlap: Complex64 = u.iter().zip(v).map(|(x, y)| x.conj() * y).sum();
                        let expect = match (a == b, k == l) {
                            (true, true) => 1.0,
                            (true, false) => 0.0,
                            (false, _) => 1.0 / d as f64,
                        };
                        worst = worst.max((overlap.norm_sqr() - expect).abs());
                    }
                }
            }
        }
        worst
    }
}

/// The d+1 mutually unbiased bases for prime d.
///
/// Basis 0 is the eigenbasis of `W_{1,0}` and basis `k+1` that of `W_{k,1}`.
/// Within basis `k+1`, vector `j` has eigenvalue `e^{iπk(d−1)/d} ω^j` and a
/// real positive first component.
pub fn mub_set(d: usize) -> Result<MubSet> {
    require_prime(d)?;
    let amp = 1.0 / (d as f64).sqrt();
    let mut bases = Vec::with_capacity(d + 1);
    bases.push(
        (0..d)
            .map(|j| (0..d).map(|m| if m == j { ONE } else { ZERO }).collect())
            .collect(),
    );
    for k in 0..d {
        let base_phase =
            Complex64::from_polar(1.0, std::f64::consts::PI * (k * (d - 1)) as f64 / d as f64);
        let basis = (0..d)
            .map(|j| {
                let lambda = base_phase * omega_pow(d, j as i64);
                let mut c = vec![Complex64::new(amp, 0.0); d];
                for m in 0..d - 1 {
                    c[m + 1] = omega_pow(d, (k * m) as i64) * c[m] / lambda;
                }
                c
            })
            .collect();
        bases.push(basis);
    }
    Ok(MubSet { d, bases })
}

/// A tabulated positive-map candidate and whether the analytic bound certifies it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PositiveMap {
    pub certified: bool,
    pub superop: Superop,
}

impl LinearMap for PositiveMap {
    fn dim(&self) -> usize {
        self.superop.d
    }

    fn apply(&self, x: &CMatrix) -> Result<CMatrix> {
        self.superop.apply(x)
    }
}

/// `X ↦ Σ_α λ_α F_α X F_α†` over the Weyl frame, negative on `delta`.
///
/// `lambda_plus` lists the weights of the indices outside `delta` in ascending order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosMapSpec {
    pub d: usize,
    pub delta: Vec<usize>,
    pub lambda_minus: Vec<f64>,
    pub lambda_plus: Vec<f64>,
}

impl PosMapSpec {
    fn validate(&self) -> Result<()> {
        let d = self.d;
        check_dim(d)?;
        let n = d * d;
        let mut seen = vec![false; n];
        for &a in &self.delta {
            if a >= n {
                return Err(Error::BasisOutOfRange {
                    index: a,
                    max: n - 1,
                });
            }
            if seen[a] {
                return Err(Error::DuplicateIndex(a));
            }
            seen[a] = true;
        }
        if self.delta.len() >= d {
            return Err(Error::TooManyNegatives {
                negatives: self.delta.len(),
                d,
            });
        }
        if self.lambda_minus.len() != self.delta.len() {
            return Err(Error::ShapeMismatch {
                expected: (self.delta.len(), 1),
                found: (self.lambda_minus.len(), 1),
            });
        }
        if self.lambda_plus.len() != n - self.delta.len() {
            return Err(Error::ShapeMismatch {
                expected: (n - self.delta.len(), 1),
                found: (self.lambda_plus.len(), 1),
            });
        }
        if let Some(x) = self.lambda_minus.iter().find(|&&x| x.is_nan() || x >= 0.0) {
            return Err(Error::SignViolation(format!(
                "lambda_minus entry {x} is not negative"
            )));
        }
        if let Some(x) = self.lambda_plus.iter().find(|&&x| x.is_nan() || x <= 0.0) {
            return Err(Error::SignViolation(format!(
                "lambda_plus entry {x} is not positive"
            )));
        }
        Ok(())
    }

    /// All d² weights indexed by `α`.
    pub fn weights(&self) -> Vec<f64> {
        let n = self.d * self.d;
        let mut out = vec![0.0; n];
        for (&a, &w) in self.delta.iter().zip(&self.lambda_minus) {
            out[a] = w;
        }
        let rest = (0..n).filter(|a| !self.delta.contains(a));
        for (a, &w) in rest.zip(&self.lambda_plus) {
            out[a] = w;
        }
        out
    }

    /// `(1/(d−N)) Σ_{β∈Δ} |λ_β⁻|`
    pub fn bound(&self) -> f64 {
        let total: f64 = self.lambda_minus.iter().map(|x| x.abs()).sum();
        total / (self.d - self.delta.len()) as f64
    }

    pub fn is_certified(&self, tol: &Tolerance) -> bool {
        let bound = self.bound();
        self.lambda_plus
            .iter()
            .all(|&l| l >= bound - tol.eps_eq * bound.max(1.0))
    }
}

pub fn build_positive_map(spec: &PosMapSpec, tol: &Tolerance) -> Result<PositiveMap> {
    spec.validate()?;
    let d = spec.d;
    let mut s = Superop::zero(d);
    for (a, w) in spec.weights().into_iter().enumerate() {
        let f = weyl(d, (a / d) as i64, (a % d) as i64);
        s.add_assign(&Superop::conjugation(&f, w / d as f64));
    }
    Ok(PositiveMap {
        certified: spec.is_certified(tol),
        superop: s,
    })
}

/// `λ⁻ = −1` on the identity, `λ⁺ = 1/(d−1)` elsewhere: `(I Tr X − X)/(d−1)`.
pub fn reduction_spec(d: usize) -> PosMapSpec {
    PosMapSpec {
        d,
        delta: vec![0],
        lambda_minus: vec![-1.0],
        lambda_plus: vec![1.0 / (d - 1) as f64; d * d - 1],
    }
}

/// Qubit parameters `λ⁻ = −1`, `λ⁺ = (1,1,1)`.
pub fn qubit_reduction_spec() -> PosMapSpec {
    PosMapSpec {
        d: 2,
        delta: vec![0],
        lambda_minus: vec![-1.0],
        lambda_plus: vec![1.0; 3],
    }
}

/// Weight `−1` on `α = 0..d−2` and `d−1` elsewhere, times `1/(d−1)²`.
pub fn extremal_spec(d: usize) -> PosMapSpec {
    let n = d - 1;
    let s = 1.0 / (n * n) as f64;
    PosMapSpec {
        d,
        delta: (0..n).collect(),
        lambda_minus: vec![-s; n],
        lambda_plus: vec![n as f64 * s; d * d - n],
    }
}

/// `X ↦ (I Tr X − X)/(d−1)`
pub fn reduction_map(d: usize) -> Superop {
    let mut s = completely_depolarizing(d).scale(d as f64);
    s.add_assign(&Superop::identity(d).scale(-1.0));
    s.scale(1.0 / (d - 1) as f64)
}

/// `Φ₀[X] = I Tr X / d`
pub fn completely_depolarizing(d: usize) -> Superop {
    let mut s = Superop::zero(d);
    for i in 0..d {
        for j in 0..d {
            let a = CMatrix::from_fn(d, d, |r, c| if r == i && c == j { ONE } else { ZERO });
            s.add_assign(&Superop::conjugation(&a, 1.0 / d as f64));
        }
    }
    s
}

pub fn pinching_superop(alpha: usize, mubs: &MubSet) -> Result<Superop> {
    mubs.check_index(alpha)?;
    let mut s = Superop::zero(mubs.d);
    for k in 0..mubs.d {
        s.add_assign(&Superop::conjugation(&mubs.projector(alpha, k), 1.0));
    }
    Ok(s)
}

/// `Φ_α[X] = Σ_k P_k^{(α)} X P_k^{(α)}`
pub fn pinching(alpha: usize, mubs: &MubSet, x: &CMatrix) -> Result<CMatrix> {
    mubs.check_index(alpha)?;
    let d = mubs.d;
    if x.shape() != (d, d) {
        return Err(Error::ShapeMismatch {
            expected: (d, d),
            found: x.shape(),
        });
    }
    let mut out = CMatrix::zeros(d, d);
    for k in 0..d {
        out = &out + &x.conjugate_by(&mubs.projector(alpha, k))?;
    }
    Ok(out)
}

fn check_rotations(rotations: &[Vec<Vec<f64>>], d: usize, tol: &Tolerance) -> Result<()> {
    if rotations.len() != d + 1 {
        return Err(Error::ShapeMismatch {
            expected: (d + 1, 1),
            found: (rotations.len(), 1),
        });
    }
    for (index, o) in rotations.iter().enumerate() {
        if o.len() != d || o.iter().any(|row| row.len() != d) {
            return Err(Error::ShapeMismatch {
                expected: (d, d),
                found: (o.len(), o.first().map_or(0, Vec::len)),
            });
        }
        let mut defect: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                let dot: f64 = (0..d).map(|r| o[r][i] * o[r][j]).sum();
                defect = defect.max((dot - if i == j { 1.0 } else { 0.0 }).abs());
            }
        }
        if defect > tol.eps_eq {
            return Err(Error::NotOrthogonal { index, defect });
        }
        let axis = o
            .iter()
            .map(|row| (row.iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max);
        if axis > tol.eps_eq {
            return Err(Error::DoesNotFixDiagonalAxis {
                index,
                defect: axis,
            });
        }
    }
    Ok(())
}

/// `Φ[X] = (1/(d−1)) [2 I Tr X − Σ_α Σ_kl O^{(α)}_kl Tr(X P_l^{(α)}) P_k^{(α)}]`
///
/// The result is Weyl-covariant exactly when every `O^{(α)}` commutes with the
/// cyclic shift of basis labels (is circulant). For d = 3 every proper
/// rotation about `(1,1,1)` has this property.
pub fn mub_map(rotations: &[Vec<Vec<f64>>], mubs: &MubSet, tol: &Tolerance) -> Result<Superop> {
    let d = mubs.d;
    check_rotations(rotations, d, tol)?;
    let norm = 1.0 / (d - 1) as f64;
    let mut s = completely_depolarizing(d).scale(2.0 * d as f64 * norm);
    for (alpha, o) in rotations.iter().enumerate() {
        let basis = &mubs.bases[alpha];
        for k in 0..d {
            for l in 0..d {
                if o[k][l] == 0.0 {
                    continue;
                }
                let a = CMatrix::outer(&basis[k], &basis[l]);
                s.add_assign(&Superop::conjugation(&a, -o[k][l] * norm));
            }
        }
    }
    Ok(s)
}

/// Identity rotations for every basis.
pub fn identity_rotations(d: usize) -> Vec<Vec<Vec<f64>>> {
    let eye: Vec<Vec<f64>> = (0..d)
        .map(|i| (0..d).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    vec![eye; d + 1]
}

/// A random proper rotation of R^d fixing `(1,…,1)`.
pub fn random_axis_rotation(d: usize, rng: &mut impl Rng) -> Vec<Vec<f64>> {
    let mut seed = DMatrix::<f64>::from_fn(d, d, |_, _| rng.sample(StandardNormal));
    seed.column_mut(0).fill(1.0);
    let mut q = seed.qr().q();
    if q[(0, 0)] < 0.0 {
        q.neg_mut();
    }
    let m = d - 1;
    let mut r = DMatrix::<f64>::from_fn(m, m, |_, _| rng.sample(StandardNormal))
        .qr()
        .q();
    if r.determinant() < 0.0 {
        r.column_mut(0).neg_mut();
    }
    let mut block = DMatrix::<f64>::identity(d, d);
    block.view_mut((1, 1), (m, m)).copy_from(&r);
    let o = &q * block * q.transpose();
    (0..d)
        .map(|i| (0..d).map(|j| o[(i, j)]).collect())
        .collect()
}

/// `Φ_Γ = (1/(d−1)) (2(|Γ|−1) Φ₀ + Σ_{α∉Γ} Φ_α − Σ_{α∈Γ} Φ_α)`
pub fn phi_gamma(gamma: &[usize], mubs: &MubSet) -> Result<Superop> {
    if gamma.is_empty() {
        return Err(Error::EmptyGamma);
    }
    let d = mubs.d;
    let mut inside = vec![false; mubs.len()];
    for &a in gamma {
        mubs.check_index(a)?;
        if inside[a] {
            return Err(Error::DuplicateIndex(a));
        }
        inside[a] = true;
    }
    let norm = 1.0 / (d - 1) as f64;
    let mut s = completely_depolarizing(d).scale(2.0 * (gamma.len() - 1) as f64 * norm);
    for (alpha, &is_in) in inside.iter().enumerate() {
        let sign = if is_in { -norm } else { norm };
        s.add_assign(&pinching_superop(alpha, mubs)?.scale(sign));
    }
    Ok(s)
}

/// Unit vector with i.i.d. complex-normal components.
pub fn random_unit_vector(d: usize, rng: &mut impl Rng) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..d)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PositivityStatus {
    Certified,
    ProbeClean,
    Violated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub seed: u64,
    pub trials: usize,
    pub min_eigenvalue: f64,
    /// Vector `ψ` with `Φ[|ψ⟩⟨ψ|]` not PSD, when one was found.
    pub witness: Option<Vec<Complex64>>,
}

impl ProbeReport {
    pub fn status(&self, certified: bool) -> PositivityStatus {
        match (&self.witness, certified) {
            (Some(_), _) => PositivityStatus::Violated,
            (None, true) => PositivityStatus::Certified,
            (None, false) => PositivityStatus::ProbeClean,
        }
    }
}

fn min_eigenvalue(a: &CMatrix, tol: &Tolerance) -> Result<f64> {
    let relaxed = Tolerance {
        eps_herm: tol.eps_eq,
        ..*tol
    };
    Ok(hermitian_eigen(a, &relaxed)?.eigenvalues[0])
}

/// Minimum eigenvalue of `Φ[P]` over random rank-1 projectors `P`.
///
/// One-sided: a clean probe does not prove positivity.
pub fn positivity_probe(
    map: &dyn LinearMap,
    trials: usize,
    seed: u64,
    tol: &Tolerance,
) -> Result<ProbeReport> {
    let d = map.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut min = f64::INFINITY;
    let mut witness = None;
    for _ in 0..trials {
        let v = random_unit_vector(d, &mut rng);
        let ev = min_eigenvalue(&map.apply(&CMatrix::projector(&v))?, tol)?;
        if ev < min {
            min = ev;
            if ev < -tol.eps_psd {
                witness = Some(v);
            }
        }
    }
    Ok(ProbeReport {
        seed,
        trials,
        min_eigenvalue: min,
        witness,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub min_eigenvalue: f64,
    pub entangled_detected: bool,
}

/// Smallest eigenvalue of `(1⊗Φ)[ρ]`; a negative value certifies entanglement.
pub fn witness_apply(map: &Superop, rho: &CMatrix, tol: &Tolerance) -> Result<WitnessReport> {
    let d = map.d;
    if rho.shape() != (d * d, d * d) {
        return Err(Error::NotAState(format!(
            "expected a {0}x{0} matrix, found {1}x{2}",
            d * d,
            rho.rows(),
            rho.cols()
        )));
    }
    let defect = rho.hermiticity_defect();
    if defect > tol.eps_eq {
        return Err(Error::NotAState(format!("Hermiticity defect {defect:e}")));
    }
    if (rho.trace() - ONE).norm() > tol.eps_eq {
        return Err(Error::NotAState(format!("trace {}", rho.trace())));
    }
    let rho_min = min_eigenvalue(rho, tol)?;
    if rho_min < -tol.eps_psd {
        return Err(Error::NotAState(format!(
            "eigenvalue {rho_min:e} is negative"
        )));
    }
    let out = map.apply_second_factor(rho)?;
    let min_eigenvalue = min_eigenvalue(&out, tol)?;
    Ok(WitnessReport {
        min_eigenvalue,
        entangled_detected: min_eigenvalue < -tol.eps_psd,
    })
}

/// `|Ω⟩⟨Ω|` with `|Ω⟩ = Σ_i |ii⟩/√d`.
pub fn maximally_entangled(d: usize) -> CMatrix {
    let mut v = vec![ZERO; d * d];
    for i in 0..d {
        v[i * d + i] = Complex64::new(1.0 / (d as f64).sqrt(), 0.0);
    }
    CMatrix::outer(&v, &v)
}

/// Map description accepted on disk: either a weight spec or a tabulated superoperator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MapFile {
    Spec(PosMapSpec),
    Built(PositiveMap),
    Raw(Superop),
}

impl MapFile {
    pub fn build(&self, tol: &Tolerance) -> Result<PositiveMap> {
        match self {
            MapFile::Spec(spec) => build_positive_map(spec, tol),
            MapFile::Built(map) => Ok(map.clone()),
            MapFile::Raw(s) => Ok(PositiveMap {
                certified: false,
                superop: s.clone(),
            }),
        }
    }
}
