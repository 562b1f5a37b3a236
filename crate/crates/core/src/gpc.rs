//! Generalized Pauli channels for prime d.
//!
//! The nonzero points of Z_d × Z_d split into d+1 "rays" `{α(k₀,l₀) | α ∈ Z_d^×}`.
//! A Weyl map is a generalized Pauli channel when its weights (equivalently its
//! spectrum) are constant on every ray. Ray numbering follows the Kraus form
//! with parameters `π_0, …, π_{d+1}`:
//!
//! * `0` is the identity point `(0,0)`,
//! * `k = 1..=d` is the ray through `(k mod d, 1)`, i.e. `{(αk, α)}`,
//! * `d+1` is the ray through `(1, 0)`.

use serde::{Deserialize, Serialize};

use crate::channels::{apply, prob_from_spectrum, projector_apply, WeylMapCoeffs, WeylMapSpectrum};
use crate::error::{Error, Result};
use crate::group::{check_dim, flat, require_prime, weyl_basis};
use crate::linalg::{omega_pow, CMatrix, Tolerance, ONE, ZERO};
use crate::repr::equivalence_transform;
use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GpcParams {
    pub d: usize,
    pub pi: Vec<f64>,
}

impl GpcParams {
    pub fn new(d: usize, pi: Vec<f64>) -> Result<Self> {
        require_prime(d)?;
        if pi.len() != d + 2 {
            return Err(Error::ShapeMismatch {
                expected: (d + 2, 1),
                found: (pi.len(), 1),
            });
        }
        Ok(GpcParams { d, pi })
    }

    pub fn is_channel(&self, tol: &Tolerance) -> bool {
        self.pi.iter().all(|&p| p >= -tol.eps_psd)
            && (self.pi.iter().sum::<f64>() - 1.0).abs() <= tol.eps_eq
    }
}

/// The d+2 orbits of `(k,l) ↦ (αk, αl)`, numbered as in the module docs.
pub fn orbits(d: usize) -> Result<Vec<Vec<(usize, usize)>>> {
    require_prime(d)?;
    let mut out = vec![vec![(0, 0)]];
    for k in 1..=d {
        out.push((1..d).map(|a| ((a * k) % d, a)).collect());
    }
    out.push((1..d).map(|a| (a, 0)).collect());
    Ok(out)
}

/// Orbit number of `(k, l)`.
pub fn orbit_of(d: usize, k: usize, l: usize) -> usize {
    match (k % d, l % d) {
        (0, 0) => 0,
        (k, 0) if k != 0 => d + 1,
        (k, l) => {
            // slope k/l; ray index is k·l⁻¹ with 0 mapped to d
            let inv = (1..d).find(|x| (x * l) % d == 1).expect("prime d");
            let s = (k * inv) % d;
            if s == 0 {
                d
            } else {
                s
            }
        }
    }
}

/// `π_0 X + (1/(d−1)) [Σ_k π_k Σ_α W_{αk,α} X W† + π_{d+1} Σ_α W_{α0} X W†]`
pub fn gpc_channel(params: &GpcParams) -> Result<WeylMapCoeffs> {
    let d = params.d;
    require_prime(d)?;
    let orbs = orbits(d)?;
    let mut mu = vec![ZERO; d * d];
    for (i, orbit) in orbs.iter().enumerate() {
        let weight = if i == 0 {
            params.pi[0]
        } else {
            params.pi[i] / (d - 1) as f64
        };
        for &(k, l) in orbit {
            mu[flat(d, k, l)] += Complex64::new(weight, 0.0);
        }
    }
    WeylMapCoeffs::new(d, mu)
}

/// Recovers `π` from coefficients that are constant on orbits.
pub fn gpc_params_from_coeffs(coeffs: &WeylMapCoeffs) -> Result<GpcParams> {
    let d = coeffs.d;
    let orbs = orbits(d)?;
    let pi = orbs
        .iter()
        .map(|orbit| orbit.iter().map(|&(k, l)| coeffs.get(k, l).re).sum())
        .collect();
    GpcParams::new(d, pi)
}

fn s_covariance_index_check(values: &[Complex64], d: usize, eps: f64) -> bool {
    (0..d).all(|m| {
        (0..d).all(|n| {
            (values[flat(d, (d - m) % d, (d - n) % d)] - values[flat(d, m, n)]).norm() <= eps
        })
    })
}

/// `ℓ_{−m,−n} = ℓ_mn`, cross-checked against `Φ[SXS†] = SΦ[X]S†` on the Weyl basis.
pub fn is_s_covariant(spec: &WeylMapSpectrum, tol: &Tolerance) -> Result<bool> {
    let d = spec.d;
    check_dim(d)?;
    let by_index = s_covariance_index_check(&spec.ell, d, tol.eps_eq);

    let coeffs = prob_from_spectrum(spec);
    let s = equivalence_transform(d)?;
    let scale = spec.ell.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let mut residual: f64 = 0.0;
    for w in weyl_basis(d) {
        let lhs = apply(&coeffs, &w.conjugate_by(&s)?)?;
        let rhs = apply(&coeffs, &w)?.conjugate_by(&s)?;
        residual = residual.max(lhs.max_abs_diff(&rhs));
    }
    let by_matrix = residual <= tol.eps_eq * scale;
    if by_index != by_matrix {
        return Err(Error::RouteDisagreement(format!(
            "S-covariance: index check {by_index}, matrix residual {residual:e}"
        )));
    }
    Ok(by_index)
}

/// First `(α, k, l)` with `values[αk, αl] ≠ values[k, l]`.
fn orbit_violation(values: &[Complex64], d: usize, eps: f64) -> Option<(usize, usize, usize)> {
    for a in 2..d {
        for k in 0..d {
            for l in 0..d {
                let scaled = values[flat(d, (a * k) % d, (a * l) % d)];
                if (scaled - values[flat(d, k, l)]).norm() > eps {
                    return Some((a, k, l));
                }
            }
        }
    }
    None
}

/// Outcome of the generalized-Pauli test with the first failing `(α, k, l)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GpcVerdict {
    pub gpc: bool,
    pub failing: Option<(usize, usize, usize)>,
}

pub fn gpc_verdict(spec: &WeylMapSpectrum, tol: &Tolerance) -> Result<GpcVerdict> {
    let d = spec.d;
    require_prime(d)?;
    let on_spectrum = orbit_violation(&spec.ell, d, tol.eps_eq);
    let coeffs = prob_from_spectrum(spec);
    let on_prob = orbit_violation(&coeffs.mu, d, tol.eps_eq);
    if on_spectrum.is_none() != on_prob.is_none() {
        return Err(Error::RouteDisagreement(format!(
            "orbit test on spectrum {on_spectrum:?} vs on weights {on_prob:?}"
        )));
    }
    Ok(GpcVerdict {
        gpc: on_spectrum.is_none(),
        failing: on_spectrum,
    })
}

/// `ℓ_{αk,αl} = ℓ_kl` for all `α ∈ {1..d−1}`; the same test on the weights must agree.
pub fn is_gpc(spec: &WeylMapSpectrum, tol: &Tolerance) -> Result<bool> {
    gpc_verdict(spec, tol).map(|v| v.gpc)
}

/// `Φ_β = Σ ℓ_kl Π_{βk,βl}` as a map.
pub fn phi_beta_apply(spec: &WeylMapSpectrum, beta: usize, x: &CMatrix) -> Result<CMatrix> {
    let d = spec.d;
    let mut out = CMatrix::zeros(d, d);
    for k in 0..d {
        for l in 0..d {
            let p = projector_apply((beta * k) % d, (beta * l) % d, x)?;
            out = &out + &p.scale(spec.get(k, l));
        }
    }
    Ok(out)
}

/// Whether `Φ = Φ_β`, tested on the Weyl basis. `β` may range over `1..d`.
pub fn phi_beta_equal(spec: &WeylMapSpectrum, beta: usize, tol: &Tolerance) -> Result<bool> {
    let d = spec.d;
    require_prime(d)?;
    if beta == 0 || beta >= d {
        return Err(Error::BetaOutOfRange { beta, max: d - 1 });
    }
    let coeffs = prob_from_spectrum(spec);
    let scale = spec.ell.iter().map(|z| z.norm()).fold(1.0, f64::max);
    for w in weyl_basis(d) {
        let a = apply(&coeffs, &w)?;
        let b = phi_beta_apply(spec, beta, &w)?;
        if a.max_abs_diff(&b) > tol.eps_eq * scale {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `β` range for the equality criterion: `1..=(d−1)/2` for real spectra,
/// `1..=d−1` otherwise.
pub fn beta_range(d: usize, real_spectrum: bool) -> std::ops::RangeInclusive<usize> {
    if real_spectrum {
        1..=((d - 1) / 2).max(1)
    } else {
        1..=d - 1
    }
}

/// `A_kl = Σ_m ω^{2(m−k)l} |m⟩⟨−m+2k|`, odd d only.
pub fn wigner_kernel(d: usize, k: usize, l: usize) -> Result<CMatrix> {
    check_dim(d)?;
    if d.is_multiple_of(2) {
        return Err(Error::EvenDimension(d));
    }
    if k >= d || l >= d {
        return Err(Error::IndexOutOfRange { d, k, l });
    }
    let mut a = CMatrix::zeros(d, d);
    for m in 0..d {
        let col = (2 * k + d - m) % d;
        a[(m, col)] = omega_pow(d, 2 * (m as i64 - k as i64) * l as i64);
    }
    Ok(a)
}

/// `𝒲_kl = (1/d) Tr(ρ A_kl)`, flat in `(k, l)`.
pub fn wigner_function(rho: &CMatrix, tol: &Tolerance) -> Result<Vec<f64>> {
    let d = rho.rows();
    if !rho.is_square() {
        return Err(Error::NotAState("matrix is not square".into()));
    }
    if d.is_multiple_of(2) {
        return Err(Error::EvenDimension(d));
    }
    if !rho.is_hermitian(tol.eps_eq) {
        return Err(Error::NotAState("not Hermitian".into()));
    }
    if (rho.trace() - ONE).norm() > tol.eps_eq {
        return Err(Error::NotAState(format!("trace {} != 1", rho.trace())));
    }
    let mut out = Vec::with_capacity(d * d);
    for k in 0..d {
        for l in 0..d {
            let a = wigner_kernel(d, k, l)?;
            out.push((rho.matmul(&a)?.trace() / d as f64).re);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{is_channel, spectrum_from_prob};
    use crate::group::weyl;
    use crate::linalg::hermitian_eigenvalues;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeSet;

    fn realize_kraus_form(params: &GpcParams, x: &CMatrix) -> CMatrix {
        // literal Kraus sum, test oracle for gpc_channel
        let d = params.d as i64;
        let norm = 1.0 / (d - 1) as f64;
        let mut out = x.scale_re(params.pi[0]);
        for k in 1..=d {
            for a in 1..d {
                let w = weyl(params.d, a * k, a);
                out = &out
                    + &x.conjugate_by(&w)
                        .unwrap()
                        .scale_re(params.pi[k as usize] * norm);
            }
        }
        for a in 1..d {
            let w = weyl(params.d, a, 0);
            out = &out
                + &x.conjugate_by(&w)
                    .unwrap()
                    .scale_re(params.pi[params.d + 1] * norm);
        }
        out
    }

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn orbits_partition_the_plane() {
        for d in [2, 3, 5, 7] {
            let orbs = orbits(d).unwrap();
            assert_eq!(orbs.len(), d + 2);
            let all: BTreeSet<_> = orbs.iter().flatten().copied().collect();
            assert_eq!(all.len(), d * d);
            for (i, orbit) in orbs.iter().enumerate() {
                for &(k, l) in orbit {
                    assert_eq!(orbit_of(d, k, l), i);
                    // closed under scaling
                    for a in 1..d {
                        assert_eq!(orbit_of(d, a * k % d, a * l % d), i);
                    }
                }
            }
        }
    }

    #[test]
    fn gpc_identity_and_kraus_form() {
        let mut pi = vec![0.0; 5];
        pi[0] = 1.0;
        let id = gpc_channel(&GpcParams::new(3, pi).unwrap()).unwrap();
        assert_eq!(id, WeylMapCoeffs::identity(3));

        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for d in [2, 3, 5] {
            let pi: Vec<f64> = (0..d + 2).map(|_| rng.random_range(0.0..1.0)).collect();
            let params = GpcParams::new(d, pi).unwrap();
            let coeffs = gpc_channel(&params).unwrap();
            for w in weyl_basis(d) {
                let a = apply(&coeffs, &w).unwrap();
                assert!(a.approx_eq(&realize_kraus_form(&params, &w), 1e-12));
            }
            let back = gpc_params_from_coeffs(&coeffs).unwrap();
            assert!(back
                .pi
                .iter()
                .zip(&params.pi)
                .all(|(a, b)| (a - b).abs() < 1e-12));
        }
    }

    #[test]
    fn gpc_qubit_is_pauli() {
        let params = GpcParams::new(2, vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let c = gpc_channel(&params).unwrap();
        assert_eq!(c.get(0, 0).re, 0.1);
        assert_eq!(c.get(1, 1).re, 0.2);
        assert_eq!(c.get(0, 1).re, 0.3);
        assert_eq!(c.get(1, 0).re, 0.4);
    }

    #[test]
    fn gpc_d3_uniform() {
        let params = GpcParams::new(3, vec![0.2; 5]).unwrap();
        let c = gpc_channel(&params).unwrap();
        assert!((c.get(0, 0).re - 0.2).abs() < 1e-15);
        for i in 1..9 {
            assert!((c.mu[i].re - 0.1).abs() < 1e-15);
        }
        assert!(is_gpc(&spectrum_from_prob(&c), &tol()).unwrap());
        assert!(is_channel(&c, &tol()).unwrap().is_channel());
    }

    #[test]
    fn gpc_channel_iff_pi_probability() {
        let good =
            gpc_channel(&GpcParams::new(5, vec![0.3, 0.1, 0.1, 0.1, 0.1, 0.1, 0.2]).unwrap())
                .unwrap();
        assert!(is_channel(&good, &tol()).unwrap().is_channel());
        let neg = GpcParams::new(5, vec![0.5, -0.1, 0.1, 0.1, 0.1, 0.1, 0.2]).unwrap();
        assert!(!neg.is_channel(&tol()));
        assert!(!is_channel(&gpc_channel(&neg).unwrap(), &tol()).unwrap().cp);
        assert_eq!(
            GpcParams::new(4, vec![0.0; 6]),
            Err(Error::NonPrimeDimension(4))
        );
    }

    #[test]
    fn s_covariance_examples() {
        let id = spectrum_from_prob(&WeylMapCoeffs::identity(3));
        assert!(is_s_covariant(&id, &tol()).unwrap());
        let mut ell = vec![1.0; 9];
        ell[flat(3, 0, 1)] = 0.5;
        ell[flat(3, 0, 2)] = 0.2;
        let spec = WeylMapSpectrum::from_real(3, &ell).unwrap();
        assert!(!is_s_covariant(&spec, &tol()).unwrap());
    }

    #[test]
    fn s_covariant_channel_has_real_spectrum() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for d in [3, 5] {
            let mut p: Vec<f64> = (0..d * d).map(|_| rng.random_range(0.0..1.0)).collect();
            for k in 0..d {
                for l in 0..d {
                    let avg = 0.5 * (p[flat(d, k, l)] + p[flat(d, (d - k) % d, (d - l) % d)]);
                    p[flat(d, k, l)] = avg;
                    p[flat(d, (d - k) % d, (d - l) % d)] = avg;
                }
            }
            let total: f64 = p.iter().sum();
            p.iter_mut().for_each(|x| *x /= total);
            let spec = spectrum_from_prob(&WeylMapCoeffs::from_real(d, &p).unwrap());
            assert!(is_s_covariant(&spec, &tol()).unwrap());
            assert!(spec.ell.iter().all(|z| z.im.abs() < 1e-12));
        }
    }

    #[test]
    fn d5_counterexample() {
        let mut p = vec![0.0; 25];
        p[0] = 0.5;
        p[flat(5, 1, 0)] = 0.25;
        p[flat(5, 4, 0)] = 0.25;
        let spec = spectrum_from_prob(&WeylMapCoeffs::from_real(5, &p).unwrap());
        assert!(is_s_covariant(&spec, &tol()).unwrap());
        let v = gpc_verdict(&spec, &tol()).unwrap();
        assert!(!v.gpc);
        assert!(v.failing.is_some());
        assert!(phi_beta_equal(&spec, 1, &tol()).unwrap());
        assert!(!phi_beta_equal(&spec, 2, &tol()).unwrap());
    }

    #[test]
    fn phi_beta_on_gpc_and_identity() {
        let params = GpcParams::new(5, vec![0.3, 0.05, 0.1, 0.15, 0.1, 0.2, 0.1]).unwrap();
        let spec = spectrum_from_prob(&gpc_channel(&params).unwrap());
        let id = spectrum_from_prob(&WeylMapCoeffs::identity(5));
        for beta in 1..5 {
            assert!(phi_beta_equal(&spec, beta, &tol()).unwrap());
            assert!(phi_beta_equal(&id, beta, &tol()).unwrap());
        }
        assert_eq!(
            phi_beta_equal(&id, 0, &tol()),
            Err(Error::BetaOutOfRange { beta: 0, max: 4 })
        );
        assert_eq!(
            phi_beta_equal(&id, 5, &tol()),
            Err(Error::BetaOutOfRange { beta: 5, max: 4 })
        );
        let id4 = spectrum_from_prob(&WeylMapCoeffs::identity(4));
        assert_eq!(is_gpc(&id4, &tol()), Err(Error::NonPrimeDimension(4)));
    }

    #[test]
    fn phi_beta_preserves_channel_spectrum() {
        // Φ_β has the same eigenvalues as Φ, just on different eigenvectors
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p: Vec<f64> = (0..9).map(|_| rng.random_range(0.0..1.0)).collect();
        let total: f64 = p.iter().sum();
        let p: Vec<f64> = p.iter().map(|x| x / total).collect();
        let spec = spectrum_from_prob(&WeylMapCoeffs::from_real(3, &p).unwrap());
        let phi2 = crate::superop::Superop::from_map(&crate::superop::FnMap {
            d: 3,
            f: |x: &CMatrix| phi_beta_apply(&spec, 2, x).unwrap(),
        })
        .unwrap();
        let j = phi2.choi();
        let ev = hermitian_eigenvalues(
            &j,
            &Tolerance {
                eps_herm: 1e-10,
                ..tol()
            },
        )
        .unwrap();
        assert!(ev[0] > -1e-9);
    }

    #[test]
    fn wigner_kernel_examples() {
        for d in [3, 5, 7] {
            assert_eq!(
                wigner_kernel(d, 0, 0).unwrap(),
                equivalence_transform(d).unwrap()
            );
            let mut sum = CMatrix::zeros(d, d);
            for k in 0..d {
                for l in 0..d {
                    let a = wigner_kernel(d, k, l).unwrap();
                    assert!(a.is_hermitian(1e-12));
                    sum = &sum + &a;
                }
            }
            assert!(sum.approx_eq(&CMatrix::identity(d).scale_re(d as f64), 1e-11));
        }
        assert_eq!(wigner_kernel(2, 0, 0), Err(Error::EvenDimension(2)));
    }

    #[test]
    fn wigner_function_examples() {
        let w = wigner_function(&CMatrix::identity(3).scale_re(1.0 / 3.0), &tol()).unwrap();
        assert!(w.iter().all(|x| (x - 1.0 / 9.0).abs() < 1e-12));

        let mut rho = CMatrix::zeros(3, 3);
        rho[(0, 0)] = ONE;
        let w = wigner_function(&rho, &tol()).unwrap();
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        // |0⟩⟨0| sits on the k = 0 row: 𝒲_{0l} = 1/3, zero elsewhere
        for k in 0..3 {
            for l in 0..3 {
                let expect = if k == 0 { 1.0 / 3.0 } else { 0.0 };
                assert!((w[flat(3, k, l)] - expect).abs() < 1e-12);
            }
        }
        assert!(matches!(
            wigner_function(&CMatrix::identity(3), &tol()),
            Err(Error::NotAState(_))
        ));
        assert_eq!(
            wigner_function(&CMatrix::identity(2).scale_re(0.5), &tol()),
            Err(Error::EvenDimension(2))
        );
    }
}
