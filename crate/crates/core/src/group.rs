//! The Weyl operators and the finite group `G = {ω^m W_kl}` of order d³.
//!
//! Group logic runs on exact residues; matrices appear only through
//! [`GroupElement::realize`] and [`weyl_operator`].
//!
//! The class list `{ω^l W_00}`, `{ω^m W_kl | m}` is the exact conjugacy
//! partition for prime d. For composite d conjugation only shifts `m` by
//! multiples of `gcd(k, l, d)`, so each listed class is a union of true
//! conjugacy classes.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{omega_pow, CMatrix};

pub fn check_dim(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    Ok(())
}

pub fn is_prime(d: usize) -> bool {
    d >= 2
        && (2..)
            .take_while(|p| p * p <= d)
            .all(|p| !d.is_multiple_of(p))
}

pub fn require_prime(d: usize) -> Result<()> {
    check_dim(d)?;
    if !is_prime(d) {
        return Err(Error::NonPrimeDimension(d));
    }
    Ok(())
}

/// `W_kl = Σ_m ω^{km} |m+l⟩⟨m|`
pub fn weyl_operator(d: usize, k: usize, l: usize) -> Result<CMatrix> {
    check_dim(d)?;
    if k >= d || l >= d {
        return Err(Error::IndexOutOfRange { d, k, l });
    }
    let mut w = CMatrix::zeros(d, d);
    for m in 0..d {
        w[((m + l) % d, m)] = omega_pow(d, (k * m) as i64);
    }
    Ok(w)
}

/// Weyl operator with indices reduced mod d first.
pub fn weyl(d: usize, k: i64, l: i64) -> CMatrix {
    let di = d as i64;
    weyl_operator(d, k.rem_euclid(di) as usize, l.rem_euclid(di) as usize)
        .expect("indices are reduced")
}

/// The element `ω^m W_kl` of G.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupElement {
    pub d: usize,
    pub m: usize,
    pub k: usize,
    pub l: usize,
}

impl GroupElement {
    pub fn new(d: usize, m: usize, k: usize, l: usize) -> Result<Self> {
        check_dim(d)?;
        if m >= d || k >= d || l >= d {
            return Err(Error::IndexOutOfRange { d, k, l });
        }
        Ok(GroupElement { d, m, k, l })
    }

    /// Reduces each index mod d.
    pub fn wrapping(d: usize, m: i64, k: i64, l: i64) -> Self {
        let di = d as i64;
        GroupElement {
            d,
            m: m.rem_euclid(di) as usize,
            k: k.rem_euclid(di) as usize,
            l: l.rem_euclid(di) as usize,
        }
    }

    pub fn identity(d: usize) -> Self {
        GroupElement {
            d,
            m: 0,
            k: 0,
            l: 0,
        }
    }

    /// `(m,k,l)·(n,r,s) = (m+n+ks, k+r, l+s)`
    pub fn multiply(&self, other: &GroupElement) -> Result<GroupElement> {
        if self.d != other.d {
            return Err(Error::DimensionMismatch(self.d, other.d));
        }
        let d = self.d;
        Ok(GroupElement {
            d,
            m: (self.m + other.m + self.k * other.l) % d,
            k: (self.k + other.k) % d,
            l: (self.l + other.l) % d,
        })
    }

    /// `(m,k,l)⁻¹ = (kl − m, −k, −l)`
    pub fn inverse(&self) -> GroupElement {
        let (m, k, l) = (self.m as i64, self.k as i64, self.l as i64);
        GroupElement::wrapping(self.d, k * l - m, -k, -l)
    }

    /// `h g h⁻¹`
    pub fn conjugate_by(&self, h: &GroupElement) -> Result<GroupElement> {
        h.multiply(self)?.multiply(&h.inverse())
    }

    pub fn class_of(&self) -> ConjugacyClass {
        let kind = if self.k == 0 && self.l == 0 {
            ClassKind::Central(self.m)
        } else {
            ClassKind::Generic(self.k, self.l)
        };
        ConjugacyClass { d: self.d, kind }
    }

    /// `ω^m W_kl` as a d×d matrix.
    pub fn realize(&self) -> CMatrix {
        weyl(self.d, self.k as i64, self.l as i64).scale(omega_pow(self.d, self.m as i64))
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "w[{}]:{},{},{}", self.d, self.m, self.k, self.l)
    }
}

impl FromStr for GroupElement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("expected w[d]:m,k,l, got {s:?}"));
        let rest = s.trim().strip_prefix("w[").ok_or_else(bad)?;
        let (d, rest) = rest.split_once("]:").ok_or_else(bad)?;
        let d: usize = d.trim().parse().map_err(|_| bad())?;
        let parts: Vec<usize> = rest
            .split(',')
            .map(|p| p.trim().parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| bad())?;
        match parts.as_slice() {
            [m, k, l] => GroupElement::new(d, *m, *k, *l),
            _ => Err(bad()),
        }
    }
}

/// All d³ elements, ordered by (m, k, l).
pub fn elements(d: usize) -> Vec<GroupElement> {
    let mut out = Vec::with_capacity(d * d * d);
    for m in 0..d {
        for k in 0..d {
            for l in 0..d {
                out.push(GroupElement { d, m, k, l });
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ClassKind {
    /// The singleton `{ω^l W_00}`.
    Central(usize),
    /// `{ω^m W_kl | m ∈ Z_d}` with `(k,l) ≠ (0,0)`.
    Generic(usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ConjugacyClass {
    pub d: usize,
    pub kind: ClassKind,
}

impl ConjugacyClass {
    pub fn size(&self) -> usize {
        match self.kind {
            ClassKind::Central(_) => 1,
            ClassKind::Generic(..) => self.d,
        }
    }

    pub fn representative(&self) -> GroupElement {
        let d = self.d;
        match self.kind {
            ClassKind::Central(m) => GroupElement { d, m, k: 0, l: 0 },
            ClassKind::Generic(k, l) => GroupElement { d, m: 0, k, l },
        }
    }

    pub fn elements(&self) -> Vec<GroupElement> {
        let d = self.d;
        match self.kind {
            ClassKind::Central(m) => vec![GroupElement { d, m, k: 0, l: 0 }],
            ClassKind::Generic(k, l) => (0..d).map(|m| GroupElement { d, m, k, l }).collect(),
        }
    }

    /// Column of this class in the canonical order of [`enumerate_classes`].
    pub fn index(&self) -> usize {
        let d = self.d;
        match self.kind {
            ClassKind::Central(0) => d - 1,
            ClassKind::Central(m) => m - 1,
            ClassKind::Generic(k, l) => d - 1 + k * d + l,
        }
    }

    /// Column header, e.g. `C0^1` or `C_1_2`.
    pub fn name(&self) -> String {
        match self.kind {
            ClassKind::Central(m) => format!("C0^{m}"),
            ClassKind::Generic(k, l) => format!("C_{k}_{l}"),
        }
    }
}

pub fn class_count(d: usize) -> usize {
    d * d + d - 1
}

/// `C_0^1, …, C_0^{d−1}, C_0^0, C_01, …, C_{d−1,d−1}`.
pub fn enumerate_classes(d: usize) -> Vec<ConjugacyClass> {
    let mut out = Vec::with_capacity(class_count(d));
    for m in 1..d {
        out.push(ConjugacyClass {
            d,
            kind: ClassKind::Central(m),
        });
    }
    out.push(ConjugacyClass {
        d,
        kind: ClassKind::Central(0),
    });
    for k in 0..d {
        for l in 0..d {
            if (k, l) != (0, 0) {
                out.push(ConjugacyClass {
                    d,
                    kind: ClassKind::Generic(k, l),
                });
            }
        }
    }
    out
}

/// `(k, l) ↦ k·d + l` flat index used for d×d coefficient arrays.
pub fn flat(d: usize, k: usize, l: usize) -> usize {
    k * d + l
}

/// Matrix units `|i⟩⟨j|`, a basis of M_d.
pub fn matrix_units(d: usize) -> Vec<CMatrix> {
    let mut out = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            let mut e = CMatrix::zeros(d, d);
            e[(i, j)] = crate::linalg::ONE;
            out.push(e);
        }
    }
    out
}

/// The d² Weyl operators in flat order.
pub fn weyl_basis(d: usize) -> Vec<CMatrix> {
    let mut out = Vec::with_capacity(d * d);
    for k in 0..d {
        for l in 0..d {
            out.push(weyl(d, k as i64, l as i64));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hs_inner, ONE};
    use num_complex::Complex64;
    use std::collections::{BTreeSet, HashSet};

    #[test]
    fn weyl_examples() {
        assert_eq!(weyl_operator(2, 0, 0).unwrap(), CMatrix::identity(2));
        let z = weyl_operator(2, 1, 0).unwrap();
        assert!(z.approx_eq(&CMatrix::diag(&[ONE, -ONE]), 1e-15));
        let x = weyl_operator(2, 0, 1).unwrap();
        let swap = CMatrix::from_fn(2, 2, |i, j| {
            if i != j {
                ONE
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        assert!(x.approx_eq(&swap, 1e-15));

        let w = weyl_operator(3, 1, 1).unwrap();
        let om = crate::linalg::root_of_unity(3);
        let mut expect = CMatrix::zeros(3, 3);
        expect[(1, 0)] = ONE;
        expect[(2, 1)] = om;
        expect[(0, 2)] = om * om;
        assert!(w.approx_eq(&expect, 1e-14));

        assert!(matches!(
            weyl_operator(3, 3, 0),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn weyl_unitary_and_orthogonal() {
        for d in [2, 3, 4, 5] {
            let basis = weyl_basis(d);
            for (a, wa) in basis.iter().enumerate() {
                assert!((&wa.adjoint() * wa).approx_eq(&CMatrix::identity(d), 1e-12));
                for (b, wb) in basis.iter().enumerate() {
                    let ip = hs_inner(wa, wb).unwrap();
                    let expect = if a == b { d as f64 } else { 0.0 };
                    assert!((ip - Complex64::new(expect, 0.0)).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn multiply_examples() {
        let e = GroupElement::identity(3);
        let g = GroupElement::new(3, 2, 1, 2).unwrap();
        assert_eq!(e.multiply(&g).unwrap(), g);

        let a = GroupElement::new(2, 0, 1, 0).unwrap();
        let b = GroupElement::new(2, 0, 0, 1).unwrap();
        assert_eq!(
            a.multiply(&b).unwrap(),
            GroupElement::new(2, 1, 1, 1).unwrap()
        );
        let prod = &a.realize() * &b.realize();
        assert!(prod.approx_eq(&weyl_operator(2, 1, 1).unwrap().scale_re(-1.0), 1e-14));

        let a = GroupElement::new(3, 0, 1, 1).unwrap();
        let b = GroupElement::new(3, 0, 2, 2).unwrap();
        assert_eq!(
            a.multiply(&b).unwrap(),
            GroupElement::new(3, 2, 0, 0).unwrap()
        );

        let c = GroupElement::identity(2);
        assert_eq!(a.multiply(&c), Err(Error::DimensionMismatch(3, 2)));
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(
            GroupElement::identity(5).inverse(),
            GroupElement::identity(5)
        );
        assert_eq!(
            GroupElement::new(2, 0, 1, 1).unwrap().inverse(),
            GroupElement::new(2, 1, 1, 1).unwrap()
        );
        for g in elements(3) {
            assert_eq!(g.multiply(&g.inverse()).unwrap(), GroupElement::identity(3));
        }
    }

    #[test]
    fn product_law_matches_matrices() {
        let els = elements(3);
        for g in &els {
            for h in &els {
                let sym = g.multiply(h).unwrap().realize();
                let num = &g.realize() * &h.realize();
                assert!(sym.approx_eq(&num, 1e-12), "{g} * {h}");
            }
        }
    }

    #[test]
    fn group_closure_and_order() {
        for d in [2, 3, 5] {
            let els = elements(d);
            let set: HashSet<_> = els.iter().copied().collect();
            assert_eq!(set.len(), d * d * d);
            for g in &els {
                assert!(set.contains(&g.inverse()));
                for h in els.iter().step_by(7) {
                    assert!(set.contains(&g.multiply(h).unwrap()));
                }
            }
        }
    }

    #[test]
    fn class_examples() {
        let g = GroupElement::new(7, 5, 0, 0).unwrap();
        assert_eq!(g.class_of().kind, ClassKind::Central(5));
        for m in 0..2 {
            let g = GroupElement::new(2, m, 1, 1).unwrap();
            assert_eq!(g.class_of().kind, ClassKind::Generic(1, 1));
        }
    }

    #[test]
    fn conjugation_orbits_match_classes() {
        for d in [2, 3, 5] {
            let els = elements(d);
            let mut orbits: BTreeSet<BTreeSet<GroupElement>> = BTreeSet::new();
            for g in &els {
                let orbit: BTreeSet<_> = els.iter().map(|h| g.conjugate_by(h).unwrap()).collect();
                let class: BTreeSet<_> = g.class_of().elements().into_iter().collect();
                assert_eq!(orbit, class);
                orbits.insert(orbit);
            }
            assert_eq!(orbits.len(), class_count(d));
            let singletons = orbits.iter().filter(|o| o.len() == 1).count();
            assert_eq!(singletons, d);
            assert!(orbits.iter().filter(|o| o.len() != 1).all(|o| o.len() == d));
        }
    }

    #[test]
    fn composite_classes_are_unions_of_orbits() {
        let els = elements(4);
        let mut finer = false;
        for g in &els {
            let orbit: BTreeSet<_> = els.iter().map(|h| g.conjugate_by(h).unwrap()).collect();
            let class: BTreeSet<_> = g.class_of().elements().into_iter().collect();
            assert!(orbit.is_subset(&class));
            finer |= orbit.len() < class.len();
        }
        assert!(finer);
    }

    #[test]
    fn canonical_order() {
        assert_eq!(enumerate_classes(2).len(), 5);
        assert_eq!(enumerate_classes(3).len(), 11);
        assert_eq!(enumerate_classes(5).len(), 29);
        let cls = enumerate_classes(3);
        assert_eq!(cls[0].kind, ClassKind::Central(1));
        assert_eq!(cls[1].kind, ClassKind::Central(2));
        assert_eq!(cls[2].kind, ClassKind::Central(0));
        assert_eq!(cls[3].kind, ClassKind::Generic(0, 1));
        assert_eq!(cls[10].kind, ClassKind::Generic(2, 2));
        for (i, c) in cls.iter().enumerate() {
            assert_eq!(c.index(), i);
        }
    }

    #[test]
    fn text_form_round_trip() {
        let g = GroupElement::new(5, 4, 2, 3).unwrap();
        let s = g.to_string();
        assert_eq!(s, "w[5]:4,2,3");
        assert_eq!(s.parse::<GroupElement>().unwrap(), g);
        assert!("w[5]:5,0,0".parse::<GroupElement>().is_err());
        assert!("w5:1,2,3".parse::<GroupElement>().is_err());
        assert!("w[3]:1,2".parse::<GroupElement>().is_err());
    }

    #[test]
    fn primality() {
        let primes: Vec<usize> = (0..20).filter(|&n| is_prime(n)).collect();
        assert_eq!(primes, vec![2, 3, 5, 7, 11, 13, 17, 19]);
    }
}
