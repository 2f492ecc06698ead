//! Symbolic elements `F = Σₙ Uⁿ fₙ` of the (semi)crossed product.
//!
//! Elements are kept in left normal form. Products use the covariance rule
//! `f Uⁿ = Uⁿ (f ∘ φ̃ⁿ)`, so `(Uᵐ f)(Uⁿ g) = U^{m+n} ((f ∘ φ̃ⁿ) g)`.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::dynsys::DynamicalSystem;
use crate::error::{Error, Result};
use crate::funcalg::{BaseFunction, ExtFunction};

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Element {
    coeffs: BTreeMap<i64, ExtFunction>,
}

impl Element {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Complex64::new(1.0, 0.0))
    }

    pub fn constant(c: Complex64) -> Self {
        Self::term(0, ExtFunction::constant(c))
    }

    /// `Uⁿ`.
    pub fn u_pow(n: i64) -> Self {
        Self::term(n, ExtFunction::constant(Complex64::new(1.0, 0.0)))
    }

    /// `Uⁿ f`.
    pub fn term(n: i64, f: ExtFunction) -> Self {
        let mut coeffs = BTreeMap::new();
        if !f.is_zero() {
            coeffs.insert(n, f);
        }
        Self { coeffs }
    }

    /// `Uⁿ ι(g)`.
    pub fn base_term(n: i64, g: BaseFunction) -> Self {
        Self::term(n, ExtFunction::iota(g))
    }

    pub fn from_coeffs(coeffs: BTreeMap<i64, ExtFunction>) -> Self {
        Self { coeffs: coeffs.into_iter().filter(|(_, f)| !f.is_zero()).collect() }
    }

    pub fn coeffs(&self) -> &BTreeMap<i64, ExtFunction> {
        &self.coeffs
    }

    pub fn coeff(&self, n: i64) -> Option<&ExtFunction> {
        self.coeffs.get(&n)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn min_power(&self) -> i64 {
        self.coeffs.keys().next().copied().unwrap_or(0)
    }

    pub fn max_power(&self) -> i64 {
        self.coeffs.keys().next_back().copied().unwrap_or(0)
    }

    /// Largest `|n|` with a nonzero coefficient.
    pub fn band_width(&self) -> usize {
        self.coeffs.keys().map(|n| n.unsigned_abs() as usize).max().unwrap_or(0)
    }

    pub fn max_depth(&self) -> usize {
        self.coeffs.values().map(|f| f.depth()).max().unwrap_or(1)
    }

    /// Nonnegative powers only, and every coefficient in `ι(C(X))`.
    pub fn is_semicrossed(&self) -> bool {
        self.coeffs.iter().all(|(n, f)| *n >= 0 && f.depth() == 1)
    }

    pub fn require_semicrossed(&self) -> Result<()> {
        if let Some((n, _)) = self.coeffs.iter().find(|(n, _)| **n < 0) {
            return Err(Error::NotSemicrossed(format!("negative power U^{n}")));
        }
        if let Some((n, f)) = self.coeffs.iter().find(|(_, f)| f.depth() > 1) {
            return Err(Error::NotSemicrossed(format!("coefficient of U^{n} has depth {}", f.depth())));
        }
        Ok(())
    }

    fn accumulate(
        coeffs: &mut BTreeMap<i64, ExtFunction>,
        sys: &DynamicalSystem,
        n: i64,
        f: ExtFunction,
    ) -> Result<()> {
        match coeffs.remove(&n) {
            Some(existing) => {
                let sum = existing.add(sys, &f)?;
                if !sum.is_zero() {
                    coeffs.insert(n, sum);
                }
            }
            None => {
                if !f.is_zero() {
                    coeffs.insert(n, f);
                }
            }
        }
        Ok(())
    }

    pub fn add(&self, sys: &DynamicalSystem, other: &Self) -> Result<Self> {
        let mut coeffs = self.coeffs.clone();
        for (n, f) in &other.coeffs {
            Self::accumulate(&mut coeffs, sys, *n, f.clone())?;
        }
        Ok(Self { coeffs })
    }

    pub fn neg(&self) -> Self {
        Self { coeffs: self.coeffs.iter().map(|(n, f)| (*n, f.neg())).collect() }
    }

    pub fn sub(&self, sys: &DynamicalSystem, other: &Self) -> Result<Self> {
        self.add(sys, &other.neg())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|(n, f)| (*n, f.scale(s))).collect())
    }

    pub fn multiply(&self, sys: &DynamicalSystem, other: &Self) -> Result<Self> {
        let mut coeffs = BTreeMap::new();
        for (m, f) in &self.coeffs {
            for (n, g) in &other.coeffs {
                let moved = f.alpha_tilde_pow(sys, *n)?;
                Self::accumulate(&mut coeffs, sys, m + n, moved.multiply(sys, g)?)?;
            }
        }
        Ok(Self { coeffs })
    }

    pub fn pow(&self, sys: &DynamicalSystem, n: u32) -> Result<Self> {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = acc.multiply(sys, self)?;
        }
        Ok(acc)
    }

    /// `(Uⁿ f)* = U⁻ⁿ (conj(f) ∘ φ̃⁻ⁿ)`.
    pub fn adjoint(&self, sys: &DynamicalSystem) -> Result<Self> {
        let mut coeffs = BTreeMap::new();
        for (n, f) in &self.coeffs {
            Self::accumulate(&mut coeffs, sys, -n, f.conj().alpha_tilde_pow(sys, -n)?)?;
        }
        Ok(Self { coeffs })
    }

    /// `α(F) = U* F U`: every coefficient `fₙ ↦ fₙ ∘ φ̃`.
    pub fn alpha(&self, sys: &DynamicalSystem) -> Result<Self> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(n, f)| Ok((*n, f.alpha_tilde(sys)?)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        Ok(Self::from_coeffs(coeffs))
    }

    /// `G Uᵐ = Σ U^{n+m} (gₙ ∘ φ̃ᵐ)`, which is semicrossed once
    /// `m ≥ depth − 1` for every coefficient.
    pub fn pushdown(&self, sys: &DynamicalSystem, m: usize) -> Result<Self> {
        if let Some(n) = self.coeffs.keys().find(|n| **n < 0) {
            return Err(Error::NotSemicrossed(format!("pushdown needs nonnegative powers, found U^{n}")));
        }
        if let Some(f) = self.coeffs.values().find(|f| f.depth() > m + 1) {
            return Err(Error::DepthTooLarge { depth: f.depth(), m });
        }
        let coeffs = self
            .coeffs
            .iter()
            .map(|(n, g)| Ok((n + m as i64, g.alpha_tilde_pow(sys, m as i64)?)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        Ok(Self::from_coeffs(coeffs))
    }

    /// `Σₙ ‖fₙ‖∞` using certified sup-norm upper bounds.
    pub fn ell1_upper(&self) -> f64 {
        self.coeffs.values().map(|f| f.sup_norm().upper).sum()
    }

    pub fn to_relation2(&self) -> Result<Relation2Element> {
        self.require_semicrossed()?;
        Ok(Relation2Element { coeffs: self.coeffs.clone() })
    }

    /// Checks that every coefficient can be evaluated on `sys`.
    pub fn check_system(&self, sys: &DynamicalSystem) -> Result<()> {
        for f in self.coeffs.values() {
            f.base().check_system(sys)?;
        }
        Ok(())
    }
}

/// Right normal form `Σₙ gₙ Uⁿ` used with the relation `U f = (f ∘ φ) U`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Relation2Element {
    coeffs: BTreeMap<i64, ExtFunction>,
}

impl Relation2Element {
    pub fn coeffs(&self) -> &BTreeMap<i64, ExtFunction> {
        &self.coeffs
    }

    pub fn band_width(&self) -> usize {
        self.coeffs.keys().map(|n| n.unsigned_abs() as usize).max().unwrap_or(0)
    }

    pub fn to_relation1(&self) -> Element {
        Element { coeffs: self.coeffs.clone() }
    }
}

fn fmt_terms(f: &mut fmt::Formatter<'_>, coeffs: &BTreeMap<i64, ExtFunction>, right: bool) -> fmt::Result {
    if coeffs.is_empty() {
        return write!(f, "0");
    }
    for (i, (n, g)) in coeffs.iter().enumerate() {
        if i > 0 {
            write!(f, " + ")?;
        }
        let func = format!("f[{n}]@{}", g.depth());
        match (n, right) {
            (0, _) => write!(f, "{func}")?,
            (_, false) => write!(f, "U^{n} {func}")?,
            (_, true) => write!(f, "{func} U^{n}")?,
        }
    }
    Ok(())
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_terms(f, &self.coeffs, false)
    }
}

impl fmt::Display for Relation2Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_terms(f, &self.coeffs, true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcalg::TrigPoly;

    fn doubling() -> DynamicalSystem {
        DynamicalSystem::circle(2).unwrap()
    }

    fn cos(k: i64) -> BaseFunction {
        BaseFunction::Trig(TrigPoly::cos(k))
    }

    #[test]
    fn multiply_examples() {
        let sys = doubling();
        let uf = Element::base_term(1, cos(1));
        let sq = uf.multiply(&sys, &uf).unwrap();
        let expected = Element::base_term(2, BaseFunction::Trig(TrigPoly::cos(2).mul(&TrigPoly::cos(1))));
        assert_eq!(sq, expected);
        assert_eq!(uf.multiply(&sys, &Element::one()).unwrap(), uf);
        assert_eq!(Element::one().multiply(&sys, &uf).unwrap(), uf);
        let cancel = Element::u_pow(-1).multiply(&sys, &Element::u_pow(1)).unwrap();
        assert_eq!(cancel, Element::one());
    }

    #[test]
    fn adjoint_examples() {
        let sys = doubling();
        let f = BaseFunction::Trig(TrigPoly::exp(1));
        assert_eq!(Element::base_term(0, f.clone()).adjoint(&sys).unwrap(), Element::base_term(0, f.conj()));
        assert_eq!(Element::u_pow(1).adjoint(&sys).unwrap(), Element::u_pow(-1));
        let adj = Element::base_term(1, f.clone()).adjoint(&sys).unwrap();
        assert_eq!(adj.coeff(-1), Some(&ExtFunction::new(2, f.conj()).unwrap()));
    }

    #[test]
    fn alpha_examples() {
        let sys = doubling();
        assert_eq!(Element::u_pow(1).alpha(&sys).unwrap(), Element::u_pow(1));
        let a = Element::base_term(1, cos(1)).alpha(&sys).unwrap();
        assert_eq!(a, Element::base_term(1, cos(2)));
        assert!(a.is_semicrossed());
    }

    #[test]
    fn pushdown_examples() {
        let sys = doubling();
        let g = Element::term(1, ExtFunction::new(3, cos(1)).unwrap());
        assert_eq!(g.pushdown(&sys, 2).unwrap(), Element::base_term(3, cos(1)));
        assert_eq!(g.pushdown(&sys, 1), Err(Error::DepthTooLarge { depth: 3, m: 1 }));
        let s = Element::base_term(1, cos(1)).add(&sys, &Element::one()).unwrap();
        assert_eq!(s.pushdown(&sys, 0).unwrap(), s);
    }

    #[test]
    fn ell1_examples() {
        let sys = doubling();
        assert_eq!(Element::u_pow(1).ell1_upper(), 1.0);
        let f = Element::constant(Complex64::new(2.0, 0.0)).add(&sys, &Element::base_term(1, cos(1))).unwrap();
        let l = f.ell1_upper();
        assert!((3.0..=3.001).contains(&l));
        let g = Element::base_term(0, cos(3));
        assert_eq!(g.sub(&sys, &g).unwrap().ell1_upper(), 0.0);
    }

    #[test]
    fn relation2_round_trip() {
        let sys = doubling();
        let f = Element::base_term(1, cos(1)).add(&sys, &Element::one()).unwrap();
        assert_eq!(f.to_relation2().unwrap().to_relation1(), f);
        assert!(Element::u_pow(-1).to_relation2().is_err());
    }
}
