//! Abstract CAR generators and noncommutative mode polynomials.
//!
//! Operators are represented symbolically as complex-linear combinations of
//! ordered products of mode generators; the Fock representation ([`crate::fock`])
//! turns them into linear maps on truncated spaces. Three families of
//! generators appear:
//!
//! * `Psi(m)`, m ∈ ℤ + 1/2 — modes of a single real NS fermion,
//!   {ψ_a, ψ_b} = δ_{a+b,0}, ψ_a* = ψ_{−a};
//! * `MultiPhi { n, k, nu }`, k ∈ {1..n}, ν ∈ ℤ + 1/2 — modes of the
//!   n-component complex family, {φ⁽ᵏ⁾_ν, φ⁽ˡ⁾_μ} = δ_{k+l,n+1} δ_{ν+μ,0},
//!   (φ⁽ᵏ⁾_ν)* = φ⁽ⁿ⁺¹⁻ᵏ⁾_{−ν}  (for n = 2: φ = φ⁽¹⁾, φ* = φ⁽²⁾);
//! * `PsiR(m)`, m ∈ ℤ — Ramond modes of the real fermion,
//!   {ψ_a, ψ_b} = δ_{a+b,0} (so the zero mode squares to 1/2), ψ_a* = ψ_{−a}.
//!
//! Products are written left-to-right but act right-to-left, as operators do.

use std::collections::BTreeMap;
use std::fmt;

use crate::{C64, Error, HalfInt, ONE, ZERO};

/// A single CAR generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Gen {
    /// ψ_m, m half-odd.
    Psi(HalfInt),
    /// φ⁽ᵏ⁾_ν of the n-component complex family, ν half-odd, 1 ≤ k ≤ n.
    MultiPhi { n: u32, k: u32, nu: HalfInt },
    /// Ramond ψ_m, m integer.
    PsiR(HalfInt),
}

impl Gen {
    /// φ_ν of the two-component family.
    pub fn phi(nu: HalfInt) -> Gen {
        Gen::MultiPhi { n: 2, k: 1, nu }
    }

    /// φ*_ν of the two-component family.
    pub fn phi_star(nu: HalfInt) -> Gen {
        Gen::MultiPhi { n: 2, k: 2, nu }
    }

    /// Checks the integrality and range constraints for the variant.
    pub fn validate(&self) -> Result<(), Error> {
        match *self {
            Gen::Psi(m) => {
                if m.is_half_odd() {
                    Ok(())
                } else {
                    Err(Error::BadModeIndex {
                        index: m,
                        reason: "NS index must be half-odd".into(),
                    })
                }
            }
            Gen::MultiPhi { n, k, nu } => {
                if !nu.is_half_odd() {
                    return Err(Error::BadModeIndex {
                        index: nu,
                        reason: "NS index must be half-odd".into(),
                    });
                }
                if k == 0 || k > n {
                    return Err(Error::BadModeIndex {
                        index: nu,
                        reason: format!("component k = {k} outside 1..={n}"),
                    });
                }
                Ok(())
            }
            Gen::PsiR(m) => {
                if m.is_integer() {
                    Ok(())
                } else {
                    Err(Error::BadModeIndex {
                        index: m,
                        reason: "Ramond index must be an integer".into(),
                    })
                }
            }
        }
    }

    /// The mode index.
    pub fn index(&self) -> HalfInt {
        match *self {
            Gen::Psi(m) => m,
            Gen::MultiPhi { nu, .. } => nu,
            Gen::PsiR(m) => m,
        }
    }

    /// Adjoint generator: x ↦ x*.
    pub fn adjoint(&self) -> Gen {
        match *self {
            Gen::Psi(m) => Gen::Psi(-m),
            Gen::MultiPhi { n, k, nu } => Gen::MultiPhi {
                n,
                k: n + 1 - k,
                nu: -nu,
            },
            Gen::PsiR(m) => Gen::PsiR(-m),
        }
    }

    /// The scalar {a, b}, or `None` if the generators belong to different
    /// algebras (real NS vs complex family vs Ramond).
    pub fn car_pair(&self, other: &Gen) -> Option<f64> {
        match (*self, *other) {
            (Gen::Psi(a), Gen::Psi(b)) => Some(if a + b == HalfInt::ZERO { 1.0 } else { 0.0 }),
            (
                Gen::MultiPhi { n, k, nu },
                Gen::MultiPhi {
                    n: n2,
                    k: l,
                    nu: mu,
                },
            ) if n == n2 => Some(if k + l == n + 1 && nu + mu == HalfInt::ZERO {
                1.0
            } else {
                0.0
            }),
            (Gen::PsiR(a), Gen::PsiR(b)) => Some(if a + b == HalfInt::ZERO { 1.0 } else { 0.0 }),
            _ => None,
        }
    }

    /// Vacuum pairing ⟨Ω a b Ω⟩ in the sector's standard Fock vacuum.
    pub fn vacuum_pair(&self, other: &Gen) -> Option<f64> {
        let pair = self.car_pair(other)?;
        if pair == 0.0 {
            return Some(0.0);
        }
        let m = self.index();
        Some(if m.is_positive() {
            1.0
        } else if m == HalfInt::ZERO {
            0.5
        } else {
            0.0
        })
    }
}

impl fmt::Display for Gen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Gen::Psi(m) => write!(f, "psi_{m}"),
            Gen::MultiPhi { n, k, nu } => {
                if n == 2 && k == 1 {
                    write!(f, "phi_{nu}")
                } else if n == 2 && k == 2 {
                    write!(f, "phi*_{nu}")
                } else {
                    write!(f, "phi[{k}/{n}]_{nu}")
                }
            }
            Gen::PsiR(m) => write!(f, "psiR_{m}"),
        }
    }
}

/// A complex-linear combination of ordered generator products.
///
/// The empty product is the identity. Terms are kept in a canonical sorted
/// order with like monomials merged (see [`ModePolynomial::simplify`]), but no
/// CAR reordering is ever applied — two polynomials that are equal only
/// modulo the relations compare unequal here and must be compared through a
/// representation.
#[derive(Debug, Clone, PartialEq)]
pub struct ModePolynomial {
    terms: Vec<(C64, Vec<Gen>)>,
}

impl ModePolynomial {
    pub fn zero() -> Self {
        ModePolynomial { terms: vec![] }
    }

    /// The scalar c · 1.
    pub fn scalar(c: C64) -> Self {
        ModePolynomial {
            terms: vec![(c, vec![])],
        }
        .simplified()
    }

    pub fn one() -> Self {
        Self::scalar(ONE)
    }

    /// A single generator.
    pub fn gen(g: Gen) -> Self {
        ModePolynomial {
            terms: vec![(ONE, vec![g])],
        }
    }

    /// c · g₁ g₂ ⋯ g_r (acting right-to-left).
    pub fn monomial(c: C64, gens: Vec<Gen>) -> Self {
        ModePolynomial {
            terms: vec![(c, gens)],
        }
        .simplified()
    }

    /// Builds Σ c_i · m_i from parts.
    pub fn from_terms(terms: Vec<(C64, Vec<Gen>)>) -> Self {
        ModePolynomial { terms }.simplified()
    }

    pub fn terms(&self) -> &[(C64, Vec<Gen>)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of monomials.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Merge like monomials, drop coefficients below 1e-15 of the largest.
    pub fn simplified(mut self) -> Self {
        let mut map: BTreeMap<Vec<Gen>, C64> = BTreeMap::new();
        for (c, m) in self.terms.drain(..) {
            *map.entry(m).or_insert(ZERO) += c;
        }
        let scale = map
            .values()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
            .max(1e-300);
        let terms = map
            .into_iter()
            .filter(|(_, c)| c.norm() > 1e-15 * scale)
            .map(|(m, c)| (c, m))
            .collect();
        ModePolynomial { terms }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        ModePolynomial { terms }.simplified()
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-ONE))
    }

    pub fn scale(&self, c: C64) -> Self {
        ModePolynomial {
            terms: self
                .terms
                .iter()
                .map(|(a, m)| (a * c, m.clone()))
                .collect(),
        }
        .simplified()
    }

    /// Operator product (self then other is written self · other, so `other`
    /// acts first).
    pub fn mul(&self, other: &Self) -> Self {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (a, m1) in &self.terms {
            for (b, m2) in &other.terms {
                let mut m = m1.clone();
                m.extend(m2.iter().copied());
                terms.push((a * b, m));
            }
        }
        ModePolynomial { terms }.simplified()
    }

    /// [self, other] = self·other − other·self.
    pub fn commutator(&self, other: &Self) -> Self {
        self.mul(other).sub(&other.mul(self))
    }

    /// {self, other} = self·other + other·self.
    pub fn anticommutator(&self, other: &Self) -> Self {
        self.mul(other).add(&other.mul(self))
    }

    /// Adjoint: reverse each product, adjoint each generator, conjugate
    /// each coefficient.
    pub fn adjoint(&self) -> Self {
        ModePolynomial {
            terms: self
                .terms
                .iter()
                .map(|(c, m)| {
                    let rev: Vec<Gen> = m.iter().rev().map(|g| g.adjoint()).collect();
                    (c.conj(), rev)
                })
                .collect(),
        }
        .simplified()
    }

    /// Apply a generator substitution. Monomials containing a generator that
    /// maps to `None` are dropped wholesale (cutoff truncation).
    pub fn substitute(&self, f: impl Fn(&Gen) -> Option<Gen>) -> Self {
        let mut terms = Vec::new();
        'outer: for (c, m) in &self.terms {
            let mut mm = Vec::with_capacity(m.len());
            for g in m {
                match f(g) {
                    Some(h) => mm.push(h),
                    None => continue 'outer,
                }
            }
            terms.push((*c, mm));
        }
        ModePolynomial { terms }.simplified()
    }

    /// Normal-ordered quadratic :a b: = a b − ⟨a b⟩, as a polynomial.
    pub fn normal_pair(a: Gen, b: Gen) -> Self {
        let vev = a
            .vacuum_pair(&b)
            .expect("normal_pair needs generators of one algebra");
        ModePolynomial {
            terms: vec![(ONE, vec![a, b]), (C64::new(-vev, 0.0), vec![])],
        }
        .simplified()
    }

    /// Largest coefficient magnitude.
    pub fn max_coeff(&self) -> f64 {
        self.terms.iter().map(|(c, _)| c.norm()).fold(0.0, f64::max)
    }
}

impl fmt::Display for ModePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (c, m)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})")?;
            for g in m {
                write!(f, " {g}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(t: i64) -> HalfInt {
        HalfInt::from_twice(t)
    }

    #[test]
    fn car_pairing_values() {
        // {ψ_{1/2}, ψ_{−1/2}} = 1, {ψ_{1/2}, ψ_{3/2}} = 0.
        assert_eq!(Gen::Psi(h(1)).car_pair(&Gen::Psi(h(-1))), Some(1.0));
        assert_eq!(Gen::Psi(h(1)).car_pair(&Gen::Psi(h(3))), Some(0.0));
        // {φ_ν, φ*_{−ν}} = 1, {φ_ν, φ_{−ν}} = 0.
        assert_eq!(Gen::phi(h(1)).car_pair(&Gen::phi_star(h(-1))), Some(1.0));
        assert_eq!(Gen::phi(h(1)).car_pair(&Gen::phi(h(-1))), Some(0.0));
        // Ramond zero mode: {ψ₀, ψ₀} = 1 (so ψ₀² = 1/2).
        assert_eq!(Gen::PsiR(h(0)).car_pair(&Gen::PsiR(h(0))), Some(1.0));
        // Cross-algebra pairs are undefined.
        assert_eq!(Gen::Psi(h(1)).car_pair(&Gen::PsiR(h(0))), None);
    }

    #[test]
    fn vacuum_pairs() {
        assert_eq!(Gen::Psi(h(1)).vacuum_pair(&Gen::Psi(h(-1))), Some(1.0));
        assert_eq!(Gen::Psi(h(-1)).vacuum_pair(&Gen::Psi(h(1))), Some(0.0));
        assert_eq!(Gen::PsiR(h(0)).vacuum_pair(&Gen::PsiR(h(0))), Some(0.5));
        assert_eq!(Gen::phi(h(1)).vacuum_pair(&Gen::phi_star(h(-1))), Some(1.0));
        assert_eq!(Gen::phi_star(h(1)).vacuum_pair(&Gen::phi(h(-1))), Some(1.0));
        assert_eq!(Gen::phi(h(-1)).vacuum_pair(&Gen::phi_star(h(1))), Some(0.0));
    }

    #[test]
    fn adjoint_is_an_involution_and_antihomomorphism() {
        let a = ModePolynomial::monomial(
            C64::new(0.0, 2.0),
            vec![Gen::phi(h(1)), Gen::phi_star(h(-3))],
        );
        let b = ModePolynomial::monomial(C64::new(1.0, -1.0), vec![Gen::phi(h(3))]);
        assert_eq!(a.adjoint().adjoint(), a);
        assert_eq!(a.mul(&b).adjoint(), b.adjoint().mul(&a.adjoint()));
        // φ_{1/2}* = φ*_{−1/2} for the two-component family.
        assert_eq!(Gen::phi(h(1)).adjoint(), Gen::phi_star(h(-1)));
        // For the three-component family: (φ⁽¹⁾_ν)* = φ⁽³⁾_{−ν}.
        let g = Gen::MultiPhi { n: 3, k: 1, nu: h(5) };
        assert_eq!(g.adjoint(), Gen::MultiPhi { n: 3, k: 3, nu: h(-5) });
    }

    #[test]
    fn simplify_merges_and_cancels() {
        let g = Gen::Psi(h(1));
        let p = ModePolynomial::from_terms(vec![
            (ONE, vec![g]),
            (C64::new(2.0, 0.0), vec![g]),
            (-ONE, vec![]),
            (ONE, vec![]),
        ]);
        assert_eq!(p.len(), 1);
        assert_eq!(p.terms()[0].0, C64::new(3.0, 0.0));
        let q = p.sub(&p);
        assert!(q.is_zero());
    }

    #[test]
    fn substitution_maps_and_drops() {
        let p = ModePolynomial::from_terms(vec![
            (ONE, vec![Gen::phi(h(1)), Gen::phi_star(h(3))]),
            (ONE, vec![Gen::phi(h(11))]),
        ]);
        // Interleaving map for n = 2 with a cutoff that kills index 23/2.
        let q = p.substitute(|g| {
            let img = match *g {
                Gen::MultiPhi { n: 2, k: 1, nu } => HalfInt::from_twice(2 * nu.twice() + 1),
                Gen::MultiPhi { n: 2, k: 2, nu } => HalfInt::from_twice(2 * nu.twice() - 1),
                _ => return None,
            };
            if img.abs() <= h(11) {
                Some(Gen::Psi(img))
            } else {
                None
            }
        });
        assert_eq!(q.len(), 1);
        assert_eq!(q.terms()[0].1, vec![Gen::Psi(h(3)), Gen::Psi(h(5))]);
    }

    #[test]
    fn normal_pair_subtracts_the_contraction() {
        // :ψ_{1/2} ψ_{−1/2}: = ψ_{1/2}ψ_{−1/2} − 1.
        let p = ModePolynomial::normal_pair(Gen::Psi(h(1)), Gen::Psi(h(-1)));
        assert_eq!(p.len(), 2);
        // :ψ_{−1/2} ψ_{1/2}: = ψ_{−1/2}ψ_{1/2} (already normal ordered).
        let q = ModePolynomial::normal_pair(Gen::Psi(h(-1)), Gen::Psi(h(1)));
        assert_eq!(q.len(), 1);
        // Ramond zero-mode pair picks up the 1/2.
        let r = ModePolynomial::normal_pair(Gen::PsiR(h(0)), Gen::PsiR(h(0)));
        assert_eq!(r.len(), 2);
        let c = r
            .terms()
            .iter()
            .find(|(_, m)| m.is_empty())
            .map(|(c, _)| *c)
            .unwrap();
        assert_eq!(c, C64::new(-0.5, 0.0));
    }

    #[test]
    fn validation_catches_wrong_lattices() {
        assert!(Gen::Psi(h(2)).validate().is_err());
        assert!(Gen::Psi(h(1)).validate().is_ok());
        assert!(Gen::PsiR(h(1)).validate().is_err());
        assert!(Gen::PsiR(h(2)).validate().is_ok());
        assert!(Gen::MultiPhi { n: 2, k: 3, nu: h(1) }.validate().is_err());
    }
}
