//! The vacuum-preserving CAR isomorphism β and its inverse, in all pictures.
//!
//! **Modes.** β interleaves the n-component complex family into the single
//! real fermion's mode lattice:
//!
//! ```text
//! β(φ⁽ᵏ⁾_ν) = ψ_m,   m = 1/2 − k + (ν + 1/2) n,   k = 1..n, ν ∈ ℤ + 1/2,
//! ```
//!
//! a bijection onto ℤ + 1/2 (k is m + 1/2 mod n, shifted into 1..n). It is a
//! *-map because (φ⁽ᵏ⁾_ν)* = φ⁽ⁿ⁺¹⁻ᵏ⁾_{−ν} lands on −m, and it preserves the
//! CAR pairing: k + l = n + 1 with ν + μ = 0 is exactly m + m′ = 0.
//!
//! **Fields.** Summing the mode relation against z-powers:
//!
//! ```text
//! β(φ̂⁽ᵏ⁾(w)) = (1/n) Σ_{zⁿ = w} z^{1−k} ψ̂(z),
//! β⁻¹(ψ̂(z))  = Σ_{k=1..n} z^{k−1} φ̂⁽ᵏ⁾(zⁿ),
//! ```
//!
//! with integer powers only — no branch choices, and the first sum does not
//! depend on which n-th root is listed first.
//!
//! **Line picture (n = 2).** With the Cayley transform z = C(x) and the
//! doubling map q(x) = 2x/(1 − x²), weight-1/2 line fields F(x) defined by
//! F̂(C(x)) = ((1 − ix)/√2) F(x) turn the field relations into
//!
//! ```text
//! φ(q(x))  = (1−x²)/(2(1−ix)) · ψ(x) + i(1−x²)/(2x(1−ix)) · ψ(−1/x),
//! φ*(q(x)) = (1−x²)/(2(1+ix)) · ψ(x) − i(1−x²)/(2x(1+ix)) · ψ(−1/x),
//! ψ(x)     = (1−ix)/(1−x²) · φ(q(x)) + (1+ix)/(1−x²) · φ*(q(x)),
//! ```
//!
//! valid for x ∉ {0, ±1} (x = 0 and the points ±1 are removable/ideal points
//! of the parametrization, not of the operators; the functions here refuse
//! them). These coefficient functions are pinned by tests that re-derive them
//! from the compact picture and check the two-point functions against the
//! Wick kernels.
//!
//! **Ramond sector.** The same interleaving embeds (Ramond real fermion) ⊗
//! (NS real fermion) into the Ramond modes of the single fermion:
//! R-factor m ↦ ψ_{R,2m} (even), NS-factor ν ↦ ψ_{R,2ν} (odd), and the
//! Ramond ground state pulls back to (Ramond ground) ⊗ (NS vacuum).

use crate::circle::nth_roots;
use crate::poly::{Gen, ModePolynomial};
use crate::{C64, Error, HalfInt, I, ONE};

/// Image index m = 1/2 − k + (ν + 1/2) n.
pub fn mode_map(n: u32, k: u32, nu: HalfInt) -> Result<HalfInt, Error> {
    Gen::MultiPhi { n, k, nu }.validate()?;
    let m = HalfInt::from_twice(1 - 2 * k as i64 + (nu.twice() + 1) * n as i64);
    Ok(m)
}

/// Preimage (k, ν) of a real-fermion index m.
pub fn mode_map_inverse(n: u32, m: HalfInt) -> Result<(u32, HalfInt), Error> {
    if !m.is_half_odd() {
        return Err(Error::BadModeIndex {
            index: m,
            reason: "NS index must be half-odd".into(),
        });
    }
    let t = (m.twice() + 1) / 2; // m + 1/2 ∈ ℤ
    let r = (1 - t).rem_euclid(n as i64);
    let k = if r == 0 { n as i64 } else { r };
    // ν + 1/2 = (t − 1 + k)/n must divide exactly.
    let num = t - 1 + k;
    if num.rem_euclid(n as i64) != 0 {
        return Err(Error::BadModeIndex {
            index: m,
            reason: format!("no preimage in the {n}-component family"),
        });
    }
    let nu = HalfInt::from_twice(2 * (num / n as i64) - 1);
    Ok((k as u32, nu))
}

/// β on a generator of the n-component family.
pub fn beta_gen(g: &Gen) -> Result<Gen, Error> {
    match *g {
        Gen::MultiPhi { n, k, nu } => Ok(Gen::Psi(mode_map(n, k, nu)?)),
        _ => Err(Error::Dimension(format!(
            "beta acts on the complex-family modes, got {g}"
        ))),
    }
}

/// β⁻¹ on a real-fermion generator.
pub fn beta_inverse_gen(n: u32, g: &Gen) -> Result<Gen, Error> {
    match *g {
        Gen::Psi(m) => {
            let (k, nu) = mode_map_inverse(n, m)?;
            Ok(Gen::MultiPhi { n, k, nu })
        }
        _ => Err(Error::Dimension(format!(
            "beta inverse acts on real-fermion modes, got {g}"
        ))),
    }
}

/// β on a polynomial in the family modes. With `image_cutoff = Some(M)`,
/// monomials whose image would involve |m| > M are dropped (compression onto
/// the truncated space); with `None` the map is exact.
pub fn beta(p: &ModePolynomial, image_cutoff: Option<HalfInt>) -> Result<ModePolynomial, Error> {
    for (_, m) in p.terms() {
        for g in m {
            beta_gen(g)?;
        }
    }
    Ok(p.substitute(|g| {
        let img = beta_gen(g).expect("validated above");
        match image_cutoff {
            Some(cut) if img.index().abs() > cut => None,
            _ => Some(img),
        }
    }))
}

/// β⁻¹ on a polynomial in the real-fermion modes, with optional cutoff on
/// the preimage indices |ν|.
pub fn beta_inverse(
    n: u32,
    p: &ModePolynomial,
    image_cutoff: Option<HalfInt>,
) -> Result<ModePolynomial, Error> {
    for (_, m) in p.terms() {
        for g in m {
            beta_inverse_gen(n, g)?;
        }
    }
    Ok(p.substitute(|g| {
        let img = beta_inverse_gen(n, g).expect("validated above");
        match image_cutoff {
            Some(cut) if img.index().abs() > cut => None,
            _ => Some(img),
        }
    }))
}

/// β(φ̂⁽ᵏ⁾(w)) as Σ c_j ψ̂(z_j): pairs (c_j, z_j) over all n-th roots of w,
/// c_j = z_j^{1−k}/n.
pub fn field_embedding(n: u32, k: u32, w: C64) -> Result<Vec<(C64, C64)>, Error> {
    if k == 0 || k > n {
        return Err(Error::Dimension(format!("component k = {k} outside 1..={n}")));
    }
    let z0 = nth_roots(w, n as usize)
        .first()
        .copied()
        .ok_or_else(|| Error::Dimension("n must be positive".into()))?;
    Ok(field_embedding_from_root(n, k, z0))
}

/// Same, but with the root family generated from a chosen n-th root z₀.
pub fn field_embedding_from_root(n: u32, k: u32, z0: C64) -> Vec<(C64, C64)> {
    let om = crate::circle::omega(n as usize);
    let inv_n = ONE / n as f64;
    let mut out = Vec::with_capacity(n as usize);
    let mut z = z0;
    for _ in 0..n {
        let c = z.powi(1 - k as i32) * inv_n;
        out.push((c, z));
        z *= om;
    }
    out
}

/// β⁻¹(ψ̂(z)) as Σ c_k φ̂⁽ᵏ⁾(zⁿ): triples (c_k, k, zⁿ), c_k = z^{k−1}.
pub fn field_inverse(n: u32, z: C64) -> Vec<(C64, u32, C64)> {
    let w = z.powu(n);
    (1..=n).map(|k| (z.powi(k as i32 - 1), k, w)).collect()
}

/// Coefficients of a line field expanded in ψ at the two points x and −1/x.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinePair {
    pub at_x: C64,
    pub at_minus_inv_x: C64,
}

fn check_line_domain(x: f64) -> Result<(), Error> {
    if x == 0.0 {
        return Err(Error::Domain(
            "x = 0: the partner point -1/x is the ideal point; use the compact picture".into(),
        ));
    }
    if (1.0 - x * x).abs() < 1e-12 {
        return Err(Error::Domain(format!(
            "|x| = 1: q(x) is singular at x = {x}"
        )));
    }
    Ok(())
}

/// √2/(1 − ix): converts the circle field at C(x) to the line field at x,
/// F(x) = line_field_factor(x) · F̂(C(x)).
pub fn line_field_factor(x: f64) -> C64 {
    C64::new(2.0, 0.0).sqrt() / (ONE - I * x)
}

/// φ(q(x)) = a₁ ψ(x) + a₂ ψ(−1/x).
pub fn line_embedding_phi(x: f64) -> Result<LinePair, Error> {
    check_line_domain(x)?;
    let u = 1.0 - x * x;
    Ok(LinePair {
        at_x: C64::new(u, 0.0) / (2.0 * (ONE - I * x)),
        at_minus_inv_x: I * u / (2.0 * x * (ONE - I * x)),
    })
}

/// φ*(q(x)) = b₁ ψ(x) + b₂ ψ(−1/x) (the complex conjugates of the φ pair).
pub fn line_embedding_phi_star(x: f64) -> Result<LinePair, Error> {
    check_line_domain(x)?;
    let p = line_embedding_phi(x)?;
    Ok(LinePair {
        at_x: p.at_x.conj(),
        at_minus_inv_x: p.at_minus_inv_x.conj(),
    })
}

/// Coefficients of ψ(x) expanded in the line fields φ, φ* at q(x).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineInverse {
    pub phi: C64,
    pub phi_star: C64,
}

/// ψ(x) = c_φ φ(q(x)) + c_{φ*} φ*(q(x)).
pub fn line_inverse_psi(x: f64) -> Result<LineInverse, Error> {
    check_line_domain(x)?;
    let u = 1.0 - x * x;
    Ok(LineInverse {
        phi: (ONE - I * x) / u,
        phi_star: (ONE + I * x) / u,
    })
}

/// Ramond-sector embedding: R-factor mode m ↦ ψ_{R,2m}.
pub fn ramond_factor_map(m: HalfInt) -> Result<Gen, Error> {
    let mi = m.as_integer()?;
    Ok(Gen::PsiR(HalfInt::from_int(2 * mi)))
}

/// Ramond-sector embedding: NS-factor mode ν ↦ ψ_{R,2ν} (an odd integer).
pub fn ns_factor_map(nu: HalfInt) -> Result<Gen, Error> {
    if !nu.is_half_odd() {
        return Err(Error::BadModeIndex {
            index: nu,
            reason: "NS-factor index must be half-odd".into(),
        });
    }
    Ok(Gen::PsiR(HalfInt::from_int(nu.twice())))
}
