//! Circle ↔ line geometry: Cayley transform, the doubling map, roots of unity.
//!
//! The compact picture lives on the unit circle, the noncompact picture on the
//! real line; the two are glued by the Cayley transform
//!
//! ```text
//! C(x) = (1 + ix)/(1 − ix),      C: ℝ ∪ {∞} → S¹,  C(∞) = −1,
//! ```
//!
//! under which the square map z ↦ z² on the circle corresponds to the rational
//! doubling map q(x) = 2x/(1 − x²) on the line: C(q(x)) = C(x)², and the
//! antipode corresponds to x ↦ −1/x: −C(x) = C(−1/x). Everything downstream
//! (the n = 2 embedding on the line, interval images, modular coordinates)
//! leans on these identities, so they are pinned by tests here.

use std::f64::consts::PI;

use crate::{C64, Error, I, ONE};

/// e^{iθ}.
pub fn unit(theta: f64) -> C64 {
    C64::from_polar(1.0, theta)
}

/// Cayley transform x ↦ (1 + ix)/(1 − ix), real line to unit circle.
pub fn cayley(x: f64) -> C64 {
    (ONE + I * x) / (ONE - I * x)
}

/// Inverse Cayley transform z ↦ (1/i)(z − 1)/(z + 1) for unimodular z ≠ −1.
pub fn cayley_inv(z: C64) -> Result<f64, Error> {
    if (z.norm() - 1.0).abs() > 1e-9 {
        return Err(Error::Domain(format!("cayley_inv needs |z| = 1, got {z}")));
    }
    if (z + ONE).norm() < 1e-12 {
        return Err(Error::Domain("cayley_inv(-1) is the point at infinity".into()));
    }
    let w = (z - ONE) / (I * (z + ONE));
    Ok(w.re)
}

/// Doubling map q(x) = 2x/(1 − x²); the line shadow of z ↦ z².
///
/// Singular at x = ±1 (those are the square roots of the Cayley puncture).
pub fn q_map(x: f64) -> Result<f64, Error> {
    if (1.0 - x * x).abs() < 1e-14 {
        return Err(Error::Domain(format!("q(x) = 2x/(1-x^2) is singular at x = {x}")));
    }
    Ok(2.0 * x / (1.0 - x * x))
}

/// Primitive n-th root of unity e^{2πi/n}.
pub fn omega(n: usize) -> C64 {
    unit(2.0 * PI / n as f64)
}

/// All n-th roots of a unimodular w: `principal_root(w) · ω^j`, j = 0..n.
///
/// The principal root uses arg(w) ∈ (−π, π]. Identities that must not depend
/// on which root is labeled "first" are tested as multiset equalities.
pub fn nth_roots(w: C64, n: usize) -> Vec<C64> {
    let theta = w.arg();
    let r = w.norm().powf(1.0 / n as f64);
    (0..n)
        .map(|j| C64::from_polar(r, (theta + 2.0 * PI * j as f64) / n as f64))
        .collect()
}

/// Angle of z measured from `base`, lifted to [0, 2π).
///
/// Both points must be unimodular. This gives a continuous angle coordinate
/// along an arc that starts at `base` and runs counterclockwise, immune to the
/// principal-branch jump at −1.
pub fn arg_from(base: C64, z: C64) -> f64 {
    let a = (z / base).arg();
    if a < 0.0 {
        a + 2.0 * PI
    } else {
        a
    }
}
