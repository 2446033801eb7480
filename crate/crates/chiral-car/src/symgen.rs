//! Embedded symmetry generators: currents, Virasoro modes, gauge rotations,
//! and the twisted-sector versions.
//!
//! All operators are built as canonical quadratic (or quartic, for Sugawara)
//! mode polynomials with: each unordered mode pair appearing once, written
//! with the lower index on the left. In that order the vacuum pairing of
//! every factor pair vanishes, so normal ordering adds no constants and —
//! crucially — each truncated operator is the exact compression P A P of its
//! untruncated counterpart (dropped terms act as zero between truncated
//! states). Linear identities between these operators therefore hold on the
//! entire truncated space; identities involving products hold on windows
//! E ≤ cutoff − max |energy shift| (see [`energy_reach`]).
//!
//! The operator families and their defining mode sums:
//!
//! * complex-family current      j_m = Σ_k :φ*_{m−k} φ_k:, [j_m, j_n] = m δ_{m+n,0};
//! * its image                   β(j_m) = Σ_{b ∈ 2ℤ−1/2} :ψ_{2m−b} ψ_b:,
//!   with [β(j_m), ψ_k] = −(−1)^{k+1/2} ψ_{k+2m};
//! * real-fermion Virasoro       L^{1/2}_m = Σ_{a<b, a+b=m} (b−a)/2 · ψ_a ψ_b  (c = 1/2);
//! * complex-family Virasoro     L^{1}_m = Σ_k (k − m/2) :φ*_{m−k} φ_k:  (c = 1);
//! * current Sugawara            L^{sug}_m = (1/2) Σ_k :j_{m−k} j_k:  (c = 1);
//! * charge shift                ρ^q(j_m) = j_m + q δ_{m,0},
//!                               ρ^q(L^{sug}_m) = L^{sug}_m + q j_m + (q²/2) δ_{m,0};
//! * odd-mode quadratics         Σ_{a<b, a+b=N} (b−a) φ_a φ_b  (and the φ* copy),
//!   the building blocks of β⁻¹ on odd real-Virasoro modes;
//! * twisted current             β_R(ĵ_r) = Σ_{x<y, x+y=2r} (−1)^y (−i) ψ_{R,x} ψ_{R,y},
//!   r ∈ ℤ + 1/2, with [ĵ_r, ĵ_s] = r δ_{r+s,0} and ĵ_r Ω_R = 0 for r > 0;
//! * Ramond Virasoro             L^{R}_m = Σ_{x<y, x+y=m} (y−x)/2 · ψ_{R,x} ψ_{R,y}
//!                               + (1/16) δ_{m,0}.
//!
//! The central identities these feed (each verified in the tests and suites):
//!
//! * transported Virasoro:   β(L^{1}_m) = −(1/4) β(j_m) + (1/2) L^{1/2}_{2m},
//!   and with the q = 1/4 charge shift, β(ρ^{1/4}-L^{1}_m) = (1/2) L^{1/2}_{2m}
//!   + (1/32) δ_{m,0};
//! * inverse transport:      β⁻¹(L^{1/2}_{2N}) = 2 L^{1}_N + (1/2) j_N,
//!                           β⁻¹(L^{1/2}_{2N+1}) = (φφ)-quadratic_N + (φ*φ*)-quadratic_{N+1};
//! * gauge mixing:           Ad(e^{iθ β(j_0)}) ψ_m = e^{−iθ (−1)^{m+1/2}} ψ_m,
//!   i.e. ψ̂(z) ↦ cos θ · ψ̂(z) − i sin θ · ψ̂(−z) (at θ = π/2: ψ̂(z) ↦ −i ψ̂(−z));
//! * mode action of the image stress tensor:
//!   [β(L^{1}_m), ψ_k] = ((1/4)(−1)^{k+1/2} − (k+m)/2) ψ_{k+2m};
//! * twisted ground state:   ⟨L^{R}_0⟩ = 1/16, with the constant extracted
//!   independently as the regularized half-odd-vs-integer lattice mismatch
//!   (1/2)[Σ_{r∈ℕ+1/2} r e^{−εr} − Σ_{n≥1} n e^{−εn}], ε → 0.

use crate::fock::{FockSpace, State};
use crate::numeric::extrapolate_to_zero;
use crate::poly::{Gen, ModePolynomial};
use crate::{C64, Error, HalfInt, ONE};

/// Canonical bilinear c·:A B: with the lower index left. In that order the
/// vacuum pairing vanishes, so the result is a plain monomial. Equal
/// generators square to zero (`None`); the Ramond zero-mode diagonal, whose
/// pairing is 1/2, cannot be normal-ordered this way and panics (no operator
/// in this crate produces it — coefficients at that slot vanish identically).
fn normal_bilinear(c: C64, a: Gen, b: Gen) -> Option<(C64, Vec<Gen>)> {
    if a == b {
        assert!(
            a.index() != HalfInt::ZERO,
            "zero-mode diagonal has no monomial normal form"
        );
        return None; // x² = 0 for a CAR generator with {x,x} = 0
    }
    let (c, lo, hi) = if (a.index(), a) <= (b.index(), b) {
        (c, a, b)
    } else {
        (-c, b, a)
    };
    debug_assert_eq!(
        lo.vacuum_pair(&hi).unwrap_or(0.0),
        0.0,
        "ascending order must kill the vacuum pairing"
    );
    Some((c, vec![lo, hi]))
}

/// Builds a polynomial from canonical bilinears, dropping zero coefficients.
fn quadratic(terms: impl IntoIterator<Item = (C64, Gen, Gen)>) -> ModePolynomial {
    ModePolynomial::from_terms(
        terms
            .into_iter()
            .filter(|(c, _, _)| c.norm() > 0.0)
            .filter_map(|(c, a, b)| normal_bilinear(c, a, b))
            .collect(),
    )
}

/// Rewrites every degree-2 monomial with its factors in canonical ascending
/// order, using a b = −b a + {a, b} where a swap is needed. Sound only for
/// polynomials of degree ≤ 2 (panics otherwise). Operators built natively on
/// one side of the isomorphism and operators transported through it can list
/// the same mode pair in opposite orders; this puts both in one form so that
/// coefficient-by-coefficient comparison is meaningful.
pub fn canonical_quadratic(p: &ModePolynomial) -> ModePolynomial {
    let mut terms = Vec::new();
    for (c, m) in p.terms() {
        match m.len() {
            0 | 1 => terms.push((*c, m.clone())),
            2 => {
                let (a, b) = (m[0], m[1]);
                if (a.index(), a) <= (b.index(), b) {
                    terms.push((*c, vec![a, b]));
                } else {
                    let pair = a.car_pair(&b).expect("mixed-algebra monomial");
                    terms.push((-*c, vec![b, a]));
                    if pair != 0.0 {
                        terms.push((*c * pair, vec![]));
                    }
                }
            }
            _ => panic!("canonical_quadratic expects degree ≤ 2"),
        }
    }
    ModePolynomial::from_terms(terms)
}

/// Largest |energy shift| over the monomials of `p` (0 for scalars): the
/// window margin needed before products of truncated operators are exact.
pub fn energy_reach(p: &ModePolynomial) -> HalfInt {
    p.terms()
        .iter()
        .map(|(_, m)| m.iter().map(|g| g.index()).sum::<HalfInt>().abs())
        .max()
        .unwrap_or(HalfInt::ZERO)
}

/// Complex-family current mode j_m = Σ_k :φ*_{m−k} φ_k:, |k|, |m−k| ≤ cutoff.
pub fn complex_current(m: i64, cutoff: HalfInt) -> ModePolynomial {
    let mm = HalfInt::from_int(m);
    quadratic(crate::halfint::ns_indices(cutoff).into_iter().filter_map(|k| {
        let a = mm - k;
        (a.abs() <= cutoff).then(|| (ONE, Gen::phi_star(a), Gen::phi(k)))
    }))
}

/// Image current β(j_m) = Σ_{b ∈ 2ℤ−1/2} :ψ_{2m−b} ψ_b:, both indices ≤ cutoff.
pub fn embedded_current(m: i64, cutoff: HalfInt) -> ModePolynomial {
    let center = HalfInt::from_int(2 * m);
    quadratic(crate::halfint::ns_indices(cutoff).into_iter().filter_map(|b| {
        if b.ns_parity_sign().unwrap() != 1 {
            return None; // sum over the +1 parity class only
        }
        let a = center - b;
        (a.abs() <= cutoff).then(|| (ONE, Gen::Psi(a), Gen::Psi(b)))
    }))
}

/// Real-fermion Virasoro mode (c = 1/2): Σ_{a<b, a+b=m} (b−a)/2 · ψ_a ψ_b.
pub fn virasoro_real(m: i64, cutoff: HalfInt) -> ModePolynomial {
    let mm = HalfInt::from_int(m);
    quadratic(crate::halfint::ns_indices(cutoff).into_iter().filter_map(|a| {
        let b = mm - a;
        (a < b && b.abs() <= cutoff).then(|| {
            let coeff = C64::new((b - a).to_f64() / 2.0, 0.0);
            (coeff, Gen::Psi(a), Gen::Psi(b))
        })
    }))
}

/// Complex-family Virasoro mode (c = 1): Σ_k (k − m/2) :φ*_{m−k} φ_k:.
pub fn virasoro_complex(m: i64, cutoff: HalfInt) -> ModePolynomial {
    let mm = HalfInt::from_int(m);
    quadratic(crate::halfint::ns_indices(cutoff).into_iter().filter_map(|k| {
        let a = mm - k;
        (a.abs() <= cutoff).then(|| {
            let coeff = C64::new(k.to_f64() - m as f64 / 2.0, 0.0);
            (coeff, Gen::phi_star(a), Gen::phi(k))
        })
    }))
}

/// φφ quadratic at odd transport level: Σ_{a<b, a+b=N} (b−a) φ_a φ_b.
pub fn odd_quadratic_phi(n_level: i64, cutoff: HalfInt) -> ModePolynomial {
    let nn = HalfInt::from_int(n_level);
    quadratic(crate::halfint::ns_indices(cutoff).into_iter().filter_map(|a| {
        let b = nn - a;
        (a < b && b.abs() <= cutoff).then(|| {
            let coeff = C64::new((b - a).to_f64(), 0.0);
            (coeff, Gen::phi(a), Gen::phi(b))
        })
    }))
}

/// φ*φ* quadratic at odd transport level: Σ_{a<b, a+b=N} (b−a) φ*_a φ*_b.
pub fn odd_quadratic_phi_star(n_level: i64, cutoff: HalfInt) -> ModePolynomial {
    let nn = HalfInt::from_int(n_level);
    quadratic(crate::halfint::ns_indices(cutoff).into_iter().filter_map(|a| {
        let b = nn - a;
        (a < b && b.abs() <= cutoff).then(|| {
            let coeff = C64::new((b - a).to_f64(), 0.0);
            (coeff, Gen::phi_star(a), Gen::phi_star(b))
        })
    }))
}

/// Current Sugawara mode: (1/2) Σ_k :j_{m−k} j_k: with inner current indices
/// |·| ≤ k_max, each current built at the given mode cutoff. Current-level
/// normal ordering puts the higher current index right; since [j_a, j_b] = 0
/// for a + b ≠ 0 this only matters for the (−k, k) pairs.
pub fn sugawara(m: i64, k_max: i64, cutoff: HalfInt) -> ModePolynomial {
    let mut acc = ModePolynomial::zero();
    for a in -k_max..=k_max {
        let b = m - a;
        if b.abs() > k_max || a > b {
            continue;
        }
        let ja = complex_current(a, cutoff);
        let jb = complex_current(b, cutoff);
        let prod = ja.mul(&jb);
        let weight = if a == b { 0.5 } else { 1.0 };
        acc = acc.add(&prod.scale(C64::new(weight, 0.0)));
    }
    acc
}

/// Charge-shifted current ρ^q(j_m) = j_m + q δ_{m,0}.
pub fn rho_current(m: i64, cutoff: HalfInt, q: f64) -> ModePolynomial {
    let j = complex_current(m, cutoff);
    if m == 0 {
        j.add(&ModePolynomial::scalar(C64::new(q, 0.0)))
    } else {
        j
    }
}

/// Charge-shifted Sugawara ρ^q(L^{sug}_m) = L^{sug}_m + q j_m + (q²/2) δ_{m,0}.
pub fn rho_sugawara(m: i64, k_max: i64, cutoff: HalfInt, q: f64) -> ModePolynomial {
    let mut l = sugawara(m, k_max, cutoff).add(&complex_current(m, cutoff).scale(C64::new(q, 0.0)));
    if m == 0 {
        l = l.add(&ModePolynomial::scalar(C64::new(q * q / 2.0, 0.0)));
    }
    l
}

/// The Ad(e^{iθ β(j_0)}) eigenphase of ψ_m: e^{−iθ (−1)^{m+1/2}}.
pub fn gauge_phase(theta: f64, m: HalfInt) -> Result<C64, Error> {
    let sign = m.ns_parity_sign()? as f64;
    Ok(C64::from_polar(1.0, -theta * sign))
}

/// Twisted current mode β_R(ĵ_r), r ∈ ℤ + 1/2, on modes |·| ≤ cutoff:
/// Σ_{x<y, x+y=2r} (−1)^y (−i) ψ_{R,x} ψ_{R,y}.
pub fn twisted_current(r: HalfInt, cutoff: i64) -> Result<ModePolynomial, Error> {
    if !r.is_half_odd() {
        return Err(Error::BadModeIndex {
            index: r,
            reason: "twisted current indices are half-odd".into(),
        });
    }
    let total = HalfInt::from_int(r.twice()); // 2r, an odd integer
    Ok(quadratic(
        crate::halfint::ramond_indices(cutoff).into_iter().filter_map(|x| {
            let y = total - x;
            (x < y && y.abs() <= HalfInt::from_int(cutoff)).then(|| {
                let sign = if y.as_integer().unwrap().rem_euclid(2) == 0 {
                    1.0
                } else {
                    -1.0
                };
                (C64::new(0.0, -sign), Gen::PsiR(x), Gen::PsiR(y))
            })
        }),
    ))
}

/// Ramond-sector Virasoro mode (c = 1/2):
/// Σ_{x<y, x+y=m} (y−x)/2 · ψ_{R,x} ψ_{R,y} + (1/16) δ_{m,0}.
pub fn ramond_virasoro(m: i64, cutoff: i64) -> ModePolynomial {
    let mm = HalfInt::from_int(m);
    let ordered = quadratic(crate::halfint::ramond_indices(cutoff).into_iter().filter_map(|x| {
        let y = mm - x;
        (x < y && y.abs() <= HalfInt::from_int(cutoff)).then(|| {
            let coeff = C64::new((y - x).to_f64() / 2.0, 0.0);
            (coeff, Gen::PsiR(x), Gen::PsiR(y))
        })
    }));
    if m == 0 {
        ordered.add(&ModePolynomial::scalar(C64::new(1.0 / 16.0, 0.0)))
    } else {
        ordered
    }
}

/// Mode-ordered twisted Sugawara mode (1/2) Σ_r :ĵ_{m−r} ĵ_r: with the lower
/// current index acting last: Σ_{a<b, a+b=m} ĵ_a ĵ_b + (1/2) ĵ_{m/2}² for odd m.
/// As operators these equal (1/2) × the ordered part of the Ramond Virasoro
/// mode L^R_{2m}; the missing c-number at m = 0 is the ordering-transport
/// constant extracted by [`ramond_l0_regularized_constant`].
pub fn twisted_sugawara(m: i64, cutoff: i64) -> Result<ModePolynomial, Error> {
    let mm = HalfInt::from_int(m);
    let mut acc = ModePolynomial::zero();
    let mut a = HalfInt::int_plus_half(-cutoff);
    while a <= HalfInt::from_int(cutoff) {
        let b = mm - a;
        if a <= b && b.abs() <= HalfInt::from_int(cutoff) {
            let ja = twisted_current(a, cutoff)?;
            let jb = twisted_current(b, cutoff)?;
            let weight = if a == b { 0.5 } else { 1.0 };
            acc = acc.add(&ja.mul(&jb).scale(C64::new(weight, 0.0)));
        }
        a += HalfInt::ONE;
    }
    Ok(acc)
}

/// The twisted-minus-untwisted zero-point constant by regularized lattice
/// mismatch: c(ε) = (1/2)[Σ_{r∈ℕ+1/2} r e^{−εr} − Σ_{n≥1} n e^{−εn}],
/// extrapolated ε → 0 through the listed ε values (Neville in ε²).
/// Returns the extrapolated value and the (ε, c(ε)) table. Both sums are
/// evaluated term by term until the terms drop below 1e−18.
pub fn ramond_l0_regularized_constant(eps_list: &[f64]) -> (f64, Vec<(f64, f64)>) {
    let sum_lattice = |eps: f64, start: f64, step: f64| -> f64 {
        let mut acc = 0.0;
        let mut x = start;
        loop {
            let term = x * (-eps * x).exp();
            acc += term;
            if term < 1e-18 && x > 1.0 / eps {
                break;
            }
            x += step;
        }
        acc
    };
    let table: Vec<(f64, f64)> = eps_list
        .iter()
        .map(|&eps| {
            let half = sum_lattice(eps, 0.5, 1.0);
            let int = sum_lattice(eps, 1.0, 1.0);
            (eps, 0.5 * (half - int))
        })
        .collect();
    let pts: Vec<(f64, f64)> = table.iter().map(|&(e, v)| (e * e, v)).collect();
    (extrapolate_to_zero(&pts), table)
}

/// Truncation-convergence sequence for the zero-point mismatch at a fixed
/// damping λ: V(λ, M) = (1/2)[Σ_{r>0} λ^{2r} ⟨ĵ_r ĵ_{−r}⟩_M −
/// Σ_{n>0} λ^{2n} ⟨β(j_n) β(j_{−n})⟩_{M−1/2}], with every expectation value
/// computed in the truncated Fock representation (Ramond cutoff M, NS cutoff
/// M − 1/2).
pub fn casimir_difference(lambda: f64, cutoff: i64) -> Result<f64, Error> {
    let rspace = FockSpace::ramond(cutoff)?;
    let mut twisted = 0.0;
    let mut r = HalfInt::HALF;
    while r <= HalfInt::from_int(cutoff) {
        let p = twisted_current(r, cutoff)?.mul(&twisted_current(-r, cutoff)?);
        let v = rspace.vev(&p)?;
        twisted += lambda.powi(r.twice() as i32) * v.re;
        r += HalfInt::ONE;
    }
    let ns_cutoff = HalfInt::from_int(cutoff) - HalfInt::HALF;
    let nspace = FockSpace::real_ns(ns_cutoff)?;
    let mut untwisted = 0.0;
    for n in 1..=cutoff {
        let p = embedded_current(n, ns_cutoff).mul(&embedded_current(-n, ns_cutoff));
        let v = nspace.vev(&p)?;
        untwisted += lambda.powi(2 * n as i32) * v.re;
    }
    Ok(0.5 * (twisted - untwisted))
}

/// The M → ∞ limit of [`casimir_difference`] at fixed λ, by direct summation
/// of the untruncated mode weights (⟨ĵ_r ĵ_{−r}⟩ → r, ⟨β(j_n) β(j_{−n})⟩ → n).
pub fn casimir_difference_limit(lambda: f64) -> f64 {
    let x = lambda * lambda;
    let mut acc = 0.0;
    let mut r = 0.5;
    while r < 5000.0 {
        acc += 0.5 * r * x.powf(r);
        r += 1.0;
    }
    let mut n = 1.0;
    while n < 5000.0 {
        acc -= 0.5 * n * x.powf(n);
        n += 1.0;
    }
    acc
}

/// Max deviation of [A, B] = C over a set of basis masks.
pub fn max_commutator_deviation(
    space: &FockSpace,
    a: &ModePolynomial,
    b: &ModePolynomial,
    expected: &ModePolynomial,
    masks: &[u64],
) -> Result<f64, Error> {
    let mut worst: f64 = 0.0;
    for &mask in masks {
        let e = State::basis(mask);
        let ab = space.apply_poly(a, &space.apply_poly(b, &e)?)?;
        let ba = space.apply_poly(b, &space.apply_poly(a, &e)?)?;
        let ex = space.apply_poly(expected, &e)?;
        let mut diff = ab;
        diff.add_scaled(&ba, -ONE);
        diff.add_scaled(&ex, -ONE);
        worst = worst.max(diff.max_abs());
    }
    Ok(worst)
}

/// Transported Virasoro combination −(1/4) β(j_m) + (1/2) L^{1/2}_{2m},
/// built natively on the real-fermion side at the given cutoff.
pub fn transported_virasoro(m: i64, cutoff: HalfInt) -> ModePolynomial {
    embedded_current(m, cutoff)
        .scale(C64::new(-0.25, 0.0))
        .add(&virasoro_real(2 * m, cutoff).scale(C64::new(0.5, 0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::I;
    use crate::isomap::beta;

    fn h(t: i64) -> HalfInt {
        HalfInt::from_twice(t)
    }

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    /// Window masks safe for products of operators with the given reaches.
    fn safe_window(space: &FockSpace, cutoff: HalfInt, reach: HalfInt) -> Vec<u64> {
        space.window_masks(cutoff - reach)
    }

    #[test]
    fn current_algebra_heisenberg() {
        let cutoff = h(11);
        let space = FockSpace::multi_ns(2, cutoff).unwrap();
        for m in -2..=2i64 {
            for n in -2..=2i64 {
                let jm = complex_current(m, cutoff);
                let jn = complex_current(n, cutoff);
                let expected = if m + n == 0 {
                    ModePolynomial::scalar(c(m as f64, 0.0))
                } else {
                    ModePolynomial::zero()
                };
                let reach = h(2 * m.abs().max(n.abs()));
                let window = safe_window(&space, cutoff, reach);
                assert!(window.len() > 4);
                let dev =
                    max_commutator_deviation(&space, &jm, &jn, &expected, &window).unwrap();
                assert!(dev < 1e-12, "[j_{m}, j_{n}]: deviation {dev:.2e}");
            }
        }
    }

    #[test]
    fn embedded_current_is_the_image_of_the_family_current() {
        // β applied to j_m (with a non-binding family cutoff, image-truncated
        // at M) reproduces the natively built image current term-by-term.
        let m_cut = h(13);
        for m in -3..=3i64 {
            let family = complex_current(m, h(41));
            let image = canonical_quadratic(&beta(&family, Some(m_cut)).unwrap());
            let native = embedded_current(m, m_cut);
            let diff = image.sub(&native);
            assert!(
                diff.max_coeff() < 1e-14,
                "m = {m}: coefficient mismatch {:.2e}",
                diff.max_coeff()
            );
        }
    }

    #[test]
    fn embedded_current_grades_modes_by_parity_class() {
        // [β(j_m), ψ_k] = −(−1)^{k+1/2} ψ_{k+2m}.
        let cutoff = h(15);
        let space = FockSpace::real_ns(cutoff).unwrap();
        for m in -2..=2i64 {
            let jm = embedded_current(m, cutoff);
            for kt in (-7..=7).step_by(2) {
                let k = h(kt);
                let target = k + h(4 * m); // k + 2m
                let psi_k = ModePolynomial::gen(Gen::Psi(k));
                let expected = if target.abs() <= cutoff {
                    let sign = -(k.ns_parity_sign().unwrap() as f64);
                    ModePolynomial::monomial(c(sign, 0.0), vec![Gen::Psi(target)])
                } else {
                    ModePolynomial::zero()
                };
                let window = safe_window(&space, cutoff, h(4 * m.abs()) + k.abs());
                let dev = max_commutator_deviation(&space, &jm, &psi_k, &expected, &window)
                    .unwrap();
                assert!(dev < 1e-12, "[J_{m}, ψ_{k}]: {dev:.2e}");
            }
        }
    }

    #[test]
    fn family_current_shifts_family_modes() {
        // [j_m, φ_k] = −φ_{m+k},  [j_m, φ*_k] = +φ*_{m+k}.
        let cutoff = h(11);
        let space = FockSpace::multi_ns(2, cutoff).unwrap();
        for m in -2..=2i64 {
            let jm = complex_current(m, cutoff);
            for kt in (-5..=5).step_by(2) {
                let k = h(kt);
                let target = k + h(2 * m);
                for (gen, sign) in [(Gen::phi(k), -1.0), (Gen::phi_star(k), 1.0)] {
                    let x = ModePolynomial::gen(gen);
                    let tgen = match gen {
                        Gen::MultiPhi { n, k: comp, .. } => Gen::MultiPhi { n, k: comp, nu: target },
                        _ => unreachable!(),
                    };
                    let expected = if target.abs() <= cutoff {
                        ModePolynomial::monomial(c(sign, 0.0), vec![tgen])
                    } else {
                        ModePolynomial::zero()
                    };
                    let window = safe_window(&space, cutoff, h(2 * m.abs()) + k.abs());
                    let dev =
                        max_commutator_deviation(&space, &jm, &x, &expected, &window).unwrap();
                    assert!(dev < 1e-12, "[j_{m}, {gen}]: {dev:.2e}");
                }
            }
        }
    }

    #[test]
    fn real_virasoro_mode_action_and_hermiticity() {
        let cutoff = h(15);
        let space = FockSpace::real_ns(cutoff).unwrap();
        for m in -2..=2i64 {
            // L_m† = L_{−m}, exactly, term by term.
            let lm = virasoro_real(m, cutoff);
            assert!(lm.adjoint().sub(&virasoro_real(-m, cutoff)).max_coeff() < 1e-14);
            // [L_m, ψ_k] = −(k + m/2) ψ_{k+m}.
            for kt in (-7..=7).step_by(2) {
                let k = h(kt);
                let target = k + h(2 * m);
                let psi_k = ModePolynomial::gen(Gen::Psi(k));
                let expected = if target.abs() <= cutoff {
                    let coeff = -(k.to_f64() + m as f64 / 2.0);
                    ModePolynomial::monomial(c(coeff, 0.0), vec![Gen::Psi(target)])
                } else {
                    ModePolynomial::zero()
                };
                let window = safe_window(&space, cutoff, h(2 * m.abs()) + k.abs());
                let dev = max_commutator_deviation(&space, &lm, &psi_k, &expected, &window)
                    .unwrap();
                assert!(dev < 1e-12, "[L_{m}, ψ_{k}]: {dev:.2e}");
            }
        }
        // L_0 eigenvalue on a one-particle state is the mode energy.
        let l0 = virasoro_real(0, cutoff);
        for kt in (1..=15).step_by(2) {
            let st = space
                .apply_gen(&Gen::Psi(h(-kt)), &space.vacuum())
                .unwrap();
            let mut out = space.apply_poly(&l0, &st).unwrap();
            out.add_scaled(&st, c(-(kt as f64) / 2.0, 0.0));
            assert!(out.max_abs() < 1e-13, "L₀ eigenvalue at mode {}", h(kt));
        }
    }

    #[test]
    fn virasoro_algebra_and_central_charges() {
        // [L_m, L_n] = (m−n) L_{m+n} + (c/12) m(m²−1) δ_{m+n,0}.
        let cutoff = h(15);
        let space = FockSpace::real_ns(cutoff).unwrap();
        for (m, n) in [(1i64, -1i64), (2, -1), (1, 1), (2, -2)] {
            let lm = virasoro_real(m, cutoff);
            let ln = virasoro_real(n, cutoff);
            let mut expected =
                virasoro_real(m + n, cutoff).scale(c((m - n) as f64, 0.0));
            if m + n == 0 {
                let central = 0.5 / 12.0 * (m * (m * m - 1)) as f64;
                expected = expected.add(&ModePolynomial::scalar(c(central, 0.0)));
            }
            let window = safe_window(&space, cutoff, h(2 * m.abs().max(n.abs())));
            let dev = max_commutator_deviation(&space, &lm, &ln, &expected, &window).unwrap();
            assert!(dev < 1e-12, "[L_{m}, L_{n}]: {dev:.2e}");
        }
        // ⟨[L_2, L_{−2}]⟩ = c/2: 1/4 for the real fermion…
        let l2 = virasoro_real(2, cutoff);
        let lm2 = virasoro_real(-2, cutoff);
        let vev = space.vev(&l2.commutator(&lm2)).unwrap();
        assert!((vev - c(0.25, 0.0)).norm() < 1e-12, "c = 1/2 central: {vev}");
        // …and 1/2 for the complex family.
        let ccut = h(11);
        let cspace = FockSpace::multi_ns(2, ccut).unwrap();
        let c2 = virasoro_complex(2, ccut);
        let cm2 = virasoro_complex(-2, ccut);
        let cvev = cspace.vev(&c2.commutator(&cm2)).unwrap();
        assert!((cvev - c(0.5, 0.0)).norm() < 1e-12, "c = 1 central: {cvev}");
    }

    #[test]
    fn complex_virasoro_weights() {
        // L_0 gives 1/2 on φ_{−1/2} Ω and on φ*_{−1/2} Ω.
        let cutoff = h(11);
        let space = FockSpace::multi_ns(2, cutoff).unwrap();
        let l0 = virasoro_complex(0, cutoff);
        for gen in [Gen::phi(h(-1)), Gen::phi_star(h(-1))] {
            let st = space.apply_gen(&gen, &space.vacuum()).unwrap();
            let mut out = space.apply_poly(&l0, &st).unwrap();
            out.add_scaled(&st, c(-0.5, 0.0));
            assert!(out.max_abs() < 1e-13, "weight of {gen}");
        }
    }

    #[test]
    fn sugawara_reproduces_the_complex_virasoro_on_a_window() {
        let cutoff = h(13);
        let space = FockSpace::multi_ns(2, cutoff).unwrap();
        for m in -1..=1i64 {
            let sug = sugawara(m, 6, cutoff);
            let vir = virasoro_complex(m, cutoff);
            // Sugawara is quartic: stay on a shallow window with margin for
            // the inner current excursions.
            let window = space.window_masks(h(4));
            for &mask in &window {
                let e = State::basis(mask);
                let a = space.apply_poly(&sug, &e).unwrap();
                let b = space.apply_poly(&vir, &e).unwrap();
                let mut diff = a;
                diff.add_scaled(&b, -ONE);
                assert!(
                    diff.max_abs() < 1e-11,
                    "Sugawara vs Virasoro at m={m}, mask {mask:b}: {:.2e}",
                    diff.max_abs()
                );
            }
        }
        // Central charge through the Sugawara form: ⟨[L_2, L_{−2}]⟩ = 1/2.
        let s2 = sugawara(2, 6, cutoff);
        let sm2 = sugawara(-2, 6, cutoff);
        let vev = space.vev(&s2.commutator(&sm2)).unwrap();
        assert!((vev - c(0.5, 0.0)).norm() < 1e-10, "Sugawara central: {vev}");
    }

    #[test]
    fn charge_shift_is_a_virasoro_cocycle() {
        // [ρ^q L_1, ρ^q L_{−1}] = 2 ρ^q L_0 for any q.
        let cutoff = h(11);
        let space = FockSpace::multi_ns(2, cutoff).unwrap();
        let q = 0.3;
        let l1 = rho_sugawara(1, 5, cutoff, q);
        let lm1 = rho_sugawara(-1, 5, cutoff, q);
        let expected = rho_sugawara(0, 5, cutoff, q).scale(c(2.0, 0.0));
        let window = space.window_masks(h(4));
        let dev = max_commutator_deviation(&space, &l1, &lm1, &expected, &window).unwrap();
        assert!(dev < 1e-10, "shifted algebra: {dev:.2e}");
    }

    #[test]
    fn transported_virasoro_identity_exact_in_coefficients() {
        // β(L^{1}_m) = −(1/4) β(j_m) + (1/2) L^{1/2}_{2m}, term by term on the
        // truncated space (a linear identity between exact compressions).
        let m_cut = h(15);
        for m in -2..=2i64 {
            let image =
                canonical_quadratic(&beta(&virasoro_complex(m, h(41)), Some(m_cut)).unwrap());
            let native = transported_virasoro(m, m_cut);
            let diff = image.sub(&native);
            assert!(
                diff.max_coeff() < 1e-13,
                "m = {m}: transported identity off by {:.2e}",
                diff.max_coeff()
            );
        }
    }

    #[test]
    fn quarter_charge_shift_absorbs_the_current() {
        // β(L^{1}_m + (1/4) j_m + (1/32) δ_{m,0}) = (1/2) L^{1/2}_{2m} + (1/32) δ_{m,0}.
        let m_cut = h(15);
        for m in -2..=2i64 {
            let mut shifted = virasoro_complex(m, h(41))
                .add(&complex_current(m, h(41)).scale(c(0.25, 0.0)));
            if m == 0 {
                shifted = shifted.add(&ModePolynomial::scalar(c(1.0 / 32.0, 0.0)));
            }
            let image = canonical_quadratic(&beta(&shifted, Some(m_cut)).unwrap());
            let mut rhs = virasoro_real(2 * m, m_cut).scale(c(0.5, 0.0));
            if m == 0 {
                rhs = rhs.add(&ModePolynomial::scalar(c(1.0 / 32.0, 0.0)));
            }
            assert!(
                image.sub(&rhs).max_coeff() < 1e-13,
                "m = {m}: shifted transport off"
            );
        }
    }

    #[test]
    fn inverse_transport_mode_identities() {
        // Even: β(2 L^{1}_N + (1/2) j_N) = L^{1/2}_{2N};
        // odd:  β(φφ-quadratic_N + φ*φ*-quadratic_{N+1}) = L^{1/2}_{2N+1}.
        let m_cut = h(15);
        for n in -2..=2i64 {
            let even = canonical_quadratic(
                &beta(
                    &virasoro_complex(n, h(41))
                        .scale(c(2.0, 0.0))
                        .add(&complex_current(n, h(41)).scale(c(0.5, 0.0))),
                    Some(m_cut),
                )
                .unwrap(),
            );
            assert!(
                even.sub(&virasoro_real(2 * n, m_cut)).max_coeff() < 1e-13,
                "even level {n}"
            );
            let odd = canonical_quadratic(
                &beta(
                    &odd_quadratic_phi(n, h(41)).add(&odd_quadratic_phi_star(n + 1, h(41))),
                    Some(m_cut),
                )
                .unwrap(),
            );
            assert!(
                odd.sub(&virasoro_real(2 * n + 1, m_cut)).max_coeff() < 1e-13,
                "odd level {n}"
            );
        }
    }

    #[test]
    fn image_stress_tensor_mode_action() {
        // [β(L^{1}_m), ψ_k] = ((1/4)(−1)^{k+1/2} − (k+m)/2) ψ_{k+2m}.
        let cutoff = h(15);
        let space = FockSpace::real_ns(cutoff).unwrap();
        for m in -2..=2i64 {
            let tl = transported_virasoro(m, cutoff);
            for kt in (-5..=5).step_by(2) {
                let k = h(kt);
                let target = k + h(4 * m);
                let psi_k = ModePolynomial::gen(Gen::Psi(k));
                let expected = if target.abs() <= cutoff {
                    let coeff = 0.25 * k.ns_parity_sign().unwrap() as f64
                        - 0.5 * (k.to_f64() + m as f64);
                    ModePolynomial::monomial(c(coeff, 0.0), vec![Gen::Psi(target)])
                } else {
                    ModePolynomial::zero()
                };
                let window = safe_window(&space, cutoff, h(4 * m.abs()) + k.abs());
                let dev = max_commutator_deviation(&space, &tl, &psi_k, &expected, &window)
                    .unwrap();
                assert!(dev < 1e-12, "[β(L_{m}), ψ_{k}]: {dev:.2e}");
            }
        }
    }

    #[test]
    fn gauge_rotation_mixes_by_parity_phase() {
        let cutoff = h(11);
        let space = FockSpace::real_ns(cutoff).unwrap();
        let j0 = embedded_current(0, cutoff);
        for &theta in &[0.37, std::f64::consts::FRAC_PI_2] {
            let u = space
                .energy_preserving_exp(&j0.scale(I * theta))
                .unwrap();
            assert!(u.unitarity_defect() < 1e-12);
            for kt in (-11..=11).step_by(2) {
                let k = h(kt);
                let phase = gauge_phase(theta, k).unwrap();
                // U ψ_k U† e = phase · ψ_k e on every basis state.
                for mask in space.basis_masks() {
                    let e = State::basis(mask);
                    let lhs = u.apply(
                        &space
                            .apply_gen(&Gen::Psi(k), &u.apply_adjoint(&e))
                            .unwrap(),
                    );
                    let mut rhs = space.apply_gen(&Gen::Psi(k), &e).unwrap();
                    rhs.scale(phase);
                    let mut diff = lhs;
                    diff.add_scaled(&rhs, -ONE);
                    assert!(
                        diff.max_abs() < 1e-12,
                        "θ={theta}, mode {k}, mask {mask:b}"
                    );
                }
            }
        }
        // At θ = π/2 the phase is ∓i by parity class: ψ̂(z) ↦ −i ψ̂(−z).
        let quarter = std::f64::consts::FRAC_PI_2;
        assert!((gauge_phase(quarter, h(3)).unwrap() + I).norm() < 1e-15);
        assert!((gauge_phase(quarter, h(1)).unwrap() - I).norm() < 1e-15);
        // Infinitesimal version: [β(j_0), ψ_k] = −(−1)^{k+1/2} ψ_k.
        for kt in (-11..=11).step_by(2) {
            let k = h(kt);
            let psi_k = ModePolynomial::gen(Gen::Psi(k));
            let expected = ModePolynomial::monomial(
                c(-(k.ns_parity_sign().unwrap() as f64), 0.0),
                vec![Gen::Psi(k)],
            );
            let window = space.window_masks(cutoff - k.abs());
            let dev =
                max_commutator_deviation(&space, &j0, &psi_k, &expected, &window).unwrap();
            assert!(dev < 1e-13, "infinitesimal gauge at {k}");
        }
    }

    #[test]
    fn twisted_current_ground_state_and_weights() {
        let cutoff = 9i64;
        let space = FockSpace::ramond(cutoff).unwrap();
        // ĵ_r Ω_R = 0 for r > 0, exactly in the truncated representation.
        let mut r = HalfInt::HALF;
        while r <= HalfInt::from_int(cutoff) {
            let jr = twisted_current(r, cutoff).unwrap();
            let out = space.apply_poly(&jr, &space.vacuum()).unwrap();
            assert!(out.max_abs() < 1e-14, "ĵ_{r} Ω_R ≠ 0");
            r += HalfInt::ONE;
        }
        // ⟨ĵ_r ĵ_{−r}⟩ follows the truncation tent min(r, M − r + 1/2).
        let mut r = HalfInt::HALF;
        while r <= HalfInt::from_int(cutoff + 1) {
            let p = twisted_current(r, cutoff)
                .unwrap()
                .mul(&twisted_current(-r, cutoff).unwrap());
            let got = space.vev(&p).unwrap();
            let tent = r
                .to_f64()
                .min(cutoff as f64 - r.to_f64() + 0.5)
                .max(0.0);
            assert!(
                (got - c(tent, 0.0)).norm() < 1e-12,
                "⟨ĵ_{r} ĵ_{{-{r}}}⟩ = {got}, want {tent}"
            );
            r += HalfInt::ONE;
        }
        // Hermiticity: ĵ_r* = ĵ_{−r}, term by term.
        let j = twisted_current(h(3), cutoff).unwrap();
        assert!(j.adjoint().sub(&twisted_current(h(-3), cutoff).unwrap()).max_coeff() < 1e-14);
    }

    #[test]
    fn twisted_current_algebra() {
        // [ĵ_r, ĵ_s] = r δ_{r+s,0} on safe windows.
        let cutoff = 10i64;
        let space = FockSpace::ramond(cutoff).unwrap();
        for rt in [-3i64, -1, 1, 3] {
            for st in [-3i64, -1, 1, 3] {
                let r = h(rt);
                let s = h(st);
                let jr = twisted_current(r, cutoff).unwrap();
                let js = twisted_current(s, cutoff).unwrap();
                let expected = if r + s == HalfInt::ZERO {
                    ModePolynomial::scalar(c(r.to_f64(), 0.0))
                } else {
                    ModePolynomial::zero()
                };
                let reach = h(2 * rt.abs().max(st.abs()));
                let window = space.window_masks(HalfInt::from_int(cutoff) - reach);
                let dev =
                    max_commutator_deviation(&space, &jr, &js, &expected, &window).unwrap();
                assert!(dev < 1e-12, "[ĵ_{r}, ĵ_{s}]: {dev:.2e}");
            }
        }
    }

    #[test]
    fn ramond_virasoro_ground_weight_and_algebra() {
        let cutoff = 10i64;
        let space = FockSpace::ramond(cutoff).unwrap();
        // ⟨L^R_0⟩ = 1/16: the ordered part kills the ground state, the
        // constant carries the weight.
        let l0 = ramond_virasoro(0, cutoff);
        let vev = space.vev(&l0).unwrap();
        assert!((vev - c(1.0 / 16.0, 0.0)).norm() < 1e-14, "⟨L^R_0⟩ = {vev}");
        // The algebra *detects* the 1/16: ⟨[L_1, L_{−1}]⟩ = 2⟨L_0⟩ = 1/8 and
        // ⟨[L_2, L_{−2}]⟩ = 4⟨L_0⟩ + c/2 · … = 1/4 + 1/4 = 1/2 for c = 1/2.
        let v11 = space
            .vev(&ramond_virasoro(1, cutoff).commutator(&ramond_virasoro(-1, cutoff)))
            .unwrap();
        assert!((v11 - c(0.125, 0.0)).norm() < 1e-12, "⟨[L_1,L_{{-1}}]⟩ = {v11}");
        let v22 = space
            .vev(&ramond_virasoro(2, cutoff).commutator(&ramond_virasoro(-2, cutoff)))
            .unwrap();
        assert!((v22 - c(0.5, 0.0)).norm() < 1e-12, "⟨[L_2,L_{{-2}}]⟩ = {v22}");
        // Operator form on a window: [L_1, L_{−1}] = 2 L_0.
        let expected = ramond_virasoro(0, cutoff).scale(c(2.0, 0.0));
        let window = space.window_masks(HalfInt::from_int(cutoff) - HalfInt::ONE);
        let dev = max_commutator_deviation(
            &space,
            &ramond_virasoro(1, cutoff),
            &ramond_virasoro(-1, cutoff),
            &expected,
            &window,
        )
        .unwrap();
        assert!(dev < 1e-12, "Ramond [L_1, L_{{−1}}] = 2L_0: {dev:.2e}");
    }

    #[test]
    fn twisted_sugawara_is_half_the_ramond_virasoro() {
        // Ordered parts: Sug^tw_m = (1/2) L^R_{2m} − (1/32) δ_{m,0} — the
        // δ-term removes the 1/16 ground constant carried by L^R_0, leaving
        // the two mode-ordered operators equal on a safe window.
        let cutoff = 9i64;
        let space = FockSpace::ramond(cutoff).unwrap();
        let window = space.window_masks(h(5));
        for m in -1..=1i64 {
            let sug = twisted_sugawara(m, cutoff).unwrap();
            let mut rhs = ramond_virasoro(2 * m, cutoff).scale(c(0.5, 0.0));
            if m == 0 {
                rhs = rhs.sub(&ModePolynomial::scalar(c(1.0 / 32.0, 0.0)));
            }
            for &mask in &window {
                let e = State::basis(mask);
                let a = space.apply_poly(&sug, &e).unwrap();
                let b = space.apply_poly(&rhs, &e).unwrap();
                let mut diff = a;
                diff.add_scaled(&b, -ONE);
                assert!(
                    diff.max_abs() < 1e-11,
                    "twisted Sugawara m={m}, mask {mask:b}: {:.2e}",
                    diff.max_abs()
                );
            }
        }
    }

    #[test]
    fn ramond_zero_point_constant_extraction() {
        // Ordered twisted Sugawara annihilates the ground state at every cutoff…
        for cutoff in [4i64, 6, 8] {
            let space = FockSpace::ramond(cutoff).unwrap();
            let ordered = twisted_sugawara(0, cutoff).unwrap();
            let v = space.vev(&ordered).unwrap();
            assert!(v.norm() < 1e-13, "ordered part at cutoff {cutoff}: {v}");
        }
        // …so the weight is the regularized lattice mismatch, which
        // extrapolates to 1/16.
        let (value, table) = ramond_l0_regularized_constant(&[0.8, 0.4, 0.2, 0.1, 0.05]);
        assert!(
            (value - 1.0 / 16.0).abs() < 1e-10,
            "extrapolated constant {value}"
        );
        // The raw table approaches from below (c(ε) = (1/16) sech²(ε/4)-shaped).
        for w in table.windows(2) {
            assert!(w[1].1 > w[0].1 && w[1].1 < 1.0 / 16.0 + 1e-12);
        }
    }

    #[test]
    fn casimir_difference_converges_to_the_mode_sum_limit() {
        let lambda = 0.35;
        let limit = casimir_difference_limit(lambda);
        let mut prev_err = f64::INFINITY;
        for cutoff in [3i64, 5, 7, 9] {
            let v = casimir_difference(lambda, cutoff).unwrap();
            let err = (v - limit).abs();
            assert!(
                err < prev_err,
                "error not shrinking at cutoff {cutoff}: {err:.3e} ≥ {prev_err:.3e}"
            );
            prev_err = err;
        }
        assert!(prev_err < 1e-4, "cutoff-9 value still {prev_err:.3e} from the limit");
    }

    #[test]
    fn energy_reach_reports_shifts() {
        assert_eq!(energy_reach(&embedded_current(2, h(15))), h(8)); // shift 2·2
        assert_eq!(energy_reach(&virasoro_real(-3, h(15))), h(6)); // shift 3
        assert_eq!(energy_reach(&ModePolynomial::scalar(ONE)), h(0));
    }
}
