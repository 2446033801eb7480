//! Symmetry suite: the current algebra, the Virasoro central terms, the
//! mode-level transport of the c = 1 stress tensor through β, and the gauge
//! rotation generated by the embedded charge.
//!
//! All operators are exact compressions onto a cutoff Fock space, so each
//! identity is checked either coefficient-wise (where it holds term by term)
//! or on a safe window of states — total energy low enough that no truncated
//! mode sum is clipped.

use std::f64::consts::FRAC_PI_2;

use chiral_car::fock::{FockSpace, State};
use chiral_car::halfint::{self, HalfInt};
use chiral_car::isomap::beta;
use chiral_car::numeric::cr;
use chiral_car::poly::{Gen, ModePolynomial};
use chiral_car::symgen::{
    canonical_quadratic, complex_current, embedded_current, max_commutator_deviation, sugawara,
    transported_virasoro, virasoro_complex, virasoro_real,
};
use chiral_car::{C64, I};
use rand::Rng as _;
use rand::SeedableRng as _;
use rand_chacha::ChaCha8Rng;

use crate::config::SuiteConfig;
use crate::report::{run_check, CheckRecord};

pub fn run(
    cfg: &SuiteConfig,
    checks: &mut Vec<CheckRecord>,
    notes: &mut Vec<String>,
) -> Result<(), String> {
    let cutoff = cfg.cutoff.unwrap_or(HalfInt::from_twice(15));
    let gauge_cutoff = cfg.cutoff.unwrap_or(HalfInt::from_twice(19));
    let seed = cfg.seed.wrapping_add(3000);

    checks.push(run_check(
        "sym.current.ccr",
        "[β(j_m), β(j_n)] = m δ_{m+n,0} for m, n ∈ {−2..2} on the safe window",
        0.0,
        cfg.tol.unwrap_or(1e-10),
        || current_ccr_deviation(cutoff),
    ));
    checks.push(run_check(
        "sym.virasoro.central.c12",
        "⟨Ω, [L_2, L_{−2}] Ω⟩ = 1/4 for the real-fermion Virasoro (c = 1/2)",
        0.25,
        cfg.tol.unwrap_or(1e-9),
        || {
            let space = FockSpace::real_ns(cutoff).map_err(|e| e.to_string())?;
            let v = commutator_vev(
                &space,
                &virasoro_real(2, cutoff),
                &virasoro_real(-2, cutoff),
            )?;
            real_part(v, "⟨[L_2, L_{−2}]⟩ (c = 1/2)")
        },
    ));
    checks.push(run_check(
        "sym.virasoro.central.c1",
        "⟨Ω, [L_2, L_{−2}] Ω⟩ = 1/2 for the complex-family Virasoro (c = 1)",
        0.5,
        cfg.tol.unwrap_or(1e-9),
        || {
            let fam_cutoff = HalfInt::from_twice(11);
            let space = FockSpace::multi_ns(2, fam_cutoff).map_err(|e| e.to_string())?;
            let v = commutator_vev(
                &space,
                &virasoro_complex(2, fam_cutoff),
                &virasoro_complex(-2, fam_cutoff),
            )?;
            real_part(v, "⟨[L_2, L_{−2}]⟩ (c = 1)")
        },
    ));
    checks.push(run_check(
        "sym.virasoro.central.sugawara",
        "⟨Ω, [L^cur_2, L^cur_{−2}] Ω⟩ = 1/2 for the current-quadratic Virasoro",
        0.5,
        cfg.tol.unwrap_or(1e-9),
        || {
            let fam_cutoff = HalfInt::from_twice(13);
            let space = FockSpace::multi_ns(2, fam_cutoff).map_err(|e| e.to_string())?;
            let v = commutator_vev(
                &space,
                &sugawara(2, 6, fam_cutoff),
                &sugawara(-2, 6, fam_cutoff),
            )?;
            real_part(v, "⟨[L^cur_2, L^cur_{−2}]⟩")
        },
    ));
    checks.push(run_check(
        "sym.virasoro.central.embedded",
        "⟨Ω, [β(L_2), β(L_{−2})] Ω⟩ = 1/2 for the transported c = 1 Virasoro",
        0.5,
        cfg.tol.unwrap_or(1e-9),
        || {
            let space = FockSpace::real_ns(cutoff).map_err(|e| e.to_string())?;
            let v = commutator_vev(
                &space,
                &transported_virasoro(2, cutoff),
                &transported_virasoro(-2, cutoff),
            )?;
            real_part(v, "⟨[β(L_2), β(L_{−2})]⟩")
        },
    ));
    checks.push(run_check(
        "sym.transport.modes",
        "β(L^{c=1}_m) + (1/4) β(j_m) − (1/2) L^{c=1/2}_{2m} = 0 on the safe window, m ∈ {−2..2}",
        0.0,
        cfg.tol.unwrap_or(1e-10),
        || transport_deviation(cutoff),
    ));
    checks.push(run_check(
        "sym.transport.rho14",
        "β(L^{c=1}_m + (1/4) j_m + (1/32) δ_{m,0}) = (1/2) L^{c=1/2}_{2m} + (1/32) δ_{m,0}, term by term",
        0.0,
        cfg.tol.unwrap_or(1e-10),
        || quarter_shift_deviation(cutoff),
    ));
    checks.push(run_check(
        "sym.gauge.finite",
        "Ad(exp(i(π/2) β(j_0))) ψ̂(z) = −i ψ̂(−z) (upper-branch phases) on the cutoff space",
        0.0,
        cfg.tol.unwrap_or(1e-6),
        || gauge_finite_deviation(gauge_cutoff, seed),
    ));
    checks.push(run_check(
        "sym.gauge.infinitesimal",
        "[β(j_0), ψ_m] = −(−1)^{m+1/2} ψ_m for |m| ≤ 5/2",
        0.0,
        cfg.tol.unwrap_or(1e-9),
        || gauge_infinitesimal_deviation(cutoff),
    ));
    notes.push(format!(
        "symmetries: Fock cutoff {cutoff}; finite gauge rotation at cutoff {gauge_cutoff}"
    ));
    Ok(())
}

/// ⟨Ω, [a, b] Ω⟩ through state pipelines (no operator products are formed).
fn commutator_vev(
    space: &FockSpace,
    a: &ModePolynomial,
    b: &ModePolynomial,
) -> Result<C64, String> {
    let om = space.vacuum();
    let ab = space
        .apply_poly(a, &space.apply_poly(b, &om).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let ba = space
        .apply_poly(b, &space.apply_poly(a, &om).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    Ok(ab.amp(0) - ba.amp(0))
}

fn real_part(v: C64, what: &str) -> Result<f64, String> {
    if v.im.abs() > 1e-10 {
        return Err(format!("{what} is not real: {v}"));
    }
    Ok(v.re)
}

fn current_ccr_deviation(cutoff: HalfInt) -> Result<f64, String> {
    let space = FockSpace::real_ns(cutoff).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for m in -2..=2i64 {
        for n in -2..=2i64 {
            let jm = embedded_current(m, cutoff);
            let jn = embedded_current(n, cutoff);
            let expected = if m + n == 0 {
                ModePolynomial::scalar(cr(m as f64))
            } else {
                ModePolynomial::zero()
            };
            let reach = HalfInt::from_int(2 * m.abs().max(n.abs()));
            let window = space.window_masks(cutoff - reach);
            if window.len() < 2 {
                return Err(format!(
                    "cutoff {cutoff} leaves no safe window for [j_{m}, j_{n}]"
                ));
            }
            let dev = max_commutator_deviation(&space, &jm, &jn, &expected, &window)
                .map_err(|e| e.to_string())?;
            worst = worst.max(dev);
        }
    }
    Ok(worst)
}

fn transport_deviation(cutoff: HalfInt) -> Result<f64, String> {
    let space = FockSpace::real_ns(cutoff).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for m in -2..=2i64 {
        // β(L^{c=1}_m) from a deep family truncation, clipped to the cutoff;
        // the transported form is −(1/4) β(j_m) + (1/2) L^{c=1/2}_{2m}.
        let image = beta(&virasoro_complex(m, HalfInt::from_twice(41)), Some(cutoff))
            .map_err(|e| e.to_string())?;
        let native = transported_virasoro(m, cutoff);
        let diff = image.sub(&native);
        let window = space.window_masks(cutoff - HalfInt::from_int(2 * m.abs()));
        for &mask in &window {
            let e = State::basis(mask);
            let r = space.apply_poly(&diff, &e).map_err(|e| e.to_string())?;
            worst = worst.max(r.max_abs());
        }
    }
    Ok(worst)
}

fn quarter_shift_deviation(cutoff: HalfInt) -> Result<f64, String> {
    let mut worst = 0.0f64;
    for m in -2..=2i64 {
        let deep = HalfInt::from_twice(41);
        let mut shifted =
            virasoro_complex(m, deep).add(&complex_current(m, deep).scale(cr(0.25)));
        if m == 0 {
            shifted = shifted.add(&ModePolynomial::scalar(cr(1.0 / 32.0)));
        }
        let image = canonical_quadratic(&beta(&shifted, Some(cutoff)).map_err(|e| e.to_string())?);
        let mut rhs = virasoro_real(2 * m, cutoff).scale(cr(0.5));
        if m == 0 {
            rhs = rhs.add(&ModePolynomial::scalar(cr(1.0 / 32.0)));
        }
        worst = worst.max(image.sub(&rhs).max_coeff());
    }
    Ok(worst)
}

/// The truncated field ψ̂(z) = Σ_m z^{−m−1/2} ψ_m, or its image under the
/// gauge rotation at θ = π/2: −i Σ_m e^{−iπ(m+1/2)} z^{−m−1/2} ψ_m, which is
/// −i ψ̂(−z) read on the upper branch −z = e^{iπ} z. All exponents are
/// integers, so no branch cuts enter the coefficients.
fn field_poly(cutoff: HalfInt, z: C64, rotated: bool) -> ModePolynomial {
    let terms = halfint::ns_indices(cutoff)
        .into_iter()
        .map(|m| {
            let p = (m.twice() + 1) / 2; // m + 1/2 ∈ ℤ
            let mut coeff = z.powi(-p as i32);
            if rotated {
                let sign = if p.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                coeff *= cr(sign) * (-I);
            }
            (coeff, vec![Gen::Psi(m)])
        })
        .collect();
    ModePolynomial::from_terms(terms)
}

fn gauge_finite_deviation(cutoff: HalfInt, seed: u64) -> Result<f64, String> {
    let space = FockSpace::real_ns(cutoff).map_err(|e| e.to_string())?;
    let j0 = embedded_current(0, cutoff);
    let u = space
        .energy_preserving_exp(&j0.scale(C64::new(0.0, FRAC_PI_2)))
        .map_err(|e| e.to_string())?;
    let mut worst = u.unitarity_defect();
    // Random probe states on a shallow window, so the field action stays
    // inside the space.
    let window = space.window_masks(HalfInt::from_int(4));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let probes: Vec<State> = (0..6)
        .map(|_| {
            let mut st = State::zero();
            for &mask in &window {
                st.insert_add(
                    mask,
                    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                );
            }
            let nrm = st.norm();
            st.scale(cr(1.0 / nrm));
            st
        })
        .collect();
    let zs = [
        C64::from_polar(0.85, 0.6),
        C64::from_polar(1.2, -2.1),
        C64::from_polar(1.0, 2.9),
        C64::from_polar(0.95, -1.3),
    ];
    for &z in &zs {
        let field = field_poly(cutoff, z, false);
        let target = field_poly(cutoff, z, true);
        for e in &probes {
            let inner = space
                .apply_poly(&field, &u.apply_adjoint(e))
                .map_err(|e| e.to_string())?;
            let lhs = u.apply(&inner);
            let rhs = space.apply_poly(&target, e).map_err(|e| e.to_string())?;
            let mut diff = lhs;
            diff.add_scaled(&rhs, -chiral_car::ONE);
            worst = worst.max(diff.max_abs());
        }
    }
    Ok(worst)
}

fn gauge_infinitesimal_deviation(cutoff: HalfInt) -> Result<f64, String> {
    let space = FockSpace::real_ns(cutoff).map_err(|e| e.to_string())?;
    let j0 = embedded_current(0, cutoff);
    let mut worst = 0.0f64;
    for kt in [-5i64, -3, -1, 1, 3, 5] {
        let k = HalfInt::from_twice(kt);
        let psi_k = ModePolynomial::gen(Gen::Psi(k));
        let parity = k.ns_parity_sign().map_err(|e| e.to_string())? as f64;
        let expected = ModePolynomial::monomial(cr(-parity), vec![Gen::Psi(k)]);
        let window = space.window_masks(cutoff - k.abs());
        let dev = max_commutator_deviation(&space, &j0, &psi_k, &expected, &window)
            .map_err(|e| e.to_string())?;
        worst = worst.max(dev);
    }
    Ok(worst)
}
