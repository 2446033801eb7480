//! Isomorphism suite: the mode relabeling β between one real chiral fermion
//! and an n-component complex fermion family preserves the CAR and the
//! vacuum state.
//!
//! Three checks per family size:
//!
//! * `iso.modes.bijection.n*` — the affine relabeling m ↔ (k, ν) is a
//!   bijection between single-fermion modes and family labels.
//! * `iso.car.anticommutators.n*` — on the cutoff NS space, the β-images
//!   B_{k,ν} = β(φ⁽ᵏ⁾_ν) satisfy {B_{k,ν}, B_{l,μ}} = δ_{k+l,n+1} δ_{ν+μ,0}
//!   and β(φ*) = β(φ)†, entrywise.
//! * `iso.vacuum.correlators.n*` — expanding ψ̂(z) into the family fields
//!   turns single-fermion m-point vacuum correlators (a Pfaffian) into the
//!   matching family correlators, at random point tuples.

use chiral_car::fock::{FockSpace, State};
use chiral_car::halfint::{self, HalfInt};
use chiral_car::isomap::{beta_gen, field_inverse, mode_map, mode_map_inverse};
use chiral_car::numeric::{cr, max_abs_diff};
use chiral_car::poly::{Gen, ModePolynomial};
use chiral_car::wick::{npoint, Point};
use chiral_car::{C64, ONE};
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
    let cutoff = cfg.cutoff.unwrap_or(HalfInt::from_twice(11));
    let families: Vec<u32> = match cfg.n {
        Some(n) => vec![n],
        None => vec![2, 3],
    };
    for &n in &families {
        checks.push(run_check(
            &format!("iso.modes.bijection.n{n}"),
            "m ↦ (k, ν) with m = 1/2 − k + (ν + 1/2)n is a bijection (count of failures)",
            0.0,
            cfg.tol.unwrap_or(1e-9),
            || bijection_failures(n).map_err(|e| e.to_string()),
        ));
        checks.push(run_check(
            &format!("iso.car.anticommutators.n{n}"),
            "{β(φ⁽ᵏ⁾_ν), β(φ⁽ˡ⁾_μ)} = δ_{k+l,n+1} δ_{ν+μ,0} and β(φ*_ν) = β(φ_ν)† on the cutoff NS space",
            0.0,
            cfg.tol.unwrap_or(1e-13),
            || car_deviation(n, cutoff).map_err(|e| e.to_string()),
        ));
        let samples = cfg.samples.unwrap_or(200);
        let seed = cfg.seed.wrapping_add(1000 + n as u64);
        checks.push(run_check(
            &format!("iso.vacuum.correlators.n{n}"),
            "⟨ψ̂(z_1)…ψ̂(z_m)⟩ = Σ Π_i c_{k_i}(z_i) ⟨φ^(k_1)(z_1ⁿ)…φ^(k_m)(z_mⁿ)⟩ (Pfaffians, max relative error)",
            0.0,
            cfg.tol.unwrap_or(1e-9),
            move || vacuum_correlator_deviation(n, samples, seed).map_err(|e| e.to_string()),
        ));
        if n > 3 {
            notes.push(format!(
                "iso: family size n = {n} samples 2- and 4-point functions only \
                 (the 6-point expansion has n^6 terms)"
            ));
        }
    }
    Ok(())
}

/// Counts modes where the label map fails to round-trip or leaves the label
/// range, over a window much wider than any cutoff in use.
fn bijection_failures(n: u32) -> Result<f64, chiral_car::Error> {
    let mut bad = 0u64;
    for m in halfint::ns_indices(HalfInt::from_twice(81)) {
        let (k, nu) = mode_map_inverse(n, m)?;
        if !(1..=n).contains(&k) || !nu.is_half_odd() || mode_map(n, k, nu)? != m {
            bad += 1;
        }
    }
    Ok(bad as f64)
}

/// Max deviation over all pairs of β-image modes from the family CAR, plus
/// the adjoint consistency of the representation, on the full cutoff space.
fn car_deviation(n: u32, cutoff: HalfInt) -> Result<f64, chiral_car::Error> {
    let space = FockSpace::real_ns(cutoff)?;
    let masks = space.basis_masks();
    // Label every single-fermion mode by its family pair and confirm β sends
    // the family generator exactly there.
    let mut labeled: Vec<(u32, HalfInt, HalfInt)> = Vec::new();
    for m in halfint::ns_indices(cutoff) {
        let (k, nu) = mode_map_inverse(n, m)?;
        let image = beta_gen(&Gen::MultiPhi { n, k, nu })?;
        if image != Gen::Psi(m) {
            return Err(chiral_car::Error::Domain(format!(
                "β(φ^({k})_{nu}) landed on {image:?}, expected ψ_{m}"
            )));
        }
        labeled.push((k, nu, m));
    }
    let mut worst = 0.0f64;
    // CAR pattern of the images, as operators on every basis state.
    for (i, &(ki, nui, mi)) in labeled.iter().enumerate() {
        for &(kj, nuj, mj) in &labeled[i..] {
            let a = ModePolynomial::gen(Gen::Psi(mi));
            let b = ModePolynomial::gen(Gen::Psi(mj));
            let anti = a.anticommutator(&b);
            let delta = if ki + kj == n + 1 && nui + nuj == HalfInt::ZERO {
                1.0
            } else {
                0.0
            };
            for &mask in &masks {
                let e = State::basis(mask);
                let mut lhs = space.apply_poly(&anti, &e)?;
                lhs.add_scaled(&e, cr(-delta));
                worst = worst.max(lhs.max_abs());
            }
        }
    }
    // Adjoint consistency: the matrix of ψ_{−m} is the conjugate transpose of
    // the matrix of ψ_m (so β(φ*) = β(φ)† holds in the representation).
    for &(_, _, m) in &labeled {
        let p = space.matrix_in_basis(&ModePolynomial::gen(Gen::Psi(m)), &masks)?;
        let q = space.matrix_in_basis(&ModePolynomial::gen(Gen::Psi(-m)), &masks)?;
        worst = worst.max(max_abs_diff(&p.adjoint(), &q));
    }
    Ok(worst)
}

/// Max relative error between single-fermion m-point functions and their
/// family-side expansions over random point tuples. Sizes cycle 2, 4, 6
/// (2, 4 for n > 3, where the 6-point expansion has n^6 terms).
fn vacuum_correlator_deviation(
    n: u32,
    samples: usize,
    seed: u64,
) -> Result<f64, chiral_car::Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sizes: &[usize] = if n <= 3 { &[2, 4, 6] } else { &[2, 4] };
    let mut worst = 0.0f64;
    let mut done = 0usize;
    let mut attempts = 0usize;
    while done < samples {
        attempts += 1;
        if attempts > samples * 100 {
            return Err(chiral_car::Error::NoConvergence {
                what: "well-separated correlator points".into(),
                residual: done as f64,
                tol: samples as f64,
            });
        }
        let m = sizes[done % sizes.len()];
        // Distinct moduli keep both the z's and the w = z^n images apart.
        let mut radii: Vec<f64> = (0..m).map(|_| rng.gen_range(0.6..1.8)).collect();
        radii.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let angles: Vec<f64> = (0..m)
            .map(|_| rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI))
            .collect();
        if radii.windows(2).any(|w| w[0] - w[1] < 0.04) {
            continue;
        }
        let zs: Vec<C64> = radii
            .iter()
            .zip(&angles)
            .map(|(&r, &th)| C64::from_polar(r, th))
            .collect();
        let lhs = npoint(&zs.iter().map(|&z| Point::psi(z)).collect::<Vec<_>>())?;
        if lhs.norm() < 1e-8 {
            continue;
        }
        // Expand each ψ̂(z_i) into the n family fields and sum over the n^m
        // component assignments; each term is a family Pfaffian.
        let expansions: Vec<Vec<(C64, u32, C64)>> =
            zs.iter().map(|&z| field_inverse(n, z)).collect();
        let mut rhs = C64::new(0.0, 0.0);
        let total = (n as usize).pow(m as u32);
        let mut pts: Vec<Point> = Vec::with_capacity(m);
        for assignment in 0..total {
            let mut idx = assignment;
            let mut coeff = ONE;
            pts.clear();
            for exp in &expansions {
                let (c, k, w) = exp[idx % n as usize];
                idx /= n as usize;
                coeff *= c;
                pts.push(Point::multi_phi(n as usize, k as usize, w));
            }
            rhs += coeff * npoint(&pts)?;
        }
        worst = worst.max((lhs - rhs).norm() / lhs.norm());
        done += 1;
    }
    Ok(worst)
}
