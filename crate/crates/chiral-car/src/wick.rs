//! Quasi-free n-point functions via explicit kernels and Pfaffians.
//!
//! This module is the *independent oracle* the Fock-space computations are
//! checked against: it never touches mode operators. A quasi-free state is
//! determined by its two-point function, and the n-point functions follow by
//! Wick's theorem,
//!
//! ```text
//! ω(F₁ ⋯ F₂ₙ) = Pf(A),   A_ab = ω(F_a F_b)  (a < b),  odd counts ↦ 0,
//! ```
//!
//! with the Pfaffian computed two unrelated ways (recursive expansion for
//! small matrices, Parlett–Reid elimination beyond) that cross-check each
//! other and det = Pf².
//!
//! Kernels (z, w points; roots are per-point principal):
//!
//! * real NS fermion, vacuum:            ω(ψ̂(z) ψ̂(w)) = 1/(z − w);
//! * n-component complex NS fermions:    ω(φ̂⁽ᵏ⁾(z) φ̂⁽ˡ⁾(w)) = δ_{k+l,n+1}/(z − w);
//! * real fermion, Ramond ground state:  ω_R(ψ̂(z) ψ̂(w)) = (z + w)/(2 √z √w (z − w));
//! * twisted (antiperiodic) current:     ω_t(ĵ(z) ĵ(w)) = (z + w)/(2 √z √w (z − w)²).
//!
//! Products at coinciding radius are distributions; state evaluations here use
//! the radial prescription: callers pass points with strictly decreasing
//! moduli (|z₁| > |z₂| > …, e.g. z_a = λ^a u_a with unimodular u_a and
//! 0 < λ < 1), where every kernel formula is an honest convergent mode sum.

use nalgebra::DMatrix;

use crate::{C64, Error, ONE, ZERO};

/// Which field a correlation point carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    /// Single real NS fermion ψ̂(z).
    Psi,
    /// Component k ∈ {1..n} of the n-family of complex NS fermions φ̂⁽ᵏ⁾(z).
    /// For n = 2: k = 1 is φ̂, k = 2 is φ̂*.
    Phi { n: usize, k: usize },
    /// Real fermion ψ̂(z) evaluated in the periodic (Ramond) sector.
    RamondPsi,
    /// Embedded current in the periodic sector (antiperiodic, half-odd modes).
    TwistedCurrent,
}

impl Field {
    /// φ̂ of the two-component family.
    pub fn phi() -> Self {
        Field::Phi { n: 2, k: 1 }
    }

    /// φ̂* of the two-component family.
    pub fn phi_star() -> Self {
        Field::Phi { n: 2, k: 2 }
    }

    pub fn is_fermionic(&self) -> bool {
        !matches!(self, Field::TwistedCurrent)
    }
}

/// A field evaluated at a complex point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub field: Field,
    pub z: C64,
}

impl Point {
    pub fn new(field: Field, z: C64) -> Self {
        Point { field, z }
    }
    pub fn psi(z: C64) -> Self {
        Point::new(Field::Psi, z)
    }
    pub fn phi(z: C64) -> Self {
        Point::new(Field::phi(), z)
    }
    pub fn phi_star(z: C64) -> Self {
        Point::new(Field::phi_star(), z)
    }
    pub fn multi_phi(n: usize, k: usize, z: C64) -> Self {
        Point::new(Field::Phi { n, k }, z)
    }
    pub fn ramond_psi(z: C64) -> Self {
        Point::new(Field::RamondPsi, z)
    }
    pub fn twisted_current(z: C64) -> Self {
        Point::new(Field::TwistedCurrent, z)
    }
}

/// Two-point function of the relevant quasi-free state.
///
/// The formulas are the closed forms of the mode sums, valid (as state
/// evaluations) for |a.z| > |b.z|; as written they are the analytic
/// continuations, antisymmetric under swapping the two points.
pub fn two_point(a: &Point, b: &Point) -> Result<C64, Error> {
    let (z, w) = (a.z, b.z);
    match (a.field, b.field) {
        (Field::Psi, Field::Psi) => Ok(ONE / (z - w)),
        (Field::Phi { n, k }, Field::Phi { n: n2, k: l }) => {
            if n != n2 {
                return Err(Error::Dimension(format!(
                    "two_point across different families: n = {n} vs {n2}"
                )));
            }
            if k == 0 || k > n || l == 0 || l > n {
                return Err(Error::Dimension(format!(
                    "component out of range: k = {k}, l = {l}, n = {n}"
                )));
            }
            if k + l == n + 1 {
                Ok(ONE / (z - w))
            } else {
                Ok(ZERO)
            }
        }
        (Field::RamondPsi, Field::RamondPsi) => {
            Ok((z + w) / (2.0 * z.sqrt() * w.sqrt() * (z - w)))
        }
        (Field::TwistedCurrent, Field::TwistedCurrent) => {
            let d = z - w;
            Ok((z + w) / (2.0 * z.sqrt() * w.sqrt() * d * d))
        }
        (fa, fb) => Err(Error::Dimension(format!(
            "no two-point function between {fa:?} and {fb:?}"
        ))),
    }
}

/// Quasi-free n-point function of fermionic fields: Pf of the pair matrix.
///
/// Odd numbers of fermions give 0. The bosonic `TwistedCurrent` is quadratic
/// in fermions, so its higher correlators are not Pfaffians of the current
/// two-point function; only 0-, 1-, and 2-point evaluations are offered.
pub fn npoint(points: &[Point]) -> Result<C64, Error> {
    let m = points.len();
    if points.iter().any(|p| !p.field.is_fermionic()) {
        return match m {
            0 => Ok(ONE),
            1 => Ok(ZERO),
            2 => two_point(&points[0], &points[1]),
            _ => Err(Error::Dimension(
                "current correlators beyond two points are not quasi-free Pfaffians".into(),
            )),
        };
    }
    if m % 2 == 1 {
        return Ok(ZERO);
    }
    if m == 0 {
        return Ok(ONE);
    }
    let mut a = DMatrix::<C64>::zeros(m, m);
    for i in 0..m {
        for j in (i + 1)..m {
            let k = two_point(&points[i], &points[j])?;
            a[(i, j)] = k;
            a[(j, i)] = -k;
        }
    }
    Ok(pfaffian(&a))
}

/// ω(:F₁F₂: :F₃F₄:) for normal-ordered fermion pairs in a quasi-free state:
/// the double contraction −⟨F₁F₃⟩⟨F₂F₄⟩ + ⟨F₁F₄⟩⟨F₂F₃⟩. Normal ordering of
/// each pair removes exactly the within-pair contraction ⟨F₁F₂⟩⟨F₃F₄⟩.
pub fn two_pair_normal_ordered(
    f1: &Point,
    f2: &Point,
    f3: &Point,
    f4: &Point,
) -> Result<C64, Error> {
    Ok(-two_point(f1, f3)? * two_point(f2, f4)? + two_point(f1, f4)? * two_point(f2, f3)?)
}

/// Pfaffian of an antisymmetric complex matrix.
///
/// Dispatches to the recursive expansion for small matrices and Parlett–Reid
/// elimination beyond; the two agree (tested) and Pf² = det.
pub fn pfaffian(a: &DMatrix<C64>) -> C64 {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "pfaffian needs a square matrix");
    let scale = a.iter().map(|x| x.norm()).fold(0.0, f64::max);
    if scale > 0.0 {
        let defect = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| (a[(i, j)] + a[(j, i)]).norm())
            .fold(0.0, f64::max);
        assert!(
            defect <= 1e-10 * scale,
            "pfaffian input is not antisymmetric (defect {defect:.3e}, scale {scale:.3e})"
        );
    }
    if n % 2 == 1 {
        return ZERO;
    }
    if n <= 12 {
        pfaffian_recursive(a)
    } else {
        pfaffian_parlett_reid(a)
    }
}

/// Pfaffian by expansion along the first row:
/// Pf(A) = Σ_{j>1} (−1)^j a_{1j} Pf(A with rows/cols 1, j removed).
pub fn pfaffian_recursive(a: &DMatrix<C64>) -> C64 {
    let n = a.nrows();
    if n == 0 {
        return ONE;
    }
    if n % 2 == 1 {
        return ZERO;
    }
    if n == 2 {
        return a[(0, 1)];
    }
    let mut acc = ZERO;
    for j in 1..n {
        if a[(0, j)] == ZERO {
            continue;
        }
        let keep: Vec<usize> = (0..n).filter(|&r| r != 0 && r != j).collect();
        let minor = DMatrix::from_fn(n - 2, n - 2, |r, c| a[(keep[r], keep[c])]);
        let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
        acc += sign * a[(0, j)] * pfaffian_recursive(&minor);
    }
    acc
}

/// Pfaffian via Parlett–Reid skew-symmetric elimination with partial
/// pivoting: reduce to skew tridiagonal form by congruence with unit
/// lower-triangular Gauss transforms (det 1) and row/column swaps (each
/// flipping the sign); the Pfaffian is the product of the pivots.
pub fn pfaffian_parlett_reid(a: &DMatrix<C64>) -> C64 {
    let n = a.nrows();
    if n % 2 == 1 {
        return ZERO;
    }
    if n == 0 {
        return ONE;
    }
    let mut a = a.clone();
    let mut pf = ONE;
    let mut k = 0;
    while k + 1 < n {
        // Pivot: the largest entry in column k below the diagonal.
        let (kp, _) = (k + 1..n)
            .map(|i| (i, a[(i, k)].norm()))
            .max_by(|x, y| x.1.partial_cmp(&y.1).unwrap())
            .unwrap();
        if a[(kp, k)] == ZERO {
            return ZERO;
        }
        if kp != k + 1 {
            a.swap_rows(kp, k + 1);
            a.swap_columns(kp, k + 1);
            pf = -pf;
        }
        pf *= a[(k, k + 1)];
        if k + 2 < n {
            let pivot = a[(k + 1, k)];
            let tau: Vec<C64> = (k + 2..n).map(|i| a[(i, k)] / pivot).collect();
            let v: Vec<C64> = (k + 2..n).map(|i| a[(i, k + 1)]).collect();
            for (ii, i) in (k + 2..n).enumerate() {
                for (jj, j) in (k + 2..n).enumerate() {
                    a[(i, j)] += tau[ii] * v[jj] - v[ii] * tau[jj];
                }
            }
        }
        k += 2;
    }
    pf
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::{Rng as _, SeedableRng as _};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn pfaffian_four_by_four_frozen() {
        // Pf = a12 a34 − a13 a24 + a14 a23 = 6 − 10 + 12 = 8.
        let mut a = DMatrix::<C64>::zeros(4, 4);
        let vals = [
            (0, 1, 1.0),
            (0, 2, 2.0),
            (0, 3, 3.0),
            (1, 2, 4.0),
            (1, 3, 5.0),
            (2, 3, 6.0),
        ];
        for &(i, j, v) in &vals {
            a[(i, j)] = c(v, 0.0);
            a[(j, i)] = c(-v, 0.0);
        }
        assert_abs_diff_eq!((pfaffian_recursive(&a) - c(8.0, 0.0)).norm(), 0.0, epsilon = 1e-13);
        assert_abs_diff_eq!(
            (pfaffian_parlett_reid(&a) - c(8.0, 0.0)).norm(),
            0.0,
            epsilon = 1e-13
        );
    }

    fn random_antisymmetric(n: usize, seed: u64) -> DMatrix<C64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut a = DMatrix::<C64>::zeros(n, n);
        for i in 0..n {
            for j in (i + 1)..n {
                let v = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                a[(i, j)] = v;
                a[(j, i)] = -v;
            }
        }
        a
    }

    #[test]
    fn pfaffian_methods_agree_and_square_to_det() {
        for n in [2usize, 4, 6, 8, 10, 14, 16] {
            let a = random_antisymmetric(n, 1000 + n as u64);
            let p1 = pfaffian_parlett_reid(&a);
            let det = a.clone().lu().determinant();
            assert!(
                (p1 * p1 - det).norm() < 1e-9 * (1.0 + det.norm()),
                "dim {n}: Pf² = {:?} vs det = {det:?}",
                p1 * p1
            );
            if n <= 10 {
                let p2 = pfaffian_recursive(&a);
                assert!((p1 - p2).norm() < 1e-10 * (1.0 + p1.norm()), "dim {n}");
            }
        }
    }

    #[test]
    fn pfaffian_odd_dimension_is_zero() {
        let a = random_antisymmetric(5, 7);
        assert_eq!(pfaffian(&a), ZERO);
    }

    #[test]
    fn four_point_psi_matches_hand_expansion() {
        let zs = [c(1.9, 0.3), c(0.2, -1.1), c(-0.8, 0.5), c(0.1, 0.2)];
        let pts: Vec<Point> = zs.iter().map(|&z| Point::psi(z)).collect();
        let got = npoint(&pts).unwrap();
        let k = |i: usize, j: usize| ONE / (zs[i] - zs[j]);
        let expect = k(0, 1) * k(2, 3) - k(0, 2) * k(1, 3) + k(0, 3) * k(1, 2);
        assert_abs_diff_eq!((got - expect).norm(), 0.0, epsilon = 1e-13);
    }

    #[test]
    fn phi_kernel_enforces_component_pairing() {
        let z = c(1.5, 0.0);
        let w = c(0.3, 0.4);
        // n = 2: only φ-φ* pairs contract.
        assert_eq!(two_point(&Point::phi(z), &Point::phi(w)).unwrap(), ZERO);
        let k = two_point(&Point::phi(z), &Point::phi_star(w)).unwrap();
        assert_abs_diff_eq!((k - ONE / (z - w)).norm(), 0.0, epsilon = 1e-15);
        // n = 3: pairing is k + l = 4.
        assert_eq!(
            two_point(&Point::multi_phi(3, 1, z), &Point::multi_phi(3, 2, w)).unwrap(),
            ZERO
        );
        let k13 = two_point(&Point::multi_phi(3, 1, z), &Point::multi_phi(3, 3, w)).unwrap();
        assert_abs_diff_eq!((k13 - ONE / (z - w)).norm(), 0.0, epsilon = 1e-15);
        assert!(two_point(&Point::multi_phi(3, 1, z), &Point::multi_phi(2, 2, w)).is_err());
    }

    #[test]
    fn ramond_kernel_equals_mode_sum() {
        // ω_R(ψ̂(z)ψ̂(w)) = z^{-1/2} w^{-1/2} [ Σ_{n>0} (w/z)^n + 1/2 ].
        let z = c(0.0, 1.0) * 1.3; // off the positive axis to exercise the branch
        let w = c(0.6, -0.3);
        let mut s = c(0.5, 0.0);
        let r = w / z;
        let mut p = ONE;
        for _ in 0..220 {
            p *= r;
            s += p;
        }
        let mode_sum = s / (z.sqrt() * w.sqrt());
        let kernel = two_point(&Point::ramond_psi(z), &Point::ramond_psi(w)).unwrap();
        assert!((mode_sum - kernel).norm() < 1e-13);
    }

    #[test]
    fn twisted_current_kernel_equals_mode_sum() {
        // ω_t(ĵ(z)ĵ(w)) = Σ_{r∈ℕ+1/2} r z^{−r−1} w^{r−1}. Splitting off the
        // per-point √'s leaves only integer powers of x = w/z:
        //   = (√z √w / (z² w)) Σ_{k≥0} (k + 1/2) x^k.
        let z = c(1.1, 0.4);
        let w = c(0.35, -0.2);
        let x = w / z;
        let mut s = ZERO;
        let mut xk = ONE;
        for k in 0..400 {
            s += c(k as f64 + 0.5, 0.0) * xk;
            xk *= x;
        }
        let mode_sum = z.sqrt() * w.sqrt() / (z * z * w) * s;
        let kernel = two_point(&Point::twisted_current(z), &Point::twisted_current(w)).unwrap();
        assert!((mode_sum - kernel).norm() < 1e-12, "{mode_sum} vs {kernel}");
    }

    #[test]
    fn current_two_point_by_pair_normal_ordering() {
        // j = :φ*φ: has ω(j(z)j(w)) = 1/(z−w)².
        let z = c(1.4, 0.2);
        let w = c(0.5, -0.6);
        let got = two_pair_normal_ordered(
            &Point::phi_star(z),
            &Point::phi(z),
            &Point::phi_star(w),
            &Point::phi(w),
        )
        .unwrap();
        let d = z - w;
        assert_abs_diff_eq!((got - ONE / (d * d)).norm(), 0.0, epsilon = 1e-13);
    }

    #[test]
    fn odd_fermion_counts_vanish_and_current_rejects_higher() {
        let pts = vec![
            Point::psi(c(1.0, 0.2)),
            Point::psi(c(0.4, 0.0)),
            Point::psi(c(0.1, -0.1)),
        ];
        assert_eq!(npoint(&pts).unwrap(), ZERO);
        let cur = vec![
            Point::twisted_current(c(1.0, 0.0)),
            Point::twisted_current(c(0.5, 0.0)),
            Point::twisted_current(c(0.2, 0.0)),
        ];
        assert!(npoint(&cur).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn pfaffian_squares_to_determinant(seed in 0u64..500, half in 1usize..5) {
            let a = random_antisymmetric(2 * half, seed);
            let p = pfaffian(&a);
            let det = a.clone().lu().determinant();
            prop_assert!((p * p - det).norm() < 1e-9 * (1.0 + det.norm()));
        }

        #[test]
        fn pfaffian_swap_flips_sign(seed in 0u64..500) {
            let a = random_antisymmetric(6, seed);
            let mut b = a.clone();
            b.swap_rows(1, 4);
            b.swap_columns(1, 4);
            let pa = pfaffian(&a);
            let pb = pfaffian(&b);
            prop_assert!((pa + pb).norm() < 1e-10 * (1.0 + pa.norm()));
        }

        #[test]
        fn psi_two_point_antisymmetric(re1 in -1.0f64..1.0, im1 in -1.0f64..1.0,
                                       re2 in -1.0f64..1.0, im2 in -1.0f64..1.0) {
            let z = c(re1 + 2.0, im1);
            let w = c(re2, im2);
            let k1 = two_point(&Point::psi(z), &Point::psi(w)).unwrap();
            let k2 = two_point(&Point::psi(w), &Point::psi(z)).unwrap();
            prop_assert!((k1 + k2).norm() < 1e-12 * k1.norm().max(1.0));
        }
    }
}
