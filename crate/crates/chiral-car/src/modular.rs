//! Vacuum modular data of the real chiral fermion on a union of disjoint
//! circle arcs: the flow coordinate X, its n preimages, the antisymmetric
//! mixing kernel K(X), the path-ordered orthogonal matrix O(X) with its
//! constant-kernel closed form on rotation-symmetric families, the modular
//! cocycle, and the mixed fields χ_k(X) that diagonalize the flow.
//!
//! **Geometry.** A family of n open arcs (u_k, v_k) ⊂ S¹ with pairwise
//! disjoint closures, none touching z = −1, is encoded by endpoint angles in
//! (−π, π). The flow coordinate is
//!
//! ```text
//! X(z) = −Π_k (x − a_k)/(x − b_k),    x = tan(θ/2), a_k = tan(θ_u/2), …
//! ```
//!
//! in the line coordinate of the Cayley transform. Inside an arc exactly one
//! linear factor is negative, so the bare product is negative there; the
//! global minus is what makes X map each arc monotonously onto ℝ₊ and each
//! complement component onto ℝ₋ (it also matches the closed form on
//! rotation-symmetric families, see [`ModularGeometry::uniformizer`]). Each
//! X > 0 therefore has exactly one preimage z_k(X) per arc.
//!
//! **Flow and mixing.** The dilation X ↦ e^{−2πt}X is the geometric part of
//! the vacuum modular flow of the fermion algebra on the arcs; the fields at
//! the n preimages mix through an orthogonal cocycle
//! O(t, X) = O(X)ᵀ O(e^{−2πt}X), where O(X) is the anti-path-ordered
//! exponential solving
//!
//! ```text
//! dO/dX = −(1/2π) O(X) K(X),   O(X₀) = 1,
//! K(X)_{kj} = 2π √(z'_k z'_j)/(z_k − z_j)  (k ≠ j),   K_{kk} = 0,
//! ```
//!
//! with z'_k = dz_k(X)/dX and per-factor principal square roots. K(X) is
//! exactly antisymmetric, and its entries are real up to the isolated branch
//! flips of the roots: √(z'_k) √(z'_j) = √(θ'_k θ'_j) e^{i(θ_k+θ_j+π)/2 }
//! (± per factor) against z_k − z_j = 2i sin((θ_k−θ_j)/2) e^{i(θ_k+θ_j)/2}.
//!
//! **Rotation-symmetric families** (the n-th roots of a single base arc,
//! z_k(X) = ω^k z(X), ω = e^{2πi/n}) have a constant kernel: with the sign
//! diagonal D_k = √(z'_k)/(ω^{k/2}√(z')) ∈ {±1} tracking principal branches,
//!
//! ```text
//! −(1/2π) K(X) dX = D K_c D · dz/z,    K_c,kj = −ω^{(k+j)/2}/(ω^k − ω^j),
//! ```
//!
//! so O(X) = D (z/z₀)^{K_c} D as long as the branch signs are constant along
//! the path. K_c has the integer-spaced spectrum (1−n)/2, …, (n−1)/2 and is
//! diagonalized by B_{kj} = ω^{(1/2−k)j}: B K_c = M B with
//! M = diag((n+1)/2 − k) and (1/√n) B unitary ([`diagonalizer`]).
//!
//! **Diagonal fields.** χ_k(X) = Σ_j O_{kj}(X) √(z'_j) ψ̂(z_j(X)) transform
//! under the flow as n independent half-density fields on ℝ₊,
//! σ_t(χ_k(X)) = e^{−πt} χ_k(e^{−2πt}X). On symmetric families the
//! B-combinations of the coherent-branch χ reproduce the images of the
//! n-component family fields under the mode-interleaving embedding, including
//! the reparametrization weight: Σ_j B_{kj} χ_j(X) = √(n W′(X)) ·
//! β(φ̂⁽ᵏ⁾(W)), W = zⁿ ([`ModularGeometry::chi_combos_coherent`]).

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::circle::unit;
use crate::numeric::{self, cr};
use crate::wick::{self, Point};
use crate::{C64, Error, I, ONE, ZERO};

/// n open arcs (u_k, v_k) on the unit circle, given by endpoint angles in
/// (−π, π), with pairwise disjoint closures. Keeping all angles inside the
/// open interval (−π, π) is exactly the condition that z = −1 stays exterior
/// to the closed family, so the Cayley line picture is bounded.
///
/// Arcs are kept in construction order (not sorted): for rotation-symmetric
/// families the k-th arc is the ω^k-rotate of the base root arc, which is the
/// labeling the diagonalizer B refers to.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalFamily {
    arcs: Vec<(f64, f64)>,
    /// For families built by [`IntervalFamily::symmetric`]: the endpoint
    /// angles (of the n-th power coordinate W = zⁿ) of the base arc.
    base: Option<(f64, f64)>,
}

fn validate_arcs(arcs: &[(f64, f64)]) -> Result<(), Error> {
    if arcs.is_empty() {
        return Err(Error::BadIntervals("need at least one arc".into()));
    }
    for &(u, v) in arcs {
        if !(u.is_finite() && v.is_finite() && -PI < u && u < v && v < PI) {
            return Err(Error::BadIntervals(format!(
                "arc ({u}, {v}) must satisfy -pi < u < v < pi so that z = -1 stays exterior"
            )));
        }
    }
    let mut sorted = arcs.to_vec();
    sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    for w in sorted.windows(2) {
        if w[0].1 >= w[1].0 {
            return Err(Error::BadIntervals(format!(
                "arcs ({}, {}) and ({}, {}) overlap or touch",
                w[0].0, w[0].1, w[1].0, w[1].1
            )));
        }
    }
    Ok(())
}

impl IntervalFamily {
    /// Family from explicit endpoint angles, validated.
    pub fn new(arcs: &[(f64, f64)]) -> Result<Self, Error> {
        validate_arcs(arcs)?;
        Ok(IntervalFamily { arcs: arcs.to_vec(), base: None })
    }

    /// The rotation-symmetric family whose arcs are the n-th roots of the
    /// base arc with endpoint angles `(base_u, base_v)` (angles of W = zⁿ;
    /// any real values with 0 < base_v − base_u < 2π).
    ///
    /// Arc k (k = 1..n) is the ω^k-rotate of the principal root arc, reduced
    /// to (−π, π). Fails if any root arc touches z = −1 — for odd n that
    /// means the base arc contains −1, for even n that it contains +1.
    pub fn symmetric(n: usize, base_u: f64, base_v: f64) -> Result<Self, Error> {
        if n == 0 {
            return Err(Error::BadIntervals("need at least one arc".into()));
        }
        if !(base_v - base_u > 0.0 && base_v - base_u < 2.0 * PI) {
            return Err(Error::BadIntervals(format!(
                "base arc ({base_u}, {base_v}) must have width strictly between 0 and 2pi"
            )));
        }
        let halfwidth = (base_v - base_u) / (2.0 * n as f64);
        let center = (base_u + base_v) / 2.0;
        let mut arcs = Vec::with_capacity(n);
        for k in 1..=n {
            let raw_mid = (center + 2.0 * PI * k as f64) / n as f64;
            let mid = raw_mid - 2.0 * PI * ((raw_mid + PI) / (2.0 * PI)).floor();
            arcs.push((mid - halfwidth, mid + halfwidth));
        }
        validate_arcs(&arcs)?;
        Ok(IntervalFamily { arcs, base: Some((base_u, base_v)) })
    }

    pub fn n(&self) -> usize {
        self.arcs.len()
    }

    /// Endpoint angles, in the arc labeling order.
    pub fn arcs(&self) -> &[(f64, f64)] {
        &self.arcs
    }

    pub fn is_symmetric(&self) -> bool {
        self.base.is_some()
    }

    /// Base-arc endpoint angles in the W = zⁿ coordinate, if rotation-symmetric.
    pub fn symmetric_base(&self) -> Option<(f64, f64)> {
        self.base
    }

    /// Whether the angle θ lies strictly inside arc k (0-based).
    pub fn contains_angle(&self, k: usize, theta: f64) -> bool {
        let (u, v) = self.arcs[k];
        u < theta && theta < v
    }
}

/// The n preimages of a flow-coordinate value X > 0, one per arc, with their
/// derivatives along the flow.
#[derive(Debug, Clone)]
pub struct Preimages {
    /// The flow-coordinate value these preimages belong to.
    pub x: f64,
    /// Line coordinates tan(θ_k/2), one per arc, in arc order.
    pub line: Vec<f64>,
    /// Angles θ_k ∈ (−π, π).
    pub theta: Vec<f64>,
    /// Circle points z_k = e^{iθ_k}.
    pub z: Vec<C64>,
    /// dz_k/dX.
    pub zprime: Vec<C64>,
    /// Principal square roots √(z'_k).
    pub sqrt_zprime: Vec<C64>,
}

/// An interval family together with the cached line-picture data the flow
/// evaluations need. Immutable after construction.
#[derive(Debug, Clone)]
pub struct ModularGeometry {
    family: IntervalFamily,
    /// Cayley images tan(θ/2) of the arc start points.
    a: Vec<f64>,
    /// Cayley images of the arc end points.
    b: Vec<f64>,
    /// Monic coefficients of Π(x − a_k), ascending.
    poly_a: Vec<f64>,
    /// Monic coefficients of Π(x − b_k), ascending.
    poly_b: Vec<f64>,
    /// Base point: the image of the midpoint of arc 1. O(X₀) = 1.
    x0: f64,
}

impl ModularGeometry {
    pub fn new(family: IntervalFamily) -> Result<Self, Error> {
        let a: Vec<f64> = family.arcs().iter().map(|&(u, _)| (u / 2.0).tan()).collect();
        let b: Vec<f64> = family.arcs().iter().map(|&(_, v)| (v / 2.0).tan()).collect();
        let poly_a = numeric::poly_from_roots(&a);
        let poly_b = numeric::poly_from_roots(&b);
        let (u1, v1) = family.arcs()[0];
        let mut geom = ModularGeometry { family, a, b, poly_a, poly_b, x0: 1.0 };
        geom.x0 = geom.uniformizer_angle((u1 + v1) / 2.0);
        if !(geom.x0 > 0.0 && geom.x0.is_finite()) {
            return Err(Error::BadIntervals(format!(
                "base point X0 = {} is not positive; interval data is inconsistent",
                geom.x0
            )));
        }
        Ok(geom)
    }

    pub fn family(&self) -> &IntervalFamily {
        &self.family
    }

    pub fn n(&self) -> usize {
        self.family.n()
    }

    /// The base point X₀ > 0 at which the path ordering starts, O(X₀) = 1:
    /// the image of the midpoint of arc 1. (On rotation-symmetric families
    /// every arc midpoint has the same image, so this is also the image of
    /// the base-arc midpoint.)
    pub fn x0(&self) -> f64 {
        self.x0
    }

    /// Flow coordinate at the circle point e^{iθ}, θ ∈ (−π, π), evaluated in
    /// the line picture: X = −Π (x − a_k)/(x − b_k), x = tan(θ/2).
    ///
    /// Positive inside the arcs, negative in the complement, with poles at
    /// the arc end points v_k (±∞ is returned there, not an error).
    pub fn uniformizer_angle(&self, theta: f64) -> f64 {
        self.uniformizer_line((theta / 2.0).tan())
    }

    /// Line-picture flow coordinate at x = tan(θ/2).
    pub fn uniformizer_line(&self, x: f64) -> f64 {
        let mut prod = -1.0;
        for (&ak, &bk) in self.a.iter().zip(&self.b) {
            prod *= (x - ak) / (x - bk);
        }
        prod
    }

    /// Flow coordinate as a product over circle points,
    /// X(z) = −Π (1+v_k)/(1+u_k) · Π (z−u_k)/(z−v_k).
    ///
    /// Identical (factor by factor, via the Cayley transform) to the line
    /// picture; real on the unit circle minus the end points, which is what
    /// tests assert. Errors at the poles z = v_k.
    pub fn uniformizer(&self, z: C64) -> Result<C64, Error> {
        let mut prod = -ONE;
        for &(uk, vk) in self.family.arcs() {
            let u = unit(uk);
            let v = unit(vk);
            if (z - v).norm() < 1e-12 {
                return Err(Error::Domain(format!("flow coordinate has a pole at z = {v}")));
            }
            prod *= (ONE + v) / (ONE + u) * ((z - u) / (z - v));
        }
        Ok(prod)
    }

    /// Logarithmic derivative Σ 1/(x−a_k) − 1/(x−b_k) of the line product,
    /// so that dX/dx = X(x) · (this).
    fn log_deriv_line(&self, x: f64) -> f64 {
        self.a
            .iter()
            .zip(&self.b)
            .map(|(&ak, &bk)| 1.0 / (x - ak) - 1.0 / (x - bk))
            .sum()
    }

    /// The n preimages of X > 0, one per arc, in arc order, with flow
    /// derivatives z'_k = dz_k/dX.
    ///
    /// Solved by clearing denominators into the monic degree-n polynomial
    /// [Π(x−a_k) + X Π(x−b_k)]/(1+X), taking companion-matrix eigenvalues
    /// with Newton polish, and assigning roots to arcs by containment; a
    /// mismatch (some arc without exactly one root) reports bad interval
    /// data. Derivatives come from the chain rule through the line picture:
    /// dz/dx = 2i/(1−ix)², dX/dx = X · Σ[1/(x−a_k) − 1/(x−b_k)].
    pub fn preimages(&self, x_val: f64) -> Result<Preimages, Error> {
        if !(x_val > 0.0 && x_val.is_finite()) {
            return Err(Error::Domain(format!(
                "preimages need a flow coordinate in (0, inf), got {x_val}"
            )));
        }
        let n = self.n();
        let scale = 1.0 + x_val;
        let coeffs: Vec<f64> = self
            .poly_a
            .iter()
            .zip(&self.poly_b)
            .map(|(&ca, &cb)| (ca + x_val * cb) / scale)
            .collect();
        let roots = numeric::real_roots_monic(&coeffs)?;
        // One root per arc, in arc order.
        let mut line = vec![f64::NAN; n];
        let mut used = vec![false; n];
        for &r in &roots {
            match (0..n).find(|&k| self.a[k] < r && r < self.b[k]) {
                Some(k) if !used[k] => {
                    used[k] = true;
                    line[k] = r;
                }
                _ => {
                    return Err(Error::BadIntervals(format!(
                        "preimage assignment failed at X = {x_val:.6e}: root {r:.6e} \
                         does not sit alone in an arc"
                    )));
                }
            }
        }
        let mut theta = Vec::with_capacity(n);
        let mut z = Vec::with_capacity(n);
        let mut zprime = Vec::with_capacity(n);
        let mut sqrt_zprime = Vec::with_capacity(n);
        for &xr in &line {
            let th = 2.0 * xr.atan();
            let zz = unit(th);
            let dzdx = (I * 2.0) / ((ONE - I * xr) * (ONE - I * xr));
            let dxdx = x_val * self.log_deriv_line(xr);
            let zp = dzdx / cr(dxdx);
            theta.push(th);
            z.push(zz);
            zprime.push(zp);
            sqrt_zprime.push(zp.sqrt());
        }
        Ok(Preimages { x: x_val, line, theta, z, zprime, sqrt_zprime })
    }

    /// Mixing kernel K(X): antisymmetric n×n with
    /// K_{kj} = 2π √(z'_k) √(z'_j)/(z_k − z_j) and zero diagonal.
    pub fn mixing_kernel(&self, x_val: f64) -> Result<DMatrix<C64>, Error> {
        Ok(mixing_kernel_at(&self.preimages(x_val)?))
    }

    /// Principal-branch signs D_k = √(z'_k)/(ω^{k/2} √(z'_n)) of a
    /// rotation-symmetric family at the given flow coordinate. Each is ±1
    /// because z'_k = ω^k z'_n exactly; a value away from ±1 reports a
    /// numerical breakdown.
    pub fn branch_signs(&self, x_val: f64) -> Result<Vec<f64>, Error> {
        self.branch_signs_from(&self.preimages(x_val)?)
    }

    fn branch_signs_from(&self, pre: &Preimages) -> Result<Vec<f64>, Error> {
        if !self.family.is_symmetric() {
            return Err(Error::Domain(
                "branch signs refer to the rotation-symmetric constant kernel".into(),
            ));
        }
        let n = self.n();
        let base = pre.sqrt_zprime[n - 1];
        let mut out = Vec::with_capacity(n);
        for k0 in 0..n {
            let t = pre.sqrt_zprime[k0] / (unit(PI * (k0 + 1) as f64 / n as f64) * base);
            let snapped = if t.re >= 0.0 { 1.0 } else { -1.0 };
            let dev = (t - cr(snapped)).norm();
            if dev > 1e-6 {
                return Err(Error::NoConvergence {
                    what: format!("branch-sign detection at X = {:.6e}", pre.x),
                    residual: dev,
                    tol: 1e-6,
                });
            }
            out.push(snapped);
        }
        Ok(out)
    }

    /// Right-multiplied generator of the path ordering in s = ln X:
    /// G(s) = −(e^s/2π) K(e^s), so that dO/ds = O G(s).
    fn path_generator(&self, s: f64) -> Result<DMatrix<C64>, Error> {
        let x = s.exp();
        let pre = self.preimages(x)?;
        Ok(mixing_kernel_at(&pre) * cr(-x / (2.0 * PI)))
    }

    /// Fixed-step fourth-order integration of dO/ds = O G(s) from s0 to s1.
    /// The equation is linear, so the stage evaluations share generator
    /// values at the three abscissae of each step.
    fn integrate_o(&self, s0: f64, s1: f64, steps: usize) -> Result<DMatrix<C64>, Error> {
        let n = self.n();
        let mut o = DMatrix::<C64>::identity(n, n);
        if steps == 0 || s0 == s1 {
            return Ok(o);
        }
        let h = (s1 - s0) / steps as f64;
        let hc = cr(h);
        let half = cr(0.5 * h);
        let sixth = cr(h / 6.0);
        let two = cr(2.0);
        let mut g_start = self.path_generator(s0)?;
        for i in 0..steps {
            let s = s0 + h * i as f64;
            let g_mid = self.path_generator(s + 0.5 * h)?;
            let g_end = self.path_generator(s + h)?;
            let k1 = &o * &g_start;
            let k2 = (&o + &k1 * half) * &g_mid;
            let k3 = (&o + &k2 * half) * &g_mid;
            let k4 = (&o + &k3 * hc) * &g_end;
            o += (k1 + k2 * two + k3 * two + k4) * sixth;
            g_start = g_end;
        }
        Ok(o)
    }

    /// The anti-path-ordered exponential O(X) of −(1/2π)∫ K, normalized to
    /// O(X₀) = 1 at the base point: the solution of dO/dX = −(1/2π) O K(X)
    /// (anti-path-ordering = later factors on the right).
    ///
    /// Integrated with fixed-step classical RK4 in ln X (the kernel falls off
    /// like 1/X, so the log coordinate equidistributes the error), doubling
    /// the step count until the unitarity and transpose-orthogonality defects
    /// of the result are both ≤ 1e−8. The flow conserves O Oᵀ exactly, so the
    /// defect is a direct measure of integration error.
    pub fn path_ordered_o(&self, x_target: f64) -> Result<DMatrix<C64>, Error> {
        if !(x_target > 0.0 && x_target.is_finite()) {
            return Err(Error::Domain(format!(
                "path-ordered mixing matrix needs X in (0, inf), got {x_target}"
            )));
        }
        let s0 = self.x0.ln();
        let s1 = x_target.ln();
        let tol = 1e-8;
        let mut steps = ((s1 - s0).abs() * 64.0).ceil() as usize + 16;
        loop {
            let o = self.integrate_o(s0, s1, steps)?;
            let defect =
                numeric::unitarity_defect(&o).max(numeric::orthogonality_defect(&o));
            if defect <= tol {
                return Ok(o);
            }
            steps *= 2;
            if steps > (1 << 17) {
                return Err(Error::NoConvergence {
                    what: format!("path-ordered mixing matrix at X = {x_target:.6e}"),
                    residual: defect,
                    tol,
                });
            }
        }
    }

    /// Closed form of O(X) on a rotation-symmetric family:
    /// O(X) = D(X) · (z/z₀)^{K_c} · D(X₀), with z, z₀ the base-arc preimages
    /// of X and X₀, (z/z₀)^{K_c} = B⁻¹ diag((z/z₀)^{m_k}) B through the
    /// diagonalizer, and D the branch-sign diagonals.
    ///
    /// Equals the path-ordered integral exactly whenever the branch signs are
    /// constant between X₀ and X (they are piecewise constant, flipping only
    /// where some √(z'_k) crosses its branch cut; tests pin the constancy on
    /// the ranges they use).
    pub fn closed_form_o(&self, x_target: f64) -> Result<DMatrix<C64>, Error> {
        if !self.family.is_symmetric() {
            return Err(Error::Domain(
                "the closed-form mixing matrix needs a rotation-symmetric family".into(),
            ));
        }
        let n = self.n();
        let pre0 = self.preimages(self.x0)?;
        let pre = self.preimages(x_target)?;
        let dtheta = pre.theta[n - 1] - pre0.theta[n - 1];
        let core = symmetric_power(n, dtheta);
        let d1 = self.branch_signs_from(&pre)?;
        let d0 = self.branch_signs_from(&pre0)?;
        Ok(DMatrix::from_fn(n, n, |k, j| cr(d1[k]) * core[(k, j)] * cr(d0[j])))
    }

    /// The modular mixing cocycle O(t, X) = O(X)ᵀ · O(e^{−2πt} X).
    ///
    /// Satisfies O(t+s, X) = O(t, X) O(s, e^{−2πt} X) and O(0, X) = 1, and is
    /// insensitive to the constant left factor that the base-point choice
    /// leaves open in O(X).
    pub fn cocycle(&self, t: f64, x_val: f64) -> Result<DMatrix<C64>, Error> {
        let o_here = self.path_ordered_o(x_val)?;
        let o_there = self.path_ordered_o((-2.0 * PI * t).exp() * x_val)?;
        Ok(o_here.transpose() * o_there)
    }

    /// Numerical probe of the time derivative of the cocycle. Returns the
    /// residuals of the central difference ∂_t O(t, X) against the two
    /// candidate right-hand sides
    ///
    /// ```text
    /// (plain)   O(t, X) · K(e^{−2πt} X)
    /// (scaled)  O(t, X) · e^{−2πt}X · K(e^{−2πt} X)
    /// ```
    ///
    /// The scaled form is what the chain rule through dO/dX = −(1/2π) O K
    /// produces (d/dt of e^{−2πt}X brings down −2π e^{−2πt}X, cancelling the
    /// −1/2π); the plain form omits the flow-variable factor and can only
    /// agree where e^{−2πt}X ≈ 1. Callers report which one matches.
    pub fn cocycle_generator_residuals(
        &self,
        t: f64,
        x_val: f64,
        dt: f64,
    ) -> Result<(f64, f64), Error> {
        let plus = self.cocycle(t + dt, x_val)?;
        let minus = self.cocycle(t - dt, x_val)?;
        let deriv = (plus - minus) * cr(1.0 / (2.0 * dt));
        let here = self.cocycle(t, x_val)?;
        let y = (-2.0 * PI * t).exp() * x_val;
        let k_there = self.mixing_kernel(y)?;
        let plain = &here * &k_there;
        let scaled = plain.clone() * cr(y);
        Ok((
            numeric::max_abs_diff(&deriv, &plain),
            numeric::max_abs_diff(&deriv, &scaled),
        ))
    }

    /// The n diagonal-field combinations χ_k(X) = Σ_j O_{kj}(X) √(z'_j)
    /// ψ̂(z_j(X)), with O(X) from the path-ordered integral.
    pub fn chi_combos(&self, x_val: f64) -> Result<Vec<FieldCombo>, Error> {
        let pre = self.preimages(x_val)?;
        let o = self.path_ordered_o(x_val)?;
        Ok(chi_from_matrix(&o, &pre.sqrt_zprime, &pre.z))
    }

    /// The same combinations with the canonical coherent normalization on a
    /// rotation-symmetric family: O is taken as z^{K_c} (base-arc preimage z,
    /// principal angle) and the weights as the coherent roots ω^{j/2}√(z'),
    /// which differs from [`ModularGeometry::chi_combos`] by constant sign
    /// and frame factors. In this normalization the B-combinations equal
    /// √(n W′(X)) times the embedded family fields exactly.
    pub fn chi_combos_coherent(&self, x_val: f64) -> Result<Vec<FieldCombo>, Error> {
        if !self.family.is_symmetric() {
            return Err(Error::Domain(
                "coherent diagonal fields need a rotation-symmetric family".into(),
            ));
        }
        let n = self.n();
        let pre = self.preimages(x_val)?;
        let ocan = symmetric_power(n, pre.theta[n - 1]);
        let wbase = pre.sqrt_zprime[n - 1];
        let weights: Vec<C64> =
            (0..n).map(|j0| unit(PI * (j0 + 1) as f64 / n as f64) * wbase).collect();
        Ok(chi_from_matrix(&ocan, &weights, &pre.z))
    }

    /// Coherent branch of √(n W′(X)) for W = zⁿ on a rotation-symmetric
    /// family: n z^{(n−1)/2} √(z') with z the base-arc preimage, principal
    /// angle, and principal √(z'). Its square is n · dW/dX.
    pub fn coherent_sqrt_nwprime(&self, pre: &Preimages) -> Result<C64, Error> {
        if !self.family.is_symmetric() {
            return Err(Error::Domain(
                "the W-reparametrization weight needs a rotation-symmetric family".into(),
            ));
        }
        let n = self.n();
        Ok(cr(n as f64)
            * unit(pre.theta[n - 1] * (n as f64 - 1.0) / 2.0)
            * pre.sqrt_zprime[n - 1])
    }

    /// Reference two-point matrix for the coherent diagonal fields on a
    /// rotation-symmetric family, built from the *family-field* correlator:
    ///
    /// ```text
    /// ω(χ_k(X) χ_l(Y)) = √(nW′(X)) √(nW′(Y)) · [B⁻¹ Φ B⁻ᵀ]_{kl},
    /// Φ_{ab} = ω(φ̂⁽ᵃ⁾(W_X) φ̂⁽ᵇ⁾(W_Y))     (Pfaffian-oracle kernel),
    /// ```
    ///
    /// which carries the conjugate-pair structure Φ_{ab} ∝ δ_{a+b,n+1}. The
    /// direct side computed from [`ModularGeometry::chi_combos_coherent`] via
    /// the single-fermion kernel must reproduce this matrix.
    pub fn pair_correlator_reference(
        &self,
        x_val: f64,
        y_val: f64,
    ) -> Result<DMatrix<C64>, Error> {
        let n = self.n();
        let prex = self.preimages(x_val)?;
        let prey = self.preimages(y_val)?;
        let sx = self.coherent_sqrt_nwprime(&prex)?;
        let sy = self.coherent_sqrt_nwprime(&prey)?;
        let wx = prex.z[n - 1].powu(n as u32);
        let wy = prey.z[n - 1].powu(n as u32);
        let mut phi = DMatrix::<C64>::zeros(n, n);
        for a in 0..n {
            for b in 0..n {
                phi[(a, b)] = wick::npoint(&[
                    Point::multi_phi(n, a + 1, wx),
                    Point::multi_phi(n, b + 1, wy),
                ])?;
            }
        }
        let (bmat, _) = diagonalizer(n);
        let binv = bmat.adjoint() * cr(1.0 / n as f64);
        Ok((&binv * phi * binv.transpose()) * (sx * sy))
    }
}

/// Mixing kernel from a precomputed preimage set: antisymmetric, zero
/// diagonal, K_{kj} = 2π √(z'_k) √(z'_j)/(z_k − z_j). Antisymmetry is exact
/// by construction (the lower triangle is the negated upper triangle).
pub fn mixing_kernel_at(pre: &Preimages) -> DMatrix<C64> {
    let n = pre.z.len();
    let mut k = DMatrix::<C64>::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let e = cr(2.0 * PI) * pre.sqrt_zprime[i] * pre.sqrt_zprime[j]
                / (pre.z[i] - pre.z[j]);
            k[(i, j)] = e;
            k[(j, i)] = -e;
        }
    }
    k
}

/// The constant kernel of rotation-symmetric families:
/// K_c,kj = −ω^{(k+j)/2}/(ω^k − ω^j) for k ≠ j (1-based, ω = e^{2πi/n},
/// ω^{1/2} = e^{iπ/n}), zero diagonal. Equal to i/(2 sin(π(k−j)/n)), hence
/// purely imaginary, antisymmetric, and Hermitian with real spectrum.
pub fn symmetric_kernel_constant(n: usize) -> DMatrix<C64> {
    DMatrix::from_fn(n, n, |k0, j0| {
        if k0 == j0 {
            return ZERO;
        }
        let num = unit(PI * (k0 + j0 + 2) as f64 / n as f64);
        let den = unit(2.0 * PI * (k0 + 1) as f64 / n as f64)
            - unit(2.0 * PI * (j0 + 1) as f64 / n as f64);
        -num / den
    })
}

/// The diagonalizer of the constant kernel: B_{kj} = ω^{(1/2−k)j} and
/// M = diag((n+1)/2 − k), satisfying B K_c = M B with (1/√n) B unitary —
/// checked here to 1e−12 on every call, so the spectrum of K_c is the
/// integer-spaced ladder (1−n)/2, …, (n−1)/2.
pub fn diagonalizer(n: usize) -> (DMatrix<C64>, DMatrix<C64>) {
    let bmat = DMatrix::from_fn(n, n, |k0, j0| {
        unit(2.0 * PI * (0.5 - (k0 + 1) as f64) * (j0 + 1) as f64 / n as f64)
    });
    let mmat = DMatrix::from_fn(n, n, |k0, j0| {
        if k0 == j0 {
            cr((n as f64 + 1.0) / 2.0 - (k0 + 1) as f64)
        } else {
            ZERO
        }
    });
    let kc = symmetric_kernel_constant(n);
    let intertwine = numeric::max_abs_diff(&(&bmat * &kc), &(&mmat * &bmat));
    assert!(
        intertwine <= 1e-12,
        "B K_c = M B fails at n = {n}: defect {intertwine:.3e}"
    );
    let unitary = numeric::unitarity_defect(&(bmat.clone() * cr(1.0 / (n as f64).sqrt())));
    assert!(
        unitary <= 1e-12,
        "(1/sqrt n) B is not unitary at n = {n}: defect {unitary:.3e}"
    );
    (bmat, mmat)
}

/// (e^{iΔθ})^{K_c} = B⁻¹ diag(e^{i m_k Δθ}) B: the rotation-symmetric
/// closed-form core, continuous in the angle Δθ.
fn symmetric_power(n: usize, dtheta: f64) -> DMatrix<C64> {
    let (bmat, mmat) = diagonalizer(n);
    let binv = bmat.adjoint() * cr(1.0 / n as f64);
    let phase = DMatrix::from_fn(n, n, |k, j| {
        if k == j {
            unit(mmat[(k, k)].re * dtheta)
        } else {
            ZERO
        }
    });
    binv * phase * bmat
}

/// A finite combination Σ c_i ψ̂(z_i) of single-fermion field insertions.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldCombo {
    /// (coefficient, insertion point) pairs.
    pub terms: Vec<(C64, C64)>,
}

impl FieldCombo {
    pub fn new(terms: Vec<(C64, C64)>) -> Self {
        FieldCombo { terms }
    }

    /// Multiply every coefficient by c.
    pub fn scaled(mut self, c: C64) -> Self {
        for t in &mut self.terms {
            t.0 *= c;
        }
        self
    }

    /// Σ_j a_j · combos_j, merging insertion points that coincide to 1e−9.
    pub fn linear_combination(coeffs: &[C64], combos: &[FieldCombo]) -> Self {
        assert_eq!(coeffs.len(), combos.len());
        let mut terms: Vec<(C64, C64)> = Vec::new();
        for (c, combo) in coeffs.iter().zip(combos) {
            for &(w, z) in &combo.terms {
                match terms.iter_mut().find(|(_, p)| (*p - z).norm() < 1e-9) {
                    Some(t) => t.0 += c * w,
                    None => terms.push((c * w, z)),
                }
            }
        }
        FieldCombo { terms }
    }

    /// Vacuum two-point function ω(A B) of two combinations, each term pair
    /// evaluated through the quasi-free (Pfaffian) oracle for ψ̂.
    pub fn two_point(a: &FieldCombo, b: &FieldCombo) -> Result<C64, Error> {
        let mut acc = ZERO;
        for &(ca, za) in &a.terms {
            for &(cb, zb) in &b.terms {
                acc += ca * cb * wick::npoint(&[Point::psi(za), Point::psi(zb)])?;
            }
        }
        Ok(acc)
    }

    /// Largest coefficient mismatch between two combinations after matching
    /// terms by insertion point (sorted by angle; points must agree to 1e−7,
    /// otherwise the mismatch is reported as infinite).
    pub fn max_term_diff(a: &FieldCombo, b: &FieldCombo) -> f64 {
        if a.terms.len() != b.terms.len() {
            return f64::INFINITY;
        }
        let sort = |c: &FieldCombo| {
            let mut t = c.terms.clone();
            t.sort_by(|p, q| p.1.arg().partial_cmp(&q.1.arg()).unwrap());
            t
        };
        let (ta, tb) = (sort(a), sort(b));
        let mut worst: f64 = 0.0;
        for (&(ca, za), &(cb, zb)) in ta.iter().zip(&tb) {
            if (za - zb).norm() > 1e-7 {
                return f64::INFINITY;
            }
            worst = worst.max((ca - cb).norm());
        }
        worst
    }
}

fn chi_from_matrix(o: &DMatrix<C64>, weights: &[C64], points: &[C64]) -> Vec<FieldCombo> {
    let n = points.len();
    (0..n)
        .map(|k| {
            FieldCombo::new(
                (0..n).map(|j| (o[(k, j)] * weights[j], points[j])).collect(),
            )
        })
        .collect()
}

/// Matrix of two-point functions ω(a_k b_l) between two sets of combinations
/// (e.g. the diagonal fields at flow coordinates X and Y).
pub fn chi_two_point_matrix(
    a: &[FieldCombo],
    b: &[FieldCombo],
) -> Result<DMatrix<C64>, Error> {
    let mut m = DMatrix::<C64>::zeros(a.len(), b.len());
    for (k, ak) in a.iter().enumerate() {
        for (l, bl) in b.iter().enumerate() {
            m[(k, l)] = FieldCombo::two_point(ak, bl)?;
        }
    }
    Ok(m)
}

/// The single-interval modular flow of a half-density field on ℝ₊: the point
/// moves to e^{−2πt}x and the field picks up the weight e^{−πt}. This is the
/// n = 1 base case the multilocal flow reduces to (O = [1]), and the model
/// for the diagonal behavior σ_t(χ_k(X)) = e^{−πt} χ_k(e^{−2πt}X).
pub fn single_interval_flow(t: f64, x: f64) -> (f64, f64) {
    ((-2.0 * PI * t).exp() * x, (-PI * t).exp())
}
