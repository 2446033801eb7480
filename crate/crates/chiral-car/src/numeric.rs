//! Dense numerical kernels: matrix exponential, polynomial roots, ODE steps.
//!
//! Nothing here knows about fermions. These are the few dense-linear-algebra
//! routines the physics modules share: a scaling-and-squaring Padé(13) matrix
//! exponential (nalgebra has no complex `expm`), real root extraction via the
//! companion matrix with Newton polish, classical RK4 for matrix-valued ODEs,
//! and Neville extrapolation to zero for regularized limits.

use nalgebra::DMatrix;

use crate::{C64, Error, ONE, ZERO};

/// Padé(13) coefficients for the matrix exponential.
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// Matrix 1-norm (max absolute column sum).
fn one_norm(a: &DMatrix<C64>) -> f64 {
    (0..a.ncols())
        .map(|j| a.column(j).iter().map(|x| x.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// exp(A) by scaling-and-squaring with a diagonal Padé(13) approximant.
///
/// Standard double-precision recipe: scale so the 1-norm is below
/// θ₁₃ ≈ 5.37, apply the (13,13) approximant, square back.
pub fn expm(a: &DMatrix<C64>) -> DMatrix<C64> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "expm needs a square matrix");
    let theta13 = 5.371920351148152;
    let norm = one_norm(a);
    let s = if norm > theta13 {
        (norm / theta13).log2().ceil() as i32
    } else {
        0
    };
    let a = a / C64::new(2f64.powi(s), 0.0);

    let id = DMatrix::<C64>::identity(n, n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a2 * &a4;
    let b: Vec<C64> = PADE13.iter().map(|&x| C64::new(x, 0.0)).collect();
    let u_inner = &a6 * (&a6 * b[13] + &a4 * b[11] + &a2 * b[9])
        + &a6 * b[7]
        + &a4 * b[5]
        + &a2 * b[3]
        + &id * b[1];
    let u = &a * u_inner;
    let v = &a6 * (&a6 * b[12] + &a4 * b[10] + &a2 * b[8])
        + &a6 * b[6]
        + &a4 * b[4]
        + &a2 * b[2]
        + &id * b[0];

    let lhs = &v - &u;
    let rhs = &v + &u;
    let mut r = lhs
        .lu()
        .solve(&rhs)
        .expect("Padé denominator is singular: input norm out of range");
    for _ in 0..s {
        r = &r * &r;
    }
    r
}

/// Monic real polynomial with the given roots; returns [c₀, …, c_{n−1}, 1].
pub fn poly_from_roots(roots: &[f64]) -> Vec<f64> {
    let mut c = vec![1.0];
    for &r in roots {
        let mut next = vec![0.0; c.len() + 1];
        for (k, &ck) in c.iter().enumerate() {
            next[k + 1] += ck;
            next[k] -= r * ck;
        }
        c = next;
    }
    c
}

/// Evaluate Σ c_k x^k.
pub fn poly_eval(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ck| acc * x + ck)
}

/// Coefficients of the derivative.
pub fn poly_deriv(c: &[f64]) -> Vec<f64> {
    c.iter()
        .enumerate()
        .skip(1)
        .map(|(k, &ck)| k as f64 * ck)
        .collect()
}

/// Real roots of a monic real polynomial, all of whose roots are known (by
/// construction) to be real: companion-matrix eigenvalues, Newton-polished.
///
/// `coeffs` is [c₀, …, c_{n−1}, 1]. Returns the roots sorted ascending.
pub fn real_roots_monic(coeffs: &[f64]) -> Result<Vec<f64>, Error> {
    let n = coeffs.len() - 1;
    if n == 0 {
        return Ok(vec![]);
    }
    assert!(
        (coeffs[n] - 1.0).abs() < 1e-12,
        "real_roots_monic expects a monic polynomial"
    );
    let mut comp = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        comp[(i, i - 1)] = 1.0;
    }
    for i in 0..n {
        comp[(i, n - 1)] = -coeffs[i];
    }
    let eig = comp.complex_eigenvalues();
    let dc = poly_deriv(coeffs);
    let mut roots: Vec<f64> = eig
        .iter()
        .map(|ev| {
            let mut x = ev.re;
            for _ in 0..3 {
                let p = poly_eval(coeffs, x);
                let dp = poly_eval(&dc, x);
                if dp.abs() > 1e-300 {
                    x -= p / dp;
                }
            }
            x
        })
        .collect();
    for (ev, x) in eig.iter().zip(&roots) {
        let scale = 1.0 + x.abs();
        if ev.im.abs() > 1e-6 * scale {
            return Err(Error::NoConvergence {
                what: format!("companion eigenvalue {ev} is not real"),
                residual: ev.im.abs(),
                tol: 1e-6 * scale,
            });
        }
    }
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(roots)
}

/// Classical RK4 from x0 to x1 in `steps` equal steps for Y' = f(x, Y).
pub fn rk4<F>(f: F, x0: f64, y0: DMatrix<C64>, x1: f64, steps: usize) -> DMatrix<C64>
where
    F: Fn(f64, &DMatrix<C64>) -> DMatrix<C64>,
{
    let h = (x1 - x0) / steps as f64;
    let hc = C64::new(h, 0.0);
    let mut y = y0;
    let mut x = x0;
    for _ in 0..steps {
        let k1 = f(x, &y);
        let k2 = f(x + h / 2.0, &(&y + &k1 * (hc / 2.0)));
        let k3 = f(x + h / 2.0, &(&y + &k2 * (hc / 2.0)));
        let k4 = f(x + h, &(&y + &k3 * hc));
        let two = C64::new(2.0, 0.0);
        y += (k1 + k2 * two + k3 * two + k4) * (hc / 6.0);
        x += h;
    }
    y
}

/// Neville interpolation of (t_i, v_i) evaluated at t = 0.
///
/// Used for regularized limits: feed v(t) at a few small t (e.g. t = ε²) and
/// read off the t → 0 value through the unique interpolating polynomial.
pub fn extrapolate_to_zero(points: &[(f64, f64)]) -> f64 {
    let n = points.len();
    assert!(n > 0);
    let mut v: Vec<f64> = points.iter().map(|p| p.1).collect();
    let t: Vec<f64> = points.iter().map(|p| p.0).collect();
    for level in 1..n {
        for i in 0..n - level {
            // P_{i..i+level}(0) from the two children at t = 0.
            v[i] = (t[i + level] * v[i] - t[i] * v[i + 1]) / (t[i + level] - t[i]);
        }
    }
    v[0]
}

/// Max entrywise absolute difference between two matrices.
pub fn max_abs_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Max entrywise absolute value.
pub fn max_abs(a: &DMatrix<C64>) -> f64 {
    a.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

/// Frobenius-style unitarity defect ‖M†M − 1‖_max.
pub fn unitarity_defect(m: &DMatrix<C64>) -> f64 {
    let n = m.nrows();
    max_abs_diff(&(m.adjoint() * m), &DMatrix::<C64>::identity(n, n))
}

/// Complex-orthogonality defect ‖MᵀM − 1‖_max (no conjugation).
pub fn orthogonality_defect(m: &DMatrix<C64>) -> f64 {
    let n = m.nrows();
    max_abs_diff(&(m.transpose() * m), &DMatrix::<C64>::identity(n, n))
}

/// Convenience: C64 from a real.
pub fn cr(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Convenience: zero/identity shorthands used all over the test code.
pub fn czero() -> C64 {
    ZERO
}

pub fn cone() -> C64 {
    ONE
}
