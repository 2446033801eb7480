//! Exact half-integers.
//!
//! Mode indices of Neveu–Schwarz fermions live in ℤ + 1/2, Ramond indices in
//! ℤ, and the embedding maps between the two lattices by affine maps with
//! integer data. All of that must be exact — a mode index off by one flips
//! anticommutators — so indices are stored as `twice ∈ ℤ` rather than as
//! floats.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Rem, Sub, SubAssign};
use std::str::FromStr;

use crate::Error;

/// A number in (1/2)ℤ, stored exactly as twice its value.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct HalfInt {
    twice: i64,
}

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt { twice: 0 };
    pub const HALF: HalfInt = HalfInt { twice: 1 };
    pub const ONE: HalfInt = HalfInt { twice: 2 };

    /// Construct from twice the value: `from_twice(3)` is 3/2.
    pub const fn from_twice(twice: i64) -> Self {
        HalfInt { twice }
    }

    /// Construct an integer value.
    pub const fn from_int(n: i64) -> Self {
        HalfInt { twice: 2 * n }
    }

    /// n + 1/2.
    pub const fn int_plus_half(n: i64) -> Self {
        HalfInt { twice: 2 * n + 1 }
    }

    /// Twice the value (always exact).
    pub const fn twice(self) -> i64 {
        self.twice
    }

    /// True if the value is in ℤ.
    pub const fn is_integer(self) -> bool {
        self.twice % 2 == 0
    }

    /// True if the value is in ℤ + 1/2.
    pub const fn is_half_odd(self) -> bool {
        self.twice % 2 != 0
    }

    /// The integer value, or an error if the value is half-odd.
    pub fn as_integer(self) -> Result<i64, Error> {
        if self.is_integer() {
            Ok(self.twice / 2)
        } else {
            Err(Error::BadModeIndex {
                index: self,
                reason: "expected an integer".into(),
            })
        }
    }

    /// Value as f64 (exact: the dyadic value fits a double for all sane cutoffs).
    pub fn to_f64(self) -> f64 {
        self.twice as f64 / 2.0
    }

    /// |self|.
    pub fn abs(self) -> Self {
        HalfInt {
            twice: self.twice.abs(),
        }
    }

    /// Sign as -1, 0, or 1.
    pub fn signum(self) -> i64 {
        self.twice.signum()
    }

    /// self > 0.
    pub fn is_positive(self) -> bool {
        self.twice > 0
    }

    /// self < 0.
    pub fn is_negative(self) -> bool {
        self.twice < 0
    }

    /// (-1)^(self + 1/2) for half-odd self: +1 for indices in 2ℤ − 1/2
    /// (…, -1/2, 3/2, …), −1 for indices in 2ℤ + 1/2 (…, 1/2, 5/2, …).
    ///
    /// This is the parity that grades the embedded current and the gauge
    /// rotation; it is defined only on the Neveu–Schwarz lattice.
    pub fn ns_parity_sign(self) -> Result<i64, Error> {
        if !self.is_half_odd() {
            return Err(Error::BadModeIndex {
                index: self,
                reason: "parity sign (-1)^{m+1/2} needs a half-odd index".into(),
            });
        }
        // twice = 2m; m + 1/2 = (twice + 1)/2, integer. Even ⇔ twice ≡ 3 (mod 4).
        let e = (self.twice + 1).div_euclid(2);
        Ok(if e.rem_euclid(2) == 0 { 1 } else { -1 })
    }

    /// Euclidean remainder of `self` by an integer n, landing in [0, n).
    pub fn rem_euclid_int(self, n: i64) -> Result<i64, Error> {
        let v = self.as_integer()?;
        Ok(v.rem_euclid(n))
    }
}

impl fmt::Debug for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

impl FromStr for HalfInt {
    type Err = Error;

    /// Accepts `"3"`, `"-3"`, `"15/2"`, `"-15/2"`, and decimal halves like
    /// `"7.5"` / `"-0.5"`.
    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        if let Some((num, den)) = s.split_once('/') {
            if den.trim() != "2" {
                return Err(Error::Parse(format!(
                    "half-integer denominator must be 2, got {den:?}"
                )));
            }
            let n: i64 = num
                .trim()
                .parse()
                .map_err(|e| Error::Parse(format!("bad numerator {num:?}: {e}")))?;
            return Ok(HalfInt::from_twice(n));
        }
        if let Some((int, frac)) = s.split_once('.') {
            if frac != "5" && frac != "0" {
                return Err(Error::Parse(format!(
                    "decimal half-integers must end in .0 or .5, got {s:?}"
                )));
            }
            let negative = int.starts_with('-');
            let whole: i64 = if int.is_empty() || int == "-" {
                0
            } else {
                int.parse()
                    .map_err(|e| Error::Parse(format!("bad integer part {int:?}: {e}")))?
            };
            let mut twice = 2 * whole;
            if frac == "5" {
                twice += if negative { -1 } else { 1 };
            }
            return Ok(HalfInt::from_twice(twice));
        }
        let n: i64 = s
            .parse()
            .map_err(|e| Error::Parse(format!("bad integer {s:?}: {e}")))?;
        Ok(HalfInt::from_int(n))
    }
}

impl Add for HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: Self) -> Self {
        HalfInt {
            twice: self.twice + rhs.twice,
        }
    }
}

impl AddAssign for HalfInt {
    fn add_assign(&mut self, rhs: Self) {
        self.twice += rhs.twice;
    }
}

impl Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, rhs: Self) -> Self {
        HalfInt {
            twice: self.twice - rhs.twice,
        }
    }
}

impl SubAssign for HalfInt {
    fn sub_assign(&mut self, rhs: Self) {
        self.twice -= rhs.twice;
    }
}

impl Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> Self {
        HalfInt { twice: -self.twice }
    }
}

/// Multiplication by an integer (the only product that stays in (1/2)ℤ).
impl Mul<i64> for HalfInt {
    type Output = HalfInt;
    fn mul(self, rhs: i64) -> Self {
        HalfInt {
            twice: self.twice * rhs,
        }
    }
}

impl Mul<HalfInt> for i64 {
    type Output = HalfInt;
    fn mul(self, rhs: HalfInt) -> HalfInt {
        rhs * self
    }
}

/// Exact division by an integer; panics if the result leaves (1/2)ℤ.
impl Div<i64> for HalfInt {
    type Output = HalfInt;
    fn div(self, rhs: i64) -> Self {
        assert!(
            self.twice % rhs == 0,
            "HalfInt division {self} / {rhs} is not exact"
        );
        HalfInt {
            twice: self.twice / rhs,
        }
    }
}

impl Rem<i64> for HalfInt {
    type Output = HalfInt;
    fn rem(self, rhs: i64) -> Self {
        HalfInt {
            twice: self.twice.rem_euclid(2 * rhs),
        }
    }
}

impl Sum for HalfInt {
    fn sum<I: Iterator<Item = HalfInt>>(iter: I) -> Self {
        iter.fold(HalfInt::ZERO, Add::add)
    }
}

impl From<i64> for HalfInt {
    fn from(n: i64) -> Self {
        HalfInt::from_int(n)
    }
}

/// Inclusive range over a half-integer lattice with step 1: `lo, lo+1, …, hi`.
pub fn lattice(lo: HalfInt, hi: HalfInt) -> impl Iterator<Item = HalfInt> {
    assert_eq!(
        (hi - lo).twice % 2,
        0,
        "lattice endpoints must differ by an integer"
    );
    (0..=((hi - lo).twice / 2).max(-1))
        .map(move |k| lo + HalfInt::from_int(k))
        .filter(move |m| *m <= hi)
}

/// All Neveu–Schwarz indices with |m| ≤ cutoff: −cutoff, …, −1/2, 1/2, …, cutoff.
pub fn ns_indices(cutoff: HalfInt) -> Vec<HalfInt> {
    assert!(cutoff.is_half_odd(), "NS cutoff must be half-odd");
    lattice(-cutoff, cutoff).collect()
}

/// All Ramond indices with |m| ≤ cutoff: −cutoff, …, −1, 0, 1, …, cutoff.
pub fn ramond_indices(cutoff: i64) -> Vec<HalfInt> {
    lattice(HalfInt::from_int(-cutoff), HalfInt::from_int(cutoff)).collect()
}
