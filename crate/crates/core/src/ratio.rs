//! Exact non-negative rationals with cross-multiplied comparison.

use std::cmp::Ordering;
use std::fmt;

/// An exact rational `num / den` with `den > 0`.
///
/// Values are never normalized on construction; equality and ordering are
/// decided by cross multiplication in 128-bit arithmetic, so `2/2 == 1/1`.
#[derive(Clone, Copy, Debug)]
pub struct Ratio {
    num: i64,
    den: i64,
}

impl Ratio {
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den > 0, "denominator must be positive, got {den}");
        Ratio { num, den }
    }

    pub fn from_integer(v: i64) -> Self {
        Ratio { num: v, den: 1 }
    }

    pub fn num(&self) -> i64 {
        self.num
    }

    pub fn den(&self) -> i64 {
        self.den
    }

    /// The same value in lowest terms.
    pub fn reduced(&self) -> Ratio {
        let g = gcd(self.num.unsigned_abs(), self.den.unsigned_abs()).max(1) as i64;
        Ratio {
            num: self.num / g,
            den: self.den / g,
        }
    }
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl PartialEq for Ratio {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Ratio {}

impl PartialOrd for Ratio {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ratio {
    fn cmp(&self, other: &Self) -> Ordering {
        let lhs = self.num as i128 * other.den as i128;
        let rhs = other.num as i128 * self.den as i128;
        lhs.cmp(&rhs)
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = self.reduced();
        write!(f, "{}/{}", r.num, r.den)
    }
}

/// A stretch value that may be one of the two sentinels used by the
/// search procedures: `NegInf` for "no candidate" in a maximization and
/// `PosInf` for "no candidate" in a minimization.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Extended {
    NegInf,
    Finite(Ratio),
    PosInf,
}

impl Extended {
    pub fn finite(self) -> Option<Ratio> {
        match self {
            Extended::Finite(r) => Some(r),
            _ => None,
        }
    }
}

impl From<Ratio> for Extended {
    fn from(r: Ratio) -> Self {
        Extended::Finite(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn equal_after_scaling() {
        assert_eq!(Ratio::new(2, 2), Ratio::new(1, 1));
        assert_eq!(Ratio::new(4, 2).reduced().num(), 2);
        assert!(Ratio::new(3, 2) > Ratio::new(1, 1));
        assert_eq!(Ratio::new(6, 4).to_string(), "3/2");
    }

    #[test]
    fn sentinels_order() {
        let one = Extended::Finite(Ratio::from_integer(1));
        assert!(Extended::NegInf < one);
        assert!(one < Extended::PosInf);
    }

    proptest! {
        #[test]
        fn ordering_matches_f64_when_far_apart(a in 0i64..1_000_000, b in 1i64..1000, c in 0i64..1_000_000, d in 1i64..1000) {
            let x = Ratio::new(a, b);
            let y = Ratio::new(c, d);
            let fx = a as f64 / b as f64;
            let fy = c as f64 / d as f64;
            if (fx - fy).abs() > 1e-6 {
                prop_assert_eq!(x < y, fx < fy);
            }
            prop_assert_eq!(x == y, a as i128 * d as i128 == c as i128 * b as i128);
        }
    }
}
