//! Exact rational values for bound arithmetic.
//!
//! All upper bounds in this crate are ratios of 128-bit integers; no floating
//! point is used anywhere in bounding. Comparisons decompose into quotient
//! and remainder so that cross-multiplication cannot overflow even when both
//! operands carry large numerators.

use std::cmp::Ordering;

/// Floor division toward negative infinity.
pub fn div_floor(num: i128, den: i128) -> i128 {
    debug_assert!(den != 0);
    let q = num / den;
    let r = num % den;
    if r != 0 && ((r < 0) != (den < 0)) {
        q - 1
    } else {
        q
    }
}

/// Euclidean remainder in `[0, |den|)`.
fn rem_floor(num: i128, den: i128) -> i128 {
    num - div_floor(num, den) * den
}

/// An exact rational with positive denominator.
#[derive(Debug, Clone, Copy)]
pub struct Ratio {
    num: i128,
    den: i128,
}

impl Ratio {
    pub fn new(num: i128, den: i128) -> Self {
        debug_assert!(den != 0);
        if den < 0 {
            Ratio { num: -num, den: -den }
        } else {
            Ratio { num, den }
        }
    }

    pub fn from_int(v: i128) -> Self {
        Ratio { num: v, den: 1 }
    }

    pub fn num(&self) -> i128 {
        self.num
    }

    pub fn den(&self) -> i128 {
        self.den
    }

    pub fn floor(&self) -> i128 {
        div_floor(self.num, self.den)
    }

    pub fn is_integer(&self) -> bool {
        self.num % self.den == 0
    }

    pub fn add_int(&self, v: i128) -> Ratio {
        Ratio { num: self.num + v * self.den, den: self.den }
    }

    /// Compare against an integer by cross-multiplication.
    pub fn cmp_int(&self, v: i128) -> Ordering {
        self.num.cmp(&(v * self.den))
    }

    pub fn ge_int(&self, v: i128) -> bool {
        self.cmp_int(v) != Ordering::Less
    }

    pub fn lt_int(&self, v: i128) -> bool {
        self.cmp_int(v) == Ordering::Less
    }
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
    /// Exact comparison without overflow: compare integer parts first, then
    /// the fractional remainders `r/d` with `0 <= r < d`, where the cross
    /// products stay below `den_a * den_b`.
    fn cmp(&self, other: &Self) -> Ordering {
        let qa = div_floor(self.num, self.den);
        let qb = div_floor(other.num, other.den);
        match qa.cmp(&qb) {
            Ordering::Equal => {
                let ra = rem_floor(self.num, self.den);
                let rb = rem_floor(other.num, other.den);
                (ra * other.den).cmp(&(rb * self.den))
            }
            ord => ord,
        }
    }
}
