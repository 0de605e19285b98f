//! Signed reals stored as `(sign, ln|x|)`.
//!
//! Powers like `c^N` underflow binary64 once `N ln|c| < -745`, so every
//! comparison the criteria make for large `N` goes through this type.

use std::cmp::Ordering;
use std::fmt;
use std::ops;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogValue {
    sign: i8,
    ln_mag: f64,
}

impl LogValue {
    pub const ZERO: LogValue = LogValue {
        sign: 0,
        ln_mag: f64::NEG_INFINITY,
    };
    pub const ONE: LogValue = LogValue {
        sign: 1,
        ln_mag: 0.0,
    };

    /// `sign` is normalized to zero whenever `ln_mag == -inf`.
    pub fn new(sign: i8, ln_mag: f64) -> Self {
        debug_assert!(!ln_mag.is_nan(), "NaN log magnitude");
        if sign == 0 || ln_mag == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            Self {
                sign: sign.signum(),
                ln_mag,
            }
        }
    }

    pub fn positive(ln_mag: f64) -> Self {
        Self::new(1, ln_mag)
    }

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else {
            Self::new(if x > 0.0 { 1 } else { -1 }, x.abs().ln())
        }
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    /// `ln|x|`, `-inf` for zero.
    pub fn ln_abs(&self) -> f64 {
        self.ln_mag
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    pub fn abs(self) -> Self {
        Self::new(self.sign.abs(), self.ln_mag)
    }

    /// Back to linear domain; underflows to `0.0` and overflows to `inf`.
    pub fn to_f64(&self) -> f64 {
        f64::from(self.sign) * self.ln_mag.exp()
    }

    pub fn powu(self, n: u64) -> Self {
        if n == 0 {
            return Self::ONE;
        }
        if self.is_zero() {
            return Self::ZERO;
        }
        let sign = if self.sign < 0 && n % 2 == 1 { -1 } else { 1 };
        Self::new(sign, n as f64 * self.ln_mag)
    }

    /// Total order on the represented reals.
    pub fn cmp_value(&self, other: &Self) -> Ordering {
        match self.sign.cmp(&other.sign) {
            Ordering::Equal => match self.sign {
                0 => Ordering::Equal,
                1 => self.ln_mag.total_cmp(&other.ln_mag),
                _ => other.ln_mag.total_cmp(&self.ln_mag),
            },
            o => o,
        }
    }
}

impl ops::Mul for LogValue {
    type Output = Self;

    fn mul(self, other: Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::ZERO;
        }
        Self::new(self.sign * other.sign, self.ln_mag + other.ln_mag)
    }
}

/// Signed log-sum-exp.
impl ops::Add for LogValue {
    type Output = Self;

    fn add(self, other: Self) -> Self {
        if self.is_zero() {
            return other;
        }
        if other.is_zero() {
            return self;
        }
        let (big, small) = if self.ln_mag >= other.ln_mag {
            (self, other)
        } else {
            (other, self)
        };
        let gap = small.ln_mag - big.ln_mag;
        if big.sign == small.sign {
            Self::new(big.sign, big.ln_mag + gap.exp().ln_1p())
        } else if gap == 0.0 {
            Self::ZERO
        } else {
            Self::new(big.sign, big.ln_mag + (-gap.exp_m1()).ln())
        }
    }
}

impl ops::Neg for LogValue {
    type Output = Self;

    fn neg(self) -> Self {
        Self::new(-self.sign, self.ln_mag)
    }
}

impl fmt::Display for LogValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            0 => f.write_str("0"),
            s => write!(f, "{}exp({})", if s < 0 { "-" } else { "" }, self.ln_mag),
        }
    }
}
