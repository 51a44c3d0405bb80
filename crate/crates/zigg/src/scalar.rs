//! Scalar abstraction shared by every module.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Binary floating-point format the library can generate and evaluate in.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Sum
    + Debug
    + Display
    + LowerExp
    + Default
    + Send
    + Sync
    + 'static
{
    /// Stored fraction bits (52 for binary64).
    const FRACTION_BITS: u32;
    /// Exponent of the smallest positive subnormal, negated (1074 for binary64).
    const MIN_SUBNORMAL_EXP: u32;

    /// Exact `2^-k` for `0 <= k <= MIN_SUBNORMAL_EXP`, zero beyond.
    fn exp2_neg(k: u32) -> Self;

    /// The value `1.fraction` built from the low `FRACTION_BITS` bits of `fraction`.
    fn one_plus_fraction(fraction: u64) -> Self;

    /// Fraction bits of a value, used by the uniformity checks.
    fn fraction_bits(self) -> u64;

    /// Lossy integer conversion (round to nearest), used on hot paths.
    fn from_u64_lossy(v: u64) -> Self;

    /// Converts a literal; panics only for values not representable at all.
    #[inline]
    fn c(v: f64) -> Self {
        Self::from_f64(v).expect("literal fits the format")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Relative tolerance that is meaningful in this format.
    #[inline]
    fn rel_tol(requested: f64) -> Self {
        Self::c(requested).max(Self::epsilon() * Self::c(16.0))
    }
}

impl Real for f64 {
    const FRACTION_BITS: u32 = 52;
    const MIN_SUBNORMAL_EXP: u32 = 1074;

    #[inline]
    fn exp2_neg(k: u32) -> f64 {
        if k <= 1022 {
            f64::from_bits(((1023 - k) as u64) << 52)
        } else if k <= 1074 {
            f64::from_bits(1u64 << (1074 - k))
        } else {
            0.0
        }
    }

    #[inline]
    fn one_plus_fraction(fraction: u64) -> f64 {
        f64::from_bits((1023u64 << 52) | (fraction & ((1u64 << 52) - 1)))
    }

    #[inline]
    fn fraction_bits(self) -> u64 {
        self.to_bits() & ((1u64 << 52) - 1)
    }

    #[inline]
    fn from_u64_lossy(v: u64) -> f64 {
        v as f64
    }
}

impl Real for f32 {
    const FRACTION_BITS: u32 = 23;
    const MIN_SUBNORMAL_EXP: u32 = 149;

    #[inline]
    fn exp2_neg(k: u32) -> f32 {
        if k <= 126 {
            f32::from_bits((127 - k) << 23)
        } else if k <= 149 {
            f32::from_bits(1u32 << (149 - k))
        } else {
            0.0
        }
    }

    #[inline]
    fn one_plus_fraction(fraction: u64) -> f32 {
        f32::from_bits((127u32 << 23) | (fraction as u32 & ((1u32 << 23) - 1)))
    }

    #[inline]
    fn fraction_bits(self) -> u64 {
        (self.to_bits() & ((1u32 << 23) - 1)) as u64
    }

    #[inline]
    fn from_u64_lossy(v: u64) -> f32 {
        v as f32
    }
}

/// Multiplies `m` by `2^-g` with a single rounding, even deep in the subnormal range.
#[inline]
pub(crate) fn scale_down<T: Real>(m: T, g: u32) -> T {
    if g > T::MIN_SUBNORMAL_EXP {
        return T::zero();
    }
    // keep the first product normal so only the last multiplication rounds
    let half = T::MIN_SUBNORMAL_EXP / 2;
    if g <= half {
        m * T::exp2_neg(g)
    } else {
        m * T::exp2_neg(half) * T::exp2_neg(g - half)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp2_neg_matches_powi_in_normal_range() {
        for k in 0..1000 {
            assert_eq!(f64::exp2_neg(k), 2f64.powi(-(k as i32)));
        }
        for k in 0..120 {
            assert_eq!(f32::exp2_neg(k), 2f32.powi(-(k as i32)));
        }
    }

    #[test]
    fn exp2_neg_reaches_smallest_subnormal() {
        assert_eq!(f64::exp2_neg(1074), f64::from_bits(1));
        assert_eq!(f64::exp2_neg(1075), 0.0);
        assert_eq!(f32::exp2_neg(149), f32::from_bits(1));
    }

    #[test]
    fn scale_down_rounds_once() {
        // 1.5 * 2^-1073 = 3 * 2^-1074, exactly representable
        assert_eq!(scale_down(1.5f64, 1073), f64::from_bits(3));
        assert_eq!(scale_down(1.0f64, 1075), 0.0);
    }
}
