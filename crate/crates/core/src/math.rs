//! `f64` transcendental functions that work without `std`.

use num_traits::Float;

#[inline]
pub(crate) fn exp(x: f64) -> f64 {
    Float::exp(x)
}

#[inline]
pub(crate) fn ln(x: f64) -> f64 {
    Float::ln(x)
}

#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    Float::sqrt(x)
}

#[inline]
pub(crate) fn floor(x: f64) -> f64 {
    Float::floor(x)
}

#[inline]
pub(crate) fn round(x: f64) -> f64 {
    Float::round(x)
}

#[inline]
pub(crate) fn sin(x: f64) -> f64 {
    Float::sin(x)
}

#[inline]
pub(crate) fn cos(x: f64) -> f64 {
    Float::cos(x)
}

#[inline]
pub(crate) fn tan(x: f64) -> f64 {
    Float::tan(x)
}

/// `ln(e^a + e^b)` with `-inf` as the additive identity.
#[inline]
pub(crate) fn log_sum_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + ln(exp(a - m) + exp(b - m))
}
