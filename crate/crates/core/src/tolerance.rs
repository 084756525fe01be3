//! Shared comparison tolerances.

/// Relative slack used when asserting inequalities between computed values.
pub const ASSERT_REL: f64 = 1e-9;

/// Relative slack for quantities that should agree up to rounding.
pub const ORACLE_REL: f64 = 1e-12;

/// Scale for relative tolerances: `max(1, |x|)`.
#[inline]
pub fn scale(x: f64) -> f64 {
    let a = libm::fabs(x);
    if a > 1.0 {
        a
    } else {
        1.0
    }
}

/// `lhs <= rhs` up to `rel * max(1, |rhs|, |lhs|)`.
#[inline]
pub fn le_rel(lhs: f64, rhs: f64, rel: f64) -> bool {
    lhs <= rhs + rel * scale(rhs).max(scale(lhs))
}

/// `|a - b| <= rel * max(1, |a|, |b|)`.
#[inline]
pub fn close_rel(a: f64, b: f64, rel: f64) -> bool {
    libm::fabs(a - b) <= rel * scale(a).max(scale(b))
}
