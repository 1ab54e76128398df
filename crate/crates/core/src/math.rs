//! Float helpers that work without `std`.
//!
//! `no_std` builds have no intrinsic `f64::exp`/`ln`, so everything routes
//! through `libm`. Keeping the wrappers in one place also pins down which
//! transcendentals the numerics depend on.

/// Natural exponential.
#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

/// Natural logarithm.
#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

/// Square root.
#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

/// `x^y` for real exponents.
#[inline]
pub fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

/// Largest integer value not above `x`.
#[inline]
pub fn floor(x: f64) -> f64 {
    libm::floor(x)
}

/// Smallest integer value not below `x`.
#[inline]
pub fn ceil(x: f64) -> f64 {
    libm::ceil(x)
}

/// Argmax over a slice with ties broken toward the lowest index.
///
/// Returns `None` for an empty slice. NaN entries never win.
pub fn argmax(values: &[f64]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &v) in values.iter().enumerate() {
        match best {
            Some((_, bv)) if !(v > bv) => {}
            _ if v.is_nan() => {}
            _ => best = Some((i, v)),
        }
    }
    best.map(|(i, _)| i)
}

/// Whether the argmax of `values` is tied (another index within `tol` of the max).
pub fn argmax_tied(values: &[f64], tol: f64) -> bool {
    match argmax(values) {
        None => false,
        Some(i) => values
            .iter()
            .enumerate()
            .any(|(j, &v)| j != i && (values[i] - v).abs() <= tol),
    }
}
