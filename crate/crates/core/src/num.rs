//! Scalar math through `libm`, plus a few small helpers shared by the modules.

use core::f64::consts::PI;

#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}
#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}
#[inline]
pub fn ln1p(x: f64) -> f64 {
    libm::log1p(x)
}
#[inline]
pub fn expm1(x: f64) -> f64 {
    libm::expm1(x)
}
#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}
#[inline]
pub fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}
#[inline]
pub fn powi(x: f64, n: i32) -> f64 {
    libm::pow(x, n as f64)
}
#[inline]
pub fn sin(x: f64) -> f64 {
    libm::sin(x)
}
#[inline]
pub fn cos(x: f64) -> f64 {
    libm::cos(x)
}
#[inline]
pub fn atan2(y: f64, x: f64) -> f64 {
    libm::atan2(y, x)
}
#[inline]
pub fn abs(x: f64) -> f64 {
    libm::fabs(x)
}
#[inline]
pub fn floor(x: f64) -> f64 {
    libm::floor(x)
}
#[inline]
pub fn ceil(x: f64) -> f64 {
    libm::ceil(x)
}
#[inline]
pub fn cosh(x: f64) -> f64 {
    libm::cosh(x)
}
#[inline]
pub fn sinh(x: f64) -> f64 {
    libm::sinh(x)
}
#[inline]
pub fn tgamma(x: f64) -> f64 {
    libm::tgamma(x)
}
#[inline]
pub fn lgamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// Surface area of the unit sphere `S^{n-1}`: `2 π^{n/2} / Γ(n/2)`.
pub fn sphere_area(n: usize) -> f64 {
    let half = n as f64 / 2.0;
    2.0 * exp(half * ln(PI) - lgamma(half))
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    sqrt(dot(a, a))
}

/// Angle reduced to `[0, 2π)`.
pub fn wrap_angle(a: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let r = a - two_pi * floor(a / two_pi);
    if r >= two_pi {
        0.0
    } else {
        r
    }
}

/// Second central differences `f[i-1] - 2 f[i] + f[i+1]` for interior points.
pub fn second_differences(values: &[f64]) -> alloc::vec::Vec<f64> {
    values.windows(3).map(|w| w[0] - 2.0 * w[1] + w[2]).collect()
}

/// `count` evenly spaced points on `[lo, hi]` (both ends included).
pub fn linspace(lo: f64, hi: f64, count: usize) -> alloc::vec::Vec<f64> {
    match count {
        0 => alloc::vec::Vec::new(),
        1 => alloc::vec![lo],
        _ => {
            let step = (hi - lo) / (count - 1) as f64;
            (0..count).map(|i| if i + 1 == count { hi } else { lo + step * i as f64 }).collect()
        }
    }
}

/// `count` logarithmically spaced points on `[lo, hi]`, `0 < lo < hi`.
pub fn logspace(lo: f64, hi: f64, count: usize) -> alloc::vec::Vec<f64> {
    linspace(ln(lo), ln(hi), count).into_iter().map(exp).collect()
}
