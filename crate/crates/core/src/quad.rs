//! Adaptive Simpson quadrature.
//!
//! Small and dependency-free; accurate for the smooth integrands this crate
//! feeds it (resolvent traces along horizontal lines, substituted semicircle
//! integrals). Each panel is accepted when the Richardson estimate
//! `|S_fine - S_coarse| / 15` drops below its share of the tolerance, but
//! never before a few forced refinements: on coarse dyadic grids a periodic
//! integrand can alias so that coarse and fine estimates agree exactly while
//! both are wrong (`sin^6 t cos^2 t` over a half period does this at the
//! very first split).

use crate::scalar::Scalar;
use num_complex::Complex;

const MIN_DEPTH: u32 = 3;
const MAX_DEPTH: u32 = 48;

fn simpson<S: Scalar, T>(a: S, fa: T, b: S, fb: T, fm: T) -> T
where
    T: std::ops::Add<Output = T> + std::ops::Mul<S, Output = T> + Copy,
{
    let h = b - a;
    (fa + fm * S::c(4.0) + fb) * (h / S::c(6.0))
}

fn adapt<S: Scalar, T, F, N>(
    f: &F,
    norm: &N,
    a: S,
    fa: T,
    b: S,
    fb: T,
    fm: T,
    whole: T,
    tol: S,
    depth: u32,
) -> T
where
    F: Fn(S) -> T,
    N: Fn(T) -> S,
    T: std::ops::Add<Output = T> + std::ops::Sub<Output = T> + std::ops::Mul<S, Output = T> + Copy,
{
    let m = (a + b) * S::c(0.5);
    let lm = (a + m) * S::c(0.5);
    let rm = (m + b) * S::c(0.5);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, fa, m, fm, flm);
    let right = simpson(m, fm, b, fb, frm);
    let delta = left + right - whole;
    if depth >= MAX_DEPTH || (depth >= MIN_DEPTH && norm(delta) <= S::c(15.0) * tol) {
        left + right + delta * S::c(1.0 / 15.0)
    } else {
        let half = tol * S::c(0.5);
        adapt(f, norm, a, fa, m, fm, flm, left, half, depth + 1)
            + adapt(f, norm, m, fm, b, fb, frm, right, half, depth + 1)
    }
}

/// Integrates a real-valued function over `[a, b]` to absolute tolerance `tol`.
pub fn integrate<S: Scalar, F: Fn(S) -> S>(f: F, a: S, b: S, tol: S) -> S {
    if a == b {
        return S::zero();
    }
    let fa = f(a);
    let fb = f(b);
    let fm = f((a + b) * S::c(0.5));
    let whole = simpson(a, fa, b, fb, fm);
    adapt(&f, &|x: S| x.abs(), a, fa, b, fb, fm, whole, tol, 0)
}

/// Integrates a complex-valued function of a real variable over `[a, b]`.
pub fn integrate_complex<S: Scalar, F: Fn(S) -> Complex<S>>(
    f: F,
    a: S,
    b: S,
    tol: S,
) -> Complex<S> {
    if a == b {
        return Complex::new(S::zero(), S::zero());
    }
    let fa = f(a);
    let fb = f(b);
    let fm = f((a + b) * S::c(0.5));
    let whole = simpson(a, fa, b, fb, fm);
    adapt(&f, &|x: Complex<S>| x.norm(), a, fa, b, fb, fm, whole, tol, 0)
}
