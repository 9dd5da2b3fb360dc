//! Semicircle law: density, distribution function, quantiles, and the
//! Stieltjes transform.
//!
//! The limiting spectral density of a Wigner matrix is
//! `g(x) = sqrt(4 - x^2) / (2 pi)` on `[-2, 2]`. Its distribution function
//! has the closed form
//!
//! ```text
//! G(x) = 1/2 + x sqrt(4 - x^2) / (4 pi) + asin(x/2) / pi
//! ```
//!
//! and its Stieltjes transform `s(z) = ∫ g(x)/(x - z) dx` is the root of
//! `s^2 + z s + 1 = 0` with positive imaginary part on the upper half-plane.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use num_complex::Complex;

/// A point `u + iv` of the open upper half-plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComplexPoint<S: Scalar> {
    u: S,
    v: S,
}

impl<S: Scalar> ComplexPoint<S> {
    /// Requires `v > 0`; the resolvent and transform formulas below are only
    /// defined off the real axis.
    pub fn new(u: S, v: S) -> Result<Self> {
        if !(v > S::zero()) || !u.is_finite() || !v.is_finite() {
            return Err(Error::domain(format!(
                "spectral parameter must satisfy v > 0, got u = {u}, v = {v}"
            )));
        }
        Ok(ComplexPoint { u, v })
    }

    pub fn u(self) -> S {
        self.u
    }

    pub fn v(self) -> S {
        self.v
    }

    pub fn to_complex(self) -> Complex<S> {
        Complex::new(self.u, self.v)
    }
}

/// Semicircle density `g(x)`, zero outside `[-2, 2]`.
pub fn density<S: Scalar>(x: S) -> S {
    let four = S::c(4.0);
    if x * x >= four {
        return S::zero();
    }
    (four - x * x).sqrt() / S::c(2.0 * std::f64::consts::PI)
}

/// Semicircle distribution function `G(x)`.
pub fn cdf<S: Scalar>(x: S) -> S {
    let two = S::c(2.0);
    if x <= -two {
        return S::zero();
    }
    if x >= two {
        return S::one();
    }
    let pi = S::c(std::f64::consts::PI);
    let half = S::c(0.5);
    half + x * (S::c(4.0) - x * x).sqrt() / (S::c(4.0) * pi) + (x * half).asin() / pi
}

/// Inverse of [`cdf`] by safeguarded Newton iteration: Newton steps are taken
/// while they stay inside the current bracket, bisection otherwise, so the
/// flat density near the edges cannot stall the iteration.
///
/// The result `x` satisfies `|cdf(x) - p| <= 1e-12` (loosened to a few ulps
/// for `f32`).
pub fn quantile<S: Scalar>(p: S) -> Result<S> {
    if !(p >= S::zero() && p <= S::one()) {
        return Err(Error::domain(format!("quantile argument must lie in [0, 1], got {p}")));
    }
    let two = S::c(2.0);
    if p == S::zero() {
        return Ok(-two);
    }
    if p == S::one() {
        return Ok(two);
    }
    let tol = S::c(1e-12).max(S::epsilon() * S::c(4.0));
    let mut lo = -two;
    let mut hi = two;
    // cdf is antisymmetric about 0, so this linear guess is exact at p = 1/2
    // and lands on the right side otherwise.
    let mut x = S::c(4.0) * p - two;
    for _ in 0..256 {
        let g = cdf(x) - p;
        if g.abs() <= tol {
            return Ok(x);
        }
        if g > S::zero() {
            hi = x;
        } else {
            lo = x;
        }
        let d = density(x);
        let mut next = if d > S::zero() { x - g / d } else { x };
        if !(next > lo && next < hi) {
            next = (lo + hi) * S::c(0.5);
        }
        if next == x {
            // Bracket has collapsed to adjacent floats; cdf is 1/pi-Lipschitz,
            // so the residual is already below any achievable tolerance.
            return Ok(x);
        }
        x = next;
    }
    Ok(x)
}

/// Quantiles `gamma_1 <= ... <= gamma_n` of the semicircle law defined by
/// `G(gamma_j) = j/n`; these are the deterministic locations eigenvalue `j`
/// is compared against in rigidity estimates.
#[derive(Clone, Debug)]
pub struct QuantileTable<S: Scalar> {
    gamma: Vec<S>,
}

impl<S: Scalar> QuantileTable<S> {
    pub fn n(&self) -> usize {
        self.gamma.len()
    }

    /// 1-indexed access, matching the eigenvalue numbering.
    pub fn gamma(&self, j: usize) -> S {
        assert!(j >= 1 && j <= self.gamma.len(), "quantile index out of range");
        self.gamma[j - 1]
    }

    pub fn as_slice(&self) -> &[S] {
        &self.gamma
    }
}

pub fn quantile_table<S: Scalar>(n: usize) -> Result<QuantileTable<S>> {
    if n == 0 {
        return Err(Error::domain("quantile table needs n >= 1"));
    }
    let nf = S::c(n as f64);
    let gamma = (1..=n).map(|j| quantile(S::c(j as f64) / nf)).collect::<Result<Vec<_>>>()?;
    Ok(QuantileTable { gamma })
}

/// Stieltjes transform of the semicircle law on the upper half-plane.
///
/// Of the two roots of `s^2 + z s + 1 = 0` exactly one has positive
/// imaginary part when `Im z > 0`; that root also satisfies `s(z) ~ -1/z`
/// at infinity. The quadratic is solved in whichever form avoids
/// cancellation, and since the two roots multiply to 1, a branch violation
/// is repaired by taking the reciprocal.
pub fn stieltjes_s<S: Scalar>(z: ComplexPoint<S>) -> Complex<S> {
    let z = z.to_complex();
    let four = Complex::new(S::c(4.0), S::zero());
    let r = (z * z - four).sqrt();
    // z and r aligned: -z + r cancels, use the reciprocal form instead.
    let aligned = z.re * r.re + z.im * r.im >= S::zero();
    let mut s = if aligned {
        -Complex::new(S::c(2.0), S::zero()) / (z + r)
    } else {
        (r - z) * S::c(0.5)
    };
    if s.im <= S::zero() {
        s = s.inv();
    }
    s
}

/// `b(z) = z + 2 s(z)`, the stability factor of the self-consistent
/// equation; it equals `sqrt(z^2 - 4)` on the correct branch and its size
/// controls how strongly deviations of the empirical transform are damped.
pub fn b_of_z<S: Scalar>(z: ComplexPoint<S>) -> Complex<S> {
    z.to_complex() + stieltjes_s(z) * S::c(2.0)
}

/// Distance from `u` to the spectral edges, `| |u| - 2 |`.
pub fn edge_gap<S: Scalar>(u: S) -> S {
    (u.abs() - S::c(2.0)).abs()
}

/// Even moments of the semicircle law: `∫ x^{2m} g(x) dx` is the m-th
/// Catalan number. Computed exactly in integer arithmetic; `m <= 32` keeps
/// the value inside the `f64`-exact range with room to spare.
pub fn semicircle_moment<S: Scalar>(m: u32) -> Result<S> {
    if m > 32 {
        return Err(Error::domain("semicircle moment supported for m <= 32"));
    }
    let mut c: u128 = 1;
    for k in 0..m as u128 {
        c = c * (4 * k + 2) / (k + 2);
    }
    Ok(S::c(c as f64))
}
