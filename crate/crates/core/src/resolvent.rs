//! Resolvent diagnostics for a decomposed matrix.
//!
//! Everything here is computed through the spectral representation
//!
//! ```text
//! R_jk(z) = sum_m u_jm u_km / (lambda_m - z),      Im z > 0,
//! ```
//!
//! so a single eigendecomposition serves every evaluation point, and the
//! algebraic identities checked below hold exactly in exact arithmetic —
//! their residuals measure floating-point error only, which makes them
//! sharp correctness oracles for the whole sampling/decomposition stack.
//!
//! The delete-one-row/column ("minor") quantities follow the classical
//! recursive analysis of the diagonal resolvent entries. For a row `j`
//! with off-diagonal entries `a_k = W_jk` and minor resolvent `R^(j)`:
//!
//! * the Schur complement formula `1/R_jj = W_jj - z - a^T R^(j) a` is
//!   split into the four terms `e1..e4` of [`EpsilonTerms`], giving
//!   `R_jj = 1/(-z - m_n + e1 + e2 + e3 + e4)`;
//! * the trace difference `Tr R - Tr R^(j) = (1 + eta) R_jj` is split
//!   into the three terms of [`EtaTerms`], quadratic forms in `(R^(j))^2`;
//! * averaging the Schur identity over rows yields
//!   `m_n - s = T_n / b_n` with `T_n = (1/n) sum_j eps_j R_jj` and
//!   `b_n = z + m_n + s`, the representation behind
//!   [`lambda_identity_residual`].
//!
//! Minor normalization: every `1/n` below uses the *parent* dimension
//! `n`, not `n - 1`, so e.g. `m_n^(j)(z) = (1/n) Tr R^(j)`.

use num_complex::Complex;

use crate::eigensolver::{decompose, SpectralData};
use crate::ensemble::SymmetricMatrix;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::semicircle::{stieltjes_s, ComplexPoint};

#[inline]
fn czero<S: Scalar>() -> Complex<S> {
    Complex::new(S::zero(), S::zero())
}

#[inline]
fn weight<S: Scalar>(lambda: S, z: Complex<S>) -> Complex<S> {
    (Complex::new(lambda, S::zero()) - z).inv()
}

/// Stieltjes transform of the empirical spectral distribution,
/// `m_n(z) = (1/n) sum_m 1/(lambda_m - z)`.
pub fn m_n<S: Scalar>(spectral: &SpectralData<S>, z: ComplexPoint<S>) -> Complex<S> {
    m_n_from_values(spectral.eigenvalues(), z)
}

/// Same as [`m_n`] but straight from an eigenvalue slice, for callers that
/// only ran the values-only decomposition path.
pub fn m_n_from_values<S: Scalar>(values: &[S], z: ComplexPoint<S>) -> Complex<S> {
    let zc = z.to_complex();
    let mut acc = czero::<S>();
    for &lambda in values {
        acc += weight(lambda, zc);
    }
    acc * (S::one() / S::c(values.len() as f64))
}

/// A decomposed matrix paired with one evaluation point `z = u + iv`,
/// `v > 0`. All entry lookups go through the spectral sum.
#[derive(Clone, Copy)]
pub struct ResolventView<'a, S: Scalar> {
    spectral: &'a SpectralData<S>,
    z: ComplexPoint<S>,
}

impl<'a, S: Scalar> ResolventView<'a, S> {
    pub fn new(spectral: &'a SpectralData<S>, z: ComplexPoint<S>) -> Self {
        ResolventView { spectral, z }
    }

    pub fn z(&self) -> ComplexPoint<S> {
        self.z
    }

    pub fn spectral(&self) -> &'a SpectralData<S> {
        self.spectral
    }

    pub fn m_n(&self) -> Complex<S> {
        m_n(self.spectral, self.z)
    }

    /// `Tr R(z) = n m_n(z)`.
    pub fn trace(&self) -> Complex<S> {
        self.m_n() * S::c(self.spectral.n() as f64)
    }
}

/// Resolvent entry `R_jk(z)`. Panics if an index is out of range.
pub fn r_entry<S: Scalar>(view: &ResolventView<'_, S>, j: usize, k: usize) -> Complex<S> {
    let sd = view.spectral;
    let zc = view.z.to_complex();
    let mut acc = czero::<S>();
    for m in 0..sd.n() {
        acc += weight(sd.eigenvalue(m), zc) * (sd.component(j, m) * sd.component(k, m));
    }
    acc
}

/// Eigendecomposition of the matrix with row and column `j` deleted. The
/// minor keeps the parent's `1/sqrt(n)` entry scaling, so its eigenvalues
/// interlace the parent's.
pub fn minor_spectral<S: Scalar>(w: &SymmetricMatrix<S>, j: usize) -> Result<SpectralData<S>> {
    decompose(&w.minor(j))
}

/// The four terms of the recursive representation of `R_jj`:
///
/// * `e1 = W_jj` (real by construction),
/// * `e2 = - sum_{k != l} a_k a_l R^(j)_kl` (off-diagonal quadratic form),
/// * `e3 = - sum_k (a_k^2 - 1/n) R^(j)_kk` (diagonal variance term),
/// * `e4 = (Tr R - Tr R^(j)) / n`,
///
/// with `a` the row `j` of `W` and all indices running over the minor.
#[derive(Clone, Copy, Debug)]
pub struct EpsilonTerms<S: Scalar> {
    pub e1: Complex<S>,
    pub e2: Complex<S>,
    pub e3: Complex<S>,
    pub e4: Complex<S>,
}

impl<S: Scalar> EpsilonTerms<S> {
    pub fn sum(&self) -> Complex<S> {
        self.e1 + self.e2 + self.e3 + self.e4
    }
}

/// The three terms of the trace-difference representation
/// `Tr R - Tr R^(j) = (1 + eta0 + eta1 + eta2) R_jj`:
///
/// * `eta0 = (1/n) Tr (R^(j))^2`, which is the derivative `(m_n^(j))'(z)`,
/// * `eta1 = sum_{k != l} a_k a_l [(R^(j))^2]_kl`,
/// * `eta2 = sum_k (a_k^2 - 1/n) [(R^(j))^2]_kk`.
#[derive(Clone, Copy, Debug)]
pub struct EtaTerms<S: Scalar> {
    pub eta0: Complex<S>,
    pub eta1: Complex<S>,
    pub eta2: Complex<S>,
}

impl<S: Scalar> EtaTerms<S> {
    pub fn sum(&self) -> Complex<S> {
        self.eta0 + self.eta1 + self.eta2
    }
}

/// Row `j` of `w` with the diagonal entry removed, in minor index order.
fn deleted_row<S: Scalar>(w: &SymmetricMatrix<S>, j: usize) -> Vec<S> {
    (0..w.n()).filter(|&k| k != j).map(|k| w.entry(j, k)).collect()
}

/// Shared layout of the epsilon/eta computations: quadratic form and
/// diagonal of `f(R^(j))` where `f` is determined by the per-eigenvalue
/// weights. Returns `(a^T f a, diag of f, weighted diag sums)`.
struct QuadraticParts<S: Scalar> {
    /// `a^T f(R^(j)) a`.
    full: Complex<S>,
    /// `sum_k a_k^2 f_kk`.
    diag_weighted: Complex<S>,
    /// `sum_k (a_k^2 - 1/n) f_kk`.
    diag_centered: Complex<S>,
}

fn quadratic_parts<S: Scalar>(
    minor: &SpectralData<S>,
    a: &[S],
    weights: &[Complex<S>],
    parent_n: usize,
) -> QuadraticParts<S> {
    let m = minor.n();
    let mut diag = vec![czero::<S>(); m];
    let mut full = czero::<S>();
    for mm in 0..m {
        let col = minor.vector(mm);
        let mut t = S::zero();
        for k in 0..m {
            t += col[k] * a[k];
            diag[k] += weights[mm] * (col[k] * col[k]);
        }
        full += weights[mm] * (t * t);
    }
    let inv_n = S::one() / S::c(parent_n as f64);
    let mut diag_weighted = czero::<S>();
    let mut diag_centered = czero::<S>();
    for k in 0..m {
        diag_weighted += diag[k] * (a[k] * a[k]);
        diag_centered += diag[k] * (a[k] * a[k] - inv_n);
    }
    QuadraticParts { full, diag_weighted, diag_centered }
}

/// The epsilon decomposition of row `j` at the view's evaluation point.
/// `view` must hold the parent decomposition of `w`, `minor` the
/// decomposition of `w` with row/column `j` deleted.
pub fn epsilon_terms<S: Scalar>(
    w: &SymmetricMatrix<S>,
    view: &ResolventView<'_, S>,
    j: usize,
    minor: &SpectralData<S>,
) -> EpsilonTerms<S> {
    let n = w.n();
    assert_eq!(minor.n(), n - 1, "minor dimension mismatch");
    let zc = view.z().to_complex();
    let a = deleted_row(w, j);
    let weights: Vec<Complex<S>> =
        minor.eigenvalues().iter().map(|&mu| weight(mu, zc)).collect();
    let parts = quadratic_parts(minor, &a, &weights, n);

    let mut tr_minor = czero::<S>();
    for &wt in &weights {
        tr_minor += wt;
    }
    let inv_n = S::one() / S::c(n as f64);
    EpsilonTerms {
        e1: Complex::new(w.entry(j, j), S::zero()),
        e2: -(parts.full - parts.diag_weighted),
        e3: -parts.diag_centered,
        e4: (view.trace() - tr_minor) * inv_n,
    }
}

/// Residual of the exact identity `R_jj = 1/(-z - m_n + eps_j)`. A
/// denominator collapsing to zero (z numerically at an eigenvalue of the
/// minor problem) is reported as an infinite residual.
pub fn schur_residual<S: Scalar>(
    view: &ResolventView<'_, S>,
    j: usize,
    terms: &EpsilonTerms<S>,
) -> S {
    let denom = -view.z().to_complex() - view.m_n() + terms.sum();
    if denom.norm() == S::zero() {
        return S::infinity();
    }
    (r_entry(view, j, j) - denom.inv()).norm()
}

/// The eta decomposition of row `j`: quadratic forms in `(R^(j))^2`,
/// computed through `[(R^(j))^2]_kl = sum_m u_km u_lm / (mu_m - z)^2`.
pub fn eta_terms<S: Scalar>(
    w: &SymmetricMatrix<S>,
    j: usize,
    z: ComplexPoint<S>,
    minor: &SpectralData<S>,
) -> EtaTerms<S> {
    let n = w.n();
    assert_eq!(minor.n(), n - 1, "minor dimension mismatch");
    let zc = z.to_complex();
    let a = deleted_row(w, j);
    let weights: Vec<Complex<S>> = minor
        .eigenvalues()
        .iter()
        .map(|&mu| {
            let wt = weight(mu, zc);
            wt * wt
        })
        .collect();
    let parts = quadratic_parts(minor, &a, &weights, n);

    let mut trace_sq = czero::<S>();
    for &wt in &weights {
        trace_sq += wt;
    }
    let inv_n = S::one() / S::c(n as f64);
    EtaTerms {
        eta0: trace_sq * inv_n,
        eta1: parts.full - parts.diag_weighted,
        eta2: parts.diag_centered,
    }
}

/// Residual of the averaged identity `m_n - s = T_n / b_n`, where
/// `T_n = (1/n) sum_j eps_j R_jj` and `b_n = z + m_n + s`. Expects one
/// minor decomposition per row. Fails only if `b_n` degenerates, which
/// cannot happen for `v > 0` (both `m_n` and `s` have positive imaginary
/// part) but is guarded for robustness.
pub fn lambda_identity_residual<S: Scalar>(
    w: &SymmetricMatrix<S>,
    z: ComplexPoint<S>,
    spectral: &SpectralData<S>,
    minors: &[SpectralData<S>],
) -> Result<S> {
    let n = w.n();
    assert_eq!(minors.len(), n, "need one minor decomposition per row");
    let s = stieltjes_s(z);
    let m = m_n(spectral, z);
    let b = z.to_complex() + m + s;
    if b.norm() < S::c(1e-12) {
        return Err(Error::domain(format!(
            "b_n(z) = {b} is numerically zero; the Lambda representation degenerates"
        )));
    }
    let view = ResolventView::new(spectral, z);
    let mut t = czero::<S>();
    for (j, minor) in minors.iter().enumerate() {
        let eps = epsilon_terms(w, &view, j, minor);
        t += eps.sum() * r_entry(&view, j, j);
    }
    t = t * (S::one() / S::c(n as f64));
    Ok(((m - s) - t / b).norm())
}

/// Outcome of the three deterministic resolvent bounds on a minor, in the
/// order
///
/// 1. `(1/n) sum_{k,l} |R^(j)_kl|^2  <=  Im m_n^(j) / v`,
/// 2. `sum_k |R^(j)_kl|^2  <=  Im R^(j)_ll / v` for every `l`,
/// 3. `(1/n) |Tr (R^(j))^2|  <=  Im m_n^(j) / v`.
///
/// The first two are spectral-calculus identities (slack is rounding
/// noise around zero); the third is a genuine triangle inequality. For
/// inequality 2 the reported slack is the minimum over `l`. `holds`
/// tolerates slack down to `-1e-12 (1 + |rhs|)`.
#[derive(Clone, Copy, Debug)]
pub struct InequalityReport<S: Scalar> {
    pub holds: [bool; 3],
    pub slacks: [S; 3],
}

/// Checks the three bounds above for a minor decomposition. The `1/n`
/// normalization uses the parent dimension `minor.n() + 1`.
pub fn resolvent_inequalities<S: Scalar>(
    minor: &SpectralData<S>,
    z: ComplexPoint<S>,
) -> InequalityReport<S> {
    let m = minor.n();
    let parent_n = S::c((m + 1) as f64);
    let v = z.v();
    let zc = z.to_complex();
    let weights: Vec<Complex<S>> =
        minor.eigenvalues().iter().map(|&mu| weight(mu, zc)).collect();

    // Ward sums per column l: sum_k |R_kl|^2 = sum_m u_lm^2 |w_m|^2, and
    // Im R_ll = sum_m u_lm^2 Im w_m, accumulated from the eigenvectors so
    // the two sides of each bound are computed independently.
    let mut row_mass = vec![S::zero(); m];
    let mut im_diag = vec![S::zero(); m];
    for mm in 0..m {
        let col = minor.vector(mm);
        let nsq = weights[mm].norm_sqr();
        let imw = weights[mm].im;
        for l in 0..m {
            let u2 = col[l] * col[l];
            row_mass[l] += u2 * nsq;
            im_diag[l] += u2 * imw;
        }
    }

    let mut im_m = S::zero();
    let mut trace_sq = czero::<S>();
    let mut total_mass = S::zero();
    for mm in 0..m {
        im_m += weights[mm].im;
        trace_sq += weights[mm] * weights[mm];
        total_mass += row_mass[mm];
    }
    im_m /= parent_n;

    let rhs_global = im_m / v;
    let slack1 = rhs_global - total_mass / parent_n;
    let mut slack2 = S::infinity();
    for l in 0..m {
        slack2 = slack2.min(im_diag[l] / v - row_mass[l]);
    }
    let slack3 = rhs_global - trace_sq.norm() / parent_n;

    let tol = |rhs: S| -S::c(1e-12) * (S::one() + rhs.abs());
    let rhs2_scale = im_diag.iter().fold(S::zero(), |acc, &x| acc.max(x.abs())) / v;
    InequalityReport {
        holds: [
            slack1 >= tol(rhs_global),
            slack2 >= tol(rhs2_scale),
            slack3 >= tol(rhs_global),
        ],
        slacks: [slack1, slack2, slack3],
    }
}

/// Eigenvector-weighted spectral distribution of row `j`,
/// `F_nj(x) = sum_k u_jk^2 1[lambda_k <= x]`. Nondecreasing in `x` with
/// total mass 1 (row normalization of the orthogonal eigenvector matrix).
pub fn weighted_esd<S: Scalar>(spectral: &SpectralData<S>, j: usize, x: S) -> S {
    let mut acc = S::zero();
    for m in 0..spectral.n() {
        if spectral.eigenvalue(m) > x {
            break;
        }
        let u = spectral.component(j, m);
        acc += u * u;
    }
    acc
}
