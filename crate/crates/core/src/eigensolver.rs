//! Symmetric eigendecomposition.
//!
//! Classic two-stage dense solver: Householder reduction to tridiagonal
//! form followed by the implicit-shift QL iteration, in the arrangement
//! that EISPACK's `tred2`/`tql2` made standard (the same routines behind
//! Jama and countless ports). It is deliberately self-contained: results
//! are reproducible bit for bit across platforms that implement IEEE-754,
//! and the inner loops run over contiguous columns of a column-major
//! buffer, which is what lets n = 2000 decompositions finish in seconds.
//!
//! Conventions fixed here:
//! * eigenvalues ascending;
//! * each eigenvector is normalized so its largest-magnitude component
//!   (lowest index on ties) is positive;
//! * QL deflation uses a relative off-diagonal threshold of `1e-14`
//!   (the scalar's epsilon if that is larger);
//! * the iteration gives up after `50 n` total sweeps and reports the
//!   eigenvalue index it was working on.

use crate::ensemble::SymmetricMatrix;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Sweep budget: QL almost always needs 2–3 sweeps per eigenvalue, so this
/// is two orders of magnitude of headroom, not a tuning knob.
const SWEEPS_PER_EIGENVALUE: usize = 50;

/// Eigenvalues (ascending) with optional eigenvectors, column `m` of
/// `vectors` belonging to `eigenvalues[m]`.
#[derive(Clone, Debug)]
pub struct SpectralData<S: Scalar> {
    n: usize,
    eigenvalues: Vec<S>,
    vectors: Vec<S>,
}

impl<S: Scalar> SpectralData<S> {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn eigenvalues(&self) -> &[S] {
        &self.eigenvalues
    }

    /// 0-indexed ascending eigenvalue.
    pub fn eigenvalue(&self, m: usize) -> S {
        self.eigenvalues[m]
    }

    pub fn lambda_min(&self) -> S {
        self.eigenvalues[0]
    }

    pub fn lambda_max(&self) -> S {
        self.eigenvalues[self.n - 1]
    }

    /// Eigenvector for `eigenvalue(m)`, as a contiguous slice.
    pub fn vector(&self, m: usize) -> &[S] {
        &self.vectors[m * self.n..(m + 1) * self.n]
    }

    /// Component `j` of eigenvector `m`.
    #[inline]
    pub fn component(&self, j: usize, m: usize) -> S {
        self.vectors[m * self.n + j]
    }
}

#[inline]
fn deflation_tol<S: Scalar>() -> S {
    S::c(1e-14).max(S::epsilon())
}

/// Householder reduction of the dense column-major symmetric matrix `v`
/// (n x n) to tridiagonal form `(d, e)`; `e[0]` is zero, `e[i]` couples
/// rows `i-1` and `i`. When `vectors` is set, `v` is overwritten with the
/// accumulated orthogonal transformation, otherwise only the lower triangle
/// is consumed and the diagonal of the reduced matrix is read off at the
/// end.
fn tridiagonalize<S: Scalar>(v: &mut [S], n: usize, d: &mut [S], e: &mut [S], vectors: bool) {
    let col = |j: usize| j * n;
    for j in 0..n {
        d[j] = v[col(j) + (n - 1)];
    }

    for i in (1..n).rev() {
        // Scale to avoid under/overflow, as in the reference routine.
        let mut h = S::zero();
        let mut scale = S::zero();
        for k in 0..i {
            scale += d[k].abs();
        }
        if scale == S::zero() {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[col(j) + (i - 1)];
                if vectors {
                    v[col(j) + i] = S::zero();
                    v[col(i) + j] = S::zero();
                }
            }
        } else {
            for k in 0..i {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            let f = d[i - 1];
            let mut g = h.sqrt();
            if f > S::zero() {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for item in e.iter_mut().take(i) {
                *item = S::zero();
            }

            // Form A u / h and accumulate the symmetric correction, reading
            // only the lower triangle, column by column.
            for j in 0..i {
                let f = d[j];
                if vectors {
                    v[col(i) + j] = f;
                }
                let cj = col(j);
                let mut g = e[j] + v[cj + j] * f;
                let (ks, ke) = (j + 1, i);
                let column = &v[cj + ks..cj + ke];
                let dk = &d[ks..ke];
                let ek = &mut e[ks..ke];
                for t in 0..column.len() {
                    g += column[t] * dk[t];
                    ek[t] += column[t] * f;
                }
                e[j] = g;
            }
            let mut f = S::zero();
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            // Rank-2 update of the trailing block, lower triangle only.
            for j in 0..i {
                let f = d[j];
                let g = e[j];
                let cj = col(j);
                let column = &mut v[cj + j..cj + i];
                let ek = &e[j..i];
                let dk = &d[j..i];
                for t in 0..column.len() {
                    column[t] = column[t] - f * ek[t] - g * dk[t];
                }
                d[j] = v[col(j) + (i - 1)];
                if vectors {
                    v[col(j) + i] = S::zero();
                }
            }
        }
        d[i] = h;
    }

    if vectors {
        // Accumulate the Householder transformations into an explicit
        // orthogonal matrix, expanding from the top-left corner.
        for i in 0..n - 1 {
            v[col(i) + (n - 1)] = v[col(i) + i];
            v[col(i) + i] = S::one();
            let h = d[i + 1];
            if h != S::zero() {
                for k in 0..=i {
                    d[k] = v[col(i + 1) + k] / h;
                }
                for j in 0..=i {
                    let mut g = S::zero();
                    let chouse = &v[col(i + 1)..col(i + 1) + i + 1];
                    let cj = &v[col(j)..col(j) + i + 1];
                    for k in 0..=i {
                        g += chouse[k] * cj[k];
                    }
                    let cjm = &mut v[col(j)..col(j) + i + 1];
                    for k in 0..=i {
                        cjm[k] = cjm[k] - g * d[k];
                    }
                }
            }
            for k in 0..=i {
                v[col(i + 1) + k] = S::zero();
            }
        }
        for j in 0..n {
            d[j] = v[col(j) + (n - 1)];
            v[col(j) + (n - 1)] = S::zero();
        }
        v[col(n - 1) + (n - 1)] = S::one();
    } else {
        for j in 0..n {
            d[j] = v[col(j) + j];
        }
    }
    e[0] = S::zero();
}

/// Implicit-shift QL on the tridiagonal `(d, e)`, rotations optionally
/// accumulated into the columns of `v`. On success `d` holds unsorted
/// eigenvalues.
fn ql_iterate<S: Scalar>(
    d: &mut [S],
    e: &mut [S],
    v: &mut [S],
    n: usize,
    vectors: bool,
) -> Result<()> {
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = S::zero();

    let tol = deflation_tol::<S>();
    let budget = SWEEPS_PER_EIGENVALUE * n;
    let mut sweeps = 0usize;
    let mut f = S::zero();
    let mut tst1 = S::zero();
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        loop {
            // Find the first deflated coupling at or after l.
            let mut m = l;
            while m < n - 1 {
                if e[m].abs() <= tol * tst1 {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > budget {
                return Err(Error::NoConvergence { index: l, sweeps: budget });
            }

            // Wilkinson-style shift through the (l, l+1) block.
            let g = d[l];
            let two = S::c(2.0);
            let mut p = (d[l + 1] - g) / (two * e[l]);
            let mut r = p.hypot(S::one());
            if p < S::zero() {
                r = -r;
            }
            d[l] = e[l] / (p + r);
            d[l + 1] = e[l] * (p + r);
            let dl1 = d[l + 1];
            let mut h = g - d[l];
            for item in d.iter_mut().take(n).skip(l + 2) {
                *item -= h;
            }
            f += h;

            // One QL sweep, rotations applied from the deflated end back
            // toward l.
            p = d[m];
            let mut c = S::one();
            let mut c2 = c;
            let mut c3 = c;
            let el1 = e[l + 1];
            let mut s = S::zero();
            let mut s2 = S::zero();
            for i in (l..m).rev() {
                c3 = c2;
                c2 = c;
                s2 = s;
                let g = c * e[i];
                h = c * p;
                r = p.hypot(e[i]);
                e[i + 1] = s * r;
                s = e[i] / r;
                c = p / r;
                p = c * d[i] - s * g;
                d[i + 1] = h + s * (c * g + s * d[i]);

                if vectors {
                    let (left, right) = v.split_at_mut((i + 1) * n);
                    let ci = &mut left[i * n..(i + 1) * n];
                    let ci1 = &mut right[..n];
                    for k in 0..n {
                        let hk = ci1[k];
                        ci1[k] = s * ci[k] + c * hk;
                        ci[k] = c * ci[k] - s * hk;
                    }
                }
            }
            p = -s * s2 * c3 * el1 * e[l] / dl1;
            e[l] = s * p;
            d[l] = c * p;
        }
        d[l] += f;
        e[l] = S::zero();
    }
    Ok(())
}

fn sort_and_orient<S: Scalar>(d: Vec<S>, v: Vec<S>, n: usize, vectors: bool) -> SpectralData<S> {
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].partial_cmp(&d[b]).expect("eigenvalues are finite"));
    let eigenvalues: Vec<S> = order.iter().map(|&m| d[m]).collect();
    let mut out = Vec::new();
    if vectors {
        out = vec![S::zero(); n * n];
        for (dst, &src) in order.iter().enumerate() {
            let column = &v[src * n..(src + 1) * n];
            // Largest-magnitude component positive; ties resolved toward
            // the lowest index by the strict comparison.
            let mut best = 0usize;
            for (j, &value) in column.iter().enumerate() {
                if value.abs() > column[best].abs() {
                    best = j;
                }
            }
            let flip = column[best] < S::zero();
            let target = &mut out[dst * n..(dst + 1) * n];
            if flip {
                for (t, &value) in target.iter_mut().zip(column) {
                    *t = -value;
                }
            } else {
                target.copy_from_slice(column);
            }
        }
    }
    SpectralData { n, eigenvalues, vectors: out }
}

fn eigen<S: Scalar>(w: &SymmetricMatrix<S>, vectors: bool) -> Result<SpectralData<S>> {
    let n = w.n();
    let mut v = w.to_dense_col_major();
    let mut d = vec![S::zero(); n];
    let mut e = vec![S::zero(); n];
    if n == 1 {
        return Ok(SpectralData { n, eigenvalues: vec![v[0]], vectors: vec![S::one()] });
    }
    tridiagonalize(&mut v, n, &mut d, &mut e, vectors);
    ql_iterate(&mut d, &mut e, &mut v, n, vectors)?;
    Ok(sort_and_orient(d, v, n, vectors))
}

/// Full eigendecomposition: ascending eigenvalues and orthonormal
/// eigenvectors under the fixed sign convention.
pub fn decompose<S: Scalar>(w: &SymmetricMatrix<S>) -> Result<SpectralData<S>> {
    eigen(w, true)
}

/// Eigenvalues only (ascending). Roughly 3x cheaper than [`decompose`] —
/// the statistics that need no eigenvectors run through this path.
pub fn decompose_values<S: Scalar>(w: &SymmetricMatrix<S>) -> Result<Vec<S>> {
    Ok(eigen(w, false)?.eigenvalues)
}

/// Spectral norm `max |lambda|`.
pub fn operator_norm<S: Scalar>(w: &SymmetricMatrix<S>) -> Result<S> {
    let values = decompose_values(w)?;
    Ok(values[0].abs().max(values[values.len() - 1].abs()))
}
