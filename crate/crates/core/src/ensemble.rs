//! Wigner matrix sampling and entry truncation.
//!
//! A sample is `W = X / sqrt(n)` with `X` real symmetric and the entries on
//! and above the diagonal i.i.d. with mean 0 and variance 1. Two entry laws
//! are provided: standard Gaussian, and a standardized Pareto with density
//! `f(x) = (mu - 1) x^{-mu}` on `[1, inf)` — heavy-tailed, with only
//! `mu - 1 - eps` finite moments, which is the regime where truncation
//! becomes interesting.
//!
//! Truncation clips each entry of `X` at a level `cutoff = D n^a`. Three
//! matrices matter downstream: the clipped matrix, the clipped-and-centered
//! matrix, and the clipped-centered-rescaled matrix whose entries have unit
//! variance again. [`truncate`] returns the first and last of these together
//! with the rescaling variance.

use crate::error::{Error, Result};
use crate::rng::Stream;
use crate::scalar::Scalar;
use crate::special::erf;

/// Entry distribution, standardized to mean 0 and variance 1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EntryLaw<S: Scalar> {
    Gaussian,
    /// Standardized Pareto with tail index `mu`; `mu > 3` so the variance
    /// used for standardization exists.
    Pareto { mu: S },
}

/// Mean and variance of the raw Pareto variable with density
/// `(mu - 1) x^{-mu}` on `[1, inf)`:
/// `E xi = (mu-1)/(mu-2)`, `E xi^2 = (mu-1)/(mu-3)`.
pub fn pareto_moments<S: Scalar>(mu: S) -> Result<(S, S)> {
    if !(mu > S::c(3.0)) {
        return Err(Error::domain(format!("pareto law needs mu > 3 for a finite variance, got {mu}")));
    }
    let one = S::one();
    let mean = (mu - one) / (mu - S::c(2.0));
    let second = (mu - one) / (mu - S::c(3.0));
    Ok((mean, second - mean * mean))
}

impl<S: Scalar> EntryLaw<S> {
    pub fn pareto(mu: S) -> Result<Self> {
        pareto_moments(mu)?;
        Ok(EntryLaw::Pareto { mu })
    }

    /// Raw k-th moment `E xi^k = (mu-1)/(mu-1-k)` of the unstandardized
    /// Pareto variable; finite only for `k < mu - 1`.
    fn pareto_raw_moment(mu: S, k: u32) -> S {
        (mu - S::one()) / (mu - S::one() - S::c(k as f64))
    }

    /// One standardized draw. Gaussian entries come from the stream's
    /// Box–Muller pairs; Pareto entries are inverse-CDF transforms
    /// `xi = (1 - U)^{-1/(mu-1)}` of a single uniform, then shifted and
    /// scaled by the closed-form moments.
    pub fn sample(self, stream: &mut Stream) -> S {
        match self {
            EntryLaw::Gaussian => stream.normal_as(),
            EntryLaw::Pareto { mu } => {
                let u: S = stream.uniform_as();
                let xi = (S::one() - u).powf(-(S::one() / (mu - S::one())));
                let (mean, var) = pareto_moments(mu).expect("mu validated at construction");
                (xi - mean) / var.sqrt()
            }
        }
    }

    /// `P(|X| > c)` for the standardized entry, in closed form.
    pub fn tail_prob(self, c: S) -> S {
        assert!(c > S::zero(), "cutoff must be positive");
        match self {
            EntryLaw::Gaussian => {
                crate::special::erfc(c / S::c(std::f64::consts::SQRT_2))
            }
            EntryLaw::Pareto { mu } => {
                let (mean, var) = pareto_moments(mu).expect("mu validated at construction");
                let s = var.sqrt();
                let upper = mean + s * c; // xi value where X = c
                let lower = mean - s * c; // xi value where X = -c
                let mut p = upper.powf(S::one() - mu);
                if lower > S::one() {
                    // Mass of xi in [1, lower): these standardized values
                    // fall below -c.
                    p += S::one() - lower.powf(S::one() - mu);
                }
                p
            }
        }
    }

    /// First and second moments of the clipped entry `X 1{|X| <= c}`.
    /// Gaussian: the first moment vanishes by symmetry and
    /// `E[X^2 1] = erf(c/sqrt 2) - 2 c phi(c)`. Pareto: exact piecewise
    /// power-law integrals over `xi in [max(1, m - s c), m + s c]`.
    pub fn clipped_moments(self, c: S) -> (S, S) {
        assert!(c > S::zero(), "cutoff must be positive");
        match self {
            EntryLaw::Gaussian => {
                let phi = (-c * c * S::c(0.5)).exp() / S::c((2.0 * std::f64::consts::PI).sqrt());
                let second = erf(c / S::c(std::f64::consts::SQRT_2)) - S::c(2.0) * c * phi;
                (S::zero(), second)
            }
            EntryLaw::Pareto { mu } => {
                let (mean, var) = pareto_moments(mu).expect("mu validated at construction");
                let s = var.sqrt();
                let one = S::one();
                let lo = (mean - s * c).max(one);
                let hi = mean + s * c;
                // ∫ x^k f over [lo, hi] for k = 0, 1, 2.
                let pow = |x: S, e: S| x.powf(e);
                let mass = pow(lo, one - mu) - pow(hi, one - mu);
                let first = (mu - one) / (mu - S::c(2.0)) * (pow(lo, S::c(2.0) - mu) - pow(hi, S::c(2.0) - mu));
                let second = (mu - one) / (mu - S::c(3.0)) * (pow(lo, S::c(3.0) - mu) - pow(hi, S::c(3.0) - mu));
                let m1 = (first - mean * mass) / s;
                let m2 = (second - S::c(2.0) * mean * first + mean * mean * mass) / var;
                (m1, m2)
            }
        }
    }

    /// Standardized fourth moment `E X^4`, used to size Monte Carlo
    /// tolerance bands. `None` when it does not exist (Pareto, `mu <= 5`).
    pub fn fourth_moment(self) -> Option<S> {
        match self {
            EntryLaw::Gaussian => Some(S::c(3.0)),
            EntryLaw::Pareto { mu } => {
                if mu <= S::c(5.0) {
                    return None;
                }
                let m = |k| Self::pareto_raw_moment(mu, k);
                let (mean, var) = pareto_moments(mu).expect("mu validated at construction");
                let central = m(4) - S::c(4.0) * mean * m(3) + S::c(6.0) * mean * mean * m(2)
                    - S::c(3.0) * mean * mean * mean * mean;
                Some(central / (var * var))
            }
        }
    }
}

impl<S: Scalar> std::fmt::Display for EntryLaw<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EntryLaw::Gaussian => write!(f, "gaussian"),
            EntryLaw::Pareto { mu } => write!(f, "pareto({mu})"),
        }
    }
}

/// Real symmetric matrix in packed upper-triangle storage; `entry(j, k)`
/// and `entry(k, j)` read the same slot, so symmetry holds by construction.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricMatrix<S: Scalar> {
    n: usize,
    data: Vec<S>,
}

impl<S: Scalar> SymmetricMatrix<S> {
    #[inline]
    fn tri_index(&self, j: usize, k: usize) -> usize {
        let (a, b) = if j <= k { (j, k) } else { (k, j) };
        a * self.n - a * (a + 1) / 2 + b
    }

    /// Builds from a function of the index pair; `f` is called once per
    /// upper-triangle slot in row-major order.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        assert!(n >= 1, "matrix dimension must be at least 1");
        let mut data = Vec::with_capacity(n * (n + 1) / 2);
        for j in 0..n {
            for k in j..n {
                data.push(f(j, k));
            }
        }
        SymmetricMatrix { n, data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn entry(&self, j: usize, k: usize) -> S {
        self.data[self.tri_index(j, k)]
    }

    /// Full row `j` as a dense vector.
    pub fn row(&self, j: usize) -> Vec<S> {
        (0..self.n).map(|k| self.entry(j, k)).collect()
    }

    /// The principal submatrix with row and column `j` removed.
    pub fn minor(&self, j: usize) -> SymmetricMatrix<S> {
        assert!(j < self.n && self.n > 1);
        let keep: Vec<usize> = (0..self.n).filter(|&i| i != j).collect();
        SymmetricMatrix::from_fn(self.n - 1, |a, b| self.entry(keep[a], keep[b]))
    }

    /// Dense column-major copy (the layout the eigensolver works in).
    pub fn to_dense_col_major(&self) -> Vec<S> {
        let n = self.n;
        let mut out = vec![S::zero(); n * n];
        for j in 0..n {
            for k in j..n {
                let v = self.data[self.tri_index(j, k)];
                out[k * n + j] = v;
                out[j * n + k] = v;
            }
        }
        out
    }

    pub fn trace(&self) -> S {
        (0..self.n).fold(S::zero(), |acc, j| acc + self.entry(j, j))
    }

    /// Squared Frobenius norm, off-diagonal entries counted twice.
    pub fn frobenius_sq(&self) -> S {
        let mut acc = S::zero();
        for j in 0..self.n {
            for k in j..self.n {
                let v = self.entry(j, k);
                let term = v * v;
                acc += if j == k { term } else { term + term };
            }
        }
        acc
    }

    fn map_entries(&self, mut f: impl FnMut(S) -> S) -> SymmetricMatrix<S> {
        SymmetricMatrix { n: self.n, data: self.data.iter().map(|&v| f(v)).collect() }
    }
}

/// Everything needed to draw one matrix: dimension, entry law, seed.
#[derive(Clone, Copy, Debug)]
pub struct WignerConfig<S: Scalar> {
    pub n: usize,
    pub law: EntryLaw<S>,
    pub seed: u64,
}

/// Samples `W = X / sqrt(n)`. The stream is consumed in packed row-major
/// upper-triangle order — `(0,0), (0,1), ..., (0,n-1), (1,1), ...` — which
/// together with the stream's update rule pins the sample down bit for bit.
pub fn sample_wigner<S: Scalar>(config: &WignerConfig<S>) -> SymmetricMatrix<S> {
    assert!(config.n >= 1, "matrix dimension must be at least 1");
    let mut stream = Stream::new(config.seed);
    let scale = S::one() / S::c(config.n as f64).sqrt();
    SymmetricMatrix::from_fn(config.n, |_, _| config.law.sample(&mut stream) * scale)
}

/// Clipping level specification: `cutoff = d_const * n^exponent`, applied to
/// the unscaled entries of `X`.
#[derive(Clone, Copy, Debug)]
pub struct TruncationSpec<S: Scalar> {
    pub exponent: S,
    pub d_const: S,
}

impl<S: Scalar> TruncationSpec<S> {
    pub fn new(exponent: S, d_const: S) -> Result<Self> {
        if !(exponent > S::zero() && exponent <= S::c(0.5)) || !(d_const > S::zero()) {
            return Err(Error::domain(format!(
                "truncation needs exponent in (0, 1/2] and d_const > 0, got {exponent}, {d_const}"
            )));
        }
        Ok(TruncationSpec { exponent, d_const })
    }

    /// The customary clipping level for these ensembles.
    pub fn default_spec() -> Self {
        TruncationSpec { exponent: S::c(0.375), d_const: S::one() }
    }

    pub fn cutoff(&self, n: usize) -> S {
        self.d_const * S::c(n as f64).powf(self.exponent)
    }
}

/// Clipped and rescaled forms of a sampled matrix.
///
/// `hat` clips each entry of `X` at the cutoff (entries of `hat` are still
/// divided by `sqrt n`). `breve` additionally removes the clipped mean and
/// restores unit variance: its entries are
/// `(clip(X) - E clip(X)) / (sigma sqrt n)` with
/// `sigma^2 = Var(clip(X)) = sigma_sq`.
#[derive(Clone, Debug)]
pub struct TruncatedTriple<S: Scalar> {
    pub hat: SymmetricMatrix<S>,
    pub breve: SymmetricMatrix<S>,
    /// Variance of the clipped entry; lies in `(0, 1]`.
    pub sigma_sq: S,
    /// Clipping level in `X` units.
    pub cutoff: S,
    /// Number of packed entries the clip actually changed.
    pub clipped_entries: usize,
}

/// Applies entry clipping to a sampled matrix. `law` must be the law the
/// matrix was drawn from — the centering and rescaling constants come from
/// its closed-form clipped moments, not from the sample.
pub fn truncate<S: Scalar>(
    w: &SymmetricMatrix<S>,
    spec: &TruncationSpec<S>,
    law: EntryLaw<S>,
) -> Result<TruncatedTriple<S>> {
    let n = w.n();
    let cutoff = spec.cutoff(n);
    let sqrt_n = S::c(n as f64).sqrt();
    let (m1, m2) = law.clipped_moments(cutoff);
    let sigma_sq = (m2 - m1 * m1).min(S::one());
    if !(sigma_sq > S::zero()) {
        return Err(Error::DegenerateTruncation { sigma_sq: sigma_sq.as_f64() });
    }
    let mut clipped = 0usize;
    let hat = w.map_entries(|v| {
        if (v * sqrt_n).abs() <= cutoff {
            v
        } else {
            clipped += 1;
            S::zero()
        }
    });
    let sigma = sigma_sq.sqrt();
    let shift = m1 / sqrt_n;
    let breve = hat.map_entries(|v| (v - shift) / sigma);
    Ok(TruncatedTriple { hat, breve, sigma_sq, cutoff, clipped_entries: clipped })
}
