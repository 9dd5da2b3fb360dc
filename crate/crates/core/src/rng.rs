//! Deterministic random stream.
//!
//! Every sampled matrix in this crate is a pure function of a single `u64`
//! seed. The generator is SplitMix64: state advances by the golden-ratio
//! increment and each output is the finalizer mix of the new state. The
//! update rule is small enough to restate in full, which is the point — a
//! port in any language reproduces the same matrices bit for bit:
//!
//! ```text
//! state += 0x9e3779b97f4a7c15
//! z = state
//! z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9
//! z = (z ^ (z >> 27)) * 0x94d049bb133111eb
//! output = z ^ (z >> 31)
//! ```
//!
//! Uniforms take the top 53 bits, `u = (output >> 11) * 2^-53 ∈ [0, 1)`.
//! Normals are Box–Muller pairs (no rejection step, so the number of raw
//! draws per variate is fixed); the sine partner of each pair is held back
//! and returned on the next call.

use crate::scalar::Scalar;

pub const GOLDEN_GAMMA: u64 = 0x9e3779b97f4a7c15;
const MIX_1: u64 = 0xbf58476d1ce4e5b9;
const MIX_2: u64 = 0x94d049bb133111eb;

/// SplitMix64 finalizer; also the building block of seed derivation.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(MIX_1);
    z = (z ^ (z >> 27)).wrapping_mul(MIX_2);
    z ^ (z >> 31)
}

/// Deterministic random stream handle. Cloning forks the exact state.
#[derive(Clone, Debug)]
pub struct Stream {
    state: u64,
    spare_normal: Option<f64>,
}

impl Stream {
    pub fn new(seed: u64) -> Self {
        Stream { state: seed, spare_normal: None }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }

    /// Uniform on `[0, 1)` with 53-bit resolution.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal via Box–Muller. Pairs are consumed cosine first.
    pub fn normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        // 1 - u ∈ (0, 1], keeps the log argument away from zero.
        let r = (-2.0 * (1.0 - self.uniform()).ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * self.uniform();
        self.spare_normal = Some(r * theta.sin());
        r * theta.cos()
    }

    /// Uniform as the requested scalar type (rounded from the f64 draw, so
    /// f32 streams stay deterministic too).
    #[inline]
    pub fn uniform_as<S: Scalar>(&mut self) -> S {
        S::c(self.uniform())
    }

    pub fn normal_as<S: Scalar>(&mut self) -> S {
        S::c(self.normal())
    }
}
