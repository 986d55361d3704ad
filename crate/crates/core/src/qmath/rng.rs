//! Seeded random streams.
//!
//! Every random object in the crate is drawn from a [`Stream`], a ChaCha8
//! keystream addressed by `(master_seed, stream_id)`. Because ChaCha is a
//! counter-mode generator, two streams with different ids never overlap and
//! the values a stream yields do not depend on what any other stream did.
//! Ensemble loops give trial `n` the stream `(seed, n)`, which makes results
//! independent of scheduling and worker count.
//!
//! Consumption is fixed per draw, one 64-bit word per uniform:
//!
//! | draw                         | words |
//! |------------------------------|-------|
//! | [`Stream::uniform`]          | 1     |
//! | [`Stream::normal_pair`]      | 2     |
//! | [`Stream::complex_gaussian`] | 2     |

use std::f64::consts::PI;

use num_complex::Complex64;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TWO_POW_NEG_53: f64 = 1.0 / (1u64 << 53) as f64;

#[derive(Debug, Clone)]
pub struct Stream {
    rng: ChaCha8Rng,
}

impl Stream {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
        rng.set_stream(stream_id);
        Self { rng }
    }

    /// Uniform on `[0, 1)` with 53 bits of resolution.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * TWO_POW_NEG_53
    }

    /// Uniform on `[lo, hi)`.
    #[inline]
    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Uniform integer in `lo..=hi`. Consumes one word.
    pub fn integer_in(&mut self, lo: usize, hi: usize) -> usize {
        assert!(lo <= hi);
        let span = (hi - lo + 1) as f64;
        (lo + (self.uniform() * span) as usize).min(hi)
    }

    /// Two independent standard normals (Box-Muller).
    pub fn normal_pair(&mut self) -> (f64, f64) {
        // 1 - u lies in (0, 1], keeping the log finite
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (2.0 * PI * u2).sin_cos();
        (r * c, r * s)
    }

    /// Standard complex Gaussian: independent real and imaginary parts with
    /// variance 1/2 each, so that `E|z|^2 = 1`.
    pub fn complex_gaussian(&mut self) -> Complex64 {
        let (a, b) = self.normal_pair();
        Complex64::new(a, b) * std::f64::consts::FRAC_1_SQRT_2
    }
}
