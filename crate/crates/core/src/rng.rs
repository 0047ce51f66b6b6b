//! Counter-addressed random draws.
//!
//! Every simulated motorist consumes exactly [`WORDS_PER_DRAW`] 32-bit words of
//! a ChaCha8 keystream keyed by the run seed. Draw `i` therefore always reads
//! words `[i·W, (i+1)·W)`, and a worker starting at draw `k` simply seeks to
//! word `k·W`. The output does not depend on how draws are split across
//! workers.

use std::f64::consts::PI;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Four 64-bit values per draw: class choice, willingness-to-pay, and two
/// uniforms for the Box–Muller noise.
pub const WORDS_PER_DRAW: u128 = 8;

/// The random inputs of one draw.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct DrawUniforms {
    pub class: f64,
    pub wtp: f64,
    pub noise: f64,
}

pub struct DrawStream {
    rng: ChaCha8Rng,
}

impl DrawStream {
    /// Positions the stream at the first word of draw `index`.
    pub fn at(seed: u64, index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_word_pos(u128::from(index) * WORDS_PER_DRAW);
        DrawStream { rng }
    }

    /// Uniform in the open interval (0, 1) with 53 random bits.
    fn open_unit(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    /// Consumes the next draw's words.
    pub fn next_draw(&mut self) -> DrawUniforms {
        let class = self.open_unit();
        let wtp = self.open_unit();
        let u1 = self.open_unit();
        let u2 = self.open_unit();
        DrawUniforms {
            class,
            wtp,
            noise: (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos(),
        }
    }
}
