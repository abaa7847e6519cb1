//! Seeded random streams.
//!
//! Every randomized operation takes an explicit generator. Concurrent tasks
//! never share one: each derives its own ChaCha stream from the master seed
//! and a task index, so results do not depend on scheduling.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub type SimRng = ChaCha8Rng;

/// Generator for the task identified by `(outer, inner)` under `master_seed`.
///
/// The pair selects a ChaCha stream; distinct pairs give independent streams.
pub fn substream(master_seed: u64, outer: u32, inner: u32) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream((u64::from(outer) << 32) | u64::from(inner));
    rng
}

/// Circularly-symmetric complex Gaussian with total variance `variance`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> Complex64 {
    let scale = (variance / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(scale * re, scale * im)
}
