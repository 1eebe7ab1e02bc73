//! Seeded random instances.

use hardylab::{DiskPoint, Laurent, C64};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator for stream `stream` of `seed`. Streams keep tasks independent of each other's draws.
pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// Trigonometric polynomial with degrees in `-max_degree..=max_degree` and
/// coefficients uniform in the square `[-1, 1]²`.
///
/// Both sides are drawn nonempty: with an analytic `f` the Hankel factors vanish and the
/// rival identity readings agree, so such pairs would test nothing.
pub fn trig_poly<R: Rng>(rng: &mut R, max_degree: u32) -> Laurent {
    let d = max_degree.max(1);
    let lo = -(rng.gen_range(1..=d) as i64);
    let hi = rng.gen_range(1..=d) as i64;
    let coeffs = (lo..=hi).map(|_| C64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0))).collect();
    Laurent::new(lo, coeffs)
}

/// Point with `|z| ≤ max_radius < 1`, uniform in radius and angle.
pub fn disk_point<R: Rng>(rng: &mut R, max_radius: f64) -> DiskPoint {
    let r = rng.gen_range(0.0..=max_radius);
    let t = rng.gen_range(0.0..std::f64::consts::TAU);
    DiskPoint::polar(r, t).expect("radius below one")
}
