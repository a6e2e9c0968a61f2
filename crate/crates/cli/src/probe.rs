//! Deterministic generic sections used as arguments of identities that
//! must hold for every section.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spraygeom_core::{Field, ProlongSection, PullbackSection, Space};

/// A quadratic polynomial in all coordinates with seeded coefficients.
pub fn polynomial(space: Space, rng: &mut ChaCha8Rng) -> Field {
    let k = space.nvars();
    let mut c = || rng.gen_range(-1.0..1.0);
    let mut terms = vec![Field::constant(c())];
    for i in 0..k {
        let v = Field::coord(i);
        terms.push(v.scale(c()));
        for j in i..k {
            terms.push(v.mul(&Field::coord(j)).scale(c()));
        }
    }
    Field::sum(terms)
}

pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

pub fn prolong_section(space: Space, seed: u64) -> ProlongSection {
    let mut r = rng(seed, 1);
    let z = (0..space.m).map(|_| polynomial(space, &mut r)).collect();
    let v = (0..space.m).map(|_| polynomial(space, &mut r)).collect();
    ProlongSection::new(z, v)
}

pub fn pullback_section(space: Space, seed: u64) -> PullbackSection {
    let mut r = rng(seed, 2);
    PullbackSection::new((0..space.m).map(|_| polynomial(space, &mut r)).collect())
}

pub fn function(space: Space, seed: u64) -> Field {
    polynomial(space, &mut rng(seed, 3))
}
