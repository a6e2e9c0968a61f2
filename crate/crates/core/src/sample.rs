//! Deterministic sample points.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::field::Space;

/// Sampling policy: `x` uniform in `[x_min, x_max]^n`, every fiber
/// coordinate of magnitude uniform in `[y_min, y_max]` with a random sign.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sampling {
    pub points: usize,
    pub seed: u64,
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Default for Sampling {
    fn default() -> Self {
        Sampling {
            points: 100,
            seed: 42,
            x_min: -1.0,
            x_max: 1.0,
            y_min: 0.5,
            y_max: 2.0,
        }
    }
}

impl Sampling {
    pub fn with_points(mut self, points: usize) -> Self {
        self.points = points;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Points as `[x.., y..]` rows.
    pub fn generate(&self, space: Space) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        (0..self.points)
            .map(|_| {
                let mut p = Vec::with_capacity(space.nvars());
                for _ in 0..space.n {
                    p.push(rng.gen_range(self.x_min..=self.x_max));
                }
                for _ in 0..space.m {
                    let mag = rng.gen_range(self.y_min..=self.y_max);
                    p.push(if rng.gen_bool(0.5) { mag } else { -mag });
                }
                p
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_and_in_range() {
        let s = Space::new(2, 3);
        let a = Sampling::default().generate(s);
        let b = Sampling::default().generate(s);
        assert_eq!(a, b);
        assert_eq!(a.len(), 100);
        for p in &a {
            assert!(p[..2].iter().all(|x| (-1.0..=1.0).contains(x)));
            assert!(p[2..].iter().all(|y| (0.5..=2.0).contains(&y.abs())));
        }
        let c = Sampling::default().with_seed(7).generate(s);
        assert_ne!(a, c);
    }
}
