use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::mesh::{Patch, PatchClass, Point2};

/// Largest shape ratio accepted for random patches.
pub const MAX_REGULARITY: f64 = 5.0;

/// A random patch of the given class with regularity ratio at most
/// [`MAX_REGULARITY`], placed by a random similarity transform.
pub fn random_patch<R: Rng>(class: PatchClass, rng: &mut R) -> Patch {
    loop {
        let points = match class {
            PatchClass::Type1 => {
                let mut pts: Vec<Point2> = (0..3)
                    .map(|k| {
                        let theta = 2.0 * PI * k as f64 / 3.0 + rng.gen_range(-0.4..0.4);
                        polar(rng.gen_range(0.5..1.5), theta)
                    })
                    .collect();
                pts.push(Point2::new(0.0, 0.0));
                pts
            }
            PatchClass::Type2 | PatchClass::Type3 => {
                let mut theta = rng.gen_range(0.0..2.0 * PI);
                let mut pts = Vec::with_capacity(5);
                for k in 0..4 {
                    if k > 0 {
                        theta += rng.gen_range(0.5..1.9);
                    }
                    pts.push(polar(rng.gen_range(0.5..1.5), theta));
                }
                pts.push(Point2::new(0.0, 0.0));
                pts
            }
        };
        let scale = rng.gen_range(0.1..10.0);
        let angle = rng.gen_range(0.0..2.0 * PI);
        let shift = Point2::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
        let (c, s) = (angle.cos(), angle.sin());
        let placed: Vec<Point2> = points
            .iter()
            .map(|p| Point2::new(scale * (c * p.x - s * p.y) + shift.x, scale * (s * p.x + c * p.y) + shift.y))
            .collect();
        if let Ok(patch) = Patch::from_points(&placed, class) {
            if patch.regularity_ratio() <= MAX_REGULARITY {
                return patch;
            }
        }
    }
}

fn polar(r: f64, theta: f64) -> Point2 {
    Point2::new(r * theta.cos(), r * theta.sin())
}

/// `count` random patches from a seeded generator.
pub fn random_patches(class: PatchClass, count: usize, seed: u64) -> Vec<Patch> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_patch(class, &mut rng)).collect()
}

/// Uniform random values in `[-1, 1]`.
pub fn random_pressure<R: Rng>(n: usize, rng: &mut R) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_and_regular() {
        for class in [PatchClass::Type1, PatchClass::Type2, PatchClass::Type3] {
            let a = random_patches(class, 20, 11);
            let b = random_patches(class, 20, 11);
            assert_eq!(a, b);
            assert!(a.iter().all(|p| p.regularity_ratio() <= MAX_REGULARITY && p.class == class));
        }
    }
}
