use crate::{Error, Result};

/// Symmetric triangle quadrature in barycentric coordinates. Weights sum to
/// one; multiply by the element area when integrating.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub degree: usize,
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn iter(&self) -> impl Iterator<Item = ([f64; 3], f64)> + '_ {
        self.points.iter().copied().zip(self.weights.iter().copied())
    }
}

/// Returns a rule exact for polynomials of total degree `degree` (at most 5).
///
/// Degrees 0-1 use the centroid, degree 2 the three midside points and
/// degrees 3-5 the seven-point degree-5 rule.
pub fn quadrature(degree: usize) -> Result<QuadratureRule> {
    match degree {
        0 | 1 => Ok(QuadratureRule { degree: 1, points: vec![[1.0 / 3.0; 3]], weights: vec![1.0] }),
        2 => Ok(QuadratureRule {
            degree: 2,
            points: vec![[0.5, 0.5, 0.0], [0.0, 0.5, 0.5], [0.5, 0.0, 0.5]],
            weights: vec![1.0 / 3.0; 3],
        }),
        3..=5 => Ok(seven_point()),
        _ => Err(Error::InvalidArgument(format!("no quadrature rule of degree {degree} (maximum 5)"))),
    }
}

fn seven_point() -> QuadratureRule {
    let s15 = 15f64.sqrt();
    let a = (6.0 - s15) / 21.0;
    let b = (6.0 + s15) / 21.0;
    let wa = (155.0 - s15) / 1200.0;
    let wb = (155.0 + s15) / 1200.0;
    let third = 1.0 / 3.0;
    let orbit = |t: f64| {
        let u = 1.0 - 2.0 * t;
        [[t, t, u], [t, u, t], [u, t, t]]
    };
    let mut points = vec![[third; 3]];
    points.extend(orbit(a));
    points.extend(orbit(b));
    let weights = vec![9.0 / 40.0, wa, wa, wa, wb, wb, wb];
    QuadratureRule { degree: 5, points, weights }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: u32) -> f64 {
        (1..=n).map(f64::from).product()
    }

    /// Integral of `L1^a L2^b L3^c` over a unit-area triangle.
    fn moment(a: u32, b: u32, c: u32) -> f64 {
        2.0 * factorial(a) * factorial(b) * factorial(c) / factorial(a + b + c + 2)
    }

    #[test]
    fn weights_sum_to_one() {
        for d in 0..=5 {
            let q = quadrature(d).unwrap();
            assert!((q.weights.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn exact_moments() {
        for d in 0..=5usize {
            let q = quadrature(d).unwrap();
            for a in 0..=d as u32 {
                for b in 0..=(d as u32 - a) {
                    for c in 0..=(d as u32 - a - b) {
                        let approx: f64 = q.iter().map(|(l, w)| w * l[0].powi(a as i32) * l[1].powi(b as i32) * l[2].powi(c as i32)).sum();
                        let exact = moment(a, b, c);
                        assert!((approx - exact).abs() <= 1e-14 * exact, "degree {d}: L^({a},{b},{c}) {approx} vs {exact}");
                    }
                }
            }
        }
    }

    #[test]
    fn triple_product() {
        let q = quadrature(5).unwrap();
        let v: f64 = q.iter().map(|(l, w)| w * l[0] * l[1] * l[2]).sum();
        assert!((v - 1.0 / 60.0).abs() < 1e-16);
    }

    #[test]
    fn unsupported_degree() {
        assert!(quadrature(6).is_err());
    }
}
