use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::mesh::Point2;
use crate::{Error, Result};

/// Closed-form Stokes solution on the unit square.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Problem {
    /// `v = (-20xy^3, 5y^4 - 5x^4)`, `p = -60x^2 y + 20y^3 + 5`.
    Griffiths,
    /// `u = (y^2, x^2)`, `p = x + y - 1`, reproduced exactly by both elements.
    Poly,
}

/// Exact fields at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactFields {
    pub v: [f64; 2],
    /// `grad_v[c][d] = d v_c / d x_d`.
    pub grad_v: [[f64; 2]; 2],
    pub p: f64,
    pub grad_p: [f64; 2],
}

pub fn griffiths_exact(x: f64, y: f64) -> ExactFields {
    ExactFields {
        v: [-20.0 * x * y.powi(3), 5.0 * y.powi(4) - 5.0 * x.powi(4)],
        grad_v: [[-20.0 * y.powi(3), -60.0 * x * y * y], [-20.0 * x.powi(3), 20.0 * y.powi(3)]],
        p: -60.0 * x * x * y + 20.0 * y.powi(3) + 5.0,
        grad_p: [-120.0 * x * y, -60.0 * x * x + 60.0 * y * y],
    }
}

pub fn poly_exact(x: f64, y: f64) -> ExactFields {
    ExactFields {
        v: [y * y, x * x],
        grad_v: [[0.0, 2.0 * y], [2.0 * x, 0.0]],
        p: x + y - 1.0,
        grad_p: [1.0, 1.0],
    }
}

impl Problem {
    pub fn exact(self, p: Point2) -> ExactFields {
        match self {
            Problem::Griffiths => griffiths_exact(p.x, p.y),
            Problem::Poly => poly_exact(p.x, p.y),
        }
    }

    /// `-nu lap(v) + grad(p)`.
    pub fn body_force(self, p: Point2, nu: f64) -> [f64; 2] {
        let (x, y) = (p.x, p.y);
        match self {
            Problem::Griffiths => [(nu - 1.0) * 120.0 * x * y, (nu - 1.0) * (60.0 * x * x - 60.0 * y * y)],
            Problem::Poly => [1.0 - 2.0 * nu, 1.0 - 2.0 * nu],
        }
    }
}

impl FromStr for Problem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "griffiths" => Ok(Problem::Griffiths),
            "poly" => Ok(Problem::Poly),
            _ => Err(Error::InvalidArgument(format!("unknown problem '{s}' (expected griffiths or poly)"))),
        }
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Problem::Griffiths => "griffiths",
            Problem::Poly => "poly",
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn laplacian(problem: Problem, p: Point2) -> [f64; 2] {
        let h = 1e-3;
        let mut out = [0.0; 2];
        for c in 0..2 {
            let f = |q: Point2| problem.exact(q).v[c];
            out[c] = (f(Point2::new(p.x + h, p.y)) + f(Point2::new(p.x - h, p.y)) + f(Point2::new(p.x, p.y + h))
                + f(Point2::new(p.x, p.y - h))
                - 4.0 * f(p))
                / (h * h);
        }
        out
    }

    #[test]
    fn griffiths_at_origin() {
        let e = griffiths_exact(0.0, 0.0);
        assert_eq!((e.v, e.p), ([0.0, 0.0], 5.0));
    }

    #[test]
    fn momentum_and_continuity_hold() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for problem in [Problem::Griffiths, Problem::Poly] {
            for _ in 0..100 {
                let p = Point2::new(rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0));
                let e = problem.exact(p);
                assert!((e.grad_v[0][0] + e.grad_v[1][1]).abs() < 1e-12);
                for nu in [1.0, 0.3] {
                    let lap = laplacian(problem, p);
                    let f = problem.body_force(p, nu);
                    for c in 0..2 {
                        assert!((-nu * lap[c] + e.grad_p[c] - f[c]).abs() < 1e-4);
                    }
                }
            }
        }
    }

    #[test]
    fn griffiths_is_force_free_at_unit_viscosity() {
        assert_eq!(Problem::Griffiths.body_force(Point2::new(0.3, 0.8), 1.0), [0.0, 0.0]);
        assert_eq!(Problem::Poly.body_force(Point2::new(0.3, 0.8), 1.0), [-1.0, -1.0]);
    }

    #[test]
    fn gradients_match_differences() {
        let h = 1e-6;
        for problem in [Problem::Griffiths, Problem::Poly] {
            let p = Point2::new(0.37, 0.61);
            let e = problem.exact(p);
            let ex = problem.exact(Point2::new(p.x + h, p.y));
            let ey = problem.exact(Point2::new(p.x, p.y + h));
            for c in 0..2 {
                assert!(((ex.v[c] - e.v[c]) / h - e.grad_v[c][0]).abs() < 1e-4);
                assert!(((ey.v[c] - e.v[c]) / h - e.grad_v[c][1]).abs() < 1e-4);
            }
            assert!(((ex.p - e.p) / h - e.grad_p[0]).abs() < 1e-4);
            assert!(((ey.p - e.p) / h - e.grad_p[1]).abs() < 1e-4);
        }
    }
}
