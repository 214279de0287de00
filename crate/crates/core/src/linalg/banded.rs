use super::CsrMatrix;
use crate::{Error, Result};

/// LU factorization with partial pivoting of a banded matrix.
///
/// Row interchanges widen the upper band from `ku` to `kl + ku`, so each row
/// stores the columns `i - kl ..= i + kl + ku`.
#[derive(Debug, Clone)]
pub struct BandedLu {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    /// Row-major band, `width` entries per row; holds U after factorization.
    band: Vec<f64>,
    /// Multipliers of step `k` for rows `k + 1 ..= k + kl`.
    lower: Vec<f64>,
    pivots: Vec<usize>,
    stats: FactorStats,
}

/// Factorization diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct FactorStats {
    pub n: usize,
    pub lower_bandwidth: usize,
    pub upper_bandwidth: usize,
    pub min_pivot: f64,
    pub max_pivot: f64,
}

impl FactorStats {
    pub fn pivot_ratio(&self) -> f64 {
        if self.max_pivot == 0.0 {
            0.0
        } else {
            self.min_pivot / self.max_pivot
        }
    }
}

impl BandedLu {
    /// Factors a square matrix. Fails with [`Error::SingularSystem`] when the
    /// smallest pivot is at most `tol` times the largest.
    pub fn factor(a: &CsrMatrix, tol: f64) -> Result<BandedLu> {
        if a.nrows() != a.ncols() {
            return Err(Error::InvalidArgument(format!("matrix is {}x{}, not square", a.nrows(), a.ncols())));
        }
        let n = a.nrows();
        let (mut kl, mut ku) = (0, 0);
        for (r, c, _) in a.triplets() {
            if r > c {
                kl = kl.max(r - c);
            } else {
                ku = ku.max(c - r);
            }
        }
        let width = 2 * kl + ku + 1;
        let mut lu = BandedLu {
            n,
            kl,
            ku,
            width,
            band: vec![0.0; n * width],
            lower: vec![0.0; n * kl],
            pivots: vec![0; n],
            stats: FactorStats { n, lower_bandwidth: kl, upper_bandwidth: ku, min_pivot: f64::INFINITY, max_pivot: 0.0 },
        };
        for (r, c, v) in a.triplets() {
            let k = lu.at(r, c);
            lu.band[k] += v;
        }
        let mut min_at = 0;
        for k in 0..n {
            let last_row = (k + kl).min(n - 1);
            let mut p = k;
            let mut best = lu.band[lu.at(k, k)].abs();
            for i in k + 1..=last_row {
                let v = lu.band[lu.at(i, k)].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            lu.pivots[k] = p;
            let last_col = (k + kl + ku).min(n - 1);
            if p != k {
                for j in k..=last_col {
                    let (x, y) = (lu.at(k, j), lu.at(p, j));
                    lu.band.swap(x, y);
                }
            }
            if best < lu.stats.min_pivot {
                lu.stats.min_pivot = best;
                min_at = k;
            }
            lu.stats.max_pivot = lu.stats.max_pivot.max(best);
            if best == 0.0 {
                continue;
            }
            let pivot = lu.band[lu.at(k, k)];
            for i in k + 1..=last_row {
                let ik = lu.at(i, k);
                let m = lu.band[ik] / pivot;
                lu.band[ik] = 0.0;
                lu.lower[k * kl + (i - k - 1)] = m;
                if m == 0.0 {
                    continue;
                }
                let (row_k, row_i) = (lu.at(k, k + 1), lu.at(i, k + 1));
                for off in 0..last_col - k {
                    lu.band[row_i + off] -= m * lu.band[row_k + off];
                }
            }
        }
        if n > 0 && lu.stats.pivot_ratio() <= tol {
            return Err(Error::SingularSystem { index: min_at, ratio: lu.stats.pivot_ratio() });
        }
        Ok(lu)
    }

    fn at(&self, r: usize, c: usize) -> usize {
        r * self.width + (c + self.kl - r)
    }

    pub fn stats(&self) -> FactorStats {
        self.stats
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        assert_eq!(rhs.len(), self.n);
        let (n, kl) = (self.n, self.kl);
        let mut x = rhs.to_vec();
        for k in 0..n {
            x.swap(k, self.pivots[k]);
            let xk = x[k];
            for i in k + 1..=(k + kl).min(n.saturating_sub(1)) {
                x[i] -= self.lower[k * kl + (i - k - 1)] * xk;
            }
        }
        for i in (0..n).rev() {
            let last = (i + kl + self.ku).min(n - 1);
            let base = self.at(i, i);
            let mut s = x[i];
            for j in i + 1..=last {
                s -= self.band[base + (j - i)] * x[j];
            }
            x[i] = s / self.band[base];
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_banded(n: usize, kl: usize, ku: usize, seed: u64) -> CsrMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut t = Vec::new();
        for i in 0..n {
            for j in i.saturating_sub(kl)..=(i + ku).min(n - 1) {
                t.push((i, j, rng.gen_range(-1.0..1.0)));
            }
        }
        CsrMatrix::from_triplets(n, n, t)
    }

    #[test]
    fn matches_dense_solve() {
        for (seed, (kl, ku)) in [(0, 1), (3, 2), (5, 0), (2, 7)].into_iter().enumerate() {
            let a = random_banded(40, kl, ku, seed as u64);
            let b: Vec<f64> = (0..40).map(|i| (i as f64).sin()).collect();
            let x = BandedLu::factor(&a, 1e-14).unwrap().solve(&b);
            let expected = a.to_dense().lu().solve(&DVector::from_vec(b.clone())).unwrap();
            let r: f64 = a.mul_vec(&x).iter().zip(&b).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max);
            let scale = expected.amax();
            assert!(r < 1e-14 * a.norm_inf() * scale, "residual {r}");
            for (u, v) in x.iter().zip(expected.iter()) {
                assert!((u - v).abs() < 1e-8 * scale, "{u} vs {v}");
            }
        }
    }

    #[test]
    fn needs_pivoting_for_zero_diagonal() {
        // saddle-like [[0, 1], [1, 0]]
        let a = CsrMatrix::from_triplets(2, 2, vec![(0, 1, 1.0), (1, 0, 1.0)]);
        let x = BandedLu::factor(&a, 1e-12).unwrap().solve(&[2.0, 3.0]);
        assert_eq!(x, vec![3.0, 2.0]);
    }

    #[test]
    fn detects_singular_matrix() {
        let d = DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 0.0, 2.0, 4.0, 0.0, 0.0, 1.0, 1.0]);
        let t: Vec<_> = (0..3).flat_map(|i| (0..3).map(move |j| (i, j))).map(|(i, j)| (i, j, d[(i, j)])).collect();
        let err = BandedLu::factor(&CsrMatrix::from_triplets(3, 3, t), 1e-12).unwrap_err();
        assert!(matches!(err, Error::SingularSystem { .. }));
    }
}
