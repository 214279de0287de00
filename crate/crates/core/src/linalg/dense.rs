use nalgebra::DMatrix;

use crate::{Error, Result};

/// Kernel and its orthogonal complement from a singular value decomposition.
#[derive(Debug, Clone)]
pub struct NullSpaceSplit {
    /// Orthonormal kernel basis, one column per null vector.
    pub null: DMatrix<f64>,
    /// Orthonormal basis of the complement of the kernel.
    pub range: DMatrix<f64>,
    /// Singular values in descending order, padded with zeros to the column count.
    pub singular_values: Vec<f64>,
}

/// Orthonormal basis of `{x : m x = 0}`. Singular values at most
/// `tol * sigma_max` count as zero.
pub fn null_space(m: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    null_space_split(m, tol).null
}

pub fn null_space_split(m: &DMatrix<f64>, tol: f64) -> NullSpaceSplit {
    let n = m.ncols();
    if n == 0 {
        return NullSpaceSplit { null: DMatrix::zeros(0, 0), range: DMatrix::zeros(0, 0), singular_values: Vec::new() };
    }
    // Reduce a tall matrix to its square triangular factor, pad a wide one
    // with zero rows, so the SVD always yields all n right singular vectors.
    let square = if m.nrows() > n {
        m.clone().qr().r()
    } else {
        let mut padded = DMatrix::zeros(n, n);
        padded.rows_mut(0, m.nrows()).copy_from(m);
        padded
    };
    let svd = square.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let sigma_max = svd.singular_values[order[0]];
    let cut = tol * sigma_max;
    let (mut null_cols, mut range_cols) = (Vec::new(), Vec::new());
    for &k in &order {
        let v = v_t.row(k).transpose();
        if svd.singular_values[k] <= cut {
            null_cols.push(v);
        } else {
            range_cols.push(v);
        }
    }
    let stack = |cols: Vec<nalgebra::DVector<f64>>| {
        if cols.is_empty() {
            DMatrix::zeros(n, 0)
        } else {
            DMatrix::from_columns(&cols)
        }
    };
    NullSpaceSplit {
        null: stack(null_cols),
        range: stack(range_cols),
        singular_values: order.iter().map(|&k| svd.singular_values[k]).collect(),
    }
}

/// Smallest `lambda` with `k x = lambda m x`, for symmetric `k` and
/// symmetric positive definite `m`.
pub fn min_generalized_eigenvalue(k: &DMatrix<f64>, m: &DMatrix<f64>) -> Result<f64> {
    if k.shape() != m.shape() || !k.is_square() {
        return Err(Error::InvalidArgument("pencil matrices must be square and of equal size".into()));
    }
    if k.nrows() == 0 {
        return Err(Error::InvalidArgument("empty pencil".into()));
    }
    let chol = m
        .clone()
        .cholesky()
        .ok_or_else(|| Error::InvalidArgument("mass matrix is not positive definite".into()))?;
    let l = chol.l();
    let x = l.solve_lower_triangular(k).expect("Cholesky factor is nonsingular");
    let c = l.solve_lower_triangular(&x.transpose()).expect("Cholesky factor is nonsingular");
    let sym = (&c + c.transpose()) * 0.5;
    Ok(sym.symmetric_eigenvalues().min())
}
