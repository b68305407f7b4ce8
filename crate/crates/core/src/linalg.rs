//! Small dense linear-algebra helpers on top of `faer`.

use faer::prelude::*;
use faer::{Mat, Side};

/// Ratio of extreme singular values; `inf` for singular or failed decompositions.
pub fn condition_number(m: &Mat<f64>) -> f64 {
    if m.nrows() == 0 {
        return 1.0;
    }
    match m.singular_values() {
        Ok(s) => {
            let max = s.iter().cloned().fold(0.0, f64::max);
            let min = s.iter().cloned().fold(f64::INFINITY, f64::min);
            if min > 0.0 {
                max / min
            } else {
                f64::INFINITY
            }
        }
        Err(_) => f64::INFINITY,
    }
}

/// Solves `m x = rhs` with a symmetric positive definite `m`.
pub fn spd_solve(m: &Mat<f64>, rhs: &Mat<f64>) -> Mat<f64> {
    if m.nrows() == 0 {
        return Mat::zeros(0, rhs.ncols());
    }
    match m.llt(Side::Lower) {
        Ok(llt) => llt.solve(rhs),
        Err(_) => m.partial_piv_lu().solve(rhs),
    }
}

/// Solves a general square system by LU with partial pivoting.
pub fn lu_solve(m: &Mat<f64>, rhs: &Mat<f64>) -> Mat<f64> {
    if m.nrows() == 0 {
        return Mat::zeros(0, rhs.ncols());
    }
    m.partial_piv_lu().solve(rhs)
}

/// Largest generalized eigenvalue of `a x = lambda b x`, `a` symmetric, `b` SPD.
pub fn max_generalized_eigenvalue(a: &Mat<f64>, b: &Mat<f64>) -> f64 {
    let n = a.nrows();
    if n == 0 {
        return 0.0;
    }
    let l = match b.llt(Side::Lower) {
        Ok(llt) => llt.L().to_owned(),
        Err(_) => return f64::INFINITY,
    };
    // C = L^{-1} A L^{-T}
    let linv = l.partial_piv_lu().solve(Mat::<f64>::identity(n, n));
    let c = &linv * a * linv.transpose();
    let c = Mat::from_fn(n, n, |i, j| 0.5 * (c[(i, j)] + c[(j, i)]));
    c.self_adjoint_eigenvalues(Side::Lower)
        .map(|e| e.into_iter().fold(f64::NEG_INFINITY, f64::max))
        .unwrap_or(f64::INFINITY)
}

/// `v^T m w` for dense `m`.
pub fn bilinear(m: &Mat<f64>, v: &[f64], w: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..m.nrows() {
        let mut r = 0.0;
        for j in 0..m.ncols() {
            r += m[(i, j)] * w[j];
        }
        s += v[i] * r;
    }
    s
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Dense matrix-vector product.
pub fn matvec(m: &Mat<f64>, v: &[f64]) -> Vec<f64> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)] * v[j]).sum())
        .collect()
}
