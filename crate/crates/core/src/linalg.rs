//! Dense numerical kernels shared by the spectral routes.

use nalgebra::DMatrix;

/// Relative tolerance below which an eigenvalue counts as zero.
pub const ZERO_EIGEN_REL_TOL: f64 = 1e-9;

/// Matrices at or below this order go through nalgebra; larger ones through
/// faer's blocked routines.
const SMALL_EIGEN_DIM: usize = 16;

/// Absolute threshold for "zero" eigenvalues given the spectrum's largest value.
///
/// Scale-relative with a floor of 1.0, so unit-weight and heavily weighted
/// graphs are thresholded consistently.
pub fn zero_threshold(largest: f64) -> f64 {
    ZERO_EIGEN_REL_TOL * largest.abs().max(1.0)
}

/// All eigenvalues of a symmetric matrix, ascending. Only the lower triangle is read.
pub fn symmetric_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    assert!(m.is_square(), "eigenvalues of a non-square matrix");
    let n = m.nrows();
    if n == 0 {
        return Vec::new();
    }
    let mut values: Vec<f64> = if n <= SMALL_EIGEN_DIM {
        m.clone().symmetric_eigenvalues().iter().copied().collect()
    } else {
        let mat = faer::Mat::<f64>::from_fn(n, n, |i, j| m[(i, j)]);
        mat.selfadjoint_eigenvalues(faer::Side::Lower)
    };
    values.sort_by(f64::total_cmp);
    values
}

/// `log det(m)` for a symmetric positive definite matrix; `None` if the
/// Cholesky factorisation fails.
pub fn cholesky_log_det(m: &DMatrix<f64>) -> Option<f64> {
    let n = m.nrows();
    if n == 0 {
        return Some(0.0);
    }
    let diag: Vec<f64> = if n <= SMALL_EIGEN_DIM {
        let chol = m.clone().cholesky()?;
        chol.l_dirty().diagonal().iter().copied().collect()
    } else {
        let mat = faer::Mat::<f64>::from_fn(n, n, |i, j| m[(i, j)]);
        let l = mat.cholesky(faer::Side::Lower).ok()?.compute_l();
        (0..n).map(|i| l.read(i, i)).collect()
    };
    let mut acc = 0.0;
    for d in diag {
        if !(d > 0.0) {
            return None;
        }
        acc += d.ln();
    }
    Some(2.0 * acc)
}

/// Exact determinant of an integer-valued matrix by fraction-free Bareiss
/// elimination. Returns `None` if an entry is not an integer or the
/// intermediate minors overflow `i128`.
pub fn exact_determinant(m: &DMatrix<f64>) -> Option<i128> {
    assert!(m.is_square());
    let n = m.nrows();
    if n == 0 {
        return Some(1);
    }
    let mut a = vec![vec![0i128; n]; n];
    for i in 0..n {
        for j in 0..n {
            let x = m[(i, j)];
            if x.fract() != 0.0 || x.abs() > 9.0e15 {
                return None;
            }
            a[i][j] = x as i128;
        }
    }
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            let swap = (k + 1..n).find(|&r| a[r][k] != 0);
            match swap {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return Some(0),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let lhs = a[i][j].checked_mul(a[k][k])?;
                let rhs = a[i][k].checked_mul(a[k][j])?;
                a[i][j] = lhs.checked_sub(rhs)? / prev;
            }
        }
        prev = a[k][k];
    }
    Some(sign * a[n - 1][n - 1])
}

/// `|a - b| / max(|a|, |b|)`, zero when both vanish.
pub fn relative_difference(a: f64, b: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Largest `|m[i,j] - m[j,i]|`.
pub fn max_asymmetry(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..i {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}
