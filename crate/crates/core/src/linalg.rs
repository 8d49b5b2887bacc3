//! Small dense helpers shared by the regression and covariance modules.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Orthonormal columns `q` and upper-triangular factor `r` (stored row by
/// row, `r[i][j]` for `j >= i`).
pub(crate) type QrFactors<T> = (Vec<Vec<T>>, Vec<Vec<T>>);

/// Thin QR factorization of the column set `cols` (each of equal length) via
/// modified Gram-Schmidt with one reorthogonalization pass.
///
/// Fails when a column is (numerically) linearly dependent on its
/// predecessors; `cell` is only used to label the error.
pub(crate) fn thin_qr<T: Scalar>(cols: &[Vec<T>], cell: usize) -> Result<QrFactors<T>> {
    let k = cols.len();
    let mut q: Vec<Vec<T>> = Vec::with_capacity(k);
    let mut r = vec![vec![T::zero(); k]; k];
    for (j, col) in cols.iter().enumerate() {
        let norm0 = norm(col);
        let mut v = col.clone();
        // Two MGS sweeps keep Q orthonormal to machine precision.
        for _ in 0..2 {
            for (i, qi) in q.iter().enumerate() {
                let proj = dot(qi, &v);
                r[i][j] += proj;
                axpy(&mut v, -proj, qi);
            }
        }
        let nv = norm(&v);
        if nv <= T::of(1e-12) * norm0.max(T::one()) {
            return Err(Error::RankDeficient {
                cell,
                detail: format!("column {j} nearly dependent on predecessors"),
            });
        }
        r[j][j] = nv;
        let inv = nv.recip();
        for x in v.iter_mut() {
            *x *= inv;
        }
        q.push(v);
    }
    Ok((q, r))
}

/// Solve the upper-triangular system `r x = b` in place.
pub(crate) fn back_substitute<T: Scalar>(r: &[Vec<T>], b: &mut [T]) {
    for i in (0..b.len()).rev() {
        let mut s = b[i];
        for j in i + 1..b.len() {
            s -= r[i][j] * b[j];
        }
        b[i] = s / r[i][i];
    }
}

#[inline]
pub(crate) fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

#[inline]
pub(crate) fn norm<T: Scalar>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

#[inline]
pub(crate) fn axpy<T: Scalar>(y: &mut [T], alpha: T, x: &[T]) {
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Ordinary least-squares slope of `ys` against `xs`.
pub(crate) fn ls_slope<T: Scalar>(xs: &[T], ys: &[T]) -> T {
    let n = T::of_usize(xs.len());
    let mx = xs.iter().copied().sum::<T>() / n;
    let my = ys.iter().copied().sum::<T>() / n;
    let mut sxx = T::zero();
    let mut sxy = T::zero();
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qr_orthonormal_and_reconstructs() {
        let cols: Vec<Vec<f64>> = vec![
            vec![1.0; 6],
            (1..=6).map(|t| t as f64).collect(),
            (1..=6).map(|t| (t * t) as f64).collect(),
        ];
        let (q, r) = thin_qr(&cols, 0).unwrap();
        for i in 0..q.len() {
            for j in 0..q.len() {
                let d = dot(&q[i], &q[j]);
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((d - expect).abs() < 1e-13);
            }
        }
        // a_j = sum_i q_i r[i][j]
        for j in 0..cols.len() {
            for t in 0..6 {
                let mut v = 0.0;
                for i in 0..=j {
                    v += q[i][t] * r[i][j];
                }
                assert!((v - cols[j][t]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn qr_detects_dependent_columns() {
        let cols: Vec<Vec<f64>> = vec![vec![1.0, 2.0, 3.0], vec![2.0, 4.0, 6.0]];
        assert!(matches!(
            thin_qr(&cols, 7),
            Err(Error::RankDeficient { cell: 7, .. })
        ));
    }

    #[test]
    fn slope_of_exact_line() {
        let xs: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 - 2.0 * x).collect();
        assert!((ls_slope(&xs, &ys) + 2.0).abs() < 1e-12);
    }
}
