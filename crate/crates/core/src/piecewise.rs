//! Regular-partition piecewise-polynomial least squares.
//!
//! A model is a regular partition of the index set `{1..n}` into `m` cells,
//! with a polynomial of degree at most `r` fitted independently on each cell
//! (cells have disjoint support, so the global projection decouples). The
//! cell-local basis is the monomials `1, t, ..., t^r` in the within-cell
//! index `t = 1..len`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{back_substitute, dot, thin_qr, QrFactors};
use crate::scalar::Scalar;

/// A regular partition of `{1..n}` into `m` cells with polynomial degree `r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PartitionModel {
    n: usize,
    m: usize,
    r: usize,
}

impl PartitionModel {
    /// Build a model, validating that every cell holds at least `r + 1`
    /// points so the within-cell design has full rank.
    pub fn new(n: usize, m: usize, r: usize) -> Result<Self> {
        if m < 1 || m > n {
            return Err(Error::InvalidPartition(format!(
                "m = {m} outside 1..={n}"
            )));
        }
        if n / m < r + 1 {
            return Err(Error::InvalidPartition(format!(
                "degree {r} needs cells of length >= {}, but n = {n}, m = {m} gives a shortest cell of {}",
                r + 1,
                n / m
            )));
        }
        Ok(Self { n, m, r })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cells(&self) -> usize {
        self.m
    }

    pub fn degree(&self) -> usize {
        self.r
    }

    /// Model dimension `(r + 1) * m`.
    pub fn dim(&self) -> usize {
        (self.r + 1) * self.m
    }

    /// Inclusive 1-based `(start, end)` bounds of every cell.
    pub fn bounds(&self) -> Vec<(usize, usize)> {
        cell_bounds(self.n, self.m).expect("validated at construction")
    }
}

/// Inclusive 1-based index ranges of the regular partition of `{1..n}` into
/// `m` cells: cell `j` holds the indices `i` with `(j-1)*n < i*m <= j*n`.
/// Cell lengths take at most the two values `floor(n/m)` and `floor(n/m)+1`.
pub fn cell_bounds(n: usize, m: usize) -> Result<Vec<(usize, usize)>> {
    if m < 1 || m > n {
        return Err(Error::InvalidPartition(format!("m = {m} outside 1..={n}")));
    }
    Ok((1..=m)
        .map(|j| ((j - 1) * n / m + 1, j * n / m))
        .collect())
}

/// Result of a piecewise least-squares fit.
#[derive(Debug, Clone)]
pub struct PiecewiseFit<T: Scalar> {
    pub model: PartitionModel,
    /// Per-cell coefficients in the local basis `1, t, ..., t^r`,
    /// `t = 1..len`.
    pub coefficients: Vec<Vec<T>>,
    /// Fitted values for all `n` observations.
    pub fitted: Vec<T>,
}

impl<T: Scalar> PiecewiseFit<T> {
    /// Residuals `y - fitted`.
    pub fn residuals(&self, y: &[T]) -> Vec<T> {
        y.iter().zip(&self.fitted).map(|(&a, &b)| a - b).collect()
    }
}

// Orthonormal within-cell polynomial basis for a cell of length `len`.
// Columns are built from the scaled monomials (t/len)^k to keep the QR
// well conditioned; the returned R refers to the scaled columns.
fn cell_basis<T: Scalar>(len: usize, r: usize, cell: usize) -> Result<QrFactors<T>> {
    let inv_len = T::of_usize(len).recip();
    let cols: Vec<Vec<T>> = (0..=r)
        .map(|k| {
            (1..=len)
                .map(|t| (T::of_usize(t) * inv_len).powi(k as i32))
                .collect()
        })
        .collect();
    thin_qr(&cols, cell)
}

pub(crate) struct CellProjector<T: Scalar> {
    pub len: usize,
    pub q: Vec<Vec<T>>,
    r_factor: Vec<Vec<T>>,
}

impl<T: Scalar> CellProjector<T> {
    pub(crate) fn new(len: usize, degree: usize, cell: usize) -> Result<Self> {
        let (q, r_factor) = cell_basis(len, degree, cell)?;
        Ok(Self { len, q, r_factor })
    }

    /// Project `y` (length `len`) onto the polynomial space; returns the
    /// fitted values and the coefficients in the local monomial basis.
    fn project(&self, y: &[T]) -> (Vec<T>, Vec<T>) {
        let coords: Vec<T> = self.q.iter().map(|qk| dot(qk, y)).collect();
        let mut fitted = vec![T::zero(); self.len];
        for (qk, &c) in self.q.iter().zip(&coords) {
            for (f, &qv) in fitted.iter_mut().zip(qk) {
                *f += c * qv;
            }
        }
        // Coefficients of the scaled basis, then undo the (t/len)^k scaling.
        let mut beta = coords;
        back_substitute(&self.r_factor, &mut beta);
        let inv_len = T::of_usize(self.len).recip();
        let mut scale = T::one();
        for b in beta.iter_mut() {
            *b *= scale;
            scale *= inv_len;
        }
        (fitted, beta)
    }
}

/// Least-squares fit of `y` on the piecewise-polynomial space of `model`.
pub fn fit_piecewise<T: Scalar>(y: &[T], model: &PartitionModel) -> Result<PiecewiseFit<T>> {
    if y.len() != model.n() {
        return Err(Error::DimensionMismatch(format!(
            "series length {} != model n {}",
            y.len(),
            model.n()
        )));
    }
    let bounds = model.bounds();
    // Cells come in at most two lengths; build each projector once.
    let mut projectors: Vec<(usize, CellProjector<T>)> = Vec::with_capacity(2);
    let mut fitted = vec![T::zero(); model.n()];
    let mut coefficients = Vec::with_capacity(model.cells());
    for (cell, &(start, end)) in bounds.iter().enumerate() {
        let len = end - start + 1;
        if !projectors.iter().any(|(l, _)| *l == len) {
            projectors.push((len, CellProjector::new(len, model.degree(), cell)?));
        }
        let proj = &projectors.iter().find(|(l, _)| *l == len).unwrap().1;
        let (f, beta) = proj.project(&y[start - 1..end]);
        fitted[start - 1..end].copy_from_slice(&f);
        coefficients.push(beta);
    }
    Ok(PiecewiseFit { model: *model, coefficients, fitted })
}

/// The least-squares contrast `(1/n) * sum (y_i - fitted_i)^2`.
pub fn empirical_contrast<T: Scalar>(y: &[T], fit: &PiecewiseFit<T>) -> Result<T> {
    if y.len() != fit.fitted.len() {
        return Err(Error::DimensionMismatch(format!(
            "series length {} != fit length {}",
            y.len(),
            fit.fitted.len()
        )));
    }
    let ss: T = y
        .iter()
        .zip(&fit.fitted)
        .map(|(&a, &b)| (a - b) * (a - b))
        .sum();
    Ok(ss / T::of_usize(y.len()))
}

/// Contrasts of the fits for every partition size `m = 1..=m_max`, in order.
#[derive(Debug, Clone)]
pub struct ContrastCurve<T: Scalar> {
    pub n: usize,
    pub degree: usize,
    pub contrasts: Vec<T>,
}

impl<T: Scalar> ContrastCurve<T> {
    pub fn m_max(&self) -> usize {
        self.contrasts.len()
    }

    /// Model dimensions `(r + 1) * m` aligned with `contrasts`.
    pub fn dims(&self) -> Vec<usize> {
        (1..=self.m_max()).map(|m| (self.degree + 1) * m).collect()
    }
}

/// Empirical contrast for every `m = 1..=m_max` (fits run in parallel).
pub fn contrast_curve<T: Scalar>(y: &[T], r: usize, m_max: usize) -> Result<ContrastCurve<T>> {
    let n = y.len();
    if m_max < 1 || m_max * (r + 1) > n {
        return Err(Error::InvalidPartition(format!(
            "m_max = {m_max} invalid for n = {n}, degree {r}"
        )));
    }
    let contrasts = (1..=m_max)
        .into_par_iter()
        .map(|m| {
            let model = PartitionModel::new(n, m, r)?;
            let fit = fit_piecewise(y, &model)?;
            empirical_contrast(y, &fit)
        })
        .collect::<Result<Vec<T>>>()?;
    Ok(ContrastCurve { n, degree: r, contrasts })
}
