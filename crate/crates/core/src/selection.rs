//! Penalized model choice and the dimension-jump slope heuristic.
//!
//! The calibration constant multiplies a known penalty shape; as it grows
//! from zero the selected model walks down the lower convex hull of the
//! points `(shape(m), contrast(m))`. The exact breakpoints of that walk are
//! computed here (no kappa grid), and the dimension jump picks the
//! breakpoint with the largest drop in model dimension.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Index (1-based model id `m`) minimizing `contrast + penalty`, ties broken
/// toward the smallest `m`.
pub fn select_min<T: Scalar>(contrasts: &[T], penalties: &[T]) -> Result<usize> {
    if contrasts.is_empty() || contrasts.len() != penalties.len() {
        return Err(if contrasts.is_empty() {
            Error::EmptyCollection
        } else {
            Error::DimensionMismatch(format!(
                "{} contrasts vs {} penalties",
                contrasts.len(),
                penalties.len()
            ))
        });
    }
    let mut best = 0usize;
    let mut best_val = contrasts[0] + penalties[0];
    for i in 1..contrasts.len() {
        let v = contrasts[i] + penalties[i];
        if v < best_val {
            best = i;
            best_val = v;
        }
    }
    Ok(best + 1)
}

/// The exact piecewise-constant map `kappa -> m_hat(kappa)`.
///
/// `breakpoints[0] == 0`; `chosen[b]` is the argmin on
/// `[breakpoints[b], breakpoints[b+1])`, the last interval extending to
/// infinity.
#[derive(Debug, Clone)]
pub struct SelectionPath<T: Scalar> {
    pub breakpoints: Vec<T>,
    pub chosen: Vec<usize>,
    pub contrasts: Vec<T>,
    pub shapes: Vec<T>,
}

impl<T: Scalar> SelectionPath<T> {
    /// Selected model at a given penalty constant.
    pub fn model_at(&self, kappa: T) -> usize {
        // Last interval whose left endpoint is <= kappa.
        let mut idx = 0;
        for (b, &bp) in self.breakpoints.iter().enumerate() {
            if bp <= kappa {
                idx = b;
            } else {
                break;
            }
        }
        self.chosen[idx]
    }
}

/// Compute the exact selection path for positive `shapes` by walking the
/// lower convex hull of `(shape, contrast)` from the kappa = 0 argmin toward
/// ever smaller shapes.
pub fn regularization_path<T: Scalar>(
    contrasts: &[T],
    shapes: &[T],
) -> Result<SelectionPath<T>> {
    if contrasts.is_empty() {
        return Err(Error::EmptyCollection);
    }
    if contrasts.len() != shapes.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} contrasts vs {} shapes",
            contrasts.len(),
            shapes.len()
        )));
    }
    if shapes.iter().any(|&s| !(s > T::zero())) {
        return Err(Error::Domain("shapes must be strictly positive".into()));
    }

    // Duplicate (shape, contrast) points collapse onto the smallest m.
    let mut active: Vec<usize> = Vec::with_capacity(contrasts.len());
    for i in 0..contrasts.len() {
        let dup = active
            .iter()
            .any(|&j| shapes[j] == shapes[i] && contrasts[j] == contrasts[i]);
        if !dup {
            active.push(i);
        }
    }

    let mut breakpoints = vec![T::zero()];
    let mut chosen = Vec::new();

    // argmin at kappa = 0 (contrast alone, ties toward smaller m).
    let mut cur = active[0];
    for &i in &active[1..] {
        if contrasts[i] < contrasts[cur] {
            cur = i;
        }
    }
    chosen.push(cur + 1);

    let mut kappa = T::zero();
    loop {
        // Earliest crossing against a strictly smaller shape. A crossing
        // computed (by rounding) slightly before the current kappa still
        // means the candidate beats the incumbent from here on, so it is
        // clamped rather than skipped.
        let mut next_kappa = T::infinity();
        let mut candidates: Vec<usize> = Vec::new();
        for &i in &active {
            if shapes[i] >= shapes[cur] {
                continue;
            }
            let cross =
                ((contrasts[i] - contrasts[cur]) / (shapes[cur] - shapes[i])).max(kappa);
            if cross < next_kappa {
                next_kappa = cross;
                candidates.clear();
                candidates.push(i);
            } else if cross == next_kappa {
                candidates.push(i);
            }
        }
        if candidates.is_empty() {
            break;
        }
        // The interval beyond the crossing belongs to the candidate with the
        // smallest shape (steepest improvement), then the smallest m.
        let mut owner = candidates[0];
        for &c in &candidates[1..] {
            if shapes[c] < shapes[owner] || (shapes[c] == shapes[owner] && c < owner) {
                owner = c;
            }
        }
        if next_kappa > kappa {
            breakpoints.push(next_kappa);
            chosen.push(owner + 1);
        } else {
            // Zero-length reign of the incumbent: replace its label.
            *chosen.last_mut().expect("nonempty") = owner + 1;
        }
        kappa = next_kappa;
        cur = owner;
    }

    Ok(SelectionPath {
        breakpoints,
        chosen,
        contrasts: contrasts.to_vec(),
        shapes: shapes.to_vec(),
    })
}

/// Result of the dimension-jump calibration.
#[derive(Debug, Clone)]
pub struct DimensionJumpResult<T: Scalar> {
    /// Location of the highest jump of `kappa -> d_{m_hat(kappa)}`.
    pub kappa_dj: T,
    /// Model selected at `2 * kappa_dj`.
    pub m_selected: usize,
    pub path: SelectionPath<T>,
}

/// Find the breakpoint with the largest drop of the model dimension along
/// `path` (ties toward the largest kappa) and select at twice that constant.
/// `dims[m - 1]` is the dimension of model `m`.
pub fn dimension_jump<T: Scalar>(
    path: SelectionPath<T>,
    dims: &[usize],
) -> Result<DimensionJumpResult<T>> {
    if path.chosen.is_empty() {
        return Err(Error::EmptyCollection);
    }
    let mut best_drop = 0isize;
    let mut kappa_dj: Option<T> = None;
    for b in 1..path.breakpoints.len() {
        let before = dims[path.chosen[b - 1] - 1] as isize;
        let after = dims[path.chosen[b] - 1] as isize;
        let drop = before - after;
        if drop > 0 && drop >= best_drop {
            best_drop = drop;
            kappa_dj = Some(path.breakpoints[b]);
        }
    }
    let kappa_dj = kappa_dj.ok_or(Error::NoDimensionJump)?;
    let m_selected = path.model_at(T::of(2.0) * kappa_dj);
    Ok(DimensionJumpResult { kappa_dj, m_selected, path })
}
