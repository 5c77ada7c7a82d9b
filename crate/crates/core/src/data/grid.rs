//! Occurrence/exposure surfaces on a masked grid, and masked Riemann helpers.

use ndarray::{Array1, Array2};

use crate::data::triangle::RunoffTriangle;
use crate::error::{Error, Result};
use crate::scalar::{num, Scalar};

/// Paired occurrence and exposure surfaces on a common grid.
///
/// Axis 0 is reversed reporting time, axis 1 underwriting time; both in cell
/// units with cell centers at `i + 0.5`. Off-support cells are identically
/// zero. Exposure dominates occurrence elementwise because the at-risk count
/// at a cell includes the individuals occurring there.
#[derive(Debug, Clone, PartialEq)]
pub struct OccurrenceExposureGrid<T> {
    occurrence: Array2<T>,
    exposure: Array2<T>,
    support: Array2<bool>,
    axes: [Array1<T>; 2],
}

impl<T: Scalar> OccurrenceExposureGrid<T> {
    /// Build from raw surfaces, validating the support and ordering invariants.
    pub fn from_surfaces(
        occurrence: Array2<T>,
        exposure: Array2<T>,
        support: Array2<bool>,
    ) -> Result<Self> {
        let dim = occurrence.dim();
        if exposure.dim() != dim || support.dim() != dim {
            return Err(Error::invalid("grid", "surface shapes differ"));
        }
        if dim.0 == 0 || dim.1 == 0 {
            return Err(Error::invalid("grid", "empty grid"));
        }
        for ((i, j), &on) in support.indexed_iter() {
            let o = occurrence[[i, j]];
            let e = exposure[[i, j]];
            if !on {
                if o != T::zero() || e != T::zero() {
                    return Err(Error::invalid(
                        "grid",
                        format!("cell ({i}, {j}) is off support but has mass"),
                    ));
                }
                continue;
            }
            if !(o >= T::zero()) || !(e >= o) {
                return Err(Error::invalid(
                    "grid",
                    format!("cell ({i}, {j}) violates E >= O >= 0: O={o}, E={e}"),
                ));
            }
        }
        let axes = [cell_centers(dim.0), cell_centers(dim.1)];
        Ok(Self {
            occurrence,
            exposure,
            support,
            axes,
        })
    }

    pub fn occurrence(&self) -> &Array2<T> {
        &self.occurrence
    }

    pub fn exposure(&self) -> &Array2<T> {
        &self.exposure
    }

    pub fn support(&self) -> &Array2<bool> {
        &self.support
    }

    /// Cell-center coordinates per axis, in cell units.
    pub fn axes(&self) -> &[Array1<T>; 2] {
        &self.axes
    }

    pub fn dim(&self) -> (usize, usize) {
        self.occurrence.dim()
    }

    /// Total observed events, `sum O`.
    pub fn total_occurrence(&self) -> T {
        self.occurrence.iter().copied().sum()
    }

    /// Replace the occurrence at one cell, keeping exposure; used by the
    /// leave-out cross-validation refits.
    pub fn with_occurrence_zeroed(&self, cell: (usize, usize)) -> Self {
        let mut grid = self.clone();
        grid.occurrence[[cell.0, cell.1]] = T::zero();
        grid
    }
}

/// Cell centers `i + 0.5` in cell units.
pub fn cell_centers<T: Scalar>(n: usize) -> Array1<T> {
    Array1::from_iter((0..n).map(|i| T::from_index(i) + num(0.5)))
}

/// Build the occurrence/exposure pair from a triangle.
///
/// The triangle is re-indexed to reversed time (occurrence is exactly
/// `reverse_time` applied to the counts), and the exposure at reversed cell
/// `r` is the tail sum of occurrences at cells `>= r` in the same
/// underwriting column: the number of individuals still at risk there. The
/// support is the left-truncated region `z <= t^R`.
pub fn build_occurrence_exposure<T: Scalar>(triangle: &RunoffTriangle) -> OccurrenceExposureGrid<T> {
    let r0 = triangle.r0();
    let reversed = triangle.reverse_time();
    let mut occurrence = Array2::zeros((r0, r0));
    for ((t, z), &c) in reversed.counts().indexed_iter() {
        occurrence[[t, z]] = T::from_f64_lossy(c as f64);
    }
    let mut exposure = Array2::zeros((r0, r0));
    let mut support = Array2::from_elem((r0, r0), false);
    for z in 0..r0 {
        let mut tail = T::zero();
        for t in (0..r0).rev() {
            tail += occurrence[[t, z]];
            if z <= t {
                exposure[[t, z]] = tail;
                support[[t, z]] = true;
            }
        }
    }
    // Occurrence off the truncated region would contradict the triangle
    // invariant; zero it defensively for the mask contract.
    for ((t, z), on) in support.indexed_iter() {
        if !on {
            debug_assert_eq!(occurrence[[t, z]], T::zero());
            occurrence[[t, z]] = T::zero();
        }
    }
    OccurrenceExposureGrid {
        occurrence,
        exposure,
        support,
        axes: [cell_centers(r0), cell_centers(r0)],
    }
}

/// Riemann sum over the complementary axis restricted to the mask, scaled by
/// the complementary cell width (one cell unit).
pub fn masked_marginal<T: Scalar>(
    values: &Array2<T>,
    mask: &Array2<bool>,
    axis: usize,
) -> Array1<T> {
    let (n0, n1) = values.dim();
    assert_eq!(mask.dim(), values.dim());
    match axis {
        0 => Array1::from_iter((0..n0).map(|i| {
            (0..n1)
                .filter(|&j| mask[[i, j]])
                .map(|j| values[[i, j]])
                .sum()
        })),
        1 => Array1::from_iter((0..n1).map(|j| {
            (0..n0)
                .filter(|&i| mask[[i, j]])
                .map(|i| values[[i, j]])
                .sum()
        })),
        _ => panic!("axis out of range: {axis}"),
    }
}

/// Riemann integral over the mask (cell volume one).
pub fn masked_total<T: Scalar>(values: &Array2<T>, mask: &Array2<bool>) -> T {
    values
        .indexed_iter()
        .filter(|(idx, _)| mask[[idx.0, idx.1]])
        .map(|(_, &v)| v)
        .sum()
}
