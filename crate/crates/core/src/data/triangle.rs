//! Run-off triangles of claim counts and the reversed-time transform.

use std::fs;
use std::path::Path;

use ndarray::Array2;

use crate::data::events::EventSample;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Claim counts on a triangular support, indexed `[delay cell][underwriting cell]`.
///
/// Cells are 0-based; the observed region is `t + z <= r0 - 1`. `bin_width` is
/// metadata recording how many time units one cell spans; all estimation runs
/// in cell units.
#[derive(Debug, Clone, PartialEq)]
pub struct RunoffTriangle {
    counts: Array2<u64>,
    r0: usize,
    bin_width: f64,
}

impl RunoffTriangle {
    /// Validate and wrap a dense `r0 x r0` count matrix.
    pub fn new(counts: Array2<u64>, bin_width: f64) -> Result<Self> {
        let r0 = counts.nrows();
        if r0 == 0 {
            return Err(Error::invalid("triangle", "extent r0 must be at least 1"));
        }
        if counts.ncols() != r0 {
            return Err(Error::invalid(
                "triangle",
                format!("count matrix must be square, got {}x{}", r0, counts.ncols()),
            ));
        }
        if !(bin_width > 0.0) {
            return Err(Error::invalid("triangle", "bin_width must be positive"));
        }
        for ((t, z), &c) in counts.indexed_iter() {
            if t + z > r0 - 1 && c != 0 {
                return Err(Error::invalid(
                    "triangle",
                    format!("cell (t={t}, z={z}) lies above the anti-diagonal but has count {c}"),
                ));
            }
        }
        Ok(Self {
            counts,
            r0,
            bin_width,
        })
    }

    /// All-zero triangle of the given extent.
    pub fn zeros(r0: usize, bin_width: f64) -> Result<Self> {
        Self::new(Array2::zeros((r0, r0)), bin_width)
    }

    pub fn counts(&self) -> &Array2<u64> {
        &self.counts
    }

    pub fn r0(&self) -> usize {
        self.r0
    }

    pub fn bin_width(&self) -> f64 {
        self.bin_width
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Observed claims per underwriting cell (column sums).
    pub fn counts_per_underwriting(&self) -> Vec<u64> {
        (0..self.r0)
            .map(|z| (0..self.r0).map(|t| self.counts[[t, z]]).sum())
            .collect()
    }

    /// Re-index delay cells as `t -> r0 - 1 - t`, turning the right truncation
    /// of the observation scheme into a left truncation. Involutive.
    pub fn reverse_time(&self) -> Self {
        let mut rev = Array2::zeros((self.r0, self.r0));
        for ((t, z), &c) in self.counts.indexed_iter() {
            rev[[self.r0 - 1 - t, z]] = c;
        }
        Self {
            counts: rev,
            r0: self.r0,
            bin_width: self.bin_width,
        }
    }
}

/// Bin an event sample onto a triangle with the given cell width.
///
/// Cells are half-open `[i*w, (i+1)*w)`, except that coordinates landing
/// exactly on the outer boundary are assigned to the last cell they touch.
/// If `bin_width` does not divide the horizon, the trailing partial bin is
/// dropped with a warning and events falling inside it are discarded.
pub fn bin_events<T: Scalar>(sample: &EventSample<T>, bin_width: f64) -> Result<RunoffTriangle> {
    if !(bin_width > 0.0) {
        return Err(Error::invalid("bin_width", "must be positive"));
    }
    let horizon = sample.horizon().to_f64_lossy();
    let ratio = horizon / bin_width;
    let rounded = ratio.round();
    let divides = (ratio - rounded).abs() <= 1e-9 * ratio.max(1.0) && rounded >= 1.0;
    let r0 = if divides {
        rounded as usize
    } else {
        let trimmed = ratio.floor() as usize;
        log::warn!(
            "bin_width {bin_width} does not divide horizon {horizon}; dropping the partial final bin"
        );
        trimmed
    };
    if r0 == 0 {
        return Err(Error::invalid(
            "bin_width",
            "horizon shorter than one bin; nothing to bin",
        ));
    }
    let effective_horizon = r0 as f64 * bin_width;

    let mut counts: Array2<u64> = Array2::zeros((r0, r0));
    let mut dropped = 0usize;
    for (index, event) in sample.events().iter().enumerate() {
        let delay = event.delay.to_f64_lossy();
        let uw = event.underwriting.to_f64_lossy();
        if delay + uw > effective_horizon {
            if divides {
                // Validated samples satisfy delay + uw <= horizon, so this can
                // only happen when the horizon was trimmed.
                return Err(Error::EventOutsideSupport {
                    index,
                    delay,
                    underwriting: uw,
                    horizon: effective_horizon,
                });
            }
            dropped += 1;
            continue;
        }
        let mut t = ((delay / bin_width).floor() as usize).min(r0 - 1);
        let z = ((uw / bin_width).floor() as usize).min(r0 - 1);
        if t + z > r0 - 1 {
            // Exact anti-diagonal corner: both coordinates sit on cell
            // boundaries with delay + uw == horizon. Close the delay cell on
            // the right so the event stays inside the triangle.
            t = r0 - 1 - z;
        }
        counts[[t, z]] += 1;
    }
    if dropped > 0 {
        log::warn!("dropped {dropped} events falling in the trimmed final bin");
    }
    RunoffTriangle::new(counts, bin_width)
}

/// Read a triangle from CSV: row `i` holds the counts for underwriting cell
/// `i`, columns are delay cells `0..r0-1-i`. Lines starting with `#` are
/// skipped; empty trailing cells are permitted.
pub fn load_triangle(path: &Path, bin_width: f64) -> Result<RunoffTriangle> {
    let text = fs::read_to_string(path)?;
    parse_triangle(&text, bin_width)
}

pub fn parse_triangle(text: &str, bin_width: f64) -> Result<RunoffTriangle> {
    let mut rows: Vec<(usize, Vec<u64>)> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut row = Vec::new();
        for field in trimmed.split(',') {
            let field = field.trim();
            if field.is_empty() {
                continue;
            }
            let value: i64 = field
                .parse()
                .map_err(|_| Error::parse(lineno, format!("not an integer count: {field:?}")))?;
            if value < 0 {
                return Err(Error::parse(lineno, format!("negative count {value}")));
            }
            row.push(value as u64);
        }
        rows.push((lineno, row));
    }
    let r0 = rows.len();
    if r0 == 0 {
        return Err(Error::parse(0, "no data rows"));
    }
    let mut counts: Array2<u64> = Array2::zeros((r0, r0));
    for (z, (lineno, row)) in rows.into_iter().enumerate() {
        if row.len() > r0 - z {
            return Err(Error::parse(
                lineno,
                format!(
                    "underwriting row {z} has {} counts but only {} delay cells lie below the anti-diagonal",
                    row.len(),
                    r0 - z
                ),
            ));
        }
        for (t, &c) in row.iter().enumerate() {
            counts[[t, z]] = c;
        }
    }
    RunoffTriangle::new(counts, bin_width)
}

/// Write a triangle in the layout accepted by [`load_triangle`].
pub fn save_triangle(triangle: &RunoffTriangle, path: &Path) -> Result<()> {
    fs::write(path, format_triangle(triangle))?;
    Ok(())
}

pub fn format_triangle(triangle: &RunoffTriangle) -> String {
    let r0 = triangle.r0();
    let mut out = String::new();
    for z in 0..r0 {
        let row: Vec<String> = (0..r0 - z)
            .map(|t| triangle.counts()[[t, z]].to_string())
            .collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}
