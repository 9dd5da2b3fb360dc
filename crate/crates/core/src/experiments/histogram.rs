//! Equal-width density histograms.

use crate::error::{Error, Result};

/// Where the bin edges come from.
#[derive(Clone, Copy, Debug)]
pub enum HistogramRange {
    /// `[min, max]` of the data itself (the empirical-spectral-density
    /// convention).
    Data,
    /// A caller-fixed `[lo, hi]`; values outside are dropped and the
    /// densities are normalized over the values that remain.
    Fixed(f64, f64),
}

/// `bins + 1` edges and `bins` densities with `sum(density * width) = 1`.
#[derive(Clone, Debug)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub densities: Vec<f64>,
    /// Number of input values.
    pub total: usize,
    /// Number of values inside the range (equals `total` for `Data`).
    pub included: usize,
}

impl Histogram {
    pub fn bins(&self) -> usize {
        self.densities.len()
    }

    pub fn width(&self) -> f64 {
        self.edges[1] - self.edges[0]
    }

    pub fn centers(&self) -> Vec<f64> {
        self.edges.windows(2).map(|e| 0.5 * (e[0] + e[1])).collect()
    }
}

/// Bins `values` into `bins` equal-width intervals. A value sitting on an
/// interior edge counts toward the bin on its right; the top edge belongs
/// to the last bin. An all-equal sample gets a unit-width window centered
/// on the common value, so exactly one bin is occupied with density
/// `1/width`.
pub fn emit_histogram(
    values: &[f64],
    bins: usize,
    range: HistogramRange,
) -> Result<Histogram> {
    if values.is_empty() {
        return Err(Error::domain("histogram needs at least one value"));
    }
    if bins == 0 {
        return Err(Error::domain("histogram needs at least one bin"));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain("histogram values must be finite"));
    }
    let (mut lo, mut hi) = match range {
        HistogramRange::Data => {
            let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            (lo, hi)
        }
        HistogramRange::Fixed(a, b) => {
            if !(a < b) || !a.is_finite() || !b.is_finite() {
                return Err(Error::domain(format!("fixed range needs lo < hi, got [{a}, {b}]")));
            }
            (a, b)
        }
    };
    if hi == lo {
        lo -= 0.5;
        hi += 0.5;
    }
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &v in values {
        if v < lo || v > hi {
            continue;
        }
        let idx = (((v - lo) / width) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    let included: usize = counts.iter().sum();
    if included == 0 {
        return Err(Error::domain("every value fell outside the fixed range"));
    }
    let norm = 1.0 / (included as f64 * width);
    let edges = (0..=bins).map(|i| lo + i as f64 * width).collect();
    let densities = counts.iter().map(|&c| c as f64 * norm).collect();
    Ok(Histogram { edges, densities, total: values.len(), included })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mass(h: &Histogram) -> f64 {
        h.densities.iter().map(|d| d * h.width()).sum()
    }

    #[test]
    fn all_equal_values_occupy_one_bin() {
        let h = emit_histogram(&[3.0; 17], 10, HistogramRange::Data).unwrap();
        let occupied: Vec<usize> =
            (0..h.bins()).filter(|&i| h.densities[i] > 0.0).collect();
        assert_eq!(occupied.len(), 1);
        assert!((h.densities[occupied[0]] - 1.0 / h.width()).abs() < 1e-12);
        assert!((mass(&h) - 1.0).abs() < 1e-9);
        // The unit window brackets the common value.
        assert!(h.edges[0] < 3.0 && 3.0 < h.edges[h.bins()]);
    }

    #[test]
    fn uniform_grid_is_near_flat() {
        let values: Vec<f64> = (0..10_000).map(|i| i as f64 / 9_999.0).collect();
        let h = emit_histogram(&values, 20, HistogramRange::Data).unwrap();
        for d in &h.densities {
            assert!((d - 1.0).abs() < 0.02, "{d}");
        }
        assert!((mass(&h) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn normalization_holds_for_ragged_data() {
        let values = [0.1, 0.1, 0.2, 5.0, -3.0, 0.15, 2.2];
        let h = emit_histogram(&values, 7, HistogramRange::Data).unwrap();
        assert!((mass(&h) - 1.0).abs() < 1e-9);
        assert_eq!(h.total, 7);
        assert_eq!(h.included, 7);
        assert!(h.densities.iter().all(|&d| d >= 0.0));
    }

    #[test]
    fn fixed_range_drops_outsiders_and_renormalizes() {
        let values = [0.5, 1.5, 2.5, 100.0, -7.0];
        let h = emit_histogram(&values, 3, HistogramRange::Fixed(0.0, 3.0)).unwrap();
        assert_eq!(h.total, 5);
        assert_eq!(h.included, 3);
        assert!((mass(&h) - 1.0).abs() < 1e-9);
        // One value per unit-width bin.
        for d in &h.densities {
            assert!((d - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn top_edge_belongs_to_last_bin() {
        let h = emit_histogram(&[0.0, 1.0], 4, HistogramRange::Fixed(0.0, 1.0)).unwrap();
        assert!(h.densities[3] > 0.0);
        assert_eq!(h.included, 2);
    }

    #[test]
    fn error_paths() {
        assert!(emit_histogram(&[], 5, HistogramRange::Data).is_err());
        assert!(emit_histogram(&[1.0], 0, HistogramRange::Data).is_err());
        assert!(emit_histogram(&[f64::NAN], 5, HistogramRange::Data).is_err());
        assert!(emit_histogram(&[1.0], 5, HistogramRange::Fixed(2.0, 2.0)).is_err());
        assert!(emit_histogram(&[1.0], 5, HistogramRange::Fixed(5.0, 6.0)).is_err());
    }
}
