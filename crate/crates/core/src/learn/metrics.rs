use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::braille::TaxelCoord;
use crate::error::bail;
use crate::{Error, Result};

/// Root-mean-square error.
pub fn rmse(pred: &[f64], truth: &[f64]) -> Result<f64> {
    if pred.len() != truth.len() {
        return Err(Error::Length { left: pred.len(), right: truth.len() });
    }
    if pred.is_empty() {
        bail!(Validation, "rmse of zero samples");
    }
    let sse: f64 = pred.iter().zip(truth).map(|(p, t)| (p - t) * (p - t)).sum();
    Ok(libm::sqrt(sse / pred.len() as f64))
}

/// Counts of (true class, predicted class); rows are true classes.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConfusionMatrix {
    pub class_names: Vec<String>,
    counts: Vec<u64>,
}

impl ConfusionMatrix {
    pub fn new(class_names: Vec<String>) -> Self {
        let n = class_names.len();
        Self { class_names, counts: vec![0; n * n] }
    }

    pub fn from_counts(class_names: Vec<String>, counts: Vec<u64>) -> Result<Self> {
        let n = class_names.len();
        if counts.len() != n * n {
            return Err(Error::Length { left: counts.len(), right: n * n });
        }
        Ok(Self { class_names, counts })
    }

    pub fn from_pairs(class_names: Vec<String>, truth: &[usize], pred: &[usize]) -> Result<Self> {
        if truth.len() != pred.len() {
            return Err(Error::Length { left: truth.len(), right: pred.len() });
        }
        let mut cm = Self::new(class_names);
        for (&t, &p) in truth.iter().zip(pred) {
            cm.record(t, p)?;
        }
        Ok(cm)
    }

    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn record(&mut self, truth: usize, pred: usize) -> Result<()> {
        let n = self.n_classes();
        if truth >= n || pred >= n {
            bail!(Bounds, "class pair ({truth}, {pred}) outside a {n}-class matrix");
        }
        self.counts[truth * n + pred] += 1;
        Ok(())
    }

    pub fn get(&self, truth: usize, pred: usize) -> u64 {
        self.counts[truth * self.n_classes() + pred]
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn row(&self, truth: usize) -> &[u64] {
        let n = self.n_classes();
        &self.counts[truth * n..(truth + 1) * n]
    }

    pub fn row_sum(&self, truth: usize) -> u64 {
        self.row(truth).iter().sum()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..self.n_classes()).map(|i| self.get(i, i)).sum()
    }
}

/// Fraction of samples on the diagonal.
pub fn classification_rate(cm: &ConfusionMatrix) -> Result<f64> {
    let total = cm.total();
    if total == 0 {
        bail!(Validation, "confusion matrix is empty");
    }
    Ok(cm.trace() as f64 / total as f64)
}

/// Fractions of predictions whose column (x) and row (y) are exactly right,
/// counted independently.
pub fn per_axis_rate(preds: &[TaxelCoord], truths: &[TaxelCoord]) -> Result<(f64, f64)> {
    if preds.len() != truths.len() {
        return Err(Error::Length { left: preds.len(), right: truths.len() });
    }
    if preds.is_empty() {
        bail!(Validation, "per-axis rate of zero samples");
    }
    let n = preds.len() as f64;
    let x = preds.iter().zip(truths).filter(|(p, t)| p.col == t.col).count();
    let y = preds.iter().zip(truths).filter(|(p, t)| p.row == t.row).count();
    Ok((x as f64 / n, y as f64 / n))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum DistanceMetric {
    #[default]
    Euclidean,
    Manhattan,
}

impl DistanceMetric {
    pub fn distance(self, a: TaxelCoord, b: TaxelCoord) -> f64 {
        let dx = f64::from(a.col) - f64::from(b.col);
        let dy = f64::from(a.row) - f64::from(b.row);
        match self {
            DistanceMetric::Euclidean => libm::sqrt(dx * dx + dy * dy),
            DistanceMetric::Manhattan => dx.abs() + dy.abs(),
        }
    }
}

/// Mean prediction error per true taxel, in taxel units.
#[derive(Debug, Clone, PartialEq)]
pub struct TaxelErrorMap {
    pub n_rows: usize,
    pub n_cols: usize,
    pub metric: DistanceMetric,
    sum: Vec<f64>,
    count: Vec<u64>,
}

impl TaxelErrorMap {
    /// `None` where the test split had no sample of that taxel.
    pub fn mean_distance(&self, col: usize, row: usize) -> Option<f64> {
        let i = row * self.n_cols + col;
        (self.count[i] > 0).then(|| self.sum[i] / self.count[i] as f64)
    }

    pub fn sample_count(&self, col: usize, row: usize) -> u64 {
        self.count[row * self.n_cols + col]
    }

    /// Sample-weighted mean over all taxels.
    pub fn overall_mean(&self) -> Option<f64> {
        let n: u64 = self.count.iter().sum();
        (n > 0).then(|| self.sum.iter().sum::<f64>() / n as f64)
    }
}

pub fn taxel_error_map(
    preds: &[TaxelCoord],
    truths: &[TaxelCoord],
    n_cols: usize,
    n_rows: usize,
    metric: DistanceMetric,
) -> Result<TaxelErrorMap> {
    if preds.len() != truths.len() {
        return Err(Error::Length { left: preds.len(), right: truths.len() });
    }
    let mut map =
        TaxelErrorMap { n_rows, n_cols, metric, sum: vec![0.0; n_rows * n_cols], count: vec![0; n_rows * n_cols] };
    for (p, t) in preds.iter().zip(truths) {
        let (col, row) = (t.col as usize, t.row as usize);
        if col >= n_cols || row >= n_rows {
            bail!(Bounds, "true taxel {t} outside the {n_cols}x{n_rows} grid");
        }
        map.sum[row * n_cols + col] += metric.distance(*p, *t);
        map.count[row * n_cols + col] += 1;
    }
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::format;

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("{i}")).collect()
    }

    #[test]
    fn rmse_examples() {
        assert_eq!(rmse(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert!((rmse(&[1.0, 3.0], &[0.0, 0.0]).unwrap() - libm::sqrt(5.0)).abs() < 1e-15);
        assert!(matches!(rmse(&[], &[]), Err(Error::Validation(_))));
    }

    #[test]
    fn diagonal_confusion_is_perfect() {
        let cm = ConfusionMatrix::from_pairs(names(3), &[0, 1, 2, 2], &[0, 1, 2, 2]).unwrap();
        assert_eq!(classification_rate(&cm).unwrap(), 1.0);
        assert_eq!(cm.row_sum(2), 2);
        assert!(classification_rate(&ConfusionMatrix::new(names(2))).is_err());
    }

    #[test]
    fn axis_rates_count_components_independently() {
        let truth = [TaxelCoord::new(3, 1), TaxelCoord::new(5, 2)];
        let pred = [TaxelCoord::new(3, 1), TaxelCoord::new(6, 2)];
        assert_eq!(per_axis_rate(&pred, &truth).unwrap(), (0.5, 1.0));
    }

    #[test]
    fn error_map_examples() {
        let t = [TaxelCoord::new(0, 0)];
        let m = taxel_error_map(&[TaxelCoord::new(3, 4)], &t, 29, 5, DistanceMetric::Euclidean).unwrap();
        assert_eq!(m.mean_distance(0, 0), Some(5.0));
        assert_eq!(m.mean_distance(1, 0), None);
        let exact = taxel_error_map(&t, &t, 29, 4, DistanceMetric::Euclidean).unwrap();
        assert_eq!(exact.mean_distance(0, 0), Some(0.0));
        assert_eq!(DistanceMetric::Manhattan.distance(TaxelCoord::new(3, 4), TaxelCoord::new(0, 0)), 7.0);
    }
}
