use alloc::vec;
use alloc::vec::Vec;

use super::linalg::sq_dist;
use super::Targets;
use crate::error::bail;
use crate::sim::LabelSchema;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Weighting {
    #[default]
    Uniform,
    /// Weight `1/d`. Neighbors at distance zero, if any, outvote all others.
    InverseDistance,
}

impl Weighting {
    pub fn name(self) -> &'static str {
        match self {
            Weighting::Uniform => "uniform",
            Weighting::InverseDistance => "inverse_distance",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum KnnTask {
    #[default]
    Classify,
    Regress,
}

impl KnnTask {
    pub fn for_schema(schema: LabelSchema) -> Self {
        match schema {
            LabelSchema::RegressionMm => KnnTask::Regress,
            _ => KnnTask::Classify,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            KnnTask::Classify => "classify",
            KnnTask::Regress => "regress",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct KnnConfig {
    pub k: usize,
    pub weighting: Weighting,
    pub task: KnnTask,
}

impl Default for KnnConfig {
    fn default() -> Self {
        Self { k: 5, weighting: Weighting::Uniform, task: KnnTask::Classify }
    }
}

impl KnnConfig {
    pub fn validate(&self, schema: LabelSchema) -> Result<()> {
        if self.k == 0 || self.k % 2 == 0 {
            bail!(Config, "k = {} must be a positive odd integer", self.k);
        }
        if self.task != KnnTask::for_schema(schema) {
            bail!(Config, "knn task {} does not fit a {:?} dataset", self.task.name(), schema);
        }
        Ok(())
    }
}

/// Brute-force neighbor search over the stored, standardized training rows.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct KnnModel {
    pub config: KnnConfig,
    pub dim: usize,
    pub rows: Vec<f64>,
    /// Class positions for classification, empty for regression.
    pub classes: Vec<usize>,
    pub n_classes: usize,
    /// Target values for regression, empty for classification.
    pub values: Vec<f64>,
}

impl KnnModel {
    pub(crate) fn fit(
        config: &KnnConfig,
        rows: Vec<f64>,
        dim: usize,
        targets: &Targets,
        n_classes: usize,
    ) -> Result<Self> {
        let n = rows.len() / dim;
        if config.k > n {
            bail!(Validation, "k = {} exceeds the {n} training samples", config.k);
        }
        let (classes, values) = match targets {
            Targets::Classes(c) => (c.clone(), Vec::new()),
            Targets::Values(v) => (Vec::new(), v.clone()),
        };
        Ok(Self { config: *config, dim, rows, classes, n_classes, values })
    }

    pub fn n_train(&self) -> usize {
        self.rows.len() / self.dim
    }

    /// The `k` nearest training rows as `(squared distance, index)`, closest
    /// first; equal distances are ordered by index.
    pub fn neighbors(&self, z: &[f64]) -> Vec<(f64, usize)> {
        let mut d: Vec<(f64, usize)> = self.rows.chunks_exact(self.dim).map(|r| sq_dist(r, z)).zip(0..).collect();
        let k = self.config.k;
        let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
        if k < d.len() {
            d.select_nth_unstable_by(k - 1, cmp);
            d.truncate(k);
        }
        d.sort_unstable_by(cmp);
        d
    }

    fn weights(&self, nb: &[(f64, usize)]) -> Vec<f64> {
        match self.config.weighting {
            Weighting::Uniform => vec![1.0; nb.len()],
            Weighting::InverseDistance => {
                if nb.iter().any(|n| n.0 == 0.0) {
                    nb.iter().map(|n| if n.0 == 0.0 { 1.0 } else { 0.0 }).collect()
                } else {
                    nb.iter().map(|n| 1.0 / libm::sqrt(n.0)).collect()
                }
            }
        }
    }

    /// Normalized vote share per class, or the single regression estimate.
    pub fn decision_values(&self, z: &[f64]) -> Vec<f64> {
        let nb = self.neighbors(z);
        let w = self.weights(&nb);
        let total: f64 = w.iter().sum();
        match self.config.task {
            KnnTask::Classify => {
                let mut votes = vec![0.0; self.n_classes];
                for (n, wi) in nb.iter().zip(&w) {
                    votes[self.classes[n.1]] += wi;
                }
                votes.iter_mut().for_each(|v| *v /= total);
                votes
            }
            KnnTask::Regress => {
                let s: f64 = nb.iter().zip(&w).map(|(n, wi)| wi * self.values[n.1]).sum();
                vec![s / total]
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learn::argmax;

    fn model(k: usize, weighting: Weighting, rows: &[f64], targets: Targets) -> KnnModel {
        let task = match targets {
            Targets::Classes(_) => KnnTask::Classify,
            Targets::Values(_) => KnnTask::Regress,
        };
        KnnModel::fit(&KnnConfig { k, weighting, task }, rows.to_vec(), 1, &targets, 3).unwrap()
    }

    #[test]
    fn regression_is_the_neighbor_mean() {
        let m = model(3, Weighting::Uniform, &[0.0, 1.0, 2.0, 10.0], Targets::Values(vec![2.45, 2.45, 6.42, 99.0]));
        let v = m.decision_values(&[1.0])[0];
        assert!((v - (2.45 + 2.45 + 6.42) / 3.0).abs() < 1e-12);
        assert!((v - 3.773_333).abs() < 1e-6);
    }

    #[test]
    fn k1_reproduces_training_labels() {
        let rows = [0.0, 1.0, 2.5, 4.0, 7.0];
        let m = model(1, Weighting::Uniform, &rows, Targets::Classes(vec![0, 2, 1, 1, 0]));
        let got: Vec<usize> = rows.iter().map(|r| argmax(&m.decision_values(&[*r]))).collect();
        assert_eq!(got, vec![0, 2, 1, 1, 0]);
    }

    #[test]
    fn full_k_predicts_global_majority_and_mean() {
        let rows = [0.0, 1.0, 2.0, 3.0, 4.0];
        let m = model(5, Weighting::Uniform, &rows, Targets::Classes(vec![2, 0, 2, 1, 2]));
        let r = model(5, Weighting::Uniform, &rows, Targets::Values(vec![1.0, 2.0, 3.0, 4.0, 5.0]));
        for q in [-5.0, 0.3, 9.0] {
            assert_eq!(argmax(&m.decision_values(&[q])), 2);
            assert_eq!(r.decision_values(&[q]), vec![3.0]);
        }
    }

    #[test]
    fn exact_match_outvotes_under_inverse_distance() {
        let m = model(3, Weighting::InverseDistance, &[0.0, 0.1, 0.2], Targets::Classes(vec![0, 1, 1]));
        assert_eq!(argmax(&m.decision_values(&[0.0])), 0);
        let u = model(3, Weighting::Uniform, &[0.0, 0.1, 0.2], Targets::Classes(vec![0, 1, 1]));
        assert_eq!(argmax(&u.decision_values(&[0.0])), 1);
    }

    #[test]
    fn distance_ties_break_by_index() {
        let m = model(1, Weighting::Uniform, &[-1.0, 1.0], Targets::Classes(vec![1, 0]));
        assert_eq!(m.neighbors(&[0.0]), vec![(1.0, 0)]);
    }

    #[test]
    fn k_is_bounded_and_odd() {
        assert!(KnnConfig { k: 4, ..Default::default() }.validate(LabelSchema::Classification).is_err());
        let t = Targets::Classes(vec![0, 1]);
        let cfg = KnnConfig { k: 3, ..Default::default() };
        assert!(KnnModel::fit(&cfg, vec![0.0, 1.0], 1, &t, 2).is_err());
    }
}
