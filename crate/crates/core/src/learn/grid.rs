use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{
    argmax, decode_targets, fit_standardized, linalg, metrics::rmse, svm::SvmModel, ClassSet, Kernel, KnnConfig,
    KnnTask, MlpConfig, ModelConfig, ModelKind, ModelParams, Standardizer, SvmConfig, Targets,
};
use crate::error::bail;
use crate::sim::{mix_seed, shuffle, Dataset, LabelSchema, Split};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum CvMetric {
    /// Higher is better.
    Accuracy,
    /// Lower is better.
    Rmse,
}

impl CvMetric {
    pub fn for_schema(schema: LabelSchema) -> Self {
        match schema {
            LabelSchema::RegressionMm => CvMetric::Rmse,
            _ => CvMetric::Accuracy,
        }
    }

    fn better(self, a: f64, b: f64) -> bool {
        match self {
            CvMetric::Accuracy => a > b,
            CvMetric::Rmse => a < b,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CvMetric::Accuracy => "accuracy",
            CvMetric::Rmse => "rmse",
        }
    }
}

/// One grid point: its per-fold scores, or why it was skipped.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CvRow {
    pub config: ModelConfig,
    pub fold_scores: Vec<f64>,
    pub mean: Option<f64>,
    pub rejected: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GridSearchResult {
    pub best: ModelConfig,
    pub best_index: usize,
    pub metric: CvMetric,
    pub folds: usize,
    pub table: Vec<CvRow>,
}

/// Default search grids. KNN: k in {1,3,5,7,9}. SVM: rbf with
/// c in {0.1,1,10,100} x gamma in {1e-4,1e-3,1e-2,1e-1}. MLP: two widths
/// times two learning rates.
pub fn default_grid(kind: ModelKind, schema: LabelSchema) -> Vec<ModelConfig> {
    match kind {
        ModelKind::Knn => [1, 3, 5, 7, 9]
            .into_iter()
            .map(|k| ModelConfig::Knn(KnnConfig { k, task: KnnTask::for_schema(schema), ..Default::default() }))
            .collect(),
        ModelKind::Svm => {
            let mut grid = Vec::new();
            for c in [0.1, 1.0, 10.0, 100.0] {
                for gamma in [1e-4, 1e-3, 1e-2, 1e-1] {
                    grid.push(ModelConfig::Svm(SvmConfig { kernel: Kernel::Rbf { gamma }, c, ..Default::default() }));
                }
            }
            grid
        }
        ModelKind::Mlp => {
            let mut grid = Vec::new();
            for hidden in [vec![128, 64], vec![64]] {
                for learning_rate in [0.01, 0.001] {
                    grid.push(ModelConfig::Mlp(MlpConfig {
                        hidden_layers: hidden.clone(),
                        learning_rate,
                        ..Default::default()
                    }));
                }
            }
            grid
        }
    }
}

/// Fold id for each entry of `indices`. Rows are grouped by stratum,
/// shuffled within it and dealt round-robin, with the dealing position
/// carried across strata so fold sizes differ by at most one.
pub fn stratified_folds(ds: &Dataset, indices: &[usize], folds: usize, seed: u64) -> Result<Vec<usize>> {
    if folds < 2 {
        bail!(Config, "cross-validation needs at least 2 folds, got {folds}");
    }
    if folds > indices.len() {
        bail!(Validation, "{folds} folds exceed the {} training samples", indices.len());
    }
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); ds.n_groups()];
    for (pos, &i) in indices.iter().enumerate() {
        members[ds.group(i)].push(pos);
    }
    if ds.label_schema != LabelSchema::RegressionMm {
        if let Some((g, m)) = members.iter().enumerate().find(|(_, m)| !m.is_empty() && m.len() < folds) {
            bail!(Validation, "{folds} folds exceed the {} training samples of class {}", m.len(), ds.class_names[g]);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, 0xf01d));
    let mut assignment = vec![0; indices.len()];
    let mut next = 0;
    for group in &mut members {
        shuffle(group, &mut rng);
        for &pos in group.iter() {
            assignment[pos] = next % folds;
            next += 1;
        }
    }
    Ok(assignment)
}

struct Fold {
    x_tr: Vec<f64>,
    x_va: Vec<f64>,
    classes: Option<ClassSet>,
    targets: Targets,
    va: Vec<usize>,
    gram: Option<FoldGram>,
}

// Inner products and squared norms shared by every SVM row of a fold.
struct FoldGram {
    tr: Vec<f64>,
    va: Vec<f64>,
    norms_tr: Vec<f64>,
    norms_va: Vec<f64>,
}

/// k-fold cross-validation over `grid` on the train split only. The best
/// row has the highest mean accuracy (classification) or lowest mean RMSE
/// (regression); ties go to the earlier grid entry. KNN rows whose `k`
/// exceeds a fold's training size are rejected rather than failing the run.
pub fn grid_search(ds: &Dataset, grid: &[ModelConfig], folds: usize, seed: u64) -> Result<GridSearchResult> {
    if grid.is_empty() {
        bail!(Config, "empty hyper-parameter grid");
    }
    for cfg in grid {
        cfg.validate(ds.label_schema)?;
    }
    let train = ds.indices(Split::Train);
    let assignment = stratified_folds(ds, &train, folds, seed)?;
    let metric = CvMetric::for_schema(ds.label_schema);
    let d = ds.dim();
    let needs_gram = grid.iter().any(|c| c.kind() == ModelKind::Svm);

    let mut table: Vec<CvRow> =
        grid.iter().map(|c| CvRow { config: c.clone(), fold_scores: Vec::new(), mean: None, rejected: None }).collect();
    for f in 0..folds {
        let tr: Vec<usize> = train.iter().zip(&assignment).filter(|(_, &a)| a != f).map(|(&i, _)| i).collect();
        let va: Vec<usize> = train.iter().zip(&assignment).filter(|(_, &a)| a == f).map(|(&i, _)| i).collect();
        let standardizer = Standardizer::fit(ds, &tr)?;
        let (classes, targets) = decode_targets(ds, &tr)?;
        let x_tr = standardizer.transform_rows(ds, &tr);
        let x_va = standardizer.transform_rows(ds, &va);
        let gram = needs_gram.then(|| FoldGram {
            tr: linalg::gram(&x_tr, d),
            va: linalg::cross_gram(&x_va, &x_tr, d),
            norms_tr: linalg::sq_norms(&x_tr, d),
            norms_va: linalg::sq_norms(&x_va, d),
        });
        let fold = Fold { x_tr, x_va, classes, targets, va, gram };
        for row in table.iter_mut().filter(|r| r.rejected.is_none()) {
            if let ModelConfig::Knn(k) = &row.config {
                if k.k > tr.len() {
                    row.rejected =
                        Some(format!("k = {} exceeds the {} rows of fold {f}'s training part", k.k, tr.len()));
                    continue;
                }
            }
            let score = score_fold(ds, &fold, d, &row.config, metric)?;
            row.fold_scores.push(score);
        }
    }

    let mut best: Option<(usize, f64)> = None;
    for (i, row) in table.iter_mut().enumerate() {
        if row.rejected.is_some() {
            continue;
        }
        let mean = row.fold_scores.iter().sum::<f64>() / row.fold_scores.len() as f64;
        row.mean = Some(mean);
        if best.is_none_or(|(_, b)| metric.better(mean, b)) {
            best = Some((i, mean));
        }
    }
    let Some((best_index, _)) = best else {
        bail!(Validation, "every grid entry was rejected for this training set");
    };
    Ok(GridSearchResult { best: grid[best_index].clone(), best_index, metric, folds, table })
}

fn score_fold(ds: &Dataset, fold: &Fold, d: usize, cfg: &ModelConfig, metric: CvMetric) -> Result<f64> {
    let n_classes = fold.classes.as_ref().map_or(0, ClassSet::len);
    let outputs: Vec<Vec<f64>> = match (cfg, &fold.gram) {
        (ModelConfig::Svm(c), Some(FoldGram { tr: g_tr, va: g_va, norms_tr: n_tr, norms_va: n_va })) => {
            let Targets::Classes(y) = &fold.targets else {
                bail!(Config, "the SVM is a classifier");
            };
            let (model, used) = SvmModel::fit_indexed(c, &fold.x_tr, d, g_tr, y, n_classes)?;
            let n_tr_rows = n_tr.len();
            (0..fold.va.len())
                .map(|v| {
                    let kv: Vec<f64> =
                        used.iter().map(|&s| c.kernel.eval_gram(g_va[v * n_tr_rows + s], n_va[v], n_tr[s])).collect();
                    model.decision_from_kernel(&kv)
                })
                .collect()
        }
        _ => {
            let params = fit_standardized(fold.x_tr.clone(), d, &fold.targets, n_classes, cfg, None)?;
            fold.x_va
                .chunks_exact(d)
                .map(|z| match &params {
                    ModelParams::Knn(m) => m.decision_values(z),
                    ModelParams::Svm(m) => m.decision_values(z),
                    ModelParams::Mlp(m) => m.decision_values(z),
                })
                .collect()
        }
    };
    match metric {
        CvMetric::Accuracy => {
            let groups = &fold.classes.as_ref().expect("classification fold").groups;
            let hits = outputs.iter().zip(&fold.va).filter(|(o, &i)| groups[argmax(o)] == ds.group(i)).count();
            Ok(hits as f64 / fold.va.len() as f64)
        }
        CvMetric::Rmse => {
            let pred: Vec<f64> = outputs.iter().map(|o| o[0]).collect();
            let truth: Vec<f64> = fold
                .va
                .iter()
                .map(|&i| match ds.label(i) {
                    crate::sim::Label::Millimetres(v) => v,
                    _ => f64::NAN,
                })
                .collect();
            rmse(&pred, &truth)
        }
    }
}
