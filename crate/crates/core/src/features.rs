//! Profile-feature classification: balancing, stratified splitting and an
//! explainable CART decision tree with impurity and permutation importance.

use std::collections::HashSet;

use rand::seq::{IndexedRandom, SliceRandom};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::PopulationDataset;
use crate::ingest::{FeatureVector, CANONICAL_FEATURES};
use crate::rng::aux_rng;

#[derive(Debug, Error, PartialEq)]
pub enum FeatureError {
    #[error("cannot balance: {positive} banned and {negative} non-banned samples")]
    EmptyClass { positive: usize, negative: usize },
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("train fraction {0} outside [0, 1]")]
    BadFraction(f64),
    #[error("sample lacks feature {0}")]
    MissingFeature(String),
    #[error("invalid tree parameters: {0}")]
    BadParams(&'static str),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabeledSample {
    pub features: FeatureVector,
    /// True when the profile is banned in any way.
    pub label: bool,
}

impl LabeledSample {
    pub fn is_complete(&self) -> bool {
        CANONICAL_FEATURES.iter().all(|f| self.features.contains_key(*f))
    }
}

/// One sample per distinct user that carries every canonical feature.
/// Returns the samples and the number of users dropped for missing features.
pub fn samples_from_dataset(d: &PopulationDataset) -> (Vec<LabeledSample>, usize) {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    let mut dropped = 0;
    for node in d.graphs.iter().flat_map(|g| &g.nodes) {
        if !seen.insert(&node.id) {
            continue;
        }
        let sample = LabeledSample {
            features: node.features.clone().unwrap_or_default(),
            label: node.bans.banned(),
        };
        if sample.is_complete() {
            out.push(sample);
        } else {
            dropped += 1;
        }
    }
    (out, dropped)
}

/// Downsamples the majority class uniformly so both classes are equal.
/// Relative order of the kept samples is preserved.
pub fn balance(samples: &[LabeledSample], seed: u64) -> Result<Vec<LabeledSample>, FeatureError> {
    let (pos, neg): (Vec<usize>, Vec<usize>) = (0..samples.len()).partition(|&i| samples[i].label);
    if pos.is_empty() || neg.is_empty() {
        return Err(FeatureError::EmptyClass {
            positive: pos.len(),
            negative: neg.len(),
        });
    }
    let keep = pos.len().min(neg.len());
    let mut rng = aux_rng(seed, 0xba1a);
    let mut chosen: Vec<usize> = pos
        .choose_multiple(&mut rng, keep)
        .chain(neg.choose_multiple(&mut rng, keep))
        .copied()
        .collect();
    chosen.sort_unstable();
    Ok(chosen.into_iter().map(|i| samples[i].clone()).collect())
}

/// Stratified shuffle split. The training set holds `round(fraction * n)`
/// samples, of which `round(fraction * positives)` are positive.
pub fn split(samples: &[LabeledSample], train_fraction: f64, seed: u64) -> Result<(Vec<LabeledSample>, Vec<LabeledSample>), FeatureError> {
    if !(0.0..=1.0).contains(&train_fraction) {
        return Err(FeatureError::BadFraction(train_fraction));
    }
    let mut rng = aux_rng(seed, 0x5b11);
    let (mut pos, mut neg): (Vec<usize>, Vec<usize>) = (0..samples.len()).partition(|&i| samples[i].label);
    pos.shuffle(&mut rng);
    neg.shuffle(&mut rng);
    let n_train = (train_fraction * samples.len() as f64).round() as usize;
    let pos_train = ((train_fraction * pos.len() as f64).round() as usize).min(n_train);
    let neg_train = (n_train - pos_train).min(neg.len());
    let pos_train = n_train - neg_train;

    let mut train: Vec<usize> = pos[..pos_train].iter().chain(&neg[..neg_train]).copied().collect();
    let mut test: Vec<usize> = pos[pos_train..].iter().chain(&neg[neg_train..]).copied().collect();
    train.sort_unstable();
    test.sort_unstable();
    let pick = |ix: Vec<usize>| ix.into_iter().map(|i| samples[i].clone()).collect();
    Ok((pick(train), pick(test)))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaxFeatures {
    #[default]
    All,
    Sqrt,
    Log2,
}

impl MaxFeatures {
    fn count(self, total: usize) -> usize {
        let k = match self {
            MaxFeatures::All => total,
            MaxFeatures::Sqrt => (total as f64).sqrt() as usize,
            MaxFeatures::Log2 => (total as f64).log2() as usize,
        };
        k.clamp(1, total.max(1))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeParams {
    pub max_features: MaxFeatures,
    pub min_samples_split: usize,
    pub min_samples_leaf: usize,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams {
            max_features: MaxFeatures::All,
            min_samples_split: 2,
            min_samples_leaf: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum TreeNode {
    Leaf {
        /// `[negative, positive]` training samples reaching the leaf.
        counts: [usize; 2],
    },
    Split {
        feature: String,
        /// Samples with `value <= threshold` go left.
        threshold: f64,
        counts: [usize; 2],
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
}

impl TreeNode {
    pub fn counts(&self) -> [usize; 2] {
        match self {
            TreeNode::Leaf { counts } | TreeNode::Split { counts, .. } => *counts,
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 0,
            TreeNode::Split { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 1,
            TreeNode::Split { left, right, .. } => left.leaf_count() + right.leaf_count(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeModel {
    /// Feature names in the order used for tie-breaking.
    pub schema: Vec<String>,
    pub params: TreeParams,
    pub root: TreeNode,
}

fn gini(counts: [usize; 2]) -> f64 {
    let n = (counts[0] + counts[1]) as f64;
    if n == 0.0 {
        return 0.0;
    }
    let p = counts[1] as f64 / n;
    2.0 * p * (1.0 - p)
}

fn positive_probability(counts: [usize; 2]) -> f64 {
    let n = counts[0] + counts[1];
    if n == 0 {
        0.0
    } else {
        counts[1] as f64 / n as f64
    }
}

struct Matrix {
    /// Column-major: `columns[f][i]` is feature `f` of sample `i`.
    columns: Vec<Vec<f64>>,
    labels: Vec<bool>,
}

impl Matrix {
    fn build(schema: &[String], samples: &[LabeledSample]) -> Result<Self, FeatureError> {
        let mut columns = vec![Vec::with_capacity(samples.len()); schema.len()];
        for s in samples {
            for (col, name) in columns.iter_mut().zip(schema) {
                let v = s.features.get(name).ok_or_else(|| FeatureError::MissingFeature(name.clone()))?;
                col.push(v.as_f64());
            }
        }
        Ok(Matrix {
            columns,
            labels: samples.iter().map(|s| s.label).collect(),
        })
    }

    fn counts(&self, idx: &[usize]) -> [usize; 2] {
        let pos = idx.iter().filter(|&&i| self.labels[i]).count();
        [idx.len() - pos, pos]
    }
}

struct Candidate {
    feature: usize,
    threshold: f64,
    gain: f64,
}

const GAIN_EPS: f64 = 1e-12;

struct Grower<'a> {
    m: &'a Matrix,
    schema: &'a [String],
    params: TreeParams,
    rng: crate::rng::TrialRng,
}

impl Grower<'_> {
    fn best_on(&self, features: &[usize], idx: &[usize], counts: [usize; 2]) -> Option<Candidate> {
        let parent = gini(counts);
        let n = idx.len();
        let leaf = self.params.min_samples_leaf.max(1);
        let mut best: Option<Candidate> = None;
        let mut order = idx.to_vec();
        for &f in features {
            let col = &self.m.columns[f];
            order.sort_by(|&a, &b| col[a].total_cmp(&col[b]));
            let mut left = [0usize; 2];
            for k in 0..n - 1 {
                left[self.m.labels[order[k]] as usize] += 1;
                let (lo, hi) = (col[order[k]], col[order[k + 1]]);
                let n_left = k + 1;
                if lo == hi || n_left < leaf || n - n_left < leaf {
                    continue;
                }
                let right = [counts[0] - left[0], counts[1] - left[1]];
                let child = (n_left as f64 * gini(left) + (n - n_left) as f64 * gini(right)) / n as f64;
                let gain = parent - child;
                let threshold = lo + (hi - lo) / 2.0;
                if best.as_ref().is_none_or(|b| gain > b.gain + GAIN_EPS) {
                    best = Some(Candidate { feature: f, threshold, gain });
                }
            }
        }
        best
    }

    fn best_split(&mut self, idx: &[usize], counts: [usize; 2]) -> Option<Candidate> {
        let total = self.schema.len();
        let k = self.params.max_features.count(total);
        if k >= total {
            return self.best_on(&(0..total).collect::<Vec<_>>(), idx, counts);
        }
        let all: Vec<usize> = (0..total).collect();
        let mut drawn: Vec<usize> = all.choose_multiple(&mut self.rng, k).copied().collect();
        drawn.sort_unstable();
        if let Some(c) = self.best_on(&drawn, idx, counts) {
            return Some(c);
        }
        // No valid split among the drawn features: keep looking at the rest.
        let rest: Vec<usize> = all.into_iter().filter(|f| !drawn.contains(f)).collect();
        self.best_on(&rest, idx, counts)
    }

    fn grow(&mut self, idx: Vec<usize>) -> TreeNode {
        let counts = self.m.counts(&idx);
        let pure = counts[0] == 0 || counts[1] == 0;
        if pure || idx.len() < self.params.min_samples_split.max(2) || idx.len() < 2 * self.params.min_samples_leaf.max(1) {
            return TreeNode::Leaf { counts };
        }
        let Some(c) = self.best_split(&idx, counts) else {
            return TreeNode::Leaf { counts };
        };
        let col = &self.m.columns[c.feature];
        let (l, r): (Vec<usize>, Vec<usize>) = idx.into_iter().partition(|&i| col[i] <= c.threshold);
        TreeNode::Split {
            feature: self.schema[c.feature].clone(),
            threshold: c.threshold,
            counts,
            left: Box::new(self.grow(l)),
            right: Box::new(self.grow(r)),
        }
    }
}

/// Grows a CART tree on Gini impurity over the canonical feature schema.
pub fn fit_tree(train: &[LabeledSample], params: TreeParams, seed: u64) -> Result<TreeModel, FeatureError> {
    let schema: Vec<String> = CANONICAL_FEATURES.iter().map(|s| s.to_string()).collect();
    fit_tree_with_schema(train, schema, params, seed)
}

pub fn fit_tree_with_schema(train: &[LabeledSample], mut schema: Vec<String>, params: TreeParams, seed: u64) -> Result<TreeModel, FeatureError> {
    if train.is_empty() {
        return Err(FeatureError::EmptyTrainingSet);
    }
    if params.min_samples_leaf == 0 || params.min_samples_split < 2 {
        return Err(FeatureError::BadParams("min_samples_leaf >= 1 and min_samples_split >= 2 required"));
    }
    schema.sort();
    schema.dedup();
    let m = Matrix::build(&schema, train)?;
    let mut grower = Grower {
        m: &m,
        schema: &schema,
        params,
        rng: aux_rng(seed, 0x7ee),
    };
    let root = grower.grow((0..train.len()).collect());
    Ok(TreeModel { schema, params, root })
}

impl TreeModel {
    fn leaf_for(&self, features: &FeatureVector) -> Result<[usize; 2], FeatureError> {
        let mut node = &self.root;
        loop {
            match node {
                TreeNode::Leaf { counts } => return Ok(*counts),
                TreeNode::Split { feature, threshold, left, right, .. } => {
                    let v = features.get(feature).ok_or_else(|| FeatureError::MissingFeature(feature.clone()))?;
                    node = if v.as_f64() <= *threshold { left } else { right };
                }
            }
        }
    }

    /// Fraction of banned training samples in the leaf reached by `features`.
    pub fn predict_proba(&self, features: &FeatureVector) -> Result<f64, FeatureError> {
        self.leaf_for(features).map(positive_probability)
    }

    pub fn predict(&self, features: &FeatureVector) -> Result<bool, FeatureError> {
        self.predict_proba(features).map(|p| p > 0.5)
    }

    pub fn accuracy(&self, samples: &[LabeledSample]) -> Result<f64, FeatureError> {
        if samples.is_empty() {
            return Ok(0.0);
        }
        let mut right = 0usize;
        for s in samples {
            if self.predict(&s.features)? == s.label {
                right += 1;
            }
        }
        Ok(right as f64 / samples.len() as f64)
    }

    /// Total weighted Gini decrease per feature, normalized to sum to 1.
    /// All zeros when the tree has no split.
    pub fn impurity_importance(&self) -> Vec<FeatureScore> {
        let mut raw = vec![0.0; self.schema.len()];
        fn walk(node: &TreeNode, schema: &[String], raw: &mut [f64]) {
            if let TreeNode::Split { feature, counts, left, right, .. } = node {
                let n = |c: [usize; 2]| (c[0] + c[1]) as f64;
                let decrease = n(*counts) * gini(*counts) - n(left.counts()) * gini(left.counts()) - n(right.counts()) * gini(right.counts());
                let f = schema.iter().position(|s| s == feature).expect("split feature in schema");
                raw[f] += decrease.max(0.0);
                walk(left, schema, raw);
                walk(right, schema, raw);
            }
        }
        walk(&self.root, &self.schema, &mut raw);
        ranked(&self.schema, raw)
    }

    /// Mean accuracy drop when a feature's column is shuffled, over
    /// `repeats` shuffles; negative drops count as zero before normalizing.
    pub fn permutation_importance(&self, samples: &[LabeledSample], repeats: usize, seed: u64) -> Result<Vec<FeatureScore>, FeatureError> {
        let base = self.accuracy(samples)?;
        let mut rng = aux_rng(seed, 0x9e7);
        let mut raw = vec![0.0; self.schema.len()];
        let mut shuffled = samples.to_vec();
        for (f, name) in self.schema.iter().enumerate() {
            let mut drop = 0.0;
            for _ in 0..repeats.max(1) {
                let mut column: Vec<_> = samples.iter().map(|s| s.features.get(name).cloned()).collect();
                column.shuffle(&mut rng);
                for (s, v) in shuffled.iter_mut().zip(column) {
                    if let Some(v) = v {
                        s.features.insert(name.clone(), v);
                    }
                }
                drop += base - self.accuracy(&shuffled)?;
            }
            for (s, orig) in shuffled.iter_mut().zip(samples) {
                if let Some(v) = orig.features.get(name) {
                    s.features.insert(name.clone(), v.clone());
                }
            }
            raw[f] = (drop / repeats.max(1) as f64).max(0.0);
        }
        Ok(ranked(&self.schema, raw))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureScore {
    pub feature: String,
    pub score: f64,
}

/// Normalizes scores to sum 1 and sorts them descending, ties by name.
fn ranked(schema: &[String], raw: Vec<f64>) -> Vec<FeatureScore> {
    let total: f64 = raw.iter().sum();
    let mut out: Vec<FeatureScore> = schema
        .iter()
        .zip(raw)
        .map(|(f, r)| FeatureScore {
            feature: f.clone(),
            score: if total > 0.0 { r / total } else { 0.0 },
        })
        .collect();
    out.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.feature.cmp(&b.feature)));
    out
}
