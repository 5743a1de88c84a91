//! Binary maximum entropy (logistic regression) classifier for scoring
//! candidate plans.

use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

const MODEL_FORMAT: &str = "lexforge-maxent";
const MODEL_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum MaxEntError {
    #[error("training data needs both positive and negative instances")]
    SingleClass,
    #[error("training data needs at least two instances")]
    TooFew,
    #[error("expected {expected} features, got {got}")]
    SchemaMismatch { expected: usize, got: usize },
    #[error("model file: {0}")]
    Format(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub features: Vec<f64>,
    pub positive: bool,
    /// Identifier of the candidate this instance describes.
    pub source: String,
}

impl Instance {
    pub fn new(features: Vec<f64>, positive: bool, source: impl Into<String>) -> Self {
        Self {
            features,
            positive,
            source: source.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub l2: f64,
    pub max_iterations: usize,
    /// Stop once every gradient coordinate is below this.
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            l2: 1e-4,
            max_iterations: 200,
            tolerance: 1e-8,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Model {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub config: TrainConfig,
    pub converged: bool,
    /// Hash of the feature names the weights belong to.
    #[serde(default)]
    pub schema: String,
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    version: u32,
    model: Model,
}

impl Model {
    pub fn zeros(width: usize) -> Self {
        Self {
            weights: vec![0.0; width],
            bias: 0.0,
            config: TrainConfig::default(),
            converged: true,
            schema: String::new(),
        }
    }

    pub fn to_json(&self) -> String {
        let file = ModelFile {
            format: MODEL_FORMAT.to_string(),
            version: MODEL_VERSION,
            model: self.clone(),
        };
        serde_json::to_string_pretty(&file).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, MaxEntError> {
        let file: ModelFile = serde_json::from_str(text).map_err(|e| MaxEntError::Format(e.to_string()))?;
        if file.format != MODEL_FORMAT || file.version != MODEL_VERSION {
            return Err(MaxEntError::Format(format!(
                "unsupported model {} v{}",
                file.format, file.version
            )));
        }
        if file.model.weights.iter().any(|w| !w.is_finite()) || !file.model.bias.is_finite() {
            return Err(MaxEntError::Format("non-finite weight".into()));
        }
        Ok(file.model)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), MaxEntError> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()).map_err(|source| MaxEntError::Io {
            path: path.display().to_string(),
            source,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, MaxEntError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| MaxEntError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    fn margin(&self, features: &[f64]) -> f64 {
        self.bias + self.weights.iter().zip(features).map(|(w, x)| w * x).sum::<f64>()
    }

    /// Probability of the positive class.
    pub fn predict_proba(&self, features: &[f64]) -> Result<f64, MaxEntError> {
        if features.len() != self.weights.len() {
            return Err(MaxEntError::SchemaMismatch {
                expected: self.weights.len(),
                got: features.len(),
            });
        }
        Ok(sigmoid(self.margin(features)))
    }
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

fn width(data: &[Instance]) -> Result<usize, MaxEntError> {
    let w = data.first().map_or(0, |i| i.features.len());
    if let Some(bad) = data.iter().find(|i| i.features.len() != w) {
        return Err(MaxEntError::SchemaMismatch {
            expected: w,
            got: bad.features.len(),
        });
    }
    Ok(w)
}

fn class_counts(data: &[Instance]) -> (usize, usize) {
    let pos = data.iter().filter(|i| i.positive).count();
    (pos, data.len() - pos)
}

/// Replicates positive instances until they are at least as many as the
/// negatives, then shuffles.
pub fn oversample(data: &[Instance], seed: u64) -> Result<Vec<Instance>, MaxEntError> {
    let (pos, neg) = class_counts(data);
    if pos == 0 || neg == 0 {
        return Err(MaxEntError::SingleClass);
    }
    let positives: Vec<&Instance> = data.iter().filter(|i| i.positive).collect();
    let mut out = data.to_vec();
    let mut added = pos;
    let mut next = 0;
    while added < neg {
        out.push(positives[next % positives.len()].clone());
        next += 1;
        added += 1;
    }
    out.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    Ok(out)
}

/// Mean log loss plus `l2 / 2 * |w|^2` (the bias is not penalized), with its
/// gradient with respect to the weights and the bias.
pub fn loss_and_gradient(weights: &[f64], bias: f64, data: &[Instance], l2: f64) -> (f64, Vec<f64>, f64) {
    let mut grad: Vec<f64> = weights.iter().map(|w| l2 * w).collect();
    let mut loss = 0.5 * l2 * weights.iter().map(|w| w * w).sum::<f64>();
    let mut grad_bias = 0.0;
    if data.is_empty() {
        return (loss, grad, grad_bias);
    }
    let n = data.len() as f64;
    for inst in data {
        let z = bias + weights.iter().zip(&inst.features).map(|(w, x)| w * x).sum::<f64>();
        let y = if inst.positive { 1.0 } else { 0.0 };
        // log(1 + e^z) - y z, computed stably.
        let softplus = if z > 0.0 { z + (-z).exp().ln_1p() } else { z.exp().ln_1p() };
        loss += (softplus - y * z) / n;
        let d = (sigmoid(z) - y) / n;
        for (g, x) in grad.iter_mut().zip(&inst.features) {
            *g += d * x;
        }
        grad_bias += d;
    }
    (loss, grad, grad_bias)
}

fn hessian(weights: &[f64], bias: f64, data: &[Instance], l2: f64) -> DMatrix<f64> {
    let d = weights.len() + 1;
    let n = data.len() as f64;
    let mut h = DMatrix::<f64>::zeros(d, d);
    let mut x = DVector::<f64>::zeros(d);
    for inst in data {
        x.rows_mut(0, d - 1).copy_from_slice(&inst.features);
        x[d - 1] = 1.0;
        let p = sigmoid(bias + weights.iter().zip(&inst.features).map(|(w, x)| w * x).sum::<f64>());
        h.syger(p * (1.0 - p) / n, &x, &x, 1.0);
    }
    h.fill_upper_triangle_with_lower_triangle();
    for j in 0..d - 1 {
        h[(j, j)] += l2;
    }
    h
}

/// Solves `h step = g`, adding a growing ridge when `h` is singular.
fn newton_step(h: &DMatrix<f64>, g: &DVector<f64>) -> DVector<f64> {
    let scale = h.diagonal().amax().max(1e-12);
    let mut ridge = 0.0;
    loop {
        let mut damped = h.clone();
        for j in 0..damped.nrows() {
            damped[(j, j)] += ridge;
        }
        if let Some(chol) = damped.cholesky() {
            return chol.solve(g);
        }
        ridge = if ridge == 0.0 { scale * 1e-12 } else { ridge * 10.0 };
    }
}

/// Damped Newton iterations with a backtracking line search on the
/// regularized log loss.
pub fn train(data: &[Instance], config: &TrainConfig) -> Result<Model, MaxEntError> {
    if data.len() < 2 {
        return Err(MaxEntError::TooFew);
    }
    let (pos, neg) = class_counts(data);
    if pos == 0 || neg == 0 {
        return Err(MaxEntError::SingleClass);
    }
    let w = width(data)?;
    let mut weights = vec![0.0; w];
    let mut bias = 0.0;
    let mut converged = false;
    let (mut loss, mut grad, mut grad_bias) = loss_and_gradient(&weights, bias, data, config.l2);
    for _ in 0..config.max_iterations {
        let largest = grad.iter().fold(grad_bias.abs(), |m, g| m.max(g.abs()));
        if largest < config.tolerance {
            converged = true;
            break;
        }
        let g = DVector::from_iterator(w + 1, grad.iter().copied().chain(std::iter::once(grad_bias)));
        let step = newton_step(&hessian(&weights, bias, data, config.l2), &g);
        let slope = g.dot(&step);
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..50 {
            let cand_w: Vec<f64> = weights.iter().zip(step.iter()).map(|(wj, sj)| wj - t * sj).collect();
            let cand_b = bias - t * step[w];
            let (l, gw, gb) = loss_and_gradient(&cand_w, cand_b, data, config.l2);
            if l <= loss - 1e-4 * t * slope {
                (weights, bias, loss, grad, grad_bias) = (cand_w, cand_b, l, gw, gb);
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            // No decrease is representable any more.
            converged = largest < config.tolerance.sqrt();
            break;
        }
    }
    if !converged {
        log::warn!("maxent: no convergence after {} iterations", config.max_iterations);
    }
    Ok(Model {
        weights,
        bias,
        config: config.clone(),
        converged,
        schema: String::new(),
    })
}

/// Largest deviation between the analytic gradient and central finite
/// differences, relative to the larger of the two gradients' max norms.
pub fn gradient_check(model: &Model, data: &[Instance]) -> f64 {
    let l2 = model.config.l2;
    let (_, grad, grad_bias) = loss_and_gradient(&model.weights, model.bias, data, l2);
    let h = 1e-5;
    let mut numeric = Vec::with_capacity(grad.len() + 1);
    for j in 0..model.weights.len() {
        let mut plus = model.weights.clone();
        let mut minus = model.weights.clone();
        plus[j] += h;
        minus[j] -= h;
        let lp = loss_and_gradient(&plus, model.bias, data, l2).0;
        let lm = loss_and_gradient(&minus, model.bias, data, l2).0;
        numeric.push((lp - lm) / (2.0 * h));
    }
    let lp = loss_and_gradient(&model.weights, model.bias + h, data, l2).0;
    let lm = loss_and_gradient(&model.weights, model.bias - h, data, l2).0;
    numeric.push((lp - lm) / (2.0 * h));
    let mut analytic = grad;
    analytic.push(grad_bias);
    let scale = analytic
        .iter()
        .chain(&numeric)
        .fold(0.0_f64, |m, g| m.max(g.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    analytic
        .iter()
        .zip(&numeric)
        .map(|(a, n)| (a - n).abs())
        .fold(0.0, f64::max)
        / scale
}

/// Average leave-one-out errors for one training-set fraction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub fraction: f64,
    pub test_error: f64,
    pub train_error: f64,
}

enum Classifier {
    Model(Model),
    Constant(bool),
}

impl Classifier {
    fn fit(data: &[Instance], config: &TrainConfig) -> Result<Self, MaxEntError> {
        let (pos, neg) = class_counts(data);
        if pos == 0 || neg == 0 || data.len() < 2 {
            return Ok(Classifier::Constant(pos >= neg && pos > 0));
        }
        let balanced = oversample(data, config.seed)?;
        Ok(Classifier::Model(train(&balanced, config)?))
    }

    fn predict(&self, features: &[f64]) -> Result<bool, MaxEntError> {
        match self {
            Classifier::Model(m) => Ok(m.predict_proba(features)? >= 0.5),
            Classifier::Constant(c) => Ok(*c),
        }
    }
}

/// Leave-one-out evaluation: each instance is tested by a classifier trained
/// on 10%, 20%, ..., 100% of the remaining instances (in a fixed shuffled
/// order). Instances whose feature vector equals the test instance's are
/// never used for its training. Training subsets are over-sampled; subsets
/// with a single class predict that class.
pub fn loo_evaluate(data: &[Instance], config: &TrainConfig) -> Result<Vec<CurvePoint>, MaxEntError> {
    width(data)?;
    let mut order: Vec<usize> = (0..data.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(config.seed));
    let fractions: Vec<f64> = (1..=10).map(|k| k as f64 / 10.0).collect();
    let mut test_err = vec![0.0; fractions.len()];
    let mut train_err = vec![0.0; fractions.len()];
    if data.is_empty() {
        return Ok(Vec::new());
    }
    for (i, held) in data.iter().enumerate() {
        let pool: Vec<&Instance> = order
            .iter()
            .filter(|&&j| j != i && data[j].features != held.features)
            .map(|&j| &data[j])
            .collect();
        for (f, &fraction) in fractions.iter().enumerate() {
            let take = ((pool.len() as f64) * fraction).ceil() as usize;
            let subset: Vec<Instance> = pool[..take.min(pool.len())].iter().map(|x| (*x).clone()).collect();
            let clf = Classifier::fit(&subset, config)?;
            if clf.predict(&held.features)? != held.positive {
                test_err[f] += 1.0;
            }
            if !subset.is_empty() {
                let mut wrong = 0usize;
                for inst in &subset {
                    if clf.predict(&inst.features)? != inst.positive {
                        wrong += 1;
                    }
                }
                train_err[f] += wrong as f64 / subset.len() as f64;
            }
        }
    }
    let n = data.len() as f64;
    Ok(fractions
        .iter()
        .enumerate()
        .map(|(f, &fraction)| CurvePoint {
            fraction,
            test_error: test_err[f] / n,
            train_error: train_err[f] / n,
        })
        .collect())
}

fn entropy(pos: usize, neg: usize) -> f64 {
    let n = (pos + neg) as f64;
    if n == 0.0 {
        return 0.0;
    }
    [pos, neg]
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum()
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}

/// Information gain (bits) of each feature for the class label, with the
/// feature split at its median: values above the median against the rest,
/// or at-or-above against below when nothing lies above it.
pub fn information_gain(data: &[Instance]) -> Result<Vec<f64>, MaxEntError> {
    let w = width(data)?;
    let (pos, neg) = class_counts(data);
    let base = entropy(pos, neg);
    let n = data.len() as f64;
    Ok((0..w)
        .map(|j| {
            let mut column: Vec<f64> = data.iter().map(|i| i.features[j]).collect();
            let m = median(&mut column);
            let above = data.iter().filter(|i| i.features[j] > m).count();
            let split = |i: &Instance| {
                if above > 0 {
                    i.features[j] > m
                } else {
                    i.features[j] >= m
                }
            };
            let (mut hp, mut hn, mut lp, mut ln) = (0, 0, 0, 0);
            for inst in data {
                match (split(inst), inst.positive) {
                    (true, true) => hp += 1,
                    (true, false) => hn += 1,
                    (false, true) => lp += 1,
                    (false, false) => ln += 1,
                }
            }
            let high = (hp + hn) as f64 / n;
            let low = (lp + ln) as f64 / n;
            (base - high * entropy(hp, hn) - low * entropy(lp, ln)).max(0.0)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(x: &[f64], positive: bool) -> Instance {
        Instance::new(x.to_vec(), positive, "")
    }

    #[test]
    fn oversampling_balances() {
        let mut data: Vec<Instance> = (0..16).map(|i| inst(&[i as f64], true)).collect();
        data.extend((0..84).map(|i| inst(&[i as f64], false)));
        let out = oversample(&data, 3).unwrap();
        assert_eq!(out.iter().filter(|i| i.positive).count(), 84);
        assert_eq!(out.len(), 168);
        let balanced = vec![inst(&[0.0], true), inst(&[1.0], false)];
        assert_eq!(oversample(&balanced, 0).unwrap().len(), 2);
        assert!(matches!(
            oversample(&[inst(&[0.0], false)], 0),
            Err(MaxEntError::SingleClass)
        ));
    }

    #[test]
    fn separable_toy_set() {
        let data = vec![
            inst(&[0.0, 0.1], false),
            inst(&[0.2, 0.0], false),
            inst(&[0.1, 0.3], false),
            inst(&[0.9, 1.0], true),
            inst(&[1.0, 0.8], true),
            inst(&[0.8, 0.9], true),
        ];
        let model = train(&data, &TrainConfig::default()).unwrap();
        for i in &data {
            assert_eq!(model.predict_proba(&i.features).unwrap() >= 0.5, i.positive);
        }
        assert!(model.predict_proba(&[1.5, 1.5]).unwrap() > 0.9);
    }

    #[test]
    fn contradictory_duplicates_give_class_ratio() {
        let mut data = vec![inst(&[1.0], true); 3];
        data.push(inst(&[1.0], false));
        let config = TrainConfig {
            l2: 0.0,
            tolerance: 1e-12,
            ..TrainConfig::default()
        };
        let model = train(&data, &config).unwrap();
        assert!((model.predict_proba(&[1.0]).unwrap() - 0.75).abs() < 1e-6);
    }

    #[test]
    fn zero_features_learn_log_odds() {
        let mut data = vec![inst(&[0.0, 0.0], true); 2];
        data.extend(vec![inst(&[0.0, 0.0], false); 6]);
        let model = train(&data, &TrainConfig::default()).unwrap();
        assert!(model.weights.iter().all(|w| w.abs() < 1e-12));
        assert!((model.bias - (2.0_f64 / 6.0).ln()).abs() < 1e-5, "{}", model.bias);
    }

    #[test]
    fn prediction_edges() {
        assert_eq!(Model::zeros(3).predict_proba(&[1.0, 2.0, 3.0]).unwrap(), 0.5);
        let mut m = Model::zeros(1);
        m.weights[0] = 50.0;
        assert!(m.predict_proba(&[10.0]).unwrap() > 1.0 - 1e-12);
        assert!(matches!(m.predict_proba(&[1.0, 2.0]), Err(MaxEntError::SchemaMismatch { .. })));
    }

    #[test]
    fn gradient_matches_hand_formula() {
        let data = vec![inst(&[2.0, -1.0], true)];
        let mut m = Model::zeros(2);
        m.weights = vec![0.3, 0.5];
        m.bias = -0.2;
        m.config.l2 = 0.0;
        let (_, g, gb) = loss_and_gradient(&m.weights, m.bias, &data, 0.0);
        let p = sigmoid(0.3 * 2.0 - 0.5 - 0.2);
        assert!((g[0] - (p - 1.0) * 2.0).abs() < 1e-12);
        assert!((g[1] + (p - 1.0)).abs() < 1e-12);
        assert!((gb - (p - 1.0)).abs() < 1e-12);
        assert!(gradient_check(&m, &data) < 1e-6);
        assert_eq!(gradient_check(&Model::zeros(2), &[]), 0.0);
    }

    #[test]
    fn information_gain_cases() {
        let data = vec![
            inst(&[1.0, 5.0, 0.0], true),
            inst(&[0.0, 5.0, 1.0], false),
            inst(&[0.0, 5.0, 0.0], false),
            inst(&[0.0, 5.0, 1.0], false),
        ];
        let ig = information_gain(&data).unwrap();
        let h = entropy(1, 3);
        assert!((ig[0] - h).abs() < 1e-12);
        assert_eq!(ig[1], 0.0);
        // Split {1,1} vs {0,0}: the high side holds two negatives, the low
        // side one positive and one negative.
        let want = h - 0.5 * 0.0 - 0.5 * 1.0;
        assert!((ig[2] - want).abs() < 1e-12);
        // Mostly positive perfect predictor: nothing lies above the median.
        let flipped: Vec<Instance> = data.iter().map(|i| inst(&i.features, !i.positive)).collect();
        let flipped: Vec<Instance> = flipped
            .into_iter()
            .map(|mut i| {
                i.features[0] = if i.positive { 1.0 } else { 0.0 };
                i
            })
            .collect();
        assert!((information_gain(&flipped).unwrap()[0] - h).abs() < 1e-12);
    }

    #[test]
    fn loo_small_cases() {
        let two = vec![inst(&[0.0], false), inst(&[1.0], true)];
        let curve = loo_evaluate(&two, &TrainConfig::default()).unwrap();
        assert_eq!(curve.len(), 10);
        let sep: Vec<Instance> = (0..12)
            .map(|i| {
                let x = if i < 6 { i as f64 * 0.05 } else { 0.75 + (i - 6) as f64 * 0.05 };
                inst(&[x], i >= 6)
            })
            .collect();
        let curve = loo_evaluate(&sep, &TrainConfig::default()).unwrap();
        assert_eq!(curve.last().unwrap().test_error, 0.0);
    }

    #[test]
    fn model_json_round_trip() {
        let mut m = Model::zeros(2);
        m.weights = vec![0.25, -1.5];
        let back = Model::from_json(&m.to_json()).unwrap();
        assert_eq!(back, m);
        assert!(Model::from_json("{}").is_err());
    }
}
