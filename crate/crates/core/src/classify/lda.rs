use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::knn::check_training;
use crate::dataset::Quadrant;
use crate::error::{Error, Result};

/// Ridge factor relative to the mean diagonal of the pooled covariance.
pub const LDA_RIDGE_FACTOR: f64 = 1e-6;

/// Linear discriminant analysis with a shared, ridge-regularized covariance.
///
/// Stores for each class `c` the weight `Σ⁻¹μ_c` and the offset
/// `-½ μ_cᵀΣ⁻¹μ_c + ln π_c`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LdaModel {
    classes: Vec<Quadrant>,
    means: Vec<Vec<f64>>,
    priors: Vec<f64>,
    weights: Vec<Vec<f64>>,
    offsets: Vec<f64>,
    ridge: f64,
}

impl LdaModel {
    pub fn fit(x: &[Vec<f64>], y: &[Quadrant]) -> Result<Self> {
        let dim = check_training(x, y)?;
        let classes: Vec<Quadrant> = Quadrant::ALL.into_iter().filter(|q| y.contains(q)).collect();
        if classes.len() < 2 {
            return Err(Error::InsufficientClasses { needed: 2, found: classes.len() });
        }
        let n = x.len();
        let mut means = Vec::with_capacity(classes.len());
        let mut priors = Vec::with_capacity(classes.len());
        let mut scatter = DMatrix::<f64>::zeros(dim, dim);
        for &c in &classes {
            let rows: Vec<&Vec<f64>> = x.iter().zip(y).filter(|(_, l)| **l == c).map(|(r, _)| r).collect();
            if rows.len() < 2 {
                return Err(Error::InsufficientClassData { class: c.to_string(), count: rows.len(), needed: 2 });
            }
            let mut mu = DVector::<f64>::zeros(dim);
            for r in &rows {
                mu += DVector::from_column_slice(r);
            }
            mu /= rows.len() as f64;
            for r in &rows {
                let d = DVector::from_column_slice(r) - &mu;
                scatter.ger(1.0, &d, &d, 1.0);
            }
            means.push(mu.as_slice().to_vec());
            priors.push(rows.len() as f64 / n as f64);
        }
        let mut cov = scatter / (n - classes.len()) as f64;
        let ridge = LDA_RIDGE_FACTOR * cov.trace() / dim as f64;
        for i in 0..dim {
            cov[(i, i)] += ridge;
        }
        let chol = cov.cholesky().ok_or(Error::SingularCovariance)?;
        let mut weights = Vec::with_capacity(classes.len());
        let mut offsets = Vec::with_capacity(classes.len());
        for (mu, prior) in means.iter().zip(&priors) {
            let mu = DVector::from_column_slice(mu);
            let w = chol.solve(&mu);
            if w.iter().any(|v| !v.is_finite()) {
                return Err(Error::SingularCovariance);
            }
            offsets.push(-0.5 * mu.dot(&w) + prior.ln());
            weights.push(w.as_slice().to_vec());
        }
        Ok(LdaModel { classes, means, priors, weights, offsets, ridge })
    }

    pub fn dim(&self) -> usize {
        self.means[0].len()
    }

    pub fn classes(&self) -> &[Quadrant] {
        &self.classes
    }

    pub fn priors(&self) -> &[f64] {
        &self.priors
    }

    pub fn ridge(&self) -> f64 {
        self.ridge
    }

    /// `δ_c(x)` for every class seen in training, in canonical order.
    pub fn discriminants(&self, x: &[f64]) -> Result<Vec<(Quadrant, f64)>> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: x.len() });
        }
        Ok(self
            .classes
            .iter()
            .zip(self.weights.iter().zip(&self.offsets))
            .map(|(&c, (w, b))| (c, w.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + b))
            .collect())
    }

    pub fn predict(&self, x: &[f64]) -> Result<Quadrant> {
        let scores = self.discriminants(x)?;
        Ok(argmax(&scores))
    }
}

/// First maximum wins, so ties resolve to the canonical order.
pub(crate) fn argmax(scores: &[(Quadrant, f64)]) -> Quadrant {
    let mut best = scores[0];
    for &s in &scores[1..] {
        if s.1 > best.1 {
            best = s;
        }
    }
    best.0
}

pub fn lda_fit(x: &[Vec<f64>], y: &[Quadrant]) -> Result<LdaModel> {
    LdaModel::fit(x, y)
}

pub fn lda_predict(model: &LdaModel, x: &[f64]) -> Result<Quadrant> {
    model.predict(x)
}
