//! Logistic kernel: linear predictor, inverse logit, logit, Bernoulli
//! log-likelihood, score and observed information.

use serde::{Deserialize, Serialize};

use crate::linalg::Matrix;
use crate::{Dataset, Error, Result};

/// Fitted probabilities are kept this far from 0 and 1.
pub const PROB_EPS: f64 = 1e-12;

/// Intercept plus slopes aligned by name with a dataset's predictors.
///
/// Continuous and dummy slopes share one vector; only the variable's role
/// tells them apart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientVector {
    pub intercept: f64,
    pub names: Vec<String>,
    pub slopes: Vec<f64>,
}

impl CoefficientVector {
    pub fn new(intercept: f64, names: Vec<String>, slopes: Vec<f64>) -> Result<Self> {
        if names.len() != slopes.len() {
            return Err(Error::DimensionMismatch {
                expected: names.len(),
                got: slopes.len(),
            });
        }
        Ok(Self {
            intercept,
            names,
            slopes,
        })
    }

    pub fn zeros(names: Vec<String>) -> Self {
        let slopes = vec![0.0; names.len()];
        Self {
            intercept: 0.0,
            names,
            slopes,
        }
    }

    /// Builds from `[intercept, slopes...]`.
    pub fn from_params(names: Vec<String>, params: &[f64]) -> Result<Self> {
        match params.split_first() {
            Some((&a, rest)) => Self::new(a, names, rest.to_vec()),
            None => Err(Error::DimensionMismatch {
                expected: names.len() + 1,
                got: 0,
            }),
        }
    }

    /// `[intercept, slopes...]`.
    pub fn params(&self) -> Vec<f64> {
        std::iter::once(self.intercept)
            .chain(self.slopes.iter().copied())
            .collect()
    }

    pub fn len(&self) -> usize {
        self.slopes.len() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Checks that slopes line up with the dataset's predictors by name.
    pub fn check_alignment(&self, ds: &Dataset) -> Result<()> {
        let predictors = ds.predictor_names();
        if predictors != self.names {
            return Err(Error::Misaligned(format!(
                "coefficients {:?} vs predictors {:?}",
                self.names, predictors
            )));
        }
        Ok(())
    }
}

/// A probability strictly inside (0, 1).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Probability(f64);

impl Probability {
    pub fn new(p: f64) -> Result<Self> {
        if p > 0.0 && p < 1.0 {
            Ok(Self(p))
        } else {
            Err(Error::ProbabilityDomain(p))
        }
    }

    /// Clamps into `[PROB_EPS, 1 - PROB_EPS]`.
    pub fn clamped(p: f64) -> Self {
        Self(p.clamp(PROB_EPS, 1.0 - PROB_EPS))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

pub fn linear_predictor(c: &CoefficientVector, x: &[f64]) -> Result<f64> {
    if x.len() != c.slopes.len() {
        return Err(Error::DimensionMismatch {
            expected: c.slopes.len(),
            got: x.len(),
        });
    }
    Ok(c.intercept + c.slopes.iter().zip(x).map(|(b, v)| b * v).sum::<f64>())
}

/// Unclamped logistic function, branch-stable for any finite `z`.
pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `π(1 − π)` evaluated without forming `1 − π`.
pub fn bernoulli_variance(z: f64) -> f64 {
    let e = (-z.abs()).exp();
    e / ((1.0 + e) * (1.0 + e))
}

/// `ln(1 + e^z)` without overflow.
pub fn log1p_exp(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

pub fn inverse_logit(z: f64) -> Probability {
    Probability::clamped(sigmoid(z))
}

pub fn logit(p: f64) -> Result<f64> {
    let p = Probability::new(p)?;
    Ok((p.0 / (1.0 - p.0)).ln())
}

/// Response vector and design matrix with a leading column of ones.
#[derive(Debug, Clone)]
pub struct Design {
    n: usize,
    p: usize,
    x: Vec<f64>,
    y: Vec<f64>,
}

impl Design {
    pub fn from_dataset(ds: &Dataset) -> Self {
        let n = ds.n();
        let p = ds.m();
        let mut x = Vec::with_capacity(n * p);
        for i in 0..n {
            x.push(1.0);
            x.extend(ds.predictor_row(i));
        }
        Self {
            n,
            p,
            x,
            y: ds.response(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Parameter count, intercept included.
    pub fn p(&self) -> usize {
        self.p
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.x[i * self.p..(i + 1) * self.p]
    }

    /// Values of parameter column `j` (0 is the intercept).
    pub fn column(&self, j: usize) -> impl Iterator<Item = f64> + '_ {
        self.x.iter().skip(j).step_by(self.p).copied()
    }

    fn check(&self, params: &[f64]) -> Result<()> {
        if params.len() != self.p {
            return Err(Error::DimensionMismatch {
                expected: self.p,
                got: params.len(),
            });
        }
        Ok(())
    }

    fn eta(&self, params: &[f64], i: usize) -> f64 {
        self.row(i).iter().zip(params).map(|(a, b)| a * b).sum()
    }

    pub fn linear_predictors(&self, params: &[f64]) -> Result<Vec<f64>> {
        self.check(params)?;
        Ok((0..self.n).map(|i| self.eta(params, i)).collect())
    }

    /// `Σ yᵢzᵢ − ln(1 + e^{zᵢ})`.
    pub fn log_likelihood(&self, params: &[f64]) -> Result<f64> {
        self.check(params)?;
        Ok((0..self.n)
            .map(|i| {
                let z = self.eta(params, i);
                self.y[i] * z - log1p_exp(z)
            })
            .sum())
    }

    /// `ℓ(to) − ℓ(from)`, summed from per-observation increments so that
    /// tiny steps near the optimum are not lost to cancellation.
    pub fn log_likelihood_change(&self, from: &[f64], to: &[f64]) -> Result<f64> {
        self.check(from)?;
        self.check(to)?;
        let step: Vec<f64> = to.iter().zip(from).map(|(a, b)| a - b).collect();
        Ok((0..self.n)
            .map(|i| {
                let z = self.eta(from, i);
                let d = self.eta(&step, i);
                // ln(1 + e^{z+d}) − ln(1 + e^z) = ln(1 + π(e^d − 1))
                let growth = if d.abs() <= 1.0 {
                    (sigmoid(z) * d.exp_m1()).ln_1p()
                } else {
                    log1p_exp(z + d) - log1p_exp(z)
                };
                self.y[i] * d - growth
            })
            .sum())
    }

    /// `Xᵀ(y − π)`.
    pub fn score(&self, params: &[f64]) -> Result<Vec<f64>> {
        self.check(params)?;
        let mut g = vec![0.0; self.p];
        for i in 0..self.n {
            let r = self.y[i] - sigmoid(self.eta(params, i));
            for (gj, xj) in g.iter_mut().zip(self.row(i)) {
                *gj += xj * r;
            }
        }
        Ok(g)
    }

    /// `XᵀWX` with `W = diag(πᵢ(1 − πᵢ))`.
    pub fn information(&self, params: &[f64]) -> Result<Matrix> {
        self.check(params)?;
        let p = self.p;
        let mut info = Matrix::zeros(p, p);
        for i in 0..self.n {
            let w = bernoulli_variance(self.eta(params, i));
            let row = self.row(i);
            for a in 0..p {
                let wa = w * row[a];
                for b in 0..=a {
                    info[(a, b)] += wa * row[b];
                }
            }
        }
        for a in 0..p {
            for b in 0..a {
                info[(b, a)] = info[(a, b)];
            }
        }
        Ok(info)
    }
}

fn aligned_design(c: &CoefficientVector, ds: &Dataset) -> Result<Design> {
    c.check_alignment(ds)?;
    Ok(Design::from_dataset(ds))
}

pub fn log_likelihood(c: &CoefficientVector, ds: &Dataset) -> Result<f64> {
    aligned_design(c, ds)?.log_likelihood(&c.params())
}

/// Gradient of [`log_likelihood`], intercept first.
pub fn score(c: &CoefficientVector, ds: &Dataset) -> Result<Vec<f64>> {
    aligned_design(c, ds)?.score(&c.params())
}

/// Negative Hessian of [`log_likelihood`].
pub fn information_matrix(c: &CoefficientVector, ds: &Dataset) -> Result<Matrix> {
    aligned_design(c, ds)?.information(&c.params())
}
