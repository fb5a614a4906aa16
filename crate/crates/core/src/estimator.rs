//! Maximum-likelihood fitting by Newton/IRLS with step-halving, plus
//! standard errors, prediction and separation diagnostics.

use serde::{Deserialize, Serialize};

pub use crate::linalg::solve_spd;
use crate::linalg::{Matrix, ScaledCholesky};
use crate::logit_core::{self, sigmoid, CoefficientVector, Design, Probability, PROB_EPS};
use crate::{Dataset, Error, Result};

/// Largest |coefficient| on the standardized scale before a fit is
/// considered separated.
pub const STANDARDIZED_COEF_LIMIT: f64 = 15.0;
/// Share of fitted probabilities pinned at 0 or 1 that signals separation.
pub const PINNED_SHARE: f64 = 0.99;
const MAX_HALVINGS: usize = 40;
const JITTER_STEPS: usize = 12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    pub max_iterations: usize,
    /// Bound on max |score| and on the log-likelihood change.
    pub tolerance: f64,
    /// Any standard error above this flags separation.
    pub se_clip_warning: f64,
    /// L2 penalty on slopes (not the intercept). Zero gives the plain MLE.
    pub ridge: f64,
    /// Halve Newton steps that lower the likelihood. Only ever disabled as
    /// a negative control for the validation battery.
    pub step_halving: bool,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            max_iterations: 50,
            tolerance: 1e-8,
            se_clip_warning: 50.0,
            ridge: 0.0,
            step_halving: true,
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations < 1 {
            return Err(Error::InvalidConfig(
                "max_iterations must be at least 1".into(),
            ));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidConfig("tolerance must be positive".into()));
        }
        if !(self.ridge >= 0.0) || !self.ridge.is_finite() {
            return Err(Error::InvalidConfig(
                "ridge must be finite and non-negative".into(),
            ));
        }
        if !(self.se_clip_warning > 0.0) {
            return Err(Error::InvalidConfig(
                "se_clip_warning must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub coefficients: CoefficientVector,
    /// Inverse information at the final coefficients, intercept first.
    pub covariance: Matrix,
    pub standard_errors: Vec<f64>,
    pub log_likelihood: f64,
    pub iterations: usize,
    pub converged: bool,
    pub separation_detected: bool,
    /// Human-readable reasons behind `separation_detected`.
    pub diagnosis: Vec<String>,
    /// Objective value at the start and after every accepted iteration.
    pub trace: Vec<f64>,
    /// Unclamped fitted probabilities, one per observation.
    pub fitted: Vec<f64>,
    /// Largest |score| component at the final coefficients.
    pub max_abs_score: f64,
}

impl FitResult {
    pub fn n_obs(&self) -> usize {
        self.fitted.len()
    }

    pub fn n_params(&self) -> usize {
        self.coefficients.len()
    }
}

fn penalized(design: &Design, params: &[f64], ridge: f64) -> Result<f64> {
    let ll = design.log_likelihood(params)?;
    Ok(ll - 0.5 * ridge * params[1..].iter().map(|b| b * b).sum::<f64>())
}

fn penalized_change(design: &Design, from: &[f64], to: &[f64], ridge: f64) -> Result<f64> {
    let penalty: f64 = from[1..]
        .iter()
        .zip(&to[1..])
        .map(|(a, b)| (b - a) * (b + a))
        .sum();
    Ok(design.log_likelihood_change(from, to)? - 0.5 * ridge * penalty)
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Fits the logit model of `ds` (response on every predictor) by Newton
/// iterations `c ← c + (XᵀWX)⁻¹Xᵀ(y − π)` from `(logit(ȳ), 0, …, 0)`.
///
/// A step that lowers the (penalized) log-likelihood is halved until it
/// does not. Convergence needs the score, the likelihood change and the
/// relative step all small; a separated fit never satisfies the last, so it
/// runs to `max_iterations` and is reported with `separation_detected`.
pub fn fit(ds: &Dataset, cfg: &FitConfig) -> Result<FitResult> {
    fit_impl(ds, cfg, None)
}

/// [`fit`] started from `start` instead of `(logit(ȳ), 0, …, 0)`.
pub fn fit_from(ds: &Dataset, cfg: &FitConfig, start: &CoefficientVector) -> Result<FitResult> {
    start.check_alignment(ds)?;
    fit_impl(ds, cfg, Some(start))
}

fn fit_impl(ds: &Dataset, cfg: &FitConfig, start: Option<&CoefficientVector>) -> Result<FitResult> {
    cfg.validate()?;
    let design = Design::from_dataset(ds);
    let names = ds.predictor_names();
    let n = design.n();
    let p = design.p();

    for (j, name) in names.iter().enumerate() {
        let mut col = design.column(j + 1);
        let first = col.next().unwrap_or(0.0);
        if col.all(|v| v == first) {
            return Err(Error::ConstantPredictor(name.clone()));
        }
    }
    let ybar = design.y().iter().sum::<f64>() / n as f64;
    if ybar == 0.0 || ybar == 1.0 {
        return Err(Error::DegenerateResponse(ybar));
    }

    let mut params = match start {
        Some(c) => c.params(),
        None => {
            let mut v = vec![0.0; p];
            v[0] = logit_core::logit(ybar)?;
            v
        }
    };
    let mut objective = penalized(&design, &params, cfg.ridge)?;
    let mut trace = vec![objective];
    let mut converged = false;
    let mut singular_stop = false;
    let mut iterations = 0;

    while iterations < cfg.max_iterations {
        let iteration = iterations + 1;
        let (grad, info) = penalized_derivatives(&design, &params, cfg.ridge)?;
        let step = match ScaledCholesky::factor(&info).and_then(|f| f.solve(&grad)) {
            Ok(s) => s,
            // Information that collapses after progress is the separation
            // signature; at the start point it means aliased predictors.
            Err(_) if iteration > 1 => {
                singular_stop = true;
                break;
            }
            Err(_) => return Err(Error::SingularInformation { iteration }),
        };

        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let candidate: Vec<f64> = params.iter().zip(&step).map(|(c, s)| c + t * s).collect();
            let gain = penalized_change(&design, &params, &candidate, cfg.ridge)?;
            if !cfg.step_halving || gain >= 0.0 {
                accepted = Some((candidate, gain));
                break;
            }
            t *= 0.5;
        }
        let Some((candidate, gain)) = accepted else {
            // No ascent along the Newton direction: numerically at the top.
            converged = max_abs(&grad) <= cfg.tolerance;
            break;
        };

        let rel_step = params
            .iter()
            .zip(&candidate)
            .map(|(a, b)| (b - a).abs() / (1.0 + b.abs()))
            .fold(0.0, f64::max);
        let change = gain.abs();
        params = candidate;
        objective += gain;
        trace.push(objective);
        iterations = iteration;

        let (grad, _) = penalized_derivatives(&design, &params, cfg.ridge)?;
        if max_abs(&grad) <= cfg.tolerance
            && change <= cfg.tolerance
            && rel_step <= cfg.tolerance.sqrt()
        {
            converged = true;
            break;
        }
    }

    let info = penalized_derivatives(&design, &params, cfg.ridge)?.1;
    let covariance = invert_information(&info, iterations)?;
    let coefficients = CoefficientVector::from_params(names, &params)?;
    let log_likelihood = design.log_likelihood(&params)?;
    let fitted = design
        .linear_predictors(&params)?
        .into_iter()
        .map(sigmoid)
        .collect();
    let max_abs_score = max_abs(&design.score(&params)?);

    let mut result = FitResult {
        standard_errors: Vec::new(),
        coefficients,
        covariance,
        log_likelihood,
        iterations,
        converged,
        separation_detected: false,
        diagnosis: Vec::new(),
        trace,
        fitted,
        max_abs_score,
    };
    result.standard_errors = standard_errors(&result)?;
    let mut diagnosis = detect_with_design(&result.trace.clone(), &result, &design, cfg);
    if singular_stop {
        diagnosis.reasons.insert(
            0,
            format!(
                "information matrix became numerically singular at iteration {}",
                iterations + 1
            ),
        );
        diagnosis.separated = true;
    }
    result.separation_detected = diagnosis.separated;
    result.diagnosis = diagnosis.reasons;
    Ok(result)
}

fn penalized_derivatives(
    design: &Design,
    params: &[f64],
    ridge: f64,
) -> Result<(Vec<f64>, Matrix)> {
    let mut grad = design.score(params)?;
    let mut info = design.information(params)?;
    if ridge > 0.0 {
        for j in 1..params.len() {
            grad[j] -= ridge * params[j];
            info[(j, j)] += ridge;
        }
    }
    Ok((grad, info))
}

/// Inverts the information; if it is numerically singular (separated
/// fits), a growing diagonal jitter keeps the variances finite and huge.
fn invert_information(info: &Matrix, iteration: usize) -> Result<Matrix> {
    if let Ok(f) = ScaledCholesky::factor(info) {
        return Ok(f.inverse());
    }
    let diag = info.diagonal();
    let mut jitter = 1e-10;
    for _ in 0..JITTER_STEPS {
        let mut m = info.clone();
        for (j, d) in diag.iter().enumerate() {
            m[(j, j)] = d * (1.0 + jitter) + f64::MIN_POSITIVE;
        }
        if let Ok(f) = ScaledCholesky::factor(&m) {
            return Ok(f.inverse());
        }
        jitter *= 10.0;
    }
    Err(Error::SingularInformation { iteration })
}

/// Square roots of the covariance diagonal.
pub fn standard_errors(fr: &FitResult) -> Result<Vec<f64>> {
    fr.covariance
        .diagonal()
        .into_iter()
        .enumerate()
        .map(|(index, v)| {
            if v < 0.0 || v.is_nan() {
                Err(Error::NegativeVariance { index, value: v })
            } else {
                Ok(v.sqrt())
            }
        })
        .collect()
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SeparationDiagnosis {
    pub separated: bool,
    pub reasons: Vec<String>,
}

/// Flags (quasi-)complete separation. Any of:
/// - a coefficient above [`STANDARDIZED_COEF_LIMIT`] in magnitude once
///   predictors are centred and scaled to unit standard deviation;
/// - a standard error above `cfg.se_clip_warning`;
/// - at least [`PINNED_SHARE`] of fitted probabilities within
///   [`PROB_EPS`] of 0 or 1 while the likelihood was still rising at the
///   iteration cap.
pub fn detect_separation(
    trace: &[f64],
    fr: &FitResult,
    ds: &Dataset,
    cfg: &FitConfig,
) -> Result<SeparationDiagnosis> {
    fr.coefficients.check_alignment(ds)?;
    Ok(detect_with_design(
        trace,
        fr,
        &Design::from_dataset(ds),
        cfg,
    ))
}

fn detect_with_design(
    trace: &[f64],
    fr: &FitResult,
    design: &Design,
    cfg: &FitConfig,
) -> SeparationDiagnosis {
    let mut reasons = Vec::new();
    let n = design.n() as f64;
    let c = &fr.coefficients;

    let mut centred_intercept = c.intercept;
    for (j, (name, &b)) in c.names.iter().zip(&c.slopes).enumerate() {
        let col: Vec<f64> = design.column(j + 1).collect();
        let mean = col.iter().sum::<f64>() / n;
        let sd = (col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0)).sqrt();
        centred_intercept += b * mean;
        if (b * sd).abs() > STANDARDIZED_COEF_LIMIT {
            reasons.push(format!(
                "standardized coefficient of `{name}` is {:.3}",
                b * sd
            ));
        }
    }
    if centred_intercept.abs() > STANDARDIZED_COEF_LIMIT {
        reasons.push(format!("standardized intercept is {centred_intercept:.3}"));
    }

    let labels = std::iter::once("intercept").chain(c.names.iter().map(String::as_str));
    for (label, &se) in labels.zip(&fr.standard_errors) {
        if se > cfg.se_clip_warning {
            reasons.push(format!("standard error of `{label}` is {se:.4}"));
        }
    }

    let pinned = fr
        .fitted
        .iter()
        .filter(|&&p| p <= PROB_EPS || p >= 1.0 - PROB_EPS)
        .count();
    let rising = matches!(trace, [.., a, b] if b > a);
    if !fr.converged
        && fr.iterations >= cfg.max_iterations
        && rising
        && pinned as f64 >= PINNED_SHARE * n
    {
        reasons.push(format!(
            "{pinned} of {} fitted probabilities pinned at 0 or 1 with likelihood still rising",
            design.n()
        ));
    }

    SeparationDiagnosis {
        separated: !reasons.is_empty(),
        reasons,
    }
}

/// Fitted probability for one covariate row.
pub fn predict(fr: &FitResult, x: &[f64]) -> Result<Probability> {
    let z = logit_core::linear_predictor(&fr.coefficients, x)?;
    Ok(logit_core::inverse_logit(z))
}
