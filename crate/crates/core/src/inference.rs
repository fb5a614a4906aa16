//! Wald z-tests, the likelihood-ratio G test and odds ratios.

use serde::{Deserialize, Serialize};

use crate::estimator::FitResult;
pub use crate::special::{chi_square_cdf, chi_square_sf, normal_cdf, normal_quantile, normal_sf};
use crate::{Error, Result};

/// Slack allowed when the full likelihood sits below the null.
const LL_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaldTest {
    pub z: f64,
    pub p_two_sided: f64,
    pub significant: bool,
}

/// Two-sided Wald test of `coefficient = 0`; rejects when
/// `|z| > Φ⁻¹(1 − alpha/2)`.
pub fn wald_test(coefficient: f64, se: f64, alpha: f64) -> Result<WaldTest> {
    if !(se > 0.0) || !se.is_finite() {
        return Err(Error::NonPositiveSe(se));
    }
    let critical = normal_quantile(1.0 - 0.5 * check_alpha(alpha)?)?;
    let z = coefficient / se;
    Ok(WaldTest {
        z,
        p_two_sided: (2.0 * normal_sf(z.abs())).min(1.0),
        significant: z.abs() > critical,
    })
}

fn check_alpha(alpha: f64) -> Result<f64> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(alpha)
    } else {
        Err(Error::Domain(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )))
    }
}

pub fn odds_ratio(coefficient: f64) -> f64 {
    coefficient.exp()
}

/// One row of the coefficient table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaldRow {
    pub variable: String,
    pub coefficient: f64,
    pub se: f64,
    pub z: f64,
    pub p_two_sided: f64,
    pub significant: bool,
    /// `None` for the intercept.
    pub odds_ratio: Option<f64>,
    /// `exp(coef ± Φ⁻¹(1 − α/2)·se)`; `None` for the intercept.
    pub odds_ratio_ci: Option<(f64, f64)>,
}

impl WaldRow {
    pub fn new(
        variable: &str,
        coefficient: f64,
        se: f64,
        alpha: f64,
        is_intercept: bool,
    ) -> Result<Self> {
        let w = wald_test(coefficient, se, alpha)?;
        let (odds_ratio, odds_ratio_ci) = if is_intercept {
            (None, None)
        } else {
            let q = normal_quantile(1.0 - 0.5 * alpha)?;
            (
                Some(odds_ratio(coefficient)),
                Some((
                    odds_ratio(coefficient - q * se),
                    odds_ratio(coefficient + q * se),
                )),
            )
        };
        Ok(Self {
            variable: variable.to_string(),
            coefficient,
            se,
            z: w.z,
            p_two_sided: w.p_two_sided,
            significant: w.significant,
            odds_ratio,
            odds_ratio_ci,
        })
    }
}

/// Wald rows for the intercept (labelled `Constant`) and every slope.
pub fn wald_table(fr: &FitResult, alpha: f64) -> Result<Vec<WaldRow>> {
    let c = &fr.coefficients;
    let mut rows = Vec::with_capacity(c.len());
    rows.push(WaldRow::new(
        "Constant",
        c.intercept,
        fr.standard_errors[0],
        alpha,
        true,
    )?);
    for (j, (name, &b)) in c.names.iter().zip(&c.slopes).enumerate() {
        rows.push(WaldRow::new(
            name,
            b,
            fr.standard_errors[j + 1],
            alpha,
            false,
        )?);
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GTestResult {
    pub g: f64,
    pub df: u32,
    pub p: f64,
    pub ll_full: f64,
    pub ll_null: f64,
}

/// Likelihood-ratio test that all slopes are zero: `G = 2(ℓ_full − ℓ_null)`.
pub fn g_test(ll_full: f64, ll_null: f64, df: u32) -> Result<GTestResult> {
    if df < 1 {
        return Err(Error::Domain("G test needs at least one slope".into()));
    }
    if ll_full < ll_null - LL_SLACK {
        return Err(Error::LikelihoodOrder {
            full: ll_full,
            null: ll_null,
        });
    }
    let g = (2.0 * (ll_full - ll_null)).max(0.0);
    Ok(GTestResult {
        g,
        df,
        p: chi_square_sf(g, df)?,
        ll_full,
        ll_null,
    })
}

/// Maximized log-likelihood of the intercept-only model:
/// `n₁ ln p̄ + n₀ ln(1 − p̄)`.
pub fn null_log_likelihood(ones: usize, n: usize) -> Result<f64> {
    if ones > n || n == 0 {
        return Err(Error::Domain(format!(
            "{ones} ones out of {n} observations"
        )));
    }
    let term = |k: usize| {
        if k == 0 {
            0.0
        } else {
            k as f64 * (k as f64 / n as f64).ln()
        }
    };
    Ok(term(ones) + term(n - ones))
}
