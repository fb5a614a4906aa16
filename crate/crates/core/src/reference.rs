//! Published results of the 116-respondent dairy-farm survey fit, kept as
//! printed, with a consistency audit of the cells that can be checked
//! without the raw data.

use serde::Serialize;

use crate::inference::{null_log_likelihood, odds_ratio, wald_test};
use crate::logit_core::CoefficientVector;

pub const N: usize = 116;
pub const PARTICIPANTS: usize = 61;
pub const LOG_LIKELIHOOD: f64 = -10.763;
pub const G_STATISTIC: f64 = 138.973;
pub const G_DF: u32 = 9;
pub const PEARSON: (f64, u32, f64) = (44.852, 106, 0.886);
pub const DEVIANCE: (f64, u32, f64) = (21.526, 106, 0.865);
pub const HOSMER_LEMESHOW: (f64, u32, f64) = (0.246, 8, 0.763);
/// Concordant, discordant, tied and total pairs as printed.
pub const PAIRS: (u64, u64, u64, u64) = (3319, 251, 11, 3581);
/// Somers' D, Goodman-Kruskal gamma, Kendall's tau-a as printed.
pub const SUMMARY_MEASURES: (f64, f64, f64) = (0.98, 0.99, 0.50);

/// Published variable moments: name, standard deviation, mean, CV (%).
pub const MOMENTS: [(&str, f64, f64, f64); 10] = [
    ("Y", 0.50, 0.53, 95.37),
    ("X1", 66.56, 91.96, 72.38),
    ("X2", 0.89, 3.69, 24.09),
    ("X3", 0.66, 1.35, 48.97),
    ("X4", 2.28, 15.25, 14.97),
    ("X5", 0.61, 2.38, 25.79),
    ("X6", 2.50, 2.66, 94.25),
    ("X7", 3.20, 5.17, 61.85),
    ("X8", 3.15, 12.51, 25.16),
    ("D1", 0.48, 0.65, 74.35),
];

/// One printed row of the coefficient table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PublishedRow {
    pub variable: &'static str,
    pub coefficient: f64,
    pub se: f64,
    pub z: f64,
    pub p: f64,
    /// `None` for the constant.
    pub odds_ratio: Option<f64>,
}

const fn row(
    variable: &'static str,
    coefficient: f64,
    se: f64,
    z: f64,
    p: f64,
    or: f64,
) -> PublishedRow {
    PublishedRow {
        variable,
        coefficient,
        se,
        z,
        p,
        odds_ratio: Some(or),
    }
}

pub const ROWS: [PublishedRow; 10] = [
    PublishedRow {
        variable: "Constant",
        coefficient: -33.9,
        se: 747.4,
        z: -0.05,
        p: 0.964,
        odds_ratio: None,
    },
    row("X1", 0.012388, 0.008043, 1.54, 0.023, 1.01),
    row("X2", -2.526, 1.423, -1.78, 0.036, 1.08),
    row("X3", 1.241, 1.273, 0.97, 0.830, 3.46),
    row("X4", 0.6616, 0.6111, 1.08, 0.279, 1.94),
    row("X5", 1.070, 2.922, 0.37, 0.714, 2.91),
    row("X6", 29.8, 747.4, 0.04, 0.018, 8.77),
    row("X7", 0.4254, 0.2858, 1.49, 0.137, 1.53),
    row("X8", -0.7503, 0.4957, -1.51, 0.130, 0.47),
    row("D1", -1.117, 1.417, -0.79, 0.431, 0.33),
];

/// The printed coefficient column as a [`CoefficientVector`].
pub fn published_coefficients() -> CoefficientVector {
    CoefficientVector {
        intercept: ROWS[0].coefficient,
        names: ROWS[1..].iter().map(|r| r.variable.to_string()).collect(),
        slopes: ROWS[1..].iter().map(|r| r.coefficient).collect(),
    }
}

/// Recomputed values for one printed row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowAudit {
    pub variable: &'static str,
    pub z: f64,
    pub z_matches: bool,
    pub p_two_sided: f64,
    pub p_matches: bool,
    pub odds_ratio: Option<f64>,
    pub odds_ratio_matches: Option<bool>,
}

/// Recomputes z = coef/se (to 2 decimals), the two-sided p-value (to 3
/// decimals) and exp(coef) (within 0.005) for every printed row.
pub fn audit_rows() -> Vec<RowAudit> {
    ROWS.iter()
        .map(|r| {
            let w = wald_test(r.coefficient, r.se, 0.05).expect("printed SEs are positive");
            let or = r.odds_ratio.map(|_| odds_ratio(r.coefficient));
            RowAudit {
                variable: r.variable,
                z: w.z,
                z_matches: (w.z - r.z).abs() <= 0.005 + 1e-12,
                p_two_sided: w.p_two_sided,
                p_matches: (w.p_two_sided - r.p).abs() <= 0.0005 + 1e-12,
                odds_ratio: or,
                odds_ratio_matches: r
                    .odds_ratio
                    .zip(or)
                    .map(|(printed, e)| (printed - e).abs() <= 0.005),
            }
        })
        .collect()
}

/// Checks that need only the printed summary numbers.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryAudit {
    pub null_log_likelihood: f64,
    pub g_recomputed: f64,
    pub deviance_recomputed: f64,
    pub residual_df: usize,
    pub pairs_expected: u64,
    pub pairs_printed: u64,
    pub somers_d_from_counts: f64,
    pub gamma_from_counts: f64,
    pub tau_a_from_counts: f64,
}

pub fn audit_summary() -> SummaryAudit {
    let ll0 = null_log_likelihood(PARTICIPANTS, N).expect("valid split");
    let (c, d, t, _) = PAIRS;
    let diff = c as f64 - d as f64;
    let total = (c + d + t) as f64;
    SummaryAudit {
        null_log_likelihood: ll0,
        g_recomputed: 2.0 * (LOG_LIKELIHOOD - ll0),
        deviance_recomputed: -2.0 * LOG_LIKELIHOOD,
        residual_df: N - ROWS.len(),
        pairs_expected: (PARTICIPANTS * (N - PARTICIPANTS)) as u64,
        pairs_printed: PAIRS.3,
        somers_d_from_counts: diff / total,
        gamma_from_counts: diff / (c + d) as f64,
        tau_a_from_counts: diff / (N * (N - 1) / 2) as f64,
    }
}
