//! Goodness of fit (Pearson, deviance, Hosmer-Lemeshow) and rank
//! association between the response and fitted probabilities.

use serde::{Deserialize, Serialize};

use crate::estimator::FitResult;
use crate::logit_core::{self, Probability, PROB_EPS};
use crate::special::chi_square_sf;
use crate::{Dataset, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GofMethod {
    Pearson,
    Deviance,
    HosmerLemeshow,
}

impl GofMethod {
    pub fn label(self) -> &'static str {
        match self {
            GofMethod::Pearson => "Pearson",
            GofMethod::Deviance => "Deviance",
            GofMethod::HosmerLemeshow => "Hosmer-Lemeshow",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GofResult {
    pub method: GofMethod,
    pub statistic: f64,
    pub df: u32,
    pub p: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

fn check_fit(fr: &FitResult, ds: &Dataset) -> Result<()> {
    fr.coefficients.check_alignment(ds)?;
    if fr.fitted.len() != ds.n() {
        return Err(Error::DimensionMismatch {
            expected: ds.n(),
            got: fr.fitted.len(),
        });
    }
    Ok(())
}

fn residual_df(fr: &FitResult, ds: &Dataset) -> Result<u32> {
    let (n, p) = (ds.n(), fr.n_params());
    if n <= p {
        return Err(Error::Domain(format!(
            "{n} observations leave no residual degrees of freedom for {p} parameters"
        )));
    }
    Ok((n - p) as u32)
}

fn clamped(fr: &FitResult) -> impl Iterator<Item = f64> + '_ {
    fr.fitted.iter().map(|&p| Probability::clamped(p).value())
}

/// `Σ (yᵢ − πᵢ)² / (πᵢ(1 − πᵢ))` on `n − p` degrees of freedom.
pub fn pearson_gof(fr: &FitResult, ds: &Dataset) -> Result<GofResult> {
    check_fit(fr, ds)?;
    let df = residual_df(fr, ds)?;
    let y = ds.response();
    let mut pinned = 0usize;
    let statistic = clamped(fr)
        .zip(&y)
        .map(|(p, &yi)| {
            if p <= PROB_EPS || p >= 1.0 - PROB_EPS {
                pinned += 1;
            }
            (yi - p).powi(2) / (p * (1.0 - p))
        })
        .sum();
    let warning = (pinned > 0).then(|| {
        format!("{pinned} fitted probabilities at the clamp boundary; statistic is unreliable under separation")
    });
    Ok(GofResult {
        method: GofMethod::Pearson,
        statistic,
        df,
        p: chi_square_sf(statistic, df)?,
        warning,
    })
}

/// `−2ℓ` (the saturated model of ungrouped binary data has `ℓ = 0`).
pub fn deviance_gof(fr: &FitResult, ds: &Dataset) -> Result<GofResult> {
    check_fit(fr, ds)?;
    let df = residual_df(fr, ds)?;
    let statistic = (-2.0 * logit_core::log_likelihood(&fr.coefficients, ds)?).max(0.0);
    Ok(GofResult {
        method: GofMethod::Deviance,
        statistic,
        df,
        p: chi_square_sf(statistic, df)?,
        warning: None,
    })
}

/// One decile-of-risk group.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HlGroup {
    pub size: usize,
    pub observed: f64,
    pub expected: f64,
}

/// Sizes of `groups` near-equal bins: `⌊n/g⌋`, the first `n mod g` one larger.
pub fn group_sizes(n: usize, groups: usize) -> Vec<usize> {
    let (base, extra) = (n / groups, n % groups);
    (0..groups).map(|g| base + usize::from(g < extra)).collect()
}

/// Observed and expected counts per risk group, sorting by fitted
/// probability with a stable sort so ties keep observation order.
pub fn hosmer_lemeshow_groups(probs: &[f64], y: &[f64], groups: usize) -> Vec<HlGroup> {
    let mut order: Vec<usize> = (0..probs.len()).collect();
    order.sort_by(|&a, &b| probs[a].total_cmp(&probs[b]));
    let mut start = 0;
    group_sizes(probs.len(), groups)
        .into_iter()
        .map(|size| {
            let members = &order[start..start + size];
            start += size;
            HlGroup {
                size,
                observed: members.iter().map(|&i| y[i]).sum(),
                expected: members.iter().map(|&i| probs[i]).sum(),
            }
        })
        .collect()
}

/// Hosmer-Lemeshow statistic `Σ (o − e)² / (e(1 − e/n_g))` on `groups − 2`
/// degrees of freedom.
///
/// Every group needs at least two observations and a positive variance
/// term; otherwise the statistic degenerates and an error names the group.
pub fn hosmer_lemeshow(fr: &FitResult, ds: &Dataset, groups: usize) -> Result<GofResult> {
    check_fit(fr, ds)?;
    if groups < 3 {
        return Err(Error::Domain(format!(
            "Hosmer-Lemeshow needs at least 3 groups, got {groups}"
        )));
    }
    if ds.n() < groups {
        return Err(Error::Domain(format!(
            "{} observations cannot fill {groups} groups",
            ds.n()
        )));
    }
    let probs: Vec<f64> = clamped(fr).collect();
    let y = ds.response();
    let mut statistic = 0.0;
    for (g, grp) in hosmer_lemeshow_groups(&probs, &y, groups)
        .iter()
        .enumerate()
    {
        if grp.size < 2 {
            return Err(Error::DegenerateGroup {
                group: g + 1,
                reason: format!("holds {} observation(s)", grp.size),
            });
        }
        let denom = grp.expected * (1.0 - grp.expected / grp.size as f64);
        if !(denom > 0.0) {
            return Err(Error::DegenerateGroup {
                group: g + 1,
                reason: format!("variance term e(1 - e/n) is {denom}"),
            });
        }
        statistic += (grp.observed - grp.expected).powi(2) / denom;
    }
    let df = (groups - 2) as u32;
    Ok(GofResult {
        method: GofMethod::HosmerLemeshow,
        statistic,
        df,
        p: chi_square_sf(statistic, df)?,
        warning: None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairCounts {
    pub concordant: u64,
    pub discordant: u64,
    pub ties: u64,
}

impl PairCounts {
    pub fn total(&self) -> u64 {
        self.concordant + self.discordant + self.ties
    }
}

fn check_sorted(v: &[f64], label: &'static str) -> Result<()> {
    if v.iter().any(|x| x.is_nan()) || v.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Unsorted(label));
    }
    Ok(())
}

/// Counts (one, zero) pairs by merging two ascending lists in
/// `O(n₁ + n₀)`.
pub fn count_pairs_fast(pi_ones: &[f64], pi_zeros: &[f64]) -> Result<PairCounts> {
    check_sorted(pi_ones, "pi_ones")?;
    check_sorted(pi_zeros, "pi_zeros")?;
    let (mut below, mut upto) = (0usize, 0usize);
    let (mut concordant, mut ties) = (0u64, 0u64);
    for &v in pi_ones {
        while below < pi_zeros.len() && pi_zeros[below] < v {
            below += 1;
        }
        upto = upto.max(below);
        while upto < pi_zeros.len() && pi_zeros[upto] <= v {
            upto += 1;
        }
        concordant += below as u64;
        ties += (upto - below) as u64;
    }
    let total = pi_ones.len() as u64 * pi_zeros.len() as u64;
    Ok(PairCounts {
        concordant,
        discordant: total - concordant - ties,
        ties,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AssociationResult {
    pub concordant: u64,
    pub discordant: u64,
    pub ties: u64,
    pub total_pairs: u64,
    /// `(C − D)/total_pairs`.
    pub somers_d: f64,
    /// `(C − D)/(C + D)`; zero when every pair is tied.
    pub gamma: f64,
    /// `(C − D)/(n(n − 1)/2)`.
    pub tau_a: f64,
}

impl AssociationResult {
    pub fn from_counts(counts: PairCounts, n: usize) -> Result<Self> {
        let total = counts.total();
        if total == 0 {
            return Err(Error::NoPairs);
        }
        let diff = counts.concordant as f64 - counts.discordant as f64;
        let untied = (counts.concordant + counts.discordant) as f64;
        Ok(Self {
            concordant: counts.concordant,
            discordant: counts.discordant,
            ties: counts.ties,
            total_pairs: total,
            somers_d: diff / total as f64,
            gamma: if untied > 0.0 { diff / untied } else { 0.0 },
            tau_a: diff / (n as f64 * (n as f64 - 1.0) / 2.0),
        })
    }

    /// Area under the ROC curve, `(D + 1)/2`.
    pub fn auc(&self) -> f64 {
        0.5 * (self.somers_d + 1.0)
    }

    pub fn percent(&self, count: u64) -> f64 {
        100.0 * count as f64 / self.total_pairs as f64
    }
}

/// Concordance of fitted probabilities with the observed response.
/// Probabilities are compared at full precision.
pub fn association(fr: &FitResult, ds: &Dataset) -> Result<AssociationResult> {
    check_fit(fr, ds)?;
    association_from(&fr.fitted, &ds.response())
}

/// [`association`] on raw scores and a 0/1 response.
pub fn association_from(scores: &[f64], y: &[f64]) -> Result<AssociationResult> {
    if scores.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: y.len(),
            got: scores.len(),
        });
    }
    let mut ones = Vec::new();
    let mut zeros = Vec::new();
    for (&s, &yi) in scores.iter().zip(y) {
        if yi == 1.0 {
            ones.push(s);
        } else {
            zeros.push(s);
        }
    }
    if ones.is_empty() || zeros.is_empty() {
        return Err(Error::NoPairs);
    }
    ones.sort_by(f64::total_cmp);
    zeros.sort_by(f64::total_cmp);
    AssociationResult::from_counts(count_pairs_fast(&ones, &zeros)?, y.len())
}
