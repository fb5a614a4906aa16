//! Report documents for `describe`, `tabulate` and `fit`. Text and JSON are
//! both rendered from these structs.

use logitkit::data_model::{describe_all, screen_by_cv, tabulate, FrequencyTable};
use logitkit::diagnostics::{
    association, deviance_gof, hosmer_lemeshow, pearson_gof, AssociationResult, GofResult,
};
use logitkit::estimator::{fit, FitConfig};
use logitkit::inference::{g_test, null_log_likelihood, wald_table, GTestResult, WaldRow};
use logitkit::{Dataset, Result};
use serde::Serialize;

use crate::format::{dec3, opt_dec2, percent1, ratio, sig6, table};

/// A report block that is either computed or carries the reason it is not.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Section<T> {
    Ok {
        value: T,
    },
    /// Not applicable to this model.
    Skipped {
        reason: String,
    },
    /// Computation raised an error.
    Failed {
        cause: String,
    },
}

impl<T> Section<T> {
    fn from_result(r: Result<T>) -> Self {
        match r {
            Ok(value) => Section::Ok { value },
            Err(e) => Section::Failed {
                cause: e.to_string(),
            },
        }
    }

    pub fn value(&self) -> Option<&T> {
        match self {
            Section::Ok { value } => Some(value),
            _ => None,
        }
    }

    pub fn is_failed(&self) -> bool {
        matches!(self, Section::Failed { .. })
    }

    fn note(&self) -> Option<String> {
        match self {
            Section::Ok { .. } => None,
            Section::Skipped { reason } => Some(format!("skipped: {reason}")),
            Section::Failed { cause } => Some(format!("failed: {cause}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DescriptiveRow {
    pub variable: String,
    pub definition: String,
    pub std_dev: f64,
    pub mean: f64,
    pub cv_percent: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DescribeReport {
    pub n: usize,
    pub rows: Vec<DescriptiveRow>,
}

pub fn describe_report(ds: &Dataset) -> DescribeReport {
    let stats = describe_all(ds);
    DescribeReport {
        n: ds.n(),
        rows: ds
            .specs()
            .iter()
            .map(|s| {
                let d = &stats[&s.name];
                DescriptiveRow {
                    variable: s.name.clone(),
                    definition: s.description.clone(),
                    std_dev: d.std_dev,
                    mean: d.mean,
                    cv_percent: d.cv_percent,
                }
            })
            .collect(),
    }
}

fn descriptives_text(rows: &[DescriptiveRow]) -> String {
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.variable.clone(),
                r.definition.clone(),
                format!("{:.2}", r.std_dev),
                format!("{:.2}", r.mean),
                opt_dec2(r.cv_percent),
            ]
        })
        .collect();
    table(
        &["Variable", "Definition", "Stand.Dev", "Average", "CV(%)"],
        &body,
        "llrrr",
    )
}

impl DescribeReport {
    pub fn to_text(&self) -> String {
        format!(
            "Descriptive statistics (n = {})\n{}",
            self.n,
            descriptives_text(&self.rows)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TabulateReport {
    pub n: usize,
    pub table: FrequencyTable,
}

pub fn tabulate_report(
    ds: &Dataset,
    variable: &str,
    edges: Option<&[f64]>,
) -> Result<TabulateReport> {
    Ok(TabulateReport {
        n: ds.n(),
        table: tabulate(ds, variable, edges)?,
    })
}

impl TabulateReport {
    pub fn to_text(&self) -> String {
        let body: Vec<Vec<String>> = self
            .table
            .bins
            .iter()
            .map(|b| {
                vec![
                    b.label.clone(),
                    b.count.to_string(),
                    format!("{:.2}", b.percent),
                ]
            })
            .collect();
        format!(
            "Frequencies of {} (n = {})\n{}",
            self.table.variable,
            self.n,
            table(&["Bin", "Count", "Percent"], &body, "lrr")
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScreenSummary {
    pub threshold_percent: f64,
    pub retained: Vec<String>,
    pub excluded: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelSummary {
    pub response: String,
    pub n: usize,
    pub events: usize,
    pub predictors: Vec<String>,
    pub log_likelihood: f64,
    pub iterations: usize,
    pub converged: bool,
    pub max_abs_score: f64,
    pub ridge: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GofBlock {
    pub pearson: Section<GofResult>,
    pub deviance: Section<GofResult>,
    pub hosmer_lemeshow: Section<GofResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssociationSummary {
    #[serde(flatten)]
    pub counts: AssociationResult,
    pub auc: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Flags {
    pub separation: bool,
    pub converged: bool,
    pub messages: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportDocument {
    pub alpha: f64,
    pub descriptives: Vec<DescriptiveRow>,
    pub screen: Section<ScreenSummary>,
    pub model: ModelSummary,
    pub wald_rows: Section<Vec<WaldRow>>,
    pub g_test: Section<GTestResult>,
    pub gof: GofBlock,
    pub association: Section<AssociationSummary>,
    pub flags: Flags,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitOptions {
    pub cv_threshold: f64,
    pub hl_groups: usize,
    pub alpha: f64,
    pub config: FitConfig,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            cv_threshold: 10.0,
            hl_groups: 10,
            alpha: 0.05,
            config: FitConfig::default(),
        }
    }
}

/// Screen, fit, test and diagnose. Errors only when no model can be fitted;
/// later failures are recorded in their sections.
pub fn fit_report(ds: &Dataset, opts: &FitOptions) -> Result<ReportDocument> {
    let descriptives = describe_report(ds).rows;
    let (screen, model_ds) = if opts.cv_threshold > 0.0 {
        let s = screen_by_cv(ds, opts.cv_threshold)?;
        let reduced = ds.select_predictors(&s.retained)?;
        (
            Section::Ok {
                value: ScreenSummary {
                    threshold_percent: opts.cv_threshold,
                    retained: s.retained,
                    excluded: s.excluded,
                },
            },
            reduced,
        )
    } else {
        (
            Section::Skipped {
                reason: "CV threshold is 0".into(),
            },
            ds.clone(),
        )
    };

    let fr = fit(&model_ds, &opts.config)?;
    let y = model_ds.response();
    let events = y.iter().filter(|&&v| v == 1.0).count();
    let slopes = fr.coefficients.slopes.len();

    let g = if slopes == 0 {
        Section::Skipped {
            reason: "no predictors in the model".into(),
        }
    } else {
        Section::from_result(
            null_log_likelihood(events, y.len())
                .and_then(|ll0| g_test(fr.log_likelihood, ll0, slopes as u32)),
        )
    };
    let gof = GofBlock {
        pearson: Section::from_result(pearson_gof(&fr, &model_ds)),
        deviance: Section::from_result(deviance_gof(&fr, &model_ds)),
        hosmer_lemeshow: Section::from_result(hosmer_lemeshow(&fr, &model_ds, opts.hl_groups)),
    };
    let assoc = Section::from_result(association(&fr, &model_ds).map(|a| AssociationSummary {
        auc: a.auc(),
        counts: a,
    }));

    let mut messages = Vec::new();
    if fr.separation_detected {
        messages.push(
            "SEPARATION DETECTED: coefficients and standard errors are not finite-sample estimates"
                .to_string(),
        );
        messages.extend(fr.diagnosis.iter().cloned());
    }
    if !fr.converged {
        messages.push(format!(
            "fit did not converge after {} iterations",
            fr.iterations
        ));
    }
    if let Some(w) = gof.pearson.value().and_then(|p| p.warning.clone()) {
        messages.push(format!("Pearson: {w}"));
    }

    Ok(ReportDocument {
        alpha: opts.alpha,
        descriptives,
        screen,
        model: ModelSummary {
            response: model_ds.response_spec().name.clone(),
            n: model_ds.n(),
            events,
            predictors: model_ds.predictor_names(),
            log_likelihood: fr.log_likelihood,
            iterations: fr.iterations,
            converged: fr.converged,
            max_abs_score: fr.max_abs_score,
            ridge: opts.config.ridge,
        },
        wald_rows: Section::from_result(wald_table(&fr, opts.alpha)),
        g_test: g,
        gof,
        association: assoc,
        flags: Flags {
            separation: fr.separation_detected,
            converged: fr.converged,
            messages,
        },
    })
}

impl ReportDocument {
    pub fn has_failed_section(&self) -> bool {
        self.screen.is_failed()
            || self.wald_rows.is_failed()
            || self.g_test.is_failed()
            || self.gof.pearson.is_failed()
            || self.gof.deviance.is_failed()
            || self.gof.hosmer_lemeshow.is_failed()
            || self.association.is_failed()
    }

    /// Causes of failed sections, labelled.
    pub fn failures(&self) -> Vec<String> {
        let named: [(&str, Option<String>); 7] = [
            ("CV screen", fail_cause(&self.screen)),
            ("coefficients", fail_cause(&self.wald_rows)),
            ("G test", fail_cause(&self.g_test)),
            ("Pearson", fail_cause(&self.gof.pearson)),
            ("Deviance", fail_cause(&self.gof.deviance)),
            ("Hosmer-Lemeshow", fail_cause(&self.gof.hosmer_lemeshow)),
            ("association", fail_cause(&self.association)),
        ];
        named
            .into_iter()
            .filter_map(|(label, c)| c.map(|c| format!("{label}: {c}")))
            .collect()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let m = &self.model;
        if self.flags.separation {
            out.push_str("!!! SEPARATION DETECTED !!!\n\n");
        }
        out.push_str(&format!(
            "Binary logistic regression: {} (n = {}, {} = 1: {})\n\n",
            m.response, m.n, m.response, m.events
        ));

        out.push_str("Descriptive statistics\n");
        out.push_str(&descriptives_text(&self.descriptives));
        out.push('\n');

        match &self.screen {
            Section::Ok { value } => {
                out.push_str(&format!(
                    "CV screen (threshold {}%)\n",
                    value.threshold_percent
                ));
                out.push_str(&format!("  retained: {}\n", list_or_none(&value.retained)));
                out.push_str(&format!(
                    "  excluded: {}\n\n",
                    list_or_none(&value.excluded)
                ));
            }
            other => out.push_str(&format!(
                "CV screen {}\n\n",
                other.note().unwrap_or_default()
            )),
        }

        out.push_str(&format!(
            "Fit: {} iteration(s), converged: {}, max |score| {:.3e}, ridge {}\n",
            m.iterations,
            yes_no(m.converged),
            m.max_abs_score,
            m.ridge
        ));
        match &self.wald_rows {
            Section::Ok { value } => {
                let level = 100.0 * (1.0 - self.alpha);
                let ci = format!("{level}% CI");
                let body: Vec<Vec<String>> = value
                    .iter()
                    .map(|r| {
                        vec![
                            r.variable.clone(),
                            sig6(r.coefficient),
                            sig6(r.se),
                            format!("{:.2}", r.z),
                            dec3(r.p_two_sided),
                            if r.significant {
                                "*".into()
                            } else {
                                String::new()
                            },
                            r.odds_ratio.map_or(String::new(), ratio),
                            r.odds_ratio_ci.map_or(String::new(), |(lo, hi)| {
                                format!("{} - {}", ratio(lo), ratio(hi))
                            }),
                        ]
                    })
                    .collect();
                out.push_str(&table(
                    &[
                        "Predictor",
                        "Coefficient",
                        "Stand.Dev",
                        "Z",
                        "P",
                        "",
                        "Odds ratio",
                        &ci,
                    ],
                    &body,
                    "lrrrrlrr",
                ));
                out.push_str(&format!("(* significant at alpha = {})\n", self.alpha));
            }
            other => out.push_str(&format!(
                "Coefficients {}\n",
                other.note().unwrap_or_default()
            )),
        }
        out.push('\n');

        out.push_str(&format!("Log-Likelihood = {}\n", dec3(m.log_likelihood)));
        match &self.g_test {
            Section::Ok { value } => out.push_str(&format!(
                "Test that all slopes are zero: G = {}, DF = {}, P-Value = {} (null log-likelihood {})\n\n",
                dec3(value.g),
                value.df,
                dec3(value.p),
                dec3(value.ll_null)
            )),
            other => out.push_str(&format!(
                "Test that all slopes are zero: {}\n\n",
                other.note().unwrap_or_default()
            )),
        }

        out.push_str("Goodness-of-Fit Tests\n");
        let gof_row = |label: &str, s: &Section<GofResult>| match s {
            Section::Ok { value } => vec![
                label.to_string(),
                dec3(value.statistic),
                value.df.to_string(),
                dec3(value.p),
            ],
            other => vec![
                label.to_string(),
                other.note().unwrap_or_default(),
                String::new(),
                String::new(),
            ],
        };
        let body = vec![
            gof_row("Pearson", &self.gof.pearson),
            gof_row("Deviance", &self.gof.deviance),
            gof_row("Hosmer-Lemeshow", &self.gof.hosmer_lemeshow),
        ];
        out.push_str(&table(&["Method", "Chi-Square", "DF", "P"], &body, "lrrr"));
        out.push('\n');

        out.push_str("Measures of Association\n");
        match &self.association {
            Section::Ok { value } => {
                let a = &value.counts;
                let body = vec![
                    vec![
                        "Concordant".into(),
                        a.concordant.to_string(),
                        percent1(a.percent(a.concordant)),
                        "Somers' D".into(),
                        format!("{:.2}", a.somers_d),
                    ],
                    vec![
                        "Discordant".into(),
                        a.discordant.to_string(),
                        percent1(a.percent(a.discordant)),
                        "Goodman-Kruskal Gamma".into(),
                        format!("{:.2}", a.gamma),
                    ],
                    vec![
                        "Ties".into(),
                        a.ties.to_string(),
                        percent1(a.percent(a.ties)),
                        "Kendall's Tau-a".into(),
                        format!("{:.2}", a.tau_a),
                    ],
                    vec![
                        "Total".into(),
                        a.total_pairs.to_string(),
                        percent1(100.0),
                        "AUC".into(),
                        format!("{:.2}", value.auc),
                    ],
                ];
                out.push_str(&table(
                    &["Pairs", "Number", "Percent", "Summary Measures", ""],
                    &body,
                    "lrrlr",
                ));
            }
            other => out.push_str(&format!("  {}\n", other.note().unwrap_or_default())),
        }

        if !self.flags.messages.is_empty() {
            out.push_str("\nWarnings\n");
            for msg in &self.flags.messages {
                out.push_str(&format!("  - {msg}\n"));
            }
        }
        out
    }
}

fn fail_cause<T>(s: &Section<T>) -> Option<String> {
    match s {
        Section::Failed { cause } => Some(cause.clone()),
        _ => None,
    }
}

fn list_or_none(v: &[String]) -> String {
    if v.is_empty() {
        "none".into()
    } else {
        v.join(", ")
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}
