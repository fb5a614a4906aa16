//! Seeded synthetic data from a known logistic law, brute-force oracles
//! and Monte Carlo experiments.
//!
//! # Random streams
//!
//! Every dataset is drawn from ChaCha8 generators keyed by
//! `ChaCha8Rng::seed_from_u64(seed)`. The key is split into independent
//! streams before any sampling: stream 0 carries the response draws and
//! stream `j + 1` carries covariate column `j`. Within a stream, row `i`
//! consumes draws after rows `0..i`, so growing `n` never changes earlier
//! rows. Monte Carlo replicate `r` uses the seed `seed ^ r`.

use indexmap::IndexMap;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Normal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diagnostics::{hosmer_lemeshow, PairCounts};
use crate::estimator::{fit, FitConfig};
use crate::inference::{g_test, normal_quantile, null_log_likelihood};
use crate::logit_core::{sigmoid, CoefficientVector, Design};
use crate::{Dataset, Error, Result, Role, VariableSpec};

pub const INTERCEPT_KEY: &str = "_intercept";
const RESPONSE_STREAM: u64 = 0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum GeneratorKind {
    Normal { mean: f64, sd: f64 },
    Uniform { lo: f64, hi: f64 },
    Bernoulli { p: f64 },
    CategoricalOrdinal { levels: Vec<f64>, probs: Vec<f64> },
}

impl GeneratorKind {
    fn validate(&self, name: &str) -> Result<()> {
        let bad = |why: String| Err(Error::SynthSpec(format!("generator `{name}`: {why}")));
        match self {
            GeneratorKind::Normal { mean, sd } => {
                if !(*sd > 0.0) || !sd.is_finite() || !mean.is_finite() {
                    return bad(format!("normal needs finite mean and sd > 0 (sd={sd})"));
                }
            }
            GeneratorKind::Uniform { lo, hi } => {
                if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                    return bad(format!("uniform needs lo < hi (lo={lo}, hi={hi})"));
                }
            }
            GeneratorKind::Bernoulli { p } => {
                if !(0.0..=1.0).contains(p) {
                    return bad(format!("bernoulli p={p} outside [0, 1]"));
                }
            }
            GeneratorKind::CategoricalOrdinal { levels, probs } => {
                if levels.is_empty() || levels.len() != probs.len() {
                    return bad("levels and probs must be non-empty and of equal length".into());
                }
                if probs.iter().any(|p| !(*p >= 0.0))
                    || (probs.iter().sum::<f64>() - 1.0).abs() > 1e-9
                {
                    return bad("probs must be non-negative and sum to 1".into());
                }
                if levels.iter().any(|l| !l.is_finite()) {
                    return bad("levels must be finite".into());
                }
            }
        }
        Ok(())
    }

    fn role(&self) -> Role {
        match self {
            GeneratorKind::Bernoulli { .. } => Role::Dummy,
            _ => Role::Continuous,
        }
    }

    fn draw<R: Rng>(&self, rng: &mut R) -> f64 {
        match self {
            GeneratorKind::Normal { mean, sd } => {
                rng.sample(Normal::new(*mean, *sd).expect("validated normal parameters"))
            }
            GeneratorKind::Uniform { lo, hi } => lo + (hi - lo) * rng.random::<f64>(),
            GeneratorKind::Bernoulli { p } => f64::from(rng.random::<f64>() < *p),
            GeneratorKind::CategoricalOrdinal { levels, probs } => {
                let u = rng.random::<f64>();
                let mut acc = 0.0;
                for (level, p) in levels.iter().zip(probs) {
                    acc += p;
                    if u < acc {
                        return *level;
                    }
                }
                *levels.last().expect("non-empty levels")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovariateGenerator {
    pub name: String,
    pub kind: GeneratorKind,
    #[serde(default)]
    pub description: String,
}

/// Ground truth for a synthetic dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub n: usize,
    pub seed: u64,
    pub response: String,
    pub generators: Vec<CovariateGenerator>,
    pub true_coefficients: CoefficientVector,
}

#[derive(Debug, Serialize, Deserialize)]
struct GeneratorEntry {
    #[serde(flatten)]
    kind: GeneratorKind,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    description: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct SynthSpecFile {
    n: usize,
    seed: u64,
    #[serde(default = "default_response")]
    response: String,
    coefficients: IndexMap<String, f64>,
    generators: IndexMap<String, GeneratorEntry>,
}

fn default_response() -> String {
    "Y".to_string()
}

impl SynthSpec {
    pub fn new(
        n: usize,
        seed: u64,
        generators: Vec<CovariateGenerator>,
        intercept: f64,
        slopes: Vec<f64>,
    ) -> Result<Self> {
        let names = generators.iter().map(|g| g.name.clone()).collect();
        let spec = Self {
            n,
            seed,
            response: default_response(),
            generators,
            true_coefficients: CoefficientVector::new(intercept, names, slopes)?,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Parses the JSON form: `n`, `seed`, optional `response`,
    /// `coefficients` (name → value, `_intercept` reserved) and
    /// `generators` (name → `{kind, params}`), columns in document order.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: SynthSpecFile = serde_json::from_str(text)?;
        let mut coefficients = file.coefficients;
        let intercept = coefficients.shift_remove(INTERCEPT_KEY).unwrap_or(0.0);
        let mut generators = Vec::with_capacity(file.generators.len());
        let mut slopes = Vec::with_capacity(file.generators.len());
        for (name, entry) in file.generators {
            let b = coefficients.shift_remove(&name).ok_or_else(|| {
                Error::SynthSpec(format!("no coefficient for generator `{name}`"))
            })?;
            slopes.push(b);
            generators.push(CovariateGenerator {
                name,
                kind: entry.kind,
                description: entry.description,
            });
        }
        if let Some(extra) = coefficients.keys().next() {
            return Err(Error::SynthSpec(format!(
                "coefficient `{extra}` has no generator"
            )));
        }
        let mut spec = Self::new(file.n, file.seed, generators, intercept, slopes)?;
        spec.response = file.response;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut coefficients = IndexMap::new();
        coefficients.insert(INTERCEPT_KEY.to_string(), self.true_coefficients.intercept);
        for (name, b) in self
            .true_coefficients
            .names
            .iter()
            .zip(&self.true_coefficients.slopes)
        {
            coefficients.insert(name.clone(), *b);
        }
        let generators = self
            .generators
            .iter()
            .map(|g| {
                (
                    g.name.clone(),
                    GeneratorEntry {
                        kind: g.kind.clone(),
                        description: g.description.clone(),
                    },
                )
            })
            .collect();
        let file = SynthSpecFile {
            n: self.n,
            seed: self.seed,
            response: self.response.clone(),
            coefficients,
            generators,
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 1 {
            return Err(Error::SynthSpec("n must be at least 1".into()));
        }
        let names: Vec<&str> = self.generators.iter().map(|g| g.name.as_str()).collect();
        if self
            .true_coefficients
            .names
            .iter()
            .map(String::as_str)
            .ne(names.iter().copied())
        {
            return Err(Error::SynthSpec(
                "coefficients do not align with generators".into(),
            ));
        }
        if names
            .iter()
            .any(|n| *n == self.response || *n == INTERCEPT_KEY)
        {
            return Err(Error::SynthSpec(
                "generator name clashes with the response or intercept".into(),
            ));
        }
        if !self
            .true_coefficients
            .params()
            .iter()
            .all(|b| b.is_finite())
        {
            return Err(Error::SynthSpec("coefficients must be finite".into()));
        }
        for g in &self.generators {
            g.kind.validate(&g.name)?;
        }
        Ok(())
    }

    /// Schema of generated data: response first, then one column per
    /// generator (Bernoulli generators are dummies).
    pub fn schema(&self) -> Vec<VariableSpec> {
        std::iter::once(VariableSpec::new(
            &self.response,
            Role::Response,
            "simulated response",
        ))
        .chain(
            self.generators
                .iter()
                .map(|g| VariableSpec::new(&g.name, g.kind.role(), &g.description)),
        )
        .collect()
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self {
            seed,
            ..self.clone()
        }
    }

    pub fn with_n(&self, n: usize) -> Self {
        Self { n, ..self.clone() }
    }
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Seed of Monte Carlo replicate `r`.
pub fn replicate_seed(seed: u64, r: u64) -> u64 {
    seed ^ r
}

/// Draws covariates per generator and the response as
/// `Bernoulli(inverse_logit(z))`.
pub fn generate(spec: &SynthSpec) -> Result<Dataset> {
    spec.validate()?;
    let m = spec.generators.len();
    let mut columns = Vec::with_capacity(m);
    for (j, g) in spec.generators.iter().enumerate() {
        let mut rng = stream(spec.seed, j as u64 + 1);
        columns.push(
            (0..spec.n)
                .map(|_| g.kind.draw(&mut rng))
                .collect::<Vec<f64>>(),
        );
    }
    let mut response_rng = stream(spec.seed, RESPONSE_STREAM);
    let c = &spec.true_coefficients;
    let rows = (0..spec.n)
        .map(|i| {
            let z = c.intercept + (0..m).map(|j| c.slopes[j] * columns[j][i]).sum::<f64>();
            let y = f64::from(response_rng.random::<f64>() < sigmoid(z));
            std::iter::once(y)
                .chain((0..m).map(|j| columns[j][i]))
                .collect()
        })
        .collect();
    Dataset::new(spec.schema(), rows)
}

/// Best point found by [`brute_force_mle`].
#[derive(Debug, Clone, PartialEq)]
pub struct OracleFit {
    pub coefficients: CoefficientVector,
    pub log_likelihood: f64,
    pub evaluations: usize,
}

#[derive(Debug)]
pub enum OracleError {
    /// The budget ran out before restarts agreed; `best` is still reported.
    BudgetExhausted {
        best: OracleFit,
    },
    Invalid(Error),
}

impl std::fmt::Display for OracleError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            OracleError::BudgetExhausted { best } => write!(
                f,
                "evaluation budget exhausted after {} evaluations (best log-likelihood {})",
                best.evaluations, best.log_likelihood
            ),
            OracleError::Invalid(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for OracleError {}

impl From<Error> for OracleError {
    fn from(e: Error) -> Self {
        OracleError::Invalid(e)
    }
}

const ORACLE_MAX_PARAMS: usize = 4;
const ORACLE_MAX_N: usize = 50;
const ORACLE_RESTARTS: usize = 12;

struct Objective<'a> {
    design: &'a Design,
    evaluations: usize,
    budget: usize,
}

impl Objective<'_> {
    fn value(&mut self, params: &[f64]) -> f64 {
        self.evaluations += 1;
        -self.design.log_likelihood(params).expect("dimension fixed")
    }

    fn exhausted(&self) -> bool {
        self.evaluations >= self.budget
    }
}

/// Nelder-Mead from `start` until the simplex collapses or the budget ends.
fn nelder_mead(obj: &mut Objective<'_>, start: &[f64], step: f64) -> (Vec<f64>, f64) {
    let p = start.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(p + 1);
    let f0 = obj.value(start);
    simplex.push((start.to_vec(), f0));
    for j in 0..p {
        let mut v = start.to_vec();
        v[j] += step * (1.0 + start[j].abs());
        let f = obj.value(&v);
        simplex.push((v, f));
    }

    while !obj.exhausted() {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let (best, worst) = (simplex[0].1, simplex[p].1);
        let diameter = simplex[1..]
            .iter()
            .flat_map(|(v, _)| v.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if worst - best <= 1e-15 * (1.0 + best.abs()) && diameter < 1e-9 {
            break;
        }
        let centroid: Vec<f64> = (0..p)
            .map(|j| simplex[..p].iter().map(|(v, _)| v[j]).sum::<f64>() / p as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[p].0)
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };
        let reflected = along(1.0);
        let fr = obj.value(&reflected);
        if fr < simplex[0].1 {
            let expanded = along(2.0);
            let fe = obj.value(&expanded);
            simplex[p] = if fe < fr {
                (expanded, fe)
            } else {
                (reflected, fr)
            };
        } else if fr < simplex[p - 1].1 {
            simplex[p] = (reflected, fr);
        } else {
            let (contracted, fc) = if fr < worst {
                let c = along(0.5);
                let f = obj.value(&c);
                (c, f)
            } else {
                let c = along(-0.5);
                let f = obj.value(&c);
                (c, f)
            };
            if fc < worst.min(fr) {
                simplex[p] = (contracted, fc);
            } else {
                let anchor = simplex[0].0.clone();
                for vertex in simplex.iter_mut().skip(1) {
                    let v: Vec<f64> = anchor
                        .iter()
                        .zip(&vertex.0)
                        .map(|(a, x)| a + 0.5 * (x - a))
                        .collect();
                    let f = obj.value(&v);
                    *vertex = (v, f);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    simplex.swap_remove(0)
}

/// Derivative-free maximization of the log-likelihood: Nelder-Mead from
/// several seeded random starts, then repeated restarts at the incumbent
/// until they stop improving. Oracle scale only (≤ 4 parameters, n ≤ 50).
pub fn brute_force_mle(ds: &Dataset, budget: usize) -> std::result::Result<OracleFit, OracleError> {
    let design = Design::from_dataset(ds);
    let p = design.p();
    if p > ORACLE_MAX_PARAMS || ds.n() > ORACLE_MAX_N {
        return Err(Error::Domain(format!(
            "brute-force oracle handles at most {ORACLE_MAX_PARAMS} parameters and {ORACLE_MAX_N} rows"
        ))
        .into());
    }
    let mut obj = Objective {
        design: &design,
        evaluations: 0,
        budget,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0x0bad_5eed);
    let mut best: Option<(Vec<f64>, f64)> = None;
    for _ in 0..ORACLE_RESTARTS {
        let start: Vec<f64> = (0..p).map(|_| rng.random_range(-2.0..2.0)).collect();
        let cand = nelder_mead(&mut obj, &start, 0.5);
        if best.as_ref().is_none_or(|b| cand.1 < b.1) {
            best = Some(cand);
        }
    }
    let (mut point, mut value) = best.expect("at least one restart");
    let mut stable = false;
    while !obj.exhausted() {
        let (cand, f) = nelder_mead(&mut obj, &point, 0.05);
        let moved = cand
            .iter()
            .zip(&point)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let improved = value - f;
        if f < value {
            point = cand;
            value = f;
        }
        if improved <= 1e-13 * (1.0 + value.abs()) && moved < 1e-8 {
            stable = true;
            break;
        }
    }
    let fit = OracleFit {
        coefficients: CoefficientVector::from_params(ds.predictor_names(), &point)?,
        log_likelihood: -value,
        evaluations: obj.evaluations,
    };
    if stable {
        Ok(fit)
    } else {
        Err(OracleError::BudgetExhausted { best: fit })
    }
}

/// Exhaustive `O(n₁·n₀)` pair count; the reference for the merge counter.
pub fn count_pairs_brute(pi_ones: &[f64], pi_zeros: &[f64]) -> PairCounts {
    let mut c = PairCounts {
        concordant: 0,
        discordant: 0,
        ties: 0,
    };
    for &a in pi_ones {
        for &b in pi_zeros {
            if a > b {
                c.concordant += 1;
            } else if a < b {
                c.discordant += 1;
            } else {
                c.ties += 1;
            }
        }
    }
    c
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloReport {
    pub replicates: usize,
    /// Replicates whose fit returned an error.
    pub failed: usize,
    /// Nominal confidence level of the Wald intervals, `1 − alpha`.
    pub confidence: f64,
    /// Parameter labels, intercept first.
    pub names: Vec<String>,
    /// Share of successful fits whose interval covers the truth.
    pub coverage: Vec<f64>,
    pub mean_bias: Vec<f64>,
    pub separation_rate: f64,
    /// False when more than half the replicates were separated.
    pub usable: bool,
}

#[derive(Debug, Clone)]
struct ReplicateOutcome {
    hits: Vec<bool>,
    errors: Vec<f64>,
    separated: bool,
}

/// Repeats generate → fit → Wald interval across replicates, recording
/// coverage, bias and the separation rate. Output depends only on the
/// inputs, not on scheduling.
pub fn coverage_experiment(
    spec: &SynthSpec,
    replicates: usize,
    alpha: f64,
) -> Result<MonteCarloReport> {
    coverage_experiment_with(spec, replicates, alpha, &FitConfig::default())
}

pub fn coverage_experiment_with(
    spec: &SynthSpec,
    replicates: usize,
    alpha: f64,
    cfg: &FitConfig,
) -> Result<MonteCarloReport> {
    if replicates < 100 {
        return Err(Error::Domain(format!(
            "coverage needs at least 100 replicates, got {replicates}"
        )));
    }
    spec.validate()?;
    let q = normal_quantile(1.0 - 0.5 * alpha)?;
    let truth = spec.true_coefficients.params();
    let outcomes: Vec<Option<ReplicateOutcome>> = (0..replicates as u64)
        .into_par_iter()
        .map(|r| {
            let ds = generate(&spec.with_seed(replicate_seed(spec.seed, r))).ok()?;
            let fr = fit(&ds, cfg).ok()?;
            let est = fr.coefficients.params();
            Some(ReplicateOutcome {
                hits: est
                    .iter()
                    .zip(&fr.standard_errors)
                    .zip(&truth)
                    .map(|((b, se), t)| (b - t).abs() <= q * se)
                    .collect(),
                errors: est.iter().zip(&truth).map(|(b, t)| b - t).collect(),
                separated: fr.separation_detected,
            })
        })
        .collect();

    let ok: Vec<&ReplicateOutcome> = outcomes.iter().flatten().collect();
    let k = truth.len();
    let count = ok.len().max(1) as f64;
    let coverage = (0..k)
        .map(|j| ok.iter().filter(|o| o.hits[j]).count() as f64 / count)
        .collect();
    let mean_bias = (0..k)
        .map(|j| ok.iter().map(|o| o.errors[j]).sum::<f64>() / count)
        .collect();
    let separation_rate = ok.iter().filter(|o| o.separated).count() as f64 / count;
    Ok(MonteCarloReport {
        replicates,
        failed: replicates - ok.len(),
        confidence: 1.0 - alpha,
        names: std::iter::once("intercept".to_string())
            .chain(spec.true_coefficients.names.iter().cloned())
            .collect(),
        coverage,
        mean_bias,
        separation_rate,
        usable: separation_rate <= 0.5 && !ok.is_empty(),
    })
}

/// G-test p-values over replicates (one per successful fit, replicate order).
pub fn g_test_pvalues(spec: &SynthSpec, replicates: usize) -> Result<Vec<f64>> {
    spec.validate()?;
    let df = spec.generators.len() as u32;
    Ok((0..replicates as u64)
        .into_par_iter()
        .filter_map(|r| {
            let ds = generate(&spec.with_seed(replicate_seed(spec.seed, r))).ok()?;
            let fr = fit(&ds, &FitConfig::default()).ok()?;
            let ones = ds.response().iter().filter(|&&v| v == 1.0).count();
            let ll0 = null_log_likelihood(ones, ds.n()).ok()?;
            g_test(fr.log_likelihood, ll0, df).ok().map(|g| g.p)
        })
        .collect())
}

/// Hosmer-Lemeshow p-values over replicates.
pub fn hosmer_lemeshow_pvalues(
    spec: &SynthSpec,
    replicates: usize,
    groups: usize,
) -> Result<Vec<f64>> {
    spec.validate()?;
    Ok((0..replicates as u64)
        .into_par_iter()
        .filter_map(|r| {
            let ds = generate(&spec.with_seed(replicate_seed(spec.seed, r))).ok()?;
            let fr = fit(&ds, &FitConfig::default()).ok()?;
            hosmer_lemeshow(&fr, &ds, groups).ok().map(|h| h.p)
        })
        .collect())
}

/// Kolmogorov-Smirnov distance between the sample and Uniform(0, 1).
pub fn ks_uniform(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    v.iter()
        .enumerate()
        .map(|(i, &x)| {
            let lo = x - i as f64 / n;
            let hi = (i + 1) as f64 / n - x;
            lo.max(hi)
        })
        .fold(0.0, f64::max)
}

/// Generators reproducing the published variable moments (land, family
/// size, birth order, age, schooling, hours worked, herd size, milk yield,
/// gender). Birth order and schooling are ordinal categoricals whose
/// probabilities are the published frequency profile.
pub fn table1_generators() -> Vec<CovariateGenerator> {
    let normal = |name: &str, mean: f64, sd: f64, description: &str| CovariateGenerator {
        name: name.into(),
        kind: GeneratorKind::Normal { mean, sd },
        description: description.into(),
    };
    vec![
        normal(
            "X1",
            91.96,
            66.56,
            "Number of dairy farm land ownership (m2)",
        ),
        normal("X2", 3.69, 0.89, "Number of family members"),
        CovariateGenerator {
            name: "X3".into(),
            kind: GeneratorKind::CategoricalOrdinal {
                levels: vec![1.0, 2.0, 3.0],
                probs: vec![0.75, 0.1466, 0.1034],
            },
            description: "Order of children in the family".into(),
        },
        normal("X4", 15.25, 2.28, "Age of the children"),
        CovariateGenerator {
            name: "X5".into(),
            kind: GeneratorKind::CategoricalOrdinal {
                levels: vec![1.0, 2.0, 3.0],
                probs: vec![0.069, 0.5, 0.431],
            },
            description: "Formal education level (1 elementary, 2 junior high, 3 senior high)"
                .into(),
        },
        normal(
            "X6",
            2.66,
            2.50,
            "Hours per day worked on the family dairy farm",
        ),
        normal("X7", 5.17, 3.20, "Number of dairy cows owned (heads)"),
        normal(
            "X8",
            12.51,
            3.15,
            "Dairy cow productivity (liters/head/day)",
        ),
        CovariateGenerator {
            name: "D1".into(),
            kind: GeneratorKind::Bernoulli { p: 0.6466 },
            description: "Gender (male = 1, female = 0)".into(),
        },
    ]
}

/// Table-shaped generators with the published coefficient column as truth.
pub fn table1_spec(n: usize, seed: u64) -> Result<SynthSpec> {
    let reference = crate::reference::published_coefficients();
    SynthSpec::new(
        n,
        seed,
        table1_generators(),
        reference.intercept,
        reference.slopes,
    )
}

/// Table-shaped generators with moderate effects (no separation at
/// realistic sample sizes).
pub fn table1_moderate_spec(n: usize, seed: u64) -> Result<SynthSpec> {
    let slopes = vec![0.01, -0.4, 0.5, 0.15, 0.4, 0.2, 0.1, -0.1, -0.5];
    SynthSpec::new(n, seed, table1_generators(), -1.0, slopes)
}

/// Random small instance for oracle comparisons: 15–30 rows, 1–3
/// predictors (normal or Bernoulli), coefficients in [−1, 1].
pub fn small_oracle_spec(seed: u64) -> Result<SynthSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(u64::MAX);
    let n = rng.random_range(15..=30);
    let k = rng.random_range(1..=3);
    let generators = (0..k)
        .map(|j| CovariateGenerator {
            name: format!("X{}", j + 1),
            kind: if rng.random::<f64>() < 0.75 {
                GeneratorKind::Normal {
                    mean: rng.random_range(-1.0..1.0),
                    sd: rng.random_range(0.5..2.0),
                }
            } else {
                GeneratorKind::Bernoulli {
                    p: rng.random_range(0.3..0.7),
                }
            },
            description: String::new(),
        })
        .collect();
    let intercept = rng.random_range(-1.0..1.0);
    let slopes = (0..k).map(|_| rng.random_range(-1.0..1.0)).collect();
    SynthSpec::new(n, seed, generators, intercept, slopes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_normal(n: usize, seed: u64, b: [f64; 3]) -> SynthSpec {
        let g = |name: &str| CovariateGenerator {
            name: name.into(),
            kind: GeneratorKind::Normal { mean: 0.0, sd: 1.0 },
            description: String::new(),
        };
        SynthSpec::new(n, seed, vec![g("A"), g("B")], b[0], vec![b[1], b[2]]).unwrap()
    }

    #[test]
    fn null_law_gives_balanced_response() {
        let ds = generate(&two_normal(10_000, 3, [0.0, 0.0, 0.0])).unwrap();
        let mean = ds.response().iter().sum::<f64>() / 10_000.0;
        assert!((mean - 0.5).abs() < 0.015);
    }

    #[test]
    fn same_seed_same_bytes() {
        let spec = table1_spec(116, 11).unwrap();
        let mut a = Vec::new();
        let mut b = Vec::new();
        crate::data_model::write_csv(&generate(&spec).unwrap(), &mut a).unwrap();
        crate::data_model::write_csv(&generate(&spec).unwrap(), &mut b).unwrap();
        assert_eq!(a, b);
        let mut c = Vec::new();
        crate::data_model::write_csv(&generate(&spec.with_seed(12)).unwrap(), &mut c).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn growing_n_keeps_earlier_rows() {
        let small = generate(&two_normal(50, 5, [0.2, 1.0, -1.0])).unwrap();
        let big = generate(&two_normal(80, 5, [0.2, 1.0, -1.0])).unwrap();
        for i in 0..50 {
            assert_eq!(small.row(i), big.row(i));
        }
    }

    #[test]
    fn spec_json_round_trip_and_validation() {
        let spec = table1_spec(116, 42).unwrap();
        let back = SynthSpec::from_json(&spec.to_json().unwrap()).unwrap();
        assert_eq!(back, spec);

        let bad_n = r#"{"n":0,"seed":1,"coefficients":{"_intercept":0},"generators":{}}"#;
        assert!(matches!(
            SynthSpec::from_json(bad_n),
            Err(Error::SynthSpec(_))
        ));
        let missing = r#"{"n":5,"seed":1,"coefficients":{"_intercept":0},
            "generators":{"A":{"kind":"normal","params":{"mean":0,"sd":1}}}}"#;
        assert!(SynthSpec::from_json(missing).is_err());
        let extra = r#"{"n":5,"seed":1,"coefficients":{"_intercept":0,"A":1,"B":2},
            "generators":{"A":{"kind":"normal","params":{"mean":0,"sd":1}}}}"#;
        assert!(SynthSpec::from_json(extra).is_err());
        let bad_sd = r#"{"n":5,"seed":1,"coefficients":{"A":1},
            "generators":{"A":{"kind":"normal","params":{"mean":0,"sd":0}}}}"#;
        assert!(SynthSpec::from_json(bad_sd).is_err());
        let bad_probs = r#"{"n":5,"seed":1,"coefficients":{"A":1},
            "generators":{"A":{"kind":"categorical_ordinal","params":{"levels":[1,2],"probs":[0.5,0.6]}}}}"#;
        assert!(SynthSpec::from_json(bad_probs).is_err());
    }

    #[test]
    fn ordinal_and_bernoulli_columns_are_valid() {
        let ds = generate(&table1_spec(500, 9).unwrap()).unwrap();
        let x3 = ds.column_by_name("X3").unwrap();
        assert!(x3.iter().all(|v| [1.0, 2.0, 3.0].contains(v)));
        assert_eq!(ds.specs()[9].role, Role::Dummy);
        assert_eq!(ds.m(), 10);
    }

    #[test]
    fn ks_distance_examples() {
        assert!((ks_uniform(&[0.5]) - 0.5).abs() < 1e-15);
        let grid: Vec<f64> = (0..100).map(|i| (i as f64 + 0.5) / 100.0).collect();
        assert!((ks_uniform(&grid) - 0.005).abs() < 1e-12);
    }

    #[test]
    fn oracle_symmetric_and_intercept_only() {
        let ds = Dataset::new(
            vec![
                VariableSpec::new("Y", Role::Response, ""),
                VariableSpec::new("X", Role::Continuous, ""),
            ],
            vec![
                vec![0.0, 0.0],
                vec![1.0, 0.0],
                vec![0.0, 1.0],
                vec![1.0, 1.0],
            ],
        )
        .unwrap();
        let o = brute_force_mle(&ds, 100_000).unwrap();
        assert!(o.coefficients.intercept.abs() < 1e-3 && o.coefficients.slopes[0].abs() < 1e-3);

        let ds = Dataset::new(
            vec![VariableSpec::new("Y", Role::Response, "")],
            (0..116).map(|i| vec![f64::from(i < 61)]).collect(),
        )
        .unwrap();
        assert!(
            brute_force_mle(&ds, 100_000).is_err(),
            "n above oracle scale"
        );
        let small = Dataset::new(
            vec![VariableSpec::new("Y", Role::Response, "")],
            (0..30).map(|i| vec![f64::from(i < 17)]).collect(),
        )
        .unwrap();
        let o = brute_force_mle(&small, 100_000).unwrap();
        assert!((o.coefficients.intercept - (17.0f64 / 13.0).ln()).abs() < 1e-4);
    }

    #[test]
    fn oracle_reports_budget_exhaustion() {
        let ds = generate(&small_oracle_spec(1).unwrap()).unwrap();
        match brute_force_mle(&ds, 50) {
            Err(OracleError::BudgetExhausted { best }) => assert!(best.evaluations >= 50),
            other => panic!("expected exhaustion, got {other:?}"),
        }
    }

    #[test]
    fn coverage_needs_enough_replicates() {
        assert!(coverage_experiment(&two_normal(50, 1, [0.0, 0.5, -0.5]), 0, 0.05).is_err());
        assert!(coverage_experiment(&two_normal(50, 1, [0.0, 0.5, -0.5]), 99, 0.05).is_err());
    }

    #[test]
    fn small_samples_with_strong_effects_report_separation() {
        let spec = two_normal(20, 21, [0.0, 4.0, -4.0]);
        let report = coverage_experiment(&spec, 100, 0.05).unwrap();
        assert!(
            report.separation_rate > 0.2,
            "rate {}",
            report.separation_rate
        );
    }
}
