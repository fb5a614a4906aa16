//! Typed survey datasets: CSV ingestion, descriptive statistics, the
//! coefficient-of-variation screen and frequency tables.

use std::collections::HashSet;
use std::io::{Read, Write};

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Role a column plays in the logit model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Response,
    Continuous,
    Dummy,
}

impl Role {
    pub fn is_binary(self) -> bool {
        matches!(self, Role::Response | Role::Dummy)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariableSpec {
    pub name: String,
    pub role: Role,
    #[serde(default)]
    pub description: String,
}

impl VariableSpec {
    pub fn new(name: impl Into<String>, role: Role, description: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            role,
            description: description.into(),
        }
    }
}

/// Reads a schema sidecar: a JSON array of `{name, role, description}`.
pub fn read_schema<R: Read>(reader: R) -> Result<Vec<VariableSpec>> {
    let specs: Vec<VariableSpec> = serde_json::from_reader(reader)?;
    validate_schema(&specs)?;
    Ok(specs)
}

fn validate_schema(specs: &[VariableSpec]) -> Result<usize> {
    let mut seen = HashSet::new();
    for s in specs {
        if s.name.is_empty() {
            return Err(Error::Schema("empty variable name".into()));
        }
        if !seen.insert(s.name.as_str()) {
            return Err(Error::Schema(format!("duplicate variable `{}`", s.name)));
        }
    }
    let responses: Vec<usize> = specs
        .iter()
        .enumerate()
        .filter(|(_, s)| s.role == Role::Response)
        .map(|(i, _)| i)
        .collect();
    match responses.as_slice() {
        [idx] => Ok(*idx),
        [] => Err(Error::Schema("no variable has role `response`".into())),
        _ => Err(Error::Schema(format!(
            "{} variables have role `response`; exactly one is required",
            responses.len()
        ))),
    }
}

/// Immutable, validated n×m table of numeric observations.
///
/// Values are stored row-major in schema order. Binary columns hold only
/// 0 or 1 and no value is missing.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    specs: Vec<VariableSpec>,
    values: Vec<f64>,
    n: usize,
    response: usize,
}

impl Dataset {
    /// Builds a dataset from rows given in schema order.
    pub fn new(specs: Vec<VariableSpec>, rows: Vec<Vec<f64>>) -> Result<Self> {
        let response = validate_schema(&specs)?;
        let m = specs.len();
        if rows.is_empty() {
            return Err(Error::Schema("dataset has no observations".into()));
        }
        let mut values = Vec::with_capacity(rows.len() * m);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != m {
                return Err(Error::DimensionMismatch {
                    expected: m,
                    got: row.len(),
                });
            }
            for (spec, &v) in specs.iter().zip(row) {
                check_cell(spec, v, r + 1)?;
            }
            values.extend_from_slice(row);
        }
        Ok(Self {
            n: rows.len(),
            specs,
            values,
            response,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.specs.len()
    }

    pub fn specs(&self) -> &[VariableSpec] {
        &self.specs
    }

    pub fn response_spec(&self) -> &VariableSpec {
        &self.specs[self.response]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let m = self.m();
        &self.values[i * m..(i + 1) * m]
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.specs
            .iter()
            .position(|s| s.name == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn column(&self, idx: usize) -> impl Iterator<Item = f64> + '_ {
        let m = self.m();
        self.values.iter().skip(idx).step_by(m).copied()
    }

    pub fn column_by_name(&self, name: &str) -> Result<Vec<f64>> {
        Ok(self.column(self.index_of(name)?).collect())
    }

    pub fn response(&self) -> Vec<f64> {
        self.column(self.response).collect()
    }

    /// Non-response variables in schema order.
    pub fn predictors(&self) -> impl Iterator<Item = &VariableSpec> + '_ {
        self.specs.iter().filter(|s| s.role != Role::Response)
    }

    pub fn predictor_names(&self) -> Vec<String> {
        self.predictors().map(|s| s.name.clone()).collect()
    }

    /// Predictor values of observation `i`, in schema order.
    pub fn predictor_row(&self, i: usize) -> Vec<f64> {
        self.row(i)
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != self.response)
            .map(|(_, &v)| v)
            .collect()
    }

    /// Keeps the response plus the named predictors, preserving schema order.
    pub fn select_predictors(&self, keep: &[String]) -> Result<Self> {
        for name in keep {
            self.index_of(name)?;
        }
        let cols: Vec<usize> = (0..self.m())
            .filter(|&j| j == self.response || keep.contains(&self.specs[j].name))
            .collect();
        let specs = cols.iter().map(|&j| self.specs[j].clone()).collect();
        let rows = (0..self.n)
            .map(|i| {
                let row = self.row(i);
                cols.iter().map(|&j| row[j]).collect()
            })
            .collect();
        Self::new(specs, rows)
    }
}

fn check_cell(spec: &VariableSpec, v: f64, row: usize) -> Result<()> {
    let reason = if !v.is_finite() {
        Some("value is not finite".to_string())
    } else if spec.role.is_binary() && v != 0.0 && v != 1.0 {
        Some(format!("{:?} column must be 0 or 1, found {v}", spec.role).to_lowercase())
    } else {
        None
    };
    match reason {
        Some(reason) => Err(Error::Cell {
            row,
            column: spec.name.clone(),
            reason,
        }),
        None => Ok(()),
    }
}

/// Parses a comma-delimited CSV with a header row whose names match
/// `schema` in any order. Columns are reordered to follow the schema.
pub fn load_csv<R: Read>(source: R, schema: &[VariableSpec]) -> Result<Dataset> {
    validate_schema(schema)?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(source);
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if header.len() == 1 && header[0].is_empty() {
        return Err(Error::Schema("CSV has no header row".into()));
    }

    let mut positions = Vec::with_capacity(schema.len());
    for spec in schema {
        let pos = header.iter().position(|h| *h == spec.name).ok_or_else(|| {
            Error::Schema(format!("column `{}` missing from CSV header", spec.name))
        })?;
        positions.push(pos);
    }
    if let Some(extra) = header
        .iter()
        .find(|h| !schema.iter().any(|s| &s.name == *h))
    {
        return Err(Error::Schema(format!(
            "CSV column `{extra}` is not in the schema"
        )));
    }
    if header.len() != schema.len() {
        return Err(Error::Schema("CSV header repeats a column name".into()));
    }

    let mut rows = Vec::new();
    for (r, record) in reader.records().enumerate() {
        let record = record?;
        let row_no = r + 1;
        let mut row = Vec::with_capacity(schema.len());
        for (spec, &pos) in schema.iter().zip(&positions) {
            let cell = record.get(pos).unwrap_or("");
            if cell.is_empty() {
                return Err(Error::Cell {
                    row: row_no,
                    column: spec.name.clone(),
                    reason: "missing value".into(),
                });
            }
            let v: f64 = cell.parse().map_err(|_| Error::Cell {
                row: row_no,
                column: spec.name.clone(),
                reason: format!("`{cell}` is not a number"),
            })?;
            check_cell(spec, v, row_no)?;
            row.push(v);
        }
        rows.push(row);
    }
    Dataset::new(schema.to_vec(), rows)
}

/// Writes the canonical CSV: schema-order header, then each value in its
/// shortest round-trip decimal form.
pub fn write_csv<W: Write>(ds: &Dataset, sink: W) -> Result<()> {
    let mut writer = csv::WriterBuilder::new().from_writer(sink);
    writer.write_record(ds.specs.iter().map(|s| s.name.as_str()))?;
    for i in 0..ds.n {
        writer.write_record(ds.row(i).iter().map(|v| v.to_string()))?;
    }
    writer.flush()?;
    Ok(())
}

/// Mean, sample standard deviation and coefficient of variation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DescriptiveStats {
    pub mean: f64,
    pub std_dev: f64,
    /// `100·std_dev/mean`; `None` when the mean is zero.
    pub cv_percent: Option<f64>,
}

impl DescriptiveStats {
    pub fn from_moments(mean: f64, std_dev: f64) -> Self {
        let cv_percent = (mean != 0.0).then(|| 100.0 * std_dev / mean);
        Self {
            mean,
            std_dev,
            cv_percent,
        }
    }

    pub fn from_values(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std_dev = if values.len() > 1 {
            let ss: f64 = values.iter().map(|x| (x - mean).powi(2)).sum();
            (ss / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Self::from_moments(mean, std_dev)
    }

    pub fn cv(&self, variable: &str) -> Result<f64> {
        self.cv_percent
            .ok_or_else(|| Error::UndefinedCv(variable.to_string()))
    }
}

pub fn describe(ds: &Dataset, variable: &str) -> Result<DescriptiveStats> {
    let values = ds.column_by_name(variable)?;
    Ok(DescriptiveStats::from_values(&values))
}

/// Descriptive statistics for every column, keyed by name in schema order.
pub fn describe_all(ds: &Dataset) -> IndexMap<String, DescriptiveStats> {
    ds.specs
        .iter()
        .enumerate()
        .map(|(j, s)| {
            let values: Vec<f64> = ds.column(j).collect();
            (s.name.clone(), DescriptiveStats::from_values(&values))
        })
        .collect()
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CvScreen {
    pub retained: Vec<String>,
    pub excluded: Vec<String>,
}

/// Screens precomputed statistics: a variable whose |CV| falls below
/// `threshold_percent` is homogeneous and excluded.
pub fn screen_stats<'a, I>(stats: I, threshold_percent: f64) -> Result<CvScreen>
where
    I: IntoIterator<Item = (&'a str, &'a DescriptiveStats)>,
{
    let mut screen = CvScreen::default();
    for (name, s) in stats {
        let cv = s.cv(name)?;
        if cv.abs() < threshold_percent {
            screen.excluded.push(name.to_string());
        } else {
            screen.retained.push(name.to_string());
        }
    }
    Ok(screen)
}

/// Applies the CV screen to every non-response variable of `ds`.
pub fn screen_by_cv(ds: &Dataset, threshold_percent: f64) -> Result<CvScreen> {
    let all = describe_all(ds);
    screen_stats(
        ds.predictors().map(|s| (s.name.as_str(), &all[&s.name])),
        threshold_percent,
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyBin {
    pub label: String,
    pub count: usize,
    pub percent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyTable {
    pub variable: String,
    pub bins: Vec<FrequencyBin>,
}

/// Counts observations per bin. Binary variables default to bins {0, 1};
/// otherwise `bin_edges` define half-open bins `[e_k, e_{k+1})`.
pub fn tabulate(ds: &Dataset, variable: &str, bin_edges: Option<&[f64]>) -> Result<FrequencyTable> {
    let idx = ds.index_of(variable)?;
    let spec = &ds.specs[idx];
    let n = ds.n();

    let counts: Vec<(String, usize)> = match bin_edges {
        Some(edges) => {
            if edges.len() < 2
                || edges.iter().any(|e| !e.is_finite())
                || edges.windows(2).any(|w| w[0] >= w[1])
            {
                return Err(Error::InvalidBinEdges);
            }
            let mut counts = vec![0usize; edges.len() - 1];
            for (row, v) in ds.column(idx).enumerate() {
                // index of the last edge <= v
                let k = edges.partition_point(|&e| e <= v);
                if k == 0 || k == edges.len() {
                    return Err(Error::OutsideBins {
                        variable: variable.to_string(),
                        row: row + 1,
                        value: v,
                    });
                }
                counts[k - 1] += 1;
            }
            edges
                .windows(2)
                .zip(counts)
                .map(|(w, c)| (format!("[{}, {})", w[0], w[1]), c))
                .collect()
        }
        None if spec.role.is_binary() => {
            let ones = ds.column(idx).filter(|&v| v == 1.0).count();
            vec![("0".to_string(), n - ones), ("1".to_string(), ones)]
        }
        None => {
            return Err(Error::Domain(format!(
                "continuous variable `{variable}` needs bin edges"
            )))
        }
    };

    let bins = counts
        .into_iter()
        .map(|(label, count)| FrequencyBin {
            label,
            count,
            percent: 100.0 * count as f64 / n as f64,
        })
        .collect();
    Ok(FrequencyTable {
        variable: variable.to_string(),
        bins,
    })
}
