//! Return-series ingestion and estimation of the optimization inputs.
//!
//! Returns are periodic returns in percent, one row per period and one column
//! per asset. The estimated [`AssetUniverse`] (expected returns, sample
//! covariance, carbon scores) is the canonical problem instance consumed by the
//! optimizer and is persisted as a single JSON document.

use std::collections::{BTreeSet, HashMap};
use std::fs;
use std::path::Path;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Absolute tolerance on `|sigma_ij - sigma_ji|`.
pub const SYMMETRY_TOL: f64 = 1e-9;
/// Smallest admissible covariance eigenvalue.
pub const PSD_TOL: f64 = -1e-8;
/// Default valid range of carbon risk scores.
pub const DEFAULT_CARBON_RANGE: (f64, f64) = (0.0, 10.0);

/// How a returns CSV is laid out.
#[derive(Clone, Debug)]
pub struct CsvFormat {
    pub delimiter: u8,
    pub period_label: String,
}

impl Default for CsvFormat {
    fn default() -> Self {
        CsvFormat {
            delimiter: b',',
            period_label: "monthly".to_string(),
        }
    }
}

/// A complete T x N panel of periodic returns.
#[derive(Clone, Debug, PartialEq)]
pub struct ReturnsMatrix {
    asset_ids: Vec<String>,
    observations: Vec<Vec<f64>>,
    period_label: String,
}

impl ReturnsMatrix {
    pub fn new(
        asset_ids: Vec<String>,
        observations: Vec<Vec<f64>>,
        period_label: impl Into<String>,
    ) -> Result<Self> {
        check_unique_ids(&asset_ids)?;
        let n = asset_ids.len();
        if n == 0 {
            return Err(Error::EmptyInput("no asset columns"));
        }
        for (t, row) in observations.iter().enumerate() {
            if row.len() != n {
                return Err(Error::RaggedRow {
                    row: t + 1,
                    expected: n,
                    found: row.len(),
                });
            }
            if let Some(j) = row.iter().position(|v| !v.is_finite()) {
                return Err(Error::Cell {
                    row: t + 1,
                    column: j + 1,
                    message: format!("non-finite value {}", row[j]),
                });
            }
        }
        if observations.len() < 2 {
            return Err(Error::InsufficientData {
                required: 2,
                actual: observations.len(),
            });
        }
        Ok(ReturnsMatrix {
            asset_ids,
            observations,
            period_label: period_label.into(),
        })
    }

    pub fn asset_ids(&self) -> &[String] {
        &self.asset_ids
    }

    /// Rows are periods, columns are assets.
    pub fn observations(&self) -> &[Vec<f64>] {
        &self.observations
    }

    pub fn period_label(&self) -> &str {
        &self.period_label
    }

    pub fn n_assets(&self) -> usize {
        self.asset_ids.len()
    }

    pub fn n_periods(&self) -> usize {
        self.observations.len()
    }
}

/// The problem instance: expected returns, covariance and carbon scores.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "InstanceFile", into = "InstanceFile")]
pub struct AssetUniverse {
    asset_ids: Vec<String>,
    mu: Vec<f64>,
    /// Row-major N x N.
    sigma: Vec<f64>,
    carbon: Vec<f64>,
    carbon_range: (f64, f64),
}

/// On-disk layout of an [`AssetUniverse`].
#[derive(Clone, Debug, Serialize, Deserialize)]
struct InstanceFile {
    asset_ids: Vec<String>,
    mu: Vec<f64>,
    sigma: Vec<Vec<f64>>,
    carbon: Vec<f64>,
    #[serde(default = "default_range")]
    carbon_range: (f64, f64),
}

fn default_range() -> (f64, f64) {
    DEFAULT_CARBON_RANGE
}

impl TryFrom<InstanceFile> for AssetUniverse {
    type Error = Error;

    fn try_from(f: InstanceFile) -> Result<Self> {
        AssetUniverse::new(f.asset_ids, f.mu, f.sigma, f.carbon, f.carbon_range)
    }
}

impl From<AssetUniverse> for InstanceFile {
    fn from(u: AssetUniverse) -> Self {
        let sigma = u.sigma_rows();
        InstanceFile {
            asset_ids: u.asset_ids,
            mu: u.mu,
            sigma,
            carbon: u.carbon,
            carbon_range: u.carbon_range,
        }
    }
}

impl AssetUniverse {
    /// Builds a validated instance.
    pub fn new(
        asset_ids: Vec<String>,
        mu: Vec<f64>,
        sigma: Vec<Vec<f64>>,
        carbon: Vec<f64>,
        carbon_range: (f64, f64),
    ) -> Result<Self> {
        let n = asset_ids.len();
        if n == 0 {
            return Err(Error::EmptyInput("no assets"));
        }
        check_unique_ids(&asset_ids)?;
        check_len("mu", n, mu.len())?;
        check_len("carbon", n, carbon.len())?;
        check_len("sigma rows", n, sigma.len())?;
        for row in &sigma {
            check_len("sigma columns", n, row.len())?;
        }
        if mu.iter().chain(sigma.iter().flatten()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInstance("non-finite mu or sigma entry".into()));
        }
        let (lo, hi) = carbon_range;
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(Error::InvalidInstance(format!(
                "invalid carbon range ({lo}, {hi})"
            )));
        }
        check_carbon(&asset_ids, &carbon, carbon_range)?;

        for i in 0..n {
            for j in (i + 1)..n {
                let d = (sigma[i][j] - sigma[j][i]).abs();
                if d > SYMMETRY_TOL {
                    return Err(Error::InvalidInstance(format!(
                        "sigma not symmetric at ({i}, {j}): |difference| = {d:e}"
                    )));
                }
            }
        }
        let flat: Vec<f64> = sigma.into_iter().flatten().collect();
        let min_eig = min_eigenvalue(n, &flat);
        if min_eig < PSD_TOL {
            return Err(Error::InvalidInstance(format!(
                "sigma not positive semidefinite: smallest eigenvalue {min_eig:e}"
            )));
        }
        Ok(AssetUniverse {
            asset_ids,
            mu,
            sigma: flat,
            carbon,
            carbon_range,
        })
    }

    pub fn n_assets(&self) -> usize {
        self.asset_ids.len()
    }

    pub fn asset_ids(&self) -> &[String] {
        &self.asset_ids
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn carbon(&self) -> &[f64] {
        &self.carbon
    }

    pub fn carbon_range(&self) -> (f64, f64) {
        self.carbon_range
    }

    /// Row-major covariance.
    pub fn sigma_flat(&self) -> &[f64] {
        &self.sigma
    }

    pub fn sigma(&self, i: usize, j: usize) -> f64 {
        self.sigma[i * self.n_assets() + j]
    }

    pub fn sigma_rows(&self) -> Vec<Vec<f64>> {
        self.sigma
            .chunks(self.n_assets())
            .map(<[f64]>::to_vec)
            .collect()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        min_eigenvalue(self.n_assets(), &self.sigma)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_json()? + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let s = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&s)
    }

    /// SHA-256 of the compact canonical JSON form, prefixed with `sha256:`.
    ///
    /// Independent of the whitespace of whatever file the instance came from.
    pub fn digest(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("instance serializes");
        format!("sha256:{}", hex::encode(Sha256::digest(&bytes)))
    }
}

fn check_len(context: &'static str, expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(Error::DimensionMismatch {
            context,
            expected,
            actual,
        });
    }
    Ok(())
}

fn check_unique_ids(ids: &[String]) -> Result<()> {
    let mut seen = BTreeSet::new();
    for id in ids {
        if !seen.insert(id.as_str()) {
            return Err(Error::AssetMismatch(format!("duplicate asset id '{id}'")));
        }
    }
    Ok(())
}

fn check_carbon(ids: &[String], carbon: &[f64], (lo, hi): (f64, f64)) -> Result<()> {
    for (id, &c) in ids.iter().zip(carbon) {
        if !(c.is_finite() && lo <= c && c <= hi) {
            return Err(Error::CarbonOutOfRange {
                asset: id.clone(),
                value: c,
                lo,
                hi,
            });
        }
    }
    Ok(())
}

fn min_eigenvalue(n: usize, sigma: &[f64]) -> f64 {
    let m = DMatrix::from_row_slice(n, n, sigma);
    SymmetricEigen::new(m)
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Reads a returns CSV: a header of asset ids followed by one row per period.
pub fn load_returns(path: impl AsRef<Path>, format: &CsvFormat) -> Result<ReturnsMatrix> {
    let path = path.as_ref();
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(format.delimiter)
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };

    let asset_ids: Vec<String> = reader
        .headers()
        .map_err(csv_err)?
        .iter()
        .map(str::to_string)
        .collect();
    if asset_ids.is_empty() || asset_ids.iter().any(String::is_empty) {
        return Err(Error::Cell {
            row: 0,
            column: asset_ids.iter().position(String::is_empty).unwrap_or(0) + 1,
            message: "empty asset id in header".into(),
        });
    }
    let n = asset_ids.len();

    let mut observations = Vec::new();
    for (t, record) in reader.records().enumerate() {
        let record = record.map_err(csv_err)?;
        let row = t + 1;
        if record.len() != n {
            return Err(Error::RaggedRow {
                row,
                expected: n,
                found: record.len(),
            });
        }
        let values = record
            .iter()
            .enumerate()
            .map(|(j, cell)| parse_cell(cell, row, j + 1))
            .collect::<Result<Vec<_>>>()?;
        observations.push(values);
    }
    ReturnsMatrix::new(asset_ids, observations, format.period_label.clone())
}

fn parse_cell(cell: &str, row: usize, column: usize) -> Result<f64> {
    if cell.is_empty() {
        return Err(Error::Cell {
            row,
            column,
            message: "empty cell".into(),
        });
    }
    match cell.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(Error::Cell {
            row,
            column,
            message: format!("not a finite number: '{cell}'"),
        }),
    }
}

/// Reads a two-column `(asset_id, carbon_score)` CSV. A header row is
/// recognized when its second cell is not numeric.
pub fn load_carbon(path: impl AsRef<Path>) -> Result<Vec<(String, f64)>> {
    let path = path.as_ref();
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file);

    let mut out = Vec::new();
    let mut data_row = 0;
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|source| Error::Csv {
            path: path.to_path_buf(),
            source,
        })?;
        if i == 0 && record.len() == 2 && record[1].parse::<f64>().is_err() {
            continue;
        }
        data_row += 1;
        if record.len() != 2 {
            return Err(Error::RaggedRow {
                row: data_row,
                expected: 2,
                found: record.len(),
            });
        }
        let id = record[0].to_string();
        if id.is_empty() {
            return Err(Error::Cell {
                row: data_row,
                column: 1,
                message: "empty asset id".into(),
            });
        }
        out.push((id, parse_cell(&record[1], data_row, 2)?));
    }
    Ok(out)
}

/// Orders carbon scores to match `asset_ids`. The two id sets must be equal.
pub fn align_carbon(asset_ids: &[String], scores: &[(String, f64)]) -> Result<Vec<f64>> {
    let mut by_id: HashMap<&str, f64> = HashMap::with_capacity(scores.len());
    for (id, score) in scores {
        if by_id.insert(id.as_str(), *score).is_some() {
            return Err(Error::AssetMismatch(format!(
                "duplicate carbon score for '{id}'"
            )));
        }
    }
    let missing: Vec<&str> = asset_ids
        .iter()
        .map(String::as_str)
        .filter(|id| !by_id.contains_key(id))
        .collect();
    let known: BTreeSet<&str> = asset_ids.iter().map(String::as_str).collect();
    let extra: Vec<&str> = scores
        .iter()
        .map(|(id, _)| id.as_str())
        .filter(|id| !known.contains(id))
        .collect();
    if !missing.is_empty() || !extra.is_empty() {
        return Err(Error::AssetMismatch(format!(
            "no carbon score for [{}]; carbon scores for unknown assets [{}]",
            missing.join(", "),
            extra.join(", ")
        )));
    }
    Ok(asset_ids.iter().map(|id| by_id[id.as_str()]).collect())
}

/// Sample mean and sample covariance (divisor T-1) of the return columns.
pub fn estimate_moments(
    returns: &ReturnsMatrix,
    carbon: &[f64],
    carbon_range: (f64, f64),
) -> Result<AssetUniverse> {
    let n = returns.n_assets();
    let t = returns.n_periods();
    if t < 2 {
        return Err(Error::InsufficientData {
            required: 2,
            actual: t,
        });
    }
    check_len("carbon", n, carbon.len())?;
    check_carbon(returns.asset_ids(), carbon, carbon_range)?;

    let obs = returns.observations();
    let mu: Vec<f64> = (0..n)
        .map(|j| obs.iter().map(|row| row[j]).sum::<f64>() / t as f64)
        .collect();
    let mut sigma = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i..n {
            let s: f64 = obs
                .iter()
                .map(|row| (row[i] - mu[i]) * (row[j] - mu[j]))
                .sum();
            let c = s / (t - 1) as f64;
            sigma[i][j] = c;
            sigma[j][i] = c;
        }
    }
    AssetUniverse::new(
        returns.asset_ids().to_vec(),
        mu,
        sigma,
        carbon.to_vec(),
        carbon_range,
    )
}
