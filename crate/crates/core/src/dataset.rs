//! Descriptor datasets: an N×M matrix of descriptor values with one observed
//! property per row.
//!
//! The on-disk format is comma-delimited UTF-8 text with a header row. By
//! default the first column is the compound id, the last column is the
//! property and everything in between is a descriptor.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::Path;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::format_real;

#[derive(Debug, Error, PartialEq)]
pub enum DatasetError {
    #[error("i/o error: {0}")]
    Io(String),
    #[error("empty input: no header line")]
    Empty,
    #[error("missing column `{0}`")]
    MissingColumn(String),
    #[error("row {row}: expected {expected} fields, found {found}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("row {row}, descriptor {col}: cannot parse `{text}` as a number")]
    Unparseable { row: usize, col: usize, text: String },
    /// Rows and descriptor columns are 1-based; the property column is
    /// reported as descriptor `M + 1`.
    #[error("non-finite value at row {0}, column {1}")]
    NonFiniteValue(usize, usize),
    #[error("duplicate descriptor name `{0}`")]
    DuplicateDescriptorName(String),
    #[error("property column has zero variance")]
    ConstantProperty,
    #[error("invalid shape: {0}")]
    InvalidShape(String),
}

/// Which header columns hold the compound id and the property. `None` means
/// the positional default (first column for ids, last column for the
/// property).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Schema {
    pub id_column: Option<String>,
    pub property_column: Option<String>,
}

/// An immutable descriptor table. Descriptors are stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    compound_ids: Vec<String>,
    descriptor_names: Vec<String>,
    descriptors: Vec<f64>,
    property: Vec<f64>,
}

impl Dataset {
    /// Builds a dataset from its parts, enforcing every invariant.
    pub fn new(
        compound_ids: Vec<String>,
        descriptor_names: Vec<String>,
        descriptors: Vec<f64>,
        property: Vec<f64>,
    ) -> Result<Self, DatasetError> {
        let n = property.len();
        let m = descriptor_names.len();
        if compound_ids.len() != n {
            return Err(DatasetError::InvalidShape(format!(
                "{} ids for {} rows",
                compound_ids.len(),
                n
            )));
        }
        if descriptors.len() != n * m {
            return Err(DatasetError::InvalidShape(format!(
                "descriptor matrix has {} cells, expected {}×{}",
                descriptors.len(),
                n,
                m
            )));
        }
        if m < 2 {
            return Err(DatasetError::InvalidShape(format!(
                "need at least 2 descriptors, found {m}"
            )));
        }
        let mut seen = HashSet::new();
        for name in &descriptor_names {
            if !seen.insert(name.as_str()) {
                return Err(DatasetError::DuplicateDescriptorName(name.clone()));
            }
        }
        for (row, y) in property.iter().enumerate() {
            for col in 0..m {
                if !descriptors[row * m + col].is_finite() {
                    return Err(DatasetError::NonFiniteValue(row + 1, col + 1));
                }
            }
            if !y.is_finite() {
                return Err(DatasetError::NonFiniteValue(row + 1, m + 1));
            }
        }
        if n < 2 || property.iter().all(|&y| y == property[0]) {
            return Err(DatasetError::ConstantProperty);
        }
        Ok(Self {
            compound_ids,
            descriptor_names,
            descriptors,
            property,
        })
    }

    /// Number of compounds (rows).
    pub fn n_rows(&self) -> usize {
        self.property.len()
    }

    /// Number of descriptors (columns).
    pub fn n_descriptors(&self) -> usize {
        self.descriptor_names.len()
    }

    pub fn compound_ids(&self) -> &[String] {
        &self.compound_ids
    }

    pub fn descriptor_names(&self) -> &[String] {
        &self.descriptor_names
    }

    pub fn property(&self) -> &[f64] {
        &self.property
    }

    #[inline]
    pub fn value(&self, row: usize, col: usize) -> f64 {
        self.descriptors[row * self.n_descriptors() + col]
    }

    /// Copies one descriptor column out of the row-major store.
    pub fn column(&self, col: usize) -> Vec<f64> {
        (0..self.n_rows()).map(|r| self.value(r, col)).collect()
    }

    /// Returns a copy with descriptor `col` replaced by `values`.
    pub fn with_column(&self, col: usize, values: &[f64]) -> Result<Self, DatasetError> {
        let m = self.n_descriptors();
        if col >= m || values.len() != self.n_rows() {
            return Err(DatasetError::InvalidShape(format!(
                "cannot replace column {col} with {} values",
                values.len()
            )));
        }
        let mut descriptors = self.descriptors.clone();
        for (r, v) in values.iter().enumerate() {
            descriptors[r * m + col] = *v;
        }
        Self::new(
            self.compound_ids.clone(),
            self.descriptor_names.clone(),
            descriptors,
            self.property.clone(),
        )
    }

    /// Canonical text form; the inverse of [`parse_dataset`] with the
    /// default schema.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str("id");
        for name in &self.descriptor_names {
            out.push(',');
            out.push_str(name);
        }
        out.push_str(",property\n");
        for r in 0..self.n_rows() {
            out.push_str(&self.compound_ids[r]);
            for c in 0..self.n_descriptors() {
                let _ = write!(out, ",{}", format_real(self.value(r, c)));
            }
            let _ = writeln!(out, ",{}", format_real(self.property[r]));
        }
        out
    }

    /// Hex SHA-256 of the canonical text form.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.to_csv().as_bytes()))
    }
}

/// Parses dataset text. Blank lines are ignored; fields are trimmed.
pub fn parse_dataset(text: &str, schema: &Schema) -> Result<Dataset, DatasetError> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or(DatasetError::Empty)?;
    let header: Vec<&str> = header.split(',').map(str::trim).collect();
    if header.len() < 2 {
        return Err(DatasetError::MissingColumn("property".into()));
    }

    let locate = |name: &Option<String>, default: usize| match name {
        Some(n) => header
            .iter()
            .position(|h| h == n)
            .ok_or_else(|| DatasetError::MissingColumn(n.clone())),
        None => Ok(default),
    };
    let id_col = locate(&schema.id_column, 0)?;
    let prop_col = locate(&schema.property_column, header.len() - 1)?;
    if id_col == prop_col {
        return Err(DatasetError::MissingColumn("property".into()));
    }
    let desc_cols: Vec<usize> = (0..header.len())
        .filter(|&c| c != id_col && c != prop_col)
        .collect();
    let descriptor_names: Vec<String> = desc_cols.iter().map(|&c| header[c].to_string()).collect();

    let mut ids = Vec::new();
    let mut descriptors = Vec::new();
    let mut property = Vec::new();
    for (row, (_, line)) in lines.enumerate() {
        let row = row + 1;
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != header.len() {
            return Err(DatasetError::RaggedRow {
                row,
                expected: header.len(),
                found: fields.len(),
            });
        }
        let parse = |col_pos: usize, text: &str| -> Result<f64, DatasetError> {
            let v: f64 = text.parse().map_err(|_| DatasetError::Unparseable {
                row,
                col: col_pos,
                text: text.to_string(),
            })?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(DatasetError::NonFiniteValue(row, col_pos))
            }
        };
        for (j, &c) in desc_cols.iter().enumerate() {
            descriptors.push(parse(j + 1, fields[c])?);
        }
        property.push(parse(desc_cols.len() + 1, fields[prop_col])?);
        ids.push(fields[id_col].to_string());
    }
    Dataset::new(ids, descriptor_names, descriptors, property)
}

pub fn load_dataset(path: &Path, schema: &Schema) -> Result<Dataset, DatasetError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| DatasetError::Io(format!("{}: {e}", path.display())))?;
    parse_dataset(&text, schema)
}

pub fn write_dataset(data: &Dataset, path: &Path) -> Result<(), DatasetError> {
    std::fs::write(path, data.to_csv())
        .map_err(|e| DatasetError::Io(format!("{}: {e}", path.display())))
}

/// A synthetic dataset together with the descriptors that generated the
/// property.
#[derive(Debug, Clone, PartialEq)]
pub struct Synthetic {
    pub data: Dataset,
    /// Sorted indices of the generating descriptors.
    pub true_indices: Vec<usize>,
    /// Coefficients of the generating descriptors, aligned with `true_indices`.
    pub true_coefficients: Vec<f64>,
}

/// Draws descriptors i.i.d. uniform on [0, 10) and sets the property to a
/// random linear combination of `k_true` of them plus Gaussian noise.
pub fn synth_dataset(
    n: usize,
    m: usize,
    k_true: usize,
    noise_sd: f64,
    seed: u64,
) -> Result<Synthetic, DatasetError> {
    if k_true < 1 || n < k_true + 2 || m < k_true || m < 2 {
        return Err(DatasetError::InvalidShape(format!(
            "n={n}, m={m}, k_true={k_true}: need k_true ≥ 1, n ≥ k_true+2, m ≥ max(k_true, 2)"
        )));
    }
    if !(noise_sd >= 0.0 && noise_sd.is_finite()) {
        return Err(DatasetError::InvalidShape(format!("noise_sd={noise_sd}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let descriptors: Vec<f64> = (0..n * m).map(|_| rng.random::<f64>() * 10.0).collect();
    let mut true_indices = sample(&mut rng, m, k_true).into_vec();
    true_indices.sort_unstable();
    // Magnitudes in [0.5, 2.5) with random sign, so no true descriptor is
    // negligible.
    let true_coefficients: Vec<f64> = (0..k_true)
        .map(|_| {
            let mag = 0.5 + 2.0 * rng.random::<f64>();
            if rng.random_bool(0.5) {
                mag
            } else {
                -mag
            }
        })
        .collect();
    let intercept = rng.random::<f64>() * 2.0 - 1.0;
    let property = (0..n)
        .map(|r| {
            let signal: f64 = true_indices
                .iter()
                .zip(&true_coefficients)
                .map(|(&c, &b)| b * descriptors[r * m + c])
                .sum();
            let noise: f64 = if noise_sd > 0.0 {
                noise_sd * Distribution::<f64>::sample(&StandardNormal, &mut rng)
            } else {
                0.0
            };
            intercept + signal + noise
        })
        .collect();
    let ids = (1..=n).map(|i| format!("C{i:04}")).collect();
    let names = (1..=m).map(|j| format!("D{j:03}")).collect();
    Ok(Synthetic {
        data: Dataset::new(ids, names, descriptors, property)?,
        true_indices,
        true_coefficients,
    })
}
