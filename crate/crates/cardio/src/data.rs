//! Dataset loading, validation, deduplication, and partitioning.
//!
//! The corpus is the cardiovascular-disease table: eleven predictors plus a
//! binary `cardio` target, one row per patient. Files are `;`- or
//! `,`-delimited UTF-8 with a header row; an optional leading `id` column is
//! discarded on load. Columns are matched by header name, so both the Kaggle
//! column order and the attribute-table order load correctly.

use std::collections::HashSet;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Names of the eleven predictor attributes, in canonical order.
pub const PREDICTORS: [&str; 11] = [
    "age",
    "gender",
    "height",
    "weight",
    "ap_hi",
    "ap_lo",
    "cholesterol",
    "gluc",
    "smoke",
    "alco",
    "active",
];

/// Index of each predictor in [`PREDICTORS`], by name.
pub fn predictor_index(name: &str) -> Option<usize> {
    PREDICTORS.iter().position(|p| *p == name)
}

/// How a predictor participates in attribute tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureKind {
    /// Ordered numeric attribute; splits use midpoint thresholds.
    Numeric,
    /// {0,1} attribute; splits test `<= 0` / `> 0`.
    Binary,
    /// Unordered categories; splits test equality one-vs-rest.
    Categorical,
}

/// Attribute-test kind for each predictor, indexed as in [`PREDICTORS`].
pub const FEATURE_KINDS: [FeatureKind; 11] = [
    FeatureKind::Numeric,     // age (days)
    FeatureKind::Categorical, // gender {1,2}
    FeatureKind::Numeric,     // height (cm)
    FeatureKind::Numeric,     // weight (kg)
    FeatureKind::Numeric,     // ap_hi (mmHg)
    FeatureKind::Numeric,     // ap_lo (mmHg)
    FeatureKind::Categorical, // cholesterol {1,2,3}
    FeatureKind::Categorical, // gluc {1,2,3}
    FeatureKind::Binary,      // smoke
    FeatureKind::Binary,      // alco
    FeatureKind::Binary,      // active
];

/// Category values of each categorical predictor.
pub fn category_values(feature: usize) -> &'static [u8] {
    match PREDICTORS[feature] {
        "gender" => &[1, 2],
        "cholesterol" | "gluc" => &[1, 2, 3],
        "smoke" | "alco" | "active" => &[0, 1],
        _ => &[],
    }
}

/// One dataset row: eleven predictors and the binary target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatientRecord {
    /// Age in days.
    pub age: i64,
    /// 1 or 2.
    pub gender: u8,
    /// Height in cm.
    pub height: i64,
    /// Weight in kg.
    pub weight: f64,
    /// Systolic blood pressure, mmHg.
    pub ap_hi: i64,
    /// Diastolic blood pressure, mmHg.
    pub ap_lo: i64,
    /// 1 normal, 2 above normal, 3 well above normal.
    pub cholesterol: u8,
    /// 1 normal, 2 above normal, 3 well above normal.
    pub gluc: u8,
    pub smoke: u8,
    pub alco: u8,
    pub active: u8,
    /// Target: 1 = presence of cardiovascular disease.
    pub cardio: u8,
}

impl PatientRecord {
    /// Value of predictor `feature` (index into [`PREDICTORS`]) as f64.
    pub fn feature(&self, feature: usize) -> f64 {
        match feature {
            0 => self.age as f64,
            1 => self.gender as f64,
            2 => self.height as f64,
            3 => self.weight,
            4 => self.ap_hi as f64,
            5 => self.ap_lo as f64,
            6 => self.cholesterol as f64,
            7 => self.gluc as f64,
            8 => self.smoke as f64,
            9 => self.alco as f64,
            10 => self.active as f64,
            _ => panic!("feature index {feature} out of range"),
        }
    }

    /// All twelve fields as a hashable/orderable key. Weight carries at most
    /// one fractional digit in the corpus, so a fixed-point x10 encoding is
    /// exact.
    pub(crate) fn key(&self) -> [i64; 12] {
        [
            self.age,
            self.gender as i64,
            self.height,
            (self.weight * 10.0).round() as i64,
            self.ap_hi,
            self.ap_lo,
            self.cholesterol as i64,
            self.gluc as i64,
            self.smoke as i64,
            self.alco as i64,
            self.active as i64,
            self.cardio as i64,
        ]
    }

    pub(crate) fn validate(&self) -> Result<(), String> {
        if self.age <= 0 {
            return Err(format!("age must be positive, got {}", self.age));
        }
        if self.height <= 0 {
            return Err(format!("height must be positive, got {}", self.height));
        }
        if !(self.weight > 0.0) {
            return Err(format!("weight must be positive, got {}", self.weight));
        }
        if !matches!(self.gender, 1 | 2) {
            return Err(format!("gender must be 1 or 2, got {}", self.gender));
        }
        for (name, v) in [("cholesterol", self.cholesterol), ("gluc", self.gluc)] {
            if !matches!(v, 1..=3) {
                return Err(format!("{name} must be in 1..=3, got {v}"));
            }
        }
        for (name, v) in [
            ("smoke", self.smoke),
            ("alco", self.alco),
            ("active", self.active),
            ("cardio", self.cardio),
        ] {
            if v > 1 {
                return Err(format!("{name} must be 0 or 1, got {v}"));
            }
        }
        Ok(())
    }
}

/// Where a dataset came from and what dedup did to it.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Provenance {
    /// Source file, when loaded from disk.
    pub source: Option<PathBuf>,
    /// Row count before deduplication.
    pub rows_before_dedup: usize,
    /// Rows removed by deduplication (0 until `deduplicate` runs).
    pub duplicates_removed: usize,
}

/// An ordered collection of records; file order is preserved on load.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Dataset {
    pub records: Vec<PatientRecord>,
    pub provenance: Provenance,
}

impl Dataset {
    pub fn from_records(records: Vec<PatientRecord>) -> Self {
        let n = records.len();
        Dataset {
            records,
            provenance: Provenance {
                source: None,
                rows_before_dedup: n,
                duplicates_removed: 0,
            },
        }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Count of records per class: (cardio=0, cardio=1).
    pub fn class_counts(&self) -> (usize, usize) {
        let ones = self.records.iter().filter(|r| r.cardio == 1).count();
        (self.records.len() - ones, ones)
    }

    /// New dataset holding the records at `indices`, in the given order.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset::from_records(indices.iter().map(|&i| self.records[i]).collect())
    }
}

/// Evaluation-partition request.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SplitMode {
    PercentageSplit,
    KFold,
}

/// Parameters for [`percentage_split`] and [`stratified_folds`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitSpec {
    pub mode: SplitMode,
    /// Fraction of records assigned to training under percentage split.
    pub train_fraction: f64,
    /// Fold count under k-fold.
    pub k: usize,
    pub seed: u64,
    pub stratified: bool,
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec {
            mode: SplitMode::PercentageSplit,
            train_fraction: 0.60,
            k: 10,
            seed: 1,
            stratified: true,
        }
    }
}

impl SplitSpec {
    pub fn validate(&self) -> Result<(), DataError> {
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(DataError::InvalidSplit(format!(
                "train_fraction must be in (0,1), got {}",
                self.train_fraction
            )));
        }
        if self.k < 2 {
            return Err(DataError::InvalidSplit(format!(
                "fold count must be at least 2, got {}",
                self.k
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum DataError {
    #[error("cannot open {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    MalformedRow {
        path: PathBuf,
        /// 1-based line number in the file (header is line 1).
        line: u64,
        message: String,
    },
    #[error("{path}: {message}")]
    MalformedHeader { path: PathBuf, message: String },
    #[error("invalid split spec: {0}")]
    InvalidSplit(String),
    #[error("dataset too small: {0}")]
    TooSmall(String),
    #[error("stratified folding impossible: {0}")]
    Stratification(String),
}

/// Column layout discovered from a header row.
struct HeaderMap {
    /// Position of each of the 12 named columns (PREDICTORS + cardio).
    positions: [usize; 12],
    /// Total field count each row must have.
    width: usize,
}

fn map_header(path: &Path, headers: &csv::StringRecord) -> Result<HeaderMap, DataError> {
    let names: Vec<String> = headers
        .iter()
        .map(|h| h.trim().to_ascii_lowercase())
        .collect();
    let mut positions = [usize::MAX; 12];
    let mut wanted: Vec<&str> = PREDICTORS.to_vec();
    wanted.push("cardio");
    for (slot, name) in wanted.iter().enumerate() {
        match names.iter().position(|h| h == name) {
            Some(pos) => positions[slot] = pos,
            None => {
                return Err(DataError::MalformedHeader {
                    path: path.to_path_buf(),
                    message: format!("missing column `{name}` in header"),
                })
            }
        }
    }
    for (pos, name) in names.iter().enumerate() {
        if name != "id" && !wanted.contains(&name.as_str()) {
            return Err(DataError::MalformedHeader {
                path: path.to_path_buf(),
                message: format!("unrecognized column `{name}` at position {pos}"),
            });
        }
    }
    Ok(HeaderMap {
        positions,
        width: names.len(),
    })
}

fn parse_int(field: &str, name: &str) -> Result<i64, String> {
    field
        .trim()
        .parse::<i64>()
        .map_err(|_| format!("column `{name}`: expected integer, got `{field}`"))
}

fn parse_small(field: &str, name: &str) -> Result<u8, String> {
    let v = parse_int(field, name)?;
    u8::try_from(v).map_err(|_| format!("column `{name}`: value {v} out of domain"))
}

/// Load a delimited file into a [`Dataset`].
///
/// Rows keep file order. A leading `id` column is discarded. Lines starting
/// with `#` are skipped, so files that carry their run configuration as a
/// comment block load unchanged. Any malformed row (wrong field count,
/// non-numeric field, out-of-domain categorical, missing value) aborts the
/// load with the offending line number.
pub fn load_csv(path: &Path, delimiter: u8) -> Result<Dataset, DataError> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .has_headers(true)
        .flexible(true)
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => DataError::Io {
                path: path.to_path_buf(),
                source: std::io::Error::new(std::io::ErrorKind::Other, e.to_string()),
            },
            _ => DataError::MalformedHeader {
                path: path.to_path_buf(),
                message: e.to_string(),
            },
        })?;
    let headers = reader
        .headers()
        .map_err(|e| DataError::MalformedHeader {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?
        .clone();
    let map = map_header(path, &headers)?;

    let mut records = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let fallback_line = i as u64 + 2; // header is line 1 in comment-free files
        let row = row.map_err(|e| DataError::MalformedRow {
            path: path.to_path_buf(),
            line: fallback_line,
            message: e.to_string(),
        })?;
        let line = row.position().map_or(fallback_line, |p| p.line());
        let fail = |message: String| DataError::MalformedRow {
            path: path.to_path_buf(),
            line,
            message,
        };
        if row.len() != map.width {
            return Err(fail(format!(
                "expected {} fields, got {}",
                map.width,
                row.len()
            )));
        }
        let field = |slot: usize| -> Result<&str, DataError> {
            let text = &row[map.positions[slot]];
            if text.trim().is_empty() {
                Err(fail(format!(
                    "missing value in column `{}`",
                    if slot < 11 { PREDICTORS[slot] } else { "cardio" }
                )))
            } else {
                Ok(text)
            }
        };
        let weight_text = field(3)?;
        let weight = weight_text
            .trim()
            .parse::<f64>()
            .ok()
            .filter(|w| w.is_finite())
            .ok_or_else(|| fail(format!("column `weight`: expected number, got `{weight_text}`")))?;
        let record = PatientRecord {
            age: parse_int(field(0)?, "age").map_err(&fail)?,
            gender: parse_small(field(1)?, "gender").map_err(&fail)?,
            height: parse_int(field(2)?, "height").map_err(&fail)?,
            weight,
            ap_hi: parse_int(field(4)?, "ap_hi").map_err(&fail)?,
            ap_lo: parse_int(field(5)?, "ap_lo").map_err(&fail)?,
            cholesterol: parse_small(field(6)?, "cholesterol").map_err(&fail)?,
            gluc: parse_small(field(7)?, "gluc").map_err(&fail)?,
            smoke: parse_small(field(8)?, "smoke").map_err(&fail)?,
            alco: parse_small(field(9)?, "alco").map_err(&fail)?,
            active: parse_small(field(10)?, "active").map_err(&fail)?,
            cardio: parse_small(field(11)?, "cardio").map_err(&fail)?,
        };
        record.validate().map_err(&fail)?;
        records.push(record);
    }
    let n = records.len();
    Ok(Dataset {
        records,
        provenance: Provenance {
            source: Some(path.to_path_buf()),
            rows_before_dedup: n,
            duplicates_removed: 0,
        },
    })
}

/// Format a weight the way the corpus does: always one fractional digit.
pub fn format_weight(w: f64) -> String {
    format!("{:.1}", w)
}

/// Write a dataset in the corpus column order, semicolon- or comma-delimited.
/// `load_csv` of the result reproduces the dataset field-for-field.
pub fn write_csv<W: Write>(out: &mut W, d: &Dataset, delimiter: u8) -> std::io::Result<()> {
    let sep = delimiter as char;
    writeln!(
        out,
        "id{sep}age{sep}gender{sep}height{sep}weight{sep}ap_hi{sep}ap_lo{sep}cholesterol{sep}gluc{sep}smoke{sep}alco{sep}active{sep}cardio"
    )?;
    for (i, r) in d.records.iter().enumerate() {
        writeln!(
            out,
            "{i}{sep}{}{sep}{}{sep}{}{sep}{}{sep}{}{sep}{}{sep}{}{sep}{}{sep}{}{sep}{}{sep}{}{sep}{}",
            r.age,
            r.gender,
            r.height,
            format_weight(r.weight),
            r.ap_hi,
            r.ap_lo,
            r.cholesterol,
            r.gluc,
            r.smoke,
            r.alco,
            r.active,
            r.cardio,
        )?;
    }
    Ok(())
}

/// Remove exact duplicates, judged on all 12 fields, keeping the first
/// occurrence of each distinct tuple. Order is otherwise preserved.
pub fn deduplicate(d: &Dataset) -> Dataset {
    let mut seen = HashSet::with_capacity(d.records.len());
    let mut records = Vec::with_capacity(d.records.len());
    for r in &d.records {
        if seen.insert(r.key()) {
            records.push(*r);
        }
    }
    let removed = d.records.len() - records.len();
    Dataset {
        records,
        provenance: Provenance {
            source: d.provenance.source.clone(),
            rows_before_dedup: d.records.len(),
            duplicates_removed: removed,
        },
    }
}

fn shuffled_indices(n: usize, seed: u64) -> Vec<usize> {
    let mut indices: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    indices.shuffle(&mut rng);
    indices
}

/// Split into train/test by a seeded shuffle followed by a
/// floor(train_fraction * N) cut. The same seed yields the identical split.
pub fn percentage_split(
    d: &Dataset,
    spec: &SplitSpec,
    seed: u64,
) -> Result<(Dataset, Dataset), DataError> {
    spec.validate()?;
    if d.len() < 2 {
        return Err(DataError::TooSmall(format!(
            "percentage split needs at least 2 records, got {}",
            d.len()
        )));
    }
    let indices = shuffled_indices(d.len(), seed);
    let n_train = (spec.train_fraction * d.len() as f64).floor() as usize;
    let train = d.subset(&indices[..n_train]);
    let test = d.subset(&indices[n_train..]);
    Ok((train, test))
}

/// Partition indices into `k` folds, stratified by class when requested.
///
/// Stratification deals each class's shuffled members round-robin and rotates
/// the starting fold between classes so per-class remainders land on distinct
/// folds; per-fold class proportions match the global ones within one record.
pub fn stratified_folds(
    d: &Dataset,
    k: usize,
    seed: u64,
    stratified: bool,
) -> Result<Vec<Vec<usize>>, DataError> {
    if k < 2 {
        return Err(DataError::InvalidSplit(format!(
            "fold count must be at least 2, got {k}"
        )));
    }
    if k > d.len() {
        return Err(DataError::TooSmall(format!(
            "{k} folds requested but only {} records",
            d.len()
        )));
    }
    let mut folds: Vec<Vec<usize>> = vec![Vec::new(); k];
    if stratified {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut offset = 0usize;
        for class in [0u8, 1u8] {
            let mut members: Vec<usize> = (0..d.len())
                .filter(|&i| d.records[i].cardio == class)
                .collect();
            if members.is_empty() {
                continue;
            }
            if members.len() < k {
                return Err(DataError::Stratification(format!(
                    "class {class} has {} members, fewer than {k} folds",
                    members.len()
                )));
            }
            members.shuffle(&mut rng);
            for (j, idx) in members.iter().enumerate() {
                folds[(offset + j) % k].push(*idx);
            }
            offset = (offset + members.len()) % k;
        }
    } else {
        let indices = shuffled_indices(d.len(), seed);
        for (j, idx) in indices.into_iter().enumerate() {
            folds[j % k].push(idx);
        }
    }
    for fold in &mut folds {
        fold.sort_unstable();
    }
    Ok(folds)
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.source {
            Some(p) => write!(
                f,
                "{} ({} rows, {} duplicates removed)",
                p.display(),
                self.rows_before_dedup,
                self.duplicates_removed
            ),
            None => write!(
                f,
                "in-memory ({} rows, {} duplicates removed)",
                self.rows_before_dedup, self.duplicates_removed
            ),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_record() -> PatientRecord {
        PatientRecord {
            age: 18393,
            gender: 2,
            height: 168,
            weight: 62.0,
            ap_hi: 110,
            ap_lo: 80,
            cholesterol: 1,
            gluc: 1,
            smoke: 0,
            alco: 0,
            active: 1,
            cardio: 0,
        }
    }

    fn write_temp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f.flush().unwrap();
        f
    }

    const HEADER: &str = "id;age;gender;height;weight;ap_hi;ap_lo;cholesterol;gluc;smoke;alco;active;cardio";

    #[test]
    fn loads_kaggle_order_with_id() {
        let f = write_temp(&format!(
            "{HEADER}\n0;18393;2;168;62.0;110;80;1;1;0;0;1;0\n1;20228;1;156;85.0;140;90;3;1;0;0;1;1\n"
        ));
        let d = load_csv(f.path(), b';').unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d.records[0], sample_record());
        assert_eq!(d.records[1].cholesterol, 3);
        assert_eq!(d.records[1].cardio, 1);
    }

    #[test]
    fn loads_without_id_and_comma_delimited() {
        let f = write_temp(
            "age,gender,height,weight,ap_hi,ap_lo,cholesterol,gluc,smoke,alco,active,cardio\n18393,2,168,62.0,110,80,1,1,0,0,1,0\n",
        );
        let d = load_csv(f.path(), b',').unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d.records[0], sample_record());
    }

    #[test]
    fn loads_attribute_table_order() {
        let f = write_temp(
            "age;height;weight;gender;ap_hi;ap_lo;cholesterol;gluc;smoke;alco;active;cardio\n18393;168;62.0;2;110;80;1;1;0;0;1;0\n",
        );
        let d = load_csv(f.path(), b';').unwrap();
        assert_eq!(d.records[0], sample_record());
    }

    #[test]
    fn comment_lines_are_skipped_and_line_numbers_stay_physical() {
        let f = write_temp(&format!(
            "# run-config: prepare\n# seed: 1\n{HEADER}\n0;18393;2;168;62.0;110;80;1;1;0;0;1;0\n# interior note\n1;20228;1;156;85.0;140;90;3;1;0;0;1;1\n"
        ));
        let d = load_csv(f.path(), b';').unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d.records[0], sample_record());

        let f = write_temp(&format!(
            "# banner\n{HEADER}\n0;18393;2;168;62.0;110;80;9;1;0;0;1;0\n"
        ));
        let err = load_csv(f.path(), b';').unwrap_err();
        match err {
            DataError::MalformedRow { line, .. } => assert_eq!(line, 3),
            other => panic!("expected MalformedRow, got {other:?}"),
        }
    }

    #[test]
    fn empty_file_with_header_loads_zero_records() {
        let f = write_temp(&format!("{HEADER}\n"));
        let d = load_csv(f.path(), b';').unwrap();
        assert_eq!(d.len(), 0);
    }

    #[test]
    fn malformed_cholesterol_names_its_row() {
        let f = write_temp(&format!(
            "{HEADER}\n0;18393;2;168;62.0;110;80;1;1;0;0;1;0\n1;20228;1;156;85.0;140;90;7;1;0;0;1;1\n2;18857;1;165;64.0;130;70;3;1;0;0;0;1\n"
        ));
        let err = load_csv(f.path(), b';').unwrap_err();
        match err {
            DataError::MalformedRow { line, ref message, .. } => {
                // data row 2 sits on file line 3
                assert_eq!(line, 3);
                assert!(message.contains("cholesterol"), "message: {message}");
            }
            other => panic!("expected MalformedRow, got {other:?}"),
        }
    }

    #[test]
    fn wrong_field_count_and_non_numeric_are_load_errors() {
        let f = write_temp(&format!("{HEADER}\n0;18393;2;168;62.0;110;80;1;1;0;0;1\n"));
        assert!(matches!(
            load_csv(f.path(), b';'),
            Err(DataError::MalformedRow { line: 2, .. })
        ));
        let f = write_temp(&format!(
            "{HEADER}\n0;18393;2;168;sixty-two;110;80;1;1;0;0;1;0\n"
        ));
        let err = load_csv(f.path(), b';').unwrap_err();
        assert!(err.to_string().contains("weight"));
    }

    #[test]
    fn missing_value_is_a_load_error() {
        let f = write_temp(&format!("{HEADER}\n0;18393;2;168;;110;80;1;1;0;0;1;0\n"));
        let err = load_csv(f.path(), b';').unwrap_err();
        assert!(err.to_string().contains("missing value"));
    }

    #[test]
    fn csv_round_trip_is_field_exact() {
        let mut records = Vec::new();
        for i in 0..50 {
            let mut r = sample_record();
            r.age += 37 * i;
            r.weight = 45.0 + 0.5 * i as f64;
            r.cardio = (i % 2) as u8;
            records.push(r);
        }
        let d = Dataset::from_records(records);
        let mut buf = Vec::new();
        write_csv(&mut buf, &d, b';').unwrap();
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(&buf).unwrap();
        f.flush().unwrap();
        let back = load_csv(f.path(), b';').unwrap();
        assert_eq!(back.records, d.records);
    }

    #[test]
    fn dedup_keeps_first_occurrence_and_counts() {
        let a = sample_record();
        let mut b = sample_record();
        b.age += 1;
        let d = Dataset::from_records(vec![a, b, a, a, b]);
        let out = deduplicate(&d);
        assert_eq!(out.records, vec![a, b]);
        assert_eq!(out.provenance.duplicates_removed, 3);
        assert_eq!(out.provenance.rows_before_dedup, 5);
    }

    #[test]
    fn dedup_distinguishes_cardio_only_differences() {
        let a = sample_record();
        let mut b = sample_record();
        b.cardio = 1;
        let d = Dataset::from_records(vec![a, b]);
        assert_eq!(deduplicate(&d).len(), 2);
    }

    #[test]
    fn dedup_matches_pairwise_oracle_on_synthetic_injection() {
        // Brute-force O(n^2) oracle: a row is a duplicate iff an earlier row
        // equals it on every field.
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        use rand::Rng;
        let mut records = Vec::new();
        for _ in 0..1000 {
            if !records.is_empty() && rng.gen_bool(0.3) {
                let pick = rng.gen_range(0..records.len());
                records.push(records[pick]);
            } else {
                let mut r = sample_record();
                r.age = rng.gen_range(11000..23000);
                r.ap_hi = 100 + 10 * rng.gen_range(0..8);
                r.cardio = rng.gen_range(0..=1);
                records.push(r);
            }
        }
        let mut oracle_kept = Vec::new();
        for (i, r) in records.iter().enumerate() {
            if !records[..i].iter().any(|s| s == r) {
                oracle_kept.push(*r);
            }
        }
        let d = Dataset::from_records(records);
        let out = deduplicate(&d);
        assert_eq!(out.records, oracle_kept);
    }

    #[test]
    fn dedup_is_idempotent() {
        let a = sample_record();
        let mut b = sample_record();
        b.height += 4;
        let d = Dataset::from_records(vec![a, a, b]);
        let once = deduplicate(&d);
        let twice = deduplicate(&once);
        assert_eq!(once.records, twice.records);
        assert_eq!(twice.provenance.duplicates_removed, 0);
    }

    #[test]
    fn percentage_split_sizes_and_disjointness() {
        let mut records = Vec::new();
        for i in 0..10 {
            let mut r = sample_record();
            r.age += i;
            records.push(r);
        }
        let d = Dataset::from_records(records);
        let spec = SplitSpec::default();
        let (train, test) = percentage_split(&d, &spec, 42).unwrap();
        assert_eq!(train.len(), 6);
        assert_eq!(test.len(), 4);
        let mut all: Vec<i64> = train
            .records
            .iter()
            .chain(test.records.iter())
            .map(|r| r.age)
            .collect();
        all.sort_unstable();
        let mut expected: Vec<i64> = d.records.iter().map(|r| r.age).collect();
        expected.sort_unstable();
        assert_eq!(all, expected);
    }

    #[test]
    fn percentage_split_is_deterministic_per_seed() {
        let mut records = Vec::new();
        for i in 0..101 {
            let mut r = sample_record();
            r.age += i;
            records.push(r);
        }
        let d = Dataset::from_records(records);
        let spec = SplitSpec::default();
        let (tr1, te1) = percentage_split(&d, &spec, 9).unwrap();
        let (tr2, te2) = percentage_split(&d, &spec, 9).unwrap();
        assert_eq!(tr1.records, tr2.records);
        assert_eq!(te1.records, te2.records);
        let (tr3, _) = percentage_split(&d, &spec, 10).unwrap();
        assert_ne!(tr1.records, tr3.records);
    }

    #[test]
    fn percentage_split_rejects_tiny_datasets() {
        let d = Dataset::from_records(vec![sample_record()]);
        assert!(percentage_split(&d, &SplitSpec::default(), 1).is_err());
    }

    #[test]
    fn folds_partition_exactly_once_each() {
        // Exhaustive set-algebra check on 200 records: union = everything,
        // pairwise intersections empty.
        let mut records = Vec::new();
        for i in 0..200 {
            let mut r = sample_record();
            r.age += i;
            r.cardio = (i % 3 == 0) as u8;
            records.push(r);
        }
        let d = Dataset::from_records(records);
        let folds = stratified_folds(&d, 7, 3, true).unwrap();
        let mut seen = vec![0usize; 200];
        for fold in &folds {
            for &i in fold {
                seen[i] += 1;
            }
        }
        assert!(seen.iter().all(|&c| c == 1));
        for a in 0..folds.len() {
            for b in (a + 1)..folds.len() {
                let sa: HashSet<_> = folds[a].iter().collect();
                assert!(folds[b].iter().all(|i| !sa.contains(i)));
            }
        }
    }

    #[test]
    fn folds_balance_classes_within_one() {
        let mut records = Vec::new();
        for i in 0..20 {
            let mut r = sample_record();
            r.age += i;
            r.cardio = (i < 10) as u8;
            records.push(r);
        }
        let d = Dataset::from_records(records);
        let folds = stratified_folds(&d, 10, 5, true).unwrap();
        for fold in &folds {
            assert_eq!(fold.len(), 2);
            let ones = fold.iter().filter(|&&i| d.records[i].cardio == 1).count();
            assert_eq!(ones, 1);
        }
    }

    #[test]
    fn fold_sizes_match_remainder_rotation() {
        // 35004 + 34972 records in 10 folds must come out 6998 x6, 6997 x4.
        let mut records = Vec::new();
        for i in 0..35004i64 {
            let mut r = sample_record();
            r.age = 11000 + i;
            records.push(r);
        }
        for i in 0..34972i64 {
            let mut r = sample_record();
            r.age = 11000 + i;
            r.cardio = 1;
            records.push(r);
        }
        let d = Dataset::from_records(records);
        let folds = stratified_folds(&d, 10, 1, true).unwrap();
        let mut sizes: Vec<usize> = folds.iter().map(|f| f.len()).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![6997, 6997, 6997, 6997, 6998, 6998, 6998, 6998, 6998, 6998]);
    }

    #[test]
    fn stratification_errors_when_class_too_small() {
        let mut records = Vec::new();
        for i in 0..12 {
            let mut r = sample_record();
            r.age += i;
            r.cardio = (i == 0) as u8;
            records.push(r);
        }
        let d = Dataset::from_records(records);
        assert!(matches!(
            stratified_folds(&d, 3, 1, true),
            Err(DataError::Stratification(_))
        ));
        assert!(stratified_folds(&d, 3, 1, false).is_ok());
    }
}
