//! Raw tabular data, binarization into predicate bitsets, and stratified
//! cross-validation splits.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bitset::Bitset;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnKind {
    Numeric,
    Categorical,
}

impl std::str::FromStr for ColumnKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "numeric" => Ok(ColumnKind::Numeric),
            "categorical" => Ok(ColumnKind::Categorical),
            other => Err(Error::InvalidParameter(format!("unknown column kind `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub kind: ColumnKind,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Num(f64),
    Cat(String),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Num(v) => write!(f, "{v}"),
            Value::Cat(s) => f.write_str(s),
        }
    }
}

/// Feature columns plus 0/1 labels, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct RawDataset {
    columns: Vec<Column>,
    rows: Vec<Vec<Value>>,
    labels: Vec<u8>,
    /// Original label strings for 0 and 1, when loaded from text.
    label_values: Option<[String; 2]>,
}

impl RawDataset {
    pub fn new(columns: Vec<Column>, rows: Vec<Vec<Value>>, labels: Vec<u8>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::EmptyData);
        }
        if rows.len() != labels.len() {
            return Err(Error::SchemaMismatch(format!(
                "{} rows but {} labels",
                rows.len(),
                labels.len()
            )));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != columns.len() {
                return Err(Error::RaggedRow {
                    row: i,
                    expected: columns.len(),
                    found: row.len(),
                });
            }
            for (value, column) in row.iter().zip(&columns) {
                let ok = matches!(
                    (value, column.kind),
                    (Value::Num(_), ColumnKind::Numeric) | (Value::Cat(_), ColumnKind::Categorical)
                );
                if !ok {
                    return Err(Error::SchemaMismatch(format!(
                        "row {i}: value `{value}` does not match kind of column `{}`",
                        column.name
                    )));
                }
            }
        }
        if let Some(bad) = labels.iter().find(|&&l| l > 1) {
            return Err(Error::InvalidParameter(format!("label {bad} is not 0 or 1")));
        }
        Ok(RawDataset {
            columns,
            rows,
            labels,
            label_values: None,
        })
    }

    /// All-numeric dataset from a row-major matrix.
    pub fn from_numeric(names: &[String], matrix: &[Vec<f64>], labels: Vec<u8>) -> Result<Self> {
        let columns = names
            .iter()
            .map(|n| Column {
                name: n.clone(),
                kind: ColumnKind::Numeric,
            })
            .collect();
        let rows = matrix
            .iter()
            .map(|r| r.iter().map(|&v| Value::Num(v)).collect())
            .collect();
        RawDataset::new(columns, rows, labels)
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<Value>] {
        &self.rows
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn label_values(&self) -> Option<&[String; 2]> {
        self.label_values.as_ref()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn select(&self, indices: &[usize]) -> RawDataset {
        RawDataset {
            columns: self.columns.clone(),
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            label_values: self.label_values.clone(),
        }
    }

    fn numeric_column(&self, c: usize) -> Vec<f64> {
        self.rows
            .iter()
            .map(|r| match &r[c] {
                Value::Num(v) => *v,
                Value::Cat(_) => unreachable!("column kind checked at construction"),
            })
            .collect()
    }

    fn categorical_column(&self, c: usize) -> Vec<&str> {
        self.rows
            .iter()
            .map(|r| match &r[c] {
                Value::Cat(s) => s.as_str(),
                Value::Num(_) => unreachable!("column kind checked at construction"),
            })
            .collect()
    }
}

/// Column-kind overrides, one `name,kind` line per column.
pub type Schema = HashMap<String, ColumnKind>;

pub fn load_schema(path: &Path) -> Result<Schema> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut schema = Schema::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (name, kind) = line.split_once(',').ok_or_else(|| Error::InvalidSchema {
            line: i + 1,
            reason: "expected `name,kind`".into(),
        })?;
        let kind = kind.parse().map_err(|_| Error::InvalidSchema {
            line: i + 1,
            reason: format!("unknown kind `{}`", kind.trim()),
        })?;
        schema.insert(name.trim().to_string(), kind);
    }
    Ok(schema)
}

/// Reads a headered CSV. Labels are mapped to 0/1 by lexicographic order of
/// the two raw label strings.
pub fn load_csv(path: &Path, label_column: &str, schema: Option<&Schema>) -> Result<RawDataset> {
    let file = fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_csv(file, label_column, schema)
}

pub fn read_csv<R: std::io::Read>(reader: R, label_column: &str, schema: Option<&Schema>) -> Result<RawDataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let label_idx = header
        .iter()
        .position(|h| h == label_column)
        .ok_or_else(|| Error::MissingLabelColumn(label_column.to_string()))?;

    let mut cells: Vec<Vec<String>> = Vec::new();
    for (row, record) in rdr.records().enumerate() {
        let record = record?;
        if record.len() != header.len() {
            return Err(Error::RaggedRow {
                row,
                expected: header.len(),
                found: record.len(),
            });
        }
        cells.push(record.iter().map(str::to_string).collect());
    }
    if cells.is_empty() {
        return Err(Error::EmptyData);
    }

    let distinct: std::collections::BTreeSet<&str> = cells.iter().map(|r| r[label_idx].as_str()).collect();
    // a single class is accepted when it is already written as 0 or 1
    let label_values: Vec<String> = match distinct.len() {
        2 => distinct.iter().map(|s| s.to_string()).collect(),
        1 if distinct.contains("0") || distinct.contains("1") => vec!["0".into(), "1".into()],
        k => return Err(Error::LabelCardinality(k)),
    };
    let labels: Vec<u8> = cells
        .iter()
        .map(|r| u8::from(r[label_idx] == label_values[1]))
        .collect();

    let feature_idx: Vec<usize> = (0..header.len()).filter(|&i| i != label_idx).collect();
    let mut columns = Vec::with_capacity(feature_idx.len());
    for &c in &feature_idx {
        let name = &header[c];
        for (row, r) in cells.iter().enumerate() {
            if r[c].is_empty() {
                return Err(Error::MissingValue {
                    column: name.clone(),
                    row,
                });
            }
        }
        let kind = match schema.and_then(|s| s.get(name)) {
            Some(&kind) => kind,
            None => infer_kind(name, cells.iter().map(|r| r[c].as_str()))?,
        };
        columns.push(Column {
            name: name.clone(),
            kind,
        });
    }

    let mut rows = Vec::with_capacity(cells.len());
    for r in &cells {
        let mut row = Vec::with_capacity(feature_idx.len());
        for (column, &c) in columns.iter().zip(&feature_idx) {
            row.push(match column.kind {
                ColumnKind::Numeric => Value::Num(parse_number(&r[c]).ok_or_else(|| Error::MixedColumn {
                    column: column.name.clone(),
                    value: r[c].clone(),
                })?),
                ColumnKind::Categorical => Value::Cat(r[c].clone()),
            });
        }
        rows.push(row);
    }

    let mut raw = RawDataset::new(columns, rows, labels)?;
    raw.label_values = Some([label_values[0].clone(), label_values[1].clone()]);
    Ok(raw)
}

fn parse_number(s: &str) -> Option<f64> {
    s.parse::<f64>().ok().filter(|v| v.is_finite())
}

// All numeric → numeric; none numeric → categorical; a mix is an error.
fn infer_kind<'a>(name: &str, values: impl Iterator<Item = &'a str>) -> Result<ColumnKind> {
    let mut numeric = 0usize;
    let mut first_text: Option<&str> = None;
    for v in values {
        if parse_number(v).is_some() {
            numeric += 1;
        } else if first_text.is_none() {
            first_text = Some(v);
        }
    }
    match (numeric, first_text) {
        (_, None) => Ok(ColumnKind::Numeric),
        (0, Some(_)) => Ok(ColumnKind::Categorical),
        (_, Some(text)) => Err(Error::MixedColumn {
            column: name.to_string(),
            value: text.to_string(),
        }),
    }
}

/// One binary predicate over a raw column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Predicate {
    /// `value ≤ threshold`
    AtMost { column: usize, threshold: f64 },
    /// `value = category`
    Equals { column: usize, category: String },
}

impl Predicate {
    fn name(&self, columns: &[Column]) -> String {
        match self {
            Predicate::AtMost { column, threshold } => {
                format!("{}<={}", columns[*column].name, threshold)
            }
            Predicate::Equals { column, category } => {
                format!("{}=={}", columns[*column].name, category)
            }
        }
    }

    fn eval(&self, row: &[Value]) -> bool {
        match (self, row.get(self.column())) {
            (Predicate::AtMost { threshold, .. }, Some(Value::Num(v))) => v <= threshold,
            (Predicate::Equals { category, .. }, Some(Value::Cat(s))) => s == category,
            _ => false,
        }
    }

    pub fn column(&self) -> usize {
        match self {
            Predicate::AtMost { column, .. } | Predicate::Equals { column, .. } => *column,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ColumnRule {
    Numeric { thresholds: Vec<f64> },
    Categorical { categories: Vec<String> },
}

/// Fitted binarization: thresholds per numeric column, retained categories
/// per categorical column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Binarizer {
    columns: Vec<Column>,
    rules: Vec<ColumnRule>,
}

impl Binarizer {
    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn rules(&self) -> &[ColumnRule] {
        &self.rules
    }

    /// Every predicate in deterministic order: column order, then threshold or
    /// category order.
    pub fn predicates(&self) -> Vec<Predicate> {
        let mut out = Vec::new();
        for (column, rule) in self.rules.iter().enumerate() {
            match rule {
                ColumnRule::Numeric { thresholds } => out.extend(
                    thresholds
                        .iter()
                        .map(|&threshold| Predicate::AtMost { column, threshold }),
                ),
                ColumnRule::Categorical { categories } => out.extend(categories.iter().map(|c| Predicate::Equals {
                    column,
                    category: c.clone(),
                })),
            }
        }
        out
    }

    pub fn predicate_names(&self) -> Vec<String> {
        self.predicates().iter().map(|p| p.name(&self.columns)).collect()
    }

    /// Thresholds at every midpoint between consecutive distinct values and
    /// every retained category. Used for unmodified CART on raw columns.
    pub fn fit_exhaustive(raw: &RawDataset, max_categories: usize) -> Result<Binarizer> {
        if max_categories == 0 {
            return Err(Error::InvalidParameter("max_categories must be >= 1".into()));
        }
        let rules = raw
            .columns
            .iter()
            .enumerate()
            .map(|(c, column)| match column.kind {
                ColumnKind::Numeric => {
                    let mut v = raw.numeric_column(c);
                    v.sort_by(f64::total_cmp);
                    v.dedup();
                    let thresholds = v.windows(2).map(|w| w[0] + (w[1] - w[0]) / 2.0).collect();
                    ColumnRule::Numeric { thresholds }
                }
                ColumnKind::Categorical => ColumnRule::Categorical {
                    categories: top_categories(&raw.categorical_column(c), max_categories),
                },
            })
            .collect();
        Ok(Binarizer {
            columns: raw.columns.clone(),
            rules,
        })
    }

    fn check_schema(&self, raw: &RawDataset) -> Result<()> {
        if raw.columns != self.columns {
            return Err(Error::SchemaMismatch(format!(
                "binarizer fitted on columns {:?}, data has {:?}",
                self.columns.iter().map(|c| &c.name).collect::<Vec<_>>(),
                raw.columns.iter().map(|c| &c.name).collect::<Vec<_>>()
            )));
        }
        Ok(())
    }

    fn evaluate(&self, raw: &RawDataset, predicates: &[Predicate]) -> Vec<Bitset> {
        predicates
            .iter()
            .map(|p| {
                let bits: Vec<bool> = raw.rows.iter().map(|row| p.eval(row)).collect();
                Bitset::from_bools(&bits)
            })
            .collect()
    }
}

/// Quantile thresholds for numeric columns and one-hot categories.
///
/// Thresholds sit at levels `i/(q+1)`, `i = 1..q`, of the empirical
/// distribution using the nearest-rank estimator; duplicates and thresholds
/// that hold for every fitted value are removed.
pub fn binarize_fit(raw: &RawDataset, quantile_count: usize, max_categories: usize) -> Result<Binarizer> {
    if quantile_count == 0 {
        return Err(Error::InvalidParameter("quantile_count must be >= 1".into()));
    }
    if max_categories == 0 {
        return Err(Error::InvalidParameter("max_categories must be >= 1".into()));
    }
    let rules = raw
        .columns
        .iter()
        .enumerate()
        .map(|(c, column)| match column.kind {
            ColumnKind::Numeric => ColumnRule::Numeric {
                thresholds: quantile_thresholds(&raw.numeric_column(c), quantile_count),
            },
            ColumnKind::Categorical => ColumnRule::Categorical {
                categories: top_categories(&raw.categorical_column(c), max_categories),
            },
        })
        .collect();
    Ok(Binarizer {
        columns: raw.columns.clone(),
        rules,
    })
}

pub(crate) fn quantile_thresholds(values: &[f64], quantile_count: usize) -> Vec<f64> {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let Some(&max) = sorted.last() else {
        return Vec::new();
    };
    let q = quantile_count;
    let mut out: Vec<f64> = Vec::with_capacity(q);
    for i in 1..=q {
        // nearest rank: ⌈i·n/(q+1)⌉, 1-based
        let rank = (i * n).div_ceil(q + 1).max(1);
        let t = sorted[rank - 1];
        if t < max && out.last().is_none_or(|&last| t > last) {
            out.push(t);
        }
    }
    out
}

fn top_categories(values: &[&str], max_categories: usize) -> Vec<String> {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for v in values {
        *counts.entry(v).or_default() += 1;
    }
    let mut ranked: Vec<(&str, usize)> = counts.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    ranked
        .into_iter()
        .take(max_categories)
        .map(|(v, _)| v.to_string())
        .collect()
}

/// Applies `b` to `raw`, dropping predicates that are constant on `raw`.
pub fn binarize_apply(b: &Binarizer, raw: &RawDataset) -> Result<BinaryDataset> {
    b.check_schema(raw)?;
    let predicates = b.predicates();
    let names: Vec<String> = predicates.iter().map(|p| p.name(&b.columns)).collect();
    let n = raw.len();
    let mut features = Vec::new();
    let mut kept_names = Vec::new();
    for (bits, name) in b.evaluate(raw, &predicates).into_iter().zip(names) {
        let ones = bits.count_ones();
        if ones != 0 && ones != n {
            features.push(bits);
            kept_names.push(name);
        }
    }
    BinaryDataset::new(features, labels_bitset(raw), kept_names)
}

/// Applies `b` to `raw` producing exactly the features of `reference`, in
/// the same order, constant columns included. This is how held-out data is
/// binarized so that feature ids agree with the training set.
pub fn binarize_apply_aligned(b: &Binarizer, raw: &RawDataset, reference: &BinaryDataset) -> Result<BinaryDataset> {
    b.check_schema(raw)?;
    let predicates = b.predicates();
    let by_name: HashMap<String, &Predicate> = predicates.iter().map(|p| (p.name(&b.columns), p)).collect();
    let mut selected = Vec::with_capacity(reference.feature_count());
    for name in reference.feature_names() {
        let p = by_name
            .get(name)
            .ok_or_else(|| Error::SchemaMismatch(format!("feature `{name}` is not produced by this binarizer")))?;
        selected.push((*p).clone());
    }
    let features = b.evaluate(raw, &selected);
    BinaryDataset::new(features, labels_bitset(raw), reference.feature_names().to_vec())
}

fn labels_bitset(raw: &RawDataset) -> Bitset {
    let bits: Vec<bool> = raw.labels.iter().map(|&l| l == 1).collect();
    Bitset::from_bools(&bits)
}

/// Feature-major bit matrix of binary predicates plus binary labels.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryDataset {
    features: Vec<Bitset>,
    labels: Bitset,
    feature_names: Vec<String>,
}

impl BinaryDataset {
    pub fn new(features: Vec<Bitset>, labels: Bitset, feature_names: Vec<String>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::EmptyData);
        }
        if features.len() != feature_names.len() {
            return Err(Error::SchemaMismatch(format!(
                "{} features but {} names",
                features.len(),
                feature_names.len()
            )));
        }
        if let Some(f) = features.iter().position(|f| f.len() != labels.len()) {
            return Err(Error::SchemaMismatch(format!(
                "feature {f} has {} bits, expected {}",
                features[f].len(),
                labels.len()
            )));
        }
        Ok(BinaryDataset {
            features,
            labels,
            feature_names,
        })
    }

    /// Takes a raw dataset whose columns are all numeric 0/1 as is, one
    /// feature per column. `None` if any cell is something else.
    pub fn from_raw_binary(raw: &RawDataset) -> Option<BinaryDataset> {
        if raw.columns().iter().any(|c| c.kind != ColumnKind::Numeric) {
            return None;
        }
        let mut features = vec![Bitset::zeros(raw.len()); raw.columns().len()];
        for (i, row) in raw.rows().iter().enumerate() {
            for (f, v) in row.iter().enumerate() {
                match v {
                    Value::Num(x) if *x == 1.0 => features[f].insert(i),
                    Value::Num(x) if *x == 0.0 => {}
                    _ => return None,
                }
            }
        }
        let labels = Bitset::from_indices(raw.len(), (0..raw.len()).filter(|&i| raw.labels()[i] == 1));
        let names = raw.columns().iter().map(|c| c.name.clone()).collect();
        BinaryDataset::new(features, labels, names).ok()
    }

    /// Writes `0`/`1` cells under the feature names plus a trailing label
    /// column.
    pub fn write_csv<W: std::io::Write>(&self, writer: W, label_column: &str) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header: Vec<&str> = self.feature_names.iter().map(String::as_str).collect();
        header.push(label_column);
        w.write_record(&header)?;
        for i in 0..self.instance_count() {
            let mut record: Vec<&str> = self
                .features
                .iter()
                .map(|f| if f.contains(i) { "1" } else { "0" })
                .collect();
            record.push(if self.labels.contains(i) { "1" } else { "0" });
            w.write_record(&record)?;
        }
        w.flush().map_err(|e| Error::Csv(e.into()))?;
        Ok(())
    }

    /// Row-major constructor, mostly for fixtures. Features are named `f0..`.
    pub fn from_rows(rows: &[Vec<bool>], labels: &[bool]) -> Result<Self> {
        if rows.len() != labels.len() {
            return Err(Error::SchemaMismatch(format!(
                "{} rows but {} labels",
                rows.len(),
                labels.len()
            )));
        }
        let p = rows.first().map_or(0, Vec::len);
        if let Some(i) = rows.iter().position(|r| r.len() != p) {
            return Err(Error::RaggedRow {
                row: i,
                expected: p,
                found: rows[i].len(),
            });
        }
        let features = (0..p)
            .map(|f| Bitset::from_bools(&rows.iter().map(|r| r[f]).collect::<Vec<_>>()))
            .collect();
        let names = (0..p).map(|f| format!("f{f}")).collect();
        BinaryDataset::new(features, Bitset::from_bools(labels), names)
    }

    #[inline]
    pub fn feature_count(&self) -> usize {
        self.features.len()
    }

    #[inline]
    pub fn instance_count(&self) -> usize {
        self.labels.len()
    }

    #[inline]
    pub fn feature(&self, f: usize) -> &Bitset {
        &self.features[f]
    }

    pub fn features(&self) -> &[Bitset] {
        &self.features
    }

    #[inline]
    pub fn labels(&self) -> &Bitset {
        &self.labels
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn positives(&self) -> usize {
        self.labels.count_ones()
    }

    pub fn label(&self, i: usize) -> u8 {
        u8::from(self.labels.contains(i))
    }

    /// Fraction of instances in the larger class.
    pub fn majority_fraction(&self) -> f64 {
        let p = self.positives();
        p.max(self.instance_count() - p) as f64 / self.instance_count() as f64
    }

    pub fn instance(&self, i: usize) -> Vec<bool> {
        self.features.iter().map(|f| f.contains(i)).collect()
    }

    /// Rows at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Result<BinaryDataset> {
        BinaryDataset::new(
            self.features.iter().map(|f| f.select(indices)).collect(),
            self.labels.select(indices),
            self.feature_names.clone(),
        )
    }

    /// Same instances with replaced labels.
    pub fn with_labels(&self, labels: Bitset) -> Result<BinaryDataset> {
        BinaryDataset::new(self.features.clone(), labels, self.feature_names.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fold {
    pub train: Vec<usize>,
    pub validation: Vec<usize>,
}

/// Stratified k-fold over a binary dataset.
pub fn stratified_kfold(d: &BinaryDataset, k: usize, seed: u64) -> Result<Vec<Fold>> {
    stratified_kfold_labels(d.labels(), k, seed)
}

/// Shuffles each class with the seeded generator and deals its members
/// round-robin into folds, continuing the dealing position across classes.
/// Fold sizes and per-class counts then differ by at most one.
pub fn stratified_kfold_labels(labels: &Bitset, k: usize, seed: u64) -> Result<Vec<Fold>> {
    let n = labels.len();
    if k < 2 || k > n {
        return Err(Error::InvalidParameter(format!("fold count {k} outside [2, {n}]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); k];
    let mut next = 0usize;
    for class in [false, true] {
        let mut idx: Vec<usize> = (0..n).filter(|&i| labels.contains(i) == class).collect();
        idx.shuffle(&mut rng);
        for i in idx {
            members[next].push(i);
            next = (next + 1) % k;
        }
    }
    let folds = members
        .into_iter()
        .map(|mut validation| {
            validation.sort_unstable();
            let held: HashSet<usize> = validation.iter().copied().collect();
            let train = (0..n).filter(|i| !held.contains(i)).collect();
            Fold { train, validation }
        })
        .collect();
    Ok(folds)
}
