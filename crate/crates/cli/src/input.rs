use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use treebench::data::{binarize_apply_aligned, load_csv, load_schema, Schema};
use treebench::{Binarizer, BinaryDataset, RawDataset};

use crate::args::{BinarizeOptions, DataArgs};

/// Train and optional test sets over one binary feature space.
pub struct Loaded {
    pub train: BinaryDataset,
    pub test: Option<BinaryDataset>,
    /// `None` when the input was already 0/1.
    pub binarizer: Option<Binarizer>,
}

pub fn read_raw(path: &Path, label: &str, schema: Option<&Schema>) -> Result<RawDataset> {
    load_csv(path, label, schema).with_context(|| format!("loading {}", path.display()))
}

pub fn load(data: &DataArgs, opts: &BinarizeOptions) -> Result<Loaded> {
    let schema = data.schema.as_deref().map(load_schema).transpose()?;
    let train_raw = read_raw(&data.data, &data.label, schema.as_ref())?;
    let test_raw = data
        .test
        .as_deref()
        .map(|p| read_raw(p, &data.label, schema.as_ref()))
        .transpose()?;
    prepare(&train_raw, test_raw.as_ref(), opts)
}

/// Uses 0/1 data as is and binarizes anything else at training thresholds.
pub fn prepare(train_raw: &RawDataset, test_raw: Option<&RawDataset>, opts: &BinarizeOptions) -> Result<Loaded> {
    if let Some(train) = BinaryDataset::from_raw_binary(train_raw) {
        let test = match test_raw {
            None => None,
            Some(t) => match BinaryDataset::from_raw_binary(t) {
                Some(t) if t.feature_names() == train.feature_names() => Some(t),
                Some(_) => bail!("test columns differ from training columns"),
                None => bail!("training data is 0/1 but test data is not"),
            },
        };
        return Ok(Loaded {
            train,
            test,
            binarizer: None,
        });
    }
    let binarizer = opts
        .numeric_mode
        .fit_binarizer(train_raw, opts.quantiles, opts.max_categories)?;
    let train = treebench::data::binarize_apply(&binarizer, train_raw)?;
    let test = test_raw
        .map(|t| binarize_apply_aligned(&binarizer, t, &train))
        .transpose()?;
    Ok(Loaded {
        train,
        test,
        binarizer: Some(binarizer),
    })
}

pub fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

pub fn write_file(path: &Path, contents: &[u8]) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

pub fn write_binary_csv(path: &Path, d: &BinaryDataset, label: &str) -> Result<()> {
    let mut buf = Vec::new();
    d.write_csv(&mut buf, label)?;
    write_file(path, &buf)
}

pub fn write_raw_csv(path: &Path, raw: &RawDataset, label: &str) -> Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = raw.columns().iter().map(|c| c.name.clone()).collect();
    header.push(label.to_string());
    w.write_record(&header)?;
    for (row, y) in raw.rows().iter().zip(raw.labels()) {
        let mut record: Vec<String> = row.iter().map(ToString::to_string).collect();
        record.push(y.to_string());
        w.write_record(&record)?;
    }
    let buf = w.into_inner().context("flushing csv")?;
    write_file(path, &buf)
}
