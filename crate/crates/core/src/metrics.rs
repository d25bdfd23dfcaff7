//! Model scoring and experiment aggregation.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::data::BinaryDataset;
use crate::error::{Error, Result};
use crate::objectives::ln_choose;
use crate::tree::Tree;

/// Fraction of instances of `d` that `t` classifies correctly.
pub fn accuracy(t: &Tree, d: &BinaryDataset) -> Result<f64> {
    if d.instance_count() == 0 {
        return Err(Error::EmptyData);
    }
    let predicted = t.predict_dataset(d)?;
    let wrong = predicted
        .words()
        .iter()
        .zip(d.labels().words())
        .map(|(a, b)| (a ^ b).count_ones() as usize)
        .sum::<usize>();
    Ok(1.0 - wrong as f64 / d.instance_count() as f64)
}

/// Accuracy percentages, one row per dataset and one column per method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreMatrix {
    pub methods: Vec<String>,
    pub datasets: Vec<String>,
    pub scores: Vec<Vec<f64>>,
}

impl ScoreMatrix {
    pub fn new(methods: Vec<String>, datasets: Vec<String>, scores: Vec<Vec<f64>>) -> Result<Self> {
        if scores.len() != datasets.len() {
            return Err(Error::Metric(format!(
                "{} score rows for {} datasets",
                scores.len(),
                datasets.len()
            )));
        }
        if let Some((i, row)) = scores.iter().enumerate().find(|(_, r)| r.len() != methods.len()) {
            return Err(Error::Metric(format!(
                "row {i} has {} scores for {} methods",
                row.len(),
                methods.len()
            )));
        }
        if scores.iter().flatten().any(|s| !s.is_finite()) {
            return Err(Error::Metric("scores must be finite".into()));
        }
        Ok(ScoreMatrix {
            methods,
            datasets,
            scores,
        })
    }

    /// Reads `dataset,method1,method2,...` CSV with a header row.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(reader);
        let header = r.headers()?.clone();
        let methods: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
        let mut datasets = Vec::new();
        let mut scores = Vec::new();
        for (row, record) in r.records().enumerate() {
            let record = record?;
            datasets.push(record.get(0).unwrap_or_default().to_string());
            let values = record
                .iter()
                .skip(1)
                .map(|v| {
                    v.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::Metric(format!("row {}: `{v}` is not a score", row + 1)))
                })
                .collect::<Result<Vec<f64>>>()?;
            scores.push(values);
        }
        ScoreMatrix::new(methods, datasets, scores)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec!["dataset".to_string()];
        header.extend(self.methods.iter().cloned());
        w.write_record(&header)?;
        for (name, row) in self.datasets.iter().zip(&self.scores) {
            let mut record = vec![name.clone()];
            record.extend(row.iter().map(|s| s.to_string()));
            w.write_record(&record)?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }
}

/// Ranks of `scores` in descending order (1 = best); tied entries share the
/// mean of their positions.
pub fn rank_row(scores: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    let mut ranks = vec![0.0; scores.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && scores[order[j]] == scores[order[i]] {
            j += 1;
        }
        // positions i+1 ..= j
        let mean = (i + 1 + j) as f64 / 2.0;
        for &m in &order[i..j] {
            ranks[m] = mean;
        }
        i = j;
    }
    ranks
}

/// Mean rank per method after rounding each percentage to one decimal.
pub fn average_ranks(m: &ScoreMatrix) -> Result<Vec<f64>> {
    if m.methods.len() < 2 {
        return Err(Error::Metric("ranking needs at least two methods".into()));
    }
    if m.scores.is_empty() {
        return Err(Error::Metric("ranking needs at least one dataset".into()));
    }
    let mut sums = vec![0.0; m.methods.len()];
    for row in &m.scores {
        let rounded: Vec<f64> = row.iter().map(|s| (s * 10.0).round() / 10.0).collect();
        for (sum, r) in sums.iter_mut().zip(rank_row(&rounded)) {
            *sum += r;
        }
    }
    Ok(sums.into_iter().map(|s| s / m.scores.len() as f64).collect())
}

// Studentized range quantiles divided by √2, for k = 2..=20 methods.
const Q_05: [f64; 19] = [
    1.960, 2.343, 2.569, 2.728, 2.850, 2.949, 3.031, 3.102, 3.164, 3.219, 3.268, 3.313, 3.354, 3.391, 3.426, 3.458,
    3.489, 3.517, 3.544,
];
const Q_10: [f64; 19] = [
    1.645, 2.052, 2.291, 2.459, 2.589, 2.693, 2.780, 2.855, 2.920, 2.978, 3.030, 3.077, 3.120, 3.159, 3.196, 3.230,
    3.261, 3.291, 3.319,
];

/// Nemenyi critical difference of average ranks for `k` methods over `n`
/// datasets.
pub fn nemenyi_cd(k: usize, n: usize, alpha: f64) -> Result<f64> {
    if !(2..=20).contains(&k) {
        return Err(Error::Metric(format!("method count {k} outside 2..=20")));
    }
    if n < 2 {
        return Err(Error::Metric(format!("dataset count {n} must be >= 2")));
    }
    let table = if (alpha - 0.05).abs() < 1e-9 {
        &Q_05
    } else if (alpha - 0.10).abs() < 1e-9 {
        &Q_10
    } else {
        return Err(Error::Metric(format!("alpha {alpha} must be 0.05 or 0.10")));
    };
    let k_f = k as f64;
    Ok(table[k - 2] * (k_f * (k_f + 1.0) / (6.0 * n as f64)).sqrt())
}

/// True and false discovery rates of the split features of `trained`
/// relative to `truth`.
pub fn tdr_fdr(trained: &Tree, truth: &Tree) -> (f64, f64) {
    let s_trained = trained.split_features();
    let s_truth = truth.split_features();
    let hits = s_trained.intersection(&s_truth).count();
    let tdr = if s_truth.is_empty() {
        1.0
    } else {
        hits as f64 / s_truth.len() as f64
    };
    let fdr = if s_trained.is_empty() {
        0.0
    } else {
        (s_trained.len() - hits) as f64 / s_trained.len() as f64
    };
    (tdr, fdr)
}

/// Test accuracy per leaf count.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ParetoCurve {
    pub points: BTreeMap<usize, f64>,
}

impl ParetoCurve {
    pub fn new(points: BTreeMap<usize, f64>) -> Result<Self> {
        if points.contains_key(&0) {
            return Err(Error::Metric("leaf counts start at 1".into()));
        }
        Ok(ParetoCurve { points })
    }

    /// Builds a curve from `(leaves, accuracy)` runs, averaging runs that
    /// share a leaf count.
    pub fn from_runs(runs: &[(usize, f64)]) -> Result<Self> {
        let mut acc: BTreeMap<usize, (f64, usize)> = BTreeMap::new();
        for &(size, a) in runs {
            let e = acc.entry(size).or_insert((0.0, 0));
            e.0 += a;
            e.1 += 1;
        }
        ParetoCurve::new(acc.into_iter().map(|(s, (sum, c))| (s, sum / c as f64)).collect())
    }

    /// `acc_1..=acc_n` after interpolation, right extension and the
    /// monotone repair.
    pub fn profile(&self, n: usize) -> Result<Vec<f64>> {
        if n == 0 {
            return Err(Error::Metric("swa size bound must be >= 1".into()));
        }
        if self.points.is_empty() {
            return Err(Error::Metric("empty Pareto curve".into()));
        }
        if !self.points.contains_key(&1) {
            return Err(Error::Metric("size-1 anchor missing".into()));
        }
        let mut out = Vec::with_capacity(n);
        for i in 1..=n {
            let v = if let Some(&a) = self.points.get(&i) {
                a
            } else {
                let (&lo, &a_lo) = self.points.range(..i).next_back().expect("size-1 anchor present");
                match self.points.range(i + 1..).next() {
                    Some((&hi, &a_hi)) => a_lo + (a_hi - a_lo) * (i - lo) as f64 / (hi - lo) as f64,
                    None => a_lo,
                }
            };
            out.push(v);
        }
        for i in 1..out.len() {
            if out[i] < out[i - 1] {
                out[i] = out[i - 1];
            }
        }
        Ok(out)
    }
}

/// Size-weighted accuracy: the `1/i`-weighted mean of `acc_1..=acc_n`.
pub fn swa(curve: &ParetoCurve, n: usize) -> Result<f64> {
    let profile = curve.profile(n)?;
    let (num, den) = profile.iter().enumerate().fold((0.0, 0.0), |(num, den), (i, a)| {
        let w = 1.0 / (i + 1) as f64;
        (num + a * w, den + w)
    });
    Ok(num / den)
}

/// Outcome of a paired one-sided sign test of `a > b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignTest {
    pub wins: usize,
    pub losses: usize,
    pub ties: usize,
    /// `P(X ≥ wins)` for `X ~ Binomial(wins + losses, 1/2)`.
    pub p_value: f64,
}

pub fn sign_test(a: &[f64], b: &[f64]) -> Result<SignTest> {
    if a.len() != b.len() {
        return Err(Error::Metric(format!(
            "paired samples differ in length: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    let (mut wins, mut losses, mut ties) = (0, 0, 0);
    for (x, y) in a.iter().zip(b) {
        match x.partial_cmp(y) {
            Some(std::cmp::Ordering::Greater) => wins += 1,
            Some(std::cmp::Ordering::Less) => losses += 1,
            _ => ties += 1,
        }
    }
    let m = wins + losses;
    let p_value = if m == 0 {
        1.0
    } else {
        let ln_half = -(m as f64) * std::f64::consts::LN_2;
        (wins..=m)
            .map(|j| (ln_choose(m, j) + ln_half).exp())
            .sum::<f64>()
            .min(1.0)
    };
    Ok(SignTest {
        wins,
        losses,
        ties,
        p_value,
    })
}
