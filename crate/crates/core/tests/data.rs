use std::io::Write;

use proptest::prelude::*;
use treebench::data::*;
use treebench::*;

#[test]
fn load_and_binarize_mixed_csv() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    writeln!(file, "age,color,label").unwrap();
    for i in 0..20 {
        let color = ["red", "green", "blue"][i % 3];
        writeln!(file, "{},{},{}", i, color, if i < 10 { "no" } else { "yes" }).unwrap();
    }
    let raw = load_csv(file.path(), "label", None).unwrap();
    assert_eq!(raw.len(), 20);
    assert_eq!(raw.columns()[0].kind, ColumnKind::Numeric);
    assert_eq!(raw.columns()[1].kind, ColumnKind::Categorical);
    let b = binarize_fit(&raw, 4, 10).unwrap();
    let d = binarize_apply(&b, &raw).unwrap();
    assert_eq!(d.instance_count(), 20);
    assert_eq!(d.positives(), 10);
    // numeric thresholds plus one indicator per category
    let numeric = b
        .predicates()
        .iter()
        .filter(|p| matches!(p, Predicate::AtMost { .. }))
        .count();
    assert!((1..=4).contains(&numeric));
    assert_eq!(b.predicates().len() - numeric, 3);
    assert!(load_csv(file.path(), "missing", None).is_err());
}

#[test]
fn schema_overrides_kind() {
    let mut schema_file = tempfile::NamedTempFile::new().unwrap();
    writeln!(schema_file, "code,categorical").unwrap();
    let schema = load_schema(schema_file.path()).unwrap();
    let raw = read_csv("code,y\n1,a\n2,b\n1,b\n".as_bytes(), "y", Some(&schema)).unwrap();
    assert_eq!(raw.columns()[0].kind, ColumnKind::Categorical);
}

#[test]
fn bad_inputs_are_errors() {
    assert!(read_csv("x,y\n1,a\n2,a\n".as_bytes(), "y", None).is_err());
    assert!(read_csv("x,y\n1,a\n2\n".as_bytes(), "y", None).is_err());
    assert!(read_csv("x,y\n".as_bytes(), "y", None).is_err());
}

proptest! {
    #[test]
    fn folds_partition_and_stratify(
        labels in prop::collection::vec(any::<bool>(), 2..300),
        k in 2usize..12,
        seed in any::<u64>(),
    ) {
        let n = labels.len();
        prop_assume!(k <= n);
        let bits = Bitset::from_bools(&labels);
        let folds = stratified_kfold_labels(&bits, k, seed).unwrap();
        prop_assert_eq!(folds.len(), k);
        let mut seen = vec![0; n];
        for f in &folds {
            prop_assert_eq!(f.train.len() + f.validation.len(), n);
            for &i in &f.validation {
                seen[i] += 1;
            }
        }
        prop_assert!(seen.iter().all(|&c| c == 1));
        let sizes: Vec<usize> = folds.iter().map(|f| f.validation.len()).collect();
        prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
        let pos: Vec<usize> = folds.iter().map(|f| f.validation.iter().filter(|&&i| labels[i]).count()).collect();
        prop_assert!(pos.iter().max().unwrap() - pos.iter().min().unwrap() <= 1);
        prop_assert_eq!(stratified_kfold_labels(&bits, k, seed).unwrap(), folds);
    }

    #[test]
    fn quantile_binarization_is_monotone(values in prop::collection::vec(-100.0f64..100.0, 2..80), q in 1usize..12) {
        let n = values.len();
        let labels: Vec<u8> = (0..n).map(|i| (i % 2) as u8).collect();
        let matrix: Vec<Vec<f64>> = values.iter().map(|&v| vec![v]).collect();
        let raw = RawDataset::from_numeric(&["x".to_string()], &matrix, labels).unwrap();
        let b = binarize_fit(&raw, q, 1).unwrap();
        let d = binarize_apply(&b, &raw).unwrap();
        prop_assert!(d.feature_count() <= q);
        // each feature is a threshold test on x
        for (f, p) in b.predicates().iter().enumerate() {
            let Predicate::AtMost { threshold, .. } = p else { panic!("numeric") };
            for (i, v) in values.iter().enumerate() {
                prop_assert_eq!(d.feature(f).contains(i), *v <= *threshold);
            }
        }
    }
}
