use proptest::prelude::*;
use tweakboost::data::{read_csv, split_indices};
use tweakboost::demo::random_tabular;
use tweakboost::{load_csv, split, Dataset, LabelMap, Sign};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn csv_roundtrip_is_lossless(rows in 4usize..60, features in 1usize..6, seed in any::<u64>()) {
        let ds = random_tabular::<f64>(rows, features, seed);
        let mut buf = Vec::new();
        ds.write_csv(&mut buf, "label").unwrap();
        let back: Dataset<f64> = read_csv(buf.as_slice(), "label", &LabelMap::numeric()).unwrap();
        prop_assert_eq!(back, ds);
    }

    #[test]
    fn train_stats_ignore_test_rows(rows in 20usize..80, seed in any::<u64>(), frac in 0.3f64..0.8) {
        let ds = random_tabular::<f64>(rows, 3, seed);
        let Ok((train, _)) = split(&ds, frac, seed) else { return Ok(()) };
        let (train_idx, test_idx) = split_indices(ds.len(), frac, seed).unwrap();

        // Scramble every test row and split again: training stats must not move.
        let mut mutated: Vec<Vec<f64>> = ds.rows().to_vec();
        for &i in &test_idx {
            mutated[i] = mutated[i].iter().map(|v| v * 100.0 + 7.0).collect();
        }
        let other = Dataset::new(ds.feature_names(), mutated, ds.labels().to_vec()).unwrap();
        let (train2, test2) = split(&other, frac, seed).unwrap();
        prop_assert_eq!(train.schema(), train2.schema());
        prop_assert_eq!(test2.schema(), train2.schema());
        prop_assert_eq!(train.len(), train_idx.len());

        // Independent population statistics over the training indices.
        for f in 0..3 {
            let col: Vec<f64> = train_idx.iter().map(|&i| ds.rows()[i][f]).collect();
            let n = col.len() as f64;
            let mean = col.iter().sum::<f64>() / n;
            let sd = (col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
            prop_assert!((train.schema()[f].mean - mean).abs() <= 1e-9 * (1.0 + mean.abs()));
            prop_assert!((train.schema()[f].stddev - sd).abs() <= 1e-9 * (1.0 + sd));
        }
    }
}

#[test]
fn file_roundtrip_through_disk() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.csv");
    let ds = Dataset::new(
        vec!["a".into(), "b".into()],
        vec![vec![0.1, -3.0], vec![1e-7, 2.5], vec![123456.789, 0.0]],
        vec![Sign::Positive, Sign::Negative, Sign::Positive],
    )
    .unwrap();
    ds.write_csv(std::fs::File::create(&path).unwrap(), "y").unwrap();
    let back: Dataset<f64> = load_csv(&path, "y", &LabelMap::numeric()).unwrap();
    assert_eq!(back, ds);
}

#[test]
fn label_names_may_contain_equals_signs() {
    let map = LabelMap::parse(">50K=+1,<=50K=-1").unwrap();
    assert_eq!(map.get(">50K"), Some(Sign::Positive));
    assert_eq!(map.get("<=50K"), Some(Sign::Negative));
}
