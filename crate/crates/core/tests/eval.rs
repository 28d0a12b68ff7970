use featsel::dataset::*;
use featsel::eval::*;
use featsel::forest::ForestSpec;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Counts concordant pairs directly, ties as half.
fn brute_force_auc(scores: &[f64], labels: &[bool]) -> f64 {
    let (mut num, mut pairs) = (0.0, 0.0);
    for (i, &si) in scores.iter().enumerate() {
        if !labels[i] {
            continue;
        }
        for (j, &sj) in scores.iter().enumerate() {
            if labels[j] {
                continue;
            }
            pairs += 1.0;
            if si > sj {
                num += 1.0;
            } else if si == sj {
                num += 0.5;
            }
        }
    }
    num / pairs
}

fn random_pairs(n: usize, seed: u64, levels: u32) -> (Vec<f64>, Vec<bool>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut labels: Vec<bool> = (0..n).map(|_| rng.random()).collect();
    labels[0] = true;
    labels[1] = false;
    let scores = (0..n).map(|_| f64::from(rng.random_range(0..levels)) / 7.0).collect();
    (scores, labels)
}

#[test]
fn auc_examples() {
    let r = auc(&[0.9, 0.8, 0.2, 0.1], &[true, true, false, false]).unwrap();
    assert_eq!(r.value, 1.0);
    assert_eq!((r.positives, r.negatives), (2, 2));
    assert_eq!(auc(&[0.3; 6], &[true, false, true, false, false, true]).unwrap().value, 0.5);
    assert!(auc(&[0.1, 0.2], &[true, true]).is_err());
}

#[test]
fn auc_matches_pair_counting_oracle() {
    for seed in 0..100 {
        let (s, l) = random_pairs(200, seed, if seed % 2 == 0 { 15 } else { 100_000 });
        let got = auc(&s, &l).unwrap().value;
        assert!((got - brute_force_auc(&s, &l)).abs() < 1e-12, "seed {seed}");
    }
}

proptest! {
    #[test]
    fn negated_scores_complement(seed in 0u64..10_000, n in 2usize..80) {
        let (s, l) = random_pairs(n, seed, 9);
        let neg: Vec<f64> = s.iter().map(|v| -v).collect();
        let total = auc(&s, &l).unwrap().value + auc(&neg, &l).unwrap().value;
        prop_assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn increasing_transform_invariance(seed in 0u64..10_000, n in 2usize..80) {
        let (s, l) = random_pairs(n, seed, 9);
        let t: Vec<f64> = s.iter().map(|v| (3.0 * v).exp() + v * v * v).collect();
        prop_assert_eq!(auc(&s, &l).unwrap().value, auc(&t, &l).unwrap().value);
    }
}

fn small_benchmark_data(seed: u64) -> Dataset {
    let s = synthesize(&SynthSpec::hotspot_like(400, seed)).unwrap();
    let h = label_hotspots(s.dataset.target(), 90.0).unwrap();
    minmax_scale(&s.dataset.with_target(h.target).unwrap()).unwrap()
}

fn small_spec(seed: u64) -> ForestSpec {
    ForestSpec {
        n_trees: 25,
        ..ForestSpec::with_seed(seed)
    }
}

#[test]
fn pearson_only_report_has_two_rows() {
    let d = small_benchmark_data(1);
    let sp = split(&d, 0.25, 1).unwrap();
    let r = run_benchmark(&d, &sp, &[Method::Pearson], &small_spec(1), &MethodParams::default()).unwrap();
    assert_eq!(r.rows.len(), 2);
    assert_eq!(r.rows[0].method, BASELINE);
    assert_eq!(r.rows[1].method, "pearson");
    for row in &r.rows {
        assert_eq!(row.cells.len(), 34);
        for v in [row.train_auc.unwrap(), row.validation_auc.unwrap()] {
            assert!((0.0..=1.0).contains(&v));
        }
    }
    assert_eq!(r.metadata.n_validation, 100);
    assert!(emit_report(&r, ReportFormat::Markdown).contains("| Feature | pearson |"));
}

#[test]
fn empty_selection_gives_degenerate_row() {
    let d = small_benchmark_data(2);
    let sp = split(&d, 0.25, 2).unwrap();
    // A z threshold nothing can pass.
    let params = MethodParams {
        pearson_z: 1e9,
        ..MethodParams::default()
    };
    let r = run_benchmark(&d, &sp, &[Method::Pearson, Method::Lasso], &small_spec(2), &params).unwrap();
    let p = r.row("pearson").unwrap();
    assert!(p.is_degenerate());
    assert_eq!((p.train_auc, p.validation_auc), (None, None));
    assert!(!r.row("lasso").unwrap().is_degenerate());
    assert!(r.to_markdown().contains("| pearson | 0 | n/a | n/a |"));
}

#[test]
fn unscaled_data_is_rejected() {
    let s = synthesize(&SynthSpec::hotspot_like(100, 3)).unwrap();
    let h = label_hotspots(s.dataset.target(), 90.0).unwrap();
    let d = s.dataset.with_target(h.target).unwrap();
    let sp = split(&d, 0.25, 3).unwrap();
    assert!(run_benchmark(&d, &sp, &[Method::Pearson], &small_spec(3), &MethodParams::default()).is_err());
}

fn selections(r: &BenchmarkReport) -> Vec<Vec<String>> {
    r.rows
        .iter()
        .map(|row| row.selected().into_iter().map(String::from).collect())
        .collect()
}

#[test]
fn validation_rows_never_reach_selection() {
    let d = small_benchmark_data(4);
    let sp = split(&d, 0.25, 4).unwrap();
    let methods = [Method::Pearson, Method::Cfs, Method::Lasso, Method::RfPai, Method::Rfe, Method::FeaLect];
    let params = MethodParams {
        fealect_bootstraps: 10,
        ..MethodParams::default()
    };
    let base = run_benchmark(&d, &sp, &methods, &small_spec(4), &params).unwrap();

    // Same validation membership, rows permuted among those positions.
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut shuffled = sp.validation.clone();
    for i in (1..shuffled.len()).rev() {
        shuffled.swap(i, rng.random_range(0..=i));
    }
    let mut order: Vec<usize> = (0..d.n_samples()).collect();
    for (&at, &from) in sp.validation.iter().zip(&shuffled) {
        order[at] = from;
    }
    let d2 = d.select_rows(&order).unwrap();
    let other = run_benchmark(&d2, &sp, &methods, &small_spec(4), &params).unwrap();
    assert_eq!(selections(&base), selections(&other));
    for (a, b) in base.rows.iter().zip(&other.rows) {
        assert_eq!(a.cells, b.cells);
        assert_eq!(a.train_auc, b.train_auc);
    }
}

#[test]
fn csv_round_trip_and_determinism() {
    let d = small_benchmark_data(5);
    let sp = split(&d, 0.25, 5).unwrap();
    let methods = [Method::Pearson, Method::Cfs];
    let a = run_benchmark(&d, &sp, &methods, &small_spec(5), &MethodParams::default()).unwrap();
    let b = run_benchmark(&d, &sp, &methods, &small_spec(5), &MethodParams::default()).unwrap();
    let csv = emit_report(&a, ReportFormat::Csv);
    assert_eq!(csv, emit_report(&b, ReportFormat::Csv));
    let back = BenchmarkReport::from_csv(&csv).unwrap();
    assert_eq!(back.rows, a.rows);
    assert_eq!(back.to_csv(), csv);
}

fn cell(feature: &str, selected: bool, rank: usize) -> FeatureCell {
    FeatureCell {
        feature: feature.into(),
        score: Some(0.5),
        rank: Some(rank),
        selected,
    }
}

#[test]
fn markdown_marks_only_the_selecting_column() {
    let row = |method: &str, a: bool, b: bool| MethodRow {
        method: method.into(),
        cells: vec![cell("alpha", a, 1), cell("beta", b, 2)],
        train_auc: Some(0.9),
        validation_auc: Some(0.8),
    };
    let report = BenchmarkReport {
        rows: vec![row(BASELINE, true, true), row("A", true, true), row("B", false, true)],
        metadata: RunMetadata {
            dataset_fingerprint: "x".into(),
            forest: ForestSpec::default(),
            method_seed: 0,
            n_train: 3,
            n_validation: 1,
        },
    };
    let md = report.to_markdown();
    assert!(md.contains("| Feature | A | B |"));
    assert!(md.contains("| alpha | **0.5000 (1)** | 0.5000 (1) |"));
    assert!(md.contains("| beta | **0.5000 (2)** | **0.5000 (2)** |"));
    assert!(md.contains("| baseline | 2 | 90.00 | 80.00 |"));
    assert!(md.contains("| B | 1 | 90.00 | 80.00 |"));
}

#[test]
fn method_names_parse() {
    for m in Method::ALL {
        assert_eq!(m.as_str().parse::<Method>().unwrap(), m);
    }
    let err = "nosuch".parse::<Method>().unwrap_err().to_string();
    assert!(err.contains("pearson") && err.contains("bolasso"));
}
