use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn featsel(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_featsel"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

fn ok(o: &Output) {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
}

fn demo() -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../data/demo_hotspots.csv")
        .display()
        .to_string()
}

fn manifest_value(dir: &Path, key: &str) -> String {
    let text = fs::read_to_string(dir.join("run.manifest")).unwrap();
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key} = ")).map(String::from))
        .unwrap_or_else(|| panic!("{key} missing from manifest"))
}

fn small_bench(seed: &str) -> Vec<&str> {
    vec!["benchmark", "--synth", "default", "--n", "600", "--trees", "20", "--seed", seed]
}

#[test]
fn rank_pearson_from_csv() {
    let tmp = tempfile::tempdir().unwrap();
    let d = demo();
    ok(&featsel(&["rank", "--method", "pearson", "--data", &d, "--target", "stress"], tmp.path()));
    let text = fs::read_to_string(tmp.path().join("pearson_ranking.csv")).unwrap();
    assert!(text.starts_with("feature,score,rank,excluded_reason\n"));
    assert_eq!(text.lines().count(), 35);
    assert_eq!(manifest_value(tmp.path(), "run.dataset.features"), "34");
    assert_eq!(manifest_value(tmp.path(), "method"), "pearson");
}

#[test]
fn unknown_method_lists_the_choices() {
    let tmp = tempfile::tempdir().unwrap();
    let o = featsel(&["rank", "--method", "nosuch", "--synth", "default"], tmp.path());
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    for m in ["pearson", "cfs", "lasso", "ridge", "ols", "rf-pai", "rfe", "fealect", "bolasso"] {
        assert!(err.contains(m), "{err}");
    }
}

/// Rows of a ranking CSV as (score, excluded reason).
fn ranking_rows(path: &Path) -> Vec<(f64, String)> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[1].parse().unwrap(), f[3].to_string())
        })
        .collect()
}

#[test]
fn lasso_ranking_zero_weights_are_unselected() {
    let d = demo();
    for lambda in ["0.3", "0.002"] {
        let tmp = tempfile::tempdir().unwrap();
        ok(&featsel(
            &["rank", "--method", "lasso", "--lambda", lambda, "--data", &d, "--target", "stress"],
            tmp.path(),
        ));
        let rows = ranking_rows(&tmp.path().join("lasso_ranking.csv"));
        assert_eq!(rows.len(), 34);
        for (w, reason) in &rows {
            assert_eq!(*w == 0.0, !reason.is_empty(), "weight {w}, reason {reason:?}");
        }
        if lambda == "0.002" {
            assert!(rows.iter().any(|(w, _)| *w != 0.0));
        }
    }
}

#[test]
fn rank_writes_method_details() {
    let tmp = tempfile::tempdir().unwrap();
    let d = demo();
    let common = ["--data", d.as_str(), "--target", "stress", "--trees", "10"];
    for (method, detail) in [("rf-pai", "rf-pai_importance.csv"), ("fealect", "fealect_scores.csv"), ("cfs", "cfs_trace.csv")] {
        let mut args = vec!["rank", "--method", method, "--bootstraps", "5"];
        args.extend(common);
        ok(&featsel(&args, tmp.path()));
        assert!(tmp.path().join(detail).exists(), "{detail}");
        assert!(tmp.path().join(format!("{method}_ranking.csv")).exists());
    }
}

/// Linear-interpolation percentile straight from the file.
fn oracle_positives(path: &str, q: f64) -> usize {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let col = lines.next().unwrap().split(',').position(|h| h == "stress").unwrap();
    let values: Vec<f64> = lines.map(|l| l.split(',').nth(col).unwrap().parse().unwrap()).collect();
    let mut sorted = values.clone();
    sorted.sort_by(f64::total_cmp);
    let pos = q / 100.0 * (sorted.len() - 1) as f64;
    let (lo, frac) = (pos.floor() as usize, pos - pos.floor());
    let t = sorted[lo] + frac * (sorted[(lo + 1).min(sorted.len() - 1)] - sorted[lo]);
    values.iter().filter(|&&v| v > t).count()
}

#[test]
fn benchmark_labels_before_selecting() {
    let tmp = tempfile::tempdir().unwrap();
    let d = demo();
    ok(&featsel(
        &["benchmark", "--data", &d, "--target", "stress", "--percentile", "90", "--methods", "pearson", "--trees", "15"],
        tmp.path(),
    ));
    let positives: usize = manifest_value(tmp.path(), "run.dataset.positives").parse().unwrap();
    assert_eq!(positives, oracle_positives(&d, 90.0));
    assert_eq!(positives, 50);
}

#[test]
fn benchmark_report_has_one_auc_row_per_method_plus_baseline() {
    let tmp = tempfile::tempdir().unwrap();
    let mut args = small_bench("3");
    args.extend(["--methods", "pearson,rfe"]);
    ok(&featsel(&args, tmp.path()));
    let md = fs::read_to_string(tmp.path().join("report.md")).unwrap();
    let auc_table = md.split("| Method | Selected |").nth(1).unwrap();
    let rows: Vec<&str> = auc_table.lines().skip(2).filter(|l| l.starts_with('|')).collect();
    assert_eq!(rows.len(), 3, "{rows:?}");
    assert!(rows[0].starts_with("| baseline |"));
    assert_eq!(manifest_value(tmp.path(), "run.status"), "ok");
}

#[test]
fn benchmark_is_reproducible_across_runs_and_workers() {
    let tmp = tempfile::tempdir().unwrap();
    let dirs: Vec<PathBuf> = ["a", "b", "c"].iter().map(|d| tmp.path().join(d)).collect();
    let mut args = small_bench("5");
    args.extend(["--methods", "pearson,lasso,rf-pai"]);
    for (dir, workers) in dirs.iter().zip(["1", "1", "3"]) {
        let mut a = args.clone();
        a.extend(["--workers", workers]);
        ok(&featsel(&a, dir));
    }
    let read = |d: &PathBuf| fs::read(d.join("report.csv")).unwrap();
    assert_eq!(read(&dirs[0]), read(&dirs[1]));
    assert_eq!(read(&dirs[0]), read(&dirs[2]));
}

#[test]
fn manifest_replays_the_run() {
    let tmp = tempfile::tempdir().unwrap();
    let first = tmp.path().join("first");
    let mut args = small_bench("11");
    args.extend(["--methods", "pearson,cfs"]);
    ok(&featsel(&args, &first));
    let manifest = first.join("run.manifest").display().to_string();
    let again = tmp.path().join("again");
    ok(&featsel(&["benchmark", "--config", &manifest], &again));
    assert_eq!(fs::read(first.join("report.csv")).unwrap(), fs::read(again.join("report.csv")).unwrap());
}

#[test]
fn flags_win_over_config() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.cfg");
    fs::write(&cfg, "# test config\nsynth = default\nn = 400\nseed = 3\ntrees = 5\nmethods = pearson\n").unwrap();
    let cfg = cfg.display().to_string();
    let out = tmp.path().join("out");
    ok(&featsel(&["benchmark", "--config", &cfg, "--seed", "4"], &out));
    assert_eq!(manifest_value(&out, "seed"), "4");
    assert_eq!(manifest_value(&out, "trees"), "5");
    assert_eq!(manifest_value(&out, "n"), "400");
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let missing = featsel(&["rank", "--method", "pearson", "--data", "no/such.csv", "--target", "stress"], tmp.path());
    assert_eq!(missing.status.code(), Some(2));

    let bad_target = featsel(&["rank", "--method", "pearson", "--data", &demo(), "--target", "nope"], tmp.path());
    assert_eq!(bad_target.status.code(), Some(2));

    let both = featsel(&["rank", "--method", "pearson", "--data", "x.csv", "--target", "t", "--synth", "default"], tmp.path());
    assert_eq!(both.status.code(), Some(1));

    let cfg = tmp.path().join("bad.cfg");
    fs::write(&cfg, "colour = red\n").unwrap();
    let bad_cfg = featsel(&["benchmark", "--config", cfg.to_str().unwrap()], tmp.path());
    assert_eq!(bad_cfg.status.code(), Some(1));

    let bad_flag = featsel(&["benchmark", "--frobnicate"], tmp.path());
    assert_eq!(bad_flag.status.code(), Some(1));

    let zero_relevant = featsel(&["synth", "--relevant", "0"], tmp.path());
    assert_eq!(zero_relevant.status.code(), Some(1));
}

#[test]
fn synth_is_deterministic_with_matching_roles() {
    let tmp = tempfile::tempdir().unwrap();
    let args = ["synth", "--relevant", "5", "--redundant", "10", "--noise", "19", "--n", "5000", "--seed", "1"];
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    ok(&featsel(&args, &a));
    ok(&featsel(&args, &b));
    for f in ["synthetic.csv", "roles.csv"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
    let data = fs::read_to_string(a.join("synthetic.csv")).unwrap();
    let header: Vec<&str> = data.lines().next().unwrap().split(',').collect();
    assert_eq!(header.len(), 35);
    assert_eq!(*header.last().unwrap(), "stress");
    assert_eq!(data.lines().count(), 5001);
    let roles = fs::read_to_string(a.join("roles.csv")).unwrap();
    let count = |r: &str| roles.lines().filter(|l| l.split(',').nth(1) == Some(r)).count();
    assert_eq!((count("relevant"), count("redundant"), count("noise")), (5, 10, 19));
}

#[test]
fn report_rerenders_the_benchmark_tables() {
    let tmp = tempfile::tempdir().unwrap();
    let bench = tmp.path().join("bench");
    let mut args = small_bench("2");
    args.extend(["--methods", "pearson,lasso"]);
    ok(&featsel(&args, &bench));
    let input = bench.join("report.csv").display().to_string();
    let out = tmp.path().join("md");
    ok(&featsel(&["report", "--input", &input], &out));
    let tables = |p: PathBuf| {
        let t = fs::read_to_string(p).unwrap();
        t[t.find("| Feature |").unwrap()..].to_string()
    };
    assert_eq!(tables(bench.join("report.md")), tables(out.join("report.md")));

    let csv_out = tmp.path().join("csv");
    ok(&featsel(&["report", "--input", &input, "--format", "csv"], &csv_out));
    assert_eq!(fs::read(bench.join("report.csv")).unwrap(), fs::read(csv_out.join("report.csv")).unwrap());
}
