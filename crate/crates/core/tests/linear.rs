use featsel::dataset::*;
use featsel::linear::*;
use featsel::Error;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn dataset(cols: &[Vec<f64>], y: Vec<f64>) -> Dataset {
    let names = (0..cols.len()).map(|j| format!("x{j}")).collect();
    Dataset::new(FeatureMatrix::from_columns(cols, names).unwrap(), TargetVector::continuous(y).unwrap()).unwrap()
}

fn random_instance(rng: &mut ChaCha8Rng, n: usize, p: usize) -> Dataset {
    let cols: Vec<Vec<f64>> = (0..p).map(|_| (0..n).map(|_| rng.sample(StandardNormal)).collect()).collect();
    let w: Vec<f64> = (0..p).map(|_| rng.random_range(-2.0..2.0)).collect();
    let y = (0..n)
        .map(|i| (0..p).map(|j| w[j] * cols[j][i]).sum::<f64>() + rng.sample::<f64, _>(StandardNormal))
        .collect();
    dataset(&cols, y)
}

/// `X_j^T r / N` for every column, from the raw data and a weight vector.
fn correlations(d: &Dataset, w: &WeightVector) -> Vec<f64> {
    let pred = w.predict(d);
    let n = d.n_samples() as f64;
    let r: Vec<f64> = d.target().values().iter().zip(&pred).map(|(y, p)| y - p).collect();
    (0..d.n_features())
        .map(|j| d.features().column(j).iter().zip(&r).map(|(x, e)| x * e).sum::<f64>() / n)
        .collect()
}

/// Columns 1..=7 of the 8x8 Walsh-Hadamard matrix: mean zero and
/// `X^T X / N = I`.
fn walsh_design() -> Vec<Vec<f64>> {
    (1..8)
        .map(|j: u32| (0..8u32).map(|i| if (i & j).count_ones() % 2 == 0 { 1.0 } else { -1.0 }).collect())
        .collect()
}

#[test]
fn ols_exact_line() {
    let x: Vec<f64> = (0..10).map(|i| i as f64 * 0.37).collect();
    let y = x.iter().map(|v| 2.0 * v + 1.0).collect();
    let fit = ols_fit(&dataset(&[x], y)).unwrap();
    assert!((fit.weights.weights[0] - 2.0).abs() < 1e-10);
    assert!((fit.weights.intercept - 1.0).abs() < 1e-10);
    assert!(!fit.degenerate);
}

#[test]
fn ols_duplicate_column_is_flagged() {
    let x: Vec<f64> = (0..10).map(|i| (i * i % 7) as f64).collect();
    let y = x.iter().map(|v| 3.0 * v).collect();
    let fit = ols_fit(&dataset(&[x.clone(), x], y)).unwrap();
    assert!(fit.degenerate);
    assert_eq!(fit.rank, 1);
    // The minimum-norm solution splits the weight evenly.
    assert!((fit.weights.weights[0] - 1.5).abs() < 1e-8);
}

#[test]
fn ols_residual_is_orthogonal_to_columns() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let d = random_instance(&mut rng, 50, 5);
    let fit = ols_fit(&d).unwrap();
    for c in correlations(&d, &fit.weights) {
        assert!(c.abs() < 1e-8);
    }
}

#[test]
fn ridge_large_penalty_shrinks_to_mean() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let d = random_instance(&mut rng, 30, 3);
    let w = ridge_fit(&d, 1e12).unwrap();
    let mean = d.target().values().iter().sum::<f64>() / 30.0;
    assert!(w.weights.iter().all(|v| v.abs() < 1e-8));
    assert!((w.intercept - mean).abs() < 1e-6);
    assert!(ridge_fit(&d, 0.0).is_err());
}

#[test]
fn ridge_shares_weight_between_duplicates() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let x: Vec<f64> = (0..25).map(|_| rng.random()).collect();
    let z: Vec<f64> = (0..25).map(|_| rng.random()).collect();
    let y = x.iter().zip(&z).map(|(a, b)| a - 0.5 * b).collect();
    let w = ridge_fit(&dataset(&[x.clone(), z, x], y), 0.5).unwrap();
    assert!((w.weights[0] - w.weights[2]).abs() < 1e-8);
}

#[test]
fn ridge_normal_equations() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let d = random_instance(&mut rng, 20, 3);
    let lambda2 = 0.7;
    let w = ridge_fit(&d, lambda2).unwrap();
    // X^T r equals lambda2 * w on centered data; `correlations` divides by N.
    let c = correlations(&d, &w);
    for j in 0..3 {
        assert!((c[j] * 20.0 - lambda2 * w.weights[j]).abs() < 1e-8);
    }
}

#[test]
fn ridge_norm_shrinks_along_a_grid() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let d = random_instance(&mut rng, 40, 4);
    let norms: Vec<f64> = [0.01, 0.1, 1.0, 10.0, 100.0]
        .iter()
        .map(|&l| ridge_fit(&d, l).unwrap().weights.iter().map(|v| v * v).sum::<f64>())
        .collect();
    assert!(norms.windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn lasso_above_lambda_max_is_zero() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..20 {
        let d = random_instance(&mut rng, 30, 5);
        let lm = lambda_max(&d);
        for scale in [1.0, 1.5, 10.0] {
            let fit = lasso_fit(&d, lm * scale).unwrap();
            assert!(fit.weights.weights.iter().all(|&w| w == 0.0));
        }
        let r = rank_by_weights(&lasso_fit(&d, lm).unwrap().weights, d.names());
        assert!(r.selected_indices().is_empty());
    }
}

#[test]
fn lasso_orthonormal_design_is_soft_thresholding() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let cols = walsh_design();
    for _ in 0..20 {
        let y: Vec<f64> = (0..8).map(|_| rng.random_range(-3.0..3.0)).collect();
        let d = dataset(&cols, y);
        let ols = ols_fit(&d).unwrap();
        for lambda in [0.05, 0.3, 0.8] {
            let fit = lasso_fit(&d, lambda).unwrap();
            for j in 0..7 {
                let expected = soft_threshold(ols.weights.weights[j], lambda);
                assert!((fit.weights.weights[j] - expected).abs() < 1e-6);
            }
        }
    }
}

#[test]
fn lasso_objective_never_rises_and_kkt_holds() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..30 {
        let d = random_instance(&mut rng, 40, 6);
        let lambda = lambda_max(&d) * rng.random_range(0.01..0.9);
        let fit = lasso_fit(&d, lambda).unwrap();
        for w in fit.objective.windows(2) {
            assert!(w[1] <= w[0] + 1e-12 * w[0].abs());
        }
        let c = correlations(&d, &fit.weights);
        for (j, &w) in fit.weights.weights.iter().enumerate() {
            if w != 0.0 {
                assert!((c[j] - lambda * w.signum()).abs() < 1e-5);
            } else {
                assert!(c[j].abs() <= lambda + 1e-5);
            }
        }
    }
}

#[test]
fn lasso_non_convergence_carries_iterate() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let base = random_instance(&mut rng, 30, 2);
    // Two nearly identical columns make coordinate descent crawl.
    let x = base.features().column(0).to_vec();
    let x2: Vec<f64> = x.iter().enumerate().map(|(i, v)| v + 1e-6 * (i % 2) as f64).collect();
    let d = dataset(&[x, x2], base.target().values().to_vec());
    let config = LassoConfig {
        tol: 1e-14,
        max_sweeps: 3,
    };
    match lasso_fit_with(&d, 1e-4, &config) {
        Err(Error::NonConvergence { sweeps, last }) => {
            assert_eq!(sweeps, 3);
            assert_eq!(last.weights.len(), 2);
        }
        other => panic!("expected non-convergence, got {other:?}"),
    }
}

#[test]
fn lars_agrees_with_coordinate_descent() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..100 {
        let p = rng.random_range(1..=8);
        let n = rng.random_range(20..=60);
        let d = random_instance(&mut rng, n, p);
        let path = lars_path(&d).unwrap();
        let lm = path.lambda_max();
        for k in 1..=20 {
            let lambda = lm * k as f64 / 21.0;
            let a = path.coefficients_at(lambda);
            let b = lasso_fit(&d, lambda).unwrap().weights;
            for j in 0..p {
                assert!((a.weights[j] - b.weights[j]).abs() < 1e-5, "p={p} n={n} lambda={lambda}");
            }
        }
    }
}

#[test]
fn lars_breakpoints_have_equal_correlation() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..100 {
        let p = rng.random_range(1..=8);
        let n = rng.random_range(10..=60);
        let d = random_instance(&mut rng, n, p);
        let path = lars_path(&d).unwrap();
        for k in 0..path.len() {
            let c = correlations(&d, &path.coefs[k]);
            let lam = path.lambdas[k];
            for j in 0..p {
                if path.active_sets[k].contains(&j) {
                    assert!((c[j].abs() - lam).abs() < 1e-8, "breakpoint {k}: {} vs {lam}", c[j]);
                } else {
                    assert!(c[j].abs() <= lam + 1e-8);
                }
            }
        }
        assert_eq!(*path.lambdas.last().unwrap(), 0.0);
        for w in path.lambdas.windows(2) {
            assert!(w[1] <= w[0]);
        }
        for w in path.coefs.windows(2) {
            assert!(w[0].l1_norm() <= w[1].l1_norm() + 1e-8);
        }
        for w in path.active_sets.windows(2) {
            let diff = w[0].iter().filter(|j| !w[1].contains(j)).count() + w[1].iter().filter(|j| !w[0].contains(j)).count();
            assert!(diff <= 1);
        }
    }
}

#[test]
fn lasso_default_penalty_never_selects_noise() {
    let mut clean = 0;
    for seed in 0..100 {
        let s = synthesize(&SynthSpec::hotspot_like(1000, seed)).unwrap();
        let d = minmax_scale(&s.dataset).unwrap();
        let fit = lasso_fit(&d, 0.3).unwrap();
        let noise = s.indices_with(Role::Noise);
        if fit.weights.support().iter().all(|j| !noise.contains(j)) {
            clean += 1;
        }
    }
    assert!(clean >= 95, "{clean} of 100");
}

proptest! {
    #[test]
    fn lars_entries_cover_support(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = random_instance(&mut rng, 25, 4);
        let path = lars_path(&d).unwrap();
        for (k, set) in path.active_sets.iter().enumerate() {
            for j in 0..4 {
                if path.coefs[k].weights[j] != 0.0 {
                    prop_assert!(set.contains(&j));
                }
            }
        }
    }
}
