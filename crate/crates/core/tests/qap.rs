mod common;

use proptest::prelude::*;
use rand::Rng;
use rand_distr::StandardNormal;
use stocknet::qap::{qap_regress, stars, truncate_top, Fundamentals, RegressionSpec, FUNDAMENTAL_COLUMNS};

fn names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{:06}", 600000 + i)).collect()
}

fn normal(r: &mut rand_chacha::ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| r.sample(StandardNormal)).collect()
}

/// OLS coefficients by normal equations (Cramer's rule for two regressors).
fn ols2(x1: &[f64], x2: &[f64], y: &[f64]) -> [f64; 3] {
    let n = y.len() as f64;
    let m = |v: &[f64]| v.iter().sum::<f64>() / n;
    let (m1, m2, my) = (m(x1), m(x2), m(y));
    let c = |a: &[f64], ma: f64, b: &[f64], mb: f64| a.iter().zip(b).map(|(p, q)| (p - ma) * (q - mb)).sum::<f64>();
    let (s11, s22, s12) = (c(x1, m1, x1, m1), c(x2, m2, x2, m2), c(x1, m1, x2, m2));
    let (s1y, s2y) = (c(x1, m1, y, my), c(x2, m2, y, my));
    let det = s11 * s22 - s12 * s12;
    let b1 = (s1y * s22 - s2y * s12) / det;
    let b2 = (s2y * s11 - s1y * s12) / det;
    [my - b1 * m1 - b2 * m2, b1, b2]
}

fn spec(y: Vec<f64>, xs: Vec<(String, Vec<f64>)>, perms: usize, seed: u64) -> RegressionSpec {
    RegressionSpec {
        tickers: names(y.len()),
        dependent: y,
        regressors: xs,
        top_fraction: 1.0,
        permutations: perms,
        seed,
    }
}

#[test]
fn strong_signal_hits_the_floor() {
    let mut r = common::rng(1);
    let x = normal(&mut r, 200);
    let y: Vec<f64> = x.iter().map(|v| 2.0 * v + 0.01 * r.sample::<f64, _>(StandardNormal)).collect();
    let res = qap_regress(&spec(y, vec![("x".into(), x)], 1000, 42)).unwrap();
    assert_eq!(res.coefficient("x").unwrap().p_value, Some(1.0 / 1001.0));
    assert_eq!(res.coefficients[0].p_value, None);
    assert_eq!(res.permutations_run, 1000);
}

#[test]
fn estimates_match_normal_equations() {
    let mut r = common::rng(2);
    let x1 = normal(&mut r, 30);
    let x2: Vec<f64> = normal(&mut r, 30).iter().map(|v| 50.0 + 10.0 * v).collect();
    let y: Vec<f64> = (0..30).map(|i| 1.0 + 0.5 * x1[i] - 0.02 * x2[i] + r.sample::<f64, _>(StandardNormal)).collect();
    let res = qap_regress(&spec(y.clone(), vec![("a".into(), x1.clone()), ("b".into(), x2.clone())], 10, 0)).unwrap();
    let oracle = ols2(&x1, &x2, &y);
    for (c, o) in res.coefficients.iter().zip(oracle) {
        assert!((c.estimate - o).abs() < 1e-8, "{} {} {o}", c.name, c.estimate);
    }
    assert!((0.0..=1.0).contains(&res.r_squared));
}

#[test]
fn preconditions() {
    let x = vec![1.0, 2.0, 3.0, 4.0, 5.0];
    assert!(qap_regress(&spec(x.clone(), vec![("x".into(), x.clone())], 0, 1)).is_err());
    let dup = vec![("x".into(), x.clone()), ("x".into(), x.clone())];
    assert!(qap_regress(&spec(x.clone(), dup, 10, 1)).is_err());
    let twice = vec![("x".into(), x.clone()), ("z".into(), x.iter().map(|v| 2.0 * v).collect())];
    assert!(qap_regress(&spec(vec![1.0, 3.0, 2.0, 5.0, 4.0], twice, 10, 1)).is_err());
    assert!(qap_regress(&spec(vec![1.0, 2.0], vec![("x".into(), vec![1.0, 0.0])], 10, 1)).is_err());
}

#[test]
fn truncation_cases() {
    let t = names(10);
    let v: Vec<f64> = (0..10).map(|i| ((i * 7) % 10) as f64).collect();
    assert_eq!(truncate_top(&t, &v, 1.0).unwrap(), (0..10).collect::<Vec<_>>());
    let top = truncate_top(&t, &v, 0.5).unwrap();
    let mut expect: Vec<usize> = (0..10).filter(|&i| v[i] >= 5.0).collect();
    expect.sort();
    assert_eq!(top, expect);
    assert!(truncate_top(&t, &v, 0.0).is_err());
}

#[test]
fn ties_at_the_cut_follow_ticker_order() {
    let t: Vec<String> = ["d", "b", "a", "c", "e"].iter().map(|s| s.to_string()).collect();
    let v = vec![3.0, 2.0, 2.0, 2.0, 1.0];
    // keep ceil(0.6 * 5) = 3: "d" plus the two lexically smallest of the tied b/a/c
    let mut oracle: Vec<usize> = (0..5).collect();
    oracle.sort_by(|&a, &b| v[b].partial_cmp(&v[a]).unwrap().then(t[a].cmp(&t[b])));
    let mut expect = oracle[..3].to_vec();
    expect.sort();
    assert_eq!(truncate_top(&t, &v, 0.6).unwrap(), expect);
    assert_eq!(expect, vec![0, 1, 2]);
}

#[test]
fn stars_thresholds() {
    assert_eq!((stars(0.005), stars(0.03), stars(0.07), stars(0.2)), ("***", "**", "*", ""));
}

#[test]
fn fundamentals_csv() {
    let mut csv = String::from("ticker");
    for c in FUNDAMENTAL_COLUMNS {
        csv.push(',');
        csv.push_str(c);
    }
    csv.push_str(",financing\nB,1,2,3,4,5,6,7\nA,8,9,10,11,12,13,14\n");
    let f = Fundamentals::from_csv(csv.as_bytes()).unwrap();
    let al = f.aligned(&["A".into(), "B".into()], &["roe".into(), "financing".into()]).unwrap();
    assert_eq!(al[0].1, vec![12.0, 5.0]);
    assert_eq!(al[1].1, vec![14.0, 7.0]);
    assert!(f.aligned(&["Z".into()], &["roe".into()]).is_err());
    assert!(Fundamentals::from_csv("name,roe\nA,1\n".as_bytes()).is_err());
}

#[test]
fn same_seed_same_result() {
    let mut r = common::rng(5);
    let x = normal(&mut r, 60);
    let y = normal(&mut r, 60);
    let a = qap_regress(&spec(y.clone(), vec![("x".into(), x.clone())], 300, 9)).unwrap();
    let b = qap_regress(&spec(y.clone(), vec![("x".into(), x.clone())], 300, 9)).unwrap();
    assert_eq!(a, b);
    let c = qap_regress(&spec(y, vec![("x".into(), x)], 300, 10)).unwrap();
    assert_ne!(a.coefficients[1].p_value, c.coefficients[1].p_value);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn scaling_a_regressor(seed in any::<u64>(), c in 0.1f64..50.0) {
        let mut r = common::rng(seed);
        let x = normal(&mut r, 40);
        let z = normal(&mut r, 40);
        let y: Vec<f64> = (0..40).map(|i| 0.3 * x[i] + r.sample::<f64, _>(StandardNormal)).collect();
        let base = qap_regress(&spec(y.clone(), vec![("x".into(), x.clone()), ("z".into(), z.clone())], 200, 3)).unwrap();
        let xs: Vec<f64> = x.iter().map(|v| v * c).collect();
        let scaled = qap_regress(&spec(y, vec![("x".into(), xs), ("z".into(), z)], 200, 3)).unwrap();
        let (b0, b1) = (base.coefficient("x").unwrap(), scaled.coefficient("x").unwrap());
        prop_assert!((b1.estimate * c - b0.estimate).abs() < 1e-9 * (1.0 + b0.estimate.abs()));
        prop_assert_eq!(b0.p_value, b1.p_value);
        let p = b0.p_value.unwrap();
        prop_assert!((1.0 / 201.0..=1.0).contains(&p));
    }
}
