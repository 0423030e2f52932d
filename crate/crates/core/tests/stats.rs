use fbschur_core::stats::*;
use fbschur_core::table::{Continuous, DistributionTable};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// sup over a dense grid plus the sample points approached from both sides.
fn brute_ks(sample: &[f64], f: impl Fn(f64) -> f64) -> f64 {
    let n = sample.len() as f64;
    let emp = |x: f64| sample.iter().filter(|&&s| s <= x).count() as f64 / n;
    let mut d: f64 = 0.0;
    for &s in sample {
        for x in [s, s - 1e-12] {
            d = d.max((emp(x) - f(x)).abs());
        }
    }
    d
}

#[test]
fn ks_against_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let sample: Vec<f64> = (0..200).map(|_| rng.random::<f64>() * 8.0 - 4.0).collect();
    let emp = EmpiricalCdf::new(sample.clone()).unwrap();
    let got = ks_distance(&emp, &Continuous(logistic));
    assert!((got - brute_ks(&sample, logistic)).abs() < 1e-9);
}

#[test]
fn ks_with_a_lattice_reference() {
    // fair die against its own law and against a shifted one
    let t = DistributionTable::from_pmf(1, &[1.0 / 6.0; 6]).unwrap();
    let sample: Vec<f64> = (0..600).map(|i| (i % 6 + 1) as f64).collect();
    let emp = EmpiricalCdf::new(sample.clone()).unwrap();
    assert!(ks_distance(&emp, &t) < 1e-12);
    let shifted = EmpiricalCdf::new(sample.iter().map(|x| x + 1.0).collect()).unwrap();
    assert!((ks_distance(&shifted, &t) - 1.0 / 6.0).abs() < 1e-12);
}

#[test]
fn empirical_pmf_counts() {
    let p = empirical_pmf(&[0, 2, 2, 3]).unwrap();
    assert_eq!(p, vec![0.25, 0.0, 0.5, 0.25]);
    assert!(empirical_pmf(&[]).is_err());
    assert!(EmpiricalCdf::new(vec![1.0, f64::NAN]).is_err());
}

#[test]
fn dkw_band_covers() {
    let (n, delta) = (500, 0.1);
    let eps = dkw_epsilon(n, delta);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let reps = 400;
    let misses = (0..reps)
        .filter(|_| {
            let s: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
            let emp = EmpiricalCdf::new(s).unwrap();
            ks_distance(&emp, &Continuous(|x: f64| x.clamp(0.0, 1.0))) > eps
        })
        .count();
    // the bound is conservative, so misses stay well under delta * reps
    assert!(misses as f64 <= delta * reps as f64, "{misses}");
}

fn arb_pmf(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..1.0, len).prop_filter_map("zero mass", |v| {
        let s: f64 = v.iter().sum();
        (s > 1e-6).then(|| v.iter().map(|x| x / s).collect())
    })
}

proptest! {
    #[test]
    fn ks_is_invariant_under_increasing_maps(
        sample in prop::collection::vec(-5.0f64..5.0, 1..60),
        a in 0.1f64..3.0,
        b in -2.0f64..2.0,
    ) {
        let emp = EmpiricalCdf::new(sample.clone()).unwrap();
        let d = ks_distance(&emp, &Continuous(logistic));
        let mapped = EmpiricalCdf::new(sample.iter().map(|x| (a * x + b).exp()).collect()).unwrap();
        let d2 = ks_distance(&mapped, &Continuous(|y: f64| if y <= 0.0 { 0.0 } else { logistic((y.ln() - b) / a) }));
        prop_assert!((d - d2).abs() < 1e-9);
    }

    #[test]
    fn tv_is_a_metric(p in arb_pmf(6), q in arb_pmf(4), r in arb_pmf(6)) {
        let pq = tv_distance(&p, &q).unwrap();
        prop_assert!((pq - tv_distance(&q, &p).unwrap()).abs() < 1e-15);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&pq));
        prop_assert!(tv_distance(&p, &p).unwrap() == 0.0);
        let tri = tv_distance(&p, &r).unwrap() + tv_distance(&r, &q).unwrap();
        prop_assert!(pq <= tri + 1e-12);
    }
}
