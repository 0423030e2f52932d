use fbschur_core::measure::*;
use fbschur_core::partition::{enumerate_partitions, Partition};
use proptest::prelude::*;

fn p(v: &[u32]) -> Partition {
    Partition::new(v.to_vec()).unwrap()
}

/// f^lambda by the hook length formula.
fn hook_count(l: &Partition) -> f64 {
    let conj = l.conjugate();
    let mut f: f64 = (1..=l.size()).map(f64::from).product();
    for (i, &row) in l.parts().iter().enumerate() {
        for j in 0..row {
            let arm = row - j - 1;
            let leg = conj.parts()[j as usize] - i as u32 - 1;
            f /= (arm + leg + 1) as f64;
        }
    }
    f
}

#[test]
fn boundary_weight_examples() {
    let b = BoundaryParams { a1: 0.5, a2: 0.9, b1: 0.7, b2: 0.3 };
    assert_eq!(boundary_weight(Label::Free, &p(&[4, 1]), &p(&[3]), &b), 1.0);
    assert!((boundary_weight(Label::AA, &p(&[3, 1]), &p(&[]), &b) - 0.25).abs() < 1e-15);
    assert!((boundary_weight(Label::BB, &p(&[2, 2]), &p(&[1]), &b) - 0.3).abs() < 1e-15);
    // ab mixes a column count on the first partition with a row count on the second
    assert!((boundary_weight(Label::AB, &p(&[3, 1]), &p(&[1]), &b) - 0.25 * 0.3).abs() < 1e-15);
}

#[test]
fn unnormalized_weight_examples() {
    let eps = 0.7;
    let (u, v) = (0.3, 0.4);
    let s = MeasureSpec::updown(Kind::Plancherel { eps }, u, v);
    assert!((unnormalized_weight(&s, &p(&[]), &p(&[1]), Some(&p(&[]))) - eps * eps).abs() < 1e-15);
    assert!((unnormalized_weight(&s, &p(&[1]), &p(&[1]), Some(&p(&[]))) - u * eps).abs() < 1e-15);
    assert_eq!(unnormalized_weight(&s, &p(&[2]), &p(&[1]), Some(&p(&[]))), 0.0);

    let q = 0.35;
    let g = MeasureSpec::upwards(Kind::Geometric { q, n: 2 }, u);
    assert!((unnormalized_weight(&g, &p(&[]), &p(&[2]), None) - 3.0 * q * q).abs() < 1e-15);
}

#[test]
fn label_parsing() {
    assert_eq!(Label::parse("aa"), Some(Label::AA));
    assert_eq!(Label::parse("-"), Some(Label::Free));
    assert_eq!(Label::parse("ba"), None);
    assert_eq!(Label::AB.to_string(), "ab");
}

#[test]
fn validation() {
    let k = Kind::Geometric { q: 0.3, n: 1 };
    assert!(MeasureSpec::updown(k, 1.0, 0.2).validate().is_err());
    assert!(MeasureSpec::updown(Kind::Geometric { q: 1.0, n: 1 }, 0.1, 0.2).validate().is_err());
    let bad = BoundaryParams { a1: 0.0, ..Default::default() };
    assert!(MeasureSpec::updown(k, 0.1, 0.2).with_label(Label::AA, bad).validate().is_err());
    let mut up = MeasureSpec::upwards(k, 0.1);
    assert!(up.validate().is_ok());
    up.v = 0.5;
    assert!(up.validate().is_err());
}

/// Brute-force weight of each lambda with |lambda| <= n, summed over mu and nu.
fn brute_weights(spec: &MeasureSpec, n: u32) -> Vec<(Partition, f64)> {
    let all = enumerate_partitions(n);
    let b = &spec.boundary;
    let empty = p(&[]);
    all.iter()
        .map(|l| {
            let subs: Vec<&Partition> = all.iter().filter(|m| l.contains(m)).collect();
            let w = match spec.variant {
                Variant::Upwards => subs.iter().map(|m| unnormalized_weight(spec, m, l, None)).sum(),
                Variant::UpDown => {
                    let side = |x: f64, first: bool| -> f64 {
                        subs.iter()
                            .map(|m| {
                                let bw = if first {
                                    boundary_weight(spec.label, m, &empty, b)
                                } else {
                                    boundary_weight(spec.label, &empty, m, b)
                                };
                                bw * x.powi(m.size() as i32) * skew_schur(spec.kind, l, m)
                            })
                            .sum()
                    };
                    side(spec.u, true) * side(spec.v, false)
                }
            };
            (l.clone(), w)
        })
        .collect()
}

#[test]
fn partition_function_matches_enumeration() {
    let cases = [
        (MeasureSpec::updown(Kind::Geometric { q: 0.1, n: 1 }, 0.1, 0.1), 10),
        (MeasureSpec::updown(Kind::Geometric { q: 0.12, n: 2 }, 0.15, 0.1), 10),
        (MeasureSpec::updown(Kind::Plancherel { eps: 0.5 }, 0.3, 0.2), 12),
    ];
    for (spec, n) in cases {
        let a = PowerSums::of(spec.kind);
        let lz = log_partition_function(spec.u, spec.v, &a, &a).unwrap();
        let brute: f64 = brute_weights(&spec, n).iter().map(|x| x.1).sum();
        assert!((lz - brute.ln()).abs() < 1e-9, "{spec:?}: {lz} vs {}", brute.ln());
    }
}

#[test]
fn exact_law_matches_brute_force_with_labels() {
    let b = BoundaryParams { a1: 0.6, a2: 0.8, b1: 0.5, b2: 0.9 };
    for label in [Label::Free, Label::AA, Label::AB, Label::BB] {
        let spec = MeasureSpec::updown(Kind::Geometric { q: 0.15, n: 2 }, 0.2, 0.25).with_label(label, b);
        let law = lambda1_law_with_cap(&spec, 9).unwrap();
        let mut pmf = vec![0.0; 10];
        for (l, w) in brute_weights(&spec, 9) {
            pmf[l.first() as usize] += w;
        }
        let total: f64 = pmf.iter().sum();
        assert!((law.mass - total).abs() < 1e-12 * total, "{label}");
        for (k, w) in pmf.iter().enumerate() {
            assert!((law.pmf[k] - w / total).abs() < 1e-13, "{label} k={k}");
        }
    }
}

#[test]
fn mass_plus_tail_brackets_one() {
    let spec = MeasureSpec::updown(Kind::Geometric { q: 0.3, n: 2 }, 0.4, 0.35);
    let law = lambda1_law_exact(&spec, 1e-9).unwrap();
    let a = PowerSums::of(spec.kind);
    let z = log_partition_function(spec.u, spec.v, &a, &a).unwrap().exp();
    let missing = 1.0 - law.mass / z;
    assert!(missing >= -1e-12 && missing <= law.tail_bound + 1e-12, "{missing} {}", law.tail_bound);
    assert!(law.tail_bound < 1e-9);
    let cdf = law.cdf();
    assert!(cdf.windows(2).all(|w| w[1] >= w[0]));
    assert!((cdf.last().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn vanishing_eps_gives_uniform_measure() {
    let u = 0.45;
    let spec = MeasureSpec::upwards(Kind::Plancherel { eps: 0.0 }, u);
    let law = lambda1_law_exact(&spec, 1e-10).unwrap();
    let cdf = law.cdf();
    for k in 0..cdf.len().min(15) {
        let want = uniform_first_part_cdf(u, k as u32);
        let qq: f64 = (1..400).map(|j| 1.0 - u.powi(j)).product::<f64>()
            / (1..=k as i32).map(|j| 1.0 - u.powi(j)).product::<f64>();
        assert!((want - qq).abs() < 1e-14);
        assert!((cdf[k] - want).abs() < 1e-9, "k={k}");
    }
}

#[test]
fn zero_u_v_gives_poissonized_plancherel() {
    let eps: f64 = 1.1;
    let spec = MeasureSpec::updown(Kind::Plancherel { eps }, 0.0, 0.0);
    let law = lambda1_law_exact(&spec, 1e-10).unwrap();
    let theta = eps * eps;
    let mut pmf = vec![0.0; law.pmf.len()];
    for l in enumerate_partitions(law.cap) {
        let n = l.size();
        let lf: f64 = (1..=n).map(|k| (k as f64).ln()).sum();
        let w = (n as f64 * theta.ln() - 2.0 * lf - theta).exp() * hook_count(&l).powi(2);
        pmf[l.first() as usize] += w;
    }
    for k in 0..pmf.len() {
        assert!((law.pmf[k] - pmf[k]).abs() < 1e-9, "k={k}");
    }
}

#[test]
fn theta_law_examples() {
    let trivial = ThetaShiftLaw::new(1.7, 0.0).unwrap();
    assert_eq!(trivial.support().collect::<Vec<_>>(), vec![(0, 1.0)]);

    let sym = ThetaShiftLaw::new(1.0, 0.7).unwrap();
    for d in 1..5 {
        assert!((sym.prob(d) - sym.prob(-d)).abs() < 1e-15);
    }

    let (t, uv): (f64, f64) = (1.3, 0.6);
    let law = ThetaShiftLaw::new(t, uv).unwrap();
    assert!((law.pmf.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    let norm: f64 = (-60i64..=60).map(|d| t.powi(2 * d as i32) * uv.powf(2.0 * (d * d) as f64)).sum();
    assert!((law.normalizer().unwrap() - norm).abs() < 1e-12 * norm);
    for d in -3..=3 {
        let want = t.powi(2 * d as i32) * uv.powf(2.0 * (d * d) as f64) / norm;
        assert!((law.prob(d) - want).abs() < 1e-14, "d={d}");
    }
}

#[test]
fn shift_convolution_is_invertible_for_any_t() {
    let spec = MeasureSpec::updown(Kind::Geometric { q: 0.3, n: 2 }, 0.5, 0.6);
    let law = lambda1_law_exact(&spec, 1e-9).unwrap();
    let table = law.table();
    let hi = law.cap as i64;
    for t in [0.6, 1.0, 1.8] {
        let shift = ThetaShiftLaw::new(t, spec.uv()).unwrap();
        let shifted = convolve_shift(&table, &shift, 0, hi).unwrap();
        let back = deconvolve_shift(&shifted.cdf, &shift).unwrap();
        for (k, v) in back.iter().enumerate() {
            assert!((v - table.at_int(k as i64)).abs() < 1e-8, "t={t} k={k}");
        }
    }
}

fn arb_partition() -> impl Strategy<Value = Partition> {
    prop::collection::vec(1u32..=4, 0..=3).prop_map(|mut v| {
        v.sort_unstable_by(|a, b| b.cmp(a));
        Partition::new(v).unwrap()
    })
}

proptest! {
    #[test]
    fn swapping_sides_preserves_the_weight(
        mu in arb_partition(), lam in arb_partition(), nu in arb_partition(),
        u in 0.0f64..0.9, v in 0.0f64..0.9,
        a1 in 0.1f64..1.0, a2 in 0.1f64..1.0, b1 in 0.1f64..1.0, b2 in 0.1f64..1.0,
    ) {
        for label in [Label::Free, Label::AA, Label::BB] {
            let kind = Kind::Geometric { q: 0.4, n: 2 };
            let s = MeasureSpec::updown(kind, u, v).with_label(label, BoundaryParams { a1, a2, b1, b2 });
            let t = MeasureSpec::updown(kind, v, u).with_label(label, BoundaryParams { a1: a2, a2: a1, b1: b2, b2: b1 });
            let x = unnormalized_weight(&s, &mu, &lam, Some(&nu));
            let y = unnormalized_weight(&t, &nu, &lam, Some(&mu));
            prop_assert!(x >= 0.0);
            prop_assert!((x - y).abs() <= 1e-14 * x.abs().max(1e-300));
            if !lam.contains(&mu) || !lam.contains(&nu) {
                prop_assert_eq!(x, 0.0);
            }
        }
    }
}

