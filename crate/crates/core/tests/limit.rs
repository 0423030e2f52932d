use fbschur_core::exec::Serial;
use fbschur_core::limit::*;
use fbschur_core::measure::Label;
use fbschur_core::Complex64 as C;
use proptest::prelude::*;

fn families() -> Vec<LimitParams> {
    let mut out = Vec::new();
    for k in [1u8, 2] {
        out.push(LimitParams::new(k, Family::Simplified, 1.0).unwrap());
        out.push(LimitParams::new(k, Family::Full { alpha1: 1.0, alpha2: 1.0 }, 1.0).unwrap());
    }
    out
}

#[test]
fn gamma_ratio_examples() {
    // Gamma(1) Gamma(3/2) / (Gamma(1) Gamma(1/2)) = 1/2
    let g = gamma_ratio(1, C::new(0.0, 0.0), 1.0, 1.0, 1.0).unwrap();
    assert!((g - 0.5).norm() < 1e-13);
    let g = gamma_ratio(2, C::new(0.0, 0.0), 0.0, 0.0, 1.0).unwrap();
    assert!((g - 1.0).norm() < 1e-14);
    assert!(gamma_ratio(3, C::new(0.0, 0.0), 1.0, 1.0, 1.0).is_err());
}

#[test]
fn label_collapse() {
    let p = LimitParams::for_label(2, Label::AB, 0.7, 0.3, 1.0).unwrap();
    assert_eq!(p.family, Family::Full { alpha1: 0.7, alpha2: 0.0 });
    for l in [Label::BB, Label::Free] {
        assert_eq!(LimitParams::for_label(1, l, 0.7, 0.3, 1.0).unwrap().family, Family::Simplified);
    }
    assert!(LimitParams::new(3, Family::Simplified, 1.0).is_err());
    assert!(LimitParams::new(2, Family::Simplified, 0.0).is_err());
}

#[test]
fn diagonal_blocks_are_antisymmetric() {
    let xs = [0.3, 1.1, -0.4, 2.0];
    for p in families() {
        let kern = LimitKernel::new(p).unwrap();
        let b = kern.blocks(&xs, &Serial);
        for i in 0..xs.len() {
            assert!(b.k11[(i, i)].norm() < 1e-12);
            for j in 0..xs.len() {
                assert!((b.k11[(i, j)] + b.k11[(j, i)]).norm() < 1e-9, "{p:?}");
                assert!((b.k22[(i, j)] + b.k22[(j, i)]).norm() < 1e-9, "{p:?}");
            }
        }
    }
}

#[test]
fn entries_do_not_depend_on_the_abscissas() {
    let xs = [-1.0, 0.2, 1.5];
    for p in families() {
        let a = LimitKernel::new(p).unwrap().blocks(&xs, &Serial);
        let mut q = p;
        q.set_abscissas(0.3, 0.4).unwrap();
        let b = LimitKernel::new(q).unwrap().blocks(&xs, &Serial);
        for i in 0..xs.len() {
            for j in 0..xs.len() {
                assert!((a.k11[(i, j)] - b.k11[(i, j)]).norm() < 1e-8, "{p:?}");
                assert!((a.k12[(i, j)] - b.k12[(i, j)]).norm() < 1e-8, "{p:?}");
                assert!((a.k22[(i, j)] - b.k22[(i, j)]).norm() < 1e-8, "{p:?}");
            }
        }
    }
}

#[test]
fn longer_truncation_changes_nothing() {
    let xs = [-1.0, 0.5, 2.0];
    for p in families() {
        let a = LimitKernel::new(p).unwrap().blocks(&xs, &Serial);
        let mut q = p;
        q.t_max *= 1.25;
        let b = LimitKernel::new(q).unwrap().blocks(&xs, &Serial);
        for i in 0..xs.len() {
            for j in 0..xs.len() {
                let d = (a.k11[(i, j)] - b.k11[(i, j)]).norm()
                    + (a.k12[(i, j)] - b.k12[(i, j)]).norm()
                    + (a.k22[(i, j)] - b.k22[(i, j)]).norm();
                assert!(d < 1e-9, "{p:?} {d}");
            }
        }
    }
}

#[test]
fn entries_decay_to_the_right() {
    let p = LimitParams::new(2, Family::Simplified, 1.0).unwrap();
    let b = LimitKernel::new(p).unwrap().blocks(&[8.0, 8.5], &Serial);
    assert!(b.k11[(0, 1)].norm() < 1e-6);
    assert!(b.k12[(0, 0)].norm() < 1e-6);
    assert!(b.k22[(0, 1)].norm() < 1e-6);
}

#[test]
fn cdf_shape() {
    let quad = GapQuadrature::default();
    let cases = [
        LimitParams::new(1, Family::Simplified, 1.0).unwrap(),
        LimitParams::new(1, Family::Full { alpha1: 0.1, alpha2: 0.1 }, 1.0).unwrap(),
        LimitParams::new(2, Family::Simplified, 1.0).unwrap(),
        LimitParams::new(2, Family::Full { alpha1: 1.0, alpha2: 1.0 }, 1.0).unwrap(),
    ];
    for p in cases {
        let s: Vec<f64> = (-4..=4).map(f64::from).chain([8.0, 10.0]).collect();
        let (f, imag) = limit_cdf(&p, &s, quad, &Serial).unwrap();
        assert!(imag < 1e-8, "{p:?}");
        assert!(f[..9].windows(2).all(|w| w[1] >= w[0] - 1e-9), "{p:?} {f:?}");
        assert!(f.iter().all(|&x| (-1e-8..=1.0 + 1e-8).contains(&x)), "{p:?} {f:?}");
        // the free boundary leaves an exponential upper tail of rate k eta;
        // boundary parameters only make it lighter
        let rate = ((1.0 - f[9]) / (1.0 - f[10])).ln() / 2.0;
        let kr = f64::from(p.k) * p.eta;
        match p.family {
            Family::Simplified => assert!((rate - kr).abs() < 0.1, "{p:?} rate {rate}"),
            Family::Full { .. } => assert!(rate > kr - 0.1, "{p:?} rate {rate}"),
        }
        if p.k == 2 {
            assert!(f[10] >= 1.0 - 1e-6, "{p:?}");
        }
    }
}

#[test]
fn large_eta_approaches_gue() {
    let quad = GapQuadrature::default();
    let s = [-2.0, 0.0, 2.0];
    let g: Vec<f64> = s.iter().map(|&x| f_gue(x, quad)).collect();
    let sup = |eta: f64| {
        let p = LimitParams::new(2, Family::Simplified, eta).unwrap();
        let (f, _) = limit_cdf(&p, &s, quad, &Serial).unwrap();
        f.iter().zip(&g).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    };
    let (d2, d8) = (sup(2.0), sup(8.0));
    // first-order approach in 1/eta
    assert!(d8 < d2 / 2.0, "{d2} {d8}");
    assert!(d8 < 0.1);
}

#[test]
fn alpha_collapse_is_monotone() {
    let quad = GapQuadrature::default();
    let s = [-2.0, 0.0, 2.0];
    let vals: Vec<Vec<f64>> = [1.0, 0.5, 0.25]
        .iter()
        .map(|&a2| {
            let p = LimitParams::new(2, Family::Full { alpha1: 1.0, alpha2: a2 }, 1.0).unwrap();
            limit_cdf(&p, &s, quad, &Serial).unwrap().0
        })
        .collect();
    for i in 0..s.len() {
        let col: Vec<f64> = vals.iter().map(|v| v[i]).collect();
        let up = col.windows(2).all(|w| w[1] >= w[0]);
        let down = col.windows(2).all(|w| w[1] <= w[0]);
        assert!(up || down, "s={} {col:?}", s[i]);
    }
}

#[test]
fn tracy_widom_baselines() {
    let q40 = GapQuadrature::default();
    let q80 = GapQuadrature { nodes: 80, ..q40 };
    assert!(f_gue(8.0, q40) >= 1.0 - 1e-8);
    assert!((f_gue(0.0, q40) - f_gue(0.0, q80)).abs() < 1e-8);
    assert!((f_goe(0.0, q40) - f_goe(0.0, q80)).abs() < 1e-8);
    // GOE sits to the left of GUE in the upper tail and both increase
    assert!(f_goe(-1.0, q40) < f_goe(1.0, q40));
    assert!(f_gue(-3.0, q40) < f_gue(-1.0, q40));
}

#[test]
fn chi_examples() {
    assert_eq!(chi(0.3, 0.0), 0.0);
    assert!((chi(0.0, 0.4) - 0.8 / 0.6).abs() < 1e-15);
    let (u, q) = geometric_regime(1e6, 1.0);
    assert!((chi(u, q) - 2.0).abs() < 0.05);
    let direct: f64 = 2.0 * q * (0..200_000).map(|l| u.powi(2 * l) / (1.0 - u.powi(2 * l) * q)).sum::<f64>();
    assert!((chi(u, q) - direct).abs() < 1e-10);
}

#[test]
fn scaling_maps() {
    let m = ScalingMap::poisson(1000.0, 1.0, 2);
    let want = 2000.0 + 10.0 * (0.5 + (10.0f64 / 2.0).ln() / 2.0);
    assert!((m.threshold(0.5) - want).abs() < 1e-9);
    let (u, eps) = poisson_regime(1000.0, 1.0);
    assert!((eps / (1.0 - u * u) - 1000.0).abs() < 1e-9);
    assert!((u - (-0.1f64).exp()).abs() < 1e-15);
    let g = ScalingMap::geometric(64.0, 1.0, 1);
    assert!((g.rescale(g.threshold(-1.3)) + 1.3).abs() < 1e-12);
    assert!((boundary_from_exponent(u, 1.0, 1.0) - u).abs() < 1e-15);
}

proptest! {
    #[test]
    fn gamma_ratio_conjugate_symmetry(re in -0.4f64..0.4, im in -5.0f64..5.0, a1 in 0.0f64..2.0, a2 in 0.1f64..2.0, k in 1u8..=2) {
        let z = C::new(re, im);
        let a = gamma_ratio(k, z, a1, a2, 1.0).unwrap();
        let b = gamma_ratio(k, z.conj(), a1, a2, 1.0).unwrap();
        prop_assert!((a.conj() - b).norm() <= 1e-12 * a.norm().max(1.0));
    }
}

