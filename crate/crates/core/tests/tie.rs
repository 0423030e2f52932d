use fbschur_core::measure::{BoundaryParams, Label, Variant};
use fbschur_core::stats::{empirical_pmf, tv_distance};
use fbschur_core::tie::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn updown(n: usize, u: f64, v: f64, q: f64) -> TieSpec {
    TieSpec::geometric(Variant::UpDown, n, u, v, q)
}

fn geom_param(law: &CellLaw) -> f64 {
    match *law {
        CellLaw::Geom(z) => z,
        CellLaw::GeomB { z, .. } => z,
    }
}

#[test]
fn top_square_rays_exit_without_bouncing() {
    let spec = updown(1, 0.3, 0.3, 0.4);
    assert_eq!(
        ray_trace(&spec, (1, 1), Direction::NE).unwrap(),
        RayHit { border: Side::X, index: 1, bounces_right: 0, bounces_left: 0 }
    );
    let n = 3;
    let spec = updown(n, 0.3, 0.3, 0.4);
    for i in 1..=n {
        for j in 1..=n {
            let cell = (n + i - j, i + j - 1);
            let ne = ray_trace(&spec, cell, Direction::NE).unwrap();
            let nw = ray_trace(&spec, cell, Direction::NW).unwrap();
            assert_eq!(ne, RayHit { border: Side::X, index: i, bounces_right: 0, bounces_left: 0 });
            assert_eq!(nw, RayHit { border: Side::Y, index: j, bounces_right: 0, bounces_left: 0 });
        }
    }
    assert!(ray_trace(&spec, (0, 1), Direction::NE).is_err());
}

#[test]
fn triangle_cells_see_one_border_twice() {
    let n = 3;
    let mut spec = updown(n, 0.3, 0.4, 0.0);
    spec.x = vec![0.11, 0.13, 0.17];
    spec.y = vec![0.19, 0.23, 0.29];
    let layout = Layout::new(&spec).unwrap();
    let mut seen = 0;
    for (c, law) in &layout.cells {
        if c.kind != CellKind::TriangleSquare || c.block > 1 {
            continue;
        }
        seen += 1;
        let ne = ray_trace(&spec, (c.pos, c.row), Direction::NE).unwrap();
        let nw = ray_trace(&spec, (c.pos, c.row), Direction::NW).unwrap();
        assert_eq!(ne.border, nw.border);
        assert_eq!(ne.border, c.side);
        let mut idx = [ne.index, nw.index];
        idx.sort_unstable();
        assert_eq!(idx, [c.i, c.j]);
        let (border, edge) = if c.side == Side::X { (&spec.x, spec.u) } else { (&spec.y, spec.v) };
        let uv: f64 = spec.u * spec.v;
        let want = edge * edge * uv.powi(2 * c.block as i32) * border[c.i - 1] * border[c.j - 1];
        assert!((geom_param(law) - want).abs() < 1e-15);
    }
    assert_eq!(seen, 2 * 2 * n * (n - 1) / 2);
}

#[test]
fn parameter_examples() {
    let q = 0.4;
    let spec = updown(3, 0.0, 0.0, q);
    let layout = Layout::new(&spec).unwrap();
    for (c, law) in &layout.cells {
        let z = geom_param(law);
        if c.kind == CellKind::Square && c.block == 0 {
            assert!((z - q * q).abs() < 1e-15);
        } else {
            assert_eq!(z, 0.0);
        }
    }

    let (u, v) = (0.5, 0.6);
    let spec = updown(2, u, v, q);
    let cell = Cell { row: 5, pos: 2, kind: CellKind::Square, side: Side::Both, block: 1, i: 1, j: 1 };
    assert!((geom_param(&cell_parameter(&spec, &cell)) - (u * v).powi(2) * q * q).abs() < 1e-15);

    let b = BoundaryParams { a1: 0.7, a2: 0.9, ..Default::default() };
    let spec = updown(2, u, v, q).with_label(Label::AA, b);
    let layout = Layout::new(&spec).unwrap();
    let (c, law) = layout
        .cells
        .iter()
        .find(|(c, _)| c.kind == CellKind::Boundary && c.block == 2 && c.side == Side::X)
        .unwrap();
    assert_eq!(c.pos, 0);
    assert!((geom_param(law) - 0.7 * u * (u * v).powi(2) * q).abs() < 1e-15);

    let spec = updown(2, u, v, q).with_label(Label::BB, BoundaryParams { b1: 0.3, ..Default::default() });
    let layout = Layout::new(&spec).unwrap();
    assert!(layout
        .cells
        .iter()
        .filter(|(c, _)| c.kind == CellKind::Boundary)
        .all(|(_, law)| matches!(law, CellLaw::GeomB { .. })));
}

#[test]
fn samplers_at_the_edges() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..200 {
        assert_eq!(sample_geom(0.0, &mut rng).unwrap(), 0);
        assert_eq!(sample_geom_b(0.0, 0.7, &mut rng).unwrap() % 2, 0);
    }
    assert!(sample_geom(1.0, &mut rng).is_err());
    for k in 0..8 {
        let even = CellLaw::GeomB { b: 0.0, z: 0.6 }.pmf(k);
        let want = if k % 2 == 0 { (1.0 - 0.36) * 0.6f64.powi(k as i32) } else { 0.0 };
        assert!((even - want).abs() < 1e-15);
    }
}

#[test]
fn geom_b_sampler_matches_its_pmf() {
    let (b, z) = (0.35, 0.55);
    let law = CellLaw::GeomB { b, z };
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let n = 100_000;
    let draws: Vec<u64> = (0..n).map(|_| sample_geom_b(b, z, &mut rng).unwrap() as u64).collect();
    let emp = empirical_pmf(&draws).unwrap();
    let mut exact: Vec<f64> = (0..60).map(|k| law.pmf(k)).collect();
    let s: f64 = exact.iter().sum();
    exact.iter_mut().for_each(|p| *p /= s);
    assert!(tv_distance(&emp, &exact).unwrap() < 0.01);
    assert!((law.nonzero_prob() - (1.0 - law.pmf(0))).abs() < 1e-15);
}

#[test]
fn truncation_depth_examples() {
    assert_eq!(truncation_depth(&updown(2, 0.0, 0.0, 0.5)).unwrap(), 3);
    let spec = updown(2, 0.5f64.sqrt(), 0.5f64.sqrt(), 0.5);
    let layout = Layout::new(&spec).unwrap();
    assert!(layout.omitted_bound < 1e-8);
    // every cell past the realized rows, summed directly over many more periods
    let mut deep = spec.clone();
    deep.tol_depth = 1e-30;
    let full = Layout::new(&deep).unwrap();
    let omitted: f64 = full
        .cells
        .iter()
        .filter(|(c, _)| layout.cell_at(c.row, c.pos).is_none())
        .map(|(_, law)| law.nonzero_prob())
        .sum();
    assert!(omitted <= layout.omitted_bound * (1.0 + 1e-9), "{omitted} {}", layout.omitted_bound);

    let mut prev = 0;
    for e in 1..12 {
        let mut s = spec.clone();
        s.tol_depth = 10f64.powi(-e);
        let d = truncation_depth(&s).unwrap();
        assert!(d >= prev);
        prev = d;
    }
}

#[test]
fn two_by_two_square_path() {
    let layout = Layout::new(&updown(2, 0.0, 0.0, 0.5)).unwrap();
    let mut f = WeightField::zeros(layout.depth, layout.width);
    let w = [[3, 1], [4, 2]];
    for i in 1..=2 {
        for j in 1..=2 {
            f.set(i + j - 1, 2 + i - j, w[i - 1][j - 1]);
        }
    }
    assert_eq!(layout.longest_path(&f), 3 + 4 + 2);
    assert_eq!(layout.longest_path(&WeightField::zeros(layout.depth, layout.width)), 0);
}

/// Oracle membership test, written against the coordinate description.
fn in_tie(variant: Variant, n: i64, x: i64, y: i64) -> bool {
    match variant {
        Variant::UpDown => (0..=2 * n).contains(&x) && (x + y - n - 1) % 2 == 0 && (x - n).abs() < y,
        Variant::Upwards => (0..=n).contains(&x) && (x + y) % 2 == 1 && x < y,
    }
}

fn best_path(variant: Variant, n: i64, f: &WeightField, x: i64, y: i64) -> u64 {
    let here = f.get(y as usize, x as usize) as u64;
    if y as usize == f.depth {
        return here;
    }
    let below = [x - 1, x + 1]
        .into_iter()
        .filter(|&nx| in_tie(variant, n, nx, y + 1))
        .map(|nx| best_path(variant, n, f, nx, y + 1))
        .max()
        .unwrap_or(0);
    here + below
}

#[test]
fn dp_matches_exhaustive_paths() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for variant in [Variant::UpDown, Variant::Upwards] {
        for n in 1..=3usize {
            let spec = TieSpec::geometric(variant, n, 0.5, 0.5, 0.5);
            let mut layout = Layout::new(&spec).unwrap();
            for depth in 1..=6 {
                layout.depth = depth;
                for _ in 0..1000 {
                    let mut f = WeightField::zeros(depth, layout.width);
                    for w in f.weights.iter_mut() {
                        *w = rng.random_range(0..5);
                    }
                    let top = if variant == Variant::UpDown { n as i64 } else { 0 };
                    let want = best_path(variant, n as i64, &f, top, 1);
                    assert_eq!(layout.longest_path(&f), want, "{variant:?} n={n} depth={depth}");
                }
            }
        }
    }
}

#[test]
fn monotone_coupling() {
    let spec = updown(2, 0.4, 0.5, 0.3);
    let base = Layout::new(&spec).unwrap();
    for idx in 0..base.cells.len().min(30) {
        let mut bumped = base.clone();
        let z = geom_param(&bumped.cells[idx].1);
        bumped.cells[idx].1 = CellLaw::Geom((z + 0.3).min(0.95));
        for seed in 0..20 {
            let a = base.longest_path(&base.sample_field(&mut stream_rng(seed, 0)));
            let b = bumped.longest_path(&bumped.sample_field(&mut stream_rng(seed, 0)));
            assert!(b >= a);
        }
    }
}

#[test]
fn sampling_is_deterministic() {
    let spec = updown(3, 0.6, 0.5, 0.4).with_label(Label::AB, BoundaryParams { a1: 0.5, b2: 0.4, ..Default::default() });
    let layout = Layout::new(&spec).unwrap();
    for i in 0..50 {
        let a = layout.sample_lambda1(&mut stream_rng(9, i));
        let b = layout.sample_lambda1(&mut stream_rng(9, i));
        assert_eq!(a, b);
        assert_eq!(a.lambda1, a.l + a.kappa1);
    }
    let f1 = layout.sample_field(&mut stream_rng(1, 0));
    let f2 = layout.sample_field(&mut stream_rng(1, 1));
    assert_ne!(f1, f2);
}

#[test]
fn upwards_tie_at_zero_u_is_symmetric_lpp() {
    let (n, q) = (3usize, 0.4);
    let layout = Layout::new(&TieSpec::geometric(Variant::Upwards, n, 0.0, 1.0, q)).unwrap();
    let samples = 100_000;
    let tie: Vec<u64> = (0..samples).map(|i| layout.longest_path(&layout.sample_field(&mut stream_rng(3, i)))).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut geom = |z: f64| -> u64 {
        let u: f64 = 1.0 - rng.random::<f64>();
        (u.ln() / z.ln()).floor() as u64
    };
    let oracle: Vec<u64> = (0..samples)
        .map(|_| {
            let mut w = vec![vec![0u64; n]; n];
            for i in 0..n {
                for j in i..n {
                    let z = if i == j { q } else { q * q };
                    w[i][j] = geom(z);
                    w[j][i] = w[i][j];
                }
            }
            let mut g = vec![vec![0u64; n]; n];
            for i in 0..n {
                for j in 0..n {
                    let up = if i > 0 { g[i - 1][j] } else { 0 };
                    let left = if j > 0 { g[i][j - 1] } else { 0 };
                    g[i][j] = w[i][j] + up.max(left);
                }
            }
            g[n - 1][n - 1]
        })
        .collect();
    let tv = tv_distance(&empirical_pmf(&tie).unwrap(), &empirical_pmf(&oracle).unwrap()).unwrap();
    assert!(tv < 0.015, "tv={tv}");
}

proptest! {
    #[test]
    fn parameters_lie_in_unit_interval(u in 0.0f64..0.95, v in 0.0f64..0.95, q in 0.0f64..0.95, n in 1usize..4) {
        let spec = updown(n, u, v, q);
        let layout = Layout::new(&spec).unwrap();
        for (_, law) in &layout.cells {
            let z = geom_param(law);
            prop_assert!((0.0..1.0).contains(&z));
        }
    }
}
