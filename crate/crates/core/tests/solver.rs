use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use selfstab::alpha_model::AlphaModel;
use selfstab::point_process::{Point, PointSet};
use selfstab::solver::*;

fn cosine() -> AlphaModel {
    AlphaModel::cosine(0.57, 0.4).unwrap()
}

fn set(points: &[(f64, f64)]) -> PointSet {
    PointSet::new(0.0, 1.0, points.iter().map(|&(x, y)| Point::new(x, y)).collect()).unwrap()
}

fn random_set(rng: &mut ChaCha8Rng, count: usize, ymin: f64, ymax: f64) -> PointSet {
    let points = (0..count)
        .map(|_| {
            let x = rng.random_range(0.001..0.999);
            let mag = rng.random_range(ymin..ymax);
            Point::new(x, if rng.random::<bool>() { mag } else { -mag })
        })
        .collect();
    PointSet::new(0.0, 1.0, points).unwrap()
}

/// Jump via exp/ln rather than powf, written independently of the library.
fn oracle_jump(y: f64, alpha: f64) -> f64 {
    let mag = (-(y.abs().ln()) / alpha).exp();
    if y < 0.0 {
        -mag
    } else {
        mag
    }
}

#[test]
fn two_point_cosine_matches_hand_oracle() {
    let f = solve_sequential(&set(&[(0.3, 2.0), (0.6, -3.0)]), &cosine(), 0.0).unwrap();
    let v1 = oracle_jump(2.0, 0.57 + 0.4 * 0f64.cos());
    let v2 = v1 + oracle_jump(-3.0, 0.57 + 0.4 * v1.cos());
    assert!((f.eval(0.3).unwrap() - v1).abs() < 1e-14);
    assert!((f.eval(0.6).unwrap() - v2).abs() < 1e-14);
    assert!((f.eval(0.3).unwrap() - 2f64.powf(-1.0 / 0.97)).abs() < 1e-14);
    assert_eq!(f.left_limit(0.6).unwrap(), f.eval(0.3).unwrap());
    assert_eq!(f.eval(0.0).unwrap(), 0.0);
}

#[test]
fn jump_rule_holds_at_every_breakpoint() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let alpha = cosine();
    for _ in 0..50 {
        let mut ps = random_set(&mut rng, 40, 0.2, 20.0).points().to_vec();
        // Force some co-located points.
        ps.push(Point::new(ps[0].x, 3.5));
        ps.push(Point::new(ps[1].x, -0.8));
        let ps = PointSet::new(0.0, 1.0, ps).unwrap();
        let f = solve_sequential(&ps, &alpha, 0.1).unwrap();
        for (k, x) in f.breakpoints().iter().enumerate() {
            let pre = f.values()[k];
            assert_eq!(f.left_limit(*x).unwrap(), pre);
            let al = 0.57 + 0.4 * pre.cos();
            let expected: f64 = ps.points().iter().filter(|p| p.x == *x).map(|p| oracle_jump(p.y, al)).sum();
            let got = f.values()[k + 1] - pre;
            assert!((got - expected).abs() <= 1e-12 * (1.0 + expected.abs()), "{got} vs {expected}");
        }
    }
}

#[test]
fn truncation_examples() {
    let ps = set(&[(0.2, 0.5), (0.4, 3.0), (0.5, -7.0), (0.8, 1.5)]);
    let alpha = cosine();
    assert_eq!(solve_truncated(&ps, &alpha, 0.0, 0.1).unwrap(), JumpFunction::constant(0.0, 1.0, 0.0));
    assert_eq!(solve_truncated(&ps, &alpha, 0.0, 100.0).unwrap(), solve_sequential(&ps, &alpha, 0.0).unwrap());
    let filtered = set(&[(0.2, 0.5), (0.4, 3.0), (0.8, 1.5)]);
    assert_eq!(solve_truncated(&ps, &alpha, 0.0, 3.0).unwrap(), solve_sequential(&filtered, &alpha, 0.0).unwrap());
}

#[test]
fn truncation_bound_single_tail_point() {
    let alpha = AlphaModel::constant(0.5).unwrap();
    let b = truncation_error_bound(&set(&[(0.5, 4.0)]), &alpha, 2.0);
    assert_eq!(b.product, 0.0625);
}

#[test]
fn bounds_dominate_truncation_and_cauchy_errors() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let alpha = cosine();
    for _ in 0..100 {
        let count = rng.random_range(20..=200);
        let ps = random_set(&mut rng, count, 1.0, 50.0);
        let full = solve_sequential(&ps, &alpha, 0.0).unwrap();
        let levels = [1.0, 2.0, 5.0, 10.0, 20.0, 35.0, 50.0];
        for (i, &n) in levels.iter().enumerate() {
            let fn_ = solve_truncated(&ps, &alpha, 0.0, n).unwrap();
            let bound = truncation_error_bound(&ps, &alpha, n);
            let err = fn_.sup_distance(&full).unwrap();
            assert!(err <= bound.product * (1.0 + 1e-12), "n={n}: {err} > {}", bound.product);
            assert!(bound.exponential >= bound.product);
            for &m in &levels[i + 1..] {
                let fm = solve_truncated(&ps, &alpha, 0.0, m).unwrap();
                let c = cauchy_bound(&ps, &alpha, n, m);
                assert!(fm.sup_distance(&fn_).unwrap() <= c.product * (1.0 + 1e-12));
            }
        }
    }
}

#[test]
fn picard_agrees_with_sequential_on_contractive_sets() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let alpha = cosine();
    let mut tested = 0;
    for _ in 0..1000 {
        let ps = random_set(&mut rng, 50, 5e3, 5e5);
        if contraction_sum(&ps, &alpha) >= 0.5 {
            continue;
        }
        let tol = 1e-12;
        let sol = solve_picard(&ps, &alpha, 0.3, tol, 200).unwrap();
        let seq = solve_sequential(&ps, &alpha, 0.3).unwrap();
        assert!(sol.function.sup_distance(&seq).unwrap() < 1e-10);
        assert!(sol.function.sup_distance(&seq).unwrap() <= 10.0 * tol);
        tested += 1;
        if tested == 50 {
            return;
        }
    }
    panic!("only {tested} contractive sets drawn");
}

#[test]
fn nonautonomous_matches_two_line_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let field = NonAutonomousAlpha::new(|_, _, g| 0.4 + 0.2 * g, 0.4, 0.6).unwrap();
    let g = |t: f64| t;
    for _ in 0..20 {
        let ps = random_set(&mut rng, 15, 0.5, 5.0);
        let f = solve_nonautonomous(&ps, &field, &g, 0.0).unwrap();
        let mut z = 0.0;
        for p in ps.points() {
            z += oracle_jump(p.y, 0.4 + 0.2 * p.x);
            assert!((f.eval(p.x).unwrap() - z).abs() < 1e-12);
        }
    }
}

#[test]
fn metadata_records_hash_and_model() {
    let ps = set(&[(0.3, 2.0)]);
    let f = solve_sequential(&ps, &cosine(), 0.0).unwrap();
    let meta = f.metadata(&cosine(), &ps);
    assert_eq!(meta.point_set_hash, ps.content_hash());
    assert_eq!(meta.breakpoints, 1);
    let json = serde_json::to_string(&meta).unwrap();
    let back: JumpFunctionMeta = serde_json::from_str(&json).unwrap();
    assert_eq!(back, meta);
}

fn arb_points() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((0.001f64..0.999, prop_oneof![-30.0f64..-0.3, 0.3f64..30.0]), 0..60)
}

fn to_set(raw: &[(f64, f64)]) -> PointSet {
    PointSet::new(0.0, 1.0, raw.iter().map(|&(x, y)| Point::new(x, y)).collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn restart_reproduces_path_bitwise(raw in arb_points(), s in 0.01f64..0.99, a0 in -2.0f64..2.0) {
        let ps = to_set(&raw);
        let alpha = cosine();
        let full = solve_sequential(&ps, &alpha, a0).unwrap();
        let tail = ps.restricted(s, 1.0).unwrap();
        let restarted = solve_sequential(&tail, &alpha, full.eval(s).unwrap()).unwrap();
        for x in tail.points().iter().map(|p| p.x) {
            prop_assert_eq!(restarted.eval(x).unwrap().to_bits(), full.eval(x).unwrap().to_bits());
        }
        prop_assert_eq!(restarted.terminal_value().to_bits(), full.terminal_value().to_bits());
    }

    #[test]
    fn sign_symmetry_for_even_alpha(raw in arb_points()) {
        let ps = to_set(&raw);
        let neg = to_set(&raw.iter().map(|&(x, y)| (x, -y)).collect::<Vec<_>>());
        let alpha = cosine();
        let f = solve_sequential(&ps, &alpha, 0.0).unwrap();
        let g = solve_sequential(&neg, &alpha, 0.0).unwrap();
        for (u, v) in f.values().iter().zip(g.values()) {
            prop_assert_eq!(*u, -*v);
        }
    }

    #[test]
    fn positive_marks_give_nondecreasing_paths(raw in arb_points(), a0 in -3.0f64..3.0) {
        let ps = to_set(&raw.iter().map(|&(x, y)| (x, y.abs())).collect::<Vec<_>>());
        let f = solve_sequential(&ps, &AlphaModel::rational(0.15, 0.8, 5.0).unwrap(), a0).unwrap();
        prop_assert!(f.values().windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn eval_is_right_continuous(raw in arb_points()) {
        let ps = to_set(&raw);
        let f = solve_sequential(&ps, &cosine(), 0.0).unwrap();
        for (k, x) in f.breakpoints().iter().enumerate() {
            prop_assert_eq!(f.eval(*x).unwrap(), f.values()[k + 1]);
            prop_assert_eq!(f.left_limit(*x).unwrap(), f.values()[k]);
        }
    }
}
