use std::f64::consts::PI;
use std::sync::Arc;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use zerovisc::norms::{
    conormal_derivative, conormal_derivative_in_time, dy, gevrey_norm, hardy_apply, hardy_corpus,
    phi, product_corpus, random_smooth_field, recovery_corpus, NormSpec, PRODUCT_BOUND,
};
use zerovisc::{Field2D, Grid2D, SimParams};

const LX: f64 = 2.0 * PI;

fn grid(nx: usize, ny: usize) -> Arc<Grid2D> {
    Arc::new(Grid2D::new(nx, ny, LX, 4.0, 1.5).unwrap())
}

fn spec(k: usize, mu: f64) -> NormSpec {
    NormSpec::from_params(&SimParams::default(), k, mu, 0.0)
}

#[test]
fn conormal_of_y_is_delta_phi() {
    let g = grid(8, 41);
    let f = Field2D::from_fn(&g, |_, y| y);
    let z = conormal_derivative(&f, [0, 0, 1], 0.1).unwrap();
    for (j, &y) in g.y_nodes().iter().enumerate() {
        assert!((z.values()[(3, j)] - 0.1 * phi(y)).abs() < 1e-13);
    }
}

#[test]
fn mixed_conormal_derivative_matches_symbolic_oracle() {
    // (delta d_x)^2 (delta phi d_y) [sin x e^{-y}] = delta^3 phi sin x e^{-y}
    let delta = 0.1;
    let err = |n: usize| {
        let g = grid(n, 2 * n + 1);
        let f = Field2D::from_fn(&g, |x, y| x.sin() * (-y).exp());
        let z = conormal_derivative(&f, [0, 2, 1], delta).unwrap();
        let exact = Field2D::from_fn(&g, |x, y| delta.powi(3) * phi(y) * x.sin() * (-y).exp());
        z.zip_with(&exact, |a, b| a - b).max_abs() / delta.powi(3)
    };
    let (e1, e2) = (err(16), err(32));
    println!("mixed conormal errors {e1:e} {e2:e}");
    assert!(e1 < 1e-3 && (e1 / e2).log2() > 3.5);
}

#[test]
fn time_conormal_derivative_of_linear_motion() {
    let g = grid(8, 21);
    let times: Vec<f64> = (0..4).map(|n| 0.1 * n as f64).collect();
    let series: Vec<Field2D> = times
        .iter()
        .map(|&t| Field2D::from_fn(&g, |x, y| (2.0 + t) * x.cos() * y))
        .collect();
    for n in 0..4 {
        let z = conormal_derivative_in_time(&series, &times, n, [1, 0, 0], 0.1).unwrap();
        let exact = Field2D::from_fn(&g, |x, y| 0.1 * x.cos() * y);
        assert!(z.zip_with(&exact, |a, b| a - b).max_abs() < 1e-12);
    }
}

#[test]
fn commutator_defect_is_second_order() {
    // [Z2, d_y] f = -delta phi' d_y f; the discrete defect should vanish with the grid
    let delta = 0.1;
    let defect = |ny: usize| {
        let g = grid(8, ny);
        let f = Field2D::from_fn(&g, |x, y| x.cos() * (y * 1.3).sin() * (-0.5 * y).exp());
        let z2 = |h: &Field2D| conormal_derivative(h, [0, 0, 1], delta).unwrap();
        let fy = dy(&f);
        let lhs = z2(&fy).zip_with(&dy(&z2(&f)), |a, b| a - b);
        let corr = Field2D::from_fn(&g, |_, y| delta / (1.0 + y).powi(2));
        let d = Field2D::from_array(
            &g,
            lhs.values() + &(corr.values() * fy.values()),
        )
        .unwrap();
        d.max_abs()
    };
    let (a, b, c) = (defect(41), defect(81), defect(161));
    let (o1, o2) = ((a / b).log2(), (b / c).log2());
    println!("commutator defect {a:e} {b:e} {c:e} orders {o1:.2} {o2:.2}");
    assert!(o1 >= 1.8 && o2 >= 1.8);
}

#[test]
fn single_mode_norm_matches_direct_sum() {
    let g = grid(32, 81);
    let (delta, mu, k) = (0.1, 0.004, 1);
    let f = Field2D::from_fn(&g, |x, y| (3.0 * x).cos() * y * (-y).exp());
    let n = gevrey_norm(&f, &spec(k, mu)).unwrap();
    // every Fourier coefficient sits at |xi| = 3, so the weight factors out
    let z1 = conormal_derivative(&f, [0, 1, 0], delta).unwrap().l2_norm();
    let z2 = conormal_derivative(&f, [0, 0, 1], delta).unwrap().l2_norm();
    let exact = (3.0 * mu).exp() * (f.l2_norm().powi(2) + z1 * z1 + z2 * z2).sqrt();
    assert!((n - exact).abs() < 1e-12 * exact, "{n} {exact}");
}

#[test]
fn hardy_corpus_respects_the_classical_constant() {
    let g = grid(32, 161);
    let recs = hardy_corpus(&g, 100, 11);
    let worst = recs.iter().map(|r| r.ratio).fold(0.0, f64::max);
    println!("hardy worst ratio {worst}");
    assert!(recs.iter().all(|r| r.pass));
}

#[test]
fn hardy_of_wall_singular_profile_approaches_two() {
    // f = y^{-1/2 + s} saturates the constant 2 as s -> 0; here the trapezoid
    // rule only needs to stay below the bound
    let g = Arc::new(Grid2D::with_wall_spacing(4, 401, LX, 4.0, 1e-4).unwrap());
    let f = Field2D::from_fn(&g, |_, y| (y + 1e-6).powf(-0.4));
    let r = hardy_apply(&f).l2_norm() / f.l2_norm();
    println!("hardy near-extremal ratio {r}");
    assert!(r > 1.3 && r <= 2.0 + 5.0 * g.dy_max());
}

#[test]
fn recovery_and_product_corpora_pass() {
    let g = grid(32, 81);
    let rec = recovery_corpus(&g, 100, 13, 4, 0.1).unwrap();
    assert!(rec.iter().all(|r| r.pass && r.ratio <= 1.0 / std::f64::consts::E + 1e-12));
    let prod = product_corpus(&g, 100, 7, 8, 0.005, 0.1).unwrap();
    let worst = prod.iter().map(|r| r.ratio).fold(0.0, f64::max);
    assert!(worst < PRODUCT_BOUND && prod.iter().all(|r| r.pass));
}

fn field_from_seed(seed: u64) -> Field2D {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    random_smooth_field(&grid(16, 41), &mut r)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn gevrey_norm_is_homogeneous(seed in any::<u64>(), c in -5.0..5.0f64, k in 0usize..4) {
        let f = field_from_seed(seed);
        let s = spec(k, 0.003);
        let a = gevrey_norm(&f.map(|v| c * v), &s).unwrap();
        let b = c.abs() * gevrey_norm(&f, &s).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * b.max(1e-300));
    }

    #[test]
    fn gevrey_norm_obeys_triangle(s1 in any::<u64>(), s2 in any::<u64>(), k in 0usize..4) {
        let (f, g) = (field_from_seed(s1), field_from_seed(s2));
        let s = spec(k, 0.003);
        let sum = gevrey_norm(&f.zip_with(&g, |a, b| a + b), &s).unwrap();
        let bound = gevrey_norm(&f, &s).unwrap() + gevrey_norm(&g, &s).unwrap();
        prop_assert!(sum <= bound * (1.0 + 1e-12));
    }

    #[test]
    fn gevrey_norm_grows_with_radius(seed in any::<u64>(), a in 0.0..0.0099f64, b in 0.0..0.0099f64) {
        let f = field_from_seed(seed);
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(gevrey_norm(&f, &spec(2, lo)).unwrap() <= gevrey_norm(&f, &spec(2, hi)).unwrap());
    }

    #[test]
    fn hardy_bound_on_random_fields(seed in any::<u64>()) {
        let f = field_from_seed(seed);
        let r = hardy_apply(&f).l2_norm() / f.l2_norm();
        prop_assert!(r <= 2.0 + 5.0 * f.grid().dy_max());
    }
}
