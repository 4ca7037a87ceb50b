use proptest::prelude::*;
use rand::SeedableRng;
use rotnum_core::sde::{sampling_ladder, BrownianStream, TrigTerm, VectorField, VectorFieldSet};
use rotnum_core::LiftParams;
use statrs::distribution::{ContinuousCDF, Normal};

fn fields() -> Vec<VectorFieldSet> {
    vec![
        VectorFieldSet::constant(0.7, 0.5),
        VectorFieldSet::north_south(),
        VectorFieldSet::new(
            VectorField::Trigpoly {
                constant: 0.3,
                terms: vec![TrigTerm { freq: 1, sin: 0.4, cos: 0.1 }],
            },
            vec![VectorField::Trigpoly {
                constant: 0.5,
                terms: vec![TrigTerm { freq: 2, sin: 0.0, cos: 0.2 }],
            }],
        )
        .unwrap(),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn segments_preserve_order_and_turns(seed in any::<u64>(), which in 0usize..3, dt in 0.01..0.5f64) {
        let vf = &fields()[which];
        let mut stream = BrownianStream::new(seed, 0, dt / 20.0, vf.dim()).unwrap();
        let seg = stream.next_segment(dt).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..1000 {
            let x: f64 = rand::Rng::random_range(&mut rng, -2.0..2.0);
            let h: f64 = rand::Rng::random_range(&mut rng, 1e-6..1.0);
            prop_assert!(seg.psi(vf, x) < seg.psi(vf, x + h));
        }
        for x in [-1.3, -0.2, 0.0, 0.45, 0.9] {
            let gap = seg.psi(vf, x + 1.0) - seg.psi(vf, x) - 1.0;
            prop_assert!(gap.abs() < 1e-12, "{gap}");
        }
    }
}


#[test]
fn constant_coefficients_give_gaussian_segments() {
    let (a, b, dt, q) = (0.7, 0.5, 0.1, 0.3);
    let vf = VectorFieldSet::constant(a, b);
    let mut stream = BrownianStream::new(11, 0, dt / 20.0, 1).unwrap();
    let n = 10_000;
    let mut xs: Vec<f64> = (0..n).map(|_| stream.next_segment(dt).unwrap().psi(&vf, q)).collect();
    xs.sort_by(f64::total_cmp);
    let law = Normal::new(q + a * dt, b * dt.sqrt()).unwrap();
    let ks = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let c = law.cdf(x);
            (c - i as f64 / n as f64).max((i + 1) as f64 / n as f64 - c)
        })
        .fold(0.0, f64::max);
    // 1% critical value of the one-sample Kolmogorov–Smirnov statistic
    assert!(ks < 1.628 / (n as f64).sqrt(), "KS = {ks}");
}

#[test]
fn crossing_rate_decays_along_dyadic_ladder() {
    let dts = [0.4, 0.2, 0.1, 0.05, 0.025];
    let params = LiftParams::new(0.0, -0.5);
    for vf in fields() {
        let rows = sampling_ladder(&vf, params, &dts, 20_000, 3, 10).unwrap();
        let diag: Vec<f64> = rows.iter().map(|r| r.crossing_diag).collect();
        assert!(diag.windows(2).all(|w| w[1] <= w[0]), "{diag:?}");
    }
}

#[test]
fn discretization_outside_window_misses_rotation() {
    // α ≥ q forces every lift to move by at least α − q per step
    let vf = VectorFieldSet::constant(0.7, 0.5);
    let rows = sampling_ladder(&vf, LiftParams::new(0.0, 0.3), &[0.1, 0.05, 0.025], 20_000, 5, 10).unwrap();
    for r in &rows {
        assert!(r.rho_rescaled > 0.3 / r.delta_t, "{r:?}");
    }
    assert!(rows.windows(2).all(|w| (w[1].rho_rescaled - 0.7).abs() > (w[0].rho_rescaled - 0.7).abs()));
}
