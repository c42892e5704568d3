use gasball::analytics::gas_law_point;
use gasball::equilibrium::solve_archimedes;
use gasball::sampler::*;
use gasball::stats::ks_distance;
use gasball::validation::{concentrated_fixture, reference_fixture};
use gasball::{Error, McmcConfig, ModelParams, PredictedMarginal};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn velocities_have_exact_energy_and_equal_mass_weighted_spread() {
    let p = concentrated_fixture(8);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mp = p.gas_mass / p.n_particles as f64;
    let d = p.dim;
    let draws = 40_000;
    let mut per_coord = vec![0.0; (p.n_particles + 1) * d];
    for _ in 0..draws {
        let v = sample_velocities(0.5, &p, &mut rng).unwrap();
        let ke: f64 = v
            .iter()
            .enumerate()
            .map(|(k, x)| 0.5 * if k / d == p.n_particles { p.ball_mass } else { mp } * x * x)
            .sum();
        assert!((ke - (p.energy - 0.5)).abs() < 1e-12 * p.energy);
        for (k, x) in v.iter().enumerate() {
            let m = if k / d == p.n_particles { p.ball_mass } else { mp };
            per_coord[k] += m * x * x / draws as f64;
        }
    }
    // every coordinate carries 2 (E - V) / (d (n + 1)) on average
    let target = 2.0 * (p.energy - 0.5) / per_coord.len() as f64;
    for c in per_coord {
        assert!((c / target - 1.0).abs() < 0.05, "{c} vs {target}");
    }
    assert!(matches!(sample_velocities(p.energy, &p, &mut rng), Err(Error::EnergyExhausted { .. })));
}

#[test]
fn nu_draws_follow_the_predicted_marginal() {
    let p = reference_fixture(100);
    let s = solve_archimedes(&p).unwrap();
    let point = gas_law_point(s.lambda_a, s.y_a, &p).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let ball_x = vec![0.0; p.dim - 1];
    let n = 50_000;
    let mut ys = Vec::with_capacity(n);
    let mut attempts = 0;
    for _ in 0..n {
        let (x, y, a) = sample_nu(&ball_x, s.y_a, s.lambda_a, &p, &mut rng).unwrap();
        let dy = y - s.y_a;
        assert!(x[0] * x[0] + dy * dy >= p.ball_radius * p.ball_radius);
        assert!(x[0].abs() <= p.base_radius);
        ys.push(y);
        attempts += a;
    }
    let mean = ys.iter().sum::<f64>() / n as f64;
    let se = (point.sigma2 / n as f64).sqrt();
    assert!((mean - point.u).abs() < 4.0 * se, "{mean} vs {}", point.u);
    // a draw is kept with probability q / |D_b|
    let rate = n as f64 / attempts as f64;
    let expected = point.q / p.base_area();
    let rate_se = (expected * (1.0 - expected) / attempts as f64).sqrt();
    assert!((rate - expected).abs() < 4.0 * rate_se, "{rate} vs {expected}");
    let marginal = PredictedMarginal::new(s.lambda_a, s.y_a, &p).unwrap();
    let ks = ks_distance(&ys, |y| marginal.cdf(y)).unwrap();
    assert!(ks < 1.63 / (n as f64).sqrt(), "KS {ks}");
    assert!(sample_nu(&ball_x, s.y_a, 0.0, &p, &mut rng).is_err());
}

#[test]
fn microcanonical_states_are_admissible() {
    let p = concentrated_fixture(30);
    let cfg = McmcConfig {
        burn_in: 20_000,
        seed: 3,
        ..McmcConfig::default()
    };
    let (states, diag) = sample_microcanonical(&p, cfg, 50).unwrap();
    for s in &states {
        s.check_invariants(&p, 0.0, 1e-10).unwrap();
    }
    assert!(diag.particle_acceptance() > 0.05 && diag.particle_acceptance() < 0.95);
    assert!(diag.ball_proposals > 0);
    // chains are reproducible from the seed
    let (again, _) = sample_microcanonical(&p, cfg, 50).unwrap();
    assert_eq!(states, again);
    let mut csv = Vec::new();
    write_states_csv(&mut csv, &states).unwrap();
    assert_eq!(String::from_utf8(csv).unwrap().lines().count(), 51);
}

#[test]
fn slab_chain_keeps_the_mean_height() {
    let p = reference_fixture(40);
    let s = solve_archimedes(&p).unwrap();
    let ball_x = vec![0.0; p.dim - 1];
    let cfg = McmcConfig {
        burn_in: 5_000,
        seed: 4,
        ..McmcConfig::default()
    };
    let states = sample_conditional_slab(&ball_x, s.y_a, s.u_a, p.n_particles, &p, cfg, 100).unwrap();
    for st in &states {
        let mean = st.heights.iter().sum::<f64>() / st.heights.len() as f64;
        assert!((mean - s.u_a).abs() < 1e-9);
        for (i, &y) in st.heights.iter().enumerate() {
            let x = st.horiz[i];
            let dy = y - s.y_a;
            assert!(y >= 0.0 && x.abs() <= p.base_radius);
            assert!(x * x + dy * dy >= p.ball_radius * p.ball_radius);
        }
    }
    assert!(sample_conditional_slab(&ball_x, s.y_a, -1.0, 4, &p, cfg, 1).is_err());
}

#[test]
fn mcmc_config_is_validated() {
    let p = concentrated_fixture(5);
    for cfg in [
        McmcConfig { scale: 0.0, ..McmcConfig::default() },
        McmcConfig { adapt_window: 0, ..McmcConfig::default() },
        McmcConfig { ball_move_prob: 1.5, ..McmcConfig::default() },
    ] {
        assert!(matches!(MicrocanonicalChain::new(&p, cfg), Err(Error::InvalidParam(_))));
    }
    let base = ModelParams { n_particles: 0, ..p };
    assert!(MicrocanonicalChain::new(&base, McmcConfig::default()).is_err());
}

#[test]
fn uniform_base_points_stay_in_the_disc() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut x = vec![0.0; 2];
    let mut r2 = 0.0;
    let n = 100_000;
    for _ in 0..n {
        uniform_in_base(3, 2.0, &mut rng, &mut x);
        let s = x[0] * x[0] + x[1] * x[1];
        assert!(s <= 4.0);
        r2 += s / n as f64;
    }
    // E|x|^2 = R^2 / 2 for a uniform disc
    assert!((r2 - 2.0).abs() < 0.02);
}
