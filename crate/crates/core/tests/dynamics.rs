use gasball::dynamics::kernels::*;
use gasball::dynamics::{write_events_csv, EventKind, Simulation, TrajectoryWriter};
use gasball::validation::criteria::oracle_fixture;
use gasball::validation::oracle::RecomputeSimulation;
use gasball::validation::*;
use gasball::{Error, ModelParams, ReflectionMode, SystemState};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[test]
fn lambertian_cosine_moments() {
    // E[cos theta] is pi/4 for a cos-law on a half circle and 2/3 on a
    // hemisphere
    let mut r = rng(11);
    for (dim, inner, expected) in [
        (2, [0.0, 0.0, 1.0], std::f64::consts::FRAC_PI_4),
        (2, [-1.0, 0.0, 0.0], std::f64::consts::FRAC_PI_4),
        (3, [0.0, 0.0, 1.0], 2.0 / 3.0),
        (3, [0.6, -0.8, 0.0], 2.0 / 3.0),
    ] {
        let samples = 200_000;
        let (mut s, mut s2) = (0.0, 0.0);
        for _ in 0..samples {
            let d = lambertian_direction(&inner, dim, &mut r);
            let c = dot(&d, &inner);
            s += c;
            s2 += c * c;
        }
        let mean = s / samples as f64;
        let se = ((s2 / samples as f64 - mean * mean) / samples as f64).sqrt();
        assert!((mean - expected).abs() < 4.0 * se, "dim {dim}: {mean} vs {expected}");
        // second moment: 2/3 (d = 2) and 1/2 (d = 3)
        let m2 = s2 / samples as f64;
        let exp2 = if dim == 2 { 2.0 / 3.0 } else { 0.5 };
        assert!((m2 - exp2).abs() < 0.005);
    }
}

#[test]
fn lambertian_tangential_direction_is_symmetric() {
    let mut r = rng(12);
    let inner = [0.0, 0.0, 1.0];
    let (mut sx, mut sy) = (0.0, 0.0);
    for _ in 0..100_000 {
        let d = lambertian_direction(&inner, 3, &mut r);
        sx += d[0];
        sy += d[1];
    }
    assert!(sx.abs() / 1e5 < 0.01 && sy.abs() / 1e5 < 0.01);
}

fn vec3() -> impl Strategy<Value = Vec3> {
    (-3.0f64..3.0, -3.0f64..3.0, -3.0f64..3.0).prop_map(|(a, b, c)| [a, b, c])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn contact_time_lands_on_the_sphere(dp in vec3(), dv in vec3(), r in 0.1f64..1.0) {
        prop_assume!(dot(&dp, &dp) > r * r * 1.0001);
        if let Some(t) = time_to_ball(&dp, &dv, r) {
            let at = [dp[0] + dv[0] * t, dp[1] + dv[1] * t, dp[2] + dv[2] * t];
            prop_assert!((dot(&at, &at).sqrt() - r).abs() < 1e-9);
            // approaching at contact, and outside before it
            prop_assert!(dot(&at, &dv) < 0.0);
            for k in 0..50 {
                let s = t * k as f64 / 50.0;
                let p = [dp[0] + dv[0] * s, dp[1] + dv[1] * s, dp[2] + dv[2] * s];
                prop_assert!(dot(&p, &p).sqrt() >= r - 1e-9);
            }
        } else {
            // dense search for a contact the closed form missed
            let steps = 20_000;
            for k in 0..=steps {
                let s = 10.0 * k as f64 / steps as f64;
                let p = [dp[0] + dv[0] * s, dp[1] + dv[1] * s, dp[2] + dv[2] * s];
                prop_assert!(dot(&p, &p).sqrt() > r * (1.0 - 1e-5), "missed contact at {s}");
            }
        }
    }

    #[test]
    fn collision_conserves_momentum_and_energy(v in vec3(), vb in vec3(), n in vec3(), m in 0.01f64..5.0, mb in 0.01f64..5.0) {
        let len = dot(&n, &n).sqrt();
        prop_assume!(len > 1e-3);
        let n = [n[0] / len, n[1] / len, n[2] / len];
        prop_assume!(dot(&v, &n) - dot(&vb, &n) < -1e-6);
        let (v2, vb2) = resolve_particle_ball(&v, &vb, &n, m, mb).unwrap();
        for k in 0..3 {
            prop_assert!((m * v[k] + mb * vb[k] - m * v2[k] - mb * vb2[k]).abs() < 1e-10);
        }
        let e0 = m * dot(&v, &v) + mb * dot(&vb, &vb);
        let e1 = m * dot(&v2, &v2) + mb * dot(&vb2, &vb2);
        prop_assert!((e0 - e1).abs() <= 1e-12 * e0.max(1.0));
        // separating afterwards
        prop_assert!(dot(&v2, &n) - dot(&vb2, &n) > 0.0);
    }

    #[test]
    fn wall_times_reach_the_walls(x in -0.9f64..0.9, z in -0.4f64..0.4, vx in -2.0f64..2.0, vz in -2.0f64..2.0, h in 0.0f64..3.0, vy in -3.0f64..3.0) {
        prop_assume!(x * x + z * z < 0.81);
        if let Some(t) = sidewall_time([x, z], [vx, vz], 1.0) {
            let (a, b) = (x + vx * t, z + vz * t);
            prop_assert!(((a * a + b * b).sqrt() - 1.0).abs() < 1e-9);
        }
        if let Some(t) = bottom_time(h, vy, 1.5) {
            prop_assert!((h + vy * t - 0.75 * t * t).abs() < 1e-9);
            prop_assert!((impact_speed(h, vy, 1.5) - (vy - 1.5 * t).abs()).abs() < 1e-9);
        }
    }
}

#[test]
fn full_recompute_matches_in_three_dimensions() {
    let p = ModelParams { dim: 3, ..oracle_fixture() };
    let start = ball_high_start(&p, 0.8, &mut rng(5)).unwrap();
    for mode in [ReflectionMode::Specular, ReflectionMode::Lambertian] {
        let mut sim = Simulation::new(&start, &p, mode, 9).unwrap();
        let mut reference = RecomputeSimulation::new(&start, &p, mode, 9).unwrap();
        let mut ball_hits = 0;
        for _ in 0..1000 {
            let e = sim.step(&mut []).unwrap();
            let r = reference.step().unwrap();
            assert_eq!((r.0, r.1, r.2), (e.time, e.kind, e.index));
            ball_hits += (e.kind == EventKind::ParticleBall) as usize;
        }
        assert!(ball_hits > 20);
        assert_eq!(sim.state(), reference.state());
    }
}

#[test]
fn energy_is_conserved_in_three_dimensions() {
    let p = ModelParams { n_particles: 100, ..concentrated_fixture(100) };
    let p = ModelParams { dim: 3, energy: 3.0, ..p };
    let start = ball_high_start(&p, 1.0, &mut rng(6)).unwrap();
    for mode in [ReflectionMode::Specular, ReflectionMode::Lambertian] {
        let mut sim = Simulation::new(&start, &p, mode, 2).unwrap();
        let report = sim.run_events(200_000, &mut []).unwrap();
        assert!(report.relative_drift() < 1e-10, "{mode}: {}", report.relative_drift());
        assert!(report.max_penetration < 1e-9);
        sim.state().check_invariants(&p, 1e-9, 1e-10).unwrap();
    }
}

#[test]
fn ball_resting_on_the_bottom_is_lifted_by_the_gas() {
    let p = concentrated_fixture(100);
    let start = ball_resting_start(&p, &mut rng(7)).unwrap();
    let mut sim = Simulation::new(&start, &p, ReflectionMode::Lambertian, 3).unwrap();
    let report = sim.run_until(50.0, &mut []).unwrap();
    assert!(report.count(EventKind::ParticleBall) > 0);
    assert!(report.relative_drift() < 1e-10);
    sim.state().check_invariants(&p, 1e-9, 1e-10).unwrap();
}

#[test]
fn same_seed_same_trace() {
    let p = concentrated_fixture(30);
    let start = ball_high_start(&p, 1.2, &mut rng(8)).unwrap();
    let run = |seed| {
        let mut sim = Simulation::new(&start, &p, ReflectionMode::Lambertian, seed).unwrap();
        sim.record_events(true);
        sim.run_events(5000, &mut []).unwrap();
        (sim.event_log().to_vec(), sim.state())
    };
    let (a, sa) = run(1);
    let (b, sb) = run(1);
    let (c, _) = run(2);
    assert_eq!(a, b);
    assert_eq!(sa, sb);
    assert_ne!(a, c);
}

#[test]
fn events_come_in_time_order() {
    let p = concentrated_fixture(40);
    let start = ball_high_start(&p, 1.4, &mut rng(9)).unwrap();
    let mut sim = Simulation::new(&start, &p, ReflectionMode::Specular, 0).unwrap();
    let mut last = 0.0;
    for _ in 0..20_000 {
        let e = sim.step(&mut []).unwrap();
        assert!(e.time >= last);
        last = e.time;
    }
    let report = sim.report();
    assert_eq!(report.events, 20_000);
    assert_eq!(report.per_kind.iter().sum::<u64>(), 20_000);
}

#[test]
fn specular_vertical_lines_never_touch_the_ball() {
    let p = concentrated_fixture(60);
    let start = vertical_line_start(&p, 2.0, &mut rng(10)).unwrap();
    let mut sim = Simulation::new(&start, &p, ReflectionMode::Specular, 0).unwrap();
    let report = sim.run_events(50_000, &mut []).unwrap();
    assert_eq!(report.count(EventKind::ParticleBall), 0);
    assert_eq!(report.count(EventKind::ParticleSidewall), 0);
    let s = sim.state();
    for i in 0..=p.n_particles {
        assert_eq!(s.v(i)[0], 0.0);
    }
    // the ball keeps its energy and bounces back to its drop height
    let ball = s.ball_y() + s.v(p.n_particles)[1].powi(2) / (2.0 * p.gravity);
    assert!((ball - 2.0).abs() < 1e-9);
}

#[test]
fn rejects_bad_inputs() {
    let p = concentrated_fixture(10);
    let start = ball_high_start(&p, 1.2, &mut rng(1)).unwrap();
    let mut bad = start.clone();
    bad.heights[0] = -0.5;
    assert!(Simulation::new(&bad, &p, ReflectionMode::Specular, 0).is_err());
    let p4 = ModelParams { dim: 4, ..p };
    let s4 = SystemState::zeros(4, 10);
    assert!(matches!(Simulation::new(&s4, &p4, ReflectionMode::Specular, 0), Err(Error::UnsupportedDimension(4))));
    let mut r = rng(0);
    assert!(matches!(
        reflect_wall(&[0.0, 0.0, -1.0], &[0.0, 0.0, 1.0], ReflectionMode::Lambertian, true, 2, &mut r),
        Err(Error::ModeMismatch)
    ));
    assert_eq!("lambertian".parse::<ReflectionMode>().unwrap(), ReflectionMode::Lambertian);
    assert!("diffuse".parse::<ReflectionMode>().is_err());
}

#[test]
fn csv_writers() {
    let p = concentrated_fixture(4);
    let start = ball_high_start(&p, 1.2, &mut rng(2)).unwrap();
    let mut sim = Simulation::new(&start, &p, ReflectionMode::Specular, 0).unwrap();
    sim.record_events(true);
    sim.set_observation_interval(Some(0.25));
    let mut traj = TrajectoryWriter::new(Vec::new());
    sim.run_until(1.0, &mut [&mut traj]).unwrap();
    let text = String::from_utf8(traj.into_inner()).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t,object,x0,y,v0,v1");
    // five snapshots (t = 0, 0.25, ..., 1) of five objects
    assert_eq!(lines.len(), 1 + 5 * 5);
    let mut ev = Vec::new();
    write_events_csv(&mut ev, sim.event_log()).unwrap();
    let ev = String::from_utf8(ev).unwrap();
    assert_eq!(ev.lines().count(), 1 + sim.event_log().len());
}
