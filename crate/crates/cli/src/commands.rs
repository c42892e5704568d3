use crate::config::{RunConfig, Start};
use crate::output::Artifacts;
use crate::{CliError, Outcome};
use gasball::equilibrium::equilibrium;
use gasball::sampler::{sample_microcanonical, write_states_csv, MicrocanonicalChain};
use gasball::stats::{equipartition_report, simulate as run_dynamics, EmpiricalSummary};
use gasball::validation::criteria::{run_suite, write_results_csv, SuiteConfig, CRITERIA};
use gasball::validation::{ball_high_start, ball_resting_start, vertical_line_start};
use gasball::{HeightProfile, ModelParams, PredictedMarginal, SystemState};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::fmt::Write as _;
use std::io::Write;

fn has_ball(p: &ModelParams) -> bool {
    p.ball_radius > 0.0 && p.ball_mass > 0.0
}

pub fn solve(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let p = cfg.params()?;
    let sol = equilibrium(&p)?;
    let profile = if has_ball(&p) { Some(HeightProfile::new(p.n_particles, &p)?) } else { None };

    let mut out = Artifacts::new(cfg, "solve");
    out.add("equilibrium.csv", |w| {
        writeln!(w, "y_a,lambda_a,u_a,lambda_star,floating,residual_k,residual_g,kinetic_energy_per_particle")?;
        writeln!(
            w,
            "{:e},{:e},{:e},{:e},{},{:e},{:e},{:e}",
            sol.y_a,
            sol.lambda_a,
            sol.u_a,
            sol.lambda_star,
            sol.floating,
            sol.residual_k,
            sol.residual_g,
            sol.kinetic_energy_per_particle(&p)
        )?;
        Ok(())
    })?;
    out.add("psi_profile.csv", |w| {
        writeln!(w, "y,ln_psi,density")?;
        if let Some(prof) = &profile {
            for k in 0..prof.y.len() {
                writeln!(w, "{:e},{:e},{:e}", prof.y[k], prof.ln_psi[k], prof.density[k])?;
            }
        }
        Ok(())
    })?;
    out.write()?;

    println!(
        "y_A = {:.10}, lambda_A = {:.10}, u_A = {:.10}, floating = {}",
        sol.y_a, sol.lambda_a, sol.u_a, sol.floating
    );
    Ok(if has_ball(&p) && !sol.floating { Outcome::NotFloating } else { Outcome::Ok })
}

pub fn sample(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let p = cfg.params()?;
    let seed = cfg.seed()?;
    p.require_ball().map_err(|e| CliError::Config(e.to_string()))?;
    let (states, diag) = sample_microcanonical(&p, cfg.mcmc_config(seed), cfg.run.samples)?;

    let mut out = Artifacts::new(cfg, "sample");
    out.add("states.csv", |w| Ok(write_states_csv(w, &states)?))?;
    out.add("sample_diagnostics.csv", |w| {
        writeln!(w, "states,particle_acceptance,ball_acceptance,particle_scale,ball_scale")?;
        writeln!(
            w,
            "{},{:e},{:e},{:e},{:e}",
            states.len(),
            diag.particle_acceptance(),
            diag.ball_acceptance(),
            diag.particle_scale,
            diag.ball_scale
        )?;
        Ok(())
    })?;
    out.write()?;
    println!("{} states, particle acceptance {:.3}", states.len(), diag.particle_acceptance());
    Ok(Outcome::Ok)
}

fn initial_state(cfg: &RunConfig, p: &ModelParams, seed: u64, y_a: f64) -> Result<SystemState, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let height = cfg.run.start_height.unwrap_or(y_a);
    let bad_start = |e: gasball::Error| CliError::Config(format!("initial state: {e}"));
    match cfg.run.start {
        Start::Microcanonical => {
            let mut chain = MicrocanonicalChain::new(p, cfg.mcmc_config(seed))?;
            chain.burn_in();
            Ok(chain.next_state()?)
        }
        Start::Resting => ball_resting_start(p, &mut rng).map_err(bad_start),
        Start::High => ball_high_start(p, height, &mut rng).map_err(bad_start),
        Start::Vertical => vertical_line_start(p, height, &mut rng).map_err(bad_start),
    }
}

struct Row {
    name: &'static str,
    value: Option<f64>,
    tolerance: f64,
}

impl Row {
    fn status(&self) -> &'static str {
        match self.value {
            None => "SKIP",
            Some(v) if v <= self.tolerance => "PASS",
            Some(_) => "FAIL",
        }
    }
}

pub fn simulate(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let p = cfg.params()?;
    let seed = cfg.seed()?;
    let duration = cfg.duration()?;
    let mode = cfg.mode()?;
    p.require_ball().map_err(|e| CliError::Config(e.to_string()))?;
    let sol = equilibrium(&p)?;
    let predicted = PredictedMarginal::new(sol.lambda_a, sol.y_a, &p)?;

    let initial = initial_state(cfg, &p, seed, sol.y_a)?;
    let obs_dt = cfg.run.observation_dt.unwrap_or(duration / 1e4);
    let t_start = initial.time + cfg.run.t_start.unwrap_or(0.1 * duration);
    let layout = EmpiricalSummary::default_config(sol.lambda_a, sol.y_a, &p, t_start);
    let (mut summary, report) = run_dynamics(&initial, &p, mode, seed, duration, obs_dt, layout)?;
    summary.config_hash = cfg.hash();

    let equi = equipartition_report(&summary, sol.lambda_a, &p);
    let gas_ks = summary.ks_gas(&predicted).ok();
    let ball_ks = HeightProfile::new(p.n_particles, &p).ok().and_then(|prof| summary.ks_ball(&prof).ok());
    let tol = cfg.tolerances;
    let rows = [
        Row {
            name: "ball_height_relative_error",
            value: (sol.floating && summary.ball_time > 0.0).then(|| (summary.ball_mean() / sol.y_a - 1.0).abs()),
            tolerance: tol.ball_height,
        },
        Row { name: "gas_height_ks", value: gas_ks, tolerance: tol.gas_ks },
        Row {
            name: "kinetic_energy_relative_error",
            value: (summary.snapshots > 0).then(|| equi.relative_error()),
            tolerance: tol.kinetic_energy,
        },
        Row { name: "energy_drift", value: Some(report.relative_drift()), tolerance: tol.energy_drift },
    ];

    let mut text = String::new();
    writeln!(text, "mode {mode}, n {}, d {}, duration {duration:e}, averaging from t = {t_start:e}", p.n_particles, p.dim).unwrap();
    writeln!(
        text,
        "predicted: y_A {:.10e}, lambda_A {:.10e}, u_A {:.10e}, kinetic energy per particle {:.10e}, floating {}",
        sol.y_a, sol.lambda_a, sol.u_a, equi.target, sol.floating
    )
    .unwrap();
    writeln!(
        text,
        "observed: ball height {:.10e}, kinetic energy per particle {:.10e} +- {:.3e}, ball kinetic energy {:.10e} +- {:.3e}",
        summary.ball_mean(),
        equi.particle_ke,
        equi.particle_ke_se,
        equi.ball_ke,
        equi.ball_ke_se
    )
    .unwrap();
    match ball_ks {
        Some(ks) => writeln!(text, "ball height KS against the finite-n density: {ks:.6e}").unwrap(),
        None => writeln!(text, "ball height KS against the finite-n density: n/a").unwrap(),
    }
    writeln!(
        text,
        "events {} (bottom {}, side {}, ball {}), max horizontal speed {:e}",
        report.events,
        report.count(gasball::EventKind::ParticleBottom),
        report.count(gasball::EventKind::ParticleSidewall),
        report.count(gasball::EventKind::ParticleBall),
        summary.max_horizontal_speed
    )
    .unwrap();
    writeln!(text).unwrap();
    writeln!(text, "{:<32}{:>16}{:>14}  result", "check", "value", "tolerance").unwrap();
    for r in &rows {
        let v = r.value.map_or_else(|| "n/a".to_string(), |v| format!("{v:.6e}"));
        writeln!(text, "{:<32}{:>16}{:>14.3e}  {}", r.name, v, r.tolerance, r.status()).unwrap();
    }
    let failed = rows.iter().any(|r| r.status() == "FAIL");

    let mut out = Artifacts::new(cfg, "simulate");
    out.add("summary.csv", |w| Ok(summary.write_csv(w)?))?;
    out.add("histograms.csv", |w| Ok(summary.write_histograms_csv(w)?))?;
    out.add_text("report.txt", &text)?;
    out.write()?;
    print!("{text}");

    Ok(if failed {
        Outcome::ValidationFailed
    } else if !sol.floating {
        Outcome::NotFloating
    } else {
        Outcome::Ok
    })
}

pub fn validate(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let seed = cfg.seed()?;
    let ids: Vec<u32> = if cfg.validate.criteria.is_empty() {
        CRITERIA.iter().map(|c| c.0).collect()
    } else {
        let mut v = cfg.validate.criteria.clone();
        v.sort_unstable();
        v.dedup();
        v
    };
    let workers = match cfg.validate.workers {
        0 => std::thread::available_parallelism().map_or(1, |n| n.get()),
        w => w,
    };
    let suite = SuiteConfig { tolerance_scale: cfg.validate.tolerance_scale, seed };
    let results = run_suite(&ids, &suite, workers);
    for r in &results {
        println!("{}", r.summary_line());
    }
    let failed = results.iter().filter(|r| !r.passed()).count();
    println!("validate: {} passed, {failed} failed", results.len() - failed);

    let mut out = Artifacts::new(cfg, "validate");
    out.add("validation.csv", |w| Ok(write_results_csv(w, &results)?))?;
    out.write()?;
    Ok(if failed > 0 { Outcome::ValidationFailed } else { Outcome::Ok })
}
