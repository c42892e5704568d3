//! Parameter fixtures, start states and reference dynamics shared by the
//! test suites and the `validate` command.

pub mod criteria;
pub mod oracle;

use crate::analytics::gas_law_point;
use crate::equilibrium::{buoyancy, floating_condition, lambda_star};
use crate::error::{Error, Result};
use crate::geometry::ModelParams;
use crate::sampler::{uniform_in_base, SystemState};
use rand::Rng;
use rand_distr::StandardNormal;

/// Draws a random system with a ball, in dimension 2 or 3, whose ball mass
/// is a fraction in `[0.1, 0.9]` of the displaced gas mass at rest, so that
/// the ball floats.
pub fn random_floating_params<R: Rng + ?Sized>(rng: &mut R) -> Result<ModelParams> {
    let mut last = None;
    for _ in 0..100 {
        match draw_floating(rng) {
            Ok(p) => return Ok(p),
            Err(e) => last = Some(e),
        }
    }
    Err(last.expect("at least one attempt"))
}

fn draw_floating<R: Rng + ?Sized>(rng: &mut R) -> Result<ModelParams> {
    let dim = rng.random_range(2..=3);
    let base_radius = rng.random_range(0.5..2.0);
    let ball_radius = base_radius * rng.random_range(0.1..0.6);
    let gas_mass = rng.random_range(0.5..2.0);
    let gravity = rng.random_range(0.5..2.0);
    let energy = gas_mass * gravity * base_radius * rng.random_range(0.5..5.0);
    // lambda_* depends on M only through z(R): iterate M = frac * K(lambda_*, R)
    let frac = rng.random_range(0.1..0.9);
    let mut p = ModelParams::new(dim, base_radius, ball_radius, gas_mass, 0.0, gravity, energy, 100)?;
    for _ in 0..50 {
        let lam = lambda_star(&p)?;
        let k = buoyancy(&gas_law_point(lam, ball_radius, &p)?, &p);
        let next = frac * k;
        let done = (next - p.ball_mass).abs() <= 1e-12 * next;
        p.ball_mass = next;
        if done {
            break;
        }
    }
    p.validate()?;
    if !floating_condition(&p)? {
        return Err(Error::NoConvergence("fixture draw did not float".into()));
    }
    Ok(p)
}

/// The two-dimensional fixture used for regression values:
/// `rho_b = 1, R = 0.3, m = g = 1, E = 3, M = 0.05`.
pub fn reference_fixture(n_particles: usize) -> ModelParams {
    ModelParams {
        dim: 2,
        base_radius: 1.0,
        ball_radius: 0.3,
        gas_mass: 1.0,
        ball_mass: 0.05,
        gravity: 1.0,
        energy: 3.0,
        n_particles,
    }
}

/// A two-dimensional fixture with a large ball whose finite-`n` height
/// density is already tight around the floating height at a few hundred
/// particles: `rho_b = 1, R = 0.6, m = g = 1, E = 2, M = 0.27`.
pub fn concentrated_fixture(n_particles: usize) -> ModelParams {
    ModelParams {
        dim: 2,
        base_radius: 1.0,
        ball_radius: 0.6,
        gas_mass: 1.0,
        ball_mass: 0.27,
        gravity: 1.0,
        energy: 2.0,
        n_particles,
    }
}

/// Places the particles uniformly in `base x [0, layer]`, away from the ball
/// and, when `outside_column` holds, outside the vertical column swept by
/// the ball.
fn place_particles<R: Rng + ?Sized>(s: &mut SystemState, p: &ModelParams, layer: f64, outside_column: bool, rng: &mut R) {
    let d = p.dim;
    let (bx, by) = (s.ball_x().to_vec(), s.ball_y());
    let r2 = p.ball_radius * p.ball_radius;
    for i in 0..p.n_particles {
        loop {
            let mut x = vec![0.0; d - 1];
            uniform_in_base(d, p.base_radius, rng, &mut x);
            let y = rng.random_range(0.0..layer);
            let h2: f64 = x.iter().zip(&bx).map(|(a, b)| (a - b) * (a - b)).sum();
            let blocked = if outside_column { h2 <= r2 } else { h2 + (y - by) * (y - by) <= r2 };
            if !blocked {
                s.x_mut(i).copy_from_slice(&x);
                s.heights[i] = y;
                break;
            }
        }
    }
}

/// Gives every particle the same speed so that the total energy is `E`,
/// in uniformly random directions, or straight up or down when `vertical`.
fn share_energy<R: Rng + ?Sized>(s: &mut SystemState, p: &ModelParams, vertical: bool, rng: &mut R) -> Result<()> {
    let d = p.dim;
    let ball_ke = 0.5 * p.ball_mass * s.v(p.n_particles).iter().map(|c| c * c).sum::<f64>();
    let left = p.energy - s.potential_energy(p) - ball_ke;
    if !(left > 0.0) {
        return Err(Error::EnergyExhausted {
            potential: s.potential_energy(p),
            total: p.energy,
        });
    }
    let speed = (2.0 * left / p.gas_mass).sqrt();
    for i in 0..p.n_particles {
        let v = s.v_mut(i);
        v.fill(0.0);
        if vertical {
            v[d - 1] = if rng.random::<bool>() { speed } else { -speed };
        } else {
            for c in v.iter_mut() {
                *c = rng.sample::<f64, _>(StandardNormal);
            }
            let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
            for c in v.iter_mut() {
                *c *= speed / norm;
            }
        }
    }
    Ok(())
}

/// Ball resting on the bottom at the axis, gas in a layer of height
/// `E / (2 m g)` carrying all the energy.
pub fn ball_resting_start<R: Rng + ?Sized>(p: &ModelParams, rng: &mut R) -> Result<SystemState> {
    p.require_ball()?;
    let mut s = SystemState::zeros(p.dim, p.n_particles);
    s.heights[p.n_particles] = p.ball_radius;
    place_particles(&mut s, p, 0.5 * p.energy / (p.gas_mass * p.gravity), false, rng);
    share_energy(&mut s, p, false, rng)?;
    Ok(s)
}

/// Ball at rest at height `ball_y` on the axis, gas in a layer below it.
pub fn ball_high_start<R: Rng + ?Sized>(p: &ModelParams, ball_y: f64, rng: &mut R) -> Result<SystemState> {
    p.require_ball()?;
    let spare = p.energy - p.ball_mass * p.gravity * ball_y;
    if !(ball_y > p.ball_radius && spare > 0.0) {
        return Err(Error::OutOfRange(format!("ball height {ball_y}")));
    }
    let mut s = SystemState::zeros(p.dim, p.n_particles);
    s.heights[p.n_particles] = ball_y;
    let layer = (0.5 * spare / (p.gas_mass * p.gravity)).min(ball_y - p.ball_radius);
    place_particles(&mut s, p, layer, false, rng);
    share_energy(&mut s, p, false, rng)?;
    Ok(s)
}

/// Degenerate start with no horizontal motion: the ball is dropped from
/// rest at `ball_y` on the axis and every particle moves vertically outside
/// the ball's column, so nothing ever touches the ball.
pub fn vertical_line_start<R: Rng + ?Sized>(p: &ModelParams, ball_y: f64, rng: &mut R) -> Result<SystemState> {
    p.require_ball()?;
    let spare = p.energy - p.ball_mass * p.gravity * ball_y;
    if !(ball_y >= p.ball_radius && spare > 0.0 && p.ball_radius < p.base_radius) {
        return Err(Error::OutOfRange(format!("ball height {ball_y}")));
    }
    let mut s = SystemState::zeros(p.dim, p.n_particles);
    s.heights[p.n_particles] = ball_y;
    place_particles(&mut s, p, 0.5 * spare / (p.gas_mass * p.gravity), true, rng);
    share_energy(&mut s, p, true, rng)?;
    Ok(s)
}
