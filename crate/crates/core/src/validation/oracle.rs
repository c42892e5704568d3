//! Reference implementations of the event-driven dynamics, used to check
//! [`Simulation`](crate::dynamics::Simulation) against.
//!
//! Both share the collision kernels with the simulator but not its event
//! bookkeeping: [`RecomputeSimulation`] re-derives every candidate event
//! from scratch at each step, and [`DenseStepper`] finds events by walking
//! a fine time grid and bisecting sign changes of the contact conditions.

use crate::dynamics::kernels::{
    bottom_time, dot, reflect_wall, resolve_particle_ball, sidewall_time, time_to_ball, Body, ReflectionMode, Vec3,
};
use crate::dynamics::EventKind;
use crate::error::{Error, Result};
use crate::geometry::ModelParams;
use crate::sampler::SystemState;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// One processed event: `(time, kind, particle index)`.
pub type TraceEvent = (f64, EventKind, Option<usize>);

/// Bodies with individual reference times and the collision rules.
#[derive(Debug, Clone)]
struct Bodies {
    params: ModelParams,
    mode: ReflectionMode,
    rng: ChaCha8Rng,
    /// Particles first, ball last.
    b: Vec<Body>,
}

impl Bodies {
    fn new(state: &SystemState, params: &ModelParams, mode: ReflectionMode, seed: u64) -> Result<Self> {
        params.require_ball()?;
        if !(2..=3).contains(&params.dim) {
            return Err(Error::UnsupportedDimension(params.dim));
        }
        let d = params.dim;
        let b = (0..=params.n_particles)
            .map(|i| {
                let x = state.x(i);
                let v = state.v(i);
                Body {
                    pos: [x[0], if d == 3 { x[1] } else { 0.0 }, state.heights[i]],
                    vel: [v[0], if d == 3 { v[1] } else { 0.0 }, v[d - 1]],
                    t: state.time,
                }
            })
            .collect();
        Ok(Bodies {
            params: *params,
            mode,
            rng: ChaCha8Rng::seed_from_u64(seed),
            b,
        })
    }

    fn ball(&self) -> usize {
        self.params.n_particles
    }

    fn floor(&self, i: usize) -> f64 {
        if i == self.ball() { self.params.ball_radius } else { 0.0 }
    }

    fn wall_radius(&self, i: usize) -> f64 {
        if i == self.ball() {
            self.params.base_radius - self.params.ball_radius
        } else {
            self.params.base_radius
        }
    }

    fn mass(&self, i: usize) -> f64 {
        if i == self.ball() { self.params.ball_mass } else { self.params.particle_mass() }
    }

    fn at(&self, i: usize, t: f64) -> Body {
        let b = &self.b[i];
        let mut out = b.flight(t - b.t, self.params.gravity, self.floor(i));
        out.t = t;
        out
    }

    fn resting(&self, i: usize) -> bool {
        self.b[i].pos[2] == self.floor(i) && self.b[i].vel[2] == 0.0
    }

    fn state(&self, t: f64) -> SystemState {
        let d = self.params.dim;
        let mut s = SystemState::zeros(d, self.params.n_particles);
        s.time = t;
        for i in 0..self.b.len() {
            let b = self.at(i, t);
            s.x_mut(i).copy_from_slice(&b.pos[..d - 1]);
            s.heights[i] = b.pos[2];
            let v = s.v_mut(i);
            v[..d - 1].copy_from_slice(&b.vel[..d - 1]);
            v[d - 1] = b.vel[2];
        }
        s
    }

    /// Applies the event at time `t`.
    fn resolve(&mut self, t: f64, kind: EventKind, i: usize) -> Result<()> {
        let g = self.params.gravity;
        let dim = self.params.dim;
        match kind {
            EventKind::ParticleBottom | EventKind::BallBottom => {
                let old = self.b[i];
                let floor = self.floor(i);
                let mut b = self.at(i, t);
                b.pos[2] = floor;
                b.vel[2] = -(old.vel[2] * old.vel[2] + 2.0 * g * (old.pos[2] - floor).max(0.0)).sqrt();
                b.vel = reflect_wall(&b.vel, &[0.0, 0.0, 1.0], self.mode_for(i), i == self.ball(), dim, &mut self.rng)?;
                self.b[i] = b;
            }
            EventKind::ParticleSidewall | EventKind::BallSidewall => {
                let mut b = self.at(i, t);
                let h = (b.pos[0] * b.pos[0] + b.pos[1] * b.pos[1]).sqrt();
                let r = self.wall_radius(i);
                b.pos[0] *= r / h;
                b.pos[1] *= r / h;
                let h = (b.pos[0] * b.pos[0] + b.pos[1] * b.pos[1]).sqrt();
                let inner = [-b.pos[0] / h, -b.pos[1] / h, 0.0];
                b.vel = reflect_wall(&b.vel, &inner, self.mode_for(i), i == self.ball(), dim, &mut self.rng)?;
                self.b[i] = b;
            }
            EventKind::ParticleBall => {
                let k = self.ball();
                let mut p = self.at(i, t);
                let mut c = self.at(k, t);
                let mut n: Vec3 = [p.pos[0] - c.pos[0], p.pos[1] - c.pos[1], p.pos[2] - c.pos[2]];
                let len = dot(&n, &n).sqrt();
                n.iter_mut().for_each(|v| *v /= len);
                let (v, vb) = resolve_particle_ball(&p.vel, &c.vel, &n, self.mass(i), self.mass(k))?;
                p.vel = v;
                c.vel = vb;
                self.b[i] = p;
                self.b[k] = c;
            }
        }
        Ok(())
    }

    fn mode_for(&self, i: usize) -> ReflectionMode {
        if i == self.ball() { ReflectionMode::Specular } else { self.mode }
    }
}

fn index_of(kind: EventKind, i: usize) -> Option<usize> {
    match kind {
        EventKind::BallBottom | EventKind::BallSidewall => None,
        _ => Some(i),
    }
}

/// Event-driven dynamics without a queue: every step evaluates all wall
/// and contact times and processes the earliest.
#[derive(Debug, Clone)]
pub struct RecomputeSimulation {
    bodies: Bodies,
    now: f64,
}

impl RecomputeSimulation {
    pub fn new(state: &SystemState, params: &ModelParams, mode: ReflectionMode, seed: u64) -> Result<Self> {
        Ok(RecomputeSimulation {
            bodies: Bodies::new(state, params, mode, seed)?,
            now: state.time,
        })
    }

    fn wall(&self, i: usize) -> Option<(f64, EventKind)> {
        let bs = &self.bodies;
        let b = &bs.b[i];
        let g = bs.params.gravity;
        let ball = i == bs.ball();
        let bottom = bottom_time(b.pos[2] - bs.floor(i), b.vel[2], g).map(|t| {
            (b.t + t, if ball { EventKind::BallBottom } else { EventKind::ParticleBottom })
        });
        let side = sidewall_time([b.pos[0], b.pos[1]], [b.vel[0], b.vel[1]], bs.wall_radius(i))
            .map(|t| (b.t + t, if ball { EventKind::BallSidewall } else { EventKind::ParticleSidewall }));
        match (bottom, side) {
            (Some(a), Some(s)) => Some(if s.0 < a.0 { s } else { a }),
            (a, s) => a.or(s),
        }
    }

    /// Every candidate `(time, kind, body)`.
    fn candidates(&self) -> Result<Vec<(f64, EventKind, usize)>> {
        let bs = &self.bodies;
        let n = bs.params.n_particles;
        let mut out = Vec::new();
        for i in 0..=n {
            if let Some((t, k)) = self.wall(i) {
                out.push((t, k, i));
            }
        }
        if bs.resting(n) {
            return Err(Error::InvalidParam("reference dynamics needs a ball in flight".into()));
        }
        for i in 0..n {
            if bs.resting(i) {
                continue;
            }
            // relative motion from the later of the two reference times
            let t0 = bs.b[i].t.max(bs.b[n].t);
            let p = bs.at(i, t0);
            let c = bs.at(n, t0);
            let dp = [p.pos[0] - c.pos[0], p.pos[1] - c.pos[1], p.pos[2] - c.pos[2]];
            let dv = [p.vel[0] - c.vel[0], p.vel[1] - c.vel[1], p.vel[2] - c.vel[2]];
            if let Some(t) = time_to_ball(&dp, &dv, bs.params.ball_radius) {
                out.push((t0 + t, EventKind::ParticleBall, i));
            }
        }
        Ok(out)
    }

    pub fn step(&mut self) -> Result<TraceEvent> {
        let (t, kind, i) = self
            .candidates()?
            .into_iter()
            .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)))
            .ok_or_else(|| Error::NoConvergence("no pending event".into()))?;
        self.now = t.max(self.now);
        self.bodies.resolve(self.now, kind, i)?;
        Ok((self.now, kind, index_of(kind, i)))
    }

    pub fn state(&self) -> SystemState {
        self.bodies.state(self.now)
    }
}

/// Dynamics found by time stepping: positions are evaluated exactly on a
/// grid of spacing `dt` after the last event, the first grid step where a
/// body has crossed a wall or entered the ball is bisected, and the
/// crossing is resolved with the same collision rules.
#[derive(Debug, Clone)]
pub struct DenseStepper {
    bodies: Bodies,
    now: f64,
    pub dt: f64,
}

impl DenseStepper {
    pub fn new(state: &SystemState, params: &ModelParams, mode: ReflectionMode, seed: u64, dt: f64) -> Result<Self> {
        if !(dt > 0.0) {
            return Err(Error::InvalidParam("time step must be positive".into()));
        }
        Ok(DenseStepper {
            bodies: Bodies::new(state, params, mode, seed)?,
            now: state.time,
            dt,
        })
    }

    fn crossed(&self, i: usize, kind: EventKind, t: f64) -> bool {
        let bs = &self.bodies;
        let b = bs.at(i, t);
        match kind {
            EventKind::ParticleBottom | EventKind::BallBottom => b.pos[2] < bs.floor(i),
            EventKind::ParticleSidewall | EventKind::BallSidewall => {
                let r = bs.wall_radius(i);
                b.pos[0] * b.pos[0] + b.pos[1] * b.pos[1] > r * r
            }
            EventKind::ParticleBall => {
                let c = bs.at(bs.ball(), t);
                let d: Vec3 = [b.pos[0] - c.pos[0], b.pos[1] - c.pos[1], b.pos[2] - c.pos[2]];
                let r = bs.params.ball_radius;
                dot(&d, &d) < r * r
            }
        }
    }

    /// Cheap scan of every contact condition at time `t`.
    fn any_crossed(&self, t: f64) -> bool {
        let bs = &self.bodies;
        let n = bs.params.n_particles;
        let r = bs.params.ball_radius;
        let rho = bs.params.base_radius;
        let c = bs.at(n, t);
        let side = rho - r;
        if c.pos[2] < r || c.pos[0] * c.pos[0] + c.pos[1] * c.pos[1] > side * side {
            return true;
        }
        (0..n).any(|i| {
            let b = bs.at(i, t);
            let d: Vec3 = [b.pos[0] - c.pos[0], b.pos[1] - c.pos[1], b.pos[2] - c.pos[2]];
            b.pos[2] < 0.0 || b.pos[0] * b.pos[0] + b.pos[1] * b.pos[1] > rho * rho || dot(&d, &d) < r * r
        })
    }

    fn checks(&self) -> Vec<(EventKind, usize)> {
        let n = self.bodies.params.n_particles;
        let mut out = Vec::with_capacity(3 * n + 2);
        for i in 0..n {
            out.push((EventKind::ParticleBottom, i));
            out.push((EventKind::ParticleSidewall, i));
            out.push((EventKind::ParticleBall, i));
        }
        out.push((EventKind::BallBottom, n));
        out.push((EventKind::BallSidewall, n));
        out
    }

    /// Advances to and resolves the next event, giving up after `max_time`.
    pub fn step(&mut self, max_time: f64) -> Result<TraceEvent> {
        let checks = self.checks();
        let start = self.now;
        let mut k: u64 = 0;
        loop {
            k += 1;
            let t_hi = start + k as f64 * self.dt;
            if t_hi - start > max_time {
                return Err(Error::NoConvergence("no event within the time limit".into()));
            }
            if !self.any_crossed(t_hi) {
                continue;
            }
            let hits: Vec<(EventKind, usize)> = checks.iter().copied().filter(|&(kind, i)| self.crossed(i, kind, t_hi)).collect();
            let t_lo = start + (k - 1) as f64 * self.dt;
            // earliest crossing among the bodies that crossed in this step
            let mut best: Option<(f64, EventKind, usize)> = None;
            for (kind, i) in hits {
                let (mut a, mut b) = (t_lo, t_hi);
                for _ in 0..200 {
                    let m = 0.5 * (a + b);
                    if m <= a || m >= b {
                        break;
                    }
                    if self.crossed(i, kind, m) { b = m } else { a = m }
                }
                if best.is_none_or(|(t, _, _)| a < t) {
                    best = Some((a, kind, i));
                }
            }
            let (t, kind, i) = best.expect("at least one crossing");
            self.now = t;
            self.bodies.resolve(t, kind, i)?;
            return Ok((t, kind, index_of(kind, i)));
        }
    }

    pub fn state(&self) -> SystemState {
        self.bodies.state(self.now)
    }
}
