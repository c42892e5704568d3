//! Event-driven simulation of the particles and the ball.
//!
//! Particles never interact with each other, so each particle carries at
//! most two pending events: its next wall contact and, if earlier, its next
//! contact with the ball. Entries are invalidated lazily: every body has a
//! stamp that changes whenever its trajectory changes, and an entry is
//! discarded on pop if any stamp it recorded is out of date. A change of the
//! ball trajectory reschedules the ball contact of every particle (`O(n)`);
//! every other event costs `O(log n)`.

pub mod kernels;

use crate::error::{Error, Result};
use crate::geometry::ModelParams;
use crate::sampler::SystemState;
pub use kernels::{Body, ReflectionMode, Vec3};
use kernels::{bottom_time, dot, impact_speed, reflect_wall, resolve_particle_ball, sidewall_time, time_to_ball};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;
use std::io::Write;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EventKind {
    ParticleBottom,
    ParticleSidewall,
    ParticleBall,
    BallBottom,
    BallSidewall,
}

impl EventKind {
    pub const ALL: [EventKind; 5] = [
        EventKind::ParticleBottom,
        EventKind::ParticleSidewall,
        EventKind::ParticleBall,
        EventKind::BallBottom,
        EventKind::BallSidewall,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EventKind::ParticleBottom => "particle-bottom",
            EventKind::ParticleSidewall => "particle-sidewall",
            EventKind::ParticleBall => "particle-ball",
            EventKind::BallBottom => "ball-bottom",
            EventKind::BallSidewall => "ball-sidewall",
        }
    }

    fn changes_ball(self) -> bool {
        matches!(self, EventKind::ParticleBall | EventKind::BallBottom | EventKind::BallSidewall)
    }
}

/// A processed or pending event. `index` is the particle, absent for
/// ball-only events; `stamp` is the ball epoch the event was scheduled in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    pub time: f64,
    pub kind: EventKind,
    pub index: Option<usize>,
    pub stamp: u64,
}

#[derive(Debug, Clone, Copy)]
struct Entry {
    time: f64,
    kind: EventKind,
    index: usize,
    body_stamp: u64,
    ball_stamp: u64,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.time
            .total_cmp(&other.time)
            .then(self.kind.cmp(&other.kind))
            .then(self.index.cmp(&other.index))
            .then(self.body_stamp.cmp(&other.body_stamp))
            .then(self.ball_stamp.cmp(&other.ball_stamp))
    }
}

/// The ball's free flight between two changes of its trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallSegment {
    pub t0: f64,
    pub t1: f64,
    /// Height and vertical velocity at `t0`.
    pub y0: f64,
    pub vy0: f64,
    /// True when the ball lies on the bottom without vertical motion.
    pub resting: bool,
}

impl BallSegment {
    pub fn height_at(&self, t: f64, g: f64) -> f64 {
        if self.resting {
            return self.y0;
        }
        let dt = t - self.t0;
        self.y0 + self.vy0 * dt - 0.5 * g * dt * dt
    }
}

/// Callbacks fed by a running simulation.
pub trait Observer {
    fn on_event(&mut self, _event: &Event) {}
    fn on_ball_segment(&mut self, _segment: &BallSegment, _gravity: f64) {}
    fn on_snapshot(&mut self, _state: &SystemState) {}
}

/// Totals of a run.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RunReport {
    pub events: u64,
    pub per_kind: [u64; 5],
    pub final_time: f64,
    pub initial_energy: f64,
    pub final_energy: f64,
    /// Largest relative energy change produced by a single event.
    pub max_event_error: f64,
    /// Largest overlap of a particle with the ball at a contact.
    pub max_penetration: f64,
}

impl RunReport {
    pub fn relative_drift(&self) -> f64 {
        (self.final_energy - self.initial_energy).abs() / self.initial_energy.abs()
    }

    pub fn count(&self, kind: EventKind) -> u64 {
        self.per_kind[kind as usize]
    }

    /// Wall contacts (bottom or side) of particles.
    pub fn particle_wall_events(&self) -> u64 {
        self.count(EventKind::ParticleBottom) + self.count(EventKind::ParticleSidewall)
    }
}

const STALL_EVENTS: u64 = 1_000_000;
const STALL_WINDOW: f64 = 1e-12;

/// Event-driven simulation state.
pub struct Simulation {
    params: ModelParams,
    mode: ReflectionMode,
    rng: ChaCha8Rng,
    /// Particles first, ball last.
    bodies: Vec<Body>,
    stamps: Vec<u64>,
    wall_time: Vec<f64>,
    queue: BinaryHeap<Reverse<Entry>>,
    now: f64,
    ball_since: f64,
    obs_dt: Option<f64>,
    next_obs: f64,
    report: RunReport,
    stall_start: f64,
    stall_count: u64,
    record_events: bool,
    log: Vec<Event>,
}

fn to_vec3(x: &[f64], y: f64) -> Vec3 {
    [x[0], x.get(1).copied().unwrap_or(0.0), y]
}

impl Simulation {
    /// Builds a simulation from a state that satisfies the admissibility
    /// invariants (penetration up to `1e-10` tolerated). Only `d = 2, 3`.
    pub fn new(initial: &SystemState, params: &ModelParams, mode: ReflectionMode, seed: u64) -> Result<Self> {
        params.require_ball()?;
        if !(2..=3).contains(&params.dim) {
            return Err(Error::UnsupportedDimension(params.dim));
        }
        initial.check_invariants(params, 1e-10, 1e-9)?;
        let n = params.n_particles;
        let bodies: Vec<Body> = (0..=n)
            .map(|i| {
                let v = initial.v(i);
                let vel = [v[0], if params.dim == 3 { v[1] } else { 0.0 }, v[params.dim - 1]];
                Body {
                    pos: to_vec3(initial.x(i), initial.heights[i]),
                    vel,
                    t: initial.time,
                }
            })
            .collect();
        let mut sim = Simulation {
            params: *params,
            mode,
            rng: ChaCha8Rng::seed_from_u64(seed),
            bodies,
            stamps: vec![0; n + 1],
            wall_time: vec![f64::INFINITY; n],
            queue: BinaryHeap::new(),
            now: initial.time,
            ball_since: initial.time,
            obs_dt: None,
            next_obs: initial.time,
            report: RunReport::default(),
            stall_start: initial.time,
            stall_count: 0,
            record_events: false,
            log: Vec::new(),
        };
        sim.report.initial_energy = sim.energy();
        sim.report.final_energy = sim.report.initial_energy;
        sim.report.final_time = sim.now;
        for i in 0..n {
            sim.schedule_particle(i);
        }
        sim.schedule_ball_walls();
        Ok(sim)
    }

    /// Emit a snapshot to observers every `dt` of simulated time, starting
    /// at the current time.
    pub fn set_observation_interval(&mut self, dt: Option<f64>) {
        self.obs_dt = dt.filter(|v| *v > 0.0);
        self.next_obs = self.now;
    }

    /// Keep every processed event in memory (see [`Simulation::event_log`]).
    pub fn record_events(&mut self, on: bool) {
        self.record_events = on;
    }

    pub fn event_log(&self) -> &[Event] {
        &self.log
    }

    pub fn time(&self) -> f64 {
        self.now
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn report(&self) -> RunReport {
        let mut r = self.report;
        r.final_energy = self.energy();
        r.final_time = self.now;
        r
    }

    fn ball(&self) -> usize {
        self.params.n_particles
    }

    fn mass(&self, i: usize) -> f64 {
        if i == self.ball() {
            self.params.ball_mass
        } else {
            self.params.particle_mass()
        }
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

    /// Body `i` evaluated at time `t`.
    pub fn body_at(&self, i: usize, t: f64) -> Body {
        let b = &self.bodies[i];
        b.flight(t - b.t, self.params.gravity, self.floor(i))
    }

    fn body_energy(&self, b: &Body, i: usize) -> f64 {
        self.mass(i) * (0.5 * dot(&b.vel, &b.vel) + self.params.gravity * b.pos[2])
    }

    /// Total energy at the current time.
    pub fn energy(&self) -> f64 {
        (0..self.bodies.len()).map(|i| self.body_energy(&self.body_at(i, self.now), i)).sum()
    }

    /// Full state at the current time.
    pub fn state(&self) -> SystemState {
        self.state_at(self.now)
    }

    fn state_at(&self, t: f64) -> SystemState {
        let d = self.params.dim;
        let mut s = SystemState::zeros(d, self.params.n_particles);
        s.time = t;
        for i in 0..self.bodies.len() {
            let b = self.body_at(i, t);
            s.x_mut(i).copy_from_slice(&b.pos[..d - 1]);
            s.heights[i] = b.pos[2];
            let v = s.v_mut(i);
            v[..d - 1].copy_from_slice(&b.vel[..d - 1]);
            v[d - 1] = b.vel[2];
        }
        s
    }

    fn wall_event(&self, i: usize) -> Option<(f64, EventKind)> {
        let b = &self.bodies[i];
        let g = self.params.gravity;
        let bottom = bottom_time(b.pos[2] - self.floor(i), b.vel[2], g);
        let side = sidewall_time([b.pos[0], b.pos[1]], [b.vel[0], b.vel[1]], self.wall_radius(i));
        let is_ball = i == self.ball();
        let (kb, ks) = if is_ball {
            (EventKind::BallBottom, EventKind::BallSidewall)
        } else {
            (EventKind::ParticleBottom, EventKind::ParticleSidewall)
        };
        match (bottom, side) {
            (None, None) => None,
            (Some(t), None) => Some((t, kb)),
            (None, Some(t)) => Some((t, ks)),
            (Some(tb), Some(ts)) => Some(if ts < tb { (ts, ks) } else { (tb, kb) }),
        }
    }

    /// Time until particle `i` (whose reference time is `now`) meets the ball.
    fn ball_contact(&self, i: usize) -> Option<f64> {
        let p = &self.bodies[i];
        if p.pos[2] == 0.0 && p.vel[2] == 0.0 {
            // a particle lying on the bottom can only be touched by the
            // ball's lowest point, which never happens off a measure-zero set
            return None;
        }
        if self.ball_resting() {
            return self.contact_with_resting_ball(i);
        }
        let c = self.body_at(self.ball(), self.now);
        let dp = [p.pos[0] - c.pos[0], p.pos[1] - c.pos[1], p.pos[2] - c.pos[2]];
        let dv = [p.vel[0] - c.vel[0], p.vel[1] - c.vel[1], p.vel[2] - c.vel[2]];
        time_to_ball(&dp, &dv, self.params.ball_radius)
    }

    fn ball_resting(&self) -> bool {
        let b = &self.bodies[self.ball()];
        b.pos[2] == self.params.ball_radius && b.vel[2] == 0.0
    }

    /// Contact with a ball lying still on the bottom. The particle follows
    /// a parabola, so relative motion is not linear; use conservative
    /// advancement, stepping by the gap divided by the largest speed the
    /// particle can reach before its wall event.
    fn contact_with_resting_ball(&self, i: usize) -> Option<f64> {
        let (horizon, _) = self.wall_event(i)?;
        let r = self.params.ball_radius;
        let g = self.params.gravity;
        let p = self.bodies[i];
        // the resting ball may still slide horizontally
        let ball = self.body_at(self.ball(), self.now);
        let vmax = (dot(&p.vel, &p.vel) + 2.0 * g * p.pos[2].max(0.0)).sqrt() + dot(&ball.vel, &ball.vel).sqrt();
        if vmax == 0.0 {
            return None;
        }
        let mut t = 0.0;
        for _ in 0..100_000 {
            let q = p.flight(t, g, 0.0);
            let c = ball.flight(t, g, r);
            let d = [q.pos[0] - c.pos[0], q.pos[1] - c.pos[1], q.pos[2] - c.pos[2]];
            let gap = dot(&d, &d).sqrt() - r;
            if gap <= 1e-12 * r {
                let rel = [q.vel[0] - c.vel[0], q.vel[1] - c.vel[1], q.vel[2] - c.vel[2]];
                return (dot(&d, &rel) < 0.0).then_some(t);
            }
            t += gap / vmax;
            if t > horizon {
                return None;
            }
        }
        None
    }

    fn push(&mut self, time: f64, kind: EventKind, index: usize) {
        let entry = Entry {
            time,
            kind,
            index,
            body_stamp: self.stamps[index],
            ball_stamp: self.stamps[self.ball()],
        };
        self.queue.push(Reverse(entry));
    }

    /// Requires `bodies[i].t == now`.
    fn schedule_particle(&mut self, i: usize) {
        let wall = self.wall_event(i);
        self.wall_time[i] = match wall {
            Some((t, kind)) => {
                self.push(self.now + t, kind, i);
                self.now + t
            }
            None => f64::INFINITY,
        };
        self.schedule_particle_ball(i);
    }

    fn schedule_particle_ball(&mut self, i: usize) {
        let at = self.body_at(i, self.now);
        let saved = self.bodies[i];
        self.bodies[i] = at;
        let contact = self.ball_contact(i);
        self.bodies[i] = saved;
        if let Some(t) = contact {
            if self.now + t < self.wall_time[i] {
                self.push(self.now + t, EventKind::ParticleBall, i);
            }
        }
    }

    /// Requires the ball's reference time to be `now`.
    fn schedule_ball_walls(&mut self) {
        let b = self.ball();
        if let Some((t, kind)) = self.wall_event(b) {
            self.push(self.now + t, kind, b);
        }
    }

    fn valid(&self, e: &Entry) -> bool {
        let ball = self.ball();
        match e.kind {
            EventKind::ParticleBottom | EventKind::ParticleSidewall => e.body_stamp == self.stamps[e.index],
            EventKind::ParticleBall => e.body_stamp == self.stamps[e.index] && e.ball_stamp == self.stamps[ball],
            EventKind::BallBottom | EventKind::BallSidewall => e.ball_stamp == self.stamps[ball],
        }
    }

    /// The earliest pending valid event, discarding stale entries.
    pub fn next_event(&mut self) -> Option<Event> {
        while let Some(Reverse(e)) = self.queue.peek().copied() {
            if self.valid(&e) {
                return Some(Event {
                    time: e.time,
                    kind: e.kind,
                    index: (e.index != self.ball()).then_some(e.index),
                    stamp: e.ball_stamp,
                });
            }
            self.queue.pop();
        }
        None
    }

    fn emit_snapshots(&mut self, until: f64, observers: &mut [&mut dyn Observer]) {
        let Some(dt) = self.obs_dt else { return };
        while self.next_obs <= until {
            let s = self.state_at(self.next_obs);
            for o in observers.iter_mut() {
                o.on_snapshot(&s);
            }
            self.next_obs += dt;
        }
    }

    fn emit_ball_segment(&mut self, until: f64, observers: &mut [&mut dyn Observer]) {
        if until <= self.ball_since {
            return;
        }
        let b = self.body_at(self.ball(), self.ball_since);
        let seg = BallSegment {
            t0: self.ball_since,
            t1: until,
            y0: b.pos[2],
            vy0: b.vel[2],
            resting: b.pos[2] == self.params.ball_radius && b.vel[2] == 0.0,
        };
        for o in observers.iter_mut() {
            o.on_ball_segment(&seg, self.params.gravity);
        }
        self.ball_since = until;
    }

    /// Processes the next event.
    pub fn step(&mut self, observers: &mut [&mut dyn Observer]) -> Result<Event> {
        let ev = self.next_event().ok_or_else(|| Error::NoConvergence("event queue is empty".into()))?;
        self.queue.pop();
        self.emit_snapshots(ev.time, observers);
        if ev.kind.changes_ball() {
            self.emit_ball_segment(ev.time, observers);
        }
        // stall guard
        if ev.time - self.stall_start > STALL_WINDOW {
            self.stall_start = ev.time;
            self.stall_count = 0;
        }
        self.stall_count += 1;
        if self.stall_count > STALL_EVENTS {
            return Err(Error::Stalled {
                events: self.stall_count,
                window: STALL_WINDOW,
                time: ev.time,
            });
        }
        self.now = ev.time.max(self.now);
        self.resolve(&ev)?;
        self.report.events += 1;
        self.report.per_kind[ev.kind as usize] += 1;
        if self.record_events {
            self.log.push(ev);
        }
        for o in observers.iter_mut() {
            o.on_event(&ev);
        }
        if self.queue.len() > 64 * (self.bodies.len() + 16) {
            self.compact();
        }
        Ok(ev)
    }

    fn compact(&mut self) {
        let entries: Vec<Entry> = std::mem::take(&mut self.queue).into_iter().map(|r| r.0).collect();
        let kept: Vec<Reverse<Entry>> = entries.into_iter().filter(|e| self.valid(e)).map(Reverse).collect();
        self.queue = BinaryHeap::from(kept);
    }

    /// Moves body `i` to the current time, landing exactly on its support for
    /// bottom contacts with the vertical speed given by energy conservation.
    fn advance(&mut self, i: usize, to_bottom: bool) {
        let g = self.params.gravity;
        let floor = self.floor(i);
        let old = self.bodies[i];
        let mut b = self.body_at(i, self.now);
        b.t = self.now;
        if to_bottom {
            b.pos[2] = floor;
            b.vel[2] = -impact_speed(old.pos[2] - floor, old.vel[2], g);
        }
        self.bodies[i] = b;
    }

    fn snap_to_wall(&mut self, i: usize) {
        let r = self.wall_radius(i);
        let b = &mut self.bodies[i];
        let h = (b.pos[0] * b.pos[0] + b.pos[1] * b.pos[1]).sqrt();
        if h > 0.0 {
            b.pos[0] *= r / h;
            b.pos[1] *= r / h;
        }
    }

    fn resolve(&mut self, ev: &Event) -> Result<()> {
        let ball = self.ball();
        let dim = self.params.dim;
        match ev.kind {
            EventKind::ParticleBottom | EventKind::ParticleSidewall => {
                let i = ev.index.expect("particle event");
                let bottom = ev.kind == EventKind::ParticleBottom;
                self.advance(i, bottom);
                if !bottom {
                    self.snap_to_wall(i);
                }
                let before = self.body_energy(&self.bodies[i], i);
                let b = self.bodies[i];
                let inner = self.inner_normal(&b, bottom);
                self.bodies[i].vel = reflect_wall(&b.vel, &inner, self.mode, false, dim, &mut self.rng)?;
                self.note_energy(before, self.body_energy(&self.bodies[i], i));
                self.stamps[i] += 1;
                self.schedule_particle(i);
            }
            EventKind::BallBottom | EventKind::BallSidewall => {
                let bottom = ev.kind == EventKind::BallBottom;
                self.advance(ball, bottom);
                if !bottom {
                    self.snap_to_wall(ball);
                }
                let before = self.body_energy(&self.bodies[ball], ball);
                let b = self.bodies[ball];
                let inner = self.inner_normal(&b, bottom);
                self.bodies[ball].vel = reflect_wall(&b.vel, &inner, ReflectionMode::Specular, true, dim, &mut self.rng)?;
                self.note_energy(before, self.body_energy(&self.bodies[ball], ball));
                self.ball_changed(None);
            }
            EventKind::ParticleBall => {
                let i = ev.index.expect("particle event");
                self.advance(i, false);
                self.advance(ball, false);
                let p = self.bodies[i];
                let c = self.bodies[ball];
                let mut n = [p.pos[0] - c.pos[0], p.pos[1] - c.pos[1], p.pos[2] - c.pos[2]];
                let dist = dot(&n, &n).sqrt();
                self.report.max_penetration = self.report.max_penetration.max(self.params.ball_radius - dist);
                for v in n.iter_mut() {
                    *v /= dist;
                }
                let before = self.body_energy(&p, i) + self.body_energy(&c, ball);
                let (v, vb) = resolve_particle_ball(&p.vel, &c.vel, &n, self.mass(i), self.mass(ball))?;
                self.bodies[i].vel = v;
                self.bodies[ball].vel = vb;
                self.note_energy(before, self.body_energy(&self.bodies[i], i) + self.body_energy(&self.bodies[ball], ball));
                self.stamps[i] += 1;
                self.ball_changed(Some(i));
            }
        }
        Ok(())
    }

    fn inner_normal(&self, b: &Body, bottom: bool) -> Vec3 {
        if bottom {
            [0.0, 0.0, 1.0]
        } else {
            let h = (b.pos[0] * b.pos[0] + b.pos[1] * b.pos[1]).sqrt();
            [-b.pos[0] / h, -b.pos[1] / h, 0.0]
        }
    }

    fn note_energy(&mut self, before: f64, after: f64) {
        let rel = (after - before).abs() / self.report.initial_energy.abs();
        self.report.max_event_error = self.report.max_event_error.max(rel);
    }

    /// After the ball's trajectory changed at `now` (together with particle
    /// `hit`, if any): reschedule the ball's walls and every ball contact.
    fn ball_changed(&mut self, hit: Option<usize>) {
        let ball = self.ball();
        self.stamps[ball] += 1;
        self.schedule_ball_walls();
        if let Some(i) = hit {
            self.schedule_particle(i);
        }
        for j in 0..self.params.n_particles {
            if Some(j) != hit {
                self.schedule_particle_ball(j);
            }
        }
    }

    /// Processes events up to time `t_end`, then brings observers up to
    /// `t_end`.
    pub fn run_until(&mut self, t_end: f64, observers: &mut [&mut dyn Observer]) -> Result<RunReport> {
        while let Some(ev) = self.next_event() {
            if ev.time > t_end {
                break;
            }
            self.step(observers)?;
        }
        self.emit_snapshots(t_end, observers);
        self.emit_ball_segment(t_end, observers);
        self.now = self.now.max(t_end);
        Ok(self.report())
    }

    /// Processes exactly `count` events.
    pub fn run_events(&mut self, count: u64, observers: &mut [&mut dyn Observer]) -> Result<RunReport> {
        for _ in 0..count {
            self.step(observers)?;
        }
        Ok(self.report())
    }
}

/// Writes an event log as CSV `(t, kind, index)`; ball events have an
/// empty index.
pub fn write_events_csv<W: Write>(out: &mut W, events: &[Event]) -> Result<()> {
    writeln!(out, "t,kind,index")?;
    for e in events {
        let idx = e.index.map(|i| i.to_string()).unwrap_or_default();
        writeln!(out, "{:e},{},{}", e.time, e.kind.name(), idx)?;
    }
    Ok(())
}

/// Observer that writes a trajectory row `(t, object, x..., y, v...)` per
/// object at every snapshot.
pub struct TrajectoryWriter<W: Write> {
    out: W,
    header_done: bool,
    pub error: Option<std::io::Error>,
}

impl<W: Write> TrajectoryWriter<W> {
    pub fn new(out: W) -> Self {
        TrajectoryWriter { out, header_done: false, error: None }
    }

    pub fn into_inner(self) -> W {
        self.out
    }
}

impl<W: Write> Observer for TrajectoryWriter<W> {
    fn on_snapshot(&mut self, s: &SystemState) {
        if self.error.is_some() {
            return;
        }
        let d = s.dim;
        let mut write = || -> std::io::Result<()> {
            if !self.header_done {
                let mut cols = vec!["t".to_string(), "object".to_string()];
                cols.extend((0..d - 1).map(|c| format!("x{c}")));
                cols.push("y".into());
                cols.extend((0..d).map(|c| format!("v{c}")));
                writeln!(self.out, "{}", cols.join(","))?;
                self.header_done = true;
            }
            for i in 0..s.objects() {
                let mut row = vec![format!("{:e}", s.time), i.to_string()];
                row.extend(s.x(i).iter().map(|v| format!("{v:e}")));
                row.push(format!("{:e}", s.heights[i]));
                row.extend(s.v(i).iter().map(|v| format!("{v:e}")));
                writeln!(self.out, "{}", row.join(","))?;
            }
            Ok(())
        };
        if let Err(e) = write() {
            self.error = Some(e);
        }
    }
}
