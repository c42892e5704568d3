//! Samplers for the microcanonical ensemble, the limiting one-particle
//! law `nu`, and the uniform law on configurations with a fixed mean height.
//!
//! Positions of the microcanonical ensemble have density proportional to
//! `(E - PE)^{((n+1)d - 2)/2}` on the admissible set; velocities are then
//! uniform on the mass-weighted sphere of kinetic energy `E - PE`.

use crate::equilibrium::solve_archimedes;
use crate::error::{Error, Result};
use crate::geometry::{norm_sq, ModelParams};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use rand_distr::{Distribution, Exp, StandardNormal};
use std::io::Write;

/// Full phase point: `n` particles followed by the ball (index `n`).
#[derive(Debug, Clone, PartialEq)]
pub struct SystemState {
    pub dim: usize,
    pub n_particles: usize,
    pub time: f64,
    /// Horizontal coordinates, `d - 1` per object.
    pub horiz: Vec<f64>,
    /// Vertical coordinates, one per object.
    pub heights: Vec<f64>,
    /// Velocities, `d` per object, horizontal components first.
    pub velocities: Vec<f64>,
}

impl SystemState {
    /// All objects at the origin and at rest; callers fill in positions.
    pub fn zeros(dim: usize, n_particles: usize) -> Self {
        let objects = n_particles + 1;
        SystemState {
            dim,
            n_particles,
            time: 0.0,
            horiz: vec![0.0; objects * (dim - 1)],
            heights: vec![0.0; objects],
            velocities: vec![0.0; objects * dim],
        }
    }

    pub fn objects(&self) -> usize {
        self.n_particles + 1
    }

    pub fn ball_index(&self) -> usize {
        self.n_particles
    }

    pub fn x(&self, i: usize) -> &[f64] {
        let k = self.dim - 1;
        &self.horiz[i * k..(i + 1) * k]
    }

    pub fn x_mut(&mut self, i: usize) -> &mut [f64] {
        let k = self.dim - 1;
        &mut self.horiz[i * k..(i + 1) * k]
    }

    pub fn v(&self, i: usize) -> &[f64] {
        &self.velocities[i * self.dim..(i + 1) * self.dim]
    }

    pub fn v_mut(&mut self, i: usize) -> &mut [f64] {
        let d = self.dim;
        &mut self.velocities[i * d..(i + 1) * d]
    }

    pub fn ball_x(&self) -> &[f64] {
        self.x(self.n_particles)
    }

    pub fn ball_y(&self) -> f64 {
        self.heights[self.n_particles]
    }

    /// Mass of object `i`.
    pub fn mass(&self, i: usize, params: &ModelParams) -> f64 {
        if i == self.n_particles {
            params.ball_mass
        } else {
            params.gas_mass / self.n_particles as f64
        }
    }

    pub fn potential_energy(&self, params: &ModelParams) -> f64 {
        let mp = params.gas_mass / self.n_particles as f64;
        let gas: f64 = self.heights[..self.n_particles].iter().sum();
        params.gravity * (mp * gas + params.ball_mass * self.ball_y())
    }

    pub fn kinetic_energy(&self, params: &ModelParams) -> f64 {
        (0..self.objects())
            .map(|i| 0.5 * self.mass(i, params) * norm_sq(self.v(i)))
            .sum()
    }

    pub fn total_energy(&self, params: &ModelParams) -> f64 {
        self.potential_energy(params) + self.kinetic_energy(params)
    }

    /// Checks admissibility of every object (with slack `tol` in length)
    /// and the energy identity to relative `energy_tol`.
    pub fn check_invariants(&self, params: &ModelParams, tol: f64, energy_tol: f64) -> Result<()> {
        if self.dim != params.dim || self.n_particles != params.n_particles {
            return Err(Error::InvalidParam("state shape does not match parameters".into()));
        }
        let r = params.ball_radius;
        let rho = params.base_radius;
        let (bx, by) = (self.ball_x(), self.ball_y());
        if norm_sq(bx).sqrt() > rho - r + tol || by < r - tol {
            return Err(Error::OutOfRange(format!("ball centre ({bx:?}, {by}) outside its range")));
        }
        for i in 0..self.n_particles {
            let x = self.x(i);
            let y = self.heights[i];
            let inside_ball = {
                let mut s = (y - by) * (y - by);
                for (a, b) in x.iter().zip(bx) {
                    s += (a - b) * (a - b);
                }
                s.sqrt() < r - tol
            };
            if norm_sq(x).sqrt() > rho + tol || y < -tol || inside_ball {
                return Err(Error::OutOfRange(format!("particle {i} at ({x:?}, {y}) not admissible")));
            }
        }
        let e = self.total_energy(params);
        if (e / params.energy - 1.0).abs() > energy_tol {
            return Err(Error::OutOfRange(format!("energy {e} differs from {}", params.energy)));
        }
        Ok(())
    }

    /// CSV header matching [`SystemState::csv_row`].
    pub fn csv_header(&self) -> String {
        let mut cols = vec!["time".to_string()];
        let k = self.dim - 1;
        for i in 0..self.objects() {
            for c in 0..k {
                cols.push(format!("x{i}_{c}"));
            }
            cols.push(format!("y{i}"));
            for c in 0..self.dim {
                cols.push(format!("v{i}_{c}"));
            }
        }
        cols.join(",")
    }

    pub fn csv_row(&self) -> String {
        let mut cols = vec![format!("{:e}", self.time)];
        for i in 0..self.objects() {
            cols.extend(self.x(i).iter().map(|v| format!("{v:e}")));
            cols.push(format!("{:e}", self.heights[i]));
            cols.extend(self.v(i).iter().map(|v| format!("{v:e}")));
        }
        cols.join(",")
    }
}

/// Writes states as CSV, one row per state.
pub fn write_states_csv<W: Write>(out: &mut W, states: &[SystemState]) -> Result<()> {
    if let Some(first) = states.first() {
        writeln!(out, "{}", first.csv_header())?;
    }
    for s in states {
        writeln!(out, "{}", s.csv_row())?;
    }
    Ok(())
}

/// Uniform point in the `(d-1)`-ball of the given radius.
pub fn uniform_in_base<R: Rng + ?Sized>(dim: usize, radius: f64, rng: &mut R, out: &mut [f64]) {
    let k = dim - 1;
    if k == 1 {
        out[0] = radius * (2.0 * rng.random::<f64>() - 1.0);
        return;
    }
    let mut s = 0.0;
    for v in out.iter_mut() {
        *v = StandardNormal.sample(rng);
        s += *v * *v;
    }
    let scale = radius * rng.random::<f64>().powf(1.0 / k as f64) / s.sqrt();
    for v in out.iter_mut() {
        *v *= scale;
    }
}

/// Velocities uniform on the sphere `sum m_i |v_i|^2 / 2 = E - potential_energy`.
pub fn sample_velocities<R: Rng + ?Sized>(potential_energy: f64, params: &ModelParams, rng: &mut R) -> Result<Vec<f64>> {
    let kinetic = params.energy - potential_energy;
    if !(kinetic > 0.0) {
        return Err(Error::EnergyExhausted {
            potential: potential_energy,
            total: params.energy,
        });
    }
    let d = params.dim;
    let n = params.n_particles;
    let mut w: Vec<f64> = (0..(n + 1) * d).map(|_| StandardNormal.sample(rng)).collect();
    let norm = norm_sq(&w).sqrt();
    let scale = (2.0 * kinetic).sqrt() / norm;
    let mp = params.gas_mass / n as f64;
    for (k, v) in w.iter_mut().enumerate() {
        let m = if k / d == n { params.ball_mass } else { mp };
        *v *= scale / m.sqrt();
    }
    Ok(w)
}

/// Metropolis settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McmcConfig {
    pub burn_in: usize,
    /// Proposals between emitted states; `0` means `10 n`.
    pub thinning: usize,
    /// Initial proposal scale, in units of the container base radius.
    pub scale: f64,
    /// Proposals of one kind between scale updates during burn-in.
    pub adapt_window: usize,
    /// Probability that a proposal moves the ball.
    pub ball_move_prob: f64,
    pub seed: u64,
}

impl Default for McmcConfig {
    fn default() -> Self {
        McmcConfig {
            burn_in: 100_000,
            thinning: 0,
            scale: 0.1,
            adapt_window: 200,
            ball_move_prob: 0.3,
            seed: 0,
        }
    }
}

impl McmcConfig {
    pub fn validate(&self) -> Result<()> {
        if self.adapt_window == 0 || !(self.scale > 0.0) || !(0.0..=1.0).contains(&self.ball_move_prob) {
            return Err(Error::InvalidParam("mcmc config: need adapt_window >= 1, scale > 0, ball_move_prob in [0, 1]".into()));
        }
        Ok(())
    }

    fn thinning_for(&self, n: usize) -> usize {
        if self.thinning == 0 { 10 * n } else { self.thinning }
    }
}

/// Acceptance statistics of a chain.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ChainDiagnostics {
    pub particle_proposals: u64,
    pub particle_accepts: u64,
    pub ball_proposals: u64,
    pub ball_accepts: u64,
    pub particle_scale: f64,
    pub ball_scale: f64,
}

impl ChainDiagnostics {
    pub fn particle_acceptance(&self) -> f64 {
        self.particle_accepts as f64 / self.particle_proposals.max(1) as f64
    }

    pub fn ball_acceptance(&self) -> f64 {
        self.ball_accepts as f64 / self.ball_proposals.max(1) as f64
    }
}

/// Metropolis chain on the microcanonical position density.
///
/// Particle proposals are Gaussian random-walk steps of one particle. Ball
/// proposals shift the ball centre by a Gaussian step; any particle the
/// shifted ball would contain is reflected across the hyperplane bisecting
/// the old and new centres, which maps the new ball onto the vacated one.
/// That map is a volume-preserving involution, so the move is symmetric.
pub struct MicrocanonicalChain {
    params: ModelParams,
    state: SystemState,
    potential: f64,
    exponent: f64,
    rng: ChaCha8Rng,
    cfg: McmcConfig,
    diag: ChainDiagnostics,
    window: [(u64, u64); 2],
    scratch: Vec<(usize, f64, Vec<f64>)>,
}

impl MicrocanonicalChain {
    /// Starts from particles spread uniformly over a thin bottom layer,
    /// with the ball centred above the origin at `max(R, y_A)`.
    pub fn new(params: &ModelParams, cfg: McmcConfig) -> Result<Self> {
        params.require_ball()?;
        cfg.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let n = params.n_particles;
        let d = params.dim;
        let mut state = SystemState::zeros(d, n);
        let y_ball = match solve_archimedes(params) {
            Ok(s) => s.y_a,
            Err(_) => params.ball_radius,
        }
        .max(params.ball_radius);
        state.heights[n] = y_ball;
        let gas_energy = params.energy - params.ball_mass * params.gravity * y_ball;
        // mean height layer/2 keeps the gas potential energy at a quarter of
        // what remains
        let layer = 0.5 * gas_energy / (params.gas_mass * params.gravity);
        let mut x = vec![0.0; d - 1];
        for i in 0..n {
            let mut placed = false;
            for _ in 0..1_000_000 {
                uniform_in_base(d, params.base_radius, &mut rng, &mut x);
                let y = layer * rng.random::<f64>();
                if !inside_ball(&x, y, state.ball_x(), y_ball, params.ball_radius) {
                    state.x_mut(i).copy_from_slice(&x);
                    state.heights[i] = y;
                    placed = true;
                    break;
                }
            }
            if !placed {
                return Err(Error::InfeasibleConstraint(i));
            }
        }
        let potential = state.potential_energy(params);
        let exponent = ((n + 1) * d) as f64 / 2.0 - 1.0;
        let scale = cfg.scale * params.base_radius;
        Ok(MicrocanonicalChain {
            params: *params,
            state,
            potential,
            exponent,
            rng,
            cfg,
            diag: ChainDiagnostics {
                particle_scale: scale,
                ball_scale: scale,
                ..Default::default()
            },
            window: [(0, 0); 2],
            scratch: Vec::new(),
        })
    }

    pub fn state(&self) -> &SystemState {
        &self.state
    }

    pub fn diagnostics(&self) -> ChainDiagnostics {
        self.diag
    }

    fn log_target(&self, potential: f64) -> f64 {
        let k = self.params.energy - potential;
        if k <= 0.0 {
            f64::NEG_INFINITY
        } else {
            self.exponent * k.ln()
        }
    }

    fn accept(&mut self, new_potential: f64) -> bool {
        let diff = self.log_target(new_potential) - self.log_target(self.potential);
        diff >= 0.0 || self.rng.random::<f64>().ln() < diff
    }

    /// One proposal; `adapt` enables scale updates.
    pub fn step(&mut self, adapt: bool) {
        if self.rng.random::<f64>() < self.cfg.ball_move_prob {
            let ok = self.ball_move();
            self.diag.ball_proposals += 1;
            self.diag.ball_accepts += ok as u64;
            self.record(1, ok, adapt);
        } else {
            let ok = self.particle_move();
            self.diag.particle_proposals += 1;
            self.diag.particle_accepts += ok as u64;
            self.record(0, ok, adapt);
        }
    }

    fn record(&mut self, kind: usize, ok: bool, adapt: bool) {
        if !adapt {
            return;
        }
        let w = &mut self.window[kind];
        w.0 += 1;
        w.1 += ok as u64;
        if w.0 as usize >= self.cfg.adapt_window {
            let rate = w.1 as f64 / w.0 as f64;
            let factor = (2.0 * (rate - 0.3)).exp();
            let cap = 2.0 * self.params.base_radius.max(self.params.max_ball_height().min(1e6));
            let s = if kind == 0 { &mut self.diag.particle_scale } else { &mut self.diag.ball_scale };
            *s = (*s * factor).clamp(1e-9, cap);
            *w = (0, 0);
        }
    }

    fn particle_move(&mut self) -> bool {
        let p = &self.params;
        let n = p.n_particles;
        let i = self.rng.random_range(0..n);
        let s = self.diag.particle_scale;
        let k = p.dim - 1;
        let mut x = self.state.x(i).to_vec();
        for v in x.iter_mut() {
            *v += s * normal(&mut self.rng);
        }
        let y = self.state.heights[i] + s * normal(&mut self.rng);
        if y < 0.0 || norm_sq(&x) > p.base_radius * p.base_radius {
            return false;
        }
        if inside_ball(&x, y, &self.state.horiz[n * k..(n + 1) * k], self.state.heights[n], p.ball_radius) {
            return false;
        }
        let mp = p.gas_mass / n as f64;
        let new_pot = self.potential + mp * p.gravity * (y - self.state.heights[i]);
        if !self.accept(new_pot) {
            return false;
        }
        self.state.x_mut(i).copy_from_slice(&x);
        self.state.heights[i] = y;
        self.potential = new_pot;
        true
    }

    fn ball_move(&mut self) -> bool {
        let p = self.params;
        let n = p.n_particles;
        let d = p.dim;
        let s = self.diag.ball_scale;
        let old_x = self.state.ball_x().to_vec();
        let old_y = self.state.ball_y();
        let mut step: Vec<f64> = (0..d).map(|_| s * normal(&mut self.rng)).collect();
        let new_x: Vec<f64> = old_x.iter().zip(&step).map(|(a, b)| a + b).collect();
        let new_y = old_y + step[d - 1];
        let room = p.base_radius - p.ball_radius;
        if new_y < p.ball_radius || norm_sq(&new_x) > room * room {
            return false;
        }
        let len = norm_sq(&step).sqrt();
        if len == 0.0 {
            return true;
        }
        for v in step.iter_mut() {
            *v /= len;
        }
        let mid_x: Vec<f64> = old_x.iter().zip(&new_x).map(|(a, b)| 0.5 * (a + b)).collect();
        let mid_y = 0.5 * (old_y + new_y);
        let mp = p.gas_mass / n as f64;
        let mut new_pot = self.potential + p.ball_mass * p.gravity * (new_y - old_y);
        self.scratch.clear();
        for i in 0..n {
            let x = self.state.x(i);
            let y = self.state.heights[i];
            if !inside_ball(x, y, &new_x, new_y, p.ball_radius) {
                continue;
            }
            // reflect across the bisecting hyperplane
            let mut dot = (y - mid_y) * step[d - 1];
            for c in 0..d - 1 {
                dot += (x[c] - mid_x[c]) * step[c];
            }
            let rx: Vec<f64> = (0..d - 1).map(|c| x[c] - 2.0 * dot * step[c]).collect();
            let ry = y - 2.0 * dot * step[d - 1];
            if ry < 0.0 || norm_sq(&rx) > p.base_radius * p.base_radius {
                return false;
            }
            new_pot += mp * p.gravity * (ry - y);
            self.scratch.push((i, ry, rx));
        }
        if !self.accept(new_pot) {
            return false;
        }
        let moved = std::mem::take(&mut self.scratch);
        for (i, ry, rx) in &moved {
            self.state.x_mut(*i).copy_from_slice(rx);
            self.state.heights[*i] = *ry;
        }
        self.scratch = moved;
        self.state.x_mut(n).copy_from_slice(&new_x);
        self.state.heights[n] = new_y;
        self.potential = new_pot;
        true
    }

    /// Runs the configured burn-in with scale adaptation.
    pub fn burn_in(&mut self) {
        for _ in 0..self.cfg.burn_in {
            self.step(true);
        }
    }

    /// Advances by the thinning interval and returns a full state with
    /// fresh velocities.
    pub fn next_state(&mut self) -> Result<SystemState> {
        let thin = self.cfg.thinning_for(self.params.n_particles);
        for _ in 0..thin {
            self.step(false);
        }
        // recompute to avoid accumulated rounding in the running sum
        self.potential = self.state.potential_energy(&self.params);
        let mut out = self.state.clone();
        out.velocities = sample_velocities(self.potential, &self.params, &mut self.rng)?;
        Ok(out)
    }
}

fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

fn inside_ball(x: &[f64], y: f64, bx: &[f64], by: f64, r: f64) -> bool {
    let mut s = (y - by) * (y - by);
    for (a, b) in x.iter().zip(bx) {
        s += (a - b) * (a - b);
    }
    s < r * r
}

/// Burn-in followed by `count` thinned microcanonical states.
pub fn sample_microcanonical(params: &ModelParams, cfg: McmcConfig, count: usize) -> Result<(Vec<SystemState>, ChainDiagnostics)> {
    let mut chain = MicrocanonicalChain::new(params, cfg)?;
    chain.burn_in();
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        out.push(chain.next_state()?);
    }
    Ok((out, chain.diagnostics()))
}

/// Exact draw from `nu`: uniform base point times `Exp(lambda)` height,
/// conditioned to lie outside the ball. Returns the number of attempts too.
pub fn sample_nu<R: Rng + ?Sized>(
    ball_x: &[f64],
    ball_y: f64,
    lambda: f64,
    params: &ModelParams,
    rng: &mut R,
) -> Result<(Vec<f64>, f64, usize)> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidParam(format!("rate must be positive, got {lambda}")));
    }
    let exp = Exp::new(lambda).map_err(|e| Error::InvalidParam(e.to_string()))?;
    let mut x = vec![0.0; params.dim - 1];
    let mut attempts = 0;
    loop {
        attempts += 1;
        uniform_in_base(params.dim, params.base_radius, rng, &mut x);
        let y: f64 = exp.sample(rng);
        if !inside_ball(&x, y, ball_x, ball_y, params.ball_radius) {
            return Ok((x, y, attempts));
        }
    }
}

/// Particle configuration from the fixed-mean-height chain.
#[derive(Debug, Clone, PartialEq)]
pub struct SlabState {
    pub horiz: Vec<f64>,
    pub heights: Vec<f64>,
}

/// Metropolis chain on the uniform law over admissible configurations of
/// `n` particles with `sum y_i / n = u`, around a fixed ball. Height moves
/// transfer `delta` between two particles; horizontal moves shift one
/// particle.
pub struct SlabChain {
    params: ModelParams,
    ball_x: Vec<f64>,
    ball_y: f64,
    state: SlabState,
    scale: f64,
    rng: ChaCha8Rng,
    cfg: McmcConfig,
    window: (u64, u64),
    pub proposals: u64,
    pub accepts: u64,
}

impl SlabChain {
    /// Starts with every particle at height `u`, horizontal positions drawn
    /// uniformly outside the ball's slice at that height.
    pub fn new(ball_x: &[f64], ball_y: f64, u: f64, n_particles: usize, params: &ModelParams, cfg: McmcConfig) -> Result<Self> {
        if !(u > 0.0) {
            return Err(Error::InvalidParam(format!("mean height must be positive, got {u}")));
        }
        cfg.validate()?;
        let d = params.dim;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut horiz = vec![0.0; n_particles * (d - 1)];
        let mut x = vec![0.0; d - 1];
        let mut attempts = 0usize;
        for i in 0..n_particles {
            loop {
                attempts += 1;
                if attempts > 1_000_000 {
                    return Err(Error::InfeasibleConstraint(i));
                }
                uniform_in_base(d, params.base_radius, &mut rng, &mut x);
                if !inside_ball(&x, u, ball_x, ball_y, params.ball_radius) {
                    horiz[i * (d - 1)..(i + 1) * (d - 1)].copy_from_slice(&x);
                    break;
                }
            }
        }
        Ok(SlabChain {
            params: *params,
            ball_x: ball_x.to_vec(),
            ball_y,
            state: SlabState {
                horiz,
                heights: vec![u; n_particles],
            },
            scale: cfg.scale * u.max(params.base_radius),
            rng,
            cfg,
            window: (0, 0),
            proposals: 0,
            accepts: 0,
        })
    }

    pub fn state(&self) -> &SlabState {
        &self.state
    }

    fn admissible(&self, x: &[f64], y: f64) -> bool {
        y >= 0.0
            && norm_sq(x) <= self.params.base_radius * self.params.base_radius
            && !inside_ball(x, y, &self.ball_x, self.ball_y, self.params.ball_radius)
    }

    pub fn step(&mut self, adapt: bool) {
        let n = self.state.heights.len();
        let k = self.params.dim - 1;
        let ok = if n >= 2 && self.rng.random::<f64>() < 0.5 {
            let i = self.rng.random_range(0..n);
            let mut j = self.rng.random_range(0..n - 1);
            if j >= i {
                j += 1;
            }
            let delta = self.scale * normal(&mut self.rng);
            let yi = self.state.heights[i] + delta;
            let yj = self.state.heights[j] - delta;
            let ok = self.admissible(&self.state.horiz[i * k..(i + 1) * k], yi)
                && self.admissible(&self.state.horiz[j * k..(j + 1) * k], yj);
            if ok {
                self.state.heights[i] = yi;
                self.state.heights[j] = yj;
            }
            ok
        } else {
            let i = self.rng.random_range(0..n);
            let mut x = self.state.horiz[i * k..(i + 1) * k].to_vec();
            for v in x.iter_mut() {
                *v += self.scale * normal(&mut self.rng);
            }
            let ok = self.admissible(&x, self.state.heights[i]);
            if ok {
                self.state.horiz[i * k..(i + 1) * k].copy_from_slice(&x);
            }
            ok
        };
        self.proposals += 1;
        self.accepts += ok as u64;
        if adapt {
            self.window.0 += 1;
            self.window.1 += ok as u64;
            if self.window.0 as usize >= self.cfg.adapt_window {
                let rate = self.window.1 as f64 / self.window.0 as f64;
                self.scale = (self.scale * (2.0 * (rate - 0.3)).exp()).clamp(1e-12, 1e6);
                self.window = (0, 0);
            }
        }
    }
}

/// Burn-in followed by `count` thinned configurations from [`SlabChain`].
pub fn sample_conditional_slab(
    ball_x: &[f64],
    ball_y: f64,
    u: f64,
    n_particles: usize,
    params: &ModelParams,
    cfg: McmcConfig,
    count: usize,
) -> Result<Vec<SlabState>> {
    let mut chain = SlabChain::new(ball_x, ball_y, u, n_particles, params, cfg)?;
    for _ in 0..cfg.burn_in {
        chain.step(true);
    }
    let thin = cfg.thinning_for(n_particles);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        for _ in 0..thin {
            chain.step(false);
        }
        out.push(chain.state.clone());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::validation::concentrated_fixture;

    #[test]
    fn velocities_carry_the_remaining_energy() {
        let p = concentrated_fixture(20);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let v = sample_velocities(0.7, &p, &mut rng).unwrap();
        let mut s = SystemState::zeros(2, 20);
        s.velocities = v;
        assert!((s.kinetic_energy(&p) / (p.energy - 0.7) - 1.0).abs() < 1e-12);
        assert!(matches!(sample_velocities(2.5, &p, &mut rng), Err(Error::EnergyExhausted { .. })));
    }

    #[test]
    fn uniform_base_points_stay_inside() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut x = vec![0.0; 2];
        for _ in 0..1000 {
            uniform_in_base(3, 1.5, &mut rng, &mut x);
            assert!(norm_sq(&x) <= 2.25);
        }
    }

    #[test]
    fn chain_states_satisfy_invariants() {
        let p = concentrated_fixture(30);
        let cfg = McmcConfig { burn_in: 5000, seed: 3, ..Default::default() };
        let (states, diag) = sample_microcanonical(&p, cfg, 20).unwrap();
        for s in &states {
            s.check_invariants(&p, 0.0, 1e-12).unwrap();
        }
        assert!(diag.ball_accepts > 0 && diag.particle_accepts > 0);
    }

    #[test]
    fn same_seed_same_stream() {
        let p = concentrated_fixture(10);
        let cfg = McmcConfig { burn_in: 1000, seed: 9, ..Default::default() };
        let a = sample_microcanonical(&p, cfg, 5).unwrap().0;
        let b = sample_microcanonical(&p, cfg, 5).unwrap().0;
        assert_eq!(a, b);
    }

    #[test]
    fn slab_keeps_its_mean() {
        let p = concentrated_fixture(10);
        let cfg = McmcConfig { burn_in: 2000, thinning: 50, seed: 4, ..Default::default() };
        let out = sample_conditional_slab(&[0.0], 1.0, 0.8, 40, &p, cfg, 30).unwrap();
        for s in &out {
            let mean: f64 = s.heights.iter().sum::<f64>() / 40.0;
            assert!((mean - 0.8).abs() < 1e-12);
        }
    }
}
