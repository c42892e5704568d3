//! Observables of sampled and simulated systems and their predictions.

use crate::analytics::gas_law_point;
use crate::dynamics::{BallSegment, Observer, ReflectionMode, RunReport, Simulation};
use crate::equilibrium::HeightProfile;
use crate::error::{Error, Result};
use crate::geometry::{ball_slice_area, unit_ball_volume, ModelParams};
use crate::quadrature::integrate_doubling;
use crate::sampler::SystemState;
use statrs::distribution::{ChiSquared, ContinuousCDF};
use std::f64::consts::PI;
use std::io::Write;

/// Equal-width histogram on `[lo, hi)` with overflow weights on both sides.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub weights: Vec<f64>,
    pub below: f64,
    pub above: f64,
    /// Number of contributions (samples or segments).
    pub count: u64,
}

impl Histogram {
    pub fn new(lo: f64, hi: f64, bins: usize) -> Self {
        assert!(hi > lo && bins > 0);
        Histogram {
            lo,
            hi,
            weights: vec![0.0; bins],
            below: 0.0,
            above: 0.0,
            count: 0,
        }
    }

    pub fn bins(&self) -> usize {
        self.weights.len()
    }

    pub fn width(&self) -> f64 {
        (self.hi - self.lo) / self.bins() as f64
    }

    pub fn edge(&self, k: usize) -> f64 {
        if k == self.bins() { self.hi } else { self.lo + self.width() * k as f64 }
    }

    pub fn total(&self) -> f64 {
        self.below + self.above + self.weights.iter().sum::<f64>()
    }

    pub fn add(&mut self, x: f64, w: f64) {
        self.count += 1;
        if x < self.lo {
            self.below += w;
        } else if x >= self.hi {
            self.above += w;
        } else {
            let k = (((x - self.lo) / self.width()) as usize).min(self.bins() - 1);
            self.weights[k] += w;
        }
    }

    /// Adds the exact time a parabolic height `y0 + v0 t - g t^2 / 2`,
    /// `t in [0, duration]`, spends in each bin.
    pub fn add_parabola(&mut self, y0: f64, v0: f64, g: f64, duration: f64) {
        if !(duration > 0.0) {
            return;
        }
        self.count += 1;
        let y_end = y0 + v0 * duration - 0.5 * g * duration * duration;
        let apex_t = v0 / g;
        let y_max = if apex_t > 0.0 && apex_t < duration { y0 + 0.5 * v0 * v0 / g } else { y0.max(y_end) };
        let y_min = y0.min(y_end);
        // time spent at or above `level`
        let above = |level: f64| -> f64 {
            if level <= y_min {
                return duration;
            }
            if level > y_max {
                return 0.0;
            }
            let disc = v0 * v0 + 2.0 * g * (y0 - level);
            if disc < 0.0 {
                return 0.0;
            }
            let s = disc.sqrt();
            let t1 = (v0 - s) / g;
            let t2 = (v0 + s) / g;
            (t2.min(duration) - t1.max(0.0)).max(0.0)
        };
        let n = self.bins();
        let first = if y_min <= self.lo { 0 } else { (((y_min - self.lo) / self.width()) as usize).min(n) };
        let last = if y_max >= self.hi { n } else { ((((y_max - self.lo) / self.width()).max(0.0)) as usize + 1).min(n) };
        self.below += duration - above(self.lo);
        let mut prev = above(self.edge(first));
        if first > 0 {
            // bins between lo and the first touched edge get nothing
            debug_assert!((prev - duration).abs() <= 1e-9 * duration);
        }
        for k in first..last {
            let next = above(self.edge(k + 1));
            self.weights[k] += (prev - next).max(0.0);
            prev = next;
        }
        self.above += above(self.hi);
    }

    /// Empirical CDF at the `bins + 1` edges.
    pub fn cdf_at_edges(&self) -> Vec<f64> {
        let total = self.total();
        let mut acc = self.below;
        let mut out = Vec::with_capacity(self.bins() + 1);
        out.push(acc / total);
        for w in &self.weights {
            acc += w;
            out.push(acc / total);
        }
        out
    }

    /// Fractions per bin; together with the overflow fractions they sum to 1.
    pub fn normalized(&self) -> Vec<f64> {
        let total = self.total();
        self.weights.iter().map(|w| w / total).collect()
    }

    pub fn merge(&mut self, other: &Histogram) -> Result<()> {
        if self.lo != other.lo || self.hi != other.hi || self.bins() != other.bins() {
            return Err(Error::InvalidParam("histograms with different binning".into()));
        }
        for (a, b) in self.weights.iter_mut().zip(&other.weights) {
            *a += b;
        }
        self.below += other.below;
        self.above += other.above;
        self.count += other.count;
        Ok(())
    }
}

/// Height marginal of the limiting one-particle law around a ball at
/// `ball_y`: density `(|D_b| - slice(y)) lambda e^{-lambda y} / q`.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictedMarginal {
    pub lambda: f64,
    pub ball_y: f64,
    pub params: ModelParams,
    pub q: f64,
}

impl PredictedMarginal {
    /// Fails if the closed-form normaliser disagrees with `q` beyond `1e-8`.
    pub fn new(lambda: f64, ball_y: f64, params: &ModelParams) -> Result<Self> {
        let q = gas_law_point(lambda, ball_y, params)?.q;
        let m = PredictedMarginal {
            lambda,
            ball_y,
            params: *params,
            q,
        };
        let mass = (params.base_area() - m.ball_part(f64::INFINITY)?) / q;
        if (mass - 1.0).abs() > 1e-8 {
            return Err(Error::NoConvergence(format!("marginal integrates to {mass}")));
        }
        Ok(m)
    }

    pub fn density(&self, y: f64) -> f64 {
        if y < 0.0 {
            return 0.0;
        }
        let free = self.params.base_area() - ball_slice_area(self.ball_y, y, &self.params);
        free * self.lambda * (-self.lambda * y).exp() / self.q
    }

    /// `integral_{0}^{y} slice(s) lambda e^{-lambda s} ds`, through
    /// `s = ball_y + R sin(phi)`.
    fn ball_part(&self, y: f64) -> Result<f64> {
        let r = self.params.ball_radius;
        if r == 0.0 || y <= self.ball_y - r {
            return Ok(0.0);
        }
        let top = ((y - self.ball_y) / r).clamp(-1.0, 1.0).asin();
        let c = unit_ball_volume(self.params.dim - 1) * r.powi(self.params.dim as i32);
        let lam = self.lambda;
        let yc = self.ball_y;
        let d = self.params.dim as i32;
        let (v, ok) = integrate_doubling::<1, _>(-PI / 2.0, top, [1e-3 * self.q], 1e-13, |phi| {
            let (s, co) = phi.sin_cos();
            [c * co.max(0.0).powi(d) * lam * (-lam * (yc + r * s)).exp()]
        });
        if !ok {
            return Err(Error::NoConvergence("marginal quadrature".into()));
        }
        Ok(v[0])
    }

    pub fn cdf(&self, y: f64) -> f64 {
        if y <= 0.0 {
            return 0.0;
        }
        let full = self.params.base_area() * (-(-self.lambda * y).exp_m1());
        let ball = self.ball_part(y).unwrap_or(0.0);
        ((full - ball) / self.q).clamp(0.0, 1.0)
    }
}

const MIN_KS_SAMPLES: usize = 100;

/// Kolmogorov–Smirnov distance between a sample and a CDF.
pub fn ks_distance(samples: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64> {
    if samples.len() < MIN_KS_SAMPLES {
        return Err(Error::InsufficientData {
            got: samples.len(),
            need: MIN_KS_SAMPLES,
        });
    }
    let mut s = samples.to_vec();
    s.sort_by(|a, b| a.total_cmp(b));
    let n = s.len() as f64;
    let mut d: f64 = 0.0;
    for (i, x) in s.iter().enumerate() {
        let f = cdf(*x);
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    Ok(d)
}

/// KS distance between a (weighted) histogram and a CDF, evaluated at the
/// bin edges.
pub fn ks_distance_histogram(hist: &Histogram, cdf: impl Fn(f64) -> f64) -> Result<f64> {
    if (hist.count as usize) < MIN_KS_SAMPLES {
        return Err(Error::InsufficientData {
            got: hist.count as usize,
            need: MIN_KS_SAMPLES,
        });
    }
    let emp = hist.cdf_at_edges();
    Ok(emp
        .iter()
        .enumerate()
        .map(|(k, e)| (e - cdf(hist.edge(k))).abs())
        .fold(0.0, f64::max))
}

/// KS distance between two histograms with the same binning.
pub fn ks_between_histograms(a: &Histogram, b: &Histogram) -> Result<f64> {
    if a.lo != b.lo || a.hi != b.hi || a.bins() != b.bins() {
        return Err(Error::InvalidParam("histograms with different binning".into()));
    }
    let (ca, cb) = (a.cdf_at_edges(), b.cdf_at_edges());
    Ok(ca.iter().zip(&cb).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
}

/// Pearson chi-square test of uniformity of points in a `(d-1)`-ball of
/// `radius`, with 16 equal-area cells: equal-width intervals for `d = 2`,
/// four equal-area rings times four sectors for `d = 3`, equal-volume
/// shells otherwise. Returns `(statistic, p-value)`.
pub fn uniformity_chi_square(points: &[Vec<f64>], dim: usize, radius: f64) -> Result<(f64, f64)> {
    const CELLS: usize = 16;
    if points.len() < 5 * CELLS {
        return Err(Error::InsufficientData {
            got: points.len(),
            need: 5 * CELLS,
        });
    }
    let mut counts = [0u64; CELLS];
    for p in points {
        let cell = match dim {
            2 => ((p[0] / radius + 1.0) / 2.0 * CELLS as f64) as isize,
            3 => {
                let r2 = (p[0] * p[0] + p[1] * p[1]) / (radius * radius);
                let ring = ((r2 * 4.0) as isize).min(3);
                let ang = p[1].atan2(p[0]) + PI;
                let sector = ((ang / (2.0 * PI) * 4.0) as isize).min(3);
                ring * 4 + sector
            }
            _ => {
                let r = p.iter().map(|c| c * c).sum::<f64>().sqrt() / radius;
                (r.powi(dim as i32 - 1) * CELLS as f64) as isize
            }
        };
        counts[cell.clamp(0, CELLS as isize - 1) as usize] += 1;
    }
    let expected = points.len() as f64 / CELLS as f64;
    let stat: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    let dist = ChiSquared::new((CELLS - 1) as f64).map_err(|e| Error::InvalidParam(e.to_string()))?;
    Ok((stat, dist.sf(stat)))
}

/// Sample correlation coefficient.
pub fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().min(b.len()) as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    sab / (saa * sbb).sqrt()
}

/// Running sums for a mean with batch-means standard error.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BatchedMean {
    pub batch_size: u64,
    /// Completed batch means followed by the open batch `(count, sum)`.
    pub batches: Vec<f64>,
    pub open: (u64, f64),
    pub count: u64,
    pub sum: f64,
}

impl BatchedMean {
    pub fn new(batch_size: u64) -> Self {
        BatchedMean { batch_size: batch_size.max(1), ..Default::default() }
    }

    pub fn add(&mut self, x: f64) {
        self.count += 1;
        self.sum += x;
        self.open.0 += 1;
        self.open.1 += x;
        if self.open.0 == self.batch_size {
            self.batches.push(self.open.1 / self.open.0 as f64);
            self.open = (0, 0.0);
        }
    }

    pub fn mean(&self) -> f64 {
        self.sum / self.count as f64
    }

    /// Standard error from the spread of completed batch means (`NaN` with
    /// fewer than two batches).
    pub fn std_error(&self) -> f64 {
        let k = self.batches.len();
        if k < 2 {
            return f64::NAN;
        }
        let m = self.batches.iter().sum::<f64>() / k as f64;
        let var = self.batches.iter().map(|b| (b - m) * (b - m)).sum::<f64>() / (k - 1) as f64;
        (var / k as f64).sqrt()
    }

    /// Appends another stream's data after this one's.
    pub fn merge(&mut self, other: &BatchedMean) {
        self.count += other.count;
        self.sum += other.sum;
        // the open batches are pooled; completed batches are kept as is
        self.batches.extend_from_slice(&other.batches);
        self.open.0 += other.open.0;
        self.open.1 += other.open.1;
        if self.open.0 >= self.batch_size {
            self.batches.push(self.open.1 / self.open.0 as f64);
            self.open = (0, 0.0);
        }
    }
}

/// Layout of an [`EmpiricalSummary`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SummaryConfig {
    /// Observations before this time are ignored.
    pub t_start: f64,
    pub bins: usize,
    /// Upper end of both height histograms.
    pub y_max: f64,
    /// Snapshots per batch for standard errors.
    pub batch_size: u64,
}

/// Time-weighted ball-height statistics, gas height histogram and kinetic
/// energies from a run or a sample stream.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalSummary {
    pub config: SummaryConfig,
    /// Time-weighted ball height occupation.
    pub ball_hist: Histogram,
    pub ball_time: f64,
    pub ball_y_integral: f64,
    pub ball_y2_integral: f64,
    /// Ball height at snapshots, batched for standard errors.
    pub ball_y_snap: BatchedMean,
    /// Particle heights at snapshots.
    pub gas_hist: Histogram,
    pub snapshots: u64,
    /// `(1/n) sum_i m |v_i|^2 / 2` with `m` the total gas mass.
    pub particle_ke: BatchedMean,
    /// `M |V|^2 / 2`.
    pub ball_ke: BatchedMean,
    /// Largest horizontal speed seen at snapshots, any particle.
    pub max_horizontal_speed: f64,
    pub events: u64,
    pub seed: u64,
    pub config_hash: String,
}

impl EmpiricalSummary {
    pub fn new(config: SummaryConfig) -> Self {
        EmpiricalSummary {
            config,
            ball_hist: Histogram::new(0.0, config.y_max, config.bins),
            ball_time: 0.0,
            ball_y_integral: 0.0,
            ball_y2_integral: 0.0,
            ball_y_snap: BatchedMean::new(config.batch_size),
            gas_hist: Histogram::new(0.0, config.y_max, config.bins),
            snapshots: 0,
            particle_ke: BatchedMean::new(config.batch_size),
            ball_ke: BatchedMean::new(config.batch_size),
            max_horizontal_speed: 0.0,
            events: 0,
            seed: 0,
            config_hash: String::new(),
        }
    }

    /// Default layout for a system: 128 bins over
    /// `[0, max(4 / lambda_A, y_A + 2R)]`.
    pub fn default_config(lambda_a: f64, y_a: f64, params: &ModelParams, t_start: f64) -> SummaryConfig {
        SummaryConfig {
            t_start,
            bins: 128,
            y_max: (4.0 / lambda_a).max(y_a + 2.0 * params.ball_radius),
            batch_size: 1000,
        }
    }

    /// Adds a ball flight segment, clipped to `t >= t_start`.
    pub fn add_ball_segment(&mut self, seg: &BallSegment, g: f64) {
        let t0 = seg.t0.max(self.config.t_start);
        if seg.t1 <= t0 {
            return;
        }
        let y0 = seg.height_at(t0, g);
        let v0 = if seg.resting { 0.0 } else { seg.vy0 - g * (t0 - seg.t0) };
        let t = seg.t1 - t0;
        let gg = if seg.resting { 0.0 } else { g };
        if gg == 0.0 {
            self.ball_hist.add(y0, t);
        } else {
            self.ball_hist.add_parabola(y0, v0, gg, t);
        }
        self.ball_time += t;
        // closed-form integrals of y and y^2 over the parabola
        let (t2, t3) = (t * t, t * t * t);
        self.ball_y_integral += y0 * t + 0.5 * v0 * t2 - gg * t3 / 6.0;
        self.ball_y2_integral += y0 * y0 * t + y0 * v0 * t2 + (v0 * v0 - gg * y0) * t3 / 3.0
            - 0.25 * v0 * gg * t2 * t2
            + gg * gg * t2 * t3 / 20.0;
    }

    /// Adds a state observed at one instant (a snapshot or a sample).
    pub fn add_state(&mut self, s: &SystemState, params: &ModelParams) {
        if s.time < self.config.t_start {
            return;
        }
        self.snapshots += 1;
        let n = s.n_particles;
        let d = s.dim;
        let mut ke = 0.0;
        for i in 0..n {
            self.gas_hist.add(s.heights[i], 1.0);
            let v = s.v(i);
            ke += v.iter().map(|c| c * c).sum::<f64>();
            let h: f64 = v[..d - 1].iter().map(|c| c * c).sum::<f64>().sqrt();
            self.max_horizontal_speed = self.max_horizontal_speed.max(h);
        }
        self.particle_ke.add(0.5 * params.gas_mass * ke / n as f64);
        let vb = s.v(n);
        self.ball_ke.add(0.5 * params.ball_mass * vb.iter().map(|c| c * c).sum::<f64>());
        self.ball_y_snap.add(s.ball_y());
    }

    /// Time-weighted mean ball height (falls back to the snapshot mean when
    /// no segments were recorded, e.g. for sampler streams).
    pub fn ball_mean(&self) -> f64 {
        if self.ball_time > 0.0 {
            self.ball_y_integral / self.ball_time
        } else {
            self.ball_y_snap.mean()
        }
    }

    pub fn ball_std(&self) -> f64 {
        let m = self.ball_mean();
        (self.ball_y2_integral / self.ball_time - m * m).max(0.0).sqrt()
    }

    pub fn ks_gas(&self, predicted: &PredictedMarginal) -> Result<f64> {
        ks_distance_histogram(&self.gas_hist, |y| predicted.cdf(y))
    }

    pub fn ks_ball(&self, profile: &HeightProfile) -> Result<f64> {
        ks_distance_histogram(&self.ball_hist, |y| profile.cdf(y))
    }

    /// Combines two summaries with identical layout; the result equals the
    /// summary of the concatenated streams.
    pub fn merge(&mut self, other: &EmpiricalSummary) -> Result<()> {
        if self.config != other.config {
            return Err(Error::InvalidParam("summaries with different layouts".into()));
        }
        self.ball_hist.merge(&other.ball_hist)?;
        self.gas_hist.merge(&other.gas_hist)?;
        self.ball_time += other.ball_time;
        self.ball_y_integral += other.ball_y_integral;
        self.ball_y2_integral += other.ball_y2_integral;
        self.ball_y_snap.merge(&other.ball_y_snap);
        self.snapshots += other.snapshots;
        self.particle_ke.merge(&other.particle_ke);
        self.ball_ke.merge(&other.ball_ke);
        self.max_horizontal_speed = self.max_horizontal_speed.max(other.max_horizontal_speed);
        self.events += other.events;
        Ok(())
    }

    /// Single-row CSV of the scalar observables.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> Result<()> {
        writeln!(
            out,
            "ball_time,ball_mean,ball_std,snapshots,particle_ke_mean,particle_ke_se,ball_ke_mean,ball_ke_se,max_horizontal_speed,events,seed"
        )?;
        writeln!(
            out,
            "{:e},{:e},{:e},{},{:e},{:e},{:e},{:e},{:e},{},{}",
            self.ball_time,
            self.ball_mean(),
            if self.ball_time > 0.0 { self.ball_std() } else { f64::NAN },
            self.snapshots,
            self.particle_ke.mean(),
            self.particle_ke.std_error(),
            self.ball_ke.mean(),
            self.ball_ke.std_error(),
            self.max_horizontal_speed,
            self.events,
            self.seed
        )?;
        Ok(())
    }

    /// Both height histograms as CSV `(lo, hi, ball_fraction, gas_fraction)`.
    pub fn write_histograms_csv<W: Write>(&self, out: &mut W) -> Result<()> {
        writeln!(out, "lo,hi,ball_fraction,gas_fraction")?;
        let b = self.ball_hist.normalized();
        let g = self.gas_hist.normalized();
        for k in 0..self.ball_hist.bins() {
            writeln!(out, "{:e},{:e},{:e},{:e}", self.ball_hist.edge(k), self.ball_hist.edge(k + 1), b[k], g[k])?;
        }
        Ok(())
    }
}

/// Wraps a summary so it can observe a simulation.
pub struct SummaryObserver<'a> {
    pub summary: EmpiricalSummary,
    params: &'a ModelParams,
}

impl<'a> SummaryObserver<'a> {
    pub fn new(summary: EmpiricalSummary, params: &'a ModelParams) -> Self {
        SummaryObserver { summary, params }
    }
}

impl Observer for SummaryObserver<'_> {
    fn on_event(&mut self, _event: &crate::dynamics::Event) {
        self.summary.events += 1;
    }

    fn on_ball_segment(&mut self, segment: &BallSegment, gravity: f64) {
        self.summary.add_ball_segment(segment, gravity);
    }

    fn on_snapshot(&mut self, state: &SystemState) {
        self.summary.add_state(state, self.params);
    }
}

/// Observed kinetic energies against the limiting value `d m g / (2 lambda_A)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquipartitionReport {
    pub particle_ke: f64,
    pub particle_ke_se: f64,
    pub ball_ke: f64,
    pub ball_ke_se: f64,
    pub target: f64,
}

impl EquipartitionReport {
    pub fn relative_error(&self) -> f64 {
        (self.particle_ke / self.target - 1.0).abs()
    }
}

pub fn equipartition_report(summary: &EmpiricalSummary, lambda_a: f64, params: &ModelParams) -> EquipartitionReport {
    EquipartitionReport {
        particle_ke: summary.particle_ke.mean(),
        particle_ke_se: summary.particle_ke.std_error(),
        ball_ke: summary.ball_ke.mean(),
        ball_ke_se: summary.ball_ke.std_error(),
        target: params.dim as f64 * params.gas_mass * params.gravity / (2.0 * lambda_a),
    }
}

/// Runs the dynamics for `duration` from `initial`, summarising with
/// snapshots every `obs_dt`. `config.t_start` is absolute time.
pub fn simulate(
    initial: &SystemState,
    params: &ModelParams,
    mode: ReflectionMode,
    seed: u64,
    duration: f64,
    obs_dt: f64,
    config: SummaryConfig,
) -> Result<(EmpiricalSummary, RunReport)> {
    if !(duration > 0.0 && obs_dt > 0.0) {
        return Err(Error::InvalidParam("duration and observation interval must be positive".into()));
    }
    let mut sim = Simulation::new(initial, params, mode, seed)?;
    sim.set_observation_interval(Some(obs_dt));
    let mut summary = EmpiricalSummary::new(config);
    summary.seed = seed;
    let mut obs = SummaryObserver::new(summary, params);
    let report = sim.run_until(initial.time + duration, &mut [&mut obs])?;
    Ok((obs.summary, report))
}

/// Result of running the same system from two initial states.
#[derive(Debug, Clone, PartialEq)]
pub struct MixingReport {
    /// KS distance between the time-weighted ball-height occupations.
    pub ks: f64,
    pub first: EmpiricalSummary,
    pub second: EmpiricalSummary,
}

/// Runs both starts for `duration` and compares ball-height occupations
/// recorded after `config.t_start`.
pub fn two_start_mixing(
    first: &SystemState,
    second: &SystemState,
    params: &ModelParams,
    mode: ReflectionMode,
    seed: u64,
    duration: f64,
    config: SummaryConfig,
) -> Result<MixingReport> {
    let obs_dt = duration / 1e4;
    let (a, _) = simulate(first, params, mode, seed, duration, obs_dt, config)?;
    let (b, _) = simulate(second, params, mode, seed.wrapping_add(1), duration, obs_dt, config)?;
    let ks = ks_between_histograms(&a.ball_hist, &b.ball_hist)?;
    Ok(MixingReport { ks, first: a, second: b })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::validation::reference_fixture;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn parabola_occupation_matches_dense_sampling() {
        let (y0, v0, g, t) = (0.3, 2.0, 1.5, 3.1);
        let mut exact = Histogram::new(0.0, 1.5, 30);
        exact.add_parabola(y0, v0, g, t);
        let mut dense = Histogram::new(0.0, 1.5, 30);
        let steps = 2_000_000;
        let dt = t / steps as f64;
        for k in 0..steps {
            let s = (k as f64 + 0.5) * dt;
            dense.add(y0 + v0 * s - 0.5 * g * s * s, dt);
        }
        assert!((exact.total() - t).abs() < 1e-12);
        for (a, b) in exact.weights.iter().zip(&dense.weights) {
            assert!((a - b).abs() < 1e-5, "{a} {b}");
        }
        assert!((exact.below - dense.below).abs() < 1e-5);
        assert!((exact.above - dense.above).abs() < 1e-5);
    }

    #[test]
    fn segment_moments_match_quadrature() {
        let cfg = SummaryConfig { t_start: 0.5, bins: 10, y_max: 3.0, batch_size: 10 };
        let mut s = EmpiricalSummary::new(cfg);
        let seg = BallSegment { t0: 0.0, t1: 2.0, y0: 1.0, vy0: 1.2, resting: false };
        s.add_ball_segment(&seg, 1.0);
        let (mut m1, mut m2) = (0.0, 0.0);
        let steps = 100_000;
        let dt = 1.5 / steps as f64;
        for k in 0..steps {
            let y = seg.height_at(0.5 + (k as f64 + 0.5) * dt, 1.0);
            m1 += y * dt;
            m2 += y * y * dt;
        }
        assert!((s.ball_time - 1.5).abs() < 1e-14);
        assert!((s.ball_y_integral - m1).abs() < 1e-8);
        assert!((s.ball_y2_integral - m2).abs() < 1e-8);
    }

    #[test]
    fn marginal_cdf_integrates_density() {
        let p = reference_fixture(10);
        let m = PredictedMarginal::new(0.7, 0.9, &p).unwrap();
        let mut acc = 0.0;
        let h = 1e-4;
        let mut y = 0.0;
        while y < 2.0 {
            acc += 0.5 * h * (m.density(y) + m.density(y + h));
            y += h;
            if (y * 10.0).fract() < h * 10.0 {
                assert!((acc - m.cdf(y)).abs() < 1e-6, "{y}: {acc} vs {}", m.cdf(y));
            }
        }
        assert!((m.cdf(200.0) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn ks_of_exact_uniform_sample_is_small() {
        let s: Vec<f64> = (0..1000).map(|k| (k as f64 + 0.5) / 1000.0).collect();
        let d = ks_distance(&s, |x| x.clamp(0.0, 1.0)).unwrap();
        assert!((d - 0.0005).abs() < 1e-12);
        assert!(matches!(ks_distance(&s[..10], |x| x), Err(Error::InsufficientData { .. })));
    }

    #[test]
    fn chi_square_accepts_uniform_and_rejects_clumped() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for dim in [2, 3] {
            let mut pts = Vec::new();
            while pts.len() < 4000 {
                let x: Vec<f64> = (0..dim - 1).map(|_| rng.random_range(-1.0..1.0)).collect();
                if x.iter().map(|c| c * c).sum::<f64>() < 1.0 {
                    pts.push(x);
                }
            }
            let (_, p) = uniformity_chi_square(&pts, dim, 1.0).unwrap();
            assert!(p > 0.001, "dim {dim}: p = {p}");
            let clumped: Vec<Vec<f64>> = pts.iter().map(|x| x.iter().map(|c| c * 0.5).collect()).collect();
            let (_, p) = uniformity_chi_square(&clumped, dim, 1.0).unwrap();
            assert!(p < 1e-6);
        }
    }

    #[test]
    fn merge_equals_concatenation() {
        let cfg = SummaryConfig { t_start: 0.0, bins: 8, y_max: 2.0, batch_size: 5 };
        let p = reference_fixture(3);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let states: Vec<SystemState> = (0..40)
            .map(|k| {
                let mut s = SystemState::zeros(2, 3);
                s.time = k as f64;
                for v in s.heights.iter_mut() {
                    *v = rng.random_range(0.0..2.5);
                }
                for v in s.velocities.iter_mut() {
                    *v = rng.random_range(-1.0..1.0);
                }
                s
            })
            .collect();
        let mut whole = EmpiricalSummary::new(cfg);
        let mut a = EmpiricalSummary::new(cfg);
        let mut b = EmpiricalSummary::new(cfg);
        for (k, s) in states.iter().enumerate() {
            whole.add_state(s, &p);
            if k < 20 { a.add_state(s, &p) } else { b.add_state(s, &p) }
        }
        a.merge(&b).unwrap();
        assert_eq!(a.gas_hist, whole.gas_hist);
        assert_eq!(a.snapshots, whole.snapshots);
        assert!((a.particle_ke.mean() - whole.particle_ke.mean()).abs() < 1e-12);
        assert_eq!(a.particle_ke.batches.len(), whole.particle_ke.batches.len());
        let other = EmpiricalSummary::new(SummaryConfig { bins: 9, ..cfg });
        assert!(a.merge(&other).is_err());
    }
}
