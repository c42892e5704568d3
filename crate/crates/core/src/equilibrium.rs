//! Equilibrium of the gas-and-ball system in the many-particle limit.
//!
//! With `z(y) = (E - M g y) / (m g)` the two balance equations are
//!
//! ```text
//! K(lambda, y) = m (|D_b| - q) / q = M             (buoyancy)
//! G(lambda, y) = d m g / (2 lambda) + m g u + M g y = E   (energy)
//! ```
//!
//! For fixed `y` the energy equation has exactly one root `lambda_y`
//! because both `lambda`-dependent terms decrease strictly. The floating
//! height `y_A` is then the unique zero of `F(y) = K(lambda_y, y) - M`.

use crate::analytics::{gas_law_point, lambda_of_u, GasLawPoint};
use crate::error::{Error, Result};
use crate::geometry::ModelParams;
use crate::roots::{bisect, newton_bracketed};

/// `(E - M g y) / (m g)`: the gas share of the energy, in height units.
pub fn z_of_y(y: f64, params: &ModelParams) -> Result<f64> {
    let z = (params.energy - params.ball_mass * params.gravity * y) / (params.gas_mass * params.gravity);
    if !(z > 0.0) {
        return Err(Error::OutOfRange(format!(
            "ball height {y} leaves no energy for the gas"
        )));
    }
    Ok(z)
}

/// `K(lambda, y)`, the mass of gas displaced by the ball.
pub fn buoyancy(point: &GasLawPoint, params: &ModelParams) -> f64 {
    params.gas_mass * (params.base_area() - point.q) / point.q
}

/// `G(lambda, y)`, the total energy predicted by the limiting gas law.
pub fn energy_balance(point: &GasLawPoint, params: &ModelParams) -> f64 {
    let d = params.dim as f64;
    let mg = params.gas_mass * params.gravity;
    d * mg / (2.0 * point.lambda) + mg * point.u + params.ball_mass * params.gravity * point.y
}

/// The unique rate `lambda_y` with `G(lambda_y, y) = E`.
pub fn solve_lambda_given_y(y: f64, params: &ModelParams) -> Result<f64> {
    let z = z_of_y(y, params)?;
    let half_d = params.dim as f64 / 2.0;
    if params.ball_radius == 0.0 {
        return Ok((half_d + 1.0) / z);
    }
    // lambda u in [1/200, 21] brackets d/(2 lambda) + u = z
    let lo = (half_d + 1.0 / 200.0) / z;
    let hi = (half_d + 21.0) / z;
    newton_bracketed(
        |lam| {
            let p = gas_law_point(lam, y, params)?;
            Ok((half_d / lam + p.u - z, -half_d / (lam * lam) - p.sigma2))
        },
        lo,
        hi,
        1e-3,
        1e-15,
    )
}

/// Rate that balances the energy with the ball resting on the bottom.
pub fn lambda_star(params: &ModelParams) -> Result<f64> {
    solve_lambda_given_y(params.ball_radius, params)
}

/// Whether the ball is lighter than the gas it displaces at rest on the
/// bottom, i.e. `K(lambda_*, R) > M`.
pub fn floating_condition(params: &ModelParams) -> Result<bool> {
    let lam = lambda_star(params)?;
    let p = gas_law_point(lam, params.ball_radius, params)?;
    Ok(buoyancy(&p, params) > params.ball_mass)
}

/// Solution of the balance equations, or the resting configuration when
/// the ball cannot float.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquilibriumSolution {
    pub y_a: f64,
    pub lambda_a: f64,
    pub u_a: f64,
    pub lambda_star: f64,
    /// `K(lambda_A, y_A) / M - 1`; zero for gas-only systems.
    pub residual_k: f64,
    /// `G(lambda_A, y_A) / E - 1`.
    pub residual_g: f64,
    pub floating: bool,
}

impl EquilibriumSolution {
    /// Mean kinetic energy per particle in the limit, `d m g / (2 lambda_A)`.
    pub fn kinetic_energy_per_particle(&self, params: &ModelParams) -> f64 {
        params.dim as f64 * params.gas_mass * params.gravity / (2.0 * self.lambda_a)
    }
}

fn solution_at(y: f64, lambda: f64, lambda_star: f64, floating: bool, params: &ModelParams) -> Result<EquilibriumSolution> {
    let p = gas_law_point(lambda, y, params)?;
    let residual_k = if params.ball_mass > 0.0 {
        buoyancy(&p, params) / params.ball_mass - 1.0
    } else {
        0.0
    };
    Ok(EquilibriumSolution {
        y_a: y,
        lambda_a: lambda,
        u_a: p.u,
        lambda_star,
        residual_k,
        residual_g: energy_balance(&p, params) / params.energy - 1.0,
        floating,
    })
}

/// `F(y) = K(lambda_y, y) - M`.
pub fn buoyancy_excess(y: f64, params: &ModelParams) -> Result<f64> {
    let lam = solve_lambda_given_y(y, params)?;
    let p = gas_law_point(lam, y, params)?;
    Ok(buoyancy(&p, params) - params.ball_mass)
}

/// Floating height and rate of a floating ball.
///
/// Fails with [`Error::NotFloating`] when the ball is too heavy; use
/// [`equilibrium`] to get the resting configuration instead.
pub fn solve_archimedes(params: &ModelParams) -> Result<EquilibriumSolution> {
    params.require_ball()?;
    let lam_star = lambda_star(params)?;
    let r = params.ball_radius;
    let top = params.max_ball_height();
    let p_star = gas_law_point(lam_star, r, params)?;
    if buoyancy(&p_star, params) <= params.ball_mass {
        return Err(Error::NotFloating { lambda_star: lam_star });
    }
    let span = top - r;
    // F -> -M at the top; stop just short of it where z is still positive
    let hi = r + span * (1.0 - 1e-9);
    let (a, b) = bisect(|y| buoyancy_excess(y, params), r, hi, 1e-12 * span)?;
    let y = 0.5 * (a + b);
    let lam = solve_lambda_given_y(y, params)?;
    let sol = solution_at(y, lam, lam_star, true, params)?;
    if sol.residual_k.abs() <= 1e-11 {
        return Ok(sol);
    }
    // very light balls have a long search interval; keep halving to
    // machine resolution
    let (a, b) = bisect(|y| buoyancy_excess(y, params), a, b, 0.0)?;
    let y = 0.5 * (a + b);
    let lam = solve_lambda_given_y(y, params)?;
    solution_at(y, lam, lam_star, true, params)
}

/// Equilibrium for any valid parameters: the floating solution if it
/// exists, otherwise the ball resting at `y = R` with `lambda_*`. Gas-only
/// systems (`R = 0`) report `y_A = 0` and the closed-form rate.
pub fn equilibrium(params: &ModelParams) -> Result<EquilibriumSolution> {
    params.validate()?;
    if params.ball_radius == 0.0 {
        let lam = lambda_star(params)?;
        return solution_at(0.0, lam, lam, false, params);
    }
    if params.ball_mass == 0.0 {
        return Err(Error::InvalidParam("a massless ball has no floating height".into()));
    }
    match solve_archimedes(params) {
        Err(Error::NotFloating { lambda_star }) => {
            solution_at(params.ball_radius, lambda_star, lambda_star, false, params)
        }
        other => other,
    }
}

fn check_height(y: f64, params: &ModelParams) -> Result<()> {
    if y < params.ball_radius || y >= params.max_ball_height() {
        return Err(Error::OutOfRange(format!(
            "ball height {y} outside [{}, {})",
            params.ball_radius,
            params.max_ball_height()
        )));
    }
    Ok(())
}

/// `kappa_y(u) = u + d / (2 lambda(u, y)) - z(y)`, increasing in `u`.
pub fn kappa(u: f64, y: f64, params: &ModelParams) -> Result<f64> {
    let lam = lambda_of_u(u, y, params)?;
    Ok(u + params.dim as f64 / (2.0 * lam) - z_of_y(y, params)?)
}

/// `beta_y(u) = lambda(u, y) - d / (2 (z(y) - u))` for `0 < u < z(y)`.
pub fn beta(u: f64, y: f64, params: &ModelParams) -> Result<f64> {
    let z = z_of_y(y, params)?;
    if !(u < z) {
        return Err(Error::OutOfRange(format!("mean height {u} not below z = {z}")));
    }
    Ok(lambda_of_u(u, y, params)? - params.dim as f64 / (2.0 * (z - u)))
}

/// Mean gas height `u_0(y)` that maximises the phase volume with the ball
/// held at `y`; the zero of [`kappa`] (equivalently of [`beta`]).
pub fn u0_of_y(y: f64, params: &ModelParams) -> Result<f64> {
    check_height(y, params)?;
    let lam = solve_lambda_given_y(y, params)?;
    Ok(gas_law_point(lam, y, params)?.u)
}

/// `ln psi(y)` in both algebraic forms:
/// `q0 e^{l0 u0} / l0^{d/2+1}` and `(2/d)^{d/2} (z-u0)^{d/2} q0 e^{l0 u0} / l0`.
pub fn ln_psi_both(y: f64, params: &ModelParams) -> Result<(f64, f64)> {
    check_height(y, params)?;
    let lam = solve_lambda_given_y(y, params)?;
    let p = gas_law_point(lam, y, params)?;
    let half_d = params.dim as f64 / 2.0;
    let z = z_of_y(y, params)?;
    let core = p.q.ln() + lam * p.u;
    let first = core - (half_d + 1.0) * lam.ln();
    let second = half_d * (1.0 / half_d).ln() + half_d * (z - p.u).ln() + core - lam.ln();
    Ok((first, second))
}

/// `ln psi(y)`.
pub fn ln_psi(y: f64, params: &ModelParams) -> Result<f64> {
    ln_psi_both(y, params).map(|v| v.0)
}

/// Location of the maximum of `psi` on `[R, E/(Mg))`, found without using
/// the balance equations: golden-section search followed by bisection on
/// the sign of a central-difference derivative.
pub fn psi_argmax(params: &ModelParams) -> Result<f64> {
    params.require_ball()?;
    let r = params.ball_radius;
    let span = params.max_ball_height() - r;
    let top = r + span * (1.0 - 1e-6);
    let f = |y: f64| ln_psi(y, params);
    // coarse scan guards against golden section locking onto an endpoint
    let k = 64;
    let mut best = (0usize, f64::NEG_INFINITY);
    for i in 0..=k {
        let y = r + (top - r) * i as f64 / k as f64;
        let v = f(y)?;
        if v > best.1 {
            best = (i, v);
        }
    }
    let step = (top - r) / k as f64;
    let mut a = (r + step * (best.0 as f64 - 1.0)).max(r);
    let mut b = (r + step * (best.0 as f64 + 1.0)).min(top);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while b - a > 1e-4 * span {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    let h = 1e-6 * span;
    let slope = |y: f64| -> Result<f64> {
        let lo = (y - h).max(r);
        let hi = (y + h).min(top);
        Ok((f(hi)? - f(lo)?) / (hi - lo))
    };
    let (lo, hi) = (a.max(r), b.min(top));
    let (s_lo, s_hi) = (slope(lo)?, slope(hi)?);
    if s_lo <= 0.0 && s_hi <= 0.0 {
        return Ok(lo);
    }
    if s_lo >= 0.0 && s_hi >= 0.0 {
        return Ok(hi);
    }
    let (x0, x1) = bisect(slope, lo, hi, 1e-9 * span)?;
    Ok(0.5 * (x0 + x1))
}

/// Limiting density of the ball height for `n` particles,
/// proportional to `psi^{n-1}(y) z^d(y)` on `[R, E/(Mg))`.
#[derive(Debug, Clone, PartialEq)]
pub struct HeightProfile {
    pub n_particles: usize,
    pub y: Vec<f64>,
    /// `ln psi` at each grid point (`-inf` at `E/(Mg)`).
    pub ln_psi: Vec<f64>,
    pub density: Vec<f64>,
    cdf: Vec<f64>,
}

const DEFAULT_GRID: usize = 4096;

fn ln_unnormalized(n: usize, y: f64, params: &ModelParams) -> Result<(f64, f64)> {
    if y >= params.max_ball_height() {
        return Ok((f64::NEG_INFINITY, f64::NEG_INFINITY));
    }
    let lp = ln_psi(y, params)?;
    let z = z_of_y(y, params)?;
    Ok((lp, (n as f64 - 1.0) * lp + params.dim as f64 * z.ln()))
}

fn trapezoid(y: &[f64], f: &[f64]) -> f64 {
    y.windows(2)
        .zip(f.windows(2))
        .map(|(yy, ff)| 0.5 * (yy[1] - yy[0]) * (ff[0] + ff[1]))
        .sum()
}

/// The default grid: `points` uniform nodes where the density is within
/// `e^{-50}` of its peak, plus a sparse uniform cover of the remaining tails.
pub fn default_height_grid(n_particles: usize, params: &ModelParams) -> Result<Vec<f64>> {
    height_grid(n_particles, DEFAULT_GRID, params)
}

fn height_grid(n_particles: usize, points: usize, params: &ModelParams) -> Result<Vec<f64>> {
    params.require_ball()?;
    let r = params.ball_radius;
    let top = params.max_ball_height();
    let g = |y: f64| ln_unnormalized(n_particles, y, params).map(|v| v.1);
    let scan = 512;
    let mut best = (r, f64::NEG_INFINITY);
    for i in 0..scan {
        let y = r + (top - r) * i as f64 / scan as f64;
        let v = g(y)?;
        if v > best.1 {
            best = (y, v);
        }
    }
    let coarse = (top - r) / scan as f64;
    let (mut a, mut b) = ((best.0 - coarse).max(r), (best.0 + coarse).min(top));
    for _ in 0..60 {
        let m1 = a + (b - a) / 3.0;
        let m2 = b - (b - a) / 3.0;
        if g(m1)? > g(m2)? {
            b = m2;
        } else {
            a = m1;
        }
    }
    let peak_y = 0.5 * (a + b);
    let peak = g(peak_y)?.max(best.1);
    let cut = peak - 50.0;
    let lo = if g(r)? >= cut {
        r
    } else {
        bisect(|y| Ok(g(y)? - cut), r, peak_y, 1e-12 * (top - r))?.0
    };
    let edge = r + (top - r) * (1.0 - 1e-12);
    let hi = if g(edge)? >= cut {
        top
    } else {
        bisect(|y| Ok(g(y)? - cut), peak_y, edge, 1e-12 * (top - r))?.1
    };
    let uniform = |a: f64, b: f64, k: usize| (0..k).map(move |i| a + (b - a) * i as f64 / (k - 1) as f64);
    let tail = 64;
    let mut grid: Vec<f64> = uniform(lo, hi, points).collect();
    if lo > r {
        grid.extend(uniform(r, lo, tail));
    }
    if hi < top {
        grid.extend(uniform(hi, top, tail));
    }
    grid.sort_by(|x, y| x.total_cmp(y));
    grid.dedup_by(|x, y| (*x - *y).abs() <= 1e-14 * (top - r));
    Ok(grid)
}

/// Normalised limiting ball-height density on `y_grid` (sorted, inside
/// `[R, E/(Mg)]`). Fails with [`Error::GridTooCoarse`] if inserting
/// midpoints changes the normalisation by more than `1e-6`.
pub fn ball_height_density(n_particles: usize, y_grid: &[f64], params: &ModelParams) -> Result<HeightProfile> {
    params.require_ball()?;
    if n_particles < 1 || y_grid.len() < 2 {
        return Err(Error::InvalidParam("need n >= 1 and at least two grid points".into()));
    }
    let top = params.max_ball_height();
    if y_grid.windows(2).any(|w| !(w[1] > w[0])) || y_grid[0] < params.ball_radius || y_grid[y_grid.len() - 1] > top {
        return Err(Error::InvalidParam("grid must be increasing inside [R, E/(Mg)]".into()));
    }
    let mut ln_psi_v = Vec::with_capacity(y_grid.len());
    let mut ln_f = Vec::with_capacity(y_grid.len());
    for &y in y_grid {
        let (lp, lf) = ln_unnormalized(n_particles, y, params)?;
        ln_psi_v.push(lp);
        ln_f.push(lf);
    }
    let mut shift = ln_f.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    // refined grid with midpoints, sharing the shift
    let mut fine_y = Vec::with_capacity(2 * y_grid.len());
    let mut fine_ln = Vec::with_capacity(2 * y_grid.len());
    for i in 0..y_grid.len() {
        fine_y.push(y_grid[i]);
        fine_ln.push(ln_f[i]);
        if i + 1 < y_grid.len() {
            let mid = 0.5 * (y_grid[i] + y_grid[i + 1]);
            let v = ln_unnormalized(n_particles, mid, params)?.1;
            fine_y.push(mid);
            fine_ln.push(v);
        }
    }
    shift = fine_ln.iter().copied().fold(shift, f64::max);
    let dens: Vec<f64> = ln_f.iter().map(|v| (v - shift).exp()).collect();
    let fine: Vec<f64> = fine_ln.iter().map(|v| (v - shift).exp()).collect();
    let norm = trapezoid(y_grid, &dens);
    let norm_fine = trapezoid(&fine_y, &fine);
    let change = (norm - norm_fine).abs() / norm_fine;
    if !(change <= 1e-6) {
        return Err(Error::GridTooCoarse(change));
    }
    let density: Vec<f64> = dens.iter().map(|v| v / norm).collect();
    let mut cdf = Vec::with_capacity(density.len());
    let mut acc = 0.0;
    cdf.push(0.0);
    for i in 1..density.len() {
        acc += 0.5 * (y_grid[i] - y_grid[i - 1]) * (density[i] + density[i - 1]);
        cdf.push(acc);
    }
    Ok(HeightProfile {
        n_particles,
        y: y_grid.to_vec(),
        ln_psi: ln_psi_v,
        density,
        cdf,
    })
}

impl HeightProfile {
    /// Profile on [`default_height_grid`], doubling the node count up to
    /// four times if the normalisation check fails.
    pub fn new(n_particles: usize, params: &ModelParams) -> Result<Self> {
        let mut points = DEFAULT_GRID;
        loop {
            let grid = height_grid(n_particles, points, params)?;
            match ball_height_density(n_particles, &grid, params) {
                Err(Error::GridTooCoarse(_)) if points < 16 * DEFAULT_GRID => points *= 2,
                other => return other,
            }
        }
    }

    /// Trapezoidal integral of the density.
    pub fn total_mass(&self) -> f64 {
        trapezoid(&self.y, &self.density)
    }

    /// Cumulative distribution, linear between grid points.
    pub fn cdf(&self, y: f64) -> f64 {
        let n = self.y.len();
        if y <= self.y[0] {
            return 0.0;
        }
        if y >= self.y[n - 1] {
            return 1.0;
        }
        let i = self.y.partition_point(|&v| v <= y) - 1;
        // exact integral of the linear interpolant of the density
        let dy = y - self.y[i];
        let slope = (self.density[i + 1] - self.density[i]) / (self.y[i + 1] - self.y[i]);
        let c = self.cdf[i] + dy * (self.density[i] + 0.5 * slope * dy);
        (c / self.cdf[n - 1]).clamp(0.0, 1.0)
    }

    /// Mean of the density.
    pub fn mean(&self) -> f64 {
        let f: Vec<f64> = self.y.iter().zip(&self.density).map(|(y, p)| y * p).collect();
        trapezoid(&self.y, &f) / self.total_mass()
    }

    /// Grid point with the largest `psi`.
    pub fn psi_grid_argmax(&self) -> f64 {
        let mut best = 0;
        for i in 0..self.y.len() {
            if self.ln_psi[i] > self.ln_psi[best] {
                best = i;
            }
        }
        self.y[best]
    }

    /// Probability mass farther than `eps` from `center`.
    pub fn mass_outside(&self, center: f64, eps: f64) -> f64 {
        let inside = self.cdf(center + eps) - self.cdf(center - eps);
        (1.0 - inside).max(0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn fixture() -> ModelParams {
        ModelParams::new(2, 1.0, 0.3, 1.0, 0.05, 1.0, 3.0, 100).unwrap()
    }

    #[test]
    fn z_examples() {
        let p = ModelParams::new(2, 1.0, 0.3, 1.0, 1.0, 1.0, 1.0, 1).unwrap();
        assert_relative_eq!(z_of_y(0.5, &p).unwrap(), 0.5);
        let eps = 1e-3;
        assert_relative_eq!(z_of_y(1.0 - eps, &p).unwrap(), eps, max_relative = 1e-9);
        assert!(z_of_y(1.0, &p).is_err());
    }

    #[test]
    fn no_ball_rate_closed_form() {
        for d in [2, 3, 5] {
            let p = ModelParams::new(d, 1.0, 0.0, 1.3, 0.0, 0.7, 2.2, 1).unwrap();
            let want = (d as f64 + 2.0) * 1.3 * 0.7 / (2.0 * 2.2);
            assert_relative_eq!(lambda_star(&p).unwrap(), want, max_relative = 1e-14);
        }
        let p = ModelParams::new(2, 1.0, 0.0, 1.0, 0.0, 1.0, 1.0, 1).unwrap();
        assert_relative_eq!(equilibrium(&p).unwrap().lambda_a, 2.0);
    }

    #[test]
    fn lambda_given_y_balances_energy() {
        let p = fixture();
        for y in [0.3, 0.8, 5.0, 40.0] {
            let lam = solve_lambda_given_y(y, &p).unwrap();
            let pt = gas_law_point(lam, y, &p).unwrap();
            assert!((energy_balance(&pt, &p) / p.energy - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn fixture_floats_with_small_residuals() {
        let p = fixture();
        assert!(floating_condition(&p).unwrap());
        let s = solve_archimedes(&p).unwrap();
        assert!(s.floating);
        assert!(s.residual_k.abs() < 1e-9 && s.residual_g.abs() < 1e-9);
        assert!(s.y_a > p.ball_radius && s.y_a < p.max_ball_height());
    }

    #[test]
    fn heavy_ball_rests() {
        let p = ModelParams::new(2, 1.0, 0.3, 1.0, 50.0, 1.0, 30.0, 10).unwrap();
        assert!(!floating_condition(&p).unwrap());
        assert!(matches!(solve_archimedes(&p), Err(Error::NotFloating { .. })));
        let s = equilibrium(&p).unwrap();
        assert!(!s.floating);
        assert_eq!(s.y_a, 0.3);
        assert_eq!(s.lambda_a, s.lambda_star);
    }

    #[test]
    fn u0_closed_form_without_ball() {
        let p = ModelParams::new(3, 1.0, 0.0, 1.0, 0.5, 1.0, 4.0, 1).unwrap();
        let z = z_of_y(1.0, &p).unwrap();
        assert_relative_eq!(u0_of_y(1.0, &p).unwrap(), z / 2.5, max_relative = 1e-14);
    }

    #[test]
    fn psi_closed_form_without_ball() {
        // d = 2: psi = |D_b| e (z/2)^2
        let p = ModelParams::new(2, 1.0, 0.0, 1.0, 0.5, 1.0, 4.0, 1).unwrap();
        let z = z_of_y(2.0, &p).unwrap();
        let want = (2.0 * std::f64::consts::E * z * z / 4.0).ln();
        let (a, b) = ln_psi_both(2.0, &p).unwrap();
        assert_relative_eq!(a, want, max_relative = 1e-13);
        assert_relative_eq!(b, want, max_relative = 1e-13);
    }

    #[test]
    fn kappa_vanishes_at_u0() {
        let p = fixture();
        for y in [0.3, 1.0, 10.0] {
            let u0 = u0_of_y(y, &p).unwrap();
            let z = z_of_y(y, &p).unwrap();
            assert!(kappa(u0, y, &p).unwrap().abs() < 1e-10 * z);
            assert!(u0 <= 21.0 / 22.0 * z && u0 >= z / (1.0 + 100.0 * 2.0));
        }
    }

    #[test]
    fn profile_cdf_is_monotone_and_normalised() {
        let p = fixture();
        let prof = HeightProfile::new(100, &p).unwrap();
        assert_relative_eq!(prof.total_mass(), 1.0, max_relative = 1e-12);
        let mut last = 0.0;
        for i in 0..200 {
            let y = p.ball_radius + (6.0 - p.ball_radius) * i as f64 / 199.0;
            let c = prof.cdf(y);
            assert!(c >= last - 1e-15);
            last = c;
        }
        assert!(prof.density.iter().all(|v| *v >= 0.0));
    }
}
