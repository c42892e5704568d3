//! Excluded-volume exponential integrals and the gas-law quantities built on them.
//!
//! For a rate `gamma > 0` and a ball centred at height `y >= R`,
//!
//! ```text
//! H_k(gamma, y) = integral over D \ B of gamma r^k exp(-gamma r) dx dr
//! ```
//!
//! `q = H_0` is the weight of the exponential column left outside the ball,
//! `u = H_1 / H_0` the mean gas height and `w = H_2` the raw second moment.
//! The ball part is integrated after the substitution `s = R sin(phi)`, which
//! turns the `(R^2 - s^2)^((d-1)/2)` endpoint factor into a smooth `cos^d`.

use crate::error::{Error, Result};
use crate::geometry::{unit_ball_volume, ModelParams};
use crate::quadrature::integrate_doubling;
use crate::roots::newton_bracketed;
use std::f64::consts::PI;

const QUAD_TOL: f64 = 1e-13;

fn check_args(gamma: f64, y: f64, params: &ModelParams) -> Result<()> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::InvalidParam(format!("rate must be positive, got {gamma}")));
    }
    if params.ball_radius > 0.0 && !(y >= params.ball_radius) {
        return Err(Error::InvalidParam(format!(
            "ball height {y} below its radius {}",
            params.ball_radius
        )));
    }
    Ok(())
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// `H_0 .. H_{K-1}` from a single quadrature pass.
fn excluded_moments<const K: usize>(gamma: f64, y: f64, params: &ModelParams) -> Result<[f64; K]> {
    check_args(gamma, y, params)?;
    let area = params.base_area();
    let mut full = [0.0; K];
    for (k, v) in full.iter_mut().enumerate() {
        *v = area * factorial(k) / gamma.powi(k as i32);
    }
    let r = params.ball_radius;
    if r == 0.0 {
        return Ok(full);
    }
    let d = params.dim as i32;
    // (d-1)-volume of the unit cross-section times the R^d Jacobian
    let c = unit_ball_volume(params.dim - 1) * r.powi(d);
    let (ball, ok) = integrate_doubling::<K, _>(-PI / 2.0, PI / 2.0, full, QUAD_TOL, |phi| {
        let (s, co) = phi.sin_cos();
        let height = (y + r * s).max(0.0);
        let base = c * gamma * (-gamma * height).exp() * co.max(0.0).powi(d);
        let mut out = [0.0; K];
        let mut pow = 1.0;
        for v in out.iter_mut() {
            *v = base * pow;
            pow *= height;
        }
        out
    });
    if !ok {
        return Err(Error::NoConvergence(format!(
            "quadrature for gamma = {gamma}, y = {y}"
        )));
    }
    let mut out = [0.0; K];
    for k in 0..K {
        out[k] = full[k] - ball[k];
    }
    Ok(out)
}

/// `H_order(gamma, y)`.
pub fn h_n(order: usize, gamma: f64, y: f64, params: &ModelParams) -> Result<f64> {
    check_args(gamma, y, params)?;
    let area = params.base_area();
    let full = area * factorial(order) / gamma.powi(order as i32);
    let r = params.ball_radius;
    if r == 0.0 {
        return Ok(full);
    }
    let d = params.dim as i32;
    let c = unit_ball_volume(params.dim - 1) * r.powi(d);
    let (ball, ok) = integrate_doubling::<1, _>(-PI / 2.0, PI / 2.0, [full], QUAD_TOL, |phi| {
        let (s, co) = phi.sin_cos();
        let height = (y + r * s).max(0.0);
        [c * gamma * height.powi(order as i32) * (-gamma * height).exp() * co.max(0.0).powi(d)]
    });
    if !ok {
        return Err(Error::NoConvergence(format!(
            "quadrature for gamma = {gamma}, y = {y}"
        )));
    }
    Ok(full - ball[0])
}

/// Gas-law state at rate `lambda` with the ball centred at height `y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GasLawPoint {
    pub lambda: f64,
    pub y: f64,
    /// `H_0`
    pub q: f64,
    /// `H_1 / H_0`
    pub u: f64,
    /// `H_2`
    pub w: f64,
    /// `w / q - u^2`, the variance of a gas height under the limit measure.
    pub sigma2: f64,
}

/// The four two-sided bounds every [`GasLawPoint`] satisfies, evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    pub q_ratio: f64,
    pub lambda_u: f64,
    pub lambda2_sigma2: f64,
    pub u2_over_sigma2: f64,
}

impl BoundReport {
    fn one_minus_exp_half() -> f64 {
        1.0 - (-0.5f64).exp()
    }

    pub fn q_ratio_bounds() -> (f64, f64) {
        (Self::one_minus_exp_half() / 8.0, 1.0)
    }

    pub fn lambda_u_bounds() -> (f64, f64) {
        (1.0 / 200.0, 8.0 / Self::one_minus_exp_half())
    }

    pub fn lambda2_sigma2_bounds() -> (f64, f64) {
        (2f64.powi(-12) * (-1.0f64).exp(), 16.0 / Self::one_minus_exp_half())
    }

    pub fn u2_over_sigma2_bounds() -> (f64, f64) {
        let c = Self::one_minus_exp_half();
        (c / 16.0 / (200.0 * 200.0), 2f64.powi(18) * 1f64.exp() / (c * c))
    }

    /// Names of the violated bounds (empty when everything holds).
    pub fn violations(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        let within = |v: f64, (lo, hi): (f64, f64)| v >= lo && v <= hi;
        if !within(self.q_ratio, Self::q_ratio_bounds()) {
            out.push("q/|D_b|");
        }
        if !within(self.lambda_u, Self::lambda_u_bounds()) {
            out.push("lambda*u");
        }
        if !within(self.lambda2_sigma2, Self::lambda2_sigma2_bounds()) || !(self.lambda2_sigma2 > 0.0) {
            out.push("lambda^2*sigma^2");
        }
        let (lo, hi) = Self::u2_over_sigma2_bounds();
        if !(self.u2_over_sigma2 >= lo && self.u2_over_sigma2 <= hi && lo > 2f64.powi(-21) && hi < 2f64.powi(23)) {
            out.push("u^2/sigma^2");
        }
        out
    }

    pub fn all_hold(&self) -> bool {
        self.violations().is_empty()
    }
}

impl GasLawPoint {
    pub fn bounds(&self, base_area: f64) -> BoundReport {
        BoundReport {
            q_ratio: self.q / base_area,
            lambda_u: self.lambda * self.u,
            lambda2_sigma2: self.lambda * self.lambda * self.sigma2,
            u2_over_sigma2: self.u * self.u / self.sigma2,
        }
    }

    /// `q e^{lambda u} / lambda` in log form.
    pub fn ln_pel(&self) -> f64 {
        self.q.ln() + self.lambda * self.u - self.lambda.ln()
    }
}

pub fn gas_law_point(gamma: f64, y: f64, params: &ModelParams) -> Result<GasLawPoint> {
    let [h0, h1, h2] = excluded_moments::<3>(gamma, y, params)?;
    let u = h1 / h0;
    Ok(GasLawPoint {
        lambda: gamma,
        y,
        q: h0,
        u,
        w: h2,
        sigma2: h2 / h0 - u * u,
    })
}

/// The unique rate whose mean gas height is `u` with the ball at `y`.
pub fn lambda_of_u(u: f64, y: f64, params: &ModelParams) -> Result<f64> {
    if !(u > 0.0) || !u.is_finite() {
        return Err(Error::InvalidParam(format!("mean height must be positive, got {u}")));
    }
    check_args(1.0, y, params)?;
    if params.ball_radius == 0.0 {
        return Ok(1.0 / u);
    }
    // lambda * u lies in [1/200, 21] for every admissible configuration
    let lo = 1.0 / (200.0 * u);
    let hi = 21.0 / u;
    newton_bracketed(
        |lam| {
            let p = gas_law_point(lam, y, params)?;
            Ok((p.u - u, -p.sigma2))
        },
        lo,
        hi,
        1e-3,
        1e-14,
    )
    .map_err(|e| match e {
        Error::NoConvergence(m) => Error::NoConvergence(format!("lambda_of_u: {m}")),
        other => other,
    })
}

/// Partial derivatives of `lambda(u, y)` and `q(u, y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Partials {
    pub dlambda_du: f64,
    pub dlambda_dy: f64,
    pub dq_du: f64,
    pub dq_dy: f64,
}

pub fn analytic_partials(u: f64, y: f64, params: &ModelParams) -> Result<Partials> {
    let lambda = lambda_of_u(u, y, params)?;
    let p = gas_law_point(lambda, y, params)?;
    let area = params.base_area();
    let denom = p.q * u * u - p.w;
    if denom.abs() < 1e-14 * p.q * u * u {
        return Err(Error::DegenerateVariance(denom.abs()));
    }
    let dlambda_du = p.q / denom;
    let dlambda_dy = (lambda * u * area - p.q) / denom;
    let shape = p.q / lambda * (1.0 - lambda * u);
    Ok(Partials {
        dlambda_du,
        dlambda_dy,
        dq_du: shape * dlambda_du,
        dq_dy: shape * dlambda_dy + lambda * (area - p.q),
    })
}

/// Relative residual of `d/du (q e^{lambda u} / lambda) = q e^{lambda u}`,
/// with the left side taken by central differences.
pub fn pel_identity_check(u: f64, y: f64, params: &ModelParams) -> Result<f64> {
    let h = 1e-6 * u;
    let ln_pel = |uu: f64| -> Result<f64> {
        let lam = lambda_of_u(uu, y, params)?;
        Ok(gas_law_point(lam, y, params)?.ln_pel())
    };
    let lam = lambda_of_u(u, y, params)?;
    let p = gas_law_point(lam, y, params)?;
    let ln_rhs = p.q.ln() + lam * u;
    // compare after dividing out the (possibly huge) common factor e^{lambda u}
    let plus = (ln_pel(u + h)? - ln_rhs).exp();
    let minus = (ln_pel(u - h)? - ln_rhs).exp();
    let fd = (plus - minus) / (2.0 * h);
    Ok((fd - 1.0).abs())
}

/// A positive or negative number stored as `sign * exp(ln_abs)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogValue {
    pub ln_abs: f64,
    pub sign: f64,
}

impl LogValue {
    pub fn value(&self) -> f64 {
        self.sign * self.ln_abs.exp()
    }
}

/// Leading-order volume of the particle configurations with mean height `u`
/// around a fixed ball at height `y`:
/// `(q e^{lambda u} / lambda)^n n^{1-n} sigma^{-1} / sqrt(2 pi)`.
pub fn phase_volume_estimate(n_particles: usize, y: f64, u: f64, params: &ModelParams) -> Result<LogValue> {
    if n_particles < 2 {
        return Err(Error::InvalidParam("phase volume needs n >= 2".into()));
    }
    let lambda = lambda_of_u(u, y, params)?;
    let p = gas_law_point(lambda, y, params)?;
    let n = n_particles as f64;
    let ln_abs = n * p.ln_pel() + (1.0 - n) * n.ln() - 0.5 * p.sigma2.ln() - 0.5 * (2.0 * PI).ln();
    Ok(LogValue { ln_abs, sign: 1.0 })
}
