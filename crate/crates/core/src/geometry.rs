//! Container, ball and admissibility predicates.
//!
//! The container is `D = D_b x [0, inf)` where the base `D_b` is a closed
//! `(d-1)`-dimensional ball of radius `base_radius` centred at the origin
//! (for `d = 2` the interval `[-base_radius, base_radius]`). Horizontal
//! coordinates are passed as slices of length `d - 1`.

use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Physical constants of one gas-and-ball system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Spatial dimension `d >= 2`.
    pub dim: usize,
    /// Radius of the round container base.
    pub base_radius: f64,
    /// Radius `R` of the macroscopic ball. Zero only in no-ball fixtures.
    pub ball_radius: f64,
    /// Total gas mass `m`; each particle carries `m / n`.
    pub gas_mass: f64,
    /// Ball mass `M`. Zero only in no-ball fixtures.
    pub ball_mass: f64,
    /// Gravitational acceleration `g`.
    pub gravity: f64,
    /// Total (kinetic plus potential) energy `E`.
    pub energy: f64,
    /// Number of gas particles `n`.
    pub n_particles: usize,
}

impl ModelParams {
    pub fn new(
        dim: usize,
        base_radius: f64,
        ball_radius: f64,
        gas_mass: f64,
        ball_mass: f64,
        gravity: f64,
        energy: f64,
        n_particles: usize,
    ) -> Result<Self> {
        let p = ModelParams {
            dim,
            base_radius,
            ball_radius,
            gas_mass,
            ball_mass,
            gravity,
            energy,
            n_particles,
        };
        p.validate()?;
        Ok(p)
    }

    /// Checks the parameter invariants.
    ///
    /// `ball_radius = 0` and `ball_mass = 0` are accepted so that the
    /// no-ball reduction can be evaluated; [`ModelParams::require_ball`]
    /// enforces the strict physical constraints.
    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.base_radius,
            self.ball_radius,
            self.gas_mass,
            self.ball_mass,
            self.gravity,
            self.energy,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidParam("parameters must be finite".into()));
        }
        if self.dim < 2 {
            return Err(Error::InvalidParam(format!("dimension {} < 2", self.dim)));
        }
        if self.n_particles < 1 {
            return Err(Error::InvalidParam("need at least one particle".into()));
        }
        if self.ball_radius < 0.0 || self.base_radius <= self.ball_radius {
            return Err(Error::InvalidParam(format!(
                "need base_radius > ball_radius >= 0 (got {} and {})",
                self.base_radius, self.ball_radius
            )));
        }
        if self.gas_mass <= 0.0 || self.gravity <= 0.0 || self.ball_mass < 0.0 {
            return Err(Error::InvalidParam(
                "need gas_mass > 0, gravity > 0, ball_mass >= 0".into(),
            ));
        }
        if self.energy <= self.ball_mass * self.gravity * self.ball_radius {
            return Err(Error::InvalidParam(format!(
                "need E > M g R (E = {}, M g R = {})",
                self.energy,
                self.ball_mass * self.gravity * self.ball_radius
            )));
        }
        Ok(())
    }

    /// Strict constraints for a system that actually contains a ball.
    pub fn require_ball(&self) -> Result<()> {
        self.validate()?;
        if self.ball_radius <= 0.0 || self.ball_mass <= 0.0 {
            return Err(Error::InvalidParam(
                "a ball with R > 0 and M > 0 is required".into(),
            ));
        }
        Ok(())
    }

    pub fn with_particles(mut self, n: usize) -> Self {
        self.n_particles = n;
        self
    }

    pub fn particle_mass(&self) -> f64 {
        self.gas_mass / self.n_particles as f64
    }

    /// `E / (M g)`, the height the ball could reach holding all the energy.
    pub fn max_ball_height(&self) -> f64 {
        if self.ball_mass > 0.0 {
            self.energy / (self.ball_mass * self.gravity)
        } else {
            f64::INFINITY
        }
    }

    pub fn base(&self) -> BaseRegion {
        BaseRegion {
            dim: self.dim,
            base_radius: self.base_radius,
            ball_radius: self.ball_radius,
        }
    }

    /// `|D_b|`
    pub fn base_area(&self) -> f64 {
        self.base().area()
    }

    /// d-volume of the ball.
    pub fn ball_volume(&self) -> f64 {
        unit_ball_volume(self.dim) * self.ball_radius.powi(self.dim as i32)
    }
}

/// Gamma function at `k / 2` for a positive integer `k`.
pub fn gamma_half(k: usize) -> f64 {
    assert!(k > 0, "gamma_half needs k >= 1");
    let (mut acc, mut x) = if k % 2 == 0 {
        (1.0, 1.0)
    } else {
        (PI.sqrt(), 0.5)
    };
    let target = k as f64 / 2.0;
    while x + 0.5 < target {
        acc *= x;
        x += 1.0;
    }
    acc
}

/// Volume of the unit ball in `R^k` (`k = 0` gives 1).
pub fn unit_ball_volume(k: usize) -> f64 {
    PI.powf(k as f64 / 2.0) / gamma_half(k + 2)
}

/// `(d-1)`-volume of a `(d-1)`-ball of radius `rho`.
pub fn cross_section_area(dim: usize, rho: f64) -> f64 {
    unit_ball_volume(dim - 1) * rho.powi(dim as i32 - 1)
}

/// The container base together with the region available to the ball centre.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaseRegion {
    pub dim: usize,
    pub base_radius: f64,
    pub ball_radius: f64,
}

impl BaseRegion {
    /// `|D_b|`
    pub fn area(&self) -> f64 {
        cross_section_area(self.dim, self.base_radius)
    }

    /// Radius of `D_b'`, the concentric ball of admissible centre positions.
    pub fn admissible_radius(&self) -> f64 {
        self.base_radius - self.ball_radius
    }

    /// `|D_b'|`
    pub fn admissible_area(&self) -> f64 {
        cross_section_area(self.dim, self.admissible_radius())
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        norm_sq(x) <= self.base_radius * self.base_radius
    }

    /// Whether `x` lies in `D_b'`.
    pub fn contains_center(&self, x: &[f64]) -> bool {
        let r = self.admissible_radius();
        norm_sq(x) <= r * r
    }
}

/// `(d-1)`-volume of the horizontal slice at height `y` through a ball of
/// radius `R` centred at height `center_y`.
pub fn ball_slice_area(center_y: f64, y: f64, params: &ModelParams) -> f64 {
    let r = params.ball_radius;
    let dy = y - center_y;
    if dy.abs() >= r {
        return 0.0;
    }
    cross_section_area(params.dim, (r * r - dy * dy).sqrt())
}

/// Whether a point particle at `(x, y)` is allowed given the ball centre.
pub fn is_admissible_particle(
    x: &[f64],
    y: f64,
    ball_x: &[f64],
    ball_y: f64,
    params: &ModelParams,
) -> bool {
    if y < 0.0 || !params.base().contains(x) {
        return false;
    }
    let r = params.ball_radius;
    distance_sq(x, y, ball_x, ball_y) >= r * r
}

pub(crate) fn norm_sq(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

pub(crate) fn distance_sq(x: &[f64], y: f64, cx: &[f64], cy: f64) -> f64 {
    let h: f64 = x.iter().zip(cx).map(|(a, b)| (a - b) * (a - b)).sum();
    h + (y - cy) * (y - cy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn fixture(dim: usize, base: f64, r: f64) -> ModelParams {
        ModelParams::new(dim, base, r, 1.0, 0.05, 1.0, 3.0, 10).unwrap()
    }

    #[test]
    fn gamma_half_values() {
        assert_relative_eq!(gamma_half(1), PI.sqrt());
        assert_relative_eq!(gamma_half(2), 1.0);
        assert_relative_eq!(gamma_half(3), PI.sqrt() / 2.0);
        assert_relative_eq!(gamma_half(8), 6.0);
        assert_relative_eq!(gamma_half(7), 15.0 / 8.0 * PI.sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn unit_ball_volumes() {
        assert_relative_eq!(unit_ball_volume(1), 2.0);
        assert_relative_eq!(unit_ball_volume(2), PI);
        assert_relative_eq!(unit_ball_volume(3), 4.0 * PI / 3.0, epsilon = 1e-14);
    }

    #[test]
    fn base_areas() {
        let p = fixture(2, 1.0, 0.3);
        assert_relative_eq!(p.base_area(), 2.0);
        assert_relative_eq!(p.base().admissible_area(), 1.4, epsilon = 1e-14);
        let p3 = fixture(3, 1.0, 0.3);
        assert_relative_eq!(p3.base_area(), PI);
        assert!(p3.base().contains_center(&[0.7, 0.0]));
        assert!(!p3.base().contains_center(&[0.5, 0.5]));
    }

    #[test]
    fn admissibility_examples() {
        let p = fixture(2, 1.0, 0.3);
        assert!(!is_admissible_particle(&[0.0], 0.5, &[0.0], 0.5, &p));
        assert!(is_admissible_particle(&[0.0], 0.5 + 0.3 + 1e-9, &[0.0], 0.5, &p));
        assert!(is_admissible_particle(&[0.4], 0.5, &[0.0], 0.5, &p));
        assert!(!is_admissible_particle(&[1.1], 2.0, &[0.0], 0.5, &p));
        assert!(!is_admissible_particle(&[0.9], -1e-12, &[0.0], 0.5, &p));
    }

    #[test]
    fn slice_examples() {
        let p3 = fixture(3, 2.0, 1.0);
        assert_relative_eq!(ball_slice_area(3.0, 3.0, &p3), PI);
        assert_eq!(ball_slice_area(3.0, 4.0, &p3), 0.0);
        assert_eq!(ball_slice_area(3.0, 1.5, &p3), 0.0);
        let p2 = fixture(2, 2.0, 1.0);
        assert_relative_eq!(ball_slice_area(3.0, 3.5, &p2), 3f64.sqrt(), epsilon = 1e-14);
        assert_relative_eq!(ball_slice_area(3.0, 2.5, &p2), 3f64.sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn slices_integrate_to_ball_volume() {
        for dim in 2..=5 {
            let p = ModelParams::new(dim, 2.0, 0.7, 1.0, 0.05, 1.0, 3.0, 10).unwrap();
            let yc = 1.3;
            // s = R sin(phi) removes the endpoint singularity of the slice profile
            let r = p.ball_radius;
            let rule = crate::quadrature::GaussLegendre::new(256);
            let vol = rule.integrate(-PI / 2.0, PI / 2.0, |phi| {
                ball_slice_area(yc, yc + r * phi.sin(), &p) * r * phi.cos()
            });
            assert_relative_eq!(vol, p.ball_volume(), max_relative = 1e-10);
        }
    }

    #[test]
    fn invalid_params_rejected() {
        assert!(ModelParams::new(1, 1.0, 0.3, 1.0, 0.1, 1.0, 3.0, 5).is_err());
        assert!(ModelParams::new(2, 0.3, 0.3, 1.0, 0.1, 1.0, 3.0, 5).is_err());
        assert!(ModelParams::new(2, 1.0, 0.3, 1.0, 0.1, 1.0, 0.03, 5).is_err());
        assert!(ModelParams::new(2, 1.0, 0.3, -1.0, 0.1, 1.0, 3.0, 5).is_err());
        assert!(ModelParams::new(2, 1.0, 0.0, 1.0, 0.0, 1.0, 3.0, 5)
            .unwrap()
            .require_ball()
            .is_err());
    }

    #[test]
    fn admissibility_rotation_symmetric_in_3d() {
        let p = fixture(3, 1.0, 0.3);
        let pts = [(0.2, 0.1, 0.4), (0.25, -0.05, 0.6), (0.0, 0.31, 0.5)];
        for &(a, b, y) in &pts {
            let base = is_admissible_particle(&[a, b], y, &[0.0, 0.0], 0.5, &p);
            for k in 0..12 {
                let t = k as f64 * PI / 6.0;
                let (s, c) = t.sin_cos();
                let rot = [c * a - s * b, s * a + c * b];
                assert_eq!(base, is_admissible_particle(&rot, y, &[0.0, 0.0], 0.5, &p));
            }
        }
    }
}
