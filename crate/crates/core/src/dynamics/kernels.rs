//! Closed-form flight, contact-time and reflection kernels.
//!
//! Positions and velocities are 3-vectors `(x0, x1, y)`; in two dimensions
//! the `x1` component is identically zero.

use crate::error::{Error, Result};
use rand::Rng;
use std::f64::consts::PI;

pub type Vec3 = [f64; 3];

pub fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Position, velocity and reference time of one body in free flight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Body {
    pub pos: Vec3,
    pub vel: Vec3,
    pub t: f64,
}

impl Body {
    /// State after flying for `dt`. A body lying on its support with zero
    /// vertical velocity (`floor` is the height of the support) stays there.
    pub fn flight(&self, dt: f64, g: f64, floor: f64) -> Body {
        let mut b = *self;
        b.pos[0] += self.vel[0] * dt;
        b.pos[1] += self.vel[1] * dt;
        if !(self.pos[2] == floor && self.vel[2] == 0.0) {
            b.pos[2] += self.vel[2] * dt - 0.5 * g * dt * dt;
            b.vel[2] -= g * dt;
        }
        b.t += dt;
        b
    }
}

/// Time until a body at height `h` above its support, moving vertically at
/// `vy`, reaches the support. `None` for a body resting on it.
pub fn bottom_time(h: f64, vy: f64, g: f64) -> Option<f64> {
    let h = h.max(0.0);
    if h == 0.0 && vy == 0.0 {
        return None;
    }
    let s = (vy * vy + 2.0 * g * h).sqrt();
    // both forms are the positive root; pick the cancellation-free one
    Some(if vy >= 0.0 { (vy + s) / g } else { 2.0 * h / (s - vy) })
}

/// Speed at which a body reaches its support, from the energy of its
/// current flight: `sqrt(vy^2 + 2 g h)`.
pub fn impact_speed(h: f64, vy: f64, g: f64) -> f64 {
    (vy * vy + 2.0 * g * h.max(0.0)).sqrt()
}

/// Time until the horizontal position `x + v t` reaches distance `radius`
/// from the axis. `None` without horizontal motion.
pub fn sidewall_time(x: [f64; 2], v: [f64; 2], radius: f64) -> Option<f64> {
    let a = v[0] * v[0] + v[1] * v[1];
    if a == 0.0 {
        return None;
    }
    let b = x[0] * v[0] + x[1] * v[1];
    let c = x[0] * x[0] + x[1] * x[1] - radius * radius;
    let disc = (b * b - a * c).max(0.0);
    let s = disc.sqrt();
    if b <= 0.0 {
        Some(((-b + s) / a).max(0.0))
    } else if c >= 0.0 {
        // on or beyond the wall and still moving out
        Some(0.0)
    } else {
        Some(-c / (b + s))
    }
}

/// Time until a particle at relative position `dp` with relative velocity
/// `dv` (particle minus ball) reaches distance `r` while approaching.
/// Both bodies share the gravitational acceleration, so relative motion is
/// linear. Grazing contacts (`disc < 1e-12 b^2`) count as misses.
pub fn time_to_ball(dp: &Vec3, dv: &Vec3, r: f64) -> Option<f64> {
    let b = dot(dp, dv);
    if b >= 0.0 {
        return None;
    }
    let a = dot(dv, dv);
    let c = dot(dp, dp) - r * r;
    if c <= 0.0 {
        // already touching (rounding) and approaching
        return Some(0.0);
    }
    let disc = b * b - a * c;
    if disc < 1e-12 * b * b {
        return None;
    }
    Some(c / (-b + disc.sqrt()))
}

/// Elastic particle–ball collision along the unit normal `n` pointing from
/// the ball centre to the particle. Tangential components are unchanged.
pub fn resolve_particle_ball(v: &Vec3, vb: &Vec3, n: &Vec3, m: f64, mb: f64) -> Result<(Vec3, Vec3)> {
    let vn = dot(v, n);
    let vbn = dot(vb, n);
    if vn - vbn >= 0.0 {
        return Err(Error::NonApproaching(vn - vbn));
    }
    let total = m + mb;
    let vn_new = ((m - mb) * vn + 2.0 * mb * vbn) / total;
    let vbn_new = ((mb - m) * vbn + 2.0 * m * vn) / total;
    let mut v_out = *v;
    let mut vb_out = *vb;
    for k in 0..3 {
        v_out[k] += (vn_new - vn) * n[k];
        vb_out[k] += (vbn_new - vbn) * n[k];
    }
    Ok((v_out, vb_out))
}

/// Mirror reflection in the plane with unit normal `n`.
pub fn reflect_specular(v: &Vec3, n: &Vec3) -> Vec3 {
    let c = 2.0 * dot(v, n);
    [v[0] - c * n[0], v[1] - c * n[1], v[2] - c * n[2]]
}

/// Wall reflection law for point particles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ReflectionMode {
    Specular,
    Lambertian,
}

impl std::str::FromStr for ReflectionMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "specular" => Ok(ReflectionMode::Specular),
            "lambertian" => Ok(ReflectionMode::Lambertian),
            other => Err(Error::InvalidParam(format!("unknown reflection mode {other:?}"))),
        }
    }
}

impl std::fmt::Display for ReflectionMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ReflectionMode::Specular => "specular",
            ReflectionMode::Lambertian => "lambertian",
        })
    }
}

/// Unit vectors spanning the wall plane at a point with inward normal
/// `inner`, restricted to the `dim`-dimensional subspace.
fn tangents(inner: &Vec3, dim: usize) -> [Vec3; 2] {
    if inner[2].abs() > 0.5 {
        // bottom: the horizontal axes
        [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]
    } else if dim == 2 {
        [[0.0, 0.0, 1.0], [0.0, 0.0, 0.0]]
    } else {
        // side wall: vertical and the horizontal tangent
        [[0.0, 0.0, 1.0], [-inner[1], inner[0], 0.0]]
    }
}

/// Direction with density proportional to `cos(theta)` about the inward
/// normal (`theta` the angle to it), uniform in azimuth.
pub fn lambertian_direction<R: Rng + ?Sized>(inner: &Vec3, dim: usize, rng: &mut R) -> Vec3 {
    let k = dim - 1;
    let sin_t = rng.random::<f64>().powf(1.0 / k as f64);
    let cos_t = (1.0 - sin_t * sin_t).max(0.0).sqrt();
    let [t1, t2] = tangents(inner, dim);
    let (a, b) = if k == 1 {
        (if rng.random::<bool>() { 1.0 } else { -1.0 }, 0.0)
    } else {
        let phi = 2.0 * PI * rng.random::<f64>();
        (phi.cos(), phi.sin())
    };
    let mut out = [0.0; 3];
    for c in 0..3 {
        out[c] = cos_t * inner[c] + sin_t * (a * t1[c] + b * t2[c]);
    }
    out
}

/// Outgoing velocity after hitting a wall with inward unit normal `inner`.
/// Lambertian reflection keeps the speed and is only defined for particles.
pub fn reflect_wall<R: Rng + ?Sized>(
    v: &Vec3,
    inner: &Vec3,
    mode: ReflectionMode,
    is_ball: bool,
    dim: usize,
    rng: &mut R,
) -> Result<Vec3> {
    match (mode, is_ball) {
        (ReflectionMode::Specular, _) => Ok(reflect_specular(v, inner)),
        (ReflectionMode::Lambertian, true) => Err(Error::ModeMismatch),
        (ReflectionMode::Lambertian, false) => {
            let speed = dot(v, v).sqrt();
            let d = lambertian_direction(inner, dim, rng);
            Ok([speed * d[0], speed * d[1], speed * d[2]])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn free_fall_example() {
        let b = Body { pos: [0.0, 0.0, 1.0], vel: [0.5, 0.0, 0.0], t: 0.0 };
        let a = b.flight(1.0, 2.0, 0.0);
        assert_eq!(a.pos, [0.5, 0.0, 0.0]);
        assert_eq!(a.vel, [0.5, 0.0, -2.0]);
        assert_eq!(bottom_time(1.0, 0.0, 2.0), Some(1.0));
    }

    #[test]
    fn resting_body_has_no_bottom_event() {
        assert_eq!(bottom_time(0.0, 0.0, 1.0), None);
        let b = Body { pos: [0.1, 0.0, 0.0], vel: [1.0, 0.0, 0.0], t: 0.0 };
        assert_eq!(b.flight(2.0, 1.0, 0.0).pos, [2.1, 0.0, 0.0]);
    }

    #[test]
    fn head_on_contact_time() {
        assert_eq!(time_to_ball(&[2.0, 0.0, 0.0], &[-1.0, 0.0, 0.0], 1.0), Some(1.0));
        assert_eq!(time_to_ball(&[2.0, 0.0, 0.0], &[1.0, 0.0, 0.0], 1.0), None);
        // tangent miss
        assert_eq!(time_to_ball(&[2.0, 1.0, 0.0], &[-1.0, 0.0, 0.0], 1.0), None);
    }

    #[test]
    fn sidewall_in_one_dimension() {
        assert_eq!(sidewall_time([0.5, 0.0], [1.0, 0.0], 1.0), Some(0.5));
        assert_eq!(sidewall_time([0.5, 0.0], [-0.5, 0.0], 1.0), Some(3.0));
        // just reflected at the wall
        let t = sidewall_time([1.0, 0.0], [-2.0, 0.0], 1.0).unwrap();
        assert!((t - 1.0).abs() < 1e-15);
    }

    #[test]
    fn collision_examples() {
        let n = [1.0, 0.0, 0.0];
        let (v, vb) = resolve_particle_ball(&[1.0, 0.3, 0.0], &[-1.0, 0.0, 0.0], &[-1.0, 0.0, 0.0], 1.0, 1.0).unwrap();
        assert_eq!((v, vb), ([-1.0, 0.3, 0.0], [1.0, 0.0, 0.0]));
        let (v, vb) = resolve_particle_ball(&[-1.0, 0.0, 0.0], &[0.0; 3], &n, 1.0, 3.0).unwrap();
        assert_eq!((v[0], vb[0]), (0.5, -0.5));
        assert!(resolve_particle_ball(&[1.0, 0.0, 0.0], &[0.0; 3], &n, 1.0, 1.0).is_err());
    }

    #[test]
    fn lambertian_rejects_ball() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let r = reflect_wall(&[0.0, 0.0, -1.0], &[0.0, 0.0, 1.0], ReflectionMode::Lambertian, true, 3, &mut rng);
        assert!(matches!(r, Err(Error::ModeMismatch)));
    }

    #[test]
    fn lambertian_keeps_speed_and_points_inward() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for dim in [2, 3] {
            for inner in [[0.0, 0.0, 1.0], [-0.6, if dim == 3 { -0.8 } else { 0.0 }, 0.0]] {
                let inner = if dim == 2 && inner[2] == 0.0 { [-1.0, 0.0, 0.0] } else { inner };
                for _ in 0..100 {
                    let v = reflect_wall(&[0.3, 0.0, -2.0], &inner, ReflectionMode::Lambertian, false, dim, &mut rng).unwrap();
                    assert!((dot(&v, &v).sqrt() - (4.09f64).sqrt()).abs() < 1e-12);
                    assert!(dot(&v, &inner) > 0.0);
                    if dim == 2 {
                        assert_eq!(v[1], 0.0);
                    }
                }
            }
        }
    }
}
