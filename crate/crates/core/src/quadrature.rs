//! Gauss–Legendre rules with a node-doubling driver.

use std::f64::consts::PI;
use std::sync::OnceLock;

/// A fixed Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds the `n`-point rule by Newton iteration on `P_n`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = (n + 1) / 2;
        for i in 0..m {
            // Tricomi's initial guess
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        let mut acc = 0.0;
        for (x, w) in self.nodes() {
            acc += w * f(mid + half * x);
        }
        acc * half
    }
}

/// `P_n(x)` and `P_n'(x)` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

pub const BASE_NODES: usize = 64;
pub const MAX_LEVEL: usize = 8;

/// Shared rule with `BASE_NODES * 2^level` nodes.
pub fn rule(level: usize) -> &'static GaussLegendre {
    static RULES: [OnceLock<GaussLegendre>; MAX_LEVEL + 1] = [const { OnceLock::new() }; MAX_LEVEL + 1];
    RULES[level].get_or_init(|| GaussLegendre::new(BASE_NODES << level))
}

/// Integrates a vector-valued integrand with successively doubled rules until
/// every component agrees with the previous level to
/// `rel_tol * max(|value|, scale[k])`. Returns the last estimate and whether
/// it converged.
pub fn integrate_doubling<const K: usize, F>(
    a: f64,
    b: f64,
    scale: [f64; K],
    rel_tol: f64,
    mut f: F,
) -> ([f64; K], bool)
where
    F: FnMut(f64) -> [f64; K],
{
    let eval = |level: usize, f: &mut F| {
        let r = rule(level);
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        let mut acc = [0.0; K];
        for (x, w) in r.nodes() {
            let v = f(mid + half * x);
            for k in 0..K {
                acc[k] += w * v[k];
            }
        }
        acc.map(|s| s * half)
    };
    let mut prev = eval(0, &mut f);
    for level in 1..=MAX_LEVEL {
        let cur = eval(level, &mut f);
        let done = (0..K)
            .all(|k| (cur[k] - prev[k]).abs() <= rel_tol * cur[k].abs().max(scale[k].abs()));
        if done {
            return (cur, true);
        }
        prev = cur;
    }
    (prev, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn weights_sum_to_two() {
        for n in [1, 2, 5, 64, 257] {
            let r = GaussLegendre::new(n);
            let s: f64 = r.nodes().map(|(_, w)| w).sum();
            assert_relative_eq!(s, 2.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn exact_for_polynomials() {
        let r = GaussLegendre::new(8);
        // degree 15 is integrated exactly by 8 nodes
        let v = r.integrate(0.0, 2.0, |x| x.powi(15));
        assert_relative_eq!(v, 2f64.powi(16) / 16.0, max_relative = 1e-13);
    }

    #[test]
    fn doubling_converges_on_peaked_integrand() {
        let (v, ok) = integrate_doubling(-PI / 2.0, PI / 2.0, [0.0], 1e-13, |phi| {
            [phi.cos().powi(2) * (-300.0 * (1.0 + phi.sin())).exp()]
        });
        assert!(ok);
        // direct check with a very large rule
        let big = GaussLegendre::new(6000).integrate(-PI / 2.0, PI / 2.0, |phi| {
            phi.cos().powi(2) * (-300.0 * (1.0 + phi.sin())).exp()
        });
        assert_relative_eq!(v[0], big, max_relative = 1e-11);
    }
}
