//! Reference values computed along routes that share no code with the production
//! integrators: Monte Carlo, trapezoid sums with Romberg extrapolation, closed forms
//! and plain series.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use std::f64::consts::{FRAC_PI_2, PI};

/// Mean and standard error of a Monte Carlo estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
}

/// `N_{-+}` for constant coupling from uniform samples of `(x, mu)` on `[0,1) x [-1,1)`,
/// using the integrand exactly as written, with `m^2 / (x(1-x))` unreduced.
pub fn monte_carlo_n_minus_plus(gamma: f64, mass: f64, lambda: f64, samples: usize, seed: u64) -> McEstimate {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let (g2, m2) = (gamma * gamma, mass * mass);
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..samples {
        let x: f64 = rng.gen();
        let mu: f64 = rng.gen_range(-1.0..1.0);
        let b = mu * mu * x + (1.0 - x);
        let w = x * (1.0 - x);
        let v = if w > 0.0 {
            1.0 / (b.sqrt() * (gamma + ((g2 + m2 / w) * b).sqrt()))
        } else {
            0.0
        };
        sum += v;
        sum_sq += v * v;
    }
    let n = samples as f64;
    let mean = sum / n;
    let var = (sum_sq / n - mean * mean).max(0.0) * n / (n - 1.0);
    // Area of the sampling rectangle is 2.
    let pref = -lambda * lambda / (64.0 * PI * PI * gamma) * 2.0;
    McEstimate {
        mean: pref * mean,
        std_error: pref.abs() * (var / n).sqrt(),
    }
}

/// Romberg table on top of composite trapezoid sums over `[a, b]`; returns the
/// extrapolated value and the difference between the last two diagonal entries.
pub fn romberg(f: impl Fn(f64) -> f64, a: f64, b: f64, levels: usize) -> (f64, f64) {
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(levels);
    let mut n = 1usize;
    let mut trap = 0.5 * (b - a) * (f(a) + f(b));
    for level in 0..levels {
        if level > 0 {
            let h = (b - a) / (2 * n) as f64;
            let mid: f64 = (0..n).map(|i| f(a + (2 * i + 1) as f64 * h)).sum();
            trap = 0.5 * trap + h * mid;
            n *= 2;
        }
        let mut row = vec![trap];
        let mut factor = 1.0;
        for k in 1..=level {
            factor *= 4.0;
            let prev = &rows[level - 1];
            row.push(row[k - 1] + (row[k - 1] - prev[k - 1]) / (factor - 1.0));
        }
        rows.push(row);
    }
    let last = rows[levels - 1][levels - 1];
    let before = rows[levels - 2][levels - 2];
    (last, (last - before).abs())
}

/// `int_0^1 g(x) dx` through `x = sin^2(theta)`, which makes square-root endpoint
/// behaviour smooth and periodic so the trapezoid rule converges fast.
fn theta_integral(g: impl Fn(f64, f64) -> f64) -> (f64, f64) {
    romberg(
        |theta| {
            let (s, c) = theta.sin_cos();
            // g receives x and sqrt(x(1-x)); dx = 2 s c dtheta
            g(s * s, s * c) * 2.0 * s * c
        },
        0.0,
        FRAC_PI_2,
        14,
    )
}

/// `N_{--}` in its textbook form `-lambda^2/(32 pi^2 gamma m^2) [gamma/6 - int sqrt(w) sqrt(w gamma^2 + m^2)]`.
pub fn trapezoid_n_minus_minus(gamma: f64, mass: f64, lambda: f64) -> f64 {
    let (integral, _) = theta_integral(|_, sw| sw * (sw * sw * gamma * gamma + mass * mass).sqrt());
    -lambda * lambda / (32.0 * PI * PI * gamma * mass * mass) * (gamma / 6.0 - integral)
}

/// Renormalised `N_t` from the single-integral closed form
/// `-lambda^2/(32 pi^2 gamma^2) int_0^1 asinh(gamma sqrt(x(1-x)) / m) dx`.
pub fn asinh_n_t(gamma: f64, mass: f64, lambda: f64) -> f64 {
    let (integral, _) = theta_integral(|_, sw| (gamma * sw / mass).asinh());
    -lambda * lambda / (32.0 * PI * PI * gamma * gamma) * integral
}

/// `sum_{n=1}^{terms} z^n / n^4`.
pub fn li4_direct(z: f64, terms: usize) -> f64 {
    (1..=terms).map(|n| z.powi(n as i32) / (n as f64).powi(4)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn romberg_on_smooth_integrand() {
        let (v, d) = romberg(f64::exp, 0.0, 1.0, 8);
        assert!((v - (1f64.exp() - 1.0)).abs() < 1e-14);
        assert!(d < 1e-12);
    }

    #[test]
    fn theta_route_on_semicircle_moment() {
        let (v, _) = theta_integral(|_, sw| sw);
        assert!((v - PI / 8.0).abs() < 1e-14);
    }

    #[test]
    fn monte_carlo_is_reproducible() {
        let a = monte_carlo_n_minus_plus(1.0, 1.0, 1.0, 10_000, 7);
        let b = monte_carlo_n_minus_plus(1.0, 1.0, 1.0, 10_000, 7);
        assert_eq!(a, b);
        assert!(a.mean < 0.0 && a.std_error > 0.0);
    }
}
