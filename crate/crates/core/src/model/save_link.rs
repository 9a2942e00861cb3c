//! Single-index link under which the SAVE matrix vanishes.
//!
//! For `z ≥ 1`, `ν(z) ∈ (0, 1]` is the lower end point with
//! `E[Z² | Z ∈ [ν(z), z]] = 1`. Expanding the truncated second moment this
//! reduces to `ν φ(ν) = z φ(z)`, which is solved on a log-spaced grid and
//! interpolated with a monotone cubic.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::sync::{Arc, OnceLock};

use statrs::function::erf::erfc;

use super::link::LinkFunction;

const GRID_MAX: f64 = 50.0;
const GRID_KNOTS: usize = 10_000;

pub fn std_normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
}

/// `Φ(b) − Φ(a)` without cancellation in either tail.
pub fn std_normal_mass(a: f64, b: f64) -> f64 {
    let upper = |x: f64| 0.5 * erfc(x * FRAC_1_SQRT_2);
    if a >= 0.0 {
        upper(a) - upper(b)
    } else if b <= 0.0 {
        upper(-b) - upper(-a)
    } else {
        1.0 - upper(b) - upper(-a)
    }
}

/// `E[Z² | a ≤ Z ≤ b]` for a standard normal `Z`, `a < b`.
pub fn xi(a: f64, b: f64) -> f64 {
    let mass = std_normal_mass(a, b);
    1.0 + (a * std_normal_pdf(a) - b * std_normal_pdf(b)) / mass
}

/// `ln z − z²/2`, i.e. `ln(z φ(z))` up to a constant.
fn log_zphi(z: f64) -> f64 {
    z.ln() - 0.5 * z * z
}

/// `ln ν(z)` by bisection on `s = ln ν ∈ [L − 1, 0]`, where `L = ln z − z²/2`.
fn solve_log_nu(z: f64) -> f64 {
    if z <= 1.0 {
        return 0.0;
    }
    let target = log_zphi(z);
    // q(s) = s − e^{2s}/2 − L is increasing on s ≤ 0
    let q = |s: f64| s - 0.5 * (2.0 * s).exp() - target;
    let (mut lo, mut hi) = (target - 1.0, 0.0_f64);
    debug_assert!(q(lo) < 0.0 && q(hi) >= 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if q(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Tabulated `ln ν` on `[1, 50]` with Fritsch–Carlson slopes.
#[derive(Debug)]
pub struct NuTable {
    knots: Vec<f64>,
    values: Vec<f64>,
    slopes: Vec<f64>,
    log_step: f64,
}

impl NuTable {
    fn build() -> Self {
        let log_step = GRID_MAX.ln() / (GRID_KNOTS - 1) as f64;
        let knots: Vec<f64> = (0..GRID_KNOTS)
            .map(|i| if i == 0 { 1.0 } else { (i as f64 * log_step).exp() })
            .collect();
        let values: Vec<f64> = knots.iter().map(|&z| solve_log_nu(z)).collect();
        let slopes = pchip_slopes(&knots, &values);
        Self {
            knots,
            values,
            slopes,
            log_step,
        }
    }

    /// Shared lazily built table.
    pub fn global() -> &'static NuTable {
        static TABLE: OnceLock<NuTable> = OnceLock::new();
        TABLE.get_or_init(NuTable::build)
    }

    pub fn log_nu(&self, z: f64) -> f64 {
        if z <= 1.0 {
            return 0.0;
        }
        if z >= GRID_MAX {
            // ν is tiny here, so ln ν = L + ν²/2 is a one-step fixed point
            let l = log_zphi(z);
            return l + 0.5 * (2.0 * l).exp();
        }
        let n = self.knots.len();
        let mut i = ((z.ln() / self.log_step) as usize).min(n - 2);
        while i > 0 && self.knots[i] > z {
            i -= 1;
        }
        while i + 2 < n && self.knots[i + 1] < z {
            i += 1;
        }
        let (x0, x1) = (self.knots[i], self.knots[i + 1]);
        let w = x1 - x0;
        let t = (z - x0) / w;
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.values[i] + h10 * w * self.slopes[i] + h01 * self.values[i + 1] + h11 * w * self.slopes[i + 1]
    }

    pub fn nu(&self, z: f64) -> f64 {
        self.log_nu(z).exp()
    }

    /// `ν′(z) = (1 − z²) ν / (z (1 − ν²))`, from differentiating `ν φ(ν) = z φ(z)`.
    pub fn nu_derivative(&self, z: f64) -> f64 {
        if z <= 1.0 {
            return -1.0;
        }
        let v = self.nu(z);
        let denom = 1.0 - v * v;
        if denom < 1e-6 {
            return -1.0;
        }
        (1.0 - z * z) * v / (z * denom)
    }
}

fn pchip_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let delta: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
    let mut m = vec![0.0; n];
    m[0] = delta[0];
    m[n - 1] = delta[n - 2];
    for i in 1..n - 1 {
        let (d0, d1) = (delta[i - 1], delta[i]);
        if d0 * d1 <= 0.0 {
            m[i] = 0.0;
        } else {
            let w1 = 2.0 * h[i] + h[i - 1];
            let w2 = h[i] + 2.0 * h[i - 1];
            m[i] = (w1 + w2) / (w1 / d0 + w2 / d1);
        }
    }
    m
}

/// `f(z) = 0` for `z < 0`, `f₀(z) = z` on `[0, 1]`, `f₀(ν(z))` beyond.
pub fn save_counterexample_value(z: f64) -> f64 {
    if z < 0.0 {
        0.0
    } else if z <= 1.0 {
        z
    } else {
        NuTable::global().nu(z)
    }
}

pub fn save_counterexample_derivative(z: f64) -> f64 {
    if z < 0.0 {
        0.0
    } else if z <= 1.0 {
        1.0
    } else {
        NuTable::global().nu_derivative(z)
    }
}

/// The one-variable link under which `E[(E[XXᵀ|Y] − I)²] = 0` for a standard
/// Gaussian design.
pub fn construct_save_counterexample_link() -> LinkFunction {
    LinkFunction::custom(
        "save_counterexample",
        1,
        Arc::new(|z: &[f64]| save_counterexample_value(z[0])),
        Some(Arc::new(|z: &[f64], out: &mut [f64]| {
            out[0] = save_counterexample_derivative(z[0])
        })),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Composite Simpson for `E[Z² | a ≤ Z ≤ b]`.
    fn xi_quadrature(a: f64, b: f64) -> f64 {
        let n = 20_000;
        let step = (b - a) / n as f64;
        let (mut num, mut den) = (0.0, 0.0);
        for i in 0..=n {
            let z = a + i as f64 * step;
            let w = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            let p = (-0.5 * z * z).exp();
            num += w * z * z * p;
            den += w * p;
        }
        num / den
    }

    #[test]
    fn piecewise_values() {
        let f = construct_save_counterexample_link();
        assert_eq!(f.evaluate(&[-0.3]), 0.0);
        assert_eq!(f.evaluate(&[-5.0]), 0.0);
        assert_eq!(f.evaluate(&[0.4]), 0.4);
        assert_eq!(f.evaluate(&[1.0]), 1.0);
        assert!((f.evaluate(&[1.0 + 1e-9]) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn root_satisfies_identity_at_three() {
        let nu = NuTable::global().nu(3.0);
        assert!(nu > 0.0 && nu < 1.0);
        let q = xi_quadrature(nu, 3.0);
        assert!((q - 1.0).abs() < 1e-6, "xi(nu(3), 3) = {q}");
    }

    #[test]
    fn closed_form_xi_matches_quadrature() {
        for &(a, b) in &[(0.0, 1.0), (0.2, 2.5), (0.9, 1.1), (-1.0, 2.0)] {
            assert!((xi(a, b) - xi_quadrature(a, b)).abs() < 1e-8);
        }
    }

    #[test]
    fn nu_is_decreasing_and_interpolation_is_accurate() {
        let t = NuTable::global();
        let mut prev = 0.0;
        for i in 1..400 {
            let z = 1.0 + i as f64 * 0.137;
            let v = t.log_nu(z);
            assert!(v < prev, "z={z}");
            prev = v;
            // off-grid points agree with a direct solve
            let direct = solve_log_nu(z);
            assert!((t.log_nu(z) - direct).abs() < 1e-8 * direct.abs().max(1.0), "z={z}");
        }
        assert!(t.log_nu(60.0) < t.log_nu(49.0));
        assert!(t.nu(3.0) > 0.0 && t.nu(3.0) < 1.0);
    }

    #[test]
    fn derivative_matches_finite_differences() {
        for &z in &[1.2, 1.7, 2.5, 4.0] {
            let step = 1e-5;
            let fd = (save_counterexample_value(z + step) - save_counterexample_value(z - step)) / (2.0 * step);
            let g = save_counterexample_derivative(z);
            assert!((fd - g).abs() < 1e-5 * g.abs().max(1.0), "z={z}: {fd} vs {g}");
        }
    }
}
