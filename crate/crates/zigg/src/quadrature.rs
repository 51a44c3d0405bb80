//! Gauss–Legendre quadrature on composite panels.

use crate::scalar::Real;

/// Nodes and weights of the `n`-point rule on [−1, 1].
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// ∫_a^b f with `panels` equal panels of a 16-point rule.
pub fn integrate<T: Real>(f: impl Fn(T) -> T, a: T, b: T, panels: usize) -> T {
    let rule = gauss_legendre(16);
    let h = (b - a) / T::c(panels as f64);
    let mut total = T::zero();
    for p in 0..panels {
        let lo = a + h * T::c(p as f64);
        let mid = lo + h * T::c(0.5);
        for &(x, w) in &rule {
            total += T::c(w) * f(mid + h * T::c(0.5 * x));
        }
    }
    total * h * T::c(0.5)
}

/// ∫_0^1 f for a bounded f with rough behaviour near 0, using geometric panels down to 1e-18.
pub fn integrate_unit<T: Real>(f: impl Fn(T) -> T) -> T {
    let mut total = T::zero();
    let mut hi = T::one();
    for _ in 0..18 {
        let lo = hi * T::c(0.1);
        total += integrate(&f, lo, hi, 8);
        hi = lo;
    }
    total
}
