//! The topmost region of a density that is unbounded at its mode.
//!
//! With `f(y) = |y − m|^(−q) h(y)` and `h` bounded, proposals
//! `y = m ± b·x^(1/β)` are accepted with probability
//! `(b^q / A)·(f(y) − f(m ± b))·|y − m| / (b x)`.

use std::sync::Arc;

use crate::scalar::Real;
use crate::setup::{Density, Direction};
use crate::tail::{cover_grid, MAX_ATTEMPTS};
use crate::Error;

/// What an adapter knows about the singularity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PeakConfig<T> {
    /// Algebraic order of growth, in (0, 1).
    pub q: T,
    /// Overrides the default `(1 − q²)/2`.
    pub beta: Option<T>,
}

impl<T: Real> PeakConfig<T> {
    pub fn new(q: T) -> Self {
        PeakConfig { q, beta: None }
    }

    pub fn with_beta(q: T, beta: T) -> Self {
        PeakConfig { q, beta: Some(beta) }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PeakSpec<T> {
    pub m: T,
    pub q: T,
    pub beta: T,
    pub b: T,
    pub h_b: T,
    pub h_max: T,
    pub a: T,
    pub side: Direction,
    /// f(m ± b)
    pub f_b: T,
    /// b^q / A
    c: T,
    /// 1/β
    e: T,
}

const SCAN_POINTS: usize = 1024;
const GOLDEN_ROUNDS: usize = 3;
const GOLDEN_STEPS: usize = 40;

/// `β = (1 − q²)/2`.
pub fn default_beta<T: Real>(q: T) -> T {
    (T::one() - q * q) * T::c(0.5)
}

/// Lower estimate of the acceptance rate for a given (q, β).
pub fn efficiency_estimate<T: Real>(q: T, beta: T) -> T {
    let one = T::one();
    let k = one - beta - q;
    if k <= T::zero() {
        // β = 1 − q: limit of the expression below
        return beta * (one - beta) / (one - q);
    }
    beta * k / (one - q) * ((one - beta) / k).powf((one - beta) / q)
}

/// `A` for given (q, β, h_b, h_max); `h_max` alone when β = 1 − q.
pub fn bound_a<T: Real>(q: T, beta: T, h_b: T, h_max: T) -> T {
    let one = T::one();
    let k = one - beta - q;
    if k <= T::rel_tol(1e-12) {
        return h_max;
    }
    h_b * q / k * (k / (one - beta)).powf((one - beta) / q) + h_max - h_b
}

/// Builds the peak parameters, scanning `h` for its maximum on (0, b].
pub fn peak_spec_for<T: Real>(
    density: &dyn Density<T>,
    m: T,
    config: PeakConfig<T>,
    b: T,
    side: Direction,
) -> Result<PeakSpec<T>, Error> {
    let one = T::one();
    let q = config.q;
    if !(q > T::zero() && q < one) {
        return Err(Error::Parameter(format!("order of growth q must lie in (0, 1), got {q}")));
    }
    if !(b > T::zero()) || !b.is_finite() {
        return Err(Error::Parameter(format!("peak width must be positive, got {b}")));
    }
    let beta = config.beta.unwrap_or_else(|| default_beta(q));
    if !(beta > T::zero() && beta <= one - q + T::rel_tol(1e-12)) {
        return Err(Error::Parameter(format!("beta must lie in (0, 1 − q], got {beta} for q = {q}")));
    }
    let sign = side.sign::<T>();
    let h = |d: T| d.powf(q) * density.pdf(m + sign * d);

    let grid: Vec<T> = (0..SCAN_POINTS)
        .map(|k| b * T::c(10f64.powf(-12.0 * (1.0 - k as f64 / (SCAN_POINTS - 1) as f64))))
        .collect();
    let values: Vec<T> = grid.iter().map(|&d| h(d)).collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Setup(format!("h(y) = |y − m|^q f(y) is not finite on the peak with q = {q}")));
    }
    let (kmax, _) = values
        .iter()
        .enumerate()
        .fold((0, T::neg_infinity()), |acc, (k, &v)| if v > acc.1 { (k, v) } else { acc });
    if kmax == 0 {
        // still growing at the innermost point: the singularity is stronger than |y − m|^(−q)
        let slope = (values[1] / values[0]).ln() / (grid[1] / grid[0]).ln();
        if slope < T::c(-0.01) {
            return Err(Error::Setup(format!(
                "h grows like |y − m|^{slope} near the mode: growth is not algebraic of order {q}"
            )));
        }
    }
    let mut h_max = values[kmax];
    let mut lo = grid[kmax.saturating_sub(1)];
    let mut hi = grid[(kmax + 1).min(SCAN_POINTS - 1)];
    let inv_phi = T::c((5f64.sqrt() - 1.0) / 2.0);
    for _ in 0..GOLDEN_ROUNDS {
        let (mut a, mut c) = (lo, hi);
        let mut x1 = c - inv_phi * (c - a);
        let mut x2 = a + inv_phi * (c - a);
        let (mut h1, mut h2) = (h(x1), h(x2));
        for _ in 0..GOLDEN_STEPS {
            if h1 > h2 {
                c = x2;
                x2 = x1;
                h2 = h1;
                x1 = c - inv_phi * (c - a);
                h1 = h(x1);
            } else {
                a = x1;
                x1 = x2;
                h1 = h2;
                x2 = a + inv_phi * (c - a);
                h2 = h(x2);
            }
        }
        let (best_x, best) = if h1 > h2 { (x1, h1) } else { (x2, h2) };
        h_max = h_max.max(best);
        // next round searches a narrower window around the refined point
        let w = (hi - lo) * T::c(0.25);
        lo = (best_x - w).max(grid[0]);
        hi = (best_x + w).min(b);
    }
    let h_b = values[SCAN_POINTS - 1];
    let a = bound_a(q, beta, h_b, h_max);
    let spec = PeakSpec {
        m,
        q,
        beta,
        b,
        h_b,
        h_max,
        a,
        side,
        f_b: density.pdf(m + sign * b),
        c: b.powf(q) / a,
        e: one / beta,
    };
    spec.verify(density)?;
    Ok(spec)
}

impl<T: Real> PeakSpec<T> {
    #[inline]
    fn map_t(&self, x: T) -> T {
        if self.e == T::c(2.0) {
            x * x
        } else {
            x.powf(self.e)
        }
    }

    /// Proposal for the uniform `x`.
    pub fn map(&self, x: T) -> T {
        self.m + self.side.sign::<T>() * self.b * self.map_t(x)
    }

    /// Pr(x) for the proposal `map(x)`.
    pub fn acceptance(&self, density: &dyn Density<T>, x: T) -> T {
        let t = self.map_t(x);
        self.c * t * (density.pdf(self.map(x)) - self.f_b) / x
    }

    /// The paper's lower estimate of the acceptance rate at this (q, β).
    pub fn efficiency_estimate(&self) -> T {
        efficiency_estimate(self.q, self.beta)
    }

    fn verify(&self, density: &dyn Density<T>) -> Result<(), Error> {
        let slack = T::one() + T::rel_tol(1e-9);
        for x in cover_grid::<T>() {
            let pr = self.acceptance(density, x);
            if pr.is_nan() && self.map(x) == self.m {
                continue;
            }
            if pr > slack || pr.is_nan() {
                return Err(Error::Covering(format!(
                    "peak acceptance {pr} at x = {x} (q = {}, beta = {}, b = {})",
                    self.q, self.beta, self.b
                )));
            }
        }
        Ok(())
    }

    /// One variate in the peak region.
    #[inline]
    pub fn sample(&self, density: &dyn Density<T>, uniform: &mut impl FnMut() -> T) -> Result<T, Error> {
        self.sample_counted(density, uniform).map(|(y, _)| y)
    }

    pub fn sample_counted(&self, density: &dyn Density<T>, uniform: &mut impl FnMut() -> T) -> Result<(T, u64), Error> {
        let sign = self.side.sign::<T>();
        for attempt in 1..=MAX_ATTEMPTS {
            let u1 = uniform();
            let t = self.map_t(u1);
            let y = self.m + sign * self.b * t;
            let v = uniform();
            if u1 * v < self.c * t * (density.pdf(y) - self.f_b) {
                return Ok((y, attempt));
            }
        }
        Err(Error::IterationCap(MAX_ATTEMPTS as usize))
    }
}

/// Peak sampler bound to its density.
#[derive(Clone)]
pub struct PeakSampler<T: Real> {
    pub spec: PeakSpec<T>,
    pub density: Arc<dyn Density<T>>,
}

impl<T: Real> std::fmt::Debug for PeakSampler<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.spec.fmt(f)
    }
}

impl<T: Real> PeakSampler<T> {
    #[inline]
    pub fn sample(&self, uniform: &mut impl FnMut() -> T) -> Result<T, Error> {
        self.spec.sample(&*self.density, uniform)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{log_gamma, reg_inc_gamma_lower};

    struct Gamma(f64);
    impl Density<f64> for Gamma {
        fn pdf(&self, x: f64) -> f64 {
            if x <= 0.0 {
                if x == 0.0 { f64::INFINITY } else { 0.0 }
            } else {
                ((self.0 - 1.0) * x.ln() - x - log_gamma(self.0).unwrap()).exp()
            }
        }
        fn cdf(&self, x: f64) -> f64 {
            reg_inc_gamma_lower(self.0, x.max(0.0)).unwrap()
        }
    }

    #[test]
    fn default_beta_example() {
        assert_eq!(default_beta(0.5f64), 0.375);
    }

    #[test]
    fn efficiency_estimate_above_half() {
        for k in 1..=9 {
            let q = k as f64 / 10.0;
            let e = efficiency_estimate(q, default_beta(q));
            assert!(e > 0.5 && e < 1.0, "q={q} e={e}");
        }
    }

    #[test]
    fn a_limits_to_h_max() {
        let q = 0.5f64;
        assert_eq!(bound_a(q, 0.5, 0.3, 0.4), 0.4);
        let near = bound_a(q, 0.5 - 1e-9, 0.3, 0.4);
        assert!((near - 0.4).abs() < 1e-6);
        // the specialised form at β = (1 − q²)/2
        let (hb, hm) = (0.3, 0.45);
        let special = 2.0 * hb * q * (1.0 - q).powf((1.0 - q).powi(2) / q) / (1.0 + q * q).powf((1.0 + q * q) / (2.0 * q)) + hm - hb;
        assert!((bound_a(q, default_beta(q), hb, hm) - special).abs() < 1e-14);
    }

    #[test]
    fn chi_squared_one_h_limit() {
        // χ²₁ = Gamma(1/2, 2); h(y) = √y f(y) → 1/√(2π) as y → 0
        struct Chi1;
        impl Density<f64> for Chi1 {
            fn pdf(&self, y: f64) -> f64 {
                (-0.5 * y).exp() / (2.0 * std::f64::consts::PI * y).sqrt()
            }
            fn cdf(&self, y: f64) -> f64 {
                reg_inc_gamma_lower(0.5, 0.5 * y).unwrap()
            }
        }
        let spec = peak_spec_for(&Chi1, 0.0, PeakConfig::with_beta(0.5, 0.5), 1e-6, Direction::Decreasing).unwrap();
        assert!((spec.h_max - 1.0 / (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-12);
        assert_eq!(spec.a, spec.h_max);
    }

    #[test]
    fn scan_rejects_wrong_order() {
        // Gamma(0.5) has q = 0.5; claiming q = 0.3 leaves h unbounded
        let r = peak_spec_for(&Gamma(0.5), 0.0, PeakConfig::new(0.3), 0.5, Direction::Decreasing);
        assert!(r.is_err());
        assert!(peak_spec_for(&Gamma(0.5), 0.0, PeakConfig::new(0.5), 0.5, Direction::Decreasing).is_ok());
        assert!(peak_spec_for(&Gamma(0.5), 0.0, PeakConfig::with_beta(0.5, 0.7), 0.5, Direction::Decreasing).is_err());
    }

    #[test]
    fn acceptance_bounded_on_grid() {
        for &(a, b) in &[(0.1, 1e-3), (0.5, 0.5), (0.9, 2.0)] {
            let g = Gamma(a);
            let spec = peak_spec_for(&g, 0.0, PeakConfig::new(1.0 - a), b, Direction::Decreasing).unwrap();
            let worst = cover_grid::<f64>().map(|x| spec.acceptance(&g, x)).fold(0.0, f64::max);
            assert!(worst <= 1.0 + 1e-9, "alpha={a}: {worst}");
            assert!(worst > 0.3);
        }
    }
}
