//! Tail samplers: the distribution conditioned beyond the base strip.
//!
//! Every family maps a uniform `x` in (0,1) through a monotone `g` with
//! `g(1) = s` and `g(0+) = ±inf`, then accepts with a family-specific
//! probability `Pr(x)`. Formulas are written for a right tail; left tails
//! mirror them through `Side::sign`.

use std::fmt;
use std::sync::Arc;

use crate::quadrature::integrate_unit;
use crate::scalar::Real;
use crate::setup::Density;
use crate::Error;

pub type Fn1<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

/// Cap on proposals per tail variate.
pub const MAX_ATTEMPTS: u64 = 1_000_000;

/// Points of the covering-condition grid.
pub const COVER_GRID: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn sign<T: Real>(self) -> T {
        match self {
            Side::Left => -T::one(),
            Side::Right => T::one(),
        }
    }
}

#[derive(Clone)]
pub enum TailStrategy<T> {
    /// Exact inversion of a left tail: `y = icdf(x·cdf(s))`.
    Icdf { cdf: Fn1<T>, icdf: Fn1<T> },
    /// Exact inversion of a right tail: `y = iccdf(x·ccdf(s))`.
    Iccdf { ccdf: Fn1<T>, iccdf: Fn1<T> },
    /// `y = f⁻¹(x^α f(s))`. `inverse_log_pdf` maps ln f back to the tail side,
    /// `log_pdf_slope` is `d/dy ln f`.
    Ipdf { inverse_log_pdf: Fn1<T>, log_pdf_slope: Fn1<T>, alpha: T },
    /// `f = d·r`, `y = d⁻¹(x^α d(s))` with `d` the decaying factor.
    Iipdf { inverse_log_d: Fn1<T>, log_d: Fn1<T>, log_d_slope: Fn1<T>, alpha: T },
    /// `y = s ∓ σ ln x`; light tails.
    Logarithmic { sigma: T },
    /// Conditional Cauchy cover with scale γ and location y₀.
    Trigonometric { gamma: T, y0: T },
    /// Type II Pareto cover, `y = s ± σ(x^(−1/α) − 1)`.
    Rational { alpha: T, sigma: T },
    /// `y = s ± σ(exp(x^(−1/α) − 1) − 1)`; super heavy tails.
    ExponentialMap { alpha: T, sigma: T },
}

impl<T: Real> TailStrategy<T> {
    pub fn name(&self) -> &'static str {
        match self {
            TailStrategy::Icdf { .. } => "icdf",
            TailStrategy::Iccdf { .. } => "iccdf",
            TailStrategy::Ipdf { .. } => "ipdf",
            TailStrategy::Iipdf { .. } => "iipdf",
            TailStrategy::Logarithmic { .. } => "logarithmic",
            TailStrategy::Trigonometric { .. } => "trigonometric",
            TailStrategy::Rational { .. } => "rational",
            TailStrategy::ExponentialMap { .. } => "exponential",
        }
    }

    /// Scalar parameters as `name=value` pairs.
    pub fn params(&self) -> Vec<(&'static str, T)> {
        match *self {
            TailStrategy::Icdf { .. } | TailStrategy::Iccdf { .. } => vec![],
            TailStrategy::Ipdf { alpha, .. } | TailStrategy::Iipdf { alpha, .. } => vec![("alpha", alpha)],
            TailStrategy::Logarithmic { sigma } => vec![("sigma", sigma)],
            TailStrategy::Trigonometric { gamma, y0 } => vec![("gamma", gamma), ("y0", y0)],
            TailStrategy::Rational { alpha, sigma } | TailStrategy::ExponentialMap { alpha, sigma } => {
                vec![("alpha", alpha), ("sigma", sigma)]
            }
        }
    }
}

impl<T: Real> fmt::Debug for TailStrategy<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:?}", self.name(), self.params())
    }
}

/// Builds a strategy once the tail start is known.
pub type TailFactory<T> = Arc<dyn Fn(&TailContext<T>) -> Result<TailStrategy<T>, Error> + Send + Sync>;

/// Where a tail starts and what it is a tail of.
#[derive(Clone)]
pub struct TailContext<T: Real> {
    pub s: T,
    pub side: Side,
    pub density: Arc<dyn Density<T>>,
    pub pdf_at_s: T,
    pub log_pdf_at_s: T,
    /// Mass beyond s: `ccdf(s)` or `cdf(s)`.
    pub tail_mass: T,
}

impl<T: Real> fmt::Debug for TailContext<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TailContext")
            .field("s", &self.s)
            .field("side", &self.side)
            .field("pdf_at_s", &self.pdf_at_s)
            .field("tail_mass", &self.tail_mass)
            .finish()
    }
}

impl<T: Real> TailContext<T> {
    pub fn new(density: Arc<dyn Density<T>>, s: T, side: Side) -> Result<Self, Error> {
        let pdf_at_s = density.pdf(s);
        if !(pdf_at_s > T::zero()) || !pdf_at_s.is_finite() || !s.is_finite() {
            return Err(Error::Parameter(format!("tail start {s} must be finite with positive density, f(s) = {pdf_at_s}")));
        }
        let tail_mass = match side {
            Side::Right => density.ccdf(s),
            Side::Left => density.cdf(s),
        };
        Ok(TailContext {
            s,
            side,
            log_pdf_at_s: density.log_pdf(s),
            density,
            pdf_at_s,
            tail_mass,
        })
    }

    /// `ln f(y) − ln f(s)`.
    #[inline]
    fn log_ratio(&self, y: T) -> T {
        if self.density.has_log_pdf() {
            self.density.log_pdf(y) - self.log_pdf_at_s
        } else {
            (self.density.pdf(y) / self.pdf_at_s).ln()
        }
    }
}

/// A strategy bound to its context, with derived constants cached.
#[derive(Clone)]
pub struct TailSampler<T: Real> {
    pub ctx: TailContext<T>,
    pub strategy: TailStrategy<T>,
    // inversion: tail-side cdf at s; trigonometric: C1
    c1: T,
    // ipdf/iipdf: slope at s; trigonometric: C2
    c2: T,
    // iipdf: ln d(s)
    c3: T,
}

impl<T: Real> fmt::Debug for TailSampler<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TailSampler").field("ctx", &self.ctx).field("strategy", &self.strategy).finish()
    }
}

impl<T: Real> TailSampler<T> {
    /// Binds and checks the covering condition on the verification grid.
    pub fn new(ctx: TailContext<T>, strategy: TailStrategy<T>) -> Result<Self, Error> {
        let sampler = Self::bind(ctx, strategy)?;
        sampler.verify_cover()?;
        Ok(sampler)
    }

    /// Binds without the covering check; for tests that probe bad parameters.
    pub fn bind(ctx: TailContext<T>, strategy: TailStrategy<T>) -> Result<Self, Error> {
        let s = ctx.s;
        let positive = |name: &str, v: T| {
            if v > T::zero() && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Parameter(format!("{} tail needs {name} > 0, got {v}", strategy.name())))
            }
        };
        let (mut c1, mut c2, mut c3) = (T::zero(), T::zero(), T::zero());
        match &strategy {
            TailStrategy::Icdf { cdf, .. } => {
                if ctx.side != Side::Left {
                    return Err(Error::Parameter("icdf inversion serves left tails; use iccdf".into()));
                }
                c1 = cdf(s);
            }
            TailStrategy::Iccdf { ccdf, .. } => {
                if ctx.side != Side::Right {
                    return Err(Error::Parameter("iccdf inversion serves right tails; use icdf".into()));
                }
                c1 = ccdf(s);
            }
            TailStrategy::Ipdf { log_pdf_slope, alpha, .. } => {
                positive("alpha", *alpha)?;
                c2 = log_pdf_slope(s);
            }
            TailStrategy::Iipdf { log_d, log_d_slope, alpha, .. } => {
                positive("alpha", *alpha)?;
                c2 = log_d_slope(s);
                c3 = log_d(s);
            }
            TailStrategy::Logarithmic { sigma } => positive("sigma", *sigma)?,
            TailStrategy::Trigonometric { gamma, y0 } => {
                positive("gamma", *gamma)?;
                let z = (s - *y0) / *gamma;
                c1 = z.atan() - ctx.side.sign::<T>() * T::FRAC_PI_2();
                c2 = T::one() + z * z;
            }
            TailStrategy::Rational { alpha, sigma } | TailStrategy::ExponentialMap { alpha, sigma } => {
                positive("alpha", *alpha)?;
                positive("sigma", *sigma)?;
            }
        }
        Ok(TailSampler { ctx, strategy, c1, c2, c3 })
    }

    /// The mapping `g(x)`.
    pub fn map(&self, x: T) -> T {
        let s = self.ctx.s;
        let sign = self.ctx.side.sign::<T>();
        let one = T::one();
        match &self.strategy {
            TailStrategy::Icdf { icdf, .. } => icdf(x * self.c1),
            TailStrategy::Iccdf { iccdf, .. } => iccdf(x * self.c1),
            TailStrategy::Ipdf { inverse_log_pdf, alpha, .. } => inverse_log_pdf(*alpha * x.ln() + self.ctx.log_pdf_at_s),
            TailStrategy::Iipdf { inverse_log_d, alpha, .. } => inverse_log_d(*alpha * x.ln() + self.c3),
            TailStrategy::Logarithmic { sigma } => s - sign * *sigma * x.ln(),
            TailStrategy::Trigonometric { gamma, y0 } => *gamma * self.trig_t(x) + *y0,
            TailStrategy::Rational { alpha, sigma } => s + sign * *sigma * (x.powf(-one / *alpha) - one),
            TailStrategy::ExponentialMap { alpha, sigma } => {
                s + sign * *sigma * ((x.powf(-one / *alpha) - one).exp() - one)
            }
        }
    }

    #[inline]
    fn trig_t(&self, x: T) -> T {
        // tan(C1·x ± π/2) = −cot(C1·x), exact near x → 0
        -T::one() / (self.c1 * x).tan()
    }

    /// `ln Pr(x)` for the proposal `y = g(x)`.
    pub fn log_acceptance(&self, x: T, y: T) -> T {
        let one = T::one();
        let lx = x.ln();
        match &self.strategy {
            TailStrategy::Icdf { .. } | TailStrategy::Iccdf { .. } => T::zero(),
            TailStrategy::Ipdf { log_pdf_slope, alpha, .. } => {
                // x^(2α−1) f'(s)/f'(y), with ln f(y) = α ln x + ln f(s)
                (*alpha - one) * lx + (self.c2 / log_pdf_slope(y)).ln()
            }
            TailStrategy::Iipdf { log_d_slope, .. } => {
                // f(y)/f(s) · x^(α−1) · d'(s)/d'(y), with ln d(y) = α ln x + ln d(s)
                self.ctx.log_ratio(y) - lx + (self.c2 / log_d_slope(y)).ln()
            }
            TailStrategy::Logarithmic { .. } => self.ctx.log_ratio(y) - lx,
            TailStrategy::Trigonometric { .. } => {
                let t = self.trig_t(x);
                (one + t * t).ln() - self.c2.ln() + self.ctx.log_ratio(y)
            }
            TailStrategy::Rational { alpha, sigma } => {
                let lt = -lx / *alpha;
                lt - lx + self.far_log_ratio(y, || sigma.ln() + lt)
            }
            TailStrategy::ExponentialMap { alpha, sigma } => {
                let t1 = x.powf(-one / *alpha);
                t1.ln() + (t1 - one) - lx + self.far_log_ratio(y, || sigma.ln() + t1 - one)
            }
        }
    }

    /// `ln f(y) − ln f(s)`, falling back to the log-argument density when `y` overflowed.
    fn far_log_ratio(&self, y: T, ln_y: impl Fn() -> T) -> T {
        if y.is_finite() {
            return self.ctx.log_ratio(y);
        }
        if self.ctx.side == Side::Right {
            if let Some(lp) = self.ctx.density.log_pdf_of_ln(ln_y()) {
                return lp - self.ctx.log_pdf_at_s;
            }
        }
        T::neg_infinity()
    }

    pub fn acceptance(&self, x: T) -> T {
        self.log_acceptance(x, self.map(x)).exp()
    }

    /// One tail variate from a stream of uniforms on [0,1).
    #[inline]
    pub fn sample(&self, uniform: &mut impl FnMut() -> T) -> Result<T, Error> {
        self.sample_counted(uniform).map(|(y, _)| y)
    }

    /// A variate and the number of proposals it took.
    pub fn sample_counted(&self, uniform: &mut impl FnMut() -> T) -> Result<(T, u64), Error> {
        if let TailStrategy::Icdf { .. } | TailStrategy::Iccdf { .. } = self.strategy {
            return Ok((self.map(uniform()), 1));
        }
        for attempt in 1..=MAX_ATTEMPTS {
            let x = uniform();
            let y = self.map(x);
            let v = uniform();
            if v < self.log_acceptance(x, y).exp() {
                return Ok((y, attempt));
            }
        }
        Err(Error::IterationCap(MAX_ATTEMPTS as usize))
    }

    /// Closed-form (or integrated) acceptance rate.
    pub fn predicted_efficiency(&self) -> T {
        let ratio = self.ctx.tail_mass / self.ctx.pdf_at_s;
        match &self.strategy {
            TailStrategy::Icdf { .. } | TailStrategy::Iccdf { .. } => T::one(),
            TailStrategy::Ipdf { alpha, .. } => ratio * self.c2.abs() / *alpha,
            TailStrategy::Iipdf { alpha, .. } => ratio * self.c2.abs() / *alpha,
            TailStrategy::Logarithmic { sigma } => ratio / *sigma,
            TailStrategy::Trigonometric { .. } => integrate_unit(|x| self.acceptance(x).min(T::one())),
            TailStrategy::Rational { alpha, sigma } | TailStrategy::ExponentialMap { alpha, sigma } => {
                *alpha * ratio / *sigma
            }
        }
    }

    /// Checks `0 <= Pr(x) <= 1` on a log grid over (1e-12, 1).
    pub fn verify_cover(&self) -> Result<(), Error> {
        if let TailStrategy::Icdf { .. } | TailStrategy::Iccdf { .. } = self.strategy {
            return Ok(());
        }
        // Pr comes from differences of log densities, so allow a few dozen ulps in f32
        let slack = T::one() + T::rel_tol(1e-9).max(T::epsilon() * T::c(64.0));
        for (x, pr) in cover_grid::<T>().map(|x| (x, self.acceptance(x))) {
            let y = self.map(x);
            if !y.is_finite() && pr.is_nan() {
                continue;
            }
            if pr.is_nan() || pr > slack || pr < T::zero() {
                return Err(Error::Covering(format!(
                    "{} tail at s = {}: Pr({x}) = {pr} at y = {y}",
                    self.strategy.name(),
                    self.ctx.s
                )));
            }
        }
        Ok(())
    }
}

/// The verification grid: `COVER_GRID` log-spaced points in (1e-12, 1).
pub fn cover_grid<T: Real>() -> impl Iterator<Item = T> {
    (0..COVER_GRID).map(|k| T::c(10f64.powf(-12.0 * (1.0 - (k as f64 + 0.5) / COVER_GRID as f64))))
}
