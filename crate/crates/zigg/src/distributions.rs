//! The nine shipped families: densities, distribution functions and the
//! slice/tail/peak wiring that turns each into a sampler.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::peak::PeakConfig;
use crate::sampler::{AsymmetricSampler, Sampler, ZigguratSampler};
use crate::scalar::Real;
use crate::setup::{Density, Direction, MonotoneSlice};
use crate::specfun::{erfc, log_beta, log_gamma, reg_inc_beta_split, reg_inc_gamma_lower, reg_inc_gamma_upper};
use crate::tail::{Fn1, TailContext, TailFactory, TailStrategy};
use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    Normal,
    Cauchy,
    Exponential,
    Gamma,
    ChiSquared,
    Weibull,
    LogNormal,
    StudentT,
    FisherF,
}

impl Family {
    pub const ALL: [Family; 9] = [
        Family::Normal,
        Family::Cauchy,
        Family::Exponential,
        Family::Gamma,
        Family::ChiSquared,
        Family::Weibull,
        Family::LogNormal,
        Family::StudentT,
        Family::FisherF,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Normal => "normal",
            Family::Cauchy => "cauchy",
            Family::Exponential => "exponential",
            Family::Gamma => "gamma",
            Family::ChiSquared => "chi-squared",
            Family::Weibull => "weibull",
            Family::LogNormal => "log-normal",
            Family::StudentT => "student-t",
            Family::FisherF => "fisher-f",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let key: String = s.to_ascii_lowercase().chars().filter(|c| c.is_ascii_alphanumeric()).collect();
        Ok(match key.as_str() {
            "normal" | "gaussian" => Family::Normal,
            "cauchy" => Family::Cauchy,
            "exponential" | "exp" => Family::Exponential,
            "gamma" => Family::Gamma,
            "chisquared" | "chi2" => Family::ChiSquared,
            "weibull" => Family::Weibull,
            "lognormal" => Family::LogNormal,
            "studentt" | "t" => Family::StudentT,
            "fisherf" | "f" => Family::FisherF,
            _ => return Err(Error::Parameter(format!("unknown family '{s}'"))),
        })
    }
}

/// A family with its parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DistributionSpec<T> {
    Normal { mean: T, stddev: T },
    Cauchy { mode: T, scale: T },
    Exponential { rate: T },
    Gamma { shape: T, scale: T },
    ChiSquared { dof: T },
    Weibull { shape: T, scale: T },
    LogNormal { normal_mean: T, normal_stddev: T },
    StudentT { dof: T },
    FisherF { dof1: T, dof2: T },
}

impl<T: Real> DistributionSpec<T> {
    pub fn normal(mean: T, stddev: T) -> Self {
        DistributionSpec::Normal { mean, stddev }
    }
    pub fn cauchy(mode: T, scale: T) -> Self {
        DistributionSpec::Cauchy { mode, scale }
    }
    pub fn exponential(rate: T) -> Self {
        DistributionSpec::Exponential { rate }
    }
    pub fn gamma(shape: T, scale: T) -> Self {
        DistributionSpec::Gamma { shape, scale }
    }
    pub fn chi_squared(dof: T) -> Self {
        DistributionSpec::ChiSquared { dof }
    }
    pub fn weibull(shape: T, scale: T) -> Self {
        DistributionSpec::Weibull { shape, scale }
    }
    pub fn log_normal(normal_mean: T, normal_stddev: T) -> Self {
        DistributionSpec::LogNormal { normal_mean, normal_stddev }
    }
    pub fn student_t(dof: T) -> Self {
        DistributionSpec::StudentT { dof }
    }
    pub fn fisher_f(dof1: T, dof2: T) -> Self {
        DistributionSpec::FisherF { dof1, dof2 }
    }

    /// Constructor defaults; Student's t has none for its degrees of freedom.
    pub fn default_for(family: Family) -> Option<Self> {
        let (zero, one) = (T::zero(), T::one());
        Some(match family {
            Family::Normal => Self::normal(zero, one),
            Family::Cauchy => Self::cauchy(zero, one),
            Family::Exponential => Self::exponential(one),
            Family::Gamma => Self::gamma(one, one),
            Family::ChiSquared => Self::chi_squared(one),
            Family::Weibull => Self::weibull(one, one),
            Family::LogNormal => Self::log_normal(zero, one),
            Family::StudentT => return None,
            Family::FisherF => Self::fisher_f(one, one),
        })
    }

    pub fn family(&self) -> Family {
        match self {
            DistributionSpec::Normal { .. } => Family::Normal,
            DistributionSpec::Cauchy { .. } => Family::Cauchy,
            DistributionSpec::Exponential { .. } => Family::Exponential,
            DistributionSpec::Gamma { .. } => Family::Gamma,
            DistributionSpec::ChiSquared { .. } => Family::ChiSquared,
            DistributionSpec::Weibull { .. } => Family::Weibull,
            DistributionSpec::LogNormal { .. } => Family::LogNormal,
            DistributionSpec::StudentT { .. } => Family::StudentT,
            DistributionSpec::FisherF { .. } => Family::FisherF,
        }
    }

    /// Named parameters in constructor order.
    pub fn params(&self) -> Vec<(&'static str, T)> {
        match *self {
            DistributionSpec::Normal { mean, stddev } => vec![("mean", mean), ("stddev", stddev)],
            DistributionSpec::Cauchy { mode, scale } => vec![("mode", mode), ("scale", scale)],
            DistributionSpec::Exponential { rate } => vec![("rate", rate)],
            DistributionSpec::Gamma { shape, scale } | DistributionSpec::Weibull { shape, scale } => {
                vec![("shape", shape), ("scale", scale)]
            }
            DistributionSpec::ChiSquared { dof } | DistributionSpec::StudentT { dof } => vec![("dof", dof)],
            DistributionSpec::LogNormal { normal_mean, normal_stddev } => {
                vec![("normal_mean", normal_mean), ("normal_stddev", normal_stddev)]
            }
            DistributionSpec::FisherF { dof1, dof2 } => vec![("dof1", dof1), ("dof2", dof2)],
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        let family = self.family();
        for (name, v) in self.params() {
            let location = matches!(name, "mean" | "mode" | "normal_mean");
            let ok = if location { v.is_finite() } else { v.is_finite() && v > T::zero() };
            if !ok {
                let need = if location { "finite" } else { "finite and > 0" };
                return Err(Error::Parameter(format!("{family} {name} must be {need}, got {v}")));
            }
        }
        Ok(())
    }

    /// Mode of the density; 0 where the density is unbounded there.
    pub fn mode_of(&self) -> T {
        let (zero, one, two) = (T::zero(), T::one(), T::c(2.0));
        match *self {
            DistributionSpec::Normal { mean, .. } => mean,
            DistributionSpec::Cauchy { mode, .. } => mode,
            DistributionSpec::Exponential { .. } | DistributionSpec::StudentT { .. } => zero,
            DistributionSpec::Gamma { shape, scale } => {
                if shape > one { (shape - one) * scale } else { zero }
            }
            DistributionSpec::ChiSquared { dof } => {
                if dof > two { dof - two } else { zero }
            }
            DistributionSpec::Weibull { shape, scale } => {
                if shape > one { scale * ((shape - one) / shape).powf(one / shape) } else { zero }
            }
            DistributionSpec::LogNormal { normal_mean, normal_stddev } => {
                (normal_mean - normal_stddev * normal_stddev).exp()
            }
            DistributionSpec::FisherF { dof1, dof2 } => {
                if dof1 > two { (dof1 - two) / dof1 * (dof2 / (dof2 + two)) } else { zero }
            }
        }
    }

    /// Order of growth `q` at the mode when the density is unbounded there.
    pub fn peak_order(&self) -> Option<T> {
        let (one, half) = (T::one(), T::c(0.5));
        match *self {
            DistributionSpec::Gamma { shape, .. } | DistributionSpec::Weibull { shape, .. } if shape < one => {
                Some(one - shape)
            }
            DistributionSpec::ChiSquared { dof } if dof < T::c(2.0) => Some(one - half * dof),
            DistributionSpec::FisherF { dof1, .. } if dof1 < T::c(2.0) => Some(one - half * dof1),
            _ => None,
        }
    }

    /// Lower end of the support.
    pub fn support_start(&self) -> T {
        match self.family() {
            Family::Normal | Family::Cauchy | Family::StudentT => T::neg_infinity(),
            _ => T::zero(),
        }
    }

    pub fn is_symmetric(&self) -> bool {
        matches!(self.family(), Family::Normal | Family::Cauchy | Family::StudentT)
    }

    pub fn prepare(&self) -> Result<Distribution<T>, Error> {
        Distribution::new(*self)
    }

    pub fn pdf(&self, x: T) -> Result<T, Error> {
        Ok(self.prepare()?.pdf(x))
    }

    pub fn log_pdf(&self, x: T) -> Result<T, Error> {
        Ok(self.prepare()?.log_pdf(x))
    }

    pub fn cdf(&self, x: T) -> Result<T, Error> {
        Ok(self.prepare()?.cdf(x))
    }
}

impl<T: Real> fmt::Display for DistributionSpec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.family())?;
        for (i, (k, v)) in self.params().iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k}={v}")?;
        }
        f.write_str(")")
    }
}

/// A validated spec with its normalizing constant, usable as a [`Density`].
#[derive(Clone, Copy, Debug)]
pub struct Distribution<T> {
    pub spec: DistributionSpec<T>,
    log_norm: T,
}

impl<T: Real> Distribution<T> {
    pub fn new(spec: DistributionSpec<T>) -> Result<Self, Error> {
        spec.validate()?;
        let half = T::c(0.5);
        let ln_sqrt_2pi = T::c(0.918_938_533_204_672_8);
        let log_norm = match spec {
            DistributionSpec::Normal { stddev, .. } => -stddev.ln() - ln_sqrt_2pi,
            DistributionSpec::Cauchy { scale, .. } => -(T::PI() * scale).ln(),
            DistributionSpec::Exponential { rate } => rate.ln(),
            DistributionSpec::Gamma { shape, scale } => -log_gamma(shape)? - shape * scale.ln(),
            DistributionSpec::ChiSquared { dof } => -log_gamma(half * dof)? - half * dof * T::LN_2(),
            DistributionSpec::Weibull { shape, scale } => shape.ln() - scale.ln(),
            DistributionSpec::LogNormal { normal_stddev, .. } => -normal_stddev.ln() - ln_sqrt_2pi,
            DistributionSpec::StudentT { dof } => -half * dof.ln() - log_beta(half * dof, half)?,
            DistributionSpec::FisherF { dof1, dof2 } => {
                half * dof1 * (dof1 / dof2).ln() - log_beta(half * dof1, half * dof2)?
            }
        };
        Ok(Distribution { spec, log_norm })
    }

    /// Gamma shape and scale for the gamma-like families.
    fn gamma_params(&self) -> Option<(T, T)> {
        match self.spec {
            DistributionSpec::Gamma { shape, scale } => Some((shape, scale)),
            DistributionSpec::ChiSquared { dof } => Some((T::c(0.5) * dof, T::c(2.0))),
            _ => None,
        }
    }

    /// Density at the left end of a `[0, ∞)` support, where the log form is `0·∞`.
    fn pdf_at_zero(&self) -> T {
        let one = T::one();
        let by_power = |p: T| {
            if p < one {
                T::infinity()
            } else if p == one {
                self.log_norm.exp()
            } else {
                T::zero()
            }
        };
        match self.spec {
            DistributionSpec::Exponential { rate } => rate,
            DistributionSpec::Gamma { shape, .. } | DistributionSpec::Weibull { shape, .. } => by_power(shape),
            DistributionSpec::ChiSquared { dof } => by_power(T::c(0.5) * dof),
            DistributionSpec::FisherF { dof1, .. } => by_power(T::c(0.5) * dof1),
            DistributionSpec::LogNormal { .. } => T::zero(),
            _ => unreachable!("two-sided families have no support end"),
        }
    }
}

impl<T: Real> Density<T> for Distribution<T> {
    fn pdf(&self, x: T) -> T {
        if x.is_nan() {
            return x;
        }
        if self.spec.support_start() == T::zero() {
            if x < T::zero() {
                return T::zero();
            }
            if x == T::zero() {
                return self.pdf_at_zero();
            }
        }
        self.log_pdf(x).exp()
    }

    fn has_log_pdf(&self) -> bool {
        true
    }

    fn log_pdf(&self, x: T) -> T {
        let (one, half) = (T::one(), T::c(0.5));
        if self.spec.support_start() == T::zero() && x <= T::zero() {
            return self.pdf_at_zero().ln();
        }
        if x.is_infinite() {
            return T::neg_infinity();
        }
        let c = self.log_norm;
        match self.spec {
            DistributionSpec::Normal { mean, stddev } => {
                let z = (x - mean) / stddev;
                c - half * z * z
            }
            DistributionSpec::Cauchy { mode, scale } => {
                let z = (x - mode) / scale;
                c - (z * z).ln_1p()
            }
            DistributionSpec::Exponential { rate } => c - rate * x,
            DistributionSpec::Gamma { .. } | DistributionSpec::ChiSquared { .. } => {
                let (shape, scale) = self.gamma_params().unwrap();
                c + (shape - one) * x.ln() - x / scale
            }
            DistributionSpec::Weibull { shape, scale } => {
                let z = x / scale;
                c + (shape - one) * z.ln() - z.powf(shape)
            }
            DistributionSpec::LogNormal { normal_mean, normal_stddev } => {
                let lx = x.ln();
                let z = (lx - normal_mean) / normal_stddev;
                c - lx - half * z * z
            }
            DistributionSpec::StudentT { dof } => c - half * (dof + one) * (x * x / dof).ln_1p(),
            DistributionSpec::FisherF { dof1, dof2 } => {
                c + (half * dof1 - one) * x.ln() - half * (dof1 + dof2) * (dof1 * x / dof2).ln_1p()
            }
        }
    }

    fn log_pdf_of_ln(&self, ln_x: T) -> Option<T> {
        let (one, half) = (T::one(), T::c(0.5));
        match self.spec {
            DistributionSpec::FisherF { dof1, dof2 } => {
                // ln(d1 x + d2) = ln x + ln d1 + ln(1 + d2/(d1 x))
                let tail = ((dof2 / dof1) * (-ln_x).exp()).ln_1p();
                let ln_denominator = ln_x + dof1.ln() + tail - dof2.ln();
                Some(self.log_norm + (half * dof1 - one) * ln_x - half * (dof1 + dof2) * ln_denominator)
            }
            _ => None,
        }
    }

    fn cdf(&self, x: T) -> T {
        let (zero, one, half) = (T::zero(), T::one(), T::c(0.5));
        if x.is_nan() {
            return x;
        }
        if self.spec.support_start() == zero && x <= zero {
            return zero;
        }
        if x == T::infinity() {
            return one;
        }
        let nan = |r: Result<T, Error>| r.unwrap_or(T::nan());
        match self.spec {
            DistributionSpec::Normal { mean, stddev } => half * erfc(-(x - mean) / (stddev * T::SQRT_2())),
            DistributionSpec::Cauchy { mode, scale } => {
                let z = (x - mode) / scale;
                if z >= zero {
                    one - self.ccdf(x)
                } else {
                    // atan(−1/z)/π is the lower tail for z < 0
                    (-one / z).atan() / T::PI()
                }
            }
            DistributionSpec::Exponential { rate } => -(-rate * x).exp_m1(),
            DistributionSpec::Gamma { .. } | DistributionSpec::ChiSquared { .. } => {
                let (shape, scale) = self.gamma_params().unwrap();
                nan(reg_inc_gamma_lower(shape, x / scale))
            }
            DistributionSpec::Weibull { shape, scale } => -(-(x / scale).powf(shape)).exp_m1(),
            DistributionSpec::LogNormal { normal_mean, normal_stddev } => {
                half * erfc(-(x.ln() - normal_mean) / (normal_stddev * T::SQRT_2()))
            }
            DistributionSpec::StudentT { .. } => {
                if x > zero {
                    one - self.ccdf(x)
                } else {
                    self.ccdf(-x)
                }
            }
            DistributionSpec::FisherF { dof1, dof2 } => {
                let den = dof1 * x + dof2;
                nan(reg_inc_beta_split(half * dof1, half * dof2, dof1 * x / den, dof2 / den))
            }
        }
    }

    fn ccdf(&self, x: T) -> T {
        let (zero, one, half) = (T::zero(), T::one(), T::c(0.5));
        if x.is_nan() {
            return x;
        }
        if self.spec.support_start() == zero && x <= zero {
            return one;
        }
        if x == T::infinity() {
            return zero;
        }
        let nan = |r: Result<T, Error>| r.unwrap_or(T::nan());
        match self.spec {
            DistributionSpec::Normal { mean, stddev } => half * erfc((x - mean) / (stddev * T::SQRT_2())),
            DistributionSpec::Cauchy { mode, scale } => {
                let z = (x - mode) / scale;
                if z >= zero {
                    // atan(1/0) = π/2 covers the median
                    (one / z).atan() / T::PI()
                } else {
                    one - self.cdf(x)
                }
            }
            DistributionSpec::Exponential { rate } => (-rate * x).exp(),
            DistributionSpec::Gamma { .. } | DistributionSpec::ChiSquared { .. } => {
                let (shape, scale) = self.gamma_params().unwrap();
                nan(reg_inc_gamma_upper(shape, x / scale))
            }
            DistributionSpec::Weibull { shape, scale } => (-(x / scale).powf(shape)).exp(),
            DistributionSpec::LogNormal { normal_mean, normal_stddev } => {
                half * erfc((x.ln() - normal_mean) / (normal_stddev * T::SQRT_2()))
            }
            DistributionSpec::StudentT { dof } => {
                if x < zero {
                    return one - self.ccdf(-x);
                }
                let den = dof + x * x;
                half * nan(reg_inc_beta_split(half * dof, half, dof / den, x * x / den))
            }
            DistributionSpec::FisherF { dof1, dof2 } => {
                let den = dof1 * x + dof2;
                nan(reg_inc_beta_split(half * dof2, half * dof1, dof2 / den, dof1 * x / den))
            }
        }
    }
}

fn arc1<T: Real>(f: impl Fn(T) -> T + Send + Sync + 'static) -> Fn1<T> {
    Arc::new(f)
}

/// Tail strategy for the right slice of each family.
fn tail_factory<T: Real>(dist: &Distribution<T>) -> TailFactory<T> {
    let (one, half, two) = (T::one(), T::c(0.5), T::c(2.0));
    let c = dist.log_norm;
    match dist.spec {
        DistributionSpec::Normal { mean, stddev } => Arc::new(move |_ctx: &TailContext<T>| {
            let var = stddev * stddev;
            Ok(TailStrategy::Ipdf {
                // ln f(y) = c − (y−μ)²/(2σ²)
                inverse_log_pdf: arc1(move |l: T| mean + (-two * var * (l - c)).max(T::zero()).sqrt()),
                log_pdf_slope: arc1(move |y: T| -(y - mean) / var),
                alpha: one,
            })
        }),
        DistributionSpec::Cauchy { mode, scale } => Arc::new(move |_ctx: &TailContext<T>| {
            Ok(TailStrategy::Iccdf {
                ccdf: arc1(move |y: T| (scale / (y - mode)).atan() / T::PI()),
                iccdf: arc1(move |p: T| mode + scale / (T::PI() * p).tan()),
            })
        }),
        DistributionSpec::Exponential { rate } => exponential_tail(rate),
        DistributionSpec::ChiSquared { dof } if dof == two => exponential_tail(half),
        DistributionSpec::Gamma { .. } | DistributionSpec::ChiSquared { .. } => {
            let (shape, scale) = dist.gamma_params().unwrap();
            Arc::new(move |ctx: &TailContext<T>| {
                let sigma = if shape <= one {
                    scale
                } else {
                    let s = ctx.s;
                    scale * s / (s - (shape - one) * scale)
                };
                Ok(TailStrategy::Logarithmic { sigma })
            })
        }
        DistributionSpec::Weibull { shape, scale } => Arc::new(move |_ctx: &TailContext<T>| {
            Ok(TailStrategy::Iccdf {
                ccdf: arc1(move |y: T| (-(y / scale).powf(shape)).exp()),
                iccdf: arc1(move |p: T| scale * (-p.ln()).powf(one / shape)),
            })
        }),
        DistributionSpec::LogNormal { normal_mean, normal_stddev } => Arc::new(move |ctx: &TailContext<T>| {
            let excess = ctx.s.ln() - normal_mean;
            if !(excess > T::zero()) {
                return Err(Error::Parameter(format!(
                    "log-normal tail start {} must exceed exp(normal_mean) for the 1/y tail",
                    ctx.s
                )));
            }
            Ok(TailStrategy::Iipdf {
                inverse_log_d: arc1(|l: T| (-l).exp()),
                log_d: arc1(|y: T| -y.ln()),
                log_d_slope: arc1(move |y: T| -one / y),
                alpha: normal_stddev * normal_stddev / excess,
            })
        }),
        DistributionSpec::StudentT { dof } => Arc::new(move |_ctx: &TailContext<T>| {
            let ln_dof = dof.ln();
            Ok(TailStrategy::Ipdf {
                // ln f(y) = c − (ν+1)/2 · ln(1 + y²/ν)
                inverse_log_pdf: arc1(move |l: T| {
                    let e = -two * (l - c) / (dof + one);
                    if e > T::c(40.0) {
                        (half * (e + ln_dof)).exp()
                    } else {
                        (dof * e.exp_m1()).max(T::zero()).sqrt()
                    }
                }),
                log_pdf_slope: arc1(move |y: T| {
                    if y.is_infinite() {
                        T::nan()
                    } else {
                        -(dof + one) / (y + dof / y)
                    }
                }),
                alpha: (dof + one) / dof,
            })
        }),
        DistributionSpec::FisherF { dof1, dof2 } => Arc::new(move |ctx: &TailContext<T>| {
            let s = ctx.s;
            let sigma = if dof1 <= two {
                s + dof2 / dof1 * (dof1 + dof2) / (dof2 + two)
            } else {
                s + s * dof2 * (dof1 + dof2) / (s * dof1 * (dof2 + two) - dof2 * (dof1 - two))
            };
            Ok(TailStrategy::Rational { alpha: half * dof2, sigma })
        }),
    }
}

fn exponential_tail<T: Real>(rate: T) -> TailFactory<T> {
    Arc::new(move |_ctx: &TailContext<T>| {
        Ok(TailStrategy::Iccdf {
            ccdf: arc1(move |y: T| (-rate * y).exp()),
            iccdf: arc1(move |p: T| -p.ln() / rate),
        })
    })
}

/// Rebuilds an error with the spec prefixed to its message.
fn in_context<T: Real>(spec: &DistributionSpec<T>, e: Error) -> Error {
    match e {
        Error::Domain(m) => Error::Domain(format!("{spec}: {m}")),
        Error::Parameter(m) => Error::Parameter(format!("{spec}: {m}")),
        Error::Covering(m) => Error::Covering(format!("{spec}: {m}")),
        Error::Setup(m) => Error::Setup(format!("{spec}: {m}")),
        Error::Unsupported(m) => Error::Unsupported(format!("{spec}: {m}")),
        other => other,
    }
}

/// The decreasing slice right of the mode.
pub fn right_slice<T: Real>(spec: &DistributionSpec<T>) -> Result<MonotoneSlice<T>, Error> {
    let dist = spec.prepare()?;
    let mode = spec.mode_of();
    let mass = if spec.is_symmetric() { T::c(0.5) } else { dist.ccdf(mode) };
    let mut slice = MonotoneSlice::new(Arc::new(dist), mode, T::infinity(), Direction::Decreasing, mass)
        .with_tail(tail_factory(&dist));
    if let Some(q) = spec.peak_order() {
        let config = match *spec {
            // β = 1/2 turns the proposal power into a square
            DistributionSpec::ChiSquared { dof } if dof == T::one() => PeakConfig::with_beta(q, T::c(0.5)),
            _ => PeakConfig::new(q),
        };
        slice = slice.with_peak(config);
    }
    Ok(slice)
}

/// The increasing slice between the support start and the mode, when the mode is interior.
pub fn left_slice<T: Real>(spec: &DistributionSpec<T>) -> Result<Option<MonotoneSlice<T>>, Error> {
    let dist = spec.prepare()?;
    let mode = spec.mode_of();
    let start = spec.support_start();
    if spec.is_symmetric() || !(mode > start) {
        return Ok(None);
    }
    Ok(Some(MonotoneSlice::new(Arc::new(dist), mode, start, Direction::Increasing, dist.cdf(mode))))
}

/// Builds the sampler for a family: symmetric for the two-sided families, a two-slice composite
/// when the mode is interior, a single decreasing slice otherwise.
pub fn make_sampler<T: Real>(spec: &DistributionSpec<T>, n: usize) -> Result<Sampler<T>, Error> {
    if n < 8 {
        return Err(Error::Parameter(format!("at least 8 regions are required, got {n}")));
    }
    let build = || -> Result<Sampler<T>, Error> {
        let right = right_slice(spec)?;
        if spec.is_symmetric() {
            return Ok(Sampler::Single(ZigguratSampler::new(&right, n, true)?));
        }
        let right = ZigguratSampler::new(&right, n, false)?;
        match left_slice(spec)? {
            Some(left) => Ok(Sampler::Asymmetric(AsymmetricSampler::new(ZigguratSampler::new(&left, n, false)?, right))),
            None => Ok(Sampler::Single(right)),
        }
    };
    build().map_err(|e| in_context(spec, e))
}

/// Non-fatal construction notes.
pub fn advisories<T: Real>(spec: &DistributionSpec<T>, n: usize) -> Vec<String> {
    let mut out = Vec::new();
    if let DistributionSpec::FisherF { dof1, dof2 } = *spec {
        if (dof1 <= T::c(0.2) || dof2 <= T::c(0.2)) && n < 1024 {
            out.push(format!("{spec}: degrees of freedom <= 0.2 need 1024 or more regions for good efficiency"));
        }
    }
    out
}

/// Shape grid shared by gamma, Weibull and Student's t.
pub const SHAPE_GRID: [f64; 7] = [0.1, 0.2, 0.5, 1.0, 2.5, 10.0, 100.0];
pub const LOG_NORMAL_GRID: [(f64, f64); 5] = [(0.0, 0.2), (0.0, 1.0), (0.0, 5.0), (-10.0, 1.0), (10.0, 1.0)];
pub const FISHER_GRID: [(f64, f64); 14] = [
    (0.2, 0.2),
    (0.5, 0.5),
    (1.0, 1.0),
    (2.0, 2.0),
    (10.0, 10.0),
    (100.0, 100.0),
    (0.2, 100.0),
    (1.0, 100.0),
    (2.0, 100.0),
    (10.0, 100.0),
    (100.0, 0.2),
    (100.0, 1.0),
    (100.0, 2.0),
    (100.0, 10.0),
];
pub const CHI_SQUARED_GRID: [f64; 3] = [1.0, 2.0, 5.0];

/// The benchmark parameter grid for one family.
pub fn parameter_grid(family: Family) -> Vec<DistributionSpec<f64>> {
    match family {
        Family::Normal => vec![DistributionSpec::normal(0.0, 1.0)],
        Family::Cauchy => vec![DistributionSpec::cauchy(0.0, 1.0)],
        Family::Exponential => vec![DistributionSpec::exponential(1.0)],
        Family::Gamma => SHAPE_GRID.iter().map(|&a| DistributionSpec::gamma(a, 1.0)).collect(),
        Family::ChiSquared => CHI_SQUARED_GRID.iter().map(|&k| DistributionSpec::chi_squared(k)).collect(),
        Family::Weibull => SHAPE_GRID.iter().map(|&a| DistributionSpec::weibull(a, 1.0)).collect(),
        Family::LogNormal => LOG_NORMAL_GRID.iter().map(|&(m, s)| DistributionSpec::log_normal(m, s)).collect(),
        Family::StudentT => SHAPE_GRID.iter().map(|&v| DistributionSpec::student_t(v)).collect(),
        Family::FisherF => FISHER_GRID.iter().map(|&(a, b)| DistributionSpec::fisher_f(a, b)).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type DistributionSpec = super::DistributionSpec<f64>;

    #[test]
    fn family_names_round_trip() {
        for f in Family::ALL {
            assert_eq!(f.name().parse::<Family>().unwrap(), f);
        }
        assert!("beta".parse::<Family>().is_err());
    }

    #[test]
    fn normalization_constants() {
        let n = DistributionSpec::normal(0.0, 1.0);
        assert!((n.pdf(0.0).unwrap() - 0.398_942_280_401_432_7).abs() < 1e-15);
        assert!((DistributionSpec::cauchy(0.0, 1.0).cdf(1.0).unwrap() - 0.75).abs() < 1e-15);
    }

    #[test]
    fn modes() {
        assert_eq!(DistributionSpec::normal(3.0, 2.0).mode_of(), 3.0);
        assert!((DistributionSpec::log_normal(0.0, 1.0).mode_of() - (-1f64).exp()).abs() < 1e-16);
        let g = DistributionSpec::gamma(0.5, 1.0);
        assert_eq!(g.mode_of(), 0.0);
        assert_eq!(g.peak_order(), Some(0.5));
        assert!(g.pdf(0.0).unwrap().is_infinite());
    }

    #[test]
    fn invalid_parameters() {
        assert!(DistributionSpec::gamma(0.0, 1.0).prepare().is_err());
        assert!(DistributionSpec::normal(0.0, -1.0).prepare().is_err());
        assert!(DistributionSpec::normal(f64::NAN, 1.0).prepare().is_err());
        assert!(make_sampler(&DistributionSpec::normal(0.0, 1.0), 4).is_err());
    }

    #[test]
    fn fisher_2_2_closed_form() {
        let d = DistributionSpec::fisher_f(2.0, 2.0).prepare().unwrap();
        for &y in &[0.1, 1.0, 3.0, 50.0] {
            assert!((d.cdf(y) - y / (1.0 + y)).abs() < 1e-14);
            assert!((d.ccdf(y) - 1.0 / (1.0 + y)).abs() < 1e-14);
        }
        // log-argument density agrees with the direct one where both are finite
        let direct = d.log_pdf(1e100);
        let via_ln = d.log_pdf_of_ln(1e100f64.ln()).unwrap();
        assert!((direct - via_ln).abs() < 1e-12 * direct.abs());
    }

    #[test]
    fn pdf_at_support_start() {
        assert!((DistributionSpec::gamma(1.0, 2.0).pdf(0.0).unwrap() - 0.5).abs() < 1e-14);
        assert_eq!(DistributionSpec::gamma(2.5, 1.0).pdf(0.0).unwrap(), 0.0);
        assert_eq!(DistributionSpec::weibull(1.0, 1.0).pdf(0.0).unwrap(), 1.0);
        assert!((DistributionSpec::fisher_f(2.0, 5.0).pdf(0.0).unwrap() - 1.0).abs() < 1e-14);
        assert_eq!(DistributionSpec::exponential(3.0).pdf(-1.0).unwrap(), 0.0);
    }

    #[test]
    fn composite_shapes() {
        let g = make_sampler(&DistributionSpec::gamma(2.5, 1.0), 64).unwrap();
        assert!(matches!(g, Sampler::Asymmetric(_)));
        let g = make_sampler(&DistributionSpec::gamma(0.5, 1.0), 64).unwrap();
        match g {
            Sampler::Single(z) => assert!(z.table.is_density_unbounded && z.peak.is_some()),
            _ => panic!("gamma(0.5) is a single slice"),
        }
        let n = make_sampler(&DistributionSpec::normal(0.0, 1.0), 64).unwrap();
        assert!(matches!(n, Sampler::Single(ref z) if z.symmetric));
    }
}
