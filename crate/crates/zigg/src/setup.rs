//! Equal-area strip construction.
//!
//! Strip `i` of a slice ends at `x_i` where the area under the density
//! below height `f(x_i)` equals `i / N` of the slice mass. Each `x_i` is
//! bracketed by doubling away from the mode and refined by bisection.

use std::fmt;
use std::sync::Arc;

use crate::peak::PeakConfig;
use crate::scalar::Real;
use crate::tail::TailFactory;
use crate::Error;

/// A normalized univariate density with its distribution function.
pub trait Density<T: Real>: Send + Sync {
    fn pdf(&self, x: T) -> T;

    fn cdf(&self, x: T) -> T;

    /// Upper tail `1 − F(x)`; override where cancellation matters.
    fn ccdf(&self, x: T) -> T {
        T::one() - self.cdf(x)
    }

    /// Whether `log_pdf` is computed directly rather than as `ln(pdf)`.
    fn has_log_pdf(&self) -> bool {
        false
    }

    fn log_pdf(&self, x: T) -> T {
        self.pdf(x).ln()
    }

    /// `ln f(e^ln_x)` for arguments too large to represent; `None` when unsupported.
    fn log_pdf_of_ln(&self, _ln_x: T) -> Option<T> {
        None
    }
}

impl<T: Real, D: Density<T> + ?Sized> Density<T> for Arc<D> {
    fn pdf(&self, x: T) -> T {
        (**self).pdf(x)
    }
    fn cdf(&self, x: T) -> T {
        (**self).cdf(x)
    }
    fn ccdf(&self, x: T) -> T {
        (**self).ccdf(x)
    }
    fn has_log_pdf(&self) -> bool {
        (**self).has_log_pdf()
    }
    fn log_pdf(&self, x: T) -> T {
        (**self).log_pdf(x)
    }
    fn log_pdf_of_ln(&self, ln_x: T) -> Option<T> {
        (**self).log_pdf_of_ln(ln_x)
    }
}

/// Which way the density moves as x increases across the slice.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// Left of the mode; the tail, if any, is a left tail.
    Increasing,
    /// Right of the mode; the tail, if any, is a right tail.
    Decreasing,
}

impl Direction {
    /// +1 for decreasing slices, −1 for increasing ones: the side of the mode they cover.
    pub fn sign<T: Real>(self) -> T {
        match self {
            Direction::Increasing => -T::one(),
            Direction::Decreasing => T::one(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Direction::Increasing => "increasing",
            Direction::Decreasing => "decreasing",
        }
    }
}

/// One monotone half of a unimodal density.
#[derive(Clone)]
pub struct MonotoneSlice<T: Real> {
    pub density: Arc<dyn Density<T>>,
    pub mode: T,
    /// Far end of the support; ±infinity when unbounded.
    pub support_end: T,
    pub direction: Direction,
    /// Builds the tail strategy once the tail start is known.
    pub tail: Option<TailFactory<T>>,
    /// Present iff the density is unbounded at the mode.
    pub peak: Option<PeakConfig<T>>,
    /// Probability mass of the slice.
    pub mass: T,
}

impl<T: Real> fmt::Debug for MonotoneSlice<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MonotoneSlice")
            .field("mode", &self.mode)
            .field("support_end", &self.support_end)
            .field("direction", &self.direction)
            .field("has_tail", &self.tail.is_some())
            .field("peak", &self.peak)
            .field("mass", &self.mass)
            .finish()
    }
}

impl<T: Real> MonotoneSlice<T> {
    pub fn new(density: Arc<dyn Density<T>>, mode: T, support_end: T, direction: Direction, mass: T) -> Self {
        MonotoneSlice {
            density,
            mode,
            support_end,
            direction,
            tail: None,
            peak: None,
            mass,
        }
    }

    pub fn with_tail(mut self, tail: TailFactory<T>) -> Self {
        self.tail = Some(tail);
        self
    }

    pub fn with_peak(mut self, peak: PeakConfig<T>) -> Self {
        self.peak = Some(peak);
        self
    }

    pub fn is_support_bounded(&self) -> bool {
        self.support_end.is_finite()
    }

    /// Distance from the mode to the end of the support.
    pub fn reach(&self) -> T {
        (self.support_end - self.mode).abs()
    }

    /// Point at distance `d` from the mode on this slice's side.
    #[inline]
    pub fn at(&self, d: T) -> T {
        self.mode + self.direction.sign::<T>() * d
    }

    /// Mass beyond `x` on the far side of the slice.
    pub fn tail_mass(&self, x: T) -> T {
        match self.direction {
            Direction::Decreasing => self.density.ccdf(x),
            Direction::Increasing => self.density.cdf(x),
        }
    }

    fn validate(&self) -> Result<(), Error> {
        if !self.mode.is_finite() {
            return Err(Error::Setup(format!("mode must be finite, got {}", self.mode)));
        }
        if !(self.mass > T::zero() && self.mass <= T::one() + T::epsilon() * T::c(4.0)) {
            return Err(Error::Setup(format!("slice mass must lie in (0, 1], got {}", self.mass)));
        }
        let toward = (self.support_end - self.mode) * self.direction.sign::<T>();
        if !(toward > T::zero()) {
            return Err(Error::Setup(format!(
                "support end {} is not on the {} side of mode {}",
                self.support_end,
                self.direction.name(),
                self.mode
            )));
        }
        Ok(())
    }
}

/// Area under the density below height f(x), on this slice.
pub fn area<T: Real>(slice: &MonotoneSlice<T>, x: T) -> Result<T, Error> {
    let d = (x - slice.mode) * slice.direction.sign::<T>();
    if d < T::zero() || (slice.is_support_bounded() && d > slice.reach()) || d.is_nan() {
        return Err(Error::Domain(format!("x = {x} is outside the slice")));
    }
    Ok(area_x(slice, x))
}

// evaluated at x itself: rebuilding x from its offset loses digits far from a large mode
fn area_x<T: Real>(slice: &MonotoneSlice<T>, x: T) -> T {
    let d = (x - slice.mode).abs();
    if d == T::zero() {
        return slice.mass;
    }
    slice.tail_mass(x) + d * slice.density.pdf(x)
}

/// Brackets a sign change of `residue` (a function of x) by doubling away from the mode.
pub fn find_interval<T: Real>(slice: &MonotoneSlice<T>, residue: impl Fn(T) -> T) -> Result<(T, T), Error> {
    if slice.is_support_bounded() {
        return Ok((slice.mode, slice.support_end));
    }
    let limit = T::c(2f64.powi(300));
    let mut l = T::one();
    let mut a = slice.mode;
    let mut b = slice.at(l);
    let mut ra = residue(a);
    loop {
        let rb = residue(b);
        if ra * rb <= T::zero() {
            return Ok((a, b));
        }
        a = b;
        ra = rb;
        l = l * T::c(2.0);
        if l > limit || !l.is_finite() {
            return Err(Error::Setup("no sign change of the residue within 2^300 of the mode".into()));
        }
        b = slice.at(l);
    }
}

pub const BISECT_MAX_ITER: usize = 200;

/// Bisection to relative width `tol` on x (or until the midpoint stops moving).
pub fn bisect<T: Real>(residue: impl Fn(T) -> T, a: T, b: T, tol: T) -> T {
    let (mut lo, mut hi) = (a, b);
    let mut rlo = residue(lo);
    if rlo == T::zero() {
        return lo;
    }
    if residue(hi) == T::zero() {
        return hi;
    }
    for _ in 0..BISECT_MAX_ITER {
        let mid = lo + (hi - lo) * T::c(0.5);
        if mid == lo || mid == hi {
            break;
        }
        let rm = residue(mid);
        if rm == T::zero() {
            return mid;
        }
        if (rm < T::zero()) == (rlo < T::zero()) {
            lo = mid;
            rlo = rm;
        } else {
            hi = mid;
        }
        if (hi - lo).abs() <= tol * lo.abs().max(hi.abs()) {
            break;
        }
    }
    lo + (hi - lo) * T::c(0.5)
}

/// Strip coordinates of one slice.
#[derive(Clone, Debug, PartialEq)]
pub struct ZigguratTable<T> {
    pub n: usize,
    pub mode: T,
    pub direction: Direction,
    pub mass: T,
    /// `x[0..=n]`; `x[n]` is the mode, `x[1]` the tail start. `x[0]` is the support end,
    /// or for unbounded support the width of a rectangle holding the base strip's area.
    pub x: Vec<T>,
    /// Density at each `x[i]`; `y[0]` is 0 and `y[n]` may be infinite.
    pub y: Vec<T>,
    pub is_density_unbounded: bool,
    pub is_support_bounded: bool,
    /// Largest |strip area − mass/N| / (mass/N).
    pub max_area_residual: T,
}

impl<T: Real> ZigguratTable<T> {
    pub fn tail_start(&self) -> T {
        self.x[1]
    }

    /// |x[N−1] − m| when the density is unbounded.
    pub fn peak_width(&self) -> Option<T> {
        self.is_density_unbounded.then(|| (self.x[self.n - 1] - self.mode).abs())
    }

    /// Distance of each coordinate from the mode.
    pub fn offsets(&self) -> Vec<T> {
        self.x.iter().map(|&x| (x - self.mode).abs()).collect()
    }
}

/// Solves the equal-area coordinates for `n` strips.
pub fn build_table<T: Real>(slice: &MonotoneSlice<T>, n: usize) -> Result<ZigguratTable<T>, Error> {
    if n < 2 {
        return Err(Error::Parameter(format!("need at least 2 regions, got {n}")));
    }
    slice.validate()?;
    let m = slice.mode;
    let f_m = slice.density.pdf(m);
    let unbounded = f_m.is_infinite() || slice.peak.is_some();
    if f_m.is_infinite() && slice.peak.is_none() {
        return Err(Error::Setup("density is unbounded at the mode but no algebraic order q was given".into()));
    }
    let nf = T::c(n as f64);
    let mut x = vec![T::zero(); n + 1];
    let mut y = vec![T::zero(); n + 1];
    x[n] = m;
    y[n] = if unbounded { T::infinity() } else { f_m };
    // cumulative areas A(x_i); near a narrow mode A moves fast in x, so bisect to the last bit
    let mut cumulative = vec![T::zero(); n + 1];
    cumulative[n] = slice.mass;
    for i in 1..n {
        let target = T::c(i as f64) * slice.mass / nf;
        let residue = |x: T| area_x(slice, x) - target;
        let (a, b) = find_interval(slice, residue)?;
        let xi = bisect(residue, a, b, T::zero());
        let r = residue(xi);
        if !r.is_finite() {
            return Err(Error::Setup(format!("area residue is not finite at x = {xi} (strip {i})")));
        }
        cumulative[i] = r + target;
        x[i] = xi;
        y[i] = slice.density.pdf(xi);
    }
    let worst = strip_residual(&cumulative, slice.mass / nf);
    if slice.is_support_bounded() {
        x[0] = slice.support_end;
    } else {
        x[0] = slice.at(slice.mass / nf / y[1]);
    }
    for i in 1..n {
        if !(y[i] < y[i + 1]) || !y[i].is_finite() || !(y[i] > T::zero()) {
            return Err(Error::Setup(format!(
                "density is not strictly monotone over the strips: f(x[{i}]) = {}, f(x[{}]) = {}",
                y[i],
                i + 1,
                y[i + 1]
            )));
        }
    }
    // a strip area is a difference of cumulative areas near the slice mass, so the
    // measurement itself carries about eps·N of relative noise; f32 cannot reach 1e-9
    let floor = T::epsilon() * T::c(64.0 * n as f64);
    if worst > T::rel_tol(1e-9).max(floor) {
        return Err(Error::Setup(format!("equal-area residual {worst} exceeds tolerance")));
    }
    Ok(ZigguratTable {
        n,
        mode: m,
        direction: slice.direction,
        mass: slice.mass,
        x,
        y,
        is_density_unbounded: unbounded,
        is_support_bounded: slice.is_support_bounded(),
        max_area_residual: worst,
    })
}

/// Largest |strip area − v| / v given cumulative areas with `A_0 = 0`.
fn strip_residual<T: Real>(cumulative: &[T], v: T) -> T {
    cumulative.windows(2).fold(T::zero(), |w, p| w.max(((p[1] - p[0]) - v).abs() / v))
}

/// Relative area error of every strip, recomputed from scratch.
pub fn area_residuals<T: Real>(slice: &MonotoneSlice<T>, table: &ZigguratTable<T>) -> Vec<T> {
    let v = slice.mass / T::c(table.n as f64);
    let cumulative: Vec<T> = (0..=table.n)
        .map(|i| match i {
            0 => T::zero(),
            i if i == table.n => slice.mass,
            i => area_x(slice, table.x[i]),
        })
        .collect();
    cumulative.windows(2).map(|p| ((p[1] - p[0]) - v).abs() / v).collect()
}
