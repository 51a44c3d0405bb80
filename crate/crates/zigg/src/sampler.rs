//! The generalized Ziggurat loop and the two-slice composite.
//!
//! Bit layout of the first word of a draw: the low `k = ceil(log2 N)` bits
//! pick the region (redrawn when `>= N`), the next bit is the sign for
//! symmetric slices, and the remaining high bits form the uniform. Retries
//! inside a region take the uniform from the high bits of a fresh word.

use std::fmt::Write as _;
use std::sync::Arc;

use crate::peak::{peak_spec_for, PeakSampler};
use crate::rng::{fixed_real, BitSource, CanonicalFloatGen};
use crate::scalar::Real;
use crate::setup::{build_table, Density, Direction, MonotoneSlice, ZigguratTable};
use crate::tail::{Side, TailContext, TailSampler};
use crate::Error;

/// Which uniform feeds tail and peak mappings.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TailUniform {
    /// Full-precision uniforms; the correct choice.
    Canonical,
    /// `k·2^-b` uniforms, which truncate the far tail. Only for demonstrating that flaw.
    Fixed,
}

#[derive(Clone)]
pub struct ZigguratSampler<T: Real> {
    pub table: ZigguratTable<T>,
    pub tail: Option<TailSampler<T>>,
    pub peak: Option<PeakSampler<T>>,
    pub symmetric: bool,
    density: Arc<dyn Density<T>>,
    n: usize,
    mode: T,
    dir: T,
    index_bits: u32,
    sign_bits: u32,
    // offsets from the mode; w[n] is −1 when the density is unbounded so the fast path never fires there
    w: Vec<T>,
    y: Vec<T>,
    scaled64: Vec<T>,
    scaled32: Vec<T>,
    canon64: CanonicalFloatGen<T>,
    canon32: Option<CanonicalFloatGen<T>>,
    tail_uniform: TailUniform,
}

impl<T: Real> std::fmt::Debug for ZigguratSampler<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ZigguratSampler")
            .field("n", &self.n)
            .field("mode", &self.mode)
            .field("symmetric", &self.symmetric)
            .field("tail", &self.tail)
            .field("peak", &self.peak)
            .finish()
    }
}

fn ceil_log2(n: usize) -> u32 {
    usize::BITS - (n - 1).leading_zeros()
}

impl<T: Real> ZigguratSampler<T> {
    /// Builds the table, the tail sampler and, for unbounded densities, the peak sampler.
    /// A symmetric sampler mirrors the slice through its mode using one sign bit.
    pub fn new(slice: &MonotoneSlice<T>, n: usize, symmetric: bool) -> Result<Self, Error> {
        let table = build_table(slice, n)?;
        let density = slice.density.clone();
        let tail = if slice.is_support_bounded() {
            None
        } else {
            let factory = slice
                .tail
                .as_ref()
                .ok_or_else(|| Error::Setup("unbounded support needs a tail strategy".into()))?;
            let side = match slice.direction {
                Direction::Decreasing => Side::Right,
                Direction::Increasing => Side::Left,
            };
            let ctx = TailContext::new(density.clone(), table.tail_start(), side)?;
            let strategy = factory(&ctx)?;
            Some(TailSampler::new(ctx, strategy)?)
        };
        let peak = match (table.peak_width(), slice.peak) {
            (Some(b), Some(config)) => Some(PeakSampler {
                spec: peak_spec_for(&*density, slice.mode, config, b, slice.direction)?,
                density: density.clone(),
            }),
            _ => None,
        };
        Self::assemble(table, density, tail, peak, symmetric)
    }

    fn assemble(
        table: ZigguratTable<T>,
        density: Arc<dyn Density<T>>,
        tail: Option<TailSampler<T>>,
        peak: Option<PeakSampler<T>>,
        symmetric: bool,
    ) -> Result<Self, Error> {
        let n = table.n;
        let index_bits = ceil_log2(n);
        let sign_bits = symmetric as u32;
        if index_bits + sign_bits + 8 > 32 {
            return Err(Error::Parameter(format!("{n} regions leave too few uniform bits")));
        }
        let mut w = table.offsets();
        if table.is_density_unbounded {
            w[n] = -T::one();
        }
        let scale = |bits: u32| -> Vec<T> {
            let k = T::exp2_neg(bits - index_bits - sign_bits);
            w.iter().map(|&wi| wi * k).collect()
        };
        let scaled64 = scale(64);
        let scaled32 = scale(32);
        let canon32 = if T::FRACTION_BITS < 32 { Some(CanonicalFloatGen::new(32)?) } else { None };
        Ok(ZigguratSampler {
            n,
            mode: table.mode,
            dir: table.direction.sign(),
            index_bits,
            sign_bits,
            y: table.y.clone(),
            w,
            scaled64,
            scaled32,
            canon64: CanonicalFloatGen::new(64)?,
            canon32,
            table,
            tail,
            peak,
            symmetric,
            density,
            tail_uniform: TailUniform::Canonical,
        })
    }

    /// Switches the uniform used by tail and peak mappings.
    pub fn with_tail_uniform(mut self, kind: TailUniform) -> Self {
        self.tail_uniform = kind;
        self
    }

    pub fn density(&self) -> &Arc<dyn Density<T>> {
        &self.density
    }

    #[inline]
    fn canonical<S: BitSource + ?Sized>(&self, src: &mut S) -> T {
        if self.tail_uniform == TailUniform::Fixed {
            return fixed_real(src);
        }
        if S::BITS == 64 {
            self.canon64.sample(src)
        } else {
            self.canon32.as_ref().expect("32-bit sources need a format with fewer than 32 fraction bits").sample(src)
        }
    }

    #[inline]
    fn place(&self, d: T, neg: bool) -> T {
        let d = if neg { -d } else { d };
        self.mode + self.dir * d
    }

    /// One variate. Panics only if a tail or peak loop exhausts its iteration cap.
    #[inline]
    pub fn sample<S: BitSource + ?Sized>(&self, src: &mut S) -> T {
        match self.try_sample(src) {
            Ok(v) => v,
            Err(e) => panic!("{e}"),
        }
    }

    #[inline]
    pub fn try_sample<S: BitSource + ?Sized>(&self, src: &mut S) -> Result<T, Error> {
        let scaled = if S::BITS == 64 { &self.scaled64 } else { &self.scaled32 };
        let mask = (1u64 << self.index_bits) - 1;
        let shift = self.index_bits + self.sign_bits;
        let (j, mut word) = loop {
            let w = src.next_bits();
            let j = (w & mask) as usize;
            if j < self.n {
                break (j, w);
            }
        };
        let neg = self.symmetric && (word >> self.index_bits) & 1 == 1;
        loop {
            let d = T::from_u64_lossy(word >> shift) * scaled[j];
            if d <= self.w[j + 1] {
                return Ok(self.place(d, neg));
            }
            if j == self.n - 1 {
                if let Some(peak) = &self.peak {
                    let y = peak.sample(&mut || self.canonical(src))?;
                    return Ok(self.reflect(y, neg));
                }
            }
            if j == 0 {
                if let Some(tail) = &self.tail {
                    let y = tail.sample(&mut || self.canonical(src))?;
                    return Ok(self.reflect(y, neg));
                }
            }
            let v: T = fixed_real(src);
            let x = self.mode + self.dir * d;
            if v * (self.y[j + 1] - self.y[j]) < self.density.pdf(x) - self.y[j] {
                return Ok(self.place(d, neg));
            }
            word = src.next_bits();
        }
    }

    #[inline]
    fn reflect(&self, y: T, neg: bool) -> T {
        if neg {
            self.mode - (y - self.mode)
        } else {
            y
        }
    }

    /// Structured text form of the table and its tail and peak parameters.
    pub fn dump(&self, label: &str) -> String {
        let t = &self.table;
        let mut out = String::new();
        let _ = writeln!(out, "[slice {label}]");
        let _ = writeln!(out, "n_regions = {}", t.n);
        let _ = writeln!(out, "direction = {}", t.direction.name());
        let _ = writeln!(out, "mode = {:.16e}", t.mode);
        let _ = writeln!(out, "mass = {:.16e}", t.mass);
        let _ = writeln!(out, "symmetric = {}", self.symmetric);
        let _ = writeln!(out, "is_density_unbounded = {}", t.is_density_unbounded);
        let _ = writeln!(out, "is_support_bounded = {}", t.is_support_bounded);
        let _ = writeln!(out, "max_area_residual = {:.16e}", t.max_area_residual);
        match &self.tail {
            Some(tail) => {
                let _ = write!(out, "tail = {}", tail.strategy.name());
                for (k, v) in tail.strategy.params() {
                    let _ = write!(out, " {k}={v:.16e}");
                }
                let _ = writeln!(out);
            }
            None => {
                let _ = writeln!(out, "tail = none");
            }
        }
        match &self.peak {
            Some(p) => {
                let s = &p.spec;
                let _ = writeln!(
                    out,
                    "peak = q={:.16e} beta={:.16e} b={:.16e} h_b={:.16e} h_max={:.16e} A={:.16e}",
                    s.q, s.beta, s.b, s.h_b, s.h_max, s.a
                );
            }
            None => {
                let _ = writeln!(out, "peak = none");
            }
        }
        for (i, x) in t.x.iter().enumerate() {
            let _ = writeln!(out, "x[{i}] = {x:.16e}");
        }
        for (i, y) in t.y.iter().enumerate() {
            let _ = writeln!(out, "y[{i}] = {y:.16e}");
        }
        out
    }
}

/// Picks the right slice with probability equal to its share of the mass.
#[derive(Clone, Debug)]
pub struct AsymmetricSampler<T: Real> {
    pub left: ZigguratSampler<T>,
    pub right: ZigguratSampler<T>,
    pub right_mass_ratio: T,
}

impl<T: Real> AsymmetricSampler<T> {
    pub fn new(left: ZigguratSampler<T>, right: ZigguratSampler<T>) -> Self {
        let ratio = right.table.mass / (left.table.mass + right.table.mass);
        AsymmetricSampler {
            left,
            right,
            right_mass_ratio: ratio,
        }
    }

    #[inline]
    pub fn try_sample<S: BitSource + ?Sized>(&self, src: &mut S) -> Result<T, Error> {
        let u = if S::BITS == 64 {
            self.right.canon64.sample(src)
        } else {
            self.right.canonical(src)
        };
        if u < self.right_mass_ratio {
            self.right.try_sample(src)
        } else {
            self.left.try_sample(src)
        }
    }
}

/// Any shipped sampler shape.
#[derive(Clone, Debug)]
pub enum Sampler<T: Real> {
    Single(ZigguratSampler<T>),
    Asymmetric(AsymmetricSampler<T>),
}

impl<T: Real> Sampler<T> {
    #[inline]
    pub fn try_sample<S: BitSource + ?Sized>(&self, src: &mut S) -> Result<T, Error> {
        match self {
            Sampler::Single(z) => z.try_sample(src),
            Sampler::Asymmetric(a) => a.try_sample(src),
        }
    }

    #[inline]
    pub fn sample<S: BitSource + ?Sized>(&self, src: &mut S) -> T {
        match self.try_sample(src) {
            Ok(v) => v,
            Err(e) => panic!("{e}"),
        }
    }

    /// Fills `out` with variates.
    pub fn fill<S: BitSource + ?Sized>(&self, src: &mut S, out: &mut [T]) {
        for v in out {
            *v = self.sample(src);
        }
    }

    /// The slices as (label, sampler) pairs.
    pub fn slices(&self) -> Vec<(&'static str, &ZigguratSampler<T>)> {
        match self {
            Sampler::Single(z) => vec![(if z.symmetric { "symmetric" } else { "single" }, z)],
            Sampler::Asymmetric(a) => vec![("left", &a.left), ("right", &a.right)],
        }
    }

    pub fn with_tail_uniform(self, kind: TailUniform) -> Self {
        match self {
            Sampler::Single(z) => Sampler::Single(z.with_tail_uniform(kind)),
            Sampler::Asymmetric(a) => Sampler::Asymmetric(AsymmetricSampler {
                left: a.left.with_tail_uniform(kind),
                right: a.right.with_tail_uniform(kind),
                right_mass_ratio: a.right_mass_ratio,
            }),
        }
    }

    pub fn dump(&self) -> String {
        self.slices().iter().map(|(label, z)| z.dump(label)).collect()
    }
}

/// One slice read back from a dump.
#[derive(Clone, Debug, PartialEq)]
pub struct DumpedSlice {
    pub label: String,
    pub fields: Vec<(String, String)>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl DumpedSlice {
    pub fn field(&self, key: &str) -> Option<&str> {
        self.fields.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

/// Parses the text produced by `dump`, preceded by any `key = value` header lines.
pub fn parse_dump(text: &str) -> Result<(Vec<(String, String)>, Vec<DumpedSlice>), Error> {
    let bad = |line: &str| Error::Parameter(format!("malformed dump line: {line}"));
    let mut header = Vec::new();
    let mut slices: Vec<DumpedSlice> = Vec::new();
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
        if let Some(label) = line.strip_prefix("[slice ").and_then(|l| l.strip_suffix(']')) {
            slices.push(DumpedSlice {
                label: label.to_string(),
                fields: Vec::new(),
                x: Vec::new(),
                y: Vec::new(),
            });
            continue;
        }
        let (key, value) = line.split_once(" = ").ok_or_else(|| bad(line))?;
        let Some(cur) = slices.last_mut() else {
            header.push((key.to_string(), value.to_string()));
            continue;
        };
        let array = |prefix: &str| key.strip_prefix(prefix).and_then(|k| k.strip_suffix(']')).map(|i| i.parse::<usize>());
        if let Some(i) = array("x[") {
            let i = i.map_err(|_| bad(line))?;
            if i != cur.x.len() {
                return Err(bad(line));
            }
            cur.x.push(value.parse().map_err(|_| bad(line))?);
        } else if let Some(i) = array("y[") {
            let i = i.map_err(|_| bad(line))?;
            if i != cur.y.len() {
                return Err(bad(line));
            }
            cur.y.push(value.parse().map_err(|_| bad(line))?);
        } else {
            cur.fields.push((key.to_string(), value.to_string()));
        }
    }
    Ok((header, slices))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{seeded, ReplaySource};
    use crate::tail::TailStrategy;

    struct Exp1;
    impl Density<f64> for Exp1 {
        fn pdf(&self, x: f64) -> f64 {
            if x < 0.0 { 0.0 } else { (-x).exp() }
        }
        fn cdf(&self, x: f64) -> f64 {
            -(-x.max(0.0)).exp_m1()
        }
        fn ccdf(&self, x: f64) -> f64 {
            (-x.max(0.0)).exp()
        }
    }

    fn exp_sampler(n: usize) -> ZigguratSampler<f64> {
        let slice = MonotoneSlice::new(Arc::new(Exp1), 0.0, f64::INFINITY, Direction::Decreasing, 1.0).with_tail(
            Arc::new(|_ctx: &TailContext<f64>| {
                Ok(TailStrategy::Iccdf {
                    ccdf: Arc::new(|x: f64| (-x).exp()),
                    iccdf: Arc::new(|p: f64| -p.ln()),
                })
            }),
        );
        ZigguratSampler::new(&slice, n, false).unwrap()
    }

    #[test]
    fn ceil_log2_values() {
        assert_eq!(ceil_log2(256), 8);
        assert_eq!(ceil_log2(4092), 12);
        assert_eq!(ceil_log2(1024), 10);
    }

    #[test]
    fn fast_path_uses_high_bits() {
        let z = exp_sampler(256);
        // region 255 (top strip), uniform from bits 8.. = 0 -> the mode
        let mut src = ReplaySource::<64>::new(vec![255]);
        assert_eq!(z.sample(&mut src), 0.0);
        // region 5, uniform = 1/2 of the strip's width: inside x[6] so accepted at once
        let word = (1u64 << 63) | 5;
        let mut src = ReplaySource::<64>::new(vec![word]);
        let v = z.sample(&mut src);
        assert_eq!(src.consumed(), 1);
        assert!((v - 0.5 * z.table.x[5]).abs() < 1e-12 * z.table.x[5]);
    }

    #[test]
    fn out_of_range_index_redrawn() {
        let z = exp_sampler(200);
        // 8 index bits, 255 >= 200 is discarded
        let mut src = ReplaySource::<64>::new(vec![255, 3]);
        let v = z.sample(&mut src);
        assert_eq!(src.consumed(), 2);
        assert_eq!(v, 0.0);
    }

    #[test]
    fn samples_are_in_support_and_mean_is_one() {
        let z = exp_sampler(256);
        let mut src = seeded(11);
        let n = 200_000;
        let mut sum = 0.0;
        for _ in 0..n {
            let v = z.sample(&mut src);
            assert!(v >= 0.0);
            sum += v;
        }
        assert!((sum / n as f64 - 1.0).abs() < 4.0 * (1.0 / n as f64).sqrt() * 1.5);
    }

    #[test]
    fn dump_round_trips() {
        let z = exp_sampler(8);
        let text = z.dump("single");
        let (_, slices) = parse_dump(&text).unwrap();
        assert_eq!(slices.len(), 1);
        assert_eq!(slices[0].x, z.table.x);
        assert_eq!(slices[0].y, z.table.y);
        assert_eq!(slices[0].field("tail"), Some("iccdf"));
        assert_eq!(slices[0].field("n_regions"), Some("8"));
    }
}
