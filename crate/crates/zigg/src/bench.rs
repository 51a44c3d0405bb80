//! Throughput measurement against classical baselines.

use std::hint::black_box;
use std::time::Instant;

use crate::distributions::{make_sampler, DistributionSpec};
use crate::rng::{stream, BitSource};
use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Zigg,
    Baseline,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Zigg => "zigg",
            Method::Baseline => "baseline",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchResult {
    pub spec: DistributionSpec<f64>,
    pub method: Method,
    pub n_regions: usize,
    pub n_variates: usize,
    pub reps: usize,
    pub mean_ns: f64,
    pub sem_ns: f64,
    /// Cost of drawing one word and summing it, the floor under any method.
    pub floor_ns: f64,
}

pub const CSV_HEADER: &str = "family,params,method,n_regions,mean_ns,sem_ns,floor_ns";

impl BenchResult {
    pub fn csv_row(&self) -> String {
        let params: Vec<String> = self.spec.params().iter().map(|(k, v)| format!("{k}={v}")).collect();
        format!(
            "{},{},{},{},{:.4},{:.4},{:.4}",
            self.spec.family(),
            params.join(";"),
            self.method.name(),
            self.n_regions,
            self.mean_ns,
            self.sem_ns,
            self.floor_ns
        )
    }
}

#[inline]
fn unit<S: BitSource + ?Sized>(src: &mut S) -> f64 {
    (src.next_bits() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// `(r cos θ, r sin θ)` with `r = √(−2 ln u1)`, `θ = 2π u2`.
pub fn box_muller(u1: f64, u2: f64) -> (f64, f64) {
    let r = (-2.0 * u1.ln()).sqrt();
    let (s, c) = (2.0 * std::f64::consts::PI * u2).sin_cos();
    (r * c, r * s)
}

/// Classical generator for the families that have one: Box–Muller for the
/// normal, inverse-cdf transforms for Cauchy, exponential and Weibull.
#[derive(Clone, Debug)]
pub struct Baseline {
    spec: DistributionSpec<f64>,
    spare: Option<f64>,
}

impl Baseline {
    pub fn new(spec: DistributionSpec<f64>) -> Result<Self, Error> {
        spec.validate()?;
        match spec {
            DistributionSpec::Normal { .. }
            | DistributionSpec::Cauchy { .. }
            | DistributionSpec::Exponential { .. }
            | DistributionSpec::Weibull { .. } => Ok(Baseline { spec, spare: None }),
            other => Err(Error::Unsupported(format!("no baseline generator for {}", other.family()))),
        }
    }

    #[inline]
    pub fn sample<S: BitSource + ?Sized>(&mut self, src: &mut S) -> f64 {
        match self.spec {
            DistributionSpec::Normal { mean, stddev } => {
                if let Some(z) = self.spare.take() {
                    return mean + stddev * z;
                }
                let (a, b) = box_muller(1.0 - unit(src), unit(src));
                self.spare = Some(b);
                mean + stddev * a
            }
            DistributionSpec::Cauchy { mode, scale } => mode + scale * (std::f64::consts::PI * (unit(src) - 0.5)).tan(),
            DistributionSpec::Exponential { rate } => -(-unit(src)).ln_1p() / rate,
            DistributionSpec::Weibull { shape, scale } => scale * (-(-unit(src)).ln_1p()).powf(1.0 / shape),
            _ => unreachable!("checked in new"),
        }
    }
}

/// One baseline variate from a fresh generator.
pub fn baseline_sample<S: BitSource + ?Sized>(spec: &DistributionSpec<f64>, src: &mut S) -> Result<f64, Error> {
    Ok(Baseline::new(*spec)?.sample(src))
}

fn mean_sem(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn time_batches(n: usize, reps: usize, seed: u64, mut batch: impl FnMut(&mut rand_mt::Mt64, usize) -> f64) -> Vec<f64> {
    (0..reps)
        .map(|r| {
            let mut src = stream(seed, r as u64);
            let start = Instant::now();
            black_box(batch(&mut src, n));
            start.elapsed().as_nanos() as f64 / n as f64
        })
        .collect()
}

/// Times `reps` runs of `n` variates; rep `r` draws from `stream(seed, r)`.
pub fn run_bench(
    spec: &DistributionSpec<f64>,
    method: Method,
    n_regions: usize,
    n: usize,
    reps: usize,
    seed: u64,
) -> Result<BenchResult, Error> {
    if n < 1 << 16 {
        return Err(Error::Parameter(format!("benchmark batches need at least 2^16 variates, got {n}")));
    }
    if reps == 0 {
        return Err(Error::Parameter("at least one repetition is required".into()));
    }
    let times = match method {
        Method::Zigg => {
            let sampler = make_sampler(spec, n_regions)?;
            time_batches(n, reps, seed, |src, n| {
                let mut sink = 0.0;
                for _ in 0..n {
                    sink += sampler.sample(src);
                }
                sink
            })
        }
        Method::Baseline => {
            let base = Baseline::new(*spec)?;
            time_batches(n, reps, seed, |src, n| {
                let mut b = base.clone();
                let mut sink = 0.0;
                for _ in 0..n {
                    sink += b.sample(src);
                }
                sink
            })
        }
    };
    let floor = time_batches(n, reps, seed, |src, n| {
        let mut sink = 0u64;
        for _ in 0..n {
            sink = sink.wrapping_add(src.next_bits());
        }
        sink as f64
    });
    let (mean_ns, sem_ns) = mean_sem(&times);
    Ok(BenchResult {
        spec: *spec,
        method,
        n_regions,
        n_variates: n,
        reps,
        mean_ns,
        sem_ns,
        floor_ns: mean_sem(&floor).0,
    })
}

/// The variates a benchmark run would consume, for determinism checks.
pub fn bench_stream(spec: &DistributionSpec<f64>, method: Method, n_regions: usize, n: usize, seed: u64, rep: usize) -> Result<Vec<f64>, Error> {
    let mut src = stream(seed, rep as u64);
    match method {
        Method::Zigg => {
            let s = make_sampler(spec, n_regions)?;
            Ok((0..n).map(|_| s.sample(&mut src)).collect())
        }
        Method::Baseline => {
            let mut b = Baseline::new(*spec)?;
            Ok((0..n).map(|_| b.sample(&mut src)).collect())
        }
    }
}
