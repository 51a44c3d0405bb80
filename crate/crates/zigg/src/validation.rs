//! Kolmogorov–Smirnov tests and the replicate meta-test.
//!
//! The meta-test draws `m` independent samples, computes a KS p-value for
//! each, and tests those p-values for uniformity with a second KS test.

use rand_mt::Mt64;
use rayon::prelude::*;

use crate::rng::stream;
use crate::sampler::Sampler;
use crate::setup::Density;
use crate::specfun::reg_inc_gamma_upper;
use crate::Error;

/// Seeds for reproducible statistical checks.
pub const SEEDS: [u64; 16] = [
    0x5eed_0001,
    0x5eed_0002,
    0x5eed_0003,
    0x5eed_0004,
    0x5eed_0005,
    0x5eed_0006,
    0x5eed_0007,
    0x5eed_0008,
    0x5eed_0009,
    0x5eed_000a,
    0x5eed_000b,
    0x5eed_000c,
    0x5eed_000d,
    0x5eed_000e,
    0x5eed_000f,
    0x5eed_0010,
];

pub const MIN_REPLICATES: usize = 32;
pub const MIN_SAMPLE_SIZE: usize = 1 << 14;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KsReport {
    pub d_stat: f64,
    pub p_value: f64,
    pub n: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MetaReport {
    pub m: usize,
    pub n: usize,
    pub replicates: Vec<KsReport>,
    pub p_values: Vec<f64>,
    pub uniformity_p: f64,
}

/// `D_n = max_i max(i/n − F(x_i), F(x_i) − (i−1)/n)` over an ascending sample.
pub fn ks_statistic(sorted: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64, Error> {
    if sorted.is_empty() {
        return Err(Error::Parameter("KS statistic of an empty sample".into()));
    }
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        if f.is_nan() {
            return Err(Error::Domain(format!("cdf({x}) is NaN")));
        }
        d = d.max((i + 1) as f64 / n - f).max(f - i as f64 / n);
    }
    Ok(d)
}

/// Kolmogorov survival function `Q(λ) = 2 Σ (−1)^(k−1) exp(−2k²λ²)`.
pub fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 1.18 {
        // the alternating series converges slowly here; use the dual theta series for the cdf
        let a = std::f64::consts::PI.powi(2) / (8.0 * lambda * lambda);
        let mut sum = 0.0;
        for k in 1..=64 {
            let j = (2 * k - 1) as f64;
            let term = (-j * j * a).exp();
            sum += term;
            if term < 1e-17 * sum {
                break;
            }
        }
        let cdf = (2.0 * std::f64::consts::PI).sqrt() / lambda * sum;
        return (1.0 - cdf).clamp(0.0, 1.0);
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 * sum.abs().max(f64::MIN_POSITIVE) {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

pub fn ks_pvalue_asymptotic(d: f64, n: usize) -> f64 {
    kolmogorov_q((n as f64).sqrt() * d)
}

/// One-sample test; sorts `sample` in place.
pub fn ks_test(sample: &mut [f64], cdf: impl Fn(f64) -> f64) -> Result<KsReport, Error> {
    sample.sort_unstable_by(f64::total_cmp);
    let d = ks_statistic(sample, cdf)?;
    Ok(KsReport {
        d_stat: d,
        p_value: ks_pvalue_asymptotic(d, sample.len()),
        n: sample.len(),
    })
}

/// One-sample test over `x <= limit` only; values above `limit` (such as tail
/// draws that overflowed to +inf) are censored: they count toward `n`, and the
/// statistic includes the gap `|F_n(limit) − F(limit)|`. Sorts `sample` in place.
pub fn ks_test_censored(sample: &mut [f64], cdf: impl Fn(f64) -> f64, limit: f64) -> Result<KsReport, Error> {
    sample.sort_unstable_by(f64::total_cmp);
    let kept = sample.partition_point(|&x| x <= limit);
    if kept == sample.len() {
        return ks_test(sample, cdf);
    }
    let n = sample.len() as f64;
    let mut d = (kept as f64 / n - cdf(limit)).abs();
    for (i, &x) in sample[..kept].iter().enumerate() {
        let f = cdf(x);
        if f.is_nan() {
            return Err(Error::Domain(format!("cdf({x}) is NaN")));
        }
        d = d.max((i + 1) as f64 / n - f).max(f - i as f64 / n);
    }
    Ok(KsReport {
        d_stat: d,
        p_value: ks_pvalue_asymptotic(d, sample.len()),
        n: sample.len(),
    })
}

/// Two-sample test; sorts both samples in place.
pub fn ks_two_sample(a: &mut [f64], b: &mut [f64]) -> Result<KsReport, Error> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Parameter("KS test of an empty sample".into()));
    }
    a.sort_unstable_by(f64::total_cmp);
    b.sort_unstable_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    let ne = na * nb / (na + nb);
    Ok(KsReport {
        d_stat: d,
        p_value: kolmogorov_q(ne.sqrt() * d),
        n: (ne.round()) as usize,
    })
}

/// Meta-test over any sampling closure. Replicate `i` draws from `stream(seed, i)`.
pub fn meta_test_with<D, C>(cdf: C, draw: D, m: usize, n: usize, seed: u64) -> Result<MetaReport, Error>
where
    D: Fn(&mut Mt64) -> Result<f64, Error> + Sync,
    C: Fn(f64) -> f64 + Sync,
{
    if m < MIN_REPLICATES {
        return Err(Error::Parameter(format!("meta-test needs at least {MIN_REPLICATES} replicates, got {m}")));
    }
    if n < MIN_SAMPLE_SIZE {
        return Err(Error::Parameter(format!("meta-test needs samples of at least {MIN_SAMPLE_SIZE}, got {n}")));
    }
    let replicates = (0..m)
        .into_par_iter()
        .map(|i| {
            let mut src = stream(seed, i as u64);
            let mut sample = (0..n).map(|_| draw(&mut src)).collect::<Result<Vec<f64>, Error>>()?;
            ks_test(&mut sample, &cdf)
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let p_values: Vec<f64> = replicates.iter().map(|r| r.p_value).collect();
    let mut sorted = p_values.clone();
    let uniform = ks_test(&mut sorted, |p| p.clamp(0.0, 1.0))?;
    Ok(MetaReport {
        m,
        n,
        replicates,
        p_values,
        uniformity_p: uniform.p_value,
    })
}

pub fn meta_test(
    density: &(dyn Density<f64> + Sync),
    sampler: &Sampler<f64>,
    m: usize,
    n: usize,
    seed: u64,
) -> Result<MetaReport, Error> {
    meta_test_with(|x| density.cdf(x), |src| sampler.try_sample(src), m, n, seed)
}

/// Outcome of a test run once and, if it fails, repeated once on an independent seed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Retest {
    pub first_p: f64,
    pub second_p: Option<f64>,
    pub passed: bool,
}

/// Runs `test(seed)` on `seeds.0`; on a p-value below `threshold`, reruns on `seeds.1`.
pub fn with_retest(
    threshold: f64,
    seeds: (u64, u64),
    mut test: impl FnMut(u64) -> Result<f64, Error>,
) -> Result<Retest, Error> {
    let first_p = test(seeds.0)?;
    if first_p >= threshold {
        return Ok(Retest {
            first_p,
            second_p: None,
            passed: true,
        });
    }
    let second = test(seeds.1)?;
    Ok(Retest {
        first_p,
        second_p: Some(second),
        passed: second >= threshold,
    })
}

/// Pearson statistic and upper-tail p-value of observed counts against expected probabilities.
pub fn chi_squared_test(observed: &[u64], expected: &[f64]) -> Result<(f64, f64), Error> {
    if observed.len() != expected.len() || observed.len() < 2 {
        return Err(Error::Parameter("chi-squared test needs matching bins, at least two".into()));
    }
    let total: u64 = observed.iter().sum();
    let norm: f64 = expected.iter().sum();
    let stat: f64 = observed
        .iter()
        .zip(expected)
        .map(|(&o, &p)| {
            let e = total as f64 * p / norm;
            (o as f64 - e).powi(2) / e
        })
        .sum();
    let df = (observed.len() - 1) as f64;
    Ok((stat, reg_inc_gamma_upper(0.5 * df, 0.5 * stat)?))
}
