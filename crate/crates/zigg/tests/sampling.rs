use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use zigg::distributions::right_slice;
use zigg::rng::{seeded, stream};
use zigg::sampler::parse_dump;
use zigg::{make_sampler, Density, Sampler, Spec, ZigguratSampler};

/// Forwards to a density and counts pdf evaluations.
struct Counting<D> {
    inner: D,
    calls: AtomicU64,
}

impl<D: Density<f64>> Density<f64> for Counting<D> {
    fn pdf(&self, x: f64) -> f64 {
        self.calls.fetch_add(1, Ordering::Relaxed);
        self.inner.pdf(x)
    }
    fn cdf(&self, x: f64) -> f64 {
        self.inner.cdf(x)
    }
    fn ccdf(&self, x: f64) -> f64 {
        self.inner.ccdf(x)
    }
    fn has_log_pdf(&self) -> bool {
        self.inner.has_log_pdf()
    }
    fn log_pdf(&self, x: f64) -> f64 {
        self.calls.fetch_add(1, Ordering::Relaxed);
        self.inner.log_pdf(x)
    }
}

#[test]
fn normal_fast_path_share_at_256_regions() {
    let spec = Spec::normal(0.0, 1.0);
    let counting = Arc::new(Counting {
        inner: spec.prepare().unwrap(),
        calls: AtomicU64::new(0),
    });
    let mut slice = right_slice(&spec).unwrap();
    slice.density = counting.clone();
    let z = ZigguratSampler::new(&slice, 256, true).unwrap();
    counting.calls.store(0, Ordering::Relaxed);

    let mut src = seeded(11);
    let draws = 1_000_000u64;
    let mut slow = 0u64;
    for _ in 0..draws {
        let before = counting.calls.load(Ordering::Relaxed);
        z.sample(&mut src);
        if counting.calls.load(Ordering::Relaxed) != before {
            slow += 1;
        }
    }
    let fast_share = 1.0 - slow as f64 / draws as f64;
    assert!(fast_share >= 0.98, "fast path share {fast_share}");
}

fn region_of(offsets: &[f64], d: f64) -> usize {
    // offsets fall from x[1] (tail start) to x[N] = 0
    offsets[1..].partition_point(|&o| o > d)
}

fn correlation(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    sab / (saa * sbb).sqrt()
}

#[test]
fn consecutive_outputs_are_uncorrelated() {
    let sampler = make_sampler(&Spec::normal(0.0, 1.0), 256).unwrap();
    let offsets = sampler.slices()[0].1.table.offsets();
    let n = 10_000_000;
    let mut src = seeded(12);
    let mags: Vec<f64> = (0..n).map(|_| sampler.sample(&mut src).abs()).collect();
    let regions: Vec<f64> = mags.iter().map(|&m| region_of(&offsets, m) as f64).collect();
    let bound = 4.0 / (n as f64).sqrt();
    let pairs = [
        ("region/region", correlation(&regions[..n - 1], &regions[1..])),
        ("region/magnitude", correlation(&regions[..n - 1], &mags[1..])),
        ("magnitude/region", correlation(&mags[..n - 1], &regions[1..])),
        ("magnitude/magnitude", correlation(&mags[..n - 1], &mags[1..])),
    ];
    for (name, r) in pairs {
        assert!(r.abs() < bound, "{name} lag-1 correlation {r} exceeds {bound}");
    }
}

#[test]
fn weibull_slice_selection_matches_mass_ratio() {
    let spec = Spec::weibull(1.5, 1.0);
    let d = spec.prepare().unwrap();
    let mode = spec.mode_of();
    let Sampler::Asymmetric(a) = make_sampler(&spec, 256).unwrap() else {
        panic!("weibull 1.5 should split at its mode");
    };
    let p = a.right_mass_ratio;
    assert!((p - d.ccdf(mode)).abs() < 1e-12);

    let n = 1_000_000;
    let mut src = stream(13, 0);
    let right = (0..n).filter(|_| a.try_sample(&mut src).unwrap() > mode).count();
    let se = (p * (1.0 - p) / n as f64).sqrt();
    let freq = right as f64 / n as f64;
    assert!((freq - p).abs() <= 3.0 * se, "right share {freq} vs {p} (se {se})");
}

#[test]
fn outputs_stay_in_support() {
    let mut src = seeded(14);
    for spec in [
        Spec::gamma(0.5, 1.0),
        Spec::gamma(2.5, 1.0),
        Spec::chi_squared(1.0),
        Spec::weibull(0.5, 1.0),
        Spec::log_normal(0.0, 1.0),
        Spec::fisher_f(1.0, 1.0),
        Spec::fisher_f(10.0, 10.0),
        Spec::exponential(2.0),
    ] {
        let s = make_sampler(&spec, 256).unwrap();
        for _ in 0..200_000 {
            let x = s.sample(&mut src);
            assert!(x >= 0.0 && !x.is_nan(), "{spec}: {x}");
        }
    }
}

#[test]
fn gamma_half_is_a_single_decreasing_slice() {
    let s = make_sampler(&Spec::gamma(0.5, 1.0), 256).unwrap();
    let slices = s.slices();
    assert_eq!(slices.len(), 1);
    let z = slices[0].1;
    assert!(z.table.is_density_unbounded);
    assert!(z.peak.is_some());
}

#[test]
fn normal_table_ends_at_the_mode() {
    for n in [8, 256, 1024] {
        let s = make_sampler(&Spec::normal(0.0, 1.0), n).unwrap();
        let t = &s.slices()[0].1.table;
        assert_eq!(t.x[n], 0.0);
    }
}

#[test]
fn chi_squared_one_table_flags() {
    let s = make_sampler(&Spec::chi_squared(1.0), 256).unwrap();
    let t = &s.slices()[0].1.table;
    assert!(t.is_density_unbounded);
    assert!(t.y[255].is_finite());
    assert!(t.x[255] > 0.0);
}

#[test]
fn dump_round_trips_and_is_deterministic() {
    for spec in [Spec::normal(0.0, 1.0), Spec::gamma(2.5, 1.0), Spec::chi_squared(1.0)] {
        let s = make_sampler(&spec, 256).unwrap();
        let text = s.dump();
        assert_eq!(text, make_sampler(&spec, 256).unwrap().dump());
        let (_, slices) = parse_dump(&text).unwrap();
        let live = s.slices();
        assert_eq!(slices.len(), live.len());
        for (dumped, (label, z)) in slices.iter().zip(live) {
            assert_eq!(dumped.label, label);
            assert_eq!(dumped.x.len(), z.table.x.len());
            for (a, b) in dumped.x.iter().zip(&z.table.x) {
                assert!(a == b || (a - b).abs() <= 1e-15 * b.abs(), "{a} vs {b}");
            }
            for (a, b) in dumped.y.iter().zip(&z.table.y) {
                assert!(a == b || (a - b).abs() <= 1e-15 * b.abs(), "{a} vs {b}");
            }
        }
    }
}

#[test]
fn same_seed_same_stream() {
    let s = make_sampler(&Spec::cauchy(1.0, 2.0), 1024).unwrap();
    let mut a = vec![0.0; 1000];
    let mut b = vec![0.0; 1000];
    s.fill(&mut seeded(15), &mut a);
    s.fill(&mut seeded(15), &mut b);
    assert_eq!(a, b);
}
