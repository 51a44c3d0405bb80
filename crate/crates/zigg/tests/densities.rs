use proptest::prelude::*;
use zigg::distributions::right_slice;
use zigg::quadrature::integrate;
use zigg::tail::{Side, TailContext, TailSampler};
use zigg::{Density, Spec};

fn points() -> Vec<Spec> {
    vec![
        Spec::normal(0.0, 1.0),
        Spec::normal(3.0, 2.0),
        Spec::normal(-1.0, 0.1),
        Spec::cauchy(0.0, 1.0),
        Spec::cauchy(2.0, 0.5),
        Spec::cauchy(-3.0, 4.0),
        Spec::exponential(1.0),
        Spec::exponential(0.1),
        Spec::exponential(5.0),
        Spec::gamma(0.5, 1.0),
        Spec::gamma(2.5, 1.0),
        Spec::gamma(10.0, 2.0),
        Spec::chi_squared(1.0),
        Spec::chi_squared(3.0),
        Spec::chi_squared(10.0),
        Spec::weibull(0.5, 1.0),
        Spec::weibull(1.5, 1.0),
        Spec::weibull(5.0, 2.0),
        Spec::log_normal(0.0, 0.2),
        Spec::log_normal(0.0, 1.0),
        Spec::log_normal(1.0, 0.5),
        Spec::student_t(1.0),
        Spec::student_t(2.5),
        Spec::student_t(10.0),
        Spec::fisher_f(1.0, 1.0),
        Spec::fisher_f(5.0, 2.0),
        Spec::fisher_f(10.0, 10.0),
    ]
}

/// ∫ pdf over `[a, ∞)` (`dir = 1`) or `(−∞, a]` (`dir = −1`), substituting
/// `x = a ± s²`, `s = t/(1−t)`, which tames both the tail and an `x^(−1/2)` edge.
fn half_line(d: &dyn Density<f64>, a: f64, dir: f64) -> f64 {
    let f = |t: f64| {
        if t >= 1.0 {
            return 0.0;
        }
        let s = t / (1.0 - t);
        let x = a + dir * s * s;
        let v = d.pdf(x) * 2.0 * s / ((1.0 - t) * (1.0 - t));
        if v.is_finite() { v } else { 0.0 }
    };
    integrate(f, 0.0, 1.0, 4000)
}

fn total_mass(spec: &Spec) -> f64 {
    let d = spec.prepare().unwrap();
    let start = spec.support_start();
    if start.is_finite() {
        half_line(&d, start, 1.0)
    } else {
        let m = spec.mode_of();
        half_line(&d, m, 1.0) + half_line(&d, m, -1.0)
    }
}

#[test]
fn densities_integrate_to_one() {
    for spec in points() {
        let mass = total_mass(&spec);
        assert!((mass - 1.0).abs() <= 1e-8, "{spec}: mass {mass}");
    }
}

fn scale_of(spec: &Spec) -> f64 {
    match *spec {
        Spec::Normal { stddev, .. } => stddev,
        Spec::Cauchy { scale, .. } | Spec::Gamma { scale, .. } | Spec::Weibull { scale, .. } => scale,
        Spec::Exponential { rate } => 1.0 / rate,
        Spec::LogNormal { .. } | Spec::FisherF { .. } => spec.mode_of(),
        _ => 1.0,
    }
}

#[test]
fn mode_is_the_argmax() {
    for spec in points() {
        if spec.peak_order().is_some() {
            continue;
        }
        let d = spec.prepare().unwrap();
        let m = spec.mode_of();
        let eps = 1e-6 * scale_of(&spec);
        let top = d.pdf(m);
        assert!(top.is_finite() && top > 0.0, "{spec}");
        // the exponential mode sits on the support edge, so only its right side is checked
        for x in [m - eps, m + eps] {
            if x < spec.support_start() {
                continue;
            }
            assert!(d.pdf(x) <= top, "{spec}: pdf({x}) = {} > pdf(mode) = {top}", d.pdf(x));
        }
    }
}

/// `P(a, x) = x^a e^(−x) / Γ(a+1) · Σ_k x^k / ((a+1)…(a+k))`, with Γ(3.5) = (15/8)√π.
fn lower_gamma_2_5(x: f64) -> f64 {
    let a = 2.5;
    let gamma_a1 = 15.0 / 8.0 * std::f64::consts::PI.sqrt();
    let (mut term, mut sum) = (1.0, 1.0);
    for k in 1..200 {
        term *= x / (a + k as f64);
        sum += term;
    }
    x.powf(a) * (-x).exp() / gamma_a1 * sum
}

#[test]
fn gamma_cdf_matches_series() {
    let spec = Spec::gamma(2.5, 1.0);
    for x in [0.5, 2.5, 6.0] {
        let want = lower_gamma_2_5(x);
        let got = spec.cdf(x).unwrap();
        assert!((got - want).abs() <= 1e-13, "x={x}: {got} vs {want}");
    }
}

#[test]
fn gamma_shape_one_is_exponential() {
    let g = Spec::gamma(1.0, 1.0).prepare().unwrap();
    let e = Spec::exponential(1.0).prepare().unwrap();
    for x in [0.0, 0.01, 0.5, 1.0, 3.0, 20.0] {
        assert!((g.cdf(x) - e.cdf(x)).abs() <= 1e-14, "cdf at {x}");
        assert!((g.pdf(x) - e.pdf(x)).abs() <= 1e-14, "pdf at {x}");
        assert!((g.cdf(x) - (-(-x).exp_m1())).abs() <= 1e-14);
    }
}

#[test]
fn normal_ipdf_map_closed_form() {
    let (mu, sigma, s) = (1.0, 2.0, 4.0);
    let spec = Spec::normal(mu, sigma);
    let slice = right_slice(&spec).unwrap();
    let ctx = TailContext::new(slice.density.clone(), s, Side::Right).unwrap();
    let strategy = (slice.tail.unwrap())(&ctx).unwrap();
    assert_eq!(strategy.name(), "ipdf");
    let tail = TailSampler::new(ctx, strategy).unwrap();
    for x in [1.0, 0.9, 0.5, 1e-3, 1e-30, 1e-300] {
        let want = mu + ((s - mu).powi(2) - 2.0 * sigma * sigma * f64::ln(x)).sqrt();
        let got = tail.map(x);
        assert!((got - want).abs() <= 1e-12 * want, "x={x}: {got} vs {want}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cdf_differences_match_integrated_pdf(idx in 0usize..27, u in 0.0f64..1.0, v in 0.0f64..1.0) {
        let spec = points()[idx];
        let d = spec.prepare().unwrap();
        // random subintervals of [max(start, m − k), m + k], k five scale units
        let m = spec.mode_of();
        let k = 5.0 * scale_of(&spec).max(0.05);
        let lo_bound = spec.support_start().max(m - k);
        let (p, q) = (u.min(v), u.max(v));
        let a = lo_bound + p * (m + k - lo_bound);
        let b = lo_bound + q * (m + k - lo_bound);
        prop_assume!(b - a > 1e-9);
        // keep off the unbounded peak at the support edge
        prop_assume!(spec.peak_order().is_none() || a > 1e-3);
        let integral = integrate(|x| d.pdf(x), a, b, 400);
        let diff = d.cdf(b) - d.cdf(a);
        prop_assert!((diff - integral).abs() <= 1e-8, "{}: [{}, {}] cdf diff {} vs {}", spec, a, b, diff, integral);
    }
}
