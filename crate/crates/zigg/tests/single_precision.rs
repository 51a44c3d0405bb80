use rand_mt::{Mt, Mt64};
use zigg::distributions::{left_slice, right_slice};
use zigg::setup::area;
use zigg::validation::{ks_test, with_retest, SEEDS};
use zigg::{make_sampler, BitSource, Density, Spec, Spec32, Zigg32};

fn specs() -> Vec<(Spec32, Spec)> {
    vec![
        (Spec32::normal(0.0, 1.0), Spec::normal(0.0, 1.0)),
        (Spec32::cauchy(0.0, 1.0), Spec::cauchy(0.0, 1.0)),
        (Spec32::exponential(1.0), Spec::exponential(1.0)),
        (Spec32::gamma(0.5, 1.0), Spec::gamma(0.5, 1.0)),
        (Spec32::gamma(2.5, 1.0), Spec::gamma(2.5, 1.0)),
        (Spec32::weibull(2.5, 1.0), Spec::weibull(2.5, 1.0)),
        (Spec32::log_normal(0.0, 1.0), Spec::log_normal(0.0, 1.0)),
        (Spec32::student_t(2.5), Spec::student_t(2.5)),
        (Spec32::fisher_f(10.0, 10.0), Spec::fisher_f(10.0, 10.0)),
    ]
}

/// KS p-value of `n` single-precision draws against the double-precision cdf.
fn p_value<S: BitSource>(sampler: &Zigg32, cdf: &dyn Density<f64>, src: &mut S, n: usize) -> f64 {
    let mut xs: Vec<f64> = (0..n)
        .map(|_| {
            let x = sampler.sample(&mut *src);
            assert!(!x.is_nan());
            x as f64
        })
        .collect();
    ks_test(&mut xs, |x| cdf.cdf(x)).unwrap().p_value
}

#[test]
fn single_precision_samplers_match_their_cdf() {
    let n = 1 << 16;
    for (s32, s64) in specs() {
        let sampler = make_sampler(&s32, 256).unwrap();
        let d = s64.prepare().unwrap();
        let r = with_retest(0.01, (SEEDS[0], SEEDS[1]), |seed| Ok(p_value(&sampler, &d, &mut Mt64::new(seed), n))).unwrap();
        assert!(r.passed, "{s64} from 64-bit words: {r:?}");
        let r = with_retest(0.01, (SEEDS[2], SEEDS[3]), |seed| Ok(p_value(&sampler, &d, &mut Mt::new(seed as u32), n))).unwrap();
        assert!(r.passed, "{s64} from 32-bit words: {r:?}");
    }
}

#[test]
fn single_precision_strips_have_equal_area() {
    // coordinates near the mode are ill-conditioned, so compare areas, measured in f64
    for (s32, s64) in specs() {
        let sampler = make_sampler(&s32, 256).unwrap();
        let slices = match left_slice(&s64).unwrap() {
            Some(left) => vec![left, right_slice(&s64).unwrap()],
            None => vec![right_slice(&s64).unwrap()],
        };
        for ((label, z), slice) in sampler.slices().into_iter().zip(&slices) {
            let n = z.table.n;
            let strip = slice.mass / n as f64;
            let sign = slice.direction.sign::<f64>();
            let areas: Vec<f64> = z.table.x[1..]
                .iter()
                .map(|&x| {
                    let x = x as f64;
                    // the rounded f32 mode may sit just past the f64 one
                    if (x - slice.mode) * sign <= 0.0 { slice.mass } else { area(slice, x).unwrap() }
                })
                .collect();
            let worst = areas.windows(2).map(|w| ((w[1] - w[0]) - strip).abs() / strip).fold(0.0, f64::max);
            assert!(worst <= 64.0 * f32::EPSILON as f64 * n as f64, "{s64} {label}: {worst:e}");
        }
    }
}
