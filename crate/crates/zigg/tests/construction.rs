use zigg::distributions::{parameter_grid, Family};
use zigg::make_sampler;

#[test]
fn every_grid_point_builds_at_every_region_count() {
    let mut failures = Vec::new();
    for family in Family::ALL {
        for spec in parameter_grid(family) {
            for n in [256, 1024, 4092] {
                match make_sampler(&spec, n) {
                    Ok(s) => {
                        for (label, z) in s.slices() {
                            let r = z.table.max_area_residual;
                            if !(r <= 1e-9) {
                                failures.push(format!("{spec} N={n} {label}: residual {r:e}"));
                            }
                        }
                    }
                    Err(e) => failures.push(format!("{spec} N={n}: {e}")),
                }
            }
        }
    }
    assert!(failures.is_empty(), "{}", failures.join("\n"));
}
