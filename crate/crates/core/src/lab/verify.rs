//! The `verify` suite: quick, self-contained checks of every module's invariants.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::Serialize;

use crate::calculus::{
    gradient, gradient_lp_norm, integral, lp_norm, mean, normalize_density, weighted_mean,
};
use crate::grid::{Density, Grid, ScalarField};
use crate::inequality::{deficit, ratio, validate_exponents};
use crate::pullback::{
    ball_cover, coarea_check, incidence_graph, lq_scaling, pullback_lq_check, pullback_mean_check,
    spanning_tree, CoveringMapSpec, Metric, PointCloud,
};
use crate::riesz::{kernel_lr_norm, riesz_potential_field, young_check, RieszKernelSpec};
use crate::search::{
    bump_density, fit_power_law, maximize_deficit, random_density, random_field, BumpSpec,
};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

type CheckResult = std::result::Result<String, String>;
type Check = (&'static str, fn() -> CheckResult);

fn ensure(ok: bool, detail: String) -> CheckResult {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

trait OrFail<T> {
    fn or_fail(self) -> std::result::Result<T, String>;
}

impl<T, E: std::fmt::Display> OrFail<T> for std::result::Result<T, E> {
    fn or_fail(self) -> std::result::Result<T, String> {
        self.map_err(|e| e.to_string())
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn torus(n: usize, m: usize) -> Arc<Grid> {
    Arc::new(Grid::unit_torus(n, m).expect("static grid"))
}

fn unit_box(n: usize, m: usize) -> Arc<Grid> {
    Arc::new(Grid::unit_box(n, m).expect("static grid"))
}

fn grid_half_open() -> CheckResult {
    let g = Grid::new(2, &[4, 5], &[1.0, 1.0], &[true, false]).or_fail()?;
    let a = g.axis_coordinates(0);
    let b = g.axis_coordinates(1);
    ensure(
        !a.contains(&1.0) && b.first() == Some(&0.0) && b.last() == Some(&1.0),
        format!("periodic {a:?}, box {b:?}"),
    )
}

fn sampling_deterministic() -> CheckResult {
    let g = torus(2, 16);
    let f = |x: &[f64]| (3.0 * x[0]).sin() * x[1].exp();
    let a = ScalarField::from_fn(g.clone(), f).or_fail()?;
    let b = ScalarField::from_fn(g, f).or_fail()?;
    ensure(a.values() == b.values(), "bitwise equal samples".into())
}

fn weights_sum_to_volume() -> CheckResult {
    let g = Grid::new(3, &[5, 6, 7], &[1.0, 2.0, 0.5], &[false, true, false]).or_fail()?;
    let err = rel(g.quadrature().total(), g.volume());
    ensure(err <= 1e-12, format!("relative error {err:e}"))
}

fn norm_monotonicity() -> CheckResult {
    let f = random_field(&torus(2, 24), 3, 7).or_fail()?;
    let exps = [1.0, 1.5, 2.0, 3.0, 8.0, f64::INFINITY];
    let norms = exps
        .iter()
        .map(|&p| lp_norm(&f, p))
        .collect::<Result<Vec<_>, _>>()
        .or_fail()?;
    ensure(
        norms.windows(2).all(|w| w[0] <= w[1] * (1.0 + 1e-14)),
        format!("{norms:?}"),
    )
}

fn weighted_mean_range_and_linearity() -> CheckResult {
    let g = torus(2, 24);
    let f = random_field(&g, 3, 1).or_fail()?;
    let omega = random_density(&g, 2, 2).or_fail()?;
    let m = weighted_mean(&f, &omega).or_fail()?;
    let shifted = weighted_mean(&f.affine(-2.5, 4.0).or_fail()?, &omega).or_fail()?;
    ensure(
        f.min() <= m && m <= f.max() && (shifted - (-2.5 * m + 4.0)).abs() < 1e-12,
        format!("E_w[f] = {m}, E_w[-2.5f+4] = {shifted}"),
    )
}

fn gradient_affine_exact() -> CheckResult {
    let g = Arc::new(Grid::new(2, &[6, 5], &[1.0, 3.0], &[false, false]).or_fail()?);
    let f = ScalarField::from_fn(g, |x| 2.0 * x[0] - x[1] + 1.0).or_fail()?;
    let df = gradient(&f).or_fail()?;
    let err = df
        .components()
        .chunks(2)
        .map(|c| (c[0] - 2.0).abs().max((c[1] + 1.0).abs()))
        .fold(0.0, f64::max);
    ensure(err < 1e-13, format!("max error {err:e}"))
}

fn gradient_order() -> CheckResult {
    let err = |m: usize| -> std::result::Result<f64, String> {
        let f = ScalarField::from_fn(torus(1, m), |x| (2.0 * PI * x[0]).sin()).or_fail()?;
        let df = gradient(&f).or_fail()?;
        Ok((0..m)
            .map(|k| {
                let x = f.grid().point(k)[0];
                (df.at(k)[0] - 2.0 * PI * (2.0 * PI * x).cos()).abs()
            })
            .fold(0.0, f64::max))
    };
    let ratio = err(64)? / err(128)?;
    let order = ratio.log2();
    ensure(
        (3.0..=5.0).contains(&ratio) && (1.8..=2.2).contains(&order),
        format!("error ratio {ratio:.4}, order {order:.4}"),
    )
}

fn hypothesis_boundaries() -> CheckResult {
    let accept_p = validate_exponents(3, 1.5, 2.0, 2.0).is_ok();
    let reject_q = validate_exponents(4, 2.0, 2.0, 2.0).is_err();
    let accept_r = validate_exponents(3, 2.0, 2.0, 6.0).is_ok();
    ensure(
        accept_p && reject_q && accept_r,
        format!("p=n/(n-1) accepted: {accept_p}, q=n/2 rejected: {reject_q}, 1/r=1/p-1/n accepted: {accept_r}"),
    )
}

fn alpha_times_t() -> CheckResult {
    let mut worst: f64 = 0.0;
    for n in 2..=3 {
        for p in [1.5, 2.0, 2.5, 3.0, 4.0] {
            if let Ok(cfg) = validate_exponents(n, p, 2.0, 2.0) {
                worst = worst.max((cfg.alpha * cfg.t - 1.0).abs());
            }
        }
    }
    ensure(worst < 1e-15, format!("max |alpha*t - 1| = {worst:e}"))
}

fn affine_invariance() -> CheckResult {
    let g = torus(2, 32);
    let cfg = validate_exponents(2, 2.5, 1.5, 3.0).or_fail()?;
    let f = random_field(&g, 3, 3).or_fail()?;
    let omega = random_density(&g, 2, 4).or_fail()?;
    let base = ratio(&f, &omega, &cfg).or_fail()?;
    let moved = ratio(&f.affine(5.0, 3.0).or_fail()?, &omega, &cfg).or_fail()?;
    let err = rel(base, moved);
    ensure(err <= 1e-12, format!("relative change {err:e}"))
}

fn sine_ratio() -> CheckResult {
    let g = torus(2, 128);
    let f = ScalarField::from_fn(g.clone(), |x| (2.0 * PI * x[0]).sin()).or_fail()?;
    let cfg = validate_exponents(2, 2.0, 2.0, 2.0).or_fail()?;
    let r = ratio(&f, &Density::uniform(g).or_fail()?, &cfg).or_fail()?;
    ensure(
        (r - 1.0 / (2.0 * PI)).abs() <= 1e-4,
        format!("ratio {r}, expected {}", 1.0 / (2.0 * PI)),
    )
}

fn deficit_sanity_bound() -> CheckResult {
    let g = torus(2, 24);
    let f = random_field(&g, 3, 5).or_fail()?;
    let point = Density::point_mass(g.clone(), 37).or_fail()?;
    let centred = f.map(|v| v - mean(&f)).or_fail()?;
    let bound = 2.0 * lp_norm(&centred, f64::INFINITY).or_fail()?;
    let d = deficit(&f, &point, 2.0).or_fail()?;
    ensure(d <= bound, format!("deficit {d} vs bound {bound}"))
}

fn density_scale_consistency() -> CheckResult {
    let g = torus(2, 16);
    let omega = random_density(&g, 2, 8).or_fail()?;
    let scaled = omega.field().map(|v| 7.0 * v).or_fail()?;
    let again = normalize_density(&scaled).or_fail()?;
    let err = omega
        .values()
        .iter()
        .zip(again.values())
        .map(|(a, b)| rel(*a, *b))
        .fold(0.0, f64::max);
    ensure(err < 1e-14, format!("max relative difference {err:e}"))
}

fn kernel_norm_blowup() -> CheckResult {
    let spec = RieszKernelSpec::new(2, 1.0).or_fail()?;
    let norms = (1..=4)
        .map(|k| kernel_lr_norm(&spec, 2.0 - 10f64.powi(-k)))
        .collect::<Result<Vec<_>, _>>()
        .or_fail()?;
    ensure(norms.windows(2).all(|w| w[1] > w[0]), format!("{norms:?}"))
}

fn young_slack() -> CheckResult {
    let g = unit_box(2, 17);
    let spec = RieszKernelSpec::new(2, 2.0_f64.sqrt()).or_fail()?;
    let mut worst: f64 = 0.0;
    for omega in [
        Density::uniform(g.clone()).or_fail()?,
        Density::point_mass(g.clone(), g.len() / 2).or_fail()?,
        random_density(&g, 3, 9).or_fail()?,
    ] {
        worst = worst.max(young_check(&omega, 2.0, &spec).or_fail()?.slack);
    }
    ensure(worst <= 1.05, format!("max slack {worst}"))
}

fn riesz_monotone() -> CheckResult {
    let g = unit_box(2, 13);
    let spec = RieszKernelSpec::for_grid(&g).or_fail()?;
    let small = random_density(&g, 2, 10).or_fail()?.into_field();
    let large = small.map(|v| v + 0.3).or_fail()?;
    let a = riesz_potential_field(&small, &spec).or_fail()?;
    let b = riesz_potential_field(&large, &spec).or_fail()?;
    let ok = a.values().iter().all(|&v| v >= 0.0)
        && a.values().iter().zip(b.values()).all(|(x, y)| x <= y);
    ensure(ok, "non-negative and monotone".into())
}

fn coarea_identities() -> CheckResult {
    let mut worst: f64 = 0.0;
    for wraps in [vec![3], vec![2, 3]] {
        let spec = CoveringMapSpec::new(&vec![12; wraps.len()], &wraps).or_fail()?;
        let h = random_field(spec.source(), 3, 11)
            .or_fail()?
            .map(f64::exp)
            .or_fail()?;
        let (lhs, rhs) = coarea_check(&h, &spec).or_fail()?;
        let f = random_field(spec.target(), 3, 12).or_fail()?;
        let omega = random_density(spec.target(), 2, 13).or_fail()?;
        let (m1, m2) = pullback_mean_check(&f, &omega, &spec).or_fail()?;
        let (l1, l2) = pullback_lq_check(&omega, 2.5, &spec).or_fail()?;
        worst = worst
            .max(rel(lhs, rhs))
            .max(rel(m1, m2).min((m1 - m2).abs()))
            .max(rel(l1, lq_scaling(&spec, 2.5) * l2));
    }
    ensure(worst <= 1e-12, format!("worst relative defect {worst:e}"))
}

fn cover_and_tree() -> CheckResult {
    let coords: Vec<f64> = {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        (0..400).map(|_| rng.random::<f64>()).collect()
    };
    let cloud = PointCloud::new(
        2,
        coords,
        Metric::Torus {
            lengths: vec![1.0, 1.0],
        },
    )
    .or_fail()?;
    let cover = ball_cover(&cloud, 0.2).or_fail()?;
    cover.validate().or_fail()?;
    let tree = spanning_tree(&incidence_graph(&cover)).or_fail()?;
    ensure(
        tree.is_tree() && tree.leaf_order_is_valid(),
        format!("K = {}, {} tree edges", tree.k, tree.edges.len()),
    )
}

fn ascent_monotone() -> CheckResult {
    let g = torus(2, 16);
    let cfg = validate_exponents(2, 2.0, 2.0, 2.0).or_fail()?;
    let omega = bump_density(&g, &BumpSpec::centred(&g, 0.25)).or_fail()?;
    let out = maximize_deficit(&omega, &cfg, 2, 25, 1).or_fail()?;
    ensure(
        out.trace.windows(2).all(|w| w[1] >= w[0])
            && out.report.ratio >= out.trace[0] * (1.0 - 1e-9),
        format!("ratio {} after {} steps", out.report.ratio, out.iterations),
    )
}

fn fit_orthogonality() -> CheckResult {
    let xs = [1.0, 2.0, 5.0, 11.0, 30.0];
    let ys = [2.0, 3.1, 4.4, 8.0, 12.5];
    let fit = fit_power_law(&xs, &ys).or_fail()?;
    let (mut r0, mut r1) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let res = y.ln() - fit.slope * x.ln() - fit.intercept;
        r0 += res;
        r1 += res * x.ln();
    }
    ensure(
        r0.abs() < 1e-10 && r1.abs() < 1e-10,
        format!("residual sums {r0:e}, {r1:e}"),
    )
}

fn bump_scaling() -> CheckResult {
    let g = torus(2, 128);
    let norm = |eps| -> std::result::Result<f64, String> {
        let d = bump_density(&g, &BumpSpec::centred(&g, eps)).or_fail()?;
        let mass = integral(d.field());
        if (mass - 1.0).abs() > 1e-12 {
            return Err(format!("bump mass {mass}"));
        }
        lp_norm(d.field(), 2.0).or_fail()
    };
    let ratio = norm(0.125)? / norm(0.25)?;
    ensure((ratio - 2.0).abs() <= 0.1, format!("L2 norm ratio {ratio}"))
}

fn gradient_norm_of_sine() -> CheckResult {
    let f = ScalarField::from_fn(torus(1, 256), |x| (2.0 * PI * x[0]).sin()).or_fail()?;
    let n = gradient_lp_norm(&gradient(&f).or_fail()?, 2.0).or_fail()?;
    let expected = 2.0 * PI * 0.5_f64.sqrt();
    ensure((n - expected).abs() < 1e-3, format!("{n} vs {expected}"))
}

/// Every check, by name.
pub fn checks() -> Vec<Check> {
    vec![
        ("grid.half_open_nodes", grid_half_open),
        ("grid.sampling_deterministic", sampling_deterministic),
        ("calculus.weights_sum_to_volume", weights_sum_to_volume),
        ("calculus.norm_monotonicity", norm_monotonicity),
        (
            "calculus.weighted_mean_range_linearity",
            weighted_mean_range_and_linearity,
        ),
        ("calculus.gradient_affine_exact", gradient_affine_exact),
        ("calculus.gradient_second_order", gradient_order),
        ("calculus.sine_gradient_norm", gradient_norm_of_sine),
        ("inequality.hypothesis_boundaries", hypothesis_boundaries),
        ("inequality.alpha_times_t", alpha_times_t),
        ("inequality.affine_invariance", affine_invariance),
        ("inequality.sine_ratio", sine_ratio),
        ("inequality.deficit_sanity_bound", deficit_sanity_bound),
        (
            "inequality.density_scale_consistency",
            density_scale_consistency,
        ),
        ("riesz.kernel_norm_blowup", kernel_norm_blowup),
        ("riesz.young_slack", young_slack),
        ("riesz.monotone_nonnegative", riesz_monotone),
        ("pullback.coarea_identities", coarea_identities),
        ("pullback.cover_and_tree", cover_and_tree),
        ("search.ascent_monotone", ascent_monotone),
        ("search.fit_orthogonality", fit_orthogonality),
        ("search.bump_scaling", bump_scaling),
    ]
}

pub fn run_suite() -> Vec<CheckOutcome> {
    checks()
        .into_iter()
        .map(|(name, check)| match check() {
            Ok(detail) => CheckOutcome {
                name,
                passed: true,
                detail,
            },
            Err(detail) => CheckOutcome {
                name,
                passed: false,
                detail,
            },
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_check_passes() {
        let failures: Vec<_> = run_suite().into_iter().filter(|o| !o.passed).collect();
        assert!(failures.is_empty(), "{failures:#?}");
    }

    #[test]
    fn check_names_are_unique() {
        let mut names: Vec<_> = checks().into_iter().map(|(n, _)| n).collect();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), checks().len());
    }
}
