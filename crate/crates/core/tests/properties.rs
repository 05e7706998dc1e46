//! Invariants checked over randomised inputs.

use std::sync::{Arc, OnceLock};

use halfspace_casimir::polylog::li4_partial_sums;
use halfspace_casimir::{
    casimir_energy_with, integrate_1d, integrate_2d_nested, li4, n_total, CachedReflection, EndpointTransform,
    EuclideanMomentumF64, FrozenReflection, ModelParamsF64, Nesting, QuadratureSpec, QuadratureSpecF64, Rect,
    ReflectionTable, SeparationF64,
};
use proptest::prelude::*;

fn spec() -> QuadratureSpecF64 {
    QuadratureSpecF64::default()
}

fn cases(n: u32) -> ProptestConfig {
    ProptestConfig::with_cases(n)
}

/// Unit table wide enough for every sqrt-mode energy drawn below.
fn shared_table() -> Arc<ReflectionTable<f64>> {
    static TABLE: OnceLock<Arc<ReflectionTable<f64>>> = OnceLock::new();
    TABLE
        .get_or_init(|| CachedReflection::table_for_masses(0.1, 10.0, 0.1, 20.0, &spec()).unwrap())
        .clone()
}

proptest! {
    #![proptest_config(cases(64))]

    #[test]
    fn halving_the_tolerance_stays_consistent(a in 0.1f64..5.0, w in 0.0f64..6.0, rel in 1e-10f64..1e-4) {
        let f = |x: f64| (a * x).exp() * (w * x).cos();
        let exact = {
            let d = a * a + w * w;
            ((a.exp() * (a * w.cos() + w * w.sin())) - a) / d
        };
        let coarse = QuadratureSpecF64::new(rel, 1e-300, 2000).unwrap();
        let fine = coarse.tightened(2.0);
        let r1 = integrate_1d(f, 0.0, 1.0, &coarse).unwrap();
        let r2 = integrate_1d(f, 0.0, 1.0, &fine).unwrap();
        prop_assert!((r1.value - exact).abs() <= coarse.tolerance(exact));
        prop_assert!((r2.value - exact).abs() <= fine.tolerance(exact));
        prop_assert!((r1.value - r2.value).abs() <= r1.error_estimate + r2.error_estimate + 4.0 * f64::EPSILON * exact.abs());
    }

    #[test]
    fn endpoint_transform_leaves_smooth_integrals_unchanged(a in -3.0f64..3.0, b in 0.5f64..4.0, k in 0u32..6) {
        let f = |x: f64| x.powi(k as i32) * (a * x).exp();
        let plain = integrate_1d(f, 0.0, b, &spec()).unwrap();
        let mapped = integrate_1d(f, 0.0, b, &spec().with_transform(EndpointTransform::SqrtBothEnds)).unwrap();
        prop_assert!((plain.value - mapped.value).abs() <= plain.error_estimate + mapped.error_estimate + 1e-14 * plain.value.abs());
    }

    #[test]
    fn nesting_order_does_not_matter(a in 0.1f64..3.0, b in 0.1f64..3.0, c in -1.0f64..1.0) {
        let f = |x: f64, y: f64| Ok((a * x + b * y * y).exp() * (1.0 + c * x * y));
        let dom = Rect::new((0.0, 1.0), (-0.5, 1.5));
        let xy = integrate_2d_nested(f, dom, &spec(), Nesting::OuterX).unwrap();
        let yx = integrate_2d_nested(f, dom, &spec(), Nesting::OuterY).unwrap();
        prop_assert!((xy.value - yx.value).abs() <= xy.error_estimate + yx.error_estimate);
    }

    #[test]
    fn li4_partial_sums_increase_towards_the_sum(z in 1e-3f64..=1.0) {
        let sums: Vec<f64> = li4_partial_sums(z).take(200).collect();
        prop_assert!(sums.windows(2).all(|w| w[1] >= w[0]));
        let v = li4(z, 1e-17).unwrap();
        prop_assert!(v >= z);
        prop_assert!(v <= z * li4(1.0, 1e-17).unwrap());
        // the series is truncated once a term drops below the absolute tolerance
        prop_assert!(sums.iter().all(|&s| s <= v + 1e-17 + 4.0 * f64::EPSILON * v));
    }

    #[test]
    fn frozen_kernel_closed_form_and_cubic_scaling(r in 0.01f64..0.99, l in 0.05f64..50.0) {
        let e = casimir_energy_with(SeparationF64::new(l).unwrap(), &FrozenReflection(r), &spec()).unwrap();
        let closed = -li4(r * r, 1e-17).unwrap() / (16.0 * std::f64::consts::PI);
        prop_assert!((e.real_part * l.powi(3) - closed).abs() <= 1e-9 * closed.abs());
        prop_assert!(e.stable);
        prop_assert_eq!(e.imag_part, 0.0);
    }

    #[test]
    fn imaginary_part_flags_instability(r in 0.1f64..4.0, l in 0.1f64..10.0) {
        let s = spec();
        let e = casimir_energy_with(SeparationF64::new(l).unwrap(), &FrozenReflection(r), &s).unwrap();
        prop_assert!(e.imag_part >= 0.0);
        prop_assert_eq!(e.stable, e.imag_part * l.powi(3) < s.abs_tol);
        prop_assert_eq!(e.stable, r <= 1.0);
        if r > 1.0 {
            // negative stretch is y < ln r
            let y = r.ln();
            prop_assert!((e.imag_part * l.powi(3) - y.powi(3) / 12.0).abs() <= 1e-9 * y.powi(3));
        }
    }
}

proptest! {
    #![proptest_config(cases(16))]

    #[test]
    fn reflection_is_linear_in_the_squared_coupling(g in 1e-2f64..1e2, m in 0.1f64..10.0, lam in 0.0f64..5.0) {
        let gm = EuclideanMomentumF64::new(g).unwrap();
        let unit = n_total(gm, &ModelParamsF64::constant(1.0, m).unwrap(), &spec()).unwrap();
        let b = n_total(gm, &ModelParamsF64::constant(lam, m).unwrap(), &spec()).unwrap();
        let l2 = lam * lam;
        for (x, u) in [(b.total, unit.total), (b.n_nt, unit.n_nt), (b.n_t, unit.n_t)] {
            prop_assert!((x - l2 * u).abs() <= 4.0 * f64::EPSILON * (l2 * u).abs());
        }
    }

    #[test]
    fn components_add_up_exactly(g in 1e-2f64..1e2, m in 0.1f64..10.0) {
        let b = n_total(EuclideanMomentumF64::new(g).unwrap(), &ModelParamsF64::constant(1.3, m).unwrap(), &spec()).unwrap();
        prop_assert_eq!(b.n_nt, b.n_mm + 2.0 * b.n_mp);
        prop_assert_eq!(b.n_t, 2.0 * (b.n_t_sectors[0] + b.n_t_sectors[1] + b.n_t_sectors[2]));
        prop_assert_eq!(b.total, b.n_nt + b.n_t);
        prop_assert!(b.error_estimate >= 0.0);
    }

    #[test]
    fn reflection_depends_on_ratios_only(
        g in 1e-2f64..1e2,
        m in 0.2f64..5.0,
        lam in 0.1f64..3.0,
        s in prop::sample::select(vec![0.5f64, 2.0, 10.0]),
    ) {
        let a = n_total(EuclideanMomentumF64::new(g).unwrap(), &ModelParamsF64::constant(lam, m).unwrap(), &spec()).unwrap();
        let b = n_total(EuclideanMomentumF64::new(s * g).unwrap(), &ModelParamsF64::constant(s * lam, s * m).unwrap(), &spec()).unwrap();
        prop_assert!((a.total - b.total).abs() <= a.error_estimate + b.error_estimate);
    }

    #[test]
    fn sqrt_coupling_energy_scales_with_the_separation(
        l in 0.2f64..2.0,
        m in 0.5f64..2.0,
        lam0 in 0.1f64..2.0,
        s in prop::sample::select(vec![0.5f64, 2.0]),
    ) {
        // L -> sL, m -> m/s, lambda0^2 -> lambda0^2/s leaves E L^3 unchanged
        let table = shared_table();
        let base = CachedReflection::new(table.clone(), ModelParamsF64::sqrt_momentum(lam0, m).unwrap());
        let scaled = CachedReflection::new(table, ModelParamsF64::sqrt_momentum(lam0 / s.sqrt(), m / s).unwrap());
        let e1 = casimir_energy_with(SeparationF64::new(l).unwrap(), &base, &spec()).unwrap();
        let e2 = casimir_energy_with(SeparationF64::new(s * l).unwrap(), &scaled, &spec()).unwrap();
        let (a, b) = (e1.real_part * l.powi(3), e2.real_part * (s * l).powi(3));
        let tol = (e1.error_estimate * l.powi(3) + e2.error_estimate * (s * l).powi(3)).max(1e-12);
        prop_assert!((a - b).abs() <= tol, "{} vs {} (tol {})", a, b, tol);
        prop_assert_eq!(e1.stable, e2.stable);
    }
}

#[test]
fn single_precision_paths() {
    let s = QuadratureSpec::<f32>::new(1e-5, 1e-7, 500).unwrap();
    let r = integrate_1d(|x: f32| x.sqrt(), 0.0, 1.0, &s.with_transform(EndpointTransform::SqrtBothEnds)).unwrap();
    assert!((r.value - 2.0 / 3.0).abs() < 1e-5);
    assert!((li4(0.5f32, 1e-8).unwrap() - 0.517_479_06).abs() < 1e-6);
}
