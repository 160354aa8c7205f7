use std::f64::consts::PI;

use num_complex::Complex64;
use oplab_core::catalog::{convex_subset, lookup_selector, monotone_subset};
use oplab_core::{catalog_list, complex_sample, pick_scan, ClassTag, Error, GridSpec, ScalarFunctionSpec};

/// Composite Simpson rule on `[a, b]` with `n` (even) intervals.
fn simpson(a: f64, b: f64, n: usize, f: impl Fn(f64) -> f64) -> f64 {
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

/// `∫ λt/(λ+t) ρ(λ) dλ` over `[lo, ∞)` by Simpson in `x = ln λ`.
fn kernel_integral(t: f64, lo: f64, rho: impl Fn(f64) -> f64) -> f64 {
    let a = if lo > 0.0 { lo.ln() } else { -80.0 };
    simpson(a, 400.0, 400_000, |x| {
        let l = x.exp();
        l * t / (l + t) * rho(l) * l
    })
}

fn grid_50() -> Vec<f64> {
    (0..50).map(|i| 0.1 + (10.0 - 0.1) * i as f64 / 49.0).collect()
}

#[test]
fn power_density_matches_closed_form_independently() {
    for p in [0.3, 0.5, 0.75] {
        let c = (p * PI).sin() / PI;
        for t in [0.1, 1.0, 4.0, 10.0] {
            let got = kernel_integral(t, 0.0, |l| c * l.powf(p - 2.0));
            let want = t.powf(p);
            assert!((got - want).abs() <= 1e-9 * want, "p={p} t={t}: {got} vs {want}");
        }
    }
}

#[test]
fn log1p_density_matches_closed_form_independently() {
    for t in [0.1, 1.0, 4.0, 10.0] {
        let got = kernel_integral(t, 1.0, |l| l.powi(-2));
        let want = t.ln_1p();
        assert!((got - want).abs() <= 1e-9 * want, "t={t}: {got} vs {want}");
    }
}

#[test]
fn declared_representations_reconstruct_eval() {
    let mut checked = 0;
    for f in catalog_list() {
        let Some(rep) = f.representation() else { continue };
        checked += 1;
        for t in grid_50() {
            let got = rep.reconstruct(t).unwrap();
            let want = f.eval(t);
            assert!(
                (got - want).abs() <= 1e-6 * want.abs().max(1e-300),
                "{}: t={t} rep {got} eval {want}",
                f.label()
            );
        }
    }
    assert!(checked >= 15, "only {checked} representations");
}

#[test]
fn catalog_names_its_required_entries() {
    let labels: Vec<String> = catalog_list().iter().map(ScalarFunctionSpec::label).collect();
    for want in [
        "f_lambda",
        "power",
        "double_power",
        "log1p",
        "t_squared",
        "convex_kernel",
        "affine",
    ] {
        assert!(
            catalog_list().iter().any(|f| f.id == want),
            "missing {want} in {labels:?}"
        );
    }
    assert!(catalog_list().iter().any(|f| f.id.starts_with("t_times_")));
}

#[test]
fn lookup_examples() {
    assert_eq!(lookup_selector("f_lambda:lambda=1").unwrap().eval(1.0), 0.5);
    assert_eq!(lookup_selector("power:p=0.5").unwrap().eval(4.0), 2.0);
    let t2 = lookup_selector("t_squared").unwrap();
    for tag in [ClassTag::OperatorConvex, ClassTag::Fprime0Nonneg, ClassTag::Nonneg] {
        assert!(t2.has(tag));
    }
    assert!(!t2.has(ClassTag::NonnegOperatorMonotone));
    assert!(matches!(lookup_selector("nope"), Err(Error::UnknownFunction { .. })));
}

#[test]
fn derivative_matches_central_difference() {
    for f in catalog_list() {
        if f.id == "hinge" {
            continue;
        }
        for t in [0.3, 1.0, 2.5, 7.0] {
            let h = 1e-5 * t;
            let fd = (f.eval(t + h) - f.eval(t - h)) / (2.0 * h);
            let d = f.deriv(t);
            assert!(
                (fd - d).abs() <= 1e-6 * (1.0 + d.abs()),
                "{}: t={t} fd {fd} deriv {d}",
                f.label()
            );
        }
    }
}

#[test]
fn continuation_agrees_with_real_values_near_the_axis() {
    for f in catalog_list() {
        if f.id == "hinge" {
            assert!(matches!(
                complex_sample(&f, Complex64::new(1.0, 1.0)),
                Err(Error::Unsupported(_))
            ));
            continue;
        }
        for t in [0.1, 1.0, 3.0, 9.0] {
            let w = complex_sample(&f, Complex64::new(t, 1e-13)).unwrap();
            let v = f.eval(t);
            assert!(
                (w.re - v).abs() <= 1e-12 * (1.0 + v.abs()),
                "{}: t={t} {w} vs {v}",
                f.label()
            );
        }
    }
}

#[test]
fn continuation_examples() {
    let z = complex_sample(&ScalarFunctionSpec::power(0.5).unwrap(), Complex64::i()).unwrap();
    let want = Complex64::from_polar(1.0, PI / 4.0);
    assert!((z - want).norm() < 1e-14);
    let z = complex_sample(&ScalarFunctionSpec::affine(2.0, 3.0), Complex64::new(1.0, 1.0)).unwrap();
    assert!((z - Complex64::new(5.0, 3.0)).norm() < 1e-14);
    let sq = ScalarFunctionSpec::t_squared();
    assert!((complex_sample(&sq, Complex64::i()).unwrap() + 1.0).norm() < 1e-14);
    let z = complex_sample(&sq, Complex64::from_polar(1.0, 5.0 * PI / 8.0)).unwrap();
    assert!(z.im < 0.0);
    assert!(complex_sample(&sq, Complex64::new(1.0, 0.0)).is_err());
}

#[test]
fn monotone_entries_are_pick_on_the_grid() {
    let grid = GridSpec::default();
    for f in catalog_list()
        .iter()
        .filter(|f| f.has(ClassTag::NonnegOperatorMonotone))
    {
        let r = pick_scan(f, &grid).unwrap();
        assert!(r.min_im >= -1e-12, "{}: min Im {}", f.label(), r.min_im);
        assert!(r.is_pick_on_grid);
    }
    let r = pick_scan(&ScalarFunctionSpec::t_squared(), &grid).unwrap();
    assert!(!r.is_pick_on_grid);
}

#[test]
fn first_quadrant_split_at_one_half() {
    let grid = GridSpec::default();
    for p in [0.1, 0.25, 0.4, 0.5] {
        let r = pick_scan(&ScalarFunctionSpec::power(p).unwrap(), &grid).unwrap();
        assert!(
            r.min_re >= -1e-12 && r.is_first_quadrant_on_grid,
            "p={p}: min Re {}",
            r.min_re
        );
        assert!(
            r.min_re > 0.0,
            "p={p}: non-constant first-quadrant power touches Re = 0"
        );
    }
    for p in [0.52, 0.6, 0.75, 0.9, 1.0] {
        let r = pick_scan(&ScalarFunctionSpec::power(p).unwrap(), &grid).unwrap();
        assert!(!r.is_first_quadrant_on_grid, "p={p}: min Re {}", r.min_re);
    }
}

#[test]
fn scalar_subadditivity_for_monotone_entries() {
    let values = [0.0, 1e-3, 0.1, 0.5, 1.0, 2.0, 7.5, 40.0];
    for f in catalog_list()
        .iter()
        .filter(|f| f.has(ClassTag::NonnegOperatorMonotone))
    {
        for &a in &values {
            for &b in &values {
                assert!(
                    f.eval(a + b) <= f.eval(a) + f.eval(b) + 1e-12,
                    "{}: a={a} b={b}",
                    f.label()
                );
            }
            for n in 1..=6 {
                let n = n as f64;
                assert!(f.eval(n * a) <= n * f.eval(a) + 1e-12, "{}: n={n} a={a}", f.label());
            }
        }
    }
}

#[test]
fn subsets_carry_their_tags() {
    assert!(monotone_subset()
        .iter()
        .all(|f| f.has(ClassTag::NonnegOperatorMonotone)));
    assert!(convex_subset()
        .iter()
        .all(|f| f.has(ClassTag::OperatorConvex) && f.has(ClassTag::Fprime0Nonneg)));
}
