use num_complex::Complex64;

use kgflow_core::hamflow::{build_coordinate_pair, build_lie_series, naive_lie_series_oracle, Coord};
use kgflow_core::hparse::{parse_hamiltonian, SHEAR_HAMILTONIAN, TORUS_HAMILTONIAN};
use kgflow_core::lattice::{
    critical_time, diagonal_errmap, evaluate_field, real_flow_displacement, real_flow_oracle, sign_map,
    CriticalOptions, CriticalTime, FieldGrid, SignClass, StepControl, TimeDirection,
};
use kgflow_core::moser::{
    conformal_series, error_indicator, eval_conformal, jacobian_series, real_time_jacobian_series, ConformalSeries,
    Continuation, EvalMode, TrigPolySeries,
};
use kgflow_core::trigpoly::TrigPoly;

fn torus() -> TrigPoly {
    parse_hamiltonian(TORUS_HAMILTONIAN).unwrap()
}

#[test]
fn torus_real_time_jacobian_is_one_through_order_12() {
    let (zs, zbs) = build_coordinate_pair(&torus(), 12).unwrap();
    assert_eq!(real_time_jacobian_series(&zs, &zbs).unwrap(), TrigPolySeries::one(12));
}

#[test]
fn small_time_expansion_at_origin() {
    // low-order coefficients from the tree-differentiation route
    let nz = naive_lie_series_oracle(TORUS_HAMILTONIAN, Coord::Z, 4).unwrap();
    let nzb = naive_lie_series_oracle(TORUS_HAMILTONIAN, Coord::Zbar, 4).unwrap();
    let oracle = conformal_series(jacobian_series(&nz, &nzb).unwrap()).unwrap();
    let a1 = oracle.a(1).eval(0.0, 0.0).re;
    let a2 = oracle.a(2).eval(0.0, 0.0).re;

    let cs = ConformalSeries::build(&torus(), 12).unwrap();
    for t in [0.05, 0.025] {
        let h = eval_conformal(&cs, 0.0, 0.0, t, EvalMode::Rational).h;
        let expect = 1.0 + a1 * t + a2 * t * t;
        assert!((h - expect).abs() < 50.0 * t.powi(3), "t={t}: {h} vs {expect}");
    }
}

#[test]
fn early_field_is_positive() {
    let cs = ConformalSeries::build(&torus(), 12).unwrap();
    let fg = evaluate_field(&cs, 50, 0.04, EvalMode::Rational, 0).unwrap();
    assert!(fg.values().iter().all(|v| v.h > 0.0 && !v.blowup));
    assert!(fg.values().iter().all(|v| v.im_residual < 1e-12));
}

#[test]
fn shear_field() {
    let h = parse_hamiltonian(SHEAR_HAMILTONIAN).unwrap();
    let holo = ConformalSeries::build_with(&h, 6, Continuation::Holomorphic).unwrap();
    for mode in [EvalMode::Rational, EvalMode::Polynomial] {
        let fg = evaluate_field(&holo, 50, 0.3, mode, 1).unwrap();
        assert!(fg.values().iter().all(|v| v.h == 1.0));
    }
    // conjugate continuation: the real map x ↦ x + t cos2πx
    let cs = ConformalSeries::build(&h, 6).unwrap();
    let fg = evaluate_field(&cs, 50, 0.1, EvalMode::Rational, 1).unwrap();
    for i in 0..50 {
        let (x, _) = fg.point(i, 7);
        let expect = 1.0 / (1.0 - 0.2 * std::f64::consts::PI * (2.0 * std::f64::consts::PI * x).sin());
        assert!((fg.value(i, 7).h - expect).abs() < 1e-12);
    }
}

#[test]
fn sign_map_is_mixed_at_half() {
    let cs = ConformalSeries::build(&torus(), 12).unwrap();
    for t in [0.5, -0.5] {
        let sm = sign_map(&evaluate_field(&cs, 50, t, EvalMode::Rational, 0).unwrap());
        assert!(sm.contains(SignClass::Positive) && sm.contains(SignClass::Negative), "t={t}");
    }
    let flat = ConformalSeries::build(&TrigPoly::zero(), 3).unwrap();
    let sm = sign_map(&evaluate_field(&flat, 20, 0.4, EvalMode::Rational, 1).unwrap());
    assert_eq!(sm.count(SignClass::Positive), 400);
}

#[test]
fn flat_metric_never_degenerates() {
    let cs = ConformalSeries::build(&TrigPoly::zero(), 4).unwrap();
    for dir in [TimeDirection::Positive, TimeDirection::Negative] {
        let opts = CriticalOptions { grid: 20, ..Default::default() };
        assert_eq!(critical_time(&cs, dir, &opts).unwrap(), CriticalTime::NoDegeneration);
    }
    assert_eq!(error_indicator(&cs, 0.3, 0.2, 0.7), f64::NEG_INFINITY);
}

#[test]
fn errmap_valley_at_zero() {
    let cs = ConformalSeries::build(&torus(), 12).unwrap();
    let rows = diagonal_errmap(&cs, 11, -1.0, 1.0, 21, None, 0).unwrap();
    assert_eq!(rows.len(), 231);
    for r in &rows {
        if r.t == 0.0 {
            assert_eq!(r.indicator, f64::NEG_INFINITY);
        }
    }
    assert!(rows.iter().any(|r| r.t.abs() >= 0.8 && r.indicator > 0.0));
}

fn assert_symmetric(fg: &FieldGrid) {
    let g = fg.grid();
    let same = |a: (usize, usize), b: (usize, usize)| {
        let (u, v) = (fg.value(a.0, a.1), fg.value(b.0, b.1));
        u.h == v.h && u.im_residual == v.im_residual && u.denom_abs == v.denom_abs && u.blowup == v.blowup
    };
    for i in 0..g {
        for j in 0..g {
            assert!(same((i, j), (j, i)), "x↔y at ({i},{j})");
            assert!(same((i, j), ((g - i) % g, j)), "x→−x at ({i},{j})");
            assert!(same((i, j), (i, (g - j) % g)), "y→−y at ({i},{j})");
        }
    }
}

#[test]
fn torus_fields_have_exact_grid_symmetry() {
    let cs = ConformalSeries::build(&torus(), 8).unwrap();
    for mode in [EvalMode::Rational, EvalMode::Polynomial] {
        for t in [0.09, -0.2, 0.5] {
            assert_symmetric(&evaluate_field(&cs, 20, t, mode, 2).unwrap());
        }
    }
    assert_symmetric(&evaluate_field(&cs, 50, 0.3, EvalMode::Rational, 1).unwrap());
}

#[test]
fn determinism_across_thread_counts() {
    let cs = ConformalSeries::build(&torus(), 8).unwrap();
    let fields: Vec<_> = [1, 2, 8]
        .iter()
        .map(|&n| evaluate_field(&cs, 30, 0.2, EvalMode::Rational, n).unwrap())
        .collect();
    for f in &fields[1..] {
        let bits = |fg: &FieldGrid| fg.values().iter().map(|v| v.h.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(f), bits(&fields[0]));
    }
}

#[test]
fn oracle_conserves_energy() {
    let h = torus();
    let ctl = StepControl::default();
    for &(x0, y0) in &[(0.1, 0.3), (0.25, 0.25), (0.7, 0.05), (0.45, 0.9)] {
        let e0 = h.eval(x0, y0).re;
        for t in [-1.0, -0.4, 0.3, 1.0] {
            let (x, y) = real_flow_oracle(&h, x0, y0, t, &ctl).unwrap();
            assert!((h.eval(x, y).re - e0).abs() <= 1e-8);
        }
    }
}

#[test]
fn oracle_matches_real_time_lie_series() {
    let h = torus();
    let zs = build_lie_series(&h, Coord::Z, 8).unwrap();
    let ctl = StepControl::with_tolerance(1e-15);
    for t in [0.01, -0.02, 0.04] {
        let (dx, dy) = real_flow_displacement(&h, 0.25, 0.25, t, &ctl).unwrap();
        let s = zs.eval_displacement(0.25, 0.25, Complex64::new(t, 0.0));
        assert!((s - Complex64::new(dx, dy)).norm() < 1e-9, "t={t}");
    }
}

/// Nothing guarantees that the non-positive region grows monotonically,
/// so this only reports what is found.
#[test]
fn monotone_containment_report() {
    let cs = ConformalSeries::build(&torus(), 12).unwrap();
    let bad = |t: f64| -> Vec<bool> {
        let fg = evaluate_field(&cs, 50, t, EvalMode::Rational, 0).unwrap();
        fg.values().iter().map(|v| v.blowup || v.h <= 0.0).collect()
    };
    let times = [0.13, 0.2, 0.3];
    let masks: Vec<_> = times.iter().map(|&t| bad(t)).collect();
    for w in 0..times.len() - 1 {
        let lost = masks[w].iter().zip(&masks[w + 1]).filter(|(a, b)| **a && !**b).count();
        let count = masks[w].iter().filter(|b| **b).count();
        println!(
            "containment {} -> {}: {count} non-positive cells, {lost} of them positive again",
            times[w],
            times[w + 1]
        );
    }
}
