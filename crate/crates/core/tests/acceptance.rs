//! Acceptance gate. Runs every criterion, prints one PASS/FAIL line each
//! and exits non-zero if any failed.

use std::time::{Duration, Instant};

use num_complex::Complex64;

use kgflow_core::hamflow::{
    apply_xh, build_coordinate_pair, build_lie_series, naive_lie_series_oracle, Coord, Seed,
};
use kgflow_core::hparse::{parse_hamiltonian, SHEAR_HAMILTONIAN, TORUS_HAMILTONIAN};
use kgflow_core::lattice::{
    critical_time, diagonal_errmap, evaluate_field, real_flow_displacement, sign_map, CriticalOptions,
    CriticalTime, SignClass, StepControl, TimeDirection,
};
use kgflow_core::moser::{
    conformal_series, eval_conformal, jacobian_series, real_time_jacobian_series, ConformalSeries, EvalMode,
    TrigPolySeries,
};
use kgflow_core::trigpoly::TrigPoly;

struct Report {
    rows: Vec<(String, bool, String)>,
}

impl Report {
    fn record(&mut self, id: &str, ok: bool, detail: String) {
        println!("[{}] criterion {id}: {detail}", if ok { "PASS" } else { "FAIL" });
        self.rows.push((id.to_string(), ok, detail));
    }
}

fn secs(d: Duration) -> f64 {
    d.as_secs_f64()
}

fn torus() -> TrigPoly {
    parse_hamiltonian(TORUS_HAMILTONIAN).unwrap()
}

fn critical(cs: &ConformalSeries, dir: TimeDirection, lo: f64, hi: f64, report: &mut Report, id: &str) {
    let start = Instant::now();
    let res = critical_time(cs, dir, &CriticalOptions::default()).unwrap();
    let elapsed = start.elapsed();
    let (ok, detail) = match res {
        CriticalTime::At(t) => {
            let inside = (lo..=hi).contains(&t.abs());
            (
                inside && elapsed < Duration::from_secs(600),
                format!("|t_c| = {:.4} (window [{lo}, {hi}]), {:.1} s", t.abs(), secs(elapsed)),
            )
        }
        CriticalTime::NoDegeneration => (false, "no degeneration in range".to_string()),
    };
    report.record(id, ok, detail);
}

fn mixed_polarization(cs: &ConformalSeries, report: &mut Report) {
    let mut ok = true;
    let mut parts = Vec::new();
    for t in [0.5, -0.5] {
        let fg = evaluate_field(cs, 200, t, EvalMode::Rational, 0).unwrap();
        let sm = sign_map(&fg);
        let (p, n, b) = (
            sm.count(SignClass::Positive),
            sm.count(SignClass::Negative),
            sm.count(SignClass::Blowup),
        );
        ok &= p > 0 && n > 0;
        let mut saddles = Vec::new();
        for (cx, cy) in [(0.0, 0.5), (0.5, 0.0)] {
            let near = sm.classes_near(cx, cy, 0.15);
            let both = near.contains(&SignClass::Positive) && near.contains(&SignClass::Negative);
            ok &= both;
            saddles.push(format!("({cx},{cy}):{}", if both { "mixed" } else { "single" }));
        }
        parts.push(format!("t={t:+}: +{p}/-{n}/blowup {b}, {}", saddles.join(" ")));
    }
    report.record("3", ok, parts.join("; "));
}

fn error_indicator(cs: &ConformalSeries, report: &mut Report) {
    let mut ok = true;
    let mut detail = Vec::new();
    for t in [0.4, -0.4] {
        let rows = diagonal_errmap(cs, 50, t, t, 1, None, 0).unwrap();
        let max = rows.iter().map(|r| r.indicator).fold(f64::NEG_INFINITY, f64::max);
        ok &= rows.iter().all(|r| r.indicator < 0.0);
        detail.push(format!("max at t={t:+} is {max:.3}"));
    }
    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    for sign in [1.0, -1.0] {
        let rows = diagonal_errmap(cs, 50, 0.8 * sign, 1.0 * sign, 21, None, 0).unwrap();
        for r in rows {
            if r.indicator > best.0 {
                best = (r.indicator, r.s, r.t);
            }
        }
    }
    ok &= best.0 > 0.0;
    detail.push(format!("max over |t|∈[0.8,1] is {:.3} at s={:.3}, t={:+.2}", best.0, best.1, best.2));
    report.record("4", ok, detail.join("; "));
}

fn exact_invariants(cs: &ConformalSeries, report: &mut Report) {
    let h = torus();
    let n = cs.order();
    let mut failed = Vec::new();
    let mut check = |name: &str, ok: bool| {
        if !ok {
            failed.push(name.to_string());
        }
    };
    check("a_0 ≡ 1", *cs.a(0) == TrigPoly::one());
    check("a_1 ≡ 0", cs.a(1).is_zero());
    check("Im a_k ≡ 0", cs.coeffs().iter().all(|a| a.imag_part().is_zero()));
    check("X_H H ≡ 0", apply_xh(&h, Seed::Func(&h)).unwrap().is_zero());
    let (zs, zbs) = build_coordinate_pair(&h, n).unwrap();
    let real = real_time_jacobian_series(&zs, &zbs).unwrap();
    check("real-time d_k ≡ 0", real == TrigPolySeries::one(n));
    let direct_zbar = build_lie_series(&h, Coord::Zbar, n).unwrap();
    check("z̄ series = conj(z series)", direct_zbar == zs.conjugate());

    let shear = parse_hamiltonian(SHEAR_HAMILTONIAN).unwrap();
    let (ss, sbs) = build_coordinate_pair(&shear, n).unwrap();
    let d = jacobian_series(&ss, &sbs).unwrap();
    check("shear D ≡ 1", d == TrigPolySeries::one(n));
    let shear_cs = conformal_series(d).unwrap();
    let h_one = [(0.1, 0.2, 0.05), (0.7, 0.3, -0.1), (0.25, 0.9, 0.15)]
        .iter()
        .all(|&(x, y, t)| eval_conformal(&shear_cs, x, y, t, EvalMode::Rational).h == 1.0);
    check("shear h ≡ 1", h_one);

    let detail = if failed.is_empty() {
        format!("all 9 identities hold through order {n}")
    } else {
        format!("violated: {}", failed.join(", "))
    };
    report.record("5", failed.is_empty(), detail);
}

fn oracle_equivalence(report: &mut Report) {
    let h = torus();
    let mut ok = true;
    for n in 1..=4 {
        let nz = naive_lie_series_oracle(TORUS_HAMILTONIAN, Coord::Z, n).unwrap();
        let nzb = naive_lie_series_oracle(TORUS_HAMILTONIAN, Coord::Zbar, n).unwrap();
        let (fz, fzb) = build_coordinate_pair(&h, n).unwrap();
        ok &= nz == fz && nzb == fzb;
        let naive_cs = conformal_series(jacobian_series(&nz, &nzb).unwrap()).unwrap();
        let fourier_cs = ConformalSeries::build(&h, n).unwrap();
        ok &= naive_cs.coeffs() == fourier_cs.coeffs();
    }
    report.record("6", ok, "naive tree differentiation vs Fourier pipeline, w_k and a_k for N = 1..4".into());
}

fn convergence_order(report: &mut Report) {
    let h = torus();
    let n = 4;
    let zs = build_lie_series(&h, Coord::Z, n).unwrap();
    let ctl = StepControl::with_tolerance(1e-16);
    let (x0, y0) = (0.25, 0.25);
    let mut pts = Vec::new();
    for j in 0..4 {
        let t = 0.02 * 0.5f64.powi(j);
        let series = zs.eval_displacement(x0, y0, Complex64::new(t, 0.0));
        let (dx, dy) = real_flow_displacement(&h, x0, y0, t, &ctl).unwrap();
        let err = (series - Complex64::new(dx, dy)).norm();
        pts.push((t.ln(), err.ln()));
    }
    // least-squares slope of ln(err) against ln(t)
    let m = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), p| (a + p.0, b + p.1));
    let (mx, my) = (sx / m, sy / m);
    let num: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let den: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = num / den;
    let target = (n + 1) as f64;
    let errs: Vec<String> = pts.iter().map(|p| format!("{:.2e}", p.1.exp())).collect();
    report.record(
        "7",
        (slope - target).abs() <= 0.5,
        format!("fitted slope {slope:.3} (target {target} ± 0.5), errors [{}]", errs.join(", ")),
    );
}

fn performance(build_time: Duration, cs: &ConformalSeries, report: &mut Report) {
    let start = Instant::now();
    let fg = evaluate_field(cs, 50, 0.1, EvalMode::Rational, 1).unwrap();
    let field_time = start.elapsed();
    assert_eq!(fg.values().len(), 2500);
    report.record(
        "8",
        build_time <= Duration::from_secs(60) && field_time <= Duration::from_secs(5),
        format!(
            "N=12 series build {:.2} s (limit 60), G=50 field {:.3} s (limit 5), single thread",
            secs(build_time),
            secs(field_time)
        ),
    );
}

fn determinism(cs: &ConformalSeries, report: &mut Report) {
    let mut ok = true;
    for mode in [EvalMode::Rational, EvalMode::Polynomial] {
        for t in [0.1, -0.3, 0.5] {
            let bits = |threads: usize| -> Vec<u64> {
                evaluate_field(cs, 50, t, mode, threads)
                    .unwrap()
                    .values()
                    .iter()
                    .flat_map(|v| [v.h.to_bits(), v.im_residual.to_bits(), v.denom_abs.to_bits(), u64::from(v.blowup)])
                    .collect()
            };
            let one = bits(1);
            ok &= bits(2) == one && bits(8) == one;
        }
    }
    report.record("9", ok, "G=50 fields, both modes, t ∈ {0.1, −0.3, 0.5}, threads {1, 2, 8}".into());
}

fn main() {
    let mut report = Report { rows: Vec::new() };
    let h = torus();
    let start = Instant::now();
    let cs = ConformalSeries::build(&h, 12).unwrap();
    let build_time = start.elapsed();

    critical(&cs, TimeDirection::Positive, 0.113, 0.125, &mut report, "1");
    critical(&cs, TimeDirection::Negative, 0.115, 0.127, &mut report, "2");
    mixed_polarization(&cs, &mut report);
    error_indicator(&cs, &mut report);
    exact_invariants(&cs, &mut report);
    oracle_equivalence(&mut report);
    convergence_order(&mut report);
    performance(build_time, &cs, &mut report);
    determinism(&cs, &mut report);

    let failed: Vec<&str> = report.rows.iter().filter(|r| !r.1).map(|r| r.0.as_str()).collect();
    println!(
        "acceptance: {} of {} criteria passed",
        report.rows.len() - failed.len(),
        report.rows.len()
    );
    if !failed.is_empty() {
        println!("acceptance: failing criteria {}", failed.join(", "));
        std::process::exit(1);
    }
}
