//! Uniform torus lattices: conformal-factor fields, sign maps, error maps
//! along the diagonal and the search for the first degeneration time.
//!
//! Lattice points are the cell corners `x_i = i/G`, `y_j = j/G` for
//! `i, j ∈ 0..G`; storage is row-major with `j` fastest.

mod exec;
mod flow;
pub mod io;

pub use exec::{default_threads, Executor};
pub use flow::{real_flow_displacement, real_flow_oracle, real_flow_trajectory, StepControl};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::moser::{
    indicator_from_coefficients, value_from_coefficients, Basis1D, ConformalSeries, ConformalValue, EvalMode,
    LatticeTable, NumericConformal, SeriesPart, DEFAULT_EPSILON_BLOWUP,
};

/// Descriptive fields carried into every output file.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldMeta {
    pub hamiltonian: String,
    pub order: usize,
    pub threads: usize,
    pub epsilon_blowup: f64,
}

/// Evaluation settings shared by the lattice operations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LatticeOptions {
    /// `0` selects [`default_threads`].
    pub threads: usize,
    pub epsilon_blowup: f64,
}

impl Default for LatticeOptions {
    fn default() -> Self {
        LatticeOptions {
            threads: 0,
            epsilon_blowup: DEFAULT_EPSILON_BLOWUP,
        }
    }
}

impl LatticeOptions {
    pub fn with_threads(threads: usize) -> Self {
        LatticeOptions { threads, ..LatticeOptions::default() }
    }
}

/// Per-point coefficient values `c_0(x_i, y_j)..c_N(x_i, y_j)` on a lattice.
/// Evaluating at many `t` only needs a Horner sweep over this table.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientGrid {
    g: usize,
    part: SeriesPart,
    values: Vec<Vec<Complex64>>,
}

impl CoefficientGrid {
    pub fn sample(num: &NumericConformal, part: SeriesPart, g: usize, exec: &Executor) -> Result<Self> {
        if g < 2 {
            return Err(Error::InvalidGrid(g));
        }
        let table = LatticeTable::new(g);
        let max = num.max_freq();
        let bases: Vec<Basis1D> = (0..g).map(|i| Basis1D::lattice(i, &table, max)).collect();
        let rows = exec.map(g, |i| {
            let bx = &bases[i];
            bases.iter().map(|by| num.coefficients_basis(part, bx, by)).collect::<Vec<_>>()
        });
        Ok(CoefficientGrid {
            g,
            part,
            values: rows.into_iter().flatten().collect(),
        })
    }

    pub fn grid(&self) -> usize {
        self.g
    }

    pub fn part(&self) -> SeriesPart {
        self.part
    }

    pub fn at(&self, i: usize, j: usize) -> &[Complex64] {
        &self.values[i * self.g + j]
    }
}

/// Conformal-factor samples on a `G × G` lattice at one time.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldGrid {
    g: usize,
    t: f64,
    mode: EvalMode,
    values: Vec<ConformalValue>,
    meta: FieldMeta,
}

impl FieldGrid {
    pub fn grid(&self) -> usize {
        self.g
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn mode(&self) -> EvalMode {
        self.mode
    }

    pub fn meta(&self) -> &FieldMeta {
        &self.meta
    }

    pub fn values(&self) -> &[ConformalValue] {
        &self.values
    }

    pub fn value(&self, i: usize, j: usize) -> &ConformalValue {
        &self.values[i * self.g + j]
    }

    pub fn blowup_mask(&self) -> Vec<bool> {
        self.values.iter().map(|v| v.blowup).collect()
    }

    /// Coordinates of lattice point `(i, j)`.
    pub fn point(&self, i: usize, j: usize) -> (f64, f64) {
        lattice_point(self.g, i, j)
    }

    /// Smallest `h` over the lattice, ignoring blow-up flags.
    pub fn min_h(&self) -> f64 {
        self.values.iter().map(|v| v.h).fold(f64::INFINITY, f64::min)
    }
}

pub fn lattice_point(g: usize, i: usize, j: usize) -> (f64, f64) {
    (i as f64 / g as f64, j as f64 / g as f64)
}

fn meta_for(cs: &ConformalSeries, exec: &Executor, opts: &LatticeOptions) -> FieldMeta {
    FieldMeta {
        hamiltonian: cs.hamiltonian_digest().to_string(),
        order: cs.order(),
        threads: exec.threads(),
        epsilon_blowup: opts.epsilon_blowup,
    }
}

/// Conformal factor at every lattice point. The result does not depend on
/// the thread count.
pub fn evaluate_field(cs: &ConformalSeries, g: usize, t: f64, mode: EvalMode, threads: usize) -> Result<FieldGrid> {
    evaluate_field_with(cs, g, t, mode, &LatticeOptions::with_threads(threads))
}

pub fn evaluate_field_with(
    cs: &ConformalSeries,
    g: usize,
    t: f64,
    mode: EvalMode,
    opts: &LatticeOptions,
) -> Result<FieldGrid> {
    let exec = Executor::new(opts.threads);
    let coeffs = CoefficientGrid::sample(&cs.to_numeric(), mode.into(), g, &exec)?;
    Ok(field_from_coefficients(&coeffs, t, mode, meta_for(cs, &exec, opts), &exec))
}

/// Field at time `t` from a precomputed coefficient table.
///
/// # Panics
/// If `coeffs` holds the wrong sequence for `mode`.
pub fn field_from_coefficients(
    coeffs: &CoefficientGrid,
    t: f64,
    mode: EvalMode,
    meta: FieldMeta,
    exec: &Executor,
) -> FieldGrid {
    assert_eq!(coeffs.part(), SeriesPart::from(mode), "coefficient table does not match mode");
    let g = coeffs.grid();
    let eps = meta.epsilon_blowup;
    let rows = exec.map(g, |i| {
        (0..g)
            .map(|j| value_from_coefficients(coeffs.at(i, j), t, mode, eps))
            .collect::<Vec<_>>()
    });
    FieldGrid {
        g,
        t,
        mode,
        values: rows.into_iter().flatten().collect(),
        meta,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SignClass {
    Positive,
    Negative,
    Blowup,
}

/// Per-point sign of the conformal factor.
#[derive(Clone, Debug, PartialEq)]
pub struct SignMap {
    g: usize,
    classes: Vec<SignClass>,
}

impl SignMap {
    pub fn grid(&self) -> usize {
        self.g
    }

    pub fn classes(&self) -> &[SignClass] {
        &self.classes
    }

    pub fn class(&self, i: usize, j: usize) -> SignClass {
        self.classes[i * self.g + j]
    }

    pub fn count(&self, c: SignClass) -> usize {
        self.classes.iter().filter(|&&k| k == c).count()
    }

    pub fn contains(&self, c: SignClass) -> bool {
        self.classes.contains(&c)
    }

    /// Classes of the lattice points within periodic distance `r` of `(cx, cy)`.
    pub fn classes_near(&self, cx: f64, cy: f64, r: f64) -> Vec<SignClass> {
        let wrap = |d: f64| {
            let d = d.rem_euclid(1.0);
            d.min(1.0 - d)
        };
        let mut out = Vec::new();
        for i in 0..self.g {
            for j in 0..self.g {
                let (x, y) = lattice_point(self.g, i, j);
                if wrap(x - cx).hypot(wrap(y - cy)) <= r {
                    out.push(self.class(i, j));
                }
            }
        }
        out
    }
}

/// `blowup` if `|D| < ε`, otherwise the sign of `h` (zero counts as negative).
pub fn sign_map(fg: &FieldGrid) -> SignMap {
    let classes = fg
        .values
        .iter()
        .map(|v| {
            if v.blowup {
                SignClass::Blowup
            } else if v.h > 0.0 {
                SignClass::Positive
            } else {
                SignClass::Negative
            }
        })
        .collect();
    SignMap { g: fg.g, classes }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TimeDirection {
    Positive,
    Negative,
}

impl TimeDirection {
    pub fn sign(self) -> f64 {
        match self {
            TimeDirection::Positive => 1.0,
            TimeDirection::Negative => -1.0,
        }
    }
}

impl std::str::FromStr for TimeDirection {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "pos" | "positive" | "+" => Ok(TimeDirection::Positive),
            "neg" | "negative" | "-" => Ok(TimeDirection::Negative),
            _ => Err(format!("unknown direction `{s}` (expected pos or neg)")),
        }
    }
}

/// Settings for [`critical_time`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CriticalOptions {
    pub grid: usize,
    pub t_max: f64,
    pub coarse_step: f64,
    pub tol: f64,
    pub mode: EvalMode,
    pub lattice: LatticeOptions,
}

impl Default for CriticalOptions {
    fn default() -> Self {
        CriticalOptions {
            grid: 200,
            t_max: 0.5,
            coarse_step: 0.005,
            tol: 1e-4,
            mode: EvalMode::Rational,
            lattice: LatticeOptions::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CriticalTime {
    /// Signed time of the first degeneration found.
    At(f64),
    NoDegeneration,
}

/// `true` if some lattice point has `h ≤ 0` or is flagged as blow-up at `t`.
pub fn is_degenerate(coeffs: &CoefficientGrid, t: f64, mode: EvalMode, epsilon_blowup: f64, exec: &Executor) -> bool {
    let g = coeffs.grid();
    exec.any(g, |i| {
        (0..g).any(|j| {
            let v = value_from_coefficients(coeffs.at(i, j), t, mode, epsilon_blowup);
            v.blowup || v.h <= 0.0
        })
    })
}

/// Earliest `|t|` in `(0, t_max]` at which the lattice field degenerates:
/// coarse scan, then bisection down to `tol`. The returned time is the
/// degenerate end of the final bracket.
pub fn critical_time(cs: &ConformalSeries, direction: TimeDirection, opts: &CriticalOptions) -> Result<CriticalTime> {
    if !(opts.coarse_step > 0.0 && opts.tol > 0.0 && opts.t_max > 0.0) {
        return Err(Error::InvalidArgument(
            "t_max, coarse step and tolerance must be positive".into(),
        ));
    }
    let exec = Executor::new(opts.lattice.threads);
    let coeffs = CoefficientGrid::sample(&cs.to_numeric(), opts.mode.into(), opts.grid, &exec)?;
    let sign = direction.sign();
    let eps = opts.lattice.epsilon_blowup;
    let bad = |tau: f64| is_degenerate(&coeffs, sign * tau, opts.mode, eps, &exec);

    let steps = (opts.t_max / opts.coarse_step + 1e-9).floor() as usize;
    let mut lo = 0.0;
    let mut hi = None;
    for k in 1..=steps {
        let tau = k as f64 * opts.coarse_step;
        if bad(tau) {
            hi = Some(tau);
            break;
        }
        lo = tau;
    }
    // the last partial step up to t_max
    if hi.is_none() && lo < opts.t_max && bad(opts.t_max) {
        hi = Some(opts.t_max);
    }
    let Some(mut hi) = hi else {
        return Ok(CriticalTime::NoDegeneration);
    };
    while hi - lo > opts.tol {
        let mid = 0.5 * (lo + hi);
        if bad(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(CriticalTime::At(sign * hi))
}

/// One sample of [`diagonal_errmap`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrmapSample {
    pub s: f64,
    pub t: f64,
    pub indicator: f64,
}

/// `n` evenly spaced values from `a` to `b`, both included.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n)
            .map(|k| {
                let u = k as f64 / (n - 1) as f64;
                a * (1.0 - u) + b * u
            })
            .collect(),
    }
}

/// Truncation-error indicator at `x = y = s`, `s ∈ [0, 0.5]`, over a
/// `samples_s × samples_t` grid; `s` is the outer loop.
pub fn diagonal_errmap(
    cs: &ConformalSeries,
    samples_s: usize,
    t_min: f64,
    t_max: f64,
    samples_t: usize,
    log_base: Option<f64>,
    threads: usize,
) -> Result<Vec<ErrmapSample>> {
    if cs.order() < 2 {
        return Err(Error::InvalidOrder { got: cs.order(), min: 2 });
    }
    let num = cs.to_numeric();
    let ss = linspace(0.0, 0.5, samples_s);
    let ts = linspace(t_min, t_max, samples_t);
    let exec = Executor::new(threads);
    let rows = exec.map(ss.len(), |k| {
        let s = ss[k];
        let a = num.coefficients_at(SeriesPart::Conformal, s, s);
        ts.iter()
            .map(|&t| ErrmapSample { s, t, indicator: indicator_from_coefficients(&a, t, log_base) })
            .collect::<Vec<_>>()
    });
    Ok(rows.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hparse::{parse_hamiltonian, SHEAR_HAMILTONIAN, TORUS_HAMILTONIAN};

    fn series(text: &str, n: usize) -> ConformalSeries {
        ConformalSeries::build(&parse_hamiltonian(text).unwrap(), n).unwrap()
    }

    #[test]
    fn flat_field() {
        let cs = series("0", 4);
        for mode in [EvalMode::Rational, EvalMode::Polynomial] {
            let fg = evaluate_field(&cs, 8, 0.3, mode, 1).unwrap();
            assert!(fg.values().iter().all(|v| v.h == 1.0 && !v.blowup));
            let sm = sign_map(&fg);
            assert_eq!(sm.count(SignClass::Positive), 64);
        }
        assert_eq!(
            critical_time(&cs, TimeDirection::Positive, &CriticalOptions { grid: 10, ..Default::default() }),
            Ok(CriticalTime::NoDegeneration)
        );
    }

    #[test]
    fn grid_too_small() {
        let cs = series("0", 2);
        assert_eq!(evaluate_field(&cs, 1, 0.1, EvalMode::Rational, 1), Err(Error::InvalidGrid(1)));
    }

    #[test]
    fn lattice_matches_pointwise() {
        let cs = series(TORUS_HAMILTONIAN, 4);
        let fg = evaluate_field(&cs, 10, 0.07, EvalMode::Rational, 2).unwrap();
        let num = cs.to_numeric();
        for (i, j) in [(0, 0), (3, 7), (9, 1)] {
            let (x, y) = fg.point(i, j);
            let v = num.eval(x, y, 0.07, EvalMode::Rational, DEFAULT_EPSILON_BLOWUP);
            assert!((v.h - fg.value(i, j).h).abs() < 1e-12);
        }
    }

    #[test]
    fn shear_degenerates_at_inverse_two_pi() {
        // D = 1 − 2πt sin2πx reaches ε first at t = (1 − ε)/(2π)
        let cs = series(SHEAR_HAMILTONIAN, 3);
        let opts = CriticalOptions { grid: 8, tol: 1e-7, ..Default::default() };
        let CriticalTime::At(t) = critical_time(&cs, TimeDirection::Positive, &opts).unwrap() else {
            panic!("expected degeneration");
        };
        let expect = (1.0 - DEFAULT_EPSILON_BLOWUP) / (2.0 * std::f64::consts::PI);
        assert!((t - expect).abs() < 1e-6, "{t} vs {expect}");
    }

    #[test]
    fn linspace_endpoints() {
        let v = linspace(-1.0, 1.0, 201);
        assert_eq!(v[0], -1.0);
        assert_eq!(v[100], 0.0);
        assert_eq!(v[200], 1.0);
        assert_eq!(linspace(0.0, 0.5, 1), vec![0.0]);
    }

    #[test]
    fn errmap_zero_time_row() {
        let cs = series(TORUS_HAMILTONIAN, 4);
        let rows = diagonal_errmap(&cs, 5, -1.0, 1.0, 3, None, 1).unwrap();
        assert_eq!(rows.len(), 15);
        assert!(rows.iter().filter(|r| r.t == 0.0).all(|r| r.indicator == f64::NEG_INFINITY));
        assert_eq!((rows[0].s, rows[0].t), (0.0, -1.0));
        assert_eq!((rows[14].s, rows[14].t), (0.5, 1.0));
    }

    #[test]
    fn neighbourhood_wraps() {
        let sm = SignMap { g: 10, classes: vec![SignClass::Positive; 100] };
        // (0, 0.5) with radius 0.15 reaches across x = 0
        let near = sm.classes_near(0.0, 0.5, 0.15);
        assert_eq!(near.len(), sm.classes_near(0.5, 0.5, 0.15).len());
    }
}
