//! Double-precision evaluation of a [`ConformalSeries`].
//!
//! Every coefficient is rewritten over the real basis
//! `cos(πMx)cos(πNy)`, `sin(πMx)cos(πNy)`, ... with `M, N ≥ 0`, and the
//! terms for `(M, N)` and `(N, M)` are summed as one commutative pair. A
//! Hamiltonian invariant under `x ↔ y` or `x → −x` therefore produces grids
//! with the same symmetry bit for bit.

use std::collections::BTreeMap;

use num_complex::Complex64;

use super::ConformalSeries;
use crate::trigpoly::TrigPoly;

/// Default threshold on `|D|` below which a point is flagged as blow-up.
pub const DEFAULT_EPSILON_BLOWUP: f64 = 1e-3;

/// Denominator magnitude below which the error indicator returns `+∞`.
pub const INDICATOR_DENOMINATOR_FLOOR: f64 = 1e-30;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum EvalMode {
    /// `h = 1/D` with the truncated Jacobian `D`.
    #[default]
    Rational,
    /// `h = Σ a_k t^k`.
    Polynomial,
}

impl EvalMode {
    pub fn name(self) -> &'static str {
        match self {
            EvalMode::Rational => "rational",
            EvalMode::Polynomial => "polynomial",
        }
    }
}

impl std::str::FromStr for EvalMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rational" => Ok(EvalMode::Rational),
            "polynomial" => Ok(EvalMode::Polynomial),
            _ => Err(format!("unknown mode `{s}` (expected rational or polynomial)")),
        }
    }
}

impl std::fmt::Display for EvalMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// One pointwise sample of the conformal factor.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConformalValue {
    pub h: f64,
    pub im_residual: f64,
    /// `|D|` in rational mode, `1` in polynomial mode.
    pub denom_abs: f64,
    pub blowup: bool,
}

/// Coefficients of a single `(M, N)` cell over `cc, sc, cs, ss`.
type Quad = [Complex64; 4];

#[derive(Clone, Debug, PartialEq)]
struct PairEntry {
    lo: usize,
    hi: usize,
    /// cell `(lo, hi)` and, when `lo < hi`, its transpose `(hi, lo)`
    first: Quad,
    second: Quad,
}

/// A trigonometric polynomial compiled for symmetric evaluation.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CompiledPoly {
    entries: Vec<PairEntry>,
    max_freq: usize,
}

impl CompiledPoly {
    pub fn new(p: &TrigPoly) -> Self {
        let zero = Complex64::new(0.0, 0.0);
        let mut cells: BTreeMap<(usize, usize), Quad> = BTreeMap::new();
        let mut max_freq = 0;
        for (k, c) in p.to_numeric().terms() {
            let mm = k.m.unsigned_abs() as usize;
            let nn = k.n.unsigned_abs() as usize;
            max_freq = max_freq.max(mm).max(nn);
            let sm = if k.m < 0 { -1.0 } else { 1.0 };
            let sn = if k.n < 0 { -1.0 } else { 1.0 };
            // e^{iπmx}e^{iπny} = (c_x + i sm s_x)(c_y + i sn s_y)
            let q = cells.entry((mm, nn)).or_insert([zero; 4]);
            q[0] += c;
            q[1] += c * sm;
            q[2] += c * sn;
            q[3] += c * (sm * sn);
        }
        let mut entries = Vec::new();
        for (&(m, n), q) in &cells {
            if m > n {
                if !cells.contains_key(&(n, m)) {
                    entries.push(PairEntry { lo: n, hi: m, first: [zero; 4], second: *q });
                }
                continue;
            }
            let second = if m < n { cells.get(&(n, m)).copied().unwrap_or([zero; 4]) } else { [zero; 4] };
            entries.push(PairEntry { lo: m, hi: n, first: *q, second });
        }
        entries.sort_by_key(|e| (e.lo, e.hi));
        CompiledPoly { entries, max_freq }
    }

    pub fn max_freq(&self) -> usize {
        self.max_freq
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Value at the point whose 1-D bases are `bx`, `by`.
    pub fn eval_basis(&self, bx: &Basis1D, by: &Basis1D) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for e in &self.entries {
            let v = if e.lo == e.hi {
                cell(&e.first, bx, by, e.lo, e.hi)
            } else {
                cell(&e.first, bx, by, e.lo, e.hi) + cell(&e.second, bx, by, e.hi, e.lo)
            };
            acc += v;
        }
        acc
    }

    pub fn eval(&self, x: f64, y: f64) -> Complex64 {
        self.eval_basis(&Basis1D::at(x, self.max_freq), &Basis1D::at(y, self.max_freq))
    }
}

#[inline]
fn cell(q: &Quad, bx: &Basis1D, by: &Basis1D, m: usize, n: usize) -> Complex64 {
    let (cx, sx, cy, sy) = (bx.cos[m], bx.sin[m], by.cos[n], by.sin[n]);
    let mixed = q[1] * (sx * cy) + q[2] * (cx * sy);
    q[0] * (cx * cy) + Complex64::new(-mixed.im, mixed.re) - q[3] * (sx * sy)
}

/// `cos(πMu)`, `sin(πMu)` for `M = 0..=max`.
#[derive(Clone, Debug, PartialEq)]
pub struct Basis1D {
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl Basis1D {
    pub fn at(u: f64, max: usize) -> Self {
        let (cos, sin) = (0..=max)
            .map(|m| {
                let a = std::f64::consts::PI * m as f64 * u;
                (a.cos(), a.sin())
            })
            .unzip();
        Basis1D { cos, sin }
    }

    /// Basis at the lattice coordinate `i/G`, read from `table`.
    pub fn lattice(i: usize, table: &LatticeTable, max: usize) -> Self {
        let period = 2 * table.g;
        let (cos, sin) = (0..=max)
            .map(|m| {
                let k = (m * i) % period;
                (table.cos[k], table.sin[k])
            })
            .unzip();
        Basis1D { cos, sin }
    }
}

/// `cos(πk/G)`, `sin(πk/G)` for `k = 0..2G`, mirrored so that entry `2G − k`
/// is the exact conjugate of entry `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeTable {
    g: usize,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl LatticeTable {
    pub fn new(g: usize) -> Self {
        assert!(g >= 1);
        let period = 2 * g;
        let mut cos = vec![0.0; period];
        let mut sin = vec![0.0; period];
        for k in 0..=g {
            let a = std::f64::consts::PI * k as f64 / g as f64;
            cos[k] = a.cos();
            sin[k] = a.sin();
        }
        sin[0] = 0.0;
        cos[g] = -1.0;
        sin[g] = 0.0;
        for k in g + 1..period {
            cos[k] = cos[period - k];
            sin[k] = -sin[period - k];
        }
        LatticeTable { g, cos, sin }
    }

    pub fn grid(&self) -> usize {
        self.g
    }
}

/// Which coefficient sequence a pointwise evaluation needs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeriesPart {
    /// `a_0..a_N`.
    Conformal,
    /// `d_0..d_N`.
    Denominator,
}

impl From<EvalMode> for SeriesPart {
    fn from(mode: EvalMode) -> Self {
        match mode {
            EvalMode::Rational => SeriesPart::Denominator,
            EvalMode::Polynomial => SeriesPart::Conformal,
        }
    }
}

/// Floating-point image of a [`ConformalSeries`].
#[derive(Clone, Debug, PartialEq)]
pub struct NumericConformal {
    a: Vec<CompiledPoly>,
    d: Vec<CompiledPoly>,
    max_freq: usize,
}

impl NumericConformal {
    pub fn new(cs: &ConformalSeries) -> Self {
        let a: Vec<_> = cs.coeffs().iter().map(CompiledPoly::new).collect();
        let d: Vec<_> = cs.denominator().coeffs().iter().map(CompiledPoly::new).collect();
        let max_freq = a.iter().chain(&d).map(CompiledPoly::max_freq).max().unwrap_or(0);
        NumericConformal { a, d, max_freq }
    }

    pub fn order(&self) -> usize {
        self.a.len() - 1
    }

    pub fn max_freq(&self) -> usize {
        self.max_freq
    }

    pub fn part(&self, which: SeriesPart) -> &[CompiledPoly] {
        match which {
            SeriesPart::Conformal => &self.a,
            SeriesPart::Denominator => &self.d,
        }
    }

    /// Coefficient values `c_0(x,y)..c_N(x,y)` of the requested sequence.
    pub fn coefficients_basis(&self, which: SeriesPart, bx: &Basis1D, by: &Basis1D) -> Vec<Complex64> {
        self.part(which).iter().map(|p| p.eval_basis(bx, by)).collect()
    }

    pub fn coefficients_at(&self, which: SeriesPart, x: f64, y: f64) -> Vec<Complex64> {
        let bx = Basis1D::at(x, self.max_freq);
        let by = Basis1D::at(y, self.max_freq);
        self.coefficients_basis(which, &bx, &by)
    }

    pub fn eval(&self, x: f64, y: f64, t: f64, mode: EvalMode, epsilon_blowup: f64) -> ConformalValue {
        value_from_coefficients(&self.coefficients_at(mode.into(), x, y), t, mode, epsilon_blowup)
    }

    pub fn indicator(&self, x: f64, y: f64, t: f64, log_base: Option<f64>) -> f64 {
        indicator_from_coefficients(&self.coefficients_at(SeriesPart::Conformal, x, y), t, log_base)
    }
}

fn horner(c: &[Complex64], t: f64) -> Complex64 {
    c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, ck| acc * t + ck)
}

/// Combine precomputed coefficient values into `h` at time `t`. For
/// [`EvalMode::Rational`] `coeffs` are the `d_k`, otherwise the `a_k`.
pub fn value_from_coefficients(coeffs: &[Complex64], t: f64, mode: EvalMode, epsilon_blowup: f64) -> ConformalValue {
    let s = horner(coeffs, t);
    match mode {
        EvalMode::Polynomial => ConformalValue {
            h: s.re,
            im_residual: s.im.abs(),
            denom_abs: 1.0,
            blowup: false,
        },
        EvalMode::Rational => {
            let denom_abs = s.norm();
            let inv = s.finv();
            ConformalValue {
                h: inv.re,
                im_residual: inv.im.abs(),
                denom_abs,
                blowup: denom_abs < epsilon_blowup,
            }
        }
    }
}

/// `log(|a_N t^N| / |Σ_{k<N} a_k t^k|)` from precomputed `a_k` values.
pub fn indicator_from_coefficients(a: &[Complex64], t: f64, log_base: Option<f64>) -> f64 {
    let n = a.len() - 1;
    let last = (a[n] * t.powi(n as i32)).norm();
    let lower = horner(&a[..n], t).norm();
    if last == 0.0 {
        return f64::NEG_INFINITY;
    }
    if lower < INDICATOR_DENOMINATOR_FLOOR {
        return f64::INFINITY;
    }
    let r = (last / lower).ln();
    match log_base {
        Some(b) => r / b.ln(),
        None => r,
    }
}

/// Pointwise conformal factor with the default blow-up threshold.
pub fn eval_conformal(cs: &ConformalSeries, x: f64, y: f64, t: f64, mode: EvalMode) -> ConformalValue {
    cs.to_numeric().eval(x, y, t, mode, DEFAULT_EPSILON_BLOWUP)
}

/// Truncation-error indicator with the natural logarithm.
///
/// # Panics
/// If the series order is below 2.
pub fn error_indicator(cs: &ConformalSeries, x: f64, y: f64, t: f64) -> f64 {
    assert!(cs.order() >= 2, "error indicator needs order ≥ 2");
    cs.to_numeric().indicator(x, y, t, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hparse::{parse_hamiltonian, TORUS_HAMILTONIAN};
    use crate::trigpoly::{FreqKey, PiRational};

    #[test]
    fn compiled_matches_direct_eval() {
        let p = TrigPoly::from_coeffs([
            (FreqKey::new(2, 4), PiRational::from_ratio(3, 7)),
            (FreqKey::new(-2, 0), PiRational::i()),
            (FreqKey::new(0, -6), PiRational::pi()),
            (FreqKey::new(4, -2), PiRational::from_ratio(-1, 2)),
            (FreqKey::ZERO, PiRational::one()),
        ]);
        let c = CompiledPoly::new(&p);
        for &(x, y) in &[(0.1, 0.7), (0.33, 0.0), (0.9, 0.45)] {
            assert!((c.eval(x, y) - p.eval(x, y)).norm() < 1e-13);
        }
    }

    #[test]
    fn lattice_basis_agrees_with_direct() {
        let table = LatticeTable::new(50);
        for i in [0, 1, 17, 25, 49] {
            let lb = Basis1D::lattice(i, &table, 48);
            let db = Basis1D::at(i as f64 / 50.0, 48);
            for m in 0..=48 {
                assert!((lb.cos[m] - db.cos[m]).abs() < 1e-13);
                assert!((lb.sin[m] - db.sin[m]).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn initial_time_is_flat() {
        let h = parse_hamiltonian(TORUS_HAMILTONIAN).unwrap();
        let cs = ConformalSeries::build(&h, 4).unwrap();
        for mode in [EvalMode::Rational, EvalMode::Polynomial] {
            let v = eval_conformal(&cs, 0.3, 0.8, 0.0, mode);
            assert_eq!(v.h, 1.0);
            assert!(!v.blowup);
        }
    }

    #[test]
    fn indicator_sentinels() {
        let a = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(2.0, 0.0)];
        assert_eq!(indicator_from_coefficients(&a, 0.0, None), f64::NEG_INFINITY);
        let b = [Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(2.0, 0.0)];
        assert_eq!(indicator_from_coefficients(&b, 0.5, None), f64::INFINITY);
        let v = indicator_from_coefficients(&a, 0.5, Some(10.0));
        assert!((v - (0.5f64).log10()).abs() < 1e-15);
    }

    #[test]
    fn rational_flags_blowup() {
        let d = [Complex64::new(1.0, 0.0), Complex64::new(-2.0, 0.0)];
        let v = value_from_coefficients(&d, 0.49999, EvalMode::Rational, 1e-3);
        assert!(v.blowup);
        assert!(v.h > 0.0);
        let v = value_from_coefficients(&d, 0.6, EvalMode::Rational, 1e-3);
        assert!(!v.blowup);
        assert!((v.h + 5.0).abs() < 1e-12);
    }

    #[test]
    fn mode_parsing() {
        assert_eq!("rational".parse::<EvalMode>(), Ok(EvalMode::Rational));
        assert_eq!("polynomial".parse::<EvalMode>(), Ok(EvalMode::Polynomial));
        assert!("poly".parse::<EvalMode>().is_err());
    }
}
