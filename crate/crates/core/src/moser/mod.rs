//! Conformal factor of the approximate geodesic.
//!
//! With `τ = it` the Moser map pulls the coordinate `z` back to the truncated
//! series `Z(t) = z + Σ (it)^k/k! w_k`. The evolving metric coefficient is
//! `h(t) = h(0) / D(t)` with the Jacobian
//!
//! ```text
//! D = ∂z Z · ∂z̄ Z̄ − ∂z̄ Z · ∂z Z̄
//! ```
//!
//! truncated at order N, and `Σ a_k t^k` is its truncated reciprocal.

mod eval;

pub use eval::{
    error_indicator, eval_conformal, indicator_from_coefficients, value_from_coefficients, Basis1D, CompiledPoly,
    ConformalValue, EvalMode, LatticeTable, NumericConformal, SeriesPart, DEFAULT_EPSILON_BLOWUP,
    INDICATOR_DENOMINATOR_FLOOR,
};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::error::{Error, Result};
use crate::hamflow::{build_coordinate_pair, Coord, CoordLieSeries};
use crate::hparse::to_expression;
use crate::trigpoly::{Direction, GaussRat, PiRational, TrigPoly};

/// How `Z̄(it)` is continued from real to imaginary time.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Continuation {
    /// `Z̄(it)` is the pointwise complex conjugate of `Z(it)`, i.e. the
    /// `z̄` series evaluated at `τ = −it`. `D` is then the Jacobian of the
    /// real map `(x, y) ↦ (Re Z, Im Z)`.
    #[default]
    Conjugate,
    /// `Z̄(it)` is the `z̄` series evaluated at `τ = it`. The complexified
    /// flow is symplectic for every τ, so this gives `D ≡ 1`.
    Holomorphic,
}

/// `Σ_{k=0..N} t^k c_k` with trigonometric-polynomial coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigPolySeries {
    coeffs: Vec<TrigPoly>,
}

impl TrigPolySeries {
    pub fn new(coeffs: Vec<TrigPoly>) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least the constant term");
        TrigPolySeries { coeffs }
    }

    /// `1 + 0·t + ... + 0·t^N`.
    pub fn one(order: usize) -> Self {
        let mut coeffs = vec![TrigPoly::zero(); order + 1];
        coeffs[0] = TrigPoly::one();
        TrigPolySeries { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> &TrigPoly {
        &self.coeffs[k]
    }

    pub fn coeffs(&self) -> &[TrigPoly] {
        &self.coeffs
    }

    /// Cauchy product truncated at `min(self.order, rhs.order)`.
    pub fn mul_truncated(&self, rhs: &TrigPolySeries) -> TrigPolySeries {
        let n = self.order().min(rhs.order());
        let mut out = vec![TrigPoly::zero(); n + 1];
        for (j, a) in self.coeffs.iter().enumerate().take(n + 1) {
            if a.is_zero() {
                continue;
            }
            for (l, b) in rhs.coeffs.iter().enumerate().take(n + 1 - j) {
                if b.is_zero() {
                    continue;
                }
                out[j + l].add_assign(&a.mul(b));
            }
        }
        TrigPolySeries { coeffs: out }
    }

    pub fn sub(&self, rhs: &TrigPolySeries) -> TrigPolySeries {
        assert_eq!(self.order(), rhs.order());
        TrigPolySeries {
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a.sub(b)).collect(),
        }
    }

    /// `c_k(−t)`: flips the sign of odd coefficients.
    pub fn reflect_time(&self) -> TrigPolySeries {
        TrigPolySeries {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| if k % 2 == 1 { c.neg() } else { c.clone() })
                .collect(),
        }
    }
}

/// `phase^k / k!` as an exact scalar.
fn series_factor(phase: &GaussRat, k: usize) -> PiRational {
    let mut g = GaussRat::one();
    let mut fact = BigInt::one();
    for j in 1..=k {
        g = &g * phase;
        fact *= BigInt::from(j);
    }
    PiRational::from_gauss(g.scale(&BigRational::new(BigInt::one(), fact)), 0)
}

/// `affine + Σ_{k≥1} (phase·t)^k/k! · ∂_dir w_k` as a t-series.
fn derivative_series(
    s: &CoordLieSeries,
    dir: Direction,
    phase: &GaussRat,
    affine: bool,
) -> TrigPolySeries {
    let mut coeffs = Vec::with_capacity(s.order() + 1);
    coeffs.push(if affine { TrigPoly::one() } else { TrigPoly::zero() });
    for k in 1..=s.order() {
        coeffs.push(s.w(k).diff(dir).scale(&series_factor(phase, k)));
    }
    TrigPolySeries { coeffs }
}

fn check_pair(zs: &CoordLieSeries, zbs: &CoordLieSeries) -> Result<()> {
    if zs.which() != Coord::Z || zbs.which() != Coord::Zbar {
        return Err(Error::MismatchedSeries("expected (z, z̄) series in that order".into()));
    }
    if zs.order() != zbs.order() {
        return Err(Error::MismatchedSeries(format!(
            "orders differ: {} vs {}",
            zs.order(),
            zbs.order()
        )));
    }
    if zs.hamiltonian() != zbs.hamiltonian() {
        return Err(Error::MismatchedSeries("Hamiltonians differ".into()));
    }
    Ok(())
}

fn jacobian_with_phases(
    zs: &CoordLieSeries,
    zbs: &CoordLieSeries,
    z_phase: GaussRat,
    zbar_phase: GaussRat,
) -> Result<TrigPolySeries> {
    check_pair(zs, zbs)?;
    // with z = x + iy the "affine" parts are ∂z z = 1 and ∂z̄ z̄ = 1
    let a = derivative_series(zs, Direction::Z, &z_phase, true);
    let b = derivative_series(zs, Direction::Zbar, &z_phase, false);
    let c = derivative_series(zbs, Direction::Z, &zbar_phase, false);
    let e = derivative_series(zbs, Direction::Zbar, &zbar_phase, true);
    Ok(a.mul_truncated(&e).sub(&b.mul_truncated(&c)))
}

/// Jacobian series `D(t)` at imaginary time `τ = it`, using the default
/// [`Continuation::Conjugate`].
pub fn jacobian_series(zs: &CoordLieSeries, zbs: &CoordLieSeries) -> Result<TrigPolySeries> {
    jacobian_series_with(zs, zbs, Continuation::Conjugate)
}

pub fn jacobian_series_with(
    zs: &CoordLieSeries,
    zbs: &CoordLieSeries,
    continuation: Continuation,
) -> Result<TrigPolySeries> {
    let i = GaussRat::i();
    let zbar_phase = match continuation {
        Continuation::Conjugate => i.conj(),
        Continuation::Holomorphic => i.clone(),
    };
    jacobian_with_phases(zs, zbs, i, zbar_phase)
}

/// Jacobian of the real-time flow, `τ = t`. The flow is a symplectomorphism
/// so every coefficient past the constant vanishes.
pub fn real_time_jacobian_series(zs: &CoordLieSeries, zbs: &CoordLieSeries) -> Result<TrigPolySeries> {
    jacobian_with_phases(zs, zbs, GaussRat::one(), GaussRat::one())
}

/// Truncated series `Σ a_k t^k` of the conformal factor.
#[derive(Clone, Debug, PartialEq)]
pub struct ConformalSeries {
    a: Vec<TrigPoly>,
    denominator: TrigPolySeries,
    hamiltonian_digest: String,
}

impl ConformalSeries {
    pub fn order(&self) -> usize {
        self.a.len() - 1
    }

    pub fn a(&self, k: usize) -> &TrigPoly {
        &self.a[k]
    }

    pub fn coeffs(&self) -> &[TrigPoly] {
        &self.a
    }

    pub fn denominator(&self) -> &TrigPolySeries {
        &self.denominator
    }

    pub fn hamiltonian_digest(&self) -> &str {
        &self.hamiltonian_digest
    }

    pub fn with_digest(mut self, digest: impl Into<String>) -> Self {
        self.hamiltonian_digest = digest.into();
        self
    }

    /// Double-precision image used by pointwise and lattice evaluation.
    pub fn to_numeric(&self) -> NumericConformal {
        NumericConformal::new(self)
    }

    /// Full pipeline: Lie series of `z`, its conjugate, Jacobian, inversion.
    pub fn build(h: &TrigPoly, order: usize) -> Result<ConformalSeries> {
        ConformalSeries::build_with(h, order, Continuation::Conjugate)
    }

    pub fn build_with(h: &TrigPoly, order: usize, continuation: Continuation) -> Result<ConformalSeries> {
        let (zs, zbs) = build_coordinate_pair(h, order)?;
        let d = jacobian_series_with(&zs, &zbs, continuation)?;
        let digest = to_expression(h).unwrap_or_default();
        Ok(conformal_series(d)?.with_digest(digest))
    }
}

/// Truncated reciprocal of `D`: `a_0 = 1`, `a_k = −Σ_{j=1..k} d_j a_{k−j}`.
pub fn conformal_series(d: TrigPolySeries) -> Result<ConformalSeries> {
    if *d.coeff(0) != TrigPoly::one() {
        return Err(Error::BadConstantTerm);
    }
    let n = d.order();
    let mut a: Vec<TrigPoly> = Vec::with_capacity(n + 1);
    a.push(TrigPoly::one());
    for k in 1..=n {
        let mut acc = TrigPoly::zero();
        for j in 1..=k {
            let dj = d.coeff(j);
            if dj.is_zero() || a[k - j].is_zero() {
                continue;
            }
            acc.add_assign(&dj.mul(&a[k - j]));
        }
        a.push(acc.neg());
    }
    Ok(ConformalSeries {
        a,
        denominator: d,
        hamiltonian_digest: String::new(),
    })
}
