//! Hamiltonian vector field and truncated Lie series of the coordinates.
//!
//! With `ω = dx∧dy` and `i_{X_H} ω = dH` the field is
//! `X_H = H_y ∂x − H_x ∂y`, so `X_H z = H_y − i H_x = −2i ∂H/∂z̄`.
//! The coordinate `z` itself is affine and never stored as a
//! [`TrigPoly`]; a series holds only `w_k = X_H^k z` for `k ≥ 1`.

mod naive;

pub use naive::naive_lie_series_oracle;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hparse::validate_hamiltonian;
use crate::trigpoly::{Direction, PiRational, TrigPoly};

/// Holomorphic coordinate `z = x + iy` or its conjugate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Coord {
    Z,
    Zbar,
}

impl Coord {
    pub fn conjugate(self) -> Coord {
        match self {
            Coord::Z => Coord::Zbar,
            Coord::Zbar => Coord::Z,
        }
    }

    /// Value of the coordinate function at `(x, y)`.
    pub fn eval(self, x: f64, y: f64) -> Complex64 {
        match self {
            Coord::Z => Complex64::new(x, y),
            Coord::Zbar => Complex64::new(x, -y),
        }
    }
}

/// Argument of [`HamiltonianField::apply`]: either one of the affine
/// coordinates or a periodic function.
#[derive(Clone, Copy, Debug)]
pub enum Seed<'a> {
    Coord(Coord),
    Func(&'a TrigPoly),
}

/// A validated Hamiltonian together with its first derivatives.
#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonianField {
    h: TrigPoly,
    hx: TrigPoly,
    hy: TrigPoly,
}

impl HamiltonianField {
    /// Fails with `NotPeriodic` / `NotReal` if `h` is not a real function on the torus.
    pub fn new(h: TrigPoly) -> Result<Self> {
        validate_hamiltonian(&h)?;
        let hx = h.diff(Direction::X);
        let hy = h.diff(Direction::Y);
        Ok(HamiltonianField { h, hx, hy })
    }

    pub fn hamiltonian(&self) -> &TrigPoly {
        &self.h
    }

    pub fn hx(&self) -> &TrigPoly {
        &self.hx
    }

    pub fn hy(&self) -> &TrigPoly {
        &self.hy
    }

    /// `X_H f = H_y f_x − H_x f_y`.
    pub fn apply(&self, f: Seed<'_>) -> TrigPoly {
        match f {
            // ∂z/∂x = 1, ∂z/∂y = i
            Seed::Coord(Coord::Z) => self.hy.sub(&self.hx.scale(&PiRational::i())),
            Seed::Coord(Coord::Zbar) => self.hy.add(&self.hx.scale(&PiRational::i())),
            Seed::Func(f) => {
                let fx = f.diff(Direction::X);
                let fy = f.diff(Direction::Y);
                self.hy.mul(&fx).sub(&self.hx.mul(&fy))
            }
        }
    }
}

/// `X_H f` for a Hamiltonian given as a bare polynomial.
pub fn apply_xh(h: &TrigPoly, f: Seed<'_>) -> Result<TrigPoly> {
    Ok(HamiltonianField::new(h.clone())?.apply(f))
}

/// Order-`N` truncation of `e^{τ X_H}` applied to a coordinate:
/// `coord + Σ_{k=1..N} τ^k/k! · w_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoordLieSeries {
    which: Coord,
    w: Vec<TrigPoly>,
    hamiltonian: TrigPoly,
}

impl CoordLieSeries {
    pub(crate) fn from_parts(which: Coord, w: Vec<TrigPoly>, hamiltonian: TrigPoly) -> Self {
        CoordLieSeries { which, w, hamiltonian }
    }

    pub fn which(&self) -> Coord {
        self.which
    }

    pub fn order(&self) -> usize {
        self.w.len()
    }

    pub fn hamiltonian(&self) -> &TrigPoly {
        &self.hamiltonian
    }

    /// `w_k = X_H^k(coord)` for `1 ≤ k ≤ N`.
    pub fn w(&self, k: usize) -> &TrigPoly {
        assert!(k >= 1 && k <= self.w.len(), "w_k index {k} out of range 1..={}", self.w.len());
        &self.w[k - 1]
    }

    pub fn terms(&self) -> &[TrigPoly] {
        &self.w
    }

    /// The series of the conjugate coordinate, `conj(w_k)` term by term.
    pub fn conjugate(&self) -> CoordLieSeries {
        CoordLieSeries {
            which: self.which.conjugate(),
            w: self.w.iter().map(TrigPoly::conjugate).collect(),
            hamiltonian: self.hamiltonian.clone(),
        }
    }

    /// `Σ_{k=1..N} τ^k/k! · w_k(x, y)`, the displacement from the affine seed.
    pub fn eval_displacement(&self, x: f64, y: f64, tau: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut factor = Complex64::new(1.0, 0.0);
        for (k, wk) in self.w.iter().enumerate() {
            factor = factor * tau / (k as f64 + 1.0);
            acc += factor * wk.eval(x, y);
        }
        acc
    }

    pub fn eval(&self, x: f64, y: f64, tau: Complex64) -> Complex64 {
        self.which.eval(x, y) + self.eval_displacement(x, y, tau)
    }
}

/// `w_1 = X_H(coord)`, `w_{k+1} = X_H(w_k)`, exactly.
pub fn build_lie_series(h: &TrigPoly, which: Coord, order: usize) -> Result<CoordLieSeries> {
    if order < 1 {
        return Err(Error::InvalidOrder { got: order, min: 1 });
    }
    let field = HamiltonianField::new(h.clone())?;
    let mut w = Vec::with_capacity(order);
    w.push(field.apply(Seed::Coord(which)));
    for k in 1..order {
        let next = field.apply(Seed::Func(&w[k - 1]));
        w.push(next);
    }
    Ok(CoordLieSeries::from_parts(which, w, h.clone()))
}

/// Both coordinate series; the `z̄` series is obtained by conjugation.
pub fn build_coordinate_pair(h: &TrigPoly, order: usize) -> Result<(CoordLieSeries, CoordLieSeries)> {
    let zs = build_lie_series(h, Coord::Z, order)?;
    let zbs = zs.conjugate();
    Ok((zs, zbs))
}
