//! Hamiltonian expressions: parsing, validation and Fourier expansion.
//!
//! Accepted Hamiltonians are real trigonometric polynomials that are
//! 1-periodic in `x` and `y`, written with rational constants, `pi`, `sin`,
//! `cos`, `+ - *`, division by constants and non-negative integer powers.

mod ast;
mod lower;
mod parser;

pub use ast::{Expr, ExprKind};
pub use lower::lower;
pub use parser::parse_expr;

use std::fmt::Write as _;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::trigpoly::{FreqKey, PiRational, TrigPoly};

/// The test Hamiltonian on the unit torus used throughout the experiments.
pub const TORUS_HAMILTONIAN: &str = "(1/8)*(sin(pi*x)^2 + sin(pi*y)^2)^2";

/// Shear Hamiltonian `sin(2πx)/(2π)`, whose Lie series terminates.
pub const SHEAR_HAMILTONIAN: &str = "sin(2*pi*x)/(2*pi)";

/// Parse `text` into its canonical Fourier form and check that it is a real,
/// torus-periodic function.
pub fn parse_hamiltonian(text: &str) -> Result<TrigPoly> {
    let expr = parse_expr(text)?;
    let p = lower(&expr)?;
    validate_hamiltonian(&p)?;
    Ok(p)
}

/// Periodicity first, then reality.
pub fn validate_hamiltonian(p: &TrigPoly) -> Result<()> {
    if let Some(key) = p.keys().find(|k| !k.is_even()) {
        return Err(Error::NotPeriodic { key });
    }
    if !p.is_real() {
        return Err(Error::NotReal);
    }
    Ok(())
}

/// Render a real trigonometric polynomial as a `cos`/`sin` sum that
/// [`parse_hamiltonian`] reads back to the identical value.
///
/// Returns `None` if `p` is not real.
pub fn to_expression(p: &TrigPoly) -> Option<String> {
    if !p.is_real() {
        return None;
    }
    let mut terms: Vec<String> = Vec::new();
    for (k, c) in p.iter() {
        if k == FreqKey::ZERO {
            terms.push(format!("({})", real_scalar(c, false)));
            continue;
        }
        // one representative per ± pair: c e^{iφ} + c̄ e^{−iφ} = 2Re(c) cos φ − 2Im(c) sin φ
        if k < -k {
            continue;
        }
        let arg = format!("pi*(({})*x + ({})*y)", k.m, k.n);
        let re = real_scalar(c, false);
        let im = real_scalar(c, true);
        if re != "0" {
            terms.push(format!("2*({re})*cos({arg})"));
        }
        if im != "0" {
            terms.push(format!("-2*({im})*sin({arg})"));
        }
    }
    if terms.is_empty() {
        return Some("0".to_string());
    }
    Some(terms.join(" + "))
}

/// Real or imaginary part of a π-polynomial, as parseable text.
fn real_scalar(c: &PiRational, imaginary: bool) -> String {
    let mut s = String::new();
    for (p, g) in c.terms() {
        let r = if imaginary { &g.im } else { &g.re };
        if r.is_zero() {
            continue;
        }
        if !s.is_empty() {
            s.push_str(" + ");
        }
        let sign = if r.is_negative() { "-" } else { "" };
        let _ = write!(s, "{sign}({}/{})", r.numer().abs(), r.denom());
        if p > 0 {
            let _ = write!(s, "*pi^{p}");
        } else if p < 0 {
            let _ = write!(s, "/pi^{}", -p);
        }
    }
    if s.is_empty() {
        s.push('0');
    }
    s
}
