use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::ast::{Expr, ExprKind};
use crate::error::{Error, Result};
use crate::trigpoly::{rat, FreqKey, GaussRat, PiRational, TrigPoly};

/// `x·X + y·Y + c` with scalar coefficients in the π-ring.
#[derive(Clone, Debug, Default)]
struct Lin {
    x: PiRational,
    y: PiRational,
    c: PiRational,
}

impl Lin {
    fn constant(c: PiRational) -> Self {
        Lin { c, ..Lin::default() }
    }

    fn is_constant(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    fn combine(&self, other: &Lin, sign: i64) -> Lin {
        let s = PiRational::from_ratio(sign, 1);
        Lin {
            x: &self.x + &(&other.x * &s),
            y: &self.y + &(&other.y * &s),
            c: &self.c + &(&other.c * &s),
        }
    }

    fn scale(&self, s: &PiRational) -> Lin {
        Lin { x: &self.x * s, y: &self.y * s, c: &self.c * s }
    }
}

fn nonlinear(pos: usize, msg: &str) -> Error {
    Error::NonLinearTrigArgument { pos, msg: msg.to_string() }
}

fn divisor_error(pos: usize) -> Error {
    Error::Syntax {
        pos,
        msg: "divisor must be a non-zero constant of the form r*pi^k".to_string(),
    }
}

/// Inverse of a divisor that lowers to a constant monomial `r·π^p`.
fn divisor_inverse(b: &Expr) -> Result<PiRational> {
    let lb = lower(b)?;
    if lb.keys().any(|k| k != FreqKey::ZERO) {
        return Err(divisor_error(b.pos));
    }
    lb.coeff(FreqKey::ZERO)
        .and_then(PiRational::monomial_inverse)
        .ok_or_else(|| divisor_error(b.pos))
}

fn linearize(e: &Expr, trig_pos: usize) -> Result<Lin> {
    use ExprKind::*;
    Ok(match &e.kind {
        Num(r) => Lin::constant(PiRational::from_rational(r.clone())),
        Pi => Lin::constant(PiRational::pi()),
        I => return Err(nonlinear(trig_pos, "complex constant in argument")),
        X => Lin { x: PiRational::one(), ..Lin::default() },
        Y => Lin { y: PiRational::one(), ..Lin::default() },
        Neg(a) => linearize(a, trig_pos)?.scale(&PiRational::from_ratio(-1, 1)),
        Add(a, b) => linearize(a, trig_pos)?.combine(&linearize(b, trig_pos)?, 1),
        Sub(a, b) => linearize(a, trig_pos)?.combine(&linearize(b, trig_pos)?, -1),
        Mul(a, b) => {
            let la = linearize(a, trig_pos)?;
            let lb = linearize(b, trig_pos)?;
            if la.is_constant() {
                lb.scale(&la.c)
            } else if lb.is_constant() {
                la.scale(&lb.c)
            } else {
                return Err(nonlinear(trig_pos, "product of variables"));
            }
        }
        Div(a, b) => {
            let lb = linearize(b, trig_pos)?;
            if !lb.is_constant() {
                return Err(nonlinear(trig_pos, "division by a variable"));
            }
            let inv = lb
                .c
                .monomial_inverse()
                .ok_or_else(|| divisor_error(b.pos))?;
            linearize(a, trig_pos)?.scale(&inv)
        }
        Pow(a, k) => {
            let la = linearize(a, trig_pos)?;
            if *k == 1 {
                la
            } else if la.is_constant() {
                let mut c = PiRational::one();
                for _ in 0..*k {
                    c = &c * &la.c;
                }
                Lin::constant(c)
            } else {
                return Err(nonlinear(trig_pos, "power of a variable"));
            }
        }
        Sin(_) | Cos(_) => return Err(nonlinear(trig_pos, "nested trigonometric function")),
    })
}

/// Rational `r` such that `s = r·π`, or `None` if `s` has any other form.
fn pi_multiple(s: &PiRational) -> Option<BigRational> {
    if s.is_zero() {
        return Some(BigRational::zero());
    }
    if s.num_terms() != 1 {
        return None;
    }
    let g = s.term(1)?;
    g.is_real().then(|| g.re.clone())
}

fn integer_slope(s: &PiRational, pos: usize, var: char) -> Result<i32> {
    let r = pi_multiple(s)
        .ok_or_else(|| nonlinear(pos, &format!("coefficient of {var} is not a rational multiple of pi")))?;
    if !r.is_integer() {
        return Err(nonlinear(pos, &format!("coefficient of {var} is not an integer multiple of pi")));
    }
    r.to_integer()
        .to_i32()
        .ok_or_else(|| nonlinear(pos, "frequency out of range"))
}

/// `e^{iπc}` for `c` with denominator 1 or 2.
fn phase(c: &BigRational, pos: usize) -> Result<GaussRat> {
    let twice = c * BigRational::from_integer(BigInt::from(2));
    if !twice.is_integer() {
        return Err(nonlinear(pos, "phase constant must be a multiple of pi/2"));
    }
    let quarter_turns = twice.to_integer().mod_floor(&BigInt::from(4));
    Ok(match quarter_turns.to_u8().unwrap_or(0) {
        0 => GaussRat::from_ints(1, 0),
        1 => GaussRat::from_ints(0, 1),
        2 => GaussRat::from_ints(-1, 0),
        _ => GaussRat::from_ints(0, -1),
    })
}

fn trig(arg: &Expr, pos: usize, is_sin: bool) -> Result<TrigPoly> {
    let lin = linearize(arg, pos)?;
    let m = integer_slope(&lin.x, pos, 'x')?;
    let n = integer_slope(&lin.y, pos, 'y')?;
    let c = pi_multiple(&lin.c)
        .ok_or_else(|| nonlinear(pos, "constant term is not a rational multiple of pi"))?;
    let ph = phase(&c, pos)?;
    let ph_conj = ph.conj();
    // cos θ = (ph·e^{iφ} + ph̄·e^{−iφ})/2,  sin θ = (ph·e^{iφ} − ph̄·e^{−iφ})/2i
    let (fwd, back) = if is_sin {
        let inv_2i = GaussRat::new(rat(0, 1), rat(-1, 2));
        (&ph * &inv_2i, &(-&ph_conj) * &inv_2i)
    } else {
        let half = GaussRat::new(rat(1, 2), rat(0, 1));
        (&ph * &half, &ph_conj * &half)
    };
    let mut p = TrigPoly::monomial(FreqKey::new(m, n), PiRational::from_gauss(fwd, 0));
    p.add_coeff(FreqKey::new(-m, -n), &PiRational::from_gauss(back, 0));
    Ok(p)
}

/// Expand an expression into its Fourier form. No periodicity or reality
/// checks are applied here.
pub fn lower(e: &Expr) -> Result<TrigPoly> {
    use ExprKind::*;
    Ok(match &e.kind {
        Num(r) => TrigPoly::constant(PiRational::from_rational(r.clone())),
        Pi => TrigPoly::constant(PiRational::pi()),
        I => TrigPoly::constant(PiRational::i()),
        X => return Err(Error::NonTrigTerm { pos: e.pos, var: 'x' }),
        Y => return Err(Error::NonTrigTerm { pos: e.pos, var: 'y' }),
        Neg(a) => lower(a)?.neg(),
        Add(a, b) => lower(a)?.add(&lower(b)?),
        Sub(a, b) => lower(a)?.sub(&lower(b)?),
        Mul(a, b) => {
            let la = lower(a)?;
            if la.is_zero() {
                // still validate the other operand
                lower(b)?;
                return Ok(TrigPoly::zero());
            }
            la.mul(&lower(b)?)
        }
        Div(a, b) => {
            let inv = divisor_inverse(b)?;
            lower(a)?.scale(&inv)
        }
        Pow(a, k) => lower(a)?.pow(*k),
        Sin(a) => trig(a, e.pos, true)?,
        Cos(a) => trig(a, e.pos, false)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hparse::parse_expr;

    fn lowered(s: &str) -> Result<TrigPoly> {
        lower(&*parse_expr(s)?)
    }

    #[test]
    fn phase_shifts() {
        // cos(pi*x + pi/2) = -sin(pi*x)
        let a = lowered("cos(pi*x + pi/2)").unwrap();
        assert_eq!(a, TrigPoly::sin(1, 0).neg());
        // sin(pi*(2*x + 1)) = -sin(2 pi x)
        let b = lowered("sin(pi*(2*x + 1))").unwrap();
        assert_eq!(b, TrigPoly::sin(2, 0).neg());
        assert!(matches!(
            lowered("cos(pi*x + pi/3)"),
            Err(Error::NonLinearTrigArgument { .. })
        ));
    }

    #[test]
    fn argument_validation() {
        assert!(matches!(lowered("sin(x*y)"), Err(Error::NonLinearTrigArgument { .. })));
        assert!(matches!(lowered("sin(x)"), Err(Error::NonLinearTrigArgument { .. })));
        assert!(matches!(lowered("sin(pi*x/2)"), Err(Error::NonLinearTrigArgument { .. })));
        assert!(matches!(lowered("sin(pi/x)"), Err(Error::NonLinearTrigArgument { .. })));
        assert!(matches!(lowered("1/(1+pi)"), Err(Error::Syntax { .. })));
        assert!(matches!(lowered("1/0"), Err(Error::Syntax { .. })));
        assert!(matches!(lowered("1/cos(2*pi*x)"), Err(Error::Syntax { .. })));
        assert!(lowered("cos(4*pi*x/2)").is_ok());
        assert!(matches!(lowered("sin(0.5*pi*x)"), Err(Error::NonLinearTrigArgument { .. })));
        assert!(matches!(lowered("cos(sin(pi*x))"), Err(Error::NonLinearTrigArgument { .. })));
        assert!(matches!(lowered("cos(pi*x^2)"), Err(Error::NonLinearTrigArgument { .. })));
        assert!(lowered("cos(2^2*pi*x)").is_ok());
        assert!(lowered("cos((x+y)*pi)").is_ok());
    }

    #[test]
    fn bare_variable_reports_position() {
        let err = lowered("1 + 3*y").unwrap_err();
        assert_eq!(err, Error::NonTrigTerm { pos: 6, var: 'y' });
    }
}
