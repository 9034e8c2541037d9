use std::rc::Rc;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;

use crate::trigpoly::rat_to_f64;

/// Expression node with the character offset it was parsed from.
///
/// Children are reference counted so that symbolic differentiation can share
/// untouched subtrees.
#[derive(Clone, Debug, PartialEq)]
pub struct Expr {
    pub pos: usize,
    pub kind: ExprKind,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ExprKind {
    Num(BigRational),
    Pi,
    /// Imaginary unit. Never produced by the parser.
    I,
    X,
    Y,
    Neg(Rc<Expr>),
    Add(Rc<Expr>, Rc<Expr>),
    Sub(Rc<Expr>, Rc<Expr>),
    Mul(Rc<Expr>, Rc<Expr>),
    /// Division by a constant.
    Div(Rc<Expr>, Rc<Expr>),
    Pow(Rc<Expr>, u32),
    Sin(Rc<Expr>),
    Cos(Rc<Expr>),
}

impl Expr {
    pub fn new(pos: usize, kind: ExprKind) -> Rc<Expr> {
        Rc::new(Expr { pos, kind })
    }

    pub fn num(pos: usize, r: BigRational) -> Rc<Expr> {
        Expr::new(pos, ExprKind::Num(r))
    }

    pub fn is_zero_literal(&self) -> bool {
        matches!(&self.kind, ExprKind::Num(r) if r.is_zero())
    }

    /// Number of nodes, counting shared subtrees once per occurrence.
    pub fn tree_size(&self) -> usize {
        use ExprKind::*;
        1 + match &self.kind {
            Num(_) | Pi | I | X | Y => 0,
            Neg(a) | Pow(a, _) | Sin(a) | Cos(a) => a.tree_size(),
            Add(a, b) | Sub(a, b) | Mul(a, b) | Div(a, b) => a.tree_size() + b.tree_size(),
        }
    }

    /// Direct floating-point evaluation of the expression.
    pub fn eval(&self, x: f64, y: f64) -> Complex64 {
        use ExprKind::*;
        match &self.kind {
            Num(r) => Complex64::new(rat_to_f64(r), 0.0),
            Pi => Complex64::new(std::f64::consts::PI, 0.0),
            I => Complex64::i(),
            X => Complex64::new(x, 0.0),
            Y => Complex64::new(y, 0.0),
            Neg(a) => -a.eval(x, y),
            Add(a, b) => a.eval(x, y) + b.eval(x, y),
            Sub(a, b) => a.eval(x, y) - b.eval(x, y),
            Mul(a, b) => a.eval(x, y) * b.eval(x, y),
            Div(a, b) => a.eval(x, y) / b.eval(x, y),
            Pow(a, k) => a.eval(x, y).powu(*k),
            Sin(a) => a.eval(x, y).sin(),
            Cos(a) => a.eval(x, y).cos(),
        }
    }
}
