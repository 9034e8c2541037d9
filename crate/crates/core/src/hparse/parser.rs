//! Recursive-descent parser for Hamiltonian expressions.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := ('-' | '+') unary | factor
//! factor := base ('^' UINT)?
//! base   := NUMBER | 'pi' | 'x' | 'y'
//!         | ('sin' | 'cos') '(' expr ')' | '(' expr ')'
//! ```
//!
//! Divisors must reduce to a non-zero constant `r·π^p`; that is checked when
//! the tree is expanded, not here.

use std::rc::Rc;

use num_bigint::BigInt;
use num_rational::BigRational;

use super::ast::{Expr, ExprKind};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigRational),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    pos: usize,
    /// Integer literal written without a decimal point.
    integer: bool,
}

fn syntax(pos: usize, msg: impl Into<String>) -> Error {
    Error::Syntax { pos, msg: msg.into() }
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let simple = match c {
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(tok) = simple {
            out.push(Token { tok, pos: start, integer: false });
            i += 1;
            continue;
        }
        if c.is_ascii_digit() || c == '.' {
            let mut int_part = String::new();
            let mut frac_part = String::new();
            let mut seen_dot = false;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                if chars[i] == '.' {
                    if seen_dot {
                        return Err(syntax(i, "second decimal point in number"));
                    }
                    seen_dot = true;
                } else if seen_dot {
                    frac_part.push(chars[i]);
                } else {
                    int_part.push(chars[i]);
                }
                i += 1;
            }
            if int_part.is_empty() && frac_part.is_empty() {
                return Err(syntax(start, "malformed number"));
            }
            let digits = format!("{int_part}{frac_part}");
            let numer: BigInt = digits.parse().map_err(|_| syntax(start, "malformed number"))?;
            let denom = BigInt::from(10u32).pow(frac_part.len() as u32);
            out.push(Token {
                tok: Tok::Num(BigRational::new(numer, denom)),
                pos: start,
                integer: !seen_dot,
            });
            continue;
        }
        if c.is_ascii_alphabetic() {
            let mut ident = String::new();
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                ident.push(chars[i]);
                i += 1;
            }
            out.push(Token { tok: Tok::Ident(ident), pos: start, integer: false });
            continue;
        }
        return Err(syntax(start, format!("unexpected character `{c}`")));
    }
    out.push(Token { tok: Tok::End, pos: chars.len(), integer: false });
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.at]
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<Token> {
        let t = self.bump();
        if t.tok == want {
            Ok(t)
        } else {
            Err(syntax(t.pos, format!("expected {what}")))
        }
    }

    fn expr(&mut self) -> Result<Rc<Expr>> {
        let mut lhs = self.term()?;
        loop {
            let t = self.peek().clone();
            let plus = match t.tok {
                Tok::Plus => true,
                Tok::Minus => false,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            let kind = if plus { ExprKind::Add(lhs, rhs) } else { ExprKind::Sub(lhs, rhs) };
            lhs = Expr::new(t.pos, kind);
        }
    }

    fn term(&mut self) -> Result<Rc<Expr>> {
        let mut lhs = self.unary()?;
        loop {
            let t = self.peek().clone();
            match t.tok {
                Tok::Star => {
                    self.bump();
                    let rhs = self.unary()?;
                    lhs = Expr::new(t.pos, ExprKind::Mul(lhs, rhs));
                }
                Tok::Slash => {
                    self.bump();
                    let rhs = self.unary()?;
                    lhs = Expr::new(t.pos, ExprKind::Div(lhs, rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Rc<Expr>> {
        let t = self.peek().clone();
        match t.tok {
            Tok::Minus => {
                self.bump();
                let inner = self.unary()?;
                Ok(Expr::new(t.pos, ExprKind::Neg(inner)))
            }
            Tok::Plus => {
                self.bump();
                self.unary()
            }
            _ => self.factor(),
        }
    }

    fn factor(&mut self) -> Result<Rc<Expr>> {
        let base = self.base()?;
        if self.peek().tok == Tok::Caret {
            let caret = self.bump();
            let t = self.bump();
            match (&t.tok, t.integer) {
                (Tok::Num(r), true) => {
                    let k: u32 = r
                        .to_integer()
                        .try_into()
                        .map_err(|_| syntax(t.pos, "exponent too large"))?;
                    return Ok(Expr::new(caret.pos, ExprKind::Pow(base, k)));
                }
                _ => return Err(syntax(t.pos, "exponent must be a non-negative integer literal")),
            }
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<Rc<Expr>> {
        let t = self.bump();
        match t.tok {
            Tok::Num(r) => Ok(Expr::num(t.pos, r)),
            Tok::Ident(name) => match name.as_str() {
                "pi" => Ok(Expr::new(t.pos, ExprKind::Pi)),
                "x" => Ok(Expr::new(t.pos, ExprKind::X)),
                "y" => Ok(Expr::new(t.pos, ExprKind::Y)),
                "sin" | "cos" => {
                    self.expect(Tok::LParen, "`(` after function name")?;
                    let arg = self.expr()?;
                    self.expect(Tok::RParen, "`)`")?;
                    let kind = if name == "sin" { ExprKind::Sin(arg) } else { ExprKind::Cos(arg) };
                    Ok(Expr::new(t.pos, kind))
                }
                other => Err(syntax(t.pos, format!("unknown identifier `{other}`"))),
            },
            Tok::LParen => {
                let inner = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Tok::End => Err(syntax(t.pos, "unexpected end of input")),
            _ => Err(syntax(t.pos, "expected a number, `pi`, `x`, `y`, `sin`, `cos` or `(`")),
        }
    }
}

/// Parse the expression text into an AST.
pub fn parse_expr(text: &str) -> Result<Rc<Expr>> {
    let toks = lex(text)?;
    if toks.len() == 1 {
        return Err(syntax(0, "empty expression"));
    }
    let mut p = Parser { toks, at: 0 };
    let e = p.expr()?;
    let t = p.peek();
    if t.tok != Tok::End {
        return Err(syntax(t.pos, "unexpected trailing input"));
    }
    Ok(e)
}
