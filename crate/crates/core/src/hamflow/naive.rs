//! Slow reference route: differentiate the unexpanded expression tree with
//! the chain and Leibniz rules, and only expand into Fourier form at the end.
//!
//! Tree size grows exponentially with the order, so this is limited to
//! `N ≤ 4` and used only to cross-check [`super::build_lie_series`].

use std::rc::Rc;

use super::{Coord, CoordLieSeries};
use crate::error::{Error, Result};
use crate::hparse::{lower, parse_expr, validate_hamiltonian, Expr, ExprKind};
use crate::trigpoly::rat;

pub const NAIVE_MAX_ORDER: usize = 4;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Var {
    X,
    Y,
}

fn node(pos: usize, kind: ExprKind) -> Rc<Expr> {
    Expr::new(pos, kind)
}

fn int(pos: usize, k: i64) -> Rc<Expr> {
    Expr::num(pos, rat(k, 1))
}

/// Derivative of `e`; `None` stands for an identically zero tree.
fn diff(e: &Rc<Expr>, var: Var) -> Option<Rc<Expr>> {
    use ExprKind::*;
    let p = e.pos;
    match &e.kind {
        Num(_) | Pi | I => None,
        X => (var == Var::X).then(|| int(p, 1)),
        Y => (var == Var::Y).then(|| int(p, 1)),
        Neg(a) => diff(a, var).map(|da| node(p, Neg(da))),
        Add(a, b) => match (diff(a, var), diff(b, var)) {
            (None, None) => None,
            (Some(da), None) => Some(da),
            (None, Some(db)) => Some(db),
            (Some(da), Some(db)) => Some(node(p, Add(da, db))),
        },
        Sub(a, b) => match (diff(a, var), diff(b, var)) {
            (None, None) => None,
            (Some(da), None) => Some(da),
            (None, Some(db)) => Some(node(p, Neg(db))),
            (Some(da), Some(db)) => Some(node(p, Sub(da, db))),
        },
        Mul(a, b) => {
            let left = diff(a, var).map(|da| node(p, Mul(da, b.clone())));
            let right = diff(b, var).map(|db| node(p, Mul(a.clone(), db)));
            match (left, right) {
                (None, None) => None,
                (Some(l), None) => Some(l),
                (None, Some(r)) => Some(r),
                (Some(l), Some(r)) => Some(node(p, Add(l, r))),
            }
        }
        Div(a, b) => {
            // (a'b − ab') / b², or a'/b for a constant divisor
            let da = diff(a, var);
            let db = diff(b, var);
            if db.is_none() {
                return da.map(|da| node(p, Div(da, b.clone())));
            }
            let num_l = da.map(|da| node(p, Mul(da, b.clone())));
            let num_r = db.map(|db| node(p, Mul(a.clone(), db)));
            let num = match (num_l, num_r) {
                (None, None) => return None,
                (Some(l), None) => l,
                (None, Some(r)) => node(p, Neg(r)),
                (Some(l), Some(r)) => node(p, Sub(l, r)),
            };
            Some(node(p, Div(num, node(p, Pow(b.clone(), 2)))))
        }
        Pow(a, k) => {
            if *k == 0 {
                return None;
            }
            let da = diff(a, var)?;
            if *k == 1 {
                return Some(da);
            }
            let outer = node(p, Mul(int(p, i64::from(*k)), node(p, Pow(a.clone(), k - 1))));
            Some(node(p, Mul(outer, da)))
        }
        Sin(a) => {
            let da = diff(a, var)?;
            Some(node(p, Mul(node(p, Cos(a.clone())), da)))
        }
        Cos(a) => {
            let da = diff(a, var)?;
            Some(node(p, Neg(node(p, Mul(node(p, Sin(a.clone())), da)))))
        }
    }
}

/// `H_y·f_x − H_x·f_y` as an unexpanded tree.
fn poisson(hx: &Option<Rc<Expr>>, hy: &Option<Rc<Expr>>, f: &Rc<Expr>) -> Rc<Expr> {
    let fx = diff(f, Var::X);
    let fy = diff(f, Var::Y);
    let left = match (hy, fx) {
        (Some(hy), Some(fx)) => Some(node(0, ExprKind::Mul(hy.clone(), fx))),
        _ => None,
    };
    let right = match (hx, fy) {
        (Some(hx), Some(fy)) => Some(node(0, ExprKind::Mul(hx.clone(), fy))),
        _ => None,
    };
    match (left, right) {
        (None, None) => int(0, 0),
        (Some(l), None) => l,
        (None, Some(r)) => node(0, ExprKind::Neg(r)),
        (Some(l), Some(r)) => node(0, ExprKind::Sub(l, r)),
    }
}

/// Lie series coefficients computed by naive tree differentiation of the
/// source text, Fourier-expanded only for the comparison.
pub fn naive_lie_series_oracle(text: &str, which: Coord, order: usize) -> Result<CoordLieSeries> {
    if order < 1 {
        return Err(Error::InvalidOrder { got: order, min: 1 });
    }
    if order > NAIVE_MAX_ORDER {
        return Err(Error::InvalidArgument(format!(
            "naive oracle supports order ≤ {NAIVE_MAX_ORDER}, got {order}"
        )));
    }
    let expr = parse_expr(text)?;
    let h = lower(&expr)?;
    validate_hamiltonian(&h)?;

    let hx = diff(&expr, Var::X);
    let hy = diff(&expr, Var::Y);
    let i_hx = hx
        .as_ref()
        .map(|hx| node(0, ExprKind::Mul(node(0, ExprKind::I), hx.clone())));
    // X_H z = H_y − i H_x,  X_H z̄ = H_y + i H_x
    let w1 = match (hy.clone(), i_hx, which) {
        (None, None, _) => int(0, 0),
        (Some(hy), None, _) => hy,
        (None, Some(ih), Coord::Z) => node(0, ExprKind::Neg(ih)),
        (None, Some(ih), Coord::Zbar) => ih,
        (Some(hy), Some(ih), Coord::Z) => node(0, ExprKind::Sub(hy, ih)),
        (Some(hy), Some(ih), Coord::Zbar) => node(0, ExprKind::Add(hy, ih)),
    };
    let mut trees = vec![w1];
    for k in 1..order {
        let next = poisson(&hx, &hy, &trees[k - 1]);
        trees.push(next);
    }
    let w = trees.iter().map(|t| lower(t)).collect::<Result<Vec<_>>>()?;
    Ok(CoordLieSeries::from_parts(which, w, h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamflow::build_lie_series;
    use crate::hparse::{parse_hamiltonian, SHEAR_HAMILTONIAN, TORUS_HAMILTONIAN};

    #[test]
    fn zero_hamiltonian() {
        let s = naive_lie_series_oracle("0", Coord::Z, 3).unwrap();
        assert!(s.terms().iter().all(|w| w.is_zero()));
    }

    #[test]
    fn shear_matches_fourier_route() {
        let h = parse_hamiltonian(SHEAR_HAMILTONIAN).unwrap();
        let naive = naive_lie_series_oracle(SHEAR_HAMILTONIAN, Coord::Z, 2).unwrap();
        assert_eq!(naive, build_lie_series(&h, Coord::Z, 2).unwrap());
    }

    #[test]
    fn torus_low_order_matches() {
        let h = parse_hamiltonian(TORUS_HAMILTONIAN).unwrap();
        for which in [Coord::Z, Coord::Zbar] {
            let naive = naive_lie_series_oracle(TORUS_HAMILTONIAN, which, 2).unwrap();
            assert_eq!(naive, build_lie_series(&h, which, 2).unwrap());
        }
    }

    #[test]
    fn tree_grows() {
        let expr = parse_expr(TORUS_HAMILTONIAN).unwrap();
        let hx = diff(&expr, Var::X).unwrap();
        assert!(hx.tree_size() > expr.tree_size());
    }

    #[test]
    fn order_limits() {
        assert!(matches!(
            naive_lie_series_oracle("0", Coord::Z, 5),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(naive_lie_series_oracle("0", Coord::Z, 0), Err(Error::InvalidOrder { .. })));
        assert!(matches!(naive_lie_series_oracle("x", Coord::Z, 1), Err(Error::NonTrigTerm { .. })));
    }
}
