//! Independent numeric integration of the real-time flow
//! `ẋ = H_y`, `ẏ = −H_x` with an embedded Dormand–Prince 5(4) pair.

use crate::error::{Error, Result};
use crate::hamflow::HamiltonianField;
use crate::trigpoly::{NumericTrigPoly, TrigPoly};

/// Adaptive step-size control.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepControl {
    pub rtol: f64,
    pub atol: f64,
    pub initial_step: f64,
    pub min_step: f64,
    pub max_steps: usize,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl {
            rtol: 1e-12,
            atol: 1e-12,
            initial_step: 1e-3,
            min_step: 1e-14,
            max_steps: 1_000_000,
        }
    }
}

impl StepControl {
    pub fn with_tolerance(tol: f64) -> Self {
        StepControl { rtol: tol, atol: tol, ..StepControl::default() }
    }
}

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// The right-hand side in displacement form, `u = (x − x0, y − y0)`.
struct Rhs {
    hx: NumericTrigPoly,
    hy: NumericTrigPoly,
    x0: f64,
    y0: f64,
}

impl Rhs {
    fn eval(&self, u: [f64; 2]) -> [f64; 2] {
        let (x, y) = (self.x0 + u[0], self.y0 + u[1]);
        [self.hy.eval(x, y).re, -self.hx.eval(x, y).re]
    }
}

fn integrate(rhs: &Rhs, t_end: f64, ctl: &StepControl) -> Result<[f64; 2]> {
    let mut u = [0.0, 0.0];
    if t_end == 0.0 {
        return Ok(u);
    }
    if !t_end.is_finite() {
        return Err(Error::InvalidArgument(format!("non-finite time {t_end}")));
    }
    let dir = t_end.signum();
    // elapsed |time|
    let mut t = 0.0_f64;
    let mut h = ctl.initial_step.min(t_end.abs());
    let mut k = [[0.0; 2]; 7];
    k[0] = rhs.eval(u);
    for _ in 0..ctl.max_steps {
        let remaining = t_end.abs() - t;
        if remaining <= 0.0 {
            return Ok(u);
        }
        let last = h >= remaining;
        let step = if last { remaining } else { h };
        let hs = dir * step;
        for s in 1..7 {
            let mut v = u;
            for (j, kj) in k.iter().enumerate().take(s) {
                let a = A[s][j];
                if a != 0.0 {
                    v[0] += hs * a * kj[0];
                    v[1] += hs * a * kj[1];
                }
            }
            k[s] = rhs.eval(v);
        }
        let mut next = u;
        let mut err = 0.0;
        for d in 0..2 {
            let mut hi = 0.0;
            let mut lo = 0.0;
            for s in 0..7 {
                hi += B5[s] * k[s][d];
                lo += B4[s] * k[s][d];
            }
            next[d] = u[d] + hs * hi;
            let scale = ctl.atol + ctl.rtol * u[d].abs().max(next[d].abs());
            err += (hs * (hi - lo) / scale).powi(2);
        }
        let err = (err / 2.0).sqrt();
        if !err.is_finite() || !next[0].is_finite() || !next[1].is_finite() {
            return Err(Error::StepFailure { t: dir * t, msg: "non-finite state".into() });
        }
        if err <= 1.0 {
            t += step;
            u = next;
            // first-same-as-last: stage 7 is f(next)
            k[0] = k[6];
            if last {
                return Ok(u);
            }
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h = step * factor;
        if h < ctl.min_step {
            return Err(Error::StepFailure {
                t: dir * t,
                msg: format!("step size {h:e} below minimum"),
            });
        }
    }
    Err(Error::StepFailure {
        t: dir * t,
        msg: format!("exceeded {} steps", ctl.max_steps),
    })
}

fn rhs(h: &TrigPoly, x0: f64, y0: f64) -> Result<Rhs> {
    let field = HamiltonianField::new(h.clone())?;
    Ok(Rhs {
        hx: field.hx().to_numeric(),
        hy: field.hy().to_numeric(),
        x0,
        y0,
    })
}

/// Unwrapped displacement `(x(t) − x0, y(t) − y0)`.
pub fn real_flow_displacement(h: &TrigPoly, x0: f64, y0: f64, t: f64, ctl: &StepControl) -> Result<(f64, f64)> {
    let u = integrate(&rhs(h, x0, y0)?, t, ctl)?;
    Ok((u[0], u[1]))
}

/// Position at time `t`, wrapped into `[0, 1)²`.
pub fn real_flow_oracle(h: &TrigPoly, x0: f64, y0: f64, t: f64, ctl: &StepControl) -> Result<(f64, f64)> {
    let (dx, dy) = real_flow_displacement(h, x0, y0, t, ctl)?;
    Ok(((x0 + dx).rem_euclid(1.0), (y0 + dy).rem_euclid(1.0)))
}

/// `(t_k, x, y)` for `t_k = k·t_end/steps`, `k = 0..=steps`, wrapped.
pub fn real_flow_trajectory(
    h: &TrigPoly,
    x0: f64,
    y0: f64,
    t_end: f64,
    steps: usize,
    ctl: &StepControl,
) -> Result<Vec<(f64, f64, f64)>> {
    let steps = steps.max(1);
    let mut out = Vec::with_capacity(steps + 1);
    let (mut x, mut y) = (x0, y0);
    let mut t_prev = 0.0;
    out.push((0.0, x0.rem_euclid(1.0), y0.rem_euclid(1.0)));
    for k in 1..=steps {
        let t = t_end * k as f64 / steps as f64;
        let (dx, dy) = real_flow_displacement(h, x, y, t - t_prev, ctl)?;
        x += dx;
        y += dy;
        t_prev = t;
        out.push((t, x.rem_euclid(1.0), y.rem_euclid(1.0)));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hparse::{parse_hamiltonian, SHEAR_HAMILTONIAN, TORUS_HAMILTONIAN};

    #[test]
    fn shear_flow_is_exact() {
        let h = parse_hamiltonian(SHEAR_HAMILTONIAN).unwrap();
        let ctl = StepControl::default();
        for &(x0, y0, t) in &[(0.1, 0.2, 0.7), (0.8, 0.05, -1.3), (0.25, 0.5, 2.0)] {
            let (x, y) = real_flow_oracle(&h, x0, y0, t, &ctl).unwrap();
            let expect_y = (y0 - t * (2.0 * std::f64::consts::PI * x0).cos()).rem_euclid(1.0);
            assert!((x - x0).abs() < 1e-10);
            let dy = (y - expect_y).abs();
            assert!(dy.min(1.0 - dy) < 1e-10, "{y} vs {expect_y}");
        }
    }

    #[test]
    fn fixed_point_stays() {
        let h = parse_hamiltonian(TORUS_HAMILTONIAN).unwrap();
        let (x, y) = real_flow_oracle(&h, 0.5, 0.5, 0.9, &StepControl::default()).unwrap();
        assert!((x - 0.5).abs() < 1e-14 && (y - 0.5).abs() < 1e-14);
    }

    #[test]
    fn zero_time_and_trajectory() {
        let h = parse_hamiltonian(TORUS_HAMILTONIAN).unwrap();
        let ctl = StepControl::default();
        assert_eq!(real_flow_displacement(&h, 0.3, 0.1, 0.0, &ctl).unwrap(), (0.0, 0.0));
        let traj = real_flow_trajectory(&h, 0.3, 0.1, 0.5, 5, &ctl).unwrap();
        assert_eq!(traj.len(), 6);
        let (x, y) = real_flow_oracle(&h, 0.3, 0.1, 0.5, &ctl).unwrap();
        assert!((traj[5].1 - x).abs() < 1e-10 && (traj[5].2 - y).abs() < 1e-10);
    }

    #[test]
    fn impossible_tolerance_fails() {
        let h = parse_hamiltonian(TORUS_HAMILTONIAN).unwrap();
        let ctl = StepControl { max_steps: 3, ..StepControl::default() };
        assert!(matches!(
            real_flow_oracle(&h, 0.3, 0.1, 1.0, &ctl),
            Err(Error::StepFailure { .. })
        ));
    }
}
