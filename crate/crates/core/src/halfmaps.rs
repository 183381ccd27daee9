//! Closed-form half-return maps.
//!
//! Starting on `x = 0` at ordinate `q`, the orbit of one affine half-system
//! returns to `x = 0` after a time `T(q)` at ordinate `P(q)`. Writing
//! `s = omega t`, `nu = lambda / omega` and `xi = beta omega / (a2 (lambda^2 + omega^2))`,
//! the first component of the flow from `(0, q)` is
//!
//! ```text
//! x(t) = (a2/omega) [ e^{nu s} sin(s) (q - zeta) - xi mu rho(s; nu) ]
//! ```
//!
//! with `rho(s; nu) = 1 - e^{nu s} (cos s - nu sin s)`. The return time is the
//! first positive zero of the bracket. When the focus of the half-system is
//! virtual the bracket is strictly monotone on `(0, pi)` and the zero is found
//! by bisection with Newton polish; otherwise the return happens after more
//! than half a revolution and `(pi, 2 pi]` is pre-scanned for a sign change.
//!
//! Every function here works in the coordinates of the system it is given,
//! for either sign of `mu` and `a2`.

use crate::error::{Error, Result};
use crate::model::{FilippovSystem, Side};
use crate::roots::newton_bisect;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Absolute tolerance on `x` at the computed return.
pub const RETURN_TOL: f64 = 1e-12;
/// Relative distance to a fold below which a start point counts as grazing.
pub const GRAZING_TOL: f64 = 1e-12;
/// Samples used to bracket a return that takes more than half a revolution.
pub const LONG_RETURN_SAMPLES: usize = 64;

/// `rho(s; nu) = 1 - e^{nu s} (cos s - nu sin s)`.
pub fn rho(s: f64, nu: f64) -> f64 {
    1.0 - (nu * s).exp() * (s.cos() - nu * s.sin())
}

/// Flow of one half-system for time `t` from `(x, y)`, through the explicit
/// matrix exponential about the half-system's equilibrium.
pub fn flow(sys: &FilippovSystem, side: Side, t: f64, x: f64, y: f64) -> Result<(f64, f64)> {
    let h = sys.half(side);
    let (lambda, omega) = h.focus().ok_or(Error::RealEigenvalues(side))?;
    let det = h.det();
    let xs = -h.beta() * sys.mu / det;
    let ys = -(h.a1 * h.b3 - h.a3 * h.b1) * sys.mu / det;
    let (sn, cs) = (omega * t).sin_cos();
    let k = (h.a1 - h.b2) / (2.0 * omega);
    let e = (lambda * t).exp();
    let (dx, dy) = (x - xs, y - ys);
    let m11 = cs + k * sn;
    let m12 = h.a2 / omega * sn;
    let m21 = h.b1 / omega * sn;
    let m22 = cs - k * sn;
    Ok((e * (m11 * dx + m12 * dy) + xs, e * (m21 * dx + m22 * dy) + ys))
}

/// Per-side constants of the return problem.
#[derive(Debug, Clone, Copy)]
struct HalfContext {
    lambda: f64,
    omega: f64,
    nu: f64,
    a2: f64,
    zeta: f64,
    xi: f64,
    /// `xi * mu`
    xi_mu: f64,
}

impl HalfContext {
    fn new(sys: &FilippovSystem, side: Side) -> Result<Self> {
        let h = sys.half(side);
        let (lambda, omega) = h.focus().ok_or(Error::RealEigenvalues(side))?;
        if h.a2 == 0.0 {
            return Err(Error::FoldUndefined(side));
        }
        let xi = h.beta() * omega / (h.a2 * (lambda * lambda + omega * omega));
        Ok(HalfContext {
            lambda,
            omega,
            nu: lambda / omega,
            a2: h.a2,
            zeta: h.fold(sys.mu),
            xi,
            xi_mu: xi * sys.mu,
        })
    }

    /// `x(s / omega) * omega / a2` and its derivative in `s`, for offset `d = q - zeta`.
    fn crossing(&self, s: f64, d: f64) -> (f64, f64) {
        let e = (self.nu * s).exp();
        let (sn, cs) = s.sin_cos();
        let f = e * sn * d - self.xi_mu * rho(s, self.nu);
        let df = e * ((self.nu * sn + cs) * d - self.xi_mu * (1.0 + self.nu * self.nu) * sn);
        (f, df)
    }
}

/// One half-return: image ordinate, return time and derivative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfMapResult {
    pub side: Side,
    pub q: f64,
    pub p: f64,
    pub t: f64,
    /// `dP/dq = (q - zeta)/(P - zeta) e^{2 lambda T}`.
    pub dp_dq: f64,
    /// The same derivative as `-rho(omega T; nu) / rho(omega T; -nu)`.
    pub dp_dq_rho: f64,
    pub xi: f64,
    /// Set when the long-return pre-scan saw more than one sign change.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

/// Return problem for the orbit that leaves `(0, q)` into the given half-plane.
pub fn half_map(sys: &FilippovSystem, side: Side, q: f64) -> Result<HalfMapResult> {
    let ctx = HalfContext::new(sys, side)?;
    let d = q - ctx.zeta;
    if d.abs() < GRAZING_TOL * ctx.zeta.abs().max(1.0) {
        return Err(Error::Grazing { side, y: q });
    }
    // x' at (0, q) is a2 (q - zeta); it must point into the chosen half-plane.
    if side.sign() * ctx.a2 * d <= 0.0 {
        return Err(Error::NotEntering { side, y: q });
    }
    let f_tol = RETURN_TOL * (ctx.omega / ctx.a2).abs();
    let fdf = |s: f64| ctx.crossing(s, d);
    let mut warning = None;

    let focus_virtual = ctx.xi_mu * d >= 0.0;
    let s = if focus_virtual {
        if ctx.xi_mu == 0.0 {
            PI
        } else {
            newton_bisect(fdf, 0.0, PI, d, f_tol)?
        }
    } else {
        let step = PI / LONG_RETURN_SAMPLES as f64;
        let mut brackets = Vec::new();
        let mut prev = (PI, fdf(PI).0);
        for k in 1..=LONG_RETURN_SAMPLES {
            let s_k = PI + k as f64 * step;
            let f_k = fdf(s_k).0;
            if f_k == 0.0 || f_k.signum() != prev.1.signum() {
                brackets.push((prev, (s_k, f_k)));
            }
            prev = (s_k, f_k);
        }
        let Some(&((lo, f_lo), (hi, f_hi))) = brackets.first() else {
            return Err(Error::NoReturn { side, y: q });
        };
        if brackets.len() > 1 {
            warning = Some(format!(
                "{} sign changes of x(t) in the long-return window; using the earliest",
                brackets.len()
            ));
        }
        if f_hi == 0.0 {
            hi
        } else {
            newton_bisect(fdf, lo, hi, f_lo, f_tol)?
        }
    };

    let t = s / ctx.omega;
    let sn = s.sin();
    let rho_plus = rho(s, ctx.nu);
    let rho_minus = rho(s, -ctx.nu);
    let offset = if sn.abs() > 1e-8 {
        -ctx.xi_mu * (ctx.lambda * t).exp() * rho_minus / sn
    } else {
        -d * (2.0 * ctx.lambda * t).exp() * rho_minus / rho_plus
    };
    let p = ctx.zeta + offset;
    Ok(HalfMapResult {
        side,
        q,
        p,
        t,
        dp_dq: d / offset * (2.0 * ctx.lambda * t).exp(),
        dp_dq_rho: -rho_plus / rho_minus,
        xi: ctx.xi,
        warning,
    })
}

/// Time for the orbit leaving `(0, q)` into `x > 0` to return to `x = 0`.
pub fn return_time_right(sys: &FilippovSystem, q: f64) -> Result<f64> {
    Ok(half_map(sys, Side::Right, q)?.t)
}

pub fn half_map_right(sys: &FilippovSystem, q: f64) -> Result<HalfMapResult> {
    half_map(sys, Side::Right, q)
}

/// Time for the orbit leaving `(0, q)` into `x < 0` to return to `x = 0`.
pub fn return_time_left(sys: &FilippovSystem, q: f64) -> Result<f64> {
    Ok(half_map(sys, Side::Left, q)?.t)
}

pub fn half_map_left(sys: &FilippovSystem, q: f64) -> Result<HalfMapResult> {
    half_map(sys, Side::Left, q)
}

/// The Poincaré map `P = P_L o P_R` through both half-planes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComposedMap {
    pub q: f64,
    pub p: f64,
    pub dp_dq: f64,
    /// `lambda_R T_R(q) + lambda_L T_L(P_R(q))`.
    pub h: f64,
    pub right: HalfMapResult,
    pub left: HalfMapResult,
}

impl ComposedMap {
    /// Chain-rule derivative, for cross-checking [`ComposedMap::dp_dq`].
    pub fn dp_dq_product(&self) -> f64 {
        self.right.dp_dq * self.left.dp_dq
    }
}

/// Composes the right and left half maps. Fails with [`Error::EntersSliding`]
/// when the right return lands where the orbit cannot cross into `x < 0`.
pub fn composed_map(sys: &FilippovSystem, q: f64) -> Result<ComposedMap> {
    let right = half_map(sys, Side::Right, q)?;
    let lh = &sys.left;
    if lh.a2 == 0.0 {
        return Err(Error::FoldUndefined(Side::Left));
    }
    if lh.f(0.0, right.p, sys.mu) >= 0.0 {
        return Err(Error::EntersSliding { y: right.p });
    }
    let left = half_map(sys, Side::Left, right.p)?;
    let (lambda_l, _) = lh.focus().ok_or(Error::RealEigenvalues(Side::Left))?;
    let (lambda_r, _) = sys.right.focus().ok_or(Error::RealEigenvalues(Side::Right))?;
    let zeta_r = sys.fold(Side::Right);
    let zeta_l = sys.fold(Side::Left);
    let h = lambda_r * right.t + lambda_l * left.t;
    let p = left.p;
    let dp_dq = (q - zeta_r) * (right.p - zeta_l) / ((right.p - zeta_r) * (p - zeta_l)) * (2.0 * h).exp();
    Ok(ComposedMap { q, p, dp_dq, h, right, left })
}

/// One row of a map tabulation; entries that cannot be evaluated are NaN.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MapRow {
    pub q: f64,
    #[serde(rename = "P_R")]
    pub p_r: f64,
    #[serde(rename = "T_R")]
    pub t_r: f64,
    #[serde(rename = "P")]
    pub p: f64,
    #[serde(rename = "dP_dq")]
    pub dp_dq: f64,
    pub h: f64,
}

pub fn tabulate(sys: &FilippovSystem, qs: &[f64]) -> Vec<MapRow> {
    qs.iter()
        .map(|&q| {
            let mut row = MapRow { q, p_r: f64::NAN, t_r: f64::NAN, p: f64::NAN, dp_dq: f64::NAN, h: f64::NAN };
            if let Ok(r) = half_map(sys, Side::Right, q) {
                row.p_r = r.p;
                row.t_r = r.t;
            }
            if let Ok(c) = composed_map(sys, q) {
                row.p = c.p;
                row.dp_dq = c.dp_dq;
                row.h = c.h;
            }
            row
        })
        .collect()
}
