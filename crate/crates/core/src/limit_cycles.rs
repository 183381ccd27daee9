//! Fixed points of the return map to `x = 0` and limit-cycle certificates.
//!
//! Scanning is done on the normalized system (`mu = 1`, `a2L > 0`, see
//! [`crate::normalize`]) where the map is defined for `q > zeta_R`: the orbit
//! leaves `(0, q)` into `x > 0`, and `P(q)` is the ordinate at which it next
//! crosses from `x < 0` back into `x > 0`. Where the orbit crosses `x = 0`
//! transversally both times the closed-form composition is used; where it
//! slides, the map is evaluated by simulation.

use crate::classify::{equilibria, sliding_region, SlidingKind};
use crate::error::{Error, MapFailure, Result};
use crate::halfmaps::{composed_map, rho, ComposedMap};
use crate::model::{FilippovSystem, Side};
use crate::normalize::Normalization;
use crate::roots::bisect;
use crate::sim::numeric_poincare;
use crate::sliding::pseudo_equilibria;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

/// Target for `|P(q) - q|` at a refined fixed point.
pub const FIXED_POINT_TOL: f64 = 1e-11;
/// Relative step of the finite-difference multiplier of the simulated map.
pub const FD_STEP: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stability {
    Stable,
    Unstable,
}

impl Stability {
    fn of(multiplier: f64) -> Self {
        if multiplier.abs() < 1.0 {
            Stability::Stable
        } else {
            Stability::Unstable
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapMethod {
    ClosedForm,
    Simulation,
}

/// One evaluation of the normalized return map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapValue {
    pub p: f64,
    /// Analytic `dP/dq`, when the closed form applies.
    pub dp_dq: Option<f64>,
    pub via_sliding: bool,
    pub method: MapMethod,
}

/// The return map of a normalized system, falling back to simulation when
/// the orbit meets the sliding segment.
pub fn return_map(n: &FilippovSystem, q: f64) -> Result<MapValue> {
    match composed_map(n, q) {
        Ok(c) if n.right.f(0.0, c.p, n.mu) > 0.0 => {
            Ok(MapValue { p: c.p, dp_dq: Some(c.dp_dq), via_sliding: false, method: MapMethod::ClosedForm })
        }
        Ok(_) | Err(Error::EntersSliding { .. }) => {
            let (p, via_sliding) = numeric_poincare(n, q)?;
            Ok(MapValue { p, dp_dq: None, via_sliding, method: MapMethod::Simulation })
        }
        Err(e) => Err(e),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedPoint {
    /// Ordinate at which the cycle crosses into `x > 0`, original coordinates.
    pub y: f64,
    /// `y / mu`.
    pub q: f64,
    pub q_normalized: f64,
    /// Multiplier of the forward return map in the original system.
    #[serde(rename = "dP_dq")]
    pub dp_dq: f64,
    pub stability: Stability,
    pub via_sliding: bool,
    pub method: MapMethod,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanOptions {
    /// Lower end, as an offset above `zeta_R` in normalized units.
    pub eps: Option<f64>,
    /// Lower end in normalized units; takes precedence over `eps`.
    pub q_min: Option<f64>,
    /// Upper end in normalized units.
    pub q_max: Option<f64>,
    pub n_scan: usize,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions { eps: None, q_min: None, q_max: None, n_scan: 4096 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub mu: f64,
    /// Normalized scan range.
    pub q_min: f64,
    pub q_max: f64,
    pub n_scan: usize,
    /// Innermost cycle first.
    pub fixed_points: Vec<FixedPoint>,
    pub warnings: Vec<String>,
}

fn scan_grid(n: &FilippovSystem, opts: &ScanOptions) -> Result<(f64, Vec<f64>)> {
    let zr = n.fold(Side::Right);
    let zl = n.fold(Side::Left);
    let eps = match opts.q_min {
        Some(q) => q - zr,
        None => opts.eps.unwrap_or(1e-8 * zr.abs().max(1.0)),
    };
    let q_max = opts.q_max.unwrap_or(1e3 * zl.abs().max(zr.abs()).max(1.0));
    if !(eps > 0.0) || !(q_max > zr + eps) || opts.n_scan < 2 {
        return Err(Error::InvalidRange(format!(
            "need 0 < eps and zeta_R + eps < q_max with at least 2 points (eps = {eps}, q_max = {q_max}, zeta_R = {zr})"
        )));
    }
    let ratio = (q_max - zr) / eps;
    let last = (opts.n_scan - 1) as f64;
    let grid = (0..opts.n_scan)
        .map(|k| if k + 1 == opts.n_scan { q_max } else { zr + eps * ratio.powf(k as f64 / last) })
        .collect();
    Ok((zr + eps, grid))
}

/// Multiplier of the normalized map at `q`: analytic where possible,
/// otherwise a centred difference of the simulated map.
fn multiplier(n: &FilippovSystem, q: f64, v: &MapValue) -> Result<f64> {
    if let Some(d) = v.dp_dq {
        return Ok(d);
    }
    let h = FD_STEP * q.abs().max(1e-3);
    let plus = return_map(n, q + h)?.p;
    let minus = return_map(n, q - h)?.p;
    Ok((plus - minus) / (2.0 * h))
}

/// Every sign change of `P(q) - q` on the scan range, refined by bisection.
pub fn find_fixed_points(sys: &FilippovSystem, opts: &ScanOptions) -> Result<ScanReport> {
    sys.eigen_structure()?;
    let norm = Normalization::of(sys)?;
    let n = &norm.system;
    let (q_min, grid) = scan_grid(n, opts)?;
    let q_max = *grid.last().unwrap_or(&q_min);
    let disp: Vec<Option<f64>> = grid.iter().map(|&q| return_map(n, q).ok().map(|v| v.p - q)).collect();
    let mut warnings = Vec::new();
    if disp.iter().all(Option::is_none) {
        return Err(Error::MapUndefined(MapFailure::NoReturn));
    }
    let undefined = disp.iter().filter(|d| d.is_none()).count();
    if undefined > 0 {
        warnings.push(format!("return map undefined at {undefined} of {} scan points", grid.len()));
    }
    if let Some(Some(d0)) = disp.first() {
        let left_focus_admissible = equilibria(n).map(|(l, _)| l.admissible).unwrap_or(false);
        if left_focus_admissible && *d0 <= 0.0 {
            warnings.push(format!("P(q) - q = {d0:e} <= 0 next to the right fold"));
        }
    }
    if let (Some(Some(d1)), Ok(e)) = (disp.last(), n.eigen_structure()) {
        let expected = (e.alpha * std::f64::consts::PI).exp() - 1.0;
        if expected * d1 < 0.0 {
            warnings.push(format!("sign of P(q) - q at q_max ({d1:e}) differs from e^(alpha pi) - 1"));
        }
    }

    let d = |q: f64| return_map(n, q).map(|v| v.p - q);
    let mut fixed_points = Vec::new();
    for k in 1..grid.len() {
        let (Some(a), Some(b)) = (disp[k - 1], disp[k]) else { continue };
        let (lo, hi) = (grid[k - 1], grid[k]);
        let q = if a == 0.0 {
            lo
        } else if b == 0.0 {
            continue; // picked up as `lo` of the next bracket
        } else if a.signum() != b.signum() {
            bisect(d, lo, hi, a, FIXED_POINT_TOL)?
        } else {
            continue;
        };
        let v = return_map(n, q)?;
        let resid = v.p - q;
        // A jump of the map rather than a crossing of the diagonal.
        if resid.abs() > 1e-6 * q.abs().max(1.0) {
            warnings.push(format!("discarded discontinuity of P(q) - q near q = {q}"));
            continue;
        }
        let dp = multiplier(n, q, &v)?;
        let dp_dq = norm.multiplier_to_original(dp);
        let y = norm.to_original(q);
        fixed_points.push(FixedPoint {
            y,
            q: y / sys.mu,
            q_normalized: q,
            dp_dq,
            stability: Stability::of(dp_dq),
            via_sliding: v.via_sliding,
            method: v.method,
        });
    }
    fixed_points.sort_by(|a, b| a.q_normalized.total_cmp(&b.q_normalized));
    Ok(ScanReport { mu: sys.mu, q_min, q_max, n_scan: grid.len(), fixed_points, warnings })
}

/// `(q, P(q) - q)` rows of the normalized map on the default scan grid.
pub fn displacement_table(sys: &FilippovSystem, opts: &ScanOptions) -> Result<Vec<(f64, f64)>> {
    let norm = Normalization::of(sys)?;
    let (_, grid) = scan_grid(&norm.system, opts)?;
    Ok(grid
        .into_iter()
        .map(|q| (q, return_map(&norm.system, q).map(|v| v.p - q).unwrap_or(f64::NAN)))
        .collect())
}

pub fn displacement_csv(rows: &[(f64, f64)]) -> String {
    let mut s = String::from("q,displacement\n");
    for (q, d) in rows {
        let _ = writeln!(s, "{q},{d}");
    }
    s
}

/// A limit cycle made of one excursion into each half-plane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitCycleCertificate {
    /// `y_R / mu`: the cycle crosses into `x > 0` at `y_R`.
    #[serde(rename = "q_R")]
    pub q_r: f64,
    /// `y_L / mu`: the cycle crosses into `x < 0` at `y_L`.
    #[serde(rename = "q_L")]
    pub q_l: f64,
    #[serde(rename = "y_R")]
    pub y_r: f64,
    #[serde(rename = "y_L")]
    pub y_l: f64,
    /// Time spent in `x > 0`.
    #[serde(rename = "t_R")]
    pub t_r: f64,
    /// Time spent in `x < 0`.
    #[serde(rename = "t_L")]
    pub t_l: f64,
    pub stability: Stability,
    /// Absolute residuals of the four crossing equations.
    pub residuals: [f64; 4],
    #[serde(rename = "dP_dq_at_fp")]
    pub dp_dq_at_fp: f64,
}

impl LimitCycleCertificate {
    pub fn period(&self) -> f64 {
        self.t_r + self.t_l
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

/// Residuals of the crossing equations for one half-system: the orbit that
/// enters the half-plane at `q_in * mu` and leaves it at `q_out * mu` after time `t`.
fn crossing_residuals(sys: &FilippovSystem, side: Side, q_in: f64, q_out: f64, t: f64) -> Result<[f64; 2]> {
    let h = sys.half(side);
    let (lambda, omega) = h.focus().ok_or(Error::RealEigenvalues(side))?;
    let xi = h.beta() * omega / (h.a2 * (lambda * lambda + omega * omega));
    let (nu, s) = (lambda / omega, omega * t);
    let shift = h.a3 / h.a2;
    Ok([
        q_in + shift - xi * (-lambda * t).exp() * rho(s, nu) / s.sin(),
        q_out + shift + xi * (lambda * t).exp() * rho(s, -nu) / s.sin(),
    ])
}

fn simulated_multiplier(sys: &FilippovSystem, y: f64) -> Result<f64> {
    let h = FD_STEP * y.abs().max(1e-3);
    let plus = numeric_poincare(sys, y + h)?.0;
    let minus = numeric_poincare(sys, y - h)?.0;
    Ok((plus - minus) / (2.0 * h))
}

/// Polishes the fixed point entering `x > 0` at ordinate `y_star` (original
/// coordinates) and checks it against the crossing equations.
pub fn certify_cycle(sys: &FilippovSystem, y_star: f64) -> Result<LimitCycleCertificate> {
    if sys.mu == 0.0 {
        return Err(Error::ZeroParameter("no limit cycle at the bifurcation point"));
    }
    let via_sliding = |y: f64| -> Error {
        let dp_dq_estimate = simulated_multiplier(sys, y).unwrap_or(f64::NAN);
        Error::ViaSliding { q: y / sys.mu, dp_dq_estimate }
    };
    let eval = |y: f64| -> Result<ComposedMap> {
        match composed_map(sys, y) {
            Err(Error::EntersSliding { .. }) => Err(via_sliding(y)),
            other => other,
        }
    };
    let mut y = y_star;
    let mut c = eval(y)?;
    let scale = y.abs().max(1.0);
    let initial = (c.p - y).abs();
    for _ in 0..50 {
        let d = c.p - y;
        if d.abs() <= 1e-14 * scale {
            break;
        }
        let next = y - d / (c.dp_dq - 1.0);
        let cn = eval(next)?;
        if (cn.p - next).abs() >= d.abs() {
            break;
        }
        y = next;
        c = cn;
    }
    // Polishing may only move a genuine fixed point by a rounding-level amount.
    if (c.p - y).abs() > 1e-9 * scale || (y - y_star).abs() > 1e-6 * scale {
        return Err(Error::NotAFixedPoint { q: y_star / sys.mu, displacement: initial });
    }
    if !(sys.right.f(0.0, c.p, sys.mu) > 0.0) {
        return Err(via_sliding(y));
    }
    let (y_r, y_l, t_r, t_l) = (y, c.right.p, c.right.t, c.left.t);
    let mu = sys.mu;
    let [r1, r2] = crossing_residuals(sys, Side::Right, y_r / mu, y_l / mu, t_r)?;
    let [r3, r4] = crossing_residuals(sys, Side::Left, y_l / mu, y_r / mu, t_l)?;
    Ok(LimitCycleCertificate {
        q_r: y_r / mu,
        q_l: y_l / mu,
        y_r,
        y_l,
        t_r,
        t_l,
        stability: Stability::of(c.dp_dq),
        residuals: [r1.abs(), r2.abs(), r3.abs(), r4.abs()],
        dp_dq_at_fp: c.dp_dq,
    })
}

/// Admissible focus at one value of `mu`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FocusSummary {
    pub side: Side,
    pub stable: bool,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Panel {
    pub mu: f64,
    pub admissible_focus: Option<FocusSummary>,
    pub sliding: Option<SlidingKind>,
    pub pseudo_equilibria: Option<usize>,
    pub cycles: Vec<Stability>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

/// Admissible focus, sliding segment, pseudo-equilibria and cycles at `mu = -1, 0, 1`.
pub fn beb_summary(sys: &FilippovSystem) -> Vec<Panel> {
    [-1.0, 0.0, 1.0]
        .into_iter()
        .map(|mu| {
            let s = sys.with_mu(mu);
            let mut notes = Vec::new();
            let admissible_focus = match equilibria(&s) {
                Ok((l, r)) => [l, r].into_iter().find(|e| e.admissible).map(|e| FocusSummary {
                    side: e.side,
                    stable: s.half(e.side).trace() < 0.0,
                    x: e.x_star,
                    y: e.y_star,
                }),
                Err(e) => {
                    notes.push(e.to_string());
                    None
                }
            };
            let sliding = sliding_region(&s).map(|r| r.kind).map_err(|e| notes.push(e.to_string())).ok();
            let pseudo_equilibria = pseudo_equilibria(&s).map(|r| r.admissible_count).ok();
            let cycles = if mu == 0.0 {
                Vec::new()
            } else {
                match find_fixed_points(&s, &ScanOptions::default()) {
                    Ok(rep) => {
                        notes.extend(rep.warnings);
                        rep.fixed_points.iter().map(|f| f.stability).collect()
                    }
                    Err(e) => {
                        notes.push(e.to_string());
                        Vec::new()
                    }
                }
            };
            Panel { mu, admissible_focus, sliding, pseudo_equilibria, cycles, notes }
        })
        .collect()
}
