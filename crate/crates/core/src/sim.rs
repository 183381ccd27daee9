//! Event-driven integration of the full Filippov system.
//!
//! Inside each half-plane the affine field is propagated exactly with the
//! matrix exponential of the augmented `3 x 3` generator
//! `[[a1, a2, a3 mu], [b1, b2, b3 mu], [0, 0, 0]]`, always measured from the
//! point where the orbit entered the current half-plane. Crossings of `x = 0`
//! are located by bracketed Newton iteration on `x(t)`. On arrival at `x = 0`
//! the signs of `f_L` and `f_R` decide between crossing and sliding; sliding
//! motion is integrated with an adaptive Dormand-Prince pair until a fold or a
//! stable pseudo-equilibrium is reached.
//!
//! This module shares no formulas with [`crate::halfmaps`], so it serves as
//! an independent check of the closed-form return maps.

use crate::error::{Error, MapFailure, Result};
use crate::model::{FilippovSystem, Side};
use crate::roots::newton_bisect;
use crate::sliding::g_slide_unchecked;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt::Write as _;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Left,
    Right,
    Sliding,
}

impl Mode {
    fn of_side(side: Side) -> Mode {
        match side {
            Side::Left => Mode::Left,
            Side::Right => Mode::Right,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Mode::Left => "left",
            Mode::Right => "right",
            Mode::Sliding => "sliding",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub mode: Mode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EventKind {
    #[serde(rename = "cross_LR")]
    CrossLr,
    #[serde(rename = "cross_RL")]
    CrossRl,
    #[serde(rename = "slide_enter")]
    SlideEnter,
    #[serde(rename = "slide_exit_fold")]
    SlideExitFold,
    #[serde(rename = "converge_pseudo_eq")]
    ConvergePseudoEq,
}

impl EventKind {
    pub fn name(self) -> &'static str {
        match self {
            EventKind::CrossLr => "cross_LR",
            EventKind::CrossRl => "cross_RL",
            EventKind::SlideEnter => "slide_enter",
            EventKind::SlideExitFold => "slide_exit_fold",
            EventKind::ConvergePseudoEq => "converge_pseudo_eq",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub t: f64,
    pub kind: EventKind,
    pub y: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    TimeLimit,
    PseudoEquilibrium,
    StopEvent,
}

/// When to end the run before `t_max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StopRule {
    Never,
    FirstEvent,
    FirstOf(EventKind),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Controls {
    /// Largest step inside a half-plane; `None` picks 1/128 of the fastest rotation period.
    pub max_step: Option<f64>,
    /// Bound on `|x|` at a located crossing.
    pub event_tol: f64,
    /// `|g_slide|` below which a contracting sliding orbit counts as converged.
    pub slide_tol: f64,
    /// Relative/absolute error target of the sliding integrator.
    pub slide_rtol: f64,
    /// Half-plane entered from a start point on a repelling sliding segment.
    pub repelling_launch: Side,
    /// Forces the half-plane entered from a start point on `x = 0`.
    pub launch: Option<Side>,
    pub stop: StopRule,
    pub record: bool,
}

impl Default for Controls {
    fn default() -> Self {
        Controls {
            max_step: None,
            event_tol: 1e-12,
            slide_tol: 1e-12,
            slide_rtol: 1e-13,
            repelling_launch: Side::Right,
            launch: None,
            stop: StopRule::Never,
            record: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub events: Vec<Event>,
    pub termination: Termination,
    pub end: Sample,
}

type Mat3 = [[f64; 3]; 3];

fn mat_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut c = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    c
}

fn norm_inf(a: &Mat3) -> f64 {
    a.iter().map(|r| r.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max)
}

/// `exp(m t)` by Taylor series with scaling and squaring.
fn expm(m: &Mat3, t: f64) -> Mat3 {
    let mut a = m.map(|r| r.map(|v| v * t));
    let norm = norm_inf(&a);
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
    let scale = 0.5f64.powi(squarings);
    a = a.map(|r| r.map(|v| v * scale));
    let mut sum = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    let mut term = sum;
    for k in 1..=30 {
        term = mat_mul(&term, &a).map(|r| r.map(|v| v / k as f64));
        for i in 0..3 {
            for j in 0..3 {
                sum[i][j] += term[i][j];
            }
        }
        if norm_inf(&term) < 1e-18 {
            break;
        }
    }
    for _ in 0..squarings {
        sum = mat_mul(&sum, &sum);
    }
    sum
}

fn generator(sys: &FilippovSystem, side: Side) -> Mat3 {
    let h = sys.half(side);
    [[h.a1, h.a2, h.a3 * sys.mu], [h.b1, h.b2, h.b3 * sys.mu], [0.0, 0.0, 0.0]]
}

/// Exact flow of one affine half-system (any eigenstructure) for time `t`.
pub fn propagate(sys: &FilippovSystem, side: Side, t: f64, x: f64, y: f64) -> (f64, f64) {
    Piece { m: generator(sys, side), x0: x, y0: y }.at(t)
}

struct Piece {
    m: Mat3,
    x0: f64,
    y0: f64,
}

impl Piece {
    fn at(&self, tau: f64) -> (f64, f64) {
        let e = expm(&self.m, tau);
        (
            e[0][0] * self.x0 + e[0][1] * self.y0 + e[0][2],
            e[1][0] * self.x0 + e[1][1] * self.y0 + e[1][2],
        )
    }

    /// `x'` at a state.
    fn fx(&self, x: f64, y: f64) -> f64 {
        self.m[0][0] * x + self.m[0][1] * y + self.m[0][2]
    }

    fn gy(&self, x: f64, y: f64) -> f64 {
        self.m[1][0] * x + self.m[1][1] * y + self.m[1][2]
    }
}

/// Default step: 1/128 of the shortest rotation period, or of `2 pi / |A|` for nodes.
pub fn default_max_step(sys: &FilippovSystem) -> f64 {
    let rate = [Side::Left, Side::Right]
        .iter()
        .map(|&s| {
            let h = sys.half(s);
            match h.focus() {
                Some((_, omega)) => omega,
                None => (h.a1.abs() + h.a2.abs()).max(h.b1.abs() + h.b2.abs()),
            }
        })
        .fold(0.0, f64::max);
    if rate > 0.0 {
        2.0 * PI / rate / 128.0
    } else {
        0.1
    }
}

struct Integrator<'a> {
    sys: &'a FilippovSystem,
    c: Controls,
    max_step: f64,
    t_max: f64,
    samples: Vec<Sample>,
    events: Vec<Event>,
}

enum Outcome {
    Continue { t: f64, x: f64, y: f64, mode: Mode },
    Stop { t: f64, x: f64, y: f64, mode: Mode, why: Termination },
}

impl Integrator<'_> {
    fn fl(&self, y: f64) -> f64 {
        self.sys.left.f(0.0, y, self.sys.mu)
    }

    fn fr(&self, y: f64) -> f64 {
        self.sys.right.f(0.0, y, self.sys.mu)
    }

    fn record(&mut self, t: f64, x: f64, y: f64, mode: Mode) {
        if self.c.record {
            self.samples.push(Sample { t, x, y, mode });
        }
    }

    /// Logs an event; `true` if the stop rule fires.
    fn event(&mut self, t: f64, kind: EventKind, y: f64) -> bool {
        self.events.push(Event { t, kind, y });
        match self.c.stop {
            StopRule::Never => false,
            StopRule::FirstEvent => true,
            StopRule::FirstOf(k) => k == kind,
        }
    }

    /// Mode taken by an orbit sitting at `(0, y)`.
    fn mode_on_line(&self, y: f64) -> Result<Mode> {
        let (fl, fr) = (self.fl(y), self.fr(y));
        if fl > 0.0 && fr < 0.0 {
            return Ok(Mode::Sliding);
        }
        if fl < 0.0 && fr > 0.0 {
            return Ok(Mode::of_side(self.c.repelling_launch));
        }
        let s = fl + fr;
        if s > 0.0 {
            Ok(Mode::Right)
        } else if s < 0.0 {
            Ok(Mode::Left)
        } else {
            Err(Error::Degenerate(format!("both fields tangent to x = 0 at y = {y}")))
        }
    }

    fn run(&mut self, x0: f64, y0: f64) -> Result<Trajectory> {
        let mut mode = if x0 > 0.0 {
            Mode::Right
        } else if x0 < 0.0 {
            Mode::Left
        } else if let Some(side) = self.c.launch {
            Mode::of_side(side)
        } else {
            self.mode_on_line(y0)?
        };
        let (mut t, mut x, mut y) = (0.0, x0, y0);
        self.record(t, x, y, mode);
        if mode == Mode::Sliding && self.event(t, EventKind::SlideEnter, y) {
            return Ok(self.finish(t, x, y, mode, Termination::StopEvent));
        }
        while t < self.t_max {
            let out = match mode {
                Mode::Left | Mode::Right => {
                    let side = if mode == Mode::Left { Side::Left } else { Side::Right };
                    self.smooth_piece(side, t, x, y)?
                }
                Mode::Sliding => self.slide(t, y)?,
            };
            match out {
                Outcome::Continue { t: t1, x: x1, y: y1, mode: m1 } => {
                    (t, x, y, mode) = (t1, x1, y1, m1);
                }
                Outcome::Stop { t, x, y, mode, why } => return Ok(self.finish(t, x, y, mode, why)),
            }
        }
        Ok(self.finish(t, x, y, mode, Termination::TimeLimit))
    }

    fn finish(&mut self, t: f64, x: f64, y: f64, mode: Mode, why: Termination) -> Trajectory {
        let end = Sample { t, x, y, mode };
        if self.c.record && self.samples.last() != Some(&end) {
            self.samples.push(end);
        }
        Trajectory {
            samples: std::mem::take(&mut self.samples),
            events: std::mem::take(&mut self.events),
            termination: why,
            end,
        }
    }

    /// Follows one half-plane from `(x, y)` at time `t` until the orbit
    /// reaches `x = 0` again or time runs out.
    fn smooth_piece(&mut self, side: Side, t0: f64, x: f64, y: f64) -> Result<Outcome> {
        let piece = Piece { m: generator(self.sys, side), x0: x, y0: y };
        let sg = side.sign();
        let mode = Mode::of_side(side);
        let h = self.max_step;
        // Signed distance from the line; positive on the correct side.
        let dist = |tau: f64| sg * piece.at(tau).0;

        let mut lo = 0.0;
        if x == 0.0 {
            // Leaving the line: find a first instant strictly inside the half-plane.
            let mut tau = (h / 64.0).min(self.t_max - t0);
            let mut prev = None;
            let mut found = false;
            for _ in 0..80 {
                if dist(tau) > 0.0 {
                    found = true;
                    break;
                }
                prev = Some(tau);
                tau *= 0.5;
            }
            if !found {
                return Err(Error::Degenerate(format!("orbit from (0, {y}) does not leave x = 0 into the {side} half-plane")));
            }
            if let Some(hi) = prev {
                return self.locate(&piece, side, t0, tau, hi);
            }
            lo = tau;
        }
        loop {
            if !(t0 + lo < self.t_max) {
                let (xe, ye) = piece.at(lo);
                return Ok(Outcome::Stop { t: t0 + lo, x: xe, y: ye, mode, why: Termination::TimeLimit });
            }
            let hi = (lo + h).min(self.t_max - t0);
            let (xh, yh) = piece.at(hi);
            if !(xh.is_finite() && yh.is_finite()) {
                return Err(Error::NonFiniteState(t0 + hi));
            }
            if sg * xh <= 0.0 {
                return self.locate(&piece, side, t0, lo, hi);
            }
            // A turning point of x inside the step may hide a pair of crossings.
            let (xl, yl) = piece.at(lo);
            let vl = sg * piece.fx(xl, yl);
            let vh = sg * piece.fx(xh, yh);
            if vl < 0.0 && vh > 0.0 {
                let vdot = |tau: f64| {
                    let (a, b) = piece.at(tau);
                    let (f, g) = (piece.fx(a, b), piece.gy(a, b));
                    (sg * f, sg * (piece.m[0][0] * f + piece.m[0][1] * g))
                };
                let te = newton_bisect(vdot, lo, hi, vl, 0.0)?;
                if dist(te) <= 0.0 {
                    return self.locate(&piece, side, t0, lo, te);
                }
            }
            self.record(t0 + hi, xh, yh, mode);
            lo = hi;
        }
    }

    /// Root of `x` on `[lo, hi]` (inside on `lo`, outside on `hi`), then the
    /// Filippov decision at the landing point.
    fn locate(&mut self, piece: &Piece, side: Side, t0: f64, lo: f64, hi: f64) -> Result<Outcome> {
        let sg = side.sign();
        let x_lo = sg * piece.at(lo).0;
        let fdf = |tau: f64| {
            let (a, b) = piece.at(tau);
            (sg * a, sg * piece.fx(a, b))
        };
        let tau = if sg * piece.at(hi).0 == 0.0 { hi } else { newton_bisect(fdf, lo, hi, x_lo, self.c.event_tol)? };
        let (_, y) = piece.at(tau);
        let t = t0 + tau;
        self.record(t, 0.0, y, Mode::of_side(side));
        // Arriving from `side`; the opposite field decides.
        let other = side.opposite();
        let f_other = if other == Side::Left { self.fl(y) } else { self.fr(y) };
        let crosses = other.sign() * f_other > 0.0;
        let (kind, mode) = if crosses {
            let kind = if side == Side::Left { EventKind::CrossLr } else { EventKind::CrossRl };
            (kind, Mode::of_side(other))
        } else {
            (EventKind::SlideEnter, Mode::Sliding)
        };
        if self.event(t, kind, y) {
            return Ok(Outcome::Stop { t, x: 0.0, y, mode, why: Termination::StopEvent });
        }
        Ok(Outcome::Continue { t, x: 0.0, y, mode })
    }

    /// Folds that bound sliding motion.
    fn barriers(&self) -> Vec<f64> {
        [Side::Left, Side::Right]
            .iter()
            .filter(|&&s| self.sys.half(s).a2 != 0.0)
            .map(|&s| self.sys.fold(s))
            .collect()
    }

    fn slide(&mut self, t0: f64, y0: f64) -> Result<Outcome> {
        let g = |y: f64| g_slide_unchecked(self.sys, y);
        let barriers = self.barriers();
        let (mut t, mut y) = (t0, y0);
        let mut h = self.max_step / 16.0;
        let rtol = self.c.slide_rtol;
        loop {
            if self.converged(y) {
                self.event(t, EventKind::ConvergePseudoEq, y);
                return Ok(Outcome::Stop { t, x: 0.0, y, mode: Mode::Sliding, why: Termination::PseudoEquilibrium });
            }
            if t >= self.t_max {
                return Ok(Outcome::Stop { t, x: 0.0, y, mode: Mode::Sliding, why: Termination::TimeLimit });
            }
            h = h.min(self.t_max - t).min(16.0 * self.max_step);
            let (y1, err) = dopri_step(&g, y, h);
            if !y1.is_finite() {
                return Err(Error::NonFiniteState(t + h));
            }
            let scale = rtol * (1.0 + y.abs().max(y1.abs()));
            if err > scale {
                let shrink = (0.9 * (scale / err).powf(0.2)).clamp(0.1, 0.5);
                h *= shrink;
                if h < 1e-14 * t.abs().max(1.0) {
                    return Err(Error::StepUnderflow(t));
                }
                continue;
            }
            // A fold passed during the step ends sliding there.
            let hit = barriers.iter().copied().filter(|&b| (y - b) * (y1 - b) < 0.0 || (y1 == b && y != b)).min_by(|a, b| {
                (a - y).abs().total_cmp(&(b - y).abs())
            });
            if let Some(b) = hit {
                let tau = self.time_to_barrier(&g, y, b, h)?;
                let t_exit = t + tau;
                self.record(t_exit, 0.0, b, Mode::Sliding);
                let mode = self.exit_mode(b, g(b))?;
                if self.event(t_exit, EventKind::SlideExitFold, b) {
                    return Ok(Outcome::Stop { t: t_exit, x: 0.0, y: b, mode, why: Termination::StopEvent });
                }
                return Ok(Outcome::Continue { t: t_exit, x: 0.0, y: b, mode });
            }
            t += h;
            y = y1;
            self.record(t, 0.0, y, Mode::Sliding);
            let grow = if err == 0.0 { 5.0 } else { (0.9 * (scale / err).powf(0.2)).clamp(1.0, 5.0) };
            h *= grow;
        }
    }

    fn converged(&self, y: f64) -> bool {
        let g0 = g_slide_unchecked(self.sys, y);
        if !(g0.abs() < self.c.slide_tol) {
            return false;
        }
        let d = 1e-6 * y.abs().max(1.0);
        let slope = (g_slide_unchecked(self.sys, y + d) - g_slide_unchecked(self.sys, y - d)) / (2.0 * d);
        slope < 0.0
    }

    /// Step length that carries the sliding solution from `y` exactly to `b`.
    fn time_to_barrier(&self, g: &impl Fn(f64) -> f64, y: f64, b: f64, h: f64) -> Result<f64> {
        let (mut lo, mut hi) = (0.0, h);
        let s = (b - y).signum();
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let (ym, _) = dopri_step(g, y, mid);
            if s * (b - ym) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 4.0 * f64::EPSILON * hi {
                break;
            }
        }
        Ok(hi)
    }

    /// Half-plane entered when sliding reaches the fold at `b` moving with speed `v`.
    fn exit_mode(&self, b: f64, v: f64) -> Result<Mode> {
        let past = b + v.signum() * 1e-9 * b.abs().max(1.0);
        let right = self.fr(past) > 0.0;
        let left = self.fl(past) < 0.0;
        match (left, right) {
            (false, true) => Ok(Mode::Right),
            (true, false) => Ok(Mode::Left),
            _ => Err(Error::Degenerate(format!("ambiguous sliding exit at fold y = {b}"))),
        }
    }
}

/// One Dormand-Prince 5(4) step for the scalar autonomous equation `y' = g(y)`.
fn dopri_step(g: &impl Fn(f64) -> f64, y: f64, h: f64) -> (f64, f64) {
    let k1 = g(y);
    let k2 = g(y + h * (k1 / 5.0));
    let k3 = g(y + h * (3.0 / 40.0 * k1 + 9.0 / 40.0 * k2));
    let k4 = g(y + h * (44.0 / 45.0 * k1 - 56.0 / 15.0 * k2 + 32.0 / 9.0 * k3));
    let k5 = g(y + h * (19372.0 / 6561.0 * k1 - 25360.0 / 2187.0 * k2 + 64448.0 / 6561.0 * k3 - 212.0 / 729.0 * k4));
    let k6 = g(y + h * (9017.0 / 3168.0 * k1 - 355.0 / 33.0 * k2 + 46732.0 / 5247.0 * k3 + 49.0 / 176.0 * k4
        - 5103.0 / 18656.0 * k5));
    let y5 = y + h * (35.0 / 384.0 * k1 + 500.0 / 1113.0 * k3 + 125.0 / 192.0 * k4 - 2187.0 / 6784.0 * k5
        + 11.0 / 84.0 * k6);
    let k7 = g(y5);
    let y4 = y + h * (5179.0 / 57600.0 * k1 + 7571.0 / 16695.0 * k3 + 393.0 / 640.0 * k4 - 92097.0 / 339200.0 * k5
        + 187.0 / 2100.0 * k6
        + 1.0 / 40.0 * k7);
    (y5, (y5 - y4).abs())
}

/// Integrates the Filippov system from `(x0, y0)` for `0 <= t <= t_max`.
pub fn integrate(sys: &FilippovSystem, x0: f64, y0: f64, t_max: f64, controls: &Controls) -> Result<Trajectory> {
    if !(x0.is_finite() && y0.is_finite()) {
        return Err(Error::NonFiniteState(0.0));
    }
    if !(t_max > 0.0) {
        return Err(Error::InvalidRange(format!("t_max must be positive, got {t_max}")));
    }
    let max_step = controls.max_step.unwrap_or_else(|| default_max_step(sys));
    if !(max_step > 0.0) {
        return Err(Error::InvalidRange(format!("max_step must be positive, got {max_step}")));
    }
    Integrator { sys, c: *controls, max_step, t_max, samples: Vec::new(), events: Vec::new() }.run(x0, y0)
}

/// Time budget for one return: a hundred turns of the slower focus.
pub fn default_return_budget(sys: &FilippovSystem) -> f64 {
    let slowest = [Side::Left, Side::Right]
        .iter()
        .filter_map(|&s| sys.half(s).focus().map(|(_, w)| w))
        .fold(f64::INFINITY, f64::min);
    if slowest.is_finite() {
        100.0 * 2.0 * PI / slowest
    } else {
        1000.0
    }
}

/// Simulated return: the orbit leaving `(0, q)` into `x > 0`, followed
/// through any sliding, until it next crosses from `x < 0` into `x > 0`.
/// Returns the ordinate of that crossing and whether sliding occurred.
pub fn numeric_poincare(sys: &FilippovSystem, q: f64) -> Result<(f64, bool)> {
    if !(sys.right.f(0.0, q, sys.mu) > 0.0) {
        return Err(Error::NotEntering { side: Side::Right, y: q });
    }
    let c = Controls {
        launch: Some(Side::Right),
        stop: StopRule::FirstOf(EventKind::CrossLr),
        record: false,
        ..Controls::default()
    };
    let traj = integrate(sys, 0.0, q, default_return_budget(sys), &c)?;
    match traj.termination {
        Termination::StopEvent => {
            let via = traj.events.iter().any(|e| e.kind == EventKind::SlideEnter);
            Ok((traj.end.y, via))
        }
        Termination::PseudoEquilibrium => Err(Error::MapUndefined(MapFailure::ConvergedToPseudoEquilibrium)),
        Termination::TimeLimit => Err(Error::MapUndefined(MapFailure::NoReturn)),
    }
}

/// Simulated half-return: leaves `(0, y)` into `side` and stops at the next
/// arrival on `x = 0`. Returns `(time, ordinate)`.
pub fn numeric_half_return(sys: &FilippovSystem, side: Side, y: f64) -> Result<(f64, f64)> {
    if !(side.sign() * sys.half(side).f(0.0, y, sys.mu) > 0.0) {
        return Err(Error::NotEntering { side, y });
    }
    let c = Controls { launch: Some(side), stop: StopRule::FirstEvent, record: false, ..Controls::default() };
    let traj = integrate(sys, 0.0, y, default_return_budget(sys), &c)?;
    match traj.termination {
        Termination::StopEvent => Ok((traj.end.t, traj.end.y)),
        _ => Err(Error::NoReturn { side, y }),
    }
}

/// `t,x,y,mode` rows.
pub fn trajectory_csv(traj: &Trajectory) -> String {
    let mut s = String::from("t,x,y,mode\n");
    for p in &traj.samples {
        let _ = writeln!(s, "{},{},{},{}", p.t, p.x, p.y, p.mode.name());
    }
    s
}

/// `t,kind,y` rows.
pub fn events_csv(traj: &Trajectory) -> String {
    let mut s = String::from("t,kind,y\n");
    for e in &traj.events {
        let _ = writeln!(s, "{},{},{}", e.t, e.kind.name(), e.y);
    }
    s
}
