//! Sliding motion on `x = 0` and its equilibria.
//!
//! On a sliding segment the Filippov convention moves along
//! `y' = g_slide(y) = (f_L g_R - f_R g_L) / (f_L - f_R)`, all evaluated at
//! `x = 0`. Pseudo-equilibria are the zeros of the numerator
//!
//! ```text
//! n(y; mu) = f_L g_R - f_R g_L = A y^2 + B mu y + C mu^2
//! ```
//!
//! that lie between the two folds.

use crate::classify::{gamma, sliding_region, SlidingKind, SlidingRegionInfo};
use crate::error::{Error, Result};
use crate::model::FilippovSystem;
use serde::{Deserialize, Serialize};

/// Relative distance to a fold within which a pseudo-equilibrium is flagged as a boundary one.
pub const BOUNDARY_TOL: f64 = 1e-10;

/// Coefficients of `n(y; mu) = A y^2 + B mu y + C mu^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Numerator {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Numerator {
    pub fn of(sys: &FilippovSystem) -> Self {
        let (l, r) = (&sys.left, &sys.right);
        Numerator {
            a: l.a2 * r.b2 - r.a2 * l.b2,
            b: l.a2 * r.b3 + l.a3 * r.b2 - r.a2 * l.b3 - r.a3 * l.b2,
            c: l.a3 * r.b3 - r.a3 * l.b3,
        }
    }

    pub fn eval(&self, y: f64, mu: f64) -> f64 {
        (self.a * y + self.b * mu) * y + self.c * mu * mu
    }

    pub fn derivative(&self, y: f64, mu: f64) -> f64 {
        2.0 * self.a * y + self.b * mu
    }

    /// Real roots in ascending order, via the cancellation-free form of the
    /// quadratic formula.
    pub fn roots(&self, mu: f64) -> Result<Vec<f64>> {
        let (a, b, c) = (self.a, self.b * mu, self.c * mu * mu);
        if a == 0.0 && b == 0.0 {
            return if c == 0.0 { Err(Error::DegenerateQuadratic) } else { Ok(Vec::new()) };
        }
        if a == 0.0 {
            return Ok(vec![-c / b]);
        }
        let disc = b * b - 4.0 * a * c;
        if disc < 0.0 {
            return Ok(Vec::new());
        }
        if disc == 0.0 {
            return Ok(vec![-b / (2.0 * a)]);
        }
        let q = -0.5 * (b + b.signum() * disc.sqrt());
        let mut r = vec![q / a, c / q];
        r.sort_by(f64::total_cmp);
        Ok(r)
    }
}

/// `n(y; mu) = f_L g_R - f_R g_L` at `x = 0`.
pub fn numerator(sys: &FilippovSystem, y: f64) -> f64 {
    let (l, r, mu) = (&sys.left, &sys.right, sys.mu);
    l.f(0.0, y, mu) * r.g(0.0, y, mu) - r.f(0.0, y, mu) * l.g(0.0, y, mu)
}

fn existing_region(sys: &FilippovSystem) -> Result<SlidingRegionInfo> {
    let region = sliding_region(sys)?;
    if !region.exists {
        return Err(Error::NoSlidingRegion);
    }
    Ok(region)
}

/// Sliding vector field and the convex weight `theta = f_L / (f_L - f_R)` of
/// the right field, for `y` in the closed sliding segment.
pub fn sliding_field_eval(sys: &FilippovSystem, y: f64) -> Result<(f64, f64)> {
    let region = existing_region(sys)?;
    if !region.contains(y) {
        return Err(Error::OutsideSlidingRegion(y));
    }
    let fl = sys.left.f(0.0, y, sys.mu);
    let fr = sys.right.f(0.0, y, sys.mu);
    let denom = fl - fr;
    if denom == 0.0 {
        return Err(Error::SlidingDenominator(y));
    }
    Ok((numerator(sys, y) / denom, fl / denom))
}

/// `n(y) / (f_L - f_R)` without the region check; used by the integrator.
pub(crate) fn g_slide_unchecked(sys: &FilippovSystem, y: f64) -> f64 {
    let fl = sys.left.f(0.0, y, sys.mu);
    let fr = sys.right.f(0.0, y, sys.mu);
    numerator(sys, y) / (fl - fr)
}

/// Samples `(y, g_slide, theta)` at `n` evenly spaced interior points of the segment.
pub fn sample_field(sys: &FilippovSystem, n: usize) -> Result<Vec<(f64, f64, f64)>> {
    let region = existing_region(sys)?;
    let (lo, hi) = region.interval();
    (1..=n)
        .map(|k| {
            let y = lo + (hi - lo) * k as f64 / (n + 1) as f64;
            sliding_field_eval(sys, y).map(|(g, th)| (y, g, th))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stability1d {
    Stable,
    Unstable,
    Degenerate,
}

/// Type of a pseudo-equilibrium as an equilibrium of the planar Filippov flow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PseudoKind {
    StableNode,
    UnstableNode,
    Saddle,
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PseudoCase {
    NoneAllMu,
    OnePerMu,
    TwoPerMu,
}

impl PseudoCase {
    pub fn count(self) -> usize {
        match self {
            PseudoCase::NoneAllMu => 0,
            PseudoCase::OnePerMu => 1,
            PseudoCase::TwoPerMu => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PseudoRoot {
    pub y: f64,
    pub admissible: bool,
    /// Within [`BOUNDARY_TOL`] of a fold.
    pub boundary: bool,
    /// Stability along the sliding segment; `None` when not admissible.
    pub stability_1d: Option<Stability1d>,
    pub kind_2d: Option<PseudoKind>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PseudoEquilibriumReport {
    pub mu: f64,
    pub c: f64,
    #[serde(rename = "d_L")]
    pub d_l: f64,
    #[serde(rename = "d_R")]
    pub d_r: f64,
    #[serde(rename = "Q")]
    pub q: f64,
    pub case: PseudoCase,
    pub sliding: SlidingRegionInfo,
    pub numerator: Numerator,
    pub roots: Vec<PseudoRoot>,
    pub admissible_count: usize,
}

/// `(c, d_L, d_R, Q)` and the case they predict.
pub fn case_quantities(sys: &FilippovSystem) -> (f64, f64, f64, f64, PseudoCase) {
    let (l, r) = (&sys.left, &sys.right);
    let c = (l.a2 * r.b2 - r.a2 * l.b2) * gamma(sys);
    let d_l = r.a2 * r.a2 * l.beta();
    let d_r = l.a2 * l.a2 * r.beta();
    let q = c * c - 2.0 * (d_l + d_r) * c + (d_l - d_r) * (d_l - d_r);
    let case = if c <= (d_l - d_r).abs() || q < 0.0 {
        PseudoCase::NoneAllMu
    } else if q == 0.0 {
        PseudoCase::OnePerMu
    } else {
        PseudoCase::TwoPerMu
    };
    (c, d_l, d_r, q, case)
}

pub fn pseudo_equilibria(sys: &FilippovSystem) -> Result<PseudoEquilibriumReport> {
    let sliding = sliding_region(sys)?;
    let (c, d_l, d_r, q, case) = case_quantities(sys);
    let num = Numerator::of(sys);
    let mu = sys.mu;
    let (lo, hi) = sliding.interval();
    let mut roots = Vec::new();
    for y in num.roots(mu)? {
        let admissible = sliding.contains(y);
        let near = |e: f64| (y - e).abs() <= BOUNDARY_TOL * e.abs().max(1.0);
        let boundary = sliding.exists && (near(lo) || near(hi));
        let (mut stability_1d, mut kind_2d) = (None, None);
        if admissible {
            let denom = sys.left.f(0.0, y, mu) - sys.right.f(0.0, y, mu);
            let slope = num.derivative(y, mu) / denom;
            let s = if slope < 0.0 {
                Stability1d::Stable
            } else if slope > 0.0 {
                Stability1d::Unstable
            } else {
                Stability1d::Degenerate
            };
            stability_1d = Some(s);
            kind_2d = Some(match (s, sliding.kind) {
                (Stability1d::Stable, SlidingKind::Attracting) => PseudoKind::StableNode,
                (Stability1d::Unstable, SlidingKind::Repelling) => PseudoKind::UnstableNode,
                (Stability1d::Degenerate, _) | (_, SlidingKind::None) => PseudoKind::Degenerate,
                _ => PseudoKind::Saddle,
            });
        }
        roots.push(PseudoRoot { y, admissible, boundary, stability_1d, kind_2d });
    }
    let admissible_count = roots.iter().filter(|r| r.admissible).count();
    Ok(PseudoEquilibriumReport {
        mu,
        c,
        d_l,
        d_r,
        q,
        case,
        sliding,
        numerator: num,
        roots,
        admissible_count,
    })
}

/// `n` restricted to the sliding segment and rescaled to `z in [-1, 1]`, with
/// `z = -1` at the left fold and `z = 1` at the right fold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TildeQuadratic {
    /// Second derivative in `z`.
    pub c: f64,
    /// Value at `z = -1`.
    #[serde(rename = "d_L")]
    pub d_l: f64,
    /// Value at `z = 1`.
    #[serde(rename = "d_R")]
    pub d_r: f64,
}

impl TildeQuadratic {
    pub fn of(sys: &FilippovSystem) -> Result<Self> {
        if sys.mu == 0.0 {
            return Err(Error::ZeroParameter("no sliding segment to rescale"));
        }
        let g = gamma(sys);
        if g == 0.0 {
            return Err(Error::NoSlidingRegion);
        }
        let (c, d_l, d_r, _, _) = case_quantities(sys);
        let (a2l, a2r, mu) = (sys.left.a2, sys.right.a2, sys.mu);
        let denom = a2l * a2l * a2r * a2r;
        Ok(TildeQuadratic {
            c: c * g * mu * mu / (2.0 * denom),
            d_l: d_l * g * mu * mu / denom,
            d_r: d_r * g * mu * mu / denom,
        })
    }

    pub fn eval(&self, z: f64) -> f64 {
        0.5 * (self.c * z * z - (self.d_l - self.d_r) * z + self.d_l + self.d_r - self.c)
    }

    pub fn z_crit(&self) -> Option<f64> {
        (self.c != 0.0).then(|| (self.d_l - self.d_r) / (2.0 * self.c))
    }

    /// Number of zeros in `[-1, 1]` when both endpoint values are positive:
    /// zero unless the slope is negative at `-1` and positive at `1`, then
    /// decided by the sign of the minimum.
    pub fn root_count_positive_ends(&self) -> Option<usize> {
        if !(self.d_l > 0.0 && self.d_r > 0.0) {
            return None;
        }
        let slope = |z: f64| self.c * z - 0.5 * (self.d_l - self.d_r);
        if !(slope(-1.0) < 0.0 && slope(1.0) > 0.0) {
            return Some(0);
        }
        let m = self.eval(self.z_crit()?);
        Some(if m < 0.0 {
            2
        } else if m == 0.0 {
            1
        } else {
            0
        })
    }
}

/// The affine map from `z` to the ordinate on `x = 0`.
pub fn tilde_to_y(sys: &FilippovSystem, z: f64) -> f64 {
    let (zl, zr) = (sys.fold(crate::model::Side::Left), sys.fold(crate::model::Side::Right));
    0.5 * (zl + zr) - 0.5 * (zl - zr) * z
}

pub fn tilde_h(sys: &FilippovSystem, z: f64) -> Result<f64> {
    Ok(TildeQuadratic::of(sys)?.eval(z))
}

/// Admissible pseudo-equilibrium count from the rescaled quadratic. For
/// `gamma < 0` the system is first reflected in `y`, which negates `h~` and
/// so keeps its zeros.
pub fn tilde_root_count(sys: &FilippovSystem) -> Result<usize> {
    let s = if gamma(sys) < 0.0 { sys.reflected_y() } else { sys.clone() };
    let t = TildeQuadratic::of(&s)?;
    if let Some(n) = t.root_count_positive_ends() {
        return Ok(n);
    }
    // Outside the positive-endpoint regime count the zeros of h~ directly.
    let num = Numerator { a: t.c / 2.0, b: -(t.d_l - t.d_r) / 2.0, c: (t.d_l + t.d_r - t.c) / 2.0 };
    Ok(num.roots(1.0)?.into_iter().filter(|z| (-1.0..=1.0).contains(z)).count())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ex1, ex2, ex3, Side};
    use approx::assert_relative_eq;

    #[test]
    fn field_value_ex1() {
        let sys = ex1(0.05).with_mu(-1.0);
        let (g, th) = sliding_field_eval(&sys, 0.5).unwrap();
        assert_relative_eq!(g, 1.025, max_relative = 1e-15);
        assert_eq!(th, 0.5);
    }

    #[test]
    fn field_at_folds_and_outside() {
        let sys = ex1(0.05).with_mu(-1.0);
        let zr = sys.fold(Side::Right);
        let zl = sys.fold(Side::Left);
        assert_eq!(sliding_field_eval(&sys, zr).unwrap().1, 1.0);
        assert_eq!(sliding_field_eval(&sys, zl).unwrap().1, 0.0);
        assert!(matches!(sliding_field_eval(&sys, 2.0), Err(Error::OutsideSlidingRegion(_))));
        assert!(matches!(sliding_field_eval(&sys.with_mu(0.0), 0.0), Err(Error::NoSlidingRegion)));
    }

    #[test]
    fn theta_strictly_inside() {
        let sys = ex3();
        for (_, _, th) in sample_field(&sys, 50).unwrap() {
            assert!(th > 0.0 && th < 1.0);
        }
    }

    #[test]
    fn numerator_matches_coefficients() {
        for sys in [ex1(0.3), ex2(), ex3()] {
            let n = Numerator::of(&sys);
            for y in [-2.0, -0.3, 0.0, 0.7, 3.0] {
                assert_relative_eq!(n.eval(y, sys.mu), numerator(&sys, y), epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn stable_roots() {
        let n = Numerator { a: 1.0, b: -1e8, c: 1.0 };
        let r = n.roots(1.0).unwrap();
        assert_relative_eq!(r[0], 1e-8, max_relative = 1e-14);
        assert_relative_eq!(r[1], 1e8, max_relative = 1e-14);
        let sym = Numerator { a: 2.0, b: 0.0, c: -8.0 }.roots(1.0).unwrap();
        assert_eq!(sym, vec![-2.0, 2.0]);
        assert!(Numerator { a: 0.0, b: 0.0, c: 0.0 }.roots(1.0).is_err());
    }

    #[test]
    fn ex3_quantities() {
        let r = pseudo_equilibria(&ex3()).unwrap();
        assert_eq!(r.c, 12.0 / 25.0);
        assert!((r.d_l - 0.1).abs() <= 4.0 * f64::EPSILON * 0.1);
        assert!((r.d_r - 0.1).abs() <= 4.0 * f64::EPSILON * 0.1);
        assert!((r.q - 0.0384).abs() < 1e-12);
        assert_eq!(r.case, PseudoCase::TwoPerMu);
        assert_eq!(r.admissible_count, 2);
    }

    #[test]
    fn ex3_pseudo_types() {
        let neg = pseudo_equilibria(&ex3().with_mu(-1.0)).unwrap();
        let kinds: Vec<_> = neg.roots.iter().filter_map(|r| r.kind_2d).collect();
        assert_eq!(kinds.len(), 2);
        assert!(kinds.contains(&PseudoKind::StableNode) && kinds.contains(&PseudoKind::Saddle));
        let pos = pseudo_equilibria(&ex3()).unwrap();
        for r in &pos.roots {
            assert!(r.admissible);
            assert_ne!(r.kind_2d, Some(PseudoKind::StableNode));
            assert!((sliding_field_eval(&ex3(), r.y).unwrap().0).abs() < 1e-14);
        }
    }

    #[test]
    fn ex1_and_ex2_have_none() {
        for lambda in [0.05, 0.5] {
            let r = pseudo_equilibria(&ex1(lambda)).unwrap();
            assert_eq!(r.c, -2.0 * lambda);
            assert_eq!(r.case, PseudoCase::NoneAllMu);
            for mu in [-1.0, 1.0] {
                assert_eq!(pseudo_equilibria(&ex1(lambda).with_mu(mu)).unwrap().admissible_count, 0);
            }
        }
        let r = pseudo_equilibria(&ex2()).unwrap();
        assert_relative_eq!(r.c, 128.0 / 25.0, max_relative = 1e-14);
        assert_relative_eq!(r.d_l, 26.0 / 25.0, max_relative = 1e-14);
        assert_relative_eq!(r.d_r, 400.0 / 9.0 * 2861.0 / 2500.0, max_relative = 1e-14);
        assert_eq!(r.case, PseudoCase::NoneAllMu);
        assert_eq!(r.admissible_count, 0);
    }

    #[test]
    fn tilde_values_ex3() {
        let t = TildeQuadratic::of(&ex3()).unwrap();
        assert_relative_eq!(tilde_h(&ex3(), -1.0).unwrap(), 6.0 / 25.0, max_relative = 1e-14);
        assert_relative_eq!(t.d_l, 6.0 / 25.0, max_relative = 1e-14);
        assert!(t.z_crit().unwrap().abs() < 1e-14);
        assert_eq!(t.root_count_positive_ends(), Some(2));
    }

    #[test]
    fn tilde_matches_numerator() {
        for sys in [ex1(0.05), ex2(), ex3(), ex3().with_mu(-2.5)] {
            let t = TildeQuadratic::of(&sys).unwrap();
            for k in 0..32 {
                let z = -1.0 + 2.0 * k as f64 / 31.0;
                let direct = numerator(&sys, tilde_to_y(&sys, z));
                assert_relative_eq!(t.eval(z), direct, max_relative = 1e-10, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn tilde_counts() {
        assert_eq!(tilde_root_count(&ex1(0.05)).unwrap(), 0);
        assert_eq!(tilde_root_count(&ex2()).unwrap(), 0);
        assert_eq!(tilde_root_count(&ex3()).unwrap(), 2);
        assert_eq!(tilde_root_count(&ex3().reflected_y()).unwrap(), 2);
        assert!(tilde_h(&ex3().with_mu(0.0), 0.0).is_err());
    }

    #[test]
    fn tilde_scales_with_mu_squared() {
        let a = TildeQuadratic::of(&ex3()).unwrap();
        let b = TildeQuadratic::of(&ex3().with_mu(2.0)).unwrap();
        assert_relative_eq!(b.c, 4.0 * a.c, max_relative = 1e-15);
        assert_relative_eq!(b.d_l, 4.0 * a.d_l, max_relative = 1e-15);
        assert_relative_eq!(b.d_r, 4.0 * a.d_r, max_relative = 1e-15);
    }
}
