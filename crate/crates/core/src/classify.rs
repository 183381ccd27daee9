//! Equilibria, folds, sliding regions and the hypotheses of the two-foci
//! boundary equilibrium bifurcation theorem.
//!
//! All hypothesis checks are exact comparisons on the computed doubles; no
//! tolerance is applied. Values that sit exactly on a boundary (for instance
//! `gamma = 0` or `alpha = 0`) are listed in [`ClassificationReport::boundary`].

use crate::error::{Error, Result};
use crate::model::{EigenStructure, FilippovSystem, Side};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumInfo {
    pub side: Side,
    pub x_star: f64,
    pub y_star: f64,
    /// Lies strictly on its own side of `x = 0`. Both are `false` at `mu = 0`.
    pub admissible: bool,
    /// Set at `mu = 0`, where both foci sit at the origin on the switching line.
    pub boundary: bool,
    pub beta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlidingKind {
    Attracting,
    Repelling,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlidingRegionInfo {
    pub exists: bool,
    #[serde(rename = "zeta_L")]
    pub zeta_l: f64,
    #[serde(rename = "zeta_R")]
    pub zeta_r: f64,
    pub gamma: f64,
    pub kind: SlidingKind,
}

impl SlidingRegionInfo {
    /// `(lower, upper)` endpoints of the sliding segment.
    pub fn interval(&self) -> (f64, f64) {
        (self.zeta_l.min(self.zeta_r), self.zeta_l.max(self.zeta_r))
    }

    pub fn contains(&self, y: f64) -> bool {
        let (lo, hi) = self.interval();
        self.exists && lo <= y && y <= hi
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hypotheses {
    /// Unstable focus on the left, stable focus on the right.
    pub focus_focus: bool,
    #[serde(rename = "beta_L_pos")]
    pub beta_l_pos: bool,
    #[serde(rename = "beta_R_pos")]
    pub beta_r_pos: bool,
    pub same_rotation: bool,
    pub gamma_sign_ok: bool,
}

impl Hypotheses {
    pub fn all(&self) -> bool {
        self.focus_focus && self.beta_l_pos && self.beta_r_pos && self.same_rotation && self.gamma_sign_ok
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Prediction {
    StableCycleForMuPos,
    UnstableCycleForMuNeg,
    /// All hypotheses hold but `alpha = 0`; no prediction is made.
    DegenerateAlphaZero,
    NotApplicable,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoremVerdict {
    pub hypotheses: Hypotheses,
    pub prediction: Prediction,
    /// `None` when either half-system is not a focus.
    pub alpha: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuityReport {
    pub continuous: bool,
    /// Names of the coefficient pairs that differ between the halves.
    pub mismatches: Vec<String>,
    pub gamma: f64,
}

/// The two half-system equilibria `-A^{-1} (a3, b3) mu`, left first.
pub fn equilibria(sys: &FilippovSystem) -> Result<(EquilibriumInfo, EquilibriumInfo)> {
    Ok((equilibrium(sys, Side::Left)?, equilibrium(sys, Side::Right)?))
}

fn equilibrium(sys: &FilippovSystem, side: Side) -> Result<EquilibriumInfo> {
    let h = sys.half(side);
    let det = h.det();
    if det == 0.0 {
        return Err(Error::SingularJacobian(side));
    }
    let mu = sys.mu;
    // Cramer's rule on A (x, y)^T = -(a3, b3)^T mu.
    let x_star = -(h.a3 * h.b2 - h.a2 * h.b3) * mu / det;
    let y_star = -(h.a1 * h.b3 - h.a3 * h.b1) * mu / det;
    let boundary = mu == 0.0;
    let admissible = !boundary && side.sign() * x_star > 0.0;
    Ok(EquilibriumInfo { side, x_star, y_star, admissible, boundary, beta: h.beta() })
}

/// `gamma = a2L a3R - a3L a2R`.
pub fn gamma(sys: &FilippovSystem) -> f64 {
    sys.left.a2 * sys.right.a3 - sys.left.a3 * sys.right.a2
}

/// Fold ordinates and the attracting/repelling type of the sliding segment
/// between them. Requires both foci to rotate in the same sense.
pub fn sliding_region(sys: &FilippovSystem) -> Result<SlidingRegionInfo> {
    let (a2l, a2r) = (sys.left.a2, sys.right.a2);
    if a2l == 0.0 {
        return Err(Error::FoldUndefined(Side::Left));
    }
    if a2r == 0.0 {
        return Err(Error::FoldUndefined(Side::Right));
    }
    if a2l * a2r < 0.0 {
        return Err(Error::OppositeRotation);
    }
    let gamma = gamma(sys);
    let exists = gamma != 0.0 && sys.mu != 0.0;
    let indicator = a2l * gamma * sys.mu;
    let kind = if !exists {
        SlidingKind::None
    } else if indicator < 0.0 {
        SlidingKind::Attracting
    } else {
        SlidingKind::Repelling
    };
    Ok(SlidingRegionInfo {
        exists,
        zeta_l: sys.fold(Side::Left),
        zeta_r: sys.fold(Side::Right),
        gamma,
        kind,
    })
}

pub fn theorem_verdict(sys: &FilippovSystem) -> TheoremVerdict {
    let eig = sys.eigen_structure().ok();
    let focus_focus = eig.is_some_and(|e| e.lambda_l > 0.0 && e.lambda_r < 0.0);
    let (a2l, a2r) = (sys.left.a2, sys.right.a2);
    let hypotheses = Hypotheses {
        focus_focus,
        beta_l_pos: sys.left.beta() > 0.0,
        beta_r_pos: sys.right.beta() > 0.0,
        same_rotation: a2l * a2r > 0.0,
        gamma_sign_ok: a2l * gamma(sys) >= 0.0,
    };
    let alpha = eig.map(|e| e.alpha);
    let prediction = match alpha {
        Some(a) if hypotheses.all() => {
            if a < 0.0 {
                Prediction::StableCycleForMuPos
            } else if a > 0.0 {
                Prediction::UnstableCycleForMuNeg
            } else {
                Prediction::DegenerateAlphaZero
            }
        }
        _ => Prediction::NotApplicable,
    };
    TheoremVerdict { hypotheses, prediction, alpha }
}

/// Whether the field is continuous across `x = 0`, i.e. `a2, a3, b2, b3` agree.
pub fn continuity_check(sys: &FilippovSystem) -> ContinuityReport {
    let (l, r) = (&sys.left, &sys.right);
    let mismatches: Vec<String> = [("a2", l.a2, r.a2), ("a3", l.a3, r.a3), ("b2", l.b2, r.b2), ("b3", l.b3, r.b3)]
        .into_iter()
        .filter(|(_, a, b)| a != b)
        .map(|(name, _, _)| name.to_string())
        .collect();
    let continuous = mismatches.is_empty();
    let gamma = gamma(sys);
    if continuous {
        debug_assert_eq!(gamma, 0.0);
    }
    ContinuityReport { continuous, mismatches, gamma }
}

/// Everything the `classify` command reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub name: String,
    pub mu: f64,
    pub eigen: Option<EigenStructure>,
    pub equilibria: Option<[EquilibriumInfo; 2]>,
    #[serde(rename = "beta_L")]
    pub beta_l: f64,
    #[serde(rename = "beta_R")]
    pub beta_r: f64,
    pub gamma: f64,
    pub alpha: Option<f64>,
    #[serde(rename = "zeta_L")]
    pub zeta_l: Option<f64>,
    #[serde(rename = "zeta_R")]
    pub zeta_r: Option<f64>,
    pub kind: Option<SlidingKind>,
    pub sliding: Option<SlidingRegionInfo>,
    pub hypotheses: Hypotheses,
    #[serde(rename = "gamma_sign_ok")]
    pub gamma_sign_ok: bool,
    pub prediction: Prediction,
    pub continuity: ContinuityReport,
    /// Quantities sitting exactly on a boundary of a hypothesis.
    pub boundary: Vec<String>,
}

pub fn classify(sys: &FilippovSystem) -> ClassificationReport {
    let verdict = theorem_verdict(sys);
    let eigen = sys.eigen_structure().ok();
    let equilibria = equilibria(sys).ok().map(|(l, r)| [l, r]);
    let sliding = sliding_region(sys).ok();
    let gamma = gamma(sys);
    let mut boundary = Vec::new();
    if sys.mu == 0.0 {
        boundary.push("mu = 0: boundary equilibrium at the origin".to_string());
    }
    if gamma == 0.0 {
        boundary.push("gamma = 0: folds coincide, no sliding region".to_string());
    }
    if verdict.alpha == Some(0.0) {
        boundary.push("alpha = 0: degenerate criticality".to_string());
    }
    for (name, beta) in [("beta_L", sys.left.beta()), ("beta_R", sys.right.beta())] {
        if beta == 0.0 {
            boundary.push(format!("{name} = 0: equilibrium stays on x = 0"));
        }
    }
    ClassificationReport {
        name: sys.name.clone(),
        mu: sys.mu,
        eigen,
        equilibria,
        beta_l: sys.left.beta(),
        beta_r: sys.right.beta(),
        gamma,
        alpha: verdict.alpha,
        zeta_l: sliding.map(|s| s.zeta_l),
        zeta_r: sliding.map(|s| s.zeta_r),
        kind: sliding.map(|s| s.kind),
        sliding,
        hypotheses: verdict.hypotheses,
        gamma_sign_ok: verdict.hypotheses.gamma_sign_ok,
        prediction: verdict.prediction,
        continuity: continuity_check(sys),
        boundary,
    }
}
