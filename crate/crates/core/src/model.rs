//! Planar piecewise-linear Filippov systems split by the switching line `x = 0`.
//!
//! Each half-system is the affine field
//!
//! ```text
//! x' = a1 x + a2 y + a3 mu
//! y' = b1 x + b2 y + b3 mu
//! ```
//!
//! active on `x < 0` (left) or `x > 0` (right). Model files are JSON; every
//! coefficient may be a JSON number or an exact rational string such as
//! `"-377/750"`, which is rounded once to `f64`.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    #[serde(rename = "L")]
    Left,
    #[serde(rename = "R")]
    Right,
}

impl Side {
    /// `-1` for the left half-plane, `+1` for the right one.
    pub fn sign(self) -> f64 {
        match self {
            Side::Left => -1.0,
            Side::Right => 1.0,
        }
    }

    pub fn opposite(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::Left => write!(f, "left"),
            Side::Right => write!(f, "right"),
        }
    }
}

/// Coefficients of one affine half-system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfSystem {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
}

impl HalfSystem {
    pub const fn new(a1: f64, a2: f64, a3: f64, b1: f64, b2: f64, b3: f64) -> Self {
        HalfSystem { a1, a2, a3, b1, b2, b3 }
    }

    pub fn as_array(&self) -> [f64; 6] {
        [self.a1, self.a2, self.a3, self.b1, self.b2, self.b3]
    }

    pub fn trace(&self) -> f64 {
        self.a1 + self.b2
    }

    pub fn det(&self) -> f64 {
        self.a1 * self.b2 - self.a2 * self.b1
    }

    /// `beta = a3 b2 - a2 b3`; its sign fixes on which side of `mu = 0` the
    /// equilibrium lies at `x < 0` versus `x > 0`.
    pub fn beta(&self) -> f64 {
        self.a3 * self.b2 - self.a2 * self.b3
    }

    /// First component of the field.
    pub fn f(&self, x: f64, y: f64, mu: f64) -> f64 {
        self.a1 * x + self.a2 * y + self.a3 * mu
    }

    /// Second component of the field.
    pub fn g(&self, x: f64, y: f64, mu: f64) -> f64 {
        self.b1 * x + self.b2 * y + self.b3 * mu
    }

    /// Ordinate of the fold (tangency with `x = 0`), `-a3 mu / a2`.
    pub fn fold(&self, mu: f64) -> f64 {
        -self.a3 * mu / self.a2
    }

    /// Real and imaginary parts `(lambda, omega)` of the eigenvalue pair, `omega > 0`.
    /// Returns `None` when the eigenvalues are real.
    pub fn focus(&self) -> Option<(f64, f64)> {
        let lambda = 0.5 * (self.a1 + self.b2);
        let half_diff = 0.5 * (self.a1 - self.b2);
        let omega_sq = -self.a2 * self.b1 - half_diff * half_diff;
        if omega_sq > 0.0 && omega_sq.is_finite() {
            Some((lambda, omega_sq.sqrt()))
        } else {
            None
        }
    }

    /// Coefficients seen after the substitution `(x, t, mu) -> (-x, -t, -mu)`.
    pub fn time_reversed(&self) -> HalfSystem {
        HalfSystem::new(-self.a1, self.a2, -self.a3, self.b1, -self.b2, self.b3)
    }

    /// Coefficients seen after the substitution `y -> -y`.
    pub fn reflected_y(&self) -> HalfSystem {
        HalfSystem::new(self.a1, -self.a2, self.a3, -self.b1, self.b2, -self.b3)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilippovSystem {
    pub name: String,
    pub left: HalfSystem,
    pub right: HalfSystem,
    pub mu: f64,
}

/// Sense of rotation shared by the two foci, read off the signs of `a2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rotation {
    Clockwise,
    Anticlockwise,
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenStructure {
    #[serde(rename = "lambda_L")]
    pub lambda_l: f64,
    #[serde(rename = "omega_L")]
    pub omega_l: f64,
    #[serde(rename = "lambda_R")]
    pub lambda_r: f64,
    #[serde(rename = "omega_R")]
    pub omega_r: f64,
    /// `lambda_L/omega_L + lambda_R/omega_R`.
    pub alpha: f64,
    pub rotation: Rotation,
}

impl EigenStructure {
    pub fn lambda(&self, side: Side) -> f64 {
        match side {
            Side::Left => self.lambda_l,
            Side::Right => self.lambda_r,
        }
    }

    pub fn omega(&self, side: Side) -> f64 {
        match side {
            Side::Left => self.omega_l,
            Side::Right => self.omega_r,
        }
    }
}

impl FilippovSystem {
    pub fn new(name: impl Into<String>, left: HalfSystem, right: HalfSystem, mu: f64) -> Result<Self> {
        let sys = FilippovSystem { name: name.into(), left, right, mu };
        sys.validate()?;
        Ok(sys)
    }

    pub fn validate(&self) -> Result<()> {
        const NAMES: [&str; 6] = ["a1", "a2", "a3", "b1", "b2", "b3"];
        for (side, half) in [("left", &self.left), ("right", &self.right)] {
            for (name, v) in NAMES.iter().zip(half.as_array()) {
                if !v.is_finite() {
                    return Err(Error::NonFinite(format!("{side}.{name}")));
                }
            }
        }
        if !self.mu.is_finite() {
            return Err(Error::NonFinite("mu".into()));
        }
        Ok(())
    }

    pub fn half(&self, side: Side) -> &HalfSystem {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    pub fn with_mu(&self, mu: f64) -> FilippovSystem {
        FilippovSystem { mu, ..self.clone() }
    }

    /// Ordinate of the fold of the given half-system at the current `mu`.
    pub fn fold(&self, side: Side) -> f64 {
        self.half(side).fold(self.mu)
    }

    /// The same dynamics seen through `(x, y) -> (x, y) / factor`, which only
    /// replaces `mu` by `mu / factor`.
    pub fn scale_state(&self, factor: f64) -> Result<FilippovSystem> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(Error::InvalidScale(factor));
        }
        Ok(self.with_mu(self.mu / factor))
    }

    /// The system obtained by `(x, y; mu; t) -> (-x, y; -mu; -t)`; the two
    /// half-systems trade places.
    pub fn time_reversed(&self) -> FilippovSystem {
        FilippovSystem {
            name: self.name.clone(),
            left: self.right.time_reversed(),
            right: self.left.time_reversed(),
            mu: -self.mu,
        }
    }

    /// The system obtained by `y -> -y`, which reverses the sense of rotation.
    pub fn reflected_y(&self) -> FilippovSystem {
        FilippovSystem {
            name: self.name.clone(),
            left: self.left.reflected_y(),
            right: self.right.reflected_y(),
            mu: self.mu,
        }
    }

    pub fn eigen_structure(&self) -> Result<EigenStructure> {
        let (lambda_l, omega_l) = self.left.focus().ok_or(Error::RealEigenvalues(Side::Left))?;
        let (lambda_r, omega_r) = self.right.focus().ok_or(Error::RealEigenvalues(Side::Right))?;
        let rotation = if self.left.a2 > 0.0 && self.right.a2 > 0.0 {
            Rotation::Clockwise
        } else if self.left.a2 < 0.0 && self.right.a2 < 0.0 {
            Rotation::Anticlockwise
        } else {
            Rotation::Mixed
        };
        Ok(EigenStructure {
            lambda_l,
            omega_l,
            lambda_r,
            omega_r,
            alpha: lambda_l / omega_l + lambda_r / omega_r,
            rotation,
        })
    }

    /// Serializes to the model-file format. Coefficients are written as JSON
    /// numbers in shortest round-trip form.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serialization is infallible")
    }
}

/// Parses a model file.
pub fn parse_model(text: &str) -> Result<FilippovSystem> {
    let root: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let obj = root
        .as_object()
        .ok_or_else(|| Error::Parse("top level must be a JSON object".into()))?;
    let name = match obj.get("name") {
        Some(Value::String(s)) => s.clone(),
        Some(_) => return Err(Error::Parse("`name` must be a string".into())),
        None => String::from("model"),
    };
    let left = parse_half(obj.get("left"), "left")?;
    let right = parse_half(obj.get("right"), "right")?;
    let mu = match obj.get("mu") {
        Some(v) => parse_value(v, "mu")?,
        None => return Err(Error::MissingCoefficient("mu".into())),
    };
    FilippovSystem::new(name, left, right, mu)
}

fn parse_half(value: Option<&Value>, side: &str) -> Result<HalfSystem> {
    let obj = value
        .ok_or_else(|| Error::MissingCoefficient(side.to_string()))?
        .as_object()
        .ok_or_else(|| Error::Parse(format!("`{side}` must be an object")))?;
    let get = |name: &str| -> Result<f64> {
        let path = format!("{side}.{name}");
        match obj.get(name) {
            Some(v) => parse_value(v, &path),
            None => Err(Error::MissingCoefficient(path)),
        }
    };
    Ok(HalfSystem::new(get("a1")?, get("a2")?, get("a3")?, get("b1")?, get("b2")?, get("b3")?))
}

fn parse_value(v: &Value, path: &str) -> Result<f64> {
    let x = match v {
        Value::Number(n) => n
            .as_f64()
            .ok_or_else(|| Error::Parse(format!("`{path}`: unrepresentable number")))?,
        Value::String(s) => parse_real(s).map_err(|e| match e {
            Error::Parse(msg) => Error::Parse(format!("`{path}`: {msg}")),
            other => other,
        })?,
        _ => return Err(Error::Parse(format!("`{path}` must be a number or a rational string"))),
    };
    if !x.is_finite() {
        return Err(Error::NonFinite(path.to_string()));
    }
    Ok(x)
}

/// Parses `"p/q"`, `"p"` or a decimal such as `"-0.05"` or `"1.5e-3"` exactly
/// and rounds the resulting rational to the nearest `f64` once.
pub fn parse_real(text: &str) -> Result<f64> {
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((p, q)) => (parse_decimal(p.trim())?, parse_decimal(q.trim())?),
        None => (parse_decimal(text)?, BigRational::from_integer(1.into())),
    };
    if den.is_zero() {
        return Err(Error::Parse(format!("zero denominator in `{text}`")));
    }
    let value = (num / den)
        .to_f64()
        .ok_or_else(|| Error::Parse(format!("`{text}` is out of range")))?;
    if !value.is_finite() {
        return Err(Error::Parse(format!("`{text}` is out of range")));
    }
    Ok(value)
}

fn parse_decimal(text: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("invalid number `{text}`"));
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(i) => {
            let exp: i32 = text[i + 1..].parse().map_err(|_| bad())?;
            (&text[..i], exp)
        }
        None => (text, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    if exponent.unsigned_abs() > 400 {
        return Err(bad());
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut numer: BigInt = all_digits.parse().map_err(|_| bad())?;
    if negative {
        numer = -numer;
    }
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10u32);
    let r = if scale >= 0 {
        BigRational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    Ok(r)
}

fn rational_half(c: [&str; 6]) -> HalfSystem {
    let v = c.map(|s| parse_real(s).expect("builtin coefficients are valid rationals"));
    HalfSystem::new(v[0], v[1], v[2], v[3], v[4], v[5])
}

/// Default `lambda_L` for the first example.
pub const EX1_DEFAULT_LAMBDA_L: f64 = 0.05;

/// Minimal example: unstable focus `x' = y, y' = -x + 2 lambda_L y - mu` on the
/// left and a stable focus on the right.
pub fn ex1(lambda_l: f64) -> FilippovSystem {
    FilippovSystem {
        name: "ex1".into(),
        left: HalfSystem::new(0.0, 1.0, 0.0, -1.0, 2.0 * lambda_l, -1.0),
        right: rational_half(["-1", "1", "1", "-1", "0", "-1"]),
        mu: 1.0,
    }
}

/// Three nested limit cycles: violates only the sliding-sign hypothesis.
pub fn ex2() -> FilippovSystem {
    FilippovSystem {
        name: "ex2".into(),
        left: rational_half(["-4/3", "20/3", "-4/3", "-377/750", "26/15", "-377/750"]),
        right: rational_half(["-19/50", "1", "-19/50", "-1", "-19/50", "-1"]),
        mu: 1.0,
    }
}

/// Unique limit cycle together with two admissible pseudo-equilibria.
pub fn ex3() -> FilippovSystem {
    FilippovSystem {
        name: "ex3".into(),
        left: rational_half(["3/5", "1", "-7/5", "-1", "-1/2", "3/5"]),
        right: rational_half(["-1", "1", "1", "-1", "-3/10", "-2/5"]),
        mu: 1.0,
    }
}

/// Looks up a built-in example by name. `lambda_l` only applies to `ex1`.
pub fn builtin(name: &str, lambda_l: Option<f64>) -> Result<FilippovSystem> {
    match name {
        "ex1" => {
            let lambda = lambda_l.unwrap_or(EX1_DEFAULT_LAMBDA_L);
            if !lambda.is_finite() {
                return Err(Error::NonFinite("lambda_L".into()));
            }
            Ok(ex1(lambda))
        }
        "ex2" => Ok(ex2()),
        "ex3" => Ok(ex3()),
        other => Err(Error::UnknownBuiltin(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn rational_strings_round_once() {
        assert_eq!(parse_real("377/750").unwrap(), 377.0 / 750.0);
        assert_eq!(parse_real("-7/5").unwrap(), -1.4);
        assert_eq!(parse_real("0.1").unwrap(), 0.1);
        assert_eq!(parse_real("1/10").unwrap(), 0.1);
        assert_eq!(parse_real("2861/2500").unwrap(), 1.1444);
        assert_eq!(parse_real("1.5e-3").unwrap(), 1.5e-3);
        assert_eq!(parse_real("-2").unwrap(), -2.0);
        // 1/3 is not representable; the nearest double is what division gives.
        assert_eq!(parse_real("1/3").unwrap(), 1.0 / 3.0);
    }

    #[test]
    fn rational_strings_reject_garbage() {
        assert!(parse_real("1/0").is_err());
        assert!(parse_real("abc").is_err());
        assert!(parse_real("1//2").is_err());
        assert!(parse_real("").is_err());
        assert!(parse_real("1e999").is_err());
    }

    #[test]
    fn builtin_coefficients() {
        let e1 = ex1(0.05);
        assert_eq!(e1.left.as_array(), [0.0, 1.0, 0.0, -1.0, 0.1, -1.0]);
        assert_eq!(e1.right.as_array(), [-1.0, 1.0, 1.0, -1.0, 0.0, -1.0]);
        let e3 = ex3();
        assert_eq!(e3.left.as_array(), [0.6, 1.0, -1.4, -1.0, -0.5, 0.6]);
        assert_eq!(e3.right.as_array(), [-1.0, 1.0, 1.0, -1.0, -0.3, -0.4]);
        let e2 = ex2();
        assert_eq!(
            e2.left.as_array(),
            [-4.0 / 3.0, 20.0 / 3.0, -4.0 / 3.0, -377.0 / 750.0, 26.0 / 15.0, -377.0 / 750.0]
        );
        assert_eq!(e2.right.as_array(), [-0.38, 1.0, -0.38, -1.0, -0.38, -1.0]);
        assert!(builtin("ex4", None).is_err());
    }

    #[test]
    fn eigen_structure_of_ex2() {
        let e = ex2().eigen_structure().unwrap();
        assert_relative_eq!(e.lambda_l, 0.2, max_relative = 1e-14);
        assert_relative_eq!(e.omega_l, 1.0, max_relative = 1e-14);
        assert_eq!(e.lambda_r, -0.38);
        assert_eq!(e.omega_r, 1.0);
        assert_relative_eq!(e.alpha, -9.0 / 50.0, max_relative = 1e-14);
        assert_eq!(e.rotation, Rotation::Clockwise);
    }

    #[test]
    fn eigen_structure_of_ex3() {
        let e = ex3().eigen_structure().unwrap();
        assert!((e.alpha + 0.634).abs() < 0.01, "alpha = {}", e.alpha);
    }

    #[test]
    fn alpha_cancels_for_mirrored_ratios() {
        // lambda_L/omega_L = 0.3 on the left, -0.3 on the right.
        let left = HalfSystem::new(0.3, 1.0, 0.0, -1.09, 0.3, -1.0);
        let right = HalfSystem::new(-0.3, 1.0, 1.0, -1.09, -0.3, -1.0);
        let e = FilippovSystem::new("sym", left, right, 1.0).unwrap().eigen_structure().unwrap();
        assert_eq!(e.alpha, 0.0);
    }

    #[test]
    fn real_eigenvalues_are_reported_per_side() {
        let mut sys = ex1(0.05);
        sys.right = HalfSystem::new(-3.0, 1.0, 1.0, 1.0, 0.0, -1.0);
        assert_eq!(sys.eigen_structure(), Err(Error::RealEigenvalues(Side::Right)));
        let mut sys = ex1(0.05);
        sys.left.b2 = 3.0;
        assert_eq!(sys.eigen_structure(), Err(Error::RealEigenvalues(Side::Left)));
    }

    #[test]
    fn rotation_sense() {
        let sys = ex1(0.05);
        assert_eq!(sys.eigen_structure().unwrap().rotation, Rotation::Clockwise);
        assert_eq!(
            sys.reflected_y().eigen_structure().unwrap().rotation,
            Rotation::Anticlockwise
        );
        let mut mixed = sys.clone();
        mixed.right = mixed.right.reflected_y();
        assert_eq!(mixed.eigen_structure().unwrap().rotation, Rotation::Mixed);
    }

    #[test]
    fn scale_state_divides_mu() {
        let sys = ex1(0.05).with_mu(3.0);
        assert_eq!(sys.scale_state(3.0).unwrap().mu, 1.0);
        assert_eq!(ex2().with_mu(0.0).scale_state(7.0).unwrap().mu, 0.0);
        assert_eq!(sys.scale_state(0.0), Err(Error::InvalidScale(0.0)));
        assert!(sys.scale_state(-1.0).is_err());
    }

    #[test]
    fn model_file_parses_numbers_and_rationals() {
        let text = r#"{
            "name": "ex2-file",
            "left":  {"a1": "-4/3", "a2": "20/3", "a3": "-4/3", "b1": "-377/750", "b2": "26/15", "b3": "-377/750"},
            "right": {"a1": -0.38, "a2": 1, "a3": "-19/50", "b1": -1, "b2": "-0.38", "b3": -1},
            "mu": 1
        }"#;
        let sys = parse_model(text).unwrap();
        assert_eq!(sys.left, ex2().left);
        assert_eq!(sys.right, ex2().right);
        assert_eq!(sys.name, "ex2-file");
    }

    #[test]
    fn model_file_errors() {
        let missing = r#"{"left": {"a1": 0, "a2": 1, "a3": 0, "b1": -1, "b2": 0.1},
                          "right": {"a1": -1, "a2": 1, "a3": 1, "b1": -1, "b2": 0, "b3": -1}, "mu": 1}"#;
        assert_eq!(parse_model(missing), Err(Error::MissingCoefficient("left.b3".into())));
        let no_mu = r#"{"left": {"a1": 0, "a2": 1, "a3": 0, "b1": -1, "b2": 0.1, "b3": -1},
                        "right": {"a1": -1, "a2": 1, "a3": 1, "b1": -1, "b2": 0, "b3": -1}}"#;
        assert_eq!(parse_model(no_mu), Err(Error::MissingCoefficient("mu".into())));
        assert!(matches!(parse_model("{not json"), Err(Error::Parse(_))));
        let bad = r#"{"left": {"a1": "x/2", "a2": 1, "a3": 0, "b1": -1, "b2": 0.1, "b3": -1},
                      "right": {"a1": -1, "a2": 1, "a3": 1, "b1": -1, "b2": 0, "b3": -1}, "mu": 1}"#;
        assert!(matches!(parse_model(bad), Err(Error::Parse(_))));
        let huge = r#"{"left": {"a1": "1e400", "a2": 1, "a3": 0, "b1": -1, "b2": 0.1, "b3": -1},
                       "right": {"a1": -1, "a2": 1, "a3": 1, "b1": -1, "b2": 0, "b3": -1}, "mu": 1}"#;
        assert!(parse_model(huge).is_err());
    }

    #[test]
    fn serialization_round_trips_builtins() {
        for sys in [ex1(0.05), ex2(), ex3(), ex1(0.9).with_mu(-2.5)] {
            let back = parse_model(&sys.to_json()).unwrap();
            assert_eq!(back, sys);
        }
    }

    #[test]
    fn transforms_are_involutions() {
        let sys = ex3().with_mu(0.7);
        assert_eq!(sys.time_reversed().time_reversed(), sys);
        assert_eq!(sys.reflected_y().reflected_y(), sys);
    }
}
