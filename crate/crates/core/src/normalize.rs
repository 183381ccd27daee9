//! Reduction of any `mu != 0` to the reference configuration `mu = 1`,
//! `a2L > 0` used by the return-map analysis.
//!
//! Three substitutions are composed, in this order:
//!
//! 1. `mu < 0`: time reversal `(x, y; mu; t) -> (-x, y; -mu; -t)`, which swaps
//!    the half-systems and turns stable objects into unstable ones;
//! 2. `(x, y) -> (x, y) / |mu|`, leaving `mu = 1`;
//! 3. `a2L < 0`: the reflection `y -> -y`.
//!
//! Ordinates on `x = 0` map back as `y = sign * |mu| * q` and are unaffected by
//! the time reversal. Under time reversal the return map is replaced by its
//! inverse, so multipliers map back as `1 / dP`.

use crate::error::{Error, Result};
use crate::model::{FilippovSystem, Side};

#[derive(Debug, Clone, PartialEq)]
pub struct Normalization {
    /// The reference system, with `mu = 1` and `left.a2 > 0`.
    pub system: FilippovSystem,
    pub reversed: bool,
    pub reflected: bool,
    pub scale: f64,
}

impl Normalization {
    pub fn of(sys: &FilippovSystem) -> Result<Self> {
        if sys.mu == 0.0 {
            return Err(Error::ZeroParameter("no scale to normalize"));
        }
        let reversed = sys.mu < 0.0;
        let base = if reversed { sys.time_reversed() } else { sys.clone() };
        let scale = base.mu;
        let base = base.scale_state(scale)?;
        if base.left.a2 == 0.0 {
            return Err(Error::FoldUndefined(if reversed { Side::Right } else { Side::Left }));
        }
        let reflected = base.left.a2 < 0.0;
        let mut system = if reflected { base.reflected_y() } else { base };
        // The scaling divides mu by itself; pin it exactly.
        system.mu = 1.0;
        Ok(Normalization { system, reversed, reflected, scale })
    }

    fn sign(&self) -> f64 {
        if self.reflected {
            -1.0
        } else {
            1.0
        }
    }

    /// Ordinate on `x = 0` in the original coordinates.
    pub fn to_original(&self, q: f64) -> f64 {
        self.sign() * self.scale * q
    }

    pub fn from_original(&self, y: f64) -> f64 {
        self.sign() * y / self.scale
    }

    /// Multiplier of the original forward-time return map.
    pub fn multiplier_to_original(&self, dp_dq: f64) -> f64 {
        if self.reversed {
            1.0 / dp_dq
        } else {
            dp_dq
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::theorem_verdict;
    use crate::model::{ex1, ex2, ex3};

    #[test]
    fn positive_mu_only_rescales() {
        let n = Normalization::of(&ex1(0.05).with_mu(2.0)).unwrap();
        assert!(!n.reversed && !n.reflected);
        assert_eq!(n.system, ex1(0.05));
        assert_eq!(n.to_original(1.5), 3.0);
        assert_eq!(n.from_original(3.0), 1.5);
    }

    #[test]
    fn negative_mu_reverses_time() {
        let n = Normalization::of(&ex1(0.05).with_mu(-1.0)).unwrap();
        assert!(n.reversed);
        let e = n.system.eigen_structure().unwrap();
        // The stable right focus becomes the unstable left one.
        assert_eq!(e.lambda_l, 0.5);
        assert_eq!(e.lambda_r, -0.05);
        assert_eq!(n.multiplier_to_original(0.5), 2.0);
    }

    #[test]
    fn anticlockwise_is_reflected() {
        let n = Normalization::of(&ex3().reflected_y().with_mu(3.0)).unwrap();
        assert!(n.reflected);
        assert!(n.system.left.a2 > 0.0);
        assert_eq!(n.system, ex3());
        assert_eq!(n.to_original(1.0), -3.0);
    }

    #[test]
    fn hypotheses_survive_normalization() {
        for sys in [ex1(0.05), ex2(), ex3()] {
            for mu in [-2.0, 0.5] {
                let n = Normalization::of(&sys.with_mu(mu)).unwrap();
                assert_eq!(theorem_verdict(&n.system).hypotheses, theorem_verdict(&sys).hypotheses);
            }
        }
    }

    #[test]
    fn zero_mu_is_rejected() {
        assert!(Normalization::of(&ex2().with_mu(0.0)).is_err());
    }
}
