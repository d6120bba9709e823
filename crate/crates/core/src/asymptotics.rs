//! Leading-order growth classes for positive sequences.
//!
//! A class stands for sequences behaving like
//! `exp(geometric * n + stretched * n^stretched_exponent) * n^power`
//! up to a bounded, eventually-positive factor. Products and reciprocals of
//! such sequences stay in the family as long as at most one stretched
//! exponent is involved, which covers every closed-form weight and
//! coefficient kind in this crate.

use serde::{Deserialize, Serialize};

const ZERO_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Growth {
    pub geometric: f64,
    pub stretched: f64,
    pub stretched_exponent: f64,
    pub power: f64,
}

/// Limit of a sequence in a growth class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Limit {
    Zero,
    /// Bounded away from both 0 and infinity.
    Finite,
    Infinite,
}

fn is_zero(x: f64) -> bool {
    x.abs() < ZERO_TOL
}

impl Growth {
    pub const fn bounded() -> Self {
        Growth {
            geometric: 0.0,
            stretched: 0.0,
            stretched_exponent: 0.0,
            power: 0.0,
        }
    }

    pub fn power(power: f64) -> Self {
        Growth {
            power,
            ..Self::bounded()
        }
    }

    pub fn geometric(log_rate: f64) -> Self {
        Growth {
            geometric: log_rate,
            ..Self::bounded()
        }
    }

    pub fn stretched(coefficient: f64, exponent: f64) -> Self {
        Growth {
            stretched: coefficient,
            stretched_exponent: exponent,
            ..Self::bounded()
        }
    }

    /// Product class; `None` when two different stretched exponents meet.
    pub fn mul(self, other: Growth) -> Option<Growth> {
        let (stretched, stretched_exponent) = match (is_zero(self.stretched), is_zero(other.stretched)) {
            (true, true) => (0.0, 0.0),
            (false, true) => (self.stretched, self.stretched_exponent),
            (true, false) => (other.stretched, other.stretched_exponent),
            (false, false) => {
                if !is_zero(self.stretched_exponent - other.stretched_exponent) {
                    return None;
                }
                (self.stretched + other.stretched, self.stretched_exponent)
            }
        };
        Some(Growth {
            geometric: self.geometric + other.geometric,
            stretched,
            stretched_exponent,
            power: self.power + other.power,
        })
    }

    pub fn recip(self) -> Growth {
        Growth {
            geometric: -self.geometric,
            stretched: -self.stretched,
            stretched_exponent: self.stretched_exponent,
            power: -self.power,
        }
    }

    pub fn times_power(self, e: f64) -> Growth {
        Growth {
            power: self.power + e,
            ..self
        }
    }

    /// Sign of the dominant term of `ln a_n` as n grows.
    fn dominant_sign(&self) -> i8 {
        for term in [self.geometric, self.stretched, self.power] {
            if !is_zero(term) {
                return if term > 0.0 { 1 } else { -1 };
            }
        }
        0
    }

    pub fn limit(&self) -> Limit {
        match self.dominant_sign() {
            -1 => Limit::Zero,
            0 => Limit::Finite,
            _ => Limit::Infinite,
        }
    }

    /// Whether `sum a_n` converges (p-series and root-test comparison).
    pub fn series_converges(&self) -> bool {
        if !is_zero(self.geometric) {
            return self.geometric < 0.0;
        }
        if !is_zero(self.stretched) {
            return self.stretched < 0.0;
        }
        self.power < -1.0 - ZERO_TOL
    }
}
