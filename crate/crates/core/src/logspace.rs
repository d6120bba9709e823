//! Overflow-safe products: sign and log-magnitude tracked separately.

use std::ops::{Div, Mul};

use serde::{Deserialize, Serialize};

/// Largest natural log that still exponentiates to a finite f64.
const LN_MAX: f64 = 709.782_712_893_384;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignedLogValue {
    /// -1, 0 or +1; 0 exactly when the value is zero.
    pub sign: i8,
    pub ln_abs: f64,
}

/// Result of leaving log space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exp {
    Value(f64),
    /// Nonzero in log space, zero in f64.
    Underflow,
    Overflow,
}

impl SignedLogValue {
    pub const ZERO: SignedLogValue = SignedLogValue {
        sign: 0,
        ln_abs: f64::NEG_INFINITY,
    };
    pub const ONE: SignedLogValue = SignedLogValue { sign: 1, ln_abs: 0.0 };

    pub fn from_f64(v: f64) -> Self {
        if v == 0.0 {
            Self::ZERO
        } else {
            SignedLogValue {
                sign: if v > 0.0 { 1 } else { -1 },
                ln_abs: v.abs().ln(),
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    pub fn exp(&self) -> Exp {
        if self.sign == 0 {
            return Exp::Value(0.0);
        }
        if self.ln_abs > LN_MAX {
            return Exp::Overflow;
        }
        let mag = self.ln_abs.exp();
        if mag == 0.0 {
            Exp::Underflow
        } else {
            Exp::Value(f64::from(self.sign) * mag)
        }
    }
}

impl Mul for SignedLogValue {
    type Output = SignedLogValue;

    fn mul(self, rhs: SignedLogValue) -> SignedLogValue {
        if self.is_zero() || rhs.is_zero() {
            return SignedLogValue::ZERO;
        }
        SignedLogValue {
            sign: self.sign * rhs.sign,
            ln_abs: self.ln_abs + rhs.ln_abs,
        }
    }
}

impl Div for SignedLogValue {
    type Output = SignedLogValue;

    /// Division by zero is the caller's bug.
    fn div(self, rhs: SignedLogValue) -> SignedLogValue {
        assert!(!rhs.is_zero(), "division by a zero SignedLogValue");
        if self.is_zero() {
            return SignedLogValue::ZERO;
        }
        SignedLogValue {
            sign: self.sign * rhs.sign,
            ln_abs: self.ln_abs - rhs.ln_abs,
        }
    }
}
