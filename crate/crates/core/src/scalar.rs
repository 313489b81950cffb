//! Scalar values carried on the two numeric paths.
//!
//! Every sequence and matrix is tagged with a [`ValueKind`]: integer-valued
//! inputs evaluate on an exact `i64` path (overflow is an error, never a wrap),
//! everything else evaluates in `f64`. Mixed-kind combinations promote to
//! float.

use serde::Serialize;

use crate::error::{Error, Result};

/// Which numeric path a sequence or matrix evaluates on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ValueKind {
    ExactInt,
    Float,
}

impl ValueKind {
    /// Kind of a value combined from two operands.
    pub fn join(self, other: ValueKind) -> ValueKind {
        if self == ValueKind::ExactInt && other == ValueKind::ExactInt {
            ValueKind::ExactInt
        } else {
            ValueKind::Float
        }
    }
}

/// A single value on either numeric path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scalar {
    Int(i64),
    Float(f64),
}

impl Scalar {
    pub fn zero(kind: ValueKind) -> Scalar {
        match kind {
            ValueKind::ExactInt => Scalar::Int(0),
            ValueKind::Float => Scalar::Float(0.0),
        }
    }

    pub fn kind(self) -> ValueKind {
        match self {
            Scalar::Int(_) => ValueKind::ExactInt,
            Scalar::Float(_) => ValueKind::Float,
        }
    }

    pub fn to_f64(self) -> f64 {
        match self {
            Scalar::Int(v) => v as f64,
            Scalar::Float(v) => v,
        }
    }

    /// Integer payload, if this value is on the exact path.
    pub fn as_int(self) -> Option<i64> {
        match self {
            Scalar::Int(v) => Some(v),
            Scalar::Float(_) => None,
        }
    }

    pub fn checked_add(self, rhs: Scalar) -> Result<Scalar> {
        match (self, rhs) {
            (Scalar::Int(a), Scalar::Int(b)) => {
                a.checked_add(b).map(Scalar::Int).ok_or(Error::ValueOverflow)
            }
            (a, b) => Ok(Scalar::Float(a.to_f64() + b.to_f64())),
        }
    }

    pub fn checked_sub(self, rhs: Scalar) -> Result<Scalar> {
        match (self, rhs) {
            (Scalar::Int(a), Scalar::Int(b)) => {
                a.checked_sub(b).map(Scalar::Int).ok_or(Error::ValueOverflow)
            }
            (a, b) => Ok(Scalar::Float(a.to_f64() - b.to_f64())),
        }
    }

    pub fn checked_mul(self, rhs: Scalar) -> Result<Scalar> {
        match (self, rhs) {
            (Scalar::Int(a), Scalar::Int(b)) => {
                a.checked_mul(b).map(Scalar::Int).ok_or(Error::ValueOverflow)
            }
            (a, b) => Ok(Scalar::Float(a.to_f64() * b.to_f64())),
        }
    }

}

impl From<i64> for Scalar {
    fn from(v: i64) -> Scalar {
        Scalar::Int(v)
    }
}

impl From<f64> for Scalar {
    fn from(v: f64) -> Scalar {
        Scalar::Float(v)
    }
}
