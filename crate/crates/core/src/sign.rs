use std::fmt;
use std::ops::Neg;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Binary class label, serialized as the integers `-1` and `1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Negative,
    Positive,
}

impl Sign {
    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Negative => -1,
            Sign::Positive => 1,
        }
    }

    pub fn from_i64(v: i64) -> Option<Sign> {
        match v {
            -1 => Some(Sign::Negative),
            1 => Some(Sign::Positive),
            _ => None,
        }
    }

    /// Sign of a real score; zero resolves to [`Sign::Negative`].
    pub fn of<T: num_traits::Float>(score: T) -> Sign {
        if score > T::zero() {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }

    pub fn to_scalar<T: num_traits::Float>(self) -> T {
        match self {
            Sign::Negative => -T::one(),
            Sign::Positive => T::one(),
        }
    }

    /// Parses `+1`, `1` or `-1`.
    pub fn parse(s: &str) -> Option<Sign> {
        match s.trim() {
            "+1" | "1" => Some(Sign::Positive),
            "-1" => Some(Sign::Negative),
            _ => None,
        }
    }
}

impl Neg for Sign {
    type Output = Sign;

    fn neg(self) -> Sign {
        match self {
            Sign::Negative => Sign::Positive,
            Sign::Positive => Sign::Negative,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sign::Negative => f.write_str("-1"),
            Sign::Positive => f.write_str("+1"),
        }
    }
}

impl Serialize for Sign {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_i8(self.as_i8())
    }
}

impl<'de> Deserialize<'de> for Sign {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = i64::deserialize(d)?;
        Sign::from_i64(v)
            .ok_or_else(|| serde::de::Error::custom(format!("sign must be -1 or 1, got {v}")))
    }
}
