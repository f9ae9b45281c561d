use std::fmt;

use serde::{Serialize, Serializer};

/// A non-negative integer or `∞`, ordered with `∞` on top.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtendedNat {
    Finite(u32),
    Infinity,
}

impl ExtendedNat {
    pub fn is_infinite(self) -> bool {
        matches!(self, ExtendedNat::Infinity)
    }

    pub fn finite(self) -> Option<u32> {
        match self {
            ExtendedNat::Finite(v) => Some(v),
            ExtendedNat::Infinity => None,
        }
    }

    /// `self >= bound` for a possibly negative integer bound.
    pub fn at_least(self, bound: i64) -> bool {
        match self {
            ExtendedNat::Finite(v) => i64::from(v) >= bound,
            ExtendedNat::Infinity => true,
        }
    }
}

impl From<u32> for ExtendedNat {
    fn from(v: u32) -> Self {
        ExtendedNat::Finite(v)
    }
}

impl fmt::Display for ExtendedNat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedNat::Finite(v) => write!(f, "{v}"),
            ExtendedNat::Infinity => write!(f, "inf"),
        }
    }
}

impl Serialize for ExtendedNat {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtendedNat::Finite(v) => s.serialize_u32(*v),
            ExtendedNat::Infinity => s.serialize_str("inf"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::ExtendedNat::*;

    #[test]
    fn infinity_is_maximal() {
        assert!(Finite(u32::MAX) < Infinity);
        assert!(Finite(2) < Finite(3));
        assert!(Infinity.at_least(1_000));
        assert!(!Finite(1).at_least(2));
        assert!(Finite(0).at_least(-1));
    }
}
