//! Serialization helpers shared by the JSON reports.

use num::BigRational;
use serde::Serializer;

/// Serializes a rational as `"a"` or `"a/b"` in lowest terms.
pub fn ser_rational<S: Serializer>(x: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

/// Serializes a list of rationals as strings.
pub fn ser_rationals<S: Serializer>(xs: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(xs.iter().map(|x| x.to_string()))
}
