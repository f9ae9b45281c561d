//! Exact arithmetic in `Q(ζ_M) = Q[z]/Φ_M(z)`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

/// The cyclotomic field of conductor `M`.
#[derive(Debug, PartialEq, Eq)]
pub struct CyclotomicField {
    m: u32,
    /// Monic `Φ_M`, lowest degree first.
    phi: Vec<i64>,
}

fn divisors(m: u32) -> Vec<u32> {
    (1..=m).filter(|d| m.is_multiple_of(*d)).collect()
}

/// `Φ_M` by recursive division of `z^M - 1` by `Φ_d`, `d | M`, `d < M`.
pub fn cyclotomic_poly(m: u32) -> Vec<i64> {
    let mut num = vec![0i64; m as usize + 1];
    num[0] = -1;
    num[m as usize] = 1;
    for d in divisors(m) {
        if d < m {
            num = exact_div_monic(&num, &cyclotomic_poly(d));
        }
    }
    num
}

fn exact_div_monic(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let mut quot = vec![0i64; num.len() - dd];
    for k in (dd..rem.len()).rev() {
        let c = rem[k];
        quot[k - dd] = c;
        for (i, &x) in den.iter().enumerate() {
            rem[k - dd + i] -= c * x;
        }
    }
    debug_assert!(rem.iter().all(|&c| c == 0), "division must be exact");
    quot
}

impl CyclotomicField {
    pub fn new(m: u32) -> Arc<Self> {
        assert!(m >= 1, "conductor must be positive");
        Arc::new(CyclotomicField { m, phi: cyclotomic_poly(m) })
    }

    pub fn conductor(&self) -> u32 {
        self.m
    }

    pub fn degree(&self) -> usize {
        self.phi.len() - 1
    }

    fn reduce(&self, mut coeffs: Vec<BigRational>) -> Vec<BigRational> {
        let d = self.degree();
        for k in (d..coeffs.len()).rev() {
            let c = std::mem::replace(&mut coeffs[k], BigRational::zero());
            if c.is_zero() {
                continue;
            }
            for i in 0..d {
                coeffs[k - d + i] -= &c * BigRational::from_integer(BigInt::from(self.phi[i]));
            }
        }
        coeffs.resize(d, BigRational::zero());
        coeffs
    }
}

/// An element of a cyclotomic field.
#[derive(Clone, Debug)]
pub struct CyclotomicValue {
    field: Arc<CyclotomicField>,
    coeffs: Vec<BigRational>,
}

impl PartialEq for CyclotomicValue {
    fn eq(&self, other: &Self) -> bool {
        self.field.m == other.field.m && self.coeffs == other.coeffs
    }
}

impl Eq for CyclotomicValue {}

impl CyclotomicValue {
    pub fn zero(field: &Arc<CyclotomicField>) -> Self {
        CyclotomicValue { field: Arc::clone(field), coeffs: vec![BigRational::zero(); field.degree()] }
    }

    pub fn from_rational(field: &Arc<CyclotomicField>, v: BigRational) -> Self {
        let mut out = Self::zero(field);
        out.coeffs[0] = v;
        out
    }

    pub fn from_int(field: &Arc<CyclotomicField>, v: i64) -> Self {
        Self::from_rational(field, BigRational::from_integer(BigInt::from(v)))
    }

    /// `ζ_M^k`.
    pub fn zeta_pow(field: &Arc<CyclotomicField>, k: i64) -> Self {
        let k = k.rem_euclid(i64::from(field.m)) as usize;
        let mut v = vec![BigRational::zero(); k + 1];
        v[k] = BigRational::one();
        CyclotomicValue { field: Arc::clone(field), coeffs: field.reduce(v) }
    }

    /// `Σ_k counts[k] ζ_M^k`.
    pub fn from_exponent_counts(field: &Arc<CyclotomicField>, counts: &[i64]) -> Self {
        let mut v = vec![BigRational::zero(); counts.len().max(1)];
        for (k, &c) in counts.iter().enumerate() {
            v[k % field.m as usize] += BigRational::from_integer(BigInt::from(c));
        }
        CyclotomicValue { field: Arc::clone(field), coeffs: field.reduce(v) }
    }

    pub fn field(&self) -> &Arc<CyclotomicField> {
        &self.field
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        self.coeffs[1..].iter().all(|c| c.is_zero()).then(|| self.coeffs[0].clone())
    }

    pub fn as_integer(&self) -> Option<i64> {
        self.as_rational().filter(|r| r.is_integer()).and_then(|r| r.to_integer().to_i64())
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        CyclotomicValue { field: Arc::clone(&self.field), coeffs: self.coeffs.iter().map(|x| x * c).collect() }
    }

    /// Complex conjugation `ζ ↦ ζ^{-1}`.
    pub fn conj(&self) -> Self {
        let m = self.field.m as usize;
        let mut v = vec![BigRational::zero(); m];
        for (k, c) in self.coeffs.iter().enumerate() {
            v[(m - k) % m] += c;
        }
        CyclotomicValue { field: Arc::clone(&self.field), coeffs: self.field.reduce(v) }
    }
}

impl Add<&CyclotomicValue> for &CyclotomicValue {
    type Output = CyclotomicValue;
    fn add(self, o: &CyclotomicValue) -> CyclotomicValue {
        debug_assert_eq!(self.field.m, o.field.m);
        let coeffs = self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a + b).collect();
        CyclotomicValue { field: Arc::clone(&self.field), coeffs }
    }
}

impl Sub<&CyclotomicValue> for &CyclotomicValue {
    type Output = CyclotomicValue;
    fn sub(self, o: &CyclotomicValue) -> CyclotomicValue {
        debug_assert_eq!(self.field.m, o.field.m);
        let coeffs = self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a - b).collect();
        CyclotomicValue { field: Arc::clone(&self.field), coeffs }
    }
}

impl Neg for &CyclotomicValue {
    type Output = CyclotomicValue;
    fn neg(self) -> CyclotomicValue {
        CyclotomicValue { field: Arc::clone(&self.field), coeffs: self.coeffs.iter().map(|a| -a).collect() }
    }
}

impl Mul<&CyclotomicValue> for &CyclotomicValue {
    type Output = CyclotomicValue;
    fn mul(self, o: &CyclotomicValue) -> CyclotomicValue {
        debug_assert_eq!(self.field.m, o.field.m);
        let d = self.coeffs.len();
        let mut v = vec![BigRational::zero(); (2 * d).saturating_sub(1).max(1)];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        CyclotomicValue { field: Arc::clone(&self.field), coeffs: self.field.reduce(v) }
    }
}

impl fmt::Display for CyclotomicValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if c.is_negative() { "-" } else { "+" })?;
            }
            first = false;
            match k {
                0 => write!(f, "{mag}")?,
                _ => {
                    if !mag.is_one() {
                        write!(f, "{mag}*")?;
                    }
                    if k == 1 {
                        write!(f, "z{}", self.field.m)?;
                    } else {
                        write!(f, "z{}^{k}", self.field.m)?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl Serialize for CyclotomicValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cyclotomic_polynomials() {
        assert_eq!(cyclotomic_poly(1), vec![-1, 1]);
        assert_eq!(cyclotomic_poly(2), vec![1, 1]);
        assert_eq!(cyclotomic_poly(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_poly(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic_poly(12), vec![1, 0, -1, 0, 1]);
    }

    #[test]
    fn roots_of_unity_sum_to_zero() {
        for m in [2u32, 3, 4, 6, 9, 12] {
            let k = CyclotomicField::new(m);
            let mut s = CyclotomicValue::zero(&k);
            for j in 0..m {
                s = &s + &CyclotomicValue::zeta_pow(&k, j as i64);
            }
            assert!(s.is_zero(), "m={m}");
            let z = CyclotomicValue::zeta_pow(&k, 1);
            assert_eq!(&z * &z.conj(), CyclotomicValue::from_int(&k, 1));
            let mut p = CyclotomicValue::from_int(&k, 1);
            for _ in 0..m {
                p = &p * &z;
            }
            assert_eq!(p, CyclotomicValue::from_int(&k, 1));
        }
    }

    #[test]
    fn display() {
        let k = CyclotomicField::new(3);
        let v = &CyclotomicValue::from_int(&k, 2) - &CyclotomicValue::zeta_pow(&k, 1);
        assert_eq!(v.to_string(), "2 - z3");
        assert_eq!(CyclotomicValue::zeta_pow(&k, 2).to_string(), "-1 - z3");
    }
}
