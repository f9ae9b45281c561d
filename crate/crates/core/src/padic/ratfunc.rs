use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::{BigInt, BigRational, One, Signed, Zero};

use crate::error::{domain, Result};

/// `numerator(t) / (q - t²)^den_exp` with rational coefficients.
#[derive(Clone, Debug)]
pub struct RationalFunctionT {
    q: i64,
    numerator: Vec<BigRational>,
    den_exp: u32,
}

fn rat(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

fn trim(mut v: Vec<BigRational>) -> Vec<BigRational> {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
    v
}

fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

fn poly_add(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] += y;
    }
    trim(out)
}

impl RationalFunctionT {
    fn base(q: i64) -> Vec<BigRational> {
        vec![rat(q), BigRational::zero(), rat(-1)]
    }

    fn base_pow(q: i64, k: u32) -> Vec<BigRational> {
        let mut acc = vec![BigRational::one()];
        for _ in 0..k {
            acc = poly_mul(&acc, &Self::base(q));
        }
        acc
    }

    pub fn new(q: i64, numerator: Vec<BigRational>, den_exp: u32) -> Self {
        let mut f = RationalFunctionT { q, numerator: trim(numerator), den_exp };
        f.canonicalize();
        f
    }

    pub fn zero(q: i64) -> Self {
        Self::new(q, Vec::new(), 0)
    }

    pub fn constant(q: i64, c: BigRational) -> Self {
        Self::new(q, vec![c], 0)
    }

    pub fn from_int(q: i64, c: i64) -> Self {
        Self::constant(q, rat(c))
    }

    /// `t^k`.
    pub fn t_pow(q: i64, k: u32) -> Self {
        let mut v = vec![BigRational::zero(); k as usize];
        v.push(BigRational::one());
        Self::new(q, v, 0)
    }

    /// `1 / (q - t²)^k`.
    pub fn inv_base_pow(q: i64, k: u32) -> Self {
        Self::new(q, vec![BigRational::one()], k)
    }

    pub fn q(&self) -> i64 {
        self.q
    }

    /// Coefficients of the numerator, lowest degree first.
    pub fn numerator(&self) -> &[BigRational] {
        &self.numerator
    }

    pub fn den_exp(&self) -> u32 {
        self.den_exp
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_empty()
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self::new(self.q, self.numerator.iter().map(|x| x * c).collect(), self.den_exp)
    }

    /// Removes common factors `(q - t²)` from numerator and denominator.
    fn canonicalize(&mut self) {
        if self.numerator.is_empty() {
            self.den_exp = 0;
            return;
        }
        while self.den_exp > 0 {
            match self.divide_by_base() {
                Some(quot) => {
                    self.numerator = quot;
                    self.den_exp -= 1;
                }
                None => break,
            }
        }
    }

    /// Exact quotient by `q - t²`, if it divides the numerator.
    fn divide_by_base(&self) -> Option<Vec<BigRational>> {
        let mut rem = self.numerator.clone();
        if rem.len() < 3 {
            return None;
        }
        let mut quot = vec![BigRational::zero(); rem.len() - 2];
        let q = rat(self.q);
        for k in (2..rem.len()).rev() {
            // leading term c t^k = (-c t^{k-2}) · (q - t²) + c q t^{k-2}
            let c = rem[k].clone();
            quot[k - 2] = -c.clone();
            rem[k] = BigRational::zero();
            rem[k - 2] += &c * &q;
        }
        if rem.iter().all(|c| c.is_zero()) {
            Some(trim(quot))
        } else {
            None
        }
    }

    /// Evaluates at a rational point; fails where `q - t² = 0` in the reduced form.
    pub fn eval(&self, t: &BigRational) -> Result<BigRational> {
        let mut num = BigRational::zero();
        for c in self.numerator.iter().rev() {
            num = num * t + c;
        }
        let base = rat(self.q) - t * t;
        if self.den_exp > 0 && base.is_zero() {
            return Err(domain("evaluation at a pole"));
        }
        let mut den = BigRational::one();
        for _ in 0..self.den_exp {
            den *= &base;
        }
        Ok(num / den)
    }

    /// Value at `t = q`.
    pub fn at_q(&self) -> BigRational {
        self.eval(&rat(self.q)).expect("q - q² vanishes only for q in {0, 1}")
    }
}

impl PartialEq for RationalFunctionT {
    fn eq(&self, other: &Self) -> bool {
        if self.q != other.q {
            return false;
        }
        let lhs = poly_mul(&self.numerator, &Self::base_pow(self.q, other.den_exp));
        let rhs = poly_mul(&other.numerator, &Self::base_pow(self.q, self.den_exp));
        lhs == rhs
    }
}

impl Eq for RationalFunctionT {}

impl Add<&RationalFunctionT> for &RationalFunctionT {
    type Output = RationalFunctionT;
    fn add(self, o: &RationalFunctionT) -> RationalFunctionT {
        assert_eq!(self.q, o.q, "mixed q");
        let k = self.den_exp.max(o.den_exp);
        let a = poly_mul(&self.numerator, &RationalFunctionT::base_pow(self.q, k - self.den_exp));
        let b = poly_mul(&o.numerator, &RationalFunctionT::base_pow(self.q, k - o.den_exp));
        RationalFunctionT::new(self.q, poly_add(&a, &b), k)
    }
}

impl Neg for &RationalFunctionT {
    type Output = RationalFunctionT;
    fn neg(self) -> RationalFunctionT {
        RationalFunctionT::new(self.q, self.numerator.iter().map(|c| -c).collect(), self.den_exp)
    }
}

impl Sub<&RationalFunctionT> for &RationalFunctionT {
    type Output = RationalFunctionT;
    fn sub(self, o: &RationalFunctionT) -> RationalFunctionT {
        self + &(-o)
    }
}

impl Mul<&RationalFunctionT> for &RationalFunctionT {
    type Output = RationalFunctionT;
    fn mul(self, o: &RationalFunctionT) -> RationalFunctionT {
        assert_eq!(self.q, o.q, "mixed q");
        RationalFunctionT::new(self.q, poly_mul(&self.numerator, &o.numerator), self.den_exp + o.den_exp)
    }
}

impl fmt::Display for RationalFunctionT {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.numerator.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        let wrap = self.den_exp > 0 && self.numerator.iter().filter(|c| !c.is_zero()).count() > 1;
        if wrap {
            write!(f, "(")?;
        }
        for (k, c) in self.numerator.iter().enumerate() {
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
            match (k, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (_, true) => {}
                (_, false) => write!(f, "{mag}*")?,
            }
            match k {
                0 => {}
                1 => write!(f, "t")?,
                _ => write!(f, "t^{k}")?,
            }
        }
        if wrap {
            write!(f, ")")?;
        }
        match self.den_exp {
            0 => Ok(()),
            1 => write!(f, "/({} - t^2)", self.q),
            k => write!(f, "/({} - t^2)^{k}", self.q),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn branch_tr(q: i64) -> RationalFunctionT {
        // -q(1 - t²)/(q - t²)
        RationalFunctionT::new(q, vec![rat(-q), rat(0), rat(q)], 1)
    }

    #[test]
    fn canonical_form_cancels_base() {
        let f = RationalFunctionT::new(2, vec![rat(2), rat(0), rat(-1)], 1);
        assert_eq!(f.den_exp(), 0);
        assert_eq!(f, RationalFunctionT::from_int(2, 1));
    }

    #[test]
    fn specializations() {
        assert_eq!(branch_tr(2).at_q(), rat(-3));
        // 1 - t²/(2 - t²) at t = 2 is 3
        let f = &RationalFunctionT::from_int(2, 1)
            - &(&RationalFunctionT::t_pow(2, 2) * &RationalFunctionT::inv_base_pow(2, 1));
        assert_eq!(f.at_q(), rat(3));
    }

    #[test]
    fn pole_is_reported() {
        let f = RationalFunctionT::inv_base_pow(4, 1);
        assert!(f.eval(&rat(2)).is_err());
    }

    #[test]
    fn display_is_readable() {
        assert_eq!(branch_tr(2).to_string(), "(-2 + 2*t^2)/(2 - t^2)");
        assert_eq!(RationalFunctionT::zero(3).to_string(), "0");
    }

    proptest! {
        #[test]
        fn field_laws_hold_under_evaluation(
            a in prop::collection::vec(-5i64..5, 0..4), ka in 0u32..3,
            b in prop::collection::vec(-5i64..5, 0..4), kb in 0u32..3,
            t in -7i64..7,
        ) {
            let q = 3;
            let f = RationalFunctionT::new(q, a.into_iter().map(rat).collect(), ka);
            let g = RationalFunctionT::new(q, b.into_iter().map(rat).collect(), kb);
            let t = rat(t);
            prop_assert_eq!((&f + &g).eval(&t).unwrap(), f.eval(&t).unwrap() + g.eval(&t).unwrap());
            prop_assert_eq!((&f * &g).eval(&t).unwrap(), f.eval(&t).unwrap() * g.eval(&t).unwrap());
            prop_assert_eq!(&(&f - &g) + &g, f);
        }
    }
}
