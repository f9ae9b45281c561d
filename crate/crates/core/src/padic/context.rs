use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Largest residue degree supported by the fixed-width coefficient storage.
pub const MAX_DEGREE: usize = 4;

/// Coefficients with respect to `1, x, …, x^{r-1}`; unused slots stay zero.
pub(crate) type Coeffs = [u64; MAX_DEGREE];

/// Parameters of the truncated unramified ring `Z_{p^r} / p^N`.
///
/// The ring is realised as `(Z/p^N)[x] / f(x)` where `f` is the
/// lexicographically smallest monic polynomial of degree `r` that is
/// irreducible mod `p`, lifted with coefficients in `[0, p)`.
#[derive(Clone, PartialEq, Eq)]
pub struct LocalContext {
    p: u64,
    r: usize,
    precision: u32,
    modulus: u64,
    q: u64,
    poly: Coeffs,
    frob_powers: Vec<Coeffs>,
}

impl fmt::Debug for LocalContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LocalContext(p={}, r={}, N={})", self.p, self.r, self.precision)
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// `(p, r)` with `q = p^r`, if `q` is a prime power.
pub fn prime_power_decompose(q: u64) -> Option<(u64, u32)> {
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let mut t = q;
    let mut r = 0;
    while t.is_multiple_of(p) {
        t /= p;
        r += 1;
    }
    (t == 1 && is_prime(p)).then_some((p, r))
}

impl LocalContext {
    pub fn new(p: u64, r: usize, precision: u32) -> Result<Arc<Self>> {
        if !is_prime(p) {
            return Err(Error::InvalidInput(format!("{p} is not prime")));
        }
        if r == 0 || r > MAX_DEGREE {
            return Err(Error::InvalidInput(format!("degree r={r} outside 1..={MAX_DEGREE}")));
        }
        if precision == 0 {
            return Err(Error::InvalidInput("precision must be at least 1".into()));
        }
        let modulus = checked_pow(p, precision)
            .filter(|m| *m < (1u64 << 62))
            .ok_or_else(|| Error::InvalidInput(format!("{p}^{precision} does not fit the word size")))?;
        let q = checked_pow(p, r as u32).ok_or_else(|| Error::InvalidInput("q overflows".into()))?;
        let poly = smallest_irreducible(p, r);
        let mut ctx = LocalContext { p, r, precision, modulus, q, poly, frob_powers: Vec::new() };
        let root = ctx.frobenius_of_generator();
        let mut powers = Vec::with_capacity(r);
        let mut acc = ctx.one_raw();
        for _ in 0..r {
            powers.push(acc);
            acc = ctx.mul_raw(&acc, &root);
        }
        ctx.frob_powers = powers;
        Ok(Arc::new(ctx))
    }

    /// Same prime and degree at a different precision.
    pub fn with_precision(&self, precision: u32) -> Result<Arc<Self>> {
        LocalContext::new(self.p, self.r, precision)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// Working precision `N`: elements are stored modulo `p^N`.
    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// `p^N`.
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Low coefficients `c_0, …, c_{r-1}` of the monic defining polynomial.
    pub fn defining_poly(&self) -> Vec<u64> {
        self.poly[..self.r].to_vec()
    }

    pub fn pow_p(&self, k: u32) -> u64 {
        self.p.pow(k)
    }

    pub(crate) fn zero_raw(&self) -> Coeffs {
        [0; MAX_DEGREE]
    }

    pub(crate) fn one_raw(&self) -> Coeffs {
        let mut c = [0; MAX_DEGREE];
        c[0] = 1 % self.modulus;
        c
    }

    pub(crate) fn coeffs_of_int(&self, v: i128) -> Coeffs {
        let mut c = [0; MAX_DEGREE];
        c[0] = v.rem_euclid(self.modulus as i128) as u64;
        c
    }

    pub(crate) fn add_raw(&self, a: &Coeffs, b: &Coeffs) -> Coeffs {
        let m = self.modulus;
        let mut out = [0; MAX_DEGREE];
        for i in 0..self.r {
            out[i] = (a[i] + b[i]) % m;
        }
        out
    }

    pub(crate) fn sub_raw(&self, a: &Coeffs, b: &Coeffs) -> Coeffs {
        let m = self.modulus;
        let mut out = [0; MAX_DEGREE];
        for i in 0..self.r {
            out[i] = (a[i] + m - b[i]) % m;
        }
        out
    }

    pub(crate) fn neg_raw(&self, a: &Coeffs) -> Coeffs {
        self.sub_raw(&self.zero_raw(), a)
    }

    pub(crate) fn scale_raw(&self, a: &Coeffs, k: u64) -> Coeffs {
        let m = self.modulus as u128;
        let k = (k as u128) % m;
        let mut out = [0; MAX_DEGREE];
        for i in 0..self.r {
            out[i] = ((a[i] as u128 * k) % m) as u64;
        }
        out
    }

    pub(crate) fn mul_raw(&self, a: &Coeffs, b: &Coeffs) -> Coeffs {
        let r = self.r;
        let m = self.modulus as u128;
        let mut prod = [0u128; 2 * MAX_DEGREE - 1];
        for i in 0..r {
            if a[i] == 0 {
                continue;
            }
            for j in 0..r {
                prod[i + j] = (prod[i + j] + a[i] as u128 * b[j] as u128) % m;
            }
        }
        // x^r = -(c_0 + c_1 x + … + c_{r-1} x^{r-1})
        for k in (r..2 * r - 1).rev() {
            let t = prod[k];
            if t == 0 {
                continue;
            }
            prod[k] = 0;
            for i in 0..r {
                let sub = t * self.poly[i] as u128 % m;
                prod[k - r + i] = (prod[k - r + i] + m - sub) % m;
            }
        }
        let mut out = [0; MAX_DEGREE];
        for i in 0..r {
            out[i] = prod[i] as u64;
        }
        out
    }

    pub(crate) fn pow_raw(&self, a: &Coeffs, mut e: u64) -> Coeffs {
        let mut base = *a;
        let mut acc = self.one_raw();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_raw(&acc, &base);
            }
            base = self.mul_raw(&base, &base);
            e >>= 1;
        }
        acc
    }

    pub(crate) fn is_zero_raw(&self, a: &Coeffs) -> bool {
        a[..self.r].iter().all(|&c| c == 0)
    }

    /// `v_p` of a stored value; `None` when it vanishes modulo `p^N`.
    pub(crate) fn valuation_raw(&self, a: &Coeffs) -> Option<u32> {
        a[..self.r].iter().filter(|&&c| c != 0).map(|&c| v_p_u64(c, self.p)).min()
    }

    pub(crate) fn is_unit_raw(&self, a: &Coeffs) -> bool {
        self.valuation_raw(a) == Some(0)
    }

    /// Inverse of a unit, by inversion in the residue field and Newton lifting.
    pub(crate) fn inv_raw(&self, a: &Coeffs) -> Option<Coeffs> {
        if !self.is_unit_raw(a) {
            return None;
        }
        let one = self.one_raw();
        let two = self.coeffs_of_int(2);
        let mut y = self.pow_raw(a, self.q - 2);
        for _ in 0..64 {
            let ay = self.mul_raw(a, &y);
            if ay == one {
                return Some(y);
            }
            y = self.mul_raw(&y, &self.sub_raw(&two, &ay));
        }
        None
    }

    /// Exact division by `p^k`; the caller guarantees divisibility.
    pub(crate) fn div_p_pow_raw(&self, a: &Coeffs, k: u32) -> Coeffs {
        let d = self.p.pow(k);
        let mut out = [0; MAX_DEGREE];
        for i in 0..self.r {
            debug_assert_eq!(a[i] % d, 0);
            out[i] = a[i] / d;
        }
        out
    }

    /// Reduce every coefficient modulo `p^k` (`k <= N`).
    pub(crate) fn truncate_raw(&self, a: &Coeffs, k: u32) -> Coeffs {
        let m = self.p.pow(k.min(self.precision));
        let mut out = [0; MAX_DEGREE];
        for i in 0..self.r {
            out[i] = a[i] % m;
        }
        out
    }

    pub(crate) fn frobenius_raw(&self, a: &Coeffs) -> Coeffs {
        let mut out = self.zero_raw();
        for (power, &c) in self.frob_powers.iter().zip(a.iter()) {
            if c != 0 {
                out = self.add_raw(&out, &self.scale_raw(power, c));
            }
        }
        out
    }

    fn eval_poly_raw(&self, y: &Coeffs) -> Coeffs {
        // Horner on x^r + c_{r-1} x^{r-1} + … + c_0.
        let mut acc = self.one_raw();
        for i in (0..self.r).rev() {
            acc = self.mul_raw(&acc, y);
            acc = self.add_raw(&acc, &self.coeffs_of_int(self.poly[i] as i128));
        }
        acc
    }

    fn eval_deriv_raw(&self, y: &Coeffs) -> Coeffs {
        let r = self.r;
        let mut acc = self.scale_raw(&self.pow_raw(y, (r - 1) as u64), r as u64);
        for i in 1..r {
            let term = self.scale_raw(&self.pow_raw(y, (i - 1) as u64), (i as u64) * self.poly[i]);
            acc = self.add_raw(&acc, &term);
        }
        acc
    }

    /// The root of the defining polynomial congruent to `x^p`, Hensel-lifted.
    fn frobenius_of_generator(&self) -> Coeffs {
        let mut gen = self.zero_raw();
        if self.r > 1 {
            gen[1] = 1;
        } else {
            // r = 1: the generator is the root of x + c_0, i.e. -c_0.
            gen = self.neg_raw(&self.coeffs_of_int(self.poly[0] as i128));
        }
        let mut y = self.pow_raw(&gen, self.p);
        for _ in 0..128 {
            let fy = self.eval_poly_raw(&y);
            if self.is_zero_raw(&fy) {
                break;
            }
            let d = self.eval_deriv_raw(&y);
            let dinv = self.inv_raw(&d).expect("separable defining polynomial");
            y = self.sub_raw(&y, &self.mul_raw(&fy, &dinv));
        }
        y
    }
}

pub(crate) fn v_p_u64(mut c: u64, p: u64) -> u32 {
    let mut v = 0;
    while c.is_multiple_of(p) {
        c /= p;
        v += 1;
    }
    v
}

pub(crate) fn checked_pow(base: u64, exp: u32) -> Option<u64> {
    let mut acc: u64 = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}

/// Polynomials over F_p as coefficient vectors, lowest degree first.
fn poly_rem_mod_p(num: &[u64], den: &[u64], p: u64) -> Vec<u64> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let lead_inv = mod_inverse(den[dd], p);
    while rem.len() > dd {
        let k = rem.len() - 1;
        let coef = rem[k] * lead_inv % p;
        if coef != 0 {
            for (slot, &d) in rem[k - dd..].iter_mut().zip(den.iter()) {
                *slot = (*slot + p * p - coef * d % p) % p;
            }
        }
        rem.pop();
    }
    rem
}

fn mod_inverse(a: u64, p: u64) -> u64 {
    (1..p).find(|x| a * x % p == 1).expect("invertible")
}

fn is_irreducible_mod_p(low: &[u64], p: u64) -> bool {
    let r = low.len();
    let mut f = low.to_vec();
    f.push(1);
    for d in 1..=r / 2 {
        let count = p.pow(d as u32);
        for idx in 0..count {
            let mut g = Vec::with_capacity(d + 1);
            let mut t = idx;
            for _ in 0..d {
                g.push(t % p);
                t /= p;
            }
            g.push(1);
            if poly_rem_mod_p(&f, &g, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

/// Ordered by the integer `Σ c_i p^i`, so `c_{r-1}` is most significant.
fn smallest_irreducible(p: u64, r: usize) -> Coeffs {
    let count = p.pow(r as u32);
    for idx in 0..count {
        let mut low = Vec::with_capacity(r);
        let mut t = idx;
        for _ in 0..r {
            low.push(t % p);
            t /= p;
        }
        if is_irreducible_mod_p(&low, p) {
            let mut out = [0; MAX_DEGREE];
            out[..r].copy_from_slice(&low);
            return out;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defining_polynomials_are_the_smallest_irreducibles() {
        assert_eq!(LocalContext::new(2, 2, 3).unwrap().defining_poly(), vec![1, 1]);
        assert_eq!(LocalContext::new(2, 3, 3).unwrap().defining_poly(), vec![1, 1, 0]);
        assert_eq!(LocalContext::new(3, 2, 3).unwrap().defining_poly(), vec![1, 0]);
        assert_eq!(LocalContext::new(5, 2, 3).unwrap().defining_poly(), vec![2, 0]);
        assert_eq!(LocalContext::new(7, 1, 3).unwrap().defining_poly(), vec![0]);
    }

    #[test]
    fn prime_powers() {
        assert_eq!(prime_power_decompose(16), Some((2, 4)));
        assert_eq!(prime_power_decompose(13), Some((13, 1)));
        assert_eq!(prime_power_decompose(12), None);
        assert_eq!(prime_power_decompose(1), None);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(LocalContext::new(4, 1, 3).is_err());
        assert!(LocalContext::new(2, 0, 3).is_err());
        assert!(LocalContext::new(2, 5, 3).is_err());
        assert!(LocalContext::new(2, 1, 0).is_err());
        assert!(LocalContext::new(13, 1, 40).is_err());
    }

    #[test]
    fn inverse_of_units() {
        let ctx = LocalContext::new(3, 2, 4).unwrap();
        let a: Coeffs = [5, 7, 0, 0];
        let inv = ctx.inv_raw(&a).unwrap();
        assert_eq!(ctx.mul_raw(&a, &inv), ctx.one_raw());
        assert!(ctx.inv_raw(&[3, 6, 0, 0]).is_none());
    }
}
