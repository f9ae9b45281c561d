use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use super::context::{Coeffs, LocalContext, MAX_DEGREE};
use crate::error::{domain, Error, Result};

/// An element of `GR(p^N, r) = Z_{p^r} / p^N`.
#[derive(Clone)]
pub struct GaloisRingElement {
    ctx: Arc<LocalContext>,
    coeffs: Coeffs,
}

impl PartialEq for GaloisRingElement {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs && same_ring(&self.ctx, &other.ctx)
    }
}

impl Eq for GaloisRingElement {}

impl std::hash::Hash for GaloisRingElement {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.coeffs.hash(state);
    }
}

pub(crate) fn same_ring(a: &Arc<LocalContext>, b: &Arc<LocalContext>) -> bool {
    Arc::ptr_eq(a, b) || (a.p() == b.p() && a.r() == b.r() && a.precision() == b.precision())
}

impl GaloisRingElement {
    pub(crate) fn from_raw(ctx: &Arc<LocalContext>, coeffs: Coeffs) -> Self {
        GaloisRingElement { ctx: Arc::clone(ctx), coeffs }
    }

    pub fn zero(ctx: &Arc<LocalContext>) -> Self {
        Self::from_raw(ctx, ctx.zero_raw())
    }

    pub fn one(ctx: &Arc<LocalContext>) -> Self {
        Self::from_raw(ctx, ctx.one_raw())
    }

    pub fn from_int(ctx: &Arc<LocalContext>, v: i128) -> Self {
        Self::from_raw(ctx, ctx.coeffs_of_int(v))
    }

    /// Builds `Σ c_i x^i`; at most `r` coefficients are accepted.
    pub fn from_coeffs(ctx: &Arc<LocalContext>, cs: &[i128]) -> Result<Self> {
        if cs.len() > ctx.r() {
            return Err(Error::InvalidInput(format!("{} coefficients given for a degree-{} ring", cs.len(), ctx.r())));
        }
        let m = ctx.modulus() as i128;
        let mut raw = [0u64; MAX_DEGREE];
        for (slot, &c) in raw.iter_mut().zip(cs) {
            *slot = c.rem_euclid(m) as u64;
        }
        Ok(Self::from_raw(ctx, raw))
    }

    /// The image of the polynomial generator `x`.
    pub fn generator(ctx: &Arc<LocalContext>) -> Self {
        let mut raw = ctx.zero_raw();
        if ctx.r() > 1 {
            raw[1] = 1;
        } else {
            raw = ctx.neg_raw(&ctx.coeffs_of_int(ctx.defining_poly()[0] as i128));
        }
        Self::from_raw(ctx, raw)
    }

    pub fn context(&self) -> &Arc<LocalContext> {
        &self.ctx
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs[..self.ctx.r()]
    }

    pub fn is_zero(&self) -> bool {
        self.ctx.is_zero_raw(&self.coeffs)
    }

    /// `v_p`, or `None` when the element vanishes modulo `p^N`.
    pub fn valuation(&self) -> Option<u32> {
        self.ctx.valuation_raw(&self.coeffs)
    }

    pub fn is_unit(&self) -> bool {
        self.ctx.is_unit_raw(&self.coeffs)
    }

    pub fn in_prime_subring(&self) -> bool {
        self.coeffs[1..].iter().all(|&c| c == 0)
    }

    pub fn inverse(&self) -> Result<Self> {
        self.ctx
            .inv_raw(&self.coeffs)
            .map(|c| Self::from_raw(&self.ctx, c))
            .ok_or_else(|| domain(format!("{self} is not a unit")))
    }

    pub fn pow(&self, e: u64) -> Self {
        Self::from_raw(&self.ctx, self.ctx.pow_raw(&self.coeffs, e))
    }

    /// The Frobenius lift `σ`.
    pub fn frobenius(&self) -> Self {
        Self::from_raw(&self.ctx, self.ctx.frobenius_raw(&self.coeffs))
    }

    pub fn frobenius_pow(&self, k: usize) -> Self {
        let mut x = self.clone();
        for _ in 0..k % self.ctx.r() {
            x = x.frobenius();
        }
        x
    }

    /// `x · σ(x) ⋯ σ^{r-1}(x)`, which lies in the prime subring.
    pub fn ring_norm(&self) -> Self {
        let mut acc = self.clone();
        let mut cur = self.clone();
        for _ in 1..self.ctx.r() {
            cur = cur.frobenius();
            acc = &acc * &cur;
        }
        acc
    }

    pub fn scale(&self, k: u64) -> Self {
        Self::from_raw(&self.ctx, self.ctx.scale_raw(&self.coeffs, k))
    }

    /// Exact division by `p^k`; fails unless `p^k` divides the stored value.
    pub fn div_p_pow(&self, k: u32) -> Result<Self> {
        match self.valuation() {
            Some(v) if v < k => Err(domain(format!("{self} is not divisible by p^{k}"))),
            _ => Ok(Self::from_raw(&self.ctx, self.ctx.div_p_pow_raw(&self.coeffs, k))),
        }
    }

    /// The same residue viewed in a ring of lower (or equal) precision.
    pub fn reduce_to(&self, target: &Arc<LocalContext>) -> Self {
        debug_assert!(target.p() == self.ctx.p() && target.r() == self.ctx.r());
        debug_assert!(target.precision() <= self.ctx.precision());
        Self::from_raw(target, target.truncate_raw(&self.coeffs, target.precision()))
    }

    /// The canonical lift of a residue into a ring of higher precision.
    pub fn lift_to(&self, target: &Arc<LocalContext>) -> Self {
        debug_assert!(target.p() == self.ctx.p() && target.r() == self.ctx.r());
        Self::from_raw(target, self.coeffs)
    }

    /// Reduces the stored representative modulo `p^k` within the same ring.
    pub fn truncate(&self, k: u32) -> Self {
        Self::from_raw(&self.ctx, self.ctx.truncate_raw(&self.coeffs, k))
    }
}

impl fmt::Display for GaloisRingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ctx.r() == 1 {
            return write!(f, "{}", self.coeffs[0]);
        }
        write!(f, "(")?;
        for (i, c) in self.coeffs().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for GaloisRingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {}^{})", self, self.ctx.p(), self.ctx.precision())
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $raw:ident) => {
        impl $trait<&GaloisRingElement> for &GaloisRingElement {
            type Output = GaloisRingElement;
            fn $method(self, rhs: &GaloisRingElement) -> GaloisRingElement {
                debug_assert!(same_ring(&self.ctx, &rhs.ctx), "mixed Galois rings");
                GaloisRingElement::from_raw(&self.ctx, self.ctx.$raw(&self.coeffs, &rhs.coeffs))
            }
        }
        impl $trait for GaloisRingElement {
            type Output = GaloisRingElement;
            fn $method(self, rhs: GaloisRingElement) -> GaloisRingElement {
                (&self).$method(&rhs)
            }
        }
    };
}

binop!(Add, add, add_raw);
binop!(Sub, sub, sub_raw);
binop!(Mul, mul, mul_raw);

impl Neg for &GaloisRingElement {
    type Output = GaloisRingElement;
    fn neg(self) -> GaloisRingElement {
        GaloisRingElement::from_raw(&self.ctx, self.ctx.neg_raw(&self.coeffs))
    }
}

impl Neg for GaloisRingElement {
    type Output = GaloisRingElement;
    fn neg(self) -> GaloisRingElement {
        -&self
    }
}
