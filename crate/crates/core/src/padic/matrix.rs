use std::fmt;
use std::sync::Arc;

use super::context::LocalContext;
use super::exact::{self, ExactPoly};
use super::extnat::ExtendedNat;
use super::galois_ring::{same_ring, GaloisRingElement};
use crate::error::{domain, precision, Error, Result};

/// A 2×2 matrix over a Galois ring, stored row-major as `[a, b, c, d]`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RingMatrix(pub [GaloisRingElement; 4]);

impl RingMatrix {
    pub fn new(a: GaloisRingElement, b: GaloisRingElement, c: GaloisRingElement, d: GaloisRingElement) -> Self {
        RingMatrix([a, b, c, d])
    }

    pub fn from_ints(ctx: &Arc<LocalContext>, m: [i128; 4]) -> Self {
        RingMatrix(m.map(|v| GaloisRingElement::from_int(ctx, v)))
    }

    pub fn identity(ctx: &Arc<LocalContext>) -> Self {
        Self::from_ints(ctx, [1, 0, 0, 1])
    }

    pub fn scalar(x: &GaloisRingElement) -> Self {
        let z = GaloisRingElement::zero(x.context());
        RingMatrix([x.clone(), z.clone(), z, x.clone()])
    }

    pub fn context(&self) -> &Arc<LocalContext> {
        self.0[0].context()
    }

    pub fn mul(&self, o: &RingMatrix) -> RingMatrix {
        let [a, b, c, d] = &self.0;
        let [e, f, g, h] = &o.0;
        RingMatrix([&(a * e) + &(b * g), &(a * f) + &(b * h), &(c * e) + &(d * g), &(c * f) + &(d * h)])
    }

    pub fn det(&self) -> GaloisRingElement {
        let [a, b, c, d] = &self.0;
        &(a * d) - &(b * c)
    }

    pub fn trace(&self) -> GaloisRingElement {
        &self.0[0] + &self.0[3]
    }

    pub fn adjugate(&self) -> RingMatrix {
        let [a, b, c, d] = &self.0;
        RingMatrix([d.clone(), -b, -c, a.clone()])
    }

    pub fn frobenius(&self) -> RingMatrix {
        RingMatrix(self.0.clone().map(|x| x.frobenius()))
    }

    pub fn scale(&self, x: &GaloisRingElement) -> RingMatrix {
        RingMatrix(self.0.clone().map(|y| x * &y))
    }

    pub fn is_invertible(&self) -> bool {
        self.det().is_unit()
    }

    pub fn inverse(&self) -> Result<RingMatrix> {
        let u = self.det().inverse()?;
        Ok(self.adjugate().scale(&u))
    }

    /// Minimum valuation of the entries; `None` for the zero matrix.
    pub fn valuation(&self) -> Option<u32> {
        self.0.iter().filter_map(|x| x.valuation()).min()
    }

    pub fn reduce_to(&self, target: &Arc<LocalContext>) -> RingMatrix {
        RingMatrix(self.0.clone().map(|x| x.reduce_to(target)))
    }

    pub fn truncate(&self, k: u32) -> RingMatrix {
        RingMatrix(self.0.clone().map(|x| x.truncate(k)))
    }

    /// The twisted product `δ σ(δ) ⋯ σ^{r-1}(δ)`.
    pub fn norm_map(&self) -> RingMatrix {
        let mut acc = self.clone();
        let mut cur = self.clone();
        for _ in 1..self.context().r() {
            cur = cur.frobenius();
            acc = acc.mul(&cur);
        }
        acc
    }

    /// `h⁻¹ δ σ(h)`.
    pub fn sigma_conjugate(h: &RingMatrix, delta: &RingMatrix) -> Result<RingMatrix> {
        Ok(h.inverse()?.mul(delta).mul(&h.frobenius()))
    }

    /// `h⁻¹ g h`.
    pub fn conjugate(h: &RingMatrix, g: &RingMatrix) -> Result<RingMatrix> {
        Ok(h.inverse()?.mul(g).mul(h))
    }
}

/// An element `g = p^e · M` of `GL_2(Q_{p^r})` with `M` primitive.
///
/// `M` is known modulo `p^prec` (`prec <= N`). When the value came from
/// integer data and only exact operations were applied, the integer
/// entries are retained so that vanishing can be certified.
#[derive(Clone)]
pub struct LocalMatrix {
    ctx: Arc<LocalContext>,
    exponent: i64,
    unit_part: RingMatrix,
    prec: u32,
    exact: Option<[ExactPoly; 4]>,
}

/// Result of a valuation query at finite precision.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Valuation {
    Exact(i64),
    /// The quantity vanishes modulo `p^k`; its true valuation is unknown but `>= k`.
    AtLeast(i64),
    /// Certified zero.
    Zero,
}

impl Valuation {
    /// `Some(v)` if `v < bound`, `None` if certified `>= bound`.
    pub fn below(self, bound: i64, what: &str) -> Result<Option<i64>> {
        match self {
            Valuation::Exact(v) if v < bound => Ok(Some(v)),
            Valuation::Exact(_) | Valuation::Zero => Ok(None),
            Valuation::AtLeast(k) if k >= bound => Ok(None),
            Valuation::AtLeast(k) => Err(precision(format!("{what}: only known to have valuation >= {k}"))),
        }
    }

    pub fn certified(self, what: &str) -> Result<Option<i64>> {
        match self {
            Valuation::Exact(v) => Ok(Some(v)),
            Valuation::Zero => Ok(None),
            Valuation::AtLeast(k) => Err(precision(format!("{what}: only known to have valuation >= {k}"))),
        }
    }
}

fn known_valuation(x: &GaloisRingElement, known: u32, shift: i64) -> Valuation {
    match x.truncate(known).valuation() {
        Some(v) if v < known => Valuation::Exact(shift + i64::from(v)),
        _ => Valuation::AtLeast(shift + i64::from(known)),
    }
}

impl PartialEq for LocalMatrix {
    fn eq(&self, other: &Self) -> bool {
        if !same_ring(&self.ctx, &other.ctx) || self.exponent != other.exponent {
            return false;
        }
        let k = self.prec.min(other.prec);
        self.unit_part.truncate(k) == other.unit_part.truncate(k)
    }
}

impl LocalMatrix {
    /// `p^exponent · [[a, b], [c, d]]` with integer entries.
    pub fn from_ints(ctx: &Arc<LocalContext>, exponent: i64, m: [i128; 4]) -> Result<Self> {
        Self::from_exact(ctx, exponent, m.map(exact::constant))
    }

    /// Entries given by integer coefficient vectors in the polynomial basis.
    pub fn from_coeff_entries(ctx: &Arc<LocalContext>, exponent: i64, m: [Vec<i128>; 4]) -> Result<Self> {
        let mut polys = [[0i128; 4]; 4];
        for (slot, v) in polys.iter_mut().zip(m.iter()) {
            if v.len() > ctx.r() {
                return Err(Error::InvalidInput(format!(
                    "entry has {} coefficients, ring degree is {}",
                    v.len(),
                    ctx.r()
                )));
            }
            slot[..v.len()].copy_from_slice(v);
        }
        Self::from_exact(ctx, exponent, polys)
    }

    pub(crate) fn from_exact(ctx: &Arc<LocalContext>, exponent: i64, m: [ExactPoly; 4]) -> Result<Self> {
        let v =
            m.iter().filter_map(|e| exact::p_adic_valuation(e, ctx.p())).min().ok_or_else(|| domain("zero matrix"))?;
        let d = exact::checked_p_pow(ctx.p(), v).ok_or_else(|| Error::InvalidInput("entry too large".into()))?;
        let m = m.map(|e| exact::div_exact(&e, d));
        let unit_part = RingMatrix(m.map(|e| GaloisRingElement::from_raw(ctx, exact::to_raw(ctx, &e))));
        Ok(LocalMatrix {
            ctx: Arc::clone(ctx),
            exponent: exponent + i64::from(v),
            unit_part,
            prec: ctx.precision(),
            exact: Some(m),
        })
    }

    /// `p^exponent · m` where `m` is known to full working precision.
    pub fn from_ring(exponent: i64, m: RingMatrix) -> Result<Self> {
        let prec = m.context().precision();
        Self::normalize(exponent, m, prec)
    }

    /// `p^exponent · m` where `m` is only known modulo `p^known`.
    pub fn from_ring_known(exponent: i64, m: RingMatrix, known: u32) -> Result<Self> {
        Self::normalize(exponent, m, known)
    }

    fn normalize(exponent: i64, m: RingMatrix, known: u32) -> Result<Self> {
        let ctx = Arc::clone(m.context());
        let known = known.min(ctx.precision());
        let v = m.truncate(known).valuation().ok_or_else(|| precision(format!("matrix vanishes modulo p^{known}")))?;
        let unit_part = RingMatrix(m.0.map(|x| x.truncate(known).div_p_pow(v).expect("content divides")));
        Ok(LocalMatrix { ctx, exponent: exponent + i64::from(v), unit_part, prec: known - v, exact: None })
    }

    /// The same matrix in a ring of the same `p` and `r` but another working precision.
    /// Exact matrices keep full precision; otherwise the known precision cannot grow.
    pub fn with_context(&self, ctx: &Arc<LocalContext>) -> Result<Self> {
        debug_assert!(ctx.p() == self.ctx.p() && ctx.r() == self.ctx.r());
        if let Some(m) = self.exact {
            return Self::from_exact(ctx, self.exponent, m);
        }
        let known = self.prec.min(ctx.precision());
        let unit_part = if ctx.precision() <= self.ctx.precision() {
            self.unit_part.reduce_to(ctx)
        } else {
            RingMatrix(self.unit_part.0.clone().map(|x| x.truncate(known).lift_to(ctx)))
        };
        Ok(LocalMatrix { ctx: Arc::clone(ctx), exponent: self.exponent, unit_part, prec: known, exact: None })
    }

    pub fn identity(ctx: &Arc<LocalContext>) -> Self {
        Self::from_ints(ctx, 0, [1, 0, 0, 1]).expect("identity is nonzero")
    }

    pub fn diag(ctx: &Arc<LocalContext>, a: i128, d: i128) -> Result<Self> {
        Self::from_ints(ctx, 0, [a, 0, 0, d])
    }

    pub fn context(&self) -> &Arc<LocalContext> {
        &self.ctx
    }

    /// The exponent `e` in `g = p^e · M`.
    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    /// The primitive part `M`, meaningful modulo `p^precision()`.
    pub fn unit_part(&self) -> &RingMatrix {
        &self.unit_part
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    pub fn is_integral(&self) -> bool {
        self.exponent >= 0
    }

    /// `k(g)`: the least `k` with `p^k g` integral. Negative for matrices divisible by `p`.
    pub fn k_of(&self) -> i64 {
        -self.exponent
    }

    /// `p^k · g`.
    pub fn scale_p(&self, k: i64) -> Self {
        let mut out = self.clone();
        out.exponent += k;
        out
    }

    /// `p^exponent M` reduced into a ring of precision `k`; requires `g` integral.
    pub fn integral_mod(&self, target: &Arc<LocalContext>) -> Result<RingMatrix> {
        let k = target.precision();
        if self.exponent < 0 {
            return Err(domain("matrix is not integral"));
        }
        if self.exponent >= i64::from(k) {
            return Ok(RingMatrix::from_ints(target, [0, 0, 0, 0]));
        }
        let e = self.exponent as u32;
        if e + self.prec < k {
            return Err(precision(format!("entries known modulo p^{} only", e + self.prec)));
        }
        let pe = self.ctx.pow_p(e);
        let scaled = RingMatrix(self.unit_part.0.clone().map(|x| x.truncate(k - e).scale(pe)));
        Ok(scaled.reduce_to(target))
    }

    pub fn mul(&self, o: &LocalMatrix) -> Result<LocalMatrix> {
        debug_assert!(same_ring(&self.ctx, &o.ctx));
        if let (Some(a), Some(b)) = (&self.exact, &o.exact) {
            if let Some(m) = exact_mat_mul(&self.ctx, a, b) {
                return Self::from_exact(&self.ctx, self.exponent + o.exponent, m);
            }
        }
        let known = self.prec.min(o.prec);
        Self::normalize(self.exponent + o.exponent, self.unit_part.mul(&o.unit_part), known)
    }

    pub fn det_valuation_info(&self) -> Valuation {
        if let Some(m) = &self.exact {
            if let Some(det) = exact_det(&self.ctx, m) {
                return match exact::p_adic_valuation(&det, self.ctx.p()) {
                    Some(v) => Valuation::Exact(2 * self.exponent + i64::from(v)),
                    None => Valuation::Zero,
                };
            }
        }
        known_valuation(&self.unit_part.det(), self.prec, 2 * self.exponent)
    }

    pub fn trace_valuation_info(&self) -> Valuation {
        if let Some(m) = &self.exact {
            if let Some(tr) = exact::add(&m[0], &m[3]) {
                return match exact::p_adic_valuation(&tr, self.ctx.p()) {
                    Some(v) => Valuation::Exact(self.exponent + i64::from(v)),
                    None => Valuation::Zero,
                };
            }
        }
        known_valuation(&self.unit_part.trace(), self.prec, self.exponent)
    }

    /// `v_p(det g)`. Fails for singular or insufficiently precise input.
    pub fn det_valuation(&self) -> Result<i64> {
        self.det_valuation_info().certified("det")?.ok_or_else(|| domain("singular matrix"))
    }

    /// `v_p(tr g)`, `Infinity`-like `None` when the trace is certified zero.
    pub fn trace_valuation(&self) -> Result<Option<i64>> {
        self.trace_valuation_info().certified("trace")
    }

    pub fn inverse(&self) -> Result<LocalMatrix> {
        let d = self.det_valuation()? - 2 * self.exponent;
        let d = u32::try_from(d).expect("unit-part determinant valuation is non-negative");
        if let Some(m) = &self.exact {
            if let Some(det) = exact_det(&self.ctx, m) {
                let pd = exact::checked_p_pow(self.ctx.p(), d);
                if let Some(pd) = pd {
                    let sign = if det == exact::constant(pd) {
                        Some(1)
                    } else if det == exact::constant(-pd) {
                        Some(-1)
                    } else {
                        None
                    };
                    if let Some(s) = sign {
                        let adj = [m[3], exact::neg(&m[1]).unwrap(), exact::neg(&m[2]).unwrap(), m[0]];
                        let adj = adj.map(|e| exact::scale(&e, s).unwrap());
                        return Self::from_exact(&self.ctx, -self.exponent - i64::from(d), adj);
                    }
                }
            }
        }
        let det = self.unit_part.det().truncate(self.prec);
        let u = det.div_p_pow(d)?.inverse()?;
        let known = self.prec - d;
        let inv = self.unit_part.adjugate().scale(&u);
        Self::normalize(-self.exponent - i64::from(d), inv, known)
    }

    pub fn frobenius(&self) -> LocalMatrix {
        let exact = self.exact.filter(|m| m.iter().all(exact::in_prime_subring));
        LocalMatrix {
            ctx: Arc::clone(&self.ctx),
            exponent: self.exponent,
            unit_part: self.unit_part.frobenius(),
            prec: self.prec,
            exact,
        }
    }

    /// `h⁻¹ g h`.
    pub fn conjugate_by(&self, h: &LocalMatrix) -> Result<LocalMatrix> {
        h.inverse()?.mul(self)?.mul(h)
    }

    /// `h⁻¹ δ σ(h)`.
    pub fn sigma_conjugate(h: &LocalMatrix, delta: &LocalMatrix) -> Result<LocalMatrix> {
        h.inverse()?.mul(delta)?.mul(&h.frobenius())
    }

    /// `δ σ(δ) ⋯ σ^{r-1}(δ)`.
    pub fn norm_map(&self) -> Result<LocalMatrix> {
        let mut acc = self.clone();
        let mut cur = self.clone();
        for _ in 1..self.ctx.r() {
            cur = cur.frobenius();
            acc = acc.mul(&cur)?;
        }
        Ok(acc)
    }

    /// `v_p(1 - tr g + det g)` as a raw bound, without domain checks.
    pub(crate) fn ell_info(&self) -> Valuation {
        let e = self.exponent;
        let a = (-2 * e).max(0);
        let (s1, s2) = (a + e, a + 2 * e);
        let p = self.ctx.p();
        if let Some(m) = &self.exact {
            let y = (|| {
                let tr = exact::add(&m[0], &m[3])?;
                let det = exact_det(&self.ctx, m)?;
                let t1 = exact::constant(exact::checked_p_pow(p, a as u32)?);
                let t2 = exact::scale(&tr, exact::checked_p_pow(p, s1 as u32)?)?;
                let t3 = exact::scale(&det, exact::checked_p_pow(p, s2 as u32)?)?;
                exact::add(&exact::sub(&t1, &t2)?, &t3)
            })();
            if let Some(y) = y {
                return match exact::p_adic_valuation(&y, p) {
                    Some(v) => Valuation::Exact(i64::from(v) - a),
                    None => Valuation::Zero,
                };
            }
        }
        let n = i64::from(self.ctx.precision());
        let known = n.min(s1 + i64::from(self.prec)).min(s2 + i64::from(self.prec));
        let pk = |k: i64| if k >= n { 0 } else { self.ctx.pow_p(k as u32) };
        let one = GaloisRingElement::one(&self.ctx);
        let y = &(&one.scale(pk(a)) - &self.unit_part.trace().scale(pk(s1))) + &self.unit_part.det().scale(pk(s2));
        known_valuation(&y, known as u32, -a)
    }

    fn check_ell_domain(&self) -> Result<()> {
        let vd = self.det_valuation()?;
        let vt = self.trace_valuation()?;
        if vd < 1 || vt != Some(0) {
            return Err(domain(format!("ell requires v(det) >= 1 and v(tr) = 0, got v(det)={vd}, v(tr)={vt:?}")));
        }
        Ok(())
    }

    /// `ℓ(g) = v_p(1 - tr g + det g)`, `Infinity` only when certified zero.
    pub fn ell_of(&self) -> Result<ExtendedNat> {
        self.check_ell_domain()?;
        match self.ell_info().certified("1 - tr + det")? {
            Some(v) => Ok(ExtendedNat::Finite(v as u32)),
            None => Ok(ExtendedNat::Infinity),
        }
    }

    /// `Some(ℓ)` when `ℓ(g) < bound`, `None` when `ℓ(g) >= bound` (including `∞`).
    pub fn ell_below(&self, bound: u32) -> Result<Option<u32>> {
        self.check_ell_domain()?;
        Ok(self.ell_info().below(i64::from(bound), "1 - tr + det")?.map(|v| v as u32))
    }

    /// Integral trace and determinant reduced modulo `p^n`.
    pub fn trace_det_mod(&self, target: &Arc<LocalContext>) -> Result<(GaloisRingElement, GaloisRingElement)> {
        let n = target.precision();
        let e = self.exponent;
        let tr = self.unit_part.trace().truncate(self.prec);
        let det = self.unit_part.det().truncate(self.prec);
        let shifted = |x: GaloisRingElement, shift: i64, what: &str| -> Result<GaloisRingElement> {
            if shift >= 0 {
                let known = i64::from(self.prec) + shift;
                if known < i64::from(n) {
                    return Err(precision(format!("{what} known modulo p^{known} only")));
                }
                let pk = if shift >= i64::from(self.ctx.precision()) { 0 } else { self.ctx.pow_p(shift as u32) };
                Ok(x.scale(pk).reduce_to(target))
            } else {
                let k = (-shift) as u32;
                let known = i64::from(self.prec) + shift;
                if known < i64::from(n) {
                    return Err(precision(format!("{what} known modulo p^{known} only")));
                }
                x.div_p_pow(k).map(|y| y.reduce_to(target)).map_err(|_| domain(format!("{what} is not integral")))
            }
        };
        Ok((shifted(tr, e, "trace")?, shifted(det, 2 * e, "det")?))
    }

    /// The unit root of `x² - (tr g) x + det g` modulo `p^n`.
    pub fn unit_eigenvalue(&self, n: u32) -> Result<GaloisRingElement> {
        if self.trace_valuation()? != Some(0) {
            return Err(domain("unit eigenvalue requires a unit trace"));
        }
        if self.det_valuation()? < 1 {
            return Err(domain("unit eigenvalue requires v(det) >= 1"));
        }
        let target = self.ctx.with_precision(n)?;
        let (t, d) = self.trace_det_mod(&target)?;
        Ok(hensel_unit_root(&t, &d))
    }
}

/// Newton iteration for the root of `x² - t x + d` congruent to `t` (a unit).
pub(crate) fn hensel_unit_root(t: &GaloisRingElement, d: &GaloisRingElement) -> GaloisRingElement {
    let mut a = t.clone();
    let two = GaloisRingElement::from_int(t.context(), 2);
    for _ in 0..64 {
        let f = &(&(&a * &a) - &(t * &a)) + d;
        if f.is_zero() {
            break;
        }
        let df = &(&two * &a) - t;
        a = &a - &(&f * &df.inverse().expect("derivative is a unit"));
    }
    a
}

fn exact_mat_mul(ctx: &LocalContext, a: &[ExactPoly; 4], b: &[ExactPoly; 4]) -> Option<[ExactPoly; 4]> {
    let dot = |x: &ExactPoly, y: &ExactPoly, z: &ExactPoly, w: &ExactPoly| -> Option<ExactPoly> {
        exact::add(&exact::mul(ctx, x, y)?, &exact::mul(ctx, z, w)?)
    };
    Some([
        dot(&a[0], &b[0], &a[1], &b[2])?,
        dot(&a[0], &b[1], &a[1], &b[3])?,
        dot(&a[2], &b[0], &a[3], &b[2])?,
        dot(&a[2], &b[1], &a[3], &b[3])?,
    ])
}

fn exact_det(ctx: &LocalContext, m: &[ExactPoly; 4]) -> Option<ExactPoly> {
    exact::sub(&exact::mul(ctx, &m[0], &m[3])?, &exact::mul(ctx, &m[1], &m[2])?)
}

fn fmt_exact_entry(f: &mut fmt::Formatter<'_>, e: &ExactPoly, r: usize) -> fmt::Result {
    if r == 1 {
        return write!(f, "{}", e[0]);
    }
    write!(f, "(")?;
    for (i, c) in e[..r].iter().enumerate() {
        if i > 0 {
            write!(f, ",")?;
        }
        write!(f, "{c}")?;
    }
    write!(f, ")")
}

impl fmt::Display for LocalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p^{} * [[", self.exponent)?;
        for i in 0..4 {
            match i {
                1 | 3 => write!(f, ",")?,
                2 => write!(f, "],[")?,
                _ => {}
            }
            match &self.exact {
                Some(m) => fmt_exact_entry(f, &m[i], self.ctx.r())?,
                None => write!(f, "{}", self.unit_part.0[i].truncate(self.prec))?,
            }
        }
        write!(f, "]]")
    }
}

impl fmt::Debug for LocalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (known mod p^{}{})", self, self.prec, if self.exact.is_some() { ", exact" } else { "" })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ctx(p: u64, r: usize, n: u32) -> Arc<LocalContext> {
        LocalContext::new(p, r, n).unwrap()
    }

    #[test]
    fn k_examples() {
        let c = ctx(2, 1, 8);
        assert_eq!(LocalMatrix::diag(&c, 2, 1).unwrap().k_of(), 0);
        assert_eq!(LocalMatrix::from_ints(&c, 0, [1, 0, 0, 4]).unwrap().scale_p(-1).k_of(), 1);
        assert_eq!(LocalMatrix::from_ints(&c, -1, [1, 1, 0, 4]).unwrap().k_of(), 1);
        assert_eq!(LocalMatrix::from_ints(&c, 0, [4, 0, 0, 2]).unwrap().k_of(), -1);
    }

    #[test]
    fn ell_examples() {
        for p in [2u64, 3, 5] {
            let c = ctx(p, 1, 8);
            let p = p as i128;
            assert_eq!(LocalMatrix::diag(&c, p, 1 + p).unwrap().ell_of().unwrap(), ExtendedNat::Finite(1));
            assert_eq!(LocalMatrix::diag(&c, p, 1).unwrap().ell_of().unwrap(), ExtendedNat::Infinity);
        }
        let c = ctx(3, 1, 8);
        assert_eq!(LocalMatrix::diag(&c, 3, 2).unwrap().ell_of().unwrap(), ExtendedNat::Finite(0));
        assert!(matches!(LocalMatrix::diag(&c, 3, 3).unwrap().ell_of(), Err(Error::Domain(_))));
        assert!(matches!(LocalMatrix::diag(&c, 1, 1).unwrap().ell_of(), Err(Error::Domain(_))));
    }

    #[test]
    fn ell_without_certificate_exhausts_precision() {
        let c = ctx(2, 1, 6);
        let m = LocalMatrix::from_ring(0, RingMatrix::from_ints(&c, [2, 0, 0, 1])).unwrap();
        assert!(!m.is_exact());
        assert!(matches!(m.ell_of(), Err(Error::PrecisionExhausted(_))));
        assert_eq!(m.ell_below(5).unwrap(), None);
    }

    #[test]
    fn unit_eigenvalue_examples() {
        let c = ctx(2, 1, 10);
        let g = LocalMatrix::from_ints(&c, 0, [3, 1, -2, 0]).unwrap();
        let a = g.unit_eigenvalue(3).unwrap();
        assert_eq!(a.coeffs(), &[1]);
        let g = LocalMatrix::diag(&c, 2, 7).unwrap();
        assert_eq!(g.unit_eigenvalue(3).unwrap().coeffs(), &[7]);
        let g = LocalMatrix::diag(&c, 2, 2).unwrap();
        assert!(g.unit_eigenvalue(3).is_err());
    }

    #[test]
    fn unit_eigenvalue_mod_8_by_exhaustion() {
        let roots: Vec<i64> = (0i64..8).filter(|a| (a * a - 3 * a + 2).rem_euclid(8) == 0 && a % 2 == 1).collect();
        assert_eq!(roots, vec![1]);
    }

    #[test]
    fn inverse_roundtrip() {
        let c = ctx(3, 2, 8);
        let g = LocalMatrix::from_coeff_entries(&c, -1, [vec![1, 2], vec![3], vec![0, 3], vec![9, 1]]).unwrap();
        let prod = g.mul(&g.inverse().unwrap()).unwrap();
        assert_eq!(prod, LocalMatrix::identity(&c));
    }

    #[test]
    fn norm_of_scalar_is_ring_norm() {
        let c = ctx(3, 2, 4);
        let x = GaloisRingElement::from_coeffs(&c, &[2, 1]).unwrap();
        let n = RingMatrix::scalar(&x).norm_map();
        assert_eq!(n, RingMatrix::scalar(&x.ring_norm()));
        assert_eq!(RingMatrix::identity(&c).norm_map(), RingMatrix::identity(&c));
    }

    #[test]
    fn norm_charpoly_in_prime_field_for_gl2_f4() {
        let c = ctx(2, 2, 1);
        let elems: Vec<GaloisRingElement> =
            (0..4).map(|i| GaloisRingElement::from_coeffs(&c, &[i & 1, i >> 1]).unwrap()).collect();
        let mut count = 0;
        for a in &elems {
            for b in &elems {
                for cc in &elems {
                    for d in &elems {
                        let m = RingMatrix::new(a.clone(), b.clone(), cc.clone(), d.clone());
                        if !m.is_invertible() {
                            continue;
                        }
                        count += 1;
                        let n = m.norm_map();
                        assert!(n.trace().in_prime_subring() && n.det().in_prime_subring());
                    }
                }
            }
        }
        assert_eq!(count, 180);
    }

    #[test]
    fn sigma_conjugate_identity_and_r1() {
        let c = ctx(3, 2, 3);
        let d = RingMatrix::from_ints(&c, [1, 2, 3, 5]);
        assert_eq!(RingMatrix::sigma_conjugate(&RingMatrix::identity(&c), &d).unwrap(), d);
        let c1 = ctx(3, 1, 3);
        let h = RingMatrix::from_ints(&c1, [1, 1, 0, 2]);
        let d = RingMatrix::from_ints(&c1, [4, 2, 3, 5]);
        assert_eq!(RingMatrix::sigma_conjugate(&h, &d).unwrap(), RingMatrix::conjugate(&h, &d).unwrap());
    }

    fn gr_elem(c: &Arc<LocalContext>) -> impl Strategy<Value = GaloisRingElement> {
        let c = Arc::clone(c);
        let m = c.modulus() as i128;
        prop::collection::vec(0..m, c.r()).prop_map(move |v| GaloisRingElement::from_coeffs(&c, &v).unwrap())
    }

    fn gl2(c: &Arc<LocalContext>) -> impl Strategy<Value = RingMatrix> {
        prop::array::uniform4(gr_elem(c)).prop_map(RingMatrix).prop_filter("invertible", |m| m.is_invertible())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn norm_of_sigma_conjugate_is_conjugate((h, d) in {
            let c = ctx(2, 2, 3);
            (gl2(&c), gl2(&c))
        }) {
            let lhs = RingMatrix::sigma_conjugate(&h, &d).unwrap().norm_map();
            let rhs = RingMatrix::conjugate(&h, &d.norm_map()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn unit_root_satisfies_quadratic(t in 0i128..1000, d in 0i128..1000) {
            let c = ctx(3, 1, 12);
            prop_assume!(t % 3 != 0 && d != 0);
            let d = d * 3;
            let g = LocalMatrix::from_ints(&c, 0, [t, 1, -d, 0]).unwrap();
            let a = g.unit_eigenvalue(4).unwrap();
            let c4 = a.context().clone();
            let tt = GaloisRingElement::from_int(&c4, t);
            let dd = GaloisRingElement::from_int(&c4, d);
            prop_assert_eq!(&a * &(&tt - &a), dd);
            prop_assert_eq!(a.truncate(1), tt.truncate(1));
        }

        #[test]
        fn trace_det_ell_are_conjugation_invariant(
            h in prop::array::uniform4(-20i128..20),
            g in prop::array::uniform4(-20i128..20),
        ) {
            let c = ctx(2, 1, 24);
            let hm = LocalMatrix::from_ints(&c, 0, h);
            let gm = LocalMatrix::from_ints(&c, 0, g);
            prop_assume!(hm.is_ok() && gm.is_ok());
            let (hm, gm) = (hm.unwrap(), gm.unwrap());
            prop_assume!(hm.det_valuation().is_ok() && gm.det_valuation().is_ok());
            prop_assume!(hm.det_valuation().unwrap() <= 3);
            let conj = gm.conjugate_by(&hm).unwrap();
            prop_assert_eq!(conj.det_valuation().unwrap(), gm.det_valuation().unwrap());
            if let Ok(Some(vt)) = gm.trace_valuation() {
                prop_assert_eq!(conj.trace_valuation_info().below(10, "tr").unwrap(), Some(vt).filter(|v| *v < 10));
                if vt == 0 && gm.det_valuation().unwrap() >= 1 {
                    let l = gm.ell_of().unwrap();
                    let lc = conj.ell_below(6).unwrap();
                    prop_assert_eq!(lc, l.finite().filter(|v| *v < 6));
                }
            }
        }

        #[test]
        fn k_is_invariant_under_integral_conjugation(
            h in prop::array::uniform4(-20i128..20),
            g in prop::array::uniform4(-20i128..20),
            e in -3i64..3,
        ) {
            let c = ctx(3, 1, 24);
            let h = LocalMatrix::from_ints(&c, 0, h);
            let g = LocalMatrix::from_ints(&c, e, g);
            prop_assume!(h.is_ok() && g.is_ok());
            let (h, g) = (h.unwrap(), g.unwrap());
            prop_assume!(h.det_valuation() == Ok(0) && g.det_valuation().is_ok());
            prop_assert_eq!(g.conjugate_by(&h).unwrap().k_of(), g.k_of());
        }
    }
}
