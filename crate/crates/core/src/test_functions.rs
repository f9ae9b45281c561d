//! The explicit level-`p^n` test functions, their `t`-deformation, and the orbital constants.

use std::sync::Arc;

use num::{BigInt, BigRational, One, Zero};
use serde::Serialize;

use crate::cyclotomic::CyclotomicValue;
use crate::error::{domain, Result};
use crate::padic::{ExtendedNat, GaloisRingElement, LocalMatrix, RationalFunctionT};
use crate::rep::{ClassFunction, PointKind};

/// Conjugation-invariant data of a semisimple `γ` consulted by the orbital constants.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GammaInvariants {
    pub v_det: i64,
    /// `None` when the trace is zero.
    pub v_tr: Option<i64>,
    /// Present iff `v_tr = 0` and `v_det >= 1`.
    pub ell: Option<ExtendedNat>,
    /// Unit eigenvalue modulo `p^n`, present iff `ell` is.
    pub t2_residue: Option<GaloisRingElement>,
}

impl GammaInvariants {
    /// Reads the invariants off `γ`; `n` is the level for the unit-eigenvalue residue.
    pub fn of(gamma: &LocalMatrix, n: u32) -> Result<Self> {
        let v_det = gamma.det_valuation()?;
        let v_tr = gamma.trace_valuation()?;
        let (ell, t2_residue) = if v_tr == Some(0) && v_det >= 1 {
            (Some(gamma.ell_of()?), Some(gamma.unit_eigenvalue(n)?))
        } else {
            (None, None)
        };
        Ok(GammaInvariants { v_det, v_tr, ell, t2_residue })
    }

    /// `v_tr >= 1`, counting a zero trace.
    pub fn trace_non_unit(&self) -> bool {
        self.v_tr.is_none_or(|v| v >= 1)
    }
}

/// Which clause of the level-`n` definition applies to `g`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "branch", rename_all = "snake_case")]
pub enum PhiBranch {
    OffSupport,
    /// `v_p(tr g) >= 1`.
    TraceNonUnit {
        k: i64,
    },
    /// `ℓ(g) < n - k(g)`.
    EllBelow {
        k: i64,
        ell: u32,
    },
    /// `ℓ(g) >= n - k(g)`, including `ℓ = ∞`.
    EllAtLeast {
        k: i64,
    },
}

/// Determines the branch of `φ_{p,n}` at `g`.
pub fn phi_branch(g: &LocalMatrix, n: u32) -> Result<PhiBranch> {
    let k = g.k_of();
    if k > i64::from(n) - 1 {
        return Ok(PhiBranch::OffSupport);
    }
    if g.det_valuation_info().below(2, "det")? != Some(1) {
        return Ok(PhiBranch::OffSupport);
    }
    match g.trace_valuation_info().below(1, "trace")? {
        Some(v) if v < 0 => Ok(PhiBranch::OffSupport),
        Some(_) => {
            let bound = (i64::from(n) - k) as u32;
            Ok(match g.ell_below(bound)? {
                Some(ell) => PhiBranch::EllBelow { k, ell },
                None => PhiBranch::EllAtLeast { k },
            })
        }
        None => Ok(PhiBranch::TraceNonUnit { k }),
    }
}

fn int(v: BigInt) -> BigRational {
    BigRational::from_integer(v)
}

fn qpow(q: u64, e: u32) -> BigInt {
    BigInt::from(q).pow(e)
}

/// `1/(q-1)` on `GL_2(Z_q) diag(p,1) GL_2(Z_q)`, zero elsewhere.
pub fn phi_p0(g: &LocalMatrix) -> Result<BigRational> {
    let q = g.context().q();
    if g.exponent() == 0 && g.det_valuation_info().below(2, "det")? == Some(1) {
        Ok(BigRational::new(BigInt::one(), BigInt::from(q - 1)))
    } else {
        Ok(BigRational::zero())
    }
}

/// Value of `φ_{p,n}` on a branch.
pub fn phi_pn_value(branch: PhiBranch, q: u64, n: u32) -> BigRational {
    let q_big = BigInt::from(q);
    match branch {
        PhiBranch::OffSupport => BigRational::zero(),
        PhiBranch::TraceNonUnit { .. } => int(-BigInt::one() - q_big),
        PhiBranch::EllBelow { ell, .. } => int(BigInt::one() - qpow(q, 2 * ell)),
        PhiBranch::EllAtLeast { k } => int(BigInt::one() + qpow(q, 2 * (n - k as u32) - 1)),
    }
}

/// `φ_{p,n}(g)`.
pub fn phi_pn(g: &LocalMatrix, n: u32) -> Result<BigRational> {
    Ok(phi_pn_value(phi_branch(g, n)?, g.context().q(), n))
}

/// Value of the deformation `φ_{p,n,t}` on a branch.
pub fn phi_pnt_value(branch: PhiBranch, q: u64, n: u32) -> RationalFunctionT {
    let qi = q as i64;
    let r = |v: i64| BigRational::from_integer(BigInt::from(v));
    match branch {
        PhiBranch::OffSupport => RationalFunctionT::zero(qi),
        // -q(1 - t²)/(q - t²)
        PhiBranch::TraceNonUnit { .. } => RationalFunctionT::new(qi, vec![r(-qi), r(0), r(qi)], 1),
        PhiBranch::EllBelow { ell, .. } => &RationalFunctionT::from_int(qi, 1) - &RationalFunctionT::t_pow(qi, 2 * ell),
        // 1 - (q-1) t^{2(n-k)} / (q - t²)
        PhiBranch::EllAtLeast { k } => {
            let m = 2 * (n - k as u32);
            let frac = &RationalFunctionT::t_pow(qi, m).scale(&r(qi - 1)) * &RationalFunctionT::inv_base_pow(qi, 1);
            &RationalFunctionT::from_int(qi, 1) - &frac
        }
    }
}

/// `φ_{p,n,t}(g)`.
pub fn phi_pnt(g: &LocalMatrix, n: u32) -> Result<RationalFunctionT> {
    Ok(phi_pnt_value(phi_branch(g, n)?, g.context().q(), n))
}

/// Closed form of the orbital constant `c(γ)` at level `n`.
pub fn c_closed(inv: &GammaInvariants, n: u32, q: u64) -> BigInt {
    if inv.v_det != 1 {
        return BigInt::zero();
    }
    if inv.trace_non_unit() {
        return (BigInt::one() + q) * (BigInt::one() - qpow(q, n));
    }
    if inv.v_tr == Some(0) && inv.ell.is_some_and(|l| l.at_least(i64::from(n))) {
        return qpow(q, 2 * n) - qpow(q, 2 * n - 2);
    }
    BigInt::zero()
}

/// The character-theoretic constant `c_r(γ, h)` for `h` a class function on `GL_2(Z/p^n)`.
pub fn c_r_char(inv: &GammaInvariants, h: &ClassFunction, r: u32) -> Result<CyclotomicValue> {
    let group = Arc::clone(h.group());
    let field = group.field();
    if inv.v_det != i64::from(r) || inv.v_tr.is_some_and(|v| v < 0) {
        return Ok(CyclotomicValue::zero(field));
    }
    let kind = if inv.trace_non_unit() {
        PointKind::Supersingular
    } else {
        let t2 = inv.t2_residue.as_ref().ok_or_else(|| domain("unit trace without a unit eigenvalue"))?;
        let ctx = t2.context();
        if ctx.p() != group.p() || ctx.precision() != group.n() || !t2.in_prime_subring() {
            return Err(domain(format!("eigenvalue {t2:?} does not live in Z/{}^{}", group.p(), group.n())));
        }
        PointKind::Ordinary { a: t2.coeffs()[0] }
    };
    group.ss_trace_point(kind, h, r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::LocalContext;
    use crate::rep::ClassGroup;

    fn rat(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn phi_p0_examples() {
        let c2 = LocalContext::new(2, 1, 8).unwrap();
        assert_eq!(phi_p0(&LocalMatrix::diag(&c2, 2, 1).unwrap()).unwrap(), rat(1, 1));
        assert_eq!(phi_p0(&LocalMatrix::diag(&c2, 2, 2).unwrap()).unwrap(), rat(0, 1));
        let c3 = LocalContext::new(3, 1, 8).unwrap();
        assert_eq!(phi_p0(&LocalMatrix::from_ints(&c3, 0, [0, 1, -3, 0]).unwrap()).unwrap(), rat(1, 2));
    }

    #[test]
    fn phi_pn_examples() {
        let c = LocalContext::new(2, 1, 8).unwrap();
        assert_eq!(phi_pn(&LocalMatrix::diag(&c, 2, 1).unwrap(), 1).unwrap(), rat(3, 1));
        assert_eq!(phi_pn(&LocalMatrix::from_ints(&c, 0, [0, 1, -2, 0]).unwrap(), 1).unwrap(), rat(-3, 1));
        assert_eq!(phi_pn(&LocalMatrix::from_ints(&c, -1, [1, 0, 0, 8]).unwrap(), 1).unwrap(), rat(0, 1));
        // ℓ = 1 < n - k = 2 at level 2
        assert_eq!(phi_pn(&LocalMatrix::diag(&c, 2, 3).unwrap(), 2).unwrap(), rat(1 - 4, 1));
    }

    #[test]
    fn phi_pnt_examples() {
        let c = LocalContext::new(2, 1, 8).unwrap();
        let f = phi_pnt(&LocalMatrix::diag(&c, 2, 1).unwrap(), 1).unwrap();
        assert_eq!(f.to_string(), "(2 - 2*t^2)/(2 - t^2)");
        assert_eq!(f.at_q(), rat(3, 1));
        let f = phi_pnt(&LocalMatrix::from_ints(&c, 0, [0, 1, -2, 0]).unwrap(), 1).unwrap();
        assert_eq!(f.at_q(), rat(-3, 1));
        assert!(phi_pnt(&LocalMatrix::diag(&c, 4, 1).unwrap(), 1).unwrap().is_zero());
    }

    fn invariants(v_det: i64, v_tr: Option<i64>, ell: Option<ExtendedNat>) -> GammaInvariants {
        GammaInvariants { v_det, v_tr, ell, t2_residue: None }
    }

    #[test]
    fn c_closed_examples() {
        use ExtendedNat::*;
        assert_eq!(c_closed(&invariants(1, Some(1), None), 1, 2), BigInt::from(-3));
        assert_eq!(c_closed(&invariants(1, Some(0), Some(Finite(1))), 1, 2), BigInt::from(3));
        assert_eq!(c_closed(&invariants(1, Some(0), Some(Finite(1))), 2, 2), BigInt::from(0));
        assert_eq!(c_closed(&invariants(1, None, None), 2, 3), BigInt::from(4 * -8));
        assert_eq!(c_closed(&invariants(2, Some(1), None), 1, 2), BigInt::from(0));
    }

    #[test]
    fn c_r_char_examples() {
        let g = ClassGroup::new(2, 1).unwrap();
        let e = g.identity_delta();
        let c = LocalContext::new(2, 1, 8).unwrap();
        let ss = GammaInvariants::of(&LocalMatrix::from_ints(&c, 0, [0, 1, -2, 0]).unwrap(), 1).unwrap();
        assert_eq!(c_r_char(&ss, &e, 1).unwrap().as_integer(), Some(-3));
        let ord = GammaInvariants::of(&LocalMatrix::diag(&c, 2, 1).unwrap(), 1).unwrap();
        assert_eq!(c_r_char(&ord, &e, 1).unwrap().as_integer(), Some(3));
        let far = GammaInvariants::of(&LocalMatrix::diag(&c, 4, 1).unwrap(), 1).unwrap();
        assert_eq!(c_r_char(&far, &e, 1).unwrap().as_integer(), Some(0));
    }
}
