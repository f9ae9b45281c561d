//! Checked integer arithmetic in `Z[x]/f(x)`, used to certify vanishing.
//!
//! Every operation returns `None` on `i128` overflow; callers then fall
//! back to residue arithmetic.

use super::context::{LocalContext, MAX_DEGREE};

pub(crate) type ExactPoly = [i128; MAX_DEGREE];

pub(crate) fn constant(v: i128) -> ExactPoly {
    let mut c = [0; MAX_DEGREE];
    c[0] = v;
    c
}

pub(crate) fn add(a: &ExactPoly, b: &ExactPoly) -> Option<ExactPoly> {
    let mut out = [0; MAX_DEGREE];
    for i in 0..MAX_DEGREE {
        out[i] = a[i].checked_add(b[i])?;
    }
    Some(out)
}

pub(crate) fn sub(a: &ExactPoly, b: &ExactPoly) -> Option<ExactPoly> {
    let mut out = [0; MAX_DEGREE];
    for i in 0..MAX_DEGREE {
        out[i] = a[i].checked_sub(b[i])?;
    }
    Some(out)
}

pub(crate) fn neg(a: &ExactPoly) -> Option<ExactPoly> {
    sub(&[0; MAX_DEGREE], a)
}

pub(crate) fn scale(a: &ExactPoly, k: i128) -> Option<ExactPoly> {
    let mut out = [0; MAX_DEGREE];
    for i in 0..MAX_DEGREE {
        out[i] = a[i].checked_mul(k)?;
    }
    Some(out)
}

pub(crate) fn mul(ctx: &LocalContext, a: &ExactPoly, b: &ExactPoly) -> Option<ExactPoly> {
    let r = ctx.r();
    let f = ctx.defining_poly();
    let mut prod = [0i128; 2 * MAX_DEGREE - 1];
    for i in 0..r {
        for j in 0..r {
            prod[i + j] = prod[i + j].checked_add(a[i].checked_mul(b[j])?)?;
        }
    }
    for k in (r..2 * r - 1).rev() {
        let t = prod[k];
        prod[k] = 0;
        for i in 0..r {
            prod[k - r + i] = prod[k - r + i].checked_sub(t.checked_mul(f[i] as i128)?)?;
        }
    }
    let mut out = [0; MAX_DEGREE];
    out[..r].copy_from_slice(&prod[..r]);
    Some(out)
}

pub(crate) fn p_adic_valuation(a: &ExactPoly, p: u64) -> Option<u32> {
    let p = p as i128;
    a.iter()
        .filter(|&&c| c != 0)
        .map(|&c| {
            let mut c = c;
            let mut v = 0;
            while c % p == 0 {
                c /= p;
                v += 1;
            }
            v
        })
        .min()
}

pub(crate) fn div_exact(a: &ExactPoly, d: i128) -> ExactPoly {
    let mut out = [0; MAX_DEGREE];
    for i in 0..MAX_DEGREE {
        debug_assert_eq!(a[i] % d, 0);
        out[i] = a[i] / d;
    }
    out
}

pub(crate) fn checked_p_pow(p: u64, k: u32) -> Option<i128> {
    (p as i128).checked_pow(k)
}

pub(crate) fn to_raw(ctx: &LocalContext, a: &ExactPoly) -> super::context::Coeffs {
    let m = ctx.modulus() as i128;
    let mut out = [0u64; MAX_DEGREE];
    for i in 0..ctx.r() {
        out[i] = a[i].rem_euclid(m) as u64;
    }
    out
}

pub(crate) fn in_prime_subring(a: &ExactPoly) -> bool {
    a[1..].iter().all(|&c| c == 0)
}
