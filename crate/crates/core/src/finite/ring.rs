use std::fmt;

use crate::error::{check_cap, Error, Result};
use crate::padic::{is_prime, GaloisRingElement, LocalContext};

/// Index of an element in a [`FiniteRing`].
pub type Elem = u16;

/// Largest ring handled by the table representation.
pub const MAX_RING_SIZE: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RingKind {
    /// `GR(p^n, r)`; element indices are `Σ c_i (p^n)^i`.
    Galois { p: u64, r: usize, n: u32 },
    /// `Z/m`; element indices are the residues.
    Integers { m: u64 },
}

/// A finite commutative ring given by operation tables.
pub struct FiniteRing {
    kind: RingKind,
    size: usize,
    add: Vec<Elem>,
    mul: Vec<Elem>,
    neg: Vec<Elem>,
    inv: Vec<Option<Elem>>,
    frob: Vec<Elem>,
    units: Vec<Elem>,
    ctx: Option<std::sync::Arc<LocalContext>>,
}

impl fmt::Debug for FiniteRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FiniteRing({:?})", self.kind)
    }
}

impl FiniteRing {
    pub fn galois(p: u64, r: usize, n: u32) -> Result<Self> {
        let ctx = LocalContext::new(p, r, n)?;
        let base = ctx.modulus();
        let size = u128::from(base).pow(r as u32);
        check_cap("Galois ring elements", size)?;
        if size > MAX_RING_SIZE as u128 {
            return Err(Error::ResourceLimit {
                what: "Galois ring table".into(),
                needed: size,
                cap: MAX_RING_SIZE as u128,
            });
        }
        let size = size as usize;
        let elems: Vec<GaloisRingElement> = (0..size)
            .map(|idx| {
                let mut cs = Vec::with_capacity(r);
                let mut t = idx as u64;
                for _ in 0..r {
                    cs.push((t % base) as i128);
                    t /= base;
                }
                GaloisRingElement::from_coeffs(&ctx, &cs).expect("r coefficients")
            })
            .collect();
        let index_of =
            |x: &GaloisRingElement| -> Elem { x.coeffs().iter().rev().fold(0u64, |acc, &c| acc * base + c) as Elem };
        let mut add = vec![0; size * size];
        let mut mul = vec![0; size * size];
        for i in 0..size {
            for j in i..size {
                let s = index_of(&(&elems[i] + &elems[j]));
                let m = index_of(&(&elems[i] * &elems[j]));
                add[i * size + j] = s;
                add[j * size + i] = s;
                mul[i * size + j] = m;
                mul[j * size + i] = m;
            }
        }
        let neg = elems.iter().map(|x| index_of(&-x)).collect();
        let inv = elems.iter().map(|x| x.inverse().ok().map(|y| index_of(&y))).collect();
        let frob = elems.iter().map(|x| index_of(&x.frobenius())).collect();
        Ok(Self::finish(RingKind::Galois { p, r, n }, size, add, mul, neg, inv, frob, Some(ctx)))
    }

    pub fn integers(m: u64) -> Result<Self> {
        if m < 2 || m as usize > MAX_RING_SIZE {
            return Err(Error::InvalidInput(format!("modulus {m} outside 2..={MAX_RING_SIZE}")));
        }
        let size = m as usize;
        let mut add = vec![0; size * size];
        let mut mul = vec![0; size * size];
        for i in 0..size {
            for j in 0..size {
                add[i * size + j] = ((i + j) % size) as Elem;
                mul[i * size + j] = ((i * j) % size) as Elem;
            }
        }
        let neg = (0..size).map(|i| ((size - i) % size) as Elem).collect();
        let inv = (0..size).map(|i| (0..size).find(|&j| (i * j) % size == 1 % size).map(|j| j as Elem)).collect();
        let frob = (0..size as Elem).collect();
        Ok(Self::finish(RingKind::Integers { m }, size, add, mul, neg, inv, frob, None))
    }

    /// `Z/p^n` as the degree-one Galois ring, so that matrices embed into `GR(p^n, r)`.
    pub fn prime_power(p: u64, n: u32) -> Result<Self> {
        Self::galois(p, 1, n)
    }

    #[allow(clippy::too_many_arguments)]
    fn finish(
        kind: RingKind,
        size: usize,
        add: Vec<Elem>,
        mul: Vec<Elem>,
        neg: Vec<Elem>,
        inv: Vec<Option<Elem>>,
        frob: Vec<Elem>,
        ctx: Option<std::sync::Arc<LocalContext>>,
    ) -> Self {
        let units = (0..size).filter(|&i| inv[i].is_some()).map(|i| i as Elem).collect();
        FiniteRing { kind, size, add, mul, neg, inv, frob, units, ctx }
    }

    pub fn kind(&self) -> RingKind {
        self.kind
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn zero(&self) -> Elem {
        0
    }

    pub fn one(&self) -> Elem {
        1
    }

    /// The Galois-ring context behind this table, if any.
    pub fn context(&self) -> Option<&std::sync::Arc<LocalContext>> {
        self.ctx.as_ref()
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        self.add[a as usize * self.size + b as usize]
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        self.mul[a as usize * self.size + b as usize]
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        self.neg[a as usize]
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn inv(&self, a: Elem) -> Option<Elem> {
        self.inv[a as usize]
    }

    #[inline]
    pub fn is_unit(&self, a: Elem) -> bool {
        self.inv[a as usize].is_some()
    }

    #[inline]
    pub fn frobenius(&self, a: Elem) -> Elem {
        self.frob[a as usize]
    }

    pub fn units(&self) -> &[Elem] {
        &self.units
    }

    pub fn pow(&self, a: Elem, mut e: u64) -> Elem {
        let mut base = a;
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// The image of an integer.
    pub fn from_int(&self, v: i64) -> Elem {
        let m = match self.kind {
            RingKind::Galois { p, n, .. } => p.pow(n),
            RingKind::Integers { m } => m,
        };
        v.rem_euclid(m as i64) as Elem
    }

    /// Additive generators: `1, x, …, x^{r-1}` for Galois rings, `1` for `Z/m`.
    pub fn additive_generators(&self) -> Vec<Elem> {
        match self.kind {
            RingKind::Galois { p, r, n } => {
                let base = p.pow(n);
                (0..r).map(|i| base.pow(i as u32) as Elem).collect()
            }
            RingKind::Integers { .. } => vec![1],
        }
    }

    /// A small generating set of the unit group, chosen greedily in index order.
    pub fn unit_generators(&self) -> Vec<Elem> {
        let mut in_group = vec![false; self.size];
        in_group[1] = true;
        let mut members = vec![self.one()];
        let mut gens = Vec::new();
        for &u in &self.units {
            if in_group[u as usize] {
                continue;
            }
            gens.push(u);
            let mut frontier = members.clone();
            while let Some(x) = frontier.pop() {
                for &g in &gens {
                    let y = self.mul(x, g);
                    if !in_group[y as usize] {
                        in_group[y as usize] = true;
                        members.push(y);
                        frontier.push(y);
                    }
                }
            }
        }
        gens
    }

    /// The residue characteristic when the ring is local.
    pub fn residue_prime(&self) -> Option<u64> {
        match self.kind {
            RingKind::Galois { p, .. } => Some(p),
            RingKind::Integers { m } => {
                let p = (2..=m).find(|d| m % d == 0)?;
                let mut t = m;
                while t % p == 0 {
                    t /= p;
                }
                (t == 1 && is_prime(p)).then_some(p)
            }
        }
    }

    pub fn format(&self, a: Elem) -> String {
        match self.kind {
            RingKind::Galois { p, r, n } if r > 1 => {
                let base = p.pow(n);
                let mut t = a as u64;
                let cs: Vec<String> = (0..r)
                    .map(|_| {
                        let c = t % base;
                        t /= base;
                        c.to_string()
                    })
                    .collect();
                format!("({})", cs.join(","))
            }
            _ => a.to_string(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_counts() {
        assert_eq!(FiniteRing::galois(2, 2, 2).unwrap().units().len(), 12);
        assert_eq!(FiniteRing::galois(3, 2, 1).unwrap().units().len(), 8);
        assert_eq!(FiniteRing::integers(21).unwrap().units().len(), 12);
        assert_eq!(FiniteRing::prime_power(3, 2).unwrap().units().len(), 6);
    }

    #[test]
    fn unit_generators_generate() {
        for ring in
            [FiniteRing::integers(8).unwrap(), FiniteRing::galois(2, 2, 2).unwrap(), FiniteRing::integers(15).unwrap()]
        {
            let gens = ring.unit_generators();
            let mut seen = std::collections::BTreeSet::from([ring.one()]);
            let mut stack = vec![ring.one()];
            while let Some(x) = stack.pop() {
                for &g in &gens {
                    let y = ring.mul(x, g);
                    if seen.insert(y) {
                        stack.push(y);
                    }
                }
            }
            assert_eq!(seen.len(), ring.units().len());
        }
    }

    #[test]
    fn frobenius_table_is_an_automorphism() {
        let ring = FiniteRing::galois(2, 2, 2).unwrap();
        for a in 0..16 {
            for b in 0..16 {
                assert_eq!(ring.frobenius(ring.mul(a, b)), ring.mul(ring.frobenius(a), ring.frobenius(b)));
            }
            assert_eq!(ring.frobenius(ring.frobenius(a)), a);
        }
        assert_eq!(ring.residue_prime(), Some(2));
        assert_eq!(FiniteRing::integers(15).unwrap().residue_prime(), None);
    }
}
