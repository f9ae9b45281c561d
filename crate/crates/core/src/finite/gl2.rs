use std::collections::HashMap;
use std::sync::Arc;

use super::ring::{Elem, FiniteRing, RingKind};
use crate::error::{check_cap, Result};

/// A 2×2 matrix over a [`FiniteRing`], row-major.
pub type Mat = [Elem; 4];

/// Dense index tables are used while `size^4` stays below this bound.
const DENSE_LIMIT: usize = 1 << 24;

enum Lookup {
    Dense(Vec<u32>),
    Sparse(HashMap<Mat, u32>),
}

/// A partition of a group into orbits, with canonical (least-index) representatives.
#[derive(Clone, Debug)]
pub struct Classes {
    /// Orbit number of each element.
    pub class_of: Vec<u32>,
    /// Least element index in each orbit, in increasing order.
    pub reps: Vec<u32>,
    pub sizes: Vec<usize>,
}

impl Classes {
    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }
}

/// `GL_2` of a finite ring with its elements enumerated in index order.
pub struct FiniteGl2 {
    ring: Arc<FiniteRing>,
    elements: Vec<Mat>,
    lookup: Lookup,
    generators: Vec<Mat>,
}

impl FiniteGl2 {
    pub fn new(ring: Arc<FiniteRing>) -> Result<Self> {
        let s = ring.size();
        let cube = (s as u128).pow(4);
        check_cap("GL2 candidate matrices", cube)?;
        let mut elements = Vec::new();
        for a in 0..s as Elem {
            for b in 0..s as Elem {
                for c in 0..s as Elem {
                    let bc = ring.mul(b, c);
                    for d in 0..s as Elem {
                        if ring.is_unit(ring.sub(ring.mul(a, d), bc)) {
                            elements.push([a, b, c, d]);
                        }
                    }
                }
            }
        }
        let lookup = if (s as u128).pow(4) <= DENSE_LIMIT as u128 {
            let mut t = vec![u32::MAX; s.pow(4)];
            for (i, m) in elements.iter().enumerate() {
                t[pack(m, s)] = i as u32;
            }
            Lookup::Dense(t)
        } else {
            Lookup::Sparse(elements.iter().enumerate().map(|(i, m)| (*m, i as u32)).collect())
        };
        let generators = Self::standard_generators(&ring);
        Ok(FiniteGl2 { ring, elements, lookup, generators })
    }

    fn standard_generators(ring: &FiniteRing) -> Vec<Mat> {
        let (z, one) = (ring.zero(), ring.one());
        let mut gens = Vec::new();
        for t in ring.additive_generators() {
            gens.push([one, t, z, one]);
            gens.push([one, z, t, one]);
        }
        for u in ring.unit_generators() {
            gens.push([u, z, z, one]);
        }
        gens.push([z, one, ring.neg(one), z]);
        gens
    }

    pub fn ring(&self) -> &Arc<FiniteRing> {
        &self.ring
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Mat] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> Mat {
        self.elements[i]
    }

    /// Transvections, diagonal unit generators and the Weyl element.
    pub fn generators(&self) -> &[Mat] {
        &self.generators
    }

    pub fn index_of(&self, m: &Mat) -> Option<usize> {
        match &self.lookup {
            Lookup::Dense(t) => {
                let i = t[pack(m, self.ring.size())];
                (i != u32::MAX).then_some(i as usize)
            }
            Lookup::Sparse(h) => h.get(m).map(|&i| i as usize),
        }
    }

    pub fn identity(&self) -> Mat {
        [self.ring.one(), self.ring.zero(), self.ring.zero(), self.ring.one()]
    }

    pub fn mul(&self, x: &Mat, y: &Mat) -> Mat {
        let r = &*self.ring;
        [
            r.add(r.mul(x[0], y[0]), r.mul(x[1], y[2])),
            r.add(r.mul(x[0], y[1]), r.mul(x[1], y[3])),
            r.add(r.mul(x[2], y[0]), r.mul(x[3], y[2])),
            r.add(r.mul(x[2], y[1]), r.mul(x[3], y[3])),
        ]
    }

    pub fn det(&self, x: &Mat) -> Elem {
        let r = &*self.ring;
        r.sub(r.mul(x[0], x[3]), r.mul(x[1], x[2]))
    }

    pub fn trace(&self, x: &Mat) -> Elem {
        self.ring.add(x[0], x[3])
    }

    pub fn inv(&self, x: &Mat) -> Mat {
        let r = &*self.ring;
        let u = r.inv(self.det(x)).expect("element of GL2");
        [r.mul(u, x[3]), r.mul(u, r.neg(x[1])), r.mul(u, r.neg(x[2])), r.mul(u, x[0])]
    }

    pub fn frobenius(&self, x: &Mat) -> Mat {
        x.map(|e| self.ring.frobenius(e))
    }

    /// Degree of the ring over its prime subring.
    pub fn degree(&self) -> usize {
        match self.ring.kind() {
            RingKind::Galois { r, .. } => r,
            RingKind::Integers { .. } => 1,
        }
    }

    /// `δ σ(δ) ⋯ σ^{r-1}(δ)`.
    pub fn norm_map(&self, x: &Mat) -> Mat {
        let mut acc = *x;
        let mut cur = *x;
        for _ in 1..self.degree() {
            cur = self.frobenius(&cur);
            acc = self.mul(&acc, &cur);
        }
        acc
    }

    /// `g⁻¹ x g`.
    pub fn conj(&self, g: &Mat, x: &Mat) -> Mat {
        self.mul(&self.mul(&self.inv(g), x), g)
    }

    /// `g⁻¹ x σ(g)`.
    pub fn sigma_conj(&self, g: &Mat, x: &Mat) -> Mat {
        self.mul(&self.mul(&self.inv(g), x), &self.frobenius(g))
    }

    fn orbits(&self, act: impl Fn(&Mat, &Mat) -> Mat) -> Classes {
        let n = self.order();
        let mut class_of = vec![u32::MAX; n];
        let mut reps = Vec::new();
        let mut sizes = Vec::new();
        let mut stack = Vec::new();
        for start in 0..n {
            if class_of[start] != u32::MAX {
                continue;
            }
            let id = reps.len() as u32;
            reps.push(start as u32);
            class_of[start] = id;
            stack.push(start);
            let mut size = 0;
            while let Some(i) = stack.pop() {
                size += 1;
                let x = self.elements[i];
                for g in &self.generators {
                    let y = act(g, &x);
                    let j = self.index_of(&y).expect("closed under the action");
                    if class_of[j] == u32::MAX {
                        class_of[j] = id;
                        stack.push(j);
                    }
                }
            }
            sizes.push(size);
        }
        Classes { class_of, reps, sizes }
    }

    /// Ordinary conjugacy classes.
    pub fn conjugacy_classes(&self) -> Classes {
        self.orbits(|g, x| self.conj(g, x))
    }

    /// Orbits of `δ ↦ g⁻¹ δ σ(g)`.
    pub fn sigma_classes(&self) -> Classes {
        self.orbits(|g, x| self.sigma_conj(g, x))
    }

    /// `#{g : g x = x g}` by direct enumeration.
    pub fn centralizer_order(&self, x: &Mat) -> usize {
        self.elements.iter().filter(|g| self.mul(g, x) == self.mul(x, g)).count()
    }

    /// `#{g : g⁻¹ x σ(g) = x}` by direct enumeration.
    pub fn twisted_centralizer_order(&self, x: &Mat) -> usize {
        self.elements.iter().filter(|g| self.mul(x, &self.frobenius(g)) == self.mul(g, x)).count()
    }

    pub fn format(&self, x: &Mat) -> String {
        let f = |e: Elem| self.ring.format(e);
        format!("[[{},{}],[{},{}]]", f(x[0]), f(x[1]), f(x[2]), f(x[3]))
    }
}

fn pack(m: &Mat, s: usize) -> usize {
    ((m[0] as usize * s + m[1] as usize) * s + m[2] as usize) * s + m[3] as usize
}

/// `|GL_2(Z/p^n)| = p^{4(n-1)} (p² - 1)(p² - p)`, generalised to `GR(p^n, r)` with `q = p^r`.
pub fn gl2_order(q: u128, n: u32) -> u128 {
    q.pow(4 * (n - 1)) * (q * q - 1) * (q * q - q)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn group(ring: FiniteRing) -> FiniteGl2 {
        FiniteGl2::new(Arc::new(ring)).unwrap()
    }

    #[test]
    fn orders_match_the_formula() {
        assert_eq!(group(FiniteRing::prime_power(2, 1).unwrap()).order() as u128, gl2_order(2, 1));
        assert_eq!(group(FiniteRing::prime_power(2, 2).unwrap()).order() as u128, gl2_order(2, 2));
        assert_eq!(group(FiniteRing::prime_power(3, 2).unwrap()).order() as u128, gl2_order(3, 2));
        assert_eq!(group(FiniteRing::galois(2, 2, 1).unwrap()).order() as u128, gl2_order(4, 1));
        assert_eq!(group(FiniteRing::integers(21).unwrap()).order(), 48 * 2016);
    }

    #[test]
    fn class_counts_of_small_groups() {
        // GL2(F_q) has q² - 1 classes.
        assert_eq!(group(FiniteRing::prime_power(2, 1).unwrap()).conjugacy_classes().len(), 3);
        assert_eq!(group(FiniteRing::prime_power(3, 1).unwrap()).conjugacy_classes().len(), 8);
        assert_eq!(group(FiniteRing::galois(2, 2, 1).unwrap()).conjugacy_classes().len(), 15);
    }

    #[test]
    fn orbit_stabilizer_for_conjugation() {
        let g = group(FiniteRing::prime_power(2, 2).unwrap());
        let classes = g.conjugacy_classes();
        assert_eq!(classes.sizes.iter().sum::<usize>(), g.order());
        for (&rep, &size) in classes.reps.iter().zip(&classes.sizes) {
            assert_eq!(size * g.centralizer_order(&g.element(rep as usize)), g.order());
        }
    }
}
