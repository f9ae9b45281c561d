//! Principal-series characters of `GL_2(Z/p^n)`, the Steinberg character, and the
//! permutation module on surjections `(Z/p^n)² → Z/p^n`.

use std::sync::Arc;

use num::{BigInt, BigRational};
use serde::Serialize;

use crate::cyclotomic::{CyclotomicField, CyclotomicValue};
use crate::error::{domain, Error, Result};
use crate::finite::{Classes, Elem, FiniteGl2, FiniteRing, Mat};
use crate::padic::is_prime;

/// A character of `(Z/p^n)^×`, given by exponents on the cyclic generators.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct UnitCharacter {
    pub exps: Vec<u32>,
}

impl UnitCharacter {
    pub fn is_trivial(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }
}

/// `(Z/p^n)^×` as a product of cyclic groups: `⟨g⟩` for odd `p`, `⟨-1⟩ × ⟨5⟩` for `p = 2`.
#[derive(Clone, Debug)]
pub struct UnitGroup {
    modulus: u64,
    /// `(generator, order)` pairs.
    factors: Vec<(u64, u32)>,
    /// `φ(p^n)`, a multiple of every character order.
    exponent_m: u32,
    dlog: Vec<Option<Vec<u32>>>,
}

fn mult_order(g: u64, m: u64) -> u64 {
    let mut x = g % m;
    let mut k = 1;
    while x != 1 % m {
        x = x * g % m;
        k += 1;
    }
    k
}

impl UnitGroup {
    pub fn new(p: u64, n: u32) -> Result<Self> {
        if !is_prime(p) || n == 0 {
            return Err(Error::InvalidInput(format!("need a prime p and n >= 1, got p={p}, n={n}")));
        }
        let modulus = p.pow(n);
        let phi = modulus / p * (p - 1);
        let factors = if p == 2 {
            match n {
                1 => vec![],
                2 => vec![(3, 2)],
                _ => vec![(modulus - 1, 2), (5, (modulus / 4) as u32)],
            }
        } else {
            let g = (2..modulus).find(|&g| g % p != 0 && mult_order(g, modulus) == phi).expect("cyclic unit group");
            vec![(g, phi as u32)]
        };
        let mut dlog = vec![None; modulus as usize];
        let mut tuples: Vec<(u64, Vec<u32>)> = vec![(1 % modulus, vec![])];
        for &(g, ord) in &factors {
            let mut next = Vec::new();
            for (x, e) in &tuples {
                let mut y = *x;
                for k in 0..ord {
                    let mut e2 = e.clone();
                    e2.push(k);
                    next.push((y, e2));
                    y = y * g % modulus;
                }
            }
            tuples = next;
        }
        for (x, e) in tuples {
            debug_assert!(dlog[x as usize].is_none(), "product decomposition is direct");
            dlog[x as usize] = Some(e);
        }
        Ok(UnitGroup { modulus, factors, exponent_m: phi as u32, dlog })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn order(&self) -> u32 {
        self.exponent_m
    }

    /// The conductor `M` of the cyclotomic field holding all character values.
    pub fn conductor(&self) -> u32 {
        self.exponent_m
    }

    pub fn generators(&self) -> Vec<u64> {
        self.factors.iter().map(|f| f.0).collect()
    }

    pub fn characters(&self) -> Vec<UnitCharacter> {
        let mut out = vec![UnitCharacter { exps: vec![] }];
        for &(_, ord) in &self.factors {
            out = out
                .into_iter()
                .flat_map(|c| {
                    (0..ord).map(move |k| {
                        let mut e = c.exps.clone();
                        e.push(k);
                        UnitCharacter { exps: e }
                    })
                })
                .collect();
        }
        out
    }

    /// `k` with `χ(u) = ζ_M^k`, or `None` if `u` is not a unit.
    pub fn chi_exponent(&self, chi: &UnitCharacter, u: u64) -> Option<u32> {
        let e = self.dlog[(u % self.modulus) as usize].as_ref()?;
        let m = u64::from(self.exponent_m);
        let k = self
            .factors
            .iter()
            .zip(e.iter().zip(&chi.exps))
            .map(|(&(_, ord), (&ei, &ci))| u64::from(ei) * u64::from(ci) % u64::from(ord) * (m / u64::from(ord)))
            .sum::<u64>();
        Some((k % m.max(1)) as u32)
    }
}

/// `GL_2(Z/p^n)` with its conjugacy classes and unit characters.
pub struct ClassGroup {
    p: u64,
    n: u32,
    group: FiniteGl2,
    classes: Classes,
    units: UnitGroup,
    field: Arc<CyclotomicField>,
    /// Per class: number of `x` with `x⁻¹ g x` upper triangular, bucketed by its lower-right entry.
    borel_hist: Vec<Vec<u64>>,
}

/// A class function with cyclotomic values, indexed like [`ClassGroup::classes`].
#[derive(Clone)]
pub struct ClassFunction {
    group: Arc<ClassGroup>,
    values: Vec<CyclotomicValue>,
}

/// Frobenius data at a point of the special fibre.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PointKind {
    /// Ordinary, with unit Frobenius eigenvalue `a mod p^n`.
    Ordinary {
        a: u64,
    },
    Supersingular,
}

impl ClassGroup {
    pub fn new(p: u64, n: u32) -> Result<Arc<Self>> {
        let units = UnitGroup::new(p, n)?;
        let ring = Arc::new(FiniteRing::prime_power(p, n)?);
        let group = FiniteGl2::new(ring)?;
        let classes = group.conjugacy_classes();
        let q = units.modulus() as usize;
        let borel_hist = classes
            .reps
            .iter()
            .map(|&rep| {
                let g = group.element(rep as usize);
                let mut hist = vec![0u64; q];
                for x in group.elements() {
                    let y = group.conj(x, &g);
                    if y[2] == 0 {
                        hist[y[3] as usize] += 1;
                    }
                }
                hist
            })
            .collect();
        let field = CyclotomicField::new(units.conductor());
        Ok(Arc::new(ClassGroup { p, n, group, classes, units, field, borel_hist }))
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn group(&self) -> &FiniteGl2 {
        &self.group
    }

    pub fn classes(&self) -> &Classes {
        &self.classes
    }

    pub fn units(&self) -> &UnitGroup {
        &self.units
    }

    pub fn field(&self) -> &Arc<CyclotomicField> {
        &self.field
    }

    pub fn order(&self) -> usize {
        self.group.order()
    }

    pub fn class_of(&self, g: &Mat) -> Result<usize> {
        let i = self.group.index_of(g).ok_or_else(|| domain("matrix is not invertible"))?;
        Ok(self.classes.class_of[i] as usize)
    }

    pub fn class_rep(&self, c: usize) -> Mat {
        self.group.element(self.classes.reps[c] as usize)
    }

    fn function(self: &Arc<Self>, f: impl Fn(usize, &Mat) -> CyclotomicValue) -> ClassFunction {
        let values = (0..self.classes.len()).map(|c| f(c, &self.class_rep(c))).collect();
        ClassFunction { group: Arc::clone(self), values }
    }

    pub fn trivial(self: &Arc<Self>) -> ClassFunction {
        self.function(|_, _| CyclotomicValue::from_int(&self.field, 1))
    }

    /// The point mass at the identity; pairing with a character returns its degree.
    pub fn identity_delta(self: &Arc<Self>) -> ClassFunction {
        let id = self.class_of(&self.group.identity()).expect("identity");
        self.function(|c, _| CyclotomicValue::from_int(&self.field, i64::from(c == id)))
    }

    /// Indicator function of one conjugacy class.
    pub fn class_indicator(self: &Arc<Self>, class: usize) -> ClassFunction {
        self.function(|c, _| CyclotomicValue::from_int(&self.field, i64::from(c == class)))
    }

    /// `Ind_B^G (1 ⊠ χ)` by the induction formula `|B|⁻¹ Σ_{x : x⁻¹gx ∈ B} χ((x⁻¹gx)_{22})`.
    pub fn induced_character(self: &Arc<Self>, chi: &UnitCharacter) -> ClassFunction {
        let q = self.units.modulus();
        let phi = u64::from(self.units.order());
        let borel = BigInt::from(phi * phi * q);
        self.function(|c, _| {
            let mut counts = vec![0i64; self.field.conductor() as usize];
            for (u, &k) in self.borel_hist[c].iter().enumerate() {
                if k > 0 {
                    let e = self.units.chi_exponent(chi, u as u64).expect("diagonal entry of B is a unit");
                    counts[e as usize] += k as i64;
                }
            }
            CyclotomicValue::from_exponent_counts(&self.field, &counts)
                .scale(&BigRational::new(BigInt::from(1), borel.clone()))
        })
    }

    /// `Ind_B^G 1 - 1`.
    pub fn steinberg(self: &Arc<Self>) -> ClassFunction {
        let triv = UnitCharacter { exps: vec![0; self.units.generators().len()] };
        self.induced_character(&triv).sub(&self.trivial())
    }

    /// `#{f : f g = a f}` over surjective row vectors `f`.
    pub fn drinfeld_fixed_count(&self, g: &Mat, a: u64) -> u64 {
        let ring = self.group.ring();
        let q = self.units.modulus() as Elem;
        let a = ring.from_int(a as i64);
        let mut count = 0;
        for f1 in 0..q {
            for f2 in 0..q {
                if !ring.is_unit(f1) && !ring.is_unit(f2) {
                    continue;
                }
                let x = ring.add(ring.mul(f1, g[0]), ring.mul(f2, g[2]));
                let y = ring.add(ring.mul(f1, g[1]), ring.mul(f2, g[3]));
                if x == ring.mul(a, f1) && y == ring.mul(a, f2) {
                    count += 1;
                }
            }
        }
        count
    }

    /// Permutation character of `GL_2(Z/p^n)` on surjections `(Z/p^n)² → Z/p^n`.
    pub fn drinfeld_character(self: &Arc<Self>) -> ClassFunction {
        self.function(|_, g| CyclotomicValue::from_int(&self.field, self.drinfeld_fixed_count(g, 1) as i64))
    }

    /// `Σ_g h(g) χ(g)`, the trace of `h` on a representation with character `χ`.
    pub fn trace_pairing(&self, h: &ClassFunction, chi: &ClassFunction) -> CyclotomicValue {
        let mut acc = CyclotomicValue::zero(&self.field);
        for (c, &size) in self.classes.sizes.iter().enumerate() {
            if h.values[c].is_zero() {
                continue;
            }
            let term = (&h.values[c] * &chi.values[c]).scale(&BigRational::from_integer(BigInt::from(size)));
            acc = &acc + &term;
        }
        acc
    }

    /// `|G|⁻¹ Σ_g f(g) conj(f'(g))`.
    pub fn inner_product(&self, f: &ClassFunction, g: &ClassFunction) -> CyclotomicValue {
        let conj = ClassFunction { group: Arc::clone(&g.group), values: g.values.iter().map(|v| v.conj()).collect() };
        self.trace_pairing(f, &conj).scale(&BigRational::new(BigInt::from(1), BigInt::from(self.order())))
    }

    fn check_kind(&self, kind: PointKind) -> Result<()> {
        if let PointKind::Ordinary { a } = kind {
            if a % self.p == 0 {
                return Err(domain(format!("ordinary eigenvalue {a} is not a unit mod {}", self.p)));
            }
        }
        Ok(())
    }

    /// Semisimple trace at a point, via characters: `Σ_χ tr(h | Ind χ) χ(a)⁻¹`
    /// or `tr(h | 1) - p^r tr(h | St)`.
    pub fn ss_trace_point(self: &Arc<Self>, kind: PointKind, h: &ClassFunction, r: u32) -> Result<CyclotomicValue> {
        self.check_kind(kind)?;
        match kind {
            PointKind::Ordinary { a } => {
                let mut acc = CyclotomicValue::zero(&self.field);
                for chi in self.units.characters() {
                    let tr = self.trace_pairing(h, &self.induced_character(&chi));
                    let e = self.units.chi_exponent(&chi, a).expect("unit");
                    let inv = CyclotomicValue::zeta_pow(&self.field, -i64::from(e));
                    acc = &acc + &(&tr * &inv);
                }
                Ok(acc)
            }
            PointKind::Supersingular => {
                let pr = BigRational::from_integer(BigInt::from(self.p).pow(r));
                let one = self.trace_pairing(h, &self.trivial());
                let st = self.trace_pairing(h, &self.steinberg());
                Ok(&one - &st.scale(&pr))
            }
        }
    }

    /// The same trace by counting fixed points: surjections with `f g = a f`, or lines of `P¹`.
    pub fn ss_trace_point_by_fixed_points(
        &self,
        kind: PointKind,
        h: &ClassFunction,
        r: u32,
    ) -> Result<CyclotomicValue> {
        self.check_kind(kind)?;
        let mut acc = CyclotomicValue::zero(&self.field);
        let pr = i64::try_from(self.p.pow(r)).map_err(|_| Error::InvalidInput("p^r overflows".into()))?;
        for (c, &size) in self.classes.sizes.iter().enumerate() {
            if h.values[c].is_zero() {
                continue;
            }
            let g = self.class_rep(c);
            let value = match kind {
                PointKind::Ordinary { a } => self.drinfeld_fixed_count(&g, a) as i64,
                // 1 - p^r (#fixed lines - 1)
                PointKind::Supersingular => 1 - pr * (self.fixed_line_count(&g) as i64 - 1),
            };
            let term = h.values[c].scale(&BigRational::from_integer(BigInt::from(value * size as i64)));
            acc = &acc + &term;
        }
        Ok(acc)
    }

    /// Number of free rank-one summands `L ⊂ (Z/p^n)²` with `g L = L`.
    pub fn fixed_line_count(&self, g: &Mat) -> u64 {
        let ring = self.group.ring();
        let q = self.units.modulus() as Elem;
        let mut fixed_vectors = 0;
        for x in 0..q {
            for y in 0..q {
                if !ring.is_unit(x) && !ring.is_unit(y) {
                    continue;
                }
                let gx = ring.add(ring.mul(g[0], x), ring.mul(g[1], y));
                let gy = ring.add(ring.mul(g[2], x), ring.mul(g[3], y));
                // g v = λ v with λ = (g v)_i / v_i for a unit coordinate i
                let lambda = if ring.is_unit(x) {
                    ring.mul(gx, ring.inv(x).unwrap())
                } else {
                    ring.mul(gy, ring.inv(y).unwrap())
                };
                if gx == ring.mul(lambda, x) && gy == ring.mul(lambda, y) {
                    fixed_vectors += 1;
                }
            }
        }
        fixed_vectors / u64::from(self.units.order())
    }
}

impl ClassFunction {
    pub fn group(&self) -> &Arc<ClassGroup> {
        &self.group
    }

    pub fn values(&self) -> &[CyclotomicValue] {
        &self.values
    }

    pub fn value_at(&self, g: &Mat) -> Result<&CyclotomicValue> {
        Ok(&self.values[self.group.class_of(g)?])
    }

    /// Value at the identity.
    pub fn degree(&self) -> CyclotomicValue {
        let id = self.group.class_of(&self.group.group().identity()).expect("identity");
        self.values[id].clone()
    }

    pub fn add(&self, o: &ClassFunction) -> ClassFunction {
        ClassFunction {
            group: Arc::clone(&self.group),
            values: self.values.iter().zip(&o.values).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, o: &ClassFunction) -> ClassFunction {
        ClassFunction {
            group: Arc::clone(&self.group),
            values: self.values.iter().zip(&o.values).map(|(a, b)| a - b).collect(),
        }
    }
}

impl PartialEq for ClassFunction {
    fn eq(&self, o: &Self) -> bool {
        Arc::ptr_eq(&self.group, &o.group) && self.values == o.values
    }
}

impl std::fmt::Debug for ClassFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_list().entries(self.values.iter().map(|v| v.to_string())).finish()
    }
}
