//! Elliptic curves over small finite fields: isomorphism classes, level-`m` structures,
//! semisimple trace sums over the census, and the boundary term.

use std::collections::BTreeMap;
use std::sync::Arc;

use num::{BigInt, BigRational, Integer, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{check_cap, domain, Error, Result};
use crate::finite::{gl2_order, Elem, FiniteGl2, FiniteRing, Mat};
use crate::padic::{is_prime, prime_power_decompose, LocalContext, LocalMatrix};
use crate::rep::{ClassGroup, PointKind};

/// Largest field size enumerated by default.
pub const MAX_FIELD_SIZE: u64 = 16;

/// An affine point or the point at infinity.
pub type Point = Option<(Elem, Elem)>;

/// `y² + a1 xy + a3 y = x³ + a2 x² + a4 x + a6` over a finite field.
#[derive(Clone)]
pub struct Weierstrass {
    field: Arc<FiniteRing>,
    pub a: [Elem; 5],
}

/// `(u, r, s, t)`: `x = u² x' + r`, `y = u³ y' + u² s x' + t`.
pub type Substitution = [Elem; 4];

impl Weierstrass {
    pub fn new(field: &Arc<FiniteRing>, a: [Elem; 5]) -> Self {
        Weierstrass { field: Arc::clone(field), a }
    }

    fn c(&self, v: i64) -> Elem {
        self.field.from_int(v)
    }

    /// `(b2, b4, b6, b8)`.
    fn b_invariants(&self) -> [Elem; 4] {
        let f = &*self.field;
        let [a1, a2, a3, a4, a6] = self.a;
        let m = |x, y| f.mul(x, y);
        let b2 = f.add(m(a1, a1), m(self.c(4), a2));
        let b4 = f.add(m(self.c(2), a4), m(a1, a3));
        let b6 = f.add(m(a3, a3), m(self.c(4), a6));
        let b8 =
            [m(m(a1, a1), a6), m(self.c(4), m(a2, a6)), f.neg(m(a1, m(a3, a4))), m(a2, m(a3, a3)), f.neg(m(a4, a4))]
                .into_iter()
                .fold(0, |acc, x| f.add(acc, x));
        [b2, b4, b6, b8]
    }

    pub fn discriminant(&self) -> Elem {
        let f = &*self.field;
        let m = |x, y| f.mul(x, y);
        let [b2, b4, b6, b8] = self.b_invariants();
        let terms = [
            f.neg(m(m(b2, b2), b8)),
            f.neg(m(self.c(8), m(b4, m(b4, b4)))),
            f.neg(m(self.c(27), m(b6, b6))),
            m(self.c(9), m(b2, m(b4, b6))),
        ];
        terms.into_iter().fold(0, |acc, x| f.add(acc, x))
    }

    pub fn is_smooth(&self) -> bool {
        self.discriminant() != 0
    }

    /// `c4³ / Δ`.
    pub fn j_invariant(&self) -> Option<Elem> {
        let f = &*self.field;
        let [b2, b4, ..] = self.b_invariants();
        let c4 = f.sub(f.mul(b2, b2), f.mul(self.c(24), b4));
        Some(f.mul(f.pow(c4, 3), f.inv(self.discriminant())?))
    }

    /// Coefficients of the curve in the substituted coordinates.
    pub fn substitute(&self, sub: &Substitution) -> Option<[Elem; 5]> {
        let f = &*self.field;
        let [u, r, s, t] = *sub;
        let ui = f.inv(u)?;
        let [a1, a2, a3, a4, a6] = self.a;
        let m = |x, y| f.mul(x, y);
        let sum = |xs: &[Elem]| xs.iter().fold(0, |acc, &x| f.add(acc, x));
        let n1 = sum(&[a1, m(self.c(2), s)]);
        let n2 = sum(&[a2, f.neg(m(s, a1)), m(self.c(3), r), f.neg(m(s, s))]);
        let n3 = sum(&[a3, m(r, a1), m(self.c(2), t)]);
        let n4 = sum(&[
            a4,
            f.neg(m(s, a3)),
            m(self.c(2), m(r, a2)),
            f.neg(m(f.add(t, m(r, s)), a1)),
            m(self.c(3), m(r, r)),
            f.neg(m(self.c(2), m(s, t))),
        ]);
        let n6 =
            sum(&[a6, m(r, a4), m(m(r, r), a2), f.pow(r, 3), f.neg(m(t, a3)), f.neg(m(t, t)), f.neg(m(r, m(t, a1)))]);
        Some([m(n1, ui), m(n2, f.pow(ui, 2)), m(n3, f.pow(ui, 3)), m(n4, f.pow(ui, 4)), m(n6, f.pow(ui, 6))])
    }

    /// Image of a point of this curve on the substituted curve.
    pub fn map_point(&self, sub: &Substitution, pt: Point) -> Point {
        let f = &*self.field;
        let [u, r, s, t] = *sub;
        let (x, y) = pt?;
        let ui = f.inv(u).expect("unit");
        let dx = f.sub(x, r);
        let x2 = f.mul(dx, f.pow(ui, 2));
        let y2 = f.mul(f.sub(f.sub(y, f.mul(s, dx)), t), f.pow(ui, 3));
        Some((x2, y2))
    }

    pub fn on_curve(&self, x: Elem, y: Elem) -> bool {
        let f = &*self.field;
        let [a1, a2, a3, a4, a6] = self.a;
        let lhs = f.add(f.mul(y, y), f.add(f.mul(a1, f.mul(x, y)), f.mul(a3, y)));
        let x2 = f.mul(x, x);
        let rhs = [f.mul(x2, x), f.mul(a2, x2), f.mul(a4, x), a6].into_iter().fold(0, |acc, v| f.add(acc, v));
        lhs == rhs
    }

    /// All rational points, the point at infinity first.
    pub fn points(&self) -> Vec<Point> {
        let q = self.field.size() as Elem;
        let mut out = vec![None];
        for x in 0..q {
            for y in 0..q {
                if self.on_curve(x, y) {
                    out.push(Some((x, y)));
                }
            }
        }
        out
    }

    pub fn point_count(&self) -> u64 {
        self.points().len() as u64
    }

    pub fn negate(&self, pt: Point) -> Point {
        let f = &*self.field;
        let (x, y) = pt?;
        Some((x, f.sub(f.neg(y), f.add(f.mul(self.a[0], x), self.a[2]))))
    }

    pub fn add(&self, p1: Point, p2: Point) -> Point {
        let f = &*self.field;
        let [a1, a2, a3, a4, a6] = self.a;
        let Some((x1, y1)) = p1 else { return p2 };
        let Some((x2, y2)) = p2 else { return p1 };
        if p2 == self.negate(p1) {
            return None;
        }
        let (lambda, nu) = if x1 == x2 {
            let den = f.add(f.add(f.mul(self.c(2), y1), f.mul(a1, x1)), a3);
            let di = f.inv(den).expect("non-vertical tangent");
            let num = [f.mul(self.c(3), f.mul(x1, x1)), f.mul(self.c(2), f.mul(a2, x1)), a4, f.neg(f.mul(a1, y1))]
                .into_iter()
                .fold(0, |acc, v| f.add(acc, v));
            let nnum = [f.neg(f.pow(x1, 3)), f.mul(a4, x1), f.mul(self.c(2), a6), f.neg(f.mul(a3, y1))]
                .into_iter()
                .fold(0, |acc, v| f.add(acc, v));
            (f.mul(num, di), f.mul(nnum, di))
        } else {
            let di = f.inv(f.sub(x2, x1)).expect("distinct x");
            (f.mul(f.sub(y2, y1), di), f.mul(f.sub(f.mul(y1, x2), f.mul(y2, x1)), di))
        };
        let x3 = [f.mul(lambda, lambda), f.mul(a1, lambda), f.neg(a2), f.neg(x1), f.neg(x2)]
            .into_iter()
            .fold(0, |acc, v| f.add(acc, v));
        let y3 = f.sub(f.sub(f.neg(f.mul(f.add(lambda, a1), x3)), nu), a3);
        Some((x3, y3))
    }

    pub fn multiple(&self, k: u64, pt: Point) -> Point {
        (0..k).fold(None, |acc, _| self.add(acc, pt))
    }

    /// Ordered pairs `(P, Q)` of rational points forming a basis of `E[m]`.
    pub fn torsion_bases(&self, m: u64) -> Vec<(Point, Point)> {
        let torsion: Vec<Point> = self.points().into_iter().filter(|&pt| self.multiple(m, pt).is_none()).collect();
        if torsion.len() as u64 != m * m {
            return vec![];
        }
        let mut out = Vec::new();
        for &p1 in &torsion {
            for &p2 in &torsion {
                let mut span = std::collections::HashSet::new();
                let mut a = None;
                for _ in 0..m {
                    let mut b = a;
                    for _ in 0..m {
                        span.insert(b);
                        b = self.add(b, p2);
                    }
                    a = self.add(a, p1);
                }
                if span.len() as u64 == m * m {
                    out.push((p1, p2));
                }
            }
        }
        out
    }
}

/// One `F_q`-isomorphism class of elliptic curves.
#[derive(Clone, Debug, Serialize)]
pub struct CurveClass {
    /// Least coefficient tuple in the class.
    pub coefficients: [String; 5],
    #[serde(skip)]
    pub a: [Elem; 5],
    pub j_invariant: String,
    pub points: u64,
    pub trace: i64,
    pub orbit_size: usize,
    /// `|Aut_{F_q}(E)|` from the stabilizer of the tuple.
    pub aut_order: usize,
    pub supersingular: bool,
}

/// All elliptic curves over `F_q` up to isomorphism.
pub struct Census {
    pub p: u64,
    pub r: u32,
    pub q: u64,
    field: Arc<FiniteRing>,
    pub classes: Vec<CurveClass>,
    /// Nonsingular coefficient tuples.
    pub smooth_tuples: usize,
    /// `|{(u, r, s, t)}| = (q - 1) q³`.
    pub group_order: usize,
}

fn tuple_index(a: &[Elem; 5], q: usize) -> usize {
    a.iter().rev().fold(0, |acc, &c| acc * q + c as usize)
}

fn tuple_of(mut idx: usize, q: usize) -> [Elem; 5] {
    std::array::from_fn(|_| {
        let c = idx % q;
        idx /= q;
        c as Elem
    })
}

impl Census {
    pub fn new(q: u64) -> Result<Self> {
        Self::with_cap(q, MAX_FIELD_SIZE)
    }

    pub fn with_cap(q: u64, max_q: u64) -> Result<Self> {
        let (p, r) =
            prime_power_decompose(q).ok_or_else(|| Error::InvalidInput(format!("{q} is not a prime power")))?;
        if q > max_q {
            return Err(Error::ResourceLimit {
                what: "field size".into(),
                needed: u128::from(q),
                cap: u128::from(max_q),
            });
        }
        check_cap("Weierstrass tuples", u128::from(q).pow(5))?;
        let field = Arc::new(FiniteRing::galois(p, r as usize, 1)?);
        let qs = q as usize;
        let total = qs.pow(5);
        let smooth: Vec<bool> =
            (0..total).into_par_iter().map(|i| Weierstrass::new(&field, tuple_of(i, qs)).is_smooth()).collect();
        let mut gens: Vec<Substitution> = Vec::new();
        for u in field.unit_generators() {
            gens.push([u, 0, 0, 0]);
        }
        for g in field.additive_generators() {
            gens.push([1, g, 0, 0]);
            gens.push([1, 0, g, 0]);
            gens.push([1, 0, 0, g]);
        }
        let mut class_of = vec![u32::MAX; total];
        let mut reps = Vec::new();
        let mut stack = Vec::new();
        for start in 0..total {
            if !smooth[start] || class_of[start] != u32::MAX {
                continue;
            }
            let id = reps.len() as u32;
            class_of[start] = id;
            stack.push(start);
            let mut size = 0;
            while let Some(i) = stack.pop() {
                size += 1;
                let e = Weierstrass::new(&field, tuple_of(i, qs));
                for g in &gens {
                    let j = tuple_index(&e.substitute(g).expect("unit u"), qs);
                    if class_of[j] == u32::MAX {
                        class_of[j] = id;
                        stack.push(j);
                    }
                }
            }
            reps.push((start, size));
        }
        let group_order = (qs - 1) * qs.pow(3);
        let classes = reps
            .into_par_iter()
            .map(|(idx, orbit_size)| {
                let e = Weierstrass::new(&field, tuple_of(idx, qs));
                let points = e.point_count();
                let trace = q as i64 + 1 - points as i64;
                CurveClass {
                    coefficients: e.a.map(|c| field.format(c)),
                    a: e.a,
                    j_invariant: field.format(e.j_invariant().expect("smooth")),
                    points,
                    trace,
                    orbit_size,
                    aut_order: group_order / orbit_size,
                    supersingular: trace.rem_euclid(p as i64) == 0,
                }
            })
            .collect();
        Ok(Census { p, r, q, field, classes, smooth_tuples: smooth.iter().filter(|&&s| s).count(), group_order })
    }

    pub fn field(&self) -> &Arc<FiniteRing> {
        &self.field
    }

    pub fn curve(&self, class: &CurveClass) -> Weierstrass {
        Weierstrass::new(&self.field, class.a)
    }

    /// Automorphisms of the class representative by exhaustive substitution search.
    pub fn automorphisms(&self, class: &CurveClass) -> Vec<Substitution> {
        let e = self.curve(class);
        let q = self.q as Elem;
        let mut out = Vec::new();
        for &u in self.field.units() {
            for r in 0..q {
                for s in 0..q {
                    for t in 0..q {
                        let sub = [u, r, s, t];
                        if e.substitute(&sub) == Some(e.a) {
                            out.push(sub);
                        }
                    }
                }
            }
        }
        out
    }

    /// Points of `M_m(F_q)` on this class: ordered bases of `E[m]` over `F_q` modulo `Aut(E)`.
    pub fn level_m_count(&self, class: &CurveClass, m: u64) -> Result<u64> {
        check_level(self.p, m)?;
        let bases = self.curve(class).torsion_bases(m).len() as u64;
        let aut = class.aut_order as u64;
        if !bases.is_multiple_of(aut) {
            return Err(domain(format!("{bases} bases are not a multiple of |Aut| = {aut}")));
        }
        Ok(bases / aut)
    }

    /// No nontrivial automorphism fixes a basis of `E[m]`.
    pub fn aut_acts_freely(&self, class: &CurveClass, m: u64) -> bool {
        let e = self.curve(class);
        let auts = self.automorphisms(class);
        let bases = e.torsion_bases(m);
        auts.iter()
            .filter(|s| **s != [1, 0, 0, 0])
            .all(|s| bases.iter().all(|&(p1, p2)| (e.map_point(s, p1), e.map_point(s, p2)) != (p1, p2)))
    }

    /// `#M_m(F_q)` as `Σ_tuples #bases / |{(u,r,s,t)}|`, without isomorphism classes.
    pub fn level_m_mass(&self, m: u64) -> Result<BigRational> {
        check_level(self.p, m)?;
        let qs = self.q as usize;
        let total: u64 = (0..qs.pow(5))
            .into_par_iter()
            .map(|i| {
                let e = Weierstrass::new(&self.field, tuple_of(i, qs));
                if !e.is_smooth() || !e.point_count().is_multiple_of(m * m) {
                    return 0;
                }
                e.torsion_bases(m).len() as u64
            })
            .sum();
        Ok(BigRational::new(BigInt::from(total), BigInt::from(self.group_order)))
    }

    /// The unit root of `x² - a_E x + q` modulo `p^n`, for ordinary classes.
    pub fn unit_eigenvalue(&self, class: &CurveClass, n: u32) -> Result<Option<u64>> {
        if class.supersingular {
            return Ok(None);
        }
        let ctx = LocalContext::new(self.p, 1, 2 * n + 4 + self.r)?;
        let gamma = LocalMatrix::from_ints(&ctx, 0, [0, 1, -(self.q as i128), i128::from(class.trace)])?;
        Ok(Some(gamma.unit_eigenvalue(n)?.coeffs()[0]))
    }
}

fn check_level(p: u64, m: u64) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::InvalidInput(format!("{p} is not prime")));
    }
    if m < 3 || m.gcd(&p) != 1 {
        return Err(domain(format!("level m = {m} must be >= 3 and prime to {p}")));
    }
    Ok(())
}

/// Consistency checks over a census.
#[derive(Clone, Debug, Serialize)]
pub struct CensusChecks {
    pub q: u64,
    pub classes: usize,
    pub weil_bound: bool,
    /// `a_E ≡ 0 mod p ⇔ #E(F_q) ≡ 1 mod p` on every class.
    pub supersingular_criteria_agree: bool,
    /// Orbit sizes sum to the number of nonsingular tuples.
    pub orbit_partition: bool,
    /// Stabilizer orders from substitution search equal `|G| / orbit size`.
    pub aut_orders_agree: bool,
    /// `Σ 1/|Aut(E)| = q`.
    pub mass_is_q: bool,
    /// Observed traces, all with `det γ = q`, integral trace and `a² <= 4q`.
    pub traces: Vec<i64>,
    /// Traces with `a² < 4q` or `a² = 4q` that no census curve realises.
    pub admissible_missing: Vec<i64>,
}

impl CensusChecks {
    pub fn passed(&self) -> bool {
        self.weil_bound
            && self.supersingular_criteria_agree
            && self.orbit_partition
            && self.aut_orders_agree
            && self.mass_is_q
    }
}

pub fn census_checks(census: &Census) -> CensusChecks {
    let q = census.q as i64;
    let p = census.p as i64;
    let weil_bound = census.classes.iter().all(|c| c.trace * c.trace <= 4 * q);
    let supersingular_criteria_agree =
        census.classes.iter().all(|c| (c.trace % p == 0) == ((c.points as i64).rem_euclid(p) == 1));
    let orbit_partition = census.classes.iter().map(|c| c.orbit_size).sum::<usize>() == census.smooth_tuples;
    let aut_orders_agree = census.classes.iter().all(|c| census.automorphisms(c).len() == c.aut_order);
    let mass: BigRational =
        census.classes.iter().map(|c| BigRational::new(BigInt::from(1), BigInt::from(c.aut_order))).sum();
    let mut traces: Vec<i64> = census.classes.iter().map(|c| c.trace).collect();
    traces.sort_unstable();
    traces.dedup();
    let bound = (0..).find(|a: &i64| a * a > 4 * q).unwrap();
    let admissible_missing = (-bound + 1..bound).filter(|a| !traces.contains(a)).collect();
    CensusChecks {
        q: census.q,
        classes: census.classes.len(),
        weil_bound,
        supersingular_criteria_agree,
        orbit_partition,
        aut_orders_agree,
        mass_is_q: mass == BigRational::from_integer(BigInt::from(q)),
        traces,
        admissible_missing,
    }
}

/// Contribution of one isomorphism class to the semisimple Lefschetz sum.
#[derive(Clone, Debug, Serialize)]
pub struct ClassContribution {
    pub coefficients: [String; 5],
    pub trace: i64,
    pub aut_order: usize,
    pub level_points: u64,
    pub supersingular: bool,
    pub unit_eigenvalue: Option<u64>,
    /// Semisimple trace per point, via characters.
    pub point_trace: i64,
    /// The same via fixed-point counts.
    pub point_trace_fixed: i64,
    /// The same from the closed formula.
    pub point_trace_closed: i64,
}

/// Semisimple Lefschetz sum over `M_m(F_q)` at level `p^n`.
#[derive(Clone, Debug, Serialize)]
pub struct LefschetzReport {
    pub p: u64,
    pub r: u32,
    pub q: u64,
    pub n: u32,
    pub m: u64,
    pub classes: Vec<ClassContribution>,
    pub total: i64,
    /// `#M_m(F_q)` summed over isomorphism classes.
    pub level_points: u64,
    /// `#M_m(F_q)` by the tuple mass, independent of classes.
    #[serde(serialize_with = "crate::report::ser_rational")]
    pub level_points_direct: BigRational,
    /// Boundary term for `n >= 1`.
    #[serde(serialize_with = "ser_opt_rational")]
    pub boundary: Option<BigRational>,
    /// Character and fixed-point paths agree with each other and the closed formula on every class.
    pub paths_agree: bool,
}

fn ser_opt_rational<S: serde::Serializer>(x: &Option<BigRational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(v) => s.serialize_str(&v.to_string()),
        None => s.serialize_none(),
    }
}

impl LefschetzReport {
    pub fn passed(&self) -> bool {
        let counts = BigRational::from_integer(BigInt::from(self.level_points)) == self.level_points_direct;
        let smooth = self.n > 0 || BigRational::from_integer(BigInt::from(self.total)) == self.level_points_direct;
        counts && smooth && self.paths_agree
    }
}

/// Per-point semisimple trace from the closed formula.
pub fn closed_point_trace(p: u64, r: u32, n: u32, unit_eigenvalue: Option<u64>) -> i64 {
    if n == 0 {
        return 1;
    }
    let (p, pn) = (p as i64, (p as i64).pow(n));
    match unit_eigenvalue {
        Some(a) if a % pn as u64 == 1 % pn as u64 => pn * pn - pn * pn / (p * p),
        Some(_) => 0,
        None => 1 - p.pow(r) * (pn + pn / p - 1),
    }
}

pub fn ss_lefschetz(census: &Census, n: u32, m: u64) -> Result<LefschetzReport> {
    let (p, r) = (census.p, census.r);
    let group = if n > 0 { Some(ClassGroup::new(p, n)?) } else { None };
    let e = group.as_ref().map(|g| g.identity_delta());
    let mut classes = Vec::new();
    let mut paths_agree = true;
    for class in &census.classes {
        let level_points = census.level_m_count(class, m)?;
        let unit_eigenvalue = if n > 0 { census.unit_eigenvalue(class, n)? } else { None };
        let closed = closed_point_trace(p, r, n, unit_eigenvalue.or(if class.supersingular { None } else { Some(1) }));
        let (chars, fixed) = match (&group, &e) {
            (Some(g), Some(e)) => {
                let kind = match unit_eigenvalue {
                    Some(a) => PointKind::Ordinary { a },
                    None => PointKind::Supersingular,
                };
                let to_int = |v: crate::cyclotomic::CyclotomicValue| {
                    v.as_integer().ok_or_else(|| domain(format!("trace {v} is not an integer")))
                };
                (to_int(g.ss_trace_point(kind, e, r)?)?, to_int(g.ss_trace_point_by_fixed_points(kind, e, r)?)?)
            }
            _ => (1, 1),
        };
        paths_agree &= chars == fixed && fixed == closed;
        classes.push(ClassContribution {
            coefficients: class.coefficients.clone(),
            trace: class.trace,
            aut_order: class.aut_order,
            level_points,
            supersingular: class.supersingular,
            unit_eigenvalue,
            point_trace: chars,
            point_trace_fixed: fixed,
            point_trace_closed: closed,
        });
    }
    let total = classes.iter().map(|c| c.point_trace * c.level_points as i64).sum();
    let level_points = classes.iter().map(|c| c.level_points).sum();
    let boundary = if n > 0 { Some(boundary_ss_trace(p, r, n, m)?) } else { None };
    Ok(LefschetzReport {
        p,
        r,
        q: census.q,
        n,
        m,
        classes,
        total,
        level_points,
        level_points_direct: census.level_m_mass(m)?,
        boundary,
        paths_agree,
    })
}

/// `#({±[[1,*],[0,1]]} \ GL_2(Z/p^n m)) / (p^{n-1}(p-1))` when `p^r ≡ 1 mod m`, else 0.
pub fn boundary_ss_trace(p: u64, r: u32, n: u32, m: u64) -> Result<BigRational> {
    if n == 0 {
        return Err(domain("boundary term needs n >= 1"));
    }
    check_level(p, m)?;
    if p.pow(r) % m != 1 {
        return Ok(BigRational::zero());
    }
    let pn = u128::from(p).pow(n);
    let big_n = pn * u128::from(m);
    let order = gl2_order_composite(p, n, m);
    let packets = BigRational::new(BigInt::from(order), BigInt::from(2 * big_n));
    Ok(packets / BigRational::from_integer(BigInt::from(pn / u128::from(p) * u128::from(p - 1))))
}

/// `|GL_2(Z/p^n m)|` from the prime factorisation of `p^n m`.
fn gl2_order_composite(p: u64, n: u32, m: u64) -> u128 {
    let mut order = gl2_order(u128::from(p), n);
    let mut t = m;
    let mut d = 2;
    while t > 1 {
        if t.is_multiple_of(d) {
            let mut e = 0;
            while t.is_multiple_of(d) {
                t /= d;
                e += 1;
            }
            order *= gl2_order(u128::from(d), e);
        }
        d += 1;
    }
    order
}

/// The boundary term by enumeration: orbits of `{±U}` and inertia on `GL_2(Z/p^n m)` acting on
/// the left, counting the inertia packets fixed by Frobenius.
#[derive(Clone, Debug, Serialize)]
pub struct BoundaryEnumeration {
    pub modulus: u64,
    pub group_order: usize,
    /// `|{±U} \ GL_2(Z/p^n m)|`.
    pub boundary_points: usize,
    pub packets: usize,
    pub packet_sizes: BTreeMap<usize, usize>,
    pub frobenius_fixed_packets: usize,
}

pub fn boundary_by_enumeration(p: u64, r: u32, n: u32, m: u64) -> Result<BoundaryEnumeration> {
    check_level(p, m)?;
    let pn = p.pow(n);
    let modulus = pn * m;
    let ring = Arc::new(FiniteRing::integers(modulus)?);
    let group = FiniteGl2::new(Arc::clone(&ring))?;
    let one = ring.one();
    let minus = ring.neg(one);
    let unipotent: Vec<Mat> = vec![[one, one, 0, one], [minus, 0, 0, minus]];
    // inertia: diag(x⁻¹, 1) with x ≡ 1 mod m
    let inertia: Vec<Mat> = ring
        .units()
        .iter()
        .filter(|&&x| u64::from(x) % m == 1 % m)
        .map(|&x| [ring.inv(x).expect("unit"), 0, 0, one])
        .collect();
    let frob_x = (0..modulus).find(|&x| x % m == p.pow(r) % m && x % pn == 1 % pn).expect("CRT solution");
    let frob: Mat = [ring.inv(frob_x as Elem).ok_or_else(|| domain("Frobenius is not a unit"))?, 0, 0, one];
    let orbits = |gens: &[Mat]| -> (Vec<u32>, Vec<usize>) {
        let mut class_of = vec![u32::MAX; group.order()];
        let mut sizes = Vec::new();
        let mut stack = Vec::new();
        for start in 0..group.order() {
            if class_of[start] != u32::MAX {
                continue;
            }
            let id = sizes.len() as u32;
            class_of[start] = id;
            stack.push(start);
            let mut size = 0;
            while let Some(i) = stack.pop() {
                size += 1;
                let x = group.element(i);
                for g in gens {
                    let j = group.index_of(&group.mul(g, &x)).expect("group element");
                    if class_of[j] == u32::MAX {
                        class_of[j] = id;
                        stack.push(j);
                    }
                }
            }
            sizes.push(size);
        }
        (class_of, sizes)
    };
    let (_, boundary) = orbits(&unipotent);
    let mut packet_gens = unipotent.clone();
    packet_gens.extend(inertia);
    let (packet_of, packet_sizes) = orbits(&packet_gens);
    let mut fixed = 0;
    let mut first = vec![usize::MAX; packet_sizes.len()];
    for (i, &c) in packet_of.iter().enumerate() {
        if first[c as usize] == usize::MAX {
            first[c as usize] = i;
        }
    }
    for (c, &i) in first.iter().enumerate() {
        let image = group.index_of(&group.mul(&frob, &group.element(i))).expect("group element");
        if packet_of[image] as usize == c {
            fixed += 1;
        }
    }
    let mut hist = BTreeMap::new();
    for &s in &packet_sizes {
        // packet size counted in boundary points: each ±U orbit has 2·p^n·m elements
        *hist.entry(s / (2 * modulus as usize)).or_insert(0) += 1;
    }
    Ok(BoundaryEnumeration {
        modulus,
        group_order: group.order(),
        boundary_points: boundary.len(),
        packets: packet_sizes.len(),
        packet_sizes: hist,
        frobenius_fixed_packets: fixed,
    })
}
