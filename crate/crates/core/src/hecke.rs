//! Convolution in the Hecke algebra of `GL_2(Q_q)` relative to principal congruence subgroups.
//!
//! Functions are right `Γ(p^n)`-invariant with finite support, stored as one representative per
//! coset `gΓ(p^n)` plus a pointwise evaluator. The Haar measure gives `GL_2(Z_q)` volume `q - 1`.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use num::{BigInt, BigRational, One, Zero};
use rand::Rng;
use serde::Serialize;

use crate::error::{check_cap, domain, precision, Result};
use crate::finite::{gl2_order, FiniteGl2, FiniteRing};
use crate::padic::{GaloisRingElement, LocalContext, LocalMatrix, RationalFunctionT};
use crate::sampling;
use crate::test_functions::{phi_branch, phi_p0, phi_pn, phi_pnt, PhiBranch};
use crate::tree::enumerate_vertices;

/// Canonical label of the coset `gΓ(p^n)`.
///
/// Writing `g = p^e M` with `M` primitive, `M = H k` with `H = [[p^s, b], [0, p^t]]` in column
/// Hermite form and `k ∈ GL_2(Z_q)`; the key is `(e, s, t, b mod p^s, k mod p^n)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct CosetKey {
    pub exponent: i64,
    pub s: u32,
    pub t: u32,
    pub b: Vec<u64>,
    pub k: Vec<Vec<u64>>,
}

/// The key of `gΓ(p^n)`. Requires `M` known modulo `p^{v(det M) + n}`.
pub fn coset_key(g: &LocalMatrix, n: u32) -> Result<CosetKey> {
    let d = g.det_valuation()? - 2 * g.exponent();
    let d = u32::try_from(d).expect("primitive part is integral");
    let known = g.precision();
    if known < d + n {
        return Err(precision(format!("coset key needs the matrix modulo p^{}, known modulo p^{known}", d + n)));
    }
    let m: Vec<GaloisRingElement> = g.unit_part().0.iter().map(|x| x.truncate(known)).collect();
    let bottom = |x: &GaloisRingElement| x.valuation().unwrap_or(u32::MAX);
    // Columns (m0, m2) and (m1, m3); the pivot column has the bottom entry of least valuation.
    let (pivot, other) = if bottom(&m[3]) <= bottom(&m[2]) { ((1, 3), (0, 2)) } else { ((0, 2), (1, 3)) };
    let t = bottom(&m[pivot.1]);
    let eps_inv = m[pivot.1].div_p_pow(t)?.truncate(known - t).inverse()?;
    let x = (&m[pivot.0] * &eps_inv).truncate(known);
    let factor = m[other.1].div_p_pow(t)?.truncate(known - t);
    let a = (&m[other.0] - &(&factor * &x)).truncate(known - t);
    let s = d - t;
    if a.valuation() != Some(s) {
        return Err(precision("Hermite reduction lost the determinant valuation"));
    }
    let b = x.truncate(s);
    let p = g.context().p() as i128;
    // k = adj(H) M / p^d
    let ps = GaloisRingElement::from_int(g.context(), p.pow(s));
    let pt = GaloisRingElement::from_int(g.context(), p.pow(t));
    let k_entries = [&(&pt * &m[0]) - &(&b * &m[2]), &(&pt * &m[1]) - &(&b * &m[3]), &ps * &m[2], &ps * &m[3]];
    let k = k_entries.iter().map(|e| Ok(e.div_p_pow(d)?.truncate(n).coeffs().to_vec())).collect::<Result<Vec<_>>>()?;
    Ok(CosetKey { exponent: g.exponent(), s, t, b: b.coeffs().to_vec(), k })
}

/// Whether `x ∈ Γ(p^n)`, with `Γ(1) = GL_2(Z_q)`.
pub fn in_congruence_subgroup(x: &LocalMatrix, n: u32) -> Result<bool> {
    if x.exponent() != 0 || x.det_valuation()? != 0 {
        return Ok(false);
    }
    if n == 0 {
        return Ok(true);
    }
    if x.precision() < n {
        return Err(precision(format!("membership in Γ(p^{n}) needs the matrix modulo p^{n}")));
    }
    let m = x.unit_part();
    let one = GaloisRingElement::one(x.context());
    Ok((&m.0[0] - &one).truncate(n).is_zero()
        && m.0[1].truncate(n).is_zero()
        && m.0[2].truncate(n).is_zero()
        && (&m.0[3] - &one).truncate(n).is_zero())
}

/// `vol Γ(p^n) = (q - 1) / |GL_2(GR(p^n, r))|`.
pub fn congruence_volume(q: u64, n: u32) -> BigRational {
    let index = if n == 0 { 1 } else { gl2_order(u128::from(q), n) };
    BigRational::new(BigInt::from(q - 1), BigInt::from(index))
}

/// Coefficient vectors of a table index of `GR(p^m, r)`.
fn digits(idx: u64, base: u64, r: usize) -> Vec<i128> {
    let mut t = idx;
    (0..r)
        .map(|_| {
            let c = t % base;
            t /= base;
            c as i128
        })
        .collect()
}

/// Representatives of `Γ(p^n) / Γ(p^m)`, lifted with non-negative digits.
pub fn congruence_transversal(ctx: &Arc<LocalContext>, n: u32, m: u32) -> Result<Vec<LocalMatrix>> {
    if m < n {
        return Err(domain(format!("transversal needs m >= n, got m = {m}, n = {n}")));
    }
    let (p, r) = (ctx.p(), ctx.r());
    if n == 0 {
        if m == 0 {
            return Ok(vec![LocalMatrix::identity(ctx)]);
        }
        let group = FiniteGl2::new(Arc::new(FiniteRing::galois(p, r, m)?))?;
        let base = p.pow(m);
        return group
            .elements()
            .iter()
            .map(|x| LocalMatrix::from_coeff_entries(ctx, 0, x.map(|e| digits(u64::from(e), base, r))))
            .collect();
    }
    let base = p.pow(m - n);
    let size = base.pow(r as u32);
    check_cap("congruence transversal", u128::from(size).pow(4))?;
    let pn = (p as i128).pow(n);
    let mut out = Vec::with_capacity(size.pow(4) as usize);
    for idx in 0..size.pow(4) {
        let mut t = idx;
        let entries: [Vec<i128>; 4] = std::array::from_fn(|slot| {
            let e = t % size;
            t /= size;
            let mut cs: Vec<i128> = digits(e, base, r).iter().map(|c| c * pn).collect();
            if slot == 0 || slot == 3 {
                cs[0] += 1;
            }
            cs
        });
        out.push(LocalMatrix::from_coeff_entries(ctx, 0, entries)?);
    }
    Ok(out)
}

/// Values a Hecke function can take.
pub trait HeckeValue: Clone + PartialEq + fmt::Debug + Send + Sync + 'static {
    fn zero_like(q: u64) -> Self;
    fn is_zero_value(&self) -> bool;
    fn plus(&self, o: &Self) -> Self;
    fn times(&self, o: &Self) -> Self;
    fn scaled(&self, c: &BigRational) -> Self;
}

impl HeckeValue for BigRational {
    fn zero_like(_: u64) -> Self {
        BigRational::zero()
    }
    fn is_zero_value(&self) -> bool {
        self.is_zero()
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn scaled(&self, c: &BigRational) -> Self {
        self * c
    }
}

impl HeckeValue for RationalFunctionT {
    fn zero_like(q: u64) -> Self {
        RationalFunctionT::zero(q as i64)
    }
    fn is_zero_value(&self) -> bool {
        self.is_zero()
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn scaled(&self, c: &BigRational) -> Self {
        self.scale(c)
    }
}

type Evaluator<V> = Arc<dyn Fn(&LocalMatrix) -> Result<V> + Send + Sync>;

/// A finitely supported right `Γ(p^n)`-invariant function on `GL_2(Q_q)`.
#[derive(Clone)]
pub struct CosetFunction<V: HeckeValue> {
    ctx: Arc<LocalContext>,
    level: u32,
    /// One representative per coset in the support, with its value.
    support: Vec<(LocalMatrix, V)>,
    eval: Evaluator<V>,
}

impl<V: HeckeValue> fmt::Debug for CosetFunction<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CosetFunction(level {}, {} cosets)", self.level, self.support.len())
    }
}

impl<V: HeckeValue> CosetFunction<V> {
    pub fn context(&self) -> &Arc<LocalContext> {
        &self.ctx
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn support(&self) -> &[(LocalMatrix, V)] {
        &self.support
    }

    pub fn value(&self, g: &LocalMatrix) -> Result<V> {
        (self.eval)(g)
    }

    /// A function given by its values on finitely many cosets.
    pub fn from_cosets(ctx: &Arc<LocalContext>, level: u32, cosets: Vec<(LocalMatrix, V)>) -> Result<Self> {
        let mut table: HashMap<CosetKey, V> = HashMap::new();
        let mut support = Vec::new();
        for (g, v) in cosets {
            if v.is_zero_value() {
                continue;
            }
            if table.insert(coset_key(&g, level)?, v.clone()).is_none() {
                support.push((g, v));
            }
        }
        let zero = V::zero_like(ctx.q());
        let eval: Evaluator<V> = Arc::new(move |g: &LocalMatrix| {
            Ok(table.get(&coset_key(g, level)?).cloned().unwrap_or_else(|| zero.clone()))
        });
        Ok(CosetFunction { ctx: Arc::clone(ctx), level, support, eval })
    }

    /// `(self ∗ other)(g) = vol Γ(p^n) · Σ_{hΓ ⊆ supp self} self(h) other(h⁻¹ g)`.
    pub fn convolve_at(&self, other: &CosetFunction<V>, g: &LocalMatrix) -> Result<V> {
        if self.level != other.level {
            return Err(domain("convolution of functions at different levels"));
        }
        let mut acc = V::zero_like(self.ctx.q());
        for (h, v) in &self.support {
            let w = other.value(&h.inverse()?.mul(g)?)?;
            if !w.is_zero_value() {
                acc = acc.plus(&v.times(&w));
            }
        }
        Ok(acc.scaled(&congruence_volume(self.ctx.q(), self.level)))
    }

    /// `self ∗ other` with its support listed, from the candidate cosets `h₁ Γ h₂ Γ`.
    pub fn convolve(&self, other: &CosetFunction<V>) -> Result<CosetFunction<V>> {
        let mut seen = HashSet::new();
        let mut cosets = Vec::new();
        for (h2, _) in &other.support {
            let d = u32::try_from(h2.det_valuation()? - 2 * h2.exponent()).expect("integral primitive part");
            let transversal = congruence_transversal(&self.ctx, self.level, self.level + d)?;
            for (h1, _) in &self.support {
                for u in &transversal {
                    let g = h1.mul(u)?.mul(h2)?;
                    if seen.insert(coset_key(&g, self.level)?) {
                        let v = self.convolve_at(other, &g)?;
                        cosets.push((g, v));
                    }
                }
            }
        }
        Self::from_cosets(&self.ctx, self.level, cosets)
    }
}

impl CosetFunction<BigRational> {
    /// `e_Γ`: the indicator of `Γ(p^n)` divided by its volume.
    pub fn unit(ctx: &Arc<LocalContext>, level: u32) -> Self {
        let value = congruence_volume(ctx.q(), level).recip();
        let v = value.clone();
        let eval: Evaluator<BigRational> = Arc::new(move |g: &LocalMatrix| {
            Ok(if in_congruence_subgroup(g, level)? { v.clone() } else { BigRational::zero() })
        });
        CosetFunction { ctx: Arc::clone(ctx), level, support: vec![(LocalMatrix::identity(ctx), value)], eval }
    }

    /// The indicator of `Γ(p^n) x Γ(p^n)`.
    pub fn double_coset(ctx: &Arc<LocalContext>, level: u32, x: &LocalMatrix) -> Result<Self> {
        let d = u32::try_from(x.det_valuation()? - 2 * x.exponent()).expect("integral primitive part");
        let mut cosets = Vec::new();
        for u in congruence_transversal(ctx, level, level + d)? {
            cosets.push((u.mul(x)?, BigRational::one()));
        }
        Self::from_cosets(ctx, level, cosets)
    }

    /// `φ_{p,n}`, or `φ_{p,0}` when `level = 0`.
    pub fn phi(ctx: &Arc<LocalContext>, level: u32) -> Result<Self> {
        let support = phi_support(ctx, level)?;
        let eval: Evaluator<BigRational> =
            if level == 0 { Arc::new(phi_p0) } else { Arc::new(move |g| phi_pn(g, level)) };
        let support = support
            .into_iter()
            .map(|g| Ok((eval(&g)?, g)))
            .filter(|r: &Result<(BigRational, LocalMatrix)>| r.as_ref().map_or(true, |(v, _)| !v.is_zero()))
            .map(|r| r.map(|(v, g)| (g, v)))
            .collect::<Result<Vec<_>>>()?;
        Ok(CosetFunction { ctx: Arc::clone(ctx), level, support, eval })
    }
}

impl CosetFunction<RationalFunctionT> {
    /// The deformation `φ_{p,n,t}`.
    pub fn phi_deformed(ctx: &Arc<LocalContext>, level: u32) -> Result<Self> {
        if level == 0 {
            return Err(domain("the deformation is defined for level n >= 1"));
        }
        let eval: Evaluator<RationalFunctionT> = Arc::new(move |g| phi_pnt(g, level));
        let mut support = Vec::new();
        for g in phi_support(ctx, level)? {
            let v = eval(&g)?;
            if !v.is_zero() {
                support.push((g, v));
            }
        }
        Ok(CosetFunction { ctx: Arc::clone(ctx), level, support, eval })
    }
}

/// Coset representatives covering `{g : k(g) <= n - 1, v(det g) = 1}` at level `n`
/// (`GL_2(Z_q) diag(p,1) GL_2(Z_q)` at level 0).
pub fn phi_support(ctx: &Arc<LocalContext>, level: u32) -> Result<Vec<LocalMatrix>> {
    let kmax = level.saturating_sub(1);
    let vertices = enumerate_vertices(ctx, 2 * kmax + 1)?;
    let lifts = congruence_transversal(ctx, 0, level)?;
    let mut out = Vec::new();
    for k in 0..=kmax {
        for v in vertices.iter().filter(|v| v.d == 2 * k + 1) {
            let h = v.hermite_matrix(ctx)?.scale_p(-i64::from(k));
            for u in &lifts {
                out.push(h.mul(u)?);
            }
        }
    }
    Ok(out)
}

/// Working precision for Hecke computations at level `n`.
pub fn hecke_context(p: u64, r: usize, n: u32) -> Result<Arc<LocalContext>> {
    LocalContext::new(p, r, 3 * n + 10)
}

/// Double-coset generators used by the centrality check: `w`, `diag(p,1)`, `diag(1,p)`, `[[1,1],[0,1]]`.
pub fn standard_generators(ctx: &Arc<LocalContext>) -> Result<Vec<(String, LocalMatrix)>> {
    let p = ctx.p() as i128;
    Ok(vec![
        ("weyl".into(), LocalMatrix::from_ints(ctx, 0, [0, 1, -1, 0])?),
        ("diag(p,1)".into(), LocalMatrix::diag(ctx, p, 1)?),
        ("diag(1,p)".into(), LocalMatrix::diag(ctx, 1, p)?),
        ("unipotent".into(), LocalMatrix::from_ints(ctx, 0, [1, 1, 0, 1])?),
    ])
}

/// Per-generator outcome of the centrality check.
#[derive(Clone, Debug, Serialize)]
pub struct CentralityResult {
    pub generator: String,
    pub cosets: usize,
    pub samples: usize,
    /// Samples where `(φ ∗ f)(g) != (f ∗ φ)(g)`.
    pub failures: usize,
    /// Samples with a nonzero value.
    pub nonzero: usize,
    /// `(φ ∗ f)(g) - (f ∗ φ)(g)` at each sample.
    #[serde(serialize_with = "crate::report::ser_rationals")]
    pub residuals: Vec<BigRational>,
}

/// Sample points `h u y` and `y u h` mixing the supports of `φ` and `f`, plus random matrices.
fn centrality_samples(
    phi: &CosetFunction<BigRational>,
    f: &CosetFunction<BigRational>,
    count: usize,
    seed: u64,
) -> Result<Vec<LocalMatrix>> {
    let ctx = phi.context();
    let mut rng = sampling::rng(seed);
    let gamma = congruence_transversal(ctx, phi.level(), phi.level() + 1)?;
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let h = &phi.support()[rng.gen_range(0..phi.support().len())].0;
        let y = &f.support()[rng.gen_range(0..f.support().len())].0;
        let u = &gamma[rng.gen_range(0..gamma.len())];
        let g = match out.len() % 3 {
            0 => h.mul(u)?.mul(y)?,
            1 => y.mul(u)?.mul(h)?,
            _ => random_matrix(ctx, &mut rng, 2)?,
        };
        out.push(g);
    }
    Ok(out)
}

fn random_matrix(ctx: &Arc<LocalContext>, rng: &mut impl Rng, max_det_val: i64) -> Result<LocalMatrix> {
    let p = ctx.p() as i128;
    loop {
        let entries: [Vec<i128>; 4] =
            std::array::from_fn(|_| (0..ctx.r()).map(|_| rng.gen_range(-p * p..=p * p)).collect());
        if entries.iter().all(|e| e.iter().all(|&c| c == 0)) {
            continue;
        }
        let g = LocalMatrix::from_coeff_entries(ctx, 0, entries)?;
        if g.det_valuation().is_ok_and(|v| v <= max_det_val) {
            return Ok(g);
        }
    }
}

/// `(φ_{p,n} ∗ f)(g) = (f ∗ φ_{p,n})(g)` for each generator's double-coset indicator `f`.
pub fn centrality_check(
    ctx: &Arc<LocalContext>,
    level: u32,
    generators: &[(String, LocalMatrix)],
    samples: usize,
    seed: u64,
) -> Result<Vec<CentralityResult>> {
    let phi = CosetFunction::phi(ctx, level)?;
    generators
        .iter()
        .enumerate()
        .map(|(i, (name, x))| {
            let f = CosetFunction::double_coset(ctx, level, x)?;
            let points = centrality_samples(&phi, &f, samples, seed.wrapping_add(i as u64))?;
            let mut residuals = Vec::with_capacity(points.len());
            let mut nonzero = 0;
            for g in &points {
                let left = phi.convolve_at(&f, g)?;
                let right = f.convolve_at(&phi, g)?;
                if !left.is_zero() || !right.is_zero() {
                    nonzero += 1;
                }
                residuals.push(left - right);
            }
            Ok(CentralityResult {
                generator: name.clone(),
                cosets: f.support().len(),
                samples: points.len(),
                failures: residuals.iter().filter(|r| !r.is_zero()).count(),
                nonzero,
                residuals,
            })
        })
        .collect()
}

/// Outcome of the deformation tower check.
#[derive(Clone, Debug, Serialize)]
pub struct TowerReport {
    pub p: u64,
    pub r: usize,
    pub n: u32,
    pub samples: usize,
    /// Samples where the averaged deformation differs from `φ_{p,n,t}(g)`.
    pub failures: usize,
    /// Samples where the `t := q` specialization differs from `φ_{p,n}(g)` or the undeformed average.
    pub specialization_failures: usize,
    /// Samples per branch of `φ_{p,n}`, plus `k_equals_n` for the cancellation case.
    pub branches: BTreeMap<String, usize>,
    pub first_failure: Option<String>,
}

impl TowerReport {
    pub fn passed(&self) -> bool {
        self.failures == 0 && self.specialization_failures == 0
    }
}

/// `φ_{p,n+1,t}` averaged over `gΓ(p^n)/Γ(p^{n+1})`.
pub fn tower_average(g: &LocalMatrix, n: u32, transversal: &[LocalMatrix]) -> Result<(RationalFunctionT, BigRational)> {
    let q = g.context().q();
    let mut deformed = RationalFunctionT::zero(q as i64);
    let mut plain = BigRational::zero();
    for u in transversal {
        let gu = g.mul(u)?;
        deformed = &deformed + &phi_pnt(&gu, n + 1)?;
        plain += phi_pn(&gu, n + 1)?;
    }
    let w = BigRational::new(BigInt::one(), BigInt::from(transversal.len()));
    Ok((deformed.scale(&w), plain * w))
}

fn branch_name(b: PhiBranch) -> &'static str {
    match b {
        PhiBranch::OffSupport => "off_support",
        PhiBranch::TraceNonUnit { .. } => "trace_non_unit",
        PhiBranch::EllBelow { .. } => "ell_below",
        PhiBranch::EllAtLeast { .. } => "ell_at_least",
    }
}

/// Checks `φ_{p,n,t} = φ_{p,n+1,t} ∗ e_{Γ(p^n)}` and its specialization at `t = q` on `samples`.
pub fn tower_identity_check(ctx: &Arc<LocalContext>, n: u32, samples: &[LocalMatrix]) -> Result<TowerReport> {
    if n == 0 {
        return Err(domain("the tower starts at level 1"));
    }
    let transversal = congruence_transversal(ctx, n, n + 1)?;
    let mut branches = BTreeMap::new();
    let (mut failures, mut specialization_failures) = (0, 0);
    let mut first_failure = None;
    for g in samples {
        let branch = phi_branch(g, n)?;
        *branches.entry(branch_name(branch).to_string()).or_insert(0) += 1;
        if g.k_of() == i64::from(n) {
            *branches.entry("k_equals_n".to_string()).or_insert(0) += 1;
        }
        let (avg_t, avg) = tower_average(g, n, &transversal)?;
        let expect_t = phi_pnt(g, n)?;
        let expect = phi_pn(g, n)?;
        if avg_t != expect_t {
            failures += 1;
            first_failure.get_or_insert_with(|| format!("{g}: average {avg_t}, expected {expect_t}"));
        }
        if avg_t.at_q() != avg || avg != expect {
            specialization_failures += 1;
            first_failure.get_or_insert_with(|| format!("{g}: specialization {avg}, expected {expect}"));
        }
    }
    Ok(TowerReport {
        p: ctx.p(),
        r: ctx.r(),
        n,
        samples: samples.len(),
        failures,
        specialization_failures,
        branches,
        first_failure,
    })
}

/// Samples covering every branch of `φ_{p,n}`: conjugates `h⁻¹ γ h` of companion matrices and of
/// `diag(p u, 1 + p^j v)` by integral `h` with `v(det h) <= n + 1`, plus off-support matrices.
pub fn tower_samples(ctx: &Arc<LocalContext>, n: u32, count: usize, seed: u64) -> Result<Vec<LocalMatrix>> {
    let mut rng = sampling::rng(seed);
    let p = ctx.p() as i128;
    let r = ctx.r();
    let mut out = Vec::with_capacity(count);
    let unit = |rng: &mut rand_chacha::ChaCha8Rng| loop {
        let u = rng.gen_range(1..p * p);
        if u % p != 0 {
            return u;
        }
    };
    while out.len() < count {
        let gamma = match out.len() % 5 {
            0 | 1 => {
                let tr = if out.len() % 2 == 0 { p * rng.gen_range(-p..=p) } else { rng.gen_range(-p * p..=p * p) };
                LocalMatrix::from_ints(ctx, 0, [0, 1, -p * unit(&mut rng), tr])?
            }
            2 | 3 => {
                let j = rng.gen_range(0..=n + 2);
                let v = if rng.gen_bool(0.2) { 0 } else { unit(&mut rng) };
                LocalMatrix::diag(ctx, p * unit(&mut rng), 1 + p.pow(j) * v)?
            }
            _ => {
                let g = random_matrix(ctx, &mut rng, 3)?;
                if rng.gen_bool(0.5) {
                    g.scale_p(-1)
                } else {
                    g
                }
            }
        };
        let h = loop {
            let entries: [Vec<i128>; 4] =
                std::array::from_fn(|_| (0..r).map(|_| rng.gen_range(-p * p..=p * p)).collect());
            if entries.iter().all(|e| e.iter().all(|&c| c == 0)) {
                continue;
            }
            let h = LocalMatrix::from_coeff_entries(ctx, 0, entries)?;
            if h.det_valuation().is_ok_and(|v| v <= i64::from(n) + 1) {
                break h;
            }
        };
        out.push(gamma.conjugate_by(&h)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn coset_keys_match_membership() {
        let ctx = hecke_context(2, 1, 2).unwrap();
        let mats: Vec<LocalMatrix> = vec![
            LocalMatrix::diag(&ctx, 2, 1).unwrap(),
            LocalMatrix::from_ints(&ctx, 0, [2, 4, 0, 1]).unwrap(),
            LocalMatrix::from_ints(&ctx, 0, [2, 2, 0, 1]).unwrap(),
            LocalMatrix::diag(&ctx, 1, 2).unwrap(),
            LocalMatrix::from_ints(&ctx, 0, [3, 1, 5, 2]).unwrap(),
            LocalMatrix::from_ints(&ctx, -1, [1, 0, 4, 2]).unwrap(),
            LocalMatrix::from_ints(&ctx, 0, [1, 4, 4, 17]).unwrap(),
            LocalMatrix::from_ints(&ctx, 0, [6, 1, 8, 3]).unwrap(),
        ];
        for n in 0..=2 {
            for a in &mats {
                for b in &mats {
                    let member = in_congruence_subgroup(&a.inverse().unwrap().mul(b).unwrap(), n).unwrap();
                    assert_eq!(coset_key(a, n).unwrap() == coset_key(b, n).unwrap(), member, "{a} {b} n={n}");
                }
            }
        }
    }

    #[test]
    fn coset_key_examples() {
        let ctx = hecke_context(2, 1, 1).unwrap();
        for n in 1..=2 {
            let a = LocalMatrix::diag(&ctx, 2, 1).unwrap();
            // g⁻¹g' = [[1, p^n], [0, 1]] ∈ Γ(p^n)
            let b = LocalMatrix::from_ints(&ctx, 0, [2, 1 << (n + 1), 0, 1]).unwrap();
            assert_eq!(coset_key(&a, n).unwrap(), coset_key(&b, n).unwrap());
            let c = LocalMatrix::from_ints(&ctx, 0, [2, 1 << n, 0, 1]).unwrap();
            assert_ne!(coset_key(&a, n).unwrap(), coset_key(&c, n).unwrap());
        }
        let a = LocalMatrix::diag(&ctx, 2, 1).unwrap();
        let b = LocalMatrix::diag(&ctx, 1, 2).unwrap();
        assert_ne!(coset_key(&a, 1).unwrap(), coset_key(&b, 1).unwrap());
        for u in congruence_transversal(&ctx, 1, 3).unwrap() {
            assert_eq!(coset_key(&a.mul(&u).unwrap(), 1).unwrap(), coset_key(&a, 1).unwrap());
        }
    }

    #[test]
    fn transversal_sizes() {
        let ctx = hecke_context(2, 2, 1).unwrap();
        assert_eq!(congruence_transversal(&ctx, 1, 2).unwrap().len(), 256);
        assert_eq!(congruence_transversal(&ctx, 0, 1).unwrap().len(), 180);
        let ctx = hecke_context(3, 1, 1).unwrap();
        assert_eq!(congruence_transversal(&ctx, 0, 2).unwrap().len(), 3888);
    }

    #[test]
    fn phi_support_sizes() {
        let ctx = hecke_context(2, 1, 2).unwrap();
        assert_eq!(phi_support(&ctx, 0).unwrap().len(), 3);
        assert_eq!(phi_support(&ctx, 1).unwrap().len(), 18);
        assert_eq!(phi_support(&ctx, 2).unwrap().len(), (3 + 12) * 96);
    }

    #[test]
    fn level_zero_composition() {
        let ctx = hecke_context(2, 1, 0).unwrap();
        let phi0 = CosetFunction::phi(&ctx, 0).unwrap();
        assert_eq!(phi0.support().len(), 3);
        let at = |m: [i128; 4]| phi0.convolve_at(&phi0, &LocalMatrix::from_ints(&ctx, 0, m).unwrap()).unwrap();
        assert_eq!(at([4, 0, 0, 1]), rat(1, 1));
        assert_eq!(at([2, 0, 0, 2]), rat(3, 1));
        let ctx3 = hecke_context(3, 1, 0).unwrap();
        let phi0 = CosetFunction::phi(&ctx3, 0).unwrap();
        let g = LocalMatrix::diag(&ctx3, 9, 1).unwrap();
        assert_eq!(phi0.convolve_at(&phi0, &g).unwrap(), rat(1, 2));
        let g = LocalMatrix::diag(&ctx3, 3, 3).unwrap();
        assert_eq!(phi0.convolve_at(&phi0, &g).unwrap(), rat(4, 2));
    }

    #[test]
    fn unit_is_an_identity() {
        let ctx = hecke_context(2, 1, 1).unwrap();
        let phi = CosetFunction::phi(&ctx, 1).unwrap();
        let e = CosetFunction::unit(&ctx, 1);
        let samples = tower_samples(&ctx, 1, 50, 3).unwrap();
        for g in &samples {
            let v = phi.value(g).unwrap();
            assert_eq!(e.convolve_at(&phi, g).unwrap(), v);
            assert_eq!(phi.convolve_at(&e, g).unwrap(), v);
        }
    }

    #[test]
    fn convolution_is_associative_on_generators() {
        let ctx = hecke_context(2, 1, 1).unwrap();
        let gens = standard_generators(&ctx).unwrap();
        let f: Vec<_> = gens.iter().map(|(_, x)| CosetFunction::double_coset(&ctx, 1, x).unwrap()).collect();
        let (a, b, c) = (&f[1], &f[0], &f[2]);
        let ab = a.convolve(b).unwrap();
        let bc = b.convolve(c).unwrap();
        let abc = ab.convolve(c).unwrap();
        for (g, v) in abc.support() {
            assert_eq!(a.convolve_at(&bc, g).unwrap(), *v);
        }
        for (g, _) in a.convolve(&bc).unwrap().support() {
            assert_eq!(ab.convolve_at(c, g).unwrap(), abc.value(g).unwrap());
        }
    }

    #[test]
    fn centrality_at_q2_n1() {
        let ctx = hecke_context(2, 1, 1).unwrap();
        let gens = standard_generators(&ctx).unwrap();
        for res in centrality_check(&ctx, 1, &gens, 100, sampling::DEFAULT_SEED).unwrap() {
            assert_eq!(res.failures, 0, "{}", res.generator);
            assert!(res.nonzero > 0);
        }
    }

    #[test]
    fn tower_cancellation_example() {
        let ctx = hecke_context(2, 1, 1).unwrap();
        // k(g) = 1 = n: φ_{p,1,t} vanishes while φ_{p,2,t} does not
        let h = LocalMatrix::from_ints(&ctx, 0, [1, 0, 1, 2]).unwrap();
        let g = LocalMatrix::diag(&ctx, 2, 1).unwrap().conjugate_by(&h).unwrap();
        assert_eq!(g.k_of(), 1);
        let transversal = congruence_transversal(&ctx, 1, 2).unwrap();
        let (avg, plain) = tower_average(&g, 1, &transversal).unwrap();
        assert!(avg.is_zero());
        assert!(plain.is_zero());
        let d = LocalMatrix::diag(&ctx, 2, 1).unwrap();
        let (avg, _) = tower_average(&d, 1, &transversal).unwrap();
        assert_eq!(avg, phi_pnt(&d, 1).unwrap());
    }

    #[test]
    fn tower_identity_small() {
        for (p, n) in [(2, 1), (3, 1), (2, 2)] {
            let ctx = hecke_context(p, 1, n).unwrap();
            let samples = tower_samples(&ctx, n, 60, 11).unwrap();
            let rep = tower_identity_check(&ctx, n, &samples).unwrap();
            assert!(rep.passed(), "{:?}", rep.first_failure);
        }
    }
}
