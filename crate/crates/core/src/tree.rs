//! The Bruhat–Tits tree of `PGL_2(Q_q)`: lattice vertices in Hermite form, stabilized sets,
//! and orbital-integral ratios as weighted vertex sums.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use num::{BigInt, BigRational, Zero};
use rand::Rng;
use serde::Serialize;

use crate::error::{check_cap, domain, precision, Error, Result};
use crate::finite::{FiniteGl2, FiniteRing};
use crate::padic::{GaloisRingElement, LocalContext, LocalMatrix, RingMatrix};
use crate::sampling;
use crate::test_functions::{phi_branch, phi_pn, phi_pn_value, PhiBranch};

/// A homothety class of `Z_q`-lattices, represented by the unique lattice `Λ ⊆ Z_q²`,
/// `Λ ⊄ p Z_q²`, with column Hermite basis `[[p^s, b], [0, p^{d-s}]]`.
///
/// `b` is reduced modulo `p^s` and is a unit when `0 < s < d`; `d` is the distance to `v₀`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct TreeVertex {
    pub d: u32,
    pub s: u32,
    /// Coefficients of `b` in the polynomial basis.
    pub b: Vec<u64>,
}

impl fmt::Display for TreeVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let b: Vec<String> = self.b.iter().map(|c| c.to_string()).collect();
        let b = if b.len() == 1 { b[0].clone() } else { format!("({})", b.join(",")) };
        write!(f, "[[p^{}, {}], [0, p^{}]]", self.s, b, self.d - self.s)
    }
}

impl TreeVertex {
    /// The standard vertex `v₀`.
    pub fn root(r: usize) -> Self {
        TreeVertex { d: 0, s: 0, b: vec![0; r] }
    }

    pub fn distance(&self) -> u32 {
        self.d
    }

    fn b_elem(&self, ctx: &Arc<LocalContext>) -> GaloisRingElement {
        let cs: Vec<i128> = self.b.iter().map(|&c| c as i128).collect();
        GaloisRingElement::from_coeffs(ctx, &cs).expect("r coefficients")
    }

    /// The Hermite basis as an exact matrix.
    pub fn hermite_matrix(&self, ctx: &Arc<LocalContext>) -> Result<LocalMatrix> {
        let p = ctx.p() as i128;
        let ps = p.pow(self.s);
        let pt = p.pow(self.d - self.s);
        let b: Vec<i128> = self.b.iter().map(|&c| c as i128).collect();
        LocalMatrix::from_coeff_entries(ctx, 0, [vec![ps], b, vec![0], vec![pt]])
    }

    fn hermite_ring(&self, ctx: &Arc<LocalContext>) -> RingMatrix {
        let ps = GaloisRingElement::from_int(ctx, (ctx.p() as i128).pow(self.s));
        let pt = GaloisRingElement::from_int(ctx, (ctx.p() as i128).pow(self.d - self.s));
        RingMatrix::new(ps, self.b_elem(ctx), GaloisRingElement::zero(ctx), pt)
    }

    /// The neighbour one step closer to `v₀`, i.e. the class of `Λ + p^{d-1} Z_q²`.
    pub fn parent(&self, ctx: &Arc<LocalContext>) -> Result<Option<TreeVertex>> {
        if self.d == 0 {
            return Ok(None);
        }
        need_precision(ctx, self.d)?;
        let h = self.hermite_ring(ctx);
        let pd1 = GaloisRingElement::from_int(ctx, (ctx.p() as i128).pow(self.d - 1));
        let z = GaloisRingElement::zero(ctx);
        let cols = vec![
            [h.0[0].clone(), h.0[2].clone()],
            [h.0[1].clone(), h.0[3].clone()],
            [pd1.clone(), z.clone()],
            [z, pd1],
        ];
        Ok(Some(vertex_of_columns(ctx, cols, self.d)?))
    }

    /// The vertex `g · v`.
    pub fn act(&self, g: &LocalMatrix) -> Result<TreeVertex> {
        let ctx = g.context();
        let m = g.unit_part().mul(&self.hermite_ring(ctx));
        let dv = g.det_valuation()? - 2 * g.exponent() + i64::from(self.d);
        let bound = u32::try_from(dv).expect("integral matrix has non-negative det valuation");
        if g.precision() <= bound {
            return Err(precision(format!("lattice image needs precision above {bound}")));
        }
        need_precision(ctx, bound)?;
        let cols = vec![[m.0[0].clone(), m.0[2].clone()], [m.0[1].clone(), m.0[3].clone()]];
        vertex_of_columns(ctx, cols, bound)
    }
}

fn need_precision(ctx: &LocalContext, bound: u32) -> Result<()> {
    if ctx.precision() <= bound {
        Err(precision(format!("working precision {} must exceed {bound}", ctx.precision())))
    } else {
        Ok(())
    }
}

/// Homothety class of the lattice spanned by `cols`, assumed to contain `p^bound Z_q²`.
fn vertex_of_columns(ctx: &Arc<LocalContext>, mut cols: Vec<[GaloisRingElement; 2]>, bound: u32) -> Result<TreeVertex> {
    let pb = GaloisRingElement::from_int(ctx, (ctx.p() as i128).pow(bound));
    let z = GaloisRingElement::zero(ctx);
    cols.push([pb.clone(), z.clone()]);
    cols.push([z, pb]);
    let cols: Vec<[GaloisRingElement; 2]> =
        cols.into_iter().map(|[x, y]| [x.truncate(bound + 1), y.truncate(bound + 1)]).collect();
    // Pivot on the bottom entry of least valuation.
    let (pi, t) = cols
        .iter()
        .enumerate()
        .filter_map(|(i, c)| c[1].valuation().map(|v| (i, v)))
        .min_by_key(|&(i, v)| (v, i))
        .expect("p^bound e2 has a nonzero bottom entry");
    let unit = cols[pi][1].div_p_pow(t)?.inverse()?;
    let a = &cols[pi][0] * &unit;
    let mut s = bound;
    for (i, c) in cols.iter().enumerate() {
        if i == pi {
            continue;
        }
        let factor = c[1].div_p_pow(t)?;
        let top = (&c[0] - &(&factor * &a)).truncate(bound + 1);
        if let Some(v) = top.valuation() {
            s = s.min(v);
        }
    }
    let a = a.truncate(s);
    let content = [s, t, a.valuation().unwrap_or(u32::MAX)].into_iter().min().unwrap();
    let (s, t) = (s - content, t - content);
    let b = if content > 0 { a.div_p_pow(content)? } else { a }.truncate(s);
    Ok(TreeVertex { d: s + t, s, b: b.coeffs().to_vec() })
}

/// All vertices at distance at most `depth`, ordered by distance, then `s`, then `b`.
pub fn enumerate_vertices(ctx: &Arc<LocalContext>, depth: u32) -> Result<Vec<TreeVertex>> {
    let q = u128::from(ctx.q());
    let total: u128 = 1 + (1..=depth).map(|d| (q + 1) * q.pow(d - 1)).sum::<u128>();
    check_cap("tree vertices", total)?;
    let p = ctx.p();
    let r = ctx.r();
    let mut out = vec![TreeVertex::root(r)];
    for d in 1..=depth {
        out.push(TreeVertex { d, s: 0, b: vec![0; r] });
        for s in 1..=d {
            let base = p.pow(s);
            for idx in 0..base.pow(r as u32) {
                let mut b = Vec::with_capacity(r);
                let mut t = idx;
                for _ in 0..r {
                    b.push(t % base);
                    t /= base;
                }
                if s < d && b.iter().all(|c| c % p == 0) {
                    continue;
                }
                out.push(TreeVertex { d, s, b });
            }
        }
    }
    Ok(out)
}

/// Whether `γ Λ_v ⊆ Λ_v`, i.e. `adj(H) M H ≡ 0 mod p^{d-e}` for `γ = p^e M`.
pub fn stabilizes(gamma: &LocalMatrix, v: &TreeVertex) -> Result<bool> {
    let need = i64::from(v.d) - gamma.exponent();
    if need <= 0 {
        return Ok(true);
    }
    let need = need as u32;
    if gamma.precision() < need {
        return Err(precision(format!("stabilization test needs the matrix modulo p^{need}")));
    }
    let ctx = gamma.context();
    need_precision(ctx, need - 1)?;
    let h = v.hermite_ring(ctx);
    let x = h.adjugate().mul(gamma.unit_part()).mul(&h).truncate(need);
    Ok(x.0.iter().all(|e| e.is_zero()))
}

/// The stabilized vertices of `γ` inside a ball, with the nearest one.
#[derive(Clone, Debug, Serialize)]
pub struct FixedSetReport {
    pub gamma: String,
    pub depth: u32,
    pub stabilized: Vec<TreeVertex>,
    pub nearest: TreeVertex,
    /// Exactly one stabilized vertex attains the minimal distance.
    pub nearest_unique: bool,
    /// The stabilized vertices span a subtree.
    pub connected: bool,
    pub k_tree: u32,
}

/// Stabilized vertices of `γ` within distance `depth` of `v₀`.
pub fn fixed_set(gamma: &LocalMatrix, depth: u32) -> Result<FixedSetReport> {
    let ctx = gamma.context();
    let mut stabilized = Vec::new();
    for v in enumerate_vertices(ctx, depth)? {
        if stabilizes(gamma, &v)? {
            stabilized.push(v);
        }
    }
    let min_d = stabilized.iter().map(|v| v.d).min().ok_or(Error::NotStabilizable(depth))?;
    let at_min: Vec<&TreeVertex> = stabilized.iter().filter(|v| v.d == min_d).collect();
    let members: BTreeSet<&TreeVertex> = stabilized.iter().collect();
    let mut roots = 0;
    for v in &stabilized {
        match v.parent(ctx)? {
            Some(par) if members.contains(&par) => {}
            _ => roots += 1,
        }
    }
    Ok(FixedSetReport {
        gamma: gamma.to_string(),
        depth,
        nearest: at_min[0].clone(),
        nearest_unique: at_min.len() == 1,
        connected: roots == 1,
        k_tree: min_d,
        stabilized,
    })
}

/// Number of points of `P¹(F_q)` fixed by `γ mod p`, for integral `γ`.
pub fn stabilized_line_count(gamma: &LocalMatrix) -> Result<u64> {
    let res = LocalContext::new(gamma.context().p(), gamma.context().r(), 1)?;
    let m = gamma.integral_mod(&res)?;
    let ring = FiniteRing::galois(res.p(), res.r(), 1)?;
    let elems: Vec<GaloisRingElement> = (0..ring.size()).map(|i| field_elem(&res, i as u64)).collect();
    let one = GaloisRingElement::one(&res);
    let zero = GaloisRingElement::zero(&res);
    let mut points: Vec<[GaloisRingElement; 2]> = elems.iter().map(|y| [one.clone(), y.clone()]).collect();
    points.push([zero, one]);
    Ok(points
        .iter()
        .filter(|[x, y]| {
            let gx = &(&m.0[0] * x) + &(&m.0[1] * y);
            let gy = &(&m.0[2] * x) + &(&m.0[3] * y);
            (&(x * &gy) - &(y * &gx)).is_zero()
        })
        .count() as u64)
}

fn field_elem(ctx: &Arc<LocalContext>, idx: u64) -> GaloisRingElement {
    let p = ctx.p();
    let mut t = idx;
    let cs: Vec<i128> = (0..ctx.r())
        .map(|_| {
            let c = t % p;
            t /= p;
            c as i128
        })
        .collect();
    GaloisRingElement::from_coeffs(ctx, &cs).expect("r coefficients")
}

/// Lifts of all elements of `GL_2(F_q)` with digits in `[0, p)`.
fn residue_gl2_lifts(ctx: &Arc<LocalContext>) -> Result<Vec<RingMatrix>> {
    let group = FiniteGl2::new(Arc::new(FiniteRing::galois(ctx.p(), ctx.r(), 1)?))?;
    Ok(group.elements().iter().map(|m| RingMatrix(m.map(|e| field_elem(ctx, u64::from(e))))).collect())
}

/// Per-distance tally of an orbital ratio computation.
#[derive(Clone, Debug, Serialize)]
pub struct ShellTally {
    pub distance: u32,
    pub vertices: usize,
    /// `Σ_v w(v)` over the shell.
    #[serde(serialize_with = "crate::report::ser_rational")]
    pub weight: BigRational,
    /// `Σ_v w(v) f(v)` over the shell.
    #[serde(serialize_with = "crate::report::ser_rational")]
    pub contribution: BigRational,
}

/// Outcome of an orbital ratio computation.
#[derive(Clone, Debug, Serialize)]
pub struct OrbitalReport {
    #[serde(serialize_with = "crate::report::ser_rational")]
    pub ratio: BigRational,
    /// `Σ_v w(v) f(v)`, the orbital integral in units of the `v₀`-volume.
    #[serde(serialize_with = "crate::report::ser_rational")]
    pub raw_sum: BigRational,
    pub branch: String,
    pub shells: Vec<ShellTally>,
    /// Set when `γ` is not conjugate to an integral matrix and the ratio is 0 by support.
    pub flag: Option<String>,
}

/// Precision used for conjugated probes at level `n`.
fn orbital_context(gamma: &LocalMatrix, n: u32) -> Result<Arc<LocalContext>> {
    let c = gamma.context();
    c.with_precision(c.precision().max(6 * n + 8))
}

/// An integral conjugate `H⁻¹ γ H` of `γ`, found from its nearest stabilized vertex.
fn integral_conjugate(gamma: &LocalMatrix) -> Result<Option<LocalMatrix>> {
    if gamma.is_integral() {
        return Ok(Some(gamma.clone()));
    }
    let depth = gamma.k_of().max(0) as u32;
    match fixed_set(gamma, depth) {
        Ok(rep) => Ok(Some(gamma.conjugate_by(&rep.nearest.hermite_matrix(gamma.context())?)?)),
        Err(Error::NotStabilizable(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

fn branch_label(gamma: &LocalMatrix, n: u32) -> Result<String> {
    Ok(match phi_branch(gamma, n)? {
        PhiBranch::TraceNonUnit { .. } => "trace_non_unit".into(),
        PhiBranch::EllBelow { .. } => "ell_below_n".into(),
        PhiBranch::EllAtLeast { .. } => "ell_at_least_n".into(),
        PhiBranch::OffSupport => "off_support".into(),
    })
}

/// `O_γ(f) / O_γ(φ_{p,0})`, summing `f(g⁻¹γg)` over the vertices `v(g⁻¹γg) = v` with
/// `dist(v, v₀) <= depth`, each weighted by the fraction of `k ∈ GL_2(F_q)` realising it.
pub fn orbital_ratio_with(
    gamma: &LocalMatrix,
    depth: u32,
    f: impl Fn(&LocalMatrix) -> Result<BigRational>,
) -> Result<OrbitalReport> {
    let ctx = gamma.context();
    let q = ctx.q();
    let det_v = gamma.det_valuation()?;
    if det_v != 1 {
        return Err(domain(format!("orbital ratio needs v(det) = 1, got {det_v}")));
    }
    let Some(gamma) = integral_conjugate(gamma)? else {
        return Ok(OrbitalReport {
            ratio: BigRational::zero(),
            raw_sum: BigRational::zero(),
            branch: "not_integral".into(),
            shells: vec![],
            flag: Some("not conjugate to an integral matrix".into()),
        });
    };
    let lifts = residue_gl2_lifts(ctx)?;
    let order = BigInt::from(lifts.len());
    let conjugated: Vec<LocalMatrix> = lifts
        .iter()
        .map(|k| {
            let k = LocalMatrix::from_ring(0, k.clone())?;
            gamma.conjugate_by(&k)
        })
        .collect::<Result<_>>()?;
    let mut shells = Vec::new();
    let mut raw_sum = BigRational::zero();
    let vertices = enumerate_vertices(ctx, depth)?;
    for d in 0..=depth {
        let shell: Vec<&TreeVertex> = vertices.iter().filter(|v| v.d == d).collect();
        let mut weight = BigRational::zero();
        let mut contribution = BigRational::zero();
        for v in &shell {
            let h = v.hermite_matrix(ctx)?;
            let h_inv = h.inverse()?;
            let parent = v.parent(ctx)?;
            for x in &conjugated {
                // g⁻¹ γ g with g = k H⁻¹
                let probe = h.mul(x)?.mul(&h_inv)?;
                let lands_here = stabilizes(&probe, v)?
                    && match &parent {
                        Some(par) => !stabilizes(&probe, par)?,
                        None => true,
                    };
                if !lands_here {
                    continue;
                }
                if probe.k_of() != i64::from(d) {
                    return Err(domain(format!("k(g⁻¹γg) = {} but the nearest vertex has distance {d}", probe.k_of())));
                }
                let w = BigRational::new(BigInt::from(1), order.clone());
                contribution += &w * f(&probe)?;
                weight += w;
            }
        }
        raw_sum += &contribution;
        shells.push(ShellTally { distance: d, vertices: shell.len(), weight, contribution });
    }
    let ratio = &raw_sum * BigRational::from_integer(BigInt::from(q - 1));
    Ok(OrbitalReport { ratio, raw_sum, branch: String::new(), shells, flag: None })
}

/// `O_γ(φ_{p,n}) / O_γ(φ_{p,0})` by enumeration over the ball of radius `n - 1`.
pub fn orbital_ratio(gamma: &LocalMatrix, n: u32) -> Result<OrbitalReport> {
    if n == 0 {
        return Err(Error::InvalidInput("level n must be at least 1".into()));
    }
    let wide = orbital_context(gamma, n)?;
    let gamma = gamma.with_context(&wide)?;
    let mut report = orbital_ratio_with(&gamma, n - 1, |g| phi_pn(g, n))?;
    if report.flag.is_none() {
        let integral = integral_conjugate(&gamma)?.expect("checked above");
        report.branch = branch_label(&integral, n)?;
    }
    Ok(report)
}

/// The same ratio from the per-vertex weights `q/(q+1)` or `(q-1)/(q+1)` and shell sizes.
pub fn orbital_ratio_by_weights(gamma: &LocalMatrix, n: u32) -> Result<BigRational> {
    let ctx = gamma.context();
    let q = ctx.q();
    if gamma.det_valuation()? != 1 {
        return Err(domain("orbital ratio needs v(det) = 1"));
    }
    let wide = orbital_context(gamma, n)?;
    let Some(gamma) = integral_conjugate(&gamma.with_context(&wide)?)? else {
        return Ok(BigRational::zero());
    };
    let fixed = stabilized_line_count(&gamma)?;
    let w = BigRational::new(BigInt::from(q + 1 - fixed), BigInt::from(q + 1));
    let mut sum = BigRational::zero();
    for d in 0..n {
        let branch = match phi_branch(&gamma, n)? {
            PhiBranch::OffSupport => PhiBranch::OffSupport,
            PhiBranch::TraceNonUnit { .. } => PhiBranch::TraceNonUnit { k: i64::from(d) },
            _ => match gamma.ell_below(n - d)? {
                Some(ell) => PhiBranch::EllBelow { k: i64::from(d), ell },
                None => PhiBranch::EllAtLeast { k: i64::from(d) },
            },
        };
        let value = phi_pn_value(branch, q, n);
        if d == 0 {
            sum += value;
        } else {
            let shell = BigInt::from(q + 1) * BigInt::from(q).pow(d - 1);
            sum += value * &w * BigRational::from_integer(shell);
        }
    }
    Ok(sum * BigRational::from_integer(BigInt::from(q - 1)))
}

/// A semisimple probe: the companion matrix `[[0, 1], [-p u, tr]]` and a conjugate `h⁻¹ γ h`.
#[derive(Clone, Debug)]
pub struct OrbitalSample {
    pub companion: LocalMatrix,
    pub probe: LocalMatrix,
}

/// Probes cycling through `p | tr`, eigenvalue 1 (`ℓ = ∞`) and random traces, conjugated by
/// random integral `h` with `v(det h) <= 3`.
pub fn orbital_samples(ctx: &Arc<LocalContext>, count: usize, seed: u64) -> Result<Vec<OrbitalSample>> {
    let mut rng = sampling::rng(seed);
    let p = ctx.p() as i128;
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let u = loop {
            let u = rng.gen_range(1..4 * p);
            if u % p != 0 {
                break u;
            }
        };
        let tr = match out.len() % 4 {
            0 => p * rng.gen_range(-4..=4),
            1 => 1 + p * u,
            _ => rng.gen_range(-40..=40),
        };
        let companion = LocalMatrix::from_ints(ctx, 0, [0, 1, -p * u, tr])?;
        let h = LocalMatrix::from_ints(ctx, 0, std::array::from_fn(|_| rng.gen_range(-9..=9)))?;
        if !h.det_valuation().is_ok_and(|v| v <= 3) {
            continue;
        }
        let probe = companion.conjugate_by(&h)?;
        out.push(OrbitalSample { companion, probe });
    }
    Ok(out)
}

/// Random conjugates `h⁻¹ g h` with integral `g`, `h` of determinant valuation at most 3.
pub fn conjugated_probes(ctx: &Arc<LocalContext>, count: usize, seed: u64) -> Result<Vec<LocalMatrix>> {
    let mut rng = sampling::rng(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let g = LocalMatrix::from_ints(ctx, 0, std::array::from_fn(|_| rng.gen_range(-20..=20)))?;
        let h = LocalMatrix::from_ints(ctx, 0, std::array::from_fn(|_| rng.gen_range(-20..=20)))?;
        if g.det_valuation().is_ok_and(|v| v <= 3) && h.det_valuation().is_ok_and(|v| v <= 3) {
            out.push(g.conjugate_by(&h)?);
        }
    }
    Ok(out)
}
