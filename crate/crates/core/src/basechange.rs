//! Finite-level base change between `GL_2(GR(p^n, r))` and `GL_2(Z/p^n)`: σ-conjugacy,
//! the norm map on classes, twisted centralizers, unit-group exactness, and averaged identities.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use num::{BigInt, BigRational};
use serde::Serialize;

use crate::cyclotomic::CyclotomicValue;
use crate::error::{domain, Error, Result};
use crate::finite::{Classes, Elem, FiniteGl2, FiniteRing, Mat};
use crate::rep::ClassFunction;

/// `GL_2(GR(p^n, r))` next to `GL_2(Z/p^n)`, with the norm map matched on classes.
///
/// Elements of `Z/p^n` have the same table index in both rings, so base matrices embed verbatim.
pub struct NormCorrespondence {
    p: u64,
    r: usize,
    n: u32,
    big: FiniteGl2,
    base: FiniteGl2,
    sigma: Classes,
    big_conj: Classes,
    base_conj: Classes,
    /// Base conjugacy class of each `GL_2(GR)` conjugacy class that meets `GL_2(Z/p^n)`.
    base_class_of_big: HashMap<u32, u32>,
    /// Two base classes fused in `GL_2(GR)`.
    embedding_injective: bool,
}

/// One σ-conjugacy class.
#[derive(Clone, Debug, Serialize)]
pub struct SigmaOrbit {
    pub rep: String,
    pub size: usize,
    /// `#{h : h⁻¹ δ σ(h) = δ}`.
    pub tw_centralizer: usize,
    /// Index of the base conjugacy class containing `Nδ`, if any.
    pub norm_class: Option<usize>,
    pub norm_class_rep: Option<String>,
    /// `#{g ∈ GL_2(Z/p^n) : g γ = γ g}` for that class representative.
    pub norm_centralizer: Option<usize>,
}

/// σ-conjugacy classes of `GL_2(GR(p^n, r))` with their norm images.
#[derive(Clone, Debug, Serialize)]
pub struct SigmaOrbitTable {
    pub p: u64,
    pub r: usize,
    pub n: u32,
    pub group_order: usize,
    pub base_order: usize,
    pub base_classes: usize,
    pub orbits: Vec<SigmaOrbit>,
    /// The norm induces a bijection from σ-classes onto base conjugacy classes.
    pub bijection: bool,
    /// `|G_{δσ}| = |G_{Nδ}|` on every orbit.
    pub centralizers_match: bool,
    /// Orbit size times twisted centralizer order equals the group order on every orbit.
    pub orbit_stabilizer: bool,
    /// `Σ_γ |GL_2(GR)| / |G_γ| = |GL_2(GR)|` over base class representatives.
    pub counting_identity: bool,
}

impl SigmaOrbitTable {
    pub fn passed(&self) -> bool {
        self.bijection && self.centralizers_match && self.orbit_stabilizer && self.counting_identity
    }
}

impl NormCorrespondence {
    pub fn new(p: u64, r: usize, n: u32) -> Result<Self> {
        if r < 2 {
            return Err(Error::InvalidInput("base change needs degree r >= 2".into()));
        }
        let big = FiniteGl2::new(Arc::new(FiniteRing::galois(p, r, n)?))?;
        let base = FiniteGl2::new(Arc::new(FiniteRing::prime_power(p, n)?))?;
        let sigma = big.sigma_classes();
        let big_conj = big.conjugacy_classes();
        let base_conj = base.conjugacy_classes();
        let mut base_class_of_big = HashMap::new();
        let mut embedding_injective = true;
        for (c, &rep) in base_conj.reps.iter().enumerate() {
            let g = base.element(rep as usize);
            let i = big.index_of(&g).expect("base matrices embed");
            if base_class_of_big.insert(big_conj.class_of[i], c as u32).is_some() {
                embedding_injective = false;
            }
        }
        Ok(NormCorrespondence {
            p,
            r,
            n,
            big,
            base,
            sigma,
            big_conj,
            base_conj,
            base_class_of_big,
            embedding_injective,
        })
    }

    pub fn big(&self) -> &FiniteGl2 {
        &self.big
    }

    pub fn base(&self) -> &FiniteGl2 {
        &self.base
    }

    pub fn sigma_classes(&self) -> &Classes {
        &self.sigma
    }

    /// Base class of `Nδ` up to `GL_2(GR)`-conjugacy.
    pub fn norm_class(&self, delta: &Mat) -> Option<usize> {
        let n = self.big.norm_map(delta);
        let i = self.big.index_of(&n)?;
        self.base_class_of_big.get(&self.big_conj.class_of[i]).map(|&c| c as usize)
    }

    pub fn base_class_rep(&self, c: usize) -> Mat {
        self.base.element(self.base_conj.reps[c] as usize)
    }

    pub fn table(&self) -> SigmaOrbitTable {
        let order = self.big.order();
        let mut seen = HashSet::new();
        let mut bijection = self.embedding_injective && self.sigma.len() == self.base_conj.len();
        let mut centralizers_match = true;
        let mut orbit_stabilizer = true;
        let orbits: Vec<SigmaOrbit> = self
            .sigma
            .reps
            .iter()
            .zip(&self.sigma.sizes)
            .map(|(&rep, &size)| {
                let delta = self.big.element(rep as usize);
                let tw = self.big.twisted_centralizer_order(&delta);
                let norm_class = self.norm_class(&delta);
                let (norm_class_rep, norm_centralizer) = match norm_class {
                    Some(c) => {
                        let g = self.base_class_rep(c);
                        (Some(self.base.format(&g)), Some(self.base.centralizer_order(&g)))
                    }
                    None => (None, None),
                };
                bijection &= norm_class.is_some_and(|c| seen.insert(c));
                centralizers_match &= norm_centralizer == Some(tw);
                orbit_stabilizer &= size * tw == order;
                SigmaOrbit {
                    rep: self.big.format(&delta),
                    size,
                    tw_centralizer: tw,
                    norm_class,
                    norm_class_rep,
                    norm_centralizer,
                }
            })
            .collect();
        let counting: usize =
            (0..self.base_conj.len()).map(|c| order / self.base.centralizer_order(&self.base_class_rep(c))).sum();
        SigmaOrbitTable {
            p: self.p,
            r: self.r,
            n: self.n,
            group_order: order,
            base_order: self.base.order(),
            base_classes: self.base_conj.len(),
            orbits,
            bijection,
            centralizers_match,
            orbit_stabilizer,
            counting_identity: counting == order,
        }
    }
}

/// σ-conjugacy classes of `GL_2(GR(p^n, r))` matched against conjugacy classes of `GL_2(Z/p^n)`.
pub fn sigma_orbits(p: u64, r: usize, n: u32) -> Result<SigmaOrbitTable> {
    Ok(NormCorrespondence::new(p, r, n)?.table())
}

/// Exactness report for `1 → Z_{γ,p} → Z_{γ,p^r} → Z_{γ,p^r} → Z_{γ,p} → 1`.
#[derive(Clone, Debug, Serialize)]
pub struct ExactnessReport {
    pub gamma: String,
    pub small_units: usize,
    pub big_units: usize,
    /// The inclusion is injective and lands in `Z_{γ,p^r}`.
    pub injective: bool,
    /// `ker(x ↦ x σ(x)⁻¹)` is the image of `Z_{γ,p}`.
    pub exact_at_first: bool,
    /// `im(x ↦ x σ(x)⁻¹) = ker N`.
    pub exact_at_second: bool,
    /// `N` maps onto `Z_{γ,p}`.
    pub surjective: bool,
}

impl ExactnessReport {
    pub fn passed(&self) -> bool {
        self.injective && self.exact_at_first && self.exact_at_second && self.surjective
    }
}

/// Units of the subring `R[γ] = {a + bγ}` of `M_2(R)`.
fn polynomial_units(group: &FiniteGl2, coeffs: &[Elem], gamma: &Mat) -> HashSet<Mat> {
    let ring = group.ring();
    let mut out = HashSet::new();
    for &a in coeffs {
        for &b in coeffs {
            let m = [
                ring.add(a, ring.mul(b, gamma[0])),
                ring.mul(b, gamma[1]),
                ring.mul(b, gamma[2]),
                ring.add(a, ring.mul(b, gamma[3])),
            ];
            if ring.is_unit(group.det(&m)) {
                out.insert(m);
            }
        }
    }
    out
}

/// Checks the four exactness conditions for `γ ∈ GL_2(Z/p^n)` by exhaustive enumeration.
pub fn unit_group_exactness(corr: &NormCorrespondence, gamma: &Mat) -> Result<ExactnessReport> {
    let big = corr.big();
    let base = corr.base();
    if base.index_of(gamma).is_none() {
        return Err(domain("γ must lie in GL_2(Z/p^n)"));
    }
    let small_ring = base.ring();
    let big_ring = big.ring();
    let small_coeffs: Vec<Elem> = (0..small_ring.size() as Elem).collect();
    let big_coeffs: Vec<Elem> = (0..big_ring.size() as Elem).collect();
    let small = polynomial_units(base, &small_coeffs, gamma);
    let large = polynomial_units(big, &big_coeffs, gamma);
    let injective = small.iter().all(|x| large.contains(x));
    let fixed: HashSet<Mat> = large.iter().filter(|x| big.frobenius(x) == **x).copied().collect();
    let exact_at_first = fixed == small;
    let image: HashSet<Mat> = large.iter().map(|x| big.mul(x, &big.inv(&big.frobenius(x)))).collect();
    let one = big.identity();
    let kernel: HashSet<Mat> = large.iter().filter(|x| big.norm_map(x) == one).copied().collect();
    let norms: HashSet<Mat> = large.iter().map(|x| big.norm_map(x)).collect();
    Ok(ExactnessReport {
        gamma: base.format(gamma),
        small_units: small.len(),
        big_units: large.len(),
        injective,
        exact_at_first,
        exact_at_second: image == kernel,
        surjective: norms == small,
    })
}

/// Outcome of the averaged base-change identity at one level.
#[derive(Clone, Debug, Serialize)]
pub struct BcUnitReport {
    pub p: u64,
    pub r: usize,
    pub level: u32,
    pub k: u32,
    pub checked: usize,
    pub failures: usize,
    /// First mismatch as `(δ, lhs, rhs)`.
    pub first_failure: Option<(String, CyclotomicValue, CyclotomicValue)>,
}

impl BcUnitReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Matrices `≡ 1 mod p^k` in a group over `GR(p^j, ·)`.
fn congruence_kernel(group: &FiniteGl2, p: u64, k: u32) -> Vec<Mat> {
    let ring = group.ring();
    let modulus = p.pow(k);
    let residue_is = |e: Elem, target: u64| -> bool {
        let mut t = u64::from(e);
        let base = match ring.kind() {
            crate::finite::RingKind::Galois { p, n, .. } => p.pow(n),
            crate::finite::RingKind::Integers { m } => m,
        };
        let mut first = true;
        while t > 0 || first {
            let c = t % base;
            let want = if first { target } else { 0 };
            if c % modulus != want % modulus {
                return false;
            }
            t /= base;
            first = false;
        }
        true
    };
    group
        .elements()
        .iter()
        .filter(|m| residue_is(m[0], 1) && residue_is(m[1], 0) && residue_is(m[2], 0) && residue_is(m[3], 1))
        .copied()
        .collect()
}

/// `(e_{Γ(p^k)} ∗ (f ∘ N))(δ) = (e_{Γ(p^k)} ∗ f)(Nδ)` for every `δ ∈ GL_2(GR(p^j, r))`.
///
/// `f` lives on `GL_2(Z/p^j)`; `f(Nδ)` is read on the base class `GL_2(GR)`-conjugate to `Nδ`.
pub fn bc_unit_identity(corr: &NormCorrespondence, f: &ClassFunction, k: u32) -> Result<BcUnitReport> {
    let level = corr.n;
    if f.group().p() != corr.p || f.group().n() != level {
        return Err(domain("class function lives at a different level"));
    }
    if k > level {
        return Err(domain(format!("k = {k} exceeds the level {level}")));
    }
    let big = corr.big();
    let base = corr.base();
    let field = f.group().field();
    let f_of_base_class: Vec<CyclotomicValue> =
        (0..corr.base_conj.len()).map(|c| f.value_at(&corr.base_class_rep(c)).cloned()).collect::<Result<_>>()?;
    let big_kernel = congruence_kernel(big, corr.p, k);
    let base_kernel = congruence_kernel(base, corr.p, k);
    let average = |hist: &[i64], total: usize| -> CyclotomicValue {
        let mut acc = CyclotomicValue::zero(field);
        for (c, &count) in hist.iter().enumerate() {
            if count != 0 {
                acc = &acc + &f_of_base_class[c].scale(&BigRational::from_integer(BigInt::from(count)));
            }
        }
        acc.scale(&BigRational::new(BigInt::from(1), BigInt::from(total)))
    };
    // The right side only depends on the base class of Nδ.
    let rhs_of_class: Vec<CyclotomicValue> = (0..corr.base_conj.len())
        .map(|c| {
            let g = corr.base_class_rep(c);
            let mut hist = vec![0i64; corr.base_conj.len()];
            for v in &base_kernel {
                let i = base.index_of(&base.mul(&g, v)).expect("group element");
                hist[corr.base_conj.class_of[i] as usize] += 1;
            }
            average(&hist, base_kernel.len())
        })
        .collect();
    let mut failures = 0;
    let mut first_failure = None;
    for delta in big.elements() {
        let mut hist = vec![0i64; corr.base_conj.len()];
        for u in &big_kernel {
            let c = corr.norm_class(&big.mul(delta, u)).ok_or_else(|| domain("norm outside every base class"))?;
            hist[c] += 1;
        }
        let lhs = average(&hist, big_kernel.len());
        let c = corr.norm_class(delta).ok_or_else(|| domain("norm outside every base class"))?;
        let rhs = &rhs_of_class[c];
        if &lhs != rhs {
            failures += 1;
            first_failure.get_or_insert_with(|| (big.format(delta), lhs, rhs.clone()));
        }
    }
    Ok(BcUnitReport { p: corr.p, r: corr.r, level, k, checked: big.order(), failures, first_failure })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rep::ClassGroup;
    use crate::sampling;

    /// σ-orbits by brute force over all `h`, independent of the generator BFS.
    fn brute_sigma_orbit_count(g: &FiniteGl2) -> usize {
        let mut seen = vec![false; g.order()];
        let mut count = 0;
        for i in 0..g.order() {
            if seen[i] {
                continue;
            }
            count += 1;
            let x = g.element(i);
            for h in g.elements() {
                seen[g.index_of(&g.sigma_conj(h, &x)).unwrap()] = true;
            }
        }
        count
    }

    #[test]
    fn sigma_orbits_small() {
        let t = sigma_orbits(2, 2, 1).unwrap();
        assert_eq!(t.base_classes, 3);
        assert_eq!(t.orbits.len(), 3);
        assert!(t.passed());
        let corr = NormCorrespondence::new(2, 2, 1).unwrap();
        assert_eq!(brute_sigma_orbit_count(corr.big()), 3);
    }

    #[test]
    fn identity_orbit_maps_to_identity_class() {
        let corr = NormCorrespondence::new(3, 2, 1).unwrap();
        let id = corr.big().identity();
        let c = corr.norm_class(&id).unwrap();
        assert_eq!(corr.base_class_rep(c), corr.base().identity());
        let t = corr.table();
        assert!(t.centralizers_match && t.bijection);
    }

    #[test]
    fn norm_is_constant_on_sigma_orbits() {
        let corr = NormCorrespondence::new(2, 2, 1).unwrap();
        let g = corr.big();
        for x in g.elements() {
            for h in g.elements() {
                assert_eq!(corr.norm_class(&g.sigma_conj(h, x)), corr.norm_class(x));
            }
        }
    }

    #[test]
    fn exactness_identity_and_scalars() {
        let corr = NormCorrespondence::new(2, 2, 2).unwrap();
        let id = corr.base().identity();
        let rep = unit_group_exactness(&corr, &id).unwrap();
        assert!(rep.passed());
        assert_eq!(rep.small_units, 2);
        assert_eq!(rep.big_units, 12);
        let scalar = [3, 0, 0, 3];
        assert_eq!(unit_group_exactness(&corr, &scalar).unwrap().big_units, 12);
    }

    #[test]
    fn exactness_sampled() {
        let corr = NormCorrespondence::new(2, 2, 2).unwrap();
        for g in sampling::choose_many(corr.base().elements(), 20, sampling::DEFAULT_SEED) {
            assert!(unit_group_exactness(&corr, &g).unwrap().passed(), "{g:?}");
        }
    }

    #[test]
    fn bc_unit_trivial_cases() {
        let corr = NormCorrespondence::new(2, 2, 1).unwrap();
        let cg = ClassGroup::new(2, 1).unwrap();
        assert!(bc_unit_identity(&corr, &cg.trivial(), 0).unwrap().passed());
        assert!(bc_unit_identity(&corr, &cg.class_indicator(1), 1).unwrap().passed());
    }

    #[test]
    fn bc_unit_level_two() {
        let corr = NormCorrespondence::new(2, 2, 2).unwrap();
        let cg = ClassGroup::new(2, 2).unwrap();
        for c in [0, 3] {
            let rep = bc_unit_identity(&corr, &cg.class_indicator(c), 1).unwrap();
            assert!(rep.passed(), "{:?}", rep.first_failure);
            assert_eq!(rep.checked, 46080);
        }
    }
}
