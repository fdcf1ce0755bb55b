//! Regularized quantum periods of Fano quiver flag zero loci via the
//! Abelian/non-Abelian correspondence.
//!
//! Each curve class of the Abelianized variety contributes a product of
//! linear factors; the scalar (degree-zero) part of the per-degree sum is
//! extracted exactly by specializing every divisor variable to an integer
//! multiple of a single parameter and evaluating the resulting univariate
//! rational function at zero. The per-degree sums are regular there; a
//! pole is a hard error, never perturbed away.

use crate::cohomology::RootData;
use crate::cones::{self, CurveClass};
use crate::linalg::{self, rat, Rat};
use crate::poly::{factorial, rat_to_string, RatFn, UPoly};
use crate::quiver::Quiver;
use crate::schur::BundleSpec;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PeriodError {
    #[error("per-degree sum has a pole at the specialization origin (degree {degree})")]
    PoleAtZero { degree: i64 },
    #[error("independent specializations disagree; the specialization is not generic")]
    SpecializationMismatch,
    #[error("bundle pairs negatively with an effective curve class; roots are not nef")]
    NegativeBundlePairing,
    #[error("specialization vector must have pairwise distinct entries within each block")]
    NonGenericSpecialization,
    #[error("anticanonical lift is not strictly positive on the effective cone; enumeration would not terminate")]
    UnboundedEnumeration,
    #[error("the zero locus is not Fano (anticanonical minus bundle class is not ample)")]
    NotFano,
    #[error("bundle roots are not all nef on the Abelianization")]
    RootsNotNef,
    #[error("cone computation failed: {0}")]
    Cone(#[from] cones::ConeError),
    #[error("bundle data error: {0}")]
    Schur(#[from] crate::schur::SchurError),
}

/// Regularized quantum period coefficients `alpha_0..alpha_N`.
///
/// Serializes as a list of decimal strings, `"p/q"` for non-integers, so
/// the representation stays exact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodSequence {
    pub alpha: Vec<Rat>,
}

impl PeriodSequence {
    pub fn to_strings(&self) -> Vec<String> {
        self.alpha.iter().map(rat_to_string).collect()
    }

    pub fn from_strings(items: &[String]) -> Option<PeriodSequence> {
        let alpha = items
            .iter()
            .map(|s| crate::poly::rat_from_string(s))
            .collect::<Option<Vec<_>>>()?;
        Some(PeriodSequence { alpha })
    }
}

impl Serialize for PeriodSequence {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_strings().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PeriodSequence {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let items = Vec::<String>::deserialize(deserializer)?;
        PeriodSequence::from_strings(&items)
            .ok_or_else(|| serde::de::Error::custom("malformed rational in period sequence"))
    }
}

/// Sign relating the Novikov variables of the Abelianization and the
/// quotient: `(-1)^(sum of d_i (r_i - 1))` for a curve class on the
/// quotient.
pub fn fiber_sign(q: &Quiver, d: &CurveClass) -> i64 {
    let total: i64 = d
        .0
        .iter()
        .zip(1..q.vertex_count())
        .map(|(&di, v)| di * (q.rank(v) - 1))
        .sum();
    if total % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Everything fixed across one period computation.
struct PeriodContext {
    /// Abelianized quiver.
    ab: Quiver,
    /// Block membership of each Abelian vertex.
    block: Vec<usize>,
    /// Specialization weight per non-source Abelian vertex.
    weights: Vec<i64>,
    /// Abelian arrows as (source, target) with multiplicity expanded.
    arrows: Vec<(usize, usize)>,
    /// Bundle split roots.
    bundle_roots: Vec<Vec<i64>>,
    /// Lift of the anticanonical class of the zero locus.
    minus_k: Vec<i64>,
    ranks: Vec<i64>,
    /// Number of clone pairs over all blocks: every term's pole order at
    /// the origin is at most this, coming solely from the pair
    /// denominators.
    pole_order: usize,
}

impl PeriodContext {
    fn new(q: &Quiver, e: &BundleSpec, weights: Option<Vec<i64>>) -> Result<Self, PeriodError> {
        let (ab, block) = q.abelianize();
        let n = ab.picard_rank();
        let weights = weights.unwrap_or_else(|| (1..=n as i64).collect());
        if weights.len() != n {
            return Err(PeriodError::NonGenericSpecialization);
        }
        // Distinctness within each block is what keeps the pair
        // denominators nonzero.
        for v in 1..q.vertex_count() {
            let ws: Vec<i64> = (1..=n).filter(|&a| block[a] == v).map(|a| weights[a - 1]).collect();
            for (i, a) in ws.iter().enumerate() {
                if ws[i + 1..].contains(a) {
                    return Err(PeriodError::NonGenericSpecialization);
                }
            }
        }
        let mut arrows = Vec::new();
        for u in 0..ab.vertex_count() {
            for v in 0..ab.vertex_count() {
                for _ in 0..ab.arrows(u, v) {
                    arrows.push((u, v));
                }
            }
        }
        let rd = RootData::new(q, e).map_err(|err| match err {
            crate::cohomology::CohomologyError::Schur(s) => PeriodError::Schur(s),
            _ => PeriodError::RootsNotNef,
        })?;
        let minus_k = rd.anticanonical_lift(n);
        let pole_order: i64 = (1..q.vertex_count())
            .map(|v| q.rank(v) * (q.rank(v) - 1) / 2)
            .sum();
        Ok(PeriodContext {
            ab,
            block,
            weights,
            arrows,
            bundle_roots: rd.bundle_roots,
            minus_k,
            ranks: (0..q.vertex_count()).map(|v| q.rank(v)).collect(),
            pole_order: pole_order as usize,
        })
    }

    /// The Laurent expansion of one term around the origin, as the
    /// coefficients of the powers `-pole_order ..= 0`. Division happens as
    /// an exact power series against the unit part of the denominator; the
    /// parameter powers are only ever split off the pair denominators,
    /// whose count is `pole_order`.
    fn term_laurent(&self, d: &[i64]) -> Result<Vec<Rat>, PeriodError> {
        let mut num = UPoly::one();
        let mut den_unit = UPoly::one();
        let mut den_const = Rat::one();
        let curve = CurveClass(d.to_vec());
        let projected = curve.project(&self.block, self.ranks.len() - 1);
        let mut sign: i64 = 1;
        for (i, &di) in projected.0.iter().enumerate() {
            if di * (self.ranks[i + 1] - 1) % 2 != 0 {
                sign = -sign;
            }
        }
        num = num.scale(&rat(sign));
        let n = self.ab.picard_rank();
        for v in 1..self.ranks.len() {
            let clones: Vec<usize> = (1..=n).filter(|&a| self.block[a] == v).collect();
            for (i, &a) in clones.iter().enumerate() {
                for &b in &clones[i + 1..] {
                    let wdiff = self.weights[a - 1] - self.weights[b - 1];
                    let ddiff = rat(d[a - 1] - d[b - 1]);
                    num = num.mul(&UPoly::linear(ddiff, rat(wdiff)));
                    den_const *= rat(wdiff);
                }
            }
        }
        for &(u, v) in &self.arrows {
            let w = rat(self.weights[v - 1] - if u > 0 { self.weights[u - 1] } else { 0 });
            let du = if u > 0 { d[u - 1] } else { 0 };
            let ell = d[v - 1] - du;
            if ell >= 0 {
                for m in 1..=ell {
                    den_unit = den_unit.mul(&UPoly::linear(rat(m), w.clone()));
                }
            } else {
                for m in ell + 1..=0 {
                    num = num.mul(&UPoly::linear(rat(m), w.clone()));
                }
            }
        }
        for root in &self.bundle_roots {
            let pairing = linalg::dot(d, root);
            if pairing < 0 {
                return Err(PeriodError::NegativeBundlePairing);
            }
            let w = rat(linalg::dot(root, &self.weights));
            for m in 1..=pairing {
                num = num.mul(&UPoly::linear(rat(m), w.clone()));
            }
        }
        let coeffs = num.series_quotient(&den_unit, self.pole_order + 1);
        Ok(coeffs.into_iter().map(|c| c / &den_const).collect())
    }

    /// The I-function contribution of one Abelian curve class, specialized
    /// to the single parameter.
    fn term_value(&self, d: &[i64]) -> Result<RatFn, PeriodError> {
        let mut num = UPoly::one();
        let mut den = UPoly::one();
        // Global sign from the projected class.
        let curve = CurveClass(d.to_vec());
        let projected = curve.project(&self.block, self.ranks.len() - 1);
        let mut sign: i64 = 1;
        for (i, &di) in projected.0.iter().enumerate() {
            if di * (self.ranks[i + 1] - 1) % 2 != 0 {
                sign = -sign;
            }
        }
        num = num.mul(&UPoly::constant(rat(sign)));
        // Pair factors within each block, one per unordered pair.
        let n = self.ab.picard_rank();
        for v in 1..self.ranks.len() {
            let clones: Vec<usize> = (1..=n).filter(|&a| self.block[a] == v).collect();
            for (i, &a) in clones.iter().enumerate() {
                for &b in &clones[i + 1..] {
                    let wdiff = rat(self.weights[a - 1] - self.weights[b - 1]);
                    let ddiff = rat(d[a - 1] - d[b - 1]);
                    num = num.mul(&UPoly::linear(ddiff, wdiff.clone()));
                    den = den.mul(&UPoly::linear(Rat::zero(), wdiff));
                }
            }
        }
        // Arrow factors.
        for &(u, v) in &self.arrows {
            let w = rat(self.weights[v - 1] - if u > 0 { self.weights[u - 1] } else { 0 });
            let du = if u > 0 { d[u - 1] } else { 0 };
            let ell = d[v - 1] - du;
            if ell >= 0 {
                for m in 1..=ell {
                    den = den.mul(&UPoly::linear(rat(m), w.clone()));
                }
            } else {
                for m in ell + 1..=0 {
                    num = num.mul(&UPoly::linear(rat(m), w.clone()));
                }
            }
        }
        // Bundle root factors.
        for root in &self.bundle_roots {
            let pairing = linalg::dot(d, root);
            if pairing < 0 {
                return Err(PeriodError::NegativeBundlePairing);
            }
            let w = rat(linalg::dot(root, &self.weights));
            for m in 1..=pairing {
                num = num.mul(&UPoly::linear(rat(m), w.clone()));
            }
        }
        Ok(RatFn::new(num, den))
    }
}

/// The I-function contribution of a single Abelian curve class as a
/// univariate rational function of the specialization parameter. Exposed
/// for oracle tests; [`raw_period`] sums these per degree.
pub fn term_value(
    q: &Quiver,
    e: &BundleSpec,
    d: &[i64],
    weights: &[i64],
) -> Result<RatFn, PeriodError> {
    let ctx = PeriodContext::new(q, e, Some(weights.to_vec()))?;
    ctx.term_value(d)
}

/// Unregularized coefficients `c_1..c_order` of the quantum period, with
/// the default specialization vector.
pub fn raw_period(q: &Quiver, e: &BundleSpec, order: u32) -> Result<Vec<Rat>, PeriodError> {
    raw_period_with(q, e, order, None)
}

/// As [`raw_period`], with an explicit specialization vector.
pub fn raw_period_with(
    q: &Quiver,
    e: &BundleSpec,
    order: u32,
    weights: Option<Vec<i64>>,
) -> Result<Vec<Rat>, PeriodError> {
    // Fano check for the pair.
    let c1 = e.first_chern(q)?;
    let minus_k_x: Vec<i64> = q
        .anticanonical()
        .iter()
        .zip(&c1)
        .map(|(a, b)| a - b)
        .collect();
    if !cones::is_ample(q, &minus_k_x) {
        return Err(PeriodError::NotFano);
    }
    if !e.roots_all_nef(q)? {
        return Err(PeriodError::RootsNotNef);
    }
    let ctx = PeriodContext::new(q, e, weights)?;
    // Effective curve classes of the Abelianization: dual cone of its nef
    // cone, with the nef rays as inequality rows.
    let nef_ab = cones::nef_cone(&ctx.ab);
    let nef_rays = cones::cone_rays(&nef_ab)?;
    let mori = cones::Cone {
        inequalities: nef_rays.rays.clone(),
    };
    let mori_rays = cones::cone_rays(&mori)?;
    if mori_rays
        .rays
        .iter()
        .any(|r| linalg::dot(&ctx.minus_k, r) <= 0)
    {
        return Err(PeriodError::UnboundedEnumeration);
    }
    let points = cones::lattice_slice(&mori, &ctx.minus_k, order as i64)?;
    // Per-degree Laurent coefficient accumulators for powers
    // -pole_order ..= 0.
    let width = ctx.pole_order + 1;
    let mut sums: Vec<Vec<Rat>> = vec![vec![Rat::zero(); width]; order as usize + 1];
    for d in &points {
        let k = linalg::dot(&ctx.minus_k, d);
        if k == 0 {
            continue; // the apex; c_0 = 1 implicitly
        }
        let term = ctx.term_laurent(d)?;
        for (slot, c) in sums[k as usize].iter_mut().zip(term) {
            *slot += c;
        }
    }
    let mut out = Vec::with_capacity(order as usize);
    for (k, coeffs) in sums.iter().enumerate().skip(1) {
        // Regularity at the origin: every genuinely negative power must
        // cancel across the degree-k sum.
        if coeffs[..width - 1].iter().any(|c| !c.is_zero()) {
            return Err(PeriodError::PoleAtZero { degree: k as i64 });
        }
        out.push(coeffs[width - 1].clone());
    }
    Ok(out)
}

/// Regularized quantum period `alpha_0..alpha_order`: exponentially
/// corrected by the degree-one coefficient and scaled by factorials.
pub fn period_sequence(q: &Quiver, e: &BundleSpec, order: u32) -> Result<PeriodSequence, PeriodError> {
    period_sequence_with(q, e, order, None)
}

/// As [`period_sequence`], with an explicit specialization vector.
pub fn period_sequence_with(
    q: &Quiver,
    e: &BundleSpec,
    order: u32,
    weights: Option<Vec<i64>>,
) -> Result<PeriodSequence, PeriodError> {
    let c = raw_period_with(q, e, order, weights)?;
    let gamma = c[0].clone();
    // alpha_k = k! * [t^k] exp(-gamma t) * (1 + sum c_j t^j).
    let mut alpha = Vec::with_capacity(order as usize + 1);
    alpha.push(Rat::one());
    for k in 1..=order as usize {
        let mut acc = Rat::zero();
        for j in 0..=k {
            let cj = if j == 0 {
                Rat::one()
            } else {
                c[j - 1].clone()
            };
            if cj.is_zero() {
                continue;
            }
            // (-gamma)^(k-j) / (k-j)!
            let mut g = Rat::one();
            for _ in 0..k - j {
                g *= -gamma.clone();
            }
            acc += cj * g / factorial((k - j) as u32);
        }
        alpha.push(acc * factorial(k as u32));
    }
    debug_assert!(alpha[1].is_zero());
    Ok(PeriodSequence { alpha })
}

/// Recomputes the sequence with an independent specialization vector and
/// demands exact agreement.
pub fn cross_check_specialization(
    q: &Quiver,
    e: &BundleSpec,
    order: u32,
) -> Result<PeriodSequence, PeriodError> {
    let first = period_sequence(q, e, order)?;
    let n = q.abelianize().0.picard_rank();
    let alt: Vec<i64> = primes(n);
    let second = period_sequence_with(q, e, order, Some(alt))?;
    if first != second {
        return Err(PeriodError::SpecializationMismatch);
    }
    Ok(first)
}

fn primes(n: usize) -> Vec<i64> {
    let mut out = Vec::with_capacity(n);
    let mut cand = 2i64;
    while out.len() < n {
        if (2..cand).all(|d| d * d > cand || cand % d != 0) {
            out.push(cand);
        }
        cand += 1;
    }
    out
}
