//! Cohomology of the Abelianized (toric) quiver flag variety as an
//! iterated projective-bundle tower, exact integration, Martin's
//! integration formula for the non-Abelian quotient, characteristic
//! classes from split root data, and the geometric invariants of a zero
//! locus: degree, Euler number, holomorphic Euler characteristic, and the
//! leading Hilbert series coefficients.

use crate::linalg::{rat, rat_is_integer, Rat};
use crate::poly::{bernoulli, factorial, MPoly};
use crate::quiver::Quiver;
use crate::schur::BundleSpec;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CohomologyError {
    #[error("tower ring requires an Abelian (all ranks one) quiver")]
    NotAbelian,
    #[error("class is not Weyl-symmetric")]
    NotSymmetric,
    #[error("characteristic number is not an integer")]
    NonIntegerCharacteristic,
    #[error("bundle rank does not match the requested zero locus dimension")]
    WrongRank,
    #[error("bundle data error: {0}")]
    Schur(#[from] crate::schur::SchurError),
}

/// The cohomology ring of a toric quiver flag variety, presented as a
/// tower of projective bundles: one variable per non-source vertex, and
/// for each vertex `v` the monic relation of degree `s_v` given by the
/// product of `(x_v - x_u)` over the arrows `u -> v`.
///
/// The monomials with exponent of `x_v` below `s_v` form a basis; the
/// integral of a class is its coefficient on the top monomial. The
/// normalization (top monomial integrates to 1) together with the relation
/// sign convention is pinned by the classical anchors: projective space of
/// dimension `n` has degree `(n+1)^n`, and the rank-two Grassmannian of a
/// four-dimensional space has Pluecker degree 2.
#[derive(Debug, Clone)]
pub struct TowerRing {
    /// Number of variables (non-source vertices of the Abelian quiver).
    pub vars: usize,
    /// Degree cap per variable: `s_v`.
    pub caps: Vec<u16>,
    /// For each variable, the reduced expansion of `x_v^{s_v}`.
    reductions: Vec<MPoly>,
    /// Total dimension: sum of `(s_v - 1)`.
    pub dimension: u32,
}

/// A cohomology class: polynomial reduced to the monomial basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CohClass(pub MPoly);

impl TowerRing {
    pub fn new(qab: &Quiver) -> Result<TowerRing, CohomologyError> {
        if !qab.is_toric() {
            return Err(CohomologyError::NotAbelian);
        }
        let n = qab.picard_rank();
        let caps: Vec<u16> = (1..=n)
            .map(|v| qab.incoming_rank(v) as u16)
            .collect();
        let dimension: u32 = caps.iter().map(|&c| (c - 1) as u32).sum();
        let mut ring = TowerRing {
            vars: n,
            caps,
            reductions: Vec::with_capacity(n),
            dimension,
        };
        // Build relations in topological order; each one's overflow in
        // lower variables is reduced with the relations already built.
        for v in 1..=n {
            let mut relation = MPoly::one(n);
            for u in 0..qab.vertex_count() {
                let m = qab.arrows(u, v);
                if m == 0 {
                    continue;
                }
                let mut coeffs = vec![0i64; n];
                coeffs[v - 1] = 1;
                if u > 0 {
                    coeffs[u - 1] -= 1;
                }
                let factor = MPoly::linear(n, &coeffs, Rat::zero());
                for _ in 0..m {
                    relation = relation.mul(&factor, None);
                }
            }
            // x_v^{s_v} = x_v^{s_v} - relation (lower order in x_v).
            let mut top = vec![0u16; n];
            top[v - 1] = ring.caps[v - 1];
            let mut lower = MPoly::zero(n);
            lower.add_term(top, Rat::one());
            lower = lower.sub(&relation);
            let reduced = ring.reduce_partial(lower, v - 1);
            ring.reductions.push(reduced);
        }
        Ok(ring)
    }

    /// Reduces using only relations for variables strictly below `limit`
    /// plus the ones already stored (used during construction).
    fn reduce_partial(&self, p: MPoly, limit: usize) -> MPoly {
        let mut current = p;
        // Eliminate from the highest available variable downward.
        for var in (0..limit.min(self.reductions.len())).rev() {
            current = self.eliminate_var(current, var);
        }
        current
    }

    /// Fully reduces a polynomial to the monomial basis.
    pub fn reduce(&self, p: MPoly) -> MPoly {
        let mut current = p;
        for var in (0..self.vars).rev() {
            current = self.eliminate_var(current, var);
        }
        current
    }

    /// Rewrites every monomial with exponent of `x_var` at least the cap,
    /// using the stored reduction; lower variables may overflow and are
    /// handled by later passes, higher ones cannot appear in reductions.
    fn eliminate_var(&self, p: MPoly, var: usize) -> MPoly {
        let cap = self.caps[var];
        let mut done = MPoly::zero(self.vars);
        let mut pending = p;
        while !pending.is_zero() {
            let mut next = MPoly::zero(self.vars);
            for (e, c) in &pending.terms {
                if e[var] < cap {
                    done.add_term(e.clone(), c.clone());
                    continue;
                }
                // Split off one factor of x_var^{cap}.
                let mut rest = e.clone();
                rest[var] -= cap;
                let mut mono = MPoly::zero(self.vars);
                mono.add_term(rest, c.clone());
                next = next.add(&mono.mul(&self.reductions[var], None));
            }
            pending = next;
            // Reductions for `var` have x_var-degree < cap and only lower
            // variables otherwise, so each pass strictly lowers the
            // x_var-degree of the pending monomials; this terminates.
        }
        done
    }

    /// Makes a class from any polynomial representative.
    pub fn class(&self, p: MPoly) -> CohClass {
        CohClass(self.reduce(p))
    }

    /// The class of a linear form with the given integer coefficients.
    pub fn linear_class(&self, coeffs: &[i64]) -> CohClass {
        self.class(MPoly::linear(self.vars, coeffs, Rat::zero()))
    }

    /// Exact integration: coefficient of the top monomial.
    pub fn integrate(&self, c: &CohClass) -> Rat {
        let top: Vec<u16> = self.caps.iter().map(|&s| s - 1).collect();
        c.0.coefficient(&top)
    }

    /// Integral of a product, computed degree slice against complementary
    /// degree slice. The relations are homogeneous, so reduction preserves
    /// total degree and only complementary pairs can reach the top; this
    /// avoids forming the full product of two large classes.
    pub fn integrate_product(&self, a: &CohClass, b: &CohClass) -> Rat {
        let mut total = Rat::zero();
        for d in 0..=self.dimension {
            let ad = a.0.homogeneous_part(d);
            if ad.is_zero() {
                continue;
            }
            let bd = b.0.homogeneous_part(self.dimension - d);
            if bd.is_zero() {
                continue;
            }
            let prod = self.reduce(ad.mul(&bd, None));
            total += self.integrate(&CohClass(prod));
        }
        total
    }

    pub fn one(&self) -> CohClass {
        CohClass(MPoly::one(self.vars))
    }

    pub fn mul(&self, a: &CohClass, b: &CohClass) -> CohClass {
        self.class(a.0.mul(&b.0, None))
    }

    pub fn add(&self, a: &CohClass, b: &CohClass) -> CohClass {
        CohClass(a.0.add(&b.0))
    }

    /// Power with reduction at every step.
    pub fn pow(&self, a: &CohClass, k: u32) -> CohClass {
        let mut out = self.one();
        for _ in 0..k {
            out = self.mul(&out, a);
        }
        out
    }
}

/// Signed multiset of linear forms on the Abelianization encoding the
/// K-theory class of the tangent bundle of the zero locus: arrow classes
/// are positive, per-block endomorphism classes are negative, and the
/// bundle's split roots are subtracted as well.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootData {
    /// Arrow divisor classes of the Abelianized quiver (positive part).
    pub arrow_roots: Vec<Vec<i64>>,
    /// Block endomorphism classes, all ordered pairs including the zero
    /// forms for equal indices (negative part).
    pub block_roots: Vec<Vec<i64>>,
    /// Split Chern roots of the bundle (negative part).
    pub bundle_roots: Vec<Vec<i64>>,
}

impl RootData {
    pub fn new(q: &Quiver, e: &BundleSpec) -> Result<RootData, CohomologyError> {
        let (ab, block) = q.abelianize();
        let n = ab.picard_rank();
        let mut arrow_roots = Vec::new();
        for i in 0..ab.vertex_count() {
            for j in 0..ab.vertex_count() {
                let m = ab.arrows(i, j);
                for _ in 0..m {
                    let mut f = vec![0i64; n];
                    f[j - 1] += 1;
                    if i > 0 {
                        f[i - 1] -= 1;
                    }
                    arrow_roots.push(f);
                }
            }
        }
        let mut block_roots = Vec::new();
        for v in 1..q.vertex_count() {
            let clones: Vec<usize> = (1..=n).filter(|&a| block[a] == v).collect();
            for &a in &clones {
                for &b in &clones {
                    let mut f = vec![0i64; n];
                    f[b - 1] += 1;
                    f[a - 1] -= 1;
                    block_roots.push(f);
                }
            }
        }
        let bundle_roots = e.roots(q)?;
        Ok(RootData {
            arrow_roots,
            block_roots,
            bundle_roots,
        })
    }

    /// Lift of the anticanonical class of the zero locus: the arrow classes
    /// minus the block classes minus the bundle roots, summed.
    pub fn anticanonical_lift(&self, vars: usize) -> Vec<i64> {
        let mut k = vec![0i64; vars];
        for r in &self.arrow_roots {
            for (i, &c) in r.iter().enumerate() {
                k[i] += c;
            }
        }
        for r in &self.block_roots {
            for (i, &c) in r.iter().enumerate() {
                k[i] -= c;
            }
        }
        for r in &self.bundle_roots {
            for (i, &c) in r.iter().enumerate() {
                k[i] -= c;
            }
        }
        k
    }
}

/// Which multiplicative characteristic series to build from root data.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesKind {
    /// Total Chern class: product of `(1 + x)` over positive roots divided
    /// by the same over negative roots.
    Chern,
    /// Todd class, with exact Bernoulli coefficients.
    Todd,
}

/// Multiplicative extension of the series over the signed roots of the
/// tangent K-theory class (arrows positive, blocks and bundle roots
/// negative), truncated at the given total degree.
pub fn series_from_roots(
    ring: &TowerRing,
    rd: &RootData,
    kind: SeriesKind,
    cutoff: u32,
) -> CohClass {
    let mut acc = ring.one();
    for root in &rd.arrow_roots {
        let f = one_root_series(ring, root, kind, cutoff, false);
        acc = CohClass(ring.reduce(acc.0.mul(&f.0, Some(cutoff))));
    }
    for root in rd.block_roots.iter().chain(&rd.bundle_roots) {
        let f = one_root_series(ring, root, kind, cutoff, true);
        acc = CohClass(ring.reduce(acc.0.mul(&f.0, Some(cutoff))));
    }
    acc
}

/// Exponential Chern character of a line bundle with the given first
/// Chern class, scaled by `k`, truncated.
pub fn ch_line(ring: &TowerRing, c1: &[i64], k: i64, cutoff: u32) -> CohClass {
    let x = MPoly::linear(ring.vars, c1, Rat::zero()).scale(&rat(k));
    let mut acc = MPoly::one(ring.vars);
    let mut power = MPoly::one(ring.vars);
    for d in 1..=cutoff {
        power = ring.reduce(power.mul(&x, Some(cutoff)));
        if power.is_zero() {
            break;
        }
        acc = acc.add(&power.scale(&(Rat::one() / factorial(d))));
    }
    CohClass(ring.reduce(acc))
}

/// Series for a single root; `invert` divides instead of multiplying.
/// A zero root contributes the exact unit. Every case has a closed-form
/// coefficient sequence in powers of the root, so the class is built by
/// incremental reduced powers of one linear form — no series inversion.
fn one_root_series(
    ring: &TowerRing,
    root: &[i64],
    kind: SeriesKind,
    cutoff: u32,
    invert: bool,
) -> CohClass {
    if root.iter().all(|&c| c == 0) {
        return ring.one();
    }
    let x = MPoly::linear(ring.vars, root, Rat::zero());
    let coefficient: Box<dyn Fn(usize) -> Rat> = match (kind, invert) {
        // 1 + x.
        (SeriesKind::Chern, false) => Box::new(|d| if d == 1 { Rat::one() } else { Rat::zero() }),
        // 1/(1 + x) = sum (-x)^k.
        (SeriesKind::Chern, true) => {
            Box::new(|d| if d % 2 == 0 { Rat::one() } else { -Rat::one() })
        }
        // x/(1 - e^{-x}) = sum_k B_k^+ x^k / k!, Bernoulli numbers with the
        // plus convention (B_1 = +1/2).
        (SeriesKind::Todd, false) => {
            let b = bernoulli(cutoff as usize);
            Box::new(move |d| {
                let mut coeff = b[d].clone();
                if d == 1 {
                    coeff = -coeff;
                }
                coeff / factorial(d as u32)
            })
        }
        // (1 - e^{-x})/x = sum_k (-x)^k / (k+1)!.
        (SeriesKind::Todd, true) => Box::new(|d| {
            let sign = if d % 2 == 0 { Rat::one() } else { -Rat::one() };
            sign / factorial(d as u32 + 1)
        }),
    };
    let mut acc = MPoly::one(ring.vars);
    let mut power = MPoly::one(ring.vars);
    for d in 1..=cutoff as usize {
        power = ring.reduce(power.mul(&x, Some(cutoff)));
        if power.is_zero() {
            break;
        }
        let coeff = coefficient(d);
        if !coeff.is_zero() {
            acc = acc.add(&power.scale(&coeff));
        }
    }
    CohClass(ring.reduce(acc))
}

/// The Weyl correction class: the product over all blocks and ordered
/// pairs of distinct clones of the difference of their divisor classes.
/// For a toric quiver this is the unit class.
pub fn weyl_class(ring: &TowerRing, q: &Quiver) -> CohClass {
    let (_, block) = q.abelianize();
    let n = ring.vars;
    let mut acc = MPoly::one(n);
    for v in 1..q.vertex_count() {
        let clones: Vec<usize> = (1..=n).filter(|&a| block[a] == v).collect();
        for &a in &clones {
            for &b in &clones {
                if a == b {
                    continue;
                }
                let mut coeffs = vec![0i64; n];
                coeffs[b - 1] += 1;
                coeffs[a - 1] -= 1;
                acc = ring.reduce(acc.mul(&MPoly::linear(n, &coeffs, Rat::zero()), None));
            }
        }
    }
    CohClass(acc)
}

/// Weyl group order: product of the factorials of the vertex ranks.
pub fn weyl_order(q: &Quiver) -> Rat {
    (0..q.vertex_count())
        .map(|v| factorial(q.rank(v) as u32))
        .product()
}

/// Checks Weyl symmetry of a class by comparing with its image under every
/// adjacent transposition of clones within a block.
pub fn is_weyl_symmetric(ring: &TowerRing, q: &Quiver, class: &CohClass) -> bool {
    let (_, block) = q.abelianize();
    let n = ring.vars;
    for v in 1..q.vertex_count() {
        let clones: Vec<usize> = (1..=n).filter(|&a| block[a] == v).collect();
        for w in clones.windows(2) {
            let mut perm: Vec<usize> = (0..n).collect();
            perm.swap(w[0] - 1, w[1] - 1);
            let swapped = ring.reduce(class.0.permute_vars(&perm));
            if ring.reduce(swapped.sub(&class.0)) != MPoly::zero(n) {
                return false;
            }
        }
    }
    true
}

/// Martin's integration formula: the integral over the non-Abelian
/// quotient equals the integral of a lift against the Weyl class on the
/// Abelianization, divided by the order of the Weyl group.
pub fn martin_integrate(
    ring: &TowerRing,
    q: &Quiver,
    lifted: &CohClass,
) -> Result<Rat, CohomologyError> {
    if !is_weyl_symmetric(ring, q, lifted) {
        return Err(CohomologyError::NotSymmetric);
    }
    let e = weyl_class(ring, q);
    Ok(ring.integrate_product(lifted, &e) / weyl_order(q))
}

/// The geometric invariants of a quiver flag zero locus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Invariants {
    /// Anticanonical degree of the zero locus.
    pub degree: i64,
    /// Topological Euler characteristic.
    pub euler: i64,
    /// Holomorphic Euler characteristic of the structure sheaf.
    pub chi_o: i64,
    /// First Hilbert coefficient: the Euler characteristic of the
    /// anticanonical bundle.
    pub chi_k: i64,
    /// Second Hilbert coefficient: for twice the anticanonical bundle.
    pub chi_2k: i64,
}

/// Computes degree, Euler number, chi of the structure sheaf, and the two
/// leading Hilbert coefficients for the zero locus of a generic section of
/// the bundle on the quiver flag variety. The zero locus dimension is the
/// ambient dimension minus the bundle rank; `expect_dim`, when given, is
/// enforced against it.
pub fn zero_locus_invariants(
    q: &Quiver,
    e: &BundleSpec,
    expect_dim: Option<i64>,
) -> Result<Invariants, CohomologyError> {
    let (ab, _) = q.abelianize();
    let ring = TowerRing::new(&ab)?;
    let rd = RootData::new(q, e)?;
    let dim_ambient = q.dimension();
    let rank = e.rank(q).map_err(CohomologyError::Schur)?;
    let dim_x = dim_ambient - rank;
    if let Some(d) = expect_dim {
        if d != dim_x {
            return Err(CohomologyError::WrongRank);
        }
    }
    if dim_x < 0 {
        return Err(CohomologyError::WrongRank);
    }
    // Every integrand is paired against the homogeneous measure (bundle
    // Euler class times Weyl class) of degree `dim M^ab - dim X`, and the
    // ring vanishes above its dimension, so integrand degrees above dim X
    // can never contribute: truncate all series there.
    let cutoff = dim_x as u32;
    let mut euler_e = ring.one();
    for root in &rd.bundle_roots {
        euler_e = ring.mul(&euler_e, &ring.linear_class(root));
    }
    let measure = ring.mul(&euler_e, &weyl_class(&ring, q));
    let order = weyl_order(q);
    let minus_k = rd.anticanonical_lift(ring.vars);
    let minus_k_class = ring.linear_class(&minus_k);

    // Each integrand is checked for Weyl symmetry, then paired against the
    // measure degree-by-degree; full products of two large classes never
    // get formed.
    let integrate_on_x = |class: &CohClass| -> Result<Rat, CohomologyError> {
        if !is_weyl_symmetric(&ring, q, class) {
            return Err(CohomologyError::NotSymmetric);
        }
        Ok(ring.integrate_product(class, &measure) / order.clone())
    };

    // Degree: anticanonical power of top degree on the zero locus.
    let degree = integrate_on_x(&ring.pow(&minus_k_class, dim_x as u32))?;
    // Euler number: top Chern class of the virtual tangent bundle.
    let chern = series_from_roots(&ring, &rd, SeriesKind::Chern, cutoff);
    let top_chern = CohClass(chern.0.homogeneous_part(dim_x as u32));
    let euler = integrate_on_x(&top_chern)?;
    // chi(O): Todd class of the virtual tangent bundle.
    let todd = series_from_roots(&ring, &rd, SeriesKind::Todd, cutoff);
    let chi_o = integrate_on_x(&todd)?;
    // Hilbert coefficients: ch(-kK) against the Todd class, associated as
    // ch against (todd * measure) so both big factors meet only through
    // complementary degree slices.
    if !is_weyl_symmetric(&ring, q, &todd) {
        return Err(CohomologyError::NotSymmetric);
    }
    let todd_measure = {
        let mut acc = MPoly::zero(ring.vars);
        for d in 0..=cutoff {
            let td = todd.0.homogeneous_part(d);
            if td.is_zero() {
                continue;
            }
            acc = acc.add(&ring.reduce(td.mul(&measure.0, Some(ring.dimension))));
        }
        CohClass(acc)
    };
    let ch1 = ch_line(&ring, &minus_k, 1, cutoff);
    let ch2 = ch_line(&ring, &minus_k, 2, cutoff);
    let chi_k = ring.integrate_product(&ch1, &todd_measure) / order.clone();
    let chi_2k = ring.integrate_product(&ch2, &todd_measure) / order.clone();

    let as_int = |x: &Rat| -> Result<i64, CohomologyError> {
        if !rat_is_integer(x) {
            return Err(CohomologyError::NonIntegerCharacteristic);
        }
        x.numer()
            .to_i64()
            .ok_or(CohomologyError::NonIntegerCharacteristic)
    };
    Ok(Invariants {
        degree: as_int(&degree)?,
        euler: as_int(&euler)?,
        chi_o: as_int(&chi_o)?,
        chi_k: as_int(&chi_k)?,
        chi_2k: as_int(&chi_2k)?,
    })
}
