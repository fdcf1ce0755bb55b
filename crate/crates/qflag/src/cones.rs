//! Picard and curve lattices, nef/ample cones, and the polyhedral toolkit:
//! double-description ray enumeration, Hilbert bases, bounded lattice-point
//! enumeration, and knapsack decomposition over a Hilbert basis.
//!
//! Everything is exact. Cones are rational, pointed, and low-dimensional
//! (ambient rank at most 8 in every use here), so simple exact algorithms
//! are the right tool.

use crate::linalg::{self, rat, Rat};
use crate::quiver::Quiver;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use thiserror::Error;

/// Divisor class: integer vector in the determinant line bundle basis (or
/// in the per-vertex basis on an Abelianized quiver).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DivisorClass(pub Vec<i64>);

/// Curve class: integer vector in the dual basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CurveClass(pub Vec<i64>);

impl CurveClass {
    /// Pairing with a divisor class.
    pub fn pair(&self, d: &[i64]) -> i64 {
        linalg::dot(&self.0, d)
    }

    /// Projection from the Abelianized curve lattice: sums the coordinates
    /// of each block.
    pub fn project(&self, block: &[usize], picard_rank: usize) -> CurveClass {
        let mut out = vec![0i64; picard_rank];
        for (coord, &b) in self.0.iter().zip(&block[1..]) {
            out[b - 1] += coord;
        }
        CurveClass(out)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConeError {
    #[error("cone is not pointed")]
    NotPointed,
    #[error("cone is not full-dimensional")]
    NotFullDimensional,
    #[error("slice functional is not strictly positive on the cone")]
    UnboundedSlice,
    #[error("lattice vector is not in the cone")]
    NotInCone,
}

/// A rational polyhedral cone in inequality form: `{ x : A x >= 0 }` with
/// integer rows.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cone {
    pub inequalities: Vec<Vec<i64>>,
}

/// Primitive integer generators of a cone.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RaySet {
    pub rays: Vec<Vec<i64>>,
}

/// Minimal generating set of the monoid of lattice points of a cone.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HilbertBasis {
    pub elements: Vec<Vec<i64>>,
}

impl Cone {
    pub fn ambient_dim(&self) -> usize {
        self.inequalities.first().map_or(0, |r| r.len())
    }

    pub fn contains(&self, x: &[i64]) -> bool {
        self.inequalities.iter().all(|row| linalg::dot(row, x) >= 0)
    }

    pub fn contains_interior(&self, x: &[i64]) -> bool {
        self.inequalities.iter().all(|row| linalg::dot(row, x) > 0)
    }
}

/// For each non-source vertex `i`, the set of vertices `j` such that every
/// path from the source to `j` must pass through `i`, where a path may
/// always sidestep any vertex of rank greater than one (in the Abelianized
/// quiver a clone of such a vertex always has a parallel twin). Hence for
/// `r_i > 1` the set collapses to `{i}`.
pub fn through_sets(q: &Quiver) -> Vec<Vec<usize>> {
    let n = q.vertex_count();
    (1..n)
        .map(|i| {
            if q.rank(i) > 1 {
                return vec![i];
            }
            // Count paths avoiding vertex i; j is forced through i exactly
            // when no avoiding path exists.
            let mut avoid = vec![0i64; n];
            avoid[0] = 1;
            for v in 1..n {
                if v == i {
                    continue;
                }
                avoid[v] = (0..v).filter(|&u| u != i).map(|u| avoid[u] * q.arrows(u, v)).sum();
            }
            (1..n).filter(|&j| j == i || avoid[j] == 0).collect()
        })
        .collect()
}

/// The nef cone in inequality form: one inequality per non-source vertex
/// `i`, reading `sum over j in T_i of r_j a_j >= 0`.
pub fn nef_cone(q: &Quiver) -> Cone {
    let rho = q.picard_rank();
    let sets = through_sets(q);
    let inequalities = sets
        .iter()
        .map(|t| {
            let mut row = vec![0i64; rho];
            for &j in t {
                row[j - 1] = q.rank(j);
            }
            row
        })
        .collect();
    Cone { inequalities }
}

/// Membership in the nef cone.
pub fn is_nef(q: &Quiver, class: &[i64]) -> bool {
    nef_cone(q).contains(class)
}

/// Membership in the ample cone. The ample cone is the interior of the nef
/// cone; an interior point pairs strictly positively with every nonzero
/// valid inequality, so strictness of all listed inequalities is exactly
/// interiority.
pub fn is_ample(q: &Quiver, class: &[i64]) -> bool {
    nef_cone(q).contains_interior(class)
}

/// Whether the quiver flag variety itself is Fano.
pub fn is_fano(q: &Quiver) -> bool {
    is_ample(q, &q.anticanonical())
}

/// The cone of effective curve classes, dual to the nef cone: its
/// inequality rows are the nef cone's extreme rays.
pub fn mori_cone(q: &Quiver) -> Result<Cone, ConeError> {
    let rays = cone_rays(&nef_cone(q))?;
    Ok(Cone {
        inequalities: rays.rays,
    })
}

/// Extreme rays of a pointed, full-dimensional cone given by inequalities,
/// via the double description method with exact rational pivoting.
pub fn cone_rays(cone: &Cone) -> Result<RaySet, ConeError> {
    let n = cone.ambient_dim();
    if n == 0 {
        return Err(ConeError::NotFullDimensional);
    }
    let rows = &cone.inequalities;
    if linalg::rank_int(rows) < n {
        // The lineality space is nontrivial.
        return Err(ConeError::NotPointed);
    }
    // Pick n independent rows as a simplicial base cone; its rays are the
    // columns of the inverse matrix.
    let mut base: Vec<usize> = Vec::new();
    let mut chosen: Vec<Vec<i64>> = Vec::new();
    for (idx, row) in rows.iter().enumerate() {
        if base.len() == n {
            break;
        }
        chosen.push(row.clone());
        if linalg::rank_int(&chosen) == chosen.len() {
            base.push(idx);
        } else {
            chosen.pop();
        }
    }
    let inv = linalg::invert(&linalg::to_rat_matrix(&chosen)).expect("independent rows");
    let mut rays: Vec<Vec<i64>> = (0..n)
        .map(|j| {
            let col: Vec<Rat> = (0..n).map(|i| inv[i][j].clone()).collect();
            rat_vec_to_primitive(&col)
        })
        .collect();
    // Insert the remaining inequalities one at a time.
    for (idx, row) in rows.iter().enumerate() {
        if base.contains(&idx) {
            continue;
        }
        let vals: Vec<i64> = rays.iter().map(|r| linalg::dot(row, r)).collect();
        let mut next: Vec<Vec<i64>> = Vec::new();
        for (r, &v) in rays.iter().zip(&vals) {
            if v >= 0 {
                next.push(r.clone());
            }
        }
        // Constraints active at this stage: the base rows plus every row
        // already inserted.
        let processed: Vec<Vec<i64>> = rows
            .iter()
            .enumerate()
            .filter(|(k, _)| base.contains(k) || *k <= idx)
            .map(|(_, r)| r.clone())
            .collect();
        for (i, ri) in rays.iter().enumerate() {
            for (j, rj) in rays.iter().enumerate().skip(i + 1) {
                if !(vals[i] > 0 && vals[j] < 0 || vals[i] < 0 && vals[j] > 0) {
                    continue;
                }
                if !adjacent(&processed, &rays, i, j) {
                    continue;
                }
                let (pos, neg, vp, vn) = if vals[i] > 0 {
                    (ri, rj, vals[i], vals[j])
                } else {
                    (rj, ri, vals[j], vals[i])
                };
                let combo: Vec<i64> = pos
                    .iter()
                    .zip(neg)
                    .map(|(&p, &q)| vp * q - vn * p)
                    .collect();
                let combo = linalg::primitive(&combo);
                if !combo.iter().all(|&c| c == 0) {
                    next.push(combo);
                }
            }
        }
        next.sort();
        next.dedup();
        rays = next;
    }
    if linalg::rank_int(&rays) < n {
        return Err(ConeError::NotFullDimensional);
    }
    rays.sort();
    Ok(RaySet { rays })
}

/// Combinatorial adjacency test: rays `i` and `j` are adjacent if no third
/// ray is tight on every inequality tight on both.
fn adjacent(rows: &[Vec<i64>], rays: &[Vec<i64>], i: usize, j: usize) -> bool {
    let tight: Vec<usize> = rows
        .iter()
        .enumerate()
        .filter(|(_, row)| linalg::dot(row, &rays[i]) == 0 && linalg::dot(row, &rays[j]) == 0)
        .map(|(k, _)| k)
        .collect();
    for (k, r) in rays.iter().enumerate() {
        if k == i || k == j {
            continue;
        }
        if tight.iter().all(|&t| linalg::dot(&rows[t], r) == 0) {
            return false;
        }
    }
    true
}

fn rat_vec_to_primitive(v: &[Rat]) -> Vec<i64> {
    use num_bigint::BigInt;
    use num_traits::ToPrimitive;
    let mut lcm = BigInt::from(1);
    for x in v {
        let d = x.denom();
        let g = num_integer::Integer::gcd(&lcm, d);
        lcm = lcm / g * d;
    }
    let ints: Vec<i64> = v
        .iter()
        .map(|x| {
            (x.numer() * &lcm / x.denom())
                .to_i64()
                .expect("ray coordinates fit in i64")
        })
        .collect();
    linalg::primitive(&ints)
}

/// The inequality description of the cone spanned by a set of rays (the
/// dual cone's ray computation run in reverse).
pub fn cone_from_rays(rays: &RaySet) -> Result<Cone, ConeError> {
    let dual = cone_rays(&Cone {
        inequalities: rays.rays.clone(),
    })?;
    Ok(Cone {
        inequalities: dual.rays,
    })
}

/// Canonical ray set, for comparing cones for equality.
pub fn canonical_rays(cone: &Cone) -> Result<Vec<Vec<i64>>, ConeError> {
    let mut r = cone_rays(cone)?.rays;
    r.sort();
    Ok(r)
}

/// Minimal Hilbert basis of a pointed full-dimensional rational cone.
///
/// Every irreducible lattice point lies, by Carathéodory, in the
/// fundamental parallelepiped of some linearly independent subset of the
/// extreme rays (or is a primitive ray generator). Candidates are gathered
/// from all such parallelepipeds and reduced to the irreducible ones.
pub fn hilbert_basis(cone: &Cone) -> Result<HilbertBasis, ConeError> {
    let rays = cone_rays(cone)?.rays;
    let n = cone.ambient_dim();
    let mut candidates: BTreeSet<Vec<i64>> = rays.iter().cloned().collect();
    let mut subset = vec![0usize; n];
    collect_parallelepipeds(&rays, n, 0, &mut subset, 0, &mut candidates);
    candidates.remove(&vec![0i64; n]);
    // Greedy irreducibility filter in order of increasing value of a
    // functional strictly positive on the cone (the sum of the inequality
    // rows works: it vanishes only at the apex).
    let omega: Vec<i64> = (0..n)
        .map(|j| cone.inequalities.iter().map(|r| r[j]).sum())
        .collect();
    let mut ordered: Vec<Vec<i64>> = candidates.into_iter().collect();
    ordered.sort_by_key(|v| (linalg::dot(&omega, v), v.clone()));
    let mut basis: Vec<Vec<i64>> = Vec::new();
    'next: for v in ordered {
        for h in &basis {
            let diff: Vec<i64> = v.iter().zip(h).map(|(a, b)| a - b).collect();
            if diff.iter().any(|&d| d != 0) && cone.contains(&diff) {
                continue 'next;
            }
            if diff.iter().all(|&d| d == 0) {
                continue 'next;
            }
        }
        basis.push(v);
    }
    basis.sort();
    Ok(HilbertBasis { elements: basis })
}

fn collect_parallelepipeds(
    rays: &[Vec<i64>],
    n: usize,
    depth: usize,
    subset: &mut Vec<usize>,
    start: usize,
    out: &mut BTreeSet<Vec<i64>>,
) {
    if depth == n {
        let m: Vec<Vec<i64>> = subset.iter().map(|&k| rays[k].clone()).collect();
        if linalg::rank_int(&m) == n {
            parallelepiped_points(&m, out);
        }
        return;
    }
    for k in start..rays.len() {
        subset[depth] = k;
        collect_parallelepipeds(rays, n, depth + 1, subset, k + 1, out);
    }
}

/// Lattice points of the half-open parallelepiped spanned by `n`
/// independent integer vectors (given as the subset rows). Enumerates one
/// representative per class of `Z^n` modulo the column lattice via the
/// Hermite normal form, then maps it into the parallelepiped by reducing
/// its fractional coordinates.
fn parallelepiped_points(generators: &[Vec<i64>], out: &mut BTreeSet<Vec<i64>>) {
    use num_traits::ToPrimitive;
    let n = generators.len();
    // Columns of S are the generators.
    let s_cols: Vec<Vec<i64>> = (0..n)
        .map(|i| (0..n).map(|j| generators[j][i]).collect())
        .collect();
    let s_inv = linalg::invert(&linalg::to_rat_matrix(&s_cols)).expect("independent generators");
    let h = linalg::column_hnf(&s_cols);
    let diag: Vec<i64> = (0..n)
        .map(|i| h[i][i].to_i64().expect("parallelepiped index fits i64"))
        .collect();
    let mut rep = vec![0i64; n];
    enumerate_boxes(&diag, 0, &mut rep, &mut |z| {
        // Map the class representative z into the parallelepiped: take the
        // fractional parts of S^{-1} z and rebuild the point.
        let zr: Vec<Rat> = z.iter().map(|&x| rat(x)).collect();
        let coords = linalg::mat_vec(&s_inv, &zr);
        let fractional: Vec<Rat> = coords.iter().map(|c| c - c.floor()).collect();
        let point: Vec<Rat> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| rat(s_cols[i][j]) * &fractional[j])
                    .sum::<Rat>()
            })
            .collect();
        let int_point: Vec<i64> = point
            .iter()
            .map(|c| {
                debug_assert!(num_traits::One::is_one(c.denom()));
                (c.numer() / c.denom()).to_i64().expect("lattice point fits i64")
            })
            .collect();
        out.insert(int_point);
    });
}

fn enumerate_boxes(bounds: &[i64], depth: usize, acc: &mut Vec<i64>, visit: &mut impl FnMut(&[i64])) {
    if depth == bounds.len() {
        visit(acc);
        return;
    }
    for v in 0..bounds[depth] {
        acc[depth] = v;
        enumerate_boxes(bounds, depth + 1, acc, visit);
    }
}

/// All lattice points `v` of the cone with `<omega, v> <= bound`.
///
/// `omega` must be strictly positive on the cone minus the apex (checked
/// against the rays), which makes the slice a polytope. Enumeration runs
/// coordinate by coordinate over exact bounds obtained by Fourier-Motzkin
/// elimination, so pruning is exact over the real relaxation.
pub fn lattice_slice(cone: &Cone, omega: &[i64], bound: i64) -> Result<Vec<Vec<i64>>, ConeError> {
    let n = cone.ambient_dim();
    let rays = cone_rays(cone)?;
    if rays
        .rays
        .iter()
        .any(|r| linalg::dot(omega, r) <= 0)
    {
        return Err(ConeError::UnboundedSlice);
    }
    if bound < 0 {
        return Ok(Vec::new());
    }
    // System rows in "a . x >= c" form: cone rows with c = 0 and the slice
    // row -omega . x >= -bound.
    let mut system: Vec<(Vec<Rat>, Rat)> = cone
        .inequalities
        .iter()
        .map(|r| (r.iter().map(|&x| rat(x)).collect(), Rat::zero()))
        .collect();
    system.push((
        omega.iter().map(|&x| rat(-x)).collect(),
        rat(-bound),
    ));
    // layers[j] constrains x_0..x_{j-1} after eliminating the rest.
    let mut layers: Vec<Vec<(Vec<Rat>, Rat)>> = vec![Vec::new(); n + 1];
    layers[n] = system;
    for j in (1..=n).rev() {
        layers[j - 1] = fourier_motzkin_eliminate(&layers[j], j - 1);
    }
    let mut out = Vec::new();
    let mut point = vec![0i64; n];
    slice_dfs(&layers, cone, omega, bound, 0, &mut point, &mut out);
    out.sort();
    Ok(out)
}

/// Eliminates variable `var` (all rows are over variables `0..=var`),
/// returning rows over `0..var`.
fn fourier_motzkin_eliminate(
    rows: &[(Vec<Rat>, Rat)],
    var: usize,
) -> Vec<(Vec<Rat>, Rat)> {
    let mut keep: Vec<(Vec<Rat>, Rat)> = Vec::new();
    let mut pos: Vec<(Vec<Rat>, Rat)> = Vec::new();
    let mut neg: Vec<(Vec<Rat>, Rat)> = Vec::new();
    for (a, c) in rows {
        let coeff = &a[var];
        if coeff.is_zero() {
            keep.push((a[..var].to_vec(), c.clone()));
        } else if coeff.is_positive() {
            pos.push((a.clone(), c.clone()));
        } else {
            neg.push((a.clone(), c.clone()));
        }
    }
    for (ap, cp) in &pos {
        for (an, cn) in &neg {
            // ap[var] > 0 >= an[var]: combine to cancel the variable.
            let alpha = -an[var].clone();
            let beta = ap[var].clone();
            let row: Vec<Rat> = (0..var)
                .map(|k| &ap[k] * &alpha + &an[k] * &beta)
                .collect();
            let c = cp * &alpha + cn * &beta;
            keep.push((row, c));
        }
    }
    dedup_rows(keep)
}

fn dedup_rows(rows: Vec<(Vec<Rat>, Rat)>) -> Vec<(Vec<Rat>, Rat)> {
    let mut seen: BTreeSet<String> = BTreeSet::new();
    let mut out = Vec::new();
    for (a, c) in rows {
        if a.iter().all(|x| x.is_zero()) {
            // Constant row: keep only if it is informative (infeasible);
            // feasible tautologies are dropped.
            if c.is_positive() {
                out.push((a, c));
            }
            continue;
        }
        // Normalize by the first nonzero coefficient's absolute value.
        let scale = a
            .iter()
            .find(|x| !x.is_zero())
            .map(|x| x.abs())
            .unwrap();
        let na: Vec<Rat> = a.iter().map(|x| x / &scale).collect();
        let nc = &c / &scale;
        let key = format!("{:?}|{:?}", na, nc);
        if seen.insert(key) {
            out.push((na, nc));
        }
    }
    out
}

fn slice_dfs(
    layers: &[Vec<(Vec<Rat>, Rat)>],
    cone: &Cone,
    omega: &[i64],
    bound: i64,
    depth: usize,
    point: &mut Vec<i64>,
    out: &mut Vec<Vec<i64>>,
) {
    let n = point.len();
    if depth == n {
        if cone.contains(point) && linalg::dot(omega, point) <= bound {
            out.push(point.clone());
        }
        return;
    }
    // Bounds on x_depth from layer depth+1 rows (variables 0..=depth).
    let rows = &layers[depth + 1];
    let mut lo: Option<Rat> = None;
    let mut hi: Option<Rat> = None;
    for (a, c) in rows {
        let coeff = &a[depth];
        let fixed: Rat = (0..depth).map(|k| &a[k] * rat(point[k])).sum();
        if coeff.is_zero() {
            if fixed < *c {
                return; // prefix infeasible
            }
            continue;
        }
        // a_d * x >= c - fixed
        let rhs = (c - &fixed) / coeff;
        if coeff.is_positive() {
            if lo.as_ref().is_none_or(|l| rhs > *l) {
                lo = Some(rhs);
            }
        } else if hi.as_ref().is_none_or(|h| rhs < *h) {
            hi = Some(rhs);
        }
    }
    let (Some(lo), Some(hi)) = (lo, hi) else {
        // The slice polytope is bounded, so both bounds must exist; if one
        // is missing the variable is unconstrained only for an empty row
        // set, which cannot happen past the rank check. Be safe anyway.
        return;
    };
    let lo_int = lo.ceil().to_integer();
    let hi_int = hi.floor().to_integer();
    use num_traits::ToPrimitive;
    let (Some(lo_int), Some(hi_int)) = (lo_int.to_i64(), hi_int.to_i64()) else {
        return;
    };
    for v in lo_int..=hi_int {
        point[depth] = v;
        slice_dfs(layers, cone, omega, bound, depth + 1, point, out);
    }
    point[depth] = 0;
}

/// All multisets of Hilbert basis elements summing to `x`, in a
/// deterministic order. Elements are indexed into the basis; each multiset
/// is a sorted list of indices.
pub fn decompose(
    x: &[i64],
    basis: &HilbertBasis,
    cone: &Cone,
) -> Result<Vec<Vec<usize>>, ConeError> {
    if !cone.contains(x) {
        return Err(ConeError::NotInCone);
    }
    let n = x.len();
    let omega: Vec<i64> = (0..n)
        .map(|j| cone.inequalities.iter().map(|r| r[j]).sum())
        .collect();
    let weights: Vec<i64> = basis
        .elements
        .iter()
        .map(|h| linalg::dot(&omega, h))
        .collect();
    let mut out = Vec::new();
    let mut acc = Vec::new();
    decompose_dfs(
        x.to_vec(),
        0,
        basis,
        cone,
        &omega,
        &weights,
        &mut acc,
        &mut out,
    );
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn decompose_dfs(
    remainder: Vec<i64>,
    start: usize,
    basis: &HilbertBasis,
    cone: &Cone,
    omega: &[i64],
    weights: &[i64],
    acc: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if remainder.iter().all(|&c| c == 0) {
        out.push(acc.clone());
        return;
    }
    let rem_weight = linalg::dot(omega, &remainder);
    for k in start..basis.elements.len() {
        if weights[k] > rem_weight {
            continue;
        }
        let next: Vec<i64> = remainder
            .iter()
            .zip(&basis.elements[k])
            .map(|(a, b)| a - b)
            .collect();
        if !cone.contains(&next) {
            continue;
        }
        acc.push(k);
        decompose_dfs(next, k, basis, cone, omega, weights, acc, out);
        acc.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quiver(adj: &[&[i64]], ranks: &[i64]) -> Quiver {
        let adj = adj.iter().map(|r| r.to_vec()).collect();
        Quiver::new(adj, ranks.to_vec()).unwrap().0
    }

    #[test]
    fn through_sets_chain() {
        let q = quiver(&[&[0, 1, 0], &[0, 0, 1], &[0, 0, 0]], &[1, 1, 1]);
        assert_eq!(through_sets(&q), vec![vec![1, 2], vec![2]]);
    }

    #[test]
    fn through_sets_single_vertex() {
        let q = quiver(&[&[0, 5], &[0, 0]], &[1, 1]);
        assert_eq!(through_sets(&q), vec![vec![1]]);
    }

    #[test]
    fn through_sets_high_rank_collapse() {
        // 0 ->5 1 ->2 2 with ranks (1,3,2): both sets are singletons.
        let q = quiver(&[&[0, 5, 0], &[0, 0, 2], &[0, 0, 0]], &[1, 3, 2]);
        assert_eq!(through_sets(&q), vec![vec![1], vec![2]]);
        let cone = nef_cone(&q);
        assert_eq!(cone.inequalities, vec![vec![3, 0], vec![0, 2]]);
    }

    #[test]
    fn nef_cone_chain() {
        let q = quiver(&[&[0, 2, 0], &[0, 0, 2], &[0, 0, 0]], &[1, 1, 1]);
        let cone = nef_cone(&q);
        assert_eq!(cone.inequalities, vec![vec![1, 1], vec![0, 1]]);
        let rays = cone_rays(&cone).unwrap();
        assert_eq!(rays.rays, vec![vec![-1, 1], vec![1, 0]]);
    }

    #[test]
    fn ample_rejects_negative_at_high_rank_vertex() {
        let q = quiver(&[&[0, 5, 0], &[0, 0, 2], &[0, 0, 0]], &[1, 3, 2]);
        assert!(!is_ample(&q, &[1, -1]));
        assert!(is_ample(&q, &[1, 1]));
    }

    #[test]
    fn orthant_rays() {
        let cone = Cone {
            inequalities: vec![vec![1, 0], vec![0, 1]],
        };
        let rays = cone_rays(&cone).unwrap();
        assert_eq!(rays.rays, vec![vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn dual_of_dual_is_identity() {
        let cone = Cone {
            inequalities: vec![vec![1, 1, 0], vec![0, 1, 0], vec![0, 1, 1], vec![1, 0, 2]],
        };
        let rays = cone_rays(&cone).unwrap();
        let back = cone_from_rays(&rays).unwrap();
        assert_eq!(canonical_rays(&back).unwrap(), rays.rays);
    }

    #[test]
    fn not_pointed_detected() {
        let cone = Cone {
            inequalities: vec![vec![1, 0]],
        };
        assert_eq!(cone_rays(&cone).unwrap_err(), ConeError::NotPointed);
    }

    #[test]
    fn hilbert_basis_orthant() {
        let cone = Cone {
            inequalities: vec![vec![1, 0], vec![0, 1]],
        };
        let hb = hilbert_basis(&cone).unwrap();
        assert_eq!(hb.elements, vec![vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn hilbert_basis_unimodular_chain_cone() {
        // Rays (1,0) and (-1,1): unimodular, so the basis is the rays.
        let cone = Cone {
            inequalities: vec![vec![1, 1], vec![0, 1]],
        };
        let hb = hilbert_basis(&cone).unwrap();
        assert_eq!(hb.elements, vec![vec![-1, 1], vec![1, 0]]);
    }

    #[test]
    fn hilbert_basis_singular_quadrant() {
        // Rays (1,0) and (1,2) need the interior point (1,1).
        let cone = Cone {
            inequalities: vec![vec![0, 1], vec![2, -1]],
        };
        let hb = hilbert_basis(&cone).unwrap();
        assert_eq!(hb.elements, vec![vec![1, 0], vec![1, 1], vec![1, 2]]);
    }

    #[test]
    fn hilbert_basis_brute_force_irreducibility() {
        // Brute-force irreducibility scan over a bounded slice; witnesses
        // for reducibility of a slice point stay inside the slice, so the
        // scan is exact there.
        let cone = Cone {
            inequalities: vec![vec![0, 1], vec![3, -2]],
        };
        let hb = hilbert_basis(&cone).unwrap();
        let points = lattice_slice(&cone, &[1, 1], 12).unwrap();
        let nonzero: Vec<_> = points.iter().filter(|p| p.iter().any(|&c| c != 0)).collect();
        let mut brute: Vec<Vec<i64>> = Vec::new();
        for p in &nonzero {
            let reducible = nonzero.iter().any(|q| {
                let diff: Vec<i64> = p.iter().zip(q.iter()).map(|(a, b)| a - b).collect();
                diff.iter().any(|&d| d != 0) && cone.contains(&diff)
            });
            if !reducible {
                brute.push((*p).clone());
            }
        }
        brute.sort();
        // Every brute-force irreducible inside the slice is in the basis.
        for b in &brute {
            assert!(hb.elements.contains(b), "missing {:?}", b);
        }
        // And every basis element within the slice bound is irreducible.
        for h in &hb.elements {
            if linalg::dot(&[1, 1], h) <= 12 {
                assert!(brute.contains(h), "spurious {:?}", h);
            }
        }
    }

    #[test]
    fn slice_orthant() {
        let cone = Cone {
            inequalities: vec![vec![1, 0], vec![0, 1]],
        };
        let pts = lattice_slice(&cone, &[1, 1], 2).unwrap();
        assert_eq!(
            pts,
            vec![
                vec![0, 0],
                vec![0, 1],
                vec![0, 2],
                vec![1, 0],
                vec![1, 1],
                vec![2, 0]
            ]
        );
    }

    #[test]
    fn slice_rejects_unbounded() {
        let cone = Cone {
            inequalities: vec![vec![1, 1], vec![0, 1]],
        };
        assert_eq!(
            lattice_slice(&cone, &[1, 1], 3).unwrap_err(),
            ConeError::UnboundedSlice
        );
    }

    #[test]
    fn slice_matches_box_scan() {
        let cones = [
            Cone {
                inequalities: vec![vec![1, 0, 0], vec![0, 1, 0], vec![1, 1, 2]],
            },
            Cone {
                inequalities: vec![vec![2, -1, 0], vec![0, 1, -1], vec![0, 0, 1]],
            },
        ];
        for cone in &cones {
            let omega = vec![3, 2, 2];
            if cone_rays(cone)
                .map(|r| r.rays.iter().any(|ray| linalg::dot(&omega, ray) <= 0))
                .unwrap_or(true)
            {
                continue;
            }
            let bound = 9;
            let got = lattice_slice(cone, &omega, bound).unwrap();
            let mut expanded = Vec::new();
            for x in -20i64..=20 {
                for y in -20i64..=20 {
                    for z in -20i64..=20 {
                        let p = vec![x, y, z];
                        if cone.contains(&p) && linalg::dot(&omega, &p) <= bound {
                            expanded.push(p);
                        }
                    }
                }
            }
            expanded.sort();
            assert_eq!(got, expanded);
        }
    }

    #[test]
    fn decompose_unique_for_multiples_of_a_ray() {
        let cone = Cone {
            inequalities: vec![vec![1, 0], vec![0, 1]],
        };
        let hb = hilbert_basis(&cone).unwrap();
        let d = decompose(&[2, 0], &hb, &cone).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].len(), 2);
    }

    #[test]
    fn decompose_counts_both_routes() {
        let hb = HilbertBasis {
            elements: vec![vec![0, 1], vec![1, 0], vec![1, 1]],
        };
        let cone = Cone {
            inequalities: vec![vec![1, 0], vec![0, 1]],
        };
        let d = decompose(&[1, 1], &hb, &cone).unwrap();
        assert_eq!(d.len(), 2);
    }

    #[test]
    fn decompose_rejects_outside() {
        let cone = Cone {
            inequalities: vec![vec![1, 0], vec![0, 1]],
        };
        let hb = hilbert_basis(&cone).unwrap();
        assert_eq!(
            decompose(&[-1, 0], &hb, &cone).unwrap_err(),
            ConeError::NotInCone
        );
    }

    #[test]
    fn mori_cone_of_product() {
        // P^1 x P^3: nef cone is the orthant, so the Mori cone is too.
        let q = quiver(&[&[0, 2, 4], &[0, 0, 0], &[0, 0, 0]], &[1, 1, 1]);
        let mori = mori_cone(&q).unwrap();
        let pts = lattice_slice(&mori, &[2, 4], 4).unwrap();
        assert_eq!(pts, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![2, 0]]);
    }
}
