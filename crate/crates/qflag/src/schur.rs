//! Generalized partitions, Schur-power bundle summands, their split Chern
//! roots on the Abelianization via semistandard tableau contents, and the
//! normal form for (quiver, bundle) pairs.
//!
//! A summand is one irreducible homogeneous bundle, determined by one
//! generalized partition per non-source vertex: the non-negative part is a
//! Schur power of the tautological bundle and the common minimum is a
//! determinant twist.

use crate::cones;
use crate::quiver::Quiver;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchurError {
    #[error("partition has more rows than the bundle rank allows")]
    TooManyRows,
    #[error("partition parts must be weakly decreasing")]
    NotDecreasing,
    #[error("bundle shape does not match the quiver")]
    ShapeMismatch,
    #[error("block coefficients of the root sum are not constant")]
    AsymmetricRoots,
}

/// Weakly decreasing integer vector, entries possibly negative; the
/// highest weight of an irreducible representation of `GL(r)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GeneralizedPartition(pub Vec<i64>);

impl GeneralizedPartition {
    pub fn new(parts: Vec<i64>) -> Result<Self, SchurError> {
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(SchurError::NotDecreasing);
        }
        Ok(GeneralizedPartition(parts))
    }

    pub fn zero(len: usize) -> Self {
        GeneralizedPartition(vec![0; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&p| p == 0)
    }

    pub fn sum(&self) -> i64 {
        self.0.iter().sum()
    }

    /// Canonical split `beta = alpha + a*(1,..,1)` with `a = min(beta)` and
    /// `alpha` a non-negative partition with last part zero.
    pub fn split(&self) -> (Vec<i64>, i64) {
        let a = self.0.iter().copied().min().unwrap_or(0);
        (self.0.iter().map(|&p| p - a).collect(), a)
    }
}

/// Content vectors of all semistandard Young tableaux of the given shape
/// with entries in `1..=r`; these are the weights of the Schur power of
/// the rank-`r` standard representation. The multiset size is its rank.
pub fn ssyt_contents(shape: &[i64], r: usize) -> Result<Vec<Vec<i64>>, SchurError> {
    if shape.iter().filter(|&&p| p > 0).count() > r {
        return Err(SchurError::TooManyRows);
    }
    if shape.iter().any(|&p| p < 0) || shape.windows(2).any(|w| w[0] < w[1]) {
        return Err(SchurError::NotDecreasing);
    }
    let rows: Vec<usize> = shape
        .iter()
        .filter(|&&p| p > 0)
        .map(|&p| p as usize)
        .collect();
    let mut out = Vec::new();
    let mut tableau: Vec<Vec<usize>> = rows.iter().map(|&len| vec![0; len]).collect();
    fill_ssyt(&rows, r, 0, 0, &mut tableau, &mut out);
    Ok(out)
}

/// Fills cells in row-major order; rows weakly increase, columns strictly
/// increase.
fn fill_ssyt(
    rows: &[usize],
    r: usize,
    row: usize,
    col: usize,
    tableau: &mut Vec<Vec<usize>>,
    out: &mut Vec<Vec<i64>>,
) {
    if row == rows.len() {
        let mut content = vec![0i64; r];
        for line in tableau.iter() {
            for &e in line {
                content[e - 1] += 1;
            }
        }
        out.push(content);
        return;
    }
    let (nrow, ncol) = if col + 1 == rows[row] {
        (row + 1, 0)
    } else {
        (row, col + 1)
    };
    let min_left = if col > 0 { tableau[row][col - 1] } else { 1 };
    let min_above = if row > 0 && col < rows[row - 1] {
        tableau[row - 1][col] + 1
    } else {
        1
    };
    for e in min_left.max(min_above)..=r {
        tableau[row][col] = e;
        fill_ssyt(rows, r, nrow, ncol, tableau, out);
    }
    tableau[row][col] = 0;
}

/// Rank of the Schur power by the Weyl dimension formula; used as an
/// independent oracle for the tableau enumeration.
pub fn weyl_dimension(shape: &[i64], r: usize) -> i64 {
    let mut padded: Vec<i64> = shape.to_vec();
    padded.resize(r, 0);
    let mut num = 1i64;
    let mut den = 1i64;
    for i in 0..r {
        for j in i + 1..r {
            num *= padded[i] - padded[j] + j as i64 - i as i64;
            den *= j as i64 - i as i64;
        }
    }
    num / den
}

/// One direct summand: a generalized partition per non-source vertex.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BundleSummand(pub Vec<GeneralizedPartition>);

impl BundleSummand {
    /// The zero summand (trivial line bundle) on the given quiver.
    pub fn trivial(q: &Quiver) -> Self {
        BundleSummand(
            (1..q.vertex_count())
                .map(|v| GeneralizedPartition::zero(q.rank(v) as usize))
                .collect(),
        )
    }

    pub fn validate(&self, q: &Quiver) -> Result<(), SchurError> {
        if self.0.len() != q.picard_rank() {
            return Err(SchurError::ShapeMismatch);
        }
        for (v, p) in self.0.iter().enumerate() {
            if p.len() != q.rank(v + 1) as usize {
                return Err(SchurError::ShapeMismatch);
            }
            if p.0.windows(2).any(|w| w[0] < w[1]) {
                return Err(SchurError::NotDecreasing);
            }
        }
        Ok(())
    }

    /// Rank: product over vertices of the Schur power ranks.
    pub fn rank(&self, q: &Quiver) -> Result<i64, SchurError> {
        self.validate(q)?;
        let mut rank = 1i64;
        for (v, p) in self.0.iter().enumerate() {
            let (alpha, _) = p.split();
            rank *= ssyt_contents(&alpha, q.rank(v + 1) as usize)?.len() as i64;
        }
        Ok(rank)
    }

    /// Split Chern roots on the Abelianization: one root per tuple of
    /// tableau contents, expressed in the per-vertex divisor basis of the
    /// Abelianized quiver (source omitted).
    pub fn roots(&self, q: &Quiver) -> Result<Vec<Vec<i64>>, SchurError> {
        self.validate(q)?;
        let (ab, block) = q.abelianize();
        let ab_rho = ab.picard_rank();
        // Offsets of each original vertex's clone range in 1..=ab_rho.
        let mut offset = vec![0usize; q.vertex_count()];
        for (idx, &b) in block.iter().enumerate().skip(1) {
            if offset[b] == 0 {
                offset[b] = idx;
            }
        }
        let mut per_vertex: Vec<Vec<Vec<i64>>> = Vec::new();
        for (v, p) in self.0.iter().enumerate() {
            let r = q.rank(v + 1) as usize;
            let (alpha, shift) = p.split();
            let contents = ssyt_contents(&alpha, r)?;
            per_vertex.push(
                contents
                    .into_iter()
                    .map(|c| c.into_iter().map(|x| x + shift).collect())
                    .collect(),
            );
        }
        let mut roots = Vec::new();
        let mut pick = vec![0usize; per_vertex.len()];
        loop {
            let mut root = vec![0i64; ab_rho];
            for (v, &k) in pick.iter().enumerate() {
                let weights = &per_vertex[v][k];
                let base = offset[v + 1] - 1;
                for (j, &w) in weights.iter().enumerate() {
                    root[base + j] += w;
                }
            }
            roots.push(root);
            // Odometer over the choice tuple.
            let mut v = 0;
            loop {
                if v == pick.len() {
                    return Ok(roots);
                }
                pick[v] += 1;
                if pick[v] < per_vertex[v].len() {
                    break;
                }
                pick[v] = 0;
                v += 1;
            }
        }
    }

    /// Whether this summand is trivial (all roots zero).
    pub fn is_trivial(&self) -> bool {
        self.0.iter().all(|p| p.is_zero())
    }
}

/// A multiset of summands; the whole homogeneous bundle.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BundleSpec {
    pub summands: Vec<BundleSummand>,
}

impl BundleSpec {
    pub fn empty() -> Self {
        BundleSpec {
            summands: Vec::new(),
        }
    }

    pub fn new(mut summands: Vec<BundleSummand>) -> Self {
        summands.sort();
        BundleSpec { summands }
    }

    pub fn validate(&self, q: &Quiver) -> Result<(), SchurError> {
        for s in &self.summands {
            s.validate(q)?;
        }
        Ok(())
    }

    pub fn rank(&self, q: &Quiver) -> Result<i64, SchurError> {
        self.summands.iter().map(|s| s.rank(q)).sum()
    }

    /// All split Chern roots of all summands on the Abelianization.
    pub fn roots(&self, q: &Quiver) -> Result<Vec<Vec<i64>>, SchurError> {
        let mut all = Vec::new();
        for s in &self.summands {
            all.extend(s.roots(q)?);
        }
        Ok(all)
    }

    /// First Chern class in the determinant basis: the block-symmetric
    /// collapse of the root sum. The per-block coefficients of the sum are
    /// equal by Weyl symmetry; this is asserted, not assumed.
    pub fn first_chern(&self, q: &Quiver) -> Result<Vec<i64>, SchurError> {
        let roots = self.roots(q)?;
        let (ab, block) = q.abelianize();
        let mut sum = vec![0i64; ab.picard_rank()];
        for root in &roots {
            for (i, &c) in root.iter().enumerate() {
                sum[i] += c;
            }
        }
        let mut c1 = vec![0i64; q.picard_rank()];
        let mut seen = vec![false; q.picard_rank()];
        for (i, &c) in sum.iter().enumerate() {
            let b = block[i + 1] - 1;
            if !seen[b] {
                c1[b] = c;
                seen[b] = true;
            } else if c1[b] != c {
                return Err(SchurError::AsymmetricRoots);
            }
        }
        Ok(c1)
    }

    /// Whether every split root is nef on the Abelianized quiver.
    pub fn roots_all_nef(&self, q: &Quiver) -> Result<bool, SchurError> {
        let (ab, _) = q.abelianize();
        let cone = cones::nef_cone(&ab);
        Ok(self.roots(q)?.iter().all(|r| cone.contains(r)))
    }

    /// Canonical presentation of the (quiver, bundle) pair: the quiver's
    /// normal form plus the lexicographically minimal relabeled summand
    /// list over all permutations realizing that normal form.
    pub fn normal_form(&self, q: &Quiver) -> (crate::quiver::NormalForm, Vec<BundleSummand>) {
        let (nf, _) = q.normal_form();
        let n = q.vertex_count();
        // Collect every permutation that produces the canonical matrix, and
        // take the minimal transformed summand list.
        let mut best: Option<Vec<BundleSummand>> = None;
        let all_perms = permutations_matching(q, &nf);
        for perm in all_perms {
            // perm[new] = old; partitions are indexed by non-source vertex.
            let mut inv = vec![0usize; n];
            for (new, &old) in perm.iter().enumerate() {
                inv[old] = new;
            }
            let mut summands: Vec<BundleSummand> = self
                .summands
                .iter()
                .map(|s| {
                    let mut parts: Vec<(usize, GeneralizedPartition)> = s
                        .0
                        .iter()
                        .enumerate()
                        .map(|(v, p)| (inv[v + 1], p.clone()))
                        .collect();
                    parts.sort_by_key(|(pos, _)| *pos);
                    BundleSummand(parts.into_iter().map(|(_, p)| p).collect())
                })
                .collect();
            summands.sort();
            if best.as_ref().is_none_or(|b| summands < *b) {
                best = Some(summands);
            }
        }
        (nf, best.unwrap_or_default())
    }
}

/// All vertex permutations mapping the quiver onto its normal form.
fn permutations_matching(q: &Quiver, nf: &crate::quiver::NormalForm) -> Vec<Vec<usize>> {
    let n = q.vertex_count();
    let mut result = Vec::new();
    let mut perm: Vec<usize> = Vec::with_capacity(n);
    perm.push(0);
    // Group non-source vertices by rank, as in the quiver's normal form
    // search, and enumerate block-by-block.
    let mut rest: Vec<usize> = (1..n).collect();
    rest.sort_by_key(|&v| (q.dim_vector[v], v));
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for &v in &rest {
        match blocks.last_mut() {
            Some(b) if q.dim_vector[b[0]] == q.dim_vector[v] => b.push(v),
            _ => blocks.push(vec![v]),
        }
    }
    enumerate_block_perms(&blocks, 0, &mut perm, &mut |p| {
        let cols: Vec<Vec<u32>> = (0..n)
            .map(|j| (0..n).map(|i| q.adjacency[p[i]][p[j]]).collect())
            .collect();
        if cols == nf.columns {
            result.push(p.to_vec());
        }
    });
    result
}

fn enumerate_block_perms(
    blocks: &[Vec<usize>],
    depth: usize,
    acc: &mut Vec<usize>,
    visit: &mut impl FnMut(&[usize]),
) {
    if depth == blocks.len() {
        visit(acc);
        return;
    }
    let mut block = blocks[depth].clone();
    heap_permute(&mut block, 0, &mut |arr| {
        let len = acc.len();
        acc.extend_from_slice(arr);
        enumerate_block_perms(blocks, depth + 1, acc, visit);
        acc.truncate(len);
    });
}

fn heap_permute(items: &mut [usize], k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == items.len() {
        visit(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        heap_permute(items, k + 1, visit);
        items.swap(k, i);
    }
}
