//! Quiver data model: validation, derived numerics, Abelianization,
//! normal forms, and the structural moves (contraction, grafting) that
//! preserve the represented variety.
//!
//! A [`Quiver`] is always stored with vertices in topological order, source
//! first, so that the arrow multiplicity `n[i][j]` is zero unless `i < j`.
//! Inputs in any vertex order are re-sorted on construction and the
//! relabeling permutation is reported back to the caller.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Hard cap on vertex count; the classification never needs more than 9.
pub const MAX_VERTICES: usize = 64;
/// Hard cap on arrow multiplicities and ranks, to keep derived quantities
/// comfortably inside `i64`.
pub const MAX_ENTRY: u32 = 1_000_000;

/// Errors from quiver validation and the structural operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuiverError {
    #[error("adjacency matrix must be square and match the dimension vector length")]
    ShapeMismatch,
    #[error("quiver must have at least one vertex")]
    Empty,
    #[error("adjacency entries and ranks must be at most {MAX_ENTRY}, with at most {MAX_VERTICES} vertices")]
    OutOfRange,
    #[error("dimension vector entries must be positive")]
    NonPositiveRank,
    #[error("quiver contains a directed cycle")]
    CyclicQuiver,
    #[error("quiver has more than one source vertex")]
    MultipleSources,
    #[error("vertex {0} is not reachable from the source")]
    UnreachableVertex(usize),
    #[error("the source vertex must have rank 1")]
    SourceRankNotOne,
    #[error("vertex {vertex} is not graftable: {reason}")]
    NotGraftable {
        vertex: usize,
        reason: GraftObstruction,
    },
}

/// Which graftability condition failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraftObstruction {
    /// The vertex is the source or the last vertex.
    BoundaryVertex,
    /// The vertex has rank greater than one.
    RankNotOne,
    /// Some target is not reachable from the vertex.
    NoPath,
    /// Removing the arrows into the target set leaves the quiver connected.
    StillConnected,
}

impl std::fmt::Display for GraftObstruction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let msg = match self {
            GraftObstruction::BoundaryVertex => "vertex is the source or the final vertex",
            GraftObstruction::RankNotOne => "vertex rank is not 1",
            GraftObstruction::NoPath => "no path from the vertex to every target",
            GraftObstruction::StillConnected => "removing the arrows does not disconnect the quiver",
        };
        f.write_str(msg)
    }
}

/// A validated quiver with dimension vector, stored in topological order
/// with the unique source at index 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Quiver {
    /// `adjacency[i][j]` is the number of arrows from vertex `i` to `j`.
    pub adjacency: Vec<Vec<u32>>,
    /// Vertex ranks `r_0..r_rho`; `r_0 = 1`.
    pub dim_vector: Vec<u32>,
}

/// Derived numerical data of a quiver flag variety.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VarietyData {
    /// `s_i`: total rank of arrows into each vertex.
    pub incoming_ranks: Vec<i64>,
    /// `s'_i`: total rank of arrows out of each vertex.
    pub outgoing_ranks: Vec<i64>,
    /// Dimension of the variety.
    pub dimension: i64,
    /// Picard rank (number of non-source vertices).
    pub picard_rank: usize,
    /// Number of directed paths from the source to each vertex.
    pub path_counts: Vec<i64>,
    /// Anticanonical class in the determinant line bundle basis.
    pub anticanonical: Vec<i64>,
}

impl Quiver {
    /// Validates raw adjacency/rank data and relabels vertices into
    /// topological order with the source first. Returns the quiver together
    /// with the relabeling: `perm[new] = old`.
    pub fn new(
        adjacency: Vec<Vec<i64>>,
        dim_vector: Vec<i64>,
    ) -> Result<(Quiver, Vec<usize>), QuiverError> {
        let n = dim_vector.len();
        if n == 0 {
            return Err(QuiverError::Empty);
        }
        if adjacency.len() != n || adjacency.iter().any(|row| row.len() != n) {
            return Err(QuiverError::ShapeMismatch);
        }
        if n > MAX_VERTICES {
            return Err(QuiverError::OutOfRange);
        }
        if dim_vector.iter().any(|&r| r <= 0) {
            return Err(QuiverError::NonPositiveRank);
        }
        let in_range = |x: i64| (0..=MAX_ENTRY as i64).contains(&x);
        if !adjacency.iter().flatten().copied().all(in_range)
            || !dim_vector.iter().all(|&r| r <= MAX_ENTRY as i64)
        {
            return Err(QuiverError::OutOfRange);
        }

        // Kahn's algorithm, smallest original index first, so the labeling
        // is deterministic.
        let mut indegree = vec![0usize; n];
        for row in &adjacency {
            for (j, &m) in row.iter().enumerate() {
                if m > 0 {
                    indegree[j] += 1;
                }
            }
        }
        let mut order = Vec::with_capacity(n);
        let mut ready: Vec<usize> = (0..n).filter(|&v| indegree[v] == 0).collect();
        let sources = ready.len();
        if sources > 1 {
            return Err(QuiverError::MultipleSources);
        }
        while let Some(&v) = ready.first() {
            ready.remove(0);
            order.push(v);
            for (j, &m) in adjacency[v].iter().enumerate() {
                if m > 0 {
                    indegree[j] -= 1;
                    if indegree[j] == 0 {
                        let pos = ready.partition_point(|&u| u < j);
                        ready.insert(pos, j);
                    }
                }
            }
        }
        if order.len() != n {
            return Err(QuiverError::CyclicQuiver);
        }
        if dim_vector[order[0]] != 1 {
            return Err(QuiverError::SourceRankNotOne);
        }
        // In an acyclic quiver with a unique source every vertex is
        // reachable, but check anyway so the error is precise if the
        // topological sort logic ever changes.
        let mut reach = vec![false; n];
        reach[order[0]] = true;
        for &v in &order {
            if !reach[v] {
                return Err(QuiverError::UnreachableVertex(v));
            }
            for (j, &m) in adjacency[v].iter().enumerate() {
                if m > 0 {
                    reach[j] = true;
                }
            }
        }

        let mut adj = vec![vec![0u32; n]; n];
        for (new_i, &old_i) in order.iter().enumerate() {
            for (new_j, &old_j) in order.iter().enumerate() {
                adj[new_i][new_j] = adjacency[old_i][old_j] as u32;
            }
        }
        let ranks = order.iter().map(|&v| dim_vector[v] as u32).collect();
        let quiver = Quiver {
            adjacency: adj,
            dim_vector: ranks,
        };
        Ok((quiver, order))
    }

    /// Rebuilds from already-internal data (trusted topological layout).
    fn from_internal(adjacency: Vec<Vec<u32>>, dim_vector: Vec<u32>) -> Quiver {
        let adj = adjacency
            .iter()
            .map(|r| r.iter().map(|&m| m as i64).collect())
            .collect();
        let ranks = dim_vector.iter().map(|&r| r as i64).collect();
        let (q, _) = Quiver::new(adj, ranks).expect("internal quiver data must be valid");
        q
    }

    pub fn vertex_count(&self) -> usize {
        self.dim_vector.len()
    }

    /// Picard rank: the number of non-source vertices.
    pub fn picard_rank(&self) -> usize {
        self.vertex_count() - 1
    }

    pub fn rank(&self, v: usize) -> i64 {
        self.dim_vector[v] as i64
    }

    pub fn arrows(&self, i: usize, j: usize) -> i64 {
        self.adjacency[i][j] as i64
    }

    /// `s_v`: total rank of sources of arrows into `v`.
    pub fn incoming_rank(&self, v: usize) -> i64 {
        (0..self.vertex_count())
            .map(|u| self.arrows(u, v) * self.rank(u))
            .sum()
    }

    /// `s'_v`: total rank of targets of arrows out of `v`.
    pub fn outgoing_rank(&self, v: usize) -> i64 {
        (0..self.vertex_count())
            .map(|u| self.arrows(v, u) * self.rank(u))
            .sum()
    }

    /// Dimension of the variety: sum over vertices of `r_v (s_v - r_v)`.
    pub fn dimension(&self) -> i64 {
        (1..self.vertex_count())
            .map(|v| self.rank(v) * (self.incoming_rank(v) - self.rank(v)))
            .sum()
    }

    /// Whether every non-source vertex contributes positively (`s_v > r_v`).
    pub fn is_reduced(&self) -> bool {
        (1..self.vertex_count()).all(|v| self.incoming_rank(v) > self.rank(v))
    }

    /// All ranks equal to one, so the variety is toric.
    pub fn is_toric(&self) -> bool {
        self.dim_vector.iter().all(|&r| r == 1)
    }

    /// Number of directed paths from the source to each vertex.
    pub fn path_counts(&self) -> Vec<i64> {
        let n = self.vertex_count();
        let mut counts = vec![0i64; n];
        counts[0] = 1;
        for v in 1..n {
            counts[v] = (0..v).map(|u| counts[u] * self.arrows(u, v)).sum();
        }
        counts
    }

    /// Anticanonical class in the `det W_1 .. det W_rho` basis: each arrow
    /// `a` contributes `r_{s(a)} e_{t(a)} - r_{t(a)} e_{s(a)}`, with the
    /// source coordinate dropped.
    pub fn anticanonical(&self) -> Vec<i64> {
        let n = self.vertex_count();
        let mut k = vec![0i64; n];
        for i in 0..n {
            for j in 0..n {
                let m = self.arrows(i, j);
                if m > 0 {
                    k[j] += m * self.rank(i);
                    k[i] -= m * self.rank(j);
                }
            }
        }
        k.remove(0);
        k
    }

    /// Full derived data bundle.
    pub fn variety_data(&self) -> VarietyData {
        VarietyData {
            incoming_ranks: (0..self.vertex_count())
                .map(|v| self.incoming_rank(v))
                .collect(),
            outgoing_ranks: (0..self.vertex_count())
                .map(|v| self.outgoing_rank(v))
                .collect(),
            dimension: self.dimension(),
            picard_rank: self.picard_rank(),
            path_counts: self.path_counts(),
            anticanonical: self.anticanonical(),
        }
    }

    /// Splits each vertex of rank `r` into `r` rank-one vertices; arrows
    /// between two clones inherit the multiplicity between the original
    /// vertices. Returns the toric quiver together with the block map
    /// sending each new vertex to the original vertex it came from.
    pub fn abelianize(&self) -> (Quiver, Vec<usize>) {
        let n = self.vertex_count();
        let mut block = Vec::new();
        for v in 0..n {
            for _ in 0..self.dim_vector[v] {
                block.push(v);
            }
        }
        let m = block.len();
        let mut adj = vec![vec![0u32; m]; m];
        for (a, &va) in block.iter().enumerate() {
            for (b, &vb) in block.iter().enumerate() {
                adj[a][b] = self.adjacency[va][vb];
            }
        }
        let q = Quiver::from_internal(adj, vec![1; m]);
        (q, block)
    }

    /// Presentation normal form: dimension vector weakly increasing and,
    /// over all vertex permutations preserving it, the sequence of
    /// adjacency columns lexicographically minimal. Returns the normal form
    /// and the permutation used (`perm[new] = old`). Equal normal forms
    /// characterize rank-preserving relabelings of the same quiver.
    pub fn normal_form(&self) -> (NormalForm, Vec<usize>) {
        let n = self.vertex_count();
        // Positions sorted by rank; the source, having the unique all-zero
        // column, always wins position 0 among rank-1 vertices, so we pin
        // it there and permute the rest within equal-rank blocks.
        let mut rest: Vec<usize> = (1..n).collect();
        rest.sort_by_key(|&v| (self.dim_vector[v], v));
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for &v in &rest {
            match blocks.last_mut() {
                Some(b) if self.dim_vector[b[0]] == self.dim_vector[v] => b.push(v),
                _ => blocks.push(vec![v]),
            }
        }
        let mut best: Option<(Vec<Vec<u32>>, Vec<usize>)> = None;
        let mut perm = Vec::with_capacity(n);
        perm.push(0);
        permute_blocks(&blocks, 0, &mut perm, &mut |p| {
            let cols = permuted_columns(&self.adjacency, p);
            let better = match &best {
                None => true,
                Some((b, _)) => cols < *b,
            };
            if better {
                best = Some((cols, p.to_vec()));
            }
        });
        let (cols, p) = best.expect("at least one permutation");
        let ranks: Vec<u32> = p.iter().map(|&v| self.dim_vector[v]).collect();
        (
            NormalForm {
                columns: cols,
                dim_vector: ranks,
            },
            p,
        )
    }

    /// Removes every vertex with `s_v = r_v` (a rank-`r` Grassmannian of a
    /// rank-`r` bundle, i.e. a trivial tower step), splicing each path
    /// through it into a direct arrow, until every non-source vertex
    /// satisfies `s_v > r_v`. The represented variety is unchanged.
    pub fn contract_trivial(&self) -> Quiver {
        let mut q = self.clone();
        loop {
            let n = q.vertex_count();
            let trivial = (1..n).find(|&v| q.incoming_rank(v) == q.rank(v));
            let Some(v) = trivial else {
                return q;
            };
            let mut adj: Vec<Vec<u32>> = Vec::with_capacity(n - 1);
            let keep: Vec<usize> = (0..n).filter(|&u| u != v).collect();
            for &i in &keep {
                let mut row = Vec::with_capacity(n - 1);
                for &j in &keep {
                    let spliced = q.arrows(i, v) * q.arrows(v, j);
                    row.push((q.arrows(i, j) + spliced) as u32);
                }
                adj.push(row);
            }
            let ranks = keep.iter().map(|&u| q.dim_vector[u]).collect();
            q = Quiver::from_internal(adj, ranks);
        }
    }

    /// Checks graftability of `vertex` for the target set `targets` and, if
    /// possible, replaces every arrow `vertex -> j` (for `j` in the set) by
    /// an arrow `source -> j`. The represented variety is unchanged.
    pub fn graft(&self, vertex: usize, targets: &[usize]) -> Result<Quiver, QuiverError> {
        let n = self.vertex_count();
        let fail = |reason| QuiverError::NotGraftable { vertex, reason };
        if vertex == 0 || vertex + 1 >= n {
            return Err(fail(GraftObstruction::BoundaryVertex));
        }
        if self.rank(vertex) != 1 {
            return Err(fail(GraftObstruction::RankNotOne));
        }
        let reachable = self.reachable_from(vertex);
        if targets.iter().any(|&j| j >= n || !reachable[j]) {
            return Err(fail(GraftObstruction::NoPath));
        }
        let mut adj = self.adjacency.clone();
        let mut moved = 0u32;
        for &j in targets {
            moved += adj[vertex][j];
            adj[vertex][j] = 0;
        }
        // With no arrows to replace, removal cannot disconnect anything.
        if moved == 0 || undirected_connected(&adj) {
            return Err(fail(GraftObstruction::StillConnected));
        }
        for &j in targets {
            adj[0][j] += self.adjacency[vertex][j];
        }
        Ok(Quiver::from_internal(adj, self.dim_vector.clone()))
    }

    /// Vertices reachable from `start` by directed paths (including it).
    pub fn reachable_from(&self, start: usize) -> Vec<bool> {
        let n = self.vertex_count();
        let mut seen = vec![false; n];
        seen[start] = true;
        let mut stack = vec![start];
        while let Some(u) = stack.pop() {
            for j in 0..n {
                if self.arrows(u, j) > 0 && !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        seen
    }

    /// Connected components of the underlying undirected graph after
    /// deleting all arrows `vertex -> j` for `j` in `targets`. Returns the
    /// component id per vertex, with the source's component first.
    pub fn components_without_arrows(&self, vertex: usize, targets: &[usize]) -> Vec<usize> {
        let mut adj = self.adjacency.clone();
        for &j in targets {
            adj[vertex][j] = 0;
        }
        undirected_components(&adj)
    }
}

/// Weakly increasing dimension vector with the lexicographically minimal
/// column sequence; the canonical key for quiver deduplication.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NormalForm {
    /// Adjacency matrix columns: `columns[j][i]` is the multiplicity of
    /// arrows from `i` to `j` in the normal-form labeling.
    pub columns: Vec<Vec<u32>>,
    pub dim_vector: Vec<u32>,
}

impl NormalForm {
    /// Reconstructs the quiver (in internal topological labeling).
    pub fn to_quiver(&self) -> Quiver {
        let n = self.dim_vector.len();
        let adj: Vec<Vec<i64>> = (0..n)
            .map(|i| (0..n).map(|j| self.columns[j][i] as i64).collect())
            .collect();
        let ranks = self.dim_vector.iter().map(|&r| r as i64).collect();
        let (q, _) = Quiver::new(adj, ranks).expect("normal form stores a valid quiver");
        q
    }

    /// Row-major adjacency matrix in the normal-form labeling.
    pub fn adjacency_rows(&self) -> Vec<Vec<u32>> {
        let n = self.dim_vector.len();
        (0..n)
            .map(|i| (0..n).map(|j| self.columns[j][i]).collect())
            .collect()
    }
}

fn permuted_columns(adjacency: &[Vec<u32>], perm: &[usize]) -> Vec<Vec<u32>> {
    let n = perm.len();
    (0..n)
        .map(|j| (0..n).map(|i| adjacency[perm[i]][perm[j]]).collect())
        .collect()
}

fn permute_blocks(
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
    permute_all(&mut block, 0, &mut |arrangement| {
        let len = acc.len();
        acc.extend_from_slice(arrangement);
        permute_blocks(blocks, depth + 1, acc, visit);
        acc.truncate(len);
    });
}

fn permute_all(items: &mut [usize], k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == items.len() {
        visit(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute_all(items, k + 1, visit);
        items.swap(k, i);
    }
}

fn undirected_components(adjacency: &[Vec<u32>]) -> Vec<usize> {
    let n = adjacency.len();
    let mut comp = vec![usize::MAX; n];
    let mut next = 0;
    for s in 0..n {
        if comp[s] != usize::MAX {
            continue;
        }
        comp[s] = next;
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            for v in 0..n {
                if (adjacency[u][v] > 0 || adjacency[v][u] > 0) && comp[v] == usize::MAX {
                    comp[v] = next;
                    stack.push(v);
                }
            }
        }
        next += 1;
    }
    comp
}

fn undirected_connected(adjacency: &[Vec<u32>]) -> bool {
    let comp = undirected_components(adjacency);
    comp.iter().all(|&c| c == 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn quiver(adj: &[&[i64]], ranks: &[i64]) -> Quiver {
        let adj = adj.iter().map(|r| r.to_vec()).collect();
        Quiver::new(adj, ranks.to_vec()).unwrap().0
    }

    fn projective_space(n: i64) -> Quiver {
        quiver(&[&[0, n], &[0, 0]], &[1, 1])
    }

    fn grassmannian(n: i64, r: i64) -> Quiver {
        quiver(&[&[0, n], &[0, 0]], &[1, r])
    }

    #[test]
    fn p4_derived_data() {
        let q = projective_space(5);
        let d = q.variety_data();
        assert_eq!(d.dimension, 4);
        assert_eq!(d.incoming_ranks, vec![0, 5]);
        assert_eq!(d.anticanonical, vec![5]);
        assert_eq!(d.path_counts, vec![1, 5]);
    }

    #[test]
    fn gr42_dimension() {
        let q = grassmannian(4, 2);
        assert_eq!(q.dimension(), 4);
        assert_eq!(q.anticanonical(), vec![4]);
    }

    #[test]
    fn two_cycle_is_rejected() {
        let err = Quiver::new(vec![vec![0, 1], vec![1, 0]], vec![1, 1]).unwrap_err();
        assert_eq!(err, QuiverError::CyclicQuiver);
    }

    #[test]
    fn multiple_sources_rejected() {
        let err = Quiver::new(
            vec![vec![0, 0, 1], vec![0, 0, 1], vec![0, 0, 0]],
            vec![1, 1, 1],
        )
        .unwrap_err();
        assert_eq!(err, QuiverError::MultipleSources);
    }

    #[test]
    fn source_rank_must_be_one() {
        let err = Quiver::new(vec![vec![0, 2], vec![0, 0]], vec![2, 1]).unwrap_err();
        assert_eq!(err, QuiverError::SourceRankNotOne);
    }

    #[test]
    fn relabeling_is_sorted_topologically() {
        // Arrow 1 -> 0 in the input labeling; vertex 1 is the source.
        let (q, perm) = Quiver::new(vec![vec![0, 0], vec![3, 0]], vec![1, 1]).unwrap();
        assert_eq!(perm, vec![1, 0]);
        assert_eq!(q.adjacency, vec![vec![0, 3], vec![0, 0]]);
    }

    #[test]
    fn chain_anticanonical() {
        let q = quiver(&[&[0, 2, 0], &[0, 0, 2], &[0, 0, 0]], &[1, 1, 1]);
        assert_eq!(q.anticanonical(), vec![0, 2]);
        assert_eq!(q.path_counts(), vec![1, 2, 4]);
    }

    #[test]
    fn abelianize_grassmannian() {
        let q = grassmannian(4, 2);
        let (ab, block) = q.abelianize();
        assert_eq!(ab.vertex_count(), 3);
        assert!(ab.is_toric());
        assert_eq!(ab.adjacency[0], vec![0, 4, 4]);
        assert_eq!(block, vec![0, 1, 1]);
    }

    #[test]
    fn abelianize_fixes_toric() {
        let q = quiver(&[&[0, 2, 1], &[0, 0, 1], &[0, 0, 0]], &[1, 1, 1]);
        let (ab, _) = q.abelianize();
        assert_eq!(ab, q);
    }

    #[test]
    fn abelianize_arrow_count() {
        // Arrows 5 then 2, dimension vector (1, 3, 2): the Abelianization
        // has 5 non-source vertices and 5*3 + 2*3*2 = 27 arrows.
        let q = quiver(&[&[0, 5, 0], &[0, 0, 2], &[0, 0, 0]], &[1, 3, 2]);
        let (ab, _) = q.abelianize();
        assert_eq!(ab.vertex_count(), 6);
        let arrows: i64 = (0..6)
            .flat_map(|i| (0..6).map(move |j| (i, j)))
            .map(|(i, j)| ab.arrows(i, j))
            .sum();
        assert_eq!(arrows, 27);
        assert_eq!(
            ab.dimension(),
            q.dimension() + (0..3).map(|v| q.rank(v) * (q.rank(v) - 1)).sum::<i64>()
        );
    }

    #[test]
    fn normal_form_idempotent() {
        let q = projective_space(5);
        let (nf, _) = q.normal_form();
        let (nf2, _) = nf.to_quiver().normal_form();
        assert_eq!(nf, nf2);
    }

    #[test]
    fn normal_form_prefers_lex_smaller_columns() {
        // Two orderings of the same pair of sinks; the column sequence
        // decides which one is canonical.
        let a = quiver(&[&[0, 2, 3], &[0, 0, 0], &[0, 0, 0]], &[1, 1, 1]);
        let b = quiver(&[&[0, 3, 2], &[0, 0, 0], &[0, 0, 0]], &[1, 1, 1]);
        assert_eq!(a.normal_form().0, b.normal_form().0);
    }

    #[test]
    fn normal_form_matches_published_chain_layout() {
        // The chain with multiplicities 4, 4 has its canonical columns in a
        // non-topological layout: the all-zero column, then the column fed
        // by the later vertex.
        let q = quiver(&[&[0, 4, 0], &[0, 0, 4], &[0, 0, 0]], &[1, 1, 1]);
        let (nf, _) = q.normal_form();
        assert_eq!(
            nf.adjacency_rows(),
            vec![vec![0, 0, 4], vec![0, 0, 0], vec![0, 4, 0]]
        );
    }

    #[test]
    fn normal_form_constant_on_relabelings() {
        let q = quiver(
            &[
                &[0, 1, 2, 1],
                &[0, 0, 0, 1],
                &[0, 0, 0, 1],
                &[0, 0, 0, 0],
            ],
            &[1, 1, 1, 2],
        );
        let (nf, _) = q.normal_form();
        let n = q.vertex_count();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut seen = 0;
        permute_all(&mut perm, 0, &mut |p| {
            let adj: Vec<Vec<i64>> = (0..n)
                .map(|i| (0..n).map(|j| q.arrows(p[i], p[j])).collect())
                .collect();
            let ranks: Vec<i64> = (0..n).map(|i| q.rank(p[i])).collect();
            if let Ok((rq, _)) = Quiver::new(adj, ranks) {
                assert_eq!(rq.normal_form().0, nf);
                seen += 1;
            }
        });
        assert!(seen > 0);
    }

    #[test]
    fn contract_splices_rank_one_vertex() {
        // 0 ->(2) 1 ->(1) 2 ->(3) 3 with all ranks 1: vertex 2 is trivial.
        let q = quiver(
            &[
                &[0, 2, 0, 0],
                &[0, 0, 1, 0],
                &[0, 0, 0, 3],
                &[0, 0, 0, 0],
            ],
            &[1, 1, 1, 1],
        );
        let c = q.contract_trivial();
        assert_eq!(c, quiver(&[&[0, 2, 0], &[0, 0, 3], &[0, 0, 0]], &[1, 1, 1]));
        assert_eq!(c.dimension(), q.dimension());
    }

    #[test]
    fn contract_fixed_point() {
        let q = grassmannian(4, 2);
        assert_eq!(q.contract_trivial(), q);
    }

    #[test]
    fn graft_requires_disconnection() {
        // With the direct arrow 0 -> 2 present, removing 1 -> 2 leaves the
        // quiver connected, so vertex 1 is not graftable for {2}.
        let q = quiver(&[&[0, 2, 1], &[0, 0, 1], &[0, 0, 0]], &[1, 1, 1]);
        let err = q.graft(1, &[2]).unwrap_err();
        assert_eq!(
            err,
            QuiverError::NotGraftable {
                vertex: 1,
                reason: GraftObstruction::StillConnected
            }
        );
        // Dropping the 0 -> 2 arrow makes it graftable.
        let q = quiver(&[&[0, 2, 0], &[0, 0, 1], &[0, 0, 0]], &[1, 1, 1]);
        let g = q.graft(1, &[2]).unwrap();
        assert_eq!(g, quiver(&[&[0, 2, 1], &[0, 0, 0], &[0, 0, 0]], &[1, 1, 1]));
        assert_eq!(g.dimension(), q.dimension());
    }

    #[test]
    fn graft_chain_to_product() {
        let q = quiver(&[&[0, 2, 0], &[0, 0, 2], &[0, 0, 0]], &[1, 1, 1]);
        let g = q.graft(1, &[2]).unwrap();
        assert_eq!(g, quiver(&[&[0, 2, 2], &[0, 0, 0], &[0, 0, 0]], &[1, 1, 1]));
    }

    #[test]
    fn path_counts_match_dfs_enumeration() {
        // Exhaustive comparison on small random-ish quivers.
        fn dfs_paths(q: &Quiver, from: usize, to: usize) -> i64 {
            if from == to {
                return 1;
            }
            (0..q.vertex_count())
                .filter(|&j| q.arrows(from, j) > 0)
                .map(|j| q.arrows(from, j) * dfs_paths(q, j, to))
                .sum()
        }
        let samples = [
            quiver(&[&[0, 2, 1], &[0, 0, 3], &[0, 0, 0]], &[1, 1, 1]),
            quiver(&[&[0, 2, 0], &[0, 0, 1], &[0, 0, 0]], &[1, 2, 1]),
            quiver(
                &[
                    &[0, 1, 1, 1],
                    &[0, 0, 2, 0],
                    &[0, 0, 0, 2],
                    &[0, 0, 0, 0],
                ],
                &[1, 1, 1, 1],
            ),
        ];
        for q in &samples {
            let counts = q.path_counts();
            for v in 0..q.vertex_count() {
                assert_eq!(counts[v], dfs_paths(q, 0, v));
            }
        }
    }

    #[test]
    fn quiver_json_round_trip() {
        let q = quiver(&[&[0, 5, 2], &[0, 0, 1], &[0, 0, 0]], &[1, 3, 2]);
        let s = serde_json::to_string(&q).unwrap();
        let back: Quiver = serde_json::from_str(&s).unwrap();
        assert_eq!(back, q);
        assert_eq!(serde_json::to_string(&back).unwrap(), s);
    }
}
