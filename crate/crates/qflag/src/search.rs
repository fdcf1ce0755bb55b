//! The classification and search pipeline: enumerate Fano quiver flag
//! varieties by dimension, enumerate candidate bundles whose generic
//! sections cut out Fano fourfolds, screen out empty or disconnected zero
//! loci, bucket by period sequence, and simplify models before the
//! expensive computations.


use crate::cones;
use crate::linalg;
use crate::period::PeriodSequence;
use crate::quiver::{NormalForm, Quiver};
use crate::schur::{BundleSpec, BundleSummand, GeneralizedPartition};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

/// One classified Fano quiver flag variety, stored in normal form. The
/// divisor coordinates (anticanonical, nef rays) refer to the topological
/// relabeling of the stored matrix, which is deterministic.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationRecord {
    pub id: u64,
    pub adjacency: Vec<Vec<u32>>,
    pub dim_vector: Vec<u32>,
    pub dimension: i64,
    pub picard_rank: usize,
    pub anticanonical: Vec<i64>,
    pub nef_rays: Vec<Vec<i64>>,
    pub fano: bool,
}

impl ClassificationRecord {
    /// The quiver in internal topological labeling.
    pub fn quiver(&self) -> Quiver {
        let adj = self
            .adjacency
            .iter()
            .map(|r| r.iter().map(|&m| m as i64).collect())
            .collect();
        let ranks = self.dim_vector.iter().map(|&r| r as i64).collect();
        Quiver::new(adj, ranks).expect("stored record is valid").0
    }
}

/// A candidate or screened zero locus together with its invariants.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZeroLocusRecord {
    pub quiver_id: u64,
    /// Summands in the pair normal form.
    pub bundle: Vec<BundleSummand>,
    pub degree: i64,
    pub euler: i64,
    pub chi_o: i64,
    pub chi_k: i64,
    pub chi_2k: i64,
    pub alpha: PeriodSequence,
    /// Assigned after bucketing.
    pub bucket: Option<u64>,
}

/// Enumerates all quiver flag varieties with every vertex contributing
/// positively to the dimension (`s_v > r_v`), up to the dimension bound,
/// and keeps the Fano ones. Records carry ids in the canonical order.
pub fn classify_fano(max_dim: i64) -> Vec<ClassificationRecord> {
    let all = enumerate_all(max_dim);
    let mut fano: Vec<(NormalForm, Quiver)> = all
        .into_iter()
        .filter(|(_, q)| cones::is_fano(q))
        .collect();
    sort_for_ids(&mut fano);
    fano.into_iter()
        .enumerate()
        .map(|(k, (nf, q))| {
            let rays = cones::cone_rays(&cones::nef_cone(&q))
                .expect("nef cones of quiver flag varieties are simplicial")
                .rays;
            ClassificationRecord {
                id: k as u64 + 1,
                adjacency: nf.adjacency_rows(),
                dim_vector: nf.dim_vector.clone(),
                dimension: q.dimension(),
                picard_rank: q.picard_rank(),
                anticanonical: q.anticanonical(),
                nef_rays: rays,
                fano: true,
            }
        })
        .collect()
}

/// Classification counts by (dimension, Picard rank).
pub fn count_by_dim_rank(records: &[ClassificationRecord]) -> BTreeMap<(i64, usize), usize> {
    let mut counts = BTreeMap::new();
    for r in records {
        *counts.entry((r.dimension, r.picard_rank)).or_insert(0) += 1;
    }
    counts
}

/// All quivers with `s_v > r_v` of dimension between 1 and the bound,
/// deduplicated by normal form. Grassmannians seed the enumeration; each
/// quiver is extended by one new sink vertex in all ways that fit in the
/// remaining dimension budget.
fn enumerate_all(max_dim: i64) -> Vec<(NormalForm, Quiver)> {
    let mut seen: HashSet<NormalForm> = HashSet::new();
    let mut out: Vec<(NormalForm, Quiver)> = Vec::new();
    let mut queue: Vec<Quiver> = Vec::new();
    // Grassmannian seeds.
    for n in 2..=max_dim + 1 {
        for r in 1..n {
            if r * (n - r) <= max_dim {
                let (q, _) = Quiver::new(vec![vec![0, n], vec![0, 0]], vec![1, r]).unwrap();
                push_candidate(q, &mut seen, &mut out, &mut queue);
            }
        }
    }
    while let Some(q) = queue.pop() {
        let remaining = max_dim - q.dimension();
        if remaining <= 0 {
            continue;
        }
        let nv = q.vertex_count();
        // Multiplicity vectors into the new sink: total incoming rank
        // between 2 and remaining + 1 (a new vertex adds at least s - 1).
        let mut mult = vec![0i64; nv];
        extend_with_sink(&q, remaining, 0, 0, &mut mult, &mut |q, mult, s_new| {
            for r_new in 1..s_new {
                if r_new * (s_new - r_new) > remaining {
                    continue;
                }
                let mut adj: Vec<Vec<i64>> = q
                    .adjacency
                    .iter()
                    .map(|row| {
                        let mut r: Vec<i64> = row.iter().map(|&m| m as i64).collect();
                        r.push(0);
                        r
                    })
                    .collect();
                let last = adj.len();
                for (v, row) in adj.iter_mut().enumerate() {
                    row[last] = mult[v];
                }
                adj.push(vec![0i64; last + 1]);
                let mut ranks: Vec<i64> = q.dim_vector.iter().map(|&r| r as i64).collect();
                ranks.push(r_new);
                let (candidate, _) = Quiver::new(adj, ranks).expect("extension stays valid");
                push_candidate(candidate, &mut seen, &mut out, &mut queue);
            }
        });
    }
    out
}

fn push_candidate(
    q: Quiver,
    seen: &mut HashSet<NormalForm>,
    out: &mut Vec<(NormalForm, Quiver)>,
    queue: &mut Vec<Quiver>,
) {
    let (nf, _) = q.normal_form();
    if seen.insert(nf.clone()) {
        out.push((nf, q.clone()));
        queue.push(q);
    }
}

fn extend_with_sink(
    q: &Quiver,
    remaining: i64,
    vertex: usize,
    total: i64,
    mult: &mut Vec<i64>,
    visit: &mut impl FnMut(&Quiver, &[i64], i64),
) {
    if vertex == q.vertex_count() {
        if total >= 2 {
            visit(q, mult, total);
        }
        return;
    }
    let rank = q.rank(vertex);
    let mut m = 0;
    while total + m * rank <= remaining + 1 {
        mult[vertex] = m;
        extend_with_sink(q, remaining, vertex + 1, total + m * rank, mult, visit);
        m += 1;
    }
    mult[vertex] = 0;
}

/// Canonical total order: dimension, then Picard rank, then the dimension
/// vector lexicographically, then the adjacency columns lexicographically.
fn sort_for_ids(records: &mut [(NormalForm, Quiver)]) {
    records.sort_by(|(a, qa), (b, qb)| {
        (qa.dimension(), qa.picard_rank())
            .cmp(&(qb.dimension(), qb.picard_rank()))
            .then_with(|| a.dim_vector.cmp(&b.dim_vector))
            .then_with(|| a.columns.cmp(&b.columns))
    });
}

/// Re-sorts and re-ids an already classified set; the result is invariant
/// under input order.
pub fn assign_ids(mut records: Vec<ClassificationRecord>) -> Vec<ClassificationRecord> {
    records.sort_by(|a, b| {
        (a.dimension, a.picard_rank, &a.dim_vector, columns_of(a))
            .cmp(&(b.dimension, b.picard_rank, &b.dim_vector, columns_of(b)))
    });
    for (k, r) in records.iter_mut().enumerate() {
        r.id = k as u64 + 1;
    }
    records
}

fn columns_of(r: &ClassificationRecord) -> Vec<Vec<u32>> {
    let n = r.dim_vector.len();
    (0..n)
        .map(|j| (0..n).map(|i| r.adjacency[i][j]).collect())
        .collect()
}

/// The irreducible candidate summands on a Fano quiver flag variety:
/// nontrivial, rank at most `budget`, all split roots nef, and with enough
/// ample slack left: `-K - c1` ample; moreover a summand of rank below the
/// budget must be completable, so one more nonzero nef class has to fit
/// inside the remaining slack (every other summand contributes one).
/// Returned split into the summands of rank at least two and the line
/// bundles.
pub fn irreducible_summands(
    q: &Quiver,
    budget: i64,
) -> (Vec<BundleSummand>, Vec<BundleSummand>) {
    if budget <= 0 {
        return (Vec::new(), Vec::new());
    }
    let minus_k = q.anticanonical();
    let admissible = admissible_first_chern(q, &minus_k);
    let rho = q.picard_rank();
    // Candidate shapes per vertex: non-negative partitions with last part
    // zero whose Schur rank is at most the budget.
    let mut shapes: Vec<Vec<(Vec<i64>, i64)>> = Vec::new();
    for v in 1..=rho {
        let r = q.rank(v) as usize;
        let mut list = vec![(vec![0i64; r], 1i64)];
        if r >= 2 {
            for shape in partitions_with_bound(budget, r) {
                let rank = crate::schur::ssyt_contents(&shape, r).unwrap().len() as i64;
                if rank <= budget && rank > 1 {
                    list.push((shape, rank));
                }
            }
        }
        shapes.push(list);
    }
    let mut rank2 = Vec::new();
    let mut lines = BTreeSet::new();
    let mut pick = vec![0usize; rho];
    loop {
        let rank: i64 = pick
            .iter()
            .enumerate()
            .map(|(v, &k)| shapes[v][k].1)
            .product();
        if rank <= budget {
            for x in &admissible {
                if rank < budget {
                    let slack: Vec<i64> =
                        minus_k.iter().zip(x).map(|(a, b)| a - b).collect();
                    if !has_nonzero_nef_headroom(q, &slack) {
                        continue;
                    }
                }
                if let Some(summand) = realize_summand(q, &shapes, &pick, rank, x) {
                    if summand.is_trivial() {
                        continue;
                    }
                    let spec = BundleSpec {
                        summands: vec![summand.clone()],
                    };
                    if !spec.roots_all_nef(q).unwrap_or(false) {
                        continue;
                    }
                    if rank == 1 {
                        lines.insert(summand);
                    } else {
                        rank2.push(summand);
                    }
                }
            }
        }
        // Odometer.
        let mut v = 0;
        loop {
            if v == rho {
                rank2.sort();
                rank2.dedup();
                return (rank2, lines.into_iter().collect());
            }
            pick[v] += 1;
            if pick[v] < shapes[v].len() {
                break;
            }
            pick[v] = 0;
            v += 1;
        }
    }
}

/// Whether some nonzero nef lattice class fits strictly inside the given
/// ample budget.
fn has_nonzero_nef_headroom(q: &Quiver, budget: &[i64]) -> bool {
    admissible_first_chern(q, budget)
        .iter()
        .any(|y| y.iter().any(|&c| c != 0))
}

/// Nef lattice classes `x` with `-K - x` ample.
fn admissible_first_chern(q: &Quiver, minus_k: &[i64]) -> Vec<Vec<i64>> {
    let nef = cones::nef_cone(q);
    // The sum of the inequality rows is strictly positive away from the
    // apex of a pointed cone, so it bounds the slice; nef classes with
    // ample complement satisfy <omega, x> <= <omega, -K>.
    let omega: Vec<i64> = {
        let rho = q.picard_rank();
        (0..rho)
            .map(|j| nef.inequalities.iter().map(|r| r[j]).sum())
            .collect()
    };
    let bound = linalg::dot(&omega, minus_k);
    cones::lattice_slice(&nef, &omega, bound)
        .expect("omega is strictly positive on the nef cone")
        .into_iter()
        .filter(|x| {
            let slack: Vec<i64> = minus_k.iter().zip(x).map(|(a, b)| a - b).collect();
            cones::is_ample(q, &slack)
        })
        .collect()
}

/// Builds the summand with the chosen shapes and first Chern class `x`,
/// when the determinant shifts work out to integers.
fn realize_summand(
    q: &Quiver,
    shapes: &[Vec<(Vec<i64>, i64)>],
    pick: &[usize],
    rank: i64,
    x: &[i64],
) -> Option<BundleSummand> {
    let mut parts = Vec::with_capacity(shapes.len());
    for (v, &k) in pick.iter().enumerate() {
        let (shape, _) = &shapes[v][k];
        let r = q.rank(v + 1);
        let weight: i64 = shape.iter().sum();
        // x_v = rank * (|shape|/r + shift)  =>  shift = x_v/rank - |shape|/r.
        let num = x[v] * r - rank * weight;
        let den = rank * r;
        if num % den != 0 {
            return None;
        }
        let shift = num / den;
        let beta: Vec<i64> = shape.iter().map(|p| p + shift).collect();
        parts.push(GeneralizedPartition(beta));
    }
    Some(BundleSummand(parts))
}

/// Non-negative partitions with exactly `rows` parts, last part zero, at
/// least one positive part, and parts bounded by the Schur rank budget.
fn partitions_with_bound(budget: i64, rows: usize) -> Vec<Vec<i64>> {
    // A shape with first part p has rank at least (p + rows - 1)/(rows - 1),
    // so p can be bounded by (budget - 1) * (rows - 1).
    let cap = (budget - 1).max(0) * (rows as i64 - 1);
    let mut out = Vec::new();
    let mut shape = vec![0i64; rows];
    fn rec(shape: &mut Vec<i64>, idx: usize, cap: i64, out: &mut Vec<Vec<i64>>) {
        if idx + 1 == shape.len() {
            // last part pinned to zero
            if shape[..idx].iter().any(|&p| p > 0) {
                out.push(shape.clone());
            }
            return;
        }
        for p in 0..=cap {
            shape[idx] = p;
            rec(shape, idx + 1, p, out);
        }
        shape[idx] = 0;
    }
    rec(&mut shape, 0, cap, &mut out);
    out
}

/// The two-stage bundle search: all direct sums of irreducible summands of
/// total rank `dim - 4` whose adjoint class stays ample. Stage one places
/// higher-rank summands by matching Hilbert-basis decompositions of a nef
/// class against their first Chern classes; stage two fills the remaining
/// rank with nef line bundles the same way.
pub fn search_bundles(q: &Quiver) -> Vec<BundleSpec> {
    let dim = q.dimension();
    assert!(dim >= 4, "bundle search requires ambient dimension >= 4");
    let c = dim - 4;
    if c == 0 {
        return vec![BundleSpec::empty()];
    }
    let (irr1, irr2) = irreducible_summands(q, c);
    let minus_k = q.anticanonical();
    let nef = cones::nef_cone(q);
    let hb = cones::hilbert_basis(&nef).expect("nef cone is pointed and full-dimensional");
    // Index rank >= 2 summands by first Chern class.
    let mut by_c1: HashMap<Vec<i64>, Vec<(BundleSummand, i64)>> = HashMap::new();
    for s in &irr1 {
        let spec = BundleSpec {
            summands: vec![s.clone()],
        };
        let c1 = spec.first_chern(q).unwrap();
        let rank = s.rank(q).unwrap();
        by_c1.entry(c1).or_default().push((s.clone(), rank));
    }
    let line_set: BTreeSet<&BundleSummand> = irr2.iter().collect();
    let xs = admissible_first_chern(q, &minus_k);
    let mut found: BTreeMap<Vec<BundleSummand>, BundleSpec> = BTreeMap::new();
    for x in &xs {
        let decomps = cones::decompose(x, &hb, &nef).expect("x is nef");
        let max_groups = (c / 2) as usize;
        for decomp in &decomps {
            for grouping in multiset_groupings(decomp, 1, max_groups) {
                // match each group sum against rank >= 2 summands
                let sums: Vec<Vec<i64>> = grouping
                    .iter()
                    .map(|g| group_sum(g, &hb, q.picard_rank()))
                    .collect();
                let mut choices: Vec<&Vec<(BundleSummand, i64)>> = Vec::new();
                let mut ok = true;
                for s in &sums {
                    match by_c1.get(s) {
                        Some(list) => choices.push(list),
                        None => {
                            ok = false;
                            break;
                        }
                    }
                }
                if !ok {
                    continue;
                }
                cartesian(&choices, &mut |combo: &[&(BundleSummand, i64)]| {
                    let c_tilde: i64 = combo.iter().map(|(_, r)| r).sum();
                    if c_tilde > c {
                        return;
                    }
                    let e1: Vec<BundleSummand> =
                        combo.iter().map(|(s, _)| s.clone()).collect();
                    complete_with_lines(
                        q, &minus_k, x, &nef, &hb, &line_set, c - c_tilde, &e1, &mut found,
                    );
                });
            }
            // The empty grouping: only valid when the decomposition is
            // empty (x = 0), handled below.
        }
        if x.iter().all(|&v| v == 0) {
            complete_with_lines(q, &minus_k, x, &nef, &hb, &line_set, c, &[], &mut found);
        }
    }
    found.into_values().collect()
}

#[allow(clippy::too_many_arguments)]
fn complete_with_lines(
    q: &Quiver,
    minus_k: &[i64],
    x: &[i64],
    nef: &cones::Cone,
    hb: &cones::HilbertBasis,
    line_set: &BTreeSet<&BundleSummand>,
    lines_needed: i64,
    e1: &[BundleSummand],
    found: &mut BTreeMap<Vec<BundleSummand>, BundleSpec>,
) {
    let after_x: Vec<i64> = minus_k.iter().zip(x).map(|(a, b)| a - b).collect();
    if lines_needed == 0 {
        record_bundle(q, e1.to_vec(), found);
        return;
    }
    // Enumerate nef y with -K - x - y ample.
    let ys = admissible_first_chern(q, &after_x);
    for y in &ys {
        if y.iter().all(|&v| v == 0) {
            continue; // line bundles are nontrivial, so y = 0 gives nothing
        }
        let decomps = cones::decompose(y, hb, nef).expect("y is nef");
        for decomp in &decomps {
            if (decomp.len() as i64) < lines_needed {
                continue;
            }
            for grouping in
                multiset_groupings(decomp, lines_needed as usize, lines_needed as usize)
            {
                let mut summands = e1.to_vec();
                let mut ok = true;
                for g in &grouping {
                    let c1 = group_sum(g, hb, q.picard_rank());
                    let line = line_summand(q, &c1);
                    if !line_set.contains(&line) {
                        ok = false;
                        break;
                    }
                    summands.push(line);
                }
                if ok {
                    record_bundle(q, summands, found);
                }
            }
        }
    }
}

fn record_bundle(
    q: &Quiver,
    summands: Vec<BundleSummand>,
    found: &mut BTreeMap<Vec<BundleSummand>, BundleSpec>,
) {
    let spec = BundleSpec::new(summands);
    let (_, canonical) = spec.normal_form(q);
    found.entry(canonical).or_insert(spec);
}

fn group_sum(group: &[usize], hb: &cones::HilbertBasis, rho: usize) -> Vec<i64> {
    let mut s = vec![0i64; rho];
    for &k in group {
        for (i, &v) in hb.elements[k].iter().enumerate() {
            s[i] += v;
        }
    }
    s
}

/// The line bundle summand with the given determinant twists.
fn line_summand(q: &Quiver, twists: &[i64]) -> BundleSummand {
    BundleSummand(
        (1..q.vertex_count())
            .map(|v| GeneralizedPartition(vec![twists[v - 1]; q.rank(v) as usize]))
            .collect(),
    )
}

/// Partitions of a multiset (given as a sorted index list) into between
/// `min_groups` and `max_groups` non-empty unlabeled groups.
fn multiset_groupings(items: &[usize], min_groups: usize, max_groups: usize) -> Vec<Vec<Vec<usize>>> {
    if items.is_empty() {
        return Vec::new();
    }
    let mut seen: BTreeSet<Vec<Vec<usize>>> = BTreeSet::new();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    fn rec(
        items: &[usize],
        idx: usize,
        max_groups: usize,
        groups: &mut Vec<Vec<usize>>,
        seen: &mut BTreeSet<Vec<Vec<usize>>>,
        min_groups: usize,
    ) {
        if idx == items.len() {
            if groups.len() >= min_groups && !groups.is_empty() {
                let mut canon = groups.clone();
                canon.sort();
                seen.insert(canon);
            }
            return;
        }
        for g in 0..groups.len() {
            groups[g].push(items[idx]);
            rec(items, idx + 1, max_groups, groups, seen, min_groups);
            groups[g].pop();
        }
        if groups.len() < max_groups {
            groups.push(vec![items[idx]]);
            rec(items, idx + 1, max_groups, groups, seen, min_groups);
            groups.pop();
        }
    }
    rec(items, 0, max_groups, &mut groups, &mut seen, min_groups);
    seen.into_iter().collect()
}

fn cartesian<'a, T>(choices: &[&'a Vec<T>], visit: &mut impl FnMut(&[&'a T])) {
    let mut current: Vec<&T> = Vec::with_capacity(choices.len());
    fn rec<'a, T>(
        choices: &[&'a Vec<T>],
        depth: usize,
        current: &mut Vec<&'a T>,
        visit: &mut impl FnMut(&[&'a T]),
    ) {
        if depth == choices.len() {
            visit(current);
            return;
        }
        for item in choices[depth] {
            current.push(item);
            rec(choices, depth + 1, current, visit);
            current.pop();
        }
    }
    rec(choices, 0, &mut current, visit);
}

/// Cheap sufficient emptiness test: a vertex fed only by the source with
/// `2r - 1 > s` kills any generic section of the exterior or symmetric
/// square of its tautological bundle.
pub fn is_known_empty(q: &Quiver, e: &BundleSpec) -> bool {
    for v in 1..q.vertex_count() {
        let source_fed = (1..q.vertex_count()).all(|u| q.arrows(u, v) == 0);
        if !source_fed {
            continue;
        }
        let r = q.rank(v);
        let s = q.incoming_rank(v);
        if 2 * r - 1 <= s {
            continue;
        }
        for summand in &e.summands {
            let beta = &summand.0[v - 1];
            let sym = is_pattern(beta, &[2]);
            let ext = is_pattern(beta, &[1, 1]);
            let others_zero = summand
                .0
                .iter()
                .enumerate()
                .all(|(i, p)| i == v - 1 || p.is_zero());
            if (sym || ext) && others_zero {
                return true;
            }
        }
    }
    false
}

fn is_pattern(p: &GeneralizedPartition, head: &[i64]) -> bool {
    if p.len() < head.len() {
        return false;
    }
    p.0[..head.len()] == *head && p.0[head.len()..].iter().all(|&x| x == 0)
}

/// A period-sequence bucket: the records sharing one sequence.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Bucket {
    pub id: u64,
    pub alpha: PeriodSequence,
    pub degree: i64,
    pub euler: i64,
    pub chi_k: i64,
    pub chi_2k: i64,
    pub members: usize,
    /// Representative: quiver id and bundle of the first member.
    pub representative: (u64, Vec<BundleSummand>),
}

/// Discards records whose structure sheaf Euler characteristic is not one
/// (empty or disconnected loci), groups the rest by period sequence, and
/// checks that degree, Euler number, and the Hilbert coefficients agree
/// within each bucket. Mismatches are reported, not fatal.
pub fn screen_and_bucket(
    mut records: Vec<ZeroLocusRecord>,
) -> (Vec<ZeroLocusRecord>, Vec<Bucket>, Vec<String>) {
    records.retain(|r| r.chi_o == 1);
    let mut keys: Vec<Vec<crate::linalg::Rat>> = records
        .iter()
        .map(|r| r.alpha.alpha.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    keys.sort();
    let index: BTreeMap<Vec<crate::linalg::Rat>, u64> = keys
        .iter()
        .enumerate()
        .map(|(k, a)| (a.clone(), k as u64 + 1))
        .collect();
    for r in &mut records {
        r.bucket = Some(index[&r.alpha.alpha]);
    }
    let mut buckets: BTreeMap<u64, Bucket> = BTreeMap::new();
    let mut collisions = Vec::new();
    for r in &records {
        let id = r.bucket.unwrap();
        match buckets.get_mut(&id) {
            None => {
                buckets.insert(
                    id,
                    Bucket {
                        id,
                        alpha: r.alpha.clone(),
                        degree: r.degree,
                        euler: r.euler,
                        chi_k: r.chi_k,
                        chi_2k: r.chi_2k,
                        members: 1,
                        representative: (r.quiver_id, r.bundle.clone()),
                    },
                );
            }
            Some(b) => {
                b.members += 1;
                if b.degree != r.degree
                    || b.euler != r.euler
                    || b.chi_k != r.chi_k
                    || b.chi_2k != r.chi_2k
                {
                    collisions.push(format!(
                        "bucket {} invariant mismatch: ({}, {}, {}, {}) vs ({}, {}, {}, {})",
                        id,
                        b.degree,
                        b.euler,
                        b.chi_k,
                        b.chi_2k,
                        r.degree,
                        r.euler,
                        r.chi_k,
                        r.chi_2k
                    ));
                }
            }
        }
    }
    (records, buckets.into_values().collect(), collisions)
}

/// Replaces a model by a cheaper equivalent one: strips summands that are
/// single arrow classes while deleting the arrow, grafts line-bundle
/// vertices to the source, and contracts trivial tower steps, carrying the
/// bundle along each move. Every move preserves the zero locus.
pub fn simplify_model(q: &Quiver, e: &BundleSpec) -> (Quiver, BundleSpec) {
    let mut q = q.clone();
    let mut e = e.clone();
    loop {
        if let Some((nq, ne)) = strip_arrow_summand(&q, &e) {
            q = nq;
            e = ne;
            continue;
        }
        if let Some((nq, ne)) = contract_with_bundle(&q, &e) {
            q = nq;
            e = ne;
            continue;
        }
        if let Some((nq, ne)) = graft_with_bundle(&q, &e) {
            q = nq;
            e = ne;
            continue;
        }
        return (q, e);
    }
}

/// Rebuilds a (quiver, bundle) pair from raw adjacency data in an
/// arbitrary vertex order, remapping the per-vertex partitions through the
/// validation permutation.
fn revalidate_pair(
    adjacency: Vec<Vec<i64>>,
    ranks: Vec<i64>,
    summands: Vec<Vec<GeneralizedPartition>>,
) -> (Quiver, BundleSpec) {
    let (q, perm) = Quiver::new(adjacency, ranks).expect("rebuilt quiver stays valid");
    let summands = summands
        .into_iter()
        .map(|parts| {
            BundleSummand(
                (1..q.vertex_count())
                    .map(|new_v| parts[perm[new_v] - 1].clone())
                    .collect(),
            )
        })
        .collect();
    (q, BundleSpec::new(summands))
}

/// A summand equal to a single arrow class `W_s^* (x) W_t` between rank-one
/// vertices (or `W_t` itself when fed from the source) is the zero locus of
/// one arrow: remove both. Requires the target to keep an incoming arrow.
fn strip_arrow_summand(q: &Quiver, e: &BundleSpec) -> Option<(Quiver, BundleSpec)> {
    for (idx, summand) in e.summands.iter().enumerate() {
        let mut plus: Option<usize> = None;
        let mut minus: Option<usize> = None;
        let mut ok = true;
        for (v, p) in summand.0.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            let vertex = v + 1;
            if p.0 == vec![1] && q.rank(vertex) == 1 && plus.is_none() {
                plus = Some(vertex);
            } else if p.0 == vec![-1] && q.rank(vertex) == 1 && minus.is_none() {
                minus = Some(vertex);
            } else {
                ok = false;
                break;
            }
        }
        let Some(t) = plus else { continue };
        if !ok {
            continue;
        }
        let s = minus.unwrap_or(0);
        if q.arrows(s, t) == 0 {
            continue;
        }
        // Keep the tower step alive after the removal.
        if q.incoming_rank(t) - q.rank(s) < q.rank(t) {
            continue;
        }
        let mut adj: Vec<Vec<i64>> = q
            .adjacency
            .iter()
            .map(|r| r.iter().map(|&m| m as i64).collect())
            .collect();
        adj[s][t] -= 1;
        let ranks: Vec<i64> = q.dim_vector.iter().map(|&r| r as i64).collect();
        let summands: Vec<Vec<GeneralizedPartition>> = e
            .summands
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != idx)
            .map(|(_, s)| s.0.clone())
            .collect();
        return Some(revalidate_pair(adj, ranks, summands));
    }
    None
}

/// Contracts a trivial tower step (`s_v = r_v`) when the bundle can be
/// carried along: either no summand touches the vertex, or the vertex is a
/// pass-through of a single arrow from an equal-rank vertex so its
/// tautological bundle is identified with the neighbor's.
fn contract_with_bundle(q: &Quiver, e: &BundleSpec) -> Option<(Quiver, BundleSpec)> {
    let n = q.vertex_count();
    for v in 1..n {
        if q.incoming_rank(v) != q.rank(v) {
            continue;
        }
        let untouched = e.summands.iter().all(|s| s.0[v - 1].is_zero());
        // Pass-through: one arrow from one vertex of equal rank.
        let feeders: Vec<usize> = (0..n).filter(|&u| q.arrows(u, v) > 0).collect();
        let pass_through = feeders.len() == 1
            && q.arrows(feeders[0], v) == 1
            && q.rank(feeders[0]) == q.rank(v)
            && feeders[0] != 0;
        if !untouched && !pass_through {
            continue;
        }
        if !untouched {
            let k = feeders[0];
            // Merging needs at most one of the two slots nonzero per
            // summand, or rank one so determinant powers add.
            let mergeable = e.summands.iter().all(|s| {
                let pv = &s.0[v - 1];
                let pk = &s.0[k - 1];
                pv.is_zero() || pk.is_zero() || q.rank(v) == 1
            });
            if !mergeable {
                continue;
            }
        }
        // Splice the vertex out.
        let keep: Vec<usize> = (0..n).filter(|&u| u != v).collect();
        let adj: Vec<Vec<i64>> = keep
            .iter()
            .map(|&i| {
                keep.iter()
                    .map(|&j| q.arrows(i, j) + q.arrows(i, v) * q.arrows(v, j))
                    .collect()
            })
            .collect();
        let ranks: Vec<i64> = keep.iter().map(|&u| q.rank(u)).collect();
        let summands: Vec<Vec<GeneralizedPartition>> = e
            .summands
            .iter()
            .map(|s| {
                let mut parts: Vec<GeneralizedPartition> = keep[1..]
                    .iter()
                    .map(|&u| s.0[u - 1].clone())
                    .collect();
                if !s.0[v - 1].is_zero() {
                    // Transport onto the feeder (position of k among keep).
                    let k = feeders[0];
                    let pos = keep[1..].iter().position(|&u| u == k).unwrap();
                    let pv = &s.0[v - 1];
                    if parts[pos].is_zero() {
                        parts[pos] = pv.clone();
                    } else {
                        // rank one: determinant powers add
                        parts[pos] = GeneralizedPartition(vec![parts[pos].0[0] + pv.0[0]]);
                    }
                }
                parts
            })
            .collect();
        return Some(revalidate_pair(adj, ranks, summands));
    }
    None
}

/// Grafts arrows out of a rank-one vertex onto the source when removing
/// them disconnects a component; the tautological bundles of the severed
/// component pick up a twist by the vertex, which the summands absorb as a
/// determinant power.
fn graft_with_bundle(q: &Quiver, e: &BundleSpec) -> Option<(Quiver, BundleSpec)> {
    let n = q.vertex_count();
    for v in 1..n.saturating_sub(1) {
        if q.rank(v) != 1 {
            continue;
        }
        let out_neighbors: Vec<usize> = (0..n).filter(|&j| q.arrows(v, j) > 0).collect();
        if out_neighbors.is_empty() {
            continue;
        }
        let comp = q.components_without_arrows(v, &out_neighbors);
        if comp.iter().all(|&c| c == comp[0]) {
            continue; // still connected
        }
        // Components not containing the source, one graft per component.
        let comps: BTreeSet<usize> = comp.iter().copied().filter(|&c| c != comp[0]).collect();
        for target_comp in comps {
            let targets: Vec<usize> = out_neighbors
                .iter()
                .copied()
                .filter(|&j| comp[j] == target_comp)
                .collect();
            if targets.is_empty() {
                continue;
            }
            let twisted: Vec<usize> = (0..n).filter(|&u| comp[u] == target_comp).collect();
            let mut adj: Vec<Vec<i64>> = q
                .adjacency
                .iter()
                .map(|r| r.iter().map(|&m| m as i64).collect())
                .collect();
            for &j in &targets {
                adj[0][j] += adj[v][j];
                adj[v][j] = 0;
            }
            let ranks: Vec<i64> = q.dim_vector.iter().map(|&r| r as i64).collect();
            let summands: Vec<Vec<GeneralizedPartition>> = e
                .summands
                .iter()
                .map(|s| {
                    let twist: i64 = twisted
                        .iter()
                        .map(|&u| s.0[u - 1].sum())
                        .sum();
                    let mut parts = s.0.clone();
                    if twist != 0 {
                        parts[v - 1] = GeneralizedPartition(vec![parts[v - 1].0[0] + twist]);
                    }
                    parts
                })
                .collect();
            return Some(revalidate_pair(adj, ranks, summands));
        }
    }
    None
}
