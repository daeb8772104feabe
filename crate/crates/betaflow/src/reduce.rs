//! Flow moves on unlabeled graphs and the reduction of fiber product covers
//! to their normal form.
//!
//! Two local moves are provided: contraction of a vertex with unique in- and
//! out-edges (a symbol contraction on the edge shift) and in-amalgamation of
//! two vertices with identical out-edge rows (an elementary conjugacy). Both
//! preserve the Bowen-Franks data of `Id - A`, which the reduction engine
//! asserts after every step.

use std::collections::BTreeMap;
use std::fmt;

use serde_json::json;
use thiserror::Error;

use crate::covers::FiberProductCover;
use crate::invariants::{bowen_franks, BowenFranks, IntMatrix};
use crate::moves::{binarize, canonical_form, MoveError};
use crate::seq::{GeneratingSequence, ShiftClass};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReduceError {
    #[error("vertex {0} does not have unique in and out edges")]
    NotUnitVertex(usize),
    #[error("vertex {0} carries a loop and cannot be contracted")]
    LoopAtVertex(usize),
    #[error("vertices {0} and {1} have different out-edge rows")]
    OutRowMismatch(usize, usize),
    #[error("cannot amalgamate a vertex with itself")]
    SameVertex,
    #[error("involution image of the pair overlaps the pair itself")]
    OverlappingImagePair,
    #[error("sequence is periodic (SFT); fiber reduction needs strictly sofic input")]
    SftInput,
    #[error("sequence is not over the binary alphabet")]
    NotBinary,
    #[error("amalgamation pair is not unique: {0:?}")]
    AmbiguousAmalgamation(Vec<(usize, usize)>),
    #[error(transparent)]
    Move(#[from] MoveError),
}

/// A finite directed multigraph, optionally carrying an order-two
/// automorphism.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct UnlabeledGraph {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
    involution: Option<Vec<usize>>,
}

impl UnlabeledGraph {
    pub fn new(vertex_count: usize, edges: Vec<(usize, usize)>) -> Self {
        assert!(edges.iter().all(|&(s, d)| s < vertex_count && d < vertex_count));
        UnlabeledGraph {
            vertex_count,
            edges,
            involution: None,
        }
    }

    pub fn with_involution(
        vertex_count: usize,
        edges: Vec<(usize, usize)>,
        involution: Vec<usize>,
    ) -> Self {
        let mut g = UnlabeledGraph::new(vertex_count, edges);
        assert_eq!(involution.len(), vertex_count);
        for v in 0..vertex_count {
            assert_eq!(involution[involution[v]], v, "involution must square to id");
        }
        let mut counts: BTreeMap<(usize, usize), i64> = BTreeMap::new();
        for &(s, d) in &g.edges {
            *counts.entry((s, d)).or_default() += 1;
            *counts.entry((involution[s], involution[d])).or_default() -= 1;
        }
        assert!(
            counts.values().all(|&c| c == 0),
            "involution must be a graph automorphism"
        );
        g.involution = Some(involution);
        g
    }

    /// The underlying graph of a fiber product cover, with its involution.
    pub fn from_fiber_cover(fiber: &FiberProductCover) -> Self {
        let edges = fiber
            .graph()
            .edges()
            .iter()
            .map(|e| (e.src, e.dst))
            .collect();
        UnlabeledGraph::with_involution(
            fiber.graph().vertex_count(),
            edges,
            fiber.involution().to_vec(),
        )
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn involution(&self) -> Option<&[usize]> {
        self.involution.as_deref()
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(s, _)| s == v).count()
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(_, d)| d == v).count()
    }

    pub fn is_essential(&self) -> bool {
        (0..self.vertex_count).all(|v| self.out_degree(v) >= 1 && self.in_degree(v) >= 1)
    }

    pub fn adjacency_matrix(&self) -> IntMatrix {
        let mut m = IntMatrix::zero(self.vertex_count, self.vertex_count);
        for &(s, d) in &self.edges {
            m[(s, d)] += num_bigint::BigInt::from(1);
        }
        m
    }

    fn sorted_out_row(&self, v: usize) -> Vec<usize> {
        let mut row: Vec<usize> = self
            .edges
            .iter()
            .filter(|&&(s, _)| s == v)
            .map(|&(_, d)| d)
            .collect();
        row.sort_unstable();
        row
    }

    /// Removes `remove` (which must be closed under the involution up to
    /// `collapse`), renumbering the survivors in order. `collapse` maps old
    /// vertices onto their surviving representative.
    fn rebuild(
        &self,
        edges: Vec<(usize, usize)>,
        removed: &[usize],
        collapse: impl Fn(usize) -> usize,
    ) -> UnlabeledGraph {
        let mut new_index = vec![usize::MAX; self.vertex_count];
        let mut next = 0;
        for v in 0..self.vertex_count {
            if !removed.contains(&v) {
                new_index[v] = next;
                next += 1;
            }
        }
        let edges = edges
            .into_iter()
            .map(|(s, d)| (new_index[s], new_index[d]))
            .collect();
        let involution = self.involution.as_ref().map(|inv| {
            (0..self.vertex_count)
                .filter(|&v| !removed.contains(&v))
                .map(|v| new_index[collapse(inv[v])])
                .collect()
        });
        UnlabeledGraph {
            vertex_count: next,
            edges,
            involution,
        }
    }

    fn check_unit(&self, edges: &[(usize, usize)], v: usize) -> Result<(usize, usize), ReduceError> {
        let ins: Vec<usize> = (0..edges.len()).filter(|&i| edges[i].1 == v).collect();
        let outs: Vec<usize> = (0..edges.len()).filter(|&i| edges[i].0 == v).collect();
        if ins.len() != 1 || outs.len() != 1 {
            return Err(ReduceError::NotUnitVertex(v));
        }
        if ins[0] == outs[0] {
            return Err(ReduceError::LoopAtVertex(v));
        }
        Ok((ins[0], outs[0]))
    }

    /// Removes a vertex with unique in-edge `f` and out-edge `e`, splicing
    /// them into a single edge. When an involution is present the same
    /// contraction is applied at the image vertex, keeping equivariance.
    pub fn contract_unit_vertex(&self, v: usize) -> Result<UnlabeledGraph, ReduceError> {
        assert!(v < self.vertex_count);
        let mut targets = vec![v];
        if let Some(inv) = &self.involution {
            if inv[v] != v {
                targets.push(inv[v]);
            }
        }
        let mut edges = self.edges.clone();
        for &t in &targets {
            let (f, e) = self.check_unit(&edges, t)?;
            let spliced = (edges[f].0, edges[e].1);
            let mut keep: Vec<(usize, usize)> = Vec::with_capacity(edges.len() - 1);
            for (i, &edge) in edges.iter().enumerate() {
                if i != f && i != e {
                    keep.push(edge);
                }
            }
            keep.push(spliced);
            edges = keep;
        }
        Ok(self.rebuild(edges, &targets, |x| x))
    }

    /// Whether `u` and `w` have identical out-edge rows (equal multisets of
    /// targets, read literally).
    pub fn amalgamation_ok(&self, u: usize, w: usize) -> bool {
        u != w && self.sorted_out_row(u) == self.sorted_out_row(w)
    }

    fn merge_pair(
        edges: Vec<(usize, usize)>,
        u: usize,
        w: usize,
    ) -> Vec<(usize, usize)> {
        edges
            .into_iter()
            .filter(|&(s, _)| s != w)
            .map(|(s, d)| (s, if d == w { u } else { d }))
            .collect()
    }

    /// Merges `u` and `w` when their out-edge rows coincide: incoming edges
    /// are combined, the duplicate out-edges are identified pairwise. With an
    /// involution, the image pair is merged at the same time.
    pub fn in_amalgamate(&self, u: usize, w: usize) -> Result<UnlabeledGraph, ReduceError> {
        if u == w {
            return Err(ReduceError::SameVertex);
        }
        if !self.amalgamation_ok(u, w) {
            return Err(ReduceError::OutRowMismatch(u, w));
        }
        let mut pairs = vec![(u.min(w), u.max(w))];
        if let Some(inv) = &self.involution {
            let image = (inv[u].min(inv[w]), inv[u].max(inv[w]));
            if image != pairs[0] {
                let overlap = image.0 == pairs[0].0
                    || image.0 == pairs[0].1
                    || image.1 == pairs[0].0
                    || image.1 == pairs[0].1;
                if overlap {
                    return Err(ReduceError::OverlappingImagePair);
                }
                if !self.amalgamation_ok(image.0, image.1) {
                    return Err(ReduceError::OutRowMismatch(image.0, image.1));
                }
                pairs.push(image);
            }
        }
        let mut edges = self.edges.clone();
        let mut removed = Vec::new();
        for &(keep, drop) in &pairs {
            edges = Self::merge_pair(edges, keep, drop);
            removed.push(drop);
        }
        let collapse = |x: usize| {
            for &(keep, drop) in &pairs {
                if x == drop {
                    return keep;
                }
            }
            x
        };
        Ok(self.rebuild(edges, &removed, collapse))
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph {\n  rankdir=LR;\n");
        for v in 0..self.vertex_count {
            out.push_str(&format!("  v{v};\n"));
        }
        for &(s, d) in &self.edges {
            out.push_str(&format!("  v{s} -> v{d};\n"));
        }
        out.push_str("}\n");
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut value = json!({
            "vertices": self.vertex_count,
            "edges": self.edges.iter().map(|&(s, d)| json!({"src": s, "dst": d})).collect::<Vec<_>>(),
        });
        if let Some(inv) = &self.involution {
            value["involution"] = json!(inv);
        }
        value
    }
}

impl fmt::Display for UnlabeledGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} vertices, {} edges",
            self.vertex_count,
            self.edges.len()
        )
    }
}

/// Strongly connected components, in vertex order of their representatives.
pub fn strongly_connected_components(g: &UnlabeledGraph) -> Vec<Vec<usize>> {
    let n = g.vertex_count();
    let mut order = Vec::with_capacity(n);
    let mut visited = vec![false; n];
    for start in 0..n {
        if visited[start] {
            continue;
        }
        // iterative post-order
        let mut stack = vec![(start, 0usize)];
        visited[start] = true;
        while let Some(&mut (v, ref mut idx)) = stack.last_mut() {
            let outs: Vec<usize> = g
                .edges()
                .iter()
                .filter(|&&(s, _)| s == v)
                .map(|&(_, d)| d)
                .collect();
            if *idx < outs.len() {
                let next = outs[*idx];
                *idx += 1;
                if !visited[next] {
                    visited[next] = true;
                    stack.push((next, 0));
                }
            } else {
                order.push(v);
                stack.pop();
            }
        }
    }
    let mut component = vec![usize::MAX; n];
    let mut components = Vec::new();
    for &start in order.iter().rev() {
        if component[start] != usize::MAX {
            continue;
        }
        let id = components.len();
        let mut members = vec![start];
        component[start] = id;
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for &(s, d) in g.edges() {
                if d == v && component[s] == usize::MAX {
                    component[s] = id;
                    members.push(s);
                    stack.push(s);
                }
            }
        }
        members.sort_unstable();
        components.push(members);
    }
    components
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ReduceOp {
    Contract { vertex: usize, image: Option<usize> },
    Amalgamate { u: usize, w: usize },
}

#[derive(Clone, Debug)]
pub struct ReductionStep {
    pub op: ReduceOp,
    pub vertices_after: usize,
    pub edges_after: usize,
    pub bf_before: BowenFranks,
    pub bf_after: BowenFranks,
}

impl ReductionStep {
    pub fn to_json(&self) -> serde_json::Value {
        let (op, args) = match self.op {
            ReduceOp::Contract { vertex, image } => {
                let mut args = json!({ "vertex": vertex });
                if let Some(w) = image {
                    args["image"] = json!(w);
                }
                ("contract", args)
            }
            ReduceOp::Amalgamate { u, w } => ("amalgamate", json!({ "u": u, "w": w })),
        };
        json!({
            "op": op,
            "args": args,
            "vertices_after": self.vertices_after,
            "edges_after": self.edges_after,
            "bf_after": self.bf_after.to_json(),
        })
    }
}

/// Audit trail of a reduction; the Bowen-Franks data is unchanged at every
/// step.
#[derive(Clone, Debug, Default)]
pub struct ReductionLog {
    pub steps: Vec<ReductionStep>,
}

impl ReductionLog {
    pub fn to_json(&self) -> serde_json::Value {
        json!(self.steps.iter().map(ReductionStep::to_json).collect::<Vec<_>>())
    }
}

fn lowest_contractible(g: &UnlabeledGraph) -> Option<usize> {
    (0..g.vertex_count()).find(|&v| g.check_unit(g.edges(), v).is_ok())
}

/// Unordered eligible amalgamation pairs, grouped into involution orbits and
/// represented by their least pair.
fn eligible_pairs(g: &UnlabeledGraph) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    for u in 0..g.vertex_count() {
        for w in u + 1..g.vertex_count() {
            if g.amalgamation_ok(u, w) {
                pairs.push((u, w));
            }
        }
    }
    if let Some(inv) = g.involution() {
        pairs.retain(|&(u, w)| {
            let image = (inv[u].min(inv[w]), inv[u].max(inv[w]));
            image >= (u, w)
        });
    }
    pairs
}

/// Reduces the underlying graph of the fiber product cover to its normal
/// form: contract all unit vertices, then repeatedly merge the unique
/// eligible pair. The input is first replaced by its canonical form so the
/// preperiod sum does not exceed the period sum.
///
/// The terminal graph has `3S` vertices and `6S` edges: a bottom component
/// fixed by the involution and two swapped `S`-cycles, every vertex emitting
/// exactly two edges.
pub fn reduce_fiber_cover(
    g: &GeneratingSequence,
) -> Result<(UnlabeledGraph, ReductionLog), ReduceError> {
    if g.shift_class() != ShiftClass::StrictlySofic {
        return Err(ReduceError::SftInput);
    }
    if !g.is_binary() {
        return Err(ReduceError::NotBinary);
    }
    let (canonical, _) = canonical_form(g)?;
    let fiber = FiberProductCover::build(&canonical);
    let mut graph = UnlabeledGraph::from_fiber_cover(&fiber);
    let mut log = ReductionLog::default();
    let mut bf = bowen_franks(&graph.adjacency_matrix());

    while let Some(v) = lowest_contractible(&graph) {
        let image = graph
            .involution()
            .and_then(|inv| (inv[v] != v).then_some(inv[v]));
        let next = graph.contract_unit_vertex(v)?;
        let bf_after = bowen_franks(&next.adjacency_matrix());
        assert_eq!(bf, bf_after, "contraction changed the Bowen-Franks data");
        log.steps.push(ReductionStep {
            op: ReduceOp::Contract { vertex: v, image },
            vertices_after: next.vertex_count(),
            edges_after: next.edge_count(),
            bf_before: bf,
            bf_after: bf_after.clone(),
        });
        bf = bf_after;
        graph = next;
    }

    loop {
        let pairs = eligible_pairs(&graph);
        let (u, w) = match pairs.as_slice() {
            [] => break,
            [pair] => *pair,
            _ => return Err(ReduceError::AmbiguousAmalgamation(pairs)),
        };
        let next = graph.in_amalgamate(u, w)?;
        let bf_after = bowen_franks(&next.adjacency_matrix());
        assert_eq!(bf, bf_after, "amalgamation changed the Bowen-Franks data");
        log.steps.push(ReductionStep {
            op: ReduceOp::Amalgamate { u, w },
            vertices_after: next.vertex_count(),
            edges_after: next.edge_count(),
            bf_before: bf,
            bf_after: bf_after.clone(),
        });
        bf = bf_after;
        graph = next;
    }
    Ok((graph, log))
}

/// Isomorphism of graphs-with-involution, by color refinement plus
/// backtracking.
pub fn equivariant_isomorphic(a: &UnlabeledGraph, b: &UnlabeledGraph) -> bool {
    if a.vertex_count() != b.vertex_count() || a.edge_count() != b.edge_count() {
        return false;
    }
    let n = a.vertex_count();
    let identity: Vec<usize> = (0..n).collect();
    let inv_a = a.involution().map(<[usize]>::to_vec).unwrap_or_else(|| identity.clone());
    let inv_b = b.involution().map(<[usize]>::to_vec).unwrap_or_else(|| identity.clone());

    let adjacency = |g: &UnlabeledGraph| -> BTreeMap<(usize, usize), usize> {
        let mut m = BTreeMap::new();
        for &(s, d) in g.edges() {
            *m.entry((s, d)).or_default() += 1;
        }
        m
    };
    let adj_a = adjacency(a);
    let adj_b = adjacency(b);

    let refine = |g: &UnlabeledGraph, inv: &[usize]| -> Vec<u64> {
        let mut colors: Vec<u64> = (0..n)
            .map(|v| {
                let fixed = u64::from(inv[v] == v);
                (g.out_degree(v) as u64) << 32 | (g.in_degree(v) as u64) << 1 | fixed
            })
            .collect();
        for _ in 0..n {
            let mut keys: Vec<(u64, Vec<u64>, Vec<u64>, u64)> = (0..n)
                .map(|v| {
                    let mut outs: Vec<u64> =
                        g.edges().iter().filter(|&&(s, _)| s == v).map(|&(_, d)| colors[d]).collect();
                    let mut ins: Vec<u64> =
                        g.edges().iter().filter(|&&(_, d)| d == v).map(|&(s, _)| colors[s]).collect();
                    outs.sort_unstable();
                    ins.sort_unstable();
                    (colors[v], outs, ins, colors[inv[v]])
                })
                .collect();
            let mut sorted = keys.clone();
            sorted.sort();
            sorted.dedup();
            let lookup: BTreeMap<_, u64> = sorted
                .into_iter()
                .enumerate()
                .map(|(i, k)| (k, i as u64))
                .collect();
            let next: Vec<u64> = keys.drain(..).map(|k| lookup[&k]).collect();
            if next == colors {
                break;
            }
            colors = next;
        }
        colors
    };
    let colors_a = refine(a, &inv_a);
    let colors_b = refine(b, &inv_b);
    {
        let mut ca = colors_a.clone();
        let mut cb = colors_b.clone();
        ca.sort_unstable();
        cb.sort_unstable();
        if ca != cb {
            return false;
        }
    }

    // backtracking assignment in order of ascending color-class size
    let mut order: Vec<usize> = (0..n).collect();
    let class_size = |v: usize| colors_a.iter().filter(|&&c| c == colors_a[v]).count();
    order.sort_by_key(|&v| (class_size(v), v));

    fn assign(
        pos: usize,
        order: &[usize],
        map: &mut Vec<Option<usize>>,
        used: &mut Vec<bool>,
        colors_a: &[u64],
        colors_b: &[u64],
        adj_a: &BTreeMap<(usize, usize), usize>,
        adj_b: &BTreeMap<(usize, usize), usize>,
        inv_a: &[usize],
        inv_b: &[usize],
    ) -> bool {
        if pos == order.len() {
            return true;
        }
        let v = order[pos];
        for w in 0..colors_b.len() {
            if used[w] || colors_b[w] != colors_a[v] {
                continue;
            }
            // involution consistency
            if let Some(iv) = map[inv_a[v]] {
                if iv != inv_b[w] {
                    continue;
                }
            }
            // edge multiplicities against already-assigned vertices
            let consistent = (0..colors_a.len()).all(|x| match map[x] {
                Some(y) => {
                    adj_a.get(&(v, x)).copied().unwrap_or(0) == adj_b.get(&(w, y)).copied().unwrap_or(0)
                        && adj_a.get(&(x, v)).copied().unwrap_or(0)
                            == adj_b.get(&(y, w)).copied().unwrap_or(0)
                }
                None => true,
            }) && adj_a.get(&(v, v)).copied().unwrap_or(0)
                == adj_b.get(&(w, w)).copied().unwrap_or(0);
            if !consistent {
                continue;
            }
            map[v] = Some(w);
            used[w] = true;
            if assign(
                pos + 1,
                order,
                map,
                used,
                colors_a,
                colors_b,
                adj_a,
                adj_b,
                inv_a,
                inv_b,
            ) {
                return true;
            }
            map[v] = None;
            used[w] = false;
        }
        false
    }

    let mut map = vec![None; n];
    let mut used = vec![false; n];
    assign(
        0, &order, &mut map, &mut used, &colors_a, &colors_b, &adj_a, &adj_b, &inv_a, &inv_b,
    )
}

/// Whether the fiber product edge shifts admit a flow equivalence commuting
/// with the label-induced involutions: true exactly when the period sums
/// agree. For agreeing pairs the reduced graphs-with-involution are checked
/// to be isomorphic.
pub fn equivariant_fiber_compare(
    g1: &GeneratingSequence,
    g2: &GeneratingSequence,
) -> Result<bool, ReduceError> {
    if g1.shift_class() != ShiftClass::StrictlySofic || g2.shift_class() != ShiftClass::StrictlySofic
    {
        return Err(ReduceError::SftInput);
    }
    let result = g1.period_sum() == g2.period_sum();
    if result {
        let binary = |g: &GeneratingSequence| {
            if g.is_binary() {
                g.clone()
            } else {
                binarize(g).after
            }
        };
        let (r1, _) = reduce_fiber_cover(&binary(g1))?;
        let (r2, _) = reduce_fiber_cover(&binary(g2))?;
        assert!(
            equivariant_isomorphic(&r1, &r2),
            "equal period sums must give isomorphic reduced fiber graphs"
        );
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn gen(s: &str) -> GeneratingSequence {
        s.parse().unwrap()
    }

    #[test]
    fn contract_path_vertex() {
        // a -> v -> b plus return b -> a
        let g = UnlabeledGraph::new(3, vec![(0, 1), (1, 2), (2, 0), (0, 0)]);
        let contracted = g.contract_unit_vertex(1).unwrap();
        assert_eq!(contracted.vertex_count(), 2);
        let mut edges = contracted.edges().to_vec();
        edges.sort_unstable();
        assert_eq!(edges, vec![(0, 0), (0, 1), (1, 0)]);
    }

    #[test]
    fn contract_rejects_loops_and_branches() {
        let g = UnlabeledGraph::new(2, vec![(0, 0), (0, 1), (1, 0)]);
        assert_eq!(g.contract_unit_vertex(0), Err(ReduceError::NotUnitVertex(0)));
        let g = UnlabeledGraph::new(1, vec![(0, 0)]);
        assert_eq!(g.contract_unit_vertex(0), Err(ReduceError::LoopAtVertex(0)));
    }

    #[test]
    fn amalgamate_equal_rows() {
        // u and w both emit exactly {-> a, -> b}
        let g = UnlabeledGraph::new(
            4,
            vec![(0, 2), (0, 3), (1, 2), (1, 3), (2, 0), (3, 1), (2, 1)],
        );
        let merged = g.in_amalgamate(0, 1).unwrap();
        assert_eq!(merged.vertex_count(), 3);
        let mut edges = merged.edges().to_vec();
        edges.sort_unstable();
        // merged vertex 0, old 2 -> 1, old 3 -> 2
        assert_eq!(edges, vec![(0, 1), (0, 2), (1, 0), (1, 0), (2, 0)]);
    }

    #[test]
    fn amalgamate_rejects_mismatch() {
        let g = UnlabeledGraph::new(3, vec![(0, 1), (1, 2), (2, 0)]);
        assert_eq!(g.in_amalgamate(0, 1), Err(ReduceError::OutRowMismatch(0, 1)));
        // two disjoint loops have different rows ({->0} vs {->1}) and must
        // not merge; collapsing them would change the Bowen-Franks group
        let g = UnlabeledGraph::new(2, vec![(0, 0), (1, 1)]);
        assert!(!g.amalgamation_ok(0, 1));
    }

    #[test]
    fn moves_preserve_bowen_franks_on_random_graphs() {
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move |m: u64| {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state % m
        };
        let mut contract_hits = 0;
        let mut amalg_hits = 0;
        for _ in 0..200 {
            let n = 3 + next(6) as usize;
            let mut edges = Vec::new();
            // random essential-ish graph: one outgoing edge per vertex plus extras
            for v in 0..n {
                edges.push((v, next(n as u64) as usize));
            }
            for _ in 0..next(2 * n as u64) {
                edges.push((next(n as u64) as usize, next(n as u64) as usize));
            }
            let g = UnlabeledGraph::new(n, edges);
            if !g.is_essential() {
                continue;
            }
            let bf = bowen_franks(&g.adjacency_matrix());
            for v in 0..n {
                if let Ok(contracted) = g.contract_unit_vertex(v) {
                    contract_hits += 1;
                    assert_eq!(bf, bowen_franks(&contracted.adjacency_matrix()));
                }
            }
            for u in 0..n {
                for w in u + 1..n {
                    if g.amalgamation_ok(u, w) {
                        amalg_hits += 1;
                        let merged = g.in_amalgamate(u, w).unwrap();
                        assert_eq!(bf, bowen_franks(&merged.adjacency_matrix()));
                    }
                }
            }
        }
        assert!(contract_hits > 20, "contract sites exercised: {contract_hits}");
        assert!(amalg_hits > 5, "amalgamation sites exercised: {amalg_hits}");
    }

    #[test]
    fn reduce_smallest_strictly_sofic() {
        let (graph, log) = reduce_fiber_cover(&gen("1(10)")).unwrap();
        // S = 1: three vertices, six edges, bottom vertex with a double loop
        assert_eq!(graph.vertex_count(), 3);
        assert_eq!(graph.edge_count(), 6);
        let bf = bowen_franks(&graph.adjacency_matrix());
        assert!(bf.torsion.is_empty());
        assert_eq!(bf.free_rank, 2);
        assert!(log.steps.iter().all(|s| s.bf_before == s.bf_after));
        let a = graph.adjacency_matrix();
        let fixed: Vec<usize> = graph
            .involution()
            .unwrap()
            .iter()
            .enumerate()
            .filter(|&(v, &w)| v == w)
            .map(|(v, _)| v)
            .collect();
        assert_eq!(fixed.len(), 1);
        assert_eq!(a[(fixed[0], fixed[0])], BigInt::from(2));
    }

    #[test]
    fn reduce_reaches_normal_form_counts() {
        for (text, s) in [("11(10)", 1u64), ("1(110)", 2), ("11(110)", 2), ("11(101100)", 3)] {
            let g = gen(text);
            let (graph, log) = reduce_fiber_cover(&g).unwrap();
            assert_eq!(graph.vertex_count() as u64, 3 * s, "{text}");
            assert_eq!(graph.edge_count() as u64, 6 * s, "{text}");
            assert!((0..graph.vertex_count()).all(|v| graph.out_degree(v) == 2));
            let bf = bowen_franks(&graph.adjacency_matrix());
            let expected = BowenFranks::cyclic(s, 2, bf.det_sign);
            assert!(bf.group_eq(&expected), "{text}: {bf}");
            assert!(log.steps.iter().all(|st| st.bf_before == st.bf_after));
            // three strongly connected components; the involution fixes the
            // bottom one and swaps the other two
            let comps = strongly_connected_components(&graph);
            assert_eq!(comps.len(), 3, "{text}");
            let inv = graph.involution().unwrap();
            let map_comp = |members: &Vec<usize>| -> Vec<usize> {
                let mut image: Vec<usize> = members.iter().map(|&v| inv[v]).collect();
                image.sort_unstable();
                image
            };
            let fixed: Vec<&Vec<usize>> =
                comps.iter().filter(|c| map_comp(c) == **c).collect();
            assert_eq!(fixed.len(), 1, "{text}");
            assert_eq!(fixed[0].len() as u64, s, "{text}");
        }
    }

    #[test]
    fn reduce_rejects_wrong_inputs() {
        assert!(matches!(
            reduce_fiber_cover(&gen("(110)")),
            Err(ReduceError::SftInput)
        ));
        assert!(matches!(reduce_fiber_cover(&gen("2(21)")), Err(ReduceError::NotBinary)));
    }

    #[test]
    fn equivariant_compare_examples() {
        assert!(equivariant_fiber_compare(&gen("1(10)"), &gen("11(10)")).unwrap());
        assert!(equivariant_fiber_compare(&gen("1(110)"), &gen("11(110)")).unwrap());
        assert!(!equivariant_fiber_compare(&gen("11(10)"), &gen("11(110)")).unwrap());
        assert!(matches!(
            equivariant_fiber_compare(&gen("(10)"), &gen("1(10)")),
            Err(ReduceError::SftInput)
        ));
    }

    #[test]
    fn isomorphism_distinguishes_involutions() {
        // two 2-cycles; one involution swaps them, the other fixes each
        let edges = vec![(0, 1), (1, 0), (2, 3), (3, 2)];
        let swap = UnlabeledGraph::with_involution(4, edges.clone(), vec![2, 3, 0, 1]);
        let fix = UnlabeledGraph::with_involution(4, edges.clone(), vec![1, 0, 3, 2]);
        assert!(equivariant_isomorphic(&swap, &swap.clone()));
        assert!(!equivariant_isomorphic(&swap, &fix));
        // ignoring involutions the graphs agree
        let plain1 = UnlabeledGraph::new(4, edges.clone());
        let plain2 = UnlabeledGraph::new(4, vec![(1, 0), (0, 1), (3, 2), (2, 3)]);
        assert!(equivariant_isomorphic(&plain1, &plain2));
    }
}
