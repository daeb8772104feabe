//! Labeled graph presentations of sofic beta-shifts: the truncated standard
//! loop graph, the right Fischer cover, and the fiber product cover with its
//! label-induced involution.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde_json::json;
use thiserror::Error;

use crate::invariants::IntMatrix;
use crate::seq::{Digit, GeneratingSequence, ShiftClass, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoverError {
    #[error("depth {given} is below the preperiod+period length {required}")]
    DepthTooSmall { required: usize, given: usize },
    #[error("max_period {given} is below the period length {required}")]
    MaxPeriodTooSmall { required: usize, given: usize },
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct LabeledEdge {
    pub src: usize,
    pub dst: usize,
    pub label: Digit,
}

/// A finite directed multigraph with digit-labeled edges.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LabeledGraph {
    vertex_names: Vec<String>,
    edges: Vec<LabeledEdge>,
}

impl LabeledGraph {
    pub fn new(vertex_count: usize) -> Self {
        LabeledGraph {
            vertex_names: (1..=vertex_count).map(|i| format!("v{i}")).collect(),
            edges: Vec::new(),
        }
    }

    pub fn with_names(vertex_names: Vec<String>) -> Self {
        LabeledGraph {
            vertex_names,
            edges: Vec::new(),
        }
    }

    pub fn add_edge(&mut self, src: usize, dst: usize, label: Digit) {
        assert!(src < self.vertex_count() && dst < self.vertex_count());
        self.edges.push(LabeledEdge { src, dst, label });
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[LabeledEdge] {
        &self.edges
    }

    pub fn vertex_name(&self, v: usize) -> &str {
        &self.vertex_names[v]
    }

    pub fn out_edges(&self, v: usize) -> impl Iterator<Item = &LabeledEdge> {
        self.edges.iter().filter(move |e| e.src == v)
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.out_edges(v).count()
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.dst == v).count()
    }

    /// Every vertex emits and receives at least one edge.
    pub fn is_essential(&self) -> bool {
        (0..self.vertex_count()).all(|v| self.out_degree(v) >= 1 && self.in_degree(v) >= 1)
    }

    /// Counts of parallel edges, ignoring labels.
    pub fn adjacency_matrix(&self) -> IntMatrix {
        let n = self.vertex_count();
        let mut m = IntMatrix::zero(n, n);
        for e in &self.edges {
            m[(e.src, e.dst)] += num_bigint::BigInt::from(1);
        }
        m
    }

    /// Entry `(i, j)` lists the labels of edges from `i` to `j`, sorted.
    pub fn symbolic_adjacency(&self) -> Vec<Vec<Vec<Digit>>> {
        let n = self.vertex_count();
        let mut m = vec![vec![Vec::new(); n]; n];
        for e in &self.edges {
            m[e.src][e.dst].push(e.label);
        }
        for row in &mut m {
            for entry in row {
                entry.sort();
            }
        }
        m
    }

    /// No vertex emits two edges with the same label.
    pub fn is_right_resolving(&self) -> bool {
        (0..self.vertex_count()).all(|v| {
            let mut seen = BTreeSet::new();
            self.out_edges(v).all(|e| seen.insert(e.label))
        })
    }

    /// Partition refinement on `(label, target class)` signatures reaches
    /// singleton classes.
    pub fn is_follower_separated(&self) -> bool {
        let n = self.vertex_count();
        let mut class = vec![0usize; n];
        let mut count = 1;
        loop {
            let mut keys: BTreeMap<(usize, BTreeSet<(u32, usize)>), usize> = BTreeMap::new();
            let mut next = vec![0usize; n];
            for v in 0..n {
                let sig: BTreeSet<(u32, usize)> = self
                    .out_edges(v)
                    .map(|e| (e.label.value(), class[e.dst]))
                    .collect();
                let id = keys.len();
                next[v] = *keys.entry((class[v], sig)).or_insert(id);
            }
            let new_count = keys.len();
            class = next;
            if new_count == count {
                return count == n;
            }
            count = new_count;
        }
    }

    /// All label words of paths of length `len`.
    pub fn path_language(&self, len: usize) -> BTreeSet<Word> {
        let mut out = BTreeSet::new();
        let mut stack: Vec<(usize, Vec<Digit>)> =
            (0..self.vertex_count()).map(|v| (v, Vec::new())).collect();
        while let Some((v, word)) = stack.pop() {
            if word.len() == len {
                out.insert(Word::new(word));
                continue;
            }
            for e in self.out_edges(v) {
                let mut next = word.clone();
                next.push(e.label);
                stack.push((e.dst, next));
            }
        }
        out
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph {\n  rankdir=LR;\n");
        for name in &self.vertex_names {
            out.push_str(&format!("  \"{name}\";\n"));
        }
        for e in &self.edges {
            out.push_str(&format!(
                "  \"{}\" -> \"{}\" [label=\"{}\"];\n",
                self.vertex_names[e.src], self.vertex_names[e.dst], e.label
            ));
        }
        out.push_str("}\n");
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "vertices": self.vertex_names,
            "edges": self.edges.iter().map(|e| json!({
                "src": e.src,
                "dst": e.dst,
                "label": e.label.value(),
            })).collect::<Vec<_>>(),
        })
    }
}

impl fmt::Display for LabeledGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{} vertices, {} edges",
            self.vertex_count(),
            self.edge_count()
        )?;
        for v in 0..self.vertex_count() {
            let outs: Vec<String> = self
                .out_edges(v)
                .map(|e| format!("{}-> {}", e.label, self.vertex_names[e.dst]))
                .collect();
            writeln!(f, "  {}: {}", self.vertex_names[v], outs.join(", "))?;
        }
        Ok(())
    }
}

/// The first `depth` vertices of the standard loop graph, as the induced
/// subgraph. The forward edge of the last vertex leaves the truncation and is
/// dropped, so the result need not be essential.
pub fn standard_loop_graph(
    g: &GeneratingSequence,
    depth: usize,
) -> Result<LabeledGraph, CoverError> {
    let required = g.preperiod_len() + g.period_len();
    if depth < required {
        return Err(CoverError::DepthTooSmall {
            required,
            given: depth,
        });
    }
    let mut graph = LabeledGraph::new(depth);
    for i in 0..depth {
        let gi = g.digit(i).value();
        for k in 0..gi {
            graph.add_edge(i, 0, Digit::new(k));
        }
        if i + 1 < depth {
            graph.add_edge(i, i + 1, Digit::new(gi));
        }
    }
    Ok(graph)
}

/// The right Fischer cover of a sofic beta-shift.
///
/// Vertex `v_i` carries edges labeled `0..g_i-1` back to `v_1` and one edge
/// labeled `g_i` forward, with the last forward edge wrapping to `v_{n+1}`.
/// For periodic sequences (`n = 0`) the wrap edge therefore returns to `v_1`,
/// matching the adjacency matrix entry `g_p + 1` in the first column.
#[derive(Clone, Debug)]
pub struct FischerCover {
    graph: LabeledGraph,
    n: usize,
    p: usize,
}

impl FischerCover {
    pub fn build(g: &GeneratingSequence) -> Self {
        let n = g.preperiod_len();
        let p = g.period_len();
        let total = n + p;
        let mut graph = LabeledGraph::new(total);
        for i in 0..total {
            let gi = g.digit(i).value();
            for k in 0..gi {
                graph.add_edge(i, 0, Digit::new(k));
            }
            let target = if i + 1 < total { i + 1 } else { n };
            graph.add_edge(i, target, Digit::new(gi));
        }
        assert!(graph.is_essential());
        assert!(graph.is_right_resolving());
        assert!(graph.is_follower_separated());
        FischerCover { graph, n, p }
    }

    pub fn graph(&self) -> &LabeledGraph {
        &self.graph
    }

    pub fn preperiod_len(&self) -> usize {
        self.n
    }

    pub fn period_len(&self) -> usize {
        self.p
    }
}

/// The right Krieger cover of a sofic beta-shift coincides with the right
/// Fischer cover, so this is an alias of [`FischerCover::build`].
pub fn krieger_cover(g: &GeneratingSequence) -> FischerCover {
    FischerCover::build(g)
}

/// The maximal essential subgraph of the self fiber product of the Fischer
/// cover, together with the transposition involution.
#[derive(Clone, Debug)]
pub struct FiberProductCover {
    graph: LabeledGraph,
    involution: Vec<usize>,
    diagonal: Vec<usize>,
    pairs: Vec<(usize, usize)>,
}

impl FiberProductCover {
    /// Builds the full fiber product of the Fischer cover with itself and
    /// repeatedly deletes vertices that emit or receive no edge.
    ///
    /// For SFT input the essential part is exactly the diagonal, returned
    /// with the identity involution. For strictly sofic input the result has
    /// `n+p` diagonal vertices plus two disjoint period cycles swapped by the
    /// involution.
    pub fn build(g: &GeneratingSequence) -> Self {
        let fischer = FischerCover::build(g);
        let fg = fischer.graph();
        let v = fg.vertex_count();
        let product_edges: Vec<(usize, usize, Digit)> = {
            let mut edges = Vec::new();
            for pu in 0..v {
                for pw in 0..v {
                    for e in fg.out_edges(pu) {
                        for f in fg.out_edges(pw) {
                            if e.label == f.label {
                                edges.push((pu * v + pw, e.dst * v + f.dst, e.label));
                            }
                        }
                    }
                }
            }
            edges
        };
        let mut present = vec![true; v * v];
        loop {
            let mut out_deg = vec![0usize; v * v];
            let mut in_deg = vec![0usize; v * v];
            for &(src, dst, _) in &product_edges {
                if present[src] && present[dst] {
                    out_deg[src] += 1;
                    in_deg[dst] += 1;
                }
            }
            let mut removed = false;
            for q in 0..v * v {
                if present[q] && (out_deg[q] == 0 || in_deg[q] == 0) {
                    present[q] = false;
                    removed = true;
                }
            }
            if !removed {
                break;
            }
        }

        let pairs: Vec<(usize, usize)> = (0..v * v)
            .filter(|&q| present[q])
            .map(|q| (q / v, q % v))
            .collect();
        let index_of: BTreeMap<(usize, usize), usize> = pairs
            .iter()
            .enumerate()
            .map(|(i, &pair)| (pair, i))
            .collect();

        let names = Self::vertex_names(fg, &pairs, &product_edges, v);
        let mut graph = LabeledGraph::with_names(names);
        for &(src, dst, label) in &product_edges {
            if present[src] && present[dst] {
                let s = index_of[&(src / v, src % v)];
                let d = index_of[&(dst / v, dst % v)];
                graph.add_edge(s, d, label);
            }
        }

        let involution: Vec<usize> = pairs.iter().map(|&(u, w)| index_of[&(w, u)]).collect();
        let diagonal: Vec<usize> = pairs
            .iter()
            .enumerate()
            .filter(|(_, &(u, w))| u == w)
            .map(|(i, _)| i)
            .collect();

        let cover = FiberProductCover {
            graph,
            involution,
            diagonal,
            pairs,
        };
        cover.check_structure(g);
        cover
    }

    /// Diagonal vertices keep the Fischer names; the cycle whose first
    /// coordinate passes through `v_1` gets single primes, the mirrored cycle
    /// double primes, both indexed by the coordinate that runs along the
    /// period cycle of the Fischer cover.
    fn vertex_names(
        fg: &LabeledGraph,
        pairs: &[(usize, usize)],
        product_edges: &[(usize, usize, Digit)],
        v: usize,
    ) -> Vec<String> {
        let present: BTreeSet<(usize, usize)> = pairs.iter().copied().collect();
        let mut names = Vec::new();
        for &(u, w) in pairs {
            if u == w {
                names.push(fg.vertex_name(u).to_string());
                continue;
            }
            // Walk the off-diagonal cycle through (u, w) and record whether
            // the first coordinates visit v_1.
            let mut first_coords = BTreeSet::new();
            let mut current = (u, w);
            loop {
                first_coords.insert(current.0);
                let next = product_edges
                    .iter()
                    .find_map(|&(src, dst, _)| {
                        let (su, sw) = (src / v, src % v);
                        let (du, dw) = (dst / v, dst % v);
                        (su == current.0 && sw == current.1 && du != dw && present.contains(&(du, dw)))
                            .then_some((du, dw))
                    })
                    .expect("off-diagonal vertex has a cycle successor");
                if next == (u, w) {
                    break;
                }
                current = next;
            }
            if first_coords.contains(&0) {
                names.push(format!("{}'", fg.vertex_name(w)));
            } else {
                names.push(format!("{}''", fg.vertex_name(u)));
            }
        }
        names
    }

    fn check_structure(&self, g: &GeneratingSequence) {
        assert!(self.graph.is_essential());
        let n = self.graph.vertex_count();
        for q in 0..n {
            assert_eq!(self.involution[self.involution[q]], q);
            assert_eq!(
                self.involution[q] == q,
                self.diagonal.contains(&q),
                "fixed points of the involution are the diagonal"
            );
        }
        // label-preserving automorphism
        let mut edges: BTreeSet<(usize, usize, u32)> = BTreeSet::new();
        for e in self.graph.edges() {
            edges.insert((e.src, e.dst, e.label.value()));
        }
        for e in self.graph.edges() {
            assert!(edges.contains(&(
                self.involution[e.src],
                self.involution[e.dst],
                e.label.value()
            )));
        }
        match g.shift_class() {
            ShiftClass::Sft => assert!(self.off_diagonal_count() == 0),
            ShiftClass::StrictlySofic => {
                assert_eq!(self.off_diagonal_count(), 2 * g.period_len())
            }
        }
    }

    pub fn graph(&self) -> &LabeledGraph {
        &self.graph
    }

    /// Vertex permutation `(u, v) -> (v, u)`.
    pub fn involution(&self) -> &[usize] {
        &self.involution
    }

    pub fn diagonal(&self) -> &[usize] {
        &self.diagonal
    }

    /// Fischer cover vertex pairs, indexed like the graph vertices.
    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn off_diagonal_count(&self) -> usize {
        self.graph.vertex_count() - self.diagonal.len()
    }

    pub fn is_diagonal_only(&self) -> bool {
        self.off_diagonal_count() == 0
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut value = self.graph.to_json();
        value["involution"] = json!(self.involution);
        value["diagonal"] = json!(self.diagonal);
        value
    }
}

/// Maximal number of presentations of periodic points, with witnesses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiplicityReport {
    pub max_preimages: usize,
    /// Periodic label words attaining the maximum, as the lexicographically
    /// largest rotation, with their presentation counts.
    pub witnesses: Vec<(Word, usize)>,
}

fn is_primitive(labels: &[Digit]) -> bool {
    let p = labels.len();
    (1..p).all(|d| p % d != 0 || (d..p).any(|i| labels[i] != labels[i - d]))
}

fn max_rotation(labels: &[Digit]) -> Word {
    let mut best: Vec<Digit> = labels.to_vec();
    let mut rotated = labels.to_vec();
    for _ in 1..labels.len() {
        rotated.rotate_left(1);
        if rotated > best {
            best = rotated.clone();
        }
    }
    Word::new(best)
}

fn min_rotation_indices(cycle: &[usize]) -> Vec<usize> {
    let mut best = cycle.to_vec();
    let mut rotated = cycle.to_vec();
    for _ in 1..cycle.len() {
        rotated.rotate_left(1);
        if rotated < best {
            best = rotated.clone();
        }
    }
    best
}

/// Counts, for every primitive cyclic label word of length at most
/// `max_period` presented in the Fischer cover, the closed-path presentations
/// of its bi-infinite periodic orbit. Presentations are cyclic edge sequences
/// counted up to their base point.
pub fn covering_multiplicity(
    g: &GeneratingSequence,
    max_period: usize,
) -> Result<MultiplicityReport, CoverError> {
    if max_period < g.period_len() {
        return Err(CoverError::MaxPeriodTooSmall {
            required: g.period_len(),
            given: max_period,
        });
    }
    let fischer = FischerCover::build(g);
    let graph = fischer.graph();
    let mut cycles: BTreeMap<Word, BTreeSet<Vec<usize>>> = BTreeMap::new();
    let edge_list = graph.edges();
    for len in 1..=max_period {
        for start in 0..graph.vertex_count() {
            let mut stack: Vec<(usize, Vec<usize>)> = vec![(start, Vec::new())];
            while let Some((v, path)) = stack.pop() {
                if path.len() == len {
                    if v == start {
                        let labels: Vec<Digit> =
                            path.iter().map(|&ei| edge_list[ei].label).collect();
                        if is_primitive(&labels) {
                            cycles
                                .entry(max_rotation(&labels))
                                .or_default()
                                .insert(min_rotation_indices(&path));
                        }
                    }
                    continue;
                }
                for (ei, e) in edge_list.iter().enumerate() {
                    if e.src == v {
                        let mut next = path.clone();
                        next.push(ei);
                        stack.push((e.dst, next));
                    }
                }
            }
        }
    }
    let max_preimages = cycles.values().map(BTreeSet::len).max().unwrap_or(0);
    let witnesses = cycles
        .into_iter()
        .filter(|(_, c)| c.len() == max_preimages)
        .map(|(w, c)| (w, c.len()))
        .collect();
    Ok(MultiplicityReport {
        max_preimages,
        witnesses,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gen(s: &str) -> GeneratingSequence {
        s.parse().unwrap()
    }

    fn edge_set(g: &LabeledGraph) -> BTreeSet<(usize, usize, u32)> {
        g.edges()
            .iter()
            .map(|e| (e.src, e.dst, e.label.value()))
            .collect()
    }

    #[test]
    fn loop_graph_truncations() {
        // Induced subgraph: the forward edge of the last vertex is dropped.
        let g = standard_loop_graph(&gen("(10)"), 2).unwrap();
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(edge_set(&g), BTreeSet::from([(0, 0, 0), (0, 1, 1)]));

        let g = standard_loop_graph(&gen("11(10)"), 4).unwrap();
        assert_eq!(g.vertex_count(), 4);
        assert_eq!(g.edge_count(), 6);

        let g = standard_loop_graph(&gen("(1)"), 1).unwrap();
        assert_eq!(edge_set(&g), BTreeSet::from([(0, 0, 0)]));

        assert_eq!(
            standard_loop_graph(&gen("11(10)"), 3),
            Err(CoverError::DepthTooSmall {
                required: 4,
                given: 3
            })
        );
    }

    #[test]
    fn fischer_cover_of_example_shift() {
        // 4 vertices, 7 edges: v1(0-loop, 1->v2), v2(0->v1, 1->v3),
        // v3(0->v1, 1->v4), v4(0->v3)
        let f = FischerCover::build(&gen("11(10)"));
        assert_eq!(f.graph().vertex_count(), 4);
        assert_eq!(f.graph().edge_count(), 7);
        assert_eq!(
            edge_set(f.graph()),
            BTreeSet::from([
                (0, 0, 0),
                (0, 1, 1),
                (1, 0, 0),
                (1, 2, 1),
                (2, 0, 0),
                (2, 3, 1),
                (3, 2, 0),
            ])
        );
        assert!(f.graph().is_right_resolving());
        assert!(f.graph().is_follower_separated());
    }

    #[test]
    fn fischer_cover_symbolic_adjacency_three_vertices() {
        let f = FischerCover::build(&gen("1(10)"));
        let sym = f.graph().symbolic_adjacency();
        let row = |cells: [&[u32]; 3]| -> Vec<Vec<Digit>> {
            cells
                .iter()
                .map(|c| c.iter().map(|&v| Digit::new(v)).collect())
                .collect()
        };
        assert_eq!(sym[0], row([&[0], &[1], &[]]));
        assert_eq!(sym[1], row([&[0], &[], &[1]]));
        assert_eq!(sym[2], row([&[], &[0], &[]]));
    }

    #[test]
    fn fischer_cover_periodic_wraps_to_v1() {
        // n = 0: the wrap edge labeled g_p ends at v_1, so v_2 emits exactly
        // one edge and the adjacency matrix has g_p + 1 = 1 in the corner.
        let f = FischerCover::build(&gen("(10)"));
        assert_eq!(
            edge_set(f.graph()),
            BTreeSet::from([(0, 0, 0), (0, 1, 1), (1, 0, 0)])
        );
        let a = f.graph().adjacency_matrix();
        assert_eq!(a[(1, 0)], num_bigint::BigInt::from(1));
    }

    #[test]
    fn krieger_cover_is_fischer_cover() {
        for text in ["11(10)", "(10)", "1(10)"] {
            let g = gen(text);
            assert_eq!(
                edge_set(krieger_cover(&g).graph()),
                edge_set(FischerCover::build(&g).graph())
            );
        }
    }

    #[test]
    fn fiber_product_of_example_shift_matches_figure() {
        let fiber = FiberProductCover::build(&gen("1(10)"));
        assert_eq!(fiber.graph().vertex_count(), 7);
        assert_eq!(fiber.graph().edge_count(), 11);
        assert_eq!(fiber.diagonal().len(), 3);
        assert_eq!(fiber.off_diagonal_count(), 4);

        // pairs sorted lexicographically: (0,0),(0,1),(1,0),(1,1),(1,2),(2,1),(2,2)
        assert_eq!(
            fiber.pairs(),
            &[(0, 0), (0, 1), (1, 0), (1, 1), (1, 2), (2, 1), (2, 2)]
        );
        let idx = |pair: (usize, usize)| fiber.pairs().iter().position(|&p| p == pair).unwrap();
        // involution swaps the two off-diagonal 2-cycles and fixes the diagonal
        assert_eq!(fiber.involution()[idx((0, 1))], idx((1, 0)));
        assert_eq!(fiber.involution()[idx((1, 2))], idx((2, 1)));
        for &d in fiber.diagonal() {
            assert_eq!(fiber.involution()[d], d);
        }
        // edges of the figure
        let expected = BTreeSet::from([
            ((0, 0), (0, 0), 0),
            ((0, 0), (1, 1), 1),
            ((1, 1), (0, 0), 0),
            ((1, 1), (2, 2), 1),
            ((2, 2), (1, 1), 0),
            ((0, 1), (1, 2), 1),
            ((1, 2), (0, 1), 0),
            ((0, 1), (0, 0), 0),
            ((1, 0), (2, 1), 1),
            ((2, 1), (1, 0), 0),
            ((1, 0), (0, 0), 0),
        ]);
        let actual: BTreeSet<((usize, usize), (usize, usize), u32)> = fiber
            .graph()
            .edges()
            .iter()
            .map(|e| (fiber.pairs()[e.src], fiber.pairs()[e.dst], e.label.value()))
            .collect();
        assert_eq!(actual, expected);
    }

    #[test]
    fn fiber_product_vertex_names_use_primes() {
        let fiber = FiberProductCover::build(&gen("1(10)"));
        let names: BTreeSet<&str> = (0..7).map(|q| fiber.graph().vertex_name(q)).collect();
        assert_eq!(
            names,
            BTreeSet::from(["v1", "v2", "v3", "v2'", "v3'", "v2''", "v3''"])
        );
    }

    #[test]
    fn fiber_product_counts() {
        let fiber = FiberProductCover::build(&gen("11(10)"));
        assert_eq!(fiber.graph().vertex_count(), 8);
        assert_eq!(fiber.off_diagonal_count(), 4);

        let fiber = FiberProductCover::build(&gen("(10)"));
        assert!(fiber.is_diagonal_only());
        assert_eq!(fiber.graph().vertex_count(), 2);
        assert!((0..2).all(|q| fiber.involution()[q] == q));
    }

    #[test]
    fn fiber_label_language_equals_fischer_language() {
        for text in ["1(10)", "11(10)", "1(110)"] {
            let g = gen(text);
            let fischer = FischerCover::build(&g);
            let fiber = FiberProductCover::build(&g);
            for len in 1..=6 {
                assert_eq!(
                    fischer.graph().path_language(len),
                    fiber.graph().path_language(len),
                    "{text} at length {len}"
                );
            }
        }
    }

    #[test]
    fn multiplicity_of_strictly_sofic_shift_is_two() {
        let report = covering_multiplicity(&gen("11(10)"), 4).unwrap();
        assert_eq!(report.max_preimages, 2);
        assert_eq!(report.witnesses, vec![(Word::from_values(&[1, 0]), 2)]);
    }

    #[test]
    fn multiplicity_of_sft_is_one() {
        let report = covering_multiplicity(&gen("(10)"), 4).unwrap();
        assert_eq!(report.max_preimages, 1);
    }

    #[test]
    fn multiplicity_witnesses_are_period_rotations() {
        let report = covering_multiplicity(&gen("1(110)"), 6).unwrap();
        assert_eq!(report.max_preimages, 2);
        assert_eq!(report.witnesses, vec![(Word::from_values(&[1, 1, 0]), 2)]);

        assert_eq!(
            covering_multiplicity(&gen("1(110)"), 2),
            Err(CoverError::MaxPeriodTooSmall {
                required: 3,
                given: 2
            })
        );
    }

    #[test]
    fn resolving_and_separation_counterexamples() {
        let mut g = LabeledGraph::new(1);
        g.add_edge(0, 0, Digit::ZERO);
        g.add_edge(0, 0, Digit::ZERO);
        assert!(!g.is_right_resolving());

        // two vertices with identical out-structure cannot be separated
        let mut g = LabeledGraph::new(3);
        g.add_edge(0, 2, Digit::ZERO);
        g.add_edge(1, 2, Digit::ZERO);
        g.add_edge(2, 0, Digit::ONE);
        g.add_edge(2, 1, Digit::ZERO);
        assert!(g.is_right_resolving());
        assert!(!g.is_follower_separated());
    }

    #[test]
    fn path_language_examples() {
        let f = FischerCover::build(&gen("(1)"));
        assert_eq!(f.graph().path_language(3).len(), 8);

        let f = FischerCover::build(&gen("(10)"));
        let words: Vec<String> = f
            .graph()
            .path_language(2)
            .iter()
            .map(|w| w.to_string())
            .collect();
        assert_eq!(words, vec!["00", "01", "10"]);
    }

    #[test]
    fn path_language_matches_factor_criterion() {
        for text in ["11(10)", "(10)", "1(110)", "(21)"] {
            let g = gen(text);
            let f = FischerCover::build(&g);
            let alphabet = g.max_digit().value();
            for len in 1..=6usize {
                let from_graph = f.graph().path_language(len);
                let mut from_criterion = BTreeSet::new();
                let base = u64::from(alphabet) + 1;
                for mut code in 0..base.pow(len as u32) {
                    let mut values = Vec::new();
                    for _ in 0..len {
                        values.push((code % base) as u32);
                        code /= base;
                    }
                    let w = Word::from_values(&values);
                    if g.is_factor(&w) {
                        from_criterion.insert(w);
                    }
                }
                assert_eq!(from_graph, from_criterion, "{text} at length {len}");
            }
        }
    }

    #[test]
    fn dot_and_json_exports() {
        let f = FischerCover::build(&gen("(10)"));
        let dot = f.graph().to_dot();
        assert!(dot.contains("\"v1\" -> \"v2\" [label=\"1\"]"));
        let fiber = FiberProductCover::build(&gen("1(10)"));
        let value = fiber.to_json();
        assert_eq!(value["vertices"].as_array().unwrap().len(), 7);
        assert!(value["involution"].is_array());
        assert!(value["diagonal"].is_array());
    }
}
