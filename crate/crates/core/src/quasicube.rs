//! Spaces with partitions and their quasi-cubulations.
//!
//! Points are indexed `0..n`; when the space comes from a ball, `points`
//! remembers the ball vertex of each point.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;

use petgraph::unionfind::UnionFind;
use serde::Serialize;

use crate::cayley::CayleyBall;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::hyperplanes::{Hyperplanes, Relation};
use crate::verify::{check_quasi_median_with, AxiomReport};

pub const DEFAULT_ORIENTATION_CAP: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Self {
        Self(vec![0; n.div_ceil(64)])
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn subset_of(&self, other: &Bits) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & !b == 0)
    }

    fn intersects(&self, other: &Bits) -> bool {
        self.0.iter().zip(&other.0).any(|(a, b)| a & b != 0)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Partition {
    /// Blocks of point indices, each sorted, ordered by least element.
    pub blocks: Vec<Vec<usize>>,
    /// Hyperplane of the ball it was read from.
    pub source: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct SpaceWithPartitions {
    /// Ball vertex of each point.
    pub points: Vec<usize>,
    pub partitions: Vec<Partition>,
    /// `block_of[p][x]`: block of partition `p` containing point `x`.
    block_of: Vec<Vec<u16>>,
    /// Bitsets of every block, indexed by `offset[p] + block`.
    bits: Vec<Bits>,
    offset: Vec<usize>,
}

impl SpaceWithPartitions {
    /// Validates the axioms: at least two blocks, none empty, blocks cover
    /// the points disjointly, and distinguishable partitions with comparable
    /// sectors are nested.
    pub fn new(points: Vec<usize>, partitions: Vec<Partition>) -> Result<Self> {
        let n = points.len();
        let mut block_of = Vec::with_capacity(partitions.len());
        let mut bits = Vec::new();
        let mut offset = Vec::with_capacity(partitions.len());
        for (pi, p) in partitions.iter().enumerate() {
            if p.blocks.len() < 2 {
                return Err(Error::Inconsistent(format!("partition {pi} has fewer than two sectors")));
            }
            let mut of = vec![u16::MAX; n];
            offset.push(bits.len());
            for (bi, block) in p.blocks.iter().enumerate() {
                if block.is_empty() {
                    return Err(Error::Inconsistent(format!("partition {pi} has an empty sector")));
                }
                let mut b = Bits::new(n);
                for &x in block {
                    if x >= n || of[x] != u16::MAX {
                        return Err(Error::Inconsistent(format!("partition {pi} is not a partition")));
                    }
                    of[x] = bi as u16;
                    b.set(x);
                }
                bits.push(b);
            }
            if of.contains(&u16::MAX) {
                return Err(Error::Inconsistent(format!("partition {pi} does not cover the points")));
            }
            block_of.push(of);
        }
        let space = Self {
            points,
            partitions,
            block_of,
            bits,
            offset,
        };
        for p in 0..space.len() {
            for q in p + 1..space.len() {
                if space.indistinguishable(p, q) {
                    continue;
                }
                if space.has_comparable_sectors(p, q) && !space.nested(p, q) {
                    return Err(Error::Inconsistent(format!(
                        "partitions {p} and {q} have comparable sectors but are not nested"
                    )));
                }
            }
        }
        Ok(space)
    }

    /// One partition per certified hyperplane: the sectors (read off from
    /// gates) restricted to the trusted vertices, or every vertex of a
    /// complete ball.
    pub fn from_hyperplanes(ball: &CayleyBall, hyps: &Hyperplanes) -> Result<Self> {
        let points: Vec<usize> = ball.trusted_vertices();
        let mut partitions = Vec::new();
        for plane in hyps.planes.iter().filter(|p| p.certified) {
            let mut blocks: std::collections::BTreeMap<u32, Vec<usize>> = Default::default();
            for (i, &x) in points.iter().enumerate() {
                blocks.entry(plane.sector_of[x]).or_default().push(i);
            }
            let mut blocks: Vec<Vec<usize>> = blocks.into_values().collect();
            blocks.sort();
            partitions.push(Partition {
                blocks,
                source: Some(plane.id),
            });
        }
        Self::new(points, partitions)
    }

    pub fn len(&self) -> usize {
        self.partitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.partitions.is_empty()
    }

    pub fn point_count(&self) -> usize {
        self.points.len()
    }

    pub fn block_of(&self, p: usize, x: usize) -> usize {
        self.block_of[p][x] as usize
    }

    fn block_bits(&self, p: usize, b: usize) -> &Bits {
        &self.bits[self.offset[p] + b]
    }

    pub fn indistinguishable(&self, p: usize, q: usize) -> bool {
        let (a, b) = (&self.partitions[p].blocks, &self.partitions[q].blocks);
        a == b
    }

    fn subset(&self, p: usize, a: usize, q: usize, b: usize) -> bool {
        self.block_bits(p, a).subset_of(self.block_bits(q, b))
    }

    fn has_comparable_sectors(&self, p: usize, q: usize) -> bool {
        let (np, nq) = (self.partitions[p].blocks.len(), self.partitions[q].blocks.len());
        (0..np).any(|a| (0..nq).any(|b| self.subset(p, a, q, b) || self.subset(q, b, p, a)))
    }

    pub fn nested(&self, p: usize, q: usize) -> bool {
        let (np, nq) = (self.partitions[p].blocks.len(), self.partitions[q].blocks.len());
        (0..np).any(|a| {
            (0..nq).any(|b| {
                (0..nq).filter(|&d| d != b).all(|d| self.subset(q, d, p, a))
                    && (0..np).filter(|&d| d != a).all(|d| self.subset(p, d, q, b))
            })
        })
    }

    pub fn transverse(&self, p: usize, q: usize) -> bool {
        !self.has_comparable_sectors(p, q)
    }

    fn strict(&self, p: usize, a: usize, q: usize, b: usize) -> bool {
        self.subset(p, a, q, b) && self.block_bits(p, a) != self.block_bits(q, b)
    }

    /// No sector of a third partition sits strictly between a sector of
    /// each.
    pub fn tangent(&self, p: usize, q: usize) -> bool {
        let between = |p: usize, a: usize, q: usize, b: usize| {
            (0..self.len()).any(|r| {
                (0..self.partitions[r].blocks.len()).any(|c| self.strict(p, a, r, c) && self.strict(r, c, q, b))
            })
        };
        let (np, nq) = (self.partitions[p].blocks.len(), self.partitions[q].blocks.len());
        !(0..np).any(|a| (0..nq).any(|b| between(p, a, q, b) || between(q, b, p, a)))
    }

    pub fn relation(&self, p: usize, q: usize) -> Relation {
        if p == q {
            Relation::Equal
        } else if self.transverse(p, q) {
            Relation::Transverse
        } else if self.tangent(p, q) {
            Relation::Tangent
        } else {
            Relation::Separated
        }
    }

    pub fn principal(&self, x: usize) -> Vec<u16> {
        (0..self.len()).map(|p| self.block_of[p][x]).collect()
    }

    /// Pairwise intersecting choice of sectors.
    pub fn is_orientation(&self, sigma: &[u16]) -> bool {
        (0..self.len()).all(|p| {
            (p + 1..self.len())
                .all(|q| self.block_bits(p, sigma[p] as usize).intersects(self.block_bits(q, sigma[q] as usize)))
        })
    }
}

#[derive(Debug, Clone)]
pub struct QmGraph {
    /// Orientations in lexicographic order.
    pub orientations: Vec<Vec<u16>>,
    pub graph: Graph,
    /// QM vertex of the principal orientation of each point.
    pub principal: Vec<usize>,
    /// Partition on which the endpoints of each edge differ.
    pub edge_partition: HashMap<(usize, usize), usize>,
}

/// Breadth-first flood from the principal orientations by single-partition
/// flips that keep sectors pairwise intersecting.
pub fn quasi_cubulate(space: &SpaceWithPartitions, cap: usize) -> Result<QmGraph> {
    let m = space.len();
    // compatible[g]: global blocks meeting block g
    let total = space.bits.len();
    let mut compatible = vec![Bits::new(total); total];
    for p in 0..m {
        for a in 0..space.partitions[p].blocks.len() {
            let g = space.offset[p] + a;
            for q in 0..m {
                for b in 0..space.partitions[q].blocks.len() {
                    let h = space.offset[q] + b;
                    if p == q || space.block_bits(p, a).intersects(space.block_bits(q, b)) {
                        compatible[g].set(h);
                    }
                }
            }
        }
    }
    let chosen_bits = |sigma: &[u16]| {
        let mut b = Bits::new(total);
        for (p, &s) in sigma.iter().enumerate() {
            b.set(space.offset[p] + s as usize);
        }
        b
    };

    let mut index: HashMap<Vec<u16>, usize> = HashMap::new();
    let mut states: Vec<Vec<u16>> = Vec::new();
    let mut queue = VecDeque::new();
    for x in 0..space.point_count() {
        let s = space.principal(x);
        if !index.contains_key(&s) {
            index.insert(s.clone(), states.len());
            states.push(s.clone());
            queue.push_back(s);
        }
    }
    while let Some(sigma) = queue.pop_front() {
        let chosen = chosen_bits(&sigma);
        for p in 0..m {
            for b in 0..space.partitions[p].blocks.len() as u16 {
                if b == sigma[p] {
                    continue;
                }
                if !chosen.subset_of(&compatible[space.offset[p] + b as usize]) {
                    continue;
                }
                let mut next = sigma.clone();
                next[p] = b;
                if index.contains_key(&next) {
                    continue;
                }
                if states.len() >= cap {
                    return Err(Error::StateCap(cap));
                }
                index.insert(next.clone(), states.len());
                states.push(next.clone());
                queue.push_back(next);
            }
        }
    }

    states.sort();
    let index: HashMap<&[u16], usize> = states.iter().enumerate().map(|(i, s)| (s.as_slice(), i)).collect();
    let mut graph = Graph::new(states.len());
    let mut edge_partition = HashMap::new();
    for (i, s) in states.iter().enumerate() {
        let mut t = s.clone();
        for p in 0..m {
            let own = s[p];
            for b in 0..space.partitions[p].blocks.len() as u16 {
                if b == own {
                    continue;
                }
                t[p] = b;
                if let Some(&j) = index.get(t.as_slice()) {
                    if i < j {
                        graph.add_edge(i, j);
                        edge_partition.insert((i, j), p);
                    }
                }
            }
            t[p] = own;
        }
    }
    graph.finish();
    let principal = (0..space.point_count())
        .map(|x| index[space.principal(x).as_slice()])
        .collect();
    Ok(QmGraph {
        orientations: states,
        graph,
        principal,
        edge_partition,
    })
}

impl QmGraph {
    pub fn len(&self) -> usize {
        self.orientations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orientations.is_empty()
    }

    pub fn partition_of_edge(&self, a: usize, b: usize) -> Option<usize> {
        self.edge_partition.get(&(a.min(b), a.max(b))).copied()
    }

    /// Hyperplanes of the graph computed from its own triangles and induced
    /// squares, as a class id per edge in `graph.edges()` order.
    pub fn own_hyperplanes(&self) -> (Vec<(usize, usize)>, Vec<usize>) {
        let g = &self.graph;
        let edges = g.edges();
        let id: HashMap<(usize, usize), usize> = edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let eid = |a: usize, b: usize| id[&(a.min(b), a.max(b))];
        let mut uf = UnionFind::<usize>::new(edges.len());
        for &(a, b) in &edges {
            for c in g.common_neighbours(a, b) {
                uf.union(eid(a, b), eid(a, c));
            }
            // squares a - b - c - d with no diagonals
            for &c in g.neighbours(b) {
                if c == a || g.has_edge(a, c) {
                    continue;
                }
                for d in g.common_neighbours(a, c) {
                    if d != b && !g.has_edge(b, d) {
                        uf.union(eid(a, b), eid(c, d));
                    }
                }
            }
        }
        let labels = uf.into_labeling();
        let mut remap = HashMap::new();
        let classes = labels
            .iter()
            .map(|&r| {
                let k = remap.len();
                *remap.entry(r).or_insert(k)
            })
            .collect();
        (edges, classes)
    }

    pub fn to_json(&self, space: &SpaceWithPartitions) -> serde_json::Value {
        let mut edges: Vec<_> = self
            .edge_partition
            .iter()
            .map(|(&(a, b), &p)| (a, b, p))
            .collect();
        edges.sort_unstable();
        serde_json::json!({
            "vertices": self.orientations,
            "edges": edges,
            "principal": self.principal,
            "partitions": space.partitions,
            "points": space.points,
        })
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph qm {\n");
        for (i, s) in self.orientations.iter().enumerate() {
            let label: Vec<String> = s.iter().map(u16::to_string).collect();
            let _ = writeln!(out, "  q{i} [label=\"{}\"];", label.join(""));
        }
        let mut edges: Vec<_> = self.edge_partition.iter().collect();
        edges.sort_unstable();
        for (&(a, b), p) in edges {
            let _ = writeln!(out, "  q{a} -- q{b} [label=\"P{p}\"];");
        }
        out.push_str("}\n");
        out
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckLine {
    pub name: &'static str,
    pub checked: usize,
    pub failures: usize,
    pub witness: Option<Vec<usize>>,
}

impl CheckLine {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            checked: 0,
            failures: 0,
            witness: None,
        }
    }

    fn record(&mut self, ok: bool, witness: impl FnOnce() -> Vec<usize>) {
        self.checked += 1;
        if !ok {
            self.failures += 1;
            self.witness.get_or_insert_with(witness);
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PopsetReport {
    pub quasi_median: AxiomReport,
    pub checks: Vec<CheckLine>,
}

impl PopsetReport {
    pub fn passed(&self) -> bool {
        self.quasi_median.passed() && self.checks.iter().all(CheckLine::passed)
    }
}

/// Relation between two hyperplane classes of a finite graph, computed from
/// squares and from the components left after deleting a third class.
fn class_relations(graph: &Graph, edges: &[(usize, usize)], class: &[usize]) -> Vec<Vec<Relation>> {
    let k = class.iter().copied().max().map_or(0, |m| m + 1);
    let mut transverse = vec![vec![false; k]; k];
    let id: HashMap<(usize, usize), usize> = edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let cls = |a: usize, b: usize| class[id[&(a.min(b), a.max(b))]];
    for &(a, b) in edges {
        for &c in graph.neighbours(b) {
            if c == a || graph.has_edge(a, c) {
                continue;
            }
            for d in graph.common_neighbours(a, c) {
                if d != b && !graph.has_edge(b, d) {
                    let (x, y) = (cls(a, b), cls(b, c));
                    transverse[x][y] = true;
                    transverse[y][x] = true;
                }
            }
        }
    }
    let mut vertices: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); k];
    for (e, &(a, b)) in edges.iter().enumerate() {
        vertices[class[e]].insert(a);
        vertices[class[e]].insert(b);
    }
    let comps: Vec<Vec<usize>> = (0..k)
        .map(|c| graph.components_without(|a, b| cls(a, b) == c).0)
        .collect();
    let mut rel = vec![vec![Relation::Equal; k]; k];
    for i in 0..k {
        for j in 0..k {
            if i == j {
                continue;
            }
            rel[i][j] = if transverse[i][j] {
                Relation::Transverse
            } else {
                let separated = (0..k).any(|r| {
                    if r == i || r == j {
                        return false;
                    }
                    let ci: BTreeSet<usize> = vertices[i].iter().map(|&v| comps[r][v]).collect();
                    let cj: BTreeSet<usize> = vertices[j].iter().map(|&v| comps[r][v]).collect();
                    ci.len() == 1 && cj.len() == 1 && ci != cj
                });
                if separated {
                    Relation::Separated
                } else {
                    Relation::Tangent
                }
            };
        }
    }
    rel
}

/// Checks that QM is quasi-median, that distances count differing
/// partitions, and that partitions correspond bijectively to hyperplanes of
/// QM with the same relations.
pub fn verify_popset(qm: &QmGraph, space: &SpaceWithPartitions) -> PopsetReport {
    let dist = qm.graph.distance_matrix();
    let quasi_median = check_quasi_median_with(&qm.graph, &dist);

    let mut distance = CheckLine::new("distance-counts-partitions");
    for i in 0..qm.len() {
        for j in i + 1..qm.len() {
            let diff = qm.orientations[i]
                .iter()
                .zip(&qm.orientations[j])
                .filter(|(a, b)| a != b)
                .count();
            distance.record(dist.get(i, j) as usize == diff, || vec![i, j]);
        }
    }

    let mut orientation = CheckLine::new("orientations-consistent");
    for (i, s) in qm.orientations.iter().enumerate() {
        orientation.record(space.is_orientation(s), || vec![i]);
    }

    let (edges, class) = qm.own_hyperplanes();
    let mut bijection = CheckLine::new("partition-hyperplane-bijection");
    let mut class_of_partition: HashMap<usize, usize> = HashMap::new();
    let mut partition_of_class: HashMap<usize, usize> = HashMap::new();
    for (e, &(a, b)) in edges.iter().enumerate() {
        let p = qm.partition_of_edge(a, b).expect("edge has a partition");
        let ok_p = *class_of_partition.entry(p).or_insert(class[e]) == class[e];
        let ok_c = *partition_of_class.entry(class[e]).or_insert(p) == p;
        bijection.record(ok_p && ok_c, || vec![a, b, p]);
    }
    bijection.record(class_of_partition.len() == space.len(), || vec![class_of_partition.len()]);

    let mut relations = CheckLine::new("relations-preserved");
    if bijection.passed() {
        let rel = class_relations(&qm.graph, &edges, &class);
        for p in 0..space.len() {
            for q in p + 1..space.len() {
                let (cp, cq) = (class_of_partition[&p], class_of_partition[&q]);
                relations.record(space.relation(p, q) == rel[cp][cq], || vec![p, q]);
            }
        }
    }
    PopsetReport {
        quasi_median,
        checks: vec![distance, orientation, bijection, relations],
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CompletionReport {
    pub checks: Vec<CheckLine>,
}

impl CompletionReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckLine::passed)
    }
}

/// Checks that `x -> principal orientation` is isometric on the points,
/// sends cliques to cliques, and that two cliques lie in the same
/// hyperplane of the ball iff their images lie in the same hyperplane of QM.
pub fn verify_completion(ball: &CayleyBall, hyps: &Hyperplanes, space: &SpaceWithPartitions, qm: &QmGraph) -> CompletionReport {
    let dist = qm.graph.distance_matrix();
    let n = space.point_count();
    let mut isometric = CheckLine::new("iota-isometric");
    for i in 0..n {
        for j in i + 1..n {
            let (x, y) = (space.points[i], space.points[j]);
            let d = ball.distances().get(x, y);
            isometric.record(dist.get(qm.principal[i], qm.principal[j]) == d, || vec![x, y]);
        }
    }
    let point_of: HashMap<usize, usize> = space.points.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let cliques: Vec<Vec<usize>> = ball
        .cliques()
        .into_iter()
        .filter(|c| c.iter().all(|x| point_of.contains_key(x)))
        .collect();
    let mut clique_check = CheckLine::new("cliques-to-cliques");
    for c in &cliques {
        let img: Vec<usize> = c.iter().map(|x| qm.principal[point_of[x]]).collect();
        let complete = img
            .iter()
            .enumerate()
            .all(|(i, &a)| img[i + 1..].iter().all(|&b| qm.graph.has_edge(a, b)));
        let maximal = complete
            && qm
                .graph
                .neighbours(img[0])
                .iter()
                .all(|&w| img.contains(&w) || !img.iter().all(|&a| a == w || qm.graph.has_edge(a, w)));
        clique_check.record(complete && maximal, || c.clone());
    }
    let (edges, class) = qm.own_hyperplanes();
    let qm_class: HashMap<(usize, usize), usize> = edges.iter().copied().zip(class.iter().copied()).collect();
    let mut same = CheckLine::new("clique-hyperplanes-match");
    for (i, a) in cliques.iter().enumerate() {
        for (j, b) in cliques.iter().enumerate().skip(i + 1) {
            let ball_same = hyps.plane_of_edge(a[0], a[1]) == hyps.plane_of_edge(b[0], b[1]);
            let ia = (qm.principal[point_of[&a[0]]], qm.principal[point_of[&a[1]]]);
            let ib = (qm.principal[point_of[&b[0]]], qm.principal[point_of[&b[1]]]);
            let qa = qm_class.get(&(ia.0.min(ia.1), ia.0.max(ia.1)));
            let qb = qm_class.get(&(ib.0.min(ib.1), ib.0.max(ib.1)));
            let qm_same = qa.is_some() && qa == qb;
            same.record(ball_same == qm_same, || vec![i, j]);
        }
    }
    CompletionReport {
        checks: vec![isometric, clique_check, same],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn build(spec: crate::PeriagroupSpec, r: usize) -> (CayleyBall, Hyperplanes, SpaceWithPartitions, QmGraph) {
        let b = CayleyBall::from_spec(spec, r).unwrap();
        let h = Hyperplanes::compute(&b);
        let s = SpaceWithPartitions::from_hyperplanes(&b, &h).unwrap();
        let q = quasi_cubulate(&s, DEFAULT_ORIENTATION_CAP).unwrap();
        (b, h, s, q)
    }

    #[test]
    fn hexagon_completes_to_cube() {
        let (b, h, s, q) = build(fixtures::f1(), 3);
        assert_eq!(s.len(), 3);
        assert!(s.partitions.iter().all(|p| p.blocks.len() == 2));
        assert_eq!(q.len(), 8);
        assert_eq!(q.graph.edge_count(), 12);
        assert!(verify_popset(&q, &s).passed());
        assert!(verify_completion(&b, &h, &s, &q).passed());
    }

    #[test]
    fn prism_is_its_own_completion() {
        let (b, h, s, q) = build(fixtures::f2(), 2);
        let mut sizes: Vec<usize> = s.partitions.iter().map(|p| p.blocks.len()).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![2, 3]);
        assert_eq!(q.len(), 6);
        assert_eq!(q.graph.edge_count(), 9);
        let mut principal = q.principal.clone();
        principal.sort_unstable();
        assert_eq!(principal, (0..6).collect::<Vec<_>>());
        assert!(verify_popset(&q, &s).passed());
        assert!(verify_completion(&b, &h, &s, &q).passed());
    }

    #[test]
    fn single_partition_gives_clique() {
        let s = SpaceWithPartitions::new(
            vec![0, 1, 2, 3],
            vec![Partition {
                blocks: vec![vec![0], vec![1, 2], vec![3]],
                source: None,
            }],
        )
        .unwrap();
        let q = quasi_cubulate(&s, 10).unwrap();
        assert_eq!(q.len(), 3);
        assert_eq!(q.graph.edge_count(), 3);
        assert!(verify_popset(&q, &s).passed());
    }

    #[test]
    fn rejects_bad_spaces() {
        let one = Partition {
            blocks: vec![vec![0, 1]],
            source: None,
        };
        assert!(SpaceWithPartitions::new(vec![0, 1], vec![one]).is_err());
        // {0} ⊂ {0,1} but the partitions are not nested
        let p = Partition {
            blocks: vec![vec![0, 1], vec![2, 3]],
            source: None,
        };
        let q = Partition {
            blocks: vec![vec![0], vec![1, 2], vec![3]],
            source: None,
        };
        assert!(SpaceWithPartitions::new(vec![0, 1, 2, 3], vec![p, q]).is_err());
    }

    #[test]
    fn cap_is_enforced() {
        let (_, _, s, _) = build(fixtures::f1(), 3);
        assert_eq!(quasi_cubulate(&s, 4).unwrap_err(), Error::StateCap(4));
    }

    #[test]
    fn tree_of_triangles() {
        let b = CayleyBall::with_trust_radius(crate::Periagroup::new(fixtures::f3()), 2).unwrap();
        let h = Hyperplanes::compute(&b);
        let s = SpaceWithPartitions::from_hyperplanes(&b, &h).unwrap();
        let q = quasi_cubulate(&s, DEFAULT_ORIENTATION_CAP).unwrap();
        assert!(s.partitions.iter().all(|p| p.blocks.len() == 3));
        assert!(verify_popset(&q, &s).passed());
    }
}
