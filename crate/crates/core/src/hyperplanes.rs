//! Convex even cycles, hyperplanes and their combinatorics inside a ball.
//!
//! A hyperplane is a class of edges under "same 3-cycle" and "opposite in a
//! convex even cycle". In an incomplete ball the classes near the boundary
//! can be truncated, so every hyperplane carries two flags:
//!
//! * `certified`: it has an edge with both endpoints in the trust radius;
//! * `bounded`: every edge lies deep enough that no triangle or convex cycle
//!   through it was cut off, so the class is the whole hyperplane.
//!
//! Relations between unbounded hyperplanes are relative to the ball.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use petgraph::unionfind::UnionFind;
use serde::Serialize;

use crate::cayley::CayleyBall;
use crate::error::{Error, Result};
use crate::graph::INFINITY;
use crate::par;
use crate::presentation::VertexType;
use crate::word::{Letter, Word};

/// Cyclically ordered vertices of an induced, convex cycle of even length.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ConvexEvenCycle {
    pub vertices: Vec<usize>,
}

impl ConvexEvenCycle {
    /// Rotates to start at the least vertex and orients towards the smaller
    /// neighbour.
    pub fn canonical(mut vertices: Vec<usize>) -> Self {
        let n = vertices.len();
        let start = (0..n).min_by_key(|&i| vertices[i]).unwrap_or(0);
        vertices.rotate_left(start);
        if n > 2 && vertices[n - 1] < vertices[1] {
            vertices[1..].reverse();
        }
        Self { vertices }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Edge `i` joins vertex `i` to vertex `i + 1`.
    pub fn edge(&self, i: usize) -> (usize, usize) {
        let n = self.vertices.len();
        let (a, b) = (self.vertices[i % n], self.vertices[(i + 1) % n]);
        (a.min(b), a.max(b))
    }

    pub fn contains_vertex(&self, x: usize) -> bool {
        self.vertices.contains(&x)
    }
}

/// `set` is convex: every geodesic between two of its vertices stays in it.
/// Uses that a vertex set is convex iff every first step of a geodesic
/// between two members is a member.
pub fn is_convex(ball: &CayleyBall, set: &[usize]) -> bool {
    let d = ball.distances();
    let members: HashSet<usize> = set.iter().copied().collect();
    for &p in set {
        for &q in set {
            if p == q {
                continue;
            }
            let dpq = d.get(p, q);
            if dpq == INFINITY {
                return false;
            }
            for &w in ball.graph().neighbours(p) {
                if d.get(w, q) + 1 == dpq && !members.contains(&w) {
                    return false;
                }
            }
        }
    }
    true
}

/// Enumerates convex even cycles in the cycle region. Candidates are the
/// translates of the alternating cycles `<a, b>` for every edge of the
/// defining graph; each is kept only if it is induced and passes the
/// convexity test.
pub fn convex_even_cycles(ball: &CayleyBall) -> Vec<ConvexEvenCycle> {
    let spec = ball.spec();
    let mut generators = Vec::new();
    for &(u, v, k) in spec.edges() {
        for a in 1..spec.group(u).order() {
            for b in 1..spec.group(v).order() {
                generators.push((Letter::new(u, a), Letter::new(v, b), k as usize));
            }
        }
    }
    let starts: Vec<usize> = (0..ball.len()).filter(|&x| ball.in_cycle_region(x)).collect();
    let found: Vec<Vec<ConvexEvenCycle>> = par::map(&starts, |&x| {
        let mut out = Vec::new();
        'cand: for &(a, b, k) in &generators {
            // <a,b>^k followed by the inverse of <b,a>^k
            let ai = Letter::new(a.vertex(), spec.group(a.vertex()).inv(a.element()));
            let bi = Letter::new(b.vertex(), spec.group(b.vertex()).inv(b.element()));
            let back_last = if k % 2 == 0 { ai } else { bi };
            let back_other = if k % 2 == 0 { bi } else { ai };
            let mut verts = Vec::with_capacity(2 * k);
            let mut cur = x;
            for step in 0..2 * k {
                verts.push(cur);
                let s = if step < k {
                    if step % 2 == 0 { a } else { b }
                } else if (step - k) % 2 == 0 {
                    back_last
                } else {
                    back_other
                };
                let next = ball
                    .graph()
                    .neighbours(cur)
                    .iter()
                    .copied()
                    .find(|&y| ball.edge_letter(cur, y) == Some(s));
                match next {
                    Some(y) if ball.in_cycle_region(y) => cur = y,
                    _ => continue 'cand,
                }
            }
            if cur != x {
                continue;
            }
            let c = ConvexEvenCycle::canonical(verts);
            if c.vertices[0] != x {
                continue;
            }
            if is_induced_cycle(ball, &c.vertices) && is_convex(ball, &c.vertices) {
                out.push(c);
            }
        }
        out
    });
    let set: BTreeSet<ConvexEvenCycle> = found.into_iter().flatten().collect();
    set.into_iter().collect()
}

fn is_induced_cycle(ball: &CayleyBall, verts: &[usize]) -> bool {
    let n = verts.len();
    let distinct: HashSet<usize> = verts.iter().copied().collect();
    if distinct.len() != n {
        return false;
    }
    for i in 0..n {
        for j in i + 1..n {
            let consecutive = j == i + 1 || (i == 0 && j == n - 1);
            if ball.graph().has_edge(verts[i], verts[j]) != consecutive {
                return false;
            }
        }
    }
    true
}

/// An angle stored as the fraction `num / den` of a full turn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Angle {
    pub num: u32,
    pub den: u32,
}

impl Angle {
    pub fn new(num: u32, den: u32) -> Self {
        fn gcd(a: u32, b: u32) -> u32 {
            if b == 0 {
                a
            } else {
                gcd(b, a % b)
            }
        }
        let g = gcd(num, den).max(1);
        Self {
            num: num / g,
            den: den / g,
        }
    }

    pub fn right() -> Self {
        Self::new(1, 4)
    }

    /// `pi / n`.
    pub fn pi_over(n: u32) -> Self {
        Self::new(1, 2 * n)
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // as a multiple of pi: 2 * num / den
        let (p, q) = {
            let a = Angle::new(2 * self.num, self.den);
            (a.num, a.den)
        };
        match (p, q) {
            (1, 1) => write!(f, "π"),
            (1, q) => write!(f, "π/{q}"),
            (p, 1) => write!(f, "{p}π"),
            (p, q) => write!(f, "{p}π/{q}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    Equal,
    Transverse,
    Tangent,
    Separated,
}

#[derive(Debug, Clone, Serialize)]
pub struct Hyperplane {
    pub id: usize,
    /// Indices into [`Hyperplanes::edges`].
    pub edges: Vec<usize>,
    /// Sector label of every ball vertex. Vertices whose distances to the
    /// anchor clique are exact get the index of their gate in it; the rest
    /// get `anchor.len()` plus their component in the ball minus the edges.
    #[serde(skip)]
    pub sector_of: Vec<u32>,
    /// Components of the ball minus the edges.
    pub sector_count: usize,
    /// The clique of the hyperplane closest to the identity.
    pub anchor: Vec<usize>,
    pub carrier: Vec<usize>,
    /// Complete cliques whose edges lie in the hyperplane.
    pub cliques: Vec<Vec<usize>>,
    pub kind: VertexType,
    /// Defining-graph vertex for type GP hyperplanes.
    pub label: Option<usize>,
    pub certified: bool,
    pub bounded: bool,
}

impl Hyperplane {
    /// Endpoints of its edges.
    pub fn vertices(&self, system: &Hyperplanes) -> Vec<usize> {
        let mut v: Vec<usize> = self
            .edges
            .iter()
            .flat_map(|&e| {
                let (a, b) = system.edges[e];
                [a, b]
            })
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn separates(&self, x: usize, y: usize) -> bool {
        self.sector_of[x] != self.sector_of[y]
    }

    /// Sector given by the gate in the anchor clique, if exact.
    pub fn gate_sector(&self, x: usize) -> Option<usize> {
        let s = self.sector_of[x] as usize;
        (s < self.anchor.len()).then_some(s)
    }

    /// Number of distinct sectors met by trusted vertices.
    pub fn trusted_sector_count(&self, ball: &CayleyBall) -> usize {
        let s: HashSet<u32> = (0..ball.len())
            .filter(|&x| ball.is_trusted(x))
            .map(|x| self.sector_of[x])
            .collect();
        s.len()
    }
}

/// Every hyperplane of a ball together with the cycle data used to build it.
#[derive(Debug, Clone)]
pub struct Hyperplanes {
    pub cycles: Vec<ConvexEvenCycle>,
    pub edges: Vec<(usize, usize)>,
    edge_index: HashMap<(usize, usize), usize>,
    pub edge_class: Vec<usize>,
    pub planes: Vec<Hyperplane>,
    /// Hyperplanes of the opposite-edge pairs of each cycle, in cycle order.
    pub cycle_planes: Vec<Vec<usize>>,
    transverse: HashMap<(usize, usize), Vec<usize>>,
}

impl Hyperplanes {
    pub fn compute(ball: &CayleyBall) -> Self {
        let cycles = convex_even_cycles(ball);
        let edges = ball.graph().edges();
        let edge_index: HashMap<(usize, usize), usize> =
            edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let eid = |a: usize, b: usize| edge_index[&(a.min(b), a.max(b))];

        let mut uf = UnionFind::<usize>::new(edges.len());
        for &(a, b) in &edges {
            for c in ball.graph().common_neighbours(a, b) {
                uf.union(eid(a, b), eid(a, c));
            }
        }
        for c in &cycles {
            let n = c.len() / 2;
            for i in 0..n {
                let (p, q) = (c.edge(i), c.edge(i + n));
                uf.union(eid(p.0, p.1), eid(q.0, q.1));
            }
        }
        let labels = uf.into_labeling();
        let mut class_of_root: BTreeMap<usize, usize> = BTreeMap::new();
        let mut edge_class = vec![0; edges.len()];
        let mut members: Vec<Vec<usize>> = Vec::new();
        for (e, &root) in labels.iter().enumerate() {
            let id = *class_of_root.entry(root).or_insert_with(|| {
                members.push(Vec::new());
                members.len() - 1
            });
            edge_class[e] = id;
            members[id].push(e);
        }

        let mut cycle_planes = Vec::with_capacity(cycles.len());
        let mut cycles_touching: Vec<Vec<usize>> = vec![Vec::new(); members.len()];
        let mut transverse: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for (ci, c) in cycles.iter().enumerate() {
            let n = c.len() / 2;
            let planes: Vec<usize> = (0..n)
                .map(|i| {
                    let (a, b) = c.edge(i);
                    edge_class[eid(a, b)]
                })
                .collect();
            for &p in &planes {
                cycles_touching[p].push(ci);
            }
            for i in 0..n {
                for j in i + 1..n {
                    let key = (planes[i].min(planes[j]), planes[i].max(planes[j]));
                    transverse.entry(key).or_default().push(ci);
                }
            }
            cycle_planes.push(planes);
        }

        let types = ball.spec().classify_vertices();
        let max_label = ball.spec().max_label() as i64;
        let bounded_depth = if ball.is_complete() {
            ball.radius() as i64
        } else {
            ball.cycle_radius() - max_label
        };
        let cliques = ball.cliques();
        let mut clique_of_edge: HashMap<usize, usize> = HashMap::new();
        for (k, cl) in cliques.iter().enumerate() {
            for (i, &a) in cl.iter().enumerate() {
                for &b in &cl[i + 1..] {
                    clique_of_edge.insert(eid(a, b), k);
                }
            }
        }

        let planes = par::map_range(members.len(), |id| {
            let mine = &members[id];
            let in_plane: HashSet<usize> = mine.iter().copied().collect();
            let (comp, count) = ball
                .graph()
                .components_without(|a, b| in_plane.contains(&eid(a, b)));
            let mut carrier: BTreeSet<usize> = mine
                .iter()
                .flat_map(|&e| [edges[e].0, edges[e].1])
                .collect();
            for &ci in &cycles_touching[id] {
                carrier.extend(cycles[ci].vertices.iter().copied());
            }
            let first = ball.edge_letter(edges[mine[0]].0, edges[mine[0]].1).expect("edge label");
            let kind = types[first.vertex()];
            let label = (kind == VertexType::GP).then_some(first.vertex());
            let certified = mine
                .iter()
                .any(|&e| ball.is_trusted(edges[e].0) && ball.is_trusted(edges[e].1));
            let bounded = mine.iter().all(|&e| {
                ball.depth(edges[e].0).max(ball.depth(edges[e].1)) as i64 <= bounded_depth
            });
            let mut my_cliques: Vec<Vec<usize>> = mine
                .iter()
                .filter_map(|e| clique_of_edge.get(e).copied())
                .collect::<BTreeSet<_>>()
                .into_iter()
                .map(|k| cliques[k].clone())
                .collect();
            my_cliques.sort();
            let anchor = my_cliques
                .iter()
                .min_by_key(|c| c.iter().map(|&x| ball.depth(x)).max())
                .cloned()
                .unwrap_or_default();
            let anchor_exact = !anchor.is_empty()
                && anchor.iter().all(|&c| ball.is_complete() || ball.depth(c) as i64 <= ball.trust_radius() + 1);
            let d = ball.distances();
            let sector_of = (0..ball.len())
                .map(|x| {
                    if anchor_exact && ball.is_trusted(x) {
                        let dists: Vec<u16> = anchor.iter().map(|&c| d.get(x, c)).collect();
                        let min = *dists.iter().min().unwrap();
                        let mut gates = (0..anchor.len()).filter(|&i| dists[i] == min);
                        if let (Some(g), None) = (gates.next(), gates.next()) {
                            return g as u32;
                        }
                    }
                    (anchor.len() + comp[x]) as u32
                })
                .collect();
            Hyperplane {
                id,
                edges: mine.clone(),
                sector_of,
                anchor,
                sector_count: count,
                carrier: carrier.into_iter().collect(),
                cliques: my_cliques,
                kind,
                label,
                certified,
                bounded,
            }
        });
        Self {
            cycles,
            edges,
            edge_index,
            edge_class,
            planes,
            cycle_planes,
            transverse,
        }
    }

    pub fn len(&self) -> usize {
        self.planes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.planes.is_empty()
    }

    pub fn get(&self, id: usize) -> &Hyperplane {
        &self.planes[id]
    }

    pub fn edge_id(&self, a: usize, b: usize) -> Option<usize> {
        self.edge_index.get(&(a.min(b), a.max(b))).copied()
    }

    /// Hyperplane containing the edge `a - b`.
    pub fn plane_of_edge(&self, a: usize, b: usize) -> Option<usize> {
        self.edge_id(a, b).map(|e| self.edge_class[e])
    }

    /// Cycles in which both hyperplanes own a pair of opposite edges.
    pub fn shared_cycles(&self, j1: usize, j2: usize) -> &[usize] {
        self.transverse
            .get(&(j1.min(j2), j1.max(j2)))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn transverse(&self, j1: usize, j2: usize) -> bool {
        j1 != j2 && !self.shared_cycles(j1, j2).is_empty()
    }

    /// Transverse pairs `(j1, j2)` with `j1 < j2`.
    pub fn transverse_pairs(&self) -> Vec<(usize, usize)> {
        let mut v: Vec<_> = self.transverse.keys().copied().filter(|(a, b)| a != b).collect();
        v.sort_unstable();
        v
    }

    /// Vertices used to locate a hyperplane in the sectors of another:
    /// the trusted endpoints when there are any.
    fn anchor_vertices(&self, ball: &CayleyBall, j: usize) -> Vec<usize> {
        let all = self.planes[j].vertices(self);
        let trusted: Vec<usize> = all.iter().copied().filter(|&x| ball.is_trusted(x)).collect();
        if trusted.is_empty() {
            all
        } else {
            trusted
        }
    }

    /// Hyperplanes crossed by the least geodesic (in vertex order) from `a`
    /// to `b`, with repetitions.
    pub fn geodesic_planes(&self, ball: &CayleyBall, a: usize, b: usize) -> Vec<usize> {
        let dist = ball.distances();
        let mut out = Vec::new();
        let mut cur = a;
        while cur != b {
            let next = ball
                .graph()
                .neighbours(cur)
                .iter()
                .copied()
                .find(|&w| dist.get(w, b) + 1 == dist.get(cur, b))
                .expect("geodesic step");
            out.push(self.plane_of_edge(cur, next).expect("edge"));
            cur = next;
        }
        out
    }

    /// A third hyperplane with `j1` and `j2` in distinct sectors. Any such
    /// hyperplane separates the two vertices nearest the identity, so only
    /// the hyperplanes along one geodesic between them are candidates.
    pub fn separator(&self, ball: &CayleyBall, j1: usize, j2: usize) -> Option<usize> {
        let v1 = self.anchor_vertices(ball, j1);
        let v2 = self.anchor_vertices(ball, j2);
        let (p, q) = (v1[0], v2[0]);
        let mut candidates = self.geodesic_planes(ball, p, q);
        candidates.sort_unstable();
        candidates.dedup();
        candidates.into_iter().find(|&k| {
            if k == j1 || k == j2 || self.transverse(k, j1) || self.transverse(k, j2) {
                return false;
            }
            let plane = &self.planes[k];
            let s1 = plane.sector_of[p];
            let s2 = plane.sector_of[q];
            s1 != s2
                && v1.iter().all(|&x| plane.sector_of[x] == s1)
                && v2.iter().all(|&x| plane.sector_of[x] == s2)
        })
    }

    /// Least depth of a vertex of `j`.
    pub fn min_depth(&self, ball: &CayleyBall, j: usize) -> usize {
        self.planes[j]
            .edges
            .iter()
            .map(|&e| ball.depth(self.edges[e].0).min(ball.depth(self.edges[e].1)))
            .min()
            .unwrap_or(usize::MAX)
    }

    /// Certified and reaching within half the trust radius, so that every
    /// hyperplane between it and another such hyperplane has exact sectors
    /// on the trusted vertices.
    pub fn is_determined(&self, ball: &CayleyBall, j: usize) -> bool {
        self.planes[j].certified
            && (ball.is_complete() || 2 * self.min_depth(ball, j) as i64 <= ball.trust_radius())
    }

    /// The relation when it can be decided from the ball: transversality
    /// is always witnessed by a cycle; the other relations need both
    /// hyperplanes determined.
    pub fn relation_determined(&self, ball: &CayleyBall, j1: usize, j2: usize) -> Option<Relation> {
        if j1 == j2 {
            Some(Relation::Equal)
        } else if self.transverse(j1, j2) {
            Some(Relation::Transverse)
        } else if self.is_determined(ball, j1) && self.is_determined(ball, j2) {
            Some(self.relation_unchecked(ball, j1, j2))
        } else {
            None
        }
    }

    /// Transverse, tangent, separated or equal. Both must be certified.
    pub fn relation(&self, ball: &CayleyBall, j1: usize, j2: usize) -> Result<Relation> {
        for j in [j1, j2] {
            if !self.planes[j].certified {
                return Err(Error::Uncertified(j));
            }
        }
        Ok(self.relation_unchecked(ball, j1, j2))
    }

    pub fn relation_unchecked(&self, ball: &CayleyBall, j1: usize, j2: usize) -> Relation {
        if j1 == j2 {
            Relation::Equal
        } else if self.transverse(j1, j2) {
            Relation::Transverse
        } else if self.separator(ball, j1, j2).is_some() {
            Relation::Separated
        } else {
            Relation::Tangent
        }
    }

    /// Relation computed entirely from bounded, trusted data.
    pub fn relation_is_exact(&self, ball: &CayleyBall, j1: usize, j2: usize) -> bool {
        [j1, j2].iter().all(|&j| {
            let p = &self.planes[j];
            p.bounded && p.vertices(self).iter().all(|&x| ball.is_trusted(x))
        })
    }

    /// Angle at one cycle: `(1 + d) / length` of a full turn, `d` the
    /// distance between the two pairs of opposite edges.
    pub fn angle_at(&self, ball: &CayleyBall, j1: usize, j2: usize, cycle: usize) -> Angle {
        let c = &self.cycles[cycle];
        let n = c.len() / 2;
        let planes = &self.cycle_planes[cycle];
        let i1 = planes.iter().position(|&p| p == j1).expect("j1 crosses cycle");
        let i2 = planes.iter().position(|&p| p == j2).expect("j2 crosses cycle");
        let d = ball.distances();
        let mut best = u16::MAX;
        for e1 in [i1, i1 + n] {
            for e2 in [i2, i2 + n] {
                let (a, b) = c.edge(e1);
                let (x, y) = c.edge(e2);
                for p in [a, b] {
                    for q in [x, y] {
                        best = best.min(d.get(p, q));
                    }
                }
            }
        }
        Angle::new(1 + best as u32, c.len() as u32)
    }

    /// Angle between transverse hyperplanes; fails if two shared cycles
    /// disagree.
    pub fn angle(&self, ball: &CayleyBall, j1: usize, j2: usize) -> Result<Angle> {
        for j in [j1, j2] {
            if !self.planes[j].certified {
                return Err(Error::Uncertified(j));
            }
        }
        let cycles = self.shared_cycles(j1, j2);
        let mut angles = cycles.iter().map(|&c| self.angle_at(ball, j1, j2, c));
        let first = angles
            .next()
            .ok_or_else(|| Error::Inconsistent(format!("hyperplanes {j1} and {j2} are not transverse")))?;
        for a in angles {
            if a != first {
                return Err(Error::Inconsistent(format!(
                    "angle between {j1} and {j2} depends on the cycle: {first} vs {a}"
                )));
            }
        }
        Ok(first)
    }

    /// Image of hyperplane `j` under left multiplication by `g`: the class of
    /// the image of one of its edges. Edges whose images are trusted are
    /// preferred; `None` when no image edge lands in the ball.
    pub fn translate(&self, ball: &CayleyBall, g: &Word, j: usize) -> Result<Option<usize>> {
        let mut fallback = None;
        let mut edges = self.planes[j].edges.clone();
        edges.sort_by_key(|&e| {
            let (a, b) = self.edges[e];
            ball.depth(a).max(ball.depth(b))
        });
        for e in edges.into_iter().take(8) {
            let (a, b) = self.edges[e];
            let ga = ball.locate(&g.concat(ball.element(a)))?;
            let gb = ball.locate(&g.concat(ball.element(b)))?;
            if let (Some(x), Some(y)) = (ga, gb) {
                let plane = self.plane_of_edge(x, y).expect("translated edge exists");
                if ball.is_trusted(x) && ball.is_trusted(y) {
                    return Ok(Some(plane));
                }
                fallback.get_or_insert(plane);
            }
        }
        Ok(fallback)
    }

    /// Elements stabilising every clique of `j`: the conjugates `x h x^-1`
    /// of the vertex group at one clique, checked against the other
    /// cliques and for a free transitive action on the anchor clique.
    pub fn rotative_stabiliser(&self, ball: &CayleyBall, j: usize) -> Result<Vec<Word>> {
        let plane = &self.planes[j];
        let anchor = plane
            .cliques
            .iter()
            .min_by_key(|c| c.iter().map(|&x| ball.depth(x)).max())
            .ok_or(Error::OutsideBall)?;
        let x = anchor[0];
        let u = ball
            .edge_letter(anchor[0], anchor[1])
            .expect("clique edge")
            .vertex();
        let group = ball.group();
        let order = ball.spec().group(u).order();
        let mut out = Vec::with_capacity(order);
        for h in 0..order {
            let g = if h == 0 {
                Word::identity()
            } else {
                group.conjugate(ball.element(x), &Word::letter(Letter::new(u, h)))?
            };
            for clique in &plane.cliques {
                let mut image = Vec::with_capacity(clique.len());
                for &c in clique {
                    match ball.locate(&g.concat(ball.element(c)))? {
                        Some(y) => image.push(y),
                        None => break,
                    }
                }
                if image.len() < clique.len() {
                    continue;
                }
                image.sort_unstable();
                if &image != clique {
                    return Err(Error::Inconsistent(format!(
                        "rotative candidate does not stabilise a clique of hyperplane {j}"
                    )));
                }
            }
            out.push(g);
        }
        let mut images: Vec<usize> = Vec::new();
        for g in &out {
            images.push(ball.act(g, x)?);
        }
        let distinct: HashSet<usize> = images.iter().copied().collect();
        if distinct.len() != anchor.len() || !anchor.iter().all(|c| distinct.contains(c)) {
            return Err(Error::Inconsistent(format!(
                "rotative stabiliser of {j} is not free and transitive on its clique"
            )));
        }
        out.sort();
        Ok(out)
    }

    /// Permutation induced on the sectors of `j` by `g` (which must
    /// stabilise `j`), indexed by the vertices of the anchor clique.
    pub fn sector_permutation(&self, ball: &CayleyBall, g: &Word, j: usize) -> Result<Option<Vec<usize>>> {
        let plane = &self.planes[j];
        let Some(clique) = plane
            .cliques
            .iter()
            .min_by_key(|c| c.iter().map(|&x| ball.depth(x)).max())
        else {
            return Ok(None);
        };
        let mut perm = Vec::with_capacity(clique.len());
        for &c in clique {
            let Some(y) = ball.locate(&g.concat(ball.element(c)))? else {
                return Ok(None);
            };
            let s = plane.sector_of[y];
            match clique.iter().position(|&z| plane.sector_of[z] == s) {
                Some(i) => perm.push(i),
                None => return Ok(None),
            }
        }
        Ok(Some(perm))
    }

    pub fn to_json(&self, ball: &CayleyBall) -> serde_json::Value {
        let spec = ball.spec();
        serde_json::json!({
            "convex_cycles": self.cycles.len(),
            "hyperplanes": self.planes.iter().map(|p| serde_json::json!({
                "id": p.id,
                "edges": p.edges.iter().map(|&e| self.edges[e]).collect::<Vec<_>>(),
                "sectors": p.sector_count,
                "trusted_sectors": p.trusted_sector_count(ball),
                "carrier": p.carrier,
                "type": p.kind,
                "label": p.label.map(|v| spec.vertex_name(v).to_string()),
                "certified": p.certified,
                "bounded": p.bounded,
            })).collect::<Vec<_>>(),
            "transverse": self.transverse_pairs(),
        })
    }

    pub fn to_dot(&self, ball: &CayleyBall) -> String {
        use std::fmt::Write as _;
        let palette = [
            "red", "blue", "darkgreen", "orange", "purple", "brown", "magenta", "cyan", "gold", "gray",
        ];
        let mut out = String::from("graph hyperplanes {\n  node [shape=point];\n");
        for (e, &(a, b)) in self.edges.iter().enumerate() {
            let h = self.edge_class[e];
            let _ = writeln!(
                out,
                "  n{a} -- n{b} [color={}, label=\"J{h}\"];",
                palette[h % palette.len()]
            );
        }
        let _ = ball;
        out.push_str("}\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn prism_cycles_and_hyperplanes() {
        let b = CayleyBall::from_spec(fixtures::f2(), 2).unwrap();
        let h = Hyperplanes::compute(&b);
        assert_eq!(h.cycles.len(), 3);
        assert!(h.cycles.iter().all(|c| c.len() == 4));
        let mut sectors: Vec<usize> = h.planes.iter().map(|p| p.sector_count).collect();
        sectors.sort_unstable();
        assert_eq!(sectors, vec![2, 3]);
        assert_eq!(h.relation(&b, 0, 1).unwrap(), Relation::Transverse);
        assert_eq!(h.angle(&b, 0, 1).unwrap(), Angle::right());
    }

    #[test]
    fn hexagon() {
        let b = CayleyBall::from_spec(fixtures::f1(), 3).unwrap();
        let h = Hyperplanes::compute(&b);
        assert_eq!(h.cycles.len(), 1);
        assert_eq!(h.cycles[0].len(), 6);
        assert_eq!(h.len(), 3);
        assert!(h.planes.iter().all(|p| p.sector_count == 2 && p.edges.len() == 2));
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    assert_eq!(h.relation(&b, i, j).unwrap(), Relation::Transverse);
                    let a = h.angle(&b, i, j).unwrap();
                    assert!(a == Angle::pi_over(3) || a == Angle::new(1, 3), "{a}");
                }
            }
        }
        // hyperplanes through the two edges at the identity meet at pi/3
        let (x, y) = (b.graph().neighbours(0)[0], b.graph().neighbours(0)[1]);
        let (j1, j2) = (h.plane_of_edge(0, x).unwrap(), h.plane_of_edge(0, y).unwrap());
        assert_eq!(h.angle(&b, j1, j2).unwrap(), Angle::pi_over(3));
    }

    #[test]
    fn tree_of_triangles() {
        let b = CayleyBall::from_spec(fixtures::f3(), 3).unwrap();
        let h = Hyperplanes::compute(&b);
        assert!(h.cycles.is_empty());
        assert!(h.planes.iter().all(|p| p.edges.len() == 3 && p.sector_count == 3));
        let ju = h.plane_of_edge(0, b.graph().neighbours(0)[0]).unwrap();
        let jv = h.plane_of_edge(0, *b.graph().neighbours(0).last().unwrap()).unwrap();
        assert_ne!(ju, jv);
        assert_eq!(h.relation_unchecked(&b, ju, jv), Relation::Tangent);
    }

    #[test]
    fn rotative_stabilisers() {
        let b = CayleyBall::from_spec(fixtures::f2(), 2).unwrap();
        let h = Hyperplanes::compute(&b);
        let tri = h.planes.iter().find(|p| p.sector_count == 3).unwrap().id;
        let rot = h.rotative_stabiliser(&b, tri).unwrap();
        assert_eq!(rot.len(), 3);
        assert!(rot.iter().all(|w| w.letters().iter().all(|l| l.vertex() == 1)));

        let b1 = CayleyBall::from_spec(fixtures::f1(), 3).unwrap();
        let h1 = Hyperplanes::compute(&b1);
        for j in 0..h1.len() {
            let rot = h1.rotative_stabiliser(&b1, j).unwrap();
            assert_eq!(rot.len(), 2);
            assert!(rot[0].is_empty());
            // reflections have odd length
            assert_eq!(rot[1].len() % 2, 1);
            let perm = h1.sector_permutation(&b1, &rot[1], j).unwrap().unwrap();
            assert_eq!(perm, vec![1, 0]);
        }

        let b3 = CayleyBall::from_spec(fixtures::f3(), 3).unwrap();
        let h3 = Hyperplanes::compute(&b3);
        let base = h3.plane_of_edge(0, b3.graph().neighbours(0)[0]).unwrap();
        let rot = h3.rotative_stabiliser(&b3, base).unwrap();
        let words: Vec<String> = rot.iter().map(|w| w.display(b3.spec()).to_string()).collect();
        assert_eq!(words, vec!["e", "u:1", "u:2"]);
    }

    /// Every induced even cycle of length at most `2 * max_label` in the
    /// cycle region, filtered by interval containment.
    fn brute_force_cycles(ball: &CayleyBall) -> BTreeSet<ConvexEvenCycle> {
        let g = ball.graph();
        let d = ball.distances();
        let max_len = 2 * ball.spec().max_label() as usize;
        let mut out = BTreeSet::new();
        fn extend(
            ball: &CayleyBall,
            path: &mut Vec<usize>,
            max_len: usize,
            out: &mut Vec<Vec<usize>>,
        ) {
            let last = *path.last().unwrap();
            for &y in ball.graph().neighbours(last) {
                if y == path[0] && path.len() >= 4 && path.len() % 2 == 0 {
                    out.push(path.clone());
                }
                if y > path[0] && !path.contains(&y) && path.len() < max_len && ball.in_cycle_region(y) {
                    path.push(y);
                    extend(ball, path, max_len, out);
                    path.pop();
                }
            }
        }
        for s in (0..g.len()).filter(|&x| ball.in_cycle_region(x)) {
            let mut raw = Vec::new();
            extend(ball, &mut vec![s], max_len, &mut raw);
            for c in raw {
                if !is_induced_cycle(ball, &c) {
                    continue;
                }
                let convex = c.iter().all(|&p| {
                    c.iter().all(|&q| d.interval(p, q).iter().all(|z| c.contains(z)))
                });
                if convex {
                    out.insert(ConvexEvenCycle::canonical(c));
                }
            }
        }
        out
    }

    #[test]
    fn cycles_match_brute_force() {
        for (spec, r) in [
            (fixtures::f1(), 3),
            (fixtures::f2(), 2),
            (fixtures::f4(), 4),
            (fixtures::f5(), 5),
        ] {
            let b = CayleyBall::from_spec(spec, r).unwrap();
            let fast: BTreeSet<_> = convex_even_cycles(&b).into_iter().collect();
            assert_eq!(fast, brute_force_cycles(&b));
        }
    }

    #[test]
    fn angle_display() {
        assert_eq!(Angle::right().to_string(), "π/2");
        assert_eq!(Angle::pi_over(3).to_string(), "π/3");
        assert_eq!(Angle::new(2, 6).to_string(), "2π/3");
    }
}
