//! Axiom checks for mediangle and quasi-median graphs, gates, gated hulls
//! and projections.
//!
//! Checks on a ball only consider configurations whose vertices are all
//! trusted; configurations that reach past the trust radius are counted as
//! skipped rather than judged.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use serde::Serialize;

use crate::cayley::CayleyBall;
use crate::error::{Error, Result};
use crate::graph::{DistanceMatrix, Graph};
use crate::hyperplanes::{ConvexEvenCycle, Hyperplanes};
use crate::par;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum AxiomStatus {
    Pass,
    Fail { witness: Vec<usize> },
    SkippedBoundary,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxiomResult {
    pub name: &'static str,
    #[serde(flatten)]
    pub status: AxiomStatus,
    pub checked: usize,
    pub skipped: usize,
    pub failures: usize,
}

impl AxiomResult {
    fn from_tally(name: &'static str, tally: Tally) -> Self {
        let status = match tally.witness {
            Some(w) => AxiomStatus::Fail { witness: w },
            None if tally.checked == 0 && tally.skipped > 0 => AxiomStatus::SkippedBoundary,
            None => AxiomStatus::Pass,
        };
        Self {
            name,
            status,
            checked: tally.checked,
            skipped: tally.skipped,
            failures: tally.failures,
        }
    }

    pub fn passed(&self) -> bool {
        !matches!(self.status, AxiomStatus::Fail { .. })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub axioms: Vec<AxiomResult>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.axioms.iter().all(AxiomResult::passed)
    }

    pub fn failures(&self) -> usize {
        self.axioms.iter().map(|a| a.failures).sum()
    }

    pub fn get(&self, name: &str) -> Option<&AxiomResult> {
        self.axioms.iter().find(|a| a.name == name)
    }
}

impl fmt::Display for AxiomReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for a in &self.axioms {
            let status = match &a.status {
                AxiomStatus::Pass => "pass".to_string(),
                AxiomStatus::Fail { witness } => format!("FAIL witness {witness:?}"),
                AxiomStatus::SkippedBoundary => "skipped-boundary".to_string(),
            };
            writeln!(
                f,
                "{:<28} {status} (checked {}, skipped {}, failures {})",
                a.name, a.checked, a.skipped, a.failures
            )?;
        }
        Ok(())
    }
}

/// Counts merged across parallel workers; the witness kept is the least.
#[derive(Debug, Clone, Default)]
struct Tally {
    checked: usize,
    skipped: usize,
    failures: usize,
    witness: Option<Vec<usize>>,
}

impl Tally {
    fn fail(&mut self, w: Vec<usize>) {
        self.checked += 1;
        self.failures += 1;
        if self.witness.as_ref().map_or(true, |old| w < *old) {
            self.witness = Some(w);
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.checked += other.checked;
        self.skipped += other.skipped;
        self.failures += other.failures;
        if let Some(w) = other.witness {
            if self.witness.as_ref().map_or(true, |old| w < *old) {
                self.witness = Some(w);
            }
        }
        self
    }
}

/// The data an axiom scan needs: a graph, its metric and the vertices whose
/// configurations count.
struct View<'a> {
    graph: &'a Graph,
    dist: &'a DistanceMatrix,
    trusted: Vec<bool>,
}

impl View<'_> {
    fn d(&self, a: usize, b: usize) -> u16 {
        self.dist.get(a, b)
    }

    fn roots(&self) -> Vec<usize> {
        (0..self.graph.len()).filter(|&o| self.trusted[o]).collect()
    }

    fn scan(&self, f: impl Fn(usize, &mut Tally) + Sync) -> Tally {
        par::map(&self.roots(), |&o| {
            let mut t = Tally::default();
            f(o, &mut t);
            t
        })
        .into_iter()
        .fold(Tally::default(), Tally::merge)
    }

    fn triangle_condition(&self) -> Tally {
        self.scan(|o, t| {
            for (x, y) in self.graph.edges() {
                if self.d(o, x) != self.d(o, y) || self.d(o, x) == 0 {
                    continue;
                }
                if !(self.trusted[x] && self.trusted[y]) {
                    t.skipped += 1;
                    continue;
                }
                let ok = self
                    .graph
                    .common_neighbours(x, y)
                    .into_iter()
                    .any(|z| self.d(o, z) + 1 == self.d(o, x));
                if ok {
                    t.checked += 1;
                } else {
                    t.fail(vec![o, x, y]);
                }
            }
        })
    }

    fn no_k4_minus(&self) -> Tally {
        let edges = self.graph.edges();
        let t = par::map(&edges, |&(a, b)| {
            let mut t = Tally::default();
            if !(self.trusted[a] && self.trusted[b]) {
                t.skipped += 1;
                return t;
            }
            let common = self.graph.common_neighbours(a, b);
            let mut bad = None;
            'outer: for (i, &c) in common.iter().enumerate() {
                for &e in &common[i + 1..] {
                    if !self.graph.has_edge(c, e) {
                        bad = Some(vec![a, b, c, e]);
                        break 'outer;
                    }
                }
            }
            match bad {
                Some(w) => t.fail(w),
                None => t.checked += 1,
            }
            t
        });
        t.into_iter().fold(Tally::default(), Tally::merge)
    }

    fn quadrangle_condition(&self) -> Tally {
        self.scan(|o, t| {
            for z in 0..self.graph.len() {
                let dz = self.d(o, z);
                if dz < 2 {
                    continue;
                }
                let lower: Vec<usize> = self
                    .graph
                    .neighbours(z)
                    .iter()
                    .copied()
                    .filter(|&x| self.d(o, x) + 1 == dz)
                    .collect();
                for (i, &x) in lower.iter().enumerate() {
                    for &y in &lower[i + 1..] {
                        if !(self.trusted[x] && self.trusted[y] && self.trusted[z]) {
                            t.skipped += 1;
                            continue;
                        }
                        let ok = self
                            .graph
                            .common_neighbours(x, y)
                            .into_iter()
                            .any(|w| self.d(o, w) + 2 == dz);
                        if ok {
                            t.checked += 1;
                        } else {
                            t.fail(vec![o, x, y, z]);
                        }
                    }
                }
            }
        })
    }

    fn no_k32(&self) -> Tally {
        let n = self.graph.len();
        let t = par::map_range(n, |p| {
            let mut t = Tally::default();
            for q in p + 1..n {
                if self.graph.has_edge(p, q) || !(self.trusted[p] && self.trusted[q]) {
                    continue;
                }
                let common = self.graph.common_neighbours(p, q);
                let mut bad = None;
                'outer: for (i, &a) in common.iter().enumerate() {
                    for (j, &b) in common.iter().enumerate().skip(i + 1) {
                        if self.graph.has_edge(a, b) {
                            continue;
                        }
                        for &c in &common[j + 1..] {
                            if !self.graph.has_edge(a, c) && !self.graph.has_edge(b, c) {
                                bad = Some(vec![p, q, a, b, c]);
                                break 'outer;
                            }
                        }
                    }
                }
                match bad {
                    Some(w) => t.fail(w),
                    None => t.checked += 1,
                }
            }
            t
        });
        t.into_iter().fold(Tally::default(), Tally::merge)
    }
}

/// Cycle condition: two neighbours `x, y` of `z` closer to `o` span a
/// convex even cycle whose vertex opposite to `z` lies in `I(o,x) ∩ I(o,y)`.
fn cycle_condition(view: &View, cycles: &[ConvexEvenCycle]) -> Tally {
    let mut by_corner: HashMap<(usize, usize, usize), Vec<usize>> = HashMap::new();
    for (ci, c) in cycles.iter().enumerate() {
        let n = c.len();
        for i in 0..n {
            let z = c.vertices[i];
            let a = c.vertices[(i + 1) % n];
            let b = c.vertices[(i + n - 1) % n];
            by_corner.entry((z, a.min(b), a.max(b))).or_default().push(ci);
        }
    }
    view.scan(|o, t| {
        for z in 0..view.graph.len() {
            let dz = view.d(o, z);
            if dz == 0 {
                continue;
            }
            let lower: Vec<usize> = view
                .graph
                .neighbours(z)
                .iter()
                .copied()
                .filter(|&x| view.d(o, x) + 1 == dz)
                .collect();
            for (i, &x) in lower.iter().enumerate() {
                for &y in &lower[i + 1..] {
                    if !(view.trusted[x] && view.trusted[y] && view.trusted[z]) {
                        t.skipped += 1;
                        continue;
                    }
                    let ok = by_corner.get(&(z, x, y)).is_some_and(|cs| {
                        cs.iter().any(|&ci| {
                            let c = &cycles[ci];
                            let n = c.len();
                            let pos = c.vertices.iter().position(|&v| v == z).unwrap();
                            let opp = c.vertices[(pos + n / 2) % n];
                            view.dist.in_interval(o, opp, x) && view.dist.in_interval(o, opp, y)
                        })
                    });
                    if ok {
                        t.checked += 1;
                    } else {
                        t.fail(vec![o, x, y, z]);
                    }
                }
            }
        }
    })
}

/// Two convex even cycles share at most one edge.
fn even_cycle_intersections(cycles: &[ConvexEvenCycle], trusted: &[bool]) -> Tally {
    let mut by_edge: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (ci, c) in cycles.iter().enumerate() {
        for i in 0..c.len() {
            by_edge.entry(c.edge(i)).or_default().push(ci);
        }
    }
    let mut t = Tally::default();
    for (ci, c) in cycles.iter().enumerate() {
        if !c.vertices.iter().all(|&v| trusted[v]) {
            t.skipped += 1;
            continue;
        }
        let mut shared: HashMap<usize, usize> = HashMap::new();
        for i in 0..c.len() {
            for &other in &by_edge[&c.edge(i)] {
                if other > ci {
                    *shared.entry(other).or_default() += 1;
                }
            }
        }
        let mut bad: Vec<usize> = shared.into_iter().filter(|&(_, k)| k > 1).map(|(o, _)| o).collect();
        bad.sort_unstable();
        match bad.first() {
            Some(&other) => t.fail(vec![ci, other]),
            None => t.checked += 1,
        }
    }
    t
}

fn ball_view(ball: &CayleyBall) -> View<'_> {
    View {
        graph: ball.graph(),
        dist: ball.distances(),
        trusted: (0..ball.len()).map(|x| ball.is_trusted(x)).collect(),
    }
}

/// Checks the four mediangle conditions over trusted configurations.
pub fn check_mediangle(ball: &CayleyBall) -> AxiomReport {
    let cycles = crate::hyperplanes::convex_even_cycles(ball);
    check_mediangle_with(ball, &cycles)
}

pub fn check_mediangle_with(ball: &CayleyBall, cycles: &[ConvexEvenCycle]) -> AxiomReport {
    let view = ball_view(ball);
    AxiomReport {
        axioms: vec![
            AxiomResult::from_tally("triangle-condition", view.triangle_condition()),
            AxiomResult::from_tally("intersection-of-triangles", view.no_k4_minus()),
            AxiomResult::from_tally("cycle-condition", cycle_condition(&view, cycles)),
            AxiomResult::from_tally(
                "intersection-of-even-cycles",
                even_cycle_intersections(cycles, &view.trusted),
            ),
        ],
    }
}

/// Checks the quasi-median axioms on a finite graph.
pub fn check_quasi_median(graph: &Graph) -> AxiomReport {
    let dist = graph.distance_matrix();
    check_quasi_median_with(graph, &dist)
}

pub fn check_quasi_median_with(graph: &Graph, dist: &DistanceMatrix) -> AxiomReport {
    let view = View {
        graph,
        dist,
        trusted: vec![true; graph.len()],
    };
    let mut connected = Tally::default();
    if graph.is_connected() {
        connected.checked = 1;
    } else {
        let comp = graph.bfs(0);
        let far = (0..graph.len()).find(|&x| comp[x] == crate::graph::INFINITY).unwrap();
        connected.fail(vec![0, far]);
    }
    AxiomReport {
        axioms: vec![
            AxiomResult::from_tally("connected", connected),
            AxiomResult::from_tally("triangle-condition", view.triangle_condition()),
            AxiomResult::from_tally("quadrangle-condition", view.quadrangle_condition()),
            AxiomResult::from_tally("no-induced-k4-minus", view.no_k4_minus()),
            AxiomResult::from_tally("no-induced-k32", view.no_k32()),
        ],
    }
}

fn gate_in(dist: &DistanceMatrix, x: usize, ys: &[usize]) -> Option<usize> {
    let &y = ys.iter().min_by_key(|&&y| (dist.get(x, y), y))?;
    ys.iter()
        .all(|&z| dist.get(x, z) == dist.get(x, y) + dist.get(y, z))
        .then_some(y)
}

fn require_trusted(ball: &CayleyBall, ys: &[usize]) -> Result<()> {
    match ys.iter().find(|&&y| !ball.is_trusted(y)) {
        Some(&y) => Err(Error::Untrusted(y)),
        None => Ok(()),
    }
}

/// The vertex of `ys` through which geodesics from `x` to all of `ys` pass.
pub fn gate(ball: &CayleyBall, x: usize, ys: &[usize]) -> Result<Option<usize>> {
    require_trusted(ball, &[x])?;
    require_trusted(ball, ys)?;
    Ok(gate_in(ball.distances(), x, ys))
}

/// Every trusted vertex has a gate in `ys`.
pub fn is_gated(ball: &CayleyBall, ys: &[usize]) -> Result<bool> {
    require_trusted(ball, ys)?;
    let xs = ball.trusted_vertices();
    Ok(gated_for(ball.distances(), &xs, ys))
}

fn gated_for(dist: &DistanceMatrix, xs: &[usize], ys: &[usize]) -> bool {
    !ys.is_empty() && par::map(xs, |&x| gate_in(dist, x, ys).is_some()).into_iter().all(|b| b)
}

/// Least gated superset of `seed`: closes under intervals, under triangles
/// with an edge inside and under convex even cycles with two consecutive
/// edges inside, then verifies gatedness directly.
pub fn gated_hull(ball: &CayleyBall, cycles: &[ConvexEvenCycle], seed: &[usize]) -> Result<Vec<usize>> {
    require_trusted(ball, seed)?;
    let dist = ball.distances();
    let g = ball.graph();
    let mut set: BTreeSet<usize> = seed.iter().copied().collect();
    loop {
        let before = set.len();
        let members: Vec<usize> = set.iter().copied().collect();
        for (i, &a) in members.iter().enumerate() {
            for &b in &members[i + 1..] {
                set.extend(dist.interval(a, b));
            }
        }
        let members: Vec<usize> = set.iter().copied().collect();
        for &a in &members {
            for &b in g.neighbours(a) {
                if a < b && set.contains(&b) {
                    set.extend(g.common_neighbours(a, b));
                }
            }
        }
        for c in cycles {
            let n = c.len();
            let corner = (0..n).any(|i| {
                set.contains(&c.vertices[i])
                    && set.contains(&c.vertices[(i + 1) % n])
                    && set.contains(&c.vertices[(i + 2) % n])
            });
            if corner {
                set.extend(c.vertices.iter().copied());
            }
        }
        if let Some(&y) = set.iter().find(|&&y| !ball.is_trusted(y)) {
            let _ = y;
            return Err(Error::HullEscapes);
        }
        if set.len() == before {
            break;
        }
    }
    let hull: Vec<usize> = set.into_iter().collect();
    if !is_gated(ball, &hull)? {
        return Err(Error::Inconsistent("locally gated closure is not gated".into()));
    }
    Ok(hull)
}

fn separating(ball: &CayleyBall, hyps: &Hyperplanes, a: usize, b: usize) -> BTreeSet<usize> {
    hyps.geodesic_planes(ball, a, b).into_iter().collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProjectionReport {
    /// Hyperplanes between `x` and its projection all separate `x` from `Y`.
    pub separation: AxiomResult,
    /// Hyperplanes between projections are those between the points that
    /// cross `Y`.
    pub crossing: AxiomResult,
}

impl ProjectionReport {
    pub fn passed(&self) -> bool {
        self.separation.passed() && self.crossing.passed()
    }
}

/// Checks the two projection properties for a gated `ys` over all trusted
/// vertices.
pub fn projection_checks(ball: &CayleyBall, hyps: &Hyperplanes, ys: &[usize]) -> Result<ProjectionReport> {
    require_trusted(ball, ys)?;
    let dist = ball.distances();
    let xs = ball.trusted_vertices();
    let mut proj = HashMap::new();
    for &x in &xs {
        let p = gate_in(dist, x, ys).ok_or_else(|| Error::Inconsistent(format!("vertex {x} has no gate")))?;
        proj.insert(x, p);
    }
    let inside: HashSet<usize> = ys.iter().copied().collect();
    let mut crossing_y = BTreeSet::new();
    for &a in ys {
        for &b in ball.graph().neighbours(a) {
            if inside.contains(&b) {
                crossing_y.insert(hyps.plane_of_edge(a, b).expect("edge"));
            }
        }
    }
    let sep = par::map(&xs, |&x| {
        let mut t = Tally::default();
        let between = separating(ball, hyps, x, proj[&x]);
        let to_all: Vec<BTreeSet<usize>> = ys.iter().map(|&y| separating(ball, hyps, x, y)).collect();
        for j in between {
            if to_all.iter().all(|s| s.contains(&j)) {
                t.checked += 1;
            } else {
                t.fail(vec![x, proj[&x], j]);
            }
        }
        t
    })
    .into_iter()
    .fold(Tally::default(), Tally::merge);
    let cross = par::map(&xs, |&x| {
        let mut t = Tally::default();
        for &y in &xs {
            if y <= x {
                continue;
            }
            let lhs = separating(ball, hyps, proj[&x], proj[&y]);
            let rhs: BTreeSet<usize> = separating(ball, hyps, x, y).intersection(&crossing_y).copied().collect();
            if lhs == rhs {
                t.checked += 1;
            } else {
                t.fail(vec![x, y]);
            }
        }
        t
    })
    .into_iter()
    .fold(Tally::default(), Tally::merge);
    Ok(ProjectionReport {
        separation: AxiomResult::from_tally("projection-separation", sep),
        crossing: AxiomResult::from_tally("projection-crossing", cross),
    })
}

/// For trusted pairs, the distance equals the number of hyperplanes on a
/// geodesic and no hyperplane is crossed twice.
pub fn check_distance_formula(ball: &CayleyBall, hyps: &Hyperplanes) -> AxiomResult {
    let xs = ball.trusted_vertices();
    let t = par::map(&xs, |&x| {
        let mut t = Tally::default();
        for &y in &xs {
            if y <= x {
                continue;
            }
            let planes = hyps.geodesic_planes(ball, x, y);
            let back = hyps.geodesic_planes(ball, y, x);
            let set: BTreeSet<usize> = planes.iter().copied().collect();
            let back_set: BTreeSet<usize> = back.into_iter().collect();
            if set.len() == planes.len() && set == back_set {
                t.checked += 1;
            } else {
                t.fail(vec![x, y]);
            }
        }
        t
    })
    .into_iter()
    .fold(Tally::default(), Tally::merge);
    AxiomResult::from_tally("distance-formula", t)
}

/// Ball vertices of the parabolic subgroup `<xi>`, checked to be gated for
/// every vertex within half the trust radius.
pub fn parabolic_subgraph(ball: &CayleyBall, xi: &[usize]) -> Result<Vec<usize>> {
    let all = ball.parabolic_vertices(xi);
    let ys: Vec<usize> = all.iter().copied().filter(|&y| ball.is_trusted(y)).collect();
    let reach = if ball.is_complete() {
        ball.radius() as i64
    } else {
        ball.trust_radius() / 2
    };
    let xs: Vec<usize> = (0..ball.len()).filter(|&x| ball.depth(x) as i64 <= reach).collect();
    if !gated_for(ball.distances(), &xs, &ys) {
        return Err(Error::Inconsistent(format!("parabolic subgraph {xi:?} is not gated")));
    }
    Ok(all)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn fixtures_are_mediangle() {
        for (spec, r) in [(fixtures::f1(), 3), (fixtures::f2(), 2), (fixtures::f3(), 5), (fixtures::f4(), 8)] {
            let b = CayleyBall::from_spec(spec, r).unwrap();
            let report = check_mediangle(&b);
            assert!(report.passed(), "{report}");
        }
    }

    #[test]
    fn k4_minus_fails_with_witness() {
        let g = Graph::from_edges(4, [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)]);
        let r = check_quasi_median(&g);
        let a = r.get("no-induced-k4-minus").unwrap();
        assert_eq!(a.status, AxiomStatus::Fail { witness: vec![1, 2, 0, 3] });
    }

    #[test]
    fn quasi_median_small_graphs() {
        let prism = CayleyBall::from_spec(fixtures::f2(), 2).unwrap();
        assert!(check_quasi_median(prism.graph()).passed());
        let hexagon = CayleyBall::from_spec(fixtures::f1(), 3).unwrap();
        let r = check_quasi_median(hexagon.graph());
        assert!(!r.get("quadrangle-condition").unwrap().passed());
        assert!(r.get("triangle-condition").unwrap().passed());
        let k3 = Graph::from_edges(3, [(0, 1), (1, 2), (0, 2)]);
        assert!(check_quasi_median(&k3).passed());
        let k32 = Graph::from_edges(5, [(0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4)]);
        assert!(!check_quasi_median(&k32).get("no-induced-k32").unwrap().passed());
    }

    #[test]
    fn gates_and_hulls() {
        let b = CayleyBall::from_spec(fixtures::f2(), 2).unwrap();
        let cliques = b.cliques();
        let triangle = cliques.iter().find(|c| c.len() == 3 && c.contains(&0)).unwrap().clone();
        let other = cliques.iter().find(|c| c.len() == 3 && !c.contains(&0)).unwrap().clone();
        assert!(is_gated(&b, &triangle).unwrap());
        assert_eq!(gate(&b, 0, &triangle).unwrap(), Some(0));
        // the corner across the square edge
        let g = gate(&b, 0, &other).unwrap().unwrap();
        assert_eq!(b.distances().get(0, g), 1);

        let hyps = Hyperplanes::compute(&b);
        let square = &hyps.cycles[0].vertices;
        let hull = gated_hull(&b, &hyps.cycles, square).unwrap();
        assert_eq!(hull.len(), 6);
        assert_eq!(gated_hull(&b, &hyps.cycles, &hull).unwrap(), hull);
        assert!(projection_checks(&b, &hyps, &triangle).unwrap().passed());

        let h = CayleyBall::from_spec(fixtures::f1(), 3).unwrap();
        let hh = Hyperplanes::compute(&h);
        let x = h.graph().neighbours(0)[0];
        let y = h.graph().neighbours(0)[1];
        let hull = gated_hull(&h, &hh.cycles, &[x, 0, y]).unwrap();
        assert_eq!(hull.len(), 6);
        assert!(projection_checks(&h, &hh, &[0, x]).unwrap().passed());
    }

    #[test]
    fn parabolics() {
        let b = CayleyBall::from_spec(fixtures::f4(), 8).unwrap();
        let delta = parabolic_subgraph(&b, &[1, 2]).unwrap();
        assert_eq!(delta.len(), 6);
        let (g, _) = b.graph().induced(&delta);
        assert!((0..6).all(|v| g.degree(v) == 2) && g.is_connected());
        assert_eq!(parabolic_subgraph(&b, &[]).unwrap(), vec![0]);
        let h = Hyperplanes::compute(&b);
        assert!(check_distance_formula(&b, &h).passed());
    }
}
