//! Radius-R balls in the Cayley graph with respect to the union of the
//! vertex groups.
//!
//! Three nested radii matter:
//!
//! * `radius`: every element of word length at most `radius` is present;
//! * `cycle_radius`: even cycles inside it can be tested for convexity
//!   exactly, since every interval between two of their vertices stays in
//!   the ball;
//! * `trust_radius`: distances, intervals and sectors restricted to it
//!   agree with the infinite graph; a geodesic between two vertices of
//!   depth at most `trust_radius + 1` never leaves the ball.
//!
//! A ball that contains the whole (finite) group is `complete` and all three
//! radii equal `radius`.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{DistanceMatrix, Graph};
use crate::par;
use crate::presentation::PeriagroupSpec;
use crate::word::{Letter, Periagroup, Word};

/// Label of a directed edge `x -> x * letter`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct EdgeLabel {
    pub vertex: usize,
    pub element: usize,
}

impl From<Letter> for EdgeLabel {
    fn from(l: Letter) -> Self {
        Self {
            vertex: l.vertex(),
            element: l.element(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CayleyBall {
    group: Periagroup,
    radius: usize,
    complete: bool,
    trust_radius: i64,
    cycle_radius: i64,
    elements: Vec<Word>,
    index: HashMap<Word, usize>,
    depth: Vec<usize>,
    graph: Graph,
    labels: HashMap<(usize, usize), Letter>,
    dist: DistanceMatrix,
}

impl CayleyBall {
    /// Breadth-first construction from the identity, identifying vertices by
    /// their normal forms.
    pub fn build(group: Periagroup, radius: usize) -> Result<Self> {
        assert!(radius >= 1, "radius must be positive");
        let letters = group.letters();
        let mut elements = vec![Word::identity()];
        let mut index = HashMap::from([(Word::identity(), 0usize)]);
        let mut depth = vec![0usize];
        let mut labels = HashMap::new();
        let mut edges = Vec::new();
        let mut layer = vec![0usize];
        let mut complete = true;

        for d in 0..=radius {
            let images: Vec<Result<Vec<Word>, _>> = par::map(&layer, |&x| {
                letters
                    .iter()
                    .map(|&s| group.normalize(&elements[x].concat(&Word::letter(s))))
                    .collect()
            });
            let mut next = Vec::new();
            for (&x, imgs) in layer.iter().zip(images) {
                for (&s, y) in letters.iter().zip(imgs?) {
                    let y = match index.get(&y) {
                        Some(&y) => y,
                        None if d < radius => {
                            let id = elements.len();
                            index.insert(y.clone(), id);
                            elements.push(y);
                            depth.push(d + 1);
                            next.push(id);
                            id
                        }
                        None => {
                            complete = false;
                            continue;
                        }
                    };
                    labels.insert((x, y), s);
                    if x < y {
                        edges.push((x, y));
                    } else {
                        edges.push((y, x));
                    }
                }
            }
            layer = next;
            if layer.is_empty() {
                break;
            }
        }
        let graph = Graph::from_edges(elements.len(), edges);
        let dist = graph.distance_matrix();
        let max_label = group.spec().max_label() as i64;
        let r = radius as i64;
        let (trust_radius, cycle_radius) = if complete {
            (r, r)
        } else {
            ((r - 2 * max_label).min((r - 1).div_euclid(2)), r - (max_label + 1) / 2)
        };
        Ok(Self {
            group,
            radius,
            complete,
            trust_radius,
            cycle_radius,
            elements,
            index,
            depth,
            graph,
            labels,
            dist,
        })
    }

    pub fn from_spec(spec: PeriagroupSpec, radius: usize) -> Result<Self> {
        Self::build(Periagroup::new(spec), radius)
    }

    /// Smallest ball whose trust radius is at least `trust`.
    pub fn with_trust_radius(group: Periagroup, trust: usize) -> Result<Self> {
        let m = group.spec().max_label() as usize;
        let radius = (trust + 2 * m).max(2 * trust + 1);
        Self::build(group, radius)
    }

    pub fn group(&self) -> &Periagroup {
        &self.group
    }

    pub fn spec(&self) -> &PeriagroupSpec {
        self.group.spec()
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn trust_radius(&self) -> i64 {
        self.trust_radius
    }

    pub fn cycle_radius(&self) -> i64 {
        self.cycle_radius
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn distances(&self) -> &DistanceMatrix {
        &self.dist
    }

    pub fn element(&self, x: usize) -> &Word {
        &self.elements[x]
    }

    pub fn elements(&self) -> &[Word] {
        &self.elements
    }

    pub fn depth(&self, x: usize) -> usize {
        self.depth[x]
    }

    pub fn index_of(&self, w: &Word) -> Option<usize> {
        self.index.get(w).copied()
    }

    /// Vertex of an arbitrary (not necessarily reduced) word, if in the ball.
    pub fn locate(&self, w: &Word) -> Result<Option<usize>> {
        Ok(self.index_of(&self.group.normalize(w)?))
    }

    pub fn is_trusted(&self, x: usize) -> bool {
        (self.depth[x] as i64) <= self.trust_radius
    }

    pub fn in_cycle_region(&self, x: usize) -> bool {
        (self.depth[x] as i64) <= self.cycle_radius
    }

    pub fn trusted_vertices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&x| self.is_trusted(x)).collect()
    }

    /// The letter `s` with `y = x * s`.
    pub fn edge_label(&self, x: usize, y: usize) -> Option<EdgeLabel> {
        self.labels.get(&(x, y)).map(|&l| l.into())
    }

    pub fn edge_letter(&self, x: usize, y: usize) -> Option<Letter> {
        self.labels.get(&(x, y)).copied()
    }

    fn check_trust(&self, x: usize) -> Result<()> {
        if self.is_trusted(x) {
            Ok(())
        } else {
            Err(Error::Untrusted(x))
        }
    }

    pub fn distance(&self, x: usize, y: usize) -> Result<usize> {
        self.check_trust(x)?;
        self.check_trust(y)?;
        Ok(self.dist.get(x, y) as usize)
    }

    pub fn interval(&self, x: usize, y: usize) -> Result<Vec<usize>> {
        self.check_trust(x)?;
        self.check_trust(y)?;
        Ok(self.dist.interval(x, y))
    }

    /// Left action `g * x`.
    pub fn act(&self, g: &Word, x: usize) -> Result<usize> {
        self.locate(&g.concat(&self.elements[x]))?.ok_or(Error::OutsideBall)
    }

    /// Left action of the ball element `g`.
    pub fn act_by(&self, g: usize, x: usize) -> Result<usize> {
        self.act(&self.elements[g].clone(), x)
    }

    /// Endpoint of the path from `x` spelling `w`, if it stays in the ball.
    pub fn walk(&self, x: usize, w: &Word) -> Option<usize> {
        let mut y = x;
        for &l in w.letters() {
            y = self
                .graph
                .neighbours(y)
                .iter()
                .copied()
                .find(|&z| self.labels.get(&(y, z)) == Some(&l))?;
        }
        Some(y)
    }

    /// Maximal cliques lying entirely in the ball: the cosets `x G_u`.
    pub fn cliques(&self) -> Vec<Vec<usize>> {
        let spec = self.spec();
        let mut found: BTreeMap<Vec<usize>, ()> = BTreeMap::new();
        for x in 0..self.len() {
            for u in 0..spec.vertex_count() {
                let mut members = vec![x];
                members.extend(
                    self.graph
                        .neighbours(x)
                        .iter()
                        .copied()
                        .filter(|&y| self.labels.get(&(x, y)).is_some_and(|l| l.vertex() == u)),
                );
                if members.len() == spec.group(u).order() {
                    members.sort_unstable();
                    found.insert(members, ());
                }
            }
        }
        found.into_keys().collect()
    }

    /// Clique `x G_u` through the edge `(x, y)`, if complete in the ball.
    pub fn clique_of_edge(&self, x: usize, y: usize) -> Option<Vec<usize>> {
        let u = self.edge_letter(x, y)?.vertex();
        let mut members = vec![x];
        members.extend(
            self.graph
                .neighbours(x)
                .iter()
                .copied()
                .filter(|&z| self.labels.get(&(x, z)).is_some_and(|l| l.vertex() == u)),
        );
        members.sort_unstable();
        (members.len() == self.spec().group(u).order()).then_some(members)
    }

    /// Ball vertices whose normal forms only use letters from `subset`.
    pub fn parabolic_vertices(&self, subset: &[usize]) -> Vec<usize> {
        (0..self.len())
            .filter(|&x| self.elements[x].letters().iter().all(|l| subset.contains(&l.vertex())))
            .collect()
    }

    pub fn to_dot(&self) -> String {
        let palette = ["red", "blue", "darkgreen", "orange", "purple", "brown", "magenta", "cyan"];
        let spec = self.spec();
        let mut out = String::from("graph cayley_ball {\n  node [shape=point];\n");
        for (x, w) in self.elements.iter().enumerate() {
            let _ = writeln!(out, "  n{x} [label=\"{}\", xlabel=\"{}\"];", w.display(spec), w.display(spec));
        }
        for (a, b) in self.graph.edges() {
            let l = self.labels[&(a, b)];
            let _ = writeln!(
                out,
                "  n{a} -- n{b} [color={}];",
                palette[l.vertex() % palette.len()]
            );
        }
        out.push_str("}\n");
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let spec = self.spec();
        serde_json::json!({
            "radius": self.radius,
            "complete": self.complete,
            "trust_radius": self.trust_radius,
            "vertices": self.elements.iter().enumerate().map(|(x, w)| serde_json::json!({
                "id": x,
                "word": w.display(spec).to_string(),
                "distance": self.depth[x],
            })).collect::<Vec<_>>(),
            "edges": self.graph.edges().into_iter().map(|(a, b)| {
                let f = self.labels[&(a, b)];
                let r = self.labels[&(b, a)];
                serde_json::json!({
                    "source": a,
                    "target": b,
                    "vertex": spec.vertex_name(f.vertex()),
                    "forward": f.element,
                    "backward": r.element,
                })
            }).collect::<Vec<_>>(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn dihedral_ball_is_hexagon() {
        let b = CayleyBall::from_spec(fixtures::f1(), 3).unwrap();
        assert_eq!(b.len(), 6);
        assert!(b.is_complete());
        assert_eq!(b.graph().edge_count(), 6);
        assert!((0..6).all(|x| b.graph().degree(x) == 2));
        let far = (0..6).find(|&x| b.depth(x) == 3).unwrap();
        assert_eq!(b.distance(0, far).unwrap(), 3);
        assert_eq!(b.interval(0, far).unwrap().len(), 6);
        assert_eq!(b.cliques().len(), 6);
    }

    #[test]
    fn prism() {
        let b = CayleyBall::from_spec(fixtures::f2(), 2).unwrap();
        assert_eq!(b.len(), 6);
        assert_eq!(b.graph().edge_count(), 9);
        let d = b.distances();
        let opposite: Vec<_> = (0..6).filter(|&x| d.get(0, x) == 2).collect();
        assert_eq!(opposite.len(), 2);
        for &x in &opposite {
            assert_eq!(b.interval(0, x).unwrap().len(), 4);
        }
        let y = b.graph().neighbours(0)[0];
        assert_eq!(b.interval(0, y).unwrap(), vec![0, y]);
        let mut sizes: Vec<usize> = b.cliques().iter().map(Vec::len).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![2, 2, 2, 3, 3]);
    }

    #[test]
    fn free_product_ball_and_trust() {
        let b = CayleyBall::from_spec(fixtures::f3(), 2).unwrap();
        assert!(!b.is_complete());
        assert_eq!(b.len(), 13);
        assert!(b.trust_radius() < 0);
        assert!(matches!(b.distance(0, 1), Err(Error::Untrusted(_))));
        // u<v>, u^2<v>, v<u>, v^2<u> plus the two cliques at the identity
        assert_eq!(b.cliques().len(), 6);
    }

    #[test]
    fn action() {
        let b = CayleyBall::from_spec(fixtures::f1(), 3).unwrap();
        let g = b.group();
        for x in 0..b.len() {
            assert_eq!(b.act(&Word::identity(), x).unwrap(), x);
        }
        let a = Word::parse("u:1", g.spec()).unwrap();
        let bv = b.index_of(&Word::parse("v:1", g.spec()).unwrap()).unwrap();
        let ab = b.index_of(&Word::parse("u:1.v:1", g.spec()).unwrap()).unwrap();
        assert_eq!(b.act(&a, bv).unwrap(), ab);
        let f3 = CayleyBall::from_spec(fixtures::f3(), 2).unwrap();
        let far = (0..f3.len()).find(|&x| f3.depth(x) == 2).unwrap();
        assert!(matches!(f3.act(f3.element(far), far), Err(Error::OutsideBall)));
    }

    #[test]
    fn exports() {
        let b = CayleyBall::from_spec(fixtures::f2(), 2).unwrap();
        assert!(b.to_dot().contains("--"));
        assert_eq!(b.to_json()["edges"].as_array().unwrap().len(), 9);
    }
}
