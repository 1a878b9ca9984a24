//! Brute-force oracles shared by the integration tests. Nothing here calls
//! into the normal-form engine or the hyperplane code.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use periagroup::Word;

/// Faithful models of the two finite fixtures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    /// `S3` with `u = (0 1)`, `v = (1 2)`.
    Dihedral,
    /// `Z/2 x Z/3` with `u` the first factor, `v` the second.
    Prism,
}

pub type Elem = [u8; 3];

impl Model {
    pub fn identity(self) -> Elem {
        match self {
            Model::Dihedral => [0, 1, 2],
            Model::Prism => [0, 0, 0],
        }
    }

    pub fn generator(self, vertex: usize, element: usize) -> Elem {
        match (self, vertex) {
            (Model::Dihedral, 0) => [1, 0, 2],
            (Model::Dihedral, _) => [0, 2, 1],
            (Model::Prism, 0) => [(element % 2) as u8, 0, 0],
            (Model::Prism, _) => [0, (element % 3) as u8, 0],
        }
    }

    /// `a` then `b`.
    pub fn mul(self, a: Elem, b: Elem) -> Elem {
        match self {
            Model::Dihedral => [b[a[0] as usize], b[a[1] as usize], b[a[2] as usize]],
            Model::Prism => [(a[0] + b[0]) % 2, (a[1] + b[1]) % 3, 0],
        }
    }

    pub fn eval(self, w: &Word) -> Elem {
        w.letters()
            .iter()
            .fold(self.identity(), |acc, l| self.mul(acc, self.generator(l.vertex(), l.element())))
    }

    /// Non-trivial generator letters `(vertex, element)`.
    pub fn letters(self) -> Vec<(usize, usize)> {
        match self {
            Model::Dihedral => vec![(0, 1), (1, 1)],
            Model::Prism => vec![(0, 1), (1, 1), (1, 2)],
        }
    }

    /// Cayley graph on all elements, vertex 0 the identity.
    pub fn cayley(self) -> (Vec<Elem>, Vec<Vec<usize>>) {
        let mut index = HashMap::from([(self.identity(), 0)]);
        let mut elems = vec![self.identity()];
        let mut queue = VecDeque::from([0]);
        let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new()];
        while let Some(x) = queue.pop_front() {
            for (v, e) in self.letters() {
                let y = self.mul(elems[x], self.generator(v, e));
                let k = *index.entry(y).or_insert_with(|| {
                    elems.push(y);
                    adj.push(BTreeSet::new());
                    queue.push_back(elems.len() - 1);
                    elems.len() - 1
                });
                if k != x {
                    adj[x].insert(k);
                    adj[k].insert(x);
                }
            }
        }
        (elems, adj.into_iter().map(|s| s.into_iter().collect()).collect())
    }
}

pub fn bfs(adj: &[Vec<usize>], s: usize) -> Vec<usize> {
    let mut d = vec![usize::MAX; adj.len()];
    d[s] = 0;
    let mut q = VecDeque::from([s]);
    while let Some(x) = q.pop_front() {
        for &y in &adj[x] {
            if d[y] == usize::MAX {
                d[y] = d[x] + 1;
                q.push_back(y);
            }
        }
    }
    d
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let next = parent[y];
        parent[y] = r;
        y = next;
    }
    r
}

/// Hyperplanes found by exhaustive search: edges are glued along triangles
/// and across opposite sides of isometric even cycles of length at most
/// `max_cycle`.
#[derive(Debug)]
pub struct OracleHyperplanes {
    pub edges: Vec<(usize, usize)>,
    /// Edge index sets, one per hyperplane, sorted.
    pub classes: Vec<Vec<usize>>,
    pub cycles: Vec<Vec<usize>>,
    pub triangles: Vec<[usize; 3]>,
}

impl OracleHyperplanes {
    pub fn compute(adj: &[Vec<usize>], max_cycle: usize) -> Self {
        let n = adj.len();
        let mut edges = Vec::new();
        let mut edge_id = HashMap::new();
        for a in 0..n {
            for &b in &adj[a] {
                if a < b {
                    edge_id.insert((a, b), edges.len());
                    edges.push((a, b));
                }
            }
        }
        let id = |a: usize, b: usize| edge_id[&(a.min(b), a.max(b))];
        let dist: Vec<Vec<usize>> = (0..n).map(|s| bfs(adj, s)).collect();
        let mut parent: Vec<usize> = (0..edges.len()).collect();
        let union = |p: &mut Vec<usize>, a: usize, b: usize| {
            let (ra, rb) = (find(p, a), find(p, b));
            p[ra] = rb;
        };

        let mut triangles = Vec::new();
        for a in 0..n {
            for &b in adj[a].iter().filter(|&&b| b > a) {
                for &c in adj[b].iter().filter(|&&c| c > b) {
                    if adj[a].contains(&c) {
                        triangles.push([a, b, c]);
                        union(&mut parent, id(a, b), id(b, c));
                        union(&mut parent, id(a, b), id(a, c));
                    }
                }
            }
        }

        let mut cycles = Vec::new();
        for s in 0..n {
            let mut path = vec![s];
            extend(adj, &dist, s, &mut path, max_cycle, &mut cycles);
        }
        for c in &cycles {
            let k = c.len();
            for i in 0..k / 2 {
                let e1 = id(c[i], c[(i + 1) % k]);
                let e2 = id(c[i + k / 2], c[(i + k / 2 + 1) % k]);
                union(&mut parent, e1, e2);
            }
        }

        let mut by_root: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for e in 0..edges.len() {
            by_root.entry(find(&mut parent, e)).or_default().push(e);
        }
        Self {
            edges,
            classes: by_root.into_values().collect(),
            cycles,
            triangles,
        }
    }

    /// Components of the graph with the class's edges removed.
    pub fn sectors(&self, adj: &[Vec<usize>], class: usize) -> Vec<usize> {
        let removed: BTreeSet<(usize, usize)> = self.classes[class].iter().map(|&e| self.edges[e]).collect();
        let mut comp = vec![usize::MAX; adj.len()];
        let mut next = 0;
        for s in 0..adj.len() {
            if comp[s] != usize::MAX {
                continue;
            }
            comp[s] = next;
            let mut q = VecDeque::from([s]);
            while let Some(x) = q.pop_front() {
                for &y in &adj[x] {
                    if comp[y] == usize::MAX && !removed.contains(&(x.min(y), x.max(y))) {
                        comp[y] = next;
                        q.push_back(y);
                    }
                }
            }
            next += 1;
        }
        comp
    }

    pub fn sector_count(&self, adj: &[Vec<usize>], class: usize) -> usize {
        self.sectors(adj, class).into_iter().collect::<BTreeSet<_>>().len()
    }

    pub fn class_of(&self, a: usize, b: usize) -> Option<usize> {
        let e = self.edges.iter().position(|&x| x == (a.min(b), a.max(b)))?;
        self.classes.iter().position(|c| c.contains(&e))
    }

    fn endpoints(&self, class: usize) -> BTreeSet<usize> {
        self.classes[class]
            .iter()
            .flat_map(|&e| [self.edges[e].0, self.edges[e].1])
            .collect()
    }

    /// Two classes cross a common isometric even cycle.
    pub fn transverse(&self, p: usize, q: usize) -> bool {
        p != q
            && self.cycles.iter().any(|c| {
                let k = c.len();
                let on = |class: usize| (0..k).any(|i| self.class_of(c[i], c[(i + 1) % k]) == Some(class));
                on(p) && on(q)
            })
    }

    /// Not transverse and no third class has them in distinct sectors.
    pub fn tangent(&self, adj: &[Vec<usize>], p: usize, q: usize) -> bool {
        if p == q || self.transverse(p, q) {
            return false;
        }
        let (ep, eq) = (self.endpoints(p), self.endpoints(q));
        !(0..self.classes.len()).filter(|&k| k != p && k != q).any(|k| {
            let s = self.sectors(adj, k);
            let sp: BTreeSet<_> = ep.iter().map(|&x| s[x]).collect();
            let sq: BTreeSet<_> = eq.iter().map(|&x| s[x]).collect();
            sp.len() == 1 && sq.len() == 1 && sp != sq
        })
    }
}

/// Grows simple paths from `s` through vertices above `s`, recording
/// chordless isometric cycles once per orientation class.
fn extend(adj: &[Vec<usize>], dist: &[Vec<usize>], s: usize, path: &mut Vec<usize>, max: usize, out: &mut Vec<Vec<usize>>) {
    let last = *path.last().unwrap();
    for &y in &adj[last] {
        if y == s && path.len() >= 4 && path.len() % 2 == 0 && path[1] < path[path.len() - 1] {
            let k = path.len();
            let isometric = (0..k).all(|i| (0..k).all(|j| {
                let along = (i as isize - j as isize).unsigned_abs();
                dist[path[i]][path[j]] == along.min(k - along)
            }));
            if isometric {
                out.push(path.clone());
            }
        } else if y > s && !path.contains(&y) && path.len() < max {
            path.push(y);
            extend(adj, dist, s, path, max, out);
            path.pop();
        }
    }
}
