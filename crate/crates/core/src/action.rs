//! Conspiciality of the action on the Cayley graph: the obstruction sets
//! Obs and CoxObs, the splitting into rotations and a Coxeter part, and a
//! search for a subgroup of the Coxeter part avoiding CoxObs.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use serde::Serialize;

use crate::cayley::CayleyBall;
use crate::error::{Error, Result};
use crate::hyperplanes::{Hyperplanes, Relation};
use crate::par;
use crate::presentation::VertexType;
use crate::verify::parabolic_subgraph;
use crate::word::{Letter, Periagroup, Word};

/// Bound on the number of elements enumerated for the Coxeter part.
pub const COXETER_CAP: usize = 5_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Clause {
    /// `J` and `gJ` are transverse.
    SelfTransverse,
    /// `J` and `gJ` are tangent.
    SelfTangent,
    /// `J, H` transverse but `gJ, H` tangent.
    TransverseToTangent,
    /// `J, H` tangent but `gJ, H` transverse.
    TangentToTransverse,
    /// `g` stabilises `J` and permutes its sectors non-trivially with a
    /// fixed sector.
    NonFreeSectors,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub element: Word,
    pub clause: Clause,
    /// `[J, gJ]` or `[J, H, gJ]` (hyperplane or subgraph ids).
    pub witness: Vec<usize>,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct ObstructionSet {
    /// First violation found for each obstructing element, in element order.
    pub members: Vec<Violation>,
    pub per_clause: BTreeMap<String, usize>,
    pub tested: usize,
    /// Tests that could not be decided inside the ball.
    pub undetermined: usize,
}

impl ObstructionSet {
    pub fn elements(&self) -> Vec<Word> {
        self.members.iter().map(|v| v.element.clone()).collect()
    }

    pub fn contains(&self, g: &Word) -> bool {
        self.members.iter().any(|v| &v.element == g)
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    fn from_parts(parts: Vec<(Vec<Violation>, usize, usize)>) -> Self {
        let mut out = ObstructionSet::default();
        for (violations, tested, undetermined) in parts {
            out.tested += tested;
            out.undetermined += undetermined;
            for v in &violations {
                *out.per_clause.entry(format!("{:?}", v.clause)).or_default() += 1;
            }
            if let Some(first) = violations.into_iter().next() {
                out.members.push(first);
            }
        }
        out.members.sort_by(|a, b| a.element.cmp(&b.element));
        out
    }
}

/// Hyperplanes tested for obstructions: the determined ones.
pub fn probe_planes(ball: &CayleyBall, hyps: &Hyperplanes) -> Vec<usize> {
    (0..hyps.len()).filter(|&j| hyps.is_determined(ball, j)).collect()
}

/// Tests the conspiciality clauses for every element against every probe
/// hyperplane (and pair of probe hyperplanes). Pairs whose relation the
/// ball cannot decide are counted as undetermined.
pub fn compute_obs(ball: &CayleyBall, hyps: &Hyperplanes, elements: &[Word]) -> Result<ObstructionSet> {
    let probes = probe_planes(ball, hyps);
    let mut pairs = Vec::new();
    for (i, &j) in probes.iter().enumerate() {
        for &h in &probes[i + 1..] {
            match hyps.relation_determined(ball, j, h) {
                Some(Relation::Transverse) => pairs.push((j, h, Relation::Transverse)),
                Some(Relation::Tangent) => pairs.push((j, h, Relation::Tangent)),
                _ => {}
            }
        }
    }
    let parts = par::map(elements, |g| -> Result<(Vec<Violation>, usize, usize)> {
        let mut violations = Vec::new();
        let (mut tested, mut undetermined) = (0, 0);
        if g.is_empty() {
            return Ok((violations, tested, undetermined));
        }
        let mut image = HashMap::new();
        for &j in &probes {
            image.insert(j, hyps.translate(ball, g, j)?);
        }
        for &j in &probes {
            tested += 1;
            let Some(gj) = image[&j] else {
                undetermined += 1;
                continue;
            };
            if gj == j {
                match hyps.sector_permutation(ball, g, j)? {
                    Some(perm) => {
                        let moved = perm.iter().enumerate().any(|(i, &p)| i != p);
                        let fixed = perm.iter().enumerate().any(|(i, &p)| i == p);
                        if moved && fixed {
                            violations.push(Violation {
                                element: g.clone(),
                                clause: Clause::NonFreeSectors,
                                witness: vec![j, gj],
                            });
                        }
                    }
                    None => undetermined += 1,
                }
                continue;
            }
            match hyps.relation_determined(ball, j, gj) {
                Some(Relation::Transverse) => violations.push(Violation {
                    element: g.clone(),
                    clause: Clause::SelfTransverse,
                    witness: vec![j, gj],
                }),
                Some(Relation::Tangent) => violations.push(Violation {
                    element: g.clone(),
                    clause: Clause::SelfTangent,
                    witness: vec![j, gj],
                }),
                Some(_) => {}
                None => undetermined += 1,
            }
        }
        for &(j, h, rel) in &pairs {
            for (a, b) in [(j, h), (h, j)] {
                tested += 1;
                let Some(ga) = image[&a] else {
                    undetermined += 1;
                    continue;
                };
                let Some(now) = hyps.relation_determined(ball, ga, b) else {
                    undetermined += 1;
                    continue;
                };
                let clause = match (rel, now) {
                    (Relation::Transverse, Relation::Tangent) => Clause::TransverseToTangent,
                    (Relation::Tangent, Relation::Transverse) => Clause::TangentToTransverse,
                    _ => continue,
                };
                violations.push(Violation {
                    element: g.clone(),
                    clause,
                    witness: vec![a, b, ga],
                });
            }
        }
        Ok((violations, tested, undetermined))
    });
    Ok(ObstructionSet::from_parts(parts.into_iter().collect::<Result<_>>()?))
}

/// Non-identity elements of the trusted ball.
pub fn trusted_elements(ball: &CayleyBall) -> Vec<Word> {
    ball.trusted_vertices()
        .into_iter()
        .filter(|&x| x != 0)
        .map(|x| ball.element(x).clone())
        .collect()
}

/// The Coxeter group `C(Psi)` as a complete Cayley graph, with the map from
/// its vertex indices to those of the defining graph.
#[derive(Debug, Clone)]
pub struct CoxeterPart {
    pub ball: CayleyBall,
    pub to_gamma: Vec<usize>,
}

impl CoxeterPart {
    /// Ball vertex of a word written in letters of `Psi`.
    pub fn vertex_of(&self, w: &Word) -> Result<Option<usize>> {
        let back: HashMap<usize, usize> = self.to_gamma.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut letters = Vec::with_capacity(w.len());
        for l in w.letters() {
            match back.get(&l.vertex()) {
                Some(&v) => letters.push(Letter::new(v, l.element())),
                None => return Ok(None),
            }
        }
        self.ball.locate(&Word(letters))
    }

    /// The element of vertex `x` rewritten in letters of the defining graph.
    pub fn word_in_gamma(&self, x: usize) -> Word {
        Word(
            self.ball
                .element(x)
                .letters()
                .iter()
                .map(|l| Letter::new(self.to_gamma[l.vertex()], l.element()))
                .collect(),
        )
    }

    pub fn order(&self) -> usize {
        self.ball.len()
    }

    pub fn multiply(&self, a: usize, b: usize) -> usize {
        self.ball.act_by(a, b).expect("complete group")
    }
}

#[derive(Debug, Clone)]
pub struct Decomposition {
    /// Type C vertices of the defining graph.
    pub psi: Vec<usize>,
    /// Ball vertices of `<Psi>`.
    pub delta: Vec<usize>,
    /// Hyperplanes with an edge leaving `Delta` from a trusted vertex.
    pub peripheral: Vec<usize>,
    /// Labels of the peripheral hyperplanes.
    pub peripheral_labels: Vec<usize>,
    /// Non-trivial rotative stabiliser elements of peripheral hyperplanes.
    pub rot_generators: Vec<Word>,
    /// `None` when `C(Psi)` is infinite (or larger than the cap).
    pub coxeter: Option<CoxeterPart>,
    /// Peripheral carriers meeting `Delta` in a parabolic coset.
    pub carrier_checks: usize,
    pub carrier_failures: Vec<usize>,
    rotations: HashMap<usize, Vec<Word>>,
}

impl Decomposition {
    pub fn in_delta(&self, x: usize) -> bool {
        self.delta.binary_search(&x).is_ok()
    }

    /// Rotations moving a trusted vertex into `Delta`: repeatedly picks the
    /// peripheral hyperplane leaving `Delta` at the gate towards `x` and the
    /// rotation about it that brings `x` to the side of `Delta`. Returns the
    /// product `R` of rotations and the vertex `R x`, or `None` when the
    /// orbit leaves the trusted region.
    pub fn descend(&self, ball: &CayleyBall, hyps: &Hyperplanes, x: usize) -> Result<Option<(Word, usize)>> {
        let group = ball.group();
        let dist = ball.distances();
        let mut rot = Word::identity();
        let mut y = x;
        for _ in 0..=ball.len() {
            if self.in_delta(y) {
                return Ok(Some((rot, y)));
            }
            if !ball.is_trusted(y) {
                return Ok(None);
            }
            let trusted_delta: Vec<usize> = self.delta.iter().copied().filter(|&d| ball.is_trusted(d)).collect();
            let Some(&p) = trusted_delta.iter().min_by_key(|&&d| (dist.get(y, d), d)) else {
                return Ok(None);
            };
            let Some(next) = ball
                .graph()
                .neighbours(p)
                .iter()
                .copied()
                .find(|&w| dist.get(w, y) + 1 == dist.get(p, y))
            else {
                return Ok(None);
            };
            let k = hyps.plane_of_edge(p, next).expect("edge");
            let rotations = match self.rotations.get(&k) {
                Some(r) => r.clone(),
                None => hyps.rotative_stabiliser(ball, k)?,
            };
            let target = hyps.planes[k].sector_of[p];
            let mut moved = None;
            for h in rotations.iter().filter(|h| !h.is_empty()) {
                if let Some(z) = ball.locate(&h.concat(ball.element(y)))? {
                    if hyps.planes[k].sector_of[z] == target && ball.is_trusted(z) {
                        moved = Some((h.clone(), z));
                        break;
                    }
                }
            }
            let Some((h, z)) = moved else {
                return Ok(None);
            };
            rot = group.multiply(&h, &rot)?;
            y = z;
        }
        Err(Error::Inconsistent("descent to Delta does not terminate".into()))
    }
}

/// Splits off the type C vertices: `Psi`, `Delta`, its peripheral
/// hyperplanes and their rotative stabilisers, and `C(Psi)` when finite.
pub fn decompose(ball: &CayleyBall, hyps: &Hyperplanes) -> Result<Decomposition> {
    let spec = ball.spec();
    let psi = spec.coxeter_vertices();
    let mut delta = parabolic_subgraph(ball, &psi)?;
    delta.sort_unstable();
    let in_delta: HashSet<usize> = delta.iter().copied().collect();

    let mut peripheral = BTreeSet::new();
    for &x in delta.iter().filter(|&&x| ball.is_trusted(x)) {
        for &y in ball.graph().neighbours(x) {
            if !in_delta.contains(&y) {
                peripheral.insert(hyps.plane_of_edge(x, y).expect("edge"));
            }
        }
    }
    let peripheral: Vec<usize> = peripheral.into_iter().collect();
    let types = spec.classify_vertices();
    let mut peripheral_labels = Vec::new();
    for &j in &peripheral {
        let plane = &hyps.planes[j];
        if plane.kind != VertexType::GP {
            return Err(Error::Inconsistent(format!("peripheral hyperplane {j} is of type C")));
        }
        peripheral_labels.push(plane.label.expect("GP hyperplanes are labelled"));
    }

    // carrier of a peripheral hyperplane labelled u meets Delta in
    // x <type C neighbours of u>
    let mut carrier_checks = 0;
    let mut carrier_failures = Vec::new();
    for (&j, &u) in peripheral.iter().zip(&peripheral_labels) {
        let meet: BTreeSet<usize> = hyps.planes[j]
            .carrier
            .iter()
            .copied()
            .filter(|&x| in_delta.contains(&x) && ball.is_trusted(x))
            .collect();
        let Some(&x) = meet.iter().next() else { continue };
        let link: Vec<usize> = spec
            .neighbours(u)
            .filter(|&w| types[w] == VertexType::C)
            .collect();
        let coset: BTreeSet<usize> = ball
            .parabolic_vertices(&link)
            .into_iter()
            .filter_map(|y| ball.locate(&ball.element(x).concat(ball.element(y))).ok().flatten())
            .filter(|&y| ball.is_trusted(y))
            .collect();
        carrier_checks += 1;
        if meet != coset {
            carrier_failures.push(j);
        }
    }

    let mut rotations = HashMap::new();
    let mut rot_generators = BTreeSet::new();
    for &j in &peripheral {
        if !hyps.planes[j].certified {
            continue;
        }
        let r = hyps.rotative_stabiliser(ball, j)?;
        rot_generators.extend(r.iter().filter(|w| !w.is_empty()).cloned());
        rotations.insert(j, r);
    }

    let coxeter = {
        let (sub, map) = spec.induced(&psi)?;
        let group = Periagroup::with_cap(sub, ball.group().cap());
        let enumeration = group.enumerate_group(COXETER_CAP);
        if enumeration.complete {
            let cball = CayleyBall::build(group, enumeration.order().unwrap_or(1).max(1))?;
            Some(CoxeterPart { ball: cball, to_gamma: map })
        } else {
            None
        }
    };

    Ok(Decomposition {
        psi,
        delta,
        peripheral,
        peripheral_labels,
        rot_generators: rot_generators.into_iter().collect(),
        coxeter,
        carrier_checks,
        carrier_failures,
        rotations,
    })
}

/// A member of the relative family in the Cayley graph of `C(Psi)`: a
/// hyperplane or a coset of a standard parabolic subgroup.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Subgraph {
    pub vertices: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
    /// Hyperplane id, for hyperplanes.
    pub hyperplane: Option<usize>,
}

/// Hyperplanes and parabolic cosets of a complete Coxeter Cayley graph.
pub fn relative_family(ball: &CayleyBall, hyps: &Hyperplanes) -> Vec<Subgraph> {
    let mut family = BTreeSet::new();
    for plane in &hyps.planes {
        let edges: Vec<(usize, usize)> = plane.edges.iter().map(|&e| hyps.edges[e]).collect();
        family.insert(Subgraph {
            vertices: plane.vertices(hyps),
            edges,
            hyperplane: Some(plane.id),
        });
    }
    let n = ball.spec().vertex_count();
    for mask in 0..1usize << n {
        let subset: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
        let base = ball.parabolic_vertices(&subset);
        let mut seen = HashSet::new();
        for x in 0..ball.len() {
            let mut coset: Vec<usize> = base.iter().map(|&b| ball.act_by(x, b).expect("complete")).collect();
            coset.sort_unstable();
            if !seen.insert(coset.clone()) {
                continue;
            }
            let edges = induced_edges(ball, &coset);
            family.insert(Subgraph {
                vertices: coset,
                edges,
                hyperplane: None,
            });
        }
    }
    family.into_iter().collect()
}

fn induced_edges(ball: &CayleyBall, vertices: &[usize]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for &a in vertices {
        for &b in ball.graph().neighbours(a) {
            if a < b && vertices.binary_search(&b).is_ok() {
                out.push((a, b));
            }
        }
    }
    out
}

/// Relation between subgraphs: transverse when a convex even cycle has two
/// distinct pairs of opposite edges in each; separated when a hyperplane
/// (other than either) has them in distinct sectors; tangent otherwise.
pub fn subgraph_relation(hyps: &Hyperplanes, a: &Subgraph, b: &Subgraph) -> Relation {
    if a == b {
        return Relation::Equal;
    }
    let ea: HashSet<(usize, usize)> = a.edges.iter().copied().collect();
    let eb: HashSet<(usize, usize)> = b.edges.iter().copied().collect();
    for c in &hyps.cycles {
        let n = c.len() / 2;
        let pa: Vec<usize> = (0..n).filter(|&i| ea.contains(&c.edge(i)) && ea.contains(&c.edge(i + n))).collect();
        let pb: Vec<usize> = (0..n).filter(|&i| eb.contains(&c.edge(i)) && eb.contains(&c.edge(i + n))).collect();
        if pa.iter().any(|&i| pb.iter().any(|&j| i != j)) {
            return Relation::Transverse;
        }
    }
    let separated = hyps.planes.iter().any(|k| {
        if Some(k.id) == a.hyperplane || Some(k.id) == b.hyperplane {
            return false;
        }
        let sa: HashSet<u32> = a.vertices.iter().map(|&x| k.sector_of[x]).collect();
        let sb: HashSet<u32> = b.vertices.iter().map(|&x| k.sector_of[x]).collect();
        sa.len() == 1 && sb.len() == 1 && sa != sb
    });
    if separated {
        Relation::Separated
    } else {
        Relation::Tangent
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CoxObs {
    /// Vertices of the Coxeter Cayley graph in CoxObs, with a witness.
    pub members: Vec<(usize, Clause, Vec<usize>)>,
    pub family_size: usize,
}

impl CoxObs {
    pub fn contains(&self, x: usize) -> bool {
        self.members.iter().any(|m| m.0 == x)
    }

    pub fn vertices(&self) -> Vec<usize> {
        self.members.iter().map(|m| m.0).collect()
    }
}

/// The obstruction to `C(Psi)` acting conspicially on its Cayley graph
/// relative to hyperplanes and parabolic cosets.
pub fn compute_coxobs(dec: &Decomposition) -> Result<CoxObs> {
    let cox = dec
        .coxeter
        .as_ref()
        .ok_or_else(|| Error::Unsupported("C(Psi) is infinite or exceeds the enumeration cap".into()))?;
    let ball = &cox.ball;
    let hyps = Hyperplanes::compute(ball);
    let family = relative_family(ball, &hyps);
    let index: HashMap<&Subgraph, usize> = family.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let rel: Vec<Vec<Relation>> = par::map(&family, |a| family.iter().map(|b| subgraph_relation(&hyps, a, b)).collect());

    let translate = |g: usize, s: &Subgraph| -> usize {
        let act = |x: usize| ball.act_by(g, x).expect("complete");
        let mut vertices: Vec<usize> = s.vertices.iter().map(|&x| act(x)).collect();
        vertices.sort_unstable();
        let mut edges: Vec<(usize, usize)> = s
            .edges
            .iter()
            .map(|&(x, y)| {
                let (a, b) = (act(x), act(y));
                (a.min(b), a.max(b))
            })
            .collect();
        edges.sort_unstable();
        let hyperplane = s.hyperplane.map(|_| hyps.plane_of_edge(edges[0].0, edges[0].1).expect("edge"));
        index[&Subgraph {
            vertices,
            edges,
            hyperplane,
        }]
    };

    let mut members = Vec::new();
    for g in 1..ball.len() {
        let image: Vec<usize> = family.iter().map(|s| translate(g, s)).collect();
        let mut found = None;
        for p in 0..family.len() {
            let gp = image[p];
            if gp != p && matches!(rel[p][gp], Relation::Transverse | Relation::Tangent) {
                let clause = if rel[p][gp] == Relation::Transverse {
                    Clause::SelfTransverse
                } else {
                    Clause::SelfTangent
                };
                found = Some((clause, vec![p, gp]));
                break;
            }
        }
        if found.is_none() {
            'pairs: for p in 0..family.len() {
                for q in 0..family.len() {
                    let clause = match (rel[p][q], rel[image[p]][q]) {
                        (Relation::Transverse, Relation::Tangent) => Clause::TransverseToTangent,
                        (Relation::Tangent, Relation::Transverse) => Clause::TangentToTransverse,
                        _ => continue,
                    };
                    found = Some((clause, vec![p, q, image[p]]));
                    break 'pairs;
                }
            }
        }
        if let Some((clause, witness)) = found {
            members.push((g, clause, witness));
        }
    }
    Ok(CoxObs {
        members,
        family_size: family.len(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct InclusionReport {
    pub factored: usize,
    /// Obs elements whose Coxeter component is outside CoxObs.
    pub failures: Vec<Word>,
    pub undetermined: usize,
}

impl InclusionReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Factors every Obs element as a product of rotations and a Coxeter
/// element, and checks the Coxeter element is in CoxObs.
pub fn check_obstruction_inclusion(
    ball: &CayleyBall,
    hyps: &Hyperplanes,
    dec: &Decomposition,
    obs: &ObstructionSet,
    coxobs: &CoxObs,
) -> Result<InclusionReport> {
    let cox = dec
        .coxeter
        .as_ref()
        .ok_or_else(|| Error::Unsupported("C(Psi) is infinite or exceeds the enumeration cap".into()))?;
    let mut report = InclusionReport {
        factored: 0,
        failures: Vec::new(),
        undetermined: 0,
    };
    for g in obs.elements() {
        let Some(x) = ball.locate(&g)? else {
            report.undetermined += 1;
            continue;
        };
        let Some((_, c)) = dec.descend(ball, hyps, x)? else {
            report.undetermined += 1;
            continue;
        };
        let Some(cv) = cox.vertex_of(ball.element(c))? else {
            return Err(Error::Inconsistent("Delta vertex outside C(Psi)".into()));
        };
        if coxobs.contains(cv) {
            report.factored += 1;
        } else {
            report.failures.push(g);
        }
    }
    Ok(report)
}

/// Every trusted vertex is moved into `Delta` by rotations. Returns the
/// number of vertices reached and the undetermined ones.
pub fn check_fundamental_domain(ball: &CayleyBall, hyps: &Hyperplanes, dec: &Decomposition) -> Result<(usize, Vec<usize>)> {
    let xs = ball.trusted_vertices();
    let results = par::map(&xs, |&x| dec.descend(ball, hyps, x));
    let mut ok = 0;
    let mut open = Vec::new();
    for (&x, r) in xs.iter().zip(results) {
        match r? {
            Some(_) => ok += 1,
            None => open.push(x),
        }
    }
    Ok((ok, open))
}

/// Subgroups of the finite group, as sorted vertex lists.
pub fn subgroups(cox: &CoxeterPart) -> Vec<Vec<usize>> {
    let n = cox.order();
    let close = |gens: &BTreeSet<usize>| -> BTreeSet<usize> {
        let mut set: BTreeSet<usize> = BTreeSet::from([0]);
        let mut frontier = vec![0];
        while let Some(x) = frontier.pop() {
            for &g in gens {
                let y = cox.multiply(x, g);
                if set.insert(y) {
                    frontier.push(y);
                }
            }
        }
        set
    };
    let mut found: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut queue = vec![BTreeSet::from([0usize])];
    found.insert(vec![0]);
    while let Some(h) = queue.pop() {
        for x in 0..n {
            if h.contains(&x) {
                continue;
            }
            let mut gens = h.clone();
            gens.insert(x);
            let closed = close(&gens);
            let key: Vec<usize> = closed.iter().copied().collect();
            if found.insert(key) {
                queue.push(closed);
            }
        }
    }
    found.into_iter().collect()
}

/// A largest subgroup of `C(Psi)` disjoint from CoxObs; ties are broken by
/// the least element list.
pub fn find_conspicial_subgroup(dec: &Decomposition, coxobs: &CoxObs) -> Result<Vec<usize>> {
    let cox = dec
        .coxeter
        .as_ref()
        .ok_or_else(|| Error::Unsupported("C(Psi) is infinite or exceeds the enumeration cap".into()))?;
    let bad: HashSet<usize> = coxobs.vertices().into_iter().collect();
    let best = subgroups(cox)
        .into_iter()
        .filter(|h| h.iter().all(|x| !bad.contains(x)))
        .max_by(|a, b| a.len().cmp(&b.len()).then_with(|| b.cmp(a)))
        .unwrap_or_else(|| vec![0]);
    Ok(best)
}

/// Elements of `Rot . H` among the given ones: those whose image under the
/// retraction onto `<Psi>` lies in `H`.
pub fn restrict_to_subgroup(ball: &CayleyBall, dec: &Decomposition, h: &[usize], elements: &[Word]) -> Result<Vec<Word>> {
    let cox = dec
        .coxeter
        .as_ref()
        .ok_or_else(|| Error::Unsupported("C(Psi) is infinite or exceeds the enumeration cap".into()))?;
    let group = ball.group();
    let mut out = Vec::new();
    for g in elements {
        let c = group.retract(g, &dec.psi)?;
        let cv = cox.vertex_of(&c)?.ok_or_else(|| Error::Inconsistent("retraction outside C(Psi)".into()))?;
        if h.contains(&cv) {
            out.push(g.clone());
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct ActionReport {
    pub psi: Vec<String>,
    pub delta_size: usize,
    pub peripheral: Vec<usize>,
    pub peripheral_labels: Vec<String>,
    pub rot_generators: Vec<String>,
    pub coxeter_order: Option<usize>,
    pub obs: ObstructionSetSummary,
    pub coxobs: Option<Vec<String>>,
    pub inclusion: Option<InclusionReport>,
    pub subgroup: Option<Vec<String>>,
    pub restricted_obs: Option<ObstructionSetSummary>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ObstructionSetSummary {
    pub members: Vec<(String, Clause, Vec<usize>)>,
    pub per_clause: BTreeMap<String, usize>,
    pub tested: usize,
    pub undetermined: usize,
}

impl ObstructionSetSummary {
    pub fn new(obs: &ObstructionSet, ball: &CayleyBall) -> Self {
        Self {
            members: obs
                .members
                .iter()
                .map(|v| (v.element.display(ball.spec()).to_string(), v.clause, v.witness.clone()))
                .collect(),
            per_clause: obs.per_clause.clone(),
            tested: obs.tested,
            undetermined: obs.undetermined,
        }
    }
}

/// Runs the whole analysis; the Coxeter steps are skipped when `C(Psi)` is
/// infinite.
pub fn analyse(ball: &CayleyBall, hyps: &Hyperplanes) -> Result<ActionReport> {
    let spec = ball.spec();
    let dec = decompose(ball, hyps)?;
    let elements = trusted_elements(ball);
    let obs = compute_obs(ball, hyps, &elements)?;
    let show = |w: &Word| w.display(spec).to_string();
    let mut report = ActionReport {
        psi: dec.psi.iter().map(|&v| spec.vertex_name(v).to_string()).collect(),
        delta_size: dec.delta.len(),
        peripheral: dec.peripheral.clone(),
        peripheral_labels: dec.peripheral_labels.iter().map(|&v| spec.vertex_name(v).to_string()).collect(),
        rot_generators: dec.rot_generators.iter().map(show).collect(),
        coxeter_order: dec.coxeter.as_ref().map(CoxeterPart::order),
        obs: ObstructionSetSummary::new(&obs, ball),
        coxobs: None,
        inclusion: None,
        subgroup: None,
        restricted_obs: None,
    };
    if let Some(cox) = &dec.coxeter {
        let coxobs = compute_coxobs(&dec)?;
        report.coxobs = Some(coxobs.vertices().into_iter().map(|x| show(&cox.word_in_gamma(x))).collect());
        report.inclusion = Some(check_obstruction_inclusion(ball, hyps, &dec, &obs, &coxobs)?);
        let h = find_conspicial_subgroup(&dec, &coxobs)?;
        report.subgroup = Some(h.iter().map(|&x| show(&cox.word_in_gamma(x))).collect());
        let restricted = restrict_to_subgroup(ball, &dec, &h, &elements)?;
        let robs = compute_obs(ball, hyps, &restricted)?;
        report.restricted_obs = Some(ObstructionSetSummary::new(&robs, ball));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn setup(spec: crate::PeriagroupSpec, trust: usize) -> (CayleyBall, Hyperplanes) {
        let b = CayleyBall::with_trust_radius(Periagroup::new(spec), trust).unwrap();
        let h = Hyperplanes::compute(&b);
        (b, h)
    }

    #[test]
    fn graph_products_are_conspicial() {
        let b = CayleyBall::from_spec(fixtures::f2(), 2).unwrap();
        let h = Hyperplanes::compute(&b);
        let obs = compute_obs(&b, &h, &trusted_elements(&b)).unwrap();
        assert!(obs.is_empty(), "{obs:?}");
        assert_eq!(obs.undetermined, 0);
        let (b, h) = setup(fixtures::f3(), 4);
        let obs = compute_obs(&b, &h, &trusted_elements(&b)).unwrap();
        assert!(obs.is_empty(), "{obs:?}");
    }

    #[test]
    fn dihedral_obstruction() {
        let b = CayleyBall::from_spec(fixtures::f1(), 3).unwrap();
        let h = Hyperplanes::compute(&b);
        let obs = compute_obs(&b, &h, &trusted_elements(&b)).unwrap();
        assert!(!obs.is_empty());
        assert!(!obs.contains(&Word::identity()));
        for v in &obs.members {
            assert!(matches!(v.clause, Clause::SelfTransverse | Clause::SelfTangent | Clause::TransverseToTangent));
            // re-check the witness
            let (j, gj) = (v.witness[0], *v.witness.last().unwrap());
            assert_eq!(h.translate(&b, &v.element, j).unwrap(), Some(gj));
        }
    }

    #[test]
    fn f4_decomposition() {
        let (b, h) = setup(fixtures::f4(), 4);
        let dec = decompose(&b, &h).unwrap();
        assert_eq!(dec.psi, vec![1, 2]);
        assert_eq!(dec.delta.len(), 6);
        assert_eq!(dec.peripheral.len(), 3);
        assert!(dec.peripheral_labels.iter().all(|&u| u == 0));
        assert_eq!(dec.rot_generators.len(), 6);
        assert!(dec.carrier_failures.is_empty() && dec.carrier_checks == 3);
        assert_eq!(dec.coxeter.as_ref().unwrap().order(), 6);
        let (ok, open) = check_fundamental_domain(&b, &h, &dec).unwrap();
        assert!(open.is_empty());
        assert_eq!(ok, b.trusted_vertices().len());
    }

    #[test]
    fn trivial_and_full_coxeter_parts() {
        let b = CayleyBall::from_spec(fixtures::f2(), 2).unwrap();
        let h = Hyperplanes::compute(&b);
        let dec = decompose(&b, &h).unwrap();
        assert!(dec.psi.is_empty());
        assert_eq!(dec.delta, vec![0]);
        let coxobs = compute_coxobs(&dec).unwrap();
        assert!(coxobs.members.is_empty());
        assert_eq!(find_conspicial_subgroup(&dec, &coxobs).unwrap(), vec![0]);

        let b = CayleyBall::from_spec(fixtures::f1(), 3).unwrap();
        let h = Hyperplanes::compute(&b);
        let dec = decompose(&b, &h).unwrap();
        assert_eq!(dec.delta.len(), 6);
        assert!(dec.rot_generators.is_empty());
        let cox = dec.coxeter.as_ref().unwrap();
        assert_eq!(subgroups(cox).len(), 6);
        let coxobs = compute_coxobs(&dec).unwrap();
        // inverse closed
        for x in coxobs.vertices() {
            let inv = (0..cox.order()).find(|&y| cox.multiply(x, y) == 0).unwrap();
            assert!(coxobs.contains(inv));
        }
    }
}
