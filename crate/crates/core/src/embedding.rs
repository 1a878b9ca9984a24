//! The graph product receiving a conspicial subgroup `Pi-`: one vertex per
//! orbit of hyperplanes, edges between orbits with transverse translates,
//! and vertex groups `S(J_i) + K_i` in bijection with the sectors of `J_i`.
//!
//! An element is sent to the word read along a geodesic from the identity:
//! every crossed hyperplane is carried back to its orbit representative and
//! the crossing becomes the ratio of the two sectors it joins.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use serde::Serialize;

use crate::action::{CoxeterPart, Decomposition};
use crate::cayley::CayleyBall;
use crate::error::{Error, Result};
use crate::hyperplanes::Hyperplanes;
use crate::par;
use crate::presentation::{FiniteGroupTable, PeriagroupSpec, VertexType};
use crate::word::{Letter, Word};

/// The subgroup `Rot . H`, tested through the retraction onto `<Psi>`.
#[derive(Debug, Clone)]
pub struct PiMinus {
    pub psi: Vec<usize>,
    pub coxeter: CoxeterPart,
    /// Vertices of the Coxeter Cayley graph in `H`.
    pub h: Vec<usize>,
}

impl PiMinus {
    pub fn new(dec: &Decomposition, h: Vec<usize>) -> Result<Self> {
        let coxeter = dec
            .coxeter
            .clone()
            .ok_or_else(|| Error::Unsupported("C(Psi) is infinite or exceeds the enumeration cap".into()))?;
        Ok(Self {
            psi: dec.psi.clone(),
            coxeter,
            h,
        })
    }

    /// Vertex of the Coxeter part of `g`.
    pub fn coxeter_component(&self, ball: &CayleyBall, g: &Word) -> Result<usize> {
        let c = ball.group().retract(g, &self.psi)?;
        self.coxeter
            .vertex_of(&c)?
            .ok_or_else(|| Error::Inconsistent("retraction outside C(Psi)".into()))
    }

    pub fn contains(&self, ball: &CayleyBall, g: &Word) -> Result<bool> {
        Ok(self.h.contains(&self.coxeter_component(ball, g)?))
    }

    /// Least element of the coset `H c`.
    pub fn coset_rep(&self, c: usize) -> usize {
        self.h.iter().map(|&h| self.coxeter.multiply(h, c)).min().expect("H contains e")
    }

    pub fn coset_reps(&self) -> Vec<usize> {
        let reps: BTreeSet<usize> = (0..self.coxeter.order()).map(|c| self.coset_rep(c)).collect();
        reps.into_iter().collect()
    }

    pub fn index(&self) -> usize {
        self.coxeter.order() / self.h.len()
    }

    /// Trusted ball elements lying in the subgroup, identity first.
    pub fn trusted_elements(&self, ball: &CayleyBall) -> Result<Vec<Word>> {
        let mut out = Vec::new();
        for x in ball.trusted_vertices() {
            let g = ball.element(x);
            if self.contains(ball, g)? {
                out.push(g.clone());
            }
        }
        Ok(out)
    }
}

/// A vertex of the target: an orbit representative `J_i` with the group
/// `S(J_i) + Z/m`, `m` the number of `S(J_i)`-orbits of sectors.
#[derive(Debug, Clone, Serialize)]
pub struct VertexGroup {
    /// Hyperplane id of the representative in the ball.
    pub plane: usize,
    /// Defining-graph vertex whose hyperplane through the identity coset is
    /// translated to the representative.
    pub label: usize,
    pub kind: VertexType,
    /// Rotative stabiliser inside `Pi-`, identity first.
    pub rotative: Vec<Word>,
    pub sectors: usize,
    pub orbits: usize,
    /// `table[a][b]` is the product of elements `a = r * orbits + k`.
    pub table: Vec<Vec<usize>>,
    /// Element attached to each sector (indexed like the anchor clique).
    pub sigma: Vec<usize>,
    inverse: Vec<usize>,
}

impl VertexGroup {
    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    /// The element read when crossing from sector `s` to sector `t`.
    pub fn ratio(&self, s: usize, t: usize) -> usize {
        self.mul(self.inv(self.sigma[s]), self.sigma[t])
    }
}

/// Graph product `Phi H`.
#[derive(Debug, Clone, Serialize)]
pub struct GraphProductTarget {
    pub vertices: Vec<VertexGroup>,
    pub edges: Vec<(usize, usize)>,
    #[serde(skip)]
    adjacent: Vec<Vec<bool>>,
    /// `(coset representative vertex, defining vertex)` to the orbit
    /// representative and an element of `Pi-` carrying it there.
    #[serde(skip)]
    basic: HashMap<(usize, usize), (usize, Word)>,
    /// Pairs `(i, i)` with transverse translates: conspiciality failures.
    pub self_transverse: Vec<usize>,
}

/// One letter `(vertex of Phi, element of its group)`.
pub type GpLetter = (usize, usize);

/// Word in the graph product.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct CrossingWord(pub Vec<GpLetter>);

impl fmt::Display for CrossingWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "e");
        }
        let parts: Vec<String> = self.0.iter().map(|(i, a)| format!("J{i}:{a}")).collect();
        write!(f, "{}", parts.join("."))
    }
}

impl GraphProductTarget {
    pub fn commute(&self, i: usize, j: usize) -> bool {
        self.adjacent[i][j]
    }

    /// Reduced form: merges letters of one vertex separated only by
    /// commuting letters, drops identities, then takes the least shuffle.
    pub fn normal_form(&self, w: &CrossingWord) -> CrossingWord {
        let mut stack: Vec<GpLetter> = Vec::with_capacity(w.0.len());
        for &(i, a) in &w.0 {
            if a == 0 {
                continue;
            }
            let mut merged = false;
            for k in (0..stack.len()).rev() {
                let (j, b) = stack[k];
                if j == i {
                    let c = self.vertices[i].mul(b, a);
                    if c == 0 {
                        stack.remove(k);
                    } else {
                        stack[k].1 = c;
                    }
                    merged = true;
                    break;
                }
                if !self.commute(i, j) {
                    break;
                }
            }
            if !merged {
                stack.push((i, a));
            }
        }
        // least linear extension of the non-commutation order
        let n = stack.len();
        let mut used = vec![false; n];
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            let pick = (0..n)
                .filter(|&q| !used[q])
                .filter(|&q| (0..q).all(|p| used[p] || self.commute(stack[p].0, stack[q].0)))
                .min_by_key(|&q| stack[q])
                .expect("acyclic");
            used[pick] = true;
            out.push(stack[pick]);
        }
        CrossingWord(out)
    }

    pub fn multiply(&self, a: &CrossingWord, b: &CrossingWord) -> CrossingWord {
        let mut w = a.0.clone();
        w.extend_from_slice(&b.0);
        self.normal_form(&CrossingWord(w))
    }

    /// The target as a presentation: every label is 2.
    pub fn to_spec(&self) -> Result<PeriagroupSpec> {
        let vertices = self
            .vertices
            .iter()
            .enumerate()
            .map(|(i, v)| Ok((format!("J{i}"), FiniteGroupTable::from_table(v.table.clone())?)))
            .collect::<Result<Vec<_>>>()?;
        let edges = self.edges.iter().map(|&(a, b)| (a, b, 2)).collect();
        Ok(PeriagroupSpec::new(vertices, edges)?)
    }

    /// Letters read along the path of `w` from the identity. Every prefix
    /// must lie in the ball.
    pub fn read_word(&self, ball: &CayleyBall, pim: &PiMinus, hyps: &Hyperplanes, w: &Word) -> Result<CrossingWord> {
        let group = ball.group();
        let mut prefix = Word::identity();
        let mut out = Vec::with_capacity(w.len());
        for &l in w.letters() {
            let c = pim.coset_rep(pim.coxeter_component(ball, &prefix)?);
            let cv = ball
                .locate(&pim.coxeter.word_in_gamma(c))?
                .ok_or(Error::OutsideBall)?;
            let &(i, ref q) = self
                .basic
                .get(&(cv, l.vertex()))
                .ok_or_else(|| Error::Inconsistent("hyperplane without orbit representative".into()))?;
            let q_inv = group.inverse(q)?;
            let from = group.multiply(&q_inv, ball.element(cv))?;
            let to = group.multiply(&from, &Word::letter(l))?;
            let vg = &self.vertices[i];
            let plane = &hyps.planes[vg.plane];
            let sector = |x: &Word| -> Result<usize> {
                let v = ball.locate(x)?.ok_or(Error::OutsideBall)?;
                plane.gate_sector(v).ok_or(Error::OutsideBall)
            };
            let (s, t) = (sector(&from)?, sector(&to)?);
            if s == t {
                return Err(Error::Inconsistent("crossing edge stays in one sector".into()));
            }
            out.push((i, vg.ratio(s, t)));
            prefix = group.multiply(&prefix, &Word::letter(l))?;
        }
        Ok(CrossingWord(out))
    }

    /// Letters read along the shortlex geodesic to `g`.
    pub fn crossing_word(&self, ball: &CayleyBall, pim: &PiMinus, hyps: &Hyperplanes, g: &Word) -> Result<CrossingWord> {
        let x = ball.locate(g)?.ok_or(Error::OutsideBall)?;
        if !ball.is_trusted(x) {
            return Err(Error::Untrusted(x));
        }
        self.read_word(ball, pim, hyps, &ball.element(x).clone())
    }

    pub fn to_json(&self, ball: &CayleyBall) -> serde_json::Value {
        let spec = ball.spec();
        serde_json::json!({
            "vertices": self.vertices.iter().enumerate().map(|(i, v)| serde_json::json!({
                "name": format!("J{i}"),
                "hyperplane": v.plane,
                "label": spec.vertex_name(v.label),
                "type": v.kind,
                "rotative_stabiliser": v.rotative.iter().map(|w| w.display(spec).to_string()).collect::<Vec<_>>(),
                "sectors": v.sectors,
                "padding_order": v.orbits,
                "order": v.order(),
            })).collect::<Vec<_>>(),
            "edges": self.edges,
            "self_transverse": self.self_transverse,
        })
    }
}

fn plane_through(ball: &CayleyBall, hyps: &Hyperplanes, x: usize, u: usize) -> Result<usize> {
    let y = ball.act_by(x, ball.index_of(&Word::letter(Letter::new(u, 1))).ok_or(Error::OutsideBall)?);
    let y = y?;
    hyps.plane_of_edge(x, y).ok_or(Error::OutsideBall)
}

fn vertex_group(
    ball: &CayleyBall,
    hyps: &Hyperplanes,
    pim: &PiMinus,
    plane: usize,
    label: usize,
) -> Result<VertexGroup> {
    let p = &hyps.planes[plane];
    let n = p.anchor.len();
    let mut rotative = Vec::new();
    for r in hyps.rotative_stabiliser(ball, plane)? {
        if pim.contains(ball, &r)? {
            rotative.push(r);
        }
    }
    let mut perms = Vec::with_capacity(rotative.len());
    for r in &rotative {
        let mut perm = Vec::with_capacity(n);
        for &a in &p.anchor {
            let y = ball.locate(&r.concat(ball.element(a)))?.ok_or(Error::OutsideBall)?;
            perm.push(p.gate_sector(y).ok_or(Error::OutsideBall)?);
        }
        perms.push(perm);
    }
    for (k, perm) in perms.iter().enumerate().skip(1) {
        if perm.iter().enumerate().any(|(s, &t)| s == t) {
            return Err(Error::Inconsistent(format!(
                "rotative element {k} of hyperplane {plane} fixes a sector"
            )));
        }
    }
    let index_of_perm: HashMap<&Vec<usize>, usize> = perms.iter().enumerate().map(|(i, q)| (q, i)).collect();
    if index_of_perm.len() != perms.len() {
        return Err(Error::Inconsistent(format!("rotative stabiliser of {plane} is not faithful on sectors")));
    }
    let rn = perms.len();
    // sector orbits, each based at its least sector
    let mut orbit_of = vec![usize::MAX; n];
    let mut sigma = vec![0; n];
    let mut orbits = 0;
    for s in 0..n {
        if orbit_of[s] != usize::MAX {
            continue;
        }
        for perm in &perms {
            orbit_of[perm[s]] = orbits;
        }
        orbits += 1;
    }
    let m = orbits;
    let mut base = vec![usize::MAX; m];
    for s in 0..n {
        if base[orbit_of[s]] == usize::MAX {
            base[orbit_of[s]] = s;
        }
    }
    for (o, &b) in base.iter().enumerate() {
        for (a, perm) in perms.iter().enumerate() {
            sigma[perm[b]] = a * m + o;
        }
    }
    let compose = |a: usize, b: usize| -> usize {
        let q: Vec<usize> = (0..n).map(|s| perms[a][perms[b][s]]).collect();
        index_of_perm[&q]
    };
    let order = rn * m;
    let table: Vec<Vec<usize>> = (0..order)
        .map(|x| {
            (0..order)
                .map(|y| compose(x / m, y / m) * m + (x % m + y % m) % m)
                .collect()
        })
        .collect();
    let inverse = (0..order)
        .map(|x| (0..order).find(|&y| table[x][y] == 0).expect("group"))
        .collect();
    Ok(VertexGroup {
        plane,
        label,
        kind: p.kind,
        rotative,
        sectors: n,
        orbits: m,
        table,
        sigma,
        inverse,
    })
}

/// Orbit representatives of the hyperplanes through the coset
/// representatives of `Pi-`, identified by trusted elements of `Pi-`, with
/// edges between orbits having transverse translates.
pub fn build_target(ball: &CayleyBall, hyps: &Hyperplanes, pim: &PiMinus) -> Result<GraphProductTarget> {
    let n = ball.spec().vertex_count();
    let mut basic_planes = Vec::new();
    for c in pim.coset_reps() {
        let cv = ball
            .locate(&pim.coxeter.word_in_gamma(c))?
            .ok_or(Error::OutsideBall)?;
        for u in 0..n {
            basic_planes.push(((cv, u), plane_through(ball, hyps, cv, u)?));
        }
    }
    let elements = pim.trusted_elements(ball)?;
    let mut basic: HashMap<(usize, usize), (usize, Word)> = HashMap::new();
    let mut reps: Vec<(usize, usize)> = Vec::new();
    for &(key, plane) in &basic_planes {
        if basic.contains_key(&key) {
            continue;
        }
        let i = reps.len();
        reps.push((plane, key.1));
        basic.insert(key, (i, Word::identity()));
        let open: Vec<((usize, usize), usize)> = basic_planes
            .iter()
            .copied()
            .filter(|(k, _)| !basic.contains_key(k))
            .collect();
        if open.is_empty() {
            continue;
        }
        let images = par::map(&elements, |p| hyps.translate(ball, p, plane));
        for (p, image) in elements.iter().zip(images) {
            let Some(image) = image? else { continue };
            for &(k, q) in &open {
                if q == image && !basic.contains_key(&k) {
                    basic.insert(k, (i, p.clone()));
                }
            }
        }
    }

    let translates: Vec<Vec<usize>> = par::map(&reps, |&(plane, _)| {
        let mut out: Vec<usize> = elements
            .iter()
            .filter_map(|p| hyps.translate(ball, p, plane).ok().flatten())
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    });
    let k = reps.len();
    let mut adjacent = vec![vec![false; k]; k];
    let mut self_transverse = Vec::new();
    for i in 0..k {
        for j in i..k {
            let hit = translates[i]
                .iter()
                .any(|&a| translates[j].iter().any(|&b| hyps.transverse(a, b)));
            if hit && i == j {
                self_transverse.push(i);
            } else if hit {
                adjacent[i][j] = true;
                adjacent[j][i] = true;
            }
        }
    }
    let edges = (0..k)
        .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
        .filter(|&(i, j)| adjacent[i][j])
        .collect();
    let vertices = reps
        .iter()
        .map(|&(plane, label)| vertex_group(ball, hyps, pim, plane, label))
        .collect::<Result<Vec<_>>>()?;
    Ok(GraphProductTarget {
        vertices,
        edges,
        adjacent,
        basic,
        self_transverse,
    })
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct EmbeddingReport {
    pub samples: usize,
    pub pairs_checked: usize,
    /// Distinct elements with equal normal forms.
    pub collisions: Vec<(String, String)>,
    pub products_checked: usize,
    pub product_failures: Vec<(String, String)>,
    /// Crossing words whose length differs from the word length.
    pub length_failures: Vec<String>,
    pub undetermined: usize,
}

impl EmbeddingReport {
    pub fn passed(&self) -> bool {
        self.collisions.is_empty() && self.product_failures.is_empty() && self.length_failures.is_empty()
    }
}

/// Injectivity on all sample pairs and the homomorphism property on
/// sample pairs with trusted product (at most `max_products`, chosen with
/// `seed` when there are more).
pub fn verify_embedding(
    ball: &CayleyBall,
    hyps: &Hyperplanes,
    pim: &PiMinus,
    target: &GraphProductTarget,
    sample: &[Word],
    max_products: usize,
    seed: u64,
) -> Result<EmbeddingReport> {
    let spec = ball.spec();
    let show = |w: &Word| w.display(spec).to_string();
    let mut report = EmbeddingReport {
        samples: sample.len(),
        ..Default::default()
    };
    let words = par::map(sample, |g| target.crossing_word(ball, pim, hyps, g));
    let mut raw: Vec<(Word, CrossingWord)> = Vec::new();
    for (g, w) in sample.iter().zip(words) {
        match w {
            Ok(w) => raw.push((ball.group().normalize(g)?, w)),
            Err(Error::OutsideBall | Error::Untrusted(_)) => report.undetermined += 1,
            Err(e) => return Err(e),
        }
    }
    let mut seen: HashMap<CrossingWord, Word> = HashMap::new();
    let mut distinct = HashSet::new();
    for (g, w) in &raw {
        if !distinct.insert(g.clone()) {
            continue;
        }
        if w.0.len() != g.len() || w.0.iter().any(|&(_, a)| a == 0) {
            report.length_failures.push(show(g));
        }
        let nf = target.normal_form(w);
        if let Some(h) = seen.get(&nf) {
            report.collisions.push((show(h), show(g)));
        } else {
            seen.insert(nf, g.clone());
        }
    }
    let m = distinct.len();
    report.pairs_checked = m * m.saturating_sub(1) / 2;

    let mut pairs: Vec<(usize, usize)> = (0..raw.len()).flat_map(|a| (0..raw.len()).map(move |b| (a, b))).collect();
    if pairs.len() > max_products {
        pairs.shuffle(&mut StdRng::seed_from_u64(seed));
        pairs.truncate(max_products);
        pairs.sort_unstable();
    }
    let results = par::map(&pairs, |&(a, b)| -> Result<Option<bool>> {
        let product = ball.group().multiply(&raw[a].0, &raw[b].0)?;
        match target.crossing_word(ball, pim, hyps, &product) {
            Ok(w) => Ok(Some(target.normal_form(&w) == target.multiply(&raw[a].1, &raw[b].1))),
            Err(Error::OutsideBall | Error::Untrusted(_)) => Ok(None),
            Err(e) => Err(e),
        }
    });
    for (&(a, b), r) in pairs.iter().zip(results) {
        match r? {
            Some(true) => report.products_checked += 1,
            Some(false) => {
                report.products_checked += 1;
                report.product_failures.push((show(&raw[a].0), show(&raw[b].0)));
            }
            None => report.undetermined += 1,
        }
    }
    Ok(report)
}
