//! Words over the vertex groups, the rewriting moves of the presentation,
//! normal forms, and a coset-enumeration oracle for finite periagroups.

use std::cmp::Ordering;
use std::collections::{HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::presentation::PeriagroupSpec;

/// Default bound on the number of words explored while normalising.
pub const DEFAULT_WORD_CAP: usize = 200_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("move closure exceeded the cap of {cap} words")]
    CapExceeded { cap: usize },
    #[error("cannot parse word '{0}'")]
    Parse(String),
}

/// A non-identity element of one vertex group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Letter {
    pub vertex: u16,
    pub element: u16,
}

impl Letter {
    pub fn new(vertex: usize, element: usize) -> Self {
        debug_assert!(element != 0, "letters are non-identity elements");
        Self {
            vertex: vertex as u16,
            element: element as u16,
        }
    }

    pub fn vertex(self) -> usize {
        self.vertex as usize
    }

    pub fn element(self) -> usize {
        self.element as usize
    }
}

/// A possibly non-reduced word. Ordering is shortlex over `(vertex, element)`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn identity() -> Self {
        Self(Vec::new())
    }

    pub fn letter(l: Letter) -> Self {
        Self(vec![l])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// `vertex:element` letters joined by `.`, or `e` for the empty word.
    pub fn display<'a>(&'a self, spec: &'a PeriagroupSpec) -> WordDisplay<'a> {
        WordDisplay { word: self, spec }
    }

    pub fn parse(text: &str, spec: &PeriagroupSpec) -> Result<Word, WordError> {
        let text = text.trim();
        if text == "e" || text.is_empty() {
            return Ok(Word::identity());
        }
        let bad = || WordError::Parse(text.to_string());
        let mut letters = Vec::new();
        for part in text.split('.') {
            let (v, x) = part.split_once(':').ok_or_else(bad)?;
            let v = spec.vertex_index(v.trim()).ok_or_else(bad)?;
            let x: usize = x.trim().parse().map_err(|_| bad())?;
            if x == 0 || x >= spec.group(v).order() {
                return Err(bad());
            }
            letters.push(Letter::new(v, x));
        }
        Ok(Word(letters))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| self.0.cmp(&other.0))
    }
}

pub struct WordDisplay<'a> {
    word: &'a Word,
    spec: &'a PeriagroupSpec,
}

impl fmt::Display for WordDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_empty() {
            return f.write_str("e");
        }
        for (i, l) in self.word.0.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            write!(f, "{}:{}", self.spec.vertex_name(l.vertex()), l.element)?;
        }
        Ok(())
    }
}

/// The word problem solver for one periagroup.
#[derive(Debug, Clone)]
pub struct Periagroup {
    spec: PeriagroupSpec,
    cap: usize,
}

impl Periagroup {
    pub fn new(spec: PeriagroupSpec) -> Self {
        Self::with_cap(spec, DEFAULT_WORD_CAP)
    }

    pub fn with_cap(spec: PeriagroupSpec, cap: usize) -> Self {
        Self { spec, cap: cap.max(1) }
    }

    pub fn spec(&self) -> &PeriagroupSpec {
        &self.spec
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    /// All letters in canonical order.
    pub fn letters(&self) -> Vec<Letter> {
        (0..self.spec.vertex_count())
            .flat_map(|v| (1..self.spec.group(v).order()).map(move |x| Letter::new(v, x)))
            .collect()
    }

    pub fn inverse_letter(&self, l: Letter) -> Letter {
        Letter::new(l.vertex(), self.spec.group(l.vertex()).inv(l.element()))
    }

    /// Formal inverse; not normalised.
    pub fn inverse_word(&self, w: &Word) -> Word {
        Word(w.0.iter().rev().map(|&l| self.inverse_letter(l)).collect())
    }

    /// Every word reachable by one move: a merge inside a vertex group, a
    /// commutation across a label-2 edge, or a dihedral shuffle
    /// `<a,b>^k -> <b,a>^k` across a label-k edge with k > 2.
    pub fn apply_moves(&self, word: &Word) -> Vec<Word> {
        let mut out = self.merges(&word.0);
        self.same_length_moves(&word.0, |w| out.push(Word(w)));
        out
    }

    fn merges(&self, w: &[Letter]) -> Vec<Word> {
        let mut out = Vec::new();
        for i in 0..w.len().saturating_sub(1) {
            if w[i].vertex == w[i + 1].vertex {
                let g = self.spec.group(w[i].vertex());
                let p = g.mul(w[i].element(), w[i + 1].element());
                let mut v = Vec::with_capacity(w.len());
                v.extend_from_slice(&w[..i]);
                if p != 0 {
                    v.push(Letter::new(w[i].vertex(), p));
                }
                v.extend_from_slice(&w[i + 2..]);
                out.push(Word(v));
            }
        }
        out
    }

    fn same_length_moves(&self, w: &[Letter], mut emit: impl FnMut(Vec<Letter>)) {
        let n = w.len();
        for i in 0..n.saturating_sub(1) {
            let (a, b) = (w[i], w[i + 1]);
            if a.vertex == b.vertex {
                continue;
            }
            match self.spec.label(a.vertex(), b.vertex()) {
                Some(2) => {
                    let mut v = w.to_vec();
                    v.swap(i, i + 1);
                    emit(v);
                }
                Some(k) => {
                    let k = k as usize;
                    if i + k <= n && (0..k).all(|t| w[i + t] == if t % 2 == 0 { a } else { b }) {
                        let mut v = w.to_vec();
                        for t in 0..k {
                            v[i + t] = if t % 2 == 0 { b } else { a };
                        }
                        emit(v);
                    }
                }
                None => {}
            }
        }
    }

    /// Greedy left-to-right merging of adjacent letters from one vertex group.
    fn free_reduce(&self, w: &[Letter]) -> Vec<Letter> {
        let mut stack: Vec<Letter> = Vec::with_capacity(w.len());
        for &l in w {
            match stack.last() {
                Some(&top) if top.vertex == l.vertex => {
                    stack.pop();
                    let p = self.spec.group(l.vertex()).mul(top.element(), l.element());
                    if p != 0 {
                        stack.push(Letter::new(l.vertex(), p));
                    }
                }
                _ => stack.push(l),
            }
        }
        stack
    }

    fn has_merge(w: &[Letter]) -> Option<usize> {
        w.windows(2).position(|p| p[0].vertex == p[1].vertex)
    }

    /// Shortlex-least word of the element: explore the class under the
    /// length-preserving moves, shortening whenever a merge becomes
    /// available, and return the least word of the final class.
    pub fn normalize(&self, word: &Word) -> Result<Word, WordError> {
        let mut current = self.free_reduce(&word.0);
        'outer: loop {
            let mut seen: HashSet<Vec<Letter>> = HashSet::new();
            let mut queue = VecDeque::new();
            seen.insert(current.clone());
            queue.push_back(current.clone());
            while let Some(w) = queue.pop_front() {
                let mut next = Vec::new();
                self.same_length_moves(&w, |v| next.push(v));
                for v in next {
                    if seen.contains(&v) {
                        continue;
                    }
                    if Self::has_merge(&v).is_some() {
                        current = self.free_reduce(&v);
                        continue 'outer;
                    }
                    if seen.len() >= self.cap {
                        return Err(WordError::CapExceeded { cap: self.cap });
                    }
                    seen.insert(v.clone());
                    queue.push_back(v);
                }
            }
            let best = seen.into_iter().min().unwrap_or_default();
            return Ok(Word(best));
        }
    }

    pub fn equal(&self, a: &Word, b: &Word) -> Result<bool, WordError> {
        Ok(self.normalize(a)? == self.normalize(b)?)
    }

    /// Normal form of `a * b`.
    pub fn multiply(&self, a: &Word, b: &Word) -> Result<Word, WordError> {
        self.normalize(&a.concat(b))
    }

    /// Normal form of `a^-1`.
    pub fn inverse(&self, a: &Word) -> Result<Word, WordError> {
        self.normalize(&self.inverse_word(a))
    }

    /// Normal form of `a^-1 * b`; its length is the Cayley graph distance.
    pub fn quotient(&self, a: &Word, b: &Word) -> Result<Word, WordError> {
        self.normalize(&self.inverse_word(a).concat(b))
    }

    /// Word-metric distance between two elements.
    pub fn distance(&self, a: &Word, b: &Word) -> Result<usize, WordError> {
        Ok(self.quotient(a, b)?.len())
    }

    pub fn conjugate(&self, g: &Word, x: &Word) -> Result<Word, WordError> {
        self.normalize(&g.concat(x).concat(&self.inverse_word(g)))
    }

    pub fn power(&self, a: &Word, n: usize) -> Result<Word, WordError> {
        let mut acc = Word::identity();
        for _ in 0..n {
            acc = self.multiply(&acc, a)?;
        }
        Ok(acc)
    }

    pub fn commutator(&self, a: &Word, b: &Word) -> Result<Word, WordError> {
        let w = a.concat(b).concat(&self.inverse_word(a)).concat(&self.inverse_word(b));
        self.normalize(&w)
    }

    /// Image under the retraction killing every vertex group outside `keep`.
    pub fn retract(&self, w: &Word, keep: &[usize]) -> Result<Word, WordError> {
        let v = w.0.iter().copied().filter(|l| keep.contains(&l.vertex())).collect();
        self.normalize(&Word(v))
    }

    /// Coset enumeration over the full relator set.
    pub fn enumerate_group(&self, cap: usize) -> GroupEnumeration {
        enumerate_group(self, cap)
    }
}

/// Result of coset enumeration over the trivial subgroup.
#[derive(Debug, Clone)]
pub struct GroupEnumeration {
    /// Generators, in canonical letter order.
    pub letters: Vec<Letter>,
    /// Shortlex-least word of each element; element 0 is the identity.
    pub elements: Vec<Word>,
    /// `action[x][i]` is the element `x * letters[i]`.
    pub action: Vec<Vec<usize>>,
    pub complete: bool,
}

impl GroupEnumeration {
    pub fn order(&self) -> Option<usize> {
        self.complete.then_some(self.elements.len())
    }

    /// Traces a word through the table. `None` when incomplete data is hit.
    pub fn evaluate(&self, w: &Word) -> Option<usize> {
        let mut x = 0usize;
        for l in &w.0 {
            let i = self.letters.binary_search(l).ok()?;
            x = *self.action.get(x)?.get(i)?;
            if x == usize::MAX {
                return None;
            }
        }
        Some(x)
    }
}

const UNDEF: usize = usize::MAX;

struct CosetTable {
    rows: Vec<Vec<usize>>,
    parent: Vec<usize>,
    inv: Vec<usize>,
    live: usize,
}

impl CosetTable {
    fn new(inv: Vec<usize>) -> Self {
        Self {
            rows: vec![vec![UNDEF; inv.len()]],
            parent: vec![0],
            inv,
            live: 1,
        }
    }

    fn alive(&self, c: usize) -> bool {
        self.parent[c] == c
    }

    fn define(&mut self, c: usize, x: usize) {
        let d = self.rows.len();
        self.rows.push(vec![UNDEF; self.inv.len()]);
        self.parent.push(d);
        self.live += 1;
        self.rows[c][x] = d;
        self.rows[d][self.inv[x]] = c;
    }

    fn rep(&mut self, c: usize) -> usize {
        let mut r = c;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut x = c;
        while self.parent[x] != r {
            let next = self.parent[x];
            self.parent[x] = r;
            x = next;
        }
        r
    }

    fn merge(&mut self, a: usize, b: usize, queue: &mut Vec<usize>) {
        let (a, b) = (self.rep(a), self.rep(b));
        if a == b {
            return;
        }
        let (keep, kill) = (a.min(b), a.max(b));
        self.parent[kill] = keep;
        self.live -= 1;
        queue.push(kill);
    }

    fn coincidence(&mut self, a: usize, b: usize) {
        let mut queue = Vec::new();
        self.merge(a, b, &mut queue);
        let mut i = 0;
        while i < queue.len() {
            let e = queue[i];
            i += 1;
            for x in 0..self.inv.len() {
                let f = self.rows[e][x];
                if f == UNDEF {
                    continue;
                }
                let xi = self.inv[x];
                if self.rows[f][xi] == e {
                    self.rows[f][xi] = UNDEF;
                }
                let (e1, f1) = (self.rep(e), self.rep(f));
                if self.rows[e1][x] != UNDEF {
                    let t = self.rows[e1][x];
                    self.merge(f1, t, &mut queue);
                } else if self.rows[f1][xi] != UNDEF {
                    let t = self.rows[f1][xi];
                    self.merge(e1, t, &mut queue);
                } else {
                    self.rows[e1][x] = f1;
                    self.rows[f1][xi] = e1;
                }
            }
        }
    }

    fn scan_and_fill(&mut self, c: usize, rel: &[usize]) {
        let (mut f, mut b) = (c, c);
        let (mut i, mut j) = (0usize, rel.len() as isize - 1);
        loop {
            while (i as isize) <= j && self.rows[f][rel[i]] != UNDEF {
                f = self.rows[f][rel[i]];
                i += 1;
            }
            if (i as isize) > j {
                if f != b {
                    self.coincidence(f, b);
                }
                return;
            }
            while j >= i as isize && self.rows[b][self.inv[rel[j as usize]]] != UNDEF {
                b = self.rows[b][self.inv[rel[j as usize]]];
                j -= 1;
            }
            if j < i as isize {
                self.coincidence(f, b);
                return;
            } else if j == i as isize {
                self.rows[f][rel[i]] = b;
                self.rows[b][self.inv[rel[i]]] = f;
                return;
            }
            self.define(f, rel[i]);
        }
    }
}

fn alternating(a: usize, b: usize, k: usize) -> impl Iterator<Item = usize> {
    (0..k).map(move |t| if t % 2 == 0 { a } else { b })
}

/// Relators of the presentation as generator-index sequences.
fn relators(group: &Periagroup, letters: &[Letter], inv: &[usize]) -> Vec<Vec<usize>> {
    let spec = group.spec();
    let idx = |v: usize, x: usize| letters.binary_search(&Letter::new(v, x)).expect("letter");
    let mut rels = Vec::new();
    for v in 0..spec.vertex_count() {
        let g = spec.group(v);
        for a in 1..g.order() {
            for b in 1..g.order() {
                let p = g.mul(a, b);
                if p == 0 {
                    rels.push(vec![idx(v, a), idx(v, b)]);
                } else {
                    rels.push(vec![idx(v, a), idx(v, b), inv[idx(v, p)]]);
                }
            }
        }
    }
    for &(u, v, k) in spec.edges() {
        let k = k as usize;
        for a in 1..spec.group(u).order() {
            for b in 1..spec.group(v).order() {
                let (ga, gb) = (idx(u, a), idx(v, b));
                let mut r: Vec<usize> = alternating(ga, gb, k).collect();
                let rhs: Vec<usize> = alternating(gb, ga, k).collect();
                r.extend(rhs.iter().rev().map(|&g| inv[g]));
                rels.push(r);
            }
        }
    }
    rels
}

/// Hasse-Low-Todd-Coxeter enumeration of the cosets of the trivial subgroup.
fn enumerate_group(group: &Periagroup, cap: usize) -> GroupEnumeration {
    let letters = group.letters();
    let inv: Vec<usize> = letters
        .iter()
        .map(|&l| letters.binary_search(&group.inverse_letter(l)).expect("inverse letter"))
        .collect();
    let rels = relators(group, &letters, &inv);
    let mut table = CosetTable::new(inv);
    let mut complete = true;
    let mut c = 0;
    while c < table.rows.len() {
        if table.alive(c) {
            for r in &rels {
                if !table.alive(c) {
                    break;
                }
                table.scan_and_fill(c, r);
            }
            if table.alive(c) {
                for x in 0..letters.len() {
                    if table.rows[c][x] == UNDEF {
                        table.define(c, x);
                    }
                }
            }
        }
        if table.live > cap {
            complete = false;
            break;
        }
        c += 1;
    }

    // Relabel live cosets in shortlex order of their least words.
    let mut id = vec![UNDEF; table.rows.len()];
    let mut elements = vec![Word::identity()];
    let mut order = vec![0usize];
    id[0] = 0;
    let mut head = 0;
    while head < order.len() {
        let c = order[head];
        head += 1;
        for (x, &l) in letters.iter().enumerate() {
            let d = table.rows[c][x];
            if d == UNDEF {
                continue;
            }
            let d = table.rep(d);
            if id[d] == UNDEF {
                id[d] = order.len();
                order.push(d);
                let mut w = elements[id[c]].clone();
                w.0.push(l);
                elements.push(w);
            }
        }
    }
    let action = order
        .iter()
        .map(|&c| {
            (0..letters.len())
                .map(|x| match table.rows[c][x] {
                    UNDEF => UNDEF,
                    d => {
                        let d = table.rep(d);
                        id[d]
                    }
                })
                .collect()
        })
        .collect();
    GroupEnumeration {
        letters,
        elements,
        action,
        complete,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn w(g: &Periagroup, s: &str) -> Word {
        Word::parse(s, g.spec()).unwrap()
    }

    #[test]
    fn moves_on_fixtures() {
        let f1 = Periagroup::new(fixtures::f1());
        let moved = f1.apply_moves(&w(&f1, "u:1.v:1.u:1"));
        assert!(moved.contains(&w(&f1, "v:1.u:1.v:1")));
        let f2 = Periagroup::new(fixtures::f2());
        assert!(f2.apply_moves(&w(&f2, "u:1.v:1")).contains(&w(&f2, "v:1.u:1")));
        assert!(f2.apply_moves(&w(&f2, "u:1.u:1")).contains(&Word::identity()));
    }

    #[test]
    fn normal_forms() {
        let f1 = Periagroup::new(fixtures::f1());
        assert_eq!(f1.normalize(&w(&f1, "u:1.v:1.u:1.v:1.u:1.v:1")).unwrap(), Word::identity());
        let f3 = Periagroup::new(fixtures::f3());
        assert_eq!(f3.normalize(&w(&f3, "u:1.u:1")).unwrap(), w(&f3, "u:2"));
        assert!(f1.equal(&w(&f1, "u:1.v:1.u:1"), &w(&f1, "v:1.u:1.v:1")).unwrap());
        let f2 = Periagroup::new(fixtures::f2());
        assert!(f2.equal(&w(&f2, "u:1.v:1"), &w(&f2, "v:1.u:1")).unwrap());
        assert!(!f3.equal(&w(&f3, "u:1"), &w(&f3, "u:2")).unwrap());
    }

    #[test]
    fn shortlex_choice() {
        let f1 = Periagroup::new(fixtures::f1());
        assert_eq!(f1.normalize(&w(&f1, "v:1.u:1.v:1")).unwrap(), w(&f1, "u:1.v:1.u:1"));
    }

    #[test]
    fn cap_is_a_hard_error() {
        let g = Periagroup::with_cap(fixtures::f2(), 2);
        let r = g.normalize(&w(&g, "u:1.v:1.v:1.u:1.v:1"));
        // u v^2 u v reduces to v^3 u^2 = e, reaching it needs a few commutations
        match r {
            Ok(x) => assert!(x.is_empty()),
            Err(e) => assert_eq!(e, WordError::CapExceeded { cap: 2 }),
        }
        let big = Periagroup::with_cap(
            crate::presentation::parse_presentation(
                "vertex a cyclic 2\nvertex b cyclic 2\nvertex c cyclic 2\nvertex d cyclic 2\nedge a b label 2\nedge a c label 2\nedge a d label 2\nedge b c label 2\nedge b d label 2\nedge c d label 2\n",
            )
            .unwrap(),
            5,
        );
        assert!(matches!(
            big.normalize(&w(&big, "d:1.c:1.b:1.a:1")),
            Err(WordError::CapExceeded { cap: 5 })
        ));
    }

    #[test]
    fn enumeration_orders() {
        assert_eq!(Periagroup::new(fixtures::f1()).enumerate_group(1000).order(), Some(6));
        assert_eq!(Periagroup::new(fixtures::f2()).enumerate_group(1000).order(), Some(6));
        let f3 = Periagroup::new(fixtures::f3()).enumerate_group(100);
        assert!(!f3.complete);
        let psi = Periagroup::new(fixtures::f4().induced(&[1, 2]).unwrap().0);
        assert_eq!(psi.enumerate_group(1000).order(), Some(6));
    }

    #[test]
    fn word_text_round_trip() {
        let g = Periagroup::new(fixtures::f4());
        let x = w(&g, "u:2.v:1.w:1");
        assert_eq!(x.display(g.spec()).to_string(), "u:2.v:1.w:1");
        assert_eq!(Word::identity().display(g.spec()).to_string(), "e");
        assert!(Word::parse("u:3", g.spec()).is_err());
        assert!(Word::parse("q:1", g.spec()).is_err());
    }
}
