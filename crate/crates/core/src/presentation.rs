//! Periagroup presentations: a simplicial graph with edge labels and a finite
//! group attached to every vertex.
//!
//! The text format is line oriented:
//!
//! ```text
//! vertex u cyclic 2
//! vertex v table 3 [0 1 2; 1 2 0; 2 0 1]
//! edge u v label 2
//! ```
//!
//! `#` starts a comment. Vertex declaration order is the canonical letter
//! order used everywhere downstream.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PresentationError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid presentation: {0}")]
    Validation(String),
}

fn invalid(msg: impl Into<String>) -> PresentationError {
    PresentationError::Validation(msg.into())
}

/// How a vertex group was declared. Kept so serialization re-emits the input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableSource {
    Cyclic,
    Table,
}

/// An explicit finite group on `0..order` with `0` the identity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteGroupTable {
    order: usize,
    mul: Vec<Vec<usize>>,
    #[serde(skip)]
    inv: Vec<usize>,
    source: TableSource,
}

impl FiniteGroupTable {
    pub fn cyclic(n: usize) -> Result<Self, PresentationError> {
        if n == 0 {
            return Err(invalid("cyclic group of order 0"));
        }
        let mul = (0..n)
            .map(|a| (0..n).map(|b| (a + b) % n).collect())
            .collect();
        let mut t = Self::from_table(mul)?;
        t.source = TableSource::Cyclic;
        Ok(t)
    }

    /// Checks closure, identity, inverses and associativity.
    pub fn from_table(mul: Vec<Vec<usize>>) -> Result<Self, PresentationError> {
        let order = mul.len();
        if order == 0 {
            return Err(invalid("empty multiplication table"));
        }
        for (a, row) in mul.iter().enumerate() {
            if row.len() != order {
                return Err(invalid(format!("table row {a} has {} entries, expected {order}", row.len())));
            }
            if let Some(&c) = row.iter().find(|&&c| c >= order) {
                return Err(invalid(format!("table entry {c} out of range 0..{order}")));
            }
        }
        for a in 0..order {
            if mul[0][a] != a || mul[a][0] != a {
                return Err(invalid("element 0 is not the identity"));
            }
        }
        let mut inv = vec![usize::MAX; order];
        for a in 0..order {
            match (0..order).find(|&b| mul[a][b] == 0 && mul[b][a] == 0) {
                Some(b) => inv[a] = b,
                None => return Err(invalid(format!("element {a} has no inverse"))),
            }
        }
        for a in 0..order {
            for b in 0..order {
                for c in 0..order {
                    if mul[mul[a][b]][c] != mul[a][mul[b][c]] {
                        return Err(invalid(format!("associativity fails on ({a}, {b}, {c})")));
                    }
                }
            }
        }
        Ok(Self {
            order,
            mul,
            inv,
            source: TableSource::Table,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inv[a]
    }

    pub fn source(&self) -> TableSource {
        self.source
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.mul
    }

    /// Order of `a` as a group element.
    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != 0 {
            x = self.mul[x][a];
            k += 1;
        }
        k
    }

    /// Least common multiple of all element orders.
    pub fn exponent(&self) -> usize {
        (0..self.order).fold(1, |acc, a| lcm(acc, self.element_order(a)))
    }

    fn rebuild_inverse(&mut self) {
        self.inv = (0..self.order)
            .map(|a| (0..self.order).find(|&b| self.mul[a][b] == 0).unwrap_or(0))
            .collect();
    }
}

pub(crate) fn lcm(a: usize, b: usize) -> usize {
    fn gcd(a: usize, b: usize) -> usize {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    a / gcd(a, b) * b
}

/// Vertex type: all incident labels are 2 (GP) or some label exceeds 2 (C).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VertexType {
    GP,
    C,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriagroupSpec {
    vertices: Vec<String>,
    groups: Vec<FiniteGroupTable>,
    /// `(i, j, label)` with `i < j`, sorted.
    edges: Vec<(usize, usize, u32)>,
    #[serde(skip)]
    label_matrix: Vec<Vec<u32>>,
}

impl PeriagroupSpec {
    pub fn new(
        vertices: Vec<(String, FiniteGroupTable)>,
        edges: Vec<(usize, usize, u32)>,
    ) -> Result<Self, PresentationError> {
        let (names, groups): (Vec<_>, Vec<_>) = vertices.into_iter().unzip();
        let n = names.len();
        let mut seen = BTreeSet::new();
        for name in &names {
            if !seen.insert(name.as_str()) {
                return Err(invalid(format!("duplicate vertex '{name}'")));
            }
        }
        let mut norm = Vec::with_capacity(edges.len());
        let mut pairs = BTreeSet::new();
        for (a, b, label) in edges {
            if a >= n || b >= n {
                return Err(invalid("edge endpoint out of range"));
            }
            if a == b {
                return Err(invalid(format!("loop at vertex '{}' (graph must be simplicial)", names[a])));
            }
            let (i, j) = (a.min(b), a.max(b));
            if !pairs.insert((i, j)) {
                return Err(invalid(format!(
                    "multiple edges between '{}' and '{}' (graph must be simplicial)",
                    names[i], names[j]
                )));
            }
            if label < 2 {
                return Err(invalid(format!("edge {}-{} has label {label} < 2", names[i], names[j])));
            }
            norm.push((i, j, label));
        }
        norm.sort_unstable();
        let mut spec = Self {
            vertices: names,
            groups,
            edges: norm,
            label_matrix: Vec::new(),
        };
        spec.rebuild();
        spec.validate()?;
        Ok(spec)
    }

    fn rebuild(&mut self) {
        let n = self.vertices.len();
        let mut m = vec![vec![0u32; n]; n];
        for &(i, j, l) in &self.edges {
            m[i][j] = l;
            m[j][i] = l;
        }
        self.label_matrix = m;
        for g in &mut self.groups {
            if g.inv.len() != g.order {
                g.rebuild_inverse();
            }
        }
    }

    pub fn validate(&self) -> Result<(), PresentationError> {
        for (name, g) in self.vertices.iter().zip(&self.groups) {
            if g.order() < 2 {
                return Err(invalid(format!("vertex group of '{name}' is trivial")));
            }
        }
        for &(i, j, l) in &self.edges {
            if l > 2 && (self.groups[i].order() != 2 || self.groups[j].order() != 2) {
                return Err(invalid(format!(
                    "label>2 requires order-2 endpoint groups (edge {}-{} has label {l})",
                    self.vertices[i], self.vertices[j]
                )));
            }
        }
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertex_name(&self, v: usize) -> &str {
        &self.vertices[v]
    }

    pub fn vertex_names(&self) -> &[String] {
        &self.vertices
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == name)
    }

    pub fn group(&self, v: usize) -> &FiniteGroupTable {
        &self.groups[v]
    }

    pub fn edges(&self) -> &[(usize, usize, u32)] {
        &self.edges
    }

    /// Edge label, or `None` when `a` and `b` are not adjacent.
    pub fn label(&self, a: usize, b: usize) -> Option<u32> {
        match self.label_matrix[a][b] {
            0 => None,
            l => Some(l),
        }
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.label_matrix[a][b] != 0
    }

    pub fn neighbours(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.vertices.len()).filter(move |&w| self.label_matrix[v][w] != 0)
    }

    /// Largest edge label, or 2 when there are no edges.
    pub fn max_label(&self) -> u32 {
        self.edges.iter().map(|e| e.2).max().unwrap_or(2).max(2)
    }

    pub fn classify_vertices(&self) -> Vec<VertexType> {
        (0..self.vertices.len())
            .map(|v| {
                if self.neighbours(v).all(|w| self.label_matrix[v][w] == 2) {
                    VertexType::GP
                } else {
                    VertexType::C
                }
            })
            .collect()
    }

    /// Indices of the type-C vertices; they induce the Coxeter subgraph.
    pub fn coxeter_vertices(&self) -> Vec<usize> {
        self.classify_vertices()
            .into_iter()
            .enumerate()
            .filter(|(_, t)| *t == VertexType::C)
            .map(|(v, _)| v)
            .collect()
    }

    /// Induced sub-presentation on `subset` (kept in canonical order). Returns
    /// the spec and the map from new to old vertex indices.
    pub fn induced(&self, subset: &[usize]) -> Result<(Self, Vec<usize>), PresentationError> {
        let mut keep: Vec<usize> = subset.to_vec();
        keep.sort_unstable();
        keep.dedup();
        let pos: BTreeMap<usize, usize> = keep.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let vertices = keep
            .iter()
            .map(|&v| (self.vertices[v].clone(), self.groups[v].clone()))
            .collect();
        let edges = self
            .edges
            .iter()
            .filter_map(|&(i, j, l)| Some((*pos.get(&i)?, *pos.get(&j)?, l)))
            .collect();
        Ok((Self::new(vertices, edges)?, keep))
    }

    /// Adds `u_Phi` joined to `phi`, `u_Psi` joined to `psi`, and the edge
    /// `u_Phi - u_Psi`; both new groups are cyclic of order two and all new
    /// labels are 2.
    pub fn augment_double_coset(&self, phi: &[usize], psi: &[usize]) -> Result<Self, PresentationError> {
        let phi_set: BTreeSet<usize> = phi.iter().copied().collect();
        let psi_set: BTreeSet<usize> = psi.iter().copied().collect();
        if phi_set == psi_set {
            return Err(invalid("double coset augmentation needs distinct vertex subsets"));
        }
        let n = self.vertices.len();
        if phi_set.iter().chain(&psi_set).any(|&v| v >= n) {
            return Err(invalid("subset vertex out of range"));
        }
        let mut vertices: Vec<_> = self
            .vertices
            .iter()
            .cloned()
            .zip(self.groups.iter().cloned())
            .collect();
        let fresh = |base: &str| {
            let mut name = base.to_string();
            while self.vertices.contains(&name) {
                name.push('_');
            }
            name
        };
        let (a, b) = (n, n + 1);
        vertices.push((fresh("u_Phi"), FiniteGroupTable::cyclic(2)?));
        vertices.push((fresh("u_Psi"), FiniteGroupTable::cyclic(2)?));
        let mut edges = self.edges.clone();
        edges.extend(phi_set.iter().map(|&v| (v, a, 2)));
        edges.extend(psi_set.iter().map(|&v| (v, b, 2)));
        edges.push((a, b, 2));
        Self::new(vertices, edges)
    }

    /// Canonical text form; parsing it yields an equal spec.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (name, g) in self.vertices.iter().zip(&self.groups) {
            match g.source() {
                TableSource::Cyclic => {
                    let _ = writeln!(out, "vertex {name} cyclic {}", g.order());
                }
                TableSource::Table => {
                    let rows: Vec<String> = g
                        .table()
                        .iter()
                        .map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "))
                        .collect();
                    let _ = writeln!(out, "vertex {name} table {} [{}]", g.order(), rows.join("; "));
                }
            }
        }
        for &(i, j, l) in &self.edges {
            let _ = writeln!(out, "edge {} {} label {l}", self.vertices[i], self.vertices[j]);
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let types = self.classify_vertices();
        serde_json::json!({
            "vertices": self.vertices.iter().zip(&self.groups).zip(&types).map(|((name, g), t)| {
                serde_json::json!({
                    "name": name,
                    "order": g.order(),
                    "source": g.source(),
                    "table": g.table(),
                    "type": t,
                })
            }).collect::<Vec<_>>(),
            "edges": self.edges.iter().map(|&(i, j, l)| {
                serde_json::json!({"u": self.vertices[i], "v": self.vertices[j], "label": l})
            }).collect::<Vec<_>>(),
        })
    }
}

impl fmt::Display for PeriagroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

struct Cursor<'a> {
    line_no: usize,
    line: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn err(&self, msg: impl Into<String>) -> PresentationError {
        PresentationError::Syntax {
            line: self.line_no,
            column: self.pos + 1,
            message: msg.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.line.len() && self.line.as_bytes()[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos >= self.line.len()
    }

    fn token(&mut self, what: &str) -> Result<&'a str, PresentationError> {
        self.skip_ws();
        let start = self.pos;
        let bytes = self.line.as_bytes();
        while self.pos < bytes.len() && !bytes[self.pos].is_ascii_whitespace() && !b"[];".contains(&bytes[self.pos]) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err(format!("expected {what}")));
        }
        Ok(&self.line[start..self.pos])
    }

    fn keyword(&mut self, kw: &str) -> Result<(), PresentationError> {
        let save = self.pos;
        let t = self.token(kw)?;
        if t != kw {
            self.pos = save;
            self.skip_ws();
            return Err(self.err(format!("expected '{kw}', found '{t}'")));
        }
        Ok(())
    }

    fn number(&mut self, what: &str) -> Result<usize, PresentationError> {
        self.skip_ws();
        let save = self.pos;
        let t = self.token(what)?;
        t.parse().map_err(|_| {
            self.pos = save;
            self.err(format!("expected {what}, found '{t}'"))
        })
    }

    fn punct(&mut self, c: u8) -> Result<(), PresentationError> {
        self.skip_ws();
        if self.line.as_bytes().get(self.pos) == Some(&c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected '{}'", c as char)))
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.line.as_bytes().get(self.pos).copied()
    }
}

pub fn parse_presentation(text: &str) -> Result<PeriagroupSpec, PresentationError> {
    let mut vertices: Vec<(String, FiniteGroupTable)> = Vec::new();
    let mut raw_edges: Vec<(String, String, u32, usize)> = Vec::new();
    for (idx, full) in text.lines().enumerate() {
        let line = full.split('#').next().unwrap_or("");
        let mut cur = Cursor {
            line_no: idx + 1,
            line,
            pos: 0,
        };
        if cur.at_end() {
            continue;
        }
        let head = cur.token("'vertex' or 'edge'")?;
        match head {
            "vertex" => {
                let name = cur.token("vertex name")?.to_string();
                let kind_pos = cur.pos;
                let kind = cur.token("'cyclic' or 'table'")?;
                let group = match kind {
                    "cyclic" => {
                        let n = cur.number("group order")?;
                        FiniteGroupTable::cyclic(n)?
                    }
                    "table" => {
                        let n = cur.number("group order")?;
                        cur.punct(b'[')?;
                        let mut rows = vec![Vec::with_capacity(n)];
                        loop {
                            match cur.peek() {
                                Some(b']') => {
                                    cur.pos += 1;
                                    break;
                                }
                                Some(b';') => {
                                    cur.pos += 1;
                                    rows.push(Vec::with_capacity(n));
                                }
                                Some(_) => {
                                    let x = cur.number("table entry")?;
                                    rows.last_mut().expect("non-empty").push(x);
                                }
                                None => return Err(cur.err("unterminated table, expected ']'")),
                            }
                        }
                        if rows.len() != n {
                            return Err(cur.err(format!("table has {} rows, declared order {n}", rows.len())));
                        }
                        FiniteGroupTable::from_table(rows)?
                    }
                    other => {
                        cur.pos = kind_pos;
                        cur.skip_ws();
                        return Err(cur.err(format!("unknown group kind '{other}'")));
                    }
                };
                if !cur.at_end() {
                    return Err(cur.err("trailing input"));
                }
                vertices.push((name, group));
            }
            "edge" => {
                let a = cur.token("vertex name")?.to_string();
                let b = cur.token("vertex name")?.to_string();
                cur.keyword("label")?;
                let l = cur.number("edge label")?;
                if !cur.at_end() {
                    return Err(cur.err("trailing input"));
                }
                raw_edges.push((a, b, l as u32, idx + 1));
            }
            other => {
                cur.pos = 0;
                cur.skip_ws();
                return Err(cur.err(format!("unknown directive '{other}'")));
            }
        }
    }
    let index = |name: &str, line: usize| {
        vertices
            .iter()
            .position(|(v, _)| v == name)
            .ok_or_else(|| invalid(format!("line {line}: edge mentions undeclared vertex '{name}'")))
    };
    let mut edges = Vec::with_capacity(raw_edges.len());
    for (a, b, l, line) in &raw_edges {
        edges.push((index(a, *line)?, index(b, *line)?, *l));
    }
    PeriagroupSpec::new(vertices, edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const F1: &str = "vertex u cyclic 2\nvertex v cyclic 2\nedge u v label 3\n";
    const F4: &str = "vertex u cyclic 3\nvertex v cyclic 2\nvertex w cyclic 2\nedge u v label 2\nedge v w label 3\n";

    #[test]
    fn parses_dihedral_fixture() {
        let s = parse_presentation(F1).unwrap();
        assert_eq!(s.vertex_count(), 2);
        assert_eq!(s.edges(), &[(0, 1, 3)]);
        assert_eq!(s.group(0).order(), 2);
        assert_eq!(s.group(1).order(), 2);
    }

    #[test]
    fn parses_mixed_fixture() {
        let s = parse_presentation(F4).unwrap();
        assert_eq!(s.vertex_count(), 3);
        let labels: BTreeSet<u32> = s.edges().iter().map(|e| e.2).collect();
        assert_eq!(labels, BTreeSet::from([2, 3]));
        let orders: Vec<usize> = (0..3).map(|v| s.group(v).order()).collect();
        assert_eq!(orders, vec![3, 2, 2]);
    }

    #[test]
    fn rejects_large_label_on_order_three_group() {
        let err = parse_presentation("vertex u cyclic 3\nvertex v cyclic 2\nedge u v label 3\n").unwrap_err();
        assert!(err.to_string().contains("label>2 requires order-2 endpoint groups"), "{err}");
    }

    #[test]
    fn explicit_table() {
        let s = parse_presentation("vertex v table 3 [0 1 2; 1 2 0; 2 0 1]\n").unwrap();
        assert_eq!(s.group(0).order(), 3);
        assert_eq!(s.group(0).inv(1), 2);
        assert_eq!(s.to_text(), "vertex v table 3 [0 1 2; 1 2 0; 2 0 1]\n");
    }

    #[test]
    fn syntax_errors_report_position() {
        match parse_presentation("vertex u cyclic 2\nvertex v cyclik 2\n") {
            Err(PresentationError::Syntax { line, column, .. }) => {
                assert_eq!((line, column), (2, 10));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse_presentation("vertex u table 2 [0 1; 1 0\n"),
            Err(PresentationError::Syntax { line: 1, .. })
        ));
    }

    #[test]
    fn non_group_tables_rejected() {
        // not associative / no inverses
        assert!(parse_presentation("vertex u table 3 [0 1 2; 1 0 0; 2 0 0]\n").is_err());
        assert!(parse_presentation("vertex u table 2 [1 0; 0 1]\n").is_err());
    }

    #[test]
    fn simplicial_and_nontrivial() {
        assert!(parse_presentation("vertex u cyclic 2\nedge u u label 2\n").is_err());
        assert!(parse_presentation("vertex u cyclic 2\nvertex v cyclic 2\nedge u v label 2\nedge v u label 2\n").is_err());
        assert!(parse_presentation("vertex u cyclic 1\n").is_err());
        assert!(parse_presentation("vertex u cyclic 2\nvertex v cyclic 2\nedge u v label 1\n").is_err());
    }

    #[test]
    fn classification() {
        let f2 = parse_presentation("vertex u cyclic 2\nvertex v cyclic 3\nedge u v label 2\n").unwrap();
        assert_eq!(f2.classify_vertices(), vec![VertexType::GP, VertexType::GP]);
        assert!(f2.coxeter_vertices().is_empty());
        let f4 = parse_presentation(F4).unwrap();
        assert_eq!(f4.classify_vertices(), vec![VertexType::GP, VertexType::C, VertexType::C]);
        let (psi, map) = f4.induced(&f4.coxeter_vertices()).unwrap();
        assert_eq!(map, vec![1, 2]);
        assert_eq!(psi.edges(), &[(0, 1, 3)]);
        let f5 = parse_presentation(
            "vertex a cyclic 2\nvertex b cyclic 2\nvertex c cyclic 2\nedge a b label 3\nedge b c label 3\nedge a c label 3\n",
        )
        .unwrap();
        assert!(f5.classify_vertices().iter().all(|t| *t == VertexType::C));
        let iso = parse_presentation("vertex a cyclic 5\n").unwrap();
        assert_eq!(iso.classify_vertices(), vec![VertexType::GP]);
    }

    #[test]
    fn augmentation() {
        let f2 = parse_presentation("vertex u cyclic 2\nvertex v cyclic 3\nedge u v label 2\n").unwrap();
        let plus = f2.augment_double_coset(&[0], &[1]).unwrap();
        assert_eq!(plus.vertex_count(), 4);
        assert_eq!(plus.edges().len(), 4);
        assert!(plus.edges().iter().all(|e| e.2 == 2));
        assert_eq!(plus.group(2).order(), 2);
        let f4 = parse_presentation(F4).unwrap();
        let plus = f4.augment_double_coset(&[0], &[2]).unwrap();
        assert_eq!(plus.vertex_count(), 5);
        plus.validate().unwrap();
        let f1 = parse_presentation(F1).unwrap();
        assert!(f1.augment_double_coset(&[0], &[0]).is_err());
    }

    #[test]
    fn json_export_lists_types() {
        let s = parse_presentation(F4).unwrap();
        let j = s.to_json();
        assert_eq!(j["vertices"][1]["type"], "C");
        assert_eq!(j["edges"][1]["label"], 3);
    }
}
