//! Coxeter diagrams, their text format, and Gram matrices.
//!
//! Diagram text has one statement per line:
//!
//! ```text
//! vertices 6
//! 1 2 tangent
//! 2 5 angle 3
//! 3 6 disjoint
//! 4 5 disjoint=2
//! ```
//!
//! Pairs with no edge are orthogonal. `#` starts a comment.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::{common_disc, cos_pi_over, QuadExt};
use crate::matrix::QuadMatrix;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EdgeKind {
    Tangent,
    /// Walls meeting at dihedral angle `pi/m`, `m >= 3`.
    Angle(u32),
    /// Walls with disjoint interiors; the value, when known, exceeds 1.
    Disjoint(Option<QuadExt>),
}

/// Vertices are 0-based in memory and 1-based in text.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CoxeterDiagram {
    vertex_count: usize,
    edges: BTreeMap<(usize, usize), EdgeKind>,
}

impl CoxeterDiagram {
    pub fn new(vertex_count: usize) -> Self {
        CoxeterDiagram { vertex_count, edges: BTreeMap::new() }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &BTreeMap<(usize, usize), EdgeKind> {
        &self.edges
    }

    pub fn edge(&self, i: usize, j: usize) -> Option<&EdgeKind> {
        self.edges.get(&(i.min(j), i.max(j)))
    }

    /// Adds an edge between 0-based vertices.
    pub fn add_edge(&mut self, i: usize, j: usize, kind: EdgeKind) -> Result<()> {
        if i == j || i.max(j) >= self.vertex_count {
            return Err(Error::InvalidGram(format!("bad edge {}-{}", i + 1, j + 1)));
        }
        let key = (i.min(j), i.max(j));
        if self.edges.contains_key(&key) {
            return Err(Error::DuplicateEdge { line: 0, i: key.0 + 1, j: key.1 + 1 });
        }
        self.edges.insert(key, kind);
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self> {
        parse_diagram(text)
    }

    /// Text form accepted by [`parse_diagram`].
    pub fn to_dsl(&self) -> String {
        let mut out = format!("vertices {}\n", self.vertex_count);
        for (&(i, j), kind) in &self.edges {
            let desc = match kind {
                EdgeKind::Tangent => "tangent".to_string(),
                EdgeKind::Angle(m) => format!("angle {m}"),
                EdgeKind::Disjoint(None) => "disjoint".to_string(),
                EdgeKind::Disjoint(Some(v)) => format!("disjoint={v}"),
            };
            out.push_str(&format!("{} {} {}\n", i + 1, j + 1, desc));
        }
        out
    }
}

impl fmt::Display for CoxeterDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_dsl())
    }
}

fn perr(line: usize, reason: impl Into<String>) -> Error {
    Error::DiagramParse { line, reason: reason.into() }
}

pub fn parse_diagram(text: &str) -> Result<CoxeterDiagram> {
    let mut declared: Option<usize> = None;
    let mut edges: Vec<(usize, usize, usize, EdgeKind)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let toks: Vec<&str> = body.split_whitespace().collect();
        if toks[0] == "vertices" {
            if toks.len() != 2 {
                return Err(perr(line, "expected `vertices <count>`"));
            }
            if declared.is_some() {
                return Err(perr(line, "vertex count declared twice"));
            }
            let k = toks[1].parse::<usize>().map_err(|_| perr(line, "vertex count must be an integer"))?;
            declared = Some(k);
            continue;
        }
        if toks.len() < 3 {
            return Err(perr(line, "expected `<i> <j> <kind>`"));
        }
        let index = |s: &str| -> Result<usize> {
            match s.parse::<usize>() {
                Ok(v) if v >= 1 => Ok(v),
                _ => Err(perr(line, format!("bad vertex index {s:?}"))),
            }
        };
        let (a, b) = (index(toks[0])?, index(toks[1])?);
        if a == b {
            return Err(perr(line, "self-loop"));
        }
        let kind = match (toks[2], toks.len()) {
            ("tangent", 3) => EdgeKind::Tangent,
            ("angle", 4) => {
                let m = toks[3].parse::<u32>().map_err(|_| perr(line, "angle needs an integer m"))?;
                if m < 3 {
                    return Err(Error::BadMultiplicity { line, m });
                }
                EdgeKind::Angle(m)
            }
            ("disjoint", 3) => EdgeKind::Disjoint(None),
            (kw, 3) if kw.starts_with("disjoint=") => {
                let v: QuadExt = kw["disjoint=".len()..].parse().map_err(|e: Error| perr(line, e.to_string()))?;
                if v.try_cmp(&QuadExt::one())? != Ordering::Greater {
                    return Err(perr(line, "disjoint value must exceed 1"));
                }
                EdgeKind::Disjoint(Some(v))
            }
            _ => return Err(perr(line, format!("unknown edge statement {body:?}"))),
        };
        edges.push((line, a.min(b) - 1, a.max(b) - 1, kind));
    }
    let inferred = edges.iter().map(|e| e.2 + 1).max().unwrap_or(0);
    let count = declared.unwrap_or(inferred);
    let mut d = CoxeterDiagram::new(count);
    for (line, i, j, kind) in edges {
        if j >= count {
            return Err(perr(line, format!("vertex {} exceeds declared count {count}", j + 1)));
        }
        if d.edges.contains_key(&(i, j)) {
            return Err(Error::DuplicateEdge { line, i: i + 1, j: j + 1 });
        }
        d.edges.insert((i, j), kind);
    }
    Ok(d)
}

/// On-disk form of a Gram matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GramFile {
    pub format: u32,
    pub gram: Vec<Vec<String>>,
}

/// Relation between two distinct walls read off a Gram entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EntryClass {
    Orthogonal,
    Tangent,
    Angle(u32),
    Disjoint,
}

/// Symmetric matrix with diagonal `-1`; unknown disjoint entries are
/// placeholders and count as "> 1" for combinatorial purposes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GramMatrix {
    entries: QuadMatrix,
    placeholder: Vec<bool>,
}

pub const PLACEHOLDER: &str = "?";

impl GramMatrix {
    pub fn new(entries: QuadMatrix) -> Result<Self> {
        let n = entries.rows();
        Self::with_placeholders(entries, vec![false; n * n])
    }

    pub fn with_placeholders(entries: QuadMatrix, placeholder: Vec<bool>) -> Result<Self> {
        let n = entries.rows();
        if !entries.is_square() {
            return Err(Error::InvalidGram("matrix is not square".into()));
        }
        entries.disc()?;
        let minus_one = QuadExt::from(-1);
        for i in 0..n {
            if placeholder[i * n + i] || entries[(i, i)] != minus_one {
                return Err(Error::InvalidGram(format!("diagonal entry {} is not -1", i + 1)));
            }
            for j in i + 1..n {
                if placeholder[i * n + j] != placeholder[j * n + i]
                    || (!placeholder[i * n + j] && entries[(i, j)] != entries[(j, i)])
                {
                    return Err(Error::InvalidGram(format!("entries ({}, {}) are not symmetric", i + 1, j + 1)));
                }
            }
        }
        Ok(GramMatrix { entries, placeholder })
    }

    /// Parses a square table of number strings; `"?"` marks a placeholder.
    pub fn from_strings(rows: &[Vec<String>]) -> Result<Self> {
        let n = rows.len();
        let mut m = QuadMatrix::zeros(n, n);
        let mut mask = vec![false; n * n];
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: row.len() });
            }
            for (j, s) in row.iter().enumerate() {
                if s.trim() == PLACEHOLDER {
                    mask[i * n + j] = true;
                } else {
                    m[(i, j)] = s.parse()?;
                }
            }
        }
        Self::with_placeholders(m, mask)
    }

    pub fn to_strings(&self) -> Vec<Vec<String>> {
        (0..self.size())
            .map(|i| {
                (0..self.size())
                    .map(|j| match self.get(i, j) {
                        Some(v) => v.to_string(),
                        None => PLACEHOLDER.to_string(),
                    })
                    .collect()
            })
            .collect()
    }

    pub fn to_json(&self) -> GramFile {
        GramFile { format: crate::orbit::FORMAT_VERSION, gram: self.to_strings() }
    }

    pub fn from_json(f: GramFile) -> Result<Self> {
        crate::orbit::check_format(f.format)?;
        Self::from_strings(&f.gram)
    }

    /// Reads `{"format": 1, "gram": [[...]]}`.
    pub fn parse_json(text: &str) -> Result<Self> {
        Self::from_json(serde_json::from_str(text)?)
    }

    pub fn size(&self) -> usize {
        self.entries.rows()
    }

    /// The entry, or `None` for a placeholder.
    pub fn get(&self, i: usize, j: usize) -> Option<&QuadExt> {
        if self.placeholder[i * self.size() + j] {
            None
        } else {
            Some(&self.entries[(i, j)])
        }
    }

    pub fn has_placeholders(&self) -> bool {
        self.placeholder.iter().any(|&p| p)
    }

    /// The underlying matrix; fails while placeholders remain.
    pub fn matrix(&self) -> Result<&QuadMatrix> {
        if self.has_placeholders() {
            Err(Error::Placeholder)
        } else {
            Ok(&self.entries)
        }
    }

    pub fn disc(&self) -> u64 {
        self.entries.disc().unwrap_or(0)
    }

    /// Restriction to the given rows and columns, in order.
    pub fn submatrix(&self, idx: &[usize]) -> GramMatrix {
        let k = idx.len();
        let n = self.size();
        let mut m = QuadMatrix::zeros(k, k);
        let mut mask = vec![false; k * k];
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                m[(a, b)] = self.entries[(i, j)].clone();
                mask[a * k + b] = self.placeholder[i * n + j];
            }
        }
        GramMatrix { entries: m, placeholder: mask }
    }

    /// Classifies the off-diagonal entry `(i, j)`.
    pub fn classify(&self, i: usize, j: usize) -> Result<EntryClass> {
        let Some(v) = self.get(i, j) else {
            return Ok(EntryClass::Disjoint);
        };
        classify_value(v).ok_or_else(|| Error::UnclassifiableEntry { i: i + 1, j: j + 1, value: v.to_string() })
    }
}

/// `0`, `1`, `> 1` or `cos(pi/m)` for a supported `m`.
pub fn classify_value(v: &QuadExt) -> Option<EntryClass> {
    if v.is_zero() {
        return Some(EntryClass::Orthogonal);
    }
    if v.is_one() {
        return Some(EntryClass::Tangent);
    }
    match v.try_cmp(&QuadExt::one()) {
        Ok(Ordering::Greater) => return Some(EntryClass::Disjoint),
        Err(_) => return None,
        _ => {}
    }
    (3..=6).find(|&m| cos_pi_over(m).as_ref() == Some(v)).map(EntryClass::Angle)
}

pub fn gram_from_diagram(d: &CoxeterDiagram) -> Result<GramMatrix> {
    let n = d.vertex_count();
    let mut m = QuadMatrix::zeros(n, n);
    let mut mask = vec![false; n * n];
    for i in 0..n {
        m[(i, i)] = QuadExt::from(-1);
    }
    let mut field = 0u64;
    for (&(i, j), kind) in d.edges() {
        let value = match kind {
            EdgeKind::Tangent => Some(QuadExt::one()),
            EdgeKind::Angle(mm) => {
                let c = cos_pi_over(*mm).ok_or(Error::UnrepresentableAngle { m: *mm })?;
                if field != 0 && c.disc() != 0 && c.disc() != field {
                    return Err(Error::UnrepresentableAngle { m: *mm });
                }
                Some(c)
            }
            EdgeKind::Disjoint(v) => v.clone(),
        };
        match value {
            Some(v) => {
                if v.disc() != 0 {
                    if field != 0 && v.disc() != field {
                        return Err(Error::DiscMismatch { left: field, right: v.disc() });
                    }
                    field = v.disc();
                }
                m[(i, j)] = v.clone();
                m[(j, i)] = v;
            }
            None => {
                mask[i * n + j] = true;
                mask[j * n + i] = true;
            }
        }
    }
    common_disc(m.entries())?;
    GramMatrix::with_placeholders(m, mask)
}

pub fn diagram_from_gram(g: &GramMatrix) -> Result<CoxeterDiagram> {
    let n = g.size();
    let mut d = CoxeterDiagram::new(n);
    for i in 0..n {
        for j in i + 1..n {
            let kind = match g.classify(i, j)? {
                EntryClass::Orthogonal => continue,
                EntryClass::Tangent => EdgeKind::Tangent,
                EntryClass::Angle(m) => EdgeKind::Angle(m),
                EntryClass::Disjoint => EdgeKind::Disjoint(g.get(i, j).cloned()),
            };
            d.edges.insert((i, j), kind);
        }
    }
    Ok(d)
}
