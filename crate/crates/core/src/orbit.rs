//! Wall systems and breadth-first orbit enumeration of packings and
//! superpackings.

use std::cmp::Ordering;
use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::coxeter::GramMatrix;
use crate::error::{Error, Result};
use crate::exactnum::{common_disc, QuadExt};
use crate::inversive::InversiveVector;
use crate::matrix::QuadMatrix;

pub const FORMAT_VERSION: u32 = 1;
pub const DEFAULT_FRONTIER_CAP: usize = 2_000_000;

/// Walls together with a cluster/cocluster split. Indices are 0-based in
/// memory and 1-based in JSON.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WallSystem {
    pub name: String,
    walls: Vec<InversiveVector>,
    cluster: Vec<usize>,
    cocluster: Vec<usize>,
}

impl WallSystem {
    pub fn new(name: &str, walls: Vec<InversiveVector>, cluster: Vec<usize>, cocluster: Vec<usize>) -> Result<Self> {
        let ws = WallSystem { name: name.to_string(), walls, cluster, cocluster };
        ws.validate()?;
        Ok(ws)
    }

    fn validate(&self) -> Result<()> {
        let n = self.walls.len();
        let dim = self.walls.first().map(InversiveVector::dim).ok_or_else(|| Error::InvalidSystem("no walls".into()))?;
        for (i, w) in self.walls.iter().enumerate() {
            if w.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: w.dim() });
            }
            if !w.validate() {
                return Err(Error::InvalidSystem(format!("wall {} does not satisfy Q(v) = -1", i + 1)));
            }
        }
        common_disc(self.walls.iter().flat_map(InversiveVector::coords))?;
        if self.cluster.is_empty() {
            return Err(Error::InvalidSystem("cluster is empty".into()));
        }
        let mut seen = vec![false; n];
        for &i in self.cluster.iter().chain(&self.cocluster) {
            if i >= n || seen[i] {
                return Err(Error::InvalidSystem(format!("wall index {} repeated or out of range", i + 1)));
            }
            seen[i] = true;
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::InvalidSystem("cluster and cocluster do not cover every wall".into()));
        }
        Ok(())
    }

    pub fn walls(&self) -> &[InversiveVector] {
        &self.walls
    }

    pub fn cluster(&self) -> &[usize] {
        &self.cluster
    }

    pub fn cocluster(&self) -> &[usize] {
        &self.cocluster
    }

    pub fn dim(&self) -> usize {
        self.walls[0].dim()
    }

    pub fn disc(&self) -> u64 {
        common_disc(self.walls.iter().flat_map(InversiveVector::coords)).unwrap_or(0)
    }

    /// Gram matrix of all walls, in order.
    pub fn gram(&self) -> Result<GramMatrix> {
        let n = self.walls.len();
        let mut m = QuadMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let p = self.walls[i].product(&self.walls[j])?;
                m[(j, i)] = p.clone();
                m[(i, j)] = p;
            }
        }
        GramMatrix::new(m)
    }

    pub fn cluster_walls(&self) -> Vec<InversiveVector> {
        self.cluster.iter().map(|&i| self.walls[i].clone()).collect()
    }

    pub fn to_json(&self) -> SystemFile {
        SystemFile {
            format: FORMAT_VERSION,
            name: self.name.clone(),
            dim: self.dim(),
            walls: self.walls.clone(),
            cluster: self.cluster.iter().map(|i| i + 1).collect(),
            cocluster: self.cocluster.iter().map(|i| i + 1).collect(),
        }
    }

    pub fn from_json(f: SystemFile) -> Result<Self> {
        check_format(f.format)?;
        let base = |v: Vec<usize>| -> Result<Vec<usize>> {
            v.into_iter()
                .map(|i| i.checked_sub(1).ok_or_else(|| Error::Format("wall indices are 1-based".into())))
                .collect()
        };
        let ws = WallSystem::new(&f.name, f.walls, base(f.cluster)?, base(f.cocluster)?)?;
        if ws.dim() != f.dim {
            return Err(Error::DimensionMismatch { expected: f.dim, found: ws.dim() });
        }
        Ok(ws)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::from_json(serde_json::from_str(text)?)
    }

    pub fn to_string_pretty(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("serializable")
    }
}

pub(crate) fn check_format(v: u32) -> Result<()> {
    if v == FORMAT_VERSION {
        Ok(())
    } else {
        Err(Error::Format(format!("unsupported format version {v}")))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SystemFile {
    pub format: u32,
    #[serde(default)]
    pub name: String,
    pub dim: usize,
    pub walls: Vec<InversiveVector>,
    pub cluster: Vec<usize>,
    pub cocluster: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SphereMeta {
    pub word_length: usize,
    /// Index of the sphere this one was reflected from, and the wall used.
    pub parent: Option<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Packing {
    pub dim: usize,
    pub spheres: Vec<InversiveVector>,
    pub meta: Vec<SphereMeta>,
    /// True when no unexplored child lies within the bound.
    pub saturated: bool,
}

impl Packing {
    pub fn empty(dim: usize) -> Self {
        Packing { dim, spheres: Vec::new(), meta: Vec::new(), saturated: true }
    }

    pub fn len(&self) -> usize {
        self.spheres.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spheres.is_empty()
    }

    /// Wall indices applied, in order, to reach sphere `i` from a cluster sphere.
    pub fn word(&self, i: usize) -> Vec<usize> {
        let mut w = Vec::new();
        let mut cur = i;
        while let Some((p, g)) = self.meta[cur].parent {
            w.push(g);
            cur = p;
        }
        w.reverse();
        w
    }

    pub fn contains(&self, v: &InversiveVector) -> bool {
        self.spheres.contains(v)
    }
}

#[derive(Debug, Clone)]
pub struct OrbitConfig {
    pub bound: QuadExt,
    pub max_word: usize,
    pub frontier_cap: usize,
    pub jobs: usize,
}

impl OrbitConfig {
    pub fn new(bound: QuadExt, max_word: usize) -> Self {
        OrbitConfig { bound, max_word, frontier_cap: DEFAULT_FRONTIER_CAP, jobs: 1 }
    }
}

pub fn generate_packing(ws: &WallSystem, bound: &QuadExt, max_word: usize) -> Result<Packing> {
    generate(ws, &OrbitConfig::new(bound.clone(), max_word), false)
}

pub fn generate_superpacking(ws: &WallSystem, bound: &QuadExt, max_word: usize) -> Result<Packing> {
    generate(ws, &OrbitConfig::new(bound.clone(), max_word), true)
}

fn within(v: &InversiveVector, bound: &QuadExt) -> bool {
    v.is_plane() || v.bend().abs().try_cmp(bound).is_ok_and(|o| o != Ordering::Greater)
}

fn children(frontier: &[usize], spheres: &[InversiveVector], gens: &[(usize, &InversiveVector)], bound: &QuadExt) -> Result<Vec<(usize, usize, InversiveVector)>> {
    let mut out = Vec::new();
    for &i in frontier {
        for &(g, wall) in gens {
            let child = spheres[i].reflect(wall)?;
            if within(&child, bound) {
                out.push((i, g, child));
            }
        }
    }
    Ok(out)
}

fn expand(frontier: &[usize], spheres: &[InversiveVector], gens: &[(usize, &InversiveVector)], bound: &QuadExt, jobs: usize) -> Result<Vec<(usize, usize, InversiveVector)>> {
    if jobs <= 1 || frontier.len() < 2 * jobs {
        return children(frontier, spheres, gens, bound);
    }
    let chunk = frontier.len().div_ceil(jobs);
    let parts: Vec<Result<Vec<_>>> = std::thread::scope(|scope| {
        let handles: Vec<_> = frontier
            .chunks(chunk)
            .map(|c| scope.spawn(move || children(c, spheres, gens, bound)))
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });
    let mut out = Vec::new();
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

/// Breadth-first closure of the cluster under reflections in the cocluster
/// (or in every wall, for the superpacking).
pub fn generate(ws: &WallSystem, cfg: &OrbitConfig, superpacking: bool) -> Result<Packing> {
    let gen_idx: Vec<usize> = if superpacking { (0..ws.walls.len()).collect() } else { ws.cocluster.clone() };
    let gens: Vec<(usize, &InversiveVector)> = gen_idx.iter().map(|&g| (g, &ws.walls[g])).collect();

    let mut spheres: Vec<InversiveVector> = Vec::new();
    let mut meta: Vec<SphereMeta> = Vec::new();
    let mut seen: HashSet<InversiveVector> = HashSet::new();
    for w in ws.cluster_walls() {
        if seen.insert(w.clone()) {
            spheres.push(w);
            meta.push(SphereMeta { word_length: 0, parent: None });
        }
    }
    let mut frontier: Vec<usize> = (0..spheres.len()).collect();
    let mut depth = 0;
    let mut saturated = true;
    while !frontier.is_empty() {
        if depth == cfg.max_word {
            let pending = expand(&frontier, &spheres, &gens, &cfg.bound, cfg.jobs)?;
            saturated = pending.iter().all(|(_, _, c)| seen.contains(c));
            break;
        }
        let kids = expand(&frontier, &spheres, &gens, &cfg.bound, cfg.jobs)?;
        let mut next = Vec::new();
        for (parent, g, child) in kids {
            if seen.contains(&child) {
                continue;
            }
            seen.insert(child.clone());
            next.push(spheres.len());
            spheres.push(child);
            meta.push(SphereMeta { word_length: depth + 1, parent: Some((parent, g)) });
        }
        if next.len() > cfg.frontier_cap {
            return Err(Error::FrontierOverflow { cap: cfg.frontier_cap });
        }
        frontier = next;
        depth += 1;
    }
    Ok(sorted(Packing { dim: ws.dim(), spheres, meta, saturated }))
}

/// Orders by bend, then lexicographically by coordinates.
pub fn compare_spheres(a: &InversiveVector, b: &InversiveVector) -> Ordering {
    let key = |v: &InversiveVector| std::iter::once(v.bend().clone()).chain(v.coords().iter().cloned()).collect::<Vec<_>>();
    for (x, y) in key(a).iter().zip(key(b).iter()) {
        match x.try_cmp(y).unwrap_or(Ordering::Equal) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

fn sorted(p: Packing) -> Packing {
    let mut order: Vec<usize> = (0..p.spheres.len()).collect();
    order.sort_by(|&a, &b| compare_spheres(&p.spheres[a], &p.spheres[b]));
    let mut new_index = vec![0; order.len()];
    for (new, &old) in order.iter().enumerate() {
        new_index[old] = new;
    }
    let spheres = order.iter().map(|&i| p.spheres[i].clone()).collect();
    let meta = order
        .iter()
        .map(|&i| {
            let m = &p.meta[i];
            SphereMeta { word_length: m.word_length, parent: m.parent.map(|(q, g)| (new_index[q], g)) }
        })
        .collect();
    Packing { dim: p.dim, spheres, meta, saturated: p.saturated }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    /// 1-based sphere index in the packing.
    pub sphere: usize,
    pub bend: QuadExt,
    /// 1-based wall indices applied from the originating cluster sphere.
    pub word: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IntegralityReport {
    pub integral: bool,
    pub witnesses: Vec<Witness>,
}

pub fn certify_integral(p: &Packing) -> IntegralityReport {
    let witnesses: Vec<Witness> = p
        .spheres
        .iter()
        .enumerate()
        .filter(|(_, s)| !s.bend().is_rational_integer())
        .map(|(i, s)| Witness { sphere: i + 1, bend: s.bend().clone(), word: p.word(i).iter().map(|g| g + 1).collect() })
        .collect();
    IntegralityReport { integral: witnesses.is_empty(), witnesses }
}

pub fn bends_list(p: &Packing) -> Vec<QuadExt> {
    let mut b: Vec<QuadExt> = p.spheres.iter().map(|s| s.bend().clone()).collect();
    b.sort_by(|x, y| x.try_cmp(y).unwrap_or(Ordering::Equal));
    b
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SphereRecord {
    #[serde(flatten)]
    pub sphere: InversiveVector,
    pub word_length: usize,
    /// 1-based sphere index and 1-based wall index.
    pub parent: Option<(usize, usize)>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PackingFile {
    pub format: u32,
    pub dim: usize,
    pub saturated: bool,
    pub spheres: Vec<SphereRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system: Option<SystemFile>,
}

impl Packing {
    pub fn to_json(&self, system: Option<&WallSystem>) -> PackingFile {
        PackingFile {
            format: FORMAT_VERSION,
            dim: self.dim,
            saturated: self.saturated,
            spheres: self
                .spheres
                .iter()
                .zip(&self.meta)
                .map(|(s, m)| SphereRecord {
                    sphere: s.clone(),
                    word_length: m.word_length,
                    parent: m.parent.map(|(p, g)| (p + 1, g + 1)),
                })
                .collect(),
            system: system.map(WallSystem::to_json),
        }
    }

    pub fn from_json(f: PackingFile) -> Result<(Packing, Option<WallSystem>)> {
        check_format(f.format)?;
        let n = f.spheres.len();
        let mut spheres = Vec::with_capacity(n);
        let mut meta = Vec::with_capacity(n);
        for (i, r) in f.spheres.into_iter().enumerate() {
            if r.sphere.dim() != f.dim {
                return Err(Error::DimensionMismatch { expected: f.dim, found: r.sphere.dim() });
            }
            if !r.sphere.validate() {
                return Err(Error::Format(format!("sphere {} does not satisfy Q(v) = -1", i + 1)));
            }
            let parent = match r.parent {
                None => None,
                Some((p, g)) if p >= 1 && p <= n && g >= 1 => Some((p - 1, g - 1)),
                Some(_) => return Err(Error::Format(format!("sphere {} has a bad parent reference", i + 1))),
            };
            spheres.push(r.sphere);
            meta.push(SphereMeta { word_length: r.word_length, parent });
        }
        let system = f.system.map(WallSystem::from_json).transpose()?;
        Ok((Packing { dim: f.dim, spheres, meta, saturated: f.saturated }, system))
    }
}
