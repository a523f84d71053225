//! Residues of bends modulo `m` reachable under the bends group, and scans
//! for admissible bends that never occur.

use std::collections::{BTreeSet, HashSet, VecDeque};

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::arithmetic::{bends_conjugate, ClusterMatrix};
use crate::error::{Error, Result};
use crate::exactnum::QuadExt;
use crate::inversive::ReflectionMatrix;
use crate::matrix::QuadMatrix;
use crate::orbit::WallSystem;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResidueOrbit {
    pub modulus: u64,
    pub residues: BTreeSet<u64>,
    /// Number of distinct bend vectors mod `m` visited.
    pub states: usize,
}

impl ResidueOrbit {
    pub fn admits(&self, bend: &BigInt) -> bool {
        self.residues.contains(&reduce(bend, self.modulus))
    }
}

fn reduce(x: &BigInt, m: u64) -> u64 {
    let r = x % BigInt::from(m);
    let r = if r < BigInt::from(0) { r + BigInt::from(m) } else { r };
    r.to_u64().expect("residue fits")
}

fn integer(x: &QuadExt, what: &str) -> Result<BigInt> {
    x.to_integer().ok_or_else(|| Error::NonIntegralInput(format!("{what} entry {x}")))
}

/// Bends-group generators `V·R_s·V⁻¹` for the cocluster walls, acting on
/// the column of cluster bends.
pub fn bends_generators(ws: &WallSystem) -> Result<Vec<QuadMatrix>> {
    let v = ClusterMatrix::new(ws.cluster_walls())?;
    ws.cocluster()
        .iter()
        .map(|&g| bends_conjugate(ReflectionMatrix::new(&ws.walls()[g])?.matrix(), &v))
        .collect()
}

/// Breadth-first closure of `b mod m` under the generators; the residues
/// are all coordinates seen along the way.
pub fn residue_orbit(gens: &[QuadMatrix], b: &[QuadExt], m: u64) -> Result<ResidueOrbit> {
    if m == 0 {
        return Err(Error::Format("modulus must be positive".into()));
    }
    let k = b.len();
    let mut mats: Vec<Vec<u64>> = Vec::with_capacity(gens.len());
    for g in gens {
        if g.rows() != k || g.cols() != k {
            return Err(Error::DimensionMismatch { expected: k, found: g.rows() });
        }
        mats.push(g.entries().map(|x| integer(x, "generator").map(|n| reduce(&n, m))).collect::<Result<_>>()?);
    }
    let start: Vec<u64> = b.iter().map(|x| integer(x, "bend").map(|n| reduce(&n, m))).collect::<Result<_>>()?;

    let mut seen: HashSet<Vec<u64>> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(start.clone());
    queue.push_back(start);
    let mut residues = BTreeSet::new();
    while let Some(v) = queue.pop_front() {
        residues.extend(v.iter().copied());
        for a in &mats {
            let w: Vec<u64> = (0..k)
                .map(|i| (0..k).fold(0u128, |acc, j| (acc + a[i * k + j] as u128 * v[j] as u128) % m as u128) as u64)
                .collect();
            if seen.insert(w.clone()) {
                queue.push_back(w);
            }
        }
    }
    Ok(ResidueOrbit { modulus: m, residues, states: seen.len() })
}

/// Admissible integers in `[min(bends), bound]` absent from `bends`.
pub fn missing_bends(bends: &[BigInt], ro: &ResidueOrbit, bound: &BigInt) -> Vec<BigInt> {
    let Some(lo) = bends.iter().min() else {
        return Vec::new();
    };
    let present: HashSet<&BigInt> = bends.iter().collect();
    let mut out = Vec::new();
    let mut x = lo.clone();
    while &x <= bound {
        if ro.admits(&x) && !present.contains(&x) {
            out.push(x.clone());
        }
        x += 1;
    }
    out
}
