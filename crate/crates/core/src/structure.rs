//! Cluster/cocluster decompositions of a wall system.
//!
//! A split of the walls into a cluster `C` and cocluster `Ĉ` is valid when
//! every pair inside `C` is tangent or disjoint, and every pair across the
//! split is tangent, disjoint or orthogonal.

use serde::Serialize;

use crate::coxeter::{EntryClass, GramMatrix};
use crate::error::{Error, Result};

pub const DEFAULT_WALL_CAP: usize = 30;

/// Index sets are 0-based and sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Decomposition {
    pub cluster: Vec<usize>,
    pub cocluster: Vec<usize>,
}

impl Decomposition {
    /// The decomposition with the given cluster; everything else is cocluster.
    pub fn from_cluster(n: usize, cluster: &[usize]) -> Self {
        let mut c = cluster.to_vec();
        c.sort_unstable();
        c.dedup();
        let cocluster = (0..n).filter(|i| c.binary_search(i).is_err()).collect();
        Decomposition { cluster: c, cocluster }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    /// 1-based wall indices.
    pub i: usize,
    pub j: usize,
    pub value: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub valid: bool,
    pub violations: Vec<Violation>,
}

fn classes(g: &GramMatrix) -> Result<Vec<Vec<EntryClass>>> {
    let n = g.size();
    let mut out = vec![vec![EntryClass::Orthogonal; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let c = g.classify(i, j)?;
            out[i][j] = c.clone();
            out[j][i] = c;
        }
    }
    Ok(out)
}

pub fn check_decomposition(g: &GramMatrix, d: &Decomposition) -> Result<CheckReport> {
    let n = g.size();
    if d.cluster.is_empty() {
        return Err(Error::InvalidDecomposition("cluster is empty".into()));
    }
    let mut seen = vec![false; n];
    for &i in d.cluster.iter().chain(&d.cocluster) {
        if i >= n || seen[i] {
            return Err(Error::InvalidDecomposition(format!("index {} repeated or out of range", i + 1)));
        }
        seen[i] = true;
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::InvalidDecomposition("index sets do not cover every wall".into()));
    }
    let cls = classes(g)?;
    let value = |i: usize, j: usize| g.get(i, j).map_or_else(|| "?".to_string(), ToString::to_string);
    let mut violations = Vec::new();
    for (a, &i) in d.cluster.iter().enumerate() {
        for &j in &d.cluster[a + 1..] {
            if !matches!(cls[i][j], EntryClass::Tangent | EntryClass::Disjoint) {
                violations.push(Violation {
                    i: i.min(j) + 1,
                    j: i.max(j) + 1,
                    value: value(i, j),
                    reason: "cluster walls must be tangent or disjoint".into(),
                });
            }
        }
        for &j in &d.cocluster {
            if let EntryClass::Angle(m) = cls[i][j] {
                violations.push(Violation {
                    i: i.min(j) + 1,
                    j: i.max(j) + 1,
                    value: value(i, j),
                    reason: format!("cluster and cocluster walls meet at angle pi/{m}"),
                });
            }
        }
    }
    violations.sort_by_key(|v| (v.i, v.j));
    Ok(CheckReport { valid: violations.is_empty(), violations })
}

pub fn enumerate_decompositions(g: &GramMatrix) -> Result<Vec<Decomposition>> {
    enumerate_decompositions_capped(g, DEFAULT_WALL_CAP)
}

/// All valid decompositions, ordered lexicographically by cluster.
pub fn enumerate_decompositions_capped(g: &GramMatrix, cap: usize) -> Result<Vec<Decomposition>> {
    let n = g.size();
    if n > cap {
        return Err(Error::TooManyWalls { count: n, cap });
    }
    let cls = classes(g)?;
    // A wall meeting anything at an angle can sit only in the cocluster.
    let free: Vec<usize> =
        (0..n).filter(|&i| !(0..n).any(|j| j != i && matches!(cls[i][j], EntryClass::Angle(_)))).collect();
    let adjacent = |i: usize, j: usize| matches!(cls[i][j], EntryClass::Tangent | EntryClass::Disjoint);

    let mut out = Vec::new();
    let mut stack: Vec<usize> = Vec::new();
    fn extend(
        start: usize,
        free: &[usize],
        stack: &mut Vec<usize>,
        adjacent: &dyn Fn(usize, usize) -> bool,
        n: usize,
        out: &mut Vec<Decomposition>,
    ) {
        for pos in start..free.len() {
            let w = free[pos];
            if stack.iter().all(|&s| adjacent(s, w)) {
                stack.push(w);
                out.push(Decomposition::from_cluster(n, stack));
                extend(pos + 1, free, stack, adjacent, n, out);
                stack.pop();
            }
        }
    }
    extend(0, &free, &mut stack, &adjacent, n, &mut out);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coxeter::{gram_from_diagram, parse_diagram};

    const COX6: &str = "vertices 6\n1 2 tangent\n3 4 tangent\n2 5 angle 3\n2 6 angle 4\n3 6 disjoint\n4 5 disjoint\n";
    const EISENSTEIN: &str = "vertices 5\n1 2 tangent\n2 5 angle 3\n3 4 tangent\n4 5 angle 6\n";

    fn gram(text: &str) -> GramMatrix {
        gram_from_diagram(&parse_diagram(text).unwrap()).unwrap()
    }

    #[test]
    fn cox6_checks() {
        let g = gram(COX6);
        let ok = check_decomposition(&g, &Decomposition::from_cluster(6, &[0])).unwrap();
        assert!(ok.valid);
        let bad = check_decomposition(&g, &Decomposition::from_cluster(6, &[1])).unwrap();
        assert!(!bad.valid);
        assert!(bad.violations.iter().any(|v| v.i == 2 && v.j == 5 && v.value == "1/2"));
        let empty = Decomposition { cluster: vec![], cocluster: (0..6).collect() };
        assert!(matches!(check_decomposition(&g, &empty), Err(Error::InvalidDecomposition(_))));
    }

    #[test]
    fn cox6_enumeration() {
        let all = enumerate_decompositions(&gram(COX6)).unwrap();
        let clusters: Vec<Vec<usize>> = all.iter().map(|d| d.cluster.clone()).collect();
        assert_eq!(clusters, vec![vec![0], vec![2], vec![2, 3], vec![3]]);
    }

    #[test]
    fn eisenstein_singletons() {
        let all = enumerate_decompositions(&gram(EISENSTEIN)).unwrap();
        let singles: Vec<usize> = all.iter().filter(|d| d.cluster.len() == 1).map(|d| d.cluster[0]).collect();
        assert_eq!(singles, vec![0, 2]);
    }

    #[test]
    fn all_tangent_gives_every_subset() {
        let mut text = String::from("vertices 5\n");
        for i in 1..=5 {
            for j in i + 1..=5 {
                text.push_str(&format!("{i} {j} tangent\n"));
            }
        }
        assert_eq!(enumerate_decompositions(&gram(&text)).unwrap().len(), 31);
    }

    #[test]
    fn cap_enforced() {
        let g = gram("vertices 4");
        assert_eq!(enumerate_decompositions_capped(&g, 3), Err(Error::TooManyWalls { count: 4, cap: 3 }));
    }
}
