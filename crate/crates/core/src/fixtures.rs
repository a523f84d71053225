//! Systems, diagrams and targets bundled with the crate.

use crate::coxeter::{gram_from_diagram, CoxeterDiagram, GramMatrix};
use crate::error::{Error, Result};
use crate::geometrize::TargetSpec;
use crate::orbit::WallSystem;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fixture {
    pub name: &'static str,
    pub file: &'static str,
    pub description: &'static str,
    pub contents: &'static str,
}

macro_rules! fixture {
    ($name:expr, $file:expr, $desc:expr) => {
        Fixture { name: $name, file: $file, description: $desc, contents: include_str!(concat!("../fixtures/", $file)) }
    };
}

pub const ALL: &[Fixture] = &[
    fixture!("apollonian", "apollonian.json", "Descartes quadruple with its dual circles; integral bends -1, 2, 2, 3"),
    fixture!("tetrahedron-target", "tetrahedron.target.json", "Tangency targets for the tetrahedral nerve"),
    fixture!("cuboctahedron", "cuboctahedron.json", "Exact cuboctahedral packing over Q(sqrt 6)"),
    fixture!("cuboctahedron-target", "cuboctahedron.target.json", "Tangency targets for the cuboctahedral nerve"),
    fixture!("hexpyr", "hexpyr.json", "Hexagonal pyramid over Q(sqrt 3); integral but not superintegral"),
    fixture!("hexpyr-target", "hexpyr.target.json", "Tangency targets for the hexagonal pyramid nerve"),
    fixture!("hexpyr-gram", "hexpyr.gram.json", "Published Gram matrix of the hexagonal pyramid supergroup"),
    fixture!("cox6", "cox6.cox", "Six-wall diagram whose first wall forms a cluster on its own"),
    fixture!("eisenstein", "eisenstein.cox", "Five-wall diagram with angle edges of order 3 and 6"),
];

pub fn get(name: &str) -> Result<&'static Fixture> {
    ALL.iter()
        .find(|f| f.name == name || f.file == name)
        .ok_or_else(|| Error::Format(format!("no fixture named {name:?}")))
}

pub fn system(name: &str) -> Result<WallSystem> {
    WallSystem::parse(get(name)?.contents)
}

pub fn target(name: &str) -> Result<TargetSpec> {
    TargetSpec::parse(get(name)?.contents)
}

pub fn diagram(name: &str) -> Result<CoxeterDiagram> {
    CoxeterDiagram::parse(get(name)?.contents)
}

/// The Gram matrix of a `.cox` or Gram JSON fixture.
pub fn gram(name: &str) -> Result<GramMatrix> {
    let f = get(name)?;
    if f.file.ends_with(".cox") {
        gram_from_diagram(&CoxeterDiagram::parse(f.contents)?)
    } else {
        GramMatrix::parse_json(f.contents)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometrize::verify_realization;

    #[test]
    fn every_fixture_loads() {
        for f in ALL {
            let ok = if f.file.ends_with(".target.json") {
                target(f.name).is_ok()
            } else if f.file.ends_with(".gram.json") || f.file.ends_with(".cox") {
                gram(f.name).is_ok()
            } else {
                system(f.name).is_ok()
            };
            assert!(ok, "{}", f.name);
        }
        assert!(get("nope").is_err());
    }

    #[test]
    fn systems_realize_their_targets() {
        for (s, t) in [("apollonian", "tetrahedron-target"), ("cuboctahedron", "cuboctahedron-target"), ("hexpyr", "hexpyr-target")] {
            let r = verify_realization(system(s).unwrap().walls(), &target(t).unwrap());
            assert!(r.ok, "{s}: {:?}", r);
        }
    }
}
