//! Lattice domains, boundary conditions, and configuration representations.
//!
//! Two domains are supported: the quadrangular domain `Q_k` on the
//! triangular lattice ([`Quad20V`]) and the rectangular domain `M_k` on the
//! square lattice ([`RectM6V`]), both determined by a strictly increasing
//! sequence `k`. Configurations are stored canonically as the set of
//! *used* edges: an edge is used exactly when it is oriented rightward,
//! downward, or (on the triangular lattice) southeastward. This makes the
//! osculating-path resolution unambiguous: configuration identity is the
//! used-edge set, not any particular step decomposition.

mod quad;
mod rect;

pub use quad::Quad20V;
pub use rect::RectM6V;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Strictly increasing sequence of positive integers fixing the boundary.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct BoundarySpec {
    k: Vec<u32>,
}

impl BoundarySpec {
    pub fn new(k: Vec<u32>) -> Result<Self> {
        if k.is_empty() {
            return Err(Error::InvalidBoundary("empty sequence".into()));
        }
        if k[0] == 0 {
            return Err(Error::InvalidBoundary("entries must be positive".into()));
        }
        if k.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidBoundary(format!("{k:?} is not strictly increasing")));
        }
        Ok(BoundarySpec { k })
    }

    pub fn n(&self) -> usize {
        self.k.len()
    }

    pub fn k(&self) -> &[u32] {
        &self.k
    }

    /// `k_ell`, 1-based.
    pub fn k_of(&self, ell: usize) -> u32 {
        self.k[ell - 1]
    }

    pub fn k_n(&self) -> u32 {
        *self.k.last().unwrap()
    }

    /// Row `j` carries an incoming (used) west edge of `Q_k`.
    pub fn is_inlet_row_quad(&self, j: i32) -> bool {
        j > 0 && self.k.binary_search(&(j as u32)).is_ok()
    }

    /// Row `j` carries an incoming (used) west edge of `M_k`
    /// (the odd rows `2k_ell - 1`).
    pub fn is_inlet_row_rect(&self, j: i32) -> bool {
        j > 0 && j % 2 == 1 && self.k.binary_search(&(((j + 1) / 2) as u32)).is_ok()
    }
}

impl TryFrom<Vec<u32>> for BoundarySpec {
    type Error = Error;
    fn try_from(k: Vec<u32>) -> Result<Self> {
        BoundarySpec::new(k)
    }
}

impl From<BoundarySpec> for Vec<u32> {
    fn from(s: BoundarySpec) -> Vec<u32> {
        s.k
    }
}

impl fmt::Display for BoundarySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (idx, v) in self.k.iter().enumerate() {
            if idx > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

/// Edge kinds. `H(i,j)` joins `(i,j)-(i+1,j)`, `V(i,j)` joins
/// `(i,j)-(i,j-1)` (anchored at its upper endpoint), and `D(i,j)` joins
/// `(i,j)-(i+1,j-1)` (the NW-SE diagonal, triangular lattice only).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EdgeKind {
    H,
    V,
    D,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeId {
    pub kind: EdgeKind,
    pub i: i32,
    pub j: i32,
}

impl EdgeId {
    pub fn h(i: i32, j: i32) -> Self {
        EdgeId { kind: EdgeKind::H, i, j }
    }
    pub fn v(i: i32, j: i32) -> Self {
        EdgeId { kind: EdgeKind::V, i, j }
    }
    pub fn d(i: i32, j: i32) -> Self {
        EdgeId { kind: EdgeKind::D, i, j }
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}({},{})", self.kind, self.i, self.j)
    }
}

/// Set of used internal edges of a domain. Together with the fixed
/// boundary orientation this determines the full edge orientation: a used
/// edge points rightward/downward/southeastward, an unused one the
/// opposite way.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Orientation {
    used: BTreeSet<EdgeId>,
}

impl Orientation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_edges<I: IntoIterator<Item = EdgeId>>(edges: I) -> Self {
        Orientation { used: edges.into_iter().collect() }
    }

    pub fn used(&self, e: EdgeId) -> bool {
        self.used.contains(&e)
    }

    pub fn len(&self) -> usize {
        self.used.len()
    }

    pub fn is_empty(&self) -> bool {
        self.used.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &EdgeId> {
        self.used.iter()
    }

    pub fn insert(&mut self, e: EdgeId) -> bool {
        self.used.insert(e)
    }

    pub fn remove(&mut self, e: EdgeId) -> bool {
        self.used.remove(&e)
    }

    /// Toggle an edge, returning its new state.
    pub fn toggle(&mut self, e: EdgeId) -> bool {
        if !self.used.remove(&e) {
            self.used.insert(e);
            true
        } else {
            false
        }
    }
}

/// One defect found by ice-rule validation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum IceViolation {
    /// The orientation references an edge that is not internal to the domain.
    ForeignEdge { edge: EdgeId },
    /// Used in-degree and used out-degree differ at a vertex.
    Unbalanced { i: i32, j: i32, used_in: u32, used_out: u32 },
}

impl fmt::Display for IceViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IceViolation::ForeignEdge { edge } => write!(f, "foreign edge {edge}"),
            IceViolation::Unbalanced { i, j, used_in, used_out } => {
                write!(f, "vertex ({i},{j}) has {used_in} used in-edges vs {used_out} used out-edges")
            }
        }
    }
}

/// Steps of an osculating Schroeder path on `Q_k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Step20 {
    /// Rightward: `(i,j) -> (i+1,j)`.
    R,
    /// Downward: `(i,j) -> (i,j-1)`.
    D,
    /// Southeast diagonal: `(i,j) -> (i+1,j-1)`.
    S,
}

impl Step20 {
    pub fn as_char(self) -> char {
        match self {
            Step20::R => 'R',
            Step20::D => 'D',
            Step20::S => 'S',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'R' => Some(Step20::R),
            'D' => Some(Step20::D),
            'S' => Some(Step20::S),
            _ => None,
        }
    }
}

/// Steps of an osculating lattice path on `M_k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Step6 {
    R,
    D,
}

impl Step6 {
    pub fn as_char(self) -> char {
        match self {
            Step6::R => 'R',
            Step6::D => 'D',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'R' => Some(Step6::R),
            'D' => Some(Step6::D),
            _ => None,
        }
    }
}

/// Family of `n` osculating Schroeder paths on `Q_k`; path `ell` runs from
/// `(1, k_ell)` to `(ell, 2-ell)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PathFamily20V {
    pub spec: BoundarySpec,
    pub paths: Vec<Vec<Step20>>,
}

/// Family of `n` osculating lattice paths on `M_k`; path `ell` runs from
/// `(1, 2k_ell - 1)` to `(ell, 1)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PathFamily6V {
    pub spec: BoundarySpec,
    pub paths: Vec<Vec<Step6>>,
}

// Configurations serialize as {"k":[...],"model":...,"paths":[["R","D"],...]}.
// The model tag guards against feeding a 6V family where a 20V one is
// expected when replaying counterexamples.

#[derive(Serialize, Deserialize)]
struct FamilyJson {
    k: Vec<u32>,
    model: String,
    paths: Vec<Vec<String>>,
}

fn steps_to_json<T: Copy>(paths: &[Vec<T>], to_char: fn(T) -> char) -> Vec<Vec<String>> {
    paths
        .iter()
        .map(|p| p.iter().map(|&s| to_char(s).to_string()).collect())
        .collect()
}

fn steps_from_json<T>(
    raw: &[Vec<String>],
    from_char: fn(char) -> Option<T>,
) -> std::result::Result<Vec<Vec<T>>, String> {
    raw.iter()
        .map(|p| {
            p.iter()
                .map(|s| {
                    let mut chars = s.chars();
                    match (chars.next(), chars.next()) {
                        (Some(c), None) => from_char(c).ok_or_else(|| format!("bad step {s:?}")),
                        _ => Err(format!("bad step {s:?}")),
                    }
                })
                .collect()
        })
        .collect()
}

impl Serialize for PathFamily20V {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        FamilyJson {
            k: self.spec.k().to_vec(),
            model: "20v".into(),
            paths: steps_to_json(&self.paths, Step20::as_char),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for PathFamily20V {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = FamilyJson::deserialize(de)?;
        if raw.model != "20v" {
            return Err(D::Error::custom(format!("expected model \"20v\", got {:?}", raw.model)));
        }
        let spec = BoundarySpec::new(raw.k).map_err(D::Error::custom)?;
        let paths = steps_from_json(&raw.paths, Step20::from_char).map_err(D::Error::custom)?;
        Ok(PathFamily20V { spec, paths })
    }
}

impl Serialize for PathFamily6V {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        FamilyJson {
            k: self.spec.k().to_vec(),
            model: "m6v".into(),
            paths: steps_to_json(&self.paths, Step6::as_char),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for PathFamily6V {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = FamilyJson::deserialize(de)?;
        if raw.model != "m6v" {
            return Err(D::Error::custom(format!("expected model \"m6v\", got {:?}", raw.model)));
        }
        let spec = BoundarySpec::new(raw.k).map_err(D::Error::custom)?;
        let paths = steps_from_json(&raw.paths, Step6::from_char).map_err(D::Error::custom)?;
        Ok(PathFamily6V { spec, paths })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boundary_spec_rejects_bad_sequences() {
        assert!(BoundarySpec::new(vec![]).is_err());
        assert!(BoundarySpec::new(vec![0, 1]).is_err());
        assert!(BoundarySpec::new(vec![1, 1]).is_err());
        assert!(BoundarySpec::new(vec![2, 1]).is_err());
        assert!(BoundarySpec::new(vec![1, 2, 5]).is_ok());
    }

    #[test]
    fn inlet_rows() {
        let s = BoundarySpec::new(vec![2, 3, 4, 6]).unwrap();
        assert!(s.is_inlet_row_quad(2) && s.is_inlet_row_quad(6));
        assert!(!s.is_inlet_row_quad(5) && !s.is_inlet_row_quad(0));
        // M_k inlets sit at rows 2k-1: here 3, 5, 7, 11.
        for j in [3, 5, 7, 11] {
            assert!(s.is_inlet_row_rect(j), "row {j}");
        }
        for j in [1, 2, 4, 6, 8, 9, 10] {
            assert!(!s.is_inlet_row_rect(j), "row {j}");
        }
    }

    #[test]
    fn family_json_round_trip() {
        let spec = BoundarySpec::new(vec![1, 2]).unwrap();
        let fam = PathFamily20V {
            spec,
            paths: vec![vec![Step20::D], vec![Step20::S, Step20::D]],
        };
        let js = serde_json::to_string(&fam).unwrap();
        assert!(js.contains("\"model\":\"20v\""));
        let back: PathFamily20V = serde_json::from_str(&js).unwrap();
        assert_eq!(fam, back);
        // A 6V family must not deserialize as 20V.
        let js6 = js.replace("\"20v\"", "\"m6v\"");
        assert!(serde_json::from_str::<PathFamily20V>(&js6).is_err());
    }
}
