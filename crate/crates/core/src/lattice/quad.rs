//! The quadrangular domain `Q_k` of the triangular lattice.
//!
//! Vertices are the lattice points `(i,j)` with `1 <= i <= n` and
//! `2-i <= j <= k_n`, i.e. the region bounded by the lines `j = k_n`,
//! `i + j = 2`, `i = 1`, `i = n`. Every vertex meets six edge slots:
//! horizontal (W/E), vertical (N/S), and NW-SE diagonal (NW/SE). Slots
//! whose opposite endpoint falls outside the domain are boundary edges
//! with fixed orientation:
//!
//! * west horizontal edges are *used* (incoming flow) exactly at rows
//!   `k_1, ..., k_n`;
//! * the south vertical edge below each bottom vertex `(i, 2-i)` is
//!   *used* (outgoing flow);
//! * every other boundary edge is unused.
//!
//! A configuration is an assignment of used/unused to the internal edges
//! such that used in-degree equals used out-degree at every vertex; these
//! are exactly the edge-disjoint families of `n` paths from the west
//! inlets to the south outlets.

use serde::Serialize;

use super::{BoundarySpec, EdgeId, IceViolation, Orientation, PathFamily20V, Step20};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Quad20V {
    spec: BoundarySpec,
    #[serde(skip)]
    vertices: Vec<(i32, i32)>,
    #[serde(skip)]
    edges: Vec<EdgeId>,
}

impl Quad20V {
    pub fn new(spec: BoundarySpec) -> Self {
        let n = spec.n() as i32;
        let kn = spec.k_n() as i32;
        let mut vertices = Vec::new();
        for j in (2 - n)..=kn {
            for i in 1..=n {
                if j >= 2 - i {
                    vertices.push((i, j));
                }
            }
        }
        let mut domain = Quad20V { spec, vertices, edges: Vec::new() };
        // Canonical edge order: per vertex in row-major bottom-up order,
        // its E, S, SE edges where internal.
        let mut edges = Vec::new();
        for &(i, j) in &domain.vertices {
            for e in [EdgeId::h(i, j), EdgeId::v(i, j), EdgeId::d(i, j)] {
                if domain.edge_internal(e) {
                    edges.push(e);
                }
            }
        }
        domain.edges = edges;
        domain
    }

    pub fn spec(&self) -> &BoundarySpec {
        &self.spec
    }

    pub fn n(&self) -> i32 {
        self.spec.n() as i32
    }

    pub fn kn(&self) -> i32 {
        self.spec.k_n() as i32
    }

    pub fn contains(&self, i: i32, j: i32) -> bool {
        i >= 1 && i <= self.n() && j >= 2 - i && j <= self.kn()
    }

    /// Row-major bottom-up canonical vertex order.
    pub fn vertices(&self) -> &[(i32, i32)] {
        &self.vertices
    }

    pub fn internal_edges(&self) -> &[EdgeId] {
        &self.edges
    }

    pub fn edge_internal(&self, e: EdgeId) -> bool {
        let EdgeId { kind, i, j } = e;
        match kind {
            super::EdgeKind::H => self.contains(i, j) && self.contains(i + 1, j),
            super::EdgeKind::V => self.contains(i, j) && self.contains(i, j - 1),
            super::EdgeKind::D => self.contains(i, j) && self.contains(i + 1, j - 1),
        }
    }

    /// Fixed used in-flow from boundary edges at `(i,j)`: 1 at west inlets.
    pub fn boundary_in_used(&self, i: i32, j: i32) -> u32 {
        (i == 1 && self.spec.is_inlet_row_quad(j)) as u32
    }

    /// Fixed used out-flow from boundary edges at `(i,j)`: 1 at south outlets.
    pub fn boundary_out_used(&self, i: i32, j: i32) -> u32 {
        (j == 2 - i) as u32
    }

    fn used_in(&self, o: &Orientation, i: i32, j: i32) -> u32 {
        o.used(EdgeId::h(i - 1, j)) as u32
            + o.used(EdgeId::d(i - 1, j + 1)) as u32
            + o.used(EdgeId::v(i, j + 1)) as u32
            + self.boundary_in_used(i, j)
    }

    fn used_out(&self, o: &Orientation, i: i32, j: i32) -> u32 {
        o.used(EdgeId::h(i, j)) as u32
            + o.used(EdgeId::v(i, j)) as u32
            + o.used(EdgeId::d(i, j)) as u32
            + self.boundary_out_used(i, j)
    }

    /// Check the ice rule everywhere. Empty result means valid; otherwise
    /// every foreign edge and every unbalanced vertex is reported.
    pub fn validate_ice(&self, o: &Orientation) -> Vec<IceViolation> {
        let mut out = Vec::new();
        for &e in o.iter() {
            if !self.edge_internal(e) {
                out.push(IceViolation::ForeignEdge { edge: e });
            }
        }
        for &(i, j) in &self.vertices {
            let used_in = self.used_in(o, i, j);
            let used_out = self.used_out(o, i, j);
            if used_in != used_out {
                out.push(IceViolation::Unbalanced { i, j, used_in, used_out });
            }
        }
        out
    }

    /// Mark the edges of a path family as used. Fails on steps leaving the
    /// domain, edge collisions between paths, or a path ending away from
    /// its outlet `(ell, 2-ell)`.
    pub fn paths_to_orientation(&self, fam: &PathFamily20V) -> Result<Orientation> {
        if fam.spec != self.spec {
            return Err(Error::InvalidConfig(format!(
                "path family is for {} but domain is {}",
                fam.spec, self.spec
            )));
        }
        if fam.paths.len() != self.spec.n() {
            return Err(Error::InvalidConfig(format!(
                "expected {} paths, got {}",
                self.spec.n(),
                fam.paths.len()
            )));
        }
        let mut o = Orientation::new();
        for (idx, path) in fam.paths.iter().enumerate() {
            let ell = (idx + 1) as i32;
            let mut i = 1;
            let mut j = self.spec.k_of(idx + 1) as i32;
            for &s in path {
                let e = match s {
                    Step20::R => EdgeId::h(i, j),
                    Step20::D => EdgeId::v(i, j),
                    Step20::S => EdgeId::d(i, j),
                };
                if !self.edge_internal(e) {
                    return Err(Error::InvalidConfig(format!(
                        "path {ell} leaves the domain stepping {:?} from ({i},{j})",
                        s.as_char()
                    )));
                }
                if !o.insert(e) {
                    return Err(Error::InvalidConfig(format!(
                        "paths overlap on edge {e} (path {ell})"
                    )));
                }
                match s {
                    Step20::R => i += 1,
                    Step20::D => j -= 1,
                    Step20::S => {
                        i += 1;
                        j -= 1;
                    }
                }
            }
            if (i, j) != (ell, 2 - ell) {
                return Err(Error::InvalidConfig(format!(
                    "path {ell} ends at ({i},{j}), expected ({ell},{})",
                    2 - ell
                )));
            }
        }
        debug_assert!(self.validate_ice(&o).is_empty());
        Ok(o)
    }

    /// Decompose a valid orientation into its path family. Where several
    /// paths meet a vertex, in- and out-slots pair up in the planar
    /// non-crossing order: in-slots N, NW, W correspond positionally to
    /// out-slots E, SE, S (restricted to the used ones).
    pub fn orientation_to_paths(&self, o: &Orientation) -> Result<PathFamily20V> {
        let violations = self.validate_ice(o);
        if let Some(v) = violations.first() {
            return Err(Error::InvalidConfig(format!(
                "not an ice configuration: {v} ({} violations)",
                violations.len()
            )));
        }
        let mut remaining = o.clone();
        let mut paths = Vec::with_capacity(self.spec.n());
        for ell in 1..=self.n() {
            let mut steps = Vec::new();
            let mut i = 1;
            let mut j = self.spec.k_of(ell as usize) as i32;
            // Arrival slot: 0 = N, 1 = NW, 2 = W. Entry is through the west
            // boundary inlet.
            let mut slot = 2u32;
            loop {
                let ins = [
                    o.used(EdgeId::v(i, j + 1)),
                    o.used(EdgeId::d(i - 1, j + 1)),
                    o.used(EdgeId::h(i - 1, j)) || self.boundary_in_used(i, j) == 1,
                ];
                let outs = [
                    o.used(EdgeId::h(i, j)),
                    o.used(EdgeId::d(i, j)),
                    o.used(EdgeId::v(i, j)) || self.boundary_out_used(i, j) == 1,
                ];
                debug_assert!(ins[slot as usize]);
                let rank = ins[..slot as usize].iter().filter(|&&b| b).count();
                let out_slot = outs
                    .iter()
                    .enumerate()
                    .filter(|(_, &b)| b)
                    .map(|(s, _)| s)
                    .nth(rank)
                    .expect("balanced vertex has an out-slot per in-slot");
                let (step, edge) = match out_slot {
                    0 => (Step20::R, EdgeId::h(i, j)),
                    1 => (Step20::S, EdgeId::d(i, j)),
                    _ => (Step20::D, EdgeId::v(i, j)),
                };
                if out_slot == 2 && self.boundary_out_used(i, j) == 1 {
                    // South outlet: the path is complete.
                    if (i, j) != (ell, 2 - ell) {
                        return Err(Error::InvalidConfig(format!(
                            "path from inlet row {} exits at ({i},{j}), expected ({ell},{})",
                            self.spec.k_of(ell as usize),
                            2 - ell
                        )));
                    }
                    break;
                }
                remaining.remove(edge);
                steps.push(step);
                match step {
                    Step20::R => i += 1,
                    Step20::D => j -= 1,
                    Step20::S => {
                        i += 1;
                        j -= 1;
                    }
                }
                slot = match step {
                    Step20::R => 2,
                    Step20::D => 0,
                    Step20::S => 1,
                };
            }
            paths.push(steps);
        }
        if !remaining.is_empty() {
            return Err(Error::InvalidConfig(format!(
                "{} used edges not visited by any path",
                remaining.len()
            )));
        }
        Ok(PathFamily20V { spec: self.spec.clone(), paths })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::EdgeKind;

    fn quad(k: &[u32]) -> Quad20V {
        Quad20V::new(BoundarySpec::new(k.to_vec()).unwrap())
    }

    #[test]
    fn single_vertex_domain() {
        let q = quad(&[1]);
        assert_eq!(q.vertices(), &[(1, 1)]);
        assert!(q.internal_edges().is_empty());
        assert_eq!(q.boundary_in_used(1, 1), 1);
        assert_eq!(q.boundary_out_used(1, 1), 1);
        let fam = PathFamily20V { spec: q.spec().clone(), paths: vec![vec![]] };
        let o = q.paths_to_orientation(&fam).unwrap();
        assert!(o.is_empty());
        assert_eq!(q.orientation_to_paths(&o).unwrap(), fam);
    }

    #[test]
    fn domain_2346_dimensions() {
        let q = quad(&[2, 3, 4, 6]);
        // Columns i = 1..4 hold rows 2-i..6: 6 + 7 + 8 + 9 vertices.
        assert_eq!(q.vertices().len(), 30);
        let h = q.internal_edges().iter().filter(|e| e.kind == EdgeKind::H).count();
        let v = q.internal_edges().iter().filter(|e| e.kind == EdgeKind::V).count();
        let d = q.internal_edges().iter().filter(|e| e.kind == EdgeKind::D).count();
        assert_eq!((h, v, d), (21, 26, 21));
        // Staircase diagonals along i+j=2 are internal.
        assert!(q.edge_internal(EdgeId::d(1, 1)));
        assert!(q.edge_internal(EdgeId::d(3, -1)));
        assert!(!q.edge_internal(EdgeId::d(4, -2)));
    }

    #[test]
    fn rejects_out_of_domain_and_overlap() {
        let q = quad(&[1, 2]);
        // Path 2 stepping D twice from (1,2) exits the domain at (1,0).
        let bad = PathFamily20V {
            spec: q.spec().clone(),
            paths: vec![vec![], vec![Step20::D, Step20::D, Step20::R]],
        };
        assert!(q.paths_to_orientation(&bad).is_err());
        // Wrong endpoint.
        let bad2 = PathFamily20V {
            spec: q.spec().clone(),
            paths: vec![vec![], vec![Step20::D, Step20::D]],
        };
        assert!(q.paths_to_orientation(&bad2).is_err());
    }

    #[test]
    fn round_trip_all_families_12() {
        // Q_(1,2): path 1 is the empty path at (1,1); path 2 runs (1,2) ->
        // (2,0). Exactly four step sequences stay inside the domain.
        let q = quad(&[1, 2]);
        let candidates = [
            vec![Step20::R, Step20::D, Step20::D],
            vec![Step20::D, Step20::R, Step20::D],
            vec![Step20::D, Step20::S],
            vec![Step20::S, Step20::D],
        ];
        for p2 in candidates {
            let fam = PathFamily20V { spec: q.spec().clone(), paths: vec![vec![], p2] };
            let o = q.paths_to_orientation(&fam).unwrap();
            assert!(q.validate_ice(&o).is_empty());
            assert_eq!(q.orientation_to_paths(&o).unwrap(), fam);
        }
    }

    #[test]
    fn validate_reports_both_endpoints_of_a_flipped_edge() {
        let q = quad(&[1, 2]);
        let fam = PathFamily20V {
            spec: q.spec().clone(),
            paths: vec![vec![], vec![Step20::D, Step20::S]],
        };
        let mut o = q.paths_to_orientation(&fam).unwrap();
        // Reverse one internal edge: both endpoints become unbalanced.
        o.toggle(EdgeId::h(1, 2));
        let violations = q.validate_ice(&o);
        let unbalanced: Vec<_> = violations
            .iter()
            .filter_map(|v| match v {
                IceViolation::Unbalanced { i, j, .. } => Some((*i, *j)),
                _ => None,
            })
            .collect();
        assert_eq!(unbalanced, vec![(1, 2), (2, 2)]);
    }
}
