//! The rectangular domain `M_k` of the square lattice.
//!
//! Vertices are `(i,j)` with `1 <= i <= n`, `1 <= j <= 2k_n - 1`; rows are
//! numbered bottom-up. Boundary conditions: the west horizontal edge is
//! used (incoming) exactly at the odd rows `2k_ell - 1`; the south
//! vertical edge below every bottom vertex `(i,1)` is used (outgoing);
//! all other boundary edges are unused. Configurations are edge-disjoint
//! families of `n` monotone lattice paths, path `ell` from `(1, 2k_ell-1)`
//! to `(ell, 1)`.

use serde::Serialize;

use super::{BoundarySpec, EdgeId, IceViolation, Orientation, PathFamily6V, Step6};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RectM6V {
    spec: BoundarySpec,
    #[serde(skip)]
    vertices: Vec<(i32, i32)>,
    #[serde(skip)]
    edges: Vec<EdgeId>,
}

impl RectM6V {
    pub fn new(spec: BoundarySpec) -> Self {
        let n = spec.n() as i32;
        let rows = 2 * spec.k_n() as i32 - 1;
        let mut vertices = Vec::new();
        for j in 1..=rows {
            for i in 1..=n {
                vertices.push((i, j));
            }
        }
        let mut domain = RectM6V { spec, vertices, edges: Vec::new() };
        let mut edges = Vec::new();
        for &(i, j) in &domain.vertices {
            for e in [EdgeId::h(i, j), EdgeId::v(i, j)] {
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

    /// Number of lattice rows, `2k_n - 1`.
    pub fn rows(&self) -> i32 {
        2 * self.spec.k_n() as i32 - 1
    }

    pub fn contains(&self, i: i32, j: i32) -> bool {
        i >= 1 && i <= self.n() && j >= 1 && j <= self.rows()
    }

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
            super::EdgeKind::D => false,
        }
    }

    pub fn boundary_in_used(&self, i: i32, j: i32) -> u32 {
        (i == 1 && self.spec.is_inlet_row_rect(j)) as u32
    }

    pub fn boundary_out_used(&self, _i: i32, j: i32) -> u32 {
        (j == 1) as u32
    }

    /// The four used-bits (W, E, N, S) at a vertex, boundary included.
    pub fn used_wens(&self, o: &Orientation, i: i32, j: i32) -> (bool, bool, bool, bool) {
        let w = o.used(EdgeId::h(i - 1, j)) || self.boundary_in_used(i, j) == 1;
        let e = o.used(EdgeId::h(i, j));
        let n = o.used(EdgeId::v(i, j + 1));
        let s = o.used(EdgeId::v(i, j)) || self.boundary_out_used(i, j) == 1;
        (w, e, n, s)
    }

    pub fn validate_ice(&self, o: &Orientation) -> Vec<IceViolation> {
        let mut out = Vec::new();
        for &e in o.iter() {
            if !self.edge_internal(e) {
                out.push(IceViolation::ForeignEdge { edge: e });
            }
        }
        for &(i, j) in &self.vertices {
            let (w, e, n, s) = self.used_wens(o, i, j);
            let used_in = w as u32 + n as u32;
            let used_out = e as u32 + s as u32;
            if used_in != used_out {
                out.push(IceViolation::Unbalanced { i, j, used_in, used_out });
            }
        }
        out
    }

    pub fn paths_to_orientation(&self, fam: &PathFamily6V) -> Result<Orientation> {
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
            let mut j = 2 * self.spec.k_of(idx + 1) as i32 - 1;
            for &s in path {
                let e = match s {
                    Step6::R => EdgeId::h(i, j),
                    Step6::D => EdgeId::v(i, j),
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
                    Step6::R => i += 1,
                    Step6::D => j -= 1,
                }
            }
            if (i, j) != (ell, 1) {
                return Err(Error::InvalidConfig(format!(
                    "path {ell} ends at ({i},{j}), expected ({ell},1)"
                )));
            }
        }
        debug_assert!(self.validate_ice(&o).is_empty());
        Ok(o)
    }

    /// Inverse of [`Self::paths_to_orientation`]. Where two paths kiss at
    /// a vertex (all four edges used) the resolution is non-crossing:
    /// north pairs with east, west with south.
    pub fn orientation_to_paths(&self, o: &Orientation) -> Result<PathFamily6V> {
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
            let mut j = 2 * self.spec.k_of(ell as usize) as i32 - 1;
            // Arrival slot: 0 = N, 1 = W.
            let mut slot = 1u32;
            loop {
                let (w, e, n, s) = self.used_wens(o, i, j);
                let ins = [n, w];
                let outs = [e, s];
                debug_assert!(ins[slot as usize]);
                let rank = ins[..slot as usize].iter().filter(|&&b| b).count();
                let out_slot = outs
                    .iter()
                    .enumerate()
                    .filter(|(_, &b)| b)
                    .map(|(s, _)| s)
                    .nth(rank)
                    .expect("balanced vertex has an out-slot per in-slot");
                if out_slot == 1 && self.boundary_out_used(i, j) == 1 {
                    if (i, j) != (ell, 1) {
                        return Err(Error::InvalidConfig(format!(
                            "path from inlet row {} exits at ({i},{j}), expected ({ell},1)",
                            2 * self.spec.k_of(ell as usize) - 1
                        )));
                    }
                    break;
                }
                let (step, edge) = if out_slot == 0 {
                    (Step6::R, EdgeId::h(i, j))
                } else {
                    (Step6::D, EdgeId::v(i, j))
                };
                remaining.remove(edge);
                steps.push(step);
                match step {
                    Step6::R => i += 1,
                    Step6::D => j -= 1,
                }
                slot = match step {
                    Step6::R => 1,
                    Step6::D => 0,
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
        Ok(PathFamily6V { spec: self.spec.clone(), paths })
    }
}
