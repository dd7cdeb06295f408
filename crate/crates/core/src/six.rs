//! The mixed six-vertex model on rectangular domains `M_k`.
//!
//! Configurations are families of non-crossing lattice paths with steps
//! east and south. Each vertex gets one of six local types from its used
//! edges; odd lattice rows carry the horizontal-vertical weight family and
//! even rows the vertical-diagonal family. The central statistic is the
//! variant inversion number `ic`, which turns the exact weight of a
//! configuration into a plain power of two once the domain prefactor is
//! applied.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::lattice::{BoundarySpec, EdgeId, Orientation, PathFamily6V, RectM6V, Step6};
use crate::ring::{vertex_weight, Family, Letter, WeightMonomial};

/// The six admissible local states of a degree-4 vertex.
///
/// Numbering follows the used-edge pattern, with W/N the in-slots and E/S
/// the out-slots: T1 all four, T2 none, T3 through horizontally, T4
/// through vertically, T5 west-to-south, T6 north-to-east.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum VertexType {
    T1,
    T2,
    T3,
    T4,
    T5,
    T6,
}

impl VertexType {
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn letter(self) -> Letter {
        match self {
            VertexType::T1 | VertexType::T2 => Letter::A,
            VertexType::T3 | VertexType::T4 => Letter::B,
            VertexType::T5 | VertexType::T6 => Letter::C,
        }
    }
}

/// Classify a vertex from its (west, east, north, south) used flags.
pub fn classify(w: bool, e: bool, n: bool, s: bool) -> Result<VertexType> {
    match (w, e, n, s) {
        (true, true, true, true) => Ok(VertexType::T1),
        (false, false, false, false) => Ok(VertexType::T2),
        (true, true, false, false) => Ok(VertexType::T3),
        (false, false, true, true) => Ok(VertexType::T4),
        (true, false, false, true) => Ok(VertexType::T5),
        (false, true, true, false) => Ok(VertexType::T6),
        _ => Err(Error::InvalidConfig(format!(
            "unbalanced vertex: west={w} east={e} north={n} south={s}"
        ))),
    }
}

/// Weight family of a lattice row: odd rows pair horizontal with vertical
/// lines, even rows vertical with diagonal.
pub fn row_family(j: i32) -> Family {
    if j % 2 == 1 {
        Family::HV
    } else {
        Family::VD
    }
}

pub fn vertex_type(rect: &RectM6V, o: &Orientation, i: i32, j: i32) -> Result<VertexType> {
    let (w, e, n, s) = rect.used_wens(o, i, j);
    classify(w, e, n, s)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RowTypeCounts {
    pub row: i32,
    /// Count of T1..T6 vertices in this row, in type order.
    pub counts: [u64; 6],
}

/// Per-row vertex type tallies, bottom row first.
pub fn row_stats(rect: &RectM6V, o: &Orientation) -> Result<Vec<RowTypeCounts>> {
    let mut out = Vec::new();
    for j in 1..=rect.rows() {
        let mut counts = [0u64; 6];
        for i in 1..=rect.n() {
            counts[vertex_type(rect, o, i, j)?.index()] += 1;
        }
        out.push(RowTypeCounts { row: j, counts });
    }
    Ok(out)
}

/// The variant inversion number: type-1 vertices in even rows plus type-3
/// vertices in odd rows.
pub fn ic(rect: &RectM6V, o: &Orientation) -> Result<u64> {
    let mut total = 0;
    for j in 1..=rect.rows() {
        for i in 1..=rect.n() {
            let t = vertex_type(rect, o, i, j)?;
            let odd = j % 2 == 1;
            if (t == VertexType::T1 && !odd) || (t == VertexType::T3 && odd) {
                total += 1;
            }
        }
    }
    Ok(total)
}

/// Exact weight of a configuration: the product of its vertex weights.
pub fn omega(rect: &RectM6V, o: &Orientation) -> Result<WeightMonomial> {
    let mut w = WeightMonomial::one();
    for j in 1..=rect.rows() {
        let fam = row_family(j);
        for i in 1..=rect.n() {
            let t = vertex_type(rect, o, i, j)?;
            w = w.mul(&vertex_weight(fam, t.letter()));
        }
    }
    Ok(w)
}

/// Sign matrix of a configuration: type-5 vertices become +1, type-6
/// become -1, everything else 0. Matrix rows run top lattice row first.
pub fn sign_matrix(rect: &RectM6V, o: &Orientation) -> Result<Vec<Vec<i8>>> {
    let mut rows = Vec::new();
    for j in (1..=rect.rows()).rev() {
        let mut row = Vec::new();
        for i in 1..=rect.n() {
            row.push(match vertex_type(rect, o, i, j)? {
                VertexType::T5 => 1,
                VertexType::T6 => -1,
                _ => 0,
            });
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Generalized inversion number of a sign matrix: the sum of
/// `A[r'][c] * A[r][c']` over row pairs r' < r and column pairs c' <= c.
pub fn inv(a: &[Vec<i8>]) -> i64 {
    let mut total = 0i64;
    for r2 in 1..a.len() {
        for r1 in 0..r2 {
            for c2 in 0..a[r2].len() {
                for c1 in 0..=c2 {
                    total += a[r1][c2] as i64 * a[r2][c1] as i64;
                }
            }
        }
    }
    total
}

#[derive(Clone, Debug)]
pub struct EnumerationM6V {
    pub families: Vec<PathFamily6V>,
    pub truncated: bool,
}

/// All configurations of `M_k` as path families in lexicographic step
/// order (R < D).
pub fn enumerate_m6v(rect: &RectM6V, limit: Option<usize>, caps: &Caps) -> Result<EnumerationM6V> {
    let mut st = EnumM6 {
        rect,
        limit,
        caps: *caps,
        families: Vec::new(),
        truncated: false,
        used: Orientation::new(),
        through: BTreeMap::new(),
        paths: Vec::new(),
    };
    st.paths_from(1)?;
    Ok(EnumerationM6V { families: st.families, truncated: st.truncated })
}

struct EnumM6<'a> {
    rect: &'a RectM6V,
    limit: Option<usize>,
    caps: Caps,
    families: Vec<PathFamily6V>,
    truncated: bool,
    used: Orientation,
    /// In-slots are ordered N, W and out-slots E, S; order-preserving
    /// pairings pick the non-crossing representative at shared vertices.
    through: BTreeMap<(i32, i32), Vec<(u8, u8)>>,
    paths: Vec<Vec<Step6>>,
}

impl EnumM6<'_> {
    fn paths_from(&mut self, ell: i32) -> Result<bool> {
        if ell > self.rect.n() {
            if let Some(lim) = self.limit {
                if self.families.len() >= lim {
                    self.truncated = true;
                    return Ok(false);
                }
            }
            self.caps.check_configs(self.families.len() as u64)?;
            self.families.push(PathFamily6V {
                spec: self.rect.spec().clone(),
                paths: self.paths.clone(),
            });
            return Ok(true);
        }
        let start_j = 2 * self.rect.spec().k_of(ell as usize) as i32 - 1;
        let mut steps = Vec::new();
        self.route(ell, 1, start_j, 1, &mut steps)
    }

    fn route(&mut self, ell: i32, i: i32, j: i32, in_slot: u8, steps: &mut Vec<Step6>) -> Result<bool> {
        if (i, j) == (ell, 1) {
            let pairs = self.through.get(&(i, j)).map_or(&[][..], |v| v);
            if !slots_nested(pairs, in_slot, 1) {
                return Ok(true);
            }
            self.through.entry((i, j)).or_default().push((in_slot, 1));
            self.paths.push(steps.clone());
            let more = self.paths_from(ell + 1)?;
            self.paths.pop();
            self.through.get_mut(&(i, j)).unwrap().pop();
            return Ok(more);
        }
        for step in [Step6::R, Step6::D] {
            let (ni, nj, out_slot, next_in, edge) = match step {
                Step6::R => (i + 1, j, 0, 1, EdgeId::h(i, j)),
                Step6::D => (i, j - 1, 1, 0, EdgeId::v(i, j)),
            };
            if ni > ell || nj < 1 || !self.rect.contains(ni, nj) {
                continue;
            }
            let pairs = self.through.get(&(i, j)).map_or(&[][..], |v| v);
            if !slots_nested(pairs, in_slot, out_slot) {
                continue;
            }
            if !self.used.insert(edge) {
                continue;
            }
            self.through.entry((i, j)).or_default().push((in_slot, out_slot));
            steps.push(step);
            let more = self.route(ell, ni, nj, next_in, steps)?;
            steps.pop();
            self.through.get_mut(&(i, j)).unwrap().pop();
            self.used.remove(edge);
            if !more {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn slots_nested(pairs: &[(u8, u8)], in_slot: u8, out_slot: u8) -> bool {
    pairs.iter().all(|&(ib, ob)| (in_slot < ib) == (out_slot < ob))
}

#[derive(Clone, Debug, Serialize)]
pub struct WeightedCountM6V {
    pub k: Vec<u32>,
    pub configs: u64,
    /// Sum of 2^ic over all configurations.
    #[serde(serialize_with = "crate::twenty::ser_biguint")]
    pub total: BigUint,
}

/// Sum of `2^ic` over every configuration, by explicit enumeration.
pub fn weighted_count_m6v(rect: &RectM6V, caps: &Caps) -> Result<WeightedCountM6V> {
    let e = enumerate_m6v(rect, None, caps)?;
    let mut total = BigUint::zero();
    for f in &e.families {
        let o = rect.paths_to_orientation(f)?;
        total += BigUint::one() << ic(rect, &o)?;
    }
    Ok(WeightedCountM6V {
        k: rect.spec().k().to_vec(),
        configs: e.families.len() as u64,
        total,
    })
}

/// The frozen maximal configuration: path `l` runs east to its target
/// column, then straight south.
pub fn x_max(spec: &BoundarySpec) -> PathFamily6V {
    let paths = (1..=spec.n())
        .map(|ell| {
            let mut p = vec![Step6::R; ell - 1];
            p.extend(std::iter::repeat_n(Step6::D, 2 * spec.k_of(ell) as usize - 2));
            p
        })
        .collect();
    PathFamily6V { spec: spec.clone(), paths }
}

/// Cells of the flip involution, addressed by their SW corner vertex.
/// A cell is flippable when its used edges form one of the two turning
/// patterns through the cell.
pub fn flippable_cells(rect: &RectM6V, o: &Orientation) -> Vec<(i32, i32)> {
    let mut out = Vec::new();
    for i in 1..rect.n() {
        for j in 1..rect.rows() {
            if cell_pattern(o, i, j).is_some() {
                out.push((i, j));
            }
        }
    }
    out
}

fn cell_edges(i: i32, j: i32) -> [EdgeId; 4] {
    // top, right, bottom, left
    [EdgeId::h(i, j + 1), EdgeId::v(i + 1, j + 1), EdgeId::h(i, j), EdgeId::v(i, j + 1)]
}

fn cell_pattern(o: &Orientation, i: i32, j: i32) -> Option<bool> {
    let [top, right, bottom, left] = cell_edges(i, j).map(|e| o.used(e));
    if top && right && !bottom && !left {
        Some(true) // north-east turn
    } else if !top && !right && bottom && left {
        Some(false) // south-west turn
    } else {
        None
    }
}

/// Flip the turn through cell `(i, j)`, returning the new configuration
/// and the exact change of `ic` computed from the four corner vertices
/// alone.
pub fn corner_flip(rect: &RectM6V, o: &Orientation, i: i32, j: i32) -> Result<(Orientation, i64)> {
    if i < 1 || i >= rect.n() || j < 1 || j >= rect.rows() {
        return Err(Error::InvalidConfig(format!("cell ({i},{j}) out of range")));
    }
    if cell_pattern(o, i, j).is_none() {
        return Err(Error::InvalidConfig(format!("cell ({i},{j}) is not flippable")));
    }
    let corners = [(i, j), (i + 1, j), (i, j + 1), (i + 1, j + 1)];
    let contrib = |oo: &Orientation| -> Result<i64> {
        let mut c = 0;
        for &(ci, cj) in &corners {
            let t = vertex_type(rect, oo, ci, cj)?;
            let odd = cj % 2 == 1;
            if (t == VertexType::T1 && !odd) || (t == VertexType::T3 && odd) {
                c += 1;
            }
        }
        Ok(c)
    };
    let before = contrib(o)?;
    let mut flipped = o.clone();
    for e in cell_edges(i, j) {
        flipped.toggle(e);
    }
    let after = contrib(&flipped)?;
    Ok((flipped, after - before))
}
