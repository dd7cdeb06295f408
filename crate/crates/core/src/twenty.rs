//! Enumeration and counting of 20V configurations on `Q_k`.
//!
//! Three independent routes are kept deliberately separate and
//! cross-checked in tests:
//!
//! * [`enumerate_20v`]: explicit path-by-path backtracking, emitting
//!   families in lexicographic step order;
//! * [`count_20v`]: column-sweep dynamic programming over used crossing
//!   edges, no materialization;
//! * [`count_20v_oracle`]: dumb vertex-by-vertex orientation backtracking
//!   with no path machinery at all, for differential testing. If the
//!   others disagree with the oracle, the oracle is right.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::lattice::{EdgeId, Orientation, PathFamily20V, Quad20V, Step20};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CountMethod {
    Explicit,
    Dp,
}

#[derive(Clone, Debug, Serialize)]
pub struct Count20V {
    pub k: Vec<u32>,
    #[serde(serialize_with = "ser_biguint")]
    pub count: BigUint,
    pub method: CountMethod,
}

pub(crate) fn ser_biguint<S: serde::Serializer>(
    v: &BigUint,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

#[derive(Clone, Debug)]
pub struct Enumeration20V {
    pub families: Vec<PathFamily20V>,
    /// True when `limit` cut the stream short.
    pub truncated: bool,
}

/// All 20V configurations of `Q_k`, as path families in lexicographic
/// order of their step sequences (R < D < S, paths compared in order).
pub fn enumerate_20v(q: &Quad20V, limit: Option<usize>, caps: &Caps) -> Result<Enumeration20V> {
    let mut st = Enum20 {
        q,
        limit,
        caps: *caps,
        families: Vec::new(),
        truncated: false,
        used: Orientation::new(),
        through: BTreeMap::new(),
        paths: Vec::new(),
    };
    st.paths_from(1)?;
    Ok(Enumeration20V { families: st.families, truncated: st.truncated })
}

struct Enum20<'a> {
    q: &'a Quad20V,
    limit: Option<usize>,
    caps: Caps,
    families: Vec<PathFamily20V>,
    truncated: bool,
    used: Orientation,
    /// (in-slot, out-slot) pairs of paths already routed through a vertex.
    /// In-slots are ordered N, NW, W and out-slots E, SE, S; a family is
    /// canonical when every pairing is order-preserving, which picks the
    /// unique non-crossing representative of each orientation.
    through: BTreeMap<(i32, i32), Vec<(u8, u8)>>,
    paths: Vec<Vec<Step20>>,
}

fn slots_nested(pairs: &[(u8, u8)], in_slot: u8, out_slot: u8) -> bool {
    pairs.iter().all(|&(ib, ob)| (in_slot < ib) == (out_slot < ob))
}

impl Enum20<'_> {
    /// Extend the family with every route for path `ell`; emit when all
    /// `n` paths are placed. Returns false to abort the whole search.
    fn paths_from(&mut self, ell: i32) -> Result<bool> {
        if ell > self.q.n() {
            if let Some(lim) = self.limit {
                if self.families.len() >= lim {
                    self.truncated = true;
                    return Ok(false);
                }
            }
            self.caps.check_configs(self.families.len() as u64)?;
            self.families.push(PathFamily20V {
                spec: self.q.spec().clone(),
                paths: self.paths.clone(),
            });
            return Ok(true);
        }
        let start_j = self.q.spec().k_of(ell as usize) as i32;
        let mut steps = Vec::new();
        // The inlet is the vertex's west slot.
        self.route(ell, 1, start_j, 2, &mut steps)
    }

    fn route(
        &mut self,
        ell: i32,
        i: i32,
        j: i32,
        in_slot: u8,
        steps: &mut Vec<Step20>,
    ) -> Result<bool> {
        if (i, j) == (ell, 2 - ell) {
            // Exit through the south boundary slot.
            if !slots_nested(self.through.get(&(i, j)).map_or(&[][..], |v| v), in_slot, 2) {
                return Ok(true);
            }
            self.through.entry((i, j)).or_default().push((in_slot, 2));
            self.paths.push(steps.clone());
            let more = self.paths_from(ell + 1)?;
            self.paths.pop();
            self.through.get_mut(&(i, j)).unwrap().pop();
            return Ok(more);
        }
        for step in [Step20::R, Step20::D, Step20::S] {
            let (ni, nj, out_slot, next_in, edge) = match step {
                Step20::R => (i + 1, j, 0, 2, EdgeId::h(i, j)),
                Step20::D => (i, j - 1, 2, 0, EdgeId::v(i, j)),
                Step20::S => (i + 1, j - 1, 1, 1, EdgeId::d(i, j)),
            };
            // Steps never decrease i or increase j, so staying reachable
            // means ni <= ell and nj >= 2-ell.
            if ni > ell || nj < 2 - ell || !self.q.contains(ni, nj) {
                continue;
            }
            if !slots_nested(self.through.get(&(i, j)).map_or(&[][..], |v| v), in_slot, out_slot) {
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

/// Exact count by column-sweep DP. A state records which horizontal and
/// diagonal edges crossing the current column boundary are used; vertices
/// of a column are consumed top-down, threading the vertical carry.
pub fn count_20v(q: &Quad20V, caps: &Caps) -> Result<Count20V> {
    let n = q.n();
    let kn = q.kn();
    // Crossing edges after column i live at rows 2-i..=kn, two bits per row.
    if 2 * (kn + n - 2) > 64 {
        return Err(Error::CapExceeded { what: "dp state width (rows)", cap: 32 });
    }
    let mut states: BTreeMap<u64, BigUint> = BTreeMap::new();
    states.insert(0, BigUint::one());
    for i in 1..=n {
        let mut next: BTreeMap<u64, BigUint> = BTreeMap::new();
        for (&s_in, count) in &states {
            scan_column(q, i, kn, 0, s_in, 0, count, &mut next);
            caps.check_states(next.len() as u64)?;
        }
        states = next;
    }
    // Column n emits no crossing edges, so all mass sits on the empty state.
    debug_assert!(states.keys().all(|&s| s == 0));
    let count = states.remove(&0).unwrap_or_else(BigUint::zero);
    Ok(Count20V { k: q.spec().k().to_vec(), count, method: CountMethod::Dp })
}

/// Used-bit of an incoming crossing edge (between columns i-1 and i).
fn in_bit(s_in: u64, i: i32, kn: i32, row: i32, diagonal: bool) -> u32 {
    if i == 1 {
        return 0;
    }
    let jmin = 3 - i;
    if row < jmin || row > kn {
        return 0;
    }
    let idx = 2 * (row - jmin) as u64 + diagonal as u64;
    ((s_in >> idx) & 1) as u32
}

#[allow(clippy::too_many_arguments)]
fn scan_column(
    q: &Quad20V,
    i: i32,
    j: i32,
    v_carry: u32,
    s_in: u64,
    out_bits: u64,
    count: &BigUint,
    next: &mut BTreeMap<u64, BigUint>,
) {
    let n = q.n();
    let kn = q.kn();
    let jmin = 2 - i;
    if j < jmin {
        debug_assert_eq!(v_carry, 0);
        *next.entry(out_bits).or_insert_with(BigUint::zero) += count;
        return;
    }
    let w = in_bit(s_in, i, kn, j, false);
    let nw = in_bit(s_in, i, kn, j + 1, true);
    let total_in = w + nw + v_carry + q.boundary_in_used(i, j);
    let b_out = q.boundary_out_used(i, j);
    // Out-slots: E and SE exist only west of the last column; S exists as
    // an internal edge above the bottom row, as the fixed outlet on it.
    let has_h = i < n;
    let has_s = j > jmin;
    if total_in < b_out {
        return;
    }
    let need = total_in - b_out;
    for h in 0..=1u32 {
        if h == 1 && (!has_h || h > need) {
            continue;
        }
        for d in 0..=1u32 {
            if d == 1 && (!has_h || h + d > need) {
                continue;
            }
            let s = need - h - d;
            if s > 1 || (s == 1 && !has_s) {
                continue;
            }
            let mut out = out_bits;
            let idx = 2 * (j - jmin) as u64;
            if h == 1 {
                out |= 1 << idx;
            }
            if d == 1 {
                out |= 1 << (idx + 1);
            }
            scan_column(q, i, j - 1, s, s_in, out, count, next);
        }
    }
}

/// Differential-testing oracle: assign out-edge orientations vertex by
/// vertex (column-major, top of each column first) and count complete
/// assignments that satisfy the ice rule. No path machinery, no state
/// merging.
pub fn count_20v_oracle(q: &Quad20V) -> Result<BigUint> {
    const MAX_ORACLE_EDGES: usize = 80;
    if q.internal_edges().len() > MAX_ORACLE_EDGES {
        return Err(Error::CapExceeded {
            what: "oracle internal edges",
            cap: MAX_ORACLE_EDGES as u64,
        });
    }
    let mut order = Vec::new();
    for i in 1..=q.n() {
        for j in ((2 - i)..=q.kn()).rev() {
            order.push((i, j));
        }
    }
    let mut used = Orientation::new();
    let mut count = BigUint::zero();
    oracle_rec(q, &order, 0, &mut used, &mut count);
    Ok(count)
}

fn oracle_rec(
    q: &Quad20V,
    order: &[(i32, i32)],
    pos: usize,
    used: &mut Orientation,
    count: &mut BigUint,
) {
    if pos == order.len() {
        *count += BigUint::one();
        return;
    }
    let (i, j) = order[pos];
    // All in-edges of (i,j) were assigned at earlier vertices.
    let total_in = used.used(EdgeId::h(i - 1, j)) as u32
        + used.used(EdgeId::d(i - 1, j + 1)) as u32
        + used.used(EdgeId::v(i, j + 1)) as u32
        + q.boundary_in_used(i, j);
    let b_out = q.boundary_out_used(i, j);
    if total_in < b_out {
        return;
    }
    let need = total_in - b_out;
    let slots: Vec<EdgeId> = [EdgeId::h(i, j), EdgeId::d(i, j), EdgeId::v(i, j)]
        .into_iter()
        .filter(|&e| q.edge_internal(e))
        .collect();
    let m = slots.len() as u32;
    if need > m {
        return;
    }
    // Choose which of the available out-edges carry the flow.
    for mask in 0u32..(1 << m) {
        if mask.count_ones() != need {
            continue;
        }
        for (b, &e) in slots.iter().enumerate() {
            if mask >> b & 1 == 1 {
                used.insert(e);
            }
        }
        oracle_rec(q, order, pos + 1, used, count);
        for (b, &e) in slots.iter().enumerate() {
            if mask >> b & 1 == 1 {
                used.remove(e);
            }
        }
    }
}

/// Count by full enumeration; the `method` tag records the route.
pub fn count_20v_explicit(q: &Quad20V, caps: &Caps) -> Result<Count20V> {
    let e = enumerate_20v(q, None, caps)?;
    Ok(Count20V {
        k: q.spec().k().to_vec(),
        count: BigUint::from(e.families.len()),
        method: CountMethod::Explicit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::BoundarySpec;

    fn quad(k: &[u32]) -> Quad20V {
        Quad20V::new(BoundarySpec::new(k.to_vec()).unwrap())
    }

    fn enumerate(k: &[u32]) -> Vec<PathFamily20V> {
        enumerate_20v(&quad(k), None, &Caps::default()).unwrap().families
    }

    #[test]
    fn trivial_domains() {
        assert_eq!(enumerate(&[1]).len(), 1);
        assert!(enumerate(&[1])[0].paths[0].is_empty());
        // Single column of two vertices: one forced path.
        assert_eq!(enumerate(&[2]).len(), 1);
        assert_eq!(count_20v_oracle(&quad(&[2])).unwrap(), BigUint::one());
    }

    #[test]
    fn twelve_family_order_and_count() {
        use Step20::{D, R, S};
        let fams = enumerate(&[1, 2]);
        let got: Vec<Vec<Step20>> = fams.iter().map(|f| f.paths[1].clone()).collect();
        assert_eq!(
            got,
            vec![vec![R, D, D], vec![D, R, D], vec![D, S], vec![S, D]],
            "lexicographic emission order"
        );
        // Emitted configurations are valid and distinct as orientations.
        let q = quad(&[1, 2]);
        let mut orientations = std::collections::BTreeSet::new();
        for f in &fams {
            let o = q.paths_to_orientation(f).unwrap();
            assert!(q.validate_ice(&o).is_empty());
            assert!(orientations.insert(format!("{o:?}")));
        }
    }

    #[test]
    fn staircase_counts_match_product_formula() {
        for (n, expect) in [(1u64, 1u64), (2, 4), (3, 60), (4, 3328)] {
            let k: Vec<u32> = (1..=n as u32).collect();
            let c = count_20v(&quad(&k), &Caps::default()).unwrap();
            assert_eq!(c.count, BigUint::from(expect), "n={n}");
            assert_eq!(
                crate::formula::eval_df_formula(n).unwrap().to_string(),
                expect.to_string()
            );
        }
    }

    #[test]
    fn three_routes_agree_small() {
        let caps = Caps::default();
        for kn in 1..=4u32 {
            for k in strictly_increasing(kn, 3) {
                let q = quad(&k);
                let ex = enumerate_20v(&q, None, &caps).unwrap();
                assert!(!ex.truncated);
                let dp = count_20v(&q, &caps).unwrap();
                let oracle = count_20v_oracle(&q).unwrap();
                assert_eq!(dp.count, BigUint::from(ex.families.len()), "k={k:?}");
                assert_eq!(dp.count, oracle, "k={k:?}");
                // Families are canonical: distinct orientations, all valid.
                let mut seen = std::collections::BTreeSet::new();
                for f in &ex.families {
                    let o = q.paths_to_orientation(f).unwrap();
                    assert!(q.validate_ice(&o).is_empty(), "k={k:?}");
                    assert!(seen.insert(format!("{o:?}")), "k={k:?}");
                }
            }
        }
    }

    /// All strictly increasing sequences over 1..=kmax of length 1..=nmax.
    pub(crate) fn strictly_increasing(kmax: u32, nmax: usize) -> Vec<Vec<u32>> {
        let mut out = Vec::new();
        let mut cur = Vec::new();
        fn rec(start: u32, kmax: u32, nmax: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
            if !cur.is_empty() {
                out.push(cur.clone());
            }
            if cur.len() == nmax {
                return;
            }
            for v in start..=kmax {
                cur.push(v);
                rec(v + 1, kmax, nmax, cur, out);
                cur.pop();
            }
        }
        rec(1, kmax, nmax, &mut cur, &mut out);
        out
    }

    #[test]
    fn frozen_regression_counts() {
        // Values derived once from the oracle and pinned.
        for (k, expect) in [(vec![1u32, 3], 6u64), (vec![2, 3, 4, 6], 7760)] {
            let q = quad(&k);
            let dp = count_20v(&q, &Caps::default()).unwrap();
            assert_eq!(dp.count, BigUint::from(expect), "k={k:?}");
            assert_eq!(count_20v_oracle(&q).unwrap(), BigUint::from(expect), "k={k:?}");
        }
    }

    #[test]
    fn truncation_flag() {
        let q = quad(&[1, 2, 3]);
        let full = enumerate_20v(&q, None, &Caps::default()).unwrap();
        assert!(!full.truncated);
        assert_eq!(full.families.len(), 60);
        let cut = enumerate_20v(&q, Some(10), &Caps::default()).unwrap();
        assert!(cut.truncated);
        assert_eq!(cut.families[..], full.families[..10]);
        // A limit at least the total is not a truncation.
        let exact = enumerate_20v(&q, Some(60), &Caps::default()).unwrap();
        assert!(!exact.truncated);
    }

    #[test]
    fn enumeration_is_deterministic() {
        let a = enumerate(&[1, 3]);
        let b = enumerate(&[1, 3]);
        assert_eq!(a, b);
    }

    #[test]
    fn cap_error() {
        let caps = Caps { max_configs: 10, max_states: 1_000_000 };
        let err = enumerate_20v(&quad(&[1, 2, 3]), None, &caps).unwrap_err();
        assert!(matches!(err, Error::CapExceeded { .. }));
    }

    #[test]
    fn count_json_shape() {
        let c = count_20v(&quad(&[1, 2, 3]), &Caps::default()).unwrap();
        let js = serde_json::to_value(&c).unwrap();
        assert_eq!(js["count"], "60");
        assert_eq!(js["method"], "dp");
        assert_eq!(js["k"], serde_json::json!([1, 2, 3]));
    }
}
