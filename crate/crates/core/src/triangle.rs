//! Triangular arrays: barred monotone triangles, triple-free
//! Gelfand-Tsetlin patterns, and the maps connecting them to lattice
//! paths.
//!
//! Barred entries are stored as plain integers through the order-embedding
//! `t -> 2t-1`, `t-bar -> 2t`; an entry is barred exactly when its encoded
//! value is even. `psi1` reads a path family into a barred triangle row by
//! row, `psi2` forgets the bars. The weight `omega_fsa` on patterns and
//! the statistic `ic` on triangles are tied together by exact fiber sums,
//! which decompose further into maximal connected blocks, zigzags, and
//! order ideals of fence posets.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_rational::BigRational as BigRat;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::lattice::{BoundarySpec, PathFamily6V, RectM6V, Step6};

fn check_triangular(rows: &[Vec<u32>]) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::InvalidTriangle("no rows".into()));
    }
    for (i, row) in rows.iter().enumerate() {
        if row.len() != i + 1 {
            return Err(Error::InvalidTriangle(format!(
                "row {} has {} entries, expected {}",
                i + 1,
                row.len(),
                i + 1
            )));
        }
        if row.contains(&0) {
            return Err(Error::InvalidTriangle(format!("row {} has a zero entry", i + 1)));
        }
    }
    Ok(())
}

fn check_interlacing(rows: &[Vec<u32>]) -> Result<()> {
    for i in 1..rows.len() {
        let upper = &rows[i - 1];
        let lower = &rows[i];
        for j in 0..upper.len() {
            if !(lower[j] <= upper[j] && upper[j] <= lower[j + 1]) {
                return Err(Error::InvalidTriangle(format!(
                    "rows {} and {} do not interlace at position {}",
                    i,
                    i + 1,
                    j + 1
                )));
            }
        }
    }
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct TriangleJson {
    rows: Vec<Vec<u32>>,
    barred: bool,
}

/// A monotone triangle over the barred alphabet, stored in encoded form:
/// `t` as `2t-1` and `t-bar` as `2t`. Rows are strictly increasing and
/// consecutive rows interlace weakly, all in encoded order. Row 1 is the
/// single-entry top row.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "TriangleJson", into = "TriangleJson")]
pub struct BarredTriangle {
    rows: Vec<Vec<u32>>,
}

impl BarredTriangle {
    pub fn new(rows: Vec<Vec<u32>>) -> Result<Self> {
        check_triangular(&rows)?;
        for (i, row) in rows.iter().enumerate() {
            if row.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidTriangle(format!(
                    "row {} is not strictly increasing",
                    i + 1
                )));
            }
        }
        check_interlacing(&rows)?;
        Ok(BarredTriangle { rows })
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn bottom(&self) -> &[u32] {
        self.rows.last().unwrap()
    }

    pub fn bottom_unbarred(&self) -> bool {
        self.bottom().iter().all(|&v| v % 2 == 1)
    }
}

impl TryFrom<TriangleJson> for BarredTriangle {
    type Error = Error;
    fn try_from(j: TriangleJson) -> Result<Self> {
        if !j.barred {
            return Err(Error::InvalidTriangle(
                "expected a barred triangle, got barred=false".into(),
            ));
        }
        BarredTriangle::new(j.rows)
    }
}

impl From<BarredTriangle> for TriangleJson {
    fn from(t: BarredTriangle) -> Self {
        TriangleJson { rows: t.rows, barred: true }
    }
}

impl std::fmt::Display for BarredTriangle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for row in &self.rows {
            for (idx, v) in row.iter().enumerate() {
                if idx > 0 {
                    write!(f, " ")?;
                }
                if v % 2 == 1 {
                    write!(f, "{}", v.div_ceil(2))?;
                } else {
                    write!(f, "{}'", v / 2)?;
                }
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// A Gelfand-Tsetlin pattern: weakly increasing rows, weak interlacing.
/// Triple-freeness (no three equal consecutive entries in a row) is a
/// predicate, not a construction invariant.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "TriangleJson", into = "TriangleJson")]
pub struct GTPattern {
    rows: Vec<Vec<u32>>,
}

impl GTPattern {
    pub fn new(rows: Vec<Vec<u32>>) -> Result<Self> {
        check_triangular(&rows)?;
        for (i, row) in rows.iter().enumerate() {
            if row.windows(2).any(|w| w[0] > w[1]) {
                return Err(Error::InvalidTriangle(format!(
                    "row {} is not weakly increasing",
                    i + 1
                )));
            }
        }
        check_interlacing(&rows)?;
        Ok(GTPattern { rows })
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn bottom(&self) -> &[u32] {
        self.rows.last().unwrap()
    }

    pub fn entries(&self) -> u64 {
        (self.n() * (self.n() + 1) / 2) as u64
    }

    pub fn is_triple_free(&self) -> bool {
        self.rows
            .iter()
            .all(|row| row.windows(3).all(|w| !(w[0] == w[1] && w[1] == w[2])))
    }
}

impl TryFrom<TriangleJson> for GTPattern {
    type Error = Error;
    fn try_from(j: TriangleJson) -> Result<Self> {
        if j.barred {
            return Err(Error::InvalidTriangle(
                "expected a plain pattern, got barred=true".into(),
            ));
        }
        GTPattern::new(j.rows)
    }
}

impl From<GTPattern> for TriangleJson {
    fn from(t: GTPattern) -> Self {
        TriangleJson { rows: t.rows, barred: false }
    }
}

impl std::fmt::Display for GTPattern {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for row in &self.rows {
            let strs: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            writeln!(f, "{}", strs.join(" "))?;
        }
        Ok(())
    }
}

/// The statistic whose powers of two weight a barred triangle: vertical
/// equal pairs with barred value plus diagonal equal pairs with unbarred
/// value. "Vertical" pairs a cell with the one directly below-left,
/// "diagonal" with the one below-right.
pub fn ic_triangle(t: &BarredTriangle) -> u64 {
    let rows = t.rows();
    let mut total = 0;
    for i in 0..rows.len() - 1 {
        for j in 0..rows[i].len() {
            if rows[i][j] == rows[i + 1][j] && rows[i][j].is_multiple_of(2) {
                total += 1;
            }
            if rows[i][j] == rows[i + 1][j + 1] && rows[i][j] % 2 == 1 {
                total += 1;
            }
        }
    }
    total
}

/// Number of boxed entries: cells equal to both entries of the equal pair
/// directly above them.
pub fn boxed_entries(t: &GTPattern) -> u64 {
    let rows = t.rows();
    let mut total = 0;
    for i in 1..rows.len() {
        for j in 1..rows[i].len() - 1 {
            if rows[i - 1][j - 1] == rows[i][j] && rows[i][j] == rows[i - 1][j] {
                total += 1;
            }
        }
    }
    total
}

/// The pattern weight `2^(entries - boxed)`.
pub fn omega_fsa(t: &GTPattern) -> BigUint {
    BigUint::one() << (t.entries() - boxed_entries(t))
}

/// Read a path family into a barred triangle: row `i` from the top lists
/// the rows at which paths enter column `n-i+1`, encoded as integers.
pub fn psi1(fam: &PathFamily6V) -> Result<BarredTriangle> {
    let rect = RectM6V::new(fam.spec.clone());
    rect.paths_to_orientation(fam)?;
    let n = rect.n() as usize;
    // entries[l][c] = lattice row at which path l+1 enters column c+1.
    let mut entries: Vec<Vec<u32>> = Vec::with_capacity(n);
    for (idx, steps) in fam.paths.iter().enumerate() {
        let mut j = 2 * fam.spec.k_of(idx + 1) - 1;
        let mut per_col = vec![j];
        for s in steps {
            match s {
                Step6::R => per_col.push(j),
                Step6::D => j -= 1,
            }
        }
        entries.push(per_col);
    }
    let mut rows = Vec::with_capacity(n);
    for i in 1..=n {
        let c = n - i + 1;
        let row: Vec<u32> = (0..i).map(|j| entries[c - 1 + j][c - 1]).collect();
        rows.push(row);
    }
    BarredTriangle::new(rows)
}

/// Rebuild the path family from its triangle of column entry rows.
pub fn psi1_inverse(spec: &BoundarySpec, t: &BarredTriangle) -> Result<PathFamily6V> {
    let n = spec.n();
    if t.n() != n {
        return Err(Error::InvalidTriangle(format!(
            "triangle has {} rows, boundary needs {n}",
            t.n()
        )));
    }
    let expect_bottom: Vec<u32> = spec.k().iter().map(|&k| 2 * k - 1).collect();
    if t.bottom() != expect_bottom {
        return Err(Error::InvalidTriangle(format!(
            "bottom row {:?} does not match inlet rows {:?}",
            t.bottom(),
            expect_bottom
        )));
    }
    let entry = |ell: usize, c: usize| t.rows()[n - c][ell - c];
    let mut paths = Vec::with_capacity(n);
    for ell in 1..=n {
        let mut steps = Vec::new();
        for c in 1..=ell {
            let from = entry(ell, c);
            let to = if c == ell { 1 } else { entry(ell, c + 1) };
            if to > from {
                return Err(Error::InvalidTriangle(format!(
                    "path {ell} would have to climb from row {from} to row {to} in column {c}"
                )));
            }
            steps.extend(std::iter::repeat_n(Step6::D, (from - to) as usize));
            if c < ell {
                steps.push(Step6::R);
            }
        }
        paths.push(steps);
    }
    let fam = PathFamily6V { spec: spec.clone(), paths };
    RectM6V::new(spec.clone()).paths_to_orientation(&fam)?;
    Ok(fam)
}

/// Forget the bars: each encoded entry `v` maps to its unbarred value.
pub fn psi2(t: &BarredTriangle) -> GTPattern {
    let rows = t.rows().iter().map(|r| r.iter().map(|v| v.div_ceil(2)).collect()).collect();
    GTPattern::new(rows).expect("bar removal preserves pattern validity")
}

/// All monotone triangles over the barred alphabet whose bottom row is the
/// unbarred image of `k`, in lexicographic order of rows read bottom-up.
pub fn enumerate_barred_triangles(spec: &BoundarySpec, caps: &Caps) -> Result<Vec<BarredTriangle>> {
    let bottom: Vec<u32> = spec.k().iter().map(|&k| 2 * k - 1).collect();
    let mut out = Vec::new();
    let mut stack = vec![bottom];
    build_strict_rows(&mut stack, &mut out, caps)?;
    Ok(out)
}

fn build_strict_rows(
    stack: &mut Vec<Vec<u32>>,
    out: &mut Vec<BarredTriangle>,
    caps: &Caps,
) -> Result<()> {
    let below = stack.last().unwrap().clone();
    if below.len() == 1 {
        caps.check_configs(out.len() as u64)?;
        let rows: Vec<Vec<u32>> = stack.iter().rev().cloned().collect();
        out.push(BarredTriangle { rows });
        return Ok(());
    }
    let mut row = Vec::with_capacity(below.len() - 1);
    strict_row_choices(&below, &mut row, stack, out, caps)?;
    Ok(())
}

fn strict_row_choices(
    below: &[u32],
    row: &mut Vec<u32>,
    stack: &mut Vec<Vec<u32>>,
    out: &mut Vec<BarredTriangle>,
    caps: &Caps,
) -> Result<()> {
    let j = row.len();
    if j == below.len() - 1 {
        stack.push(row.clone());
        build_strict_rows(stack, out, caps)?;
        stack.pop();
        return Ok(());
    }
    let lo = below[j].max(row.last().map_or(0, |&p| p + 1));
    for v in lo..=below[j + 1] {
        row.push(v);
        strict_row_choices(below, row, stack, out, caps)?;
        row.pop();
    }
    Ok(())
}

/// All triple-free patterns with the given weakly increasing bottom row,
/// in lexicographic order of rows read bottom-up. A bottom row containing
/// three equal entries yields the empty list.
pub fn enumerate_gt(bottom: &[u32], caps: &Caps) -> Result<Vec<GTPattern>> {
    if bottom.is_empty() || bottom[0] == 0 {
        return Err(Error::InvalidTriangle("bottom row must be nonempty and positive".into()));
    }
    if bottom.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidTriangle("bottom row must be weakly increasing".into()));
    }
    if bottom.windows(3).any(|w| w[0] == w[1] && w[1] == w[2]) {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    let mut stack = vec![bottom.to_vec()];
    build_weak_rows(&mut stack, &mut out, caps)?;
    Ok(out)
}

fn build_weak_rows(
    stack: &mut Vec<Vec<u32>>,
    out: &mut Vec<GTPattern>,
    caps: &Caps,
) -> Result<()> {
    let below = stack.last().unwrap().clone();
    if below.len() == 1 {
        caps.check_configs(out.len() as u64)?;
        let rows: Vec<Vec<u32>> = stack.iter().rev().cloned().collect();
        out.push(GTPattern { rows });
        return Ok(());
    }
    let mut row = Vec::with_capacity(below.len() - 1);
    weak_row_choices(&below, &mut row, stack, out, caps)?;
    Ok(())
}

fn weak_row_choices(
    below: &[u32],
    row: &mut Vec<u32>,
    stack: &mut Vec<Vec<u32>>,
    out: &mut Vec<GTPattern>,
    caps: &Caps,
) -> Result<()> {
    let j = row.len();
    if j == below.len() - 1 {
        stack.push(row.clone());
        build_weak_rows(stack, out, caps)?;
        stack.pop();
        return Ok(());
    }
    let lo = below[j].max(row.last().copied().unwrap_or(0));
    for v in lo..=below[j + 1] {
        if j >= 2 && row[j - 2] == v && row[j - 1] == v {
            continue;
        }
        row.push(v);
        weak_row_choices(below, row, stack, out, caps)?;
        row.pop();
    }
    Ok(())
}

/// All triple-free patterns with `n` rows and a strictly increasing bottom
/// row drawn from `1..=max_entry`, grouped by bottom row in lexicographic
/// order.
pub fn enumerate_gt_bounded(n: usize, max_entry: u32, caps: &Caps) -> Result<Vec<GTPattern>> {
    let mut out = Vec::new();
    let mut bottom = Vec::with_capacity(n);
    fn rec(
        start: u32,
        n: usize,
        max_entry: u32,
        bottom: &mut Vec<u32>,
        out: &mut Vec<GTPattern>,
        caps: &Caps,
    ) -> Result<()> {
        if bottom.len() == n {
            out.extend(enumerate_gt(bottom, caps)?);
            caps.check_configs(out.len() as u64)?;
            return Ok(());
        }
        for v in start..=max_entry {
            bottom.push(v);
            rec(v + 1, n, max_entry, bottom, out, caps)?;
            bottom.pop();
        }
        Ok(())
    }
    rec(1, n, max_entry, &mut bottom, &mut out, caps)?;
    Ok(out)
}

/// All barred triangles with unbarred bottom row mapping to `t` under bar
/// removal. Requires a strictly increasing bottom row.
pub fn enumerate_fiber(t: &GTPattern, caps: &Caps) -> Result<Vec<BarredTriangle>> {
    if t.bottom().windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidTriangle(
            "fiber enumeration needs a strictly increasing bottom row".into(),
        ));
    }
    let bottom: Vec<u32> = t.bottom().iter().map(|&v| 2 * v - 1).collect();
    let mut out = Vec::new();
    let mut stack = vec![bottom];
    fiber_rows(t, &mut stack, &mut out, caps)?;
    Ok(out)
}

fn fiber_rows(
    t: &GTPattern,
    stack: &mut Vec<Vec<u32>>,
    out: &mut Vec<BarredTriangle>,
    caps: &Caps,
) -> Result<()> {
    let depth = stack.len();
    if depth == t.n() {
        caps.check_configs(out.len() as u64)?;
        let rows: Vec<Vec<u32>> = stack.iter().rev().cloned().collect();
        out.push(BarredTriangle { rows });
        return Ok(());
    }
    // Rows are built bottom-up; the pattern row above the current one is
    // t.rows()[t.n() - depth - 1].
    let template = t.rows()[t.n() - depth - 1].clone();
    let below = stack.last().unwrap().clone();
    let mut row = Vec::with_capacity(template.len());
    fiber_row_choices(t, &template, &below, &mut row, stack, out, caps)?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn fiber_row_choices(
    t: &GTPattern,
    template: &[u32],
    below: &[u32],
    row: &mut Vec<u32>,
    stack: &mut Vec<Vec<u32>>,
    out: &mut Vec<BarredTriangle>,
    caps: &Caps,
) -> Result<()> {
    let j = row.len();
    if j == template.len() {
        stack.push(row.clone());
        fiber_rows(t, stack, out, caps)?;
        stack.pop();
        return Ok(());
    }
    for v in [2 * template[j] - 1, 2 * template[j]] {
        if let Some(&prev) = row.last() {
            if v <= prev {
                continue;
            }
        }
        if !(below[j] <= v && v <= below[j + 1]) {
            continue;
        }
        row.push(v);
        fiber_row_choices(t, template, below, row, stack, out, caps)?;
        row.pop();
    }
    Ok(())
}

/// Exact sum of `2^ic` over the fiber of `t`.
pub fn fiber_sum(t: &GTPattern, caps: &Caps) -> Result<BigUint> {
    let mut total = BigUint::zero();
    for b in enumerate_fiber(t, caps)? {
        total += BigUint::one() << ic_triangle(&b);
    }
    Ok(total)
}

/// Weighted count of barred triangles with unbarred bottom row given by
/// the boundary: the sum of `2^ic` over all of them. Dynamic programming
/// over rows from the bottom up; the state is the current row.
pub fn weighted_count_triangles(spec: &BoundarySpec, caps: &Caps) -> Result<BigUint> {
    let bottom: Vec<u32> = spec.k().iter().map(|&k| 2 * k - 1).collect();
    let mut states: BTreeMap<Vec<u32>, BigUint> = BTreeMap::new();
    states.insert(bottom, BigUint::one());
    for _ in 1..spec.n() {
        let mut next: BTreeMap<Vec<u32>, BigUint> = BTreeMap::new();
        for (below, count) in &states {
            let mut row = Vec::with_capacity(below.len() - 1);
            push_rows_above(below, &mut row, count, &mut next);
            caps.check_states(next.len() as u64)?;
        }
        states = next;
    }
    let mut total = BigUint::zero();
    for (_, c) in states {
        total += c;
    }
    Ok(total)
}

fn push_rows_above(
    below: &[u32],
    row: &mut Vec<u32>,
    count: &BigUint,
    next: &mut BTreeMap<Vec<u32>, BigUint>,
) {
    let j = row.len();
    if j == below.len() - 1 {
        let mut pairs = 0u64;
        for (jj, &v) in row.iter().enumerate() {
            if v == below[jj] && v % 2 == 0 {
                pairs += 1;
            }
            if v == below[jj + 1] && v % 2 == 1 {
                pairs += 1;
            }
        }
        *next.entry(row.clone()).or_insert_with(BigUint::zero) += count << pairs;
        return;
    }
    let lo = below[j].max(row.last().map_or(0, |&p| p + 1));
    for v in lo..=below[j + 1] {
        row.push(v);
        push_rows_above(below, row, count, next);
        row.pop();
    }
}

/// A maximal set of equal-valued cells connected through the two
/// below-neighbor relations. Cells are 0-based (row, position), sorted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Block {
    pub value: u32,
    pub cells: Vec<(usize, usize)>,
}

impl Block {
    /// Number of rows of width two (pairs of equal entries in a row).
    pub fn joints(&self) -> u64 {
        self.cells.windows(2).filter(|w| w[0].0 == w[1].0).count() as u64
    }

    pub fn meets_row(&self, row: usize) -> bool {
        self.cells.iter().any(|&(i, _)| i == row)
    }
}

/// Maximal connected blocks of a triangular array, ordered by their first
/// cell in row-major order.
pub fn max_connected_blocks(rows: &[Vec<u32>]) -> Vec<Block> {
    let mut seen: Vec<Vec<bool>> = rows.iter().map(|r| vec![false; r.len()]).collect();
    let mut blocks = Vec::new();
    for i in 0..rows.len() {
        for j in 0..rows[i].len() {
            if seen[i][j] {
                continue;
            }
            let value = rows[i][j];
            let mut cells = Vec::new();
            let mut stack = vec![(i, j)];
            seen[i][j] = true;
            while let Some((ci, cj)) = stack.pop() {
                cells.push((ci, cj));
                let mut neighbors = Vec::new();
                if ci + 1 < rows.len() {
                    neighbors.push((ci + 1, cj));
                    neighbors.push((ci + 1, cj + 1));
                }
                if ci > 0 {
                    if cj > 0 {
                        neighbors.push((ci - 1, cj - 1));
                    }
                    if cj < rows[ci - 1].len() {
                        neighbors.push((ci - 1, cj));
                    }
                }
                for (ni, nj) in neighbors {
                    if !seen[ni][nj] && rows[ni][nj] == value {
                        seen[ni][nj] = true;
                        stack.push((ni, nj));
                    }
                }
            }
            cells.sort_unstable();
            blocks.push(Block { value, cells });
        }
    }
    blocks
}

/// Weight contribution of one block: `2^(cells - joints)`.
pub fn block_weight(b: &Block) -> BigUint {
    BigUint::one() << (b.cells.len() as u64 - b.joints())
}

/// The `ic` contribution of pairs lying inside one block of a barred
/// triangle.
pub fn ic_block(t: &BarredTriangle, b: &Block) -> u64 {
    let rows = t.rows();
    let in_block = |c: (usize, usize)| b.cells.binary_search(&c).is_ok();
    let mut total = 0;
    for &(i, j) in &b.cells {
        if i + 1 < rows.len() {
            if in_block((i + 1, j)) && rows[i][j] == rows[i + 1][j] && rows[i][j].is_multiple_of(2) {
                total += 1;
            }
            if in_block((i + 1, j + 1)) && rows[i][j] == rows[i + 1][j + 1] && rows[i][j] % 2 == 1
            {
                total += 1;
            }
        }
    }
    total
}

/// A block split into its zigzag parts (maximal runs of width-1 rows,
/// listed bottom part first, cells bottom-up) separated by joint rows.
/// Zigzag slots between adjacent joints, or before a terminal joint, are
/// empty.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockParts {
    pub zigzags: Vec<Vec<(usize, usize)>>,
    pub joint_rows: Vec<usize>,
}

pub fn zigzag_decompose(b: &Block) -> Result<BlockParts> {
    let mut by_row: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &(i, j) in &b.cells {
        by_row.entry(i).or_default().push(j);
    }
    let rows: Vec<(usize, Vec<usize>)> = by_row.into_iter().collect();
    for w in rows.windows(2) {
        if w[1].0 != w[0].0 + 1 {
            return Err(Error::InvalidTriangle("block rows are not contiguous".into()));
        }
    }
    let mut zigzags = Vec::new();
    let mut joint_rows = Vec::new();
    let mut current = Vec::new();
    // Scan from the bottom row of the block upward.
    for (i, cols) in rows.iter().rev() {
        match cols.len() {
            1 => current.push((*i, cols[0])),
            2 => {
                joint_rows.push(*i);
                zigzags.push(std::mem::take(&mut current));
            }
            w => {
                return Err(Error::InvalidTriangle(format!("block row of width {w}")));
            }
        }
    }
    zigzags.push(current);
    joint_rows.reverse();
    Ok(BlockParts { zigzags, joint_rows })
}

/// One step of a zigzag read bottom-up: the upper cell sits either
/// directly above-right (sharing its position index, a vertical pair) or
/// above-left (a diagonal pair).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ZigStep {
    Vertical,
    Diagonal,
}

/// A fence poset, encoded by the zigzag steps between consecutive
/// elements `e1 (bottom cell) .. es (top cell)`. A vertical step makes
/// `e_t < e_{t+1}`, a diagonal step `e_{t+1} < e_t`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Fence {
    steps: Vec<ZigStep>,
}

impl Fence {
    pub fn new(steps: Vec<ZigStep>) -> Self {
        Fence { steps }
    }

    pub fn steps(&self) -> &[ZigStep] {
        &self.steps
    }

    pub fn size(&self) -> usize {
        self.steps.len() + 1
    }
}

/// The fence underlying a zigzag given by its cells bottom-up.
pub fn fence_of_zigzag(cells: &[(usize, usize)]) -> Result<Fence> {
    if cells.is_empty() {
        return Err(Error::InvalidTriangle("empty zigzag has no fence".into()));
    }
    let mut steps = Vec::with_capacity(cells.len() - 1);
    for w in cells.windows(2) {
        let (lower, upper) = (w[0], w[1]);
        if upper.0 + 1 != lower.0 {
            return Err(Error::InvalidTriangle("zigzag cells are not row-consecutive".into()));
        }
        if upper.1 == lower.1 {
            steps.push(ZigStep::Vertical);
        } else if upper.1 + 1 == lower.1 {
            steps.push(ZigStep::Diagonal);
        } else {
            return Err(Error::InvalidTriangle("zigzag cells are not adjacent".into()));
        }
    }
    Ok(Fence::new(steps))
}

/// Membership vectors of all order ideals of the fence, in lexicographic
/// order with "absent" before "present", element `e1` varying slowest.
///
/// Ideal membership of a zigzag cell corresponds to leaving its entry
/// unbarred; downward closure matches the interlacing constraints between
/// equal entries.
pub fn enumerate_ideals(f: &Fence) -> Vec<Vec<bool>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(f.size());
    fn rec(f: &Fence, cur: &mut Vec<bool>, out: &mut Vec<Vec<bool>>) {
        if cur.len() == f.size() {
            out.push(cur.clone());
            return;
        }
        for m in [false, true] {
            if let Some(&prev) = cur.last() {
                match f.steps()[cur.len() - 1] {
                    // e_{t+1} in the ideal forces e_t in.
                    ZigStep::Vertical => {
                        if m && !prev {
                            continue;
                        }
                    }
                    // e_t in the ideal forces e_{t+1} in.
                    ZigStep::Diagonal => {
                        if prev && !m {
                            continue;
                        }
                    }
                }
            }
            cur.push(m);
            rec(f, cur, out);
            cur.pop();
        }
    }
    rec(f, &mut cur, &mut out);
    out
}

pub fn is_order_ideal(f: &Fence, ideal: &[bool]) -> bool {
    ideal.len() == f.size()
        && f.steps().iter().enumerate().all(|(t, s)| match s {
            ZigStep::Vertical => !(ideal[t + 1] && !ideal[t]),
            ZigStep::Diagonal => !(ideal[t] && !ideal[t + 1]),
        })
}

/// The statistic on ideals matching `ic` on zigzag preimages: vertical
/// steps with both endpoints outside the ideal (both entries barred) plus
/// diagonal steps with both inside (both unbarred).
pub fn ic_ideal(f: &Fence, ideal: &[bool]) -> Result<u64> {
    if ideal.len() != f.size() {
        return Err(Error::InvalidConfig(format!(
            "ideal has {} elements, fence has {}",
            ideal.len(),
            f.size()
        )));
    }
    let mut total = 0;
    for (t, s) in f.steps().iter().enumerate() {
        match s {
            ZigStep::Vertical => {
                if !ideal[t] && !ideal[t + 1] {
                    total += 1;
                }
            }
            ZigStep::Diagonal => {
                if ideal[t] && ideal[t + 1] {
                    total += 1;
                }
            }
        }
    }
    Ok(total)
}

/// The generating function `sum over ideals of q^ic`, evaluated exactly.
pub fn fence_gf(f: &Fence, q: &BigRat) -> BigRat {
    let mut total = BigRat::zero();
    for ideal in enumerate_ideals(f) {
        let e = ic_ideal(f, &ideal).unwrap();
        let mut term = BigRat::one();
        for _ in 0..e {
            term *= q;
        }
        total += term;
    }
    total
}
