//! Probabilistic bijections between weighted ensembles, the local
//! Yang-Baxter verifier, and the exact fiber sampler.
//!
//! A probabilistic bijection between weighted finite sets `(X, w_X)` and
//! `(Y, w_Y)` is a pair of matrices `(P, Pbar)` with unit row sums of `P`,
//! unit column sums of `Pbar`, and the exchange identity
//! `w_X(x) P(x,y) = Pbar(x,y) w_Y(y)`. All checks are exact: rational
//! kernels use big rationals, the local Yang-Baxter kernels live in the
//! weight ring, where the normalizing sums are provably 0 or 1 so no ring
//! division is ever needed.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_rational::BigRational as BigRat;
use num_traits::{One, Zero};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::lattice::{BoundarySpec, PathFamily6V};
use crate::ring::{vertex_weight, Family, Letter, RingElem, WeightMonomial};
use crate::six;
use crate::triangle::{enumerate_fiber, enumerate_gt, ic_triangle, omega_fsa, psi1_inverse, GTPattern};

/// Identifier of the pseudorandom generator recorded in sampling output.
pub const RNG_ALGORITHM: &str = "chacha8";

/// Scalar domains a kernel can live in. Only the ring operations are
/// required; division happens nowhere in the axioms.
pub trait Scalar: Clone + PartialEq + fmt::Debug {
    fn scalar_zero() -> Self;
    fn scalar_one() -> Self;
    fn add_ref(&self, other: &Self) -> Self;
    fn mul_ref(&self, other: &Self) -> Self;
}

impl Scalar for BigRat {
    fn scalar_zero() -> Self {
        Zero::zero()
    }
    fn scalar_one() -> Self {
        One::one()
    }
    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
}

impl Scalar for RingElem {
    fn scalar_zero() -> Self {
        RingElem::zero()
    }
    fn scalar_one() -> Self {
        RingElem::one()
    }
    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
}

/// Forward and reverse transition matrices, both indexed `[x][y]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Kernel<S> {
    forward: Vec<Vec<S>>,
    reverse: Vec<Vec<S>>,
}

impl<S: Scalar> Kernel<S> {
    pub fn new(forward: Vec<Vec<S>>, reverse: Vec<Vec<S>>) -> Result<Self> {
        if forward.is_empty() || forward[0].is_empty() {
            return Err(Error::InvalidConfig("kernel must relate nonempty sets".into()));
        }
        let ny = forward[0].len();
        if forward.iter().any(|r| r.len() != ny) {
            return Err(Error::InvalidConfig("ragged forward matrix".into()));
        }
        if reverse.len() != forward.len() || reverse.iter().any(|r| r.len() != ny) {
            return Err(Error::InvalidConfig("reverse matrix shape differs from forward".into()));
        }
        Ok(Kernel { forward, reverse })
    }

    pub fn identity(n: usize) -> Self {
        let mat = || {
            (0..n)
                .map(|i| (0..n).map(|j| if i == j { S::scalar_one() } else { S::scalar_zero() }).collect())
                .collect()
        };
        Kernel { forward: mat(), reverse: mat() }
    }

    pub fn nx(&self) -> usize {
        self.forward.len()
    }

    pub fn ny(&self) -> usize {
        self.forward[0].len()
    }

    pub fn forward(&self) -> &[Vec<S>] {
        &self.forward
    }

    pub fn reverse(&self) -> &[Vec<S>] {
        &self.reverse
    }

    /// Composition along a shared middle set: forward matrices multiply,
    /// and so do the reverse ones.
    pub fn compose(&self, other: &Kernel<S>) -> Result<Kernel<S>> {
        if self.ny() != other.nx() {
            return Err(Error::InvalidConfig(format!(
                "cannot compose: middle sets have sizes {} and {}",
                self.ny(),
                other.nx()
            )));
        }
        let mul = |a: &[Vec<S>], b: &[Vec<S>]| -> Vec<Vec<S>> {
            a.iter()
                .map(|row| {
                    (0..other.ny())
                        .map(|z| {
                            let mut acc = S::scalar_zero();
                            for (y, v) in row.iter().enumerate() {
                                acc = acc.add_ref(&v.mul_ref(&b[y][z]));
                            }
                            acc
                        })
                        .collect()
                })
                .collect()
        };
        Ok(Kernel { forward: mul(&self.forward, &other.forward), reverse: mul(&self.reverse, &other.reverse) })
    }
}

/// One failed kernel axiom, located.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum AxiomViolation {
    /// Forward row `x` does not sum to one.
    RowSum { x: usize },
    /// Reverse column `y` does not sum to one.
    ColumnSum { y: usize },
    /// `w_X(x) P(x,y) != Pbar(x,y) w_Y(y)`.
    Exchange { x: usize, y: usize },
    /// Total weights of the two sets differ.
    TotalWeight,
    /// Weight vector lengths do not match the matrices.
    Shape,
}

impl fmt::Display for AxiomViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AxiomViolation::RowSum { x } => write!(f, "forward row {x} does not sum to 1"),
            AxiomViolation::ColumnSum { y } => write!(f, "reverse column {y} does not sum to 1"),
            AxiomViolation::Exchange { x, y } => {
                write!(f, "weight exchange fails at ({x},{y})")
            }
            AxiomViolation::TotalWeight => write!(f, "total weights differ"),
            AxiomViolation::Shape => write!(f, "weight vector lengths do not match"),
        }
    }
}

/// Exact verification of the three bijection axioms plus the implied
/// equality of total weights. Empty result means the kernel passes.
pub fn check_axioms<S: Scalar>(
    omega_x: &[S],
    omega_y: &[S],
    kernel: &Kernel<S>,
) -> Vec<AxiomViolation> {
    if omega_x.len() != kernel.nx() || omega_y.len() != kernel.ny() {
        return vec![AxiomViolation::Shape];
    }
    let mut v = Vec::new();
    for (x, row) in kernel.forward().iter().enumerate() {
        let sum = row.iter().fold(S::scalar_zero(), |acc, p| acc.add_ref(p));
        if sum != S::scalar_one() {
            v.push(AxiomViolation::RowSum { x });
        }
    }
    for y in 0..kernel.ny() {
        let sum = kernel.reverse().iter().fold(S::scalar_zero(), |acc, row| acc.add_ref(&row[y]));
        if sum != S::scalar_one() {
            v.push(AxiomViolation::ColumnSum { y });
        }
    }
    for (x, wx) in omega_x.iter().enumerate() {
        for (y, wy) in omega_y.iter().enumerate() {
            let lhs = wx.mul_ref(&kernel.forward()[x][y]);
            let rhs = kernel.reverse()[x][y].mul_ref(wy);
            if lhs != rhs {
                v.push(AxiomViolation::Exchange { x, y });
            }
        }
    }
    let tx = omega_x.iter().fold(S::scalar_zero(), |acc, w| acc.add_ref(w));
    let ty = omega_y.iter().fold(S::scalar_zero(), |acc, w| acc.add_ref(w));
    if tx != ty {
        v.push(AxiomViolation::TotalWeight);
    }
    v
}

/// The probabilistic bijection induced by a weight-compatible surjection:
/// forward is deterministic, reverse picks a fiber element proportionally
/// to its weight. `f[x]` is the index of the image of `x`.
pub fn kernel_from_surjection(
    f: &[usize],
    omega_x: &[BigRat],
    omega_y: &[BigRat],
) -> Result<Kernel<BigRat>> {
    if f.len() != omega_x.len() {
        return Err(Error::InvalidConfig("map and weight vector lengths differ".into()));
    }
    let ny = omega_y.len();
    if let Some(&bad) = f.iter().find(|&&y| y >= ny) {
        return Err(Error::InvalidConfig(format!("map hits index {bad}, target has {ny}")));
    }
    let mut fiber_sums = vec![BigRat::zero(); ny];
    for (x, &y) in f.iter().enumerate() {
        fiber_sums[y] += &omega_x[x];
    }
    for (y, sum) in fiber_sums.iter().enumerate() {
        if sum != &omega_y[y] {
            return Err(Error::InvalidConfig(format!(
                "fiber over target {y} has weight {sum}, expected {}",
                omega_y[y]
            )));
        }
        if omega_y[y].is_zero() {
            return Err(Error::InvalidConfig(format!("target {y} has zero weight")));
        }
    }
    let forward: Vec<Vec<BigRat>> = f
        .iter()
        .map(|&fy| {
            (0..ny).map(|y| if y == fy { BigRat::one() } else { BigRat::zero() }).collect()
        })
        .collect();
    let reverse: Vec<Vec<BigRat>> = f
        .iter()
        .enumerate()
        .map(|(x, &fy)| {
            (0..ny)
                .map(|y| if y == fy { &omega_x[x] / &omega_y[y] } else { BigRat::zero() })
                .collect()
        })
        .collect();
    Kernel::new(forward, reverse)
}

/// Which way a degree-6 vertex is resolved into three degree-4 vertices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bend {
    SW,
    NE,
}

/// Local graphs related by Yang-Baxter moves: the degree-6 vertex itself
/// or either of its bent resolutions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LocalShape {
    Degree6,
    Bent(Bend),
}

/// Order of the six external half-edges in a boundary bit vector. A set
/// bit means the edge is oriented rightward, downward, or southeastward,
/// i.e. *into* the graph on the W, NW, N sides and *out of* it on the
/// E, SE, S sides.
pub const EXTERNAL_SLOTS: [&str; 6] = ["W", "NW", "N", "E", "SE", "S"];

const W: usize = 0;
const NW: usize = 1;
const N: usize = 2;
const E: usize = 3;
const SE: usize = 4;
const S: usize = 5;

/// One admissible configuration of a local graph with fixed boundary:
/// the used-bits of its internal edges, the letter at each degree-4
/// vertex, and the total weight.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalConfig {
    pub internal_used: Vec<bool>,
    pub letters: Vec<(Family, Letter)>,
    pub weight: WeightMonomial,
}

#[derive(Clone, Copy)]
enum Slot {
    Ext(usize),
    Int(usize),
}

/// Per-vertex wiring `(in1, out1, in2, out2)` where `(in1, out1)` and
/// `(in2, out2)` are the straight-through pairs, plus the weight family.
/// Internal edges: 0 joins the horizontal pair, 1 the vertical, 2 the
/// diagonal.
fn bend_wiring(bend: Bend) -> [([Slot; 4], Family); 3] {
    use Slot::{Ext, Int};
    match bend {
        // West vertex feeds the center horizontally and the south vertex
        // diagonally; the center feeds the south vertex vertically.
        Bend::SW => [
            ([Ext(W), Int(0), Ext(NW), Int(2)], Family::HD),
            ([Int(0), Ext(E), Ext(N), Int(1)], Family::HV),
            ([Int(1), Ext(S), Int(2), Ext(SE)], Family::VD),
        ],
        // North vertex feeds the center vertically and the east vertex
        // diagonally; the center feeds the east vertex horizontally.
        Bend::NE => [
            ([Ext(N), Int(1), Ext(NW), Int(2)], Family::VD),
            ([Ext(W), Int(0), Int(1), Ext(S)], Family::HV),
            ([Int(0), Ext(E), Int(2), Ext(SE)], Family::HD),
        ],
    }
}

fn boundary_balanced(boundary: [bool; 6]) -> bool {
    let inward = [W, NW, N].iter().filter(|&&s| boundary[s]).count();
    let outward = [E, SE, S].iter().filter(|&&s| boundary[s]).count();
    inward == outward
}

/// All admissible configurations of a local graph with the given fixed
/// boundary, in ascending order of the internal used-bit vector.
pub fn local_configs(shape: LocalShape, boundary: [bool; 6]) -> Vec<LocalConfig> {
    match shape {
        LocalShape::Degree6 => {
            if boundary_balanced(boundary) {
                vec![LocalConfig {
                    internal_used: Vec::new(),
                    letters: Vec::new(),
                    weight: WeightMonomial::one(),
                }]
            } else {
                Vec::new()
            }
        }
        LocalShape::Bent(bend) => {
            let wiring = bend_wiring(bend);
            let mut out = Vec::new();
            'assign: for bits in 0u8..8 {
                let internal = [bits & 1 != 0, bits & 2 != 0, bits & 4 != 0];
                let mut letters = Vec::with_capacity(3);
                let mut weight = WeightMonomial::one();
                for (slots, family) in &wiring {
                    let used = |s: Slot| match s {
                        Slot::Ext(i) => boundary[i],
                        Slot::Int(i) => internal[i],
                    };
                    let t = match six::classify(
                        used(slots[0]),
                        used(slots[1]),
                        used(slots[2]),
                        used(slots[3]),
                    ) {
                        Ok(t) => t,
                        Err(_) => continue 'assign,
                    };
                    letters.push((*family, t.letter()));
                    weight = weight.mul(&vertex_weight(*family, t.letter()));
                }
                out.push(LocalConfig { internal_used: internal.to_vec(), letters, weight });
            }
            out
        }
    }
}

/// Weight of a degree-6 vertex boundary under one bend: the exact ring
/// sum over admissible internal orientations.
pub fn resolve_degree6(boundary: [bool; 6], bend: Bend) -> RingElem {
    local_configs(LocalShape::Bent(bend), boundary)
        .iter()
        .fold(RingElem::zero(), |acc, c| &acc + &c.weight.as_ring())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct YbeReport {
    pub boundaries: usize,
    pub balanced: usize,
}

/// The local Yang-Baxter identity: both bends resolve every boundary to
/// the same ring element, which is 1 on the twenty ice-rule boundaries
/// and 0 on the other forty-four.
pub fn verify_ybe() -> Result<YbeReport> {
    let mut balanced = 0;
    for bits in 0u8..64 {
        let boundary: [bool; 6] = std::array::from_fn(|s| bits >> s & 1 == 1);
        let sw = resolve_degree6(boundary, Bend::SW);
        let ne = resolve_degree6(boundary, Bend::NE);
        let name = || {
            let used: Vec<&str> = (0..6).filter(|&s| boundary[s]).map(|s| EXTERNAL_SLOTS[s]).collect();
            format!("boundary with used edges {{{}}}", used.join(","))
        };
        if sw != ne {
            return Err(Error::InvalidConfig(format!(
                "{}: bends disagree: SW resolves to {sw}, NE to {ne}",
                name()
            )));
        }
        if boundary_balanced(boundary) {
            balanced += 1;
            if !sw.is_one() {
                return Err(Error::InvalidConfig(format!("{}: resolves to {sw}, not 1", name())));
            }
        } else if !sw.is_zero() {
            return Err(Error::InvalidConfig(format!("{}: resolves to {sw}, not 0", name())));
        }
    }
    Ok(YbeReport { boundaries: 64, balanced })
}

/// A local move kernel together with the configuration lists it relates.
#[derive(Clone, Debug)]
pub struct LocalKernel {
    pub sources: Vec<LocalConfig>,
    pub targets: Vec<LocalConfig>,
    pub kernel: Kernel<RingElem>,
}

/// The probabilistic bijection between the admissible configurations of
/// two local graphs over the same fixed boundary. Every source reaches
/// every target, with forward probability the target's weight: the
/// normalizing sums are exactly 1 by the Yang-Baxter identity, so the
/// matrices stay in the ring.
pub fn local_kernel(from: LocalShape, to: LocalShape, boundary: [bool; 6]) -> Result<LocalKernel> {
    if from == to {
        return Err(Error::InvalidConfig("local graphs must differ by a move".into()));
    }
    let sources = local_configs(from, boundary);
    let targets = local_configs(to, boundary);
    if sources.is_empty() || targets.is_empty() {
        return Err(Error::InvalidConfig(
            "boundary admits no configuration; local moves need an ice-rule boundary".into(),
        ));
    }
    let forward: Vec<Vec<RingElem>> = sources
        .iter()
        .map(|_| targets.iter().map(|t| t.weight.as_ring()).collect())
        .collect();
    let reverse: Vec<Vec<RingElem>> = sources
        .iter()
        .map(|s| targets.iter().map(|_| s.weight.as_ring()).collect())
        .collect();
    Ok(LocalKernel { sources, targets, kernel: Kernel::new(forward, reverse)? })
}

/// Exact sampler over the fiber of one triple-free pattern: draws a mixed
/// 6V configuration with probability `2^ic / (2^-n omega_fsa)` by inverse
/// CDF over the enumerated fiber, using the ChaCha8 generator.
pub struct FiberSampler {
    samples: Vec<(PathFamily6V, u64)>,
    cumulative: Vec<BigUint>,
    total: BigUint,
    rng: ChaCha8Rng,
    seed: u64,
}

impl FiberSampler {
    pub fn new(pattern: &GTPattern, seed: u64, caps: &Caps) -> Result<Self> {
        if !pattern.is_triple_free() {
            return Err(Error::InvalidTriangle("pattern has a triple; its fiber is empty".into()));
        }
        let spec = BoundarySpec::new(pattern.bottom().to_vec())?;
        let fiber = enumerate_fiber(pattern, caps)?;
        let mut samples = Vec::with_capacity(fiber.len());
        let mut cumulative = Vec::with_capacity(fiber.len());
        let mut total = BigUint::zero();
        for t in &fiber {
            let ic = ic_triangle(t);
            samples.push((psi1_inverse(&spec, t)?, ic));
            total += BigUint::one() << ic;
            cumulative.push(total.clone());
        }
        if samples.is_empty() {
            return Err(Error::InvalidTriangle("pattern has an empty fiber".into()));
        }
        Ok(FiberSampler {
            samples,
            cumulative,
            total,
            rng: ChaCha8Rng::seed_from_u64(seed),
            seed,
        })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn fiber_size(&self) -> usize {
        self.samples.len()
    }

    /// Sum of `2^ic` over the fiber.
    pub fn total_weight(&self) -> &BigUint {
        &self.total
    }

    /// Exact probability of the fiber element at `idx`.
    pub fn probability(&self, idx: usize) -> BigRat {
        let w = BigUint::one() << self.samples[idx].1;
        BigRat::new(w.into(), self.total.clone().into())
    }

    /// Draw the next sample: its fiber index, the configuration, and its
    /// exact probability.
    pub fn draw(&mut self) -> (usize, PathFamily6V, BigRat) {
        let r = draw_below(&mut self.rng, &self.total);
        let idx = self.cumulative.partition_point(|c| *c <= r);
        (idx, self.samples[idx].0.clone(), self.probability(idx))
    }
}

/// Uniform draw from `[0, bound)` by masked redraw: sample `bits(bound)`
/// random bits until the value lands below the bound.
fn draw_below(rng: &mut ChaCha8Rng, bound: &BigUint) -> BigUint {
    let bits = bound.bits();
    debug_assert!(bits > 0);
    if bound == &BigUint::one() {
        return BigUint::zero();
    }
    let words = bits.div_ceil(64);
    loop {
        let mut r = BigUint::zero();
        for w in 0..words {
            r |= BigUint::from(rng.next_u64()) << (64 * w);
        }
        r &= (BigUint::one() << bits) - 1u32;
        if &r < bound {
            return r;
        }
    }
}

/// One draw from the fiber of `pattern` under the exact `2^ic` law.
pub fn sample_fiber(pattern: &GTPattern, seed: u64, caps: &Caps) -> Result<PathFamily6V> {
    Ok(FiberSampler::new(pattern, seed, caps)?.draw().1)
}

/// Exact sampler over all mixed 6V configurations with a given boundary:
/// first picks a pattern proportionally to its weight, then a fiber
/// element, both from one ChaCha8 stream. The net law is `2^ic` over all
/// configurations.
pub struct EnsembleSampler {
    patterns: Vec<GTPattern>,
    cumulative: Vec<BigUint>,
    total: BigUint,
    n: usize,
    fibers: BTreeMap<usize, FiberSampler>,
    rng: ChaCha8Rng,
    seed: u64,
    caps: Caps,
}

impl EnsembleSampler {
    pub fn new(spec: &BoundarySpec, seed: u64, caps: &Caps) -> Result<Self> {
        let patterns = enumerate_gt(spec.k(), caps)?;
        let mut cumulative = Vec::with_capacity(patterns.len());
        let mut total = BigUint::zero();
        for p in &patterns {
            total += omega_fsa(p);
            cumulative.push(total.clone());
        }
        Ok(EnsembleSampler {
            patterns,
            cumulative,
            total,
            n: spec.n(),
            fibers: BTreeMap::new(),
            rng: ChaCha8Rng::seed_from_u64(seed),
            seed,
            caps: *caps,
        })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Draw the next configuration and its exact probability
    /// `2^(ic+n) / sum of pattern weights`.
    pub fn draw(&mut self) -> Result<(PathFamily6V, BigRat)> {
        let r = draw_below(&mut self.rng, &self.total);
        let pidx = self.cumulative.partition_point(|c| *c <= r);
        if !self.fibers.contains_key(&pidx) {
            // Sub-samplers are used only for their fiber tables; every
            // random draw comes from the single ensemble stream.
            let sub = FiberSampler::new(&self.patterns[pidx], 0, &self.caps)?;
            self.fibers.insert(pidx, sub);
        }
        let fiber = self.fibers.get_mut(&pidx).unwrap();
        let s = draw_below(&mut self.rng, fiber.total_weight());
        let idx = fiber.cumulative.partition_point(|c| *c <= s);
        let (fam, ic) = fiber.samples[idx].clone();
        let w = BigUint::one() << (ic + self.n as u64);
        Ok((fam, BigRat::new(w.into(), self.total.clone().into())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::RectM6V;
    use crate::ring::pow2;
    use crate::triangle::{psi1, psi2};
    use std::collections::BTreeSet;

    fn caps() -> Caps {
        Caps::default()
    }

    fn rat(n: i64, d: i64) -> BigRat {
        BigRat::new(n.into(), d.into())
    }

    #[test]
    fn identity_kernel_passes() {
        let w = vec![BigRat::one(), BigRat::one(), BigRat::one()];
        let k: Kernel<BigRat> = Kernel::identity(3);
        assert!(check_axioms(&w, &w, &k).is_empty());
    }

    #[test]
    fn perturbed_kernel_is_located() {
        let w = vec![BigRat::one(), BigRat::one()];
        let mut k: Kernel<BigRat> = Kernel::identity(2);
        k.forward[0][1] = rat(1, 2);
        let v = check_axioms(&w, &w, &k);
        assert!(v.contains(&AxiomViolation::RowSum { x: 0 }));
        assert!(v.contains(&AxiomViolation::Exchange { x: 0, y: 1 }));
    }

    /// The bar-forgetting surjection on the smallest two-path domain:
    /// fiber sums 2 + 2 match the pattern weights 2^-2 * 8 each.
    #[test]
    fn surjection_kernel_on_twelve_domain() {
        let spec = BoundarySpec::new(vec![1, 2]).unwrap();
        let rect = RectM6V::new(spec.clone());
        let fams = six::enumerate_m6v(&rect, None, &caps()).unwrap().families;
        let patterns = enumerate_gt(&[1, 2], &caps()).unwrap();
        let f: Vec<usize> = fams
            .iter()
            .map(|fam| {
                let p = psi2(&psi1(fam).unwrap());
                patterns.iter().position(|q| q == &p).unwrap()
            })
            .collect();
        let wx: Vec<BigRat> = fams
            .iter()
            .map(|fam| {
                let o = rect.paths_to_orientation(fam).unwrap();
                pow2(six::ic(&rect, &o).unwrap() as i64)
            })
            .collect();
        let wy: Vec<BigRat> = patterns
            .iter()
            .map(|p| BigRat::from_integer(num_bigint::BigInt::from(omega_fsa(p))) * pow2(-2))
            .collect();
        assert_eq!(wy, vec![rat(2, 1), rat(2, 1)]);
        let k = kernel_from_surjection(&f, &wx, &wy).unwrap();
        assert!(check_axioms(&wx, &wy, &k).is_empty());
        // A wrong target weight is rejected with the target named.
        let mut bad = wy.clone();
        bad[1] = rat(3, 1);
        let err = kernel_from_surjection(&f, &wx, &bad).unwrap_err().to_string();
        assert!(err.contains("target 1"), "{err}");
    }

    /// Reverse transition column of the worked single-pattern fiber.
    #[test]
    fn worked_fiber_reverse_column() {
        let pattern = GTPattern::new(vec![vec![2], vec![2, 3], vec![2, 3, 3], vec![1, 2, 3, 4]])
            .unwrap();
        let fiber = enumerate_fiber(&pattern, &caps()).unwrap();
        let wx: Vec<BigRat> = fiber.iter().map(|t| pow2(ic_triangle(t) as i64)).collect();
        let wy = vec![BigRat::from_integer(32.into())];
        let f = vec![0; fiber.len()];
        let k = kernel_from_surjection(&f, &wx, &wy).unwrap();
        assert!(check_axioms(&wx, &wy, &k).is_empty());
        let column: Vec<BigRat> = k.reverse().iter().map(|row| row[0].clone()).collect();
        // Enumeration order puts the two ic=3 elements last; as a
        // multiset the column is {1/8 x4, 1/4 x2}.
        assert_eq!(
            column,
            vec![rat(1, 8), rat(1, 8), rat(1, 8), rat(1, 8), rat(1, 4), rat(1, 4)]
        );
    }

    #[test]
    fn composition_preserves_axioms() {
        let spec = BoundarySpec::new(vec![1, 2]).unwrap();
        let rect = RectM6V::new(spec.clone());
        let fams = six::enumerate_m6v(&rect, None, &caps()).unwrap().families;
        // Configurations -> barred triangles is a bijection, so its kernel
        // is a permutation pair.
        let triangles: Vec<_> = fams.iter().map(|f| psi1(f).unwrap()).collect();
        let wx: Vec<BigRat> = triangles.iter().map(|t| pow2(ic_triangle(t) as i64)).collect();
        let id_map: Vec<usize> = (0..fams.len()).collect();
        let k1 = kernel_from_surjection(&id_map, &wx, &wx).unwrap();
        let patterns = enumerate_gt(&[1, 2], &caps()).unwrap();
        let f2: Vec<usize> = triangles
            .iter()
            .map(|t| {
                let p = psi2(t);
                patterns.iter().position(|q| q == &p).unwrap()
            })
            .collect();
        let wy: Vec<BigRat> = patterns
            .iter()
            .map(|p| BigRat::from_integer(num_bigint::BigInt::from(omega_fsa(p))) * pow2(-2))
            .collect();
        let k2 = kernel_from_surjection(&f2, &wx, &wy).unwrap();
        let composed = k1.compose(&k2).unwrap();
        assert!(check_axioms(&wx, &wy, &composed).is_empty());
        // Composition with the identity kernel changes nothing.
        let id: Kernel<BigRat> = Kernel::identity(triangles.len());
        assert_eq!(id.compose(&k2).unwrap(), k2);
    }

    fn boundary_of(used: &[usize]) -> [bool; 6] {
        let mut b = [false; 6];
        for &s in used {
            b[s] = true;
        }
        b
    }

    /// The boundary with one path entering west and leaving south: the SW
    /// bend has two admissible configurations, the NE bend one, and all
    /// resolve to weight 1.
    #[test]
    fn worked_boundary_resolutions() {
        use Letter::{A, B, C};
        let b = boundary_of(&[W, S]);
        let sw = local_configs(LocalShape::Bent(Bend::SW), b);
        let letters = |cfgs: &[LocalConfig]| -> BTreeSet<Vec<(Family, Letter)>> {
            cfgs.iter().map(|c| c.letters.clone()).collect()
        };
        assert_eq!(
            letters(&sw),
            BTreeSet::from([
                vec![(Family::HD, C), (Family::HV, A), (Family::VD, C)],
                vec![(Family::HD, B), (Family::HV, C), (Family::VD, B)],
            ])
        );
        let ne = local_configs(LocalShape::Bent(Bend::NE), b);
        assert_eq!(
            letters(&ne),
            BTreeSet::from([vec![(Family::VD, A), (Family::HV, C), (Family::HD, A)]])
        );
        assert!(resolve_degree6(b, Bend::SW).is_one());
        assert!(resolve_degree6(b, Bend::NE).is_one());
    }

    /// The diagonal pass-through boundary: two admissible configurations
    /// on each side, with letter products a1*b2*b3 and c1*c2*c3.
    #[test]
    fn diagonal_boundary_resolutions() {
        use Letter::{A, B, C};
        let b = boundary_of(&[NW, SE]);
        for bend in [Bend::SW, Bend::NE] {
            let cfgs = local_configs(LocalShape::Bent(bend), b);
            assert_eq!(cfgs.len(), 2, "{bend:?}");
            let mut hv_letters: Vec<Letter> = cfgs
                .iter()
                .map(|c| c.letters.iter().find(|(f, _)| *f == Family::HV).unwrap().1)
                .collect();
            hv_letters.sort();
            assert_eq!(hv_letters, vec![A, C]);
            for c in &cfgs {
                let non_hv: BTreeSet<Letter> = c
                    .letters
                    .iter()
                    .filter(|(f, _)| *f != Family::HV)
                    .map(|&(_, l)| l)
                    .collect();
                let hv = c.letters.iter().find(|(f, _)| *f == Family::HV).unwrap().1;
                match hv {
                    A => assert_eq!(non_hv, BTreeSet::from([B])),
                    C => assert_eq!(non_hv, BTreeSet::from([C])),
                    B => panic!("unexpected straight letter at the center"),
                }
            }
            assert!(resolve_degree6(b, bend).is_one());
        }
    }

    #[test]
    fn overfull_boundary_resolves_to_zero() {
        // Four edges pointing in, two out: no admissible configuration.
        let b = boundary_of(&[W, NW, N, E]);
        assert!(resolve_degree6(b, Bend::SW).is_zero());
        assert!(resolve_degree6(b, Bend::NE).is_zero());
    }

    #[test]
    fn ybe_holds_on_all_boundaries() {
        let report = verify_ybe().unwrap();
        assert_eq!(report, YbeReport { boundaries: 64, balanced: 20 });
    }

    /// Local kernels across all ice-rule boundaries and all move
    /// directions pass the axioms in exact ring arithmetic.
    #[test]
    fn local_kernels_pass_axioms() {
        let shapes = [
            LocalShape::Degree6,
            LocalShape::Bent(Bend::SW),
            LocalShape::Bent(Bend::NE),
        ];
        let mut checked = 0;
        for bits in 0u8..64 {
            let boundary: [bool; 6] = std::array::from_fn(|s| bits >> s & 1 == 1);
            if !boundary_balanced(boundary) {
                assert!(local_kernel(shapes[0], shapes[1], boundary).is_err());
                continue;
            }
            for from in shapes {
                for to in shapes {
                    if from == to {
                        continue;
                    }
                    let lk = local_kernel(from, to, boundary).unwrap();
                    let wx: Vec<RingElem> =
                        lk.sources.iter().map(|c| c.weight.as_ring()).collect();
                    let wy: Vec<RingElem> =
                        lk.targets.iter().map(|c| c.weight.as_ring()).collect();
                    let v = check_axioms(&wx, &wy, &lk.kernel);
                    assert!(v.is_empty(), "{from:?}->{to:?} {boundary:?}: {v:?}");
                    checked += 1;
                }
            }
        }
        assert_eq!(checked, 20 * 6);
    }

    /// A degree-6 target makes the local kernel deterministic.
    #[test]
    fn merge_kernel_is_deterministic() {
        let b = boundary_of(&[W, S]);
        let lk = local_kernel(LocalShape::Bent(Bend::SW), LocalShape::Degree6, b).unwrap();
        assert_eq!(lk.targets.len(), 1);
        for row in lk.kernel.forward() {
            assert_eq!(row, &vec![RingElem::one()]);
        }
    }

    #[test]
    fn sampler_is_reproducible() {
        let pattern = GTPattern::new(vec![vec![2], vec![2, 3], vec![2, 3, 3], vec![1, 2, 3, 4]])
            .unwrap();
        let mut a = FiberSampler::new(&pattern, 42, &caps()).unwrap();
        let mut b = FiberSampler::new(&pattern, 42, &caps()).unwrap();
        let run_a: Vec<usize> = (0..40).map(|_| a.draw().0).collect();
        let run_b: Vec<usize> = (0..40).map(|_| b.draw().0).collect();
        assert_eq!(run_a, run_b);
        let mut c = FiberSampler::new(&pattern, 43, &caps()).unwrap();
        let run_c: Vec<usize> = (0..40).map(|_| c.draw().0).collect();
        assert_ne!(run_a, run_c);
    }

    #[test]
    fn singleton_fiber_always_returns_the_same_sample() {
        let pattern = GTPattern::new(vec![vec![2], vec![1, 2]]).unwrap();
        let mut s = FiberSampler::new(&pattern, 7, &caps()).unwrap();
        assert_eq!(s.fiber_size(), 1);
        let first = s.draw();
        for _ in 0..10 {
            let next = s.draw();
            assert_eq!(next.1, first.1);
            assert_eq!(next.2, BigRat::one());
        }
    }

    /// Frequencies over 100000 draws match the exact law: chi-square
    /// statistic under the 0.1% critical value for 5 degrees of freedom.
    #[test]
    fn sampler_matches_exact_law() {
        let pattern = GTPattern::new(vec![vec![2], vec![2, 3], vec![2, 3, 3], vec![1, 2, 3, 4]])
            .unwrap();
        let mut s = FiberSampler::new(&pattern, 20260822, &caps()).unwrap();
        let trials = 100_000usize;
        let mut counts = vec![0u64; s.fiber_size()];
        for _ in 0..trials {
            counts[s.draw().0] += 1;
        }
        let mut stat = 0.0f64;
        for (idx, &obs) in counts.iter().enumerate() {
            let p = s.probability(idx);
            let expect = trials as f64 * rat_to_f64(&p);
            let d = obs as f64 - expect;
            stat += d * d / expect;
        }
        assert!(stat < 20.515, "chi-square statistic {stat}");
    }

    fn rat_to_f64(r: &BigRat) -> f64 {
        use num_traits::ToPrimitive;
        r.numer().to_f64().unwrap() / r.denom().to_f64().unwrap()
    }

    /// The two-stage boundary sampler emits configurations with the
    /// stated probabilities, which sum to 1 over the enumerated ensemble.
    #[test]
    fn ensemble_sampler_probabilities() {
        let spec = BoundarySpec::new(vec![1, 2, 3]).unwrap();
        let mut s = EnsembleSampler::new(&spec, 42, &caps()).unwrap();
        let rect = RectM6V::new(spec);
        let mut seen: BTreeMap<PathFamily6V, BigRat> = BTreeMap::new();
        for _ in 0..400 {
            let (fam, p) = s.draw().unwrap();
            // The stated probability is 2^(ic+n) over the total weight.
            let o = rect.paths_to_orientation(&fam).unwrap();
            let ic = six::ic(&rect, &o).unwrap();
            assert_eq!(p, BigRat::new(num_bigint::BigInt::from(1) << (ic + 3), 480.into()));
            seen.insert(fam, p);
        }
        // 400 draws over a 60-element ensemble: every configuration has
        // probability >= 8/480, so seeing under a third of them would be
        // astronomically unlikely.
        assert!(seen.len() > 20, "saw only {} distinct configurations", seen.len());
        let mass: BigRat = seen.values().cloned().sum();
        assert!(mass <= BigRat::one());
    }

    #[test]
    fn ensemble_sampler_is_reproducible() {
        let spec = BoundarySpec::new(vec![1, 2, 3]).unwrap();
        let mut a = EnsembleSampler::new(&spec, 5, &caps()).unwrap();
        let mut b = EnsembleSampler::new(&spec, 5, &caps()).unwrap();
        for _ in 0..60 {
            assert_eq!(a.draw().unwrap(), b.draw().unwrap());
        }
    }
}
