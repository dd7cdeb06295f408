//! Exact weight arithmetic: monomials `2^{s/6}·q^e` and their ambient ring.
//!
//! `q` is a primitive 16th root of unity and `y = 2^{1/6}` a real sixth
//! root of 2; both are handled formally, reduced by the minimal
//! polynomials `x^8 + 1` and `y^6 - 2` over the rationals. Equality is
//! exact equality of all 48 rational coefficients; there is no
//! floating point anywhere.
//!
//! Individual vertex weights are always monomials ([`WeightMonomial`],
//! cheap value type); full [`RingElem`]s only appear where *sums* of
//! weights arise, i.e. in degree-6 resolutions and the identities built
//! on them.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::lattice::BoundarySpec;

pub type BigRat = num_rational::BigRational;

/// `2^a` as an exact rational, `a` of either sign.
pub fn pow2(a: i64) -> BigRat {
    if a >= 0 {
        BigRat::from_integer(BigInt::one() << a as usize)
    } else {
        BigRat::new(BigInt::one(), BigInt::one() << (-a) as usize)
    }
}

/// Weight line families: the subscript picks which two of the three line
/// directions (horizontal, vertical, diagonal) cross at the vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    /// Horizontal-vertical crossings (subscript 1).
    HV,
    /// Horizontal-diagonal crossings (subscript 2).
    HD,
    /// Vertical-diagonal crossings (subscript 3).
    VD,
}

/// Weight letter: `a` for straight-through or empty vertices, `b` when the
/// two used edges lie on one line, `c` when they split across both lines.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    A,
    B,
    C,
}

/// A monomial `2^{sixths/6} · q^{qexp}` with `0 <= qexp < 16`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WeightMonomial {
    pub sixths: i64,
    pub qexp: u8,
}

impl WeightMonomial {
    pub fn new(sixths: i64, qexp: i64) -> Self {
        WeightMonomial { sixths, qexp: qexp.rem_euclid(16) as u8 }
    }

    pub fn one() -> Self {
        WeightMonomial { sixths: 0, qexp: 0 }
    }

    /// `2^e` as a monomial.
    pub fn power_of_two(e: i64) -> Self {
        WeightMonomial { sixths: 6 * e, qexp: 0 }
    }

    pub fn mul(&self, o: &WeightMonomial) -> Self {
        WeightMonomial::new(self.sixths + o.sixths, self.qexp as i64 + o.qexp as i64)
    }

    pub fn pow(&self, e: u64) -> Self {
        WeightMonomial::new(self.sixths * e as i64, self.qexp as i64 * e as i64)
    }

    pub fn as_ring(&self) -> RingElem {
        let a = self.sixths.div_euclid(6);
        let r = self.sixths.rem_euclid(6) as usize;
        let mut coeff = pow2(a);
        let e = self.qexp as usize;
        let xe = if e < 8 {
            e
        } else {
            coeff = -coeff;
            e - 8
        };
        let mut elem = RingElem::zero();
        elem.c[RingElem::idx(xe, r)] = coeff;
        elem
    }
}

impl fmt::Display for WeightMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.sixths == 0 && self.qexp == 0 {
            return write!(f, "1");
        }
        let mut first = true;
        if self.sixths != 0 {
            let g = num_integer::gcd(self.sixths.abs(), 6);
            let (num, den) = (self.sixths / g, 6 / g);
            if den == 1 {
                write!(f, "2^{{{num}}}")?;
            } else {
                write!(f, "2^{{{num}/{den}}}")?;
            }
            first = false;
        }
        if self.qexp != 0 {
            if !first {
                write!(f, "·")?;
            }
            write!(f, "q^{{{}}}", self.qexp)?;
        }
        Ok(())
    }
}

/// Element of ℚ[x]/(x⁸+1) ⊗ ℚ[y]/(y⁶−2), with `x = q`, `y = 2^{1/6}`.
/// Coefficients are kept fully reduced at all times, so equality is
/// coefficientwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingElem {
    /// 48 coefficients, index `6*xe + ye` for x-power `xe`, y-power `ye`.
    c: Vec<BigRat>,
}

impl RingElem {
    fn idx(xe: usize, ye: usize) -> usize {
        6 * xe + ye
    }

    pub fn zero() -> Self {
        RingElem { c: vec![BigRat::zero(); 48] }
    }

    pub fn one() -> Self {
        Self::from_rat(BigRat::one())
    }

    pub fn from_rat(r: BigRat) -> Self {
        let mut e = Self::zero();
        e.c[0] = r;
        e
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rat(BigRat::from_integer(BigInt::from(n)))
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self == &Self::one()
    }

    pub fn scale(&self, r: &BigRat) -> Self {
        RingElem { c: self.c.iter().map(|x| x * r).collect() }
    }
}

impl Add for &RingElem {
    type Output = RingElem;
    fn add(self, o: &RingElem) -> RingElem {
        RingElem { c: self.c.iter().zip(&o.c).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &RingElem {
    type Output = RingElem;
    fn sub(self, o: &RingElem) -> RingElem {
        RingElem { c: self.c.iter().zip(&o.c).map(|(a, b)| a - b).collect() }
    }
}

impl Neg for &RingElem {
    type Output = RingElem;
    fn neg(self) -> RingElem {
        RingElem { c: self.c.iter().map(|a| -a).collect() }
    }
}

impl Mul for &RingElem {
    type Output = RingElem;
    fn mul(self, o: &RingElem) -> RingElem {
        let mut out = RingElem::zero();
        for xe1 in 0..8 {
            for ye1 in 0..6 {
                let a = &self.c[RingElem::idx(xe1, ye1)];
                if a.is_zero() {
                    continue;
                }
                for xe2 in 0..8 {
                    for ye2 in 0..6 {
                        let b = &o.c[RingElem::idx(xe2, ye2)];
                        if b.is_zero() {
                            continue;
                        }
                        let mut term = a * b;
                        let mut xe = xe1 + xe2;
                        if xe >= 8 {
                            // x^8 = -1
                            xe -= 8;
                            term = -term;
                        }
                        let mut ye = ye1 + ye2;
                        if ye >= 6 {
                            // y^6 = 2
                            ye -= 6;
                            term *= BigRat::from_integer(BigInt::from(2));
                        }
                        out.c[RingElem::idx(xe, ye)] += term;
                    }
                }
            }
        }
        out
    }
}

impl fmt::Display for RingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        for xe in 0..8 {
            for ye in 0..6 {
                let c = &self.c[RingElem::idx(xe, ye)];
                if c.is_zero() {
                    continue;
                }
                if wrote {
                    write!(f, " + ")?;
                }
                write!(f, "({c})")?;
                if xe > 0 {
                    write!(f, "·q^{xe}")?;
                }
                if ye > 0 {
                    write!(f, "·2^{{{ye}/6}}")?;
                }
                wrote = true;
            }
        }
        if !wrote {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Table of vertex weight monomials by line family and letter.
pub fn vertex_weight(family: Family, letter: Letter) -> WeightMonomial {
    let (sixths, qexp) = match (family, letter) {
        (Family::HV, Letter::A) => (-2, 0),
        (Family::HV, Letter::B) => (1, 0),
        (Family::HV, Letter::C) => (-2, 0),
        (Family::HD, Letter::A) => (1, 3),
        (Family::HD, Letter::B) => (-2, 3),
        (Family::HD, Letter::C) => (-2, 3),
        (Family::VD, Letter::A) => (1, 13),
        (Family::VD, Letter::B) => (-2, 13),
        (Family::VD, Letter::C) => (-2, 13),
    };
    WeightMonomial::new(sixths, qexp)
}

/// The constant `C_k = b1^{n(n-1)/2} · a2^{n(n-1)/2 + n·k_n} · a3^{n(n+1)/2}`
/// that normalizes mixed 6V weights to powers of two.
pub fn prefactor(spec: &BoundarySpec) -> WeightMonomial {
    let n = spec.n() as u64;
    let kn = spec.k_n() as u64;
    let b1 = vertex_weight(Family::HV, Letter::B);
    let a2 = vertex_weight(Family::HD, Letter::A);
    let a3 = vertex_weight(Family::VD, Letter::A);
    b1.pow(n * (n - 1) / 2)
        .mul(&a2.pow(n * (n - 1) / 2 + n * kn))
        .mul(&a3.pow(n * (n + 1) / 2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w(f: Family, l: Letter) -> WeightMonomial {
        vertex_weight(f, l)
    }

    #[test]
    fn qexp_normalizes_mod_16() {
        assert_eq!(WeightMonomial::new(0, 16), WeightMonomial::one());
        assert_eq!(WeightMonomial::new(0, -3).qexp, 13);
        assert_eq!(WeightMonomial::new(0, 35).qexp, 3);
    }

    #[test]
    fn radical_and_root_reductions() {
        let y3 = WeightMonomial::new(3, 0).as_ring();
        assert_eq!(&y3 * &y3, RingElem::from_int(2));
        let x4 = WeightMonomial::new(0, 4).as_ring();
        assert_eq!(&x4 * &x4, RingElem::from_int(-1));
        // q^16 = 1 through the ring as well.
        let x = WeightMonomial::new(0, 1).as_ring();
        let mut acc = RingElem::one();
        for _ in 0..16 {
            acc = &acc * &x;
        }
        assert!(acc.is_one());
    }

    #[test]
    fn weight_identities() {
        // c1·a2·a3 = 1 (straight crossing resolves to weight one).
        let m = w(Family::HV, Letter::C)
            .mul(&w(Family::HD, Letter::A))
            .mul(&w(Family::VD, Letter::A));
        assert_eq!(m, WeightMonomial::one());
        // a1·c2·c3 + c1·b2·b3 = 1/2 + 1/2 = 1 (the two-configuration side).
        let t1 = w(Family::HV, Letter::A)
            .mul(&w(Family::HD, Letter::C))
            .mul(&w(Family::VD, Letter::C));
        let t2 = w(Family::HV, Letter::C)
            .mul(&w(Family::HD, Letter::B))
            .mul(&w(Family::VD, Letter::B));
        assert_eq!(t1, WeightMonomial::power_of_two(-1));
        assert_eq!(t2, WeightMonomial::power_of_two(-1));
        assert!((&t1.as_ring() + &t2.as_ring()).is_one());
        // a1·b2·b3 = c1·c2·c3 = 1/2.
        let t3 = w(Family::HV, Letter::A)
            .mul(&w(Family::HD, Letter::B))
            .mul(&w(Family::VD, Letter::B));
        let t4 = w(Family::HV, Letter::C)
            .mul(&w(Family::HD, Letter::C))
            .mul(&w(Family::VD, Letter::C));
        assert_eq!(t3, WeightMonomial::power_of_two(-1));
        assert_eq!(t4, WeightMonomial::power_of_two(-1));
    }

    #[test]
    fn prefactor_examples() {
        let s = |k: &[u32]| BoundarySpec::new(k.to_vec()).unwrap();
        assert_eq!(prefactor(&s(&[1, 2, 3, 4])), WeightMonomial { sixths: 38, qexp: 4 });
        assert_eq!(prefactor(&s(&[1])), WeightMonomial { sixths: 2, qexp: 0 });
        assert_eq!(prefactor(&s(&[2, 3, 4, 6])), WeightMonomial { sixths: 46, qexp: 12 });
    }

    fn arb_monomial() -> impl Strategy<Value = WeightMonomial> {
        (-30i64..30, 0i64..48).prop_map(|(s, q)| WeightMonomial::new(s, q))
    }

    fn arb_elem() -> impl Strategy<Value = RingElem> {
        prop::collection::vec((arb_monomial(), -5i64..5), 1..4).prop_map(|terms| {
            let mut acc = RingElem::zero();
            for (m, c) in terms {
                acc = &acc + &m.as_ring().scale(&BigRat::from_integer(c.into()));
            }
            acc
        })
    }

    proptest! {
        #[test]
        fn injection_is_multiplicative(m1 in arb_monomial(), m2 in arb_monomial()) {
            prop_assert_eq!(m1.mul(&m2).as_ring(), &m1.as_ring() * &m2.as_ring());
        }

        #[test]
        fn ring_axioms(a in arb_elem(), b in arb_elem(), c in arb_elem()) {
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        }
    }
}
