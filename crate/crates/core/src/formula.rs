//! Closed-form product evaluators, computed exactly over big rationals.
//!
//! Both evaluators assert that the final rational value is an integer; a
//! failure there is an arithmetic bug, not bad input, and panics. Domain
//! errors (zero denominators for parameters outside a formula's range)
//! are reported as [`Error::FormulaDomain`].

use std::sync::{LazyLock, Mutex};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::ring::{pow2, BigRat};

pub const DEFAULT_FACTORIAL_CAP: u64 = 200;

// Shared factorial table; grows on demand up to the cap.
static FACTORIALS: LazyLock<Mutex<Vec<BigUint>>> =
    LazyLock::new(|| Mutex::new(vec![BigUint::one()]));

fn factorial_cap() -> u64 {
    match std::env::var("ICEVERTEX_FACTORIAL_CAP") {
        Ok(s) => s.parse().unwrap_or(DEFAULT_FACTORIAL_CAP),
        Err(_) => DEFAULT_FACTORIAL_CAP,
    }
}

pub fn factorial(n: u64) -> Result<BigUint> {
    let cap = factorial_cap();
    if n > cap {
        return Err(Error::CapExceeded { what: "factorial argument", cap });
    }
    let mut memo = FACTORIALS.lock().unwrap();
    while (memo.len() as u64) <= n {
        let next = memo.last().unwrap() * (memo.len() as u64);
        memo.push(next);
    }
    Ok(memo[n as usize].clone())
}

/// Rising factorial `(a)_k = a·(a+1)···(a+k-1)`; `(a)_0 = 1`.
pub fn pochhammer(a: &BigRat, k: u64) -> BigRat {
    let mut acc = BigRat::one();
    let mut term = a.clone();
    for _ in 0..k {
        acc *= &term;
        term += BigRat::one();
    }
    acc
}

fn int_rat(v: i64) -> BigRat {
    BigRat::from_integer(BigInt::from(v))
}

/// `2^{n(n-1)/2} · prod_{j=0}^{n-1} (4j+2)! / (n+2j+1)!`
///
/// The diagonally-free count for the staircase boundary `k = (1,..,n)`;
/// values start 1, 4, 60, 3328, 678912.
pub fn eval_df_formula(n: u64) -> Result<BigInt> {
    if n == 0 {
        return Err(Error::FormulaDomain("n must be at least 1".into()));
    }
    let mut val = pow2((n * (n - 1) / 2) as i64);
    for j in 0..n {
        val *= BigRat::from_integer(BigInt::from(factorial(4 * j + 2)?));
        val /= BigRat::from_integer(BigInt::from(factorial(n + 2 * j + 1)?));
    }
    assert!(val.is_integer(), "product formula gave non-integer {val} for n={n}");
    Ok(val.to_integer())
}

/// Free-boundary count:
/// `prod_{i=1}^{n} (m-n+3i+1)_{i-1} (m-n+i+1)_i / [((m-n+i+2)/2)_{i-1} (i)_i]`
/// with half-integer Pochhammer bases evaluated as exact rationals.
///
/// Equals the sum of the 20V counts over all strictly increasing
/// `k` in `{1,..,m+1}^n`. Setting `m = n-1` recovers [`eval_df_formula`].
/// Parameters that hit a zero factor in a denominator Pochhammer (for
/// example `(n,m) = (4,0)`) are outside the formula's range and error.
pub fn eval_free_boundary_formula(n: u64, m: u64) -> Result<BigInt> {
    if n == 0 {
        return Err(Error::FormulaDomain("n must be at least 1".into()));
    }
    let mn = m as i64 - n as i64;
    let mut val = BigRat::one();
    for i in 1..=(n as i64) {
        let num1 = pochhammer(&int_rat(mn + 3 * i + 1), (i - 1) as u64);
        let num2 = pochhammer(&int_rat(mn + i + 1), i as u64);
        let den1 = pochhammer(
            &BigRat::new(BigInt::from(mn + i + 2), BigInt::from(2)),
            (i - 1) as u64,
        );
        let den2 = pochhammer(&int_rat(i), i as u64);
        if den1.is_zero() || den2.is_zero() {
            return Err(Error::FormulaDomain(format!(
                "zero Pochhammer denominator at i={i} for (n,m)=({n},{m})"
            )));
        }
        val *= num1 * num2 / (den1 * den2);
    }
    assert!(val.is_integer(), "free-boundary formula gave non-integer {val} for (n,m)=({n},{m})");
    Ok(val.to_integer())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorial_small() {
        assert_eq!(factorial(0).unwrap(), BigUint::one());
        assert_eq!(factorial(10).unwrap(), BigUint::from(3_628_800u64));
    }

    #[test]
    fn pochhammer_half_integer() {
        // (3/2)_3 = 3/2 · 5/2 · 7/2 = 105/8.
        let a = BigRat::new(BigInt::from(3), BigInt::from(2));
        assert_eq!(pochhammer(&a, 3), BigRat::new(BigInt::from(105), BigInt::from(8)));
        assert_eq!(pochhammer(&a, 0), BigRat::one());
    }

    #[test]
    fn df_values() {
        let expect: [i64; 5] = [1, 4, 60, 3328, 678912];
        for (n, e) in (1..=5).zip(expect) {
            assert_eq!(eval_df_formula(n).unwrap(), BigInt::from(e), "n={n}");
        }
    }

    #[test]
    fn free_boundary_values() {
        assert_eq!(eval_free_boundary_formula(1, 0).unwrap(), BigInt::from(1));
        assert_eq!(eval_free_boundary_formula(5, 4).unwrap(), BigInt::from(678912));
        // Two columns, rows up to 3: the three boundary choices together.
        assert_eq!(eval_free_boundary_formula(2, 2).unwrap(), BigInt::from(14));
    }

    #[test]
    fn free_boundary_reduces_to_df_at_m_eq_n_minus_1() {
        for n in 1..=6 {
            assert_eq!(
                eval_free_boundary_formula(n, n - 1).unwrap(),
                eval_df_formula(n).unwrap(),
                "n={n}"
            );
        }
    }

    #[test]
    fn free_boundary_out_of_range() {
        // No boundary sequence fits when m+1 < n; the formula degenerates
        // to 0 where defined and to 0/0 at (4,0).
        assert_eq!(eval_free_boundary_formula(2, 0).unwrap(), BigInt::zero());
        assert_eq!(eval_free_boundary_formula(3, 0).unwrap(), BigInt::zero());
        assert_eq!(eval_free_boundary_formula(4, 1).unwrap(), BigInt::zero());
        assert_eq!(eval_free_boundary_formula(4, 2).unwrap(), BigInt::zero());
        assert!(matches!(
            eval_free_boundary_formula(4, 0),
            Err(Error::FormulaDomain(_))
        ));
    }

    #[test]
    fn integrality_sweep() {
        for n in 1..=6u64 {
            for m in (n - 1)..=(n + 4) {
                // Integrality is asserted inside; a panic here is the bug.
                let v = eval_free_boundary_formula(n, m).unwrap();
                assert!(v > BigInt::zero(), "(n,m)=({n},{m})");
            }
        }
    }
}
