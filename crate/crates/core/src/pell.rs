//! Fundamental units of real quadratic orders.
//!
//! The order of discriminant `d > 0` is written `ℤ ⊕ ℤω` with
//! `ω = (σ + √d)/2`, `σ = d mod 2`; that is `ω = (1+√d)/2` for `d ≡ 1 (mod 4)`
//! and `ω = √(d/4)` for `d ≡ 0 (mod 4)`. The unit is found from the
//! continued-fraction expansion of `ω`, carried out on exact `(P + √d)/Q`
//! states.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{FormError, Result};
use crate::scalar::{is_square, Scalar};

pub const DEFAULT_PERIOD_CAP: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnitNorm {
    Plus,
    Minus,
}

impl UnitNorm {
    pub fn value(self) -> i32 {
        match self {
            UnitNorm::Plus => 1,
            UnitNorm::Minus => -1,
        }
    }
}

/// `ε = x + y·ω`, the smallest unit `> 1` of the order of discriminant `d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FundamentalUnit {
    pub d: BigInt,
    pub x: BigInt,
    pub y: BigInt,
    pub norm: UnitNorm,
}

/// A pair `(x, y)` standing for `x + y·ω` in the order of a fixed discriminant.
pub type OrderElement = (BigInt, BigInt);

/// `σ = d mod 2`, the trace of `ω`.
pub fn omega_trace(d: &BigInt) -> BigInt {
    d.mod_floor(&BigInt::from(2))
}

/// `N(x + yω) = x² + σxy + ((σ² - d)/4)·y²`.
pub fn element_norm(d: &BigInt, x: &BigInt, y: &BigInt) -> BigInt {
    let s = omega_trace(d);
    let n_omega = (&s * &s - d) / 4;
    x * x + &s * x * y + n_omega * y * y
}

/// Multiplication in `ℤ[ω]`, using `ω² = σω + (d - σ²)/4`.
pub fn order_mul(d: &BigInt, lhs: &OrderElement, rhs: &OrderElement) -> OrderElement {
    let s = omega_trace(d);
    let k = (d - &s * &s) / 4;
    let (x1, y1) = lhs;
    let (x2, y2) = rhs;
    let yy = y1 * y2;
    (x1 * x2 + &yy * k, x1 * y2 + x2 * y1 + s * yy)
}

pub fn order_pow(d: &BigInt, base: &OrderElement, exp: u32) -> OrderElement {
    let mut acc = (BigInt::one(), BigInt::zero());
    for _ in 0..exp {
        acc = order_mul(d, &acc, base);
    }
    acc
}

fn check_real_discriminant(d: &BigInt) -> Result<()> {
    if !d.is_positive() {
        return Err(FormError::Precondition(format!(
            "discriminant {d} must be positive"
        )));
    }
    if is_square(d) {
        return Err(FormError::SquareDiscriminant(d.to_string()));
    }
    let r = d.mod_floor(&BigInt::from(4));
    if !(r.is_zero() || r.is_one()) {
        return Err(FormError::BadResidue(d.to_string()));
    }
    Ok(())
}

pub fn fundamental_unit<T: Scalar>(d: &T) -> Result<FundamentalUnit> {
    fundamental_unit_capped(&d.to_bigint(), DEFAULT_PERIOD_CAP)
}

pub fn fundamental_unit_capped(d: &BigInt, cap: u64) -> Result<FundamentalUnit> {
    check_real_discriminant(d)?;
    // Complete quotients stay below 2√d, so i128 states suffice whenever d fits in i64.
    let (p, q, n) = match i64::from_bigint(d) {
        Some(small) => unit_convergent(i128::from(small), cap)?,
        None => unit_convergent(d.clone(), cap)?,
    };
    let sigma = omega_trace(d);
    let x = p - &sigma * &q;
    let norm = if n % 2 == 0 {
        UnitNorm::Minus
    } else {
        UnitNorm::Plus
    };
    debug_assert_eq!(element_norm(d, &x, &q), BigInt::from(norm.value()));
    Ok(FundamentalUnit {
        d: d.clone(),
        x,
        y: q,
        norm,
    })
}

/// Expands `ω = (σ + √d)/2` until a complete quotient has denominator 2 again.
/// Returns the convergent `p_n/q_n` and the index `n`; `p_n - q_n·ω` then has
/// norm `(-1)^(n+1)`.
fn unit_convergent<S: Scalar>(d: S, cap: u64) -> Result<(BigInt, BigInt, u64)> {
    let two = S::from_i64_exact(2);
    let root = d.sqrt();
    let mut p_state = d.mod_floor(&two);
    let mut q_state = two.clone();
    let (mut p_prev, mut p_cur) = (BigInt::zero(), BigInt::one());
    let (mut q_prev, mut q_cur) = (BigInt::one(), BigInt::zero());
    for n in 0..cap {
        let a = (p_state.clone() + root.clone()).div_floor(&q_state);
        let a_big = a.to_bigint();
        let p_next = &a_big * &p_cur + &p_prev;
        let q_next = &a_big * &q_cur + &q_prev;
        p_prev = std::mem::replace(&mut p_cur, p_next);
        q_prev = std::mem::replace(&mut q_cur, q_next);
        let new_p = a * q_state.clone() - p_state;
        let new_q = (d.clone() - new_p.clone() * new_p.clone()) / q_state;
        if new_q == two {
            return Ok((p_cur, q_cur, n));
        }
        p_state = new_p;
        q_state = new_q;
    }
    Err(FormError::PeriodCap(cap))
}

/// For `d ≡ 5 (mod 8)`: whether `h⁺(d) = h⁺(4d)`, read off the unit.
///
/// For `d > 0` this is "`y_d` is odd"; for `d < 0` the only such discriminant
/// is `-3`.
pub fn unit_parity_criterion<T: Scalar>(d: &T) -> Result<bool> {
    let d = d.to_bigint();
    if d.mod_floor(&BigInt::from(8)) != BigInt::from(5) {
        return Err(FormError::Precondition(format!(
            "unit parity criterion needs d ≡ 5 mod 8, got {d}"
        )));
    }
    if d.is_negative() {
        return Ok(d == BigInt::from(-3));
    }
    Ok(fundamental_unit(&d)?.y.is_odd())
}

/// Fundamental solution `(t, u)` of `t² - d·u² = 4` with `t, u > 0`.
pub fn pell4<T: Scalar>(d: &T) -> Result<(BigInt, BigInt)> {
    let unit = fundamental_unit(d)?;
    let d = unit.d;
    let sigma = omega_trace(&d);
    // ε = (t0 + u0√d)/2
    let t0 = BigInt::from(2) * &unit.x + &sigma * &unit.y;
    let u0 = unit.y;
    Ok(match unit.norm {
        UnitNorm::Plus => (t0, u0),
        UnitNorm::Minus => ((&t0 * &t0 + &d * &u0 * &u0) / 2, t0 * u0),
    })
}

/// For `d ≡ 1 (mod 4)`: whether `N(ε_d) = N(ε_{4d})`. Always true; kept as a self-test.
pub fn norm_transfer_check<T: Scalar>(d: &T) -> Result<bool> {
    let d = d.to_bigint();
    if d.mod_floor(&BigInt::from(4)) != BigInt::one() {
        return Err(FormError::BadResidue(format!("{d} (need d ≡ 1 mod 4)")));
    }
    let lower = fundamental_unit(&d)?;
    let upper = fundamental_unit(&(BigInt::from(4) * &d))?;
    Ok(lower.norm == upper.norm)
}
