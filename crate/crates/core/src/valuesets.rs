//! Exact value-set computations for primitive forms of non-square discriminant.
//!
//! `n ≠ 0` is represented by `f` iff `n/k²` is primitively represented for
//! some `k² | n`, and `m` is primitively represented iff some root
//! `b² ≡ d (mod 4|m|)` makes `(m, b, (b² - d)/4m)` SL₂-equivalent to `f`.
//! Definite forms are handled by a direct bounded search on their reduced form.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use rayon::prelude::*;

use crate::arith::{is_prime, prime_sieve, sqrt_mod};
use crate::error::{FormError, Result};
use crate::forms::{Form, Unimodular};
use crate::pell::unit_parity_criterion;
use crate::reduction::{automorph, reduce_with_matrix, CycleIndex};
use crate::scalar::{small, to_i64, Scalar};

/// Largest `M` accepted by [`value_window`].
pub const DEFAULT_WINDOW_CAP: u64 = 1_000_000;
/// Largest `X` accepted by [`prime_density_estimate`].
pub const DEFAULT_PRIME_CAP: u64 = 10_000_000;

pub type Witness<T> = (T, T);

/// Ordering used to pick one witness among many: `(|x|, |y|, x < 0, y < 0)`.
fn witness_key<T: Scalar>(w: &Witness<T>) -> (T, T, bool, bool) {
    (w.0.abs(), w.1.abs(), w.0.is_negative(), w.1.is_negative())
}

fn pick<T: Scalar>(candidates: impl IntoIterator<Item = Witness<T>>) -> Option<Witness<T>> {
    candidates.into_iter().min_by_key(witness_key)
}

enum Strategy<T: Scalar> {
    /// `form.act(to_reduced) == sign · reduced`, `reduced` positive definite.
    Definite {
        reduced: Form<T>,
        to_reduced: Unimodular<T>,
        negative: bool,
    },
    Indefinite {
        index: CycleIndex<T>,
        automorph: Unimodular<BigInt>,
    },
}

/// Precomputed data for repeated representation queries against one form.
pub struct Representer<T: Scalar> {
    form: Form<T>,
    d: T,
    strategy: Strategy<T>,
}

impl<T: Scalar> Representer<T> {
    pub fn new(f: &Form<T>) -> Result<Self> {
        let d = f.nonsquare_discriminant()?;
        if !f.is_primitive() {
            return Err(FormError::Imprimitive(f.to_string()));
        }
        let strategy = if d.is_negative() {
            let negative = f.a.is_negative();
            let (reduced, to_reduced) = reduce_with_matrix(f)?;
            let reduced = if negative { reduced.neg() } else { reduced };
            Strategy::Definite {
                reduced,
                to_reduced,
                negative,
            }
        } else {
            Strategy::Indefinite {
                index: CycleIndex::new(f)?,
                automorph: automorph(&f.map(Scalar::to_bigint))?,
            }
        };
        Ok(Representer {
            form: f.clone(),
            d,
            strategy,
        })
    }

    pub fn form(&self) -> &Form<T> {
        &self.form
    }

    /// Every `(x, y)` with `f(x, y) = n` for a definite form (finite).
    fn definite_solutions(&self, n: &T) -> Vec<Witness<T>> {
        let Strategy::Definite {
            reduced,
            to_reduced,
            negative,
        } = &self.strategy
        else {
            unreachable!()
        };
        let n = if *negative { -n.clone() } else { n.clone() };
        if !n.is_positive() {
            return if n.is_zero() {
                vec![(T::zero(), T::zero())]
            } else {
                Vec::new()
            };
        }
        let (a, b) = (&reduced.a, &reduced.b);
        let four_an = small::<T>(4) * a.clone() * n.clone();
        let y_max = (four_an.clone() / (-self.d.clone())).sqrt();
        let two_a = small::<T>(2) * a.clone();
        let mut out = Vec::new();
        let mut y = -y_max.clone();
        while y <= y_max {
            // a x² + (b y) x + (c y² - n) = 0
            let disc = self.d.clone() * y.clone() * y.clone() + four_an.clone();
            if !disc.is_negative() {
                let s = disc.sqrt();
                if s.clone() * s.clone() == disc {
                    let by = b.clone() * y.clone();
                    for root in [s.clone() - by.clone(), -s.clone() - by.clone()] {
                        if root.is_multiple_of(&two_a) {
                            let x = root / two_a.clone();
                            debug_assert_eq!(reduced.eval(&x, &y), n);
                            out.push(to_reduced.apply(&x, &y));
                        }
                    }
                }
            }
            y = y + T::one();
        }
        out.sort_by_key(witness_key);
        out.dedup();
        out
    }

    /// Walks the automorph orbit of `w` (and of `-w`) towards the smallest witness key.
    fn shrink(&self, w: Witness<BigInt>) -> Witness<BigInt> {
        let Strategy::Indefinite { automorph, .. } = &self.strategy else {
            return w;
        };
        let inverse = automorph.inverse();
        let mut best = w;
        for step in [automorph.clone(), inverse] {
            loop {
                let next = step.apply(&best.0, &best.1);
                if witness_key(&next) < witness_key(&best) {
                    best = next;
                } else {
                    break;
                }
            }
        }
        let flipped = (-best.0.clone(), -best.1.clone());
        pick([best, flipped]).unwrap()
    }

    /// The forms `(m, b, (b² - d)/4m)` with `0 ≤ b < 2|m|` and `b² ≡ d (mod 4|m|)`.
    fn root_forms(&self, m: &T) -> Result<Vec<Form<T>>> {
        let m_abs = to_i64(&m.abs())? as u64;
        let modulus = m_abs
            .checked_mul(4)
            .ok_or_else(|| FormError::Overflow(m.to_string()))?;
        let d_mod = to_i64(&self.d.mod_floor(&small::<T>(modulus as i64)))?;
        Ok(sqrt_mod(d_mod, modulus)
            .into_iter()
            .take_while(|&b| b < 2 * m_abs)
            .map(|b| {
                let b = small::<T>(b as i64);
                let c = (b.clone() * b.clone() - self.d.clone()) / (small::<T>(4) * m.clone());
                Form::new(m.clone(), b, c)
            })
            .collect())
    }

    fn index(&self) -> &CycleIndex<T> {
        match &self.strategy {
            Strategy::Indefinite { index, .. } => index,
            Strategy::Definite { .. } => unreachable!(),
        }
    }

    fn indefinite_primitive_exists(&self, m: &T) -> Result<bool> {
        for g in self.root_forms(m)? {
            if self.index().contains(&g)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn indefinite_primitive(&self, m: &T) -> Result<Option<Witness<BigInt>>> {
        let mut found = Vec::new();
        for g in self.root_forms(m)? {
            if let Some(n) = self.index().transport_big(&g)? {
                let w = (n.alpha.clone(), n.gamma.clone());
                debug_assert_eq!(
                    self.form.map(Scalar::to_bigint).eval(&w.0, &w.1),
                    m.to_bigint()
                );
                found.push(self.shrink(w));
            }
        }
        Ok(pick(found))
    }

    /// Square divisors `k²` of `n ≠ 0`, as `k`.
    fn square_divisors(n: &T) -> Vec<T> {
        let n_abs = n.abs();
        let mut out = Vec::new();
        let mut k = T::one();
        while k.clone() * k.clone() <= n_abs {
            if n.is_multiple_of(&(k.clone() * k.clone())) {
                out.push(k.clone());
            }
            k = k + T::one();
        }
        out
    }

    /// Whether `n ∈ Im(f)`, without constructing a witness.
    pub fn contains(&self, n: &T) -> Result<bool> {
        if n.is_zero() {
            return Ok(true);
        }
        if let Strategy::Definite { .. } = self.strategy {
            return Ok(!self.definite_solutions(n).is_empty());
        }
        for k in Self::square_divisors(n) {
            if self.indefinite_primitive_exists(&(n.clone() / (k.clone() * k)))? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Whether `n ∈ f(ℤ²_prim)`, without constructing a witness.
    pub fn contains_primitively(&self, n: &T) -> Result<bool> {
        if let Strategy::Definite { .. } = self.strategy {
            return Ok(self.represents_primitively(n)?.is_some());
        }
        Ok(!n.is_zero() && self.indefinite_primitive_exists(n)?)
    }

    /// `Some(witness)` iff `n ∈ Im(f)`.
    pub fn represents(&self, n: &T) -> Result<Option<Witness<T>>> {
        if n.is_zero() {
            return Ok(Some((T::zero(), T::zero())));
        }
        if let Strategy::Definite { .. } = self.strategy {
            return Ok(pick(self.definite_solutions(n)));
        }
        let mut found = Vec::new();
        for k in Self::square_divisors(n) {
            let m = n.clone() / (k.clone() * k.clone());
            if let Some((x, y)) = self.indefinite_primitive(&m)? {
                let k = k.to_bigint();
                found.push((x * &k, y * &k));
            }
        }
        pick(found).map(narrow).transpose()
    }

    /// `Some(witness)` iff `n = f(x, y)` with `gcd(x, y) = 1`.
    pub fn represents_primitively(&self, n: &T) -> Result<Option<Witness<T>>> {
        if n.is_zero() {
            return Ok(None);
        }
        if let Strategy::Definite { .. } = self.strategy {
            return Ok(pick(
                self.definite_solutions(n)
                    .into_iter()
                    .filter(|(x, y)| x.gcd(y).is_one()),
            ));
        }
        self.indefinite_primitive(n)?.map(narrow).transpose()
    }

    /// Every representation of `n` by a definite form; `None` for indefinite forms.
    pub fn all_definite(&self, n: &T) -> Option<Vec<Witness<T>>> {
        match self.strategy {
            Strategy::Definite { .. } => Some(self.definite_solutions(n)),
            Strategy::Indefinite { .. } => None,
        }
    }
}

fn narrow<T: Scalar>(w: Witness<BigInt>) -> Result<Witness<T>> {
    Ok((T::try_from_bigint(&w.0)?, T::try_from_bigint(&w.1)?))
}

/// Exact membership `n ∈ Im(f)` for primitive `f`, with a witness.
pub fn represents_exact<T: Scalar>(f: &Form<T>, n: &T) -> Result<Option<Witness<T>>> {
    Representer::new(f)?.represents(n)
}

/// Membership in `f(ℤ²_prim)` for primitive `f`, with a coprime witness.
pub fn represents_primitively<T: Scalar>(f: &Form<T>, n: &T) -> Result<Option<Witness<T>>> {
    Representer::new(f)?.represents_primitively(n)
}

/// Membership in `Im(f)` for any form of non-square discriminant, scaling out the content.
pub fn represents<T: Scalar>(f: &Form<T>, n: &T) -> Result<Option<Witness<T>>> {
    let (g, content) = f.primitive_part()?;
    if !n.is_multiple_of(&content) {
        return Ok(None);
    }
    represents_exact(&g, &(n.clone() / content))
}

/// Moves a representation `f(x, y)` to one with even first coordinate.
///
/// Requires `d ≡ 5 (mod 8)` with `h⁺(d) = h⁺(4d)`. For `d > 0` the automorph,
/// which has order 3 modulo 2, is applied at most twice; for `d = -3` the
/// finitely many representations are searched.
pub fn evenize_representation<T: Scalar>(f: &Form<T>, x: &T, y: &T) -> Result<Witness<T>> {
    let d = f.nonsquare_discriminant()?;
    if !f.is_primitive() {
        return Err(FormError::Imprimitive(f.to_string()));
    }
    if d.mod_floor(&small::<T>(8)) != small::<T>(5) {
        return Err(FormError::Precondition(format!(
            "evenization needs d ≡ 5 mod 8, got {d}"
        )));
    }
    if !unit_parity_criterion(&d)? {
        return Err(FormError::Precondition(format!(
            "h⁺({d}) ≠ h⁺(4·{d}); no even representative is guaranteed"
        )));
    }
    if x.is_even() {
        return Ok((x.clone(), y.clone()));
    }
    if d.is_negative() {
        let n = f.eval(x, y);
        let rep = Representer::new(f)?;
        return rep
            .all_definite(&n)
            .unwrap_or_default()
            .into_iter()
            .find(|(x, _)| x.is_even())
            .ok_or_else(|| FormError::Precondition(format!("no even representation of {n}")));
    }
    let m = automorph(&f.map(Scalar::to_bigint))?;
    let mut v = (x.to_bigint(), y.to_bigint());
    for _ in 0..2 {
        v = m.apply(&v.0, &v.1);
        if v.0.is_even() {
            return narrow(v);
        }
    }
    Err(FormError::Precondition(
        "automorph does not have order 3 modulo 2".into(),
    ))
}

/// Which pairs `(x, y) ∈ (ℤ/m)²` contribute to a residue image.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Restriction {
    AllPairs,
    /// `gcd(x, y, m) = 1`, the reductions of coprime pairs.
    CoprimePairs,
    /// `x ≡ y (mod 2)`.
    EqualParity,
    /// `x ≡ 0 (mod 2)`.
    EvenFirst,
}

impl Restriction {
    pub fn name(self) -> &'static str {
        match self {
            Restriction::AllPairs => "all-pairs",
            Restriction::CoprimePairs => "coprime-pairs",
            Restriction::EqualParity => "equal-parity",
            Restriction::EvenFirst => "even-first",
        }
    }

    fn admits(self, x: u64, y: u64, m: u64) -> bool {
        match self {
            Restriction::AllPairs => true,
            Restriction::CoprimePairs => x.gcd(&y).gcd(&m) == 1,
            Restriction::EqualParity => (x + y).is_multiple_of(2),
            Restriction::EvenFirst => x.is_multiple_of(2),
        }
    }
}

impl std::str::FromStr for Restriction {
    type Err = FormError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "all" | "all-pairs" => Restriction::AllPairs,
            "coprime" | "coprime-pairs" => Restriction::CoprimePairs,
            "equal-parity" => Restriction::EqualParity,
            "even-first" => Restriction::EvenFirst,
            _ => {
                return Err(FormError::Parse {
                    input: s.into(),
                    reason: "unknown restriction".into(),
                })
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueImage {
    pub modulus: u64,
    pub residues: BTreeSet<u64>,
    pub restriction: Restriction,
}

pub fn image_mod<T: Scalar>(f: &Form<T>, m: u64, restriction: Restriction) -> Result<ResidueImage> {
    if m < 2 {
        return Err(FormError::Precondition(format!(
            "modulus {m} must be at least 2"
        )));
    }
    let modulus = small::<T>(i64::try_from(m).map_err(|_| FormError::Overflow(m.to_string()))?);
    let coeff = |v: &T| v.mod_floor(&modulus).to_u64().expect("residue fits") as u128;
    let (a, b, c) = (coeff(&f.a), coeff(&f.b), coeff(&f.c));
    let mm = m as u128;
    let mut residues = BTreeSet::new();
    for x in 0..m {
        for y in 0..m {
            if !restriction.admits(x, y, m) {
                continue;
            }
            let (x, y) = (x as u128, y as u128);
            let v = (a * (x * x % mm) + b * (x * y % mm) + c * (y * y % mm)) % mm;
            residues.insert(v as u64);
        }
    }
    Ok(ResidueImage {
        modulus: m,
        residues,
        restriction,
    })
}

/// Number of squares modulo `q^k` from the closed formulas (`q` prime, `k ≥ 1`).
pub fn square_count(q: u64, k: u32) -> Result<u64> {
    if !is_prime(q) {
        return Err(FormError::NotPrime(q));
    }
    if k == 0 {
        return Err(FormError::Precondition(
            "exponent must be at least 1".into(),
        ));
    }
    let overflow = || FormError::Overflow(format!("{q}^{k}"));
    let q128 = q as u128;
    let (num, den) = if q == 2 {
        let base = 1u128.checked_shl(k - 1).ok_or_else(overflow)?;
        (base + if k.is_multiple_of(2) { 4 } else { 5 }, 3)
    } else {
        let base = q128.checked_pow(k + 1).ok_or_else(overflow)?;
        let extra = if k.is_multiple_of(2) { q128 + 2 } else { 2 * q128 + 1 };
        (base + extra, 2 * (q128 + 1))
    };
    debug_assert_eq!(num % den, 0);
    u64::try_from(num / den).map_err(|_| overflow())
}

/// The values of `f` with `|v| ≤ bound`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValueWindow<T> {
    pub form: Form<T>,
    pub bound: u64,
    /// Sorted, distinct.
    pub values: Vec<T>,
    /// Set when `values` is exactly `{v : |v| ≤ bound, v ∈ Im(f)}`.
    pub complete: bool,
}

impl<T: Scalar> ValueWindow<T> {
    pub fn contains(&self, v: &T) -> bool {
        self.values.binary_search(v).is_ok()
    }
}

pub fn value_window<T: Scalar>(f: &Form<T>, bound: u64) -> Result<ValueWindow<T>> {
    window_impl(f, bound, DEFAULT_WINDOW_CAP, false)
}

/// As [`value_window`], restricted to primitively represented values.
pub fn primitive_value_window<T: Scalar>(f: &Form<T>, bound: u64) -> Result<ValueWindow<T>> {
    window_impl(f, bound, DEFAULT_WINDOW_CAP, true)
}

pub fn value_window_capped<T: Scalar>(
    f: &Form<T>,
    bound: u64,
    cap: u64,
    primitive: bool,
) -> Result<ValueWindow<T>> {
    window_impl(f, bound, cap, primitive)
}

fn window_impl<T: Scalar>(
    f: &Form<T>,
    bound: u64,
    cap: u64,
    primitive: bool,
) -> Result<ValueWindow<T>> {
    if bound > cap {
        return Err(FormError::BoundExceeded {
            what: "window",
            value: bound.to_string(),
            bound: cap.to_string(),
        });
    }
    let rep = Representer::new(f)?;
    let m = bound as i64;
    let (lo, hi) = if f.discriminant().is_negative() {
        if f.a.is_positive() {
            (0, m)
        } else {
            (-m, 0)
        }
    } else {
        (-m, m)
    };
    let hits: Vec<Option<T>> = (lo..=hi)
        .into_par_iter()
        .map(|v| {
            let n = small::<T>(v);
            let hit = if primitive {
                rep.contains_primitively(&n)?
            } else {
                rep.contains(&n)?
            };
            Ok(hit.then_some(n))
        })
        .collect::<Result<_>>()?;
    Ok(ValueWindow {
        form: f.clone(),
        bound,
        values: hits.into_iter().flatten().collect(),
        complete: true,
    })
}

/// Empirical share of primes `p ≤ x`, `p ∤ 2d`, represented by `f`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DensityEstimate {
    pub represented: u64,
    pub primes: u64,
}

impl DensityEstimate {
    pub fn ratio(&self) -> Ratio<u64> {
        Ratio::new(self.represented, self.primes.max(1))
    }

    pub fn as_f64(&self) -> f64 {
        self.represented as f64 / self.primes.max(1) as f64
    }
}

pub fn prime_density_estimate<T: Scalar>(f: &Form<T>, x: u64) -> Result<DensityEstimate> {
    if x > DEFAULT_PRIME_CAP {
        return Err(FormError::BoundExceeded {
            what: "prime bound",
            value: x.to_string(),
            bound: DEFAULT_PRIME_CAP.to_string(),
        });
    }
    let rep = Representer::new(f)?;
    let two_d = small::<T>(2) * f.discriminant();
    let sieve = prime_sieve(x as usize);
    let candidates: Vec<T> = (2..=x as i64)
        .filter(|&p| sieve[p as usize])
        .map(small::<T>)
        .filter(|p| !two_d.is_multiple_of(p))
        .collect();
    let represented = candidates
        .par_iter()
        .map(|p| rep.contains(p).map(u64::from))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .sum();
    Ok(DensityEstimate {
        represented,
        primes: candidates.len() as u64,
    })
}
