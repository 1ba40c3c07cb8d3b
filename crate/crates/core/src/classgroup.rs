//! SL₂-classes of primitive forms of a given discriminant and the three class
//! numbers `h⁺`, `h` and `h*`.
//!
//! Classes are enumerated through reduced forms in `i64` arithmetic (reduced
//! coefficients never exceed `|d|`), and results are memoized per discriminant
//! in a process-wide cache.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_integer::Roots;

use crate::arith::divisors;
use crate::error::{FormError, Result};
use crate::forms::Form;
use crate::pell::{fundamental_unit, UnitNorm};
use crate::reduction::{cycle, is_reduced_indefinite, reduce};
use crate::scalar::{is_square, Scalar};

/// Largest `|d|` accepted by [`class_data`].
pub const DEFAULT_CLASS_BOUND: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassData<T> {
    pub d: T,
    /// One reduced representative per SL₂-class (positive definite when `d < 0`).
    pub reps: Vec<Form<T>>,
    pub h_plus: u64,
    pub h_ord: u64,
    pub h_star: u64,
    /// Norm of the fundamental unit; `None` for `d < 0`.
    pub unit_norm: Option<UnitNorm>,
}

#[derive(Debug)]
struct ClassTable {
    reps: Vec<Form<i64>>,
    h_star: u64,
    unit_norm: Option<UnitNorm>,
}

fn cache() -> &'static RwLock<HashMap<i64, Arc<ClassTable>>> {
    static CACHE: OnceLock<RwLock<HashMap<i64, Arc<ClassTable>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Checks that `d` is a non-square discriminant within `bound` and returns it as `i64`.
pub fn validate_discriminant<T: Scalar>(d: &T, bound: u64) -> Result<i64> {
    if is_square(d) {
        return Err(FormError::SquareDiscriminant(d.to_string()));
    }
    let too_big = || FormError::BoundExceeded {
        what: "|d|",
        value: d.to_string(),
        bound: bound.to_string(),
    };
    let small = d.to_i64().ok_or_else(too_big)?;
    if small.unsigned_abs() > bound {
        return Err(too_big());
    }
    if !matches!(small.rem_euclid(4), 0 | 1) {
        return Err(FormError::BadResidue(d.to_string()));
    }
    Ok(small)
}

/// All reduced primitive forms of discriminant `d`: positive definite ones for
/// `d < 0`, every member of every cycle for `d > 0`. Sorted.
pub fn reduced_forms(d: i64) -> Vec<Form<i64>> {
    let mut out = Vec::new();
    let parity = d.rem_euclid(2);
    if d < 0 {
        let b_max = ((-d) / 3).sqrt();
        let mut b = -b_max;
        while b <= b_max {
            if b.rem_euclid(2) == parity {
                let n = (b * b - d) / 4;
                let mut a = b.abs().max(1);
                while a * a <= n {
                    if n % a == 0 {
                        let c = n / a;
                        let tie = b.abs() == a || a == c;
                        let form = Form::new(a, b, c);
                        if (!tie || b >= 0) && form.is_primitive() {
                            out.push(form);
                        }
                    }
                    a += 1;
                }
            }
            b += 1;
        }
    } else {
        let root = d.sqrt();
        for b in 1i64..=root {
            if b.rem_euclid(2) != parity {
                continue;
            }
            let n = ((d - b * b) / 4) as u64;
            for a_abs in divisors(n) {
                let a_abs = a_abs as i64;
                let c_abs = n as i64 / a_abs;
                for (a, c) in [(a_abs, -c_abs), (-a_abs, c_abs)] {
                    let form = Form::new(a, b, c);
                    if is_reduced_indefinite(&form, &d) && form.is_primitive() {
                        out.push(form);
                    }
                }
            }
        }
    }
    out.sort();
    out
}

fn compute_table(d: i64) -> Result<ClassTable> {
    let reduced = reduced_forms(d);
    // class label for every reduced form
    let mut label: HashMap<Form<i64>, usize> = HashMap::new();
    let mut reps = Vec::new();
    for f in &reduced {
        if label.contains_key(f) {
            continue;
        }
        let idx = reps.len();
        if d < 0 {
            label.insert(f.clone(), idx);
            reps.push(f.clone());
        } else {
            let cyc = cycle(f)?;
            for g in &cyc.forms {
                label.insert(g.clone(), idx);
            }
            reps.push(cyc.canonical().clone());
        }
    }
    let mut fixed = 0u64;
    for (idx, rep) in reps.iter().enumerate() {
        let partner = reduce(&rep.opposite())?;
        let other = *label.get(&partner).expect(
            "the opposite of a primitive form is a primitive form of the same discriminant",
        );
        if other == idx {
            fixed += 1;
        }
    }
    let h_plus = reps.len() as u64;
    let unit_norm = if d > 0 {
        Some(fundamental_unit(&d)?.norm)
    } else {
        None
    };
    Ok(ClassTable {
        reps,
        h_star: (h_plus + fixed) / 2,
        unit_norm,
    })
}

fn table(d: i64) -> Result<Arc<ClassTable>> {
    if let Some(hit) = cache().read().expect("class cache poisoned").get(&d) {
        return Ok(hit.clone());
    }
    let fresh = Arc::new(compute_table(d)?);
    let mut guard = cache().write().expect("class cache poisoned");
    Ok(guard.entry(d).or_insert(fresh).clone())
}

pub fn class_data<T: Scalar>(d: &T) -> Result<ClassData<T>> {
    class_data_bounded(d, DEFAULT_CLASS_BOUND)
}

pub fn class_data_bounded<T: Scalar>(d: &T, bound: u64) -> Result<ClassData<T>> {
    let small = validate_discriminant(d, bound)?;
    let t = table(small)?;
    let h_plus = t.reps.len() as u64;
    let h_ord = match t.unit_norm {
        Some(UnitNorm::Plus) => h_plus / 2,
        _ => h_plus,
    };
    Ok(ClassData {
        d: d.clone(),
        reps: t
            .reps
            .iter()
            .map(|f| f.try_convert())
            .collect::<Result<Vec<_>>>()?,
        h_plus,
        h_ord,
        h_star: t.h_star,
        unit_norm: t.unit_norm,
    })
}

/// `h⁺(d)` through the cache, without converting representatives.
pub fn narrow_class_number<T: Scalar>(d: &T) -> Result<u64> {
    narrow_class_number_bounded(d, DEFAULT_CLASS_BOUND)
}

pub fn narrow_class_number_bounded<T: Scalar>(d: &T, bound: u64) -> Result<u64> {
    let small = validate_discriminant(d, bound)?;
    Ok(table(small)?.reps.len() as u64)
}

/// `(a, -b, c)`, which represents the inverse SL₂-class.
pub fn opposite<T: Scalar>(f: &Form<T>) -> Form<T> {
    f.opposite()
}

/// Index of the SL₂-class of a primitive form `f` within `class_data(disc f).reps`.
/// Negative definite forms are matched through their negation.
pub fn class_index<T: Scalar>(f: &Form<T>) -> Result<usize> {
    let data = class_data(&f.discriminant())?;
    let g = if f.discriminant().is_negative() && f.a.is_negative() {
        f.neg()
    } else {
        f.clone()
    };
    if !g.is_primitive() {
        return Err(FormError::Imprimitive(f.to_string()));
    }
    for (i, rep) in data.reps.iter().enumerate() {
        if crate::reduction::is_sl2_equivalent(rep, &g)? {
            return Ok(i);
        }
    }
    unreachable!("every primitive form lies in one of the enumerated classes")
}
