//! Reduction theory: canonical reduced forms for definite discriminants,
//! cycles of reduced forms for indefinite ones, SL₂/GL₂ equivalence, and the
//! automorph of an indefinite form.
//!
//! Every reduction step is tracked as a matrix so that callers needing an
//! explicit change of variables (representation witnesses) can recover it.
//! For a form `f` and the returned pair `(g, m)` we always have `f.act(m) == g`.

use std::collections::HashMap;

use num_bigint::BigInt;

use crate::error::{FormError, Result};
use crate::forms::{Form, Matrix2, Unimodular};
use crate::pell::pell4;
use crate::scalar::{small, Scalar};

/// The closed cycle of reduced indefinite forms in one SL₂-class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedCycle<T> {
    pub discriminant: T,
    pub forms: Vec<Form<T>>,
}

impl<T: Scalar> ReducedCycle<T> {
    pub fn len(&self) -> usize {
        self.forms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forms.is_empty()
    }

    pub fn contains(&self, f: &Form<T>) -> bool {
        self.forms.contains(f)
    }

    /// The smallest member in `(a, b, c)` order; a canonical label for the class.
    pub fn canonical(&self) -> &Form<T> {
        self.forms.iter().min().expect("cycles are never empty")
    }
}

fn translation<T: Scalar>(k: T) -> Matrix2<T> {
    Matrix2::new(T::one(), k, T::zero(), T::one())
}

fn swap<T: Scalar>() -> Matrix2<T> {
    Matrix2::new(T::zero(), -T::one(), T::one(), T::zero())
}

/// Reduces a positive definite form: `|b| ≤ a ≤ c`, `b ≥ 0` when `|b| = a` or `a = c`.
/// The change of variables is accumulated in `track` when given.
fn reduce_positive_definite<T: Scalar>(
    f: &Form<T>,
    mut track: Option<&mut Matrix2<BigInt>>,
) -> Form<T> {
    let mut g = f.clone();
    loop {
        let two_a = small::<T>(2) * g.a.clone();
        let k = (g.a.clone() - g.b.clone()).div_floor(&two_a);
        if !k.is_zero() {
            if let Some(m) = track.as_deref_mut() {
                *m = m.mul(&translation(k.to_bigint()));
            }
            g = g.act(&translation(k));
        }
        if g.a > g.c || (g.a == g.c && g.b.is_negative()) {
            if let Some(m) = track.as_deref_mut() {
                *m = m.mul(&swap());
            }
            g = g.act(&swap());
            continue;
        }
        return g;
    }
}

/// Exact test of `0 < b < √d` and `√d - b < 2|a| < √d + b`.
pub fn is_reduced_indefinite<T: Scalar>(f: &Form<T>, d: &T) -> bool {
    let b = &f.b;
    if !b.is_positive() || b.clone() * b.clone() >= *d {
        return false;
    }
    let two_a = small::<T>(2) * f.a.abs();
    let sum = two_a.clone() + b.clone();
    let diff = two_a - b.clone();
    *d < sum.clone() * sum && (!diff.is_positive() || diff.clone() * diff < *d)
}

/// True for reduced definite forms (either sign) and reduced indefinite forms.
pub fn is_reduced<T: Scalar>(f: &Form<T>) -> Result<bool> {
    let d = f.nonsquare_discriminant()?;
    if d.is_negative() {
        let g = if f.a.is_negative() {
            f.neg()
        } else {
            f.clone()
        };
        let b_abs = g.b.abs();
        Ok(b_abs <= g.a && g.a <= g.c && (!(b_abs == g.a || g.a == g.c) || !g.b.is_negative()))
    } else {
        Ok(is_reduced_indefinite(f, &d))
    }
}

/// One normalized `ρ` step `(a, b, c) ↦ (c, b', (b'² - d)/4c)` with `b' ≡ -b (mod 2c)`.
///
/// `b'` is taken in `(-|c|, |c|]` when `|c| > √d` and in `(√d - 2|c|, √d)` otherwise.
pub fn rho<T: Scalar>(f: &Form<T>, d: &T, root: &T) -> (Form<T>, Matrix2<T>) {
    let c_abs = f.c.abs();
    let modulus = small::<T>(2) * c_abs.clone();
    let low = if c_abs > *root {
        T::one() - c_abs
    } else {
        root.clone() - modulus.clone() + T::one()
    };
    let new_b = low.clone() + (-f.b.clone() - low).mod_floor(&modulus);
    let two_c = small::<T>(2) * f.c.clone();
    let s = (new_b.clone() + f.b.clone()) / two_c;
    let new_c = (new_b.clone() * new_b.clone() - d.clone()) / (small::<T>(4) * f.c.clone());
    let m = Matrix2::new(T::zero(), -T::one(), T::one(), s);
    (Form::new(f.c.clone(), new_b, new_c), m)
}

fn reduce_indefinite<T: Scalar>(
    f: &Form<T>,
    d: &T,
    mut track: Option<&mut Matrix2<BigInt>>,
) -> Form<T> {
    let root = d.sqrt();
    let mut g = f.clone();
    while !is_reduced_indefinite(&g, d) {
        let (next, step) = rho(&g, d, &root);
        if let Some(m) = track.as_deref_mut() {
            *m = m.mul(&step.try_convert().expect("BigInt holds every scalar"));
        }
        g = next;
    }
    g
}

fn reduce_tracked<T: Scalar>(f: &Form<T>, track: Option<&mut Matrix2<BigInt>>) -> Result<Form<T>> {
    let d = f.nonsquare_discriminant()?;
    Ok(if d.is_negative() {
        if f.a.is_negative() {
            reduce_positive_definite(&f.neg(), track).neg()
        } else {
            reduce_positive_definite(f, track)
        }
    } else {
        reduce_indefinite(f, &d, track)
    })
}

fn reduce_big_matrix<T: Scalar>(f: &Form<T>) -> Result<(Form<T>, Unimodular<BigInt>)> {
    let mut m = Matrix2::identity();
    let g = reduce_tracked(f, Some(&mut m))?;
    Ok((
        g,
        Unimodular::new(m).expect("reduction steps have determinant one"),
    ))
}

/// Reduces `f` and returns the determinant-one matrix `m` with `f.act(m) == reduced`.
pub fn reduce_with_matrix<T: Scalar>(f: &Form<T>) -> Result<(Form<T>, Unimodular<T>)> {
    let (g, m) = reduce_big_matrix(f)?;
    Ok((g, m.try_convert()?))
}

/// The canonical reduced form (definite) or the first reduced form reached by
/// `ρ`-steps (indefinite), SL₂-equivalent to `f`.
pub fn reduce<T: Scalar>(f: &Form<T>) -> Result<Form<T>> {
    reduce_tracked(f, None)
}

fn big_cycle<T: Scalar>(f: &Form<T>) -> Result<Vec<(Form<T>, Unimodular<BigInt>)>> {
    let d = positive_discriminant(f)?;
    let root = d.sqrt();
    let (start, m0) = reduce_big_matrix(f)?;
    let mut out = vec![(start.clone(), m0.clone())];
    let mut g = start.clone();
    let mut m = m0.into_matrix();
    loop {
        let (next, step) = rho(&g, &d, &root);
        if next == start {
            return Ok(out);
        }
        m = m.mul(&step.try_convert()?);
        out.push((next.clone(), Unimodular::new(m.clone()).expect("det one")));
        g = next;
    }
}

fn positive_discriminant<T: Scalar>(f: &Form<T>) -> Result<T> {
    let d = f.nonsquare_discriminant()?;
    if !d.is_positive() {
        return Err(FormError::Precondition(format!(
            "cycles need a positive discriminant, got {d}"
        )));
    }
    Ok(d)
}

/// The cycle of `reduce(f)`, each member paired with `m` such that `f.act(m)` is that member.
pub fn cycle_with_matrices<T: Scalar>(f: &Form<T>) -> Result<Vec<(Form<T>, Unimodular<T>)>> {
    big_cycle(f)?
        .into_iter()
        .map(|(g, m)| Ok((g, m.try_convert()?)))
        .collect()
}

pub fn cycle<T: Scalar>(f: &Form<T>) -> Result<ReducedCycle<T>> {
    let d = positive_discriminant(f)?;
    let root = d.sqrt();
    let start = reduce(f)?;
    let mut forms = vec![start.clone()];
    loop {
        let (next, _) = rho(forms.last().unwrap(), &d, &root);
        if next == start {
            break;
        }
        forms.push(next);
    }
    Ok(ReducedCycle {
        discriminant: d,
        forms,
    })
}

/// Decides whether `g = f∘m` for some `m` of determinant `+1`.
pub fn is_sl2_equivalent<T: Scalar>(f: &Form<T>, g: &Form<T>) -> Result<bool> {
    let d = f.nonsquare_discriminant()?;
    let e = g.nonsquare_discriminant()?;
    if d != e {
        return Ok(false);
    }
    let (fp, cf) = f.primitive_part()?;
    let (gp, cg) = g.primitive_part()?;
    if cf != cg {
        return Ok(false);
    }
    if d.is_negative() {
        return Ok(reduce(&fp)? == reduce(&gp)?);
    }
    let target = reduce(&gp)?;
    Ok(cycle(&fp)?.contains(&target))
}

/// SL₂-equivalence to `g` or to its opposite `(a, -b, c)`.
pub fn is_gl2_equivalent<T: Scalar>(f: &Form<T>, g: &Form<T>) -> Result<bool> {
    Ok(is_sl2_equivalent(f, g)? || is_sl2_equivalent(f, &g.opposite())?)
}

/// `((t - bu)/2, -cu; au, (t + bu)/2)` from the fundamental solution of `t² - du² = 4`.
pub fn automorph<T: Scalar>(f: &Form<T>) -> Result<Unimodular<T>> {
    let d = f.nonsquare_discriminant()?;
    if !d.is_positive() {
        return Err(FormError::Precondition(format!(
            "automorph needs a positive discriminant, got {d}"
        )));
    }
    if !f.is_primitive() {
        return Err(FormError::Imprimitive(f.to_string()));
    }
    let (t, u) = pell4(&d)?;
    let (a, b, c) = (f.a.to_bigint(), f.b.to_bigint(), f.c.to_bigint());
    let m = Matrix2::new((&t - &b * &u) / 2, -(&c * &u), &a * &u, (&t + &b * &u) / 2);
    Ok(Unimodular::new(m.try_convert()?).expect("automorphs have determinant one"))
}

/// Lookup from reduced forms of one class to the matrices reaching them from a fixed form.
pub(crate) struct CycleIndex<T: Scalar> {
    members: HashMap<Form<T>, Unimodular<BigInt>>,
}

impl<T: Scalar> CycleIndex<T> {
    pub(crate) fn new(f: &Form<T>) -> Result<Self> {
        Ok(CycleIndex {
            members: big_cycle(f)?.into_iter().collect(),
        })
    }

    /// Whether `g` lies in the SL₂-class of the indexed form.
    pub(crate) fn contains(&self, g: &Form<T>) -> Result<bool> {
        Ok(self.members.contains_key(&reduce(g)?))
    }

    /// For `g` in the same SL₂-class as the indexed form `f`, returns `n` with `f.act(n) == g`.
    pub(crate) fn transport_big(&self, g: &Form<T>) -> Result<Option<Unimodular<BigInt>>> {
        let (gr, mg) = reduce_big_matrix(g)?;
        Ok(self.members.get(&gr).map(|mf| mf.mul(&mg.inverse())))
    }
}

impl<T: Scalar> Matrix2<T> {
    /// Whether `f.act(self) == f`.
    pub fn fixes(&self, f: &Form<T>) -> bool {
        f.act(self) == *f
    }
}

impl<T: Scalar> Unimodular<T> {
    /// `m^k` for `k ≥ 0`.
    pub fn pow(&self, k: u32) -> Unimodular<T> {
        (0..k).fold(Unimodular::identity(), |acc, _| acc.mul(self))
    }

    pub fn is_identity(&self) -> bool {
        self.alpha.is_one() && self.delta.is_one() && self.beta.is_zero() && self.gamma.is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_integer::Roots;
    use num_traits::One;

    fn f(a: i64, b: i64, c: i64) -> Form<i64> {
        Form::new(a, b, c)
    }

    #[test]
    fn definite_reduction() {
        assert_eq!(reduce(&f(1, 1, 1)).unwrap(), f(1, 1, 1));
        assert_eq!(reduce(&f(4, 2, 1)).unwrap(), f(1, 0, 3));
        assert_eq!(reduce(&f(-4, -2, -1)).unwrap(), f(-1, 0, -3));
        assert_eq!(reduce(&f(3, -3, 5)).unwrap(), f(3, 3, 5));
        assert_eq!(reduce(&f(2, -1, 2)).unwrap(), f(2, 1, 2));
        assert!(matches!(
            reduce(&f(1, 2, 1)),
            Err(FormError::SquareDiscriminant(_))
        ));
        assert!(matches!(
            reduce(&f(0, 0, 0)),
            Err(FormError::SquareDiscriminant(_))
        ));
    }

    #[test]
    fn reduction_matrix_is_consistent() {
        for g in [
            f(4, 2, 1),
            f(17, 13, 3),
            f(-9, 7, 5),
            f(9, 7, -5),
            f(1, -1, -57),
            f(100, 301, 227),
        ] {
            let (r, m) = reduce_with_matrix(&g).unwrap();
            assert_eq!(g.act(&m), r);
            assert!(m.det().is_one());
            assert!(is_reduced(&r).unwrap());
        }
    }

    #[test]
    fn cycle_of_discriminant_five() {
        let cyc = cycle(&f(1, 1, -1)).unwrap();
        assert_eq!(cyc.len(), 2);
        assert!(cyc.contains(&f(1, 1, -1)));
        assert!(cyc.contains(&f(-1, 1, 1)));
        assert_eq!(cycle(&f(-1, 1, 1)).unwrap().canonical(), cyc.canonical());
        assert!(cycle(&f(1, 1, 1)).is_err());
    }

    #[test]
    fn cycles_are_closed_and_even() {
        for g in [
            f(1, -1, -57),
            f(3, 13, -5),
            f(9, 7, -5),
            f(1, 0, -94),
            f(2, 1, -5),
        ] {
            let cyc = cycle(&g).unwrap();
            let d = g.discriminant();
            let root = d.sqrt();
            assert_eq!(cyc.len() % 2, 0);
            let last = cyc.forms.last().unwrap();
            assert_eq!(rho(last, &d, &root).0, cyc.forms[0]);
            assert!(cyc.forms.iter().all(|h| h.discriminant() == d));
        }
    }

    #[test]
    fn equivalences_for_229() {
        let l1 = f(1, -1, -57);
        let l2 = f(3, 13, -5);
        let l3 = f(9, 7, -5);
        assert!(!is_sl2_equivalent(&l2, &l3).unwrap());
        assert!(!is_sl2_equivalent(&l1, &l2).unwrap());
        assert!(!is_sl2_equivalent(&l1, &l3).unwrap());
        assert!(is_gl2_equivalent(&l2, &l3).unwrap());
        assert!(!is_gl2_equivalent(&l1, &l2).unwrap());
        assert!(is_sl2_equivalent(&f(1, 1, -1), &f(-1, 1, 1)).unwrap());
        assert!(!is_gl2_equivalent(&f(1, 1, 1), &f(1, 0, 3)).unwrap());
        // (9,7,-5) reduces into the cycle of (3,13,-5) under GL₂ only
        assert!(cycle(&l2)
            .unwrap()
            .contains(&reduce(&l3.opposite()).unwrap()));
    }

    #[test]
    fn orbit_membership() {
        let m = Matrix2::new(2i64, 3, 3, 5);
        assert_eq!(m.det(), 1);
        for g in [f(1, 1, -1), f(3, 13, -5), f(2, 1, 3), f(-3, 1, -2)] {
            assert!(is_sl2_equivalent(&g, &g.act(&m)).unwrap());
        }
    }

    #[test]
    fn imprimitive_forms_compare_by_content() {
        assert!(is_sl2_equivalent(&f(2, 2, -2), &f(-2, 2, 2)).unwrap());
        assert!(
            !is_sl2_equivalent(&f(2, 2, -2), &f(1, 4, -1)).unwrap()
                || f(1, 4, -1).discriminant() != 20
        );
        assert!(!is_sl2_equivalent(&f(2, 0, 6), &f(1, 0, 12)).unwrap());
    }

    #[test]
    fn automorph_examples() {
        let g = f(1, 1, -1);
        let m = automorph(&g).unwrap();
        assert_eq!(*m.matrix(), Matrix2::new(1, 1, 1, 2));
        for k in 1..=5 {
            assert!(m.pow(k).fixes(&g));
        }
        let g = Form::<BigInt>::from_i64(1, 1, -57);
        let m = automorph(&g).unwrap();
        assert!(m.fixes(&g));
        let mod2 = |m: &Unimodular<BigInt>| {
            m.matrix()
                .try_convert::<i64>()
                .map(|x| Matrix2::new(x.alpha & 1, x.beta & 1, x.gamma & 1, x.delta & 1))
                .unwrap()
        };
        assert_ne!(mod2(&m), Matrix2::identity());
        assert_ne!(mod2(&m.pow(2)), Matrix2::identity());
        assert_eq!(mod2(&m.pow(3)), Matrix2::identity());
        assert!(automorph(&f(1, 1, 1)).is_err());
        assert!(matches!(
            automorph(&f(2, 2, -2)),
            Err(FormError::Imprimitive(_))
        ));
    }
}
