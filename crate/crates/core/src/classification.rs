//! Ordinary versus extraordinary forms, their partners, and value-set equivalence.
//!
//! Everything is decided on the reduced discriminant `d̄ = disc(f)/Δ²`, `Δ` the content:
//!
//! * `d̄ ≡ 5 (mod 8)` and `h⁺(d̄) = h⁺(4d̄)`: lower extraordinary, partner `f† = f(2X, Y)`;
//! * `d̄ ≡ 20 (mod 32)` and `h⁺(d̄) = h⁺(d̄/4)`: upper extraordinary, partner of discriminant `d/4`;
//! * otherwise ordinary, and `Im(f) = Im(g)` forces `f ∼GL g`.

use std::fmt;

use crate::classgroup::{class_data, narrow_class_number};
use crate::error::{FormError, Result};
use crate::forms::Form;
use crate::pell::unit_parity_criterion;
use crate::reduction::{cycle, is_gl2_equivalent};
use crate::scalar::{small, Scalar};
use crate::valuesets::{Representer, Witness};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Ordinary,
    LowerExtraordinary,
    UpperExtraordinary,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Ordinary => "Ordinary",
            Verdict::LowerExtraordinary => "LowerExtraordinary",
            Verdict::UpperExtraordinary => "UpperExtraordinary",
        }
    }

    pub fn is_extraordinary(self) -> bool {
        self != Verdict::Ordinary
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Which clause of the decision procedure fired.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Clause {
    /// `d̄ ≡ 5 mod 8` with `h⁺(d̄) = h⁺(4d̄)`.
    LowerCriterion,
    /// `d̄ ≡ 5 mod 8` with `h⁺(d̄) ≠ h⁺(4d̄)`.
    LowerCriterionFails,
    OneModEight,
    /// `d̄ ≡ 20 mod 32` with `h⁺(d̄) = h⁺(d̄/4)`.
    UpperCriterion,
    UpperCriterionFails,
    /// `d̄ mod 32 ∈ {0, 4, 8, 12, 16, 24, 28}`.
    OtherResidue,
    /// Discriminants not in ratio 1, 4 or 1/4.
    DiscriminantRatio,
    ContentMismatch,
    /// Larger discriminant is 4 times the smaller, but the smaller is even.
    ZeroModFour,
    Gl2Equivalent,
    Gl2Inequivalent,
    /// Ratio 4, criterion holds and the larger form is GL₂-equivalent to `f†`.
    PartnerMatch,
    PartnerMismatch,
}

impl Clause {
    pub fn code(self) -> &'static str {
        match self {
            Clause::LowerCriterion => "lower_criterion",
            Clause::LowerCriterionFails => "lower_criterion_fails",
            Clause::OneModEight => "one_mod_eight",
            Clause::UpperCriterion => "upper_criterion",
            Clause::UpperCriterionFails => "upper_criterion_fails",
            Clause::OtherResidue => "other_residue",
            Clause::DiscriminantRatio => "discriminant_ratio",
            Clause::ContentMismatch => "content_mismatch",
            Clause::ZeroModFour => "zero_mod_four",
            Clause::Gl2Equivalent => "gl2_equivalent",
            Clause::Gl2Inequivalent => "gl2_inequivalent",
            Clause::PartnerMatch => "partner_match",
            Clause::PartnerMismatch => "partner_mismatch",
        }
    }

    pub fn text(self) -> &'static str {
        match self {
            Clause::LowerCriterion => "d ≡ 5 mod 8 and h⁺(d) = h⁺(4d)",
            Clause::LowerCriterionFails => "d ≡ 5 mod 8 and h⁺(d) ≠ h⁺(4d)",
            Clause::OneModEight => "d ≡ 1 mod 8",
            Clause::UpperCriterion => "d ≡ 20 mod 32 and h⁺(d) = h⁺(d/4)",
            Clause::UpperCriterionFails => "d ≡ 20 mod 32 and h⁺(d) ≠ h⁺(d/4)",
            Clause::OtherResidue => "d mod 32 ∈ {0, 4, 8, 12, 16, 24, 28}",
            Clause::DiscriminantRatio => "discriminant ratio ∉ {1, 4, 1/4}",
            Clause::ContentMismatch => "contents differ",
            Clause::ZeroModFour => "d ≡ 0 mod 4",
            Clause::Gl2Equivalent => "same discriminant, GL₂-equivalent",
            Clause::Gl2Inequivalent => "same discriminant, not GL₂-equivalent",
            Clause::PartnerMatch => "d ≡ 5 mod 8, h⁺(d) = h⁺(4d) and F ∼GL f†",
            Clause::PartnerMismatch => "F is not GL₂-equivalent to f†",
        }
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.text())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate<T> {
    pub d: T,
    pub content: T,
    /// `d / content²`.
    pub reduced_d: T,
    /// `(modulus, d̄ mod modulus)` of the congruence that decided the verdict.
    pub congruence: (u32, u32),
    /// `(h⁺(d̄), h⁺(4d̄))` for the lower test, `(h⁺(d̄), h⁺(d̄/4))` for the upper test.
    pub h_plus_pair: Option<(u64, u64)>,
    /// Whether `y` of the relevant fundamental unit is odd (positive discriminants only).
    pub unit_y_odd: Option<bool>,
    pub clause: Clause,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification<T> {
    pub form: Form<T>,
    pub verdict: Verdict,
    pub partner: Option<Form<T>>,
    pub certificate: Certificate<T>,
}

fn residue<T: Scalar>(v: &T, m: u32) -> u32 {
    let r = v.mod_floor(&small::<T>(m as i64));
    crate::scalar::to_i64(&r).expect("residue is small") as u32
}

/// Verdict and certificate for the primitive discriminant `d̄`, without a partner.
fn decide<T: Scalar>(d: &T, content: &T, reduced: &T) -> Result<(Verdict, Certificate<T>)> {
    let mut cert = Certificate {
        d: d.clone(),
        content: content.clone(),
        reduced_d: reduced.clone(),
        congruence: (8, residue(reduced, 8)),
        h_plus_pair: None,
        unit_y_odd: None,
        clause: Clause::OtherResidue,
    };
    let verdict = match cert.congruence.1 {
        1 => {
            cert.clause = Clause::OneModEight;
            Verdict::Ordinary
        }
        5 => {
            let h = narrow_class_number(reduced)?;
            let h4 = narrow_class_number(&(small::<T>(4) * reduced.clone()))?;
            cert.h_plus_pair = Some((h, h4));
            if reduced.is_positive() {
                cert.unit_y_odd = Some(unit_parity_criterion(reduced)?);
            }
            if h == h4 {
                cert.clause = Clause::LowerCriterion;
                Verdict::LowerExtraordinary
            } else {
                cert.clause = Clause::LowerCriterionFails;
                Verdict::Ordinary
            }
        }
        _ => {
            cert.congruence = (32, residue(reduced, 32));
            if cert.congruence.1 == 20 {
                let quarter = reduced.clone() / small::<T>(4);
                let h = narrow_class_number(reduced)?;
                let hq = narrow_class_number(&quarter)?;
                cert.h_plus_pair = Some((h, hq));
                if quarter.is_positive() {
                    cert.unit_y_odd = Some(unit_parity_criterion(&quarter)?);
                }
                if h == hq {
                    cert.clause = Clause::UpperCriterion;
                    Verdict::UpperExtraordinary
                } else {
                    cert.clause = Clause::UpperCriterionFails;
                    Verdict::Ordinary
                }
            } else {
                cert.clause = Clause::OtherResidue;
                Verdict::Ordinary
            }
        }
    };
    Ok((verdict, cert))
}

pub fn classify<T: Scalar>(f: &Form<T>) -> Result<Classification<T>> {
    let d = f.nonsquare_discriminant()?;
    let (_, content) = f.primitive_part()?;
    let reduced = d.clone() / (content.clone() * content.clone());
    let (verdict, certificate) = decide(&d, &content, &reduced)?;
    let partner = match verdict {
        Verdict::Ordinary => None,
        Verdict::LowerExtraordinary => Some(f.dag()),
        Verdict::UpperExtraordinary => Some(upper_to_lower(f)?),
    };
    Ok(Classification {
        form: f.clone(),
        verdict,
        partner,
        certificate,
    })
}

/// The form `f` of discriminant `disc(F)/4` with `f† ∼GL F`, for upper extraordinary `F`.
///
/// When `F = (4a, 2b, c)` already, `(a, b, c)` is returned. Otherwise the SL₂-class
/// representatives of `d̄/4` are scanned, preferring a reduced member with `f† = F`.
pub fn upper_to_lower<T: Scalar>(big: &Form<T>) -> Result<Form<T>> {
    let d = big.nonsquare_discriminant()?;
    let (primitive, content) = big.primitive_part()?;
    let reduced = d.clone() / (content.clone() * content.clone());
    let (verdict, _) = decide(&d, &content, &reduced)?;
    if verdict != Verdict::UpperExtraordinary {
        return Err(FormError::Precondition(format!(
            "{big} is not upper extraordinary"
        )));
    }
    let four = small::<T>(4);
    let two = small::<T>(2);
    if primitive.a.is_multiple_of(&four) && primitive.b.is_multiple_of(&two) {
        let direct = Form::new(
            primitive.a.clone() / four,
            primitive.b.clone() / two,
            primitive.c.clone(),
        );
        if direct.is_primitive() {
            return Ok(direct.scale(&content));
        }
    }
    let quarter = reduced / small::<T>(4);
    let negative = primitive.a.is_negative() && quarter.is_negative();
    let orient = |g: &Form<T>| if negative { g.neg() } else { g.clone() };
    let data = class_data(&quarter)?;
    for rep in &data.reps {
        let g = orient(rep);
        if !is_gl2_equivalent(&g.dag(), &primitive)? {
            continue;
        }
        let mut members = vec![g.clone()];
        if quarter.is_positive() {
            for h in [g.clone(), g.opposite()] {
                members.extend(cycle(&h)?.forms);
            }
        } else {
            members.push(g.opposite());
        }
        let exact = members.into_iter().find(|h| h.dag() == primitive);
        return Ok(exact.unwrap_or(g).scale(&content));
    }
    unreachable!("an upper extraordinary class always has a lower partner")
}

/// Outcome of [`val_equivalent`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValEquivalence {
    pub equal: bool,
    pub clause: Clause,
}

/// Decides `Im(f) = Im(g)` from discriminants, contents, class numbers and GL₂-classes.
pub fn val_equivalent<T: Scalar>(f: &Form<T>, g: &Form<T>) -> Result<ValEquivalence> {
    let df = f.nonsquare_discriminant()?;
    let dg = g.nonsquare_discriminant()?;
    let (fp, cf) = f.primitive_part()?;
    let (gp, cg) = g.primitive_part()?;
    let answer = |equal, clause| Ok(ValEquivalence { equal, clause });
    if df == dg {
        if cf != cg {
            return answer(false, Clause::ContentMismatch);
        }
        return if is_gl2_equivalent(&fp, &gp)? {
            answer(true, Clause::Gl2Equivalent)
        } else {
            answer(false, Clause::Gl2Inequivalent)
        };
    }
    let four = small::<T>(4);
    let ((small_f, small_c, small_d), (big_f, big_c)) = if dg == four.clone() * df.clone() {
        ((&fp, &cf, &df), (&gp, &cg))
    } else if df == four.clone() * dg.clone() {
        ((&gp, &cg, &dg), (&fp, &cf))
    } else {
        return answer(false, Clause::DiscriminantRatio);
    };
    let reduced = small_d.clone() / (small_c.clone() * small_c.clone());
    match residue(&reduced, 8) {
        1 => return answer(false, Clause::OneModEight),
        5 => {}
        _ => return answer(false, Clause::ZeroModFour),
    }
    if small_c != big_c {
        return answer(false, Clause::ContentMismatch);
    }
    let h = narrow_class_number(&reduced)?;
    let h4 = narrow_class_number(&(four * reduced))?;
    if h != h4 {
        return answer(false, Clause::LowerCriterionFails);
    }
    if is_gl2_equivalent(&small_f.dag(), big_f)? {
        answer(true, Clause::PartnerMatch)
    } else {
        answer(false, Clause::PartnerMismatch)
    }
}

/// Membership in `Im(f)` for forms of any content.
pub struct ValueOracle<T: Scalar> {
    inner: Representer<T>,
    content: T,
}

impl<T: Scalar> ValueOracle<T> {
    pub fn new(f: &Form<T>) -> Result<Self> {
        let (primitive, content) = f.primitive_part()?;
        Ok(ValueOracle {
            inner: Representer::new(&primitive)?,
            content,
        })
    }

    pub fn represents(&self, n: &T) -> Result<Option<Witness<T>>> {
        if !n.is_multiple_of(&self.content) {
            return Ok(None);
        }
        self.inner.represents(&(n.clone() / self.content.clone()))
    }

    pub fn contains(&self, n: &T) -> Result<bool> {
        Ok(n.is_multiple_of(&self.content)
            && self.inner.contains(&(n.clone() / self.content.clone()))?)
    }
}

/// A value taken by exactly one of two forms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Separation<T> {
    pub value: T,
    /// `true` when the first form represents `value`, `false` when the second does.
    pub by_first: bool,
    pub witness: Witness<T>,
}

/// The value of smallest absolute value (positive first) represented by exactly
/// one of `f` and `g`, searching `|n| ≤ bound`.
pub fn separating_value<T: Scalar>(
    f: &Form<T>,
    g: &Form<T>,
    bound: u64,
) -> Result<Option<Separation<T>>> {
    let of = ValueOracle::new(f)?;
    let og = ValueOracle::new(g)?;
    let mut k = T::one();
    let limit = small::<T>(i64::try_from(bound).unwrap_or(i64::MAX));
    while k <= limit {
        for n in [k.clone(), -k.clone()] {
            let (in_f, in_g) = (of.contains(&n)?, og.contains(&n)?);
            if in_f != in_g {
                let source = if in_f { &of } else { &og };
                let witness = source
                    .represents(&n)?
                    .expect("membership was just established");
                return Ok(Some(Separation {
                    value: n,
                    by_first: in_f,
                    witness,
                }));
            }
        }
        k = k + T::one();
    }
    debug_assert!(!k.is_zero());
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::{dw, dw_upper};

    fn f(a: i64, b: i64, c: i64) -> Form<i64> {
        Form::new(a, b, c)
    }

    #[test]
    fn delone_watson_pair() {
        let c = classify(&dw::<i64>()).unwrap();
        assert_eq!(c.verdict, Verdict::LowerExtraordinary);
        assert_eq!(c.partner, Some(f(4, 2, 1)));
        assert!(is_gl2_equivalent(&f(4, 2, 1), &dw_upper()).unwrap());
        assert_eq!(c.certificate.h_plus_pair, Some((1, 1)));
        let up = classify(&dw_upper::<i64>()).unwrap();
        assert_eq!(up.verdict, Verdict::UpperExtraordinary);
        assert!(is_gl2_equivalent(&up.partner.unwrap(), &dw()).unwrap());
        let neg = classify(&dw::<i64>().neg()).unwrap();
        assert_eq!(neg.verdict, Verdict::LowerExtraordinary);
        assert_eq!(neg.partner, Some(f(-4, -2, -1)));
        let neg_up = classify(&f(-1, 0, -3)).unwrap();
        assert_eq!(neg_up.verdict, Verdict::UpperExtraordinary);
        assert!(is_gl2_equivalent(&neg_up.partner.unwrap(), &f(-1, -1, -1)).unwrap());
    }

    #[test]
    fn verdict_examples() {
        let c = classify(&f(1, -1, -57)).unwrap();
        assert_eq!(c.verdict, Verdict::LowerExtraordinary);
        assert_eq!(c.certificate.h_plus_pair, Some((3, 3)));
        assert_eq!(c.certificate.unit_y_odd, Some(true));
        let c = classify(&f(1, 1, -4)).unwrap();
        assert_eq!(
            (c.verdict, c.certificate.clause),
            (Verdict::Ordinary, Clause::OneModEight)
        );
        let c = classify(&f(1, 1, -9)).unwrap();
        assert_eq!(c.verdict, Verdict::Ordinary);
        assert_eq!(c.certificate.clause, Clause::LowerCriterionFails);
        assert_eq!(c.certificate.unit_y_odd, Some(false));
        for d in [32i64, 68, 40, 44, 48, 56, 60] {
            let c = classify(&f(1, 0, -d / 4)).unwrap();
            assert_eq!(c.verdict, Verdict::Ordinary, "d = {d}");
        }
        assert!(matches!(
            classify(&f(1, 2, 1)),
            Err(FormError::SquareDiscriminant(_))
        ));
    }

    #[test]
    fn imprimitive_forms_use_reduced_discriminant() {
        let c = classify(&f(2, 2, 2)).unwrap();
        assert_eq!(c.verdict, Verdict::LowerExtraordinary);
        assert_eq!(c.certificate.reduced_d, -3);
        assert_eq!(c.partner, Some(f(8, 4, 2)));
        let c = classify(&f(3, 0, 9)).unwrap();
        assert_eq!(c.verdict, Verdict::UpperExtraordinary);
        assert_eq!(c.partner.unwrap().discriminant(), -27);
    }

    #[test]
    fn upper_to_lower_examples() {
        assert_eq!(upper_to_lower(&f(4, 2, -1)).unwrap(), f(1, 1, -1));
        let big = f(1, -1, -57).dag();
        let small_form = upper_to_lower(&big).unwrap();
        assert!(is_gl2_equivalent(&small_form, &f(1, -1, -57)).unwrap());
        assert_eq!(small_form.dag(), big);
        assert!(upper_to_lower(&f(1, 1, -1)).is_err());
    }

    #[test]
    fn val_equivalence_examples() {
        let r = val_equivalent(&dw::<i64>(), &dw_upper()).unwrap();
        assert_eq!((r.equal, r.clause), (true, Clause::PartnerMatch));
        assert!(val_equivalent(&f(1, 1, -1), &f(4, 2, -1)).unwrap().equal);
        let r = val_equivalent(&f(1, 1, -4), &f(4, 2, -4)).unwrap();
        assert_eq!((r.equal, r.clause), (false, Clause::OneModEight));
        assert_eq!(r.clause.text(), "d ≡ 1 mod 8");
        let r = val_equivalent(&f(1, -1, -57), &f(3, 13, -5)).unwrap();
        assert_eq!((r.equal, r.clause), (false, Clause::Gl2Inequivalent));
        let r = val_equivalent(&f(1, 0, 1), &f(1, 0, 5)).unwrap();
        assert_eq!(r.clause, Clause::DiscriminantRatio);
        let r = val_equivalent(&f(1, 1, 1), &f(-4, -2, -1)).unwrap();
        assert_eq!((r.equal, r.clause), (false, Clause::PartnerMismatch));
        let r = val_equivalent(&f(1, 1, -1), &f(2, 2, -2)).unwrap();
        assert_eq!(r.clause, Clause::ContentMismatch);
    }

    #[test]
    fn separating_values() {
        let s = separating_value(&f(1, 1, -4), &f(4, 2, -4), 100)
            .unwrap()
            .unwrap();
        assert_eq!((s.value, s.by_first), (1, true));
        let s = separating_value(&f(1, -1, -57), &f(3, 13, -5), 100)
            .unwrap()
            .unwrap();
        assert!(s.value.abs() <= 100);
        assert_eq!(
            separating_value(&f(1, 1, -1), &f(4, 2, -1), 200).unwrap(),
            None
        );
    }
}
