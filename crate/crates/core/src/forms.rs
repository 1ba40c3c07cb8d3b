//! Binary quadratic forms, 2×2 integer matrices acting on them, and the
//! even-middle-coefficient invariants (determinant, order, species).

use std::fmt;
use std::str::FromStr;

use crate::error::{FormError, Result};
use crate::scalar::{gcd3, is_square, small, Scalar};

/// The form `a·X² + b·XY + c·Y²`.
///
/// Forms are plain values: construction never normalizes, reduction is an
/// explicit step (see [`crate::reduction`]).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Form<T> {
    pub a: T,
    pub b: T,
    pub c: T,
}

/// A 2×2 integer matrix `[[alpha, beta], [gamma, delta]]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Matrix2<T> {
    pub alpha: T,
    pub beta: T,
    pub gamma: T,
    pub delta: T,
}

/// A matrix of determinant ±1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Unimodular<T>(Matrix2<T>);

impl<T: Scalar> Form<T> {
    pub fn new(a: T, b: T, c: T) -> Self {
        Form { a, b, c }
    }

    pub fn from_i64(a: i64, b: i64, c: i64) -> Self {
        Form::new(small(a), small(b), small(c))
    }

    pub fn discriminant(&self) -> T {
        self.b.clone() * self.b.clone() - small::<T>(4) * self.a.clone() * self.c.clone()
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero() && self.c.is_zero()
    }

    /// `gcd(a, b, c)`; fails on the zero form.
    pub fn content(&self) -> Result<T> {
        if self.is_zero() {
            return Err(FormError::ZeroForm);
        }
        Ok(gcd3(&self.a, &self.b, &self.c))
    }

    pub fn is_primitive(&self) -> bool {
        self.content().map(|g| g.is_one()).unwrap_or(false)
    }

    /// The form divided by its content, together with that content.
    pub fn primitive_part(&self) -> Result<(Form<T>, T)> {
        let g = self.content()?;
        Ok((
            Form::new(
                self.a.clone() / g.clone(),
                self.b.clone() / g.clone(),
                self.c.clone() / g.clone(),
            ),
            g,
        ))
    }

    pub fn eval(&self, x: &T, y: &T) -> T {
        self.a.clone() * x.clone() * x.clone()
            + self.b.clone() * x.clone() * y.clone()
            + self.c.clone() * y.clone() * y.clone()
    }

    /// `(f∘m)(X, Y) = f(αX + βY, γX + δY)`.
    pub fn act(&self, m: &Matrix2<T>) -> Form<T> {
        let (al, be, ga, de) = (&m.alpha, &m.beta, &m.gamma, &m.delta);
        let two = small::<T>(2);
        Form::new(
            self.eval(al, ga),
            two.clone() * self.a.clone() * al.clone() * be.clone()
                + self.b.clone() * (al.clone() * de.clone() + be.clone() * ga.clone())
                + two * self.c.clone() * ga.clone() * de.clone(),
            self.eval(be, de),
        )
    }

    /// `f(2X, Y)`.
    pub fn dag(&self) -> Form<T> {
        Form::new(
            small::<T>(4) * self.a.clone(),
            small::<T>(2) * self.b.clone(),
            self.c.clone(),
        )
    }

    /// `f(X, 2Y)`.
    pub fn ddag(&self) -> Form<T> {
        Form::new(
            self.a.clone(),
            small::<T>(2) * self.b.clone(),
            small::<T>(4) * self.c.clone(),
        )
    }

    /// `(a, -b, c)`: the image under `diag(1, -1)`, i.e. the inverse SL₂-class.
    pub fn opposite(&self) -> Form<T> {
        Form::new(self.a.clone(), -self.b.clone(), self.c.clone())
    }

    pub fn scale(&self, k: &T) -> Form<T> {
        Form::new(
            self.a.clone() * k.clone(),
            self.b.clone() * k.clone(),
            self.c.clone() * k.clone(),
        )
    }

    pub fn neg(&self) -> Form<T> {
        self.scale(&-T::one())
    }

    /// Fails with [`FormError::SquareDiscriminant`] when the discriminant is a square (0 included).
    pub fn nonsquare_discriminant(&self) -> Result<T> {
        let d = self.discriminant();
        if is_square(&d) {
            return Err(FormError::SquareDiscriminant(d.to_string()));
        }
        Ok(d)
    }

    pub fn map<U, F: Fn(&T) -> U>(&self, f: F) -> Form<U> {
        Form {
            a: f(&self.a),
            b: f(&self.b),
            c: f(&self.c),
        }
    }

    pub fn try_convert<U: Scalar>(&self) -> Result<Form<U>> {
        Ok(Form {
            a: U::try_from_bigint(&self.a.to_bigint())?,
            b: U::try_from_bigint(&self.b.to_bigint())?,
            c: U::try_from_bigint(&self.c.to_bigint())?,
        })
    }
}

/// `X² + XY + Y²`.
pub fn dw<T: Scalar>() -> Form<T> {
    Form::from_i64(1, 1, 1)
}

/// `X² + 3Y²`.
pub fn dw_upper<T: Scalar>() -> Form<T> {
    Form::from_i64(1, 0, 3)
}

impl<T: fmt::Display> fmt::Display for Form<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.a, self.b, self.c)
    }
}

/// Parses the canonical `a,b,c` encoding (base 10, optional sign, optional spaces).
impl<T: Scalar + FromStr> FromStr for Form<T> {
    type Err = FormError;

    fn from_str(s: &str) -> Result<Self> {
        let parse_err = |reason: &str| FormError::Parse {
            input: s.to_string(),
            reason: reason.to_string(),
        };
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(parse_err("expected three comma-separated integers"));
        }
        let mut coeffs = Vec::with_capacity(3);
        for p in parts {
            let p = p.strip_prefix('+').unwrap_or(p);
            coeffs.push(p.parse::<T>().map_err(|_| parse_err("bad integer"))?);
        }
        let c = coeffs.pop().unwrap();
        let b = coeffs.pop().unwrap();
        let a = coeffs.pop().unwrap();
        Ok(Form::new(a, b, c))
    }
}

impl<T: Scalar> Matrix2<T> {
    pub fn new(alpha: T, beta: T, gamma: T, delta: T) -> Self {
        Matrix2 {
            alpha,
            beta,
            gamma,
            delta,
        }
    }

    pub fn from_i64(alpha: i64, beta: i64, gamma: i64, delta: i64) -> Self {
        Matrix2::new(small(alpha), small(beta), small(gamma), small(delta))
    }

    pub fn identity() -> Self {
        Matrix2::new(T::one(), T::zero(), T::zero(), T::one())
    }

    pub fn det(&self) -> T {
        self.alpha.clone() * self.delta.clone() - self.beta.clone() * self.gamma.clone()
    }

    pub fn mul(&self, rhs: &Matrix2<T>) -> Matrix2<T> {
        Matrix2::new(
            self.alpha.clone() * rhs.alpha.clone() + self.beta.clone() * rhs.gamma.clone(),
            self.alpha.clone() * rhs.beta.clone() + self.beta.clone() * rhs.delta.clone(),
            self.gamma.clone() * rhs.alpha.clone() + self.delta.clone() * rhs.gamma.clone(),
            self.gamma.clone() * rhs.beta.clone() + self.delta.clone() * rhs.delta.clone(),
        )
    }

    /// Applies the matrix to the column vector `(x, y)`.
    pub fn apply(&self, x: &T, y: &T) -> (T, T) {
        (
            self.alpha.clone() * x.clone() + self.beta.clone() * y.clone(),
            self.gamma.clone() * x.clone() + self.delta.clone() * y.clone(),
        )
    }

    pub fn is_unimodular(&self) -> bool {
        self.det().abs().is_one()
    }

    pub fn try_convert<U: Scalar>(&self) -> Result<Matrix2<U>> {
        Ok(Matrix2::new(
            U::try_from_bigint(&self.alpha.to_bigint())?,
            U::try_from_bigint(&self.beta.to_bigint())?,
            U::try_from_bigint(&self.gamma.to_bigint())?,
            U::try_from_bigint(&self.delta.to_bigint())?,
        ))
    }
}

impl<T: Scalar> Unimodular<T> {
    pub fn new(m: Matrix2<T>) -> Result<Self> {
        if !m.is_unimodular() {
            return Err(FormError::Precondition(format!(
                "matrix determinant {} is not ±1",
                m.det()
            )));
        }
        Ok(Unimodular(m))
    }

    pub fn identity() -> Self {
        Unimodular(Matrix2::identity())
    }

    pub fn matrix(&self) -> &Matrix2<T> {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix2<T> {
        self.0
    }

    pub fn det(&self) -> T {
        self.0.det()
    }

    pub fn mul(&self, rhs: &Unimodular<T>) -> Unimodular<T> {
        Unimodular(self.0.mul(&rhs.0))
    }

    pub fn try_convert<U: Scalar>(&self) -> Result<Unimodular<U>> {
        Ok(Unimodular(self.0.try_convert()?))
    }

    pub fn inverse(&self) -> Unimodular<T> {
        let m = &self.0;
        let det = m.det();
        Unimodular(Matrix2::new(
            m.delta.clone() * det.clone(),
            -m.beta.clone() * det.clone(),
            -m.gamma.clone() * det.clone(),
            m.alpha.clone() * det,
        ))
    }
}

impl<T> std::ops::Deref for Unimodular<T> {
    type Target = Matrix2<T>;

    fn deref(&self) -> &Matrix2<T> {
        &self.0
    }
}

/// A form `a·X² + 2b·XY + c·Y²` in the even-middle-coefficient convention.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ScheringForm<T> {
    pub a: T,
    pub b: T,
    pub c: T,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScheringInvariants<T> {
    /// `b² - ac`
    pub determinant: T,
    /// `gcd(a, b, c)`
    pub order: T,
    /// `gcd(a, 2b, c) / gcd(a, b, c)`, always 1 or 2.
    pub species: T,
}

impl<T: Scalar> ScheringForm<T> {
    pub fn new(a: T, b: T, c: T) -> Self {
        ScheringForm { a, b, c }
    }

    pub fn invariants(&self) -> Result<ScheringInvariants<T>> {
        if self.a.is_zero() && self.b.is_zero() && self.c.is_zero() {
            return Err(FormError::ZeroForm);
        }
        let order = gcd3(&self.a, &self.b, &self.c);
        let proper = gcd3(&self.a, &(small::<T>(2) * self.b.clone()), &self.c);
        Ok(ScheringInvariants {
            determinant: self.b.clone() * self.b.clone() - self.a.clone() * self.c.clone(),
            species: proper / order.clone(),
            order,
        })
    }

    /// The same polynomial in the `aX² + bXY + cY²` convention.
    pub fn to_form(&self) -> Form<T> {
        Form::new(
            self.a.clone(),
            small::<T>(2) * self.b.clone(),
            self.c.clone(),
        )
    }
}
