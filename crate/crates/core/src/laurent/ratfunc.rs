use std::fmt;
use std::sync::Arc;

use serde_json::{json, Value};

use super::laurent_poly::LaurentPolynomial;
use super::poly::Poly;
use crate::error::{Error, Result};
use crate::exactfield::{ComplexBall, FieldElement, NumberField};

/// A reduced quotient of Laurent polynomials.
///
/// Canonical form: the denominator is a monic polynomial with nonzero
/// constant term, and any power of `t` lives in the numerator.
#[derive(Clone, PartialEq, Eq)]
pub struct RationalFunction {
    num: LaurentPolynomial,
    den: LaurentPolynomial,
}

impl RationalFunction {
    pub fn new(num: LaurentPolynomial, den: LaurentPolynomial) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroInverse);
        }
        let field = if num.field().is_rational() {
            den.field().clone()
        } else {
            num.field().clone()
        };
        if num.is_zero() {
            return Ok(Self::zero(&field));
        }
        let (ln, n) = num.to_poly();
        let (ld, d) = den.to_poly();
        let g = n.gcd(&d);
        let (n, d) = if g.degree() == Some(0) {
            (n, d)
        } else {
            (n.div_exact(&g).unwrap(), d.div_exact(&g).unwrap())
        };
        let c = d.lead().unwrap().inverse().unwrap();
        Ok(RationalFunction {
            num: LaurentPolynomial::from_poly(&n.scale(&c), ln - ld),
            den: LaurentPolynomial::from_poly(&d.scale(&c), 0),
        })
    }

    pub fn zero(field: &Arc<NumberField>) -> Self {
        RationalFunction {
            num: LaurentPolynomial::zero(field),
            den: LaurentPolynomial::one(field),
        }
    }

    pub fn one(field: &Arc<NumberField>) -> Self {
        Self::from_laurent(LaurentPolynomial::one(field))
    }

    pub fn constant(c: FieldElement) -> Self {
        Self::from_laurent(LaurentPolynomial::constant(c))
    }

    pub fn from_laurent(p: LaurentPolynomial) -> Self {
        let f = p.field().clone();
        RationalFunction {
            num: p,
            den: LaurentPolynomial::one(&f),
        }
    }

    /// `1 / p`.
    pub fn recip_of(p: &LaurentPolynomial) -> Result<Self> {
        Self::new(LaurentPolynomial::one(p.field()), p.clone())
    }

    pub fn numerator(&self) -> &LaurentPolynomial {
        &self.num
    }

    pub fn denominator(&self) -> &LaurentPolynomial {
        &self.den
    }

    pub fn field(&self) -> &Arc<NumberField> {
        if self.num.field().is_rational() {
            self.den.field()
        } else {
            self.num.field()
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// The Laurent polynomial this equals, if the denominator is trivial.
    pub fn as_laurent(&self) -> Option<&LaurentPolynomial> {
        self.den.is_constant().then_some(&self.num)
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.den == other.den {
            return Self::new(self.num.add(&other.num), self.den.clone()).unwrap();
        }
        let num = self.num.mul(&other.den).add(&other.num.mul(&self.den));
        Self::new(num, self.den.mul(&other.den)).unwrap()
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        RationalFunction {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::new(self.num.mul(&other.num), self.den.mul(&other.den)).unwrap()
    }

    pub fn scale(&self, c: &FieldElement) -> Self {
        if c.is_zero() {
            return Self::zero(self.field());
        }
        RationalFunction {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    pub fn mul_laurent(&self, p: &LaurentPolynomial) -> Self {
        Self::new(self.num.mul(p), self.den.clone()).unwrap()
    }

    pub fn inv(&self) -> Result<Self> {
        Self::new(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, k: i32) -> Result<Self> {
        let base = if k < 0 { self.inv()? } else { self.clone() };
        Ok(RationalFunction {
            num: base.num.pow(k.unsigned_abs()),
            den: base.den.pow(k.unsigned_abs()),
        })
    }

    pub fn derivative(&self) -> Self {
        let num = self
            .num
            .derivative()
            .mul(&self.den)
            .sub(&self.num.mul(&self.den.derivative()));
        Self::new(num, self.den.mul(&self.den)).unwrap()
    }

    /// `f(1/t)`.
    pub fn invert_variable(&self) -> Self {
        Self::new(self.num.invert_variable(), self.den.invert_variable()).unwrap()
    }

    pub fn eval(&self, a: &FieldElement) -> Result<FieldElement> {
        let d = self.den.eval(a)?;
        if d.is_zero() {
            return Err(Error::ZeroInverse);
        }
        Ok(&self.num.eval(a)? * &d.inverse()?)
    }

    pub fn eval_ball(&self, root: &ComplexBall, t: &ComplexBall) -> Option<ComplexBall> {
        self.num
            .eval_ball(root, t)?
            .div(&self.den.eval_ball(root, t)?)
    }

    /// Denominator as a dense polynomial.
    pub fn den_poly(&self) -> Poly {
        self.den.to_poly().1
    }

    pub fn to_json(&self) -> Value {
        json!({ "numerator": self.num.to_json(), "denominator": self.den.to_json() })
    }

    pub fn from_json(v: &Value, field: &Arc<NumberField>) -> Result<Self> {
        let get = |k: &str| {
            v.get(k)
                .ok_or_else(|| Error::Parse(format!("rational function needs {k:?}")))
        };
        let num = LaurentPolynomial::from_json(get("numerator")?, field)?;
        let den = LaurentPolynomial::from_json(get("denominator")?, field)?;
        Self::new(num, den).map_err(|_| Error::Parse("zero denominator".into()))
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_constant() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "[{}] / [{}]", self.num, self.den)
        }
    }
}

impl fmt::Debug for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form() {
        let q = NumberField::rationals();
        let d = LaurentPolynomial::from_ints(&q, -1, &[1, -5, 1]);
        let f = RationalFunction::recip_of(&d).unwrap();
        // 1/(t^-1 - 5 + t) = t / (t^2 - 5t + 1)
        assert_eq!(f.numerator(), &LaurentPolynomial::t_pow(&q, 1));
        assert_eq!(
            f.denominator(),
            &LaurentPolynomial::from_ints(&q, 0, &[1, -5, 1])
        );
        let g = RationalFunction::new(d.mul(&d), d.scale(&q.from_int(3))).unwrap();
        assert_eq!(
            g.as_laurent().unwrap(),
            &d.scale(&q.from_rational(crate::exactfield::rat(1, 3)))
        );
    }

    #[test]
    fn arithmetic_is_consistent() {
        let q = NumberField::rationals();
        let a = RationalFunction::recip_of(&LaurentPolynomial::from_ints(&q, 0, &[1, -2])).unwrap();
        let b = RationalFunction::recip_of(&LaurentPolynomial::from_ints(&q, 0, &[1, -3])).unwrap();
        let s = a.add(&b).sub(&b);
        assert_eq!(s, a);
        let x = q.from_int(5);
        assert_eq!(
            a.mul(&b).eval(&x).unwrap(),
            &a.eval(&x).unwrap() * &b.eval(&x).unwrap()
        );
        assert_eq!(a.invert_variable().invert_variable(), a);
        assert!(a
            .eval(&q.from_rational(crate::exactfield::rat(1, 2)))
            .is_err());
    }
}
