use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde_json::{Map, Value};

use super::poly::{widest_field, Poly};
use crate::error::{Error, Result};
use crate::exactfield::serial::{coords_to_value, parse_element};
use crate::exactfield::{ComplexBall, FieldElement, NumberField};

/// Sparse Laurent polynomial `sum c_k t^k` over a number field.
#[derive(Clone)]
pub struct LaurentPolynomial {
    field: Arc<NumberField>,
    coeffs: BTreeMap<i64, FieldElement>,
}

impl PartialEq for LaurentPolynomial {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs
    }
}

impl Eq for LaurentPolynomial {}

impl LaurentPolynomial {
    pub fn zero(field: &Arc<NumberField>) -> Self {
        LaurentPolynomial {
            field: field.clone(),
            coeffs: BTreeMap::new(),
        }
    }

    pub fn one(field: &Arc<NumberField>) -> Self {
        Self::constant(field.one())
    }

    pub fn constant(c: FieldElement) -> Self {
        Self::monomial(c, 0)
    }

    pub fn monomial(c: FieldElement, k: i64) -> Self {
        let field = c.field().clone();
        Self::from_terms(&field, [(k, c)])
    }

    /// `t^k`.
    pub fn t_pow(field: &Arc<NumberField>, k: i64) -> Self {
        Self::monomial(field.one(), k)
    }

    pub fn from_terms(
        field: &Arc<NumberField>,
        terms: impl IntoIterator<Item = (i64, FieldElement)>,
    ) -> Self {
        let mut coeffs: BTreeMap<i64, FieldElement> = BTreeMap::new();
        for (k, c) in terms {
            match coeffs.get_mut(&k) {
                Some(v) => *v = &*v + &c,
                None => {
                    coeffs.insert(k, c);
                }
            }
        }
        coeffs.retain(|_, c| !c.is_zero());
        let field = widest_field(field, coeffs.values());
        LaurentPolynomial { field, coeffs }
    }

    /// Integer coefficients starting at exponent `low`.
    pub fn from_ints(field: &Arc<NumberField>, low: i64, coeffs: &[i64]) -> Self {
        Self::from_terms(
            field,
            coeffs
                .iter()
                .enumerate()
                .map(|(i, &c)| (low + i as i64, field.from_int(c))),
        )
    }

    /// `t^shift * p(t)`.
    pub fn from_poly(p: &Poly, shift: i64) -> Self {
        Self::from_terms(
            p.field(),
            p.coeffs()
                .iter()
                .enumerate()
                .map(|(i, c)| (shift + i as i64, c.clone())),
        )
    }

    /// Splits as `t^low * p(t)` with `p(0) != 0`; the zero polynomial gives `(0, 0)`.
    pub fn to_poly(&self) -> (i64, Poly) {
        let Some(low) = self.low() else {
            return (0, Poly::zero(&self.field));
        };
        let high = self.high().unwrap();
        let mut v = vec![self.field.zero(); (high - low + 1) as usize];
        for (k, c) in &self.coeffs {
            v[(k - low) as usize] = c.clone();
        }
        (low, Poly::new(&self.field, v))
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &FieldElement)> {
        self.coeffs.iter().map(|(k, c)| (*k, c))
    }

    pub fn coeff(&self, k: i64) -> FieldElement {
        self.coeffs
            .get(&k)
            .cloned()
            .unwrap_or_else(|| self.field.zero())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.keys().all(|&k| k == 0)
    }

    pub fn low(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    pub fn high(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_terms(
            &self.field,
            self.coeffs
                .iter()
                .chain(other.coeffs.iter())
                .map(|(k, c)| (*k, c.clone())),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(|c| -c)
    }

    pub fn scale(&self, k: &FieldElement) -> Self {
        let field = widest_field(&self.field, [k]);
        Self::from_terms(&field, self.coeffs.iter().map(|(e, c)| (*e, c * k)))
    }

    pub fn map_coeffs(&self, f: impl Fn(&FieldElement) -> FieldElement) -> Self {
        Self::from_terms(&self.field, self.coeffs.iter().map(|(k, c)| (*k, f(c))))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let field = widest_field(&self.field, [&other.field.zero()]);
        let mut out: BTreeMap<i64, FieldElement> = BTreeMap::new();
        for (i, a) in &self.coeffs {
            for (j, b) in &other.coeffs {
                let p = a * b;
                match out.get_mut(&(i + j)) {
                    Some(v) => *v = &*v + &p,
                    None => {
                        out.insert(i + j, p);
                    }
                }
            }
        }
        out.retain(|_, c| !c.is_zero());
        LaurentPolynomial { field, coeffs: out }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(&self.field);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Multiplies by `t^k`.
    pub fn shift(&self, k: i64) -> Self {
        LaurentPolynomial {
            field: self.field.clone(),
            coeffs: self
                .coeffs
                .iter()
                .map(|(e, c)| (e + k, c.clone()))
                .collect(),
        }
    }

    pub fn derivative(&self) -> Self {
        Self::from_terms(
            &self.field,
            self.coeffs
                .iter()
                .map(|(k, c)| (k - 1, c * &self.field.from_int(*k))),
        )
    }

    /// `p(1/t)`.
    pub fn invert_variable(&self) -> Self {
        LaurentPolynomial {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|(e, c)| (-e, c.clone())).collect(),
        }
    }

    /// `p(t^m)`.
    pub fn substitute_power(&self, m: i64) -> Self {
        assert!(m != 0);
        Self::from_terms(
            &self.field,
            self.coeffs.iter().map(|(e, c)| (e * m, c.clone())),
        )
    }

    /// Exact evaluation at `a`.
    pub fn eval(&self, a: &FieldElement) -> Result<FieldElement> {
        if a.is_zero() && self.low().is_some_and(|l| l < 0) {
            return Err(Error::ZeroBase);
        }
        let mut acc = self.field.zero();
        let (low, p) = self.to_poly();
        if p.is_zero() {
            return Ok(acc);
        }
        acc = &acc + &p.eval(a);
        Ok(&acc * &a.pow(low)?)
    }

    /// Sum of coefficients, the value at `t = 1`.
    pub fn eval_one(&self) -> FieldElement {
        self.coeffs
            .values()
            .fold(self.field.zero(), |acc, c| &acc + c)
    }

    /// Enclosure of the value at a complex point, coefficients embedded via `root`.
    pub fn eval_ball(&self, root: &ComplexBall, t: &ComplexBall) -> Option<ComplexBall> {
        let mut acc = ComplexBall::zero(t.prec());
        for (k, c) in &self.coeffs {
            let tk = t.powi(*k)?;
            acc = acc.add(&c.eval_at(root).mul(&tk));
        }
        Some(acc)
    }

    /// Coefficients of `p mod (t^n - 1)`, indexed by residue.
    pub fn fold(&self, n: usize) -> Vec<FieldElement> {
        let mut v = vec![self.field.zero(); n];
        for (k, c) in &self.coeffs {
            let r = k.rem_euclid(n as i64) as usize;
            v[r] = &v[r] + c;
        }
        v
    }

    /// Exact quotient by `other`, `None` if it does not divide.
    pub fn div_exact(&self, other: &Self) -> Option<Self> {
        if other.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(self.clone());
        }
        let (la, pa) = self.to_poly();
        let (lb, pb) = other.to_poly();
        let q = pa.div_exact(&pb)?;
        Some(Self::from_poly(&q, la - lb))
    }

    /// Whether `p(1/t) = c t^k p(t)` for some unit `c t^k`.
    pub fn is_palindromic_up_to_unit(&self) -> bool {
        if self.is_zero() {
            return true;
        }
        let a = normalize_unit(self);
        let b = normalize_unit(&self.invert_variable());
        a == b
    }

    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        for (k, c) in &self.coeffs {
            m.insert(k.to_string(), coords_to_value(c));
        }
        Value::Object(m)
    }

    pub fn from_json(v: &Value, field: &Arc<NumberField>) -> Result<Self> {
        let obj = v.as_object().ok_or_else(|| {
            Error::Parse(format!("expected a Laurent polynomial object, got {v}"))
        })?;
        let mut terms = Vec::with_capacity(obj.len());
        for (k, c) in obj {
            let e: i64 = k
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad exponent {k:?}")))?;
            terms.push((e, parse_element(c, field)?));
        }
        Ok(Self::from_terms(field, terms))
    }
}

/// Representative of `p` up to `c t^k`: lowest exponent 0, and the first
/// nonzero coordinate of the leading coefficient equal to 1.
pub fn normalize_unit(p: &LaurentPolynomial) -> LaurentPolynomial {
    let Some(low) = p.low() else { return p.clone() };
    let lead = p.coeffs.values().next_back().unwrap();
    let inv = lead.inverse().unwrap();
    p.shift(-low).scale(&inv)
}

/// Canonical representative of `p` up to `c t^k` with `c` rational: lowest
/// exponent 0, leading coefficient's first nonzero coordinate positive and
/// the coordinates of all coefficients coprime integers.
pub fn normalize_rational_unit(p: &LaurentPolynomial) -> LaurentPolynomial {
    use num_integer::Integer;
    use num_traits::{Signed, Zero};
    let Some(low) = p.low() else { return p.clone() };
    let mut num_gcd = num_bigint::BigInt::zero();
    let mut den_lcm = num_bigint::BigInt::from(1);
    for c in p.coeffs.values() {
        for q in c.coords() {
            if !q.is_zero() {
                num_gcd = num_gcd.gcd(q.numer());
                den_lcm = den_lcm.lcm(q.denom());
            }
        }
    }
    let lead = p.coeffs.values().next_back().unwrap();
    let first = lead.coords().iter().find(|q| !q.is_zero()).unwrap();
    let mut s = crate::exactfield::Rational::new(den_lcm, num_gcd);
    if first.is_negative() {
        s = -s;
    }
    p.shift(-low).map_coeffs(|c| c.scale(&s))
}

impl fmt::Display for LaurentPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .rev()
            .map(|(k, c)| match k {
                0 => format!("({c})"),
                1 => format!("({c})*t"),
                _ => format!("({c})*t^{k}"),
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for LaurentPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn delta41() -> LaurentPolynomial {
        let q = NumberField::rationals();
        LaurentPolynomial::from_ints(&q, -1, &[1, -5, 1])
    }

    #[test]
    fn evaluates_delta41() {
        let q = NumberField::rationals();
        let d = delta41();
        assert_eq!(d.eval(&q.one()).unwrap(), q.from_int(-3));
        assert_eq!(d.eval(&q.from_int(-1)).unwrap(), q.from_int(-7));
        assert_eq!(d.eval(&q.zero()), Err(Error::ZeroBase));
        assert!(d.is_palindromic_up_to_unit());
    }

    #[test]
    fn folding_and_division() {
        let d = delta41();
        let f = d.fold(2);
        assert_eq!(f[0], d.field().from_int(-5));
        assert_eq!(f[1], d.field().from_int(2));
        let sq = d.mul(&d);
        assert_eq!(sq.div_exact(&d).unwrap(), d);
        assert!(d
            .div_exact(&LaurentPolynomial::from_ints(d.field(), 0, &[-1, 1]))
            .is_none());
    }

    #[test]
    fn json_roundtrip() {
        let d = delta41();
        let v = d.to_json();
        assert_eq!(v["-1"], json!(["1"]));
        assert_eq!(LaurentPolynomial::from_json(&v, d.field()).unwrap(), d);
    }

    #[test]
    fn rational_unit_normalization() {
        let q = NumberField::rationals();
        let p = LaurentPolynomial::from_ints(&q, -3, &[-2, 10, -2]);
        assert_eq!(
            normalize_rational_unit(&p),
            LaurentPolynomial::from_ints(&q, 0, &[1, -5, 1])
        );
    }
}
