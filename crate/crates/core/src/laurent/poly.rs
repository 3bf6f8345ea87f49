//! Dense univariate polynomials over a number field.

use std::sync::Arc;

use crate::exactfield::{FieldElement, NumberField};

#[derive(Clone, Debug)]
pub struct Poly {
    field: Arc<NumberField>,
    /// Constant term first, no trailing zeros.
    coeffs: Vec<FieldElement>,
}

/// The first non-rational field among `coeffs`, falling back to `field`.
pub(crate) fn widest_field<'a>(
    field: &Arc<NumberField>,
    coeffs: impl IntoIterator<Item = &'a FieldElement>,
) -> Arc<NumberField> {
    if !field.is_rational() {
        return field.clone();
    }
    coeffs
        .into_iter()
        .find(|c| !c.field().is_rational())
        .map(|c| c.field().clone())
        .unwrap_or_else(|| field.clone())
}

impl PartialEq for Poly {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs
    }
}

impl Eq for Poly {}

impl Poly {
    pub fn new(field: &Arc<NumberField>, mut coeffs: Vec<FieldElement>) -> Self {
        while coeffs.last().is_some_and(FieldElement::is_zero) {
            coeffs.pop();
        }
        let field = widest_field(field, &coeffs);
        Poly { field, coeffs }
    }

    pub fn zero(field: &Arc<NumberField>) -> Self {
        Poly {
            field: field.clone(),
            coeffs: Vec::new(),
        }
    }

    pub fn constant(c: FieldElement) -> Self {
        let f = c.field().clone();
        Poly::new(&f, vec![c])
    }

    /// `c * t^k`.
    pub fn monomial(c: FieldElement, k: usize) -> Self {
        let f = c.field().clone();
        let mut v = vec![f.zero(); k];
        v.push(c);
        Poly::new(&f, v)
    }

    /// `t^n - 1`.
    pub fn cyclic(field: &Arc<NumberField>, n: usize) -> Self {
        let mut v = vec![field.zero(); n + 1];
        v[0] = field.from_int(-1);
        v[n] = field.one();
        Poly::new(field, v)
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> FieldElement {
        self.coeffs
            .get(i)
            .cloned()
            .unwrap_or_else(|| self.field.zero())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> Option<&FieldElement> {
        self.coeffs.last()
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let v = (0..n).map(|i| self.coeff(i) + other.coeff(i)).collect();
        Poly::new(&self.field, v)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let v = (0..n).map(|i| self.coeff(i) - other.coeff(i)).collect();
        Poly::new(&self.field, v)
    }

    pub fn neg(&self) -> Poly {
        Poly::new(&self.field, self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn scale(&self, k: &FieldElement) -> Poly {
        Poly::new(&self.field, self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero(&self.field);
        }
        let mut out = vec![self.field.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] = &out[i + j] + &(a * b);
                }
            }
        }
        Poly::new(&self.field, out)
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut acc = Poly::constant(self.field.one());
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Multiplies by `t^k`.
    pub fn shift(&self, k: usize) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let mut v = vec![self.field.zero(); k];
        v.extend(self.coeffs.iter().cloned());
        Poly::new(&self.field, v)
    }

    /// Quotient and remainder. Panics if `divisor` is zero.
    pub fn divrem(&self, divisor: &Poly) -> (Poly, Poly) {
        let dd = divisor.degree().expect("polynomial division by zero");
        if self.coeffs.len() <= dd {
            return (Poly::zero(&self.field), self.clone());
        }
        let lead_inv = divisor.lead().unwrap().inverse().unwrap();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![self.field.zero(); rem.len() - dd];
        for k in (dd..rem.len()).rev() {
            if rem[k].is_zero() {
                continue;
            }
            let c = &rem[k] * &lead_inv;
            for (j, d) in divisor.coeffs.iter().enumerate() {
                if !d.is_zero() {
                    let idx = k - dd + j;
                    rem[idx] = &rem[idx] - &(&c * d);
                }
            }
            quot[k - dd] = c;
        }
        rem.truncate(dd);
        (Poly::new(&self.field, quot), Poly::new(&self.field, rem))
    }

    pub fn rem(&self, divisor: &Poly) -> Poly {
        self.divrem(divisor).1
    }

    /// Exact quotient, `None` when the remainder is nonzero.
    pub fn div_exact(&self, divisor: &Poly) -> Option<Poly> {
        let (q, r) = self.divrem(divisor);
        r.is_zero().then_some(q)
    }

    pub fn monic(&self) -> Poly {
        match self.lead() {
            None => self.clone(),
            Some(l) => self.scale(&l.inverse().unwrap()),
        }
    }

    pub fn gcd(&self, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `(g, s)` with `s * self = g (mod modulus)`, `g` the monic gcd.
    pub fn inverse_mod(&self, modulus: &Poly) -> (Poly, Poly) {
        let (mut r0, mut r1) = (modulus.clone(), self.rem(modulus));
        let (mut s0, mut s1) = (Poly::zero(&self.field), Poly::constant(self.field.one()));
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1);
            let s = s0.sub(&q.mul(&s1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
        }
        match r0.lead().cloned() {
            None => (Poly::zero(&self.field), Poly::zero(&self.field)),
            Some(l) => {
                let inv = l.inverse().unwrap();
                (r0.scale(&inv), s0.scale(&inv).rem(modulus))
            }
        }
    }

    pub fn eval(&self, x: &FieldElement) -> FieldElement {
        self.coeffs
            .iter()
            .rev()
            .fold(self.field.zero(), |acc, c| &(&acc * x) + c)
    }

    pub fn derivative(&self) -> Poly {
        let v = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * &self.field.from_int(i as i64))
            .collect();
        Poly::new(&self.field, v)
    }

    /// `t^deg * p(1/t)`.
    pub fn reverse(&self) -> Poly {
        let mut v = self.coeffs.clone();
        v.reverse();
        Poly::new(&self.field, v)
    }

    /// Resultant `Res(self, other)` by the Euclidean algorithm.
    pub fn resultant(&self, other: &Poly) -> FieldElement {
        let f = &self.field;
        let (Some(_), Some(_)) = (self.degree(), other.degree()) else {
            return f.zero();
        };
        let mut a = self.clone();
        let mut b = other.clone();
        let mut acc = f.one();
        loop {
            let da = a.degree().unwrap();
            let Some(db) = b.degree() else {
                return f.zero();
            };
            if db == 0 {
                return &acc * &b.coeffs[0].pow(da as i64).unwrap();
            }
            let r = a.rem(&b);
            let Some(dr) = r.degree() else {
                return f.zero();
            };
            // Res(a, b) = (-1)^(da db) lc(b)^(da - dr) Res(b, r)
            let mut factor = b.lead().unwrap().pow((da - dr) as i64).unwrap();
            if da * db % 2 == 1 {
                factor = -factor;
            }
            acc = &acc * &factor;
            a = std::mem::replace(&mut b, r);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(f: &Arc<NumberField>, v: &[i64]) -> Poly {
        Poly::new(f, v.iter().map(|&c| f.from_int(c)).collect())
    }

    #[test]
    fn resultant_matches_root_products() {
        let q = NumberField::rationals();
        // Res(t^2 - 1, t - 3) = (1 - 3)(-1 - 3) = 8
        assert_eq!(
            p(&q, &[-1, 0, 1]).resultant(&p(&q, &[-3, 1])),
            q.from_int(8)
        );
        // Res(t^3 - 1, t^2 - 5t + 1) = prod over cube roots w of (w^2 - 5w + 1)
        // = (1-5+1) * |w^2-5w+1|^2 at w = e^{2 pi i/3}: (-3) * 36 = -108
        assert_eq!(
            p(&q, &[-1, 0, 0, 1]).resultant(&p(&q, &[1, -5, 1])),
            q.from_int(-108)
        );
    }

    #[test]
    fn inverse_mod_cyclic() {
        let q = NumberField::rationals();
        let m = Poly::cyclic(&q, 5);
        let a = p(&q, &[1, -2]);
        let (g, s) = a.inverse_mod(&m);
        assert_eq!(g, p(&q, &[1]));
        assert_eq!(a.mul(&s).rem(&m), p(&q, &[1]));
    }
}
