//! Partial fractions in the basis `c / (1 - lambda t)^m` plus a Laurent part.

use super::laurent_poly::LaurentPolynomial;
use super::ratfunc::RationalFunction;
use crate::error::{Error, Result};
use crate::exactfield::FieldElement;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialTerm {
    pub root: FieldElement,
    pub power: usize,
    pub coeff: FieldElement,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialFractions {
    pub laurent_part: LaurentPolynomial,
    pub terms: Vec<PartialTerm>,
}

impl PartialFractions {
    pub fn recombine(&self) -> RationalFunction {
        let field = self.laurent_part.field().clone();
        let mut acc = RationalFunction::from_laurent(self.laurent_part.clone());
        for term in &self.terms {
            let base = LaurentPolynomial::from_terms(&field, [(0, field.one()), (1, -&term.root)]);
            let part = RationalFunction::new(
                LaurentPolynomial::constant(term.coeff.clone()),
                base.pow(term.power as u32),
            )
            .unwrap();
            acc = acc.add(&part);
        }
        acc
    }
}

/// Truncated power series in `u`, `len` coefficients.
fn series_mul(a: &[FieldElement], b: &[FieldElement], len: usize) -> Vec<FieldElement> {
    let field = a[0].field().clone();
    let mut out = vec![field.zero(); len];
    for (i, x) in a.iter().enumerate().take(len) {
        for (j, y) in b.iter().enumerate().take(len - i) {
            out[i + j] = &out[i + j] + &(x * y);
        }
    }
    out
}

fn series_div(a: &[FieldElement], b: &[FieldElement], len: usize) -> Result<Vec<FieldElement>> {
    let inv0 = b[0].inverse().map_err(|_| Error::IncompleteFactorization)?;
    let mut out: Vec<FieldElement> = Vec::with_capacity(len);
    for k in 0..len {
        let mut s = a[k].clone();
        for j in 1..=k.min(b.len() - 1) {
            s = &s - &(&b[j] * &out[k - j]);
        }
        out.push(&s * &inv0);
    }
    Ok(out)
}

/// Coefficients of `(1 - u)^e` up to `u^(len-1)`, for any integer `e`.
fn binomial_series(base: &FieldElement, e: i64, len: usize) -> Vec<FieldElement> {
    let field = base.field().clone();
    let mut out = Vec::with_capacity(len);
    let mut c = field.one();
    for k in 0..len as i64 {
        out.push(c.clone());
        // next: c * (e - k) / (k + 1) * (-1)
        c = c.scale(&crate::exactfield::rat(-(e - k), k + 1));
    }
    out
}

/// Decomposes `f` given the roots `lambda_j` (with multiplicities) for
/// which the denominator is proportional to `prod (1 - lambda_j t)^m_j`.
pub fn partial_fractions(
    f: &RationalFunction,
    roots: &[(FieldElement, usize)],
) -> Result<PartialFractions> {
    let field = f.field().clone();
    let mut prod = LaurentPolynomial::one(&field);
    for (lam, m) in roots {
        if lam.is_zero() || *m == 0 {
            return Err(Error::IncompleteFactorization);
        }
        let base = LaurentPolynomial::from_terms(&field, [(0, field.one()), (1, -lam)]);
        prod = prod.mul(&base.pow(*m as u32));
    }
    let lead = prod.coeff(prod.high().unwrap_or(0));
    let scaled = prod.scale(&lead.inverse()?);
    // the reduced denominator may have lost factors to cancellation
    let cofactor = scaled
        .div_exact(f.denominator())
        .ok_or(Error::IncompleteFactorization)?;
    let numerator = f.numerator().mul(&cofactor);
    let mut terms = Vec::new();
    for (j, (lam, m)) in roots.iter().enumerate() {
        let lam_inv = lam.inverse()?;
        // numerator at t = (1 - u)/lambda
        let mut sn = vec![field.zero(); *m];
        for (e, c) in numerator.terms() {
            let coef = c * &lam_inv.pow(e)?;
            for (k, b) in binomial_series(lam, e, *m).into_iter().enumerate() {
                sn[k] = &sn[k] + &(&coef * &b);
            }
        }
        // remaining factors at t = (1 - u)/lambda
        let mut sp = vec![field.zero(); *m];
        sp[0] = field.one();
        for (i, (mu, mi)) in roots.iter().enumerate() {
            if i == j {
                continue;
            }
            let r = mu * &lam_inv;
            let mut lin = vec![&field.one() - &r];
            if *m > 1 {
                lin.push(r.clone());
            }
            for _ in 0..*mi {
                sp = series_mul(&sp, &lin, *m);
            }
        }
        let g = series_div(&sn, &sp, *m)?;
        for (i, c) in g.into_iter().enumerate() {
            let c = &c * &lead;
            if !c.is_zero() {
                terms.push(PartialTerm {
                    root: lam.clone(),
                    power: m - i,
                    coeff: c,
                });
            }
        }
    }
    let mut rest = f.clone();
    let partial = PartialFractions {
        laurent_part: LaurentPolynomial::zero(&field),
        terms,
    };
    rest = rest.sub(&partial.recombine());
    let laurent_part = rest
        .as_laurent()
        .ok_or(Error::IncompleteFactorization)?
        .clone();
    Ok(PartialFractions {
        laurent_part,
        ..partial
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactfield::{rat, NumberField};

    #[test]
    fn two_simple_poles() {
        let q = NumberField::rationals();
        let (a, b) = (q.from_int(2), q.from_int(3));
        let den = LaurentPolynomial::from_ints(&q, 0, &[1, -2]).mul(&LaurentPolynomial::from_ints(
            &q,
            0,
            &[1, -3],
        ));
        let f = RationalFunction::recip_of(&den).unwrap();
        let pf = partial_fractions(&f, &[(a.clone(), 1), (b.clone(), 1)]).unwrap();
        assert!(pf.laurent_part.is_zero());
        let ca = (&q.one() - &(&b / &a)).inverse().unwrap();
        let cb = (&q.one() - &(&a / &b)).inverse().unwrap();
        assert_eq!(pf.terms[0].coeff, ca);
        assert_eq!(pf.terms[1].coeff, cb);
        assert_eq!(pf.recombine(), f);
    }

    #[test]
    fn repeated_pole_and_laurent_part() {
        let q = NumberField::rationals();
        let base = LaurentPolynomial::from_ints(&q, 0, &[1, -2]);
        let num = LaurentPolynomial::from_ints(&q, -2, &[1, 0, 0, 0, 7]);
        let f = RationalFunction::new(num, base.pow(3)).unwrap();
        let pf = partial_fractions(&f, &[(q.from_int(2), 3)]).unwrap();
        assert_eq!(pf.recombine(), f);
        assert!(partial_fractions(&f, &[(q.from_int(2), 2)]).is_err());
        assert!(partial_fractions(&f, &[(q.from_rational(rat(1, 2)), 3)]).is_err());
    }

    #[test]
    fn inverse_delta41_over_sqrt21() {
        let k = NumberField::from_ints(&[-21, 0, 1]).unwrap();
        let s = k.generator();
        let lam = (&k.from_int(5) + &s).scale(&rat(1, 2));
        let d = LaurentPolynomial::from_ints(&k, -1, &[1, -5, 1]);
        let f = RationalFunction::recip_of(&d).unwrap();
        let pf = partial_fractions(&f, &[(lam.clone(), 1), (lam.inverse().unwrap(), 1)]).unwrap();
        assert_eq!(pf.recombine(), f);
    }
}
