//! Generalized power sums and the cover polynomial.
//!
//! A cover polynomial `p(x_1..x_r, y)` is evaluated at `x_i = 1/(1 - lambda_i^n)`
//! and `y = n`. One variable per root pair suffices because
//! `1/(1 - lambda^-n) = 1 - 1/(1 - lambda^n)`.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exactfield::serial::{element_to_value, parse_element, parse_field};
use crate::exactfield::{ComplexBall, FieldElement, NumberField};
use crate::laurent::{Poly, RationalFunction};
use crate::linalg::FieldMatrix;
use crate::rootsum::delta_basis_inverse;

/// `a_n = sum_j A_j(n) lambda_j^n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneralizedPowerSum {
    field: Arc<NumberField>,
    /// Root and coefficients of `A_j`, constant term first.
    terms: Vec<(FieldElement, Vec<FieldElement>)>,
}

impl GeneralizedPowerSum {
    pub fn new(
        field: &Arc<NumberField>,
        terms: Vec<(FieldElement, Vec<FieldElement>)>,
    ) -> Result<Self> {
        for (i, (a, _)) in terms.iter().enumerate() {
            if a.is_zero() {
                return Err(Error::ZeroInverse);
            }
            if terms[..i].iter().any(|(b, _)| b == a) {
                return Err(Error::Dimension("roots must be distinct".into()));
            }
        }
        let terms = terms
            .into_iter()
            .map(|(l, mut c)| {
                while c.last().is_some_and(FieldElement::is_zero) {
                    c.pop();
                }
                (
                    l.lift_to(field),
                    c.into_iter().map(|x| x.lift_to(field)).collect(),
                )
            })
            .filter(|(_, c): &(FieldElement, Vec<FieldElement>)| !c.is_empty())
            .collect();
        Ok(GeneralizedPowerSum {
            field: field.clone(),
            terms,
        })
    }

    pub fn terms(&self) -> &[(FieldElement, Vec<FieldElement>)] {
        &self.terms
    }

    /// `sum_j (deg A_j + 1)`.
    pub fn order(&self) -> usize {
        self.terms.iter().map(|(_, c)| c.len()).sum()
    }

    pub fn eval(&self, n: u64) -> FieldElement {
        let x = self.field.from_int(n as i64);
        self.terms.iter().fold(self.field.zero(), |acc, (l, c)| {
            let a = c
                .iter()
                .rev()
                .fold(self.field.zero(), |h, ci| &(&h * &x) + ci);
            &acc + &(&a * &l.pow(n as i64).unwrap())
        })
    }

    /// `s(t) = prod (1 - lambda_j t)^(deg A_j + 1)`.
    pub fn characteristic(&self) -> Poly {
        self.terms
            .iter()
            .fold(Poly::constant(self.field.one()), |acc, (l, c)| {
                let f = Poly::new(&self.field, vec![self.field.one(), -l.clone()]);
                acc.mul(&f.pow(c.len() as u32))
            })
    }
}

/// `sum_n a_n t^n = numerator / denominator`, with the first coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Series {
    pub numerator: Poly,
    pub denominator: Poly,
    pub coefficients: Vec<FieldElement>,
}

/// Power-series coefficients `0..count` of `num / den`, `den(0) != 0`.
pub fn series_division(num: &Poly, den: &Poly, count: usize) -> Result<Vec<FieldElement>> {
    let field = if num.field().is_rational() {
        den.field().clone()
    } else {
        num.field().clone()
    };
    let d0 = den.coeff(0);
    if d0.is_zero() {
        return Err(Error::ZeroInverse);
    }
    let inv = d0.inverse()?;
    let mut out: Vec<FieldElement> = Vec::with_capacity(count);
    for k in 0..count {
        let mut c = num.coeff(k).lift_to(&field);
        for i in 1..=k.min(den.coeffs().len().saturating_sub(1)) {
            c = &c - &(&den.coeff(i) * &out[k - i]);
        }
        out.push(&c * &inv);
    }
    Ok(out)
}

/// Coefficients of `t^0..t^(count-1)` in the expansion of `f` at `t = 0`.
pub fn series_coefficients(f: &RationalFunction, count: usize) -> Result<Vec<FieldElement>> {
    let field = f.field().clone();
    let low = f.numerator().low().unwrap_or(0);
    if low < 0 {
        return Err(Error::ZeroBase);
    }
    let (_, num) = f.numerator().to_poly();
    let den = f.den_poly();
    let skip = low as usize;
    let mut out = vec![field.zero(); skip.min(count)];
    out.extend(series_division(&num, &den, count.saturating_sub(skip))?);
    Ok(out)
}

/// The generating series of a power sum, checked against its own recursion
/// up to index `order`.
pub fn gps_to_series(a: &GeneralizedPowerSum, order: usize) -> Result<Series> {
    let d = a.order();
    if order < d {
        return Err(Error::NotEnoughValues {
            needed: d,
            got: order,
        });
    }
    let s = a.characteristic();
    let values: Vec<FieldElement> = (0..=order as u64).map(|n| a.eval(n)).collect();
    // r = s * sum a_n t^n truncated below degree d
    let mut r = Vec::with_capacity(d);
    for k in 0..d {
        let mut c = a.field.zero();
        for i in 0..=k {
            c = &c + &(&s.coeff(i) * &values[k - i]);
        }
        r.push(c);
    }
    for (n, _) in values.iter().enumerate().skip(d) {
        let mut c = a.field.zero();
        for i in 0..=d {
            c = &c + &(&s.coeff(i) * &values[n - i]);
        }
        if !c.is_zero() {
            return Err(Error::RecursionMismatch(n));
        }
    }
    Ok(Series {
        numerator: Poly::new(&a.field, r),
        denominator: s,
        coefficients: values,
    })
}

/// Exponent vector over the `x_i` and power of `y`.
pub type Monomial = (Vec<usize>, usize);

/// Dense monomial set: `|alpha| <= 2 ell - 2`, `1 <= beta <= ell - 1`.
pub fn cover_monomials(r: usize, ell: usize) -> Vec<Monomial> {
    let top = 2 * ell - 2;
    let mut alphas = vec![vec![]];
    for _ in 0..r {
        alphas = alphas
            .into_iter()
            .flat_map(|a: Vec<usize>| {
                let used: usize = a.iter().sum();
                (0..=top - used).map(move |e| {
                    let mut b = a.clone();
                    b.push(e);
                    b
                })
            })
            .collect();
    }
    let mut out = Vec::new();
    for beta in 1..ell {
        for a in &alphas {
            out.push((a.clone(), beta));
        }
    }
    out
}

/// `(ell - 1) * binomial(r + 2 ell - 2, r)`.
pub fn cover_unknowns(r: usize, ell: usize) -> usize {
    cover_monomials(r, ell).len()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverPolynomial {
    ell: usize,
    roots: Vec<FieldElement>,
    terms: BTreeMap<Monomial, FieldElement>,
}

impl CoverPolynomial {
    pub fn new(
        ell: usize,
        roots: Vec<FieldElement>,
        terms: BTreeMap<Monomial, FieldElement>,
    ) -> Result<Self> {
        if ell < 2 {
            return Err(Error::Dimension("ell must be at least 2".into()));
        }
        let field = roots
            .iter()
            .chain(terms.values())
            .map(FieldElement::field)
            .find(|f| !f.is_rational())
            .cloned()
            .unwrap_or_else(NumberField::rationals);
        for (alpha, beta) in terms.keys() {
            if alpha.len() != roots.len()
                || alpha.iter().sum::<usize>() > 2 * ell - 2
                || *beta == 0
                || *beta >= ell
            {
                return Err(Error::Dimension(format!(
                    "monomial {alpha:?} y^{beta} outside the cover shape"
                )));
            }
        }
        let roots = roots.iter().map(|l| l.lift_to(&field)).collect();
        let terms = terms
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| (k, c.lift_to(&field)))
            .collect();
        Ok(CoverPolynomial { ell, roots, terms })
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn r(&self) -> usize {
        self.roots.len()
    }

    pub fn roots(&self) -> &[FieldElement] {
        &self.roots
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, FieldElement> {
        &self.terms
    }

    pub fn field(&self) -> Arc<NumberField> {
        self.roots
            .first()
            .map(|l| l.field().clone())
            .or_else(|| self.terms.values().next().map(|c| c.field().clone()))
            .unwrap_or_else(NumberField::rationals)
    }

    pub fn coeff(&self, alpha: &[usize], beta: usize) -> FieldElement {
        self.terms
            .get(&(alpha.to_vec(), beta))
            .cloned()
            .unwrap_or_else(|| self.field().zero())
    }

    /// `p(1/(1 - lambda_i^n), n)`.
    pub fn eval(&self, n: u64) -> Result<FieldElement> {
        let field = self.field();
        let xs = cover_variables(&self.roots, n)?;
        let y = field.from_int(n as i64);
        let mut acc = field.zero();
        for ((alpha, beta), c) in &self.terms {
            let mut m = c * &y.pow(*beta as i64)?;
            for (x, &e) in xs.iter().zip(alpha) {
                m = &m * &x.pow(e as i64)?;
            }
            acc = &acc + &m;
        }
        Ok(acc)
    }

    pub fn to_json(&self, root_index: usize) -> Value {
        let field = self.field();
        json!({
            "ell": self.ell,
            "r": self.r(),
            "field": crate::exactfield::serial::field_to_value(&field, root_index),
            "roots": self.roots.iter().map(crate::exactfield::serial::coords_to_value).collect::<Vec<_>>(),
            "terms": self.terms.iter().map(|((a, b), c)| json!({
                "alpha": a,
                "beta": b,
                "coeff": crate::exactfield::serial::coords_to_value(c),
            })).collect::<Vec<_>>(),
        })
    }

    /// Returns the polynomial and the root index stored with its field.
    pub fn from_json(v: &Value) -> Result<(Self, usize)> {
        let perr = |m: &str| Error::Parse(m.to_string());
        let (field, root_index) = match v.get("field") {
            Some(f) => parse_field(f)?,
            None => (NumberField::rationals(), 0),
        };
        let ell = v
            .get("ell")
            .and_then(Value::as_u64)
            .ok_or_else(|| perr("cover polynomial needs \"ell\""))? as usize;
        let roots = v
            .get("roots")
            .and_then(Value::as_array)
            .ok_or_else(|| perr("cover polynomial needs \"roots\""))?
            .iter()
            .map(|x| parse_element(x, &field))
            .collect::<Result<Vec<_>>>()?;
        if let Some(r) = v.get("r").and_then(Value::as_u64) {
            if r as usize != roots.len() {
                return Err(perr("\"r\" disagrees with the number of roots"));
            }
        }
        let mut terms = BTreeMap::new();
        for t in v
            .get("terms")
            .and_then(Value::as_array)
            .ok_or_else(|| perr("cover polynomial needs \"terms\""))?
        {
            let alpha = t
                .get("alpha")
                .and_then(Value::as_array)
                .ok_or_else(|| perr("term needs \"alpha\""))?
                .iter()
                .map(|e| {
                    e.as_u64()
                        .map(|e| e as usize)
                        .ok_or_else(|| perr("alpha entries are integers"))
                })
                .collect::<Result<Vec<_>>>()?;
            let beta = t
                .get("beta")
                .and_then(Value::as_u64)
                .ok_or_else(|| perr("term needs \"beta\""))? as usize;
            let c = parse_element(
                t.get("coeff").ok_or_else(|| perr("term needs \"coeff\""))?,
                &field,
            )?;
            terms.insert((alpha, beta), c);
        }
        Ok((Self::new(ell, roots, terms)?, root_index))
    }
}

fn cover_variables(roots: &[FieldElement], n: u64) -> Result<Vec<FieldElement>> {
    roots
        .iter()
        .map(|l| {
            let d = &l.field().one() - &l.pow(n as i64)?;
            d.inverse().map_err(|_| Error::UnitCircleRoot(0))
        })
        .collect()
}

/// A reconstructed polynomial and `value - p(n)` on every value not used in the solve.
#[derive(Clone, Debug)]
pub struct Reconstruction {
    pub poly: CoverPolynomial,
    pub residuals: Vec<(u64, FieldElement)>,
}

impl Reconstruction {
    /// Indices `n` whose residual is nonzero.
    pub fn mismatches(&self) -> Vec<u64> {
        self.residuals
            .iter()
            .filter(|(_, r)| !r.is_zero())
            .map(|(n, _)| *n)
            .collect()
    }
}

/// Solves for the dense coefficients from the first
/// [`cover_unknowns`]`(r, ell)` values and checks the remaining ones.
pub fn reconstruct_p(
    values: &[(u64, FieldElement)],
    roots: &[FieldElement],
    ell: usize,
) -> Result<Reconstruction> {
    if ell < 2 {
        return Err(Error::Dimension("ell must be at least 2".into()));
    }
    let monomials = cover_monomials(roots.len(), ell);
    let k = monomials.len();
    if values.len() < k {
        return Err(Error::NotEnoughValues {
            needed: k,
            got: values.len(),
        });
    }
    let field = roots
        .iter()
        .map(FieldElement::field)
        .chain(values.iter().map(|(_, v)| v.field()))
        .find(|f| !f.is_rational())
        .cloned()
        .unwrap_or_else(NumberField::rationals);
    let row = |n: u64| -> Result<Vec<FieldElement>> {
        let xs = cover_variables(roots, n)?;
        let y = field.from_int(n as i64);
        monomials
            .iter()
            .map(|(alpha, beta)| {
                let mut m = y.pow(*beta as i64)?;
                for (x, &e) in xs.iter().zip(alpha) {
                    m = &m * &x.pow(e as i64)?;
                }
                Ok(m.lift_to(&field))
            })
            .collect()
    };
    let rows = values[..k]
        .iter()
        .map(|(n, _)| row(*n))
        .collect::<Result<Vec<_>>>()?;
    let m = FieldMatrix::from_rows(&field, rows)?;
    let rhs: Vec<FieldElement> = values[..k].iter().map(|(_, v)| v.lift_to(&field)).collect();
    let coeffs = m.solve_vec(&rhs).map_err(|e| match e {
        Error::SingularMatrix => Error::SingularSystem,
        e => e,
    })?;
    let terms = monomials.into_iter().zip(coeffs).collect();
    let poly = CoverPolynomial::new(ell, roots.to_vec(), terms)?;
    let residuals = values[k..]
        .iter()
        .map(|(n, v)| Ok((*n, &v.lift_to(&field) - &poly.eval(*n)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Reconstruction { poly, residuals })
}

/// Decides `|lambda|` against 1 at escalating precision.
pub fn compare_abs_one(lambda: &FieldElement, root_index: usize) -> Result<std::cmp::Ordering> {
    for digits in [30u32, 120, 500] {
        let ball = lambda.embed(root_index, digits)?;
        if let Some(o) = ball.cmp_abs_one() {
            return Ok(o);
        }
    }
    Err(Error::UnitCircleRoot(500))
}

/// Coefficient of `y` after `x_i -> 0` for `|lambda_i| > 1` and `x_i -> 1` for `|lambda_i| < 1`.
pub fn leading_asymptotic(p: &CoverPolynomial, root_index: usize) -> Result<FieldElement> {
    let field = p.field();
    let mut limits = Vec::with_capacity(p.r());
    for l in &p.roots {
        limits.push(match compare_abs_one(l, root_index)? {
            std::cmp::Ordering::Greater => 0,
            std::cmp::Ordering::Less => 1,
            std::cmp::Ordering::Equal => return Err(Error::UnitCircleRoot(500)),
        });
    }
    let mut acc = field.zero();
    for ((alpha, beta), c) in &p.terms {
        if *beta == 1 && alpha.iter().zip(&limits).all(|(&e, &x)| e == 0 || x == 1) {
            acc = &acc + c;
        }
    }
    Ok(acc)
}

/// `q(X, Y)` as a map from `(power of X, power of Y)`; `Y` may appear with
/// negative powers when `p` has high `y`-degree.
pub type DeltaForm = BTreeMap<(usize, i64), FieldElement>;

/// Rewrites `p(x, y)` with `r = 1` as `q` with
/// `sum_{t^n=1} q(1/delta(t), 1/n) = p(1/(1 - lambda^n), n)`,
/// `delta = t - (lambda + 1/lambda) + 1/t`.
pub fn quad_to_delta_form(p: &CoverPolynomial) -> Result<DeltaForm> {
    if p.r() != 1 {
        return Err(Error::Dimension(
            "the delta form needs exactly one root pair".into(),
        ));
    }
    let lambda = &p.roots[0];
    let top = p.terms.keys().map(|(a, _)| a[0]).max().unwrap_or(0);
    let beta = delta_basis_inverse(lambda, top)?;
    let mut q: DeltaForm = BTreeMap::new();
    for ((alpha, b), c) in &p.terms {
        // x^a n^b = Av(sum_i n^b beta[a][i](1/n) delta^-i)
        for (i, poly) in beta[alpha[0]].iter().enumerate() {
            for (e, coef) in poly.terms() {
                let key = (i, e - *b as i64);
                let v = &(c * coef) + q.get(&key).unwrap_or(&lambda.field().zero());
                if v.is_zero() {
                    q.remove(&key);
                } else {
                    q.insert(key, v);
                }
            }
        }
    }
    Ok(q)
}

/// `q(1/delta(t), 1/n)` as a rational function of `t` at fixed `n`.
pub fn delta_form_at(
    q: &DeltaForm,
    delta: &crate::laurent::LaurentPolynomial,
    n: u64,
) -> Result<RationalFunction> {
    let field = delta.field().clone();
    let inv = RationalFunction::recip_of(delta)?;
    let y = crate::exactfield::rat(1, n as i64);
    let mut acc = RationalFunction::zero(&field);
    for ((i, e), c) in q {
        let coeff = c.scale(&y.pow(*e as i32));
        acc = acc.add(&inv.pow(*i as i32)?.scale(&coeff));
    }
    Ok(acc)
}

/// Ratios `|Phi_n - n Psi| * lambda_max^n / n^(ell - 1)` over the window.
pub fn asymptotic_ratios(
    values: &[(u64, FieldElement)],
    psi: &FieldElement,
    lambda_max_abs: f64,
    ell: usize,
    root_index: usize,
    digits: u32,
) -> Result<Vec<f64>> {
    values
        .iter()
        .map(|(n, v)| {
            let diff = v - &psi.scale(&crate::exactfield::rat(*n as i64, 1));
            if diff.is_zero() {
                return Ok(0.0);
            }
            let mag = diff.embed(root_index, digits)?.abs_upper_f64();
            let log =
                mag.ln() + *n as f64 * lambda_max_abs.ln() - (ell as f64 - 1.0) * (*n as f64).ln();
            Ok(log.exp())
        })
        .collect()
}

/// True when the error ratio stays within a factor 2 across the top half of the window.
pub fn asymptotic_fit_check(
    values: &[(u64, FieldElement)],
    psi: &FieldElement,
    lambda_max_abs: f64,
    ell: usize,
    root_index: usize,
    digits: u32,
) -> Result<bool> {
    if values.len() < 2 {
        return Ok(false);
    }
    let ratios = asymptotic_ratios(values, psi, lambda_max_abs, ell, root_index, digits)?;
    let top = &ratios[ratios.len() / 2..];
    if top.iter().any(|r| !r.is_finite()) {
        return Ok(false);
    }
    let start = top[0];
    Ok(top
        .iter()
        .all(|&r| r <= 2.0 * start || r <= f64::MIN_POSITIVE))
}

/// Embeds every coordinate value as a complex ball through `root_index`.
pub fn embed_values(
    values: &[(u64, FieldElement)],
    root_index: usize,
    digits: u32,
) -> Result<Vec<(u64, ComplexBall)>> {
    values
        .iter()
        .map(|(n, v)| Ok((*n, v.embed(root_index, digits)?)))
        .collect()
}

/// Serializes a root list with its field for the CLI.
pub fn roots_to_json(roots: &[FieldElement], root_index: usize) -> Value {
    Value::Array(
        roots
            .iter()
            .map(|r| element_to_value(r, root_index))
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactfield::rat;
    use crate::laurent::LaurentPolynomial;
    use crate::rootsum::av_exact;

    fn q() -> Arc<NumberField> {
        NumberField::rationals()
    }

    #[test]
    fn simple_series() {
        let f = q();
        let a = GeneralizedPowerSum::new(&f, vec![(f.one(), vec![f.zero(), f.one()])]).unwrap();
        let s = gps_to_series(&a, 10).unwrap();
        // t / (1 - t)^2
        assert_eq!(s.numerator, Poly::new(&f, vec![f.zero(), f.one()]));
        assert_eq!(
            s.denominator,
            Poly::new(&f, vec![f.one(), f.from_int(-2), f.one()])
        );
        let b = GeneralizedPowerSum::new(&f, vec![(f.from_int(2), vec![f.one()])]).unwrap();
        let s = gps_to_series(&b, 5).unwrap();
        assert_eq!(s.numerator, Poly::constant(f.one()));
        assert_eq!(
            series_division(&s.numerator, &s.denominator, 30).unwrap(),
            (0..30).map(|n| b.eval(n)).collect::<Vec<_>>()
        );
    }

    #[test]
    fn counts_match_table() {
        assert_eq!(cover_unknowns(1, 2), 3);
        assert_eq!(cover_unknowns(1, 3), 10);
        assert_eq!(cover_unknowns(4, 2), 15);
        assert_eq!(cover_unknowns(4, 3), 140);
    }

    #[test]
    fn planted_y() {
        let f = q();
        let values: Vec<_> = (1..=6).map(|n| (n, f.from_int(n as i64))).collect();
        let rec = reconstruct_p(&values, &[f.from_int(2)], 2).unwrap();
        assert!(rec.mismatches().is_empty());
        assert_eq!(rec.poly.terms().len(), 1);
        assert_eq!(rec.poly.coeff(&[0], 1), f.one());
        assert_eq!(leading_asymptotic(&rec.poly, 0).unwrap(), f.one());
        let px = CoverPolynomial::new(
            2,
            vec![f.from_int(3)],
            BTreeMap::from([((vec![1], 1), f.one())]),
        )
        .unwrap();
        assert!(leading_asymptotic(&px, 0).unwrap().is_zero());
        let back = CoverPolynomial::from_json(&px.to_json(0)).unwrap().0;
        assert_eq!(back, px);
    }

    #[test]
    fn delta_form_roundtrip() {
        // p = y x^2 + 3 y x - y/2 at lambda = 2
        let f = q();
        let lambda = f.from_int(2);
        let p = CoverPolynomial::new(
            2,
            vec![lambda.clone()],
            BTreeMap::from([
                ((vec![2], 1), f.one()),
                ((vec![1], 1), f.from_int(3)),
                ((vec![0], 1), f.from_rational(rat(-1, 2))),
            ]),
        )
        .unwrap();
        let form = quad_to_delta_form(&p).unwrap();
        let delta =
            LaurentPolynomial::from_ints(&f, -1, &[2, -5, 2]).scale(&f.from_rational(rat(1, 2)));
        for n in 1..=15 {
            let g = delta_form_at(&form, &delta, n).unwrap();
            assert_eq!(av_exact(&g, n).unwrap(), p.eval(n).unwrap(), "n={n}");
        }
        let zero = CoverPolynomial::new(2, vec![lambda], BTreeMap::new()).unwrap();
        assert!(quad_to_delta_form(&zero).unwrap().is_empty());
    }

    #[test]
    fn fit_check_on_exact_line() {
        let f = q();
        let psi = f.from_rational(rat(3, 7));
        let values: Vec<_> = (10..30)
            .map(|n| (n, psi.scale(&rat(n as i64, 1))))
            .collect();
        assert!(asymptotic_fit_check(&values, &psi, 4.0, 2, 0, 50).unwrap());
        let bad: Vec<_> = (10..30)
            .map(|n| (n, f.from_int(n as i64 * n as i64)))
            .collect();
        assert!(!asymptotic_fit_check(&bad, &psi, 4.0, 2, 0, 50).unwrap());
    }
}
