use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, Zero};

use super::ball::{
    approximate_roots, bits_for_digits, certify_radius, eval_rational_poly, newton_refine,
    ComplexBall,
};
use super::qpoly::QPoly;
use super::rational::{format_rational, Rational};
use crate::error::{Error, Result};

const BASE_BITS: u32 = 128;
const MAX_BITS: u32 = 1 << 16;

/// An isolated root of the minimal polynomial.
#[derive(Clone, Debug)]
struct RootDisk {
    /// Exact centre with a radius guaranteed to contain the root.
    ball: ComplexBall,
    /// Larger radius within which no other root lies.
    isolation: BigInt,
    real: bool,
}

/// `Q[x]/(m(x))` for a monic squarefree `m`, with its complex roots isolated.
///
/// Roots are ordered real ones first (descending), then complex ones by real
/// part descending and imaginary part ascending.
#[derive(Debug)]
pub struct NumberField {
    minpoly: QPoly,
    /// `x^(d+k)` reduced to the power basis, for `k = 0..d-1`.
    reduction: Vec<Vec<Rational>>,
    roots: Vec<RootDisk>,
}

impl PartialEq for NumberField {
    fn eq(&self, other: &Self) -> bool {
        self.minpoly == other.minpoly
    }
}

impl Eq for NumberField {}

impl NumberField {
    pub fn new(minpoly: Vec<Rational>) -> Result<Arc<Self>> {
        let m = QPoly::new(minpoly);
        let d = match m.degree() {
            Some(d) if d >= 1 => d,
            _ => {
                return Err(Error::InvalidField(
                    "minimal polynomial has degree < 1".into(),
                ))
            }
        };
        let m = m.monic();
        if m.gcd(&m.derivative()) != QPoly::one() {
            return Err(Error::InvalidField(
                "minimal polynomial is not squarefree".into(),
            ));
        }
        let mut reduction = Vec::with_capacity(d.saturating_sub(1));
        let mut cur = QPoly::new(m.0[..d].iter().map(|c| -c).collect());
        for _ in 0..d.saturating_sub(1) {
            let mut v = cur.0.clone();
            v.resize(d, Rational::zero());
            reduction.push(v);
            cur = cur
                .mul(&QPoly::new(vec![Rational::zero(), Rational::one()]))
                .rem(&m);
        }
        let roots = isolate_roots(&m)?;
        Ok(Arc::new(NumberField {
            minpoly: m,
            reduction,
            roots,
        }))
    }

    pub fn from_ints(minpoly: &[i64]) -> Result<Arc<Self>> {
        Self::new(
            minpoly
                .iter()
                .map(|&c| Rational::from_integer(c.into()))
                .collect(),
        )
    }

    /// The rationals, presented as `Q[x]/(x)`.
    pub fn rationals() -> Arc<Self> {
        static Q: OnceLock<Arc<NumberField>> = OnceLock::new();
        Q.get_or_init(|| NumberField::from_ints(&[0, 1]).unwrap())
            .clone()
    }

    pub fn degree(&self) -> usize {
        self.minpoly.0.len() - 1
    }

    pub fn minpoly(&self) -> &[Rational] {
        &self.minpoly.0
    }

    pub fn is_rational(&self) -> bool {
        self.degree() == 1
    }

    pub fn is_real_root(&self, index: usize) -> Result<bool> {
        self.roots
            .get(index)
            .map(|r| r.real)
            .ok_or(Error::RootIndex {
                index,
                degree: self.degree(),
            })
    }

    /// Double-precision approximations of the ordered roots.
    pub fn root_approximations(&self) -> Vec<Complex64> {
        self.roots.iter().map(|r| r.ball.to_complex64()).collect()
    }

    /// Certified enclosure of root `index` with radius below `2^-bits`-ish.
    pub fn root_ball(&self, index: usize, bits: u32) -> Result<ComplexBall> {
        let disk = self.roots.get(index).ok_or(Error::RootIndex {
            index,
            degree: self.degree(),
        })?;
        if bits <= disk.ball.prec() {
            return Ok(disk.ball.clone());
        }
        let z = newton_refine(&self.minpoly.0, &disk.ball, bits, disk.real);
        let r = certify_radius(&self.minpoly.0, &z).ok_or(Error::PrecisionUnreachable(bits))?;
        let ball = z.with_rad(r);
        if !disk.ball.with_rad(disk.isolation.clone()).contains(&ball) {
            return Err(Error::PrecisionUnreachable(bits));
        }
        Ok(ball)
    }

    /// Index of the root closest to `z` (double precision).
    pub fn nearest_root(&self, z: Complex64) -> usize {
        self.root_approximations()
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - z).norm().total_cmp(&(b.1 - z).norm()))
            .map(|(i, _)| i)
            .unwrap()
    }

    pub fn zero(self: &Arc<Self>) -> FieldElement {
        FieldElement::from_coords(self, vec![Rational::zero(); self.degree()])
    }

    pub fn one(self: &Arc<Self>) -> FieldElement {
        self.from_rational(Rational::one())
    }

    pub fn from_rational(self: &Arc<Self>, q: Rational) -> FieldElement {
        let mut c = vec![Rational::zero(); self.degree()];
        c[0] = q;
        FieldElement::from_coords(self, c)
    }

    pub fn from_int(self: &Arc<Self>, n: i64) -> FieldElement {
        self.from_rational(Rational::from_integer(n.into()))
    }

    /// The class of `x`.
    pub fn generator(self: &Arc<Self>) -> FieldElement {
        if self.degree() == 1 {
            return self.from_rational(-self.minpoly.0[0].clone());
        }
        let mut c = vec![Rational::zero(); self.degree()];
        c[1] = Rational::one();
        FieldElement::from_coords(self, c)
    }

    fn reduce(&self, mut prod: Vec<Rational>) -> Vec<Rational> {
        let d = self.degree();
        if prod.len() > d {
            for k in (d..prod.len()).rev() {
                let c = std::mem::take(&mut prod[k]);
                if c.is_zero() {
                    continue;
                }
                for (j, r) in self.reduction[k - d].iter().enumerate() {
                    if !r.is_zero() {
                        prod[j] += &c * r;
                    }
                }
            }
            prod.truncate(d);
        }
        prod.resize(d, Rational::zero());
        prod
    }
}

impl fmt::Display for NumberField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q[x]/({})", format_qpoly(&self.minpoly.0, "x"))
    }
}

fn isolate_roots(m: &QPoly) -> Result<Vec<RootDisk>> {
    let d = m.degree().unwrap();
    let coeffs = &m.0;
    let approx = approximate_roots(coeffs);
    let scale = approx.iter().fold(1.0f64, |s, z| s.max(z.norm()));
    let mut bits = BASE_BITS;
    while bits <= 1024 {
        let mut centres: Vec<(ComplexBall, bool)> = Vec::with_capacity(d);
        for z in &approx {
            if z.im.abs() <= 1e-7 * scale {
                let start = ComplexBall::from_complex64(Complex64::new(z.re, 0.0), 48);
                centres.push((newton_refine(coeffs, &start, bits, true), true));
            } else if z.im > 0.0 {
                let start = ComplexBall::from_complex64(*z, 48);
                let c = newton_refine(coeffs, &start, bits, false);
                centres.push((c.conj(), false));
                centres.push((c, false));
            }
        }
        if centres.len() == d {
            if let Some(disks) = certify_all(coeffs, centres) {
                return Ok(disks);
            }
        }
        bits *= 2;
    }
    Err(Error::InvalidField(
        "could not isolate the roots of the minimal polynomial".into(),
    ))
}

fn certify_all(coeffs: &[Rational], centres: Vec<(ComplexBall, bool)>) -> Option<Vec<RootDisk>> {
    let d = centres.len();
    let radii: Vec<BigInt> = centres
        .iter()
        .map(|(c, _)| certify_radius(coeffs, c))
        .collect::<Option<_>>()?;
    let mut isolation = vec![None::<BigInt>; d];
    for i in 0..d {
        for j in 0..d {
            if i == j {
                continue;
            }
            let gap = centres[i].0.sub(&centres[j].0).abs_lower_units();
            if gap <= &radii[i] + &radii[j] {
                return None;
            }
            let half: BigInt = gap / 2;
            let cur = isolation[i].get_or_insert_with(|| half.clone());
            if half < *cur {
                *cur = half;
            }
        }
    }
    let mut disks: Vec<RootDisk> = centres
        .into_iter()
        .zip(radii)
        .zip(isolation)
        .map(|(((c, real), r), iso)| {
            let isolation = iso.unwrap_or_else(|| BigInt::one() << (2 * c.prec() as usize));
            RootDisk {
                ball: c.with_rad(r.clone()),
                isolation: isolation.max(r),
                real,
            }
        })
        .collect();
    disks.sort_by(root_order);
    Some(disks)
}

fn root_order(a: &RootDisk, b: &RootDisk) -> Ordering {
    match (a.real, b.real) {
        (true, false) => Ordering::Less,
        (false, true) => Ordering::Greater,
        _ => b
            .ball
            .re_raw()
            .cmp(a.ball.re_raw())
            .then_with(|| a.ball.im_raw().cmp(b.ball.im_raw())),
    }
}

pub(crate) fn format_qpoly(coeffs: &[Rational], var: &str) -> String {
    let mut parts = Vec::new();
    for (i, c) in coeffs.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let mono = match i {
            0 => String::new(),
            1 => var.to_string(),
            _ => format!("{var}^{i}"),
        };
        let mag = c.abs();
        let body = if mono.is_empty() {
            format_rational(&mag)
        } else if mag.is_one() {
            mono
        } else {
            format!("{}*{mono}", format_rational(&mag))
        };
        let neg = c.is_negative();
        if parts.is_empty() {
            parts.push(if neg { format!("-{body}") } else { body });
        } else {
            parts.push(format!("{} {body}", if neg { "-" } else { "+" }));
        }
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" ")
    }
}

/// An element of a number field, in the power basis `1, x, ..., x^(d-1)`.
#[derive(Clone)]
pub struct FieldElement {
    field: Arc<NumberField>,
    coords: Vec<Rational>,
}

impl FieldElement {
    pub fn from_coords(field: &Arc<NumberField>, mut coords: Vec<Rational>) -> Self {
        let d = field.degree();
        if coords.len() > d {
            coords = QPoly::new(coords).rem(&field.minpoly).0;
        }
        coords.resize(d, Rational::zero());
        FieldElement {
            field: field.clone(),
            coords,
        }
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.coords[0].is_one() && self.coords[1..].iter().all(Zero::is_zero)
    }

    pub fn to_rational(&self) -> Option<Rational> {
        self.coords[1..]
            .iter()
            .all(Zero::is_zero)
            .then(|| self.coords[0].clone())
    }

    /// The same value viewed in `field`; only rational values can move.
    pub fn lift_to(&self, field: &Arc<NumberField>) -> FieldElement {
        if Arc::ptr_eq(&self.field, field) || *self.field == **field {
            return FieldElement {
                field: field.clone(),
                coords: self.coords.clone(),
            };
        }
        let q = self
            .to_rational()
            .expect("cannot move an irrational element between number fields");
        field.from_rational(q)
    }

    fn unify(&self, other: &FieldElement) -> Arc<NumberField> {
        if Arc::ptr_eq(&self.field, &other.field) || *self.field == *other.field {
            self.field.clone()
        } else if self.field.is_rational() {
            other.field.clone()
        } else if other.field.is_rational() {
            self.field.clone()
        } else {
            panic!(
                "arithmetic between elements of {} and {}",
                self.field, other.field
            )
        }
    }

    fn coords_in(&self, field: &Arc<NumberField>) -> std::borrow::Cow<'_, [Rational]> {
        if self.field.degree() == field.degree() {
            std::borrow::Cow::Borrowed(&self.coords)
        } else {
            std::borrow::Cow::Owned(self.lift_to(field).coords)
        }
    }

    fn add_ref(&self, other: &FieldElement) -> FieldElement {
        let f = self.unify(other);
        let (a, b) = (self.coords_in(&f), other.coords_in(&f));
        let coords = a.iter().zip(b.iter()).map(|(x, y)| x + y).collect();
        FieldElement { field: f, coords }
    }

    fn sub_ref(&self, other: &FieldElement) -> FieldElement {
        let f = self.unify(other);
        let (a, b) = (self.coords_in(&f), other.coords_in(&f));
        let coords = a.iter().zip(b.iter()).map(|(x, y)| x - y).collect();
        FieldElement { field: f, coords }
    }

    fn mul_ref(&self, other: &FieldElement) -> FieldElement {
        let f = self.unify(other);
        if f.degree() == 1 {
            let coords = vec![&self.coords[0] * &other.coords[0]];
            return FieldElement { field: f, coords };
        }
        if let Some(q) = other.to_rational() {
            return self.lift_to(&f).scale(&q);
        }
        if let Some(q) = self.to_rational() {
            return other.lift_to(&f).scale(&q);
        }
        let d = f.degree();
        let mut prod = vec![Rational::zero(); 2 * d - 1];
        for (i, x) in self.coords.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in other.coords.iter().enumerate() {
                if !y.is_zero() {
                    prod[i + j] += x * y;
                }
            }
        }
        let coords = f.reduce(prod);
        FieldElement { field: f, coords }
    }

    pub fn scale(&self, q: &Rational) -> FieldElement {
        FieldElement {
            field: self.field.clone(),
            coords: self.coords.iter().map(|c| c * q).collect(),
        }
    }

    pub fn inverse(&self) -> Result<FieldElement> {
        if self.is_zero() {
            return Err(Error::ZeroInverse);
        }
        if let Some(q) = self.to_rational() {
            return Ok(self.field.from_rational(q.recip()));
        }
        let (g, s) = QPoly::new(self.coords.clone()).inverse_mod(&self.field.minpoly);
        if g != QPoly::one() {
            return Err(Error::ZeroInverse);
        }
        Ok(FieldElement::from_coords(&self.field, s.0))
    }

    pub fn checked_div(&self, other: &FieldElement) -> Result<FieldElement> {
        Ok(self * &other.inverse()?)
    }

    pub fn pow(&self, k: i64) -> Result<FieldElement> {
        let base = if k < 0 { self.inverse()? } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = self.field.one();
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &b;
            }
            e >>= 1;
            if e > 0 {
                b = &b * &b;
            }
        }
        Ok(acc)
    }

    /// Galois-invariant trace, as the trace of multiplication by `self`.
    pub fn trace(&self) -> Rational {
        let d = self.field.degree();
        let mut t = Rational::zero();
        let mut basis = self.field.one();
        let x = self.field.generator();
        for i in 0..d {
            t += &(self * &basis).coords[i];
            basis = &basis * &x;
        }
        t
    }

    /// Enclosure of the image under root `index` using a supplied root ball.
    pub fn eval_at(&self, root: &ComplexBall) -> ComplexBall {
        if self.field.degree() == 1 {
            return ComplexBall::from_rational(&self.coords[0], root.prec());
        }
        eval_rational_poly(&self.coords, root)
    }

    /// Certified complex ball for the embedding at `root_index`, radius at
    /// most `10^-digits`.
    pub fn embed(&self, root_index: usize, digits: u32) -> Result<ComplexBall> {
        let d = self.field.degree();
        if root_index >= d {
            return Err(Error::RootIndex {
                index: root_index,
                degree: d,
            });
        }
        if digits == 0 {
            return Err(Error::PrecisionUnreachable(0));
        }
        let mut bits = bits_for_digits(digits);
        let size: u64 = self
            .coords
            .iter()
            .map(|c| c.numer().bits() + c.denom().bits())
            .sum();
        bits += size.min(1 << 14) as u32 / 4;
        while bits <= MAX_BITS {
            let root = self.field.root_ball(root_index, bits)?;
            let v = self.eval_at(&root);
            if v.rad_below_pow10(digits) {
                return Ok(v);
            }
            bits *= 2;
        }
        Err(Error::PrecisionUnreachable(digits))
    }
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        if Arc::ptr_eq(&self.field, &other.field) || *self.field == *other.field {
            return self.coords == other.coords;
        }
        match (self.to_rational(), other.to_rational()) {
            (Some(a), Some(b)) if self.field.is_rational() || other.field.is_rational() => a == b,
            _ => false,
        }
    }
}

impl Eq for FieldElement {}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.field.is_rational() {
            return write!(f, "{}", format_rational(&self.coords[0]));
        }
        write!(f, "{}", format_qpoly(&self.coords, "x"))
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $inner:ident) => {
        impl $tr<&FieldElement> for &FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: &FieldElement) -> FieldElement {
                self.$inner(rhs)
            }
        }
        impl $tr<FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: FieldElement) -> FieldElement {
                (&self).$inner(&rhs)
            }
        }
        impl $tr<&FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: &FieldElement) -> FieldElement {
                (&self).$inner(rhs)
            }
        }
        impl $tr<FieldElement> for &FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: FieldElement) -> FieldElement {
                self.$inner(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, add_ref);
forward_binop!(Sub, sub, sub_ref);
forward_binop!(Mul, mul, mul_ref);

impl FieldElement {
    fn div_ref(&self, rhs: &FieldElement) -> FieldElement {
        self.checked_div(rhs)
            .expect("division by zero in a number field")
    }
}

forward_binop!(Div, div, div_ref);

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement {
            field: self.field.clone(),
            coords: self.coords.iter().map(|c| -c).collect(),
        }
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        -&self
    }
}

impl std::iter::Sum for FieldElement {
    fn sum<I: Iterator<Item = FieldElement>>(mut iter: I) -> FieldElement {
        let first = iter
            .next()
            .expect("empty sum of field elements has no field");
        iter.fold(first, |a, b| a + b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactfield::rational::{int, rat};

    fn cubic() -> Arc<NumberField> {
        NumberField::from_ints(&[-1, -1, 0, 1]).unwrap()
    }

    #[test]
    fn inverse_in_q() {
        let q = NumberField::rationals();
        assert!(q.one().inverse().unwrap().is_one());
        assert_eq!(q.from_int(4).inverse().unwrap(), q.from_rational(rat(1, 4)));
        assert_eq!(q.zero().inverse(), Err(Error::ZeroInverse));
    }

    #[test]
    fn inverse_in_cubic_field() {
        let k = cubic();
        let xi = k.generator();
        let inv = xi.inverse().unwrap();
        assert_eq!(inv, &(&xi * &xi) - &k.one());
        assert!((&xi * &inv).is_one());
    }

    #[test]
    fn inverse_of_lambda_in_sqrt21() {
        let k = NumberField::from_ints(&[-21, 0, 1]).unwrap();
        let s = k.generator();
        let lam = (&k.from_int(5) + &s).scale(&rat(1, 2));
        let expected = (&k.from_int(5) - &s).scale(&rat(1, 2));
        assert_eq!(lam.inverse().unwrap(), expected);
    }

    #[test]
    fn root_ordering() {
        let k = NumberField::from_ints(&[-21, 0, 1]).unwrap();
        let r = k.root_approximations();
        assert!((r[0].re - 21f64.sqrt()).abs() < 1e-12);
        let c = cubic();
        let r = c.root_approximations();
        assert!(c.is_real_root(0).unwrap());
        assert!((r[1].re + 0.662359).abs() < 1e-5 && (r[1].im + 0.562280).abs() < 1e-5);
        assert!(r[2].im > 0.0);
    }

    #[test]
    fn embeddings() {
        let k = NumberField::from_ints(&[-21, 0, 1]).unwrap();
        let b = k.one().embed(0, 40).unwrap();
        assert!(b.rad_raw().is_zero());
        assert_eq!(b.re_decimal(5), "1.00000");
        let s = k.generator().embed(0, 30).unwrap();
        assert!(s.rad_below_pow10(30));
        assert!(s
            .re_decimal(28)
            .starts_with("4.5825756949558400065880471937"));
        let xi = cubic().generator().embed(1, 20).unwrap();
        assert!(xi.re_decimal(3) == "-0.662" && xi.im_decimal(3) == "-0.562");
    }

    #[test]
    fn rejects_bad_minpolys() {
        assert!(NumberField::from_ints(&[1, -2, 1]).is_err());
        assert!(NumberField::from_ints(&[3]).is_err());
    }

    #[test]
    fn rational_elements_mix_with_field_elements() {
        let k = cubic();
        let q = NumberField::rationals();
        let a = &k.generator() + &q.from_int(2);
        assert_eq!(a.coords(), &[int(2), int(1), int(0)]);
        assert_eq!(q.from_int(3), k.from_int(3));
    }
}
