//! Fixed-point complex balls over `BigInt`.
//!
//! A ball at precision `p` stores integers `re`, `im`, `rad` and stands for
//! every complex number within `rad * 2^-p` of `(re + i im) * 2^-p`. All
//! rounding is accounted for in `rad`, so results are rigorous enclosures.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexBall {
    re: BigInt,
    im: BigInt,
    rad: BigInt,
    prec: u32,
}

/// Bits needed to represent `digits` decimal digits, plus guard bits.
pub fn bits_for_digits(digits: u32) -> u32 {
    (digits as f64 * std::f64::consts::LOG2_10).ceil() as u32 + 32
}

fn pow2(bits: u32) -> BigInt {
    BigInt::one() << bits as usize
}

/// `x * 2^-prec` as an `f64`, without overflowing on huge `x`.
fn fixed_to_f64(x: &BigInt, prec: u32) -> f64 {
    let bits = x.bits();
    if bits <= 60 {
        return x.to_f64().unwrap() * (-(prec as f64)).exp2();
    }
    let drop = bits - 60;
    let top = (x >> drop as usize).to_f64().unwrap();
    top * (drop as f64 - prec as f64).exp2()
}

/// `round(x * 10^digits / 2^prec)` rendered with a decimal point.
fn fixed_to_decimal(x: &BigInt, prec: u32, digits: usize) -> String {
    let scaled = x.abs() * BigInt::from(10u32).pow(digits as u32);
    let half = pow2(prec) >> 1usize;
    let q: BigInt = (scaled + half) >> prec as usize;
    let mut s = q.to_string();
    if s.len() <= digits {
        s = "0".repeat(digits + 1 - s.len()) + &s;
    }
    let (int_part, frac) = s.split_at(s.len() - digits);
    let sign = if x.is_negative() && !q.is_zero() {
        "-"
    } else {
        ""
    };
    if digits == 0 {
        format!("{sign}{int_part}")
    } else {
        format!("{sign}{int_part}.{frac}")
    }
}

/// Ceiling of `x / 2^bits` for nonnegative `x`.
fn shr_ceil(x: &BigInt, bits: u32) -> BigInt {
    let mask = pow2(bits) - 1;
    let q: BigInt = x >> bits as usize;
    let low: BigInt = x & mask;
    if low.is_zero() {
        q
    } else {
        q + 1
    }
}

impl ComplexBall {
    pub fn zero(prec: u32) -> Self {
        ComplexBall {
            re: BigInt::zero(),
            im: BigInt::zero(),
            rad: BigInt::zero(),
            prec,
        }
    }

    pub fn one(prec: u32) -> Self {
        Self::from_rational(&Rational::one(), prec)
    }

    pub fn from_parts(re: BigInt, im: BigInt, rad: BigInt, prec: u32) -> Self {
        ComplexBall { re, im, rad, prec }
    }

    pub fn from_rational(q: &Rational, prec: u32) -> Self {
        let scaled = q.numer() << prec as usize;
        let (re, r) = scaled.div_mod_floor(q.denom());
        let rad = if r.is_zero() {
            BigInt::zero()
        } else {
            BigInt::one()
        };
        ComplexBall {
            re,
            im: BigInt::zero(),
            rad,
            prec,
        }
    }

    /// Exact ball around a double-precision complex number (rounded to the grid).
    pub fn from_complex64(z: Complex64, prec: u32) -> Self {
        let conv = |x: f64| -> BigInt {
            let r = Rational::from_float(x).unwrap_or_else(Rational::zero);
            (r.numer() << prec as usize).div_floor(r.denom())
        };
        ComplexBall {
            re: conv(z.re),
            im: conv(z.im),
            rad: BigInt::zero(),
            prec,
        }
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn re_raw(&self) -> &BigInt {
        &self.re
    }

    pub fn im_raw(&self) -> &BigInt {
        &self.im
    }

    pub fn rad_raw(&self) -> &BigInt {
        &self.rad
    }

    pub fn center(&self) -> Self {
        ComplexBall {
            rad: BigInt::zero(),
            ..self.clone()
        }
    }

    pub fn with_rad(&self, rad: BigInt) -> Self {
        ComplexBall {
            rad,
            ..self.clone()
        }
    }

    /// Re-expresses the ball at another precision, widening as needed.
    pub fn set_prec(&self, prec: u32) -> Self {
        match prec.cmp(&self.prec) {
            Ordering::Equal => self.clone(),
            Ordering::Greater => {
                let s = (prec - self.prec) as usize;
                ComplexBall {
                    re: &self.re << s,
                    im: &self.im << s,
                    rad: &self.rad << s,
                    prec,
                }
            }
            Ordering::Less => {
                let s = self.prec - prec;
                ComplexBall {
                    re: &self.re >> s as usize,
                    im: &self.im >> s as usize,
                    rad: shr_ceil(&self.rad, s) + 2,
                    prec,
                }
            }
        }
    }

    pub fn to_complex64(&self) -> Complex64 {
        Complex64::new(
            fixed_to_f64(&self.re, self.prec),
            fixed_to_f64(&self.im, self.prec),
        )
    }

    pub fn rad_f64(&self) -> f64 {
        fixed_to_f64(&self.rad, self.prec)
    }

    /// True when the radius is at most `10^-digits`.
    pub fn rad_below_pow10(&self, digits: u32) -> bool {
        &self.rad * BigInt::from(10u32).pow(digits) <= pow2(self.prec)
    }

    pub fn re_decimal(&self, digits: usize) -> String {
        fixed_to_decimal(&self.re, self.prec, digits)
    }

    pub fn im_decimal(&self, digits: usize) -> String {
        fixed_to_decimal(&self.im, self.prec, digits)
    }

    fn mag_upper_units(&self) -> BigInt {
        self.re.abs() + self.im.abs()
    }

    fn norm_floor_units(&self) -> BigInt {
        (&self.re * &self.re + &self.im * &self.im).sqrt()
    }

    /// Upper bound of the modulus over the ball, in units of `2^-prec`.
    pub fn abs_upper_units(&self) -> BigInt {
        self.norm_floor_units() + 1 + &self.rad
    }

    /// Lower bound of the modulus over the ball, in units of `2^-prec`.
    pub fn abs_lower_units(&self) -> BigInt {
        let l = self.norm_floor_units() - &self.rad;
        if l.is_negative() {
            BigInt::zero()
        } else {
            l
        }
    }

    pub fn abs_upper_f64(&self) -> f64 {
        fixed_to_f64(&self.abs_upper_units(), self.prec)
    }

    pub fn abs_lower_f64(&self) -> f64 {
        fixed_to_f64(&self.abs_lower_units(), self.prec)
    }

    pub fn contains_zero(&self) -> bool {
        self.abs_lower_units().is_zero()
    }

    pub fn meets_real_axis(&self) -> bool {
        self.im.abs() <= self.rad
    }

    /// Certified comparison of the modulus against 1, `None` if undecided.
    pub fn cmp_abs_one(&self) -> Option<Ordering> {
        let one = pow2(self.prec);
        if self.abs_lower_units() > one {
            Some(Ordering::Greater)
        } else if self.abs_upper_units() < one {
            Some(Ordering::Less)
        } else {
            None
        }
    }

    /// Whether `other` lies entirely inside `self`.
    pub fn contains(&self, other: &Self) -> bool {
        let o = other.set_prec(self.prec);
        let d = ComplexBall {
            re: &self.re - &o.re,
            im: &self.im - &o.im,
            rad: BigInt::zero(),
            prec: self.prec,
        };
        d.abs_upper_units() + &o.rad <= self.rad
    }

    pub fn overlaps(&self, other: &Self) -> bool {
        let o = other.set_prec(self.prec);
        let d = ComplexBall {
            re: &self.re - &o.re,
            im: &self.im - &o.im,
            rad: BigInt::zero(),
            prec: self.prec,
        };
        d.abs_lower_units() <= &self.rad + &o.rad + 1
    }

    /// Both operands at the finer of the two precisions.
    fn aligned(&self, other: &Self) -> Option<(Self, Self)> {
        (self.prec != other.prec).then(|| {
            let p = self.prec.max(other.prec);
            (self.set_prec(p), other.set_prec(p))
        })
    }

    pub fn add(&self, other: &Self) -> Self {
        if let Some((a, b)) = self.aligned(other) {
            return a.add(&b);
        }
        ComplexBall {
            re: &self.re + &other.re,
            im: &self.im + &other.im,
            rad: &self.rad + &other.rad,
            prec: self.prec,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        ComplexBall {
            re: -&self.re,
            im: -&self.im,
            rad: self.rad.clone(),
            prec: self.prec,
        }
    }

    pub fn conj(&self) -> Self {
        ComplexBall {
            im: -&self.im,
            ..self.clone()
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if let Some((a, b)) = self.aligned(other) {
            return a.mul(&b);
        }
        let p = self.prec as usize;
        let pr = &self.re * &other.re - &self.im * &other.im;
        let pi = &self.re * &other.im + &self.im * &other.re;
        let mask = pow2(self.prec) - 1;
        let exact = (&pr & &mask).is_zero() && (&pi & &mask).is_zero();
        let mut rad = BigInt::zero();
        if !self.rad.is_zero() || !other.rad.is_zero() {
            let err = self.mag_upper_units() * &other.rad
                + other.mag_upper_units() * &self.rad
                + &self.rad * &other.rad;
            rad = shr_ceil(&err, self.prec);
        }
        if !exact {
            rad += 2;
        }
        ComplexBall {
            re: pr >> p,
            im: pi >> p,
            rad,
            prec: self.prec,
        }
    }

    pub fn mul_rational(&self, q: &Rational) -> Self {
        self.mul(&Self::from_rational(q, self.prec))
    }

    /// Reciprocal, or `None` if the ball may contain zero.
    pub fn inv(&self) -> Option<Self> {
        let n2 = &self.re * &self.re + &self.im * &self.im;
        let c = n2.sqrt();
        if c <= self.rad || n2.is_zero() {
            return None;
        }
        let two_p = 2 * self.prec as usize;
        let re = (&self.re << two_p).div_floor(&n2);
        let im = (-&self.im << two_p).div_floor(&n2);
        let mut rad = BigInt::from(2);
        if !self.rad.is_zero() {
            let num = &self.rad << two_p;
            let den = &c * (&c - &self.rad);
            rad += num.div_ceil(&den);
        }
        Some(ComplexBall {
            re,
            im,
            rad,
            prec: self.prec,
        })
    }

    pub fn div(&self, other: &Self) -> Option<Self> {
        other.inv().map(|i| self.mul(&i))
    }

    pub fn pow(&self, mut k: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.prec);
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Integer power, negative exponents via the reciprocal.
    pub fn powi(&self, k: i64) -> Option<Self> {
        let p = self.pow(k.unsigned_abs());
        if k < 0 {
            p.inv()
        } else {
            Some(p)
        }
    }

    /// Sign of the real part of the centre.
    pub fn re_sign(&self) -> Sign {
        self.re.sign()
    }

    /// `exp(2 pi i k / n)`, certified.
    pub fn root_of_unity(k: i64, n: u64, prec: u32) -> Self {
        let k = k.rem_euclid(n as i64) as u64;
        if k == 0 {
            return Self::one(prec);
        }
        if 2 * k == n {
            return Self::one(prec).neg();
        }
        if 4 * k == n || 4 * k == 3 * n {
            let s = if 4 * k == n { 1 } else { -1 };
            return ComplexBall {
                re: BigInt::zero(),
                im: BigInt::from(s) << prec as usize,
                rad: BigInt::zero(),
                prec,
            };
        }
        let theta = std::f64::consts::TAU * k as f64 / n as f64;
        let guess = Complex64::from_polar(1.0, theta);
        // Newton on z^n - 1, then certify with the degree-n root bound.
        let mut coeffs = vec![Rational::zero(); n as usize + 1];
        coeffs[0] = -Rational::one();
        coeffs[n as usize] = Rational::one();
        let z = newton_refine(
            &coeffs,
            &ComplexBall::from_complex64(guess, 48),
            prec,
            false,
        );
        let r = certify_radius(&coeffs, &z).expect("root of unity certification");
        z.with_rad(r)
    }
}

impl fmt::Display for ComplexBall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(20);
        let re = self.re_decimal(digits);
        let im = self.im_decimal(digits);
        if im.starts_with('-') {
            write!(f, "{re} - {}i", &im[1..])
        } else {
            write!(f, "{re} + {im}i")
        }?;
        write!(f, " +/- {:.1e}", self.rad_f64())
    }
}

/// Horner evaluation of a rational polynomial (constant term first).
pub fn eval_rational_poly(coeffs: &[Rational], z: &ComplexBall) -> ComplexBall {
    coeffs
        .iter()
        .rev()
        .fold(ComplexBall::zero(z.prec), |acc, c| {
            acc.mul(z).add(&ComplexBall::from_rational(c, z.prec))
        })
}

fn derivative(coeffs: &[Rational]) -> Vec<Rational> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * Rational::from_integer(BigInt::from(i)))
        .collect()
}

/// Newton iteration on a rational polynomial from `start`, doubling the
/// working precision until `prec` bits. Returns an exact centre.
pub fn newton_refine(
    coeffs: &[Rational],
    start: &ComplexBall,
    prec: u32,
    real: bool,
) -> ComplexBall {
    let dcoeffs = derivative(coeffs);
    let mut p = start.prec.clamp(32, prec);
    let mut z = start.set_prec(p).center();
    if real {
        z.im = BigInt::zero();
    }
    loop {
        let target = (2 * p).min(prec);
        let work = target + 16;
        z = z.set_prec(work).center();
        for _ in 0..3 {
            let f = eval_rational_poly(coeffs, &z).center();
            let df = eval_rational_poly(&dcoeffs, &z).center();
            let Some(step) = f.div(&df) else { break };
            z = z.sub(&step).center();
            if real {
                z.im = BigInt::zero();
            }
        }
        p = target;
        if p >= prec {
            return z.set_prec(prec).center();
        }
    }
}

/// Radius (in units) of a disk around the exact centre `z` that contains a
/// root: `deg * |p(z)| / |p'(z)|`.
pub fn certify_radius(coeffs: &[Rational], z: &ComplexBall) -> Option<BigInt> {
    let deg = coeffs.len() - 1;
    let f = eval_rational_poly(coeffs, z);
    let df = eval_rational_poly(&derivative(coeffs), z);
    let lower = df.abs_lower_units();
    if lower.is_zero() {
        return None;
    }
    let num = (f.abs_upper_units() * BigInt::from(deg)) << z.prec as usize;
    Some(num.div_ceil(&lower))
}

/// Durand-Kerner in double precision; good enough as a seed for Newton.
pub fn approximate_roots(coeffs: &[Rational]) -> Vec<Complex64> {
    let deg = coeffs.len() - 1;
    let lead = coeffs[deg].to_f64().unwrap();
    let c: Vec<f64> = coeffs.iter().map(|q| q.to_f64().unwrap() / lead).collect();
    let eval = |z: Complex64| {
        c.iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |a, &k| a * z + k)
    };
    let seed = Complex64::new(0.4, 0.9);
    let mut z: Vec<Complex64> = (0..deg).map(|i| seed.powu(i as u32)).collect();
    for _ in 0..2000 {
        let mut delta = 0.0f64;
        for i in 0..deg {
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..deg {
                if i != j {
                    den *= z[i] - z[j];
                }
            }
            if den.norm() == 0.0 {
                z[i] += Complex64::new(1e-8, 1e-8);
                continue;
            }
            let step = eval(z[i]) / den;
            z[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-15 {
            break;
        }
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactfield::rational::{int, rat};

    #[test]
    fn rational_balls_are_exact_when_dyadic() {
        let b = ComplexBall::from_rational(&rat(3, 4), 64);
        assert!(b.rad_raw().is_zero());
        assert_eq!(b.re_decimal(3), "0.750");
        let c = ComplexBall::from_rational(&rat(1, 3), 64);
        assert_eq!(c.rad_raw(), &BigInt::one());
    }

    #[test]
    fn inverse_encloses() {
        let z = ComplexBall::from_rational(&rat(1, 3), 200);
        let w = z.inv().unwrap();
        let three = ComplexBall::from_rational(&int(3), 200);
        assert!(w.overlaps(&three));
        assert!(w.rad_below_pow10(50));
    }

    #[test]
    fn roots_of_unity_close_the_circle() {
        let prec = 256;
        for n in [3u64, 5, 7, 12] {
            for k in 0..n as i64 {
                let w = ComplexBall::root_of_unity(k, n, prec);
                let p = w.pow(n);
                assert!(p.overlaps(&ComplexBall::one(prec)), "n={n} k={k}");
                assert!(w.rad_below_pow10(60));
            }
        }
        let w = ComplexBall::root_of_unity(1, 6, 128).to_complex64();
        assert!((w.re - 0.5).abs() < 1e-15 && (w.im - 0.75f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn sqrt21_to_thirty_digits() {
        let coeffs = vec![int(-21), int(0), int(1)];
        let start = ComplexBall::from_complex64(Complex64::new(4.5, 0.0), 48);
        let z = newton_refine(&coeffs, &start, 160, true);
        let r = certify_radius(&coeffs, &z).unwrap();
        let b = z.with_rad(r);
        assert!(b.rad_below_pow10(30));
        assert!(b
            .re_decimal(28)
            .starts_with("4.5825756949558400065880471937"));
    }

    #[test]
    fn durand_kerner_finds_cubic_roots() {
        let roots = approximate_roots(&[int(-1), int(-1), int(0), int(1)]);
        assert!(roots.iter().any(|z| (z.re - 1.324718).abs() < 1e-6));
        assert!(roots
            .iter()
            .any(|z| (z.re + 0.662359).abs() < 1e-6 && (z.im + 0.562280).abs() < 1e-6));
    }
}
