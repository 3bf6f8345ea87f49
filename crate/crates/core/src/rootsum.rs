//! Exact sums over roots of unity.
//!
//! `Av_n(f) = sum_{w^n = 1} f(w)` is computed in the ring `K[t]/(t^n - 1)`,
//! which is the algebra generated by the n x n cyclic shift. Inverting the
//! denominator there is one extended gcd, and the trace of multiplication by
//! `g` is `n` times the constant coefficient of `g mod (t^n - 1)`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::exactfield::{bits_for_digits, ComplexBall, FieldElement, NumberField};
use crate::laurent::{LaurentPolynomial, Poly, RationalFunction};

/// Coefficients `g_0..g_{n-1}` of the polynomial agreeing with `f` at every
/// n-th root of unity, i.e. `f mod (t^n - 1)`.
pub fn reduce_mod_cyclic(f: &RationalFunction, n: u64) -> Result<Vec<FieldElement>> {
    if n == 0 {
        return Err(Error::Dimension("n must be positive".into()));
    }
    let field = f.field().clone();
    let m = n as usize;
    let num = Poly::new(&field, f.numerator().fold(m));
    let den = f.den_poly();
    let g = if den.degree() == Some(0) {
        num.scale(&den.coeff(0).inverse()?)
    } else {
        let cyc = Poly::cyclic(&field, m);
        let (g, s) = den.inverse_mod(&cyc);
        if g.degree() != Some(0) {
            return Err(Error::RootOfUnityPole(n));
        }
        num.mul(&s).rem(&cyc)
    };
    Ok((0..m).map(|i| g.coeff(i)).collect())
}

/// `sum_{t^n = 1} f(t)`.
pub fn av_exact(f: &RationalFunction, n: u64) -> Result<FieldElement> {
    if n == 0 {
        return Err(Error::Dimension("n must be positive".into()));
    }
    let field = f.field().clone();
    let m = n as usize;
    let den = f.den_poly();
    let s = if den.degree() == Some(0) {
        vec![den.coeff(0).inverse()?]
    } else {
        let (g, s) = den.inverse_mod(&Poly::cyclic(&field, m));
        if g.degree() != Some(0) {
            return Err(Error::RootOfUnityPole(n));
        }
        s.coeffs().to_vec()
    };
    // constant coefficient of num * s mod (t^n - 1)
    let num = f.numerator().fold(m);
    let mut acc = field.zero();
    for (i, c) in num.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        if let Some(x) = s.get((m - i) % m) {
            acc = &acc + &(c * x);
        }
    }
    Ok(acc.scale(&crate::exactfield::int(n as i64)))
}

/// `sum_{t^n = 1} p(t)`, which is `n` times the sum of coefficients at
/// exponents divisible by `n`.
pub fn av_laurent(p: &LaurentPolynomial, n: u64) -> FieldElement {
    let field = p.field().clone();
    let s = p
        .terms()
        .filter(|(k, _)| k.rem_euclid(n as i64) == 0)
        .fold(field.zero(), |acc, (_, c)| &acc + c);
    s.scale(&crate::exactfield::int(n as i64))
}

/// Complex enclosure of `Av_n(f)` by direct summation, coefficients embedded
/// through the given root of the coefficient field.
pub fn av_numeric(
    f: &RationalFunction,
    n: u64,
    root_index: usize,
    digits: u32,
) -> Result<ComplexBall> {
    let bits = bits_for_digits(digits) + 16;
    let root = f.field().root_ball(root_index, bits)?;
    let mut acc = ComplexBall::zero(bits);
    for k in 0..n {
        let w = ComplexBall::root_of_unity(k as i64, n, bits);
        let v = f.eval_ball(&root, &w).ok_or(Error::RootOfUnityPole(n))?;
        acc = acc.add(&v);
    }
    Ok(acc)
}

/// `N_n(delta) = prod_{w^n = 1} delta(w)`.
pub fn cyclic_resultant(delta: &LaurentPolynomial, n: u64) -> FieldElement {
    let field = delta.field().clone();
    if delta.is_zero() {
        return field.zero();
    }
    let (low, p) = delta.to_poly();
    let r = Poly::cyclic(&field, n as usize).resultant(&p);
    // prod w = (-1)^(n-1)
    if n.is_multiple_of(2) && low.rem_euclid(2) == 1 {
        -r
    } else {
        r
    }
}

/// Polynomials in `x` with coefficients in `Q(lambda)`, indexed by power of `x`.
type SymbolicPoly = Vec<RationalFunction>;

fn lam(q: &Arc<NumberField>, k: i64) -> RationalFunction {
    RationalFunction::from_laurent(LaurentPolynomial::t_pow(q, k))
}

/// Rows `k = 1..=kmax` of the symbolic power-sum table, `table[k-1][j]`
/// being the coefficient of `1/(1 - lambda^n)^j` as a polynomial in `x = n`.
fn symbolic_alpha(kmax: usize) -> Vec<Vec<SymbolicPoly>> {
    let q = NumberField::rationals();
    let zero = RationalFunction::zero(&q);
    // lambda^2 - 1
    let l2m1 = RationalFunction::from_laurent(LaurentPolynomial::from_ints(&q, 0, &[-1, 0, 1]));
    let base = lam(&q, 1).div(&l2m1).unwrap();
    let mut rows = vec![vec![
        vec![zero.clone(), base.neg()],
        vec![zero.clone(), base.scale(&q.from_int(2))],
    ]];
    let lam_inv = lam(&q, -1);
    // k (1 - lambda^-2)
    let one_minus =
        RationalFunction::from_laurent(LaurentPolynomial::from_ints(&q, -2, &[-1, 0, 1]));
    for k in 1..kmax {
        let prev = &rows[k - 1];
        let divisor = one_minus.scale(&q.from_int(k as i64)).inv().unwrap();
        let mut next = Vec::with_capacity(k + 2);
        for j in 0..=k + 1 {
            let mut c = vec![zero.clone(); k + 2];
            if let Some(a) = prev.get(j) {
                for (e, coef) in a.iter().enumerate() {
                    c[e] = c[e].add(&coef.derivative());
                    // - j x lambda^-1 alpha_{k,j}
                    let t = coef.mul(&lam_inv).scale(&q.from_int(-(j as i64)));
                    c[e + 1] = c[e + 1].add(&t);
                }
            }
            if j >= 1 {
                if let Some(a) = prev.get(j - 1) {
                    for (e, coef) in a.iter().enumerate() {
                        let t = coef.mul(&lam_inv).scale(&q.from_int(j as i64 - 1));
                        c[e + 1] = c[e + 1].add(&t);
                    }
                }
            }
            next.push(c.iter().map(|x| x.mul(&divisor)).collect());
        }
        rows.push(next);
    }
    rows
}

fn check_lambda(lambda: &FieldElement) -> Result<()> {
    if lambda.is_zero() {
        return Err(Error::ZeroInverse);
    }
    if (lambda * lambda).is_one() {
        return Err(Error::ResonantRoot);
    }
    Ok(())
}

fn eval_symbolic(p: &SymbolicPoly, lambda: &FieldElement) -> Result<LaurentPolynomial> {
    let mut terms = Vec::with_capacity(p.len());
    for (e, c) in p.iter().enumerate() {
        if !c.is_zero() {
            terms.push((e as i64, c.eval(lambda).map_err(|_| Error::ResonantRoot)?));
        }
    }
    Ok(LaurentPolynomial::from_terms(lambda.field(), terms))
}

/// The table `alpha[k][j](x)` for `k = 0..=kmax`, so that
/// `sum_{t^n=1} delta(t)^-k = sum_j alpha[k][j](n) / (1 - lambda^n)^j` with
/// `delta = t - (lambda + 1/lambda) + 1/t`. Row 0 is `[x]`.
pub fn alpha_table(lambda: &FieldElement, kmax: usize) -> Result<Vec<Vec<LaurentPolynomial>>> {
    check_lambda(lambda)?;
    let field = lambda.field();
    let mut out = vec![vec![LaurentPolynomial::t_pow(field, 1)]];
    for row in symbolic_alpha(kmax.max(1)).iter().take(kmax) {
        out.push(
            row.iter()
                .map(|p| eval_symbolic(p, lambda))
                .collect::<Result<_>>()?,
        );
    }
    Ok(out)
}

/// The polynomials `alpha_{k,0..=k}` of the power sum of `1/delta^k`.
pub fn delta_power_sums(lambda: &FieldElement, k: usize) -> Result<Vec<LaurentPolynomial>> {
    Ok(alpha_table(lambda, k)?.pop().unwrap())
}

/// Evaluates `sum_j alpha_j(n) u^j` with `u = 1/(1 - lambda^n)`.
pub fn eval_power_sum(
    alphas: &[LaurentPolynomial],
    lambda: &FieldElement,
    n: u64,
) -> Result<FieldElement> {
    let field = lambda.field();
    let u = (&field.one() - &lambda.pow(n as i64)?).inverse()?;
    let x = field.from_int(n as i64);
    let mut acc = field.zero();
    let mut up = field.one();
    for a in alphas {
        acc = &acc + &(&a.eval(&x)? * &up);
        up = &up * &u;
    }
    Ok(acc)
}

/// Inverse of the lower-triangular table from [`alpha_table`], with `x`
/// replaced by `y = 1/x`: `beta[k][i](y)` satisfies
/// `1/(1 - lambda^n)^k = sum_{t^n=1} sum_i beta[k][i](1/n) / delta(t)^i`.
pub fn delta_basis_inverse(
    lambda: &FieldElement,
    kmax: usize,
) -> Result<Vec<Vec<LaurentPolynomial>>> {
    let a = alpha_table(lambda, kmax)?;
    let field = lambda.field();
    let size = kmax + 1;
    let mut inv: Vec<Vec<LaurentPolynomial>> =
        vec![vec![LaurentPolynomial::zero(field); size]; size];
    for k in 0..size {
        let diag = &a[k][k];
        // diagonal entries are monomials in x
        let (e, c) = match (diag.len(), diag.terms().next()) {
            (1, Some((e, c))) => (e, c.clone()),
            _ => return Err(Error::ResonantRoot),
        };
        let diag_inv = LaurentPolynomial::monomial(c.inverse()?, -e);
        inv[k][k] = diag_inv.clone();
        for i in 0..k {
            let mut s = LaurentPolynomial::zero(field);
            for j in i..k {
                s = s.add(&a[k][j].mul(&inv[j][i]));
            }
            inv[k][i] = s.mul(&diag_inv).neg();
        }
    }
    let beta = inv
        .into_iter()
        .map(|row| {
            row.into_iter()
                .map(|p| p.invert_variable())
                .collect::<Vec<_>>()
        })
        .collect::<Vec<_>>();
    for p in beta.iter().flatten() {
        if p.low().is_some_and(|l| l < 0) {
            return Err(Error::RecursionMismatch(
                p.low().unwrap().unsigned_abs() as usize
            ));
        }
    }
    Ok(beta)
}

/// Summand `T_0 / prod (1 - c_i T_i)` over the n-torus in `d` variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorusSumSpec {
    pub d: usize,
    pub t0: Vec<i64>,
    /// `T_1, ..., T_s`; the first `d` must be the coordinate monomials.
    pub monomials: Vec<Vec<i64>>,
    pub constants: Vec<FieldElement>,
}

impl TorusSumSpec {
    pub fn new(
        d: usize,
        t0: Vec<i64>,
        monomials: Vec<Vec<i64>>,
        constants: Vec<FieldElement>,
    ) -> Result<Self> {
        let spec = TorusSumSpec {
            d,
            t0,
            monomials,
            constants,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn s(&self) -> usize {
        self.monomials.len()
    }

    pub fn field(&self) -> Arc<NumberField> {
        crate::laurent::poly::widest_field(&NumberField::rationals(), self.constants.iter())
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Dimension(m.into()));
        if self.monomials.len() != self.constants.len() || self.monomials.len() < self.d {
            return bad("need s >= d monomials with one constant each");
        }
        if self.t0.len() != self.d || self.monomials.iter().any(|m| m.len() != self.d) {
            return bad("exponent vectors must have length d");
        }
        for (i, m) in self.monomials.iter().enumerate() {
            if i < self.d {
                if m.iter().enumerate().any(|(j, &e)| e != i64::from(i == j)) {
                    return bad("T_i must equal t_i for i <= d");
                }
            } else if m.iter().any(|e| e.abs() > 1) {
                return bad("exponents of T_(d+1..s) must be in {0, 1, -1}");
            }
        }
        if self.constants.iter().any(FieldElement::is_zero) {
            return bad("constants must be nonzero");
        }
        Ok(())
    }
}

/// Exact `sum_{t_1^n = ... = t_d^n = 1} T_0 / prod (1 - c_i T_i)` by expanding
/// each factor as `sum_{k<n} (c_i T_i)^k / (1 - c_i^n)`.
pub fn torus_sum_oracle(spec: &TorusSumSpec, n: u64) -> Result<FieldElement> {
    spec.validate()?;
    let field = spec.field();
    let (d, s) = (spec.d, spec.s());
    let nn = n as i64;
    let mut scale = field.from_int(nn).pow(d as i64)?;
    let mut powers = Vec::with_capacity(s);
    for c in &spec.constants {
        let pw: Vec<FieldElement> = std::iter::successors(Some(field.one()), |p| Some(p * c))
            .take(n as usize + 1)
            .collect();
        let denom = &field.one() - &pw[n as usize];
        if denom.is_zero() {
            return Err(Error::PoleOnTorus(n));
        }
        scale = &scale * &denom.inverse()?;
        powers.push(pw);
    }
    let free = s - d;
    let mut acc = field.zero();
    let mut k = vec![0i64; free];
    loop {
        let mut term = field.one();
        for (idx, &ki) in k.iter().enumerate() {
            term = &term * &powers[d + idx][ki as usize];
        }
        for j in 0..d {
            let mut e = spec.t0[j];
            for (idx, &ki) in k.iter().enumerate() {
                e += ki * spec.monomials[d + idx][j];
            }
            term = &term * &powers[j][(-e).rem_euclid(nn) as usize];
        }
        acc = &acc + &term;
        // odometer
        let mut pos = 0;
        while pos < free {
            k[pos] += 1;
            if k[pos] < nn {
                break;
            }
            k[pos] = 0;
            pos += 1;
        }
        if pos == free {
            break;
        }
    }
    Ok(&acc * &scale)
}

/// Complex enclosure of the torus sum by direct summation over all `n^d` points.
pub fn torus_sum_numeric(
    spec: &TorusSumSpec,
    n: u64,
    root_index: usize,
    digits: u32,
) -> Result<ComplexBall> {
    spec.validate()?;
    let bits = bits_for_digits(digits) + 16;
    let root = spec.field().root_ball(root_index, bits)?;
    let consts: Vec<ComplexBall> = spec.constants.iter().map(|c| c.eval_at(&root)).collect();
    let omegas: Vec<ComplexBall> = (0..n)
        .map(|k| ComplexBall::root_of_unity(k as i64, n, bits))
        .collect();
    let nn = n as i64;
    let monomial = |exps: &[i64], pt: &[i64]| {
        let e: i64 = exps.iter().zip(pt).map(|(a, b)| a * b).sum();
        omegas[e.rem_euclid(nn) as usize].clone()
    };
    let mut acc = ComplexBall::zero(bits);
    let mut pt = vec![0i64; spec.d];
    loop {
        let mut den = ComplexBall::one(bits);
        for (m, c) in spec.monomials.iter().zip(&consts) {
            den = den.mul(&ComplexBall::one(bits).sub(&c.mul(&monomial(m, &pt))));
        }
        let v = monomial(&spec.t0, &pt)
            .div(&den)
            .ok_or(Error::PoleOnTorus(n))?;
        acc = acc.add(&v);
        let mut pos = 0;
        while pos < spec.d {
            pt[pos] += 1;
            if pt[pos] < nn {
                break;
            }
            pt[pos] = 0;
            pos += 1;
        }
        if pos == spec.d {
            break;
        }
    }
    Ok(acc)
}

/// A polynomial `p(x_1..x_s, y)` of `x_i`-degree at most 1 and `y`-degree at
/// most `s - d`, fitted so that the torus sum equals `n^d p(1/(1-c_i^n), n)`.
#[derive(Clone, Debug)]
pub struct TorusFit {
    pub spec: TorusSumSpec,
    /// Coefficient of `prod_{i in mask} x_i * y^e` at `mask * (s-d+1) + e`.
    pub coeffs: Vec<FieldElement>,
    pub window: Vec<u64>,
}

fn fit_basis(spec: &TorusSumSpec, n: u64) -> Result<Vec<FieldElement>> {
    let field = spec.field();
    let xs: Vec<FieldElement> = spec
        .constants
        .iter()
        .map(|c| {
            (&field.one() - &c.pow(n as i64)?)
                .inverse()
                .map_err(|_| Error::PoleOnTorus(n))
        })
        .collect::<Result<_>>()?;
    let ydeg = spec.s() - spec.d;
    let y = field.from_int(n as i64);
    let mut row = Vec::with_capacity((1 << spec.s()) * (ydeg + 1));
    for mask in 0..1usize << spec.s() {
        let mut m = field.one();
        for (i, x) in xs.iter().enumerate() {
            if mask >> i & 1 == 1 {
                m = &m * x;
            }
        }
        for _ in 0..=ydeg {
            row.push(m.clone());
            m = &m * &y;
        }
    }
    Ok(row)
}

impl TorusFit {
    pub fn unknowns(spec: &TorusSumSpec) -> usize {
        (1 << spec.s()) * (spec.s() - spec.d + 1)
    }

    /// Solves for the coefficients from exactly [`TorusFit::unknowns`] values of `n`.
    pub fn fit(spec: &TorusSumSpec, window: &[u64]) -> Result<Self> {
        let u = Self::unknowns(spec);
        if window.len() < u {
            return Err(Error::NotEnoughValues {
                needed: u,
                got: window.len(),
            });
        }
        let window = window[..u].to_vec();
        let field = spec.field();
        let mut rows = Vec::with_capacity(u);
        let mut rhs = Vec::with_capacity(u);
        for &n in &window {
            rows.push(fit_basis(spec, n)?);
            let nd = field.from_int(n as i64).pow(spec.d as i64)?;
            rhs.push(&torus_sum_oracle(spec, n)? * &nd.inverse()?);
        }
        let m = crate::linalg::FieldMatrix::from_rows(&field, rows)?;
        let coeffs = m.solve_vec(&rhs).map_err(|_| Error::SingularSystem)?;
        Ok(TorusFit {
            spec: spec.clone(),
            coeffs,
            window,
        })
    }

    pub fn predict(&self, n: u64) -> Result<FieldElement> {
        let row = fit_basis(&self.spec, n)?;
        let field = self.spec.field();
        let p = row
            .iter()
            .zip(&self.coeffs)
            .fold(field.zero(), |acc, (a, b)| &acc + &(a * b));
        Ok(&p * &field.from_int(n as i64).pow(self.spec.d as i64)?)
    }
}
