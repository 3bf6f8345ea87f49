//! Seeded property suites behind `looptool verify`.

use std::collections::BTreeMap;
use std::sync::Arc;

use looptool::circulant::{block_diagonalize_check, BlockCirculant};
use looptool::exactfield::{rat, FieldElement, NumberField, Rational};
use looptool::feynman::{
    small_multigraphs, weight_direct, weight_flow, FeynmanDiagram, Propagators, VertexFactorTable,
};
use looptool::fixtures::knot41;
use looptool::laurent::{LaurentMatrix, LaurentPolynomial, RatMatrix, RationalFunction};
use looptool::linalg::FieldMatrix;
use looptool::powersum::{
    cover_monomials, delta_form_at, quad_to_delta_form, reconstruct_p, CoverPolynomial,
};
use looptool::rootsum::{alpha_table, av_exact, delta_basis_inverse, eval_power_sum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Number of checks passed, or a description of the first failing case.
pub type SuiteResult = Result<usize, String>;

pub const SUITES: [&str; 4] = ["identities", "circulant", "feynman", "quadratic"];

pub fn run(suite: &str, seed: u64, digits: u32) -> SuiteResult {
    match suite {
        "identities" => identities(seed),
        "circulant" => circulant(seed, digits),
        "feynman" => feynman(seed),
        "quadratic" => quadratic(seed),
        _ => Err(format!("unknown suite {suite:?}")),
    }
}

fn q() -> Arc<NumberField> {
    NumberField::rationals()
}

fn check(ok: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    loop {
        let r = rat(rng.gen_range(-9..=9), rng.gen_range(1..=4));
        // stay away from roots of unity and from zero
        if r != rat(0, 1) && r != rat(1, 1) && r != rat(-1, 1) {
            return r;
        }
    }
}

fn one_minus(a: &FieldElement) -> LaurentPolynomial {
    LaurentPolynomial::from_terms(a.field(), [(0, a.field().one()), (1, -a.clone())])
}

/// Sums over roots of unity of `1/(1-at)^k` and the two-pole and
/// `t/((t-a)(t-1/a))` forms, plus the delta-power tables.
fn identities(seed: u64) -> SuiteResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = q();
    let mut bases = vec![rat(2, 1), rat(3, 2), rat(-3, 1)];
    bases.push(random_rational(&mut rng));
    let mut checks = 0;
    for a in bases {
        let a = f.from_rational(a);
        let b = &a + &f.from_rational(random_rational(&mut rng));
        if b.is_zero() || b == a || b == f.one() || b == -f.one() {
            continue;
        }
        let ainv = a.inverse().unwrap();
        let toy_den =
            LaurentPolynomial::from_terms(&f, [(0, f.one()), (1, -(&a + &ainv)), (2, f.one())]);
        let toy = RationalFunction::new(LaurentPolynomial::t_pow(&f, 1), toy_den)
            .map_err(|e| e.to_string())?;
        for n in 1..=20u64 {
            let nn = f.from_int(n as i64);
            let u = (&f.one() - &a.pow(n as i64).unwrap()).inverse().unwrap();
            let ub = (&f.one() - &b.pow(n as i64).unwrap()).inverse().unwrap();
            let poly = |c: &[i64]| {
                c.iter()
                    .rev()
                    .fold(f.zero(), |acc, x| &(&acc * &nn) + &f.from_int(*x))
            };
            let up = |k: i64| u.pow(k).unwrap();
            let av = |d: &LaurentPolynomial| {
                av_exact(&RationalFunction::recip_of(d).unwrap(), n).map_err(|e| e.to_string())
            };
            let g = one_minus(&a);
            let tag = |what: &str| format!("{what} at a={a}, n={n}");
            check(av(&g)? == &nn * &u, || tag("first power"))?;
            let two = &(&(&f.one() - &b.checked_div(&a).unwrap()).inverse().unwrap() * &(&nn * &u))
                + &(&(&f.one() - &a.checked_div(&b).unwrap()).inverse().unwrap() * &(&nn * &ub));
            check(av(&g.mul(&one_minus(&b)))? == two, || tag("two poles"))?;
            let sq = &(&poly(&[0, 0, 1]) * &up(2)) + &(&poly(&[0, 1, -1]) * &u);
            check(av(&g.pow(2))? == sq, || tag("second power"))?;
            let cube = &(&(&poly(&[0, 0, 0, 1]) * &up(3))
                - &(&poly(&[0, 0, -3, 3]).scale(&rat(1, 2)) * &up(2)))
                + &(&poly(&[0, 2, -3, 1]).scale(&rat(1, 2)) * &u);
            check(av(&g.pow(3))? == cube, || tag("third power"))?;
            let quart = &(&(&(&poly(&[0, 0, 0, 0, 1]) * &up(4))
                + &(&poly(&[0, 0, 0, 2, -2]) * &up(3)))
                + &(&poly(&[0, 0, 11, -18, 7]).scale(&rat(1, 6)) * &up(2)))
                - &(&poly(&[0, -6, 11, -6, 1]).scale(&rat(1, 6)) * &u);
            check(av(&g.pow(4))? == quart, || tag("fourth power"))?;
            let uinv = (&f.one() - &ainv.pow(n as i64).unwrap()).inverse().unwrap();
            let toy_rhs = &(&nn * &(&a - &ainv).inverse().unwrap()) * &(&u - &uinv);
            check(
                av_exact(&toy, n).map_err(|e| e.to_string())? == toy_rhs,
                || tag("toy sum"),
            )?;
            checks += 6;
        }
    }
    for lam in [f.from_int(2), f.from_rational(random_rational(&mut rng))] {
        if lam.pow(2).unwrap() == f.one() {
            continue;
        }
        let s = &lam + &lam.inverse().unwrap();
        let delta = LaurentPolynomial::from_terms(&f, [(-1, f.one()), (0, -s), (1, f.one())]);
        let alpha = alpha_table(&lam, 4).map_err(|e| e.to_string())?;
        let beta = delta_basis_inverse(&lam, 4).map_err(|e| e.to_string())?;
        for n in 1..=12u64 {
            let u = (&f.one() - &lam.pow(n as i64).unwrap()).inverse().unwrap();
            let y = f.from_rational(rat(1, n as i64));
            for k in 0..=4usize {
                let rf = RationalFunction::recip_of(&delta.pow(k as u32)).unwrap();
                let want = av_exact(&rf, n).map_err(|e| e.to_string())?;
                let got = eval_power_sum(&alpha[k], &lam, n).map_err(|e| e.to_string())?;
                check(want == got, || {
                    format!("delta power table k={k} at lambda={lam}, n={n}")
                })?;
                let mut combo = RationalFunction::zero(&f);
                for (i, b) in beta[k].iter().enumerate() {
                    let c = b.eval(&y).map_err(|e| e.to_string())?;
                    combo = combo.add(
                        &RationalFunction::recip_of(&delta.pow(i as u32))
                            .unwrap()
                            .scale(&c),
                    );
                }
                let back = av_exact(&combo, n).map_err(|e| e.to_string())?;
                check(back == u.pow(k as i64).unwrap(), || {
                    format!("inverse table k={k} at lambda={lam}, n={n}")
                })?;
                checks += 2;
            }
        }
    }
    Ok(checks)
}

fn random_blocks(
    rng: &mut ChaCha8Rng,
    f: &Arc<NumberField>,
    n: usize,
    size: usize,
) -> Vec<FieldMatrix> {
    (0..n)
        .map(|_| {
            let vals: Vec<Rational> = (0..size * size)
                .map(|_| rat(rng.gen_range(-9..=9), rng.gen_range(1..=4)))
                .collect();
            FieldMatrix::from_fn(f, size, size, |i, j| {
                f.from_rational(vals[i * size + j].clone())
            })
        })
        .collect()
}

fn circulant(seed: u64, digits: u32) -> SuiteResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = q();
    let tol = 10f64.powi(-(digits.saturating_sub(10).min(300) as i32));
    let mut checks = 0;
    for case in 0..20 {
        let n = rng.gen_range(1..=8usize);
        let size = rng.gen_range(1..=3usize);
        let tag = |what: &str| format!("{what} in case {case} (n={n}, N={size})");
        let c =
            BlockCirculant::new(random_blocks(&mut rng, &f, n, size)).map_err(|e| e.to_string())?;
        let d =
            BlockCirculant::new(random_blocks(&mut rng, &f, n, size)).map_err(|e| e.to_string())?;
        let r = c.representer();
        check(
            BlockCirculant::from_representer(&r, n).ok().as_ref() == Some(&c),
            || tag("representer roundtrip"),
        )?;
        let exact = BlockCirculant::from_rational_representer(&RatMatrix::from_laurent(&r), n)
            .map_err(|e| e.to_string())?;
        check(exact == c, || tag("recover roundtrip"))?;
        let prod = c.product(&d).map_err(|e| e.to_string())?;
        let via = BlockCirculant::from_representer(&r.mul(&d.representer()), n)
            .map_err(|e| e.to_string())?;
        check(prod == via, || tag("product representer"))?;
        let res = block_diagonalize_check(&c, digits).map_err(|e| e.to_string())?;
        check(res.off_diagonal <= tol && res.diagonal <= tol, || {
            tag(&format!(
                "diagonalization residual {:.1e}/{:.1e}",
                res.off_diagonal, res.diagonal
            ))
        })?;
        checks += 4;
    }
    Ok(checks)
}

fn feynman(seed: u64) -> SuiteResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = q();
    let graphs = small_multigraphs(3);
    for case in 0..50 {
        let size = rng.gen_range(1..=2usize);
        let entries: Vec<LaurentPolynomial> = (0..size * size)
            .map(|_| {
                LaurentPolynomial::from_terms(
                    &f,
                    (-1..=1).map(|e| (e, f.from_int(rng.gen_range(-3..=3)))),
                )
            })
            .collect();
        let m = LaurentMatrix::from_fn(&f, size, size, |i, j| entries[i * size + j].clone());
        let pi = m.add(&m.invert_variable().transpose());
        let props = Propagators::new(RatMatrix::from_laurent(&pi), pi.eval_one())
            .map_err(|e| e.to_string())?;
        let mut gamma = VertexFactorTable::new();
        for deg in 1..=6 {
            let vals = (0..size)
                .map(|_| f.from_int(rng.gen_range(-3..=3)))
                .collect();
            gamma.insert(deg, vals, rng.gen_range(0..=2));
        }
        let (v, edges) = &graphs[rng.gen_range(0..graphs.len())];
        let oriented = edges
            .iter()
            .map(|&(a, b)| if rng.gen_bool(0.5) { (b, a) } else { (a, b) })
            .collect();
        let g = FeynmanDiagram::from_edges(*v, oriented, rat(rng.gen_range(1..=8), 1))
            .map_err(|e| e.to_string())?;
        let n = rng.gen_range(1..=6u64);
        let cover = BlockCirculant::from_representer(&pi, n as usize).map_err(|e| e.to_string())?;
        let flow = weight_flow(&g, n, &props, &gamma).map_err(|e| e.to_string())?;
        let direct = weight_direct(&g, &cover, &gamma).map_err(|e| e.to_string())?;
        check(flow == direct, || {
            format!(
                "case {case}: flow {:?} != direct {:?} for {g:?} at n={n}",
                flow, direct
            )
        })?;
    }
    Ok(50)
}

/// Rewrites reconstructed quadratic-delta polynomials in delta powers and
/// sums them back.
fn quadratic(seed: u64) -> SuiteResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = 0;
    let k = knot41();
    let s = k.splitting().map_err(|e| e.to_string())?;
    let vals: Vec<_> = (1..=3)
        .map(|n| (n, k.phi_via_average(2, n).unwrap()))
        .collect();
    let rec =
        reconstruct_p(&vals, std::slice::from_ref(&s.lambda), 2).map_err(|e| e.to_string())?;
    let form = quad_to_delta_form(&rec.poly).map_err(|e| e.to_string())?;
    for n in 1..=20 {
        let g = delta_form_at(&form, k.delta(), n).map_err(|e| e.to_string())?;
        let got = av_exact(&g, n).map_err(|e| e.to_string())?;
        check(got == k.phi_via_average(2, n).unwrap(), || {
            format!("figure-eight delta form at n={n}")
        })?;
        checks += 1;
    }
    let f = q();
    for case in 0..4 {
        let lam = loop {
            let l = random_rational(&mut rng);
            if l.numer() != l.denom() && &-l.numer() != l.denom() {
                break f.from_rational(l);
            }
        };
        let ell = 2 + case % 2;
        let terms: BTreeMap<_, _> = cover_monomials(1, ell)
            .into_iter()
            .map(|m| {
                (
                    m,
                    f.from_rational(rat(rng.gen_range(-9..=9), rng.gen_range(1..=5))),
                )
            })
            .collect();
        let p = CoverPolynomial::new(ell, vec![lam.clone()], terms).map_err(|e| e.to_string())?;
        let form = quad_to_delta_form(&p).map_err(|e| e.to_string())?;
        let s = &lam + &lam.inverse().unwrap();
        let delta = LaurentPolynomial::from_terms(&f, [(-1, f.one()), (0, -s), (1, f.one())]);
        for n in 1..=12 {
            let g = delta_form_at(&form, &delta, n).map_err(|e| e.to_string())?;
            let got = av_exact(&g, n).map_err(|e| e.to_string())?;
            check(got == p.eval(n).map_err(|e| e.to_string())?, || {
                format!("planted case {case} (lambda={lam}, ell={ell}) at n={n}")
            })?;
            checks += 1;
        }
    }
    Ok(checks)
}
