//! Acceptance suite: one line per criterion, nonzero exit on any failure.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::{Duration, Instant};

use looptool::circulant::{block_diagonalize_check, BlockCirculant};
use looptool::exactfield::{rat, FieldElement, NumberField, Rational};
use looptool::feynman::{
    small_multigraphs, weight_direct, weight_flow, FeynmanDiagram, Propagators, VertexFactorTable,
};
use looptool::fixtures::{knot41, knot52};
use looptool::laurent::{LaurentMatrix, LaurentPolynomial, RatMatrix, RationalFunction};
use looptool::linalg::FieldMatrix;
use looptool::powersum::{
    asymptotic_fit_check, cover_monomials, delta_form_at, leading_asymptotic, quad_to_delta_form,
    reconstruct_p, CoverPolynomial,
};
use looptool::rootsum::{
    alpha_table, av_exact, delta_basis_inverse, eval_power_sum, torus_sum_oracle, TorusFit,
    TorusSumSpec,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn q() -> Arc<NumberField> {
    NumberField::rationals()
}

fn within(elapsed: Duration, limit: Duration, what: &str) -> Result<(), String> {
    if elapsed > limit {
        Err(format!("{what} took {elapsed:.1?}, limit {limit:?}"))
    } else {
        Ok(())
    }
}

fn one_minus(a: &FieldElement) -> LaurentPolynomial {
    LaurentPolynomial::from_terms(a.field(), [(0, a.field().one()), (1, -a.clone())])
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let f = q();
    let mut checked = 0;
    for a in [rat(2, 1), rat(3, 2), rat(-3, 1)] {
        let a = f.from_rational(a);
        let b = &a + &f.one();
        let geo = one_minus(&a);
        let gb = one_minus(&b);
        let toy = RationalFunction::new(
            LaurentPolynomial::t_pow(&f, 1),
            LaurentPolynomial::from_terms(
                &f,
                [
                    (0, f.one()),
                    (1, -(&a + &a.inverse().unwrap())),
                    (2, f.one()),
                ],
            ),
        )
        .unwrap();
        for n in 1..=50u64 {
            let nn = f.from_int(n as i64);
            let an = a.pow(n as i64).unwrap();
            let u = (&f.one() - &an).inverse().unwrap();
            let upow = |k: i64| u.pow(k).unwrap();
            let av =
                |m: u32| av_exact(&RationalFunction::recip_of(&geo.pow(m)).unwrap(), n).unwrap();
            let p = |coeffs: &[i64]| {
                coeffs
                    .iter()
                    .rev()
                    .fold(f.zero(), |acc, c| &(&acc * &nn) + &f.from_int(*c))
            };
            ensure!(av(1) == &nn * &u, "(1) fails at a={a}, n={n}");
            // two distinct poles
            let ub = (&f.one() - &b.pow(n as i64).unwrap()).inverse().unwrap();
            let two = av_exact(&RationalFunction::recip_of(&geo.mul(&gb)).unwrap(), n).unwrap();
            let rhs = &(&(&f.one() - &b.checked_div(&a).unwrap()).inverse().unwrap() * &(&nn * &u))
                + &(&(&f.one() - &a.checked_div(&b).unwrap()).inverse().unwrap() * &(&nn * &ub));
            ensure!(two == rhs, "two-pole sum fails at a={a}, n={n}");
            let sq = &(&p(&[0, 0, 1]) * &upow(2)) + &(&p(&[0, 1, -1]) * &u);
            ensure!(av(2) == sq, "(2) fails at a={a}, n={n}");
            let cube = &(&(&p(&[0, 0, 0, 1]) * &upow(3))
                - &(&p(&[0, 0, -3, 3]).scale(&rat(1, 2)) * &upow(2)))
                + &(&p(&[0, 2, -3, 1]).scale(&rat(1, 2)) * &u);
            ensure!(av(3) == cube, "(3) cubic fails at a={a}, n={n}");
            let quart = &(&(&(&p(&[0, 0, 0, 0, 1]) * &upow(4))
                + &(&p(&[0, 0, 0, 2, -2]) * &upow(3)))
                + &(&p(&[0, 0, 11, -18, 7]).scale(&rat(1, 6)) * &upow(2)))
                - &(&p(&[0, -6, 11, -6, 1]).scale(&rat(1, 6)) * &u);
            ensure!(av(4) == quart, "(3) quartic fails at a={a}, n={n}");
            let uinv = (&f.one() - &a.pow(-(n as i64)).unwrap()).inverse().unwrap();
            let toy_rhs = &(&nn * &(&a - &a.inverse().unwrap()).inverse().unwrap()) * &(&u - &uinv);
            ensure!(
                av_exact(&toy, n).unwrap() == toy_rhs,
                "toy identity fails at a={a}, n={n}"
            );
            checked += 1;
        }
    }
    within(start.elapsed(), Duration::from_secs(10), "identities")?;
    Ok(format!(
        "{checked} (a, n) pairs, 6 identities each, {:.2?}",
        start.elapsed()
    ))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let k = knot41();
    for (ell, nmax) in [(2usize, 100u64), (3, 60)] {
        let series = k
            .series_values(ell, nmax as usize + 1)
            .map_err(|e| e.to_string())?;
        for n in 1..=nmax {
            let av = k.phi_via_average(ell, n).map_err(|e| e.to_string())?;
            let closed = k.phi_closed_form(ell, n).map_err(|e| e.to_string())?;
            let nf = k.norm_factor(n).pow(ell as i64 - 1).unwrap();
            let from_series = series[n as usize].checked_div(&nf).unwrap();
            ensure!(
                av == closed,
                "ell={ell} n={n}: average {av} != closed {closed}"
            );
            ensure!(
                av == from_series,
                "ell={ell} n={n}: average {av} != series {from_series}"
            );
        }
    }
    within(
        start.elapsed(),
        Duration::from_secs(120),
        "three-way agreement",
    )?;
    Ok(format!(
        "ell=2 n<=100, ell=3 n<=60 exact, {:.2?}",
        start.elapsed()
    ))
}

fn values41(ell: usize, ns: impl Iterator<Item = u64>, average: bool) -> Vec<(u64, FieldElement)> {
    let k = knot41();
    ns.map(|n| {
        let v = if average {
            k.phi_via_average(ell, n)
        } else {
            k.phi_closed_form(ell, n)
        };
        (n, v.unwrap())
    })
    .collect()
}

fn criterion_3() -> Outcome {
    let k = knot41();
    let s = k.splitting().unwrap();
    let lambda = s.lambda.clone();
    let mut notes = Vec::new();
    for (ell, count, psi) in [
        (2usize, 3u64, s.field.from_rational(rat(55, 1512))),
        (
            3,
            10,
            FieldElement::from_coords(&s.field, vec![rat(0, 1), rat(-317, 238140)]),
        ),
    ] {
        let rec = reconstruct_p(
            &values41(ell, 1..=count + 15, false),
            std::slice::from_ref(&lambda),
            ell,
        )
        .map_err(|e| e.to_string())?;
        ensure!(
            rec.mismatches().is_empty(),
            "ell={ell}: held-out mismatch at {:?}",
            rec.mismatches()
        );
        let lead = leading_asymptotic(&rec.poly, s.root_index).map_err(|e| e.to_string())?;
        ensure!(lead == psi, "ell={ell}: leading asymptotic {lead} != {psi}");
        let window = values41(ell, 10..=60, false);
        let lmax = k.lambda_max_abs().unwrap();
        let ok = asymptotic_fit_check(&window, &psi, lmax, ell, s.root_index, 100)
            .map_err(|e| e.to_string())?;
        ensure!(ok, "ell={ell}: error ratio not bounded over n=10..60");
        notes.push(format!("Psi_{ell} = {lead}"));
    }
    // the m-fold cover has roots lambda^m and leading term m Psi
    for m in [2u64, 3] {
        let vals: Vec<_> = (1..=8)
            .map(|n| (n, k.phi_closed_form(2, m * n).unwrap()))
            .collect();
        let rec =
            reconstruct_p(&vals, &[lambda.pow(m as i64).unwrap()], 2).map_err(|e| e.to_string())?;
        ensure!(
            rec.mismatches().is_empty(),
            "cover m={m}: held-out mismatch"
        );
        let lead = leading_asymptotic(&rec.poly, s.root_index).unwrap();
        ensure!(
            lead == s.field.from_rational(rat(55 * m as i64, 1512)),
            "cover m={m}: leading {lead}"
        );
    }
    Ok(notes.join(", "))
}

fn planted(rng: &mut ChaCha8Rng) -> CoverPolynomial {
    let f = q();
    let pool = [
        rat(2, 1),
        rat(3, 1),
        rat(-5, 1),
        rat(7, 2),
        rat(1, 11),
        rat(-13, 3),
    ];
    let r = rng.gen_range(1..=2usize);
    let ell = rng.gen_range(2..=3usize);
    let mut roots: Vec<Rational> = Vec::new();
    while roots.len() < r {
        let c = pool[rng.gen_range(0..pool.len())].clone();
        if !roots.contains(&c) {
            roots.push(c);
        }
    }
    let mut terms = BTreeMap::new();
    for m in cover_monomials(r, ell) {
        if rng.gen_bool(0.6) {
            terms.insert(
                m,
                f.from_rational(rat(rng.gen_range(-9..=9), rng.gen_range(1..=5))),
            );
        }
    }
    CoverPolynomial::new(
        ell,
        roots.into_iter().map(|c| f.from_rational(c)).collect(),
        terms,
    )
    .unwrap()
}

fn criterion_4() -> Outcome {
    let k = knot41();
    let lambda = k.splitting().unwrap().lambda.clone();
    for (ell, count) in [(2usize, 3u64), (3, 10)] {
        let vals = values41(ell, 1..=count + 17, true);
        let rec =
            reconstruct_p(&vals, std::slice::from_ref(&lambda), ell).map_err(|e| e.to_string())?;
        ensure!(
            rec.poly.terms().len() <= count as usize,
            "ell={ell}: more than {count} coefficients"
        );
        ensure!(
            rec.residuals.len() >= 15,
            "ell={ell}: too few held-out values"
        );
        ensure!(
            rec.mismatches().is_empty(),
            "ell={ell}: residual at n={:?}",
            rec.mismatches()
        );
    }
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    for trial in 0..20 {
        let p = planted(&mut rng);
        let unknowns = cover_monomials(p.r(), p.ell()).len() as u64;
        let vals: Vec<_> = (1..=unknowns + 5)
            .map(|n| (n, p.eval(n).unwrap()))
            .collect();
        let rec =
            reconstruct_p(&vals, p.roots(), p.ell()).map_err(|e| format!("trial {trial}: {e}"))?;
        ensure!(
            rec.poly == p,
            "trial {trial}: recovered {:?} != planted {:?}",
            rec.poly,
            p
        );
        ensure!(
            rec.mismatches().is_empty(),
            "trial {trial}: held-out residual"
        );
    }
    Ok("4_1 from 3 and 10 values (17 held out each), 20 planted polynomials".into())
}

fn random_laurent(rng: &mut ChaCha8Rng, f: &Arc<NumberField>) -> LaurentPolynomial {
    LaurentPolynomial::from_terms(f, (-1..=1).map(|e| (e, f.from_int(rng.gen_range(-3..=3)))))
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let graphs = small_multigraphs(3);
    let seeds: Vec<u64> = (0..50).collect();
    let checked = std::sync::atomic::AtomicUsize::new(0);
    let failures = std::sync::Mutex::new(Vec::<String>::new());
    let workers = std::thread::available_parallelism()
        .map(|p| p.get())
        .unwrap_or(4)
        .min(8);
    std::thread::scope(|scope| {
        for chunk in seeds.chunks(seeds.len().div_ceil(workers)) {
            let (graphs, checked, failures) = (&graphs, &checked, &failures);
            scope.spawn(move || {
                for &seed in chunk {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    let f = q();
                    let size = 1 + (seed as usize % 2);
                    let entries: Vec<LaurentPolynomial> = (0..size * size)
                        .map(|_| random_laurent(&mut rng, &f))
                        .collect();
                    let m = LaurentMatrix::from_fn(&f, size, size, |i, j| {
                        entries[i * size + j].clone()
                    });
                    let pi = m.add(&m.invert_variable().transpose());
                    let props =
                        Propagators::new(RatMatrix::from_laurent(&pi), pi.eval_one()).unwrap();
                    let mut gamma = VertexFactorTable::new();
                    for deg in 1..=6 {
                        let vals = (0..size)
                            .map(|_| f.from_int(rng.gen_range(-3..=3)))
                            .collect();
                        gamma.insert(deg, vals, rng.gen_range(0..=2));
                    }
                    for (v, edges) in graphs {
                        let oriented = edges
                            .iter()
                            .map(|&(a, b)| if rng.gen_bool(0.5) { (b, a) } else { (a, b) })
                            .collect();
                        let sigma = rat([1, 2, 6][rng.gen_range(0..3)], 1);
                        let g = FeynmanDiagram::from_edges(*v, oriented, sigma).unwrap();
                        for n in 1..=6u64 {
                            let cover = BlockCirculant::from_representer(&pi, n as usize).unwrap();
                            let flow = weight_flow(&g, n, &props, &gamma);
                            let direct = weight_direct(&g, &cover, &gamma);
                            if flow != direct || flow.is_err() {
                                failures.lock().unwrap().push(format!(
                                    "seed {seed}, n={n}, {g:?}: {flow:?} vs {direct:?}"
                                ));
                            }
                            checked.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                        }
                    }
                }
            });
        }
    });
    let failures = failures.into_inner().unwrap();
    ensure!(
        failures.is_empty(),
        "{} mismatches, first: {}",
        failures.len(),
        failures[0]
    );
    Ok(format!(
        "{} graphs x 50 datasets x n<=6: {} exact comparisons, {:.1?}",
        graphs.len(),
        checked.into_inner(),
        start.elapsed()
    ))
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let f = q();
    let mut worst = (0f64, 0f64);
    for n in 1..=8usize {
        for size in 1..=3usize {
            let blocks: Vec<FieldMatrix> = (0..n)
                .map(|_| {
                    let vals: Vec<Rational> = (0..size * size)
                        .map(|_| rat(rng.gen_range(-9..=9), rng.gen_range(1..=4)))
                        .collect();
                    FieldMatrix::from_fn(&f, size, size, |i, j| {
                        f.from_rational(vals[i * size + j].clone())
                    })
                })
                .collect();
            let c = BlockCirculant::new(blocks).unwrap();
            let r = c.representer();
            ensure!(
                BlockCirculant::from_representer(&r, n).unwrap() == c,
                "fold roundtrip n={n} N={size}"
            );
            let exact =
                BlockCirculant::from_rational_representer(&RatMatrix::from_laurent(&r), n).unwrap();
            ensure!(exact == c, "recover roundtrip n={n} N={size}");
            let res = block_diagonalize_check(&c, 50).map_err(|e| e.to_string())?;
            ensure!(
                res.off_diagonal <= 1e-40,
                "off-block residual {} at n={n} N={size}",
                res.off_diagonal
            );
            ensure!(
                res.diagonal <= 1e-40,
                "diagonal residual {} at n={n} N={size}",
                res.diagonal
            );
            worst = (worst.0.max(res.off_diagonal), worst.1.max(res.diagonal));
        }
    }
    Ok(format!(
        "n<=8, N<=3; worst off-block {:.1e}, diagonal {:.1e}",
        worst.0, worst.1
    ))
}

fn criterion_7() -> Outcome {
    let f = q();
    let specs = [
        (
            "triangle",
            TorusSumSpec::new(
                2,
                vec![0, 0],
                vec![vec![1, 0], vec![0, 1], vec![-1, -1]],
                vec![
                    f.from_int(2),
                    f.from_rational(rat(1, 3)),
                    f.from_rational(rat(-3, 2)),
                ],
            ),
        ),
        (
            "4-edge",
            TorusSumSpec::new(
                2,
                vec![0, 0],
                vec![vec![1, 0], vec![0, 1], vec![-1, -1], vec![1, 1]],
                vec![
                    f.from_int(2),
                    f.from_rational(rat(1, 3)),
                    f.from_rational(rat(-3, 2)),
                    f.from_rational(rat(5, 7)),
                ],
            ),
        ),
    ];
    let mut notes = Vec::new();
    for (name, spec) in specs {
        let spec = spec.map_err(|e| e.to_string())?;
        let u = TorusFit::unknowns(&spec) as u64;
        let window: Vec<u64> = (1..=u).collect();
        let fit = TorusFit::fit(&spec, &window).map_err(|e| format!("{name}: {e}"))?;
        for n in (2..=10).chain(u + 1..=u + 5) {
            let want = torus_sum_oracle(&spec, n).map_err(|e| e.to_string())?;
            ensure!(
                fit.predict(n).unwrap() == want,
                "{name}: prediction fails at n={n}"
            );
        }
        notes.push(format!("{name} {u} unknowns"));
    }
    Ok(format!(
        "{}; n=2..10 and 5 held-out n exact",
        notes.join(", ")
    ))
}

fn criterion_8() -> Outcome {
    let f = q();
    let lambda = f.from_int(2);
    let delta =
        LaurentPolynomial::from_ints(&f, -1, &[2, -5, 2]).scale(&f.from_rational(rat(1, 2)));
    let alpha = alpha_table(&lambda, 4).map_err(|e| e.to_string())?;
    let beta = delta_basis_inverse(&lambda, 4).map_err(|e| e.to_string())?;
    for n in 1..=20u64 {
        let u = (&f.one() - &lambda.pow(n as i64).unwrap())
            .inverse()
            .unwrap();
        let y = rat(1, n as i64);
        for k in 0..=4usize {
            let rf = RationalFunction::recip_of(&delta.pow(k as u32)).unwrap();
            let av = av_exact(&rf, n).unwrap();
            ensure!(
                av == eval_power_sum(&alpha[k], &lambda, n).unwrap(),
                "alpha k={k} n={n}"
            );
            let mut combo = RationalFunction::zero(&f);
            for (i, b) in beta[k].iter().enumerate() {
                let c = b.eval(&f.from_rational(y.clone())).unwrap();
                combo = combo.add(
                    &RationalFunction::recip_of(&delta.pow(i as u32))
                        .unwrap()
                        .scale(&c),
                );
            }
            ensure!(
                av_exact(&combo, n).unwrap() == u.pow(k as i64).unwrap(),
                "beta k={k} n={n}"
            );
        }
    }
    let k = knot41();
    let s = k.splitting().unwrap();
    let rec = reconstruct_p(
        &values41(2, 1..=3, true),
        std::slice::from_ref(&s.lambda),
        2,
    )
    .map_err(|e| e.to_string())?;
    let form = quad_to_delta_form(&rec.poly).map_err(|e| e.to_string())?;
    let want: BTreeMap<(usize, i64), FieldElement> = [
        ((0, 0), rat(55, 1512)),
        ((1, 1), rat(20, 63)),
        ((2, 1), rat(4, 3)),
    ]
    .into_iter()
    .map(|(key, c)| (key, s.field.from_rational(c)))
    .collect();
    ensure!(form == want, "delta form {form:?}");
    for n in 1..=30u64 {
        let g = delta_form_at(&form, k.delta(), n).unwrap();
        ensure!(
            av_exact(&g, n).unwrap() == k.phi_via_average(2, n).unwrap(),
            "delta form at n={n}"
        );
    }
    Ok("alpha/beta for k<=4, n<=20; q = 4/3 X^2 Y + 20/63 X Y + 55/1512 reproduces n<=30".into())
}

fn criterion_9() -> Outcome {
    let k = knot52().map_err(|e| e.to_string())?;
    let s = k.splitting().unwrap();
    let start = Instant::now();
    let values: Vec<(u64, FieldElement)> = (1..=30)
        .map(|n| (n, k.phi_via_average(2, n).unwrap()))
        .collect();
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(120), "5_2 averages")?;
    for (n, v) in &values {
        let ps = k.phi_via_power_sums(2, *n).unwrap();
        ensure!(
            k.to_splitting(v).unwrap() == ps,
            "n={n}: average disagrees with the power-sum form"
        );
    }
    let digits = 100;
    let psi = s.psi[&2].embed(s.root_index, digits).unwrap();
    let (n, v) = values.last().unwrap();
    let phi = v
        .embed(k.root_index(), digits)
        .unwrap()
        .mul_rational(&rat(1, *n as i64));
    let psi = psi.set_prec(phi.prec().max(psi.prec()));
    let phi = phi.set_prec(psi.prec());
    let rel = phi.sub(&psi).abs_upper_f64() / psi.abs_lower_f64();
    ensure!(rel < 1e-20, "relative error {rel:.2e} at n={n}");
    let envelope = k.lambda_max_abs().unwrap();
    let window: Vec<_> = values[9..]
        .iter()
        .map(|(n, v)| (*n, k.to_splitting(v).unwrap()))
        .collect();
    let ok = asymptotic_fit_check(&window, &s.psi[&2], envelope, 2, s.root_index, digits).unwrap();
    ensure!(ok, "error ratio not bounded over n=10..30");
    Ok(format!(
        "n<=30 exact in {elapsed:.1?}; |Phi_30/30 - Psi_2|/|Psi_2| = {rel:.1e}"
    ))
}

fn main() {
    let criteria: Vec<(&str, fn() -> Outcome)> = vec![
        ("roots-of-unity identities", criterion_1),
        ("4_1 three-way agreement", criterion_2),
        ("4_1 asymptotics", criterion_3),
        ("reconstruction counts", criterion_4),
        ("flow weight equals cover weight", criterion_5),
        ("block circulant", criterion_6),
        ("torus sum shape", criterion_7),
        ("quadratic delta pipeline", criterion_8),
        ("5_2 averages and asymptotics", criterion_9),
    ];
    // the identities carry a wall-clock limit, so they run before the rest start
    let first = std::thread::spawn(criteria[0].1)
        .join()
        .unwrap_or_else(|p| Err(format!("panicked: {p:?}")));
    let mut results = vec![first];
    results.extend(std::thread::scope(|scope| {
        let handles: Vec<_> = criteria[1..]
            .iter()
            .map(|(_, run)| scope.spawn(*run))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|p| Err(format!("panicked: {p:?}"))))
            .collect::<Vec<_>>()
    }));
    let mut failed = 0;
    for (i, ((name, _), result)) in criteria.iter().zip(&results).enumerate() {
        match result {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail})", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({why})", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
