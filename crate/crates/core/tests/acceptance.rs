//! End-to-end acceptance checks. Each test writes one PASS/FAIL line to
//! stderr directly, so the lines appear even when output is captured.

use std::f64::consts::PI;
use std::io::Write;
use std::time::{Duration, Instant};

use caisson::amoeba::{caisson_member, limit_sweep, slice_zero_logs};
use caisson::circuits::{
    certify_component, default_grid, detect_circuit, hypocycloid_implicit, safe_argument_intervals_with,
    BarycentricCircuit, Hypocycloid, ProbeVerdict, RegionSampler,
};
use caisson::expsum::{homogenize, phi_transport};
use caisson::membership::{dominance_threshold, in_lopsided_amoeba};
use caisson::orders::{order_multivariate, order_univariate};
use caisson::raster::Window;
use caisson::ronkin::ronkin_gradient;
use caisson::scalars::{ExtScalar, Rational, RealBasis};
use caisson::support_lattice::{
    canonical_row_space, is_lift, lattice_meet_join, minimal_rational_lift, rank_r, rank_rho, rhat,
    row_space_equal, ExponentMatrix,
};
use caisson::{Complex64, DeformationFamily, Error, ExpSum, LiftRelation, SupportMatrix};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(n: u32, title: &str, pass: bool, elapsed: Duration, limit: Duration, detail: &str) {
    let ok = pass && elapsed <= limit;
    let _ = writeln!(
        std::io::stderr(),
        "criterion {n:>2} {}: {title} [{:.2}s / {:.0}s] {detail}",
        if ok { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        limit.as_secs_f64()
    );
    assert!(pass, "criterion {n} failed: {detail}");
    assert!(elapsed <= limit, "criterion {n} exceeded {limit:?}: {elapsed:?}");
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn polar_pi(r: f64, a: f64) -> Complex64 {
    Complex64::from_polar(r, a * PI)
}

fn ex64_f(cc: Complex64) -> ExpSum {
    ExpSum::new(
        ExponentMatrix::from_integers(&[[1, 1, 1, 1], [0, 3, 4, 9]]).unwrap(),
        vec![c(1.0), c(1.0), cc, c(1.0)],
    )
    .unwrap()
}

fn ex64_lift() -> LiftRelation {
    LiftRelation::new(
        SupportMatrix::from_integers(&[[1, 1, 1, 1], [0, 3, 4, 9]]).unwrap(),
        SupportMatrix::from_integers(&[[1, 1, 1, 1], [0, 3, 4, 9], [0, 6, 2, 0]]).unwrap(),
    )
    .unwrap()
}

fn ex65_f(cc: Complex64) -> ExpSum {
    ExpSum::from_integer_columns(
        &[vec![0, 0], vec![2, 2], vec![3, 3], vec![4, 6], vec![6, 4]],
        vec![c(1.0), c(1.0), cc, c(1.0), c(1.0)],
    )
    .unwrap()
}

fn ex64_circuit() -> BarycentricCircuit {
    let g = ExpSum::from_integer_columns(
        &[vec![0, 0], vec![3, 6], vec![4, 2], vec![9, 0]],
        vec![c(1.0), c(1.0), c(1.0), c(1.0)],
    )
    .unwrap();
    detect_circuit(&g).unwrap()
}

fn ex65_circuit() -> BarycentricCircuit {
    let g = ExpSum::from_integer_columns(
        &[vec![0, 0, 0], vec![2, 2, 4], vec![3, 3, 1], vec![4, 6, 0], vec![6, 4, 0]],
        vec![c(1.0); 5],
    )
    .unwrap();
    detect_circuit(&g).unwrap()
}

/// Log-moduli of the roots of `Σ a_k w^k` (real coefficients) from the
/// eigenvalues of the companion matrix, ascending.
fn companion_log_moduli(a: &[f64]) -> Vec<f64> {
    let lo = a.iter().position(|v| *v != 0.0).unwrap();
    let p = &a[lo..];
    let d = p.len() - 1;
    let mut out = vec![f64::NEG_INFINITY; lo];
    if d > 0 {
        let m = DMatrix::from_fn(d, d, |i, j| {
            if j == d - 1 {
                -p[i] / p[d]
            } else if i == j + 1 {
                1.0
            } else {
                0.0
            }
        });
        out.extend(m.complex_eigenvalues().iter().map(|z| z.norm().ln()));
    }
    out.sort_by(f64::total_cmp);
    out
}

/// `log|a₅| − log|a₄|` for `1 + w³ + c·w⁴ + w⁹`.
fn ex64_root_gap(cc: Complex64) -> f64 {
    let mut p = vec![Complex64::new(0.0, 0.0); 10];
    p[0] = c(1.0);
    p[3] = c(1.0);
    p[4] = cc;
    p[9] = c(1.0);
    let mut m = DMatrix::<Complex64>::zeros(9, 9);
    for i in 0..9 {
        m[(i, 8)] = -p[i];
        if i > 0 {
            m[(i, i - 1)] = c(1.0);
        }
    }
    let mut l: Vec<f64> = m.eigenvalues().unwrap().iter().map(|z| z.norm().ln()).collect();
    l.sort_by(f64::total_cmp);
    l[4] - l[3]
}

#[test]
fn criterion_01_ranks_and_minimal_lift() {
    let t = Instant::now();
    let basis = RealBasis::with_elements(&[("pi", PI)]).unwrap();
    let one = ExtScalar::from_integer(&basis, 1);
    let rows = vec![
        vec![one.clone(), one.clone(), one.clone()],
        vec![
            ExtScalar::zero(&basis),
            one.clone(),
            ExtScalar::basis_element(&basis, 1).unwrap(),
        ],
    ];
    let a = SupportMatrix::new(ExponentMatrix::from_rows(&basis, rows).unwrap()).unwrap();
    let (r, rho) = (rank_r(&a), rank_rho(&a));
    let lift = minimal_rational_lift(&a);
    let want = ExponentMatrix::from_integers(&[[1, 1, 1], [0, 1, 0], [0, 0, 1]]).unwrap();
    let same = canonical_row_space(lift.lift()) == canonical_row_space(&want);
    report(
        1,
        "ranks and minimal lift",
        r == 2 && rho == 3 && same,
        t.elapsed(),
        Duration::from_secs(1),
        &format!("r = {r}, rho = {rho}, canonical row space equal: {same}"),
    );
}

fn random_class(rng: &mut ChaCha8Rng, n: usize, extra: &[Vec<i64>]) -> (Vec<Vec<i64>>, SupportMatrix) {
    let k = rng.gen_range(0..n);
    let mut rows = vec![vec![1i64; n]];
    rows.extend(extra.iter().cloned());
    for _ in 0..k {
        rows.push((0..n).map(|_| rng.gen_range(-3..=3)).collect());
    }
    let m = SupportMatrix::class(ExponentMatrix::from_integers(&rows).unwrap()).unwrap();
    (rows, m)
}

#[test]
fn criterion_02_lattice_laws() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut failures = Vec::new();
    for trial in 0..500 {
        let n = rng.gen_range(2..=8);
        let (xr, x) = random_class(&mut rng, n, &[]);
        let (_, y) = random_class(&mut rng, n, &[]);
        // Z ⊇ X, so X ⊑ Z in the lift order reversed: Z lifts X
        let (_, z) = random_class(&mut rng, n, &xr[1..]);
        let (meet, join) = lattice_meet_join(&x, &y).unwrap();
        let rank_ok = rhat(&meet) + rhat(&join) == rhat(&x) + rhat(&y);
        let bounds_ok = is_lift(&meet, &x).unwrap()
            && is_lift(&meet, &y).unwrap()
            && is_lift(&x, &join).unwrap()
            && is_lift(&y, &join).unwrap();
        // modular law: X ⊆ Z ⟹ X + (Y ∩ Z) = (X + Y) ∩ Z
        let (_, yz) = lattice_meet_join(&y, &z).unwrap();
        let (lhs, _) = lattice_meet_join(&x, &yz).unwrap();
        let (_, rhs) = lattice_meet_join(&meet, &z).unwrap();
        let modular_ok = row_space_equal(&lhs, &rhs).unwrap();
        // order axioms
        let refl = is_lift(&x, &x).unwrap();
        let anti = !(is_lift(&x, &y).unwrap() && is_lift(&y, &x).unwrap()) || row_space_equal(&x, &y).unwrap();
        let trans = !(is_lift(&z, &x).unwrap() && is_lift(&meet, &z).unwrap()) || is_lift(&meet, &x).unwrap();
        let chain = is_lift(&z, &x).unwrap();
        if !(rank_ok && bounds_ok && modular_ok && refl && anti && trans && chain) {
            failures.push(trial);
        }
    }
    report(
        2,
        "lattice laws on 500 random classes",
        failures.is_empty(),
        t.elapsed(),
        Duration::from_secs(30),
        &format!("failures at trials {failures:?}"),
    );
}

#[test]
fn criterion_03_lopsided_thresholds() {
    let t = Instant::now();
    let f = ExpSum::univariate(&[0, 3, 4, 9], vec![c(1.0); 4]).unwrap();
    let t64 = dominance_threshold(&f, 2).unwrap().value;
    let e64 = t.elapsed();
    let t = Instant::now();
    let t65 = dominance_threshold(&ex65_f(c(1.0)), 2).unwrap().value;
    let e65 = t.elapsed();
    let pass = (t64 - 3.0).abs() < 1e-6 && (t65 - 4.0).abs() < 1e-6 && e64.max(e65) < Duration::from_secs(1);
    report(
        3,
        "dominance thresholds",
        pass,
        e64 + e65,
        Duration::from_secs(2),
        &format!("{t64:.12} and {t65:.12}"),
    );
}

fn hypocycloid_scale(ex: Hypocycloid, r: f64) -> f64 {
    match ex {
        Hypocycloid::Ex1 => 27.0 + 18.0 * r * r + r.powi(4) + 8.0 * r.powi(3),
        Hypocycloid::Ex2 => 4096.0 + 768.0 * r * r + 6.0 * r.powi(4) + r.powi(6) + 54.0 * r.powi(4),
    }
}

#[test]
fn criterion_04_hypocycloid_cross_validation() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut lines = Vec::new();
    let mut disagreements = 0;
    for (ex, circuit, rmax) in [
        (Hypocycloid::Ex1, ex64_circuit(), 4.0),
        (Hypocycloid::Ex2, ex65_circuit(), 5.5),
    ] {
        let sampler = RegionSampler::new(&circuit, default_grid(circuit.dim())).unwrap();
        let (mut tested, mut bad, mut bad_other) = (0, 0, 0);
        for _ in 0..200 {
            let r = rng.gen_range(0.0..rmax);
            let theta = rng.gen_range(-PI..PI);
            // θ is the argument of c_γ, the negated stored coefficient
            let h = hypocycloid_implicit(ex, r, theta);
            if h.abs() <= 0.05 * hypocycloid_scale(ex, r) {
                continue;
            }
            tested += 1;
            let probe = sampler.probe(Complex64::from_polar(r, theta));
            let agrees = match probe.verdict {
                ProbeVerdict::CertifiedOutside => h > 0.0,
                ProbeVerdict::HeuristicInside { .. } => h < 0.0,
                ProbeVerdict::Unknown => false,
            };
            bad += usize::from(!agrees);
            let h_other = hypocycloid_implicit(ex, r, theta + PI);
            bad_other += usize::from((probe.is_outside()) != (h_other > 0.0));
        }
        disagreements += bad;
        lines.push(format!("{ex:?}: {bad}/{tested} disagree with θ = arg c_γ ({bad_other} with θ = arg c)"));
    }
    report(
        4,
        "region probes vs implicit hypocycloids",
        disagreements == 0,
        t.elapsed(),
        Duration::from_secs(120),
        &lines.join("; "),
    );
}

fn matches_values(ends: &[f64], want: &[f64], fold: impl Fn(f64) -> f64) -> bool {
    let folded: Vec<f64> = ends.iter().map(|&e| fold(e)).collect();
    folded.iter().all(|e| want.iter().any(|w| (e - w).abs() <= 0.01))
        && want.iter().all(|w| folded.iter().any(|e| (e - w).abs() <= 0.01))
}

#[test]
fn criterion_05_interval_endpoints() {
    let t = Instant::now();
    let mut lines = Vec::new();
    let mut pass = true;
    let s64 = RegionSampler::new(&ex64_circuit(), 512).unwrap();
    let s65 = RegionSampler::new(&ex65_circuit(), 128).unwrap();
    let cases: [(&str, &RegionSampler, f64, &[f64]); 4] = [
        ("6.4", &s64, 1.5, &[0.25, 0.42, 0.91]),
        ("6.4", &s64, 2.5, &[0.32, 0.34, 0.99]),
        ("6.5", &s65, 2.5, &[0.08, 0.42]),
        ("6.5", &s65, 3.5, &[0.01, 0.49]),
    ];
    for (name, sampler, radius, want) in cases {
        let iv = safe_argument_intervals_with(sampler, radius, 400).unwrap();
        let ends: Vec<f64> = iv.iter().flat_map(|i| [i.start, i.end]).collect();
        let values_ok = if name == "6.4" {
            matches_values(&ends, want, f64::abs)
        } else {
            // the quadrilateral circuit is invariant under arg c ↦ arg c + π/2
            matches_values(&ends, want, |e| e.abs().rem_euclid(0.5))
        };
        // grouping: every safe arc carries the component. The lift is only a
        // sufficient condition, so unsafe arcs may still carry it; at least one
        // must not, which rules out the complementary pairing.
        let (mut safe_ok, mut unsafe_without) = (true, 0);
        for (k, i) in iv.iter().enumerate() {
            let next = iv[(k + 1) % iv.len()];
            let gap_mid = caisson::circuits::ArgInterval {
                start: i.end,
                end: next.start,
            }
            .midpoint();
            let has_component = |a: f64| {
                if name == "6.4" {
                    ex64_root_gap(polar_pi(radius, a)) > 1e-6
                } else {
                    order_multivariate(&ex65_f(polar_pi(radius, a)), &[0.0, 0.0], 0, 32, 5) == Ok(3)
                }
            };
            safe_ok &= has_component(i.midpoint());
            unsafe_without += usize::from(!has_component(gap_mid));
        }
        let grouping_ok = safe_ok && unsafe_without > 0;
        pass &= values_ok && grouping_ok;
        let shown: Vec<String> = iv.iter().map(|i| format!("[{:.4}, {:.4}]", i.start, i.end)).collect();
        lines.push(format!(
            "Ex {name} R={radius}: {} values {} grouping {} ({unsafe_without}/{} unsafe arcs without the component)",
            shown.join(" "),
            if values_ok { "ok" } else { "MISMATCH" },
            if grouping_ok { "ok" } else { "MISMATCH" },
            iv.len()
        ));
    }
    report(5, "safe argument intervals", pass, t.elapsed(), Duration::from_secs(300), &lines.join("; "));
}

#[test]
fn criterion_06_certificates_vs_root_oracle() {
    let t = Instant::now();
    let lift = ex64_lift();
    let figure = certify_component(&ex64_f(polar_pi(2.5, 5.0 / 6.0)), &lift, None, false).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut certified, mut false_certs, mut tried) = (0, 0, 0);
    let mut min_gap = f64::INFINITY;
    while certified < 25 && tried < 500 {
        tried += 1;
        let cc = polar_pi(rng.gen_range(0.5..6.0), rng.gen_range(-1.0..1.0));
        let r = certify_component(&ex64_f(cc), &lift, None, false).unwrap();
        if r.is_certified() {
            certified += 1;
            let gap = ex64_root_gap(cc);
            min_gap = min_gap.min(gap);
            if !(gap > 1e-6) || r.order.as_deref() != Some(&["4".to_string()][..]) {
                false_certs += 1;
            }
        }
    }
    report(
        6,
        "certificates agree with root moduli",
        figure.is_certified() && certified == 25 && false_certs == 0,
        t.elapsed(),
        Duration::from_secs(30),
        &format!(
            "figure c certified: {}, {certified} certified of {tried}, false: {false_certs}, smallest gap {min_gap:.3e}",
            figure.is_certified()
        ),
    );
}

#[test]
fn criterion_07_orders() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    let mut bad_orders = 0;
    for _ in 0..50 {
        let d = rng.gen_range(1..=12usize);
        let lo = rng.gen_range(-3..=3i64);
        let mut a: Vec<f64> = (0..=d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        a[0] += a[0].signum() * 0.5;
        a[d] += a[d].signum() * 0.5;
        let exps: Vec<i64> = (0..=d as i64).map(|k| lo + k).collect();
        let f = ExpSum::univariate(&exps, a.iter().map(|&v| c(v)).collect()).unwrap();
        let ell = companion_log_moduli(&a);
        for (i, &l) in ell.iter().enumerate() {
            match order_univariate(&f, l) {
                Err(Error::OnAmoeba { log_modulus, .. }) => worst = worst.max((log_modulus - l).abs()),
                _ => worst = f64::INFINITY,
            }
            if i + 1 < ell.len() && ell[i + 1] - l > 1e-6 {
                let mid = 0.5 * (l + ell[i + 1]);
                bad_orders += usize::from(order_univariate(&f, mid).ok() != Some(lo + i as i64 + 1));
            }
        }
        let below = ell[0] - 1.0;
        bad_orders += usize::from(order_univariate(&f, below).ok() != Some(lo));
    }
    let multi: Vec<_> = (0..2)
        .map(|j| order_multivariate(&ex65_f(polar_pi(3.5, 0.63)), &[0.0, 0.0], j, 32, 7))
        .collect();
    let multi_ok = multi == vec![Ok(3), Ok(3)];
    report(
        7,
        "order computations",
        worst < 1e-8 && bad_orders == 0 && multi_ok,
        t.elapsed(),
        Duration::from_secs(60),
        &format!("largest step offset {worst:.2e}, wrong orders {bad_orders}, Example 6.5 order {multi:?}"),
    );
}

fn random_bivariate(rng: &mut ChaCha8Rng) -> ExpSum {
    let n = rng.gen_range(4..=6);
    let mut cols: Vec<Vec<i64>> = Vec::new();
    while cols.len() < n {
        let v = vec![rng.gen_range(0..=4), rng.gen_range(0..=4)];
        if !cols.contains(&v) {
            cols.push(v);
        }
    }
    let coeffs = (0..n)
        .map(|_| Complex64::from_polar(rng.gen_range(-1.0f64..1.0).exp(), rng.gen_range(-PI..PI)))
        .collect();
    ExpSum::from_integer_columns(&cols, coeffs).unwrap()
}

fn random_lift(rng: &mut ChaCha8Rng, f: &ExpSum) -> LiftRelation {
    let a = SupportMatrix::new(f.support().with_ones_row()).unwrap();
    let mut rows: Vec<Vec<Rational>> = a.rational_rows().unwrap();
    for _ in 0..rng.gen_range(1..=2) {
        rows.push(
            (0..f.nterms())
                .map(|_| Rational::new(rng.gen_range(-6..=6).into(), rng.gen_range(1..=3).into()))
                .collect(),
        );
    }
    LiftRelation::new(a, SupportMatrix::from_rationals(&rows).unwrap()).unwrap()
}

#[test]
fn criterion_08_inclusion_and_transport() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut zeros, mut lopsided_zeros) = (0, 0);
    while zeros < 500 {
        let f = random_bivariate(&mut rng);
        let lifts: Vec<LiftRelation> = (0..3).map(|_| random_lift(&mut rng, &f)).collect();
        for _ in 0..10 {
            let x1 = rng.gen_range(-2.0..2.0);
            let phase = rng.gen_range(0.0..2.0 * PI);
            for l in slice_zero_logs(&f, 1, &[x1, 0.0], &[phase, 0.0]).unwrap() {
                zeros += 1;
                for lift in &lifts {
                    lopsided_zeros += usize::from(!caisson_member(&f, lift, &[x1, l]).unwrap());
                }
            }
        }
    }
    let (mut points, mut mismatches, mut worst) = (0, 0, 0.0f64);
    while points < 1000 {
        let f = random_bivariate(&mut rng);
        let lift = random_lift(&mut rng, &f);
        let h = homogenize(&f).unwrap();
        let g = phi_transport(&h, &lift).unwrap();
        for _ in 0..50 {
            let x = [rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)];
            let a = f.term_log_moduli(&x);
            let b = g.term_log_moduli(&lift.embed(&[0.0, x[0], x[1]]));
            for (u, v) in a.iter().zip(&b) {
                // relative error on moduli is the difference of logs
                worst = worst.max((u - v).abs());
            }
            mismatches += usize::from(caisson_member(&f, &lift, &x).unwrap() != in_lopsided_amoeba(&f, &x));
            points += 1;
        }
    }
    report(
        8,
        "inclusion and transport invariants",
        lopsided_zeros == 0 && mismatches == 0 && worst <= 1e-12,
        t.elapsed(),
        Duration::from_secs(120),
        &format!(
            "{zeros} zeros x 3 lifts, {lopsided_zeros} lopsided; {points} points, {mismatches} mismatches, worst relative modulus error {worst:.1e}"
        ),
    );
}

#[test]
fn criterion_09_limit_sweep() {
    let t = Instant::now();
    let f = ExpSum::univariate(&[0, 1, 2], vec![c(1.0); 3]).unwrap();
    let fam = DeformationFamily::new(f, vec![vec![0.0], vec![1.0], vec![0.0]]).unwrap();
    let window = Window::new(-1.0, 1.0, -20.0, 20.0).unwrap();
    let rows = limit_sweep(&fam, &[1.0, 0.1, 0.01, 0.001], window, [400, 400]).unwrap();
    let diag = (0.005f64.powi(2) + 0.1f64.powi(2)).sqrt();
    let decreasing = rows.windows(2).all(|p| p[1].distance < p[0].distance);
    let last = rows.last().unwrap().distance;
    let shown: Vec<String> = rows.iter().map(|r| format!("{}: {:.4}", r.lambda, r.distance)).collect();
    report(
        9,
        "deformation limit",
        decreasing && last <= 2.0 * diag,
        t.elapsed(),
        Duration::from_secs(180),
        &format!("{} (2 pixel diagonals = {:.4})", shown.join(", "), 2.0 * diag),
    );
}

#[test]
fn criterion_10_ronkin_gradient() {
    let t = Instant::now();
    let cases: [(&[i64], Vec<f64>, f64); 5] = [
        (&[0, 3, 4, 9], vec![1.0, 1.0, 10.0, 1.0], 0.0),
        (&[0, 1], vec![1.0, 1.0], 3.0),
        (&[0, 1], vec![1.0, 1.0], -3.0),
        (&[0, 3, 4, 9], vec![1.0, 1.0, 1.0, 1.0], 2.0),
        (&[0, 1, 2], vec![1.0, 3.0, 1.0], 0.0),
    ];
    let mut worst = 0.0f64;
    let mut lines = Vec::new();
    for (k, (exps, coeffs, x)) in cases.iter().enumerate() {
        let f = ExpSum::univariate(exps, coeffs.iter().map(|&v| c(v)).collect()).unwrap();
        let mut dense = vec![0.0; *exps.last().unwrap() as usize + 1];
        for (e, v) in exps.iter().zip(coeffs) {
            dense[*e as usize] = *v;
        }
        let order = companion_log_moduli(&dense).iter().filter(|l| **l < *x).count() as f64;
        let g = ronkin_gradient(&f, &[*x], 1e-3, 100_000, 10 + k as u64).unwrap()[0];
        worst = worst.max((g - order).abs());
        lines.push(format!("{g:.4} vs {order}"));
    }
    report(
        10,
        "Ronkin gradient equals the order",
        worst < 0.05,
        t.elapsed(),
        Duration::from_secs(120),
        &lines.join(", "),
    );
}
