//! Acceptance suite: one line per criterion with its tolerance, worst
//! observed error and runtime. Run with `cargo test --test acceptance -- --nocapture`.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use adelic_core::adelic::{
    calibrate_phase, verify_beta_quadratic_principal, verify_gamma_adelic_q, verify_gamma_adelic_q_with,
    PointSampler, RegProductReport, Verdict, VerifyOptions,
};
use adelic_core::amplitudes::{
    amplitude_adelic_check, heterotic_factorization_check, heterotic_prefactor, heterotic_shift_check,
    relation_4_25, superstring_adelic_check, superstring_proportionality, veneziano_permutation_checks,
    virasoro_permutation_checks, AmplitudeKind, MandelstamPoint, ReggeTrajectory,
};
use adelic_core::analytic::{dirichlet_l, euler_product, kronecker_symbol, riemann_zeta};
use adelic_core::characters::{DirichletCharacterSpec, GlobalCharacterQ};
use adelic_core::local::{gamma_complex, gamma_q, gamma_real};
use adelic_core::quadfield::{
    discriminant, fundamental_unit, make_field, satisfies_normalization, split_prime, Divisors, SplitCase,
};
use adelic_core::ComplexValue;

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { ok, detail: detail.into() }
}

fn c(re: f64, im: f64) -> ComplexValue {
    ComplexValue::new(re, im)
}

fn kronecker(d: i64) -> DirichletCharacterSpec {
    DirichletCharacterSpec::kronecker(d).unwrap()
}

/// Worst residual over reports that must all pass at `tol`.
fn all_pass(reports: &[RegProductReport], tol: f64) -> (bool, f64) {
    let worst = reports.iter().map(|r| r.residual.unwrap_or(f64::INFINITY)).fold(0.0, f64::max);
    let ok = reports.iter().all(|r| r.verdict == Verdict::Pass && r.residual.is_some_and(|x| x < tol));
    (ok, worst)
}

fn c1_reflection() -> Outcome {
    let mut sampler = PointSampler::new(101);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let a = sampler.complex((-2.5, 3.5), (-4.0, 4.0));
        let nu = (sampler.uniform(0.0, 2.0) as i64).min(1);
        let sign = if nu == 0 { 1.0 } else { -1.0 };
        let r = gamma_real(a, nu).unwrap() * gamma_real(1.0 - a, nu).unwrap();
        worst = worst.max((r - sign).norm());
    }
    for _ in 0..100 {
        let a = sampler.complex((-2.5, 3.5), (-4.0, 4.0));
        let nu = sampler.uniform(-3.0, 4.0).floor() as i64;
        let sign = if nu.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        let r = gamma_complex(a, nu).unwrap() * gamma_complex(1.0 - a, nu).unwrap();
        worst = worst.max((r - sign).norm());
    }
    for _ in 0..100 {
        let a = sampler.complex((-2.5, 3.5), (-4.0, 4.0));
        let q = [2u64, 3, 4, 5, 7, 9, 25][(sampler.uniform(0.0, 7.0) as usize).min(6)];
        let r = gamma_q(a, q).unwrap() * gamma_q(1.0 - a, q).unwrap();
        worst = worst.max((r - 1.0).norm());
    }
    outcome(worst < 1e-10, format!("300 points, max residual {worst:.2e} (tol 1e-10)"))
}

fn c2_analytic() -> Outcome {
    let errs = [
        ("ζ(2)", (riemann_zeta(c(2.0, 0.0)).unwrap() - PI * PI / 6.0).norm(), 1e-10),
        ("ζ(-1)", (riemann_zeta(c(-1.0, 0.0)).unwrap() + 1.0 / 12.0).norm(), 1e-10),
        ("L(1,χ₋₄)", (dirichlet_l(c(1.0, 0.0), &kronecker(-4)).unwrap() - PI / 4.0).norm(), 1e-10),
        ("L(2,χ₋₄)", (dirichlet_l(c(2.0, 0.0), &kronecker(-4)).unwrap() - 0.915_965_594_2).norm(), 1e-9),
    ];
    let mut ok = errs.iter().all(|(_, e, t)| e < t);
    let mut detail: Vec<String> = errs.iter().map(|(n, e, _)| format!("{n} {e:.1e}")).collect();
    let mut worst_euler = 0.0f64;
    for chi in [DirichletCharacterSpec::principal(1), kronecker(-4), kronecker(5), "mod=7;g1=1/6".parse().unwrap()] {
        for s in [c(3.0, 0.0), c(3.0, 7.5), c(3.0, -20.0)] {
            let e = (euler_product(s, &chi, 100_000) - dirichlet_l(s, &chi).unwrap()).norm();
            worst_euler = worst_euler.max(e);
        }
    }
    ok &= worst_euler < 1e-5;
    detail.push(format!("Euler products at Re s = 3 to 10^5: {worst_euler:.1e} (tol 1e-5)"));
    outcome(ok, detail.join(", "))
}

fn c3_trivial_gamma() -> Outcome {
    let g = GlobalCharacterQ::principal();
    let mut reports = Vec::new();
    let mut skipped = 0;
    for i in 0..5 {
        for j in 0..5 {
            let a = c(0.3 + 0.1 * i as f64, 2.5 * j as f64);
            let r = verify_gamma_adelic_q(a, &g).unwrap();
            if r.verdict == Verdict::Inconclusive {
                skipped += 1;
            } else {
                reports.push(r);
            }
        }
    }
    let (ok, worst) = all_pass(&reports, 1e-8);
    let spot = verify_gamma_adelic_q(c(2.0, 0.0), &g).unwrap();
    let (l, r) = (spot.lhs.unwrap(), spot.rhs.unwrap());
    let spot_err = (l - 1.0).norm().max((r - 1.0).norm());
    outcome(
        ok && spot_err < 1e-8 && reports.len() + skipped == 25,
        format!(
            "{} grid points, {skipped} guarded, max residual {worst:.2e} (tol 1e-8); α = 2: lhs = {l:.12}, rhs = {r}",
            reports.len()
        ),
    )
}

fn c4_sqrt_disc() -> Outcome {
    let mut worst = 0.0f64;
    let mut ok = true;
    let mut sampler = PointSampler::new(404);
    for d in [-1, -2, -3, -7, -11, 2, 3, 7] {
        let field = make_field(d).unwrap();
        let reports: Vec<_> = (0..20)
            .map(|_| verify_beta_quadratic_principal(&field, &sampler.beta_point((0.2, 0.8), (-5.0, 5.0))).unwrap())
            .collect();
        let (pass, w) = all_pass(&reports, 1e-8);
        ok &= pass;
        worst = worst.max(w);
    }
    let gauss = verify_beta_quadratic_principal(&make_field(-1).unwrap(), &sampler.beta_point((0.2, 0.8), (-5.0, 5.0))).unwrap();
    let gauss_err = (gauss.lhs.unwrap() - 2.0).norm();
    outcome(
        ok && gauss_err < 1e-8,
        format!("8 fields × 20 points, max residual {worst:.2e} (tol 1e-8); Gauss field lhs - 2 = {gauss_err:.1e}"),
    )
}

fn c5_ramified_gamma() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for text in ["kronecker:-4", "mod=5;g1=1/4"] {
        let g = GlobalCharacterQ::from_character(text.parse().unwrap());
        let opts = VerifyOptions::default();
        let mut sampler = PointSampler::new(505);
        let modulus: Vec<_> = (0..20)
            .map(|_| verify_gamma_adelic_q(sampler.complex((0.2, 0.8), (-8.0, 8.0)), &g).unwrap().judged_on_modulus())
            .collect();
        let worst_mod = modulus.iter().map(|r| r.modulus_defect().unwrap()).fold(0.0, f64::max);
        ok &= modulus.iter().all(|r| r.verdict == Verdict::Pass) && worst_mod < 1e-8;

        let phase = calibrate_phase(&g, &opts).unwrap();
        let calibrated = VerifyOptions { phase, ..opts };
        let fresh: Vec<_> = (0..20)
            .map(|_| verify_gamma_adelic_q_with(sampler.complex((0.2, 0.8), (-8.0, 8.0)), &g, &calibrated).unwrap())
            .collect();
        let (pass, worst) = all_pass(&fresh, 1e-8);
        ok &= pass;
        parts.push(format!("{text}: |lhs|/|rhs| defect {worst_mod:.1e}, phase {phase:.3}, calibrated residual {worst:.1e}"));
    }
    outcome(ok, format!("{} (tol 1e-8)", parts.join("; ")))
}

fn c6_splitting() -> Outcome {
    let primes: Vec<u64> = (2..1000).filter(|&p| (2..p).take_while(|k| k * k <= p).all(|k| p % k != 0)).collect();
    let mut checked = 0;
    let mut bad = Vec::new();
    for d in [-1i64, -2, -3, -7, -11, -19, -43, -67, -163] {
        let field = make_field(d).unwrap();
        let disc = discriminant(d);
        for &p in &primes {
            let f = split_prime(&field, p).unwrap();
            let expected = match kronecker_symbol(disc, p) {
                0 => f.case == SplitCase::RamifiedA,
                -1 => f.case == SplitCase::InertB && f.q == p * p,
                _ => matches!(f.case, SplitCase::SplitCPrime | SplitCase::SplitCDoublePrime) && satisfies_normalization(&f),
            };
            // exact Diophantine witnesses in i128
            let witnesses = match &f.divisors {
                Divisors::Inert => f.solution.is_none(),
                Divisors::Ramified { divisor } => field.norm(*divisor) == p as i128,
                Divisors::Split { p: a, pbar: b } => {
                    field.norm(*a) == p as i128 && field.norm(*b) == p as i128 && f.solution.is_some_and(|s| field.norm(s) == p as i128)
                }
            };
            checked += 1;
            if !(expected && witnesses) {
                bad.push(format!("d={d} p={p}"));
            }
        }
    }
    outcome(bad.is_empty(), format!("{checked} (d, p) pairs, {} mismatches {:?}", bad.len(), bad.iter().take(5).collect::<Vec<_>>()))
}

fn c7_pell() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for d in [2i64, 3, 7, 11, 19] {
        // exhaustive: least y >= 1 with x^2 - d y^2 = ±1
        let (x, y, n) = (1i128..)
            .find_map(|y| {
                let t = d as i128 * y * y;
                [(-1i8, t - 1), (1, t + 1)].into_iter().find_map(|(n, x2)| {
                    let x = (x2 as f64).sqrt().round() as i128;
                    (x * x == x2).then_some((x, y, n))
                })
            })
            .unwrap();
        let u = fundamental_unit(d).unwrap();
        let same = !u.omega_basis && u.x == x.into() && u.y == y.into() && u.norm == n;
        ok &= same;
        parts.push(format!("d={d}: {x}+{y}√d"));
    }
    outcome(ok, parts.join(", "))
}

fn c8_heterotic() -> Outcome {
    let mut sampler = PointSampler::new(808);
    let mut reports = Vec::new();
    let mut worst_prop = 0.0f64;
    for _ in 0..100 {
        let pt = MandelstamPoint::massless(sampler.uniform(-3.0, 3.0), sampler.uniform(-3.0, 3.0));
        for k in 1..=4u8 {
            reports.push(heterotic_factorization_check(&pt, k).unwrap());
        }
        for index in [-8, -6, -4, -2, 0] {
            reports.push(heterotic_shift_check(pt.s, index).unwrap());
        }
        for k in [1u8, 3] {
            let ratio = superstring_proportionality(&pt, k).unwrap();
            let pre = heterotic_prefactor(k, &pt, false).unwrap();
            worst_prop = worst_prop.max((ratio - pre).norm());
        }
    }
    let (ok, worst) = all_pass(&reports, 1e-10);
    let pt = MandelstamPoint::massless(1.0, 2.0);
    let printed: Vec<String> = (1..=4u8)
        .map(|k| format!("{}", (heterotic_prefactor(k, &pt, true).unwrap() / heterotic_prefactor(k, &pt, false).unwrap()).re))
        .collect();
    outcome(
        ok && worst_prop < 1e-10,
        format!(
            "{} checks, max residual {worst:.2e}, proportionality {worst_prop:.2e} (tol 1e-10); printed/derived prefactor signs k=1..4: {}",
            reports.len(),
            printed.join(", ")
        ),
    )
}

fn c9_relations() -> Outcome {
    let v = ReggeTrajectory::tachyon_veneziano();
    let w = ReggeTrajectory::tachyon_virasoro();
    let mut sampler = PointSampler::new(909);
    let mut reports = Vec::new();
    let mut guarded = 0;
    for _ in 0..50 {
        let pt = MandelstamPoint::new(sampler.uniform(-6.0, 2.0), sampler.uniform(-6.0, 2.0), v.mass_sq_sum);
        reports.push(relation_4_25(&pt, &v).unwrap());
        reports.extend(veneziano_permutation_checks(&pt, &v).unwrap());
        let pt = MandelstamPoint::new(sampler.uniform(-24.0, 8.0), sampler.uniform(-24.0, 8.0), w.mass_sq_sum);
        for signs in [[0, 0, 0], [1, -1, 0], [2, -1, -1], [3, 1, -4]] {
            reports.extend(virasoro_permutation_checks(&pt, &w, signs).unwrap());
        }
    }
    reports.retain(|r| {
        let keep = r.verdict != Verdict::Inconclusive;
        guarded += usize::from(!keep);
        keep
    });
    let (ok, worst) = all_pass(&reports, 1e-10);
    outcome(ok, format!("{} relations at 50 points ({guarded} on poles), max residual {worst:.2e} (tol 1e-10)", reports.len()))
}

fn c10_amplitude_adelic() -> Outcome {
    let opts = VerifyOptions::default();
    let mut sampler = PointSampler::new(1010);
    let mut reports = Vec::new();
    let cases = [
        (2, AmplitudeKind::Veneziano, ReggeTrajectory::tachyon_veneziano(), 1.0),
        (-1, AmplitudeKind::Virasoro, ReggeTrajectory::tachyon_virasoro(), 4.0),
    ];
    for (d, kind, traj, scale) in cases {
        let field = make_field(d).unwrap();
        let mut n = 0;
        while n < 10 {
            let pt = MandelstamPoint::new(scale * sampler.uniform(-4.0, 0.0), scale * sampler.uniform(-4.0, 0.0), traj.mass_sq_sum);
            let r = amplitude_adelic_check(&field, &pt, &traj, kind, &opts).unwrap();
            if r.verdict != Verdict::Inconclusive {
                reports.push(r);
                n += 1;
            }
        }
    }
    let (ok, worst) = all_pass(&reports, 1e-8);
    outcome(ok, format!("V over Q(√2), W over Q(i), 10 points each, max residual {worst:.2e} (tol 1e-8)"))
}

fn c11_superstring_adelic() -> Outcome {
    let chi = GlobalCharacterQ::from_character(kronecker(-4));
    let chars = [chi.clone(), chi.clone(), chi];
    let mut sampler = PointSampler::new(1111);
    let mut worst_mod = 0.0f64;
    let mut worst_rhs = 0.0f64;
    let mut worst_full = 0.0f64;
    for _ in 0..10 {
        let pt = MandelstamPoint::massless(sampler.uniform(-1.5, 0.0), sampler.uniform(-1.5, 0.0));
        let r = superstring_adelic_check(&pt, &chars, &VerifyOptions::default()).unwrap();
        worst_full = worst_full.max(r.residual.unwrap());
        worst_rhs = worst_rhs.max((r.rhs.unwrap().norm() - 8.0).abs());
        worst_mod = worst_mod.max(r.modulus_defect().unwrap());
    }
    outcome(
        worst_mod < 1e-8 && worst_rhs < 1e-12,
        format!("|lhs|/|rhs| defect {worst_mod:.1e} (tol 1e-8), ||rhs| - 8| {worst_rhs:.1e}, full residual {worst_full:.1e}"),
    )
}

#[test]
fn acceptance() {
    let criteria: [(&str, Duration, fn() -> Outcome); 11] = [
        ("local reflection formulas", Duration::from_secs(1), c1_reflection),
        ("analytic engine", Duration::from_secs(5), c2_analytic),
        ("gamma product formula, trivial character", Duration::from_secs(5), c3_trivial_gamma),
        ("beta product formula over quadratic fields", Duration::from_secs(30), c4_sqrt_disc),
        ("ramified gamma product formula", Duration::from_secs(10), c5_ramified_gamma),
        ("prime splitting", Duration::from_secs(10), c6_splitting),
        ("fundamental units", Duration::from_secs(1), c7_pell),
        ("heterotic factorizations and shifts", Duration::from_secs(5), c8_heterotic),
        ("amplitude relations", Duration::from_secs(1), c9_relations),
        ("amplitude product formulas", Duration::from_secs(10), c10_amplitude_adelic),
        ("superstring product formula", Duration::from_secs(5), c11_superstring_adelic),
    ];
    println!();
    let suite = Instant::now();
    let mut failures = Vec::new();
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        let elapsed = start.elapsed();
        let ok = o.ok && elapsed <= *budget;
        println!(
            "[{}] {:>2}. {name}: {} [{:.3}s / {}s]",
            if ok { "PASS" } else { "FAIL" },
            i + 1,
            o.detail,
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
        if !ok {
            failures.push(i + 1);
        }
    }
    let total = suite.elapsed();
    println!("suite: {:.2}s (budget 120s)", total.as_secs_f64());
    assert!(failures.is_empty() && total.as_secs() < 120, "failed criteria: {failures:?}");
}
