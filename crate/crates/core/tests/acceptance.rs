//! End-to-end acceptance suite. Runs without the libtest harness so the
//! PASS/FAIL lines are always printed; exits nonzero if any criterion fails.

use std::f64::consts::TAU;
use std::time::Instant;

use polycanon::cli::run;
use polycanon::functional::instances::{random_h0, random_instance, FAMILIES};
use polycanon::functional::{
    alpha_coeffs, apply_l, apply_t, beta_coeffs, functional_residual, stability_constant, containment_check,
    identity_gap, CheckOptions, RootConfig,
};
use polycanon::germs::{random_factored_germ, random_germ};
use polycanon::levinson::{decompose, decompose_newton, transfer_y, LevinsonJson};
use polycanon::mixed::{binomial_factor, estimate_coefficient, exact_coefficient, exponential_factor, FactorSystem};
use polycanon::series::{circle_norm, DiskSpec, SeriesJson, UniSeries};
use polycanon::weierstrass::{prepare, WeierstrassJson};
use polycanon::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

/// Coefficient decay per degree of the random Levinson germs.
const GERM_DECAY: f64 = 0.5;

fn disk() -> DiskSpec {
    DiskSpec::new(1.0, 0.75, 1024).unwrap()
}

fn configs(seed: u64, count: usize, k_max: usize) -> Vec<RootConfig> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let k = rng.gen_range(1..=k_max);
            RootConfig::random(&mut rng, k, 0.2, disk()).unwrap()
        })
        .collect()
}

fn operator_inverse() -> Outcome {
    let mut worst = 0.0f64;
    for config in configs(101, 50, 5) {
        for n in 0..=30 {
            let zn = UniSeries::monomial(30, n, Complex64::new(1.0, 0.0));
            let back = apply_l(&apply_t(&zn, &config, 31), &config).map_err(|e| e.to_string())?;
            worst = worst.max(back.max_abs_diff(&zn));
        }
    }
    let detail = format!("max |L(T z^n) - z^n| = {worst:.2e} over 50 configs, n <= 30");
    if worst <= 1e-12 { Ok(detail) } else { Err(detail) }
}

fn convolution_and_growth() -> Outcome {
    let mut conv = 0.0f64;
    let mut growth_ok = true;
    let mut worst_ratio = 0.0f64;
    for config in configs(102, 50, 5) {
        let alpha = alpha_coeffs(&config, 40);
        let beta = beta_coeffs(&alpha).map_err(|e| e.to_string())?;
        for n in 0..=40 {
            for i in 0..=n {
                let s: Complex64 = (i..=n).map(|j| beta[n - j] * alpha[j - i]).sum();
                let want = if n == i { 1.0 } else { 0.0 };
                conv = conv.max((s - want).norm());
            }
            let bound = (2.0 * config.rho).powi(n as i32);
            if beta[n].norm() > bound * (1.0 + 1e-9) + 1e-300 {
                growth_ok = false;
            }
            if bound > 0.0 {
                worst_ratio = worst_ratio.max(beta[n].norm() / bound);
            }
        }
    }
    let detail = format!("convolution error {conv:.2e}, max |beta_n|/(2 rho)^n = {worst_ratio:.4}");
    if conv <= 1e-12 && growth_ok { Ok(detail) } else { Err(detail) }
}

fn stability_inequality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let mut worst = f64::INFINITY;
    let mut failures = 0;
    let configs = configs(104, 20, 5);
    for config in &configs {
        let c = stability_constant(config);
        for _ in 0..100 {
            let f = random_h0(&mut rng, 24, 0.75, 1024, 1.0);
            let lf = apply_l(&f, config).map_err(|e| e.to_string())?;
            let ratio = circle_norm(&lf, 0.75, 1024) / c;
            worst = worst.min(ratio);
            if ratio < 0.9 {
                failures += 1;
            }
        }
    }
    let detail = format!("min ||Lf||/(c ||f||) = {worst:.4} over 20 configs x 100 f, {failures} below 0.9");
    if failures == 0 { Ok(detail) } else { Err(detail) }
}

fn gap_certificate() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    let mut failures = 0;
    let mut identity = 0.0f64;
    let mut min_margin = f64::INFINITY;
    for config in configs(106, 100, 4) {
        let delta = polycanon::functional::delta(&config, stability_constant(&config));
        let size = delta * rng.gen_range(0.05..=0.5);
        let f = random_h0(&mut rng, 16, 0.75, 1024, size);
        let y = &UniSeries::identity(16) + &f;
        let report = identity_gap(&y, &config).map_err(|e| e.to_string())?;
        if !(report.verdict && report.lhs > 0.0 && report.lhs >= 0.99 * report.rhs_bound) {
            failures += 1;
        }
        min_margin = min_margin.min(report.lhs / report.rhs_bound);
        identity = identity.max(functional_residual(&UniSeries::identity(16), &config).map_err(|e| e.to_string())?);
    }
    let detail = format!("{failures}/100 verdict failures, min lhs/rhs = {min_margin:.3}, residual(Id) = {identity:.1e}");
    if failures == 0 && identity <= 1e-14 { Ok(detail) } else { Err(detail) }
}

fn root_containment() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(107);
    let mut inconsistent = 0;
    let mut mislabelled = 0;
    let mut worst_fact = 0.0f64;
    let mut holds = 0;
    for i in 0..200 {
        let inst = random_instance(&mut rng, FAMILIES[i % FAMILIES.len()]).map_err(|e| e.to_string())?;
        let report = containment_check(&inst.p, &inst.q, &inst.y, &inst.disk, &CheckOptions::default())
            .map_err(|e| format!("{:?}: {e}", inst.family))?;
        if !report.consistent() {
            inconsistent += 1;
        }
        if report.holds != inst.contained {
            mislabelled += 1;
        }
        if let Some(r) = report.factorization_residual {
            holds += 1;
            worst_fact = worst_fact.max(r);
        }
    }
    let detail = format!(
        "{inconsistent} inconsistent, {mislabelled} against construction, {holds} factorizations, worst {worst_fact:.1e}"
    );
    if inconsistent == 0 && mislabelled == 0 && worst_fact <= 1e-8 { Ok(detail) } else { Err(detail) }
}

fn weierstrass_recovery() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(108);
    let (mut coeff_err, mut residual) = (0.0f64, 0.0f64);
    for i in 0..20 {
        let d = 2 + i % 2;
        let k = 1 + i % 3;
        let g = random_factored_germ(&mut rng, d, k, 8).map_err(|e| e.to_string())?;
        let form = prepare(&g.u, 8).map_err(|e| e.to_string())?;
        if form.k != k {
            return Err(format!("order {} detected, expected {k}", form.k));
        }
        coeff_err = coeff_err.max(form.v.max_abs_diff(&g.v0));
        for (got, want) in form.u.iter().zip(&g.coeffs) {
            coeff_err = coeff_err.max(got.max_abs_diff(want));
        }
        residual = residual.max(form.residual(&g.u).map_err(|e| e.to_string())?.max_abs());
    }
    let detail = format!("coefficient error {coeff_err:.1e}, residual {residual:.1e}");
    if coeff_err <= 1e-9 && residual <= 1e-9 { Ok(detail) } else { Err(detail) }
}

fn levinson_uniqueness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(109);
    let (mut dev, mut transfer, mut residual) = (0.0f64, 0.0f64, 0.0f64);
    for i in 0..20 {
        let d = 2 + i % 2;
        let k = 2 + (i / 2) % 2;
        let u = random_germ(&mut rng, d, k, 8, GERM_DECAY).map_err(|e| e.to_string())?;
        let graded = decompose(&u, 8).map_err(|e| e.to_string())?;
        let newton = decompose_newton(&u, 8).map_err(|e| e.to_string())?;
        let check = graded.uniqueness_check(&newton, 1e-8).map_err(|e| e.to_string())?;
        if !(check.v_match && check.x_match) {
            return Err(format!("germ {i}: representations differ by {:.2e}", check.max_dev));
        }
        dev = dev.max(check.max_dev);
        for form in [&graded, &newton] {
            residual = residual.max(form.residual(&u).map_err(|e| e.to_string())?.max_abs());
        }
        let point: Vec<Complex64> = (0..d - 1)
            .map(|_| Complex64::from_polar(0.05 * rng.gen::<f64>() / (d - 1) as f64, rng.gen_range(0.0..TAU)))
            .collect();
        let y = transfer_y(&graded, &newton, &point, 7).map_err(|e| e.to_string())?;
        transfer = transfer.max(y.max_abs_diff(&UniSeries::identity(y.trunc())));
    }
    let detail = format!("solver deviation {dev:.1e}, transfer vs identity {transfer:.1e}, residual {residual:.1e}");
    if dev <= 1e-8 && transfer <= 1e-8 && residual <= 1e-9 { Ok(detail) } else { Err(detail) }
}

fn central_binomial(n: u64) -> f64 {
    (1..=n).fold(1.0, |acc, j| acc * (n + j) as f64 / j as f64)
}

fn saddle_asymptotics() -> Outcome {
    let binomial = |n: u64| FactorSystem::new(vec![binomial_factor(n as usize, 1).0], vec![2 * n], n).unwrap();
    let mut notes = Vec::new();
    let mut ok = true;

    let sys = binomial(40);
    let exact = central_binomial(40);
    let brute = exact_coefficient(&sys).map_err(|e| e.to_string())?.re;
    let est = estimate_coefficient(&sys).map_err(|e| e.to_string())?;
    let quad = (est.estimate / exact - 1.0).abs();
    let gauss = (est.gaussian_leading / exact - 1.0).abs();
    ok &= quad <= 0.005 && gauss <= 0.02 && (brute / exact - 1.0).abs() <= 1e-12;
    notes.push(format!("n=40 quadrature {quad:.1e}, gaussian {gauss:.2e}"));

    let mut errors = Vec::new();
    for n in [10, 20, 40, 80] {
        let r = estimate_coefficient(&binomial(n)).map_err(|e| e.to_string())?;
        errors.push((r.gaussian_leading / central_binomial(n) - 1.0).abs());
    }
    ok &= errors.windows(2).all(|w| w[1] < w[0]);
    notes.push(format!(
        "gaussian errors {}",
        errors.iter().map(|e| format!("{e:.2e}")).collect::<Vec<_>>().join(" > ")
    ));

    let sys = FactorSystem::new(vec![exponential_factor(80, 1.0).0], vec![20], 20).unwrap();
    let exact = (1..=20).fold(1.0, |acc, j| acc * 20.0 / j as f64);
    let est = estimate_coefficient(&sys).map_err(|e| e.to_string())?;
    let e_err = (est.estimate / exact - 1.0).abs();
    ok &= e_err <= 0.01;
    notes.push(format!("e^(20z) {e_err:.1e}"));

    let detail = notes.join("; ");
    if ok { Ok(detail) } else { Err(detail) }
}

fn cli_round_trip() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = |name: &str| dir.path().join(name).to_string_lossy().into_owned();
    let write = |name: &str, text: &str| std::fs::write(dir.path().join(name), text).map_err(|e| e.to_string());

    let mut rng = ChaCha8Rng::seed_from_u64(110);
    let germ = random_germ(&mut rng, 3, 2, 6, GERM_DECAY).map_err(|e| e.to_string())?;
    write("germ.json", &serde_json::to_string(&SeriesJson::from(&germ)).unwrap())?;
    write("w.json", r#"{"nvars":2,"trunc":8,"coeffs":[[[0,2],1,0],[[1,0],-1,0]]}"#)?;

    let invocations: Vec<Vec<String>> = vec![
        vec!["fe-gap".into(), "--seed".into(), "7".into()],
        vec!["fe".into(), "check-a".into(), "--seed".into(), "5".into(), "--family".into(), "composite".into()],
        vec!["weierstrass".into(), path("germ.json")],
        vec!["levinson".into(), "decompose".into(), path("germ.json")],
        vec!["gen-factor".into(), "--kind".into(), "binomial".into(), "--trunc".into(), "30".into(), "--weight".into(), "60".into(), "--n0".into(), "30".into()],
    ];
    for args in &invocations {
        let a = run(args.clone());
        let b = run(args.clone());
        if a.code != 0 || a != b {
            return Err(format!("{args:?}: exit {} / nondeterministic {}", a.code, a != b));
        }
    }

    // emitted series re-parse to equal objects
    let w = run(["weierstrass", &path("germ.json")]).stdout;
    let form: WeierstrassJson = serde_json::from_str(&w).map_err(|e| e.to_string())?;
    let back = form.to_form().map_err(|e| e.to_string())?.to_json();
    if back != form {
        return Err("weierstrass form changed on re-parse".into());
    }
    let l = run(["levinson-decompose", &path("germ.json")]).stdout;
    let lj: LevinsonJson = serde_json::from_str(&l).map_err(|e| e.to_string())?;
    if lj.to_form().map_err(|e| e.to_string())?.to_json() != lj {
        return Err("levinson form changed on re-parse".into());
    }
    let verify = format!(r#"{{"series":{},"form":{}}}"#, serde_json::to_string(&SeriesJson::from(&germ)).unwrap(), serde_json::to_string(&lj).unwrap());
    write("verify.json", &verify)?;
    let v = run(["levinson-verify", &path("verify.json")]);
    if v.code != 0 || !v.stdout.contains(r#""verdict":true"#) {
        return Err(format!("levinson-verify on emitted form: {}{}", v.stdout, v.stderr));
    }
    let gen = run(["gen-factor", "--kind", "binomial", "--power", "4", "--trunc", "4", "--n0", "2"]);
    write("b.json", &gen.stdout)?;
    let exact = run(["mp-exact", &path("b.json")]);
    if !exact.stdout.contains(r#""exact":6.0"#) {
        return Err(format!("mp-exact: {}", exact.stdout));
    }
    Ok(format!("{} invocations byte-identical, series round-trip equal", invocations.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("operator inverse L(T z^n) = z^n", operator_inverse),
        ("convolution identity and beta growth", convolution_and_growth),
        ("stability inequality ||Lf|| >= 0.9 c ||f||", stability_inequality),
        ("gap certificate near the identity", gap_certificate),
        ("local condition vs root containment", root_containment),
        ("Weierstrass recovery of V0 and P0", weierstrass_recovery),
        ("Levinson uniqueness regression", levinson_uniqueness),
        ("saddle-point estimates", saddle_asymptotics),
        ("CLI determinism and round trip", cli_round_trip),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS {}. {name} ({detail}) [{secs:.1}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {}. {name} ({detail}) [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
