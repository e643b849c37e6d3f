use std::path::Path;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{Cli, CliError, Command, FactorKind, FamilyArg, Flags, Solver, MAX_TRUNC, SAMPLES_RANGE};
use crate::functional::instances::{random_h0, random_instance, Family};
use crate::functional::{
    alpha_coeffs, apply_l, apply_t, beta_coeffs, delta, functional_residual, stability_constant, containment_check,
    identity_gap, CheckOptions, FunctionalError, RootConfig,
};
use crate::levinson::{decompose_newton_with_stats, decompose_with_stats, LevinsonJson};
use crate::mixed::{
    binomial_factor, estimate_coefficient, exact_coefficient, exponential_factor, geometric_factor, sweep,
    FactorSystem, FactorSystemJson, MixedError,
};
use crate::series::{DiskSpec, MultiSeries, Poly, SeriesError, SeriesJson, UniSeries};
use crate::weierstrass::prepare;

type Dispatch = Result<(Value, String), CliError>;

/// Resolved numeric flags, echoed in every report.
#[derive(Debug, Clone, Default, Serialize)]
struct Params {
    #[serde(skip_serializing_if = "Option::is_none")]
    trunc: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    radius: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    outer: Option<f64>,
    samples: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    tol: Option<f64>,
    seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    extra: Option<Value>,
}

#[derive(Serialize)]
struct Report<'a, T: Serialize> {
    command: &'a str,
    params: &'a Params,
    #[serde(flatten)]
    body: T,
}

fn report<T: Serialize>(command: &str, params: &Params, body: T, summary: String) -> Dispatch {
    let value = serde_json::to_value(Report { command, params, body }).map_err(CliError::compute)?;
    Ok((value, summary))
}

fn validate_flags(flags: &Flags) -> Result<(), CliError> {
    if let Some(n) = flags.trunc {
        if n > MAX_TRUNC {
            return Err(CliError::invalid("--trunc", format!("{n} exceeds {MAX_TRUNC}")));
        }
    }
    let (lo, hi) = SAMPLES_RANGE;
    if !(lo..=hi).contains(&flags.samples) {
        return Err(CliError::invalid("--samples", format!("{} not in {lo}..={hi}", flags.samples)));
    }
    if let Some(t) = flags.tol {
        if !(t > 0.0 && t.is_finite()) {
            return Err(CliError::invalid("--tol", "must be positive"));
        }
    }
    for (name, v) in [("--radius", flags.radius), ("--outer", flags.outer)] {
        if let Some(v) = v {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::invalid(name, "must be positive and finite"));
            }
        }
    }
    if let (Some(r), Some(outer)) = (flags.radius, flags.outer) {
        if r >= outer {
            return Err(CliError::invalid("--radius", format!("need r < R, got r = {r}, R = {outer}")));
        }
    }
    Ok(())
}

/// Field named in a serde data error, if any.
fn error_field(message: &str) -> String {
    message
        .split('`')
        .nth(1)
        .filter(|_| message.contains("field"))
        .unwrap_or("input")
        .to_string()
}

pub(crate) fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::invalid("input", format!("{}: {e}", path.display())))?;
    parse_json(&text, &path.display().to_string())
}

pub(crate) fn parse_json<T: DeserializeOwned>(text: &str, origin: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| {
        if e.is_data() {
            CliError::invalid(&error_field(&e.to_string()), e)
        } else {
            CliError::Parse(format!("{origin}: {e}"))
        }
    })
}

fn series_field(field: &str) -> impl Fn(SeriesError) -> CliError + '_ {
    move |e| CliError::invalid(field, e)
}

/// `--trunc`, defaulting to and bounded by the input truncation.
fn trunc_for(flags: &Flags, available: usize) -> Result<usize, CliError> {
    let n = flags.trunc.unwrap_or(available);
    if n > available {
        return Err(CliError::invalid("--trunc", format!("{n} exceeds input truncation {available}")));
    }
    if n > MAX_TRUNC {
        return Err(CliError::invalid("--trunc", format!("{n} exceeds {MAX_TRUNC}")));
    }
    Ok(n)
}

fn disk_for(flags: &Flags) -> Result<DiskSpec, CliError> {
    let outer = flags.outer.unwrap_or(1.0);
    let radius = flags.radius.unwrap_or(0.75 * outer);
    DiskSpec::new(outer, radius, flags.samples).map_err(series_field("--radius"))
}

fn root_config(roots: Vec<Complex64>, disk: DiskSpec) -> Result<RootConfig, CliError> {
    RootConfig::new(roots, disk).map_err(|e| match e {
        FunctionalError::Regime { .. } | FunctionalError::NoRoots => CliError::invalid("roots", e),
        e => CliError::compute(e),
    })
}

fn base_params(flags: &Flags) -> Params {
    Params {
        samples: flags.samples,
        seed: flags.seed,
        ..Params::default()
    }
}

pub(crate) fn dispatch(cli: &Cli) -> Dispatch {
    let flags = &cli.flags;
    validate_flags(flags)?;
    match &cli.command {
        Command::Weierstrass { input } => weierstrass(flags, input),
        Command::LevinsonDecompose { input, solver } => levinson_decompose(flags, input, *solver),
        Command::LevinsonVerify { input } => levinson_verify(flags, input),
        Command::FeResidual { input } => fe_residual(flags, input),
        Command::FeGap { input, k, scale } => fe_gap(flags, input.as_deref(), *k, *scale),
        Command::FeCheckA { input, family } => fe_check_a(flags, input.as_deref(), *family),
        Command::FeOperators { input } => fe_operators(flags, input),
        Command::MpExact { input } => mp_exact(flags, input),
        Command::MpEstimate { input } => mp_estimate(flags, input),
        Command::MpSweep { input, steps, lo, hi } => mp_sweep(flags, input, *steps, *lo, *hi),
        Command::GenFactor {
            kind,
            power,
            rate,
            weight,
            n0,
        } => gen_factor(flags, *kind, *power, *rate, *weight, *n0),
    }
}

fn read_series(path: &Path) -> Result<MultiSeries, CliError> {
    read_json::<SeriesJson>(path)?.to_series().map_err(series_field("coeffs"))
}

fn weierstrass(flags: &Flags, input: &Path) -> Dispatch {
    let u = read_series(input)?;
    if u.nvars() < 2 {
        return Err(CliError::invalid("nvars", "need at least 2 variables"));
    }
    let n = trunc_for(flags, u.trunc())?;
    let form = prepare(&u, n).map_err(CliError::compute)?;
    let residual = form.residual(&u).map_err(CliError::compute)?.max_abs();
    let params = Params {
        trunc: Some(n),
        ..base_params(flags)
    };
    #[derive(Serialize)]
    struct Body {
        #[serde(flatten)]
        form: crate::weierstrass::WeierstrassJson,
        residual: f64,
    }
    let summary = format!("weierstrass: k = {}, N = {n}, residual {residual:.3e}", form.k);
    report("weierstrass", &params, Body { form: form.to_json(), residual }, summary)
}

fn levinson_decompose(flags: &Flags, input: &Path, solver: Solver) -> Dispatch {
    let u = read_series(input)?;
    let n = trunc_for(flags, u.trunc())?;
    let (form, stats) = match solver {
        Solver::Graded => decompose_with_stats(&u, n),
        Solver::Newton => decompose_newton_with_stats(&u, n),
    }
    .map_err(CliError::compute)?;
    let residual = form.residual(&u).map_err(CliError::compute)?.max_abs();
    let params = Params {
        trunc: Some(n),
        extra: Some(serde_json::json!({ "solver": solver })),
        ..base_params(flags)
    };
    #[derive(Serialize)]
    struct Body {
        #[serde(flatten)]
        form: LevinsonJson,
        residual: f64,
        normalized: bool,
        stats: crate::levinson::SolveStats,
    }
    let summary = format!(
        "levinson-decompose: k = {}, N = {n}, residual {residual:.3e}, pivot ratio {:.3e}",
        form.k, stats.pivot_ratio
    );
    let body = Body {
        form: form.to_json(),
        residual,
        normalized: form.is_normalized(),
        stats,
    };
    report("levinson-decompose", &params, body, summary)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct VerifyInput {
    series: SeriesJson,
    form: LevinsonJson,
}

fn levinson_verify(flags: &Flags, input: &Path) -> Dispatch {
    let req: VerifyInput = read_json(input)?;
    let u = req.series.to_series().map_err(series_field("series"))?;
    let stored = req.form.to_form().map_err(|e| CliError::invalid("form", e))?;
    if stored.trunc > u.trunc() {
        return Err(CliError::invalid("form", "truncation exceeds that of the series"));
    }
    let tol = flags.tol.unwrap_or(1e-9);
    let fresh = crate::levinson::decompose(&u, stored.trunc).map_err(CliError::compute)?;
    let uniqueness = stored.uniqueness_check(&fresh, tol).map_err(CliError::compute)?;
    let residual = stored.residual(&u).map_err(CliError::compute)?.max_abs();
    let normalized = stored.is_normalized();
    let verdict = residual <= tol && normalized && uniqueness.v_match && uniqueness.x_match;
    let params = Params {
        trunc: Some(stored.trunc),
        tol: Some(tol),
        ..base_params(flags)
    };
    #[derive(Serialize)]
    struct Body {
        residual: f64,
        normalized: bool,
        uniqueness: crate::levinson::UniquenessReport,
        verdict: bool,
    }
    let summary = format!(
        "levinson-verify: {} (residual {residual:.3e}, deviation {:.3e})",
        if verdict { "PASS" } else { "FAIL" },
        uniqueness.max_dev
    );
    let body = Body {
        residual,
        normalized,
        uniqueness,
        verdict,
    };
    report("levinson-verify", &params, body, summary)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RootsAndSeries {
    roots: Vec<Complex64>,
    #[serde(alias = "f")]
    y: SeriesJson,
}

fn disk_params(flags: &Flags, disk: &DiskSpec, trunc: usize) -> Params {
    Params {
        trunc: Some(trunc),
        radius: Some(disk.radius),
        outer: Some(disk.outer),
        ..base_params(flags)
    }
}

fn fe_residual(flags: &Flags, input: &Path) -> Dispatch {
    let req: RootsAndSeries = read_json(input)?;
    let disk = disk_for(flags)?;
    let config = root_config(req.roots, disk)?;
    let y = req.y.to_uni().map_err(series_field("y"))?;
    let residual = functional_residual(&y, &config).map_err(|e| CliError::invalid("y", e))?;
    let params = disk_params(flags, &disk, y.trunc());
    let summary = format!("fe-residual: {residual:.6e} on |z| = {}", disk.radius);
    let body = serde_json::json!({ "residual": residual, "k": config.k(), "rho": config.rho });
    report("fe-residual", &params, body, summary)
}

fn fe_gap(flags: &Flags, input: Option<&Path>, k: usize, scale: f64) -> Dispatch {
    let disk = disk_for(flags)?;
    let (config, y, mut params) = match input {
        Some(path) => {
            let req: RootsAndSeries = read_json(path)?;
            let config = root_config(req.roots, disk)?;
            let y = req.y.to_uni().map_err(series_field("y"))?;
            let params = disk_params(flags, &disk, y.trunc());
            (config, y, params)
        }
        None => {
            if !(1..=8).contains(&k) {
                return Err(CliError::invalid("--k", "need 1 <= k <= 8"));
            }
            if !(scale > 0.0 && scale <= 10.0) {
                return Err(CliError::invalid("--scale", "need 0 < scale <= 10"));
            }
            let trunc = flags.trunc.unwrap_or(16);
            let mut rng = ChaCha8Rng::seed_from_u64(flags.seed);
            let config = RootConfig::random(&mut rng, k, 0.45 * disk.radius, disk).map_err(CliError::compute)?;
            let d = delta(&config, stability_constant(&config));
            let f = random_h0(&mut rng, trunc, disk.radius, disk.samples, scale * d);
            let y = &UniSeries::identity(trunc) + &f;
            let mut params = disk_params(flags, &disk, trunc);
            params.extra = Some(serde_json::json!({ "k": k, "scale": scale }));
            (config, y, params)
        }
    };
    params.trunc = Some(y.trunc());
    let gap = identity_gap(&y, &config).map_err(|e| CliError::invalid("y", e))?;
    let identity = functional_residual(&UniSeries::identity(y.trunc()), &config).map_err(CliError::compute)?;
    #[derive(Serialize)]
    struct Body {
        #[serde(flatten)]
        gap: crate::functional::GapReport,
        identity_residual: f64,
        roots: Vec<Complex64>,
    }
    let summary = format!(
        "fe-gap: lhs {:.6e} vs bound {:.6e}, verdict {}, certified {}",
        gap.lhs, gap.rhs_bound, gap.verdict, gap.certified
    );
    let body = Body {
        gap,
        identity_residual: identity,
        roots: config.roots,
    };
    report("fe-gap", &params, body, summary)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CheckInput {
    p: Vec<Complex64>,
    q: Vec<Complex64>,
    y: SeriesJson,
}

fn fe_check_a(flags: &Flags, input: Option<&Path>, family: FamilyArg) -> Dispatch {
    let (p, q, y, disk, expected) = match input {
        Some(path) => {
            let req: CheckInput = read_json(path)?;
            let p = Poly::new(req.p).map_err(series_field("p"))?;
            let q = Poly::new(req.q).map_err(series_field("q"))?;
            let y = req.y.to_uni().map_err(series_field("y"))?;
            (p, q, y, disk_for(flags)?, None)
        }
        None => {
            let family = match family {
                FamilyArg::Affine => Family::Affine,
                FamilyArg::Collision => Family::Collision,
                FamilyArg::Critical => Family::Critical,
                FamilyArg::Composite => Family::Composite,
            };
            let mut rng = ChaCha8Rng::seed_from_u64(flags.seed);
            let inst = random_instance(&mut rng, family).map_err(CliError::compute)?;
            (inst.p, inst.q, inst.y, inst.disk, Some((family, inst.contained)))
        }
    };
    let mut opts = CheckOptions::default();
    if let Some(t) = flags.tol {
        opts.premise_tol = t;
    }
    let result = containment_check(&p, &q, &y, &disk, &opts).map_err(|e| match e {
        FunctionalError::DegreeMismatch { .. } => CliError::invalid("q", e),
        FunctionalError::Premise(_) => CliError::invalid("y", e),
        FunctionalError::RootOutsideDisk(_) => CliError::invalid("p", e),
        e => CliError::compute(e),
    })?;
    let mut params = disk_params(flags, &disk, y.trunc());
    params.tol = Some(opts.premise_tol);
    if let Some((family, _)) = expected {
        params.extra = Some(serde_json::json!({ "family": family }));
    }
    #[derive(Serialize)]
    struct Body {
        #[serde(flatten)]
        result: crate::functional::ContainmentReport,
        consistent: bool,
        #[serde(skip_serializing_if = "Option::is_none")]
        contained_by_construction: Option<bool>,
        p: Vec<Complex64>,
        q: Vec<Complex64>,
        y: SeriesJson,
    }
    let summary = format!(
        "fe-check-a: local condition {}, containment {:?}, consistent {}",
        result.holds,
        result.containment,
        result.consistent()
    );
    let body = Body {
        consistent: result.consistent(),
        result,
        contained_by_construction: expected.map(|(_, c)| c),
        p: p.coeffs().to_vec(),
        q: q.coeffs().to_vec(),
        y: SeriesJson::from(&y),
    };
    report("fe-check-a", &params, body, summary)
}

fn fe_operators(flags: &Flags, input: &Path) -> Dispatch {
    let req: RootsAndSeries = read_json(input)?;
    let disk = disk_for(flags)?;
    let config = root_config(req.roots, disk)?;
    let g = req.y.to_uni().map_err(series_field("f"))?;
    let n = g.trunc();
    let alpha = alpha_coeffs(&config, n);
    let beta = beta_coeffs(&alpha).map_err(CliError::compute)?;
    let t = apply_t(&g, &config, n + 1);
    let lt = apply_l(&t, &config).map_err(CliError::compute)?;
    let lt_gap = lt.max_abs_diff(&g);
    let l = if g.coeff(0) == Complex64::default() {
        Some(SeriesJson::from(&apply_l(&g, &config).map_err(CliError::compute)?))
    } else {
        None
    };
    let c = stability_constant(&config);
    let params = disk_params(flags, &disk, n);
    let summary = format!("fe-operators: |L(T f) - f| = {lt_gap:.3e}, c = {c:.6}");
    let body = serde_json::json!({
        "alpha": alpha,
        "beta": beta,
        "t": SeriesJson::from(&t),
        "l": l,
        "lt_gap": lt_gap,
        "c": c,
        "delta": delta(&config, c),
    });
    report("fe-operators", &params, body, summary)
}

fn read_system(path: &Path) -> Result<FactorSystem, CliError> {
    read_json::<FactorSystemJson>(path)?.to_system().map_err(|e| match e {
        MixedError::Series(e) => CliError::invalid("factors", e),
        MixedError::WeightCount { .. } | MixedError::ExponentTooLarge(_) => CliError::invalid("weights", e),
        MixedError::BadRadius { .. } => CliError::invalid("radii", e),
        e => CliError::invalid("factors", e),
    })
}

fn mp_exact(flags: &Flags, input: &Path) -> Dispatch {
    let system = read_system(input)?;
    let exact = exact_coefficient(&system).map_err(CliError::compute)?;
    let params = base_params(flags);
    let summary = format!("mp-exact: [z^{}] = {}", system.n0, exact.re);
    let mut body = serde_json::json!({ "exact": exact.re });
    if exact.im != 0.0 {
        body["exact_imag"] = exact.im.into();
    }
    report("mp-exact", &params, body, summary)
}

fn mp_estimate(flags: &Flags, input: &Path) -> Dispatch {
    let system = read_system(input)?;
    let est = estimate_coefficient(&system).map_err(CliError::compute)?;
    let exact = match exact_coefficient(&system) {
        Ok(c) => Some(c.re),
        Err(MixedError::TruncationShortfall { .. }) => None,
        Err(e) => return Err(CliError::compute(e)),
    };
    let rel = |v: f64| exact.map(|e| (v - e).abs() / e.abs());
    let params = base_params(flags);
    let summary = format!(
        "mp-estimate: estimate {:.10e}, gaussian {:.10e}, exact {}",
        est.estimate,
        est.gaussian_leading,
        exact.map_or("unavailable".to_string(), |e| format!("{e:.10e}"))
    );
    let body = serde_json::json!({
        "exact": exact,
        "estimate": est.estimate,
        "gaussian": est.gaussian_leading,
        "rel_err": rel(est.estimate),
        "gaussian_rel_err": rel(est.gaussian_leading),
        "saddle": est,
    });
    report("mp-estimate", &params, body, summary)
}

fn mp_sweep(flags: &Flags, input: &Path, steps: usize, lo: f64, hi: f64) -> Dispatch {
    if !(0.0 < lo && lo < hi && hi < 1.0) {
        return Err(CliError::invalid("--lo", format!("need 0 < lo < hi < 1, got [{lo}, {hi}]")));
    }
    if !(1..=1000).contains(&steps) {
        return Err(CliError::invalid("--steps", "need 1 <= steps <= 1000"));
    }
    let system = read_system(input)?;
    let result = sweep(&system, lo, hi, steps, flags.samples).map_err(CliError::compute)?;
    let params = Params {
        extra: Some(serde_json::json!({ "steps": steps, "lo": lo, "hi": hi })),
        ..base_params(flags)
    };
    let solved = result.points.iter().filter(|p| p.x.is_some()).count();
    let summary = format!(
        "mp-sweep: {solved}/{} critical points, continuous {}",
        result.points.len(),
        result.continuous
    );
    report("mp-sweep", &params, result, summary)
}

fn gen_factor(
    flags: &Flags, kind: FactorKind, power: u32, rate: f64, weight: u64, n0: Option<u64>) -> Dispatch {
    let trunc = flags.trunc.unwrap_or(32);
    if !rate.is_finite() {
        return Err(CliError::invalid("--rate", "must be finite"));
    }
    let (f, radius) = match kind {
        FactorKind::Geometric => geometric_factor(trunc),
        FactorKind::Exponential => exponential_factor(trunc, rate),
        FactorKind::Binomial => {
            if power as usize > trunc {
                return Err(CliError::invalid("--power", format!("{power} exceeds --trunc {trunc}")));
            }
            binomial_factor(trunc, power)
        }
    };
    let n0 = n0.unwrap_or(trunc as u64);
    let system = FactorSystem::with_radii(vec![f], vec![weight], n0, vec![radius])
        .map_err(|e| CliError::invalid("--weight", e))?;
    let summary = format!("gen-factor: {kind:?} through z^{trunc}");
    // emitted without a params block so it feeds straight into mp-* commands
    let value = serde_json::to_value(system.to_json()).map_err(CliError::compute)?;
    Ok((value, summary))
}
