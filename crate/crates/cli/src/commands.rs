use std::path::Path;

use entmix::applications::{
    channel_comparison, fano_crossover, landauer_bounds, landauer_heat_oracle, lsi_deficit_bound,
    tv_fano_estimator_bound, ChannelRow, EnergeticsSpec, LandauerBand,
};
use entmix::bounds::{deficit_lower, deficit_upper_tv, BoundReport};
use entmix::density::{auto_certificate, minimal_certificate, ComponentDensity, MixtureModel, SeparationCertificate};
use entmix::divergence::{
    jsd, kl, skew_chi2, skew_divergence, total_variation, Backend, DensityPair, DivergenceSpec,
};
use entmix::oracle::{deficit_paths, mixture_entropy};
use entmix::{Estimate, McSpec, QuadratureSpec};
use serde_json::{json, Value};

use crate::report::{csv_number as c, Report, Unit};
use crate::{BackendArg, Cli, Command, Failure, GridArgs, OracleMode, SweepParam, WellArgs};

const ORACLE_AUTO_LIMIT: usize = 200;

pub fn name(c: &Command) -> &'static str {
    match c {
        Command::Entropy(_) => "entropy",
        Command::Deficit { .. } => "deficit",
        Command::Divergence { .. } => "divergence",
        Command::Bounds { .. } => "bounds",
        Command::Channel(_) => "channel",
        Command::Landauer { .. } => "landauer",
        Command::Sweep { .. } => "sweep",
    }
}

fn oracle_spec(cli: &Cli) -> DivergenceSpec {
    DivergenceSpec {
        quadrature: QuadratureSpec { abs_tol: cli.tol, rel_tol: cli.tol, max_subdivisions: cli.max_subdivisions },
        mc: McSpec { seed: cli.seed, samples: cli.samples, ..McSpec::default() },
        backend: match cli.backend {
            BackendArg::Auto => Backend::Auto,
            BackendArg::Quadrature => Backend::Quadrature,
            BackendArg::MonteCarlo => Backend::MonteCarlo,
        },
        ..DivergenceSpec::default()
    }
}

fn settings(cli: &Cli) -> Value {
    let backend = match cli.backend {
        BackendArg::Auto => "auto",
        BackendArg::Quadrature => "quadrature",
        BackendArg::MonteCarlo => "monte_carlo",
    };
    json!({"seed": cli.seed, "samples": cli.samples, "backend": backend,
           "tol": cli.tol, "max_subdivisions": cli.max_subdivisions})
}

/// Reads a model file, returning the model and the parsed JSON for echoing.
fn load(path: &Path) -> Result<(MixtureModel, Value), Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::parse(format!("cannot read {}: {e}", path.display())))?;
    let raw: Value = serde_json::from_str(&text)
        .map_err(|e| Failure::parse(format!("{}: {e}", path.display())))?;
    let model = MixtureModel::from_json(&text)?;
    Ok((model, raw))
}

/// Runs the command, filling `report`. Table commands also return their CSV.
pub fn run(cli: &Cli, report: &mut Report) -> Result<Option<String>, Failure> {
    let spec = oracle_spec(cli);
    spec.quadrature.validate()?;
    spec.mc.validate()?;
    report.put("settings", settings(cli));
    match &cli.command {
        Command::Entropy(m) => {
            let (model, raw) = load(&m.model)?;
            report.put("inputs", json!({"model": raw}));
            let h = mixture_entropy(&model, &spec)?;
            report.put("entropy", report.estimate(&h, Unit::Info));
            report.put("weight_entropy", report.exact(model.weight_entropy(), Unit::Info));
            Ok(None)
        }
        Command::Deficit { model, lambda } => {
            let (model, raw) = load(&model.model)?;
            report.put("inputs", json!({"model": raw, "lambda": lambda}));
            deficit(&model, *lambda, &spec, report)?;
            Ok(None)
        }
        Command::Divergence { model, reference, t } => {
            let grid = parse_grid(t)?;
            let (mu, raw) = load(&model.model)?;
            let (pair, reference_raw) = match reference {
                Some(p) => {
                    let (nu, raw_nu) = load(p)?;
                    (DensityPair::new(mu, nu)?, raw_nu)
                }
                None => {
                    if mu.len() < 2 {
                        return Err(Failure::parse("--model needs two components when --reference is absent"));
                    }
                    let c: &[ComponentDensity] = mu.components();
                    (DensityPair::components(c[0].clone(), c[1].clone())?, Value::Null)
                }
            };
            report.put("inputs", json!({"model": raw, "reference": reference_raw, "t": grid}));
            divergence(&pair, &grid, &spec, report)?;
            Ok(None)
        }
        Command::Bounds { model, lambda } => {
            let (model, raw) = load(&model.model)?;
            report.put("inputs", json!({"model": raw, "lambda": lambda}));
            bounds(&model, *lambda, &spec, report)?;
            Ok(None)
        }
        Command::Channel(g) => {
            report.put("inputs", json!({"N": g.n, "lambda": g.lambda, "sigma": g.sigma}));
            let row = channel_row(g, g.n, g.lambda, g.sigma, &spec)?;
            report.put("row", channel_json(report, &row));
            if let Some(n0) = fano_crossover(g.lambda, g.sigma, g.n.max(2))? {
                report.put("fano_crossover", json!(n0));
            }
            Ok(Some(channel_csv(&[("N", g.n as f64, row)])))
        }
        Command::Landauer { well, no_oracle } => {
            let s = energetics(well)?;
            report.put("inputs", serde_json::to_value(s).unwrap());
            let (band, heat) = landauer_row(&s, !no_oracle, &spec)?;
            report.put("band", landauer_json(report, &band, heat.as_ref()));
            Ok(Some(landauer_csv(&[("a", s.a, band, heat)])))
        }
        Command::Sweep { param, from, to, steps, grid } => {
            let values = linspace(*from, *to, *steps)?;
            report.put(
                "inputs",
                json!({"param": param_name(*param), "from": from, "to": to, "steps": steps,
                       "N": grid.n, "lambda": grid.lambda, "sigma": grid.sigma}),
            );
            sweep(*param, &values, grid, &spec, report)
        }
    }
}

fn certificate(model: &MixtureModel, lambda: Option<f64>) -> entmix::Result<SeparationCertificate> {
    match lambda {
        Some(l) => minimal_certificate(model, l),
        None => auto_certificate(model),
    }
}

/// Lower-bound failures caused by the model's shape are reported in place;
/// numerical failures abort.
fn lower_or_note(
    model: &MixtureModel,
    lambda: Option<f64>,
    spec: &DivergenceSpec,
) -> Result<Result<(SeparationCertificate, BoundReport), String>, Failure> {
    let attempt = certificate(model, lambda).and_then(|c| Ok((c, deficit_lower(model, &c, &spec.quadrature)?)));
    match attempt {
        Ok(x) => Ok(Ok(x)),
        Err(e) if e.is_numeric() => Err(e.into()),
        Err(e) => Ok(Err(e.to_string())),
    }
}

fn certificate_json(c: &SeparationCertificate) -> Value {
    json!({"lambda": c.lambda(), "m": c.m(), "tau": c.tau(), "verified": c.is_verified()})
}

fn deficit(model: &MixtureModel, lambda: Option<f64>, spec: &DivergenceSpec, report: &mut Report) -> Result<(), Failure> {
    let paths = deficit_paths(model, spec)?;
    let oracle = paths.via_divergences;
    report.put("oracle", report.estimate(&oracle, Unit::Info));
    report.put(
        "routes",
        json!({
            "mixture_entropy": report.estimate(&paths.mixture_entropy, Unit::Info),
            "via_entropies": report.estimate(&paths.via_entropies, Unit::Info),
            "via_divergences": report.estimate(&paths.via_divergences, Unit::Info),
            "conditional_entropy": report.estimate(&paths.conditional_entropy, Unit::Info),
            "weight_entropy": report.exact(paths.weight_entropy, Unit::Info),
        }),
    );
    let upper = deficit_upper_tv(model, spec)?;
    report.put("upper", report.bound(&upper, Unit::Info));
    let slack = oracle.error + 1e-9;
    let mut within = oracle.value <= upper.value + slack;
    match lower_or_note(model, lambda, spec)? {
        Ok((cert, lower)) => {
            within &= lower.value <= oracle.value + slack;
            report.put("certificate", certificate_json(&cert));
            report.put("lower", report.bound(&lower, Unit::Info));
        }
        Err(note) => report.put("lower", json!({"unavailable": note})),
    }
    report.put("sandwiched", json!(within));
    Ok(())
}

fn bounds(model: &MixtureModel, lambda: Option<f64>, spec: &DivergenceSpec, report: &mut Report) -> Result<(), Failure> {
    let mut list = Vec::new();
    let upper = deficit_upper_tv(model, spec)?;
    list.push(json!({"name": "deficit_upper", "report": report.bound(&upper, Unit::Info)}));
    match lower_or_note(model, lambda, spec)? {
        Ok((cert, lower)) => list.push(json!({
            "name": "deficit_lower",
            "certificate": certificate_json(&cert),
            "report": report.bound(&lower, Unit::Info),
        })),
        Err(note) => list.push(json!({"name": "deficit_lower", "unavailable": note})),
    }
    if model.len() >= 2 {
        let fano = tv_fano_estimator_bound(model, spec)?;
        list.push(json!({"name": "tv_fano_estimator", "report": report.bound(&fano, Unit::Plain)}));
    }
    if model.components().iter().all(ComponentDensity::is_unit_gaussian) {
        let lsi = lsi_deficit_bound(model, spec)?;
        list.push(json!({"name": "lsi_deficit", "report": report.bound(&lsi, Unit::Info)}));
    }
    report.put("bounds", Value::Array(list));
    Ok(())
}

fn divergence(pair: &DensityPair, grid: &[f64], spec: &DivergenceSpec, report: &mut Report) -> Result<(), Failure> {
    report.put("tv", report.estimate(&total_variation(pair, spec)?, Unit::Plain));
    report.put("kl", report.estimate(&kl(pair, spec)?, Unit::Info));
    report.put("jsd", report.estimate(&jsd(pair, spec)?, Unit::Info));
    let mut rows = Vec::new();
    for &t in grid {
        let s = skew_divergence(pair, t, spec)?;
        let chi = skew_chi2(pair, t, spec)?;
        rows.push(json!({
            "t": t,
            "skew_kl": report.estimate(&s, Unit::Info),
            "skew_chi2": report.estimate(&chi, Unit::Plain),
        }));
        report.put("grid", Value::Array(rows.clone()));
    }
    Ok(())
}

fn channel_row(g: &GridArgs, n: usize, lambda: f64, sigma: f64, spec: &DivergenceSpec) -> entmix::Result<ChannelRow> {
    let with_oracle = match g.oracle {
        OracleMode::Always => true,
        OracleMode::Never => false,
        OracleMode::Auto => n <= ORACLE_AUTO_LIMIT,
    };
    channel_comparison(n, lambda, sigma, with_oracle, spec)
}

fn channel_json(r: &Report, row: &ChannelRow) -> Value {
    json!({
        "N": row.n,
        "lambda": row.lambda,
        "sigma": row.sigma,
        "oracle": row.oracle.map(|e| r.estimate(&e, Unit::Info)),
        "paper_bound": r.exact(row.paper_bound, Unit::Info),
        "fano_bound": r.exact(row.fano_bound, Unit::Info),
        "ozwy_bound": r.exact(row.ozwy_bound, Unit::Info),
        "bayes_error": r.exact(row.bayes_error, Unit::Plain),
    })
}

// CSV tables are always in nats.
fn channel_csv(rows: &[(&str, f64, ChannelRow)]) -> String {
    let mut out = String::from("parameter,value,oracle,oracle_error,paper_bound,fano_bound,ozwy_bound,bayes_error\n");
    for (p, v, r) in rows {
        let (o, oe) = match r.oracle {
            Some(e) => (c(e.value), c(e.error)),
            None => (String::new(), String::new()),
        };
        out += &format!(
            "{p},{},{o},{oe},{},{},{},{}\n",
            c(*v),
            c(r.paper_bound),
            c(r.fano_bound),
            c(r.ozwy_bound),
            c(r.bayes_error)
        );
    }
    out
}

fn energetics(w: &WellArgs) -> entmix::Result<EnergeticsSpec> {
    EnergeticsSpec::new(w.a, w.sigma, w.p0, w.p1)?.with_kbt(w.kbt)
}

fn landauer_row(s: &EnergeticsSpec, oracle: bool, spec: &DivergenceSpec) -> entmix::Result<(LandauerBand, Option<Estimate>)> {
    let band = landauer_bounds(s)?;
    let heat = if oracle { Some(landauer_heat_oracle(s, spec)?) } else { None };
    Ok((band, heat))
}

// Energies are in units of kBT·nats and ignore --bits.
fn landauer_json(r: &Report, b: &LandauerBand, heat: Option<&Estimate>) -> Value {
    json!({
        "central": r.exact(b.central, Unit::Plain),
        "lower": r.exact(b.lower, Unit::Plain),
        "upper": r.exact(b.upper, Unit::Plain),
        "width": r.exact(b.width(), Unit::Plain),
        "c_lower": r.exact(b.c_lower, Unit::Plain),
        "c_upper": r.exact(b.c_upper, Unit::Plain),
        "tail": r.exact(b.tail, Unit::Plain),
        "heat": heat.map(|e| r.estimate(e, Unit::Plain)),
        "heat_in_band": heat.map(|e| b.contains(e.value, e.error)),
    })
}

fn landauer_csv(rows: &[(&str, f64, LandauerBand, Option<Estimate>)]) -> String {
    let mut out = String::from("parameter,value,lower,central,upper,width,heat,heat_error\n");
    for (p, v, b, h) in rows {
        let (hv, he) = match h {
            Some(e) => (c(e.value), c(e.error)),
            None => (String::new(), String::new()),
        };
        out += &format!("{p},{},{},{},{},{},{hv},{he}\n", c(*v), c(b.lower), c(b.central), c(b.upper), c(b.width()));
    }
    out
}

fn param_name(p: SweepParam) -> &'static str {
    match p {
        SweepParam::N => "N",
        SweepParam::Lambda => "lambda",
        SweepParam::Sigma => "sigma",
        SweepParam::A => "a",
    }
}

fn sweep(
    param: SweepParam,
    values: &[f64],
    g: &GridArgs,
    spec: &DivergenceSpec,
    report: &mut Report,
) -> Result<Option<String>, Failure> {
    let name = param_name(param);
    if param == SweepParam::A {
        let mut rows = Vec::new();
        let mut json_rows = Vec::new();
        for &a in values {
            let s = EnergeticsSpec::erasure(a, g.sigma)?;
            let (band, heat) = landauer_row(&s, g.oracle != OracleMode::Never, spec)?;
            json_rows.push(landauer_json(report, &band, heat.as_ref()));
            report.put("rows", Value::Array(json_rows.clone()));
            rows.push((name, a, band, heat));
        }
        return Ok(Some(landauer_csv(&rows)));
    }
    let mut rows = Vec::new();
    let mut json_rows = Vec::new();
    for &v in values {
        let (mut n, mut lambda, mut sigma) = (g.n, g.lambda, g.sigma);
        match param {
            SweepParam::N => {
                if v < 1.0 || v.fract() != 0.0 {
                    return Err(Failure::parse(format!("N must be a positive integer, got {v}")));
                }
                n = v as usize;
            }
            SweepParam::Lambda => lambda = v,
            SweepParam::Sigma => sigma = v,
            SweepParam::A => unreachable!(),
        }
        let row = channel_row(g, n, lambda, sigma, spec)?;
        json_rows.push(channel_json(report, &row));
        report.put("rows", Value::Array(json_rows.clone()));
        rows.push((name, v, row));
    }
    Ok(Some(channel_csv(&rows)))
}

fn linspace(from: f64, to: f64, steps: usize) -> Result<Vec<f64>, Failure> {
    if steps == 0 || !from.is_finite() || !to.is_finite() {
        return Err(Failure::parse("a range needs finite ends and at least one step"));
    }
    if steps == 1 {
        return Ok(vec![from]);
    }
    Ok((0..steps).map(|k| from + (to - from) * k as f64 / (steps - 1) as f64).collect())
}

/// `0.2,0.5` or `start:stop:count`.
pub fn parse_grid(s: &str) -> Result<Vec<f64>, Failure> {
    let bad = |what: &str| Failure::parse(format!("--t {s:?}: {what}"));
    let grid = if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(bad("expected start:stop:count"));
        }
        let a: f64 = parts[0].trim().parse().map_err(|_| bad("bad start"))?;
        let b: f64 = parts[1].trim().parse().map_err(|_| bad("bad stop"))?;
        let n: usize = parts[2].trim().parse().map_err(|_| bad("bad count"))?;
        linspace(a, b, n)?
    } else {
        s.split(',').map(|x| x.trim().parse::<f64>().map_err(|_| bad("bad number"))).collect::<Result<_, _>>()?
    };
    if grid.is_empty() || grid.iter().any(|t| !(*t > 0.0 && *t < 1.0)) {
        return Err(bad("skew parameters must lie in (0,1)"));
    }
    Ok(grid)
}
