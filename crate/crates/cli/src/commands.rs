use std::fs;
use std::io::Write;
use std::path::PathBuf;

use ajk_lk::{check_admissible, AffineParameterSet};
use ajk_models::{from_name, ModelSpec};
use ajk_riccati::{conservativeness_check, jump_log_json, solve_backward_with, write_csv, RiccatiOptions};
use ajk_simulate::{compare_charfn, sample_path, simulate, time_grid, SimOptions};
use ajk_termstructure::{
    bond_price, drift_residual, gaussian_term_structure, martingale_test, vasicek_term_structure, ForwardCurve,
    MartingaleOptions, PathView, TermStructureModel,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::args::*;
use crate::parse::{parse_complex_vec, parse_list, parse_params};
use crate::CliError;

type Res<T> = Result<T, CliError>;

pub fn dispatch(cmd: &Command, stdout: &mut dyn Write) -> Res<()> {
    match cmd {
        Command::Solve(a) => solve(a, stdout),
        Command::Check(a) => check(a, stdout),
        Command::Simulate(a) => sim(a, stdout),
        Command::Price(a) => price(a, stdout),
        Command::VerifyDrift(a) => verify_drift(a, stdout),
        Command::VerifyMartingale(a) => verify_martingale(a, stdout),
        Command::CompareCharfn(a) => compare(a, stdout),
    }
}

fn emit(out: &Option<PathBuf>, stdout: &mut dyn Write, bytes: &[u8]) -> Res<()> {
    match out {
        Some(path) => fs::write(path, bytes)?,
        None => stdout.write_all(bytes)?,
    }
    Ok(())
}

fn emit_json(out: &Option<PathBuf>, stdout: &mut dyn Write, v: &impl serde::Serialize) -> Res<()> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    emit(out, stdout, s.as_bytes())
}

fn positive(name: &str, v: f64) -> Res<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(CliError::Config(format!("{name} must be positive, got {v}")))
    }
}

fn build_model(a: &ModelArgs, default_horizon: f64) -> Res<ModelSpec> {
    let flags = [
        ("lambda", &a.lambda),
        ("tau", &a.tau),
        ("p", &a.p),
        ("alpha", &a.alpha),
        ("beta", &a.beta),
        ("sigma", &a.sigma),
        ("gamma", &a.gamma),
        ("jumps", &a.jumps),
        ("kappa", &a.kappa),
        ("a0", &a.a0),
        ("m", &a.m),
        ("n", &a.n),
    ];
    if let Some(path) = &a.model_file {
        if a.params.is_some() || a.horizon.is_some() || flags.iter().any(|(_, v)| v.is_some()) {
            return Err(CliError::Config("a model file takes no parameter flags".into()));
        }
        let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let params = AffineParameterSet::from_json_str(&text)?;
        let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        return Ok(ModelSpec { name, params, closed_form: None, simulator: None, notes: Vec::new() });
    }
    let name = a.model.as_deref().ok_or_else(|| CliError::Config("no model given".into()))?;
    let mut map = ajk_models::ModelArgs::new();
    for (key, value) in flags {
        if let Some(v) = value {
            map.insert(key.to_string(), parse_list(v)?);
        }
    }
    if let Some(p) = &a.params {
        parse_params(p, &mut map)?;
    }
    let horizon = a.horizon.unwrap_or(default_horizon);
    positive("horizon", horizon)?;
    Ok(from_name(name, &map, horizon)?)
}

fn initial_state(x0: &Option<String>, d: usize) -> Res<Vec<f64>> {
    match x0 {
        None => Ok(vec![0.0; d]),
        Some(s) => {
            let v = parse_list(s)?;
            if v.len() != d {
                return Err(CliError::Config(format!("x0 has {} components, the model has {d}", v.len())));
            }
            Ok(v)
        }
    }
}

fn solve(a: &SolveArgs, stdout: &mut dyn Write) -> Res<()> {
    positive("T", a.t)?;
    positive("atol", a.atol)?;
    positive("rtol", a.rtol)?;
    let model = build_model(&a.model, a.t)?;
    let u = parse_complex_vec(&a.u)?;
    if u.len() != model.params.d() {
        return Err(CliError::Config(format!("u has {} components, the model has {}", u.len(), model.params.d())));
    }
    let mut opts = RiccatiOptions::default();
    opts.ode.atol = a.atol;
    opts.ode.rtol = a.rtol;
    let sol = solve_backward_with(&model.params, a.t, &u, 0.0, &opts)?;
    let mut buf = Vec::new();
    write_csv(&sol, &mut buf)?;
    emit(&a.out, stdout, &buf)?;
    if let Some(path) = &a.jump_log {
        fs::write(path, serde_json::to_string_pretty(&jump_log_json(&sol))? + "\n")?;
    }
    Ok(())
}

fn check(a: &CheckArgs, stdout: &mut dyn Write) -> Res<()> {
    let model = build_model(&a.model, a.t.unwrap_or(1.0))?;
    let t = a.t.unwrap_or_else(|| model.horizon());
    positive("T", t)?;
    let adm = check_admissible(&model.params);
    let cons = conservativeness_check(&model.params, t)?;
    let conservative = cons.verdict == ajk_riccati::Verdict::Conservative;
    let pass = adm.passed() && conservative;
    let report = json!({
        "model": model.name,
        "admissible": adm.passed(),
        "admissibility": adm,
        "conservativeness": {
            "verdict": cons.verdict.to_string(),
            "zero_residual": cons.zero_residual,
            "responses": cons.responses,
        },
        "notes": model.notes,
        "pass": pass,
    });
    emit_json(&a.out, stdout, &report)?;
    if pass {
        Ok(())
    } else {
        Err(CliError::Verification(format!("model '{}' is not admissible and conservative", model.name)))
    }
}

fn sim(a: &SimulateArgs, stdout: &mut dyn Write) -> Res<()> {
    positive("T", a.t)?;
    positive("step", a.step)?;
    let model = build_model(&a.model, a.t)?;
    let x0 = initial_state(&a.x0, model.params.d())?;
    let opts = SimOptions { step: a.step, ..SimOptions::default() };
    let ens = simulate(&model, &x0, a.t, a.paths, a.seed, &opts)?;
    if ens.domain_exits > 0 {
        eprintln!("note: {} Euler steps were truncated at the boundary", ens.domain_exits);
    }
    let mut buf = Vec::new();
    ens.write_csv(&mut buf)?;
    emit(&a.out, stdout, &buf)
}

fn compare(a: &CompareArgs, stdout: &mut dyn Write) -> Res<()> {
    positive("T", a.t)?;
    positive("step", a.step)?;
    let model = build_model(&a.model, a.t)?;
    let x0 = initial_state(&a.x0, model.params.d())?;
    let us = a.u.iter().map(|s| parse_complex_vec(s)).collect::<Res<Vec<_>>>()?;
    let opts = SimOptions { step: a.step, ..SimOptions::default() };
    let rep = compare_charfn(&model, &x0, a.t, &us, a.paths, a.seed, &opts)?;
    emit_json(&a.out, stdout, &rep)?;
    if rep.pass {
        Ok(())
    } else {
        Err(CliError::Verification(format!("max z-score {:.2} above the limit", rep.max_z)))
    }
}

fn build_term(a: &TermArgs) -> Res<TermStructureModel> {
    positive("horizon", a.horizon)?;
    let jumps = a.jumps.as_deref().map(parse_list).transpose()?.unwrap_or_default();
    let mut m = match a.family {
        Family::Vasicek => vasicek_term_structure(a.alpha, a.beta, a.sigma, a.gamma, &jumps, a.r0, a.horizon)?,
        Family::Gaussian => {
            if !jumps.is_empty() {
                return Err(CliError::Config("the gaussian family has no jump times".into()));
            }
            let f0 = ForwardCurve::flat(a.f0.unwrap_or(a.r0));
            gaussian_term_structure(a.alpha, a.beta, a.sigma, a.r0, f0, a.horizon)?
        }
    };
    if a.perturb != 1.0 {
        m.loadings = m.loadings.perturbed(a.perturb);
    }
    Ok(m)
}

fn price(a: &PriceArgs, stdout: &mut dyn Write) -> Res<()> {
    positive("step", a.step)?;
    let m = build_term(&a.term)?;
    let times = parse_list(&a.times)?;
    let maturities = parse_list(&a.maturities)?;
    let horizon = m.horizon();
    if let Some(bad) = times.iter().chain(&maturities).find(|t| !(**t >= 0.0 && **t <= horizon)) {
        return Err(CliError::Config(format!("time {bad} outside [0, {horizon}]")));
    }
    let atoms: Vec<f64> = m.driver().atoms().iter().map(|x| x.t).collect();
    let grid = time_grid(&atoms, horizon, a.step, &times);
    let mut exits = 0;
    let states = sample_path(&m.x_model, &m.x0, &grid, a.seed, 0, false, &mut exits)?;
    let path = PathView { grid: &grid, states: &states };
    let mut wr = csv::Writer::from_writer(Vec::new());
    wr.write_record(["t", "T", "r_t", "price"])?;
    for t in &times {
        let j = grid.iter().position(|g| (g - t).abs() < 1e-12).expect("valuation times are on the grid");
        for big_t in maturities.iter().filter(|big_t| **big_t >= grid[j]) {
            let p = bond_price(&m, path, j, *big_t)?;
            wr.write_record([grid[j].to_string(), big_t.to_string(), states[3 * j + 2].to_string(), p.to_string()])?;
        }
    }
    let buf = wr.into_inner().map_err(|e| CliError::Config(e.to_string()))?;
    emit(&a.out, stdout, &buf)
}

fn verify_drift(a: &DriftArgs, stdout: &mut dyn Write) -> Res<()> {
    positive("tol", a.tol)?;
    let m = build_term(&a.term)?;
    let horizon = m.horizon();
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let mut pairs: Vec<(f64, f64)> = (0..a.pairs)
        .map(|_| {
            let (x, y): (f64, f64) = (rng.random_range(0.0..=horizon), rng.random_range(0.0..=horizon));
            (x.min(y), x.max(y))
        })
        .collect();
    // jump times need their own condition
    for ti in m.loadings.jump_times.clone() {
        pairs.push((ti, ti));
        pairs.push((ti, rng.random_range(ti..=horizon)));
    }
    let mut worst = 0.0f64;
    let mut worst_at = (0.0, 0.0);
    for (t, big_t) in &pairs {
        let r = drift_residual(&m, *t, *big_t)?;
        if r > worst {
            worst = r;
            worst_at = (*t, *big_t);
        }
    }
    let pass = worst < a.tol;
    let report = json!({
        "family": format!("{:?}", a.term.family).to_lowercase(),
        "pairs": pairs.len(),
        "seed": a.seed,
        "max_residual": worst,
        "worst_pair": [worst_at.0, worst_at.1],
        "tol": a.tol,
        "pass": pass,
    });
    emit_json(&a.out, stdout, &report)?;
    if pass {
        Ok(())
    } else {
        Err(CliError::Verification(format!("drift residual {worst:e} at {worst_at:?}")))
    }
}

fn verify_martingale(a: &MartingaleArgs, stdout: &mut dyn Write) -> Res<()> {
    positive("step", a.step)?;
    let m = build_term(&a.term)?;
    let t = a.t.unwrap_or_else(|| m.horizon());
    let opts = MartingaleOptions { step: a.step, checks: a.checks };
    let rep = martingale_test(&m, t, a.paths, a.seed, &opts)?;
    let mut v = serde_json::to_value(&rep)?;
    v["drift_ok"] = json!(rep.drift_ok());
    v["pass"] = json!(rep.pass());
    emit_json(&a.out, stdout, &v)?;
    if rep.pass() {
        Ok(())
    } else {
        Err(CliError::Verification(format!(
            "max z-score {:.2}, drift residual {:e}",
            rep.max_z, rep.max_drift_residual
        )))
    }
}
