//! Subcommand implementations.

use std::fs;
use std::path::{Path, PathBuf};

use log::info;
use serde::{Deserialize, Serialize};

use selfstab::alpha_model::AlphaModel;
use selfstab::analysis::{
    geometric_scales, holder_constant, holder_estimate, localization_experiment_with, HolderFit, REFERENCE_COUNT,
};
use selfstab::expr::Expr;
use selfstab::point_process::{generate_poisson_strip, load_points, Point, PointSet, StripSpec};
use selfstab::rng::{path_seed, PRNG_NAME};
use selfstab::sim::{
    batch, simulate_nonautonomous, simulate_path, simulate_stable_motion, simulate_subordinator, simulate_tempered,
    simulate_weighted, small_jump_cutoff, truncation_level_with, SampledPath, TruncationPlan, Variant,
};
use selfstab::solver::{solve_picard, solve_sequential, JumpFunctionMeta, NonAutonomousAlpha, WeightSpec};

use crate::config::{parse_alpha, LocalizeSpec, RunConfig};
use crate::{svg, CliError, Method, PlanArgs, PointsCommand, RunArgs, SolveArgs};

fn resolve(args: &RunArgs) -> Result<RunConfig, CliError> {
    let mut cfg = match &args.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(v) = args.variant {
        cfg.variant = v;
    }
    if let Some(text) = &args.alpha {
        cfg.alpha = Some(parse_alpha(text)?);
    }
    if let Some(t0) = args.t0 {
        cfg.interval[0] = t0;
    }
    if let Some(t1) = args.t1 {
        cfg.interval[1] = t1;
    }
    if let Some(a0) = args.a0 {
        cfg.a0 = a0;
    }
    // A flag-level epsilon or N replaces the other way of fixing the plan.
    if let Some(eps) = args.epsilon {
        cfg.epsilon = Some(eps);
        cfg.n = None;
    }
    if let Some(n) = args.n {
        cfg.n = Some(n);
        cfg.epsilon = None;
    }
    if let Some(k) = args.k {
        cfg.k = Some(k);
    }
    if let Some(f) = args.formula {
        cfg.formula = Some(f);
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(g) = args.grid_len {
        cfg.grid_len = g;
    }
    if let Some(p) = args.paths {
        cfg.paths = p;
    }
    if let Some(n) = args.n_terms {
        cfg.n_terms = Some(n);
    }
    if let Some(w) = &args.weight {
        cfg.weight = Some(parse_weight(w)?);
    }
    if args.z0.is_some() || args.r_values.is_some() || args.n_paths.is_some() {
        let mut spec = cfg.localize.take().unwrap_or(LocalizeSpec {
            z0: Vec::new(),
            r_values: Vec::new(),
            u: 1.0,
            n_paths: 0,
            reference_count: None,
        });
        if let Some(z0) = &args.z0 {
            spec.z0 = z0.clone();
        }
        if let Some(r) = &args.r_values {
            spec.r_values = r.clone();
        }
        if let Some(n) = args.n_paths {
            spec.n_paths = n;
        }
        cfg.localize = Some(spec);
    }
    if let Some(stem) = &args.stem {
        cfg.output.stem = Some(stem.clone());
    }
    if cfg.paths == 0 {
        return Err(CliError::Config("paths must be at least 1".into()));
    }
    Ok(cfg)
}

fn parse_weight(text: &str) -> Result<WeightSpec, CliError> {
    match text.trim() {
        "unit" => Ok(WeightSpec::Unit),
        "stable_norm" => Ok(WeightSpec::StableNorm),
        other => match other.strip_prefix("constant:").map(|v| v.trim().parse::<f64>()) {
            Some(Ok(c)) => Ok(WeightSpec::Constant(c)),
            _ => Err(CliError::Config(format!("weight '{other}' must be unit, stable_norm or constant:c"))),
        },
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|e| CliError::io(format!("cannot write {}", path.display()), e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("output serializes");
    text.push('\n');
    write_file(path, text.as_bytes())
}

fn prepare_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(format!("cannot create {}", dir.display()), e))
}

fn print_json<T: Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("output serializes"));
}

fn file_name(path: &Path) -> String {
    path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

#[derive(Serialize)]
struct Manifest<'a, T: Serialize> {
    command: &'a str,
    version: &'a str,
    prng: &'a str,
    config_hash: String,
    config: &'a RunConfig,
    #[serde(flatten)]
    body: T,
}

fn write_manifest<T: Serialize>(
    dir: &Path,
    stem: &str,
    command: &str,
    cfg: &RunConfig,
    body: T,
) -> Result<PathBuf, CliError> {
    let path = dir.join(format!("{stem}.manifest.json"));
    let manifest =
        Manifest { command, version: selfstab::VERSION, prng: PRNG_NAME, config_hash: cfg.hash(), config: cfg, body };
    write_json(&path, &manifest)?;
    Ok(path)
}

/// Plan from the config, or an explicit one for models without a derivative bound.
fn plan_for(cfg: &RunConfig, alpha: Option<&AlphaModel>) -> Result<TruncationPlan, CliError> {
    match alpha {
        Some(model) => cfg.plan(model),
        None => match (cfg.epsilon, cfg.k, cfg.n) {
            (None, Some(k), Some(n)) => Ok(TruncationPlan::explicit(k, n)?),
            _ => Err(CliError::Config("without an alpha model the plan must be given explicitly as K and N".into())),
        },
    }
}

type PathFn = Box<dyn Fn(u64) -> selfstab::Result<SampledPath> + Sync>;

/// Plan used (if any), the model for the plot panel, and a per-seed simulator.
fn path_simulator(cfg: &RunConfig) -> Result<(Option<TruncationPlan>, Option<AlphaModel>, PathFn), CliError> {
    let interval = cfg.interval()?;
    let (a0, grid_len) = (cfg.a0, cfg.grid_len);
    match cfg.variant {
        Variant::Selfstab => {
            let model = cfg.alpha_model()?;
            let plan = cfg.plan(&model)?;
            let m = model.clone();
            Ok((Some(plan), Some(model), Box::new(move |s| simulate_path(&m, a0, interval, &plan, s, grid_len))))
        }
        Variant::Stable | Variant::Subordinator => {
            let value = cfg.constant_alpha()?;
            let model = cfg.alpha_model()?;
            let plan = cfg.plan(&model)?;
            let f: PathFn = if cfg.variant == Variant::Stable {
                Box::new(move |s| simulate_stable_motion(value, interval, &plan, s, grid_len))
            } else {
                Box::new(move |s| simulate_subordinator(value, interval, &plan, s, grid_len))
            };
            Ok((Some(plan), Some(model), f))
        }
        Variant::Weighted => {
            let model = cfg.alpha_model()?;
            let plan = cfg.plan(&model)?;
            let weight =
                cfg.weight.ok_or_else(|| CliError::Config("the weighted variant needs a weight".into()))?.into();
            let m = model.clone();
            Ok((
                Some(plan),
                Some(model),
                Box::new(move |s| simulate_weighted(&m, &weight, a0, interval, &plan, s, grid_len)),
            ))
        }
        Variant::Tempered => {
            let model = cfg.alpha_model()?;
            let n_terms = cfg.n_terms.ok_or_else(|| CliError::Config("the tempered variant needs n_terms".into()))?;
            if interval.0 != 0.0 {
                return Err(CliError::Config("the tempered series runs on [0, T); set t0 = 0".into()));
            }
            let horizon = interval.1;
            let m = model.clone();
            Ok((None, Some(model), Box::new(move |s| simulate_tempered(&m, a0, horizon, n_terms, s, grid_len))))
        }
        Variant::Nonautonomous => {
            let field =
                cfg.field.clone().ok_or_else(|| CliError::Config("the nonautonomous variant needs a field".into()))?;
            let expr = Expr::parse_field(&field.expr)?;
            let signal = Expr::parse_field(&field.g)?;
            let alpha3 = NonAutonomousAlpha::new(move |t, z, g| expr.eval_field(t, z, g), field.a, field.b)?;
            let model = cfg.alpha.as_ref().map(AlphaModel::from_spec).transpose()?;
            let plan = plan_for(cfg, model.as_ref())?;
            let label = field.expr.clone();
            Ok((
                Some(plan),
                None,
                Box::new(move |s| {
                    let g = |t: f64| signal.eval_field(t, f64::NAN, f64::NAN);
                    simulate_nonautonomous(&alpha3, &label, &g, a0, interval, &plan, s, grid_len)
                }),
            ))
        }
    }
}

#[derive(Serialize)]
struct PathRecord {
    index: usize,
    seed: u64,
    csv: String,
    svg: String,
    point_count: usize,
    final_value: f64,
    residual: Option<f64>,
}

#[derive(Serialize)]
struct SimulateBody {
    plan: Option<TruncationPlan>,
    paths: Vec<PathRecord>,
}

pub fn simulate(args: &RunArgs, out_dir: Option<&Path>, force: Option<Variant>) -> Result<(), CliError> {
    let mut cfg = resolve(args)?;
    if let Some(v) = force {
        cfg.variant = v;
    }
    let (plan, model, simulate_one) = path_simulator(&cfg)?;
    let dir = cfg.out_dir(out_dir);
    prepare_dir(&dir)?;
    let stem = cfg.stem();
    info!("simulating {} {:?} path(s) into {}", cfg.paths, cfg.variant, dir.display());
    let paths = batch(cfg.paths, cfg.seed, simulate_one)?;

    let mut records = Vec::with_capacity(paths.len());
    for (i, path) in paths.iter().enumerate() {
        let name = if cfg.paths == 1 { stem.clone() } else { format!("{stem}_{i:04}") };
        let csv = dir.join(format!("{name}.csv"));
        let svg_path = dir.join(format!("{name}.svg"));
        let mut buf = Vec::new();
        path.write_csv(&mut buf).map_err(|e| CliError::io("csv", e))?;
        write_file(&csv, &buf)?;
        let title = format!("{:?} path, alpha = {}, seed {}", path.meta.variant, path.meta.alpha, path.meta.seed);
        let inset = model.as_ref().map(|m| move |z: f64| m.eval(z).unwrap_or(f64::NAN));
        let plot = svg::step_plot(&title, &path.grid, &path.values, inset.as_ref().map(|f| f as &dyn Fn(f64) -> f64));
        write_file(&svg_path, plot.as_bytes())?;
        records.push(PathRecord {
            index: i,
            seed: path_seed(cfg.seed, i as u64),
            csv: file_name(&csv),
            svg: file_name(&svg_path),
            point_count: path.meta.point_count,
            final_value: path.final_value(),
            residual: path.meta.residual,
        });
    }
    let manifest = write_manifest(&dir, &stem, "simulate", &cfg, SimulateBody { plan, paths: records })?;
    info!("manifest written to {}", manifest.display());
    match plan {
        Some(plan) => print_json(&plan),
        None => print_json(&serde_json::json!({ "n_terms": cfg.n_terms })),
    }
    Ok(())
}

#[derive(Serialize)]
struct PlanReport {
    plan: TruncationPlan,
    #[serde(rename = "T")]
    horizon: f64,
    #[serde(rename = "M")]
    m: f64,
    a: f64,
    b: f64,
    /// Reported only when `K` was left unset.
    small_jump_cutoff: Option<f64>,
    restricted: Option<RestrictedPlan>,
}

/// Plan recomputed with `M` taken over a range of states only; not certified.
#[derive(Serialize)]
struct RestrictedPlan {
    z_range: [f64; 2],
    #[serde(rename = "M")]
    m: f64,
    plan: Option<TruncationPlan>,
    error: Option<String>,
}

fn restricted_plan(args: &PlanArgs, model: &AlphaModel, k: f64, lo: f64, hi: f64) -> Result<RestrictedPlan, CliError> {
    let m = model.derivative_ratio_bound_on(lo, hi)?;
    let inner = model.clone();
    let local = AlphaModel::custom(
        &format!("{} on [{lo}, {hi}]", model.label()),
        move |z| inner.eval(z).unwrap_or(f64::NAN),
        model.a(),
        model.b(),
        Some(m),
    )?;
    let (plan, error) = match truncation_level_with(args.formula, args.epsilon, args.horizon, &local, k) {
        Ok(plan) => (Some(plan), None),
        Err(e) => (None, Some(e.to_string())),
    };
    Ok(RestrictedPlan { z_range: [lo, hi], m, plan, error })
}

pub fn plan(args: &PlanArgs) -> Result<(), CliError> {
    let model = AlphaModel::from_spec(&parse_alpha(&args.alpha)?)?;
    if !(args.horizon > 0.0 && args.horizon.is_finite()) {
        return Err(CliError::Config(format!("T must be positive, got {}", args.horizon)));
    }
    let k = args.k.unwrap_or(1.0);
    let plan = truncation_level_with(args.formula, args.epsilon, args.horizon, &model, k)?;
    let small = match args.k {
        Some(_) => None,
        None => Some(small_jump_cutoff(args.epsilon, args.horizon)?),
    };
    let restricted = match args.z_range.as_deref() {
        Some(&[lo, hi]) => Some(restricted_plan(args, &model, k, lo, hi)?),
        Some(_) => return Err(CliError::Config("--z-range takes two values lo,hi".into())),
        None => None,
    };
    print_json(&PlanReport {
        plan,
        horizon: args.horizon,
        m: model.derivative_ratio_bound(),
        a: model.a(),
        b: model.b(),
        small_jump_cutoff: small,
        restricted,
    });
    Ok(())
}

#[derive(Serialize)]
struct SolveMeta {
    #[serde(flatten)]
    function: JumpFunctionMeta,
    method: &'static str,
    truncation: Option<f64>,
    picard_iterations: Option<usize>,
}

pub fn solve(args: &SolveArgs, out_dir: Option<&Path>) -> Result<(), CliError> {
    let model = AlphaModel::from_spec(&parse_alpha(&args.alpha)?)?;
    let mut ps = load_points(&args.points, args.t0, args.t1)?;
    if let Some(n) = args.n {
        ps = ps.truncated(n);
    }
    let (f, iterations) = match args.method {
        Method::Sequential => (solve_sequential(&ps, &model, args.a0)?, None),
        Method::Picard => {
            let sol = solve_picard(&ps, &model, args.a0, args.tol, args.max_iter)?;
            (sol.function, Some(sol.iterations))
        }
    };
    let out = match &args.out {
        Some(p) => p.clone(),
        None => {
            let dir = RunConfig::default().out_dir(out_dir);
            prepare_dir(&dir)?;
            dir.join("solution.csv")
        }
    };
    let mut buf = Vec::new();
    f.write_csv(&mut buf).map_err(|e| CliError::io("csv", e))?;
    write_file(&out, &buf)?;
    let meta = SolveMeta {
        function: f.metadata(&model, &ps),
        method: match args.method {
            Method::Sequential => "sequential",
            Method::Picard => "picard",
        },
        truncation: args.n,
        picard_iterations: iterations,
    };
    write_json(&out.with_extension("meta.json"), &meta)?;
    print_json(&meta);
    Ok(())
}

/// JSON form of a point file.
#[derive(Serialize, Deserialize)]
struct PointsFile {
    t0: f64,
    t1: f64,
    points: Vec<Point>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    strip: Option<StripSpec>,
}

fn is_json(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

fn save_point_file(ps: &PointSet, strip: Option<StripSpec>, path: &Path) -> Result<(), CliError> {
    if is_json(path) {
        let (t0, t1) = ps.interval();
        write_json(path, &PointsFile { t0, t1, points: ps.points().to_vec(), strip })
    } else {
        let mut buf = Vec::new();
        ps.write_csv(&mut buf).map_err(|e| CliError::io("csv", e))?;
        write_file(path, &buf)
    }
}

pub fn points(cmd: &PointsCommand) -> Result<(), CliError> {
    match cmd {
        PointsCommand::Gen { t0, t1, k, n, seed, out } => {
            let spec = StripSpec { t0: *t0, t1: *t1, k: *k, n: *n, seed: *seed };
            let ps = generate_poisson_strip(&spec)?;
            save_point_file(&ps, Some(spec), out)?;
            println!("{} points written to {}", ps.len(), out.display());
        }
        PointsCommand::Convert { input, output, t0, t1 } => {
            let ps = if is_json(input) {
                let text = fs::read_to_string(input)
                    .map_err(|e| CliError::io(format!("cannot read {}", input.display()), e))?;
                let file: PointsFile = serde_json::from_str(&text).map_err(selfstab::Error::from)?;
                PointSet::new(file.t0, file.t1, file.points)?
            } else {
                load_points(input, *t0, *t1)?
            };
            save_point_file(&ps, None, output)?;
            println!("{} points written to {}", ps.len(), output.display());
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct LocalizeSummary {
    z0: f64,
    alpha_at_z0: f64,
    r_values: Vec<f64>,
    ks: Vec<f64>,
    standard_errors: Vec<f64>,
    trend_holds: bool,
    report: String,
}

pub fn localize(args: &RunArgs, out_dir: Option<&Path>) -> Result<(), CliError> {
    let cfg = resolve(args)?;
    let spec =
        cfg.localize.clone().ok_or_else(|| CliError::Config("localize needs z0, r values and n_paths".into()))?;
    if spec.z0.is_empty() {
        return Err(CliError::Config("localize needs at least one z0".into()));
    }
    let model = cfg.alpha_model()?;
    let plan = cfg.plan(&model)?;
    let dir = cfg.out_dir(out_dir);
    prepare_dir(&dir)?;
    let stem = cfg.stem();
    let reference_count = spec.reference_count.unwrap_or(REFERENCE_COUNT);

    let mut summaries = Vec::with_capacity(spec.z0.len());
    for (j, &z0) in spec.z0.iter().enumerate() {
        info!("localization at z0 = {z0}");
        let report = localization_experiment_with(
            &model,
            z0,
            &spec.r_values,
            spec.u,
            spec.n_paths,
            &plan,
            path_seed(cfg.seed, j as u64),
            reference_count,
        )?;
        let name = format!("{stem}_z{j}");
        write_json(&dir.join(format!("{name}.json")), &report)?;
        let mut buf = Vec::new();
        report.write_csv(&mut buf).map_err(|e| CliError::io("csv", e))?;
        write_file(&dir.join(format!("{name}.csv")), &buf)?;
        summaries.push(LocalizeSummary {
            z0,
            alpha_at_z0: report.alpha_at_z0,
            r_values: report.r_values.clone(),
            ks: report.ks_stats.clone(),
            standard_errors: report.standard_errors(),
            trend_holds: report.trend_holds(1, 2.0),
            report: format!("{name}.json"),
        });
    }
    write_manifest(&dir, &stem, "localize", &cfg, serde_json::json!({ "plan": plan, "results": &summaries }))?;
    print_json(&summaries);
    Ok(())
}

#[derive(Serialize)]
struct HolderRecord {
    seed: u64,
    exponent: f64,
    fit: Option<HolderFit>,
    constant: f64,
    skipped: Option<String>,
}

#[derive(Serialize)]
struct HolderSummary {
    paths: usize,
    fitted: usize,
    median_slope: Option<f64>,
    median_constant: f64,
    results: String,
}

pub fn holder(args: &RunArgs, out_dir: Option<&Path>) -> Result<(), CliError> {
    let cfg = resolve(args)?;
    let spec = cfg.holder.clone().ok_or_else(|| CliError::Config("holder needs a 'holder' section".into()))?;
    if !(spec.h_min > 0.0 && spec.h_min < spec.h_max) || spec.h_count < 3 {
        return Err(CliError::Config("holder scales need 0 < h_min < h_max and h_count >= 3".into()));
    }
    let (_, model, simulate_one) = path_simulator(&cfg)?;
    let model = model.ok_or_else(|| CliError::Config("holder needs an alpha model".into()))?;
    let h = geometric_scales(spec.h_min, spec.h_max, spec.h_count);
    let dir = cfg.out_dir(out_dir);
    prepare_dir(&dir)?;
    let stem = cfg.stem();

    let records = batch(cfg.paths, cfg.seed, |s| {
        let path = simulate_one(s)?;
        let exponent = 1.0 / model.eval(path.value_at(spec.t)?)? - spec.slack;
        let constant = holder_constant(&path, spec.t, exponent, &h)?;
        let (fit, skipped) = match holder_estimate(&path, spec.t, &h) {
            Ok(fit) => (Some(fit), None),
            Err(e @ (selfstab::Error::AllIncrementsZero | selfstab::Error::InsufficientScales { .. })) => {
                (None, Some(e.to_string()))
            }
            Err(e) => return Err(e),
        };
        Ok(HolderRecord { seed: s, exponent, fit, constant, skipped })
    })?;

    let mut slopes: Vec<f64> = records.iter().filter_map(|r| r.fit.as_ref().map(|f| f.slope)).collect();
    slopes.sort_by(f64::total_cmp);
    let mut constants: Vec<f64> = records.iter().map(|r| r.constant).collect();
    constants.sort_by(f64::total_cmp);
    let results = dir.join(format!("{stem}.holder.json"));
    write_json(&results, &records)?;
    let summary = HolderSummary {
        paths: records.len(),
        fitted: slopes.len(),
        median_slope: slopes.get(slopes.len() / 2).copied(),
        median_constant: constants[constants.len() / 2],
        results: file_name(&results),
    };
    write_manifest(&dir, &stem, "holder", &cfg, serde_json::json!({ "h": h, "summary": &summary }))?;
    print_json(&summary);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_parse() {
        assert_eq!(parse_weight("unit").unwrap(), WeightSpec::Unit);
        assert_eq!(parse_weight("constant:2.5").unwrap(), WeightSpec::Constant(2.5));
        assert!(parse_weight("constant:x").is_err());
    }

    #[test]
    fn flags_override_config() {
        let args = RunArgs { n: Some(50.0), k: Some(0.5), seed: Some(9), z0: Some(vec![0.0]), ..RunArgs::default() };
        let cfg = resolve(&args).unwrap();
        assert_eq!((cfg.k, cfg.n, cfg.seed, cfg.epsilon), (Some(0.5), Some(50.0), 9, None));
        assert_eq!(cfg.localize.unwrap().z0, vec![0.0]);
    }

    #[test]
    fn point_files_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let spec = StripSpec { t0: 0.0, t1: 1.0, k: 0.5, n: 20.0, seed: 3 };
        let ps = generate_poisson_strip(&spec).unwrap();
        let json = dir.path().join("p.json");
        save_point_file(&ps, Some(spec), &json).unwrap();
        let csv = dir.path().join("p.csv");
        points(&PointsCommand::Convert { input: json, output: csv.clone(), t0: 0.0, t1: 1.0 }).unwrap();
        assert_eq!(load_points(&csv, 0.0, 1.0).unwrap(), ps);
    }
}
