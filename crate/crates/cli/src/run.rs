//! Validation and execution of a [`RunConfig`].
//!
//! [`prepare`] checks everything that can be checked without computing: symbol syntax,
//! envelopes, references, nets and thresholds. Only a prepared plan is executed, so a
//! configuration error never leaves files behind.

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::time::Instant;

use hardylab::diagnostics::{
    dilation_sweep, hartman_verdict, product_verdict, sum_product_verdict, zheng_pair_verdict, AngleCase, SizeEvidence,
};
use hardylab::lang::symbol_from_str;
use hardylab::operator::{identity_suite, IdentityId, IdentityInputs};
use hardylab::symbol::multiply;
use hardylab::{DiskPoint, Symbol, Thresholds, TrendFit, Verdict, VerdictOutcome, C64};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{DilationTask, IdentitiesTask, Preset, RunConfig, TaskConfig};
use crate::error::CliError;
use crate::instances;
use crate::preset;
use crate::report::{self, CurveRow, Emitted, Report, RunInfo, TaskResult, SCHEMA_VERSION};

pub const DEFAULT_OUTPUT_DIR: &str = "hardylab-out";
/// Largest dense section a hartman task may ask for.
pub const MAX_SECTION: usize = 4096;

/// Overrides applied on top of the config file.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub output_dir: Option<PathBuf>,
    pub seed: Option<u64>,
    /// File-name stamp; defaults to the current UTC time.
    pub stamp: Option<String>,
}

/// A validated run, ready to execute.
#[derive(Debug, Clone)]
pub struct Plan {
    pub config: RunConfig,
    pub tasks: Vec<TaskConfig>,
    pub sources: BTreeMap<String, String>,
    pub symbols: BTreeMap<String, Symbol>,
    pub output_dir: PathBuf,
}

#[derive(Debug)]
pub struct RunOutcome {
    pub report: Report,
    pub files: Emitted,
}

impl RunOutcome {
    pub fn exit_code(&self) -> u8 {
        self.report.summary.exit_code
    }
}

fn check_name(what: &str, name: &str) -> Result<(), CliError> {
    let ok = !name.is_empty()
        && name.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
        && !name.starts_with('.');
    if ok {
        Ok(())
    } else {
        Err(CliError::config(format!(
            "{what} `{name}` must be nonempty and use only letters, digits, `_`, `-` and `.`"
        )))
    }
}

fn thresholds_for<'a>(task: &'a TaskConfig, global: &'a Thresholds) -> &'a Thresholds {
    task.thresholds().unwrap_or(global)
}

pub fn prepare(mut config: RunConfig, opts: &RunOptions) -> Result<Plan, CliError> {
    if let Some(seed) = opts.seed {
        config.seed = seed;
    }
    let mut sources = config.symbols.clone();
    let mut tasks = config.tasks.clone();
    if config.preset == Some(Preset::PaperSuite) {
        for (name, expr) in preset::paper_suite_symbols() {
            if sources.contains_key(&name) {
                return Err(CliError::config(format!("symbol `{name}` is defined by the paper-suite preset")));
            }
            sources.insert(name, expr);
        }
        tasks.extend(preset::paper_suite_tasks());
    }

    let mut ids = BTreeSet::new();
    for t in &tasks {
        check_name("task id", t.id())?;
        if !ids.insert(t.id()) {
            return Err(CliError::config(format!("duplicate task id `{}`", t.id())));
        }
    }

    let opts_lower = config.lowering.options();
    opts_lower.validate().map_err(|e| CliError::config(format!("lowering: {e}")))?;
    config.thresholds.validate().map_err(|e| CliError::config(format!("thresholds: {e}")))?;

    let mut symbols = BTreeMap::new();
    for (name, expr) in &sources {
        check_name("symbol name", name)?;
        let s = symbol_from_str(expr, &opts_lower).map_err(|e| CliError::symbol(name, e))?;
        symbols.insert(name.clone(), s);
    }

    for t in &tasks {
        for name in t.symbol_refs() {
            let s = symbols
                .get(name)
                .ok_or_else(|| CliError::config(format!("task `{}` references undefined symbol `{name}`", t.id())))?;
            s.require_certifiable().map_err(|e| CliError::symbol(name, e))?;
        }
        if let Some(th) = t.thresholds() {
            th.validate().map_err(|e| CliError::config(format!("task `{}` thresholds: {e}", t.id())))?;
        }
        validate_task(t, &symbols).map_err(|e| match e {
            CliError::Config(msg) => CliError::config(format!("task `{}`: {msg}", t.id())),
            other => other,
        })?;
    }

    let output_dir =
        opts.output_dir.clone().or_else(|| config.output_dir.clone()).unwrap_or_else(|| DEFAULT_OUTPUT_DIR.into());
    Ok(Plan { config, tasks, sources, symbols, output_dir })
}

fn product_check(symbols: &BTreeMap<String, Symbol>, f: &str, g: &str) -> Result<(), CliError> {
    multiply(&symbols[f], &symbols[g])
        .map(|_| ())
        .map_err(|e| CliError::config(format!("product of `{f}` and `{g}`: {e}")))
}

fn validate_task(t: &TaskConfig, symbols: &BTreeMap<String, Symbol>) -> Result<(), CliError> {
    let sym = |n: &str| symbols[n].clone();
    match t {
        TaskConfig::Identities(t) => {
            if t.instances == 0 || t.window == 0 {
                return Err(CliError::config("instances and window must be positive"));
            }
            if !(0.0..1.0).contains(&t.max_radius) {
                return Err(CliError::config("max_radius must lie in [0, 1)"));
            }
            if !(t.tolerance > 0.0) {
                return Err(CliError::config("tolerance must be positive"));
            }
            if let Some([x, y]) = t.z {
                DiskPoint::new(C64::new(x, y)).map_err(|e| CliError::config(e.to_string()))?;
            }
        }
        TaskConfig::Hartman(t) => {
            if t.sizes.is_empty() || t.sizes[0] == 0 || !t.sizes.windows(2).all(|w| w[0] < w[1]) {
                return Err(CliError::config("sizes must be positive and strictly increasing"));
            }
            if *t.sizes.last().unwrap() > MAX_SECTION {
                return Err(CliError::config(format!("sections above {MAX_SECTION} are not supported")));
            }
        }
        TaskConfig::Zheng(t) => {
            t.net.build(&[&sym(&t.f), &sym(&t.g)])?;
        }
        TaskConfig::Product(t) => {
            t.net.build(&[&sym(&t.f), &sym(&t.g)])?;
            product_check(symbols, &t.f, &t.g)?;
        }
        TaskConfig::SumProduct(t) => {
            t.net.build(&[&sym(&t.f1), &sym(&t.g1), &sym(&t.f2), &sym(&t.g2)])?;
            for (f, g) in [(&t.f1, &t.g1), (&t.f2, &t.g2), (&t.f1, &t.g2)] {
                product_check(symbols, f, g)?;
            }
        }
        TaskConfig::Dilation(t) => {
            if t.pairs.is_empty() {
                return Err(CliError::config("dilation needs at least one [f, g] pair"));
            }
            if t.decreasing.is_some_and(|x| !(x >= 1.0)) || t.at_least.is_some_and(|x| !(x >= 0.0)) {
                return Err(CliError::config("decreasing must be at least 1 and at_least nonnegative"));
            }
            t.net()?;
        }
    }
    Ok(())
}

/// Task results in config order, CSV rows per task id, and seconds per task id.
pub type Executed = (Vec<TaskResult>, BTreeMap<String, Vec<CurveRow>>, BTreeMap<String, f64>);

/// Runs a plan without touching the file system.
pub fn execute(plan: &Plan) -> Executed {
    let outputs: Vec<(TaskResult, Vec<CurveRow>, f64)> = plan
        .tasks
        .par_iter()
        .enumerate()
        .map(|(k, t)| {
            let start = Instant::now();
            let (res, rows) = run_task(plan, k as u64, t);
            (res, rows, start.elapsed().as_secs_f64())
        })
        .collect();
    let mut results = Vec::new();
    let mut curves = BTreeMap::new();
    let mut seconds = BTreeMap::new();
    for (res, rows, s) in outputs {
        seconds.insert(res.id.clone(), s);
        curves.insert(res.id.clone(), rows);
        results.push(res);
    }
    (results, curves, seconds)
}

/// Validates, executes and writes the report.
pub fn run(config: RunConfig, opts: &RunOptions) -> Result<RunOutcome, CliError> {
    let start = Instant::now();
    let plan = prepare(config, opts)?;
    let (tasks, curves, task_seconds) = execute(&plan);
    let stamp = report::free_stamp(&plan.output_dir, &opts.stamp.clone().unwrap_or_else(report::timestamp));
    let mut echo = plan.config.clone();
    echo.output_dir = None;
    let summary = Report::summarize(&tasks);
    let mut report = Report {
        schema_version: SCHEMA_VERSION,
        tool: "hardylab".into(),
        tool_version: env!("CARGO_PKG_VERSION").into(),
        config: serde_json::to_value(&echo).expect("config serializes"),
        symbols: plan.sources.clone(),
        tasks,
        summary,
        run: RunInfo {
            stamp,
            output_dir: plan.output_dir.clone(),
            wall_clock_seconds: 0.0,
            task_seconds,
            curve_files: BTreeMap::new(),
        },
    };
    report.run.wall_clock_seconds = start.elapsed().as_secs_f64();
    let files = report::emit(&mut report, &curves)?;
    Ok(RunOutcome { report, files })
}

fn failed(t: &TaskConfig, err: hardylab::Error) -> (TaskResult, Vec<CurveRow>) {
    (
        TaskResult {
            id: t.id().into(),
            kind: t.kind().into(),
            passed: false,
            headline: format!("error: {err}"),
            error: Some(err.to_string()),
            details: Value::Null,
        },
        Vec::new(),
    )
}

fn run_task(plan: &Plan, stream: u64, t: &TaskConfig) -> (TaskResult, Vec<CurveRow>) {
    let outcome = match t {
        TaskConfig::Identities(task) => run_identities(plan, stream, task),
        TaskConfig::Dilation(task) => run_dilation(plan, task),
        _ => run_verdict(plan, t),
    };
    match outcome {
        Ok((passed, headline, details, rows)) => {
            (TaskResult { id: t.id().into(), kind: t.kind().into(), passed, headline, error: None, details }, rows)
        }
        Err(e) => failed(t, e),
    }
}

type TaskOutput = (bool, String, Value, Vec<CurveRow>);

// ---- identities -------------------------------------------------------------

#[derive(Serialize)]
struct InstanceRecord {
    index: usize,
    f: hardylab::Laurent,
    g: hardylab::Laurent,
    z: DiskPoint,
    residuals: BTreeMap<String, ResidualCell>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

#[derive(Serialize)]
struct ResidualCell {
    residual: f64,
    certified: bool,
    certified_columns: usize,
}

fn pinned_poly(plan: &Plan, name: &Option<String>) -> Option<Symbol> {
    name.as_ref().map(|n| plan.symbols[n].clone())
}

fn run_identities(plan: &Plan, stream: u64, task: &IdentitiesTask) -> hardylab::Result<TaskOutput> {
    let mut rng = instances::rng(plan.config.seed, stream);
    let pin_f = pinned_poly(plan, &task.f);
    let pin_g = pinned_poly(plan, &task.g);
    let pin_z = task.z.map(|[x, y]| DiskPoint::new(C64::new(x, y))).transpose()?;
    // Every draw happens up front, so the instances do not depend on scheduling.
    let drawn: Vec<(Symbol, Symbol, DiskPoint)> = (0..task.instances)
        .map(|_| {
            let f = instances::trig_poly(&mut rng, task.max_degree);
            let g = instances::trig_poly(&mut rng, task.max_degree);
            let z = instances::disk_point(&mut rng, task.max_radius);
            (
                pin_f.clone().unwrap_or_else(|| Symbol::polynomial(f)),
                pin_g.clone().unwrap_or_else(|| Symbol::polynomial(g)),
                pin_z.unwrap_or(z),
            )
        })
        .collect();
    let results: Vec<_> = drawn
        .par_iter()
        .map(|(f, g, z)| identity_suite(&IdentityInputs { f: f.clone(), g: g.clone(), z: *z }, task.window))
        .collect();

    let rivals = [(IdentityId::P3a, IdentityId::P3b), (IdentityId::ML2a, IdentityId::ML2b)];
    let mut records = Vec::new();
    let mut max_res: BTreeMap<IdentityId, f64> = BTreeMap::new();
    let mut uncertified: BTreeMap<IdentityId, usize> = BTreeMap::new();
    let mut winners: Vec<BTreeMap<String, usize>> = vec![BTreeMap::new(); rivals.len()];
    let mut errors = 0;
    for (index, ((f, g, z), res)) in drawn.iter().zip(&results).enumerate() {
        let coeffs = |s: &Symbol| s.as_polynomial().cloned().unwrap_or_else(hardylab::Laurent::zero);
        let mut rec =
            InstanceRecord { index, f: coeffs(f), g: coeffs(g), z: *z, residuals: BTreeMap::new(), error: None };
        match res {
            Ok((reports, adj)) => {
                for r in reports {
                    rec.residuals.insert(
                        r.id.name().into(),
                        ResidualCell {
                            residual: r.residual,
                            certified: r.certified,
                            certified_columns: r.certified_columns,
                        },
                    );
                    if r.certified {
                        let m = max_res.entry(r.id).or_insert(0.0);
                        *m = m.max(r.residual);
                    } else {
                        *uncertified.entry(r.id).or_default() += 1;
                    }
                }
                for (k, a) in adj.iter().enumerate() {
                    let name = a.winner.map_or("none", |w| w.name());
                    *winners[k].entry(name.into()).or_default() += 1;
                }
            }
            Err(e) => {
                errors += 1;
                rec.error = Some(e.to_string());
            }
        }
        records.push(rec);
    }

    let losers: BTreeSet<IdentityId> = IdentityId::ALL.into_iter().filter(|id| id.rival().is_some()).collect();
    let mut passed = errors == 0;
    let mut table = Vec::new();
    let mut adjudications = Vec::new();
    for (k, (a, b)) in rivals.iter().enumerate() {
        let unanimous =
            (winners[k].len() == 1).then(|| winners[k].keys().next().unwrap().clone()).filter(|w| w != "none");
        if unanimous.is_none() {
            passed = false;
        }
        adjudications.push(json!({
            "pair": [a.name(), b.name()],
            "winner": unanimous,
            "votes": winners[k],
        }));
    }
    let winner_names: BTreeSet<String> =
        adjudications.iter().filter_map(|a| a["winner"].as_str().map(String::from)).collect();
    for id in IdentityId::ALL {
        // Rival readings are judged through adjudication; only the winner's residual must be small.
        let judged = !losers.contains(&id) || winner_names.contains(id.name());
        let max = max_res.get(&id).copied();
        let ok = !judged || max.is_none_or(|m| m <= task.tolerance);
        if !ok {
            passed = false;
        }
        table.push(json!({
            "id": id.name(),
            "formula": id.formula(),
            "max_certified_residual": max,
            "uncertified_instances": uncertified.get(&id).copied().unwrap_or(0),
            "judged": judged,
            "within_tolerance": ok,
        }));
    }
    let worst = IdentityId::ALL
        .iter()
        .filter(|id| !losers.contains(id) || winner_names.contains(id.name()))
        .filter_map(|id| max_res.get(id))
        .fold(0.0f64, |a, b| a.max(*b));
    let headline = format!(
        "{} instances at N = {}: worst certified residual {worst:.2e}, winners {}{}",
        task.instances,
        task.window,
        winner_names.iter().cloned().collect::<Vec<_>>().join(", "),
        if errors > 0 { format!(", {errors} failed instances") } else { String::new() }
    );
    let details = json!({
        "window": task.window,
        "instances": task.instances,
        "max_degree": task.max_degree,
        "tolerance": task.tolerance,
        "identities": table,
        "adjudications": adjudications,
        "records": records,
    });
    Ok((passed, headline, details, Vec::new()))
}

// ---- verdicts ---------------------------------------------------------------

#[derive(Serialize)]
struct AngleFits<'a> {
    angle: f64,
    fits: &'a BTreeMap<String, TrendFit>,
}

#[derive(Serialize)]
struct VerdictRecord<'a> {
    outcome: VerdictOutcome,
    expected: Option<VerdictOutcome>,
    trivial: bool,
    thresholds: &'a Thresholds,
    notes: &'a [String],
    per_angle_case: &'a [AngleCase],
    sizes: &'a [SizeEvidence],
    fits: Vec<AngleFits<'a>>,
}

fn curve_rows(task: &str, v: &Verdict) -> Vec<CurveRow> {
    let mut rows = Vec::new();
    for c in &v.evidence {
        for p in &c.points {
            for (tag, m) in &p.quantities {
                rows.push(CurveRow {
                    task: task.into(),
                    angle: c.angle,
                    radius: p.radius,
                    tag: tag.clone(),
                    value: m.value,
                    error_bar: m.error_bar,
                });
            }
        }
    }
    rows
}

fn run_verdict(plan: &Plan, t: &TaskConfig) -> hardylab::Result<TaskOutput> {
    let th = thresholds_for(t, &plan.config.thresholds);
    let s = |n: &String| &plan.symbols[n];
    let (verdict, expect) = match t {
        TaskConfig::Hartman(h) => (hartman_verdict(s(&h.symbol), &h.sizes, th)?, h.expect),
        TaskConfig::Zheng(p) => {
            let net = p.net.build(&[s(&p.f), s(&p.g)]).map_err(|e| hardylab::Error::Invalid(e.to_string()))?;
            (zheng_pair_verdict(s(&p.f), s(&p.g), &net, th)?, p.expect)
        }
        TaskConfig::Product(p) => {
            let net = p.net.build(&[s(&p.f), s(&p.g)]).map_err(|e| hardylab::Error::Invalid(e.to_string()))?;
            (product_verdict(s(&p.f), s(&p.g), &net, th)?, p.expect)
        }
        TaskConfig::SumProduct(p) => {
            let syms = [s(&p.f1), s(&p.g1), s(&p.f2), s(&p.g2)];
            let net = p.net.build(&syms).map_err(|e| hardylab::Error::Invalid(e.to_string()))?;
            (sum_product_verdict(syms[0], syms[1], syms[2], syms[3], &net, th)?, p.expect)
        }
        TaskConfig::Identities(_) | TaskConfig::Dilation(_) => unreachable!("handled elsewhere"),
    };
    let passed = match expect {
        Some(e) => verdict.outcome == e,
        None => verdict.outcome != VerdictOutcome::Inconclusive,
    };
    let outcome = serde_json::to_value(verdict.outcome).expect("serializes");
    let mut headline = outcome.as_str().unwrap_or_default().to_string();
    if let Some(e) = expect {
        headline.push_str(&format!(
            " (expected {})",
            serde_json::to_value(e).expect("serializes").as_str().unwrap_or_default()
        ));
    }
    if !verdict.per_angle_case.is_empty() {
        headline.push_str(&format!(", {} angles", verdict.per_angle_case.len()));
    }
    let record = VerdictRecord {
        outcome: verdict.outcome,
        expected: expect,
        trivial: verdict.trivial,
        thresholds: &verdict.thresholds,
        notes: &verdict.notes,
        per_angle_case: &verdict.per_angle_case,
        sizes: &verdict.sizes,
        fits: verdict.evidence.iter().map(|c| AngleFits { angle: c.angle, fits: &c.fits }).collect(),
    };
    let details = serde_json::to_value(&record).expect("verdict serializes");
    Ok((passed, headline, details, curve_rows(t.id(), &verdict)))
}

// ---- dilation ---------------------------------------------------------------

fn run_dilation(plan: &Plan, task: &DilationTask) -> hardylab::Result<TaskOutput> {
    let pairs: Vec<(Symbol, Symbol)> =
        task.pairs.iter().map(|[f, g]| (plan.symbols[f].clone(), plan.symbols[g].clone())).collect();
    let net = task.net().map_err(|e| hardylab::Error::Invalid(e.to_string()))?;
    let sweeps = net
        .boundary_angles
        .par_iter()
        .map(|&a| dilation_sweep(&pairs, a, &net))
        .collect::<hardylab::Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    let mut per_angle = Vec::new();
    let mut passed = true;
    for pts in &sweeps {
        let Some(first) = pts.first() else { continue };
        let values: Vec<f64> = pts.iter().map(|p| p.residual.value).collect();
        // A step may grow by the noise factor, measured between the error-bar extremes.
        let monotone = task.decreasing.map(|noise| {
            pts.windows(2).all(|w| {
                let (a, b) = (w[0].residual, w[1].residual);
                (b.value - b.error_bar).max(0.0) <= noise * (a.value + a.error_bar)
            })
        });
        let minimum = values.iter().copied().fold(f64::INFINITY, f64::min);
        let bounded = task.at_least.map(|floor| minimum >= floor);
        passed &= monotone.unwrap_or(true) && bounded.unwrap_or(true);
        per_angle.push(json!({
            "angle": first.angle,
            "residual": values,
            "first_form": pts.iter().map(|p| p.first_form.value).collect::<Vec<_>>(),
            "minimum": minimum,
            "terminal": values.last(),
            "monotone": monotone,
            "bounded_below": bounded,
        }));
        for p in pts {
            for (tag, m) in [("residual", p.residual), ("first_form", p.first_form)] {
                rows.push(CurveRow {
                    task: task.id.clone(),
                    angle: p.angle,
                    radius: p.radius,
                    tag: tag.into(),
                    value: m.value,
                    error_bar: m.error_bar,
                });
            }
        }
    }
    let terminal: Vec<String> =
        per_angle.iter().map(|a| format!("{:.3e}", a["terminal"].as_f64().unwrap_or(f64::NAN))).collect();
    let headline = format!("terminal residual {} over {} angles", terminal.join(", "), per_angle.len());
    let details = json!({
        "pairs": task.pairs,
        "radii": net.radii,
        "decreasing": task.decreasing,
        "at_least": task.at_least,
        "angles": per_angle,
    });
    Ok((passed, headline, details, rows))
}
