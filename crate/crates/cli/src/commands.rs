use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use pauli_derand::bench::{run_bench, BenchConfig, BenchMethod, BenchReport};
use pauli_derand::confidence::{
    confidence_bound, expected_confidence_bound, hit_count, hits_for_certificate, is_certified,
};
use pauli_derand::io::{
    read_observables, read_outcomes, read_schedule, read_state, render_outcomes, render_schedule,
};
use pauli_derand::simulator::{stream_rng, BlochSpec, EigenMethod, StateSpec};
use pauli_derand::{
    derandomize as run_derandomizer, estimate_all, BudgetFreeParams, CostMode, CostParams,
    DerandConfig, EstimateReport, ObservableSet, StateVector,
};

use crate::manifest::Manifest;
use crate::{BenchArgs, ConfidenceArgs, DerandomizeArgs, EigenArg, EstimateArgs, ReportFormat, SimulateArgs};

/// Marks an error as a usage error (exit code 2).
#[derive(Debug)]
pub struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(message: impl Into<String>) -> anyhow::Error {
    UsageError(message.into()).into()
}

pub fn exit_code(e: &anyhow::Error) -> u8 {
    for cause in e.chain() {
        if cause.is::<UsageError>() {
            return 2;
        }
        if let Some(err) = cause.downcast_ref::<pauli_derand::Error>() {
            use pauli_derand::Error::*;
            return match err {
                Parse { .. } | Config(_) | Domain(_) | Dimension { .. } => 2,
                _ => 1,
            };
        }
    }
    1
}

fn load_observables(path: &Path) -> Result<ObservableSet> {
    read_observables(path).with_context(|| format!("reading observables from {}", path.display()))
}

/// Write `text` to `out`, or to stdout when no path is given.
fn emit(out: Option<&PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            std::io::stdout().lock().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn derand_config(args: &DerandomizeArgs) -> Result<DerandConfig> {
    if let Some(budget) = args.budget {
        let epsilon = args
            .epsilon
            .ok_or_else(|| usage("--budget needs an explicit --epsilon"))?;
        return Ok(DerandConfig::fixed_budget(budget, CostParams::new(epsilon, args.delta)?));
    }
    let (min_hits, cap) = match (args.min_hits, args.cap) {
        (Some(t), Some(m)) => (t, m),
        _ => return Err(usage("give either --budget or --min-hits with --cap")),
    };
    let params = BudgetFreeParams::new(args.eta.unwrap_or(BudgetFreeParams::DEFAULT_ETA))?;
    Ok(DerandConfig::budget_free(cap, params)
        .weighted(args.weighted)
        .min_hits(min_hits))
}

fn echo_config(manifest: &mut Manifest, config: &DerandConfig) {
    match config.mode {
        CostMode::FixedBudget(p) => {
            manifest.set("config.mode", "fixed-budget");
            manifest.set("config.epsilon", p.epsilon());
            manifest.set("config.delta", p.delta());
            manifest.set("config.nu", p.nu());
        }
        CostMode::BudgetFree(p) => {
            manifest.set("config.mode", "budget-free");
            manifest.set("config.eta", p.eta());
            manifest.set("config.nu", p.nu());
        }
    }
    manifest.set("config.budget", config.budget);
    manifest.set("config.weighted", config.weighted);
    match config.min_hits {
        Some(t) => manifest.set("config.min_hits", t),
        None => manifest.set("config.min_hits", "none"),
    }
}

pub fn derandomize(args: &DerandomizeArgs, argv: &[String]) -> Result<()> {
    let mut manifest = Manifest::new("derandomize", argv);
    let observables = load_observables(&args.observables)?;
    let config = derand_config(args)?;
    let outcome = run_derandomizer(&observables, config.clone())?;
    let rows = outcome.schedule.rows();
    emit(args.out.as_ref(), &render_schedule(rows))?;

    let mut summary = String::new();
    writeln!(summary, "rows={}", rows.len())?;
    writeln!(summary, "min_hits={}", outcome.min_hits())?;
    writeln!(summary, "satisfied={}", outcome.satisfied)?;
    writeln!(summary, "final_cost={}", outcome.final_cost)?;
    if let CostMode::FixedBudget(params) = config.mode {
        writeln!(summary, "confidence={}", confidence_bound(&observables, rows, &params)?)?;
        writeln!(
            summary,
            "expected_confidence={}",
            expected_confidence_bound(&observables, config.budget, &params)
        )?;
    }
    if !outcome.dropped.is_empty() {
        writeln!(summary, "dropped_zero_coefficient_terms={}", outcome.dropped.len())?;
    }

    if let Some(out) = &args.out {
        print!("{summary}");
        manifest.set_path("input.observables", &args.observables);
        manifest.set("input.observable_count", observables.len());
        manifest.set("input.qubits", observables.num_qubits());
        manifest.set("seed", "none");
        echo_config(&mut manifest, &config);
        for (key, value) in summary.lines().filter_map(|l| l.split_once('=')) {
            manifest.set(&format!("result.{key}"), value);
        }
        manifest.write_beside(out)?;
    } else {
        eprint!("{summary}");
    }
    Ok(())
}

fn parse_state_spec(text: &str, n: usize) -> Result<StateSpec> {
    let text = text.trim();
    let spec = match text {
        "zero" => StateSpec::Zero(n),
        "plus" => StateSpec::Plus(n),
        "ghz" => StateSpec::Ghz(n),
        _ => {
            let qubits = text
                .strip_prefix("product:")
                .ok_or_else(|| usage(format!("unknown state {text:?}; use zero, plus, ghz or product:<qubits>")))?;
            let qubits = qubits
                .split(',')
                .map(|q| q.parse::<BlochSpec>())
                .collect::<pauli_derand::Result<Vec<_>>>()?;
            if qubits.len() != n {
                return Err(usage(format!(
                    "product state has {} qubits but the schedule has {n}",
                    qubits.len()
                )));
            }
            StateSpec::Product(qubits)
        }
    };
    Ok(spec)
}

pub fn simulate(args: &SimulateArgs, argv: &[String]) -> Result<()> {
    let mut manifest = Manifest::new("simulate", argv);
    let schedule = read_schedule(&args.schedule)
        .with_context(|| format!("reading schedule from {}", args.schedule.display()))?;
    let n = schedule.num_qubits();
    let records = if schedule.is_empty() {
        Vec::new()
    } else {
        let state = match &args.state_file {
            Some(path) => {
                let state = read_state(path).with_context(|| format!("reading state from {}", path.display()))?;
                if state.num_qubits() != n {
                    return Err(usage(format!(
                        "state has {} qubits but the schedule has {n}",
                        state.num_qubits()
                    )));
                }
                state
            }
            None => StateVector::build(&parse_state_spec(&args.state, n)?)?,
        };
        let mut rng = stream_rng(args.seed, 0);
        state.measure_schedule(schedule.rows(), &mut rng)?
    };
    emit(args.out.as_ref(), &render_outcomes(&records))?;

    if let Some(out) = &args.out {
        manifest.set_path("input.schedule", &args.schedule);
        match &args.state_file {
            Some(path) => manifest.set_path("input.state_file", path),
            None => manifest.set("config.state", &args.state),
        }
        manifest.set("seed", args.seed);
        manifest.set("result.rows", records.len());
        manifest.write_beside(out)?;
    }
    Ok(())
}

fn estimate_text(observables: &ObservableSet, report: &EstimateReport, params: &CostParams) -> String {
    let mut s = String::new();
    let status = if report.certified { "certified" } else { "not certified" };
    writeln!(s, "energy = {} +/- {}", report.energy, report.energy_error_bar).unwrap();
    writeln!(
        s,
        "confidence = {} ({status}; threshold delta/2 = {})",
        report.confidence,
        0.5 * report.delta
    )
    .unwrap();
    writeln!(s, "epsilon = {}, delta = {}", report.epsilon, report.delta).unwrap();
    writeln!(
        s,
        "hits needed per observable for a certificate = {}",
        hits_for_certificate(observables.len(), params)
    )
    .unwrap();
    writeln!(s, "never hit = {}", report.never_hit_count).unwrap();
    let width = observables.num_qubits().max(5);
    writeln!(s, "{:>5}  {:<width$}  {:>12}  {:>12}  {:>8}", "index", "label", "coefficient", "estimate", "hits").unwrap();
    for (l, (o, e)) in observables.iter().zip(&report.entries).enumerate() {
        let flag = if e.never_hit { "  never hit" } else { "" };
        writeln!(
            s,
            "{l:>5}  {:<width$}  {:>12.6}  {:>12.6}  {:>8}{flag}",
            o.labels().to_string(),
            e.coefficient,
            e.estimate,
            e.hits
        )
        .unwrap();
    }
    s
}

fn estimate_kv(observables: &ObservableSet, report: &EstimateReport) -> String {
    let mut s = String::new();
    writeln!(s, "epsilon={}", report.epsilon).unwrap();
    writeln!(s, "delta={}", report.delta).unwrap();
    writeln!(s, "energy={}", report.energy).unwrap();
    writeln!(s, "energy_error_bar={}", report.energy_error_bar).unwrap();
    writeln!(s, "confidence={}", report.confidence).unwrap();
    writeln!(s, "certified={}", report.certified).unwrap();
    writeln!(s, "never_hit_count={}", report.never_hit_count).unwrap();
    writeln!(s, "observables={}", observables.len()).unwrap();
    for (l, (o, e)) in observables.iter().zip(&report.entries).enumerate() {
        writeln!(s, "obs.{l}.label={}", o.labels()).unwrap();
        writeln!(s, "obs.{l}.coefficient={}", e.coefficient).unwrap();
        writeln!(s, "obs.{l}.estimate={}", e.estimate).unwrap();
        writeln!(s, "obs.{l}.hits={}", e.hits).unwrap();
        writeln!(s, "obs.{l}.never_hit={}", e.never_hit).unwrap();
    }
    s
}

pub fn estimate(args: &EstimateArgs, argv: &[String]) -> Result<()> {
    let mut manifest = Manifest::new("estimate", argv);
    let params = CostParams::new(args.epsilon, args.delta)?;
    let observables = load_observables(&args.observables)?;
    let outcomes = read_outcomes(&args.outcomes)
        .with_context(|| format!("reading outcomes from {}", args.outcomes.display()))?;
    let report = estimate_all(&observables, &outcomes, &params)?;
    let kv = estimate_kv(&observables, &report);
    match args.format {
        ReportFormat::Text => print!("{}", estimate_text(&observables, &report, &params)),
        ReportFormat::Kv => print!("{kv}"),
    }
    if let Some(out) = &args.out {
        emit(Some(out), &kv)?;
        manifest.set_path("input.observables", &args.observables);
        manifest.set_path("input.outcomes", &args.outcomes);
        manifest.set("seed", "none");
        manifest.set("config.epsilon", params.epsilon());
        manifest.set("config.delta", params.delta());
        manifest.set("result.energy", report.energy);
        manifest.set("result.certified", report.certified);
        manifest.write_beside(out)?;
    }
    Ok(())
}

fn bench_text(report: &BenchReport) -> String {
    let mut s = String::new();
    writeln!(s, "ground_energy = {}", report.ground_energy).unwrap();
    if report.degenerate {
        writeln!(s, "warning: the ground state is degenerate; one ground state was used").unwrap();
    }
    writeln!(
        s,
        "{:<8}  {:>8}  {:>6}  {:>12}  {:>12}  {:>12}",
        "method", "budget", "trials", "rmse", "min_hits", "median_hits"
    )
    .unwrap();
    for r in &report.results {
        writeln!(
            s,
            "{:<8}  {:>8}  {:>6}  {:>12.6}  {:>12.2}  {:>12.2}",
            r.method.name(),
            r.budget,
            r.energies.len(),
            r.rmse,
            r.mean_min_hits(),
            r.mean_median_hits()
        )
        .unwrap();
    }
    s
}

fn bench_kv(report: &BenchReport) -> String {
    let mut s = String::new();
    writeln!(s, "ground_energy={}", report.ground_energy).unwrap();
    writeln!(s, "degenerate={}", report.degenerate).unwrap();
    for r in &report.results {
        let key = format!("{}.{}", r.method.name(), r.budget);
        let join = |v: Vec<String>| v.join(",");
        writeln!(s, "{key}.rmse={}", r.rmse).unwrap();
        writeln!(s, "{key}.mean_min_hits={}", r.mean_min_hits()).unwrap();
        writeln!(s, "{key}.mean_median_hits={}", r.mean_median_hits()).unwrap();
        writeln!(s, "{key}.energies={}", join(r.energies.iter().map(|e| e.to_string()).collect())).unwrap();
        writeln!(s, "{key}.min_hits={}", join(r.min_hits.iter().map(|h| h.to_string()).collect())).unwrap();
    }
    s
}

pub fn bench(args: &BenchArgs, argv: &[String]) -> Result<()> {
    let mut manifest = Manifest::new("bench", argv);
    let terms = load_observables(&args.hamiltonian)?;
    let hamiltonian = pauli_derand::PauliSumHamiltonian::new(terms)?;
    let mut config = BenchConfig::new(args.budget.clone(), args.trials, args.seed);
    config.methods = args
        .methods
        .iter()
        .map(|m| m.parse::<BenchMethod>())
        .collect::<pauli_derand::Result<_>>()?;
    config.derand = DerandConfig::budget_free(1, BudgetFreeParams::new(args.eta)?).weighted(!args.unweighted);
    config.ground_state.method = match args.eigen {
        EigenArg::Auto => EigenMethod::Auto,
        EigenArg::Dense => EigenMethod::Dense,
        EigenArg::Lanczos => EigenMethod::Lanczos,
    };
    if let Some(cap) = args.max_qubits {
        config.ground_state.iterative_cap = cap;
        config.ground_state.dense_cap = config.ground_state.dense_cap.min(cap);
    }
    config.cache_dir = args.cache_dir.clone();

    let report = run_bench(&hamiltonian, &config)?;
    let kv = bench_kv(&report);
    match args.format {
        ReportFormat::Text => print!("{}", bench_text(&report)),
        ReportFormat::Kv => print!("{kv}"),
    }
    if let Some(out) = &args.out {
        emit(Some(out), &kv)?;
        manifest.set_path("input.hamiltonian", &args.hamiltonian);
        manifest.set("seed", args.seed);
        let budgets: Vec<String> = args.budget.iter().map(|b| b.to_string()).collect();
        manifest.set("config.budgets", budgets.join(","));
        manifest.set("config.trials", args.trials);
        manifest.set("config.methods", args.methods.join(","));
        echo_config(&mut manifest, &config.derand);
        manifest.set("config.eigen", format!("{:?}", config.ground_state.method).to_lowercase());
        manifest.set("result.ground_energy", report.ground_energy);
        manifest.write_beside(out)?;
    }
    Ok(())
}

pub fn confidence(args: &ConfidenceArgs) -> Result<()> {
    let params = CostParams::new(args.epsilon, args.delta)?;
    let observables = load_observables(&args.observables)?;
    let schedule = read_schedule(&args.schedule)
        .with_context(|| format!("reading schedule from {}", args.schedule.display()))?;
    let rows = schedule.rows();
    let conf = confidence_bound(&observables, rows, &params)?;
    let mut s = String::new();
    writeln!(s, "rows={}", rows.len())?;
    writeln!(s, "confidence={conf}")?;
    writeln!(s, "expected_confidence={}", expected_confidence_bound(&observables, rows.len(), &params))?;
    writeln!(s, "certified={}", is_certified(conf, &params))?;
    for (l, o) in observables.iter().enumerate() {
        writeln!(s, "obs.{l}.label={}", o.labels())?;
        writeln!(s, "obs.{l}.hits={}", hit_count(o, rows)?)?;
    }
    print!("{s}");
    Ok(())
}
