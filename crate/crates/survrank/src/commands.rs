//! Command implementations. Each command stages its outputs and commits them only after
//! every step has succeeded; the manifest is written afterwards by `run`.

use std::collections::BTreeSet;
use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use survrank_core::baselines::{CompareConfig, ComparisonTable, MethodRow, Rankers};
use survrank_core::bootstrap::{apply_risk, stratify_cohort, BootstrapConfig, BootstrapSummary, CohortStratification, RiskFormula, RiskGroup};
use survrank_core::data::{default_beta, generate_synthetic, Cohort, CovariateKind, CovariateSchema, SyntheticGroundTruth};
use survrank_core::math::{l1_norm, median};
use survrank_core::model::{train, TrainConfig};
use survrank_core::stats::{km_estimate, logrank_test, Group, LogRankResult};

use crate::cli::*;
use crate::cohort_csv::{read_cohort, read_outcomes, render_cohort};
use crate::config::ConfigFile;
use crate::error::{CliError, CliResult};
use crate::manifest::{sha256_hex, RunManifest};
use crate::output::*;
use crate::parallel::{bootstrap_parallel, compare_parallel, default_workers, worker_pool};
use crate::schema_file::{load_schema, render_schema};

/// Runs a parsed command and writes its manifest. Returns the process exit status.
pub fn run(cli: &Cli, args: Vec<String>) -> i32 {
    let start = Instant::now();
    let mut manifest = RunManifest::new(cli.command.name(), args);
    let result = dispatch(&cli.command, &mut manifest);
    manifest.finish(&result, start.elapsed());
    match &result {
        Ok(()) => log::info!("{} finished in {:.2}s", cli.command.name(), manifest.duration_seconds),
        Err(e) => eprintln!("error: {e}"),
    }
    if let Err(e) = manifest.write(&cli.command.common().output_dir) {
        eprintln!("error: {e}");
        return e.exit_code().max(manifest.exit_code);
    }
    manifest.exit_code
}

fn dispatch(command: &Command, m: &mut RunManifest) -> CliResult<()> {
    match command {
        Command::Synth(a) => cmd_synth(a, m),
        Command::Fit(a) => cmd_fit(a, m),
        Command::Bootstrap(a) => cmd_bootstrap(a, m),
        Command::Compare(a) => cmd_compare(a, m),
        Command::Univariate(a) => cmd_univariate(a, m),
        Command::ApplyRisk(a) => cmd_apply_risk(a, m),
        Command::Km(a) => cmd_km(a, m),
        Command::Logrank(a) => cmd_logrank(a, m),
    }
}

fn load_config(common: &CommonArgs, m: &mut RunManifest) -> CliResult<ConfigFile> {
    if let Some(path) = &common.config {
        m.add_input(path)?;
    }
    ConfigFile::load(common.config.as_deref())
}

fn load_input(input: &InputArgs, m: &mut RunManifest) -> CliResult<Cohort> {
    let schema = match &input.schema {
        Some(path) => {
            m.add_input(path)?;
            Some(load_schema(path)?)
        }
        None => None,
    };
    m.add_input(&input.input)?;
    read_cohort(&input.input, schema.as_ref())
}

fn train_config(file: &ConfigFile, flags: &TrainFlags, seed: u64) -> TrainConfig {
    let mut c = file.train.clone();
    if let Some(v) = flags.lambda {
        c.lambda = v;
    }
    if let Some(v) = flags.learning_rate {
        c.learning_rate = v;
    }
    if let Some(v) = flags.max_epochs {
        c.max_epochs = v;
    }
    if let Some(v) = flags.patience {
        c.patience = v;
    }
    if let Some(v) = flags.tolerance {
        c.tolerance = v;
    }
    if let Some(v) = flags.pair_subsample {
        c.pair_subsample = Some(v);
    }
    if flags.full_batch {
        c.pair_subsample = None;
    }
    c.intercept |= flags.intercept;
    c.seed = seed;
    c
}

fn bootstrap_config(file: &ConfigFile, flags: &BootstrapFlags, train: TrainConfig, seed: u64) -> BootstrapConfig {
    let s = &file.bootstrap;
    BootstrapConfig {
        runs: flags.runs.unwrap_or(s.runs),
        discovery_fraction: flags.discovery_fraction.unwrap_or(s.discovery_fraction),
        top_k: flags.top_k.unwrap_or(s.top_k),
        baseline_shuffles: flags.baseline_shuffles.unwrap_or(s.baseline_shuffles),
        train,
        seed,
    }
}

fn workers(file: &ConfigFile, flags: &BootstrapFlags, m: &mut RunManifest) -> usize {
    let w = flags.workers.or(file.workers).unwrap_or_else(default_workers);
    m.workers = Some(w);
    w
}

fn resolve_seed(common: &CommonArgs, file: &ConfigFile, m: &mut RunManifest) -> u64 {
    let seed = common.seed.or(file.seed).unwrap_or(0);
    m.seed = Some(seed);
    seed
}

fn commit(staging: Staging, m: &mut RunManifest) -> CliResult<()> {
    let paths = staging.commit()?;
    m.set_outputs(&paths)
}

fn count_failures(summary: &BootstrapSummary, m: &mut RunManifest, prefix: &str) {
    for run in &summary.runs {
        if let Some(f) = &run.failure {
            *m.failures.entry(format!("{prefix}{}", failure_label(f))).or_default() += 1;
        }
    }
}

#[derive(Serialize)]
struct TruthDoc<'a> {
    seed: u64,
    n: usize,
    events: usize,
    event_fraction: f64,
    covariates: Vec<&'a str>,
    support: Vec<&'a str>,
    generator: &'a SyntheticGroundTruth,
}

fn cmd_synth(a: &SynthArgs, m: &mut RunManifest) -> CliResult<()> {
    let file = load_config(&a.common, m)?;
    let seed = resolve_seed(&a.common, &file, m);
    let schema = match &a.schema {
        Some(path) => {
            m.add_input(path)?;
            load_schema(path)?
        }
        None => CovariateSchema::clinicopathological(),
    };
    let mut s = file.synth.clone();
    s.n = a.n.unwrap_or(s.n);
    s.sparsity = a.sparsity.unwrap_or(s.sparsity);
    s.noise = a.noise.unwrap_or(s.noise);
    s.baseline_time = a.baseline_time.unwrap_or(s.baseline_time);
    s.horizon = a.horizon.or(s.horizon);
    s.censoring_max = a.censoring_max.or(s.censoring_max);
    s.event_fraction = a.event_fraction.or(s.event_fraction);
    m.set_config(&s);

    let truth = SyntheticGroundTruth {
        beta_true: default_beta(&schema, s.sparsity)?,
        baseline_time: s.baseline_time,
        horizon: s.horizon,
        noise_scale: s.noise,
        uniform_censoring_max: s.censoring_max,
        target_event_fraction: s.event_fraction,
    };
    let synthetic = generate_synthetic(s.n, &schema, &truth, seed)?;
    let names: Vec<&str> = schema.names().collect();
    let doc = TruthDoc {
        seed,
        n: s.n,
        events: synthetic.cohort.event_count(),
        event_fraction: synthetic.event_fraction,
        support: synthetic.truth.support().into_iter().map(|k| names[k]).collect(),
        covariates: names.clone(),
        generator: &synthetic.truth,
    };
    let mut out = Staging::new(&a.common.output_dir)?;
    out.write("cohort.csv", render_cohort(&synthetic.cohort))?;
    out.write_json("truth.json", &doc)?;
    out.write("schema.toml", render_schema(&schema))?;
    println!("synth: {} subjects, {} events, support {:?}", s.n, doc.events, doc.support);
    commit(out, m)
}

fn cmd_fit(a: &FitArgs, m: &mut RunManifest) -> CliResult<()> {
    let file = load_config(&a.common, m)?;
    let seed = resolve_seed(&a.common, &file, m);
    let config = train_config(&file, &a.train, seed);
    m.set_config(&config);
    let cohort = load_input(&a.input, m)?;
    let model = train(&cohort, &config)?;
    let norm = l1_norm(&model.weights);
    let mut out = Staging::new(&a.common.output_dir)?;
    out.write_json("model.json", &model)?;
    out.write("history.csv", history_csv(&model.history))?;
    println!(
        "fit: objective {:.6} after {} epochs, converged {}, |w|_1 = {:.6e}",
        model.final_objective,
        model.history.len().saturating_sub(1),
        model.converged,
        norm
    );
    commit(out, m)
}

#[derive(Serialize)]
struct RunRow {
    run: usize,
    seed: u64,
    p_value: Option<f64>,
    c_index: Option<f64>,
    baseline_c: Option<f64>,
    failed: bool,
    failure: Option<&'static str>,
}

#[derive(Serialize)]
struct WeightEntry<'a> {
    covariate: &'a str,
    median_normalized_weight: f64,
}

#[derive(Serialize)]
struct SummaryDoc<'a> {
    method: &'a str,
    config: &'a BootstrapConfig,
    runs: usize,
    failed_runs: usize,
    combined_p: f64,
    c_mean: f64,
    c_std: f64,
    baseline_c_mean: Option<f64>,
    aggregated_weights: Vec<WeightEntry<'a>>,
    zero_norm_runs: usize,
    formula: &'a RiskFormula,
    per_run: Vec<RunRow>,
}

fn summary_doc<'a>(summary: &'a BootstrapSummary, config: &'a BootstrapConfig) -> SummaryDoc<'a> {
    SummaryDoc {
        method: &summary.method,
        config,
        runs: summary.runs.len(),
        failed_runs: summary.failed_runs,
        combined_p: summary.combined_p,
        c_mean: summary.c_mean,
        c_std: summary.c_std,
        baseline_c_mean: summary.baseline_c_mean,
        aggregated_weights: summary
            .covariates
            .iter()
            .zip(&summary.aggregated.median)
            .map(|(c, &w)| WeightEntry { covariate: c, median_normalized_weight: w })
            .collect(),
        zero_norm_runs: summary.aggregated.zero_norm_runs,
        formula: &summary.formula,
        per_run: summary
            .runs
            .iter()
            .map(|r| RunRow {
                run: r.index,
                seed: r.seed,
                p_value: r.p_value,
                c_index: r.c_index,
                baseline_c: r.baseline_c,
                failed: r.failure.is_some(),
                failure: r.failure.as_ref().map(failure_label),
            })
            .collect(),
    }
}

#[derive(Serialize)]
struct StratificationDoc<'a> {
    cutoff: f64,
    high_risk: usize,
    low_risk: usize,
    logrank: &'a LogRankResult,
    c_index: f64,
}

fn write_stratification(out: &mut Staging, s: &CohortStratification) -> CliResult<()> {
    let high = s.groups.iter().filter(|g| **g == RiskGroup::High).count();
    let doc = StratificationDoc {
        cutoff: s.cutoff,
        high_risk: high,
        low_risk: s.groups.len() - high,
        logrank: &s.logrank,
        c_index: s.concordance.c_index,
    };
    out.write_json("stratification.json", &doc)?;
    out.write("km_high.csv", km_csv(&s.km_high))?;
    out.write("km_low.csv", km_csv(&s.km_low))
}

fn cmd_bootstrap(a: &BootstrapArgs, m: &mut RunManifest) -> CliResult<()> {
    let file = load_config(&a.common, m)?;
    let seed = resolve_seed(&a.common, &file, m);
    let config = bootstrap_config(&file, &a.bootstrap, train_config(&file, &a.train, seed), seed);
    m.set_config(&config);
    let pool = worker_pool(workers(&file, &a.bootstrap, m))?;
    let cohort = load_input(&a.input, m)?;
    let rankers = Rankers::new(&CompareConfig { bootstrap: config.clone(), ..CompareConfig::default() });
    let summary = bootstrap_parallel(&pool, &cohort, &config, &rankers.proposed)?;
    count_failures(&summary, m, "");
    if summary.formula.tie_at_cutoff {
        log::warn!("tie at the K-th weight magnitude; the lower covariate index was kept");
    }
    let strat = stratify_cohort(apply_risk(&summary.formula, &cohort)?, &cohort)?;

    let mut out = Staging::new(&a.common.output_dir)?;
    out.write_json("summary.json", &summary_doc(&summary, &config))?;
    out.write("runs.csv", runs_csv(&summary))?;
    out.write("weights.csv", weights_csv(&summary))?;
    out.write_json("risk_formula.json", &summary.formula)?;
    write_stratification(&mut out, &strat)?;
    println!(
        "bootstrap: p_B = {:.3e}, c = {:.3} ({:.3}), {} of {} runs failed",
        summary.combined_p,
        summary.c_mean,
        summary.c_std,
        summary.failed_runs,
        summary.runs.len()
    );
    commit(out, m)
}

#[derive(Serialize)]
struct ComparisonDoc<'a> {
    config: &'a CompareConfig,
    rows: &'a [MethodRow],
    paired_splits: bool,
    methods: Vec<SummaryDoc<'a>>,
}

/// Digest of each run's discovery indices, checked identical across methods.
fn split_digests(table: &ComparisonTable) -> CliResult<Vec<(usize, u64, String)>> {
    let digest = |idx: &[usize]| {
        let text: Vec<String> = idx.iter().map(|i| i.to_string()).collect();
        sha256_hex(text.join(",").as_bytes())
    };
    let first = &table.summaries[0];
    let reference: Vec<(usize, u64, String)> =
        first.runs.iter().map(|r| (r.index, r.seed, digest(&r.discovery))).collect();
    for s in &table.summaries[1..] {
        let same = s.runs.len() == first.runs.len()
            && s.runs.iter().zip(&first.runs).all(|(a, b)| a.seed == b.seed && a.discovery == b.discovery);
        if !same {
            return Err(CliError::runtime(format!("{} used different splits from {}", s.method, first.method)));
        }
    }
    Ok(reference)
}

fn cmd_compare(a: &CompareArgs, m: &mut RunManifest) -> CliResult<()> {
    let file = load_config(&a.common, m)?;
    let seed = resolve_seed(&a.common, &file, m);
    let mut config = CompareConfig {
        bootstrap: bootstrap_config(&file, &a.bootstrap, train_config(&file, &a.train, seed), seed),
        ssvm: file.ssvm.clone(),
        cox: file.cox.clone(),
    };
    if let Some(v) = a.ssvm_l2 {
        config.ssvm.l2_weight = v;
    }
    if let Some(v) = a.cox_l1 {
        config.cox.l1_weight = v;
    }
    m.set_config(&config);
    let pool = worker_pool(workers(&file, &a.bootstrap, m))?;
    let cohort = load_input(&a.input, m)?;
    let table = compare_parallel(&pool, &cohort, &config)?;
    for s in &table.summaries {
        count_failures(s, m, &format!("{}:", s.method));
    }
    let splits = split_digests(&table)?;
    let doc = ComparisonDoc {
        config: &config,
        rows: &table.rows,
        paired_splits: true,
        methods: table.summaries.iter().map(|s| summary_doc(s, &config.bootstrap)).collect(),
    };
    let mut splits_csv = String::from("run,seed,discovery_sha256\n");
    for (run, seed, digest) in &splits {
        splits_csv.push_str(&format!("{run},{seed},{digest}\n"));
    }
    let mut out = Staging::new(&a.common.output_dir)?;
    out.write("comparison.csv", comparison_csv(&table))?;
    out.write_json("comparison.json", &doc)?;
    out.write("splits.csv", splits_csv)?;
    println!("{:<10} {:>12} {:>10}", "method", "combined_p", "c (std)");
    for r in &table.rows {
        println!("{:<10} {:>12.3e} {:>6.3} ({:.3})", r.method, r.combined_p, r.c_mean, r.c_std);
    }
    commit(out, m)
}

#[derive(Serialize)]
struct UnivariateDoc<'a> {
    covariate: &'a str,
    rule: String,
    threshold: Option<f64>,
    censor_at: Option<f64>,
    group0: GroupCounts,
    group1: GroupCounts,
    logrank: LogRankResult,
}

#[derive(Serialize)]
struct GroupCounts {
    label: String,
    n: usize,
    events: usize,
}

fn split_outcomes(times: &[f64], events: &[bool], in_group1: &[bool]) -> [(Vec<f64>, Vec<bool>); 2] {
    let mut out: [(Vec<f64>, Vec<bool>); 2] = Default::default();
    for ((&t, &e), &g) in times.iter().zip(events).zip(in_group1) {
        let slot = &mut out[g as usize];
        slot.0.push(t);
        slot.1.push(e);
    }
    out
}

fn counts(label: String, group: &(Vec<f64>, Vec<bool>)) -> GroupCounts {
    GroupCounts { label, n: group.0.len(), events: group.1.iter().filter(|&&e| e).count() }
}

fn cmd_univariate(a: &UnivariateArgs, m: &mut RunManifest) -> CliResult<()> {
    let _ = load_config(&a.common, m)?;
    m.set_config(&(&a.covariate, a.threshold, a.censor_at));
    let mut cohort = load_input(&a.input, m)?;
    if let Some(h) = a.censor_at {
        if !(h >= 0.0 && h.is_finite()) {
            return Err(CliError::validation("--censor-at must be a finite time >= 0"));
        }
        cohort = cohort.censored_at(h);
    }
    let k = cohort
        .schema()
        .index_of(&a.covariate)
        .ok_or_else(|| CliError::validation(format!("unknown covariate `{}`", a.covariate)))?;
    let values: Vec<f64> = cohort.records().iter().map(|r| r.x_raw[k]).collect();
    let binary = cohort.schema().covariates()[k].kind == CovariateKind::Binary;
    let (rule, threshold, in_group1, labels): (String, Option<f64>, Vec<bool>, [String; 2]) = if binary {
        let name = &a.covariate;
        (format!("{name} = 1 vs {name} = 0"), None, values.iter().map(|&v| v == 1.0).collect(), [format!("{name} = 0"), format!("{name} = 1")])
    } else {
        let t = match a.threshold {
            Some(t) => t,
            None => median(&values).expect("cohort is non-empty"),
        };
        let name = &a.covariate;
        (format!("{name} <= {t} vs {name} > {t}"), Some(t), values.iter().map(|&v| v > t).collect(), [format!("{name} <= {t}"), format!("{name} > {t}")])
    };
    let groups = split_outcomes(&cohort.times(), &cohort.events(), &in_group1);
    if groups.iter().any(|g| g.0.is_empty()) {
        return Err(CliError::validation(format!("rule `{rule}` leaves one group empty")));
    }
    let logrank = logrank_test(Group::new(&groups[0].0, &groups[0].1), Group::new(&groups[1].0, &groups[1].1))?;
    let [l0, l1] = labels;
    let doc = UnivariateDoc {
        covariate: &a.covariate,
        rule,
        threshold,
        censor_at: a.censor_at,
        group0: counts(l0, &groups[0]),
        group1: counts(l1, &groups[1]),
        logrank,
    };
    let mut out = Staging::new(&a.common.output_dir)?;
    out.write_json("univariate.json", &doc)?;
    out.write("km_group0.csv", km_csv(&km_estimate(&groups[0].0, &groups[0].1)?))?;
    out.write("km_group1.csv", km_csv(&km_estimate(&groups[1].0, &groups[1].1)?))?;
    println!("univariate: {} chi2 = {:.4}, p = {:.3e}", doc.rule, doc.logrank.chi_square, doc.logrank.p_value);
    commit(out, m)
}

fn read_formula(path: &Path) -> CliResult<RiskFormula> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::read(path, e))?;
    let formula: RiskFormula =
        serde_json::from_str(&text).map_err(|e| CliError::validation(format!("{}: {e}", path.display())))?;
    if formula.terms.is_empty() || formula.terms.iter().any(|t| !t.coefficient.is_finite()) || !formula.bias.is_finite() {
        return Err(CliError::validation(format!("{}: formula needs finite terms", path.display())));
    }
    Ok(formula)
}

fn cmd_apply_risk(a: &ApplyRiskArgs, m: &mut RunManifest) -> CliResult<()> {
    let _ = load_config(&a.common, m)?;
    m.add_input(&a.formula)?;
    let formula = read_formula(&a.formula)?;
    m.set_config(&formula);
    let cohort = load_input(&a.input, m)?;
    let risks = apply_risk(&formula, &cohort)?;
    let strat = stratify_cohort(risks, &cohort)?;
    let mut csv = String::from("id,risk,group\n");
    for ((r, risk), g) in cohort.records().iter().zip(&strat.risks).zip(&strat.groups) {
        let label = match g {
            RiskGroup::High => "high",
            RiskGroup::Low => "low",
        };
        csv.push_str(&format!("{},{risk},{label}\n", r.id));
    }
    let mut out = Staging::new(&a.common.output_dir)?;
    out.write("risks.csv", csv)?;
    write_stratification(&mut out, &strat)?;
    println!("apply-risk: log-rank p = {:.3e}, c = {:.3}", strat.logrank.p_value, strat.concordance.c_index);
    commit(out, m)
}

fn cmd_km(a: &KmArgs, m: &mut RunManifest) -> CliResult<()> {
    let _ = load_config(&a.common, m)?;
    m.set_config(&a.censor_at);
    m.add_input(&a.input)?;
    let mut o = read_outcomes(&a.input, None)?;
    if let Some(h) = a.censor_at {
        for (t, e) in o.times.iter_mut().zip(o.events.iter_mut()) {
            if *t > h {
                *t = h;
                *e = false;
            }
        }
    }
    let km = km_estimate(&o.times, &o.events)?;
    let mut out = Staging::new(&a.common.output_dir)?;
    out.write("km.csv", km_csv(&km))?;
    commit(out, m)
}

#[derive(Serialize)]
struct LogrankDoc<'a> {
    group_column: &'a str,
    groups: [GroupCounts; 2],
    logrank: LogRankResult,
}

fn cmd_logrank(a: &LogrankArgs, m: &mut RunManifest) -> CliResult<()> {
    let _ = load_config(&a.common, m)?;
    m.set_config(&a.group_column);
    m.add_input(&a.input)?;
    let o = read_outcomes(&a.input, Some(&a.group_column))?;
    let labels = o.labels.expect("label column requested");
    let distinct: Vec<&String> = labels.iter().collect::<BTreeSet<_>>().into_iter().collect();
    if distinct.len() != 2 {
        return Err(CliError::validation(format!(
            "`{}` must hold exactly two labels, found {}",
            a.group_column,
            distinct.len()
        )));
    }
    let in_second: Vec<bool> = labels.iter().map(|l| l == distinct[1]).collect();
    let groups = split_outcomes(&o.times, &o.events, &in_second);
    let logrank = logrank_test(Group::new(&groups[0].0, &groups[0].1), Group::new(&groups[1].0, &groups[1].1))?;
    let doc = LogrankDoc {
        group_column: &a.group_column,
        groups: [counts(distinct[0].clone(), &groups[0]), counts(distinct[1].clone(), &groups[1])],
        logrank,
    };
    let mut out = Staging::new(&a.common.output_dir)?;
    out.write_json("logrank.json", &doc)?;
    println!("logrank: chi2 = {:.4}, p = {:.4e}", doc.logrank.chi_square, doc.logrank.p_value);
    commit(out, m)
}
