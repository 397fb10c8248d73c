//! The four subcommands: single-case attribution, the experiment
//! protocols, synthetic case generation, and cache inspection.

use crate::config::{parse_method, RunConfig, SharedOpts};
use crate::{from_estimator, from_eval, from_oracle, CliError};
use ragshap::case::{QueryCase, ScenarioTag};
use ragshap::datasets::{generate_scenario_cases, load_cases, save_cases, ScenarioTemplate};
use ragshap::estimators::{run_method, EstimatorSettings, Method};
use ragshap::eval::report::{summary_path_for, write_report};
use ragshap::eval::{experiment1, experiment2, experiment3, ExperimentPlan};
use ragshap::oracle::cache::scan_cache_file;
use ragshap::oracle::{remote, CaseOracle, OracleKind};
use std::path::{Path, PathBuf};

#[derive(clap::Args)]
pub struct AttributeArgs {
    /// JSONL case file to read.
    #[arg(long, value_name = "FILE")]
    cases: PathBuf,
    /// Which case to score; required when the file holds several.
    #[arg(long)]
    case_id: Option<String>,
    /// Attribution method.
    #[arg(long, default_value = "shapley", value_parser = parse_method)]
    method: Method,
    /// Evaluation budget (distinct coalition evaluations) for budgeted methods.
    #[arg(long)]
    budget: Option<u64>,
    /// Estimator seed; defaults to the first configured seed.
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    shared: SharedOpts,
}

#[derive(clap::Args)]
pub struct ExperimentArgs {
    /// Which protocol: 1 = rank agreement vs exact Shapley, 2 = impact-set
    /// precision, 3 = positional-bias A/B analysis.
    #[arg(value_parser = clap::value_parser!(u8).range(1..=3))]
    which: u8,
    /// JSONL case file to read.
    #[arg(long, value_name = "FILE")]
    cases: PathBuf,
    #[command(flatten)]
    shared: SharedOpts,
}

#[derive(Clone, Copy, Debug, clap::ValueEnum)]
enum KindChoice {
    Redundancy,
    Complementarity,
    Synergy,
}

#[derive(clap::Args)]
pub struct GenArgs {
    /// Scenario kind to plant.
    #[arg(long, value_enum)]
    kind: KindChoice,
    /// Entity draws; each yields an AB case and its BA twin.
    #[arg(long, default_value_t = 20)]
    count: usize,
    /// Documents per case (two positives, the rest hard negatives).
    #[arg(long, default_value_t = 5)]
    n_docs: usize,
    /// Zero-based document positions for the planted pair.
    #[arg(long, value_delimiter = ',', default_value = "0,1")]
    positions: Vec<usize>,
    /// Template seed; identical flags produce byte-identical files.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output JSONL file.
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

fn select_case<'a>(
    cases: &'a [QueryCase],
    wanted: Option<&str>,
) -> Result<&'a QueryCase, CliError> {
    match wanted {
        Some(id) => cases.iter().find(|c| c.case_id == id).ok_or_else(|| {
            CliError::usage(format!(
                "no case '{id}' in the file; it holds {} case(s)",
                cases.len()
            ))
        }),
        None if cases.len() == 1 => Ok(&cases[0]),
        None => Err(CliError::usage(format!(
            "the file holds {} case(s); pick one with --case-id",
            cases.len()
        ))),
    }
}

fn artifact_name(case_id: &str, method: &str) -> String {
    let safe: String = case_id
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || "-_.".contains(c) { c } else { '_' })
        .collect();
    format!("{safe}.{method}.json")
}

/// Write via a sibling temp file and rename, so a crash never leaves a
/// truncated artifact behind.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, bytes)
        .map_err(|e| CliError::usage(format!("{}: {e}", tmp.display())))?;
    std::fs::rename(&tmp, path)
        .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
    Ok(())
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::usage(format!("output dir {}: {e}", dir.display())))
}

pub fn attribute(args: &AttributeArgs) -> Result<(), CliError> {
    let config = RunConfig::resolve(&args.shared)?;
    let cases = load_cases(&args.cases).map_err(CliError::usage)?;
    let mut case = select_case(&cases, args.case_id.as_deref())?.clone();
    if case.target_response.is_none() && config.oracle.kind == OracleKind::RemoteLlm {
        let text =
            remote::generate_target_response(&case, &config.oracle).map_err(from_oracle)?;
        eprintln!("generated a target response ({} chars)", text.len());
        case.target_response = Some(text);
    }
    let scorer = config.build_scorer(std::slice::from_ref(&case))?;
    let cache = config.open_cache()?;
    let oracle = CaseOracle::new(&case, scorer.as_ref(), config.oracle.model_id.clone(), &cache)
        .map_err(from_oracle)?
        .with_parallelism(config.parallelism);
    let settings = EstimatorSettings {
        budget: args.budget,
        seed: args.seed.unwrap_or(config.seeds[0]),
        ..Default::default()
    };
    let av = run_method(args.method, &oracle, &settings).map_err(from_estimator)?;

    let mut order: Vec<usize> = (0..av.scores.len()).collect();
    order.sort_by(|&a, &b| {
        av.scores[b]
            .partial_cmp(&av.scores[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    println!(
        "case '{}' method {} model '{}' seed {} budget {} -> {} distinct coalitions",
        case.case_id,
        av.method,
        config.oracle.model_id,
        av.seed,
        av.budget.map_or_else(|| "none".into(), |b| b.to_string()),
        av.oracle_calls
    );
    println!("{:>4}  {:<16}  {:>14}", "rank", "document", "score");
    for (rank, &i) in order.iter().enumerate() {
        println!("{:>4}  {:<16}  {:>14.6}", rank + 1, case.documents[i].id, av.scores[i]);
    }
    if av.low_confidence {
        println!("note: low confidence (the budget cut evidence-gathering short)");
    }
    // Diagnostics go to stderr so reruns stay byte-identical on stdout.
    eprintln!("paid scorer evaluations this run: {}", oracle.scorer_invocations());

    ensure_dir(&config.output_dir)?;
    let artifact = config.output_dir.join(artifact_name(&case.case_id, &av.method));
    let mut body = serde_json::to_string_pretty(&av)
        .map_err(|e| CliError::runtime(format!("serializing attribution: {e}")))?;
    body.push('\n');
    write_atomic(&artifact, body.as_bytes())?;
    println!("wrote {}", artifact.display());
    Ok(())
}

pub fn experiment(args: &ExperimentArgs) -> Result<(), CliError> {
    let config = RunConfig::resolve(&args.shared)?;
    let cases = load_cases(&args.cases).map_err(CliError::usage)?;
    if cases.is_empty() {
        return Err(CliError::usage(format!("{} holds no cases", args.cases.display())));
    }
    if config.oracle.kind == OracleKind::RemoteLlm {
        if let Some(missing) = cases.iter().find(|c| c.target_response.is_none()) {
            return Err(CliError::usage(format!(
                "case '{}' has no target_response; add targets to the file (or run \
                 `attribute` once per case to generate them)",
                missing.case_id
            )));
        }
    }
    let scorer = config.build_scorer(&cases)?;
    let cache = config.open_cache()?;
    let plan = ExperimentPlan {
        methods: config.methods.clone(),
        budgets: config.budgets.clone(),
        seeds: config.seeds.clone(),
        ks: config.ks.clone(),
        settings: EstimatorSettings::default(),
        model_id: config.oracle.model_id.clone(),
        parallelism: config.parallelism,
    };
    let report = match args.which {
        1 => experiment1(&cases, scorer.as_ref(), &cache, &plan),
        2 => experiment2(&cases, scorer.as_ref(), &cache, &plan),
        _ => experiment3(&cases, scorer.as_ref(), &cache, &plan),
    }
    .map_err(from_eval)?;

    ensure_dir(&config.output_dir)?;
    let csv_path = config.output_dir.join(format!("experiment{}.csv", args.which));
    write_report(&report, &csv_path).map_err(from_eval)?;
    let s = &report.summary;
    println!("wrote {}", csv_path.display());
    println!("wrote {}", summary_path_for(&csv_path).display());
    println!(
        "cases: {} total, {} failed; runs failed: {}; rows excluded: {}; report rows: {}",
        s.cases_total,
        s.cases_failed,
        s.runs_failed,
        s.rows_excluded,
        report.rows.len()
    );
    if s.cases_failed > 0 {
        println!("warning: {} case(s) were skipped; details on stderr", s.cases_failed);
    }
    Ok(())
}

pub fn gen_synthetic(args: &GenArgs) -> Result<(), CliError> {
    let &[pos_a, pos_b] = args.positions.as_slice() else {
        return Err(CliError::usage(format!(
            "--positions needs exactly two indices, got {}",
            args.positions.len()
        )));
    };
    let tag = match args.kind {
        KindChoice::Redundancy => ScenarioTag::Redundancy,
        KindChoice::Complementarity => ScenarioTag::Complementarity,
        KindChoice::Synergy => ScenarioTag::Synergy,
    };
    let template = ScenarioTemplate::new(tag, args.seed).map_err(CliError::usage)?;
    let cases = generate_scenario_cases(&template, args.count, args.n_docs, (pos_a, pos_b))
        .map_err(CliError::usage)?;
    save_cases(&args.out, &cases).map_err(CliError::usage)?;
    println!(
        "wrote {} cases ({} AB/BA pairs, kind {}, seed {}) to {}",
        cases.len(),
        args.count,
        tag.as_str(),
        args.seed,
        args.out.display()
    );
    Ok(())
}

pub fn cache_summary(path: &Path, detailed: bool) -> Result<(), CliError> {
    let scan = scan_cache_file(path).map_err(CliError::usage)?;
    for (line, snippet) in &scan.corrupt {
        println!("warning: line {line}: unparseable record ({snippet})");
    }
    let token_total: u64 = scan.groups.values().map(|g| g.token_total).sum();
    println!(
        "{} records, {} corrupt line(s), {} tokens total, {} case/model group(s)",
        scan.total_records,
        scan.corrupt.len(),
        token_total,
        scan.groups.len()
    );
    for ((case_id, model_id), g) in &scan.groups {
        let denom = 1u64 << g.inferred_n.min(63);
        let pct = 100.0 * g.records as f64 / denom as f64;
        if detailed {
            println!(
                "case '{case_id}' model '{model_id}': {}/{denom} coalitions ({pct:.1}%), \
                 inferred n {}, values [{:.6}, {:.6}], {} tokens",
                g.records, g.inferred_n, g.value_min, g.value_max, g.token_total
            );
        } else {
            println!(
                "case '{case_id}' model '{model_id}': {}/{denom} coalitions ({pct:.1}%)",
                g.records
            );
        }
    }
    Ok(())
}
