//! riskforge command line: validate bundles, enumerate attack paths, score
//! risks, run what-if scenarios, and render reports or exports.
//!
//! Exit codes: 0 on success, 1 on validation or domain errors, 2 on usage
//! errors. Results go to stdout, diagnostics to stderr.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use riskforge::likelihood::vector_dominant_steps;
use riskforge::model::{AssessmentBundle, AttackerProfile};
use riskforge::paths::{enumerate_paths_with_budget, shared_precondition_report, DEFAULT_PATH_BUDGET};
use riskforge::report::{
    self, render_assessment_table, render_diff, render_likelihood_framework, render_matrix,
    render_shared_preconditions, ReportFormat,
};
use riskforge::risk::assess_goal;
use riskforge::scenario::whatif;
use riskforge::validate::validate_bundle_with_budget;

const BUDGET_ENV: &str = "RISKFORGE_PATH_BUDGET";

#[derive(Parser)]
#[command(
    name = "riskforge",
    about = "Goal-driven risk assessment over AND/OR attack trees",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a bundle and report validation findings
    Validate(FileArg),
    /// Enumerate minimal attack paths through the bundle's tree
    Paths {
        #[command(flatten)]
        file: FileArg,
        /// Cap on enumerated paths (overrides RISKFORGE_PATH_BUDGET)
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Score every risk of a goal and render the assessment table
    Score {
        #[command(flatten)]
        file: FileArg,
        /// Goal to assess (defaults to the bundle's goal)
        #[arg(long)]
        goal: Option<String>,
        /// Attacker profile admitted by the assessment
        #[arg(long, default_value = "insider")]
        profile: String,
        /// Output format: markdown, csv, json, or dot
        #[arg(long, default_value = "markdown")]
        format: String,
    },
    /// Apply a scenario, recompute, and diff against the baseline
    Whatif {
        #[command(flatten)]
        file: FileArg,
        /// Scenario id declared in the bundle
        #[arg(long)]
        scenario: String,
        /// Output format: markdown or json
        #[arg(long, default_value = "markdown")]
        format: String,
    },
    /// Render a report over the bundle
    Report {
        #[command(flatten)]
        file: FileArg,
        /// One of: assessment, framework, matrix, shared-pre
        #[arg(long)]
        kind: String,
        /// Output format for assessment reports
        #[arg(long, default_value = "markdown")]
        format: String,
        /// Comma-separated vector node ids for the framework report
        #[arg(long, value_delimiter = ',')]
        vectors: Option<Vec<String>>,
    },
    /// Export the bundle as a DOT graph or canonical JSON
    Export {
        #[command(flatten)]
        file: FileArg,
        /// Emit the attack tree as a DOT digraph
        #[arg(long)]
        dot: bool,
        /// Emit the bundle as canonical JSON
        #[arg(long)]
        json: bool,
        /// Highlight the dominant path of this risk in the DOT output
        #[arg(long)]
        highlight: Option<String>,
    },
}

#[derive(Args)]
struct FileArg {
    /// ATDL bundle file
    file: PathBuf,
}

enum Failure {
    /// Validation or domain error: exit 1.
    Domain(String),
    /// Bad invocation beyond what clap catches: exit 2.
    Usage(String),
}

impl Failure {
    fn domain(err: impl std::fmt::Display) -> Self {
        Failure::Domain(err.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Domain(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(message)) => {
            eprintln!("usage error: {message}");
            ExitCode::from(2)
        }
    }
}

fn env_budget() -> Result<usize, Failure> {
    match std::env::var(BUDGET_ENV) {
        Err(_) => Ok(DEFAULT_PATH_BUDGET),
        Ok(raw) => raw.parse().map_err(|_| {
            Failure::Domain(format!("{BUDGET_ENV} must be a positive integer, got `{raw}`"))
        }),
    }
}

fn load(file: &PathBuf) -> Result<AssessmentBundle, Failure> {
    let text = std::fs::read_to_string(file)
        .map_err(|err| Failure::Domain(format!("cannot read {}: {err}", file.display())))?;
    riskforge::parse_document_named(&text, &file.display().to_string()).map_err(Failure::domain)
}

/// Load and validate; findings go to stderr because the caller's result is
/// something else.
fn load_valid(file: &PathBuf, budget: usize) -> Result<AssessmentBundle, Failure> {
    let bundle = load(file)?;
    let report = validate_bundle_with_budget(&bundle, budget);
    if !report.is_valid() {
        eprint!("{report}");
        return Err(Failure::Domain(format!(
            "{} failed validation with {} error(s)",
            file.display(),
            report.error_count()
        )));
    }
    Ok(bundle)
}

fn parse_profile(word: &str) -> Result<AttackerProfile, Failure> {
    match word {
        "insider" => Ok(AttackerProfile::INSIDER),
        "external" => Ok(AttackerProfile::EXTERNAL),
        other => Err(Failure::Usage(format!(
            "unknown profile `{other}` (expected `insider` or `external`)"
        ))),
    }
}

fn parse_format(word: &str) -> Result<ReportFormat, Failure> {
    ReportFormat::from_keyword(word).ok_or_else(|| {
        Failure::Usage(format!(
            "unknown format `{word}` (expected markdown, csv, json, or dot)"
        ))
    })
}

fn run(cli: Cli) -> Result<(), Failure> {
    let budget = env_budget()?;
    match cli.command {
        Command::Validate(arg) => {
            let bundle = load(&arg.file)?;
            let report = validate_bundle_with_budget(&bundle, budget);
            print!("{report}");
            if report.is_valid() {
                Ok(())
            } else {
                Err(Failure::Domain(format!(
                    "{} error(s) found",
                    report.error_count()
                )))
            }
        }
        Command::Paths { file, budget: flag_budget } => {
            let budget = flag_budget.unwrap_or(budget);
            let bundle = load_valid(&file.file, budget)?;
            let tree = bundle.tree().map_err(Failure::domain)?;
            let paths = enumerate_paths_with_budget(tree, budget).map_err(Failure::domain)?;
            for path in &paths {
                let steps: Vec<&str> = path.steps.iter().map(String::as_str).collect();
                println!("{}", steps.join(" + "));
            }
            eprintln!("{} minimal path(s)", paths.len());
            Ok(())
        }
        Command::Score { file, goal, profile, format } => {
            let attacker = parse_profile(&profile)?;
            let format = parse_format(&format)?;
            let bundle = load_valid(&file.file, budget)?;
            let tree = bundle.tree().map_err(Failure::domain)?;
            let goal = goal.unwrap_or_else(|| tree.goal_id.clone());
            let assessments =
                assess_goal(&bundle, &goal, &attacker, budget).map_err(Failure::domain)?;
            print!("{}", render_assessment_table(&assessments, format));
            Ok(())
        }
        Command::Whatif { file, scenario, format } => {
            let bundle = load_valid(&file.file, budget)?;
            let result = whatif(&bundle, &scenario, budget).map_err(Failure::domain)?;
            match format.as_str() {
                "markdown" | "md" => print!("{}", render_diff(&result)),
                "json" => print!("{}", diff_json(&result)),
                other => {
                    return Err(Failure::Usage(format!(
                        "unknown format `{other}` (expected markdown or json)"
                    )))
                }
            }
            Ok(())
        }
        Command::Report { file, kind, format, vectors } => {
            let bundle = load_valid(&file.file, budget)?;
            match kind.as_str() {
                "assessment" => {
                    let format = parse_format(&format)?;
                    let tree = bundle.tree().map_err(Failure::domain)?;
                    let assessments = assess_goal(
                        &bundle,
                        &tree.goal_id.clone(),
                        &AttackerProfile::default(),
                        budget,
                    )
                    .map_err(Failure::domain)?;
                    print!("{}", render_assessment_table(&assessments, format));
                }
                "framework" => {
                    let text =
                        render_likelihood_framework(&bundle, vectors.as_deref(), budget)
                            .map_err(Failure::domain)?;
                    print!("{text}");
                }
                "matrix" => {
                    let tree = bundle.tree().map_err(Failure::domain)?;
                    let assessments = assess_goal(
                        &bundle,
                        &tree.goal_id.clone(),
                        &AttackerProfile::default(),
                        budget,
                    )
                    .map_err(Failure::domain)?;
                    print!("{}", render_matrix(&assessments));
                }
                "shared-pre" => {
                    let tree = bundle.tree().map_err(Failure::domain)?;
                    let paths =
                        enumerate_paths_with_budget(tree, budget).map_err(Failure::domain)?;
                    let rows = shared_precondition_report(&bundle, &paths);
                    print!("{}", render_shared_preconditions(&rows));
                }
                other => {
                    return Err(Failure::Usage(format!(
                        "unknown report kind `{other}` (expected assessment, framework, matrix, or shared-pre)"
                    )))
                }
            }
            Ok(())
        }
        Command::Export { file, dot, json, highlight } => {
            if dot == json {
                return Err(Failure::Usage(
                    "export needs exactly one of --dot or --json".to_string(),
                ));
            }
            let bundle = load_valid(&file.file, budget)?;
            if json {
                if highlight.is_some() {
                    return Err(Failure::Usage(
                        "--highlight only applies to --dot".to_string(),
                    ));
                }
                let text = riskforge::export_canonical(&bundle).map_err(Failure::domain)?;
                print!("{text}");
                return Ok(());
            }
            let tree = bundle.tree().map_err(Failure::domain)?;
            let steps = match &highlight {
                None => None,
                Some(risk_id) => Some(dominant_steps(&bundle, risk_id, budget)?),
            };
            let text = report::export_dot(tree, steps.as_ref()).map_err(Failure::domain)?;
            print!("{text}");
            Ok(())
        }
    }
}

/// The concrete leaf steps behind a risk's dominant path: each bound
/// vector contributes its most feasible minimal leaf set.
fn dominant_steps(
    bundle: &AssessmentBundle,
    risk_id: &str,
    budget: usize,
) -> Result<BTreeSet<String>, Failure> {
    let tree = bundle.tree().map_err(Failure::domain)?;
    let risk = bundle
        .risk(risk_id)
        .ok_or_else(|| Failure::Domain(format!("unknown risk `{risk_id}`")))?;
    let assessment = riskforge::assess_risk(risk, bundle, &AttackerProfile::default(), budget)
        .map_err(Failure::domain)?;
    let mut steps = BTreeSet::new();
    for binding in &assessment.dominant.bindings {
        steps.extend(
            vector_dominant_steps(tree, &binding.vector, budget).map_err(Failure::domain)?,
        );
    }
    Ok(steps)
}

fn diff_json(result: &riskforge::scenario::WhatIfResult) -> String {
    let rows: Vec<_> = result
        .diffs
        .iter()
        .map(|diff| {
            serde_json_value(diff)
        })
        .collect();
    let mut text = format!(
        "{}\n",
        serde_json::to_string_pretty(&serde_json::json!({
            "scenario": result.scenario,
            "diffs": rows,
        }))
        .expect("diff JSON cannot fail")
    );
    if !text.ends_with('\n') {
        text.push('\n');
    }
    text
}

fn serde_json_value(diff: &riskforge::scenario::RiskDiff) -> serde_json::Value {
    serde_json::json!({
        "risk_id": diff.risk_id,
        "before_score": diff.before.score,
        "after_score": diff.after_score(),
        "delta_score": diff.delta_score,
        "dominant_path_changed": diff.dominant_path_changed,
        "newly_infeasible": diff.newly_infeasible,
    })
}
