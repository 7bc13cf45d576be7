//! `edl` — learning symbolic models of partially observable deterministic
//! domains from observation traces, and reasoning over what was learned.
//!
//! Every command is a pure function from its input files and flags to
//! stdout/output-file bytes plus an exit code:
//!   0  success (positive analytical result)
//!   1  negative analytical result (not bisimilar, no plan, invalid domain,
//!      no consistent candidate, ...)
//!   2  input or usage error (bad flags, unreadable files, parse errors)
//!
//! Output is byte-deterministic: canonical orderings everywhere, no
//! timestamps. `--json` switches to compact single-line JSON; the default is
//! pretty-printed JSON for document outputs and short text for analytical
//! answers.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use edl_core::compose::{enumerate_bisimilar, sync_compose, EnumerateOpts};
use edl_core::domain::{compatibility_domain, Domain};
use edl_core::equiv::{isomorphic, obs_bisimilar};
use edl_core::explicit::learn_explicit;
use edl_core::formula::Formula;
use edl_core::implicit::{learn_domains, learn_implicit, ImplicitOpts};
use edl_core::json::{
    domain_from_json, domain_to_json, epistemic_model_from_json, event_model_from_json,
    event_model_to_json, traces_from_json, traces_to_json, transitions_from_json,
};
use edl_core::plan::plan;
use edl_core::semantics::{eval, eval_global, EventEnv};
use edl_core::sig::Signature;
use edl_core::trace::{execute, observe, sound_complete_traces, TraceOpts};

#[derive(Parser)]
#[command(
    name = "edl",
    version,
    about = "Learn and analyse symbolic models of partially observable deterministic domains"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct OutputFlags {
    /// Compact machine-readable JSON instead of the default rendering.
    #[arg(long)]
    json: bool,
    /// Write the result to a file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Check a domain file for semantic problems (unreachable states, a
    /// wrong determinism flag, noisy observations).
    Validate {
        #[arg(long)]
        domain: PathBuf,
        #[command(flatten)]
        output: OutputFlags,
    },
    /// Execute an action word from a state and print the observation trace.
    Simulate {
        #[arg(long)]
        domain: PathBuf,
        /// Comma-separated action word; empty for the trivial run.
        #[arg(long, value_delimiter = ',')]
        actions: Vec<String>,
        /// Start state id; defaults to the domain's initial state.
        #[arg(long)]
        start: Option<String>,
        #[command(flatten)]
        output: OutputFlags,
    },
    /// Enumerate all observation traces of a fixed length (default:
    /// 2^(2|P|), the bound at which the set determines the domain up to
    /// behavioural equivalence).
    Traces {
        #[arg(long)]
        domain: PathBuf,
        /// Number of actions per trace.
        #[arg(long)]
        length: Option<usize>,
        /// Upper bound on the number of enumerated traces.
        #[arg(long)]
        budget: Option<u64>,
        #[command(flatten)]
        output: OutputFlags,
    },
    /// Learn one event model per action from observed transitions.
    #[command(name = "learn-explicit")]
    LearnExplicit {
        /// Comma-separated proposition names, e.g. `l,r,s`.
        #[arg(long, value_delimiter = ',', required = true)]
        props: Vec<String>,
        /// Comma-separated action names; every action gets a model.
        #[arg(long, value_delimiter = ',', required = true)]
        actions: Vec<String>,
        /// Observed-transitions file.
        #[arg(long)]
        sigma: PathBuf,
        #[command(flatten)]
        output: OutputFlags,
    },
    /// Learn the behavioural-equivalence domain warranted by observation
    /// traces (or all candidate domains with `--all`).
    #[command(name = "learn-implicit")]
    LearnImplicit {
        /// Comma-separated proposition names, e.g. `p,q`.
        #[arg(long, value_delimiter = ',', required = true)]
        props: Vec<String>,
        /// Observation-traces file.
        #[arg(long)]
        traces: PathBuf,
        /// Emit every candidate domain instead of their composition.
        #[arg(long)]
        all: bool,
        /// Upper bound on histories per trace and history combinations.
        #[arg(long)]
        budget: Option<usize>,
        #[command(flatten)]
        output: OutputFlags,
    },
    /// The compatibility domain: states become sets of valuations
    /// compatible with each observation (explicit knowledge).
    #[command(name = "comp-domain")]
    CompDomain {
        #[arg(long)]
        domain: PathBuf,
        #[command(flatten)]
        output: OutputFlags,
    },
    /// The behavioural-equivalence domain: the synchronous composition of
    /// every domain observationally bisimilar to the given one (implicit
    /// knowledge).
    #[command(name = "beq-domain")]
    BeqDomain {
        #[arg(long)]
        domain: PathBuf,
        #[command(flatten)]
        output: OutputFlags,
    },
    /// Are two domains observationally bisimilar?
    Bisim {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[command(flatten)]
        output: OutputFlags,
    },
    /// Are two domains isomorphic (equal up to state renaming)?
    Iso {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[command(flatten)]
        output: OutputFlags,
    },
    /// Evaluate a formula on an epistemic model (globally, or at one world).
    Eval {
        #[arg(long)]
        model: PathBuf,
        /// Formula text, e.g. `K(p & ~q) | ~Kw r` or `[toss]Kw h`.
        #[arg(long)]
        formula: String,
        /// Bind an event model for dynamic modalities: `--event NAME=FILE`.
        #[arg(long = "event", value_name = "NAME=FILE")]
        events: Vec<String>,
        /// Evaluate at this world only instead of globally.
        #[arg(long)]
        world: Option<String>,
        #[command(flatten)]
        output: OutputFlags,
    },
    /// Find a shortest action word reaching a state satisfying the goal.
    Plan {
        #[arg(long)]
        domain: PathBuf,
        /// Goal formula over the domain's propositions, e.g. `K l`.
        #[arg(long)]
        goal: String,
        /// Start state id; defaults to the domain's initial state.
        #[arg(long)]
        start: Option<String>,
        /// Maximum plan length; defaults to the number of states.
        #[arg(long)]
        horizon: Option<usize>,
        #[command(flatten)]
        output: OutputFlags,
    },
}

/// Negative analytical results: the command ran fine, the answer is "no".
const EXIT_NEGATIVE: u8 = 1;
const EXIT_INPUT_ERROR: u8 = 2;

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INPUT_ERROR)
        }
    }
}

fn read_json(path: &Path) -> Result<Value> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read `{}`", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("`{}` is not JSON", path.display()))
}

fn load_domain(path: &Path) -> Result<Domain> {
    domain_from_json(&read_json(path)?)
        .with_context(|| format!("`{}` is not a valid domain", path.display()))
}

/// Writes a JSON document to the chosen sink: compact with `--json`, pretty
/// otherwise, always newline-terminated.
fn emit_doc(doc: &Value, output: &OutputFlags) -> Result<()> {
    let mut text = if output.json {
        serde_json::to_string(doc)?
    } else {
        serde_json::to_string_pretty(doc)?
    };
    text.push('\n');
    match &output.out {
        Some(path) => fs::write(path, text)
            .with_context(|| format!("cannot write `{}`", path.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

/// Writes an analytical answer: `--json` gets a small JSON object, the
/// default a short text line.
fn emit_answer(human: &str, doc: Value, output: &OutputFlags) -> Result<()> {
    if output.json {
        emit_doc(&doc, output)
    } else {
        let text = format!("{human}\n");
        match &output.out {
            Some(path) => fs::write(path, text)
                .with_context(|| format!("cannot write `{}`", path.display()))?,
            None => print!("{text}"),
        }
        Ok(())
    }
}

fn parse_props(props: &[String]) -> Result<Signature> {
    Ok(Signature::new(props.iter().map(|p| p.as_str()))?)
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Validate { domain, output } => {
            let d = load_domain(&domain)?;
            let diagnostics = d.validate();
            let valid = diagnostics.is_empty();
            let human = if valid {
                "valid".to_string()
            } else {
                diagnostics.join("\n")
            };
            emit_answer(
                &human,
                json!({ "valid": valid, "diagnostics": diagnostics }),
                &output,
            )?;
            Ok(if valid { 0 } else { EXIT_NEGATIVE })
        }
        Command::Simulate {
            domain,
            actions,
            start,
            output,
        } => {
            let d = load_domain(&domain)?;
            let start = start.unwrap_or_else(|| d.state_ids()[d.initial()].clone());
            let word: Vec<String> = actions.into_iter().filter(|a| !a.is_empty()).collect();
            let run = execute(&d, &start, &word)?;
            let tau = observe(&d, &run)?;
            emit_doc(&traces_to_json(d.sig(), &[tau]), &output)?;
            Ok(0)
        }
        Command::Traces {
            domain,
            length,
            budget,
            output,
        } => {
            let d = load_domain(&domain)?;
            let mut opts = TraceOpts::default();
            opts.length = length.or(opts.length);
            if let Some(b) = budget {
                opts.budget = b;
            }
            let traces = sound_complete_traces(&d, &opts)?;
            emit_doc(&traces_to_json(d.sig(), &traces), &output)?;
            Ok(0)
        }
        Command::LearnExplicit {
            props,
            actions,
            sigma,
            output,
        } => {
            let sig = parse_props(&props)?;
            let doc = read_json(&sigma)?;
            let transitions = transitions_from_json(&sig, &doc)
                .with_context(|| format!("`{}` is not a transitions file", sigma.display()))?;
            let learned = learn_explicit(&sig, &actions, &transitions)?;
            let combined: Value = learned
                .models
                .iter()
                .map(|(a, m)| (a.clone(), event_model_to_json(m)))
                .collect::<serde_json::Map<String, Value>>()
                .into();
            emit_doc(&combined, &output)?;
            Ok(0)
        }
        Command::LearnImplicit {
            props,
            traces,
            all,
            budget,
            output,
        } => {
            let sig = parse_props(&props)?;
            let doc = read_json(&traces)?;
            let batch = traces_from_json(&sig, &doc)
                .with_context(|| format!("`{}` is not a traces file", traces.display()))?;
            let mut opts = ImplicitOpts::default();
            if let Some(b) = budget {
                opts.max_histories = b;
                opts.max_combinations = b as u64;
            }
            if all {
                let candidates = learn_domains(&sig, &batch, &opts)?;
                let doc = Value::Array(candidates.iter().map(domain_to_json).collect());
                emit_doc(&doc, &output)?;
                Ok(if candidates.is_empty() { EXIT_NEGATIVE } else { 0 })
            } else {
                match learn_implicit(&sig, &batch, &opts) {
                    Ok(d) => {
                        emit_doc(&domain_to_json(&d), &output)?;
                        Ok(0)
                    }
                    Err(edl_core::error::Error::EmptyComposition) => {
                        emit_answer(
                            "no consistent domain candidates",
                            json!({ "domain": null }),
                            &output,
                        )?;
                        Ok(EXIT_NEGATIVE)
                    }
                    Err(e) => Err(e.into()),
                }
            }
        }
        Command::CompDomain { domain, output } => {
            let d = load_domain(&domain)?;
            let cd = compatibility_domain(&d)?;
            emit_doc(&domain_to_json(&cd), &output)?;
            Ok(0)
        }
        Command::BeqDomain { domain, output } => {
            let d = load_domain(&domain)?;
            let candidates = enumerate_bisimilar(&d, &EnumerateOpts::default())?;
            if candidates.is_empty() {
                emit_answer(
                    "no behaviourally equivalent candidates",
                    json!({ "domain": null }),
                    &output,
                )?;
                return Ok(EXIT_NEGATIVE);
            }
            let beq = sync_compose(&candidates)?;
            emit_doc(&domain_to_json(&beq), &output)?;
            Ok(0)
        }
        Command::Bisim { a, b, output } => {
            let da = load_domain(&a)?;
            let db = load_domain(&b)?;
            let answer = obs_bisimilar(&da, &db)?.is_some();
            emit_answer(
                if answer { "true" } else { "false" },
                json!({ "bisimilar": answer }),
                &output,
            )?;
            Ok(if answer { 0 } else { EXIT_NEGATIVE })
        }
        Command::Iso { a, b, output } => {
            let da = load_domain(&a)?;
            let db = load_domain(&b)?;
            let answer = isomorphic(&da, &db).is_some();
            emit_answer(
                if answer { "true" } else { "false" },
                json!({ "isomorphic": answer }),
                &output,
            )?;
            Ok(if answer { 0 } else { EXIT_NEGATIVE })
        }
        Command::Eval {
            model,
            formula,
            events,
            world,
            output,
        } => {
            let m = epistemic_model_from_json(None, &read_json(&model)?)
                .with_context(|| format!("`{}` is not an epistemic model", model.display()))?;
            let f = Formula::parse(&formula)?;
            let mut env = EventEnv::new();
            for entry in &events {
                let (name, path) = entry.split_once('=').ok_or_else(|| {
                    anyhow!("--event takes NAME=FILE, got `{entry}`")
                })?;
                let e = event_model_from_json(m.sig(), &read_json(Path::new(path))?)
                    .with_context(|| format!("`{path}` is not an event model"))?;
                env.insert(name.to_string(), e);
            }
            let answer = match &world {
                Some(w) => eval(&m, w, &f, &env)?,
                None => eval_global(&m, &f, &env)?,
            };
            emit_answer(
                if answer { "true" } else { "false" },
                json!({ "value": answer }),
                &output,
            )?;
            Ok(if answer { 0 } else { EXIT_NEGATIVE })
        }
        Command::Plan {
            domain,
            goal,
            start,
            horizon,
            output,
        } => {
            let d = load_domain(&domain)?;
            let start = start.unwrap_or_else(|| d.state_ids()[d.initial()].clone());
            let f = Formula::parse(&goal)?;
            match plan(&d, &start, &f, horizon)? {
                Some(p) => {
                    let human = if p.actions.is_empty() {
                        "plan: (empty)".to_string()
                    } else {
                        format!("plan: {}", p.actions.join(" "))
                    };
                    emit_answer(&human, json!({ "plan": p.actions }), &output)?;
                    Ok(0)
                }
                None => {
                    emit_answer("no plan", json!({ "plan": null }), &output)?;
                    Ok(EXIT_NEGATIVE)
                }
            }
        }
    }
}
