//! `funrep`: parse `.frd` model files, run networks and print analysis,
//! census and verification reports.
//!
//! Exit codes: 0 success, 1 verification failure, 2 parse error, 3 usage
//! error. Reports go to standard output, diagnostics to standard error.

pub mod report;
pub mod verify;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use funrep::dsl::{parse_text_with_warnings, FrDecl, NetDecl, PolicyDecl, StageDecl};
use funrep::topology::{ArbitrationPolicy, Stage};
use funrep::{classify, emergence_census, is_linear, reduce_chain, serialize, Distribution, Model, Network};
use serde_json::{json, Value};

use crate::report::Report;
use crate::verify::{linearity_text, verify_family};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_USAGE: i32 = 3;

/// Default cap on domain size for the `O(n⁴)` census.
pub const DEFAULT_MAX_N: usize = 64;

#[derive(Debug, Parser)]
#[command(name = "funrep", version, about = "Analyze Function-Representation models")]
struct Cli {
    /// Emit reports as JSON instead of aligned text.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Classify one FR and summarize its knowledge and information content.
    Analyze {
        file: PathBuf,
        #[arg(long)]
        fr: String,
    },
    /// Count reducible and emergent parameter pairs of a family.
    Census {
        file: PathBuf,
        #[arg(long)]
        family: String,
        #[arg(long, default_value_t = DEFAULT_MAX_N)]
        max_n: usize,
        /// Allow domains larger than --max-n.
        #[arg(long)]
        force: bool,
    },
    /// Run a network on one input (an index or NULL).
    Run {
        file: PathBuf,
        #[arg(long)]
        net: String,
        #[arg(long)]
        input: String,
    },
    /// Merge reducible adjacent stages of a network.
    Reduce {
        file: PathBuf,
        #[arg(long)]
        net: String,
    },
    /// Check the invariant suite on every family in the file.
    Verify {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_MAX_N)]
        max_n: usize,
        #[arg(long)]
        force: bool,
    },
}

enum Failure {
    Usage(String),
    Parse(Vec<String>),
}

/// Runs the CLI on `args` (including the program name) and returns the
/// exit code.
pub fn dispatch<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{text}");
                    EXIT_USAGE
                }
            };
        }
    };

    let result = match &cli.command {
        Command::Analyze { file, fr } => load(file, err).and_then(|m| analyze(&m, fr)).map(|r| (r, EXIT_OK)),
        Command::Census {
            file,
            family,
            max_n,
            force,
        } => load(file, err)
            .and_then(|m| census(&m, family, *max_n, *force))
            .map(|r| (r, EXIT_OK)),
        Command::Run { file, net, input } => load(file, err).and_then(|m| run(&m, net, input)).map(|r| (r, EXIT_OK)),
        Command::Reduce { file, net } => load(file, err).and_then(|m| reduce(&m, net)).map(|r| (r, EXIT_OK)),
        Command::Verify { file, max_n, force } => load(file, err).and_then(|m| verify(&m, file, *max_n, *force)),
    };

    match result {
        Ok((report, code)) => {
            let text = if cli.json {
                report.to_json()
            } else if report.command == "run" {
                // bare value, so the output can be piped
                format!("{}\n", scalar(&report.body["output"]))
            } else if report.command == "reduce" {
                reduce_text(&report)
            } else {
                report.to_text()
            };
            let _ = out.write_all(text.as_bytes());
            code
        }
        Err(Failure::Usage(message)) => {
            let _ = writeln!(err, "error: {message}");
            EXIT_USAGE
        }
        Err(Failure::Parse(lines)) => {
            for line in lines {
                let _ = writeln!(err, "{line}");
            }
            EXIT_PARSE
        }
    }
}

fn scalar(value: &Value) -> String {
    match value {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn load(path: &Path, err: &mut dyn Write) -> Result<Model, Failure> {
    let source = std::fs::read_to_string(path)
        .map_err(|e| Failure::Parse(vec![format!("{}: error: cannot read file: {e}", path.display())]))?;
    let (model, diagnostics) = parse_text_with_warnings(&source);
    let lines: Vec<String> = diagnostics.iter().map(|d| format!("{}:{d}", path.display())).collect();
    match model {
        Some(model) => {
            for line in lines {
                let _ = writeln!(err, "{line}");
            }
            Ok(model)
        }
        None => Err(Failure::Parse(lines)),
    }
}

fn analyze(model: &Model, name: &str) -> Result<Report, Failure> {
    let fr = model
        .fr(name)
        .ok_or_else(|| Failure::Usage(format!("no fr named '{name}'")))?;
    let family = fr.family();
    let out = fr
        .pushforward(&Distribution::uniform(fr.domain()))
        .expect("same domain");
    let class = classify(&fr);

    let mut report = Report::new("analyze", name);
    report
        .insert("family", family.name())
        .insert("variant", family.rule().variant_name())
        .insert("domain", family.domain().name())
        .insert("domain_size", family.size())
        .insert("param", fr.param())
        .insert("image", fr.image().into_iter().collect::<Vec<_>>())
        .insert("classification", serde_json::to_value(&class).expect("plain struct"))
        .insert("knowledge", fr.is_knowledge())
        .insert("output_entropy_bits", out.entropy())
        .insert("contains_information", out.contains_information())
        .insert("linearity", linearity_text(is_linear(family)));
    Ok(report)
}

fn guard_size(size: usize, max_n: usize, force: bool, what: &str) -> Result<(), Failure> {
    if size > max_n && !force {
        return Err(Failure::Usage(format!(
            "{what} has domain size {size}, above --max-n {max_n}; the census costs n^4 lookups (use --force)"
        )));
    }
    Ok(())
}

fn census(model: &Model, name: &str, max_n: usize, force: bool) -> Result<Report, Failure> {
    let family = model
        .family(name)
        .ok_or_else(|| Failure::Usage(format!("no family named '{name}'")))?;
    guard_size(family.size(), max_n, force, &format!("family '{name}'"))?;
    let census = emergence_census(family);
    let mut report = Report::new("census", name);
    report
        .insert("variant", family.rule().variant_name())
        .insert("domain_size", census.domain_size)
        .insert("pairs_total", census.pairs_total)
        .insert("pairs_reducible", census.pairs_reducible)
        .insert("pairs_emergent", census.pairs_emergent)
        .insert("self_similar", census.self_similar)
        .insert(
            "example_emergent_pair",
            census.example_emergent_pair.map_or(Value::Null, |(a, b)| json!([a, b])),
        )
        .insert("linearity", linearity_text(is_linear(family)));
    Ok(report)
}

fn network(model: &Model, name: &str) -> Result<Network, Failure> {
    model
        .network(name)
        .ok_or_else(|| Failure::Usage(format!("no net named '{name}'")))
}

fn index_text(net: &Network, index: usize) -> Value {
    if net.domain().is_null(index) {
        Value::String("NULL".into())
    } else {
        json!(index)
    }
}

fn run(model: &Model, name: &str, input: &str) -> Result<Report, Failure> {
    let net = network(model, name)?;
    let index = match (input, net.domain().null_index()) {
        ("NULL", Some(null)) => null,
        _ => input
            .parse::<usize>()
            .map_err(|_| Failure::Usage(format!("input '{input}' is not an index")))?,
    };
    let output = net.run(index).map_err(|e| Failure::Usage(e.to_string()))?;
    let mut report = Report::new("run", name);
    report
        .insert("input", index_text(&net, index))
        .insert("output", index_text(&net, output));
    Ok(report)
}

fn reduce(model: &Model, name: &str) -> Result<Report, Failure> {
    let net = network(model, name)?;
    let reduced = reduce_chain(&net);
    let equivalent = reduced.compose_table() == net.compose_table();
    let standalone = standalone_model(model, name, &reduced);
    let mut report = Report::new("reduce", name);
    report
        .insert("stages_before", net.stages().len())
        .insert("stages_after", reduced.stages().len())
        .insert("equivalent", equivalent)
        .insert("model", serialize(&standalone));
    Ok(report)
}

fn reduce_text(report: &Report) -> String {
    let mut out = scalar(&report.body["model"]);
    for key in ["stages_before", "stages_after", "equivalent"] {
        out.push_str(&format!("# {key}: {}\n", scalar(&report.body[key])));
    }
    out
}

/// A model holding just the reduced network and what it references. Nodes
/// reuse an existing FR declaration with the same family and parameter when
/// there is one; merged nodes get a new FR named after the node.
fn standalone_model(model: &Model, net_name: &str, net: &Network) -> Model {
    let mut existing: BTreeMap<(&str, usize), &str> = BTreeMap::new();
    for (name, FrDecl { family, param }) in model.frs() {
        existing.entry((family.as_str(), *param)).or_insert(name.as_str());
    }

    let mut out = Model::new();
    let domain = net.domain().clone();
    out.add_domain(domain).expect("fresh model");
    let mut fr_names: Vec<Vec<String>> = Vec::new();
    for stage in net.stages() {
        let mut names = Vec::new();
        for node in stage.nodes() {
            let family = node.fr.family();
            if out.family(family.name()).is_none() {
                out.add_family((**family).clone()).expect("family over the net domain");
            }
            let name = match existing.get(&(family.name(), node.fr.param())) {
                Some(name) => name.to_string(),
                None => fresh_name(model, &out, &node.id),
            };
            if !out.frs().contains_key(&name) {
                out.add_fr(&name, family.name(), node.fr.param()).expect("valid fr");
            }
            names.push(name);
        }
        fr_names.push(names);
    }

    let stages = net
        .stages()
        .iter()
        .zip(fr_names)
        .map(|(stage, names)| match stage {
            Stage::Sequential(_) => StageDecl::Single(names[0].clone()),
            Stage::Parallel { nodes, policy } => StageDecl::Parallel {
                frs: names.clone(),
                policy: match policy {
                    ArbitrationPolicy::FirstNonNull => PolicyDecl::First,
                    ArbitrationPolicy::BestScore => PolicyDecl::Best,
                    ArbitrationPolicy::Priority(order) => PolicyDecl::Priority(
                        order
                            .iter()
                            .map(|id| names[nodes.iter().position(|n| &n.id == id).expect("validated")].clone())
                            .collect(),
                    ),
                },
            },
        })
        .collect();
    out.add_net(net_name, NetDecl { stages })
        .expect("reduced network is valid");
    out
}

fn fresh_name(original: &Model, out: &Model, id: &str) -> String {
    let base: String = id
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '_' { c } else { '_' })
        .collect();
    let taken = |name: &str| original.frs().contains_key(name) || out.frs().contains_key(name);
    if !taken(&base) {
        return base;
    }
    (2..)
        .map(|k| format!("{base}_{k}"))
        .find(|name| !taken(name))
        .expect("unbounded")
}

fn verify(model: &Model, file: &Path, max_n: usize, force: bool) -> Result<(Report, i32), Failure> {
    for (name, family) in model.families() {
        guard_size(family.size(), max_n, force, &format!("family '{name}'"))?;
    }
    let mut report = Report::new("verify", &file.display().to_string());
    let mut families = serde_json::Map::new();
    let mut checks_run = 0;
    let mut checks_failed = 0;
    for (name, family) in model.families() {
        let mut checks = serde_json::Map::new();
        for result in verify_family(family) {
            checks_run += 1;
            if !result.outcome.holds() {
                checks_failed += 1;
            }
            checks.insert(result.name.to_string(), Value::String(result.outcome.text()));
        }
        families.insert(name.clone(), Value::Object(checks));
    }
    let all_hold = checks_failed == 0;
    report
        .insert("families", Value::Object(families))
        .insert("checks_run", checks_run)
        .insert("checks_failed", checks_failed)
        .insert("all_hold", all_hold);
    Ok((report, if all_hold { EXIT_OK } else { EXIT_VERIFY_FAILED }))
}
