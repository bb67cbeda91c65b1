//! The invariant suite behind `funrep verify`.
//!
//! Each check is a structural restatement of a result about
//! Function-Representations, decided exhaustively for one family.

use std::sync::Arc;

use funrep::analysis::{classify_column, compose_params, reducer_table};
use funrep::{
    classify, invert, is_constant, is_linear, reduce_chain, Distribution, FunctionKind, FunctionRep, Linearity,
    Network, Node, ParamFamily,
};

/// Entropy above this counts as "contains information" on the numeric side.
pub const ENTROPY_EPSILON: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail(String),
    /// The premise does not hold for this family.
    NotApplicable(String),
}

impl Outcome {
    pub fn holds(&self) -> bool {
        !matches!(self, Outcome::Fail(_))
    }

    pub fn text(&self) -> String {
        match self {
            Outcome::Pass => "pass".to_string(),
            Outcome::Fail(why) => format!("FAIL: {why}"),
            Outcome::NotApplicable(why) => format!("n/a: {why}"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub outcome: Outcome,
}

fn check(name: &'static str, outcome: Outcome) -> CheckResult {
    CheckResult { name, outcome }
}

fn first_failure<I: Iterator<Item = Option<String>>>(mut failures: I) -> Outcome {
    failures.find_map(|f| f).map_or(Outcome::Pass, Outcome::Fail)
}

/// Runs every check against `family`, in a fixed order.
pub fn verify_family(family: &ParamFamily) -> Vec<CheckResult> {
    let n = family.size();
    let shared = Arc::new(family.clone());
    let frs: Vec<FunctionRep> = (0..n).map(|v| FunctionRep::new(shared.clone(), v).unwrap()).collect();
    let uniform = Distribution::uniform(family.domain());
    let reports: Vec<_> = frs.iter().map(classify).collect();
    let reducers = reducer_table(family);
    let emergent = reducers.iter().position(Option::is_none);

    let mut results = Vec::new();

    results.push(check(
        "knowledge_iff_nonconstant",
        first_failure(frs.iter().map(|fr| {
            (fr.is_knowledge() == is_constant(fr)).then(|| {
                format!(
                    "v={}: knowledge={} constant={}",
                    fr.param(),
                    fr.is_knowledge(),
                    is_constant(fr)
                )
            })
        })),
    ));

    results.push(check(
        "information_iff_multivalued",
        first_failure(frs.iter().map(|fr| {
            let out = fr.pushforward(&uniform).expect("same domain");
            let multivalued = fr.image_size() > 1;
            let informative = out.entropy() > ENTROPY_EPSILON;
            (informative != multivalued || out.contains_information() != multivalued).then(|| {
                format!(
                    "v={}: entropy={} image_size={}",
                    fr.param(),
                    out.entropy(),
                    fr.image_size()
                )
            })
        })),
    ));

    results.push(check(
        "associative_iff_invertible",
        first_failure(frs.iter().zip(&reports).map(|(fr, report)| {
            let associative = report.kind == FunctionKind::Associative;
            let invertible = invert(fr).is_ok();
            let lossless = report.information_loss == 0;
            (associative != invertible || associative != lossless).then(|| {
                format!(
                    "v={}: associative={associative} invertible={invertible} lossless={lossless}",
                    fr.param()
                )
            })
        })),
    ));

    results.push(check(
        "reducers_exact",
        first_failure(reducers.iter().enumerate().map(|(k, reducer)| {
            let (v1, v2) = (k / n, k % n);
            reducer.and_then(|r| {
                (family.column(r) != compose_params(family, v1, v2).as_slice())
                    .then(|| format!("({v1}, {v2}) -> {r} does not reproduce the connection"))
            })
        })),
    ));

    let linearity = is_linear(family);
    results.push(check(
        "linear_implies_self_similar",
        match (linearity, emergent) {
            (Linearity::Yes, Some(k)) => Outcome::Fail(format!(
                "family is linear but pair ({}, {}) has no reducer",
                k / n,
                k % n
            )),
            (Linearity::Yes, None) => Outcome::Pass,
            (other, _) => Outcome::NotApplicable(format!("linearity is {}", linearity_text(other))),
        },
    ));

    results.push(check(
        "self_similar_chains_collapse",
        match emergent {
            Some(k) => Outcome::NotApplicable(format!("pair ({}, {}) is emergent", k / n, k % n)),
            None => first_failure(collapse_samples(n).map(|params| {
                let nodes = params
                    .iter()
                    .enumerate()
                    .map(|(k, &v)| Node::new(format!("s{k}"), frs[v].clone()))
                    .collect();
                let chain = Network::chain(family.domain().clone(), nodes).expect("single-family chain");
                let reduced = reduce_chain(&chain);
                (reduced.stages().len() != 1 || reduced.compose_table() != chain.compose_table())
                    .then(|| format!("chain {params:?} reduced to {} stages", reduced.stages().len()))
            })),
        },
    ));

    results.push(check(
        "image_monotone_under_connection",
        first_failure(pairs(n).map(|(v1, v2)| {
            let composed = classify_column(&compose_params(family, v1, v2)).image_size;
            let bound = reports[v1].image_size.min(reports[v2].image_size);
            (composed > bound).then(|| format!("({v1}, {v2}): image {composed} exceeds {bound}"))
        })),
    ));

    results.push(check(
        "connection_bijective_iff_stages_bijective",
        first_failure(pairs(n).map(|(v1, v2)| {
            let composed = classify_column(&compose_params(family, v1, v2)).bijective;
            let stages = reports[v1].bijective && reports[v2].bijective;
            (composed != stages).then(|| format!("({v1}, {v2}): connection bijective={composed}, stages={stages}"))
        })),
    ));

    results
}

pub fn linearity_text(linearity: Linearity) -> &'static str {
    match linearity {
        Linearity::Yes => "yes",
        Linearity::No => "no",
        Linearity::Unknown => "unknown",
    }
}

fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |a| (0..n).map(move |b| (a, b)))
}

/// Every 2-chain plus `n²` deterministic 3-chains.
fn collapse_samples(n: usize) -> impl Iterator<Item = Vec<usize>> {
    pairs(n)
        .map(|(a, b)| vec![a, b])
        .chain(pairs(n).map(move |(a, b)| vec![a, b, (a * 7 + b * 3 + 1) % n]))
}
