use std::fmt::Write;

use super::{Model, PolicyDecl, StageDecl};
use crate::families::FamilyRule;

/// Canonical text for a model: domains, families, frs, then nets, each
/// alphabetical, one statement per line, single spaces, `\n` endings.
pub fn serialize(model: &Model) -> String {
    let mut out = String::new();
    for (name, domain) in &model.domains {
        let null = if domain.null_index().is_some() { " null" } else { "" };
        writeln!(out, "domain {name} size {}{null}", domain.base_size()).unwrap();
    }
    for (name, family) in &model.families {
        write!(out, "family {name} over {} = ", family.domain().name()).unwrap();
        match family.rule() {
            FamilyRule::Table { matrix } => {
                let rows: Vec<String> = matrix
                    .iter()
                    .map(|row| row.iter().map(ToString::to_string).collect::<Vec<_>>().join(" "))
                    .collect();
                writeln!(out, "table [{}]", rows.join("; ")).unwrap();
            }
            rule => {
                let params: Vec<String> = rule.params().iter().map(|(k, v)| format!("{k}={v}")).collect();
                writeln!(out, "{}({})", rule.variant_name(), params.join(", ")).unwrap();
            }
        }
    }
    for (name, fr) in &model.frs {
        writeln!(out, "fr {name} = {}({})", fr.family, fr.param).unwrap();
    }
    for (name, net) in &model.nets {
        let stages: Vec<String> = net.stages.iter().map(stage_text).collect();
        writeln!(out, "net {name} = {}", stages.join(" -> ")).unwrap();
    }
    out
}

fn stage_text(stage: &StageDecl) -> String {
    match stage {
        StageDecl::Single(fr) => fr.clone(),
        StageDecl::Parallel { frs, policy } => {
            let policy = match policy {
                PolicyDecl::First => "first".to_string(),
                PolicyDecl::Best => "best".to_string(),
                PolicyDecl::Priority(order) => format!("priority({})", order.join(",")),
            };
            format!("[{}] @{policy}", frs.join(" | "))
        }
    }
}
