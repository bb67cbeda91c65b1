//! A line-oriented declarative language for domains, families,
//! Function-Representations and networks (`.frd` files).
//!
//! ```text
//! # comments run to the end of the line
//! domain Z8 size 8
//! domain M8 size 8 null
//! family add over Z8 = affine_mod(a=1)
//! family swap over Z2 = table [0 1; 1 0]
//! fr m = add(3)
//! net p = [m1 | m2] @first -> m3
//! ```
//!
//! Statements may appear in any order; references are resolved after the
//! whole file has been read.

mod lexer;
mod parser;
mod serialize;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::domain::FiniteDomain;
use crate::error::{Error, Result};
use crate::families::ParamFamily;
use crate::repr::FunctionRep;
use crate::topology::{ArbitrationPolicy, Network, Node, Stage};

pub use parser::{parse_text, parse_text_with_warnings};
pub use serialize::serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

/// A parse or resolution message. `line` and `column` are 1-based and
/// count characters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl Diagnostic {
    pub(crate) fn error(line: usize, column: usize, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Error,
            line,
            column,
            message: message.into(),
        }
    }

    pub(crate) fn warning(line: usize, column: usize, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Warning,
            line,
            column,
            message: message.into(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let severity = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{}:{}: {}: {}", self.line, self.column, severity, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrDecl {
    pub family: String,
    pub param: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PolicyDecl {
    First,
    Best,
    Priority(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StageDecl {
    Single(String),
    Parallel { frs: Vec<String>, policy: PolicyDecl },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetDecl {
    pub stages: Vec<StageDecl>,
}

/// A resolved set of declarations. Every reference resolves and names are
/// unique per namespace.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Model {
    domains: BTreeMap<String, FiniteDomain>,
    families: BTreeMap<String, Arc<ParamFamily>>,
    frs: BTreeMap<String, FrDecl>,
    nets: BTreeMap<String, NetDecl>,
}

pub fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn check_name(kind: &str, name: &str) -> Result<()> {
    if is_identifier(name) {
        Ok(())
    } else {
        Err(Error::InvalidModel(format!(
            "{kind} name '{name}' is not an identifier"
        )))
    }
}

fn duplicate(kind: &str, name: &str) -> Error {
    Error::InvalidModel(format!("duplicate {kind} '{name}'"))
}

impl Model {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.domains.is_empty() && self.families.is_empty() && self.frs.is_empty() && self.nets.is_empty()
    }

    pub fn add_domain(&mut self, domain: FiniteDomain) -> Result<()> {
        check_name("domain", domain.name())?;
        if !domain.null_is_last() {
            return Err(Error::InvalidModel(format!(
                "domain '{}' must keep NULL as its last index",
                domain.name()
            )));
        }
        if self.domains.contains_key(domain.name()) {
            return Err(duplicate("domain", domain.name()));
        }
        self.domains.insert(domain.name().to_string(), domain);
        Ok(())
    }

    pub fn add_family(&mut self, family: ParamFamily) -> Result<()> {
        check_name("family", family.name())?;
        match self.domains.get(family.domain().name()) {
            Some(d) if d == family.domain() => {}
            _ => {
                return Err(Error::InvalidModel(format!(
                    "family '{}' is over undeclared domain '{}'",
                    family.name(),
                    family.domain().name()
                )))
            }
        }
        if self.families.contains_key(family.name()) {
            return Err(duplicate("family", family.name()));
        }
        self.families.insert(family.name().to_string(), Arc::new(family));
        Ok(())
    }

    pub fn add_fr(&mut self, name: &str, family: &str, param: usize) -> Result<()> {
        check_name("fr", name)?;
        let fam = self
            .families
            .get(family)
            .ok_or_else(|| Error::InvalidModel(format!("unresolved family '{family}'")))?;
        fam.domain().check_index(param)?;
        if self.frs.contains_key(name) {
            return Err(duplicate("fr", name));
        }
        self.frs.insert(
            name.to_string(),
            FrDecl {
                family: family.to_string(),
                param,
            },
        );
        Ok(())
    }

    pub fn add_net(&mut self, name: &str, decl: NetDecl) -> Result<()> {
        check_name("net", name)?;
        if self.nets.contains_key(name) {
            return Err(duplicate("net", name));
        }
        self.build_network(&decl)?;
        self.nets.insert(name.to_string(), decl);
        Ok(())
    }

    pub fn domains(&self) -> &BTreeMap<String, FiniteDomain> {
        &self.domains
    }

    pub fn families(&self) -> &BTreeMap<String, Arc<ParamFamily>> {
        &self.families
    }

    pub fn frs(&self) -> &BTreeMap<String, FrDecl> {
        &self.frs
    }

    pub fn nets(&self) -> &BTreeMap<String, NetDecl> {
        &self.nets
    }

    pub fn family(&self, name: &str) -> Option<&Arc<ParamFamily>> {
        self.families.get(name)
    }

    pub fn fr(&self, name: &str) -> Option<FunctionRep> {
        let decl = self.frs.get(name)?;
        let family = self.families.get(&decl.family)?.clone();
        Some(FunctionRep::new(family, decl.param).expect("parameter checked on insertion"))
    }

    pub fn network(&self, name: &str) -> Option<Network> {
        let decl = self.nets.get(name)?;
        Some(self.build_network(decl).expect("network checked on insertion"))
    }

    /// Builds the runtime network for a declaration. Node ids are FR names;
    /// a repeated FR gets `name#2`, `name#3`, ... for later occurrences.
    pub fn build_network(&self, decl: &NetDecl) -> Result<Network> {
        let mut occurrences: HashMap<&str, usize> = HashMap::new();
        let mut domain: Option<FiniteDomain> = None;
        let mut node_for = |name: &str| -> Result<Node> {
            let fr = self
                .fr(name)
                .ok_or_else(|| Error::InvalidModel(format!("unresolved fr '{name}'")))?;
            match &domain {
                None => domain = Some(fr.domain().clone()),
                Some(d) if d != fr.domain() => {
                    return Err(Error::DomainMismatch {
                        expected: d.name().to_string(),
                        found: fr.domain().name().to_string(),
                    })
                }
                Some(_) => {}
            }
            let seen = occurrences.entry(self.frs.get_key_value(name).unwrap().0).or_insert(0);
            *seen += 1;
            let id = if *seen == 1 {
                name.to_string()
            } else {
                format!("{name}#{seen}")
            };
            Ok(Node::new(id, fr))
        };

        let mut stages = Vec::with_capacity(decl.stages.len());
        for stage in &decl.stages {
            stages.push(match stage {
                StageDecl::Single(name) => Stage::Sequential(node_for(name)?),
                StageDecl::Parallel { frs, policy } => {
                    for (k, name) in frs.iter().enumerate() {
                        if frs[..k].contains(name) {
                            return Err(Error::InvalidModel(format!(
                                "fr '{name}' appears twice in one parallel stage"
                            )));
                        }
                    }
                    let nodes = frs.iter().map(|name| node_for(name)).collect::<Result<Vec<_>>>()?;
                    let policy = match policy {
                        PolicyDecl::First => ArbitrationPolicy::FirstNonNull,
                        PolicyDecl::Best => ArbitrationPolicy::BestScore,
                        PolicyDecl::Priority(order) => {
                            // translate FR names to this stage's node ids
                            let ids = order
                                .iter()
                                .map(|name| {
                                    frs.iter()
                                        .position(|f| f == name)
                                        .map(|k| nodes[k].id.clone())
                                        .unwrap_or_else(|| name.clone())
                                })
                                .collect();
                            ArbitrationPolicy::Priority(ids)
                        }
                    };
                    Stage::Parallel { nodes, policy }
                }
            });
        }
        let domain = domain.ok_or_else(|| Error::Config("a network needs at least one stage".into()))?;
        Network::new(domain, stages)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::FamilyRule;

    fn demo_model() -> Model {
        let mut m = Model::new();
        let d = FiniteDomain::plain("Z8", 8).unwrap();
        m.add_domain(d.clone()).unwrap();
        m.add_family(ParamFamily::new("add", d, FamilyRule::AffineMod { a: 1 }).unwrap())
            .unwrap();
        m.add_fr("m", "add", 3).unwrap();
        m
    }

    #[test]
    fn identifiers() {
        assert!(is_identifier("Z8"));
        assert!(is_identifier("_x1"));
        assert!(!is_identifier("8Z"));
        assert!(!is_identifier(""));
        assert!(!is_identifier("a-b"));
    }

    #[test]
    fn builder_rejects_bad_references() {
        let mut m = demo_model();
        assert!(m.add_fr("m", "add", 1).is_err());
        assert!(m.add_fr("x", "nosuch", 1).is_err());
        assert!(m.add_fr("x", "add", 8).is_err());
        let stray = FiniteDomain::plain("Z5", 5).unwrap();
        assert!(m
            .add_family(ParamFamily::new("mul", stray, FamilyRule::MulMod).unwrap())
            .is_err());
        let net = NetDecl {
            stages: vec![StageDecl::Single("ghost".into())],
        };
        assert!(m.add_net("n", net).is_err());
    }

    #[test]
    fn repeated_fr_gets_distinct_node_ids() {
        let mut m = demo_model();
        let net = NetDecl {
            stages: vec![StageDecl::Single("m".into()), StageDecl::Single("m".into())],
        };
        m.add_net("twice", net).unwrap();
        let network = m.network("twice").unwrap();
        let ids: Vec<_> = network.stages().iter().map(|s| s.nodes()[0].id.clone()).collect();
        assert_eq!(ids, vec!["m", "m#2"]);
        assert_eq!(network.run(0).unwrap(), 6);
    }
}
