//! Function-Representation networks over finite domains.
//!
//! A Function-Representation (FR) is a parametrized function
//! `f: D × D → D` with its parameter fixed; the parameter is both what the
//! unit stores and what determines how it transforms inputs. This crate
//! provides:
//!
//! * [`domain`]: finite index domains and distributions with entropy;
//! * [`families`]: built-in rule families and explicit tables;
//! * [`repr`]: FRs with image, pushforward and knowledge tests;
//! * [`analysis`]: bijectivity classification, inversion, reducer search and
//!   the emergence census;
//! * [`topology`]: sequential/parallel stage networks and chain reduction;
//! * [`dsl`]: the `.frd` text format.
//!
//! All domains are finite and every property is decided by enumeration.

pub mod analysis;
pub mod domain;
pub mod dsl;
pub mod error;
pub mod families;
pub mod repr;
pub mod topology;

pub use analysis::{
    classify, emergence_census, find_reducer, information_loss, invert, is_constant, is_linear, is_self_similar,
    produces_emergence, CensusReport, ClassReport, FunctionKind, Linearity,
};
pub use domain::{Distribution, FiniteDomain};
pub use dsl::{parse_text, serialize, Diagnostic, Model};
pub use error::{Error, NotInvertible, Result};
pub use families::{builtin_catalog, make_family, validate_table, FamilyRule, FamilySpec, ParamFamily, TableError};
pub use repr::FunctionRep;
pub use topology::{classify_network, compose_table, reduce_chain, run, ArbitrationPolicy, Network, Node, Stage};

/// Shannon entropy (bits) of a distribution.
pub fn entropy(dist: &Distribution) -> f64 {
    dist.entropy()
}

/// True iff more than one outcome has strictly positive probability.
pub fn contains_information(dist: &Distribution) -> bool {
    dist.contains_information()
}

/// True iff the FR has more than one distinct output.
pub fn is_knowledge(fr: &FunctionRep) -> bool {
    fr.is_knowledge()
}

pub fn apply(fr: &FunctionRep, input: usize) -> Result<usize> {
    fr.apply(input)
}

pub fn pushforward(fr: &FunctionRep, input: &Distribution) -> Result<Distribution> {
    fr.pushforward(input)
}
