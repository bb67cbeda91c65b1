//! Classification of Function-Representations and the exhaustive
//! reducibility (emergence) machinery.
//!
//! Everything here is decided by enumeration over the finite domain. A pair
//! of parameters `(v1, v2)` is *reducible* when the connection
//! `i ↦ f(f(i, v1), v2)` equals some single column `i ↦ f(i, v')`, and
//! *emergent* otherwise. A family is self-similar when no pair is emergent.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{NotInvertible, Result};
use crate::families::{FamilyRule, ParamFamily};
use crate::repr::FunctionRep;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum FunctionKind {
    /// Bijective: input associations survive and can be recovered.
    Associative,
    /// Non-bijective: distinct inputs collide.
    Additive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassReport {
    pub constant: bool,
    pub injective: bool,
    pub surjective: bool,
    pub bijective: bool,
    pub kind: FunctionKind,
    pub image_size: usize,
    pub information_loss: usize,
}

/// Classifies an arbitrary self-map of `0..n` given as its output column.
pub fn classify_column(column: &[usize]) -> ClassReport {
    let n = column.len();
    let mut hits = vec![0usize; n];
    for &o in column {
        hits[o] += 1;
    }
    let injective = hits.iter().all(|&h| h <= 1);
    let surjective = hits.iter().all(|&h| h >= 1);
    let image_size = hits.iter().filter(|&&h| h > 0).count();
    let constant = column.windows(2).all(|w| w[0] == w[1]);
    let bijective = injective && surjective;
    ClassReport {
        constant,
        injective,
        surjective,
        bijective,
        kind: if bijective {
            FunctionKind::Associative
        } else {
            FunctionKind::Additive
        },
        image_size,
        information_loss: n - image_size,
    }
}

pub fn classify(fr: &FunctionRep) -> ClassReport {
    classify_column(fr.column())
}

/// True when every input maps to the same output.
pub fn is_constant(fr: &FunctionRep) -> bool {
    let column = fr.column();
    column.iter().all(|&o| o == column[0])
}

/// `domain.size − |image|`: how many input values are lost to collisions.
pub fn information_loss(fr: &FunctionRep) -> usize {
    fr.domain().size() - fr.image_size()
}

/// Inverse of a bijective column: `g[f[i]] = i`.
pub fn invert_column(column: &[usize]) -> Result<Vec<usize>, NotInvertible> {
    let n = column.len();
    let mut inverse: Vec<Option<usize>> = vec![None; n];
    for (i, &o) in column.iter().enumerate() {
        if let Some(first) = inverse[o] {
            return Err(NotInvertible::Collision {
                first,
                second: i,
                output: o,
            });
        }
        inverse[o] = Some(i);
    }
    // Injective on a finite self-map implies surjective, so this only fires
    // for malformed columns; kept so the witness is always well defined.
    inverse
        .into_iter()
        .enumerate()
        .map(|(o, i)| i.ok_or(NotInvertible::Missing { output: o }))
        .collect()
}

pub fn invert(fr: &FunctionRep) -> Result<Vec<usize>, NotInvertible> {
    invert_column(fr.column())
}

/// The connection `i ↦ f(f(i, v1), v2)` as a column.
pub fn compose_params(family: &ParamFamily, v1: usize, v2: usize) -> Vec<usize> {
    let second = family.column(v2);
    family.column(v1).iter().map(|&mid| second[mid]).collect()
}

/// Smallest `v'` whose column equals the connection of `v1` then `v2`, by
/// scanning every candidate.
pub fn find_reducer(family: &ParamFamily, v1: usize, v2: usize) -> Result<Option<usize>> {
    let domain = family.domain();
    domain.check_index(v1)?;
    domain.check_index(v2)?;
    let composed = compose_params(family, v1, v2);
    Ok(domain
        .indices()
        .find(|&candidate| family.column(candidate) == composed.as_slice()))
}

pub fn produces_emergence(family: &ParamFamily, v1: usize, v2: usize) -> Result<bool> {
    Ok(find_reducer(family, v1, v2)?.is_none())
}

/// Reducer for every ordered pair, indexed `v1 * n + v2`.
///
/// Columns are indexed by content once, so the sweep costs `O(n³)` rather
/// than the `O(n⁴)` of calling [`find_reducer`] per pair; the answers are
/// identical (smallest matching `v'`).
pub fn reducer_table(family: &ParamFamily) -> Vec<Option<usize>> {
    let n = family.size();
    let mut by_column: HashMap<&[usize], usize> = HashMap::with_capacity(n);
    for v in (0..n).rev() {
        by_column.insert(family.column(v), v);
    }
    let mut composed = vec![0; n];
    let mut reducers = Vec::with_capacity(n * n);
    for v1 in 0..n {
        let first = family.column(v1);
        for v2 in 0..n {
            let second = family.column(v2);
            for (slot, &mid) in composed.iter_mut().zip(first) {
                *slot = second[mid];
            }
            reducers.push(by_column.get(composed.as_slice()).copied());
        }
    }
    reducers
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CensusReport {
    pub family: String,
    pub domain_size: usize,
    pub pairs_total: usize,
    pub pairs_reducible: usize,
    pub pairs_emergent: usize,
    pub self_similar: bool,
    pub example_emergent_pair: Option<(usize, usize)>,
}

/// Counts reducible and emergent parameter pairs over all `n²` pairs.
pub fn emergence_census(family: &ParamFamily) -> CensusReport {
    census_from_reducers(family, &reducer_table(family))
}

pub fn census_from_reducers(family: &ParamFamily, reducers: &[Option<usize>]) -> CensusReport {
    let n = family.size();
    assert_eq!(reducers.len(), n * n, "reducer table has the wrong size");
    let first_emergent = reducers.iter().position(Option::is_none);
    let pairs_emergent = reducers.iter().filter(|r| r.is_none()).count();
    CensusReport {
        family: family.name().to_string(),
        domain_size: n,
        pairs_total: n * n,
        pairs_reducible: n * n - pairs_emergent,
        pairs_emergent,
        self_similar: pairs_emergent == 0,
        // row-major order is lexicographic on (v1, v2)
        example_emergent_pair: first_emergent.map(|k| (k / n, k % n)),
    }
}

pub fn is_self_similar(family: &ParamFamily) -> bool {
    reducer_table(family).iter().all(Option::is_some)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Linearity {
    Yes,
    No,
    Unknown,
}

/// Smallest slope `a` such that `f(i, v) = (a·i + b(v)) mod n` for all
/// `i, v`, for modular rule families over a plain `Z_n`. `None` when no
/// slope fits or the family has no ring structure.
pub fn linear_slope(family: &ParamFamily) -> Option<usize> {
    if !has_ring_structure(family) {
        return None;
    }
    let n = family.size();
    (0..n).find(|&a| {
        (0..n).all(|v| {
            let column = family.column(v);
            let offset = column[0];
            column.iter().enumerate().all(|(i, &out)| out == (a * i + offset) % n)
        })
    })
}

fn has_ring_structure(family: &ParamFamily) -> bool {
    family.domain().null_index().is_none()
        && matches!(
            family.rule(),
            FamilyRule::AffineMod { .. } | FamilyRule::MulMod | FamilyRule::PolyMod { .. }
        )
}

/// Tri-state linearity: families without a declared ring (explicit tables,
/// memories, neurons) are `Unknown`.
pub fn is_linear(family: &ParamFamily) -> Linearity {
    if !has_ring_structure(family) {
        Linearity::Unknown
    } else if linear_slope(family).is_some() {
        Linearity::Yes
    } else {
        Linearity::No
    }
}
