//! Function-Representations: a family with one fixed parameter value.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::domain::{Distribution, FiniteDomain};
use crate::error::{Error, Result};
use crate::families::ParamFamily;

/// A [`ParamFamily`] with its parameter fixed. The parameter is at once the
/// stored representation and what selects the function's behaviour.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FunctionRep {
    family: Arc<ParamFamily>,
    param: usize,
}

impl FunctionRep {
    pub fn new(family: Arc<ParamFamily>, param: usize) -> Result<Self> {
        family.domain().check_index(param)?;
        Ok(FunctionRep { family, param })
    }

    pub fn family(&self) -> &Arc<ParamFamily> {
        &self.family
    }

    pub fn param(&self) -> usize {
        self.param
    }

    pub fn domain(&self) -> &FiniteDomain {
        self.family.domain()
    }

    pub fn apply(&self, input: usize) -> Result<usize> {
        self.domain().check_index(input)?;
        Ok(self.family.eval(input, self.param))
    }

    /// `i ↦ f(i, v)` for every input.
    pub fn column(&self) -> &[usize] {
        self.family.column(self.param)
    }

    /// The set of outputs over all inputs.
    pub fn image(&self) -> BTreeSet<usize> {
        self.column().iter().copied().collect()
    }

    pub fn image_size(&self) -> usize {
        image_size(self.column(), self.domain().size())
    }

    /// Output distribution induced by feeding `input` through the function.
    pub fn pushforward(&self, input: &Distribution) -> Result<Distribution> {
        if input.domain() != self.domain() {
            return Err(Error::DomainMismatch {
                expected: self.domain().name().to_string(),
                found: input.domain().name().to_string(),
            });
        }
        Ok(pushforward_column(self.column(), input))
    }

    /// Knowledge in the operational sense: more than one distinct output.
    pub fn is_knowledge(&self) -> bool {
        self.image_size() > 1
    }
}

pub(crate) fn image_size(column: &[usize], n: usize) -> usize {
    let mut seen = vec![false; n];
    let mut count = 0;
    for &o in column {
        if !seen[o] {
            seen[o] = true;
            count += 1;
        }
    }
    count
}

pub(crate) fn pushforward_column(column: &[usize], input: &Distribution) -> Distribution {
    let mut probs = vec![0.0; input.domain().size()];
    for (&o, &p) in column.iter().zip(input.probs()) {
        probs[o] += p;
    }
    Distribution::from_parts_unchecked(input.domain().clone(), probs)
}
