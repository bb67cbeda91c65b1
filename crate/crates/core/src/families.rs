//! Parametrized rule families `f: D × D → D`.
//!
//! Every family is materialized into a full lookup table at construction,
//! so evaluation is a single index operation and every family is total by
//! construction. The table is stored column-major: the column for parameter
//! `v` is contiguous, which is the access pattern of a Function-Representation.
//!
//! Built-in rules over a domain with a NULL element operate on the ordinary
//! elements `0..n` (NULL must be the last index) and absorb NULL in either
//! argument.

use std::fmt;

use serde::Serialize;

use crate::domain::FiniteDomain;
use crate::error::{Error, Result};

/// The rule behind a [`ParamFamily`]. Numeric parameters are kept signed so
/// that out-of-range user input can be reported rather than wrapped.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum FamilyRule {
    /// `f(i, v) = (a·i + v) mod n`, `1 <= a < n`.
    AffineMod { a: i64 },
    /// `f(i, v) = (i·v) mod n`.
    MulMod,
    /// `f(i, v) = (i^e + v) mod n`, `e >= 2`.
    PolyMod { e: i64 },
    /// Stored value `v` is returned when the input lies within circular
    /// distance `theta` of it, NULL otherwise.
    ThresholdMemory { theta: i64 },
    /// Fixed-point neuron `q(ramp(x(i)·x(v)))` with scale `s`.
    QuantizedNeuron { s: i64 },
    /// Threshold memory followed by `q(ramp(x(·)))` on the recalled value.
    HybridMemory { theta: i64, s: i64 },
    /// Explicit matrix, `matrix[i][v] = f(i, v)`.
    Table { matrix: Vec<Vec<usize>> },
}

impl FamilyRule {
    pub fn variant_name(&self) -> &'static str {
        match self {
            FamilyRule::AffineMod { .. } => "affine_mod",
            FamilyRule::MulMod => "mul_mod",
            FamilyRule::PolyMod { .. } => "poly_mod",
            FamilyRule::ThresholdMemory { .. } => "threshold_memory",
            FamilyRule::QuantizedNeuron { .. } => "quantized_neuron",
            FamilyRule::HybridMemory { .. } => "hybrid_memory",
            FamilyRule::Table { .. } => "table",
        }
    }

    /// Named numeric parameters in canonical order.
    pub fn params(&self) -> Vec<(&'static str, i64)> {
        match *self {
            FamilyRule::AffineMod { a } => vec![("a", a)],
            FamilyRule::MulMod | FamilyRule::Table { .. } => vec![],
            FamilyRule::PolyMod { e } => vec![("e", e)],
            FamilyRule::ThresholdMemory { theta } => vec![("theta", theta)],
            FamilyRule::QuantizedNeuron { s } => vec![("s", s)],
            FamilyRule::HybridMemory { theta, s } => vec![("theta", theta), ("s", s)],
        }
    }
}

/// Everything needed to build a family: its name, domain and rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilySpec {
    pub name: String,
    pub domain: FiniteDomain,
    pub rule: FamilyRule,
}

/// A problem found by [`validate_table`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub enum TableError {
    RowCount { found: usize, expected: usize },
    RowLength { row: usize, found: usize, expected: usize },
    EntryOutOfRange { row: usize, col: usize, value: usize },
}

impl fmt::Display for TableError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            TableError::RowCount { found, expected } => {
                write!(f, "table has {found} rows, expected {expected}")
            }
            TableError::RowLength { row, found, expected } => {
                write!(f, "row {row} has {found} entries, expected {expected}")
            }
            TableError::EntryOutOfRange { row, col, value } => {
                write!(f, "entry ({row}, {col}) = {value} is outside the domain")
            }
        }
    }
}

/// Checks that `matrix` is a total `size × size` table over `domain`.
/// Every offending row or cell is reported.
pub fn validate_table(matrix: &[Vec<usize>], domain: &FiniteDomain) -> Result<(), Vec<TableError>> {
    let n = domain.size();
    let mut errors = Vec::new();
    if matrix.len() != n {
        errors.push(TableError::RowCount {
            found: matrix.len(),
            expected: n,
        });
    }
    for (row, entries) in matrix.iter().enumerate() {
        if entries.len() != n {
            errors.push(TableError::RowLength {
                row,
                found: entries.len(),
                expected: n,
            });
        }
        for (col, &value) in entries.iter().enumerate() {
            if value >= n {
                errors.push(TableError::EntryOutOfRange { row, col, value });
            }
        }
    }
    if errors.is_empty() {
        Ok(())
    } else {
        Err(errors)
    }
}

/// A parametrized function `f: D × D → D`, fully tabulated.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ParamFamily {
    name: String,
    domain: FiniteDomain,
    rule: FamilyRule,
    // columns[v * n + i] = f(i, v)
    columns: Vec<usize>,
}

/// Builds a family from its spec, validating the variant's parameters.
pub fn make_family(spec: &FamilySpec) -> Result<ParamFamily> {
    ParamFamily::new(spec.name.clone(), spec.domain.clone(), spec.rule.clone())
}

impl ParamFamily {
    pub fn new(name: impl Into<String>, domain: FiniteDomain, rule: FamilyRule) -> Result<Self> {
        let name = name.into();
        let n = domain.size();
        let columns = match &rule {
            FamilyRule::Table { matrix } => {
                validate_table(matrix, &domain).map_err(Error::InvalidTable)?;
                let mut columns = vec![0; n * n];
                for (i, row) in matrix.iter().enumerate() {
                    for (v, &out) in row.iter().enumerate() {
                        columns[v * n + i] = out;
                    }
                }
                columns
            }
            builtin => {
                let eval = builtin_evaluator(builtin, &domain)?;
                let mut columns = Vec::with_capacity(n * n);
                for v in 0..n {
                    columns.extend((0..n).map(|i| eval(i, v)));
                }
                columns
            }
        };
        Ok(ParamFamily {
            name,
            domain,
            rule,
            columns,
        })
    }

    /// Convenience constructor for explicit tables.
    pub fn table(name: impl Into<String>, domain: FiniteDomain, matrix: Vec<Vec<usize>>) -> Result<Self> {
        Self::new(name, domain, FamilyRule::Table { matrix })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> &FiniteDomain {
        &self.domain
    }

    pub fn rule(&self) -> &FamilyRule {
        &self.rule
    }

    pub fn size(&self) -> usize {
        self.domain.size()
    }

    /// `f(input, param)`. Both indices must be in range.
    #[inline]
    pub fn eval(&self, input: usize, param: usize) -> usize {
        let n = self.size();
        assert!(input < n && param < n, "index out of range for family '{}'", self.name);
        self.columns[param * n + input]
    }

    /// The column `i ↦ f(i, param)`.
    #[inline]
    pub fn column(&self, param: usize) -> &[usize] {
        let n = self.size();
        &self.columns[param * n..(param + 1) * n]
    }

    /// The table as rows (`matrix[i][v]`), in the layout accepted by
    /// [`FamilyRule::Table`].
    pub fn to_matrix(&self) -> Vec<Vec<usize>> {
        let n = self.size();
        (0..n).map(|i| (0..n).map(|v| self.eval(i, v)).collect()).collect()
    }

    /// Whether the family itself says what happens to a NULL input. Built-in
    /// rules do; explicit tables leave NULL to the network layer.
    pub fn defines_null(&self) -> bool {
        !matches!(self.rule, FamilyRule::Table { .. })
    }
}

/// One instance of every built-in variant over `n` ordinary elements, with
/// small default parameters. Memories and hybrids get their own NULL
/// domain of size `n + 1`; the rest share `Z_n`.
///
/// Variants whose parameter constraints cannot be met at this `n` (for
/// example `affine_mod` needs `n >= 2`) are left out.
pub fn builtin_catalog(n: usize) -> Vec<ParamFamily> {
    let Ok(plain) = FiniteDomain::plain(format!("Z{n}"), n) else {
        return Vec::new();
    };
    let memory = FiniteDomain::with_null(format!("M{n}"), n).expect("n >= 1");
    let candidates = [
        ("affine", plain.clone(), FamilyRule::AffineMod { a: 1 }),
        ("mul", plain.clone(), FamilyRule::MulMod),
        ("square", plain.clone(), FamilyRule::PolyMod { e: 2 }),
        ("cube", plain.clone(), FamilyRule::PolyMod { e: 3 }),
        ("neuron", plain, FamilyRule::QuantizedNeuron { s: 2 }),
        ("memory", memory.clone(), FamilyRule::ThresholdMemory { theta: 1 }),
        ("hybrid", memory, FamilyRule::HybridMemory { theta: 1, s: 2 }),
    ];
    candidates
        .into_iter()
        .filter_map(|(name, domain, rule)| ParamFamily::new(format!("{name}{n}"), domain, rule).ok())
        .collect()
}

fn invalid(variant: &'static str, message: impl Into<String>) -> Error {
    Error::InvalidParameter {
        variant,
        message: message.into(),
    }
}

/// Circular distance between two positions on a ring of `n` elements.
pub fn circular_distance(a: usize, b: usize, n: usize) -> usize {
    let d = a.abs_diff(b) % n;
    d.min(n - d)
}

/// Index holding the fixed-point value zero in a centered encoding of `n`
/// elements.
pub fn zero_index(n: usize) -> usize {
    n / 2
}

/// Applies `q(ramp(t))` to `t = numerator / s`, where `q` rounds half up to
/// the nearest multiple of `1/s`, re-centers, and clamps to `[0, n)`.
fn quantize_ramp(numerator: i64, s: i64, n: usize) -> usize {
    let t = numerator.max(0);
    // round half up of t / s, t >= 0
    let steps = (2 * t + s) / (2 * s);
    let index = steps + zero_index(n) as i64;
    index.clamp(0, n as i64 - 1) as usize
}

type Evaluator = Box<dyn Fn(usize, usize) -> usize>;

fn builtin_evaluator(rule: &FamilyRule, domain: &FiniteDomain) -> Result<Evaluator> {
    let variant = rule.variant_name();
    if !domain.null_is_last() {
        return Err(invalid(
            variant,
            "built-in families need NULL, if any, to be the last index",
        ));
    }
    let null = domain.null_index();
    let m = domain.base_size();
    let needs_null = matches!(
        rule,
        FamilyRule::ThresholdMemory { .. } | FamilyRule::HybridMemory { .. }
    );
    if needs_null && null.is_none() {
        return Err(invalid(
            variant,
            format!("domain '{}' has no NULL element", domain.name()),
        ));
    }

    let inner: Box<dyn Fn(usize, usize) -> usize> = match *rule {
        FamilyRule::AffineMod { a } => {
            if a < 1 || a >= m as i64 {
                return Err(invalid(variant, format!("a = {a} must satisfy 1 <= a < {m}")));
            }
            let a = a as u128;
            let m128 = m as u128;
            Box::new(move |i, v| ((a * i as u128 + v as u128) % m128) as usize)
        }
        FamilyRule::MulMod => {
            let m128 = m as u128;
            Box::new(move |i, v| ((i as u128 * v as u128) % m128) as usize)
        }
        FamilyRule::PolyMod { e } => {
            if e < 2 {
                return Err(invalid(variant, format!("e = {e} must be at least 2")));
            }
            let e = e as u64;
            Box::new(move |i, v| ((pow_mod(i as u64, e, m as u64) + v as u64) % m as u64) as usize)
        }
        FamilyRule::ThresholdMemory { theta } => {
            if theta < 0 {
                return Err(invalid(variant, format!("theta = {theta} must be non-negative")));
            }
            let null = null.expect("checked above");
            Box::new(move |i, v| {
                if circular_distance(i, v, m) as i64 <= theta {
                    v
                } else {
                    null
                }
            })
        }
        FamilyRule::QuantizedNeuron { s } => {
            if s <= 0 {
                return Err(invalid(variant, format!("s = {s} must be positive")));
            }
            let c = zero_index(m) as i64;
            Box::new(move |i, v| {
                // x(i)·x(v)·s = (i - c)(v - c) / s
                let product = (i as i64 - c) * (v as i64 - c);
                quantize_ramp(product, s, m)
            })
        }
        FamilyRule::HybridMemory { theta, s } => {
            if theta < 0 {
                return Err(invalid(variant, format!("theta = {theta} must be non-negative")));
            }
            if s <= 0 {
                return Err(invalid(variant, format!("s = {s} must be positive")));
            }
            let null = null.expect("checked above");
            let c = zero_index(m) as i64;
            Box::new(move |i, v| {
                if circular_distance(i, v, m) as i64 <= theta {
                    // x(v)·s = v - c, so numerator for q is (v - c)·s
                    quantize_ramp((v as i64 - c) * s, s, m)
                } else {
                    null
                }
            })
        }
        FamilyRule::Table { .. } => unreachable!("tables are not built-in rules"),
    };

    Ok(match null {
        None => inner,
        Some(null) => Box::new(move |i, v| if i == null || v == null { null } else { inner(i, v) }),
    })
}

fn pow_mod(base: u64, exp: u64, modulus: u64) -> u64 {
    if modulus == 1 {
        return 0;
    }
    let m = modulus as u128;
    let mut result = 1u128;
    let mut b = base as u128 % m;
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            result = result * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    result as u64
}
