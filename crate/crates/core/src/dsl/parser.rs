//! Two-pass parser: every line is parsed to a statement first, then
//! statements are resolved against each other. Errors from both passes are
//! collected; a statement that fails does not stop the others.

use std::collections::{HashMap, HashSet};

use super::lexer::{tokenize, Tok, Token};
use super::{Diagnostic, Model, NetDecl, PolicyDecl, Severity, StageDecl};
use crate::domain::FiniteDomain;
use crate::error::Error;
use crate::families::{FamilyRule, ParamFamily};

/// Domains above this size get a warning: exhaustive analyses scale as n⁴.
pub const LARGE_DOMAIN_WARNING: usize = 64;

#[derive(Debug, Clone)]
struct Spanned<T> {
    value: T,
    line: usize,
    col: usize,
}

impl<T> Spanned<T> {
    fn error(&self, message: impl Into<String>) -> Diagnostic {
        Diagnostic::error(self.line, self.col, message)
    }
}

#[derive(Debug)]
enum FamilyBody {
    Rule {
        variant: Spanned<String>,
        params: Vec<(Spanned<String>, i64)>,
    },
    Table(Vec<Vec<Spanned<i64>>>),
}

#[derive(Debug)]
enum StageSyntax {
    Single(Spanned<String>),
    Parallel {
        frs: Vec<Spanned<String>>,
        policy: Spanned<PolicySyntax>,
    },
}

#[derive(Debug)]
enum PolicySyntax {
    First,
    Best,
    Priority(Vec<Spanned<String>>),
}

#[derive(Debug)]
enum Statement {
    Domain {
        name: Spanned<String>,
        size: Spanned<i64>,
        null: bool,
    },
    Family {
        name: Spanned<String>,
        domain: Spanned<String>,
        body: FamilyBody,
    },
    Fr {
        name: Spanned<String>,
        family: Spanned<String>,
        param: Spanned<i64>,
    },
    Net {
        name: Spanned<String>,
        stages: Vec<StageSyntax>,
    },
}

struct Cursor<'a> {
    tokens: &'a [Token],
    pos: usize,
    line: usize,
    end_col: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<&'a Tok> {
        self.tokens.get(self.pos).map(|t| &t.tok)
    }

    fn col(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end_col, |t| t.col)
    }

    fn unexpected(&self, wanted: &str) -> Diagnostic {
        let found = self.peek().map_or_else(|| "end of line".to_string(), Tok::describe);
        Diagnostic::error(self.line, self.col(), format!("expected {wanted}, found {found}"))
    }

    fn ident(&mut self, wanted: &str) -> Result<Spanned<String>, Diagnostic> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let spanned = Spanned {
                    value: s.clone(),
                    line: self.line,
                    col: self.col(),
                };
                self.pos += 1;
                Ok(spanned)
            }
            _ => Err(self.unexpected(wanted)),
        }
    }

    fn keyword(&mut self, word: &str) -> Result<(), Diagnostic> {
        match self.peek() {
            Some(Tok::Ident(s)) if s == word => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.unexpected(&format!("'{word}'"))),
        }
    }

    fn int(&mut self, wanted: &str) -> Result<Spanned<i64>, Diagnostic> {
        match self.peek() {
            Some(&Tok::Int(n)) => {
                let spanned = Spanned {
                    value: n,
                    line: self.line,
                    col: self.col(),
                };
                self.pos += 1;
                Ok(spanned)
            }
            _ => Err(self.unexpected(wanted)),
        }
    }

    fn punct(&mut self, c: char) -> Result<(), Diagnostic> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("'{c}'")))
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Punct(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn eat_arrow(&mut self) -> bool {
        if self.peek() == Some(&Tok::Arrow) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn finish(&self) -> Result<(), Diagnostic> {
        if self.pos == self.tokens.len() {
            Ok(())
        } else {
            Err(self.unexpected("end of line"))
        }
    }
}

fn parse_statement(cur: &mut Cursor<'_>) -> Result<Statement, Diagnostic> {
    let keyword = cur.ident("a statement keyword")?;
    let stmt = match keyword.value.as_str() {
        "domain" => {
            let name = cur.ident("a domain name")?;
            cur.keyword("size")?;
            let size = cur.int("a domain size")?;
            let null = match cur.peek() {
                Some(Tok::Ident(s)) if s == "null" => {
                    cur.pos += 1;
                    true
                }
                _ => false,
            };
            Statement::Domain { name, size, null }
        }
        "family" => {
            let name = cur.ident("a family name")?;
            cur.keyword("over")?;
            let domain = cur.ident("a domain name")?;
            cur.punct('=')?;
            let variant = cur.ident("a family variant")?;
            let body = if variant.value == "table" {
                FamilyBody::Table(parse_table(cur)?)
            } else {
                cur.punct('(')?;
                let mut params = Vec::new();
                if !cur.eat(')') {
                    loop {
                        let key = cur.ident("a parameter name")?;
                        cur.punct('=')?;
                        let value = cur.int("an integer value")?;
                        params.push((key, value.value));
                        if cur.eat(')') {
                            break;
                        }
                        cur.punct(',')?;
                    }
                }
                FamilyBody::Rule { variant, params }
            };
            Statement::Family { name, domain, body }
        }
        "fr" => {
            let name = cur.ident("an fr name")?;
            cur.punct('=')?;
            let family = cur.ident("a family name")?;
            cur.punct('(')?;
            let param = cur.int("a parameter value")?;
            cur.punct(')')?;
            Statement::Fr { name, family, param }
        }
        "net" => {
            let name = cur.ident("a net name")?;
            cur.punct('=')?;
            let mut stages = vec![parse_stage(cur)?];
            while cur.eat_arrow() {
                stages.push(parse_stage(cur)?);
            }
            Statement::Net { name, stages }
        }
        other => return Err(keyword.error(format!("unknown keyword '{other}'"))),
    };
    cur.finish()?;
    Ok(stmt)
}

fn parse_table(cur: &mut Cursor<'_>) -> Result<Vec<Vec<Spanned<i64>>>, Diagnostic> {
    cur.punct('[')?;
    let mut rows = Vec::new();
    let mut row = Vec::new();
    loop {
        match cur.peek() {
            Some(Tok::Int(_)) => row.push(cur.int("a table entry")?),
            Some(Tok::Punct(';')) => {
                cur.pos += 1;
                rows.push(std::mem::take(&mut row));
            }
            Some(Tok::Punct(']')) => {
                cur.pos += 1;
                if !row.is_empty() || !rows.is_empty() {
                    rows.push(row);
                }
                return Ok(rows);
            }
            _ => return Err(cur.unexpected("a table entry, ';' or ']'")),
        }
    }
}

fn parse_stage(cur: &mut Cursor<'_>) -> Result<StageSyntax, Diagnostic> {
    if !cur.eat('[') {
        return Ok(StageSyntax::Single(cur.ident("an fr name or '['")?));
    }
    let mut frs = vec![cur.ident("an fr name")?];
    while cur.eat('|') {
        frs.push(cur.ident("an fr name")?);
    }
    cur.punct(']')?;
    cur.punct('@')?;
    let policy_name = cur.ident("an arbitration policy")?;
    let value = match policy_name.value.as_str() {
        "first" => PolicySyntax::First,
        "best" => PolicySyntax::Best,
        "priority" => {
            cur.punct('(')?;
            let mut order = vec![cur.ident("an fr name")?];
            while cur.eat(',') {
                order.push(cur.ident("an fr name")?);
            }
            cur.punct(')')?;
            PolicySyntax::Priority(order)
        }
        other => {
            return Err(policy_name.error(format!(
                "unknown arbitration policy '{other}' (expected first, best or priority)"
            )))
        }
    };
    Ok(StageSyntax::Parallel {
        frs,
        policy: Spanned {
            value,
            line: policy_name.line,
            col: policy_name.col,
        },
    })
}

/// Parses a whole document. Returns the model only when there are no
/// errors; warnings are returned alongside either way.
pub fn parse_text_with_warnings(source: &str) -> (Option<Model>, Vec<Diagnostic>) {
    let mut diagnostics = Vec::new();
    let mut statements = Vec::new();
    for (index, raw) in source.split('\n').enumerate() {
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        let line_no = index + 1;
        let tokens = match tokenize(line, line_no) {
            Ok(tokens) => tokens,
            Err(d) => {
                diagnostics.push(d);
                continue;
            }
        };
        if tokens.is_empty() {
            continue;
        }
        let mut cursor = Cursor {
            tokens: &tokens,
            pos: 0,
            line: line_no,
            end_col: line.chars().count().max(1),
        };
        match parse_statement(&mut cursor) {
            Ok(stmt) => statements.push(stmt),
            Err(d) => diagnostics.push(d),
        }
    }

    let model = resolve(&statements, &mut diagnostics);
    diagnostics.sort_by_key(|d| (d.line, d.column));
    let failed = diagnostics.iter().any(|d| d.severity == Severity::Error);
    (if failed { None } else { Some(model) }, diagnostics)
}

/// Parses a document, returning every error if any occurred.
pub fn parse_text(source: &str) -> Result<Model, Vec<Diagnostic>> {
    match parse_text_with_warnings(source) {
        (Some(model), _) => Ok(model),
        (None, diagnostics) => Err(diagnostics
            .into_iter()
            .filter(|d| d.severity == Severity::Error)
            .collect()),
    }
}

fn rule_from_params(
    variant: &Spanned<String>,
    params: &[(Spanned<String>, i64)],
    diagnostics: &mut Vec<Diagnostic>,
) -> Option<FamilyRule> {
    let expected: &[&str] = match variant.value.as_str() {
        "affine_mod" => &["a"],
        "mul_mod" => &[],
        "poly_mod" => &["e"],
        "threshold_memory" => &["theta"],
        "quantized_neuron" => &["s"],
        "hybrid_memory" => &["theta", "s"],
        other => {
            diagnostics.push(variant.error(format!("unknown family variant '{other}'")));
            return None;
        }
    };
    let mut values: HashMap<&str, i64> = HashMap::new();
    let mut ok = true;
    for (key, value) in params {
        if !expected.contains(&key.value.as_str()) {
            diagnostics.push(key.error(format!("{} has no parameter '{}'", variant.value, key.value)));
            ok = false;
        } else if values.insert(key.value.as_str(), *value).is_some() {
            diagnostics.push(key.error(format!("parameter '{}' given twice", key.value)));
            ok = false;
        }
    }
    for key in expected {
        if !values.contains_key(key) {
            diagnostics.push(variant.error(format!("{} requires parameter '{key}'", variant.value)));
            ok = false;
        }
    }
    if !ok {
        return None;
    }
    Some(match variant.value.as_str() {
        "affine_mod" => FamilyRule::AffineMod { a: values["a"] },
        "mul_mod" => FamilyRule::MulMod,
        "poly_mod" => FamilyRule::PolyMod { e: values["e"] },
        "threshold_memory" => FamilyRule::ThresholdMemory { theta: values["theta"] },
        "quantized_neuron" => FamilyRule::QuantizedNeuron { s: values["s"] },
        "hybrid_memory" => FamilyRule::HybridMemory {
            theta: values["theta"],
            s: values["s"],
        },
        _ => unreachable!("variant checked above"),
    })
}

fn resolve(statements: &[Statement], diagnostics: &mut Vec<Diagnostic>) -> Model {
    let mut model = Model::new();
    // Names that were declared but failed to build; references to them are
    // not reported again.
    let mut broken: HashSet<(&str, &str)> = HashSet::new();

    fn declare(kind: &str, name: &Spanned<String>, taken: bool, diagnostics: &mut Vec<Diagnostic>) -> bool {
        if taken {
            diagnostics.push(name.error(format!("duplicate {kind} '{}'", name.value)));
        }
        !taken
    }

    for stmt in statements {
        if let Statement::Domain { name, size, null } = stmt {
            let taken = model.domains.contains_key(&name.value) || broken.contains(&("domain", name.value.as_str()));
            if !declare("domain", name, taken, diagnostics) {
                continue;
            }
            let domain = if size.value < 1 {
                Err(size.error(format!("domain size must be at least 1, got {}", size.value)))
            } else {
                let n = size.value as usize;
                if n > LARGE_DOMAIN_WARNING {
                    diagnostics.push(Diagnostic::warning(
                        size.line,
                        size.col,
                        format!("domain size {n} is above {LARGE_DOMAIN_WARNING}; exhaustive analyses cost n^4"),
                    ));
                }
                let built = if *null {
                    FiniteDomain::with_null(name.value.clone(), n)
                } else {
                    FiniteDomain::plain(name.value.clone(), n)
                };
                built.map_err(|e| size.error(e.to_string()))
            };
            match domain {
                Ok(d) => {
                    model.domains.insert(name.value.clone(), d);
                }
                Err(d) => {
                    diagnostics.push(d);
                    broken.insert(("domain", name.value.as_str()));
                }
            }
        }
    }

    for stmt in statements {
        if let Statement::Family { name, domain, body } = stmt {
            let taken = model.families.contains_key(&name.value) || broken.contains(&("family", name.value.as_str()));
            if !declare("family", name, taken, diagnostics) {
                continue;
            }
            let Some(d) = model.domains.get(&domain.value).cloned() else {
                if !broken.contains(&("domain", domain.value.as_str())) {
                    diagnostics.push(domain.error(format!("unresolved domain '{}'", domain.value)));
                }
                broken.insert(("family", name.value.as_str()));
                continue;
            };
            let built = match body {
                FamilyBody::Rule { variant, params } => {
                    rule_from_params(variant, params, diagnostics).and_then(|rule| {
                        match ParamFamily::new(name.value.clone(), d, rule) {
                            Ok(f) => Some(f),
                            Err(e) => {
                                diagnostics.push(variant.error(e.to_string()));
                                None
                            }
                        }
                    })
                }
                FamilyBody::Table(rows) => table_family(name, d, rows, diagnostics),
            };
            match built {
                Some(f) => {
                    model.families.insert(name.value.clone(), std::sync::Arc::new(f));
                }
                None => {
                    broken.insert(("family", name.value.as_str()));
                }
            }
        }
    }

    for stmt in statements {
        if let Statement::Fr { name, family, param } = stmt {
            let taken = model.frs.contains_key(&name.value) || broken.contains(&("fr", name.value.as_str()));
            if !declare("fr", name, taken, diagnostics) {
                continue;
            }
            if !model.families.contains_key(&family.value) {
                if !broken.contains(&("family", family.value.as_str())) {
                    diagnostics.push(family.error(format!("unresolved family '{}'", family.value)));
                }
                broken.insert(("fr", name.value.as_str()));
                continue;
            }
            let size = model.families[&family.value].size();
            if param.value < 0 || param.value as usize >= size {
                diagnostics.push(param.error(format!(
                    "parameter {} is outside family '{}' domain of size {size}",
                    param.value, family.value
                )));
                broken.insert(("fr", name.value.as_str()));
                continue;
            }
            model
                .add_fr(&name.value, &family.value, param.value as usize)
                .expect("checked above");
        }
    }

    for stmt in statements {
        if let Statement::Net { name, stages } = stmt {
            if !declare("net", name, model.nets.contains_key(&name.value), diagnostics) {
                continue;
            }
            if let Some(decl) = net_decl(&model, stages, &broken, diagnostics) {
                match model.build_network(&decl) {
                    Ok(_) => {
                        model.nets.insert(name.value.clone(), decl);
                    }
                    Err(e) => diagnostics.push(name.error(match e {
                        Error::DomainMismatch { expected, found } => {
                            format!("net '{}' mixes domains '{expected}' and '{found}'", name.value)
                        }
                        other => format!("net '{}': {other}", name.value),
                    })),
                }
            }
        }
    }

    model
}

fn table_family(
    name: &Spanned<String>,
    domain: FiniteDomain,
    rows: &[Vec<Spanned<i64>>],
    diagnostics: &mut Vec<Diagnostic>,
) -> Option<ParamFamily> {
    let mut matrix = Vec::with_capacity(rows.len());
    let mut ok = true;
    for row in rows {
        let mut out = Vec::with_capacity(row.len());
        for entry in row {
            if entry.value < 0 || entry.value as usize >= domain.size() {
                diagnostics.push(entry.error(format!(
                    "table entry {} is outside domain '{}' of size {}",
                    entry.value,
                    domain.name(),
                    domain.size()
                )));
                ok = false;
                out.push(0);
            } else {
                out.push(entry.value as usize);
            }
        }
        matrix.push(out);
    }
    let n = domain.size();
    if matrix.len() != n {
        diagnostics.push(name.error(format!("table has {} rows, expected {n}", matrix.len())));
        ok = false;
    }
    for (k, row) in rows.iter().enumerate() {
        if row.len() != n {
            let (line, col) = row.first().map_or((name.line, name.col), |e| (e.line, e.col));
            diagnostics.push(Diagnostic::error(
                line,
                col,
                format!("table row {k} has {} entries, expected {n}", row.len()),
            ));
            ok = false;
        }
    }
    if !ok {
        return None;
    }
    Some(ParamFamily::table(name.value.clone(), domain, matrix).expect("table validated above"))
}

fn net_decl(
    model: &Model,
    stages: &[StageSyntax],
    broken: &HashSet<(&str, &str)>,
    diagnostics: &mut Vec<Diagnostic>,
) -> Option<NetDecl> {
    let mut ok = true;
    let check = |fr: &Spanned<String>, diagnostics: &mut Vec<Diagnostic>| {
        let known = model.frs.contains_key(&fr.value);
        if !known && !broken.contains(&("fr", fr.value.as_str())) {
            diagnostics.push(fr.error(format!("unresolved fr '{}'", fr.value)));
        }
        known
    };
    let mut decls = Vec::with_capacity(stages.len());
    for stage in stages {
        match stage {
            StageSyntax::Single(fr) => {
                ok &= check(fr, diagnostics);
                decls.push(StageDecl::Single(fr.value.clone()));
            }
            StageSyntax::Parallel { frs, policy } => {
                for (k, fr) in frs.iter().enumerate() {
                    ok &= check(fr, diagnostics);
                    if frs[..k].iter().any(|prev| prev.value == fr.value) {
                        diagnostics.push(fr.error(format!("fr '{}' appears twice in one parallel stage", fr.value)));
                        ok = false;
                    }
                }
                let policy = match &policy.value {
                    PolicySyntax::First => PolicyDecl::First,
                    PolicySyntax::Best => PolicyDecl::Best,
                    PolicySyntax::Priority(order) => {
                        for (k, entry) in order.iter().enumerate() {
                            if !frs.iter().any(|fr| fr.value == entry.value) {
                                diagnostics.push(
                                    entry
                                        .error(format!("priority lists '{}', which is not in this stage", entry.value)),
                                );
                                ok = false;
                            } else if order[..k].iter().any(|prev| prev.value == entry.value) {
                                diagnostics.push(entry.error(format!("priority lists '{}' twice", entry.value)));
                                ok = false;
                            }
                        }
                        let listed: HashSet<&str> = order.iter().map(|e| e.value.as_str()).collect();
                        if let Some(missing) = frs.iter().find(|fr| !listed.contains(fr.value.as_str())) {
                            diagnostics.push(policy.error(format!("priority order does not list '{}'", missing.value)));
                            ok = false;
                        }
                        PolicyDecl::Priority(order.iter().map(|e| e.value.clone()).collect())
                    }
                };
                decls.push(StageDecl::Parallel {
                    frs: frs.iter().map(|f| f.value.clone()).collect(),
                    policy,
                });
            }
        }
    }
    ok.then_some(NetDecl { stages: decls })
}
