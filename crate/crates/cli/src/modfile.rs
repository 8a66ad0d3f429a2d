//! The `.mod` presentation format.
//!
//! ```text
//! module upsilon1
//! gen g0 0
//! gen g2 2
//! sq2 g0 = g2        # comments run to end of line
//! truncated_above 40
//! ```

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt::Write as _;

use a1_core::module::Relation;
use a1_core::{A1Module, ModuleBuilder, ModuleError, Sq};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unknown label `{label}`")]
    UnknownLabel { line: usize, label: String },
    #[error("line {line}: {op} {source_label} has degree {source_degree} but `{target}` has degree {target_degree} (expected {expected})")]
    DegreeMismatch {
        line: usize,
        op: String,
        source_label: String,
        source_degree: i32,
        target: String,
        target_degree: i32,
        expected: i32,
    },
    #[error("line {line}: {what} already declared on line {first}")]
    Duplicate { line: usize, first: usize, what: String },
    #[error("{error} (declared on lines {lines:?})")]
    Invalid { error: ModuleError, lines: Vec<usize> },
}

impl ParseError {
    pub fn line(&self) -> Option<usize> {
        match self {
            ParseError::Syntax { line, .. }
            | ParseError::UnknownLabel { line, .. }
            | ParseError::DegreeMismatch { line, .. }
            | ParseError::Duplicate { line, .. } => Some(*line),
            ParseError::Invalid { lines, .. } => lines.first().copied(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionDecl {
    pub line: usize,
    pub op: Sq,
    pub source: String,
    pub targets: Vec<String>,
}

/// A parsed `.mod` file before validation as a module.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ModuleFile {
    pub name: String,
    /// `(line, label, degree)`.
    pub generators: Vec<(usize, String, i32)>,
    pub actions: Vec<ActionDecl>,
    pub truncated_above: Option<i32>,
}

fn is_label(tok: &str) -> bool {
    !tok.is_empty() && tok != "0" && !tok.chars().any(|c| c.is_whitespace() || matches!(c, '+' | '=' | '#'))
}

fn parse_int(tok: &str, line: usize) -> Result<i32, ParseError> {
    tok.parse().map_err(|_| ParseError::Syntax { line, message: format!("expected an integer, found `{tok}`") })
}

pub fn parse(text: &str) -> Result<ModuleFile, ParseError> {
    let mut file = ModuleFile::default();
    let mut header = false;
    let mut seen_labels: HashMap<String, usize> = HashMap::new();
    let mut seen_actions: HashMap<(Sq, String), usize> = HashMap::new();
    let mut truncation_line = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let toks: Vec<&str> = content.split_whitespace().collect();
        let syntax = |message: &str| ParseError::Syntax { line, message: message.to_string() };
        if !header {
            if toks[0] != "module" || toks.len() != 2 {
                return Err(syntax("expected `module <name>` header"));
            }
            file.name = toks[1].to_string();
            header = true;
            continue;
        }
        match toks[0] {
            "module" => return Err(syntax("second `module` header")),
            "gen" => {
                if toks.len() != 3 {
                    return Err(syntax("expected `gen <label> <degree>`"));
                }
                if !is_label(toks[1]) {
                    return Err(syntax(&format!("invalid label `{}`", toks[1])));
                }
                let degree = parse_int(toks[2], line)?;
                if let Some(&first) = seen_labels.get(toks[1]) {
                    return Err(ParseError::Duplicate { line, first, what: format!("generator `{}`", toks[1]) });
                }
                seen_labels.insert(toks[1].to_string(), line);
                file.generators.push((line, toks[1].to_string(), degree));
            }
            "sq1" | "sq2" => {
                let op = if toks[0] == "sq1" { Sq::Sq1 } else { Sq::Sq2 };
                if toks.len() < 4 || toks[2] != "=" {
                    return Err(syntax(&format!("expected `{} <label> = 0 | <label> (+ <label>)*`", toks[0])));
                }
                let rhs = &toks[3..];
                let targets = if rhs == ["0"] {
                    Vec::new()
                } else {
                    let mut out = Vec::new();
                    for (i, t) in rhs.iter().enumerate() {
                        if i % 2 == 1 {
                            if *t != "+" {
                                return Err(syntax(&format!("expected `+`, found `{t}`")));
                            }
                        } else if !is_label(t) {
                            return Err(syntax(&format!("invalid label `{t}`")));
                        } else {
                            out.push(t.to_string());
                        }
                    }
                    if rhs.len() % 2 == 0 {
                        return Err(syntax("dangling `+`"));
                    }
                    out
                };
                if let Some(&first) = seen_actions.get(&(op, toks[1].to_string())) {
                    return Err(ParseError::Duplicate { line, first, what: format!("{} {}", toks[0], toks[1]) });
                }
                seen_actions.insert((op, toks[1].to_string()), line);
                file.actions.push(ActionDecl { line, op, source: toks[1].to_string(), targets });
            }
            "truncated_above" => {
                if toks.len() != 2 {
                    return Err(syntax("expected `truncated_above <degree>`"));
                }
                if let Some(first) = truncation_line {
                    return Err(ParseError::Duplicate { line, first, what: "truncated_above".into() });
                }
                truncation_line = Some(line);
                file.truncated_above = Some(parse_int(toks[1], line)?);
            }
            other => return Err(syntax(&format!("unknown directive `{other}`"))),
        }
    }
    if !header {
        return Err(ParseError::Syntax { line: 1, message: "missing `module <name>` header".into() });
    }
    Ok(file)
}

impl ModuleFile {
    pub fn to_module(&self) -> Result<A1Module, ParseError> {
        let mut b = ModuleBuilder::new();
        let mut degrees = HashMap::new();
        for (_, label, degree) in &self.generators {
            b.add_basis(label, *degree).expect("labels checked unique while parsing");
            degrees.insert(label.as_str(), *degree);
        }
        for a in &self.actions {
            let sd = *degrees
                .get(a.source.as_str())
                .ok_or_else(|| ParseError::UnknownLabel { line: a.line, label: a.source.clone() })?;
            for t in &a.targets {
                let td = *degrees.get(t.as_str()).ok_or_else(|| ParseError::UnknownLabel { line: a.line, label: t.clone() })?;
                if td != sd + a.op.degree() {
                    return Err(ParseError::DegreeMismatch {
                        line: a.line,
                        op: a.op.name().to_string(),
                        source_label: a.source.clone(),
                        source_degree: sd,
                        target: t.clone(),
                        target_degree: td,
                        expected: sd + a.op.degree(),
                    });
                }
            }
            let targets: Vec<&str> = a.targets.iter().map(|s| s.as_str()).collect();
            b.set_action(a.op, &a.source, &targets).expect("action checked while parsing");
        }
        if let Some(d) = self.truncated_above {
            b.truncate_above(d);
        }
        b.build().map_err(|error| {
            let lines = self.lines_for(&error, &degrees);
            ParseError::Invalid { error, lines }
        })
    }

    /// Source lines implicated in a validation error.
    fn lines_for(&self, error: &ModuleError, degrees: &HashMap<&str, i32>) -> Vec<usize> {
        let mut lines = BTreeSet::new();
        match error {
            ModuleError::RelationViolation { degree, relation } => {
                let (op, step) = match relation {
                    Relation::Sq1Sq1 => (Sq::Sq1, 1),
                    Relation::Sq2Sq2 => (Sq::Sq2, 2),
                };
                for a in self.actions.iter().filter(|a| a.op == op) {
                    let d = degrees[a.source.as_str()];
                    if d == *degree || d == degree + step {
                        lines.insert(a.line);
                    }
                }
            }
            ModuleError::AboveTruncation { label, .. } => {
                lines.extend(self.generators.iter().filter(|g| &g.1 == label).map(|g| g.0));
            }
            _ => {}
        }
        lines.into_iter().collect()
    }
}

/// Parses and validates a module file.
pub fn parse_module(text: &str) -> Result<(String, A1Module), ParseError> {
    let file = parse(text)?;
    let m = file.to_module()?;
    Ok((file.name, m))
}

/// Replaces characters that cannot appear in a label.
fn sanitize(label: &str, taken: &mut HashSet<String>) -> String {
    let mut l: String = label
        .chars()
        .map(|c| match c {
            '+' => '&',
            '=' => ':',
            '#' => '%',
            c if c.is_whitespace() => '_',
            c => c,
        })
        .collect();
    if l.is_empty() || l == "0" {
        l.push('\'');
    }
    while taken.contains(&l) {
        l.push('\'');
    }
    taken.insert(l.clone());
    l
}

/// Writes `m` as a `.mod` file. Labels that are not valid tokens are
/// rewritten (`+` to `&`, whitespace to `_`), so the round trip is exact
/// for modules whose labels are already valid.
pub fn serialize(name: &str, m: &A1Module) -> String {
    let mut out = String::new();
    writeln!(out, "module {name}").unwrap();
    if m.is_zero() {
        if let Some(d) = m.truncated_above() {
            writeln!(out, "truncated_above {d}").unwrap();
        }
        return out;
    }
    let mut taken = HashSet::new();
    let mut names: HashMap<(i32, usize), String> = HashMap::new();
    for k in m.lo()..=m.hi() {
        for (i, l) in m.labels(k).iter().enumerate() {
            let s = sanitize(l, &mut taken);
            writeln!(out, "gen {s} {k}").unwrap();
            names.insert((k, i), s);
        }
    }
    for (op, kw) in [(Sq::Sq1, "sq1"), (Sq::Sq2, "sq2")] {
        for k in m.lo()..=m.hi() {
            let mat = m.sq(op, k);
            for c in 0..m.dim(k) {
                let col = mat.col(c);
                if col.is_zero() {
                    continue;
                }
                let targets: Vec<&str> = col.ones().map(|r| names[&(k + op.degree(), r)].as_str()).collect();
                writeln!(out, "{kw} {} = {}", names[&(k, c)], targets.join(" + ")).unwrap();
            }
        }
    }
    if let Some(d) = m.truncated_above() {
        writeln!(out, "truncated_above {d}").unwrap();
    }
    out
}
