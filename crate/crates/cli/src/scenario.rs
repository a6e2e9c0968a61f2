//! The scenario file format.
//!
//! A scenario is a sequence of bracketed blocks holding `key = value` lines.
//! Values are quoted expressions or strings, numbers, or two-element number
//! lists. Indices in keys are 1-based. Comments start with `#`.
//!
//! ```text
//! [algebroid]
//! n = 2
//! m = 2
//! rho[1][1] = "1"
//! rho[2][2] = "1"
//!
//! [spray]
//! S[1] = "-(y1^2 + y2^2)*x1"
//! S[2] = "-(y1^2 + y2^2)*x2"
//!
//! [section eta]
//! comp[1] = "-x2"
//! comp[2] = "x1"
//!
//! [check]
//! kind = "collineation"
//! section = "eta"
//! ```

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use spraygeom_core::{AlgebroidStructure, BaseSection, Field, ProjectiveDimension, Sampling, Space, Spray, SprayKind};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("unknown block `[{0}]`")]
    UnknownBlock(String),
    #[error("unknown key `{key}` in [{block}]")]
    UnknownKey { key: String, block: String },
    #[error("`{0}` given twice")]
    Duplicate(String),
    #[error("`{key}`: {message}")]
    Arity { key: String, message: String },
    #[error("`{key}`: {message}")]
    Value { key: String, message: String },
    #[error("`{key}`: {source}")]
    Expression {
        key: String,
        source: spraygeom_core::ParseError,
    },
    #[error("`{0}` must depend on the base coordinates only")]
    FiberDependence(String),
    #[error("check refers to undeclared section `{0}`")]
    UndeclaredSection(String),
    #[error("missing {0}")]
    Missing(String),
    #[error("cannot read scenario: {0}")]
    Io(String),
}

/// A scenario error located at a 1-based line and column.
#[derive(Debug, Clone, PartialEq, Error)]
pub struct ScenarioError {
    pub line: usize,
    pub column: usize,
    pub kind: ErrorKind,
}

impl fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            write!(f, "{}", self.kind)
        } else {
            write!(f, "line {}, column {}: {}", self.line, self.column, self.kind)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckKind {
    /// `[S, eta^C]` and its local form.
    LieSymmetry,
    /// Agreement of the symmetry condition with the A-tensor and F-N criteria.
    SymmetryLemma,
    /// Lie derivatives of the eight curvature tensors along `eta^C`.
    Collineation,
    /// The derivation identities for a pair of sections and a function.
    Derivations,
}

impl CheckKind {
    fn from_name(s: &str) -> Option<CheckKind> {
        Some(match s {
            "lie_symmetry" => CheckKind::LieSymmetry,
            "symmetry_lemma" => CheckKind::SymmetryLemma,
            "collineation" => CheckKind::Collineation,
            "derivations" => CheckKind::Derivations,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            CheckKind::LieSymmetry => "lie_symmetry",
            CheckKind::SymmetryLemma => "symmetry_lemma",
            CheckKind::Collineation => "collineation",
            CheckKind::Derivations => "derivations",
        }
    }
}

/// Whether the checked identity is expected to hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Expect {
    #[default]
    Pass,
    Fail,
}

#[derive(Debug, Clone)]
pub struct CheckSpec {
    pub kind: CheckKind,
    pub section: String,
    /// Second section for `derivations`.
    pub with: Option<String>,
    /// Scalar field for `derivations`.
    pub function: Option<Field>,
    pub tol: Option<f64>,
    pub expect: Expect,
    /// Expected `V` components of `[S, eta^C]`; the residual becomes the difference.
    pub value: Option<Vec<Field>>,
    pub line: usize,
}

/// Tolerances and switches shared by all checks.
#[derive(Debug, Clone, PartialEq)]
pub struct Options {
    /// Default for requested checks without their own `tol`.
    pub tol: f64,
    pub structure_tol: f64,
    pub operator_tol: f64,
    pub bracket_tol: f64,
    pub dual_tol: f64,
    pub dimension: ProjectiveDimension,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            tol: 1e-8,
            structure_tol: 1e-12,
            operator_tol: 1e-12,
            bracket_tol: 1e-10,
            dual_tol: 1e-10,
            dimension: ProjectiveDimension::Rank,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub algebroid: AlgebroidStructure,
    pub spray: Spray,
    pub sections: Vec<(String, BaseSection)>,
    pub checks: Vec<CheckSpec>,
    pub sampling: Sampling,
    pub options: Options,
}

impl Scenario {
    pub fn space(&self) -> Space {
        self.algebroid.space()
    }

    pub fn section(&self, name: &str) -> Option<&BaseSection> {
        self.sections.iter().find(|(n, _)| n == name).map(|(_, s)| s)
    }
}

pub fn load(path: &Path) -> Result<Scenario, ScenarioError> {
    let text = std::fs::read_to_string(path).map_err(|e| ScenarioError {
        line: 0,
        column: 0,
        kind: ErrorKind::Io(format!("{}: {e}", path.display())),
    })?;
    parse(&text)
}

// ── Lexing ─────────────────────────────────────────────────────

#[derive(Debug, Clone)]
enum Value {
    Str(String),
    Num(f64),
    List(Vec<f64>),
}

#[derive(Debug, Clone)]
struct Entry {
    name: String,
    index: Vec<Vec<usize>>,
    value: Value,
    line: usize,
    column: usize,
    /// Column of the first character inside the quotes of a string value.
    value_column: usize,
}

impl Entry {
    fn key(&self) -> String {
        let mut k = self.name.clone();
        for group in &self.index {
            let parts: Vec<String> = group.iter().map(|i| i.to_string()).collect();
            k.push_str(&format!("[{}]", parts.join(",")));
        }
        k
    }

    fn err(&self, kind: ErrorKind) -> ScenarioError {
        ScenarioError {
            line: self.line,
            column: self.column,
            kind,
        }
    }

    fn value_err(&self, message: impl Into<String>) -> ScenarioError {
        self.err(ErrorKind::Value {
            key: self.key(),
            message: message.into(),
        })
    }

    fn arity_err(&self, message: impl Into<String>) -> ScenarioError {
        self.err(ErrorKind::Arity {
            key: self.key(),
            message: message.into(),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Header {
    Algebroid,
    Spray,
    Section(String),
    Check,
    Sampling,
    Options,
}

impl Header {
    fn label(&self) -> String {
        match self {
            Header::Algebroid => "algebroid".into(),
            Header::Spray => "spray".into(),
            Header::Section(n) => format!("section {n}"),
            Header::Check => "check".into(),
            Header::Sampling => "sampling".into(),
            Header::Options => "options".into(),
        }
    }
}

#[derive(Debug)]
struct Block {
    header: Header,
    line: usize,
    entries: Vec<Entry>,
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> ScenarioError {
    ScenarioError {
        line,
        column,
        kind: ErrorKind::Syntax(message.into()),
    }
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Byte position of a `#` that starts a comment, ignoring quoted text.
fn comment_start(line: &str) -> Option<usize> {
    let mut quoted = false;
    for (i, c) in line.char_indices() {
        match c {
            '"' => quoted = !quoted,
            '#' if !quoted => return Some(i),
            _ => {}
        }
    }
    None
}

fn parse_header(text: &str, line: usize, column: usize) -> Result<Header, ScenarioError> {
    let inner = text[1..text.len() - 1].trim();
    let mut words = inner.split_whitespace();
    let head = words.next().unwrap_or("");
    let rest: Vec<&str> = words.collect();
    let plain = |h: Header| {
        if rest.is_empty() {
            Ok(h)
        } else {
            Err(syntax(line, column, format!("[{head}] takes no name")))
        }
    };
    match head {
        "algebroid" => plain(Header::Algebroid),
        "spray" => plain(Header::Spray),
        "check" => plain(Header::Check),
        "sampling" => plain(Header::Sampling),
        "options" => plain(Header::Options),
        "section" => match rest.as_slice() {
            [name] if is_ident(name) => Ok(Header::Section((*name).to_string())),
            _ => Err(syntax(line, column, "expected `[section <name>]`")),
        },
        _ => Err(ScenarioError {
            line,
            column,
            kind: ErrorKind::UnknownBlock(inner.to_string()),
        }),
    }
}

fn parse_key(text: &str, line: usize, column: usize) -> Result<(String, Vec<Vec<usize>>), ScenarioError> {
    let (name, mut rest) = match text.find('[') {
        Some(p) => (&text[..p], &text[p..]),
        None => (text, ""),
    };
    if !is_ident(name) {
        return Err(syntax(line, column, format!("invalid key `{text}`")));
    }
    let mut index = Vec::new();
    while !rest.is_empty() {
        let close = rest
            .find(']')
            .filter(|_| rest.starts_with('['))
            .ok_or_else(|| syntax(line, column, format!("malformed index in `{text}`")))?;
        let group = rest[1..close]
            .split(',')
            .map(|p| match p.trim().parse::<usize>() {
                Ok(i) if i >= 1 => Ok(i),
                _ => Err(syntax(line, column, format!("indices in `{text}` must be positive integers"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        index.push(group);
        rest = &rest[close + 1..];
    }
    Ok((name.to_string(), index))
}

fn parse_number(text: &str, line: usize, column: usize) -> Result<f64, ScenarioError> {
    let v: f64 = text
        .trim()
        .parse()
        .map_err(|_| syntax(line, column, format!("expected a number, found `{}`", text.trim())))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(syntax(line, column, "numbers must be finite"))
    }
}

fn parse_value(text: &str, line: usize, column: usize) -> Result<(Value, usize), ScenarioError> {
    if let Some(body) = text.strip_prefix('"') {
        let end = body.find('"').ok_or_else(|| syntax(line, column, "unterminated string"))?;
        if !body[end + 1..].trim().is_empty() {
            return Err(syntax(line, column + end + 2, "unexpected text after string"));
        }
        return Ok((Value::Str(body[..end].to_string()), column + 1));
    }
    if let Some(body) = text.strip_prefix('[') {
        let body = body
            .strip_suffix(']')
            .ok_or_else(|| syntax(line, column, "unterminated list"))?;
        let items = body
            .split(',')
            .map(|p| parse_number(p, line, column))
            .collect::<Result<Vec<_>, _>>()?;
        return Ok((Value::List(items), column));
    }
    if text.is_empty() {
        return Err(syntax(line, column, "missing value"));
    }
    Ok((Value::Num(parse_number(text, line, column)?), column))
}

fn lex(text: &str) -> Result<Vec<Block>, ScenarioError> {
    let mut blocks: Vec<Block> = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let body = match comment_start(raw) {
            Some(p) => &raw[..p],
            None => raw,
        };
        let trimmed = body.trim();
        if trimmed.is_empty() {
            continue;
        }
        let column = body.len() - body.trim_start().len() + 1;
        if trimmed.starts_with('[') && !trimmed.contains('=') {
            if !trimmed.ends_with(']') {
                return Err(syntax(line, column, "unterminated block header"));
            }
            let header = parse_header(trimmed, line, column)?;
            blocks.push(Block {
                header,
                line,
                entries: Vec::new(),
            });
            continue;
        }
        let eq = trimmed
            .find('=')
            .ok_or_else(|| syntax(line, column, "expected `key = value`"))?;
        let key_text = trimmed[..eq].trim_end();
        let value_text = trimmed[eq + 1..].trim_start();
        let value_column = column + eq + 1 + (trimmed[eq + 1..].len() - value_text.len());
        let (name, index) = parse_key(key_text, line, column)?;
        let (value, value_column) = parse_value(value_text.trim_end(), line, value_column)?;
        let block = blocks
            .last_mut()
            .ok_or_else(|| syntax(line, column, "entry outside of any block"))?;
        block.entries.push(Entry {
            name,
            index,
            value,
            line,
            column,
            value_column,
        });
    }
    Ok(blocks)
}

// ── Interpretation ─────────────────────────────────────────────

fn unknown(e: &Entry, block: &Block) -> ScenarioError {
    e.err(ErrorKind::UnknownKey {
        key: e.key(),
        block: block.header.label(),
    })
}

fn check_duplicates(block: &Block) -> Result<(), ScenarioError> {
    let mut seen = BTreeSet::new();
    for e in &block.entries {
        if !seen.insert(e.key()) {
            return Err(e.err(ErrorKind::Duplicate(e.key())));
        }
    }
    Ok(())
}

fn scalar_key<'a>(e: &'a Entry, block: &Block) -> Result<&'a str, ScenarioError> {
    if e.index.is_empty() {
        Ok(&e.name)
    } else {
        Err(unknown(e, block))
    }
}

fn number(e: &Entry) -> Result<f64, ScenarioError> {
    match e.value {
        Value::Num(v) => Ok(v),
        _ => Err(e.value_err("expected a number")),
    }
}

fn count(e: &Entry) -> Result<usize, ScenarioError> {
    let v = number(e)?;
    if v >= 0.0 && v.fract() == 0.0 && v <= 64.0 {
        Ok(v as usize)
    } else {
        Err(e.value_err("expected a small non-negative integer"))
    }
}

fn string(e: &Entry) -> Result<&str, ScenarioError> {
    match &e.value {
        Value::Str(s) => Ok(s),
        _ => Err(e.value_err("expected a quoted string")),
    }
}

fn expression(e: &Entry, space: Space) -> Result<Field, ScenarioError> {
    let text = string(e)?;
    Field::parse(text, space).map_err(|source| ScenarioError {
        line: e.line,
        column: e.value_column + source.offset,
        kind: ErrorKind::Expression { key: e.key(), source },
    })
}

fn base_expression(e: &Entry, space: Space) -> Result<Field, ScenarioError> {
    let f = expression(e, space)?;
    if f.deps() & space.fiber_mask() != 0 {
        return Err(e.err(ErrorKind::FiberDependence(e.key())));
    }
    Ok(f)
}

/// A 1-based index in `1..=bound`, as a 0-based value.
fn in_range(e: &Entry, i: usize, bound: usize, what: &str) -> Result<usize, ScenarioError> {
    if (1..=bound).contains(&i) {
        Ok(i - 1)
    } else {
        Err(e.arity_err(format!("{what} index {i} out of range 1..={bound}")))
    }
}

fn single_index(e: &Entry, bound: usize, what: &str) -> Result<usize, ScenarioError> {
    match e.index.as_slice() {
        [g] if g.len() == 1 => in_range(e, g[0], bound, what),
        _ => Err(e.arity_err(format!("expected `{}[a]`", e.name))),
    }
}

fn algebroid(block: &Block) -> Result<AlgebroidStructure, ScenarioError> {
    let mut n = None;
    let mut m = None;
    for e in &block.entries {
        match (e.name.as_str(), e.index.is_empty()) {
            ("n", true) => n = Some(count(e)?),
            ("m", true) => m = Some(count(e)?),
            ("rho", false) | ("L", false) => {}
            _ => return Err(unknown(e, block)),
        }
    }
    let at = |what: &str| ScenarioError {
        line: block.line,
        column: 1,
        kind: ErrorKind::Missing(format!("`{what}` in [algebroid]")),
    };
    let n = n.ok_or_else(|| at("n"))?;
    let m = m.ok_or_else(|| at("m"))?;
    if m == 0 {
        return Err(ScenarioError {
            line: block.line,
            column: 1,
            kind: ErrorKind::Missing("a positive rank m".into()),
        });
    }
    if n + m > 64 {
        return Err(ScenarioError {
            line: block.line,
            column: 1,
            kind: ErrorKind::Syntax("at most 64 coordinates are supported".into()),
        });
    }
    let space = Space::new(n, m);
    let mut rho = vec![vec![Field::zero(); m]; n];
    let mut l = Vec::new();
    for e in &block.entries {
        match e.name.as_str() {
            "rho" => {
                let (i, a) = match e.index.as_slice() {
                    [i, a] if i.len() == 1 && a.len() == 1 => (i[0], a[0]),
                    _ => return Err(e.arity_err("expected `rho[i][a]`")),
                };
                let i = in_range(e, i, n, "base")?;
                let a = in_range(e, a, m, "fiber")?;
                rho[i][a] = base_expression(e, space)?;
            }
            "L" => {
                let (g, a, b) = match e.index.as_slice() {
                    [g, ab] if g.len() == 1 && ab.len() == 2 => (g[0], ab[0], ab[1]),
                    _ => return Err(e.arity_err("expected `L[g][a,b]`")),
                };
                let g = in_range(e, g, m, "fiber")?;
                let a = in_range(e, a, m, "fiber")?;
                let b = in_range(e, b, m, "fiber")?;
                if a >= b {
                    return Err(e.arity_err(
                        "only entries with a < b are accepted; the antisymmetric completion is automatic",
                    ));
                }
                l.push((g, a, b, base_expression(e, space)?));
            }
            _ => {}
        }
    }
    AlgebroidStructure::from_sparse(space, rho, &l).map_err(|err| ScenarioError {
        line: block.line,
        column: 1,
        kind: ErrorKind::Syntax(err.to_string()),
    })
}

fn spray(block: &Block, space: Space) -> Result<Spray, ScenarioError> {
    let mut s = vec![Field::zero(); space.m];
    let mut kind = SprayKind::Spray;
    for e in &block.entries {
        match e.name.as_str() {
            "S" => {
                let a = single_index(e, space.m, "fiber")?;
                s[a] = expression(e, space)?;
            }
            "kind" if e.index.is_empty() => {
                kind = match string(e)? {
                    "spray" => SprayKind::Spray,
                    "semispray" => SprayKind::Semispray,
                    other => return Err(e.value_err(format!("unknown spray kind `{other}`"))),
                }
            }
            _ => return Err(unknown(e, block)),
        }
    }
    Ok(Spray::new(s, kind))
}

fn section(block: &Block, a: &AlgebroidStructure) -> Result<BaseSection, ScenarioError> {
    let space = a.space();
    let mut comp = vec![Field::zero(); space.m];
    for e in &block.entries {
        if e.name != "comp" {
            return Err(unknown(e, block));
        }
        let k = single_index(e, space.m, "fiber")?;
        comp[k] = base_expression(e, space)?;
    }
    Ok(a.section(comp).expect("components checked"))
}

fn sampling(block: &Block, s: &mut Sampling) -> Result<(), ScenarioError> {
    for e in &block.entries {
        let range = |e: &Entry| match &e.value {
            Value::List(v) if v.len() == 2 && v[0] <= v[1] => Ok((v[0], v[1])),
            _ => Err(e.value_err("expected `[min, max]` with min <= max")),
        };
        match scalar_key(e, block)? {
            "points" => {
                let v = number(e)?;
                if v < 1.0 || v.fract() != 0.0 {
                    return Err(e.value_err("expected a positive integer"));
                }
                s.points = v as usize;
            }
            "seed" => {
                let v = number(e)?;
                if v < 0.0 || v.fract() != 0.0 || v > u64::MAX as f64 {
                    return Err(e.value_err("expected a non-negative integer"));
                }
                s.seed = v as u64;
            }
            "x_range" => (s.x_min, s.x_max) = range(e)?,
            "y_range" => {
                let (lo, hi) = range(e)?;
                if lo < 0.0 {
                    return Err(e.value_err("y_range bounds the magnitude of fiber coordinates and must be non-negative"));
                }
                (s.y_min, s.y_max) = (lo, hi);
            }
            _ => return Err(unknown(e, block)),
        }
    }
    Ok(())
}

fn tolerance(e: &Entry) -> Result<f64, ScenarioError> {
    let v = number(e)?;
    if v >= 0.0 {
        Ok(v)
    } else {
        Err(e.value_err("tolerances must be non-negative"))
    }
}

fn options(block: &Block, o: &mut Options) -> Result<(), ScenarioError> {
    for e in &block.entries {
        match scalar_key(e, block)? {
            "tol" => o.tol = tolerance(e)?,
            "structure_tol" => o.structure_tol = tolerance(e)?,
            "operator_tol" => o.operator_tol = tolerance(e)?,
            "bracket_tol" => o.bracket_tol = tolerance(e)?,
            "dual_tol" => o.dual_tol = tolerance(e)?,
            "dimension" => {
                o.dimension = match string(e)? {
                    "rank" => ProjectiveDimension::Rank,
                    "base" => ProjectiveDimension::Base,
                    other => return Err(e.value_err(format!("unknown dimension `{other}`, expected rank or base"))),
                }
            }
            _ => return Err(unknown(e, block)),
        }
    }
    Ok(())
}

fn check(block: &Block, space: Space) -> Result<(CheckSpec, Vec<(String, &Entry)>), ScenarioError> {
    let mut kind = None;
    let mut section = None;
    let mut with = None;
    let mut function = None;
    let mut tol = None;
    let mut expect = Expect::Pass;
    let mut value: Option<Vec<Field>> = None;
    let mut refs = Vec::new();
    for e in &block.entries {
        match e.name.as_str() {
            "value" => {
                let a = single_index(e, space.m, "fiber")?;
                value.get_or_insert_with(|| vec![Field::zero(); space.m])[a] = expression(e, space)?;
                continue;
            }
            _ => scalar_key(e, block)?,
        };
        match e.name.as_str() {
            "kind" => {
                let s = string(e)?;
                kind = Some(CheckKind::from_name(s).ok_or_else(|| e.value_err(format!("unknown check kind `{s}`")))?);
            }
            "section" => {
                let s = string(e)?.to_string();
                refs.push((s.clone(), e));
                section = Some(s);
            }
            "with" => {
                let s = string(e)?.to_string();
                refs.push((s.clone(), e));
                with = Some(s);
            }
            "function" => function = Some(expression(e, space)?),
            "tol" => tol = Some(tolerance(e)?),
            "expect" => {
                expect = match string(e)? {
                    "pass" => Expect::Pass,
                    "fail" => Expect::Fail,
                    other => return Err(e.value_err(format!("expected pass or fail, found `{other}`"))),
                }
            }
            _ => return Err(unknown(e, block)),
        }
    }
    let missing = |what: &str| ScenarioError {
        line: block.line,
        column: 1,
        kind: ErrorKind::Missing(format!("`{what}` in [check]")),
    };
    let kind = kind.ok_or_else(|| missing("kind"))?;
    let section = section.ok_or_else(|| missing("section"))?;
    if kind == CheckKind::Derivations && with.is_none() {
        return Err(missing("with"));
    }
    let misplaced = |key: &str| ScenarioError {
        line: block.line,
        column: 1,
        kind: ErrorKind::UnknownKey {
            key: key.into(),
            block: format!("check of kind {}", kind.name()),
        },
    };
    if kind != CheckKind::Derivations && (with.is_some() || function.is_some()) {
        return Err(misplaced(if with.is_some() { "with" } else { "function" }));
    }
    if kind != CheckKind::LieSymmetry && value.is_some() {
        return Err(misplaced("value"));
    }
    Ok((
        CheckSpec {
            kind,
            section,
            with,
            function,
            tol,
            expect,
            value,
            line: block.line,
        },
        refs,
    ))
}

/// Parse and validate a scenario.
pub fn parse(text: &str) -> Result<Scenario, ScenarioError> {
    let blocks = lex(text)?;
    for b in &blocks {
        check_duplicates(b)?;
    }
    let once = |h: Header| -> Result<&Block, ScenarioError> {
        let mut found = blocks.iter().filter(|b| b.header == h);
        let first = found.next().ok_or_else(|| ScenarioError {
            line: 0,
            column: 0,
            kind: ErrorKind::Missing(format!("[{}] block", h.label())),
        })?;
        if let Some(again) = found.next() {
            return Err(ScenarioError {
                line: again.line,
                column: 1,
                kind: ErrorKind::Duplicate(format!("[{}]", h.label())),
            });
        }
        Ok(first)
    };
    let optional = |h: Header| -> Result<Option<&Block>, ScenarioError> {
        if blocks.iter().any(|b| b.header == h) {
            once(h).map(Some)
        } else {
            Ok(None)
        }
    };

    let algebroid = algebroid(once(Header::Algebroid)?)?;
    let space = algebroid.space();
    let spray = spray(once(Header::Spray)?, space)?;

    let mut sections: Vec<(String, BaseSection)> = Vec::new();
    for b in &blocks {
        if let Header::Section(name) = &b.header {
            if sections.iter().any(|(n, _)| n == name) {
                return Err(ScenarioError {
                    line: b.line,
                    column: 1,
                    kind: ErrorKind::Duplicate(format!("[section {name}]")),
                });
            }
            sections.push((name.clone(), section(b, &algebroid)?));
        }
    }

    let mut checks = Vec::new();
    for b in blocks.iter().filter(|b| b.header == Header::Check) {
        let (spec, refs) = check(b, space)?;
        for (name, e) in refs {
            if !sections.iter().any(|(n, _)| *n == name) {
                return Err(e.err(ErrorKind::UndeclaredSection(name)));
            }
        }
        checks.push(spec);
    }

    let mut s = Sampling::default();
    if let Some(b) = optional(Header::Sampling)? {
        sampling(b, &mut s)?;
    }
    let mut o = Options::default();
    if let Some(b) = optional(Header::Options)? {
        options(b, &mut o)?;
    }

    Ok(Scenario {
        algebroid,
        spray,
        sections,
        checks,
        sampling: s,
        options: o,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const FLAT: &str = "[algebroid]\nn = 2\nm = 2\nrho[1][1] = \"1\"\nrho[2][2] = \"1\"\n[spray]\n";

    fn err(text: &str) -> ScenarioError {
        parse(text).unwrap_err()
    }

    #[test]
    fn minimal_file_uses_defaults() {
        let s = parse(FLAT).unwrap();
        assert_eq!((s.algebroid.n(), s.algebroid.m()), (2, 2));
        assert!(s.spray.s.iter().all(Field::is_zero));
        assert_eq!(s.sampling, Sampling::default());
        assert_eq!(s.sampling.points, 100);
        assert_eq!(s.sampling.seed, 42);
        assert_eq!(s.options.tol, 1e-8);
        assert!(s.checks.is_empty());
    }

    #[test]
    fn spray_arity_error_names_the_key() {
        let e = err(&format!("{FLAT}S[3] = \"y1\"\n"));
        assert_eq!(e.line, 7);
        assert!(matches!(&e.kind, ErrorKind::Arity { key, .. } if key == "S[3]"), "{e}");
    }

    #[test]
    fn check_list() {
        let text = format!("{FLAT}[section eta]\ncomp[1] = \"-x2\"\ncomp[2] = \"x1\"\n[check]\nkind = \"lie_symmetry\"\nsection = \"eta\"\n");
        let s = parse(&text).unwrap();
        assert_eq!(s.checks.len(), 1);
        assert_eq!(s.checks[0].kind, CheckKind::LieSymmetry);
        assert_eq!(s.checks[0].section, "eta");
    }

    #[test]
    fn undeclared_section() {
        let e = err(&format!("{FLAT}[check]\nkind = \"collineation\"\nsection = \"zeta\"\n"));
        assert_eq!(e.kind, ErrorKind::UndeclaredSection("zeta".into()));
        assert_eq!(e.line, 9);
    }

    #[test]
    fn structure_functions_only_above_the_diagonal() {
        let e = err("[algebroid]\nn = 0\nm = 2\nL[1][2,1] = \"1\"\n[spray]\n");
        assert!(matches!(e.kind, ErrorKind::Arity { .. }), "{e}");
        let e = err("[algebroid]\nn = 0\nm = 2\nL[1][1,2] = \"1\"\nL[1][1,2] = \"2\"\n[spray]\n");
        assert!(matches!(e.kind, ErrorKind::Duplicate(_)), "{e}");
        let s = parse("[algebroid]\nn = 0\nm = 2\nL[1][1,2] = \"1\"\n[spray]\n").unwrap();
        assert_eq!(s.algebroid.l(0, 1, 0).as_constant(), Some(-1.0));
    }

    #[test]
    fn expression_errors_are_located() {
        let e = err(&format!("{FLAT}S[1] = \"y1 + * y2\"\n"));
        assert_eq!(e.line, 7);
        assert!(matches!(e.kind, ErrorKind::Expression { .. }));
        assert!(e.column > 9, "{e}");
        let e = err(&format!("{FLAT}S[1] = \"y3\"\n"));
        assert!(matches!(e.kind, ErrorKind::Expression { .. }), "{e}");
    }

    #[test]
    fn anchors_must_not_depend_on_the_fiber() {
        let e = err("[algebroid]\nn = 1\nm = 1\nrho[1][1] = \"y1\"\n[spray]\n");
        assert_eq!(e.kind, ErrorKind::FiberDependence("rho[1][1]".into()));
    }

    #[test]
    fn strict_keys_and_blocks() {
        assert!(matches!(err(&format!("{FLAT}colour = \"red\"\n")).kind, ErrorKind::UnknownKey { .. }));
        assert!(matches!(err(&format!("{FLAT}[extras]\n")).kind, ErrorKind::UnknownBlock(_)));
        assert!(matches!(err("[spray]\n").kind, ErrorKind::Missing(_)));
        assert!(matches!(err("n = 2\n").kind, ErrorKind::Syntax(_)));
        assert!(matches!(err(&format!("{FLAT}[sampling]\npoints = 0\n")).kind, ErrorKind::Value { .. }));
    }

    #[test]
    fn comments_and_quotes() {
        let text = format!("# header\n{FLAT}S[1] = \"y1*y2\"  # trailing\n[sampling]\nx_range = [-2, 2]\nseed = 7\n");
        let s = parse(&text).unwrap();
        assert_eq!((s.sampling.x_min, s.sampling.x_max, s.sampling.seed), (-2.0, 2.0, 7));
    }
}
