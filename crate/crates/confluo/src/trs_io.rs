//! `.trs` problem files: `(VAR …)` and `(RULES …)` plus opaque directives.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use confluo_core::term::{name, RuleError, TrsError};
use confluo_core::{Name, Rule, Term, Trs};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProblemFile {
    pub trs: Trs,
    /// Unknown directives such as `(COMMENT …)`, verbatim.
    pub comments: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax(String),
    ArityConflict { symbol: String, first: usize, second: usize },
    VariableLhs(String),
    FreshRhsVariable { var: String, rule: String },
    VariableAsFunction(String),
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{col}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::Syntax(m) => write!(f, "syntax error: {m}"),
            ParseErrorKind::ArityConflict { symbol, first, second } => {
                write!(f, "arity conflict: `{symbol}` used with {first} and {second} arguments")
            }
            ParseErrorKind::VariableLhs(r) => write!(f, "variable left-hand side in `{r}`"),
            ParseErrorKind::FreshRhsVariable { var, rule } => {
                write!(f, "variable `{var}` of the right-hand side is not in the left-hand side of `{rule}`")
            }
            ParseErrorKind::VariableAsFunction(v) => write!(f, "variable `{v}` applied to arguments"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Pos {
    byte: usize,
    line: usize,
    col: usize,
}

struct Cursor<'a> {
    src: &'a str,
    at: Pos,
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str) -> Self {
        Cursor { src, at: Pos { byte: 0, line: 1, col: 1 } }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.at.byte..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.at.byte += c.len_utf8();
        if c == '\n' {
            self.at.line += 1;
            self.at.col = 1;
        } else {
            self.at.col += 1;
        }
        Some(c)
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.bump();
        }
    }

    fn err(&self, at: Pos, kind: ParseErrorKind) -> ParseError {
        ParseError { line: at.line, col: at.col, kind }
    }

    fn syntax(&self, msg: impl Into<String>) -> ParseError {
        self.err(self.at, ParseErrorKind::Syntax(msg.into()))
    }

    fn ident(&mut self) -> Result<(String, Pos), ParseError> {
        self.skip_ws();
        let start = self.at;
        while self.peek().is_some_and(is_ident_char) {
            self.bump();
        }
        if self.at.byte == start.byte {
            return Err(match self.peek() {
                Some(c) => self.syntax(format!("expected identifier, found `{c}`")),
                None => self.syntax("expected identifier, found end of input"),
            });
        }
        Ok((self.src[start.byte..self.at.byte].to_string(), start))
    }

    /// Skips to just after the `)` closing an already consumed `(`.
    fn skip_balanced(&mut self, open: Pos) -> Result<(), ParseError> {
        let mut depth = 1;
        while let Some(c) = self.bump() {
            match c {
                '(' => depth += 1,
                ')' => {
                    depth -= 1;
                    if depth == 0 {
                        return Ok(());
                    }
                }
                _ => {}
            }
        }
        Err(self.err(open, ParseErrorKind::Syntax("unclosed `(`".into())))
    }
}

struct RuleParser<'v> {
    vars: &'v BTreeSet<String>,
    arities: BTreeMap<String, usize>,
}

impl RuleParser<'_> {
    fn term(&mut self, c: &mut Cursor<'_>) -> Result<Term, ParseError> {
        let (id, at) = c.ident()?;
        c.skip_ws();
        let mut args = Vec::new();
        let applied = c.peek() == Some('(');
        if applied {
            c.bump();
            c.skip_ws();
            if c.peek() == Some(')') {
                c.bump();
            } else {
                loop {
                    args.push(self.term(c)?);
                    c.skip_ws();
                    match c.bump() {
                        Some(',') => continue,
                        Some(')') => break,
                        Some(other) => return Err(c.syntax(format!("expected `,` or `)`, found `{other}`"))),
                        None => return Err(c.syntax("unexpected end of input in argument list")),
                    }
                }
            }
        }
        if self.vars.contains(&id) {
            if applied {
                return Err(c.err(at, ParseErrorKind::VariableAsFunction(id)));
            }
            return Ok(Term::var(&id));
        }
        match self.arities.get(&id) {
            Some(&first) if first != args.len() => {
                return Err(c.err(at, ParseErrorKind::ArityConflict { symbol: id, first, second: args.len() }));
            }
            _ => {
                self.arities.insert(id.clone(), args.len());
            }
        }
        Ok(Term::app(&id, args))
    }

    fn rules(&mut self, c: &mut Cursor<'_>) -> Result<Vec<Rule>, ParseError> {
        let mut out = Vec::new();
        loop {
            c.skip_ws();
            match c.peek() {
                Some(')') => {
                    c.bump();
                    return Ok(out);
                }
                None => return Err(c.syntax("unclosed `(RULES`")),
                _ => {}
            }
            c.skip_ws();
            let start = c.at;
            let lhs = self.term(c)?;
            c.skip_ws();
            if !c.src[c.at.byte..].starts_with("->") {
                return Err(c.syntax("expected `->`"));
            }
            c.bump();
            c.bump();
            let rhs = self.term(c)?;
            let rule = Rule::new(lhs, rhs).map_err(|e| {
                let kind = match e {
                    RuleError::VariableLhs(l) => ParseErrorKind::VariableLhs(l.to_string()),
                    RuleError::FreshRhsVariable { var, rule } => {
                        ParseErrorKind::FreshRhsVariable { var: var.to_string(), rule }
                    }
                };
                c.err(start, kind)
            })?;
            out.push(rule);
        }
    }
}

/// Parses a problem file. The TRS is named `name`.
pub fn parse_problem(name_: &str, text: &str) -> Result<ProblemFile, ParseError> {
    let mut c = Cursor::new(text);
    let mut vars: BTreeSet<String> = BTreeSet::new();
    let mut rule_bodies: Vec<Pos> = Vec::new();
    let mut comments = Vec::new();
    loop {
        c.skip_ws();
        let open = c.at;
        match c.bump() {
            None => break,
            Some('(') => {}
            Some(other) => return Err(c.err(open, ParseErrorKind::Syntax(format!("expected `(`, found `{other}`")))),
        }
        let (kw, _) = c.ident()?;
        match kw.as_str() {
            "VAR" => loop {
                c.skip_ws();
                if c.peek() == Some(')') {
                    c.bump();
                    break;
                }
                let (v, _) = c.ident()?;
                vars.insert(v);
            },
            "RULES" => {
                let body = c.at;
                if let Err(unclosed) = c.skip_balanced(open) {
                    // A stray token inside the body is the likelier mistake; report it where it is.
                    let mut p = RuleParser { vars: &vars, arities: BTreeMap::new() };
                    let mut rc = Cursor { src: text, at: body };
                    return Err(p.rules(&mut rc).err().unwrap_or(unclosed));
                }
                rule_bodies.push(body);
            }
            _ => {
                c.skip_balanced(open)?;
                comments.push(text[open.byte..c.at.byte].to_string());
            }
        }
    }
    let mut p = RuleParser { vars: &vars, arities: BTreeMap::new() };
    let mut rules = Vec::new();
    for at in rule_bodies {
        let mut rc = Cursor { src: text, at };
        rules.extend(p.rules(&mut rc)?);
    }
    let declared: BTreeSet<Name> = vars.iter().map(|v| name(v)).collect();
    let trs = Trs::new(name_, declared, rules).map_err(|e| {
        let kind = match e {
            TrsError::ArityConflict { name, first, second } => {
                ParseErrorKind::ArityConflict { symbol: name.to_string(), first, second }
            }
            TrsError::VariableAsFunction(v) => ParseErrorKind::VariableAsFunction(v.to_string()),
            TrsError::Rule(r) => ParseErrorKind::Syntax(r.to_string()),
        };
        ParseError { line: 1, col: 1, kind }
    })?;
    Ok(ProblemFile { trs, comments })
}

pub fn parse_trs(text: &str) -> Result<Trs, ParseError> {
    parse_problem("", text).map(|p| p.trs)
}

/// Canonical layout; no trailing newline.
pub fn print_trs(trs: &Trs) -> String {
    let vars: Vec<&str> = trs.variables.iter().map(|v| &**v).collect();
    let mut out = if vars.is_empty() { String::from("(VAR)") } else { format!("(VAR {})", vars.join(" ")) };
    if trs.rules.is_empty() {
        out.push_str("\n(RULES)");
        return out;
    }
    out.push_str("\n(RULES\n");
    for r in &trs.rules {
        out.push_str(&format!("  {r}\n"));
    }
    out.push(')');
    out
}

pub fn print_problem(p: &ProblemFile) -> String {
    let mut out = print_trs(&p.trs);
    for c in &p.comments {
        out.push('\n');
        out.push_str(c);
    }
    out
}

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}:{source}")]
    Parse { path: String, source: ParseError },
}

/// Reads a problem; the TRS is named after the file stem.
pub fn load_problem(path: &Path) -> Result<ProblemFile, LoadError> {
    let shown = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io { path: shown.clone(), source })?;
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("");
    parse_problem(stem, &text).map_err(|source| LoadError::Parse { path: shown, source })
}

/// `.trs` files in `dir`, sorted by file name.
pub fn list_problems(dir: &Path) -> std::io::Result<Vec<std::path::PathBuf>> {
    let mut out: Vec<_> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "trs"))
        .collect();
    out.sort();
    Ok(out)
}
