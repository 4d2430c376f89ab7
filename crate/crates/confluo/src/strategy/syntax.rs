//! Strategy config files: `N = s` definitions over the strategy grammar.
//!
//! Binding, tightest first: postfix (`?` `*` `+` `!` `n*` `[f]` `[f]*`),
//! then `;`, then `|`, then `||`.

use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Modifier {
    NoNo,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Strategy {
    /// Processor call or reference to a definition; resolved at evaluation.
    Call { name: String, args: Vec<String> },
    Seq(Box<Strategy>, Box<Strategy>),
    Choice(Box<Strategy>, Box<Strategy>),
    Par(Box<Strategy>, Box<Strategy>),
    If { pred: String, then: Box<Strategy>, els: Box<Strategy> },
    Opt(Box<Strategy>),
    Star(Box<Strategy>),
    Plus(Box<Strategy>),
    IterN(Box<Strategy>, u32),
    IterTimed(Box<Strategy>, f64),
    Bang(Box<Strategy>),
    Timed(Box<Strategy>, f64),
    Modified(Box<Strategy>, Modifier),
}

impl Strategy {
    pub fn call(name: &str) -> Strategy {
        Strategy::Call { name: name.to_string(), args: Vec::new() }
    }

    /// Every `Call` node, in source order.
    pub fn calls(&self) -> Vec<(&str, &[String])> {
        let mut out = Vec::new();
        self.walk(&mut |s| {
            if let Strategy::Call { name, args } = s {
                out.push((name.as_str(), args.as_slice()));
            }
        });
        out
    }

    fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Strategy)) {
        f(self);
        match self {
            Strategy::Call { .. } => {}
            Strategy::Seq(a, b) | Strategy::Choice(a, b) | Strategy::Par(a, b) => {
                a.walk(f);
                b.walk(f);
            }
            Strategy::If { then, els, .. } => {
                then.walk(f);
                els.walk(f);
            }
            Strategy::Opt(s)
            | Strategy::Star(s)
            | Strategy::Plus(s)
            | Strategy::IterN(s, _)
            | Strategy::IterTimed(s, _)
            | Strategy::Bang(s)
            | Strategy::Timed(s, _)
            | Strategy::Modified(s, _) => s.walk(f),
        }
    }
}

/// Fully parenthesised form; parses back to the same tree.
impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Strategy::Call { name, args } => {
                f.write_str(name)?;
                for a in args {
                    write!(f, " {a}")?;
                }
                Ok(())
            }
            Strategy::Seq(a, b) => write!(f, "({a};{b})"),
            Strategy::Choice(a, b) => write!(f, "({a} | {b})"),
            Strategy::Par(a, b) => write!(f, "({a} || {b})"),
            Strategy::If { pred, then, els } => write!(f, "(if {pred} then {then} else {els})"),
            Strategy::Opt(s) => write!(f, "({s})?"),
            Strategy::Star(s) => write!(f, "({s})*"),
            Strategy::Plus(s) => write!(f, "({s})+"),
            Strategy::IterN(s, n) => write!(f, "({s}){n}*"),
            Strategy::IterTimed(s, t) => write!(f, "({s})[{t}]*"),
            Strategy::Bang(s) => write!(f, "({s})!"),
            Strategy::Timed(s, t) => write!(f, "({s})[{t}]"),
            Strategy::Modified(s, Modifier::NoNo) => write!(f, "{{{s}}}nono"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct StrategyDefs {
    order: Vec<String>,
    defs: BTreeMap<String, Strategy>,
}

impl StrategyDefs {
    pub fn get(&self, name: &str) -> Option<&Strategy> {
        self.defs.get(name)
    }

    pub fn names(&self) -> &[String] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Default entry point: the last definition.
    pub fn default_entry(&self) -> Option<&str> {
        self.order.last().map(|s| s.as_str())
    }

    pub fn insert(&mut self, name: &str, s: Strategy) {
        if self.defs.insert(name.to_string(), s).is_none() {
            self.order.push(name.to_string());
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Strategy)> {
        self.order.iter().map(|n| (n.as_str(), &self.defs[n]))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("line {line}, column {col}: {msg}")]
pub struct SyntaxError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Flag(String),
    Num(String),
    /// Digits immediately followed by `*`.
    Count(u32),
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Semi,
    Bar,
    BarBar,
    Question,
    Star,
    Plus,
    Bang,
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    col: usize,
    /// No whitespace between this token and the previous one.
    glued: bool,
}

fn lex(line: &str, line_no: usize, first_col: &[usize]) -> Result<Vec<Spanned>, SyntaxError> {
    let chars: Vec<char> = line.chars().collect();
    let col_of = |i: usize| first_col.get(i).copied().unwrap_or(i + 1);
    let err = |i: usize, msg: String| SyntaxError { line: line_no, col: col_of(i), msg };
    let mut out: Vec<Spanned> = Vec::new();
    let mut i = 0;
    let mut glued = false;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            glued = false;
            continue;
        }
        let start = i;
        let ident_char = |c: char| c.is_alphanumeric() || c == '_' || c == '-' || c == '\'';
        let tok = match c {
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '[' => Tok::LBracket,
            ']' => Tok::RBracket,
            '{' => Tok::LBrace,
            '}' => Tok::RBrace,
            ';' => Tok::Semi,
            '?' => Tok::Question,
            '*' => Tok::Star,
            '+' => Tok::Plus,
            '!' => Tok::Bang,
            '|' if chars.get(i + 1) == Some(&'|') => {
                i += 1;
                Tok::BarBar
            }
            '|' => Tok::Bar,
            '-' if chars.get(i + 1).is_some_and(|d| d.is_ascii_digit()) => {
                i += 1;
                while i + 1 < chars.len() && (chars[i + 1].is_ascii_digit() || chars[i + 1] == '.') {
                    i += 1;
                }
                Tok::Num(chars[start..=i].iter().collect())
            }
            '-' if chars.get(i + 1).is_some_and(|d| d.is_alphabetic()) => {
                while i + 1 < chars.len() && ident_char(chars[i + 1]) {
                    i += 1;
                }
                Tok::Flag(chars[start + 1..=i].iter().collect())
            }
            d if d.is_ascii_digit() => {
                while i + 1 < chars.len() && (chars[i + 1].is_ascii_digit() || chars[i + 1] == '.') {
                    i += 1;
                }
                let text: String = chars[start..=i].iter().collect();
                if chars.get(i + 1) == Some(&'*') && !text.contains('.') {
                    i += 1;
                    let n = text.parse().map_err(|_| err(start, format!("bad count `{text}`")))?;
                    Tok::Count(n)
                } else {
                    Tok::Num(text)
                }
            }
            a if a.is_alphabetic() || a == '_' => {
                while i + 1 < chars.len() && ident_char(chars[i + 1]) {
                    i += 1;
                }
                let text: String = chars[start..=i].iter().collect();
                // `name3*` is `name` iterated three times.
                let digits = text.chars().rev().take_while(|c| c.is_ascii_digit()).count();
                if chars.get(i + 1) == Some(&'*') && digits > 0 && digits < text.len() {
                    let (head, count) = text.split_at(text.len() - digits);
                    out.push(Spanned { tok: Tok::Ident(head.to_string()), col: col_of(start), glued });
                    i += 1;
                    let n = count.parse().map_err(|_| err(start, format!("bad count `{count}`")))?;
                    out.push(Spanned { tok: Tok::Count(n), col: col_of(start + head.len()), glued: true });
                    i += 1;
                    glued = true;
                    continue;
                }
                Tok::Ident(text)
            }
            other => return Err(err(i, format!("unexpected character `{other}`"))),
        };
        out.push(Spanned { tok, col: col_of(start), glued });
        glued = true;
        i += 1;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    at: usize,
    line: usize,
    end_col: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|s| &s.tok)
    }

    fn peek_glued(&self) -> bool {
        self.toks.get(self.at).is_some_and(|s| s.glued)
    }

    fn err(&self, msg: impl Into<String>) -> SyntaxError {
        let col = self.toks.get(self.at).map(|s| s.col).unwrap_or(self.end_col);
        SyntaxError { line: self.line, col, msg: msg.into() }
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<(), SyntaxError> {
        if self.peek() == Some(&t) {
            self.at += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected {what}")))
        }
    }

    fn par(&mut self) -> Result<Strategy, SyntaxError> {
        let mut s = self.choice()?;
        while self.peek() == Some(&Tok::BarBar) {
            self.at += 1;
            s = Strategy::Par(Box::new(s), Box::new(self.choice()?));
        }
        Ok(s)
    }

    fn choice(&mut self) -> Result<Strategy, SyntaxError> {
        let mut s = self.seq()?;
        while self.peek() == Some(&Tok::Bar) {
            self.at += 1;
            s = Strategy::Choice(Box::new(s), Box::new(self.seq()?));
        }
        Ok(s)
    }

    fn seq(&mut self) -> Result<Strategy, SyntaxError> {
        let mut s = self.postfix()?;
        while self.peek() == Some(&Tok::Semi) {
            self.at += 1;
            s = Strategy::Seq(Box::new(s), Box::new(self.postfix()?));
        }
        Ok(s)
    }

    fn seconds(&mut self) -> Result<f64, SyntaxError> {
        let v = match self.peek() {
            Some(Tok::Num(n)) => n.parse::<f64>().ok(),
            _ => None,
        }
        .filter(|v| *v > 0.0 && v.is_finite())
        .ok_or_else(|| self.err("expected a positive number of seconds"))?;
        self.at += 1;
        self.expect(Tok::RBracket, "`]`")?;
        Ok(v)
    }

    fn postfix(&mut self) -> Result<Strategy, SyntaxError> {
        let mut s = self.primary()?;
        loop {
            match self.peek() {
                Some(Tok::Question) => s = Strategy::Opt(Box::new(s)),
                Some(Tok::Plus) => s = Strategy::Plus(Box::new(s)),
                Some(Tok::Bang) => s = Strategy::Bang(Box::new(s)),
                Some(Tok::Count(n)) => {
                    if *n == 0 {
                        return Err(self.err("iteration count must be at least 1"));
                    }
                    s = Strategy::IterN(Box::new(s), *n);
                }
                Some(Tok::Star) => {
                    self.at += 1;
                    // `s*[f]` is read as `s[f]*`.
                    if self.peek() == Some(&Tok::LBracket) && self.peek_glued() {
                        self.at += 1;
                        s = Strategy::IterTimed(Box::new(s), self.seconds()?);
                    } else {
                        s = Strategy::Star(Box::new(s));
                    }
                    continue;
                }
                Some(Tok::LBracket) => {
                    self.at += 1;
                    let f = self.seconds()?;
                    if self.peek() == Some(&Tok::Star) && self.peek_glued() {
                        self.at += 1;
                        s = Strategy::IterTimed(Box::new(s), f);
                    } else {
                        s = Strategy::Timed(Box::new(s), f);
                    }
                    continue;
                }
                _ => return Ok(s),
            }
            self.at += 1;
        }
    }

    fn primary(&mut self) -> Result<Strategy, SyntaxError> {
        match self.peek().cloned() {
            Some(Tok::LParen) => {
                self.at += 1;
                let s = self.par()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(s)
            }
            Some(Tok::LBrace) => {
                self.at += 1;
                let s = self.par()?;
                self.expect(Tok::RBrace, "`}`")?;
                match self.peek() {
                    Some(Tok::Ident(m)) if m == "nono" => {
                        self.at += 1;
                        Ok(Strategy::Modified(Box::new(s), Modifier::NoNo))
                    }
                    Some(Tok::Ident(m)) => Err(self.err(format!("unsupported modifier `{m}`"))),
                    _ => Err(self.err("expected a modifier after `}`")),
                }
            }
            Some(Tok::Ident(k)) if k == "if" => {
                self.at += 1;
                let pred = match self.peek() {
                    Some(Tok::Ident(p)) if p != "then" => p.clone(),
                    _ => return Err(self.err("expected a predicate")),
                };
                self.at += 1;
                self.keyword("then")?;
                let then = self.par()?;
                self.keyword("else")?;
                let els = self.par()?;
                Ok(Strategy::If { pred, then: Box::new(then), els: Box::new(els) })
            }
            Some(Tok::Ident(k)) if k == "then" || k == "else" => Err(self.err(format!("unexpected `{k}`"))),
            Some(Tok::Ident(name)) => {
                self.at += 1;
                let mut args = Vec::new();
                while let Some(Tok::Flag(f)) = self.peek().cloned() {
                    self.at += 1;
                    args.push(format!("-{f}"));
                    if let Some(Tok::Num(v)) = self.peek().cloned() {
                        self.at += 1;
                        args.push(v);
                    }
                }
                Ok(Strategy::Call { name, args })
            }
            Some(_) => Err(self.err("expected a strategy")),
            None => Err(self.err("unexpected end of strategy")),
        }
    }

    fn keyword(&mut self, k: &str) -> Result<(), SyntaxError> {
        match self.peek() {
            Some(Tok::Ident(x)) if x == k => {
                self.at += 1;
                Ok(())
            }
            _ => Err(self.err(format!("expected `{k}`"))),
        }
    }
}

/// Parses one strategy expression.
pub fn parse_expr(text: &str) -> Result<Strategy, SyntaxError> {
    let cols: Vec<usize> = (1..=text.chars().count()).collect();
    parse_logical(text, 1, &cols)
}

fn parse_logical(text: &str, line: usize, cols: &[usize]) -> Result<Strategy, SyntaxError> {
    let toks = lex(text, line, cols)?;
    let end_col = cols.last().map(|c| c + 1).unwrap_or(1);
    let mut p = Parser { toks, at: 0, line, end_col };
    let s = p.par()?;
    if p.at < p.toks.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(s)
}

/// Parses a config file. Lines ending in `\` continue on the next line;
/// `#` starts a comment.
pub fn parse_strategy(text: &str) -> Result<StrategyDefs, SyntaxError> {
    let mut defs = StrategyDefs::default();
    let lines: Vec<&str> = text.lines().collect();
    let mut i = 0;
    while i < lines.len() {
        let start_line = i + 1;
        // Logical line and, per char, its physical column.
        let mut logical = String::new();
        let mut cols: Vec<usize> = Vec::new();
        let mut line_of_first = start_line;
        loop {
            let raw = lines[i];
            let body = raw.split('#').next().unwrap_or("");
            let trimmed = body.trim_end();
            let (content, cont) = match trimmed.strip_suffix('\\') {
                Some(c) => (c, true),
                None => (trimmed, false),
            };
            if logical.trim().is_empty() {
                line_of_first = i + 1;
            }
            for (k, ch) in content.chars().enumerate() {
                logical.push(ch);
                cols.push(k + 1);
            }
            logical.push(' ');
            cols.push(content.chars().count() + 1);
            i += 1;
            if !cont || i >= lines.len() {
                break;
            }
        }
        if logical.trim().is_empty() {
            continue;
        }
        let Some(eq) = logical.find('=') else {
            return Err(SyntaxError { line: line_of_first, col: 1, msg: "expected `NAME = strategy`".into() });
        };
        let name = logical[..eq].trim();
        if name.is_empty() || !name.chars().all(|c| c.is_alphanumeric() || c == '_') {
            return Err(SyntaxError { line: line_of_first, col: 1, msg: format!("bad definition name `{name}`") });
        }
        if defs.get(name).is_some() {
            return Err(SyntaxError { line: line_of_first, col: 1, msg: format!("`{name}` defined twice") });
        }
        let char_eq = logical[..eq].chars().count();
        let body: String = logical.chars().skip(char_eq + 1).collect();
        let s = parse_logical(&body, line_of_first, &cols[char_eq + 1..])?;
        defs.insert(name, s);
    }
    Ok(defs)
}
