//! Function-free first-order models: predicates, weighted formulas, and the
//! model file format.
//!
//! A model file is UTF-8 text. `#` starts a comment. The first content line
//! declares the domain, either `domain <k>` (constants auto-named `C1..Ck`)
//! or `constants <c1> <c2> ...`. Every following non-blank line is
//! `<weight><whitespace><formula>` where the formula grammar uses predicate
//! names `[A-Z][A-Za-z0-9_]*`, logical variables `[a-z][A-Za-z0-9_]*`, and
//! the connectives `!`, `&`, `|`, `=>`, `<=>` in decreasing binding order,
//! with `=>` and `<=>` right-associative. Formulas contain no constants;
//! an upper-case argument is rejected.

use alloc::borrow::ToOwned;
use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// A declared predicate. Predicates are inferred from their first use and
/// keep the arity of that first use.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Predicate {
    pub name: String,
    pub arity: u8,
}

pub type PredId = u16;
pub type VarId = u8;

/// An atom inside a first-order formula: a predicate applied to logical
/// variables (never constants).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Atom {
    pub pred: PredId,
    pub args: Vec<VarId>,
}

/// Connective tree over leaves of type `L`. First-order formulas use
/// `Expr<Atom>`; ground formulas use `Expr<AtomId>`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr<L> {
    Leaf(L),
    Not(Box<Expr<L>>),
    And(Box<Expr<L>>, Box<Expr<L>>),
    Or(Box<Expr<L>>, Box<Expr<L>>),
    Implies(Box<Expr<L>>, Box<Expr<L>>),
    Iff(Box<Expr<L>>, Box<Expr<L>>),
}

pub type Formula = Expr<Atom>;

impl<L> Expr<L> {
    /// Truth-functional evaluation with leaf values supplied by `f`.
    pub fn eval_with(&self, f: &mut impl FnMut(&L) -> bool) -> bool {
        match self {
            Expr::Leaf(l) => f(l),
            Expr::Not(e) => !e.eval_with(f),
            Expr::And(a, b) => a.eval_with(f) && b.eval_with(f),
            Expr::Or(a, b) => a.eval_with(f) || b.eval_with(f),
            Expr::Implies(a, b) => !a.eval_with(f) || b.eval_with(f),
            Expr::Iff(a, b) => a.eval_with(f) == b.eval_with(f),
        }
    }

    pub fn map_leaves<M>(&self, f: &mut impl FnMut(&L) -> M) -> Expr<M> {
        match self {
            Expr::Leaf(l) => Expr::Leaf(f(l)),
            Expr::Not(e) => Expr::Not(Box::new(e.map_leaves(f))),
            Expr::And(a, b) => Expr::And(Box::new(a.map_leaves(f)), Box::new(b.map_leaves(f))),
            Expr::Or(a, b) => Expr::Or(Box::new(a.map_leaves(f)), Box::new(b.map_leaves(f))),
            Expr::Implies(a, b) => {
                Expr::Implies(Box::new(a.map_leaves(f)), Box::new(b.map_leaves(f)))
            }
            Expr::Iff(a, b) => Expr::Iff(Box::new(a.map_leaves(f)), Box::new(b.map_leaves(f))),
        }
    }

    pub fn for_each_leaf(&self, f: &mut impl FnMut(&L)) {
        match self {
            Expr::Leaf(l) => f(l),
            Expr::Not(e) => e.for_each_leaf(f),
            Expr::And(a, b) | Expr::Or(a, b) | Expr::Implies(a, b) | Expr::Iff(a, b) => {
                a.for_each_leaf(f);
                b.for_each_leaf(f);
            }
        }
    }
}

/// One `(weight, formula)` line of the model. `vars` lists the formula's
/// logical variable names in order of first occurrence; grounding
/// substitutes constants for them in lexicographic order of that tuple.
#[derive(Clone, Debug)]
pub struct WeightedFormula {
    pub weight: f64,
    pub formula: Formula,
    pub vars: Vec<String>,
}

/// A weighted first-order model over a finite domain of constants.
#[derive(Clone, Debug)]
pub struct MlnModel {
    pub predicates: Vec<Predicate>,
    pub formulas: Vec<WeightedFormula>,
    pub constants: Vec<String>,
}

impl MlnModel {
    pub fn domain_size(&self) -> usize {
        self.constants.len()
    }

    pub fn pred_id(&self, name: &str) -> Option<PredId> {
        self.predicates
            .iter()
            .position(|p| p.name == name)
            .map(|i| i as PredId)
    }

    pub fn constant_id(&self, name: &str) -> Option<u16> {
        self.constants.iter().position(|c| c == name).map(|i| i as u16)
    }

    pub fn parse(text: &str) -> Result<MlnModel, ParseError> {
        parse_model(text)
    }
}

/// Parse failure with 1-based line and column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub kind: ParseKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseKind {
    MissingDomain,
    EmptyDomain,
    DuplicateConstant(String),
    BadDomainSize(String),
    BadConstantName(String),
    BadWeight(String),
    ConstantInFormula(String),
    ArityMismatch { name: String, declared: u8, found: u8 },
    TooManyVariables,
    TooManyPredicates,
    Syntax(String),
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, col {}: ", self.line, self.col)?;
        match &self.kind {
            ParseKind::MissingDomain => write!(f, "expected a `domain <k>` or `constants ...` declaration"),
            ParseKind::EmptyDomain => write!(f, "the domain must contain at least one constant"),
            ParseKind::DuplicateConstant(c) => write!(f, "duplicate constant `{c}`"),
            ParseKind::BadDomainSize(s) => write!(f, "invalid domain size `{s}`"),
            ParseKind::BadConstantName(s) => write!(f, "invalid constant name `{s}`"),
            ParseKind::BadWeight(s) => write!(f, "invalid weight `{s}` (weights are finite reals)"),
            ParseKind::ConstantInFormula(c) => {
                write!(f, "constant `{c}` inside a formula; formulas range over logical variables only")
            }
            ParseKind::ArityMismatch { name, declared, found } => {
                write!(f, "predicate `{name}` used with arity {found} but declared with arity {declared}")
            }
            ParseKind::TooManyVariables => write!(f, "too many distinct logical variables in one formula"),
            ParseKind::TooManyPredicates => write!(f, "too many predicates"),
            ParseKind::Syntax(msg) => write!(f, "{msg}"),
        }
    }
}

impl core::error::Error for ParseError {}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

fn is_pred_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_uppercase())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn parse_model(text: &str) -> Result<MlnModel, ParseError> {
    let mut constants: Option<Vec<String>> = None;
    let mut predicates: Vec<Predicate> = Vec::new();
    let mut pred_ids: BTreeMap<String, PredId> = BTreeMap::new();
    let mut formulas: Vec<WeightedFormula> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = strip_comment(raw);
        if line.trim().is_empty() {
            continue;
        }
        if constants.is_none() {
            constants = Some(parse_domain_line(line, line_no)?);
            continue;
        }

        // weight token, then the formula
        let trimmed_start = line.len() - line.trim_start().len();
        let content = line.trim_start();
        let weight_len = content
            .find(char::is_whitespace)
            .ok_or(ParseError {
                line: line_no,
                col: trimmed_start + 1,
                kind: ParseKind::Syntax("expected `<weight> <formula>`".to_owned()),
            })?;
        let weight_tok = &content[..weight_len];
        let weight: f64 = weight_tok.parse().map_err(|_| ParseError {
            line: line_no,
            col: trimmed_start + 1,
            kind: ParseKind::BadWeight(weight_tok.to_owned()),
        })?;
        if !weight.is_finite() {
            return Err(ParseError {
                line: line_no,
                col: trimmed_start + 1,
                kind: ParseKind::BadWeight(weight_tok.to_owned()),
            });
        }

        let formula_src = &content[weight_len..];
        let formula_col = trimmed_start + weight_len + 1;
        let tokens = lex_formula(formula_src, line_no, formula_col)?;
        let mut parser = FormulaParser {
            tokens,
            pos: 0,
            line: line_no,
            predicates: &mut predicates,
            pred_ids: &mut pred_ids,
            vars: Vec::new(),
        };
        let formula = parser.parse_formula()?;
        parser.expect_end()?;
        let vars = parser.vars;
        formulas.push(WeightedFormula { weight, formula, vars });
    }

    let constants = constants.ok_or(ParseError {
        line: 1,
        col: 1,
        kind: ParseKind::MissingDomain,
    })?;

    Ok(MlnModel {
        predicates,
        formulas,
        constants,
    })
}

fn parse_domain_line(line: &str, line_no: usize) -> Result<Vec<String>, ParseError> {
    let mut toks = line.split_whitespace();
    let head = toks.next().unwrap_or("");
    match head {
        "domain" => {
            let size_tok = toks.next().ok_or(ParseError {
                line: line_no,
                col: 1,
                kind: ParseKind::BadDomainSize(String::new()),
            })?;
            if toks.next().is_some() {
                return Err(ParseError {
                    line: line_no,
                    col: 1,
                    kind: ParseKind::Syntax("unexpected tokens after domain size".to_owned()),
                });
            }
            let k: u64 = size_tok.parse().map_err(|_| ParseError {
                line: line_no,
                col: 1,
                kind: ParseKind::BadDomainSize(size_tok.to_owned()),
            })?;
            if k == 0 {
                return Err(ParseError {
                    line: line_no,
                    col: 1,
                    kind: ParseKind::EmptyDomain,
                });
            }
            if k > u16::MAX as u64 {
                return Err(ParseError {
                    line: line_no,
                    col: 1,
                    kind: ParseKind::BadDomainSize(size_tok.to_owned()),
                });
            }
            Ok((1..=k).map(|i| format!("C{i}")).collect())
        }
        "constants" => {
            let mut out: Vec<String> = Vec::new();
            for c in toks {
                if !is_pred_name(c) {
                    return Err(ParseError {
                        line: line_no,
                        col: 1,
                        kind: ParseKind::BadConstantName(c.to_owned()),
                    });
                }
                if out.iter().any(|have| have == c) {
                    return Err(ParseError {
                        line: line_no,
                        col: 1,
                        kind: ParseKind::DuplicateConstant(c.to_owned()),
                    });
                }
                out.push(c.to_owned());
            }
            if out.is_empty() {
                return Err(ParseError {
                    line: line_no,
                    col: 1,
                    kind: ParseKind::EmptyDomain,
                });
            }
            if out.len() > u16::MAX as usize {
                return Err(ParseError {
                    line: line_no,
                    col: 1,
                    kind: ParseKind::EmptyDomain,
                });
            }
            Ok(out)
        }
        _ => Err(ParseError {
            line: line_no,
            col: 1,
            kind: ParseKind::MissingDomain,
        }),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    Comma,
    Bang,
    Amp,
    Pipe,
    Arrow,
    DArrow,
}

#[derive(Clone, Debug)]
struct SpannedTok {
    tok: Tok,
    col: usize,
}

fn lex_formula(src: &str, line: usize, col_base: usize) -> Result<Vec<SpannedTok>, ParseError> {
    let mut out = Vec::new();
    let bytes = src.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let col = col_base + i;
        match c {
            ' ' | '\t' => {
                i += 1;
            }
            '(' => {
                out.push(SpannedTok { tok: Tok::LParen, col });
                i += 1;
            }
            ')' => {
                out.push(SpannedTok { tok: Tok::RParen, col });
                i += 1;
            }
            ',' => {
                out.push(SpannedTok { tok: Tok::Comma, col });
                i += 1;
            }
            '!' => {
                out.push(SpannedTok { tok: Tok::Bang, col });
                i += 1;
            }
            '&' => {
                out.push(SpannedTok { tok: Tok::Amp, col });
                i += 1;
            }
            '|' => {
                out.push(SpannedTok { tok: Tok::Pipe, col });
                i += 1;
            }
            '=' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    out.push(SpannedTok { tok: Tok::Arrow, col });
                    i += 2;
                } else {
                    return Err(ParseError {
                        line,
                        col,
                        kind: ParseKind::Syntax("expected `=>`".to_owned()),
                    });
                }
            }
            '<' => {
                if bytes.get(i + 1) == Some(&b'=') && bytes.get(i + 2) == Some(&b'>') {
                    out.push(SpannedTok { tok: Tok::DArrow, col });
                    i += 3;
                } else {
                    return Err(ParseError {
                        line,
                        col,
                        kind: ParseKind::Syntax("expected `<=>`".to_owned()),
                    });
                }
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len()
                    && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                out.push(SpannedTok {
                    tok: Tok::Ident(src[start..i].to_owned()),
                    col,
                });
            }
            other => {
                return Err(ParseError {
                    line,
                    col,
                    kind: ParseKind::Syntax(format!("unexpected character `{other}`")),
                });
            }
        }
    }
    Ok(out)
}

struct FormulaParser<'a> {
    tokens: Vec<SpannedTok>,
    pos: usize,
    line: usize,
    predicates: &'a mut Vec<Predicate>,
    pred_ids: &'a mut BTreeMap<String, PredId>,
    vars: Vec<String>,
}

impl FormulaParser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|t| &t.tok)
    }

    fn cur_col(&self) -> usize {
        self.tokens
            .get(self.pos)
            .or_else(|| self.tokens.last())
            .map(|t| t.col)
            .unwrap_or(1)
    }

    fn bump(&mut self) -> Option<SpannedTok> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn err(&self, msg: &str) -> ParseError {
        ParseError {
            line: self.line,
            col: self.cur_col(),
            kind: ParseKind::Syntax(msg.to_owned()),
        }
    }

    fn expect_end(&self) -> Result<(), ParseError> {
        if self.pos == self.tokens.len() {
            Ok(())
        } else {
            Err(self.err("unexpected trailing tokens"))
        }
    }

    fn parse_formula(&mut self) -> Result<Formula, ParseError> {
        self.parse_iff()
    }

    fn parse_iff(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.parse_implies()?;
        if matches!(self.peek(), Some(Tok::DArrow)) {
            self.bump();
            let rhs = self.parse_iff()?;
            Ok(Expr::Iff(Box::new(lhs), Box::new(rhs)))
        } else {
            Ok(lhs)
        }
    }

    fn parse_implies(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.parse_or()?;
        if matches!(self.peek(), Some(Tok::Arrow)) {
            self.bump();
            let rhs = self.parse_implies()?;
            Ok(Expr::Implies(Box::new(lhs), Box::new(rhs)))
        } else {
            Ok(lhs)
        }
    }

    fn parse_or(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.parse_and()?;
        while matches!(self.peek(), Some(Tok::Pipe)) {
            self.bump();
            let rhs = self.parse_and()?;
            lhs = Expr::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn parse_and(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.parse_unary()?;
        while matches!(self.peek(), Some(Tok::Amp)) {
            self.bump();
            let rhs = self.parse_unary()?;
            lhs = Expr::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn parse_unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Some(Tok::Bang) => {
                self.bump();
                let inner = self.parse_unary()?;
                Ok(Expr::Not(Box::new(inner)))
            }
            Some(Tok::LParen) => {
                self.bump();
                let inner = self.parse_iff()?;
                match self.peek() {
                    Some(Tok::RParen) => {
                        self.bump();
                        Ok(inner)
                    }
                    _ => Err(self.err("expected `)`")),
                }
            }
            Some(Tok::Ident(_)) => self.parse_atom(),
            _ => Err(self.err("expected a formula")),
        }
    }

    fn parse_atom(&mut self) -> Result<Formula, ParseError> {
        let (name, name_col) = match self.bump() {
            Some(SpannedTok { tok: Tok::Ident(s), col }) => (s, col),
            _ => return Err(self.err("expected a predicate")),
        };
        if !name.starts_with(|c: char| c.is_ascii_uppercase()) {
            return Err(ParseError {
                line: self.line,
                col: name_col,
                kind: ParseKind::Syntax(format!("predicate names start upper-case, got `{name}`")),
            });
        }
        if !matches!(self.peek(), Some(Tok::LParen)) {
            return Err(self.err("expected `(` after predicate name"));
        }
        self.bump();
        let mut args: Vec<VarId> = Vec::new();
        loop {
            match self.bump() {
                Some(SpannedTok { tok: Tok::Ident(arg), col }) => {
                    if arg.starts_with(|c: char| c.is_ascii_uppercase()) {
                        return Err(ParseError {
                            line: self.line,
                            col,
                            kind: ParseKind::ConstantInFormula(arg),
                        });
                    }
                    let id = match self.vars.iter().position(|v| *v == arg) {
                        Some(i) => i,
                        None => {
                            self.vars.push(arg);
                            self.vars.len() - 1
                        }
                    };
                    if id > VarId::MAX as usize {
                        return Err(ParseError {
                            line: self.line,
                            col,
                            kind: ParseKind::TooManyVariables,
                        });
                    }
                    args.push(id as VarId);
                }
                _ => return Err(self.err("expected a logical variable")),
            }
            match self.bump() {
                Some(SpannedTok { tok: Tok::Comma, .. }) => continue,
                Some(SpannedTok { tok: Tok::RParen, .. }) => break,
                _ => return Err(self.err("expected `,` or `)`")),
            }
        }
        let arity = args.len();
        if arity == 0 || arity > u8::MAX as usize {
            return Err(ParseError {
                line: self.line,
                col: name_col,
                kind: ParseKind::Syntax(format!("predicate `{name}` needs between 1 and 255 arguments")),
            });
        }
        let pred = match self.pred_ids.get(&name) {
            Some(&id) => {
                let declared = self.predicates[id as usize].arity;
                if declared as usize != arity {
                    return Err(ParseError {
                        line: self.line,
                        col: name_col,
                        kind: ParseKind::ArityMismatch {
                            name,
                            declared,
                            found: arity as u8,
                        },
                    });
                }
                id
            }
            None => {
                if self.predicates.len() >= PredId::MAX as usize {
                    return Err(ParseError {
                        line: self.line,
                        col: name_col,
                        kind: ParseKind::TooManyPredicates,
                    });
                }
                let id = self.predicates.len() as PredId;
                self.predicates.push(Predicate {
                    name: name.clone(),
                    arity: arity as u8,
                });
                self.pred_ids.insert(name, id);
                id
            }
        };
        Ok(Expr::Leaf(Atom { pred, args }))
    }
}

// ---- serialization ----------------------------------------------------

fn prec(f: &Formula) -> u8 {
    match f {
        Expr::Iff(..) => 0,
        Expr::Implies(..) => 1,
        Expr::Or(..) => 2,
        Expr::And(..) => 3,
        Expr::Not(..) => 4,
        Expr::Leaf(..) => 5,
    }
}

fn fmt_formula(
    f: &fmt::Formatter<'_>,
    out: &mut String,
    expr: &Formula,
    model: &MlnModel,
    vars: &[String],
    min_prec: u8,
) -> fmt::Result {
    let _ = f;
    let p = prec(expr);
    if p < min_prec {
        out.push('(');
    }
    match expr {
        Expr::Leaf(a) => {
            out.push_str(&model.predicates[a.pred as usize].name);
            out.push('(');
            for (i, v) in a.args.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&vars[*v as usize]);
            }
            out.push(')');
        }
        Expr::Not(e) => {
            out.push('!');
            fmt_formula(f, out, e, model, vars, 4)?;
        }
        Expr::And(a, b) => {
            fmt_formula(f, out, a, model, vars, 3)?;
            out.push_str(" & ");
            fmt_formula(f, out, b, model, vars, 4)?;
        }
        Expr::Or(a, b) => {
            fmt_formula(f, out, a, model, vars, 2)?;
            out.push_str(" | ");
            fmt_formula(f, out, b, model, vars, 3)?;
        }
        Expr::Implies(a, b) => {
            fmt_formula(f, out, a, model, vars, 2)?;
            out.push_str(" => ");
            fmt_formula(f, out, b, model, vars, 1)?;
        }
        Expr::Iff(a, b) => {
            fmt_formula(f, out, a, model, vars, 1)?;
            out.push_str(" <=> ");
            fmt_formula(f, out, b, model, vars, 0)?;
        }
    }
    if p < min_prec {
        out.push(')');
    }
    Ok(())
}

impl fmt::Display for MlnModel {
    /// Writes the model back in the model file format; parsing the output
    /// reproduces a structurally identical model.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "constants")?;
        for c in &self.constants {
            write!(f, " {c}")?;
        }
        writeln!(f)?;
        for wf in &self.formulas {
            let mut s = String::new();
            fmt_formula(f, &mut s, &wf.formula, self, &wf.vars, 0)?;
            writeln!(f, "{}\t{}", wf.weight, s)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn smokers1() -> &'static str {
        "domain 2\n1.5\tSmokes(x)\n"
    }

    fn friends_smokers() -> &'static str {
        "constants A B\n\
         1.3\tSmokes(x) => Cancer(x)\n\
         1.5\tSmokes(x) & Friends(x,y) => Smokes(y)\n"
    }

    #[test]
    fn parses_minimal_model() {
        let m = MlnModel::parse(smokers1()).unwrap();
        assert_eq!(m.predicates.len(), 1);
        assert_eq!(m.formulas.len(), 1);
        assert_eq!(m.domain_size(), 2);
        assert_eq!(m.constants, vec!["C1".to_string(), "C2".to_string()]);
    }

    #[test]
    fn parses_two_formula_social_model() {
        let m = MlnModel::parse(friends_smokers()).unwrap();
        assert_eq!(m.predicates.len(), 3);
        assert_eq!(m.predicates[0], Predicate { name: "Smokes".into(), arity: 1 });
        assert_eq!(m.predicates[1], Predicate { name: "Cancer".into(), arity: 1 });
        assert_eq!(m.predicates[2], Predicate { name: "Friends".into(), arity: 2 });
        assert_eq!(m.formulas[0].weight, 1.3);
        assert_eq!(m.formulas[1].weight, 1.5);
        assert_eq!(m.formulas[1].vars, vec!["x".to_string(), "y".to_string()]);
    }

    #[test]
    fn rejects_constant_in_formula() {
        let err = MlnModel::parse("domain 2\n1.5\tSmokes(A)\n").unwrap_err();
        assert!(matches!(err.kind, ParseKind::ConstantInFormula(ref c) if c == "A"));
        assert_eq!(err.line, 2);
    }

    #[test]
    fn rejects_missing_domain() {
        let err = MlnModel::parse("1.5\tSmokes(x)\n").unwrap_err();
        assert_eq!(err.kind, ParseKind::MissingDomain);
    }

    #[test]
    fn rejects_empty_and_oversized_domains() {
        assert_eq!(
            MlnModel::parse("domain 0\n").unwrap_err().kind,
            ParseKind::EmptyDomain
        );
        assert!(MlnModel::parse("constants\n").is_err());
    }

    #[test]
    fn rejects_arity_mismatch() {
        let err = MlnModel::parse("domain 2\n1.0\tP(x)\n2.0\tP(x,y)\n").unwrap_err();
        assert!(matches!(
            err.kind,
            ParseKind::ArityMismatch { declared: 1, found: 2, .. }
        ));
        assert_eq!(err.line, 3);
    }

    #[test]
    fn reports_syntax_error_position() {
        let err = MlnModel::parse("domain 2\n1.0\tP(x) &\n").unwrap_err();
        assert_eq!(err.line, 2);
        assert!(matches!(err.kind, ParseKind::Syntax(_)));
    }

    #[test]
    fn rejects_non_finite_weights() {
        assert!(MlnModel::parse("domain 1\ninf\tP(x)\n").is_err());
        assert!(MlnModel::parse("domain 1\nnan\tP(x)\n").is_err());
    }

    #[test]
    fn duplicate_formula_lines_both_kept() {
        let m = MlnModel::parse("domain 2\n1.0\tP(x)\n1.0\tP(x)\n").unwrap();
        assert_eq!(m.formulas.len(), 2);
    }

    #[test]
    fn comments_and_blank_lines_ignored() {
        let m = MlnModel::parse("# header comment\n\ndomain 2 # inline\n\n1.0\tP(x) # trailing\n").unwrap();
        assert_eq!(m.formulas.len(), 1);
    }

    fn eval_closed(src: &str, vals: &[(&str, bool)]) -> bool {
        let m = MlnModel::parse(src).unwrap();
        let wf = &m.formulas[0];
        wf.formula.eval_with(&mut |a: &Atom| {
            let key = &wf.vars[a.args[0] as usize];
            vals.iter().find(|(v, _)| v == key).unwrap().1
        })
    }

    #[test]
    fn connective_precedence() {
        // ! binds tighter than &: !a & b == (!a) & b
        assert!(!eval_closed("domain 1\n1.0\t!P(a) & P(b)\n", &[("a", true), ("b", true)]));
        // & tighter than |: a | b & c == a | (b & c)
        assert!(eval_closed(
            "domain 1\n1.0\tP(a) | P(b) & P(c)\n",
            &[("a", true), ("b", false), ("c", false)]
        ));
        // | tighter than =>: a => b | c == a => (b | c)
        assert!(eval_closed(
            "domain 1\n1.0\tP(a) => P(b) | P(c)\n",
            &[("a", true), ("b", false), ("c", true)]
        ));
    }

    #[test]
    fn implication_right_associative() {
        // a => b => c parsed as a => (b => c): with a=1, b=1, c=0 it is false;
        // the left-associative reading (a => b) => c would also be false, so
        // discriminate with a=0, b=1, c=0: right-assoc true, left-assoc false.
        assert!(eval_closed(
            "domain 1\n1.0\tP(a) => P(b) => P(c)\n",
            &[("a", false), ("b", true), ("c", false)]
        ));
    }

    #[test]
    fn serialize_reparse_round_trip() {
        let m = MlnModel::parse(friends_smokers()).unwrap();
        let text = m.to_string();
        let m2 = MlnModel::parse(&text).unwrap();
        assert_eq!(m.constants, m2.constants);
        assert_eq!(m.predicates, m2.predicates);
        assert_eq!(m.formulas.len(), m2.formulas.len());
        for (a, b) in m.formulas.iter().zip(m2.formulas.iter()) {
            assert_eq!(a.weight, b.weight);
            assert_eq!(a.formula, b.formula);
            assert_eq!(a.vars, b.vars);
        }
    }

    #[test]
    fn parenthesized_round_trip_preserves_shape() {
        let src = "domain 2\n-0.25\t(P(x) => Q(x)) => (P(x) <=> !Q(x))\n";
        let m = MlnModel::parse(src).unwrap();
        let m2 = MlnModel::parse(&m.to_string()).unwrap();
        assert_eq!(m.formulas[0].formula, m2.formulas[0].formula);
    }
}
