//! Hand-written parser for the circuit grammar.
//!
//! The grammar is line-oriented with no nesting, so parsing is a single pass
//! that also tracks label liveness: duplicate declarations, use of undeclared
//! or consumed labels, and `term` arity mismatches are all caught here with
//! exact source positions.

use std::collections::{HashMap, HashSet};

use num_complex::Complex64 as C64;

use crate::state::ModeLabel;

use super::{AmpMultiplier, CircuitProgram, ParseError, ReportTarget, Statement, StatementKind};

const KEYWORDS: &[&str] = &[
    "alpha",
    "modes",
    "term",
    "prep_ecp1_input",
    "prep_ecp1_anc",
    "prep_ecp2_input",
    "prep_ecp2_twomode",
    "prep_ecp2_g",
    "bs",
    "bsvac",
    "swap",
    "selectvac",
    "projvac",
    "discard",
    "normalize",
    "assert_terms",
    "assert_prob_ge",
    "report",
    "on",
    "sqrt2",
    "ecp1",
    "ecp2",
];

struct Token {
    column: usize,
    text: String,
}

fn tokenize(line: &str) -> Vec<Token> {
    let mut tokens = Vec::new();
    let mut current: Option<Token> = None;
    for (i, ch) in line.chars().enumerate() {
        if ch == '#' {
            break;
        }
        if ch.is_whitespace() {
            if let Some(tok) = current.take() {
                tokens.push(tok);
            }
        } else {
            current
                .get_or_insert_with(|| Token { column: i + 1, text: String::new() })
                .text
                .push(ch);
        }
    }
    if let Some(tok) = current.take() {
        tokens.push(tok);
    }
    tokens
}

/// Cursor over one statement line.
struct Cursor<'a> {
    line: usize,
    tokens: &'a [Token],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn err(&self, column: usize, token: &str, message: impl Into<String>) -> ParseError {
        ParseError { line: self.line, column, message: message.into(), token: token.to_owned() }
    }

    /// Error anchored at the statement keyword (used when a token is missing).
    fn err_at_keyword(&self, message: impl Into<String>) -> ParseError {
        let kw = &self.tokens[0];
        self.err(kw.column, &kw.text, message)
    }

    fn next(&mut self, what: &str) -> Result<&'a Token, ParseError> {
        match self.tokens.get(self.pos) {
            Some(tok) => {
                self.pos += 1;
                Ok(tok)
            }
            None => Err(self.err_at_keyword(format!("missing {what}"))),
        }
    }

    fn peek(&self) -> Option<&'a Token> {
        self.tokens.get(self.pos)
    }

    fn finish(&self) -> Result<(), ParseError> {
        match self.tokens.get(self.pos) {
            None => Ok(()),
            Some(extra) => Err(self.err(extra.column, &extra.text, "unexpected trailing token")),
        }
    }

    fn float(&mut self, what: &str) -> Result<f64, ParseError> {
        let tok = self.next(what)?;
        let value: f64 = tok
            .text
            .parse()
            .map_err(|_| self.err(tok.column, &tok.text, format!("expected a number for {what}")))?;
        if !value.is_finite() {
            return Err(self.err(tok.column, &tok.text, format!("{what} must be finite")));
        }
        Ok(value)
    }

    fn integer(&mut self, what: &str) -> Result<usize, ParseError> {
        let tok = self.next(what)?;
        tok.text
            .parse()
            .map_err(|_| self.err(tok.column, &tok.text, format!("expected an integer for {what}")))
    }

    fn expect(&mut self, literal: &str) -> Result<(), ParseError> {
        let tok = self.next(&format!("`{literal}`"))?;
        if tok.text == literal {
            Ok(())
        } else {
            Err(self.err(tok.column, &tok.text, format!("expected `{literal}`")))
        }
    }
}

fn is_label_shaped(text: &str) -> bool {
    let mut chars = text.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Label-liveness bookkeeping shared by all statements.
struct Registry {
    declared: HashMap<String, usize>,
    live: HashSet<String>,
}

impl Registry {
    fn new() -> Self {
        Registry { declared: HashMap::new(), live: HashSet::new() }
    }

    fn label_token<'a>(cur: &mut Cursor<'a>, what: &str) -> Result<&'a Token, ParseError> {
        let tok = cur.next(what)?;
        if !is_label_shaped(&tok.text) || KEYWORDS.contains(&tok.text.as_str()) {
            return Err(cur.err(tok.column, &tok.text, format!("expected a mode label for {what}")));
        }
        Ok(tok)
    }

    fn declare(&mut self, cur: &mut Cursor, what: &str) -> Result<ModeLabel, ParseError> {
        let tok = Self::label_token(cur, what)?;
        if let Some(first) = self.declared.get(&tok.text) {
            return Err(cur.err(
                tok.column,
                &tok.text,
                format!("mode `{}` already declared on line {first}", tok.text),
            ));
        }
        self.declared.insert(tok.text.clone(), cur.line);
        self.live.insert(tok.text.clone());
        Ok(ModeLabel::new(tok.text.clone()))
    }

    fn use_live(&self, cur: &mut Cursor, what: &str) -> Result<ModeLabel, ParseError> {
        let tok = Self::label_token(cur, what)?;
        if !self.declared.contains_key(&tok.text) {
            return Err(cur.err(tok.column, &tok.text, format!("mode `{}` used before declaration", tok.text)));
        }
        if !self.live.contains(&tok.text) {
            return Err(cur.err(
                tok.column,
                &tok.text,
                format!("mode `{}` has already been consumed", tok.text),
            ));
        }
        Ok(ModeLabel::new(tok.text.clone()))
    }

    fn consume(&mut self, label: &ModeLabel) {
        self.live.remove(label.as_str());
    }
}

/// Parse a complete program; the first failure is returned with its location.
pub fn parse_circuit(source: &str, source_name: &str) -> Result<CircuitProgram, ParseError> {
    let mut registry = Registry::new();
    let mut statements: Vec<Statement> = Vec::new();
    let mut alpha: Option<(f64, usize)> = None;
    let mut state_prepared = false;

    for (line_idx, raw_line) in source.lines().enumerate() {
        let line = line_idx + 1;
        let tokens = tokenize(raw_line);
        if tokens.is_empty() {
            continue;
        }
        let mut cur = Cursor { line, tokens: &tokens, pos: 0 };
        let head = cur.next("statement")?;
        let kind = match head.text.as_str() {
            "alpha" => {
                let value = cur.float("alpha")?;
                if value <= 0.0 {
                    return Err(cur.err_at_keyword("alpha must be strictly positive"));
                }
                if let Some((_, prev)) = alpha {
                    return Err(cur.err_at_keyword(format!("alpha already set on line {prev}")));
                }
                if state_prepared {
                    return Err(cur.err_at_keyword("alpha must precede state preparations"));
                }
                cur.finish()?;
                alpha = Some((value, line));
                continue;
            }
            "modes" => {
                let mut labels = Vec::new();
                while cur.peek().is_some() {
                    labels.push(registry.declare(&mut cur, "mode declaration")?);
                }
                if labels.is_empty() {
                    return Err(cur.err_at_keyword("`modes` needs at least one label"));
                }
                StatementKind::DeclareModes(labels)
            }
            "term" => {
                let re = cur.float("coefficient real part")?;
                let im = cur.float("coefficient imaginary part")?;
                cur.expect(":")?;
                let mut multipliers = Vec::new();
                while let Some(tok) = cur.peek() {
                    cur.pos += 1;
                    let mult = match tok.text.as_str() {
                        "sqrt2" => AmpMultiplier::Sqrt2,
                        "-sqrt2" => AmpMultiplier::NegSqrt2,
                        text => {
                            let v: f64 = text.parse().map_err(|_| {
                                cur.err(tok.column, text, "expected a multiplier (decimal, sqrt2, or -sqrt2)")
                            })?;
                            if !v.is_finite() {
                                return Err(cur.err(tok.column, text, "multiplier must be finite"));
                            }
                            AmpMultiplier::Value(v)
                        }
                    };
                    multipliers.push(mult);
                }
                let expected = registry.live.len();
                if expected == 0 {
                    return Err(cur.err_at_keyword("`term` requires declared modes"));
                }
                if multipliers.len() != expected {
                    return Err(cur.err_at_keyword(format!(
                        "term lists {} multipliers for {expected} live modes",
                        multipliers.len()
                    )));
                }
                state_prepared = true;
                StatementKind::Term { coefficient: C64::new(re, im), multipliers }
            }
            "prep_ecp1_input" => {
                let beta = cur.float("beta")?;
                let gamma = cur.float("gamma")?;
                cur.expect("on")?;
                let modes = prep_labels::<4>(&registry, &mut cur)?;
                state_prepared = true;
                StatementKind::PrepEcp1Input { beta, gamma, modes }
            }
            "prep_ecp1_anc" => {
                let beta = cur.float("beta")?;
                let gamma = cur.float("gamma")?;
                cur.expect("on")?;
                let [mode] = prep_labels::<1>(&registry, &mut cur)?;
                state_prepared = true;
                StatementKind::PrepEcp1Ancilla { beta, gamma, mode }
            }
            "prep_ecp2_input" => {
                let [beta, gamma, delta, eta] = ecp2_coefficients(&mut cur)?;
                cur.expect("on")?;
                let modes = prep_labels::<4>(&registry, &mut cur)?;
                state_prepared = true;
                StatementKind::PrepEcp2Input { beta, gamma, delta, eta, modes }
            }
            "prep_ecp2_twomode" => {
                let [beta, gamma, delta, eta] = ecp2_coefficients(&mut cur)?;
                cur.expect("on")?;
                let modes = prep_labels::<2>(&registry, &mut cur)?;
                state_prepared = true;
                StatementKind::PrepEcp2TwoMode { beta, gamma, delta, eta, modes }
            }
            "prep_ecp2_g" => {
                let [beta, gamma, delta, eta] = ecp2_coefficients(&mut cur)?;
                cur.expect("on")?;
                let [mode] = prep_labels::<1>(&registry, &mut cur)?;
                state_prepared = true;
                StatementKind::PrepEcp2G { beta, gamma, delta, eta, mode }
            }
            "bs" => {
                let i = registry.use_live(&mut cur, "first input mode")?;
                let j = registry.use_live(&mut cur, "second input mode")?;
                if i == j {
                    return Err(cur.err_at_keyword("beam splitter inputs must differ"));
                }
                cur.expect("->")?;
                registry.consume(&i);
                registry.consume(&j);
                let out_i = registry.declare(&mut cur, "first output mode")?;
                let out_j = registry.declare(&mut cur, "second output mode")?;
                StatementKind::BeamSplitter { inputs: [i, j], outputs: [out_i, out_j] }
            }
            "bsvac" => {
                let input = registry.use_live(&mut cur, "input mode")?;
                cur.expect("->")?;
                registry.consume(&input);
                let out_1 = registry.declare(&mut cur, "first output mode")?;
                let out_2 = registry.declare(&mut cur, "second output mode")?;
                StatementKind::BeamSplitterVacuum { input, outputs: [out_1, out_2] }
            }
            "swap" => {
                let i = registry.use_live(&mut cur, "first mode")?;
                let j = registry.use_live(&mut cur, "second mode")?;
                if i == j {
                    return Err(cur.err_at_keyword("swap modes must differ"));
                }
                StatementKind::Swap(i, j)
            }
            "selectvac" => {
                let mut labels = Vec::new();
                while cur.peek().is_some() {
                    let label = registry.use_live(&mut cur, "post-selection mode")?;
                    if labels.contains(&label) {
                        return Err(cur.err_at_keyword(format!("mode `{label}` listed twice")));
                    }
                    labels.push(label);
                }
                if labels.is_empty() {
                    return Err(cur.err_at_keyword("`selectvac` needs at least one mode"));
                }
                for label in &labels {
                    registry.consume(label);
                }
                StatementKind::SelectVacuum(labels)
            }
            "projvac" => {
                let label = registry.use_live(&mut cur, "projection mode")?;
                registry.consume(&label);
                StatementKind::ProjectVacuum(label)
            }
            "discard" => {
                let label = registry.use_live(&mut cur, "discarded mode")?;
                registry.consume(&label);
                StatementKind::Discard(label)
            }
            "normalize" => StatementKind::Normalize,
            "assert_terms" => StatementKind::AssertTerms(cur.integer("expected term count")?),
            "assert_prob_ge" => StatementKind::AssertProbGe(cur.float("probability bound")?),
            "report" => {
                let target = match cur.peek() {
                    None => ReportTarget::None,
                    Some(tok) => {
                        cur.pos += 1;
                        match tok.text.as_str() {
                            "ecp1" => ReportTarget::Ecp1,
                            "ecp2" => ReportTarget::Ecp2,
                            other => {
                                return Err(cur.err(
                                    tok.column,
                                    other,
                                    "expected `ecp1` or `ecp2` after `report`",
                                ))
                            }
                        }
                    }
                };
                StatementKind::Report(target)
            }
            other => {
                return Err(cur.err(head.column, other, "unknown statement"));
            }
        };
        cur.finish()?;
        statements.push(Statement { line, kind });
    }

    Ok(CircuitProgram {
        alpha: alpha.map(|(v, _)| v).unwrap_or(1.0),
        statements,
        source_name: source_name.to_owned(),
    })
}

fn ecp2_coefficients(cur: &mut Cursor) -> Result<[f64; 4], ParseError> {
    Ok([
        cur.float("beta")?,
        cur.float("gamma")?,
        cur.float("delta")?,
        cur.float("eta")?,
    ])
}

fn prep_labels<const N: usize>(
    registry: &Registry,
    cur: &mut Cursor,
) -> Result<[ModeLabel; N], ParseError> {
    let mut labels = Vec::with_capacity(N);
    for _ in 0..N {
        let label = registry.use_live(cur, "preparation mode")?;
        if labels.contains(&label) {
            return Err(cur.err_at_keyword(format!("mode `{label}` listed twice")));
        }
        labels.push(label);
    }
    Ok(labels.try_into().expect("exactly N labels collected"))
}
