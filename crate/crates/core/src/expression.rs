//! Arithmetic expression language used for objective, metric and constraint
//! definitions.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! sum     := product (('+' | '-') product)*
//! product := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := atom ('^' unary)?
//! atom    := number | ident | ident '(' sum (',' sum)* ')' | '(' sum ')'
//! ```
//!
//! `^` is right associative and binds tighter than unary minus, so `-x^2`
//! is `-(x^2)` and `2^-1` is `2^(-1)`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Binary operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinaryOp {
    fn symbol(self) -> char {
        match self {
            BinaryOp::Add => '+',
            BinaryOp::Sub => '-',
            BinaryOp::Mul => '*',
            BinaryOp::Div => '/',
            BinaryOp::Pow => '^',
        }
    }
}

/// The closed set of callable functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Function {
    Min,
    Max,
    Abs,
    Tanh,
    Exp,
    Log,
    Sqrt,
}

impl Function {
    pub const ALL: [Function; 7] = [
        Function::Min,
        Function::Max,
        Function::Abs,
        Function::Tanh,
        Function::Exp,
        Function::Log,
        Function::Sqrt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Function::Min => "min",
            Function::Max => "max",
            Function::Abs => "abs",
            Function::Tanh => "tanh",
            Function::Exp => "exp",
            Function::Log => "log",
            Function::Sqrt => "sqrt",
        }
    }

    fn lookup(name: &str) -> Option<Function> {
        Function::ALL.into_iter().find(|f| f.name() == name)
    }

    /// `min` and `max` are variadic (at least two arguments); the rest are unary.
    fn accepts(self, argc: usize) -> bool {
        match self {
            Function::Min | Function::Max => argc >= 2,
            _ => argc == 1,
        }
    }
}

/// Parsed expression tree.
#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Literal(f64),
    Variable(String),
    Neg(Box<Node>),
    Binary(BinaryOp, Box<Node>, Box<Node>),
    Call(Function, Vec<Node>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unknown function `{name}` at position {position}")]
    UnknownFunction { name: String, position: usize },
    #[error("function `{name}` called with {argc} argument(s)")]
    Arity { name: &'static str, argc: usize },
    #[error("variable `{0}` is not bound")]
    UnboundVariable(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("log of non-positive value {0}")]
    LogDomain(String),
    #[error("sqrt of negative value {0}")]
    SqrtDomain(String),
}

impl ExprError {
    pub fn code(&self) -> &'static str {
        match self {
            ExprError::Syntax { .. } => "SYNTAX_ERROR",
            ExprError::UnknownFunction { .. } => "UNKNOWN_FUNCTION",
            ExprError::Arity { .. } => "ARITY_ERROR",
            ExprError::UnboundVariable(_) => "UNBOUND_VARIABLE",
            ExprError::DivisionByZero => "DIVISION_BY_ZERO",
            ExprError::LogDomain(_) => "LOG_DOMAIN",
            ExprError::SqrtDomain(_) => "SQRT_DOMAIN",
        }
    }
}

/// An expression together with the source text it was parsed from.
///
/// Serializes as its source string.
#[derive(Debug, Clone, PartialEq)]
pub struct Expression {
    source: String,
    root: Node,
}

impl Expression {
    pub fn parse(source: &str) -> Result<Self, ExprError> {
        let root = Parser::new(source).parse()?;
        Ok(Expression {
            source: source.to_owned(),
            root,
        })
    }

    /// Wraps a tree, using its printed form as the source.
    pub fn from_node(root: Node) -> Self {
        Expression {
            source: print(&root),
            root,
        }
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn evaluate(&self, bindings: &BTreeMap<String, f64>) -> Result<f64, ExprError> {
        evaluate(&self.root, &|name| bindings.get(name).copied())
    }

    /// Evaluates with a caller-supplied variable lookup.
    pub fn evaluate_with(&self, lookup: &dyn Fn(&str) -> Option<f64>) -> Result<f64, ExprError> {
        evaluate(&self.root, lookup)
    }

    /// Names of all referenced variables.
    pub fn variables(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        collect_variables(&self.root, &mut out);
        out
    }
}

impl FromStr for Expression {
    type Err = ExprError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Expression::parse(s)
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

impl Serialize for Expression {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.source)
    }
}

impl<'de> Deserialize<'de> for Expression {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let source = String::deserialize(deserializer)?;
        Expression::parse(&source).map_err(serde::de::Error::custom)
    }
}

fn collect_variables<'a>(node: &'a Node, out: &mut BTreeSet<&'a str>) {
    match node {
        Node::Literal(_) => {}
        Node::Variable(name) => {
            out.insert(name);
        }
        Node::Neg(inner) => collect_variables(inner, out),
        Node::Binary(_, lhs, rhs) => {
            collect_variables(lhs, out);
            collect_variables(rhs, out);
        }
        Node::Call(_, args) => args.iter().for_each(|a| collect_variables(a, out)),
    }
}

/// Evaluates a tree. Non-finite intermediate results propagate unchanged.
pub fn evaluate(node: &Node, lookup: &dyn Fn(&str) -> Option<f64>) -> Result<f64, ExprError> {
    Ok(match node {
        Node::Literal(v) => *v,
        Node::Variable(name) => lookup(name).ok_or_else(|| ExprError::UnboundVariable(name.clone()))?,
        Node::Neg(inner) => -evaluate(inner, lookup)?,
        Node::Binary(op, lhs, rhs) => {
            let a = evaluate(lhs, lookup)?;
            let b = evaluate(rhs, lookup)?;
            match op {
                BinaryOp::Add => a + b,
                BinaryOp::Sub => a - b,
                BinaryOp::Mul => a * b,
                BinaryOp::Div => {
                    if b == 0.0 {
                        return Err(ExprError::DivisionByZero);
                    }
                    a / b
                }
                BinaryOp::Pow => a.powf(b),
            }
        }
        Node::Call(func, args) => {
            let values = args
                .iter()
                .map(|a| evaluate(a, lookup))
                .collect::<Result<Vec<_>, _>>()?;
            match func {
                Function::Min => values.into_iter().reduce(f64::min).unwrap_or(f64::NAN),
                Function::Max => values.into_iter().reduce(f64::max).unwrap_or(f64::NAN),
                Function::Abs => values[0].abs(),
                Function::Tanh => values[0].tanh(),
                Function::Exp => values[0].exp(),
                Function::Log => {
                    let v = values[0];
                    if v <= 0.0 || v.is_nan() {
                        return Err(ExprError::LogDomain(v.to_string()));
                    }
                    v.ln()
                }
                Function::Sqrt => {
                    let v = values[0];
                    if v < 0.0 || v.is_nan() {
                        return Err(ExprError::SqrtDomain(v.to_string()));
                    }
                    v.sqrt()
                }
            }
        }
    })
}

// Binding strength used by the printer.
const PREC_SUM: u8 = 1;
const PREC_PRODUCT: u8 = 2;
const PREC_UNARY: u8 = 3;
const PREC_POWER: u8 = 4;
const PREC_ATOM: u8 = 5;

fn precedence(node: &Node) -> u8 {
    match node {
        Node::Binary(BinaryOp::Add | BinaryOp::Sub, ..) => PREC_SUM,
        Node::Binary(BinaryOp::Mul | BinaryOp::Div, ..) => PREC_PRODUCT,
        Node::Neg(_) => PREC_UNARY,
        Node::Binary(BinaryOp::Pow, ..) => PREC_POWER,
        Node::Literal(v) if v.is_sign_negative() => PREC_UNARY,
        _ => PREC_ATOM,
    }
}

/// Renders a tree with the minimal parentheses needed to reparse it to the
/// same tree.
pub fn print(node: &Node) -> String {
    let mut out = String::new();
    write_node(node, &mut out);
    out
}

fn write_wrapped(node: &Node, min_prec: u8, out: &mut String) {
    if precedence(node) < min_prec {
        out.push('(');
        write_node(node, out);
        out.push(')');
    } else {
        write_node(node, out);
    }
}

fn write_node(node: &Node, out: &mut String) {
    match node {
        Node::Literal(v) => write_literal(*v, out),
        Node::Variable(name) => out.push_str(name),
        Node::Neg(inner) => {
            out.push('-');
            write_wrapped(inner, PREC_UNARY, out);
        }
        Node::Binary(op, lhs, rhs) => {
            let (left_min, right_min) = match op {
                BinaryOp::Add => (PREC_SUM, PREC_PRODUCT),
                BinaryOp::Sub => (PREC_SUM, PREC_PRODUCT),
                BinaryOp::Mul | BinaryOp::Div => (PREC_PRODUCT, PREC_UNARY),
                // Left of `^` must be an atom; the right side is a unary.
                BinaryOp::Pow => (PREC_ATOM, PREC_UNARY),
            };
            write_wrapped(lhs, left_min, out);
            out.push(' ');
            out.push(op.symbol());
            out.push(' ');
            write_wrapped(rhs, right_min, out);
        }
        Node::Call(func, args) => {
            out.push_str(func.name());
            out.push('(');
            for (i, arg) in args.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_node(arg, out);
            }
            out.push(')');
        }
    }
}

fn write_literal(v: f64, out: &mut String) {
    // `{:?}` is the shortest representation that round-trips.
    let text = format!("{v:?}");
    out.push_str(text.strip_suffix(".0").unwrap_or(&text));
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Number(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    Comma,
    End,
}

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    source: &'a str,
    peeked: Option<(usize, Token)>,
}

impl<'a> Parser<'a> {
    fn new(source: &'a str) -> Self {
        Parser {
            chars: source.chars().collect(),
            pos: 0,
            source,
            peeked: None,
        }
    }

    fn parse(mut self) -> Result<Node, ExprError> {
        let node = self.sum()?;
        match self.next()? {
            (_, Token::End) => Ok(node),
            (position, token) => Err(syntax(position, format!("unexpected {}", describe(&token)))),
        }
    }

    fn sum(&mut self) -> Result<Node, ExprError> {
        let mut lhs = self.product()?;
        loop {
            let op = match self.peek()? {
                Token::Op('+') => BinaryOp::Add,
                Token::Op('-') => BinaryOp::Sub,
                _ => return Ok(lhs),
            };
            self.next()?;
            let rhs = self.product()?;
            lhs = Node::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn product(&mut self) -> Result<Node, ExprError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek()? {
                Token::Op('*') => BinaryOp::Mul,
                Token::Op('/') => BinaryOp::Div,
                _ => return Ok(lhs),
            };
            self.next()?;
            let rhs = self.unary()?;
            lhs = Node::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Node, ExprError> {
        if *self.peek()? == Token::Op('-') {
            self.next()?;
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node, ExprError> {
        let base = self.atom()?;
        if *self.peek()? == Token::Op('^') {
            self.next()?;
            let exponent = self.unary()?;
            return Ok(Node::Binary(BinaryOp::Pow, Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node, ExprError> {
        let (position, token) = self.next()?;
        match token {
            Token::Number(v) => Ok(Node::Literal(v)),
            Token::Ident(name) => {
                if *self.peek()? != Token::LParen {
                    return Ok(Node::Variable(name));
                }
                let func = Function::lookup(&name).ok_or(ExprError::UnknownFunction { name, position })?;
                self.next()?;
                let mut args = vec![self.sum()?];
                loop {
                    match self.next()? {
                        (_, Token::Comma) => args.push(self.sum()?),
                        (_, Token::RParen) => break,
                        (p, t) => return Err(syntax(p, format!("expected `,` or `)`, found {}", describe(&t)))),
                    }
                }
                if !func.accepts(args.len()) {
                    return Err(ExprError::Arity {
                        name: func.name(),
                        argc: args.len(),
                    });
                }
                Ok(Node::Call(func, args))
            }
            Token::LParen => {
                let inner = self.sum()?;
                match self.next()? {
                    (_, Token::RParen) => Ok(inner),
                    (p, t) => Err(syntax(p, format!("expected `)`, found {}", describe(&t)))),
                }
            }
            other => Err(syntax(
                position,
                format!("expected an operand, found {}", describe(&other)),
            )),
        }
    }

    fn peek(&mut self) -> Result<&Token, ExprError> {
        if self.peeked.is_none() {
            self.peeked = Some(self.lex()?);
        }
        Ok(&self.peeked.as_ref().expect("peeked token").1)
    }

    fn next(&mut self) -> Result<(usize, Token), ExprError> {
        match self.peeked.take() {
            Some(t) => Ok(t),
            None => self.lex(),
        }
    }

    fn lex(&mut self) -> Result<(usize, Token), ExprError> {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
        let start = self.pos;
        let Some(&c) = self.chars.get(self.pos) else {
            return Ok((start, Token::End));
        };
        self.pos += 1;
        let token = match c {
            '+' | '-' | '*' | '/' | '^' => Token::Op(c),
            '×' => Token::Op('*'),
            '÷' => Token::Op('/'),
            '−' => Token::Op('-'),
            '(' => Token::LParen,
            ')' => Token::RParen,
            ',' => Token::Comma,
            c if c.is_ascii_digit() || c == '.' => {
                self.pos = start;
                self.number()?
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                while self
                    .chars
                    .get(self.pos)
                    .is_some_and(|c| c.is_ascii_alphanumeric() || *c == '_')
                {
                    self.pos += 1;
                }
                Token::Ident(self.chars[start..self.pos].iter().collect())
            }
            other => return Err(syntax(start, format!("unexpected character `{other}`"))),
        };
        Ok((start, token))
    }

    fn number(&mut self) -> Result<Token, ExprError> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            while p.chars.get(p.pos).is_some_and(|c| c.is_ascii_digit()) {
                p.pos += 1;
            }
        };
        digits(self);
        if self.chars.get(self.pos) == Some(&'.') {
            self.pos += 1;
            digits(self);
        }
        if matches!(self.chars.get(self.pos), Some('e' | 'E')) {
            let mark = self.pos;
            self.pos += 1;
            if matches!(self.chars.get(self.pos), Some('+' | '-')) {
                self.pos += 1;
            }
            if self.chars.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
                digits(self);
            } else {
                self.pos = mark;
            }
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        text.parse::<f64>()
            .map(Token::Number)
            .map_err(|_| syntax(start, format!("malformed number `{text}` in `{}`", self.source)))
    }
}

fn syntax(position: usize, message: String) -> ExprError {
    ExprError::Syntax { position, message }
}

fn describe(token: &Token) -> String {
    match token {
        Token::Number(v) => format!("number {v}"),
        Token::Ident(name) => format!("`{name}`"),
        Token::Op(c) => format!("`{c}`"),
        Token::LParen => "`(`".into(),
        Token::RParen => "`)`".into(),
        Token::Comma => "`,`".into(),
        Token::End => "end of input".into(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn var(name: &str) -> Box<Node> {
        Box::new(Node::Variable(name.into()))
    }

    fn lit(v: f64) -> Box<Node> {
        Box::new(Node::Literal(v))
    }

    fn eval(src: &str, bindings: &[(&str, f64)]) -> Result<f64, ExprError> {
        let map = bindings.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        Expression::parse(src)?.evaluate(&map)
    }

    #[test]
    fn parses_power() {
        let e = Expression::parse("x^2").unwrap();
        assert_eq!(*e.root(), Node::Binary(BinaryOp::Pow, var("x"), lit(2.0)));
    }

    #[test]
    fn parses_parenthesized_base() {
        let e = Expression::parse("(x-2)^2").unwrap();
        let inner = Node::Binary(BinaryOp::Sub, var("x"), lit(2.0));
        assert_eq!(*e.root(), Node::Binary(BinaryOp::Pow, Box::new(inner), lit(2.0)));
    }

    #[test]
    fn incomplete_input_reports_position() {
        let err = Expression::parse("x +").unwrap_err();
        assert!(matches!(err, ExprError::Syntax { position: 3, .. }), "{err:?}");
    }

    #[test]
    fn precedence_rules() {
        assert_eq!(eval("-x^2", &[("x", 3.0)]).unwrap(), -9.0);
        assert_eq!(eval("2^-1", &[]).unwrap(), 0.5);
        assert_eq!(eval("2^3^2", &[]).unwrap(), 512.0);
        assert_eq!(eval("1 + 2 * 3", &[]).unwrap(), 7.0);
        assert_eq!(eval("8 / 4 / 2", &[]).unwrap(), 1.0);
        assert_eq!(eval("10 - 4 - 3", &[]).unwrap(), 3.0);
        assert_eq!(eval("-2 * 3", &[]).unwrap(), -6.0);
    }

    #[test]
    fn functions() {
        assert_eq!(eval("tanh(0)", &[]).unwrap(), 0.0);
        assert_eq!(eval("min(3, 1, 2)", &[]).unwrap(), 1.0);
        assert_eq!(eval("max(3, 1)", &[]).unwrap(), 3.0);
        assert_eq!(eval("abs(-4)", &[]).unwrap(), 4.0);
        assert_eq!(eval("sqrt(16)", &[]).unwrap(), 4.0);
        assert_eq!(eval("exp(0)", &[]).unwrap(), 1.0);
        assert_eq!(eval("log(1)", &[]).unwrap(), 0.0);
    }

    #[test]
    fn evaluates_square() {
        assert_eq!(eval("x^2", &[("x", 3.0)]).unwrap(), 9.0);
    }

    #[test]
    fn evaluation_errors_are_distinct() {
        assert_eq!(eval("1/x", &[("x", 0.0)]), Err(ExprError::DivisionByZero));
        assert_eq!(eval("y + 1", &[]), Err(ExprError::UnboundVariable("y".into())));
        assert!(matches!(eval("log(0)", &[]), Err(ExprError::LogDomain(_))));
        assert!(matches!(eval("sqrt(-1)", &[]), Err(ExprError::SqrtDomain(_))));
        let codes: BTreeSet<_> = [
            ExprError::DivisionByZero,
            ExprError::UnboundVariable("y".into()),
            ExprError::LogDomain("0".into()),
            ExprError::SqrtDomain("-1".into()),
        ]
        .iter()
        .map(ExprError::code)
        .collect();
        assert_eq!(codes.len(), 4);
    }

    #[test]
    fn overflow_is_returned_as_is() {
        assert_eq!(eval("exp(1000)", &[]).unwrap(), f64::INFINITY);
    }

    #[test]
    fn unknown_function_and_arity() {
        assert!(matches!(
            Expression::parse("sin(x)"),
            Err(ExprError::UnknownFunction { position: 0, .. })
        ));
        assert!(matches!(Expression::parse("min(1)"), Err(ExprError::Arity { .. })));
        assert!(matches!(Expression::parse("abs(1, 2)"), Err(ExprError::Arity { .. })));
    }

    #[test]
    fn syntax_errors() {
        for src in ["", "(", "x y", "1 +* 2", "max(1,", "3 $ 4", "()"] {
            assert!(matches!(Expression::parse(src), Err(ExprError::Syntax { .. })), "{src}");
        }
    }

    #[test]
    fn numbers_with_exponents() {
        assert_eq!(eval("1e3", &[]).unwrap(), 1000.0);
        assert_eq!(eval("2.5E-1", &[]).unwrap(), 0.25);
        assert_eq!(eval(".5", &[]).unwrap(), 0.5);
    }

    #[test]
    fn unicode_operators() {
        assert_eq!(eval("6 × 2 ÷ 3 − 1", &[]).unwrap(), 3.0);
    }

    #[test]
    fn printer_keeps_structure() {
        for src in [
            "(x - 2)^2",
            "-x^2",
            "(-x)^2",
            "a - (b - c)",
            "a / (b * c)",
            "2^3^2",
            "(2^3)^2",
            "-(-x)",
        ] {
            let e = Expression::parse(src).unwrap();
            let printed = print(e.root());
            assert_eq!(
                Expression::parse(&printed).unwrap().root(),
                e.root(),
                "{src} -> {printed}"
            );
        }
    }

    #[test]
    fn variables_are_collected() {
        let e = Expression::parse("a * max(b, a) + c^2").unwrap();
        assert_eq!(e.variables().into_iter().collect::<Vec<_>>(), vec!["a", "b", "c"]);
    }
}
