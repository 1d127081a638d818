//! Recursive-descent parser for rule files. Type checking happens while the
//! tree is built so every error carries the position of the offending token.
//!
//! ```text
//! file    := rule*
//! rule    := "rule" IDENT "category" IDENT ("description" STRING)? ":" expr ";"?
//! expr    := and ("or" and)*
//! and     := not ("and" not)*
//! not     := "not" not | compare
//! compare := operand (OP operand)?
//! operand := "(" expr ")" | literal | IDENT "(" args ")" | IDENT
//! ```

use std::collections::HashSet;

use super::ast::{Call, Category, CmpOp, Expr, Literal, Type};
use super::error::{RuleError, RuleErrorKind};
use super::lexer::{tokenize, Pos, Spanned, Token};
use super::TriggerRule;
use crate::claims::{ClaimField, FieldKind};

const KEYWORDS: &[&str] = &[
    "rule",
    "category",
    "description",
    "and",
    "or",
    "not",
    "true",
    "false",
];

pub fn field_type(field: ClaimField) -> Type {
    match field.kind() {
        FieldKind::Text | FieldKind::Category => Type::Text,
        FieldKind::Date => Type::Date,
        FieldKind::Money => Type::Money,
        FieldKind::Integer => Type::Number,
    }
}

fn comparable(op: CmpOp, l: Type, r: Type) -> bool {
    use Type::*;
    match (l, r) {
        (Number, Number)
        | (Money, Money)
        | (Money, Number)
        | (Number, Money)
        | (Date, Date)
        | (Duration, Duration) => true,
        (Text, Text) | (Bool, Bool) => op.is_equality(),
        _ => false,
    }
}

struct Parser {
    tokens: Vec<Spanned>,
    at: usize,
}

type Typed = (Expr, Type, Pos);

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.at].token
    }

    fn pos(&self) -> Pos {
        self.tokens[self.at].pos
    }

    fn bump(&mut self) -> Spanned {
        let t = self.tokens[self.at].clone();
        if self.at + 1 < self.tokens.len() {
            self.at += 1;
        }
        t
    }

    fn is_keyword(&self, word: &str) -> bool {
        matches!(self.peek(), Token::Ident(w) if w == word)
    }

    fn syntax<T>(&self, expected: &str) -> Result<T, RuleError> {
        Err(RuleError::new(
            RuleErrorKind::Syntax,
            self.pos(),
            format!("expected {expected}, found {}", self.peek().describe()),
        ))
    }

    fn expect(&mut self, token: Token, expected: &str) -> Result<Pos, RuleError> {
        if *self.peek() == token {
            Ok(self.bump().pos)
        } else {
            self.syntax(expected)
        }
    }

    fn expect_keyword(&mut self, word: &str) -> Result<Pos, RuleError> {
        if self.is_keyword(word) {
            Ok(self.bump().pos)
        } else {
            self.syntax(&format!("`{word}`"))
        }
    }

    fn ident(&mut self, expected: &str) -> Result<(String, Pos), RuleError> {
        match self.peek().clone() {
            Token::Ident(w) if !KEYWORDS.contains(&w.as_str()) => {
                let pos = self.bump().pos;
                Ok((w, pos))
            }
            _ => self.syntax(expected),
        }
    }

    fn rule(&mut self) -> Result<(TriggerRule, Pos), RuleError> {
        self.expect_keyword("rule")?;
        let (id, id_pos) = self.ident("rule id")?;
        self.expect_keyword("category")?;
        let (cat, cat_pos) = self.ident("category name")?;
        let category = Category::from_name(&cat).ok_or_else(|| {
            RuleError::new(
                RuleErrorKind::Syntax,
                cat_pos,
                format!(
                    "unknown category `{cat}` (use fraud_abuse, process, eligibility or general)"
                ),
            )
        })?;
        let mut description = String::new();
        if self.is_keyword("description") {
            self.bump();
            match self.peek().clone() {
                Token::Text(s) => {
                    self.bump();
                    description = s;
                }
                _ => return self.syntax("description string"),
            }
        }
        self.expect(Token::Colon, "`:`")?;
        let (expression, ty, pos) = self.or_expr()?;
        if ty != Type::Bool {
            return Err(RuleError::new(
                RuleErrorKind::Type,
                pos,
                format!("rule condition must be bool, found {ty}"),
            ));
        }
        if *self.peek() == Token::Semicolon {
            self.bump();
        } else if !(self.is_keyword("rule") || *self.peek() == Token::Eof) {
            return self.syntax("`;`, `and`, `or` or the next rule");
        }
        Ok((
            TriggerRule {
                id,
                category,
                description,
                expression,
            },
            id_pos,
        ))
    }

    fn logical(
        &mut self,
        word: &str,
        next: fn(&mut Self) -> Result<Typed, RuleError>,
    ) -> Result<Typed, RuleError> {
        let first = next(self)?;
        if !self.is_keyword(word) {
            return Ok(first);
        }
        let start = first.2;
        let mut items = Vec::new();
        let mut operand = first;
        loop {
            if operand.1 != Type::Bool {
                return Err(RuleError::new(
                    RuleErrorKind::Type,
                    operand.2,
                    format!("operand of `{word}` must be bool, found {}", operand.1),
                ));
            }
            items.push(operand.0);
            if !self.is_keyword(word) {
                break;
            }
            self.bump();
            operand = next(self)?;
        }
        let expr = if word == "or" {
            Expr::Or(items)
        } else {
            Expr::And(items)
        };
        Ok((expr, Type::Bool, start))
    }

    fn or_expr(&mut self) -> Result<Typed, RuleError> {
        self.logical("or", Self::and_expr)
    }

    fn and_expr(&mut self) -> Result<Typed, RuleError> {
        self.logical("and", Self::not_expr)
    }

    fn not_expr(&mut self) -> Result<Typed, RuleError> {
        if self.is_keyword("not") {
            let pos = self.bump().pos;
            let (inner, ty, inner_pos) = self.not_expr()?;
            if ty != Type::Bool {
                return Err(RuleError::new(
                    RuleErrorKind::Type,
                    inner_pos,
                    format!("operand of `not` must be bool, found {ty}"),
                ));
            }
            return Ok((Expr::Not(Box::new(inner)), Type::Bool, pos));
        }
        self.compare()
    }

    fn compare(&mut self) -> Result<Typed, RuleError> {
        let (left, lt, lpos) = self.operand()?;
        let op = match self.peek() {
            Token::Op(op) => *op,
            _ => return Ok((left, lt, lpos)),
        };
        let op_pos = self.bump().pos;
        let (right, rt, _) = self.operand()?;
        if !comparable(op, lt, rt) {
            return Err(RuleError::new(
                RuleErrorKind::Type,
                op_pos,
                format!("cannot compare {lt} {} {rt}", op.symbol()),
            ));
        }
        Ok((
            Expr::Compare(op, Box::new(left), Box::new(right)),
            Type::Bool,
            lpos,
        ))
    }

    fn operand(&mut self) -> Result<Typed, RuleError> {
        let pos = self.pos();
        let literal = |l: Literal, t: Type| Ok((Expr::Literal(l), t, pos));
        match self.peek().clone() {
            Token::LParen => {
                self.bump();
                let (e, t, _) = self.or_expr()?;
                self.expect(Token::RParen, "`)`")?;
                Ok((e, t, pos))
            }
            Token::Number(n) => {
                self.bump();
                literal(Literal::Number(n), Type::Number)
            }
            Token::Text(s) => {
                self.bump();
                literal(Literal::Text(s), Type::Text)
            }
            Token::Date(d) => {
                self.bump();
                literal(Literal::Date(d), Type::Date)
            }
            Token::Duration(d) => {
                self.bump();
                literal(Literal::Duration(d), Type::Duration)
            }
            Token::Ident(w) if w == "true" || w == "false" => {
                self.bump();
                literal(Literal::Bool(w == "true"), Type::Bool)
            }
            Token::Ident(w) if KEYWORDS.contains(&w.as_str()) => self.syntax("an operand"),
            Token::Ident(w) => {
                self.bump();
                if *self.peek() == Token::LParen {
                    self.call(&w, pos)
                } else {
                    let field = ClaimField::from_name(&w).ok_or_else(|| {
                        RuleError::new(
                            RuleErrorKind::UnknownField,
                            pos,
                            format!("no claim field named `{w}`"),
                        )
                    })?;
                    Ok((Expr::Field(field), field_type(field), pos))
                }
            }
            _ => self.syntax("an operand"),
        }
    }

    fn call(&mut self, name: &str, pos: Pos) -> Result<Typed, RuleError> {
        const FUNCTIONS: &[&str] = &[
            "days_between",
            "duration_in_status",
            "duplicate_exists",
            "count_same",
            "distinct_count",
            "utilization_excess",
            "is_missing",
            "requires_external",
        ];
        if !FUNCTIONS.contains(&name) {
            return Err(RuleError::new(
                RuleErrorKind::UnknownFunction,
                pos,
                format!("no function named `{name}`"),
            ));
        }
        self.expect(Token::LParen, "`(`")?;
        let mut args: Vec<Typed> = Vec::new();
        if *self.peek() != Token::RParen {
            loop {
                args.push(self.or_expr()?);
                if *self.peek() == Token::Comma {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        self.expect(Token::RParen, "`,` or `)`")?;

        let arity = |want: &str| {
            RuleError::new(
                RuleErrorKind::Arity,
                pos,
                format!("{name} expects {want} argument(s), got {}", args.len()),
            )
        };
        let type_err = |at: Pos, msg: String| RuleError::new(RuleErrorKind::Type, at, msg);
        let as_field = |arg: &Typed| match arg.0 {
            Expr::Field(f) => Ok(f),
            _ => Err(type_err(
                arg.2,
                format!("{name} takes field names as arguments"),
            )),
        };
        let as_text_literal = |arg: &Typed| match &arg.0 {
            Expr::Literal(Literal::Text(s)) => Ok(s.clone()),
            _ => Err(type_err(arg.2, format!("{name} takes a string literal"))),
        };

        let (call, ty) = match name {
            "days_between" => {
                if args.len() != 2 {
                    return Err(arity("2"));
                }
                for a in &args {
                    if a.1 != Type::Date {
                        return Err(type_err(
                            a.2,
                            format!("days_between takes dates, found {}", a.1),
                        ));
                    }
                }
                let mut it = args.into_iter();
                let a = it.next().expect("two args").0;
                let b = it.next().expect("two args").0;
                (Call::DaysBetween(Box::new(a), Box::new(b)), Type::Duration)
            }
            "duration_in_status" => {
                if args.len() != 1 {
                    return Err(arity("1"));
                }
                (
                    Call::DurationInStatus(as_text_literal(&args[0])?),
                    Type::Duration,
                )
            }
            "requires_external" => {
                if args.len() != 1 {
                    return Err(arity("1"));
                }
                (
                    Call::RequiresExternal(as_text_literal(&args[0])?),
                    Type::Bool,
                )
            }
            "duplicate_exists" | "count_same" => {
                if args.is_empty() {
                    return Err(arity("at least 1"));
                }
                let fields = args.iter().map(as_field).collect::<Result<Vec<_>, _>>()?;
                if name == "count_same" {
                    (Call::CountSame(fields), Type::Number)
                } else {
                    (Call::DuplicateExists(fields), Type::Bool)
                }
            }
            "distinct_count" => {
                if args.len() < 2 {
                    return Err(arity("at least 2"));
                }
                let fields = args.iter().map(as_field).collect::<Result<Vec<_>, _>>()?;
                (
                    Call::DistinctCount(fields[0], fields[1..].to_vec()),
                    Type::Number,
                )
            }
            "utilization_excess" => {
                if args.is_empty() || args.len() > 2 {
                    return Err(arity("1 or 2"));
                }
                let field = as_field(&args[0])?;
                if field_type(field) != Type::Text {
                    return Err(type_err(
                        args[0].2,
                        "utilization_excess takes a text field".into(),
                    ));
                }
                let k = match args.get(1) {
                    None => None,
                    Some((Expr::Literal(Literal::Number(k)), _, _)) if *k >= 0.0 => Some(*k),
                    Some(a) => {
                        return Err(type_err(
                            a.2,
                            "utilization_excess k must be a non-negative number".into(),
                        ))
                    }
                };
                (Call::UtilizationExcess { field, k }, Type::Bool)
            }
            "is_missing" => {
                if args.len() != 1 {
                    return Err(arity("1"));
                }
                (Call::IsMissing(as_field(&args[0])?), Type::Bool)
            }
            _ => unreachable!("checked against FUNCTIONS"),
        };
        Ok((Expr::Call(call), ty, pos))
    }
}

/// Parses every rule in `text`, rejecting duplicate ids.
pub fn parse_rule_set(text: &str) -> Result<Vec<TriggerRule>, RuleError> {
    let mut parser = Parser {
        tokens: tokenize(text)?,
        at: 0,
    };
    let mut rules = Vec::new();
    let mut ids = HashSet::new();
    while *parser.peek() != Token::Eof {
        let (rule, pos) = parser.rule()?;
        if !ids.insert(rule.id.clone()) {
            return Err(RuleError::new(
                RuleErrorKind::DuplicateId,
                pos,
                format!("rule id `{}` is already defined", rule.id),
            ));
        }
        rules.push(rule);
    }
    Ok(rules)
}

/// Parses exactly one rule.
pub fn parse_rule(text: &str) -> Result<TriggerRule, RuleError> {
    let mut parser = Parser {
        tokens: tokenize(text)?,
        at: 0,
    };
    let (rule, _) = parser.rule()?;
    if *parser.peek() != Token::Eof {
        return parser.syntax("end of input");
    }
    Ok(rule)
}
