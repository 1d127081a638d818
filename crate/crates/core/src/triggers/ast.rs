//! Rule syntax tree and its canonical text rendering.

use std::fmt;

use chrono::NaiveDate;

use crate::claims::ClaimField;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Category {
    FraudAbuse,
    Process,
    Eligibility,
    General,
}

impl Category {
    pub fn as_str(self) -> &'static str {
        match self {
            Category::FraudAbuse => "fraud_abuse",
            Category::Process => "process",
            Category::Eligibility => "eligibility",
            Category::General => "general",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "fraud_abuse" => Some(Category::FraudAbuse),
            "process" => Some(Category::Process),
            "eligibility" => Some(Category::Eligibility),
            "general" => Some(Category::General),
            _ => None,
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Static type of an expression.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Type {
    Bool,
    Number,
    Money,
    Date,
    Duration,
    Text,
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Type::Bool => "bool",
            Type::Number => "number",
            Type::Money => "money",
            Type::Date => "date",
            Type::Duration => "duration",
            Type::Text => "text",
        })
    }
}

/// Calendar duration literal such as `15d` or `3mo`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Duration {
    Days(i64),
    Weeks(i64),
    Months(i64),
    Years(i64),
}

impl Duration {
    /// Adds the duration to a date; month and year steps clamp to month end.
    pub fn after(self, date: NaiveDate) -> Option<NaiveDate> {
        use chrono::{Days, Months};
        let shift_days = |n: i64| {
            if n >= 0 {
                date.checked_add_days(Days::new(n as u64))
            } else {
                date.checked_sub_days(Days::new(n.unsigned_abs()))
            }
        };
        let shift_months = |n: i64| {
            if n >= 0 {
                date.checked_add_months(Months::new(n as u32))
            } else {
                date.checked_sub_months(Months::new(n.unsigned_abs() as u32))
            }
        };
        match self {
            Duration::Days(n) => shift_days(n),
            Duration::Weeks(n) => shift_days(n * 7),
            Duration::Months(n) => shift_months(n),
            Duration::Years(n) => shift_months(n * 12),
        }
    }

    /// Nominal length in days, used only when two literals are compared.
    pub fn nominal_days(self) -> f64 {
        match self {
            Duration::Days(n) => n as f64,
            Duration::Weeks(n) => n as f64 * 7.0,
            Duration::Months(n) => n as f64 * 30.436875,
            Duration::Years(n) => n as f64 * 365.2425,
        }
    }
}

impl fmt::Display for Duration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Duration::Days(n) => write!(f, "{n}d"),
            Duration::Weeks(n) => write!(f, "{n}w"),
            Duration::Months(n) => write!(f, "{n}mo"),
            Duration::Years(n) => write!(f, "{n}y"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Literal {
    Number(f64),
    Text(String),
    Date(NaiveDate),
    Duration(Duration),
    Bool(bool),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }

    pub fn holds(self, ord: std::cmp::Ordering) -> bool {
        use std::cmp::Ordering::*;
        match self {
            CmpOp::Eq => ord == Equal,
            CmpOp::Ne => ord != Equal,
            CmpOp::Lt => ord == Less,
            CmpOp::Le => ord != Greater,
            CmpOp::Gt => ord == Greater,
            CmpOp::Ge => ord != Less,
        }
    }

    pub fn is_equality(self) -> bool {
        matches!(self, CmpOp::Eq | CmpOp::Ne)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Call {
    /// Signed day span from the first date to the second.
    DaysBetween(Box<Expr>, Box<Expr>),
    /// Time from the reported date to the evaluation date, for claims whose status matches.
    DurationInStatus(String),
    /// Another claim shares every listed field value.
    DuplicateExists(Vec<ClaimField>),
    /// Number of claims (this one included) sharing every listed field value.
    CountSame(Vec<ClaimField>),
    /// Distinct values of the first field among claims sharing the remaining fields.
    DistinctCount(ClaimField, Vec<ClaimField>),
    /// This claim is part of its package's monthly excess over the baseline.
    UtilizationExcess {
        field: ClaimField,
        k: Option<f64>,
    },
    IsMissing(ClaimField),
    /// Stand-in for a check that needs data the claim table does not carry; always false.
    RequiresExternal(String),
}

impl Call {
    pub fn name(&self) -> &'static str {
        match self {
            Call::DaysBetween(..) => "days_between",
            Call::DurationInStatus(_) => "duration_in_status",
            Call::DuplicateExists(_) => "duplicate_exists",
            Call::CountSame(_) => "count_same",
            Call::DistinctCount(..) => "distinct_count",
            Call::UtilizationExcess { .. } => "utilization_excess",
            Call::IsMissing(_) => "is_missing",
            Call::RequiresExternal(_) => "requires_external",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Literal(Literal),
    Field(ClaimField),
    Call(Call),
    Not(Box<Expr>),
    And(Vec<Expr>),
    Or(Vec<Expr>),
    Compare(CmpOp, Box<Expr>, Box<Expr>),
}

impl Expr {
    fn precedence(&self) -> u8 {
        match self {
            Expr::Or(_) => 1,
            Expr::And(_) => 2,
            Expr::Not(_) => 3,
            Expr::Compare(..) => 4,
            _ => 5,
        }
    }

    /// Visits every node, parents before children.
    pub fn walk<'a>(&'a self, visit: &mut dyn FnMut(&'a Expr)) {
        visit(self);
        match self {
            Expr::Not(e) => e.walk(visit),
            Expr::And(items) | Expr::Or(items) => items.iter().for_each(|e| e.walk(visit)),
            Expr::Compare(_, l, r) => {
                l.walk(visit);
                r.walk(visit);
            }
            Expr::Call(Call::DaysBetween(a, b)) => {
                a.walk(visit);
                b.walk(visit);
            }
            _ => {}
        }
    }
}

pub(crate) fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}

fn join_fields(fields: &[ClaimField]) -> String {
    fields
        .iter()
        .map(|f| f.name())
        .collect::<Vec<_>>()
        .join(", ")
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Number(n) => write!(f, "{n}"),
            Literal::Text(s) => f.write_str(&quote(s)),
            Literal::Date(d) => write!(f, "{d}"),
            Literal::Duration(d) => write!(f, "{d}"),
            Literal::Bool(b) => write!(f, "{b}"),
        }
    }
}

impl fmt::Display for Call {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = self.name();
        match self {
            Call::DaysBetween(a, b) => write!(f, "{name}({a}, {b})"),
            Call::DurationInStatus(s) | Call::RequiresExternal(s) => {
                write!(f, "{name}({})", quote(s))
            }
            Call::DuplicateExists(fields) | Call::CountSame(fields) => {
                write!(f, "{name}({})", join_fields(fields))
            }
            Call::DistinctCount(target, keys) => {
                write!(f, "{name}({target}, {})", join_fields(keys))
            }
            Call::UtilizationExcess { field, k: None } => write!(f, "{name}({field})"),
            Call::UtilizationExcess { field, k: Some(k) } => write!(f, "{name}({field}, {k})"),
            Call::IsMissing(field) => write!(f, "{name}({field})"),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prec = self.precedence();
        // Children with the same or lower precedence are parenthesized so the
        // rendered text parses back to the same tree.
        let child = |e: &Expr, f: &mut fmt::Formatter<'_>| {
            if e.precedence() <= prec {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        };
        match self {
            Expr::Literal(l) => write!(f, "{l}"),
            Expr::Field(field) => f.write_str(field.name()),
            Expr::Call(c) => write!(f, "{c}"),
            Expr::Not(e) => {
                f.write_str("not ")?;
                if e.precedence() < prec {
                    write!(f, "({e})")
                } else {
                    write!(f, "{e}")
                }
            }
            Expr::And(items) | Expr::Or(items) => {
                let sep = if matches!(self, Expr::And(_)) {
                    " and "
                } else {
                    " or "
                };
                for (i, e) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(sep)?;
                    }
                    child(e, f)?;
                }
                Ok(())
            }
            Expr::Compare(op, l, r) => {
                child(l, f)?;
                write!(f, " {} ", op.symbol())?;
                child(r, f)
            }
        }
    }
}
