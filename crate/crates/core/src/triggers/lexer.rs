use chrono::NaiveDate;

use super::ast::{CmpOp, Duration};
use super::error::{RuleError, RuleErrorKind};

#[derive(Debug, Clone, PartialEq)]
pub enum Token {
    Ident(String),
    Number(f64),
    Text(String),
    Date(NaiveDate),
    Duration(Duration),
    Op(CmpOp),
    LParen,
    RParen,
    Comma,
    Colon,
    Semicolon,
    Eof,
}

impl Token {
    pub fn describe(&self) -> String {
        match self {
            Token::Ident(s) => format!("`{s}`"),
            Token::Number(n) => format!("number {n}"),
            Token::Text(s) => format!("string {s:?}"),
            Token::Date(d) => format!("date {d}"),
            Token::Duration(d) => format!("duration {d}"),
            Token::Op(op) => format!("`{}`", op.symbol()),
            Token::LParen => "`(`".into(),
            Token::RParen => "`)`".into(),
            Token::Comma => "`,`".into(),
            Token::Colon => "`:`".into(),
            Token::Semicolon => "`;`".into(),
            Token::Eof => "end of input".into(),
        }
    }
}

/// 1-based line and column.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spanned {
    pub token: Token,
    pub pos: Pos,
}

pub fn tokenize(text: &str) -> Result<Vec<Spanned>, RuleError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let mut line = 1;
    let mut col = 1;

    let syntax = |pos: Pos, msg: String| RuleError::new(RuleErrorKind::Syntax, pos, msg);

    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, column: col };
        let advance = |n: usize, i: &mut usize, col: &mut usize| {
            *i += n;
            *col += n;
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => advance(1, &mut i, &mut col),
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '(' | ')' | ',' | ':' | ';' => {
                let token = match c {
                    '(' => Token::LParen,
                    ')' => Token::RParen,
                    ',' => Token::Comma,
                    ':' => Token::Colon,
                    _ => Token::Semicolon,
                };
                out.push(Spanned { token, pos });
                advance(1, &mut i, &mut col);
            }
            '=' | '!' | '<' | '>' => {
                let next = chars.get(i + 1).copied();
                let (op, len) = match (c, next) {
                    ('=', Some('=')) => (CmpOp::Eq, 2),
                    ('=', _) => (CmpOp::Eq, 1),
                    ('!', Some('=')) => (CmpOp::Ne, 2),
                    ('<', Some('=')) => (CmpOp::Le, 2),
                    ('<', Some('>')) => (CmpOp::Ne, 2),
                    ('<', _) => (CmpOp::Lt, 1),
                    ('>', Some('=')) => (CmpOp::Ge, 2),
                    ('>', _) => (CmpOp::Gt, 1),
                    _ => {
                        return Err(syntax(
                            pos,
                            "unexpected `!`; did you mean `!=` or `not`?".into(),
                        ))
                    }
                };
                out.push(Spanned {
                    token: Token::Op(op),
                    pos,
                });
                advance(len, &mut i, &mut col);
            }
            '"' => {
                let mut s = String::new();
                let mut j = i + 1;
                loop {
                    match chars.get(j) {
                        None | Some('\n') => return Err(syntax(pos, "unterminated string".into())),
                        Some('"') => break,
                        Some('\\') => {
                            match chars.get(j + 1) {
                                Some(e @ ('"' | '\\')) => s.push(*e),
                                _ => return Err(syntax(pos, "invalid escape in string".into())),
                            }
                            j += 2;
                        }
                        Some(ch) => {
                            s.push(*ch);
                            j += 1;
                        }
                    }
                }
                out.push(Spanned {
                    token: Token::Text(s),
                    pos,
                });
                advance(j + 1 - i, &mut i, &mut col);
            }
            c if c.is_ascii_digit()
                || (c == '-' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) =>
            {
                let start = i;
                let mut j = i + 1;
                while j < chars.len() && (chars[j].is_ascii_digit() || chars[j] == '.') {
                    j += 1;
                }
                let digits: String = chars[start..j].iter().collect();
                // YYYY-MM-DD
                if c != '-' && digits.len() == 4 && chars.get(j) == Some(&'-') {
                    let end = (j + 6).min(chars.len());
                    let candidate: String = chars[start..end].iter().collect();
                    let well_formed = candidate.len() == 10
                        && candidate.chars().enumerate().all(|(k, ch)| {
                            if k == 4 || k == 7 {
                                ch == '-'
                            } else {
                                ch.is_ascii_digit()
                            }
                        });
                    if !well_formed {
                        return Err(syntax(
                            pos,
                            format!("malformed date literal starting {digits}-"),
                        ));
                    }
                    let date = NaiveDate::parse_from_str(&candidate, "%Y-%m-%d")
                        .map_err(|_| syntax(pos, format!("invalid date {candidate}")))?;
                    out.push(Spanned {
                        token: Token::Date(date),
                        pos,
                    });
                    advance(10, &mut i, &mut col);
                    continue;
                }
                let mut k = j;
                while k < chars.len() && chars[k].is_ascii_alphabetic() {
                    k += 1;
                }
                let suffix: String = chars[j..k].iter().collect();
                if !suffix.is_empty() {
                    let n: i64 = digits.parse().map_err(|_| {
                        syntax(pos, format!("durations take whole numbers, got {digits}"))
                    })?;
                    let d = match suffix.as_str() {
                        "d" => Duration::Days(n),
                        "w" => Duration::Weeks(n),
                        "mo" => Duration::Months(n),
                        "y" => Duration::Years(n),
                        other => {
                            return Err(syntax(
                                pos,
                                format!("unknown duration unit `{other}` (use d, w, mo or y)"),
                            ))
                        }
                    };
                    out.push(Spanned {
                        token: Token::Duration(d),
                        pos,
                    });
                    advance(k - i, &mut i, &mut col);
                    continue;
                }
                let n: f64 = digits
                    .parse()
                    .map_err(|_| syntax(pos, format!("invalid number {digits}")))?;
                out.push(Spanned {
                    token: Token::Number(n),
                    pos,
                });
                advance(j - i, &mut i, &mut col);
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut j = i;
                while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                let word: String = chars[i..j].iter().collect();
                out.push(Spanned {
                    token: Token::Ident(word),
                    pos,
                });
                advance(j - i, &mut i, &mut col);
            }
            other => return Err(syntax(pos, format!("unexpected character {other:?}"))),
        }
    }
    out.push(Spanned {
        token: Token::Eof,
        pos: Pos { line, column: col },
    });
    Ok(out)
}
