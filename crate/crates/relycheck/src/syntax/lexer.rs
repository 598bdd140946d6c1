//! Tokens.

use crate::lang::ast::Span;
use crate::syntax::ParseError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(i64),
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBrack,
    RBrack,
    Comma,
    Semi,
    Colon,
    ColonColon,
    Assign,
    Dot,
    DotDot,
    Hook,
    Bar,
    BarBar,
    Turnstile,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Plus,
    Minus,
    Star,
    Slash,
    Percent,
    Hash,
    And,
    Or,
    Not,
    Implies,
    Iff,
    Concat,
    Union,
    Inter,
    Backslash,
    In,
    NotIn,
    Subset,
    Eof,
}

impl std::fmt::Display for Tok {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Tok::Ident(s) => return write!(f, "`{s}`"),
            Tok::Int(n) => return write!(f, "`{n}`"),
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::LBrack => "[",
            Tok::RBrack => "]",
            Tok::Comma => ",",
            Tok::Semi => ";",
            Tok::Colon => ":",
            Tok::ColonColon => "::",
            Tok::Assign => ":=",
            Tok::Dot => ".",
            Tok::DotDot => "..",
            Tok::Hook => "~",
            Tok::Bar => "|",
            Tok::BarBar => "||",
            Tok::Turnstile => "|-",
            Tok::Eq => "=",
            Tok::Ne => "!=",
            Tok::Lt => "<",
            Tok::Le => "<=",
            Tok::Gt => ">",
            Tok::Ge => ">=",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Slash => "/",
            Tok::Percent => "%",
            Tok::Hash => "#",
            Tok::And => "/\\",
            Tok::Or => "\\/",
            Tok::Not => "!",
            Tok::Implies => "=>",
            Tok::Iff => "<=>",
            Tok::Concat => "++",
            Tok::Union => "∪",
            Tok::Inter => "∩",
            Tok::Backslash => "\\",
            Tok::In => "∈",
            Tok::NotIn => "∉",
            Tok::Subset => "⊆",
            Tok::Eof => "end of input",
        };
        write!(f, "`{s}`")
    }
}

pub fn lex(src: &str) -> Result<Vec<(Tok, Span)>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1u32, 1u32);
    let at = |k: usize| chars.get(k).copied();
    while i < chars.len() {
        let c = chars[i];
        let span = Span { line, col };
        let advance = |n: usize, i: &mut usize, col: &mut u32| {
            *i += n;
            *col += n as u32;
        };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            advance(1, &mut i, &mut col);
            continue;
        }
        if c == '/' && at(i + 1) == Some('/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c == '/' && at(i + 1) == Some('*') {
            i += 2;
            col += 2;
            loop {
                match at(i) {
                    None => return Err(ParseError { span, message: "unterminated comment".into() }),
                    Some('*') if at(i + 1) == Some('/') => {
                        i += 2;
                        col += 2;
                        break;
                    }
                    Some('\n') => {
                        i += 1;
                        line += 1;
                        col = 1;
                    }
                    Some(_) => {
                        i += 1;
                        col += 1;
                    }
                }
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while at(i).is_some_and(|c| c.is_ascii_alphanumeric() || c == '_') {
                i += 1;
            }
            col += (i - start) as u32;
            out.push((Tok::Ident(chars[start..i].iter().collect()), span));
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while at(i).is_some_and(|c| c.is_ascii_digit()) {
                i += 1;
            }
            col += (i - start) as u32;
            let text: String = chars[start..i].iter().collect();
            let n = text
                .parse::<i64>()
                .map_err(|_| ParseError { span, message: format!("integer literal `{text}` is too large") })?;
            out.push((Tok::Int(n), span));
            continue;
        }
        let two: String = chars[i..chars.len().min(i + 2)].iter().collect();
        let three: String = chars[i..chars.len().min(i + 3)].iter().collect();
        let (tok, n) = if three == "<=>" {
            (Tok::Iff, 3)
        } else {
            match two.as_str() {
                ":=" => (Tok::Assign, 2),
                "::" => (Tok::ColonColon, 2),
                ".." => (Tok::DotDot, 2),
                "||" => (Tok::BarBar, 2),
                "|-" => (Tok::Turnstile, 2),
                "!=" | "/=" => (Tok::Ne, 2),
                "<=" => (Tok::Le, 2),
                ">=" => (Tok::Ge, 2),
                "=>" => (Tok::Implies, 2),
                "/\\" => (Tok::And, 2),
                "\\/" => (Tok::Or, 2),
                "++" => (Tok::Concat, 2),
                _ => {
                    let t = match c {
                        '(' => Tok::LParen,
                        ')' => Tok::RParen,
                        '{' => Tok::LBrace,
                        '}' => Tok::RBrace,
                        '[' => Tok::LBrack,
                        ']' => Tok::RBrack,
                        ',' => Tok::Comma,
                        ';' => Tok::Semi,
                        ':' => Tok::Colon,
                        '.' => Tok::Dot,
                        '~' | '↼' => Tok::Hook,
                        '|' => Tok::Bar,
                        '∥' => Tok::BarBar,
                        '⊢' => Tok::Turnstile,
                        '=' => Tok::Eq,
                        '≠' => Tok::Ne,
                        '<' => Tok::Lt,
                        '≤' => Tok::Le,
                        '>' => Tok::Gt,
                        '≥' => Tok::Ge,
                        '+' => Tok::Plus,
                        '-' => Tok::Minus,
                        '*' => Tok::Star,
                        '/' => Tok::Slash,
                        '%' => Tok::Percent,
                        '#' => Tok::Hash,
                        '&' | '∧' => Tok::And,
                        '∨' => Tok::Or,
                        '!' | '¬' => Tok::Not,
                        '⇒' => Tok::Implies,
                        '⇔' => Tok::Iff,
                        '⌢' => Tok::Concat,
                        '∪' => Tok::Union,
                        '∩' => Tok::Inter,
                        '\\' | '∖' => Tok::Backslash,
                        '∈' => Tok::In,
                        '∉' => Tok::NotIn,
                        '⊆' => Tok::Subset,
                        _ => {
                            return Err(ParseError { span, message: format!("unexpected character `{c}`") });
                        }
                    };
                    (t, 1)
                }
            }
        };
        advance(n, &mut i, &mut col);
        out.push((tok, span));
    }
    out.push((Tok::Eof, Span { line, col }));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        lex(s).unwrap().into_iter().map(|(t, _)| t).collect()
    }

    #[test]
    fn operators_take_longest_match() {
        assert_eq!(
            toks("a <=> b => c <= d || e | f |- g"),
            vec![
                Tok::Ident("a".into()),
                Tok::Iff,
                Tok::Ident("b".into()),
                Tok::Implies,
                Tok::Ident("c".into()),
                Tok::Le,
                Tok::Ident("d".into()),
                Tok::BarBar,
                Tok::Ident("e".into()),
                Tok::Bar,
                Tok::Ident("f".into()),
                Tok::Turnstile,
                Tok::Ident("g".into()),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn unicode_forms() {
        assert_eq!(toks("↼v ∧ ¬w"), vec![Tok::Hook, Tok::Ident("v".into()), Tok::And, Tok::Not, Tok::Ident("w".into()), Tok::Eof]);
    }

    #[test]
    fn comments_and_positions() {
        let t = lex("// c\n  /* x\n */ skip").unwrap();
        assert_eq!(t[0].1, Span { line: 3, col: 5 });
    }
}
