//! Tokenizer for the ASCII surface syntax and its Unicode aliases.

use std::sync::Arc;

use super::ParseError;
use crate::model::Span;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(i64),
    /// `@name`
    Label(String),
    /// Operator or punctuation, always in its ASCII spelling.
    Sym(&'static str),
    Eof,
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub line: u32,
    pub col: u32,
    pub end_line: u32,
    pub end_col: u32,
}

/// ASCII symbols, longest first so that the first match is the longest.
const SYMBOLS: &[&str] = &[
    "<<->>", "/<<:", ">->>", "<<->", "<->>", "<=>", "<<|", "|>>", "|->", "<->", "+->", "-->",
    ">+>", ">->", "+>>", "->>", "/<:", "<<:", "<|", "|>", "<+", "><", "||", "=>", "/=", "/:", "<:",
    "<=", ">=", ":=", ":|", "::", "\\/", "/\\", "**", "..", "{}", "&", "!", "#", ".", "=", ":",
    "<", ">", "+", "-", "*", "/", "^", "\\", "~", ";", "(", ")", "{", "}", "[", "]", ",", "|",
];

/// Words that lex as symbols.
const WORD_SYMBOLS: &[&str] = &["not", "or", "mod", "circ"];

fn unicode_alias(c: char) -> Option<&'static str> {
    Some(match c {
        '∈' => ":",
        '∉' => "/:",
        '⊆' => "<:",
        '⊈' => "/<:",
        '⊂' => "<<:",
        '⊄' => "/<<:",
        '∪' => "\\/",
        '∩' => "/\\",
        '∖' => "\\",
        '×' => "**",
        '↦' => "|->",
        '‥' => "..",
        '↔' => "<->",
        '\u{E100}' => "<<->",
        '\u{E101}' => "<->>",
        '\u{E102}' => "<<->>",
        '⇸' => "+->",
        '→' => "-->",
        '⤔' => ">+>",
        '↣' => ">->",
        '⤀' => "+>>",
        '↠' => "->>",
        '⤖' => ">->>",
        '◁' => "<|",
        '▷' => "|>",
        '⩤' => "<<|",
        '⩥' => "|>>",
        '\u{E103}' => "<+",
        '⊗' => "><",
        '∥' => "||",
        '∘' => "circ",
        '∧' => "&",
        '∨' => "or",
        '¬' => "not",
        '⇒' => "=>",
        '⇔' => "<=>",
        '∀' => "!",
        '∃' => "#",
        '·' => ".",
        '≠' => "/=",
        '≤' => "<=",
        '≥' => ">=",
        '∅' => "{}",
        '÷' => "/",
        '−' => "-",
        '∼' => "~",
        '≔' => ":=",
        _ => return None,
    })
}

/// Unicode spellings of reserved words.
fn unicode_word(c: char) -> Option<&'static str> {
    Some(match c {
        'ℕ' => "NAT",
        'ℤ' => "INT",
        'ℙ' => "POW",
        _ => return None,
    })
}

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

pub fn tokenize(file: &Arc<str>, src: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1u32, 1u32);

    let advance = |i: &mut usize, line: &mut u32, col: &mut u32, n: usize| {
        for _ in 0..n {
            if chars[*i] == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
            *i += 1;
        }
    };

    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            advance(&mut i, &mut line, &mut col, 1);
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                advance(&mut i, &mut line, &mut col, 1);
            }
            continue;
        }
        let (sl, sc) = (line, col);
        let push = |out: &mut Vec<Token>, tok: Tok, line: u32, col: u32| {
            out.push(Token {
                tok,
                line: sl,
                col: sc,
                end_line: line,
                end_col: col,
            });
        };

        if c == '@' {
            let start = i + 1;
            let mut j = start;
            while j < chars.len() && (is_ident_char(chars[j]) || chars[j] == '\'') {
                j += 1;
            }
            if j == start {
                return Err(ParseError::new(
                    Span::new(file.clone(), (sl, sc), (sl, sc + 1)),
                    "expected a label name after '@'",
                ));
            }
            let name: String = chars[start..j].iter().collect();
            let n = j - i;
            advance(&mut i, &mut line, &mut col, n);
            push(&mut out, Tok::Label(name), line, col);
            continue;
        }
        if c.is_ascii_digit() {
            let mut j = i;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            let text: String = chars[i..j].iter().collect();
            let value: i64 = text.parse().map_err(|_| {
                ParseError::new(
                    Span::new(file.clone(), (sl, sc), (sl, sc + (j - i) as u32)),
                    format!("integer literal {text} is out of range"),
                )
            })?;
            let n = j - i;
            advance(&mut i, &mut line, &mut col, n);
            push(&mut out, Tok::Int(value), line, col);
            continue;
        }
        if let Some(w) = unicode_word(c) {
            let mut word = w.to_string();
            let mut n = 1;
            if matches!(c, 'ℕ' | 'ℙ') && chars.get(i + 1) == Some(&'1') {
                word.push('1');
                n = 2;
            }
            advance(&mut i, &mut line, &mut col, n);
            push(&mut out, Tok::Ident(word), line, col);
            continue;
        }
        if is_ident_start(c) {
            let mut j = i;
            while j < chars.len() && is_ident_char(chars[j]) {
                j += 1;
            }
            if j < chars.len() && chars[j] == '\'' {
                j += 1;
            }
            let word: String = chars[i..j].iter().collect();
            let n = j - i;
            advance(&mut i, &mut line, &mut col, n);
            let tok = match WORD_SYMBOLS.iter().find(|w| **w == word) {
                Some(w) => Tok::Sym(w),
                None => Tok::Ident(word),
            };
            push(&mut out, tok, line, col);
            continue;
        }
        if let Some(sym) = unicode_alias(c) {
            advance(&mut i, &mut line, &mut col, 1);
            push(&mut out, Tok::Sym(sym), line, col);
            continue;
        }
        let matched = SYMBOLS.iter().find(|s| {
            let sc: Vec<char> = s.chars().collect();
            chars.len() - i >= sc.len() && chars[i..i + sc.len()] == sc[..]
        });
        match matched {
            Some(sym) => {
                advance(&mut i, &mut line, &mut col, sym.len());
                push(&mut out, Tok::Sym(sym), line, col);
            }
            None => {
                return Err(ParseError::new(
                    Span::new(file.clone(), (sl, sc), (sl, sc + 1)),
                    format!("unexpected character '{c}'"),
                ))
            }
        }
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        col,
        end_line: line,
        end_col: col,
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn syms(src: &str) -> Vec<Tok> {
        let f: Arc<str> = Arc::from("t");
        tokenize(&f, src)
            .unwrap()
            .into_iter()
            .map(|t| t.tok)
            .filter(|t| *t != Tok::Eof)
            .collect()
    }

    #[test]
    fn longest_match() {
        assert_eq!(
            syms("f : 1..n --> NAT"),
            vec![
                Tok::Ident("f".into()),
                Tok::Sym(":"),
                Tok::Int(1),
                Tok::Sym(".."),
                Tok::Ident("n".into()),
                Tok::Sym("-->"),
                Tok::Ident("NAT".into()),
            ]
        );
        assert_eq!(syms("a >->> b"), syms("a ⤖ b"));
        assert_eq!(syms("s <<| r |>> t"), syms("s ⩤ r ⩥ t"));
    }

    #[test]
    fn primes_labels_and_comments() {
        assert_eq!(
            syms("@inv1 x' = x // trailing\n"),
            vec![
                Tok::Label("inv1".into()),
                Tok::Ident("x'".into()),
                Tok::Sym("="),
                Tok::Ident("x".into()),
            ]
        );
        assert_eq!(
            syms("ℕ1 ∅"),
            vec![Tok::Ident("NAT1".into()), Tok::Sym("{}")]
        );
    }

    #[test]
    fn bad_character_has_span() {
        let f: Arc<str> = Arc::from("t");
        let err = tokenize(&f, "x $ y").unwrap_err();
        assert_eq!((err.span.start_line, err.span.start_col), (1, 3));
    }
}
