use serde::Serialize;

use crate::span::SourceSpan;
use crate::text::{ErrorCode, ParseError};

const BEGIN: &str = "\\begin{evaluationcard}";
const END: &str = "\\end{evaluationcard}";

/// One `\Name{argument}` body command. The argument is verbatim, escapes
/// included, with its braces balanced.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CardCommand {
    pub name: String,
    pub argument: String,
    pub span: SourceSpan,
}

impl CardCommand {
    /// The source text this command was read from.
    pub fn source(&self) -> String {
        format!("\\{}{{{}}}", self.name, self.argument)
    }
}

/// One `key={value}` or `key=value` header option.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CardOption {
    pub key: String,
    pub value: String,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CardDocument {
    pub options: Vec<CardOption>,
    pub commands: Vec<CardCommand>,
}

impl CardDocument {
    /// First value given for `key`.
    pub fn option(&self, key: &str) -> Option<&str> {
        self.options
            .iter()
            .find(|o| o.key == key)
            .map(|o| o.value.as_str())
    }
}

/// Replaces `\{ \} \\ \% \# \& \_ \$` by the bare character.
pub fn unescape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars().peekable();
    while let Some(c) = chars.next() {
        if c == '\\' {
            if let Some(&n) = chars.peek() {
                if matches!(n, '{' | '}' | '\\' | '%' | '#' | '&' | '_' | '$') {
                    out.push(n);
                    chars.next();
                    continue;
                }
            }
        }
        out.push(c);
    }
    out
}

/// Escapes the characters that would unbalance or comment out an argument.
pub fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        if matches!(c, '\\' | '{' | '}' | '%' | '#') {
            out.push('\\');
        }
        out.push(c);
    }
    out
}

struct Scanner<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Scanner<'a> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.bump();
        }
    }

    fn span(&self, start: usize) -> SourceSpan {
        let len = self.src[start..self.pos].chars().count().max(1);
        SourceSpan::at_offset(self.src, start, len)
    }

    /// With the cursor on `{`, moves past the matching `}` and returns the
    /// text between them.
    fn group(&mut self) -> Result<&'a str, ParseError> {
        let open = self.pos;
        self.bump();
        let mut depth = 0usize;
        while let Some(c) = self.bump() {
            match c {
                '\\' => {
                    self.bump();
                }
                '{' => depth += 1,
                '}' if depth == 0 => return Ok(&self.src[open + 1..self.pos - 1]),
                '}' => depth -= 1,
                _ => {}
            }
        }
        Err(ParseError::new(
            ErrorCode::C002,
            SourceSpan::at_offset(self.src, open, 1),
            "unbalanced braces: `{` is never closed",
        ))
    }

    fn options(&mut self) -> Result<Vec<CardOption>, ParseError> {
        let open = self.pos;
        self.bump();
        let mut out = Vec::new();
        loop {
            self.skip_ws();
            let start = self.pos;
            match self.peek() {
                None => {
                    return Err(ParseError::new(
                        ErrorCode::C003,
                        SourceSpan::at_offset(self.src, open, 1),
                        "option list is never closed with `]`",
                    ))
                }
                Some(']') => {
                    self.bump();
                    return Ok(out);
                }
                _ => {}
            }
            while self
                .peek()
                .is_some_and(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
            {
                self.bump();
            }
            let key = &self.src[start..self.pos];
            self.skip_ws();
            if key.is_empty() || self.peek() != Some('=') {
                self.bump();
                return Err(ParseError::new(
                    ErrorCode::C003,
                    self.span(start),
                    "expected `key={value}` in option list",
                ));
            }
            self.bump();
            self.skip_ws();
            let value = if self.peek() == Some('{') {
                self.group()?.to_string()
            } else {
                let vstart = self.pos;
                while self.peek().is_some_and(|c| !matches!(c, ',' | ']' | '{' | '}')) {
                    self.bump();
                }
                if matches!(self.peek(), Some('{' | '}')) {
                    return Err(ParseError::new(
                        ErrorCode::C003,
                        self.span(vstart),
                        "braces in an unbraced option value",
                    ));
                }
                self.src[vstart..self.pos].trim().to_string()
            };
            let span = self.span(start);
            out.push(CardOption {
                key: key.to_string(),
                value,
                span,
            });
            self.skip_ws();
            match self.peek() {
                Some(',') => {
                    self.bump();
                }
                Some(']') => {}
                _ => {
                    return Err(ParseError::new(
                        ErrorCode::C003,
                        self.span(self.pos),
                        "expected `,` or `]` after option value",
                    ))
                }
            }
        }
    }
}

/// Reads the first `evaluationcard` environment in `input`. Text outside
/// the environment, text between commands and `%` comments are skipped.
pub fn parse_card(input: &str) -> Result<CardDocument, Vec<ParseError>> {
    let Some(begin) = input.find(BEGIN) else {
        return Err(vec![ParseError::new(
            ErrorCode::C001,
            SourceSpan::new(1, 1, 1),
            "no `\\begin{evaluationcard}` found",
        )]);
    };
    let mut sc = Scanner {
        src: input,
        pos: begin + BEGIN.len(),
    };
    let mut doc = CardDocument::default();
    let after_begin = sc.pos;
    sc.skip_ws();
    if sc.peek() == Some('[') {
        doc.options = sc.options().map_err(|e| vec![e])?;
    } else {
        sc.pos = after_begin;
    }

    loop {
        if sc.src[sc.pos..].starts_with(END) {
            return Ok(doc);
        }
        let start = sc.pos;
        let Some(c) = sc.bump() else {
            return Err(vec![ParseError::new(
                ErrorCode::C001,
                SourceSpan::at_offset(input, begin, BEGIN.len()),
                "`\\begin{evaluationcard}` has no matching `\\end{evaluationcard}`",
            )]);
        };
        match c {
            '\\' => {
                let name_start = sc.pos;
                while sc.peek().is_some_and(|c| c.is_ascii_alphabetic()) {
                    sc.bump();
                }
                if sc.pos == name_start {
                    // escaped character in running text
                    sc.bump();
                    continue;
                }
                let name = &input[name_start..sc.pos];
                if sc.peek() == Some('{') {
                    let argument = sc.group().map_err(|e| vec![e])?;
                    doc.commands.push(CardCommand {
                        name: name.to_string(),
                        argument: argument.to_string(),
                        span: sc.span(start),
                    });
                }
            }
            '{' => {
                sc.pos = start;
                sc.group().map_err(|e| vec![e])?;
            }
            '}' => {
                return Err(vec![ParseError::new(
                    ErrorCode::C002,
                    SourceSpan::at_offset(input, start, 1),
                    "unbalanced braces: `}` without a matching `{`",
                )]);
            }
            '%' => {
                while sc.peek().is_some_and(|c| c != '\n') {
                    sc.bump();
                }
            }
            _ => {}
        }
    }
}
