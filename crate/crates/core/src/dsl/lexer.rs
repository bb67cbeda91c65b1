use super::Diagnostic;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Int(i64),
    Arrow,
    Punct(char),
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("'{s}'"),
            Tok::Int(n) => format!("'{n}'"),
            Tok::Arrow => "'->'".to_string(),
            Tok::Punct(c) => format!("'{c}'"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Token {
    pub tok: Tok,
    /// 1-based character column.
    pub col: usize,
}

const PUNCT: &[char] = &['=', '(', ')', '[', ']', ';', ',', '|', '@'];

/// Splits one line (without its terminator) into tokens. Stops at `#`.
pub(crate) fn tokenize(line: &str, line_no: usize) -> Result<Vec<Token>, Diagnostic> {
    let chars: Vec<char> = line.chars().collect();
    let mut tokens = Vec::new();
    let mut k = 0;
    while k < chars.len() {
        let c = chars[k];
        let col = k + 1;
        if c == '#' {
            break;
        } else if c.is_whitespace() {
            k += 1;
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = k;
            while k < chars.len() && (chars[k].is_ascii_alphanumeric() || chars[k] == '_') {
                k += 1;
            }
            tokens.push(Token {
                tok: Tok::Ident(chars[start..k].iter().collect()),
                col,
            });
        } else if c.is_ascii_digit() || (c == '-' && chars.get(k + 1).is_some_and(char::is_ascii_digit)) {
            let start = k;
            k += 1;
            while k < chars.len() && chars[k].is_ascii_digit() {
                k += 1;
            }
            let text: String = chars[start..k].iter().collect();
            let value = text
                .parse::<i64>()
                .map_err(|_| Diagnostic::error(line_no, col, format!("integer literal '{text}' is out of range")))?;
            tokens.push(Token {
                tok: Tok::Int(value),
                col,
            });
        } else if c == '-' && chars.get(k + 1) == Some(&'>') {
            tokens.push(Token { tok: Tok::Arrow, col });
            k += 2;
        } else if PUNCT.contains(&c) {
            tokens.push(Token {
                tok: Tok::Punct(c),
                col,
            });
            k += 1;
        } else {
            return Err(Diagnostic::error(line_no, col, format!("unexpected character '{c}'")));
        }
    }
    Ok(tokens)
}
