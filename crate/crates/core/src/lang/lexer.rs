use super::{ParseError, ParseErrorKind};

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    Comma,
    End,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Token {
    pub tok: Tok,
    pub line: usize,
    pub column: usize,
}

pub(crate) fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let ch = chars[i];
        let (tl, tc) = (line, col);
        if ch == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if ch.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        let single = match ch {
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ',' => Some(Tok::Comma),
            _ => None,
        };
        if let Some(tok) = single {
            out.push(Token { tok, line: tl, column: tc });
            i += 1;
            col += 1;
            continue;
        }
        if ch.is_ascii_digit() || (ch == '.' && chars.get(i + 1).is_some_and(|c| c.is_ascii_digit())) {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            // Optional exponent: e, E followed by an optionally signed integer.
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    while j < chars.len() && chars[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let lexeme: String = chars[start..i].iter().collect();
            col += i - start;
            let value: f64 = lexeme
                .parse()
                .map_err(|_| ParseError::new(ParseErrorKind::Syntax, tl, tc, format!("malformed number `{lexeme}`")))?;
            if !value.is_finite() {
                return Err(ParseError::new(ParseErrorKind::Syntax, tl, tc, format!("number `{lexeme}` overflows")));
            }
            out.push(Token { tok: Tok::Num(value), line: tl, column: tc });
            continue;
        }
        if ch.is_ascii_alphabetic() || ch == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            col += i - start;
            out.push(Token { tok: Tok::Ident(chars[start..i].iter().collect()), line: tl, column: tc });
            continue;
        }
        return Err(ParseError::new(ParseErrorKind::Syntax, tl, tc, format!("unexpected character `{ch}`")));
    }
    out.push(Token { tok: Tok::End, line, column: col });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_and_positions() {
        let t = tokenize("1.5e-3 +\n  zbar").unwrap();
        assert_eq!(t[0].tok, Tok::Num(1.5e-3));
        assert_eq!(t[1].tok, Tok::Plus);
        assert_eq!((t[2].line, t[2].column), (2, 3));
        assert!(tokenize("2 $ 3").is_err());
        assert!(tokenize("1e999").is_err());
        assert!(tokenize("1.2.3").is_err());
    }
}
