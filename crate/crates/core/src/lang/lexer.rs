use super::SyntaxError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Keyword {
    Select,
    From,
    Where,
    Join,
    On,
    Limit,
    Create,
    Table,
    View,
    Type,
    As,
    Enum,
    Insert,
    Into,
    Values,
    Complete,
    And,
    Or,
    Not,
    True,
    False,
}

const KEYWORDS: &[(&str, Keyword)] = &[
    ("SELECT", Keyword::Select),
    ("FROM", Keyword::From),
    ("WHERE", Keyword::Where),
    ("JOIN", Keyword::Join),
    ("ON", Keyword::On),
    ("LIMIT", Keyword::Limit),
    ("CREATE", Keyword::Create),
    ("TABLE", Keyword::Table),
    ("VIEW", Keyword::View),
    ("TYPE", Keyword::Type),
    ("AS", Keyword::As),
    ("ENUM", Keyword::Enum),
    ("INSERT", Keyword::Insert),
    ("INTO", Keyword::Into),
    ("VALUES", Keyword::Values),
    ("COMPLETE", Keyword::Complete),
    ("AND", Keyword::And),
    ("OR", Keyword::Or),
    ("NOT", Keyword::Not),
    ("TRUE", Keyword::True),
    ("FALSE", Keyword::False),
];

pub fn keyword(word: &str) -> Option<Keyword> {
    KEYWORDS
        .iter()
        .find(|(k, _)| k.eq_ignore_ascii_case(word))
        .map(|(_, kw)| *kw)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    Ident(String),
    Keyword(Keyword),
    Number(String),
    Str(String),
    LParen,
    RParen,
    Comma,
    Semicolon,
    Dot,
    DotDot,
    Star,
    Plus,
    Minus,
    Slash,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Arrow,
    Eof,
}

impl TokenKind {
    pub fn describe(&self) -> String {
        match self {
            TokenKind::Ident(s) => format!("identifier {s}"),
            TokenKind::Keyword(k) => format!("keyword {}", format!("{k:?}").to_uppercase()),
            TokenKind::Number(n) => format!("number {n}"),
            TokenKind::Str(s) => format!("string '{s}'"),
            TokenKind::Eof => "end of input".to_string(),
            other => format!("{other:?}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub line: usize,
    pub column: usize,
}

struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    column: usize,
}

impl Cursor<'_> {
    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn peek2(&self) -> Option<char> {
        let mut it = self.chars.clone();
        it.next();
        it.next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }
}

pub fn tokenize(text: &str) -> Result<Vec<Token>, SyntaxError> {
    let mut cur = Cursor {
        chars: text.chars().peekable(),
        line: 1,
        column: 1,
    };
    let mut tokens = Vec::new();
    while let Some(c) = cur.peek() {
        let (line, column) = (cur.line, cur.column);
        let err = |message: String| SyntaxError { line, column, message };
        if c.is_whitespace() {
            cur.bump();
            continue;
        }
        if c == '-' && cur.peek2() == Some('-') {
            while let Some(c) = cur.peek() {
                if c == '\n' {
                    break;
                }
                cur.bump();
            }
            continue;
        }
        let kind = if c.is_ascii_alphabetic() || c == '_' {
            let mut word = String::new();
            while let Some(c) = cur.peek() {
                if c.is_ascii_alphanumeric() || c == '_' {
                    word.push(c);
                    cur.bump();
                } else {
                    break;
                }
            }
            match keyword(&word) {
                Some(k) => TokenKind::Keyword(k),
                None => TokenKind::Ident(word),
            }
        } else if c.is_ascii_digit() {
            let mut num = String::new();
            while let Some(c) = cur.peek() {
                if c.is_ascii_digit() {
                    num.push(c);
                    cur.bump();
                } else {
                    break;
                }
            }
            if cur.peek() == Some('.') && cur.peek2().is_some_and(|c| c.is_ascii_digit()) {
                num.push('.');
                cur.bump();
                while let Some(c) = cur.peek() {
                    if c.is_ascii_digit() {
                        num.push(c);
                        cur.bump();
                    } else {
                        break;
                    }
                }
            }
            TokenKind::Number(num)
        } else if c == '\'' || c == '"' {
            let quote = c;
            cur.bump();
            let mut s = String::new();
            loop {
                match cur.bump() {
                    None => return Err(err("unterminated quoted text".into())),
                    Some(q) if q == quote => {
                        if cur.peek() == Some(quote) {
                            cur.bump();
                            s.push(quote);
                        } else {
                            break;
                        }
                    }
                    Some(other) => s.push(other),
                }
            }
            if quote == '\'' {
                TokenKind::Str(s)
            } else {
                if s.is_empty() {
                    return Err(err("empty quoted identifier".into()));
                }
                TokenKind::Ident(s)
            }
        } else {
            cur.bump();
            match c {
                '(' => TokenKind::LParen,
                ')' => TokenKind::RParen,
                ',' => TokenKind::Comma,
                ';' => TokenKind::Semicolon,
                '*' => TokenKind::Star,
                '+' => TokenKind::Plus,
                '/' => TokenKind::Slash,
                '=' => TokenKind::Eq,
                '.' => {
                    if cur.peek() == Some('.') {
                        cur.bump();
                        TokenKind::DotDot
                    } else {
                        TokenKind::Dot
                    }
                }
                '-' => {
                    if cur.peek() == Some('>') {
                        cur.bump();
                        TokenKind::Arrow
                    } else {
                        TokenKind::Minus
                    }
                }
                '<' => match cur.peek() {
                    Some('=') => {
                        cur.bump();
                        TokenKind::Le
                    }
                    Some('>') => {
                        cur.bump();
                        TokenKind::Ne
                    }
                    _ => TokenKind::Lt,
                },
                '>' => {
                    if cur.peek() == Some('=') {
                        cur.bump();
                        TokenKind::Ge
                    } else {
                        TokenKind::Gt
                    }
                }
                '!' if cur.peek() == Some('=') => {
                    cur.bump();
                    TokenKind::Ne
                }
                other => return Err(err(format!("unexpected character {other:?}"))),
            }
        };
        tokens.push(Token { kind, line, column });
    }
    tokens.push(Token {
        kind: TokenKind::Eof,
        line: cur.line,
        column: cur.column,
    });
    Ok(tokens)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(s: &str) -> Vec<TokenKind> {
        tokenize(s).unwrap().into_iter().map(|t| t.kind).collect()
    }

    #[test]
    fn ranges_and_decimals() {
        assert_eq!(
            kinds("1..3 1.5"),
            vec![
                TokenKind::Number("1".into()),
                TokenKind::DotDot,
                TokenKind::Number("3".into()),
                TokenKind::Number("1.5".into()),
                TokenKind::Eof
            ]
        );
    }

    #[test]
    fn comments_and_arrows() {
        assert_eq!(
            kinds("a -> b -- trailing\n- c"),
            vec![
                TokenKind::Ident("a".into()),
                TokenKind::Arrow,
                TokenKind::Ident("b".into()),
                TokenKind::Minus,
                TokenKind::Ident("c".into()),
                TokenKind::Eof
            ]
        );
    }

    #[test]
    fn keywords_ignore_case_but_identifiers_do_not() {
        assert_eq!(kinds("select")[0], TokenKind::Keyword(Keyword::Select));
        assert_eq!(kinds("Price")[0], TokenKind::Ident("Price".into()));
        assert_eq!(kinds("\"select\"")[0], TokenKind::Ident("select".into()));
    }

    #[test]
    fn positions_are_one_based() {
        let toks = tokenize("a\n  b").unwrap();
        assert_eq!((toks[1].line, toks[1].column), (2, 3));
        let e = tokenize("a ?").unwrap_err();
        assert_eq!((e.line, e.column), (1, 3));
    }
}
