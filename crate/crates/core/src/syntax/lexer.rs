use std::fmt;

use super::ParseError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    Ident(String),
    Class,
    Extends,
    Signal,
    Super,
    This,
    Let,
    In,
    New,
    Subscribe,
    /// `unit`, the empty expression.
    UnitLit,
    /// `Unit`, the type.
    UnitTy,
    Object,
    LBrace,
    RBrace,
    LParen,
    RParen,
    Semi,
    Comma,
    Dot,
    Eq,
    Eof,
}

impl TokenKind {
    fn keyword(word: &str) -> Option<TokenKind> {
        Some(match word {
            "class" => TokenKind::Class,
            "extends" => TokenKind::Extends,
            "signal" => TokenKind::Signal,
            "super" => TokenKind::Super,
            "this" => TokenKind::This,
            "let" => TokenKind::Let,
            "in" => TokenKind::In,
            "new" => TokenKind::New,
            "subscribe" => TokenKind::Subscribe,
            "unit" => TokenKind::UnitLit,
            "Unit" => TokenKind::UnitTy,
            "Object" => TokenKind::Object,
            _ => return None,
        })
    }

    pub fn is_keyword(&self) -> bool {
        !matches!(
            self,
            TokenKind::Ident(_)
                | TokenKind::LBrace
                | TokenKind::RBrace
                | TokenKind::LParen
                | TokenKind::RParen
                | TokenKind::Semi
                | TokenKind::Comma
                | TokenKind::Dot
                | TokenKind::Eq
                | TokenKind::Eof
        )
    }
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TokenKind::Ident(name) => return write!(f, "identifier `{name}`"),
            TokenKind::Class => "`class`",
            TokenKind::Extends => "`extends`",
            TokenKind::Signal => "`signal`",
            TokenKind::Super => "`super`",
            TokenKind::This => "`this`",
            TokenKind::Let => "`let`",
            TokenKind::In => "`in`",
            TokenKind::New => "`new`",
            TokenKind::Subscribe => "`subscribe`",
            TokenKind::UnitLit => "`unit`",
            TokenKind::UnitTy => "`Unit`",
            TokenKind::Object => "`Object`",
            TokenKind::LBrace => "`{`",
            TokenKind::RBrace => "`}`",
            TokenKind::LParen => "`(`",
            TokenKind::RParen => "`)`",
            TokenKind::Semi => "`;`",
            TokenKind::Comma => "`,`",
            TokenKind::Dot => "`.`",
            TokenKind::Eq => "`=`",
            TokenKind::Eof => "end of input",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub line: u32,
    pub col: u32,
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut tokens = Vec::new();
    let mut chars = src.chars().peekable();
    let (mut line, mut col) = (1u32, 1u32);

    macro_rules! bump {
        () => {{
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                col = 1;
            } else if c.is_some() {
                col += 1;
            }
            c
        }};
    }

    while let Some(&c) = chars.peek() {
        let (tl, tc) = (line, col);
        if c.is_whitespace() {
            bump!();
            continue;
        }
        if c == '/' {
            bump!();
            match chars.peek() {
                Some('/') => {
                    while let Some(&c) = chars.peek() {
                        if c == '\n' {
                            break;
                        }
                        bump!();
                    }
                    continue;
                }
                Some('*') => {
                    bump!();
                    let mut closed = false;
                    while let Some(c) = bump!() {
                        if c == '*' && chars.peek() == Some(&'/') {
                            bump!();
                            closed = true;
                            break;
                        }
                    }
                    if !closed {
                        return Err(ParseError::invalid(tl, tc, "unterminated block comment"));
                    }
                    continue;
                }
                _ => return Err(ParseError::invalid(tl, tc, "unexpected character `/`")),
            }
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let mut word = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_ascii_alphanumeric() || c == '_' {
                    word.push(c);
                    bump!();
                } else {
                    break;
                }
            }
            let kind = TokenKind::keyword(&word).unwrap_or(TokenKind::Ident(word));
            tokens.push(Token {
                kind,
                line: tl,
                col: tc,
            });
            continue;
        }
        let kind = match c {
            '{' => TokenKind::LBrace,
            '}' => TokenKind::RBrace,
            '(' => TokenKind::LParen,
            ')' => TokenKind::RParen,
            ';' => TokenKind::Semi,
            ',' => TokenKind::Comma,
            '.' => TokenKind::Dot,
            '=' => TokenKind::Eq,
            '@' => {
                return Err(ParseError::invalid(
                    tl,
                    tc,
                    "locations (`@`) are runtime values and cannot appear in source programs",
                ))
            }
            other => {
                return Err(ParseError::invalid(
                    tl,
                    tc,
                    format!("unexpected character `{other}`"),
                ))
            }
        };
        bump!();
        tokens.push(Token {
            kind,
            line: tl,
            col: tc,
        });
    }
    tokens.push(Token {
        kind: TokenKind::Eof,
        line,
        col,
    });
    Ok(tokens)
}
