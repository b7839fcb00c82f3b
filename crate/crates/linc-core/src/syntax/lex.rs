use super::Span;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Num(usize),
    // keywords
    Kind,
    Type,
    Define,
    Mu,
    Nu,
    Proof,
    Goal,
    Invariant,
    For,
    Forall,
    Exists,
    True,
    False,
    // punctuation
    Colon,
    ColonEq,
    Dot,
    Comma,
    Semi,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Turnstile,
    Arrow,
    Implies,
    AndOp,
    OrOp,
    EqOp,
    Backslash,
    At,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LexError {
    pub message: String,
    pub span: Span,
}

pub fn lex(src: &str) -> Result<Vec<Token>, LexError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0usize;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        // line comments
        if c == '%' || (c == '/' && bytes.get(i + 1) == Some(&b'/')) {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        let start = i;
        let two = if i + 1 < bytes.len() {
            &src[i..i + 2]
        } else {
            ""
        };
        let tok = match two {
            ":=" => {
                i += 2;
                Some(Tok::ColonEq)
            }
            "|-" => {
                i += 2;
                Some(Tok::Turnstile)
            }
            "->" => {
                i += 2;
                Some(Tok::Arrow)
            }
            "=>" => {
                i += 2;
                Some(Tok::Implies)
            }
            "/\\" => {
                i += 2;
                Some(Tok::AndOp)
            }
            "\\/" => {
                i += 2;
                Some(Tok::OrOp)
            }
            _ => None,
        };
        let tok = match tok {
            Some(t) => t,
            None => match c {
                ':' => {
                    i += 1;
                    Tok::Colon
                }
                '.' => {
                    i += 1;
                    Tok::Dot
                }
                ',' => {
                    i += 1;
                    Tok::Comma
                }
                ';' => {
                    i += 1;
                    Tok::Semi
                }
                '(' => {
                    i += 1;
                    Tok::LParen
                }
                ')' => {
                    i += 1;
                    Tok::RParen
                }
                '[' => {
                    i += 1;
                    Tok::LBracket
                }
                ']' => {
                    i += 1;
                    Tok::RBracket
                }
                '=' => {
                    i += 1;
                    Tok::EqOp
                }
                '\\' => {
                    i += 1;
                    Tok::Backslash
                }
                '@' => {
                    i += 1;
                    Tok::At
                }
                _ if c.is_ascii_digit() => {
                    let mut j = i;
                    while j < bytes.len() && (bytes[j] as char).is_ascii_digit() {
                        j += 1;
                    }
                    let n: usize = src[i..j].parse().map_err(|_| LexError {
                        message: "number too large".into(),
                        span: Span::new(i, j),
                    })?;
                    i = j;
                    Tok::Num(n)
                }
                _ if c.is_ascii_alphabetic() || c == '_' => {
                    let mut j = i;
                    while j < bytes.len() {
                        let cj = bytes[j] as char;
                        if cj.is_ascii_alphanumeric() || cj == '_' || cj == '\'' {
                            j += 1;
                        } else {
                            break;
                        }
                    }
                    let word = &src[i..j];
                    i = j;
                    match word {
                        "kind" => Tok::Kind,
                        "type" => Tok::Type,
                        "define" => Tok::Define,
                        "mu" => Tok::Mu,
                        "nu" => Tok::Nu,
                        "proof" => Tok::Proof,
                        "goal" => Tok::Goal,
                        "invariant" => Tok::Invariant,
                        "for" => Tok::For,
                        "forall" => Tok::Forall,
                        "exists" => Tok::Exists,
                        "true" => Tok::True,
                        "false" => Tok::False,
                        _ => Tok::Ident(word.to_string()),
                    }
                }
                _ => {
                    return Err(LexError {
                        message: format!("unexpected character {c:?}"),
                        span: Span::new(i, i + 1),
                    })
                }
            },
        };
        out.push(Token {
            tok,
            span: Span::new(start, i),
        });
    }
    Ok(out)
}
