//! Tokenizer for the formula grammar. Tracks line/column for error messages.

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Tok {
    Ident(String),
    Int(i64),
    At,
    Tilde,
    Amp,
    Pipe,
    Arrow,
    LParen,
    RParen,
    LAngle,
    RAngle,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Dot,
    Lt,
    Le,
    Eq,
    Gt,
    Ge,
}

impl std::fmt::Display for Tok {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "identifier `{s}`"),
            Tok::Int(n) => write!(f, "integer `{n}`"),
            Tok::At => write!(f, "`@`"),
            Tok::Tilde => write!(f, "`~`"),
            Tok::Amp => write!(f, "`&`"),
            Tok::Pipe => write!(f, "`|`"),
            Tok::Arrow => write!(f, "`->`"),
            Tok::LParen => write!(f, "`(`"),
            Tok::RParen => write!(f, "`)`"),
            Tok::LAngle => write!(f, "`<`"),
            Tok::RAngle => write!(f, "`>`"),
            Tok::LBracket => write!(f, "`[`"),
            Tok::RBracket => write!(f, "`]`"),
            Tok::LBrace => write!(f, "`{{`"),
            Tok::RBrace => write!(f, "`}}`"),
            Tok::Dot => write!(f, "`.`"),
            Tok::Lt => write!(f, "`<`"),
            Tok::Le => write!(f, "`<=`"),
            Tok::Eq => write!(f, "`=`"),
            Tok::Gt => write!(f, "`>`"),
            Tok::Ge => write!(f, "`>=`"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Spanned {
    pub tok: Tok,
    pub line: u32,
    pub col: u32,
}

pub struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: u32,
    col: u32,
    /// Inside `{...}` the characters `< <= = > >=` are comparison operators;
    /// outside, `<`/`>` delimit modalities.
    brace_depth: u32,
}

impl<'a> Lexer<'a> {
    pub fn new(src: &'a str) -> Self {
        Lexer {
            src: src.as_bytes(),
            pos: 0,
            line: 1,
            col: 1,
            brace_depth: 0,
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let b = self.peek()?;
        self.pos += 1;
        if b == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(b)
    }

    pub fn tokenize(mut self) -> Result<Vec<Spanned>, (String, u32, u32)> {
        let mut out = Vec::new();
        loop {
            while matches!(self.peek(), Some(b) if b.is_ascii_whitespace()) {
                self.bump();
            }
            let (line, col) = (self.line, self.col);
            let Some(b) = self.peek() else { break };
            let tok = match b {
                b'@' => {
                    self.bump();
                    Tok::At
                }
                b'~' => {
                    self.bump();
                    Tok::Tilde
                }
                b'&' => {
                    self.bump();
                    Tok::Amp
                }
                b'|' => {
                    self.bump();
                    Tok::Pipe
                }
                b'(' => {
                    self.bump();
                    Tok::LParen
                }
                b')' => {
                    self.bump();
                    Tok::RParen
                }
                b'[' => {
                    self.bump();
                    Tok::LBracket
                }
                b']' => {
                    self.bump();
                    Tok::RBracket
                }
                b'{' => {
                    self.bump();
                    self.brace_depth += 1;
                    Tok::LBrace
                }
                b'}' => {
                    self.bump();
                    self.brace_depth = self.brace_depth.saturating_sub(1);
                    Tok::RBrace
                }
                b'.' => {
                    self.bump();
                    Tok::Dot
                }
                b'=' => {
                    self.bump();
                    Tok::Eq
                }
                b'<' => {
                    self.bump();
                    if self.peek() == Some(b'=') {
                        self.bump();
                        Tok::Le
                    } else if self.brace_depth > 0 {
                        Tok::Lt
                    } else {
                        Tok::LAngle
                    }
                }
                b'>' => {
                    self.bump();
                    if self.peek() == Some(b'=') {
                        self.bump();
                        Tok::Ge
                    } else if self.brace_depth > 0 {
                        Tok::Gt
                    } else {
                        Tok::RAngle
                    }
                }
                b'-' => {
                    self.bump();
                    match self.peek() {
                        Some(b'>') => {
                            self.bump();
                            Tok::Arrow
                        }
                        Some(d) if d.is_ascii_digit() => {
                            let n = self.lex_number()?;
                            Tok::Int(-n)
                        }
                        _ => return Err(("stray `-`".into(), line, col)),
                    }
                }
                d if d.is_ascii_digit() => Tok::Int(self.lex_number()?),
                a if a.is_ascii_alphabetic() || a == b'_' => {
                    let mut s = String::new();
                    while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == b'_')
                    {
                        s.push(self.bump().unwrap() as char);
                    }
                    Tok::Ident(s)
                }
                other => {
                    return Err((format!("unexpected character `{}`", other as char), line, col))
                }
            };
            out.push(Spanned { tok, line, col });
        }
        Ok(out)
    }

    fn lex_number(&mut self) -> Result<i64, (String, u32, u32)> {
        let (line, col) = (self.line, self.col);
        let mut n: i64 = 0;
        while matches!(self.peek(), Some(d) if d.is_ascii_digit()) {
            let d = (self.bump().unwrap() - b'0') as i64;
            n = n
                .checked_mul(10)
                .and_then(|n| n.checked_add(d))
                .ok_or_else(|| ("integer literal overflows".to_string(), line, col))?;
        }
        Ok(n)
    }
}
