use std::fmt;

use super::error::{CypherError, Position};

macro_rules! keywords {
    ($($kw:ident),* $(,)?) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
        pub enum Keyword { $($kw),* }

        impl Keyword {
            pub const ALL: &'static [Keyword] = &[$(Keyword::$kw),*];

            pub fn as_str(self) -> &'static str {
                match self { $(Keyword::$kw => stringify!($kw)),* }
            }
        }
    };
}

keywords!(
    MATCH, OPTIONAL, WHERE, RETURN, DISTINCT, AS, ORDER, BY, ASC, ASCENDING, DESC, DESCENDING, SKIP, LIMIT, AND, OR,
    XOR, NOT, IN, STARTS, ENDS, CONTAINS, WITH, IS, NULL, TRUE, FALSE, CREATE, MERGE, DELETE, DETACH, SET, REMOVE,
    UNWIND, UNION, CALL, FOREACH, CASE, YIELD, LOAD,
);

impl Keyword {
    /// Case-insensitive keyword lookup.
    pub fn lookup(word: &str) -> Option<Keyword> {
        Keyword::ALL.iter().copied().find(|k| k.as_str().eq_ignore_ascii_case(word))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Token {
    Keyword(Keyword),
    /// Plain or backquoted identifier; backquotes are already removed.
    Ident(String),
    Str(String),
    Int(i64),
    Float(f64),
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Colon,
    Comma,
    Dot,
    DotDot,
    Pipe,
    Star,
    Dash,
    Plus,
    Slash,
    Percent,
    Dollar,
    Gt,
    Lt,
    Eq,
    Neq,
    Le,
    Ge,
    Semicolon,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Token::Keyword(k) => return f.write_str(k.as_str()),
            Token::Ident(s) => return write!(f, "identifier `{s}`"),
            Token::Str(s) => return write!(f, "string {s:?}"),
            Token::Int(i) => return write!(f, "integer {i}"),
            Token::Float(x) => return write!(f, "float {x:?}"),
            Token::LParen => "'('",
            Token::RParen => "')'",
            Token::LBracket => "'['",
            Token::RBracket => "']'",
            Token::LBrace => "'{'",
            Token::RBrace => "'}'",
            Token::Colon => "':'",
            Token::Comma => "','",
            Token::Dot => "'.'",
            Token::DotDot => "'..'",
            Token::Pipe => "'|'",
            Token::Star => "'*'",
            Token::Dash => "'-'",
            Token::Plus => "'+'",
            Token::Slash => "'/'",
            Token::Percent => "'%'",
            Token::Dollar => "'$'",
            Token::Gt => "'>'",
            Token::Lt => "'<'",
            Token::Eq => "'='",
            Token::Neq => "'<>'",
            Token::Le => "'<='",
            Token::Ge => "'>='",
            Token::Semicolon => "';'",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spanned {
    pub token: Token,
    pub position: Position,
    /// Byte offset one past the token's last character.
    pub end: usize,
}

struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    line: usize,
    column: usize,
}

impl Cursor<'_> {
    fn position(&mut self, len: usize) -> Position {
        let offset = self.chars.peek().map_or(len, |&(i, _)| i);
        Position { offset, line: self.line, column: self.column }
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().map(|&(_, c)| c)
    }

    fn bump(&mut self) -> Option<char> {
        let (_, c) = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.bump();
            true
        } else {
            false
        }
    }
}

/// Splits query text into tokens. Keywords are case-insensitive; `//` and
/// `/* */` comments are skipped.
pub fn tokenize(text: &str) -> Result<Vec<Spanned>, CypherError> {
    let mut cur = Cursor { chars: text.char_indices().peekable(), line: 1, column: 1 };
    let mut out = Vec::new();
    loop {
        let position = cur.position(text.len());
        let Some(c) = cur.bump() else { break };
        let lex_err = |message: &str| CypherError::Lex { position, message: message.to_string() };
        let token = match c {
            c if c.is_whitespace() => continue,
            '/' if cur.peek() == Some('/') => {
                while cur.peek().is_some_and(|c| c != '\n') {
                    cur.bump();
                }
                continue;
            }
            '/' if cur.peek() == Some('*') => {
                cur.bump();
                let mut prev = '\0';
                loop {
                    match cur.bump() {
                        None => return Err(lex_err("unterminated block comment")),
                        Some('/') if prev == '*' => break,
                        Some(c) => prev = c,
                    }
                }
                continue;
            }
            '(' => Token::LParen,
            ')' => Token::RParen,
            '[' => Token::LBracket,
            ']' => Token::RBracket,
            '{' => Token::LBrace,
            '}' => Token::RBrace,
            ':' => Token::Colon,
            ',' => Token::Comma,
            ';' => Token::Semicolon,
            '|' => Token::Pipe,
            '*' => Token::Star,
            '-' => Token::Dash,
            '+' => Token::Plus,
            '/' => Token::Slash,
            '%' => Token::Percent,
            '$' => Token::Dollar,
            '=' => Token::Eq,
            '.' if cur.eat('.') => Token::DotDot,
            '.' => Token::Dot,
            '>' if cur.eat('=') => Token::Ge,
            '>' => Token::Gt,
            '<' if cur.eat('=') => Token::Le,
            '<' if cur.eat('>') => Token::Neq,
            '<' => Token::Lt,
            '\'' | '"' => Token::Str(lex_string(&mut cur, c).map_err(|m| lex_err(&m))?),
            '`' => {
                let mut name = String::new();
                loop {
                    match cur.bump() {
                        None => return Err(lex_err("unterminated backquoted identifier")),
                        Some('`') if cur.eat('`') => name.push('`'),
                        Some('`') => break,
                        Some(c) => name.push(c),
                    }
                }
                if name.is_empty() {
                    return Err(lex_err("empty backquoted identifier"));
                }
                Token::Ident(name)
            }
            c if c.is_ascii_digit() => lex_number(&mut cur, c).map_err(|m| lex_err(&m))?,
            c if c.is_alphabetic() || c == '_' => {
                let mut word = String::from(c);
                while let Some(c) = cur.peek().filter(|c| c.is_alphanumeric() || *c == '_') {
                    word.push(c);
                    cur.bump();
                }
                match Keyword::lookup(&word) {
                    Some(k) => Token::Keyword(k),
                    None => Token::Ident(word),
                }
            }
            other => return Err(lex_err(&format!("illegal character {other:?}"))),
        };
        let end = cur.chars.peek().map_or(text.len(), |&(i, _)| i);
        out.push(Spanned { token, position, end });
    }
    Ok(out)
}

fn lex_string(cur: &mut Cursor<'_>, quote: char) -> Result<String, String> {
    let mut s = String::new();
    loop {
        match cur.bump() {
            None => return Err("unterminated string literal".into()),
            Some(c) if c == quote => return Ok(s),
            Some('\\') => {
                let escaped = match cur.bump() {
                    None => return Err("unterminated string literal".into()),
                    Some('n') => '\n',
                    Some('t') => '\t',
                    Some('r') => '\r',
                    Some('b') => '\u{8}',
                    Some('f') => '\u{c}',
                    Some(c @ ('\\' | '\'' | '"')) => c,
                    Some('u') => {
                        let hex: String = (0..4).filter_map(|_| cur.bump()).collect();
                        u32::from_str_radix(&hex, 16)
                            .ok()
                            .and_then(char::from_u32)
                            .ok_or_else(|| format!("invalid unicode escape \\u{hex}"))?
                    }
                    Some(c) => return Err(format!("invalid escape sequence \\{c}")),
                };
                s.push(escaped);
            }
            Some(c) => s.push(c),
        }
    }
}

fn lex_number(cur: &mut Cursor<'_>, first: char) -> Result<Token, String> {
    let mut text = String::from(first);
    let mut is_float = false;
    while let Some(c) = cur.peek().filter(char::is_ascii_digit) {
        text.push(c);
        cur.bump();
    }
    // `1..3` is a range, not a float: only take the dot when a digit follows
    let mut lookahead = cur.chars.clone();
    if let (Some((_, '.')), Some((_, d))) = (lookahead.next(), lookahead.next()) {
        if d.is_ascii_digit() {
            cur.bump();
            text.push('.');
            is_float = true;
            while let Some(c) = cur.peek().filter(char::is_ascii_digit) {
                text.push(c);
                cur.bump();
            }
        }
    }
    if matches!(cur.peek(), Some('e' | 'E')) {
        let mut lookahead = cur.chars.clone();
        lookahead.next();
        let next = lookahead.next().map(|(_, c)| c);
        let after = lookahead.next().map(|(_, c)| c);
        let exponent = match (next, after) {
            (Some(d), _) if d.is_ascii_digit() => true,
            (Some('+' | '-'), Some(d)) if d.is_ascii_digit() => true,
            _ => false,
        };
        if exponent {
            is_float = true;
            text.push('e');
            cur.bump();
            if let Some(sign @ ('+' | '-')) = cur.peek() {
                text.push(sign);
                cur.bump();
            }
            while let Some(c) = cur.peek().filter(char::is_ascii_digit) {
                text.push(c);
                cur.bump();
            }
        }
    }
    if cur.peek().is_some_and(|c| c.is_alphabetic() || c == '_') {
        return Err(format!("malformed number starting with {text:?}"));
    }
    if is_float {
        match text.parse::<f64>() {
            Ok(x) if x.is_finite() => Ok(Token::Float(x)),
            _ => Err(format!("float {text} out of range")),
        }
    } else {
        text.parse::<i64>().map(Token::Int).map_err(|_| format!("integer {text} out of range"))
    }
}
