use super::SyntaxError;

pub const KEYWORDS: &[&str] = &[
    "CONSTRUCT", "SELECT", "CONSELECT", "WHERE", "BASIC", "JOIN", "UNION", "BIND", "AS", "FILTER",
    "BUILD", "EMPTY", "AND", "OR", "NOT", "BY", "DISTINCT", "COUNT", "SUM", "AVG", "MIN", "MAX",
    "node", "true", "false",
];

fn word_start(c: char) -> bool {
    c == '_' || c.is_alphabetic()
}

fn word_char(c: char) -> bool {
    c == '_' || c.is_alphanumeric()
}

/// True for strings printable without quotes: identifier-shaped and not reserved.
pub fn is_bare_word(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if word_start(c) => {}
        _ => return false,
    }
    chars.all(word_char) && !KEYWORDS.contains(&s)
}

pub fn is_var_name(s: &str) -> bool {
    !s.is_empty() && s.chars().all(word_char)
}

pub fn escape_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c if c.is_control() => out.push_str(&format!("\\u{{{:x}}}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

#[derive(Clone, Debug, PartialEq)]
pub enum Tok {
    Word(String),
    Var(String),
    Int(String),
    Float(String),
    Str(String),
    LBrace,
    RBrace,
    LParen,
    RParen,
    Dot,
    Comma,
    Plus,
    Minus,
    Star,
    Slash,
    Eq,
    Lt,
    Gt,
    Pipe,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Word(w) => format!("`{w}`"),
            Tok::Var(v) => format!("`?{v}`"),
            Tok::Int(s) | Tok::Float(s) => format!("number `{s}`"),
            Tok::Str(_) => "string literal".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Lt => "`<`".into(),
            Tok::Gt => "`>`".into(),
            Tok::Pipe => "`|`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
    pub start: usize,
    pub end: usize,
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, SyntaxError> {
    Lexer::new(src).run()
}

struct Lexer<'a> {
    src: &'a str,
    chars: Vec<(usize, char)>,
    i: usize,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src,
            chars: src.char_indices().collect(),
            i: 0,
            line: 1,
            col: 1,
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.i).map(|&(_, c)| c)
    }

    fn peek_at(&self, k: usize) -> Option<char> {
        self.chars.get(self.i + k).map(|&(_, c)| c)
    }

    fn offset(&self) -> usize {
        self.chars.get(self.i).map_or(self.src.len(), |&(o, _)| o)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.i += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn err(&self, line: usize, col: usize, msg: impl Into<String>) -> SyntaxError {
        SyntaxError::new(line, col, msg)
    }

    fn run(mut self) -> Result<Vec<Token>, SyntaxError> {
        let mut out = Vec::new();
        loop {
            while let Some(c) = self.peek() {
                if c.is_whitespace() {
                    self.bump();
                } else if c == '#' {
                    while self.peek().is_some_and(|c| c != '\n') {
                        self.bump();
                    }
                } else {
                    break;
                }
            }
            let (line, col, start) = (self.line, self.col, self.offset());
            let Some(c) = self.peek() else {
                out.push(Token {
                    tok: Tok::Eof,
                    line,
                    col,
                    start,
                    end: start,
                });
                return Ok(out);
            };
            let tok = match c {
                '{' | '}' | '(' | ')' | '.' | ',' | '+' | '-' | '*' | '/' | '=' | '<' | '>'
                | '|' => {
                    self.bump();
                    match c {
                        '{' => Tok::LBrace,
                        '}' => Tok::RBrace,
                        '(' => Tok::LParen,
                        ')' => Tok::RParen,
                        '.' => Tok::Dot,
                        ',' => Tok::Comma,
                        '+' => Tok::Plus,
                        '-' => Tok::Minus,
                        '*' => Tok::Star,
                        '/' => Tok::Slash,
                        '=' => Tok::Eq,
                        '<' => Tok::Lt,
                        '>' => Tok::Gt,
                        _ => Tok::Pipe,
                    }
                }
                '?' => {
                    self.bump();
                    let s = self.take_while(word_char);
                    if s.is_empty() {
                        return Err(self.err(line, col, "expected a variable name after `?`"));
                    }
                    Tok::Var(s)
                }
                '"' => self.string(line, col)?,
                c if c.is_ascii_digit() => self.number(),
                c if word_start(c) => Tok::Word(self.take_while(word_char)),
                c => return Err(self.err(line, col, format!("unexpected character `{c}`"))),
            };
            out.push(Token {
                tok,
                line,
                col,
                start,
                end: self.offset(),
            });
        }
    }

    fn take_while(&mut self, f: impl Fn(char) -> bool) -> String {
        let mut s = String::new();
        while let Some(c) = self.peek().filter(|&c| f(c)) {
            s.push(c);
            self.bump();
        }
        s
    }

    fn number(&mut self) -> Tok {
        let mut s = self.take_while(|c| c.is_ascii_digit());
        let mut float = false;
        if self.peek() == Some('.') && self.peek_at(1).is_some_and(|c| c.is_ascii_digit()) {
            self.bump();
            s.push('.');
            s.push_str(&self.take_while(|c| c.is_ascii_digit()));
            float = true;
        }
        if matches!(self.peek(), Some('e' | 'E')) {
            let digit_at = if matches!(self.peek_at(1), Some('+' | '-')) { 2 } else { 1 };
            if self.peek_at(digit_at).is_some_and(|c| c.is_ascii_digit()) {
                for _ in 0..digit_at {
                    s.push(self.bump().unwrap());
                }
                s.push_str(&self.take_while(|c| c.is_ascii_digit()));
                float = true;
            }
        }
        if float {
            Tok::Float(s)
        } else {
            Tok::Int(s)
        }
    }

    fn string(&mut self, line: usize, col: usize) -> Result<Tok, SyntaxError> {
        self.bump();
        let mut s = String::new();
        loop {
            let (l, c) = (self.line, self.col);
            match self.bump() {
                None => return Err(self.err(line, col, "unterminated string literal")),
                Some('"') => return Ok(Tok::Str(s)),
                Some('\\') => match self.bump() {
                    Some('"') => s.push('"'),
                    Some('\\') => s.push('\\'),
                    Some('n') => s.push('\n'),
                    Some('t') => s.push('\t'),
                    Some('r') => s.push('\r'),
                    Some('u') => {
                        if self.bump() != Some('{') {
                            return Err(self.err(l, c, "expected `{` after `\\u`"));
                        }
                        let hex = self.take_while(|c| c.is_ascii_hexdigit());
                        if self.bump() != Some('}') {
                            return Err(self.err(l, c, "unterminated `\\u{...}` escape"));
                        }
                        let ch = u32::from_str_radix(&hex, 16)
                            .ok()
                            .and_then(char::from_u32)
                            .ok_or_else(|| self.err(l, c, "invalid unicode escape"))?;
                        s.push(ch);
                    }
                    _ => return Err(self.err(l, c, "unknown escape sequence")),
                },
                Some(ch) => s.push(ch),
            }
        }
    }
}
