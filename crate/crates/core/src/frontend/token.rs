use alloc::string::String;
use core::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Default, Hash)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

impl Pos {
    pub fn new(line: u32, col: u32) -> Self {
        Pos { line, col }
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Keyword {
    Each,
    Some,
    Setof,
    Listof,
    Sumof,
    Productof,
    Countof,
    Maxof,
    Minof,
    And,
    Or,
    Not,
    Implies,
    In,
    Def,
    Return,
    If,
    Elif,
    Else,
    While,
    For,
    True,
    False,
}

impl Keyword {
    pub fn from_ident(s: &str) -> Option<Keyword> {
        Some(match s {
            "each" => Keyword::Each,
            "some" => Keyword::Some,
            "setof" => Keyword::Setof,
            "listof" => Keyword::Listof,
            "sumof" => Keyword::Sumof,
            "productof" => Keyword::Productof,
            "countof" => Keyword::Countof,
            "maxof" => Keyword::Maxof,
            "minof" => Keyword::Minof,
            "and" => Keyword::And,
            "or" => Keyword::Or,
            "not" => Keyword::Not,
            "implies" => Keyword::Implies,
            "in" => Keyword::In,
            "def" => Keyword::Def,
            "return" => Keyword::Return,
            "if" => Keyword::If,
            "elif" => Keyword::Elif,
            "else" => Keyword::Else,
            "while" => Keyword::While,
            "for" => Keyword::For,
            "True" => Keyword::True,
            "False" => Keyword::False,
            _ => return None,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Punct {
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Comma,
    Colon,
    Dot,
    Assign,
    EqEq,
    NotEq,
    Lt,
    Le,
    Gt,
    Ge,
    Plus,
    Minus,
    Star,
    SlashSlash,
    Percent,
    Pipe,
    Amp,
}

impl Punct {
    pub fn text(self) -> &'static str {
        match self {
            Punct::LParen => "(",
            Punct::RParen => ")",
            Punct::LBracket => "[",
            Punct::RBracket => "]",
            Punct::LBrace => "{",
            Punct::RBrace => "}",
            Punct::Comma => ",",
            Punct::Colon => ":",
            Punct::Dot => ".",
            Punct::Assign => "=",
            Punct::EqEq => "==",
            Punct::NotEq => "!=",
            Punct::Lt => "<",
            Punct::Le => "<=",
            Punct::Gt => ">",
            Punct::Ge => ">=",
            Punct::Plus => "+",
            Punct::Minus => "-",
            Punct::Star => "*",
            Punct::SlashSlash => "//",
            Punct::Percent => "%",
            Punct::Pipe => "|",
            Punct::Amp => "&",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TokenKind {
    Keyword(Keyword),
    Ident,
    Int(i64),
    Str(String),
    Punct(Punct),
    Indent,
    Dedent,
    Newline,
    Eof,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub lexeme: String,
    pub pos: Pos,
}

impl Token {
    /// Short description used in "expected X, found Y" diagnostics.
    pub fn describe(&self) -> String {
        use alloc::format;
        match &self.kind {
            TokenKind::Keyword(_) => format!("keyword '{}'", self.lexeme),
            TokenKind::Ident => format!("name '{}'", self.lexeme),
            TokenKind::Int(_) => format!("integer {}", self.lexeme),
            TokenKind::Str(_) => String::from("string literal"),
            TokenKind::Punct(p) => format!("'{}'", p.text()),
            TokenKind::Indent => String::from("indent"),
            TokenKind::Dedent => String::from("dedent"),
            TokenKind::Newline => String::from("end of line"),
            TokenKind::Eof => String::from("end of file"),
        }
    }
}
