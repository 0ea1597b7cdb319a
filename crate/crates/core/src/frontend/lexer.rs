//! Indentation-aware tokenizer.
//!
//! Leading spaces open and close blocks (`Indent`/`Dedent`). Inside brackets
//! line breaks are ignored, so multi-line literals need no continuation marks.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::token::{Keyword, Pos, Punct, Token, TokenKind};
use super::ParseError;

pub fn lex(source: &str) -> Result<Vec<Token>, ParseError> {
    Lexer::new(source).run()
}

struct Lexer {
    chars: Vec<char>,
    i: usize,
    line: u32,
    col: u32,
    indents: Vec<u32>,
    depth: usize,
    tokens: Vec<Token>,
}

impl Lexer {
    fn new(src: &str) -> Self {
        Lexer {
            chars: src.chars().filter(|&c| c != '\r').collect(),
            i: 0,
            line: 1,
            col: 1,
            indents: vec![0],
            depth: 0,
            tokens: Vec::new(),
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.i).copied()
    }

    fn peek_at(&self, n: usize) -> Option<char> {
        self.chars.get(self.i + n).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.get(self.i).copied()?;
        self.i += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn pos(&self) -> Pos {
        Pos::new(self.line, self.col)
    }

    fn push(&mut self, kind: TokenKind, lexeme: String, pos: Pos) {
        self.tokens.push(Token { kind, lexeme, pos });
    }

    fn run(mut self) -> Result<Vec<Token>, ParseError> {
        let mut at_line_start = true;
        loop {
            if at_line_start && self.depth == 0 {
                if !self.line_start()? {
                    break;
                }
                at_line_start = false;
            }
            let Some(c) = self.peek() else { break };
            let pos = self.pos();
            match c {
                '\t' => {
                    return Err(ParseError::new(
                        "tab characters are not allowed; indent with spaces",
                        pos,
                    ))
                }
                ' ' => {
                    self.bump();
                }
                '#' => {
                    while let Some(c) = self.peek() {
                        if c == '\n' {
                            break;
                        }
                        if c == '\t' {
                            return Err(ParseError::new(
                                "tab characters are not allowed; indent with spaces",
                                self.pos(),
                            ));
                        }
                        self.bump();
                    }
                }
                '\n' => {
                    self.bump();
                    if self.depth == 0 {
                        self.push(TokenKind::Newline, String::from("\n"), pos);
                        at_line_start = true;
                    }
                }
                '0'..='9' => self.number(pos)?,
                '\'' | '"' => self.string(pos)?,
                c if c == '_' || c.is_alphabetic() => self.word(pos),
                _ => self.punct(pos)?,
            }
        }
        if self.depth > 0 {
            return Err(ParseError::new("unexpected end of file inside brackets", self.pos()));
        }
        let pos = self.pos();
        if !matches!(self.tokens.last().map(|t| &t.kind), None | Some(TokenKind::Newline)) {
            self.push(TokenKind::Newline, String::new(), pos);
        }
        while self.indents.len() > 1 {
            self.indents.pop();
            self.push(TokenKind::Dedent, String::new(), pos);
        }
        self.push(TokenKind::Eof, String::new(), pos);
        Ok(self.tokens)
    }

    /// Measures indentation of the next non-blank line and emits block tokens.
    /// Returns false at end of input.
    fn line_start(&mut self) -> Result<bool, ParseError> {
        loop {
            let mut width = 0u32;
            while let Some(c) = self.peek() {
                match c {
                    ' ' => {
                        width += 1;
                        self.bump();
                    }
                    '\t' => {
                        return Err(ParseError::new(
                            "tab characters are not allowed; indent with spaces",
                            self.pos(),
                        ))
                    }
                    _ => break,
                }
            }
            match self.peek() {
                None => return Ok(false),
                Some('\n') => {
                    self.bump();
                    continue;
                }
                Some('#') => {
                    while let Some(c) = self.peek() {
                        if c == '\n' {
                            break;
                        }
                        if c == '\t' {
                            return Err(ParseError::new(
                                "tab characters are not allowed; indent with spaces",
                                self.pos(),
                            ));
                        }
                        self.bump();
                    }
                    continue;
                }
                Some(_) => {
                    let pos = self.pos();
                    let current = *self.indents.last().unwrap_or(&0);
                    if width > current {
                        self.indents.push(width);
                        self.push(TokenKind::Indent, String::new(), pos);
                    } else if width < current {
                        while *self.indents.last().unwrap_or(&0) > width {
                            self.indents.pop();
                            self.push(TokenKind::Dedent, String::new(), pos);
                        }
                        if *self.indents.last().unwrap_or(&0) != width {
                            return Err(ParseError::new(
                                "dedent does not match any outer indentation level",
                                pos,
                            ));
                        }
                    }
                    return Ok(true);
                }
            }
        }
    }

    fn number(&mut self, pos: Pos) -> Result<(), ParseError> {
        let mut text = String::new();
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() {
                text.push(c);
                self.bump();
            } else {
                break;
            }
        }
        if let Some(c) = self.peek() {
            if c == '_' || c.is_alphabetic() {
                return Err(ParseError::new(format!("invalid number literal '{}{}'", text, c), pos));
            }
        }
        let n: i64 = text
            .parse()
            .map_err(|_| ParseError::new(format!("integer literal {} does not fit in 64 bits", text), pos))?;
        self.push(TokenKind::Int(n), text, pos);
        Ok(())
    }

    fn string(&mut self, pos: Pos) -> Result<(), ParseError> {
        let quote = self.bump().unwrap_or('\'');
        let mut value = String::new();
        let mut lexeme = String::from(quote);
        loop {
            match self.peek() {
                None | Some('\n') => return Err(ParseError::new("unterminated string literal", pos)),
                Some('\t') => {
                    return Err(ParseError::new(
                        "tab characters are not allowed; indent with spaces",
                        self.pos(),
                    ))
                }
                Some('\\') => {
                    let esc_pos = self.pos();
                    self.bump();
                    let escaped = match self.peek() {
                        Some('\\') => '\\',
                        Some('\'') => '\'',
                        Some('"') => '"',
                        Some('n') => '\n',
                        _ => return Err(ParseError::new("unknown escape sequence", esc_pos)),
                    };
                    lexeme.push('\\');
                    lexeme.push(self.bump().unwrap_or(escaped));
                    value.push(escaped);
                }
                Some(c) if c == quote => {
                    self.bump();
                    lexeme.push(c);
                    break;
                }
                Some(c) => {
                    self.bump();
                    lexeme.push(c);
                    value.push(c);
                }
            }
        }
        self.push(TokenKind::Str(value), lexeme, pos);
        Ok(())
    }

    fn word(&mut self, pos: Pos) {
        let mut text = String::new();
        while let Some(c) = self.peek() {
            if c == '_' || c.is_alphanumeric() {
                text.push(c);
                self.bump();
            } else {
                break;
            }
        }
        let kind = match Keyword::from_ident(&text) {
            Some(k) => TokenKind::Keyword(k),
            None => TokenKind::Ident,
        };
        self.push(kind, text, pos);
    }

    fn punct(&mut self, pos: Pos) -> Result<(), ParseError> {
        let c = self.peek().unwrap_or('\0');
        let next = self.peek_at(1);
        let (p, len) = match (c, next) {
            ('=', Some('=')) => (Punct::EqEq, 2),
            ('!', Some('=')) => (Punct::NotEq, 2),
            ('<', Some('=')) => (Punct::Le, 2),
            ('>', Some('=')) => (Punct::Ge, 2),
            ('/', Some('/')) => (Punct::SlashSlash, 2),
            ('(', _) => (Punct::LParen, 1),
            (')', _) => (Punct::RParen, 1),
            ('[', _) => (Punct::LBracket, 1),
            (']', _) => (Punct::RBracket, 1),
            ('{', _) => (Punct::LBrace, 1),
            ('}', _) => (Punct::RBrace, 1),
            (',', _) => (Punct::Comma, 1),
            (':', _) => (Punct::Colon, 1),
            ('.', _) => (Punct::Dot, 1),
            ('=', _) => (Punct::Assign, 1),
            ('<', _) => (Punct::Lt, 1),
            ('>', _) => (Punct::Gt, 1),
            ('+', _) => (Punct::Plus, 1),
            ('-', _) => (Punct::Minus, 1),
            ('*', _) => (Punct::Star, 1),
            ('%', _) => (Punct::Percent, 1),
            ('|', _) => (Punct::Pipe, 1),
            ('&', _) => (Punct::Amp, 1),
            _ => return Err(ParseError::new(format!("unexpected character {:?}", c), pos)),
        };
        for _ in 0..len {
            self.bump();
        }
        match p {
            Punct::LParen | Punct::LBracket | Punct::LBrace => self.depth += 1,
            Punct::RParen | Punct::RBracket | Punct::RBrace => {
                if self.depth == 0 {
                    return Err(ParseError::new(format!("unmatched '{}'", p.text()), pos));
                }
                self.depth -= 1;
            }
            _ => {}
        }
        self.push(TokenKind::Punct(p), String::from(p.text()), pos);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<TokenKind> {
        lex(src).unwrap().into_iter().map(|t| t.kind).collect()
    }

    #[test]
    fn simple_assignment() {
        assert_eq!(
            kinds("x = 1\n"),
            vec![
                TokenKind::Ident,
                TokenKind::Punct(Punct::Assign),
                TokenKind::Int(1),
                TokenKind::Newline,
                TokenKind::Eof
            ]
        );
    }

    #[test]
    fn block_structure() {
        let k = kinds("if a:\n  b\n");
        let indent = k.iter().position(|t| *t == TokenKind::Indent).unwrap();
        assert_eq!(k[indent + 1], TokenKind::Ident);
        assert_eq!(&k[k.len() - 2..], &[TokenKind::Dedent, TokenKind::Eof]);
        let indents = k.iter().filter(|t| **t == TokenKind::Indent).count();
        let dedents = k.iter().filter(|t| **t == TokenKind::Dedent).count();
        assert_eq!(indents, dedents);
    }

    #[test]
    fn tabs_rejected() {
        let err = lex("x\t= 1").unwrap_err();
        assert_eq!(err.pos, Pos::new(1, 2));
        assert!(lex("if a:\n\tb\n").is_err());
    }

    #[test]
    fn bad_dedent_and_strings() {
        assert!(lex("if a:\n    b\n  c\n").is_err());
        assert!(lex("x = 'abc\n").is_err());
        assert!(lex("x = 'a\\qb'\n").is_err());
        let toks = lex("s = \"it's\\n\"\n").unwrap();
        assert_eq!(toks[2].kind, TokenKind::Str(String::from("it's\n")));
    }

    #[test]
    fn brackets_join_lines_and_crlf() {
        let k = kinds("m = {\r\n  'a': 1,\r\n    'b': 2 }\r\n");
        assert_eq!(k.iter().filter(|t| **t == TokenKind::Newline).count(), 1);
        assert!(!k.contains(&TokenKind::Indent));
    }

    #[test]
    fn comments_and_blank_lines() {
        let k = kinds("# head\n\nx = 1  # trailing\n   \n  # indented comment\ny = 2\n");
        assert!(!k.contains(&TokenKind::Indent));
        assert_eq!(k.iter().filter(|t| **t == TokenKind::Newline).count(), 2);
    }
}
