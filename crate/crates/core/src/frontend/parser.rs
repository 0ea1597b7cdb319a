//! Recursive-descent parser.
//!
//! Operator precedence, loosest first: `implies` (right-associative), `or`,
//! `and`, `not`, comparisons and `in`, `|`, `&`, `+ -`, `* // %`, unary `-`,
//! then calls, method calls and indexing.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use super::ast::*;
use super::token::{Keyword, Punct, Token, TokenKind};
use super::ParseError;

const MAX_NESTING: usize = 100;

/// Next free node and construct ids. Sessions that parse several inputs
/// into one interpreter (the REPL) thread one seed through all of them.
#[derive(Clone, Copy, Debug, Default)]
pub struct IdSeed {
    pub next_node: u32,
    pub next_construct: u32,
}

pub fn parse(tokens: &[Token]) -> Result<Program, ParseError> {
    parse_with(tokens, &mut IdSeed::default())
}

pub fn parse_with(tokens: &[Token], seed: &mut IdSeed) -> Result<Program, ParseError> {
    let mut p = Parser::new(tokens, *seed)?;
    let program = p.program()?;
    *seed = p.seed;
    Ok(program)
}

/// Parses a pattern at the start of `tokens`; it must be followed by `in`
/// or the end of the line.
pub fn parse_pattern(tokens: &[Token]) -> Result<Pattern, ParseError> {
    let mut p = Parser::new(tokens, IdSeed::default())?;
    let pat = p.pattern()?;
    match p.peek_kind() {
        TokenKind::Keyword(Keyword::In) | TokenKind::Newline | TokenKind::Eof => Ok(pat),
        _ => Err(p.unexpected(&["in"])),
    }
}

struct Parser<'t> {
    tokens: &'t [Token],
    i: usize,
    seed: IdSeed,
    in_function: usize,
    nesting: usize,
    /// Token span of the most recently closed parenthesized group.
    last_group: Option<(usize, usize)>,
}

impl<'t> Parser<'t> {
    fn new(tokens: &'t [Token], seed: IdSeed) -> Result<Self, ParseError> {
        match tokens.last() {
            Some(t) if t.kind == TokenKind::Eof => {}
            _ => return Err(ParseError::new("token stream is not terminated", Pos::default())),
        }
        Ok(Parser {
            tokens,
            i: 0,
            seed,
            in_function: 0,
            nesting: 0,
            last_group: None,
        })
    }

    // -- token helpers ------------------------------------------------------

    fn peek(&self) -> &'t Token {
        &self.tokens[self.i.min(self.tokens.len() - 1)]
    }

    fn peek_kind(&self) -> &'t TokenKind {
        &self.peek().kind
    }

    fn peek_nth(&self, n: usize) -> &'t TokenKind {
        &self.tokens[(self.i + n).min(self.tokens.len() - 1)].kind
    }

    fn advance(&mut self) -> &'t Token {
        let t = self.peek();
        if self.i < self.tokens.len() - 1 {
            self.i += 1;
        }
        t
    }

    fn at_punct(&self, p: Punct) -> bool {
        *self.peek_kind() == TokenKind::Punct(p)
    }

    fn at_kw(&self, k: Keyword) -> bool {
        *self.peek_kind() == TokenKind::Keyword(k)
    }

    fn eat_punct(&mut self, p: Punct) -> bool {
        if self.at_punct(p) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn eat_kw(&mut self, k: Keyword) -> bool {
        if self.at_kw(k) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn unexpected(&self, expected: &[&str]) -> ParseError {
        let tok = self.peek();
        let message = if expected.is_empty() {
            format!("unexpected {}", tok.describe())
        } else {
            format!("expected {}, found {}", expected.join(" or "), tok.describe())
        };
        ParseError {
            message,
            pos: tok.pos,
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn expect_punct(&mut self, p: Punct) -> Result<&'t Token, ParseError> {
        if self.at_punct(p) {
            Ok(self.advance())
        } else {
            Err(self.unexpected(&[&format!("'{}'", p.text())]))
        }
    }

    fn expect_newline(&mut self) -> Result<(), ParseError> {
        match self.peek_kind() {
            TokenKind::Newline => {
                self.advance();
                Ok(())
            }
            TokenKind::Eof => Ok(()),
            _ => Err(self.unexpected(&["end of line"])),
        }
    }

    fn ident(&mut self) -> Result<(Ident, Pos), ParseError> {
        let t = self.peek();
        if t.kind == TokenKind::Ident {
            self.advance();
            Ok((Arc::from(t.lexeme.as_str()), t.pos))
        } else {
            Err(self.unexpected(&["name"]))
        }
    }

    fn node_id(&mut self) -> NodeId {
        let id = NodeId(self.seed.next_node);
        self.seed.next_node += 1;
        id
    }

    fn construct_id(&mut self) -> ConstructId {
        let id = ConstructId(self.seed.next_construct);
        self.seed.next_construct += 1;
        id
    }

    // -- statements -----------------------------------------------------------

    fn program(&mut self) -> Result<Program, ParseError> {
        let mut stmts = Vec::new();
        loop {
            match self.peek_kind() {
                TokenKind::Eof => break,
                TokenKind::Newline => {
                    self.advance();
                }
                TokenKind::Indent => return Err(ParseError::new("unexpected indent", self.peek().pos)),
                _ => stmts.push(self.statement()?),
            }
        }
        Ok(Program { stmts })
    }

    fn statement(&mut self) -> Result<Stmt, ParseError> {
        let pos = self.peek().pos;
        match self.peek_kind() {
            TokenKind::Keyword(Keyword::Def) => self.def(),
            TokenKind::Keyword(Keyword::If) => {
                self.advance();
                let mut branches = Vec::new();
                let cond = self.expr()?;
                let body = self.suite()?;
                branches.push((cond, body));
                let mut orelse = None;
                loop {
                    if self.eat_kw(Keyword::Elif) {
                        let cond = self.expr()?;
                        let body = self.suite()?;
                        branches.push((cond, body));
                    } else if self.eat_kw(Keyword::Else) {
                        orelse = Some(self.suite()?);
                        break;
                    } else {
                        break;
                    }
                }
                Ok(Stmt {
                    kind: StmtKind::If { branches, orelse },
                    pos,
                })
            }
            TokenKind::Keyword(Keyword::While) => {
                self.advance();
                let cond = self.expr()?;
                let body = self.suite()?;
                Ok(Stmt {
                    kind: StmtKind::While(cond, body),
                    pos,
                })
            }
            TokenKind::Keyword(Keyword::For) => {
                self.advance();
                let target = self.pattern()?;
                if !self.eat_kw(Keyword::In) {
                    return Err(self.unexpected(&["'in'"]));
                }
                let iter = self.expr()?;
                let body = self.suite()?;
                Ok(Stmt {
                    kind: StmtKind::For(target, iter, body),
                    pos,
                })
            }
            TokenKind::Keyword(Keyword::Elif) | TokenKind::Keyword(Keyword::Else) => Err(self.unexpected(&[])),
            _ => {
                let stmt = self.simple_statement()?;
                self.expect_newline()?;
                Ok(stmt)
            }
        }
    }

    fn simple_statement(&mut self) -> Result<Stmt, ParseError> {
        let pos = self.peek().pos;
        if self.at_kw(Keyword::Return) {
            if self.in_function == 0 {
                return Err(ParseError::new("'return' outside of a function", pos));
            }
            self.advance();
            let value = match self.peek_kind() {
                TokenKind::Newline | TokenKind::Eof => None,
                _ => Some(self.expr_list()?),
            };
            return Ok(Stmt {
                kind: StmtKind::Return(value),
                pos,
            });
        }
        let lhs = self.expr_list()?;
        if self.eat_punct(Punct::Assign) {
            let target = expr_to_pattern(&lhs)?;
            let value = self.expr_list()?;
            if self.at_punct(Punct::Assign) {
                return Err(ParseError::new("chained assignment is not supported", self.peek().pos));
            }
            Ok(Stmt {
                kind: StmtKind::Assign(target, value),
                pos,
            })
        } else {
            Ok(Stmt {
                kind: StmtKind::Expr(lhs),
                pos,
            })
        }
    }

    fn def(&mut self) -> Result<Stmt, ParseError> {
        let pos = self.advance().pos;
        let (name, _) = self.ident()?;
        self.expect_punct(Punct::LParen)?;
        let mut params = Vec::new();
        while !self.at_punct(Punct::RParen) {
            params.push(self.ident()?);
            if !self.eat_punct(Punct::Comma) {
                break;
            }
        }
        self.expect_punct(Punct::RParen)?;
        self.in_function += 1;
        let body = self.suite();
        self.in_function -= 1;
        let body = body?;
        Ok(Stmt {
            kind: StmtKind::Def(Arc::new(FuncDef {
                name,
                params,
                body,
                pos,
            })),
            pos,
        })
    }

    /// `: simple_stmt NEWLINE` or `: NEWLINE INDENT stmt+ DEDENT`.
    fn suite(&mut self) -> Result<Vec<Stmt>, ParseError> {
        self.expect_punct(Punct::Colon)?;
        if *self.peek_kind() != TokenKind::Newline {
            let stmt = self.simple_statement()?;
            self.expect_newline()?;
            return Ok(vec![stmt]);
        }
        self.advance();
        if *self.peek_kind() != TokenKind::Indent {
            return Err(self.unexpected(&["indented block"]));
        }
        self.advance();
        let mut body = Vec::new();
        loop {
            match self.peek_kind() {
                TokenKind::Dedent => {
                    self.advance();
                    break;
                }
                TokenKind::Eof => break,
                TokenKind::Newline => {
                    self.advance();
                }
                TokenKind::Indent => return Err(ParseError::new("unexpected indent", self.peek().pos)),
                _ => body.push(self.statement()?),
            }
        }
        Ok(body)
    }

    // -- patterns -------------------------------------------------------------

    /// `target (, target)*` where a target is a name, `_`, or a parenthesized
    /// pattern list.
    fn pattern(&mut self) -> Result<Pattern, ParseError> {
        let pos = self.peek().pos;
        let first = self.pattern_atom()?;
        if !self.at_punct(Punct::Comma) {
            return Ok(first);
        }
        let mut items = vec![first];
        while self.eat_punct(Punct::Comma) {
            if self.at_kw(Keyword::In) || self.at_punct(Punct::Assign) {
                break;
            }
            items.push(self.pattern_atom()?);
        }
        Ok(Pattern::Tuple(items, pos))
    }

    fn pattern_atom(&mut self) -> Result<Pattern, ParseError> {
        let t = self.peek();
        match &t.kind {
            TokenKind::Ident => {
                self.advance();
                if t.lexeme == "_" {
                    Ok(Pattern::Wild(t.pos))
                } else {
                    let id = self.node_id();
                    Ok(Pattern::Name(Arc::from(t.lexeme.as_str()), id, t.pos))
                }
            }
            TokenKind::Punct(Punct::LParen) => {
                self.advance();
                let mut items = Vec::new();
                let mut trailing_comma = false;
                while !self.at_punct(Punct::RParen) {
                    items.push(self.pattern_atom()?);
                    trailing_comma = self.eat_punct(Punct::Comma);
                    if !trailing_comma {
                        break;
                    }
                }
                self.expect_punct(Punct::RParen)?;
                if items.len() == 1 && !trailing_comma {
                    Ok(items.pop().unwrap_or(Pattern::Wild(t.pos)))
                } else {
                    Ok(Pattern::Tuple(items, t.pos))
                }
            }
            _ => Err(self.unexpected(&["pattern"])),
        }
    }

    // -- expressions ----------------------------------------------------------

    /// Comma-separated expressions; more than one forms a tuple.
    fn expr_list(&mut self) -> Result<Expr, ParseError> {
        let pos = self.peek().pos;
        let first = self.expr()?;
        if !self.at_punct(Punct::Comma) {
            return Ok(first);
        }
        let mut items = vec![first];
        while self.eat_punct(Punct::Comma) {
            if matches!(
                self.peek_kind(),
                TokenKind::Newline | TokenKind::Eof | TokenKind::Punct(Punct::Assign)
            ) {
                break;
            }
            items.push(self.expr()?);
        }
        Ok(Expr {
            kind: ExprKind::Tuple(items),
            pos,
        })
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        self.nesting += 1;
        if self.nesting > MAX_NESTING {
            self.nesting -= 1;
            return Err(ParseError::new("expression nested too deeply", self.peek().pos));
        }
        let result = self.implies();
        self.nesting -= 1;
        result
    }

    fn implies(&mut self) -> Result<Expr, ParseError> {
        let lhs = self.or()?;
        if self.at_kw(Keyword::Implies) {
            let pos = self.advance().pos;
            let rhs = self.implies()?;
            return Ok(binary(BinOp::Implies, lhs, rhs, pos));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.and()?;
        while self.at_kw(Keyword::Or) {
            let pos = self.advance().pos;
            let rhs = self.and()?;
            lhs = binary(BinOp::Or, lhs, rhs, pos);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.not()?;
        while self.at_kw(Keyword::And) {
            let pos = self.advance().pos;
            let rhs = self.not()?;
            lhs = binary(BinOp::And, lhs, rhs, pos);
        }
        Ok(lhs)
    }

    fn not(&mut self) -> Result<Expr, ParseError> {
        if self.at_kw(Keyword::Not) {
            let pos = self.advance().pos;
            self.nesting += 1;
            if self.nesting > MAX_NESTING {
                self.nesting -= 1;
                return Err(ParseError::new("expression nested too deeply", pos));
            }
            let operand = self.not();
            self.nesting -= 1;
            return Ok(Expr {
                kind: ExprKind::Unary(UnOp::Not, Box::new(operand?)),
                pos,
            });
        }
        self.comparison()
    }

    fn comparison_op(&self) -> Option<(BinOp, usize)> {
        Some(match self.peek_kind() {
            TokenKind::Punct(Punct::EqEq) => (BinOp::Eq, 1),
            TokenKind::Punct(Punct::NotEq) => (BinOp::Ne, 1),
            TokenKind::Punct(Punct::Lt) => (BinOp::Lt, 1),
            TokenKind::Punct(Punct::Le) => (BinOp::Le, 1),
            TokenKind::Punct(Punct::Gt) => (BinOp::Gt, 1),
            TokenKind::Punct(Punct::Ge) => (BinOp::Ge, 1),
            TokenKind::Keyword(Keyword::In) => (BinOp::In, 1),
            TokenKind::Keyword(Keyword::Not) if *self.peek_nth(1) == TokenKind::Keyword(Keyword::In) => {
                (BinOp::NotIn, 2)
            }
            _ => return None,
        })
    }

    fn comparison(&mut self) -> Result<Expr, ParseError> {
        let lhs = self.bit_or()?;
        let Some((op, len)) = self.comparison_op() else {
            return Ok(lhs);
        };
        let pos = self.peek().pos;
        for _ in 0..len {
            self.advance();
        }
        let rhs = self.bit_or()?;
        if self.comparison_op().is_some() {
            return Err(ParseError::new(
                "chained comparisons are not supported; combine them with 'and'",
                self.peek().pos,
            ));
        }
        Ok(binary(op, lhs, rhs, pos))
    }

    fn bit_or(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.bit_and()?;
        while self.at_punct(Punct::Pipe) {
            let pos = self.advance().pos;
            let rhs = self.bit_and()?;
            lhs = binary(BinOp::BitOr, lhs, rhs, pos);
        }
        Ok(lhs)
    }

    fn bit_and(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.additive()?;
        while self.at_punct(Punct::Amp) {
            let pos = self.advance().pos;
            let rhs = self.additive()?;
            lhs = binary(BinOp::BitAnd, lhs, rhs, pos);
        }
        Ok(lhs)
    }

    fn additive(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek_kind() {
                TokenKind::Punct(Punct::Plus) => BinOp::Add,
                TokenKind::Punct(Punct::Minus) => BinOp::Sub,
                _ => return Ok(lhs),
            };
            let pos = self.advance().pos;
            let rhs = self.term()?;
            lhs = binary(op, lhs, rhs, pos);
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek_kind() {
                TokenKind::Punct(Punct::Star) => BinOp::Mul,
                TokenKind::Punct(Punct::SlashSlash) => BinOp::FloorDiv,
                TokenKind::Punct(Punct::Percent) => BinOp::Mod,
                _ => return Ok(lhs),
            };
            let pos = self.advance().pos;
            let rhs = self.unary()?;
            lhs = binary(op, lhs, rhs, pos);
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.at_punct(Punct::Minus) {
            let pos = self.advance().pos;
            self.nesting += 1;
            if self.nesting > MAX_NESTING {
                self.nesting -= 1;
                return Err(ParseError::new("expression nested too deeply", pos));
            }
            let operand = self.unary();
            self.nesting -= 1;
            return Ok(Expr {
                kind: ExprKind::Unary(UnOp::Neg, Box::new(operand?)),
                pos,
            });
        }
        self.postfix()
    }

    fn postfix(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.primary()?;
        loop {
            if self.at_punct(Punct::LParen) {
                let pos = self.advance().pos;
                let args = self.call_args()?;
                e = Expr {
                    kind: ExprKind::Call(Box::new(e), args),
                    pos,
                };
            } else if self.at_punct(Punct::LBracket) {
                let pos = self.advance().pos;
                let key = self.expr()?;
                self.expect_punct(Punct::RBracket)?;
                e = Expr {
                    kind: ExprKind::Index(Box::new(e), Box::new(key)),
                    pos,
                };
            } else if self.at_punct(Punct::Dot) {
                let pos = self.advance().pos;
                let (name, _) = self.ident()?;
                if !self.eat_punct(Punct::LParen) {
                    return Err(self.unexpected(&["'(' (only method calls are supported)"]));
                }
                let args = self.call_args()?;
                e = Expr {
                    kind: ExprKind::Method(Box::new(e), name, args),
                    pos,
                };
            } else {
                return Ok(e);
            }
        }
    }

    /// Arguments after an opening `(`, through the closing `)`.
    fn call_args(&mut self) -> Result<Vec<Expr>, ParseError> {
        let mut args = Vec::new();
        while !self.at_punct(Punct::RParen) {
            args.push(self.expr()?);
            if !self.eat_punct(Punct::Comma) {
                break;
            }
        }
        self.expect_punct(Punct::RParen)?;
        Ok(args)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let t = self.peek();
        let pos = t.pos;
        let kind = match &t.kind {
            TokenKind::Int(n) => {
                self.advance();
                ExprKind::Int(*n)
            }
            TokenKind::Str(s) => {
                self.advance();
                ExprKind::Str(Arc::from(s.as_str()))
            }
            TokenKind::Keyword(Keyword::True) => {
                self.advance();
                ExprKind::Bool(true)
            }
            TokenKind::Keyword(Keyword::False) => {
                self.advance();
                ExprKind::Bool(false)
            }
            TokenKind::Ident => {
                self.advance();
                let id = self.node_id();
                ExprKind::Name(Arc::from(t.lexeme.as_str()), id)
            }
            TokenKind::Keyword(k) => match construct_op(*k) {
                Some(op) => {
                    self.advance();
                    return self.construct(op, pos);
                }
                None => return Err(self.unexpected(&["expression"])),
            },
            TokenKind::Punct(Punct::LParen) => {
                let start = self.i;
                self.advance();
                if self.eat_punct(Punct::RParen) {
                    ExprKind::Tuple(Vec::new())
                } else {
                    let first = self.expr()?;
                    if self.eat_punct(Punct::RParen) {
                        self.last_group = Some((start, self.i - 1));
                        return Ok(first);
                    }
                    let mut items = vec![first];
                    while self.eat_punct(Punct::Comma) {
                        if self.at_punct(Punct::RParen) {
                            break;
                        }
                        items.push(self.expr()?);
                    }
                    self.expect_punct(Punct::RParen)?;
                    ExprKind::Tuple(items)
                }
            }
            TokenKind::Punct(Punct::LBracket) => {
                self.advance();
                let mut items = Vec::new();
                while !self.at_punct(Punct::RBracket) {
                    items.push(self.expr()?);
                    if !self.eat_punct(Punct::Comma) {
                        break;
                    }
                }
                self.expect_punct(Punct::RBracket)?;
                ExprKind::Seq(items)
            }
            TokenKind::Punct(Punct::LBrace) => {
                self.advance();
                self.brace_literal()?
            }
            _ => return Err(self.unexpected(&["expression"])),
        };
        Ok(Expr { kind, pos })
    }

    /// Set or map literal after `{`. `{}` is the empty set.
    fn brace_literal(&mut self) -> Result<ExprKind, ParseError> {
        if self.eat_punct(Punct::RBrace) {
            return Ok(ExprKind::Set(Vec::new()));
        }
        let first = self.expr()?;
        if self.eat_punct(Punct::Colon) {
            let value = self.expr()?;
            let mut entries = vec![(first, value)];
            while self.eat_punct(Punct::Comma) {
                if self.at_punct(Punct::RBrace) {
                    break;
                }
                let k = self.expr()?;
                self.expect_punct(Punct::Colon)?;
                let v = self.expr()?;
                entries.push((k, v));
            }
            self.expect_punct(Punct::RBrace)?;
            return Ok(ExprKind::Map(entries));
        }
        let mut items = vec![first];
        while self.eat_punct(Punct::Comma) {
            if self.at_punct(Punct::RBrace) {
                break;
            }
            items.push(self.expr()?);
        }
        self.expect_punct(Punct::RBrace)?;
        Ok(ExprKind::Set(items))
    }

    fn at_has(&self) -> bool {
        let t = self.peek();
        t.kind == TokenKind::Ident && t.lexeme == "has" && *self.peek_nth(1) == TokenKind::Punct(Punct::Assign)
    }

    fn construct(&mut self, op: ConstructOp, pos: Pos) -> Result<Expr, ParseError> {
        if !self.at_punct(Punct::LParen) {
            return Err(self.unexpected(&[&format!("'(' after '{}'", op.keyword())]));
        }
        self.advance();
        let id = self.construct_id();
        let mut clauses = Vec::new();
        let body = if op.is_quantifier() {
            loop {
                if self.at_has() {
                    if clauses.is_empty() {
                        return Err(ParseError::new(
                            format!("'{}' needs at least one clause before 'has='", op.keyword()),
                            self.peek().pos,
                        ));
                    }
                    self.advance();
                    self.advance();
                    let pred = self.expr()?;
                    self.eat_punct(Punct::Comma);
                    break pred;
                }
                if self.at_punct(Punct::RParen) {
                    return Err(self.unexpected(&["'has='"]));
                }
                clauses.push(self.clause()?);
                if !self.eat_punct(Punct::Comma) {
                    return Err(self.unexpected(&["','", "'has='"]));
                }
            }
        } else {
            let head = self.expr()?;
            if !self.eat_punct(Punct::Comma) {
                return Err(self.unexpected(&["','"]));
            }
            while !self.at_punct(Punct::RParen) {
                if self.at_has() {
                    return Err(ParseError::new(
                        format!("'has=' is only allowed in 'each' and 'some', not '{}'", op.keyword()),
                        self.peek().pos,
                    ));
                }
                clauses.push(self.clause()?);
                if !self.eat_punct(Punct::Comma) {
                    break;
                }
            }
            if clauses.is_empty() {
                return Err(ParseError::new(
                    format!("'{}' needs at least one clause", op.keyword()),
                    self.peek().pos,
                ));
            }
            head
        };
        self.expect_punct(Punct::RParen)?;
        Ok(Expr {
            kind: ExprKind::Construct(Box::new(Construct {
                id,
                op,
                body,
                clauses,
                pos,
            })),
            pos,
        })
    }

    /// A top-level `pattern in source` is a membership clause; anything else
    /// (including a parenthesized `in` test) is a condition.
    fn clause(&mut self) -> Result<Clause, ParseError> {
        let start = self.i;
        let e = self.expr()?;
        let wrapped = self.last_group == Some((start, self.i - 1));
        match e.kind {
            ExprKind::Binary(BinOp::In, lhs, rhs) if !wrapped => Ok(Clause::Member {
                pattern: expr_to_pattern(&lhs)?,
                source: *rhs,
            }),
            kind => Ok(Clause::Cond(Expr { kind, pos: e.pos })),
        }
    }
}

fn binary(op: BinOp, lhs: Expr, rhs: Expr, pos: Pos) -> Expr {
    Expr {
        kind: ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)),
        pos,
    }
}

fn construct_op(k: Keyword) -> Option<ConstructOp> {
    Some(match k {
        Keyword::Each => ConstructOp::Each,
        Keyword::Some => ConstructOp::Some,
        Keyword::Setof => ConstructOp::SetOf,
        Keyword::Listof => ConstructOp::ListOf,
        Keyword::Sumof => ConstructOp::SumOf,
        Keyword::Productof => ConstructOp::ProductOf,
        Keyword::Countof => ConstructOp::CountOf,
        Keyword::Maxof => ConstructOp::MaxOf,
        Keyword::Minof => ConstructOp::MinOf,
        _ => return None,
    })
}

/// Reinterprets an already-parsed expression as a pattern.
fn expr_to_pattern(e: &Expr) -> Result<Pattern, ParseError> {
    match &e.kind {
        ExprKind::Name(n, _) if &**n == "_" => Ok(Pattern::Wild(e.pos)),
        ExprKind::Name(n, id) => Ok(Pattern::Name(n.clone(), *id, e.pos)),
        ExprKind::Tuple(items) => Ok(Pattern::Tuple(
            items.iter().map(expr_to_pattern).collect::<Result<_, _>>()?,
            e.pos,
        )),
        _ => Err(ParseError {
            message: String::from("expected a pattern (a name, '_', or a tuple of patterns)"),
            pos: e.pos,
            expected: vec![String::from("pattern")],
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::{dump_ast, lex, parse_source};

    fn expr_of(src: &str) -> Expr {
        let prog = parse_source(src).unwrap();
        match &prog.stmts[0].kind {
            StmtKind::Expr(e) => e.clone(),
            StmtKind::Assign(_, e) => e.clone(),
            other => panic!("not an expression statement: {:?}", other),
        }
    }

    fn construct(e: &Expr) -> &Construct {
        match &e.kind {
            ExprKind::Construct(c) => c,
            other => panic!("not a construct: {:?}", other),
        }
    }

    fn is_name(e: &Expr, name: &str) -> bool {
        matches!(&e.kind, ExprKind::Name(n, _) if &**n == name)
    }

    #[test]
    fn nested_quantifiers() {
        let e = expr_of("some(I in items, has= each(S in students, has= chose(S,I)))\n");
        let outer = construct(&e);
        assert_eq!(outer.op, ConstructOp::Some);
        assert_eq!(outer.clauses.len(), 1);
        match &outer.clauses[0] {
            Clause::Member {
                pattern: Pattern::Name(n, _, _),
                source,
            } => {
                assert_eq!(&**n, "I");
                assert!(is_name(source, "items"));
            }
            other => panic!("{:?}", other),
        }
        let inner = construct(&outer.body);
        assert_eq!(inner.op, ConstructOp::Each);
        match &inner.body.kind {
            ExprKind::Call(f, args) => {
                assert!(is_name(f, "chose"));
                assert_eq!(args.len(), 2);
            }
            other => panic!("{:?}", other),
        }
    }

    #[test]
    fn comprehension_and_aggregation() {
        let e = expr_of("items = setof(item, sta in stations, item in sta)\n");
        let c = construct(&e);
        assert_eq!(c.op, ConstructOp::SetOf);
        assert!(is_name(&c.body, "item"));
        assert_eq!(c.clauses.len(), 2);
        assert!(c.clauses.iter().all(|cl| matches!(cl, Clause::Member { .. })));

        let e = expr_of("sumof(x, x in S)\n");
        let c = construct(&e);
        assert_eq!(c.op, ConstructOp::SumOf);
        assert_eq!(c.clauses.len(), 1);
    }

    #[test]
    fn implies_is_loosest_and_right_associative() {
        let e = expr_of("p implies q\n");
        assert!(matches!(e.kind, ExprKind::Binary(BinOp::Implies, _, _)));
        let e = expr_of("a or b implies c implies d\n");
        match e.kind {
            ExprKind::Binary(BinOp::Implies, l, r) => {
                assert!(matches!(l.kind, ExprKind::Binary(BinOp::Or, _, _)));
                assert!(matches!(r.kind, ExprKind::Binary(BinOp::Implies, _, _)));
            }
            other => panic!("{:?}", other),
        }
    }

    #[test]
    fn precedence() {
        let e = expr_of("not x in S and -a * b + c == d\n");
        match e.kind {
            ExprKind::Binary(BinOp::And, l, r) => {
                assert!(matches!(l.kind, ExprKind::Unary(UnOp::Not, _)));
                match r.kind {
                    ExprKind::Binary(BinOp::Eq, sum, _) => match sum.kind {
                        ExprKind::Binary(BinOp::Add, prod, _) => match prod.kind {
                            ExprKind::Binary(BinOp::Mul, neg, _) => {
                                assert!(matches!(neg.kind, ExprKind::Unary(UnOp::Neg, _)))
                            }
                            other => panic!("{:?}", other),
                        },
                        other => panic!("{:?}", other),
                    },
                    other => panic!("{:?}", other),
                }
            }
            other => panic!("{:?}", other),
        }
        assert!(parse_source("a < b < c\n").is_err());
    }

    #[test]
    fn patterns() {
        let toks = lex("(x,y) in E").unwrap();
        match parse_pattern(&toks).unwrap() {
            Pattern::Tuple(items, _) => assert_eq!(items.len(), 2),
            other => panic!("{:?}", other),
        }
        let toks = lex("x in S").unwrap();
        assert!(matches!(parse_pattern(&toks).unwrap(), Pattern::Name(..)));
        let toks = lex("f(x) in S").unwrap();
        assert!(parse_pattern(&toks).is_err());
        // the same rule applies to clauses inside constructs
        assert!(parse_source("setof(x, f(x) in S)\n").is_err());
        assert!(parse_source("setof(x, 1 in S)\n").is_err());
        // a parenthesized test is a condition
        let e = expr_of("setof(x, x in S, (f(x) in T))\n");
        assert!(matches!(construct(&e).clauses[1], Clause::Cond(_)));
        let e = expr_of("setof(x, ((x, _), y) in S)\n");
        assert!(matches!(construct(&e).clauses[0], Clause::Member { .. }));
    }

    #[test]
    fn has_marker_is_required() {
        assert!(parse_source("some(x in S, x > 1)\n").is_err());
        assert!(parse_source("each(has= True)\n").is_err());
        assert!(parse_source("setof(x, has= True)\n").is_err());
        assert!(parse_source("setof(x)\n").is_err());
    }

    #[test]
    fn statements() {
        let src = "def chose(student, item): return item in choices[student]\n\
                   a, b = b, a % b\n\
                   for (x, y) in E:\n    print(x)\n\
                   while some(x in S, has= x > 0):\n    S = S - {x}\nelif_ = 1\n";
        let prog = parse_source(src).unwrap();
        assert_eq!(prog.stmts.len(), 5);
        assert!(matches!(prog.stmts[0].kind, StmtKind::Def(_)));
        assert!(matches!(prog.stmts[1].kind, StmtKind::Assign(Pattern::Tuple(..), _)));
        assert!(parse_source("return 1\n").is_err());
        assert!(parse_source("f(x) = 1\n").is_err());
        let err = parse_source("if x:\ny\n").unwrap_err();
        assert_eq!(err.expected, vec![String::from("indented block")]);
    }

    #[test]
    fn method_calls_and_literals() {
        let e = expr_of("students = choices.keys()\n");
        assert!(matches!(e.kind, ExprKind::Method(_, ref n, _) if &**n == "keys"));
        assert!(matches!(expr_of("{}\n").kind, ExprKind::Set(ref v) if v.is_empty()));
        assert!(matches!(expr_of("{1: 2}\n").kind, ExprKind::Map(_)));
        assert!(matches!(expr_of("(1,)\n").kind, ExprKind::Tuple(ref v) if v.len() == 1));
        assert!(matches!(expr_of("(1)\n").kind, ExprKind::Int(1)));
    }

    #[test]
    fn deep_nesting_is_an_error_not_a_crash() {
        let src = format!("x = {}1{}\n", "(".repeat(5000), ")".repeat(5000));
        assert!(parse_source(&src).is_err());
        let src = format!("x = {}1\n", "not ".repeat(5000));
        assert!(parse_source(&src).is_err());
    }

    #[test]
    fn errors_carry_position_and_expectation() {
        let err = parse_source("x = (1 +\n").unwrap_err();
        assert!(err.pos.line >= 1);
        let err = parse_source("x = 1 +\n").unwrap_err();
        assert_eq!(err.expected, vec![String::from("expression")]);
        assert_eq!(err.pos.line, 1);
    }

    #[test]
    fn dump_is_deterministic() {
        let src = "some(I in items, has= each(S in students, has= chose(S,I)))\n";
        let a = dump_ast(&parse_source(src).unwrap());
        let b = dump_ast(&parse_source(src).unwrap());
        assert_eq!(a, b);
        assert!(a.contains("(some"));
        assert!(a.contains("(each"));
    }
}
