//! S-expression dump of the AST: one node per line, two spaces per level.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use super::ast::*;
use crate::value::{render, Value};

struct Node {
    head: String,
    children: Vec<Node>,
}

fn leaf(head: impl Into<String>) -> Node {
    Node {
        head: head.into(),
        children: Vec::new(),
    }
}

fn node(head: impl Into<String>, children: Vec<Node>) -> Node {
    Node {
        head: head.into(),
        children,
    }
}

fn write(n: &Node, depth: usize, out: &mut String) {
    for _ in 0..depth {
        out.push_str("  ");
    }
    out.push('(');
    out.push_str(&n.head);
    for child in &n.children {
        out.push('\n');
        write(child, depth + 1, out);
    }
    out.push(')');
}

pub fn dump_ast(program: &Program) -> String {
    let tree = node("program", program.stmts.iter().map(stmt).collect());
    let mut out = String::new();
    write(&tree, 0, &mut out);
    out.push('\n');
    out
}

/// Dump of a single expression, used by tests and the REPL.
pub fn dump_expr(e: &Expr) -> String {
    let mut out = String::new();
    write(&expr(e), 0, &mut out);
    out
}

fn block(head: &str, stmts: &[Stmt]) -> Node {
    node(head, stmts.iter().map(stmt).collect())
}

fn stmt(s: &Stmt) -> Node {
    match &s.kind {
        StmtKind::Assign(p, e) => node("assign", vec![pattern(p), expr(e)]),
        StmtKind::Expr(e) => node("expr", vec![expr(e)]),
        StmtKind::Def(def) => {
            let params: Vec<String> = def.params.iter().map(|(p, _)| p.to_string()).collect();
            node(
                format!("def {}", def.name),
                vec![
                    leaf(format!("params {}", params.join(" ")).trim_end().to_string()),
                    block("body", &def.body),
                ],
            )
        }
        StmtKind::Return(None) => leaf("return"),
        StmtKind::Return(Some(e)) => node("return", vec![expr(e)]),
        StmtKind::If { branches, orelse } => {
            let mut children: Vec<Node> = branches
                .iter()
                .map(|(c, body)| node("branch", vec![expr(c), block("body", body)]))
                .collect();
            if let Some(body) = orelse {
                children.push(block("else", body));
            }
            node("if", children)
        }
        StmtKind::While(c, body) => node("while", vec![expr(c), block("body", body)]),
        StmtKind::For(p, it, body) => node("for", vec![pattern(p), expr(it), block("body", body)]),
    }
}

fn pattern(p: &Pattern) -> Node {
    match p {
        Pattern::Name(n, _, _) => leaf(format!("pat {}", n)),
        Pattern::Wild(_) => leaf("wild"),
        Pattern::Tuple(items, _) => node("ptuple", items.iter().map(pattern).collect()),
    }
}

fn exprs(head: &str, items: &[Expr]) -> Node {
    node(head, items.iter().map(expr).collect())
}

fn expr(e: &Expr) -> Node {
    match &e.kind {
        ExprKind::Int(n) => leaf(format!("int {}", n)),
        ExprKind::Str(s) => leaf(format!("str {}", render(&Value::Str(s.clone())))),
        ExprKind::Bool(b) => leaf(if *b { "bool True" } else { "bool False" }),
        ExprKind::Name(n, _) => leaf(format!("name {}", n)),
        ExprKind::Tuple(items) => exprs("tuple", items),
        ExprKind::Set(items) => exprs("set", items),
        ExprKind::Seq(items) => exprs("seq", items),
        ExprKind::Map(entries) => node(
            "map",
            entries
                .iter()
                .map(|(k, v)| node("entry", vec![expr(k), expr(v)]))
                .collect(),
        ),
        ExprKind::Unary(UnOp::Not, x) => node("not", vec![expr(x)]),
        ExprKind::Unary(UnOp::Neg, x) => node("neg", vec![expr(x)]),
        ExprKind::Binary(op, l, r) => node(format!("binop {}", op.symbol()), vec![expr(l), expr(r)]),
        ExprKind::Call(f, args) => {
            let mut children = vec![expr(f)];
            children.extend(args.iter().map(expr));
            node("call", children)
        }
        ExprKind::Method(recv, name, args) => {
            let mut children = vec![expr(recv)];
            children.extend(args.iter().map(expr));
            node(format!("method {}", name), children)
        }
        ExprKind::Index(obj, key) => node("index", vec![expr(obj), expr(key)]),
        ExprKind::Construct(c) => construct(c),
    }
}

fn construct(c: &Construct) -> Node {
    let mut children: Vec<Node> = Vec::new();
    if !c.op.is_quantifier() {
        children.push(node("head", vec![expr(&c.body)]));
    }
    for clause in &c.clauses {
        children.push(match clause {
            Clause::Member { pattern: p, source } => node("member", vec![pattern(p), expr(source)]),
            Clause::Cond(e) => node("cond", vec![expr(e)]),
        });
    }
    if c.op.is_quantifier() {
        children.push(node("has", vec![expr(&c.body)]));
    }
    node(c.op.keyword(), children)
}

/// Source-like rendering of an expression, used in IR dumps and traces.
/// Nested binary operators are parenthesized.
pub fn expr_source(e: &Expr) -> String {
    let mut out = String::new();
    source(e, &mut out, false);
    out
}

fn source_list(items: &[Expr], out: &mut String) {
    for (i, item) in items.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        source(item, out, false);
    }
}

pub fn pattern_source(p: &Pattern) -> String {
    match p {
        Pattern::Name(n, _, _) => n.to_string(),
        Pattern::Wild(_) => "_".to_string(),
        Pattern::Tuple(items, _) => {
            let parts: Vec<String> = items.iter().map(pattern_source).collect();
            if parts.len() == 1 {
                format!("({},)", parts[0])
            } else {
                format!("({})", parts.join(", "))
            }
        }
    }
}

fn source(e: &Expr, out: &mut String, nested: bool) {
    match &e.kind {
        ExprKind::Int(n) => out.push_str(&n.to_string()),
        ExprKind::Str(s) => out.push_str(&render(&Value::Str(s.clone()))),
        ExprKind::Bool(b) => out.push_str(if *b { "True" } else { "False" }),
        ExprKind::Name(n, _) => out.push_str(n),
        ExprKind::Tuple(items) => {
            out.push('(');
            source_list(items, out);
            if items.len() == 1 {
                out.push(',');
            }
            out.push(')');
        }
        ExprKind::Set(items) => {
            out.push('{');
            source_list(items, out);
            out.push('}');
        }
        ExprKind::Seq(items) => {
            out.push('[');
            source_list(items, out);
            out.push(']');
        }
        ExprKind::Map(entries) => {
            out.push('{');
            for (i, (k, v)) in entries.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                source(k, out, false);
                out.push_str(": ");
                source(v, out, false);
            }
            out.push('}');
        }
        ExprKind::Unary(op, x) => {
            if nested {
                out.push('(');
            }
            out.push_str(match op {
                UnOp::Not => "not ",
                UnOp::Neg => "-",
            });
            source(x, out, true);
            if nested {
                out.push(')');
            }
        }
        ExprKind::Binary(op, l, r) => {
            if nested {
                out.push('(');
            }
            source(l, out, true);
            out.push(' ');
            out.push_str(match op {
                BinOp::NotIn => "not in",
                other => other.symbol(),
            });
            out.push(' ');
            source(r, out, true);
            if nested {
                out.push(')');
            }
        }
        ExprKind::Call(f, args) => {
            source(f, out, true);
            out.push('(');
            source_list(args, out);
            out.push(')');
        }
        ExprKind::Method(recv, name, args) => {
            source(recv, out, true);
            out.push('.');
            out.push_str(name);
            out.push('(');
            source_list(args, out);
            out.push(')');
        }
        ExprKind::Index(obj, key) => {
            source(obj, out, true);
            out.push('[');
            source(key, out, false);
            out.push(']');
        }
        ExprKind::Construct(c) => {
            out.push_str(c.op.keyword());
            out.push('(');
            if !c.op.is_quantifier() {
                source(&c.body, out, false);
                out.push_str(", ");
            }
            for (i, clause) in c.clauses.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                match clause {
                    Clause::Member { pattern, source: src } => {
                        out.push_str(&pattern_source(pattern));
                        out.push_str(" in ");
                        source(src, out, true);
                    }
                    Clause::Cond(cond) => source(cond, out, false),
                }
            }
            if c.op.is_quantifier() {
                out.push_str(", has= ");
                source(&c.body, out, false);
            }
            out.push(')');
        }
    }
}
