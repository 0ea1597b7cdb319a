use alloc::boxed::Box;
use alloc::sync::Arc;
use alloc::vec::Vec;

pub use super::token::Pos;

/// Identifies one name occurrence (in an expression or a pattern).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

/// Identifies one quantification, comprehension or aggregation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConstructId(pub u32);

pub type Ident = Arc<str>;

#[derive(Clone, Debug)]
pub struct Program {
    pub stmts: Vec<Stmt>,
}

#[derive(Clone, Debug)]
pub struct Stmt {
    pub kind: StmtKind,
    pub pos: Pos,
}

#[derive(Clone, Debug)]
pub enum StmtKind {
    Assign(Pattern, Expr),
    Expr(Expr),
    Def(Arc<FuncDef>),
    Return(Option<Expr>),
    If {
        branches: Vec<(Expr, Vec<Stmt>)>,
        orelse: Option<Vec<Stmt>>,
    },
    While(Expr, Vec<Stmt>),
    For(Pattern, Expr, Vec<Stmt>),
}

#[derive(Debug)]
pub struct FuncDef {
    pub name: Ident,
    pub params: Vec<(Ident, Pos)>,
    pub body: Vec<Stmt>,
    pub pos: Pos,
}

#[derive(Clone, Debug)]
pub struct Expr {
    pub kind: ExprKind,
    pub pos: Pos,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnOp {
    Not,
    Neg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Implies,
    Or,
    And,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    In,
    NotIn,
    BitOr,
    BitAnd,
    Add,
    Sub,
    Mul,
    FloorDiv,
    Mod,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Implies => "implies",
            BinOp::Or => "or",
            BinOp::And => "and",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::In => "in",
            BinOp::NotIn => "not-in",
            BinOp::BitOr => "|",
            BinOp::BitAnd => "&",
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::FloorDiv => "//",
            BinOp::Mod => "%",
        }
    }
}

#[derive(Clone, Debug)]
pub enum ExprKind {
    Int(i64),
    Str(Arc<str>),
    Bool(bool),
    Name(Ident, NodeId),
    Tuple(Vec<Expr>),
    Set(Vec<Expr>),
    Seq(Vec<Expr>),
    Map(Vec<(Expr, Expr)>),
    Unary(UnOp, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Box<Expr>, Vec<Expr>),
    /// `receiver.name(args)`; only builtin methods exist.
    Method(Box<Expr>, Ident, Vec<Expr>),
    Index(Box<Expr>, Box<Expr>),
    Construct(Box<Construct>),
}

/// The nine declarative operators. `Each`/`Some` are quantifications, the
/// two `*of` collection forms are comprehensions, the rest aggregations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ConstructOp {
    Each,
    Some,
    SetOf,
    ListOf,
    SumOf,
    ProductOf,
    CountOf,
    MaxOf,
    MinOf,
}

impl ConstructOp {
    pub fn keyword(self) -> &'static str {
        match self {
            ConstructOp::Each => "each",
            ConstructOp::Some => "some",
            ConstructOp::SetOf => "setof",
            ConstructOp::ListOf => "listof",
            ConstructOp::SumOf => "sumof",
            ConstructOp::ProductOf => "productof",
            ConstructOp::CountOf => "countof",
            ConstructOp::MaxOf => "maxof",
            ConstructOp::MinOf => "minof",
        }
    }

    pub fn is_quantifier(self) -> bool {
        matches!(self, ConstructOp::Each | ConstructOp::Some)
    }
}

/// Quantification, comprehension or aggregation.
///
/// For quantifiers `body` is the `has=` predicate; otherwise it is the head
/// expression whose values are collected or folded.
#[derive(Clone, Debug)]
pub struct Construct {
    pub id: ConstructId,
    pub op: ConstructOp,
    pub body: Expr,
    pub clauses: Vec<Clause>,
    pub pos: Pos,
}

#[derive(Clone, Debug)]
pub enum Clause {
    Member { pattern: Pattern, source: Expr },
    Cond(Expr),
}

#[derive(Clone, Debug)]
pub enum Pattern {
    Name(Ident, NodeId, Pos),
    Wild(Pos),
    Tuple(Vec<Pattern>, Pos),
}

impl Pattern {
    pub fn pos(&self) -> Pos {
        match self {
            Pattern::Name(_, _, p) | Pattern::Wild(p) | Pattern::Tuple(_, p) => *p,
        }
    }

    /// Name occurrences, left to right.
    pub fn names(&self) -> Vec<(&Ident, NodeId)> {
        let mut out = Vec::new();
        self.collect_names(&mut out);
        out
    }

    fn collect_names<'a>(&'a self, out: &mut Vec<(&'a Ident, NodeId)>) {
        match self {
            Pattern::Name(n, id, _) => out.push((n, *id)),
            Pattern::Wild(_) => {}
            Pattern::Tuple(items, _) => items.iter().for_each(|p| p.collect_names(out)),
        }
    }

    pub fn has_wildcard(&self) -> bool {
        match self {
            Pattern::Name(..) => false,
            Pattern::Wild(_) => true,
            Pattern::Tuple(items, _) => items.iter().any(Pattern::has_wildcard),
        }
    }
}

impl Expr {
    /// Visits every construct nested in this expression (outermost first).
    pub fn for_each_construct<'a>(&'a self, f: &mut dyn FnMut(&'a Construct)) {
        match &self.kind {
            ExprKind::Int(_) | ExprKind::Str(_) | ExprKind::Bool(_) | ExprKind::Name(..) => {}
            ExprKind::Tuple(items) | ExprKind::Set(items) | ExprKind::Seq(items) => {
                items.iter().for_each(|e| e.for_each_construct(f))
            }
            ExprKind::Map(entries) => entries.iter().for_each(|(k, v)| {
                k.for_each_construct(f);
                v.for_each_construct(f);
            }),
            ExprKind::Unary(_, e) => e.for_each_construct(f),
            ExprKind::Binary(_, l, r) | ExprKind::Index(l, r) => {
                l.for_each_construct(f);
                r.for_each_construct(f);
            }
            ExprKind::Call(callee, args) => {
                callee.for_each_construct(f);
                args.iter().for_each(|e| e.for_each_construct(f));
            }
            ExprKind::Method(recv, _, args) => {
                recv.for_each_construct(f);
                args.iter().for_each(|e| e.for_each_construct(f));
            }
            ExprKind::Construct(c) => {
                f(c);
                for clause in &c.clauses {
                    match clause {
                        Clause::Member { source, .. } => source.for_each_construct(f),
                        Clause::Cond(e) => e.for_each_construct(f),
                    }
                }
                c.body.for_each_construct(f);
            }
        }
    }
}

impl Stmt {
    /// Visits every expression directly or transitively contained in the
    /// statement, including function bodies.
    pub fn for_each_expr<'a>(&'a self, f: &mut dyn FnMut(&'a Expr)) {
        match &self.kind {
            StmtKind::Assign(_, e) | StmtKind::Expr(e) => f(e),
            StmtKind::Return(e) => {
                if let Some(e) = e {
                    f(e)
                }
            }
            StmtKind::Def(def) => def.body.iter().for_each(|s| s.for_each_expr(f)),
            StmtKind::If { branches, orelse } => {
                for (cond, body) in branches {
                    f(cond);
                    body.iter().for_each(|s| s.for_each_expr(f));
                }
                if let Some(body) = orelse {
                    body.iter().for_each(|s| s.for_each_expr(f));
                }
            }
            StmtKind::While(cond, body) => {
                f(cond);
                body.iter().for_each(|s| s.for_each_expr(f));
            }
            StmtKind::For(_, iter, body) => {
                f(iter);
                body.iter().for_each(|s| s.for_each_expr(f));
            }
        }
    }
}

impl Program {
    /// All constructs in the program, in source order.
    pub fn constructs(&self) -> Vec<&Construct> {
        let mut out = Vec::new();
        for stmt in &self.stmts {
            stmt.for_each_expr(&mut |e| e.for_each_construct(&mut |c| out.push(c)));
        }
        out
    }
}
