//! Random programs over small universes, shared by the integration tests.
#![allow(dead_code, unused_imports)]

use std::fmt::Write as _;

use dml_core::runtime::{BufferOutput, Config, Interpreter, Path, RuntimeError};
use dml_core::{check, value_eq, Value};
use rand::seq::SliceRandom;
use rand::Rng;

pub use rand::SeedableRng;
pub use rand_chacha::ChaCha8Rng as Rng8;

/// Global collections the generated constructs range over.
#[derive(Clone, Debug)]
pub struct Universe {
    pub sets: Vec<(&'static str, Vec<i64>)>,
    pub pairs: Vec<(&'static str, Vec<(i64, i64)>)>,
    /// A list that may repeat elements; `None` when lists are excluded.
    pub list: Option<Vec<i64>>,
    /// `M[k]` for every k in 0..6.
    pub map: Vec<Vec<i64>>,
}

fn set_text(items: &[String]) -> String {
    if items.is_empty() {
        String::from("set()")
    } else {
        format!("{{{}}}", items.join(", "))
    }
}

fn distinct<T: PartialEq>(items: Vec<T>) -> Vec<T> {
    let mut out = Vec::new();
    for x in items {
        if !out.contains(&x) {
            out.push(x);
        }
    }
    out
}

impl Universe {
    pub fn random(rng: &mut impl Rng, with_list: bool) -> Universe {
        let ints = |rng: &mut dyn rand::RngCore| {
            let n = rng.gen_range(0..=6);
            distinct((0..n).map(|_| rng.gen_range(0..6)).collect())
        };
        let sets = vec![("A", ints(rng)), ("B", ints(rng)), ("C", ints(rng))];
        let mut pairs = || {
            let n = rng.gen_range(0..=6);
            distinct((0..n).map(|_| (rng.gen_range(0..4), rng.gen_range(0..4))).collect())
        };
        let pairs = vec![("R", pairs()), ("S", pairs())];
        let list = with_list.then(|| (0..rng.gen_range(0..=6)).map(|_| rng.gen_range(0..4)).collect());
        let map = (0..6)
            .map(|_| distinct((0..rng.gen_range(0..=3)).map(|_| rng.gen_range(0..6)).collect()))
            .collect();
        Universe { sets, pairs, list, map }
    }

    /// Assignments defining the universe.
    pub fn prelude(&self) -> String {
        let mut out = String::new();
        for (name, items) in &self.sets {
            let items: Vec<String> = items.iter().map(|x| x.to_string()).collect();
            let _ = writeln!(out, "{} = {}", name, set_text(&items));
        }
        for (name, items) in &self.pairs {
            let items: Vec<String> = items.iter().map(|(a, b)| format!("({}, {})", a, b)).collect();
            let _ = writeln!(out, "{} = {}", name, set_text(&items));
        }
        if let Some(list) = &self.list {
            let items: Vec<String> = list.iter().map(|x| x.to_string()).collect();
            let _ = writeln!(out, "L = [{}]", items.join(", "));
        }
        let entries: Vec<String> = self
            .map
            .iter()
            .enumerate()
            .map(|(k, items)| {
                let items: Vec<String> = items.iter().map(|x| x.to_string()).collect();
                format!("{}: {}", k, set_text(&items))
            })
            .collect();
        let _ = writeln!(out, "M = {{{}}}", entries.join(", "));
        out
    }
}

#[derive(Clone, Debug)]
pub enum GenClause {
    Member { pattern: String, source: String },
    Cond(String),
}

impl GenClause {
    pub fn text(&self) -> String {
        match self {
            GenClause::Member { pattern, source } => format!("{} in {}", pattern, source),
            GenClause::Cond(c) => c.clone(),
        }
    }
}

/// A generated construct: operator, head or predicate, and clauses.
#[derive(Clone, Debug)]
pub struct GenConstruct {
    pub op: &'static str,
    /// Head for comprehensions and aggregations, predicate for quantifiers.
    pub body: String,
    pub clauses: Vec<GenClause>,
}

impl GenConstruct {
    pub fn is_quantifier(&self) -> bool {
        self.op == "each" || self.op == "some"
    }

    /// Source text with the clauses in the given order.
    pub fn render_order(&self, order: &[usize]) -> String {
        let clauses: Vec<String> = order.iter().map(|&i| self.clauses[i].text()).collect();
        if self.is_quantifier() {
            format!("{}({}, has= {})", self.op, clauses.join(", "), self.body)
        } else {
            format!("{}({}, {})", self.op, self.body, clauses.join(", "))
        }
    }

    pub fn render(&self) -> String {
        let order: Vec<usize> = (0..self.clauses.len()).collect();
        self.render_order(&order)
    }

    /// Fresh variable names of top-level membership patterns, in order.
    pub fn pattern_names(&self) -> Vec<String> {
        let mut names = Vec::new();
        for c in &self.clauses {
            if let GenClause::Member { pattern, .. } = c {
                for tok in pattern.split(|ch: char| !ch.is_alphanumeric() && ch != '_') {
                    if !tok.is_empty() && tok != "_" && !names.iter().any(|n| n == tok) {
                        names.push(tok.to_string());
                    }
                }
            }
        }
        names
    }
}

#[derive(Clone, Debug)]
pub struct GenConfig {
    pub max_clauses: usize,
    /// Quantifier nesting depth, counting the outermost construct.
    pub max_depth: usize,
    pub ops: Vec<&'static str>,
    pub with_list: bool,
}

impl GenConfig {
    pub fn differential() -> Self {
        GenConfig {
            max_clauses: 3,
            max_depth: 2,
            ops: vec![
                "each",
                "some",
                "setof",
                "listof",
                "sumof",
                "productof",
                "countof",
                "maxof",
                "minof",
            ],
            with_list: true,
        }
    }
}

const POOLS: [[&str; 4]; 3] = [["x", "y", "z", "w"], ["p", "q", "s", "t"], ["i", "j", "k", "n"]];

pub struct Gen<'r, R: Rng> {
    pub rng: &'r mut R,
    pub cfg: GenConfig,
}

impl<'r, R: Rng> Gen<'r, R> {
    pub fn new(rng: &'r mut R, cfg: GenConfig) -> Self {
        Gen { rng, cfg }
    }

    fn pick<'a>(&mut self, items: &'a [String]) -> &'a str {
        &items[self.rng.gen_range(0..items.len())]
    }

    fn single_source(&mut self) -> String {
        let mut names = vec!["A", "B", "C"];
        if self.cfg.with_list {
            names.push("L");
        }
        names[self.rng.gen_range(0..names.len())].to_string()
    }

    /// A membership clause. `fresh` are names still free for this construct.
    fn member(&mut self, depth: usize, bound: &mut Vec<String>, outer: &[String], must_bind: bool) -> GenClause {
        let pool: Vec<String> = POOLS[depth]
            .iter()
            .map(|s| s.to_string())
            .filter(|n| !bound.contains(n) && !outer.contains(n))
            .collect();
        let mut known: Vec<String> = bound.clone();
        known.extend(outer.iter().cloned());
        let component = |g: &mut Self, allow_wild: bool, new_here: &mut Vec<String>| -> String {
            let roll: f64 = g.rng.gen();
            let unused: Vec<String> = pool.iter().filter(|n| !new_here.contains(n)).cloned().collect();
            if (roll < 0.6 || known.is_empty()) && !unused.is_empty() {
                let n = g.pick(&unused).to_string();
                new_here.push(n.clone());
                n
            } else if roll < 0.7 && !new_here.is_empty() {
                // the same fresh variable twice in one pattern
                g.pick(new_here).to_string()
            } else if (roll < 0.9 || !allow_wild) && !known.is_empty() {
                g.pick(&known).to_string()
            } else {
                String::from("_")
            }
        };
        loop {
            let mut new_here: Vec<String> = Vec::new();
            let roll: f64 = self.rng.gen();
            let clause = if roll < 0.45 {
                let v = component(self, false, &mut new_here);
                GenClause::Member {
                    pattern: v,
                    source: self.single_source(),
                }
            } else if roll < 0.85 || known.is_empty() {
                let a = component(self, true, &mut new_here);
                let b = component(self, true, &mut new_here);
                let src = if self.rng.gen_bool(0.5) { "R" } else { "S" };
                GenClause::Member {
                    pattern: format!("({}, {})", a, b),
                    source: src.to_string(),
                }
            } else {
                let key = self.pick(&known).to_string();
                let v = component(self, false, &mut new_here);
                GenClause::Member {
                    pattern: v,
                    source: format!("M[{}]", key),
                }
            };
            if must_bind && new_here.is_empty() {
                continue;
            }
            bound.extend(new_here);
            return clause;
        }
    }

    fn atom(&mut self, vars: &[String]) -> String {
        let a = self.pick(vars).to_string();
        let b = self.pick(vars).to_string();
        match self.rng.gen_range(0..7) {
            0 => format!("{} < {}", a, b),
            1 => format!("{} != {}", a, b),
            2 => format!("{} + {} == {}", a, b, self.rng.gen_range(0..8)),
            3 => format!("{} % 2 == 0", a),
            4 => format!("({}, {}) in R", a, b),
            5 => format!("not ({} in B)", a),
            _ => format!("{} >= {}", a, self.rng.gen_range(0..5)),
        }
    }

    /// Condition clause; nested constructs here are side-effect free.
    fn condition(&mut self, depth: usize, vars: &[String]) -> String {
        if depth + 1 < self.cfg.max_depth && self.rng.gen_bool(0.2) {
            let op = ["each", "countof", "sumof"][self.rng.gen_range(0..3)];
            let inner = self.construct_with(op, depth + 1, vars);
            return match op {
                "each" => inner.render(),
                _ => format!("{} > {}", inner.render(), self.rng.gen_range(0..3)),
            };
        }
        self.atom(vars)
    }

    fn predicate(&mut self, depth: usize, vars: &[String]) -> String {
        let base = self.atom(vars);
        if depth + 1 < self.cfg.max_depth && self.rng.gen_bool(0.5) {
            let op = if self.rng.gen_bool(0.5) { "each" } else { "some" };
            let inner = self.construct_with(op, depth + 1, vars).render();
            return match self.rng.gen_range(0..5) {
                0 => inner,
                1 => format!("{} and {}", base, inner),
                2 => format!("{} or {}", base, inner),
                3 => format!("{} implies {}", base, inner),
                _ => format!("not {}", inner),
            };
        }
        match self.rng.gen_range(0..4) {
            0 => format!("not ({})", base),
            1 => {
                let other = self.atom(vars);
                format!("{} or {}", base, other)
            }
            _ => base,
        }
    }

    fn head(&mut self, op: &str, vars: &[String], multi_clause: bool) -> String {
        let a = self.pick(vars).to_string();
        let b = self.pick(vars).to_string();
        match op {
            "setof" | "listof" | "countof" => match self.rng.gen_range(0..3) {
                0 => a,
                1 => format!("({}, {})", a, b),
                _ => format!("{} + {}", a, b),
            },
            "sumof" => match self.rng.gen_range(0..3) {
                0 => a,
                1 => format!("{} * {}", a, b),
                _ => format!("{} - {}", a, b),
            },
            // keep products far from overflow
            "productof" if multi_clause => format!("1 - 2 * ({} % 2)", a),
            "productof" => format!("{} + 1", a),
            _ => match self.rng.gen_range(0..3) {
                0 => a,
                1 => format!("{} - {}", a, b),
                _ => format!("({}, {})", a, b),
            },
        }
    }

    /// A construct of the given operator whose free names are `outer`.
    pub fn construct_with(&mut self, op: &'static str, depth: usize, outer: &[String]) -> GenConstruct {
        let n = self.rng.gen_range(1..=self.cfg.max_clauses);
        let mut bound: Vec<String> = Vec::new();
        let mut clauses = Vec::new();
        for k in 0..n {
            if k == 0 || self.rng.gen_bool(0.6) {
                clauses.push(self.member(depth, &mut bound, outer, k == 0));
            } else {
                let mut vars = bound.clone();
                vars.extend(outer.iter().cloned());
                let c = self.condition(depth, &vars);
                clauses.push(GenClause::Cond(c));
            }
        }
        clauses.shuffle(self.rng);
        let mut vars = bound.clone();
        vars.extend(outer.iter().cloned());
        let body = if op == "each" || op == "some" {
            self.predicate(depth, &vars)
        } else {
            self.head(op, &vars, n > 1)
        };
        GenConstruct { op, body, clauses }
    }

    pub fn construct(&mut self) -> GenConstruct {
        let op = self.cfg.ops[self.rng.gen_range(0..self.cfg.ops.len())];
        self.construct_with(op, 0, &[])
    }
}

/// Outcome of running a program: last expression value (or error), globals, stdout.
#[derive(Debug)]
pub struct Run {
    pub result: Result<Option<Value>, RuntimeError>,
    pub globals: Vec<(String, Value)>,
    pub stdout: String,
}

pub fn run_program(src: &str, config: Config) -> Run {
    let rp = check(src).unwrap_or_else(|e| panic!("generated program is invalid: {}\n{}", e, src));
    let mut interp = Interpreter::new(config, BufferOutput::default());
    let result = interp.run(&rp);
    let globals = interp.globals().map(|(k, v)| (k.to_string(), v.clone())).collect();
    Run {
        result,
        globals,
        stdout: interp.into_output().stdout,
    }
}

/// Same names bound to equal values.
pub fn same_globals(a: &[(String, Value)], b: &[(String, Value)]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|((n, x), (m, y))| n == m && value_eq(x, y))
}

pub fn config(path: Path) -> Config {
    Config {
        path,
        ..Config::default()
    }
}

/// Same value or same error kind.
pub fn same_result(a: &Result<Option<Value>, RuntimeError>, b: &Result<Option<Value>, RuntimeError>) -> bool {
    match (a, b) {
        (Ok(Some(x)), Ok(Some(y))) => value_eq(x, y),
        (Ok(None), Ok(None)) => true,
        (Err(x), Err(y)) => x.kind == y.kind,
        _ => false,
    }
}

/// Every permutation of `0..n`, in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, rest: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest.is_empty() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..rest.len() {
            let x = rest.remove(i);
            prefix.push(x);
            go(prefix, rest, out);
            prefix.pop();
            rest.insert(i, x);
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut (0..n).collect(), &mut out);
    out
}

pub fn corpus_dir() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

/// Corpus program names (without extension), sorted.
pub fn corpus_names() -> Vec<String> {
    let mut names: Vec<String> = std::fs::read_dir(corpus_dir())
        .expect("corpus directory")
        .filter_map(|e| {
            let p = e.ok()?.path();
            if p.extension()? != "dml" {
                return None;
            }
            Some(p.file_stem()?.to_string_lossy().into_owned())
        })
        .collect();
    names.sort();
    names
}
