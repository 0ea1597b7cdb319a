//! The runtime value universe.
//!
//! Values are immutable once built. Sets and maps keep insertion order for
//! iteration (so witnesses are reproducible) and carry a sorted index for
//! membership. Only `Int`, `Bool`, `Str` and tuples of those may be set
//! elements or map keys.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::frontend::ast::FuncDef;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ValueErrorKind {
    TypeMismatch,
    Unhashable,
    Overflow,
    DivisionByZero,
}

impl ValueErrorKind {
    pub fn tag(self) -> &'static str {
        match self {
            ValueErrorKind::TypeMismatch => "TypeMismatch",
            ValueErrorKind::Unhashable => "Unhashable",
            ValueErrorKind::Overflow => "Overflow",
            ValueErrorKind::DivisionByZero => "DivisionByZero",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValueError {
    pub kind: ValueErrorKind,
    pub message: String,
}

impl ValueError {
    pub fn new(kind: ValueErrorKind, message: impl Into<String>) -> Self {
        ValueError {
            kind,
            message: message.into(),
        }
    }

    pub fn type_mismatch(message: impl Into<String>) -> Self {
        Self::new(ValueErrorKind::TypeMismatch, message)
    }
}

impl fmt::Display for ValueError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind.tag(), self.message)
    }
}

pub type ValueResult<T> = Result<T, ValueError>;

#[derive(Clone)]
pub enum Value {
    /// Result of calls that return nothing (`print`, functions without `return`).
    None,
    Int(i64),
    Bool(bool),
    Str(Arc<str>),
    Tuple(Arc<[Value]>),
    Set(Set),
    Seq(Arc<[Value]>),
    Map(Map),
    Func(Func),
}

impl Value {
    pub fn str(s: &str) -> Value {
        Value::Str(Arc::from(s))
    }

    pub fn tuple(items: Vec<Value>) -> Value {
        Value::Tuple(Arc::from(items))
    }

    pub fn seq(items: Vec<Value>) -> Value {
        Value::Seq(Arc::from(items))
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Value::None => "None",
            Value::Int(_) => "int",
            Value::Bool(_) => "bool",
            Value::Str(_) => "str",
            Value::Tuple(_) => "tuple",
            Value::Set(_) => "set",
            Value::Seq(_) => "list",
            Value::Map(_) => "map",
            Value::Func(_) => "function",
        }
    }

    /// Whether the value may be a set element or map key.
    pub fn is_hashable(&self) -> bool {
        match self {
            Value::Int(_) | Value::Bool(_) | Value::Str(_) => true,
            Value::Tuple(items) => items.iter().all(Value::is_hashable),
            _ => false,
        }
    }

    pub fn as_bool(&self) -> ValueResult<bool> {
        match self {
            Value::Bool(b) => Ok(*b),
            other => Err(ValueError::type_mismatch(format!(
                "expected bool, found {}",
                other.kind_name()
            ))),
        }
    }

    pub fn as_int(&self) -> ValueResult<i64> {
        match self {
            Value::Int(n) => Ok(*n),
            other => Err(ValueError::type_mismatch(format!(
                "expected int, found {}",
                other.kind_name()
            ))),
        }
    }

    /// Elements visited by `for` loops and membership clauses, in iteration order.
    /// Maps yield their keys.
    pub fn elements(&self) -> ValueResult<Elements> {
        match self {
            Value::Set(s) => Ok(Elements::Set(s.clone())),
            Value::Seq(items) | Value::Tuple(items) => Ok(Elements::Slice(items.clone())),
            Value::Map(m) => Ok(Elements::Keys(m.clone())),
            other => Err(ValueError::type_mismatch(format!(
                "cannot iterate over {}",
                other.kind_name()
            ))),
        }
    }

    /// `needle in self`.
    pub fn contains(&self, needle: &Value) -> ValueResult<bool> {
        match self {
            Value::Set(s) => Ok(s.contains(needle)),
            Value::Map(m) => Ok(m.get(needle).is_some()),
            Value::Seq(items) | Value::Tuple(items) => Ok(items.iter().any(|v| v == needle)),
            Value::Str(hay) => match needle {
                Value::Str(n) => Ok(hay.contains(&**n)),
                other => Err(ValueError::type_mismatch(format!(
                    "'in <str>' requires a str operand, found {}",
                    other.kind_name()
                ))),
            },
            other => Err(ValueError::type_mismatch(format!(
                "membership test on {}",
                other.kind_name()
            ))),
        }
    }
}

/// Snapshot of an iterable value's elements.
pub enum Elements {
    Set(Set),
    Slice(Arc<[Value]>),
    Keys(Map),
}

impl Elements {
    pub fn len(&self) -> usize {
        match self {
            Elements::Set(s) => s.len(),
            Elements::Slice(s) => s.len(),
            Elements::Keys(m) => m.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, i: usize) -> &Value {
        match self {
            Elements::Set(s) => &s.0.items[i],
            Elements::Slice(s) => &s[i],
            Elements::Keys(m) => &m.0.entries[i].0,
        }
    }
}

// ---------------------------------------------------------------------------
// Hash key order

/// Total order over hashable values, used for set/map indexes and for
/// canonical rendering. Agrees with `value_cmp` wherever that is defined.
fn key_cmp(a: &Value, b: &Value) -> Ordering {
    fn rank(v: &Value) -> u8 {
        match v {
            Value::Bool(_) => 0,
            Value::Int(_) => 1,
            Value::Str(_) => 2,
            Value::Tuple(_) => 3,
            _ => 4,
        }
    }
    match (a, b) {
        (Value::Bool(x), Value::Bool(y)) => x.cmp(y),
        (Value::Int(x), Value::Int(y)) => x.cmp(y),
        (Value::Str(x), Value::Str(y)) => x.cmp(y),
        (Value::Tuple(x), Value::Tuple(y)) => {
            for (l, r) in x.iter().zip(y.iter()) {
                match key_cmp(l, r) {
                    Ordering::Equal => continue,
                    other => return other,
                }
            }
            x.len().cmp(&y.len())
        }
        _ => rank(a).cmp(&rank(b)),
    }
}

#[derive(Clone)]
struct Key(Value);

impl PartialEq for Key {
    fn eq(&self, other: &Self) -> bool {
        key_cmp(&self.0, &other.0) == Ordering::Equal
    }
}
impl Eq for Key {}
impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        key_cmp(&self.0, &other.0)
    }
}

fn unhashable(v: &Value) -> ValueError {
    ValueError::new(
        ValueErrorKind::Unhashable,
        format!("{} values cannot be set elements or map keys", v.kind_name()),
    )
}

// ---------------------------------------------------------------------------
// Sets

#[derive(Clone, Default)]
struct SetInner {
    items: Vec<Value>,
    index: BTreeSet<Key>,
}

/// Duplicate-free, insertion-ordered collection of hashable values.
#[derive(Clone, Default)]
pub struct Set(Arc<SetInner>);

impl Set {
    pub fn new() -> Self {
        Set::default()
    }

    pub fn from_values<I: IntoIterator<Item = Value>>(values: I) -> ValueResult<Set> {
        let mut set = Set::new();
        for v in values {
            set.insert(v)?;
        }
        Ok(set)
    }

    /// Inserts `v`, returning whether it was new.
    pub fn insert(&mut self, v: Value) -> ValueResult<bool> {
        if !v.is_hashable() {
            return Err(unhashable(&v));
        }
        if self.0.index.contains(&Key(v.clone())) {
            return Ok(false);
        }
        let inner = Arc::make_mut(&mut self.0);
        inner.index.insert(Key(v.clone()));
        inner.items.push(v);
        Ok(true)
    }

    pub fn contains(&self, v: &Value) -> bool {
        v.is_hashable() && self.0.index.contains(&Key(v.clone()))
    }

    pub fn len(&self) -> usize {
        self.0.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.items.is_empty()
    }

    pub fn iter(&self) -> core::slice::Iter<'_, Value> {
        self.0.items.iter()
    }

    pub fn union(&self, other: &Set) -> Set {
        let mut out = self.clone();
        for v in other.iter() {
            // elements of a set are hashable by construction
            let _ = out.insert(v.clone());
        }
        out
    }

    pub fn intersection(&self, other: &Set) -> Set {
        self.filtered(|v| other.contains(v))
    }

    pub fn difference(&self, other: &Set) -> Set {
        self.filtered(|v| !other.contains(v))
    }

    pub fn is_subset(&self, other: &Set) -> bool {
        self.iter().all(|v| other.contains(v))
    }

    fn filtered(&self, keep: impl Fn(&Value) -> bool) -> Set {
        let mut out = Set::new();
        for v in self.iter().filter(|v| keep(v)) {
            let _ = out.insert(v.clone());
        }
        out
    }

    fn sorted(&self) -> Vec<&Value> {
        let mut items: Vec<&Value> = self.iter().collect();
        items.sort_by(|a, b| key_cmp(a, b));
        items
    }
}

/// Returns `s` with `v` added. Idempotent; insertion order is kept.
pub fn set_insert(s: &Set, v: Value) -> ValueResult<Set> {
    let mut out = s.clone();
    out.insert(v)?;
    Ok(out)
}

// ---------------------------------------------------------------------------
// Maps

#[derive(Clone, Default)]
struct MapInner {
    entries: Vec<(Value, Value)>,
    index: BTreeMap<Key, usize>,
}

/// Insertion-ordered map from hashable keys to values.
#[derive(Clone, Default)]
pub struct Map(Arc<MapInner>);

impl Map {
    pub fn new() -> Self {
        Map::default()
    }

    /// Builds a map; a repeated key keeps its first position and takes the last value.
    pub fn from_entries<I: IntoIterator<Item = (Value, Value)>>(entries: I) -> ValueResult<Map> {
        let mut map = Map::new();
        for (k, v) in entries {
            map.insert(k, v)?;
        }
        Ok(map)
    }

    pub fn insert(&mut self, key: Value, value: Value) -> ValueResult<()> {
        if !key.is_hashable() {
            return Err(unhashable(&key));
        }
        let inner = Arc::make_mut(&mut self.0);
        match inner.index.get(&Key(key.clone())) {
            Some(&i) => inner.entries[i].1 = value,
            None => {
                inner.index.insert(Key(key.clone()), inner.entries.len());
                inner.entries.push((key, value));
            }
        }
        Ok(())
    }

    pub fn get(&self, key: &Value) -> Option<&Value> {
        if !key.is_hashable() {
            return None;
        }
        self.0.index.get(&Key(key.clone())).map(|&i| &self.0.entries[i].1)
    }

    pub fn len(&self) -> usize {
        self.0.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Value, &Value)> {
        self.0.entries.iter().map(|(k, v)| (k, v))
    }

    pub fn keys(&self) -> Set {
        let mut out = Set::new();
        for (k, _) in self.iter() {
            let _ = out.insert(k.clone());
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Functions

/// A user-defined function. Equality is identity: each execution of a `def`
/// produces a distinct function.
#[derive(Clone)]
pub struct Func(pub Arc<FuncDef>);

impl Func {
    pub fn name(&self) -> &str {
        &self.0.name
    }
}

// ---------------------------------------------------------------------------
// Equality and ordering

impl PartialEq for Value {
    fn eq(&self, other: &Value) -> bool {
        value_eq(self, other)
    }
}

/// Structural equality. Sets and maps compare extensionally, ignoring order.
pub fn value_eq(a: &Value, b: &Value) -> bool {
    match (a, b) {
        (Value::None, Value::None) => true,
        (Value::Int(x), Value::Int(y)) => x == y,
        (Value::Bool(x), Value::Bool(y)) => x == y,
        (Value::Str(x), Value::Str(y)) => x == y,
        (Value::Tuple(x), Value::Tuple(y)) | (Value::Seq(x), Value::Seq(y)) => {
            x.len() == y.len() && x.iter().zip(y.iter()).all(|(l, r)| value_eq(l, r))
        }
        (Value::Set(x), Value::Set(y)) => x.len() == y.len() && x.is_subset(y),
        (Value::Map(x), Value::Map(y)) => {
            x.len() == y.len() && x.iter().all(|(k, v)| y.get(k).is_some_and(|w| value_eq(v, w)))
        }
        (Value::Func(x), Value::Func(y)) => Arc::ptr_eq(&x.0, &y.0),
        _ => false,
    }
}

/// Order on ints, strings, and same-length tuples of mutually comparable
/// components. Everything else is a `TypeMismatch`.
pub fn value_cmp(a: &Value, b: &Value) -> ValueResult<Ordering> {
    match (a, b) {
        (Value::Int(x), Value::Int(y)) => Ok(x.cmp(y)),
        (Value::Str(x), Value::Str(y)) => Ok(x.cmp(y)),
        (Value::Tuple(x), Value::Tuple(y)) if x.len() == y.len() => {
            let mut result = Ordering::Equal;
            // every component pair must be comparable, not only the prefix
            for (l, r) in x.iter().zip(y.iter()) {
                let c = value_cmp(l, r)?;
                if result == Ordering::Equal {
                    result = c;
                }
            }
            Ok(result)
        }
        _ => Err(ValueError::type_mismatch(format!(
            "cannot order {} and {}",
            render(a),
            render(b)
        ))),
    }
}

// ---------------------------------------------------------------------------
// Arithmetic

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    FloorDiv,
    Mod,
}

impl ArithOp {
    pub fn symbol(self) -> &'static str {
        match self {
            ArithOp::Add => "+",
            ArithOp::Sub => "-",
            ArithOp::Mul => "*",
            ArithOp::FloorDiv => "//",
            ArithOp::Mod => "%",
        }
    }
}

/// Checked 64-bit arithmetic. `//` floors, `%` takes the sign of the divisor.
pub fn arith(op: ArithOp, a: i64, b: i64) -> ValueResult<i64> {
    let overflow = || {
        ValueError::new(
            ValueErrorKind::Overflow,
            format!("{} {} {} overflows 64 bits", a, op.symbol(), b),
        )
    };
    let by_zero = || ValueError::new(ValueErrorKind::DivisionByZero, format!("{} {} 0", a, op.symbol()));
    match op {
        ArithOp::Add => a.checked_add(b).ok_or_else(overflow),
        ArithOp::Sub => a.checked_sub(b).ok_or_else(overflow),
        ArithOp::Mul => a.checked_mul(b).ok_or_else(overflow),
        ArithOp::FloorDiv => {
            if b == 0 {
                return Err(by_zero());
            }
            let q = a.checked_div(b).ok_or_else(overflow)?;
            if (a % b != 0) && ((a < 0) != (b < 0)) {
                Ok(q - 1)
            } else {
                Ok(q)
            }
        }
        ArithOp::Mod => {
            if b == 0 {
                return Err(by_zero());
            }
            if b == -1 {
                return Ok(0);
            }
            let r = a % b;
            if r != 0 && ((r < 0) != (b < 0)) {
                Ok(r + b)
            } else {
                Ok(r)
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Rendering

/// Canonical text of a value. Strings are quoted; set elements and map keys
/// appear in sorted order.
pub fn render(v: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, v);
    out
}

/// Text used by `print`: like `render`, except a top-level string is unquoted.
pub fn render_display(v: &Value) -> String {
    match v {
        Value::Str(s) => s.to_string(),
        other => render(other),
    }
}

fn write_seq<'a>(out: &mut String, open: &str, close: &str, items: impl Iterator<Item = &'a Value>) {
    out.push_str(open);
    for (i, item) in items.enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        write_value(out, item);
    }
    out.push_str(close);
}

fn write_value(out: &mut String, v: &Value) {
    match v {
        Value::None => out.push_str("None"),
        Value::Int(n) => out.push_str(&n.to_string()),
        Value::Bool(true) => out.push_str("True"),
        Value::Bool(false) => out.push_str("False"),
        Value::Str(s) => {
            out.push('\'');
            for ch in s.chars() {
                match ch {
                    '\\' => out.push_str("\\\\"),
                    '\'' => out.push_str("\\'"),
                    '\n' => out.push_str("\\n"),
                    c => out.push(c),
                }
            }
            out.push('\'');
        }
        Value::Tuple(items) if items.len() == 1 => {
            out.push('(');
            write_value(out, &items[0]);
            out.push_str(",)");
        }
        Value::Tuple(items) => write_seq(out, "(", ")", items.iter()),
        Value::Seq(items) => write_seq(out, "[", "]", items.iter()),
        Value::Set(s) => write_seq(out, "{", "}", s.sorted().into_iter()),
        Value::Map(m) if m.is_empty() => out.push_str("dict()"),
        Value::Map(m) => {
            let mut entries: Vec<(&Value, &Value)> = m.iter().collect();
            entries.sort_by(|a, b| key_cmp(a.0, b.0));
            out.push('{');
            for (i, (k, val)) in entries.into_iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_value(out, k);
                out.push_str(": ");
                write_value(out, val);
            }
            out.push('}');
        }
        Value::Func(f) => {
            out.push_str("<function ");
            out.push_str(f.name());
            out.push('>');
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(self))
    }
}

impl fmt::Debug for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(self))
    }
}

impl fmt::Debug for Set {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(&Value::Set(self.clone())))
    }
}

impl fmt::Debug for Map {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(&Value::Map(self.clone())))
    }
}

impl From<i64> for Value {
    fn from(n: i64) -> Self {
        Value::Int(n)
    }
}

impl From<bool> for Value {
    fn from(b: bool) -> Self {
        Value::Bool(b)
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::str(s)
    }
}

impl From<Set> for Value {
    fn from(s: Set) -> Self {
        Value::Set(s)
    }
}
