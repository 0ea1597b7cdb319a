//! Builtin functions.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::{Interpreter, Output, RResult, RuntimeError, RuntimeErrorKind};
use crate::frontend::ast::Pos;
use crate::value::{render_display, Map, Set, Value};

/// Names resolved as builtins when nothing else binds them.
pub const BUILTINS: &[&str] = &["abs", "dict", "keys", "len", "list", "print", "range", "set"];

/// Longest sequence `range` will build.
pub const RANGE_LIMIT: i64 = 10_000_000;

pub fn is_builtin(name: &str) -> bool {
    BUILTINS.contains(&name)
}

fn arity(name: &str, args: &[Value], allowed: &[usize], pos: Pos) -> RResult<()> {
    if allowed.contains(&args.len()) {
        return Ok(());
    }
    let expected: Vec<String> = allowed.iter().map(|n| format!("{}", n)).collect();
    Err(RuntimeError::new(
        RuntimeErrorKind::ArityMismatch,
        format!(
            "{}() takes {} arguments, got {}",
            name,
            expected.join(" or "),
            args.len()
        ),
        pos,
    ))
}

fn mismatch(message: String, pos: Pos) -> RuntimeError {
    RuntimeError::new(RuntimeErrorKind::TypeMismatch, message, pos)
}

impl<O: Output> Interpreter<O> {
    pub(crate) fn call_builtin(&mut self, name: &str, args: Vec<Value>, pos: Pos) -> RResult<Value> {
        let value_err = |e| RuntimeError::from_value(e, pos);
        match name {
            "print" => {
                let parts: Vec<String> = args.iter().map(render_display).collect();
                let mut line = parts.join(" ");
                line.push('\n');
                self.emit(&line);
                Ok(Value::None)
            }
            "len" => {
                arity(name, &args, &[1], pos)?;
                let n = match &args[0] {
                    Value::Set(s) => s.len(),
                    Value::Seq(xs) | Value::Tuple(xs) => xs.len(),
                    Value::Map(m) => m.len(),
                    Value::Str(s) => s.chars().count(),
                    other => return Err(mismatch(format!("len() of {}", other.kind_name()), pos)),
                };
                Ok(Value::Int(n as i64))
            }
            "keys" => {
                arity(name, &args, &[1], pos)?;
                match &args[0] {
                    Value::Map(m) => Ok(Value::Set(m.keys())),
                    other => Err(mismatch(format!("keys() of {}", other.kind_name()), pos)),
                }
            }
            "range" => {
                arity(name, &args, &[1, 2], pos)?;
                let (lo, hi) = if args.len() == 1 {
                    (0, args[0].as_int().map_err(value_err)?)
                } else {
                    (
                        args[0].as_int().map_err(value_err)?,
                        args[1].as_int().map_err(value_err)?,
                    )
                };
                if hi.saturating_sub(lo) > RANGE_LIMIT {
                    return Err(RuntimeError::new(
                        RuntimeErrorKind::Overflow,
                        format!("range({}, {}) is longer than {}", lo, hi, RANGE_LIMIT),
                        pos,
                    ));
                }
                Ok(Value::seq((lo..hi.max(lo)).map(Value::Int).collect()))
            }
            "set" | "list" => {
                arity(name, &args, &[0, 1], pos)?;
                let items: Vec<Value> = match args.first() {
                    None => Vec::new(),
                    Some(v) => {
                        let elems = v.elements().map_err(value_err)?;
                        (0..elems.len()).map(|i| elems.get(i).clone()).collect()
                    }
                };
                if name == "set" {
                    Ok(Value::Set(Set::from_values(items).map_err(value_err)?))
                } else {
                    Ok(Value::seq(items))
                }
            }
            "dict" => {
                arity(name, &args, &[0], pos)?;
                Ok(Value::Map(Map::new()))
            }
            "abs" => {
                arity(name, &args, &[1], pos)?;
                let n = args[0].as_int().map_err(value_err)?;
                n.checked_abs().map(Value::Int).ok_or_else(|| {
                    RuntimeError::new(RuntimeErrorKind::Overflow, format!("abs({}) overflows 64 bits", n), pos)
                })
            }
            other => Err(mismatch(format!("unknown builtin '{}'", other), pos)),
        }
    }
}
