use super::*;
use crate::check;
use alloc::string::ToString;
use alloc::vec;

const PATHS: [Path; 3] = [Path::Direct, Path::Lowered, Path::Differential];

fn run_with(src: &str, path: Path) -> (RResult<Option<Value>>, Interpreter<BufferOutput>) {
    let rp = check(src).unwrap_or_else(|e| panic!("{}", e));
    let config = Config {
        path,
        ..Config::default()
    };
    let mut interp = Interpreter::new(config, BufferOutput::default());
    let r = interp.run(&rp);
    (r, interp)
}

/// Value of the last expression, checked to agree on every path.
fn value(src: &str) -> Value {
    let mut seen: Option<Value> = None;
    for path in PATHS {
        let (r, _) = run_with(src, path);
        let v = r.unwrap_or_else(|e| panic!("{:?}: {}", path, e)).expect("expression");
        if let Some(prev) = &seen {
            assert_eq!(prev, &v, "{:?}", path);
        }
        seen = Some(v);
    }
    seen.unwrap()
}

fn error(src: &str) -> RuntimeErrorKind {
    let mut kind = None;
    for path in PATHS {
        let (r, _) = run_with(src, path);
        let k = r.expect_err("runtime error expected").kind;
        if let Some(prev) = kind {
            assert_eq!(prev, k, "{:?}", path);
        }
        kind = Some(k);
    }
    kind.unwrap()
}

fn stdout(src: &str) -> String {
    let mut out: Option<String> = None;
    for path in PATHS {
        let (r, interp) = run_with(src, path);
        r.unwrap_or_else(|e| panic!("{:?}: {}", path, e));
        let text = interp.output().stdout.clone();
        if let Some(prev) = &out {
            assert_eq!(prev, &text, "{:?}", path);
        }
        out = Some(text);
    }
    out.unwrap()
}

const CAFE: &str = "\
choices = {'Uta': {'pie', 'coffee', 'salad'}, 'Tim': {'pie', 'cake', 'coffee', 'salad'}, 'Yuen': {'pie', 'tea', 'soup'}}
students = choices.keys()
desserts = {'pie', 'cake'}
items = {'pie', 'cake', 'coffee', 'tea', 'salad', 'soup'}
def chose(s, i): return i in choices[s]
";

#[test]
fn implication_table() {
    for (p, q) in [(false, false), (false, true), (true, false), (true, true)] {
        let src = alloc::format!(
            "{} implies {}\n",
            if p { "True" } else { "False" },
            if q { "True" } else { "False" }
        );
        assert_eq!(value(&src), Value::Bool(!p || q));
    }
    // the right operand is not evaluated when the left is false
    assert_eq!(value("False implies 1 // 0 == 0\n"), Value::Bool(true));
}

#[test]
fn cafe_quantifiers() {
    let src = alloc::format!("{}some(I in items, has= each(S in students, has= chose(S,I)))\n", CAFE);
    assert_eq!(value(&src), Value::Bool(true));
    for path in PATHS {
        let (_, interp) = run_with(&src, path);
        assert_eq!(interp.global("I"), Some(&Value::str("pie")));
    }
    let src = alloc::format!(
        "{}each(S in students, has= some(D in desserts, has= chose(S,D)))\n",
        CAFE
    );
    assert_eq!(value(&src), Value::Bool(true));
    assert_eq!(
        value(&alloc::format!("{}countof(S, S in students)\n", CAFE)),
        Value::Int(3)
    );
    assert_eq!(value(&alloc::format!("{}'pie' in desserts\n", CAFE)), Value::Bool(true));
    assert_eq!(value(&alloc::format!("{}len(desserts)\n", CAFE)), Value::Int(2));
}

#[test]
fn first_witness_in_insertion_order() {
    let (r, interp) = run_with("some(x in {4, 5}, has= x % 2 == 0)\n", Path::Lowered);
    assert_eq!(r.unwrap(), Some(Value::Bool(true)));
    assert_eq!(interp.global("x"), Some(&Value::Int(4)));
    let (_, interp) = run_with("some(x in {5, 6, 4}, has= x % 2 == 0)\n", Path::Direct);
    assert_eq!(interp.global("x"), Some(&Value::Int(6)));
}

#[test]
fn empty_domains() {
    assert_eq!(value("some(x in {}, has= True)\n"), Value::Bool(false));
    assert_eq!(value("each(x in {}, has= False)\n"), Value::Bool(true));
    // the predicate is never evaluated
    assert_eq!(value("each(x in {}, has= 1 // 0 == 1)\n"), Value::Bool(true));
    assert_eq!(value("productof(x, x in {})\n"), Value::Int(1));
    assert_eq!(value("sumof(x, x in {})\n"), Value::Int(0));
    assert_eq!(error("maxof(x, x in {})\n"), RuntimeErrorKind::EmptyAggregate);
}

#[test]
fn comprehension_examples() {
    let set = |xs: &[i64]| Value::Set(crate::value::Set::from_values(xs.iter().map(|&x| Value::Int(x))).unwrap());
    assert_eq!(
        value("A = {1, 2, 3}\nB = {2, 3, 4}\nsetof(x, x in A, x in B)\n"),
        set(&[2, 3])
    );
    assert_eq!(value("sumof(x, x in {1, 2, 3})\n"), Value::Int(6));
    assert_eq!(
        value("R = {(1, 2), (1, 3), (2, 3)}\nsumof(x * x, (x, y) in R)\n"),
        Value::Int(6)
    );
    assert_eq!(
        value("R = {(1, 2), (1, 3), (2, 3)}\nsetof(x, (x, _) in R)\n"),
        set(&[1, 2])
    );
    assert_eq!(value("maxof(x - y, (x, y) in {(5, 1), (2, 2)})\n"), Value::Int(4));
    assert_eq!(value("minof(x, x in [3, 1, 2])\n"), Value::Int(1));
    assert_eq!(
        value("listof(x, x in [3, 1, 3])\n"),
        Value::seq(vec![Value::Int(3), Value::Int(1), Value::Int(3)])
    );
    assert_eq!(
        value("range(1, 4)\n"),
        Value::seq(vec![Value::Int(1), Value::Int(2), Value::Int(3)])
    );
}

#[test]
fn reordered_dependent_sources() {
    let src = "stations = {'a': {1, 2}, 'b': {2, 3}}\nsetof(i, i in stations[s], s in stations)\n";
    assert_eq!(value(src).to_string(), "{1, 2, 3}");
}

#[test]
fn non_collection_domain() {
    assert_eq!(error("some(x in 5, has= True)\n"), RuntimeErrorKind::TypeMismatch);
    assert_eq!(
        error("x = 5\nsome(x in 5, has= True)\n"),
        RuntimeErrorKind::TypeMismatch
    );
}

#[test]
fn while_some_transitive_closure() {
    let src = "E = {(1, 2), (2, 3)}\n\
               while some((x, y) in E, (y2, z) in E, has= y == y2 and not ((x, z) in E)):\n    E = E + {(x, z)}\n\
               E\n";
    assert_eq!(value(src).to_string(), "{(1, 2), (1, 3), (2, 3)}");
}

#[test]
fn statements() {
    let gcd = "def gcd(a, b):\n    while b != 0:\n        a, b = b, a % b\n    return a\ngcd(12, 18)\n";
    assert_eq!(value(gcd), Value::Int(6));
    let hanoi = "def hanoi(n, a, b, c):\n    if n == 0:\n        return []\n    return hanoi(n - 1, a, c, b) + [(a, c)] + hanoi(n - 1, b, a, c)\nlen(hanoi(3, 1, 2, 3))\n";
    assert_eq!(value(hanoi), Value::Int(7));
    assert_eq!(
        stdout("for (a, b) in [(1, 'x'), (2, 'y')]:\n    print(a, b)\n"),
        "1 x\n2 y\n"
    );
    assert_eq!(stdout("print({3, 1, 2}, 'hi', ('a',))\n"), "{1, 2, 3} hi ('a',)\n");
}

#[test]
fn logic_variables_do_not_leak() {
    for path in PATHS {
        let (r, interp) = run_with("S = {1, 2}\ns = setof(x, x in S)\nt = each(y in S, has= y > 0)\n", path);
        r.unwrap();
        assert!(interp.global("x").is_none());
        assert!(interp.global("y").is_none());
    }
}

#[test]
fn witnesses_go_to_function_locals() {
    let src = "S = {1, 2, 3}\ndef big():\n    if some(x in S, has= x > 1):\n        return x\n    return 0\nbig()\n";
    assert_eq!(value(src), Value::Int(2));
    let (_, interp) = run_with(src, Path::Lowered);
    assert!(interp.global("x").is_none());
}

#[test]
fn errors() {
    assert_eq!(error("{'a': 1}['b']\n"), RuntimeErrorKind::KeyMissing);
    assert_eq!(error("{[1]}\n"), RuntimeErrorKind::Unhashable);
    assert_eq!(error("1 // 0\n"), RuntimeErrorKind::DivisionByZero);
    assert_eq!(error("9223372036854775807 + 1\n"), RuntimeErrorKind::Overflow);
    assert_eq!(error("def f(a): return a\nf(1, 2)\n"), RuntimeErrorKind::ArityMismatch);
    assert_eq!(error("1 + 'a'\n"), RuntimeErrorKind::TypeMismatch);
    assert_eq!(error("1 and True\n"), RuntimeErrorKind::TypeMismatch);
    assert_eq!(error("setof(x, x in {1, 2}, x)\n"), RuntimeErrorKind::TypeMismatch);
}

#[test]
fn recursion_limit() {
    let rp = check("def f(n): return f(n + 1)\nf(0)\n").unwrap();
    let config = Config {
        recursion_limit: 50,
        ..Config::default()
    };
    let mut interp = Interpreter::new(config, BufferOutput::default());
    assert_eq!(interp.run(&rp).unwrap_err().kind, RuntimeErrorKind::RecursionLimit);
}

#[test]
fn some_stops_at_first_witness() {
    let src = "xs = range(0, 1000)\nsome(x in xs, has= x == 3)\n";
    for path in [Path::Direct, Path::Lowered] {
        let (r, interp) = run_with(src, path);
        assert_eq!(r.unwrap(), Some(Value::Bool(true)));
        assert_eq!(interp.stats.ir_iterations + interp.stats.direct_iterations, 4);
    }
}

#[test]
fn differential_detects_divergence() {
    // the lowered path evaluates the hoisted condition before the empty inner loop
    let src = "some(x in {0}, y in {}, 1 // x == 0, has= True)\n";
    let (r, _) = run_with(src, Path::Differential);
    assert_eq!(r.unwrap_err().kind, RuntimeErrorKind::DifferentialMismatch);
}

#[test]
fn differential_keeps_output_once() {
    let src = "S = {1, 2}\ndef show(x):\n    print(x)\n    return True\nt = setof(x, x in S, show(x))\n";
    assert_eq!(stdout(src), "1\n2\n");
}

#[test]
fn sized_plan_agrees() {
    let src = "A = range(0, 50)\nB = {3, 7}\nsetof(x, x in A, x in B)\n";
    let rp = check(src).unwrap();
    for path in PATHS {
        let config = Config {
            path,
            plan: PlanStrategy::Sized,
            ..Config::default()
        };
        let mut interp = Interpreter::new(config, BufferOutput::default());
        let v = interp.run(&rp).unwrap().unwrap();
        assert_eq!(v.to_string(), "{3, 7}");
    }
}

#[test]
fn trace_lines() {
    let rp = check("sumof(x, x in {1, 2})\n").unwrap();
    let config = Config {
        trace: true,
        ..Config::default()
    };
    let mut interp = Interpreter::new(config, BufferOutput::default());
    interp.run(&rp).unwrap();
    assert_eq!(
        interp.output().trace,
        "trace: 1:1 sumof [lowered] -> 3 (2 elements visited)\n"
    );
}
