//! Test-side oracle: a random generator of small finite relations and an
//! evaluator that shares no code with the engine.
#![allow(dead_code)]

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// The twelve valid colourings, columns wa nt sa qld nsw act vic.
pub const COLOURINGS: [[i64; 7]; 12] = [
    [3, 2, 1, 3, 2, 1, 3],
    [3, 2, 1, 3, 2, 3, 3],
    [2, 3, 1, 2, 3, 1, 2],
    [2, 3, 1, 2, 3, 2, 2],
    [3, 1, 2, 3, 1, 2, 3],
    [3, 1, 2, 3, 1, 3, 3],
    [1, 3, 2, 1, 3, 1, 1],
    [1, 3, 2, 1, 3, 2, 1],
    [2, 1, 3, 2, 1, 2, 2],
    [2, 1, 3, 2, 1, 3, 2],
    [1, 2, 3, 1, 2, 1, 1],
    [1, 2, 3, 1, 2, 3, 1],
];

pub const COLOUR_NAMES: [&str; 7] = ["wa", "nt", "sa", "qld", "nsw", "act", "vic"];

/// Adjacent pairs that must differ, as indices into `COLOUR_NAMES`.
pub const BORDERS: [(usize, usize); 10] = [
    (0, 1),
    (0, 2),
    (1, 2),
    (1, 3),
    (2, 3),
    (2, 4),
    (5, 4),
    (2, 6),
    (3, 4),
    (4, 6),
];

/// Colourings of 7 regions in 3 colours that respect `BORDERS`, by
/// exhaustive enumeration of all 3^7 assignments.
pub fn brute_force_colourings() -> BTreeSet<Vec<i64>> {
    let mut out = BTreeSet::new();
    for code in 0..3i64.pow(7) {
        let row: Vec<i64> = (0..7).map(|k| code / 3i64.pow(k) % 3 + 1).collect();
        if BORDERS.iter().all(|(a, b)| row[*a] != row[*b]) {
            out.insert(row);
        }
    }
    out
}

pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Ty {
    Bool,
    Int(i64, i64),
    Enum(String, Vec<String>),
}

impl Ty {
    pub fn values(&self) -> Vec<Val> {
        match self {
            Ty::Bool => vec![Val::Bool(false), Val::Bool(true)],
            Ty::Int(lo, hi) => (*lo..=*hi).map(|v| Val::Num(rat(v))).collect(),
            Ty::Enum(_, names) => (0..names.len()).map(Val::Enum).collect(),
        }
    }

    pub fn sql(&self) -> String {
        match self {
            Ty::Bool => "bool".into(),
            Ty::Int(lo, hi) => format!("{lo}..{hi}"),
            Ty::Enum(name, _) => name.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Val {
    Bool(bool),
    Num(BigRational),
    Enum(usize),
}

#[derive(Debug, Clone)]
pub enum E {
    Bool(bool),
    Num(i64),
    EnumLit(usize, usize),
    Var(usize),
    Neg(Box<E>),
    Add(Box<E>, Box<E>),
    Sub(Box<E>, Box<E>),
    Mul(Box<E>, Box<E>),
    /// Division by a non-zero integer constant.
    Div(Box<E>, i64),
    Cmp(&'static str, Box<E>, Box<E>),
    Not(Box<E>),
    And(Box<E>, Box<E>),
    Or(Box<E>, Box<E>),
    Implies(Box<E>, Box<E>),
}

#[derive(Debug, Clone)]
pub struct Relation {
    pub attrs: Vec<(String, Ty)>,
    pub predicate: E,
}

impl Relation {
    /// CREATE TYPE statements for the enums the heading uses.
    pub fn type_ddl(&self) -> Vec<String> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for (_, ty) in &self.attrs {
            if let Ty::Enum(name, values) = ty {
                if seen.insert(name.clone()) {
                    out.push(format!("CREATE TYPE {name} AS ENUM ({});", values.join(", ")));
                }
            }
        }
        out
    }

    pub fn columns(&self) -> String {
        self.attrs
            .iter()
            .map(|(n, t)| format!("{n} {}", t.sql()))
            .collect::<Vec<_>>()
            .join(", ")
    }

    pub fn where_clause(&self) -> String {
        self.sql(&self.predicate)
    }

    pub fn view_ddl(&self, name: &str) -> String {
        format!(
            "CREATE VIEW {name} AS SELECT * FROM COMPLETE({}) WHERE {};",
            self.columns(),
            self.where_clause()
        )
    }

    pub fn sql(&self, e: &E) -> String {
        match e {
            E::Bool(b) => b.to_string(),
            E::Num(n) if *n < 0 => format!("({n})"),
            E::Num(n) => n.to_string(),
            E::EnumLit(attr, i) => match &self.attrs[*attr].1 {
                Ty::Enum(_, names) => format!("'{}'", names[*i]),
                _ => unreachable!("enum literal on a non-enum attribute"),
            },
            E::Var(i) => self.attrs[*i].0.clone(),
            E::Neg(x) => format!("-({})", self.sql(x)),
            E::Add(a, b) => format!("({} + {})", self.sql(a), self.sql(b)),
            E::Sub(a, b) => format!("({} - {})", self.sql(a), self.sql(b)),
            E::Mul(a, b) => format!("({} * {})", self.sql(a), self.sql(b)),
            E::Div(a, k) => format!(
                "({} / {})",
                self.sql(a),
                if *k < 0 { format!("({k})") } else { k.to_string() }
            ),
            E::Cmp(op, a, b) => format!("({} {op} {})", self.sql(a), self.sql(b)),
            E::Not(x) => format!("(NOT {})", self.sql(x)),
            E::And(a, b) => format!("({} AND {})", self.sql(a), self.sql(b)),
            E::Or(a, b) => format!("({} OR {})", self.sql(a), self.sql(b)),
            E::Implies(a, b) => format!("({} -> {})", self.sql(a), self.sql(b)),
        }
    }

    pub fn domain_product(&self) -> usize {
        self.attrs.iter().map(|(_, t)| t.values().len()).product()
    }

    /// Every assignment of the heading, in no particular order.
    pub fn assignments(&self) -> Vec<Vec<Val>> {
        let mut rows = vec![Vec::new()];
        for (_, ty) in &self.attrs {
            let mut next = Vec::new();
            for r in &rows {
                for v in ty.values() {
                    let mut r = r.clone();
                    r.push(v);
                    next.push(r);
                }
            }
            rows = next;
        }
        rows
    }

    /// Tuples satisfying the predicate, rendered as text.
    pub fn brute_force(&self) -> BTreeSet<Vec<String>> {
        self.assignments()
            .into_iter()
            .filter(|row| eval(&self.predicate, row) == Some(Val::Bool(true)))
            .map(|row| self.render_row(&row))
            .collect()
    }

    pub fn render_row(&self, row: &[Val]) -> Vec<String> {
        row.iter()
            .zip(&self.attrs)
            .map(|(v, (_, ty))| render_val(v, ty))
            .collect()
    }
}

pub fn render_val(v: &Val, ty: &Ty) -> String {
    match (v, ty) {
        (Val::Bool(b), _) => b.to_string(),
        (Val::Num(r), _) if r.is_integer() => r.to_integer().to_string(),
        (Val::Num(r), _) => format!("{}/{}", r.numer(), r.denom()),
        (Val::Enum(i), Ty::Enum(_, names)) => names[*i].clone(),
        (Val::Enum(i), _) => i.to_string(),
    }
}

/// Exact evaluation; `None` on a type error.
pub fn eval(e: &E, row: &[Val]) -> Option<Val> {
    let num = |x: &E| match eval(x, row)? {
        Val::Num(r) => Some(r),
        _ => None,
    };
    let boolean = |x: &E| match eval(x, row)? {
        Val::Bool(b) => Some(b),
        _ => None,
    };
    Some(match e {
        E::Bool(b) => Val::Bool(*b),
        E::Num(n) => Val::Num(rat(*n)),
        E::EnumLit(_, i) => Val::Enum(*i),
        E::Var(i) => row[*i].clone(),
        E::Neg(x) => Val::Num(-num(x)?),
        E::Add(a, b) => Val::Num(num(a)? + num(b)?),
        E::Sub(a, b) => Val::Num(num(a)? - num(b)?),
        E::Mul(a, b) => Val::Num(num(a)? * num(b)?),
        E::Div(a, k) => Val::Num(num(a)? / rat(*k)),
        E::Cmp(op, a, b) => {
            let (x, y) = (eval(a, row)?, eval(b, row)?);
            Val::Bool(match *op {
                "=" => x == y,
                "<>" => x != y,
                "<" => x < y,
                "<=" => x <= y,
                ">" => x > y,
                ">=" => x >= y,
                _ => return None,
            })
        }
        E::Not(x) => Val::Bool(!boolean(x)?),
        E::And(a, b) => Val::Bool(boolean(a)? & boolean(b)?),
        E::Or(a, b) => Val::Bool(boolean(a)? | boolean(b)?),
        E::Implies(a, b) => Val::Bool(!boolean(a)? | boolean(b)?),
    })
}

const ENUM_WORDS: [&str; 6] = ["red", "green", "blue", "cyan", "pink", "gold"];

pub struct Generator {
    pub rng: ChaCha8Rng,
}

impl Generator {
    pub fn new(seed: u64) -> Self {
        Generator {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// A heading of 1 to 4 attributes with domains of at most 5 values.
    /// Attribute names start with `prefix`.
    pub fn heading(&mut self, prefix: &str, type_name: &str) -> Vec<(String, Ty)> {
        let n = self.rng.gen_range(1..=4);
        let enum_ty = {
            let k = self.rng.gen_range(2..=5);
            let mut words = ENUM_WORDS.to_vec();
            words.shuffle(&mut self.rng);
            Ty::Enum(
                type_name.to_string(),
                words[..k].iter().map(|w| w.to_string()).collect(),
            )
        };
        (0..n)
            .map(|i| {
                let ty = match self.rng.gen_range(0..5) {
                    0 => Ty::Bool,
                    1 => enum_ty.clone(),
                    _ => {
                        let lo = self.rng.gen_range(-3..=3);
                        Ty::Int(lo, lo + self.rng.gen_range(0..=4))
                    }
                };
                (format!("{prefix}{i}"), ty)
            })
            .collect()
    }

    pub fn relation(&mut self, prefix: &str, type_name: &str) -> Relation {
        let attrs = self.heading(prefix, type_name);
        let predicate = self.predicate(&attrs, 3);
        Relation { attrs, predicate }
    }

    fn of<F: Fn(&Ty) -> bool>(&mut self, attrs: &[(String, Ty)], f: F) -> Option<usize> {
        let picks: Vec<usize> = (0..attrs.len()).filter(|i| f(&attrs[*i].1)).collect();
        picks.choose(&mut self.rng).copied()
    }

    pub fn predicate(&mut self, attrs: &[(String, Ty)], depth: u32) -> E {
        if depth == 0 || self.rng.gen_bool(0.35) {
            return self.atom(attrs);
        }
        let (a, b) = (self.predicate(attrs, depth - 1), self.predicate(attrs, depth - 1));
        match self.rng.gen_range(0..5) {
            0 | 1 => E::And(Box::new(a), Box::new(b)),
            2 => E::Or(Box::new(a), Box::new(b)),
            3 => E::Implies(Box::new(a), Box::new(b)),
            _ => E::Not(Box::new(a)),
        }
    }

    fn cmp_op(&mut self, equality_only: bool) -> &'static str {
        let ops: &[&'static str] = if equality_only {
            &["=", "<>"]
        } else {
            &["=", "<>", "<", "<=", ">", ">="]
        };
        ops.choose(&mut self.rng).copied().expect("non-empty")
    }

    fn term(&mut self, attrs: &[(String, Ty)]) -> E {
        let Some(x) = self.of(attrs, |t| matches!(t, Ty::Int(..))) else {
            return E::Num(self.rng.gen_range(-3..=3));
        };
        let base = E::Var(x);
        match self.rng.gen_range(0..6) {
            0 => E::Mul(Box::new(E::Num(self.rng.gen_range(-3..=3))), Box::new(base)),
            1 => E::Div(Box::new(base), *[2i64, 3, -2].choose(&mut self.rng).expect("non-empty")),
            2 => E::Neg(Box::new(base)),
            _ => base,
        }
    }

    fn arith(&mut self, attrs: &[(String, Ty)]) -> E {
        let t = self.term(attrs);
        match self.rng.gen_range(0..4) {
            0 => E::Add(Box::new(t), Box::new(self.term(attrs))),
            1 => E::Sub(Box::new(t), Box::new(self.term(attrs))),
            _ => t,
        }
    }

    pub fn atom(&mut self, attrs: &[(String, Ty)]) -> E {
        loop {
            match self.rng.gen_range(0..8) {
                0..=2 => {
                    if self.of(attrs, |t| matches!(t, Ty::Int(..))).is_none() {
                        continue;
                    }
                    let op = self.cmp_op(false);
                    let rhs = if self.rng.gen_bool(0.5) {
                        E::Num(self.rng.gen_range(-4..=6))
                    } else {
                        self.arith(attrs)
                    };
                    return E::Cmp(op, Box::new(self.arith(attrs)), Box::new(rhs));
                }
                3 => {
                    let (Some(x), Some(y)) = (
                        self.of(attrs, |t| matches!(t, Ty::Int(..))),
                        self.of(attrs, |t| matches!(t, Ty::Int(..))),
                    ) else {
                        continue;
                    };
                    let op = self.cmp_op(false);
                    let k = E::Num(self.rng.gen_range(-4..=9));
                    return E::Cmp(
                        op,
                        Box::new(E::Mul(Box::new(E::Var(x)), Box::new(E::Var(y)))),
                        Box::new(k),
                    );
                }
                4 => {
                    let Some(b) = self.of(attrs, |t| *t == Ty::Bool) else {
                        continue;
                    };
                    return match self.rng.gen_range(0..3) {
                        0 => E::Var(b),
                        1 => E::Not(Box::new(E::Var(b))),
                        _ => {
                            let other = match self.of(attrs, |t| *t == Ty::Bool) {
                                Some(c) if c != b => E::Var(c),
                                _ => E::Bool(self.rng.gen_bool(0.5)),
                            };
                            E::Cmp(self.cmp_op(true), Box::new(E::Var(b)), Box::new(other))
                        }
                    };
                }
                5 => {
                    let (Some(b), Some(_)) = (
                        self.of(attrs, |t| *t == Ty::Bool),
                        self.of(attrs, |t| matches!(t, Ty::Int(..))),
                    ) else {
                        continue;
                    };
                    let cmp = E::Cmp(
                        self.cmp_op(false),
                        Box::new(self.arith(attrs)),
                        Box::new(E::Num(self.rng.gen_range(-3..=5))),
                    );
                    return E::Cmp("=", Box::new(E::Var(b)), Box::new(cmp));
                }
                6 | 7 => {
                    let Some(e) = self.of(attrs, |t| matches!(t, Ty::Enum(..))) else {
                        continue;
                    };
                    let Ty::Enum(_, names) = &attrs[e].1 else {
                        unreachable!()
                    };
                    let n = names.len();
                    let op = self.cmp_op(true);
                    let other = self.of(attrs, |t| matches!(t, Ty::Enum(..))).filter(|o| *o != e);
                    let rhs = match other {
                        Some(o) if self.rng.gen_bool(0.4) => E::Var(o),
                        _ => E::EnumLit(e, self.rng.gen_range(0..n)),
                    };
                    return E::Cmp(op, Box::new(E::Var(e)), Box::new(rhs));
                }
                _ => unreachable!(),
            }
        }
    }

    /// A small data relation over `attrs` with up to `max_rows` rows.
    pub fn rows(&mut self, attrs: &[(String, Ty)], max_rows: usize) -> Vec<Vec<Val>> {
        let n = self.rng.gen_range(1..=max_rows);
        let mut out = BTreeSet::new();
        for _ in 0..n {
            out.insert(
                attrs
                    .iter()
                    .map(|(_, t)| t.values().choose(&mut self.rng).expect("non-empty").clone())
                    .collect::<Vec<_>>(),
            );
        }
        out.into_iter().collect()
    }
}

/// SQL literal for a value, as accepted by INSERT.
pub fn sql_val(v: &Val, ty: &Ty) -> String {
    match (v, ty) {
        (Val::Enum(i), Ty::Enum(_, names)) => names[*i].clone(),
        (Val::Num(r), _) if r.is_negative() => format!("-{}", -r),
        (Val::Num(r), _) => r.to_string(),
        (Val::Bool(b), _) => b.to_string(),
        _ => unreachable!(),
    }
}

/// Applies every statement of a script in order and returns the final
/// catalog with the results of the SELECT statements.
pub fn run_script(
    text: &str,
    budget: &sigmadb::SolveBudget,
) -> (sigmadb::Catalog, Vec<sigmadb::Result<sigmadb::RelationResult>>) {
    let mut catalog = sigmadb::Catalog::new();
    let mut results = Vec::new();
    for located in sigmadb::lang::parse_script(text).expect("script parses") {
        match sigmadb::exec::apply(&catalog, &located.statement, budget) {
            Ok((next, outcome)) => {
                if let Some(next) = next {
                    catalog = next;
                }
                if let sigmadb::StatementOutcome::Rows(r) = outcome {
                    results.push(Ok(r));
                }
            }
            Err(e) if matches!(located.statement, sigmadb::lang::ast::Statement::Select(_)) => results.push(Err(e)),
            Err(e) => panic!("statement at line {} failed: {e}", located.line),
        }
    }
    (catalog, results)
}

pub fn demo(name: &str) -> String {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../demos")
        .join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

/// Result tuples rendered as text, for comparison with the oracle.
pub fn texts(r: &sigmadb::RelationResult) -> BTreeSet<Vec<String>> {
    r.tuples
        .iter()
        .map(|t| t.values().iter().map(|v| v.to_string()).collect())
        .collect()
}
