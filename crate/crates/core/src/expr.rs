//! Resolved, type-checked predicate expressions.
//!
//! A [`PredicateExpr`] is what the planner, the solver and the executor work
//! with. Attribute references are plain names (headings never repeat a
//! name) and enum literals are already tied to their type.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

use crate::lang::ast::{BinaryOp, ColumnRef, Expr, Literal, UnaryOp};
use crate::lang::render_expr;
use crate::model::{Attribute, DomainSpec, EnumType, EnumValue, Heading, Scalar, Tuple};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PredicateExpr {
    Const(Scalar),
    Attr(String),
    Neg(Box<PredicateExpr>),
    Not(Box<PredicateExpr>),
    Binary(BinaryOp, Box<PredicateExpr>, Box<PredicateExpr>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValueType {
    Bool,
    Int,
    Rat,
    Enum(Arc<EnumType>),
}

impl ValueType {
    pub fn of_domain(d: &DomainSpec) -> ValueType {
        match d {
            DomainSpec::Bool => ValueType::Bool,
            DomainSpec::Int { .. } => ValueType::Int,
            DomainSpec::Rat => ValueType::Rat,
            DomainSpec::Enum(t) => ValueType::Enum(t.clone()),
        }
    }

    pub fn of_scalar(s: &Scalar) -> ValueType {
        match s {
            Scalar::Bool(_) => ValueType::Bool,
            Scalar::Int(_) => ValueType::Int,
            Scalar::Rat(_) => ValueType::Rat,
            Scalar::Enum(e) => ValueType::Enum(e.enum_type().clone()),
        }
    }

    pub fn is_numeric(&self) -> bool {
        matches!(self, ValueType::Int | ValueType::Rat)
    }
}

impl fmt::Display for ValueType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValueType::Bool => f.write_str("bool"),
            ValueType::Int => f.write_str("int"),
            ValueType::Rat => f.write_str("float"),
            ValueType::Enum(t) => f.write_str(t.name()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BindError {
    #[error("type error: {0}")]
    TypeError(String),
    #[error("unknown attribute {0}")]
    UnknownAttribute(String),
    #[error("attribute {0} is ambiguous")]
    AmbiguousAttribute(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("attribute {0} has no value")]
    Unbound(String),
    #[error("type mismatch: {0}")]
    TypeMismatch(String),
}

/// Source of attribute values during evaluation.
pub trait Bindings {
    fn value(&self, name: &str) -> Option<&Scalar>;
}

/// A tuple read through its heading.
pub struct Row<'a> {
    pub heading: &'a Heading,
    pub tuple: &'a Tuple,
}

impl Bindings for Row<'_> {
    fn value(&self, name: &str) -> Option<&Scalar> {
        self.tuple.get(self.heading.index_of(name)?)
    }
}

impl Bindings for HashMap<String, Scalar> {
    fn value(&self, name: &str) -> Option<&Scalar> {
        self.get(name)
    }
}

impl PredicateExpr {
    pub fn truth(b: bool) -> Self {
        PredicateExpr::Const(Scalar::Bool(b))
    }

    pub fn attr(name: impl Into<String>) -> Self {
        PredicateExpr::Attr(name.into())
    }

    pub fn int(v: i64) -> Self {
        PredicateExpr::Const(Scalar::int(v))
    }

    pub fn binary(op: BinaryOp, l: PredicateExpr, r: PredicateExpr) -> Self {
        PredicateExpr::Binary(op, Box::new(l), Box::new(r))
    }

    pub fn eq(l: PredicateExpr, r: PredicateExpr) -> Self {
        Self::binary(BinaryOp::Eq, l, r)
    }

    pub fn and(l: PredicateExpr, r: PredicateExpr) -> Self {
        Self::binary(BinaryOp::And, l, r)
    }

    pub fn negation(e: PredicateExpr) -> Self {
        PredicateExpr::Not(Box::new(e))
    }

    pub fn is_true(&self) -> bool {
        matches!(self, PredicateExpr::Const(Scalar::Bool(true)))
    }

    /// Attribute names mentioned anywhere in the expression.
    pub fn attrs(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        self.collect_attrs(&mut out);
        out
    }

    fn collect_attrs<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        match self {
            PredicateExpr::Const(_) => {}
            PredicateExpr::Attr(a) => {
                out.insert(a);
            }
            PredicateExpr::Neg(e) | PredicateExpr::Not(e) => e.collect_attrs(out),
            PredicateExpr::Binary(_, l, r) => {
                l.collect_attrs(out);
                r.collect_attrs(out);
            }
        }
    }

    /// Top-level AND operands, flattened.
    pub fn conjuncts(&self) -> Vec<&PredicateExpr> {
        let mut out = Vec::new();
        fn walk<'a>(e: &'a PredicateExpr, out: &mut Vec<&'a PredicateExpr>) {
            match e {
                PredicateExpr::Binary(BinaryOp::And, l, r) => {
                    walk(l, out);
                    walk(r, out);
                }
                other => out.push(other),
            }
        }
        walk(self, &mut out);
        out
    }

    /// Left-deep conjunction; the empty conjunction is `true`.
    pub fn and_all(conjuncts: impl IntoIterator<Item = PredicateExpr>) -> PredicateExpr {
        conjuncts
            .into_iter()
            .reduce(PredicateExpr::and)
            .unwrap_or_else(|| PredicateExpr::truth(true))
    }

    pub fn infer_type(&self, heading: &Heading) -> Result<ValueType, BindError> {
        match self {
            PredicateExpr::Const(s) => Ok(ValueType::of_scalar(s)),
            PredicateExpr::Attr(a) => heading
                .get(a)
                .map(|a| ValueType::of_domain(&a.domain))
                .ok_or_else(|| BindError::UnknownAttribute(a.clone())),
            PredicateExpr::Neg(e) => {
                let t = e.infer_type(heading)?;
                if t.is_numeric() {
                    Ok(t)
                } else {
                    Err(BindError::TypeError(format!("cannot negate {t}")))
                }
            }
            PredicateExpr::Not(e) => match e.infer_type(heading)? {
                ValueType::Bool => Ok(ValueType::Bool),
                t => Err(BindError::TypeError(format!("NOT needs bool, found {t}"))),
            },
            PredicateExpr::Binary(op, l, r) => combine_types(*op, &l.infer_type(heading)?, &r.infer_type(heading)?),
        }
    }

    pub fn eval(&self, env: &dyn Bindings) -> Result<Scalar, EvalError> {
        match self {
            PredicateExpr::Const(s) => Ok(s.clone()),
            PredicateExpr::Attr(a) => env.value(a).cloned().ok_or_else(|| EvalError::Unbound(a.clone())),
            PredicateExpr::Neg(e) => match e.eval(env)? {
                Scalar::Int(i) => Ok(Scalar::Int(-i)),
                Scalar::Rat(r) => Ok(Scalar::Rat(-r)),
                other => Err(EvalError::TypeMismatch(format!("cannot negate {other}"))),
            },
            PredicateExpr::Not(e) => Ok(Scalar::Bool(!eval_bool(e, env)?)),
            PredicateExpr::Binary(op, l, r) => match op {
                BinaryOp::And => Ok(Scalar::Bool(eval_bool(l, env)? && eval_bool(r, env)?)),
                BinaryOp::Or => Ok(Scalar::Bool(eval_bool(l, env)? || eval_bool(r, env)?)),
                BinaryOp::Implies => Ok(Scalar::Bool(!eval_bool(l, env)? || eval_bool(r, env)?)),
                _ => apply_binary(*op, &l.eval(env)?, &r.eval(env)?),
            },
        }
    }

    /// Evaluates to a truth value; evaluation errors count as false.
    pub fn holds(&self, env: &dyn Bindings) -> bool {
        matches!(self.eval(env), Ok(Scalar::Bool(true)))
    }

    /// Replaces known attributes by constants and folds constant subtrees.
    /// Subtrees whose evaluation fails are kept unfolded.
    pub fn substitute(&self, env: &dyn Bindings) -> PredicateExpr {
        match self {
            PredicateExpr::Const(_) => self.clone(),
            PredicateExpr::Attr(a) => match env.value(a) {
                Some(v) => PredicateExpr::Const(v.clone()),
                None => self.clone(),
            },
            PredicateExpr::Neg(e) => fold(PredicateExpr::Neg(Box::new(e.substitute(env)))),
            PredicateExpr::Not(e) => fold(PredicateExpr::Not(Box::new(e.substitute(env)))),
            PredicateExpr::Binary(op, l, r) => {
                let (l, r) = (l.substitute(env), r.substitute(env));
                let b = |e: &PredicateExpr| match e {
                    PredicateExpr::Const(Scalar::Bool(v)) => Some(*v),
                    _ => None,
                };
                match (op, b(&l), b(&r)) {
                    (BinaryOp::And, Some(false), _) | (BinaryOp::And, _, Some(false)) => PredicateExpr::truth(false),
                    (BinaryOp::And, Some(true), _) => r,
                    (BinaryOp::And, _, Some(true)) => l,
                    (BinaryOp::Or, Some(true), _) | (BinaryOp::Or, _, Some(true)) => PredicateExpr::truth(true),
                    (BinaryOp::Or, Some(false), _) => r,
                    (BinaryOp::Or, _, Some(false)) => l,
                    (BinaryOp::Implies, Some(false), _) | (BinaryOp::Implies, _, Some(true)) => {
                        PredicateExpr::truth(true)
                    }
                    (BinaryOp::Implies, Some(true), _) => r,
                    _ => fold(PredicateExpr::binary(*op, l, r)),
                }
            }
        }
    }

    /// Surface syntax tree, for rendering.
    pub fn to_ast(&self) -> Expr {
        match self {
            PredicateExpr::Const(s) => Expr::Literal(match s {
                Scalar::Bool(b) => Literal::Bool(*b),
                Scalar::Int(i) => Literal::Number(BigRational::from_integer(i.clone())),
                Scalar::Rat(r) => Literal::Number(r.clone()),
                Scalar::Enum(e) => Literal::Str(e.name().to_string()),
            }),
            PredicateExpr::Attr(a) => Expr::Column(ColumnRef::bare(a.clone())),
            PredicateExpr::Neg(e) => Expr::unary(UnaryOp::Neg, e.to_ast()),
            PredicateExpr::Not(e) => Expr::unary(UnaryOp::Not, e.to_ast()),
            PredicateExpr::Binary(op, l, r) => Expr::binary(*op, l.to_ast(), r.to_ast()),
        }
    }
}

impl fmt::Display for PredicateExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_expr(&self.to_ast()))
    }
}

fn fold(e: PredicateExpr) -> PredicateExpr {
    let constant = match &e {
        PredicateExpr::Neg(x) | PredicateExpr::Not(x) => matches!(**x, PredicateExpr::Const(_)),
        PredicateExpr::Binary(_, l, r) => {
            matches!(**l, PredicateExpr::Const(_)) && matches!(**r, PredicateExpr::Const(_))
        }
        _ => false,
    };
    if constant {
        let empty: HashMap<String, Scalar> = HashMap::new();
        if let Ok(v) = e.eval(&empty) {
            return PredicateExpr::Const(v);
        }
    }
    e
}

fn eval_bool(e: &PredicateExpr, env: &dyn Bindings) -> Result<bool, EvalError> {
    match e.eval(env)? {
        Scalar::Bool(b) => Ok(b),
        other => Err(EvalError::TypeMismatch(format!("expected bool, found {other}"))),
    }
}

fn apply_binary(op: BinaryOp, l: &Scalar, r: &Scalar) -> Result<Scalar, EvalError> {
    if op.is_arithmetic() {
        if let (Scalar::Int(a), Scalar::Int(b)) = (l, r) {
            match op {
                BinaryOp::Add => return Ok(Scalar::Int(a + b)),
                BinaryOp::Sub => return Ok(Scalar::Int(a - b)),
                BinaryOp::Mul => return Ok(Scalar::Int(a * b)),
                _ => {}
            }
        }
        let (a, b) = numeric_pair(l, r)?;
        return Ok(Scalar::Rat(match op {
            BinaryOp::Add => a + b,
            BinaryOp::Sub => a - b,
            BinaryOp::Mul => a * b,
            _ => {
                if b.is_zero() {
                    return Err(EvalError::DivisionByZero);
                }
                a / b
            }
        }));
    }
    let ord = match (l, r) {
        (Scalar::Bool(a), Scalar::Bool(b)) => a.cmp(b),
        (Scalar::Enum(a), Scalar::Enum(b)) if a.enum_type() == b.enum_type() => a.cmp(b),
        _ => {
            let (a, b) = numeric_pair(l, r)?;
            a.cmp(&b)
        }
    };
    use std::cmp::Ordering::*;
    Ok(Scalar::Bool(match op {
        BinaryOp::Eq => ord == Equal,
        BinaryOp::Ne => ord != Equal,
        BinaryOp::Lt => ord == Less,
        BinaryOp::Le => ord != Greater,
        BinaryOp::Gt => ord == Greater,
        BinaryOp::Ge => ord != Less,
        _ => unreachable!("logical operators are handled by the caller"),
    }))
}

fn numeric_pair(l: &Scalar, r: &Scalar) -> Result<(BigRational, BigRational), EvalError> {
    match (l.as_rational(), r.as_rational()) {
        (Some(a), Some(b)) => Ok((a, b)),
        _ => Err(EvalError::TypeMismatch(format!("{l} and {r} are not both numeric"))),
    }
}

fn combine_types(op: BinaryOp, l: &ValueType, r: &ValueType) -> Result<ValueType, BindError> {
    let mismatch = || BindError::TypeError(format!("operator {} cannot combine {l} and {r}", op.symbol()));
    if op.is_arithmetic() {
        if !l.is_numeric() || !r.is_numeric() {
            return Err(mismatch());
        }
        return Ok(match (op, l, r) {
            (BinaryOp::Div, _, _) => ValueType::Rat,
            (_, ValueType::Int, ValueType::Int) => ValueType::Int,
            _ => ValueType::Rat,
        });
    }
    if op.is_logical() {
        return match (l, r) {
            (ValueType::Bool, ValueType::Bool) => Ok(ValueType::Bool),
            _ => Err(mismatch()),
        };
    }
    let equality = matches!(op, BinaryOp::Eq | BinaryOp::Ne);
    match (l, r) {
        (a, b) if a.is_numeric() && b.is_numeric() => Ok(ValueType::Bool),
        (ValueType::Bool, ValueType::Bool) if equality => Ok(ValueType::Bool),
        (ValueType::Enum(a), ValueType::Enum(b)) if equality && a == b => Ok(ValueType::Bool),
        _ => Err(mismatch()),
    }
}

/// One visible column while binding: the attribute plus the name of the
/// relation it came from, if any (inline `COMPLETE` sources have none).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScopeColumn {
    pub source: Option<String>,
    pub attr: Attribute,
}

/// Columns visible to an expression, in output order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Scope {
    columns: Vec<ScopeColumn>,
}

impl Scope {
    pub fn new(source: Option<&str>, heading: &Heading) -> Self {
        Scope {
            columns: heading
                .attrs()
                .iter()
                .map(|a| ScopeColumn {
                    source: source.map(str::to_string),
                    attr: a.clone(),
                })
                .collect(),
        }
    }

    pub fn columns(&self) -> &[ScopeColumn] {
        &self.columns
    }

    pub fn requalified(&self, source: &str) -> Scope {
        Scope::new(
            Some(source),
            &Heading::new(self.columns.iter().map(|c| c.attr.clone()).collect()).expect("scope names are unique"),
        )
    }

    pub fn joined(&self, other: &Scope) -> Scope {
        let mut columns = self.columns.clone();
        columns.extend(other.columns.iter().cloned());
        Scope { columns }
    }

    pub fn heading(&self) -> Result<Heading, crate::model::ModelError> {
        Heading::new(self.columns.iter().map(|c| c.attr.clone()).collect())
    }

    pub fn resolve(&self, col: &ColumnRef) -> Result<&Attribute, BindError> {
        let mut hits = self.columns.iter().filter(|c| {
            c.attr.name == col.name
                && match &col.qualifier {
                    Some(q) => c.source.as_deref() == Some(q.as_str()),
                    None => true,
                }
        });
        let display = || match &col.qualifier {
            Some(q) => format!("{q}.{}", col.name),
            None => col.name.clone(),
        };
        match (hits.next(), hits.next()) {
            (Some(c), None) => Ok(&c.attr),
            (Some(_), Some(_)) => Err(BindError::AmbiguousAttribute(display())),
            (None, _) => Err(BindError::UnknownAttribute(display())),
        }
    }

    /// Binds a predicate, which must be boolean.
    pub fn bind_predicate(&self, e: &Expr) -> Result<PredicateExpr, BindError> {
        let (p, t) = self.bind(e, Some(&ValueType::Bool))?;
        if t != ValueType::Bool {
            return Err(BindError::TypeError(format!("predicate has type {t}, expected bool")));
        }
        Ok(p)
    }

    /// Binds a surface expression. `expected` lets bare identifiers and
    /// quoted strings resolve as enum literals.
    pub fn bind(&self, e: &Expr, expected: Option<&ValueType>) -> Result<(PredicateExpr, ValueType), BindError> {
        match e {
            Expr::Literal(Literal::Bool(b)) => Ok((PredicateExpr::truth(*b), ValueType::Bool)),
            Expr::Literal(Literal::Number(r)) => {
                if r.is_integer() {
                    Ok((PredicateExpr::Const(Scalar::Int(r.to_integer())), ValueType::Int))
                } else {
                    Ok((PredicateExpr::Const(Scalar::Rat(r.clone())), ValueType::Rat))
                }
            }
            Expr::Literal(Literal::Str(s)) => match expected {
                Some(ValueType::Enum(ty)) => enum_literal(ty, s),
                _ => Err(BindError::TypeError(format!(
                    "'{s}' can only be used where an enum value is expected"
                ))),
            },
            Expr::Column(c) => match self.resolve(c) {
                Ok(a) => Ok((PredicateExpr::Attr(a.name.clone()), ValueType::of_domain(&a.domain))),
                Err(BindError::UnknownAttribute(n)) => match (expected, &c.qualifier) {
                    (Some(ValueType::Enum(ty)), None) if ty.index_of(&c.name).is_some() => enum_literal(ty, &c.name),
                    _ => Err(BindError::UnknownAttribute(n)),
                },
                Err(other) => Err(other),
            },
            Expr::Unary { op, operand } => {
                let (p, t) = self.bind(operand, None)?;
                let p = match op {
                    UnaryOp::Neg => PredicateExpr::Neg(Box::new(p)),
                    UnaryOp::Not => PredicateExpr::Not(Box::new(p)),
                };
                let t = match (op, &t) {
                    (UnaryOp::Neg, t) if t.is_numeric() => t.clone(),
                    (UnaryOp::Not, ValueType::Bool) => ValueType::Bool,
                    _ => {
                        return Err(BindError::TypeError(format!(
                            "{} cannot apply to {t}",
                            if *op == UnaryOp::Neg { "-" } else { "NOT" }
                        )))
                    }
                };
                Ok((p, t))
            }
            Expr::Binary { op, left, right } => {
                let (l, r) = if op.is_comparison() {
                    self.bind_operands(left, right)?
                } else {
                    (self.bind(left, None)?, self.bind(right, None)?)
                };
                let t = combine_types(*op, &l.1, &r.1)?;
                Ok((PredicateExpr::binary(*op, l.0, r.0), t))
            }
        }
    }

    /// Binds comparison operands so that either side can supply the enum
    /// type for a literal on the other.
    #[allow(clippy::type_complexity)]
    fn bind_operands(
        &self,
        left: &Expr,
        right: &Expr,
    ) -> Result<((PredicateExpr, ValueType), (PredicateExpr, ValueType)), BindError> {
        match self.bind(left, None) {
            Ok(l) => {
                let r = self.bind(right, Some(&l.1))?;
                Ok((l, r))
            }
            Err(e) if is_enum_candidate(left) => {
                let r = self.bind(right, None).map_err(|_| e.clone())?;
                let l = self.bind(left, Some(&r.1))?;
                Ok((l, r))
            }
            Err(e) => Err(e),
        }
    }
}

fn is_enum_candidate(e: &Expr) -> bool {
    matches!(
        e,
        Expr::Literal(Literal::Str(_)) | Expr::Column(ColumnRef { qualifier: None, .. })
    )
}

fn enum_literal(ty: &Arc<EnumType>, name: &str) -> Result<(PredicateExpr, ValueType), BindError> {
    let v = EnumValue::named(ty, name)
        .ok_or_else(|| BindError::TypeError(format!("{name} is not a value of enum {}", ty.name())))?;
    Ok((PredicateExpr::Const(Scalar::Enum(v)), ValueType::Enum(ty.clone())))
}

/// Truth value of a rational comparison, used by callers that already
/// hold numbers.
pub fn compare_rationals(op: BinaryOp, a: &BigRational, b: &BigRational) -> bool {
    match op {
        BinaryOp::Eq => a == b,
        BinaryOp::Ne => a != b,
        BinaryOp::Lt => a < b,
        BinaryOp::Le => a <= b,
        BinaryOp::Gt => a > b,
        BinaryOp::Ge => a >= b,
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse_expr;
    use crate::model::DomainSpec;

    fn gst_heading() -> Heading {
        Heading::new(vec![
            Attribute::new("Price", DomainSpec::Rat),
            Attribute::new("ExGSTAmount", DomainSpec::Rat),
            Attribute::new("GSTAmount", DomainSpec::Rat),
        ])
        .unwrap()
    }

    fn bind(h: &Heading, text: &str) -> Result<PredicateExpr, BindError> {
        Scope::new(None, h).bind_predicate(&parse_expr(text).unwrap())
    }

    #[test]
    fn gst_rule_holds_on_a_known_row() {
        let h = gst_heading();
        let p = bind(&h, "Price/11 = GSTAmount AND ExGSTAmount = Price - GSTAmount").unwrap();
        let t = Tuple::new(vec![Scalar::rat(110, 1), Scalar::rat(100, 1), Scalar::rat(10, 1)]);
        assert_eq!(p.eval(&Row { heading: &h, tuple: &t }), Ok(Scalar::Bool(true)));
    }

    #[test]
    fn logic_and_division_by_zero() {
        let h = gst_heading();
        let p = bind(&h, "true AND false").unwrap();
        let t = Tuple::new(vec![Scalar::rat(1, 1), Scalar::rat(0, 1), Scalar::rat(0, 1)]);
        let row = Row { heading: &h, tuple: &t };
        assert_eq!(p.eval(&row), Ok(Scalar::Bool(false)));
        let p = bind(&h, "Price / GSTAmount = 1").unwrap();
        assert_eq!(p.eval(&row), Err(EvalError::DivisionByZero));
        assert!(!p.holds(&row));
    }

    #[test]
    fn type_errors() {
        let h = Heading::new(vec![
            Attribute::new("b", DomainSpec::Bool),
            Attribute::new("x", DomainSpec::int(0, 9).unwrap()),
        ])
        .unwrap();
        assert!(matches!(bind(&h, "b + 1 = 2"), Err(BindError::TypeError(_))));
        assert!(matches!(bind(&h, "x AND b"), Err(BindError::TypeError(_))));
        assert!(matches!(bind(&h, "b < true"), Err(BindError::TypeError(_))));
        assert!(matches!(bind(&h, "x + 1"), Err(BindError::TypeError(_))));
        assert!(matches!(bind(&h, "y = 1"), Err(BindError::UnknownAttribute(_))));
        assert!(bind(&h, "b = (x > 3)").is_ok());
    }

    #[test]
    fn enum_literals_resolve_against_the_other_side() {
        let ty = Arc::new(EnumType::new("loc", vec!["nsw".into(), "vic".into()]).unwrap());
        let h = Heading::new(vec![Attribute::new("where", DomainSpec::Enum(ty.clone()))]).unwrap();
        for text in ["\"where\" = vic", "vic = \"where\"", "\"where\" <> 'nsw'"] {
            let p = bind(&h, text).unwrap();
            assert!(p.attrs().contains("where"), "{text}");
        }
        assert!(matches!(
            bind(&h, "\"where\" = qld"),
            Err(BindError::UnknownAttribute(_))
        ));
        assert!(matches!(bind(&h, "\"where\" = 'qld'"), Err(BindError::TypeError(_))));
        assert!(matches!(bind(&h, "\"where\" < vic"), Err(BindError::TypeError(_))));
    }

    #[test]
    fn substitution_folds_constants() {
        let h = gst_heading();
        let p = bind(&h, "GSTAmount = Price / 11").unwrap();
        let env: HashMap<String, Scalar> = [("Price".to_string(), Scalar::rat(110, 1))].into();
        assert_eq!(
            p.substitute(&env),
            PredicateExpr::eq(
                PredicateExpr::attr("GSTAmount"),
                PredicateExpr::Const(Scalar::rat(10, 1))
            )
        );
    }

    #[test]
    fn qualified_and_ambiguous_references() {
        let a = Heading::new(vec![Attribute::new("p", DomainSpec::Rat)]).unwrap();
        let scope = Scope::new(Some("l"), &a).joined(&Scope::new(Some("r"), &a));
        assert!(scope.resolve(&ColumnRef::qualified("l", "p")).is_ok());
        assert!(matches!(
            scope.resolve(&ColumnRef::bare("p")),
            Err(BindError::AmbiguousAttribute(_))
        ));
    }
}
