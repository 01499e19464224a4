use std::fmt::Write;

use num_rational::BigRational;

use super::ast::*;
use super::lexer::keyword;
use crate::model::format_rational;

/// Canonical text for a statement, terminated by `;`.
pub fn render_statement(stmt: &Statement) -> String {
    let mut out = String::new();
    match stmt {
        Statement::CreateTable { name, columns } => {
            write!(out, "CREATE TABLE {} ({})", ident(name), column_defs(columns)).unwrap();
        }
        Statement::CreateEnum { name, values } => {
            let vals: Vec<_> = values.iter().map(|v| quote_str(v)).collect();
            write!(out, "CREATE TYPE {} AS ENUM ({})", ident(name), vals.join(", ")).unwrap();
        }
        Statement::Insert { table, rows } => {
            let rows: Vec<_> = rows
                .iter()
                .map(|r| {
                    let vals: Vec<_> = r.iter().map(value_literal).collect();
                    format!("({})", vals.join(", "))
                })
                .collect();
            write!(out, "INSERT INTO {} VALUES {}", ident(table), rows.join(", ")).unwrap();
        }
        Statement::CreateView { name, query } => {
            write!(out, "CREATE VIEW {} AS {}", ident(name), render_query(query)).unwrap();
        }
        Statement::Select(q) => out.push_str(&render_query(q)),
    }
    out.push(';');
    out
}

pub fn render_query(q: &SelectQuery) -> String {
    let mut out = String::from("SELECT ");
    match &q.projection {
        Projection::All => out.push('*'),
        Projection::Columns(cols) => {
            let cols: Vec<_> = cols.iter().map(column_ref).collect();
            out.push_str(&cols.join(", "));
        }
    }
    out.push_str(" FROM ");
    out.push_str(&source(&q.from));
    for j in &q.joins {
        write!(out, " JOIN {} ON {}", source(&j.source), render_expr(&j.on)).unwrap();
    }
    if let Some(f) = &q.filter {
        write!(out, " WHERE {}", render_expr(f)).unwrap();
    }
    if let Some(n) = q.limit {
        write!(out, " LIMIT {n}").unwrap();
    }
    out
}

fn source(s: &Source) -> String {
    match s {
        Source::Named(n) => ident(n),
        Source::Complete(cols) => format!("COMPLETE({})", column_defs(cols)),
    }
}

fn column_defs(cols: &[ColumnDef]) -> String {
    cols.iter()
        .map(|c| format!("{} {}", ident(&c.name), type_name(&c.ty)))
        .collect::<Vec<_>>()
        .join(", ")
}

pub fn type_name(t: &TypeName) -> String {
    match t {
        TypeName::Bool => "bool".into(),
        TypeName::Int => "int".into(),
        TypeName::Float => "float".into(),
        TypeName::Range { lo, hi } => format!("{lo}..{hi}"),
        TypeName::Named(n) => ident(n),
    }
}

fn column_ref(c: &ColumnRef) -> String {
    match &c.qualifier {
        Some(q) => format!("{}.{}", ident(q), ident(&c.name)),
        None => ident(&c.name),
    }
}

/// Identifier text, double-quoted when it is not a plain non-keyword word.
pub fn ident(name: &str) -> String {
    let plain = name.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
        && keyword(name).is_none();
    if plain {
        name.to_string()
    } else {
        format!("\"{}\"", name.replace('"', "\"\""))
    }
}

fn quote_str(s: &str) -> String {
    format!("'{}'", s.replace('\'', "''"))
}

fn is_decimal(r: &BigRational) -> bool {
    !format_rational(r).contains('/')
}

fn value_literal(l: &Literal) -> String {
    match l {
        Literal::Bool(b) => b.to_string(),
        Literal::Number(r) => format_rational(r),
        Literal::Str(s) => quote_str(s),
    }
}

pub fn render_expr(e: &Expr) -> String {
    let mut out = String::new();
    write_expr(&mut out, e);
    out
}

fn write_child(out: &mut String, e: &Expr, parens: bool) {
    if parens {
        out.push('(');
        write_expr(out, e);
        out.push(')');
    } else {
        write_expr(out, e);
    }
}

fn write_expr(out: &mut String, e: &Expr) {
    match e {
        Expr::Literal(Literal::Number(r)) if !is_decimal(r) => {
            // Only reachable for hand-built trees; the parser never yields these.
            write!(out, "({} / {})", r.numer(), r.denom()).unwrap();
        }
        Expr::Literal(l) => out.push_str(&value_literal(l)),
        Expr::Column(c) => out.push_str(&column_ref(c)),
        Expr::Unary {
            op: UnaryOp::Not,
            operand,
        } => {
            out.push_str("NOT ");
            write_child(out, operand, operand.precedence() < NOT_PRECEDENCE);
        }
        Expr::Unary {
            op: UnaryOp::Neg,
            operand,
        } => {
            out.push('-');
            let needs = operand.precedence() < NEG_PRECEDENCE
                || matches!(operand.as_ref(), Expr::Literal(Literal::Number(_)))
                || matches!(operand.as_ref(), Expr::Unary { op: UnaryOp::Neg, .. });
            write_child(out, operand, needs);
        }
        Expr::Binary { op, left, right } => {
            let p = op.precedence();
            let (lp, rp) = (left.precedence(), right.precedence());
            let (left_parens, right_parens) = if op.is_comparison() {
                (lp <= p, rp <= p)
            } else if *op == BinaryOp::Implies {
                (lp <= p, rp < p)
            } else {
                (lp < p, rp <= p)
            };
            write_child(out, left, left_parens);
            write!(out, " {} ", op.symbol()).unwrap();
            write_child(out, right, right_parens);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::parser::{parse_expr, parse_statement};
    use super::*;

    #[test]
    fn gst_view_round_trips() {
        let text = "CREATE VIEW Australian_GST AS SELECT * FROM COMPLETE(Price float, ExGSTAmount float, GSTAmount float) WHERE GSTAmount = Price / 11 AND ExGSTAmount = Price - GSTAmount;";
        let s = parse_statement(text).unwrap();
        assert_eq!(render_statement(&s), text);
        assert_eq!(parse_statement(&render_statement(&s)).unwrap(), s);
    }

    #[test]
    fn nullary_select_round_trips() {
        let s = parse_statement("select * from t").unwrap();
        assert_eq!(render_statement(&s), "SELECT * FROM t;");
        assert_eq!(parse_statement(&render_statement(&s)).unwrap(), s);
    }

    #[test]
    fn parentheses_only_where_needed() {
        for (input, canonical) in [
            ("(a OR b) AND c", "(a OR b) AND c"),
            ("a OR (b AND c)", "a OR b AND c"),
            ("(a - b) - c", "a - b - c"),
            ("a - (b - c)", "a - (b - c)"),
            ("(a -> b) -> c", "(a -> b) -> c"),
            ("a -> (b -> c)", "a -> b -> c"),
            ("NOT (x = 1)", "NOT (x = 1)"),
            ("-(x * 2)", "-(x * 2)"),
            ("x * -3", "x * -3"),
            ("-(-x)", "-(-x)"),
            ("(a = b) = c", "(a = b) = c"),
        ] {
            let e = parse_expr(input).unwrap();
            assert_eq!(render_expr(&e), canonical, "{input}");
            assert_eq!(parse_expr(&render_expr(&e)).unwrap(), e, "{input}");
        }
    }

    #[test]
    fn keyword_identifiers_are_quoted() {
        assert_eq!(ident("select"), "\"select\"");
        assert_eq!(ident("Price"), "Price");
        assert_eq!(ident("two words"), "\"two words\"");
    }
}
