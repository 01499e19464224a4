use num_rational::BigRational;
use num_traits::Zero;

use super::ast::*;
use super::lexer::{tokenize, Keyword, Token, TokenKind};
use super::SyntaxError;
use crate::model::parse_rational;

/// A statement together with the position where it starts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Located {
    pub statement: Statement,
    pub line: usize,
    pub column: usize,
}

/// Parses exactly one statement; the trailing `;` is optional.
pub fn parse_statement(text: &str) -> Result<Statement, SyntaxError> {
    let mut p = Parser::new(text)?;
    let stmt = p.statement()?;
    p.eat(&TokenKind::Semicolon);
    p.expect_eof()?;
    Ok(stmt)
}

/// Parses a `;`-separated sequence of statements.
pub fn parse_script(text: &str) -> Result<Vec<Located>, SyntaxError> {
    let mut p = Parser::new(text)?;
    let mut out = Vec::new();
    loop {
        while p.eat(&TokenKind::Semicolon) {}
        if p.at(&TokenKind::Eof) {
            break;
        }
        let (line, column) = (p.peek().line, p.peek().column);
        let statement = p.statement()?;
        out.push(Located {
            statement,
            line,
            column,
        });
        if !p.eat(&TokenKind::Semicolon) {
            p.expect_eof()?;
        }
    }
    Ok(out)
}

/// Parses a standalone predicate expression.
pub fn parse_expr(text: &str) -> Result<Expr, SyntaxError> {
    let mut p = Parser::new(text)?;
    let e = p.expr()?;
    p.expect_eof()?;
    Ok(e)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn new(text: &str) -> Result<Self, SyntaxError> {
        Ok(Parser {
            tokens: tokenize(text)?,
            pos: 0,
        })
    }

    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn peek_at(&self, offset: usize) -> &TokenKind {
        let i = (self.pos + offset).min(self.tokens.len() - 1);
        &self.tokens[i].kind
    }

    fn at(&self, kind: &TokenKind) -> bool {
        &self.peek().kind == kind
    }

    fn advance(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.at(kind) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn eat_kw(&mut self, kw: Keyword) -> bool {
        self.eat(&TokenKind::Keyword(kw))
    }

    fn error_here(&self, expected: &str) -> SyntaxError {
        let t = self.peek();
        SyntaxError {
            line: t.line,
            column: t.column,
            message: format!("expected {expected}, found {}", t.kind.describe()),
        }
    }

    fn expect(&mut self, kind: &TokenKind, what: &str) -> Result<(), SyntaxError> {
        if self.eat(kind) {
            Ok(())
        } else {
            Err(self.error_here(what))
        }
    }

    fn expect_kw(&mut self, kw: Keyword) -> Result<(), SyntaxError> {
        if self.eat_kw(kw) {
            Ok(())
        } else {
            Err(self.error_here(&format!("{kw:?}").to_uppercase()))
        }
    }

    fn expect_eof(&self) -> Result<(), SyntaxError> {
        if self.at(&TokenKind::Eof) {
            Ok(())
        } else {
            Err(self.error_here("end of statement"))
        }
    }

    fn ident(&mut self) -> Result<String, SyntaxError> {
        match &self.peek().kind {
            TokenKind::Ident(s) => {
                let s = s.clone();
                self.advance();
                Ok(s)
            }
            _ => Err(self.error_here("identifier")),
        }
    }

    fn statement(&mut self) -> Result<Statement, SyntaxError> {
        if self.eat_kw(Keyword::Select) {
            return Ok(Statement::Select(self.select_body()?));
        }
        if self.eat_kw(Keyword::Insert) {
            return self.insert_body();
        }
        if self.eat_kw(Keyword::Create) {
            if self.eat_kw(Keyword::Table) {
                let name = self.ident()?;
                self.expect(&TokenKind::LParen, "(")?;
                let columns = if self.at(&TokenKind::RParen) {
                    Vec::new()
                } else {
                    self.column_defs()?
                };
                self.expect(&TokenKind::RParen, ")")?;
                return Ok(Statement::CreateTable { name, columns });
            }
            if self.eat_kw(Keyword::View) {
                let name = self.ident()?;
                self.expect_kw(Keyword::As)?;
                self.expect_kw(Keyword::Select)?;
                let query = self.select_body()?;
                return Ok(Statement::CreateView { name, query });
            }
            if self.eat_kw(Keyword::Type) {
                let name = self.ident()?;
                self.expect_kw(Keyword::As)?;
                self.expect_kw(Keyword::Enum)?;
                self.expect(&TokenKind::LParen, "(")?;
                let mut values = Vec::new();
                loop {
                    let v = match &self.peek().kind {
                        TokenKind::Str(s) | TokenKind::Ident(s) => s.clone(),
                        _ => return Err(self.error_here("enum value")),
                    };
                    self.advance();
                    values.push(v);
                    if !self.eat(&TokenKind::Comma) {
                        break;
                    }
                }
                self.expect(&TokenKind::RParen, ")")?;
                return Ok(Statement::CreateEnum { name, values });
            }
            return Err(self.error_here("TABLE, VIEW or TYPE"));
        }
        Err(self.error_here("SELECT, INSERT or CREATE"))
    }

    fn insert_body(&mut self) -> Result<Statement, SyntaxError> {
        self.expect_kw(Keyword::Into)?;
        let table = self.ident()?;
        self.expect_kw(Keyword::Values)?;
        let mut rows = Vec::new();
        loop {
            self.expect(&TokenKind::LParen, "(")?;
            let mut row = Vec::new();
            if !self.at(&TokenKind::RParen) {
                loop {
                    row.push(self.value_literal()?);
                    if !self.eat(&TokenKind::Comma) {
                        break;
                    }
                }
            }
            self.expect(&TokenKind::RParen, ")")?;
            rows.push(row);
            if !self.eat(&TokenKind::Comma) {
                break;
            }
        }
        Ok(Statement::Insert { table, rows })
    }

    /// Literal inside VALUES: also admits signed numbers, `p/q` and bare enum names.
    fn value_literal(&mut self) -> Result<Literal, SyntaxError> {
        match self.peek().kind.clone() {
            TokenKind::Keyword(Keyword::True) => {
                self.advance();
                Ok(Literal::Bool(true))
            }
            TokenKind::Keyword(Keyword::False) => {
                self.advance();
                Ok(Literal::Bool(false))
            }
            TokenKind::Str(s) | TokenKind::Ident(s) => {
                self.advance();
                Ok(Literal::Str(s))
            }
            TokenKind::Minus | TokenKind::Number(_) => {
                let numer = self.signed_number()?;
                if self.eat(&TokenKind::Slash) {
                    let at = self.peek().clone();
                    let denom = self.signed_number()?;
                    if denom.is_zero() {
                        return Err(SyntaxError {
                            line: at.line,
                            column: at.column,
                            message: "zero denominator".into(),
                        });
                    }
                    Ok(Literal::Number(numer / denom))
                } else {
                    Ok(Literal::Number(numer))
                }
            }
            _ => Err(self.error_here("literal value")),
        }
    }

    fn signed_number(&mut self) -> Result<BigRational, SyntaxError> {
        let negative = self.eat(&TokenKind::Minus);
        match self.peek().kind.clone() {
            TokenKind::Number(n) => {
                self.advance();
                let v = parse_rational(&n).expect("lexer produces valid numbers");
                Ok(if negative { -v } else { v })
            }
            _ => Err(self.error_here("number")),
        }
    }

    fn signed_integer(&mut self) -> Result<i64, SyntaxError> {
        let at = self.peek().clone();
        let v = self.signed_number()?;
        let bad = || SyntaxError {
            line: at.line,
            column: at.column,
            message: "expected an integer bound".into(),
        };
        if !v.is_integer() {
            return Err(bad());
        }
        i64::try_from(v.to_integer()).map_err(|_| bad())
    }

    fn column_defs(&mut self) -> Result<Vec<ColumnDef>, SyntaxError> {
        let mut cols = Vec::new();
        loop {
            let name = self.ident()?;
            let ty = self.type_name()?;
            cols.push(ColumnDef { name, ty });
            if !self.eat(&TokenKind::Comma) {
                break;
            }
        }
        Ok(cols)
    }

    fn type_name(&mut self) -> Result<TypeName, SyntaxError> {
        match self.peek().kind.clone() {
            TokenKind::Ident(name) => {
                self.advance();
                Ok(match name.to_ascii_lowercase().as_str() {
                    "int" => TypeName::Int,
                    "float" => TypeName::Float,
                    "bool" => TypeName::Bool,
                    _ => TypeName::Named(name),
                })
            }
            TokenKind::Minus | TokenKind::Number(_) => {
                let lo = self.signed_integer()?;
                self.expect(&TokenKind::DotDot, "..")?;
                let hi = self.signed_integer()?;
                Ok(TypeName::Range { lo, hi })
            }
            _ => Err(self.error_here("type")),
        }
    }

    fn select_body(&mut self) -> Result<SelectQuery, SyntaxError> {
        let projection = if self.eat(&TokenKind::Star) {
            Projection::All
        } else {
            let mut cols = vec![self.column_ref()?];
            while self.eat(&TokenKind::Comma) {
                cols.push(self.column_ref()?);
            }
            Projection::Columns(cols)
        };
        self.expect_kw(Keyword::From)?;
        let from = self.source()?;
        let mut joins = Vec::new();
        while self.eat_kw(Keyword::Join) {
            let source = self.source()?;
            self.expect_kw(Keyword::On)?;
            let on = self.expr()?;
            joins.push(JoinClause { source, on });
        }
        let filter = if self.eat_kw(Keyword::Where) {
            Some(self.expr()?)
        } else {
            None
        };
        let limit = if self.eat_kw(Keyword::Limit) {
            match self.peek().kind.clone() {
                TokenKind::Number(n) if !n.contains('.') => {
                    let v = n.parse::<u64>().map_err(|_| self.error_here("row count"))?;
                    self.advance();
                    Some(v)
                }
                _ => return Err(self.error_here("row count")),
            }
        } else {
            None
        };
        Ok(SelectQuery {
            projection,
            from,
            joins,
            filter,
            limit,
        })
    }

    fn column_ref(&mut self) -> Result<ColumnRef, SyntaxError> {
        let first = self.ident()?;
        if self.eat(&TokenKind::Dot) {
            let name = self.ident()?;
            Ok(ColumnRef::qualified(first, name))
        } else {
            Ok(ColumnRef::bare(first))
        }
    }

    fn source(&mut self) -> Result<Source, SyntaxError> {
        if self.eat_kw(Keyword::Complete) {
            self.expect(&TokenKind::LParen, "(")?;
            let cols = if self.at(&TokenKind::RParen) {
                Vec::new()
            } else {
                self.column_defs()?
            };
            self.expect(&TokenKind::RParen, ")")?;
            return Ok(Source::Complete(cols));
        }
        match &self.peek().kind {
            TokenKind::Ident(_) => Ok(Source::Named(self.ident()?)),
            _ => Err(self.error_here("relation name or COMPLETE(...)")),
        }
    }

    pub(crate) fn expr(&mut self) -> Result<Expr, SyntaxError> {
        let left = self.or_expr()?;
        if self.eat(&TokenKind::Arrow) {
            let right = self.expr()?;
            return Ok(Expr::binary(BinaryOp::Implies, left, right));
        }
        Ok(left)
    }

    fn or_expr(&mut self) -> Result<Expr, SyntaxError> {
        let mut left = self.and_expr()?;
        while self.eat_kw(Keyword::Or) {
            let right = self.and_expr()?;
            left = Expr::binary(BinaryOp::Or, left, right);
        }
        Ok(left)
    }

    fn and_expr(&mut self) -> Result<Expr, SyntaxError> {
        let mut left = self.comparison()?;
        while self.eat_kw(Keyword::And) {
            let right = self.comparison()?;
            left = Expr::binary(BinaryOp::And, left, right);
        }
        Ok(left)
    }

    fn comparison(&mut self) -> Result<Expr, SyntaxError> {
        let left = self.not_expr()?;
        let op = match self.peek().kind {
            TokenKind::Eq => BinaryOp::Eq,
            TokenKind::Ne => BinaryOp::Ne,
            TokenKind::Lt => BinaryOp::Lt,
            TokenKind::Le => BinaryOp::Le,
            TokenKind::Gt => BinaryOp::Gt,
            TokenKind::Ge => BinaryOp::Ge,
            _ => return Ok(left),
        };
        self.advance();
        let right = self.not_expr()?;
        Ok(Expr::binary(op, left, right))
    }

    fn not_expr(&mut self) -> Result<Expr, SyntaxError> {
        if self.eat_kw(Keyword::Not) {
            let operand = self.not_expr()?;
            return Ok(Expr::unary(UnaryOp::Not, operand));
        }
        self.additive()
    }

    fn additive(&mut self) -> Result<Expr, SyntaxError> {
        let mut left = self.multiplicative()?;
        loop {
            let op = match self.peek().kind {
                TokenKind::Plus => BinaryOp::Add,
                TokenKind::Minus => BinaryOp::Sub,
                _ => return Ok(left),
            };
            self.advance();
            let right = self.multiplicative()?;
            left = Expr::binary(op, left, right);
        }
    }

    fn multiplicative(&mut self) -> Result<Expr, SyntaxError> {
        let mut left = self.unary()?;
        loop {
            let op = match self.peek().kind {
                TokenKind::Star => BinaryOp::Mul,
                TokenKind::Slash => BinaryOp::Div,
                _ => return Ok(left),
            };
            self.advance();
            let right = self.unary()?;
            left = Expr::binary(op, left, right);
        }
    }

    fn unary(&mut self) -> Result<Expr, SyntaxError> {
        if self.at(&TokenKind::Minus) {
            if let TokenKind::Number(_) = self.peek_at(1) {
                let v = self.signed_number()?;
                return Ok(Expr::Literal(Literal::Number(v)));
            }
            self.advance();
            let operand = self.unary()?;
            return Ok(Expr::unary(UnaryOp::Neg, operand));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Expr, SyntaxError> {
        match self.peek().kind.clone() {
            TokenKind::Number(n) => {
                self.advance();
                Ok(Expr::Literal(Literal::Number(
                    parse_rational(&n).expect("lexer produces valid numbers"),
                )))
            }
            TokenKind::Str(s) => {
                self.advance();
                Ok(Expr::Literal(Literal::Str(s)))
            }
            TokenKind::Keyword(Keyword::True) => {
                self.advance();
                Ok(Expr::Literal(Literal::Bool(true)))
            }
            TokenKind::Keyword(Keyword::False) => {
                self.advance();
                Ok(Expr::Literal(Literal::Bool(false)))
            }
            TokenKind::Ident(_) => Ok(Expr::Column(self.column_ref()?)),
            TokenKind::LParen => {
                self.advance();
                let e = self.expr()?;
                self.expect(&TokenKind::RParen, ")")?;
                Ok(e)
            }
            _ => Err(self.error_here("expression")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn col(n: &str) -> Expr {
        Expr::column(n)
    }

    #[test]
    fn select_with_equality_predicate() {
        let s = parse_statement("SELECT * FROM Australian_GST WHERE Price=110;").unwrap();
        assert_eq!(
            s,
            Statement::Select(SelectQuery {
                projection: Projection::All,
                from: Source::Named("Australian_GST".into()),
                joins: vec![],
                filter: Some(Expr::binary(BinaryOp::Eq, col("Price"), Expr::number(110))),
                limit: None,
            })
        );
    }

    #[test]
    fn inline_complete_source() {
        let s = parse_statement(
            "SELECT * FROM COMPLETE(Price float, ExGSTAmount float, GSTAmount float) \
             WHERE GSTAmount = Price/11 AND ExGSTAmount = Price-GSTAmount;",
        )
        .unwrap();
        let Statement::Select(q) = s else { panic!() };
        assert_eq!(
            q.from,
            Source::Complete(vec![
                ColumnDef::new("Price", TypeName::Float),
                ColumnDef::new("ExGSTAmount", TypeName::Float),
                ColumnDef::new("GSTAmount", TypeName::Float),
            ])
        );
        let gst = Expr::binary(
            BinaryOp::Eq,
            col("GSTAmount"),
            Expr::binary(BinaryOp::Div, col("Price"), Expr::number(11)),
        );
        let ex = Expr::binary(
            BinaryOp::Eq,
            col("ExGSTAmount"),
            Expr::binary(BinaryOp::Sub, col("Price"), col("GSTAmount")),
        );
        assert_eq!(q.filter, Some(Expr::binary(BinaryOp::And, gst, ex)));
    }

    #[test]
    fn malformed_select_is_a_syntax_error() {
        let e = parse_statement("SELECT FROM;").unwrap_err();
        assert_eq!((e.line, e.column), (1, 8));
    }

    #[test]
    fn or_binds_looser_than_and() {
        let e = parse_expr("a OR b AND c").unwrap();
        assert_eq!(
            e,
            Expr::binary(BinaryOp::Or, col("a"), Expr::binary(BinaryOp::And, col("b"), col("c")))
        );
    }

    #[test]
    fn implication_is_loosest_and_right_associative() {
        let e = parse_expr("a -> b OR c -> d").unwrap();
        assert_eq!(
            e,
            Expr::binary(
                BinaryOp::Implies,
                col("a"),
                Expr::binary(
                    BinaryOp::Implies,
                    Expr::binary(BinaryOp::Or, col("b"), col("c")),
                    col("d")
                )
            )
        );
    }

    #[test]
    fn not_binds_tighter_than_comparison() {
        let e = parse_expr("NOT a = b").unwrap();
        assert_eq!(
            e,
            Expr::binary(BinaryOp::Eq, Expr::unary(UnaryOp::Not, col("a")), col("b"))
        );
    }

    #[test]
    fn ranges_enums_and_inserts() {
        let s = parse_script(
            "create type colour as enum ('red', green);\n\
             create table t (x 1..3, y -5..5, c colour);\n\
             insert into t values (1, -2, 'red'), (2, 0, green);",
        )
        .unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s[2].line, 3);
        assert_eq!(
            s[0].statement,
            Statement::CreateEnum {
                name: "colour".into(),
                values: vec!["red".into(), "green".into()]
            }
        );
        match &s[1].statement {
            Statement::CreateTable { columns, .. } => {
                assert_eq!(columns[1].ty, TypeName::Range { lo: -5, hi: 5 })
            }
            other => panic!("{other:?}"),
        }
        match &s[2].statement {
            Statement::Insert { rows, .. } => {
                assert_eq!(rows[0][1], Literal::Number(BigRational::from_integer((-2).into())));
                assert_eq!(rows[1][2], Literal::Str("green".into()));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn script_errors_carry_line_numbers() {
        let e = parse_script("select * from t;\nselect * form t;").unwrap_err();
        assert_eq!(e.line, 2);
    }

    #[test]
    fn joins_with_qualified_columns() {
        let s = parse_statement("SELECT p FROM prices JOIN Australian_GST ON prices.p = Australian_GST.Price LIMIT 5")
            .unwrap();
        let Statement::Select(q) = s else { panic!() };
        assert_eq!(q.joins.len(), 1);
        assert_eq!(q.limit, Some(5));
        assert_eq!(
            q.joins[0].on,
            Expr::binary(
                BinaryOp::Eq,
                Expr::Column(ColumnRef::qualified("prices", "p")),
                Expr::Column(ColumnRef::qualified("Australian_GST", "Price"))
            )
        );
    }
}
