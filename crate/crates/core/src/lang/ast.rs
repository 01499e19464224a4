//! Syntax tree of the surface language. Purely syntactic: names are not
//! resolved and types are not checked here.

use num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Statement {
    CreateTable { name: String, columns: Vec<ColumnDef> },
    CreateEnum { name: String, values: Vec<String> },
    Insert { table: String, rows: Vec<Vec<Literal>> },
    CreateView { name: String, query: SelectQuery },
    Select(SelectQuery),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnDef {
    pub name: String,
    pub ty: TypeName,
}

impl ColumnDef {
    pub fn new(name: impl Into<String>, ty: TypeName) -> Self {
        ColumnDef { name: name.into(), ty }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TypeName {
    Bool,
    /// Bare `int`, bounded by the catalog default.
    Int,
    Float,
    /// `lo..hi`
    Range {
        lo: i64,
        hi: i64,
    },
    /// A declared enum type.
    Named(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelectQuery {
    pub projection: Projection,
    pub from: Source,
    pub joins: Vec<JoinClause>,
    pub filter: Option<Expr>,
    pub limit: Option<u64>,
}

impl SelectQuery {
    pub fn star(from: Source) -> Self {
        SelectQuery {
            projection: Projection::All,
            from,
            joins: Vec::new(),
            filter: None,
            limit: None,
        }
    }

    /// Names referenced by FROM and JOIN.
    pub fn referenced_names(&self) -> Vec<&str> {
        std::iter::once(&self.from)
            .chain(self.joins.iter().map(|j| &j.source))
            .filter_map(|s| match s {
                Source::Named(n) => Some(n.as_str()),
                Source::Complete(_) => None,
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Projection {
    All,
    Columns(Vec<ColumnRef>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Source {
    Named(String),
    Complete(Vec<ColumnDef>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JoinClause {
    pub source: Source,
    pub on: Expr,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnRef {
    pub qualifier: Option<String>,
    pub name: String,
}

impl ColumnRef {
    pub fn bare(name: impl Into<String>) -> Self {
        ColumnRef {
            qualifier: None,
            name: name.into(),
        }
    }

    pub fn qualified(qualifier: impl Into<String>, name: impl Into<String>) -> Self {
        ColumnRef {
            qualifier: Some(qualifier.into()),
            name: name.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Literal {
    Bool(bool),
    Number(BigRational),
    /// Quoted text; only meaningful as an enum value.
    Str(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    Neg,
    Not,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
    Implies,
}

impl BinaryOp {
    pub fn is_comparison(self) -> bool {
        matches!(
            self,
            BinaryOp::Eq | BinaryOp::Ne | BinaryOp::Lt | BinaryOp::Le | BinaryOp::Gt | BinaryOp::Ge
        )
    }

    pub fn is_arithmetic(self) -> bool {
        matches!(self, BinaryOp::Add | BinaryOp::Sub | BinaryOp::Mul | BinaryOp::Div)
    }

    pub fn is_logical(self) -> bool {
        matches!(self, BinaryOp::And | BinaryOp::Or | BinaryOp::Implies)
    }

    /// Binding strength; larger binds tighter.
    pub fn precedence(self) -> u8 {
        match self {
            BinaryOp::Implies => 1,
            BinaryOp::Or => 2,
            BinaryOp::And => 3,
            BinaryOp::Eq | BinaryOp::Ne | BinaryOp::Lt | BinaryOp::Le | BinaryOp::Gt | BinaryOp::Ge => 4,
            BinaryOp::Add | BinaryOp::Sub => 6,
            BinaryOp::Mul | BinaryOp::Div => 7,
        }
    }

    /// The comparison that holds exactly when `self` does not.
    pub fn negated_comparison(self) -> Option<BinaryOp> {
        Some(match self {
            BinaryOp::Eq => BinaryOp::Ne,
            BinaryOp::Ne => BinaryOp::Eq,
            BinaryOp::Lt => BinaryOp::Ge,
            BinaryOp::Le => BinaryOp::Gt,
            BinaryOp::Gt => BinaryOp::Le,
            BinaryOp::Ge => BinaryOp::Lt,
            _ => return None,
        })
    }

    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
            BinaryOp::Eq => "=",
            BinaryOp::Ne => "<>",
            BinaryOp::Lt => "<",
            BinaryOp::Le => "<=",
            BinaryOp::Gt => ">",
            BinaryOp::Ge => ">=",
            BinaryOp::And => "AND",
            BinaryOp::Or => "OR",
            BinaryOp::Implies => "->",
        }
    }
}

pub const NOT_PRECEDENCE: u8 = 5;
pub const NEG_PRECEDENCE: u8 = 8;
pub const ATOM_PRECEDENCE: u8 = 9;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Literal(Literal),
    Column(ColumnRef),
    Unary {
        op: UnaryOp,
        operand: Box<Expr>,
    },
    Binary {
        op: BinaryOp,
        left: Box<Expr>,
        right: Box<Expr>,
    },
}

impl Expr {
    pub fn column(name: impl Into<String>) -> Self {
        Expr::Column(ColumnRef::bare(name))
    }

    pub fn number(n: i64) -> Self {
        Expr::Literal(Literal::Number(BigRational::from_integer(n.into())))
    }

    pub fn binary(op: BinaryOp, left: Expr, right: Expr) -> Self {
        Expr::Binary {
            op,
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    pub fn unary(op: UnaryOp, operand: Expr) -> Self {
        Expr::Unary {
            op,
            operand: Box::new(operand),
        }
    }

    pub fn precedence(&self) -> u8 {
        match self {
            Expr::Literal(_) | Expr::Column(_) => ATOM_PRECEDENCE,
            Expr::Unary { op: UnaryOp::Not, .. } => NOT_PRECEDENCE,
            Expr::Unary { op: UnaryOp::Neg, .. } => NEG_PRECEDENCE,
            Expr::Binary { op, .. } => op.precedence(),
        }
    }
}
