use std::collections::BTreeSet;
use std::sync::Arc;

use indexmap::IndexMap;

use super::domain::{DomainSpec, EnumType, DEFAULT_INT_BOUNDS};
use super::heading::{Attribute, Heading, Tuple};
use super::ModelError;
use crate::lang::ast::{ColumnDef, Expr, SelectQuery, TypeName};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RelationDef {
    /// Stored tuples, changed only through INSERT.
    Data { heading: Heading, body: BTreeSet<Tuple> },
    /// `σP(Dom(a1) × … × Dom(aN))`. A constant: never a DML target.
    Sigma { heading: Heading, predicate: Option<Expr> },
    /// Any other named query, inlined at planning time.
    View { query: SelectQuery },
}

impl RelationDef {
    pub fn kind(&self) -> RelationKind {
        match self {
            RelationDef::Data { .. } => RelationKind::Data,
            RelationDef::Sigma { .. } => RelationKind::Sigma,
            RelationDef::View { .. } => RelationKind::View,
        }
    }

    pub fn data(heading: Heading) -> Self {
        RelationDef::Data {
            heading,
            body: BTreeSet::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelationKind {
    Data,
    Sigma,
    View,
}

impl RelationKind {
    pub fn as_str(self) -> &'static str {
        match self {
            RelationKind::Data => "data",
            RelationKind::Sigma => "sigma",
            RelationKind::View => "view",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CatalogEntry {
    Type(Arc<EnumType>),
    Relation(RelationDef),
}

/// Named enum types and relations in definition order.
///
/// A catalog is a value: every mutation returns a new catalog and leaves
/// the receiver untouched, so readers can keep older versions around.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Catalog {
    entries: IndexMap<String, Arc<CatalogEntry>>,
    int_bounds: (i64, i64),
}

impl Default for Catalog {
    fn default() -> Self {
        Catalog {
            entries: IndexMap::new(),
            int_bounds: DEFAULT_INT_BOUNDS,
        }
    }
}

impl Catalog {
    pub fn new() -> Self {
        Self::default()
    }

    /// Catalog whose bare `int` attributes range over `lo..hi`.
    pub fn with_int_bounds(lo: i64, hi: i64) -> Result<Self, ModelError> {
        DomainSpec::int(lo, hi)?;
        Ok(Catalog {
            entries: IndexMap::new(),
            int_bounds: (lo, hi),
        })
    }

    pub fn int_bounds(&self) -> (i64, i64) {
        self.int_bounds
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, &CatalogEntry)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_ref()))
    }

    pub fn relations(&self) -> impl Iterator<Item = (&str, &RelationDef)> {
        self.entries().filter_map(|(name, e)| match e {
            CatalogEntry::Relation(r) => Some((name, r)),
            CatalogEntry::Type(_) => None,
        })
    }

    pub fn contains(&self, name: &str) -> bool {
        self.entries.contains_key(name)
    }

    pub fn relation(&self, name: &str) -> Option<&RelationDef> {
        match self.entries.get(name).map(Arc::as_ref) {
            Some(CatalogEntry::Relation(r)) => Some(r),
            _ => None,
        }
    }

    pub fn enum_type(&self, name: &str) -> Option<&Arc<EnumType>> {
        match self.entries.get(name).map(Arc::as_ref) {
            Some(CatalogEntry::Type(t)) => Some(t),
            _ => None,
        }
    }

    pub fn define_type(&self, ty: EnumType) -> Result<Catalog, ModelError> {
        let name = ty.name().to_string();
        if is_builtin_type(&name) {
            return Err(ModelError::DuplicateName(name));
        }
        self.bind(name, CatalogEntry::Type(Arc::new(ty)))
    }

    pub fn define(&self, name: &str, def: RelationDef) -> Result<Catalog, ModelError> {
        match &def {
            RelationDef::Data { heading, body } => {
                self.check_heading_types(heading)?;
                if let Some(t) = body.iter().find(|t| !t.conforms(heading)) {
                    return Err(ModelError::DomainViolation {
                        relation: name.to_string(),
                        tuple: t.to_string(),
                    });
                }
            }
            RelationDef::Sigma { heading, .. } => self.check_heading_types(heading)?,
            RelationDef::View { query } => {
                for r in query.referenced_names() {
                    if self.relation(r).is_none() {
                        return Err(ModelError::UnknownReference(r.to_string()));
                    }
                }
            }
        }
        self.bind(name.to_string(), CatalogEntry::Relation(def))
    }

    fn bind(&self, name: String, entry: CatalogEntry) -> Result<Catalog, ModelError> {
        if self.entries.contains_key(&name) {
            return Err(ModelError::DuplicateName(name));
        }
        let mut next = self.clone();
        next.entries.insert(name, Arc::new(entry));
        Ok(next)
    }

    fn check_heading_types(&self, heading: &Heading) -> Result<(), ModelError> {
        for a in heading.attrs() {
            if let DomainSpec::Enum(ty) = &a.domain {
                match self.enum_type(ty.name()) {
                    Some(known) if known.as_ref() == ty.as_ref() => {}
                    _ => return Err(ModelError::UnknownReference(ty.name().to_string())),
                }
            }
        }
        Ok(())
    }

    /// Adds `tuple` to a data relation's body; a tuple already present is a no-op.
    pub fn insert(&self, name: &str, tuple: Tuple) -> Result<Catalog, ModelError> {
        self.insert_all(name, std::iter::once(tuple))
    }

    pub fn insert_all(&self, name: &str, tuples: impl IntoIterator<Item = Tuple>) -> Result<Catalog, ModelError> {
        let (heading, body) = match self.entries.get(name).map(Arc::as_ref) {
            Some(CatalogEntry::Relation(RelationDef::Data { heading, body })) => (heading, body),
            Some(_) => return Err(ModelError::TargetNotDataRelation(name.to_string())),
            None => return Err(ModelError::UnknownReference(name.to_string())),
        };
        let mut body = body.clone();
        for t in tuples {
            if t.arity() != heading.arity() {
                return Err(ModelError::ArityMismatch {
                    expected: heading.arity(),
                    found: t.arity(),
                });
            }
            if !t.conforms(heading) {
                return Err(ModelError::DomainViolation {
                    relation: name.to_string(),
                    tuple: t.to_string(),
                });
            }
            body.insert(t);
        }
        let mut next = self.clone();
        next.entries.insert(
            name.to_string(),
            Arc::new(CatalogEntry::Relation(RelationDef::Data {
                heading: heading.clone(),
                body,
            })),
        );
        Ok(next)
    }

    pub fn resolve_type(&self, ty: &TypeName) -> Result<DomainSpec, ModelError> {
        match ty {
            TypeName::Bool => Ok(DomainSpec::Bool),
            TypeName::Int => DomainSpec::int(self.int_bounds.0, self.int_bounds.1),
            TypeName::Float => Ok(DomainSpec::Rat),
            TypeName::Range { lo, hi } => DomainSpec::int(*lo, *hi),
            TypeName::Named(n) => self
                .enum_type(n)
                .map(|t| DomainSpec::Enum(t.clone()))
                .ok_or_else(|| ModelError::UnknownType(n.clone())),
        }
    }

    pub fn resolve_columns(&self, columns: &[ColumnDef]) -> Result<Heading, ModelError> {
        let attrs = columns
            .iter()
            .map(|c| Ok(Attribute::new(c.name.clone(), self.resolve_type(&c.ty)?)))
            .collect::<Result<Vec<_>, ModelError>>()?;
        Heading::new(attrs)
    }

    /// Surface type for a domain; inverse of `resolve_type`.
    pub fn type_name(&self, domain: &DomainSpec) -> TypeName {
        match domain {
            DomainSpec::Bool => TypeName::Bool,
            DomainSpec::Rat => TypeName::Float,
            DomainSpec::Int { lo, hi } if (*lo, *hi) == self.int_bounds => TypeName::Int,
            DomainSpec::Int { lo, hi } => TypeName::Range { lo: *lo, hi: *hi },
            DomainSpec::Enum(t) => TypeName::Named(t.name().to_string()),
        }
    }

    pub fn column_defs(&self, heading: &Heading) -> Vec<ColumnDef> {
        heading
            .attrs()
            .iter()
            .map(|a| ColumnDef::new(a.name.clone(), self.type_name(&a.domain)))
            .collect()
    }
}

pub(crate) fn is_builtin_type(name: &str) -> bool {
    matches!(name.to_ascii_lowercase().as_str(), "int" | "float" | "bool")
}
