use std::fmt;

use super::domain::DomainSpec;
use super::scalar::Scalar;
use super::ModelError;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Attribute {
    pub name: String,
    pub domain: DomainSpec,
}

impl Attribute {
    pub fn new(name: impl Into<String>, domain: DomainSpec) -> Self {
        Attribute {
            name: name.into(),
            domain,
        }
    }
}

/// Ordered, uniquely named attributes. Order fixes tuple layout and the
/// canonical sort order of results.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Heading {
    attrs: Vec<Attribute>,
}

impl Heading {
    pub fn new(attrs: Vec<Attribute>) -> Result<Self, ModelError> {
        for (i, a) in attrs.iter().enumerate() {
            if attrs[..i].iter().any(|b| b.name == a.name) {
                return Err(ModelError::DuplicateAttribute(a.name.clone()));
            }
        }
        Ok(Heading { attrs })
    }

    pub fn empty() -> Self {
        Heading::default()
    }

    pub fn attrs(&self) -> &[Attribute] {
        &self.attrs
    }

    pub fn arity(&self) -> usize {
        self.attrs.len()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.attrs.iter().position(|a| a.name == name)
    }

    pub fn get(&self, name: &str) -> Option<&Attribute> {
        self.attrs.iter().find(|a| a.name == name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.attrs.iter().map(|a| a.name.as_str())
    }

    pub fn concat(&self, other: &Heading) -> Result<Heading, ModelError> {
        let mut attrs = self.attrs.clone();
        attrs.extend(other.attrs.iter().cloned());
        Heading::new(attrs)
    }

    pub fn project(&self, names: &[String]) -> Result<Heading, ModelError> {
        let attrs = names
            .iter()
            .map(|n| {
                self.get(n)
                    .cloned()
                    .ok_or_else(|| ModelError::UnknownAttribute(n.clone()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Heading::new(attrs)
    }
}

impl fmt::Display for Heading {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, a) in self.attrs.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{} {}", a.name, a.domain)?;
        }
        f.write_str(")")
    }
}

/// Values laid out in heading order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Tuple(Vec<Scalar>);

impl Tuple {
    pub fn new(values: Vec<Scalar>) -> Self {
        Tuple(values)
    }

    pub fn values(&self) -> &[Scalar] {
        &self.0
    }

    pub fn get(&self, i: usize) -> Option<&Scalar> {
        self.0.get(i)
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn concat(&self, other: &Tuple) -> Tuple {
        let mut values = self.0.clone();
        values.extend(other.0.iter().cloned());
        Tuple(values)
    }

    pub fn into_values(self) -> Vec<Scalar> {
        self.0
    }

    /// True iff arity matches and every value lies in its attribute's domain.
    pub fn conforms(&self, heading: &Heading) -> bool {
        self.0.len() == heading.arity() && self.0.iter().zip(heading.attrs()).all(|(v, a)| a.domain.contains(v))
    }
}

impl From<Vec<Scalar>> for Tuple {
    fn from(values: Vec<Scalar>) -> Self {
        Tuple(values)
    }
}

impl fmt::Display for Tuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str(")")
    }
}
