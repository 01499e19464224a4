use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;

use super::scalar::{EnumValue, Scalar};
use super::ModelError;

/// Default bounds for an `int` attribute declared without a range.
pub const DEFAULT_INT_BOUNDS: (i64, i64) = (-1_000_000_000, 1_000_000_000);

/// A user-declared enumeration; value order is declaration order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EnumType {
    name: String,
    values: Vec<String>,
}

impl EnumType {
    pub fn new(name: impl Into<String>, values: Vec<String>) -> Result<Self, ModelError> {
        let name = name.into();
        if values.is_empty() {
            return Err(ModelError::InvalidDomain(format!("enum {name} has no values")));
        }
        for (i, v) in values.iter().enumerate() {
            if values[..i].contains(v) {
                return Err(ModelError::InvalidDomain(format!("enum {name} repeats value {v}")));
            }
        }
        Ok(EnumType { name, values })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn values(&self) -> &[String] {
        &self.values
    }

    pub fn index_of(&self, value: &str) -> Option<usize> {
        self.values.iter().position(|v| v == value)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum DomainSpec {
    Bool,
    /// Inclusive bounds.
    Int {
        lo: i64,
        hi: i64,
    },
    /// Exact rationals; the surface language calls this `float`.
    Rat,
    Enum(Arc<EnumType>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cardinality {
    Finite(u128),
    Infinite,
}

impl DomainSpec {
    pub fn int(lo: i64, hi: i64) -> Result<Self, ModelError> {
        if lo > hi {
            return Err(ModelError::InvalidDomain(format!("empty range {lo}..{hi}")));
        }
        Ok(DomainSpec::Int { lo, hi })
    }

    pub fn cardinality(&self) -> Cardinality {
        match self {
            DomainSpec::Bool => Cardinality::Finite(2),
            DomainSpec::Int { lo, hi } => Cardinality::Finite((*hi as i128 - *lo as i128 + 1) as u128),
            DomainSpec::Rat => Cardinality::Infinite,
            DomainSpec::Enum(ty) => Cardinality::Finite(ty.values().len() as u128),
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.cardinality(), Cardinality::Finite(_))
    }

    pub fn is_numeric(&self) -> bool {
        matches!(self, DomainSpec::Int { .. } | DomainSpec::Rat)
    }

    pub fn contains(&self, value: &Scalar) -> bool {
        match (self, value) {
            (DomainSpec::Bool, Scalar::Bool(_)) => true,
            (DomainSpec::Int { lo, hi }, Scalar::Int(v)) => *v >= BigInt::from(*lo) && *v <= BigInt::from(*hi),
            (DomainSpec::Rat, Scalar::Rat(_)) => true,
            (DomainSpec::Enum(ty), Scalar::Enum(e)) => e.enum_type() == ty,
            _ => false,
        }
    }

    /// All values in ascending order, for finite domains.
    pub fn values(&self) -> Option<Box<dyn Iterator<Item = Scalar> + '_>> {
        match self {
            DomainSpec::Bool => Some(Box::new([false, true].into_iter().map(Scalar::Bool))),
            DomainSpec::Int { lo, hi } => Some(Box::new((*lo..=*hi).map(Scalar::int))),
            DomainSpec::Rat => None,
            DomainSpec::Enum(ty) => Some(Box::new(
                (0..ty.values().len()).filter_map(move |i| EnumValue::new(ty, i).map(Scalar::Enum)),
            )),
        }
    }
}

impl fmt::Display for DomainSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DomainSpec::Bool => f.write_str("bool"),
            DomainSpec::Int { lo, hi } => write!(f, "{lo}..{hi}"),
            DomainSpec::Rat => f.write_str("float"),
            DomainSpec::Enum(ty) => f.write_str(ty.name()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cardinalities() {
        assert_eq!(DomainSpec::int(1, 3).unwrap().cardinality(), Cardinality::Finite(3));
        assert_eq!(DomainSpec::Bool.cardinality(), Cardinality::Finite(2));
        assert_eq!(DomainSpec::Rat.cardinality(), Cardinality::Infinite);
        let ty = EnumType::new("c", vec!["r".into(), "g".into()]).unwrap();
        assert_eq!(DomainSpec::Enum(Arc::new(ty)).cardinality(), Cardinality::Finite(2));
        let (lo, hi) = DEFAULT_INT_BOUNDS;
        assert_eq!(
            DomainSpec::int(lo, hi).unwrap().cardinality(),
            Cardinality::Finite(2_000_000_001)
        );
    }

    #[test]
    fn invalid_domains_are_rejected() {
        assert!(DomainSpec::int(3, 1).is_err());
        assert!(EnumType::new("e", vec![]).is_err());
        assert!(EnumType::new("e", vec!["a".into(), "a".into()]).is_err());
    }

    #[test]
    fn finite_values_ascend() {
        let vals: Vec<_> = DomainSpec::int(-1, 1).unwrap().values().unwrap().collect();
        assert_eq!(vals, vec![Scalar::int(-1), Scalar::int(0), Scalar::int(1)]);
        assert!(DomainSpec::Rat.values().is_none());
    }
}
