use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::domain::{DomainSpec, EnumType};
use super::ModelError;

/// A member of a declared enum type. Ordered by declaration position.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EnumValue {
    index: usize,
    ty: Arc<EnumType>,
}

impl EnumValue {
    pub fn new(ty: &Arc<EnumType>, index: usize) -> Option<Self> {
        (index < ty.values().len()).then(|| EnumValue { index, ty: ty.clone() })
    }

    pub fn named(ty: &Arc<EnumType>, name: &str) -> Option<Self> {
        EnumValue::new(ty, ty.index_of(name)?)
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn name(&self) -> &str {
        &self.ty.values()[self.index]
    }

    pub fn enum_type(&self) -> &Arc<EnumType> {
        &self.ty
    }
}

/// A single attribute value. There is no null.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scalar {
    Bool(bool),
    Int(BigInt),
    Rat(BigRational),
    Enum(EnumValue),
}

impl Scalar {
    pub fn int(v: i64) -> Self {
        Scalar::Int(BigInt::from(v))
    }

    pub fn rat(numer: i64, denom: i64) -> Self {
        Scalar::Rat(BigRational::new(numer.into(), denom.into()))
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Scalar::Bool(b) => Some(*b),
            _ => None,
        }
    }

    /// Numeric view of Int and Rat values.
    pub fn as_rational(&self) -> Option<BigRational> {
        match self {
            Scalar::Int(i) => Some(BigRational::from_integer(i.clone())),
            Scalar::Rat(r) => Some(r.clone()),
            _ => None,
        }
    }

    pub fn as_enum(&self) -> Option<&EnumValue> {
        match self {
            Scalar::Enum(e) => Some(e),
            _ => None,
        }
    }

    /// Converts a numeric value into the representation used by `domain`,
    /// failing when the value cannot live there.
    pub fn from_rational(value: &BigRational, domain: &DomainSpec) -> Option<Scalar> {
        let scalar = match domain {
            DomainSpec::Int { .. } if value.is_integer() => Scalar::Int(value.to_integer()),
            DomainSpec::Rat => Scalar::Rat(value.clone()),
            _ => return None,
        };
        domain.contains(&scalar).then_some(scalar)
    }

    /// Parses the text encoding produced by `Display` against a domain.
    pub fn parse_for(text: &str, domain: &DomainSpec) -> Result<Scalar, ModelError> {
        let invalid = || ModelError::InvalidValue {
            value: text.to_string(),
            domain: domain.to_string(),
        };
        let text = text.trim();
        let scalar = match domain {
            DomainSpec::Bool => match text.to_ascii_lowercase().as_str() {
                "true" => Scalar::Bool(true),
                "false" => Scalar::Bool(false),
                _ => return Err(invalid()),
            },
            DomainSpec::Int { .. } => {
                let r = parse_rational(text).ok_or_else(invalid)?;
                if !r.is_integer() {
                    return Err(invalid());
                }
                Scalar::Int(r.to_integer())
            }
            DomainSpec::Rat => Scalar::Rat(parse_rational(text).ok_or_else(invalid)?),
            DomainSpec::Enum(ty) => {
                let name = text.trim_matches('\'');
                Scalar::Enum(EnumValue::named(ty, name).ok_or_else(invalid)?)
            }
        };
        if domain.contains(&scalar) {
            Ok(scalar)
        } else {
            Err(invalid())
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Bool(b) => write!(f, "{b}"),
            Scalar::Int(i) => write!(f, "{i}"),
            Scalar::Rat(r) => f.write_str(&format_rational(r)),
            Scalar::Enum(e) => f.write_str(e.name()),
        }
    }
}

/// Decimal text when the denominator divides a power of ten, `p/q` otherwise.
pub fn format_rational(r: &BigRational) -> String {
    if r.is_integer() {
        return r.to_integer().to_string();
    }
    match decimal_digits(r.denom()) {
        Some(places) => {
            let scale = num_traits::pow(BigInt::from(10), places);
            let scaled = (r * BigRational::from_integer(scale)).to_integer();
            let digits = scaled.abs().to_string();
            let digits = format!("{digits:0>width$}", width = places + 1);
            let (int_part, frac_part) = digits.split_at(digits.len() - places);
            let sign = if r.is_negative() { "-" } else { "" };
            format!("{sign}{int_part}.{frac_part}")
        }
        None => format!("{}/{}", r.numer(), r.denom()),
    }
}

/// Number of decimal places needed to represent `1/denom` exactly, if finite.
fn decimal_digits(denom: &BigInt) -> Option<usize> {
    let mut d = denom.clone();
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    let (mut twos, mut fives) = (0usize, 0usize);
    while d.is_even() {
        d /= &two;
        twos += 1;
    }
    while (&d % &five).is_zero() {
        d /= &five;
        fives += 1;
    }
    d.is_one().then_some(twos.max(fives))
}

/// Parses `12`, `-1.25`, or `p/q` exactly.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let text = text.trim();
    if let Some((n, d)) = text.split_once('/') {
        let n = parse_decimal(n.trim())?;
        let d = parse_decimal(d.trim())?;
        if d.is_zero() {
            return None;
        }
        return Some(n / d);
    }
    parse_decimal(text)
}

fn parse_decimal(text: &str) -> Option<BigRational> {
    let (negative, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text.strip_prefix('+').unwrap_or(text)),
    };
    if body.is_empty() {
        return None;
    }
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let numer = BigInt::from_str(if digits.is_empty() { "0" } else { &digits }).ok()?;
    let denom = num_traits::pow(BigInt::from(10), frac_part.len());
    let value = BigRational::new(numer, denom);
    Some(if negative { -value } else { value })
}
