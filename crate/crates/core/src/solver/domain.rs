//! Per-attribute domains as they narrow during solving.

use std::collections::BTreeSet;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use super::linear::{Bound, Contradiction};
use crate::model::{DomainSpec, EnumType, EnumValue, Scalar};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RatDomain {
    Fixed(BigRational),
    Range {
        lo: Option<Bound>,
        hi: Option<Bound>,
        excluded: BTreeSet<BigRational>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VarDomain {
    Bool {
        can_false: bool,
        can_true: bool,
    },
    /// `lo..=hi` without `excluded`; exclusions always lie strictly inside.
    Int {
        lo: BigInt,
        hi: BigInt,
        excluded: BTreeSet<BigInt>,
    },
    Enum {
        ty: Arc<EnumType>,
        allowed: BTreeSet<usize>,
    },
    Rat(RatDomain),
}

type Step = Result<bool, Contradiction>;

impl VarDomain {
    pub fn full(spec: &DomainSpec) -> Self {
        match spec {
            DomainSpec::Bool => VarDomain::Bool {
                can_false: true,
                can_true: true,
            },
            DomainSpec::Int { lo, hi } => VarDomain::Int {
                lo: BigInt::from(*lo),
                hi: BigInt::from(*hi),
                excluded: BTreeSet::new(),
            },
            DomainSpec::Enum(ty) => VarDomain::Enum {
                ty: ty.clone(),
                allowed: (0..ty.values().len()).collect(),
            },
            DomainSpec::Rat => VarDomain::Rat(RatDomain::Range {
                lo: None,
                hi: None,
                excluded: BTreeSet::new(),
            }),
        }
    }

    pub fn is_finite(&self) -> bool {
        !matches!(self, VarDomain::Rat(_))
    }

    /// Number of values left, for finite domains.
    pub fn size(&self) -> Option<BigInt> {
        match self {
            VarDomain::Bool { can_false, can_true } => Some(BigInt::from(*can_false as u8 + *can_true as u8)),
            VarDomain::Int { lo, hi, excluded } => Some(hi - lo + 1 - excluded.len()),
            VarDomain::Enum { allowed, .. } => Some(BigInt::from(allowed.len())),
            VarDomain::Rat(RatDomain::Fixed(_)) => Some(BigInt::one()),
            VarDomain::Rat(_) => None,
        }
    }

    pub fn fixed(&self) -> Option<Scalar> {
        match self {
            VarDomain::Bool { can_false, can_true } => match (can_false, can_true) {
                (true, false) => Some(Scalar::Bool(false)),
                (false, true) => Some(Scalar::Bool(true)),
                _ => None,
            },
            VarDomain::Int { lo, hi, .. } if lo == hi => Some(Scalar::Int(lo.clone())),
            VarDomain::Enum { ty, allowed } if allowed.len() == 1 => {
                EnumValue::new(ty, *allowed.iter().next()?).map(Scalar::Enum)
            }
            VarDomain::Rat(RatDomain::Fixed(v)) => Some(Scalar::Rat(v.clone())),
            _ => None,
        }
    }

    pub fn is_fixed(&self) -> bool {
        self.fixed().is_some()
    }

    /// Numeric value when fixed.
    pub fn fixed_number(&self) -> Option<BigRational> {
        match self {
            VarDomain::Int { lo, hi, .. } if lo == hi => Some(BigRational::from_integer(lo.clone())),
            VarDomain::Rat(RatDomain::Fixed(v)) => Some(v.clone()),
            _ => None,
        }
    }

    /// Values in ascending order, up to `cap` of them.
    pub fn values(&self, cap: usize) -> Option<Vec<Scalar>> {
        let n = self.size()?.to_usize()?;
        if n > cap {
            return None;
        }
        Some(match self {
            VarDomain::Bool { can_false, can_true } => [(false, *can_false), (true, *can_true)]
                .into_iter()
                .filter(|(_, ok)| *ok)
                .map(|(v, _)| Scalar::Bool(v))
                .collect(),
            VarDomain::Int { lo, hi, excluded } => {
                let mut out = Vec::with_capacity(n);
                let mut v = lo.clone();
                while &v <= hi {
                    if !excluded.contains(&v) {
                        out.push(Scalar::Int(v.clone()));
                    }
                    v += 1;
                }
                out
            }
            VarDomain::Enum { ty, allowed } => allowed
                .iter()
                .filter_map(|i| EnumValue::new(ty, *i).map(Scalar::Enum))
                .collect(),
            VarDomain::Rat(RatDomain::Fixed(v)) => vec![Scalar::Rat(v.clone())],
            VarDomain::Rat(_) => return None,
        })
    }

    /// Smallest value, for finite domains.
    pub fn first(&self) -> Option<Scalar> {
        match self {
            VarDomain::Bool { can_false, can_true } => {
                if *can_false {
                    Some(Scalar::Bool(false))
                } else if *can_true {
                    Some(Scalar::Bool(true))
                } else {
                    None
                }
            }
            VarDomain::Int { lo, .. } => Some(Scalar::Int(lo.clone())),
            VarDomain::Enum { ty, allowed } => EnumValue::new(ty, *allowed.iter().next()?).map(Scalar::Enum),
            VarDomain::Rat(RatDomain::Fixed(v)) => Some(Scalar::Rat(v.clone())),
            VarDomain::Rat(_) => None,
        }
    }

    /// Lower bound of a numeric domain.
    pub fn lower(&self) -> Option<Bound> {
        match self {
            VarDomain::Int { lo, .. } => Some(Bound {
                value: BigRational::from_integer(lo.clone()),
                strict: false,
            }),
            VarDomain::Rat(RatDomain::Fixed(v)) => Some(Bound {
                value: v.clone(),
                strict: false,
            }),
            VarDomain::Rat(RatDomain::Range { lo, .. }) => lo.clone(),
            _ => None,
        }
    }

    pub fn upper(&self) -> Option<Bound> {
        match self {
            VarDomain::Int { hi, .. } => Some(Bound {
                value: BigRational::from_integer(hi.clone()),
                strict: false,
            }),
            VarDomain::Rat(RatDomain::Fixed(v)) => Some(Bound {
                value: v.clone(),
                strict: false,
            }),
            VarDomain::Rat(RatDomain::Range { hi, .. }) => hi.clone(),
            _ => None,
        }
    }

    pub fn contains(&self, v: &Scalar) -> bool {
        match (self, v) {
            (VarDomain::Bool { can_false, can_true }, Scalar::Bool(b)) => {
                if *b {
                    *can_true
                } else {
                    *can_false
                }
            }
            (VarDomain::Int { lo, hi, excluded }, Scalar::Int(i)) => lo <= i && i <= hi && !excluded.contains(i),
            (VarDomain::Enum { allowed, .. }, Scalar::Enum(e)) => allowed.contains(&e.index()),
            (VarDomain::Rat(d), Scalar::Rat(r)) => rat_contains(d, r),
            _ => false,
        }
    }

    /// Restricts to a single value.
    pub fn fix(&mut self, v: &Scalar) -> Step {
        if !self.contains(v) {
            return Err(Contradiction);
        }
        let changed = !self.is_fixed();
        *self = match (&*self, v) {
            (VarDomain::Bool { .. }, Scalar::Bool(b)) => VarDomain::Bool {
                can_false: !b,
                can_true: *b,
            },
            (VarDomain::Int { .. }, Scalar::Int(i)) => VarDomain::Int {
                lo: i.clone(),
                hi: i.clone(),
                excluded: BTreeSet::new(),
            },
            (VarDomain::Enum { ty, .. }, Scalar::Enum(e)) => VarDomain::Enum {
                ty: ty.clone(),
                allowed: [e.index()].into(),
            },
            (VarDomain::Rat(_), Scalar::Rat(r)) => VarDomain::Rat(RatDomain::Fixed(r.clone())),
            _ => return Err(Contradiction),
        };
        Ok(changed)
    }

    /// Restricts a numeric domain to the rational `v`.
    pub fn fix_number(&mut self, v: &BigRational) -> Step {
        match self {
            VarDomain::Int { .. } if v.is_integer() => self.fix(&Scalar::Int(v.to_integer())),
            VarDomain::Int { .. } => Err(Contradiction),
            VarDomain::Rat(_) => self.fix(&Scalar::Rat(v.clone())),
            _ => Err(Contradiction),
        }
    }

    pub fn exclude(&mut self, v: &Scalar) -> Step {
        if !self.contains(v) {
            return Ok(false);
        }
        match (&mut *self, v) {
            (VarDomain::Bool { can_false, can_true }, Scalar::Bool(b)) => {
                if *b {
                    *can_true = false
                } else {
                    *can_false = false
                }
            }
            (VarDomain::Int { excluded, .. }, Scalar::Int(i)) => {
                excluded.insert(i.clone());
            }
            (VarDomain::Enum { allowed, .. }, Scalar::Enum(e)) => {
                allowed.remove(&e.index());
            }
            (VarDomain::Rat(RatDomain::Fixed(_)), _) => return Err(Contradiction),
            (VarDomain::Rat(RatDomain::Range { excluded, .. }), Scalar::Rat(r)) => {
                excluded.insert(r.clone());
            }
            _ => return Ok(false),
        }
        self.settle()?;
        Ok(true)
    }

    pub fn exclude_number(&mut self, v: &BigRational) -> Step {
        match self {
            VarDomain::Int { .. } if v.is_integer() => self.exclude(&Scalar::Int(v.to_integer())),
            VarDomain::Rat(_) => self.exclude(&Scalar::Rat(v.clone())),
            _ => Ok(false),
        }
    }

    /// Keeps only enum values in `keep`.
    pub fn restrict_enum(&mut self, keep: &BTreeSet<usize>) -> Step {
        match self {
            VarDomain::Enum { allowed, .. } => {
                let before = allowed.len();
                allowed.retain(|i| keep.contains(i));
                if allowed.is_empty() {
                    Err(Contradiction)
                } else {
                    Ok(allowed.len() != before)
                }
            }
            _ => Ok(false),
        }
    }

    /// Applies `x < value` (strict) or `x ≤ value`.
    pub fn tighten_upper(&mut self, value: &BigRational, strict: bool) -> Step {
        match self {
            VarDomain::Int { hi, .. } => {
                let new = if strict {
                    value.ceil().to_integer() - 1
                } else {
                    value.floor().to_integer()
                };
                if &new >= hi {
                    return Ok(false);
                }
                *hi = new;
                self.settle()?;
                Ok(true)
            }
            VarDomain::Rat(RatDomain::Fixed(v)) => {
                if &*v < value || (!strict && &*v == value) {
                    Ok(false)
                } else {
                    Err(Contradiction)
                }
            }
            VarDomain::Rat(RatDomain::Range { hi, .. }) => {
                let b = Bound {
                    value: value.clone(),
                    strict,
                };
                let better = match hi {
                    None => true,
                    Some(old) => b.value < old.value || (b.value == old.value && strict && !old.strict),
                };
                if !better {
                    return Ok(false);
                }
                *hi = Some(b);
                self.settle()?;
                Ok(true)
            }
            _ => Ok(false),
        }
    }

    /// Applies `x > value` (strict) or `x ≥ value`.
    pub fn tighten_lower(&mut self, value: &BigRational, strict: bool) -> Step {
        match self {
            VarDomain::Int { lo, .. } => {
                let new = if strict {
                    value.floor().to_integer() + 1
                } else {
                    value.ceil().to_integer()
                };
                if &new <= lo {
                    return Ok(false);
                }
                *lo = new;
                self.settle()?;
                Ok(true)
            }
            VarDomain::Rat(RatDomain::Fixed(v)) => {
                if &*v > value || (!strict && &*v == value) {
                    Ok(false)
                } else {
                    Err(Contradiction)
                }
            }
            VarDomain::Rat(RatDomain::Range { lo, .. }) => {
                let b = Bound {
                    value: value.clone(),
                    strict,
                };
                let better = match lo {
                    None => true,
                    Some(old) => b.value > old.value || (b.value == old.value && strict && !old.strict),
                };
                if !better {
                    return Ok(false);
                }
                *lo = Some(b);
                self.settle()?;
                Ok(true)
            }
            _ => Ok(false),
        }
    }

    /// Restores the representation invariants after a change.
    fn settle(&mut self) -> Result<(), Contradiction> {
        match self {
            VarDomain::Bool { can_false, can_true } if !*can_false && !*can_true => Err(Contradiction),
            VarDomain::Int { lo, hi, excluded } => {
                while lo <= hi && excluded.remove(lo) {
                    *lo += 1;
                }
                while lo <= hi && excluded.remove(hi) {
                    *hi -= 1;
                }
                if lo > hi {
                    return Err(Contradiction);
                }
                let (l, h) = (lo.clone(), hi.clone());
                excluded.retain(|v| &l < v && v < &h);
                Ok(())
            }
            VarDomain::Enum { allowed, .. } if allowed.is_empty() => Err(Contradiction),
            VarDomain::Rat(RatDomain::Range { lo, hi, excluded }) => {
                if let (Some(l), Some(h)) = (&*lo, &*hi) {
                    if l.value > h.value || (l.value == h.value && (l.strict || h.strict)) {
                        return Err(Contradiction);
                    }
                    if l.value == h.value {
                        if excluded.contains(&l.value) {
                            return Err(Contradiction);
                        }
                        let v = l.value.clone();
                        *self = VarDomain::Rat(RatDomain::Fixed(v));
                        return Ok(());
                    }
                }
                let (l, h) = (lo.clone(), hi.clone());
                excluded.retain(|v| {
                    l.as_ref().is_none_or(|b| b.value < *v || (!b.strict && b.value == *v))
                        && h.as_ref().is_none_or(|b| *v < b.value || (!b.strict && b.value == *v))
                });
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

fn rat_contains(d: &RatDomain, r: &BigRational) -> bool {
    match d {
        RatDomain::Fixed(v) => v == r,
        RatDomain::Range { lo, hi, excluded } => {
            lo.as_ref().is_none_or(|b| &b.value < r || (!b.strict && &b.value == r))
                && hi.as_ref().is_none_or(|b| r < &b.value || (!b.strict && &b.value == r))
                && !excluded.contains(r)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn int_bounds_and_exclusions() {
        let mut d = VarDomain::full(&DomainSpec::Int { lo: 1, hi: 10 });
        d.tighten_upper(&r(7), false).unwrap();
        d.tighten_lower(&r(3), false).unwrap();
        assert_eq!(d.size(), Some(BigInt::from(5)));
        d.exclude(&Scalar::int(3)).unwrap();
        assert_eq!(d.first(), Some(Scalar::int(4)));
        d.tighten_upper(&BigRational::new(9.into(), 2.into()), true).unwrap();
        assert_eq!(d.fixed(), Some(Scalar::int(4)));
        assert_eq!(d.exclude(&Scalar::int(4)), Err(Contradiction));
    }

    #[test]
    fn every_value_excluded_is_a_contradiction() {
        let mut d = VarDomain::full(&DomainSpec::Int { lo: 1, hi: 3 });
        d.exclude(&Scalar::int(2)).unwrap();
        d.exclude(&Scalar::int(1)).unwrap();
        assert_eq!(d.exclude(&Scalar::int(3)), Err(Contradiction));
    }

    #[test]
    fn rational_ranges_close_to_a_point() {
        let mut d = VarDomain::full(&DomainSpec::Rat);
        d.tighten_lower(&r(2), false).unwrap();
        assert!(!d.is_fixed());
        d.tighten_upper(&r(2), false).unwrap();
        assert_eq!(d.fixed(), Some(Scalar::Rat(r(2))));

        let mut open = VarDomain::full(&DomainSpec::Rat);
        open.tighten_lower(&r(2), true).unwrap();
        assert_eq!(open.tighten_upper(&r(2), false), Err(Contradiction));
    }

    #[test]
    fn non_integer_value_cannot_fix_an_int() {
        let mut d = VarDomain::full(&DomainSpec::Int { lo: 0, hi: 9 });
        assert_eq!(d.fix_number(&BigRational::new(1.into(), 2.into())), Err(Contradiction));
    }
}
