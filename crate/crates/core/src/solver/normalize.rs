//! Compilation of predicates into a conjunction of solver atoms, in
//! negation normal form.

use std::collections::{BTreeSet, HashMap};

use num_rational::BigRational;
use num_traits::Zero;

use super::linear::LinearForm;
use crate::expr::PredicateExpr;
use crate::lang::ast::BinaryOp;
use crate::model::{DomainSpec, Heading, Scalar};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Atom {
    /// `form = 0`
    LinearEq(LinearForm),
    /// `form < 0` when strict, else `form ≤ 0`.
    LinearIneq {
        form: LinearForm,
        strict: bool,
    },
    /// `form ≠ 0`
    NotEqual(LinearForm),
    BoolLit {
        attr: usize,
        value: bool,
    },
    EnumMembership {
        attr: usize,
        allowed: BTreeSet<usize>,
    },
    /// At least one branch holds. No branches means false.
    Disjunction(Vec<ConstraintNF>),
    /// Anything non-linear; evaluated once enough attributes are known.
    Opaque {
        expr: PredicateExpr,
        attrs: BTreeSet<usize>,
    },
}

/// Conjunction of atoms. No atoms means true.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ConstraintNF {
    pub atoms: Vec<Atom>,
}

impl ConstraintNF {
    pub fn truth() -> Self {
        ConstraintNF::default()
    }

    pub fn falsity() -> Self {
        ConstraintNF {
            atoms: vec![Atom::Disjunction(Vec::new())],
        }
    }

    pub fn is_false(&self) -> bool {
        self.atoms
            .iter()
            .any(|a| matches!(a, Atom::Disjunction(b) if b.is_empty()))
    }

    fn and(mut self, other: ConstraintNF) -> Self {
        self.atoms.extend(other.atoms);
        self
    }

    /// Builds `b1 ∨ b2 ∨ …`, dropping false branches and collapsing
    /// trivial cases.
    pub fn any(branches: Vec<ConstraintNF>) -> Self {
        let mut live: Vec<ConstraintNF> = branches.into_iter().filter(|b| !b.is_false()).collect();
        if live.iter().any(|b| b.atoms.is_empty()) {
            return ConstraintNF::truth();
        }
        match live.len() {
            0 => ConstraintNF::falsity(),
            1 => live.pop().expect("one branch"),
            _ => ConstraintNF {
                atoms: vec![Atom::Disjunction(live)],
            },
        }
    }

    /// Exact truth value under a total assignment.
    pub fn holds(&self, values: &[Scalar], heading: &Heading) -> bool {
        self.atoms.iter().all(|a| a.holds(values, heading))
    }
}

impl Atom {
    /// Attributes the atom mentions.
    pub fn vars(&self) -> BTreeSet<usize> {
        match self {
            Atom::LinearEq(f) | Atom::NotEqual(f) | Atom::LinearIneq { form: f, .. } => f.vars().collect(),
            Atom::BoolLit { attr, .. } | Atom::EnumMembership { attr, .. } => [*attr].into(),
            Atom::Opaque { attrs, .. } => attrs.clone(),
            Atom::Disjunction(bs) => bs.iter().flat_map(|b| b.atoms.iter().flat_map(Atom::vars)).collect(),
        }
    }

    pub fn holds(&self, values: &[Scalar], heading: &Heading) -> bool {
        let num = |i: usize| values.get(i).and_then(Scalar::as_rational);
        match self {
            Atom::LinearEq(f) => f.eval(num).is_some_and(|v| v.is_zero()),
            Atom::NotEqual(f) => f.eval(num).is_some_and(|v| !v.is_zero()),
            Atom::LinearIneq { form, strict } => form.eval(num).is_some_and(|v| {
                if *strict {
                    v < BigRational::zero()
                } else {
                    v <= BigRational::zero()
                }
            }),
            Atom::BoolLit { attr, value } => values.get(*attr) == Some(&Scalar::Bool(*value)),
            Atom::EnumMembership { attr, allowed } => {
                matches!(values.get(*attr), Some(Scalar::Enum(e)) if allowed.contains(&e.index()))
            }
            Atom::Disjunction(bs) => bs.iter().any(|b| b.holds(values, heading)),
            Atom::Opaque { expr, .. } => {
                let env: HashMap<String, Scalar> = heading
                    .names()
                    .map(str::to_string)
                    .zip(values.iter().cloned())
                    .collect();
                expr.holds(&env)
            }
        }
    }
}

/// Compiles a boolean predicate over `heading`.
pub fn normalize(p: &PredicateExpr, heading: &Heading) -> ConstraintNF {
    nnf(p, false, heading)
}

fn nnf(e: &PredicateExpr, negated: bool, h: &Heading) -> ConstraintNF {
    match e {
        PredicateExpr::Const(Scalar::Bool(b)) => {
            if *b != negated {
                ConstraintNF::truth()
            } else {
                ConstraintNF::falsity()
            }
        }
        PredicateExpr::Attr(a) => match h.index_of(a) {
            Some(attr) => ConstraintNF {
                atoms: vec![Atom::BoolLit { attr, value: !negated }],
            },
            None => ConstraintNF::falsity(),
        },
        PredicateExpr::Not(inner) => nnf(inner, !negated, h),
        PredicateExpr::Binary(op, l, r) => match op {
            BinaryOp::And if !negated => nnf(l, false, h).and(nnf(r, false, h)),
            BinaryOp::And => ConstraintNF::any(vec![nnf(l, true, h), nnf(r, true, h)]),
            BinaryOp::Or if !negated => ConstraintNF::any(vec![nnf(l, false, h), nnf(r, false, h)]),
            BinaryOp::Or => nnf(l, true, h).and(nnf(r, true, h)),
            BinaryOp::Implies if !negated => ConstraintNF::any(vec![nnf(l, true, h), nnf(r, false, h)]),
            BinaryOp::Implies => nnf(l, false, h).and(nnf(r, true, h)),
            op if op.is_comparison() => {
                let op = if negated {
                    op.negated_comparison().expect("comparison")
                } else {
                    *op
                };
                comparison(op, l, r, h)
            }
            _ => opaque(e, negated, h),
        },
        _ => opaque(e, negated, h),
    }
}

fn opaque(e: &PredicateExpr, negated: bool, h: &Heading) -> ConstraintNF {
    let expr = if negated {
        PredicateExpr::negation(e.clone())
    } else {
        e.clone()
    };
    let attrs: BTreeSet<usize> = expr.attrs().iter().filter_map(|a| h.index_of(a)).collect();
    if attrs.is_empty() {
        let empty: HashMap<String, Scalar> = HashMap::new();
        return if expr.holds(&empty) {
            ConstraintNF::truth()
        } else {
            ConstraintNF::falsity()
        };
    }
    ConstraintNF {
        atoms: vec![Atom::Opaque { expr, attrs }],
    }
}

fn is_bool(e: &PredicateExpr, h: &Heading) -> bool {
    match e {
        PredicateExpr::Const(Scalar::Bool(_)) | PredicateExpr::Not(_) => true,
        PredicateExpr::Attr(a) => matches!(h.get(a).map(|a| &a.domain), Some(DomainSpec::Bool)),
        PredicateExpr::Binary(op, _, _) => op.is_comparison() || op.is_logical(),
        _ => false,
    }
}

fn comparison(op: BinaryOp, l: &PredicateExpr, r: &PredicateExpr, h: &Heading) -> ConstraintNF {
    let cmp = PredicateExpr::binary(op, l.clone(), r.clone());
    if is_bool(l, h) || is_bool(r, h) {
        // a = b  ≡  (a ∧ b) ∨ (¬a ∧ ¬b);  a ≠ b  ≡  (a ∧ ¬b) ∨ (¬a ∧ b)
        let flip = op == BinaryOp::Ne;
        return match op {
            BinaryOp::Eq | BinaryOp::Ne => ConstraintNF::any(vec![
                nnf(l, false, h).and(nnf(r, flip, h)),
                nnf(l, true, h).and(nnf(r, !flip, h)),
            ]),
            _ => opaque(&cmp, false, h),
        };
    }
    if let Some(atoms) = enum_membership(op, l, r, h) {
        return atoms;
    }
    match (linearize(l, h), linearize(r, h)) {
        (Some(a), Some(b)) => {
            let form = a.sub(&b);
            if form.is_constant() {
                let v = form.constant_term();
                let zero = BigRational::zero();
                let truth = match op {
                    BinaryOp::Eq => v.is_zero(),
                    BinaryOp::Ne => !v.is_zero(),
                    BinaryOp::Lt => *v < zero,
                    BinaryOp::Le => *v <= zero,
                    BinaryOp::Gt => *v > zero,
                    _ => *v >= zero,
                };
                return if truth {
                    ConstraintNF::truth()
                } else {
                    ConstraintNF::falsity()
                };
            }
            let atom = match op {
                BinaryOp::Eq => Atom::LinearEq(form.scaled_canonical()),
                BinaryOp::Ne => Atom::NotEqual(form.scaled_canonical()),
                BinaryOp::Lt => Atom::LinearIneq {
                    form: form.scaled_positive(),
                    strict: true,
                },
                BinaryOp::Le => Atom::LinearIneq {
                    form: form.scaled_positive(),
                    strict: false,
                },
                BinaryOp::Gt => Atom::LinearIneq {
                    form: form.negate().scaled_positive(),
                    strict: true,
                },
                _ => Atom::LinearIneq {
                    form: form.negate().scaled_positive(),
                    strict: false,
                },
            };
            ConstraintNF { atoms: vec![atom] }
        }
        _ => opaque(&cmp, false, h),
    }
}

fn enum_membership(op: BinaryOp, l: &PredicateExpr, r: &PredicateExpr, h: &Heading) -> Option<ConstraintNF> {
    let (attr, value) = match (l, r) {
        (PredicateExpr::Attr(a), PredicateExpr::Const(Scalar::Enum(v)))
        | (PredicateExpr::Const(Scalar::Enum(v)), PredicateExpr::Attr(a)) => (h.index_of(a)?, v),
        _ => return None,
    };
    let DomainSpec::Enum(ty) = &h.attrs()[attr].domain else {
        return None;
    };
    let allowed: BTreeSet<usize> = match op {
        BinaryOp::Eq => [value.index()].into(),
        BinaryOp::Ne => (0..ty.values().len()).filter(|i| *i != value.index()).collect(),
        _ => return None,
    };
    Some(ConstraintNF {
        atoms: vec![Atom::EnumMembership { attr, allowed }],
    })
}

/// Linear form of a numeric expression, if it is linear.
pub fn linearize(e: &PredicateExpr, h: &Heading) -> Option<LinearForm> {
    match e {
        PredicateExpr::Const(s) => match s {
            Scalar::Int(_) | Scalar::Rat(_) => Some(LinearForm::constant(s.as_rational()?)),
            _ => None,
        },
        PredicateExpr::Attr(a) => {
            let i = h.index_of(a)?;
            h.attrs()[i].domain.is_numeric().then(|| LinearForm::var(i))
        }
        PredicateExpr::Neg(x) => Some(linearize(x, h)?.negate()),
        PredicateExpr::Binary(op, l, r) => {
            let (a, b) = (linearize(l, h)?, linearize(r, h)?);
            match op {
                BinaryOp::Add => Some(a.add(&b)),
                BinaryOp::Sub => Some(a.sub(&b)),
                BinaryOp::Mul if a.is_constant() => Some(b.scale(a.constant_term())),
                BinaryOp::Mul if b.is_constant() => Some(a.scale(b.constant_term())),
                BinaryOp::Div if b.is_constant() && !b.constant_term().is_zero() => {
                    Some(a.scale(&(BigRational::from_integer(1.into()) / b.constant_term())))
                }
                _ => None,
            }
        }
        PredicateExpr::Not(_) => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Scope;
    use crate::lang::parse_expr;
    use crate::model::Attribute;

    fn nf(h: &Heading, text: &str) -> ConstraintNF {
        let p = Scope::new(None, h).bind_predicate(&parse_expr(text).unwrap()).unwrap();
        normalize(&p, h)
    }

    fn r(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn gst_rule_is_a_linear_equation() {
        let h = Heading::new(vec![
            Attribute::new("Price", DomainSpec::Rat),
            Attribute::new("ExGSTAmount", DomainSpec::Rat),
            Attribute::new("GSTAmount", DomainSpec::Rat),
        ])
        .unwrap();
        let out = nf(&h, "GSTAmount = Price/11");
        assert_eq!(
            out.atoms,
            vec![Atom::LinearEq(LinearForm::from_parts([(0, r(1)), (2, r(-11))], r(0)))]
        );
    }

    #[test]
    fn double_negation_and_implication() {
        let h = Heading::new(vec![
            Attribute::new("x", DomainSpec::Bool),
            Attribute::new("a", DomainSpec::Bool),
            Attribute::new("b", DomainSpec::Bool),
            Attribute::new("c", DomainSpec::Bool),
        ])
        .unwrap();
        assert_eq!(nf(&h, "NOT NOT x").atoms, vec![Atom::BoolLit { attr: 0, value: true }]);
        let imp = nf(&h, "a -> (b AND c)");
        let Atom::Disjunction(bs) = &imp.atoms[0] else {
            panic!("expected a disjunction, got {imp:?}");
        };
        assert_eq!(bs[0].atoms, vec![Atom::BoolLit { attr: 1, value: false }]);
        assert_eq!(bs[1].atoms.len(), 2);
    }

    #[test]
    fn products_of_attributes_are_opaque() {
        let h = Heading::new(vec![
            Attribute::new("x", DomainSpec::int(0, 3).unwrap()),
            Attribute::new("y", DomainSpec::int(0, 3).unwrap()),
        ])
        .unwrap();
        assert!(matches!(nf(&h, "x * y = 2").atoms[0], Atom::Opaque { .. }));
        assert!(matches!(nf(&h, "2 * y <= x").atoms[0], Atom::LinearIneq { .. }));
        assert!(nf(&h, "1 > 2").is_false());
    }
}
