//! Fixpoint domain narrowing.

use std::collections::HashMap;

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use super::domain::VarDomain;
use super::linear::{gaussian_eliminate, Bound, Contradiction, LinearForm};
use super::normalize::{normalize, Atom, ConstraintNF};
use crate::expr::PredicateExpr;
use crate::model::{Heading, Scalar};

/// Largest finite domain an opaque atom may filter by evaluation.
pub const OPAQUE_FILTER_LIMIT: usize = 4096;

/// Rounds after which propagation stops even without a fixpoint; bounds
/// over rationals can otherwise creep forever.
const MAX_ROUNDS: usize = 256;

/// Narrows `domains` under `nf` until nothing changes. Atoms found to be
/// entailed are removed from `nf`; disjunctions with one live branch are
/// replaced by that branch.
pub fn propagate(heading: &Heading, domains: &mut [VarDomain], nf: &mut ConstraintNF) -> Result<(), Contradiction> {
    for _ in 0..MAX_ROUNDS {
        let mut progress = false;
        let mut next = Vec::with_capacity(nf.atoms.len());
        for atom in std::mem::take(&mut nf.atoms) {
            match step(heading, domains, &atom)? {
                Step::Keep { changed } => {
                    progress |= changed;
                    next.push(atom);
                }
                Step::Replace(atoms) => {
                    progress = true;
                    next.extend(atoms);
                }
            }
        }
        nf.atoms = next;
        if !progress {
            progress = eliminate(domains, nf)?;
        }
        if !progress {
            break;
        }
    }
    Ok(())
}

enum Step {
    Keep {
        changed: bool,
    },
    /// Swap the atom for these (possibly none: the atom is entailed).
    Replace(Vec<Atom>),
}

fn step(heading: &Heading, d: &mut [VarDomain], atom: &Atom) -> Result<Step, Contradiction> {
    match atom {
        Atom::BoolLit { attr, value } => {
            d[*attr].fix(&Scalar::Bool(*value))?;
            Ok(Step::Replace(Vec::new()))
        }
        Atom::EnumMembership { attr, allowed } => {
            d[*attr].restrict_enum(allowed)?;
            Ok(Step::Replace(Vec::new()))
        }
        Atom::LinearEq(form) => linear_eq(d, form),
        Atom::LinearIneq { form, strict } => linear_ineq(d, form, *strict),
        Atom::NotEqual(form) => not_equal(d, form),
        Atom::Disjunction(branches) => disjunction(heading, d, branches),
        Atom::Opaque { expr, attrs } => opaque(heading, d, expr, attrs),
    }
}

fn fixed_value(d: &[VarDomain]) -> impl Fn(usize) -> Option<BigRational> + '_ {
    move |i| d[i].fixed_number()
}

/// Bounds of `form` over the current domains.
fn form_range(d: &[VarDomain], form: &LinearForm) -> (Option<Bound>, Option<Bound>) {
    let mut lo = Some(Bound {
        value: form.constant_term().clone(),
        strict: false,
    });
    let mut hi = lo.clone();
    for (i, c) in form.coeffs() {
        let (l, h) = if c.is_positive() {
            (d[*i].lower(), d[*i].upper())
        } else {
            (d[*i].upper(), d[*i].lower())
        };
        lo = add_scaled(lo, l, c);
        hi = add_scaled(hi, h, c);
    }
    (lo, hi)
}

fn add_scaled(acc: Option<Bound>, b: Option<Bound>, c: &BigRational) -> Option<Bound> {
    let (acc, b) = (acc?, b?);
    Some(Bound {
        value: acc.value + &b.value * c,
        strict: acc.strict || b.strict,
    })
}

/// Range of `form` without the term for `skip`.
fn rest_range(d: &[VarDomain], form: &LinearForm, skip: usize) -> (Option<Bound>, Option<Bound>) {
    let mut rest = form.clone();
    rest.add_term(skip, -form.coeff(skip));
    form_range(d, &rest)
}

fn linear_eq(d: &mut [VarDomain], form: &LinearForm) -> Result<Step, Contradiction> {
    let reduced = form.substitute_values(fixed_value(d));
    if reduced.is_constant() {
        return if reduced.constant_term().is_zero() {
            Ok(Step::Replace(Vec::new()))
        } else {
            Err(Contradiction)
        };
    }
    let mut changed = false;
    for (i, c) in reduced.coeffs().clone() {
        // c·x = -rest
        let (rlo, rhi) = rest_range(d, &reduced, i);
        let (lo, hi) = if c.is_positive() { (rhi, rlo) } else { (rlo, rhi) };
        if let Some(b) = lo {
            changed |= d[i].tighten_lower(&(-&b.value / &c), b.strict)?;
        }
        if let Some(b) = hi {
            changed |= d[i].tighten_upper(&(-&b.value / &c), b.strict)?;
        }
    }
    Ok(Step::Keep { changed })
}

fn linear_ineq(d: &mut [VarDomain], form: &LinearForm, strict: bool) -> Result<Step, Contradiction> {
    let (lo, hi) = form_range(d, form);
    let zero = BigRational::zero();
    if let Some(h) = &hi {
        if h.value < zero || (h.value == zero && (h.strict || !strict)) {
            return Ok(Step::Replace(Vec::new()));
        }
    }
    if let Some(l) = &lo {
        if l.value > zero || (l.value == zero && strict && !l.strict) {
            return Err(Contradiction);
        }
    }
    let mut changed = false;
    for (i, c) in form.coeffs().clone() {
        // c·x (<|≤) -rest ≤ -min(rest)
        let (rlo, _) = rest_range(d, form, i);
        let Some(b) = rlo else { continue };
        let bound = -&b.value / &c;
        let s = strict || b.strict;
        changed |= if c.is_positive() {
            d[i].tighten_upper(&bound, s)?
        } else {
            d[i].tighten_lower(&bound, s)?
        };
    }
    Ok(Step::Keep { changed })
}

fn not_equal(d: &mut [VarDomain], form: &LinearForm) -> Result<Step, Contradiction> {
    let reduced = form.substitute_values(fixed_value(d));
    if reduced.is_constant() {
        return if reduced.constant_term().is_zero() {
            Err(Contradiction)
        } else {
            Ok(Step::Replace(Vec::new()))
        };
    }
    let (lo, hi) = form_range(d, &reduced);
    let zero = BigRational::zero();
    let positive = lo.is_some_and(|l| l.value > zero || (l.value == zero && l.strict));
    let negative = hi.is_some_and(|h| h.value < zero || (h.value == zero && h.strict));
    if positive || negative {
        return Ok(Step::Replace(Vec::new()));
    }
    if reduced.coeffs().len() == 1 {
        let (i, c) = reduced.coeffs().iter().next().expect("one coefficient");
        let value = -reduced.constant_term() / c;
        d[*i].exclude_number(&value)?;
        return Ok(Step::Replace(Vec::new()));
    }
    Ok(Step::Keep { changed: false })
}

fn disjunction(heading: &Heading, d: &mut [VarDomain], branches: &[ConstraintNF]) -> Result<Step, Contradiction> {
    let mut live = Vec::new();
    for b in branches {
        let mut trial = d.to_vec();
        let mut nf = b.clone();
        if propagate(heading, &mut trial, &mut nf).is_err() {
            continue;
        }
        if nf.atoms.is_empty() && trial.as_slice() == &*d {
            return Ok(Step::Replace(Vec::new()));
        }
        live.push(b.clone());
    }
    match live.len() {
        0 => Err(Contradiction),
        1 => Ok(Step::Replace(live.pop().expect("one branch").atoms)),
        n if n < branches.len() => Ok(Step::Replace(vec![Atom::Disjunction(live)])),
        _ => Ok(Step::Keep { changed: false }),
    }
}

fn opaque(
    heading: &Heading,
    d: &mut [VarDomain],
    expr: &PredicateExpr,
    attrs: &std::collections::BTreeSet<usize>,
) -> Result<Step, Contradiction> {
    let names: Vec<&str> = heading.names().collect();
    let mut env: HashMap<String, Scalar> = HashMap::new();
    let mut unfixed = Vec::new();
    for &i in attrs {
        match d[i].fixed() {
            Some(v) => {
                env.insert(names[i].to_string(), v);
            }
            None => unfixed.push(i),
        }
    }
    if unfixed.is_empty() {
        return if expr.holds(&env) {
            Ok(Step::Replace(Vec::new()))
        } else {
            Err(Contradiction)
        };
    }
    if env.is_empty() && unfixed.len() > 1 {
        return Ok(Step::Keep { changed: false });
    }
    let substituted = expr.substitute(&env);
    let renormalized = normalize(&substituted, heading);
    if !renormalized.atoms.iter().any(|a| matches!(a, Atom::Opaque { .. })) {
        return Ok(Step::Replace(renormalized.atoms));
    }
    if let [only] = unfixed[..] {
        if let Some(values) = d[only].values(OPAQUE_FILTER_LIMIT) {
            let name = names[only].to_string();
            for v in values {
                env.insert(name.clone(), v.clone());
                if !expr.holds(&env) {
                    d[only].exclude(&v)?;
                }
            }
            return Ok(Step::Replace(Vec::new()));
        }
    }
    Ok(Step::Keep { changed: false })
}

/// Gaussian elimination over the equations; fixes every variable the
/// system determines.
fn eliminate(d: &mut [VarDomain], nf: &ConstraintNF) -> Result<bool, Contradiction> {
    let eqs: Vec<LinearForm> = nf
        .atoms
        .iter()
        .filter_map(|a| match a {
            Atom::LinearEq(f) => Some(f.substitute_values(fixed_value(d))),
            _ => None,
        })
        .collect();
    if eqs.len() < 2 {
        return Ok(false);
    }
    let out = gaussian_eliminate(&eqs)?;
    let mut changed = false;
    for (i, v) in out.assignments {
        changed |= d[i].fix_number(&v)?;
    }
    Ok(changed)
}

/// Size of the smallest unfixed finite domain, with its index.
pub fn first_fail(d: &[VarDomain]) -> Option<usize> {
    d.iter()
        .enumerate()
        .filter(|(_, v)| v.is_finite() && !v.is_fixed())
        .min_by_key(|(i, v)| (v.size().and_then(|s| s.to_u128()).unwrap_or(u128::MAX), *i))
        .map(|(i, _)| i)
}
