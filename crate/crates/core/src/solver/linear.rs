//! Exact linear algebra over rationals: linear forms, Gaussian
//! elimination and Fourier–Motzkin projection.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// `Σ coeffs[i]·x_i + constant`. Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct LinearForm {
    coeffs: BTreeMap<usize, BigRational>,
    constant: BigRational,
}

impl LinearForm {
    pub fn zero() -> Self {
        LinearForm::default()
    }

    pub fn constant(c: BigRational) -> Self {
        LinearForm {
            coeffs: BTreeMap::new(),
            constant: c,
        }
    }

    pub fn var(i: usize) -> Self {
        Self::term(i, BigRational::one())
    }

    pub fn term(i: usize, c: BigRational) -> Self {
        let mut f = LinearForm::zero();
        f.add_term(i, c);
        f
    }

    pub fn from_parts(coeffs: impl IntoIterator<Item = (usize, BigRational)>, constant: BigRational) -> Self {
        let mut f = LinearForm::constant(constant);
        for (i, c) in coeffs {
            f.add_term(i, c);
        }
        f
    }

    pub fn add_term(&mut self, i: usize, c: BigRational) {
        let entry = self.coeffs.entry(i).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.coeffs.remove(&i);
        }
    }

    pub fn coeffs(&self) -> &BTreeMap<usize, BigRational> {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigRational {
        self.coeffs.get(&i).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn constant_term(&self) -> &BigRational {
        &self.constant
    }

    pub fn vars(&self) -> impl Iterator<Item = usize> + '_ {
        self.coeffs.keys().copied()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, other: &LinearForm) -> LinearForm {
        let mut out = self.clone();
        for (i, c) in &other.coeffs {
            out.add_term(*i, c.clone());
        }
        out.constant += &other.constant;
        out
    }

    pub fn sub(&self, other: &LinearForm) -> LinearForm {
        self.add(&other.scale(&-BigRational::one()))
    }

    pub fn scale(&self, k: &BigRational) -> LinearForm {
        if k.is_zero() {
            return LinearForm::zero();
        }
        LinearForm {
            coeffs: self.coeffs.iter().map(|(i, c)| (*i, c * k)).collect(),
            constant: &self.constant * k,
        }
    }

    pub fn negate(&self) -> LinearForm {
        self.scale(&-BigRational::one())
    }

    /// Replaces `x_i` by `with`.
    pub fn substitute(&self, i: usize, with: &LinearForm) -> LinearForm {
        match self.coeffs.get(&i) {
            None => self.clone(),
            Some(c) => {
                let mut rest = self.clone();
                rest.coeffs.remove(&i);
                rest.add(&with.scale(c))
            }
        }
    }

    /// Substitutes every variable for which `value` has an answer.
    pub fn substitute_values(&self, value: impl Fn(usize) -> Option<BigRational>) -> LinearForm {
        let mut out = LinearForm::constant(self.constant.clone());
        for (i, c) in &self.coeffs {
            match value(*i) {
                Some(v) => out.constant += c * v,
                None => out.add_term(*i, c.clone()),
            }
        }
        out
    }

    /// Value under a total assignment, or `None` when a variable is missing.
    pub fn eval(&self, value: impl Fn(usize) -> Option<BigRational>) -> Option<BigRational> {
        let mut acc = self.constant.clone();
        for (i, c) in &self.coeffs {
            acc += c * value(*i)?;
        }
        Some(acc)
    }

    /// Positive multiple with coprime integer coefficients and constant.
    pub fn scaled_positive(&self) -> LinearForm {
        let mut lcm = BigInt::one();
        let mut gcd = BigInt::zero();
        for c in self.coeffs.values().chain(std::iter::once(&self.constant)) {
            lcm = lcm.lcm(c.denom());
        }
        for c in self.coeffs.values().chain(std::iter::once(&self.constant)) {
            gcd = gcd.gcd(&(c.numer() * (&lcm / c.denom())));
        }
        if gcd.is_zero() {
            return self.clone();
        }
        self.scale(&BigRational::new(lcm, gcd))
    }

    /// Like `scaled_positive`, then flipped so the first coefficient is
    /// positive. Suitable for `= 0` and `≠ 0`.
    pub fn scaled_canonical(&self) -> LinearForm {
        let f = self.scaled_positive();
        match f.coeffs.values().next() {
            Some(c) if c.is_negative() => f.negate(),
            _ => f,
        }
    }
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in &self.coeffs {
            let (sign, mag) = if c.is_negative() { ("-", -c) } else { ("+", c.clone()) };
            if first {
                if sign == "-" {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            if mag.is_one() {
                write!(f, "x{i}")?;
            } else {
                write!(f, "{mag}·x{i}")?;
            }
            first = false;
        }
        if first {
            write!(f, "{}", self.constant)
        } else if self.constant.is_zero() {
            Ok(())
        } else if self.constant.is_negative() {
            write!(f, " - {}", -&self.constant)
        } else {
            write!(f, " + {}", self.constant)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Contradiction;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Elimination {
    /// Variables whose value the system determines.
    pub assignments: Vec<(usize, BigRational)>,
    /// Remaining rows in reduced row echelon form, each `form = 0`.
    pub reduced: Vec<LinearForm>,
}

/// Row-reduces the system `eqs[k] = 0`. Fixed variables should already
/// be substituted.
pub fn gaussian_eliminate(eqs: &[LinearForm]) -> Result<Elimination, Contradiction> {
    let mut rows: Vec<LinearForm> = eqs.to_vec();
    let vars: BTreeSet<usize> = rows.iter().flat_map(|r| r.vars().collect::<Vec<_>>()).collect();
    let mut pivot_row = 0;
    let mut pivots = Vec::new();
    for v in vars {
        let Some(found) = (pivot_row..rows.len()).find(|&r| !rows[r].coeff(v).is_zero()) else {
            continue;
        };
        rows.swap(pivot_row, found);
        let inv = BigRational::one() / rows[pivot_row].coeff(v);
        rows[pivot_row] = rows[pivot_row].scale(&inv);
        let pivot = rows[pivot_row].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != pivot_row {
                let c = row.coeff(v);
                if !c.is_zero() {
                    *row = row.sub(&pivot.scale(&c));
                }
            }
        }
        pivots.push(v);
        pivot_row += 1;
    }
    let mut out = Elimination::default();
    for row in rows {
        if row.is_constant() {
            if !row.constant_term().is_zero() {
                return Err(Contradiction);
            }
            continue;
        }
        if row.coeffs().len() == 1 {
            let (v, c) = row.coeffs().iter().next().expect("one coefficient");
            out.assignments.push((*v, -row.constant_term() / c));
        } else {
            out.reduced.push(row);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Relation {
    Eq,
    Lt,
    Le,
}

/// A system of `form (= | < | ≤) 0` constraints.
#[derive(Debug, Clone, Default)]
pub struct Polyhedron {
    eqs: Vec<LinearForm>,
    ineqs: BTreeSet<(LinearForm, bool)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bound {
    pub value: BigRational,
    pub strict: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Range {
    pub lo: Option<Bound>,
    pub hi: Option<Bound>,
}

impl Range {
    pub fn is_point(&self) -> bool {
        matches!((&self.lo, &self.hi), (Some(l), Some(h)) if l.value == h.value)
    }
}

/// Fourier–Motzkin gave up because the system grew past this many rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TooLarge;

pub const MAX_FM_ROWS: usize = 20_000;

impl Polyhedron {
    pub fn new() -> Self {
        Polyhedron::default()
    }

    pub fn add(&mut self, form: LinearForm, rel: Relation) {
        match rel {
            Relation::Eq => self.eqs.push(form),
            Relation::Lt => {
                self.ineqs.insert((form.scaled_positive(), true));
            }
            Relation::Le => {
                self.ineqs.insert((form.scaled_positive(), false));
            }
        }
    }

    /// Whether some point satisfies every constraint.
    pub fn feasible(&self) -> Result<bool, TooLarge> {
        Ok(self.eliminate_all_but(None)?.is_some())
    }

    /// Range of `target` over the polyhedron, or `None` if it is empty.
    pub fn range_of(&self, target: &LinearForm) -> Result<Option<Range>, TooLarge> {
        let t = self.fresh_var().max(target.vars().last().map_or(0, |m| m + 1));
        let mut sys = self.clone();
        sys.eqs.push(LinearForm::var(t).sub(target));
        let Some(rows) = sys.eliminate_all_but(Some(t))? else {
            return Ok(None);
        };
        let mut range = Range { lo: None, hi: None };
        for (form, strict) in rows {
            let c = form.coeff(t);
            if c.is_zero() {
                continue;
            }
            // c·t + k (<|≤) 0
            let value = -form.constant_term() / &c;
            let b = Bound { value, strict };
            if c.is_positive() {
                if range.hi.as_ref().is_none_or(|h| tighter_hi(&b, h)) {
                    range.hi = Some(b);
                }
            } else if range.lo.as_ref().is_none_or(|l| tighter_lo(&b, l)) {
                range.lo = Some(b);
            }
        }
        Ok(Some(range))
    }

    fn fresh_var(&self) -> usize {
        self.eqs
            .iter()
            .chain(self.ineqs.iter().map(|(f, _)| f))
            .flat_map(|f| f.vars().last())
            .max()
            .map_or(0, |m| m + 1)
    }

    /// Eliminates every variable except `keep`. Returns the remaining
    /// inequalities over `keep`, or `None` if the system is infeasible.
    fn eliminate_all_but(&self, keep: Option<usize>) -> Result<Option<Vec<(LinearForm, bool)>>, TooLarge> {
        let mut eqs = self.eqs.clone();
        let mut ineqs: BTreeSet<(LinearForm, bool)> = self.ineqs.clone();
        // Equalities first: each one removes a variable by substitution.
        while let Some(eq) = eqs.pop() {
            let pick = eq.vars().find(|v| Some(*v) != keep).or_else(|| eq.vars().next());
            let Some(v) = pick else {
                if !eq.constant_term().is_zero() {
                    return Ok(None);
                }
                continue;
            };
            if Some(v) == keep {
                // Only `keep` is left: the equation pins it.
                ineqs.insert((eq.scaled_positive(), false));
                ineqs.insert((eq.negate().scaled_positive(), false));
                continue;
            }
            let c = eq.coeff(v);
            let mut rest = eq.clone();
            rest.add_term(v, -c.clone());
            let with = rest.scale(&(-BigRational::one() / c));
            for e in eqs.iter_mut() {
                *e = e.substitute(v, &with);
            }
            ineqs = ineqs
                .into_iter()
                .map(|(f, s)| (f.substitute(v, &with).scaled_positive(), s))
                .collect();
        }
        loop {
            let mut trivial = Vec::new();
            for (f, s) in &ineqs {
                if f.is_constant() {
                    let k = f.constant_term();
                    if k.is_positive() || (*s && k.is_zero()) {
                        return Ok(None);
                    }
                    trivial.push((f.clone(), *s));
                }
            }
            for t in trivial {
                ineqs.remove(&t);
            }
            let vars: BTreeSet<usize> = ineqs
                .iter()
                .flat_map(|(f, _)| f.vars().collect::<Vec<_>>())
                .filter(|v| Some(*v) != keep)
                .collect();
            // Cheapest variable: fewest generated rows.
            let Some(v) = vars.into_iter().min_by_key(|v| {
                let (p, n) = ineqs.iter().fold((0usize, 0usize), |(p, n), (f, _)| {
                    let c = f.coeff(*v);
                    (p + c.is_positive() as usize, n + c.is_negative() as usize)
                });
                p * n
            }) else {
                return Ok(Some(ineqs.into_iter().collect()));
            };
            let (mut pos, mut neg, mut rest) = (Vec::new(), Vec::new(), BTreeSet::new());
            for (f, s) in ineqs {
                let c = f.coeff(v);
                if c.is_positive() {
                    pos.push((f, s));
                } else if c.is_negative() {
                    neg.push((f, s));
                } else {
                    rest.insert((f, s));
                }
            }
            for (p, ps) in &pos {
                for (n, ns) in &neg {
                    let a = p.coeff(v);
                    let b = -n.coeff(v);
                    let combined = p.scale(&b).add(&n.scale(&a));
                    rest.insert((combined.scaled_positive(), *ps || *ns));
                }
                if rest.len() > MAX_FM_ROWS {
                    return Err(TooLarge);
                }
            }
            ineqs = rest;
        }
    }
}

fn tighter_hi(new: &Bound, old: &Bound) -> bool {
    new.value < old.value || (new.value == old.value && new.strict && !old.strict)
}

fn tighter_lo(new: &Bound, old: &Bound) -> bool {
    new.value > old.value || (new.value == old.value && new.strict && !old.strict)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    fn form(coeffs: &[(usize, i64)], k: i64) -> LinearForm {
        LinearForm::from_parts(coeffs.iter().map(|(i, c)| (*i, r(*c))), r(k))
    }

    #[test]
    fn canonical_scaling() {
        // GSTAmount - Price/11 = 0 becomes Price - 11·GSTAmount = 0
        let f = LinearForm::from_parts([(0, BigRational::new((-1).into(), 11.into())), (2, r(1))], r(0));
        assert_eq!(f.scaled_canonical(), form(&[(0, 1), (2, -11)], 0));
        let g = form(&[(0, -2), (1, 4)], 6);
        assert_eq!(g.scaled_positive(), form(&[(0, -1), (1, 2)], 3));
        assert_eq!(g.scaled_canonical(), form(&[(0, 1), (1, -2)], -3));
    }

    #[test]
    fn elimination_of_consistent_overdetermined_system() {
        let eqs = [
            form(&[(0, 1), (1, 1)], -3),
            form(&[(0, 1), (1, -1)], -1),
            form(&[(0, 1), (1, 2)], -4),
        ];
        let out = gaussian_eliminate(&eqs).unwrap();
        assert_eq!(out.assignments, vec![(0, r(2)), (1, r(1))]);
        assert!(out.reduced.is_empty());
    }

    #[test]
    fn elimination_of_empty_and_inconsistent_systems() {
        assert_eq!(gaussian_eliminate(&[]).unwrap(), Elimination::default());
        let eqs = [form(&[(0, 1), (1, 1)], -3), form(&[(0, 1), (1, 1)], -4)];
        assert_eq!(gaussian_eliminate(&eqs), Err(Contradiction));
    }

    #[test]
    fn gst_with_one_amount_fixed() {
        // Price - 11·GST = 0 and 100 - Price + GST = 0
        let eqs = [form(&[(0, 1), (2, -11)], 0), form(&[(0, -1), (2, 1)], 100)];
        let out = gaussian_eliminate(&eqs).unwrap();
        assert_eq!(out.assignments, vec![(0, r(110)), (2, r(10))]);
    }

    #[test]
    fn underdetermined_rows_are_returned() {
        let out = gaussian_eliminate(&[form(&[(0, 1), (1, -1), (2, 1)], 0)]).unwrap();
        assert!(out.assignments.is_empty());
        assert_eq!(out.reduced.len(), 1);
    }

    #[test]
    fn projection_ranges() {
        let mut p = Polyhedron::new();
        // 0 ≤ x, x < y, y ≤ 4
        p.add(form(&[(0, -1)], 0), Relation::Le);
        p.add(form(&[(0, 1), (1, -1)], 0), Relation::Lt);
        p.add(form(&[(1, 1)], -4), Relation::Le);
        let x = p.range_of(&LinearForm::var(0)).unwrap().unwrap();
        assert_eq!(
            x.lo,
            Some(Bound {
                value: r(0),
                strict: false
            })
        );
        assert_eq!(
            x.hi,
            Some(Bound {
                value: r(4),
                strict: true
            })
        );
        p.add(form(&[(1, 1)], 0), Relation::Le);
        assert!(!p.feasible().unwrap());
    }

    #[test]
    fn equalities_pin_a_point() {
        let mut p = Polyhedron::new();
        p.add(form(&[(0, 1), (1, 1)], -3), Relation::Eq);
        p.add(form(&[(0, 1), (1, -1)], -1), Relation::Eq);
        let x = p.range_of(&LinearForm::var(0)).unwrap().unwrap();
        assert!(x.is_point());
        assert_eq!(x.lo.unwrap().value, r(2));
        let free = Polyhedron::new().range_of(&LinearForm::var(0)).unwrap().unwrap();
        assert_eq!(free, Range { lo: None, hi: None });
    }
}
