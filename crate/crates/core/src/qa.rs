//! Interactive narrowing of a finite extension by asking for attribute
//! values, most informative question first.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{Error, Result};
use crate::exec::execute;
use crate::lang::ast::{SelectQuery, Source};
use crate::model::{Catalog, Heading, ModelError, Scalar, Tuple};
use crate::plan::{lower_query, optimize};
use crate::solver::SolveBudget;

static NEXT_ID: AtomicU64 = AtomicU64::new(1);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Session {
    id: u64,
    relation: String,
    heading: Heading,
    full_extension: BTreeSet<Tuple>,
    answers: Vec<(usize, Scalar)>,
    remaining: BTreeSet<Tuple>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuestionOption {
    pub value: Scalar,
    /// Alternatives left if this value is the answer.
    pub would_remain: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Next {
    Done {
        remaining: Vec<Tuple>,
    },
    Question {
        attribute: String,
        options: Vec<QuestionOption>,
    },
}

/// Materializes the extension of `relation` and opens a session over it.
pub fn start_session(catalog: &Catalog, relation: &str, budget: &SolveBudget) -> Result<Session> {
    let plan = optimize(&lower_query(
        &SelectQuery::star(Source::Named(relation.to_string())),
        catalog,
    )?)?;
    let result = execute(&plan, catalog, budget)?;
    if result.tuples.is_empty() {
        return Err(Error::EmptyRelation(relation.to_string()));
    }
    Ok(Session {
        id: NEXT_ID.fetch_add(1, Ordering::Relaxed),
        relation: relation.to_string(),
        heading: result.heading,
        remaining: result.tuples.clone(),
        full_extension: result.tuples,
        answers: Vec::new(),
    })
}

impl Session {
    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn relation(&self) -> &str {
        &self.relation
    }

    pub fn heading(&self) -> &Heading {
        &self.heading
    }

    pub fn full_extension(&self) -> &BTreeSet<Tuple> {
        &self.full_extension
    }

    pub fn remaining(&self) -> &BTreeSet<Tuple> {
        &self.remaining
    }

    /// Answers in the order given.
    pub fn answers(&self) -> Vec<(&str, &Scalar)> {
        self.answers
            .iter()
            .map(|(i, v)| (self.heading.attrs()[*i].name.as_str(), v))
            .collect()
    }

    fn partition(&self, attr: usize) -> BTreeMap<&Scalar, usize> {
        let mut counts = BTreeMap::new();
        for t in &self.remaining {
            *counts.entry(&t.values()[attr]).or_insert(0) += 1;
        }
        counts
    }

    fn answered(&self, attr: usize) -> bool {
        self.answers.iter().any(|(i, _)| *i == attr)
    }

    /// Unanswered attributes that take a single value across the remaining
    /// alternatives.
    pub fn determined(&self) -> Vec<(&str, Scalar)> {
        (0..self.heading.arity())
            .filter(|i| !self.answered(*i))
            .filter_map(|i| {
                let p = self.partition(i);
                let only = (p.len() == 1).then(|| p.keys().next().copied()).flatten()?;
                Some((self.heading.attrs()[i].name.as_str(), only.clone()))
            })
            .collect()
    }

    /// Σ count² over the partition of the remaining alternatives by each
    /// askable attribute, in heading order.
    pub fn scores(&self) -> Vec<(&str, usize)> {
        (0..self.heading.arity())
            .filter(|i| !self.answered(*i))
            .filter_map(|i| {
                let p = self.partition(i);
                (p.len() > 1).then(|| (self.heading.attrs()[i].name.as_str(), p.values().map(|c| c * c).sum()))
            })
            .collect()
    }

    pub fn next_question(&self) -> Next {
        if self.remaining.len() > 1 {
            // min_by_key keeps the first minimum, so ties go to heading order.
            if let Some((name, _)) = self.scores().into_iter().min_by_key(|(_, s)| *s) {
                let attr = self.heading.index_of(name).expect("scored attribute exists");
                let options = self
                    .partition(attr)
                    .into_iter()
                    .map(|(v, n)| QuestionOption {
                        value: v.clone(),
                        would_remain: n,
                    })
                    .collect();
                return Next::Question {
                    attribute: name.to_string(),
                    options,
                };
            }
        }
        Next::Done {
            remaining: self.remaining.iter().cloned().collect(),
        }
    }

    pub fn answer(&mut self, attribute: &str, value: Scalar) -> Result<()> {
        let attr = self
            .heading
            .index_of(attribute)
            .ok_or_else(|| ModelError::UnknownAttribute(attribute.to_string()))?;
        if self.answered(attr) {
            return Err(Error::AlreadyAnswered(attribute.to_string()));
        }
        let narrowed: BTreeSet<Tuple> = self
            .remaining
            .iter()
            .filter(|t| t.values()[attr] == value)
            .cloned()
            .collect();
        if narrowed.is_empty() {
            return Err(Error::InvalidAnswer {
                attribute: attribute.to_string(),
                value: value.to_string(),
            });
        }
        self.answers.push((attr, value));
        self.remaining = narrowed;
        Ok(())
    }

    /// Answers with a value given in its text encoding.
    pub fn answer_text(&mut self, attribute: &str, text: &str) -> Result<()> {
        let domain = &self
            .heading
            .get(attribute)
            .ok_or_else(|| ModelError::UnknownAttribute(attribute.to_string()))?
            .domain;
        let value = Scalar::parse_for(text, domain).map_err(|_| Error::InvalidAnswer {
            attribute: attribute.to_string(),
            value: text.to_string(),
        })?;
        self.answer(attribute, value)
    }

    pub fn undo(&mut self) -> Result<()> {
        if self.answers.pop().is_none() {
            return Err(Error::NothingToUndo);
        }
        self.remaining = self.recompute();
        Ok(())
    }

    /// The full extension filtered by every answer; always equal to
    /// `remaining`.
    pub fn recompute(&self) -> BTreeSet<Tuple> {
        self.full_extension
            .iter()
            .filter(|t| self.answers.iter().all(|(i, v)| &t.values()[*i] == v))
            .cloned()
            .collect()
    }
}
