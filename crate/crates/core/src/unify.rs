//! First-order unification over [`Term`]s.
//!
//! Substitutions are kept in solved form: no variable bound in the domain
//! occurs in any bound term. Binding a variable therefore applies the current
//! substitution to the new value and then substitutes the new binding into
//! every existing one, which makes [`apply`] a single pass.

use std::borrow::Cow;
use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::term::{Term, Var};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Substitution {
    bindings: BTreeMap<u64, (Var, Term)>,
    /// Variables that occur as list tails and so may only be bound to lists
    /// or other variables.
    tails: BTreeSet<u64>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn get(&self, id: u64) -> Option<&Term> {
        self.bindings.get(&id).map(|(_, t)| t)
    }

    /// Bound variables and their values, ordered by variable id.
    pub fn iter(&self) -> impl Iterator<Item = (&Var, &Term)> {
        self.bindings.values().map(|(v, t)| (v, t))
    }

    pub fn apply(&self, t: &Term) -> Term {
        if self.bindings.is_empty() {
            return t.clone();
        }
        match t {
            Term::Var(v) => self.get(v.id).cloned().unwrap_or_else(|| t.clone()),
            Term::Atom(_) | Term::Int(_) | Term::Float(_) => t.clone(),
            Term::Struct(f, args) => Term::Struct(f.clone(), args.iter().map(|a| self.apply(a)).collect()),
            Term::List(items, tail) => {
                let mut items: Vec<Term> = items.iter().map(|a| self.apply(a)).collect();
                let tail = match tail {
                    None => None,
                    Some(v) => match self.get(v.id) {
                        None => Some(v.clone()),
                        Some(Term::Var(w)) => Some(w.clone()),
                        Some(Term::List(rest, rest_tail)) => {
                            items.extend(rest.iter().cloned());
                            rest_tail.clone()
                        }
                        // tail variables only ever bind to lists or variables
                        Some(_) => Some(v.clone()),
                    },
                };
                Term::List(items, tail)
            }
        }
    }

    fn bind(&mut self, var: &Var, value: Term, occurs_check: bool) -> bool {
        let value = self.apply(&value);
        if let Term::Var(w) = &value {
            if w.id == var.id {
                return true;
            }
        }
        if self.tails.contains(&var.id) {
            match &value {
                Term::List(..) => {}
                Term::Var(w) => {
                    self.tails.insert(w.id);
                }
                _ => return false,
            }
        }
        if occurs_check && occurs(var.id, &value) {
            return false;
        }
        let single = Substitution {
            bindings: BTreeMap::from([(var.id, (var.clone(), value.clone()))]),
            tails: BTreeSet::new(),
        };
        for (_, bound) in self.bindings.values_mut() {
            *bound = single.apply(bound);
        }
        self.bindings.insert(var.id, (var.clone(), value));
        true
    }
}

fn occurs(id: u64, t: &Term) -> bool {
    let mut found = false;
    t.visit_vars(&mut |v| found |= v.id == id);
    found
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UnifyOptions {
    pub occurs_check: bool,
}

impl Default for UnifyOptions {
    fn default() -> Self {
        UnifyOptions { occurs_check: true }
    }
}

pub fn apply(s: &Substitution, t: &Term) -> Term {
    s.apply(t)
}

/// Most general unifier of `a` and `b` extending `s`, with the occurs check.
pub fn unify(a: &Term, b: &Term, s: &Substitution) -> Option<Substitution> {
    unify_with(a, b, s, UnifyOptions::default())
}

pub fn unify_with(a: &Term, b: &Term, s: &Substitution, opts: UnifyOptions) -> Option<Substitution> {
    let mut out = s.clone();
    for t in [a, b] {
        collect_tails(t, &mut out.tails);
    }
    unify_into(a, b, &mut out, opts.occurs_check).then_some(out)
}

fn collect_tails(t: &Term, tails: &mut BTreeSet<u64>) {
    match t {
        Term::Struct(_, args) => args.iter().for_each(|a| collect_tails(a, tails)),
        Term::List(items, tail) => {
            items.iter().for_each(|a| collect_tails(a, tails));
            if let Some(v) = tail {
                tails.insert(v.id);
            }
        }
        _ => {}
    }
}

fn unify_into(a: &Term, b: &Term, s: &mut Substitution, oc: bool) -> bool {
    let a = deref(a, s);
    let b = deref(b, s);
    match (a.as_ref(), b.as_ref()) {
        (Term::Var(x), Term::Var(y)) if x.id == y.id => true,
        (Term::Var(x), other) | (other, Term::Var(x)) => s.bind(x, other.clone(), oc),
        (Term::Struct(f, xs), Term::Struct(g, ys)) => {
            f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| unify_into(x, y, s, oc))
        }
        (Term::List(xs, xt), Term::List(ys, yt)) => {
            let common = xs.len().min(ys.len());
            if !xs[..common]
                .iter()
                .zip(&ys[..common])
                .all(|(x, y)| unify_into(x, y, s, oc))
            {
                return false;
            }
            let empty = || Term::list(Vec::new());
            match (xs.len() > common, ys.len() > common, xt, yt) {
                (false, false, None, None) => true,
                (false, false, Some(v), None) | (false, false, None, Some(v)) => {
                    unify_into(&Term::Var(v.clone()), &empty(), s, oc)
                }
                (false, false, Some(v), Some(w)) => unify_into(&Term::Var(v.clone()), &Term::Var(w.clone()), s, oc),
                // the shorter side's tail takes the longer side's suffix
                (true, false, _, Some(v)) => unify_into(
                    &Term::Var(v.clone()),
                    &Term::List(xs[common..].to_vec(), xt.clone()),
                    s,
                    oc,
                ),
                (false, true, Some(v), _) => unify_into(
                    &Term::Var(v.clone()),
                    &Term::List(ys[common..].to_vec(), yt.clone()),
                    s,
                    oc,
                ),
                _ => false,
            }
        }
        _ => a == b,
    }
}

/// Replaces a bound variable by its value; other terms are returned as is.
fn deref<'a>(t: &'a Term, s: &Substitution) -> Cow<'a, Term> {
    match t {
        Term::Var(v) => s.get(v.id).map_or(Cow::Borrowed(t), |b| Cow::Owned(b.clone())),
        Term::List(_, Some(_)) => Cow::Owned(s.apply(t)),
        _ => Cow::Borrowed(t),
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("fact is not ground: {0}")]
pub struct NonGroundFact(pub String);

/// Unifies a template with a ground fact. Succeeds iff the fact is an
/// instance of the template.
pub fn matches(template: &Term, fact: &Term) -> Result<Option<Substitution>, NonGroundFact> {
    if !fact.is_ground() {
        return Err(NonGroundFact(fact.to_string()));
    }
    Ok(unify(template, fact, &Substitution::new()))
}
