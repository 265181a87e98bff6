//! The Prolog term tree.
//!
//! Terms are the logic-programming side of every mapping: facts in a
//! knowledge base, most-general templates generated from classes, and query
//! goals are all [`Term`]s. Equality and ordering are structural and follow
//! the standard order of terms restricted to the variants supported here:
//! `Var < Int < Float < Atom < List < Struct`.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;
use std::hash::{Hash, Hasher};

/// A logic variable. Two variables denote the same binding slot iff their
/// ids are equal; the name is only used for printing.
#[derive(Debug, Clone)]
pub struct Var {
    pub name: String,
    pub id: u64,
}

impl Var {
    pub fn new(name: impl Into<String>, id: u64) -> Self {
        Var { name: name.into(), id }
    }

    /// `_` alone is the anonymous variable.
    pub fn is_anonymous(&self) -> bool {
        self.name == "_"
    }
}

impl PartialEq for Var {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id
    }
}

impl Eq for Var {}

impl Hash for Var {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.id.hash(state);
    }
}

impl PartialOrd for Var {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Var {
    fn cmp(&self, other: &Self) -> Ordering {
        self.id.cmp(&other.id)
    }
}

#[derive(Debug, Clone)]
pub enum Term {
    Var(Var),
    /// Nonempty atom text.
    Atom(String),
    Int(i64),
    /// Always finite.
    Float(f64),
    /// Functor and at least one argument.
    Struct(String, Vec<Term>),
    /// Items plus an optional tail variable. A tail is only legal in query
    /// templates; stored facts hold proper lists.
    List(Vec<Term>, Option<Var>),
}

impl Term {
    pub fn atom(text: impl Into<String>) -> Term {
        Term::Atom(text.into())
    }

    pub fn var(name: impl Into<String>, id: u64) -> Term {
        Term::Var(Var::new(name, id))
    }

    /// Builds a compound term. A zero-argument compound is an atom.
    pub fn compound(functor: impl Into<String>, args: Vec<Term>) -> Term {
        if args.is_empty() {
            Term::Atom(functor.into())
        } else {
            Term::Struct(functor.into(), args)
        }
    }

    /// Returns `None` for NaN and infinities.
    pub fn float(value: f64) -> Option<Term> {
        value.is_finite().then_some(Term::Float(value))
    }

    pub fn list(items: Vec<Term>) -> Term {
        Term::List(items, None)
    }

    pub fn partial_list(items: Vec<Term>, tail: Var) -> Term {
        if items.is_empty() {
            return Term::Var(tail);
        }
        Term::List(items, Some(tail))
    }

    /// Functor and arity of an atom or structure.
    pub fn indicator(&self) -> Option<(&str, usize)> {
        match self {
            Term::Atom(a) => Some((a, 0)),
            Term::Struct(f, args) => Some((f, args.len())),
            _ => None,
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Atom(_) | Term::Int(_) | Term::Float(_) => true,
            Term::Struct(_, args) => args.iter().all(Term::is_ground),
            Term::List(items, tail) => tail.is_none() && items.iter().all(Term::is_ground),
        }
    }

    /// True if any list inside the term carries a tail variable.
    pub fn has_partial_list(&self) -> bool {
        match self {
            Term::Struct(_, args) => args.iter().any(Term::has_partial_list),
            Term::List(items, tail) => tail.is_some() || items.iter().any(Term::has_partial_list),
            _ => false,
        }
    }

    /// Distinct variables in left-to-right first-occurrence order.
    pub fn variables(&self) -> Vec<Var> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        self.visit_vars(&mut |v| {
            if seen.insert(v.id) {
                out.push(v.clone());
            }
        });
        out
    }

    /// Calls `f` on every variable occurrence, left to right, tails last
    /// within their list.
    pub fn visit_vars<F: FnMut(&Var)>(&self, f: &mut F) {
        match self {
            Term::Var(v) => f(v),
            Term::Atom(_) | Term::Int(_) | Term::Float(_) => {}
            Term::Struct(_, args) => args.iter().for_each(|a| a.visit_vars(f)),
            Term::List(items, tail) => {
                items.iter().for_each(|a| a.visit_vars(f));
                if let Some(t) = tail {
                    f(t);
                }
            }
        }
    }

    fn rank(&self) -> u8 {
        match self {
            Term::Var(_) => 0,
            Term::Int(_) => 1,
            Term::Float(_) => 2,
            Term::Atom(_) => 3,
            Term::List(..) => 4,
            Term::Struct(..) => 5,
        }
    }
}

pub fn is_ground(t: &Term) -> bool {
    t.is_ground()
}

pub fn term_equal(a: &Term, b: &Term) -> bool {
    a == b
}

pub fn term_compare(a: &Term, b: &Term) -> Ordering {
    a.cmp(b)
}

pub fn variables_of(t: &Term) -> Vec<Var> {
    t.variables()
}

impl PartialEq for Term {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Term {}

impl PartialOrd for Term {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Term {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Term::Var(a), Term::Var(b)) => a.cmp(b),
            (Term::Int(a), Term::Int(b)) => a.cmp(b),
            (Term::Float(a), Term::Float(b)) => a.total_cmp(b),
            (Term::Atom(a), Term::Atom(b)) => a.cmp(b),
            (Term::List(xs, xt), Term::List(ys, yt)) => xs
                .len()
                .cmp(&ys.len())
                .then_with(|| xs.iter().cmp(ys.iter()))
                .then_with(|| xt.cmp(yt)),
            (Term::Struct(f, xs), Term::Struct(g, ys)) => xs
                .len()
                .cmp(&ys.len())
                .then_with(|| f.cmp(g))
                .then_with(|| xs.iter().cmp(ys.iter())),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl Hash for Term {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.rank().hash(state);
        match self {
            Term::Var(v) => v.hash(state),
            Term::Atom(a) => a.hash(state),
            Term::Int(i) => i.hash(state),
            Term::Float(x) => x.to_bits().hash(state),
            Term::Struct(f, args) => {
                f.hash(state);
                args.hash(state);
            }
            Term::List(items, tail) => {
                items.hash(state);
                tail.hash(state);
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::text::print_canonical(self))
    }
}
