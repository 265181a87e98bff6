//! File-backed store of ground facts.
//!
//! A knowledge base holds each fact at most once, in insertion order. Files
//! are Prolog text with one canonical fact per line; `%` comments and any
//! layout are accepted on load and dropped on store.

use std::collections::BTreeSet;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use thiserror::Error;

use crate::converter::{self, ConvertError, ObjectValue, QueryObject};
use crate::metamodel::Registry;
use crate::term::Term;
use crate::text::{self, ParseError, Position};
use crate::unify::{self, Substitution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    /// Only facts whose functor and arity resolve to a class are accepted.
    #[default]
    Strict,
    /// Any ground callable term is accepted; unresolvable facts are
    /// invisible to [`KnowledgeBase::find`].
    Permissive,
}

#[derive(Debug, Error)]
pub enum KbError {
    #[error("fact is not ground: {0}")]
    NonGround(String),
    #[error("fact must be an atom or a structure: {0}")]
    NotCallable(String),
    #[error("no class registered for {functor}/{arity}")]
    Unresolvable { functor: String, arity: usize },
    #[error("only entity objects can be saved")]
    NotAnEntity,
    #[error(transparent)]
    Convert(#[from] ConvertError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("{pos}: {error}")]
    Clause { pos: Position, error: Box<KbError> },
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
}

#[derive(Debug, Clone)]
pub struct KnowledgeBase {
    registry: Arc<Registry>,
    mode: Mode,
    facts: Vec<Term>,
    keys: BTreeSet<Term>,
}

impl KnowledgeBase {
    pub fn new(registry: Arc<Registry>) -> Self {
        Self::with_mode(registry, Mode::Strict)
    }

    pub fn with_mode(registry: Arc<Registry>, mode: Mode) -> Self {
        KnowledgeBase {
            registry,
            mode,
            facts: Vec::new(),
            keys: BTreeSet::new(),
        }
    }

    pub fn registry(&self) -> &Registry {
        &self.registry
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn facts(&self) -> &[Term] {
        &self.facts
    }

    pub fn len(&self) -> usize {
        self.facts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.facts.is_empty()
    }

    pub fn contains(&self, fact: &Term) -> bool {
        self.keys.contains(fact)
    }

    /// Checks that `fact` could be stored, without storing it.
    pub fn check_fact(&self, fact: &Term) -> Result<(), KbError> {
        if !fact.is_ground() {
            return Err(KbError::NonGround(fact.to_string()));
        }
        let Some((functor, arity)) = fact.indicator() else {
            return Err(KbError::NotCallable(fact.to_string()));
        };
        if self.mode == Mode::Strict && self.registry.resolve(functor, arity).is_err() {
            return Err(KbError::Unresolvable {
                functor: functor.to_string(),
                arity,
            });
        }
        Ok(())
    }

    /// Appends `fact` unless an equal fact is stored. Returns whether it was
    /// inserted.
    pub fn assert_fact(&mut self, fact: Term) -> Result<bool, KbError> {
        self.check_fact(&fact)?;
        Ok(self.insert_checked(fact))
    }

    fn insert_checked(&mut self, fact: Term) -> bool {
        if self.keys.contains(&fact) {
            return false;
        }
        self.keys.insert(fact.clone());
        self.facts.push(fact);
        true
    }

    /// Removes every fact matching `template`; survivors keep their order.
    pub fn retract(&mut self, template: &Term) -> usize {
        let before = self.facts.len();
        let keys = &mut self.keys;
        self.facts.retain(|f| {
            let hit = unify::matches(template, f).expect("stored facts are ground").is_some();
            if hit {
                keys.remove(f);
            }
            !hit
        });
        before - self.facts.len()
    }

    /// Every fact matching `template`, in insertion order, with the bindings
    /// that make the template equal to it.
    pub fn query(&self, template: &Term) -> Vec<(&Term, Substitution)> {
        self.facts
            .iter()
            .filter_map(|f| {
                unify::matches(template, f)
                    .expect("stored facts are ground")
                    .map(|s| (f, s))
            })
            .collect()
    }

    pub fn save_object(&mut self, value: &ObjectValue) -> Result<bool, KbError> {
        if !matches!(value, ObjectValue::Entity(_)) {
            return Err(KbError::NotAnEntity);
        }
        let fact = converter::to_term(&self.registry, value)?;
        self.assert_fact(fact)
    }

    /// Removes the fact for `value`. Returns whether it was stored.
    pub fn delete_object(&mut self, value: &ObjectValue) -> Result<bool, KbError> {
        if !matches!(value, ObjectValue::Entity(_)) {
            return Err(KbError::NotAnEntity);
        }
        let fact = converter::to_term(&self.registry, value)?;
        Ok(self.retract(&fact) > 0)
    }

    pub fn find(&self, query: &QueryObject) -> Result<Vec<ObjectValue>, KbError> {
        let template = converter::to_template(&self.registry, query)?;
        let mut out = Vec::new();
        for (fact, _) in self.query(&template) {
            match converter::decode(&self.registry, fact) {
                Ok(v) => out.push(v),
                Err(_) if self.mode == Mode::Permissive => {}
                Err(e) => return Err(e.into()),
            }
        }
        Ok(out)
    }

    /// Loads facts from Prolog text. Nothing is inserted unless every clause
    /// is acceptable. Returns the number of newly inserted facts.
    pub fn load_str(&mut self, text: &str) -> Result<usize, KbError> {
        let clauses = text::parse_clauses(text)?;
        for (fact, pos) in &clauses {
            self.check_fact(fact).map_err(|e| KbError::Clause {
                pos: *pos,
                error: Box::new(e),
            })?;
        }
        let mut inserted = 0;
        for (fact, _) in clauses {
            inserted += usize::from(self.insert_checked(fact));
        }
        Ok(inserted)
    }

    pub fn load_file(&mut self, path: impl AsRef<Path>) -> Result<usize, KbError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| KbError::Io {
            path: path.into(),
            source,
        })?;
        self.load_str(&text)
    }

    /// Canonical file contents: one `fact.` per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for f in &self.facts {
            out.push_str(&text::print_canonical(f));
            out.push_str(".\n");
        }
        out
    }

    /// Rewrites `path` with the canonical contents via a temporary file in
    /// the same directory. Returns the number of facts written.
    pub fn store_file(&self, path: impl AsRef<Path>) -> Result<usize, KbError> {
        let path = path.as_ref();
        let io_err = |source| KbError::Io {
            path: path.into(),
            source,
        };
        let dir = match path.parent() {
            Some(p) if !p.as_os_str().is_empty() => p,
            _ => Path::new("."),
        };
        let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
        tmp.write_all(self.to_text().as_bytes()).map_err(io_err)?;
        tmp.as_file().sync_all().map_err(io_err)?;
        tmp.persist(path).map_err(|e| io_err(e.error))?;
        Ok(self.facts.len())
    }
}
