//! Bidirectional mapping between object graphs and Prolog predicates.
//!
//! A [`Registry`] of entity classes describes the object side. Each concrete
//! class corresponds to one predicate, identified by functor and arity, and
//! each object to one ground fact of that predicate. The [`converter`]
//! translates in both directions, [`unify`] provides query-by-example, and
//! [`KnowledgeBase`] stores deduplicated facts in Prolog text files.
//!
//! ```
//! use predmap::{KnowledgeBase, ObjectValue, Registry};
//! use std::sync::Arc;
//!
//! let registry = Registry::from_schema(
//!     "class('Point', [], [attr(id,string), attr(x,int), attr(y,int)]).",
//! )
//! .unwrap();
//! let mut kb = KnowledgeBase::new(Arc::new(registry));
//! let a = ObjectValue::entity("Point", vec![ObjectValue::str("a"), ObjectValue::Int(2), ObjectValue::Int(2)]);
//! assert!(kb.save_object(&a).unwrap());
//! assert_eq!(kb.facts()[0].to_string(), "'Point'(a,2,2)");
//! ```

pub mod converter;
pub mod kb;
pub mod metamodel;
pub mod term;
pub mod text;
pub mod unify;

pub use converter::{
    decode, from_term, to_template, to_term, ConvertError, EntityValue, ObjectValue, QueryObject, Slot,
};
pub use kb::{KbError, KnowledgeBase, Mode};
pub use metamodel::{AttributeSpec, EntityClass, Registry, SchemaError, TypeRef};
pub use term::{is_ground, term_compare, term_equal, variables_of, Term, Var};
pub use text::{parse_program, parse_term, print_canonical, ParseError, Position};
pub use unify::{apply, matches, unify, Substitution};
