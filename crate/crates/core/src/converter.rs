//! Conversion between object values and terms.
//!
//! | object          | term                    |
//! |-----------------|-------------------------|
//! | `Null`          | `nil`                   |
//! | `Bool(true)`    | `true`                  |
//! | `Bool(false)`   | `fail` (`false` read)   |
//! | `Str(s)`        | atom `s`                |
//! | `Int(i)`        | integer                 |
//! | `Float(x)`      | float                   |
//! | `Array(vs)`     | proper list             |
//! | `Entity(e)`     | structure `functor(...)`|
//!
//! Decoding is directed by the schema: the same atom `true` is a boolean in
//! a `bool` slot and a string in a `string` slot. Inside a nullable slot the
//! atom `nil` always means null, so the string `"nil"` cannot be stored
//! there.

use std::collections::HashMap;

use thiserror::Error;

use crate::metamodel::{Registry, SchemaError, TypeRef};
use crate::term::{Term, Var};

pub const NIL: &str = "nil";
pub const TRUE: &str = "true";
pub const FAIL: &str = "fail";

#[derive(Debug, Clone, PartialEq)]
pub enum ObjectValue {
    Null,
    Bool(bool),
    Int(i64),
    Float(f64),
    Str(String),
    Array(Vec<ObjectValue>),
    Entity(EntityValue),
}

/// An instance of a class; `values` follow the flattened attribute order.
#[derive(Debug, Clone, PartialEq)]
pub struct EntityValue {
    pub class: String,
    pub values: Vec<ObjectValue>,
}

impl EntityValue {
    pub fn new(class: impl Into<String>, values: Vec<ObjectValue>) -> Self {
        EntityValue {
            class: class.into(),
            values,
        }
    }
}

impl ObjectValue {
    pub fn entity(class: impl Into<String>, values: Vec<ObjectValue>) -> Self {
        ObjectValue::Entity(EntityValue::new(class, values))
    }

    pub fn str(s: impl Into<String>) -> Self {
        ObjectValue::Str(s.into())
    }

    fn kind(&self) -> &'static str {
        match self {
            ObjectValue::Null => "null",
            ObjectValue::Bool(_) => "bool",
            ObjectValue::Int(_) => "int",
            ObjectValue::Float(_) => "float",
            ObjectValue::Str(_) => "string",
            ObjectValue::Array(_) => "array",
            ObjectValue::Entity(_) => "entity",
        }
    }
}

/// A slot of a query-by-example object.
#[derive(Debug, Clone, PartialEq)]
pub enum Slot {
    Value(ObjectValue),
    /// A named unknown. Equal names share one variable; `_` is always fresh.
    Unbound(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct QueryObject {
    pub class: String,
    pub slots: Vec<Slot>,
}

impl QueryObject {
    pub fn new(class: impl Into<String>, slots: Vec<Slot>) -> Self {
        QueryObject {
            class: class.into(),
            slots,
        }
    }

    /// Every slot unbound, named after its attribute.
    pub fn any(registry: &Registry, class: &str) -> Result<Self, ConvertError> {
        let slots = registry
            .flattened_attributes(class)?
            .iter()
            .map(|a| Slot::Unbound(a.var_name()))
            .collect();
        Ok(QueryObject::new(class, slots))
    }

    /// Fixes the slot of the named attribute.
    pub fn with(mut self, registry: &Registry, attr: &str, value: ObjectValue) -> Result<Self, ConvertError> {
        let idx = registry
            .flattened_attributes(&self.class)?
            .iter()
            .position(|a| a.name == attr)
            .ok_or_else(|| ConvertError::UnknownAttribute {
                class: self.class.clone(),
                attr: attr.into(),
            })?;
        self.slots[idx] = Slot::Value(value);
        Ok(self)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConvertError {
    #[error(transparent)]
    Schema(#[from] SchemaError),
    #[error("class `{0}` is abstract and cannot be instantiated")]
    AbstractClass(String),
    #[error("class `{class}` has {expected} attributes, value has {found}")]
    Arity {
        class: String,
        expected: usize,
        found: usize,
    },
    #[error("{path}: expected {expected}, found {found}")]
    TypeMismatch {
        path: String,
        expected: String,
        found: String,
    },
    #[error("{path}: null in non-nullable slot")]
    NullNotAllowed { path: String },
    #[error("{path}: string \"nil\" cannot be stored in a nullable slot")]
    AmbiguousNil { path: String },
    #[error("{path}: empty string has no atom encoding")]
    EmptyString { path: String },
    #[error("{path}: float is not finite")]
    NonFiniteFloat { path: String },
    #[error("{path}: `{found}` is not an instance of `{expected}`")]
    NotASubclass {
        path: String,
        expected: String,
        found: String,
    },
    #[error("attribute `{attr}` not in class `{class}`")]
    UnknownAttribute { class: String, attr: String },
    #[error("term is not ground: {0}")]
    NonGround(String),
    #[error("{path}: {expected}: term {found} cannot be decoded")]
    Undecodable {
        path: String,
        expected: String,
        found: String,
    },
}

/// Encodes a value. Entities are checked against the registry; free-standing
/// primitives follow the table above.
pub fn to_term(registry: &Registry, value: &ObjectValue) -> Result<Term, ConvertError> {
    Encoder { registry, vars: None }.value(value, None, "$")
}

/// Encodes a query object, turning unbound slots into variables.
pub fn to_template(registry: &Registry, query: &QueryObject) -> Result<Term, ConvertError> {
    let value = ObjectValue::entity(query.class.clone(), Vec::new());
    let ObjectValue::Entity(head) = &value else {
        unreachable!()
    };
    let mut vars = VarScope::default();
    Encoder {
        registry,
        vars: Some(&mut vars),
    }
    .entity(head, Some(&query.slots), "$")
}

/// Decodes a fact by resolving its functor and arity to a class.
pub fn decode(registry: &Registry, term: &Term) -> Result<ObjectValue, ConvertError> {
    require_ground(term)?;
    Decoder { registry }.entity(term, None, "$")
}

/// Decodes a term against an expected type.
pub fn from_term(registry: &Registry, term: &Term, ty: &TypeRef, nullable: bool) -> Result<ObjectValue, ConvertError> {
    require_ground(term)?;
    Decoder { registry }.value(term, ty, nullable, "$")
}

fn require_ground(term: &Term) -> Result<(), ConvertError> {
    if term.is_ground() {
        Ok(())
    } else {
        Err(ConvertError::NonGround(term.to_string()))
    }
}

#[derive(Default)]
struct VarScope {
    ids: HashMap<String, u64>,
    next: u64,
}

impl VarScope {
    fn var(&mut self, name: &str) -> Term {
        if name == "_" {
            self.next += 1;
            return Term::var(name, self.next - 1);
        }
        let next = &mut self.next;
        let id = *self.ids.entry(name.to_string()).or_insert_with(|| {
            *next += 1;
            *next - 1
        });
        Term::var(name, id)
    }
}

fn mismatch(path: &str, expected: impl ToString, found: impl ToString) -> ConvertError {
    ConvertError::TypeMismatch {
        path: path.to_string(),
        expected: expected.to_string(),
        found: found.to_string(),
    }
}

struct Encoder<'a> {
    registry: &'a Registry,
    vars: Option<&'a mut VarScope>,
}

impl Encoder<'_> {
    /// `slot` is `(type, nullable)` when the value sits in a typed attribute.
    fn value(&mut self, v: &ObjectValue, slot: Option<(&TypeRef, bool)>, path: &str) -> Result<Term, ConvertError> {
        if let Some((ty, nullable)) = slot {
            self.check_shape(v, ty, nullable, path)?;
        }
        match v {
            ObjectValue::Null => Ok(Term::atom(NIL)),
            ObjectValue::Bool(b) => Ok(Term::atom(if *b { TRUE } else { FAIL })),
            ObjectValue::Int(i) => Ok(Term::Int(*i)),
            ObjectValue::Float(x) => {
                Term::float(*x).ok_or_else(|| ConvertError::NonFiniteFloat { path: path.to_string() })
            }
            ObjectValue::Str(s) if s.is_empty() => Err(ConvertError::EmptyString { path: path.to_string() }),
            ObjectValue::Str(s) => Ok(Term::atom(s.as_str())),
            ObjectValue::Array(items) => {
                let elem = match slot {
                    Some((TypeRef::ListOf(e), _)) => Some((e.as_ref(), false)),
                    _ => None,
                };
                let items = items
                    .iter()
                    .enumerate()
                    .map(|(i, item)| self.value(item, elem, &format!("{path}[{i}]")))
                    .collect::<Result<_, _>>()?;
                Ok(Term::list(items))
            }
            ObjectValue::Entity(e) => self.entity(e, None, path),
        }
    }

    fn check_shape(&self, v: &ObjectValue, ty: &TypeRef, nullable: bool, path: &str) -> Result<(), ConvertError> {
        match (v, ty) {
            (ObjectValue::Null, _) if nullable => Ok(()),
            (ObjectValue::Null, _) => Err(ConvertError::NullNotAllowed { path: path.to_string() }),
            (ObjectValue::Str(s), TypeRef::String) if nullable && s == NIL => {
                Err(ConvertError::AmbiguousNil { path: path.to_string() })
            }
            (ObjectValue::Bool(_), TypeRef::Bool)
            | (ObjectValue::Int(_), TypeRef::Int)
            | (ObjectValue::Float(_), TypeRef::Float)
            | (ObjectValue::Str(_), TypeRef::String)
            | (ObjectValue::Array(_), TypeRef::ListOf(_)) => Ok(()),
            (ObjectValue::Entity(e), TypeRef::Entity(expected)) => {
                if self.registry.class(&e.class).is_none() {
                    Err(SchemaError::UnknownClass(e.class.clone()).into())
                } else if self.registry.is_subclass_of(&e.class, expected) {
                    Ok(())
                } else {
                    Err(ConvertError::NotASubclass {
                        path: path.to_string(),
                        expected: expected.clone(),
                        found: e.class.clone(),
                    })
                }
            }
            (v, ty) => Err(mismatch(path, ty, v.kind())),
        }
    }

    fn entity(&mut self, e: &EntityValue, query: Option<&[Slot]>, path: &str) -> Result<Term, ConvertError> {
        let class = self
            .registry
            .class(&e.class)
            .ok_or_else(|| SchemaError::UnknownClass(e.class.clone()))?;
        if class.is_abstract {
            return Err(ConvertError::AbstractClass(e.class.clone()));
        }
        let attrs = self.registry.flattened_attributes(&e.class)?;
        let found = query.map_or(e.values.len(), <[_]>::len);
        if found != attrs.len() {
            return Err(ConvertError::Arity {
                class: e.class.clone(),
                expected: attrs.len(),
                found,
            });
        }
        let mut args = Vec::with_capacity(attrs.len());
        for (i, attr) in attrs.iter().enumerate() {
            let sub = format!("{path}.{}", attr.name);
            let value = match query.map(|q| &q[i]) {
                Some(Slot::Unbound(name)) => {
                    let vars = self.vars.as_deref_mut().expect("templates carry a variable scope");
                    args.push(vars.var(name));
                    continue;
                }
                Some(Slot::Value(v)) => v,
                None => &e.values[i],
            };
            args.push(self.value(value, Some((&attr.ty, attr.nullable)), &sub)?);
        }
        Ok(Term::compound(class.functor.clone(), args))
    }
}

struct Decoder<'a> {
    registry: &'a Registry,
}

impl Decoder<'_> {
    fn value(&self, t: &Term, ty: &TypeRef, nullable: bool, path: &str) -> Result<ObjectValue, ConvertError> {
        if nullable && matches!(t, Term::Atom(a) if a == NIL) {
            return Ok(ObjectValue::Null);
        }
        let fail = || mismatch(path, ty, t);
        match ty {
            TypeRef::Bool => match t {
                Term::Atom(a) if a == TRUE => Ok(ObjectValue::Bool(true)),
                Term::Atom(a) if a == FAIL || a == "false" => Ok(ObjectValue::Bool(false)),
                _ => Err(fail()),
            },
            TypeRef::Int => match t {
                Term::Int(i) => Ok(ObjectValue::Int(*i)),
                _ => Err(fail()),
            },
            TypeRef::Float => match t {
                Term::Float(x) => Ok(ObjectValue::Float(*x)),
                _ => Err(fail()),
            },
            TypeRef::String => match t {
                Term::Atom(a) => Ok(ObjectValue::Str(a.clone())),
                _ => Err(fail()),
            },
            TypeRef::ListOf(elem) => match t {
                Term::List(items, None) => items
                    .iter()
                    .enumerate()
                    .map(|(i, item)| self.value(item, elem, false, &format!("{path}[{i}]")))
                    .collect::<Result<_, _>>()
                    .map(ObjectValue::Array),
                _ => Err(fail()),
            },
            TypeRef::Entity(expected) => self.entity(t, Some(expected), path),
        }
    }

    fn entity(&self, t: &Term, expected: Option<&str>, path: &str) -> Result<ObjectValue, ConvertError> {
        let Term::Struct(functor, args) = t else {
            let expected = expected.map_or_else(|| "a structure".to_string(), |c| format!("entity('{c}')"));
            return Err(ConvertError::Undecodable {
                path: path.to_string(),
                expected,
                found: t.to_string(),
            });
        };
        let class = self.registry.resolve(functor, args.len())?;
        if let Some(expected) = expected {
            if !self.registry.is_subclass_of(&class.name, expected) {
                return Err(ConvertError::NotASubclass {
                    path: path.to_string(),
                    expected: expected.to_string(),
                    found: class.name.clone(),
                });
            }
        }
        let attrs = self.registry.flattened_attributes(&class.name)?;
        let values = attrs
            .iter()
            .zip(args)
            .map(|(a, arg)| self.value(arg, &a.ty, a.nullable, &format!("{path}.{}", a.name)))
            .collect::<Result<_, _>>()?;
        Ok(ObjectValue::entity(class.name.clone(), values))
    }
}

/// Collects bindings of a template's named variables, in first-occurrence
/// order, skipping anonymous ones.
pub fn named_variables(t: &Term) -> Vec<Var> {
    t.variables().into_iter().filter(|v| !v.is_anonymous()).collect()
}
