//! Entity classes and the registry that maps them to predicates.
//!
//! A concrete class is identified on the logic side by its functor and its
//! flattened arity: the parent's attributes followed by its own. A subclass
//! may reuse its parent's functor (the functor override), in which case the
//! two classes are told apart purely by arity.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use indexmap::IndexMap;
use thiserror::Error;

use crate::term::Term;
use crate::text::{self, ParseError, Position};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TypeRef {
    Bool,
    Int,
    Float,
    String,
    ListOf(Box<TypeRef>),
    Entity(String),
}

impl TypeRef {
    pub fn list_of(elem: TypeRef) -> TypeRef {
        TypeRef::ListOf(Box::new(elem))
    }

    pub fn entity(class: impl Into<String>) -> TypeRef {
        TypeRef::Entity(class.into())
    }

    /// Reference-like types accept null unless told otherwise.
    pub fn default_nullable(&self) -> bool {
        matches!(self, TypeRef::String | TypeRef::ListOf(_) | TypeRef::Entity(_))
    }

    fn to_term(&self) -> Term {
        match self {
            TypeRef::Bool => Term::atom("bool"),
            TypeRef::Int => Term::atom("int"),
            TypeRef::Float => Term::atom("float"),
            TypeRef::String => Term::atom("string"),
            TypeRef::ListOf(e) => Term::compound("list", vec![e.to_term()]),
            TypeRef::Entity(c) => Term::compound("entity", vec![Term::atom(c.as_str())]),
        }
    }
}

impl fmt::Display for TypeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&text::print_canonical(&self.to_term()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttributeSpec {
    pub name: String,
    pub ty: TypeRef,
    pub nullable: bool,
}

impl AttributeSpec {
    pub fn new(name: impl Into<String>, ty: TypeRef) -> Self {
        let nullable = ty.default_nullable();
        AttributeSpec {
            name: name.into(),
            ty,
            nullable,
        }
    }

    pub fn with_nullable(mut self, nullable: bool) -> Self {
        self.nullable = nullable;
        self
    }

    /// Name of the variable standing for this attribute in a most-general term.
    pub fn var_name(&self) -> String {
        let mut chars = self.name.chars();
        match chars.next() {
            Some(c) => c.to_ascii_uppercase().to_string() + chars.as_str(),
            None => String::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntityClass {
    pub name: String,
    pub functor: String,
    pub superclass: Option<String>,
    pub is_abstract: bool,
    /// Attributes declared by this class only, excluding inherited ones.
    pub attributes: Vec<AttributeSpec>,
    pub is_association: bool,
}

impl EntityClass {
    pub fn new(name: impl Into<String>) -> Self {
        let name = name.into();
        EntityClass {
            functor: name.clone(),
            name,
            superclass: None,
            is_abstract: false,
            attributes: Vec::new(),
            is_association: false,
        }
    }

    pub fn extends(mut self, parent: impl Into<String>) -> Self {
        self.superclass = Some(parent.into());
        self
    }

    pub fn functor(mut self, functor: impl Into<String>) -> Self {
        self.functor = functor.into();
        self
    }

    pub fn abstract_class(mut self) -> Self {
        self.is_abstract = true;
        self
    }

    pub fn association(mut self) -> Self {
        self.is_association = true;
        self
    }

    pub fn attr(mut self, name: impl Into<String>, ty: TypeRef) -> Self {
        self.attributes.push(AttributeSpec::new(name, ty));
        self
    }

    pub fn with_attr(mut self, spec: AttributeSpec) -> Self {
        self.attributes.push(spec);
        self
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SchemaError {
    #[error("class `{0}` is already registered")]
    DuplicateClass(String),
    #[error("{functor}/{arity} already maps to class `{existing}`")]
    DuplicateIndicator {
        functor: String,
        arity: usize,
        existing: String,
    },
    #[error("inheritance cycle through class `{0}`")]
    InheritanceCycle(String),
    #[error("class `{class}` extends unknown class `{superclass}`")]
    UnknownSuperclass { class: String, superclass: String },
    #[error("unknown class `{0}`")]
    UnknownClass(String),
    #[error("class `{0}` has no attributes")]
    NoAttributes(String),
    #[error("subclass `{0}` must add at least one attribute")]
    NoNewAttributes(String),
    #[error("class `{0}` has an empty functor")]
    EmptyFunctor(String),
    #[error("invalid attribute name `{attr}` in class `{class}`")]
    InvalidAttributeName { class: String, attr: String },
    #[error("attribute `{attr}` declared twice in class `{class}`")]
    DuplicateAttribute { class: String, attr: String },
    #[error("association `{class}` needs at least 2 entity attributes, found {found}")]
    AssociationArity { class: String, found: usize },
    #[error("class `{0}` is abstract")]
    AbstractClass(String),
    #[error("no class registered for {functor}/{arity}")]
    Unresolved { functor: String, arity: usize },
    #[error("attribute `{attr}` of class `{class}` refers to unknown class `{target}`")]
    UnresolvedEntityRef {
        class: String,
        attr: String,
        target: String,
    },
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("{pos}: {message}")]
    Malformed { pos: Position, message: String },
}

/// Classes keyed by name plus the (functor, arity) index of concrete classes.
#[derive(Debug, Clone, Default)]
pub struct Registry {
    classes: IndexMap<String, EntityClass>,
    flattened: HashMap<String, Vec<AttributeSpec>>,
    index: BTreeMap<(String, usize), String>,
}

impl Registry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a registry from schema text and validates it.
    pub fn from_schema(text: &str) -> Result<Self, SchemaError> {
        let mut r = Registry::new();
        r.load_schema(text)?;
        Ok(r)
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn class(&self, name: &str) -> Option<&EntityClass> {
        self.classes.get(name)
    }

    /// Classes in registration order.
    pub fn classes(&self) -> impl Iterator<Item = &EntityClass> {
        self.classes.values()
    }

    /// Concrete classes sorted by (functor, arity).
    pub fn concrete_classes(&self) -> impl Iterator<Item = &EntityClass> {
        self.index.values().map(move |n| &self.classes[n])
    }

    pub fn register_class(&mut self, class: EntityClass) -> Result<(), SchemaError> {
        let name = class.name.clone();
        if self.classes.contains_key(&name) {
            return Err(SchemaError::DuplicateClass(name));
        }
        if class.functor.is_empty() {
            return Err(SchemaError::EmptyFunctor(name));
        }
        let mut flat = match &class.superclass {
            Some(p) if *p == name => return Err(SchemaError::InheritanceCycle(name)),
            Some(p) => {
                let parent = self.flattened.get(p).ok_or_else(|| SchemaError::UnknownSuperclass {
                    class: name.clone(),
                    superclass: p.clone(),
                })?;
                if class.attributes.is_empty() {
                    return Err(SchemaError::NoNewAttributes(name));
                }
                parent.clone()
            }
            None => Vec::new(),
        };
        for a in &class.attributes {
            if !is_identifier(&a.name) {
                return Err(SchemaError::InvalidAttributeName {
                    class: name,
                    attr: a.name.clone(),
                });
            }
            if flat.iter().any(|b| b.name == a.name) {
                return Err(SchemaError::DuplicateAttribute {
                    class: name,
                    attr: a.name.clone(),
                });
            }
            flat.push(a.clone());
        }
        if flat.is_empty() {
            return Err(SchemaError::NoAttributes(name));
        }
        if class.is_association {
            let found = flat.iter().filter(|a| matches!(a.ty, TypeRef::Entity(_))).count();
            if found < 2 {
                return Err(SchemaError::AssociationArity { class: name, found });
            }
        }
        let key = (class.functor.clone(), flat.len());
        if !class.is_abstract {
            if let Some(existing) = self.index.get(&key) {
                return Err(SchemaError::DuplicateIndicator {
                    functor: key.0,
                    arity: key.1,
                    existing: existing.clone(),
                });
            }
            self.index.insert(key, name.clone());
        }
        self.flattened.insert(name.clone(), flat);
        self.classes.insert(name, class);
        Ok(())
    }

    /// Checks that every entity reference names a registered class.
    pub fn finalize(&self) -> Result<(), SchemaError> {
        for c in self.classes.values() {
            for a in &c.attributes {
                let mut ty = &a.ty;
                while let TypeRef::ListOf(e) = ty {
                    ty = e;
                }
                if let TypeRef::Entity(target) = ty {
                    if !self.classes.contains_key(target) {
                        return Err(SchemaError::UnresolvedEntityRef {
                            class: c.name.clone(),
                            attr: a.name.clone(),
                            target: target.clone(),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// Inherited attributes first, then the class's own.
    pub fn flattened_attributes(&self, class: &str) -> Result<&[AttributeSpec], SchemaError> {
        self.flattened
            .get(class)
            .map(Vec::as_slice)
            .ok_or_else(|| SchemaError::UnknownClass(class.to_string()))
    }

    pub fn arity(&self, class: &str) -> Result<usize, SchemaError> {
        self.flattened_attributes(class).map(<[_]>::len)
    }

    pub fn resolve(&self, functor: &str, arity: usize) -> Result<&EntityClass, SchemaError> {
        self.index
            .get(&(functor.to_string(), arity))
            .map(|n| &self.classes[n])
            .ok_or_else(|| SchemaError::Unresolved {
                functor: functor.to_string(),
                arity,
            })
    }

    /// True if `class` is `ancestor` or inherits from it.
    pub fn is_subclass_of(&self, class: &str, ancestor: &str) -> bool {
        let mut cur = Some(class);
        while let Some(name) = cur {
            if name == ancestor {
                return true;
            }
            cur = self.classes.get(name).and_then(|c| c.superclass.as_deref());
        }
        false
    }

    /// The class's predicate with a fresh variable per flattened attribute.
    pub fn most_general_term(&self, class: &str) -> Result<Term, SchemaError> {
        let c = self
            .class(class)
            .ok_or_else(|| SchemaError::UnknownClass(class.to_string()))?;
        if c.is_abstract {
            return Err(SchemaError::AbstractClass(class.to_string()));
        }
        let args = self
            .flattened_attributes(class)?
            .iter()
            .zip(0..)
            .map(|(a, id)| Term::var(a.var_name(), id))
            .collect();
        Ok(Term::compound(c.functor.clone(), args))
    }

    /// One most-general clause per concrete class, sorted by (functor, arity).
    pub fn emit_declarations(&self) -> String {
        let mut out = String::new();
        for c in self.concrete_classes() {
            let t = self.most_general_term(&c.name).expect("indexed classes are concrete");
            out.push_str(&text::print_canonical(&t));
            out.push_str(".\n");
        }
        out
    }

    /// Schema text that [`Registry::load_schema`] maps back to this registry.
    pub fn emit_schema(&self) -> String {
        let mut out = String::new();
        for c in self.classes.values() {
            let mut opts = Vec::new();
            if let Some(p) = &c.superclass {
                opts.push(Term::compound("extends", vec![Term::atom(p.as_str())]));
            }
            if c.functor != c.name {
                opts.push(Term::compound("functor", vec![Term::atom(c.functor.as_str())]));
            }
            if c.is_abstract {
                opts.push(Term::atom("abstract"));
            }
            if c.is_association {
                opts.push(Term::atom("association"));
            }
            let attrs = c
                .attributes
                .iter()
                .map(|a| {
                    let mut args = vec![Term::atom(a.name.as_str()), a.ty.to_term()];
                    if a.nullable != a.ty.default_nullable() {
                        args.push(Term::atom(if a.nullable { "nullable" } else { "required" }));
                    }
                    Term::compound("attr", args)
                })
                .collect();
            let clause = Term::compound(
                "class",
                vec![Term::atom(c.name.as_str()), Term::list(opts), Term::list(attrs)],
            );
            out.push_str(&text::print_canonical(&clause));
            out.push_str(".\n");
        }
        out
    }

    /// Registers every `class(Name, Options, Attributes)` clause in `text`.
    ///
    /// Clauses may appear in any order; parents are registered before their
    /// children and entity references are checked once all classes are in.
    pub fn load_schema(&mut self, text: &str) -> Result<(), SchemaError> {
        let mut pending = Vec::new();
        for (clause, pos) in text::parse_clauses(text)? {
            pending.push((class_from_clause(&clause, pos)?, pos));
        }
        let mut declared = HashSet::new();
        for (c, pos) in &pending {
            if !declared.insert(c.name.as_str()) || self.classes.contains_key(&c.name) {
                return Err(SchemaError::Malformed {
                    pos: *pos,
                    message: format!("class `{}` is declared twice", c.name),
                });
            }
        }
        drop(declared);

        while !pending.is_empty() {
            let ready = pending.iter().position(|(c, _)| {
                c.superclass
                    .as_ref()
                    .is_none_or(|p| self.classes.contains_key(p) || *p == c.name)
            });
            let Some(i) = ready else {
                let (c, _) = &pending[0];
                return Err(self.stuck_error(c, &pending));
            };
            let (c, _) = pending.remove(i);
            self.register_class(c)?;
        }
        self.finalize()
    }

    fn stuck_error(&self, start: &EntityClass, pending: &[(EntityClass, Position)]) -> SchemaError {
        let by_name: HashMap<&str, &EntityClass> = pending.iter().map(|(c, _)| (c.name.as_str(), c)).collect();
        let mut seen = HashSet::new();
        let mut cur = start;
        loop {
            if !seen.insert(cur.name.as_str()) {
                return SchemaError::InheritanceCycle(cur.name.clone());
            }
            let parent = cur.superclass.as_deref().expect("stuck classes have a parent");
            match by_name.get(parent) {
                Some(p) => cur = p,
                None => {
                    return SchemaError::UnknownSuperclass {
                        class: cur.name.clone(),
                        superclass: parent.to_string(),
                    }
                }
            }
        }
    }
}

fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn malformed(pos: Position, message: impl Into<String>) -> SchemaError {
    SchemaError::Malformed {
        pos,
        message: message.into(),
    }
}

fn atom_arg<'a>(t: &'a Term, what: &str, pos: Position) -> Result<&'a str, SchemaError> {
    match t {
        Term::Atom(a) => Ok(a),
        other => Err(malformed(pos, format!("{what} must be an atom, found {other}"))),
    }
}

fn list_arg<'a>(t: &'a Term, what: &str, pos: Position) -> Result<&'a [Term], SchemaError> {
    match t {
        Term::List(items, None) => Ok(items),
        other => Err(malformed(pos, format!("{what} must be a proper list, found {other}"))),
    }
}

fn class_from_clause(clause: &Term, pos: Position) -> Result<EntityClass, SchemaError> {
    let Term::Struct(f, args) = clause else {
        return Err(malformed(pos, format!("expected class/3, found {clause}")));
    };
    if f != "class" || args.len() != 3 {
        return Err(malformed(pos, format!("expected class/3, found {f}/{}", args.len())));
    }
    let mut class = EntityClass::new(atom_arg(&args[0], "class name", pos)?);
    for opt in list_arg(&args[1], "class options", pos)? {
        match opt {
            Term::Atom(a) if a == "abstract" => class.is_abstract = true,
            Term::Atom(a) if a == "association" => class.is_association = true,
            Term::Struct(o, v) if o == "extends" && v.len() == 1 => {
                if class.superclass.is_some() {
                    return Err(malformed(pos, "only one extends/1 option is allowed"));
                }
                class.superclass = Some(atom_arg(&v[0], "superclass", pos)?.to_string());
            }
            Term::Struct(o, v) if o == "functor" && v.len() == 1 => {
                class.functor = atom_arg(&v[0], "functor", pos)?.to_string();
            }
            other => return Err(malformed(pos, format!("unknown class option {other}"))),
        }
    }
    for attr in list_arg(&args[2], "attribute list", pos)? {
        class.attributes.push(attr_from_term(attr, pos)?);
    }
    Ok(class)
}

fn attr_from_term(t: &Term, pos: Position) -> Result<AttributeSpec, SchemaError> {
    let args = match t {
        Term::Struct(f, args) if f == "attr" && (args.len() == 2 || args.len() == 3) => args,
        other => return Err(malformed(pos, format!("expected attr/2 or attr/3, found {other}"))),
    };
    let name = atom_arg(&args[0], "attribute name", pos)?;
    let spec = AttributeSpec::new(name, type_from_term(&args[1], pos)?);
    match args.get(2) {
        None => Ok(spec),
        Some(Term::Atom(a)) if a == "nullable" => Ok(spec.with_nullable(true)),
        Some(Term::Atom(a)) if a == "required" => Ok(spec.with_nullable(false)),
        Some(other) => Err(malformed(pos, format!("unknown nullability {other}"))),
    }
}

fn type_from_term(t: &Term, pos: Position) -> Result<TypeRef, SchemaError> {
    match t {
        Term::Atom(a) => match a.as_str() {
            "bool" => Ok(TypeRef::Bool),
            "int" => Ok(TypeRef::Int),
            "float" => Ok(TypeRef::Float),
            "string" => Ok(TypeRef::String),
            _ => Err(malformed(pos, format!("unknown type {t}"))),
        },
        Term::Struct(f, args) if f == "list" && args.len() == 1 => Ok(TypeRef::list_of(type_from_term(&args[0], pos)?)),
        Term::Struct(f, args) if f == "entity" && args.len() == 1 => {
            Ok(TypeRef::entity(atom_arg(&args[0], "entity class", pos)?))
        }
        other => Err(malformed(pos, format!("unknown type {other}"))),
    }
}
