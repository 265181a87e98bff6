use std::sync::Arc;

use predmap::converter::Slot;
use predmap::text::parse_clauses;
use predmap::{
    decode, parse_program, parse_term, print_canonical, to_template, to_term, unify, KnowledgeBase, ObjectValue,
    QueryObject, Registry, Substitution, Term,
};

const SCHEMA: &str = include_str!("../testdata/geometry.pls");
const LISTING: &str = include_str!("../testdata/tetragon.pl");
const DECLARATIONS: &str = include_str!("../testdata/declarations.pl");

fn registry() -> Arc<Registry> {
    Arc::new(Registry::from_schema(SCHEMA).unwrap())
}

fn normalized(text: &str) -> String {
    text.chars().filter(|c| !c.is_whitespace()).collect()
}

fn point(id: &str, x: i64, y: i64) -> ObjectValue {
    ObjectValue::entity(
        "Point",
        vec![ObjectValue::str(id), ObjectValue::Int(x), ObjectValue::Int(y)],
    )
}

fn segment(id: &str, p0: ObjectValue, p1: ObjectValue) -> ObjectValue {
    ObjectValue::entity("Segment", vec![ObjectValue::str(id), p0, p1])
}

fn tetragon() -> ObjectValue {
    let (a, b, c, d) = (point("a", 2, 2), point("b", 2, 6), point("c", 6, 6), point("d", 6, 2));
    ObjectValue::entity(
        "Tetragon",
        vec![
            ObjectValue::str("abcd"),
            ObjectValue::Array(vec![
                segment("ab", a.clone(), b.clone()),
                segment("bc", b.clone(), c.clone()),
                segment("cd", c.clone(), d.clone()),
                segment("da", d.clone(), a.clone()),
            ]),
            ObjectValue::Array(vec![segment("ac", a, c), segment("bd", b, d)]),
        ],
    )
}

#[test]
fn tetragon_encodes_to_the_listing() {
    let t = to_term(&registry(), &tetragon()).unwrap();
    assert!(t.is_ground());
    assert_eq!(format!("{}.", print_canonical(&t)), normalized(LISTING));
}

#[test]
fn listing_decodes_to_the_tetragon() {
    let fact = parse_term(LISTING).unwrap();
    assert_eq!(decode(&registry(), &fact).unwrap(), tetragon());
}

#[test]
fn independent_parses_are_equal() {
    let a = parse_program(LISTING).unwrap();
    let b = parse_program(LISTING).unwrap();
    assert_eq!(a.len(), 1);
    assert_eq!(a, b);
}

#[test]
fn declarations_listing() {
    let decls = parse_program(DECLARATIONS).unwrap();
    let r = registry();
    assert_eq!(decls[0], r.most_general_term("Polygon").unwrap());
    assert_eq!(decls[1], r.most_general_term("Tetragon").unwrap());
    let emitted = r.emit_declarations();
    for line in DECLARATIONS.lines() {
        assert!(emitted.lines().any(|l| l == line), "missing {line}");
    }
}

#[test]
fn query_by_id_binds_segments_and_diagonals() {
    let mut kb = KnowledgeBase::new(registry());
    assert_eq!(kb.load_str(LISTING).unwrap(), 1);
    let goal = parse_term("'Polygon'(abcd,S,D)").unwrap();
    let hits = kb.query(&goal);
    assert_eq!(hits.len(), 1);
    let Term::Struct(_, args) = hits[0].0 else { panic!() };
    let s = &hits[0].1;
    assert_eq!(s.get(0), Some(&args[1]));
    assert_eq!(s.get(1), Some(&args[2]));
    assert!(kb.query(&parse_term("'Polygon'(xyz,S,D)").unwrap()).is_empty());
    assert!(kb.query(&parse_term("'Polygon'(abcd,S)").unwrap()).is_empty());

    let direct = unify(&goal, hits[0].0, &Substitution::new()).unwrap();
    assert_eq!(&direct, s);
}

#[test]
fn save_find_retract() {
    let r = registry();
    let mut kb = KnowledgeBase::new(r.clone());
    assert!(kb.save_object(&tetragon()).unwrap());
    assert!(!kb.save_object(&tetragon()).unwrap());
    assert_eq!(kb.to_text(), format!("{}\n", normalized(LISTING)));

    let q = QueryObject::any(&r, "Tetragon")
        .unwrap()
        .with(&r, "id", ObjectValue::str("abcd"))
        .unwrap();
    assert_eq!(
        print_canonical(&to_template(&r, &q).unwrap()),
        "'Polygon'(abcd,Segments,Diagonals)"
    );
    assert_eq!(kb.find(&q).unwrap(), vec![tetragon()]);
    // a plain polygon query does not see the arity-3 fact
    assert!(kb.find(&QueryObject::any(&r, "Polygon").unwrap()).unwrap().is_empty());

    let anon = QueryObject::new(
        "Tetragon",
        vec![
            Slot::Value(ObjectValue::str("abcd")),
            Slot::Unbound("_".into()),
            Slot::Unbound("_".into()),
        ],
    );
    assert_eq!(kb.retract(&to_template(&r, &anon).unwrap()), 1);
    assert!(kb.is_empty());
}

#[test]
fn load_reports_non_ground_clause() {
    let mut kb = KnowledgeBase::new(registry());
    let err = kb.load_str("'Polygon'(Id,S).").unwrap_err();
    assert!(err.to_string().contains("not ground"), "{err}");
    let clauses = parse_clauses(LISTING).unwrap();
    assert_eq!(clauses[0].1.line, 1);
}
