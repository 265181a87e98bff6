use std::collections::{HashMap, HashSet};
use std::fmt::Write;

use super::lexer::is_alnum;
use crate::term::{Term, Var};

/// Single-line canonical text for a term. No spaces, atoms quoted only when
/// needed, floats in shortest round-trip form.
pub fn print_canonical(t: &Term) -> String {
    let names = variable_names(t);
    let mut out = String::new();
    write_term(&mut out, t, &names);
    out
}

/// `true` iff the atom prints without quotes.
pub fn is_plain_atom(text: &str) -> bool {
    let mut chars = text.chars();
    chars.next().is_some_and(|c| c.is_ascii_lowercase()) && chars.all(is_alnum)
}

pub fn quote_atom(text: &str) -> String {
    if is_plain_atom(text) {
        return text.to_string();
    }
    let mut out = String::with_capacity(text.len() + 2);
    out.push('\'');
    for c in text.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\'' => out.push_str("\\'"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('\'');
    out
}

pub fn format_float(x: f64) -> String {
    let s = format!("{x:?}");
    if s.contains('.') {
        return s;
    }
    match s.find('e') {
        Some(e) => format!("{}.0{}", &s[..e], &s[e..]),
        None => format!("{s}.0"),
    }
}

fn is_var_name(name: &str) -> bool {
    let mut chars = name.chars();
    chars.next().is_some_and(|c| c.is_ascii_uppercase() || c == '_') && chars.all(is_alnum)
}

/// Chooses a printable name per variable id. Names are kept unless two ids
/// share one, in which case later ids get a numeric suffix.
fn variable_names(t: &Term) -> HashMap<u64, String> {
    let mut order: Vec<Var> = Vec::new();
    let mut counts: HashMap<u64, usize> = HashMap::new();
    t.visit_vars(&mut |v| {
        let n = counts.entry(v.id).or_insert(0);
        if *n == 0 {
            order.push(v.clone());
        }
        *n += 1;
    });
    let mut taken: HashSet<String> = order
        .iter()
        .filter(|v| is_var_name(&v.name))
        .map(|v| v.name.clone())
        .collect();
    let mut assigned: HashSet<String> = HashSet::new();
    let mut names = HashMap::new();
    for v in order {
        if v.is_anonymous() && counts[&v.id] == 1 {
            names.insert(v.id, "_".to_string());
            continue;
        }
        let base = if is_var_name(&v.name) {
            v.name.clone()
        } else if v.name.starts_with(|c: char| c.is_ascii_lowercase()) && v.name.chars().all(is_alnum) {
            let mut s = v.name.clone();
            s[..1].make_ascii_uppercase();
            s
        } else {
            "_G".to_string()
        };
        let name = if !v.is_anonymous() && !assigned.contains(&base) && (base == v.name || !taken.contains(&base)) {
            base
        } else {
            let stem = if base.ends_with('_') { base } else { format!("{base}_") };
            (1..)
                .map(|n| format!("{stem}{n}"))
                .find(|cand| !taken.contains(cand) && !assigned.contains(cand))
                .expect("unbounded suffix search")
        };
        taken.insert(name.clone());
        assigned.insert(name.clone());
        names.insert(v.id, name);
    }
    names
}

fn write_term(out: &mut String, t: &Term, names: &HashMap<u64, String>) {
    match t {
        Term::Var(v) => out.push_str(&names[&v.id]),
        Term::Atom(a) => out.push_str(&quote_atom(a)),
        Term::Int(i) => {
            let _ = write!(out, "{i}");
        }
        Term::Float(x) => out.push_str(&format_float(*x)),
        Term::Struct(f, args) => {
            out.push_str(&quote_atom(f));
            out.push('(');
            write_seq(out, args, names);
            out.push(')');
        }
        Term::List(items, tail) => {
            out.push('[');
            write_seq(out, items, names);
            if let Some(v) = tail {
                if !items.is_empty() {
                    out.push('|');
                }
                out.push_str(&names[&v.id]);
            }
            out.push(']');
        }
    }
}

fn write_seq(out: &mut String, items: &[Term], names: &HashMap<u64, String>) {
    for (i, item) in items.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        write_term(out, item, names);
    }
}
