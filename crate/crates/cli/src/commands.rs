use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use predmap::converter::named_variables;
use predmap::text::parse_clauses;
use predmap::{
    decode, parse_program, parse_term, print_canonical, to_term, KbError, KnowledgeBase, Mode, Registry, Term,
};

/// Options shared by every subcommand.
#[derive(Debug, Clone, Default)]
pub struct CliConfig {
    pub schema: Option<PathBuf>,
    pub kb: Option<PathBuf>,
    pub goal: Option<String>,
    pub out: Option<PathBuf>,
    pub permissive: bool,
}

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or I/O trouble: exit 2.
    Usage(String),
    /// Invalid input data: exit 1.
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Failed(_) => 1,
            CliError::Usage(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Failed(m) => f.write_str(m),
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn required<'a, T>(value: &'a Option<T>, flag: &str, cmd: &str) -> Result<&'a T> {
    value
        .as_ref()
        .ok_or_else(|| CliError::Usage(format!("`{cmd}` requires --{flag}")))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn load_registry(path: &Path) -> Result<Registry> {
    let text = read(path)?;
    Registry::from_schema(&text).map_err(|e| CliError::Failed(format!("{}: {e}", path.display())))
}

fn emit(cfg: &CliConfig, stdout: &mut dyn Write, payload: &str) -> Result<()> {
    match &cfg.out {
        Some(path) => fs::write(path, payload).map_err(|e| CliError::Usage(format!("{}: {e}", path.display()))),
        None => stdout
            .write_all(payload.as_bytes())
            .map_err(|e| CliError::Usage(format!("stdout: {e}"))),
    }
}

fn plural(n: usize, noun: &str) -> String {
    match (n, noun.ends_with('h')) {
        (1, _) => format!("1 {noun}"),
        (_, true) => format!("{n} {noun}es"),
        _ => format!("{n} {noun}s"),
    }
}

fn mode(cfg: &CliConfig) -> Mode {
    if cfg.permissive || cfg.schema.is_none() {
        Mode::Permissive
    } else {
        Mode::Strict
    }
}

/// Loads the KB named by `--kb` against the optional schema.
fn load_kb(cfg: &CliConfig, cmd: &str) -> Result<KnowledgeBase> {
    let kb_path = required(&cfg.kb, "kb", cmd)?;
    let registry = match &cfg.schema {
        Some(p) => load_registry(p)?,
        None => Registry::new(),
    };
    let text = read(kb_path)?;
    let mut kb = KnowledgeBase::with_mode(Arc::new(registry), mode(cfg));
    kb.load_str(&text)
        .map_err(|e| CliError::Failed(format!("{}:{}", kb_path.display(), located(&e))))?;
    Ok(kb)
}

fn located(e: &KbError) -> String {
    match e {
        KbError::Parse(p) => p.to_string(),
        KbError::Clause { pos, error } => format!("{pos}: {error}"),
        other => format!(" {other}"),
    }
}

/// Checks a KB file, printing one diagnostic per problem to `stderr`.
pub fn validate(cfg: &CliConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    let kb_path = required(&cfg.kb, "kb", "validate")?;
    let text = read(kb_path)?;
    let registry = cfg.schema.as_deref().map(load_registry).transpose()?;
    let name = kb_path.display();

    let clauses = match parse_clauses(&text) {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(stderr, "{name}:{}: {} (found `{}`)", e.pos, e.message, e.found);
            return Err(CliError::Failed(format!("{name}: 1 problem")));
        }
    };
    let mut problems = 0usize;
    let mut report = |pos, msg: String| {
        problems += 1;
        let _ = writeln!(stderr, "{name}:{pos}: {msg}");
    };
    for (fact, pos) in &clauses {
        if !fact.is_ground() {
            report(*pos, format!("fact is not ground: {fact}"));
            continue;
        }
        let Some((functor, arity)) = fact.indicator() else {
            report(*pos, format!("fact must be an atom or a structure: {fact}"));
            continue;
        };
        let Some(registry) = &registry else { continue };
        if registry.resolve(functor, arity).is_err() {
            if !cfg.permissive {
                let name = print_canonical(&Term::atom(functor));
                report(*pos, format!("no class registered for {name}/{arity}"));
            }
            continue;
        }
        if let Err(e) = decode(registry, fact) {
            report(*pos, format!("cannot decode: {e}"));
        }
    }
    if problems > 0 {
        return Err(CliError::Failed(format!("{name}: {}", plural(problems, "problem"))));
    }
    let _ = writeln!(stdout, "{name}: {} OK", plural(clauses.len(), "fact"));
    Ok(())
}

/// Prints every clause of the KB file in canonical form.
pub fn canon(cfg: &CliConfig, stdout: &mut dyn Write) -> Result<()> {
    let kb_path = required(&cfg.kb, "kb", "canon")?;
    let text = read(kb_path)?;
    let clauses = parse_program(&text).map_err(|e| CliError::Failed(format!("{}:{e}", kb_path.display())))?;
    let mut out = String::new();
    for c in &clauses {
        out.push_str(&print_canonical(c));
        out.push_str(".\n");
    }
    emit(cfg, stdout, &out)
}

pub fn decls(cfg: &CliConfig, stdout: &mut dyn Write) -> Result<()> {
    let registry = load_registry(required(&cfg.schema, "schema", "decls")?)?;
    emit(cfg, stdout, &registry.emit_declarations())
}

/// Prints each matching fact followed by the goal's variable bindings.
pub fn query(cfg: &CliConfig, stdout: &mut dyn Write) -> Result<()> {
    let goal_text = required(&cfg.goal, "goal", "query")?;
    let kb = load_kb(cfg, "query")?;
    let goal = parse_term(goal_text).map_err(|e| CliError::Failed(format!("goal: {e}")))?;
    let vars = named_variables(&goal);
    let hits = kb.query(&goal);
    let mut out = String::new();
    for (fact, s) in &hits {
        out.push_str(&print_canonical(fact));
        out.push_str(".\n");
        for v in &vars {
            let value = s.apply(&Term::Var(v.clone()));
            out.push_str(&format!("  {} = {}\n", v.name, print_canonical(&value)));
        }
    }
    out.push_str(&plural(hits.len(), "match"));
    out.push('\n');
    emit(cfg, stdout, &out)
}

/// Decodes and re-encodes every fact, failing on the first difference.
pub fn roundtrip(cfg: &CliConfig, stdout: &mut dyn Write) -> Result<()> {
    required(&cfg.schema, "schema", "roundtrip")?;
    let kb = load_kb(cfg, "roundtrip")?;
    let registry = kb.registry();
    let name = cfg.kb.as_ref().expect("checked by load_kb").display();
    let mut checked = 0;
    for (i, fact) in kb.facts().iter().enumerate() {
        let Some((functor, arity)) = fact.indicator() else {
            continue;
        };
        if cfg.permissive && registry.resolve(functor, arity).is_err() {
            continue;
        }
        let fail = |msg: String| CliError::Failed(format!("{name}: fact {}: {msg}", i + 1));
        let value = decode(registry, fact).map_err(|e| fail(format!("decode failed: {e}")))?;
        let back = to_term(registry, &value).map_err(|e| fail(format!("encode failed: {e}")))?;
        if &back != fact {
            return Err(fail(format!(
                "mismatch: {} re-encodes as {}",
                print_canonical(fact),
                print_canonical(&back)
            )));
        }
        checked += 1;
    }
    emit(cfg, stdout, &format!("{} round-tripped\n", plural(checked, "fact")))
}
