//! Config files.
//!
//! ```text
//! config    := section*
//! section   := head '{' (entry | sep)* '}'
//! head      := 'system' | 'budgets' | 'tolerances' | 'element' NAME | 'rep' NAME
//! entry     := KEY '=' VALUE
//! sep       := newline | ';'
//! ```
//!
//! A value runs to the end of the line, a `;`, or the closing brace of its
//! section; brackets and braces inside a value must balance. `#` starts a
//! comment.
//!
//! | section      | keys |
//! |--------------|------|
//! | `system`     | `kind` (`circle`, `sft`, `permutation`), `k`, `matrix`, `perm` |
//! | `element N`  | `expr`, `semicrossed` |
//! | `rep N`      | `spec` |
//! | `budgets`    | `nmax`, `grid`, `window`, `seed`, `procedural`, `denominator`, `word_period`, `cases` |
//! | `tolerances` | `covariance`, `lemma5_slack`, `halving`, `lemma6`, `bracket_width`, `norm`, `matrix` |

use std::collections::BTreeMap;

use crate::dynsys::DynamicalSystem;
use crate::element::Element;
use crate::error::{Error, Result};
use crate::norms::Budget;
use crate::repr::RepSpec;
use crate::verify::Tolerances;

use super::parse::{parse_element, parse_rep_spec};

/// A named element from the config.
#[derive(Debug, Clone)]
pub struct ElementSpec {
    pub expr: String,
    pub element: Element,
    pub semicrossed: bool,
}

/// A parsed and validated config.
#[derive(Debug, Clone)]
pub struct Config {
    pub system: DynamicalSystem,
    pub elements: BTreeMap<String, ElementSpec>,
    pub reps: BTreeMap<String, RepSpec>,
    pub budget: Budget,
    pub tolerances: Tolerances,
    /// Random cases per randomized check.
    pub cases: usize,
}

impl Default for Config {
    /// The doubling map with default budgets.
    fn default() -> Self {
        Self {
            system: DynamicalSystem::CircleTimesK { k: 2 },
            elements: BTreeMap::new(),
            reps: BTreeMap::new(),
            budget: Budget::default(),
            tolerances: Tolerances::default(),
            cases: 20,
        }
    }
}

#[derive(Debug)]
struct Entry {
    line: usize,
    key: String,
    value: String,
}

#[derive(Debug)]
struct Section {
    line: usize,
    kind: String,
    name: Option<String>,
    entries: Vec<Entry>,
}

fn syntax(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn sections(text: &str) -> Result<Vec<Section>> {
    let chars: Vec<char> = text.chars().collect();
    let mut line = 1;
    let mut i = 0;
    let mut out: Vec<Section> = Vec::new();
    let mut open = false;
    while i < chars.len() {
        let c = chars[i];
        match c {
            '\n' => {
                line += 1;
                i += 1;
            }
            ';' => i += 1,
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            c if c.is_whitespace() => i += 1,
            '}' => {
                if !open {
                    return Err(syntax(line, "unmatched '}'"));
                }
                open = false;
                i += 1;
            }
            _ => {
                let start = i;
                while i < chars.len() && !matches!(chars[i], '=' | '{' | '}' | '\n' | ';' | '#') {
                    i += 1;
                }
                let head: String = chars[start..i].iter().collect();
                let head = head.trim();
                match chars.get(i) {
                    Some('{') => {
                        if open {
                            return Err(syntax(line, format!("section {head:?} cannot be nested")));
                        }
                        let words: Vec<&str> = head.split_whitespace().collect();
                        let (kind, name) = match words.as_slice() {
                            [kind] => (kind.to_string(), None),
                            [kind, name] => (kind.to_string(), Some(name.to_string())),
                            _ => return Err(syntax(line, format!("bad section header {head:?}"))),
                        };
                        out.push(Section { line, kind, name, entries: Vec::new() });
                        open = true;
                        i += 1;
                    }
                    Some('=') => {
                        if !open {
                            return Err(syntax(line, format!("key {head:?} outside a section")));
                        }
                        if head.is_empty() || head.contains(char::is_whitespace) {
                            return Err(syntax(line, format!("bad key {head:?}")));
                        }
                        i += 1;
                        let entry_line = line;
                        let vstart = i;
                        let mut depth: i32 = 0;
                        while i < chars.len() {
                            match chars[i] {
                                '(' | '[' | '{' => depth += 1,
                                ')' | ']' => depth -= 1,
                                '}' if depth > 0 => depth -= 1,
                                '}' | '\n' | ';' | '#' if depth <= 0 => break,
                                '\n' => line += 1,
                                _ => {}
                            }
                            i += 1;
                        }
                        if depth != 0 {
                            return Err(syntax(entry_line, format!("unbalanced brackets in value of {head:?}")));
                        }
                        let value: String = chars[vstart..i].iter().collect();
                        let section = out.last_mut().expect("open section");
                        section.entries.push(Entry { line: entry_line, key: head.to_string(), value: value.trim().into() });
                    }
                    _ => return Err(syntax(line, format!("expected '=' or '{{' after {head:?}"))),
                }
            }
        }
    }
    if open {
        return Err(syntax(line, "unclosed section"));
    }
    Ok(out)
}

/// Entries of one section, consumed key by key; leftovers are unknown keys.
struct Fields {
    section: String,
    entries: BTreeMap<String, Entry>,
}

impl Fields {
    fn new(s: Section) -> Result<Self> {
        let section = match &s.name {
            Some(n) => format!("{} {n}", s.kind),
            None => s.kind.clone(),
        };
        let mut entries = BTreeMap::new();
        for e in s.entries {
            if entries.contains_key(&e.key) {
                return Err(syntax(e.line, format!("duplicate key {:?} in {section}", e.key)));
            }
            entries.insert(e.key.clone(), e);
        }
        Ok(Self { section, entries })
    }

    fn take(&mut self, key: &str) -> Option<Entry> {
        self.entries.remove(key)
    }

    fn required(&mut self, key: &str, line: usize) -> Result<Entry> {
        self.take(key).ok_or_else(|| syntax(line, format!("{} is missing {key:?}", self.section)))
    }

    fn parsed<T: std::str::FromStr>(&mut self, key: &str) -> Result<Option<T>> {
        match self.take(key) {
            None => Ok(None),
            Some(e) => e
                .value
                .parse::<T>()
                .map(Some)
                .map_err(|_| syntax(e.line, format!("{key}: cannot parse {:?}", e.value))),
        }
    }

    fn finish(self) -> Result<()> {
        match self.entries.into_values().next() {
            Some(e) => Err(syntax(e.line, format!("unknown key {:?} in {}", e.key, self.section))),
            None => Ok(()),
        }
    }
}

fn int_list(e: &Entry) -> Result<Vec<usize>> {
    let inner = e
        .value
        .trim()
        .strip_prefix('[')
        .and_then(|v| v.strip_suffix(']'))
        .ok_or_else(|| syntax(e.line, format!("{}: expected [a, b, ...]", e.key)))?;
    inner
        .split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| t.trim().parse::<usize>().map_err(|_| syntax(e.line, format!("{}: bad entry {t:?}", e.key))))
        .collect()
}

fn matrix(e: &Entry) -> Result<Vec<Vec<bool>>> {
    let v = e.value.trim();
    let inner = v
        .strip_prefix('[')
        .and_then(|v| v.strip_suffix(']'))
        .ok_or_else(|| syntax(e.line, "matrix: expected [[..], [..]]"))?;
    let mut rows = Vec::new();
    let mut rest = inner.trim();
    while !rest.is_empty() {
        let open = rest.strip_prefix('[').ok_or_else(|| syntax(e.line, "matrix: expected a row [..]"))?;
        let close = open.find(']').ok_or_else(|| syntax(e.line, "matrix: unclosed row"))?;
        let row = open[..close]
            .split(',')
            .map(|t| match t.trim() {
                "0" => Ok(false),
                "1" => Ok(true),
                other => Err(syntax(e.line, format!("matrix: entries must be 0 or 1, got {other:?}"))),
            })
            .collect::<Result<Vec<bool>>>()?;
        rows.push(row);
        rest = open[close + 1..].trim_start();
        rest = rest.strip_prefix(',').unwrap_or(rest).trim_start();
    }
    Ok(rows)
}

fn system(mut f: Fields, line: usize) -> Result<DynamicalSystem> {
    let kind = f.required("kind", line)?;
    let sys = match kind.value.as_str() {
        "circle" => {
            let k = f.parsed::<u32>("k")?.unwrap_or(2);
            DynamicalSystem::circle(k)?
        }
        "sft" => DynamicalSystem::sft(matrix(&f.required("matrix", line)?)?)?,
        "permutation" => DynamicalSystem::permutation(int_list(&f.required("perm", line)?)?)?,
        other => return Err(syntax(kind.line, format!("unknown system kind {other:?}"))),
    };
    f.finish()?;
    Ok(sys)
}

fn budgets(mut f: Fields, cfg: &mut Config) -> Result<()> {
    let b = &mut cfg.budget;
    macro_rules! set {
        ($key:literal, $field:expr) => {
            if let Some(v) = f.parsed($key)? {
                $field = v;
            }
        };
    }
    set!("nmax", b.n_max);
    set!("grid", b.grid);
    set!("window", b.window);
    set!("seed", b.seed);
    set!("procedural", b.procedural);
    set!("denominator", b.max_denominator);
    set!("word_period", b.max_word_period);
    set!("cases", cfg.cases);
    f.finish()
}

fn tolerances(mut f: Fields, t: &mut Tolerances) -> Result<()> {
    for (key, field) in [
        ("covariance", &mut t.covariance),
        ("lemma5_slack", &mut t.lemma5_slack),
        ("halving", &mut t.halving),
        ("lemma6", &mut t.lemma6),
        ("bracket_width", &mut t.bracket_width),
        ("norm", &mut t.norm),
        ("matrix", &mut t.matrix),
    ] {
        if let Some(v) = f.parsed::<f64>(key)? {
            *field = v;
        }
    }
    f.finish()
}

fn element(mut f: Fields, sys: &DynamicalSystem, line: usize) -> Result<ElementSpec> {
    let expr = f.required("expr", line)?;
    let semicrossed = f.parsed::<bool>("semicrossed")?.unwrap_or(false);
    f.finish()?;
    let element = parse_element(sys, &expr.value).map_err(|e| syntax(expr.line, format!("expr: {e}")))?;
    if semicrossed {
        element.require_semicrossed()?;
    }
    Ok(ElementSpec { expr: expr.value, element, semicrossed })
}

/// Parses and validates a config.
pub fn parse_config(text: &str) -> Result<Config> {
    let mut secs = sections(text)?;
    let sys_pos = secs
        .iter()
        .position(|s| s.kind == "system")
        .ok_or_else(|| syntax(1, "missing system section"))?;
    let sys_sec = secs.remove(sys_pos);
    if sys_sec.name.is_some() {
        return Err(syntax(sys_sec.line, "system section takes no name"));
    }
    let line = sys_sec.line;
    let mut cfg = Config { system: system(Fields::new(sys_sec)?, line)?, ..Config::default() };
    let mut seen = Vec::new();
    for s in secs {
        let line = s.line;
        let kind = s.kind.clone();
        let name = s.name.clone();
        match (kind.as_str(), name) {
            ("system", _) => return Err(syntax(line, "duplicate system section")),
            ("budgets" | "tolerances", Some(_)) => return Err(syntax(line, format!("{kind} section takes no name"))),
            ("budgets" | "tolerances", None) if seen.contains(&kind) => {
                return Err(syntax(line, format!("duplicate {kind} section")));
            }
            ("budgets", None) => budgets(Fields::new(s)?, &mut cfg)?,
            ("tolerances", None) => tolerances(Fields::new(s)?, &mut cfg.tolerances)?,
            ("element" | "rep", None) => return Err(syntax(line, format!("{kind} section needs a name"))),
            ("element", Some(n)) => {
                if cfg.elements.contains_key(&n) {
                    return Err(syntax(line, format!("duplicate element {n:?}")));
                }
                let spec = element(Fields::new(s)?, &cfg.system, line)?;
                cfg.elements.insert(n, spec);
            }
            ("rep", Some(n)) => {
                if cfg.reps.contains_key(&n) {
                    return Err(syntax(line, format!("duplicate rep {n:?}")));
                }
                let mut f = Fields::new(s)?;
                let spec = f.required("spec", line)?;
                f.finish()?;
                let rep = parse_rep_spec(&cfg.system, &spec.value).map_err(|e| syntax(spec.line, format!("spec: {e}")))?;
                cfg.reps.insert(n, rep);
            }
            _ => return Err(syntax(line, format!("unknown section {kind:?}"))),
        }
        seen.push(kind);
    }
    Ok(cfg)
}
