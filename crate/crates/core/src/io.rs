//! Line-oriented text formats for atom structures and candidate maps.
//!
//! Algebra files:
//!
//! ```text
//! # comment
//! algebra point
//! atoms e l g
//! identity e
//! converse l g
//! comp l l : l
//! comp l g : e l g
//! ```
//!
//! `converse` lines list one orbit each (fixed points may be omitted) and
//! omitted `comp` entries are empty.
//!
//! Representation files:
//!
//! ```text
//! representation theta
//! algebra point
//! base 3
//! map e + l : (0,0) (0,1)
//! ```
//!
//! Elements are written `0`, `1` or as `+`-sums of atom names.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use crate::algebra::{is_identifier, AlgebraError, AtomSet, AtomStructure};
use crate::relation::{parse_pairs, FiniteBase, Relation};
use crate::representation::{CandidateMap, RepresentationError};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("line {line}, column {col}: {message}")]
    Syntax {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("invalid algebra: {0}")]
    Algebra(#[from] AlgebraError),
    #[error("invalid representation: {0}")]
    Representation(#[from] RepresentationError),
    #[error("{path}: {source}")]
    File {
        path: String,
        source: std::io::Error,
    },
}

impl IoError {
    /// The 1-based line a syntax error points at.
    pub fn line(&self) -> Option<usize> {
        match self {
            IoError::Syntax { line, .. } => Some(*line),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Token<'a> {
    text: &'a str,
    col: usize,
}

struct Line<'a> {
    number: usize,
    tokens: Vec<Token<'a>>,
}

impl Line<'_> {
    fn err(&self, col: usize, message: impl Into<String>) -> IoError {
        IoError::Syntax {
            line: self.number,
            col,
            message: message.into(),
        }
    }

    fn at(&self, tok: &Token, message: impl Into<String>) -> IoError {
        self.err(tok.col, message)
    }

    fn end_col(&self) -> usize {
        self.tokens
            .last()
            .map_or(1, |t| t.col + t.text.chars().count())
    }
}

/// Splits on whitespace after removing `#` comments; columns are 1-based chars.
fn lines(text: &str) -> impl Iterator<Item = Line<'_>> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let body = raw.split('#').next().unwrap_or("");
        let mut tokens = Vec::new();
        let mut start: Option<usize> = None;
        for (pos, (byte, c)) in body.char_indices().chain([(body.len(), ' ')]).enumerate() {
            match (c.is_whitespace(), start) {
                (false, None) => start = Some(byte),
                (true, Some(s)) => {
                    let text = &body[s..byte];
                    tokens.push(Token {
                        text,
                        col: pos + 1 - text.chars().count(),
                    });
                    start = None;
                }
                _ => {}
            }
        }
        (!tokens.is_empty()).then_some(Line {
            number: i + 1,
            tokens,
        })
    })
}

fn rest_col(line: &Line, raw_tokens_before: usize) -> usize {
    line.tokens
        .get(raw_tokens_before)
        .map_or(line.end_col(), |t| t.col)
}

pub fn parse_algebra(text: &str) -> Result<AtomStructure, IoError> {
    let mut name: Option<String> = None;
    let mut atoms: Option<(Vec<String>, HashMap<String, usize>)> = None;
    let mut identity: Option<AtomSet> = None;
    let mut converse: Vec<Option<usize>> = Vec::new();
    let mut table: Vec<Vec<Option<AtomSet>>> = Vec::new();

    for line in lines(text) {
        let head = line.tokens[0];
        let args = &line.tokens[1..];
        let lookup = |tok: &Token| -> Result<usize, IoError> {
            let (_, index) = atoms
                .as_ref()
                .ok_or_else(|| line.at(&head, "`atoms` must come first"))?;
            index
                .get(tok.text)
                .copied()
                .ok_or_else(|| line.at(tok, format!("unknown atom `{}`", tok.text)))
        };
        match head.text {
            "algebra" => {
                if name.is_some() {
                    return Err(line.at(&head, "duplicate `algebra` line"));
                }
                match args {
                    [n] if is_identifier(n.text) => name = Some(n.text.to_string()),
                    [n] => return Err(line.at(n, format!("invalid algebra name `{}`", n.text))),
                    _ => return Err(line.at(&head, "expected `algebra <name>`")),
                }
            }
            "atoms" => {
                if atoms.is_some() {
                    return Err(line.at(&head, "duplicate `atoms` line"));
                }
                if args.is_empty() {
                    return Err(line.err(line.end_col(), "expected at least one atom"));
                }
                let mut names = Vec::new();
                let mut index = HashMap::new();
                for tok in args {
                    if !is_identifier(tok.text) {
                        return Err(line.at(tok, format!("invalid atom name `{}`", tok.text)));
                    }
                    if index.insert(tok.text.to_string(), names.len()).is_some() {
                        return Err(line.at(tok, format!("duplicate atom `{}`", tok.text)));
                    }
                    names.push(tok.text.to_string());
                }
                let n = names.len();
                converse = vec![None; n];
                table = vec![vec![None; n]; n];
                atoms = Some((names, index));
            }
            "identity" => {
                if identity.is_some() {
                    return Err(line.at(&head, "duplicate `identity` line"));
                }
                let mut set = AtomSet::EMPTY;
                for tok in args {
                    set.insert(lookup(tok)?);
                }
                identity = Some(set);
            }
            "converse" => {
                let [a, b] = args else {
                    return Err(line.at(&head, "expected `converse <atom> <atom>`"));
                };
                let (i, j) = (lookup(a)?, lookup(b)?);
                for (x, y, tok) in [(i, j, a), (j, i, b)] {
                    match converse[x] {
                        Some(prev) if prev != y => {
                            return Err(
                                line.at(tok, format!("converse of `{}` already given", tok.text))
                            )
                        }
                        _ => converse[x] = Some(y),
                    }
                }
            }
            "comp" => {
                let colon = args.iter().position(|t| t.text == ":");
                let (Some(2), [a, b, ..]) = (colon, args) else {
                    return Err(line.at(&head, "expected `comp <atom> <atom> : <atoms>`"));
                };
                let (i, j) = (lookup(a)?, lookup(b)?);
                if table[i][j].is_some() {
                    return Err(line.at(a, format!("entry `{} ; {}` given twice", a.text, b.text)));
                }
                let mut set = AtomSet::EMPTY;
                for tok in &args[3..] {
                    set.insert(lookup(tok)?);
                }
                table[i][j] = Some(set);
            }
            other => return Err(line.at(&head, format!("unknown directive `{other}`"))),
        }
    }

    let name = name.ok_or(IoError::Syntax {
        line: 1,
        col: 1,
        message: "missing `algebra` line".into(),
    })?;
    let (names, _) = atoms.ok_or(IoError::Syntax {
        line: 1,
        col: 1,
        message: "missing `atoms` line".into(),
    })?;
    let identity = identity.ok_or(IoError::Syntax {
        line: 1,
        col: 1,
        message: "missing `identity` line".into(),
    })?;
    let converse = converse
        .iter()
        .enumerate()
        .map(|(i, c)| c.unwrap_or(i))
        .collect();
    let table = table
        .into_iter()
        .map(|row| row.into_iter().map(Option::unwrap_or_default).collect())
        .collect();
    Ok(AtomStructure::new(name, names, converse, identity, table)?)
}

pub fn write_algebra(alg: &AtomStructure) -> String {
    let mut out = String::new();
    let names = alg.atom_names();
    let _ = writeln!(out, "algebra {}", alg.name());
    let _ = writeln!(out, "atoms {}", names.join(" "));
    let ids: Vec<_> = alg
        .identity_atoms()
        .iter()
        .map(|a| names[a].as_str())
        .collect();
    let _ = writeln!(out, "identity {}", ids.join(" "));
    for a in 0..alg.atom_count() {
        let c = alg.converse_atom(a);
        if a < c {
            let _ = writeln!(out, "converse {} {}", names[a], names[c]);
        }
    }
    for a in 0..alg.atom_count() {
        for b in 0..alg.atom_count() {
            let entry = alg.atom_compose(a, b);
            if !entry.is_empty() {
                let parts: Vec<_> = entry.iter().map(|c| names[c].as_str()).collect();
                let _ = writeln!(out, "comp {} {} : {}", names[a], names[b], parts.join(" "));
            }
        }
    }
    out
}

/// A parsed representation file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoadedRepresentation {
    pub name: String,
    pub map: CandidateMap,
    /// Elements with no `map` line, filled in additively.
    pub defaulted: Vec<AtomSet>,
}

fn parse_element_at(alg: &AtomStructure, line: &Line, toks: &[Token]) -> Result<AtomSet, IoError> {
    let Some(first) = toks.first() else {
        return Err(line.err(line.end_col(), "expected an element"));
    };
    if let [single] = toks {
        match single.text {
            "0" => return Ok(AtomSet::EMPTY),
            "1" => return Ok(alg.one()),
            _ => {}
        }
    }
    // Rejoin and split on `+` so `a+b` and `a + b` both work, tracking columns.
    let mut set = AtomSet::EMPTY;
    let mut expect_atom = true;
    for tok in toks {
        let mut col = tok.col;
        for (k, part) in tok.text.split('+').enumerate() {
            if k > 0 {
                if expect_atom {
                    return Err(line.err(col - 1, "expected an atom before `+`"));
                }
                expect_atom = true;
            }
            if !part.is_empty() {
                if !expect_atom {
                    return Err(line.err(col, "expected `+` between atoms"));
                }
                let a = alg
                    .atom_index(part)
                    .ok_or_else(|| line.err(col, format!("unknown atom `{part}`")))?;
                set.insert(a);
                expect_atom = false;
            }
            col += part.chars().count() + 1;
        }
    }
    if expect_atom {
        return Err(line.err(first.col, "element ends with `+`"));
    }
    Ok(set)
}

/// Parses a representation of `alg`. Atoms must all be listed; other missing
/// elements are filled in as unions of their atoms and reported in `defaulted`.
pub fn parse_representation(
    text: &str,
    alg: &AtomStructure,
) -> Result<LoadedRepresentation, IoError> {
    let mut name: Option<String> = None;
    let mut alg_seen = false;
    let mut base: Option<FiniteBase> = None;
    let mut given: HashMap<AtomSet, Relation> = HashMap::new();
    let mut last_line = 1;

    for line in lines(text) {
        last_line = line.number;
        let head = line.tokens[0];
        let args = &line.tokens[1..];
        match head.text {
            "representation" => match (args, &name) {
                (_, Some(_)) => return Err(line.at(&head, "duplicate `representation` line")),
                ([n], None) if is_identifier(n.text) => name = Some(n.text.to_string()),
                _ => return Err(line.at(&head, "expected `representation <name>`")),
            },
            "algebra" => match args {
                [n] if n.text == alg.name() => alg_seen = true,
                [n] => {
                    return Err(line.at(
                        n,
                        format!("file is for algebra `{}`, loaded `{}`", n.text, alg.name()),
                    ))
                }
                _ => return Err(line.at(&head, "expected `algebra <name>`")),
            },
            "base" => {
                if base.is_some() {
                    return Err(line.at(&head, "duplicate `base` line"));
                }
                let [n] = args else {
                    return Err(line.at(&head, "expected `base <n>`"));
                };
                let size = n
                    .text
                    .parse::<usize>()
                    .map_err(|_| line.at(n, "invalid base size"))?;
                base = Some(FiniteBase::new(size).map_err(|e| line.at(n, e.to_string()))?);
            }
            "map" => {
                let b = base.ok_or_else(|| line.at(&head, "`base` must come before `map`"))?;
                let colon = args
                    .iter()
                    .position(|t| t.text == ":")
                    .ok_or_else(|| line.err(line.end_col(), "expected `:`"))?;
                let x = parse_element_at(alg, &line, &args[..colon])?;
                if given.contains_key(&x) {
                    return Err(line.at(
                        &head,
                        format!("element `{}` mapped twice", alg.format_element(x)),
                    ));
                }
                let col = rest_col(&line, colon + 2);
                let rest: Vec<&str> = args[colon + 1..].iter().map(|t| t.text).collect();
                let pairs = parse_pairs(&rest.join(" ")).map_err(|m| line.err(col, m))?;
                let mut r = Relation::empty(b);
                for (p, q) in pairs {
                    r.insert(p, q).map_err(|e| line.err(col, e.to_string()))?;
                }
                given.insert(x, r);
            }
            other => return Err(line.at(&head, format!("unknown directive `{other}`"))),
        }
    }

    let missing = |what: &str| IoError::Syntax {
        line: last_line,
        col: 1,
        message: format!("missing `{what}` line"),
    };
    let name = name.ok_or_else(|| missing("representation"))?;
    if !alg_seen {
        return Err(missing("algebra"));
    }
    let base = base.ok_or_else(|| missing("base"))?;
    for a in 0..alg.atom_count() {
        if !given.contains_key(&AtomSet::singleton(a)) {
            return Err(IoError::Syntax {
                line: last_line,
                col: 1,
                message: format!("atom `{}` has no `map` line", alg.atom_name(a)),
            });
        }
    }
    let mut defaulted = Vec::new();
    let images = alg
        .elements()
        .map(|x| {
            given.get(&x).copied().unwrap_or_else(|| {
                defaulted.push(x);
                x.iter().fold(Relation::empty(base), |acc, a| {
                    acc.union(&given[&AtomSet::singleton(a)])
                        .expect("same base")
                })
            })
        })
        .collect();
    let map = CandidateMap::from_table(alg.clone(), base, images)?;
    Ok(LoadedRepresentation {
        name,
        map,
        defaulted,
    })
}

/// Writes every element's image, in bitmask order.
pub fn write_representation(m: &CandidateMap, name: &str) -> String {
    let alg = m.algebra();
    let mut out = String::new();
    let _ = writeln!(out, "representation {name}");
    let _ = writeln!(out, "algebra {}", alg.name());
    let _ = writeln!(out, "base {}", m.base().size());
    let elements: Vec<AtomSet> = if m.is_atomic() {
        (0..alg.atom_count()).map(AtomSet::singleton).collect()
    } else {
        alg.elements().collect()
    };
    for x in elements {
        let img = m.image(x);
        if img.is_empty() {
            let _ = writeln!(out, "map {} :", alg.format_element(x));
        } else {
            let _ = writeln!(out, "map {} : {img}", alg.format_element(x));
        }
    }
    out
}

fn read(path: &Path) -> Result<String, IoError> {
    std::fs::read_to_string(path).map_err(|source| IoError::File {
        path: path.display().to_string(),
        source,
    })
}

fn write(path: &Path, text: &str) -> Result<(), IoError> {
    std::fs::write(path, text).map_err(|source| IoError::File {
        path: path.display().to_string(),
        source,
    })
}

pub fn load_algebra(path: impl AsRef<Path>) -> Result<AtomStructure, IoError> {
    parse_algebra(&read(path.as_ref())?)
}

pub fn save_algebra(alg: &AtomStructure, path: impl AsRef<Path>) -> Result<(), IoError> {
    write(path.as_ref(), &write_algebra(alg))
}

pub fn load_representation(
    path: impl AsRef<Path>,
    alg: &AtomStructure,
) -> Result<LoadedRepresentation, IoError> {
    parse_representation(&read(path.as_ref())?, alg)
}

pub fn save_representation(
    m: &CandidateMap,
    name: &str,
    path: impl AsRef<Path>,
) -> Result<(), IoError> {
    write(path.as_ref(), &write_representation(m, name))
}
