//! The embedded 101-alpha corpus and the alpha source-file format.
//!
//! A source file holds one expression per line. Blank lines and lines whose
//! first non-blank character is `#` are ignored. A line may carry a label of
//! the form `Alpha#<id>: <expression>`.

mod repairs;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::data::IndustryLevel;
use crate::expr::{compile, CompileError, Input, ValidatedExpr};

/// Corpus text in source-file format.
pub const CORPUS_SOURCE: &str = include_str!("../../corpus/alphas.txt");

/// Ids of the alphas that trade at the close of the day whose data they use.
pub const DELAY_ZERO_IDS: [u32; 4] = [42, 48, 53, 54];

/// A parenthesization fix applied to a formula as originally printed.
#[derive(Debug, Clone, Copy)]
pub struct Repair {
    pub id: u32,
    pub note: &'static str,
    pub original: &'static str,
}

/// Corpus formulas whose printed text did not balance, with the original text.
pub fn repairs() -> &'static [Repair] {
    repairs::REPAIRS
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DelayClass {
    Zero,
    One,
}

impl DelayClass {
    pub fn days(self) -> u8 {
        match self {
            DelayClass::Zero => 0,
            DelayClass::One => 1,
        }
    }
}

impl fmt::Display for DelayClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.days())
    }
}

#[derive(Debug, Clone)]
pub struct AlphaDef {
    pub id: u32,
    pub source: String,
    pub delay_class: DelayClass,
    pub required_inputs: BTreeSet<Input>,
    pub required_industry_levels: BTreeSet<IndustryLevel>,
    /// Differences from the formula as originally printed; empty if none.
    pub notes: String,
    pub expr: ValidatedExpr,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceEntry {
    /// Id from an `Alpha#<id>:` label, if present.
    pub id: Option<u32>,
    /// 1-based line number in the file.
    pub line: usize,
    pub text: String,
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum SourceError {
    #[error("no expressions found")]
    Empty,
    #[error("line {line}: malformed label `{label}`")]
    BadLabel { line: usize, label: String },
    #[error("line {line}: label has no expression")]
    MissingExpression { line: usize },
    #[error("line {line}: duplicate alpha id {id}")]
    DuplicateId { line: usize, id: u32 },
}

/// Split source text into expression entries.
pub fn parse_source(text: &str) -> Result<Vec<SourceEntry>, SourceError> {
    let mut entries = Vec::new();
    let mut seen = BTreeSet::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (id, body) = match split_label(trimmed) {
            Some((label, body)) => {
                let id = label
                    .parse::<u32>()
                    .map_err(|_| SourceError::BadLabel {
                        line,
                        label: format!("Alpha#{label}"),
                    })?;
                if !seen.insert(id) {
                    return Err(SourceError::DuplicateId { line, id });
                }
                (Some(id), body.trim())
            }
            None => (None, trimmed),
        };
        if body.is_empty() {
            return Err(SourceError::MissingExpression { line });
        }
        entries.push(SourceEntry {
            id,
            line,
            text: body.to_string(),
        });
    }
    if entries.is_empty() {
        return Err(SourceError::Empty);
    }
    Ok(entries)
}

fn split_label(line: &str) -> Option<(&str, &str)> {
    let prefix = line.get(..6)?;
    if !prefix.eq_ignore_ascii_case("alpha#") {
        return None;
    }
    let rest = &line[6..];
    let colon = rest.find(':')?;
    Some((rest[..colon].trim(), &rest[colon + 1..]))
}

/// Build the full corpus, ids 1 through 101 in order.
///
/// # Panics
///
/// Panics if the embedded text fails to compile, which the test suite rules out.
pub fn load_corpus() -> Vec<AlphaDef> {
    let entries = parse_source(CORPUS_SOURCE).expect("embedded corpus is well formed");
    entries
        .into_iter()
        .map(|entry| {
            let id = entry.id.expect("corpus entries are labelled");
            let expr = compile(&entry.text)
                .unwrap_or_else(|e| panic!("corpus Alpha#{id} does not compile: {e}"));
            AlphaDef {
                id,
                delay_class: if DELAY_ZERO_IDS.contains(&id) {
                    DelayClass::Zero
                } else {
                    DelayClass::One
                },
                required_inputs: expr.required_inputs.clone(),
                required_industry_levels: expr.required_industry_levels.clone(),
                notes: notes_for(id),
                source: entry.text,
                expr,
            }
        })
        .collect()
}

fn notes_for(id: u32) -> String {
    repairs::REPAIRS
        .iter()
        .find(|r| r.id == id)
        .map(|r| format!("{}; printed as: {}", r.note, r.original))
        .unwrap_or_default()
}

/// Compile user-supplied source text. Unlabelled entries are numbered by
/// position starting at 1.
pub fn compile_source(
    text: &str,
) -> Result<Vec<(SourceEntry, Result<ValidatedExpr, CompileError>)>, SourceError> {
    Ok(parse_source(text)?
        .into_iter()
        .map(|entry| {
            let compiled = compile(&entry.text);
            (entry, compiled)
        })
        .collect())
}

/// Turn compiled user source into alpha definitions. External alphas are
/// treated as delay-1.
pub fn defs_from_source(text: &str) -> Result<Vec<AlphaDef>, SourceFileError> {
    let mut defs = Vec::new();
    for (k, (entry, compiled)) in compile_source(text)?.into_iter().enumerate() {
        let expr = compiled.map_err(|error| SourceFileError::Compile {
            line: entry.line,
            error,
        })?;
        let id = entry.id.unwrap_or(k as u32 + 1);
        defs.push(AlphaDef {
            id,
            delay_class: DelayClass::One,
            required_inputs: expr.required_inputs.clone(),
            required_industry_levels: expr.required_industry_levels.clone(),
            notes: String::new(),
            source: entry.text,
            expr,
        });
    }
    let mut ids = BTreeSet::new();
    for def in &defs {
        if !ids.insert(def.id) {
            return Err(SourceFileError::DuplicateId(def.id));
        }
    }
    Ok(defs)
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SourceFileError {
    #[error(transparent)]
    Source(#[from] SourceError),
    #[error("line {line}: {error}")]
    Compile { line: usize, error: CompileError },
    #[error("duplicate alpha id {0}")]
    DuplicateId(u32),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependencyRow {
    pub id: u32,
    pub inputs: BTreeSet<Input>,
    pub industry_levels: BTreeSet<IndustryLevel>,
    pub max_lookback: usize,
    pub delay_class: DelayClass,
}

/// Data requirements of every corpus alpha.
pub fn corpus_dependency_report() -> Vec<DependencyRow> {
    load_corpus()
        .into_iter()
        .map(|def| DependencyRow {
            id: def.id,
            inputs: def.required_inputs,
            industry_levels: def.required_industry_levels,
            max_lookback: def.expr.max_lookback,
            delay_class: def.delay_class,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn by_id(id: u32) -> AlphaDef {
        load_corpus().into_iter().find(|d| d.id == id).unwrap()
    }

    #[test]
    fn has_101_in_order() {
        let ids: Vec<u32> = load_corpus().iter().map(|d| d.id).collect();
        assert_eq!(ids, (1..=101).collect::<Vec<_>>());
    }

    #[test]
    fn alpha_101_source() {
        assert_eq!(by_id(101).source, "((close - open) / ((high - low) + .001))");
    }

    #[test]
    fn delay_zero_set() {
        let zero: Vec<u32> = load_corpus()
            .iter()
            .filter(|d| d.delay_class == DelayClass::Zero)
            .map(|d| d.id)
            .collect();
        assert_eq!(zero, vec![42, 48, 53, 54]);
    }

    #[test]
    fn alpha_56_needs_cap() {
        assert!(by_id(56).required_inputs.contains(&Input::Cap));
    }

    #[test]
    fn dependency_examples() {
        let report = corpus_dependency_report();
        let row = |id: u32| report.iter().find(|r| r.id == id).unwrap().clone();
        assert_eq!(
            row(6).inputs,
            BTreeSet::from([Input::Open, Input::Volume])
        );
        assert_eq!(row(6).max_lookback, 10);
        assert!(row(19).max_lookback >= 250);
        assert!(row(3).industry_levels.is_empty());
    }

    #[test]
    fn industry_users() {
        let users: Vec<u32> = corpus_dependency_report()
            .into_iter()
            .filter(|r| !r.industry_levels.is_empty())
            .map(|r| r.id)
            .collect();
        let with_text: Vec<u32> = load_corpus()
            .into_iter()
            .filter(|d| d.source.to_ascii_lowercase().contains("indneutralize"))
            .map(|d| d.id)
            .collect();
        assert_eq!(users, with_text);
        assert_eq!(
            users,
            vec![48, 58, 59, 63, 67, 69, 70, 76, 79, 80, 82, 87, 89, 90, 91, 93, 97, 100]
        );
    }

    #[test]
    fn repairs_change_only_parentheses() {
        let corpus = load_corpus();
        for repair in repairs() {
            let def = corpus.iter().find(|d| d.id == repair.id).unwrap();
            let strip = |s: &str| -> String {
                s.chars().filter(|c| !matches!(c, '(' | ')')).collect()
            };
            assert_eq!(strip(&def.source), strip(repair.original), "Alpha#{}", repair.id);
            assert_ne!(def.source, repair.original);
            assert!(def.notes.contains(repair.original));
        }
        let repaired: BTreeSet<u32> = repairs().iter().map(|r| r.id).collect();
        for def in &corpus {
            assert_eq!(def.notes.is_empty(), !repaired.contains(&def.id));
        }
    }

    #[test]
    fn printed_originals_do_not_parse() {
        for repair in repairs() {
            assert!(compile(repair.original).is_err(), "Alpha#{}", repair.id);
        }
    }

    #[test]
    fn source_format() {
        let text = "# comment\n\nAlpha#7: close\n  rank(open)\n";
        let entries = parse_source(text).unwrap();
        assert_eq!(entries.len(), 2);
        assert_eq!(entries[0].id, Some(7));
        assert_eq!(entries[1].id, None);
        assert_eq!(entries[1].line, 4);
        assert_eq!(parse_source("# only\n\n"), Err(SourceError::Empty));
        assert!(matches!(
            parse_source("Alpha#x: close"),
            Err(SourceError::BadLabel { .. })
        ));
        assert!(matches!(
            parse_source("Alpha#1: close\nAlpha#1: open"),
            Err(SourceError::DuplicateId { id: 1, .. })
        ));
    }

    #[test]
    fn external_defs() {
        let defs = defs_from_source("close\nAlpha#9: open\n").unwrap();
        assert_eq!(defs[0].id, 1);
        assert_eq!(defs[1].id, 9);
        assert!(matches!(
            defs_from_source("rank(close"),
            Err(SourceFileError::Compile { line: 1, .. })
        ));
    }
}
