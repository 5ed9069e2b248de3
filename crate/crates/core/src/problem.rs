//! The problem-file format: one JSON document declaring the language,
//! the theory, the choice programs, and the preference data.
//!
//! ```json
//! {
//!   "tests": ["t"],
//!   "axioms": [],
//!   "mode": "standard",
//!   "primitives": ["a", "b"],
//!   "choices": { "c_ab": "if t then a else b" },
//!   "weak_prefs": [["a", "a"], ["b", "b"], ["c_ab", "c_ab"], ["a", "c_ab"]]
//! }
//! ```
//!
//! The universe `C` is the declared primitives plus the named
//! compound choices (compound choices in name order). Weak pairs are
//! declared only: strict intent is expressed by omitting the reverse
//! pair, and indifference by declaring both directions. Note that the
//! cancellation axiom forces reflexivity, so a passing relation must
//! declare the diagonal pairs too.
//!
//! Nonstandard mode replaces the atom basis with an explicit finite
//! set `T*` of test expressions; every test used in choices or axioms
//! must then be a member of `T*`.

use crate::axioms::{Act, AxiomsError, Instance};
use crate::choice::{compile, parse_choice, ChoiceError, ChoiceProgram};
use crate::logic::{
    enumerate_worlds, parse_test, Basis, LogicError, Theory, DEFAULT_BASIS_LIMIT,
};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModeField {
    Named(String),
    Nonstandard { nonstandard: Vec<String> },
}

impl Default for ModeField {
    fn default() -> Self {
        ModeField::Named("standard".to_string())
    }
}

/// The JSON problem document.
#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    #[serde(default)]
    pub tests: Vec<String>,
    #[serde(default)]
    pub axioms: Vec<String>,
    #[serde(default)]
    pub mode: ModeField,
    pub primitives: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outcomes: Option<Vec<String>>,
    #[serde(default)]
    pub choices: BTreeMap<String, String>,
    #[serde(default)]
    pub weak_prefs: Vec<[String; 2]>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProblemError {
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error("invalid name {name:?}: {reason}")]
    BadName { name: String, reason: String },
    #[error("duplicate name {0:?}")]
    DuplicateName(String),
    #[error("unknown mode {0:?} (expected \"standard\" or {{\"nonstandard\": [...]}})")]
    UnknownMode(String),
    #[error("outcome {0:?} is not a declared primitive")]
    UnknownOutcome(String),
    #[error("weak_prefs references unknown act {0:?}")]
    UnknownPrefAct(String),
    #[error("in {context}: {source}")]
    Logic {
        context: String,
        source: LogicError,
    },
    #[error("in choice {name:?}: {source}")]
    Choice { name: String, source: ChoiceError },
}

const KEYWORDS: [&str; 4] = ["if", "then", "else", "mix"];

fn check_name(name: &str) -> Result<(), ProblemError> {
    let bad = |reason: &str| ProblemError::BadName {
        name: name.to_string(),
        reason: reason.to_string(),
    };
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return Err(bad("must start with a letter or underscore")),
    }
    if !chars.all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return Err(bad("identifier characters only"));
    }
    if KEYWORDS.contains(&name) {
        return Err(bad("reserved keyword"));
    }
    Ok(())
}

impl ProblemFile {
    pub fn from_json(text: &str) -> Result<ProblemFile, ProblemError> {
        serde_json::from_str(text).map_err(|e| ProblemError::Json(e.to_string()))
    }

    /// Validates and compiles to an [`Instance`]: worlds enumerated
    /// under the theory, every program compiled to its table, the
    /// universe assembled as primitives then name-sorted choices.
    pub fn compile(&self, limit: usize) -> Result<Instance, ProblemError> {
        // Unique, well-formed, non-colliding names.
        let mut seen: BTreeSet<&str> = BTreeSet::new();
        for name in self
            .tests
            .iter()
            .chain(self.primitives.iter())
            .chain(self.choices.keys())
        {
            check_name(name)?;
            if !seen.insert(name.as_str()) {
                return Err(ProblemError::DuplicateName(name.clone()));
            }
        }

        let theory_formulas = self
            .axioms
            .iter()
            .map(|a| {
                parse_test(a, &self.tests).map_err(|e| ProblemError::Logic {
                    context: format!("axiom {a:?}"),
                    source: e,
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let theory = Theory::new(theory_formulas);

        let basis = match &self.mode {
            ModeField::Named(s) if s == "standard" => Basis::standard(self.tests.len()),
            ModeField::Named(other) => return Err(ProblemError::UnknownMode(other.clone())),
            ModeField::Nonstandard { nonstandard } => {
                let members = nonstandard
                    .iter()
                    .map(|t| {
                        parse_test(t, &self.tests).map_err(|e| ProblemError::Logic {
                            context: format!("T* member {t:?}"),
                            source: e,
                        })
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Basis::nonstandard(members)
            }
        };

        let worlds = enumerate_worlds(&basis, &theory, &self.tests, limit).map_err(|e| {
            ProblemError::Logic {
                context: "world enumeration".to_string(),
                source: e,
            }
        })?;

        if let Some(outcomes) = &self.outcomes {
            let mut seen_outcomes = BTreeSet::new();
            for o in outcomes {
                if !self.primitives.contains(o) {
                    return Err(ProblemError::UnknownOutcome(o.clone()));
                }
                if !seen_outcomes.insert(o) {
                    return Err(ProblemError::DuplicateName(o.clone()));
                }
            }
        }

        let p = self.primitives.len();
        let mut acts = Vec::new();
        for (i, prim) in self.primitives.iter().enumerate() {
            let program = ChoiceProgram::Prim(i);
            let table = compile(&program, &basis, &worlds, &self.tests, p).map_err(|e| {
                ProblemError::Choice {
                    name: prim.clone(),
                    source: e,
                }
            })?;
            acts.push(Act {
                name: prim.clone(),
                program,
                table,
            });
        }
        for (name, text) in &self.choices {
            let program =
                parse_choice(text, &self.primitives, &self.tests).map_err(|e| {
                    ProblemError::Choice {
                        name: name.clone(),
                        source: e,
                    }
                })?;
            let table = compile(&program, &basis, &worlds, &self.tests, p).map_err(|e| {
                ProblemError::Choice {
                    name: name.clone(),
                    source: e,
                }
            })?;
            acts.push(Act {
                name: name.clone(),
                program,
                table,
            });
        }

        let index: BTreeMap<&str, usize> = acts
            .iter()
            .enumerate()
            .map(|(i, a)| (a.name.as_str(), i))
            .collect();
        let mut weak = BTreeSet::new();
        for [a, b] in &self.weak_prefs {
            let ai = *index
                .get(a.as_str())
                .ok_or_else(|| ProblemError::UnknownPrefAct(a.clone()))?;
            let bi = *index
                .get(b.as_str())
                .ok_or_else(|| ProblemError::UnknownPrefAct(b.clone()))?;
            weak.insert((ai, bi));
        }

        Ok(Instance::new(
            self.tests.clone(),
            self.primitives.clone(),
            basis,
            theory,
            worlds,
            acts,
            weak,
        ))
    }

    /// Outcome positions in the primitive list, when declared.
    pub fn outcome_indices(&self) -> Option<Vec<usize>> {
        self.outcomes.as_ref().map(|os| {
            os.iter()
                .map(|o| self.primitives.iter().position(|p| p == o).expect("validated"))
                .collect()
        })
    }
}

pub fn default_limit() -> usize {
    DEFAULT_BASIS_LIMIT
}

impl From<AxiomsError> for ProblemError {
    fn from(e: AxiomsError) -> Self {
        ProblemError::Json(e.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_file_compiles() {
        let text = r#"{
            "tests": ["t"],
            "primitives": ["a", "b"],
            "choices": { "c": "if t then a else b" },
            "weak_prefs": [["a", "a"], ["b", "b"], ["c", "c"]]
        }"#;
        let file = ProblemFile::from_json(text).unwrap();
        let inst = file.compile(16).unwrap();
        assert_eq!(inst.acts.len(), 3);
        assert_eq!(inst.worlds.len(), 2);
        assert_eq!(inst.act_name(2), "c");
    }

    #[test]
    fn rejects_duplicate_and_reserved_names() {
        let dup = r#"{ "tests": ["a"], "primitives": ["a"] }"#;
        assert!(matches!(
            ProblemFile::from_json(dup).unwrap().compile(16),
            Err(ProblemError::DuplicateName(_))
        ));
        let kw = r#"{ "primitives": ["mix"] }"#;
        assert!(matches!(
            ProblemFile::from_json(kw).unwrap().compile(16),
            Err(ProblemError::BadName { .. })
        ));
    }

    #[test]
    fn rejects_unknown_outcome_and_pref_names() {
        let text = r#"{ "primitives": ["a"], "outcomes": ["z"] }"#;
        assert!(matches!(
            ProblemFile::from_json(text).unwrap().compile(16),
            Err(ProblemError::UnknownOutcome(_))
        ));
        let text = r#"{ "primitives": ["a"], "weak_prefs": [["a", "z"]] }"#;
        assert!(matches!(
            ProblemFile::from_json(text).unwrap().compile(16),
            Err(ProblemError::UnknownPrefAct(_))
        ));
    }

    #[test]
    fn nonstandard_mode_parses_t_star() {
        let text = r#"{
            "tests": ["t"],
            "mode": { "nonstandard": ["t", "t & !t"] },
            "primitives": ["a", "b"],
            "choices": { "c": "if t & !t then a else b" },
            "weak_prefs": []
        }"#;
        let inst = ProblemFile::from_json(text).unwrap().compile(16).unwrap();
        assert_eq!(inst.worlds.len(), 4);
    }

    #[test]
    fn unknown_mode_is_an_error() {
        let text = r#"{ "mode": "fancy", "primitives": ["a"] }"#;
        assert!(matches!(
            ProblemFile::from_json(text).unwrap().compile(16),
            Err(ProblemError::UnknownMode(_))
        ));
    }

    #[test]
    fn unknown_fields_rejected() {
        let text = r#"{ "primitives": ["a"], "zzz": 1 }"#;
        assert!(ProblemFile::from_json(text).is_err());
    }
}
