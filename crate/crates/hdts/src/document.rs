//! The on-disk document format: an alphabet plus named systems, morphisms
//! and based systems, serialized as JSON with a canonical emission (sorted
//! keys, sorted element lists) so that equal documents are byte-identical.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{structural, Result};
use crate::morphism::Morphism;
use crate::subcats::PointedSystem;
use crate::system::{ActionId, Alphabet, Label, StateId, Transition, TransitionSystem};

fn default_version() -> String {
    "1".to_owned()
}

/// A parsed document. Parsing checks syntax only; [`Document::resolve`]
/// checks that every cross-reference resolves and builds the real objects.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document {
    #[serde(default = "default_version")]
    pub version: String,
    pub sigma: Vec<String>,
    #[serde(default)]
    pub systems: BTreeMap<String, SystemDoc>,
    #[serde(default)]
    pub morphisms: BTreeMap<String, MorphismDoc>,
    #[serde(default)]
    pub pointed: BTreeMap<String, PointedDoc>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SystemDoc {
    #[serde(default)]
    pub states: Vec<String>,
    #[serde(default)]
    pub actions: Vec<ActionDoc>,
    #[serde(default)]
    pub transitions: Vec<TransitionDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionDoc {
    pub id: String,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionDoc {
    pub from: String,
    pub acts: Vec<String>,
    pub to: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MorphismDoc {
    pub source: String,
    pub target: String,
    #[serde(default)]
    pub state_map: BTreeMap<String, String>,
    #[serde(default)]
    pub action_map: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointedDoc {
    pub system: String,
    pub base: String,
}

/// The fully resolved content of a document.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub alphabet: Alphabet,
    pub systems: BTreeMap<String, Arc<TransitionSystem>>,
    pub morphisms: BTreeMap<String, Morphism>,
    pub pointed: BTreeMap<String, PointedSystem>,
}

/// Parses UTF-8 text in the documented JSON schema; syntax errors carry the
/// line and column reported by the JSON parser.
pub fn parse(text: &str) -> Result<Document> {
    let doc: Document = serde_json::from_str(text)
        .map_err(|e| structural(format!("line {}, column {}: {e}", e.line(), e.column())))?;
    for (name, sys) in &doc.systems {
        let mut seen = std::collections::BTreeSet::new();
        for s in &sys.states {
            if !seen.insert(s) {
                return Err(structural(format!("system {name}: duplicate state {s}")));
            }
        }
        let mut seen = std::collections::BTreeSet::new();
        for a in &sys.actions {
            if !seen.insert(&a.id) {
                return Err(structural(format!(
                    "system {name}: duplicate action {}",
                    a.id
                )));
            }
        }
    }
    Ok(doc)
}

impl Document {
    pub fn new(alphabet: &Alphabet) -> Self {
        Document {
            version: default_version(),
            sigma: alphabet.labels().map(|l| l.to_string()).collect(),
            systems: BTreeMap::new(),
            morphisms: BTreeMap::new(),
            pointed: BTreeMap::new(),
        }
    }

    /// Checks all cross-references and builds the domain objects.
    pub fn resolve(&self) -> Result<Resolved> {
        let alphabet = Alphabet::from_names(&self.sigma)?;
        let mut systems = BTreeMap::new();
        for (name, sys) in &self.systems {
            let system = TransitionSystem::new(
                alphabet.clone(),
                sys.states.iter().map(StateId::new),
                sys.actions
                    .iter()
                    .map(|a| (ActionId::new(&a.id), Label::new(&a.label))),
                sys.transitions.iter().map(|t| {
                    Transition::new(
                        StateId::new(&t.from),
                        t.acts.iter().map(ActionId::new),
                        StateId::new(&t.to),
                    )
                }),
            )
            .map_err(|e| structural(format!("system {name}: {e}")))?;
            systems.insert(name.clone(), Arc::new(system));
        }
        let mut morphisms = BTreeMap::new();
        for (name, m) in &self.morphisms {
            let source = systems.get(&m.source).ok_or_else(|| {
                structural(format!("morphism {name}: unknown system {}", m.source))
            })?;
            let target = systems.get(&m.target).ok_or_else(|| {
                structural(format!("morphism {name}: unknown system {}", m.target))
            })?;
            let morphism = Morphism::new(
                source.clone(),
                target.clone(),
                m.state_map
                    .iter()
                    .map(|(k, v)| (StateId::new(k), StateId::new(v)))
                    .collect(),
                m.action_map
                    .iter()
                    .map(|(k, v)| (ActionId::new(k), ActionId::new(v)))
                    .collect(),
            )
            .map_err(|e| structural(format!("morphism {name}: {e}")))?;
            morphisms.insert(name.clone(), morphism);
        }
        let mut pointed = BTreeMap::new();
        for (name, p) in &self.pointed {
            let system = systems.get(&p.system).ok_or_else(|| {
                structural(format!("pointed {name}: unknown system {}", p.system))
            })?;
            let ps = PointedSystem::new(system.clone(), StateId::new(&p.base))
                .map_err(|e| structural(format!("pointed {name}: {e}")))?;
            pointed.insert(name.clone(), ps);
        }
        Ok(Resolved {
            alphabet,
            systems,
            morphisms,
            pointed,
        })
    }

    pub fn insert_system(&mut self, name: &str, system: &TransitionSystem) {
        self.systems
            .insert(name.to_owned(), SystemDoc::from_system(system));
    }

    pub fn insert_morphism(&mut self, name: &str, m: &Morphism, source: &str, target: &str) {
        self.morphisms.insert(
            name.to_owned(),
            MorphismDoc {
                source: source.to_owned(),
                target: target.to_owned(),
                state_map: m
                    .state_map()
                    .iter()
                    .map(|(k, v)| (k.to_string(), v.to_string()))
                    .collect(),
                action_map: m
                    .action_map()
                    .iter()
                    .map(|(k, v)| (k.to_string(), v.to_string()))
                    .collect(),
            },
        );
    }
}

impl SystemDoc {
    pub fn from_system(system: &TransitionSystem) -> Self {
        SystemDoc {
            states: system.states().iter().map(StateId::to_string).collect(),
            actions: system
                .actions()
                .iter()
                .map(|(a, l)| ActionDoc {
                    id: a.to_string(),
                    label: l.to_string(),
                })
                .collect(),
            transitions: system
                .transitions()
                .iter()
                .map(|t| TransitionDoc {
                    from: t.from.to_string(),
                    acts: t.actions.iter().map(ActionId::to_string).collect(),
                    to: t.to.to_string(),
                })
                .collect(),
        }
    }
}

/// Canonical serialization: labels, states, actions and transitions sorted,
/// object keys in map order, two-space indentation, trailing newline.
/// Emitting is stable: parse-then-emit is the identity on canonical text.
pub fn emit(doc: &Document) -> String {
    let mut canonical = doc.clone();
    canonical.sigma.sort();
    canonical.sigma.dedup();
    for sys in canonical.systems.values_mut() {
        sys.states.sort();
        sys.actions.sort_by(|a, b| a.id.cmp(&b.id));
        sys.transitions
            .sort_by(|a, b| (&a.from, &a.acts, &a.to).cmp(&(&b.from, &b.acts, &b.to)));
        sys.transitions.dedup();
    }
    let mut text = serde_json::to_string_pretty(&canonical).expect("document serializes");
    text.push('\n');
    text
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_document_parses() {
        let doc = parse(r#"{"sigma":["a"],"systems":{"P":{"states":["0"]}}}"#).unwrap();
        let resolved = doc.resolve().unwrap();
        assert_eq!(resolved.systems["P"].states().len(), 1);
    }

    #[test]
    fn schema_excerpt_parses() {
        let text = r#"{"sigma":["a","b"],
            "systems":{"X":{"states":["p","q"],
                            "actions":[{"id":"u","label":"a"}],
                            "transitions":[{"from":"p","acts":["u"],"to":"q"}]}}}"#;
        let resolved = parse(text).unwrap().resolve().unwrap();
        assert!(resolved.systems["X"].validate().ok());
    }

    #[test]
    fn dangling_action_reference_is_named() {
        let text = r#"{"sigma":["a"],
            "systems":{"X":{"states":["p"],
                            "transitions":[{"from":"p","acts":["ghost"],"to":"p"}]}}}"#;
        let err = parse(text).unwrap().resolve().unwrap_err();
        assert!(err.to_string().contains("ghost"));
    }

    #[test]
    fn duplicate_state_is_rejected() {
        let text = r#"{"sigma":["a"],"systems":{"X":{"states":["p","p"]}}}"#;
        assert!(parse(text).is_err());
    }

    #[test]
    fn syntax_errors_carry_position() {
        let err = parse("{oops").unwrap_err();
        assert!(err.to_string().contains("line 1"));
    }

    #[test]
    fn emission_is_idempotent_and_order_insensitive() {
        let a = r#"{"sigma":["b","a"],"systems":{"X":{"states":["q","p"],
            "actions":[{"id":"u","label":"a"}],
            "transitions":[{"from":"p","acts":["u"],"to":"q"}]}}}"#;
        let doc = parse(a).unwrap();
        let once = emit(&doc);
        let twice = emit(&parse(&once).unwrap());
        assert_eq!(once, twice);
    }
}
