//! Property tests for the closure fixpoint, restriction, and the canonical
//! document serialization.

mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;

use hdts::document::{self, Document};
use hdts::system::{ActionId, Label, StateId, Transition, TransitionSystem};

/// Structurally valid (but axiom-violating at will) small systems.
fn raw_system() -> impl Strategy<Value = TransitionSystem> {
    let states = 1..4usize;
    let actions = 0..4usize;
    (states, actions).prop_flat_map(|(n_states, n_actions)| {
        let tuple = (
            0..n_states,
            proptest::collection::vec((0..n_actions.max(1), any::<bool>()), 1..3),
            0..n_states,
        );
        proptest::collection::vec(tuple, 0..5).prop_map(move |raw| {
            let states: Vec<StateId> = (0..n_states)
                .map(|i| StateId::new(format!("s{i}")))
                .collect();
            let actions: Vec<(ActionId, Label)> = (0..n_actions)
                .map(|i| {
                    (
                        ActionId::new(format!("u{i}")),
                        Label::new(if i % 2 == 0 { "a" } else { "b" }),
                    )
                })
                .collect();
            let transitions: Vec<Transition> = raw
                .into_iter()
                .filter(|_| n_actions > 0)
                .map(|(from, word, to)| {
                    Transition::new(
                        states[from].clone(),
                        word.into_iter()
                            .map(|(i, _)| actions[i % n_actions].0.clone()),
                        states[to].clone(),
                    )
                })
                .collect();
            TransitionSystem::new(common::alphabet(), states, actions, transitions).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closure_is_extensive_idempotent_and_valid(x in raw_system()) {
        let closed = x.closure();
        prop_assert!(closed.transitions().is_superset(x.transitions()));
        prop_assert_eq!(closed.states(), x.states());
        prop_assert_eq!(closed.actions(), x.actions());
        prop_assert!(closed.validate().ok());
        prop_assert_eq!(closed.closure(), closed);
    }

    #[test]
    fn restriction_never_creates_transitions_and_preserves_validity(x in raw_system()) {
        let closed = x.closure();
        let keep: BTreeSet<StateId> = closed
            .states()
            .iter()
            .enumerate()
            .filter(|(i, _)| i % 2 == 0)
            .map(|(_, s)| s.clone())
            .collect();
        let restricted = closed.restrict(&keep).unwrap();
        prop_assert!(restricted.transitions().is_subset(closed.transitions()));
        prop_assert!(restricted.validate().ok());
    }

    #[test]
    fn document_emission_is_canonical(x in raw_system()) {
        let mut doc = Document::new(&common::alphabet());
        doc.insert_system("X", &x);
        let once = document::emit(&doc);
        let reparsed = document::parse(&once).unwrap();
        prop_assert_eq!(document::emit(&reparsed), once.clone());

        // Permuting the transition list does not change the bytes.
        let mut shuffled = doc.clone();
        let sys = shuffled.systems.get_mut("X").unwrap();
        sys.transitions.reverse();
        sys.states.reverse();
        prop_assert_eq!(document::emit(&shuffled), once);
    }
}
