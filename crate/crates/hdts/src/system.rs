//! The transition-system data model and its two defining axioms.
//!
//! A system is a triple of states, labelled actions and n-dimensional
//! transitions (tuples of a source state, a nonempty action sequence and a
//! target state). The transition set of a well-formed system is closed under
//! permutation of the action sequence (multiset axiom) and under the patching
//! axiom, which extracts the middle segment between two compatible two-step
//! divisions of a transition. [`TransitionSystem::validate`] reports
//! violations with witnesses and [`TransitionSystem::closure`] computes the
//! least closed superset of a raw transition set.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

use crate::error::{argument, structural, Result};

macro_rules! id_type {
    ($(#[$doc:meta])* $name:ident) => {
        $(#[$doc])*
        #[derive(
            Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
        )]
        #[serde(transparent)]
        pub struct $name(pub String);

        impl $name {
            pub fn new(s: impl Into<String>) -> Self {
                Self(s.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                Self(s.to_owned())
            }
        }
    };
}

id_type!(
    /// Opaque state identifier; equality is string equality.
    StateId
);
id_type!(
    /// Opaque action identifier; equality is string equality.
    ActionId
);
id_type!(
    /// A label from the fixed alphabet.
    Label
);

/// The fixed nonempty ordered set of labels shared by a family of systems.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Alphabet {
    labels: BTreeSet<Label>,
}

impl Alphabet {
    pub fn new(labels: impl IntoIterator<Item = Label>) -> Result<Self> {
        let labels: BTreeSet<Label> = labels.into_iter().collect();
        if labels.is_empty() {
            return Err(structural("alphabet must be nonempty"));
        }
        Ok(Alphabet { labels })
    }

    /// Convenience constructor from string slices.
    pub fn from_names<S: AsRef<str>>(names: &[S]) -> Result<Self> {
        Self::new(names.iter().map(|n| Label::new(n.as_ref())))
    }

    pub fn contains(&self, label: &Label) -> bool {
        self.labels.contains(label)
    }

    pub fn labels(&self) -> impl Iterator<Item = &Label> {
        self.labels.iter()
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// An n-dimensional transition: a source state, a sequence of n actions and
/// a target state.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Transition {
    pub from: StateId,
    pub actions: Vec<ActionId>,
    pub to: StateId,
}

impl Transition {
    pub fn new(
        from: impl Into<StateId>,
        actions: impl IntoIterator<Item = ActionId>,
        to: impl Into<StateId>,
    ) -> Self {
        Transition {
            from: from.into(),
            actions: actions.into_iter().collect(),
            to: to.into(),
        }
    }

    /// Dimension of the transition, i.e. the length of its action sequence.
    pub fn dim(&self) -> usize {
        self.actions.len()
    }
}

impl fmt::Display for Transition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.from)?;
        for a in &self.actions {
            write!(f, ",{a}")?;
        }
        write!(f, ",{})", self.to)
    }
}

/// A finite higher-dimensional transition system.
///
/// The constructor checks structural well-formedness only (all references
/// resolve); the multiset and patching axioms are checked by [`Self::validate`]
/// so that raw, possibly-violating data can be represented and repaired via
/// [`Self::closure`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionSystem {
    alphabet: Alphabet,
    states: BTreeSet<StateId>,
    actions: BTreeMap<ActionId, Label>,
    transitions: BTreeSet<Transition>,
}

/// One detected axiom violation, with explicit witnesses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// A permutation of a present transition is missing.
    MissingPermutation {
        present: Transition,
        missing: Transition,
    },
    /// A patching configuration is present but its middle segment is missing.
    MissingPatch {
        base: Transition,
        first_division: (Transition, Transition),
        second_division: (Transition, Transition),
        missing: Transition,
    },
    /// A morphism maps an action to one with a different label.
    LabelMismatch {
        action: ActionId,
        expected: Label,
        image: ActionId,
        got: Label,
    },
    /// A morphism maps a transition outside the target's transition set.
    UnpreservedTransition {
        transition: Transition,
        image: Transition,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::MissingPermutation { present, missing } => {
                write!(
                    f,
                    "multiset: {present} present but permutation {missing} missing"
                )
            }
            Violation::MissingPatch { base, missing, .. } => {
                write!(
                    f,
                    "patching: configuration on {base} lacks middle {missing}"
                )
            }
            Violation::LabelMismatch {
                action,
                expected,
                image,
                got,
            } => {
                write!(
                    f,
                    "label: {action} (label {expected}) maps to {image} (label {got})"
                )
            }
            Violation::UnpreservedTransition { transition, image } => {
                write!(
                    f,
                    "transition: image {image} of {transition} is not a transition"
                )
            }
        }
    }
}

/// Result of checking the axioms of a system or of a morphism.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Index from (source state, action word) to the set of targets.
pub(crate) type PrefixIndex = HashMap<(StateId, Vec<ActionId>), BTreeSet<StateId>>;

pub(crate) fn build_prefix_index(transitions: &BTreeSet<Transition>) -> PrefixIndex {
    let mut index: PrefixIndex = HashMap::new();
    for t in transitions {
        index
            .entry((t.from.clone(), t.actions.clone()))
            .or_default()
            .insert(t.to.clone());
    }
    index
}

fn permutations(items: &[ActionId]) -> Vec<Vec<ActionId>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for (i, item) in items.iter().enumerate() {
        let mut rest = items.to_vec();
        rest.remove(i);
        for mut tail in permutations(&rest) {
            let mut perm = vec![item.clone()];
            perm.append(&mut tail);
            out.push(perm);
        }
    }
    out
}

impl TransitionSystem {
    pub fn new(
        alphabet: Alphabet,
        states: impl IntoIterator<Item = StateId>,
        actions: impl IntoIterator<Item = (ActionId, Label)>,
        transitions: impl IntoIterator<Item = Transition>,
    ) -> Result<Self> {
        let states: BTreeSet<StateId> = states.into_iter().collect();
        let mut action_map: BTreeMap<ActionId, Label> = BTreeMap::new();
        for (id, label) in actions {
            if !alphabet.contains(&label) {
                return Err(structural(format!(
                    "label {label} of action {id} is not in the alphabet"
                )));
            }
            if let Some(prev) = action_map.insert(id.clone(), label.clone()) {
                if prev != label {
                    return Err(structural(format!(
                        "action {id} declared with labels {prev} and {label}"
                    )));
                }
            }
        }
        let transitions: BTreeSet<Transition> = transitions.into_iter().collect();
        for t in &transitions {
            if t.actions.is_empty() {
                return Err(structural(format!(
                    "transition {t} has an empty action sequence"
                )));
            }
            if !states.contains(&t.from) {
                return Err(structural(format!(
                    "transition {t} references unknown state {}",
                    t.from
                )));
            }
            if !states.contains(&t.to) {
                return Err(structural(format!(
                    "transition {t} references unknown state {}",
                    t.to
                )));
            }
            for a in &t.actions {
                if !action_map.contains_key(a) {
                    return Err(structural(format!(
                        "transition {t} references unknown action {a}"
                    )));
                }
            }
        }
        Ok(TransitionSystem {
            alphabet,
            states,
            actions: action_map,
            transitions,
        })
    }

    /// The empty system (initial object) over the given alphabet.
    pub fn empty(alphabet: Alphabet) -> Self {
        TransitionSystem {
            alphabet,
            states: BTreeSet::new(),
            actions: BTreeMap::new(),
            transitions: BTreeSet::new(),
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn states(&self) -> &BTreeSet<StateId> {
        &self.states
    }

    pub fn actions(&self) -> &BTreeMap<ActionId, Label> {
        &self.actions
    }

    pub fn label(&self, action: &ActionId) -> Option<&Label> {
        self.actions.get(action)
    }

    pub fn transitions(&self) -> &BTreeSet<Transition> {
        &self.transitions
    }

    pub fn has_transition(&self, t: &Transition) -> bool {
        self.transitions.contains(t)
    }

    /// Highest dimension among the transitions (0 when there are none).
    pub fn dimension(&self) -> usize {
        self.transitions
            .iter()
            .map(Transition::dim)
            .max()
            .unwrap_or(0)
    }

    pub fn transitions_of_dim(&self, n: usize) -> impl Iterator<Item = &Transition> {
        self.transitions.iter().filter(move |t| t.dim() == n)
    }

    /// The label word of a transition.
    pub fn label_word(&self, t: &Transition) -> Vec<Label> {
        t.actions.iter().map(|a| self.actions[a].clone()).collect()
    }

    /// Checks the multiset and patching axioms, reporting every violation
    /// with explicit witnesses.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        let fast: HashSet<&Transition> = self.transitions.iter().collect();
        for t in &self.transitions {
            if t.dim() < 2 {
                continue;
            }
            for perm in permutations(&t.actions) {
                let candidate = Transition::new(t.from.clone(), perm, t.to.clone());
                if !fast.contains(&candidate) {
                    violations.push(Violation::MissingPermutation {
                        present: t.clone(),
                        missing: candidate,
                    });
                }
            }
        }
        let index = build_prefix_index(&self.transitions);
        self.scan_patching(&index, |base, first, second, middle| {
            if !self.transitions.contains(&middle) {
                violations.push(Violation::MissingPatch {
                    base: base.clone(),
                    first_division: first,
                    second_division: second,
                    missing: middle,
                });
            }
        });
        ValidationReport { violations }
    }

    /// Runs `visit` on every patching configuration among the current
    /// transitions: a base transition of dimension n >= 3 divided after p
    /// and after p+q with p, q >= 1 and p+q < n, together with the induced
    /// middle segment.
    fn scan_patching<F>(&self, index: &PrefixIndex, mut visit: F)
    where
        F: FnMut(&Transition, (Transition, Transition), (Transition, Transition), Transition),
    {
        let fast: HashSet<&Transition> = self.transitions.iter().collect();
        for t in &self.transitions {
            let n = t.dim();
            if n < 3 {
                continue;
            }
            for p in 1..n {
                for q in 1..n {
                    if p + q >= n {
                        break;
                    }
                    let prefix_p = t.actions[..p].to_vec();
                    let suffix_p = t.actions[p..].to_vec();
                    let prefix_pq = t.actions[..p + q].to_vec();
                    let suffix_pq = t.actions[p + q..].to_vec();
                    let middle_word = t.actions[p..p + q].to_vec();
                    let firsts = match index.get(&(t.from.clone(), prefix_p.clone())) {
                        Some(s) => s,
                        None => continue,
                    };
                    for nu1 in firsts {
                        let first_tail =
                            Transition::new(nu1.clone(), suffix_p.clone(), t.to.clone());
                        if !fast.contains(&first_tail) {
                            continue;
                        }
                        let seconds = match index.get(&(t.from.clone(), prefix_pq.clone())) {
                            Some(s) => s,
                            None => continue,
                        };
                        for nu2 in seconds {
                            let second_tail =
                                Transition::new(nu2.clone(), suffix_pq.clone(), t.to.clone());
                            if !fast.contains(&second_tail) {
                                continue;
                            }
                            let middle =
                                Transition::new(nu1.clone(), middle_word.clone(), nu2.clone());
                            visit(
                                t,
                                (
                                    Transition::new(t.from.clone(), prefix_p.clone(), nu1.clone()),
                                    first_tail.clone(),
                                ),
                                (
                                    Transition::new(t.from.clone(), prefix_pq.clone(), nu2.clone()),
                                    second_tail,
                                ),
                                middle,
                            );
                        }
                    }
                }
            }
        }
    }

    /// The least superset of the transition set closed under the multiset and
    /// patching axioms, with identical states and actions. Idempotent;
    /// patching never raises dimension, so the fixpoint is finite.
    pub fn closure(&self) -> TransitionSystem {
        let mut current = self.clone();
        loop {
            let mut added: BTreeSet<Transition> = BTreeSet::new();
            {
                let fast: HashSet<&Transition> = current.transitions.iter().collect();
                for t in &current.transitions {
                    if t.dim() < 2 {
                        continue;
                    }
                    for perm in permutations(&t.actions) {
                        let candidate = Transition::new(t.from.clone(), perm, t.to.clone());
                        if !fast.contains(&candidate) {
                            added.insert(candidate);
                        }
                    }
                }
            }
            let index = build_prefix_index(&current.transitions);
            current.scan_patching(&index, |_, _, _, middle| {
                if !current.transitions.contains(&middle) {
                    added.insert(middle);
                }
            });
            if added.is_empty() {
                return current;
            }
            current.transitions.extend(added);
        }
    }

    /// The restriction to a subset of states: same actions, exactly the
    /// transitions with both endpoints inside the subset. The result
    /// satisfies both axioms whenever the input does, without re-closure.
    pub fn restrict(&self, keep: &BTreeSet<StateId>) -> Result<TransitionSystem> {
        for s in keep {
            if !self.states.contains(s) {
                return Err(argument(format!("state {s} is not a state of the system")));
            }
        }
        Ok(TransitionSystem {
            alphabet: self.alphabet.clone(),
            states: keep.clone(),
            actions: self.actions.clone(),
            transitions: self
                .transitions
                .iter()
                .filter(|t| keep.contains(&t.from) && keep.contains(&t.to))
                .cloned()
                .collect(),
        })
    }

    /// Replaces the transition set wholesale (structural checks re-run).
    pub fn with_transitions(
        &self,
        transitions: impl IntoIterator<Item = Transition>,
    ) -> Result<Self> {
        TransitionSystem::new(
            self.alphabet.clone(),
            self.states.iter().cloned(),
            self.actions.iter().map(|(a, l)| (a.clone(), l.clone())),
            transitions,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab() -> Alphabet {
        Alphabet::from_names(&["a", "b"]).unwrap()
    }

    fn st(s: &str) -> StateId {
        StateId::new(s)
    }

    fn act(a: &str) -> ActionId {
        ActionId::new(a)
    }

    fn tr(from: &str, word: &[&str], to: &str) -> Transition {
        Transition::new(st(from), word.iter().map(|a| act(a)), st(to))
    }

    /// The concurrent execution of two actions: four states, one square.
    fn parallel_square() -> TransitionSystem {
        TransitionSystem::new(
            ab(),
            ["p", "q", "r", "s"].map(st),
            [(act("u"), Label::new("a")), (act("v"), Label::new("b"))],
            [
                tr("p", &["u"], "q"),
                tr("q", &["v"], "s"),
                tr("p", &["v"], "r"),
                tr("r", &["u"], "s"),
                tr("p", &["u", "v"], "s"),
                tr("p", &["v", "u"], "s"),
            ],
        )
        .unwrap()
    }

    #[test]
    fn alphabet_must_be_nonempty() {
        assert!(Alphabet::new([]).is_err());
    }

    #[test]
    fn structural_errors_name_the_offender() {
        let err = TransitionSystem::new(
            ab(),
            [st("p")],
            [(act("u"), Label::new("a"))],
            [tr("p", &["w"], "p")],
        )
        .unwrap_err();
        assert!(err.to_string().contains('w'));
    }

    #[test]
    fn parallel_square_is_valid() {
        assert!(parallel_square().validate().ok());
    }

    #[test]
    fn missing_permutation_is_reported_with_witness() {
        let mut transitions: Vec<Transition> =
            parallel_square().transitions().iter().cloned().collect();
        transitions.retain(|t| *t != tr("p", &["v", "u"], "s"));
        let broken = parallel_square().with_transitions(transitions).unwrap();
        let report = broken.validate();
        assert!(!report.ok());
        assert!(report.violations.iter().any(|v| matches!(
            v,
            Violation::MissingPermutation { missing, .. } if *missing == tr("p", &["v", "u"], "s")
        )));
    }

    /// Minimal patching instance: a 3-transition with the four dividing
    /// transitions for p = q = 1 but without the induced middle segment.
    /// A direct axiom scan must flag exactly that segment.
    fn patching_seed() -> Vec<Transition> {
        vec![
            tr("x", &["u", "v", "w"], "y"),
            tr("x", &["u"], "m1"),
            tr("m1", &["v", "w"], "y"),
            tr("x", &["u", "v"], "m2"),
            tr("m2", &["w"], "y"),
        ]
    }

    fn patching_system(transitions: Vec<Transition>) -> TransitionSystem {
        TransitionSystem::new(
            Alphabet::from_names(&["a", "b", "c"]).unwrap(),
            ["x", "y", "m1", "m2"].map(st),
            [
                (act("u"), Label::new("a")),
                (act("v"), Label::new("b")),
                (act("w"), Label::new("c")),
            ],
            transitions,
        )
        .unwrap()
    }

    #[test]
    fn missing_patch_is_reported_with_witness() {
        let report = patching_system(patching_seed()).validate();
        assert!(report.violations.iter().any(|v| matches!(
            v,
            Violation::MissingPatch { missing, .. } if *missing == tr("m1", &["v"], "m2")
        )));
    }

    #[test]
    fn closure_adds_exactly_the_middle_segment_and_permutations() {
        let closed = patching_system(patching_seed()).closure();
        assert!(closed.has_transition(&tr("m1", &["v"], "m2")));
        assert!(closed.validate().ok());
        // Brute-force re-scan: closing again changes nothing.
        assert_eq!(closed, closed.closure());
    }

    #[test]
    fn closure_is_identity_on_closed_systems() {
        let square = parallel_square();
        assert_eq!(square, square.closure());
    }

    #[test]
    fn closure_without_high_dimensions_or_gaps_is_identity() {
        let low = parallel_square()
            .with_transitions([tr("p", &["u"], "q"), tr("q", &["v"], "s")])
            .unwrap();
        assert_eq!(low, low.closure());
    }

    #[test]
    fn restrict_to_all_states_is_identity() {
        let square = parallel_square();
        let all = square.states().clone();
        assert_eq!(square.restrict(&all).unwrap(), square);
    }

    #[test]
    fn restrict_keeps_actions_and_filters_transitions() {
        let square = parallel_square();
        let keep: BTreeSet<StateId> = [st("p"), st("s")].into();
        let restricted = square.restrict(&keep).unwrap();
        assert_eq!(restricted.actions().len(), 2);
        assert_eq!(restricted.transitions().len(), 2);
        assert!(restricted.validate().ok());
    }

    #[test]
    fn restrict_to_empty_keeps_actions() {
        let square = parallel_square();
        let restricted = square.restrict(&BTreeSet::new()).unwrap();
        assert!(restricted.states().is_empty());
        assert_eq!(restricted.actions().len(), 2);
        assert!(restricted.transitions().is_empty());
    }

    #[test]
    fn restrict_rejects_foreign_states() {
        let square = parallel_square();
        let keep: BTreeSet<StateId> = [st("zz")].into();
        assert!(square.restrict(&keep).is_err());
    }
}
