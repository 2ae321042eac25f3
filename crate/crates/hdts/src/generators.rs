//! Standard generated objects: the point, the one-action object, pure
//! transitions, labelled cubes and their boundaries, the double transition,
//! the truncated interval and terminal object, and the two-action
//! concurrency square.
//!
//! Cube states are encoded as bit strings so that the face conditions are
//! direct bit tests; direction actions are encoded as `label.position`.

use std::sync::Arc;

use crate::catops;
use crate::error::{argument, Result};
use crate::system::{ActionId, Alphabet, Label, StateId, Transition, TransitionSystem};

/// The kinds of objects [`make`] can build.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GeneratorKind {
    /// One state, no actions, no transitions.
    Point,
    /// No states, a single action carrying the given label.
    Action(Label),
    /// Two states and one n-dimensional transition with no lower faces.
    PureCube(Vec<Label>),
    /// The full labelled n-cube with all faces.
    Cube(Vec<Label>),
    /// The n-cube with its n-dimensional transitions removed.
    BoundaryCube(Vec<Label>),
    /// Two disjoint transitions sharing a single action.
    Double(Label),
    /// Two states, both sides of every label, every decorated tuple;
    /// truncated to the dimension bound.
    Interval,
    /// One state, one action per label, every word up to the given dimension.
    Terminal(usize),
    /// The concurrent execution of two actions: a square with both fillers.
    ParallelPair(Label, Label),
}

/// A kind plus the alphabet it draws labels from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorSpec {
    pub kind: GeneratorKind,
    pub alphabet: Alphabet,
}

fn check_labels(alphabet: &Alphabet, labels: &[Label]) -> Result<()> {
    for l in labels {
        if !alphabet.contains(l) {
            return Err(argument(format!("unknown label {l}")));
        }
    }
    Ok(())
}

/// Bit-string id of a cube vertex; coordinate i is the i-th character.
fn vertex_id(bits: usize, n: usize) -> StateId {
    StateId::new(
        (0..n)
            .map(|i| if bits >> i & 1 == 1 { '1' } else { '0' })
            .collect::<String>(),
    )
}

/// Direction action of a cube: the label in position i (1-based).
pub fn direction_action(label: &Label, position: usize) -> ActionId {
    ActionId::new(format!("{label}.{position}"))
}

fn all_orderings(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for (i, &item) in items.iter().enumerate() {
        let mut rest = items.to_vec();
        rest.remove(i);
        for mut tail in all_orderings(&rest) {
            let mut perm = vec![item];
            perm.append(&mut tail);
            out.push(perm);
        }
    }
    out
}

fn cube(alphabet: &Alphabet, labels: &[Label], skip_top: bool) -> Result<TransitionSystem> {
    let n = labels.len();
    let states = (0..1usize << n).map(|v| vertex_id(v, n));
    let actions: Vec<(ActionId, Label)> = labels
        .iter()
        .enumerate()
        .map(|(i, l)| (direction_action(l, i + 1), l.clone()))
        .collect();
    let mut transitions = Vec::new();
    for lo in 0..1usize << n {
        for hi in 0..1usize << n {
            // lo <= hi coordinatewise, moving exactly in the differing directions
            if lo & !hi != 0 || lo == hi {
                continue;
            }
            let directions: Vec<usize> = (0..n).filter(|i| (lo ^ hi) >> i & 1 == 1).collect();
            if skip_top && directions.len() == n {
                continue;
            }
            for order in all_orderings(&directions) {
                transitions.push(Transition::new(
                    vertex_id(lo, n),
                    order.iter().map(|&i| actions[i].0.clone()),
                    vertex_id(hi, n),
                ));
            }
        }
    }
    TransitionSystem::new(alphabet.clone(), states, actions, transitions)
}

fn pure_cube(alphabet: &Alphabet, labels: &[Label]) -> Result<TransitionSystem> {
    let n = labels.len();
    let actions: Vec<(ActionId, Label)> = labels
        .iter()
        .enumerate()
        .map(|(i, l)| (direction_action(l, i + 1), l.clone()))
        .collect();
    let transitions = all_orderings(&(0..n).collect::<Vec<_>>())
        .into_iter()
        .map(|order| {
            Transition::new(
                vertex_id(0, n),
                order.iter().map(|&i| actions[i].0.clone()),
                vertex_id((1 << n) - 1, n),
            )
        });
    TransitionSystem::new(
        alphabet.clone(),
        [vertex_id(0, n), vertex_id((1 << n) - 1, n)],
        actions.clone(),
        transitions,
    )
}

/// The action id `label@side` used by the interval (and by cylinders).
pub fn sided_action(label: &Label, side: u8) -> ActionId {
    ActionId::new(format!("{label}@{side}"))
}

fn interval(alphabet: &Alphabet, dmax: usize) -> Result<TransitionSystem> {
    let states = [StateId::new("0"), StateId::new("1")];
    let mut actions = Vec::new();
    for l in alphabet.labels() {
        actions.push((sided_action(l, 0), l.clone()));
        actions.push((sided_action(l, 1), l.clone()));
    }
    let mut transitions = Vec::new();
    let mut words: Vec<Vec<ActionId>> = vec![Vec::new()];
    for _ in 0..dmax {
        let mut next = Vec::new();
        for w in &words {
            for (a, _) in &actions {
                let mut w2 = w.clone();
                w2.push(a.clone());
                next.push(w2);
            }
        }
        for w in &next {
            for e0 in ["0", "1"] {
                for e1 in ["0", "1"] {
                    transitions.push(Transition::new(e0, w.iter().cloned(), e1));
                }
            }
        }
        words = next;
    }
    TransitionSystem::new(alphabet.clone(), states, actions, transitions)
}

fn terminal(alphabet: &Alphabet, d: usize) -> Result<TransitionSystem> {
    let actions: Vec<(ActionId, Label)> = alphabet
        .labels()
        .map(|l| (ActionId::new(l.as_str()), l.clone()))
        .collect();
    let mut transitions = Vec::new();
    let mut words: Vec<Vec<ActionId>> = vec![Vec::new()];
    for _ in 0..d {
        let mut next = Vec::new();
        for w in &words {
            for (a, _) in &actions {
                let mut w2 = w.clone();
                w2.push(a.clone());
                next.push(w2);
            }
        }
        for w in &next {
            transitions.push(Transition::new("0", w.iter().cloned(), "0"));
        }
        words = next;
    }
    TransitionSystem::new(alphabet.clone(), [StateId::new("0")], actions, transitions)
}

fn parallel_pair(alphabet: &Alphabet, a: &Label, b: &Label) -> Result<TransitionSystem> {
    let ua = ActionId::new(a.as_str());
    let ub = ActionId::new(b.as_str());
    TransitionSystem::new(
        alphabet.clone(),
        ["alpha", "beta", "gamma", "delta"].map(StateId::new),
        [(ua.clone(), a.clone()), (ub.clone(), b.clone())],
        [
            Transition::new("alpha", [ua.clone()], "beta"),
            Transition::new("beta", [ub.clone()], "delta"),
            Transition::new("alpha", [ub.clone()], "gamma"),
            Transition::new("gamma", [ua.clone()], "delta"),
            Transition::new("alpha", [ua.clone(), ub.clone()], "delta"),
            Transition::new("alpha", [ub, ua], "delta"),
        ],
    )
}

/// Builds the object described by the spec. Every output passes `validate`.
pub fn make(spec: &GeneratorSpec, dmax: usize) -> Result<Arc<TransitionSystem>> {
    let alphabet = &spec.alphabet;
    let system = match &spec.kind {
        GeneratorKind::Point => {
            TransitionSystem::new(alphabet.clone(), [StateId::new("0")], [], [])?
        }
        GeneratorKind::Action(x) => {
            check_labels(alphabet, std::slice::from_ref(x))?;
            TransitionSystem::new(
                alphabet.clone(),
                [],
                [(ActionId::new(x.as_str()), x.clone())],
                [],
            )?
        }
        GeneratorKind::PureCube(labels) => {
            check_cube_dim(labels, dmax)?;
            check_labels(alphabet, labels)?;
            pure_cube(alphabet, labels)?
        }
        GeneratorKind::Cube(labels) => {
            check_cube_dim(labels, dmax)?;
            check_labels(alphabet, labels)?;
            cube(alphabet, labels, false)?
        }
        GeneratorKind::BoundaryCube(labels) => {
            check_cube_dim(labels, dmax)?;
            check_labels(alphabet, labels)?;
            cube(alphabet, labels, true)?
        }
        GeneratorKind::Double(x) => {
            check_labels(alphabet, std::slice::from_ref(x))?;
            let u = ActionId::new(x.as_str());
            TransitionSystem::new(
                alphabet.clone(),
                ["1", "2", "3", "4"].map(StateId::new),
                [(u.clone(), x.clone())],
                [
                    Transition::new("1", [u.clone()], "2"),
                    Transition::new("3", [u], "4"),
                ],
            )?
        }
        GeneratorKind::Interval => interval(alphabet, dmax)?,
        GeneratorKind::Terminal(d) => {
            if *d > dmax {
                return Err(argument(format!(
                    "terminal dimension {d} exceeds bound {dmax}"
                )));
            }
            terminal(alphabet, *d)?
        }
        GeneratorKind::ParallelPair(a, b) => {
            check_labels(alphabet, &[a.clone(), b.clone()])?;
            parallel_pair(alphabet, a, b)?
        }
    };
    debug_assert!(system.validate().ok());
    Ok(Arc::new(system))
}

fn check_cube_dim(labels: &[Label], dmax: usize) -> Result<()> {
    if labels.is_empty() {
        return Err(argument("cube-like generators need at least one label"));
    }
    if labels.len() > dmax {
        return Err(argument(format!(
            "cube dimension {} exceeds bound {dmax}",
            labels.len()
        )));
    }
    Ok(())
}

/// For the representable kinds, checks that the hom-set enumerator agrees
/// with the direct count: maps out of the point are states, maps out of the
/// one-action object are equally-labelled actions, maps out of a pure
/// transition are transitions with that exact label word. Returns the count.
pub fn hom_characterization_check(
    spec: &GeneratorSpec,
    x: &Arc<TransitionSystem>,
    dmax: usize,
) -> Result<usize> {
    let direct = match &spec.kind {
        GeneratorKind::Point => x.states().len(),
        GeneratorKind::Action(l) => x.actions().values().filter(|v| *v == l).count(),
        GeneratorKind::PureCube(labels) => x
            .transitions()
            .iter()
            .filter(|t| t.dim() == labels.len() && x.label_word(t) == *labels)
            .count(),
        other => {
            return Err(argument(format!(
                "no hom characterization for generator {other:?}"
            )))
        }
    };
    let generator = make(spec, dmax)?;
    let enumerated = catops::hom(&generator, x).len();
    assert_eq!(
        enumerated, direct,
        "hom enumeration disagrees with the direct count for {:?}",
        spec.kind
    );
    Ok(enumerated)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab() -> Alphabet {
        Alphabet::from_names(&["a", "b"]).unwrap()
    }

    fn spec(kind: GeneratorKind) -> GeneratorSpec {
        GeneratorSpec {
            kind,
            alphabet: ab(),
        }
    }

    fn labels(names: &[&str]) -> Vec<Label> {
        names.iter().map(|n| Label::new(*n)).collect()
    }

    #[test]
    fn point_has_one_state_nothing_else() {
        let p = make(&spec(GeneratorKind::Point), 4).unwrap();
        assert_eq!(p.states().len(), 1);
        assert!(p.actions().is_empty());
        assert!(p.transitions().is_empty());
    }

    #[test]
    fn square_cube_matches_expected_transitions() {
        let c = make(&spec(GeneratorKind::Cube(labels(&["a", "b"]))), 4).unwrap();
        assert_eq!(c.states().len(), 4);
        assert_eq!(c.actions().len(), 2);
        let a1 = ActionId::new("a.1");
        let b2 = ActionId::new("b.2");
        let expected: Vec<Transition> = vec![
            Transition::new("00", [a1.clone()], "10"),
            Transition::new("00", [b2.clone()], "01"),
            Transition::new("10", [b2.clone()], "11"),
            Transition::new("01", [a1.clone()], "11"),
            Transition::new("00", [a1.clone(), b2.clone()], "11"),
            Transition::new("00", [b2, a1], "11"),
        ];
        assert_eq!(c.transitions().len(), expected.len());
        for t in expected {
            assert!(c.has_transition(&t), "missing {t}");
        }
    }

    #[test]
    fn pure_one_dimensional_cube_is_a_single_arrow() {
        let p = make(&spec(GeneratorKind::PureCube(labels(&["a"]))), 4).unwrap();
        assert_eq!(p.states().len(), 2);
        assert_eq!(p.actions().len(), 1);
        assert_eq!(p.transitions().len(), 1);
        assert!(p.has_transition(&Transition::new("0", [ActionId::new("a.1")], "1")));
    }

    #[test]
    fn double_transition_shape() {
        let d = make(&spec(GeneratorKind::Double(Label::new("a"))), 4).unwrap();
        assert_eq!(d.states().len(), 4);
        assert_eq!(d.actions().len(), 1);
        assert_eq!(d.transitions().len(), 2);
        assert!(d.has_transition(&Transition::new("1", [ActionId::new("a")], "2")));
        assert!(d.has_transition(&Transition::new("3", [ActionId::new("a")], "4")));
    }

    #[test]
    fn every_generator_validates() {
        let kinds = vec![
            GeneratorKind::Point,
            GeneratorKind::Action(Label::new("a")),
            GeneratorKind::PureCube(labels(&["a", "b"])),
            GeneratorKind::Cube(labels(&["a", "b", "a"])),
            GeneratorKind::BoundaryCube(labels(&["a", "b"])),
            GeneratorKind::Double(Label::new("b")),
            GeneratorKind::Interval,
            GeneratorKind::Terminal(2),
            GeneratorKind::ParallelPair(Label::new("a"), Label::new("b")),
        ];
        for kind in kinds {
            let x = make(&spec(kind.clone()), 3).unwrap();
            assert!(x.validate().ok(), "generator {kind:?} fails validation");
        }
    }

    #[test]
    fn boundary_cube_drops_exactly_the_top_dimension() {
        let c = make(&spec(GeneratorKind::Cube(labels(&["a", "b"]))), 4).unwrap();
        let b = make(&spec(GeneratorKind::BoundaryCube(labels(&["a", "b"]))), 4).unwrap();
        assert_eq!(b.states(), c.states());
        assert_eq!(b.actions(), c.actions());
        assert_eq!(b.transitions().len(), c.transitions().len() - 2);
        assert!(b.transitions_of_dim(2).next().is_none());
    }

    #[test]
    fn interval_counts() {
        let v = make(&spec(GeneratorKind::Interval), 2).unwrap();
        assert_eq!(v.states().len(), 2);
        assert_eq!(v.actions().len(), 4);
        // dimension n contributes (2|sigma|)^n * 4 tuples
        assert_eq!(v.transitions_of_dim(1).count(), 16);
        assert_eq!(v.transitions_of_dim(2).count(), 64);
    }

    #[test]
    fn unknown_label_is_an_argument_error() {
        assert!(make(&spec(GeneratorKind::Action(Label::new("zz"))), 4).is_err());
    }

    #[test]
    fn hom_counts_match_direct_counts() {
        let c2 = make(&spec(GeneratorKind::Cube(labels(&["a", "b"]))), 4).unwrap();
        let c1 = make(&spec(GeneratorKind::Cube(labels(&["a"]))), 4).unwrap();
        assert_eq!(
            hom_characterization_check(&spec(GeneratorKind::Point), &c1, 4).unwrap(),
            2
        );
        assert_eq!(
            hom_characterization_check(&spec(GeneratorKind::Action(Label::new("a"))), &c2, 4)
                .unwrap(),
            1
        );
        assert_eq!(
            hom_characterization_check(&spec(GeneratorKind::PureCube(labels(&["a", "b"]))), &c2, 4)
                .unwrap(),
            1
        );
    }
}
