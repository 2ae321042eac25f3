//! Shared corpus and helpers for the integration suites: every generator
//! over the two-label alphabet up to dimension three, the concurrency
//! square, amalgamated sums of arrows, and twenty seeded random valid
//! systems, plus a tiny deterministic generator for reproducible sampling.

use std::collections::BTreeMap;
use std::sync::Arc;

use hdts::catops;
use hdts::generators::{make, GeneratorKind, GeneratorSpec};
use hdts::morphism::Morphism;
use hdts::system::{ActionId, Alphabet, Label, StateId, Transition, TransitionSystem};

pub const CORPUS_DIM: usize = 3;

pub fn alphabet() -> Alphabet {
    Alphabet::from_names(&["a", "b"]).unwrap()
}

pub fn gen(kind: GeneratorKind) -> Arc<TransitionSystem> {
    make(
        &GeneratorSpec {
            kind,
            alphabet: alphabet(),
        },
        CORPUS_DIM,
    )
    .unwrap()
}

pub fn label_words(max_dim: usize) -> Vec<Vec<Label>> {
    let mut out = Vec::new();
    let mut layer: Vec<Vec<Label>> = vec![Vec::new()];
    for _ in 0..max_dim {
        let mut next = Vec::new();
        for w in &layer {
            for l in alphabet().labels() {
                let mut w2 = w.clone();
                w2.push(l.clone());
                next.push(w2);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Endpoint-glued sum of two arrows: the target of the first arrow is
/// identified with the source of the second.
pub fn amalgam(first: &str, second: &str) -> Arc<TransitionSystem> {
    let pt = gen(GeneratorKind::Point);
    let a = gen(GeneratorKind::Cube(vec![Label::new(first)]));
    let b = gen(GeneratorKind::Cube(vec![Label::new(second)]));
    let pick1 = Morphism::new(
        pt.clone(),
        a,
        [(StateId::new("0"), StateId::new("1"))].into(),
        BTreeMap::new(),
    )
    .unwrap();
    let pick0 = Morphism::new(
        pt,
        b,
        [(StateId::new("0"), StateId::new("0"))].into(),
        BTreeMap::new(),
    )
    .unwrap();
    let (apex, _, _) = catops::pushout(&pick1, &pick0).unwrap();
    apex
}

/// SplitMix64: deterministic, seed-stable across platforms.
pub struct Rng(u64);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }

    pub fn pick<'a, T>(&mut self, items: &'a [T]) -> &'a T {
        &items[self.below(items.len())]
    }
}

/// A random structurally valid system, closed under the axioms: at most
/// five states, four actions, dimension three.
pub fn random_system(seed: u64) -> Arc<TransitionSystem> {
    let mut rng = Rng::new(seed);
    let n_states = 2 + rng.below(4);
    let states: Vec<StateId> = (0..n_states)
        .map(|i| StateId::new(format!("s{i}")))
        .collect();
    let n_actions = 1 + rng.below(4);
    let labels = ["a", "b"];
    let actions: Vec<(ActionId, Label)> = (0..n_actions)
        .map(|i| {
            (
                ActionId::new(format!("u{i}")),
                Label::new(*rng.pick(&labels)),
            )
        })
        .collect();
    let n_seeds = 1 + rng.below(4);
    let mut transitions = Vec::new();
    for _ in 0..n_seeds {
        let dim = 1 + rng.below(3);
        let from = rng.pick(&states).clone();
        let word: Vec<ActionId> = (0..dim)
            .map(|_| actions[rng.below(n_actions)].0.clone())
            .collect();
        let to = rng.pick(&states).clone();
        transitions.push(Transition::new(from, word, to));
    }
    let raw = TransitionSystem::new(alphabet(), states, actions, transitions).unwrap();
    Arc::new(raw.closure())
}

/// The full acceptance corpus, with stable names.
pub fn corpus() -> Vec<(String, Arc<TransitionSystem>)> {
    let mut out: Vec<(String, Arc<TransitionSystem>)> = Vec::new();
    let mut push = |name: String, system: Arc<TransitionSystem>| out.push((name, system));
    push("point".into(), gen(GeneratorKind::Point));
    for l in ["a", "b"] {
        push(
            format!("action:{l}"),
            gen(GeneratorKind::Action(Label::new(l))),
        );
        push(
            format!("double:{l}"),
            gen(GeneratorKind::Double(Label::new(l))),
        );
    }
    for w in label_words(CORPUS_DIM) {
        let word = w.iter().map(Label::to_string).collect::<Vec<_>>().join(".");
        push(format!("cube:{word}"), gen(GeneratorKind::Cube(w.clone())));
        push(
            format!("boundary:{word}"),
            gen(GeneratorKind::BoundaryCube(w.clone())),
        );
        if w.len() >= 2 {
            // One-dimensional pure transitions coincide with the cubes.
            push(
                format!("pure:{word}"),
                gen(GeneratorKind::PureCube(w.clone())),
            );
        }
    }
    push("interval".into(), gen(GeneratorKind::Interval));
    push("terminal:3".into(), gen(GeneratorKind::Terminal(3)));
    push(
        "parallel:a.b".into(),
        gen(GeneratorKind::ParallelPair(
            Label::new("a"),
            Label::new("b"),
        )),
    );
    push("amalgam:a.b".into(), amalgam("a", "b"));
    push("amalgam:a.a".into(), amalgam("a", "a"));
    for i in 0..20u64 {
        push(format!("random:{i}"), random_system(1000 + i));
    }
    out
}

/// The joint insertion of both copies into the cylinder, reflected into the
/// regular quotient: not injective on states as soon as internal states
/// exist, yet a cofibration of the regular category.
pub fn regular_cylinder_insertion(x: &Arc<TransitionSystem>) -> Morphism {
    let cyl = hdts::cylinder::cylinder(x);
    let (sum, ins) = catops::coproduct(x.alphabet(), &[x.clone(), x.clone()]).unwrap();
    let mut state_map = BTreeMap::new();
    let mut action_map = BTreeMap::new();
    for (i, side) in [&cyl.insert0, &cyl.insert1].iter().enumerate() {
        for s in x.states() {
            state_map.insert(ins[i].on_state(s).clone(), side.on_state(s).clone());
        }
        for a in x.actions().keys() {
            action_map.insert(ins[i].on_action(a).clone(), side.on_action(a).clone());
        }
    }
    let joint = Morphism::new(sum, cyl.object.clone(), state_map, action_map).unwrap();
    let reflection = hdts::subcats::regularize(&cyl.object).unwrap();
    reflection.unit.compose(&joint).unwrap()
}
