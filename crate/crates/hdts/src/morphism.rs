//! Maps of transition systems: a state map and a label-preserving action map
//! that send transitions to transitions.
//!
//! Also hosts the finite backtracking engine shared by hom-set enumeration,
//! isomorphism search and the lifting solver.

use std::collections::BTreeSet;
use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use crate::error::{structural, Result};
use crate::system::{ActionId, StateId, Transition, TransitionSystem, ValidationReport, Violation};

/// A morphism between two transition systems over the same alphabet.
///
/// The constructor checks totality and reference resolution; the morphism
/// axioms (label preservation, transition preservation) are checked by
/// [`Morphism::check`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Morphism {
    source: Arc<TransitionSystem>,
    target: Arc<TransitionSystem>,
    state_map: BTreeMap<StateId, StateId>,
    action_map: BTreeMap<ActionId, ActionId>,
}

/// Verdict of the monomorphism test, with a collapsed pair on failure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonoReport {
    pub mono: bool,
    pub collapsed_states: Option<(StateId, StateId)>,
    pub collapsed_actions: Option<(ActionId, ActionId)>,
}

impl Morphism {
    pub fn new(
        source: Arc<TransitionSystem>,
        target: Arc<TransitionSystem>,
        state_map: BTreeMap<StateId, StateId>,
        action_map: BTreeMap<ActionId, ActionId>,
    ) -> Result<Self> {
        if source.alphabet() != target.alphabet() {
            return Err(structural("source and target have different alphabets"));
        }
        for s in source.states() {
            match state_map.get(s) {
                None => {
                    return Err(structural(format!(
                        "state map is partial: {s} has no image"
                    )))
                }
                Some(img) if !target.states().contains(img) => {
                    return Err(structural(format!("state {s} maps to unknown state {img}")))
                }
                _ => {}
            }
        }
        for s in state_map.keys() {
            if !source.states().contains(s) {
                return Err(structural(format!("state map mentions foreign state {s}")));
            }
        }
        for a in source.actions().keys() {
            match action_map.get(a) {
                None => {
                    return Err(structural(format!(
                        "action map is partial: {a} has no image"
                    )))
                }
                Some(img) if !target.actions().contains_key(img) => {
                    return Err(structural(format!(
                        "action {a} maps to unknown action {img}"
                    )))
                }
                _ => {}
            }
        }
        for a in action_map.keys() {
            if !source.actions().contains_key(a) {
                return Err(structural(format!(
                    "action map mentions foreign action {a}"
                )));
            }
        }
        Ok(Morphism {
            source,
            target,
            state_map,
            action_map,
        })
    }

    pub fn identity(x: Arc<TransitionSystem>) -> Self {
        let state_map = x.states().iter().map(|s| (s.clone(), s.clone())).collect();
        let action_map = x.actions().keys().map(|a| (a.clone(), a.clone())).collect();
        Morphism {
            source: x.clone(),
            target: x,
            state_map,
            action_map,
        }
    }

    pub fn source(&self) -> &Arc<TransitionSystem> {
        &self.source
    }

    pub fn target(&self) -> &Arc<TransitionSystem> {
        &self.target
    }

    pub fn state_map(&self) -> &BTreeMap<StateId, StateId> {
        &self.state_map
    }

    pub fn action_map(&self) -> &BTreeMap<ActionId, ActionId> {
        &self.action_map
    }

    pub fn on_state(&self, s: &StateId) -> &StateId {
        &self.state_map[s]
    }

    pub fn on_action(&self, a: &ActionId) -> &ActionId {
        &self.action_map[a]
    }

    pub fn on_transition(&self, t: &Transition) -> Transition {
        Transition::new(
            self.on_state(&t.from).clone(),
            t.actions.iter().map(|a| self.on_action(a).clone()),
            self.on_state(&t.to).clone(),
        )
    }

    /// Checks label preservation and transition preservation, with witnesses.
    pub fn check(&self) -> ValidationReport {
        let mut violations = Vec::new();
        for (a, img) in &self.action_map {
            let expected = &self.source.actions()[a];
            let got = &self.target.actions()[img];
            if expected != got {
                violations.push(Violation::LabelMismatch {
                    action: a.clone(),
                    expected: expected.clone(),
                    image: img.clone(),
                    got: got.clone(),
                });
            }
        }
        for t in self.source.transitions() {
            let image = self.on_transition(t);
            if !self.target.has_transition(&image) {
                violations.push(Violation::UnpreservedTransition {
                    transition: t.clone(),
                    image,
                });
            }
        }
        ValidationReport { violations }
    }

    pub fn is_valid(&self) -> bool {
        self.check().ok()
    }

    /// `other` then `self`; fails if the middle objects differ.
    pub fn compose(&self, other: &Morphism) -> Result<Morphism> {
        if other.target != self.source {
            return Err(structural(
                "composition mismatch: target of first is not source of second",
            ));
        }
        let state_map = other
            .state_map
            .iter()
            .map(|(s, m)| (s.clone(), self.on_state(m).clone()))
            .collect();
        let action_map = other
            .action_map
            .iter()
            .map(|(a, m)| (a.clone(), self.on_action(m).clone()))
            .collect();
        Morphism::new(
            other.source.clone(),
            self.target.clone(),
            state_map,
            action_map,
        )
    }

    pub fn is_injective_on_states(&self) -> Option<(StateId, StateId)> {
        let mut seen: BTreeMap<&StateId, &StateId> = BTreeMap::new();
        for (s, img) in &self.state_map {
            if let Some(prev) = seen.insert(img, s) {
                return Some((prev.clone(), s.clone()));
            }
        }
        None
    }

    pub fn is_injective_on_actions(&self) -> Option<(ActionId, ActionId)> {
        let mut seen: BTreeMap<&ActionId, &ActionId> = BTreeMap::new();
        for (a, img) in &self.action_map {
            if let Some(prev) = seen.insert(img, a) {
                return Some((prev.clone(), a.clone()));
            }
        }
        None
    }

    /// A map is a monomorphism exactly when it is injective on states and on
    /// actions; on failure the report carries a collapsed pair.
    pub fn is_mono(&self) -> MonoReport {
        let collapsed_states = self.is_injective_on_states();
        let collapsed_actions = self.is_injective_on_actions();
        MonoReport {
            mono: collapsed_states.is_none() && collapsed_actions.is_none(),
            collapsed_states,
            collapsed_actions,
        }
    }

    pub fn is_surjective_on_states(&self) -> bool {
        let image: BTreeSet<&StateId> = self.state_map.values().collect();
        image.len() == self.target.states().len()
    }

    pub fn is_surjective_on_actions(&self) -> bool {
        let image: BTreeSet<&ActionId> = self.action_map.values().collect();
        image.len() == self.target.actions().len()
    }
}

/// Parameters for the backtracking search over structure maps.
///
/// Candidates are tried in lexicographic order, so the result list order is
/// deterministic given the input ordering.
pub(crate) struct SearchSpec<'a> {
    pub source: &'a TransitionSystem,
    pub target: &'a TransitionSystem,
    /// Forced images; a search result always extends these.
    pub pin_states: BTreeMap<StateId, StateId>,
    pub pin_actions: BTreeMap<ActionId, ActionId>,
    /// Per-element candidate restriction (used by the lifting solver).
    pub allowed_states: Option<BTreeMap<StateId, BTreeSet<StateId>>>,
    pub allowed_actions: Option<BTreeMap<ActionId, BTreeSet<ActionId>>>,
    /// Require the assignment to be a bijection on states and on actions.
    pub bijective: bool,
    pub limit: usize,
}

impl<'a> SearchSpec<'a> {
    pub fn new(source: &'a TransitionSystem, target: &'a TransitionSystem) -> Self {
        SearchSpec {
            source,
            target,
            pin_states: BTreeMap::new(),
            pin_actions: BTreeMap::new(),
            allowed_states: None,
            allowed_actions: None,
            bijective: false,
            limit: usize::MAX,
        }
    }
}

/// Transitions re-encoded over dense element indices, packed into u64 keys
/// so that membership tests allocate nothing. Slot zero distinguishes
/// states from actions by construction of the key layout.
struct NumericSearch {
    /// (is_state, source element index) per search position.
    order: Vec<(bool, usize)>,
    /// Per-position candidate target indices.
    candidates: Vec<Vec<u32>>,
    /// Source transitions as (from, word, to) over source indices, grouped
    /// by the position of their last-assigned element.
    transitions: Vec<(usize, Vec<usize>, usize)>,
    checks_at: Vec<Vec<usize>>,
    /// Packed target tuples.
    target_keys: std::collections::HashSet<u128>,
    bits: u32,
    bijective: bool,
    limit: usize,
    state_assign: Vec<Option<u32>>,
    action_assign: Vec<Option<u32>>,
    used_states: Vec<bool>,
    used_actions: Vec<bool>,
    results: Vec<(Vec<u32>, Vec<u32>)>,
}

impl NumericSearch {
    fn image_ok(&self, index: usize) -> bool {
        let (from, word, to) = &self.transitions[index];
        let Some(from) = self.state_assign[*from] else {
            return true;
        };
        let Some(to) = self.state_assign[*to] else {
            return true;
        };
        let mut key = 1u128;
        key = (key << self.bits) | u128::from(from);
        for a in word {
            match self.action_assign[*a] {
                Some(img) => key = (key << self.bits) | u128::from(img),
                None => return true,
            }
        }
        key = (key << self.bits) | u128::from(to);
        self.target_keys.contains(&key)
    }

    fn run(&mut self, pos: usize) {
        if self.results.len() >= self.limit {
            return;
        }
        if pos == self.order.len() {
            self.results.push((
                self.state_assign.iter().map(|v| v.unwrap_or(0)).collect(),
                self.action_assign.iter().map(|v| v.unwrap_or(0)).collect(),
            ));
            return;
        }
        let (is_state, src) = self.order[pos];
        for i in 0..self.candidates[pos].len() {
            let c = self.candidates[pos][i];
            let used = if is_state {
                &mut self.used_states
            } else {
                &mut self.used_actions
            };
            if self.bijective && used[c as usize] {
                continue;
            }
            if self.bijective {
                used[c as usize] = true;
            }
            if is_state {
                self.state_assign[src] = Some(c);
            } else {
                self.action_assign[src] = Some(c);
            }
            if self.checks_at[pos].iter().all(|t| self.image_ok(*t)) {
                self.run(pos + 1);
            }
            if is_state {
                self.state_assign[src] = None;
            } else {
                self.action_assign[src] = None;
            }
            if self.bijective {
                let used = if is_state {
                    &mut self.used_states
                } else {
                    &mut self.used_actions
                };
                used[c as usize] = false;
            }
        }
    }
}

/// Enumerates all label-preserving, transition-preserving assignments that
/// satisfy the spec. Complete on finite inputs.
pub(crate) fn search_maps(
    spec: &SearchSpec<'_>,
) -> Vec<(BTreeMap<StateId, StateId>, BTreeMap<ActionId, ActionId>)> {
    // Pins must themselves be consistent before searching.
    for (s, img) in &spec.pin_states {
        if !spec.target.states().contains(img) || !spec.source.states().contains(s) {
            return Vec::new();
        }
    }
    for (a, img) in &spec.pin_actions {
        if !spec.source.actions().contains_key(a) {
            return Vec::new();
        }
        match spec.target.actions().get(img) {
            Some(l) if *l == spec.source.actions()[a] => {}
            _ => return Vec::new(),
        }
    }
    if spec.bijective
        && (spec.source.states().len() != spec.target.states().len()
            || spec.source.actions().len() != spec.target.actions().len())
    {
        return Vec::new();
    }
    if spec.bijective {
        let pinned_state_images: BTreeSet<_> = spec.pin_states.values().collect();
        if pinned_state_images.len() != spec.pin_states.len() {
            return Vec::new();
        }
        let pinned_action_images: BTreeSet<_> = spec.pin_actions.values().collect();
        if pinned_action_images.len() != spec.pin_actions.len() {
            return Vec::new();
        }
    }

    // Dense element tables on both sides.
    let src_states: Vec<&StateId> = spec.source.states().iter().collect();
    let src_actions: Vec<&ActionId> = spec.source.actions().keys().collect();
    let tgt_states: Vec<&StateId> = spec.target.states().iter().collect();
    let tgt_actions: Vec<&ActionId> = spec.target.actions().keys().collect();
    let src_state_idx: HashMap<&StateId, usize> = src_states
        .iter()
        .enumerate()
        .map(|(i, s)| (*s, i))
        .collect();
    let src_action_idx: HashMap<&ActionId, usize> = src_actions
        .iter()
        .enumerate()
        .map(|(i, a)| (*a, i))
        .collect();
    let tgt_state_idx: HashMap<&StateId, u32> = tgt_states
        .iter()
        .enumerate()
        .map(|(i, s)| (*s, i as u32))
        .collect();
    let tgt_action_idx: HashMap<&ActionId, u32> = tgt_actions
        .iter()
        .enumerate()
        .map(|(i, a)| (*a, i as u32))
        .collect();

    const BITS: u32 = 16;
    assert!(
        tgt_states.len() < 1 << BITS && tgt_actions.len() < 1 << BITS,
        "search target too large for the packed encoding"
    );

    let mut target_keys: std::collections::HashSet<u128> =
        std::collections::HashSet::with_capacity(spec.target.transitions().len() * 2);
    for t in spec.target.transitions() {
        assert!(
            (t.dim() as u32 + 2) * BITS + 1 <= 128,
            "dimension too large for the packed encoding"
        );
        let mut key = 1u128;
        key = (key << BITS) | u128::from(tgt_state_idx[&t.from]);
        for a in &t.actions {
            key = (key << BITS) | u128::from(tgt_action_idx[a]);
        }
        key = (key << BITS) | u128::from(tgt_state_idx[&t.to]);
        target_keys.insert(key);
    }

    let mut state_assign: Vec<Option<u32>> = vec![None; src_states.len()];
    let mut action_assign: Vec<Option<u32>> = vec![None; src_actions.len()];
    for (s, img) in &spec.pin_states {
        state_assign[src_state_idx[s]] = Some(tgt_state_idx[img]);
    }
    for (a, img) in &spec.pin_actions {
        action_assign[src_action_idx[a]] = Some(tgt_action_idx[img]);
    }

    let mut order: Vec<(bool, usize)> = Vec::new();
    let mut candidates: Vec<Vec<u32>> = Vec::new();
    // Search position of each unpinned element, for the check schedule.
    let mut state_pos: Vec<Option<usize>> = vec![None; src_states.len()];
    let mut action_pos: Vec<Option<usize>> = vec![None; src_actions.len()];
    for (i, s) in src_states.iter().enumerate() {
        if state_assign[i].is_some() {
            continue;
        }
        state_pos[i] = Some(order.len());
        order.push((true, i));
        candidates.push(
            tgt_states
                .iter()
                .filter(|c| {
                    spec.allowed_states
                        .as_ref()
                        .and_then(|m| m.get(*s))
                        .map_or(true, |set| set.contains(**c))
                })
                .map(|c| tgt_state_idx[*c])
                .collect(),
        );
    }
    for (i, a) in src_actions.iter().enumerate() {
        if action_assign[i].is_some() {
            continue;
        }
        action_pos[i] = Some(order.len());
        order.push((false, i));
        let label = &spec.source.actions()[*a];
        candidates.push(
            tgt_actions
                .iter()
                .filter(|c| spec.target.actions()[**c] == *label)
                .filter(|c| {
                    spec.allowed_actions
                        .as_ref()
                        .and_then(|m| m.get(*a))
                        .map_or(true, |set| set.contains(**c))
                })
                .map(|c| tgt_action_idx[*c])
                .collect(),
        );
    }

    let transitions: Vec<(usize, Vec<usize>, usize)> = spec
        .source
        .transitions()
        .iter()
        .map(|t| {
            (
                src_state_idx[&t.from],
                t.actions.iter().map(|a| src_action_idx[a]).collect(),
                src_state_idx[&t.to],
            )
        })
        .collect();
    let mut checks_at: Vec<Vec<usize>> = vec![Vec::new(); order.len() + 1];
    let mut pinned_checks: Vec<usize> = Vec::new();
    for (index, (from, word, to)) in transitions.iter().enumerate() {
        let mut last = None;
        for pos in [state_pos[*from], state_pos[*to]]
            .into_iter()
            .chain(word.iter().map(|a| action_pos[*a]))
            .flatten()
        {
            last = Some(last.map_or(pos, |l: usize| l.max(pos)));
        }
        match last {
            Some(p) => checks_at[p].push(index),
            None => pinned_checks.push(index),
        }
    }

    let mut used_states = vec![false; tgt_states.len()];
    let mut used_actions = vec![false; tgt_actions.len()];
    if spec.bijective {
        for img in state_assign.iter().flatten() {
            used_states[*img as usize] = true;
        }
        for img in action_assign.iter().flatten() {
            used_actions[*img as usize] = true;
        }
    }
    let mut searcher = NumericSearch {
        order,
        candidates,
        transitions,
        checks_at,
        target_keys,
        bits: BITS,
        bijective: spec.bijective,
        limit: spec.limit,
        state_assign,
        action_assign,
        used_states,
        used_actions,
        results: Vec::new(),
    };
    // Transitions fully fixed by the pins are checked up front.
    if !pinned_checks.iter().all(|t| searcher.image_ok(*t)) {
        return Vec::new();
    }
    searcher.run(0);

    searcher
        .results
        .into_iter()
        .map(|(states, actions)| {
            (
                states
                    .into_iter()
                    .enumerate()
                    .map(|(i, img)| (src_states[i].clone(), tgt_states[img as usize].clone()))
                    .collect(),
                actions
                    .into_iter()
                    .enumerate()
                    .map(|(i, img)| (src_actions[i].clone(), tgt_actions[img as usize].clone()))
                    .collect(),
            )
        })
        .collect()
}

/// Searches for an isomorphism between the two systems: bijective on states
/// and on actions, label preserving, transition preserving in both
/// directions. Returns the first one in lexicographic assignment order.
pub fn find_isomorphism(x: &Arc<TransitionSystem>, y: &Arc<TransitionSystem>) -> Option<Morphism> {
    if x.alphabet() != y.alphabet() {
        return None;
    }
    if x.states().len() != y.states().len()
        || x.actions().len() != y.actions().len()
        || x.transitions().len() != y.transitions().len()
    {
        return None;
    }
    let max_dim = x.dimension().max(y.dimension());
    for n in 1..=max_dim {
        if x.transitions_of_dim(n).count() != y.transitions_of_dim(n).count() {
            return None;
        }
    }
    for label in x.alphabet().labels() {
        let cx = x.actions().values().filter(|l| *l == label).count();
        let cy = y.actions().values().filter(|l| *l == label).count();
        if cx != cy {
            return None;
        }
    }
    let mut spec = SearchSpec::new(x, y);
    spec.bijective = true;
    spec.limit = 1;
    let (state_map, action_map) = search_maps(&spec).into_iter().next()?;
    // A bijective transition-preserving map between systems with equally many
    // transitions is automatically an isomorphism: the induced tuple map is
    // injective, hence onto, so the inverse preserves transitions too.
    Some(
        Morphism::new(x.clone(), y.clone(), state_map, action_map).expect("search output is total"),
    )
}

/// Like [`find_isomorphism`] but with prescribed images for some states and
/// actions; used to check isomorphy over a common base.
pub fn find_isomorphism_pinned(
    x: &Arc<TransitionSystem>,
    y: &Arc<TransitionSystem>,
    pin_states: BTreeMap<StateId, StateId>,
    pin_actions: BTreeMap<ActionId, ActionId>,
) -> Option<Morphism> {
    if x.alphabet() != y.alphabet()
        || x.states().len() != y.states().len()
        || x.actions().len() != y.actions().len()
        || x.transitions().len() != y.transitions().len()
    {
        return None;
    }
    let mut spec = SearchSpec::new(x, y);
    spec.bijective = true;
    spec.limit = 1;
    spec.pin_states = pin_states;
    spec.pin_actions = pin_actions;
    let (state_map, action_map) = search_maps(&spec).into_iter().next()?;
    Some(
        Morphism::new(x.clone(), y.clone(), state_map, action_map).expect("search output is total"),
    )
}
