//! The cubical and regular subcategories: classification of the two extra
//! axioms, the coreflection onto cubical systems via cube-filler images, the
//! reflection onto regular systems by merging duplicate intermediate states,
//! the path space in each of the three categories, and the machinery for
//! based systems: reachability, the star-shaped coreflection, the based
//! cylinder, and same-past pairs.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use crate::cylinder::{self, PathSpace};
use crate::error::{argument, Result};
use crate::morphism::Morphism;
use crate::system::{build_prefix_index, ActionId, StateId, Transition, TransitionSystem};
use crate::Variant;

/// Verdicts for the axioms separating weak, cubical and regular systems,
/// with witnesses for each failure.
#[derive(Debug, Clone, Default)]
pub struct ClassificationReport {
    pub is_weak: bool,
    pub all_actions_used: bool,
    pub intermediate_state: bool,
    pub unique_intermediate_state: bool,
    pub unused_actions: Vec<ActionId>,
    /// Transitions with a position admitting no dividing state.
    pub missing_intermediate: Vec<(Transition, usize)>,
    /// Transitions with a position divided by two distinct states.
    pub duplicate_intermediate: Vec<(Transition, usize, StateId, StateId)>,
}

impl ClassificationReport {
    pub fn is_cubical(&self) -> bool {
        self.is_weak && self.all_actions_used && self.intermediate_state
    }

    pub fn is_regular(&self) -> bool {
        self.is_cubical() && self.unique_intermediate_state
    }
}

/// Evaluates the used-action axiom, the intermediate state axiom and its
/// unique variant, recording witnesses for every failure.
pub fn classify(x: &TransitionSystem) -> ClassificationReport {
    let mut report = ClassificationReport {
        is_weak: x.validate().ok(),
        all_actions_used: true,
        intermediate_state: true,
        unique_intermediate_state: true,
        ..Default::default()
    };
    let used: BTreeSet<&ActionId> = x.transitions_of_dim(1).map(|t| &t.actions[0]).collect();
    for a in x.actions().keys() {
        if !used.contains(a) {
            report.all_actions_used = false;
            report.unused_actions.push(a.clone());
        }
    }
    let index = build_prefix_index(x.transitions());
    for t in x.transitions() {
        let n = t.dim();
        if n < 2 {
            continue;
        }
        for p in 1..n {
            let dividers = dividers_at(x, &index, t, p);
            match dividers.len() {
                0 => {
                    report.intermediate_state = false;
                    report.unique_intermediate_state = false;
                    report.missing_intermediate.push((t.clone(), p));
                }
                1 => {}
                _ => {
                    report.unique_intermediate_state = false;
                    let mut it = dividers.into_iter();
                    let first = it.next().unwrap();
                    let second = it.next().unwrap();
                    report
                        .duplicate_intermediate
                        .push((t.clone(), p, first, second));
                }
            }
        }
    }
    report
}

fn dividers_at(
    x: &TransitionSystem,
    index: &crate::system::PrefixIndex,
    t: &Transition,
    p: usize,
) -> BTreeSet<StateId> {
    let prefix = t.actions[..p].to_vec();
    let suffix = t.actions[p..].to_vec();
    let mut out = BTreeSet::new();
    if let Some(candidates) = index.get(&(t.from.clone(), prefix)) {
        for nu in candidates {
            if x.has_transition(&Transition::new(nu.clone(), suffix.clone(), t.to.clone())) {
                out.insert(nu.clone());
            }
        }
    }
    out
}

/// Searches for a labelled-cube filler of the transition: an assignment of
/// states to all cube vertices, with the transition's actions as directions,
/// such that every face tuple is a transition. Returns the vertex assignment
/// indexed by bit mask, or `None`.
pub(crate) fn cube_filler(x: &TransitionSystem, t: &Transition) -> Option<Vec<StateId>> {
    let n = t.dim();
    let size = 1usize << n;
    let mut assign: Vec<Option<StateId>> = vec![None; size];
    assign[0] = Some(t.from.clone());
    assign[size - 1] = Some(t.to.clone());
    // Vertices in popcount-then-value order; endpoints are already fixed.
    let mut order: Vec<usize> = (1..size - 1).collect();
    order.sort_by_key(|v| (v.count_ones(), *v));
    let states: Vec<StateId> = x.states().iter().cloned().collect();
    let index: HashSet<&Transition> = x.transitions().iter().collect();

    fn edges_ok(
        index: &HashSet<&Transition>,
        t: &Transition,
        assign: &[Option<StateId>],
        v: usize,
    ) -> bool {
        for (w, slot) in assign.iter().enumerate() {
            if slot.is_none() {
                continue;
            }
            let (lo, hi) = if w & !v == 0 && w != v {
                (w, v)
            } else if v & !w == 0 && w != v {
                (v, w)
            } else {
                continue;
            };
            let word: Vec<ActionId> = (0..t.dim())
                .filter(|i| (lo ^ hi) >> i & 1 == 1)
                .map(|i| t.actions[i].clone())
                .collect();
            let candidate = Transition::new(
                assign[lo].clone().unwrap(),
                word,
                assign[hi].clone().unwrap(),
            );
            if !index.contains(&candidate) {
                return false;
            }
        }
        true
    }

    fn go(
        index: &HashSet<&Transition>,
        t: &Transition,
        order: &[usize],
        states: &[StateId],
        assign: &mut Vec<Option<StateId>>,
        pos: usize,
    ) -> bool {
        if pos == order.len() {
            return true;
        }
        let v = order[pos];
        for s in states {
            assign[v] = Some(s.clone());
            if edges_ok(index, t, assign, v) && go(index, t, order, states, assign, pos + 1) {
                return true;
            }
            assign[v] = None;
        }
        false
    }

    // The fixed endpoints must be compatible before searching the interior.
    if !edges_ok(&index, t, &assign, 0) || !edges_ok(&index, t, &assign, size - 1) {
        return None;
    }
    if go(&index, t, &order, &states, &mut assign, 0) {
        Some(assign.into_iter().map(Option::unwrap).collect())
    } else {
        None
    }
}

/// A coreflection result: the coreflected object with its counit into the
/// original system.
#[derive(Debug, Clone)]
pub struct Coreflection {
    pub object: Arc<TransitionSystem>,
    pub counit: Morphism,
}

/// The coreflection onto cubical systems: same states, only the actions used
/// by one-dimensional transitions, and the closure of the transitions that
/// are images of labelled cubes (a transition survives exactly when it
/// extends to a full cube inside the original system).
pub fn cubicalify(x: &Arc<TransitionSystem>) -> Coreflection {
    let used: BTreeSet<ActionId> = x
        .transitions_of_dim(1)
        .map(|t| t.actions[0].clone())
        .collect();
    let mut kept: BTreeSet<Transition> = x.transitions_of_dim(1).cloned().collect();
    let mut filler_memo: HashMap<(StateId, Vec<ActionId>, StateId), bool> = HashMap::new();
    for t in x.transitions() {
        if t.dim() < 2 {
            continue;
        }
        let mut key_actions = t.actions.clone();
        key_actions.sort();
        let key = (t.from.clone(), key_actions, t.to.clone());
        let fills = *filler_memo
            .entry(key)
            .or_insert_with(|| cube_filler(x, t).is_some());
        if fills {
            kept.insert(t.clone());
        }
    }
    let object = Arc::new(
        TransitionSystem::new(
            x.alphabet().clone(),
            x.states().iter().cloned(),
            x.actions()
                .iter()
                .filter(|(a, _)| used.contains(*a))
                .map(|(a, l)| (a.clone(), l.clone())),
            kept,
        )
        .expect("coreflection carrier is structurally sound")
        .closure(),
    );
    let counit = Morphism::new(
        object.clone(),
        x.clone(),
        object
            .states()
            .iter()
            .map(|s| (s.clone(), s.clone()))
            .collect(),
        object
            .actions()
            .keys()
            .map(|a| (a.clone(), a.clone()))
            .collect(),
    )
    .expect("counit is total");
    assert!(
        counit.is_mono().mono,
        "coreflection counit must be a monomorphism"
    );
    assert!(
        classify(&object).is_cubical(),
        "coreflection must produce a cubical system"
    );
    Coreflection { object, counit }
}

/// A reflection result: the reflected object with the unit from the original
/// system.
#[derive(Debug, Clone)]
pub struct Reflection {
    pub object: Arc<TransitionSystem>,
    pub unit: Morphism,
}

/// The reflection onto regular systems. Each round merges every pair of
/// distinct states dividing the same transition at the same position, pushes
/// the transitions forward, re-closes, and repeats; every round strictly
/// decreases the number of states, so the loop terminates.
pub fn regularize(x: &Arc<TransitionSystem>) -> Result<Reflection> {
    if !classify(x).is_cubical() {
        return Err(argument("regularization requires a cubical system"));
    }
    let mut current = x.as_ref().clone();
    // Composed state mapping from the original system.
    let mut state_to: BTreeMap<StateId, StateId> =
        x.states().iter().map(|s| (s.clone(), s.clone())).collect();
    loop {
        let report = classify(&current);
        assert!(
            report.is_cubical(),
            "reflection rounds must preserve cubicality"
        );
        if report.unique_intermediate_state {
            break;
        }
        let mut rep: BTreeMap<StateId, StateId> = current
            .states()
            .iter()
            .map(|s| (s.clone(), s.clone()))
            .collect();
        fn find(rep: &mut BTreeMap<StateId, StateId>, s: &StateId) -> StateId {
            let parent = rep[s].clone();
            if parent == *s {
                return parent;
            }
            let root = find(rep, &parent);
            rep.insert(s.clone(), root.clone());
            root
        }
        for (_, _, nu1, nu2) in &report.duplicate_intermediate {
            let (r1, r2) = (find(&mut rep, nu1), find(&mut rep, nu2));
            if r1 != r2 {
                let (lo, hi) = if r1 < r2 { (r1, r2) } else { (r2, r1) };
                rep.insert(hi, lo);
            }
        }
        let class: BTreeMap<StateId, StateId> = current
            .states()
            .iter()
            .map(|s| (s.clone(), find(&mut rep, s)))
            .collect();
        let quotient = TransitionSystem::new(
            current.alphabet().clone(),
            class.values().cloned().collect::<BTreeSet<_>>(),
            current
                .actions()
                .iter()
                .map(|(a, l)| (a.clone(), l.clone())),
            current.transitions().iter().map(|t| {
                Transition::new(
                    class[&t.from].clone(),
                    t.actions.iter().cloned(),
                    class[&t.to].clone(),
                )
            }),
        )
        .expect("quotient carrier is structurally sound")
        .closure();
        assert!(quotient.states().len() < current.states().len());
        for target in state_to.values_mut() {
            *target = class[target].clone();
        }
        current = quotient;
    }
    let object = Arc::new(current);
    let unit = Morphism::new(
        x.clone(),
        object.clone(),
        state_to,
        x.actions().keys().map(|a| (a.clone(), a.clone())).collect(),
    )
    .expect("unit is total");
    assert!(unit.is_valid());
    assert!(
        classify(&object).is_regular(),
        "reflection must produce a regular system"
    );
    Ok(Reflection { object, unit })
}

/// The path space in the chosen category: the raw pair construction for
/// weak systems, its cubical coreflection for cubical ones, and the same
/// coreflection (then asserted regular) for regular ones.
pub fn path_space(x: &Arc<TransitionSystem>, variant: Variant) -> Result<PathSpace> {
    let raw = cylinder::cocylinder(x);
    match variant {
        Variant::Wts => Ok(raw),
        Variant::Cts | Variant::Rts => {
            let report = classify(x);
            if variant == Variant::Cts && !report.is_cubical() {
                return Err(argument("cubical path space requires a cubical system"));
            }
            if variant == Variant::Rts && !report.is_regular() {
                return Err(argument("regular path space requires a regular system"));
            }
            let coreflection = cubicalify(&raw.object);
            let proj0 = raw
                .proj0
                .compose(&coreflection.counit)
                .expect("counit composes");
            let proj1 = raw
                .proj1
                .compose(&coreflection.counit)
                .expect("counit composes");
            if variant == Variant::Rts {
                assert!(
                    classify(&coreflection.object).is_regular(),
                    "path space of a regular system must be regular"
                );
            }
            Ok(PathSpace {
                object: coreflection.object,
                proj0,
                proj1,
            })
        }
    }
}

/// A system with a chosen base state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointedSystem {
    pub system: Arc<TransitionSystem>,
    pub base: StateId,
}

impl PointedSystem {
    pub fn new(system: Arc<TransitionSystem>, base: StateId) -> Result<Self> {
        if !system.states().contains(&base) {
            return Err(argument(format!(
                "base state {base} is not a state of the system"
            )));
        }
        Ok(PointedSystem { system, base })
    }
}

/// The least set of states containing the base and closed under taking the
/// target of a transition with reachable source.
pub fn reachable(p: &PointedSystem) -> BTreeSet<StateId> {
    let mut reached: BTreeSet<StateId> = [p.base.clone()].into();
    let mut frontier = vec![p.base.clone()];
    let mut by_source: BTreeMap<&StateId, Vec<&Transition>> = BTreeMap::new();
    for t in p.system.transitions() {
        by_source.entry(&t.from).or_default().push(t);
    }
    while let Some(s) = frontier.pop() {
        if let Some(ts) = by_source.get(&s) {
            for t in ts {
                if reached.insert(t.to.clone()) {
                    frontier.push(t.to.clone());
                }
            }
        }
    }
    reached
}

/// Every state of a star-shaped system is reachable from its base.
pub fn is_star_shaped(p: &PointedSystem) -> bool {
    reachable(p).len() == p.system.states().len()
}

fn check_variant(x: &TransitionSystem, variant: Variant) -> Result<()> {
    let report = classify(x);
    let ok = match variant {
        Variant::Wts => report.is_weak,
        Variant::Cts => report.is_cubical(),
        Variant::Rts => report.is_regular(),
    };
    if ok {
        Ok(())
    } else {
        Err(argument(format!(
            "system does not belong to the {} category",
            variant.name()
        )))
    }
}

/// The coreflection onto star-shaped systems: keeps the reachable states,
/// the transitions starting from a reachable state, and the actions still
/// used by some remaining transition. Idempotent; preserves cubicality and
/// regularity because dividing states of reachable transitions are
/// reachable.
pub fn star_coreflect(p: &PointedSystem, variant: Variant) -> Result<PointedSystem> {
    check_variant(&p.system, variant)?;
    let reached = reachable(p);
    let kept: Vec<Transition> = p
        .system
        .transitions()
        .iter()
        .filter(|t| reached.contains(&t.from))
        .cloned()
        .collect();
    for t in &kept {
        debug_assert!(reached.contains(&t.to));
    }
    let used: BTreeSet<ActionId> = kept
        .iter()
        .flat_map(|t| t.actions.iter().cloned())
        .collect();
    let system = Arc::new(
        TransitionSystem::new(
            p.system.alphabet().clone(),
            reached,
            p.system
                .actions()
                .iter()
                .filter(|(a, _)| used.contains(*a))
                .map(|(a, l)| (a.clone(), l.clone())),
            kept,
        )
        .expect("pruned carrier is structurally sound"),
    );
    check_variant(&system, variant).expect("pruning preserves the category");
    PointedSystem::new(system, p.base.clone())
}

/// A based cylinder: the underlying quotient plus the base point.
#[derive(Debug, Clone)]
pub struct StarCylinder {
    pub pointed: PointedSystem,
    pub project: Morphism,
    pub section: Morphism,
}

/// The cylinder in the based setting: the two copies of the base point are
/// identified; in the regular case the internal states are identified first,
/// which is the regular cylinder, and the result stays regular.
pub fn star_cylinder(p: &PointedSystem, variant: Variant) -> Result<StarCylinder> {
    check_variant(&p.system, variant)?;
    let collapse: BTreeSet<StateId> = match variant {
        Variant::Wts | Variant::Cts => [p.base.clone()].into(),
        Variant::Rts => {
            let mut z = cylinder::internal_states(&p.system);
            z.insert(p.base.clone());
            z
        }
    };
    let q = cylinder::quotient_cyl(&p.system, &collapse)?;
    if variant == Variant::Rts {
        assert!(
            classify(&q.object).is_regular(),
            "based cylinder of a regular system must be regular"
        );
    }
    let pointed = PointedSystem::new(q.object.clone(), cylinder::collapsed_state(&p.base))?;
    Ok(StarCylinder {
        pointed,
        project: q.project,
        section: q.section,
    })
}

/// Pairs of states jointly reachable from the doubled base point inside the
/// path space: the pairs whose members are connected to the base by runs
/// with identical label sequences.
pub fn same_past_pairs(
    p: &PointedSystem,
    variant: Variant,
) -> Result<BTreeSet<(StateId, StateId)>> {
    check_variant(&p.system, variant)?;
    let path = path_space(&p.system, variant)?;
    let base_pair = StateId::new(crate::catops::pair_id(p.base.as_str(), p.base.as_str()));
    let pointed_path = PointedSystem::new(path.object.clone(), base_pair)?;
    Ok(reachable(&pointed_path)
        .into_iter()
        .map(|pair| {
            (
                path.proj0.on_state(&pair).clone(),
                path.proj1.on_state(&pair).clone(),
            )
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catops::coproduct;
    use crate::generators::{make, GeneratorKind, GeneratorSpec};
    use crate::morphism::find_isomorphism;
    use crate::system::{Alphabet, Label};

    fn ab() -> Alphabet {
        Alphabet::from_names(&["a", "b"]).unwrap()
    }

    fn gen(kind: GeneratorKind) -> Arc<TransitionSystem> {
        make(
            &GeneratorSpec {
                kind,
                alphabet: ab(),
            },
            3,
        )
        .unwrap()
    }

    #[test]
    fn interval_is_cubical_but_not_regular() {
        let report = classify(&gen(GeneratorKind::Interval));
        assert!(report.is_cubical());
        assert!(!report.is_regular());
        assert!(!report.duplicate_intermediate.is_empty());
    }

    #[test]
    fn cubes_are_regular() {
        for labels in [vec!["a"], vec!["a", "b"], vec!["a", "b", "a"]] {
            let cube = gen(GeneratorKind::Cube(
                labels.iter().map(|l| Label::new(*l)).collect(),
            ));
            assert!(classify(&cube).is_regular());
        }
    }

    #[test]
    fn pure_squares_are_not_cubical() {
        let pure = gen(GeneratorKind::PureCube(vec![
            Label::new("a"),
            Label::new("b"),
        ]));
        let report = classify(&pure);
        assert!(report.is_weak);
        assert!(!report.intermediate_state);
        assert!(!report.is_cubical());
    }

    #[test]
    fn cubicalify_of_a_pure_square_drops_everything_but_states() {
        let pure = gen(GeneratorKind::PureCube(vec![
            Label::new("a"),
            Label::new("b"),
        ]));
        let core = cubicalify(&pure);
        assert_eq!(core.object.states().len(), 2);
        assert!(core.object.actions().is_empty());
        assert!(core.object.transitions().is_empty());
    }

    #[test]
    fn cubicalify_fixes_cubes() {
        let cube = gen(GeneratorKind::Cube(vec![Label::new("a"), Label::new("b")]));
        let core = cubicalify(&cube);
        assert_eq!(core.object, cube);
    }

    #[test]
    fn cubicalify_drops_unused_actions() {
        let a_bar = gen(GeneratorKind::Action(Label::new("a")));
        let line = gen(GeneratorKind::Cube(vec![Label::new("b")]));
        let (sum, _) = coproduct(&ab(), &[a_bar, line]).unwrap();
        let core = cubicalify(&sum);
        assert_eq!(core.object.actions().len(), 1);
        assert_eq!(core.object.states().len(), 2);
        assert!(classify(&core.object).is_cubical());
    }

    #[test]
    fn cubicalify_is_idempotent_and_detects_cubicality() {
        for kind in [
            GeneratorKind::Point,
            GeneratorKind::PureCube(vec![Label::new("a"), Label::new("b")]),
            GeneratorKind::Cube(vec![Label::new("a"), Label::new("b")]),
            GeneratorKind::Interval,
            GeneratorKind::Double(Label::new("a")),
        ] {
            let x = gen(kind);
            let once = cubicalify(&x);
            let twice = cubicalify(&once.object);
            assert_eq!(once.object, twice.object);
            assert_eq!(*once.object == *x, classify(&x).is_cubical());
        }
    }

    /// A square with a duplicated intermediate state: regularization must
    /// merge the duplicate with the original and recover the plain square.
    #[test]
    fn regularize_merges_duplicate_intermediate_states() {
        let cube = gen(GeneratorKind::Cube(vec![Label::new("a"), Label::new("b")]));
        let a1 = ActionId::new("a.1");
        let b2 = ActionId::new("b.2");
        let mut transitions: Vec<Transition> = cube.transitions().iter().cloned().collect();
        transitions.push(Transition::new("00", [a1.clone()], "dup"));
        transitions.push(Transition::new("dup", [b2.clone()], "11"));
        let padded = Arc::new(
            TransitionSystem::new(
                ab(),
                cube.states().iter().cloned().chain([StateId::new("dup")]),
                cube.actions().iter().map(|(a, l)| (a.clone(), l.clone())),
                transitions,
            )
            .unwrap(),
        );
        assert!(classify(&padded).is_cubical());
        assert!(!classify(&padded).is_regular());
        let reflection = regularize(&padded).unwrap();
        assert!(find_isomorphism(&reflection.object, &cube).is_some());
        assert_eq!(
            reflection.unit.on_state(&StateId::new("dup")),
            reflection.unit.on_state(&StateId::new("10"))
        );
    }

    #[test]
    fn regularize_fixes_regular_systems() {
        let cube = gen(GeneratorKind::Cube(vec![Label::new("a"), Label::new("b")]));
        let reflection = regularize(&cube).unwrap();
        assert_eq!(reflection.object, cube);
        assert_eq!(reflection.unit, Morphism::identity(cube));
    }

    #[test]
    fn regularize_rejects_non_cubical_input() {
        let pure = gen(GeneratorKind::PureCube(vec![
            Label::new("a"),
            Label::new("b"),
        ]));
        assert!(regularize(&pure).is_err());
    }

    #[test]
    fn regular_cylinder_is_the_internal_state_quotient() {
        let cube = gen(GeneratorKind::Cube(vec![Label::new("a"), Label::new("b")]));
        let cyl = cylinder::cylinder(&cube);
        let reflection = regularize(&cyl.object).unwrap();
        assert_eq!(reflection.object.states().len(), 6);
        let quotient = cylinder::quotient_cyl(&cube, &cylinder::internal_states(&cube)).unwrap();
        assert!(find_isomorphism(&reflection.object, &quotient.object).is_some());
    }

    #[test]
    fn path_space_of_a_line_in_the_cubical_category() {
        let line = gen(GeneratorKind::Cube(vec![Label::new("a")]));
        let path = path_space(&line, Variant::Cts).unwrap();
        assert_eq!(path.object.states().len(), 4);
        assert_eq!(path.object.actions().len(), 1);
        assert_eq!(path.object.transitions().len(), 1);
    }

    #[test]
    fn path_space_of_a_point_is_a_point() {
        let point = gen(GeneratorKind::Point);
        for variant in [Variant::Wts, Variant::Cts, Variant::Rts] {
            let path = path_space(&point, variant).unwrap();
            assert_eq!(path.object.states().len(), 1);
        }
    }

    #[test]
    fn regular_path_space_is_regular() {
        let cube = gen(GeneratorKind::Cube(vec![Label::new("a"), Label::new("b")]));
        let path = path_space(&cube, Variant::Rts).unwrap();
        assert!(classify(&path.object).is_regular());
    }

    #[test]
    fn reachability_in_the_double_transition() {
        let double = gen(GeneratorKind::Double(Label::new("a")));
        let p = PointedSystem::new(double, StateId::new("1")).unwrap();
        assert_eq!(reachable(&p), [StateId::new("1"), StateId::new("2")].into());
    }

    #[test]
    fn reachability_covers_the_square() {
        let cube = gen(GeneratorKind::Cube(vec![Label::new("a"), Label::new("b")]));
        let p = PointedSystem::new(cube.clone(), StateId::new("00")).unwrap();
        assert_eq!(reachable(&p), cube.states().clone());
    }

    #[test]
    fn point_reaches_only_itself() {
        let p = PointedSystem::new(gen(GeneratorKind::Point), StateId::new("0")).unwrap();
        assert_eq!(reachable(&p), [StateId::new("0")].into());
    }

    #[test]
    fn star_coreflection_prunes_the_double_transition() {
        let double = gen(GeneratorKind::Double(Label::new("a")));
        let p = PointedSystem::new(double, StateId::new("1")).unwrap();
        let star = star_coreflect(&p, Variant::Cts).unwrap();
        assert_eq!(star.system.states().len(), 2);
        assert_eq!(star.system.actions().len(), 1);
        assert_eq!(star.system.transitions().len(), 1);
        assert!(is_star_shaped(&star));
    }

    #[test]
    fn star_coreflection_fixes_star_shaped_systems() {
        let cube = gen(GeneratorKind::Cube(vec![Label::new("a")]));
        let p = PointedSystem::new(cube, StateId::new("0")).unwrap();
        let star = star_coreflect(&p, Variant::Rts).unwrap();
        assert_eq!(star, p);
    }

    #[test]
    fn star_coreflection_drops_disconnected_points() {
        let line = gen(GeneratorKind::Cube(vec![Label::new("a")]));
        let point = gen(GeneratorKind::Point);
        let (sum, ins) = coproduct(&ab(), &[line, point]).unwrap();
        let base = ins[0].on_state(&StateId::new("0")).clone();
        let p = PointedSystem::new(sum, base).unwrap();
        let star = star_coreflect(&p, Variant::Wts).unwrap();
        assert_eq!(star.system.states().len(), 2);
        assert!(is_star_shaped(&star));
    }

    #[test]
    fn star_cylinder_of_a_based_line() {
        let line = gen(GeneratorKind::Cube(vec![Label::new("a")]));
        let p = PointedSystem::new(line, StateId::new("0")).unwrap();
        let star = star_cylinder(&p, Variant::Wts).unwrap();
        assert_eq!(star.pointed.system.states().len(), 3);
        assert_eq!(star.pointed.system.actions().len(), 2);
        assert!(is_star_shaped(&star.pointed));
    }

    #[test]
    fn star_cylinder_of_a_based_point_has_no_actions() {
        let point = gen(GeneratorKind::Point);
        let p = PointedSystem::new(point, StateId::new("0")).unwrap();
        let star = star_cylinder(&p, Variant::Wts).unwrap();
        assert_eq!(star.pointed.system.states().len(), 1);
        assert!(star.pointed.system.actions().is_empty());
    }

    #[test]
    fn regular_star_cylinder_of_the_square_has_five_states() {
        let cube = gen(GeneratorKind::Cube(vec![Label::new("a"), Label::new("b")]));
        let p = PointedSystem::new(cube, StateId::new("00")).unwrap();
        let star = star_cylinder(&p, Variant::Rts).unwrap();
        assert_eq!(star.pointed.system.states().len(), 5);
        assert!(classify(&star.pointed.system).is_regular());
        assert!(is_star_shaped(&star.pointed));
    }

    /// Every map into a regular system factors uniquely through the unit.
    #[test]
    fn regularize_satisfies_the_universal_property() {
        let cube = gen(GeneratorKind::Cube(vec![Label::new("a"), Label::new("b")]));
        let cyl = cylinder::cylinder(&cube);
        let reflection = regularize(&cyl.object).unwrap();
        for target in [
            gen(GeneratorKind::Cube(vec![Label::new("a")])),
            cube.clone(),
        ] {
            for f in crate::catops::hom(&cyl.object, &target) {
                let factorings: Vec<_> = crate::catops::hom(&reflection.object, &target)
                    .into_iter()
                    .filter(|g| g.compose(&reflection.unit).unwrap() == f)
                    .collect();
                assert_eq!(factorings.len(), 1);
            }
        }
    }

    #[test]
    fn same_past_needs_matching_labels() {
        // Two transitions out of the base with one shared action: targets
        // share a past. With distinct actions and no mixtures: they do not.
        let shared = Arc::new(
            TransitionSystem::new(
                ab(),
                ["i", "x", "y"].map(StateId::new),
                [(ActionId::new("u"), Label::new("a"))],
                [
                    Transition::new("i", [ActionId::new("u")], "x"),
                    Transition::new("i", [ActionId::new("u")], "y"),
                ],
            )
            .unwrap(),
        );
        let p = PointedSystem::new(shared, StateId::new("i")).unwrap();
        let pairs = same_past_pairs(&p, Variant::Wts).unwrap();
        assert!(pairs.contains(&(StateId::new("x"), StateId::new("y"))));
        assert!(pairs.contains(&(StateId::new("i"), StateId::new("i"))));

        let split = Arc::new(
            TransitionSystem::new(
                ab(),
                ["i", "x", "y"].map(StateId::new),
                [
                    (ActionId::new("u"), Label::new("a")),
                    (ActionId::new("v"), Label::new("a")),
                ],
                [
                    Transition::new("i", [ActionId::new("u")], "x"),
                    Transition::new("i", [ActionId::new("v")], "y"),
                ],
            )
            .unwrap(),
        );
        let q = PointedSystem::new(split, StateId::new("i")).unwrap();
        let pairs = same_past_pairs(&q, Variant::Wts).unwrap();
        assert!(!pairs.contains(&(StateId::new("x"), StateId::new("y"))));
        assert!(pairs.contains(&(StateId::new("i"), StateId::new("i"))));
    }
}
