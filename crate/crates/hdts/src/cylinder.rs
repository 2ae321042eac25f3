//! The cylinder functor, its right adjoint path-space functor, the natural
//! bijection between their hom-sets, the quotient that glues the two copies
//! of chosen states, and the internal-state scan.
//!
//! The cylinder doubles states and actions and decorates each n-transition
//! in all 2^(n+2) ways; a path-space transition is a tuple of pairs all of
//! whose 2^(n+2) side-mixtures are transitions of the underlying system.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::catops::pair_id;
use crate::error::{argument, Result};
use crate::morphism::Morphism;
use crate::system::{build_prefix_index, ActionId, StateId, Transition, TransitionSystem};

fn side_id(id: &str, side: u8) -> String {
    format!("{id}@{side}")
}

/// A cylinder together with its two insertions and the projection.
#[derive(Debug, Clone)]
pub struct Cylinder {
    pub object: Arc<TransitionSystem>,
    pub insert0: Morphism,
    pub insert1: Morphism,
    pub project: Morphism,
}

/// A path space together with its two projections.
#[derive(Debug, Clone)]
pub struct PathSpace {
    pub object: Arc<TransitionSystem>,
    pub proj0: Morphism,
    pub proj1: Morphism,
}

/// A collapsed cylinder together with the collapsing projection and its
/// section.
#[derive(Debug, Clone)]
pub struct QuotientCylinder {
    pub object: Arc<TransitionSystem>,
    pub project: Morphism,
    pub section: Morphism,
}

/// Doubles states and actions and decorates every transition with all side
/// choices. The projection splits both insertions.
pub fn cylinder(x: &Arc<TransitionSystem>) -> Cylinder {
    let mut states = Vec::new();
    let mut actions = Vec::new();
    for s in x.states() {
        for side in [0u8, 1] {
            states.push(StateId::new(side_id(s.as_str(), side)));
        }
    }
    for (a, l) in x.actions() {
        for side in [0u8, 1] {
            actions.push((ActionId::new(side_id(a.as_str(), side)), l.clone()));
        }
    }
    let mut transitions = Vec::new();
    for t in x.transitions() {
        let n = t.dim();
        for mask in 0..1u32 << (n + 2) {
            let bit = |i: usize| if mask >> i & 1 == 1 { 1u8 } else { 0 };
            transitions.push(Transition::new(
                StateId::new(side_id(t.from.as_str(), bit(0))),
                t.actions
                    .iter()
                    .enumerate()
                    .map(|(i, a)| ActionId::new(side_id(a.as_str(), bit(i + 1)))),
                StateId::new(side_id(t.to.as_str(), bit(n + 1))),
            ));
        }
    }
    let object = Arc::new(
        TransitionSystem::new(x.alphabet().clone(), states, actions, transitions)
            .expect("cylinder is structurally sound"),
    );
    let insert = |side: u8| {
        Morphism::new(
            x.clone(),
            object.clone(),
            x.states()
                .iter()
                .map(|s| (s.clone(), StateId::new(side_id(s.as_str(), side))))
                .collect(),
            x.actions()
                .keys()
                .map(|a| (a.clone(), ActionId::new(side_id(a.as_str(), side))))
                .collect(),
        )
        .expect("insertion is total")
    };
    let insert0 = insert(0);
    let insert1 = insert(1);
    let project = Morphism::new(
        object.clone(),
        x.clone(),
        object
            .states()
            .iter()
            .map(|s| (s.clone(), strip_side(s.as_str())))
            .collect(),
        object
            .actions()
            .keys()
            .map(|a| (a.clone(), ActionId::new(strip_side(a.as_str()).0)))
            .collect(),
    )
    .expect("projection is total");
    for ins in [&insert0, &insert1] {
        let round_trip = project
            .compose(ins)
            .expect("projection splits the insertion");
        assert_eq!(round_trip, Morphism::identity(x.clone()));
    }
    Cylinder {
        object,
        insert0,
        insert1,
        project,
    }
}

fn strip_side(id: &str) -> StateId {
    StateId::new(id[..id.len() - 2].to_owned())
}

/// The image of a morphism under the cylinder functor, relative to already
/// computed cylinders of its endpoints.
pub fn cyl_morphism(f: &Morphism, cyl_src: &Cylinder, cyl_tgt: &Cylinder) -> Morphism {
    let mut state_map = BTreeMap::new();
    let mut action_map = BTreeMap::new();
    for s in f.source().states() {
        for side in [0u8, 1] {
            state_map.insert(
                StateId::new(side_id(s.as_str(), side)),
                StateId::new(side_id(f.on_state(s).as_str(), side)),
            );
        }
    }
    for a in f.source().actions().keys() {
        for side in [0u8, 1] {
            action_map.insert(
                ActionId::new(side_id(a.as_str(), side)),
                ActionId::new(side_id(f.on_action(a).as_str(), side)),
            );
        }
    }
    let out = Morphism::new(
        cyl_src.object.clone(),
        cyl_tgt.object.clone(),
        state_map,
        action_map,
    )
    .expect("cylinder image is total");
    debug_assert!(out.is_valid());
    out
}

/// States are ordered pairs of states, actions are label-matched ordered
/// pairs of actions, and a tuple of pairs is a transition exactly when every
/// side-mixture is a transition of the underlying system.
pub fn cocylinder(x: &Arc<TransitionSystem>) -> PathSpace {
    let mut states = Vec::new();
    let mut proj0_states = BTreeMap::new();
    let mut proj1_states = BTreeMap::new();
    for s in x.states() {
        for t in x.states() {
            let id = StateId::new(pair_id(s.as_str(), t.as_str()));
            proj0_states.insert(id.clone(), s.clone());
            proj1_states.insert(id.clone(), t.clone());
            states.push(id);
        }
    }
    let mut actions = Vec::new();
    let mut proj0_actions = BTreeMap::new();
    let mut proj1_actions = BTreeMap::new();
    for (u, lu) in x.actions() {
        for (v, lv) in x.actions() {
            if lu != lv {
                continue;
            }
            let id = ActionId::new(pair_id(u.as_str(), v.as_str()));
            proj0_actions.insert(id.clone(), u.clone());
            proj1_actions.insert(id.clone(), v.clone());
            actions.push((id, lu.clone()));
        }
    }
    let mut transitions = BTreeSet::new();
    let index: std::collections::HashSet<&Transition> = x.transitions().iter().collect();
    // Group by dimension and label word; only matching tuples can pair.
    let by_word: BTreeMap<(usize, Vec<crate::system::Label>), Vec<&Transition>> = {
        let mut m: BTreeMap<(usize, Vec<crate::system::Label>), Vec<&Transition>> = BTreeMap::new();
        for t in x.transitions() {
            m.entry((t.dim(), x.label_word(t))).or_default().push(t);
        }
        m
    };
    for ((n, _), ts) in &by_word {
        for t0 in ts {
            for t1 in ts {
                if !all_mixtures_present(&index, t0, t1) {
                    continue;
                }
                transitions.insert(Transition::new(
                    StateId::new(pair_id(t0.from.as_str(), t1.from.as_str())),
                    (0..*n).map(|i| {
                        ActionId::new(pair_id(t0.actions[i].as_str(), t1.actions[i].as_str()))
                    }),
                    StateId::new(pair_id(t0.to.as_str(), t1.to.as_str())),
                ));
            }
        }
    }
    let object = Arc::new(
        TransitionSystem::new(x.alphabet().clone(), states, actions, transitions)
            .expect("path space is structurally sound"),
    );
    debug_assert!(object.validate().ok());
    let proj0 = Morphism::new(object.clone(), x.clone(), proj0_states, proj0_actions)
        .expect("projection is total");
    let proj1 = Morphism::new(object.clone(), x.clone(), proj1_states, proj1_actions)
        .expect("projection is total");
    PathSpace {
        object,
        proj0,
        proj1,
    }
}

fn all_mixtures_present(
    index: &std::collections::HashSet<&Transition>,
    t0: &Transition,
    t1: &Transition,
) -> bool {
    let n = t0.dim();
    for mask in 0..1u32 << (n + 2) {
        let pick_state = |bit: usize, a: &StateId, b: &StateId| {
            if mask >> bit & 1 == 1 {
                b.clone()
            } else {
                a.clone()
            }
        };
        let candidate = Transition::new(
            pick_state(0, &t0.from, &t1.from),
            (0..n).map(|i| {
                if mask >> (i + 1) & 1 == 1 {
                    t1.actions[i].clone()
                } else {
                    t0.actions[i].clone()
                }
            }),
            pick_state(n + 1, &t0.to, &t1.to),
        );
        if !index.contains(&candidate) {
            return false;
        }
    }
    true
}

/// The adjunction bijection, forward direction: a map out of the cylinder of
/// `x` becomes the map into the path space of the target sending an element
/// to the pair of images of its two copies.
pub fn transpose(x: &Arc<TransitionSystem>, f: &Morphism) -> Result<Morphism> {
    let cyl = cylinder(x);
    if f.source() != &cyl.object {
        return Err(argument(
            "source of the map is not the cylinder of the given system",
        ));
    }
    let path = cocylinder(f.target());
    transpose_with(x, &path, f)
}

/// As [`transpose`], against an already computed path space of the target.
pub fn transpose_with(
    x: &Arc<TransitionSystem>,
    path: &PathSpace,
    f: &Morphism,
) -> Result<Morphism> {
    let state_map = x
        .states()
        .iter()
        .map(|s| {
            let img0 = f.on_state(&StateId::new(side_id(s.as_str(), 0)));
            let img1 = f.on_state(&StateId::new(side_id(s.as_str(), 1)));
            (
                s.clone(),
                StateId::new(pair_id(img0.as_str(), img1.as_str())),
            )
        })
        .collect();
    let action_map = x
        .actions()
        .keys()
        .map(|a| {
            let img0 = f.on_action(&ActionId::new(side_id(a.as_str(), 0)));
            let img1 = f.on_action(&ActionId::new(side_id(a.as_str(), 1)));
            (
                a.clone(),
                ActionId::new(pair_id(img0.as_str(), img1.as_str())),
            )
        })
        .collect();
    let g = Morphism::new(x.clone(), path.object.clone(), state_map, action_map)?;
    assert!(g.is_valid(), "transpose of a morphism must be a morphism");
    Ok(g)
}

/// The adjunction bijection, inverse direction.
pub fn untranspose(y: &Arc<TransitionSystem>, g: &Morphism) -> Result<Morphism> {
    let path = cocylinder(y);
    if g.target() != &path.object {
        return Err(argument(
            "target of the map is not the path space of the given system",
        ));
    }
    let x = g.source().clone();
    let cyl = cylinder(&x);
    untranspose_with(y, &path, &cyl, g)
}

/// As [`untranspose`], against already computed parts.
pub fn untranspose_with(
    y: &Arc<TransitionSystem>,
    path: &PathSpace,
    cyl: &Cylinder,
    g: &Morphism,
) -> Result<Morphism> {
    let x = g.source().clone();
    let mut state_map = BTreeMap::new();
    let mut action_map = BTreeMap::new();
    for s in x.states() {
        let pair = g.on_state(s);
        for (side, proj) in [(0u8, &path.proj0), (1, &path.proj1)] {
            state_map.insert(
                StateId::new(side_id(s.as_str(), side)),
                proj.on_state(pair).clone(),
            );
        }
    }
    for a in x.actions().keys() {
        let pair = g.on_action(a);
        for (side, proj) in [(0u8, &path.proj0), (1, &path.proj1)] {
            action_map.insert(
                ActionId::new(side_id(a.as_str(), side)),
                proj.on_action(pair).clone(),
            );
        }
    }
    let f = Morphism::new(cyl.object.clone(), y.clone(), state_map, action_map)?;
    assert!(f.is_valid(), "untranspose of a morphism must be a morphism");
    Ok(f)
}

/// Collapses the two copies of each state in `z` inside the cylinder of `x`.
///
/// Computed as the restriction of the cylinder to the surviving states, so
/// that by construction no new transitions appear; the projection collapses
/// `(s, 1)` onto `(s, 0)` for `s` in `z` and the section is the inclusion.
pub fn quotient_cyl(x: &Arc<TransitionSystem>, z: &BTreeSet<StateId>) -> Result<QuotientCylinder> {
    for s in z {
        if !x.states().contains(s) {
            return Err(argument(format!("state {s} is not a state of the system")));
        }
    }
    let cyl = cylinder(x);
    let keep: BTreeSet<StateId> = x
        .states()
        .iter()
        .flat_map(|s| {
            if z.contains(s) {
                vec![StateId::new(side_id(s.as_str(), 0))]
            } else {
                vec![
                    StateId::new(side_id(s.as_str(), 0)),
                    StateId::new(side_id(s.as_str(), 1)),
                ]
            }
        })
        .collect();
    let object = Arc::new(cyl.object.restrict(&keep).expect("kept states exist"));
    let project = Morphism::new(
        cyl.object.clone(),
        object.clone(),
        cyl.object
            .states()
            .iter()
            .map(|s| {
                let base = strip_side(s.as_str());
                let collapsed = if z.contains(&base) {
                    StateId::new(side_id(base.as_str(), 0))
                } else {
                    s.clone()
                };
                (s.clone(), collapsed)
            })
            .collect(),
        cyl.object
            .actions()
            .keys()
            .map(|a| (a.clone(), a.clone()))
            .collect(),
    )?;
    assert!(
        project.is_valid(),
        "collapsing projection must be a morphism"
    );
    let section = Morphism::new(
        object.clone(),
        cyl.object.clone(),
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
    )?;
    let round_trip = project.compose(&section).expect("section composes");
    assert_eq!(round_trip, Morphism::identity(object.clone()));
    Ok(QuotientCylinder {
        object,
        project,
        section,
    })
}

/// The state of the collapsed pair that survives in a quotient cylinder.
pub fn collapsed_state(s: &StateId) -> StateId {
    StateId::new(side_id(s.as_str(), 0))
}

/// A state is internal when it divides some transition of dimension at least
/// two: there are transitions `(g, u_1..u_n, d)`, `(g, u_1..u_p, s)` and
/// `(s, u_{p+1}..u_n, d)` with `n >= 2` and `p >= 1`.
pub fn internal_states(x: &TransitionSystem) -> BTreeSet<StateId> {
    let index = build_prefix_index(x.transitions());
    let mut internal = BTreeSet::new();
    for t in x.transitions() {
        let n = t.dim();
        if n < 2 {
            continue;
        }
        for p in 1..n {
            let prefix = t.actions[..p].to_vec();
            let suffix = t.actions[p..].to_vec();
            if let Some(candidates) = index.get(&(t.from.clone(), prefix)) {
                for nu in candidates {
                    if x.has_transition(&Transition::new(nu.clone(), suffix.clone(), t.to.clone()))
                    {
                        internal.insert(nu.clone());
                    }
                }
            }
        }
    }
    internal
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catops::{coproduct, hom, pushout};
    use crate::generators::{make, GeneratorKind, GeneratorSpec};
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
            4,
        )
        .unwrap()
    }

    #[test]
    fn cylinder_of_a_point_is_two_points() {
        let cyl = cylinder(&gen(GeneratorKind::Point));
        assert_eq!(cyl.object.states().len(), 2);
        assert!(cyl.object.actions().is_empty());
        assert!(cyl.object.transitions().is_empty());
    }

    #[test]
    fn cylinder_of_a_line_has_eight_transitions() {
        let cyl = cylinder(&gen(GeneratorKind::Cube(vec![Label::new("a")])));
        assert_eq!(cyl.object.states().len(), 4);
        assert_eq!(cyl.object.actions().len(), 2);
        assert_eq!(cyl.object.transitions().len(), 8);
        assert!(cyl.object.validate().ok());
    }

    #[test]
    fn cylinder_of_the_square_has_sixty_four_transitions() {
        let cyl = cylinder(&gen(GeneratorKind::Cube(vec![
            Label::new("a"),
            Label::new("b"),
        ])));
        assert_eq!(cyl.object.states().len(), 8);
        assert_eq!(cyl.object.actions().len(), 4);
        // 4 edges * 2^3 + 2 squares * 2^4
        assert_eq!(cyl.object.transitions().len(), 64);
    }

    #[test]
    fn both_insertions_jointly_are_mono() {
        let x = gen(GeneratorKind::Cube(vec![Label::new("a")]));
        let cyl = cylinder(&x);
        let (sum, ins) = coproduct(&ab(), &[x.clone(), x.clone()]).unwrap();
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
        assert!(joint.is_valid());
        assert!(joint.is_mono().mono);
    }

    #[test]
    fn path_space_of_a_line_is_a_single_arrow() {
        let path = cocylinder(&gen(GeneratorKind::Cube(vec![Label::new("a")])));
        assert_eq!(path.object.states().len(), 4);
        assert_eq!(path.object.actions().len(), 1);
        assert_eq!(path.object.transitions().len(), 1);
        let t = path.object.transitions().iter().next().unwrap();
        assert_eq!(path.proj0.on_transition(t), path.proj1.on_transition(t));
    }

    #[test]
    fn path_space_of_a_point_is_a_point() {
        let path = cocylinder(&gen(GeneratorKind::Point));
        assert_eq!(path.object.states().len(), 1);
        assert!(path.object.actions().is_empty());
    }

    #[test]
    fn transpose_of_the_projection_is_the_pairing_diagonal() {
        let x = gen(GeneratorKind::Cube(vec![Label::new("a")]));
        let cyl = cylinder(&x);
        let g = transpose(&x, &cyl.project).unwrap();
        for s in x.states() {
            assert_eq!(
                g.on_state(s),
                &StateId::new(pair_id(s.as_str(), s.as_str()))
            );
        }
    }

    #[test]
    fn transpose_and_untranspose_are_mutually_inverse() {
        let x = gen(GeneratorKind::Cube(vec![Label::new("a"), Label::new("b")]));
        let cyl = cylinder(&x);
        let maps = hom(&cyl.object, &x);
        assert!(!maps.is_empty());
        for f in maps {
            let g = transpose(&x, &f).unwrap();
            let back = untranspose(&x, &g).unwrap();
            assert_eq!(back, f);
        }
    }

    #[test]
    fn transpose_rejects_non_cylinder_sources() {
        let x = gen(GeneratorKind::Cube(vec![Label::new("a")]));
        let id = Morphism::identity(x.clone());
        assert!(transpose(&x, &id).is_err());
    }

    #[test]
    fn quotient_of_nothing_is_the_cylinder() {
        let x = gen(GeneratorKind::Cube(vec![Label::new("a")]));
        let q = quotient_cyl(&x, &BTreeSet::new()).unwrap();
        assert_eq!(q.object, cylinder(&x).object);
        assert!(q.project.is_injective_on_states().is_none());
    }

    #[test]
    fn quotient_of_one_endpoint_counts() {
        let x = gen(GeneratorKind::Cube(vec![Label::new("a")]));
        let z: BTreeSet<StateId> = [StateId::new("0")].into();
        let q = quotient_cyl(&x, &z).unwrap();
        assert_eq!(q.object.states().len(), 3);
        assert_eq!(q.object.actions().len(), 2);
        let with_source_zero = q
            .object
            .transitions()
            .iter()
            .filter(|t| t.from == StateId::new("0@0"))
            .count();
        assert_eq!(with_source_zero, 4);
        assert_eq!(q.object.transitions().len(), 4);
        assert!(q.project.is_surjective_on_states());
        assert!(q.project.is_injective_on_actions().is_none());
        assert!(q.section.is_mono().mono);
    }

    #[test]
    fn quotient_of_everything_keeps_both_action_copies() {
        let x = gen(GeneratorKind::Cube(vec![Label::new("a")]));
        let q = quotient_cyl(&x, x.states()).unwrap();
        assert_eq!(q.object.states().len(), 2);
        // Both sided copies of the single action survive.
        assert_eq!(q.object.actions().len(), 2);
    }

    #[test]
    fn internal_states_of_the_square_are_the_two_middles() {
        let x = gen(GeneratorKind::Cube(vec![Label::new("a"), Label::new("b")]));
        let internal = internal_states(&x);
        assert_eq!(internal, [StateId::new("01"), StateId::new("10")].into());
    }

    #[test]
    fn amalgamated_middle_state_is_not_internal() {
        let pt = gen(GeneratorKind::Point);
        let a = gen(GeneratorKind::Cube(vec![Label::new("a")]));
        let b = gen(GeneratorKind::Cube(vec![Label::new("b")]));
        let pick1 = Morphism::new(
            pt.clone(),
            a.clone(),
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
        let (sum, _, _) = pushout(&pick1, &pick0).unwrap();
        assert!(internal_states(&sum).is_empty());
    }

    #[test]
    fn point_has_no_internal_states() {
        assert!(internal_states(&gen(GeneratorKind::Point)).is_empty());
    }

    /// Oracle for the cylinder of a single arrow: the explicit four-state,
    /// two-action, eight-transition system written out by hand.
    #[test]
    fn cylinder_of_a_line_matches_the_hand_built_system() {
        let by_hand = Arc::new(
            TransitionSystem::new(
                ab(),
                ["p0", "p1", "q0", "q1"].map(StateId::new),
                [
                    (ActionId::new("u0"), Label::new("a")),
                    (ActionId::new("u1"), Label::new("a")),
                ],
                ["p0", "p1"].into_iter().flat_map(|from| {
                    ["u0", "u1"].into_iter().flat_map(move |act| {
                        ["q0", "q1"]
                            .into_iter()
                            .map(move |to| Transition::new(from, [ActionId::new(act)], to))
                    })
                }),
            )
            .unwrap(),
        );
        let cyl = cylinder(&gen(GeneratorKind::Cube(vec![Label::new("a")])));
        assert!(crate::morphism::find_isomorphism(&cyl.object, &by_hand).is_some());
    }

    #[test]
    fn path_space_preserves_unique_intermediate_states() {
        let square = gen(GeneratorKind::Cube(vec![Label::new("a"), Label::new("b")]));
        assert!(crate::subcats::classify(&square).unique_intermediate_state);
        let path = cocylinder(&square);
        assert!(crate::subcats::classify(&path.object).unique_intermediate_state);
    }

    #[test]
    fn quotient_projection_is_bijective_on_actions() {
        let x = gen(GeneratorKind::Cube(vec![Label::new("a"), Label::new("b")]));
        let q = quotient_cyl(&x, &[StateId::new("00"), StateId::new("11")].into()).unwrap();
        assert!(q.project.is_injective_on_actions().is_none());
        assert!(q.project.is_surjective_on_actions());
        assert!(q.project.is_surjective_on_states());
        assert!(q.section.is_mono().mono);
    }
}
