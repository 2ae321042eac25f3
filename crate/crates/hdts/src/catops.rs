//! Finite categorical machinery: hom-set enumeration, binary products,
//! coproducts, colimits of arbitrary finite diagrams, and the
//! pushout-product of a map with the cylinder insertions.
//!
//! Colimits are computed on states and actions as plain set-level quotients
//! (union-find over the equivalence generated by the arrows, representative
//! the lexicographically least member) and on transitions as the axiom
//! closure of the images, which is exactly how the forgetful functors
//! interact with colimits in this category.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::cylinder;
use crate::error::{argument, Result};
use crate::morphism::{search_maps, Morphism, SearchSpec};
use crate::subcats;
use crate::system::{ActionId, Alphabet, Label, StateId, Transition, TransitionSystem};
use crate::Variant;

/// A finite diagram: an indexed family of objects and a set of arrows.
#[derive(Debug, Clone)]
pub struct Diagram {
    objects: Vec<Arc<TransitionSystem>>,
    arrows: Vec<(usize, usize, Morphism)>,
}

impl Diagram {
    pub fn new(
        objects: Vec<Arc<TransitionSystem>>,
        arrows: Vec<(usize, usize, Morphism)>,
    ) -> Result<Self> {
        if let Some(first) = objects.first() {
            for obj in &objects {
                if obj.alphabet() != first.alphabet() {
                    return Err(argument("diagram objects have mixed alphabets"));
                }
            }
        }
        for (src, tgt, m) in &arrows {
            let (Some(s), Some(t)) = (objects.get(*src), objects.get(*tgt)) else {
                return Err(argument("arrow references an object index out of range"));
            };
            if m.source() != s || m.target() != t {
                return Err(argument("arrow morphism does not match its endpoints"));
            }
        }
        Ok(Diagram { objects, arrows })
    }

    pub fn objects(&self) -> &[Arc<TransitionSystem>] {
        &self.objects
    }

    pub fn arrows(&self) -> &[(usize, usize, Morphism)] {
        &self.arrows
    }
}

/// An apex with one leg per diagram object.
#[derive(Debug, Clone)]
pub struct Cocone {
    pub apex: Arc<TransitionSystem>,
    pub legs: Vec<Morphism>,
}

impl Cocone {
    /// Do the legs commute with every arrow of the diagram?
    pub fn commutes(&self, diagram: &Diagram) -> bool {
        diagram
            .arrows()
            .iter()
            .all(|(src, tgt, m)| match self.legs[*tgt].compose(m) {
                Ok(composite) => composite == self.legs[*src],
                Err(_) => false,
            })
    }
}

/// Enumerates all morphisms from `x` to `y` by backtracking over state and
/// action assignments with transition-preservation pruning. Complete, in a
/// deterministic lexicographic order.
pub fn hom(x: &Arc<TransitionSystem>, y: &Arc<TransitionSystem>) -> Vec<Morphism> {
    if x.alphabet() != y.alphabet() {
        return Vec::new();
    }
    let spec = SearchSpec::new(x, y);
    search_maps(&spec)
        .into_iter()
        .map(|(s, a)| Morphism::new(x.clone(), y.clone(), s, a).expect("search output is total"))
        .collect()
}

/// Injective pairing of identifiers, used for product-style constructions.
pub(crate) fn pair_id(a: &str, b: &str) -> String {
    fn esc(s: &str) -> String {
        let mut out = String::with_capacity(s.len());
        for c in s.chars() {
            if matches!(c, '\\' | ',' | '(' | ')') {
                out.push('\\');
            }
            out.push(c);
        }
        out
    }
    format!("({},{})", esc(a), esc(b))
}

/// The binary product: states are pairs, actions are label-matched pairs,
/// transitions are the tuples whose two coordinatewise projections are
/// transitions. Returns the product with its two projections.
pub fn product(
    x: &Arc<TransitionSystem>,
    y: &Arc<TransitionSystem>,
) -> Result<(Arc<TransitionSystem>, Morphism, Morphism)> {
    if x.alphabet() != y.alphabet() {
        return Err(argument("product requires a shared alphabet"));
    }
    let mut states = Vec::new();
    let mut proj0_states = BTreeMap::new();
    let mut proj1_states = BTreeMap::new();
    for s in x.states() {
        for t in y.states() {
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
        for (v, lv) in y.actions() {
            if lu != lv {
                continue;
            }
            let id = ActionId::new(pair_id(u.as_str(), v.as_str()));
            proj0_actions.insert(id.clone(), u.clone());
            proj1_actions.insert(id.clone(), v.clone());
            actions.push((id, lu.clone()));
        }
    }
    let mut transitions = Vec::new();
    for t in x.transitions() {
        for s in y.transitions() {
            if t.dim() != s.dim() || x.label_word(t) != y.label_word(s) {
                continue;
            }
            transitions.push(Transition::new(
                StateId::new(pair_id(t.from.as_str(), s.from.as_str())),
                t.actions
                    .iter()
                    .zip(&s.actions)
                    .map(|(u, v)| ActionId::new(pair_id(u.as_str(), v.as_str()))),
                StateId::new(pair_id(t.to.as_str(), s.to.as_str())),
            ));
        }
    }
    let object = Arc::new(TransitionSystem::new(
        x.alphabet().clone(),
        states,
        actions,
        transitions,
    )?);
    let proj0 = Morphism::new(object.clone(), x.clone(), proj0_states, proj0_actions)?;
    let proj1 = Morphism::new(object.clone(), y.clone(), proj1_states, proj1_actions)?;
    debug_assert!(proj0.is_valid() && proj1.is_valid());
    Ok((object, proj0, proj1))
}

fn tag(index: usize, id: &str) -> String {
    format!("{index}:{id}")
}

/// Disjoint union; the components do not interact, so no closure is needed.
/// Returns the sum and the insertion of each summand (always monomorphisms).
pub fn coproduct(
    alphabet: &Alphabet,
    xs: &[Arc<TransitionSystem>],
) -> Result<(Arc<TransitionSystem>, Vec<Morphism>)> {
    for x in xs {
        if x.alphabet() != alphabet {
            return Err(argument("coproduct requires a shared alphabet"));
        }
    }
    let mut states = Vec::new();
    let mut actions = Vec::new();
    let mut transitions = Vec::new();
    for (i, x) in xs.iter().enumerate() {
        states.extend(x.states().iter().map(|s| StateId::new(tag(i, s.as_str()))));
        actions.extend(
            x.actions()
                .iter()
                .map(|(a, l)| (ActionId::new(tag(i, a.as_str())), l.clone())),
        );
        transitions.extend(x.transitions().iter().map(|t| {
            Transition::new(
                StateId::new(tag(i, t.from.as_str())),
                t.actions.iter().map(|a| ActionId::new(tag(i, a.as_str()))),
                StateId::new(tag(i, t.to.as_str())),
            )
        }));
    }
    let object = Arc::new(TransitionSystem::new(
        alphabet.clone(),
        states,
        actions,
        transitions,
    )?);
    let insertions = xs
        .iter()
        .enumerate()
        .map(|(i, x)| {
            Morphism::new(
                x.clone(),
                object.clone(),
                x.states()
                    .iter()
                    .map(|s| (s.clone(), StateId::new(tag(i, s.as_str()))))
                    .collect(),
                x.actions()
                    .keys()
                    .map(|a| (a.clone(), ActionId::new(tag(i, a.as_str()))))
                    .collect(),
            )
            .expect("insertion is total")
        })
        .collect();
    Ok((object, insertions))
}

/// Plain union-find with path compression over dense indices.
struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Quotient a family of tagged names by the equivalence generated by `pairs`,
/// mapping each name to the lexicographically least member of its class.
fn quotient_names(names: Vec<String>, pairs: &[(String, String)]) -> BTreeMap<String, String> {
    let sorted: Vec<String> = {
        let mut v = names;
        v.sort();
        v.dedup();
        v
    };
    let index: BTreeMap<&String, usize> = sorted.iter().enumerate().map(|(i, n)| (n, i)).collect();
    let mut uf = UnionFind::new(sorted.len());
    for (a, b) in pairs {
        uf.union(index[a], index[b]);
    }
    // Sorted input means the least index in a class is the lex-least name.
    sorted
        .iter()
        .enumerate()
        .map(|(i, n)| (n.clone(), sorted[uf.find(i)].clone()))
        .collect()
}

/// Computes the colimit of a finite diagram: set-level quotients on states
/// and actions, axiom closure of the transition images, one leg per object.
///
/// The `cts` variant requires cubical inputs and asserts a cubical result
/// (the subcategory is closed under colimits); the `rts` variant requires
/// regular inputs and reflects the result via `regularize`.
pub fn colimit(diagram: &Diagram, variant: Variant) -> Result<Cocone> {
    let Some(first) = diagram.objects().first() else {
        return Err(argument(
            "colimit of an empty diagram needs an alphabet; use coproduct",
        ));
    };
    let alphabet = first.alphabet().clone();
    match variant {
        Variant::Wts => {}
        Variant::Cts => {
            for (i, obj) in diagram.objects().iter().enumerate() {
                if !subcats::classify(obj).is_cubical() {
                    return Err(argument(format!("colimit object {i} is not cubical")));
                }
            }
        }
        Variant::Rts => {
            for (i, obj) in diagram.objects().iter().enumerate() {
                if !subcats::classify(obj).is_regular() {
                    return Err(argument(format!("colimit object {i} is not regular")));
                }
            }
        }
    }

    let mut state_names = Vec::new();
    let mut action_names: Vec<String> = Vec::new();
    let mut action_labels: BTreeMap<String, Label> = BTreeMap::new();
    for (i, obj) in diagram.objects().iter().enumerate() {
        for s in obj.states() {
            state_names.push(tag(i, s.as_str()));
        }
        for (a, l) in obj.actions() {
            let name = tag(i, a.as_str());
            action_labels.insert(name.clone(), l.clone());
            action_names.push(name);
        }
    }
    let mut state_pairs = Vec::new();
    let mut action_pairs = Vec::new();
    for (src, tgt, m) in diagram.arrows() {
        for s in diagram.objects()[*src].states() {
            state_pairs.push((tag(*src, s.as_str()), tag(*tgt, m.on_state(s).as_str())));
        }
        for a in diagram.objects()[*src].actions().keys() {
            action_pairs.push((tag(*src, a.as_str()), tag(*tgt, m.on_action(a).as_str())));
        }
    }
    let state_rep = quotient_names(state_names, &state_pairs);
    let action_rep = quotient_names(action_names, &action_pairs);

    let states: Vec<StateId> = state_rep
        .values()
        .map(|r| StateId::new(r.clone()))
        .collect();
    let actions: Vec<(ActionId, Label)> = action_rep
        .iter()
        .map(|(name, rep)| (ActionId::new(rep.clone()), action_labels[name].clone()))
        .collect();
    let mut transitions = Vec::new();
    for (i, obj) in diagram.objects().iter().enumerate() {
        for t in obj.transitions() {
            transitions.push(Transition::new(
                StateId::new(state_rep[&tag(i, t.from.as_str())].clone()),
                t.actions
                    .iter()
                    .map(|a| ActionId::new(action_rep[&tag(i, a.as_str())].clone())),
                StateId::new(state_rep[&tag(i, t.to.as_str())].clone()),
            ));
        }
    }
    let apex = Arc::new(TransitionSystem::new(alphabet, states, actions, transitions)?.closure());
    let mut legs: Vec<Morphism> = diagram
        .objects()
        .iter()
        .enumerate()
        .map(|(i, obj)| {
            Morphism::new(
                obj.clone(),
                apex.clone(),
                obj.states()
                    .iter()
                    .map(|s| {
                        (
                            s.clone(),
                            StateId::new(state_rep[&tag(i, s.as_str())].clone()),
                        )
                    })
                    .collect(),
                obj.actions()
                    .keys()
                    .map(|a| {
                        (
                            a.clone(),
                            ActionId::new(action_rep[&tag(i, a.as_str())].clone()),
                        )
                    })
                    .collect(),
            )
            .expect("leg is total")
        })
        .collect();

    let cocone = match variant {
        Variant::Wts => Cocone { apex, legs },
        Variant::Cts => {
            assert!(
                subcats::classify(&apex).is_cubical(),
                "colimit of cubical systems must be cubical"
            );
            Cocone { apex, legs }
        }
        Variant::Rts => {
            let reflection = subcats::regularize(&apex)?;
            for leg in &mut legs {
                *leg = reflection
                    .unit
                    .compose(leg)
                    .expect("unit composes with leg");
            }
            assert!(subcats::classify(&reflection.object).is_regular());
            Cocone {
                apex: reflection.object,
                legs,
            }
        }
    };
    debug_assert!(cocone.commutes(diagram));
    Ok(cocone)
}

/// Pushout of `f : U -> A` and `g : U -> B`; returns the corner with the two
/// structure maps from `A` and from `B`.
pub fn pushout(f: &Morphism, g: &Morphism) -> Result<(Arc<TransitionSystem>, Morphism, Morphism)> {
    if f.source() != g.source() {
        return Err(argument("pushout requires a common source"));
    }
    let diagram = Diagram::new(
        vec![f.source().clone(), f.target().clone(), g.target().clone()],
        vec![(0, 1, f.clone()), (0, 2, g.clone())],
    )?;
    let cocone = colimit(&diagram, Variant::Wts)?;
    let [_, leg_a, leg_b]: [Morphism; 3] =
        cocone.legs.try_into().expect("three objects, three legs");
    Ok((cocone.apex, leg_a, leg_b))
}

/// Given a cocone over the same diagram, the unique factoring morphism from
/// the colimit apex, when it exists. Colimit legs are jointly surjective, so
/// the factoring map is pointwise forced; `None` if the forced assignment is
/// inconsistent or fails to be a morphism.
pub fn factor_cocone(diagram: &Diagram, computed: &Cocone, other: &Cocone) -> Option<Morphism> {
    let mut state_map: BTreeMap<StateId, StateId> = BTreeMap::new();
    let mut action_map: BTreeMap<ActionId, ActionId> = BTreeMap::new();
    for (i, obj) in diagram.objects().iter().enumerate() {
        for s in obj.states() {
            let from = computed.legs[i].on_state(s).clone();
            let to = other.legs[i].on_state(s).clone();
            if let Some(prev) = state_map.insert(from, to.clone()) {
                if prev != to {
                    return None;
                }
            }
        }
        for a in obj.actions().keys() {
            let from = computed.legs[i].on_action(a).clone();
            let to = other.legs[i].on_action(a).clone();
            if let Some(prev) = action_map.insert(from, to.clone()) {
                if prev != to {
                    return None;
                }
            }
        }
    }
    let m = Morphism::new(
        computed.apex.clone(),
        other.apex.clone(),
        state_map,
        action_map,
    )
    .ok()?;
    m.is_valid().then_some(m)
}

/// Which cylinder insertion to pushout-product with.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CylinderSide {
    /// The side-0 insertion.
    Zero,
    /// The side-1 insertion.
    One,
    /// Both sides jointly, from the disjoint sum.
    Both,
}

impl CylinderSide {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "g0" => Some(CylinderSide::Zero),
            "g1" => Some(CylinderSide::One),
            "g" => Some(CylinderSide::Both),
            _ => None,
        }
    }
}

/// The induced map from the pushout corner of `f` against a cylinder
/// insertion into the cylinder of the codomain. Monomorphisms are sent to
/// monomorphisms, which is asserted.
pub fn star_product(f: &Morphism, which: CylinderSide) -> Result<Morphism> {
    let x = f.source().clone();
    let y = f.target().clone();
    let cyl_x = cylinder::cylinder(&x);
    let cyl_y = cylinder::cylinder(&y);
    let cyl_f = cylinder::cyl_morphism(f, &cyl_x, &cyl_y);

    let (insertion_x, insertion_y, base) = match which {
        CylinderSide::Zero => (cyl_x.insert0.clone(), cyl_y.insert0.clone(), f.clone()),
        CylinderSide::One => (cyl_x.insert1.clone(), cyl_y.insert1.clone(), f.clone()),
        CylinderSide::Both => {
            let (sum_x, ins_x) = coproduct(x.alphabet(), &[x.clone(), x.clone()])?;
            let (sum_y, ins_y) = coproduct(y.alphabet(), &[y.clone(), y.clone()])?;
            let both_x = codiagonal_into(&sum_x, &ins_x, &[&cyl_x.insert0, &cyl_x.insert1]);
            let both_y = codiagonal_into(&sum_y, &ins_y, &[&cyl_y.insert0, &cyl_y.insert1]);
            let f_sum = codiagonal_into(
                &sum_x,
                &ins_x,
                &[
                    &ins_y[0].compose(f).expect("compose"),
                    &ins_y[1].compose(f).expect("compose"),
                ],
            );
            let (corner, from_sum_y, from_cyl_x) = pushout(&f_sum, &both_x)?;
            let induced = induced_from_pushout(&corner, &from_sum_y, &from_cyl_x, &both_y, &cyl_f)?;
            if f.is_mono().mono {
                assert!(
                    induced.is_mono().mono,
                    "pushout-product of a mono must be a mono"
                );
            }
            return Ok(induced);
        }
    };
    let (corner, from_y, from_cyl_x) = pushout(&base, &insertion_x)?;
    let induced = induced_from_pushout(&corner, &from_y, &from_cyl_x, &insertion_y, &cyl_f)?;
    if f.is_mono().mono {
        assert!(
            induced.is_mono().mono,
            "pushout-product of a mono must be a mono"
        );
    }
    Ok(induced)
}

/// The map out of a binary sum determined by one morphism per summand.
fn codiagonal_into(
    sum: &Arc<TransitionSystem>,
    insertions: &[Morphism],
    pieces: &[&Morphism],
) -> Morphism {
    let target = pieces[0].target().clone();
    let mut state_map = BTreeMap::new();
    let mut action_map = BTreeMap::new();
    for (ins, piece) in insertions.iter().zip(pieces) {
        for s in ins.source().states() {
            state_map.insert(ins.on_state(s).clone(), piece.on_state(s).clone());
        }
        for a in ins.source().actions().keys() {
            action_map.insert(ins.on_action(a).clone(), piece.on_action(a).clone());
        }
    }
    Morphism::new(sum.clone(), target, state_map, action_map).expect("total by construction")
}

/// The unique map out of a pushout corner agreeing with the two given maps
/// on the corner legs.
pub(crate) fn induced_from_pushout(
    corner: &Arc<TransitionSystem>,
    leg_b: &Morphism,
    leg_c: &Morphism,
    via_b: &Morphism,
    via_c: &Morphism,
) -> Result<Morphism> {
    let target = via_b.target().clone();
    let mut state_map: BTreeMap<StateId, StateId> = BTreeMap::new();
    let mut action_map: BTreeMap<ActionId, ActionId> = BTreeMap::new();
    for (leg, via) in [(leg_b, via_b), (leg_c, via_c)] {
        for s in leg.source().states() {
            let key = leg.on_state(s).clone();
            let value = via.on_state(s).clone();
            if let Some(prev) = state_map.insert(key, value.clone()) {
                assert_eq!(prev, value, "pushout legs disagree on a state image");
            }
        }
        for a in leg.source().actions().keys() {
            let key = leg.on_action(a).clone();
            let value = via.on_action(a).clone();
            if let Some(prev) = action_map.insert(key, value.clone()) {
                assert_eq!(prev, value, "pushout legs disagree on an action image");
            }
        }
    }
    let m = Morphism::new(corner.clone(), target, state_map, action_map)?;
    assert!(
        m.is_valid(),
        "induced map out of a pushout must be a morphism"
    );
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{make, GeneratorKind, GeneratorSpec};
    use crate::morphism::find_isomorphism;

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

    fn point() -> Arc<TransitionSystem> {
        gen(GeneratorKind::Point)
    }

    fn c1(l: &str) -> Arc<TransitionSystem> {
        gen(GeneratorKind::Cube(vec![Label::new(l)]))
    }

    #[test]
    fn hom_from_point_counts_states() {
        assert_eq!(hom(&point(), &c1("a")).len(), 2);
    }

    #[test]
    fn hom_from_action_counts_labelled_actions() {
        let a_bar = gen(GeneratorKind::Action(Label::new("a")));
        assert_eq!(hom(&a_bar, &c1("a")).len(), 1);
        assert_eq!(hom(&a_bar, &c1("b")).len(), 0);
    }

    #[test]
    fn hom_from_cylinder_to_line_is_unique() {
        let x = c1("a");
        let cyl = cylinder::cylinder(&x);
        let maps = hom(&cyl.object, &x);
        assert_eq!(maps.len(), 1);
    }

    #[test]
    fn hom_is_complete_against_raw_enumeration() {
        // Brute force: every raw pair of total maps, filtered by the
        // morphism axioms.
        let x = gen(GeneratorKind::ParallelPair(
            Label::new("a"),
            Label::new("b"),
        ));
        let y = gen(GeneratorKind::Cube(vec![Label::new("a"), Label::new("b")]));
        let enumerated = hom(&x, &y).len();
        let mut brute = 0usize;
        let xs: Vec<_> = x.states().iter().cloned().collect();
        let ys: Vec<_> = y.states().iter().cloned().collect();
        let xa: Vec<_> = x.actions().keys().cloned().collect();
        let ya: Vec<_> = y.actions().keys().cloned().collect();
        let mut state_choice = vec![0usize; xs.len()];
        loop {
            let mut action_choice = vec![0usize; xa.len()];
            loop {
                let state_map: BTreeMap<_, _> = xs
                    .iter()
                    .cloned()
                    .zip(state_choice.iter().map(|&i| ys[i].clone()))
                    .collect();
                let action_map: BTreeMap<_, _> = xa
                    .iter()
                    .cloned()
                    .zip(action_choice.iter().map(|&i| ya[i].clone()))
                    .collect();
                if let Ok(m) = Morphism::new(x.clone(), y.clone(), state_map, action_map) {
                    if m.is_valid() {
                        brute += 1;
                    }
                }
                if !bump(&mut action_choice, ya.len()) {
                    break;
                }
            }
            if !bump(&mut state_choice, ys.len()) {
                break;
            }
        }
        assert_eq!(enumerated, brute);
    }

    fn bump(digits: &mut [usize], base: usize) -> bool {
        for d in digits.iter_mut() {
            *d += 1;
            if *d < base {
                return true;
            }
            *d = 0;
        }
        false
    }

    #[test]
    fn product_of_different_labels_has_no_actions() {
        let (p, _, _) = product(&c1("a"), &c1("b")).unwrap();
        assert_eq!(p.states().len(), 4);
        assert!(p.actions().is_empty());
        assert!(p.transitions().is_empty());
    }

    #[test]
    fn product_with_terminal_is_identity_up_to_iso() {
        let x = gen(GeneratorKind::Cube(vec![Label::new("a"), Label::new("b")]));
        let terminal = gen(GeneratorKind::Terminal(2));
        let (p, _, _) = product(&x, &terminal).unwrap();
        assert!(find_isomorphism(&p, &x).is_some());
    }

    #[test]
    fn product_with_interval_is_the_cylinder() {
        let x = c1("a");
        let v = gen(GeneratorKind::Interval);
        let (p, _, _) = product(&x, &v).unwrap();
        assert_eq!(p.transitions().len(), 8);
        let cyl = cylinder::cylinder(&x);
        assert!(find_isomorphism(&p, &cyl.object).is_some());
    }

    #[test]
    fn product_satisfies_the_universal_property() {
        let x = c1("a");
        let y = gen(GeneratorKind::Interval);
        let (p, proj0, proj1) = product(&x, &y).unwrap();
        // Cone from the cylinder of x: projection and the unique map to V.
        let cyl = cylinder::cylinder(&x);
        for f in hom(&cyl.object, &x) {
            for g in hom(&cyl.object, &y) {
                let factoring: Vec<Morphism> = hom(&cyl.object, &p)
                    .into_iter()
                    .filter(|h| proj0.compose(h).unwrap() == f && proj1.compose(h).unwrap() == g)
                    .collect();
                assert_eq!(factoring.len(), 1);
            }
        }
    }

    #[test]
    fn coproduct_counts() {
        let (sum, ins) = coproduct(&ab(), &[point(), point()]).unwrap();
        assert_eq!(sum.states().len(), 2);
        assert!(ins.iter().all(|m| m.is_mono().mono));
        let (sum2, _) = coproduct(&ab(), &[c1("a"), c1("b")]).unwrap();
        assert_eq!(sum2.states().len(), 4);
        assert_eq!(sum2.actions().len(), 2);
        assert_eq!(sum2.transitions().len(), 2);
    }

    #[test]
    fn empty_coproduct_is_the_initial_object() {
        let (sum, ins) = coproduct(&ab(), &[]).unwrap();
        assert!(sum.states().is_empty() && sum.actions().is_empty());
        assert!(ins.is_empty());
    }

    /// Glueing the endpoint of one arrow to the start of another: three
    /// states, two actions, two transitions.
    #[test]
    fn amalgamated_sum_of_two_arrows() {
        let pt = point();
        let a = c1("a");
        let b = c1("b");
        let pick1 = Morphism::new(
            pt.clone(),
            a.clone(),
            [(StateId::new("0"), StateId::new("1"))].into(),
            BTreeMap::new(),
        )
        .unwrap();
        let pick0 = Morphism::new(
            pt.clone(),
            b.clone(),
            [(StateId::new("0"), StateId::new("0"))].into(),
            BTreeMap::new(),
        )
        .unwrap();
        let (apex, _, _) = pushout(&pick1, &pick0).unwrap();
        assert_eq!(apex.states().len(), 3);
        assert_eq!(apex.actions().len(), 2);
        assert_eq!(apex.transitions().len(), 2);
        assert!(apex.validate().ok());
    }

    #[test]
    fn pushout_over_initial_object_is_the_coproduct() {
        let empty = Arc::new(TransitionSystem::empty(ab()));
        let a = c1("a");
        let b = c1("b");
        let to_a =
            Morphism::new(empty.clone(), a.clone(), BTreeMap::new(), BTreeMap::new()).unwrap();
        let to_b = Morphism::new(empty, b.clone(), BTreeMap::new(), BTreeMap::new()).unwrap();
        let (apex, _, _) = pushout(&to_a, &to_b).unwrap();
        let (sum, _) = coproduct(&ab(), &[a, b]).unwrap();
        assert!(find_isomorphism(&apex, &sum).is_some());
    }

    #[test]
    fn coequalizer_of_both_endpoints_is_a_closed_loop() {
        let pt = point();
        let a = c1("a");
        let end0 = Morphism::new(
            pt.clone(),
            a.clone(),
            [(StateId::new("0"), StateId::new("0"))].into(),
            BTreeMap::new(),
        )
        .unwrap();
        let end1 = Morphism::new(
            pt.clone(),
            a.clone(),
            [(StateId::new("0"), StateId::new("1"))].into(),
            BTreeMap::new(),
        )
        .unwrap();
        let diagram = Diagram::new(vec![pt, a.clone()], vec![(0, 1, end0), (0, 1, end1)]).unwrap();
        let cocone = colimit(&diagram, Variant::Wts).unwrap();
        assert_eq!(cocone.apex.states().len(), 1);
        assert_eq!(cocone.apex.actions().len(), 1);
        assert!(cocone.apex.validate().ok());
        let loop_state = cocone.apex.states().iter().next().unwrap().clone();
        let action = cocone.apex.actions().keys().next().unwrap().clone();
        assert!(cocone.apex.has_transition(&Transition::new(
            loop_state.clone(),
            [action],
            loop_state
        )));
    }

    #[test]
    fn colimit_satisfies_the_universal_property() {
        let pt = point();
        let a = c1("a");
        let b = c1("b");
        let pick1 = Morphism::new(
            pt.clone(),
            a.clone(),
            [(StateId::new("0"), StateId::new("1"))].into(),
            BTreeMap::new(),
        )
        .unwrap();
        let pick0 = Morphism::new(
            pt.clone(),
            b.clone(),
            [(StateId::new("0"), StateId::new("0"))].into(),
            BTreeMap::new(),
        )
        .unwrap();
        let diagram = Diagram::new(vec![pt, a, b], vec![(0, 1, pick1), (0, 2, pick0)]).unwrap();
        let computed = colimit(&diagram, Variant::Wts).unwrap();
        assert!(computed.commutes(&diagram));
        // Another cocone: everything into the terminal object.
        let terminal = gen(GeneratorKind::Terminal(1));
        let other = Cocone {
            apex: terminal.clone(),
            legs: diagram
                .objects()
                .iter()
                .map(|obj| hom(obj, &terminal).pop().expect("terminal receives a map"))
                .collect(),
        };
        assert!(other.commutes(&diagram));
        let factoring = factor_cocone(&diagram, &computed, &other).expect("unique factoring");
        // Unique: any two factorings agree because the legs are jointly onto.
        for (i, leg) in computed.legs.iter().enumerate() {
            assert_eq!(factoring.compose(leg).unwrap(), other.legs[i]);
        }
    }

    #[test]
    fn star_product_of_point_insertion_is_the_point_cylinder_insertion() {
        let empty = Arc::new(TransitionSystem::empty(ab()));
        let pt = point();
        let f = Morphism::new(empty, pt.clone(), BTreeMap::new(), BTreeMap::new()).unwrap();
        let induced = star_product(&f, CylinderSide::Zero).unwrap();
        assert_eq!(induced.source().states().len(), 1);
        assert_eq!(induced.target().states().len(), 2);
        assert!(induced.is_mono().mono);
    }

    #[test]
    fn star_product_of_pure_boundary_inclusion_is_mono() {
        let pure = gen(GeneratorKind::PureCube(vec![Label::new("a")]));
        let boundary = Arc::new(pure.with_transitions([]).unwrap());
        let f = Morphism::new(
            boundary,
            pure,
            [
                (StateId::new("0"), StateId::new("0")),
                (StateId::new("1"), StateId::new("1")),
            ]
            .into(),
            [(ActionId::new("a.1"), ActionId::new("a.1"))].into(),
        )
        .unwrap();
        let induced = star_product(&f, CylinderSide::Zero).unwrap();
        assert!(induced.is_mono().mono);
        assert_eq!(induced.target().transitions().len(), 8);
    }

    #[test]
    fn star_product_of_identity_is_mono() {
        let x = c1("a");
        let id = Morphism::identity(x);
        for side in [CylinderSide::Zero, CylinderSide::One, CylinderSide::Both] {
            let induced = star_product(&id, side).unwrap();
            assert!(induced.is_mono().mono);
        }
    }
}
