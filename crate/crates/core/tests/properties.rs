mod common;

use std::sync::OnceLock;

use common::Model;
use periagroup::action::{compute_coxobs, decompose, find_conspicial_subgroup};
use periagroup::embedding::{build_target, CrossingWord, GraphProductTarget, PiMinus};
use periagroup::{fixtures, CayleyBall, Hyperplanes, Letter, Periagroup, Word};
use proptest::prelude::*;

fn word_from(group: &Periagroup, picks: &[usize]) -> Word {
    let letters = group.letters();
    Word(picks.iter().map(|&i| letters[i % letters.len()]).collect())
}

fn groups() -> &'static [(Periagroup, Option<Model>)] {
    static G: OnceLock<Vec<(Periagroup, Option<Model>)>> = OnceLock::new();
    G.get_or_init(|| {
        vec![
            (Periagroup::new(fixtures::f1()), Some(Model::Dihedral)),
            (Periagroup::new(fixtures::f2()), Some(Model::Prism)),
            (Periagroup::new(fixtures::f3()), None),
            (Periagroup::new(fixtures::f4()), None),
            (Periagroup::new(fixtures::f5()), None),
        ]
    })
}

fn f4_ball() -> &'static (CayleyBall, Hyperplanes) {
    static B: OnceLock<(CayleyBall, Hyperplanes)> = OnceLock::new();
    B.get_or_init(|| {
        let ball = CayleyBall::with_trust_radius(Periagroup::new(fixtures::f4()), 3).unwrap();
        let hyps = Hyperplanes::compute(&ball);
        (ball, hyps)
    })
}

fn f5_ball() -> &'static CayleyBall {
    static B: OnceLock<CayleyBall> = OnceLock::new();
    B.get_or_init(|| CayleyBall::build(Periagroup::new(fixtures::f5()), 6).unwrap())
}

fn target() -> &'static (GraphProductTarget, Periagroup) {
    static T: OnceLock<(GraphProductTarget, Periagroup)> = OnceLock::new();
    T.get_or_init(|| {
        let (ball, hyps) = f4_ball();
        let dec = decompose(ball, hyps).unwrap();
        let coxobs = compute_coxobs(&dec).unwrap();
        let h = find_conspicial_subgroup(&dec, &coxobs).unwrap();
        let pim = PiMinus::new(&dec, h).unwrap();
        let t = build_target(ball, hyps, &pim).unwrap();
        let gp = Periagroup::new(t.to_spec().unwrap());
        (t, gp)
    })
}

fn crossing_word(t: &GraphProductTarget, picks: &[(usize, usize)]) -> CrossingWord {
    CrossingWord(
        picks
            .iter()
            .map(|&(i, a)| {
                let i = i % t.vertices.len();
                (i, a % t.vertices[i].order())
            })
            .collect(),
    )
}

fn as_word(w: &CrossingWord) -> Word {
    Word(w.0.iter().filter(|l| l.1 != 0).map(|&(i, a)| Letter::new(i, a)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn normal_form_is_idempotent_and_not_longer(g in 0usize..5, picks in prop::collection::vec(0usize..16, 0..14)) {
        let (group, _) = &groups()[g];
        let w = word_from(group, &picks);
        let n = group.normalize(&w).unwrap();
        prop_assert!(n.len() <= w.len());
        prop_assert_eq!(group.normalize(&n).unwrap(), n);
    }

    #[test]
    fn normal_form_agrees_with_model(g in 0usize..2, a in prop::collection::vec(0usize..16, 0..12), b in prop::collection::vec(0usize..16, 0..12)) {
        let (group, model) = &groups()[g];
        let model = model.unwrap();
        let (a, b) = (word_from(group, &a), word_from(group, &b));
        prop_assert_eq!(group.equal(&a, &b).unwrap(), model.eval(&a) == model.eval(&b));
        prop_assert_eq!(model.eval(&group.multiply(&a, &b).unwrap()), model.mul(model.eval(&a), model.eval(&b)));
    }

    #[test]
    fn group_axioms(g in 0usize..5, a in prop::collection::vec(0usize..16, 0..8), b in prop::collection::vec(0usize..16, 0..8), c in prop::collection::vec(0usize..16, 0..8)) {
        let (group, _) = &groups()[g];
        let (a, b, c) = (word_from(group, &a), word_from(group, &b), word_from(group, &c));
        let left = group.multiply(&group.multiply(&a, &b).unwrap(), &c).unwrap();
        let right = group.multiply(&a, &group.multiply(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
        let inv = group.inverse(&a).unwrap();
        prop_assert!(group.multiply(&a, &inv).unwrap().is_empty());
    }

    #[test]
    fn normal_forms_are_geodesics(picks in prop::collection::vec(0usize..3, 0..10)) {
        // F5: the ball is built by breadth-first search, so its distances are
        // word lengths whenever the element is inside
        let ball = f5_ball();
        let group = ball.group();
        let n = group.normalize(&word_from(group, &picks)).unwrap();
        if let Some(x) = ball.index_of(&n) {
            prop_assert_eq!(ball.distances().get(0, x) as usize, n.len());
        }
    }

    #[test]
    fn hyperplanes_count_distance(i in any::<prop::sample::Index>(), j in any::<prop::sample::Index>()) {
        let (ball, hyps) = f4_ball();
        let trusted = ball.trusted_vertices();
        let (x, y) = (*i.get(&trusted), *j.get(&trusted));
        let separating = hyps.planes.iter().filter(|p| p.separates(x, y)).count();
        prop_assert_eq!(separating, ball.distance(x, y).unwrap());
    }

    #[test]
    fn target_normal_form_matches_graph_product(picks in prop::collection::vec((0usize..8, 0usize..3), 0..12)) {
        let (t, gp) = target();
        let w = crossing_word(t, &picks);
        let n = t.normal_form(&w);
        prop_assert_eq!(t.normal_form(&n), n.clone());
        prop_assert_eq!(n.0.is_empty(), gp.normalize(&as_word(&w)).unwrap().is_empty());
        prop_assert!(gp.equal(&as_word(&w), &as_word(&n)).unwrap());
    }

    #[test]
    fn target_normal_form_ignores_commuting_swaps(picks in prop::collection::vec((0usize..8, 0usize..3), 2..12), at in any::<prop::sample::Index>()) {
        let (t, _) = target();
        let w = crossing_word(t, &picks);
        let k = at.index(w.0.len() - 1);
        let (p, q) = (w.0[k].0, w.0[k + 1].0);
        prop_assume!(p != q && t.commute(p, q));
        let mut swapped = w.clone();
        swapped.0.swap(k, k + 1);
        prop_assert_eq!(t.normal_form(&w), t.normal_form(&swapped));
    }

    #[test]
    fn target_multiplication_is_associative(a in prop::collection::vec((0usize..8, 0usize..3), 0..6), b in prop::collection::vec((0usize..8, 0usize..3), 0..6), c in prop::collection::vec((0usize..8, 0usize..3), 0..6)) {
        let (t, _) = target();
        let (a, b, c) = (crossing_word(t, &a), crossing_word(t, &b), crossing_word(t, &c));
        prop_assert_eq!(t.multiply(&t.multiply(&a, &b), &c), t.multiply(&a, &t.multiply(&b, &c)));
    }
}

#[test]
fn sequential_and_parallel_paths_agree() {
    let (ball, hyps) = f4_ball();
    let elements = periagroup::action::trusted_elements(ball);
    let par = periagroup::compute_obs(ball, hyps, &elements).unwrap();
    periagroup::par::set_sequential(true);
    let seq = periagroup::compute_obs(ball, hyps, &elements).unwrap();
    let rebuilt = Hyperplanes::compute(ball);
    periagroup::par::set_sequential(false);
    assert_eq!(format!("{:?}", par.members), format!("{:?}", seq.members));
    assert_eq!(rebuilt.planes.len(), hyps.planes.len());
    assert_eq!(rebuilt.edge_class, hyps.edge_class);
}
