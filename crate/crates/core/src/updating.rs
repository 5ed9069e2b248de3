//! Updating on new information.
//!
//! Two channels: learning the result of a test conditions the
//! probability side of a representation (drop the measures that give
//! the event probability zero, renormalize the rest exactly);
//! learning a new comparison refines the preference relation (close
//! the cone over the enlarged generator set). On the representation
//! side, pair-refinement keeps exactly the measures whose ray already
//! ranks the new pair the learned way — the finite analogue of
//! conditioning on a subset of the complete extensions.
//!
//! [`verify_update_theorems`] drives both paths — syntactic
//! (contingent preference / cone refinement) and representational
//! (condition the canonical representation, re-derive the induced
//! order) — and reports whether they agree on every ordered pair.

use crate::axioms::{closure, contingent_compare_worlds, AxiomsError, ClosureResult, Instance};
use crate::geometry::CancelToken;
use crate::logic::TestFormula;
use crate::rational::Rational;
use crate::represent::{
    bootstrap_seu, represent_state_dependent, uniform_base, BootstrapShape, Representation,
    RepresentError, ResolvedRepresentation,
};
use num_traits::Zero;
use serde::Serialize;
use std::collections::BTreeSet;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum UpdatingError {
    #[error("conditioning undefined: every measure assigns the event probability 0")]
    AllMeasuresVanish,
    #[error(transparent)]
    Represent(#[from] RepresentError),
    #[error(transparent)]
    Axioms(#[from] AxiomsError),
}

/// The probability set after conditioning on an event.
#[derive(Debug, Clone)]
pub struct ConditionedSet {
    /// (original index in `p_set`, renormalized vector over states).
    pub survivors: Vec<(usize, Vec<Rational>)>,
    pub dropped: usize,
}

/// Conditions every measure of a representation on a test: measures
/// giving the event probability zero are dropped, the rest are
/// renormalized exactly (every survivor assigns the event total
/// probability 1).
pub fn condition_on_test(
    rep: &Representation,
    instance: &Instance,
    t: &TestFormula,
) -> Result<ConditionedSet, UpdatingError> {
    let resolved = rep.resolve(instance)?;
    let event = resolved.interpret_test(instance, t)?;
    condition_resolved(&resolved, &event)
}

/// Conditioning on an explicit state-event mask.
pub fn condition_resolved(
    resolved: &ResolvedRepresentation,
    event: &[bool],
) -> Result<ConditionedSet, UpdatingError> {
    let mut survivors = Vec::new();
    let mut dropped = 0;
    for (idx, p) in resolved.p_set.iter().enumerate() {
        let mass: Rational = p
            .iter()
            .zip(event)
            .filter(|(_, &e)| e)
            .map(|(x, _)| x.clone())
            .sum();
        if mass.is_zero() {
            dropped += 1;
            continue;
        }
        let q: Vec<Rational> = p
            .iter()
            .zip(event)
            .map(|(x, &e)| if e { x / &mass } else { Rational::zero() })
            .collect();
        survivors.push((idx, q));
    }
    if survivors.is_empty() {
        return Err(UpdatingError::AllMeasuresVanish);
    }
    Ok(ConditionedSet { survivors, dropped })
}

/// Refinement: the smallest cancellation-closed order containing the
/// declared pairs and `(a, b)`. Both the plain and the mixture
/// refinement operators reduce to this cone closure here.
pub fn refine(
    instance: &Instance,
    pair: (usize, usize),
    cancel: &CancelToken,
) -> Result<ClosureResult, UpdatingError> {
    Ok(closure(instance, Some(pair), cancel)?)
}

/// What was learned.
#[derive(Debug, Clone)]
pub enum Learned {
    Test(TestFormula),
    Pair(usize, usize),
}

#[derive(Debug, Clone, Serialize)]
pub struct PairDisagreement {
    pub pair: [String; 2],
    pub syntactic: bool,
    pub representation: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct TwoPathReport {
    pub agree: bool,
    pub surviving_measures: usize,
    pub dropped_measures: usize,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub disagreements: Vec<PairDisagreement>,
}

/// Two-path verification of the updating theorems on the canonical
/// single-utility representation.
///
/// Path 1 updates the syntactic side: the contingent order for a test,
/// the cone refinement for a pair. Path 2 updates the representation:
/// condition `P` on the test event, or keep the measures whose ray
/// weakly prefers the learned pair; then re-derive the induced order
/// from the surviving `(u, p)` pairs. The verdict is true iff the two
/// orders coincide on every ordered pair of `C`.
pub fn verify_update_theorems(
    instance: &Instance,
    learned: &Learned,
    cancel: &CancelToken,
) -> Result<TwoPathReport, UpdatingError> {
    let sdr = represent_state_dependent(instance, cancel)?;
    let base = uniform_base(instance)?;
    let rep = bootstrap_seu(&sdr, instance, &base, BootstrapShape::SingleUtility)?;
    let resolved = rep.resolve(instance)?;

    // Expected utilities of every act under every (u, p) in V.
    let mut eus: Vec<Vec<Rational>> = Vec::with_capacity(instance.acts.len());
    for act in &instance.acts {
        let interp = resolved.interpret_choice(instance, &act.program)?;
        eus.push(
            resolved
                .v_pairs
                .iter()
                .map(|&(ui, pi)| resolved.expected_utility(&interp, ui, pi))
                .collect(),
        );
    }

    let n = instance.acts.len();
    let mut syntactic: BTreeSet<(usize, usize)> = BTreeSet::new();
    let representation: BTreeSet<(usize, usize)>;
    let surviving;
    let dropped;

    match learned {
        Learned::Test(t) => {
            let keep = instance.worlds_entailing(t)?;
            for i in 0..n {
                for j in 0..n {
                    if contingent_compare_worlds(instance, i, j, &keep, cancel)?.forward {
                        syntactic.insert((i, j));
                    }
                }
            }
            let event = resolved.interpret_test(instance, t)?;
            let conditioned = condition_resolved(&resolved, &event)?;
            surviving = conditioned.survivors.len();
            dropped = conditioned.dropped;
            // Induced order: EU under every surviving (u, q).
            let mut set = BTreeSet::new();
            for i in 0..n {
                'pairs: for j in 0..n {
                    for (orig, q) in &conditioned.survivors {
                        let (ui, _) = resolved.v_pairs[*orig];
                        let interp_i = resolved.interpret_choice(instance, &instance.acts[i].program)?;
                        let interp_j = resolved.interpret_choice(instance, &instance.acts[j].program)?;
                        let eu_i = eu_under(&resolved, &interp_i, ui, q);
                        let eu_j = eu_under(&resolved, &interp_j, ui, q);
                        if eu_i < eu_j {
                            continue 'pairs;
                        }
                    }
                    set.insert((i, j));
                }
            }
            representation = set;
        }
        Learned::Pair(a, b) => {
            let refined = refine(instance, (*a, *b), cancel)?;
            syntactic = refined.weak;
            // Keep the measures whose ray weakly prefers a to b.
            let kept: Vec<usize> = (0..resolved.v_pairs.len())
                .filter(|&k| eus[*a][k] >= eus[*b][k])
                .collect();
            surviving = kept.len();
            dropped = resolved.v_pairs.len() - surviving;
            let mut set = BTreeSet::new();
            for i in 0..n {
                for j in 0..n {
                    if kept.iter().all(|&k| eus[i][k] >= eus[j][k]) {
                        set.insert((i, j));
                    }
                }
            }
            representation = set;
        }
    }

    let mut disagreements = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let s = syntactic.contains(&(i, j));
            let r = representation.contains(&(i, j));
            if s != r {
                disagreements.push(PairDisagreement {
                    pair: [
                        instance.act_name(i).to_string(),
                        instance.act_name(j).to_string(),
                    ],
                    syntactic: s,
                    representation: r,
                });
            }
        }
    }
    Ok(TwoPathReport {
        agree: disagreements.is_empty(),
        surviving_measures: surviving,
        dropped_measures: dropped,
        disagreements,
    })
}

fn eu_under(
    resolved: &ResolvedRepresentation,
    interp: &[Vec<(usize, Rational)>],
    u_idx: usize,
    p: &[Rational],
) -> Rational {
    let u = &resolved.u_set[u_idx];
    let mut total = Rational::zero();
    for (s, dist) in interp.iter().enumerate() {
        if p[s].is_zero() {
            continue;
        }
        for (o, w) in dist {
            total += &p[s] * w * &u[*o];
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::axioms::tests::{build, rt_closure};
    use crate::logic::parse_test;
    use crate::rational::{format_rational, parse_rational, rat, rint};
    use std::collections::BTreeMap;

    fn never() -> CancelToken {
        CancelToken::default()
    }

    fn ex2_chain() -> Instance {
        let chain = ["a", "c_ab", "c_ba", "b"];
        let pairs = rt_closure(&chain);
        let weak: Vec<(&str, &str)> =
            pairs.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
        build(
            &["t"],
            &[],
            &["a", "b"],
            &[("c_ab", "if t then a else b"), ("c_ba", "if t then b else a")],
            &weak,
        )
    }

    fn ex3_incomparable() -> Instance {
        build(&[], &[], &["a", "b"], &[], &[("a", "a"), ("b", "b")])
    }

    #[test]
    fn conditioning_renormalizes_exactly() {
        let inst = ex2_chain();
        let sdr = crate::represent::represent_state_dependent(&inst, &never()).unwrap();
        let base = crate::represent::uniform_base(&inst).unwrap();
        let rep = crate::represent::bootstrap_seu(
            &sdr,
            &inst,
            &base,
            BootstrapShape::SingleUtility,
        )
        .unwrap();
        let t = parse_test("t", &inst.test_names).unwrap();
        let conditioned = condition_on_test(&rep, &inst, &t).unwrap();
        assert_eq!(conditioned.dropped, 0);
        for (_, q) in &conditioned.survivors {
            let total: Rational = q.iter().cloned().sum();
            assert_eq!(total, rint(1));
        }
        // tautology: identity on P (already normalized)
        let taut = parse_test("t | !t", &inst.test_names).unwrap();
        let identity = condition_on_test(&rep, &inst, &taut).unwrap();
        let resolved = rep.resolve(&inst).unwrap();
        for (idx, q) in &identity.survivors {
            assert_eq!(q, &resolved.p_set[*idx]);
        }
    }

    #[test]
    fn conditioning_drops_vanishing_measures() {
        // Hand-built representation with p1 concentrated on s1 and p2
        // on s2; conditioning on the event {s1} keeps exactly p1.
        let inst = ex3_incomparable();
        let mut test_interp = BTreeMap::new();
        // no declared tests: the basis is empty, nothing to map
        let _ = &mut test_interp;
        let mut choice_interp = BTreeMap::new();
        for (prim, outs) in [("a", ["o1", "o2"]), ("b", ["o2", "o1"])] {
            let mut per_state = BTreeMap::new();
            for (s, o) in ["s1", "s2"].iter().zip(outs) {
                let mut dist = BTreeMap::new();
                dist.insert(o.to_string(), "1".to_string());
                per_state.insert(s.to_string(), dist);
            }
            choice_interp.insert(prim.to_string(), per_state);
        }
        let mut p1 = BTreeMap::new();
        p1.insert("s1".to_string(), "1".to_string());
        let mut p2 = BTreeMap::new();
        p2.insert("s2".to_string(), "1".to_string());
        let mut u = BTreeMap::new();
        u.insert("o1".to_string(), "1".to_string());
        u.insert("o2".to_string(), "0".to_string());
        let rep = Representation {
            states: vec!["s1".to_string(), "s2".to_string()],
            outcomes: vec!["o1".to_string(), "o2".to_string()],
            test_interp,
            choice_interp,
            p_set: vec![p1, p2],
            u_set: vec![u],
            v_pairs: vec![(0, 0), (0, 1)],
            flags: vec![],
        };
        let resolved = rep.resolve(&inst).unwrap();
        let conditioned = condition_resolved(&resolved, &[true, false]).unwrap();
        assert_eq!(conditioned.dropped, 1);
        assert_eq!(conditioned.survivors.len(), 1);
        assert_eq!(conditioned.survivors[0].0, 0);

        // partial mass renormalizes by its inverse
        let mut p3 = BTreeMap::new();
        p3.insert("s1".to_string(), "1/4".to_string());
        p3.insert("s2".to_string(), "3/4".to_string());
        let rep2 = Representation { p_set: vec![p3], v_pairs: vec![(0, 0)], ..rep.clone() };
        let resolved2 = rep2.resolve(&inst).unwrap();
        let conditioned2 = condition_resolved(&resolved2, &[true, false]).unwrap();
        assert_eq!(conditioned2.survivors[0].1[0], rint(1));

        // conditioning on an event every measure misses is an error
        assert!(matches!(
            condition_resolved(&resolved, &[false, false]),
            Err(UpdatingError::AllMeasuresVanish)
        ));
    }

    #[test]
    fn refine_is_monotone_idempotent_commutative() {
        let inst = build(
            &[],
            &[],
            &["a", "b", "c", "d"],
            &[],
            &[("a", "a"), ("b", "b"), ("c", "c"), ("d", "d"), ("a", "b")],
        );
        let i = |n: &str| inst.act_index(n).unwrap();
        let before = closure(&inst, None, &never()).unwrap().weak;
        let refined = refine(&inst, (i("b"), i("c")), &never()).unwrap().weak;
        // monotone: no pairs removed
        assert!(before.is_subset(&refined));
        // transitivity through the new pair
        assert!(refined.contains(&(i("a"), i("c"))));

        // idempotent: refining with an already-implied pair changes nothing
        let again = Instance::new(
            inst.test_names.clone(),
            inst.primitive_names.clone(),
            inst.basis.clone(),
            inst.theory.clone(),
            inst.worlds.clone(),
            inst.acts.clone(),
            refined.clone(),
        );
        let re_refined = refine(&again, (i("a"), i("c")), &never()).unwrap().weak;
        assert_eq!(refined, re_refined);

        // commutative: (b,c) then (c,d) equals (c,d) then (b,c)
        let path1 = {
            let step = Instance::new(
                inst.test_names.clone(),
                inst.primitive_names.clone(),
                inst.basis.clone(),
                inst.theory.clone(),
                inst.worlds.clone(),
                inst.acts.clone(),
                refine(&inst, (i("b"), i("c")), &never()).unwrap().weak,
            );
            refine(&step, (i("c"), i("d")), &never()).unwrap().weak
        };
        let path2 = {
            let step = Instance::new(
                inst.test_names.clone(),
                inst.primitive_names.clone(),
                inst.basis.clone(),
                inst.theory.clone(),
                inst.worlds.clone(),
                inst.acts.clone(),
                refine(&inst, (i("c"), i("d")), &never()).unwrap().weak,
            );
            refine(&step, (i("b"), i("c")), &never()).unwrap().weak
        };
        assert_eq!(path1, path2);
    }

    #[test]
    fn refine_reports_collapse_on_reversal() {
        let inst = ex2_chain();
        let a = inst.act_index("a").unwrap();
        let b = inst.act_index("b").unwrap();
        let result = refine(&inst, (b, a), &never()).unwrap();
        assert!(!result.forced_indifference.is_empty());
    }

    #[test]
    fn ex3_refinement_completes_the_pair() {
        let inst = ex3_incomparable();
        let a = inst.act_index("a").unwrap();
        let b = inst.act_index("b").unwrap();
        let refined = refine(&inst, (a, b), &never()).unwrap();
        assert!(refined.weak.contains(&(a, b)));
        assert!(!refined.weak.contains(&(b, a)));
    }

    #[test]
    fn two_path_agreement_for_test_conditioning() {
        let inst = ex2_chain();
        let t = parse_test("t", &inst.test_names).unwrap();
        let report = verify_update_theorems(&inst, &Learned::Test(t), &never()).unwrap();
        assert!(report.agree, "disagreements: {:?}", report.disagreements);

        let taut = parse_test("t | !t", &inst.test_names).unwrap();
        let report = verify_update_theorems(&inst, &Learned::Test(taut), &never()).unwrap();
        assert!(report.agree);
    }

    #[test]
    fn two_path_agreement_for_pair_refinement() {
        let inst = ex3_incomparable();
        let a = inst.act_index("a").unwrap();
        let b = inst.act_index("b").unwrap();
        let report =
            verify_update_theorems(&inst, &Learned::Pair(a, b), &never()).unwrap();
        assert!(report.agree, "disagreements: {:?}", report.disagreements);
        assert!(report.dropped_measures > 0);

        // already-implied pair: everything survives, order unchanged
        let inst2 = ex2_chain();
        let a2 = inst2.act_index("a").unwrap();
        let b2 = inst2.act_index("b").unwrap();
        let report2 =
            verify_update_theorems(&inst2, &Learned::Pair(a2, b2), &never()).unwrap();
        assert!(report2.agree);
        assert_eq!(report2.dropped_measures, 0);
    }

    #[test]
    fn conditioning_preserves_rational_exactness() {
        // survivor entries are exact ratios of the original entries
        let inst = ex2_chain();
        let sdr = crate::represent::represent_state_dependent(&inst, &never()).unwrap();
        let base: Vec<Rational> = vec![rat(1, 4), rat(3, 4)];
        let rep = crate::represent::bootstrap_seu(
            &sdr,
            &inst,
            &base,
            BootstrapShape::SingleUtility,
        )
        .unwrap();
        let t = parse_test("t", &inst.test_names).unwrap();
        let conditioned = condition_on_test(&rep, &inst, &t).unwrap();
        for (_, q) in &conditioned.survivors {
            for x in q {
                let s = format_rational(x);
                assert_eq!(parse_rational(&s).unwrap(), x.clone());
            }
        }
    }
}
