//! Construction and verification of subjective expected-utility
//! representations.
//!
//! The pipeline: a state-dependent representation first (the dual
//! rays of the preference cone are exactly the state-dependent
//! utility functions — one per complete extension of the declared
//! partial order), then a change of state/outcome spaces bootstraps it
//! into a proper SEU representation in one of two shapes:
//!
//! - multi-utility: states are the consistent worlds, a single strictly
//!   positive base probability, one utility per ray;
//! - single-utility: states are (world, ray) pairs, one utility, one
//!   mutually singular probability measure per ray.
//!
//! With objective outcomes the construction instead calibrates each
//! outcome `o` against the best/worst pair — the weight `c_o` making
//! `o` indifferent to `c_o o1 + (1-c_o) o0` — and prices every
//! non-outcome act by a per-state threshold. The calibration must
//! agree across rays and worlds; a disagreement is reported as a
//! structured error and doubles as the exact state-independence
//! backstop.
//!
//! [`verify_representation`] recomputes every expected utility from
//! scratch and checks the representation biconditional pair by pair.

use crate::axioms::{check_a1, check_cancellation, closure, AxiomsError, Instance};
use crate::geometry::{dot, is_zero_vec, CancelToken, GeomError, QVec};
use crate::logic::{Basis, LogicError, TestFormula};
use crate::rational::{format_rational, parse_rational, Rational};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// State-dependent utilities over the (world, primitive) layout.
///
/// Contract (instantiating the cone duality): `(a, b)` is in the
/// closure iff every utility weakly prefers `a` to `b`.
#[derive(Debug, Clone)]
pub struct StateDependentRep {
    pub utilities: Vec<QVec>,
}

/// A full constructive representation, in the exchange format used by
/// the CLI: labels are strings, rationals serialize as `"p/q"`.
///
/// State labels are structured strings built from the atom bits, the
/// primitive, and the ray index, joined with `|` — e.g. `"(10|a1|r0)"`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Representation {
    pub states: Vec<String>,
    pub outcomes: Vec<String>,
    /// Basis test name (primitive test, or `T*` member rendering) to
    /// the states where it holds.
    pub test_interp: BTreeMap<String, Vec<String>>,
    /// Primitive choice -> state -> point-mass distribution over
    /// outcomes (`outcome -> weight`).
    pub choice_interp: BTreeMap<String, BTreeMap<String, BTreeMap<String, String>>>,
    /// Probability vectors over states (zero entries omitted).
    pub p_set: Vec<BTreeMap<String, String>>,
    /// Utility maps over outcomes.
    pub u_set: Vec<BTreeMap<String, String>>,
    /// (utility index, probability index) pairs — the representation
    /// quantifies over exactly these.
    pub v_pairs: Vec<(usize, usize)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RepresentError {
    #[error("theory is inconsistent: no consistent worlds")]
    InconsistentTheory,
    #[error("precondition failed: {axiom} does not hold{}", witness_suffix(.witness))]
    PreconditionFailed {
        axiom: String,
        witness: Option<[String; 2]>,
    },
    #[error("base measure must be strictly positive on every consistent world")]
    NonPositiveBase,
    #[error("base measure must sum to 1")]
    BaseNotNormalized,
    #[error("no best/worst outcome pair: A4 fails")]
    MissingBestWorst,
    #[error(
        "calibration inconsistency for outcome {outcome:?}: ray {ray_low} at world {world_low} \
         implies c = {c_low}, ray {ray_high} at world {world_high} implies c = {c_high}"
    )]
    CalibrationInconsistency {
        outcome: String,
        ray_low: usize,
        world_low: String,
        c_low: String,
        ray_high: usize,
        world_high: String,
        c_high: String,
    },
    #[error("malformed representation: {0}")]
    Malformed(String),
    #[error(transparent)]
    Axioms(#[from] AxiomsError),
    #[error(transparent)]
    Geometry(#[from] GeomError),
    #[error(transparent)]
    Logic(#[from] LogicError),
}

fn witness_suffix(w: &Option<[String; 2]>) -> String {
    match w {
        Some([a, b]) => format!(" (witness: {a}, {b})"),
        None => String::new(),
    }
}

/// Which bootstrap shape to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BootstrapShape {
    /// States = worlds, one probability, one utility per ray.
    MultiUtility,
    /// States = worlds x rays, one utility, one probability per ray.
    SingleUtility,
}

// ---------------------------------------------------------------------------
// State-dependent representations
// ---------------------------------------------------------------------------

/// The multi-utility state-dependent representation: dual rays of the
/// preference cone.
pub fn represent_state_dependent(
    instance: &Instance,
    cancel: &CancelToken,
) -> Result<StateDependentRep, RepresentError> {
    ensure_cancellation(instance, cancel)?;
    let rays = instance.cone().dual_generators(cancel)?;
    let utilities = if rays.is_empty() {
        vec![vec![Rational::zero(); instance.dim()]]
    } else {
        rays.to_vec()
    };
    Ok(StateDependentRep { utilities })
}

/// The single-utility representation available under completeness:
/// an exact LP finds `u` with `u.d = 0` on indifferent pairs and
/// `u.d >= 1` on strict pairs, minimizing the L1 norm of `u` for a
/// canonical pick; the output is then rescaled so the smallest
/// utility value is 0 and the first strict expected-utility gap is 1.
pub fn represent_single(
    instance: &Instance,
    cancel: &CancelToken,
) -> Result<StateDependentRep, RepresentError> {
    ensure_cancellation(instance, cancel)?;
    let a1 = check_a1(instance, cancel)?;
    if !a1.holds {
        return Err(RepresentError::PreconditionFailed {
            axiom: "A1".into(),
            witness: a1.witness,
        });
    }

    let dim = instance.dim();
    let n = instance.acts.len();
    // Classify unordered pairs through the cone.
    let mut strict: Vec<QVec> = Vec::new();
    let mut indiff: Vec<QVec> = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let d = instance.diff(i, j);
            if is_zero_vec(&d) {
                continue;
            }
            let fwd = instance.cone().member(&d, cancel)?.is_some();
            let rev = instance
                .cone()
                .member(&crate::geometry::neg(&d), cancel)?
                .is_some();
            match (fwd, rev) {
                (true, true) => indiff.push(d),
                (true, false) => strict.push(d),
                (false, true) => strict.push(crate::geometry::neg(&d)),
                (false, false) => unreachable!("A1 checked above"),
            }
        }
    }

    let u = if strict.is_empty() && indiff.is_empty() {
        vec![Rational::zero(); dim]
    } else {
        solve_single_utility(dim, &strict, &indiff, cancel)?
    };
    Ok(StateDependentRep {
        utilities: vec![canonical_scale(instance, u)],
    })
}

/// LP: variables u (split into +/- parts) and one surplus per strict
/// pair; constraints u.d - s = 1 (strict), u.d = 0 (indifferent);
/// objective min sum(u+ + u-).
fn solve_single_utility(
    dim: usize,
    strict: &[QVec],
    indiff: &[QVec],
    cancel: &CancelToken,
) -> Result<QVec, RepresentError> {
    let n_rows = strict.len() + indiff.len();
    let n_vars = 2 * dim + strict.len();
    let mut columns: Vec<Vec<Rational>> = vec![vec![Rational::zero(); n_rows]; n_vars];
    let mut rhs = vec![Rational::zero(); n_rows];
    for (r, d) in strict.iter().enumerate() {
        for k in 0..dim {
            columns[k][r] = d[k].clone();
            columns[dim + k][r] = -d[k].clone();
        }
        columns[2 * dim + r][r] = -Rational::one();
        rhs[r] = Rational::one();
    }
    for (extra, d) in indiff.iter().enumerate() {
        let r = strict.len() + extra;
        for k in 0..dim {
            columns[k][r] = d[k].clone();
            columns[dim + k][r] = -d[k].clone();
        }
    }
    let mut objective = vec![Rational::one(); 2 * dim];
    objective.extend(vec![Rational::zero(); strict.len()]);
    let col_refs: Vec<&[Rational]> = columns.iter().map(|c| c.as_slice()).collect();
    let solution =
        crate::geometry::solve_nonneg_combination(&col_refs, &rhs, Some(&objective), cancel)?
            .ok_or_else(|| RepresentError::PreconditionFailed {
                axiom: "single-utility feasibility".into(),
                witness: None,
            })?;
    Ok((0..dim)
        .map(|k| &solution[k] - &solution[dim + k])
        .collect())
}

/// Canonical affine placement: first strict expected-utility gap 1,
/// minimum utility entry 0. Any positive affine transform represents
/// the same order.
fn canonical_scale(instance: &Instance, mut u: QVec) -> QVec {
    let mut values: Vec<Rational> = (0..instance.acts.len())
        .map(|i| dot(&u, instance.vector(i)))
        .collect();
    values.sort();
    values.dedup();
    values.reverse();
    if values.len() >= 2 {
        let gap = &values[0] - &values[1];
        if !gap.is_zero() {
            for x in u.iter_mut() {
                *x /= &gap;
            }
        }
    }
    if let Some(min) = u.iter().min().cloned() {
        if !min.is_zero() {
            for x in u.iter_mut() {
                *x -= &min;
            }
        }
    }
    u
}

fn ensure_cancellation(instance: &Instance, cancel: &CancelToken) -> Result<(), RepresentError> {
    let report = check_cancellation(instance, instance.language(), cancel)?;
    if !report.holds {
        let witness = report.witness.map(|w| w.pair);
        return Err(RepresentError::PreconditionFailed {
            axiom: "cancellation".into(),
            witness,
        });
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Bootstrapping to SEU representations
// ---------------------------------------------------------------------------

/// The uniform base measure over consistent worlds.
pub fn uniform_base(instance: &Instance) -> Result<Vec<Rational>, RepresentError> {
    let n = instance.worlds.len();
    if n == 0 {
        return Err(RepresentError::InconsistentTheory);
    }
    Ok(vec![Rational::new(1.into(), (n as i64).into()); n])
}

fn validate_base(instance: &Instance, base: &[Rational]) -> Result<(), RepresentError> {
    if base.len() != instance.worlds.len() || base.iter().any(|p| !p.is_positive()) {
        return Err(RepresentError::NonPositiveBase);
    }
    let total: Rational = base.iter().cloned().sum();
    if !total.is_one() {
        return Err(RepresentError::BaseNotNormalized);
    }
    Ok(())
}

fn ray_label(k: usize) -> String {
    format!("r{k}")
}

/// Changes state and outcome spaces to turn a state-dependent
/// representation into a constructive SEU representation.
///
/// Shape (i), multi-utility: states are the consistent worlds,
/// `P = {base}`, and each ray `u_k` becomes the utility
/// `v_k(w, a) = u_k(w, a) / base(w)` on outcomes `(world, primitive)`.
///
/// Shape (ii), single-utility: states are (world, ray) pairs; the
/// single utility is `v(w, a, k) = u_k(w, a) / base(w)`; `P` holds one
/// measure per ray, `p_k(w, j) = base(w)` if `j = k` else 0 — the
/// finite ray set standing in for the complete extensions of the
/// declared order.
pub fn bootstrap_seu(
    sdr: &StateDependentRep,
    instance: &Instance,
    base: &[Rational],
    shape: BootstrapShape,
) -> Result<Representation, RepresentError> {
    if instance.worlds.is_empty() {
        return Err(RepresentError::InconsistentTheory);
    }
    validate_base(instance, base)?;
    let p = instance.primitive_names.len();
    let degenerate = sdr.utilities.iter().all(|u| is_zero_vec(u));
    let mut flags = Vec::new();
    if degenerate {
        flags.push("degenerate".to_string());
    }

    let rep = match shape {
        BootstrapShape::MultiUtility => {
            let states: Vec<String> = instance.worlds.iter().map(|w| format!("({w})")).collect();
            let outcome_of = |w: usize, prim: usize| {
                format!(
                    "({}|{})",
                    instance.worlds[w].label(),
                    instance.primitive_names[prim]
                )
            };
            let mut outcomes = Vec::new();
            for w in 0..instance.worlds.len() {
                for a in 0..p {
                    outcomes.push(outcome_of(w, a));
                }
            }
            let mut u_set = Vec::new();
            for u in &sdr.utilities {
                let mut map = BTreeMap::new();
                for w in 0..instance.worlds.len() {
                    for a in 0..p {
                        map.insert(
                            outcome_of(w, a),
                            format_rational(&(&u[w * p + a] / &base[w])),
                        );
                    }
                }
                u_set.push(map);
            }
            let p_set = vec![prob_map(&states, base)];
            let v_pairs: Vec<(usize, usize)> = (0..u_set.len()).map(|k| (k, 0)).collect();
            let choice_interp = point_interp(instance, &states, outcome_of);
            Representation {
                test_interp: test_interp_by_world(instance, &states, |w| vec![w])?,
                states,
                outcomes,
                choice_interp,
                p_set,
                u_set,
                v_pairs,
                flags,
            }
        }
        BootstrapShape::SingleUtility => {
            let rays = sdr.utilities.len();
            let state_of = |w: usize, k: usize| {
                format!("({}|{})", instance.worlds[w].label(), ray_label(k))
            };
            let outcome_of = |w: usize, a: usize, k: usize| {
                format!(
                    "({}|{}|{})",
                    instance.worlds[w].label(),
                    instance.primitive_names[a],
                    ray_label(k)
                )
            };
            let mut states = Vec::new();
            for w in 0..instance.worlds.len() {
                for k in 0..rays {
                    states.push(state_of(w, k));
                }
            }
            let mut outcomes = Vec::new();
            let mut v_map = BTreeMap::new();
            for w in 0..instance.worlds.len() {
                for a in 0..p {
                    for (k, u) in sdr.utilities.iter().enumerate() {
                        let label = outcome_of(w, a, k);
                        v_map.insert(label.clone(), format_rational(&(&u[w * p + a] / &base[w])));
                        outcomes.push(label);
                    }
                }
            }
            let mut p_set = Vec::new();
            for k in 0..rays {
                let mut map = BTreeMap::new();
                for w in 0..instance.worlds.len() {
                    map.insert(state_of(w, k), format_rational(&base[w]));
                }
                p_set.push(map);
            }
            let v_pairs: Vec<(usize, usize)> = (0..rays).map(|k| (0, k)).collect();
            let mut choice_interp = BTreeMap::new();
            for (a, prim) in instance.primitive_names.iter().enumerate() {
                let mut per_state = BTreeMap::new();
                for w in 0..instance.worlds.len() {
                    for k in 0..rays {
                        let mut dist = BTreeMap::new();
                        dist.insert(outcome_of(w, a, k), "1".to_string());
                        per_state.insert(state_of(w, k), dist);
                    }
                }
                choice_interp.insert(prim.clone(), per_state);
            }
            let test_interp = test_interp_by_world(instance, &states, |w| {
                (0..rays).map(|k| w * rays + k).collect()
            })?;
            Representation {
                states,
                outcomes,
                test_interp,
                choice_interp,
                p_set,
                u_set: vec![v_map],
                v_pairs,
                flags,
            }
        }
    };
    Ok(rep)
}

fn prob_map(states: &[String], weights: &[Rational]) -> BTreeMap<String, String> {
    states
        .iter()
        .zip(weights)
        .filter(|(_, w)| !w.is_zero())
        .map(|(s, w)| (s.clone(), format_rational(w)))
        .collect()
}

/// Point-mass choice interpretation from a (world, primitive) ->
/// outcome-label function, for representations whose states are
/// exactly the worlds.
fn point_interp(
    instance: &Instance,
    states: &[String],
    outcome_of: impl Fn(usize, usize) -> String,
) -> BTreeMap<String, BTreeMap<String, BTreeMap<String, String>>> {
    let mut out = BTreeMap::new();
    for (a, prim) in instance.primitive_names.iter().enumerate() {
        let mut per_state = BTreeMap::new();
        for (w, state) in states.iter().enumerate() {
            let mut dist = BTreeMap::new();
            dist.insert(outcome_of(w, a), "1".to_string());
            per_state.insert(state.clone(), dist);
        }
        out.insert(prim.clone(), per_state);
    }
    out
}

/// Test interpretation over states, given the state indices belonging
/// to each world.
fn test_interp_by_world(
    instance: &Instance,
    states: &[String],
    states_of_world: impl Fn(usize) -> Vec<usize>,
) -> Result<BTreeMap<String, Vec<String>>, RepresentError> {
    let mut out = BTreeMap::new();
    for (name, formula) in basis_test_formulas(instance) {
        let mut held = Vec::new();
        for (w, world) in instance.worlds.iter().enumerate() {
            if instance.basis.eval(&formula, world, &instance.test_names)? {
                for s in states_of_world(w) {
                    held.push(states[s].clone());
                }
            }
        }
        out.insert(name, held);
    }
    Ok(out)
}

/// The named basis tests: primitive tests in standard mode, the `T*`
/// members (keyed by their rendering) in nonstandard mode.
pub fn basis_test_formulas(instance: &Instance) -> Vec<(String, TestFormula)> {
    match &instance.basis {
        Basis::Standard { test_count } => (0..*test_count)
            .map(|i| (instance.test_names[i].clone(), TestFormula::Prim(i)))
            .collect(),
        Basis::Nonstandard { members } => members
            .iter()
            .map(|m| (m.display(&instance.test_names), m.clone()))
            .collect(),
    }
}

// ---------------------------------------------------------------------------
// Objective outcomes
// ---------------------------------------------------------------------------

/// The objective-outcome construction: outcomes exactly `O`, a single
/// state-independent utility `u(o) = c_o`, states (world, primitive,
/// ray) with the threshold choice interpretation, probabilities
/// reproducing each ray's normalized state-dependent utility.
///
/// Under completeness the single-utility LP solution stands in for the
/// ray set, so the representation is a genuine singleton.
pub fn represent_objective(
    instance: &Instance,
    outcome_indices: &[usize],
    cancel: &CancelToken,
) -> Result<Representation, RepresentError> {
    if instance.worlds.is_empty() {
        return Err(RepresentError::InconsistentTheory);
    }
    ensure_cancellation(instance, cancel)?;
    let p = instance.primitive_names.len();
    let n_worlds = instance.worlds.len();

    // Best/worst pair via the A4 search.
    let a4 = crate::axioms::check_objective_axioms(
        instance,
        outcome_indices,
        1,
        crate::axioms::DEFAULT_UNION_CAP,
        cancel,
    )?
    .a4;
    if !a4.holds {
        return Err(RepresentError::MissingBestWorst);
    }
    let best_name = a4.best.expect("holds implies best");
    let worst_name = a4.worst.expect("holds implies worst");
    let best = instance
        .primitive_names
        .iter()
        .position(|n| *n == best_name)
        .expect("best is a primitive");
    let worst = instance
        .primitive_names
        .iter()
        .position(|n| *n == worst_name)
        .expect("worst is a primitive");

    // Ray set: the single LP utility under A1, dual rays otherwise.
    let a1 = check_a1(instance, cancel)?;
    let raw_rays: Vec<QVec> = if a1.holds {
        represent_single(instance, cancel)?.utilities
    } else {
        represent_state_dependent(instance, cancel)?.utilities
    };

    // Normalize: zero at (w, worst) within each world block, total
    // best-mass 1 across worlds. Per-world shifts and positive scaling
    // preserve the represented order.
    let mut rays: Vec<QVec> = Vec::new();
    for u in &raw_rays {
        let mut v = u.clone();
        for w in 0..n_worlds {
            let shift = v[w * p + worst].clone();
            for a in 0..p {
                v[w * p + a] -= &shift;
            }
        }
        let total: Rational = (0..n_worlds).map(|w| v[w * p + best].clone()).sum();
        if total.is_zero() {
            continue; // per-world-constant ray: contributes nothing
        }
        for x in v.iter_mut() {
            *x /= &total;
        }
        // A4 guarantees monotonicity between worst and best.
        for w in 0..n_worlds {
            for a in 0..p {
                debug_assert!(!v[w * p + a].is_negative());
                debug_assert!(v[w * p + a] <= v[w * p + best]);
            }
        }
        rays.push(v);
    }

    if rays.is_empty() {
        return degenerate_objective(instance, outcome_indices, worst);
    }

    // Calibration: c_o must be a single constant across rays and
    // across the worlds where the ray's best-mass is positive.
    let mut c_of: BTreeMap<usize, Rational> = BTreeMap::new();
    for &o in outcome_indices {
        let mut found: Option<(Rational, usize, usize)> = None;
        for (k, v) in rays.iter().enumerate() {
            for w in 0..n_worlds {
                let top = &v[w * p + best];
                if top.is_zero() {
                    continue;
                }
                let c = &v[w * p + o] / top;
                match &found {
                    None => found = Some((c, k, w)),
                    Some((c0, k0, w0)) => {
                        if c != *c0 {
                            let (low, high) = if c < *c0 {
                                ((c.clone(), k, w), (c0.clone(), *k0, *w0))
                            } else {
                                ((c0.clone(), *k0, *w0), (c.clone(), k, w))
                            };
                            return Err(RepresentError::CalibrationInconsistency {
                                outcome: instance.primitive_names[o].clone(),
                                ray_low: low.1,
                                world_low: instance.worlds[low.2].label(),
                                c_low: format_rational(&low.0),
                                ray_high: high.1,
                                world_high: instance.worlds[high.2].label(),
                                c_high: format_rational(&high.0),
                            });
                        }
                    }
                }
            }
        }
        let c = found.map(|(c, _, _)| c).unwrap_or_else(Rational::zero);
        c_of.insert(o, c);
    }

    // States: per ray and world, the positive-mass thresholds.
    // Distinct utility levels v1 > ... > vr get class mass v_j - v_{j+1},
    // spread uniformly within the class.
    let outcome_names: Vec<String> = outcome_indices
        .iter()
        .map(|&o| instance.primitive_names[o].clone())
        .collect();
    let mut states: Vec<String> = Vec::new();
    let mut state_world: Vec<usize> = Vec::new();
    let mut state_prim: Vec<usize> = Vec::new();
    let mut state_ray: Vec<usize> = Vec::new();
    let mut masses: Vec<Rational> = Vec::new();
    for (k, v) in rays.iter().enumerate() {
        for w in 0..n_worlds {
            let mut levels: Vec<Rational> = (0..p).map(|a| v[w * p + a].clone()).collect();
            levels.sort();
            levels.dedup();
            levels.reverse();
            for (li, level) in levels.iter().enumerate() {
                let below = if li + 1 < levels.len() {
                    levels[li + 1].clone()
                } else {
                    Rational::zero()
                };
                let class_mass = level - &below;
                if class_mass.is_zero() {
                    continue;
                }
                let members: Vec<usize> = (0..p).filter(|&a| v[w * p + a] == *level).collect();
                let share =
                    class_mass / Rational::from_integer((members.len() as i64).into());
                for a in members {
                    states.push(format!(
                        "({}|{}|{})",
                        instance.worlds[w].label(),
                        instance.primitive_names[a],
                        ray_label(k)
                    ));
                    state_world.push(w);
                    state_prim.push(a);
                    state_ray.push(k);
                    masses.push(share.clone());
                }
            }
        }
    }

    // Probability per ray, supported on its own states.
    let mut p_set = Vec::new();
    for k in 0..rays.len() {
        let mut map = BTreeMap::new();
        for (s, label) in states.iter().enumerate() {
            if state_ray[s] == k {
                map.insert(label.clone(), format_rational(&masses[s]));
            }
        }
        p_set.push(map);
    }

    // Single utility on outcomes: u(o) = c_o.
    let mut u_map = BTreeMap::new();
    for &o in outcome_indices {
        u_map.insert(
            instance.primitive_names[o].clone(),
            format_rational(&c_of[&o]),
        );
    }

    // Threshold choice interpretation: an act outside O pays off best
    // exactly at the states it weakly dominates.
    let mut choice_interp = BTreeMap::new();
    for (a, prim) in instance.primitive_names.iter().enumerate() {
        let mut per_state = BTreeMap::new();
        for (s, label) in states.iter().enumerate() {
            let chosen = if outcome_indices.contains(&a) {
                instance.primitive_names[a].clone()
            } else {
                let k = state_ray[s];
                let w = state_world[s];
                let threshold = &rays[k][w * p + state_prim[s]];
                if rays[k][w * p + a] >= *threshold {
                    instance.primitive_names[best].clone()
                } else {
                    instance.primitive_names[worst].clone()
                }
            };
            let mut dist = BTreeMap::new();
            dist.insert(chosen, "1".to_string());
            per_state.insert(label.clone(), dist);
        }
        choice_interp.insert(prim.clone(), per_state);
    }

    // Test interpretation by world component.
    let mut test_interp = BTreeMap::new();
    for (name, formula) in basis_test_formulas(instance) {
        let mut held = Vec::new();
        for (s, label) in states.iter().enumerate() {
            if instance.basis.eval(
                &formula,
                &instance.worlds[state_world[s]],
                &instance.test_names,
            )? {
                held.push(label.clone());
            }
        }
        test_interp.insert(name, held);
    }

    let v_pairs: Vec<(usize, usize)> = (0..rays.len()).map(|k| (0, k)).collect();
    Ok(Representation {
        states,
        outcomes: outcome_names,
        test_interp,
        choice_interp,
        p_set,
        u_set: vec![u_map],
        v_pairs,
        flags: Vec::new(),
    })
}

/// Total indifference: the zero utility over `O` with the uniform base
/// measure represents the (fully collapsed) order.
fn degenerate_objective(
    instance: &Instance,
    outcome_indices: &[usize],
    worst: usize,
) -> Result<Representation, RepresentError> {
    let base = uniform_base(instance)?;
    let states: Vec<String> = instance.worlds.iter().map(|w| format!("({w})")).collect();
    let outcome_names: Vec<String> = outcome_indices
        .iter()
        .map(|&o| instance.primitive_names[o].clone())
        .collect();
    let mut u_map = BTreeMap::new();
    for name in &outcome_names {
        u_map.insert(name.clone(), "0".to_string());
    }
    let mut choice_interp = BTreeMap::new();
    for (a, prim) in instance.primitive_names.iter().enumerate() {
        let target = if outcome_indices.contains(&a) {
            instance.primitive_names[a].clone()
        } else {
            instance.primitive_names[worst].clone()
        };
        let mut per_state = BTreeMap::new();
        for s in &states {
            let mut dist = BTreeMap::new();
            dist.insert(target.clone(), "1".to_string());
            per_state.insert(s.clone(), dist);
        }
        choice_interp.insert(prim.clone(), per_state);
    }
    Ok(Representation {
        test_interp: test_interp_by_world(instance, &states, |w| vec![w])?,
        p_set: vec![prob_map(&states, &base)],
        states,
        outcomes: outcome_names,
        choice_interp,
        u_set: vec![u_map],
        v_pairs: vec![(0, 0)],
        flags: vec!["degenerate".to_string()],
    })
}

// ---------------------------------------------------------------------------
// Verification
// ---------------------------------------------------------------------------

/// A representation resolved against an instance: indices instead of
/// labels, rationals instead of strings.
#[derive(Debug, Clone)]
pub struct ResolvedRepresentation {
    pub states: Vec<String>,
    pub outcomes: Vec<String>,
    /// Per basis-test slot, per-state membership.
    pub test_sets: Vec<Vec<bool>>,
    /// primitive -> state -> sparse distribution over outcome indices
    pub choice_interp: Vec<Vec<Vec<(usize, Rational)>>>,
    pub p_set: Vec<Vec<Rational>>,
    pub u_set: Vec<Vec<Rational>>,
    pub v_pairs: Vec<(usize, usize)>,
}

impl Representation {
    /// Validates well-formedness against an instance and produces the
    /// resolved form. Checks: label consistency, probability
    /// normalization, point-mass primitive interpretations, utility
    /// totality, `V` nonempty, and theory respect (every axiom holds
    /// at every state).
    pub fn resolve(&self, instance: &Instance) -> Result<ResolvedRepresentation, RepresentError> {
        let err = |m: String| RepresentError::Malformed(m);
        if self.states.is_empty() {
            return Err(err("no states".into()));
        }
        if self.outcomes.is_empty() {
            return Err(err("no outcomes".into()));
        }
        if self.v_pairs.is_empty() {
            return Err(err("V is empty".into()));
        }
        let state_index: BTreeMap<&str, usize> = self
            .states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), i))
            .collect();
        if state_index.len() != self.states.len() {
            return Err(err("duplicate state labels".into()));
        }
        let outcome_index: BTreeMap<&str, usize> = self
            .outcomes
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), i))
            .collect();

        let mut p_set = Vec::new();
        for map in &self.p_set {
            let mut v = vec![Rational::zero(); self.states.len()];
            for (label, value) in map {
                let idx = *state_index
                    .get(label.as_str())
                    .ok_or_else(|| err(format!("probability over unknown state {label:?}")))?;
                let r = parse_rational(value).map_err(|e| err(e.to_string()))?;
                if r.is_negative() {
                    return Err(err(format!("negative probability at {label:?}")));
                }
                v[idx] = r;
            }
            let total: Rational = v.iter().cloned().sum();
            if !total.is_one() {
                return Err(err(format!(
                    "probability vector sums to {}, not 1",
                    format_rational(&total)
                )));
            }
            p_set.push(v);
        }

        let mut u_set = Vec::new();
        for map in &self.u_set {
            let mut v = vec![Rational::zero(); self.outcomes.len()];
            let mut present = vec![false; self.outcomes.len()];
            for (label, value) in map {
                let idx = *outcome_index
                    .get(label.as_str())
                    .ok_or_else(|| err(format!("utility over unknown outcome {label:?}")))?;
                v[idx] = parse_rational(value).map_err(|e| err(e.to_string()))?;
                present[idx] = true;
            }
            if present.iter().any(|p| !p) {
                return Err(err("utility map does not cover every outcome".into()));
            }
            u_set.push(v);
        }

        for &(ui, pi) in &self.v_pairs {
            if ui >= u_set.len() || pi >= p_set.len() {
                return Err(err(format!("v_pairs entry ({ui},{pi}) out of range")));
            }
        }

        let mut choice_interp = Vec::new();
        for prim in &instance.primitive_names {
            let per_state_map = self
                .choice_interp
                .get(prim)
                .ok_or_else(|| err(format!("choice_interp missing primitive {prim:?}")))?;
            let mut per_state = Vec::with_capacity(self.states.len());
            for state in &self.states {
                let dist_map = per_state_map.get(state).ok_or_else(|| {
                    err(format!("primitive {prim:?} unmapped at state {state:?}"))
                })?;
                let mut dist = Vec::new();
                let mut total = Rational::zero();
                for (label, value) in dist_map {
                    let idx = *outcome_index
                        .get(label.as_str())
                        .ok_or_else(|| err(format!("unknown outcome {label:?}")))?;
                    let r = parse_rational(value).map_err(|e| err(e.to_string()))?;
                    if r.is_negative() {
                        return Err(err("negative outcome weight".into()));
                    }
                    if !r.is_zero() {
                        total += &r;
                        dist.push((idx, r));
                    }
                }
                if !total.is_one() {
                    return Err(err(format!(
                        "distribution for {prim:?} at {state:?} sums to {}",
                        format_rational(&total)
                    )));
                }
                if dist.len() != 1 {
                    return Err(err(format!(
                        "primitive {prim:?} must map to a single outcome at {state:?}"
                    )));
                }
                per_state.push(dist);
            }
            choice_interp.push(per_state);
        }

        let basis_tests = basis_test_formulas(instance);
        let mut test_sets = Vec::new();
        for (name, _) in &basis_tests {
            let labels = self
                .test_interp
                .get(name)
                .ok_or_else(|| err(format!("test_interp missing basis test {name:?}")))?;
            let mut set = vec![false; self.states.len()];
            for label in labels {
                let idx = *state_index
                    .get(label.as_str())
                    .ok_or_else(|| err(format!("test {name:?} over unknown state {label:?}")))?;
                set[idx] = true;
            }
            test_sets.push(set);
        }

        let resolved = ResolvedRepresentation {
            states: self.states.clone(),
            outcomes: self.outcomes.clone(),
            test_sets,
            choice_interp,
            p_set,
            u_set,
            v_pairs: self.v_pairs.clone(),
        };

        for axiom in instance.theory.axioms() {
            let held = resolved.interpret_test(instance, axiom)?;
            if held.iter().any(|h| !h) {
                return Err(err(format!(
                    "axiom {:?} does not hold at every state",
                    axiom.display(&instance.test_names)
                )));
            }
        }
        Ok(resolved)
    }
}

impl ResolvedRepresentation {
    /// Per-state truth of a test: standard interpretations recurse;
    /// nonstandard interpretations look the formula up in `T*`.
    pub fn interpret_test(
        &self,
        instance: &Instance,
        t: &TestFormula,
    ) -> Result<Vec<bool>, RepresentError> {
        match &instance.basis {
            Basis::Standard { .. } => self.interpret_standard(t),
            Basis::Nonstandard { members } => match members.iter().position(|m| m == t) {
                Some(i) => Ok(self.test_sets[i].clone()),
                None => Err(RepresentError::Logic(LogicError::TestOutsideBasis {
                    test: t.display(&instance.test_names),
                })),
            },
        }
    }

    fn interpret_standard(&self, t: &TestFormula) -> Result<Vec<bool>, RepresentError> {
        Ok(match t {
            TestFormula::Prim(i) => self.test_sets[*i].clone(),
            TestFormula::Not(inner) => {
                let s = self.interpret_standard(inner)?;
                s.into_iter().map(|b| !b).collect()
            }
            TestFormula::And(a, b) => {
                let sa = self.interpret_standard(a)?;
                let sb = self.interpret_standard(b)?;
                sa.into_iter().zip(sb).map(|(x, y)| x && y).collect()
            }
        })
    }

    /// The act's per-state distribution over outcomes, by structural
    /// recursion through conditionals and mixtures.
    pub fn interpret_choice(
        &self,
        instance: &Instance,
        program: &crate::choice::ChoiceProgram,
    ) -> Result<Vec<Vec<(usize, Rational)>>, RepresentError> {
        use crate::choice::ChoiceProgram as CP;
        match program {
            CP::Prim(a) => Ok(self.choice_interp[*a].clone()),
            CP::If {
                test,
                then_branch,
                else_branch,
            } => {
                let held = self.interpret_test(instance, test)?;
                let then_i = self.interpret_choice(instance, then_branch)?;
                let else_i = self.interpret_choice(instance, else_branch)?;
                Ok(held
                    .into_iter()
                    .enumerate()
                    .map(|(s, h)| if h { then_i[s].clone() } else { else_i[s].clone() })
                    .collect())
            }
            CP::Mix(arms) => {
                let mut acc: Vec<BTreeMap<usize, Rational>> =
                    vec![BTreeMap::new(); self.states.len()];
                for (weight, sub) in arms {
                    let sub_i = self.interpret_choice(instance, sub)?;
                    for (s, dist) in sub_i.into_iter().enumerate() {
                        for (o, w) in dist {
                            *acc[s].entry(o).or_insert_with(Rational::zero) += weight * &w;
                        }
                    }
                }
                Ok(acc
                    .into_iter()
                    .map(|m| m.into_iter().filter(|(_, w)| !w.is_zero()).collect())
                    .collect())
            }
        }
    }

    /// Expected utility of an interpreted act under `(u, p)`.
    pub fn expected_utility(
        &self,
        interp: &[Vec<(usize, Rational)>],
        u_idx: usize,
        p_idx: usize,
    ) -> Rational {
        let u = &self.u_set[u_idx];
        let p = &self.p_set[p_idx];
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
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyDiscrepancy {
    pub pair: [String; 2],
    /// True when the pair is in the closure but some (u,p) ranks it
    /// the other way; false when expected utility orders a pair the
    /// closure does not contain.
    pub closure_side: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyOutcome {
    pub verified: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub discrepancy: Option<VerifyDiscrepancy>,
}

/// Recomputes expected utilities exactly and checks the biconditional:
/// `(a,b)` in the closure iff every `(u,p)` in `V` weakly prefers `a`.
/// Reports the first discrepancy in name order.
pub fn verify_representation(
    rep: &Representation,
    instance: &Instance,
    cancel: &CancelToken,
) -> Result<VerifyOutcome, RepresentError> {
    let resolved = rep.resolve(instance)?;
    let closure_set = closure(instance, None, cancel)?.weak;

    let mut eus: Vec<Vec<Rational>> = Vec::with_capacity(instance.acts.len());
    for act in &instance.acts {
        let interp = resolved.interpret_choice(instance, &act.program)?;
        let values = resolved
            .v_pairs
            .iter()
            .map(|&(ui, pi)| resolved.expected_utility(&interp, ui, pi))
            .collect();
        eus.push(values);
    }

    let order = instance.name_order();
    for &i in &order {
        for &j in &order {
            if i == j {
                continue;
            }
            let in_closure = closure_set.contains(&(i, j));
            let eu_holds = eus[i].iter().zip(&eus[j]).all(|(a, b)| a >= b);
            if in_closure != eu_holds {
                return Ok(VerifyOutcome {
                    verified: false,
                    discrepancy: Some(VerifyDiscrepancy {
                        pair: [
                            instance.act_name(i).to_string(),
                            instance.act_name(j).to_string(),
                        ],
                        closure_side: in_closure,
                    }),
                });
            }
        }
    }
    Ok(VerifyOutcome {
        verified: true,
        discrepancy: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::axioms::tests::{build, rt_closure};
    use crate::geometry::CancelToken;
    use crate::rational::{rat, rint};

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

    fn act_eu(inst: &Instance, u: &QVec, name: &str) -> Rational {
        let i = inst.act_index(name).unwrap();
        dot(u, inst.vector(i))
    }

    #[test]
    fn state_dependent_contract_on_incomparable_pair() {
        let inst = ex3_incomparable();
        let sdr = represent_state_dependent(&inst, &never()).unwrap();
        assert!(sdr.utilities.len() >= 2);
        // at least one utility ranks a over b strictly, and one the reverse
        let some_up = sdr
            .utilities
            .iter()
            .any(|u| act_eu(&inst, u, "a") > act_eu(&inst, u, "b"));
        let some_down = sdr
            .utilities
            .iter()
            .any(|u| act_eu(&inst, u, "a") < act_eu(&inst, u, "b"));
        assert!(some_up && some_down);
        // contract: closure pair iff all utilities agree
        let n = inst.acts.len();
        for i in 0..n {
            for j in 0..n {
                let forced = inst.forced(i, j, &never()).unwrap();
                let all_agree = sdr
                    .utilities
                    .iter()
                    .all(|u| !dot(u, &inst.diff(i, j)).is_negative());
                assert_eq!(forced, all_agree);
            }
        }
    }

    #[test]
    fn all_indifferent_universe_gets_zero_utility() {
        let inst = build(
            &[],
            &[],
            &["a", "b"],
            &[],
            &[("a", "a"), ("b", "b"), ("a", "b"), ("b", "a")],
        );
        let sdr = represent_state_dependent(&inst, &never()).unwrap();
        for u in &sdr.utilities {
            for i in 0..inst.acts.len() {
                for j in 0..inst.acts.len() {
                    assert!(dot(u, &inst.diff(i, j)).is_zero());
                }
            }
        }
    }

    #[test]
    fn single_utility_orders_the_chain() {
        let inst = ex2_chain();
        let sdr = represent_single(&inst, &never()).unwrap();
        assert_eq!(sdr.utilities.len(), 1);
        let u = &sdr.utilities[0];
        let values: Vec<Rational> = ["a", "c_ab", "c_ba", "b"]
            .iter()
            .map(|n| act_eu(&inst, u, n))
            .collect();
        for w in values.windows(2) {
            assert!(w[0] > w[1], "chain must be strictly decreasing");
        }
        // canonical placement: min utility entry is 0, first gap 1
        assert!(u.iter().min().unwrap().is_zero());
        assert_eq!(&values[0] - &values[1], rint(1));
    }

    #[test]
    fn single_utility_requires_a1() {
        let inst = ex3_incomparable();
        match represent_single(&inst, &never()) {
            Err(RepresentError::PreconditionFailed { axiom, witness }) => {
                assert_eq!(axiom, "A1");
                assert_eq!(witness, Some(["a".into(), "b".into()]));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn single_utility_constant_on_indifferent_primitives() {
        let inst = build(
            &[],
            &[],
            &["a", "b"],
            &[],
            &[("a", "a"), ("b", "b"), ("a", "b"), ("b", "a")],
        );
        let sdr = represent_single(&inst, &never()).unwrap();
        let u = &sdr.utilities[0];
        assert_eq!(act_eu(&inst, u, "a"), act_eu(&inst, u, "b"));
    }

    // Independent oracle: exhaustive search over small integer utility
    // vectors for one representing a three-act strict chain.
    #[test]
    fn three_act_chain_matches_integer_grid_oracle() {
        let chain = ["a", "c", "b"];
        let pairs = rt_closure(&chain);
        let weak: Vec<(&str, &str)> =
            pairs.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
        let inst = build(&["t"], &[], &["a", "b"], &[("c", "if t then a else b")], &weak);

        // oracle: find any u in {-3..3}^4 with strictly decreasing EUs
        let mut oracle_hit = None;
        let dim = inst.dim();
        assert_eq!(dim, 4);
        'outer: for mask in 0..7_i64.pow(4) {
            let mut m = mask;
            let mut u = Vec::with_capacity(4);
            for _ in 0..4 {
                u.push(rint((m % 7) - 3));
                m /= 7;
            }
            let va = act_eu(&inst, &u, "a");
            let vc = act_eu(&inst, &u, "c");
            let vb = act_eu(&inst, &u, "b");
            if va > vc && vc > vb {
                oracle_hit = Some(u);
                break 'outer;
            }
        }
        let oracle_u = oracle_hit.expect("oracle must find a representing utility");
        // sanity: the oracle vector really orders the chain
        assert!(act_eu(&inst, &oracle_u, "a") > act_eu(&inst, &oracle_u, "c"));

        let sdr = represent_single(&inst, &never()).unwrap();
        let u = &sdr.utilities[0];
        assert!(act_eu(&inst, u, "a") > act_eu(&inst, u, "c"));
        assert!(act_eu(&inst, u, "c") > act_eu(&inst, u, "b"));
    }

    #[test]
    fn bootstrap_uniform_base_scales_utilities() {
        // v(world, a) = u(world, a) / base(world) = 4 u on 4 atoms
        let inst = build(
            &["t1", "t2"],
            &[],
            &["a", "b"],
            &[],
            &[("a", "a"), ("b", "b"), ("a", "b")],
        );
        assert_eq!(inst.worlds.len(), 4);
        let sdr = represent_state_dependent(&inst, &never()).unwrap();
        let base = uniform_base(&inst).unwrap();
        let rep = bootstrap_seu(&sdr, &inst, &base, BootstrapShape::MultiUtility).unwrap();
        for (k, u) in sdr.utilities.iter().enumerate() {
            for (w, world) in inst.worlds.iter().enumerate() {
                for (a, prim) in inst.primitive_names.iter().enumerate() {
                    let label = format!("({}|{})", world.label(), prim);
                    let got = parse_rational(&rep.u_set[k][&label]).unwrap();
                    assert_eq!(got, &u[w * 2 + a] * rint(4));
                }
            }
        }
    }

    #[test]
    fn bootstrap_shapes_reverify() {
        for inst in [ex2_chain(), ex3_incomparable()] {
            let sdr = represent_state_dependent(&inst, &never()).unwrap();
            let base = uniform_base(&inst).unwrap();
            for shape in [BootstrapShape::MultiUtility, BootstrapShape::SingleUtility] {
                let rep = bootstrap_seu(&sdr, &inst, &base, shape).unwrap();
                let outcome = verify_representation(&rep, &inst, &never()).unwrap();
                assert!(outcome.verified, "shape {shape:?} failed: {outcome:?}");
            }
        }
    }

    #[test]
    fn a1_case_yields_singleton_v() {
        let inst = ex2_chain();
        let sdr = represent_single(&inst, &never()).unwrap();
        let base = uniform_base(&inst).unwrap();
        let rep = bootstrap_seu(&sdr, &inst, &base, BootstrapShape::SingleUtility).unwrap();
        assert_eq!(rep.v_pairs.len(), 1);
        assert_eq!(rep.p_set.len(), 1);
        assert_eq!(rep.u_set.len(), 1);
        assert!(verify_representation(&rep, &inst, &never()).unwrap().verified);
    }

    #[test]
    fn incomparable_pair_needs_multiple_singular_measures() {
        let inst = ex3_incomparable();
        let sdr = represent_state_dependent(&inst, &never()).unwrap();
        let base = uniform_base(&inst).unwrap();
        let rep = bootstrap_seu(&sdr, &inst, &base, BootstrapShape::SingleUtility).unwrap();
        assert!(rep.p_set.len() >= 2);
        // mutually singular: distinct measures share no support
        for (i, pi) in rep.p_set.iter().enumerate() {
            for pj in rep.p_set.iter().skip(i + 1) {
                assert!(pi.keys().all(|s| !pj.contains_key(s)));
            }
        }
    }

    fn paper_two_state_rep(p_t: Rational) -> Representation {
        let mut test_interp = BTreeMap::new();
        test_interp.insert("t".to_string(), vec!["st".to_string()]);
        let mut choice_interp = BTreeMap::new();
        for (prim, outcome) in [("a", "o1"), ("b", "o0")] {
            let mut per_state = BTreeMap::new();
            for state in ["st", "snt"] {
                let mut dist = BTreeMap::new();
                dist.insert(outcome.to_string(), "1".to_string());
                per_state.insert(state.to_string(), dist);
            }
            choice_interp.insert(prim.to_string(), per_state);
        }
        let mut p = BTreeMap::new();
        p.insert("st".to_string(), format_rational(&p_t));
        p.insert("snt".to_string(), format_rational(&(rint(1) - &p_t)));
        let mut u = BTreeMap::new();
        u.insert("o1".to_string(), "1".to_string());
        u.insert("o0".to_string(), "0".to_string());
        Representation {
            states: vec!["st".to_string(), "snt".to_string()],
            outcomes: vec!["o1".to_string(), "o0".to_string()],
            test_interp,
            choice_interp,
            p_set: vec![p],
            u_set: vec![u],
            v_pairs: vec![(0, 0)],
            flags: vec![],
        }
    }

    #[test]
    fn paper_encoding_verifies_iff_t_more_likely() {
        let inst = ex2_chain();
        let good = paper_two_state_rep(rat(3, 5));
        assert!(verify_representation(&good, &inst, &never()).unwrap().verified);

        let bad = paper_two_state_rep(rat(2, 5));
        let outcome = verify_representation(&bad, &inst, &never()).unwrap();
        assert!(!outcome.verified);
        let disc = outcome.discrepancy.unwrap();
        assert_eq!(disc.pair, ["c_ab".to_string(), "c_ba".to_string()]);
        assert!(disc.closure_side);
    }

    #[test]
    fn malformed_reps_are_rejected() {
        let inst = ex2_chain();
        // non-normalized probability
        let mut rep = paper_two_state_rep(rat(3, 5));
        rep.p_set[0].insert("st".to_string(), "1".to_string());
        assert!(matches!(
            verify_representation(&rep, &inst, &never()),
            Err(RepresentError::Malformed(_))
        ));
        // missing primitive interpretation
        let mut rep = paper_two_state_rep(rat(3, 5));
        rep.choice_interp.remove("b");
        assert!(matches!(
            verify_representation(&rep, &inst, &never()),
            Err(RepresentError::Malformed(_))
        ));
        // empty V
        let mut rep = paper_two_state_rep(rat(3, 5));
        rep.v_pairs.clear();
        assert!(matches!(
            verify_representation(&rep, &inst, &never()),
            Err(RepresentError::Malformed(_))
        ));
    }

    #[test]
    fn rep_respects_theory_check() {
        // axiom t, but the rep maps t to a proper subset of states
        let inst = build(
            &["t"],
            &["t"],
            &["a", "b"],
            &[],
            &[("a", "a"), ("b", "b"), ("a", "b")],
        );
        assert_eq!(inst.worlds.len(), 1);
        let mut rep = paper_two_state_rep(rat(3, 5));
        rep.test_interp.insert("t".to_string(), vec!["st".to_string()]);
        assert!(matches!(
            verify_representation(&rep, &inst, &never()),
            Err(RepresentError::Malformed(_))
        ));
    }

    #[test]
    fn affine_rescaling_keeps_verdict() {
        let inst = ex2_chain();
        let sdr = represent_single(&inst, &never()).unwrap();
        let base = uniform_base(&inst).unwrap();
        let rep = bootstrap_seu(&sdr, &inst, &base, BootstrapShape::SingleUtility).unwrap();
        assert!(verify_representation(&rep, &inst, &never()).unwrap().verified);
        // alpha u + beta with alpha = 3/2, beta = -7
        let mut scaled = rep.clone();
        for map in scaled.u_set.iter_mut() {
            for v in map.values_mut() {
                let r = parse_rational(v).unwrap();
                *v = format_rational(&(r * rat(3, 2) - rint(7)));
            }
        }
        assert!(verify_representation(&scaled, &inst, &never()).unwrap().verified);
    }

    fn ex5_google() -> Instance {
        let chain = ["o1", "g", "o0"];
        let pairs = rt_closure(&chain);
        let weak: Vec<(&str, &str)> =
            pairs.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
        build(&[], &[], &["o0", "o1", "g"], &[], &weak)
    }

    #[test]
    fn google_instance_objective_representation() {
        let inst = ex5_google();
        let rep = represent_objective(&inst, &[0, 1], &never()).unwrap();
        // two states per (single) atom, probability 1/2 each
        assert_eq!(rep.states.len(), 2);
        assert_eq!(rep.p_set.len(), 1);
        for v in rep.p_set[0].values() {
            assert_eq!(v, "1/2");
        }
        // g maps to o1 at one state and o0 at the other
        let g_map = &rep.choice_interp["g"];
        let images: Vec<&String> = rep
            .states
            .iter()
            .map(|s| g_map[s].keys().next().unwrap())
            .collect();
        assert!(images.contains(&&"o1".to_string()));
        assert!(images.contains(&&"o0".to_string()));
        // outcomes are exactly O with u(o1) = 1, u(o0) = 0
        assert_eq!(rep.outcomes, vec!["o0".to_string(), "o1".to_string()]);
        assert_eq!(rep.u_set[0]["o1"], "1");
        assert_eq!(rep.u_set[0]["o0"], "0");
        assert!(verify_representation(&rep, &inst, &never()).unwrap().verified);
    }

    #[test]
    fn calibration_weights_for_full_outcome_chain() {
        // O = all primitives, complete chain: c_{o1} = 1, c_{o0} = 0,
        // and the middle act sits at 1/2 under the canonical utility.
        let inst = ex5_google();
        let rep = represent_objective(&inst, &[0, 1, 2], &never()).unwrap();
        assert_eq!(rep.u_set[0]["o1"], "1");
        assert_eq!(rep.u_set[0]["o0"], "0");
        assert_eq!(rep.u_set[0]["g"], "1/2");
        assert!(verify_representation(&rep, &inst, &never()).unwrap().verified);
    }

    /// The single-utility-impossible instance: o ~ a1, o1 > o0, with
    /// the contingent monotonicity embeddings declared; a1 and a2 stay
    /// incomparable, and rays disagree on the calibration of o.
    pub(crate) fn ex4_instance() -> Instance {
        let seed = build(
            &["t"],
            &[],
            &["o0", "o1", "o"],
            &[
                ("a1", "if t then o0 else o1"),
                ("a2", "if t then o1 else o0"),
                ("e_t_o", "if t then o else o0"),
                ("e_nt_o", "if t then o0 else o"),
            ],
            &[
                // generators; the closure below completes them
                ("o", "a1"),
                ("a1", "o"),
                ("o1", "o0"),
                ("o1", "o"),
                ("o", "o0"),
                ("o1", "a1"),
                ("o1", "a2"),
                ("a1", "o0"),
                ("a2", "o0"),
                // contingent monotonicity at t and !t
                ("a2", "e_t_o"),
                ("e_t_o", "o0"),
                ("a1", "e_nt_o"),
                ("e_nt_o", "o0"),
                ("o1", "e_t_o"),
                ("o1", "e_nt_o"),
            ],
        );
        // close the seed and rebuild so the declared data equals its
        // own closure (cancellation then holds by construction)
        let closed = crate::axioms::closure(&seed, None, &CancelToken::default()).unwrap();
        Instance::new(
            seed.test_names.clone(),
            seed.primitive_names.clone(),
            seed.basis.clone(),
            seed.theory.clone(),
            seed.worlds.clone(),
            seed.acts.clone(),
            closed.weak,
        )
    }

    #[test]
    fn ex4_objective_calibration_straddles_half() {
        let inst = ex4_instance();
        // sanity: closed data passes cancellation, a1/a2 incomparable
        let cancel = never();
        assert!(
            crate::axioms::check_cancellation(&inst, crate::axioms::Language::Pure, &cancel)
                .unwrap()
                .holds
        );
        let a1 = inst.act_index("a1").unwrap();
        let a2 = inst.act_index("a2").unwrap();
        assert!(!inst.forced(a1, a2, &cancel).unwrap());
        assert!(!inst.forced(a2, a1, &cancel).unwrap());

        match represent_objective(&inst, &[0, 1, 2], &cancel) {
            Err(RepresentError::CalibrationInconsistency {
                outcome,
                c_low,
                c_high,
                ..
            }) => {
                assert_eq!(outcome, "o");
                let lo = parse_rational(&c_low).unwrap();
                let hi = parse_rational(&c_high).unwrap();
                assert!(lo < rat(1, 2), "low ray implies c < 1/2, got {c_low}");
                assert!(hi > rat(1, 2), "high ray implies c > 1/2, got {c_high}");
            }
            other => panic!("expected calibration inconsistency, got {other:?}"),
        }
    }

    #[test]
    fn degenerate_objective_is_flagged_and_verifies() {
        let all = ["a", "b"];
        let mut weak: Vec<(&str, &str)> = Vec::new();
        for x in all {
            for y in all {
                weak.push((x, y));
            }
        }
        let inst = build(&[], &[], &["a", "b"], &[], &weak);
        let rep = represent_objective(&inst, &[0, 1], &never()).unwrap();
        assert!(rep.flags.contains(&"degenerate".to_string()));
        assert!(verify_representation(&rep, &inst, &never()).unwrap().verified);
    }

    #[test]
    fn inconsistent_theory_is_an_error() {
        let inst = build(&["t"], &["t & !t"], &["a"], &[], &[("a", "a")]);
        assert!(matches!(
            uniform_base(&inst),
            Err(RepresentError::InconsistentTheory)
        ));
        assert!(matches!(
            represent_objective(&inst, &[0], &never()),
            Err(RepresentError::InconsistentTheory)
        ));
    }
}
