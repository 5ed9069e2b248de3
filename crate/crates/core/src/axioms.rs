//! Decision procedures for the preference axioms.
//!
//! The declared data is a finite universe of named choice programs
//! plus a set of ordered weak-preference pairs. The primary decider
//! for the cancellation family is the cone characterization: the
//! declared relation satisfies cancellation exactly when every
//! difference vector `f_a - f_b` that lies in the cone generated by
//! the declared pairs' differences is itself a declared pair. A
//! bounded brute-force sequence enumerator is kept alongside as an
//! independent cross-validation oracle.
//!
//! Completeness (A1) is reported but optional: partial preference
//! relations are first-class citizens here. Closure of the graph (A3)
//! is structural — the induced order is defined through a finitely
//! generated, hence closed, cone — so there is nothing to decide at
//! this scale.

use crate::choice::{ChoiceProgram, ChoiceTable};
use crate::geometry::{dot, is_zero_vec, neg, CancelToken, ConeModel, GeomError, QVec};
use crate::logic::{Basis, LogicError, TestFormula, Theory, World};
use crate::rational::{format_rational, Rational};
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use std::collections::BTreeSet;
use std::sync::OnceLock;

/// A named act in the universe `C`.
#[derive(Debug, Clone)]
pub struct Act {
    pub name: String,
    pub program: ChoiceProgram,
    pub table: ChoiceTable,
}

/// Which choice language the data lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Language {
    /// `A`: conditionals only; every table row is a point mass.
    #[serde(rename = "A")]
    Pure,
    /// `A+`: conditionals plus rational mixtures.
    #[serde(rename = "A+")]
    Mixture,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AxiomsError {
    #[error("language mismatch: mixtures present but language A requested")]
    LanguageMismatch,
    #[error("outcome set is empty")]
    EmptyOutcomes,
    #[error("brute-force guard exceeded: |C| = {acts} (max 10), L = {bound} (max 4)")]
    BruteGuardExceeded { acts: usize, bound: u32 },
    #[error("unknown act {0:?}")]
    UnknownAct(String),
    #[error(transparent)]
    Geometry(#[from] GeomError),
    #[error(transparent)]
    Logic(#[from] LogicError),
}

/// A compiled decision problem: worlds, act tables, declared pairs,
/// and the cone over difference vectors. Immutable once built; all
/// operations are pure.
#[derive(Debug)]
pub struct Instance {
    pub test_names: Vec<String>,
    pub primitive_names: Vec<String>,
    pub basis: Basis,
    pub theory: Theory,
    pub worlds: Vec<World>,
    pub acts: Vec<Act>,
    /// Declared weak pairs over act indices.
    pub weak: BTreeSet<(usize, usize)>,
    vectors: Vec<QVec>,
    /// Declared pairs sorted by name, aligned with cone generators.
    declared_order: Vec<(usize, usize)>,
    cone: OnceLock<ConeModel>,
}

impl Instance {
    pub fn new(
        test_names: Vec<String>,
        primitive_names: Vec<String>,
        basis: Basis,
        theory: Theory,
        worlds: Vec<World>,
        acts: Vec<Act>,
        weak: BTreeSet<(usize, usize)>,
    ) -> Instance {
        let vectors: Vec<QVec> = acts.iter().map(|a| a.table.as_vector()).collect();
        let mut declared_order: Vec<(usize, usize)> = weak.iter().copied().collect();
        declared_order.sort_by(|x, y| {
            let kx = (&acts[x.0].name, &acts[x.1].name);
            let ky = (&acts[y.0].name, &acts[y.1].name);
            kx.cmp(&ky)
        });
        Instance {
            test_names,
            primitive_names,
            basis,
            theory,
            worlds,
            acts,
            weak,
            vectors,
            declared_order,
            cone: OnceLock::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.worlds.len() * self.primitive_names.len()
    }

    pub fn act_index(&self, name: &str) -> Result<usize, AxiomsError> {
        self.acts
            .iter()
            .position(|a| a.name == name)
            .ok_or_else(|| AxiomsError::UnknownAct(name.to_string()))
    }

    pub fn act_name(&self, i: usize) -> &str {
        &self.acts[i].name
    }

    /// The semantic vector of an act in the shared layout.
    pub fn vector(&self, i: usize) -> &QVec {
        &self.vectors[i]
    }

    /// `f_a - f_b`.
    pub fn diff(&self, a: usize, b: usize) -> QVec {
        crate::geometry::sub(&self.vectors[a], &self.vectors[b])
    }

    /// Declared pairs in reporting order (sorted by act names), which
    /// is also the cone generator order.
    pub fn declared_pairs(&self) -> &[(usize, usize)] {
        &self.declared_order
    }

    /// The cone generated by the declared pairs' difference vectors.
    pub fn cone(&self) -> &ConeModel {
        self.cone.get_or_init(|| {
            let gens: Vec<QVec> = self
                .declared_order
                .iter()
                .map(|&(a, b)| self.diff(a, b))
                .collect();
            ConeModel::new(self.dim(), gens)
        })
    }

    /// Membership of the ordered pair in the cone closure.
    pub fn forced(&self, a: usize, b: usize, cancel: &CancelToken) -> Result<bool, AxiomsError> {
        Ok(self.cone().member(&self.diff(a, b), cancel)?.is_some())
    }

    /// Act indices sorted by name; pair reports iterate in this order.
    pub fn name_order(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.acts.len()).collect();
        idx.sort_by(|&i, &j| self.acts[i].name.cmp(&self.acts[j].name));
        idx
    }

    /// Zeroes `v` outside the blocks of worlds satisfying `keep`.
    pub fn restrict(&self, v: &[Rational], keep: &[bool]) -> QVec {
        let p = self.primitive_names.len();
        let mut out = vec![Rational::zero(); v.len()];
        for (w, &k) in keep.iter().enumerate() {
            if k {
                out[w * p..(w + 1) * p].clone_from_slice(&v[w * p..(w + 1) * p]);
            }
        }
        out
    }

    /// Which consistent worlds entail `t`.
    pub fn worlds_entailing(&self, t: &TestFormula) -> Result<Vec<bool>, AxiomsError> {
        let mut keep = Vec::with_capacity(self.worlds.len());
        for w in &self.worlds {
            keep.push(self.basis.eval(t, w, &self.test_names)?);
        }
        Ok(keep)
    }

    /// Point mass at `(world, x)` minus point mass at `(world, y)`.
    pub fn elementary(&self, world: usize, x: usize, y: usize) -> QVec {
        let p = self.primitive_names.len();
        let mut v = vec![Rational::zero(); self.dim()];
        v[world * p + x] = Rational::one();
        v[world * p + y] -= Rational::one();
        v
    }

    /// The language of the declared universe.
    pub fn language(&self) -> Language {
        if self.acts.iter().all(|a| a.program.is_pure()) {
            Language::Pure
        } else {
            Language::Mixture
        }
    }

    fn pair_names(&self, pair: (usize, usize)) -> [String; 2] {
        [
            self.acts[pair.0].name.clone(),
            self.acts[pair.1].name.clone(),
        ]
    }
}

// ---------------------------------------------------------------------------
// A1 — completeness
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct A1Report {
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<[String; 2]>,
}

/// Completeness of the induced order: every ordered pair comparable in
/// the cone closure. Witness is the first incomparable pair in name
/// order.
pub fn check_a1(instance: &Instance, cancel: &CancelToken) -> Result<A1Report, AxiomsError> {
    let order = instance.name_order();
    for (pos, &i) in order.iter().enumerate() {
        for &j in &order[pos + 1..] {
            if !instance.forced(i, j, cancel)? && !instance.forced(j, i, cancel)? {
                return Ok(A1Report {
                    holds: false,
                    witness: Some(instance.pair_names((i, j))),
                });
            }
        }
    }
    Ok(A1Report { holds: true, witness: None })
}

// ---------------------------------------------------------------------------
// Cancellation — cone decider
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct CoefficientEntry {
    pub premise: [String; 2],
    pub value: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct CancellationWitness {
    /// The forced-but-undeclared pair `(a, b)`.
    pub pair: [String; 2],
    /// Nonnegative rational certificate over declared pairs with
    /// `sum coeff_i (f_ci - f_di) = f_a - f_b`.
    pub coefficients: Vec<CoefficientEntry>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CancellationReport {
    pub language: Language,
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<CancellationWitness>,
}

/// Decides the cancellation axiom for the declared relation.
///
/// The relation satisfies it iff every cone-forced ordered pair is
/// declared. On failure the witness carries the minimal-mass exact
/// certificate (phase-2 simplex minimizing the coefficient sum, so
/// reported coefficients are deterministic and small).
pub fn check_cancellation(
    instance: &Instance,
    language: Language,
    cancel: &CancelToken,
) -> Result<CancellationReport, AxiomsError> {
    if language == Language::Pure && instance.language() == Language::Mixture {
        return Err(AxiomsError::LanguageMismatch);
    }
    let order = instance.name_order();
    for &i in &order {
        for &j in &order {
            if instance.weak.contains(&(i, j)) {
                continue;
            }
            let d = instance.diff(i, j);
            if instance.cone().member(&d, cancel)?.is_some() {
                // Re-solve minimizing total mass for a canonical witness.
                let coeffs = instance
                    .cone()
                    .member_minimizing(&d, cancel)?
                    .expect("membership already established");
                let coefficients = instance
                    .declared_pairs()
                    .iter()
                    .zip(&coeffs)
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(&pair, c)| CoefficientEntry {
                        premise: instance.pair_names(pair),
                        value: format_rational(c),
                    })
                    .collect();
                return Ok(CancellationReport {
                    language,
                    holds: false,
                    witness: Some(CancellationWitness {
                        pair: instance.pair_names((i, j)),
                        coefficients,
                    }),
                });
            }
        }
    }
    Ok(CancellationReport { language, holds: true, witness: None })
}

// ---------------------------------------------------------------------------
// Cancellation — brute-force oracle
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct SequenceWitness {
    /// The conclusion pair `(a, b)` the axiom forces but the data lacks.
    pub pair: [String; 2],
    /// Premise pairs with integer multiplicities.
    pub premises: Vec<(String, String, u32)>,
    /// Multiplicity of the conclusion tail.
    pub conclusion_multiplicity: u32,
}

#[derive(Debug, Clone, Serialize)]
pub struct BruteForceReport {
    pub bound: u32,
    pub holds_within_bound: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<SequenceWitness>,
}

/// Literal sequence-based cancellation check, bounded by a maximum
/// per-pair multiplicity `L`. Independent of the cone machinery:
/// searches integer certificates by depth-first enumeration and
/// re-verifies any hit by per-world multiset comparison. Guarded to
/// desk scale (`|C| <= 8`, `L <= 4`).
pub fn brute_force_cancellation(
    instance: &Instance,
    bound: u32,
) -> Result<BruteForceReport, AxiomsError> {
    if instance.acts.len() > 10 || bound > 4 || bound == 0 {
        return Err(AxiomsError::BruteGuardExceeded {
            acts: instance.acts.len(),
            bound,
        });
    }
    // Distinct nonzero premise differences with merged budgets.
    let mut diff_groups: Vec<(QVec, Vec<(usize, usize)>)> = Vec::new();
    for &(a, b) in instance.declared_pairs() {
        let d = instance.diff(a, b);
        if is_zero_vec(&d) {
            continue;
        }
        match diff_groups.iter_mut().find(|(v, _)| *v == d) {
            Some((_, pairs)) => pairs.push((a, b)),
            None => diff_groups.push((d, vec![(a, b)])),
        }
    }
    let budgets: Vec<u64> = diff_groups
        .iter()
        .map(|(_, pairs)| bound as u64 * pairs.len() as u64)
        .collect();

    let order = instance.name_order();
    for &a in &order {
        for &b in &order {
            if instance.weak.contains(&(a, b)) {
                continue;
            }
            let d = instance.diff(a, b);
            for m in 1..=bound {
                let target: QVec = d.iter().map(|x| x * Rational::from_integer(m.into())).collect();
                if let Some(mults) = search_certificate(&diff_groups, &budgets, &target) {
                    let witness = build_witness(instance, &diff_groups, &mults, (a, b), m, bound);
                    verify_multisets(instance, &witness);
                    return Ok(BruteForceReport {
                        bound,
                        holds_within_bound: false,
                        witness: Some(witness),
                    });
                }
            }
        }
    }
    Ok(BruteForceReport { bound, holds_within_bound: true, witness: None })
}

/// DFS over per-group multiplicities with suffix min/max pruning.
fn search_certificate(
    groups: &[(QVec, Vec<(usize, usize)>)],
    budgets: &[u64],
    target: &QVec,
) -> Option<Vec<u64>> {
    let dim = target.len();
    let k = groups.len();
    // suffix_min[i][c] / suffix_max[i][c]: extreme achievable sums
    // using groups i.. at full budgets.
    let mut suffix_min = vec![vec![Rational::zero(); dim]; k + 1];
    let mut suffix_max = vec![vec![Rational::zero(); dim]; k + 1];
    for i in (0..k).rev() {
        for c in 0..dim {
            let contrib = &groups[i].0[c] * Rational::from_integer(budgets[i].into());
            let (lo, hi) = if contrib.is_negative() {
                (contrib.clone(), Rational::zero())
            } else {
                (Rational::zero(), contrib.clone())
            };
            suffix_min[i][c] = &suffix_min[i + 1][c] + lo;
            suffix_max[i][c] = &suffix_max[i + 1][c] + hi;
        }
    }
    let mut mults = vec![0u64; k];
    let mut remaining = target.clone();
    if dfs(groups, budgets, &suffix_min, &suffix_max, 0, &mut remaining, &mut mults) {
        Some(mults)
    } else {
        None
    }
}

fn dfs(
    groups: &[(QVec, Vec<(usize, usize)>)],
    budgets: &[u64],
    suffix_min: &[Vec<Rational>],
    suffix_max: &[Vec<Rational>],
    i: usize,
    remaining: &mut QVec,
    mults: &mut Vec<u64>,
) -> bool {
    if remaining.iter().all(Rational::is_zero) {
        for m in mults.iter_mut().skip(i) {
            *m = 0;
        }
        return true;
    }
    if i == groups.len() {
        return false;
    }
    for c in 0..remaining.len() {
        if remaining[c] < suffix_min[i][c] || remaining[c] > suffix_max[i][c] {
            return false;
        }
    }
    let g = &groups[i].0;
    for count in 0..=budgets[i] {
        if count > 0 {
            for (r, x) in remaining.iter_mut().zip(g) {
                *r -= x;
            }
        }
        mults[i] = count;
        if dfs(groups, budgets, suffix_min, suffix_max, i + 1, remaining, mults) {
            return true;
        }
    }
    // restore
    for (r, x) in remaining.iter_mut().zip(g) {
        *r += x * Rational::from_integer(budgets[i].into());
    }
    mults[i] = 0;
    false
}

fn build_witness(
    instance: &Instance,
    groups: &[(QVec, Vec<(usize, usize)>)],
    mults: &[u64],
    conclusion: (usize, usize),
    m: u32,
    bound: u32,
) -> SequenceWitness {
    let mut premises = Vec::new();
    for ((_, pairs), &count) in groups.iter().zip(mults) {
        // Split the merged multiplicity back over the sharing pairs,
        // each at most `bound`.
        let mut left = count;
        for &(x, y) in pairs {
            if left == 0 {
                break;
            }
            let take = left.min(bound as u64);
            premises.push((
                instance.acts[x].name.clone(),
                instance.acts[y].name.clone(),
                take as u32,
            ));
            left -= take;
        }
    }
    SequenceWitness {
        pair: instance.pair_names(conclusion),
        premises,
        conclusion_multiplicity: m,
    }
}

/// Re-verifies a witness by the literal per-world multiset statement:
/// premises' left sides plus `m` copies of `b` match premises' right
/// sides plus `m` copies of `a`, coordinate by coordinate.
fn verify_multisets(instance: &Instance, witness: &SequenceWitness) {
    let dim = instance.dim();
    let mut lhs = vec![Rational::zero(); dim];
    let mut rhs = vec![Rational::zero(); dim];
    let add = |acc: &mut QVec, name: &str, times: u32| {
        let idx = instance.act_index(name).expect("witness act");
        for (x, v) in acc.iter_mut().zip(instance.vector(idx)) {
            *x += v * Rational::from_integer(times.into());
        }
    };
    for (l, r, times) in &witness.premises {
        add(&mut lhs, l, *times);
        add(&mut rhs, r, *times);
    }
    add(&mut lhs, &witness.pair[1], witness.conclusion_multiplicity);
    add(&mut rhs, &witness.pair[0], witness.conclusion_multiplicity);
    assert_eq!(lhs, rhs, "witness multisets must match per world");
}

// ---------------------------------------------------------------------------
// Closure
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct ClosureResult {
    /// The smallest cancellation-closed relation containing the data.
    pub weak: BTreeSet<(usize, usize)>,
    /// Every ordered pair is mutually weakly preferred.
    pub full_collapse: bool,
    /// Declared-strict pairs whose reverse the closure forces.
    pub forced_indifference: Vec<(usize, usize)>,
}

/// The closure `{(c,d) : f_c - f_d in cone(D+ (+ extra))}` — the
/// smallest preference order containing the declared pairs (and the
/// optional extra pair) that satisfies cancellation.
pub fn closure(
    instance: &Instance,
    extra: Option<(usize, usize)>,
    cancel: &CancelToken,
) -> Result<ClosureResult, AxiomsError> {
    let owned_cone;
    let cone: &ConeModel = match extra {
        None => instance.cone(),
        Some((a, b)) => {
            let mut gens: Vec<QVec> = instance
                .declared_pairs()
                .iter()
                .map(|&(x, y)| instance.diff(x, y))
                .collect();
            gens.push(instance.diff(a, b));
            owned_cone = ConeModel::new(instance.dim(), gens);
            &owned_cone
        }
    };
    let n = instance.acts.len();
    let mut weak = BTreeSet::new();
    for i in 0..n {
        for j in 0..n {
            if cone.member(&instance.diff(i, j), cancel)?.is_some() {
                weak.insert((i, j));
            }
        }
    }
    let full_collapse = weak.len() == n * n;
    let mut forced_indifference = Vec::new();
    for &(a, b) in instance.declared_pairs() {
        if a != b
            && !instance.weak.contains(&(b, a))
            && weak.contains(&(a, b))
            && weak.contains(&(b, a))
            && !forced_indifference.contains(&(a, b))
        {
            forced_indifference.push((a, b));
        }
    }
    Ok(ClosureResult { weak, full_collapse, forced_indifference })
}

// ---------------------------------------------------------------------------
// Contingent preference and null tests
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ContingentClass {
    /// `a >_t b`: forward forced, reverse not.
    Strict,
    /// Both directions forced.
    Indifferent,
    /// `b >_t a`.
    ReverseStrict,
    /// Neither direction forced.
    Incomparable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ContingentComparison {
    /// `a >=_t b` holds in the closure.
    pub forward: bool,
    /// `b >=_t a` holds in the closure.
    pub reverse: bool,
}

impl ContingentComparison {
    pub fn classification(&self) -> ContingentClass {
        match (self.forward, self.reverse) {
            (true, true) => ContingentClass::Indifferent,
            (true, false) => ContingentClass::Strict,
            (false, true) => ContingentClass::ReverseStrict,
            (false, false) => ContingentClass::Incomparable,
        }
    }
}

/// Test-contingent comparison `a ?_t b`, computed on the difference
/// vector zeroed outside worlds entailing `t`. Well-defined without
/// picking an else-branch: conditioning with any common else-branch
/// produces exactly this restricted difference.
pub fn contingent_compare(
    instance: &Instance,
    a: usize,
    b: usize,
    t: &TestFormula,
    cancel: &CancelToken,
) -> Result<ContingentComparison, AxiomsError> {
    let keep = instance.worlds_entailing(t)?;
    let d = instance.restrict(&instance.diff(a, b), &keep);
    let forward = instance.cone().member(&d, cancel)?.is_some();
    let reverse = instance.cone().member(&neg(&d), cancel)?.is_some();
    Ok(ContingentComparison { forward, reverse })
}

/// Restricted comparison over an explicit world mask.
pub fn contingent_compare_worlds(
    instance: &Instance,
    a: usize,
    b: usize,
    keep: &[bool],
    cancel: &CancelToken,
) -> Result<ContingentComparison, AxiomsError> {
    let d = instance.restrict(&instance.diff(a, b), keep);
    let forward = instance.cone().member(&d, cancel)?.is_some();
    let reverse = instance.cone().member(&neg(&d), cancel)?.is_some();
    Ok(ContingentComparison { forward, reverse })
}

/// A test is null when choices differing only where it holds are all
/// indifferent: every per-world elementary difference between declared
/// primitives, at every consistent world entailing the test, lies in
/// the cone's lineality. Per-world elementary differences are exactly
/// realizable as atom-guarded conditionals with a shared else-branch,
/// which is why this matches the definition's quantifier over all
/// acts.
pub fn null_test(
    instance: &Instance,
    t: &TestFormula,
    cancel: &CancelToken,
) -> Result<bool, AxiomsError> {
    let keep = instance.worlds_entailing(t)?;
    null_on_worlds(instance, &keep, cancel)
}

fn null_on_worlds(
    instance: &Instance,
    keep: &[bool],
    cancel: &CancelToken,
) -> Result<bool, AxiomsError> {
    let p = instance.primitive_names.len();
    for (w, &k) in keep.iter().enumerate() {
        if !k {
            continue;
        }
        for x in 0..p {
            for y in (x + 1)..p {
                let e = instance.elementary(w, x, y);
                if !instance.cone().in_lineality(&e, cancel)? {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Per-world nullity flags (a world is null when its elementary
/// differences all sit in the lineality).
pub fn null_worlds(instance: &Instance, cancel: &CancelToken) -> Result<Vec<bool>, AxiomsError> {
    let mut out = Vec::with_capacity(instance.worlds.len());
    for w in 0..instance.worlds.len() {
        let mut keep = vec![false; instance.worlds.len()];
        keep[w] = true;
        out.push(null_on_worlds(instance, &keep, cancel)?);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Objective-outcome axioms: A4, A5+, A6
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct A4Report {
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub best: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct A5Witness {
    /// The two outcome mixtures, as `weight*name` sums.
    pub left: String,
    pub right: String,
    /// World labels of the non-null test where contingent and global
    /// verdicts disagree.
    pub test_worlds: Vec<String>,
    pub global_holds: bool,
    pub contingent_holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct A5Report {
    pub holds_up_to_bound: bool,
    pub denominator_bound: u32,
    /// True when the non-null-test sweep had to stop at singleton
    /// atoms because the consistent-atom count exceeded the union cap.
    pub union_enumeration_capped: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<A5Witness>,
}

#[derive(Debug, Clone, Serialize)]
pub struct A6Report {
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<[String; 2]>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ObjectiveReport {
    pub a4: A4Report,
    pub a5_plus: A5Report,
    pub a6: A6Report,
}

pub const DEFAULT_MIXTURE_DENOMINATOR_BOUND: u32 = 3;
pub const DEFAULT_UNION_CAP: usize = 10;

/// Checks A4 (best/worst outcomes under every non-null contingency),
/// A5+ (state independence on outcome mixtures up to a denominator
/// bound), and A6 (completeness on the outcome set).
pub fn check_objective_axioms(
    instance: &Instance,
    outcomes: &[usize],
    mixture_denominator_bound: u32,
    union_cap: usize,
    cancel: &CancelToken,
) -> Result<ObjectiveReport, AxiomsError> {
    if outcomes.is_empty() {
        return Err(AxiomsError::EmptyOutcomes);
    }
    let nulls = null_worlds(instance, cancel)?;
    let a4 = check_a4(instance, outcomes, &nulls, cancel)?;
    let a5_plus = check_a5_plus(
        instance,
        outcomes,
        &nulls,
        mixture_denominator_bound,
        union_cap,
        cancel,
    )?;
    let a6 = check_a6(instance, outcomes, cancel)?;
    Ok(ObjectiveReport { a4, a5_plus, a6 })
}

/// Outcome-primitive index of an act that IS a primitive (outcomes are
/// a subset of the primitives, so their table vectors are canonical).
fn primitive_vector(instance: &Instance, prim: usize) -> QVec {
    let p = instance.primitive_names.len();
    let mut v = vec![Rational::zero(); instance.dim()];
    for w in 0..instance.worlds.len() {
        v[w * p + prim] = Rational::one();
    }
    v
}

fn check_a4(
    instance: &Instance,
    outcomes: &[usize],
    nulls: &[bool],
    cancel: &CancelToken,
) -> Result<A4Report, AxiomsError> {
    let p = instance.primitive_names.len();
    let dominates = |top: usize, w: usize, a: usize| -> Result<bool, AxiomsError> {
        let e = instance.elementary(w, top, a);
        Ok(instance.cone().member(&e, cancel)?.is_some())
    };
    let mut best = None;
    'best: for &o in outcomes {
        for w in 0..instance.worlds.len() {
            if nulls[w] {
                continue;
            }
            for a in 0..p {
                if !dominates(o, w, a)? {
                    continue 'best;
                }
            }
        }
        best = Some(o);
        break;
    }
    let mut worst = None;
    'worst: for &o in outcomes {
        for w in 0..instance.worlds.len() {
            if nulls[w] {
                continue;
            }
            for a in 0..p {
                let e = instance.elementary(w, a, o);
                if instance.cone().member(&e, cancel)?.is_none() {
                    continue 'worst;
                }
            }
        }
        worst = Some(o);
        break;
    }
    Ok(A4Report {
        holds: best.is_some() && worst.is_some(),
        best: best.map(|o| instance.primitive_names[o].clone()),
        worst: worst.map(|o| instance.primitive_names[o].clone()),
    })
}

/// Enumerates distributions over `outcomes` with denominators up to
/// the bound, deduplicated after reduction. Pure outcomes included.
fn outcome_mixtures(outcomes: &[usize], bound: u32) -> Vec<Vec<(usize, Rational)>> {
    let mut seen: BTreeSet<Vec<(usize, Rational)>> = BTreeSet::new();
    for den in 1..=bound.max(1) {
        let mut stack: Vec<(usize, u32, Vec<u32>)> = vec![(0, den, Vec::new())];
        while let Some((i, left, acc)) = stack.pop() {
            if i == outcomes.len() {
                if left == 0 {
                    let dist: Vec<(usize, Rational)> = outcomes
                        .iter()
                        .zip(&acc)
                        .filter(|(_, &k)| k > 0)
                        .map(|(&o, &k)| {
                            (o, Rational::new(k.into(), den.into()))
                        })
                        .collect();
                    seen.insert(dist);
                }
                continue;
            }
            for k in 0..=left {
                let mut next = acc.clone();
                next.push(k);
                stack.push((i + 1, left - k, next));
            }
        }
    }
    seen.into_iter().collect()
}

fn mixture_vector(instance: &Instance, dist: &[(usize, Rational)]) -> QVec {
    let mut v = vec![Rational::zero(); instance.dim()];
    for (prim, weight) in dist {
        let pv = primitive_vector(instance, *prim);
        for (x, y) in v.iter_mut().zip(&pv) {
            *x += weight * y;
        }
    }
    v
}

fn mixture_label(instance: &Instance, dist: &[(usize, Rational)]) -> String {
    dist.iter()
        .map(|(prim, w)| format!("{}*{}", format_rational(w), instance.primitive_names[*prim]))
        .collect::<Vec<_>>()
        .join(" + ")
}

fn check_a5_plus(
    instance: &Instance,
    outcomes: &[usize],
    nulls: &[bool],
    bound: u32,
    union_cap: usize,
    cancel: &CancelToken,
) -> Result<A5Report, AxiomsError> {
    let mixtures = outcome_mixtures(outcomes, bound);
    let n_worlds = instance.worlds.len();
    let capped = n_worlds > union_cap;

    // Relevant non-null tests = unions of consistent atoms containing
    // at least one non-null atom; singletons only when capped.
    let mut masks: Vec<Vec<bool>> = Vec::new();
    if capped {
        for w in 0..n_worlds {
            if !nulls[w] {
                let mut m = vec![false; n_worlds];
                m[w] = true;
                masks.push(m);
            }
        }
    } else {
        for bits in 1..(1usize << n_worlds) {
            let m: Vec<bool> = (0..n_worlds).map(|w| bits >> w & 1 == 1).collect();
            if m.iter().zip(nulls).any(|(&inc, &nl)| inc && !nl) {
                masks.push(m);
            }
        }
    }

    for (li, left) in mixtures.iter().enumerate() {
        for (ri, right) in mixtures.iter().enumerate() {
            if li == ri {
                continue;
            }
            let d = crate::geometry::sub(
                &mixture_vector(instance, left),
                &mixture_vector(instance, right),
            );
            let global = instance.cone().member(&d, cancel)?.is_some();
            for mask in &masks {
                let restricted = instance.restrict(&d, mask);
                let contingent = instance.cone().member(&restricted, cancel)?.is_some();
                if contingent != global {
                    let test_worlds = mask
                        .iter()
                        .enumerate()
                        .filter(|(_, &k)| k)
                        .map(|(w, _)| instance.worlds[w].label())
                        .collect();
                    return Ok(A5Report {
                        holds_up_to_bound: false,
                        denominator_bound: bound,
                        union_enumeration_capped: capped,
                        witness: Some(A5Witness {
                            left: mixture_label(instance, left),
                            right: mixture_label(instance, right),
                            test_worlds,
                            global_holds: global,
                            contingent_holds: contingent,
                        }),
                    });
                }
            }
        }
    }
    Ok(A5Report {
        holds_up_to_bound: true,
        denominator_bound: bound,
        union_enumeration_capped: capped,
        witness: None,
    })
}

fn check_a6(
    instance: &Instance,
    outcomes: &[usize],
    cancel: &CancelToken,
) -> Result<A6Report, AxiomsError> {
    let mut sorted: Vec<usize> = outcomes.to_vec();
    sorted.sort_by(|&i, &j| instance.primitive_names[i].cmp(&instance.primitive_names[j]));
    for (pos, &i) in sorted.iter().enumerate() {
        for &j in &sorted[pos + 1..] {
            let iv = primitive_vector(instance, i);
            let jv = primitive_vector(instance, j);
            let d = crate::geometry::sub(&iv, &jv);
            let fwd = instance.cone().member(&d, cancel)?.is_some();
            let rev = instance.cone().member(&neg(&d), cancel)?.is_some();
            if !fwd && !rev {
                return Ok(A6Report {
                    holds: false,
                    witness: Some([
                        instance.primitive_names[i].clone(),
                        instance.primitive_names[j].clone(),
                    ]),
                });
            }
        }
    }
    Ok(A6Report { holds: true, witness: None })
}

// ---------------------------------------------------------------------------
// Helpers shared with represent/updating
// ---------------------------------------------------------------------------

/// EU-style comparison of two acts under a list of utility rays:
/// `(a,b)` accepted iff every ray weakly prefers `a`.
pub fn rays_prefer(rays: &[QVec], d: &QVec) -> bool {
    rays.iter().all(|u| !dot(u, d).is_negative())
}

/// Strict/weak structure of a closure as a map for reporting.
pub fn relation_names(instance: &Instance, weak: &BTreeSet<(usize, usize)>) -> Vec<[String; 2]> {
    let order = instance.name_order();
    let mut out = Vec::new();
    for &i in &order {
        for &j in &order {
            if weak.contains(&(i, j)) {
                out.push(instance.pair_names((i, j)));
            }
        }
    }
    out
}

/// Positions of outcome names in the primitive list.
pub fn outcome_indices(
    instance: &Instance,
    outcome_names: &[String],
) -> Result<Vec<usize>, AxiomsError> {
    outcome_names
        .iter()
        .map(|n| {
            instance
                .primitive_names
                .iter()
                .position(|p| p == n)
                .ok_or_else(|| AxiomsError::UnknownAct(n.clone()))
        })
        .collect()
}
