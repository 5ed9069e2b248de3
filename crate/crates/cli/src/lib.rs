//! Command implementations behind the `seu` binary.
//!
//! Every command reads one JSON problem file, writes one JSON report
//! to stdout, and exits 0 (success / all axioms hold), 1 (an axiom or
//! synthesis failure, with the report still emitted), or 2 (malformed
//! input). Output is byte-deterministic given the file and flags;
//! there is no randomness anywhere (`--seed` is reserved and
//! rejected).

use anyhow::{anyhow, bail, Context, Result};
use clap::{ArgGroup, Parser, Subcommand};
use serde::Serialize;
use seu_core::axioms::{
    brute_force_cancellation, check_a1, check_cancellation, check_objective_axioms, closure,
    contingent_compare, relation_names, AxiomsError, Instance,
    DEFAULT_MIXTURE_DENOMINATOR_BOUND, DEFAULT_UNION_CAP,
};
use seu_core::choice::{compile as compile_choice, parse_choice};
use seu_core::geometry::CancelToken;
use seu_core::logic::parse_test;
use seu_core::problem::ProblemFile;
use seu_core::rational::{format_rational, is_zero, parse_rational, Rational};
use seu_core::represent::{
    bootstrap_seu, represent_objective, represent_single, represent_state_dependent,
    uniform_base, verify_representation, BootstrapShape, Representation, RepresentError,
};
use seu_core::updating::{refine, verify_update_theorems, Learned};
use std::collections::BTreeMap;
use std::fs;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "seu",
    about = "Exact decision-problem toolkit: worlds, axiom checks, SEU representations, updating",
    version
)]
pub struct Cli {
    /// World-enumeration guard: maximum basis size (2^n assignments).
    #[arg(long, global = true, default_value_t = 16)]
    pub limit_tests: usize,

    /// Reserved. There is no randomness anywhere; passing a seed is an error.
    #[arg(long, global = true)]
    pub seed: Option<String>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the worlds consistent with the theory.
    Worlds { file: String },
    /// Print every act's compiled table (distribution per world).
    Compile { file: String },
    /// Decide whether two choices are equivalent under the theory.
    /// Each argument is an act name or an inline program.
    Equiv {
        file: String,
        left: String,
        right: String,
    },
    /// Check the preference axioms; exit 1 when any mandatory axiom fails.
    Check {
        file: String,
        /// Also run the brute-force sequence oracle with this
        /// per-pair multiplicity bound.
        #[arg(long, value_name = "L")]
        brute_force: Option<u32>,
    },
    /// Synthesize a representation.
    #[command(group(ArgGroup::new("shape").required(true)
        .args(["single_utility", "multi_prob", "objective"])))]
    Represent {
        file: String,
        /// Theorem-2/3 route under completeness: one utility, one probability.
        #[arg(long)]
        single_utility: bool,
        /// General route: one utility, one probability measure per dual ray.
        #[arg(long)]
        multi_prob: bool,
        /// Objective-outcome route: outcomes from the file's outcome set.
        #[arg(long)]
        objective: bool,
        /// Base measure over consistent worlds: "uniform" or a
        /// comma-separated list of rationals in world order.
        #[arg(long, default_value = "uniform")]
        base: String,
    },
    /// Verify a representation file against the problem's preferences.
    Verify {
        file: String,
        #[arg(long, value_name = "REP.json")]
        representation: String,
    },
    /// Update on new information: a learned test or a new comparison.
    #[command(group(ArgGroup::new("info").required(true).args(["given_test", "prefer"])))]
    Update {
        file: String,
        /// Condition on a test expression.
        #[arg(long, value_name = "TEST")]
        given_test: Option<String>,
        /// Refine with a new weak pair A B.
        #[arg(long, num_args = 2, value_names = ["A", "B"])]
        prefer: Option<Vec<String>>,
    },
    /// Measure the framing bias between two tests the modeler deems
    /// equivalent: the probability of their symmetric difference.
    Framing {
        file: String,
        test1: String,
        test2: String,
        #[arg(long, default_value = "uniform")]
        base: String,
    },
}

/// Runs a command to a rendered JSON report plus exit code. `Err`
/// means malformed input (exit 2, message on stderr).
pub fn run(cli: &Cli) -> Result<(String, i32)> {
    if cli.seed.is_some() {
        bail!("--seed is reserved: this tool uses no randomness anywhere");
    }
    match &cli.command {
        Command::Worlds { file } => cmd_worlds(file, cli.limit_tests),
        Command::Compile { file } => cmd_compile(file, cli.limit_tests),
        Command::Equiv { file, left, right } => cmd_equiv(file, left, right, cli.limit_tests),
        Command::Check { file, brute_force } => {
            cmd_check(file, *brute_force, cli.limit_tests)
        }
        Command::Represent {
            file,
            single_utility,
            multi_prob: _,
            objective,
            base,
        } => cmd_represent(file, *single_utility, *objective, base, cli.limit_tests),
        Command::Verify {
            file,
            representation,
        } => cmd_verify(file, representation, cli.limit_tests),
        Command::Update {
            file,
            given_test,
            prefer,
        } => cmd_update(file, given_test.as_deref(), prefer.as_deref(), cli.limit_tests),
        Command::Framing {
            file,
            test1,
            test2,
            base,
        } => cmd_framing(file, test1, test2, base, cli.limit_tests),
    }
}

fn load(file: &str, limit: usize) -> Result<(ProblemFile, Instance)> {
    let text = fs::read_to_string(file).with_context(|| format!("reading {file}"))?;
    let doc = ProblemFile::from_json(&text).with_context(|| format!("parsing {file}"))?;
    let instance = doc
        .compile(limit)
        .with_context(|| format!("compiling {file}"))?;
    Ok((doc, instance))
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)?)
}

fn parse_base(instance: &Instance, base: &str) -> Result<Vec<Rational>> {
    if base == "uniform" {
        return Ok(uniform_base(instance).map_err(|e| anyhow!(e.to_string()))?);
    }
    let parts: Vec<&str> = base.split(',').collect();
    let values = parts
        .iter()
        .map(|p| parse_rational(p.trim()))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| anyhow!("invalid --base: {e}"))?;
    if values.len() != instance.worlds.len() {
        bail!(
            "--base has {} entries but there are {} consistent worlds",
            values.len(),
            instance.worlds.len()
        );
    }
    Ok(values)
}

// ---------------------------------------------------------------------------
// worlds
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct WorldRow {
    label: String,
    assignment: BTreeMap<String, bool>,
}

#[derive(Serialize)]
struct WorldsReport {
    mode: &'static str,
    basis: Vec<String>,
    total_assignments: usize,
    consistent_count: usize,
    inconsistent_theory: bool,
    consistent: Vec<WorldRow>,
}

fn cmd_worlds(file: &str, limit: usize) -> Result<(String, i32)> {
    let (_, instance) = load(file, limit)?;
    let basis: Vec<String> = seu_core::represent::basis_test_formulas(&instance)
        .into_iter()
        .map(|(name, _)| name)
        .collect();
    let rows: Vec<WorldRow> = instance
        .worlds
        .iter()
        .map(|w| WorldRow {
            label: w.label(),
            assignment: basis
                .iter()
                .cloned()
                .zip(w.bits.iter().copied())
                .collect(),
        })
        .collect();
    let report = WorldsReport {
        mode: if instance.basis.is_standard() {
            "standard"
        } else {
            "nonstandard"
        },
        total_assignments: 1usize << basis.len(),
        basis,
        consistent_count: rows.len(),
        inconsistent_theory: rows.is_empty(),
        consistent: rows,
    };
    if report.inconsistent_theory {
        eprintln!("warning: the theory is inconsistent (no consistent worlds)");
    }
    Ok((to_json(&report)?, EXIT_OK))
}

// ---------------------------------------------------------------------------
// compile
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct CompileReport {
    worlds: Vec<String>,
    /// act -> one distribution (primitive -> weight) per world
    tables: BTreeMap<String, Vec<BTreeMap<String, String>>>,
}

fn cmd_compile(file: &str, limit: usize) -> Result<(String, i32)> {
    let (_, instance) = load(file, limit)?;
    let mut tables = BTreeMap::new();
    for act in &instance.acts {
        let rows: Vec<BTreeMap<String, String>> = act
            .table
            .rows
            .iter()
            .map(|row| {
                instance
                    .primitive_names
                    .iter()
                    .zip(row)
                    .filter(|(_, w)| !is_zero(w))
                    .map(|(n, w)| (n.clone(), format_rational(w)))
                    .collect()
            })
            .collect();
        tables.insert(act.name.clone(), rows);
    }
    let report = CompileReport {
        worlds: instance.worlds.iter().map(|w| w.label()).collect(),
        tables,
    };
    Ok((to_json(&report)?, EXIT_OK))
}

// ---------------------------------------------------------------------------
// equiv
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct EquivReport {
    left: String,
    right: String,
    equivalent: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<EquivWitness>,
}

#[derive(Serialize)]
struct EquivWitness {
    world: String,
    left_row: BTreeMap<String, String>,
    right_row: BTreeMap<String, String>,
}

fn cmd_equiv(file: &str, left: &str, right: &str, limit: usize) -> Result<(String, i32)> {
    let (doc, instance) = load(file, limit)?;
    let table_of = |spec: &str| -> Result<Vec<Vec<Rational>>> {
        if let Ok(idx) = instance.act_index(spec) {
            return Ok(instance.acts[idx].table.rows.clone());
        }
        let program = parse_choice(spec, &doc.primitives, &doc.tests)
            .map_err(|e| anyhow!("cannot resolve {spec:?} as an act name or program: {e}"))?;
        let table = compile_choice(
            &program,
            &instance.basis,
            &instance.worlds,
            &instance.test_names,
            instance.primitive_names.len(),
        )
        .map_err(|e| anyhow!("compiling {spec:?}: {e}"))?;
        Ok(table.rows)
    };
    let lt = table_of(left)?;
    let rt = table_of(right)?;
    let mut witness = None;
    for (w, (lr, rr)) in lt.iter().zip(&rt).enumerate() {
        if lr != rr {
            let to_map = |row: &Vec<Rational>| {
                instance
                    .primitive_names
                    .iter()
                    .zip(row)
                    .filter(|(_, x)| !is_zero(x))
                    .map(|(n, x)| (n.clone(), format_rational(x)))
                    .collect()
            };
            witness = Some(EquivWitness {
                world: instance.worlds[w].label(),
                left_row: to_map(lr),
                right_row: to_map(rr),
            });
            break;
        }
    }
    let equivalent = witness.is_none();
    let report = EquivReport {
        left: left.to_string(),
        right: right.to_string(),
        equivalent,
        witness,
    };
    Ok((
        to_json(&report)?,
        if equivalent { EXIT_OK } else { EXIT_FAILURE },
    ))
}

// ---------------------------------------------------------------------------
// check
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct A1Entry {
    role: &'static str,
    #[serde(flatten)]
    report: seu_core::axioms::A1Report,
}

#[derive(Serialize)]
struct A3Entry {
    verdict: &'static str,
    note: &'static str,
}

#[derive(Serialize)]
struct CheckReport {
    a1: A1Entry,
    cancellation: seu_core::axioms::CancellationReport,
    a3: A3Entry,
    #[serde(skip_serializing_if = "Option::is_none")]
    objective: Option<seu_core::axioms::ObjectiveReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    brute_force: Option<seu_core::axioms::BruteForceReport>,
    all_hold: bool,
}

fn cmd_check(file: &str, brute: Option<u32>, limit: usize) -> Result<(String, i32)> {
    let (doc, instance) = load(file, limit)?;
    let cancel = CancelToken::default();
    let a1 = check_a1(&instance, &cancel).map_err(to_input_error)?;
    let language = instance.language();
    let cancellation = check_cancellation(&instance, language, &cancel).map_err(to_input_error)?;
    let objective = match doc.outcome_indices() {
        Some(outs) => Some(
            check_objective_axioms(
                &instance,
                &outs,
                DEFAULT_MIXTURE_DENOMINATOR_BOUND,
                DEFAULT_UNION_CAP,
                &cancel,
            )
            .map_err(to_input_error)?,
        ),
        None => None,
    };
    let brute_force = match brute {
        Some(bound) => {
            Some(brute_force_cancellation(&instance, bound).map_err(to_input_error)?)
        }
        None => None,
    };
    let mandatory_hold = cancellation.holds
        && objective
            .as_ref()
            .map(|o| o.a4.holds && o.a5_plus.holds_up_to_bound && o.a6.holds)
            .unwrap_or(true);
    let report = CheckReport {
        a1: A1Entry {
            role: "informational",
            report: a1,
        },
        cancellation,
        a3: A3Entry {
            verdict: "structural",
            note: "the induced order is defined by a finitely generated (hence closed) cone",
        },
        objective,
        brute_force,
        all_hold: mandatory_hold,
    };
    Ok((
        to_json(&report)?,
        if mandatory_hold { EXIT_OK } else { EXIT_FAILURE },
    ))
}

fn to_input_error(e: AxiomsError) -> anyhow::Error {
    anyhow!(e.to_string())
}

// ---------------------------------------------------------------------------
// represent
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct RepresentFailure {
    error: String,
    reason: String,
}

fn cmd_represent(
    file: &str,
    single_utility: bool,
    objective: bool,
    base: &str,
    limit: usize,
) -> Result<(String, i32)> {
    let (doc, instance) = load(file, limit)?;
    let cancel = CancelToken::default();
    let result: Result<Representation, RepresentError> = if objective {
        let outs = doc
            .outcome_indices()
            .ok_or_else(|| anyhow!("--objective requires an \"outcomes\" set in the file"))?;
        represent_objective(&instance, &outs, &cancel)
    } else {
        let base = parse_base(&instance, base)?;
        if single_utility {
            represent_single(&instance, &cancel).and_then(|sdr| {
                bootstrap_seu(&sdr, &instance, &base, BootstrapShape::SingleUtility)
            })
        } else {
            represent_state_dependent(&instance, &cancel).and_then(|sdr| {
                bootstrap_seu(&sdr, &instance, &base, BootstrapShape::SingleUtility)
            })
        }
    };
    match result {
        Ok(rep) => Ok((to_json(&rep)?, EXIT_OK)),
        Err(e) => {
            let failure = RepresentFailure {
                error: error_kind(&e).to_string(),
                reason: e.to_string(),
            };
            Ok((to_json(&failure)?, EXIT_FAILURE))
        }
    }
}

fn error_kind(e: &RepresentError) -> &'static str {
    match e {
        RepresentError::PreconditionFailed { .. } => "precondition_failed",
        RepresentError::CalibrationInconsistency { .. } => "calibration_inconsistency",
        RepresentError::MissingBestWorst => "missing_best_worst",
        RepresentError::InconsistentTheory => "inconsistent_theory",
        RepresentError::NonPositiveBase | RepresentError::BaseNotNormalized => "bad_base",
        RepresentError::Malformed(_) => "malformed_representation",
        _ => "error",
    }
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

fn cmd_verify(file: &str, rep_file: &str, limit: usize) -> Result<(String, i32)> {
    let (_, instance) = load(file, limit)?;
    let rep_text =
        fs::read_to_string(rep_file).with_context(|| format!("reading {rep_file}"))?;
    let rep: Representation = serde_json::from_str(&rep_text)
        .with_context(|| format!("parsing representation {rep_file}"))?;
    let cancel = CancelToken::default();
    match verify_representation(&rep, &instance, &cancel) {
        Ok(outcome) => {
            let code = if outcome.verified { EXIT_OK } else { EXIT_FAILURE };
            Ok((to_json(&outcome)?, code))
        }
        Err(RepresentError::Malformed(reason)) => {
            Err(anyhow!("malformed representation: {reason}"))
        }
        Err(e) => Err(anyhow!(e.to_string())),
    }
}

// ---------------------------------------------------------------------------
// update
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct ContingentRow {
    pair: [String; 2],
    class: seu_core::axioms::ContingentClass,
}

#[derive(Serialize)]
struct UpdateReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    contingent_relation: Option<Vec<ContingentRow>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    refined_relation: Option<Vec<[String; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    full_collapse: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    forced_indifference: Option<Vec<[String; 2]>>,
    two_path: seu_core::updating::TwoPathReport,
}

fn cmd_update(
    file: &str,
    given_test: Option<&str>,
    prefer: Option<&[String]>,
    limit: usize,
) -> Result<(String, i32)> {
    let (_, instance) = load(file, limit)?;
    let cancel = CancelToken::default();
    let report = if let Some(test_text) = given_test {
        let t = parse_test(test_text, &instance.test_names)
            .map_err(|e| anyhow!("parsing --given-test: {e}"))?;
        let order = instance.name_order();
        let mut rows = Vec::new();
        for &i in &order {
            for &j in &order {
                if i == j {
                    continue;
                }
                let cmp = contingent_compare(&instance, i, j, &t, &cancel)
                    .map_err(to_input_error)?;
                rows.push(ContingentRow {
                    pair: [
                        instance.act_name(i).to_string(),
                        instance.act_name(j).to_string(),
                    ],
                    class: cmp.classification(),
                });
            }
        }
        let two_path = verify_update_theorems(&instance, &Learned::Test(t), &cancel)
            .map_err(|e| anyhow!(e.to_string()))?;
        UpdateReport {
            contingent_relation: Some(rows),
            refined_relation: None,
            full_collapse: None,
            forced_indifference: None,
            two_path,
        }
    } else {
        let pair = prefer.expect("clap group");
        let a = instance
            .act_index(&pair[0])
            .map_err(|e| anyhow!(e.to_string()))?;
        let b = instance
            .act_index(&pair[1])
            .map_err(|e| anyhow!(e.to_string()))?;
        let refined = refine(&instance, (a, b), &cancel).map_err(|e| anyhow!(e.to_string()))?;
        let two_path = verify_update_theorems(&instance, &Learned::Pair(a, b), &cancel)
            .map_err(|e| anyhow!(e.to_string()))?;
        UpdateReport {
            contingent_relation: None,
            refined_relation: Some(relation_names(&instance, &refined.weak)),
            full_collapse: Some(refined.full_collapse),
            forced_indifference: Some(
                refined
                    .forced_indifference
                    .iter()
                    .map(|&(x, y)| {
                        [
                            instance.act_name(x).to_string(),
                            instance.act_name(y).to_string(),
                        ]
                    })
                    .collect(),
            ),
            two_path,
        }
    };
    Ok((to_json(&report)?, EXIT_OK))
}

// ---------------------------------------------------------------------------
// framing
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct FramingReport {
    test1: String,
    test2: String,
    /// `p(pi(t1) delta pi(t2))` for each probability measure in the
    /// canonical representation (their atom marginals coincide with
    /// the base measure, so one row per distinct marginal).
    per_measure: Vec<FramingRow>,
    symmetric_difference_count: usize,
    symmetric_difference_atoms: Vec<String>,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    atoms_truncated: bool,
}

#[derive(Serialize)]
struct FramingRow {
    measure: String,
    value: String,
}

fn cmd_framing(
    file: &str,
    test1: &str,
    test2: &str,
    base: &str,
    limit: usize,
) -> Result<(String, i32)> {
    let (_, instance) = load(file, limit)?;
    let t1 = parse_test(test1, &instance.test_names).map_err(|e| anyhow!("test1: {e}"))?;
    let t2 = parse_test(test2, &instance.test_names).map_err(|e| anyhow!("test2: {e}"))?;
    let base = parse_base(&instance, base)?;
    let keep1 = instance.worlds_entailing(&t1).map_err(to_input_error)?;
    let keep2 = instance.worlds_entailing(&t2).map_err(to_input_error)?;
    let mut value = seu_core::rational::zero();
    let mut atoms = Vec::new();
    for (w, (&a, &b)) in keep1.iter().zip(&keep2).enumerate() {
        if a != b {
            value += &base[w];
            atoms.push(instance.worlds[w].label());
        }
    }
    let count = atoms.len();
    let truncated = count > 32;
    atoms.truncate(32);
    let report = FramingReport {
        test1: test1.to_string(),
        test2: test2.to_string(),
        per_measure: vec![FramingRow {
            measure: "base".to_string(),
            value: format_rational(&value),
        }],
        symmetric_difference_count: count,
        symmetric_difference_atoms: atoms,
        atoms_truncated: truncated,
    };
    Ok((to_json(&report)?, EXIT_OK))
}

// ---------------------------------------------------------------------------
// closure helper shared with tests
// ---------------------------------------------------------------------------

/// The closure of a problem file's declared relation, as name pairs —
/// handy for preparing closed corpus files.
pub fn closed_relation(file: &str, limit: usize) -> Result<Vec<[String; 2]>> {
    let (_, instance) = load(file, limit)?;
    let cancel = CancelToken::default();
    let result = closure(&instance, None, &cancel).map_err(to_input_error)?;
    Ok(relation_names(&instance, &result.weak))
}
