//! The test language, theories, and world enumeration.
//!
//! Tests are propositional formulas over a declared finite set of
//! primitive tests; negation and conjunction are the core connectives,
//! and `|`, `=>`, `<=>` are desugared at parse time. A [`World`] is a
//! total truth assignment over a [`Basis`]:
//!
//! - in standard mode the basis is the primitive tests, and a world is
//!   exactly an atom (the conjunction fixing every primitive test);
//! - in nonstandard mode the basis is a designated finite set `T*` of
//!   formulas, each assigned a truth value independently, so a world
//!   may, for instance, make `t & !t` true. Evaluation is then pure
//!   lookup — no logical coherence is imposed.
//!
//! World enumeration filters assignments by a [`Theory`] (the tests
//! held axiomatically true) and orders the survivors lexicographically
//! in declared test order with `false < true`; every downstream vector
//! layout is built on that order.

use crate::lexer::{tokenize, Cursor, SyntaxError, Tok};
use std::collections::HashMap;
use std::fmt;

/// A test formula over core connectives only (negation, conjunction).
///
/// Primitive tests are identified by their index in the declared test
/// list; derived connectives never survive parsing.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TestFormula {
    Prim(usize),
    Not(Box<TestFormula>),
    And(Box<TestFormula>, Box<TestFormula>),
}

impl TestFormula {
    pub fn not(t: TestFormula) -> TestFormula {
        TestFormula::Not(Box::new(t))
    }

    pub fn and(a: TestFormula, b: TestFormula) -> TestFormula {
        TestFormula::And(Box::new(a), Box::new(b))
    }

    /// Renders with primitive-test names, fully parenthesized except
    /// for negation chains.
    pub fn display(&self, names: &[String]) -> String {
        match self {
            TestFormula::Prim(i) => names[*i].clone(),
            TestFormula::Not(t) => format!("!{}", t.maybe_paren(names)),
            TestFormula::And(a, b) => {
                format!("{} & {}", a.maybe_paren(names), b.maybe_paren(names))
            }
        }
    }

    fn maybe_paren(&self, names: &[String]) -> String {
        match self {
            TestFormula::And(_, _) => format!("({})", self.display(names)),
            _ => self.display(names),
        }
    }

    /// Indices of primitive tests appearing in the formula.
    pub fn primitives(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect_prims(&mut out);
        out.sort_unstable();
        out.dedup();
        out
    }

    fn collect_prims(&self, out: &mut Vec<usize>) {
        match self {
            TestFormula::Prim(i) => out.push(*i),
            TestFormula::Not(t) => t.collect_prims(out),
            TestFormula::And(a, b) => {
                a.collect_prims(out);
                b.collect_prims(out);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LogicError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("undeclared test {name:?} at offset {offset}")]
    UndeclaredTest { name: String, offset: usize },
    #[error("basis has {size} tests, over the enumeration limit {limit}")]
    BasisTooLarge { size: usize, limit: usize },
    #[error("axiom {axiom:?} is not a member of the designated test set T*")]
    NonstandardAxiomOutsideBasis { axiom: String },
    #[error("test {test:?} is outside the designated test set T*")]
    TestOutsideBasis { test: String },
    #[error("primitive test index {index} is outside the basis of size {size}")]
    PrimOutsideBasis { index: usize, size: usize },
}

/// Parses a test expression against the declared primitive-test names.
///
/// Grammar (`!` binds tightest, then `&`, `|`, `=>` right-associative,
/// `<=>` loosest):
///
/// ```text
/// test := iff ; iff := imp ("<=>" imp)* ; imp := disj ("=>" imp)? ;
/// disj := conj ("|" conj)* ; conj := unary ("&" unary)* ;
/// unary := "!" unary | "(" test ")" | IDENT ;
/// ```
///
/// Sugar is desugared on the spot: `a | b` to `!(!a & !b)`, `a => b`
/// to `!(a & !b)`, `a <=> b` to `(a => b) & (b => a)`.
pub fn parse_test(text: &str, declared: &[String]) -> Result<TestFormula, LogicError> {
    let toks = tokenize(text)?;
    let mut cur = Cursor::new(toks);
    let index: HashMap<&str, usize> = declared
        .iter()
        .enumerate()
        .map(|(i, n)| (n.as_str(), i))
        .collect();
    let t = parse_iff(&mut cur, &index)?;
    if !cur.at_eof() {
        return Err(cur
            .error_here(&format!("unexpected {}", cur.peek().tok))
            .into());
    }
    Ok(t)
}

/// Parses a test from an ongoing token stream (used by the choice
/// grammar for conditional guards; keywords terminate the test).
pub(crate) fn parse_test_from(
    cur: &mut Cursor,
    index: &HashMap<&str, usize>,
) -> Result<TestFormula, LogicError> {
    parse_iff(cur, index)
}

fn desugar_implies(a: TestFormula, b: TestFormula) -> TestFormula {
    TestFormula::not(TestFormula::and(a, TestFormula::not(b)))
}

fn parse_iff(cur: &mut Cursor, index: &HashMap<&str, usize>) -> Result<TestFormula, LogicError> {
    let mut lhs = parse_imp(cur, index)?;
    while cur.peek().tok == Tok::DArrow {
        cur.bump();
        let rhs = parse_imp(cur, index)?;
        lhs = TestFormula::and(
            desugar_implies(lhs.clone(), rhs.clone()),
            desugar_implies(rhs, lhs),
        );
    }
    Ok(lhs)
}

fn parse_imp(cur: &mut Cursor, index: &HashMap<&str, usize>) -> Result<TestFormula, LogicError> {
    let lhs = parse_disj(cur, index)?;
    if cur.peek().tok == Tok::Arrow {
        cur.bump();
        let rhs = parse_imp(cur, index)?; // right-associative
        Ok(desugar_implies(lhs, rhs))
    } else {
        Ok(lhs)
    }
}

fn parse_disj(cur: &mut Cursor, index: &HashMap<&str, usize>) -> Result<TestFormula, LogicError> {
    let mut lhs = parse_conj(cur, index)?;
    while cur.peek().tok == Tok::Pipe {
        cur.bump();
        let rhs = parse_conj(cur, index)?;
        lhs = TestFormula::not(TestFormula::and(
            TestFormula::not(lhs),
            TestFormula::not(rhs),
        ));
    }
    Ok(lhs)
}

fn parse_conj(cur: &mut Cursor, index: &HashMap<&str, usize>) -> Result<TestFormula, LogicError> {
    let mut lhs = parse_unary(cur, index)?;
    while cur.peek().tok == Tok::Amp {
        cur.bump();
        let rhs = parse_unary(cur, index)?;
        lhs = TestFormula::and(lhs, rhs);
    }
    Ok(lhs)
}

fn parse_unary(cur: &mut Cursor, index: &HashMap<&str, usize>) -> Result<TestFormula, LogicError> {
    match cur.peek().tok.clone() {
        Tok::Bang => {
            cur.bump();
            Ok(TestFormula::not(parse_unary(cur, index)?))
        }
        Tok::LParen => {
            cur.bump();
            let t = parse_iff(cur, index)?;
            cur.eat(&Tok::RParen)?;
            Ok(t)
        }
        Tok::Ident(name) => {
            let sp = cur.bump();
            match index.get(name.as_str()) {
                Some(&i) => Ok(TestFormula::Prim(i)),
                None => Err(LogicError::UndeclaredTest {
                    name,
                    offset: sp.offset,
                }),
            }
        }
        other => Err(cur.error_here(&format!("expected a test, found {other}")).into()),
    }
}

/// The set of tests the decision maker holds axiomatically true.
///
/// Duplicates are removed; input order is preserved for deterministic
/// reporting.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Theory {
    axioms: Vec<TestFormula>,
}

impl Theory {
    pub fn new(axioms: Vec<TestFormula>) -> Theory {
        let mut seen = Vec::new();
        for ax in axioms {
            if !seen.contains(&ax) {
                seen.push(ax);
            }
        }
        Theory { axioms: seen }
    }

    pub fn empty() -> Theory {
        Theory::default()
    }

    pub fn axioms(&self) -> &[TestFormula] {
        &self.axioms
    }

    pub fn is_empty(&self) -> bool {
        self.axioms.is_empty()
    }
}

/// What a truth assignment ranges over.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Basis {
    /// One truth value per declared primitive test; worlds are atoms.
    Standard { test_count: usize },
    /// One truth value per member of the designated finite set `T*`.
    Nonstandard { members: Vec<TestFormula> },
}

impl Basis {
    pub fn standard(test_count: usize) -> Basis {
        Basis::Standard { test_count }
    }

    pub fn nonstandard(members: Vec<TestFormula>) -> Basis {
        Basis::Nonstandard { members }
    }

    pub fn len(&self) -> usize {
        match self {
            Basis::Standard { test_count } => *test_count,
            Basis::Nonstandard { members } => members.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_standard(&self) -> bool {
        matches!(self, Basis::Standard { .. })
    }

    /// Evaluates a test at a world.
    ///
    /// Standard mode interprets `!` and `&` recursively; nonstandard
    /// mode looks the whole formula up in `T*` and errors when it is
    /// absent (compound tests outside `T*` have no value there).
    pub fn eval(&self, t: &TestFormula, w: &World, names: &[String]) -> Result<bool, LogicError> {
        match self {
            Basis::Standard { test_count } => match t {
                TestFormula::Prim(i) => {
                    if *i >= *test_count {
                        Err(LogicError::PrimOutsideBasis {
                            index: *i,
                            size: *test_count,
                        })
                    } else {
                        Ok(w.bits[*i])
                    }
                }
                TestFormula::Not(inner) => Ok(!self.eval(inner, w, names)?),
                TestFormula::And(a, b) => {
                    Ok(self.eval(a, w, names)? && self.eval(b, w, names)?)
                }
            },
            Basis::Nonstandard { members } => {
                match members.iter().position(|m| m == t) {
                    Some(idx) => Ok(w.bits[idx]),
                    None => Err(LogicError::TestOutsideBasis {
                        test: t.display(names),
                    }),
                }
            }
        }
    }
}

/// A truth assignment over a basis. In standard mode this is an atom.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct World {
    pub bits: Vec<bool>,
}

impl World {
    /// The `'0'`/`'1'` label in declared test order, e.g. `"10"`.
    pub fn label(&self) -> String {
        self.bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }
}

impl fmt::Display for World {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

pub const DEFAULT_BASIS_LIMIT: usize = 16;

/// Evaluates `eval_test(t, w)` — true iff the world entails the test.
pub fn entails(
    basis: &Basis,
    w: &World,
    t: &TestFormula,
    names: &[String],
) -> Result<bool, LogicError> {
    basis.eval(t, w, names)
}

/// Enumerates the worlds consistent with a theory.
///
/// Standard mode keeps the atoms satisfying every axiom; nonstandard
/// mode keeps the assignments mapping every axiom (which must be a
/// member of `T*`) to true. Output is lexicographic in declared test
/// order with `false < true`, duplicate-free, and a pure function of
/// the input. An empty result is not an error: it reports an
/// inconsistent theory.
pub fn enumerate_worlds(
    basis: &Basis,
    theory: &Theory,
    names: &[String],
    limit: usize,
) -> Result<Vec<World>, LogicError> {
    let n = basis.len();
    if n > limit {
        return Err(LogicError::BasisTooLarge { size: n, limit });
    }
    // Nonstandard axioms must be looked up, not evaluated.
    let axiom_slots: Option<Vec<usize>> = match basis {
        Basis::Standard { .. } => None,
        Basis::Nonstandard { members } => {
            let mut slots = Vec::with_capacity(theory.axioms().len());
            for ax in theory.axioms() {
                match members.iter().position(|m| m == ax) {
                    Some(i) => slots.push(i),
                    None => {
                        return Err(LogicError::NonstandardAxiomOutsideBasis {
                            axiom: ax.display(names),
                        })
                    }
                }
            }
            Some(slots)
        }
    };

    let mut out = Vec::new();
    for counter in 0..(1usize << n) {
        let bits: Vec<bool> = (0..n).map(|i| (counter >> (n - 1 - i)) & 1 == 1).collect();
        let w = World { bits };
        let keep = match &axiom_slots {
            Some(slots) => slots.iter().all(|&i| w.bits[i]),
            None => {
                let mut ok = true;
                for ax in theory.axioms() {
                    if !basis.eval(ax, &w, names)? {
                        ok = false;
                        break;
                    }
                }
                ok
            }
        };
        if keep {
            out.push(w);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn names(list: &[&str]) -> Vec<String> {
        list.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn implication_desugars_to_core_connectives() {
        let decls = names(&["L090", "D010"]);
        let parsed = parse_test("!(L090 & !D010)", &decls).unwrap();
        let sugar = parse_test("L090 => D010", &decls).unwrap();
        assert_eq!(parsed, sugar);
    }

    #[test]
    fn survival_frame_test_structure() {
        let decls = names(&["S", "L090", "L168", "L534"]);
        let t = parse_test("S => L090 & L168 & L534", &decls).unwrap();
        // !(S & !(L090 & L168 & L534)), with & left-associated
        let conj = TestFormula::and(
            TestFormula::and(TestFormula::Prim(1), TestFormula::Prim(2)),
            TestFormula::Prim(3),
        );
        let expected = TestFormula::not(TestFormula::and(
            TestFormula::Prim(0),
            TestFormula::not(conj),
        ));
        assert_eq!(t, expected);
    }

    #[test]
    fn syntax_error_carries_offset() {
        let decls = names(&["t"]);
        match parse_test("t &", &decls) {
            Err(LogicError::Syntax(e)) => assert_eq!(e.offset, 3),
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn undeclared_test_is_reported() {
        let decls = names(&["t"]);
        match parse_test("t & u", &decls) {
            Err(LogicError::UndeclaredTest { name, offset }) => {
                assert_eq!(name, "u");
                assert_eq!(offset, 4);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn iff_and_or_desugar() {
        let decls = names(&["a", "b"]);
        let or = parse_test("a | b", &decls).unwrap();
        assert_eq!(or, parse_test("!(!a & !b)", &decls).unwrap());
        let iff = parse_test("a <=> b", &decls).unwrap();
        assert_eq!(iff, parse_test("(a => b) & (b => a)", &decls).unwrap());
    }

    #[test]
    fn arrow_is_right_associative() {
        let decls = names(&["a", "b", "c"]);
        assert_eq!(
            parse_test("a => b => c", &decls).unwrap(),
            parse_test("a => (b => c)", &decls).unwrap()
        );
    }

    #[test]
    fn precedence_bang_amp_pipe_arrow() {
        let decls = names(&["a", "b", "c"]);
        assert_eq!(
            parse_test("!a & b | c", &decls).unwrap(),
            parse_test("((!a) & b) | c", &decls).unwrap()
        );
        assert_eq!(
            parse_test("a & b => c", &decls).unwrap(),
            parse_test("(a & b) => c", &decls).unwrap()
        );
    }

    #[test]
    fn contradiction_is_false_in_standard_mode() {
        let decls = names(&["t"]);
        let basis = Basis::standard(1);
        let t = parse_test("t & !t", &decls).unwrap();
        for bits in [vec![false], vec![true]] {
            let w = World { bits };
            assert!(!basis.eval(&t, &w, &decls).unwrap());
        }
    }

    #[test]
    fn nonstandard_world_can_hold_a_contradiction() {
        let decls = names(&["t"]);
        let contradiction = parse_test("t & !t", &decls).unwrap();
        let basis = Basis::nonstandard(vec![
            parse_test("t", &decls).unwrap(),
            contradiction.clone(),
        ]);
        let w = World { bits: vec![false, true] };
        assert!(basis.eval(&contradiction, &w, &decls).unwrap());
        // a test outside T* has no value
        let outside = parse_test("!t", &decls).unwrap();
        assert!(matches!(
            basis.eval(&outside, &w, &decls),
            Err(LogicError::TestOutsideBasis { .. })
        ));
    }

    #[test]
    fn atom_entailments() {
        let decls = names(&["t1", "t2"]);
        let basis = Basis::standard(2);
        let w = World { bits: vec![true, false] }; // t1 & !t2
        assert!(entails(&basis, &w, &parse_test("!t2", &decls).unwrap(), &decls).unwrap());
        assert!(entails(&basis, &w, &parse_test("!(t1 & t2)", &decls).unwrap(), &decls).unwrap());
        assert!(!entails(&basis, &w, &parse_test("t1 & t2", &decls).unwrap(), &decls).unwrap());
    }

    #[test]
    fn empty_theory_enumerates_full_truth_table_in_lex_order() {
        let decls = names(&["t1", "t2"]);
        let worlds =
            enumerate_worlds(&Basis::standard(2), &Theory::empty(), &decls, 16).unwrap();
        let labels: Vec<String> = worlds.iter().map(World::label).collect();
        assert_eq!(labels, vec!["00", "01", "10", "11"]);
    }

    #[test]
    fn unsatisfiable_axiom_yields_empty_list() {
        let decls = names(&["t"]);
        let theory = Theory::new(vec![parse_test("t & !t", &decls).unwrap()]);
        let worlds = enumerate_worlds(&Basis::standard(1), &theory, &decls, 16).unwrap();
        assert!(worlds.is_empty());
    }

    #[test]
    fn basis_limit_is_enforced() {
        let decls: Vec<String> = (0..5).map(|i| format!("t{i}")).collect();
        let err = enumerate_worlds(&Basis::standard(5), &Theory::empty(), &decls, 4);
        assert!(matches!(err, Err(LogicError::BasisTooLarge { size: 5, limit: 4 })));
    }

    #[test]
    fn biconditional_theory_links_tests() {
        // No surviving atom sets L090 true with D010 false.
        let decls = names(&["L090", "D010"]);
        let theory = Theory::new(vec![parse_test("L090 <=> D010", &decls).unwrap()]);
        let worlds = enumerate_worlds(&Basis::standard(2), &theory, &decls, 16).unwrap();
        assert_eq!(worlds.len(), 2);
        for w in &worlds {
            assert_eq!(w.bits[0], w.bits[1]);
        }
    }

    #[test]
    fn nonstandard_axiom_must_be_in_t_star() {
        let decls = names(&["t", "u"]);
        let basis = Basis::nonstandard(vec![parse_test("t", &decls).unwrap()]);
        let theory = Theory::new(vec![parse_test("u", &decls).unwrap()]);
        assert!(matches!(
            enumerate_worlds(&basis, &theory, &decls, 16),
            Err(LogicError::NonstandardAxiomOutsideBasis { .. })
        ));
    }

    #[test]
    fn theory_dedups_preserving_order() {
        let decls = names(&["a", "b"]);
        let t1 = parse_test("a", &decls).unwrap();
        let t2 = parse_test("b", &decls).unwrap();
        let theory = Theory::new(vec![t1.clone(), t2.clone(), t1.clone()]);
        assert_eq!(theory.axioms(), &[t1, t2]);
    }

    // Independent truth-table oracle: computes the satisfying set of a
    // formula bottom-up as a set of assignment indices, without going
    // through Basis::eval.
    fn satisfying_set(t: &TestFormula, n: usize) -> HashSet<usize> {
        let all: HashSet<usize> = (0..(1 << n)).collect();
        match t {
            TestFormula::Prim(i) => all
                .into_iter()
                .filter(|c| (c >> (n - 1 - i)) & 1 == 1)
                .collect(),
            TestFormula::Not(inner) => {
                let s = satisfying_set(inner, n);
                all.difference(&s).copied().collect()
            }
            TestFormula::And(a, b) => {
                let sa = satisfying_set(a, n);
                let sb = satisfying_set(b, n);
                sa.intersection(&sb).copied().collect()
            }
        }
    }

    #[test]
    fn atom_consistency_matches_truth_table_oracle() {
        let decls = names(&["a", "b", "c"]);
        let cases = [
            "a => b & c",
            "a <=> !b",
            "(a | b) & !c",
            "!(a & !b) & (c => a)",
            "a & !a",
        ];
        for text in cases {
            let t = parse_test(text, &decls).unwrap();
            let theory = Theory::new(vec![t.clone()]);
            let worlds =
                enumerate_worlds(&Basis::standard(3), &theory, &decls, 16).unwrap();
            let got: HashSet<usize> = worlds
                .iter()
                .map(|w| {
                    w.bits
                        .iter()
                        .fold(0usize, |acc, &b| (acc << 1) | usize::from(b))
                })
                .collect();
            assert_eq!(got, satisfying_set(&t, 3), "mismatch for {text}");
        }
    }

    #[test]
    fn exactly_one_of_t_and_not_t_holds_standard() {
        let decls = names(&["a", "b"]);
        let basis = Basis::standard(2);
        let worlds = enumerate_worlds(&basis, &Theory::empty(), &decls, 16).unwrap();
        let formulas = ["a", "a & b", "a => b", "!(a | b)", "a <=> b"];
        for text in formulas {
            let t = parse_test(text, &decls).unwrap();
            let nt = TestFormula::not(t.clone());
            for w in &worlds {
                let a = basis.eval(&t, w, &decls).unwrap();
                let b = basis.eval(&nt, w, &decls).unwrap();
                assert!(a ^ b);
            }
        }
    }

    #[test]
    fn nonstandard_with_primitive_basis_matches_standard() {
        let decls = names(&["a", "b"]);
        let std_basis = Basis::standard(2);
        let ns_basis = Basis::nonstandard(vec![
            parse_test("a", &decls).unwrap(),
            parse_test("b", &decls).unwrap(),
        ]);
        let theory = Theory::new(vec![parse_test("a", &decls).unwrap()]);
        let w_std = enumerate_worlds(&std_basis, &theory, &decls, 16).unwrap();
        let w_ns = enumerate_worlds(&ns_basis, &theory, &decls, 16).unwrap();
        assert_eq!(w_std, w_ns);
    }
}
