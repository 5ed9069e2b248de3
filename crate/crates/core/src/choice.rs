//! The choice-program DSL and its compilation to semantic tables.
//!
//! A choice program is either a primitive choice, a conditional
//! `if t then a else b` over a test, or a rational-weighted mixture
//! `mix { 1/2: a ; 1/2: b }`. Programs without mixtures form the
//! language `A`; with mixtures, `A+`.
//!
//! [`compile`] turns a program into its semantic vector: one
//! distribution over primitive choices per consistent world, computed
//! by recursive branch selection (conditionals pick the branch the
//! world entails) and exact rational mixing. Two programs are
//! equivalent relative to the file's theory exactly when their tables
//! agree row by row.

use crate::lexer::{tokenize, Cursor, SyntaxError, Tok};
use crate::logic::{Basis, LogicError, TestFormula, World};
use crate::rational::{format_rational, parse_rational, Rational};
use num_traits::{One, Zero};
use std::collections::HashMap;

/// A syntactic choice program.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ChoiceProgram {
    /// A declared primitive choice, by index in the declared order.
    Prim(usize),
    If {
        test: TestFormula,
        then_branch: Box<ChoiceProgram>,
        else_branch: Box<ChoiceProgram>,
    },
    /// Weights are rationals in (0,1] summing exactly to 1.
    Mix(Vec<(Rational, ChoiceProgram)>),
}

impl ChoiceProgram {
    /// True iff the program contains no mixture node (language `A`).
    pub fn is_pure(&self) -> bool {
        match self {
            ChoiceProgram::Prim(_) => true,
            ChoiceProgram::If { then_branch, else_branch, .. } => {
                then_branch.is_pure() && else_branch.is_pure()
            }
            ChoiceProgram::Mix(_) => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ChoiceError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    Logic(#[from] LogicError),
    #[error("undeclared primitive choice {name:?} at offset {offset}")]
    UndeclaredPrimitive { name: String, offset: usize },
    #[error("mixture weight {weight} at offset {offset} is outside (0,1]")]
    WeightOutOfRange { weight: String, offset: usize },
    #[error("mixture weights sum to {sum}, not 1")]
    WeightsDoNotSumToOne { sum: String },
}

/// Parses a choice program.
///
/// ```text
/// choice := "mix" "{" weighted ( ";" weighted )* "}" | cond ;
/// weighted := RATIONAL ":" choice ;
/// cond := IDENT | "if" test "then" choice "else" choice | "(" choice ")" ;
/// RATIONAL := INT | INT "/" INT (positive).
/// ```
pub fn parse_choice(
    text: &str,
    primitives: &[String],
    tests: &[String],
) -> Result<ChoiceProgram, ChoiceError> {
    let toks = tokenize(text)?;
    let mut cur = Cursor::new(toks);
    let prim_index: HashMap<&str, usize> = primitives
        .iter()
        .enumerate()
        .map(|(i, n)| (n.as_str(), i))
        .collect();
    let test_index: HashMap<&str, usize> = tests
        .iter()
        .enumerate()
        .map(|(i, n)| (n.as_str(), i))
        .collect();
    let c = parse_choice_inner(&mut cur, &prim_index, &test_index)?;
    if !cur.at_eof() {
        return Err(cur
            .error_here(&format!("unexpected {}", cur.peek().tok))
            .into());
    }
    Ok(c)
}

fn parse_choice_inner(
    cur: &mut Cursor,
    prims: &HashMap<&str, usize>,
    tests: &HashMap<&str, usize>,
) -> Result<ChoiceProgram, ChoiceError> {
    if cur.peek().tok == Tok::KwMix {
        cur.bump();
        cur.eat(&Tok::LBrace)?;
        let mut arms = vec![parse_weighted(cur, prims, tests)?];
        while cur.peek().tok == Tok::Semi {
            cur.bump();
            arms.push(parse_weighted(cur, prims, tests)?);
        }
        cur.eat(&Tok::RBrace)?;
        let sum: Rational = arms.iter().map(|(w, _)| w.clone()).sum();
        if !sum.is_one() {
            return Err(ChoiceError::WeightsDoNotSumToOne {
                sum: format_rational(&sum),
            });
        }
        Ok(ChoiceProgram::Mix(arms))
    } else {
        parse_cond(cur, prims, tests)
    }
}

fn parse_weighted(
    cur: &mut Cursor,
    prims: &HashMap<&str, usize>,
    tests: &HashMap<&str, usize>,
) -> Result<(Rational, ChoiceProgram), ChoiceError> {
    let offset = cur.peek().offset;
    let weight = parse_weight(cur)?;
    if weight <= Rational::zero() || weight > Rational::one() {
        return Err(ChoiceError::WeightOutOfRange {
            weight: format_rational(&weight),
            offset,
        });
    }
    cur.eat(&Tok::Colon)?;
    let c = parse_choice_inner(cur, prims, tests)?;
    Ok((weight, c))
}

fn parse_weight(cur: &mut Cursor) -> Result<Rational, ChoiceError> {
    let sp = cur.bump();
    let numer = match sp.tok {
        Tok::Int(s) => s,
        other => {
            return Err(SyntaxError {
                offset: sp.offset,
                message: format!("expected a rational weight, found {other}"),
            }
            .into())
        }
    };
    let text = if cur.peek().tok == Tok::Slash {
        cur.bump();
        let dsp = cur.bump();
        match dsp.tok {
            Tok::Int(d) => format!("{numer}/{d}"),
            other => {
                return Err(SyntaxError {
                    offset: dsp.offset,
                    message: format!("expected a denominator, found {other}"),
                }
                .into())
            }
        }
    } else {
        numer
    };
    parse_rational(&text).map_err(|e| {
        SyntaxError {
            offset: sp.offset,
            message: e.to_string(),
        }
        .into()
    })
}

fn parse_cond(
    cur: &mut Cursor,
    prims: &HashMap<&str, usize>,
    tests: &HashMap<&str, usize>,
) -> Result<ChoiceProgram, ChoiceError> {
    match cur.peek().tok.clone() {
        Tok::KwIf => {
            cur.bump();
            let test = parse_embedded_test(cur, tests)?;
            cur.eat(&Tok::KwThen)?;
            let then_branch = parse_choice_inner(cur, prims, tests)?;
            cur.eat(&Tok::KwElse)?;
            let else_branch = parse_choice_inner(cur, prims, tests)?;
            Ok(ChoiceProgram::If {
                test,
                then_branch: Box::new(then_branch),
                else_branch: Box::new(else_branch),
            })
        }
        Tok::LParen => {
            cur.bump();
            let c = parse_choice_inner(cur, prims, tests)?;
            cur.eat(&Tok::RParen)?;
            Ok(c)
        }
        Tok::Ident(name) => {
            let sp = cur.bump();
            match prims.get(name.as_str()) {
                Some(&i) => Ok(ChoiceProgram::Prim(i)),
                None => Err(ChoiceError::UndeclaredPrimitive {
                    name,
                    offset: sp.offset,
                }),
            }
        }
        other => Err(cur
            .error_here(&format!("expected a choice, found {other}"))
            .into()),
    }
}

// The test grammar embedded in a conditional; 'then' terminates it
// because keywords are not identifiers.
fn parse_embedded_test(
    cur: &mut Cursor,
    tests: &HashMap<&str, usize>,
) -> Result<TestFormula, ChoiceError> {
    Ok(crate::logic::parse_test_from(cur, tests)?)
}

/// The compiled semantic vector of a program: one exact distribution
/// over primitive choices per world, in world-enumeration order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChoiceTable {
    /// `rows[w][p]` is the weight of primitive `p` at world `w`.
    pub rows: Vec<Vec<Rational>>,
}

impl ChoiceTable {
    pub fn world_count(&self) -> usize {
        self.rows.len()
    }

    /// Flattens to the shared (world, primitive) vector layout:
    /// world-major, declared-primitive-minor.
    pub fn as_vector(&self) -> Vec<Rational> {
        self.rows.iter().flatten().cloned().collect()
    }

    /// True iff every row is a point mass (language `A` semantics).
    pub fn is_point_mass(&self) -> bool {
        self.rows.iter().all(|row| {
            row.iter().filter(|w| !w.is_zero()).count() == 1
                && row.iter().any(|w| w.is_one())
        })
    }
}

/// Compiles a program over an enumerated world list.
///
/// Each row is the point mass at the primitive selected by recursive
/// branch evaluation, or the weight-mixed combination for mixtures.
pub fn compile(
    program: &ChoiceProgram,
    basis: &Basis,
    worlds: &[World],
    names: &[String],
    primitive_count: usize,
) -> Result<ChoiceTable, ChoiceError> {
    let mut rows = Vec::with_capacity(worlds.len());
    for w in worlds {
        rows.push(compile_row(program, basis, w, names, primitive_count)?);
    }
    Ok(ChoiceTable { rows })
}

fn compile_row(
    program: &ChoiceProgram,
    basis: &Basis,
    w: &World,
    names: &[String],
    primitive_count: usize,
) -> Result<Vec<Rational>, ChoiceError> {
    match program {
        ChoiceProgram::Prim(i) => {
            let mut row = vec![Rational::zero(); primitive_count];
            row[*i] = Rational::one();
            Ok(row)
        }
        ChoiceProgram::If { test, then_branch, else_branch } => {
            let branch = if basis.eval(test, w, names)? {
                then_branch
            } else {
                else_branch
            };
            compile_row(branch, basis, w, names, primitive_count)
        }
        ChoiceProgram::Mix(arms) => {
            let mut row = vec![Rational::zero(); primitive_count];
            for (weight, sub) in arms {
                let sub_row = compile_row(sub, basis, w, names, primitive_count)?;
                for (acc, val) in row.iter_mut().zip(sub_row) {
                    *acc += weight.clone() * val;
                }
            }
            Ok(row)
        }
    }
}

/// AX-equivalence: identical tables over the consistent worlds.
pub fn equivalent(
    a: &ChoiceProgram,
    b: &ChoiceProgram,
    basis: &Basis,
    worlds: &[World],
    names: &[String],
    primitive_count: usize,
) -> Result<bool, ChoiceError> {
    let ta = compile(a, basis, worlds, names, primitive_count)?;
    let tb = compile(b, basis, worlds, names, primitive_count)?;
    Ok(ta == tb)
}
