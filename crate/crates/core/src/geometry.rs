//! Exact rational cone geometry.
//!
//! Everything downstream reduces to two questions about a finitely
//! generated cone in the shared (world, primitive) vector layout:
//!
//! - membership: is `d` a nonnegative rational combination of the
//!   generators? Decided by exact phase-1 simplex with Bland's rule,
//!   returning the certificate coefficients on yes.
//! - duality: a finite generator set `G*` of the dual cone
//!   `{u : u.g >= 0 for all generators g}`, computed by the double
//!   description method. The module's core contract, checked by
//!   property tests: for every vector `d`,
//!   `member(d) <=> u.d >= 0 for all u in G*`.
//!
//! Dual generators include a +/- basis of the orthogonal complement of
//! the generator span, so lineality is expressed as ordinary ray
//! pairs and membership stays a single sweep of inequalities. Double
//! description is exponential in the worst case; a configurable ray
//! budget turns blowups into a clean error instead of a hang.

use crate::rational::Rational;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, OnceLock};

/// Dense exact vector in the shared layout.
pub type QVec = Vec<Rational>;

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .map(|(x, y)| x * y)
        .sum()
}

pub fn sub(a: &[Rational], b: &[Rational]) -> QVec {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn neg(a: &[Rational]) -> QVec {
    a.iter().map(|x| -x).collect()
}

pub fn is_zero_vec(a: &[Rational]) -> bool {
    a.iter().all(Rational::is_zero)
}

/// Scales a ray to its primitive integer form (clears denominators,
/// divides by the gcd); direction is preserved.
pub fn primitive_form(v: &[Rational]) -> QVec {
    let mut denom_lcm = BigInt::one();
    for x in v {
        denom_lcm = denom_lcm.lcm(x.denom());
    }
    let ints: Vec<BigInt> = v
        .iter()
        .map(|x| x.numer() * (&denom_lcm / x.denom()))
        .collect();
    let mut g = BigInt::zero();
    for n in &ints {
        g = g.gcd(n);
    }
    if g.is_zero() {
        return vec![Rational::zero(); v.len()];
    }
    ints.into_iter()
        .map(|n| Rational::from_integer(n / &g))
        .collect()
}

/// Cooperative cancellation for long-running solver calls. Cloned
/// tokens share one flag; `CancelToken::default()` never fires.
#[derive(Debug, Clone, Default)]
pub struct CancelToken {
    flag: Option<Arc<AtomicBool>>,
}

impl CancelToken {
    pub fn new() -> CancelToken {
        CancelToken {
            flag: Some(Arc::new(AtomicBool::new(false))),
        }
    }

    pub fn cancel(&self) {
        if let Some(flag) = &self.flag {
            flag.store(true, Ordering::Relaxed);
        }
    }

    pub fn is_cancelled(&self) -> bool {
        self.flag
            .as_ref()
            .map(|f| f.load(Ordering::Relaxed))
            .unwrap_or(false)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GeomError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("operation cancelled")]
    Cancelled,
    #[error("dual ray budget exceeded: {count} rays over limit {limit}")]
    RayLimitExceeded { count: usize, limit: usize },
    #[error("linear program is unbounded")]
    Unbounded,
}

// ---------------------------------------------------------------------------
// Exact simplex over {A x = b, x >= 0}
// ---------------------------------------------------------------------------

/// Row-reduces `[A | b]` to an independent subset of rows. Returns
/// `None` when the system is inconsistent (a zero row with nonzero
/// rhs). `A` is given by columns.
fn reduce_rows(
    columns: &[&[Rational]],
    rhs: &[Rational],
) -> Option<(Vec<Vec<Rational>>, Vec<Rational>)> {
    let n_cols = columns.len();
    let dim = rhs.len();
    // Identical coordinate rows are endemic here (many worlds share an
    // act pattern); they impose the same equation, so hash them away
    // before the echelon pass.
    let mut seen: std::collections::HashSet<Vec<Rational>> = std::collections::HashSet::new();
    // Echelon rows over [coeffs | rhs], with recorded pivot positions.
    let mut echelon: Vec<(usize, Vec<Rational>)> = Vec::new();
    for r in 0..dim {
        let mut row: Vec<Rational> = Vec::with_capacity(n_cols + 1);
        for col in columns {
            row.push(col[r].clone());
        }
        row.push(rhs[r].clone());
        if row.iter().all(Rational::is_zero) || !seen.insert(row.clone()) {
            continue;
        }
        for (pivot_col, base) in &echelon {
            if !row[*pivot_col].is_zero() {
                let factor = row[*pivot_col].clone();
                for (x, y) in row.iter_mut().zip(base) {
                    *x -= &factor * y;
                }
            }
        }
        match row[..n_cols].iter().position(|x| !x.is_zero()) {
            Some(p) => {
                let lead = row[p].clone();
                for x in row.iter_mut() {
                    *x /= &lead;
                }
                echelon.push((p, row));
            }
            None => {
                if !row[n_cols].is_zero() {
                    return None; // 0 = c, inconsistent
                }
            }
        }
    }
    let mut a = Vec::with_capacity(echelon.len());
    let mut b = Vec::with_capacity(echelon.len());
    for (_, row) in echelon {
        b.push(row[n_cols].clone());
        a.push(row[..n_cols].to_vec());
    }
    Some((a, b))
}

/// Exact two-phase simplex for `min c.x  s.t.  A x = b, x >= 0`.
///
/// With `objective = None` only feasibility is decided. Bland's rule
/// throughout, so the run is finite and deterministic.
fn simplex(
    a_rows: Vec<Vec<Rational>>,
    b: Vec<Rational>,
    objective: Option<&[Rational]>,
    cancel: &CancelToken,
) -> Result<Option<Vec<Rational>>, GeomError> {
    let m = a_rows.len();
    let n = if m > 0 { a_rows[0].len() } else { 0 };
    if m == 0 {
        // No constraints: x = 0 is optimal for any c >= 0 use; for a
        // general objective the problem could be unbounded, but all
        // call sites minimize nonnegative objectives.
        return Ok(Some(vec![Rational::zero(); n]));
    }

    // Tableau columns: n structural + m artificial.
    let total = n + m;
    let mut tab: Vec<Vec<Rational>> = Vec::with_capacity(m);
    let mut rhs: Vec<Rational> = Vec::with_capacity(m);
    for (i, mut row) in a_rows.into_iter().enumerate() {
        let mut bi = b[i].clone();
        if bi.is_negative() {
            for x in row.iter_mut() {
                *x = -x.clone();
            }
            bi = -bi;
        }
        let mut full = row;
        full.extend((0..m).map(|j| {
            if j == i {
                Rational::one()
            } else {
                Rational::zero()
            }
        }));
        tab.push(full);
        rhs.push(bi);
    }
    let mut basis: Vec<usize> = (n..total).collect();

    // Phase 1: minimize the sum of artificials.
    let mut cost: Vec<Rational> = vec![Rational::zero(); total];
    for c in cost.iter_mut().skip(n) {
        *c = Rational::one();
    }
    run_simplex(&mut tab, &mut rhs, &mut basis, &cost, Some(n), cancel)?;
    let phase1: Rational = basis
        .iter()
        .zip(&rhs)
        .filter(|(&v, _)| v >= n)
        .map(|(_, r)| r.clone())
        .sum();
    if !phase1.is_zero() {
        return Ok(None);
    }

    // Drive remaining artificials out of the basis (degenerate rows).
    for i in 0..m {
        if basis[i] >= n {
            if let Some(j) = (0..n).find(|&j| !tab[i][j].is_zero()) {
                pivot(&mut tab, &mut rhs, &mut basis, i, j);
            }
            // else: row is zero over structural columns; harmless.
        }
    }

    if let Some(c) = objective {
        let mut cost2 = c.to_vec();
        cost2.extend(vec![Rational::zero(); m]);
        run_simplex(&mut tab, &mut rhs, &mut basis, &cost2, Some(n), cancel)?;
    }

    let mut x = vec![Rational::zero(); n];
    for (i, &v) in basis.iter().enumerate() {
        if v < n {
            x[v] = rhs[i].clone();
        }
    }
    Ok(Some(x))
}

/// Bland-rule simplex iterations minimizing `cost`. Columns at index
/// `>= artificial_start` (when given) never re-enter the basis.
fn run_simplex(
    tab: &mut Vec<Vec<Rational>>,
    rhs: &mut Vec<Rational>,
    basis: &mut Vec<usize>,
    cost: &[Rational],
    artificial_start: Option<usize>,
    cancel: &CancelToken,
) -> Result<(), GeomError> {
    let m = tab.len();
    let total = cost.len();
    loop {
        if cancel.is_cancelled() {
            return Err(GeomError::Cancelled);
        }
        // Reduced costs: c_j - c_B . B^-1 A_j (tableau is kept in
        // basis-reduced form, so this is a direct sweep).
        let mut entering = None;
        'cols: for j in 0..total {
            if let Some(astart) = artificial_start {
                if j >= astart && !basis.contains(&j) {
                    continue;
                }
            }
            if basis.contains(&j) {
                continue;
            }
            let mut red = cost[j].clone();
            for i in 0..m {
                if !tab[i][j].is_zero() {
                    red -= &cost[basis[i]] * &tab[i][j];
                }
            }
            if red.is_negative() {
                entering = Some(j);
                break 'cols; // Bland: first improving column
            }
        }
        let Some(j) = entering else {
            return Ok(());
        };
        // Ratio test; Bland tie-break on smallest basic variable index.
        let mut leave: Option<(usize, Rational)> = None;
        for i in 0..m {
            if tab[i][j].is_positive() {
                let ratio = &rhs[i] / &tab[i][j];
                match &leave {
                    None => leave = Some((i, ratio)),
                    Some((li, lr)) => {
                        if ratio < *lr || (ratio == *lr && basis[i] < basis[*li]) {
                            leave = Some((i, ratio));
                        }
                    }
                }
            }
        }
        let Some((i, _)) = leave else {
            return Err(GeomError::Unbounded);
        };
        pivot(tab, rhs, basis, i, j);
    }
}

fn pivot(
    tab: &mut [Vec<Rational>],
    rhs: &mut [Rational],
    basis: &mut [usize],
    row: usize,
    col: usize,
) {
    let p = tab[row][col].clone();
    for x in tab[row].iter_mut() {
        *x /= &p;
    }
    rhs[row] /= &p;
    for i in 0..tab.len() {
        if i != row && !tab[i][col].is_zero() {
            let f = tab[i][col].clone();
            let src = tab[row].clone();
            for (x, y) in tab[i].iter_mut().zip(&src) {
                *x -= &f * y;
            }
            let d = rhs[row].clone();
            rhs[i] -= &f * &d;
        }
    }
    basis[row] = col;
}

/// Finds `x >= 0` with `sum x_i columns_i = target`, minimizing
/// `objective.x` when given. `None` means infeasible.
pub fn solve_nonneg_combination(
    columns: &[&[Rational]],
    target: &[Rational],
    objective: Option<&[Rational]>,
    cancel: &CancelToken,
) -> Result<Option<Vec<Rational>>, GeomError> {
    match reduce_rows(columns, target) {
        None => Ok(None),
        Some((a, b)) => simplex(a, b, objective, cancel),
    }
}

// ---------------------------------------------------------------------------
// Cone model
// ---------------------------------------------------------------------------

pub const DEFAULT_RAY_LIMIT: usize = 4096;

/// Coordinate classes of the generator matrix: coordinates whose
/// generator rows are identical impose the same membership equation,
/// so a query only has to check that the target is constant on each
/// class and then solve over one representative per class. Problem
/// instances routinely have thousands of world coordinates but only a
/// handful of distinct act patterns, so this collapses the system.
#[derive(Debug)]
struct RowClasses {
    class_of: Vec<u32>,
    reps: Vec<usize>,
}

fn compute_row_classes(generators: &[QVec], dim: usize) -> RowClasses {
    let mut map: std::collections::HashMap<Vec<Rational>, u32> = std::collections::HashMap::new();
    let mut class_of = Vec::with_capacity(dim);
    let mut reps = Vec::new();
    for c in 0..dim {
        let row: Vec<Rational> = generators.iter().map(|g| g[c].clone()).collect();
        let next_id = reps.len() as u32;
        let id = *map.entry(row).or_insert(next_id);
        if id == next_id {
            reps.push(c);
        }
        class_of.push(id);
    }
    RowClasses { class_of, reps }
}

/// A finitely generated cone with a lazily computed dual description.
#[derive(Debug)]
pub struct ConeModel {
    dim: usize,
    generators: Vec<QVec>,
    classes: OnceLock<RowClasses>,
    dual: OnceLock<Result<Vec<QVec>, GeomError>>,
    ray_limit: usize,
}

impl ConeModel {
    pub fn new(dim: usize, generators: Vec<QVec>) -> ConeModel {
        for g in &generators {
            assert_eq!(g.len(), dim, "generator dimension mismatch");
        }
        ConeModel {
            dim,
            generators,
            classes: OnceLock::new(),
            dual: OnceLock::new(),
            ray_limit: DEFAULT_RAY_LIMIT,
        }
    }

    pub fn with_ray_limit(mut self, limit: usize) -> ConeModel {
        self.ray_limit = limit;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[QVec] {
        &self.generators
    }

    /// Membership with certificate: exact nonnegative coefficients
    /// over the generators when `d` is in the cone.
    pub fn member(
        &self,
        d: &[Rational],
        cancel: &CancelToken,
    ) -> Result<Option<Vec<Rational>>, GeomError> {
        self.member_inner(d, None, cancel)
    }

    /// Membership, minimizing the total certificate mass — used when
    /// the coefficients are reported (canonical small witnesses).
    pub fn member_minimizing(
        &self,
        d: &[Rational],
        cancel: &CancelToken,
    ) -> Result<Option<Vec<Rational>>, GeomError> {
        let ones = vec![Rational::one(); self.generators.len()];
        self.member_inner(d, Some(&ones), cancel)
    }

    fn member_inner(
        &self,
        d: &[Rational],
        objective: Option<&[Rational]>,
        cancel: &CancelToken,
    ) -> Result<Option<Vec<Rational>>, GeomError> {
        if d.len() != self.dim {
            return Err(GeomError::DimensionMismatch {
                expected: self.dim,
                got: d.len(),
            });
        }
        if is_zero_vec(d) {
            return Ok(Some(vec![Rational::zero(); self.generators.len()]));
        }
        let classes = self
            .classes
            .get_or_init(|| compute_row_classes(&self.generators, self.dim));
        // Feasibility needs the target constant on every class.
        for (c, &k) in classes.class_of.iter().enumerate() {
            if d[c] != d[classes.reps[k as usize]] {
                return Ok(None);
            }
        }
        let small_cols: Vec<Vec<Rational>> = self
            .generators
            .iter()
            .map(|g| classes.reps.iter().map(|&r| g[r].clone()).collect())
            .collect();
        let small_target: Vec<Rational> = classes.reps.iter().map(|&r| d[r].clone()).collect();
        let col_refs: Vec<&[Rational]> = small_cols.iter().map(|c| c.as_slice()).collect();
        solve_nonneg_combination(&col_refs, &small_target, objective, cancel)
    }

    /// True iff both `d` and `-d` are members.
    pub fn in_lineality(&self, d: &[Rational], cancel: &CancelToken) -> Result<bool, GeomError> {
        Ok(self.member(d, cancel)?.is_some() && self.member(&neg(d), cancel)?.is_some())
    }

    /// The dual generator set `G*`: rays scaled to coprime integers,
    /// sorted lexicographically. Cached after the first call.
    pub fn dual_generators(&self, cancel: &CancelToken) -> Result<&[QVec], GeomError> {
        let res = self.dual.get_or_init(|| {
            dual_description(self.dim, &self.generators, self.ray_limit, cancel)
        });
        match res {
            Ok(rays) => Ok(rays.as_slice()),
            Err(e) => Err(e.clone()),
        }
    }
}

/// Double description: generators of `{u : u.g >= 0 for all g}`.
///
/// Starts from the +/- coordinate basis of the full space and inserts
/// one halfspace per cone generator, pruning redundant rays after each
/// step with exact membership tests.
fn dual_description(
    dim: usize,
    generators: &[QVec],
    ray_limit: usize,
    cancel: &CancelToken,
) -> Result<Vec<QVec>, GeomError> {
    let mut rays: Vec<QVec> = Vec::with_capacity(2 * dim);
    for i in 0..dim {
        let mut plus = vec![Rational::zero(); dim];
        plus[i] = Rational::one();
        let mut minus = vec![Rational::zero(); dim];
        minus[i] = -Rational::one();
        rays.push(plus);
        rays.push(minus);
    }

    let mut seen: Vec<QVec> = Vec::new();
    for g in generators {
        if is_zero_vec(g) || seen.contains(g) {
            continue;
        }
        seen.push(g.clone());
        if cancel.is_cancelled() {
            return Err(GeomError::Cancelled);
        }

        let products: Vec<Rational> = rays.iter().map(|r| dot(g, r)).collect();
        let mut next: Vec<QVec> = Vec::new();
        for (r, p) in rays.iter().zip(&products) {
            if !p.is_negative() {
                next.push(r.clone());
            }
        }
        for (ip, rp) in rays.iter().enumerate() {
            if !products[ip].is_positive() {
                continue;
            }
            for (inn, rn) in rays.iter().enumerate() {
                if !products[inn].is_negative() {
                    continue;
                }
                // alpha*n - beta*p with alpha = g.p > 0, beta = g.n < 0
                let alpha = &products[ip];
                let beta = &products[inn];
                let combo: QVec = rn
                    .iter()
                    .zip(rp)
                    .map(|(n_c, p_c)| alpha * n_c - beta * p_c)
                    .collect();
                if !is_zero_vec(&combo) {
                    next.push(primitive_form(&combo));
                }
            }
        }
        // Canonical forms, dedupe, then drop conically redundant rays.
        let mut canon: Vec<QVec> = Vec::new();
        for r in next {
            let c = primitive_form(&r);
            if !is_zero_vec(&c) && !canon.contains(&c) {
                canon.push(c);
            }
        }
        rays = prune_redundant(canon, cancel)?;
        if rays.len() > ray_limit {
            return Err(GeomError::RayLimitExceeded {
                count: rays.len(),
                limit: ray_limit,
            });
        }
    }

    let mut rays: Vec<QVec> = rays.into_iter().map(|r| primitive_form(&r)).collect();
    rays.sort_by(|a, b| a.partial_cmp(b).unwrap());
    rays.dedup();
    Ok(rays)
}

/// Greedy minimal generating subset: drops each ray expressible as a
/// nonnegative combination of the others still kept.
fn prune_redundant(rays: Vec<QVec>, cancel: &CancelToken) -> Result<Vec<QVec>, GeomError> {
    let mut kept: Vec<bool> = vec![true; rays.len()];
    for i in 0..rays.len() {
        if cancel.is_cancelled() {
            return Err(GeomError::Cancelled);
        }
        let others: Vec<&[Rational]> = rays
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i && kept[*j])
            .map(|(_, r)| r.as_slice())
            .collect();
        if others.is_empty() {
            continue;
        }
        if solve_nonneg_combination(&others, &rays[i], None, cancel)?.is_some() {
            kept[i] = false;
        }
    }
    Ok(rays
        .into_iter()
        .zip(kept)
        .filter_map(|(r, k)| k.then_some(r))
        .collect())
}
