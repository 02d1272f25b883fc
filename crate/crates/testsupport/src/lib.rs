//! Shared test machinery: a brute-force LP oracle based on vertex
//! enumeration, an exact dense linear solver, and seeded random generators
//! for finite LPs and orbit systems.
//!
//! The oracle is deliberately naive (try every potential active set) so it
//! shares no code paths with the simplex kernel it cross-checks. It is
//! meant for the small instances the test corpora produce: a handful of
//! unknowns, constraint coefficients of modest size. To cope with
//! unbounded or non-pointed feasible regions it first intersects the
//! region with a large coordinate box; whether the optimum moves when the
//! box grows tells bounded apart from unbounded.

use itertools::Itertools;
use num_traits::{One, Zero};
use rand::Rng;

use oflp::numerics::{int, rat, Int, Rational};
use oflp::orbit::{OrbitSystem, PartialInjection, Sense, VarSign};
use oflp::simplex::{Constraint, FiniteLP, LpOutcome};

/// Half-width of the coordinate box the oracle intersects with the
/// feasible region. Large enough that every vertex of every corpus
/// instance lies strictly inside.
pub const ORACLE_BOX: i64 = 1_000_000;

/// Solves `a · x = b` exactly by Gaussian elimination. `None` when the
/// matrix is singular.
pub fn solve_square(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let k = b.len();
    for col in 0..k {
        let pivot = (col..k).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        for r in 0..k {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = &a[r][col] / &a[col][col];
            for c in col..k {
                let delta = &factor * &a[col][c];
                a[r][c] = &a[r][c] - &delta;
            }
            let delta = &factor * &b[col];
            b[r] = &b[r] - &delta;
        }
    }
    Some((0..k).map(|r| &b[r] / &a[r][r]).collect())
}

fn all_rows(lp: &FiniteLP) -> Vec<Constraint> {
    lp.geq.iter().chain(lp.eq.iter()).cloned().collect()
}

/// All vertices of the feasible region: solutions of some maximal
/// linearly independent active set that satisfy every constraint.
pub fn feasible_vertices(lp: &FiniteLP) -> Vec<Vec<Rational>> {
    let rows = all_rows(lp);
    let mut out: Vec<Vec<Rational>> = Vec::new();
    for subset in (0..rows.len()).combinations(lp.num_vars) {
        let a: Vec<Vec<Rational>> = subset.iter().map(|&r| rows[r].coeffs.clone()).collect();
        let b: Vec<Rational> = subset.iter().map(|&r| rows[r].rhs.clone()).collect();
        if let Some(x) = solve_square(a, b) {
            if lp.satisfied_by(&x) && !out.contains(&x) {
                out.push(x);
            }
        }
    }
    out
}

/// The same region intersected with `|x_i| <= bound` for every coordinate.
pub fn boxed(lp: &FiniteLP, bound: &Rational) -> FiniteLP {
    let mut out = lp.clone();
    for i in 0..lp.num_vars {
        let mut lo = vec![Rational::zero(); lp.num_vars];
        lo[i] = Rational::one();
        out.push_geq(lo, -bound.clone());
        let mut hi = vec![Rational::zero(); lp.num_vars];
        hi[i] = -Rational::one();
        out.push_geq(hi, -bound.clone());
    }
    out
}

fn vertex_max(lp: &FiniteLP, objective: &[Rational]) -> Option<(Rational, Vec<Rational>)> {
    let mut best: Option<(Rational, Vec<Rational>)> = None;
    for x in feasible_vertices(lp) {
        let value: Rational = objective.iter().zip(&x).map(|(c, v)| c * v).sum();
        if best.as_ref().is_none_or(|(b, _)| value > *b) {
            best = Some((value, x));
        }
    }
    best
}

/// Brute-force feasibility check, valid for instances whose region (if
/// nonempty) meets the oracle box.
pub fn oracle_feasibility(lp: &FiniteLP) -> LpOutcome {
    match feasible_vertices(&boxed(lp, &rat(ORACLE_BOX)))
        .into_iter()
        .next()
    {
        Some(witness) => LpOutcome::Feasible { witness },
        None => LpOutcome::Infeasible,
    }
}

/// Brute-force maximization. Unboundedness shows up as a strictly better
/// optimum once the box doubles.
pub fn oracle_maximize(lp: &FiniteLP, objective: &[Rational]) -> LpOutcome {
    let small = vertex_max(&boxed(lp, &rat(ORACLE_BOX)), objective);
    match small {
        None => LpOutcome::Infeasible,
        Some((value, witness)) => {
            let (grown, _) = vertex_max(&boxed(lp, &rat(2 * ORACLE_BOX + 1)), objective)
                .expect("region cannot vanish when the box grows");
            if grown > value {
                LpOutcome::Unbounded
            } else {
                LpOutcome::Optimal { witness, value }
            }
        }
    }
}

/// Every partial injection from positions `1..=p` into positions `1..=m`,
/// in a fixed deterministic order.
pub fn all_partial_injections(p: usize, m: usize) -> Vec<PartialInjection> {
    let mut out = Vec::new();
    for sources in (1..=p).powerset() {
        for targets in (1..=m).permutations(sources.len()) {
            let pairs: Vec<(usize, usize)> = sources
                .iter()
                .copied()
                .zip(targets.iter().copied())
                .collect();
            out.push(PartialInjection::from_pairs(p, m, &pairs).expect("pairs are injective"));
        }
    }
    out
}

fn nonzero_small(rng: &mut impl Rng) -> Int {
    loop {
        let v = rng.random_range(-3..=3i64);
        if v != 0 {
            return int(v);
        }
    }
}

/// Random small orbit system: up to three row and column orbits of
/// dimension at most two (lower dimensions more likely), coefficients in
/// `[-3, 3]` without zero at roughly 60% of the addressable cells. With
/// `canonical` false, rows and columns get random senses and signs.
pub fn random_orbit_system(rng: &mut impl Rng, canonical: bool) -> OrbitSystem {
    const DIM_POOL: [usize; 4] = [0, 1, 1, 2];
    let row_dims: Vec<usize> = (0..rng.random_range(1..=3usize))
        .map(|_| DIM_POOL[rng.random_range(0..DIM_POOL.len())])
        .collect();
    let col_dims: Vec<usize> = (0..rng.random_range(1..=3usize))
        .map(|_| DIM_POOL[rng.random_range(0..DIM_POOL.len())])
        .collect();
    let mut sys = OrbitSystem::new(&row_dims, &col_dims);
    for i in 0..row_dims.len() {
        for j in 0..col_dims.len() {
            for inj in all_partial_injections(row_dims[i], col_dims[j]) {
                if rng.random_bool(0.6) {
                    let value = nonzero_small(rng);
                    sys.set_coeff(i, j, inj, value);
                }
            }
        }
        sys.rows[i].target = int(rng.random_range(-3..=3i64));
        if !canonical && rng.random_bool(1.0 / 3.0) {
            sys.rows[i].sense = Sense::Eq;
        }
    }
    for j in 0..col_dims.len() {
        sys.cols[j].objective = int(rng.random_range(-3..=3i64));
        if !canonical && rng.random_bool(1.0 / 3.0) {
            sys.cols[j].sign = VarSign::Nonneg;
        }
    }
    sys
}

/// Random finite LP with at most `max_vars` unknowns and `max_rows` rows,
/// mixing inequalities and equalities, coefficients in `[-4, 4]`.
pub fn random_finite_lp(rng: &mut impl Rng, max_vars: usize, max_rows: usize) -> FiniteLP {
    let k = rng.random_range(1..=max_vars);
    let mut lp = FiniteLP::new(k);
    for _ in 0..rng.random_range(1..=max_rows) {
        let coeffs: Vec<Rational> = (0..k).map(|_| rat(rng.random_range(-4..=4i64))).collect();
        let rhs = rat(rng.random_range(-4..=4i64));
        if rng.random_bool(0.25) {
            lp.push_eq(coeffs, rhs);
        } else {
            lp.push_geq(coeffs, rhs);
        }
    }
    lp
}
