//! Reduction of an orbit-finite system to a finite system with
//! polynomial coefficients in the parameter `n`.
//!
//! A finitary solution touching at most `n` atoms is constant on each
//! column orbit once symmetrized, so one rational unknown per column orbit
//! (the orbit sum) suffices. Constraint rows collapse the same way: two row
//! tuples that pick out tracked atoms at the same positions `I` of the same
//! orbit impose the same inequality on orbit sums. For such a pattern
//! `(i, I)` and a column orbit `j`, the inequality's coefficient counts,
//! for every stored coefficient at a partial injection `iota` compatible
//! with `I`, how many column tuples realize exactly that equality pattern:
//! a falling factorial in `n`. The second stage multiplies each column by
//! the positive factor needed to bring every term to one common degree,
//! which makes the finite systems grow monotonically in `n`.

use std::fmt;

use crate::numerics::{Int, Polynomial};
use crate::orbit::OrbitSystem;
use crate::paramlp::ParamSystem;

/// A constraint pattern: row orbit `row` with tracked atoms at the 1-based
/// positions in `I` (stored as a bitmask over `0..dim`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RowPattern {
    pub row: usize,
    mask: u32,
}

impl RowPattern {
    pub fn new(row: usize, positions: &[usize]) -> Self {
        let mut mask = 0;
        for &p in positions {
            assert!(p >= 1, "positions are 1-based");
            mask |= 1 << (p - 1);
        }
        RowPattern { row, mask }
    }

    /// 1-based tracked positions in increasing order.
    pub fn positions(&self) -> Vec<usize> {
        (0..32)
            .filter(|k| self.mask & (1 << k) != 0)
            .map(|k| k + 1)
            .collect()
    }

    /// Number of tracked positions.
    pub fn tracked(&self) -> usize {
        self.mask.count_ones() as usize
    }

    /// Whether every position of `mask` is tracked here.
    fn covers(&self, mask: u32) -> bool {
        mask & !self.mask == 0
    }
}

impl fmt::Display for RowPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {{", self.row + 1)?;
        for (k, p) in self.positions().iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "}})")
    }
}

/// All patterns in deterministic order: by row orbit, then subsets in
/// binary-counting order (the empty set first).
pub fn enumerate_row_patterns(sys: &OrbitSystem) -> Vec<RowPattern> {
    let mut out = Vec::new();
    for (i, r) in sys.rows.iter().enumerate() {
        assert!(r.dim < 32, "row orbit dimension too large");
        for mask in 0..(1u32 << r.dim) {
            out.push(RowPattern { row: i, mask });
        }
    }
    out
}

/// First reduction stage: one parametric inequality per row pattern, one
/// unknown per column orbit. Patterns whose inequality normalizes to
/// `0 >= 0` are dropped; `0 >= q` rows with `q` nonzero are kept.
pub fn build_p1(sys: &OrbitSystem) -> ParamSystem {
    let violations = sys.validate();
    assert!(violations.is_empty(), "invalid system: {}", violations[0]);
    assert!(
        sys.is_canonical(),
        "system must be canonicalized before reduction"
    );
    let mut p = ParamSystem::new(sys.cols.len());
    for pattern in enumerate_row_patterns(sys) {
        let i = pattern.row;
        let tracked = pattern.tracked();
        let lhs: Vec<Polynomial> = (0..sys.cols.len())
            .map(|j| {
                let mut acc = Polynomial::zero();
                for (inj, value) in sys.coeffs_of(i, j) {
                    // A coefficient contributes only when the row tuple's
                    // matched positions all carry tracked atoms; the other
                    // column positions then range over the remaining
                    // tracked atoms without repetition.
                    if pattern.covers(inj.domain_mask()) {
                        let free = sys.cols[j].dim - inj.defined_count();
                        let count = Polynomial::falling_factorial(free, tracked);
                        acc += &count.scale(value);
                    }
                }
                acc
            })
            .collect();
        p.push(lhs, Polynomial::constant(sys.rows[i].target.clone()));
    }
    p
}

/// The reduction output: the degree-equalized system over orbit sums, the
/// per-orbit objective, and the parameter floor from which the finite
/// instantiations and the parametric system agree.
#[derive(Debug, Clone)]
pub struct ReducedProgram {
    pub system: ParamSystem,
    pub objective: Vec<Int>,
    /// Largest orbit dimension `d` of the input system.
    pub dim: usize,
    /// Instantiations with at least `2d` atoms match the parametric system.
    pub n_floor: u64,
}

/// Second reduction stage: rescale so every coefficient has one common
/// degree `d`. The unknown of a column orbit of dimension `e` is multiplied
/// by the `(d - e)`-factor falling factorial starting at `n - e`, and the
/// target by the full `d`-factor one; for `n >= d` all factors are
/// positive, and splitting a falling factorial shows each left-hand
/// coefficient becomes the stored count extended to exactly `d` factors.
pub fn build_p2(sys: &OrbitSystem) -> ReducedProgram {
    let p1 = build_p1(sys);
    let d = sys.atom_dimension();
    let lhs_factors: Vec<Polynomial> = sys
        .cols
        .iter()
        .map(|c| Polynomial::falling_factorial(d - c.dim, c.dim))
        .collect();
    let rhs_factor = Polynomial::falling_factorial(d, 0);
    let mut system = ParamSystem::new(sys.cols.len());
    for e in &p1.ineqs {
        system.ineqs.push(
            e.scaled(&lhs_factors, &rhs_factor)
                .expect("scaling by nonzero factors keeps the row nontrivial"),
        );
    }
    ReducedProgram {
        system,
        objective: sys.cols.iter().map(|c| c.objective.clone()).collect(),
        dim: d,
        n_floor: 2 * d as u64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::int;
    use crate::orbit::parse_system;

    fn poly(coeffs: &[i64]) -> Polynomial {
        Polynomial::from_coeffs(coeffs.iter().map(|&c| int(c)).collect())
    }

    const SUM_OF_OTHERS: &str = "rows: 1\ncols: 1\ncoef 1 1 0 1\ntarget 1 1\n";

    /// Vertex/edge system over one 1-dimensional and one 2-dimensional
    /// column orbit; the edge coefficients are +1 outgoing, -2 incoming.
    const VERTEX_EDGE: &str = "\
rows: 1 0
cols: 1 2
coef 1 1 1 -1
coef 1 2 1 1
coef 1 2 2 -2
coef 2 1 - 1
target 2 1
objective 2 3
";

    /// Same but with incoming coefficient -1: the edge terms cancel.
    const VERTEX_EDGE_CANCELLING: &str = "\
rows: 1 0
cols: 1 2
coef 1 1 1 -1
coef 1 2 1 1
coef 1 2 2 -1
coef 2 1 - 1
target 2 1
";

    #[test]
    fn pattern_enumeration_order() {
        let sys = OrbitSystem::new(&[2, 0], &[1]);
        let pats = enumerate_row_patterns(&sys);
        let shown: Vec<String> = pats.iter().map(|p| p.to_string()).collect();
        assert_eq!(
            shown,
            vec!["(1, {})", "(1, {1})", "(1, {2})", "(1, {1,2})", "(2, {})"]
        );
        assert_eq!(pats[3].tracked(), 2);
        assert_eq!(pats[3].positions(), vec![1, 2]);
    }

    #[test]
    fn single_orbit_first_stage() {
        let sys = parse_system(SUM_OF_OTHERS).unwrap();
        let p1 = build_p1(&sys);
        // Pattern ({}): all n tracked atoms are summed; pattern ({1}): the
        // row's own atom is excluded, leaving n - 1.
        assert_eq!(p1.ineqs.len(), 2);
        assert_eq!(p1.ineqs[0].to_string(), "n·x1 >= 1");
        assert_eq!(p1.ineqs[1].to_string(), "(n - 1)·x1 >= 1");
    }

    #[test]
    fn single_orbit_second_stage() {
        let sys = parse_system(SUM_OF_OTHERS).unwrap();
        let r = build_p2(&sys);
        assert_eq!(r.dim, 1);
        assert_eq!(r.n_floor, 2);
        assert_eq!(r.objective, vec![int(0)]);
        assert_eq!(r.system.ineqs.len(), 2);
        assert_eq!(r.system.ineqs[0].to_string(), "n·x1 >= n");
        assert_eq!(r.system.ineqs[1].to_string(), "(n - 1)·x1 >= n");
    }

    #[test]
    fn vertex_edge_first_stage() {
        let sys = parse_system(VERTEX_EDGE).unwrap();
        let p1 = build_p1(&sys);
        // The ({}) pattern of the first row orbit has no compatible
        // coefficients and drops as 0 >= 0.
        assert_eq!(p1.ineqs.len(), 2);
        assert_eq!(p1.ineqs[0].to_string(), "-x1 - (n - 1)·x2 >= 0");
        assert_eq!(p1.ineqs[1].to_string(), "n·x1 >= 1");
        assert_eq!(p1.ineqs[0].lhs(), &[poly(&[-1]), poly(&[1, -1])]);
    }

    #[test]
    fn vertex_edge_second_stage() {
        let sys = parse_system(VERTEX_EDGE).unwrap();
        let r = build_p2(&sys);
        assert_eq!(r.dim, 2);
        assert_eq!(r.n_floor, 4);
        assert_eq!(r.objective, vec![int(0), int(3)]);
        assert_eq!(r.system.ineqs[0].lhs(), &[poly(&[1, -1]), poly(&[1, -1])]);
        assert_eq!(r.system.ineqs[0].rhs(), &Polynomial::zero());
        assert_eq!(r.system.ineqs[1].lhs(), &[poly(&[0, -1, 1]), poly(&[])]);
        assert_eq!(r.system.ineqs[1].rhs(), &poly(&[0, -1, 1]));
        assert_eq!(
            r.system.ineqs[0].to_string(),
            "-(n - 1)·x1 - (n - 1)·x2 >= 0"
        );
        assert_eq!(r.system.ineqs[1].to_string(), "(n^2 - n)·x1 >= n^2 - n");
    }

    #[test]
    fn cancelling_edges_lose_the_edge_unknown() {
        let sys = parse_system(VERTEX_EDGE_CANCELLING).unwrap();
        let p1 = build_p1(&sys);
        assert_eq!(p1.ineqs.len(), 2);
        assert_eq!(p1.ineqs[0].to_string(), "-x1 >= 0");
        assert_eq!(p1.ineqs[1].to_string(), "n·x1 >= 1");
    }

    #[test]
    fn multi_injection_counting() {
        // One row orbit of dimension 1 against a 2-dimensional column
        // orbit with all three injection shapes present. The untracked
        // pattern only admits the empty injection and counts n(n-1)
        // pairs; the tracked one adds the two matched shapes:
        // (n-1)(n-2) + 5(n-1) + 7(n-1) = n^2 + 9n - 10.
        let text = "rows: 1\ncols: 2\ncoef 1 1 0 1\ncoef 1 1 1 5\ncoef 1 1 2 7\n";
        let sys = parse_system(text).unwrap();
        let p1 = build_p1(&sys);
        assert_eq!(p1.ineqs.len(), 2);
        assert_eq!(p1.ineqs[0].lhs(), &[poly(&[0, -1, 1])]);
        assert_eq!(p1.ineqs[1].lhs(), &[poly(&[-10, 9, 1])]);
    }

    #[test]
    fn constant_infeasible_row_is_kept() {
        // A 0-dimensional row with no coefficients and positive target
        // stays as the (unsatisfiable) constant row 0 >= 1.
        let sys = parse_system("rows: 0\ncols: 1\ntarget 1 1\n").unwrap();
        let p1 = build_p1(&sys);
        assert_eq!(p1.ineqs.len(), 1);
        assert_eq!(p1.ineqs[0].to_string(), "0 >= 1");
        // With target 0 it normalizes away instead.
        let sys0 = parse_system("rows: 0\ncols: 1\n").unwrap();
        assert_eq!(build_p1(&sys0).ineqs.len(), 0);
    }

    #[test]
    fn coefficient_degrees_stay_within_dimension() {
        let sys = parse_system(VERTEX_EDGE).unwrap();
        let r = build_p2(&sys);
        for e in &r.system.ineqs {
            for p in e.lhs() {
                assert!(p.degree() <= r.dim);
            }
            assert!(e.rhs().degree() <= r.dim);
        }
    }
}
