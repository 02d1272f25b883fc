//! Brute-force expansion of an orbit system over a concrete finite atom set.
//!
//! Restricting the atoms to `{1..n}` turns each column orbit into finitely
//! many concrete unknowns (the non-repeating tuples) and each row orbit
//! into finitely many representative constraints: one per choice of which
//! row positions carry atoms from `{1..n}`, with the remaining positions
//! filled by fresh atoms `n+1, n+2, ...` that can never equal a column
//! atom. The resulting ordinary linear program serves as an independent
//! oracle for the polynomial reduction, and this module also hosts the
//! averaging operator used to show that solutions can be made symmetric
//! without changing their per-orbit sums.

use std::collections::HashMap;
use std::fmt;

use itertools::Itertools;
use num_traits::Zero;
use thiserror::Error;

use crate::numerics::Rational;
use crate::orbit::{OrbitSystem, PartialInjection, Sense, VarSign};
use crate::paramlp::MaxResult;
use crate::simplex::{maximize, FiniteLP, LpOutcome};

/// One concrete unknown: a non-repeating tuple of a column orbit.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ColumnLabel {
    pub orbit: usize,
    pub tuple: Vec<u64>,
}

impl fmt::Display for ColumnLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}({})", self.orbit + 1, self.tuple.iter().join(","))
    }
}

/// Provenance of one constraint row of the instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RowLabel {
    /// Representative tuple of a row orbit; entries above the atom count
    /// are the fresh atoms standing in for "any other atom".
    Orbit { orbit: usize, rep: Vec<u64> },
    /// Nonnegativity row appended for one column of a sign-restricted
    /// column orbit.
    ColumnSign { col: usize },
}

impl fmt::Display for RowLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RowLabel::Orbit { orbit, rep } => {
                write!(f, "row{}({})", orbit + 1, rep.iter().join(","))
            }
            RowLabel::ColumnSign { col } => write!(f, "sign of column {}", col + 1),
        }
    }
}

/// An orbit system expanded over the atoms `{1..n}`.
///
/// `row_labels` follows the constraint order of `lp`: first all inequality
/// rows, then all equality rows.
#[derive(Debug, Clone)]
pub struct FiniteInstance {
    pub lp: FiniteLP,
    pub column_labels: Vec<ColumnLabel>,
    pub row_labels: Vec<RowLabel>,
    pub atom_count: u64,
    pub col_orbit_count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstantiateError {
    #[error("averaging over {atoms} atoms needs {atoms}! permutations; refusing above 6")]
    SymmetrizeTooLarge { atoms: u64 },
}

/// All non-repeating `k`-tuples over `{1..n}` in lexicographic order.
fn tuples(n: u64, k: usize) -> Vec<Vec<u64>> {
    (1..=n).permutations(k).collect()
}

/// Expands `sys` over the atoms `{1..n}`.
///
/// Every valid system is accepted: equality rows become equality
/// constraints and sign-restricted column orbits contribute one `x >= 0`
/// row per concrete column, so canonicalizing before or after expanding
/// yields programs with the same solutions.
pub fn instantiate_finite(sys: &OrbitSystem, n: u64) -> FiniteInstance {
    let violations = sys.validate();
    assert!(violations.is_empty(), "invalid system: {}", violations[0]);

    let mut column_labels = Vec::new();
    for (j, c) in sys.cols.iter().enumerate() {
        for tuple in tuples(n, c.dim) {
            column_labels.push(ColumnLabel { orbit: j, tuple });
        }
    }
    let mut lp = FiniteLP::new(column_labels.len());
    let mut row_labels = Vec::new();
    let mut eq_labels = Vec::new();

    for (i, r) in sys.rows.iter().enumerate() {
        assert!(r.dim < 32, "row orbit dimension too large");
        for mask in 0..(1u32 << r.dim) {
            let tracked: Vec<usize> = (0..r.dim).filter(|k| mask & (1 << k) != 0).collect();
            for assignment in tuples(n, tracked.len()) {
                let mut rep = vec![0u64; r.dim];
                for (pos, atom) in tracked.iter().zip(&assignment) {
                    rep[*pos] = *atom;
                }
                let mut fresh = n;
                for slot in rep.iter_mut().filter(|a| **a == 0) {
                    fresh += 1;
                    *slot = fresh;
                }
                let coeffs: Vec<Rational> = column_labels
                    .iter()
                    .map(|cl| entry(sys, i, &rep, cl))
                    .collect();
                let rhs = Rational::from_integer(r.target.clone());
                let label = RowLabel::Orbit { orbit: i, rep };
                match r.sense {
                    Sense::Geq => {
                        lp.push_geq(coeffs, rhs);
                        row_labels.push(label);
                    }
                    Sense::Eq => {
                        lp.push_eq(coeffs, rhs);
                        eq_labels.push(label);
                    }
                }
            }
        }
    }
    for (col, cl) in column_labels.iter().enumerate() {
        if sys.cols[cl.orbit].sign == VarSign::Nonneg {
            let mut coeffs = vec![Rational::zero(); column_labels.len()];
            coeffs[col] = Rational::from_integer(1.into());
            lp.push_geq(coeffs, Rational::zero());
            row_labels.push(RowLabel::ColumnSign { col });
        }
    }
    row_labels.extend(eq_labels);

    FiniteInstance {
        lp,
        column_labels,
        row_labels,
        atom_count: n,
        col_orbit_count: sys.cols.len(),
    }
}

/// Coefficient at a concrete (row representative, column tuple) pair: the
/// stored value at the partial injection matching equal atoms, if any.
fn entry(sys: &OrbitSystem, row: usize, rep: &[u64], cl: &ColumnLabel) -> Rational {
    let mut pairs = Vec::new();
    for (s, a) in rep.iter().enumerate() {
        if let Some(t) = cl.tuple.iter().position(|&b| b == *a) {
            pairs.push((s + 1, t + 1));
        }
    }
    let inj = PartialInjection::from_pairs(rep.len(), cl.tuple.len(), &pairs)
        .expect("matching positions of non-repeating tuples is injective");
    Rational::from_integer(sys.coeff(row, cl.orbit, &inj))
}

impl FiniteInstance {
    /// Labeled text dump: the column list, then one line per constraint.
    pub fn to_text(&self) -> String {
        let mut out = format!("atoms: {}\n", self.atom_count);
        out.push_str("columns:");
        for cl in &self.column_labels {
            out.push(' ');
            out.push_str(&cl.to_string());
        }
        out.push('\n');
        let names: Vec<String> = self.column_labels.iter().map(|c| c.to_string()).collect();
        let rows = self
            .lp
            .geq
            .iter()
            .map(|c| (c, ">="))
            .chain(self.lp.eq.iter().map(|c| (c, "=")));
        for ((c, rel), label) in rows.zip(&self.row_labels) {
            out.push_str(&format!(
                "{}: {}\n",
                label,
                render_with_names(&c.coeffs, &names, rel, &c.rhs)
            ));
        }
        out
    }
}

fn render_with_names(coeffs: &[Rational], names: &[String], rel: &str, rhs: &Rational) -> String {
    let mut lhs = String::new();
    for (c, name) in coeffs.iter().zip(names) {
        if c.is_zero() {
            continue;
        }
        let negative = c < &Rational::zero();
        let magnitude = if negative { -c } else { c.clone() };
        if lhs.is_empty() {
            if negative {
                lhs.push('-');
            }
        } else {
            lhs.push_str(if negative { " - " } else { " + " });
        }
        if magnitude != Rational::from_integer(1.into()) {
            lhs.push_str(&format!("{magnitude}·"));
        }
        lhs.push_str(name);
    }
    if lhs.is_empty() {
        lhs.push('0');
    }
    format!("{lhs} {rel} {rhs}")
}

/// Supremum of the orbit objective over the expanded program. Finite
/// optima of ordinary linear programs are always attained.
pub fn oracle_supremum(sys: &OrbitSystem, n: u64) -> MaxResult {
    let inst = instantiate_finite(sys, n);
    let objective: Vec<Rational> = inst
        .column_labels
        .iter()
        .map(|cl| Rational::from_integer(sys.cols[cl.orbit].objective.clone()))
        .collect();
    match maximize(&inst.lp, &objective) {
        LpOutcome::Infeasible => MaxResult::NegInfinity,
        LpOutcome::Unbounded => MaxResult::PosInfinity,
        LpOutcome::Optimal { value, .. } => MaxResult::Finite {
            value,
            attained: true,
        },
        LpOutcome::Feasible { .. } => unreachable!("maximize never reports bare feasibility"),
    }
}

/// Averages `x` over all permutations of the atoms `{1..k}`, leaving
/// `k+1..n` fixed. The result solves every constraint the input solves
/// and has the same per-orbit sums; with `k = n` it is constant on each
/// column orbit.
pub fn symmetrize_over(
    inst: &FiniteInstance,
    x: &[Rational],
    k: u64,
) -> Result<Vec<Rational>, InstantiateError> {
    assert_eq!(x.len(), inst.column_labels.len(), "vector width mismatch");
    assert!(
        k <= inst.atom_count,
        "cannot permute atoms beyond the instance"
    );
    if k > 6 {
        return Err(InstantiateError::SymmetrizeTooLarge { atoms: k });
    }
    let index: HashMap<&ColumnLabel, usize> = inst
        .column_labels
        .iter()
        .enumerate()
        .map(|(c, cl)| (cl, c))
        .collect();
    let mut acc = vec![Rational::zero(); x.len()];
    let mut count = 0u64;
    for perm in (1..=k).permutations(k as usize) {
        count += 1;
        for (c, cl) in inst.column_labels.iter().enumerate() {
            let image = ColumnLabel {
                orbit: cl.orbit,
                tuple: cl
                    .tuple
                    .iter()
                    .map(|&a| if a <= k { perm[a as usize - 1] } else { a })
                    .collect(),
            };
            acc[index[&image]] += &x[c];
        }
    }
    let scale = Rational::from_integer(count.into());
    Ok(acc.into_iter().map(|v| v / &scale).collect())
}

/// Averages `x` over all permutations of the full atom set.
pub fn symmetrize(
    inst: &FiniteInstance,
    x: &[Rational],
) -> Result<Vec<Rational>, InstantiateError> {
    symmetrize_over(inst, x, inst.atom_count)
}

/// Sums `x` per column orbit. Orbits with no columns sum to zero.
pub fn orbit_sums(inst: &FiniteInstance, x: &[Rational]) -> Vec<Rational> {
    assert_eq!(x.len(), inst.column_labels.len(), "vector width mismatch");
    let mut sums = vec![Rational::zero(); inst.col_orbit_count];
    for (cl, v) in inst.column_labels.iter().zip(x) {
        sums[cl.orbit] += v;
    }
    sums
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{frac, rat};
    use crate::orbit::parse_system;
    use crate::simplex::feasible;

    const SUM_OF_OTHERS: &str = "rows: 1\ncols: 1\ncoef 1 1 0 1\ntarget 1 1\n";

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

    /// One inequality per ordered pair of distinct atoms: x_a - x_b >= 1.
    const ANTISYMMETRIC: &str = "\
rows: 2
cols: 1
coef 1 1 1,0 1
coef 1 1 0,1 -1
target 1 1
";

    fn geq_rows(inst: &FiniteInstance) -> Vec<(Vec<Rational>, Rational)> {
        inst.lp
            .geq
            .iter()
            .map(|c| (c.coeffs.clone(), c.rhs.clone()))
            .collect()
    }

    #[test]
    fn two_atom_expansion() {
        let sys = parse_system(SUM_OF_OTHERS).unwrap();
        let inst = instantiate_finite(&sys, 2);
        assert_eq!(inst.column_labels.len(), 2);
        assert_eq!(inst.column_labels[0].tuple, vec![1]);
        assert_eq!(inst.column_labels[1].tuple, vec![2]);
        // Untracked representative (fresh atom 3) sums everything; the
        // tracked ones exclude their own atom.
        assert_eq!(
            geq_rows(&inst),
            vec![
                (vec![rat(1), rat(1)], rat(1)),
                (vec![rat(0), rat(1)], rat(1)),
                (vec![rat(1), rat(0)], rat(1)),
            ]
        );
        assert_eq!(
            inst.row_labels,
            vec![
                RowLabel::Orbit {
                    orbit: 0,
                    rep: vec![3]
                },
                RowLabel::Orbit {
                    orbit: 0,
                    rep: vec![1]
                },
                RowLabel::Orbit {
                    orbit: 0,
                    rep: vec![2]
                },
            ]
        );
        assert!(matches!(feasible(&inst.lp), LpOutcome::Feasible { .. }));
    }

    #[test]
    fn one_atom_expansion_is_infeasible() {
        let sys = parse_system(SUM_OF_OTHERS).unwrap();
        let inst = instantiate_finite(&sys, 1);
        assert_eq!(inst.column_labels.len(), 1);
        // The lone atom's own row has an empty sum on the left.
        assert_eq!(
            geq_rows(&inst),
            vec![(vec![rat(1)], rat(1)), (vec![rat(0)], rat(1))]
        );
        assert_eq!(feasible(&inst.lp), LpOutcome::Infeasible);
    }

    #[test]
    fn all_finite_system_reads_as_plain_lp() {
        let text = "rows: 0 0\ncols: 0 0\ncoef 1 1 - 2\ncoef 1 2 - -1\ncoef 2 2 - 1\ntarget 1 3\n";
        let sys = parse_system(text).unwrap();
        for n in [1, 5] {
            let inst = instantiate_finite(&sys, n);
            assert_eq!(
                geq_rows(&inst),
                vec![
                    (vec![rat(2), rat(-1)], rat(3)),
                    (vec![rat(0), rat(1)], rat(0)),
                ]
            );
        }
    }

    #[test]
    fn oracle_supremum_scaling_with_atoms() {
        let text = "rows: 1\ncols: 1\ncoef 1 1 0 1\ntarget 1 1\nobjective 1 -2\n";
        let sys = parse_system(text).unwrap();
        // Maximizing -2·(sum) means minimizing twice the total weight,
        // and the minimum total weight is n/(n-1).
        for (n, expected) in [(2, rat(-4)), (3, rat(-3)), (4, frac(-8, 3))] {
            assert_eq!(
                oracle_supremum(&sys, n),
                MaxResult::Finite {
                    value: expected,
                    attained: true
                }
            );
        }
    }

    #[test]
    fn vertex_edge_oracle_value() {
        let sys = parse_system(VERTEX_EDGE).unwrap();
        for n in [3, 4, 5] {
            assert_eq!(
                oracle_supremum(&sys, n),
                MaxResult::Finite {
                    value: rat(-3),
                    attained: true
                }
            );
        }
    }

    #[test]
    fn antisymmetric_system_is_infeasible_for_every_atom_count() {
        let sys = parse_system(ANTISYMMETRIC).unwrap();
        for n in [1, 2, 3] {
            assert_eq!(oracle_supremum(&sys, n), MaxResult::NegInfinity);
        }
    }

    #[test]
    fn row_and_column_counts() {
        let sys = OrbitSystem::new(&[2, 1], &[2, 1]);
        let inst = instantiate_finite(&sys, 3);
        assert_eq!(inst.column_labels.len(), 6 + 3);
        // Row orbit of dimension 2: subsets contribute 1 + 3 + 3 + 6
        // representatives; dimension 1 contributes 1 + 3.
        assert_eq!(inst.lp.geq.len(), 13 + 4);
    }

    #[test]
    fn equality_and_sign_rows() {
        let text = "rows: 1\ncols: 1\nsense 1 eq\nsign 1 nonneg\ncoef 1 1 0 1\n";
        let sys = parse_system(text).unwrap();
        let inst = instantiate_finite(&sys, 2);
        assert_eq!(inst.lp.eq.len(), 3);
        assert_eq!(inst.lp.geq.len(), 2);
        assert_eq!(inst.row_labels[0], RowLabel::ColumnSign { col: 0 });
        assert_eq!(
            inst.row_labels[2],
            RowLabel::Orbit {
                orbit: 0,
                rep: vec![3]
            }
        );
        // Zero is the only solution of "all other entries sum to zero"
        // under nonnegativity, and it stays one after canonicalizing.
        let zero = vec![rat(0), rat(0)];
        assert!(inst.lp.satisfied_by(&zero));
        let canon = instantiate_finite(&sys.canonicalize(), 2);
        assert!(canon.lp.satisfied_by(&zero));
        assert_eq!(canon.lp.eq.len(), 0);
        assert_eq!(canon.lp.geq.len(), 3 + 3 + 3);
    }

    #[test]
    fn symmetrize_two_single_atom_columns() {
        let sys = parse_system(SUM_OF_OTHERS).unwrap();
        let inst = instantiate_finite(&sys, 2);
        let y = symmetrize(&inst, &[rat(1), rat(0)]).unwrap();
        assert_eq!(y, vec![frac(1, 2), frac(1, 2)]);
        // A vector that is already constant per orbit is a fixed point.
        let z = symmetrize(&inst, &[frac(2, 3), frac(2, 3)]).unwrap();
        assert_eq!(z, vec![frac(2, 3), frac(2, 3)]);
    }

    #[test]
    fn averaging_preserves_constraints_and_orbit_sums() {
        let sys = parse_system(VERTEX_EDGE).unwrap();
        let inst = instantiate_finite(&sys, 4);
        let witness = match feasible(&inst.lp) {
            LpOutcome::Feasible { witness } => witness,
            other => panic!("expected a feasible instance, got {other:?}"),
        };
        let averaged = symmetrize(&inst, &witness).unwrap();
        assert!(inst.lp.satisfied_by(&averaged));
        assert_eq!(orbit_sums(&inst, &witness), orbit_sums(&inst, &averaged));
        // Full averaging makes the vector constant per orbit.
        for (cl, v) in inst.column_labels.iter().zip(&averaged) {
            let first = inst
                .column_labels
                .iter()
                .position(|other| other.orbit == cl.orbit)
                .unwrap();
            assert_eq!(v, &averaged[first]);
        }
    }

    #[test]
    fn partial_averaging_mixes_only_the_permuted_atoms() {
        // A pair vector supported on atoms {1,2}: the pair (1,2) carries 3
        // in both directions, pairs into {3,4} carry -1 from atom 1 and
        // -2 from atom 2, and pairs inside {3,4} carry 0. Averaging over
        // the two permutations of {1,2} mixes -1 with -2.
        let sys = parse_system("rows: 0\ncols: 2\n").unwrap();
        let inst = instantiate_finite(&sys, 4);
        let value = |a: u64, b: u64| -> Rational {
            match (a, b) {
                (1, 2) | (2, 1) => rat(3),
                (1, _) | (_, 1) => rat(-1),
                (2, _) | (_, 2) => rat(-2),
                _ => rat(0),
            }
        };
        let x: Vec<Rational> = inst
            .column_labels
            .iter()
            .map(|cl| value(cl.tuple[0], cl.tuple[1]))
            .collect();
        let y = symmetrize_over(&inst, &x, 2).unwrap();
        for (cl, v) in inst.column_labels.iter().zip(&y) {
            let inside = |a: u64| a <= 2;
            let expected = match (inside(cl.tuple[0]), inside(cl.tuple[1])) {
                (true, true) => rat(3),
                (false, false) => rat(0),
                _ => frac(-3, 2),
            };
            assert_eq!(v, &expected, "at column {cl}");
        }
        assert_eq!(orbit_sums(&inst, &x), orbit_sums(&inst, &y));
        assert_eq!(orbit_sums(&inst, &x), vec![rat(-6)]);
    }

    #[test]
    fn refuses_oversized_averaging() {
        let sys = parse_system(SUM_OF_OTHERS).unwrap();
        let inst = instantiate_finite(&sys, 7);
        let x = vec![rat(0); 7];
        assert_eq!(
            symmetrize(&inst, &x),
            Err(InstantiateError::SymmetrizeTooLarge { atoms: 7 })
        );
    }

    #[test]
    fn text_dump() {
        let sys = parse_system(SUM_OF_OTHERS).unwrap();
        let inst = instantiate_finite(&sys, 2);
        assert_eq!(
            inst.to_text(),
            "atoms: 2\n\
             columns: x1(1) x1(2)\n\
             row1(3): x1(1) + x1(2) >= 1\n\
             row1(1): x1(2) >= 1\n\
             row1(2): x1(1) >= 1\n"
        );
    }
}
