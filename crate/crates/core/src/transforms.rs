//! Conversions between the standard problem forms at the orbit level:
//! sign-restricted equality systems versus free inequality systems, and
//! the embedding that forces finitely supported solutions to have finite
//! support sums.
//!
//! Each construction works orbit by orbit, so it commutes with expanding
//! the system over a concrete atom set.

use thiserror::Error;

use crate::numerics::int;
use crate::orbit::{OrbitSystem, PartialInjection, Sense, VarSign};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransformError {
    #[error("row orbit {row} is an inequality; expected an all-equality system")]
    NotEquality { row: usize },
    #[error("column orbit {col} is free; expected an all-nonnegative system")]
    NotNonnegative { col: usize },
    #[error("row orbit {row} is an equality; expected an all-inequality system")]
    NotInequality { row: usize },
    #[error("column orbit {col} is sign-restricted; expected all-free columns")]
    NotFree { col: usize },
}

fn expect_eq_nonneg(sys: &OrbitSystem) -> Result<(), TransformError> {
    for (row, r) in sys.rows.iter().enumerate() {
        if r.sense != Sense::Eq {
            return Err(TransformError::NotEquality { row: row + 1 });
        }
    }
    for (col, c) in sys.cols.iter().enumerate() {
        if c.sign != VarSign::Nonneg {
            return Err(TransformError::NotNonnegative { col: col + 1 });
        }
    }
    Ok(())
}

fn expect_geq_free(sys: &OrbitSystem) -> Result<(), TransformError> {
    for (row, r) in sys.rows.iter().enumerate() {
        if r.sense != Sense::Geq {
            return Err(TransformError::NotInequality { row: row + 1 });
        }
    }
    for (col, c) in sys.cols.iter().enumerate() {
        if c.sign != VarSign::Free {
            return Err(TransformError::NotFree { col: col + 1 });
        }
    }
    Ok(())
}

/// Rewrites an all-equality, all-nonnegative system into a plain
/// inequality system over free unknowns: every equality is doubled with
/// negated coefficients and target, and every column orbit gains an
/// identity-coefficient row demanding nonnegativity. This is exactly what
/// the general normal-form routine does when every row is an equality and
/// every column is sign-restricted, so the work is delegated to it.
pub fn nonneg_eq_to_ineq(sys: &OrbitSystem) -> Result<OrbitSystem, TransformError> {
    expect_eq_nonneg(sys)?;
    Ok(sys.canonicalize())
}

/// Rewrites a free inequality system into an all-equality system over
/// nonnegative unknowns: each unknown splits into a positive and a
/// negative part, and each row orbit gains a slack column orbit of its
/// own dimension subtracted on the identity injection. The objective of
/// the two parts is the original and its negation; slacks carry none.
pub fn ineq_to_nonneg_eq(sys: &OrbitSystem) -> Result<OrbitSystem, TransformError> {
    expect_geq_free(sys)?;
    let nc = sys.cols.len();
    let row_dims: Vec<usize> = sys.rows.iter().map(|r| r.dim).collect();
    let col_dims: Vec<usize> = sys
        .cols
        .iter()
        .chain(sys.cols.iter())
        .map(|c| c.dim)
        .chain(sys.rows.iter().map(|r| r.dim))
        .collect();
    let mut out = OrbitSystem::new(&row_dims, &col_dims);
    for (i, r) in sys.rows.iter().enumerate() {
        out.rows[i].sense = Sense::Eq;
        out.rows[i].target = r.target.clone();
    }
    for c in &mut out.cols {
        c.sign = VarSign::Nonneg;
    }
    for (j, c) in sys.cols.iter().enumerate() {
        out.cols[j].objective = c.objective.clone();
        out.cols[nc + j].objective = -c.objective.clone();
    }
    for ((i, j, inj), v) in sys.coeffs() {
        out.set_coeff(*i, *j, inj.clone(), v.clone());
        out.set_coeff(*i, nc + *j, inj.clone(), -v.clone());
    }
    for (i, r) in sys.rows.iter().enumerate() {
        out.set_coeff(i, 2 * nc + i, PartialInjection::identity(r.dim), int(-1));
    }
    Ok(out)
}

/// Appends a fresh scalar unknown `y` and the single inequality
/// "sum of all entries >= y". Solutions with finite support satisfy it
/// vacuously by choosing `y` small, while infinite-support solutions
/// cannot give the left side a finite value, so the pipeline's solution
/// class is unchanged.
pub fn fin_to_general(sys: &OrbitSystem) -> Result<OrbitSystem, TransformError> {
    expect_geq_free(sys)?;
    let mut row_dims: Vec<usize> = sys.rows.iter().map(|r| r.dim).collect();
    let mut col_dims: Vec<usize> = sys.cols.iter().map(|c| c.dim).collect();
    row_dims.push(0);
    col_dims.push(0);
    let mut out = OrbitSystem::new(&row_dims, &col_dims);
    for (i, r) in sys.rows.iter().enumerate() {
        out.rows[i].target = r.target.clone();
    }
    for (j, c) in sys.cols.iter().enumerate() {
        out.cols[j].objective = c.objective.clone();
    }
    for ((i, j, inj), v) in sys.coeffs() {
        out.set_coeff(*i, *j, inj.clone(), v.clone());
    }
    let nr = sys.rows.len();
    for (j, c) in sys.cols.iter().enumerate() {
        out.set_coeff(nr, j, PartialInjection::empty(0, c.dim), int(1));
    }
    out.set_coeff(nr, sys.cols.len(), PartialInjection::empty(0, 0), int(-1));
    Ok(out)
}
