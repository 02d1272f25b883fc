//! End-to-end decision pipeline over orbit systems.
//!
//! Composes the lower layers: validate the input, rewrite it into the
//! canonical all-`>=`, all-free shape, reduce to a parametric system over
//! per-orbit sums, and decide that system for all large `n`. A witness
//! returned here is therefore an orbit-sum vector: one rational per column
//! orbit, the sum of a finitary solution's entries over that orbit.

use std::fmt;

use crate::numerics::Rational;
use crate::orbit::{OrbitSystem, Violation};
use crate::paramlp::{self, MaxResult, SolveReport};
use crate::reduction::{build_p2, ReducedProgram};

/// The input system failed structural validation; nothing was solved.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct InvalidSystem {
    pub violations: Vec<Violation>,
}

impl fmt::Display for InvalidSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid system")?;
        for v in &self.violations {
            write!(f, "\n  {v}")?;
        }
        Ok(())
    }
}

/// Result of running the pipeline on one system.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub reduced: ReducedProgram,
    pub report: SolveReport,
    /// Parameter value from which the witness is a verified solution of
    /// the reduced system and the reduction itself is faithful (never
    /// below `reduced.n_floor`); `None` when unsolvable.
    pub threshold: Option<u64>,
}

impl Analysis {
    /// Orbit-sum witness, present exactly when the verdict is solvable.
    pub fn witness(&self) -> Option<&[Rational]> {
        self.report.verdict.witness()
    }

    pub fn is_solvable(&self) -> bool {
        self.report.verdict.is_solvable()
    }
}

fn assemble(reduced: ReducedProgram, report: SolveReport) -> Analysis {
    let threshold = report.verdict.witness().map(|x| {
        paramlp::valid_threshold(&reduced.system, x)
            .expect("solver witness must pass its own threshold check")
            .max(reduced.n_floor)
    });
    Analysis {
        reduced,
        report,
        threshold,
    }
}

/// Validates, canonicalizes and reduces, without solving.
pub fn reduce_system(sys: &OrbitSystem) -> Result<ReducedProgram, InvalidSystem> {
    let violations = sys.validate();
    if !violations.is_empty() {
        return Err(InvalidSystem { violations });
    }
    Ok(build_p2(&sys.canonicalize()))
}

/// Decides whether the system has a finitary solution.
pub fn solve_system(sys: &OrbitSystem) -> Result<Analysis, InvalidSystem> {
    let reduced = reduce_system(sys)?;
    let report = paramlp::almost_all_solve(&reduced.system);
    Ok(assemble(reduced, report))
}

/// Supremum of the system's objective (stored per column orbit, applied to
/// the orbit sums) over all finitary solutions.
pub fn maximize_system(sys: &OrbitSystem) -> Result<(MaxResult, Analysis), InvalidSystem> {
    let reduced = reduce_system(sys)?;
    let objective: Vec<Rational> = reduced
        .objective
        .iter()
        .map(|c| Rational::from_integer(c.clone()))
        .collect();
    let (max, report) = paramlp::almost_all_maximize(&reduced.system, &objective);
    Ok((max, assemble(reduced, report)))
}
