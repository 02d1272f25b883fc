//! Systems of linear inequalities whose coefficients are integer
//! polynomials in a parameter `n`, and the decision procedure for "does the
//! system hold for all sufficiently large `n`".
//!
//! The solver looks only at each inequality's head: the ordinary inequality
//! formed by the coefficients of the highest-degree monomials. If the heads
//! (plus accumulated side equalities) are infeasible, the system fails for
//! all large `n`. If every head can be satisfied strictly, any such point
//! works for all large `n`. Otherwise some head is forced to equality;
//! that inequality is replaced by its lower-degree remainder and the forced
//! equality is recorded, shrinking the system until one of the two exits
//! applies. Each step removes at least one monomial, so the loop always
//! terminates.

use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::numerics::{Int, Polynomial, Rational};
use crate::simplex::{self, Constraint, FiniteLP, LpOutcome};

/// One parametric inequality `sum_j lhs[j](n) * x_j >= rhs(n)`.
///
/// Invariant: not the trivial `0 >= 0` (construction normalizes that away).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamIneq {
    lhs: Vec<Polynomial>,
    rhs: Polynomial,
}

impl ParamIneq {
    /// Builds an inequality, returning `None` for the trivial `0 >= 0`.
    pub fn new(lhs: Vec<Polynomial>, rhs: Polynomial) -> Option<ParamIneq> {
        if rhs.is_zero() && lhs.iter().all(Polynomial::is_zero) {
            None
        } else {
            Some(ParamIneq { lhs, rhs })
        }
    }

    pub fn lhs(&self) -> &[Polynomial] {
        &self.lhs
    }

    pub fn rhs(&self) -> &Polynomial {
        &self.rhs
    }

    pub fn unknowns(&self) -> usize {
        self.lhs.len()
    }

    /// Highest degree appearing on either side (zero polynomials count 0).
    pub fn degree(&self) -> usize {
        self.lhs
            .iter()
            .chain(std::iter::once(&self.rhs))
            .map(Polynomial::degree)
            .max()
            .unwrap_or(0)
    }

    /// Total number of monomials on both sides; the solver's termination
    /// measure.
    pub fn size(&self) -> usize {
        self.lhs
            .iter()
            .chain(std::iter::once(&self.rhs))
            .map(Polynomial::monomial_count)
            .sum()
    }

    /// The ordinary inequality formed by the coefficients of `n^d` where
    /// `d` is this inequality's degree.
    pub fn head(&self) -> Constraint {
        let d = self.degree();
        Constraint::new(
            self.lhs
                .iter()
                .map(|p| Rational::from_integer(p.coeff(d)))
                .collect(),
            Rational::from_integer(self.rhs.coeff(d)),
        )
    }

    /// The inequality with the `n^d` monomials removed from both sides;
    /// `None` when nothing remains.
    pub fn tail(&self) -> Option<ParamIneq> {
        let d = self.degree();
        ParamIneq::new(
            self.lhs.iter().map(|p| p.without_degree(d)).collect(),
            self.rhs.without_degree(d),
        )
    }

    /// The ordinary inequality at a concrete parameter value.
    pub fn at(&self, n: u64) -> Constraint {
        Constraint::new(
            self.lhs
                .iter()
                .map(|p| Rational::from_integer(p.eval_u64(n)))
                .collect(),
            Rational::from_integer(self.rhs.eval_u64(n)),
        )
    }

    /// Multiplies the inequality's left side per unknown and its right side
    /// by the given (nonzero) polynomials. Used by the degree-equalizing
    /// step of the reduction; positivity of the factors for large `n` is
    /// the caller's concern.
    pub fn scaled(&self, lhs_factors: &[Polynomial], rhs_factor: &Polynomial) -> Option<ParamIneq> {
        assert_eq!(lhs_factors.len(), self.lhs.len());
        ParamIneq::new(
            self.lhs
                .iter()
                .zip(lhs_factors)
                .map(|(p, f)| p * f)
                .collect(),
            &self.rhs * rhs_factor,
        )
    }
}

impl fmt::Display for ParamIneq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut any = false;
        for (j, p) in self.lhs.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            let negative = p.leading().is_negative();
            let mag = if negative { -p } else { p.clone() };
            if !any {
                if negative {
                    write!(f, "-")?;
                }
            } else if negative {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            any = true;
            let var = j + 1;
            if mag.monomial_count() == 1 {
                if mag.degree() == 0 && mag.leading().is_one() {
                    write!(f, "x{var}")?;
                } else {
                    write!(f, "{mag}·x{var}")?;
                }
            } else {
                write!(f, "({mag})·x{var}")?;
            }
        }
        if !any {
            write!(f, "0")?;
        }
        write!(f, " >= {}", self.rhs)
    }
}

/// A parametric system: inequalities plus ordinary equality side
/// constraints accumulated by the solver (empty in freshly built systems).
#[derive(Debug, Clone, Default)]
pub struct ParamSystem {
    pub unknowns: usize,
    pub ineqs: Vec<ParamIneq>,
    pub gamma: Vec<Constraint>,
}

impl ParamSystem {
    pub fn new(unknowns: usize) -> Self {
        ParamSystem {
            unknowns,
            ineqs: Vec::new(),
            gamma: Vec::new(),
        }
    }

    /// Pushes an inequality unless it normalizes away.
    pub fn push(&mut self, lhs: Vec<Polynomial>, rhs: Polynomial) {
        assert_eq!(lhs.len(), self.unknowns, "row width mismatch");
        if let Some(e) = ParamIneq::new(lhs, rhs) {
            self.ineqs.push(e);
        }
    }

    /// The ordinary system at a concrete parameter value (side equalities
    /// included verbatim).
    pub fn at(&self, n: u64) -> FiniteLP {
        FiniteLP {
            num_vars: self.unknowns,
            geq: self.ineqs.iter().map(|e| e.at(n)).collect(),
            eq: self.gamma.clone(),
        }
    }

    fn head_lp(&self) -> FiniteLP {
        FiniteLP {
            num_vars: self.unknowns,
            geq: self.ineqs.iter().map(ParamIneq::head).collect(),
            eq: self.gamma.clone(),
        }
    }

    fn measure(&self) -> usize {
        self.ineqs.iter().map(ParamIneq::size).sum()
    }
}

/// The ordinary system at parameter value `n`.
pub fn evaluate_at(p: &ParamSystem, n: u64) -> FiniteLP {
    p.at(n)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Solvable { witness: Vec<Rational> },
    Unsolvable,
}

impl Verdict {
    pub fn is_solvable(&self) -> bool {
        matches!(self, Verdict::Solvable { .. })
    }

    pub fn witness(&self) -> Option<&[Rational]> {
        match self {
            Verdict::Solvable { witness } => Some(witness),
            Verdict::Unsolvable => None,
        }
    }
}

/// One pass of the main loop, for tracing and regression tests.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IterationRecord {
    pub iteration: usize,
    /// Pretty-printed inequality whose head got forced to equality; `None`
    /// on the final pass.
    pub chosen: Option<String>,
    /// Final verdict when this pass ended the loop.
    pub verdict: Option<bool>,
    pub ineqs_before: usize,
    pub ineqs_after: usize,
    pub gamma_after: usize,
    pub measure_before: usize,
    pub measure_after: usize,
}

/// Outcome of the all-large-`n` decision together with the loop trace and
/// the final head system (used for maximization).
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub verdict: Verdict,
    pub trace: Vec<IterationRecord>,
    /// Heads of the final inequalities plus accumulated equalities.
    pub final_heads: FiniteLP,
    pub final_gamma: Vec<Constraint>,
}

impl SolveReport {
    pub fn iterations(&self) -> usize {
        self.trace.len()
    }
}

/// Decides whether the system is solvable for all sufficiently large `n`.
///
/// On success the witness satisfies every final head strictly and every
/// accumulated equality exactly; it is an exact solution of the input
/// system at every parameter value from [`valid_threshold`] upward.
pub fn almost_all_solve(p: &ParamSystem) -> SolveReport {
    let mut work = p.clone();
    let mut trace: Vec<IterationRecord> = Vec::new();
    loop {
        let iteration = trace.len() + 1;
        let measure_before = work.measure();
        let ineqs_before = work.ineqs.len();
        let head_lp = work.head_lp();

        if matches!(simplex::feasible(&head_lp), LpOutcome::Infeasible) {
            trace.push(IterationRecord {
                iteration,
                chosen: None,
                verdict: Some(false),
                ineqs_before,
                ineqs_after: ineqs_before,
                gamma_after: work.gamma.len(),
                measure_before,
                measure_after: measure_before,
            });
            return SolveReport {
                verdict: Verdict::Unsolvable,
                trace,
                final_heads: head_lp,
                final_gamma: work.gamma,
            };
        }

        let mut degenerate = None;
        let mut strict_points = Vec::new();
        for i in 0..work.ineqs.len() {
            match simplex::strict_witness(&head_lp, i).expect("index in range") {
                Some(w) => strict_points.push(w),
                None => {
                    degenerate = Some(i);
                    break;
                }
            }
        }

        let Some(chosen) = degenerate else {
            let witness = if strict_points.is_empty() {
                match simplex::feasible(&head_lp) {
                    LpOutcome::Feasible { witness } => witness,
                    _ => unreachable!("feasibility established above"),
                }
            } else {
                average(&strict_points)
            };
            // The average of the per-row strict points satisfies every head
            // strictly and the equalities exactly; check, don't trust.
            for (i, head) in head_lp.geq.iter().enumerate() {
                assert!(
                    head.lhs_at(&witness) > head.rhs,
                    "internal error: averaged witness not strict on head {i}"
                );
            }
            for g in &head_lp.eq {
                assert_eq!(
                    g.lhs_at(&witness),
                    g.rhs,
                    "internal error: averaged witness breaks a side equality"
                );
            }
            trace.push(IterationRecord {
                iteration,
                chosen: None,
                verdict: Some(true),
                ineqs_before,
                ineqs_after: ineqs_before,
                gamma_after: work.gamma.len(),
                measure_before,
                measure_after: measure_before,
            });
            return SolveReport {
                verdict: Verdict::Solvable { witness },
                trace,
                final_heads: head_lp,
                final_gamma: work.gamma,
            };
        };

        // The chosen head can only hold with equality; record that, keep
        // the lower-degree remainder.
        let head = work.ineqs[chosen].head();
        let chosen_str = work.ineqs[chosen].to_string();
        work.gamma.push(head);
        match work.ineqs[chosen].tail() {
            Some(t) => work.ineqs[chosen] = t,
            None => {
                work.ineqs.remove(chosen);
            }
        }
        let measure_after = work.measure();
        assert!(
            measure_after < measure_before,
            "internal error: termination measure did not decrease"
        );
        trace.push(IterationRecord {
            iteration,
            chosen: Some(chosen_str),
            verdict: None,
            ineqs_before,
            ineqs_after: work.ineqs.len(),
            gamma_after: work.gamma.len(),
            measure_before,
            measure_after,
        });
    }
}

fn average(points: &[Vec<Rational>]) -> Vec<Rational> {
    let k = points[0].len();
    let m = Rational::from_integer(Int::from(points.len()));
    (0..k)
        .map(|j| {
            let mut acc = Rational::zero();
            for p in points {
                acc += &p[j];
            }
            acc / &m
        })
        .collect()
}

/// Supremum of a linear objective over the solutions that work for all
/// large `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MaxResult {
    /// The system is unsolvable for all large `n`.
    NegInfinity,
    Finite {
        value: Rational,
        attained: bool,
    },
    PosInfinity,
}

impl fmt::Display for MaxResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MaxResult::NegInfinity => write!(f, "-inf"),
            MaxResult::PosInfinity => write!(f, "+inf"),
            MaxResult::Finite { value, attained } => {
                write!(
                    f,
                    "{value} ({})",
                    if *attained {
                        "attained"
                    } else {
                        "not attained"
                    }
                )
            }
        }
    }
}

/// Maximizes `objective · x` over the almost-all solutions of `p`.
///
/// The supremum equals the maximum of the objective over the final head
/// system; it is attained exactly when the system extended with
/// `objective·x = value` (as two constant inequalities) stays solvable.
pub fn almost_all_maximize(p: &ParamSystem, objective: &[Rational]) -> (MaxResult, SolveReport) {
    assert_eq!(objective.len(), p.unknowns, "objective width mismatch");
    let report = almost_all_solve(p);
    match &report.verdict {
        Verdict::Unsolvable => (MaxResult::NegInfinity, report),
        Verdict::Solvable { .. } => match simplex::maximize(&report.final_heads, objective) {
            LpOutcome::Unbounded => (MaxResult::PosInfinity, report),
            LpOutcome::Optimal { value, .. } => {
                let att = attained(p, objective, &value);
                (
                    MaxResult::Finite {
                        value,
                        attained: att,
                    },
                    report,
                )
            }
            other => unreachable!("final head system is feasible, got {other:?}"),
        },
    }
}

/// Whether some almost-all solution of `p` achieves `objective · x = value`.
pub fn attained(p: &ParamSystem, objective: &[Rational], value: &Rational) -> bool {
    let mut extended = p.clone();
    // Scale objective·x >= value and its negation to integer coefficients
    // before embedding them as constant parametric rows.
    let mut scale = value.denom().clone();
    for c in objective {
        scale = scale.lcm(c.denom());
    }
    let scale_rat = Rational::from_integer(scale);
    let as_int = |c: &Rational| -> Int { (c * &scale_rat).to_integer() };
    let pos: Vec<Polynomial> = objective
        .iter()
        .map(|c| Polynomial::constant(as_int(c)))
        .collect();
    let neg: Vec<Polynomial> = pos.iter().map(|p| -p).collect();
    extended.push(pos, Polynomial::constant(as_int(value)));
    extended.push(neg, Polynomial::constant(-as_int(value)));
    almost_all_solve(&extended).verdict.is_solvable()
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ThresholdError {
    #[error("point is not a solution for all large n: fails at n = {n}")]
    PostVerification { n: u64 },
}

/// Smallest checked `n0` such that `x` satisfies the system at every
/// `n >= n0`: per inequality, the slack `rhs(n) - lhs(n)·x` is a univariate
/// polynomial whose sign is stable beyond its root bound. Verifies `x` at
/// `n0` and `n0 + 1` and errors if the point is not actually a solution
/// there.
pub fn valid_threshold(p: &ParamSystem, x: &[Rational]) -> Result<u64, ThresholdError> {
    assert_eq!(x.len(), p.unknowns, "point width mismatch");
    // Common denominator so the slack polynomials stay over the integers.
    let mut den = Int::one();
    for v in x {
        den = den.lcm(v.denom());
    }
    let den_rat = Rational::from_integer(den.clone());
    let x_int: Vec<Int> = x.iter().map(|v| (v * &den_rat).to_integer()).collect();

    let mut n0 = 1u64;
    for e in &p.ineqs {
        let mut slack = e.rhs().scale(&den);
        for (p_j, xi) in e.lhs().iter().zip(&x_int) {
            slack = &slack - &p_j.scale(xi);
        }
        let bound = match slack.sign_stability_bound() {
            Ok(b) => b,
            Err(_) => 1,
        };
        n0 = n0.max(bound);
    }
    for n in [n0, n0 + 1] {
        if !p.at(n).satisfied_by(x) {
            return Err(ThresholdError::PostVerification { n });
        }
    }
    Ok(n0)
}

/// Formats an ordinary linear row, e.g. `x1 - 2·x3 = 0`.
pub fn format_linear(coeffs: &[Rational], rel: &str, rhs: &Rational) -> String {
    let mut out = String::new();
    for (j, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let mag = c.abs();
        if out.is_empty() {
            if c.is_negative() {
                out.push('-');
            }
        } else if c.is_negative() {
            out.push_str(" - ");
        } else {
            out.push_str(" + ");
        }
        if mag.is_one() {
            out.push_str(&format!("x{}", j + 1));
        } else {
            out.push_str(&format!("{mag}·x{}", j + 1));
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out.push_str(&format!(" {rel} {rhs}"));
    out
}
