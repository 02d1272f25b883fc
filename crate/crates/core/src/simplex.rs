//! Exact two-phase simplex over arbitrary-precision rationals.
//!
//! Systems mix `>=` rows and equality rows over sign-unconstrained
//! variables. Internally each variable is split into a nonnegative pair and
//! each inequality row gets a surplus variable; phase one adds artificial
//! variables only for rows without a natural starting basis. The entering
//! column is the most negative reduced cost; the leaving row is chosen by
//! the lexicographic ratio test, so termination is unconditional even on
//! degenerate instances. The tableau is kept fraction-free: integer entries
//! over one shared denominator, updated by the two-by-two minor identity
//! whose divisions are always exact, so no rational reduction runs in the
//! pivot loop. Every witness is substituted back into the input system and
//! asserted exact before it is returned.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::numerics::{Int, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub rhs: Rational,
}

impl Constraint {
    pub fn new(coeffs: Vec<Rational>, rhs: Rational) -> Self {
        Constraint { coeffs, rhs }
    }

    pub fn lhs_at(&self, x: &[Rational]) -> Rational {
        dot(&self.coeffs, x)
    }
}

pub fn dot(a: &[Rational], x: &[Rational]) -> Rational {
    assert_eq!(a.len(), x.len(), "dimension mismatch in dot product");
    let mut acc = Rational::zero();
    for (c, v) in a.iter().zip(x) {
        if !c.is_zero() && !v.is_zero() {
            acc += c * v;
        }
    }
    acc
}

/// A finite linear program: `geq` rows `a·x >= b` and `eq` rows `a·x = b`
/// over `num_vars` free variables.
#[derive(Debug, Clone, Default)]
pub struct FiniteLP {
    pub num_vars: usize,
    pub geq: Vec<Constraint>,
    pub eq: Vec<Constraint>,
}

impl FiniteLP {
    pub fn new(num_vars: usize) -> Self {
        FiniteLP {
            num_vars,
            geq: Vec::new(),
            eq: Vec::new(),
        }
    }

    pub fn push_geq(&mut self, coeffs: Vec<Rational>, rhs: Rational) {
        assert_eq!(coeffs.len(), self.num_vars, "row width mismatch");
        self.geq.push(Constraint::new(coeffs, rhs));
    }

    pub fn push_eq(&mut self, coeffs: Vec<Rational>, rhs: Rational) {
        assert_eq!(coeffs.len(), self.num_vars, "row width mismatch");
        self.eq.push(Constraint::new(coeffs, rhs));
    }

    pub fn satisfied_by(&self, x: &[Rational]) -> bool {
        self.geq.iter().all(|c| c.lhs_at(x) >= c.rhs)
            && self.eq.iter().all(|c| c.lhs_at(x) == c.rhs)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Infeasible,
    Feasible {
        witness: Vec<Rational>,
    },
    Optimal {
        witness: Vec<Rational>,
        value: Rational,
    },
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SimplexError {
    #[error("strict row index {index} out of range ({rows} inequality rows)")]
    StrictIndexOutOfRange { index: usize, rows: usize },
}

/// Decides feasibility; on success the witness satisfies every row exactly.
pub fn feasible(lp: &FiniteLP) -> LpOutcome {
    let mut t = Tableau::build(lp, None);
    if !t.run_phase_one() {
        return LpOutcome::Infeasible;
    }
    let witness = t.extract(lp.num_vars);
    assert!(
        lp.satisfied_by(&witness),
        "internal error: feasibility witness fails exact substitution"
    );
    LpOutcome::Feasible { witness }
}

/// Maximizes `objective · x` over the feasible set.
pub fn maximize(lp: &FiniteLP, objective: &[Rational]) -> LpOutcome {
    assert_eq!(objective.len(), lp.num_vars, "objective width mismatch");
    let mut t = Tableau::build(lp, Some(objective));
    if !t.run_phase_one() {
        return LpOutcome::Infeasible;
    }
    if !t.run_phase_two() {
        return LpOutcome::Unbounded;
    }
    let witness = t.extract(lp.num_vars);
    let value = dot(objective, &witness);
    assert!(
        lp.satisfied_by(&witness),
        "internal error: optimal witness fails exact substitution"
    );
    assert_eq!(
        value,
        t.objective_value(),
        "internal error: optimal value disagrees with witness"
    );
    LpOutcome::Optimal { witness, value }
}

/// Decides whether the system stays solvable when inequality row `strict`
/// is required to hold strictly. Equivalently: the supremum of that row's
/// left-hand side over the remaining rows exceeds its right-hand side
/// (an unbounded supremum counts as exceeding it). Returns `false` whenever
/// the weak system itself is infeasible.
pub fn strict_feasible(lp: &FiniteLP, strict: usize) -> Result<bool, SimplexError> {
    if strict >= lp.geq.len() {
        return Err(SimplexError::StrictIndexOutOfRange {
            index: strict,
            rows: lp.geq.len(),
        });
    }
    let mut rest = lp.clone();
    let row = rest.geq.remove(strict);
    match maximize(&rest, &row.coeffs) {
        LpOutcome::Infeasible => Ok(false),
        LpOutcome::Unbounded => Ok(true),
        LpOutcome::Optimal { value, .. } => Ok(value > row.rhs),
        LpOutcome::Feasible { .. } => unreachable!("maximize never returns bare Feasible"),
    }
}

/// Like [`strict_feasible`] but also produces a point of the strict system
/// when one exists.
pub fn strict_witness(lp: &FiniteLP, strict: usize) -> Result<Option<Vec<Rational>>, SimplexError> {
    if strict >= lp.geq.len() {
        return Err(SimplexError::StrictIndexOutOfRange {
            index: strict,
            rows: lp.geq.len(),
        });
    }
    let mut rest = lp.clone();
    let row = rest.geq.remove(strict);
    match maximize(&rest, &row.coeffs) {
        LpOutcome::Infeasible => Ok(None),
        LpOutcome::Optimal { witness, value } => {
            if value > row.rhs {
                Ok(Some(witness))
            } else {
                Ok(None)
            }
        }
        LpOutcome::Unbounded => {
            // The supremum is infinite, so requiring one more unit than the
            // weak bound still leaves a feasible system; any of its points
            // satisfies the strict row.
            let mut pushed = rest;
            pushed.geq.push(Constraint::new(
                row.coeffs,
                &row.rhs + Rational::from_integer(1.into()),
            ));
            match feasible(&pushed) {
                LpOutcome::Feasible { witness } => Ok(Some(witness)),
                _ => unreachable!("unbounded direction must stay feasible"),
            }
        }
        LpOutcome::Feasible { .. } => unreachable!("maximize never returns bare Feasible"),
    }
}

/// One reduced-cost row carried through the pivots. Entries hold
/// `scale · den · (z_j − c_j)` and `value` holds `scale · den · (c_B · x_B)`
/// for the tableau's current denominator `den`; `scale` is the positive
/// factor that cleared the cost vector's denominators and never changes.
struct CostRow {
    coeffs: Vec<Int>,
    value: Int,
    scale: Int,
}

/// Dense fraction-free tableau: integer entries that are `den` times the
/// usual rational dictionary, with one positive denominator `den` shared by
/// the whole tableau. A pivot applies the two-by-two minor identity
/// entrywise and divides by the previous denominator, which is always
/// exact. Column layout: for each original variable `j` the pair
/// (2j, 2j+1) representing its positive and negative parts, then one
/// surplus column per inequality row, then artificial columns.
struct Tableau {
    ncols: usize,
    real_cols: usize,
    den: Int,
    rows: Vec<Vec<Int>>,
    rhs: Vec<Int>,
    /// Cost rows are installed at build time, before any pivot, so the
    /// exactness of the pivot divisions covers them as well: the phase-two
    /// row (when an objective is present) sits first, the phase-one row
    /// (when artificial columns exist) last.
    costs: Vec<CostRow>,
    basis: Vec<usize>,
}

/// Positive factor clearing every denominator in the constraint.
fn constraint_lcm(c: &Constraint) -> Int {
    let mut l = c.rhs.denom().clone();
    for a in &c.coeffs {
        l = l.lcm(a.denom());
    }
    l
}

/// `a · mult` as an integer; `mult` must clear `a`'s denominator.
fn scaled_int(a: &Rational, mult: &Int) -> Int {
    debug_assert!((mult % a.denom()).is_zero());
    a.numer() * mult / a.denom()
}

/// `(piv · a − f · b) / den` with the division exact by the minor identity.
fn combine(a: &Int, b: &Int, piv: &Int, f: &Int, den: &Int) -> Int {
    let num = if f.is_zero() || b.is_zero() {
        if a.is_zero() {
            return Int::zero();
        }
        piv * a
    } else if a.is_zero() {
        -(f * b)
    } else {
        piv * a - f * b
    };
    if den.is_one() {
        return num;
    }
    debug_assert!(
        (&num % den).is_zero(),
        "fraction-free pivot left a remainder"
    );
    num / den
}

fn combine_row(row: &mut [Int], pivot_row: &[Int], piv: &Int, f: &Int, den: &Int) {
    for (a, b) in row.iter_mut().zip(pivot_row) {
        *a = combine(a, b, piv, f, den);
    }
}

impl Tableau {
    fn build(lp: &FiniteLP, objective: Option<&[Rational]>) -> Tableau {
        for c in lp.geq.iter().chain(&lp.eq) {
            assert_eq!(c.coeffs.len(), lp.num_vars, "row width mismatch");
        }
        let m = lp.geq.len() + lp.eq.len();
        let real_cols = 2 * lp.num_vars + lp.geq.len();
        let mut rows = Vec::with_capacity(m);
        let mut rhs = Vec::with_capacity(m);
        for (i, c) in lp.geq.iter().chain(&lp.eq).enumerate() {
            // Scaling each constraint by its denominators' lcm keeps the
            // starting dictionary integral at denominator one.
            let mult = constraint_lcm(c);
            let mut row = vec![Int::zero(); real_cols];
            for (j, a) in c.coeffs.iter().enumerate() {
                let v = scaled_int(a, &mult);
                row[2 * j + 1] = -&v;
                row[2 * j] = v;
            }
            if i < lp.geq.len() {
                row[2 * lp.num_vars + i] = -Int::one();
            }
            let mut b = scaled_int(&c.rhs, &mult);
            if b.is_negative() {
                for v in row.iter_mut() {
                    *v = -&*v;
                }
                b = -b;
            }
            rows.push(row);
            rhs.push(b);
        }

        // Natural basic columns (positive unit columns) avoid artificials;
        // after the sign flip above this is exactly the surplus column of a
        // row whose right-hand side was nonpositive.
        let mut basis = Vec::with_capacity(m);
        let mut ncols = real_cols;
        for i in 0..m {
            let natural = (2 * lp.num_vars..real_cols).find(|&j| {
                rows[i][j].is_one()
                    && rows
                        .iter()
                        .enumerate()
                        .all(|(k, r)| k == i || r[j].is_zero())
            });
            match natural {
                Some(j) => basis.push(j),
                None => {
                    for (k, r) in rows.iter_mut().enumerate() {
                        r.push(if k == i { Int::one() } else { Int::zero() });
                    }
                    basis.push(ncols);
                    ncols += 1;
                }
            }
        }

        // Reduced costs against the starting basis. Its variables all cost
        // zero in phase two, so those entries are just the negated scaled
        // objective; the phase-one entries accumulate the artificial rows.
        let mut costs = Vec::new();
        if let Some(c) = objective {
            let mut scale = Int::one();
            for cj in c {
                scale = scale.lcm(cj.denom());
            }
            let mut coeffs = vec![Int::zero(); ncols];
            for (j, cj) in c.iter().enumerate() {
                let v = scaled_int(cj, &scale);
                coeffs[2 * j] = -&v;
                coeffs[2 * j + 1] = v;
            }
            costs.push(CostRow {
                coeffs,
                value: Int::zero(),
                scale,
            });
        }
        if ncols > real_cols {
            let mut coeffs = vec![Int::zero(); ncols];
            let mut value = Int::zero();
            for (i, &b) in basis.iter().enumerate() {
                if b >= real_cols {
                    for (cj, v) in coeffs.iter_mut().zip(&rows[i]) {
                        *cj -= v;
                    }
                    value -= &rhs[i];
                }
            }
            for cj in coeffs.iter_mut().skip(real_cols) {
                *cj += Int::one();
            }
            costs.push(CostRow {
                coeffs,
                value,
                scale: Int::one(),
            });
        }

        Tableau {
            ncols,
            real_cols,
            den: Int::one(),
            rows,
            rhs,
            costs,
            basis,
        }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let piv = self.rows[r][c].clone();
        debug_assert!(!piv.is_zero());
        let old_den = std::mem::replace(&mut self.den, piv.clone());
        let pivot_row = std::mem::take(&mut self.rows[r]);
        let pivot_rhs = std::mem::replace(&mut self.rhs[r], Int::zero());
        // When the pivot entry equals the old denominator, rows without the
        // entering column are rescaled by one and can be skipped outright.
        let unit = piv == old_den;
        for i in 0..self.rows.len() {
            if i == r {
                continue;
            }
            let f = self.rows[i][c].clone();
            if unit && f.is_zero() {
                continue;
            }
            combine_row(&mut self.rows[i], &pivot_row, &piv, &f, &old_den);
            self.rhs[i] = combine(&self.rhs[i], &pivot_rhs, &piv, &f, &old_den);
        }
        for cr in self.costs.iter_mut() {
            let f = cr.coeffs[c].clone();
            if unit && f.is_zero() {
                continue;
            }
            combine_row(&mut cr.coeffs, &pivot_row, &piv, &f, &old_den);
            cr.value = combine(&cr.value, &pivot_rhs, &piv, &f, &old_den);
        }
        self.rows[r] = pivot_row;
        self.rhs[r] = pivot_rhs;
        self.basis[r] = c;
        // Pivoting the leftover artificials out of the basis may pick a
        // negative entry; flipping every sign restores a positive shared
        // denominator without changing any dictionary value.
        if self.den.is_negative() {
            self.den = -&self.den;
            for row in self.rows.iter_mut() {
                for v in row.iter_mut() {
                    *v = -&*v;
                }
            }
            for v in self.rhs.iter_mut() {
                *v = -&*v;
            }
            for cr in self.costs.iter_mut() {
                for v in cr.coeffs.iter_mut() {
                    *v = -&*v;
                }
                cr.value = -&cr.value;
            }
        }
    }

    /// Maximizes cost row `cost` over columns `< limit`. Returns false
    /// when unbounded.
    ///
    /// The entering column has the most negative reduced cost. The leaving
    /// row minimizes the ratio, with ties broken lexicographically along a
    /// column order that starts with the basis columns of this call: every
    /// row then begins lexicographically positive and stays so, the
    /// objective row strictly lex-decreases with each pivot, and no basis
    /// can repeat, so the loop is finite for any entering rule.
    fn iterate(&mut self, limit: usize, cost: usize) -> bool {
        let mut order = self.basis.clone();
        let mut in_order = vec![false; self.ncols];
        for &b in &order {
            in_order[b] = true;
        }
        for j in 0..self.ncols {
            if !in_order[j] {
                order.push(j);
            }
        }
        loop {
            let coeffs = &self.costs[cost].coeffs;
            let mut entering: Option<usize> = None;
            for j in 0..limit {
                if coeffs[j].is_negative() && entering.is_none_or(|b| coeffs[j] < coeffs[b]) {
                    entering = Some(j);
                }
            }
            let Some(c) = entering else {
                return true;
            };
            let mut leave: Option<usize> = None;
            for i in 0..self.rows.len() {
                if !self.rows[i][c].is_positive() {
                    continue;
                }
                let better = match leave {
                    None => true,
                    Some(l) => lex_ratio_less(
                        (&self.rows[i], &self.rhs[i]),
                        (&self.rows[l], &self.rhs[l]),
                        c,
                        &order,
                    ),
                };
                if better {
                    leave = Some(i);
                }
            }
            let Some(r) = leave else {
                return false;
            };
            self.pivot(r, c);
        }
    }

    /// Phase one: drive the artificial variables to zero. Returns false on
    /// infeasibility; on success no artificial column remains in the basis
    /// and the artificial columns are dropped.
    fn run_phase_one(&mut self) -> bool {
        if self.ncols > self.real_cols {
            let cost = self.costs.len() - 1;
            let bounded = self.iterate(self.ncols, cost);
            debug_assert!(bounded, "phase one objective is bounded by zero");
            if self.costs[cost].value.is_negative() {
                return false;
            }
            self.costs.pop();
            // Pivot leftover artificials (necessarily at value zero) out of
            // the basis, or drop their rows as redundant.
            let mut i = 0;
            while i < self.rows.len() {
                if self.basis[i] >= self.real_cols {
                    debug_assert!(self.rhs[i].is_zero());
                    match (0..self.real_cols).find(|&j| !self.rows[i][j].is_zero()) {
                        Some(j) => self.pivot(i, j),
                        None => {
                            self.rows.remove(i);
                            self.rhs.remove(i);
                            self.basis.remove(i);
                            continue;
                        }
                    }
                }
                i += 1;
            }
            for row in self.rows.iter_mut() {
                row.truncate(self.real_cols);
            }
            for cr in self.costs.iter_mut() {
                cr.coeffs.truncate(self.real_cols);
            }
            self.ncols = self.real_cols;
        }
        true
    }

    /// Phase two over the objective given at build time. Returns false
    /// when unbounded.
    fn run_phase_two(&mut self) -> bool {
        self.iterate(self.ncols, 0)
    }

    fn objective_value(&self) -> Rational {
        let cr = &self.costs[0];
        Rational::new(cr.value.clone(), &cr.scale * &self.den)
    }

    fn extract(&self, num_vars: usize) -> Vec<Rational> {
        let mut col_value = vec![Int::zero(); self.ncols];
        for (i, &b) in self.basis.iter().enumerate() {
            col_value[b] = self.rhs[i].clone();
        }
        (0..num_vars)
            .map(|j| Rational::new(&col_value[2 * j] - &col_value[2 * j + 1], self.den.clone()))
            .collect()
    }
}

/// True when row `a` beats row `b` in the lexicographic ratio test for
/// entering column `c`: the vectors `(rhs, row) / row[c]` are compared
/// componentwise in the given column order, by cross-multiplication since
/// both pivot entries are positive (the shared denominator cancels). Rows
/// of the tableau stay linearly independent, so two distinct rows never tie
/// on every component.
fn lex_ratio_less(a: (&[Int], &Int), b: (&[Int], &Int), c: usize, order: &[usize]) -> bool {
    let pa = &a.0[c];
    let pb = &b.0[c];
    let lhs = a.1 * pb;
    let rhs = b.1 * pa;
    if lhs != rhs {
        return lhs < rhs;
    }
    for &j in order {
        let lhs = &a.0[j] * pb;
        let rhs = &b.0[j] * pa;
        if lhs != rhs {
            return lhs < rhs;
        }
    }
    false
}
