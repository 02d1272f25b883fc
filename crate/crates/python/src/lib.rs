//! Python bindings for the orbit-finite linear programming solver.
//!
//! The module exposes the library's front door: build or parse a system,
//! validate it, bring it to normal form, decide solvability over all
//! sufficiently large atom counts, maximize the orbit-sum objective, and
//! cross-check against brute-force finite instantiations. Exact numbers
//! cross the boundary unchanged: coefficients as `int`, solution values
//! as `fractions.Fraction`.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use oflp::instantiate::{instantiate_finite, oracle_supremum};
use oflp::numerics::{Int, Rational};
use oflp::orbit::{parse_system, OrbitSystem, PartialInjection, Sense, VarSign};
use oflp::paramlp::MaxResult;
use oflp::pipeline::{maximize_system, reduce_system, solve_system, InvalidSystem};
use oflp::transforms;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_sense(s: &str) -> PyResult<Sense> {
    match s {
        "geq" => Ok(Sense::Geq),
        "eq" => Ok(Sense::Eq),
        _ => Err(value_err(format!(
            "unknown sense {s:?}; expected \"geq\" or \"eq\""
        ))),
    }
}

fn parse_sign(s: &str) -> PyResult<VarSign> {
    match s {
        "free" => Ok(VarSign::Free),
        "nonneg" => Ok(VarSign::Nonneg),
        _ => Err(value_err(format!(
            "unknown sign {s:?}; expected \"free\" or \"nonneg\""
        ))),
    }
}

/// An orbit-finite system of linear constraints.
///
/// Rows and columns are orbits of constraints and unknowns, indexed from
/// zero in this API; each carries the dimension of its atom tuples. A
/// coefficient sits at a row orbit, a column orbit, and a partial
/// injection between their tuple positions, written as a list of 1-based
/// `(row_position, col_position)` pairs just like in the text format.
#[pyclass]
pub struct System {
    inner: OrbitSystem,
}

impl System {
    fn row_dim(&self, row: usize) -> PyResult<usize> {
        self.inner
            .rows
            .get(row)
            .map(|r| r.dim)
            .ok_or_else(|| value_err(format!("row orbit {row} out of range")))
    }

    fn col_dim(&self, col: usize) -> PyResult<usize> {
        self.inner
            .cols
            .get(col)
            .map(|c| c.dim)
            .ok_or_else(|| value_err(format!("column orbit {col} out of range")))
    }

    fn checked(&self) -> PyResult<&OrbitSystem> {
        let violations = self.inner.validate();
        if violations.is_empty() {
            Ok(&self.inner)
        } else {
            Err(value_err(InvalidSystem { violations }))
        }
    }
}

#[pymethods]
impl System {
    /// Creates an empty system with the given row and column orbit
    /// dimensions. Rows default to `>=` with target zero, columns to
    /// free unknowns with objective zero.
    #[new]
    fn new(row_dims: Vec<usize>, col_dims: Vec<usize>) -> System {
        System {
            inner: OrbitSystem::new(&row_dims, &col_dims),
        }
    }

    /// Parses the text format produced by `to_text`.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<System> {
        Ok(System {
            inner: parse_system(text).map_err(value_err)?,
        })
    }

    #[getter]
    fn row_count(&self) -> usize {
        self.inner.rows.len()
    }

    #[getter]
    fn col_count(&self) -> usize {
        self.inner.cols.len()
    }

    /// Largest atom tuple dimension across all orbits.
    #[getter]
    fn atom_dimension(&self) -> usize {
        self.inner.atom_dimension()
    }

    /// True when every row is an inequality and every column is free.
    #[getter]
    fn is_canonical(&self) -> bool {
        self.inner.is_canonical()
    }

    /// Sets the coefficient at `(row, col)` under the partial injection
    /// described by `pairs`. Replaces any previous value; zero deletes.
    fn set_coeff(
        &mut self,
        row: usize,
        col: usize,
        pairs: Vec<(usize, usize)>,
        value: Int,
    ) -> PyResult<()> {
        let (rd, cd) = (self.row_dim(row)?, self.col_dim(col)?);
        let inj = PartialInjection::from_pairs(rd, cd, &pairs).map_err(value_err)?;
        self.inner.set_coeff(row, col, inj, value);
        Ok(())
    }

    /// Reads a coefficient back; entries never set are zero.
    fn coeff(&self, row: usize, col: usize, pairs: Vec<(usize, usize)>) -> PyResult<Int> {
        let (rd, cd) = (self.row_dim(row)?, self.col_dim(col)?);
        let inj = PartialInjection::from_pairs(rd, cd, &pairs).map_err(value_err)?;
        Ok(self.inner.coeff(row, col, &inj))
    }

    fn set_target(&mut self, row: usize, value: Int) -> PyResult<()> {
        self.row_dim(row)?;
        self.inner.rows[row].target = value;
        Ok(())
    }

    fn set_objective(&mut self, col: usize, value: Int) -> PyResult<()> {
        self.col_dim(col)?;
        self.inner.cols[col].objective = value;
        Ok(())
    }

    /// Marks a row orbit as an inequality (`"geq"`) or equality (`"eq"`).
    fn set_sense(&mut self, row: usize, sense: &str) -> PyResult<()> {
        self.row_dim(row)?;
        self.inner.rows[row].sense = parse_sense(sense)?;
        Ok(())
    }

    /// Marks a column orbit as `"free"` or `"nonneg"`.
    fn set_sign(&mut self, col: usize, sign: &str) -> PyResult<()> {
        self.col_dim(col)?;
        self.inner.cols[col].sign = parse_sign(sign)?;
        Ok(())
    }

    /// Structural problems that would stop the solver, as printable
    /// strings. An empty list means the system is well formed.
    fn validate(&self) -> Vec<String> {
        self.inner
            .validate()
            .iter()
            .map(|v| v.to_string())
            .collect()
    }

    /// Returns the normal form: equalities doubled into inequality pairs
    /// and sign restrictions turned into explicit rows, leaving every row
    /// `>=` and every column free.
    fn canonical(&self) -> System {
        System {
            inner: self.inner.canonicalize(),
        }
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    fn __str__(&self) -> String {
        self.inner.to_text()
    }

    fn __repr__(&self) -> String {
        format!(
            "<System rows={} cols={} dim={}>",
            self.inner.rows.len(),
            self.inner.cols.len(),
            self.inner.atom_dimension()
        )
    }

    /// Decides whether the system is solvable at every sufficiently large
    /// atom count, with an exact witness for the reduced unknowns and the
    /// atom count from which the verdict applies.
    fn solve(&self) -> PyResult<Solution> {
        let analysis = solve_system(&self.inner).map_err(value_err)?;
        Ok(Solution {
            solvable: analysis.is_solvable(),
            witness: analysis.witness().map(|w| w.to_vec()),
            threshold: analysis.threshold,
            iterations: analysis.report.iterations(),
        })
    }

    /// Supremum of the orbit-sum objective over all solutions, uniform in
    /// every sufficiently large atom count.
    fn maximize(&self) -> PyResult<Maximum> {
        let (result, _) = maximize_system(&self.inner).map_err(value_err)?;
        Ok(Maximum::from_result(&result))
    }

    /// The finite program the system reduces to, with coefficients linear
    /// in the atom count.
    fn reduced(&self) -> PyResult<Reduced> {
        let reduced = reduce_system(&self.inner).map_err(value_err)?;
        Ok(Reduced {
            rows: reduced.system.ineqs.iter().map(|q| q.to_string()).collect(),
            objective: reduced.objective.clone(),
            unknowns: reduced.system.unknowns,
            dim: reduced.dim,
            n_floor: reduced.n_floor,
        })
    }

    /// Expands the system over a concrete atom set of size `n` and renders
    /// the resulting finite program as text.
    fn instantiate_text(&self, n: u64) -> PyResult<String> {
        Ok(instantiate_finite(self.checked()?, n).to_text())
    }

    /// Exact supremum of the objective over the size-`n` instantiation,
    /// computed directly by the finite simplex solver.
    fn supremum_at(&self, n: u64) -> PyResult<Maximum> {
        Ok(Maximum::from_result(&oracle_supremum(self.checked()?, n)))
    }

    /// Splits each free unknown into a nonnegative pair and gives every
    /// row its own slack column, yielding an all-equality system over
    /// nonnegative unknowns. Requires the canonical inequality form.
    fn to_nonneg_eq(&self) -> PyResult<System> {
        Ok(System {
            inner: transforms::ineq_to_nonneg_eq(&self.inner).map_err(value_err)?,
        })
    }

    /// The opposite direction: rewrites an all-equality system over
    /// nonnegative unknowns as plain inequalities over free unknowns.
    fn to_ineq(&self) -> PyResult<System> {
        Ok(System {
            inner: transforms::nonneg_eq_to_ineq(&self.inner).map_err(value_err)?,
        })
    }

    /// Adds a scalar unknown bounded by the sum of all entries, which
    /// restricts solutions to finitely supported sums without changing
    /// anything else. Requires the canonical inequality form.
    fn embed_finitary(&self) -> PyResult<System> {
        Ok(System {
            inner: transforms::fin_to_general(&self.inner).map_err(value_err)?,
        })
    }
}

/// Outcome of `System.solve`.
#[pyclass]
pub struct Solution {
    /// Whether a solution exists at every sufficiently large atom count.
    #[pyo3(get)]
    solvable: bool,
    /// Exact values for the reduced unknowns, when solvable.
    #[pyo3(get)]
    witness: Option<Vec<Rational>>,
    /// Atom count from which the verdict and witness are valid.
    #[pyo3(get)]
    threshold: Option<u64>,
    /// Elimination rounds the decision procedure took.
    #[pyo3(get)]
    iterations: usize,
}

#[pymethods]
impl Solution {
    fn __repr__(&self) -> String {
        match (self.solvable, self.threshold) {
            (true, Some(t)) => format!("<Solution solvable from n={t}>"),
            (true, None) => "<Solution solvable>".to_string(),
            _ => "<Solution unsolvable>".to_string(),
        }
    }
}

/// Outcome of `System.maximize` or `System.supremum_at`.
///
/// `kind` is `"finite"`, `"+inf"` for an unbounded objective, or `"-inf"`
/// when no solution exists. A finite supremum carries its exact `value`
/// as a Fraction and whether it is `attained` by some solution.
#[pyclass]
pub struct Maximum {
    #[pyo3(get)]
    kind: String,
    #[pyo3(get)]
    value: Option<Rational>,
    #[pyo3(get)]
    attained: Option<bool>,
    display: String,
}

impl Maximum {
    fn from_result(m: &MaxResult) -> Maximum {
        let (kind, value, attained) = match m {
            MaxResult::NegInfinity => ("-inf", None, None),
            MaxResult::PosInfinity => ("+inf", None, None),
            MaxResult::Finite { value, attained } => {
                ("finite", Some(value.clone()), Some(*attained))
            }
        };
        Maximum {
            kind: kind.to_string(),
            value,
            attained,
            display: m.to_string(),
        }
    }
}

#[pymethods]
impl Maximum {
    fn __str__(&self) -> String {
        self.display.clone()
    }

    fn __repr__(&self) -> String {
        format!("<Maximum {}>", self.display)
    }
}

/// The finite program a system reduces to. Row coefficients are affine in
/// the atom count `n`, and the reduction is faithful for `n >= n_floor`.
#[pyclass]
pub struct Reduced {
    /// Inequalities rendered as text.
    #[pyo3(get)]
    rows: Vec<String>,
    /// Objective coefficients of the reduced unknowns.
    #[pyo3(get)]
    objective: Vec<Int>,
    /// Number of reduced unknowns.
    #[pyo3(get)]
    unknowns: usize,
    /// Largest orbit dimension of the source system.
    #[pyo3(get)]
    dim: usize,
    /// Atom count from which the reduction is faithful.
    #[pyo3(get)]
    n_floor: u64,
}

#[pymethods]
impl Reduced {
    fn __repr__(&self) -> String {
        format!(
            "<Reduced {} rows, {} unknowns, n >= {}>",
            self.rows.len(),
            self.unknowns,
            self.n_floor
        )
    }
}

/// Parses the solver's text format into a `System`.
#[pyfunction]
fn parse(text: &str) -> PyResult<System> {
    System::parse(text)
}

#[pymodule]
fn oflp_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<System>()?;
    m.add_class::<Solution>()?;
    m.add_class::<Maximum>()?;
    m.add_class::<Reduced>()?;
    m.add_function(wrap_pyfunction!(parse, m)?)?;
    Ok(())
}
