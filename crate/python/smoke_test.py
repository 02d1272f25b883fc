#!/usr/bin/env python3
"""End-to-end smoke test for the oflp_py extension module.

Build the extension first, then run this script from anywhere:

    cargo build -p oflp-py --release
    python3 python/smoke_test.py

The script copies the compiled cdylib into a staging directory under the
importable name oflp_py.so, imports it, and walks the whole public
surface: parsing, programmatic construction, validation, normal form,
reduction, solving, maximization, finite instantiation, and the form
transforms. Exact values come back as int and fractions.Fraction.
"""

from fractions import Fraction
import pathlib
import shutil
import sys
import tempfile

ROOT = pathlib.Path(__file__).resolve().parent.parent

# Same fixtures the command-line tests use.  The first demands that for
# every atom the remaining entries sum to at least one; the second couples
# a vertex unknown with an edge unknown and carries an objective; the
# third cancels the edge coefficients so no solution is left.
SUM_OF_OTHERS = "rows: 1\ncols: 1\ncoef 1 1 0 1\ntarget 1 1\n"
VERTEX_EDGE = (
    "rows: 1 0\ncols: 1 2\n"
    "coef 1 1 1 -1\ncoef 1 2 1 1\ncoef 1 2 2 -2\ncoef 2 1 - 1\n"
    "target 2 1\nobjective 2 3\n"
)
VERTEX_EDGE_CANCELLING = VERTEX_EDGE.replace("coef 1 2 2 -2", "coef 1 2 2 -1")


def import_extension():
    names = ("liboflp_py.so", "liboflp_py.dylib", "oflp_py.dll")
    candidates = [
        ROOT / "target" / profile / name
        for profile in ("release", "debug")
        for name in names
        if (ROOT / "target" / profile / name).exists()
    ]
    if not candidates:
        sys.exit("extension not built; run: cargo build -p oflp-py --release")
    newest = max(candidates, key=lambda p: p.stat().st_mtime)
    staging = pathlib.Path(tempfile.mkdtemp(prefix="oflp-py-"))
    suffix = ".pyd" if newest.suffix == ".dll" else ".so"
    shutil.copy2(newest, staging / ("oflp_py" + suffix))
    sys.path.insert(0, str(staging))
    import oflp_py

    return oflp_py


oflp = import_extension()


def check_solve_and_reduce():
    sys_ = oflp.parse(SUM_OF_OTHERS)
    assert sys_.row_count == 1 and sys_.col_count == 1
    assert sys_.atom_dimension == 1
    assert sys_.is_canonical
    assert sys_.validate() == []

    solution = sys_.solve()
    assert solution.solvable
    assert len(solution.witness) == 1
    witness = solution.witness[0]
    assert isinstance(witness, Fraction)
    # Any uniform value above one eventually dominates "sum of the others".
    assert witness > 1
    assert solution.iterations >= 1

    reduced = sys_.reduced()
    assert reduced.unknowns == 1 and reduced.dim == 1 and reduced.n_floor == 2
    assert sorted(reduced.rows) == ["(n - 1)·x1 >= n", "n·x1 >= n"]
    assert reduced.objective == [0]
    assert isinstance(solution.threshold, int)
    assert solution.threshold >= reduced.n_floor


def check_maximize_and_oracle():
    sys_ = oflp.parse(VERTEX_EDGE)
    best = sys_.maximize()
    assert best.kind == "finite"
    assert best.value == Fraction(-3)
    assert best.attained is True
    assert str(best) == "-3 (attained)"

    # From the faithfulness floor on, brute-force instantiations agree
    # with the uniform supremum.
    for n in (4, 5):
        at_n = sys_.supremum_at(n)
        assert at_n.kind == "finite" and at_n.value == Fraction(-3)

    listing = sys_.instantiate_text(3)
    assert "atoms: 3" in listing
    assert "x2(1,2)" in listing


def check_unsolvable():
    sys_ = oflp.parse(VERTEX_EDGE_CANCELLING)
    solution = sys_.solve()
    assert not solution.solvable
    assert solution.witness is None and solution.threshold is None
    unbounded_below = sys_.maximize()
    assert unbounded_below.kind == "-inf"
    assert unbounded_below.value is None and unbounded_below.attained is None
    assert str(unbounded_below) == "-inf"


def check_not_attained():
    sys_ = oflp.parse(SUM_OF_OTHERS + "objective 1 -2\n")
    best = sys_.maximize()
    assert best.kind == "finite"
    assert best.value == Fraction(-2)
    assert best.attained is False
    assert str(best) == "-2 (not attained)"


def check_transforms():
    sys_ = oflp.parse(VERTEX_EDGE)
    eq_form = sys_.to_nonneg_eq()
    assert not eq_form.is_canonical
    assert eq_form.validate() == []
    assert str(eq_form.maximize()) == "-3 (attained)"

    ineq_form = eq_form.to_ineq()
    assert ineq_form.is_canonical
    assert str(ineq_form.maximize()) == "-3 (attained)"

    embedded = sys_.embed_finitary()
    assert embedded.row_count == sys_.row_count + 1
    assert embedded.col_count == sys_.col_count + 1
    assert str(embedded.maximize()) == "-3 (attained)"


def check_builder():
    built = oflp.System([1], [1])
    built.set_coeff(0, 0, [], 1)
    built.set_target(0, 1)
    assert built.coeff(0, 0, []) == 1
    assert built.to_text() == oflp.parse(SUM_OF_OTHERS).to_text()
    assert built.solve().solvable

    # Sense and sign markers feed the normal-form pass.
    built.set_sense(0, "eq")
    built.set_sign(0, "nonneg")
    assert not built.is_canonical
    assert built.canonical().is_canonical


def check_errors():
    for trigger in (
        lambda: oflp.parse("rows: x\n"),
        lambda: oflp.System([1], [1]).set_coeff(0, 0, [(1, 5)], 1),
        lambda: oflp.System([1], [1]).set_target(7, 1),
        lambda: oflp.System([1], [1]).set_sense(0, "leq"),
    ):
        try:
            trigger()
        except ValueError:
            continue
        raise AssertionError("expected ValueError from %r" % trigger)


def main():
    check_solve_and_reduce()
    check_maximize_and_oracle()
    check_unsolvable()
    check_not_attained()
    check_transforms()
    check_builder()
    check_errors()
    print("smoke test: PASS")


if __name__ == "__main__":
    main()
