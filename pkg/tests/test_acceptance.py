"""The nine acceptance criteria, one test each.

Every test runs the corresponding verification suite at its stated tolerances and
prints a single PASS/FAIL line (plus the failing checks, if any).
"""
import pytest

from qdspec.suites import SUITES, run_suite

CRITERIA = {
    1: "gamma identities (difference equations, reflection, reality, asymptotics, residue, modular)",
    2: "Kashaev difference equation along the contour",
    3: "eigenfunction equation, dual equation, evenness, reality, sigma-independence",
    4: "Jost asymptotics, connection formula, Casorati determinant",
    5: "resolvent kernel equations, symmetries and integrated identities",
    6: "transform Parseval, round trip and diagonalization",
    7: "scattering unimodularity, asymptotics and k -> 0 trend",
    8: "classical Bessel oracles and Kontorovich-Lebedev transform",
    9: "classical limit ODE residual",
}


def test_every_criterion_has_a_suite():
    assert sorted(SUITES) == sorted(CRITERIA)


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, acceptance_log):
    rep = run_suite(number)
    failing = [f"FAIL {c.name}: {c.residual:.3e} (tol {c.tol:.0e})" for c in rep.checks if not c.passed]
    notes = [f"warning: {w}" for w in rep.warnings]
    acceptance_log(rep.line(), failing + notes)
    assert rep.checks, "suite produced no checks"
    assert rep.passed, "; ".join(failing)
