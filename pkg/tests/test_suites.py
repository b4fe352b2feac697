import random

import pytest
from mpmath import mp

from qaw import suites
from qaw.errors import DegreeRangeError, InvalidArgumentError
from qaw.numctx import make_context


@pytest.fixture(scope="module")
def identities():
    return suites.run_suite("identities", make_context(30))


def test_identities_all_pass(identities):
    names = [c.name for c in identities]
    assert names == sorted(names)
    assert {"qpoch-reflection", "theta4-triple-product", "genfun-p", "genfun-V"} <= set(names)
    assert all(c.passed for c in identities), [c.name for c in identities if not c.passed]


def test_checks_carry_residual_below_tolerance(identities):
    for c in identities:
        assert c.passed == bool(c.residual <= c.tolerance)


def test_reflection_residual_helper():
    with mp.workdps(60):
        assert suites.qpoch_reflection_residual(random.Random(0), 50) < mp.mpf(10) ** -45


def test_unknown_suite_and_regime():
    with pytest.raises(InvalidArgumentError):
        suites.run_suite("nonsense", make_context(20))
    with pytest.raises(InvalidArgumentError):
        suites.run_suite("asymptotics", make_context(20), suites.SuiteConfig(regime="nowhere"))


def test_orthogonality_degree_range():
    with pytest.raises(DegreeRangeError):
        suites.run_suite("orthogonality", make_context(20), suites.SuiteConfig(n=5))


def test_operators_suite_low_precision():
    checks = suites.run_suite("operators", make_context(20))
    assert all(c.passed for c in checks), [c.name for c in checks if not c.passed]


@pytest.mark.parametrize("regime", ["soft-edge", "beyond", "theta-bulk", "pointwise", "bulk", "param-scaled", "large-n", "qairy", "w87"])
def test_asymptotic_regimes_pass(regime):
    (check,) = suites.run_suite("asymptotics", make_context(30), suites.SuiteConfig(regime=regime))
    assert check.passed


def test_theta_regime_reports_distance_to_one():
    (check,) = suites.run_suite("asymptotics", make_context(30), suites.SuiteConfig(regime="theta-degenerate"))
    assert not check.passed
    # the literal point choice gives values cycling through +-1 with n mod 4
    ns = check.details["n"]
    assert check.details["errors_against_one"][ns.index(28)] < mp.mpf(10) ** -5
