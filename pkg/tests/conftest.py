from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from heckeverify.exact_poly import CoefPoly

settings.register_profile(
    "default",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


def fractions(height=100):
    return st.builds(
        Fraction,
        st.integers(-height, height),
        st.integers(1, height),
    )


@st.composite
def polys(draw, vars=("x", "y"), max_terms=5, max_deg=3, height=20):
    terms = draw(
        st.dictionaries(
            st.tuples(*[st.integers(0, max_deg) for _ in vars]),
            fractions(height),
            max_size=max_terms,
        )
    )
    return CoefPoly(vars, terms)


@st.composite
def univariate(draw, var="x", max_deg=5, height=100, min_deg=0):
    deg = draw(st.integers(min_deg, max_deg))
    coeffs = draw(st.lists(fractions(height), min_size=deg + 1, max_size=deg + 1))
    if coeffs[-1] == 0 and deg > 0:
        coeffs[-1] = Fraction(1)
    return CoefPoly.from_coeffs(coeffs, var)


@pytest.fixture
def Delta():
    return CoefPoly.var("Delta", ("Delta",))


@pytest.fixture
def u():
    return CoefPoly.var("u", ("u",))


_criteria = {}


def _criterion_of(nodeid):
    if "test_acceptance.py::" not in nodeid:
        return None
    from test_acceptance import CRITERIA

    name = nodeid.split("::")[-1].split("[")[0]
    return next((k for k, v in CRITERIA.items() if v == name), None)


def pytest_runtest_logreport(report):
    k = _criterion_of(report.nodeid)
    if k is None or (report.when != "call" and report.passed):
        return
    ok = report.passed and not hasattr(report, "wasxfail")
    _criteria[k] = _criteria.get(k, True) and ok


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_criteria):
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if _criteria[k] else 'FAIL'}")
