"""Acceptance criteria 1-11.

Each ``criterion(k)`` test asserts one criterion exactly as stated.  A
criterion line reads PASS only when its test passes; an expected failure
prints FAIL.  The remaining tests pin down the parts of a failing criterion
that do hold.
"""
import time
from fractions import Fraction

import pytest

from heckeverify.algebra_zoo import derive_z, iso_check
from heckeverify.exact_poly import CoefPoly
from heckeverify.poisson import consistent_rho, make_bn, relation_ideal_check
from heckeverify.suites import run_suite

D = CoefPoly.var("Delta", ("Delta",))
u = CoefPoly.var("u", ("u",))

_cache = {}


def timed(name, **params):
    key = (name, tuple(sorted(params.items(), key=str)))
    if key not in _cache:
        t0 = time.perf_counter()
        rep = run_suite(name, **params)
        _cache[key] = rep, time.perf_counter() - t0
    return _cache[key]


def report(name, **params):
    return timed(name, **params)[0]


def statuses(rep, needle=""):
    return {e.id: e.status for e in rep.entries if needle in e.id}


def test_criterion_1_pbw():
    runs = [("pbw-usl2", {})] + [("pbw-hz", {"n": n, "zprime": D ** n}) for n in (2, 3)]
    for name, params in runs:
        rep, secs = timed(name, **params)
        conf = [e for e in rep.entries if e.id.endswith("confluence")]
        assert conf and all(e.status == "pass" for e in conf)
        assert rep.passed
        assert secs < 5


@pytest.mark.xfail(strict=True, reason="lead(z)/lead(z') is 1/(2n+2); decisions ledger, leading-coefficient law")
def test_criterion_2_central_element_law():
    z2, z3 = derive_z(2, D ** 2), derive_z(3, D ** 3)
    assert z2.degree("Delta") == 3
    assert z2.leading_coefficient("Delta") == Fraction(1, 5)
    assert z3.leading_coefficient("Delta") == Fraction(1, 7)


def test_criterion_2_degree_and_observed_ratio():
    for n in (2, 3):
        z = derive_z(n, D ** n)
        assert z.degree("Delta") == n + 1
        assert z.leading_coefficient("Delta") == Fraction(1, 2 * n + 2)
    assert report("derive-z").failures()[0].id == "n=2:lead(z)/lead(z') = 1/(2 deg z' + 1)"


def test_criterion_3_centrality():
    for n in (2, 3):
        st = statuses(report("centrality", n=n))
        for label in ("numeric", "symbolic"):
            ids = [f"{label}(n={n}):[t_z,{g}]=0" for g in "efhxy"]
            assert all(st[i] == "pass" for i in ids)
        assert st[f"numeric(n={n}):control:[t_(z+Delta),x]=0"] == "expected-fail"


@pytest.mark.xfail(strict=True, reason="printed quartic leaves residual 2z; decisions ledger, U' quartic")
def test_criterion_4_uprime_relations():
    for n in (2, 3):
        st = statuses(report("uprime-relations", n=n, zprime=D ** n))
        assert st[f"n={n}:control:z->z+Delta"] == "expected-fail"
        rels = [k for k in st if "control" not in k and ":U_z" not in k]
        assert len(rels) == 4
        assert all(st[k] == "pass" for k in rels)


def test_criterion_4_holds_with_z_sign_convention():
    for n in (2, 3):
        rep = report("uprime-relations", n=n, zprime=D ** n)
        assert rep.passed
        assert rep.convention["z_sign"] == -1
        quartic = [e for e in rep.entries if "C^2" in e.id]
        assert [e.status for e in quartic] == ["resolved-with-convention"]


def test_criterion_5_weyl_pair():
    st = statuses(report("weyl-pair"))
    assert st["n=2:[s^-2*h/2, s^2-1]=1"] == "pass"
    pairs = [f"n=2:[{a},{b}]=0" for a in ("s^-2*h", "s^2") for b in ("A", "C", "Delta")]
    assert all(st[p] == "pass" for p in pairs)


def test_criterion_6_dq_confluence():
    for deg in (2, 3, 4):
        st = statuses(report("dq-confluence", Q=u ** deg))
        pre = f"Q={u ** deg}:"
        assert st[pre + "confluence"] == "pass"
        assert st[pre + "functional equation"] == "pass"
        assert st[pre + "control:P+1 confluent"] == "expected-fail"


@pytest.mark.xfail(strict=True, reason="no sign variant of the printed map closes; decisions ledger, isomorphism")
def test_criterion_7_iso():
    rep = report("iso")
    assert rep.convention["iso_signs"] is not None
    printed = {k: v for k, v in statuses(rep, "printed-Q:").items() if "control" not in k}
    assert all(v == "pass" for v in printed.values())
    controls = statuses(rep, "printed-Q:control:")
    assert controls and all(v == "expected-fail" for v in controls.values())


def test_criterion_7_derived_map_closes():
    res = iso_check(2, D ** 2)
    assert res.closing == []
    assert len(res.variants) == 16
    assert len(res.derived) == 8 and all(c.vanishes for c in res.derived)
    failing = {c.id for c in res.derived_control if not c.vanishes}
    assert len(failing) == 2 and all("C^2" in i or "Q(u)" in i for i in failing)


@pytest.mark.parametrize("name", ["boddington", "p-from-q"])
def test_criterion_8_correspondence(name):
    rep = report(name)
    assert rep.passed
    if name == "boddington":
        st = statuses(rep)
        assert st["divisibility:(1+2x)^2 | -4q(x)q(-x-1)+gamma^2 (100 random q)"] == "pass"
        assert st["Q_from_q(q=x+1/2)=-1"] == "pass"
    else:
        st = statuses(rep)
        assert st["Q=u:P=1"] == "pass" and st["Q=u^2:P=2*u + 2"] == "pass"


@pytest.mark.xfail(strict=True, reason="printed relation is not a Poisson ideal; decisions ledger, B_n relation")
def test_criterion_9_poisson():
    for n in (2, 3, 4):
        assert report("poisson-jacobi", n=n).passed
        st = statuses(report("poisson-ideals", n=n))
        assert all(v == "pass" for k, v in st.items() if "in (x,y,Delta)" in k)
        assert all(v == "pass" for k, v in st.items() if "printed:" in k)
    for n in (2, 3):
        assert report("kleinian-slice", n=n).passed


def test_criterion_9_parts_that_hold():
    for n in (2, 3, 4):
        assert report("poisson-jacobi", n=n).passed
        st = statuses(report("poisson-ideals", n=n))
        assert all(v == "pass" for k, v in st.items() if "in (x,y,Delta)" in k)
        assert all(v == "pass" for k, v in st.items() if "derived:" in k)
        bad = {k for k, v in st.items() if v == "fail"}
        assert bad == {f"n={n}:printed:{{r,x}} in (r)", f"n={n}:printed:{{r,y}} in (r)"}
        B = make_bn(n, rho=consistent_rho(n, 2 * n + 1))
        assert all(c.vanishes for c in relation_ideal_check(B))
    for n in (2, 3):
        assert report("kleinian-slice", n=n).passed


def test_criterion_10_semiclassical():
    for n in (2, 3):
        rep = report("semiclassical", n=n)
        st = statuses(rep)
        assert len(st) == 10 and all(v == "pass" for v in st.values())
        assert st[f"n={n}:sym[e,f]={{e,f}}"] == "pass"
        assert rep.convention["bracket_sign"] == 1


def test_criterion_11_whole_suite():
    t0 = time.perf_counter()
    first = run_suite("all", n=2).to_json()
    assert time.perf_counter() - t0 < 60
    second = run_suite("all", n=2).to_json()
    assert first == second


CRITERIA = {
    1: "test_criterion_1_pbw",
    2: "test_criterion_2_central_element_law",
    3: "test_criterion_3_centrality",
    4: "test_criterion_4_uprime_relations",
    5: "test_criterion_5_weyl_pair",
    6: "test_criterion_6_dq_confluence",
    7: "test_criterion_7_iso",
    8: "test_criterion_8_correspondence",
    9: "test_criterion_9_poisson",
    10: "test_criterion_10_semiclassical",
    11: "test_criterion_11_whole_suite",
}
