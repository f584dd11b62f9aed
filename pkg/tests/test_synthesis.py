import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from multiport.core import output_amplitudes, phases_from_angles
from multiport.feasibility import exact_condition_residuals
from multiport.synthesis import (
    Method,
    SearchConfig,
    Status,
    TriangleError,
    closed_form_phases,
    closed_form_state,
    equivalent_3port_states,
    magnitude_residual,
    synthesize,
    synthesize_3port,
    synthesize_search,
    triangle_angles,
    triangle_margins,
)

# known phases for the uniform 3-port target, as unit complex numbers
UNIFORM_LAM = np.exp(1j * np.array([math.pi / 2, -math.pi / 6, -math.pi / 6]))


def triangle_ok(p):
    a = np.sqrt(p)
    s = sorted([a[0] * a[2], a[0] * a[1], a[1] * a[2]])
    return s[2] <= s[0] + s[1] + 1e-12


def test_uniform_closed_form_reproduces_known_phases():
    res = synthesize_3port([1 / 3] * 3)
    assert res.success and res.method is Method.CLOSED_FORM_D3
    # equal up to a global phase
    ratio = res.lam / UNIFORM_LAM
    assert np.allclose(ratio, ratio[0], atol=1e-12)
    assert np.allclose(closed_form_phases([1 / math.sqrt(3)] * 3), UNIFORM_LAM, atol=1e-12)


def test_angles_equilateral():
    ang = triangle_angles([1 / math.sqrt(3)] * 3)
    assert (ang.a, ang.b, ang.c) == pytest.approx((math.pi / 3,) * 3)
    assert ang.a + ang.b + ang.c == pytest.approx(math.pi)


def test_angles_reject_bad_triangle():
    with pytest.raises(TriangleError):
        triangle_angles(np.sqrt([0.9, 0.09, 0.01]))
    with pytest.raises((TriangleError, ValueError)):
        triangle_angles([1, 0, 0])


@settings(max_examples=200)
@given(st.lists(st.floats(-7, 7, allow_nan=False), min_size=3, max_size=3))
def test_closed_form_recovers_any_reachable_distribution(theta):
    p = np.abs(output_amplitudes(phases_from_angles(theta))) ** 2
    p = p / p.sum()
    if np.count_nonzero(p > 1e-10) == 3 and min(triangle_margins(np.sqrt(p)).values()) > 1e-9:
        res = synthesize_3port(p)
        assert res.success
        assert res.residual <= 1e-9
        assert magnitude_residual(res.lam, p) <= 1e-9


def test_closed_form_matches_triangle_rule(rng):
    for _ in range(2000):
        p = rng.dirichlet(np.ones(3))
        res = synthesize_3port(p)
        assert res.success == triangle_ok(p)
        if res.success:
            assert np.abs(exact_condition_residuals(closed_form_state(np.sqrt(p)))).max() < 1e-12


def test_violation_names_inequality():
    res = synthesize_3port([0.9, 0.09, 0.01])
    assert res.status is Status.INFEASIBLE and res.lam is None
    assert any("|c1||c0| <=" in n for n in res.notes)


def test_single_and_double_zero():
    res = synthesize_3port([0, 1, 0])
    assert res.success and res.method is Method.RECOVERY
    assert np.allclose(np.abs(res.achieved), [0, 1, 0], atol=1e-12)
    assert synthesize_3port([0.5, 0.5, 0]).status is Status.INFEASIBLE


def test_equivalent_states_are_all_reachable(rng):
    for _ in range(50):
        p = rng.dirichlet(np.ones(3))
        if not triangle_ok(p):
            continue
        states = equivalent_3port_states(closed_form_state(np.sqrt(p)))
        assert len(states) == 6
        for c in states:
            assert np.allclose(np.abs(c) ** 2, p)
            assert np.abs(exact_condition_residuals(c)).max() < 1e-12


@pytest.mark.parametrize(
    "target",
    [[0.5, 0.5], [1, 0], [0.2, 0.8], [0.5, 0, 0.5, 0], [0.25] * 4, [0.1, 0.2, 0.3, 0.4], [0.2] * 5, [1 / 6] * 6],
)
def test_search_finds_reachable(target):
    res = synthesize_search(target)
    assert res.success, res.notes
    assert res.residual <= 1e-9
    assert magnitude_residual(res.lam, target) <= 1e-9
    assert res.lam[0] == pytest.approx(1)  # theta_0 gauge


def test_search_on_random_reachable_targets(rng):
    for d in (4, 5, 6):
        for _ in range(5):
            p = np.abs(output_amplitudes(np.exp(2j * np.pi * rng.random(d)))) ** 2
            res = synthesize_search(p / p.sum())
            assert res.success


def test_search_is_deterministic():
    cfg = SearchConfig(restarts=8, seed=7)
    a = synthesize_search([0.1, 0.2, 0.3, 0.4], cfg)
    b = synthesize_search([0.1, 0.2, 0.3, 0.4], cfg)
    assert np.array_equal(a.lam, b.lam)
    assert a.details == b.details
    assert a.details["seed"] == 7 and a.details["restarts"] == 8


def test_search_precheck_and_not_found():
    res = synthesize_search([0.9, 0.09, 0.01])
    assert res.status is Status.INFEASIBLE
    res = synthesize_search([0.9, 0.09, 0.01], SearchConfig(precheck=False, restarts=4))
    assert res.status is Status.NOT_FOUND
    assert "not a proof" in res.notes[0]
    assert res.details["restarts_used"] == 4


def test_search_config_validation():
    for kw in ({"restarts": 0}, {"max_iterations": 0}, {"tolerance": 0}, {"seed": -1}):
        with pytest.raises(ValueError):
            SearchConfig(**kw)


def test_dispatch():
    assert synthesize([1 / 3] * 3).method is Method.CLOSED_FORM_D3
    assert synthesize([0.5, 0.5]).method is Method.SEARCH


def test_mach_zehnder_universal(rng):
    for p in rng.random(30):
        assert synthesize_search([p, 1 - p]).success
